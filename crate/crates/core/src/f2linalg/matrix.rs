use std::fmt;

use crate::error::{Error, Result};
use crate::par;

use super::echelon::{EchelonBasis, Elimination};

/// Default cap on packed matrix storage: 256 MiB.
pub const DEFAULT_BUDGET_BYTES: u128 = 256 << 20;

/// Upper bound on bytes a matrix (or basis) may occupy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MemoryBudget(pub u128);

impl MemoryBudget {
    pub const fn unlimited() -> Self {
        MemoryBudget(u128::MAX)
    }

    pub fn check(self, needed: u128) -> Result<()> {
        if needed > self.0 {
            Err(Error::MemoryBudget { needed, budget: self.0 })
        } else {
            Ok(())
        }
    }
}

impl Default for MemoryBudget {
    fn default() -> Self {
        MemoryBudget(DEFAULT_BUDGET_BYTES)
    }
}

/// Words needed for one packed row of `cols` bits.
pub fn words_per_row(cols: usize) -> usize {
    cols.div_ceil(64)
}

/// Mask of the valid bits in the last word of a row.
pub fn last_word_mask(cols: usize) -> u64 {
    match cols % 64 {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// Packed storage a `rows × cols` matrix needs, in bytes.
pub fn packed_bytes(rows: usize, cols: usize) -> u128 {
    rows as u128 * words_per_row(cols) as u128 * 8
}

/// Anything that can produce the packed rows of a matrix on demand.
pub trait RowSource: Sync {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    /// Writes row `i` into `out` (`words_per_row(cols)` words, padding zero).
    fn fill_row(&self, i: usize, out: &mut [u64]);
}

/// Dense matrix over F₂, row-major, each row padded to a whole number of
/// 64-bit words. Padding bits are always zero.
#[derive(Clone, PartialEq, Eq)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::zeros_with_budget(rows, cols, MemoryBudget::default())
    }

    pub fn zeros_with_budget(rows: usize, cols: usize, budget: MemoryBudget) -> Result<Self> {
        budget.check(packed_bytes(rows, cols))?;
        let stride = words_per_row(cols);
        Ok(F2Matrix { rows, cols, stride, data: vec![0; rows * stride] })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m.set(i, i, true);
        }
        Ok(m)
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> bool + Sync) -> Result<Self> {
        let mut m = Self::zeros(rows, cols)?;
        let stride = m.stride;
        if stride > 0 {
            par::for_each_chunk_mut(&mut m.data, stride, |i, row| {
                for j in 0..cols {
                    if f(i, j) {
                        row[j >> 6] |= 1 << (j & 63);
                    }
                }
            });
        }
        Ok(m)
    }

    /// Materializes every row of `src` under `budget`.
    pub fn from_source(src: &dyn RowSource, budget: MemoryBudget) -> Result<Self> {
        let mut m = Self::zeros_with_budget(src.rows(), src.cols(), budget)?;
        let stride = m.stride;
        if stride > 0 {
            par::for_each_chunk_mut(&mut m.data, stride, |i, row| src.fill_row(i, row));
        }
        Ok(m)
    }

    /// Builds a matrix from packed rows; padding bits are cleared.
    pub fn from_packed_rows(rows: usize, cols: usize, mut data: Vec<u64>) -> Result<Self> {
        let stride = words_per_row(cols);
        if data.len() != rows * stride {
            return Err(Error::InvalidArgument(format!(
                "expected {} packed words for a {rows}x{cols} matrix, got {}",
                rows * stride,
                data.len()
            )));
        }
        if stride > 0 {
            let mask = last_word_mask(cols);
            for row in data.chunks_mut(stride) {
                row[stride - 1] &= mask;
            }
        }
        Ok(F2Matrix { rows, cols, stride, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Words per packed row.
    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn data(&self) -> &[u64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.stride + (j >> 6)] >> (j & 63) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        debug_assert!(i < self.rows && j < self.cols);
        let w = &mut self.data[i * self.stride + (j >> 6)];
        if v {
            *w |= 1 << (j & 63);
        } else {
            *w &= !(1 << (j & 63));
        }
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.stride..(i + 1) * self.stride]
    }

    /// XORs row `src` into row `dst`.
    pub fn xor_row_into(&mut self, src: usize, dst: usize) {
        assert_ne!(src, dst);
        let s = self.stride;
        let (a, b) = if src < dst {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&lo[src * s..(src + 1) * s], &mut hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&hi[..s], &mut lo[dst * s..(dst + 1) * s])
        };
        for (d, w) in b.iter_mut().zip(a) {
            *d ^= w;
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let s = self.stride;
        for k in 0..s {
            self.data.swap(a * s + k, b * s + k);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn transpose(&self) -> Result<Self> {
        let mut t = Self::zeros(self.cols, self.rows)?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        Ok(t)
    }

    /// Matrix product over F₂.
    pub fn mul(&self, other: &F2Matrix) -> Result<F2Matrix> {
        if self.cols != other.rows {
            return Err(Error::InvalidArgument(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols)?;
        let stride = out.stride;
        if stride > 0 {
            par::for_each_chunk_mut(&mut out.data, stride, |i, row| {
                for k in 0..self.cols {
                    if self.get(i, k) {
                        for (d, w) in row.iter_mut().zip(other.row(k)) {
                            *d ^= w;
                        }
                    }
                }
            });
        }
        Ok(out)
    }

    /// Rank over F₂.
    pub fn rank(&self) -> usize {
        self.echelon(Elimination::Auto).rank()
    }

    /// Fully reduced row-echelon basis of the row space.
    pub fn echelon(&self, strategy: Elimination) -> EchelonBasis {
        let mut basis = EchelonBasis::new(self.cols);
        basis.absorb_source(self, strategy, MemoryBudget::unlimited()).expect("unlimited budget");
        basis
    }

    /// Rank-revealing factorization `self = U · V` with `U` of size
    /// `rows × r` and `V` of size `r × cols`, `r = rank(self)`.
    ///
    /// `V` is the reduced row-echelon basis of the row space; column `i` of
    /// `U` is the column of `self` at the pivot of `V`'s row `i`.
    pub fn factor(&self) -> Result<(F2Matrix, F2Matrix)> {
        let basis = self.echelon(Elimination::Auto);
        let v = basis.to_matrix()?;
        let pivots = basis.pivots().to_vec();
        let u = F2Matrix::from_fn(self.rows, pivots.len(), |x, i| self.get(x, pivots[i]))?;
        Ok((u, v))
    }
}

impl RowSource for F2Matrix {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.cols
    }

    fn fill_row(&self, i: usize, out: &mut [u64]) {
        out.copy_from_slice(self.row(i));
    }
}

impl fmt::Debug for F2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "F2Matrix {}x{}", self.rows, self.cols)?;
        if self.rows <= 64 && self.cols <= 128 {
            for i in 0..self.rows {
                let line: String = (0..self.cols).map(|j| if self.get(i, j) { '1' } else { '.' }).collect();
                writeln!(f, "  {line}")?;
            }
        }
        Ok(())
    }
}

/// Rank of the rows produced by an iterator, keeping only the reduced basis resident.
pub fn rank_streamed<I>(rows: I, cols: usize) -> usize
where
    I: IntoIterator<Item = Vec<u64>>,
{
    let mut basis = EchelonBasis::new(cols);
    let stride = words_per_row(cols);
    let batch_rows = 256;
    let mut batch = Vec::with_capacity(batch_rows * stride);
    for row in rows {
        assert_eq!(row.len(), stride, "streamed row has the wrong width");
        batch.extend_from_slice(&row);
        if batch.len() == batch_rows * stride {
            basis.absorb_batch(&mut batch, Elimination::Auto);
            batch.clear();
        }
    }
    if !batch.is_empty() {
        basis.absorb_batch(&mut batch, Elimination::Auto);
    }
    basis.rank()
}

/// Rank of a row source without materializing it.
pub fn rank_of_source(src: &dyn RowSource, strategy: Elimination, budget: MemoryBudget) -> Result<usize> {
    let mut basis = EchelonBasis::new(src.cols());
    basis.absorb_source(src, strategy, budget)?;
    Ok(basis.rank())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> F2Matrix {
        let mut m = F2Matrix::zeros(rows, cols).unwrap();
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, rng.random::<bool>());
            }
        }
        m
    }

    /// Counts a maximal independent row subset by incremental insertion into a
    /// list of (pivot, row) pairs, using `Vec<bool>` rows.
    fn oracle_rank(m: &F2Matrix) -> usize {
        let mut basis: Vec<(usize, Vec<bool>)> = Vec::new();
        for i in 0..m.rows() {
            let mut r: Vec<bool> = (0..m.cols()).map(|j| m.get(i, j)).collect();
            for (p, b) in &basis {
                if r[*p] {
                    for (x, y) in r.iter_mut().zip(b) {
                        *x ^= *y;
                    }
                }
            }
            if let Some(p) = r.iter().position(|&v| v) {
                for (_, b) in basis.iter_mut() {
                    if b[p] {
                        for (x, y) in b.iter_mut().zip(&r) {
                            *x ^= *y;
                        }
                    }
                }
                basis.push((p, r));
            }
        }
        basis.len()
    }

    #[test]
    fn trivial_ranks() {
        assert_eq!(F2Matrix::identity(8).unwrap().rank(), 8);
        assert_eq!(F2Matrix::zeros(8, 8).unwrap().rank(), 0);
        assert_eq!(F2Matrix::zeros(0, 5).unwrap().rank(), 0);
    }

    #[test]
    fn random_rank_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let m = random_matrix(12, 12, &mut rng);
            assert_eq!(m.rank(), oracle_rank(&m));
        }
        for (r, c) in [(70, 130), (130, 70), (3, 200)] {
            let m = random_matrix(r, c, &mut rng);
            assert_eq!(m.rank(), oracle_rank(&m));
        }
    }

    #[test]
    fn factor_reproduces_matrix() {
        let id = F2Matrix::identity(4).unwrap();
        let (u, v) = id.factor().unwrap();
        assert_eq!(u, id);
        assert_eq!(v, id);

        let u0 = F2Matrix::from_fn(6, 1, |i, _| i % 2 == 1 || i == 4).unwrap();
        let v0 = F2Matrix::from_fn(1, 9, |_, j| j % 3 != 0).unwrap();
        let outer = u0.mul(&v0).unwrap();
        let (u, v) = outer.factor().unwrap();
        assert_eq!((u.cols(), v.rows()), (1, 1));
        assert_eq!(u, u0);
        assert_eq!(v, v0);

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = random_matrix(20, 5, &mut rng);
            let b = random_matrix(5, 33, &mut rng);
            let m = a.mul(&b).unwrap();
            let (u, v) = m.factor().unwrap();
            assert_eq!(u.cols(), m.rank());
            assert_eq!(u.mul(&v).unwrap(), m);
            assert_eq!(u.mul(&v).unwrap().rank(), m.rank());
        }
    }

    #[test]
    fn streamed_rank_matches() {
        let rows: Vec<Vec<u64>> = (0..16).map(|i| vec![1u64 << i]).collect();
        assert_eq!(rank_streamed(rows, 16), 16);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_matrix(200, 64, &mut rng);
        let rows: Vec<Vec<u64>> = (0..200).map(|i| m.row(i).to_vec()).collect();
        assert_eq!(rank_streamed(rows, 64), m.rank());
        assert_eq!(m.rank(), 64);
    }

    #[test]
    fn budget_guard() {
        let tiny = MemoryBudget(1024);
        assert!(matches!(F2Matrix::zeros_with_budget(1024, 1024, tiny), Err(Error::MemoryBudget { .. })));
        assert!(F2Matrix::zeros_with_budget(16, 64, tiny).is_ok());
    }
}
