use crate::error::Result;
use crate::par;

use super::matrix::{packed_bytes, words_per_row, F2Matrix, MemoryBudget, RowSource};

/// How incoming rows are reduced against the current basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Elimination {
    /// One conditional row XOR per basis row.
    Plain,
    /// Method of four Russians: basis rows are grouped `k` at a time and all
    /// `2^k` combinations of each group are tabulated, so one lookup replaces
    /// up to `k` XORs.
    FourRussians { k: usize },
    /// Four Russians with `k` chosen from the basis size and a 64 MiB table cap.
    Auto,
}

const TABLE_BUDGET_BYTES: u128 = 64 << 20;
const PAR_CLEAR_MIN_WORDS: usize = 1 << 15;

#[inline]
fn bit(row: &[u64], p: usize) -> bool {
    row[p >> 6] >> (p & 63) & 1 == 1
}

#[inline]
fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

/// Fully reduced row-echelon basis of a growing row space.
///
/// Every basis row has a pivot column, and that column is zero in every other
/// basis row. Consequently the coefficient of basis row `i` in the expansion of
/// any row-space vector is just the vector's bit at pivot `i`.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    cols: usize,
    stride: usize,
    data: Vec<u64>,
    pivots: Vec<usize>,
}

struct GroupTable {
    pivots: Vec<usize>,
    table: Vec<u64>,
}

impl EchelonBasis {
    pub fn new(cols: usize) -> Self {
        EchelonBasis { cols, stride: words_per_row(cols), data: Vec::new(), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Pivot columns in basis-row order.
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    /// Bytes the basis currently occupies.
    pub fn resident_bytes(&self) -> u128 {
        packed_bytes(self.rank(), self.cols)
    }

    /// Reduces `row` against basis rows `from..` in place.
    fn reduce_from(&self, row: &mut [u64], from: usize) {
        for (i, &p) in self.pivots.iter().enumerate().skip(from) {
            if bit(row, p) {
                xor_into(row, self.row(i));
            }
        }
    }

    /// Reduces `row` against the whole basis in place; the result is zero iff
    /// `row` lies in the span.
    pub fn reduce(&self, row: &mut [u64]) {
        self.reduce_from(row, 0);
    }

    /// Inserts a row already reduced against the basis. Returns false for zero rows.
    fn insert_reduced(&mut self, row: &[u64]) -> bool {
        let Some(w) = row.iter().position(|&x| x != 0) else {
            return false;
        };
        let p = w * 64 + row[w].trailing_zeros() as usize;
        let stride = self.stride;
        if self.data.len() >= PAR_CLEAR_MIN_WORDS && cfg!(feature = "parallel") {
            par::for_each_chunk_mut(&mut self.data, stride, |_, b| {
                if bit(b, p) {
                    xor_into(b, row);
                }
            });
        } else {
            for b in self.data.chunks_mut(stride) {
                if bit(b, p) {
                    xor_into(b, row);
                }
            }
        }
        self.data.extend_from_slice(row);
        self.pivots.push(p);
        true
    }

    /// Adds one row; returns true if it enlarged the span.
    pub fn add_row(&mut self, row: &[u64]) -> bool {
        assert_eq!(row.len(), self.stride, "row width mismatch");
        let mut r = row.to_vec();
        self.reduce(&mut r);
        self.insert_reduced(&r)
    }

    fn choose_k(&self, strategy: Elimination, batch_rows: usize) -> usize {
        let rank = self.rank();
        match strategy {
            Elimination::Plain => 1,
            Elimination::FourRussians { k } => k.clamp(1, 16),
            Elimination::Auto => {
                if rank < 32 {
                    return 1;
                }
                // minimize table build (2^k per group) plus lookups (batch per group)
                let mut best = (f64::INFINITY, 1);
                for k in 2..=10usize {
                    let groups = rank.div_ceil(k);
                    let bytes = groups as u128 * (1u128 << k) * self.stride as u128 * 8;
                    if bytes > TABLE_BUDGET_BYTES {
                        break;
                    }
                    let cost = groups as f64 * ((1usize << k) + batch_rows) as f64;
                    if cost < best.0 {
                        best = (cost, k);
                    }
                }
                let plain = rank as f64 * batch_rows as f64 / 2.0;
                if best.0 < plain {
                    best.1
                } else {
                    1
                }
            }
        }
    }

    fn build_tables(&self, k: usize) -> Vec<GroupTable> {
        let stride = self.stride;
        let groups: Vec<(usize, usize)> = (0..self.rank()).step_by(k).map(|s| (s, (s + k).min(self.rank()))).collect();
        par::map_range(groups.len(), |g| {
            let (start, end) = groups[g];
            let width = end - start;
            let mut table = vec![0u64; (1 << width) * stride];
            for idx in 1usize..(1 << width) {
                let low = idx.trailing_zeros() as usize;
                let prev = idx & (idx - 1);
                let (done, rest) = table.split_at_mut(idx * stride);
                let dst = &mut rest[..stride];
                dst.copy_from_slice(&done[prev * stride..(prev + 1) * stride]);
                xor_into(dst, self.row(start + low));
            }
            GroupTable { pivots: self.pivots[start..end].to_vec(), table }
        })
    }

    /// Absorbs a batch of packed rows (`batch.len()` a multiple of the row
    /// width). Rows are first reduced in parallel against the current basis,
    /// then inserted one at a time. The batch is overwritten.
    pub fn absorb_batch(&mut self, batch: &mut [u64], strategy: Elimination) {
        let stride = self.stride;
        if stride == 0 {
            return;
        }
        assert_eq!(batch.len() % stride, 0, "batch is not a whole number of rows");
        let snapshot = self.rank();
        let batch_rows = batch.len() / stride;
        let k = self.choose_k(strategy, batch_rows);
        if k > 1 && snapshot > 0 {
            let tables = self.build_tables(k);
            par::for_each_chunk_mut(batch, stride, |_, row| {
                for g in &tables {
                    let idx =
                        g.pivots.iter().enumerate().fold(0usize, |acc, (j, &p)| acc | (usize::from(bit(row, p)) << j));
                    if idx != 0 {
                        xor_into(row, &g.table[idx * stride..(idx + 1) * stride]);
                    }
                }
            });
        } else if snapshot > 0 {
            let this = &*self;
            par::for_each_chunk_mut(batch, stride, |_, row| this.reduce_from(row, 0));
        }
        // Residuals are zero at every snapshot pivot; only rows inserted during
        // this batch can still hit them.
        for row in batch.chunks_mut(stride) {
            self.reduce_from(row, snapshot);
            self.insert_reduced(row);
        }
    }

    /// Absorbs every row of `src`, generating rows in parallel batches. Fails
    /// if the basis outgrows `budget`.
    pub fn absorb_source(&mut self, src: &dyn RowSource, strategy: Elimination, budget: MemoryBudget) -> Result<()> {
        assert_eq!(src.cols(), self.cols, "row source width mismatch");
        let stride = self.stride;
        if stride == 0 {
            return Ok(());
        }
        let batch_rows = ((8usize << 20) / (stride * 8)).clamp(64, 1024);
        let mut buf = vec![0u64; batch_rows * stride];
        let mut start = 0;
        while start < src.rows() {
            let count = batch_rows.min(src.rows() - start);
            let batch = &mut buf[..count * stride];
            par::for_each_chunk_mut(batch, stride, |i, row| src.fill_row(start + i, row));
            self.absorb_batch(batch, strategy);
            budget.check(self.resident_bytes())?;
            start += count;
        }
        Ok(())
    }

    /// The basis as an `r × cols` matrix, rows in basis order.
    pub fn to_matrix(&self) -> Result<F2Matrix> {
        F2Matrix::from_packed_rows(self.rank(), self.cols, self.data.clone())
    }

    /// Expansion coefficients of a row-space vector (its bits at the pivots).
    pub fn coordinates(&self, row: &[u64]) -> Vec<bool> {
        self.pivots.iter().map(|&p| bit(row, p)).collect()
    }
}
