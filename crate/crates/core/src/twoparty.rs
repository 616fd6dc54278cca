//! Two-party boolean functions `f(x, y)`, with Alice holding `x` and Bob `y`.

use serde::{Deserialize, Serialize};

use crate::boolfn::TruthTable;
use crate::error::{Error, Result};
use crate::f2linalg::{last_word_mask, words_per_row, F2Matrix, MemoryBudget, RowSource};

/// Widest party input for which rows of `M_f` may be enumerated.
pub const MAX_ENUMERABLE_BITS: usize = 20;

/// How `f` is represented.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    /// Explicit table: row `x`, column `y` holds `f(x, y)`.
    Table(F2Matrix),
    /// `f(x, y) = g(x ⊕ y)`.
    Xor(TruthTable),
    /// The address function `Addr_n(x, y) = x_y`: Alice holds `2^n` bits,
    /// Bob holds `n` bits read as `y = Σ y_i 2^{i-1}`.
    Addr(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoPartyFunction {
    alice_bits: usize,
    bob_bits: usize,
    source: Source,
}

#[inline]
fn input_bit(words: &[u64], i: usize) -> bool {
    words.get(i >> 6).is_some_and(|w| w >> (i & 63) & 1 == 1)
}

/// Permutes the bits of `v` by `j -> j ⊕ s` (for `s < 64`).
#[inline]
pub(crate) fn xor_permute(mut v: u64, s: usize) -> u64 {
    const MASKS: [u64; 6] = [
        0x5555_5555_5555_5555,
        0x3333_3333_3333_3333,
        0x0f0f_0f0f_0f0f_0f0f,
        0x00ff_00ff_00ff_00ff,
        0x0000_ffff_0000_ffff,
        0x0000_0000_ffff_ffff,
    ];
    for (k, m) in MASKS.iter().enumerate() {
        if s >> k & 1 == 1 {
            let sh = 1 << k;
            v = ((v & m) << sh) | ((v >> sh) & m);
        }
    }
    v
}

impl TwoPartyFunction {
    /// The XOR function `g⊕(x, y) = g(x ⊕ y)`.
    pub fn xor(g: TruthTable) -> Self {
        let n = g.n();
        TwoPartyFunction { alice_bits: n, bob_bits: n, source: Source::Xor(g) }
    }

    /// An explicit table; rows are Alice's inputs and columns Bob's.
    pub fn from_matrix(alice_bits: usize, bob_bits: usize, m: F2Matrix) -> Result<Self> {
        if alice_bits > MAX_ENUMERABLE_BITS || bob_bits > MAX_ENUMERABLE_BITS {
            return Err(Error::SizeLimit(format!(
                "explicit tables are limited to {MAX_ENUMERABLE_BITS} bits per party"
            )));
        }
        if m.rows() != 1 << alice_bits || m.cols() != 1 << bob_bits {
            return Err(Error::InvalidArgument(format!(
                "a table for {alice_bits}+{bob_bits} input bits must be {}x{}, got {}x{}",
                1usize << alice_bits,
                1usize << bob_bits,
                m.rows(),
                m.cols()
            )));
        }
        Ok(TwoPartyFunction { alice_bits, bob_bits, source: Source::Table(m) })
    }

    /// Tabulates `f` for inputs given as integers.
    pub fn from_fn(alice_bits: usize, bob_bits: usize, f: impl Fn(usize, usize) -> bool + Sync) -> Result<Self> {
        if alice_bits > MAX_ENUMERABLE_BITS || bob_bits > MAX_ENUMERABLE_BITS {
            return Err(Error::SizeLimit(format!(
                "explicit tables are limited to {MAX_ENUMERABLE_BITS} bits per party"
            )));
        }
        let m = F2Matrix::from_fn(1 << alice_bits, 1 << bob_bits, f)?;
        Self::from_matrix(alice_bits, bob_bits, m)
    }

    pub fn addr(n: usize) -> Result<Self> {
        if n == 0 || n > 10 {
            return Err(Error::InvalidArgument(format!("Addr_n needs 1 <= n <= 10, got {n}")));
        }
        Ok(TwoPartyFunction { alice_bits: 1 << n, bob_bits: n, source: Source::Addr(n) })
    }

    pub fn alice_bits(&self) -> usize {
        self.alice_bits
    }

    pub fn bob_bits(&self) -> usize {
        self.bob_bits
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    /// The wrapped `g` if this is an XOR function.
    pub fn as_xor(&self) -> Option<&TruthTable> {
        match &self.source {
            Source::Xor(g) => Some(g),
            _ => None,
        }
    }

    /// Evaluates `f` on inputs packed little-endian into words.
    pub fn eval(&self, x: &[u64], y: &[u64]) -> bool {
        match &self.source {
            Source::Table(m) => {
                m.get(x.first().copied().unwrap_or(0) as usize, y.first().copied().unwrap_or(0) as usize)
            }
            Source::Xor(g) => g.get((x.first().copied().unwrap_or(0) ^ y.first().copied().unwrap_or(0)) as usize),
            Source::Addr(n) => {
                let addr = (y.first().copied().unwrap_or(0) as usize) & ((1 << n) - 1);
                input_bit(x, addr)
            }
        }
    }

    /// Evaluates `f` on integer inputs (both parties at most 64 bits wide).
    #[inline]
    pub fn eval_idx(&self, x: usize, y: usize) -> bool {
        match &self.source {
            Source::Table(m) => m.get(x, y),
            Source::Xor(g) => g.get(x ^ y),
            Source::Addr(_) => x >> y & 1 == 1,
        }
    }

    fn check_enumerable(&self) -> Result<()> {
        if self.alice_bits > MAX_ENUMERABLE_BITS || self.bob_bits > MAX_ENUMERABLE_BITS {
            return Err(Error::SizeLimit(format!(
                "function with {}+{} input bits is too wide to tabulate",
                self.alice_bits, self.bob_bits
            )));
        }
        Ok(())
    }

    /// The roles swapped: `f^T(y, x) = f(x, y)`.
    pub fn transposed(&self) -> Result<Self> {
        match &self.source {
            Source::Xor(_) => Ok(self.clone()),
            _ => {
                self.check_enumerable()?;
                Self::from_fn(self.bob_bits, self.alice_bits, |y, x| self.eval_idx(x, y))
            }
        }
    }

    /// Row source for `M_f`.
    pub fn matrix_rows(&self) -> Result<MatrixRows<'_>> {
        self.check_enumerable()?;
        Ok(MatrixRows { f: self, prime: false })
    }

    /// Row source for `M_{f'}`, `f'(x,y) = f(x,y) ⊕ f(x,0) ⊕ f(0,y) ⊕ f(0,0)`.
    pub fn prime_rows(&self) -> Result<MatrixRows<'_>> {
        self.check_enumerable()?;
        Ok(MatrixRows { f: self, prime: true })
    }

    /// Materializes `M_f`.
    pub fn to_matrix(&self, budget: MemoryBudget) -> Result<F2Matrix> {
        match &self.source {
            Source::Table(m) => Ok(m.clone()),
            _ => F2Matrix::from_source(&self.matrix_rows()?, budget),
        }
    }
}

/// Rows of `M_f` or `M_{f'}`, generated on demand.
pub struct MatrixRows<'a> {
    f: &'a TwoPartyFunction,
    prime: bool,
}

impl MatrixRows<'_> {
    fn fill_plain(&self, x: usize, out: &mut [u64]) {
        let cols = 1usize << self.f.bob_bits;
        match &self.f.source {
            Source::Table(m) => out.copy_from_slice(m.row(x)),
            Source::Xor(g) => {
                let gw = g.words();
                let (hi, lo) = (x >> 6, x & 63);
                for (w, o) in out.iter_mut().enumerate() {
                    *o = xor_permute(gw[w ^ hi], lo);
                }
            }
            Source::Addr(_) => {
                out.fill(0);
                for y in 0..cols {
                    if self.f.eval_idx(x, y) {
                        out[y >> 6] |= 1 << (y & 63);
                    }
                }
            }
        }
        let last = out.len() - 1;
        out[last] &= last_word_mask(cols);
    }
}

impl RowSource for MatrixRows<'_> {
    fn rows(&self) -> usize {
        1 << self.f.alice_bits
    }

    fn cols(&self) -> usize {
        1 << self.f.bob_bits
    }

    fn fill_row(&self, x: usize, out: &mut [u64]) {
        self.fill_plain(x, out);
        if !self.prime {
            return;
        }
        let cols = self.cols();
        let flip = self.f.eval_idx(x, 0) ^ self.f.eval_idx(0, 0);
        match &self.f.source {
            Source::Xor(g) => {
                for (o, gw) in out.iter_mut().zip(g.words()) {
                    *o ^= gw;
                }
            }
            _ => {
                let mut row0 = vec![0u64; words_per_row(cols)];
                self.fill_plain(0, &mut row0);
                for (o, r) in out.iter_mut().zip(&row0) {
                    *o ^= r;
                }
            }
        }
        if flip {
            for o in out.iter_mut() {
                *o = !*o;
            }
        }
        let last = out.len() - 1;
        out[last] &= last_word_mask(cols);
    }
}

/// Serializable description of a target function, used by protocol files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetSpec {
    /// `g(x ⊕ y)` for the given table.
    Xor(TruthTable),
    /// `Addr_n`.
    Addr(usize),
    /// Explicit table: Alice's input selects a row given as a binary string over Bob's inputs.
    Table { alice_bits: usize, bob_bits: usize, rows: Vec<String> },
}

impl TargetSpec {
    pub fn build(&self) -> Result<TwoPartyFunction> {
        match self {
            TargetSpec::Xor(g) => Ok(TwoPartyFunction::xor(g.clone())),
            TargetSpec::Addr(n) => TwoPartyFunction::addr(*n),
            TargetSpec::Table { alice_bits, bob_bits, rows } => {
                if *alice_bits > MAX_ENUMERABLE_BITS || *bob_bits > MAX_ENUMERABLE_BITS {
                    return Err(Error::SizeLimit("table target too wide".into()));
                }
                if rows.len() != 1 << alice_bits {
                    return Err(Error::LengthMismatch { expected: 1 << alice_bits, actual: rows.len() });
                }
                let mut m = F2Matrix::zeros(1 << alice_bits, 1 << bob_bits)?;
                for (x, row) in rows.iter().enumerate() {
                    if row.chars().count() != 1 << bob_bits {
                        return Err(Error::LengthMismatch { expected: 1 << bob_bits, actual: row.chars().count() });
                    }
                    for (y, ch) in row.chars().enumerate() {
                        match ch {
                            '0' => {}
                            '1' => m.set(x, y, true),
                            _ => return Err(Error::InvalidCharacter { ch, pos: y }),
                        }
                    }
                }
                TwoPartyFunction::from_matrix(*alice_bits, *bob_bits, m)
            }
        }
    }

    /// Describes `f`; explicit tables are written row by row.
    pub fn describe(f: &TwoPartyFunction) -> Self {
        match &f.source {
            Source::Xor(g) => TargetSpec::Xor(g.clone()),
            Source::Addr(n) => TargetSpec::Addr(*n),
            Source::Table(m) => TargetSpec::Table {
                alice_bits: f.alice_bits,
                bob_bits: f.bob_bits,
                rows: (0..m.rows())
                    .map(|x| (0..m.cols()).map(|y| if m.get(x, y) { '1' } else { '0' }).collect())
                    .collect(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xor_permute_matches_definition() {
        let v = 0x0123_4567_89ab_cdefu64;
        for s in [0usize, 1, 5, 17, 63] {
            let p = xor_permute(v, s);
            for j in 0..64 {
                assert_eq!(p >> j & 1, v >> (j ^ s) & 1);
            }
        }
    }

    #[test]
    fn xor_rows_agree_with_table() {
        for n in [2usize, 3, 7] {
            let g = TruthTable::from_fn(n, |z| (z * 2654435761usize) >> 7 & 1 == 1).unwrap();
            let f = TwoPartyFunction::xor(g.clone());
            let table = TwoPartyFunction::from_fn(n, n, |x, y| g.get(x ^ y)).unwrap();
            for prime in [false, true] {
                let (a, b) = if prime {
                    (f.prime_rows().unwrap(), table.prime_rows().unwrap())
                } else {
                    (f.matrix_rows().unwrap(), table.matrix_rows().unwrap())
                };
                let ma = F2Matrix::from_source(&a, MemoryBudget::default()).unwrap();
                let mb = F2Matrix::from_source(&b, MemoryBudget::default()).unwrap();
                assert_eq!(ma, mb, "n={n} prime={prime}");
            }
        }
    }

    #[test]
    fn addr_evaluates_selected_bit() {
        let f = TwoPartyFunction::addr(2).unwrap();
        assert_eq!((f.alice_bits(), f.bob_bits()), (4, 2));
        let x = 0b1010u64;
        assert!(!f.eval(&[x], &[0]));
        assert!(f.eval(&[x], &[1]));
        assert!(f.eval(&[x], &[3]));
        let big = TwoPartyFunction::addr(7).unwrap();
        let mut x = vec![0u64; 2];
        x[1] = 1 << 3;
        assert!(big.eval(&x, &[67]));
        assert!(!big.eval(&x, &[66]));
    }

    #[test]
    fn target_spec_roundtrip() {
        let f = TwoPartyFunction::from_fn(1, 2, |x, y| x & y == 1).unwrap();
        let spec = TargetSpec::describe(&f);
        let json = serde_json::to_string(&spec).unwrap();
        let back: TargetSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back.build().unwrap(), f);
    }
}
