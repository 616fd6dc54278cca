//! One-way communication complexities `D→`, `D←`, `D→⊕` and `D←⊕`.
//!
//! `D→(f)` is `⌈log₂⌉` of the number of distinct rows of `M_f`. For the XOR
//! variants a row may also be complemented (Alice XORs `A(x)` into her share),
//! so rows are counted up to complement; the class count is exactly the
//! minimum over all offsets `A`.

use std::collections::HashSet;

use serde::Serialize;

use crate::boolfn::{spectrum, TruthTable};
use crate::error::{Error, Result};
use crate::f2linalg::{last_word_mask, words_per_row, RowSource};
use crate::par;
use crate::twoparty::TwoPartyFunction;

/// Widest party input accepted here.
pub const MAX_COMM_BITS: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Alice to Bob: distinct rows of `M_f`.
    Right,
    /// Bob to Alice: distinct columns of `M_f`.
    Left,
}

/// `⌈log₂ k⌉`, with a single class needing zero bits.
pub fn ceil_log2(k: usize) -> usize {
    if k <= 1 {
        0
    } else {
        (usize::BITS - (k - 1).leading_zeros()) as usize
    }
}

/// Number of distinct rows of a row source, optionally identifying each row
/// with its complement.
pub fn count_distinct_rows(src: &dyn RowSource, up_to_complement: bool) -> usize {
    let stride = words_per_row(src.cols());
    let mask = last_word_mask(src.cols());
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let batch = 1024;
    let mut start = 0;
    while start < src.rows() {
        let count = batch.min(src.rows() - start);
        let rows = par::map_range(count, |i| {
            let mut row = vec![0u64; stride];
            src.fill_row(start + i, &mut row);
            if up_to_complement && row.first().is_some_and(|w| w & 1 == 1) {
                for w in row.iter_mut() {
                    *w = !*w;
                }
                row[stride - 1] &= mask;
            }
            row
        });
        seen.extend(rows);
        start += count;
    }
    seen.len()
}

fn oriented(f: &TwoPartyFunction, dir: Direction) -> Result<TwoPartyFunction> {
    if f.alice_bits() > MAX_COMM_BITS || f.bob_bits() > MAX_COMM_BITS {
        return Err(Error::SizeLimit(format!("communication complexity limited to {MAX_COMM_BITS} bits per party")));
    }
    match dir {
        Direction::Right => Ok(f.clone()),
        Direction::Left => f.transposed(),
    }
}

/// `D→(f)` or `D←(f)`.
pub fn d_oneway(f: &TwoPartyFunction, dir: Direction) -> Result<usize> {
    let g = oriented(f, dir)?;
    Ok(ceil_log2(count_distinct_rows(&g.matrix_rows()?, false)))
}

/// `D→⊕(f)` or `D←⊕(f)`.
pub fn d_oneway_xor(f: &TwoPartyFunction, dir: Direction) -> Result<usize> {
    let g = oriented(f, dir)?;
    Ok(ceil_log2(count_distinct_rows(&g.matrix_rows()?, true)))
}

/// One-way complexities of `g⊕` alongside the Fourier dimensions of `g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CommReport {
    pub d_right: usize,
    pub d_left: usize,
    pub d_right_xor: usize,
    pub d_left_xor: usize,
    pub fourier_dim: usize,
    pub affine_dim: usize,
}

pub fn comm_report(g: &TruthTable) -> Result<CommReport> {
    let f = TwoPartyFunction::xor(g.clone());
    let s = spectrum(g);
    let report = CommReport {
        d_right: d_oneway(&f, Direction::Right)?,
        d_left: d_oneway(&f, Direction::Left)?,
        d_right_xor: d_oneway_xor(&f, Direction::Right)?,
        d_left_xor: d_oneway_xor(&f, Direction::Left)?,
        fourier_dim: s.fourier_dimension(),
        affine_dim: s.affine_dimension()?,
    };
    assert!(report.d_right_xor + 1 >= report.d_right, "D→⊕ ≥ D→ − 1 violated for {g}");
    assert_eq!(report.d_right, report.fourier_dim, "D→(g⊕) ≠ dim(ĝ) for {g}");
    assert!(report.d_right_xor <= report.affine_dim, "D→⊕ exceeds affine dimension for {g}");
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::is_odd_function;

    #[test]
    fn ceil_log2_values() {
        assert_eq!([0, 1, 2, 3, 4, 5, 8, 9].map(ceil_log2), [0, 0, 1, 2, 2, 3, 3, 4]);
    }

    #[test]
    fn majority3_complexities() {
        let f = TwoPartyFunction::xor(TruthTable::majority(3).unwrap());
        assert_eq!(d_oneway(&f, Direction::Right).unwrap(), 3);
        assert_eq!(d_oneway_xor(&f, Direction::Right).unwrap(), 2);
    }

    #[test]
    fn constant_and_parity() {
        let c = TwoPartyFunction::from_fn(3, 2, |_, _| true).unwrap();
        assert_eq!(d_oneway(&c, Direction::Right).unwrap(), 0);
        assert_eq!(d_oneway(&c, Direction::Left).unwrap(), 0);
        let p = TwoPartyFunction::xor(TruthTable::parity(4, 0b1101).unwrap());
        assert_eq!(d_oneway_xor(&p, Direction::Right).unwrap(), 0);
        assert_eq!(d_oneway(&p, Direction::Right).unwrap(), 1);
    }

    #[test]
    fn addr2_columns() {
        let f = TwoPartyFunction::addr(2).unwrap();
        assert_eq!(d_oneway(&f, Direction::Left).unwrap(), 2);
        assert_eq!(d_oneway(&f, Direction::Right).unwrap(), 4);
    }

    #[test]
    fn reports() {
        let r = comm_report(&TruthTable::majority(5).unwrap()).unwrap();
        assert_eq!((r.d_right, r.d_right_xor, r.fourier_dim, r.affine_dim), (5, 4, 5, 4));
        let x = comm_report(&TruthTable::parity(3, 0b111).unwrap()).unwrap();
        assert_eq!((x.d_right, x.d_right_xor), (1, 0));
    }

    #[test]
    fn odd_functions_lose_one_bit() {
        for n in 1..=4usize {
            let half = 1usize << (n - 1);
            // odd functions are determined by their values on z < 2^{n-1}
            for code in 0u64..(1 << half).min(256) {
                let g = TruthTable::from_fn(n, |z| {
                    if z < half {
                        code >> z & 1 == 1
                    } else {
                        code >> (z ^ ((1 << n) - 1)) & 1 == 0
                    }
                })
                .unwrap();
                assert!(is_odd_function(&g));
                let r = comm_report(&g).unwrap();
                assert_eq!(r.d_right_xor + 1, r.fourier_dim, "g = {g}");
            }
        }
    }
}
