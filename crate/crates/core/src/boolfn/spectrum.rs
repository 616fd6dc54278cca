use std::ops::{Add, Sub};

use num_rational::Rational64;

use super::TruthTable;
use crate::error::{Error, Result};
use crate::par;

/// Tables at least this long use the parallel butterfly passes.
const PAR_FWHT_MIN_LEN: usize = 1 << 14;

/// Fourier coefficients of a boolean function, scaled by `2^n` so they are
/// exact integers: `coeffs[S] = 2^n * ĝ(S) = Σ_z (-1)^{g(z)} (-1)^{|S ∧ z|}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourierSpectrum {
    n: usize,
    coeffs: Vec<i32>,
}

/// In-place unnormalized Walsh–Hadamard transform. `data.len()` must be a power of two.
pub fn fwht<T>(data: &mut [T])
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Send + Sync,
{
    let len = data.len();
    assert!(len.is_power_of_two(), "transform length must be a power of two");
    let mut h = 1;
    while h < len {
        if len >= PAR_FWHT_MIN_LEN && cfg!(feature = "parallel") {
            let block = (2 * h).max(PAR_FWHT_MIN_LEN / 4);
            par::for_each_chunk_mut(data, block, |_, chunk| butterfly_pass(chunk, h));
        } else {
            butterfly_pass(data, h);
        }
        h *= 2;
    }
}

fn butterfly_pass<T>(data: &mut [T], h: usize)
where
    T: Copy + Add<Output = T> + Sub<Output = T>,
{
    for block in data.chunks_mut(2 * h) {
        let (lo, hi) = block.split_at_mut(h);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = x + y;
            *b = x - y;
        }
    }
}

/// The `(-1)^{g(z)}` vector of a table.
pub fn sign_vector(g: &TruthTable) -> Vec<i32> {
    (0..g.len()).map(|z| if g.get(z) { -1 } else { 1 }).collect()
}

impl FourierSpectrum {
    pub fn of(g: &TruthTable) -> Self {
        let mut coeffs = sign_vector(g);
        fwht(&mut coeffs);
        FourierSpectrum { n: g.n(), coeffs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Scaled coefficients indexed by subset mask.
    pub fn scaled(&self) -> &[i32] {
        &self.coeffs
    }

    /// `2^n`, the scale factor.
    pub fn scale(&self) -> i64 {
        1 << self.n
    }

    /// The exact coefficient `ĝ(S)`.
    pub fn coefficient(&self, mask: usize) -> Rational64 {
        Rational64::new(self.coeffs[mask] as i64, self.scale())
    }

    /// Masks of the nonzero coefficients, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.coeffs.iter().enumerate().filter(|(_, &c)| c != 0).map(|(s, _)| s).collect()
    }

    /// Dimension of the F₂-span of the support masks.
    pub fn fourier_dimension(&self) -> usize {
        mask_rank(self.support().into_iter())
    }

    /// Dimension of the smallest affine subspace of F₂ⁿ containing the support.
    pub fn affine_dimension(&self) -> Result<usize> {
        let support = self.support();
        let base = *support.first().ok_or(Error::EmptySupport)?;
        Ok(mask_rank(support.into_iter().map(|s| s ^ base)))
    }

    /// `Σ_S Ĝ(S)²`, equal to `4^n` for every boolean function.
    pub fn parseval_sum(&self) -> i64 {
        self.coeffs.iter().map(|&c| (c as i64) * (c as i64)).sum()
    }

    /// `2^n · Σ_i ĝ({i})`.
    pub fn scaled_linear_sum(&self) -> i64 {
        (0..self.n).map(|i| self.coeffs[1 << i] as i64).sum()
    }

    /// `Σ_i ĝ({i})` as an exact rational.
    pub fn linear_sum(&self) -> Rational64 {
        Rational64::new(self.scaled_linear_sum(), self.scale())
    }

    /// Number of variables with a nonzero degree-one coefficient.
    pub fn linear_support_size(&self) -> usize {
        (0..self.n).filter(|&i| self.coeffs[1 << i] != 0).count()
    }

    /// Mask of the variables the function depends on.
    pub fn dependence_mask(&self) -> usize {
        self.support().into_iter().fold(0, |acc, s| acc | s)
    }

    /// `Bias_ε(g)` grouped by degree: entry `k` is `Σ_{|S|=k} ĝ(S)`.
    pub fn bias_degree_vector(&self) -> Vec<Rational64> {
        let mut sums = vec![0i64; self.n + 1];
        for (s, &c) in self.coeffs.iter().enumerate() {
            sums[s.count_ones() as usize] += c as i64;
        }
        sums.into_iter().map(|v| Rational64::new(v, self.scale())).collect()
    }

    /// `Bias_ε(g) = Σ_S ĝ(S) ε^{|S|}`; sums are exact until the final evaluation.
    pub fn bias(&self, eps: f64) -> f64 {
        let mut sums = vec![0i64; self.n + 1];
        for (s, &c) in self.coeffs.iter().enumerate() {
            sums[s.count_ones() as usize] += c as i64;
        }
        horner(sums.iter().map(|&v| v as f64), eps) / self.scale() as f64
    }

    /// Derivative of `Bias_ε(g)` in ε.
    pub fn bias_derivative(&self, eps: f64) -> f64 {
        let mut sums = vec![0i64; self.n + 1];
        for (s, &c) in self.coeffs.iter().enumerate() {
            sums[s.count_ones() as usize] += c as i64;
        }
        let deriv: Vec<f64> = sums.iter().enumerate().skip(1).map(|(k, &v)| k as f64 * v as f64).collect();
        horner(deriv.into_iter(), eps) / self.scale() as f64
    }

    /// Noise stability `Σ_S ĝ(S)² δ^{|S|}`.
    pub fn stability(&self, delta: f64) -> f64 {
        let mut sums = vec![0u64; self.n + 1];
        for (s, &c) in self.coeffs.iter().enumerate() {
            sums[s.count_ones() as usize] += (c as i64 * c as i64) as u64;
        }
        let scale = (self.scale() * self.scale()) as f64;
        horner(sums.iter().map(|&v| v as f64), delta) / scale
    }
}

/// Evaluates `Σ c_k x^k` given coefficients in ascending degree.
fn horner(coeffs: impl DoubleEndedIterator<Item = f64>, x: f64) -> f64 {
    coeffs.rev().fold(0.0, |acc, c| acc * x + c)
}

/// F₂ rank of a set of bit masks.
pub fn mask_rank(masks: impl Iterator<Item = usize>) -> usize {
    // basis[b] holds a vector whose highest set bit is b
    let mut basis = [0usize; usize::BITS as usize];
    let mut rank = 0;
    for mut v in masks {
        while v != 0 {
            let top = usize::BITS as usize - 1 - v.leading_zeros() as usize;
            if basis[top] == 0 {
                basis[top] = v;
                rank += 1;
                break;
            }
            v ^= basis[top];
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(g: &TruthTable) -> Vec<i64> {
        (0..g.len())
            .map(|s| {
                (0..g.len())
                    .map(|z| {
                        let e = u32::from(g.get(z)) + (s & z).count_ones();
                        if e % 2 == 0 {
                            1
                        } else {
                            -1
                        }
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn majority3_spectrum() {
        let s = FourierSpectrum::of(&TruthTable::majority(3).unwrap());
        let half = Rational64::new(1, 2);
        for i in 0..3 {
            assert_eq!(s.coefficient(1 << i), half);
        }
        assert_eq!(s.coefficient(0b111), -half);
        for m in [0, 0b011, 0b101, 0b110] {
            assert_eq!(s.coefficient(m), Rational64::from_integer(0));
        }
        assert_eq!(s.support(), vec![0b001, 0b010, 0b100, 0b111]);
    }

    #[test]
    fn constant_zero_spectrum() {
        let s = FourierSpectrum::of(&TruthTable::zeros(2).unwrap());
        assert_eq!(s.scaled(), &[4, 0, 0, 0]);
        let one = FourierSpectrum::of(&TruthTable::zeros(2).unwrap().negated());
        assert_eq!(one.support(), vec![0]);
    }

    #[test]
    fn matches_definition_sum() {
        for seed in 0..20u64 {
            let g = TruthTable::from_u64(3, seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 56).unwrap();
            let s = FourierSpectrum::of(&g);
            let expected = brute_force(&g);
            let got: Vec<i64> = s.scaled().iter().map(|&c| c as i64).collect();
            assert_eq!(got, expected, "table {g}");
        }
    }

    #[test]
    fn dimensions() {
        let maj3 = FourierSpectrum::of(&TruthTable::majority(3).unwrap());
        assert_eq!(maj3.fourier_dimension(), 3);
        assert_eq!(maj3.affine_dimension().unwrap(), 2);
        let maj5 = FourierSpectrum::of(&TruthTable::majority(5).unwrap());
        assert_eq!(maj5.fourier_dimension(), 5);
        assert_eq!(maj5.affine_dimension().unwrap(), 4);
        let par = FourierSpectrum::of(&TruthTable::parity(4, 0b1011).unwrap());
        assert_eq!(par.support(), vec![0b1011]);
        assert_eq!(par.fourier_dimension(), 1);
        assert_eq!(par.affine_dimension().unwrap(), 0);
    }

    #[test]
    fn bias_polynomial_of_majority3() {
        let s = FourierSpectrum::of(&TruthTable::majority(3).unwrap());
        let v = s.bias_degree_vector();
        assert_eq!(
            v,
            vec![
                Rational64::from_integer(0),
                Rational64::new(3, 2),
                Rational64::from_integer(0),
                Rational64::new(-1, 2)
            ]
        );
        assert!((s.bias(0.1) - 0.1495).abs() < 1e-15);
        assert!((s.bias_derivative(0.0) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn bias_at_one_is_value_at_origin() {
        for v in [0b1110_1000u64, 0b0001_0111, 0b0110_1001, 0b1001_0110] {
            let g = TruthTable::from_u64(3, v).unwrap();
            let expected = if g.get(0) { -1.0 } else { 1.0 };
            assert_eq!(FourierSpectrum::of(&g).bias(1.0), expected);
        }
    }

    #[test]
    fn bias_matches_weighted_enumeration() {
        // E[(-1)^{g(z)}] where each bit is 0 (sign +1) with probability (1+eps)/2
        let g = TruthTable::majority(5).unwrap();
        let eps = 0.1;
        let expected: f64 = (0..32usize)
            .map(|z| {
                let ones = z.count_ones() as i32;
                let p = ((1.0 + eps) / 2f64).powi(5 - ones) * ((1.0 - eps) / 2f64).powi(ones);
                if g.get(z) {
                    -p
                } else {
                    p
                }
            })
            .sum();
        let got = FourierSpectrum::of(&g).bias(eps);
        assert!((got - expected).abs() < 1e-14, "{got} vs {expected}");
    }

    #[test]
    fn stability_values() {
        let par = FourierSpectrum::of(&TruthTable::parity(4, 0b0111).unwrap());
        assert!((par.stability(0.7) - 0.343).abs() < 1e-15);
        let maj = FourierSpectrum::of(&TruthTable::majority(3).unwrap());
        for d in [0.0, 0.3, 0.9] {
            assert!((maj.stability(d) - (0.75 * d + 0.25 * d * d * d)).abs() < 1e-15);
        }
        assert_eq!(maj.stability(1.0), 1.0);
    }

    #[test]
    fn mask_rank_examples() {
        assert_eq!(mask_rank([0b001, 0b010, 0b100, 0b111].into_iter()), 3);
        assert_eq!(mask_rank([0b011, 0b101, 0b110, 0b000].into_iter()), 2);
        assert_eq!(mask_rank(std::iter::empty()), 0);
    }
}
