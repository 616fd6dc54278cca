//! Nonlocal boxes in the two-input, two-output scenario.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for normalization and no-signaling checks.
pub const BOX_TOL: f64 = 1e-12;

/// Box whose CHSH winning probability is `(1+δ)/2` on every input, with
/// uniform output marginals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsotropicBox {
    delta: f64,
}

impl IsotropicBox {
    pub fn new(delta: f64) -> Result<Self> {
        if !delta.is_finite() || !(-1.0..=1.0).contains(&delta) {
            return Err(Error::InvalidBox(format!("delta must lie in [-1, 1], got {delta}")));
        }
        Ok(IsotropicBox { delta })
    }

    pub fn from_chsh(p: f64) -> Result<Self> {
        IsotropicBox::new(2.0 * p - 1.0)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn chsh_probability(&self) -> f64 {
        (1.0 + self.delta) / 2.0
    }

    pub fn to_general(&self) -> GeneralBox {
        let win = self.chsh_probability() / 2.0;
        let lose = (1.0 - self.chsh_probability()) / 2.0;
        GeneralBox::from_fn(|x, y, a, b| if a ^ b == x & y { win } else { lose })
    }
}

/// Joint distribution `p(a, b | x, y)`, stored as `p[x | y<<1][a | b<<1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneralBox {
    p: [[f64; 4]; 4],
}

impl GeneralBox {
    pub fn new(p: [[f64; 4]; 4]) -> Result<Self> {
        let b = GeneralBox { p };
        b.validate()?;
        Ok(b)
    }

    fn from_fn(f: impl Fn(usize, usize, usize, usize) -> f64) -> Self {
        let mut p = [[0.0; 4]; 4];
        for (xy, row) in p.iter_mut().enumerate() {
            for (ab, cell) in row.iter_mut().enumerate() {
                *cell = f(xy & 1, xy >> 1, ab & 1, ab >> 1);
            }
        }
        GeneralBox { p }
    }

    pub fn pr() -> Self {
        IsotropicBox { delta: 1.0 }.to_general()
    }

    /// Local box with `a = fa(x)`, `b = fb(y)`; `fa`, `fb` are 2-entry tables as 2-bit masks.
    pub fn local_deterministic(fa: usize, fb: usize) -> Self {
        GeneralBox::from_fn(|x, y, a, b| f64::from(u8::from(a == (fa >> x) & 1 && b == (fb >> y) & 1)))
    }

    /// Uniform-marginal box with `a ⊕ b = xy ⊕ αx ⊕ βy ⊕ γ` always.
    pub fn pr_variant(alpha: usize, beta: usize, gamma: usize) -> Self {
        GeneralBox::from_fn(|x, y, a, b| if a ^ b == (x & y) ^ (alpha & x) ^ (beta & y) ^ gamma { 0.5 } else { 0.0 })
    }

    pub fn table(&self) -> &[[f64; 4]; 4] {
        &self.p
    }

    pub fn prob(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.p[x | y << 1][a | b << 1]
    }

    pub fn validate(&self) -> Result<()> {
        for (xy, row) in self.p.iter().enumerate() {
            if row.iter().any(|&v| !v.is_finite() || v < -BOX_TOL) {
                return Err(Error::InvalidBox(format!("negative or non-finite entry for input {xy}")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > BOX_TOL {
                return Err(Error::InvalidBox(format!("probabilities for input {xy} sum to {s}")));
            }
        }
        for x in 0..2 {
            if (self.alice_marginal(x, 0) - self.alice_marginal(x, 1)).abs() > BOX_TOL {
                return Err(Error::InvalidBox(format!("Alice's marginal depends on y at x={x}")));
            }
        }
        for y in 0..2 {
            if (self.bob_marginal(0, y) - self.bob_marginal(1, y)).abs() > BOX_TOL {
                return Err(Error::InvalidBox(format!("Bob's marginal depends on x at y={y}")));
            }
        }
        Ok(())
    }

    /// `P(a = 0 | x, y)`.
    pub fn alice_marginal(&self, x: usize, y: usize) -> f64 {
        self.prob(x, y, 0, 0) + self.prob(x, y, 0, 1)
    }

    /// `P(b = 0 | x, y)`.
    pub fn bob_marginal(&self, x: usize, y: usize) -> f64 {
        self.prob(x, y, 0, 0) + self.prob(x, y, 1, 0)
    }

    /// `P(a ⊕ b = xy | x, y)`.
    pub fn success(&self, x: usize, y: usize) -> f64 {
        (0..4).filter(|ab| (ab & 1) ^ (ab >> 1) == x & y).map(|ab| self.p[x | y << 1][ab]).sum()
    }

    pub fn chsh_probability(&self) -> f64 {
        (0..4).map(|xy| self.success(xy & 1, xy >> 1)).sum::<f64>() / 4.0
    }

    /// The box seen through one value of the shared bits: inputs `(x⊕α, y⊕β)`,
    /// outputs `(a ⊕ βx ⊕ αβ ⊕ γ, b ⊕ αy ⊕ γ)`.
    pub fn twirl(&self, alpha: usize, beta: usize, gamma: usize) -> GeneralBox {
        GeneralBox::from_fn(|x, y, a, b| {
            let a0 = a ^ (beta & x) ^ (alpha & beta) ^ gamma;
            let b0 = b ^ (alpha & y) ^ gamma;
            self.prob(x ^ alpha, y ^ beta, a0, b0)
        })
    }

    /// Average of [`GeneralBox::twirl`] over all eight values of the shared bits.
    pub fn isotropize(&self) -> Result<GeneralBox> {
        self.validate()?;
        let mut p = [[0.0; 4]; 4];
        for s in 0..8 {
            let t = self.twirl(s & 1, s >> 1 & 1, s >> 2);
            for (row, trow) in p.iter_mut().zip(t.p.iter()) {
                for (c, v) in row.iter_mut().zip(trow) {
                    *c += v / 8.0;
                }
            }
        }
        Ok(GeneralBox { p })
    }

    /// The isotropic box with the same CHSH probability if this box is
    /// isotropic to within `tol`.
    pub fn as_isotropic(&self, tol: f64) -> Option<IsotropicBox> {
        let iso = IsotropicBox { delta: 2.0 * self.chsh_probability() - 1.0 }.to_general();
        let close = self.p.iter().flatten().zip(iso.p.iter().flatten()).all(|(u, v)| (u - v).abs() <= tol);
        close.then_some(IsotropicBox { delta: 2.0 * self.chsh_probability() - 1.0 })
    }
}
