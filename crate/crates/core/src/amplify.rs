//! Bias amplification: `ρ_B`, `δ_B`, CHSH thresholds, the majority lower
//! bound and the noisy-gate recursion `ε ↦ ρ·Bias_ε(g)`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::boolfn::{FourierSpectrum, TruthTable};
use crate::commcx::{d_oneway_xor, Direction, MAX_COMM_BITS};
use crate::error::{Error, Result};
use crate::rational::{binomial, cmp_powers, from_big, to_f64, Rational};
use crate::twoparty::TwoPartyFunction;

/// Fixed-point tolerance of [`iterate_amplification`].
pub const FIXED_POINT_TOL: f64 = 1e-12;
/// Hard cap on iteration steps.
pub const MAX_STEPS: u64 = 1_000_000;
/// Largest `n` accepted by [`majmax_bound`].
pub const MAX_MAJMAX_N: usize = 40;
/// Biases at or below this magnitude count as decayed.
pub const DECAY_TOL: f64 = 1e-6;

/// `ρ_B(g) = 1 / max{1, Σ_i ĝ({i})}`.
pub fn rho_b(g: &TruthTable) -> Rational {
    rho_b_of(&FourierSpectrum::of(g))
}

pub fn rho_b_of(s: &FourierSpectrum) -> Rational {
    let scale = s.scale();
    Rational::new(scale, scale.max(s.scaled_linear_sum()))
}

/// `δ_B(g)` in exact form: `ρ^{1/d}`, or exactly 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaB {
    /// `ρ_B(g)`.
    #[serde(serialize_with = "ser_fraction")]
    pub rho: Rational,
    /// `D→⊕(g⊕)`; only computed when the root branch applies.
    pub d_xor: Option<usize>,
}

fn ser_fraction<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::rational::to_fraction_string(r))
}

impl DeltaB {
    /// True when `δ_B = 1` by the "otherwise" branch.
    pub fn is_trivial(&self) -> bool {
        self.d_xor.is_none()
    }

    pub fn value(&self) -> f64 {
        match self.d_xor {
            None => 1.0,
            Some(d) => to_f64(&self.rho).powf(1.0 / d as f64),
        }
    }

    /// Exact comparison of two values of `δ_B`: `ρ₁^{1/d₁}` vs `ρ₂^{1/d₂}`
    /// is decided by `ρ₁^{d₂}` vs `ρ₂^{d₁}`.
    pub fn cmp_exact(&self, other: &DeltaB) -> Ordering {
        let one = Rational::from_integer(1);
        let (r1, d1) = match self.d_xor {
            Some(d) => (self.rho, d as u32),
            None => (one, 1),
        };
        let (r2, d2) = match other.d_xor {
            Some(d) => (other.rho, d as u32),
            None => (one, 1),
        };
        cmp_powers(&r1, d2, &r2, d1)
    }

    /// Exact comparison against `√(2/3)`, i.e. `ρ²` vs `(2/3)^d`.
    pub fn cmp_sqrt_two_thirds(&self) -> Ordering {
        self.cmp_exact(&DeltaB { rho: Rational::new(2, 3), d_xor: Some(2) })
    }
}

/// `δ_B(g) = ρ_B(g)^{1/D→⊕(g⊕)}` when `ĝ(∅) = 0` and `ρ_B(g) < 1`, else 1.
pub fn delta_b(g: &TruthTable) -> Result<DeltaB> {
    delta_b_of(g, &FourierSpectrum::of(g))
}

pub fn delta_b_of(g: &TruthTable, s: &FourierSpectrum) -> Result<DeltaB> {
    if g.n() > MAX_COMM_BITS {
        return Err(Error::SizeLimit(format!("delta_b supports n <= {MAX_COMM_BITS}, got {}", g.n())));
    }
    let rho = rho_b_of(s);
    if s.scaled()[0] != 0 || rho == Rational::from_integer(1) {
        return Ok(DeltaB { rho, d_xor: None });
    }
    let d = d_oneway_xor(&TwoPartyFunction::xor(g.clone()), Direction::Right)?;
    // ρ_B < 1 forces a nonlinear g, so at least one bit of communication.
    debug_assert!(d >= 1);
    Ok(DeltaB { rho, d_xor: Some(d) })
}

/// Lower bound on `ρ_B` over all `n`-variable functions, attained by majorities.
pub fn majmax_bound(n: usize) -> Result<Rational> {
    if !(1..=MAX_MAJMAX_N).contains(&n) {
        return Err(Error::SizeLimit(format!("majmax_bound supports 1 <= n <= {MAX_MAJMAX_N}, got {n}")));
    }
    let nn = n as u64;
    let (num, den) = if n % 2 == 1 {
        (BigInt::from(1u8) << (n - 1), BigInt::from(nn) * binomial(nn - 1, (nn - 1) / 2))
    } else {
        (BigInt::from(1u8) << n, BigInt::from(nn) * binomial(nn, nn / 2))
    };
    debug_assert!(!den.is_zero());
    Ok(from_big(num, den))
}

/// One noisy application of `g`: `ρ·Bias_ε(g)`.
pub fn amplification_step(g: &TruthTable, rho: f64, eps: f64) -> Result<f64> {
    check_unit("rho", rho, 0.0)?;
    check_unit("eps", eps.abs(), 0.0)?;
    Ok(rho * FourierSpectrum::of(g).bias(eps))
}

fn check_unit(name: &str, v: f64, lo: f64) -> Result<()> {
    if !(lo..=1.0).contains(&v) {
        return Err(Error::InvalidArgument(format!("{name} must lie in [{lo}, 1], got {v}")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    /// Successive biases agree to within the tolerance at a nonzero value.
    Converged { fixed_point: f64 },
    /// The bias fell to (numerically) zero; `last` is the final value.
    Decayed { last: f64 },
    /// The step budget ran out.
    Unsettled { last: f64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    /// `ρ = δ^{D→⊕(g⊕)}`.
    pub rho: f64,
    pub d_xor: usize,
    pub steps: u64,
    pub outcome: Outcome,
    /// The first biases of the trajectory, `ε₀` included.
    pub head: Vec<f64>,
}

/// Number of leading trajectory points kept in [`Trajectory::head`].
pub const TRAJECTORY_HEAD: usize = 64;

/// Iterates `ε_{k+1} = δ^{D→⊕(g⊕)}·Bias_{ε_k}(g)` from `eps0`, for at most `steps` steps.
pub fn iterate_amplification(g: &TruthTable, delta: f64, eps0: f64, steps: u64) -> Result<Trajectory> {
    check_unit("delta", delta, 0.0)?;
    if !(eps0 > 0.0 && eps0 <= 1.0) {
        return Err(Error::InvalidArgument(format!("eps0 must lie in (0, 1], got {eps0}")));
    }
    if g.n() > MAX_COMM_BITS {
        return Err(Error::SizeLimit(format!("iteration supports n <= {MAX_COMM_BITS}, got {}", g.n())));
    }
    let s = FourierSpectrum::of(g);
    let d = d_oneway_xor(&TwoPartyFunction::xor(g.clone()), Direction::Right)?;
    let rho = delta.powi(d as i32);
    let steps = steps.min(MAX_STEPS);
    let mut head = vec![eps0];
    let mut eps = eps0;
    let mut taken = 0;
    let mut outcome = Outcome::Unsettled { last: eps };
    while taken < steps {
        let next = rho * s.bias(eps);
        taken += 1;
        if head.len() < TRAJECTORY_HEAD {
            head.push(next);
        }
        let settled = (next - eps).abs() < FIXED_POINT_TOL;
        eps = next;
        if eps.abs() <= DECAY_TOL && (settled || eps == 0.0) {
            outcome = Outcome::Decayed { last: eps };
            break;
        }
        if settled {
            outcome = Outcome::Converged { fixed_point: eps };
            break;
        }
        outcome = Outcome::Unsettled { last: eps };
    }
    Ok(Trajectory { rho, d_xor: d, steps: taken, outcome, head })
}

#[derive(Clone, Debug, Serialize)]
pub struct AmplificationReport {
    pub n: usize,
    pub rho_b: f64,
    pub rho_b_exact: String,
    pub hat_empty_is_zero: bool,
    /// `D→⊕(g⊕)`.
    pub d_xor: usize,
    pub delta_b: f64,
    /// True iff `δ_B` comes from the root branch.
    pub root_branch: bool,
    pub chsh_threshold: f64,
    /// Sign of `δ_B − √(2/3)`, decided exactly.
    pub vs_sqrt_two_thirds: i8,
    /// Fixed point reached with PR boxes (`δ = 1`) from `ε₀ = 10⁻³`, when `g` amplifies at all.
    pub amplifies_at: Option<f64>,
}

/// Starting bias used for [`AmplificationReport::amplifies_at`].
pub const REPORT_EPS0: f64 = 1e-3;

pub fn threshold_report(g: &TruthTable) -> Result<AmplificationReport> {
    let s = FourierSpectrum::of(g);
    let db = delta_b_of(g, &s)?;
    let d = match db.d_xor {
        Some(d) => d,
        None => d_oneway_xor(&TwoPartyFunction::xor(g.clone()), Direction::Right)?,
    };
    let amplifies_at = if db.is_trivial() {
        None
    } else {
        match iterate_amplification(g, 1.0, REPORT_EPS0, MAX_STEPS)?.outcome {
            Outcome::Converged { fixed_point } => Some(fixed_point),
            _ => None,
        }
    };
    let delta = db.value();
    Ok(AmplificationReport {
        n: g.n(),
        rho_b: to_f64(&db.rho),
        rho_b_exact: crate::rational::to_fraction_string(&db.rho),
        hat_empty_is_zero: s.scaled()[0] == 0,
        d_xor: d,
        delta_b: delta,
        root_branch: !db.is_trivial(),
        chsh_threshold: (1.0 + delta) / 2.0,
        vs_sqrt_two_thirds: db.cmp_sqrt_two_thirds() as i8,
        amplifies_at,
    })
}
