//! Exhaustive checks of the optimality of `Maj₃` on small inputs.

use std::cmp::Ordering;

use num_bigint::BigInt;
use serde::Serialize;

use crate::amplify::{delta_b_of, majmax_bound, DeltaB};
use crate::boolfn::{is_essentially_maj3, is_parity_up_to_negation, FourierSpectrum, TruthTable};
use crate::error::{Error, Result};
use crate::par;
use crate::rational::to_fraction_string;

/// Largest `n` for the full census.
pub const MAX_CENSUS_N: usize = 4;

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub g: TruthTable,
    pub delta_b: f64,
    pub rho_b: String,
    pub d_xor: Option<usize>,
}

impl Witness {
    fn new(g: TruthTable, db: &DeltaB) -> Self {
        Witness { g, delta_b: db.value(), rho_b: to_fraction_string(&db.rho), d_xor: db.d_xor }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchVerdict {
    pub n: usize,
    pub scanned: u64,
    /// Functions with `δ_B = √(2/3)` exactly.
    pub achievers: Vec<TruthTable>,
    /// A function minimizing `δ_B` (first in table order among ties).
    pub min_delta_b: Witness,
    /// Functions with `δ_B < √(2/3)`.
    pub violations: Vec<TruthTable>,
    /// Functions that are essentially `Maj₃` but do not achieve `√(2/3)`, or vice versa.
    pub mismatched: Vec<TruthTable>,
    /// Functions with `D→⊕(g⊕) ≤ 1` that are not parities up to negation.
    pub low_communication_nonlinear: Vec<TruthTable>,
    pub ok: bool,
}

struct Entry {
    db: DeltaB,
    achiever: bool,
    maj3: bool,
    low_comm_nonlinear: bool,
}

fn classify(g: &TruthTable) -> Result<Entry> {
    let s = FourierSpectrum::of(g);
    let db = delta_b_of(g, &s)?;
    let cmp = db.cmp_sqrt_two_thirds();
    // D→⊕ is only computed on the root branch; the trivial branch has ρ_B = 1
    // or ĝ(∅) ≠ 0, and D→⊕ ≤ 1 there is checked separately.
    let d = match db.d_xor {
        Some(d) => d,
        None => crate::commcx::d_oneway_xor(&crate::TwoPartyFunction::xor(g.clone()), crate::commcx::Direction::Right)?,
    };
    Ok(Entry {
        db,
        achiever: cmp == Ordering::Equal,
        maj3: is_essentially_maj3(g),
        low_comm_nonlinear: d <= 1 && !is_parity_up_to_negation(g),
    })
}

/// Scans all `2^{2ⁿ}` functions on `n ≤ 4` variables.
pub fn verify_small_n(n: usize) -> Result<SearchVerdict> {
    if !(1..=MAX_CENSUS_N).contains(&n) {
        return Err(Error::SizeLimit(format!("census supports 1 <= n <= {MAX_CENSUS_N}, got {n}")));
    }
    let count = 1u64 << (1 << n);
    let table = |v: u64| TruthTable::from_u64(n, v).expect("n <= 4 fits one word");
    let entries = par::map_range(count as usize, |v| classify(&table(v as u64)));
    let mut achievers = Vec::new();
    let mut violations = Vec::new();
    let mut mismatched = Vec::new();
    let mut low = Vec::new();
    let mut best: Option<(u64, DeltaB)> = None;
    for (v, e) in entries.into_iter().enumerate() {
        let e = e?;
        let v = v as u64;
        if e.achiever {
            achievers.push(table(v));
        }
        if e.db.cmp_sqrt_two_thirds() == Ordering::Less {
            violations.push(table(v));
        }
        if e.achiever != e.maj3 {
            mismatched.push(table(v));
        }
        if e.low_comm_nonlinear {
            low.push(table(v));
        }
        if best.as_ref().is_none_or(|(_, b)| e.db.cmp_exact(b) == Ordering::Less) {
            best = Some((v, e.db));
        }
    }
    let (bv, bdb) = best.expect("at least one function");
    let ok = violations.is_empty() && mismatched.is_empty() && low.is_empty();
    Ok(SearchVerdict {
        n,
        scanned: count,
        achievers,
        min_delta_b: Witness::new(table(bv), &bdb),
        violations,
        mismatched,
        low_communication_nonlinear: low,
        ok,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionBoundVerdict {
    pub fourier_dimension: usize,
    /// `(1/dim)^{1/(2(dim−1))}`; absent when `dim ≤ 1`.
    pub bound: Option<f64>,
    pub delta_b: f64,
    /// `δ_B ≥ bound`, decided exactly (vacuous when the bound is absent).
    pub holds: bool,
    /// For `dim ≥ 5`: whether `δ_B > √(2/3)` (exact); `None` below 5.
    pub above_sqrt_two_thirds: Option<bool>,
}

/// Checks `δ_B(g) ≥ (1/dim ĝ)^{1/(2(dim ĝ − 1))}` and, for `dim ĝ ≥ 5`, `δ_B(g) > √(2/3)`.
pub fn verify_dimension_bound(g: &TruthTable) -> Result<DimensionBoundVerdict> {
    if g.n() > 12 {
        return Err(Error::SizeLimit(format!("dimension bound check supports n <= 12, got {}", g.n())));
    }
    let s = FourierSpectrum::of(g);
    let dim = s.fourier_dimension();
    let db = delta_b_of(g, &s)?;
    let bound = (dim >= 2).then(|| (1.0 / dim as f64).powf(1.0 / (2.0 * (dim as f64 - 1.0))));
    let holds = match (bound, db.d_xor) {
        (None, _) | (_, None) => true,
        (Some(_), Some(d)) => {
            // ρ^{1/d} ≥ dim^{−1/(2(dim−1))}  <=>  p^{2(dim−1)} · dim^d ≥ q^{2(dim−1)}
            let e = 2 * (dim as u32 - 1);
            let p = BigInt::from(*db.rho.numer());
            let q = BigInt::from(*db.rho.denom());
            p.pow(e) * BigInt::from(dim).pow(d as u32) >= q.pow(e)
        }
    };
    Ok(DimensionBoundVerdict {
        fourier_dimension: dim,
        bound,
        delta_b: db.value(),
        holds,
        above_sqrt_two_thirds: (dim >= 5).then(|| db.cmp_sqrt_two_thirds() == Ordering::Greater),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MajorityRow {
    pub n: usize,
    pub rho_b: f64,
    pub rho_b_exact: String,
    pub d_xor: usize,
    pub delta_b: f64,
    /// `ρ_B(Maj_n)` equals the majority lower bound exactly.
    pub attains_majmax: bool,
    /// Sign of `δ_B − √(2/3)`, decided exactly.
    pub vs_sqrt_two_thirds: i8,
}

/// `ρ_B`, `D→⊕` and `δ_B` of `Maj_n` for odd `n ≤ 13`; fails if some `n ≥ 5`
/// does not exceed `√(2/3)` or some row misses the majority bound.
pub fn majority_sweep(ns: &[usize]) -> Result<Vec<MajorityRow>> {
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        if n % 2 == 0 || n > 13 {
            return Err(Error::InvalidArgument(format!("majority sweep takes odd n <= 13, got {n}")));
        }
        let g = TruthTable::majority(n)?;
        let db = delta_b_of(&g, &FourierSpectrum::of(&g))?;
        let d = db.d_xor.unwrap_or(0);
        let row = MajorityRow {
            n,
            rho_b: crate::rational::to_f64(&db.rho),
            rho_b_exact: to_fraction_string(&db.rho),
            d_xor: d,
            delta_b: db.value(),
            attains_majmax: db.rho == majmax_bound(n)?,
            vs_sqrt_two_thirds: db.cmp_sqrt_two_thirds() as i8,
        };
        if !row.attains_majmax || (n >= 5 && row.vs_sqrt_two_thirds != 1) {
            return Err(Error::InvalidArgument(format!("majority sweep check failed at n={n}")));
        }
        rows.push(row);
    }
    Ok(rows)
}
