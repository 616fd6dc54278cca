//! Boolean functions as truth tables, and their Fourier analysis.
//!
//! Bits map to signs by `b -> (-1)^b`, so `0` is `+1`.

mod spectrum;
mod truth_table;

pub use spectrum::{fwht, mask_rank, sign_vector, FourierSpectrum};
pub use truth_table::{TruthTable, MAX_VARS};

use crate::error::{Error, Result};

/// Shorthand for [`FourierSpectrum::of`].
pub fn spectrum(g: &TruthTable) -> FourierSpectrum {
    FourierSpectrum::of(g)
}

/// True iff `g` is a parity of some variables or the negation of one.
pub fn is_parity_up_to_negation(g: &TruthTable) -> bool {
    let s = spectrum(g);
    let scale = s.scale() as i32;
    let nonzero: Vec<i32> = s.scaled().iter().copied().filter(|&c| c != 0).collect();
    nonzero.len() == 1 && nonzero[0].abs() == scale
}

/// True iff `g(z̄) = 1 ⊕ g(z)` for every `z`.
pub fn is_odd_function(g: &TruthTable) -> bool {
    let all = g.len() - 1;
    (0..g.len()).all(|z| g.get(z ^ all) != g.get(z))
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

/// All majority functions on `n` variables.
///
/// For odd `n` this is the single function `Maj_n`. For even `n` every one of
/// the `C(n, n/2)` tie inputs may map to either value, giving
/// `2^{C(n,n/2)}` functions; the list is built only when that count is at
/// most `cap`.
pub fn majority_family(n: usize, cap: u128) -> Result<Vec<TruthTable>> {
    if n == 0 {
        return Err(Error::VariableCount(n));
    }
    if n % 2 == 1 {
        return Ok(vec![TruthTable::majority(n)?]);
    }
    let ties = binomial(n, n / 2);
    let needed = if ties >= 127 { u128::MAX } else { 1u128 << ties };
    if needed > cap {
        return Err(Error::CapExceeded { needed, cap });
    }
    let base = TruthTable::from_fn(n, |z| 2 * z.count_ones() as usize > n)?;
    let tie_inputs: Vec<usize> = (0..1usize << n).filter(|z| 2 * z.count_ones() as usize == n).collect();
    Ok((0..needed as usize)
        .map(|choice| {
            let mut t = base.clone();
            for (j, &z) in tie_inputs.iter().enumerate() {
                t.set(z, choice >> j & 1 == 1);
            }
            t
        })
        .collect())
}

/// True iff `g` is `Maj_3` of some three variables and ignores the rest.
pub fn is_essentially_maj3(g: &TruthTable) -> bool {
    let dep = spectrum(g).dependence_mask();
    if dep.count_ones() != 3 {
        return false;
    }
    let vars: Vec<usize> = (0..g.n()).filter(|&i| dep >> i & 1 == 1).collect();
    match (g.restrict_to(&vars), TruthTable::majority(3)) {
        (Ok(r), Ok(maj)) => r == maj,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_detection() {
        assert!(is_parity_up_to_negation(&TruthTable::parse("01101001", 3).unwrap()));
        assert!(is_parity_up_to_negation(&TruthTable::parse("1001", 2).unwrap()));
        assert!(is_parity_up_to_negation(&TruthTable::zeros(3).unwrap()));
        assert!(!is_parity_up_to_negation(&TruthTable::majority(3).unwrap()));
    }

    #[test]
    fn odd_functions() {
        assert!(is_odd_function(&TruthTable::majority(3).unwrap()));
        assert!(is_odd_function(&TruthTable::majority(7).unwrap()));
        assert!(!is_odd_function(&TruthTable::zeros(3).unwrap()));
        assert!(!is_odd_function(&TruthTable::parse("0110", 2).unwrap()));
    }

    #[test]
    fn majority_family_sizes() {
        assert_eq!(majority_family(3, 1).unwrap().len(), 1);
        assert_eq!(majority_family(2, 100).unwrap().len(), 4);
        let fam4 = majority_family(4, 100).unwrap();
        assert_eq!(fam4.len(), 64);
        let distinct: std::collections::HashSet<_> = fam4.iter().collect();
        assert_eq!(distinct.len(), 64);
        assert!(matches!(majority_family(6, 1 << 16), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn maj3_embeddings() {
        let maj = TruthTable::majority(3).unwrap();
        assert!(is_essentially_maj3(&maj));
        assert!(is_essentially_maj3(&maj.embed(&[0, 1, 3], 4).unwrap()));
        assert!(!is_essentially_maj3(&maj.negated()));
        // a tie completion of Maj4 that depends on all four variables
        let fam = majority_family(4, 100).unwrap();
        let all_four = fam.iter().find(|g| spectrum(g).dependence_mask() == 0b1111).unwrap();
        assert!(!is_essentially_maj3(all_four));
        assert_eq!(fam.iter().filter(|g| is_essentially_maj3(g)).count(), 4);
    }
}
