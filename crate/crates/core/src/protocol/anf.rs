//! Sparse algebraic normal form over F₂ and its expectation under
//! independent uniform or biased variables.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};

/// Cap on the number of monomials in any intermediate polynomial.
pub const MAX_TERMS: usize = 1 << 16;
/// Cap on the variables of one connected component that must be enumerated.
pub const MAX_ENUM_VARS: usize = 24;

/// A monomial is a sorted list of variable ids; the empty monomial is 1.
pub type Monomial = Vec<u32>;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Anf {
    terms: BTreeSet<Monomial>,
}

fn toggle(set: &mut BTreeSet<Monomial>, m: Monomial) {
    if !set.remove(&m) {
        set.insert(m);
    }
}

fn union_sorted(a: &[u32], b: &[u32]) -> Monomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

impl Anf {
    pub fn zero() -> Self {
        Anf::default()
    }

    pub fn constant(b: bool) -> Self {
        let mut terms = BTreeSet::new();
        if b {
            terms.insert(Vec::new());
        }
        Anf { terms }
    }

    pub fn var(v: u32) -> Self {
        Anf { terms: BTreeSet::from([vec![v]]) }
    }

    pub fn terms(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.iter()
    }

    #[allow(clippy::len_without_is_empty)] // `is_zero` is the emptiness test.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_const(&self) -> Option<bool> {
        match self.terms.len() {
            0 => Some(false),
            1 if self.terms.contains(&Vec::new()) => Some(true),
            _ => None,
        }
    }

    pub fn xor_assign(&mut self, other: &Anf) {
        for m in &other.terms {
            toggle(&mut self.terms, m.clone());
        }
    }

    pub fn negate(&mut self) {
        toggle(&mut self.terms, Vec::new());
    }

    pub fn mul(&self, other: &Anf) -> Result<Anf> {
        if let Some(c) = self.as_const() {
            return Ok(if c { other.clone() } else { Anf::zero() });
        }
        if let Some(c) = other.as_const() {
            return Ok(if c { self.clone() } else { Anf::zero() });
        }
        let needed = self.terms.len() as u128 * other.terms.len() as u128;
        let mut out = BTreeSet::new();
        for a in &self.terms {
            for b in &other.terms {
                toggle(&mut out, union_sorted(a, b));
            }
            if out.len() > MAX_TERMS {
                return Err(Error::CapExceeded { needed, cap: MAX_TERMS as u128 });
            }
        }
        Ok(Anf { terms: out })
    }

    /// Drops every monomial containing a variable for which `kill` holds,
    /// i.e. substitutes 0 for those variables.
    pub fn zero_out(&self, kill: impl Fn(u32) -> bool) -> Anf {
        Anf { terms: self.terms.iter().filter(|m| !m.iter().any(|&v| kill(v))).cloned().collect() }
    }

    pub fn eval(&self, value: impl Fn(u32) -> bool) -> bool {
        self.terms.iter().filter(|m| m.iter().all(|&v| value(v))).count() % 2 == 1
    }

    /// `E[(−1)^self]` when every variable is independent: variables with
    /// `bias(v) = None` are uniform, others equal 1 with probability `(1−β)/2`.
    pub fn expectation(&self, bias: impl Fn(u32) -> Option<f64>) -> Result<f64> {
        let mut sign = 1.0;
        let mut rest: Vec<Monomial> = Vec::new();
        for m in &self.terms {
            if m.is_empty() {
                sign = -sign;
            } else {
                rest.push(m.clone());
            }
        }
        let mut factor = sign;
        for comp in components(rest) {
            factor *= component_expectation(comp, &bias)?;
            if factor == 0.0 {
                return Ok(0.0);
            }
        }
        Ok(factor)
    }
}

/// Splits monomials into groups with pairwise disjoint variable sets.
fn components(monos: Vec<Monomial>) -> Vec<Vec<Monomial>> {
    let mut parent: HashMap<u32, u32> = HashMap::new();
    fn find(parent: &mut HashMap<u32, u32>, v: u32) -> u32 {
        let p = *parent.entry(v).or_insert(v);
        if p == v {
            return v;
        }
        let r = find(parent, p);
        parent.insert(v, r);
        r
    }
    for m in &monos {
        let r0 = find(&mut parent, m[0]);
        for &v in &m[1..] {
            let r = find(&mut parent, v);
            if r != r0 {
                parent.insert(r, r0);
            }
        }
    }
    let mut groups: HashMap<u32, Vec<Monomial>> = HashMap::new();
    for m in monos {
        let r = find(&mut parent, m[0]);
        groups.entry(r).or_default().push(m);
    }
    let mut out: Vec<_> = groups.into_values().collect();
    out.sort();
    out
}

fn component_expectation(mut monos: Vec<Monomial>, bias: &impl Fn(u32) -> Option<f64>) -> Result<f64> {
    // Peel variables that occur only as a lone linear term.
    let mut factor = 1.0;
    loop {
        let mut count: HashMap<u32, usize> = HashMap::new();
        for m in &monos {
            for &v in m {
                *count.entry(v).or_default() += 1;
            }
        }
        let lone = monos.iter().position(|m| m.len() == 1 && count[&m[0]] == 1);
        let Some(pos) = lone else { break };
        let v = monos.swap_remove(pos)[0];
        match bias(v) {
            None => return Ok(0.0),
            Some(b) => factor *= b,
        }
        if factor == 0.0 {
            return Ok(0.0);
        }
    }
    if monos.is_empty() {
        return Ok(factor);
    }
    let vars: Vec<u32> = monos.iter().flatten().copied().collect::<BTreeSet<_>>().into_iter().collect();
    if vars.len() > MAX_ENUM_VARS {
        return Err(Error::CapExceeded { needed: 1u128 << vars.len(), cap: 1u128 << MAX_ENUM_VARS });
    }
    let index: HashMap<u32, usize> = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let masks: Vec<u32> = monos.iter().map(|m| m.iter().fold(0u32, |acc, v| acc | 1 << index[v])).collect();
    // Per-variable probabilities of taking value 0 and 1.
    let probs: Vec<(f64, f64)> = vars
        .iter()
        .map(|&v| match bias(v) {
            None => (0.5, 0.5),
            Some(b) => ((1.0 + b) / 2.0, (1.0 - b) / 2.0),
        })
        .collect();
    let k = vars.len();
    let total: f64 = crate::par::map_range(1usize << k.saturating_sub(10), |hi| {
        let lo_bits = k.min(10);
        let mut acc = 0.0;
        for lo in 0..1usize << lo_bits {
            let assign = ((hi << lo_bits) | lo) as u32;
            let mut w = 1.0;
            for (i, p) in probs.iter().enumerate() {
                w *= if assign >> i & 1 == 1 { p.1 } else { p.0 };
            }
            let parity = masks.iter().filter(|&&m| assign & m == m).count() & 1;
            acc += if parity == 1 { -w } else { w };
        }
        acc
    })
    .into_iter()
    .sum();
    Ok(factor * total)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force expectation over all assignments.
    fn brute(p: &Anf, nvars: u32, bias: &[Option<f64>]) -> f64 {
        let mut acc = 0.0;
        for a in 0u32..1 << nvars {
            let mut w = 1.0;
            for v in 0..nvars {
                let one = a >> v & 1 == 1;
                w *= match bias[v as usize] {
                    None => 0.5,
                    Some(b) => {
                        if one {
                            (1.0 - b) / 2.0
                        } else {
                            (1.0 + b) / 2.0
                        }
                    }
                };
            }
            acc += if p.eval(|v| a >> v & 1 == 1) { -w } else { w };
        }
        acc
    }

    #[test]
    fn arithmetic() {
        let x = Anf::var(0);
        let y = Anf::var(1);
        let mut s = x.clone();
        s.xor_assign(&y);
        let sq = s.mul(&s).unwrap();
        assert_eq!(sq, s);
        let mut t = s.clone();
        t.xor_assign(&s);
        assert!(t.is_zero());
        assert_eq!(Anf::constant(true).as_const(), Some(true));
        assert_eq!(x.mul(&Anf::constant(false)).unwrap(), Anf::zero());
    }

    #[test]
    fn expectation_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let nvars = rng.random_range(1..=8u32);
            let bias: Vec<Option<f64>> = (0..nvars)
                .map(|_| if rng.random_bool(0.3) { None } else { Some(rng.random_range(-1.0..1.0)) })
                .collect();
            let mut p = Anf::zero();
            for _ in 0..rng.random_range(0..6) {
                let mut m = Anf::constant(true);
                for v in 0..nvars {
                    if rng.random_bool(0.3) {
                        m = m.mul(&Anf::var(v)).unwrap();
                    }
                }
                p.xor_assign(&m);
            }
            let got = p.expectation(|v| bias[v as usize]).unwrap();
            let want = brute(&p, nvars, &bias);
            assert!((got - want).abs() < 1e-12, "{p:?}: {got} vs {want}");
        }
    }

    #[test]
    fn linear_biased_terms_multiply() {
        let mut p = Anf::zero();
        for v in 0..40 {
            p.xor_assign(&Anf::var(v));
        }
        let e = p.expectation(|_| Some(0.9)).unwrap();
        assert!((e - 0.9f64.powi(40)).abs() < 1e-15);
        p.xor_assign(&Anf::var(100));
        assert_eq!(p.expectation(|v| if v == 100 { None } else { Some(0.9) }).unwrap(), 0.0);
    }
}
