//! Exact bias of a protocol under the isotropic box model.
//!
//! Box `i` returns a uniform `aᵢ` to Alice and `bᵢ = aᵢ ⊕ λᵢμᵢ ⊕ eᵢ` to Bob,
//! with `eᵢ` independent and `E[(−1)^{eᵢ}] = δ`. For a fixed input the XOR of
//! both outputs with `f(x, y)` is a polynomial over the box outputs, the error
//! bits and the random bits; its expected sign is computed in closed form.

use serde::{Deserialize, Serialize};

use super::anf::Anf;
use super::expr::Expr;
use super::tree::ProtocolTree;
use crate::boolfn::TruthTable;
use crate::error::{Error, Result};
use crate::par;
use crate::twoparty::{Source, TwoPartyFunction};

/// Cap on the number of uniformly averaged input pairs.
pub const MAX_INPUT_BITS: usize = 20;
/// Random bits at or below this count are enumerated concretely.
const ENUMERATE_RANDOMNESS_BITS: usize = 10;
/// Largest table arity with symbolic inputs.
const MAX_SYMBOLIC_TABLE_VARS: usize = 16;

const KIND_A: u32 = 0;
const KIND_E: u32 = 1;
const KIND_SHARED: u32 = 2;
const KIND_ALICE_PRIVATE: u32 = 3;
const KIND_BOB_PRIVATE: u32 = 4;
const KIND_X: u32 = 5;

fn var(kind: u32, i: usize) -> u32 {
    kind << 24 | i as u32
}

/// Kind of a variable id.
pub fn var_kind(v: u32) -> u32 {
    v >> 24
}

/// Variable id of the error bit of box `i` in residual polynomials.
pub fn error_var(i: usize) -> u32 {
    var(KIND_E, i)
}

/// Variable id of Alice's output from box `i`.
pub fn box_output_var(i: usize) -> u32 {
    var(KIND_A, i)
}

/// Variable id of Alice's input bit `i` in [`residual_symbolic_alice`].
pub fn alice_input_var(i: usize) -> u32 {
    var(KIND_X, i)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputDist {
    Uniform,
    Fixed { x: Vec<u64>, y: Vec<u64> },
}

#[derive(Clone, Copy)]
enum Inputs<'a> {
    Bits(&'a [u64]),
    Symbolic(u32),
}

struct Side<'a> {
    input: Inputs<'a>,
    outputs: &'a [Anf],
    shared: &'a [Anf],
    private: &'a [Anf],
}

fn mobius(table: &mut [bool]) {
    let mut h = 1;
    while h < table.len() {
        for i in 0..table.len() {
            if i & h != 0 {
                table[i] ^= table[i ^ h];
            }
        }
        h <<= 1;
    }
}

fn table_anf(inputs: &[Anf], table: &TruthTable) -> Result<Anf> {
    let mut fixed = 0usize;
    let mut free = Vec::new();
    for (j, a) in inputs.iter().enumerate() {
        match a.as_const() {
            Some(true) => fixed |= 1 << j,
            Some(false) => {}
            None => free.push(j),
        }
    }
    if free.len() > MAX_SYMBOLIC_TABLE_VARS {
        return Err(Error::SizeLimit(format!("table with {} symbolic inputs", free.len())));
    }
    let k = free.len();
    let mut coeffs: Vec<bool> = (0..1usize << k)
        .map(|s| {
            let idx = free.iter().enumerate().fold(fixed, |acc, (b, &j)| acc | ((s >> b & 1) << j));
            table.get(idx)
        })
        .collect();
    mobius(&mut coeffs);
    let mut products: Vec<Option<Anf>> = vec![None; 1 << k];
    products[0] = Some(Anf::constant(true));
    let mut out = Anf::zero();
    for s in 0..1usize << k {
        if !coeffs[s] {
            continue;
        }
        // Build the product for s from its prefix chain, memoizing along the way.
        let mut chain = Vec::new();
        let mut t = s;
        while products[t].is_none() {
            chain.push(t);
            t &= t - 1;
        }
        for &u in chain.iter().rev() {
            let low = u.trailing_zeros() as usize;
            let prev = products[u & (u - 1)].as_ref().expect("prefix computed");
            products[u] = Some(prev.mul(&inputs[free[low]])?);
        }
        out.xor_assign(products[s].as_ref().expect("computed"));
    }
    Ok(out)
}

fn sym(e: &Expr, side: &Side<'_>) -> Result<Anf> {
    Ok(match e {
        Expr::Const(b) => Anf::constant(*b),
        Expr::Input(i) => match side.input {
            Inputs::Bits(words) => Anf::constant(words.get(i >> 6).is_some_and(|w| w >> (i & 63) & 1 == 1)),
            Inputs::Symbolic(kind) => Anf::var(var(kind, *i)),
        },
        Expr::Output(i) => side.outputs[*i].clone(),
        Expr::Shared(i) => side.shared[*i].clone(),
        Expr::Private(i) => side.private[*i].clone(),
        Expr::Not(inner) => {
            let mut a = sym(inner, side)?;
            a.negate();
            a
        }
        Expr::Xor(es) => {
            let mut acc = Anf::zero();
            for e in es {
                acc.xor_assign(&sym(e, side)?);
            }
            acc
        }
        Expr::And(es) => {
            let mut acc = Anf::constant(true);
            for e in es {
                acc = acc.mul(&sym(e, side)?)?;
                if acc.is_zero() {
                    break;
                }
            }
            acc
        }
        Expr::Table { inputs, table } => {
            let ins = inputs.iter().map(|e| sym(e, side)).collect::<Result<Vec<_>>>()?;
            table_anf(&ins, table)?
        }
    })
}

/// Random bits, either symbolic or fixed to a concrete assignment.
struct Randomness {
    shared: Vec<Anf>,
    alice: Vec<Anf>,
    bob: Vec<Anf>,
}

impl Randomness {
    fn symbolic(p: &ProtocolTree) -> Self {
        Randomness {
            shared: (0..p.shared_bits).map(|i| Anf::var(var(KIND_SHARED, i))).collect(),
            alice: (0..p.alice_private_bits).map(|i| Anf::var(var(KIND_ALICE_PRIVATE, i))).collect(),
            bob: (0..p.bob_private_bits).map(|i| Anf::var(var(KIND_BOB_PRIVATE, i))).collect(),
        }
    }

    fn concrete(p: &ProtocolTree, bits: usize) -> Self {
        let mut next = 0;
        let mut take = |count: usize| -> Vec<Anf> {
            let v = (next..next + count).map(|j| Anf::constant(bits >> j & 1 == 1)).collect();
            next += count;
            v
        };
        let shared = take(p.shared_bits);
        let alice = take(p.alice_private_bits);
        let bob = take(p.bob_private_bits);
        Randomness { shared, alice, bob }
    }
}

/// `aliceOut ⊕ bobOut` as a polynomial.
fn output_poly(p: &ProtocolTree, alice_in: Inputs<'_>, bob_in: Inputs<'_>, r: &Randomness) -> Result<Anf> {
    let t = p.boxes.len();
    let mut a_outs: Vec<Anf> = Vec::with_capacity(t);
    let mut b_outs: Vec<Anf> = Vec::with_capacity(t);
    for (i, bx) in p.boxes.iter().enumerate() {
        let lambda = sym(&bx.alice, &Side { input: alice_in, outputs: &a_outs, shared: &r.shared, private: &r.alice })?;
        let mu = sym(&bx.bob, &Side { input: bob_in, outputs: &b_outs, shared: &r.shared, private: &r.bob })?;
        let a = Anf::var(var(KIND_A, i));
        let mut b = lambda.mul(&mu)?;
        b.xor_assign(&a);
        b.xor_assign(&Anf::var(var(KIND_E, i)));
        a_outs.push(a);
        b_outs.push(b);
    }
    let mut z =
        sym(&p.alice_output, &Side { input: alice_in, outputs: &a_outs, shared: &r.shared, private: &r.alice })?;
    z.xor_assign(&sym(&p.bob_output, &Side { input: bob_in, outputs: &b_outs, shared: &r.shared, private: &r.bob })?);
    Ok(z)
}

fn check_shapes(p: &ProtocolTree, f: &TwoPartyFunction) -> Result<()> {
    p.validate()?;
    if p.alice_bits != f.alice_bits() || p.bob_bits != f.bob_bits() {
        return Err(Error::InvalidArgument(format!(
            "protocol takes {}+{} input bits but the target takes {}+{}",
            p.alice_bits,
            p.bob_bits,
            f.alice_bits(),
            f.bob_bits()
        )));
    }
    Ok(())
}

fn expectation(z: &Anf, delta: f64) -> Result<f64> {
    z.expectation(|v| (var_kind(v) == KIND_E).then_some(delta))
}

fn concrete_sign(p: &ProtocolTree, x: &[u64], y: &[u64], r: usize) -> bool {
    use super::expr::EvalCtx;
    let bits: Vec<bool> = (0..p.randomness_bits()).map(|j| r >> j & 1 == 1).collect();
    let (shared, rest) = bits.split_at(p.shared_bits);
    let (alice, bob) = rest.split_at(p.alice_private_bits);
    let a = p.alice_output.eval(&EvalCtx { input: x, outputs: &[], shared, private: alice });
    let b = p.bob_output.eval(&EvalCtx { input: y, outputs: &[], shared, private: bob });
    a ^ b
}

/// Exact bias at one input pair.
fn bias_at(p: &ProtocolTree, f: &TwoPartyFunction, x: &[u64], y: &[u64], delta: f64) -> Result<f64> {
    let fxy = f.eval(x, y);
    let rbits = p.randomness_bits();
    if p.boxes.is_empty() && rbits <= MAX_INPUT_BITS {
        let total: i64 = (0..1usize << rbits).map(|r| if concrete_sign(p, x, y, r) ^ fxy { -1 } else { 1 }).sum();
        return Ok(total as f64 / (1u64 << rbits) as f64);
    }
    let (xi, yi) = (Inputs::Bits(x), Inputs::Bits(y));
    if rbits <= ENUMERATE_RANDOMNESS_BITS {
        let mut acc = 0.0;
        for r in 0..1usize << rbits {
            let mut z = output_poly(p, xi, yi, &Randomness::concrete(p, r))?;
            if fxy {
                z.negate();
            }
            acc += expectation(&z, delta)?;
        }
        return Ok(acc / (1u64 << rbits) as f64);
    }
    let mut z = output_poly(p, xi, yi, &Randomness::symbolic(p))?;
    if fxy {
        z.negate();
    }
    expectation(&z, delta)
}

fn split_index(idx: usize, na: usize) -> ([u64; 1], [u64; 1]) {
    ([(idx & ((1 << na) - 1)) as u64], [(idx >> na) as u64])
}

/// `E[(−1)^{a ⊕ b ⊕ f(x,y)}]` over box noise, randomness and the chosen inputs.
pub fn exact_bias(p: &ProtocolTree, f: &TwoPartyFunction, delta: f64, dist: &InputDist) -> Result<f64> {
    check_shapes(p, f)?;
    if !(-1.0..=1.0).contains(&delta) {
        return Err(Error::InvalidArgument(format!("delta must lie in [-1, 1], got {delta}")));
    }
    match dist {
        InputDist::Fixed { x, y } => bias_at(p, f, x, y, delta),
        InputDist::Uniform => {
            let (na, nb) = (p.alice_bits, p.bob_bits);
            if na + nb > MAX_INPUT_BITS {
                return Err(Error::CapExceeded { needed: 1u128 << (na + nb), cap: 1u128 << MAX_INPUT_BITS });
            }
            let per = par::map_range(1usize << (na + nb), |idx| {
                let (x, y) = split_index(idx, na);
                bias_at(p, f, &x, &y, delta)
            });
            let mut sum = 0.0;
            for v in per {
                sum += v?;
            }
            Ok(sum / (1u64 << (na + nb)) as f64)
        }
    }
}

/// The polynomial `a ⊕ b ⊕ f(x, y)` at a fixed input, with box outputs,
/// errors and random bits symbolic.
pub fn residual(p: &ProtocolTree, f: &TwoPartyFunction, x: &[u64], y: &[u64]) -> Result<Anf> {
    check_shapes(p, f)?;
    let mut z = output_poly(p, Inputs::Bits(x), Inputs::Bits(y), &Randomness::symbolic(p))?;
    if f.eval(x, y) {
        z.negate();
    }
    Ok(z)
}

/// Like [`residual`] with Alice's input left symbolic (variables
/// [`alice_input_var`]). The target must be `Addr_n` or have at most 16 Alice bits.
pub fn residual_symbolic_alice(p: &ProtocolTree, f: &TwoPartyFunction, y: &[u64]) -> Result<Anf> {
    check_shapes(p, f)?;
    let fy = match f.source() {
        Source::Addr(n) => {
            let addr = (y.first().copied().unwrap_or(0) as usize) & ((1 << n) - 1);
            Anf::var(var(KIND_X, addr))
        }
        _ => {
            let na = f.alice_bits();
            if na == 0 || na > MAX_SYMBOLIC_TABLE_VARS {
                return Err(Error::SizeLimit(format!("symbolic Alice input needs 1..=16 bits, got {na}")));
            }
            let yi = y.first().copied().unwrap_or(0) as usize;
            let table = TruthTable::from_fn(na, |x| f.eval_idx(x, yi))?;
            let xs: Vec<Anf> = (0..na).map(|i| Anf::var(var(KIND_X, i))).collect();
            table_anf(&xs, &table)?
        }
    };
    let mut z = output_poly(p, Inputs::Symbolic(KIND_X), Inputs::Bits(y), &Randomness::symbolic(p))?;
    z.xor_assign(&fy);
    Ok(z)
}

/// True iff the protocol computes `f` with certainty when every box is a PR box,
/// for all inputs and all values of the random bits.
pub fn is_pr_correct(p: &ProtocolTree, f: &TwoPartyFunction) -> Result<bool> {
    check_shapes(p, f)?;
    let (na, nb) = (p.alice_bits, p.bob_bits);
    if na + nb > MAX_INPUT_BITS {
        return Err(Error::CapExceeded { needed: 1u128 << (na + nb), cap: 1u128 << MAX_INPUT_BITS });
    }
    let ok = par::map_range(1usize << (na + nb), |idx| {
        let (x, y) = split_index(idx, na);
        residual(p, f, &x, &y).map(|z| z.zero_out(|v| var_kind(v) == KIND_E).is_zero())
    });
    for v in ok {
        if !v? {
            return Ok(false);
        }
    }
    Ok(true)
}
