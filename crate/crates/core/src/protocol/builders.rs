//! Constructors for the protocol families.

use std::collections::HashMap;

use serde::Serialize;

use super::expr::Expr;
use super::tree::{BoxInputs, ProtocolTree};
use crate::boolfn::TruthTable;
use crate::commcx::{ceil_log2, Direction};
use crate::error::{Error, Result};
use crate::nlbc::{decompose, Decomposition};
use crate::twoparty::TwoPartyFunction;

/// Largest per-party input size accepted by the adaptive construction.
pub const MAX_ADAPTIVE_BITS: usize = 10;

/// Zero-box protocol: Alice outputs `f(x, r)` for shared `r`; Bob outputs 0
/// when `r = y` and a private uniform bit otherwise.
pub fn base_protocol(f: &TwoPartyFunction) -> Result<ProtocolTree> {
    let (na, nb) = (f.alice_bits(), f.bob_bits());
    if na + nb > crate::twoparty::MAX_ENUMERABLE_BITS {
        return Err(Error::SizeLimit(format!("base protocol needs at most 20 input bits, got {}", na + nb)));
    }
    let alice_output = if na + nb == 0 {
        Expr::Const(f.eval_idx(0, 0))
    } else {
        let table = TruthTable::from_fn(na + nb, |z| f.eval_idx(z & ((1 << na) - 1), z >> na))?;
        let inputs = (0..na).map(Expr::Input).chain((0..nb).map(Expr::Shared)).collect();
        Expr::Table { inputs, table }
    };
    let equal = Expr::and((0..nb).map(|i| Expr::not(Expr::xor([Expr::Shared(i), Expr::Input(i)]))));
    Ok(ProtocolTree {
        name: "base".into(),
        alice_bits: na,
        bob_bits: nb,
        shared_bits: nb,
        alice_private_bits: 0,
        bob_private_bits: 1,
        boxes: Vec::new(),
        alice_output,
        bob_output: Expr::and([Expr::not(equal), Expr::Private(0)]),
    })
}

/// One box per term `l_i(x) r_i(y)`; each party XORs its local part with all box outputs.
pub fn nonadaptive_from_decomposition(d: &Decomposition) -> ProtocolTree {
    let boxes: Vec<BoxInputs> =
        d.pairs.iter().map(|(l, r)| BoxInputs { alice: Expr::of_inputs(l), bob: Expr::of_inputs(r) }).collect();
    let outputs = |local: &TruthTable| {
        Expr::xor(std::iter::once(Expr::of_inputs(local)).chain((0..boxes.len()).map(Expr::Output)))
    };
    ProtocolTree {
        name: "nonadaptive".into(),
        alice_bits: d.alice_bits(),
        bob_bits: d.bob_bits(),
        shared_bits: 0,
        alice_private_bits: 0,
        bob_private_bits: 0,
        alice_output: outputs(&d.alice_local),
        bob_output: outputs(&d.bob_local),
        boxes,
    }
}

/// Non-adaptive protocol with `NLBC(f)` boxes.
pub fn nonadaptive_protocol(f: &TwoPartyFunction) -> Result<ProtocolTree> {
    Ok(nonadaptive_from_decomposition(&decompose(f)?))
}

/// The two-box protocol for `Maj₃(x ⊕ y)` from its F₂-polynomial:
/// boxes on `(x₁⊕x₂, y₂⊕y₃)` and `(x₂⊕x₃, y₁⊕y₂)` plus local majorities.
pub fn brassard_maj3() -> ProtocolTree {
    let pair = |i: usize, j: usize| Expr::xor([Expr::Input(i), Expr::Input(j)]);
    let maj = Expr::of_inputs(&TruthTable::majority(3).expect("n=3 is odd"));
    ProtocolTree {
        name: "brassard-maj3".into(),
        alice_bits: 3,
        bob_bits: 3,
        shared_bits: 0,
        alice_private_bits: 0,
        bob_private_bits: 0,
        boxes: vec![BoxInputs { alice: pair(0, 1), bob: pair(1, 2) }, BoxInputs { alice: pair(1, 2), bob: pair(0, 1) }],
        alice_output: Expr::xor([maj.clone(), Expr::Output(0), Expr::Output(1)]),
        bob_output: Expr::xor([maj, Expr::Output(0), Expr::Output(1)]),
    }
}

/// Recursive address-function gadget. The table holder owns `leaves`; the
/// addresser owns `addr` (least significant bit first).
struct AddrBuilder {
    /// (table side, address side) inputs per box.
    boxes: Vec<(Expr, Expr)>,
}

impl AddrBuilder {
    /// Returns output shares `(table side, address side)` whose XOR equals
    /// `leaves[addr]` whenever `gate` holds.
    fn build(&mut self, leaves: &[Expr], addr: &[Expr], gate: Expr) -> (Expr, Expr) {
        let Some((top, rest)) = addr.split_last() else {
            return (leaves[0].clone(), Expr::Const(false));
        };
        let half = leaves.len() / 2;
        let (t0, s0) = self.build(&leaves[..half], rest, Expr::and([gate.clone(), Expr::not(top.clone())]));
        let (t1, s1) = self.build(&leaves[half..], rest, Expr::and([gate.clone(), top.clone()]));
        let id = self.boxes.len();
        self.boxes.push((Expr::xor([t0.clone(), t1]), Expr::and([gate, top.clone()])));
        (Expr::xor([t0, Expr::Output(id)]), Expr::xor([Expr::Output(id), Expr::mux(top.clone(), s0, s1)]))
    }
}

fn addr_gadget(leaves: &[Expr], addr: &[Expr]) -> (Vec<(Expr, Expr)>, Expr, Expr) {
    debug_assert_eq!(leaves.len(), 1 << addr.len());
    let mut b = AddrBuilder { boxes: Vec::new() };
    let (t, s) = b.build(leaves, addr, Expr::Const(true));
    (b.boxes, t, s)
}

/// Adaptive protocol for `Addr_n` with `2ⁿ − 1` boxes; Alice holds the table.
pub fn addr_protocol(n: usize) -> Result<ProtocolTree> {
    if !(1..=10).contains(&n) {
        return Err(Error::SizeLimit(format!("addr protocol supports 1 <= n <= 10, got {n}")));
    }
    let leaves: Vec<Expr> = (0..1 << n).map(Expr::Input).collect();
    let addr: Vec<Expr> = (0..n).map(Expr::Input).collect();
    let (boxes, a, b) = addr_gadget(&leaves, &addr);
    Ok(ProtocolTree {
        name: format!("addr:{n}"),
        alice_bits: 1 << n,
        bob_bits: n,
        shared_bits: 0,
        alice_private_bits: 0,
        bob_private_bits: 0,
        boxes: boxes.into_iter().map(|(alice, bob)| BoxInputs { alice, bob }).collect(),
        alice_output: a,
        bob_output: b,
    })
}

/// Adaptive protocol together with the compression it uses.
#[derive(Clone, Debug, Serialize)]
pub struct AdaptivePlan {
    pub protocol: ProtocolTree,
    /// `Right`: Alice's input is compressed (she plays the addresser).
    /// `Left`: Bob's input is compressed.
    pub direction: Direction,
    /// Number of row classes up to complement.
    pub classes: usize,
    /// Address length, `⌈log₂ classes⌉`.
    pub address_bits: usize,
}

/// Complement classes of `g(u, ·)` over `u`: class index per `u`, the
/// representative of each class, and whether `g(u, ·)` is the complement of
/// its representative's row.
fn complement_classes(
    rows: usize,
    cols: usize,
    g: impl Fn(usize, usize) -> bool,
) -> (Vec<usize>, Vec<usize>, Vec<bool>) {
    let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut class = Vec::with_capacity(rows);
    let mut reps = Vec::new();
    let mut flip = Vec::with_capacity(rows);
    for u in 0..rows {
        let first = g(u, 0);
        let mut key = vec![0u64; cols.div_ceil(64)];
        for v in 0..cols {
            if g(u, v) ^ first {
                key[v >> 6] |= 1 << (v & 63);
            }
        }
        let next = reps.len();
        let k = *index.entry(key).or_insert(next);
        if k == next {
            reps.push(u);
        }
        class.push(k);
        flip.push(first ^ g(reps[k], 0));
    }
    (class, reps, flip)
}

/// Adaptive PR-correct protocol with `2^m − 1` boxes where
/// `m = min(D→⊕(f), D←⊕(f))`; ties compress Bob's input.
pub fn adaptive_protocol(f: &TwoPartyFunction) -> Result<AdaptivePlan> {
    let (na, nb) = (f.alice_bits(), f.bob_bits());
    if !(1..=MAX_ADAPTIVE_BITS).contains(&na) || !(1..=MAX_ADAPTIVE_BITS).contains(&nb) {
        return Err(Error::SizeLimit(format!(
            "adaptive protocol needs 1..={MAX_ADAPTIVE_BITS} input bits per party, got {na}+{nb}"
        )));
    }
    let by_bob = complement_classes(1 << nb, 1 << na, |y, x| f.eval_idx(x, y));
    let by_alice = complement_classes(1 << na, 1 << nb, |x, y| f.eval_idx(x, y));
    let compress_bob = by_bob.1.len() <= by_alice.1.len();
    let (class, reps, flip) = if compress_bob { by_bob } else { by_alice };
    let (holder_bits, addresser_bits) = if compress_bob { (na, nb) } else { (nb, na) };
    let m = ceil_log2(reps.len());
    let value = |holder: usize, addresser: usize| {
        if compress_bob {
            f.eval_idx(holder, addresser)
        } else {
            f.eval_idx(addresser, holder)
        }
    };

    let leaves = (0..1usize << m)
        .map(|k| match reps.get(k) {
            Some(&rep) => Ok(Expr::of_inputs(&TruthTable::from_fn(holder_bits, |h| value(h, rep))?)),
            None => Ok(Expr::Const(false)),
        })
        .collect::<Result<Vec<_>>>()?;
    let addr = (0..m)
        .map(|i| Ok(Expr::of_inputs(&TruthTable::from_fn(addresser_bits, |u| class[u] >> i & 1 == 1)?)))
        .collect::<Result<Vec<_>>>()?;
    let offset = Expr::of_inputs(&TruthTable::from_fn(addresser_bits, |u| flip[u])?);
    let (boxes, holder_out, addr_out) = addr_gadget(&leaves, &addr);
    let addr_out = Expr::xor([addr_out, offset]);

    let (boxes, alice_output, bob_output) = if compress_bob {
        (boxes.into_iter().map(|(h, a)| BoxInputs { alice: h, bob: a }).collect(), holder_out, addr_out)
    } else {
        (boxes.into_iter().map(|(h, a)| BoxInputs { alice: a, bob: h }).collect(), addr_out, holder_out)
    };
    Ok(AdaptivePlan {
        protocol: ProtocolTree {
            name: "adaptive".into(),
            alice_bits: na,
            bob_bits: nb,
            shared_bits: 0,
            alice_private_bits: 0,
            bob_private_bits: 0,
            boxes,
            alice_output,
            bob_output,
        },
        direction: if compress_bob { Direction::Left } else { Direction::Right },
        classes: reps.len(),
        address_bits: m,
    })
}

/// Resolves a built-in protocol name to the protocol and its target function.
///
/// Names: `brassard-maj3`, `addr:<n>`, `adaptive:<table>`, `nonadaptive:<table>`
/// and `base:<table>`, where `<table>` is a truth table `g` and the target is `g(x ⊕ y)`.
pub fn builtin(name: &str) -> Result<(ProtocolTree, TwoPartyFunction)> {
    let xor_target =
        |text: &str| -> Result<TwoPartyFunction> { Ok(TwoPartyFunction::xor(TruthTable::parse_auto(text)?)) };
    if name == "brassard-maj3" {
        return Ok((brassard_maj3(), TwoPartyFunction::xor(TruthTable::majority(3)?)));
    }
    let Some((kind, arg)) = name.split_once(':') else {
        return Err(Error::InvalidArgument(format!("unknown built-in protocol '{name}'")));
    };
    match kind {
        "addr" => {
            let n: usize = arg.parse().map_err(|_| Error::InvalidArgument(format!("bad addr size '{arg}'")))?;
            Ok((addr_protocol(n)?, TwoPartyFunction::addr(n)?))
        }
        "adaptive" => {
            let f = xor_target(arg)?;
            let mut p = adaptive_protocol(&f)?.protocol;
            p.name = name.to_string();
            Ok((p, f))
        }
        "nonadaptive" => {
            let f = xor_target(arg)?;
            let mut p = nonadaptive_protocol(&f)?;
            p.name = name.to_string();
            Ok((p, f))
        }
        "base" => {
            let f = xor_target(arg)?;
            let mut p = base_protocol(&f)?;
            p.name = name.to_string();
            Ok((p, f))
        }
        _ => Err(Error::InvalidArgument(format!("unknown built-in protocol '{name}'"))),
    }
}
