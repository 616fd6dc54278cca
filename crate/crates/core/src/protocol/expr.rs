//! Boolean expressions for box inputs and party outputs.
//!
//! Expressions are written from one party's point of view: `Input(i)` is that
//! party's own input bit, `Output(i)` the party's own output from box `i`.

use serde::{Deserialize, Serialize};

use crate::boolfn::TruthTable;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expr {
    Const(bool),
    /// The party's own input bit.
    Input(usize),
    /// The party's own output from box `i`.
    Output(usize),
    /// A shared random bit, visible to both parties.
    Shared(usize),
    /// One of the party's private random bits.
    Private(usize),
    Not(Box<Expr>),
    Xor(Vec<Expr>),
    And(Vec<Expr>),
    /// Lookup: `table` evaluated at the index `Σ_j inputs[j] · 2^j`.
    Table {
        inputs: Vec<Expr>,
        table: TruthTable,
    },
}

/// Concrete values an expression may read.
pub struct EvalCtx<'a> {
    pub input: &'a [u64],
    pub outputs: &'a [bool],
    pub shared: &'a [bool],
    pub private: &'a [bool],
}

/// Largest indices an expression refers to, per variable kind (exclusive bounds).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Footprint {
    pub inputs: usize,
    pub outputs: usize,
    pub shared: usize,
    pub private: usize,
}

impl Expr {
    pub fn input(i: usize) -> Expr {
        Expr::Input(i)
    }

    /// `¬e`, folding constants and double negation.
    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expr) -> Expr {
        match e {
            Expr::Const(b) => Expr::Const(!b),
            Expr::Not(inner) => *inner,
            other => Expr::Not(Box::new(other)),
        }
    }

    /// XOR of the operands, dropping `false` and folding `true` into a negation.
    pub fn xor(items: impl IntoIterator<Item = Expr>) -> Expr {
        let mut flip = false;
        let mut terms = Vec::new();
        for e in items {
            match e {
                Expr::Const(b) => flip ^= b,
                Expr::Xor(inner) => terms.extend(inner),
                other => terms.push(other),
            }
        }
        let core = match terms.len() {
            0 => Expr::Const(false),
            1 => terms.pop().unwrap(),
            _ => Expr::Xor(terms),
        };
        if flip {
            Expr::not(core)
        } else {
            core
        }
    }

    /// AND of the operands, dropping `true` and collapsing on `false`.
    pub fn and(items: impl IntoIterator<Item = Expr>) -> Expr {
        let mut terms = Vec::new();
        for e in items {
            match e {
                Expr::Const(true) => {}
                Expr::Const(false) => return Expr::Const(false),
                Expr::And(inner) => terms.extend(inner),
                other => terms.push(other),
            }
        }
        match terms.len() {
            0 => Expr::Const(true),
            1 => terms.pop().unwrap(),
            _ => Expr::And(terms),
        }
    }

    /// `if sel { one } else { zero }`.
    pub fn mux(sel: Expr, zero: Expr, one: Expr) -> Expr {
        if zero == one {
            return zero;
        }
        Expr::xor([Expr::and([Expr::not(sel.clone()), zero]), Expr::and([sel, one])])
    }

    /// `g` applied to the party's input bits `0..g.n()`; constant tables fold.
    pub fn of_inputs(g: &TruthTable) -> Expr {
        if g.weight() == 0 {
            Expr::Const(false)
        } else if g.weight() == g.len() as u64 {
            Expr::Const(true)
        } else {
            Expr::Table { inputs: (0..g.n()).map(Expr::Input).collect(), table: g.clone() }
        }
    }

    pub fn eval(&self, ctx: &EvalCtx<'_>) -> bool {
        match self {
            Expr::Const(b) => *b,
            Expr::Input(i) => ctx.input.get(i >> 6).is_some_and(|w| w >> (i & 63) & 1 == 1),
            Expr::Output(i) => ctx.outputs[*i],
            Expr::Shared(i) => ctx.shared[*i],
            Expr::Private(i) => ctx.private[*i],
            Expr::Not(e) => !e.eval(ctx),
            Expr::Xor(es) => es.iter().fold(false, |acc, e| acc ^ e.eval(ctx)),
            Expr::And(es) => es.iter().all(|e| e.eval(ctx)),
            Expr::Table { inputs, table } => {
                let idx = inputs.iter().enumerate().fold(0usize, |acc, (j, e)| acc | (usize::from(e.eval(ctx)) << j));
                table.get(idx)
            }
        }
    }

    pub fn footprint(&self) -> Footprint {
        let mut fp = Footprint::default();
        self.visit(&mut |e| match e {
            Expr::Input(i) => fp.inputs = fp.inputs.max(i + 1),
            Expr::Output(i) => fp.outputs = fp.outputs.max(i + 1),
            Expr::Shared(i) => fp.shared = fp.shared.max(i + 1),
            Expr::Private(i) => fp.private = fp.private.max(i + 1),
            _ => {}
        });
        fp
    }

    /// True iff some `Table` node has a table whose arity differs from its input count.
    pub fn has_malformed_table(&self) -> bool {
        let mut bad = false;
        self.visit(&mut |e| {
            if let Expr::Table { inputs, table } = e {
                bad |= inputs.len() != table.n();
            }
        });
        bad
    }

    fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Not(e) => e.visit(f),
            Expr::Xor(es) | Expr::And(es) => es.iter().for_each(|e| e.visit(f)),
            Expr::Table { inputs, .. } => inputs.iter().for_each(|e| e.visit(f)),
            _ => {}
        }
    }
}
