//! Seeded Monte Carlo estimate of a protocol's bias.
//!
//! Samples are split into fixed-size blocks; block `k` draws from a ChaCha8
//! generator seeded with the user seed on stream `k`, so the estimate does not
//! depend on the number of worker threads.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::exact::InputDist;
use super::expr::EvalCtx;
use super::tree::ProtocolTree;
use crate::error::{Error, Result};
use crate::par;
use crate::twoparty::TwoPartyFunction;

/// Samples per independently seeded block.
pub const BLOCK: u64 = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
}

fn draw_bits(rng: &mut ChaCha8Rng, bits: usize) -> Vec<u64> {
    let mut words: Vec<u64> = (0..bits.div_ceil(64).max(1)).map(|_| rng.next_u64()).collect();
    let full = bits / 64;
    if !bits.is_multiple_of(64) {
        words[full] &= (1u64 << (bits % 64)) - 1;
    } else if full < words.len() {
        words[full] = 0;
    }
    words
}

struct Sampler<'a> {
    p: &'a ProtocolTree,
    f: &'a TwoPartyFunction,
    dist: &'a InputDist,
    flip: f64,
}

impl Sampler<'_> {
    /// One run; returns `a ⊕ b ⊕ f(x, y)`.
    fn run(&self, rng: &mut ChaCha8Rng) -> bool {
        let p = self.p;
        let (x, y) = match self.dist {
            InputDist::Uniform => (draw_bits(rng, p.alice_bits), draw_bits(rng, p.bob_bits)),
            InputDist::Fixed { x, y } => (x.clone(), y.clone()),
        };
        let shared: Vec<bool> = (0..p.shared_bits).map(|_| rng.random()).collect();
        let alice_priv: Vec<bool> = (0..p.alice_private_bits).map(|_| rng.random()).collect();
        let bob_priv: Vec<bool> = (0..p.bob_private_bits).map(|_| rng.random()).collect();
        let mut a_outs = Vec::with_capacity(p.boxes.len());
        let mut b_outs = Vec::with_capacity(p.boxes.len());
        for bx in &p.boxes {
            let lambda = bx.alice.eval(&EvalCtx { input: &x, outputs: &a_outs, shared: &shared, private: &alice_priv });
            let mu = bx.bob.eval(&EvalCtx { input: &y, outputs: &b_outs, shared: &shared, private: &bob_priv });
            let a: bool = rng.random();
            let e = rng.random::<f64>() < self.flip;
            a_outs.push(a);
            b_outs.push(a ^ (lambda & mu) ^ e);
        }
        let a = p.alice_output.eval(&EvalCtx { input: &x, outputs: &a_outs, shared: &shared, private: &alice_priv });
        let b = p.bob_output.eval(&EvalCtx { input: &y, outputs: &b_outs, shared: &shared, private: &bob_priv });
        a ^ b ^ self.f.eval(&x, &y)
    }
}

/// Estimates `E[(−1)^{a ⊕ b ⊕ f(x,y)}]` from `samples` seeded runs, with
/// standard error `√((1 − β̂²)/samples)`.
pub fn monte_carlo_bias(
    p: &ProtocolTree,
    f: &TwoPartyFunction,
    delta: f64,
    samples: u64,
    seed: u64,
    dist: &InputDist,
) -> Result<McEstimate> {
    p.validate()?;
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    if !(-1.0..=1.0).contains(&delta) {
        return Err(Error::InvalidArgument(format!("delta must lie in [-1, 1], got {delta}")));
    }
    if p.alice_bits != f.alice_bits() || p.bob_bits != f.bob_bits() {
        return Err(Error::InvalidArgument("protocol and target disagree on input sizes".into()));
    }
    let sampler = Sampler { p, f, dist, flip: (1.0 - delta) / 2.0 };
    let blocks = samples.div_ceil(BLOCK);
    let sums = par::map_range(blocks as usize, |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let count = BLOCK.min(samples - k as u64 * BLOCK);
        (0..count).map(|_| if sampler.run(&mut rng) { -1i64 } else { 1 }).sum::<i64>()
    });
    let total: i64 = sums.iter().sum();
    let estimate = total as f64 / samples as f64;
    let stderr = ((1.0 - estimate * estimate).max(0.0) / samples as f64).sqrt();
    Ok(McEstimate { estimate, stderr, samples })
}
