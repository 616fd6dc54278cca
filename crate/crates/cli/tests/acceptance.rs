//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! Run alone with `cargo test -p nlbox-lab --test acceptance`.

// `ensure!` negates its condition on purpose: a NaN must fail.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::{BTreeSet, HashSet};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use nlbox_core::amplify::{delta_b, iterate_amplification, threshold_report, Outcome, MAX_STEPS};
use nlbox_core::boolfn::{is_parity_up_to_negation, spectrum, TruthTable};
use nlbox_core::commcx::{d_oneway_xor, Direction};
use nlbox_core::nlbc::{nlbc, NlbcOptions};
use nlbox_core::protocol::exact::{error_var, var_kind};
use nlbox_core::protocol::{addr_protocol, builtin, exact_bias, residual_symbolic_alice, GeneralBox, InputDist};
use nlbox_core::rational::Rational;
use nlbox_core::twoparty::TwoPartyFunction;
use num_traits::Pow;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn cli(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_nlbox-lab"))
        .args(args)
        .env_remove("NLBOX_CACHE_DIR")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?} exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

fn cli_json(args: &[&str]) -> Result<Value, String> {
    serde_json::from_str(&cli(args)?).map_err(|e| e.to_string())
}

fn maj3_on(n: usize, i: usize, j: usize, k: usize) -> String {
    TruthTable::from_fn(n, |z| (z >> i & 1) + (z >> j & 1) + (z >> k & 1) >= 2).unwrap().to_hex_string()
}

fn maj_table() -> Check {
    let start = Instant::now();
    let v = cli_json(&["maj-table", "--odd-n", "3,5,7,9,11,13"])?;
    let took = start.elapsed();
    let got: Vec<u64> = v["rows"].as_array().ok_or("no rows")?.iter().map(|r| r["nlbc"].as_u64().unwrap()).collect();
    ensure!(got == [2, 14, 26, 254, 494, 1090], "values {got:?}");
    ensure!(took <= Duration::from_secs(60), "took {took:?}");
    let start = Instant::now();
    let v = cli_json(&["maj-table", "--odd-n", "15", "--include-15"])?;
    let took15 = start.elapsed();
    ensure!(v["rows"][0]["nlbc"].as_u64() == Some(1818), "n=15 gave {}", v["rows"][0]["nlbc"]);
    ensure!(took15 <= Duration::from_secs(900), "n=15 took {took15:?}");
    Ok(format!("2 14 26 254 494 1090 in {took:.2?}; n=15 -> 1818 in {took15:.2?}"))
}

fn maj3_threshold() -> Check {
    let g = TruthTable::from_u64(3, 0xe8).unwrap();
    // ρ_B from the definition: level-one weight by direct summation.
    let level_one: i64 =
        (0..3).map(|i| (0..8).map(|z| if g.get(z) == (z >> i & 1 == 1) { 1 } else { -1 }).sum::<i64>()).sum();
    let rho = Rational::new(8, level_one.max(8));
    ensure!(rho == Rational::new(2, 3), "rho_B = {rho}");
    let d = delta_b(&g).map_err(|e| e.to_string())?;
    let want = (2.0f64 / 3.0).sqrt();
    ensure!((d.value() - want).abs() <= 1e-12, "delta_B = {}", d.value());
    let r = threshold_report(&g).map_err(|e| e.to_string())?;
    let chsh = (3.0 + 6f64.sqrt()) / 6.0;
    ensure!((r.chsh_threshold - chsh).abs() <= 1e-9, "threshold {}", r.chsh_threshold);
    let k = r.d_xor as i32;
    ensure!(k == 2, "D = {k}");
    // ρ_B² against (2/3)^D as rationals.
    ensure!(Pow::pow(rho, 2i32) == Pow::pow(Rational::new(2, 3), k), "tie is not exact");
    ensure!(r.vs_sqrt_two_thirds == 0, "exact comparison gave {}", r.vs_sqrt_two_thirds);
    Ok(format!("delta_B = {:.15}, threshold = {:.12}, tie exact", d.value(), r.chsh_threshold))
}

fn census() -> Check {
    let start = Instant::now();
    let v3 = cli_json(&["search", "--n", "3"])?;
    let v4 = cli_json(&["search", "--n", "4"])?;
    let took = start.elapsed();
    let achievers = |v: &Value| -> BTreeSet<String> {
        v["rows"].as_array().unwrap().iter().map(|r| r["achiever"].as_str().unwrap().to_owned()).collect()
    };
    ensure!(achievers(&v3) == BTreeSet::from([maj3_on(3, 0, 1, 2)]), "n=3 achievers {:?}", achievers(&v3));
    let want4: BTreeSet<String> =
        [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)].iter().map(|&(i, j, k)| maj3_on(4, i, j, k)).collect();
    ensure!(achievers(&v4) == want4, "n=4 achievers {:?}", achievers(&v4));
    for v in [&v3, &v4] {
        ensure!(v["violations"].as_array().is_some_and(Vec::is_empty), "violations {}", v["violations"]);
        ensure!(v["verdict"] == "OK", "verdict {}", v["verdict"]);
    }
    ensure!(took <= Duration::from_secs(10), "took {took:?}");
    Ok(format!("n=3 {{0xe8}}, n=4 four embeddings, no violations, {took:.2?}"))
}

fn protocol_exactness() -> Check {
    let (p, f) = builtin("brassard-maj3").map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for k in 1..=10 {
        let d = k as f64 / 10.0;
        let b = exact_bias(&p, &f, d, &InputDist::Uniform).map_err(|e| e.to_string())?;
        worst = worst.max((b - d * d).abs());
    }
    ensure!(worst <= 1e-12, "Maj3 deviation {worst:e}");
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in 1..=6 {
        let p = addr_protocol(n).map_err(|e| e.to_string())?;
        let f = TwoPartyFunction::addr(n).map_err(|e| e.to_string())?;
        for y in 0..1u64 << n {
            // Symbolic in x, so this covers every table at once.
            let z = residual_symbolic_alice(&p, &f, &[y]).map_err(|e| e.to_string())?;
            let path = z.len() == n && z.terms().all(|m| m.len() == 1 && var_kind(m[0]) == var_kind(error_var(0)));
            ensure!(path, "addr({n}), y={y}: residual is not {n} independent errors");
        }
        for _ in 0..20 {
            let x = if n == 6 { rng.random::<u64>() } else { rng.random::<u64>() & ((1 << (1 << n)) - 1) };
            let y = rng.random_range(0..1u64 << n);
            let d: f64 = rng.random_range(0.0..=1.0);
            let b = exact_bias(&p, &f, d, &InputDist::Fixed { x: vec![x], y: vec![y] }).map_err(|e| e.to_string())?;
            ensure!((b - d.powi(n as i32)).abs() <= 1e-12, "addr({n}) x={x:#x} y={y}: {b} vs {}", d.powi(n as i32));
        }
    }
    Ok(format!("Maj3 max deviation {worst:.1e}; addr(n) = delta^n for n <= 6"))
}

fn monte_carlo() -> Check {
    let args =
        ["simulate", "--protocol", "brassard-maj3", "--delta", "0.9", "--samples", "1000000", "--seed", "0xC0FFEE"];
    let first = cli(&args)?;
    let again = cli(&args)?;
    let mut single = vec!["--threads", "1"];
    single.extend_from_slice(&args);
    let one_thread = cli(&single)?;
    ensure!(first == again && first == one_thread, "output depends on run or thread count");
    let v: Value = serde_json::from_str(&first).map_err(|e| e.to_string())?;
    let (est, se) = (v["estimate"].as_f64().unwrap(), v["stderr"].as_f64().unwrap());
    ensure!((est - 0.81).abs() <= 3.0 * se, "estimate {est} stderr {se}");
    Ok(format!("estimate {est:.5} +- {se:.5}, {:.2} sigma, deterministic", (est - 0.81).abs() / se))
}

fn amplification() -> Check {
    let g = TruthTable::from_u64(3, 0xe8).unwrap();
    let up = iterate_amplification(&g, 0.84, 1e-3, MAX_STEPS).map_err(|e| e.to_string())?;
    let want = (3.0 - 2.0 / 0.7056f64).sqrt();
    let Outcome::Converged { fixed_point } = up.outcome else {
        return Err(format!("delta=0.84: {:?}", up.outcome));
    };
    ensure!((fixed_point - want).abs() <= 1e-9, "fixed point {fixed_point} vs {want}");
    let down = iterate_amplification(&g, 0.80, 1e-3, MAX_STEPS).map_err(|e| e.to_string())?;
    let Outcome::Decayed { last } = down.outcome else {
        return Err(format!("delta=0.80: {:?}", down.outcome));
    };
    ensure!(last.abs() < 1e-9, "delta=0.80 stopped at {last:e}");
    Ok(format!("0.84 -> {fixed_point:.10} in {} steps; 0.80 -> {last:.1e} in {} steps", up.steps, down.steps))
}

fn bits_needed(k: usize) -> usize {
    (0..).find(|&b| 1usize << b >= k).unwrap()
}

/// `min_A D→(f ⊕ A(x))` over every Alice-side function `A`.
fn brute_force_d_xor(f: &TwoPartyFunction) -> usize {
    let (na, nb) = (f.alice_bits(), f.bob_bits());
    let rows: Vec<u64> = (0..1usize << na)
        .map(|x| (0..1usize << nb).fold(0u64, |acc, y| acc | u64::from(f.eval_idx(x, y)) << y))
        .collect();
    let full = (1u64 << (1 << nb)) - 1;
    (0..1u64 << (1 << na))
        .map(|a| {
            let distinct: HashSet<u64> =
                rows.iter().enumerate().map(|(x, &r)| if a >> x & 1 == 1 { r ^ full } else { r }).collect();
            bits_needed(distinct.len())
        })
        .min()
        .unwrap()
}

fn naive_rank(mut rows: Vec<Vec<bool>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c]) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[c] {
                row.iter_mut().zip(&pivot).for_each(|(a, b)| *a ^= b);
            }
        }
        rank += 1;
    }
    rank
}

fn random_box(rng: &mut ChaCha8Rng) -> GeneralBox {
    let mut vertices = Vec::new();
    for fa in 0..4 {
        for fb in 0..4 {
            vertices.push(GeneralBox::local_deterministic(fa, fb));
        }
    }
    for s in 0..8 {
        vertices.push(GeneralBox::pr_variant(s & 1, s >> 1 & 1, s >> 2));
    }
    let w: Vec<f64> = (0..vertices.len()).map(|_| rng.random::<f64>()).collect();
    let total: f64 = w.iter().sum();
    let mut p = [[0.0; 4]; 4];
    for (v, wi) in vertices.iter().zip(&w) {
        for (row, vrow) in p.iter_mut().zip(v.table()) {
            for (c, x) in row.iter_mut().zip(vrow) {
                *c += x * wi / total;
            }
        }
    }
    for row in p.iter_mut() {
        let s: f64 = row.iter().sum();
        row.iter_mut().for_each(|c| *c /= s);
    }
    GeneralBox::new(p).unwrap()
}

fn property_suites() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let err = |e: nlbox_core::Error| e.to_string();

    for _ in 0..10_000 {
        let n = rng.random_range(1..=10);
        let words = (1usize << n).div_ceil(64);
        let mut w: Vec<u64> = (0..words).map(|_| rng.random()).collect();
        if n < 6 {
            w[0] &= (1u64 << (1 << n)) - 1;
        }
        let g = TruthTable::from_words(n, w).map_err(err)?;
        let s = spectrum(&g);
        ensure!(s.parseval_sum() == 1i64 << (2 * n), "Parseval fails on {g}");
    }

    let mut d_cases = 0;
    let mut d_check = |f: &TwoPartyFunction| -> Result<(), String> {
        d_cases += 1;
        let got = d_oneway_xor(f, Direction::Right).map_err(err)?;
        let want = brute_force_d_xor(f);
        ensure!(got == want, "D mismatch: {got} vs {want}");
        Ok(())
    };
    for (na, nb) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        for code in 0u64..1 << (1 << (na + nb)) {
            d_check(&TwoPartyFunction::from_fn(na, nb, |x, y| code >> (x | y << na) & 1 == 1).map_err(err)?)?;
        }
    }
    for n in 1..=3 {
        for code in 0u64..1 << (1 << n) {
            d_check(&TwoPartyFunction::xor(TruthTable::from_u64(n, code).map_err(err)?))?;
        }
    }
    for _ in 0..300 {
        let bits: Vec<bool> = (0..64).map(|_| rng.random()).collect();
        d_check(&TwoPartyFunction::from_fn(3, 3, |x, y| bits[x | y << 3]).map_err(err)?)?;
    }

    let mut census = 0;
    for n in 1..=4 {
        for code in 0u64..1 << (1 << n) {
            let g = TruthTable::from_u64(n, code).map_err(err)?;
            let f = TwoPartyFunction::xor(g.clone());
            let size = 1usize << n;
            let oracle = naive_rank(
                (0..size).map(|x| (0..size).map(|y| g.get(x ^ y) ^ g.get(x) ^ g.get(y) ^ g.get(0)).collect()).collect(),
            );
            let value = nlbc(&f, NlbcOptions::default()).map_err(err)?;
            ensure!(value == oracle, "NLBC({g}) = {value}, rank oracle {oracle}");
            ensure!(value != 1, "NLBC({g}) = 1");
            ensure!((value == 0) == is_parity_up_to_negation(&g), "zero case wrong for {g}");
            let right = d_oneway_xor(&f, Direction::Right).map_err(err)?;
            let left = d_oneway_xor(&f, Direction::Left).map_err(err)?;
            ensure!(value >= right.max(left), "NLBC({g}) = {value} below D = {right}/{left}");
            census += 1;
        }
    }

    for _ in 0..100 {
        let b = random_box(&mut rng);
        let iso = b.isotropize().map_err(err)?;
        iso.validate().map_err(err)?;
        let target = b.chsh_probability();
        ensure!((iso.chsh_probability() - target).abs() <= 1e-12, "CHSH value moved");
        for xy in 0..4 {
            let (x, y) = (xy & 1, xy >> 1);
            ensure!((iso.alice_marginal(x, y) - 0.5).abs() <= 1e-12, "Alice marginal");
            ensure!((iso.bob_marginal(x, y) - 0.5).abs() <= 1e-12, "Bob marginal");
            ensure!((iso.success(x, y) - target).abs() <= 1e-12, "success not uniform");
        }
        ensure!(iso.as_isotropic(1e-12).is_some(), "not isotropic");
    }

    Ok(format!("Parseval 10000, D oracle {d_cases}, NLBC census {census}, isotropize 100"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("majority NLBC table", maj_table),
        ("Maj3 threshold and exact tie", maj3_threshold),
        ("uniqueness census", census),
        ("protocol exactness", protocol_exactness),
        ("Monte Carlo consistency", monte_carlo),
        ("amplification dynamics", amplification),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} [{}] {name}: {detail} ({:.2?})", i + 1, start.elapsed());
    }
    if failed == 0 {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
