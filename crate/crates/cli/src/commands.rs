//! One function per subcommand, each producing a JSON report.

use anyhow::{bail, Context, Result};
use nlbox_core::amplify::{iterate_amplification, threshold_report, Outcome};
use nlbox_core::boolfn::{is_essentially_maj3, is_parity_up_to_negation, spectrum, TruthTable};
use nlbox_core::commcx::{comm_report, d_oneway_xor, Direction};
use nlbox_core::f2linalg::MemoryBudget;
use nlbox_core::nlbc::{decompose, maj_table, nlbc, MajTableOptions, NlbcOptions};
use nlbox_core::protocol::{
    builtin, exact_bias, is_pr_correct, monte_carlo_bias, InputDist, ProtocolFile, ProtocolTree,
};
use nlbox_core::rational::to_fraction_string;
use nlbox_core::search::{majority_sweep, verify_small_n};
use nlbox_core::twoparty::{TargetSpec, TwoPartyFunction, MAX_ENUMERABLE_BITS};
use nlbox_core::SCHEMA;
use serde_json::{json, Map, Value};

use crate::input::{parse_bits, parse_list, text_or_stdin, truth_table};
use crate::output::normalize_reals;
use crate::{Cli, Command, InputArg, ProtocolArg, TableArg};

pub fn run(cli: &Cli) -> Result<Value> {
    let (name, body) = match &cli.command {
        Command::Fourier { table, eps } => ("fourier", fourier(table, eps.as_deref())?),
        Command::Nlbc { table, decompose } => ("nlbc", nlbc_cmd(table, *decompose, cli.allow_large)?),
        Command::MajTable { odd_n, include_15, include_17, cache_dir } => {
            let ns: Vec<usize> = parse_list(odd_n)?;
            let opts = MajTableOptions {
                allow_15: *include_15,
                allow_17: *include_17,
                cache_dir: cache_dir.clone(),
                strategy: None,
            };
            let rows = maj_table(&ns, &opts)?;
            ("maj-table", json!({ "rows": rows }))
        }
        Command::Commcx { table } => {
            let g = load_table(table)?;
            let mut v = serde_json::to_value(comm_report(&g)?)?;
            v["g"] = json!(g.to_hex_string());
            v["n"] = json!(g.n());
            ("commcx", v)
        }
        Command::Simulate { protocol, inputs, delta, samples, seed } => {
            ("simulate", simulate(protocol, inputs, *delta, *samples, *seed)?)
        }
        Command::BiasExact { protocol, inputs, delta } => ("bias-exact", bias_exact(protocol, inputs, delta)?),
        Command::Amplify { table, delta, eps0, steps } => ("amplify", amplify(table, *delta, *eps0, *steps)?),
        Command::Thresholds { table } => {
            let g = load_table(table)?;
            let mut v = serde_json::to_value(threshold_report(&g)?)?;
            v["g"] = json!(g.to_hex_string());
            ("thresholds", v)
        }
        Command::Search { n } => ("search", search(*n)?),
        Command::MajoritySweep { odd_n } => {
            let ns: Vec<usize> = parse_list(odd_n)?;
            ("majority-sweep", json!({ "rows": majority_sweep(&ns)? }))
        }
        Command::ExportProtocol { protocol } => {
            let (p, f) = builtin(protocol)?;
            return Ok(serde_json::to_value(ProtocolFile::new(p, TargetSpec::describe(&f)))?);
        }
    };
    let mut report = Map::new();
    report.insert("schema".into(), json!(SCHEMA));
    report.insert("command".into(), json!(name));
    match body {
        Value::Object(m) => report.extend(m),
        other => {
            report.insert("result".into(), other);
        }
    }
    let mut v = Value::Object(report);
    normalize_reals(&mut v);
    Ok(v)
}

fn load_table(t: &TableArg) -> Result<TruthTable> {
    truth_table(&t.g, t.n).with_context(|| format!("parsing truth table '{}'", t.g))
}

fn fourier(t: &TableArg, eps: Option<&str>) -> Result<Value> {
    let g = load_table(t)?;
    let s = spectrum(&g);
    let rows: Vec<Value> = s
        .support()
        .into_iter()
        .map(|mask| {
            let set: Vec<usize> = (0..g.n()).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect();
            let c = s.coefficient(mask);
            json!({
                "mask": mask,
                "set": set.iter().map(usize::to_string).collect::<Vec<_>>().join(" "),
                "coefficient": to_fraction_string(&c),
                "value": *c.numer() as f64 / *c.denom() as f64,
            })
        })
        .collect();
    let bias_eval: Vec<Value> = match eps {
        Some(list) => parse_list::<f64>(list)?.into_iter().map(|e| json!({ "eps": e, "bias": s.bias(e) })).collect(),
        None => Vec::new(),
    };
    Ok(json!({
        "g": g.to_hex_string(),
        "n": g.n(),
        "fourier_dimension": s.fourier_dimension(),
        "affine_dimension": s.affine_dimension()?,
        "linear_sum": to_fraction_string(&s.linear_sum()),
        "bias_degree_vector": s.bias_degree_vector().iter().map(to_fraction_string).collect::<Vec<_>>(),
        "bias_at": bias_eval,
        "parseval_ok": s.parseval_sum() == s.scale() * s.scale(),
        "is_parity_up_to_negation": is_parity_up_to_negation(&g),
        "is_essentially_maj3": is_essentially_maj3(&g),
        "rows": rows,
    }))
}

fn nlbc_cmd(t: &TableArg, with_decomposition: bool, allow_large: bool) -> Result<Value> {
    let g = load_table(t)?;
    let f = TwoPartyFunction::xor(g.clone());
    let budget = if allow_large { MemoryBudget::unlimited() } else { MemoryBudget::default() };
    let value = nlbc(&f, NlbcOptions { budget, ..NlbcOptions::default() })?;
    let mut v = json!({
        "g": g.to_hex_string(),
        "n": g.n(),
        "nlbc": value,
        "is_parity_up_to_negation": is_parity_up_to_negation(&g),
    });
    if with_decomposition {
        let d = decompose(&f)?;
        v["alice_local"] = json!(d.alice_local.to_hex_string());
        v["bob_local"] = json!(d.bob_local.to_hex_string());
        v["reconstructs"] = json!(d.reconstructs(&f));
        v["non_redundant"] = json!(d.is_non_redundant());
        v["rows"] = d
            .pairs
            .iter()
            .enumerate()
            .map(|(i, (l, r))| json!({ "term": i, "alice": l.to_hex_string(), "bob": r.to_hex_string() }))
            .collect();
    }
    if g.n() <= nlbox_core::commcx::MAX_COMM_BITS {
        v["d_right_xor"] = json!(d_oneway_xor(&f, Direction::Right)?);
        v["d_left_xor"] = json!(d_oneway_xor(&f, Direction::Left)?);
    }
    Ok(v)
}

fn load_protocol(arg: &ProtocolArg) -> Result<(ProtocolTree, TwoPartyFunction)> {
    if let Some(name) = &arg.protocol {
        return Ok(builtin(name)?);
    }
    let path = arg.protocol_file.as_ref().expect("clap enforces one source");
    let text = if path.as_os_str() == "-" {
        text_or_stdin("-")?
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    let file: ProtocolFile = serde_json::from_str(&text).context("parsing protocol file")?;
    if file.schema != SCHEMA {
        bail!("protocol file schema is '{}', expected '{SCHEMA}'", file.schema);
    }
    file.validate()?;
    let f = file.target.build()?;
    Ok((file.protocol, f))
}

fn input_dist(arg: &InputArg) -> Result<(InputDist, Value)> {
    match (&arg.x, &arg.y) {
        (Some(x), Some(y)) => {
            let dist = InputDist::Fixed { x: parse_bits(x)?, y: parse_bits(y)? };
            Ok((dist, json!({ "x": x, "y": y })))
        }
        _ => Ok((InputDist::Uniform, json!("uniform"))),
    }
}

fn protocol_summary(p: &ProtocolTree) -> Value {
    json!({
        "protocol": p.name,
        "box_count": p.box_count(),
        "non_adaptive": p.is_non_adaptive(),
    })
}

fn simulate(arg: &ProtocolArg, inputs: &InputArg, delta: f64, samples: u64, seed: u64) -> Result<Value> {
    let (p, f) = load_protocol(arg)?;
    let (dist, shown) = input_dist(inputs)?;
    let est = monte_carlo_bias(&p, &f, delta, samples, seed, &dist)?;
    let mut v = protocol_summary(&p);
    v["inputs"] = shown;
    v["delta"] = json!(delta);
    v["samples"] = json!(est.samples);
    v["seed"] = json!(format!("{seed:#x}"));
    v["estimate"] = json!(est.estimate);
    v["stderr"] = json!(est.stderr);
    Ok(v)
}

fn bias_exact(arg: &ProtocolArg, inputs: &InputArg, deltas: &str) -> Result<Value> {
    let (p, f) = load_protocol(arg)?;
    let (dist, shown) = input_dist(inputs)?;
    let deltas: Vec<f64> = parse_list(deltas)?;
    let rows = deltas
        .iter()
        .map(|&d| Ok(json!({ "delta": d, "bias": exact_bias(&p, &f, d, &dist)? })))
        .collect::<Result<Vec<_>>>()?;
    let mut v = protocol_summary(&p);
    v["inputs"] = shown;
    v["pr_correct"] =
        if p.alice_bits + p.bob_bits <= MAX_ENUMERABLE_BITS { json!(is_pr_correct(&p, &f)?) } else { Value::Null };
    v["rows"] = Value::Array(rows);
    Ok(v)
}

fn amplify(t: &TableArg, delta: f64, eps0: f64, steps: u64) -> Result<Value> {
    let g = load_table(t)?;
    let tr = iterate_amplification(&g, delta, eps0, steps)?;
    let (kind, last) = match tr.outcome {
        Outcome::Converged { fixed_point } => ("converged", fixed_point),
        Outcome::Decayed { last } => ("decayed", last),
        Outcome::Unsettled { last } => ("unsettled", last),
    };
    let rows: Vec<Value> = tr.head.iter().enumerate().map(|(k, e)| json!({ "step": k, "eps": e })).collect();
    Ok(json!({
        "g": g.to_hex_string(),
        "delta": delta,
        "eps0": eps0,
        "rho": tr.rho,
        "d_xor": tr.d_xor,
        "steps": tr.steps,
        "outcome": kind,
        "final_eps": last,
        "rows": rows,
    }))
}

fn search(n: usize) -> Result<Value> {
    let v = verify_small_n(n)?;
    let hex = |ts: &[TruthTable]| ts.iter().map(TruthTable::to_hex_string).collect::<Vec<_>>();
    Ok(json!({
        "n": v.n,
        "scanned": v.scanned,
        "achiever_count": v.achievers.len(),
        "min_delta_b": v.min_delta_b.delta_b,
        "min_delta_b_witness": v.min_delta_b.g.to_hex_string(),
        "min_rho_b": v.min_delta_b.rho_b,
        "min_d_xor": v.min_delta_b.d_xor,
        "violations": hex(&v.violations),
        "mismatched": hex(&v.mismatched),
        "low_communication_nonlinear": hex(&v.low_communication_nonlinear),
        "verdict": if v.ok { "OK" } else { "FAILED" },
        "rows": v.achievers.iter().map(|g| json!({ "achiever": g.to_hex_string(), "essentially_maj3": is_essentially_maj3(g) })).collect::<Vec<_>>(),
    }))
}
