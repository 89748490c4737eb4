use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use symdesign::closedform::{self, ClosedFormBound, Regime};
use symdesign::numerics::{
    self, design_test, estimate_frame_potential, estimate_frame_potential_u, CircuitEnsemble,
    CircuitSpec, DesignTestConfig, Ensemble, FullHaarEnsemble, SymmetricHaarEnsemble,
};
use symdesign::optimizer::{Bound, DesignBound, OptimizerError, SearchOptions, DEFAULT_NODE_BUDGET};
use symdesign::pipeline::{self, OrderReport};
use symdesign::repdata::{self, build_custom};
use symdesign::{Error, Symmetry, VERSION};

const EXIT_INVALID: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "symdesign", version, about = "Exact unitary-design orders of symmetric local random circuits")]
struct Cli {
    /// Human-readable output instead of JSON.
    #[arg(long, global = true, conflicts_with = "json")]
    pretty: bool,
    /// JSON output (the default).
    #[arg(long, global = true)]
    json: bool,
    /// Omit wall-clock timings so that output is reproducible byte for byte.
    #[arg(long, global = true)]
    deterministic: bool,
    /// Worker threads for sampling.
    #[arg(long, global = true, env = "SYMDESIGN_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact design bound for one symmetry and locality.
    Order(OrderArgs),
    /// Optimizer against closed forms over a grid of (n, k).
    Table(TableArgs),
    /// Frame-potential test of the design order at one t.
    DesignTest(DesignArgs),
    /// Monte Carlo frame potential of an ensemble.
    FramePotential(FrameArgs),
    /// Load and check a custom representation file.
    ValidateCustom(CustomArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Sym {
    Z2,
    U1,
    Su2,
    Custom,
}

impl From<Sym> for Symmetry {
    fn from(s: Sym) -> Self {
        match s {
            Sym::Z2 => Symmetry::Z2,
            Sym::U1 => Symmetry::U1,
            Sym::Su2 => Symmetry::SU2,
            Sym::Custom => Symmetry::Custom,
        }
    }
}

#[derive(Args, Debug)]
struct OrderArgs {
    #[arg(long, value_enum)]
    sym: Sym,
    #[arg(long, required_unless_present = "custom")]
    n: Option<u32>,
    #[arg(long, required_unless_present = "custom")]
    k: Option<u32>,
    /// Custom representation data (JSON); implies `--sym custom`.
    #[arg(long)]
    custom: Option<PathBuf>,
    /// Enumeration node budget.
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
    /// Always enumerate, even when the seed is provably optimal.
    #[arg(long)]
    no_shortcut: bool,
}

#[derive(Args, Debug)]
struct TableArgs {
    #[arg(long, default_value_t = 20)]
    max_n: u32,
    #[arg(long, value_delimiter = ',', default_values_t = [2u32, 3, 4])]
    ks: Vec<u32>,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Sym::Z2, Sym::U1, Sym::Su2])]
    syms: Vec<Sym>,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    budget: u64,
}

#[derive(Args, Debug)]
struct DesignArgs {
    #[arg(long, value_enum)]
    sym: Sym,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    t: u32,
    /// Independent circuits drawn; all pairs among them are used.
    #[arg(long, default_value_t = 20_000)]
    samples: usize,
    #[arg(long, default_value_t = 0x5EED)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    initial_depth: usize,
    #[arg(long, default_value_t = 1024)]
    max_depth: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EnsembleKind {
    /// Haar measure on the symmetric unitaries.
    Haar,
    /// Haar measure on the full unitary group.
    FullHaar,
    /// Depth-D local random circuits with contiguous windows.
    Circuit,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Estimator {
    Pairs,
    AllPairs,
}

#[derive(Args, Debug)]
struct FrameArgs {
    #[arg(long, value_enum, default_value = "haar")]
    ensemble: EnsembleKind,
    #[arg(long, value_enum)]
    sym: Sym,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 64)]
    depth: usize,
    #[arg(long)]
    t: u32,
    /// Pairs for `pairs`, draws for `all-pairs`.
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0x5EED)]
    seed: u64,
    #[arg(long, value_enum, default_value = "pairs")]
    estimator: Estimator,
}

#[derive(Args, Debug)]
struct CustomArgs {
    #[arg(long)]
    custom: PathBuf,
}

fn value_name(v: impl ValueEnum) -> String {
    v.to_possible_value().expect("no skipped variants").get_name().to_string()
}

fn decimal(v: &impl ToString) -> Value {
    Value::String(v.to_string())
}

fn decimals<T: ToString>(v: &[T]) -> Value {
    Value::Array(v.iter().map(decimal).collect())
}

fn bound_json(b: &DesignBound) -> Value {
    json!({
        "value": decimal(&b.value),
        "max_design_order": b.max_design_order().map_or(Value::String("infinite".into()), |v| decimal(&v)),
        "witness": b.witness.as_deref().map(decimals),
        "optimal": b.optimal,
        "nodes": b.nodes,
        "shortcut_applied": b.shortcut_applied,
    })
}

fn closed_form_json(cf: &ClosedFormBound) -> Value {
    json!({
        "value": decimal(&cf.value),
        "regime": cf.regime,
        "validity": cf.validity,
    })
}

/// How the optimizer value relates to the closed form, and whether that is
/// what the regime promises.
fn comparison(bound: &Bound, cf: &ClosedFormBound) -> (&'static str, bool) {
    let relation = match bound {
        Bound::Infinite => "above",
        Bound::Finite(v) if *v == cf.value => "equal",
        Bound::Finite(v) if *v < cf.value => "below",
        Bound::Finite(_) => "above",
    };
    let agrees = match cf.regime {
        Regime::Tight => relation == "equal",
        Regime::UpperBoundOnly => relation != "above",
    };
    (relation, agrees)
}

fn report_json(rep: &OrderReport) -> Value {
    let data = &rep.data;
    let closed = match &rep.closed_form {
        None => Value::Null,
        Some(Ok(cf)) => {
            let (relation, agrees) = comparison(&rep.bound.value, cf);
            let mut v = closed_form_json(cf);
            v["relation"] = json!(relation);
            v["agrees"] = json!(agrees);
            v
        }
        Some(Err(note)) => json!({ "unavailable": note }),
    };
    json!({
        "labels": (0..data.len()).map(|i| data.label_name(i)).collect::<Vec<_>>(),
        "m": decimals(&data.m),
        "r": decimals(&data.r),
        "constraint_rank": data.len() - rep.lattice.dim(),
        "lattice_rank": rep.lattice.dim(),
        "certificate": rep.certificate,
        "seed": rep.seed.as_ref().map(|s| json!({
            "lambda_prime": s.lambda_prime,
            "d": decimals(&s.d),
            "t0": decimal(&s.t0),
            "one_dimensional": s.one_dimensional,
        })),
        "bound": bound_json(&rep.bound),
        "closed_form": closed,
    })
}

struct Record {
    command: &'static str,
    inputs: Value,
    outputs: Value,
    seeds: Value,
}

struct Output {
    pretty: bool,
    deterministic: bool,
    started: Instant,
}

impl Output {
    fn emit(&self, record: Record, pretty: impl FnOnce(&Value) -> String) {
        let text = if self.pretty {
            pretty(&record.outputs)
        } else {
            self.json(record)
        };
        // A closed pipe (e.g. `| head`) is not an error worth reporting.
        let _ = std::io::stdout().lock().write_all(text.as_bytes());
    }

    fn json(&self, record: Record) -> String {
        let mut v = json!({
            "command": record.command,
            "version": VERSION,
            "inputs": record.inputs,
            "outputs": record.outputs,
            "seeds": record.seeds,
        });
        if !self.deterministic {
            v["timings"] = json!({ "wall_seconds": self.started.elapsed().as_secs_f64() });
        }
        serde_json::to_string_pretty(&v).expect("serializable") + "\n"
    }
}

fn fail(err: Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(if err.is_invalid_input() { EXIT_INVALID } else { EXIT_BUDGET })
}

fn cmd_order(out: &Output, args: &OrderArgs) -> Result<(), Error> {
    let options = SearchOptions {
        node_budget: args.budget,
        use_shortcut: !args.no_shortcut,
    };
    let (data, warnings) = match (&args.custom, args.sym) {
        (Some(path), _) => {
            let c = build_custom(path)?;
            (c.data, c.warnings)
        }
        (None, Sym::Custom) => {
            return Err(repdata::RepDataError::Shape("--sym custom needs --custom <file>".into()).into())
        }
        (None, sym) => (
            repdata::build(sym.into(), args.n.unwrap_or(0), args.k.unwrap_or(0))?,
            Vec::new(),
        ),
    };
    let symmetry = data.symmetry;
    let inputs = json!({
        "sym": symmetry.to_string(),
        "n": args.n,
        "k": args.k,
        "custom": args.custom,
        "budget": args.budget,
        "shortcut": options.use_shortcut,
    });
    match pipeline::compute_order(data, options) {
        Ok(rep) => {
            let mut outputs = report_json(&rep);
            outputs["warnings"] = json!(warnings);
            out.emit(
                Record {
                    command: "order",
                    inputs,
                    outputs,
                    seeds: Value::Null,
                },
                pretty_order,
            );
            Ok(())
        }
        Err(Error::Optimizer(OptimizerError::BudgetExhausted { budget, upper_bound })) => {
            let outputs = json!({
                "bound": bound_json(&upper_bound),
                "status": "budget_exhausted",
                "note": format!("node budget {budget} exhausted; value is an upper bound only"),
                "warnings": warnings,
            });
            out.emit(
                Record {
                    command: "order",
                    inputs,
                    outputs,
                    seeds: Value::Null,
                },
                pretty_order,
            );
            Err(Error::Optimizer(OptimizerError::BudgetExhausted { budget, upper_bound }))
        }
        Err(e) => Err(e),
    }
}

fn pretty_order(o: &Value) -> String {
    let b = &o["bound"];
    let mut s = format!(
        "bound B = {}\nmax design order = {}\nwitness = {}\nshortcut applied = {}\n",
        b["value"].as_str().unwrap_or("?"),
        b["max_design_order"].as_str().unwrap_or("?"),
        b["witness"],
        b["shortcut_applied"],
    );
    if b["optimal"] == json!(false) {
        s.push_str("search stopped early: B is an upper bound only\n");
    }
    match &o["closed_form"] {
        Value::Null => {}
        cf if cf.get("unavailable").is_some() => {
            s.push_str(&format!("closed form: {}\n", cf["unavailable"].as_str().unwrap_or("")));
        }
        cf => s.push_str(&format!(
            "closed form = {} ({}, optimizer {})\n",
            cf["value"].as_str().unwrap_or("?"),
            cf["regime"].as_str().unwrap_or("?"),
            cf["relation"].as_str().unwrap_or("?"),
        )),
    }
    for w in o["warnings"].as_array().into_iter().flatten() {
        s.push_str(&format!("warning: {}\n", w.as_str().unwrap_or("")));
    }
    s
}

fn cmd_table(out: &Output, args: &TableArgs) -> Result<(), Error> {
    if args.max_n > 64 {
        return Err(repdata::RepDataError::Shape(format!("--max-n {} exceeds the limit 64", args.max_n)).into());
    }
    let options = SearchOptions {
        node_budget: args.budget,
        use_shortcut: true,
    };
    let mut cells = Vec::new();
    let mut all_agree = true;
    for &sym in &args.syms {
        let symmetry: Symmetry = sym.into();
        if symmetry == Symmetry::Custom {
            return Err(repdata::RepDataError::Shape("table covers built-in symmetries only".into()).into());
        }
        for &k in &args.ks {
            for n in k + 1..=args.max_n {
                let rep = pipeline::order(symmetry, n, k, options)?;
                let (cf, relation, agrees) = match closedform::bound(symmetry, n, k) {
                    Ok(cf) => {
                        let (relation, agrees) = comparison(&rep.bound.value, &cf);
                        (closed_form_json(&cf), relation, Some(agrees))
                    }
                    Err(e) => (json!({ "unavailable": e.to_string() }), "n/a", None),
                };
                all_agree &= agrees.unwrap_or(true);
                cells.push(json!({
                    "symmetry": symmetry.to_string(),
                    "n": n,
                    "k": k,
                    "bound": decimal(&rep.bound.value),
                    "closed_form": cf,
                    "relation": relation,
                    "agrees": agrees,
                }));
            }
        }
    }
    out.emit(
        Record {
            command: "table",
            inputs: json!({
                "max_n": args.max_n,
                "ks": args.ks,
                "syms": args.syms.iter().map(|&s| Symmetry::from(s).to_string()).collect::<Vec<_>>(),
                "budget": args.budget,
            }),
            outputs: json!({ "cells": cells, "all_agree": all_agree }),
            seeds: Value::Null,
        },
        |o| {
            let mut s = format!("{:<6} {:>3} {:>2} {:>24} {:>24} {:<18} {}\n", "sym", "n", "k", "optimizer", "closed form", "regime", "relation");
            for c in o["cells"].as_array().into_iter().flatten() {
                let cf = &c["closed_form"];
                s.push_str(&format!(
                    "{:<6} {:>3} {:>2} {:>24} {:>24} {:<18} {}\n",
                    c["symmetry"].as_str().unwrap_or(""),
                    c["n"],
                    c["k"],
                    c["bound"].as_str().unwrap_or(""),
                    cf["value"].as_str().unwrap_or("-"),
                    cf["regime"].as_str().unwrap_or("-"),
                    c["relation"].as_str().unwrap_or(""),
                ));
            }
            s
        },
    );
    Ok(())
}

fn cmd_design_test(out: &Output, args: &DesignArgs) -> Result<(), Error> {
    let symmetry: Symmetry = args.sym.into();
    let mut cfg = DesignTestConfig::new(symmetry, args.n, args.k, args.t);
    cfg.draws = args.samples;
    cfg.seed = args.seed;
    cfg.initial_depth = args.initial_depth;
    cfg.max_depth = args.max_depth;
    let report = design_test(&cfg)?;
    let predicted = pipeline::order(symmetry, args.n as u32, args.k as u32, SearchOptions::default())
        .ok()
        .map(|r| decimal(&r.bound.value));
    let outputs = json!({
        "verdict": report.verdict,
        "predicted_bound": predicted,
        "report": report,
    });
    out.emit(
        Record {
            command: "design-test",
            inputs: json!({
                "sym": symmetry.to_string(), "n": args.n, "k": args.k, "t": args.t,
                "samples": args.samples, "initial_depth": args.initial_depth, "max_depth": args.max_depth,
            }),
            outputs,
            seeds: json!({ "rng_seed": args.seed }),
        },
        |o| {
            let r = &o["report"];
            format!(
                "verdict: {}\nF_t = {} ± {} at depth {}\nHaar F_t = {}\nz = {}\npredicted bound: t < {}\n",
                o["verdict"].as_str().unwrap_or("?"),
                r["schedule"].as_array().and_then(|s| s.last()).map_or(Value::Null, |p| p["estimate"]["mean"].clone()),
                r["combined_stderr"],
                r["final_depth"],
                r["haar_exact"].as_str().unwrap_or("?"),
                r["z"],
                o["predicted_bound"].as_str().unwrap_or("?"),
            )
        },
    );
    Ok(())
}

fn cmd_frame_potential(out: &Output, args: &FrameArgs) -> Result<(), Error> {
    let symmetry: Symmetry = args.sym.into();
    let ensemble: Box<dyn Ensemble> = match args.ensemble {
        EnsembleKind::Haar => Box::new(SymmetricHaarEnsemble {
            blocks: numerics::block_structure(symmetry, args.n, args.seed)?,
        }),
        EnsembleKind::FullHaar => Box::new(FullHaarEnsemble { dim: 1 << args.n }),
        EnsembleKind::Circuit => {
            let spec = CircuitSpec::brickwork(args.n, args.k, symmetry)?;
            Box::new(CircuitEnsemble::new(spec, args.depth, args.seed)?)
        }
    };
    let estimate = match args.estimator {
        Estimator::Pairs => estimate_frame_potential(ensemble.as_ref(), args.t, args.samples, args.seed)?,
        Estimator::AllPairs => estimate_frame_potential_u(ensemble.as_ref(), args.t, args.samples, args.seed)?,
    };
    out.emit(
        Record {
            command: "frame-potential",
            inputs: json!({
                "ensemble": value_name(args.ensemble),
                "sym": symmetry.to_string(), "n": args.n, "k": args.k, "depth": args.depth,
                "t": args.t, "samples": args.samples,
                "estimator": value_name(args.estimator),
            }),
            outputs: json!({ "estimate": estimate }),
            seeds: json!({ "rng_seed": args.seed }),
        },
        |o| {
            let e = &o["estimate"];
            format!("F_{} = {} ± {} ({} pairs)\n", e["t"], e["mean"], e["stderr"], e["samples"])
        },
    );
    Ok(())
}

fn cmd_validate_custom(out: &Output, args: &CustomArgs) -> Result<(), Error> {
    let c = build_custom(&args.custom)?;
    let data = &c.data;
    let lattice = pipeline::lattice(data);
    let certificate = lattice.certify(&data.constraint_matrix());
    out.emit(
        Record {
            command: "validate-custom",
            inputs: json!({ "custom": args.custom }),
            outputs: json!({
                "labels": data.labels.iter().map(|l| l.index()).collect::<Vec<_>>(),
                "m": decimals(&data.m),
                "r": decimals(&data.r),
                "constraint_rows": data.c_basis.len(),
                "lattice_rank": lattice.dim(),
                "certificate": certificate,
                "warnings": c.warnings,
            }),
            seeds: Value::Null,
        },
        |o| {
            let mut s = format!(
                "{} labels, {} constraint rows, lattice rank {}\n",
                o["labels"].as_array().map_or(0, Vec::len),
                o["constraint_rows"],
                o["lattice_rank"]
            );
            for w in o["warnings"].as_array().into_iter().flatten() {
                s.push_str(&format!("warning: {}\n", w.as_str().unwrap_or("")));
            }
            s
        },
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    let out = Output {
        pretty: cli.pretty,
        deterministic: cli.deterministic,
        started: Instant::now(),
    };
    let result = match &cli.command {
        Command::Order(a) => cmd_order(&out, a),
        Command::Table(a) => cmd_table(&out, a),
        Command::DesignTest(a) => cmd_design_test(&out, a),
        Command::FramePotential(a) => cmd_frame_potential(&out, a),
        Command::ValidateCustom(a) => cmd_validate_custom(&out, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}
