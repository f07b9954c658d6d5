use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tuplenorm::approx::{bj_orthogonal, distance_to_diagonal_subspace};
use tuplenorm::derivatives::{
    check_smoothness_sufficiency, component_rho_sums, rho_operator, rho_sandwich_bounds, rho_tuple_infty_formula,
    smoothness_of_operator,
};
use tuplenorm::io::{instance_to_json, parse_instance};
use tuplenorm::normcalc::{joint_attainment_check, tuple_norm};
use tuplenorm::report;
use tuplenorm::theorems::{
    applicable_theorems, diagonal_smoothness_example, gen_example_a, gen_example_b, gen_functionals, gen_random,
    golden_counterexample, run_check, run_suite, CheckSettings, Instance, Status, SuiteCounts, TheoremId,
};
use tuplenorm::{Config, Error, Exponent, Field};

/// Norms, distances, orthogonality and derivatives of operator tuples.
#[derive(Parser)]
#[command(name = "tuplenorm", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Orthogonality tolerance; for `check` it replaces every conclusion tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for random starts and generators.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Random starts per norm computation.
    #[arg(long, global = true)]
    starts: Option<usize>,
    /// Emit JSON.
    #[arg(long, global = true, conflicts_with = "text")]
    json: bool,
    /// Emit aligned text (the default).
    #[arg(long, global = true)]
    text: bool,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Joint norm of 𝒯.
    Norm(Input),
    /// Distance from 𝒯 to the diagonal subspace spanned by 𝒮.
    Dist(Input),
    /// Birkhoff-James orthogonality of 𝒯 to 𝒮, with a certificate.
    Bj(Input),
    /// One-sided derivatives ρ±(𝒯, 𝒮).
    Rho(Input),
    /// Smoothness of 𝒯 and of its components.
    Smooth(Input),
    /// Check the theorem statements on an instance or on the generated suite.
    Check(CheckArgs),
    /// Write a generated instance.
    Gen(GenArgs),
}

#[derive(Args)]
struct Input {
    /// Instance JSON; stdin when absent or `-`.
    file: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// Run every applicable theorem on the generated suite.
    #[arg(long, conflicts_with = "theorem")]
    suite: bool,
    /// Theorem id, e.g. `bj-infty`.
    #[arg(long)]
    theorem: Option<String>,
    /// Generated instances per family in the suite.
    #[arg(long, default_value_t = 2)]
    count: usize,
    /// Instance JSON for `--theorem`; stdin when absent.
    file: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Example {
    A,
    B,
    Golden,
    Diagonal,
    Functionals,
    Random,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    example: Example,
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Complex scalars (`b` and `random` only).
    #[arg(long)]
    complex: bool,
}

enum Failure {
    Input(String),
    Violation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn read_instance(path: &Option<PathBuf>) -> Result<Instance, Failure> {
    let text = match path {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read_to_string(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?
        }
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::Input(format!("stdin: {e}")))?;
            s
        }
    };
    Ok(parse_instance(&text)?)
}

fn config(g: &Global) -> Config {
    let mut cfg = Config::default();
    if let Some(seed) = g.seed {
        cfg.seed = seed;
    }
    if let Some(n) = g.starts {
        cfg.starts = n;
    }
    if let Some(t) = g.tol {
        cfg.tau_bj = t;
    }
    cfg
}

fn needs_direction(inst: &Instance) -> Result<(), Failure> {
    if inst.s.is_zero() {
        return Err(Failure::Input("$.S: a nonzero direction is required".into()));
    }
    Ok(())
}

fn cmd_norm(inst: &Instance, cfg: &Config) -> Value {
    let r = tuple_norm(&inst.t, cfg);
    let mut v = report::norm_json(&r);
    if inst.t.d() > 1 {
        let comps: Vec<f64> = inst.t.components().iter().map(|op| tuplenorm::normcalc::operator_norm(op, cfg).value).collect();
        v["component_norms"] = json!(comps);
        v["joint_attainment"] = report::joint_json(&joint_attainment_check(&inst.t, cfg));
    }
    v
}

fn cmd_rho(inst: &Instance, cfg: &Config) -> Result<Value, Failure> {
    needs_direction(inst)?;
    let (t, s) = (&inst.t, &inst.s);
    let mut v = json!({ "quotient": report::gateaux_json(&rho_operator(t, s, cfg)?) });
    if t.d() > 1 {
        if t.outer().is_infinite() {
            v["component_formula"] = report::gateaux_json(&rho_tuple_infty_formula(t, s, cfg)?);
        } else {
            let (lo, hi) = component_rho_sums(t, s, cfg)?;
            v["component_sums"] = json!({ "rho_minus": lo, "rho_plus": hi });
            v["sandwich"] = match rho_sandwich_bounds(t, s, cfg) {
                Ok((lo, hi)) => json!({ "lower": lo, "upper": hi }),
                Err(e) => json!({ "unavailable": e.to_string() }),
            };
        }
    }
    Ok(v)
}

fn cmd_smooth(inst: &Instance, cfg: &Config) -> Result<Value, Failure> {
    let t = &inst.t;
    let tuple = report::smoothness_json(&smoothness_of_operator(t, cfg)?);
    if t.d() == 1 {
        return Ok(json!({ "tuple": tuple }));
    }
    Ok(match check_smoothness_sufficiency(t, cfg) {
        Ok(r) => report::sufficiency_json(&r),
        Err(e) => json!({ "tuple": tuple, "sufficiency": e.to_string() }),
    })
}

fn cmd_check(args: &CheckArgs, g: &Global, cfg: &Config) -> Result<(Value, String, bool), Failure> {
    let settings = CheckSettings { tol: g.tol };
    if args.suite {
        let suite = run_suite(g.seed.unwrap_or(cfg.seed), &SuiteCounts::uniform(args.count), cfg, &settings)?;
        let text = report::suite_text(&suite);
        return Ok((report::suite_json(&suite), text, suite.summary.violated > 0));
    }
    let inst = read_instance(&args.file)?;
    let ids: Vec<TheoremId> = match &args.theorem {
        Some(id) => vec![id.parse()?],
        None => applicable_theorems(&inst),
    };
    let mut reports = Vec::new();
    for id in ids {
        reports.push(run_check(id, &inst, cfg, &settings)?);
    }
    let violated = reports.iter().any(|r| r.status == Status::Violated);
    let v = Value::Array(reports.iter().map(report::check_json).collect());
    let text = reports.iter().map(|r| report::to_text(&report::check_json(r))).collect::<Vec<_>>().join("\n");
    Ok((v, text, violated))
}

fn cmd_gen(args: &GenArgs, seed: u64) -> Result<Instance, Failure> {
    let field = if args.complex { Field::Complex } else { Field::Real };
    let inst = match args.example {
        Example::A => gen_example_a(args.dim, args.d, seed)?,
        Example::B if args.complex => {
            let opts = tuplenorm::theorems::GenOptions { field, domain_p: 3.0, ..Default::default() };
            tuplenorm::theorems::gen_example_b_with(args.dim, args.d, seed, &opts)?
        }
        Example::B => gen_example_b(args.dim, args.d, seed)?,
        Example::Golden => golden_counterexample(),
        Example::Diagonal => diagonal_smoothness_example(3.0, args.d)?,
        Example::Functionals => gen_functionals(args.dim, args.d, 3.0, seed, true)?,
        Example::Random => gen_random(args.dim, args.d, 3.0, Exponent::Infinity, field, seed)?,
    };
    Ok(inst)
}

fn run(cli: &Cli) -> Result<(String, bool), Failure> {
    let g = &cli.global;
    let cfg = config(g);
    let render = |v: &Value| {
        if g.json {
            format!("{}\n", serde_json::to_string_pretty(v).unwrap_or_default())
        } else {
            report::to_text(v)
        }
    };
    let (out, violated) = match &cli.cmd {
        Cmd::Norm(i) => (render(&cmd_norm(&read_instance(&i.file)?, &cfg)), false),
        Cmd::Dist(i) => {
            let inst = read_instance(&i.file)?;
            needs_direction(&inst)?;
            let r = distance_to_diagonal_subspace(&inst.t, &inst.s, &cfg)?;
            (render(&report::distance_json(&r, inst.t.field())), false)
        }
        Cmd::Bj(i) => {
            let inst = read_instance(&i.file)?;
            needs_direction(&inst)?;
            let d = bj_orthogonal(&inst.t, &inst.s, &cfg)?;
            let check = d.certificate.as_ref().map(|c| c.verify(&inst.t, &inst.s, &cfg));
            (render(&report::bj_json(&d, check.as_ref(), inst.t.field())), false)
        }
        Cmd::Rho(i) => (render(&cmd_rho(&read_instance(&i.file)?, &cfg)?), false),
        Cmd::Smooth(i) => (render(&cmd_smooth(&read_instance(&i.file)?, &cfg)?), false),
        Cmd::Check(a) => {
            if !a.suite && a.theorem.is_none() && a.file.is_none() {
                return Err(Failure::Input("check needs --suite, --theorem or an instance file".into()));
            }
            let (v, text, violated) = cmd_check(a, g, &cfg)?;
            (if g.json { render(&v) } else { text }, violated)
        }
        Cmd::Gen(a) => {
            let inst = cmd_gen(a, g.seed.unwrap_or(cfg.seed))?;
            (format!("{}\n", serde_json::to_string_pretty(&instance_to_json(&inst)).unwrap_or_default()), false)
        }
    };
    Ok((out, violated))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = run(&cli).and_then(|(out, violated)| {
        match &cli.global.out {
            Some(p) => std::fs::write(p, &out).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?,
            None => print!("{out}"),
        }
        if violated {
            Err(Failure::Violation("at least one theorem check was violated".into()))
        } else {
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(msg)) => {
            eprintln!("tuplenorm: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("tuplenorm: error: {msg}");
            ExitCode::from(1)
        }
    }
}
