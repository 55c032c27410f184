use std::path::Path;

use dyadic_core::bellman::verify_certificate;
use dyadic_core::lab::{scan_norm_vs_a2, CheckId, CheckInputs, CheckReport, InequalityLab, ScanSpec};
use dyadic_core::paraproduct::{weighted_operator_norm, PowerIteration};
use dyadic_core::weights::{a2_characteristic, bmo_norm_carleson, gen_bmo_symbol, squared_coefficients};
use dyadic_core::{haar_analyze, DyadicError, DyadicIndex, StepFunction, Weight};
use log::info;
use serde::Serialize;

use crate::args::{CheckArgs, Cli, Command, GenSymbolArgs, GenWeightArgs, NormArgs, ScanArgs, VerifyBellmanArgs};
use crate::output::{num, to_json, write_atomic, write_json, Table};
use crate::run_config::{check_depth, RunConfig};

#[derive(Debug)]
pub enum Failure {
    /// Bad flags, configuration or input files.
    Usage(String),
    /// At least one executed check failed; details are already printed.
    Checks,
    Convergence(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Checks => 1,
            Failure::Usage(_) => 2,
            Failure::Convergence(_) => 3,
        }
    }

    pub fn message(&self) -> Option<&str> {
        match self {
            Failure::Usage(m) | Failure::Convergence(m) => Some(m),
            Failure::Checks => None,
        }
    }
}

impl From<DyadicError> for Failure {
    fn from(e: DyadicError) -> Self {
        match e {
            DyadicError::Convergence { .. } => Failure::Convergence(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

pub fn run(cli: Cli) -> Outcome {
    let config = RunConfig::resolve(cli.config.as_deref(), cli.constants.as_deref(), cli.seed)
        .map_err(Failure::Usage)?;
    info!("seed {}", config.seed);
    info!("constants {}", serde_json::to_string(&config.constants).expect("constants serialize"));

    match cli.command {
        Command::GenWeight(a) => gen_weight(&config, a),
        Command::GenSymbol(a) => gen_symbol(&config, a),
        Command::VerifyBellman(a) => verify_bellman(&config, a),
        Command::Check(a) => check(&config, a),
        Command::Scan(a) => scan(&config, a),
        Command::Norm(a) => norm(&config, a),
    }
}

fn emit_step_function(f: &StepFunction, out: Option<&Path>) -> Outcome {
    match out {
        Some(path) => {
            write_json(path, f)?;
            info!("wrote {}", path.display());
        }
        None => print!("{}", to_json(f)),
    }
    Ok(())
}

fn gen_weight(config: &RunConfig, a: GenWeightArgs) -> Outcome {
    let depth = config.depth_or(a.depth).map_err(Failure::Usage)?;
    let w = a.family.generate(a.param, depth, config.seed)?;
    emit_step_function(w.values(), a.out.as_deref())
}

fn gen_symbol(config: &RunConfig, a: GenSymbolArgs) -> Outcome {
    let depth = config.depth_or(a.depth).map_err(Failure::Usage)?;
    let b = gen_bmo_symbol(a.kind, depth, config.seed)?;
    emit_step_function(&b, a.out.as_deref())
}

fn load_step_function(path: &Path) -> Result<StepFunction, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let f: StepFunction =
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    check_depth(f.depth()).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(f)
}

fn load_weight(path: &Path) -> Result<Weight, Failure> {
    Weight::new(load_step_function(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn verify_bellman(config: &RunConfig, a: VerifyBellmanArgs) -> Outcome {
    let report = verify_certificate(a.function, a.samples, config.seed, &config.constants.bellman)?;

    let mut table = Table::new(&["condition", "kind", "checked", "worst", "tolerance", "status"]);
    for c in &report.conditions {
        table.row(vec![
            c.name.clone(),
            serde_json::to_value(c.kind).expect("kind serializes").as_str().unwrap_or_default().to_string(),
            c.checked.to_string(),
            num(c.worst),
            num(c.tolerance),
            status(c.pass),
        ]);
    }
    print!("{}", table.render());
    println!("{} over {} points: {}", report.function.id(), report.points, status(report.passed));

    if let Some(out) = &a.out {
        write_json(out, &report)?;
    }
    if report.passed {
        return Ok(());
    }
    for c in report.conditions.iter().filter(|c| !c.pass) {
        eprintln!(
            "certificate {} condition {} failed: worst {} (tolerance {}) at {:?}",
            report.function.id(),
            c.name,
            c.worst,
            c.tolerance,
            c.witness
        );
    }
    Err(Failure::Checks)
}

#[derive(Serialize)]
struct CheckSummary {
    /// Roots evaluated.
    roots: usize,
    failures: usize,
    /// The report at `--root`, or at the root with the largest ratio.
    report: CheckReport,
}

#[derive(Serialize)]
struct CheckRun {
    depth: u32,
    root: Option<DyadicIndex>,
    checks: Vec<CheckSummary>,
    passed: bool,
}

fn expand_which(names: &[String]) -> Result<Vec<CheckId>, Failure> {
    let mut ids = Vec::new();
    for name in names {
        let expanded: Vec<CheckId> = match name.trim() {
            "all" => CheckId::ALL.to_vec(),
            "bilinear" => CheckId::BILINEAR.to_vec(),
            other => vec![other.parse().map_err(|e: DyadicError| Failure::Usage(e.to_string()))?],
        };
        for id in expanded {
            if !ids.contains(&id) {
                ids.push(id);
            }
        }
    }
    Ok(ids)
}

fn check(config: &RunConfig, a: CheckArgs) -> Outcome {
    let ids = expand_which(&a.which)?;
    let symbol = a.symbol.as_deref().map(load_step_function).transpose()?;
    let weight = match (&a.weight, &symbol) {
        (Some(path), _) => load_weight(path)?,
        // The Carleson property of b_I^2 does not involve a weight.
        (None, Some(b)) if ids.iter().all(|id| *id == CheckId::CarlesonB) => Weight::constant(b.depth(), 1.0)?,
        (None, _) => return Err(Failure::Usage("--weight is required for the selected checks".into())),
    };
    if symbol.is_none() {
        if let Some(id) = ids.iter().find(|id| id.needs_symbol() || id.needs_carleson()) {
            return Err(Failure::Usage(format!("check {id} needs --symbol")));
        }
    }
    if let Some(b) = &symbol {
        weight.values().same_depth(b)?;
    }
    let lambda = symbol.as_ref().map(|b| squared_coefficients(&haar_analyze(b)));

    let mut inputs = CheckInputs::weight(&weight);
    if let (Some(b), Some(lam)) = (&symbol, &lambda) {
        inputs = inputs.with_symbol(b).with_carleson(lam);
    }
    let lab = InequalityLab::new(config.constants.checks.clone());

    let mut checks = Vec::with_capacity(ids.len());
    for id in ids {
        let profile = lab.profile(id, &inputs)?;
        let summary = match a.root {
            Some(root) => {
                let report = profile.report(root)?;
                CheckSummary { roots: 1, failures: usize::from(!report.pass), report }
            }
            None => CheckSummary {
                roots: profile.reports().len(),
                failures: profile.failures(),
                report: profile.worst(),
            },
        };
        checks.push(summary);
    }
    let passed = checks.iter().all(|c| c.failures == 0);
    let run = CheckRun { depth: weight.depth(), root: a.root, checks, passed };

    let mut table = Table::new(&["check", "root", "lhs", "rhs", "ratio", "constant", "failures", "status"]);
    for c in &run.checks {
        let r = &c.report;
        table.row(vec![
            r.id.to_string(),
            r.root.to_string(),
            num(r.lhs),
            num(r.rhs),
            num(r.ratio),
            num(r.constant),
            format!("{}/{}", c.failures, c.roots),
            status(c.failures == 0),
        ]);
    }
    print!("{}", table.render());

    if let Some(out) = &a.out {
        write_json(out, &run)?;
    }
    if run.passed {
        return Ok(());
    }
    let worst = run
        .checks
        .iter()
        .filter(|c| c.failures > 0)
        .map(|c| &c.report)
        .max_by(|x, y| (x.ratio / x.constant).total_cmp(&(y.ratio / y.constant)))
        .expect("a failing check exists");
    eprintln!(
        "check {} failed: ratio {} exceeds {} at root {} (witness interval {})",
        worst.id, worst.ratio, worst.constant, worst.root, worst.witness
    );
    Err(Failure::Checks)
}

fn power_iteration(config: &RunConfig, max_iterations: Option<usize>) -> Result<PowerIteration, Failure> {
    let mut opts = PowerIteration::from(&config.constants.norm);
    if let Some(m) = max_iterations {
        if m == 0 {
            return Err(Failure::Usage("--max-iterations must be positive".into()));
        }
        opts.max_iterations = m;
    }
    Ok(opts)
}

fn scan(config: &RunConfig, a: ScanArgs) -> Outcome {
    let depth = config.depth_or(a.depth).map_err(Failure::Usage)?;
    let opts = power_iteration(config, a.max_iterations)?;
    let spec = ScanSpec { family: a.family, params: a.params, depth, seed: config.seed, symbol: a.symbol };
    let result = scan_norm_vs_a2(&spec, &opts)?;

    let mut table = Table::new(&["param", "a2", "bmo", "norm", "ratio", "slope_so_far"]);
    for r in &result.records {
        table.row(vec![
            r.param.to_string(),
            num(r.a2),
            num(r.bmo),
            num(r.norm),
            num(r.ratio),
            r.slope_so_far.map(num).unwrap_or_else(|| "-".into()),
        ]);
    }
    print!("{}", table.render());
    let slope = result.slope.map(num).unwrap_or_else(|| "-".into());
    let limits = &config.constants.scan;
    println!(
        "slope {slope} (limit {}), ratio spread {} (limit {}): {}",
        limits.max_slope,
        num(result.ratio_spread),
        limits.max_ratio_spread,
        if result.within(limits) { "within limits" } else { "outside limits" }
    );

    if let Some(out) = &a.out {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &result.records {
            w.serialize(r).map_err(|e| Failure::Usage(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Failure::Usage(e.to_string()))?;
        write_atomic(out, &bytes)?;
        info!("wrote {}", out.display());
    }
    Ok(())
}

#[derive(Serialize)]
struct NormRecord {
    norm: f64,
    a2: f64,
    bmo: f64,
    /// `norm / (a2 * bmo)`, zero for the zero operator.
    ratio: f64,
    iterations: usize,
}

fn norm(config: &RunConfig, a: NormArgs) -> Outcome {
    let w = load_weight(&a.weight)?;
    let b = load_step_function(&a.symbol)?;
    w.values().same_depth(&b)?;
    let opts = power_iteration(config, a.max_iterations)?;
    let estimate = weighted_operator_norm(&b, &w, &opts)?;
    let a2 = a2_characteristic(&w).value;
    let bmo = bmo_norm_carleson(&b);
    let ratio = if estimate.norm == 0.0 { 0.0 } else { estimate.norm / (a2 * bmo) };
    let record = NormRecord { norm: estimate.norm, a2, bmo, ratio, iterations: estimate.iterations };

    let mut table = Table::new(&["norm", "a2", "bmo", "ratio", "iterations"]);
    table.row(vec![num(record.norm), num(a2), num(bmo), num(ratio), record.iterations.to_string()]);
    print!("{}", table.render());
    if let Some(out) = &a.out {
        write_json(out, &record)?;
    }
    Ok(())
}

fn status(pass: bool) -> String {
    if pass { "PASS" } else { "FAIL" }.to_string()
}
