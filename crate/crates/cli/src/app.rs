//! Subcommands. Each returns an [`Output`]; `main` decides where it goes.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use erasure_ft::arith::{to_f64, Poly, Rational};
use erasure_ft::chain::build_chain;
use erasure_ft::circuits::CircuitConfig;
use erasure_ft::classes::build_classes;
use erasure_ft::montecarlo::compare;
use erasure_ft::threshold::{
    concat_projection, default_tolerance, reference_ideal_series, reference_lossy_series,
    solve_break_even, MeasurementRecursion, PolyRecursion, REFERENCE_IDEAL_THRESHOLD,
    REFERENCE_LOSSY_THRESHOLD, REFERENCE_MEASUREMENT_THRESHOLD,
};
use erasure_ft::{
    BreakEvenCondition, ClassOptions, Correctability, ErasurePattern, ErrorModel, ModelParams,
    Procedure, Recursion, Site, StepChoice, StepKind, ThresholdResult, TransitionMatrix,
};
use num_traits::Zero;
use serde_json::{json, Value};

use crate::config::{config_hash, load_config};
use crate::error::{exact, CliError, Result};
use crate::formats::{
    chain_json, class_table_csv, class_table_json, decimal, mc_csv, parse_grid, parse_number,
    poly_to_json, sig_figs, sweep_csv, McRow, SweepRow,
};
use crate::manifest::RunManifest;
use crate::parallel::simulate_parallel;

#[derive(Debug, Parser)]
#[command(
    name = "erasure-ft",
    version,
    about = "Erasure thresholds for the 7-qubit code"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Circuit fault-inventory JSON file.
    #[arg(long, global = true, value_name = "PATH")]
    pub circuit_config: Option<PathBuf>,
    /// Output format (default JSON; sweep and mc default to CSV).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output here (plus a `.manifest.json` sidecar) instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Ideal,
    Lossy,
    Measurement,
}

impl ModelArg {
    fn name(self) -> &'static str {
        match self {
            ModelArg::Ideal => "ideal",
            ModelArg::Lossy => "lossy",
            ModelArg::Measurement => "measurement",
        }
    }

    fn erasure_model(self) -> Result<ErrorModel> {
        match self {
            ModelArg::Ideal => Ok(ErrorModel::Ideal),
            ModelArg::Lossy => Ok(ErrorModel::Lossy),
            ModelArg::Measurement => Err(CliError::Usage(
                "this command needs --model ideal or --model lossy".into(),
            )),
        }
    }

    fn condition(self) -> BreakEvenCondition {
        match self {
            ModelArg::Ideal => BreakEvenCondition::IdealGate,
            ModelArg::Lossy => BreakEvenCondition::LossyGate,
            ModelArg::Measurement => BreakEvenCondition::Measurement,
        }
    }
}

/// Where the level-1 map comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Fixture {
    /// Solve the correction chain exactly.
    #[default]
    FullChain,
    /// Reference ideal-model series through sixth order.
    ReferenceIdeal,
    /// Reference lossy-model series through sixth order.
    ReferenceLossy,
}

impl Fixture {
    fn name(self) -> &'static str {
        match self {
            Fixture::FullChain => "full-chain",
            Fixture::ReferenceIdeal => "reference-ideal",
            Fixture::ReferenceLossy => "reference-lossy",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weight, correctability and class of one erasure pattern.
    Classify {
        /// Seven characters over `.MZE`.
        pattern: String,
        #[arg(long, value_enum)]
        model: Option<ModelArg>,
    },
    /// Equivalence classes of erasure patterns.
    Classes {
        #[arg(long, value_enum)]
        model: ModelArg,
        /// Keep every pattern in its own class.
        #[arg(long)]
        unreduced: bool,
        /// List the member patterns of every class.
        #[arg(long)]
        members: bool,
    },
    /// Export the class transition matrix.
    Chain {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long)]
        unreduced: bool,
    },
    /// Encoded failure rate as a series in ε.
    Series {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long, default_value_t = 6)]
        order: u32,
        #[arg(long, value_enum, default_value_t)]
        fixture: Fixture,
        /// Lossy model: keep ε and δ separate instead of setting δ = ε.
        #[arg(long)]
        bivariate: bool,
    },
    /// Break-even threshold by exact bisection.
    Threshold {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long, value_enum, default_value_t)]
        fixture: Fixture,
        #[arg(long, value_name = "RATIONAL")]
        tol: Option<String>,
        /// Search interval `lo,hi`.
        #[arg(long, value_name = "LO,HI")]
        bracket: Option<String>,
    },
    /// Exact encoded failure on an ε grid with a Monte Carlo overlay.
    Sweep {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long, value_name = "GRID")]
        eps: String,
        /// Monte Carlo trials per point; 0 skips the overlay.
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Monte Carlo estimates compared against the exact chain.
    Mc {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long, value_name = "GRID")]
        eps: String,
        /// Lossy model only: one value, or a grid as long as `--eps`.
        /// Defaults to δ = ε.
        #[arg(long, value_name = "GRID")]
        delta: Option<String>,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Rates after repeated concatenation.
    Concat {
        #[arg(long, value_enum)]
        model: ModelArg,
        /// Level-0 rate (δ for the measurement model).
        #[arg(long, value_name = "RATIONAL")]
        eps: String,
        #[arg(long, default_value_t = 3)]
        levels: u32,
        #[arg(long, value_enum, default_value_t)]
        fixture: Fixture,
    },
}

pub const MAX_SERIES_ORDER: u32 = 7;
pub const MAX_LEVELS: u32 = 10;

/// Rendered output and its manifest.
#[derive(Debug, Clone)]
pub struct Output {
    pub body: String,
    pub manifest: RunManifest,
}

pub struct Session {
    pub config: CircuitConfig,
    pub config_hash: String,
}

impl Session {
    pub fn new(config: CircuitConfig) -> Self {
        let config_hash = config_hash(&config);
        Self {
            config,
            config_hash,
        }
    }

    pub fn from_args(global: &GlobalArgs) -> Result<Self> {
        let config = match &global.circuit_config {
            Some(path) => load_config(path)?,
            None => CircuitConfig::default(),
        };
        Ok(Self::new(config))
    }

    pub fn procedure(&self, model: ErrorModel) -> Result<Procedure> {
        Ok(Procedure::new(model, self.config.clone())?)
    }

    pub fn options(&self, proc: &Procedure, unreduced: bool) -> ClassOptions {
        if unreduced {
            ClassOptions::unreduced()
        } else {
            ClassOptions::reduced(proc.code())
        }
    }

    pub fn chain(&self, model: ErrorModel, unreduced: bool) -> Result<TransitionMatrix> {
        let proc = self.procedure(model)?;
        Ok(build_chain(&proc, &self.options(&proc, unreduced))?)
    }

    fn manifest(&self, command: &str, model: &str) -> RunManifest {
        RunManifest::new(command, model, &self.config_hash)
    }
}

pub fn run(cli: &Cli) -> Result<Output> {
    let session = Session::from_args(&cli.global)?;
    let format = cli.global.format;
    match &cli.command {
        Command::Classify { pattern, model } => classify(&session, pattern, *model),
        Command::Classes {
            model,
            unreduced,
            members,
        } => classes(&session, *model, *unreduced, *members, format),
        Command::Chain { model, unreduced } => chain(&session, *model, *unreduced),
        Command::Series {
            model,
            order,
            fixture,
            bivariate,
        } => series(&session, *model, *order, *fixture, *bivariate, format),
        Command::Threshold {
            model,
            fixture,
            tol,
            bracket,
        } => threshold(
            &session,
            *model,
            *fixture,
            tol.as_deref(),
            bracket.as_deref(),
        ),
        Command::Sweep {
            model,
            eps,
            trials,
            seed,
        } => sweep(&session, *model, eps, *trials, *seed, format),
        Command::Mc {
            model,
            eps,
            delta,
            trials,
            seed,
        } => mc(
            &session,
            *model,
            eps,
            delta.as_deref(),
            *trials,
            *seed,
            format,
        ),
        Command::Concat {
            model,
            eps,
            levels,
            fixture,
        } => concat(&session, *model, eps, *levels, *fixture, format),
    }
}

fn json_output(mut value: Value, manifest: RunManifest) -> Output {
    value["manifest"] = serde_json::to_value(&manifest).expect("manifest serializes");
    Output {
        body: serde_json::to_string_pretty(&value).expect("json serializes") + "\n",
        manifest,
    }
}

fn infer_model(p: &ErasurePattern, given: Option<ModelArg>) -> Result<ErrorModel> {
    let has_m = p.count(Site::ZMeasured) > 0;
    let has_lossy = p.count(Site::ZErased) + p.count(Site::FullyErased) > 0;
    let model = match given {
        Some(m) => m.erasure_model()?,
        None if has_lossy => ErrorModel::Lossy,
        None => ErrorModel::Ideal,
    };
    if (has_m && model == ErrorModel::Lossy) || (has_lossy && model == ErrorModel::Ideal) {
        return Err(CliError::Usage(format!(
            "pattern {p} is not a {} pattern",
            model.name()
        )));
    }
    Ok(model)
}

pub fn classify(session: &Session, pattern: &str, model: Option<ModelArg>) -> Result<Output> {
    let p: ErasurePattern = pattern.parse()?;
    let model = infer_model(&p, model)?;
    let proc = session.procedure(model)?;
    let table = build_classes(&proc, &session.options(&proc, false));
    let step = match proc.select_step(&p) {
        StepChoice::Done => json!("done"),
        StepChoice::Abort => json!("abort"),
        StepChoice::Correct(s) => json!({
            "kind": match s.kind {
                StepKind::FullErasureToZ => "full-erasure-to-z",
                StepKind::ZRecovery => "z-recovery",
            },
            "target": s.target,
            "helpers": s.helpers,
        }),
    };
    let correctability = match proc.classify(&p) {
        Correctability::Correctable => "correctable",
        Correctability::ProcedureFail => "procedure-fail",
    };
    let class = &table.classes()[table.class_of(&p)];
    let value = json!({
        "pattern": p.to_string(),
        "model": model.name(),
        "weight": p.weight(),
        "composition": p.composition().label(),
        "correctability": correctability,
        "step": step,
        "class": { "id": class.id, "label": class.label },
    });
    Ok(json_output(
        value,
        session
            .manifest("classify", model.name())
            .param("pattern", p),
    ))
}

pub fn classes(
    session: &Session,
    model: ModelArg,
    unreduced: bool,
    members: bool,
    format: Option<Format>,
) -> Result<Output> {
    let m = model.erasure_model()?;
    let proc = session.procedure(m)?;
    let table = build_classes(&proc, &session.options(&proc, unreduced));
    table.verify(&proc)?;
    let manifest = session
        .manifest("classes", m.name())
        .param("unreduced", unreduced);
    Ok(match format.unwrap_or(Format::Json) {
        Format::Csv => Output {
            body: class_table_csv(&table),
            manifest,
        },
        Format::Json => {
            let v = serde_json::to_value(class_table_json(&table, !unreduced, members)).unwrap();
            json_output(v, manifest)
        }
    })
}

pub fn chain(session: &Session, model: ModelArg, unreduced: bool) -> Result<Output> {
    let m = model.erasure_model()?;
    let c = session.chain(m, unreduced)?;
    let v = serde_json::to_value(chain_json(&c)).unwrap();
    Ok(json_output(
        v,
        session
            .manifest("chain", m.name())
            .param("unreduced", unreduced),
    ))
}

fn reference_series(model: ErrorModel) -> Poly {
    match model {
        ErrorModel::Ideal => reference_ideal_series(),
        ErrorModel::Lossy => reference_lossy_series(),
    }
}

fn fixture_poly(fixture: Fixture) -> Option<Poly> {
    match fixture {
        Fixture::FullChain => None,
        Fixture::ReferenceIdeal => Some(reference_ideal_series()),
        Fixture::ReferenceLossy => Some(reference_lossy_series()),
    }
}

pub fn series(
    session: &Session,
    model: ModelArg,
    order: u32,
    fixture: Fixture,
    bivariate: bool,
    format: Option<Format>,
) -> Result<Output> {
    let m = model.erasure_model()?;
    if order > MAX_SERIES_ORDER {
        return Err(CliError::Usage(format!(
            "--order must be at most {MAX_SERIES_ORDER}"
        )));
    }
    let poly = match fixture_poly(fixture) {
        Some(p) => p.truncate(order),
        None => {
            let c = session.chain(m, false)?;
            if bivariate {
                c.encoded_failure_series(order)
            } else {
                c.recursion_series(order)
            }
        }
    };
    let reference = reference_series(m);
    let rows: Vec<Value> = (0..=order)
        .map(|k| {
            let computed = if bivariate {
                Rational::zero()
            } else {
                poly.coeff(k, 0)
            };
            let r = reference.coeff(k, 0);
            let mut row =
                json!({ "degree": k, "exact": exact(&computed), "value": to_f64(&computed) });
            if (3..=6).contains(&k) {
                row["reference"] = json!(to_f64(&r));
                row["deviation"] = json!(to_f64(&(&computed - &r)));
                if !r.is_zero() {
                    row["relative_deviation"] = json!(to_f64(&((&computed - &r) / &r)));
                }
            }
            row
        })
        .collect();
    let manifest = session
        .manifest("series", m.name())
        .param("order", order)
        .param("fixture", fixture.name())
        .param("bivariate", bivariate);
    if format == Some(Format::Csv) {
        let mut body = String::from("degree,exact,value,reference,deviation\n");
        for r in &rows {
            let get = |k: &str| r.get(k).map(|v| v.to_string()).unwrap_or_default();
            body += &format!(
                "{},{},{},{},{}\n",
                r["degree"],
                r["exact"].as_str().unwrap(),
                get("value"),
                get("reference"),
                get("deviation")
            );
        }
        return Ok(Output { body, manifest });
    }
    let value = json!({
        "model": m.name(),
        "order": order,
        "fixture": fixture.name(),
        "variables": if bivariate { "eps,delta" } else { "eps (delta = eps for lossy)" },
        "series": poly_to_json(&poly),
        "text": poly.to_string(),
        "coefficients": if bivariate { Value::Null } else { Value::Array(rows) },
    });
    Ok(json_output(value, manifest))
}

fn parse_bracket(s: &str) -> Result<(Rational, Rational)> {
    let (lo, hi) = s
        .split_once(',')
        .ok_or_else(|| CliError::Usage(format!("--bracket expects lo,hi, got {s:?}")))?;
    Ok((parse_number(lo)?, parse_number(hi)?))
}

fn default_bracket(model: ModelArg, fixture: Fixture) -> (Rational, Rational) {
    let r = |n: i64, d: i64| Rational::new(n.into(), d.into());
    match (model, fixture) {
        (ModelArg::Measurement, _) => (r(1, 10), r(2, 5)),
        (_, Fixture::ReferenceLossy) => (r(1, 1000), r(1, 20)),
        (_, Fixture::ReferenceIdeal) | (ModelArg::Ideal, _) => (r(1, 1000), r(1, 5)),
        (ModelArg::Lossy, Fixture::FullChain) => (r(1, 1000), r(1, 4)),
    }
}

fn reference_threshold(model: ModelArg) -> f64 {
    match model {
        ModelArg::Ideal => REFERENCE_IDEAL_THRESHOLD,
        ModelArg::Lossy => REFERENCE_LOSSY_THRESHOLD,
        ModelArg::Measurement => REFERENCE_MEASUREMENT_THRESHOLD,
    }
}

/// Absolute difference below which the computed root counts as matching the
/// reference figure.
pub const REFERENCE_MATCH: f64 = 5e-4;

fn recursion_for(
    session: &Session,
    model: ModelArg,
    fixture: Fixture,
) -> Result<Box<dyn Recursion>> {
    if model == ModelArg::Measurement {
        return Ok(Box::new(MeasurementRecursion));
    }
    Ok(match fixture_poly(fixture) {
        Some(poly) => Box::new(PolyRecursion {
            poly,
            name: fixture.name().into(),
        }),
        None => Box::new(session.chain(model.erasure_model()?, false)?),
    })
}

fn result_json(r: &ThresholdResult) -> Value {
    let root = to_f64(&r.root);
    json!({
        "condition": r.condition.name(),
        "root": root,
        "root_4sf": sig_figs(root, 4),
        "root_exact": exact(&r.root),
        "bracket": [to_f64(&r.lo), to_f64(&r.hi)],
        "bracket_exact": [exact(&r.lo), exact(&r.hi)],
        "iterations": r.iterations,
    })
}

pub fn measurement_threshold(tol: &Rational) -> Result<ThresholdResult> {
    let (lo, hi) = default_bracket(ModelArg::Measurement, Fixture::FullChain);
    Ok(solve_break_even(
        &MeasurementRecursion,
        BreakEvenCondition::Measurement,
        &lo,
        &hi,
        tol,
    )?)
}

pub fn threshold(
    session: &Session,
    model: ModelArg,
    fixture: Fixture,
    tol: Option<&str>,
    bracket: Option<&str>,
) -> Result<Output> {
    let tol = match tol {
        Some(t) => parse_number(t)?,
        None => default_tolerance(),
    };
    let (lo, hi) = match bracket {
        Some(b) => parse_bracket(b)?,
        None => default_bracket(model, fixture),
    };
    let rec = recursion_for(session, model, fixture)?;
    let condition = model.condition();
    let result = solve_break_even(rec.as_ref(), condition, &lo, &hi, &tol)?;
    let root = to_f64(&result.root);
    let reference = reference_threshold(model);
    let matches = (root - reference).abs() <= REFERENCE_MATCH;
    let mut value = result_json(&result);
    value["model"] = json!(model.name());
    value["recursion"] = json!(rec.provenance());
    value["fixture"] = json!(if model == ModelArg::Measurement {
        "binomial-tail"
    } else {
        fixture.name()
    });
    value["tol"] = json!(exact(&tol));
    value["search_bracket"] = json!([exact(&lo), exact(&hi)]);
    value["circuit_config_hash"] = json!(session.config_hash);
    value["reference"] = json!({
        "value": reference,
        "deviation": root - reference,
        "relative_deviation": (root - reference) / reference,
        "matches": matches,
    });
    if !matches {
        value["reference"]["flag"] = json!(format!(
            "computed root {} differs from the reference value {reference}",
            sig_figs(root, 4)
        ));
    }
    if model == ModelArg::Measurement {
        let at_quarter = to_f64(&MeasurementRecursion.eval(&Rational::new(1.into(), 4.into())));
        value["recursion_at_0.25"] = json!(at_quarter);
    }
    if model == ModelArg::Lossy {
        let m = measurement_threshold(&tol)?;
        let mroot = to_f64(&m.root);
        value["measurement_root"] = json!(mroot);
        value["below_measurement_threshold"] = json!(result.hi < m.lo);
    }
    let manifest = session
        .manifest("threshold", model.name())
        .param("fixture", fixture.name())
        .param("tol", exact(&tol))
        .param("bracket", format!("{},{}", exact(&lo), exact(&hi)));
    Ok(json_output(value, manifest))
}

pub fn sweep(
    session: &Session,
    model: ModelArg,
    eps: &str,
    trials: u64,
    seed: u64,
    format: Option<Format>,
) -> Result<Output> {
    let m = model.erasure_model()?;
    let grid = parse_grid(eps)?;
    let c = session.chain(m, false)?;
    let proc = session.procedure(m)?;
    let rows: Vec<SweepRow> = grid
        .iter()
        .map(|x| {
            let exact = to_f64(&c.encoded_failure_at(x));
            let (mean, stderr) = if trials > 0 {
                let xf = to_f64(x);
                let d = if m == ErrorModel::Lossy { xf } else { 0.0 };
                let e = simulate_parallel(&proc, xf, d, trials, seed);
                (Some(e.mean), Some(e.stderr))
            } else {
                (None, None)
            };
            SweepRow {
                eps: decimal(x),
                encoded_failure_exact: exact,
                mc_mean: mean,
                mc_stderr: stderr,
            }
        })
        .collect();
    let manifest = session
        .manifest("sweep", m.name())
        .param("eps", eps)
        .param("trials", trials)
        .param("seed", seed);
    Ok(match format.unwrap_or(Format::Csv) {
        Format::Csv => Output {
            body: sweep_csv(&rows),
            manifest,
        },
        Format::Json => json_output(json!({ "rows": rows }), manifest),
    })
}

pub fn mc(
    session: &Session,
    model: ModelArg,
    eps: &str,
    delta: Option<&str>,
    trials: u64,
    seed: u64,
    format: Option<Format>,
) -> Result<Output> {
    let m = model.erasure_model()?;
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let eps_grid = parse_grid(eps)?;
    let delta_grid: Vec<Rational> = match (m, delta) {
        (ErrorModel::Ideal, Some(_)) => {
            return Err(CliError::Usage(
                "--delta applies to the lossy model only".into(),
            ))
        }
        (ErrorModel::Ideal, None) => vec![Rational::zero(); eps_grid.len()],
        (ErrorModel::Lossy, None) => eps_grid.clone(),
        (ErrorModel::Lossy, Some(d)) => {
            let d = parse_grid(d)?;
            match d.len() {
                1 => vec![d[0].clone(); eps_grid.len()],
                n if n == eps_grid.len() => d,
                _ => {
                    return Err(CliError::Usage(
                        "--delta must be one value or as long as --eps".into(),
                    ))
                }
            }
        }
    };
    let c = session.chain(m, false)?;
    let proc = session.procedure(m)?;
    let rows: Vec<McRow> = eps_grid
        .iter()
        .zip(&delta_grid)
        .map(|(e, d)| {
            let params = ModelParams {
                model: m,
                eps: e.clone(),
                delta: d.clone(),
            };
            let exact = c.run_to_absorption(&params, None).encoded_failure;
            let est = simulate_parallel(&proc, to_f64(e), to_f64(d), trials, seed);
            let z = compare(&exact, &est).ok().map(|cmp| cmp.z);
            McRow {
                eps: decimal(e),
                delta: decimal(d),
                trials,
                mean: est.mean,
                stderr: est.stderr,
                exact: to_f64(&exact),
                z_vs_exact: z,
            }
        })
        .collect();
    let manifest = session
        .manifest("mc", m.name())
        .param("eps", eps)
        .param("delta", delta.unwrap_or("eps"))
        .param("trials", trials)
        .param("seed", seed);
    Ok(match format.unwrap_or(Format::Csv) {
        Format::Csv => Output {
            body: mc_csv(&rows),
            manifest,
        },
        Format::Json => json_output(json!({ "rows": rows }), manifest),
    })
}

pub fn concat(
    session: &Session,
    model: ModelArg,
    eps: &str,
    levels: u32,
    fixture: Fixture,
    format: Option<Format>,
) -> Result<Output> {
    if levels > MAX_LEVELS {
        return Err(CliError::Usage(format!(
            "--levels must be at most {MAX_LEVELS}"
        )));
    }
    let x0 = parse_number(eps)?;
    if x0 < Rational::zero() || x0 > Rational::new(1.into(), 1.into()) {
        return Err(CliError::Usage("--eps must lie in [0, 1]".into()));
    }
    let rec = recursion_for(session, model, fixture)?;
    let rates = concat_projection(rec.as_ref(), model.condition(), &x0, levels);
    let manifest = session
        .manifest("concat", model.name())
        .param("eps", eps)
        .param("levels", levels)
        .param("fixture", fixture.name());
    if format == Some(Format::Csv) {
        let mut body = String::from("level,rate\n");
        for (k, r) in rates.iter().enumerate() {
            body += &format!("{},{}\n", k + 1, to_f64(r));
        }
        return Ok(Output { body, manifest });
    }
    let rows: Vec<Value> = rates
        .iter()
        .enumerate()
        .map(|(k, r)| json!({ "level": k + 1, "rate": to_f64(r) }))
        .collect();
    let value = json!({
        "model": model.name(),
        "recursion": rec.provenance(),
        "eps0": to_f64(&x0),
        "condition": model.condition().name(),
        "levels": rows,
    });
    Ok(json_output(value, manifest))
}
