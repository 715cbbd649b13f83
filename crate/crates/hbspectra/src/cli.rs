//! Command-line front end.
//!
//! Subcommands: `validate`, `build`, `spectrum`, `si`, `model`, `transfer`,
//! `simulate`. Exit codes: 0 success, 1 validation failure, 2 property
//! falsified (a negative eigenvalue or a failed cross-check), 3 I/O or
//! parse failure. With `--json` every command emits a `RunReport` document
//! (schema `hbspectra/1`); reports are byte-deterministic for identical
//! inputs apart from the trailing timing field.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::heatbath::{build_chain, validate_spec, HeatBathSpec};
use crate::matrix::{
    read_matrix_csv, write_matrix_csv, RatMatrix, StateSpace, StochasticMatrix,
    TargetDistribution,
};
use crate::models::{
    build_contingency_chain, build_swendsen_wang, direct_swendsen_wang, ContingencyInstance,
    EnumerationCaps, Graph, SpinSystem,
};
use crate::rat::{format_rational, parse_rational, Rat};
use crate::sicanon;
use crate::simulate;
use crate::spectral;
use crate::transfer::{self, TripleBundle};
use crate::{Error, Result};

const SCHEMA: &str = "hbspectra/1";

#[derive(Parser)]
#[command(name = "hbspectra", version, about = "Heat-bath chain construction and spectral certification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a heat-bath spec against the partition axioms.
    Validate {
        /// Heat-bath spec JSON file.
        spec: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Assemble the transition matrix of a heat-bath spec.
    Build {
        spec: PathBuf,
        /// Write the matrix CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Eigenvalues, positive semidefiniteness, and the mixing-time bound.
    Spectrum {
        /// Heat-bath spec JSON or matrix CSV.
        input: PathBuf,
        /// Target distribution CSV (one data row) for matrix inputs;
        /// defaults to uniform.
        #[arg(long)]
        pi: Option<PathBuf>,
        /// Accuracy for the mixing-time bound.
        #[arg(long)]
        eps: Option<f64>,
        /// Tolerance for the PSD verdict.
        #[arg(long, default_value_t = spectral::DEFAULT_PSD_TOLERANCE)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Stochastic-idempotent classification and canonical decomposition.
    Si {
        #[command(subcommand)]
        action: SiAction,
    },
    /// Build one of the model chains.
    Model {
        #[command(subcommand)]
        which: ModelCommand,
    },
    /// Verify a lifted triple and compose R T R*.
    Transfer {
        /// Triple bundle JSON referencing the R and T matrix CSVs.
        bundle: PathBuf,
        /// Write the composed matrix CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Run a seeded trajectory.
    Simulate {
        spec: PathBuf,
        #[arg(long)]
        steps: usize,
        /// Seed for the deterministic generator; required, there is no
        /// silent default randomness.
        #[arg(long)]
        seed: u64,
        /// Start state label; defaults to the first state.
        #[arg(long)]
        start: Option<String>,
        /// Write the trajectory CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum SiAction {
    /// Classify a matrix CSV: stochastic? idempotent? zero columns, rank.
    Classify {
        matrix: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Canonical block decomposition of an SI matrix CSV.
    Decompose {
        matrix: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct CouplingArg {
    /// Edge weight w (rational, the exponential of the inverse
    /// temperature); keeps everything exact.
    #[arg(long)]
    w: Option<String>,
    /// Inverse temperature as a float; w = exp(beta) is then approximated
    /// by a rational and exactness is lost.
    #[arg(long)]
    beta: Option<f64>,
}

#[derive(Subcommand)]
enum ModelCommand {
    /// q-state Potts single-site chain.
    Potts {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        q: usize,
        #[command(flatten)]
        coupling: CouplingArg,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Ising single-site chain (Potts with q = 2).
    Ising {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        coupling: CouplingArg,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Proper q-colorings single-site chain.
    Coloring {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// 2x2-subsquare contingency-table chain.
    Contingency {
        /// Row sums, comma separated.
        #[arg(long, value_delimiter = ',')]
        rows: Vec<u64>,
        /// Column sums, comma separated.
        #[arg(long, value_delimiter = ',')]
        cols: Vec<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Swendsen-Wang via the lifted composition.
    Sw {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        q: usize,
        #[command(flatten)]
        coupling: CouplingArg,
        /// Directory for bundle.json, R.csv, T.csv, P.csv.
        #[arg(long)]
        outdir: Option<PathBuf>,
        /// Cross-check the composition against direct summation.
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Serialize)]
struct RunReport {
    schema: &'static str,
    command: String,
    inputs: Value,
    result: Value,
    timing_ms: u128,
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Io(_) | Error::Json(_) | Error::Parse(_) => 3,
        Error::Falsified(_) => 2,
        _ => 1,
    }
}

/// Parses argv, runs the command, prints its report, returns the exit code.
pub fn run_from_args() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return code;
        }
    };
    let started = Instant::now();
    match dispatch(cli.command, started) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}

fn emit(json: bool, command: &str, inputs: Value, result: Value, human: &str, started: Instant) {
    if json {
        let report = RunReport {
            schema: SCHEMA,
            command: command.to_string(),
            inputs,
            result,
            timing_ms: started.elapsed().as_millis(),
        };
        println!("{}", serde_json::to_string_pretty(&report).expect("report serialization"));
    } else if !human.is_empty() {
        println!("{human}");
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

fn write_output(path: Option<&PathBuf>, content: &str, json_mode: bool) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, content)?,
        None if !json_mode => print!("{content}"),
        None => {}
    }
    Ok(())
}

fn load_spec(path: &Path) -> Result<HeatBathSpec> {
    HeatBathSpec::from_json_str(&read_to_string(path)?)
}

fn resolve_w(coupling: &CouplingArg) -> Result<Rat> {
    match (&coupling.w, coupling.beta) {
        (Some(_), Some(_)) => {
            Err(Error::InvalidInput("give either --w or --beta, not both".into()))
        }
        (Some(w), None) => parse_rational(w),
        (None, Some(beta)) => {
            let w = beta.exp();
            let denom: i64 = 1_000_000_000;
            let numer = (w * denom as f64).round() as i64;
            eprintln!(
                "warning: --beta is a float convenience; using w ~= {numer}/{denom}, exactness is lost"
            );
            Ok(crate::rat::rat(numer, denom))
        }
        (None, None) => Err(Error::InvalidInput("a coupling is required: --w or --beta".into())),
    }
}

fn spectral_to_value(report: &spectral::SpectralReport) -> Value {
    serde_json::to_value(report).expect("spectral report serialization")
}

fn spectral_human(report: &spectral::SpectralReport) -> String {
    let eigenvalues: Vec<String> =
        report.eigenvalues.iter().map(|l| format!("{l:.12}")).collect();
    let mut out = format!(
        "eigenvalues: [{}]\nlambda_1 = {}, lambda_min = {:.12}, lambda_star = {:.12}\npsd: {} (tolerance {:.0e}{})\nergodic: {}",
        eigenvalues.join(", "),
        report.lambda_1.map_or("n/a".to_string(), |l| format!("{l:.12}")),
        report.lambda_min,
        report.lambda_star,
        report.psd,
        report.tolerance,
        if report.exact_binary_spectrum { ", exact binary-spectrum certificate" } else { "" },
        report.is_ergodic,
    );
    if let Some(b) = &report.mixing_bound {
        out.push_str(&format!("\nmixing bound: tau({}) <= {:.4}", b.epsilon, b.tau_upper));
    }
    out
}

fn dispatch(command: Command, started: Instant) -> Result<i32> {
    match command {
        Command::Validate { spec, json } => {
            let parsed = load_spec(&spec)?;
            let report = validate_spec(&parsed);
            let violations: Vec<String> =
                report.violations.iter().map(|v| v.to_string()).collect();
            let result = json!({
                "valid": report.is_valid(),
                "violations": violations,
                "blocks_consistent": report.blocks_consistent,
            });
            let human = if report.is_valid() {
                format!("valid: {} states, {} labels", parsed.space().len(), parsed.labels().len())
            } else {
                report.render()
            };
            emit(json, "validate", json!({ "spec": spec }), result, &human, started);
            Ok(if report.is_valid() { 0 } else { 1 })
        }

        Command::Build { spec, out, json } => {
            let parsed = load_spec(&spec)?;
            let p = build_chain(&parsed)?;
            let csv = write_matrix_csv(p.space().labels(), p.matrix())?;
            write_output(out.as_ref(), &csv, json)?;
            let result = json!({
                "states": p.n(),
                "labels": parsed.labels().len(),
                "out": out,
            });
            emit(json, "build", json!({ "spec": spec }), result, "", started);
            Ok(0)
        }

        Command::Spectrum { input, pi, eps, tol, json } => {
            let (p, target) = load_chain_and_target(&input, pi.as_ref())?;
            let mut report = spectral::certify_psd(&p, &target, tol)?;
            let mut refusal = None;
            if let Some(eps) = eps {
                match spectral::attach_mixing_bound(&mut report, &target, eps) {
                    Ok(()) => {}
                    Err(Error::MixingBound(reason)) => refusal = Some(reason),
                    Err(e) => return Err(e),
                }
            }
            let mut result = spectral_to_value(&report);
            if let Some(reason) = &refusal {
                result["mixing_bound_refused"] = json!(reason);
            }
            let mut human = spectral_human(&report);
            if let Some(reason) = refusal {
                human.push_str(&format!("\nmixing bound refused: {reason}"));
            }
            emit(
                json,
                "spectrum",
                json!({ "input": input, "pi": pi, "eps": eps, "tol": tol }),
                result,
                &human,
                started,
            );
            Ok(if report.psd { 0 } else { 2 })
        }

        Command::Si { action } => match action {
            SiAction::Classify { matrix, json } => {
                let (_, m) = read_matrix_csv(&read_to_string(&matrix)?)?;
                let class = sicanon::si_classify(&m)?;
                let (result, human) = match class {
                    sicanon::SiClass::NotStochastic => {
                        (json!({"class": "not_stochastic"}), "not stochastic".to_string())
                    }
                    sicanon::SiClass::NotIdempotent => (
                        json!({"class": "not_idempotent"}),
                        "stochastic but not idempotent".to_string(),
                    ),
                    sicanon::SiClass::Si { t, r } => (
                        json!({"class": "si", "t": t, "r": r}),
                        format!("stochastic idempotent: {t} zero columns, rank {r}"),
                    ),
                };
                emit(json, "si classify", json!({ "matrix": matrix }), result, &human, started);
                Ok(0)
            }
            SiAction::Decompose { matrix, json } => {
                let (_, m) = read_matrix_csv(&read_to_string(&matrix)?)?;
                let d = sicanon::si_decompose(&m)?;
                let result: Value = serde_json::from_str(&d.to_json_string())?;
                let human = format!(
                    "k = {} blocks, t = {} ephemeral states\n{}",
                    d.k,
                    d.t,
                    d.to_json_string()
                );
                emit(json, "si decompose", json!({ "matrix": matrix }), result, &human, started);
                Ok(0)
            }
        },

        Command::Model { which } => run_model(which, started),

        Command::Transfer { bundle, out, json } => {
            let text = read_to_string(&bundle)?;
            let doc: TripleBundle = serde_json::from_str(&text)?;
            let dir = bundle.parent().map(Path::to_path_buf).unwrap_or_default();
            let (r, t, pi, mu) = load_triple(&doc, &dir)?;
            let report = transfer::verify_transfer_conditions(&r, &t, &pi, &mu)?;
            let conditions = serde_json::to_value(&report).expect("condition report");
            if !report.all_pass() {
                let human = format!("conditions failed:\n- {}", report.failures().join("\n- "));
                emit(
                    json,
                    "transfer",
                    json!({ "bundle": bundle }),
                    json!({ "conditions": conditions, "composed": false }),
                    &human,
                    started,
                );
                return Ok(1);
            }
            let p = transfer::compose_transfer(&r, &t, &pi, &mu)?;
            let csv = write_matrix_csv(p.space().labels(), p.matrix())?;
            if let Some(out) = &out {
                std::fs::write(out, &csv)?;
            }
            let spectrum = spectral::certify_psd(&p, &pi, spectral::DEFAULT_PSD_TOLERANCE)?;
            let result = json!({
                "conditions": conditions,
                "composed": true,
                "states": p.n(),
                "spectral": spectral_to_value(&spectrum),
                "out": out,
            });
            let human = format!(
                "all conditions pass; composed {} x {} chain\n{}",
                p.n(),
                p.n(),
                spectral_human(&spectrum)
            );
            emit(json, "transfer", json!({ "bundle": bundle }), result, &human, started);
            Ok(0)
        }

        Command::Simulate { spec, steps, seed, start, out, json } => {
            let parsed = load_spec(&spec)?;
            let start_index = match &start {
                Some(label) => parsed
                    .space()
                    .index_of(label)
                    .ok_or_else(|| Error::InvalidInput(format!("unknown state `{label}`")))?,
                None => 0,
            };
            let config = simulate::TrajectoryConfig {
                seed,
                steps,
                start: simulate::Start::State(start_index),
            };
            let trajectory = simulate::run_trajectory(&parsed, &config)?;
            let csv = simulate::trajectory_csv(parsed.space(), &trajectory);
            write_output(out.as_ref(), &csv, json)?;
            let labels: Vec<&str> =
                trajectory.iter().map(|&x| parsed.space().label(x)).collect();
            let result = json!({
                "steps": steps,
                "seed": seed,
                "start": labels.first(),
                "end": labels.last(),
                "trajectory": labels,
                "out": out,
            });
            emit(json, "simulate", json!({ "spec": spec }), result, "", started);
            Ok(0)
        }
    }
}

fn spec_output(
    command: &str,
    inputs: Value,
    spec: &HeatBathSpec,
    out: Option<&PathBuf>,
    json: bool,
    started: Instant,
) -> Result<i32> {
    let text = spec.to_json_string();
    match out {
        Some(p) => std::fs::write(p, &text)?,
        None if !json => println!("{text}"),
        None => {}
    }
    let result = json!({
        "states": spec.space().len(),
        "labels": spec.labels().len(),
        "out": out,
    });
    emit(json, command, inputs, result, "", started);
    Ok(0)
}

fn run_model(which: ModelCommand, started: Instant) -> Result<i32> {
    let caps = EnumerationCaps::from_env();
    match which {
        ModelCommand::Potts { graph, q, coupling, out, json } => {
            let g = Graph::parse(&read_to_string(&graph)?)?;
            let w = resolve_w(&coupling)?;
            let sys = SpinSystem::potts(g, q, w.clone())?;
            let spec = crate::models::build_spin_heatbath(&sys, &caps)?;
            let inputs = json!({ "graph": graph, "q": q, "w": format_rational(&w) });
            spec_output("model potts", inputs, &spec, out.as_ref(), json, started)
        }
        ModelCommand::Ising { graph, coupling, out, json } => {
            let g = Graph::parse(&read_to_string(&graph)?)?;
            let w = resolve_w(&coupling)?;
            let sys = SpinSystem::ising(g, w.clone())?;
            let spec = crate::models::build_spin_heatbath(&sys, &caps)?;
            let inputs = json!({ "graph": graph, "w": format_rational(&w) });
            spec_output("model ising", inputs, &spec, out.as_ref(), json, started)
        }
        ModelCommand::Coloring { graph, q, out, json } => {
            let g = Graph::parse(&read_to_string(&graph)?)?;
            let sys = SpinSystem::proper_colorings(g, q)?;
            let spec = crate::models::build_spin_heatbath(&sys, &caps)?;
            let inputs = json!({ "graph": graph, "q": q });
            spec_output("model coloring", inputs, &spec, out.as_ref(), json, started)
        }
        ModelCommand::Contingency { rows, cols, out, json } => {
            let inst = ContingencyInstance::new(rows.clone(), cols.clone())?;
            let spec = build_contingency_chain(&inst, &caps)?;
            let inputs = json!({ "rows": rows, "cols": cols });
            spec_output("model contingency", inputs, &spec, out.as_ref(), json, started)
        }
        ModelCommand::Sw { graph, q, coupling, outdir, verify, json } => {
            let g = Graph::parse(&read_to_string(&graph)?)?;
            let w = resolve_w(&coupling)?;
            let sw = build_swendsen_wang(&g, q, &w, &caps)?;

            let mut verified = Value::Null;
            if verify {
                let direct = direct_swendsen_wang(&g, q, &w, &caps)?;
                if sw.p.matrix() != direct.matrix() {
                    return Err(Error::Falsified(
                        "lifted composition differs from direct summation".into(),
                    ));
                }
                verified = json!("equal");
            }

            if let Some(dir) = &outdir {
                std::fs::create_dir_all(dir)?;
                let r_csv = write_matrix_csv(sw.mu.space().labels(), sw.r.matrix())?;
                let t_csv = write_matrix_csv(sw.mu.space().labels(), sw.t.matrix())?;
                let p_csv = write_matrix_csv(sw.pi.space().labels(), sw.p.matrix())?;
                std::fs::write(dir.join("R.csv"), r_csv)?;
                std::fs::write(dir.join("T.csv"), t_csv)?;
                std::fs::write(dir.join("P.csv"), p_csv)?;
                let bundle = TripleBundle {
                    omega: transfer::BaseSpaceDto {
                        states: sw.pi.space().labels().to_vec(),
                        pi: sw.pi.probs().iter().map(format_rational).collect(),
                    },
                    omega_prime: transfer::LiftedSpaceDto {
                        states: sw.mu.space().labels().to_vec(),
                        mu: sw.mu.probs().iter().map(format_rational).collect(),
                    },
                    r: "R.csv".into(),
                    t: "T.csv".into(),
                };
                std::fs::write(dir.join("bundle.json"), serde_json::to_string_pretty(&bundle)?)?;
            }

            let spectrum =
                spectral::certify_psd(&sw.p, &sw.pi, spectral::DEFAULT_PSD_TOLERANCE)?;
            let result = json!({
                "base_states": sw.pi.space().len(),
                "lifted_states": sw.mu.space().len(),
                "verify": verified,
                "spectral": spectral_to_value(&spectrum),
                "outdir": outdir,
            });
            let mut human = format!(
                "base states: {}, lifted states: {}\n{}",
                sw.pi.space().len(),
                sw.mu.space().len(),
                spectral_human(&spectrum)
            );
            if verify {
                human.push_str("\nRTR* = direct: equal");
            }
            let inputs = json!({ "graph": graph, "q": q, "w": format_rational(&w) });
            emit(json, "model sw", inputs, result, &human, started);
            Ok(0)
        }
    }
}

/// Loads a chain and target from either a spec JSON or a matrix CSV.
fn load_chain_and_target(
    input: &Path,
    pi: Option<&PathBuf>,
) -> Result<(StochasticMatrix, TargetDistribution)> {
    let is_json = input.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        let spec = load_spec(input)?;
        let p = build_chain(&spec)?;
        let target = spec.target()?;
        return Ok((p, target));
    }
    let (labels, m) = read_matrix_csv(&read_to_string(input)?)?;
    let space = StateSpace::new(labels)?;
    let p = StochasticMatrix::new(space.clone(), m)?;
    let target = match pi {
        Some(path) => {
            let (pi_labels, pm) = read_matrix_csv(&read_to_string(path)?)?;
            if pm.rows() != 1 {
                return Err(Error::Parse("pi CSV must contain exactly one data row".into()));
            }
            if pi_labels != space.labels() {
                return Err(Error::InvalidInput("pi CSV labels differ from the matrix's".into()));
            }
            TargetDistribution::new(space, pm.row(0).to_vec())?
        }
        None => TargetDistribution::uniform(space),
    };
    Ok((p, target))
}

fn load_triple(
    doc: &TripleBundle,
    dir: &Path,
) -> Result<(RatMatrix, RatMatrix, TargetDistribution, TargetDistribution)> {
    let omega = StateSpace::new(doc.omega.states.clone())?;
    let omega_prime = StateSpace::new(doc.omega_prime.states.clone())?;
    let pi = TargetDistribution::new(
        omega.clone(),
        doc.omega.pi.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?,
    )?;
    let mu = TargetDistribution::new(
        omega_prime.clone(),
        doc.omega_prime.mu.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?,
    )?;
    let (r_labels, r) = read_matrix_csv(&read_to_string(&dir.join(&doc.r))?)?;
    let (t_labels, t) = read_matrix_csv(&read_to_string(&dir.join(&doc.t))?)?;
    if r_labels != omega_prime.labels() || t_labels != omega_prime.labels() {
        return Err(Error::InvalidInput(
            "matrix CSV column labels differ from the bundle's lifted states".into(),
        ));
    }
    if r.rows() != omega.len() || t.rows() != omega_prime.len() {
        return Err(Error::Dimension("bundle matrices have the wrong number of rows".into()));
    }
    Ok((r, t, pi, mu))
}
