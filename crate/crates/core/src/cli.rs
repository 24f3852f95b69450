//! Command-line front end. Every subcommand prints one JSON document on
//! stdout; diagnostics go to stderr. Exit codes: 0 success, 2 input error,
//! 1 internal error.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::detection::{critical_efficiency, ConstraintMode, DEFAULT_TOL_ETA};
use crate::error::Error;
use crate::functional::{wigner_chained, wigner_literal, BellFunctional};
use crate::io;
use crate::polytope::{classify, functional_vertex_bounds, Classification, Kind, DEFAULT_TOL};
use crate::quantum::{behavior_from_state, MeasurementPlan, PureTwoQubitState};
use crate::runs::{estimate, locality_audit, randomness_audit, simulate_stream, Geometry, Tally};
use crate::scenario::{Scenario, Side};

#[derive(Debug, Parser)]
#[command(name = "bellbox", about = "Black-box Bell experiment toolkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Form {
    Literal,
    Chained,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Strict,
    Weak,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the behavior of a measured two-qubit state.
    Quantum {
        /// singlet, phi_plus, or amps:re00,im00,re01,im01,re10,im10,re11,im11
        #[arg(long)]
        state: String,
        /// Comma-separated A angles in degrees.
        #[arg(long = "angles-a", allow_hyphen_values = true)]
        angles_a: String,
        /// Comma-separated B angles in degrees.
        #[arg(long = "angles-b", allow_hyphen_values = true)]
        angles_b: String,
        /// Swap + and - on side B.
        #[arg(long = "swap-b")]
        swap_b: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate runs and write a JSON Lines run log.
    Simulate {
        #[arg(long)]
        behavior: PathBuf,
        #[arg(long)]
        runs: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long = "stream-id", default_value_t = 0)]
        stream_id: u64,
        /// L,T in meters and seconds.
        #[arg(long)]
        geometry: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate a behavior with standard errors from a run log.
    Estimate {
        #[arg(long)]
        runs: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Setting counts A,B; inferred from the log when absent.
        #[arg(long)]
        settings: Option<String>,
        #[arg(long = "tally-out")]
        tally_out: Option<PathBuf>,
    },
    /// Classify a behavior as Local, WeaklyNonlocal, or Signalling.
    Classify {
        #[arg(long)]
        behavior: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Evaluate a Wigner form and report its exact local bound.
    Inequality {
        #[arg(long)]
        behavior: PathBuf,
        #[arg(long, value_enum)]
        form: Form,
        /// k for literal; i,j,k for chained.
        #[arg(long)]
        indices: String,
    },
    /// Find the critical detection efficiency of a target behavior.
    Efficiency {
        #[arg(long)]
        target: PathBuf,
        #[arg(long, value_enum, default_value = "strict")]
        mode: Mode,
        #[arg(long = "tol-eta", default_value_t = DEFAULT_TOL_ETA)]
        tol_eta: f64,
        /// Where to write the feasible model.
        #[arg(long = "model-out")]
        model_out: Option<PathBuf>,
    },
    /// Audit a run log for the locality condition and setting randomness.
    Audit {
        #[arg(long)]
        runs: PathBuf,
        #[arg(long)]
        geometry: String,
        #[arg(long)]
        settings: Option<String>,
    },
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Input(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::Solver(_) => Failure::Internal(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Runs one command; `argv[0]` is the program name.
pub fn run_cli<I, T>(argv: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliOutput {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => CliOutput {
                    code: 2,
                    stdout: String::new(),
                    stderr: first_line(&text),
                },
            };
        }
    };
    match dispatch(cli.command) {
        Ok(v) => CliOutput {
            code: 0,
            stdout: format!("{}\n", round_numbers(v)),
            stderr: String::new(),
        },
        Err(Failure::Input(msg)) => CliOutput {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {}\n", first_line(&msg)),
        },
        Err(Failure::Internal(msg)) => CliOutput {
            code: 1,
            stdout: String::new(),
            stderr: format!("internal error: {}\n", first_line(&msg)),
        },
    }
}

fn first_line(s: &str) -> String {
    s.lines().find(|l| !l.trim().is_empty()).unwrap_or("").trim().to_string()
}

/// Rounds every float to 12 significant digits.
fn round_numbers(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap();
            let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
            json!(r)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_numbers).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_numbers(v))).collect()),
        other => other,
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> CliResult<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<T>()
                .map_err(|e| Failure::Input(format!("{what}: {t:?}: {e}")))
        })
        .collect()
}

fn load_runs(path: &Path, settings: Option<&str>) -> CliResult<Tally> {
    let file = fs::File::open(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let records = io::read_run_log(std::io::BufReader::new(file))?;
    let inferred = io::infer_scenario(&records)?;
    let scenario = match settings {
        None => inferred,
        Some(s) => {
            let v: Vec<usize> = parse_list(s, "settings")?;
            let [sa, sb] = v[..] else {
                return Err(Failure::Input("settings must be A,B".into()));
            };
            Scenario::new(sa, sb, inferred.outcomes_a(), inferred.outcomes_b())?
        }
    };
    Ok(Tally::from_records(scenario, records)?)
}

fn dispatch(cmd: Command) -> CliResult<Value> {
    match cmd {
        Command::Quantum {
            state,
            angles_a,
            angles_b,
            swap_b,
            out,
        } => {
            let state = PureTwoQubitState::parse(&state)?;
            let plan = MeasurementPlan::from_degrees(
                &parse_list::<f64>(&angles_a, "angles-a")?,
                &parse_list::<f64>(&angles_b, "angles-b")?,
            )?;
            let mut b = behavior_from_state(&state, &plan)?;
            if swap_b {
                b = b.swap_outputs(Side::B);
            }
            write(&out, &io::behavior_to_json(&b).to_string())?;
            Ok(json!({
                "out": out.display().to_string(),
                "settings_a": b.scenario().settings_a(),
                "settings_b": b.scenario().settings_b(),
                "nonsignalling_defect": b.nonsignalling_defect(),
            }))
        }
        Command::Simulate {
            behavior,
            runs,
            seed,
            stream_id,
            geometry,
            out,
        } => {
            let b = io::behavior_or_estimate_from_json(&read(&behavior)?)?;
            let g = Geometry::parse(&geometry)?;
            let sim = simulate_stream(&b, runs, seed, stream_id, g)?;
            let file = fs::File::create(&out).map_err(|e| Failure::Input(format!("{}: {e}", out.display())))?;
            let n = io::write_run_log(std::io::BufWriter::new(file), sim)?;
            Ok(json!({"out": out.display().to_string(), "runs": n, "seed": seed, "stream_id": stream_id}))
        }
        Command::Estimate {
            runs,
            out,
            settings,
            tally_out,
        } => {
            let t = load_runs(&runs, settings.as_deref())?;
            let (b, se) = estimate(&t)?;
            write(&out, &io::estimate_to_json(&b, &se).to_string())?;
            if let Some(path) = &tally_out {
                write(path, &io::tally_to_json(&t).to_string())?;
            }
            Ok(json!({"out": out.display().to_string(), "runs": t.grand_total()}))
        }
        Command::Classify { behavior, tol } => {
            if !(tol > 0.0) {
                return Err(Failure::Input(format!("tol must be positive, got {tol}")));
            }
            let b = io::behavior_or_estimate_from_json(&read(&behavior)?)?;
            let c = classify(&b, tol)?;
            classification_json(&c, &b)
        }
        Command::Inequality {
            behavior,
            form,
            indices,
        } => {
            let b = io::behavior_or_estimate_from_json(&read(&behavior)?)?;
            let idx: Vec<usize> = parse_list(&indices, "indices")?;
            let (name, f) = match (form, &idx[..]) {
                (Form::Literal, &[k]) => ("literal", wigner_literal(b.scenario(), k)?),
                (Form::Chained, &[i, j, k]) => ("chained", wigner_chained(b.scenario(), i, j, k)?),
                (Form::Literal, _) => return Err(Failure::Input("literal form takes one index".into())),
                (Form::Chained, _) => return Err(Failure::Input("chained form takes three indices".into())),
            };
            let value = f.evaluate(&b)?;
            let bounds = functional_vertex_bounds(&f)?;
            Ok(json!({
                "form": name,
                "indices": idx,
                "value": value,
                "local_bound": bounds.min,
                "reference_bound": f.reference_bound(),
                "violates_local_bound": value < bounds.min - DEFAULT_TOL,
                "violates_reference_bound": value < f.reference_bound() - DEFAULT_TOL,
            }))
        }
        Command::Efficiency {
            target,
            mode,
            tol_eta,
            model_out,
        } => {
            let b = io::behavior_or_estimate_from_json(&read(&target)?)?;
            let mode = match mode {
                Mode::Strict => ConstraintMode::Strict,
                Mode::Weak => ConstraintMode::Weak,
            };
            let r = critical_efficiency(&b, mode, tol_eta)?;
            if let Some(path) = &model_out {
                write(path, &io::model_to_json(&r.feasible_model).to_string())?;
            }
            Ok(io::threshold_to_json(&r))
        }
        Command::Audit {
            runs,
            geometry,
            settings,
        } => {
            let g = Geometry::parse(&geometry)?;
            let t = load_runs(&runs, settings.as_deref())?;
            let loc = locality_audit(&g);
            let rnd = randomness_audit(&t)?;
            Ok(json!({
                "locality": loc,
                "randomness": rnd,
                "runs": t.grand_total(),
            }))
        }
    }
}

fn functional_json(f: &BellFunctional, b: &crate::behavior::Behavior) -> CliResult<Value> {
    let s = f.scenario();
    let value = f.evaluate(b)?;
    Ok(json!({
        "coefficients": nest_f64(s, f.coefficients()),
        "local_bound": f.reference_bound(),
        "value": value,
        "margin": f.reference_bound() - value,
    }))
}

fn nest_f64(s: &Scenario, flat: &[f64]) -> Value {
    let v: Vec<Vec<Vec<Vec<f64>>>> = (0..s.settings_a())
        .map(|alpha| {
            (0..s.settings_b())
                .map(|beta| {
                    (0..s.outcomes_a().size())
                        .map(|a| (0..s.outcomes_b().size()).map(|bb| flat[s.index(alpha, beta, a, bb)]).collect())
                        .collect()
                })
                .collect()
        })
        .collect();
    json!(v)
}

fn classification_json(c: &Classification, b: &crate::behavior::Behavior) -> CliResult<Value> {
    let kind = match c.kind {
        Kind::Local => "Local",
        Kind::WeaklyNonlocal => "WeaklyNonlocal",
        Kind::Signalling => "Signalling",
    };
    let witness = match &c.witness {
        Some(w) => functional_json(w, b)?,
        None => Value::Null,
    };
    let decomposition = c.decomposition.as_ref().map(io::model_to_json).unwrap_or(Value::Null);
    Ok(json!({
        "kind": kind,
        "defect": c.defect,
        "witness": witness,
        "decomposition": decomposition,
    }))
}
