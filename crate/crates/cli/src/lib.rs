//! Command-line reports for the `locdyn-core` computations: problem files,
//! validation diagnostics, JSON and plain-text reports.
//!
//! Exit codes: 0 success, 1 usage error or invalid problem, 2 precision
//! could not be certified, 3 a formula and its oracle disagree.

pub mod problem;
pub mod report;
pub mod syntax;
pub mod tasks;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use locdyn_core::{Error, OracleMode};

use problem::{load, Diagnostic, FixtureInput, Overrides, Problem, Task, TaskInput};

#[derive(Parser, Debug)]
#[command(name = "locdyn", version, about = "Scale, adapted norms and tidy balls for automorphisms over local fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run one task and print its report
    Run(RunArgs),
    /// Check a problem file without computing anything
    Validate {
        /// Problem file (JSON)
        file: PathBuf,
    },
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// Task to run; same as --task
    #[arg(value_enum, value_name = "TASK")]
    pub task_name: Option<Task>,
    /// Problem file (JSON)
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Task to run, overriding the file
    #[arg(long, value_enum, value_name = "NAME")]
    pub task: Option<Task>,
    /// Absolute precision N, overriding the file
    #[arg(long, value_name = "N")]
    pub precision: Option<i32>,
    /// Seed of every randomized check
    #[arg(long, value_name = "K", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Enumeration oracles: always, never, or when the quotient has at most 4096 cosets
    #[arg(long, value_enum, default_value_t = Oracle::Auto)]
    pub oracle: Oracle,
    /// Shorthand for --set name=NAME
    #[arg(long, value_name = "NAME")]
    pub name: Option<String>,
    /// Shorthand for --set p=P
    #[arg(long, value_name = "P")]
    pub p: Option<u64>,
    /// Task parameter; VALUE is read as JSON, or as a string if that fails
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Oracle {
    On,
    Off,
    Auto,
}

impl Oracle {
    fn mode(self) -> OracleMode {
        match self {
            Oracle::On => OracleMode::On,
            Oracle::Off => OracleMode::Off,
            Oracle::Auto => OracleMode::Auto,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Oracle::On => "on",
            Oracle::Off => "off",
            Oracle::Auto => "auto",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Bad flags, unreadable or invalid problem, or a rejected input.
    Usage,
    Precision,
    Disagreement,
}

impl Status {
    /// Exit status of a task that failed with `e`.
    pub fn of_error(e: &Error) -> Status {
        match e {
            Error::OracleDisagreement(_) => Status::Disagreement,
            e if e.is_precision() => Status::Precision,
            _ => Status::Usage,
        }
    }

    pub fn code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Usage => 1,
            Status::Precision => 2,
            Status::Disagreement => 3,
        }
    }
}

/// What a process would print and return.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub status: Status,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    pub fn code(&self) -> i32 {
        self.status.code()
    }

    fn usage(msg: String) -> Outcome {
        Outcome { status: Status::Usage, stdout: String::new(), stderr: msg }
    }
}

/// Parses the arguments (first one is the program name) and runs.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome { status: Status::Ok, stdout: text, stderr: String::new() }
                }
                _ => Outcome::usage(text),
            };
        }
    };
    match cli.command {
        Command::Run(args) => run_task(&args),
        Command::Validate { file } => validate_file(&file),
    }
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}\n", path.display()))
}

pub fn validate_file(path: &Path) -> Outcome {
    let text = match read(path) {
        Ok(t) => t,
        Err(e) => return Outcome::usage(e),
    };
    let diags = problem::validate(&text);
    let mut out = String::new();
    for d in &diags {
        out.push_str(&format!("{}: {d}\n", path.display()));
    }
    if diags.is_empty() {
        Outcome { status: Status::Ok, stdout: format!("{}: ok\n", path.display()), stderr: String::new() }
    } else {
        Outcome { status: Status::Usage, stdout: out, stderr: String::new() }
    }
}

fn overrides(args: &RunArgs) -> Result<Overrides, String> {
    let task = match (args.task, args.task_name) {
        (Some(a), Some(b)) if a != b => return Err(format!("conflicting tasks {a} and {b}\n")),
        (a, b) => a.or(b),
    };
    let mut params = Vec::new();
    for s in &args.set {
        let Some((k, v)) = s.split_once('=') else {
            return Err(format!("--set expects KEY=VALUE, got '{s}'\n"));
        };
        let value = serde_json::from_str::<Value>(v).unwrap_or_else(|_| Value::String(v.to_string()));
        params.push((k.trim().to_string(), value));
    }
    if let Some(n) = &args.name {
        params.push(("name".into(), Value::String(n.clone())));
    }
    if let Some(p) = args.p {
        params.push(("p".into(), Value::from(p)));
    }
    Ok(Overrides { task, precision: args.precision, params })
}

fn topic(p: &Problem) -> &'static str {
    match &p.input {
        TaskInput::Scale { .. } => "scale of a linear automorphism",
        TaskInput::Decompose => "decomposition by absolute values of eigenvalues",
        TaskInput::AdaptedNorm { .. } => "norm adapted to a linear automorphism",
        TaskInput::Tidy { .. } => "tidiness of norm balls",
        TaskInput::Classify { .. } => "contraction, Levi and anti-contraction parts",
        TaskInput::Orbit { .. } => "norms along an orbit",
        TaskInput::BchScale { .. } => "group scale of a nilpotent automorphism in BCH coordinates",
        TaskInput::Fixture(FixtureInput::Shift { .. }) => "group scale against Lie algebra scale for the shift",
        TaskInput::Fixture(FixtureInput::FrobeniusTwist { .. }) => "the map z -> z + X z^p of F_p[[X]]",
        TaskInput::Fixture(FixtureInput::Nonanalytic { .. }) => "a non-analytic map tangent to the identity to every order",
        TaskInput::Diffquot { .. } => "difference quotients of a power series map",
    }
}

fn precision_of(p: &Problem) -> Option<i32> {
    match &p.input {
        TaskInput::Fixture(FixtureInput::FrobeniusTwist { precision, .. })
        | TaskInput::Fixture(FixtureInput::Nonanalytic { precision, .. }) => Some(*precision),
        TaskInput::Fixture(FixtureInput::Shift { .. }) => Some(problem::DEFAULT_PRECISION),
        _ => p.spec.as_ref().map(|k| k.precision()),
    }
}

fn render(report: &Value, format: Format) -> String {
    match format {
        Format::Json => report::to_json_text(report),
        Format::Text => report::to_text(report),
    }
}

fn diagnostics_value(diags: &[Diagnostic]) -> Value {
    Value::Array(
        diags
            .iter()
            .map(|d| json!({"line": d.line, "column": d.column, "field": d.field, "message": d.message}))
            .collect(),
    )
}

pub fn run_task(args: &RunArgs) -> Outcome {
    let ov = match overrides(args) {
        Ok(o) => o,
        Err(e) => return Outcome::usage(e),
    };
    let text = match &args.input {
        Some(path) => match read(path) {
            Ok(t) => Some(t),
            Err(e) => return Outcome::usage(e),
        },
        None => None,
    };
    let file = args.input.as_ref().and_then(|p| p.file_name()).map(|f| f.to_string_lossy().into_owned());
    let mut head = serde_json::Map::new();
    head.insert("tool".into(), json!({"name": "locdyn", "version": env!("CARGO_PKG_VERSION")}));
    head.insert("input".into(), json!({"file": file, "seed": args.seed, "oracle": args.oracle.name()}));

    let problem = match load(text.as_deref(), &ov) {
        Ok(p) => p,
        Err(diags) => {
            let mut r = head;
            r.insert("status".into(), Value::from("invalid-input"));
            r.insert("diagnostics".into(), diagnostics_value(&diags));
            let stderr: String = diags.iter().map(|d| format!("{d}\n")).collect();
            return Outcome { status: Status::Usage, stdout: render(&Value::Object(r), args.format), stderr };
        }
    };

    let mut r = head;
    r.insert("task".into(), Value::from(problem.task.name()));
    r.insert("topic".into(), Value::from(topic(&problem)));
    if let Some(input) = r.get_mut("input").and_then(Value::as_object_mut) {
        input.insert("field".into(), problem.spec.as_ref().map(|k| Value::from(k.describe())).unwrap_or(Value::Null));
    }
    let digits = precision_of(&problem);
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let (status, certified) = match tasks::run_task(&problem, args.oracle.mode(), &mut rng) {
        Ok(out) => {
            let status = if out.disagreements.is_empty() { Status::Ok } else { Status::Disagreement };
            r.insert("results".into(), Value::Object(out.results));
            r.insert("notes".into(), Value::from(out.notes));
            r.insert("disagreements".into(), Value::from(out.disagreements));
            (status, true)
        }
        Err(e) => {
            let status = Status::of_error(&e);
            r.insert("error".into(), Value::from(e.to_string()));
            if status == Status::Disagreement {
                r.insert("disagreements".into(), json!([e.to_string()]));
            }
            (status, status != Status::Precision)
        }
    };
    r.insert(
        "precision".into(),
        json!({
            "digits": digits,
            "margin": digits.map(|n| n / 2),
            "certified": certified,
            "policy": "values with valuation >= N - N/2 are treated as zero; every rank and valuation decision is certified up to O(pi^N)",
        }),
    );
    r.insert(
        "status".into(),
        Value::from(match status {
            Status::Ok => "ok",
            Status::Usage => "rejected",
            Status::Precision => "precision-failure",
            Status::Disagreement => "disagreement",
        }),
    );
    let stderr = match r.get("error") {
        Some(Value::String(e)) => format!("{e}\n"),
        _ => String::new(),
    };
    Outcome { status, stdout: render(&Value::Object(r), args.format), stderr }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_statuses() {
        assert_eq!(Status::of_error(&Error::OracleDisagreement("x".into())).code(), 3);
        assert_eq!(Status::of_error(&Error::PrecisionExhausted("x".into())).code(), 2);
        assert_eq!(Status::of_error(&Error::Singular).code(), 1);
    }

    #[test]
    fn help_is_not_an_error() {
        let out = run(["locdyn", "--help"]);
        assert_eq!(out.code(), 0);
        assert!(out.stdout.contains("validate"));
        assert_eq!(run(["locdyn", "frobnicate"]).code(), 1);
    }
}
