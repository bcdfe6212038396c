mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use sepscan::{Tolerances, Verdict};
use serde::Serialize;

pub const EXIT_MALFORMED: i32 = 64;
pub const EXIT_INFEASIBLE: i32 = 65;
pub const EXIT_INTERNAL: i32 = 70;

#[derive(Parser, Debug)]
#[command(name = "sepscan", version, about = "Bipartite separability toolkit")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Global {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = sepscan::tolerance::EIGENVALUE)]
    pub eig_tol: f64,
    #[arg(long, global = true, default_value_t = sepscan::tolerance::NORM)]
    pub norm_tol: f64,
    #[arg(long, global = true, default_value_t = sepscan::tolerance::TRACE)]
    pub trace_tol: f64,
    #[arg(long, global = true, default_value_t = sepscan::tolerance::PSD)]
    pub psd_tol: f64,
    /// Directory for cached nets.
    #[arg(long, global = true, env = "SEPSCAN_NET_CACHE")]
    pub net_cache: Option<PathBuf>,
}

impl Global {
    fn tolerances(&self) -> Tolerances {
        Tolerances {
            eigenvalue: self.eig_tol,
            norm: self.norm_tol,
            trace: self.trace_tol,
            psd: self.psd_tol,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the one-sided test pipeline.
    Test(commands::TestArgs),
    /// Cutting-plane witness search.
    Witness(commands::WitnessArgs),
    /// Symmetric-extension scan.
    Symext(commands::SymextArgs),
    /// Maximize an operator over product states.
    Wopt(commands::WoptArgs),
    /// Check a QSEP certificate in exact arithmetic.
    QsepVerify(commands::QsepVerifyArgs),
    /// Build a QSEP instance from a rational density matrix.
    QsepReduce(commands::QsepReduceArgs),
    /// Run the clique chain on a graph.
    Gadget(commands::GadgetArgs),
    /// Build (and cache) a δ-net.
    Net(commands::NetArgs),
    /// Write a named state as JSON.
    State(commands::StateArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Test(_) => "test",
            Command::Witness(_) => "witness",
            Command::Symext(_) => "symext",
            Command::Wopt(_) => "wopt",
            Command::QsepVerify(_) => "qsep-verify",
            Command::QsepReduce(_) => "qsep-reduce",
            Command::Gadget(_) => "gadget",
            Command::Net(_) => "net",
            Command::State(_) => "state",
        }
    }
}

/// What a command produced.
pub struct Outcome {
    pub verdict: Option<Verdict>,
    pub result: serde_json::Value,
    pub artifacts: Vec<PathBuf>,
    pub exit_code: i32,
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn malformed(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_MALFORMED,
            message: message.into(),
        }
    }
}

impl From<sepscan::Error> for Failure {
    fn from(e: sepscan::Error) -> Self {
        use sepscan::Error as E;
        let code = match &e {
            E::NetTooCoarse { .. } | E::TooLarge(_) => EXIT_INFEASIBLE,
            E::DimensionMismatch(_)
            | E::NotHermitian { .. }
            | E::InvalidState(_)
            | E::InvalidParameter(_)
            | E::BitWidth(_)
            | E::UnknownState(_)
            | E::Malformed(_)
            | E::Io(_)
            | E::Json(_) => EXIT_MALFORMED,
            _ => EXIT_INTERNAL,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Serialize)]
struct Timings {
    total_ms: f64,
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'a str,
    config: serde_json::Value,
    tolerances: Tolerances,
    verdict: Option<Verdict>,
    result: serde_json::Value,
    artifacts: Vec<PathBuf>,
    exit_code: i32,
    timings: Timings,
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    command: &'a str,
    error: String,
    exit_code: i32,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_MALFORMED } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    if let Some(t) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("sepscan: {e}");
            return ExitCode::from(EXIT_INTERNAL as u8);
        }
    }
    let name = cli.command.name();
    let tol = cli.global.tolerances();
    let start = Instant::now();
    let (args, run) = match &cli.command {
        Command::Test(a) => (serde_json::to_value(a), commands::test(a, &cli.global, &tol)),
        Command::Witness(a) => (serde_json::to_value(a), commands::witness(a, &cli.global)),
        Command::Symext(a) => (serde_json::to_value(a), commands::symext(a, &cli.global)),
        Command::Wopt(a) => (serde_json::to_value(a), commands::wopt(a, &cli.global)),
        Command::QsepVerify(a) => (serde_json::to_value(a), commands::qsep_verify(a)),
        Command::QsepReduce(a) => (serde_json::to_value(a), commands::qsep_reduce(a)),
        Command::Gadget(a) => (serde_json::to_value(a), commands::gadget(a, &cli.global)),
        Command::Net(a) => (serde_json::to_value(a), commands::net(a, &cli.global)),
        Command::State(a) => (serde_json::to_value(a), commands::state(a, &cli.global)),
    };
    let total_ms = start.elapsed().as_secs_f64() * 1e3;
    let (text, code) = match run {
        Ok(out) => {
            let mut config = args.unwrap_or(serde_json::Value::Null);
            if let (Some(obj), Ok(serde_json::Value::Object(g))) = (config.as_object_mut(), serde_json::to_value(&cli.global)) {
                obj.extend(g);
            }
            let report = Report {
                command: name,
                config,
                tolerances: tol,
                verdict: out.verdict,
                result: out.result,
                artifacts: out.artifacts,
                exit_code: out.exit_code,
                timings: Timings { total_ms },
            };
            (serde_json::to_string_pretty(&report), out.exit_code)
        }
        Err(f) => {
            eprintln!("sepscan {name}: {}", f.message);
            let report = ErrorReport {
                command: name,
                error: f.message,
                exit_code: f.code,
            };
            (serde_json::to_string_pretty(&report), f.code)
        }
    };
    match text {
        Ok(t) => {
            // a closed pipe downstream is not our failure
            let _ = writeln!(std::io::stdout().lock(), "{t}");
        }
        Err(e) => {
            eprintln!("sepscan: cannot serialize report: {e}");
            return ExitCode::from(EXIT_INTERNAL as u8);
        }
    }
    ExitCode::from(code as u8)
}
