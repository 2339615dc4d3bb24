use std::fmt;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;

/// Environment variable naming the prover executable.
pub const PROVER_VAR: &str = "OCOMP_PROVER";
/// Environment variable with the prover arguments; `{file}` and `{timeout}`
/// are replaced by the problem path and the time limit in seconds.
pub const PROVER_ARGS_VAR: &str = "OCOMP_PROVER_ARGS";

const DEFAULT_PROVER: &str = "vampire";
const DEFAULT_ARGS: &str = "--mode casc --time_limit {timeout} {file}";
/// Extra time granted before a prover that ignores its own limit is killed.
const GRACE: Duration = Duration::from_secs(2);

#[derive(Debug, Error)]
pub enum ProverError {
    #[error("cannot start prover `{program}`: {source}")]
    Spawn { program: String, source: io::Error },
    #[error("prover i/o: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProverSettings {
    pub program: PathBuf,
    pub args: Vec<String>,
    pub timeout: Duration,
}

impl ProverSettings {
    pub fn from_env(timeout: Duration) -> Self {
        let program = std::env::var_os(PROVER_VAR)
            .filter(|p| !p.is_empty())
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(DEFAULT_PROVER));
        let args = std::env::var(PROVER_ARGS_VAR).unwrap_or_else(|_| DEFAULT_ARGS.to_string());
        ProverSettings {
            program,
            args: args.split_whitespace().map(String::from).collect(),
            timeout,
        }
    }

    /// Whether the executable exists, either as a path or on `PATH`.
    pub fn is_available(&self) -> bool {
        if self.program.components().count() > 1 {
            return self.program.is_file();
        }
        std::env::var_os("PATH")
            .map(|paths| std::env::split_paths(&paths).any(|dir| dir.join(&self.program).is_file()))
            .unwrap_or(false)
    }

    fn arguments(&self, file: &Path) -> Vec<String> {
        let seconds = self.timeout.as_secs().max(1).to_string();
        let file = file.display().to_string();
        self.args
            .iter()
            .map(|a| a.replace("{timeout}", &seconds).replace("{file}", &file))
            .collect()
    }
}

/// Outcome of one proof attempt, keyed on the SZS status line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Theorem,
    CounterSatisfiable,
    Timeout,
    GaveUp,
    Error,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Theorem => "Theorem",
            Status::CounterSatisfiable => "CounterSatisfiable",
            Status::Timeout => "Timeout",
            Status::GaveUp => "GaveUp",
            Status::Error => "Error",
        })
    }
}

/// The status of the first `SZS status` line, or `None` if there is none.
pub fn parse_szs(output: &str) -> Option<Status> {
    output.lines().find_map(|line| {
        let rest = &line[line.find("SZS status ")? + "SZS status ".len()..];
        let word = rest.split_whitespace().next()?;
        Some(match word {
            "Theorem" | "ContradictoryAxioms" => Status::Theorem,
            "CounterSatisfiable" | "Satisfiable" | "CounterTheorem" => Status::CounterSatisfiable,
            "Timeout" | "ResourceOut" => Status::Timeout,
            "Error" | "InputError" | "SyntaxError" | "OSError" => Status::Error,
            _ => Status::GaveUp,
        })
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProverRun {
    pub status: Status,
    pub elapsed: Duration,
    pub transcript: String,
}

fn drain(mut pipe: impl Read + Send + 'static) -> thread::JoinHandle<String> {
    thread::spawn(move || {
        let mut bytes = Vec::new();
        let _ = pipe.read_to_end(&mut bytes);
        String::from_utf8_lossy(&bytes).into_owned()
    })
}

fn wait_with_deadline(child: &mut Child, deadline: Duration) -> io::Result<bool> {
    let start = Instant::now();
    loop {
        if child.try_wait()?.is_some() {
            return Ok(true);
        }
        if start.elapsed() >= deadline {
            let _ = child.kill();
            child.wait()?;
            return Ok(false);
        }
        thread::sleep(Duration::from_millis(5));
    }
}

/// Runs the prover on one problem file and classifies its answer.
///
/// A run that outlives the time limit is killed and reported as a timeout;
/// output without an SZS line is an error with the raw transcript kept.
pub fn run_prover(settings: &ProverSettings, problem: &Path) -> Result<ProverRun, ProverError> {
    let start = Instant::now();
    let mut child = Command::new(&settings.program)
        .args(settings.arguments(problem))
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|source| ProverError::Spawn {
            program: settings.program.display().to_string(),
            source,
        })?;
    let stdout = drain(child.stdout.take().expect("stdout is piped"));
    let stderr = drain(child.stderr.take().expect("stderr is piped"));
    let finished = wait_with_deadline(&mut child, settings.timeout + GRACE)?;
    let elapsed = start.elapsed();
    let mut transcript = stdout.join().unwrap_or_default();
    let errors = stderr.join().unwrap_or_default();
    if !errors.is_empty() {
        transcript.push_str(&errors);
    }
    let status = if finished {
        parse_szs(&transcript).unwrap_or(Status::Error)
    } else {
        Status::Timeout
    };
    Ok(ProverRun {
        status,
        elapsed,
        transcript,
    })
}
