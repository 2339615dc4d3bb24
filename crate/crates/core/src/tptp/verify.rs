use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;

use super::emit::{emit_tptp, EmitError, TptpProblem};
use super::prover::{run_prover, ProverError, ProverSettings, Status};
use super::translate::Input;
use crate::completion::{completion_parts, NamedFormula, Section, TheoryBundle};
use crate::ordered::{ordered_completion, OcConfig, OrderedError};
use crate::simplify::simplify_formula;
use crate::syntax::Program;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
    Universal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub direction: Direction,
    /// Use the plain completion instead of ordered completion.
    pub bypass_tightness: bool,
    /// Prove sub-problems concurrently.
    pub parallel: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            direction: Direction::Forward,
            bypass_tightness: false,
            parallel: true,
        }
    }
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Ordered(#[from] OrderedError),
    #[error(transparent)]
    Emit(#[from] EmitError),
    #[error(transparent)]
    Prover(#[from] ProverError),
    #[error("cannot write problem files: {0}")]
    Io(#[from] io::Error),
}

/// One conjecture with the axioms it is proved from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubProblem {
    pub name: String,
    pub axioms: Vec<NamedFormula>,
    pub conjecture: NamedFormula,
    pub problem: TptpProblem,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjectureResult {
    pub name: String,
    pub status: Status,
    pub elapsed: Duration,
    pub transcript: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyOutcome {
    pub results: Vec<ConjectureResult>,
    pub elapsed: Duration,
    pub directory: PathBuf,
}

impl VerifyOutcome {
    pub fn success(&self) -> bool {
        self.results.iter().all(|r| r.status == Status::Theorem)
    }
}

/// The sentences standing for a program: its simplified ordered completion,
/// or its simplified completion when `plain_completion` is set.
pub fn program_theory(program: &Program, plain_completion: bool) -> Result<Vec<NamedFormula>, VerifyError> {
    let bundle = if plain_completion {
        completion_parts(program, true).bundle()
    } else {
        ordered_completion(program, &OcConfig::default())?
    };
    Ok(bundle.map(simplify_formula).ordered().into_iter().cloned().collect())
}

fn input_theory(input: &Input, plain_completion: bool) -> Result<Vec<NamedFormula>, VerifyError> {
    match input {
        Input::Program(p) => program_theory(p, plain_completion),
        Input::Theory(fs) => {
            let mut bundle = TheoryBundle::default();
            for (i, f) in fs.iter().enumerate() {
                bundle.push(format!("spec_{i}"), Section::Axioms, f.clone());
            }
            Ok(bundle.formulas)
        }
    }
}

fn sub_problems(
    prefix: &str,
    axioms: &[NamedFormula],
    conjectures: &[NamedFormula],
) -> Result<Vec<SubProblem>, VerifyError> {
    conjectures
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let conjecture = NamedFormula {
                name: format!("{prefix}_{i}"),
                ..c.clone()
            };
            let problem = emit_tptp(axioms, std::slice::from_ref(&conjecture))?;
            Ok(SubProblem {
                name: conjecture.name.clone(),
                axioms: axioms.to_vec(),
                conjecture,
                problem,
            })
        })
        .collect()
}

/// Splits the claim into one problem per conjecture. Forward proves each
/// sentence of `right` from the theory of `left`; backward proves each
/// sentence of the theory of `left` from `right`.
pub fn build_problems(left: &Program, right: &Input, options: VerifyOptions) -> Result<Vec<SubProblem>, VerifyError> {
    let lhs = program_theory(left, options.bypass_tightness)?;
    let rhs = input_theory(right, options.bypass_tightness)?;
    let mut problems = Vec::new();
    if options.direction != Direction::Backward {
        problems.extend(sub_problems("forward", &lhs, &rhs)?);
    }
    if options.direction != Direction::Forward {
        problems.extend(sub_problems("backward", &rhs, &lhs)?);
    }
    Ok(problems)
}

/// Writes every problem file, runs the prover on each and collects the
/// statuses in problem order. Files and transcripts stay in `directory`.
pub fn run_problems(
    problems: &[SubProblem],
    settings: &ProverSettings,
    parallel: bool,
    directory: &Path,
) -> Result<VerifyOutcome, VerifyError> {
    let start = Instant::now();
    let mut paths = Vec::new();
    for p in problems {
        let path = directory.join(format!("{}.p", p.name));
        fs::write(&path, p.problem.to_string())?;
        paths.push(path);
    }
    let runs = if parallel {
        thread::scope(|s| {
            let handles: Vec<_> = paths.iter().map(|path| s.spawn(move || run_prover(settings, path))).collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("prover thread panicked"))
                .collect::<Vec<_>>()
        })
    } else {
        paths.iter().map(|path| run_prover(settings, path)).collect()
    };
    let mut results = Vec::new();
    for (p, run) in problems.iter().zip(runs) {
        let run = run?;
        let transcript = directory.join(format!("{}.out", p.name));
        fs::write(&transcript, &run.transcript)?;
        results.push(ConjectureResult {
            name: p.name.clone(),
            status: run.status,
            elapsed: run.elapsed,
            transcript,
        });
    }
    Ok(VerifyOutcome {
        results,
        elapsed: start.elapsed(),
        directory: directory.to_path_buf(),
    })
}

/// Builds and proves all problems, keeping the files in a fresh directory
/// under the system temporary directory.
pub fn run_verify(
    left: &Program,
    right: &Input,
    options: VerifyOptions,
    settings: &ProverSettings,
) -> Result<(Vec<SubProblem>, VerifyOutcome), VerifyError> {
    let problems = build_problems(left, right, options)?;
    let directory = tempfile::Builder::new().prefix("ocomp-verify-").tempdir()?.keep();
    let outcome = run_problems(&problems, settings, options.parallel, &directory)?;
    Ok((problems, outcome))
}

fn millis(d: Duration) -> u128 {
    d.as_millis()
}

/// The transcript printed by `verify`.
pub fn report(problems: &[SubProblem], outcome: &VerifyOutcome) -> String {
    let mut out = String::new();
    for (p, r) in problems.iter().zip(&outcome.results) {
        let _ = writeln!(out, "> Proving {}...", p.name);
        let _ = writeln!(out, "Axioms:");
        for a in &p.axioms {
            let _ = writeln!(out, "    {}", a.formula);
        }
        let _ = writeln!(out, "Conjectures:");
        let _ = writeln!(out, "    {}", p.conjecture.formula);
        let _ = writeln!(out, "> Proving {} ended with a SZS status", p.name);
        let _ = writeln!(out, "Status: {} ({} ms)", r.status, millis(r.elapsed));
        if r.status != Status::Theorem {
            let _ = writeln!(out, "Transcript: {}", r.transcript.display());
        }
    }
    let proved = outcome.results.iter().filter(|r| r.status == Status::Theorem).count();
    let total = outcome.results.len();
    if outcome.success() {
        let _ = writeln!(out, "> Success! Proved {proved} of {total} conjectures ({} ms)", millis(outcome.elapsed));
    } else {
        let _ = writeln!(out, "> Failure! Proved {proved} of {total} conjectures ({} ms)", millis(outcome.elapsed));
    }
    out
}

/// Why an unproved claim says little in some set-ups: order predicates that
/// occur only among the conjectures are unconstrained by the axioms.
pub fn limitation_note(direction: Direction, right_is_program: bool) -> Option<&'static str> {
    (direction != Direction::Forward || right_is_program).then_some(
        "> Note: the conjectures mention order predicates that the axioms leave free, \
         so an unproved conjecture here does not show that the stable models differ.",
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    const TIGHT: &str = "p(X) :- q(X).\np(X) :- not r(X).\nr(1).\nq(1).\n";

    #[test]
    fn forward_problems_use_the_program_as_axioms() {
        let left = parse_program(TIGHT).unwrap();
        let right = Input::parse("forall X p(X).").unwrap();
        let problems = build_problems(&left, &right, VerifyOptions::default()).unwrap();
        assert_eq!(problems.len(), 1);
        let p = &problems[0];
        assert_eq!(p.name, "forward_0");
        assert_eq!(p.axioms.len(), 36);
        assert!(p.axioms.iter().any(|a| a.formula.to_string() == "forall X1 not less_q_q(X1, X1)"));
        assert!(p
            .axioms
            .iter()
            .any(|a| a.formula.to_string() == "forall X1 X2 X3 (less_q_p(X1, X2) and less_p_r(X2, X3) -> less_q_r(X1, X3))"));
        assert!(p.problem.to_string().ends_with("tff(forward_0, conjecture, (![X: general]: p(X))).\n"));
    }

    #[test]
    fn directions() {
        let left = parse_program("p.\nq :- p.").unwrap();
        let spec = Input::parse("p and q.").unwrap();
        let backward = VerifyOptions { direction: Direction::Backward, ..VerifyOptions::default() };
        let problems = build_problems(&left, &spec, backward).unwrap();
        let conjectures: Vec<String> = problems.iter().map(|p| p.conjecture.formula.to_string()).collect();
        assert!(conjectures.contains(&"q -> p and less_p_q".to_string()), "{conjectures:?}");
        assert!(problems.iter().all(|p| p.axioms.len() == 1));

        let universal = VerifyOptions { direction: Direction::Universal, ..VerifyOptions::default() };
        let all = build_problems(&left, &spec, universal).unwrap();
        assert_eq!(all.len(), 1 + problems.len());
        assert_eq!(all[0].name, "forward_0");
        assert_eq!(all[1].name, "backward_0");
    }

    #[test]
    fn plain_completion_is_used_when_bypassing() {
        let left = parse_program("p(X) :- q(X).\nq(X) :- p(X).").unwrap();
        let spec = Input::parse("forall X (not p(X) and not q(X)).").unwrap();
        let options = VerifyOptions { bypass_tightness: true, ..VerifyOptions::default() };
        let problems = build_problems(&left, &spec, options).unwrap();
        let axioms: Vec<String> = problems[0].axioms.iter().map(|a| a.formula.to_string()).collect();
        assert!(axioms.iter().all(|a| !a.contains("less_")));
        assert!(axioms.contains(&"forall V1 (p(V1) -> q(V1))".to_string()), "{axioms:?}");
    }

    #[test]
    fn problems_are_deterministic() {
        let left = parse_program(TIGHT).unwrap();
        let right = Input::parse("forall X p(X).").unwrap();
        let a = build_problems(&left, &right, VerifyOptions::default()).unwrap();
        let b = build_problems(&left, &right, VerifyOptions::default()).unwrap();
        assert_eq!(a[0].problem.to_string(), b[0].problem.to_string());
    }

    #[cfg(unix)]
    #[test]
    fn report_format() {
        let left = parse_program("p.").unwrap();
        let right = Input::Theory(crate::syntax::parse_spec("p.").unwrap());
        let problems = build_problems(&left, &right, VerifyOptions::default()).unwrap();
        let settings = ProverSettings {
            program: "/bin/sh".into(),
            args: vec!["-c".into(), "echo '% SZS status Theorem for x'".into()],
            timeout: Duration::from_secs(5),
        };
        let dir = tempfile::tempdir().unwrap();
        let outcome = run_problems(&problems, &settings, true, dir.path()).unwrap();
        assert!(outcome.success());
        let text = report(&problems, &outcome);
        assert!(text.starts_with("> Proving forward_0...\nAxioms:\n    not less_p_p\n"), "{text}");
        assert!(text.contains("\n    p\n"));
        assert!(text.contains("Conjectures:\n    p\n> Proving forward_0 ended with a SZS status\nStatus: Theorem ("));
        assert!(text.contains("> Success! Proved 1 of 1 conjectures"));
        assert!(dir.path().join("forward_0.p").is_file());
        assert!(dir.path().join("forward_0.out").is_file());
    }
}
