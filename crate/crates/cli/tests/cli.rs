use std::fs;
use std::io::Write;
use std::os::unix::fs::PermissionsExt;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use ocomp_core::fol::alpha_equivalent;
use ocomp_core::syntax::parse_formula;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn ocomp(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ocomp"));
    cmd.args(args);
    cmd
}

fn run(args: &[&str]) -> Output {
    ocomp(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn translate_stdin(with: &str, extra: &[&str], input: &str) -> String {
    let mut args = vec!["translate", "--with", with];
    args.extend_from_slice(extra);
    args.push("-");
    let mut child = ocomp(&args).stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    stdout(&out)
}

#[test]
fn rule_translation_piped_into_ordered_completion() {
    let rules = stdout(&run(&["translate", "--with", "tau-star", "--no-simplify", data("pi1.lp").to_str().unwrap()]));
    let oc = translate_stdin("ordered-completion", &["--no-simplify"], &rules);
    let lines: Vec<&str> = oc.lines().collect();
    let expected = [
        "forall V1 (p(V1) <- exists A (V1 = A and exists Z (exists I$i J$i (Z = I$i - J$i and I$i = A and J$i = 1) and q(Z)))).",
        "forall V1 (p(V1) -> exists A (V1 = A and exists Z (exists I$i J$i (Z = I$i - J$i and I$i = A and J$i = 1) and (q(Z) and less_q_p(Z, V1))))).",
    ];
    assert_eq!(lines, expected);
    for (got, want) in lines.iter().zip(expected) {
        assert!(alpha_equivalent(&parse_formula(got).unwrap(), &parse_formula(want).unwrap()));
    }
}

#[test]
fn simplified_translations() {
    let out = run(&["translate", "--with", "tau-star", data("pi1.lp").to_str().unwrap()]);
    assert_eq!(stdout(&out), "forall I$i (q(I$i - 1) -> p(I$i)).\n");

    let out = run(&["translate", "--with", "ordered-completion", "--axioms", data("tight.lp").to_str().unwrap()]);
    let text = stdout(&out);
    for axiom in [
        "forall X1 not less_q_q(X1, X1).",
        "forall X1 not less_p_p(X1, X1).",
        "forall X1 not less_r_r(X1, X1).",
        "forall X1 X2 X3 (less_q_p(X1, X2) and less_p_r(X2, X3) -> less_q_r(X1, X3)).",
        "forall V1 (p(V1) -> q(V1) and less_q_p(V1, V1) or not r(V1)).",
    ] {
        assert!(text.lines().any(|l| l == axiom), "missing {axiom}");
    }

    let out = run(&["translate", "--with", "completion", data("tight.lp").to_str().unwrap()]);
    assert_eq!(stdout(&out).lines().count(), 6);
}

#[test]
fn empty_input_gives_empty_output() {
    assert_eq!(translate_stdin("tau-star", &[], ""), "");
}

#[test]
fn parse_errors_exit_with_two() {
    let out = run(&["translate", "--with", "tau-star", data("tight.spec").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.lp");
    fs::write(&bad, "p(X :- q.").unwrap();
    let out = run(&["translate", "--with", "completion", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn oracle_lists_the_transitive_closure() {
    let out = run(&["oracle", "--domain", "a1,a2,b", data("transitive.lp").to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "% domain: a1, a2, b\n\
         Answer 1: {e(a1,a2), e(a2,a1), t(a1,a1), t(a1,a2), t(a2,a1), t(a2,a2)}\n\
         % 1 stable model\n"
    );
    let out = run(&["oracle", "--int-radius", "1", data("locally_tight.lp").to_str().unwrap()]);
    let text = stdout(&out);
    assert!(text.starts_with("% domain: -1, 0, 1, 2 (program constants and integers within 1)\n"), "{text}");
}

/// A shell script standing in for a prover: it copies the problem next to
/// itself and answers with the given SZS status.
fn fake_prover(dir: &Path, status: &str) -> PathBuf {
    let path = dir.join(format!("prover_{status}.sh"));
    let copies = dir.join("problems");
    fs::create_dir_all(&copies).unwrap();
    let script = format!(
        "#!/bin/sh\ncp \"$1\" \"{}/$(basename \"$1\")\"\necho \"% SZS status {status} for $1\"\n",
        copies.display()
    );
    fs::write(&path, script).unwrap();
    fs::set_permissions(&path, fs::Permissions::from_mode(0o755)).unwrap();
    path
}

fn verify(prover: &Path, args: &[&str]) -> Output {
    let mut all = vec!["verify", "--equivalence", "ordered-completion"];
    all.extend_from_slice(args);
    ocomp(&all)
        .env("OCOMP_PROVER", prover)
        .env("OCOMP_PROVER_ARGS", "{file}")
        .output()
        .unwrap()
}

#[test]
fn verify_reports_every_conjecture() {
    let dir = tempfile::tempdir().unwrap();
    let prover = fake_prover(dir.path(), "Theorem");
    let out = verify(
        &prover,
        &["--direction", "forward", data("tight.lp").to_str().unwrap(), data("tight.spec").to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("> Proving forward_0...\nAxioms:\n    forall X1 not less_p_p(X1, X1)\n"), "{text}");
    assert!(text.contains("Conjectures:\n    forall X p(X)\n> Proving forward_0 ended with a SZS status\nStatus: Theorem ("));
    assert!(text.contains("> Success! Proved 1 of 1 conjectures"));
    let problem = fs::read_to_string(dir.path().join("problems/forward_0.p")).unwrap();
    assert!(problem.contains("tff(forward_0, conjecture, (![X: general]: p(X)))."));
}

#[test]
fn failed_verification_exits_with_one_and_explains_backward_limits() {
    let dir = tempfile::tempdir().unwrap();
    let prover = fake_prover(dir.path(), "CounterSatisfiable");
    let out = verify(
        &prover,
        &["--direction", "backward", data("backward.lp").to_str().unwrap(), data("backward.spec").to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("Status: CounterSatisfiable"));
    assert!(text.contains("> Failure!"));
    assert!(text.contains("> Note:"));

    let out = verify(
        &prover,
        &["--direction", "forward", data("tight.lp").to_str().unwrap(), data("tight.spec").to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(!stdout(&out).contains("> Note:"));
}

#[test]
fn universal_direction_between_programs() {
    let dir = tempfile::tempdir().unwrap();
    let prover = fake_prover(dir.path(), "Theorem");
    let out = verify(
        &prover,
        &[data("equivalence.1.lp").to_str().unwrap(), data("equivalence.2.lp").to_str().unwrap()],
    );
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("> Proving forward_0..."));
    assert!(text.contains("> Proving backward_0..."));
}

#[test]
fn problem_files_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let prover = fake_prover(dir.path(), "Theorem");
    let (program, spec) = (data("transitive.lp"), data("transitive.spec"));
    let args = ["--direction", "forward", "--sequential", program.to_str().unwrap(), spec.to_str().unwrap()];
    assert!(verify(&prover, &args).status.success());
    let first = fs::read(dir.path().join("problems/forward_0.p")).unwrap();
    assert!(verify(&prover, &args).status.success());
    let second = fs::read(dir.path().join("problems/forward_0.p")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn missing_prover_is_an_error() {
    let out = verify(
        Path::new("/nonexistent/prover"),
        &[data("tight.lp").to_str().unwrap(), data("tight.spec").to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("OCOMP_PROVER"));
}
