//! Encoding theories as TPTP problems, driving an external prover, and the
//! operations behind the command-line tool.

mod emit;
mod oracle;
mod prover;
mod translate;
mod verify;

pub use emit::{emit_tptp, EmitError, TptpProblem};
pub use oracle::{default_domain, oracle, parse_domain, render_model, OracleError, DEFAULT_RADIUS};
pub use prover::{parse_szs, run_prover, ProverError, ProverRun, ProverSettings, Status, PROVER_ARGS_VAR, PROVER_VAR};
pub use translate::{render, translate, Input, TranslateError, TranslateOptions, Translation};
pub use verify::{
    build_problems, limitation_note, program_theory, report, run_problems, run_verify, ConjectureResult, Direction,
    SubProblem, VerifyError, VerifyOptions, VerifyOutcome,
};
