use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use ocomp_core::syntax::{parse_program, parse_spec};
use ocomp_core::tptp::{
    default_domain, limitation_note, oracle, parse_domain, render, render_model, report, run_verify, translate,
    Direction, Input, ProverSettings, TranslateOptions, Translation, VerifyOptions, DEFAULT_RADIUS, PROVER_VAR,
};

#[derive(Parser)]
#[command(name = "ocomp", version, about = "Completion and ordered completion of logic programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the translation of a program (or a theory of translated rules).
    Translate {
        #[arg(long = "with", value_enum)]
        with: With,
        /// Also print the order axioms of ordered completion.
        #[arg(long)]
        axioms: bool,
        #[arg(long)]
        no_simplify: bool,
        /// Input file, or `-` for standard input.
        file: PathBuf,
    },
    /// Prove that a program's theory implies a specification or another program.
    Verify {
        #[arg(long, value_enum, default_value = "ordered-completion")]
        equivalence: Equivalence,
        #[arg(long, value_enum, default_value = "universal")]
        direction: DirectionArg,
        /// Use the plain completion instead of ordered completion.
        #[arg(long)]
        bypass_tightness: bool,
        /// Seconds granted to each prover run.
        #[arg(long, default_value_t = 60)]
        time_limit: u64,
        /// Run the prover on one sub-problem at a time.
        #[arg(long)]
        sequential: bool,
        left: PathBuf,
        /// A program, or a specification (`.spec`).
        right: PathBuf,
    },
    /// List the stable models over a finite domain.
    Oracle {
        /// Comma-separated domain elements, such as `a1,a2,b,1,2`.
        #[arg(long)]
        domain: Option<String>,
        /// Without `--domain`: integers added around those of the program.
        #[arg(long, default_value_t = DEFAULT_RADIUS)]
        int_radius: i64,
        file: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum With {
    TauStar,
    Completion,
    OrderedCompletion,
}

#[derive(Clone, Copy, ValueEnum)]
enum Equivalence {
    OrderedCompletion,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Forward,
    Backward,
    Universal,
}

fn read(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text).context("reading standard input")?;
        return Ok(text);
    }
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_input(path: &Path) -> Result<Input> {
    let text = read(path)?;
    let input = if path.extension().is_some_and(|e| e == "spec") {
        Input::Theory(parse_spec(&text)?)
    } else {
        Input::parse(&text)?
    };
    Ok(input)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Translate {
            with,
            axioms,
            no_simplify,
            file,
        } => {
            let with = match with {
                With::TauStar => Translation::TauStar,
                With::Completion => Translation::Completion,
                With::OrderedCompletion => Translation::OrderedCompletion,
            };
            let options = TranslateOptions {
                with,
                axioms,
                simplify: !no_simplify,
            };
            let input = read_input(&file)?;
            print!("{}", render(&translate(&input, options)?));
            Ok(true)
        }
        Command::Verify {
            equivalence: Equivalence::OrderedCompletion,
            direction,
            bypass_tightness,
            time_limit,
            sequential,
            left,
            right,
        } => {
            if time_limit == 0 {
                bail!("the time limit must be positive");
            }
            let direction = match direction {
                DirectionArg::Forward => Direction::Forward,
                DirectionArg::Backward => Direction::Backward,
                DirectionArg::Universal => Direction::Universal,
            };
            let program = parse_program(&read(&left)?).with_context(|| format!("parsing {}", left.display()))?;
            let target = read_input(&right).with_context(|| format!("parsing {}", right.display()))?;
            let settings = ProverSettings::from_env(Duration::from_secs(time_limit));
            if !settings.is_available() {
                bail!(
                    "prover `{}` not found; set {PROVER_VAR} to its path",
                    settings.program.display()
                );
            }
            let options = VerifyOptions {
                direction,
                bypass_tightness,
                parallel: !sequential,
            };
            let (problems, outcome) = run_verify(&program, &target, options, &settings)?;
            print!("{}", report(&problems, &outcome));
            if !outcome.success() {
                if let Some(note) = limitation_note(direction, matches!(target, Input::Program(_))) {
                    println!("{note}");
                }
            }
            Ok(outcome.success())
        }
        Command::Oracle {
            domain,
            int_radius,
            file,
        } => {
            let program = parse_program(&read(&file)?).with_context(|| format!("parsing {}", file.display()))?;
            let (domain, defaulted) = match domain {
                Some(text) => (parse_domain(&text)?, false),
                None => (default_domain(&program, int_radius), true),
            };
            let elements: Vec<String> = domain.general.iter().map(|t| t.to_string()).collect();
            print!("% domain: {}", elements.join(", "));
            if defaulted {
                print!(" (program constants and integers within {int_radius})");
            }
            println!();
            let models = oracle(&program, &domain)?;
            for (i, m) in models.iter().enumerate() {
                println!("Answer {}: {}", i + 1, render_model(m));
            }
            println!("% {} stable model{}", models.len(), if models.len() == 1 { "" } else { "s" });
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
