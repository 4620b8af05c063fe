use clap::Parser;
use pathcoalg::cli::{self, exit_code_for};
use pathcoalg::problem::ProblemFile;
use std::path::PathBuf;
use std::process::ExitCode;

/// Exact localization computations for path coalgebras.
#[derive(Parser, Debug)]
#[command(name = "pathcoalg", version, disable_help_subcommand = true)]
struct Args {
    /// One of: ext-quiver, loewy, predecessors, localize, section,
    /// quotient, torsion-sub, coloc, check-left-semicentral,
    /// check-right-semicentral, check-central, verify.
    command: String,

    /// Problem file describing the quiver, coalgebra and localization.
    file: PathBuf,

    /// Write a DOT rendering (torsion vertices black) to this path.
    #[arg(long)]
    dot: Option<PathBuf>,

    /// Override the problem file's degree cap.
    #[arg(long)]
    cap: Option<usize>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };

    let text = match std::fs::read_to_string(&args.file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.file.display());
            return ExitCode::from(1);
        }
    };

    let mut problem = match ProblemFile::parse(&text) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code_for(&e) as u8);
        }
    };
    if let Some(cap) = args.cap {
        problem.cap = cap;
    }

    match cli::run(&args.command, &problem) {
        Ok((outcome, notice)) => {
            if !notice.is_empty() {
                eprintln!(
                    "notice: subpath closure added {} basis path(s): {}",
                    notice.len(),
                    notice.join(", ")
                );
            }
            print!("{}", outcome.report.render());
            if let Some(path) = args.dot {
                if let Some(dot) = outcome.dot {
                    if let Err(e) = std::fs::write(&path, dot) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(1);
                    }
                }
            }
            ExitCode::from(outcome.exit as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e) as u8)
        }
    }
}
