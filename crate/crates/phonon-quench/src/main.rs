use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use phonon_quench::{execute, CliError, Invocation, Mode};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Derive,
    Ground,
    Quench,
    Sweep,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Derive => Mode::Derive,
            ModeArg::Ground => Mode::Ground,
            ModeArg::Quench => Mode::Quench,
            ModeArg::Sweep => Mode::Sweep,
        }
    }
}

/// Local-quench dynamics of trapped-ion phonons in the Bose-Hubbard picture.
#[derive(Debug, Parser)]
#[command(name = "phonon-quench", version)]
struct Cli {
    /// What to run.
    mode: ModeArg,
    /// Configuration file (`section.key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to output.dir, then $PHONON_QUENCH_OUT.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Size of the sweep worker pool.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    workers: Option<u32>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(2);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let config_text = match std::fs::read_to_string(&cli.config) {
        Ok(text) => text,
        Err(e) => return fail(&CliError::io(&cli.config, e)),
    };
    let inv = Invocation {
        mode: Some(cli.mode.into()),
        config_text,
        out: cli.out,
        workers: cli.workers.map(|w| w as usize),
    };
    match execute(&inv) {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            for note in &outcome.notes {
                eprintln!("warning: {note}");
            }
            println!("wrote {} files to {}", outcome.files.len(), outcome.out_dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("phonon-quench: {e}");
    ExitCode::from(e.exit_code() as u8)
}
