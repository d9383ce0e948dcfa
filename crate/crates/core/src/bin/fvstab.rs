use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fvstab::cli::{self, Overrides, Verb};

#[derive(Parser)]
#[command(version, about = "Boundary-stabilized transport runs with Lyapunov decay checks")]
struct Args {
    #[command(subcommand)]
    verb: VerbArg,
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Emit every N-th time level.
    #[arg(long, global = true)]
    stride: Option<usize>,
    /// Worker threads for line sweeps.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum VerbArg {
    /// Run one simulation and write CSV output.
    Run,
    /// Run the refinement study of the config.
    Study,
    /// Validate the config and report precondition status.
    Check,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { cli::EXIT_CONFIG as u8 } else { 0 });
        }
    };
    let Some(config) = args.config else {
        eprintln!("error: --config PATH is required");
        return ExitCode::from(cli::EXIT_CONFIG as u8);
    };
    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(cli::EXIT_RUNTIME as u8);
        }
    }
    let verb = match args.verb {
        VerbArg::Run => Verb::Run,
        VerbArg::Study => Verb::Study,
        VerbArg::Check => Verb::Check,
    };
    let ov = Overrides {
        out: args.out,
        stride: args.stride,
    };
    match cli::execute(verb, &config, &ov) {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
