use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use sun_coherence::cli::config::RunConfig;
use sun_coherence::cli::{exit_code, run, verify};

#[derive(Parser)]
#[command(name = "sundyn", version, about = "SU(N) coherence-vector dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate the system described by a TOML config.
    Run { config: PathBuf },
    /// Cross-check the commutator and torque routes on random Hamiltonians.
    Verify {
        #[arg(long, default_value_t = 5)]
        n_max: usize,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { config } => RunConfig::load(&config).and_then(|c| {
            let dir = std::env::var_os(run::OUTPUT_DIR_ENV).map(PathBuf::from);
            run::run(&c, dir.as_deref())
        }),
        Command::Verify { n_max, trials, seed } => match verify::verify(n_max, trials as usize, seed) {
            Ok(report) => {
                print!("{report}");
                if report.passed() {
                    return ExitCode::SUCCESS;
                }
                for f in report.failures() {
                    eprintln!("{f}");
                }
                return ExitCode::from(1);
            }
            Err(e) => Err(e),
        },
    };
    match outcome {
        Ok((report, files)) => {
            println!("frame: {}", report.frame_name);
            for d in &report.deviations {
                println!("max |{} - {}| = {:.3e}", d.a, d.b, d.max_abs);
            }
            for d in &report.drifts {
                println!("{} norm drift {:.3e}", d.method, d.norm_sq);
            }
            for f in files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
