use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use slfem::driver::{ensure_parent_dir, read_config, run_single, run_sweep, selftest};

#[derive(Parser)]
#[command(name = "slfem", version, about = "Strain-limiting elasticity edge-crack benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one configuration and write probe, field and report files.
    Solve {
        config: PathBuf,
        #[arg(long)]
        output_prefix: Option<String>,
    },
    /// Run one solve per value of a swept key and write a sweep table.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        key: String,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        values: Vec<String>,
        #[arg(long)]
        output_prefix: Option<String>,
    },
    /// Run the built-in invariant checks.
    Selftest,
}

fn run(cli: Cli) -> slfem::Result<bool> {
    match cli.command {
        Command::Solve { config, output_prefix } => {
            let mut cfg = read_config(&config)?;
            if let Some(p) = output_prefix {
                cfg.output_prefix = p;
            }
            ensure_parent_dir(&cfg.output_prefix)?;
            let (run, files) = run_single(&cfg)?;
            println!("converged: {} after {} iterations", run.converged(), run.report.iterations);
            if let Some(probe) = &run.probe {
                let t = &probe.tip_value;
                println!("tip sigma_yy {:.6e}  eps_yy {:.6e}  W {:.6e}", t.sigma.yy, t.eps.yy, t.w);
            }
            for note in &run.notes {
                println!("note: {note}");
            }
            for f in files {
                println!("wrote {}", f.display());
            }
            Ok(run.converged())
        }
        Command::Sweep { config, key, values, output_prefix } => {
            let mut cfg = read_config(&config)?;
            if let Some(p) = output_prefix {
                cfg.output_prefix = p;
            }
            ensure_parent_dir(&cfg.output_prefix)?;
            let res = run_sweep(&cfg, &key, &values)?;
            for r in &res.runs {
                println!(
                    "{key}={}: converged {} ({} iterations)",
                    r.config.get(&key).unwrap_or_default(),
                    r.converged(),
                    r.report.iterations
                );
            }
            println!("wrote {}", res.sweep_csv.display());
            Ok(res.all_converged())
        }
        Command::Selftest => {
            let checks = selftest()?;
            for c in &checks {
                println!("{} {} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            Ok(checks.iter().all(|c| c.passed))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
