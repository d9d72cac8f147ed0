use std::path::PathBuf;
use std::process::ExitCode;

use aurora_harness::output::{diagnose, write_run, write_sweep};
use aurora_harness::runner::{run_sweep, simulate};
use aurora_harness::{HarnessError, RunConfig};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "aurora", version, about = "Regularised MHD / Schrodinger approximation scheme")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one simulation and write its ledger and snapshots.
    Run {
        #[arg(short, long)]
        config: PathBuf,
        /// Output directory; overrides the config.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run a checked parameter sweep and write the convergence tables.
    Sweep {
        #[arg(short, long)]
        config: PathBuf,
        #[arg(long)]
        levels: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Exit nonzero when any member raised a flag or a difference failed to decrease.
        #[arg(long)]
        strict: bool,
    },
    /// Recompute diagnostics from a run directory.
    Diag {
        #[arg(short, long)]
        dir: PathBuf,
        #[arg(long)]
        strict: bool,
    },
}

fn decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn execute(cli: Cli) -> Result<(), HarnessError> {
    match cli.cmd {
        Cmd::Run { config, out } => {
            let cfg = RunConfig::load(&config)?;
            let run = simulate(&cfg, None)?;
            let dir = out.unwrap_or_else(|| cfg.output.dir.clone());
            write_run(&dir, &run)?;
            println!(
                "{}: {} steps to t = {:.6}, E(0) = {:.6e}, max residual {:.3e}",
                cfg.name, run.summary.steps, run.summary.t_stop, run.summary.e0, run.summary.max_residual
            );
            if let Some(tn) = run.summary.horizon {
                println!("horizon T^N = {tn:.6}");
            }
            for f in &run.flags {
                eprintln!("warning: {f}");
            }
            Ok(())
        }
        Cmd::Sweep { config, levels, out, strict } => {
            let cfg = RunConfig::load(&config)?;
            let res = run_sweep(&cfg, levels)?;
            let dir = out.unwrap_or_else(|| cfg.output.dir.clone());
            write_sweep(&dir, &res)?;
            println!("k,eps,alpha,N,rho_l1,psi_l2,probe_diff");
            for r in &res.convergence {
                println!("{},{:.4e},{:.4e},{},{:.6e},{:.6e},{:.6e}", r.k, r.eps, r.alpha, r.n_flow, r.rho_l1, r.psi_l2, r.probe_diff);
            }
            let mut flags: Vec<String> = res
                .runs
                .iter()
                .flat_map(|r| r.flags.iter().map(move |f| format!("{}: {f}", r.config.name)))
                .collect();
            let col = |f: fn(&aurora_harness::runner::ConvergenceRow) -> f64| res.convergence.iter().map(f).collect::<Vec<_>>();
            if !decreasing(&col(|r| r.rho_l1)) {
                flags.push("density differences do not decrease".into());
            }
            if !decreasing(&col(|r| r.psi_l2)) {
                flags.push("wave differences do not decrease".into());
            }
            if !decreasing(&col(|r| r.probe_diff)) {
                flags.push("probe differences do not decrease".into());
            }
            report(flags, strict)
        }
        Cmd::Diag { dir, strict } => {
            let d = diagnose(&dir)?;
            println!(
                "{} snapshots, mass drift {:.3e}, min rho {:.6e}, max residual {:.3e}, ledger mismatch {:.3e}",
                d.snapshots, d.mass_drift, d.min_rho, d.max_residual, d.ledger_mismatch
            );
            report(d.flags, strict)
        }
    }
}

fn report(flags: Vec<String>, strict: bool) -> Result<(), HarnessError> {
    for f in &flags {
        eprintln!("flag: {f}");
    }
    if strict && !flags.is_empty() {
        Err(HarnessError::Flags(flags))
    } else {
        Ok(())
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
