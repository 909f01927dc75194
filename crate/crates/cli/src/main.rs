use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use hypflow_cli::commands::{cmd_render, cmd_resume, cmd_run_batch, cmd_verify, Injection, RunArtifacts};
use hypflow_cli::config::parse_config;

#[derive(Parser)]
#[command(name = "hypflow", version, about = "Curvature flows of convex curves in the hyperbolic plane")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more scenario files.
    Run {
        /// Scenario file; repeat to run several concurrently.
        #[arg(long, required = true)]
        config: Vec<PathBuf>,
        /// Output directory. With several configs, each gets a subdirectory named after its file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// `key=value` applied after the file.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Continue a run from a snapshot curve.
    Resume {
        /// `curve_<step>.csv` with its `.json` sidecar.
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Self-checks against independent references.
    Verify {
        /// flip-rhs-sign or transpose-chebyshev.
        #[arg(long)]
        inject: Option<Injection>,
    },
    /// Draw a curve file in the Poincaré disk.
    Render {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Hyperbolic radius of a reference circle about the pole.
        #[arg(long)]
        limit_radius: Option<f64>,
    },
}

fn report(a: &RunArtifacts) {
    let s = &a.summary;
    println!(
        "{}: {:?} at t = {} after {} steps (deficit {:.3e})",
        a.out_dir.display(),
        s.reason,
        s.t_final,
        s.steps,
        s.final_summary.deficit
    );
    if let Some(f) = &s.failure {
        println!("  {f}");
    }
}

fn with_out(overrides: &[String], out: Option<PathBuf>) -> Vec<String> {
    let mut all = overrides.to_vec();
    if let Some(out) = out {
        all.push(format!("out={}", out.display()));
    }
    all
}

fn main_inner() -> Result<i32> {
    match Cli::parse().command {
        Command::Run { config, out, overrides } => {
            let single = config.len() == 1;
            let scenarios = config
                .iter()
                .map(|path| {
                    let dir = out.clone().map(|o| {
                        if single {
                            o
                        } else {
                            o.join(path.file_stem().unwrap_or(path.as_os_str()))
                        }
                    });
                    parse_config(path, &with_out(&overrides, dir))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut code = 0;
            for result in cmd_run_batch(&scenarios)? {
                match result {
                    Ok(a) => {
                        report(&a);
                        if code == 0 {
                            code = a.exit_code();
                        }
                    }
                    Err(e) => {
                        eprintln!("error: {e:#}");
                        code = 1;
                    }
                }
            }
            Ok(code)
        }
        Command::Resume { snapshot, out, overrides } => {
            let a = cmd_resume(&snapshot, &with_out(&overrides, out))?;
            report(&a);
            Ok(a.exit_code())
        }
        Command::Verify { inject } => {
            let r = cmd_verify(inject)?;
            print!("{}", r.table());
            Ok(if r.passed() { 0 } else { 1 })
        }
        Command::Render { curve, out, limit_radius } => {
            cmd_render(&curve, &out, limit_radius)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
