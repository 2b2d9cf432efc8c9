//! `qae`: run compression experiments, compute circuit descriptors and
//! summarise timings.
//!
//! Exit status is 0 on success, 2 for an invalid configuration or command
//! line, 1 when a run fails part-way.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use qae_core::ansatz::{AnsatzFamily, AnsatzSpec};
use qae_core::circuit::Circuit;
use qae_core::descriptors::{
    DescriptorConfig, DEFAULT_BINS, DEFAULT_ENTANGLING_SAMPLES, DEFAULT_EXPRESSIBILITY_SAMPLES,
};
use qae_core::experiment::{
    descriptor_report, report_dir, run_grid, timing_summary_csv, timing_summary_dir,
    ExperimentConfig, OUTPUT_ROOT_ENV,
};
use qae_core::Error;

#[derive(Parser)]
#[command(
    name = "qae",
    version,
    about = "Quantum autoencoder compression experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train and evaluate every cell of an experiment grid.
    Run {
        /// TOML experiment file.
        #[arg(long)]
        config: PathBuf,
        /// Root for relative output paths.
        #[arg(long, env = OUTPUT_ROOT_ENV)]
        output_root: Option<PathBuf>,
    },
    /// Expressibility and entangling capability of an ansatz.
    Descriptors {
        /// circuit1 | circuit2 | circuit3 | circuit1-dev3q | idle
        #[arg(long)]
        family: String,
        #[arg(long)]
        qubits: usize,
        #[arg(long, default_value_t = 1)]
        layers: usize,
        #[arg(long, default_value_t = DEFAULT_EXPRESSIBILITY_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_ENTANGLING_SAMPLES)]
        entangling_samples: usize,
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for the JSON report and histogram CSV.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Per-(circuit, layers) timing summary of finished runs, as CSV.
    Timing {
        #[arg(long)]
        dir: PathBuf,
        /// Also write the CSV here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summary tables for a run directory, plus plots when the renderer is installed.
    Report {
        #[arg(long)]
        dir: PathBuf,
    },
}

enum Failure {
    Usage(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e.to_string())
    }
}

fn run(config: PathBuf, output_root: Option<PathBuf>) -> Result<(), Failure> {
    let text = std::fs::read_to_string(&config)
        .map_err(|e| Failure::Usage(format!("{}: {e}", config.display())))?;
    let cfg = ExperimentConfig::parse_with_root(&text, output_root)
        .map_err(|e| Failure::Usage(format!("{}: {e}", config.display())))?;
    eprintln!(
        "{}: {} cells on {} -> {}",
        cfg.name,
        cfg.num_cells(),
        cfg.dataset.name(),
        cfg.output.display()
    );
    let mut started = Instant::now();
    run_grid(&cfg, |cell| {
        let m = &cell.manifest;
        eprintln!(
            "  {:<22} final loss {:>8.5}  median fidelity {:>7.4}  {:>8.2}s",
            cell.cell.dir_name(),
            m.final_loss.unwrap_or(f64::NAN),
            m.fidelity_median.unwrap_or(f64::NAN),
            started.elapsed().as_secs_f64()
        );
        started = Instant::now();
    })?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn descriptors(
    family: &str,
    qubits: usize,
    layers: usize,
    samples: usize,
    entangling_samples: usize,
    bins: usize,
    seed: u64,
    out: PathBuf,
) -> Result<(), Failure> {
    let (circuit, label) = if family == "idle" {
        let c = Circuit::new(qubits).map_err(|e| Failure::Usage(e.to_string()))?;
        (c, format!("idle-n{qubits}"))
    } else {
        let fam: AnsatzFamily = family
            .parse()
            .map_err(|e: Error| Failure::Usage(e.to_string()))?;
        let c = AnsatzSpec::new(fam, qubits, layers)
            .and_then(|s| s.build())
            .map_err(|e| Failure::Usage(e.to_string()))?;
        (c, format!("{fam}-n{qubits}-L{layers}"))
    };
    let expr = DescriptorConfig {
        num_samples: samples,
        num_bins: bins,
        seed,
    };
    let ent = DescriptorConfig {
        num_samples: entangling_samples,
        num_bins: bins,
        seed,
    };
    expr.validate()
        .and_then(|_| ent.validate())
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let art = descriptor_report(&circuit, &label, &expr, &ent, &out)?;
    let r = &art.report;
    println!(
        "{label}: expressibility {:.4} bits ({:.4} nats), entangling capability {:.4}",
        r.expressibility_bits, r.expressibility_nats, r.entangling_capability
    );
    println!(
        "wrote {} and {}",
        art.json.display(),
        art.histogram.display()
    );
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run {
            config,
            output_root,
        } => run(config, output_root),
        Command::Descriptors {
            family,
            qubits,
            layers,
            samples,
            entangling_samples,
            bins,
            seed,
            out,
        } => descriptors(
            &family,
            qubits,
            layers,
            samples,
            entangling_samples,
            bins,
            seed,
            out,
        ),
        Command::Timing { dir, out } => {
            let csv = timing_summary_csv(&timing_summary_dir(&dir)?);
            print!("{csv}");
            if let Some(path) = out {
                std::fs::write(&path, &csv)
                    .map_err(|e| Failure::Run(format!("{}: {e}", path.display())))?;
            }
            Ok(())
        }
        Command::Report { dir } => {
            let outcome = report_dir(&dir)?;
            for p in &outcome.written {
                println!("wrote {}", p.display());
            }
            if outcome.renderer_found {
                for p in &outcome.plots {
                    println!("rendered {}", p.display());
                }
            } else {
                eprintln!("plot renderer not found; wrote tables only");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
