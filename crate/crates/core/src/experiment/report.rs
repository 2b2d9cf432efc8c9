//! Descriptor artifacts and the `report` pass over a run directory.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use super::grid::{read_manifest, DENSITY_FILE, FIDELITY_FILE, LOSS_FILE};
use super::timing::{find_cell_dirs, timing_summary, timing_summary_csv};
use crate::circuit::Circuit;
use crate::descriptors::{describe, histogram_csv, DescriptorConfig, DescriptorReport};
use crate::error::{Error, Result};

/// Environment variable naming the plotting executable.
pub const RENDER_ENV: &str = "QAE_RENDER";
pub const DEFAULT_RENDER: &str = "qae-render";

pub const SUMMARY_CSV_HEADER: &str =
    "cell,family,layers,n_input,n_latent,final_loss,best_loss,fidelity_min,fidelity_median,fidelity_max";

#[derive(Debug, Clone)]
pub struct DescriptorArtifacts {
    pub report: DescriptorReport,
    pub json: PathBuf,
    pub histogram: PathBuf,
}

/// Computes descriptors of `circuit` and writes `{label}-descriptors.json`
/// and `{label}-histogram.csv` into `out_dir`.
pub fn descriptor_report(
    circuit: &Circuit,
    label: &str,
    expressibility: &DescriptorConfig,
    entangling: &DescriptorConfig,
    out_dir: &Path,
) -> Result<DescriptorArtifacts> {
    let report = describe(circuit, expressibility, entangling)?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let json = out_dir.join(format!("{label}-descriptors.json"));
    let histogram = out_dir.join(format!("{label}-histogram.csv"));
    fs::write(&json, serde_json::to_string_pretty(&report)?).map_err(|e| Error::io(&json, e))?;
    fs::write(&histogram, histogram_csv(&report.histogram))
        .map_err(|e| Error::io(&histogram, e))?;
    Ok(DescriptorArtifacts {
        report,
        json,
        histogram,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

#[derive(Debug, Clone, Default)]
pub struct ReportOutcome {
    pub cells: usize,
    pub written: Vec<PathBuf>,
    /// Plot files produced by the renderer; empty when it is not installed.
    pub plots: Vec<PathBuf>,
    pub renderer_found: bool,
}

/// Writes `summary.csv` and `timing_summary.csv` under `root`, then asks the
/// renderer (if installed) for loss curves, a fidelity box plot and
/// density heatmaps. The renderer is `$QAE_RENDER`, else `qae-render`.
pub fn report_dir(root: &Path) -> Result<ReportOutcome> {
    let renderer = std::env::var_os(RENDER_ENV).unwrap_or_else(|| DEFAULT_RENDER.into());
    report_dir_with(root, Path::new(&renderer))
}

pub fn report_dir_with(root: &Path, renderer: &Path) -> Result<ReportOutcome> {
    let dirs = find_cell_dirs(root)?;
    if dirs.is_empty() {
        return Err(Error::domain(format!(
            "no run manifests found under {}",
            root.display()
        )));
    }
    let manifests = dirs
        .iter()
        .map(|d| read_manifest(d))
        .collect::<Result<Vec<_>>>()?;

    let mut summary = format!("{SUMMARY_CSV_HEADER}\n");
    for (dir, m) in dirs.iter().zip(&manifests) {
        let name = dir
            .file_name()
            .map_or_else(String::new, |n| n.to_string_lossy().into_owned());
        summary.push_str(&format!(
            "{name},{},{},{},{},{},{},{},{},{}\n",
            m.cell.family,
            m.cell.layers,
            m.cell.n_input,
            m.cell.n_latent,
            opt(m.final_loss),
            opt(m.best_loss),
            opt(m.fidelity_min),
            opt(m.fidelity_median),
            opt(m.fidelity_max),
        ));
    }
    let mut outcome = ReportOutcome {
        cells: dirs.len(),
        ..Default::default()
    };
    let summary_path = root.join("summary.csv");
    fs::write(&summary_path, summary).map_err(|e| Error::io(&summary_path, e))?;
    outcome.written.push(summary_path);
    let timing_path = root.join("timing_summary.csv");
    fs::write(
        &timing_path,
        timing_summary_csv(&timing_summary(&manifests)),
    )
    .map_err(|e| Error::io(&timing_path, e))?;
    outcome.written.push(timing_path);

    let plots_dir = root.join("plots");
    let mut jobs: Vec<(&str, Vec<PathBuf>, PathBuf)> = Vec::new();
    let losses: Vec<PathBuf> = dirs.iter().map(|d| d.join(LOSS_FILE)).collect();
    jobs.push(("loss_curves", losses, plots_dir.join("loss_curves.png")));
    let fids: Vec<PathBuf> = dirs
        .iter()
        .map(|d| d.join(FIDELITY_FILE))
        .filter(|p| p.is_file())
        .collect();
    jobs.push(("fidelity_box", fids, plots_dir.join("fidelity_box.png")));
    for d in &dirs {
        let density = d.join(DENSITY_FILE);
        if density.is_file() {
            let name = d
                .file_name()
                .map_or_else(String::new, |n| n.to_string_lossy().into_owned());
            jobs.push((
                "dm_heatmap",
                vec![density],
                plots_dir.join(format!("{name}-density.png")),
            ));
        }
    }

    for (kind, inputs, out) in jobs {
        if inputs.is_empty() {
            continue;
        }
        if !outcome.renderer_found {
            fs::create_dir_all(&plots_dir).map_err(|e| Error::io(&plots_dir, e))?;
        }
        let status = Command::new(renderer)
            .arg("render")
            .arg("--kind")
            .arg(kind)
            .arg("--in")
            .args(&inputs)
            .arg("--out")
            .arg(&out)
            .status();
        match status {
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                let _ = fs::remove_dir(&plots_dir);
                return Ok(outcome);
            }
            Err(e) => return Err(Error::io(renderer, e)),
            Ok(s) if !s.success() => {
                return Err(Error::domain(format!(
                    "{} failed on {kind} ({s})",
                    renderer.display()
                )))
            }
            Ok(_) => {
                outcome.renderer_found = true;
                outcome.plots.push(out);
            }
        }
    }
    Ok(outcome)
}
