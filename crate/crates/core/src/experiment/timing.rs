//! Per-(family, layers) timing summary over finished cells.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::grid::{read_manifest, CellManifest, MANIFEST_FILE};
use crate::ansatz::AnsatzFamily;
use crate::error::{Error, Result};

pub const TIMING_SUMMARY_HEADER: &str =
    "family,layers,runs,epochs,mean_epoch_seconds,seconds_per_job,total_jobs,jobs_consistent,ratio_to_circuit1";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingRow {
    pub family: AnsatzFamily,
    pub layers: usize,
    pub runs: usize,
    pub epochs: usize,
    pub mean_epoch_seconds: f64,
    pub seconds_per_job: f64,
    pub total_jobs: u64,
    /// Every run's job total equals `epochs · (2·N_params + 1) · N_images · N_iter`.
    pub jobs_consistent: bool,
    /// Mean epoch time relative to circuit1 at the same layer count.
    pub ratio_to_circuit1: Option<f64>,
}

/// Cell directories (those holding a manifest) at or below `root`, sorted.
pub fn find_cell_dirs(root: &Path) -> Result<Vec<PathBuf>> {
    let mut found = Vec::new();
    collect(root, 0, &mut found)?;
    found.sort();
    Ok(found)
}

fn collect(dir: &Path, depth: usize, found: &mut Vec<PathBuf>) -> Result<()> {
    if dir.join(MANIFEST_FILE).is_file() {
        found.push(dir.to_path_buf());
        return Ok(());
    }
    if depth >= 4 {
        return Ok(());
    }
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_dir() {
            collect(&path, depth + 1, found)?;
        }
    }
    Ok(())
}

pub fn jobs_consistent(m: &CellManifest) -> bool {
    let per_image = 2 * m.num_params as u64 + 1;
    let per_epoch = per_image * m.num_train_images as u64 * m.n_iter as u64;
    m.jobs_per_image == per_image
        && m.expected_jobs_per_epoch == per_epoch
        && m.records.len() == m.epochs
        && m.records.iter().all(|r| r.jobs == per_epoch)
        && m.total_jobs == per_epoch * m.epochs as u64
}

pub fn timing_summary(manifests: &[CellManifest]) -> Vec<TimingRow> {
    let mut groups: BTreeMap<(usize, String), Vec<&CellManifest>> = BTreeMap::new();
    for m in manifests {
        groups
            .entry((m.cell.layers, m.cell.family.name().to_string()))
            .or_default()
            .push(m);
    }
    let mut rows: Vec<TimingRow> = groups
        .into_values()
        .map(|ms| {
            let epochs: usize = ms.iter().map(|m| m.records.len()).sum();
            let seconds: f64 = ms
                .iter()
                .flat_map(|m| m.records.iter().map(|r| r.seconds))
                .sum();
            let jobs: u64 = ms.iter().map(|m| m.total_jobs).sum();
            TimingRow {
                family: ms[0].cell.family,
                layers: ms[0].cell.layers,
                runs: ms.len(),
                epochs,
                mean_epoch_seconds: if epochs == 0 {
                    0.0
                } else {
                    seconds / epochs as f64
                },
                seconds_per_job: if jobs == 0 {
                    0.0
                } else {
                    seconds / jobs as f64
                },
                total_jobs: jobs,
                jobs_consistent: ms.iter().all(|m| jobs_consistent(m)),
                ratio_to_circuit1: None,
            }
        })
        .collect();
    let baseline: BTreeMap<usize, f64> = rows
        .iter()
        .filter(|r| r.family == AnsatzFamily::Circuit1 && r.mean_epoch_seconds > 0.0)
        .map(|r| (r.layers, r.mean_epoch_seconds))
        .collect();
    for r in &mut rows {
        r.ratio_to_circuit1 = baseline.get(&r.layers).map(|b| r.mean_epoch_seconds / b);
    }
    rows
}

pub fn timing_summary_dir(root: &Path) -> Result<Vec<TimingRow>> {
    let manifests = find_cell_dirs(root)?
        .iter()
        .map(|d| read_manifest(d))
        .collect::<Result<Vec<_>>>()?;
    if manifests.is_empty() {
        return Err(Error::domain(format!(
            "no run manifests found under {}",
            root.display()
        )));
    }
    Ok(timing_summary(&manifests))
}

pub fn timing_summary_csv(rows: &[TimingRow]) -> String {
    let mut s = format!("{TIMING_SUMMARY_HEADER}\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{:.6},{:.9},{},{},{}\n",
            r.family,
            r.layers,
            r.runs,
            r.epochs,
            r.mean_epoch_seconds,
            r.seconds_per_job,
            r.total_jobs,
            r.jobs_consistent,
            r.ratio_to_circuit1
                .map_or(String::new(), |v| format!("{v:.4}"))
        ));
    }
    s
}
