//! Grid execution: one directory per (family, layers, latent) cell with
//! `manifest.json`, `loss.csv`, `fidelity.csv`, `density.json` and
//! `timing.csv`.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::ansatz::{AnsatzFamily, AnsatzSpec};
use crate::datasets::{make_split, make_split_with_indices, DatasetSplit};
use crate::error::{Error, Result};
use crate::quantum::{pure_density, DensityMatrix};
use crate::trainer::{
    evaluate, fidelity_csv, train_with_observer, write_loss_row, CompressionConfig, EpochRecord,
    Evaluator, FidelityRow, TrainRun, LOSS_CSV_HEADER,
};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const LOSS_FILE: &str = "loss.csv";
pub const FIDELITY_FILE: &str = "fidelity.csv";
pub const DENSITY_FILE: &str = "density.json";
pub const TIMING_FILE: &str = "timing.csv";
pub const TIMING_CSV_HEADER: &str = "epoch,seconds,jobs,seconds_per_job";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub family: AnsatzFamily,
    pub layers: usize,
    pub n_input: usize,
    pub n_latent: usize,
}

impl Cell {
    pub fn dir_name(&self) -> String {
        format!(
            "{}-L{}-{}to{}",
            self.family, self.layers, self.n_input, self.n_latent
        )
    }
}

pub fn cells(config: &ExperimentConfig) -> Vec<Cell> {
    let n_input = config.dataset.num_qubits();
    let mut out = Vec::with_capacity(config.num_cells());
    for &family in &config.families {
        for &layers in &config.layers {
            for &n_latent in &config.latent_qubits {
                out.push(Cell {
                    family,
                    layers,
                    n_input,
                    n_latent,
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpochSummary {
    pub epoch: usize,
    pub mean_loss: f64,
    pub jobs: u64,
    pub seconds: f64,
}

/// `manifest.json` of one cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellManifest {
    pub experiment: String,
    pub dataset: String,
    pub cell: Cell,
    pub learning_rate: f64,
    pub epochs: usize,
    pub n_iter: usize,
    pub batch_size: usize,
    pub trash: Vec<usize>,
    pub eval_mode: crate::trainer::EvalMode,
    pub split_seed: u64,
    pub init_seed: u64,
    pub train_indices: Vec<usize>,
    pub test_ids: Vec<usize>,
    pub num_train_images: usize,
    pub num_params: usize,
    pub jobs_per_image: u64,
    /// Jobs per epoch predicted by `jobs_per_image · images · n_iter`.
    pub expected_jobs_per_epoch: u64,
    pub total_jobs: u64,
    pub total_seconds: f64,
    pub best_epoch: Option<usize>,
    pub best_loss: Option<f64>,
    pub final_loss: Option<f64>,
    pub initial_theta: Vec<f64>,
    pub best_theta: Vec<f64>,
    pub records: Vec<EpochSummary>,
    pub fidelity_min: Option<f64>,
    pub fidelity_median: Option<f64>,
    pub fidelity_max: Option<f64>,
}

#[derive(Debug, Serialize)]
struct DensityDump<'a> {
    image_id: usize,
    width: usize,
    height: usize,
    pixels: &'a [u8],
    fidelity: f64,
    original: DensityMatrix,
    latent: &'a DensityMatrix,
    decompressed: &'a DensityMatrix,
}

/// Outcome of one grid cell.
#[derive(Debug, Clone)]
pub struct CellResult {
    pub cell: Cell,
    pub dir: PathBuf,
    pub run: TrainRun,
    pub fidelities: Vec<FidelityRow>,
    pub manifest: CellManifest,
}

pub fn split_for(config: &ExperimentConfig) -> Result<DatasetSplit> {
    let images = config.dataset.images();
    match &config.train_indices {
        Some(idx) => make_split_with_indices(
            &images,
            idx,
            config.replication,
            config.batch_size,
            config.split_seed,
        ),
        None => make_split(
            &images,
            config.train_count,
            config.replication,
            config.batch_size,
            config.split_seed,
        ),
    }
}

pub fn compression_config(config: &ExperimentConfig, cell: &Cell) -> Result<CompressionConfig> {
    let spec = AnsatzSpec::new(cell.family, cell.n_input, cell.layers)?;
    let mut c = CompressionConfig::new(spec, cell.n_latent)?;
    c.learning_rate = config.learning_rate;
    c.epochs = config.epochs;
    c.n_iter = config.n_iter;
    c.batch_size = config.batch_size;
    c.eval_mode = config.eval_mode;
    c.init_seed = config.init_seed;
    c.validate()?;
    Ok(c)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub(crate) fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[m]
    } else {
        (values[m - 1] + values[m]) / 2.0
    })
}

/// Trains and evaluates one cell, writing its artifacts under `root`.
/// `loss.csv` grows one flushed row per epoch.
pub fn run_cell(
    config: &ExperimentConfig,
    split: &DatasetSplit,
    cell: &Cell,
    root: &Path,
) -> Result<CellResult> {
    let compression = compression_config(config, cell)?;
    let dir = root.join(cell.dir_name());
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;

    let loss_path = dir.join(LOSS_FILE);
    let mut loss = BufWriter::new(File::create(&loss_path).map_err(|e| Error::io(&loss_path, e))?);
    writeln!(loss, "{LOSS_CSV_HEADER}").map_err(|e| Error::io(&loss_path, e))?;
    loss.flush().map_err(|e| Error::io(&loss_path, e))?;
    let run = train_with_observer(split, &compression, |record: &EpochRecord| {
        write_loss_row(&mut loss, record)
            .and_then(|_| loss.flush())
            .map_err(|e| Error::io(&loss_path, e))
    })?;
    drop(loss);

    let evaluations = evaluate(&run, &split.test)?;
    let fidelities: Vec<FidelityRow> = evaluations.iter().map(FidelityRow::from).collect();
    write_file(&dir.join(FIDELITY_FILE), &fidelity_csv(&fidelities))?;

    if let (Some(ev), Some(img)) = (evaluations.first(), split.test.first()) {
        let dump = DensityDump {
            image_id: img.id,
            width: img.image.width(),
            height: img.image.height(),
            pixels: img.image.pixels(),
            fidelity: ev.fidelity,
            original: pure_density(&img.state),
            latent: &ev.latent,
            decompressed: &ev.decompressed,
        };
        write_file(&dir.join(DENSITY_FILE), &serde_json::to_string(&dump)?)?;
    }

    let mut timing = format!("{TIMING_CSV_HEADER}\n");
    for r in &run.records {
        let per_job = if r.jobs_executed == 0 {
            0.0
        } else {
            r.wall_clock_seconds / r.jobs_executed as f64
        };
        timing.push_str(&format!(
            "{},{:.6},{},{:.9}\n",
            r.epoch, r.wall_clock_seconds, r.jobs_executed, per_job
        ));
    }
    write_file(&dir.join(TIMING_FILE), &timing)?;

    let jobs_per_image = Evaluator::new(&compression)?.jobs_per_image();
    let mut fid_values: Vec<f64> = fidelities.iter().map(|f| f.fidelity).collect();
    let manifest = CellManifest {
        experiment: config.name.clone(),
        dataset: config.dataset.name().to_string(),
        cell: *cell,
        learning_rate: config.learning_rate,
        epochs: config.epochs,
        n_iter: config.n_iter,
        batch_size: config.batch_size,
        trash: compression.trash.indices().to_vec(),
        eval_mode: config.eval_mode,
        split_seed: split.seed,
        init_seed: config.init_seed,
        train_indices: split.train_indices.clone(),
        test_ids: split.test.iter().map(|e| e.id).collect(),
        num_train_images: split.train.len(),
        num_params: run.initial_theta.len(),
        jobs_per_image,
        expected_jobs_per_epoch: jobs_per_image * split.train.len() as u64 * config.n_iter as u64,
        total_jobs: run.total_jobs(),
        total_seconds: run.records.iter().map(|r| r.wall_clock_seconds).sum(),
        best_epoch: run.best_epoch,
        best_loss: run.best_loss(),
        final_loss: run.final_loss(),
        initial_theta: run.initial_theta.clone(),
        best_theta: run.best_theta.clone(),
        records: run
            .records
            .iter()
            .map(|r| EpochSummary {
                epoch: r.epoch,
                mean_loss: r.mean_loss,
                jobs: r.jobs_executed,
                seconds: r.wall_clock_seconds,
            })
            .collect(),
        fidelity_min: fid_values.iter().copied().min_by(f64::total_cmp),
        fidelity_max: fid_values.iter().copied().max_by(f64::total_cmp),
        fidelity_median: median(&mut fid_values),
    };
    write_file(
        &dir.join(MANIFEST_FILE),
        &serde_json::to_string_pretty(&manifest)?,
    )?;

    Ok(CellResult {
        cell: *cell,
        dir,
        run,
        fidelities,
        manifest,
    })
}

/// Runs every cell in order. On failure, cells already finished keep their
/// artifacts and the error is returned.
pub fn run_grid<F>(config: &ExperimentConfig, mut on_cell: F) -> Result<Vec<CellResult>>
where
    F: FnMut(&CellResult),
{
    config.validate()?;
    let split = split_for(config)?;
    fs::create_dir_all(&config.output).map_err(|e| Error::io(&config.output, e))?;
    write_file(
        &config.output.join("experiment.json"),
        &serde_json::to_string_pretty(config)?,
    )?;
    let mut results = Vec::new();
    for cell in cells(config) {
        let result = run_cell(config, &split, &cell, &config.output)?;
        on_cell(&result);
        results.push(result);
    }
    Ok(results)
}

pub fn read_manifest(dir: &Path) -> Result<CellManifest> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    Ok(serde_json::from_str(&text)?)
}
