//! CSV forms of training results. Floats use Rust's shortest round-trip
//! formatting, so identical runs give identical bytes.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::train::{EpochRecord, Evaluation};

pub const LOSS_CSV_HEADER: &str = "epoch,mean_loss,jobs,seconds";
pub const FIDELITY_CSV_HEADER: &str = "image_id,fidelity";

pub fn write_loss_row<W: Write>(out: &mut W, record: &EpochRecord) -> std::io::Result<()> {
    writeln!(
        out,
        "{},{},{},{:.6}",
        record.epoch, record.mean_loss, record.jobs_executed, record.wall_clock_seconds
    )
}

pub fn loss_csv(records: &[EpochRecord]) -> String {
    let mut out = Vec::new();
    writeln!(out, "{LOSS_CSV_HEADER}").expect("write to vec");
    for r in records {
        write_loss_row(&mut out, r).expect("write to vec");
    }
    String::from_utf8(out).expect("ascii csv")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityRow {
    pub image_id: usize,
    pub fidelity: f64,
}

impl From<&Evaluation> for FidelityRow {
    fn from(e: &Evaluation) -> Self {
        Self {
            image_id: e.image_id,
            fidelity: e.fidelity,
        }
    }
}

pub fn fidelity_csv(rows: &[FidelityRow]) -> String {
    let mut s = format!("{FIDELITY_CSV_HEADER}\n");
    for r in rows {
        s.push_str(&format!("{},{}\n", r.image_id, r.fidelity));
    }
    s
}
