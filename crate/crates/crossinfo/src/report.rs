//! Re-derives diagnostics from the mode dumps listed in a run manifest.

use std::path::Path;

use crossinfo_core::qinfo::{diagnose, Bipartition, DiagnosticsRecord, DEFAULT_SCHMIDT_RANK};

use crate::error::AppError;
use crate::formats::{write_csv, ModeDump};
use crate::pipeline::{diagnostics_header, diagnostics_row, dump_format_named, Manifest};

pub const REPORT_NAME: &str = "report_diagnostics.csv";

/// Reads every dump of the run in `dir`, recomputes its diagnostics and
/// writes them to [`REPORT_NAME`] in manifest order.
pub fn report(dir: &Path) -> Result<Vec<DiagnosticsRecord>, AppError> {
    let manifest = Manifest::read(dir)?;
    let rank = manifest
        .config
        .get("rank")
        .and_then(|v| v.as_u64())
        .map_or(DEFAULT_SCHMIDT_RANK, |r| r as usize);
    let mut records = Vec::with_capacity(manifest.dumps.len());
    for d in &manifest.dumps {
        let path = dir.join(&d.path);
        let format = dump_format_named(&d.format).ok_or_else(|| {
            AppError::io(&path, std::io::Error::other(format!("unknown dump format `{}`", d.format)))
        })?;
        let dump = ModeDump::read(&path, format).map_err(|e| AppError::io(&path, e))?;
        let bip = Bipartition::generic(dump.nx, dump.ny);
        let r = diagnose(d.parameter, d.branch, &dump.values, &bip, rank).map_err(|e| AppError::solver(d.parameter, e))?;
        records.push(r);
    }
    let out = dir.join(REPORT_NAME);
    write_csv(&out, &diagnostics_header(rank), records.iter().map(|r| diagnostics_row(r, rank)))
        .map_err(|e| AppError::io(&out, e))?;
    Ok(records)
}
