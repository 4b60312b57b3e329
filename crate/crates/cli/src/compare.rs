//! Merges run summaries into one comparison table, one row per method.

use std::path::{Path, PathBuf};

use frackbench_core::error::Error;
use frackbench_core::postproc::{parse_summary_csv, summary_csv, SummaryRow};

pub fn compare(inputs: &[PathBuf], out: Option<&Path>) -> Result<(), Error> {
    let mut rows: Vec<SummaryRow> = Vec::new();
    for path in inputs {
        let text = std::fs::read_to_string(path)?;
        rows.extend(parse_summary_csv(&text)?);
    }
    if let Some(first) = rows.first() {
        let scenario = first.scenario.clone();
        if let Some(bad) = rows.iter().find(|r| r.scenario != scenario) {
            return Err(Error::PostProc(format!(
                "cannot compare runs of different scenarios: `{}` vs `{}`",
                scenario, bad.scenario
            )));
        }
    }
    let csv = summary_csv(&rows);
    if let Some(path) = out {
        std::fs::write(path, &csv)?;
    }
    print!("{csv}");
    Ok(())
}
