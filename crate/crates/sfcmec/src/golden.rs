//! Golden oracle values: scenario fingerprint and packet size to the
//! optimal objective.

use std::path::Path;

use anyhow::{Context, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GoldenEntry {
    pub fingerprint: String,
    pub beta: f64,
    pub objective: f64,
}

pub fn read(path: &Path) -> Result<Vec<GoldenEntry>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let mut out = Vec::new();
    for record in r.records() {
        let record = record?;
        let field = |i: usize| record.get(i).with_context(|| format!("short row in {}", path.display()));
        out.push(GoldenEntry {
            fingerprint: field(0)?.to_string(),
            beta: field(1)?.parse()?,
            objective: field(2)?.parse()?,
        });
    }
    Ok(out)
}

pub fn lookup(path: &Path, fingerprint: &str, beta: f64) -> Result<Option<f64>> {
    Ok(read(path)?.into_iter().find(|e| e.fingerprint == fingerprint && e.beta == beta).map(|e| e.objective))
}
