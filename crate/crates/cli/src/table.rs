//! Offline evaluation tables: CSV files with header `x1,...,xn,f`, one
//! evaluated point per row. Used to replay objectives that were evaluated
//! outside this tool; schemes whose plan points are missing from the table
//! are refused.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use simderiv_core::sampling::{EvalCache, SamplePlan};

pub struct EvalTable {
    pub n: usize,
    pub entries: Vec<(Vec<f64>, f64)>,
}

pub fn load_table(path: &Path) -> Result<EvalTable> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    let header = lines.next().context("empty table file")?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.len() < 2 || cols.last() != Some(&"f") {
        bail!("table header must be x1,...,xn,f");
    }
    let n = cols.len() - 1;
    for (i, c) in cols[..n].iter().enumerate() {
        let expect = format!("x{}", i + 1);
        if *c != expect {
            bail!("table header column {} must be {expect}, got {c}", i + 1);
        }
    }
    let mut entries = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != n + 1 {
            bail!("line {}: expected {} fields, got {}", lineno + 2, n + 1, fields.len());
        }
        let mut coords = Vec::with_capacity(n);
        for f in &fields[..n] {
            coords.push(
                f.parse::<f64>()
                    .with_context(|| format!("line {}: bad coordinate {f}", lineno + 2))?,
            );
        }
        let value = fields[n]
            .parse::<f64>()
            .with_context(|| format!("line {}: bad value", lineno + 2))?;
        entries.push((coords, value));
    }
    Ok(EvalTable { n, entries })
}

/// Populate a cache from the table and refuse plans it does not cover.
pub fn cache_for_plan(table: &EvalTable, plan: &SamplePlan) -> Result<EvalCache> {
    let mut cache = EvalCache::new();
    cache.insert_batch(table.entries.iter().cloned());
    for p in plan.iter() {
        if cache.get(&p.coords).is_none() {
            bail!(
                "table does not cover plan point [{}]; evaluate it (17-digit \
                 coordinates from `points` reparse exactly) and retry",
                p.coords
                    .iter()
                    .map(|x| crate::output::sci17(*x))
                    .collect::<Vec<_>>()
                    .join(", ")
            );
        }
    }
    Ok(cache)
}
