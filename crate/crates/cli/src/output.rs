//! Number formatting and output sinks.
//!
//! Human-readable tables print 6 significant digits; CSV data files print 17
//! significant digits so values reparse bit-identically; JSON uses
//! round-trip-exact float formatting.

use std::env;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

/// Environment variable naming the default directory for `--out` files
/// given as relative paths.
pub const OUT_DIR_ENV: &str = "SIMDERIV_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

/// 6 significant digits with trailing zeros trimmed; scientific notation
/// outside a readable magnitude window.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&mag) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// 17 significant digits; round-trips to the same f64 bits.
pub fn sci17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Resolve `--out`: relative paths land under [`OUT_DIR_ENV`] when set.
pub fn resolve_out_path(out: &Path) -> PathBuf {
    if out.is_relative() {
        if let Ok(dir) = env::var(OUT_DIR_ENV) {
            if !dir.is_empty() {
                return PathBuf::from(dir).join(out);
            }
        }
    }
    out.to_path_buf()
}

/// Write to the resolved `--out` file, or to stdout when absent.
pub fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            let path = resolve_out_path(path);
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    fs::create_dir_all(parent)
                        .with_context(|| format!("creating {}", parent.display()))?;
                }
            }
            fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
            Ok(())
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Render a row-major matrix block at table precision.
pub fn matrix_block(rows: usize, cols: usize, data: &[f64]) -> String {
    let mut s = String::new();
    for i in 0..rows {
        s.push_str("  ");
        for j in 0..cols {
            s.push_str(&format!("{:>14}", sig6(data[i * cols + j])));
        }
        s.push('\n');
    }
    s
}
