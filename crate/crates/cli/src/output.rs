//! Deterministic table emission.
//!
//! Every table opens with `#`-prefixed comment lines carrying the tool
//! version, the command, and the fully resolved configuration, so the
//! output alone reproduces the run. Data rows are comma-separated with
//! 17 significant digits, enough to round-trip an `f64` exactly:
//! repeated runs with the same configuration are byte-identical.

use std::io::Write;

use crate::config::RunConfig;
use crate::error::CliError;

/// One `f64` with 17 significant digits, e.g. `1.2500000000000000e-1`.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// The `#` comment block identifying the run.
pub fn provenance_header(command: &str, cfg: &RunConfig) -> String {
    let mut out = String::new();
    out.push_str(&format!("# mirror-sim {} {}\n", env!("CARGO_PKG_VERSION"), command));
    out.push_str("#\n");
    for line in cfg.to_toml().lines() {
        if line.is_empty() {
            out.push_str("#\n");
        } else {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
    }
    out
}

/// One data row, comma-separated.
pub fn csv_row(values: &[f64]) -> String {
    let mut row = String::new();
    for (k, v) in values.iter().enumerate() {
        if k > 0 {
            row.push(',');
        }
        row.push_str(&fmt17(*v));
    }
    row.push('\n');
    row
}

/// Writes the finished table to `path`, with `-` meaning stdout.
pub fn write_output(path: &str, content: &str) -> Result<(), CliError> {
    if path == "-" {
        let stdout = std::io::stdout();
        let mut lock = stdout.lock();
        lock.write_all(content.as_bytes())
            .and_then(|_| lock.flush())
            .map_err(|source| CliError::Io { path: "<stdout>".to_string(), source })
    } else {
        std::fs::write(path, content)
            .map_err(|source| CliError::Io { path: path.to_string(), source })
    }
}
