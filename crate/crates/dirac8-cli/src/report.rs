//! Stable artifact writers: JSON with struct-ordered keys, CSV with
//! 17-significant-digit locale-independent floats, no timestamps — byte
//! reproducibility is part of the output contract.

use std::path::Path;

use serde::Serialize;

use crate::error::{CliError, Result};

/// CSV/with-dump float format: 17 significant digits, round-trip exact.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// A complex value in the matrix dump format: a `[re, im]` pair.
pub fn dump_complex(z: dirac8::scalar::C<f64>) -> [f64; 2] {
    [z.re, z.im]
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path.display().to_string(), e))
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Config(format!("serialization failed: {e}")))?;
    text.push('\n');
    write_text(path, &text)
}

/// CSV with a header row; cells must already be comma-free.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut text = String::new();
    text.push_str(&header.join(","));
    text.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        text.push_str(&row.join(","));
        text.push('\n');
    }
    write_text(path, &text)
}
