use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::Failure;

/// 17 significant digits, enough to round-trip any double.
pub fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

pub fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir)
        .map_err(|e| Failure::config(format!("cannot create {}: {e}", dir.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Failure::internal(format!("serializing {}: {e}", path.display())))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn write_jsonl<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), Failure> {
    let mut f = fs::File::create(path)?;
    for row in rows {
        let line = serde_json::to_string(row)
            .map_err(|e| Failure::internal(format!("serializing {}: {e}", path.display())))?;
        writeln!(f, "{line}")?;
    }
    Ok(())
}
