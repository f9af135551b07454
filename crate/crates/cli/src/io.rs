use std::fs;
use std::io::Write;
use std::path::Path;

use qnabla_core::{MatrixWindow, SeqWindow};
use serde_json::{Number, Value};

use crate::args::Format;
use crate::error::{CliError, Result};

/// A rendered result, ready in both output formats.
pub struct Artifact {
    pub json: Value,
    pub csv: String,
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_number(text: &str, line: usize) -> Result<f64> {
    text.trim().parse::<f64>().map_err(|_| CliError::Input {
        name: "input",
        reason: format!("line {line}: `{}` is not a number", text.trim()),
    })
}

fn json_error(e: serde_json::Error) -> CliError {
    CliError::Input {
        name: "input",
        reason: format!("malformed JSON: {e}"),
    }
}

/// A JSON array of numbers, or one number per line (blank lines ignored).
pub fn read_sequence(path: &Path) -> Result<SeqWindow> {
    let text = read_text(path)?;
    let values: Vec<f64> = if text.trim_start().starts_with('[') {
        serde_json::from_str(&text).map_err(json_error)?
    } else {
        text.lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| parse_number(l, i + 1))
            .collect::<Result<_>>()?
    };
    Ok(SeqWindow::new(values)?)
}

/// A JSON array of row arrays, or one comma-separated row per line.
pub fn read_matrix(path: &Path) -> Result<MatrixWindow> {
    let text = read_text(path)?;
    let rows: Vec<Vec<f64>> = if text.trim_start().starts_with('[') {
        serde_json::from_str(&text).map_err(json_error)?
    } else {
        text.lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| l.split(',').map(|cell| parse_number(cell, i + 1)).collect())
            .collect::<Result<_>>()?
    };
    Ok(MatrixWindow::from_rows(rows)?)
}

/// Shortest round-trip decimal form, with negative zero printed as `0`.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v}")
    }
}

fn normalize_zeros(value: &mut Value) {
    match value {
        Value::Number(n) => {
            if n.as_f64() == Some(0.0) && n.as_f64().is_some_and(f64::is_sign_negative) {
                *n = Number::from_f64(0.0).expect("zero is finite");
            }
        }
        Value::Array(items) => items.iter_mut().for_each(normalize_zeros),
        Value::Object(map) => map.values_mut().for_each(normalize_zeros),
        _ => {}
    }
}

fn render(artifact: Artifact, format: Format) -> String {
    match format {
        Format::Json => {
            let mut json = artifact.json;
            normalize_zeros(&mut json);
            let mut s = serde_json::to_string_pretty(&json).expect("JSON values always serialize");
            s.push('\n');
            s
        }
        Format::Csv => artifact.csv,
    }
}

pub fn emit(artifact: Artifact, format: Format, output: Option<&Path>) -> Result<()> {
    let text = render(artifact, format);
    match output {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(CliError::Stdout)
        }
    }
}
