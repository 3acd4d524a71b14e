use std::path::{Path, PathBuf};

use markov2::Error;

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_VALIDATION: u8 = 3;
pub const EXIT_NO_CONVERGENCE: u8 = 4;
pub const EXIT_HYPOTHESIS: u8 = 5;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse(_) | Error::ShapeMismatch(_) => EXIT_PARSE,
            Error::NegativeEntry(..)
            | Error::EntryAboveOne(..)
            | Error::NonFiniteEntry(..)
            | Error::FiberSumViolation(..)
            | Error::NotOnSimplex(_) => EXIT_VALIDATION,
            Error::MaxIterationsExceeded { .. }
            | Error::NoRootInUnitInterval { .. }
            | Error::TheoryViolation(..)
            | Error::NumericalFailure => EXIT_NO_CONVERGENCE,
            Error::HypothesisNotSatisfied { .. } => EXIT_HYPOTHESIS,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// `v` with `digits` significant digits, e.g. `0.3333333333`.
pub fn significant(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let magnitude = v.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{v:.decimals$}")
}

/// Four significant digits without trailing zeros, e.g. `0.2` or `0.1667`.
pub fn short(v: f64) -> String {
    let s = significant(v, 4);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn vector(x: &[f64]) -> String {
    let cells: Vec<String> = x.iter().map(|&v| significant(v, 10)).collect();
    format!("({})", cells.join(", "))
}

/// Relative paths land in `$MARKOV2_OUT_DIR` when it is set.
pub fn output_path(given: Option<&Path>, default_name: &str) -> PathBuf {
    let path = given.map(Path::to_path_buf).unwrap_or_else(|| default_name.into());
    match std::env::var_os(crate::OUT_DIR_VAR) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path,
    }
}

/// `out.csv` becomes `out_run3.csv`.
pub fn run_path(path: &Path, run: usize) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_run{run}.{}", ext.to_string_lossy()),
        None => format!("{stem}_run{run}"),
    };
    path.with_file_name(name)
}

pub fn prepare_parent(path: &Path) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Failure::usage(format!("cannot create {}: {e}", dir.display())))?;
    }
    Ok(())
}

/// The invocation, quoted so that it can be pasted back into a shell.
pub fn command_line() -> String {
    std::env::args()
        .enumerate()
        .map(|(i, a)| {
            let a = if i == 0 { "markov2".to_string() } else { a };
            if a.is_empty() || a.contains(|c: char| c.is_whitespace() || c == '\'' || c == '"') {
                format!("'{}'", a.replace('\'', r"'\''"))
            } else {
                a
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}
