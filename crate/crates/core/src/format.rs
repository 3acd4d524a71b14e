//! On-disk formats: tensor documents (JSON) and iteration traces (CSV).
//!
//! Tensor document:
//!
//! ```json
//! {
//!   "format": "markov2-tensor/1",
//!   "name": "dna_i",
//!   "n": 3,
//!   "tolerance": 0.001,
//!   "layout": "slices[k][i][j] = p[i][j][k]",
//!   "slices": [[[0.6, 0.4083, 0.4935], ...], ...]
//! }
//! ```
//!
//! `slices[k]` is the `n x n` matrix `P(:,:,k+1)`, whose row `i`, column `j`
//! holds `p[i][j][k]`; its columns are the fibers and sum to one. `name`,
//! `source`, `layout` and `format` are optional; `tolerance` defaults to 1e-9.
//! Numbers are written in shortest round-trip form, so a write/read cycle is exact.
//!
//! Trace files are CSV preceded by `# key: value` comment lines. Empty cells
//! mean "not available".

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::solvers::IterationTrace;
use crate::tensor::TransitionTensor;

pub const TENSOR_FORMAT: &str = "markov2-tensor/1";
pub const TENSOR_LAYOUT: &str = "slices[k][i][j] = p[i][j][k]";
pub const DEFAULT_FILE_TOLERANCE: f64 = 1e-9;

fn default_file_tolerance() -> f64 {
    DEFAULT_FILE_TOLERANCE
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct TensorFile {
    #[serde(default)]
    pub format: Option<String>,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub source: Option<String>,
    pub n: usize,
    #[serde(default = "default_file_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub layout: Option<String>,
    pub slices: Vec<Vec<Vec<f64>>>,
}

impl TensorFile {
    pub fn from_tensor(p: &TransitionTensor, name: Option<&str>, source: Option<&str>) -> Self {
        TensorFile {
            format: Some(TENSOR_FORMAT.into()),
            name: name.map(Into::into),
            source: source.map(Into::into),
            n: p.dim(),
            tolerance: p.validation_tolerance(),
            layout: Some(TENSOR_LAYOUT.into()),
            slices: p.to_slices(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: TensorFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if let Some(f) = &file.format {
            if f != TENSOR_FORMAT {
                return Err(Error::Parse(format!("unsupported format {f:?}")));
            }
        }
        if file.n == 0 {
            return Err(Error::Parse("n must be at least 1".into()));
        }
        if file.slices.len() != file.n
            || file
                .slices
                .iter()
                .any(|m| m.len() != file.n || m.iter().any(|r| r.len() != file.n))
        {
            return Err(Error::Parse(format!(
                "slices do not form an {0} x {0} x {0} array",
                file.n
            )));
        }
        if file.tolerance.is_nan() || file.tolerance < 0.0 {
            return Err(Error::Parse(format!("invalid tolerance {}", file.tolerance)));
        }
        Ok(file)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let mut text = String::new();
        File::open(path)?.read_to_string(&mut text)?;
        Self::parse(&text)
    }

    /// Validates at the file's own tolerance, or at `tolerance` when given.
    pub fn to_tensor(&self, tolerance: Option<f64>) -> Result<TransitionTensor> {
        TransitionTensor::from_slices(&self.slices, tolerance.unwrap_or(self.tolerance))
    }

    pub fn render(&self) -> String {
        let mut out = String::from("{\n");
        let mut field = |key: &str, value: String| {
            let _ = writeln!(out, "  {}: {},", json_string(key), value);
        };
        if let Some(f) = &self.format {
            field("format", json_string(f));
        }
        if let Some(v) = &self.name {
            field("name", json_string(v));
        }
        if let Some(v) = &self.source {
            field("source", json_string(v));
        }
        field("n", self.n.to_string());
        field("tolerance", json_number(self.tolerance));
        if let Some(v) = &self.layout {
            field("layout", json_string(v));
        }
        out.push_str("  \"slices\": [\n");
        for (k, m) in self.slices.iter().enumerate() {
            out.push_str("    [\n");
            for (i, row) in m.iter().enumerate() {
                let cells: Vec<String> = row.iter().map(|&v| json_number(v)).collect();
                let sep = if i + 1 < m.len() { "," } else { "" };
                let _ = writeln!(out, "      [{}]{sep}", cells.join(", "));
            }
            let sep = if k + 1 < self.slices.len() { "," } else { "" };
            let _ = writeln!(out, "    ]{sep}");
        }
        out.push_str("  ]\n}\n");
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.render())?;
        Ok(())
    }
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

/// Shortest representation that parses back to the same `f64`.
pub fn json_number(v: f64) -> String {
    serde_json::to_string(&v).expect("finite numbers serialize")
}

/// A CSV table with `# key: value` metadata lines and optional numeric cells.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl CsvTable {
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        for (k, v) in &self.metadata {
            writeln!(w, "# {k}: {}", v.replace('\n', " "))?;
        }
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            csv.write_record(row.iter().map(|c| c.map(json_number).unwrap_or_default()))
                .map_err(csv_err)?;
        }
        csv.flush()?;
        Ok(())
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = File::create(path)?;
        self.write_to(std::io::BufWriter::new(file))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut metadata = Vec::new();
        for line in BufReader::new(text.as_bytes()).lines() {
            let line = line?;
            let Some(rest) = line.strip_prefix('#') else {
                continue;
            };
            let (k, v) = rest
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("metadata line without ':' {line:?}")))?;
            metadata.push((k.trim().to_string(), v.trim().to_string()));
        }
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let columns: Vec<String> = reader.headers().map_err(csv_err)?.iter().map(String::from).collect();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(csv_err)?;
            let row = record
                .iter()
                .map(|cell| {
                    if cell.is_empty() {
                        return Ok(None);
                    }
                    let v: f64 = cell
                        .parse()
                        .map_err(|_| Error::Parse(format!("not a number: {cell:?}")))?;
                    if !v.is_finite() {
                        return Err(Error::Parse(format!("non-finite value {cell:?}")));
                    }
                    Ok(Some(v))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(CsvTable {
            metadata,
            columns,
            rows,
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

pub const TRACE_COLUMNS: [&str; 6] = [
    "k",
    "residual_l1",
    "fixed_point_residual_l1",
    "error_l1",
    "observed_ratio",
    "bound",
];

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub k: usize,
    pub residual: f64,
    pub fixed_point_residual: f64,
    pub error: Option<f64>,
    pub observed_ratio: Option<f64>,
    pub bound: Option<f64>,
}

/// One solver run, one row per computed iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceFile {
    pub metadata: Vec<(String, String)>,
    pub rows: Vec<TraceRow>,
}

impl TraceFile {
    pub fn from_trace(trace: &IterationTrace, metadata: Vec<(String, String)>) -> Self {
        let mut meta = vec![("method".to_string(), trace.method.as_str().to_string())];
        meta.extend(metadata);
        meta.push(("converged".into(), trace.converged.to_string()));
        meta.push(("iterations".into(), trace.iterations_used.to_string()));
        if let Some(s0) = trace.bound_origin {
            meta.push(("bound_origin".into(), s0.to_string()));
        }
        TraceFile {
            metadata: meta,
            rows: trace
                .steps
                .iter()
                .map(|s| TraceRow {
                    k: s.k,
                    residual: s.residual,
                    fixed_point_residual: s.fixed_point_residual,
                    error: s.error,
                    observed_ratio: s.observed_ratio,
                    bound: s.bound,
                })
                .collect(),
        }
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn to_table(&self) -> CsvTable {
        CsvTable {
            metadata: self.metadata.clone(),
            columns: TRACE_COLUMNS.iter().map(|c| c.to_string()).collect(),
            rows: self
                .rows
                .iter()
                .map(|r| {
                    vec![
                        Some(r.k as f64),
                        Some(r.residual),
                        Some(r.fixed_point_residual),
                        r.error,
                        r.observed_ratio,
                        r.bound,
                    ]
                })
                .collect(),
        }
    }

    /// Checks the column layout, required cells and strictly increasing `k`.
    pub fn from_table(table: CsvTable) -> Result<Self> {
        if table.columns != TRACE_COLUMNS {
            return Err(Error::Parse(format!("unexpected trace columns {:?}", table.columns)));
        }
        let mut rows = Vec::with_capacity(table.rows.len());
        for (line, r) in table.rows.iter().enumerate() {
            let required = |idx: usize| {
                r.get(idx)
                    .copied()
                    .flatten()
                    .ok_or_else(|| Error::Parse(format!("row {}: missing {}", line + 1, TRACE_COLUMNS[idx])))
            };
            let k = required(0)?;
            if k < 0.0 || k.fract() != 0.0 {
                return Err(Error::Parse(format!("row {}: k = {k} is not an index", line + 1)));
            }
            rows.push(TraceRow {
                k: k as usize,
                residual: required(1)?,
                fixed_point_residual: required(2)?,
                error: r[3],
                observed_ratio: r[4],
                bound: r[5],
            });
        }
        if rows.windows(2).any(|w| w[1].k <= w[0].k) {
            return Err(Error::Parse("k is not strictly increasing".into()));
        }
        Ok(TraceFile {
            metadata: table.metadata,
            rows,
        })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        self.to_table().write(path)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_table(CsvTable::read(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_table(CsvTable::parse(text)?)
    }
}
