//! File formats and machine-readable reports for the command line front end.
//!
//! Matrices travel as JSON documents with explicit shape and field; complex
//! entries are always two-element [re, im] arrays, never strings. Reports
//! are line-oriented `key=value` text or the same content as one JSON
//! object. All writes are atomic (temp file + rename).

use crate::error::{PqepError, Result};
use crate::flavor::Flavor;
use crate::mat::{CMat, C64};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

/// One matrix entry on disk: a bare number (real field) or [re, im].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    fn to_c64(self) -> C64 {
        match self {
            Entry::Real(x) => C64::new(x, 0.0),
            Entry::Complex([r, i]) => C64::new(r, i),
        }
    }
}

/// A dense matrix document: shape, field and row-major data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    /// "real" or "complex"
    pub field: String,
    pub data: Vec<Entry>,
}

impl MatrixFile {
    pub fn to_matrix(&self) -> Result<CMat> {
        if self.data.len() != self.rows * self.cols {
            return Err(PqepError::DimensionMismatch(format!(
                "matrix file: {} entries for {}x{}",
                self.data.len(),
                self.rows,
                self.cols
            )));
        }
        if self.field != "real" && self.field != "complex" {
            return Err(PqepError::InvalidMatrix(format!(
                "field must be \"real\" or \"complex\", got {:?}",
                self.field
            )));
        }
        let vals: Vec<C64> = self.data.iter().map(|e| e.to_c64()).collect();
        if self.field == "real" && vals.iter().any(|z| z.im != 0.0) {
            return Err(PqepError::InvalidMatrix(
                "real matrix file carries nonzero imaginary parts".into(),
            ));
        }
        ndarray::Array2::from_shape_vec((self.rows, self.cols), vals)
            .map_err(|e| PqepError::DimensionMismatch(e.to_string()))
    }

    pub fn from_matrix(m: &CMat, real: bool) -> MatrixFile {
        let data = m
            .iter()
            .map(|z| {
                if real {
                    Entry::Real(z.re)
                } else {
                    Entry::Complex([z.re, z.im])
                }
            })
            .collect();
        MatrixFile {
            rows: m.nrows(),
            cols: m.ncols(),
            field: if real { "real" } else { "complex" }.into(),
            data,
        }
    }
}

/// The `replace` clause of an embedding problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReplaceSpec {
    pub from: Vec<[f64; 2]>,
    pub to: Vec<[f64; 2]>,
}

/// Tolerance overrides; anything absent uses the crate defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Tolerances {
    pub tol_pair: Option<f64>,
    pub tol_struct: Option<f64>,
    pub residual_gate: Option<f64>,
}

impl Tolerances {
    pub fn tol_pair(&self) -> f64 {
        self.tol_pair.unwrap_or(crate::TOL_PAIR)
    }
    pub fn residual_gate(&self) -> f64 {
        self.residual_gate.unwrap_or(crate::TOL_RESIDUAL)
    }
    /// Apply a `KEY=VAL` override from the command line.
    pub fn set(&mut self, key: &str, val: f64) -> Result<()> {
        match key {
            "tol_pair" => self.tol_pair = Some(val),
            "tol_struct" => self.tol_struct = Some(val),
            "residual_gate" => self.residual_gate = Some(val),
            _ => {
                return Err(PqepError::InvalidMatrix(format!(
                    "unknown tolerance key {key:?} (expected tol_pair, tol_struct or residual_gate)"
                )));
            }
        }
        Ok(())
    }
}

/// A problem document: the flavor plus whichever pieces the subcommand needs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemFile {
    /// "T+", "T-", "H+" or "H-"
    pub flavor: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<MatrixFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<MatrixFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<MatrixFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<MatrixFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<MatrixFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigenvalues: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replace: Option<ReplaceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
}

impl ProblemFile {
    pub fn load(path: &Path) -> Result<ProblemFile> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PqepError::InvalidMatrix(format!("cannot read {path:?}: {e}")))?;
        serde_json::from_str(&text)
            .map_err(|e| PqepError::DimensionMismatch(format!("cannot parse {path:?}: {e}")))
    }

    pub fn flavor(&self) -> Result<Flavor> {
        Flavor::from_code(&self.flavor).ok_or_else(|| {
            PqepError::DimensionMismatch(format!(
                "unknown flavor code {:?} (expected T+, T-, H+ or H-)",
                self.flavor
            ))
        })
    }

    pub fn required(&self, field: &str) -> Result<&MatrixFile> {
        let slot = match field {
            "A" => &self.a,
            "Q" => &self.q,
            "X" => &self.x,
            "J" => &self.j,
            _ => &None,
        };
        slot.as_ref()
            .ok_or_else(|| PqepError::DimensionMismatch(format!("problem file lacks {field}")))
    }
}

/// An ordered key=value report with a JSON twin.
#[derive(Debug, Default, Clone)]
pub struct Report {
    entries: Vec<(String, String)>,
}

impl Report {
    pub fn push(&mut self, key: &str, value: impl std::fmt::Display) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn push_f(&mut self, key: &str, value: f64) {
        self.entries.push((key.to_string(), format!("{value:.6e}")));
    }

    pub fn lines(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push('=');
            out.push_str(v);
            out.push('\n');
        }
        out
    }

    pub fn json(&self) -> String {
        let map: BTreeMap<&str, &str> = self
            .entries
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_str()))
            .collect();
        serde_json::to_string_pretty(&map).expect("report serializes")
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            self.json()
        } else {
            self.lines()
        }
    }
}

/// Write bytes atomically: temp file in the target directory, then rename.
pub fn atomic_write(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    if !dir.as_os_str().is_empty() {
        std::fs::create_dir_all(dir)
            .map_err(|e| PqepError::InvalidMatrix(format!("cannot create {dir:?}: {e}")))?;
    }
    let tmp: PathBuf = dir.join(format!(
        ".{}.tmp-{}",
        path.file_name().and_then(|s| s.to_str()).unwrap_or("out"),
        std::process::id()
    ));
    {
        let mut f = std::fs::File::create(&tmp)
            .map_err(|e| PqepError::InvalidMatrix(format!("cannot create {tmp:?}: {e}")))?;
        f.write_all(contents.as_bytes())
            .map_err(|e| PqepError::InvalidMatrix(format!("cannot write {tmp:?}: {e}")))?;
        f.sync_all().ok();
    }
    std::fs::rename(&tmp, path)
        .map_err(|e| PqepError::InvalidMatrix(format!("cannot rename onto {path:?}: {e}")))?;
    Ok(())
}

/// Write a matrix document atomically.
pub fn write_matrix(path: &Path, m: &CMat, real: bool) -> Result<()> {
    let doc = MatrixFile::from_matrix(m, real);
    let text = serde_json::to_string_pretty(&doc).expect("matrix serializes");
    atomic_write(path, &text)
}

/// Exit-code contract: 0 pass, 2 parse, 3 structure, 4 solver, 5 precondition.
pub fn exit_code_for(err: &PqepError) -> i32 {
    use PqepError::*;
    match err {
        DimensionMismatch(_)
        | PairingViolation { .. }
        | ParityViolation(_)
        | InvariantViolation(_) => 2,
        InvalidMatrix(_) | StructureViolation(_) | SingularA(_) | SingularJ => 3,
        SingularAssembly(_)
        | NotAStandardPair { .. }
        | NotEigenpairs { .. }
        | SingularCore(_)
        | ConditionViolation(..)
        | SingularBlock(_)
        | NotCongruent(_)
        | RetriesExhausted(_)
        | CategoryMismatch(_)
        | SingularUpdate(_)
        | ConvergenceFailure(_)
        | DefectiveInput(_) => 4,
        ZeroEigenvalue(_)
        | UnsupportedDefective(_)
        | UnimodularUnsupported(_)
        | UnimodularInSpectrum { .. }
        | SpectrumSizeOdd(_) => 5,
    }
}
