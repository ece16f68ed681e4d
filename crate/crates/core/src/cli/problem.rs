//! Versioned JSON problem files. Complex entries are `[re, im]` pairs,
//! matrices are arrays of rows.

use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::model::{validate_system, BlockSystem, Tolerances};
use crate::scalar::ComplexMatrix;

pub const SCHEMA_VERSION: u32 = 1;

pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub schema_version: u32,
    pub alpha: JsonMatrix,
    pub beta: JsonMatrix,
    pub gamma: JsonMatrix,
    #[serde(rename = "C")]
    pub coupling: JsonMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
}

#[derive(Debug, thiserror::Error)]
pub enum ProblemError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed problem file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported schema_version {0}, expected {SCHEMA_VERSION}")]
    Schema(u32),
    #[error("ragged matrix {0}: rows of unequal length")]
    Ragged(&'static str),
    #[error(transparent)]
    Invalid(#[from] crate::error::Error),
}

impl ProblemError {
    /// Stable identifier used in machine-readable error lines.
    pub fn kind(&self) -> String {
        match self {
            ProblemError::Io { .. } => "Io".into(),
            ProblemError::Parse(_) => "Parse".into(),
            ProblemError::Schema(_) => "Schema".into(),
            ProblemError::Ragged(_) => "Ragged".into(),
            ProblemError::Invalid(e) => crate::cli::error_kind(e).into(),
        }
    }
}

pub fn to_json_matrix(m: &ComplexMatrix<f64>) -> JsonMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

/// Converts rows to a matrix; an empty row list becomes `0 x empty_cols`.
pub fn from_json_matrix(
    name: &'static str,
    rows: &JsonMatrix,
    empty_cols: usize,
) -> Result<ComplexMatrix<f64>, ProblemError> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(empty_cols, |r| r.len());
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(ProblemError::Ragged(name));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| {
        let [a, b] = rows[i][j];
        Complex::new(a, b)
    }))
}

impl ProblemFile {
    pub fn from_matrices(
        alpha: &ComplexMatrix<f64>,
        beta: &ComplexMatrix<f64>,
        gamma: &ComplexMatrix<f64>,
        coupling: &ComplexMatrix<f64>,
    ) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            alpha: to_json_matrix(alpha),
            beta: to_json_matrix(beta),
            gamma: to_json_matrix(gamma),
            coupling: to_json_matrix(coupling),
            tolerances: None,
        }
    }

    pub fn read(path: &Path) -> Result<Self, ProblemError> {
        let text = std::fs::read_to_string(path).map_err(|source| ProblemError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ProblemError> {
        let file: ProblemFile = serde_json::from_str(text)?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(ProblemError::Schema(file.schema_version));
        }
        Ok(file)
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tolerances.unwrap_or_default()
    }

    /// The four raw matrices `(alpha, beta, gamma, C)`.
    pub fn matrices(&self) -> Result<[ComplexMatrix<f64>; 4], ProblemError> {
        let alpha = from_json_matrix("alpha", &self.alpha, 0)?;
        let n0 = alpha.nrows();
        let beta = from_json_matrix("beta", &self.beta, 0)?;
        let gamma = from_json_matrix("gamma", &self.gamma, n0)?;
        let coupling = from_json_matrix("C", &self.coupling, n0)?;
        Ok([alpha, beta, gamma, coupling])
    }

    pub fn system(&self) -> Result<BlockSystem<f64>, ProblemError> {
        let [a, b, g, c] = self.matrices()?;
        Ok(validate_system(a, b, g, c, &self.tolerances())?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files always serialize")
    }
}
