//! Sign vectors and sign matrices: entries restricted to {-1, +1}.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Length-N vector over {-1, +1}.
///
/// Lexicographic order (derived `Ord`) treats -1 < +1, which matches the
/// tie-break rule used by all solvers. The canonical form fixes the first
/// entry to +1; both `b` and `-b` attain the same projection objectives.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SignVector(Vec<i8>);

impl SignVector {
    /// Validates that every entry is exactly -1 or +1.
    pub fn from_signs(entries: Vec<i8>) -> Result<Self> {
        if entries.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::DimensionMismatch {
                context: "sign vector entries must be -1 or +1".to_string(),
            });
        }
        Ok(Self(entries))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub(crate) fn set(&mut self, i: usize, sign: i8) {
        debug_assert!(sign == 1 || sign == -1);
        self.0[i] = sign;
    }

    /// Flips every entry.
    pub fn negate(&mut self) {
        for s in &mut self.0 {
            *s = -*s;
        }
    }

    /// Returns the representative with first entry +1.
    pub fn canonical(mut self) -> Self {
        if self.0.first() == Some(&-1) {
            self.negate();
        }
        self
    }

    pub fn is_canonical(&self) -> bool {
        self.0.first() != Some(&-1)
    }

    /// Converts to a dense real vector of +/-1.0 entries.
    pub fn to_dvector(&self) -> DVector<f64> {
        DVector::from_iterator(self.0.len(), self.0.iter().map(|&s| f64::from(s)))
    }
}

/// Entry-wise sign with zeros mapped to +1.
///
/// The candidate recursion never relies on this default at ambiguous
/// entries; it overwrites them explicitly.
pub fn sign_quantize(v: &DVector<f64>) -> SignVector {
    SignVector(v.iter().map(|&x| if x < 0.0 { -1 } else { 1 }).collect())
}

/// N x K matrix over {-1, +1}, stored by columns.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignMatrix {
    columns: Vec<SignVector>,
}

impl SignMatrix {
    /// Validates equal column lengths; entries are already constrained.
    pub fn from_columns(columns: Vec<SignVector>) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::DimensionMismatch {
                context: "sign matrix needs at least one column".to_string(),
            });
        }
        let n = columns[0].len();
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::DimensionMismatch {
                context: "sign matrix columns must share a length".to_string(),
            });
        }
        Ok(Self { columns })
    }

    pub fn nrows(&self) -> usize {
        self.columns[0].len()
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &SignVector {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[SignVector] {
        &self.columns
    }

    /// Converts to a dense real matrix of +/-1.0 entries.
    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.nrows(), self.ncols(), |i, j| {
            f64::from(self.columns[j].as_slice()[i])
        })
    }

    /// Row-major flattened lexicographic comparison (-1 < +1), the
    /// tie-break order for equal-objective sign matrices.
    pub fn flattened_cmp(&self, other: &Self) -> std::cmp::Ordering {
        debug_assert_eq!(self.nrows(), other.nrows());
        debug_assert_eq!(self.ncols(), other.ncols());
        for i in 0..self.nrows() {
            for j in 0..self.ncols() {
                let a = self.columns[j].as_slice()[i];
                let b = other.columns[j].as_slice()[i];
                if a != b {
                    return a.cmp(&b);
                }
            }
        }
        std::cmp::Ordering::Equal
    }
}
