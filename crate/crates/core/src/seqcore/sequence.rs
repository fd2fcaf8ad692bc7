use nalgebra::DVectorView;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Vector};

/// Where a truncated sequence came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Origin {
    pub label: String,
    pub trunc_index: usize,
}

/// A non-empty finite list of vectors of a common ambient dimension.
///
/// Stored as the `ambient_dim x len` matrix whose columns are the vectors,
/// which is also the synthesis matrix of the sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorSequence {
    columns: CMatrix,
    origin: Option<Origin>,
}

impl VectorSequence {
    pub fn new(vectors: &[Vector]) -> Result<Self> {
        let first = vectors
            .first()
            .ok_or_else(|| Error::invalid("a sequence needs at least one vector"))?;
        let dim = first.len();
        if let Some(bad) = vectors.iter().find(|v| v.len() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "vector of dimension {} in a sequence of dimension {dim}",
                bad.len()
            )));
        }
        let columns = CMatrix::from_fn(dim, vectors.len(), |i, j| vectors[j][i]);
        Self::from_columns(columns)
    }

    pub fn from_columns(columns: CMatrix) -> Result<Self> {
        if columns.ncols() == 0 {
            return Err(Error::invalid("a sequence needs at least one vector"));
        }
        if columns.nrows() == 0 {
            return Err(Error::invalid("ambient dimension must be positive"));
        }
        Ok(VectorSequence { columns, origin: None })
    }

    pub fn with_origin(mut self, origin: Origin) -> Self {
        self.origin = Some(origin);
        self
    }

    pub fn origin(&self) -> Option<&Origin> {
        self.origin.as_ref()
    }

    pub fn trunc_index(&self) -> Option<usize> {
        self.origin.as_ref().map(|o| o.trunc_index)
    }

    pub fn len(&self) -> usize {
        self.columns.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.ncols() == 0
    }

    pub fn ambient_dim(&self) -> usize {
        self.columns.nrows()
    }

    /// Synthesis matrix: column `n` is the `n`-th vector.
    pub fn columns(&self) -> &CMatrix {
        &self.columns
    }

    pub fn vector(&self, n: usize) -> Vector {
        self.columns.column(n).into_owned()
    }

    pub fn iter(&self) -> impl Iterator<Item = DVectorView<'_, crate::C64>> + '_ {
        (0..self.len()).map(move |n| self.columns.column(n))
    }

    pub fn to_vectors(&self) -> Vec<Vector> {
        self.iter().map(|v| v.into_owned()).collect()
    }

    pub fn norms(&self) -> Vec<f64> {
        self.iter().map(|v| v.norm()).collect()
    }

    /// Sub-sequence in the given index order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.len()) {
            return Err(Error::invalid(format!(
                "index {bad} out of range for a sequence of length {}",
                self.len()
            )));
        }
        let columns = self.columns.select_columns(indices);
        Ok(VectorSequence { columns: CMatrix::from(columns), origin: self.origin.clone() }
            .checked()?)
    }

    /// First `count` members.
    pub fn prefix(&self, count: usize) -> Result<Self> {
        let idx: Vec<usize> = (0..count).collect();
        self.select(&idx)
    }

    /// Zero-pads every vector to `dim` coordinates.
    pub fn padded(&self, dim: usize) -> Result<Self> {
        if dim < self.ambient_dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot pad dimension {} down to {dim}",
                self.ambient_dim()
            )));
        }
        let mut columns = CMatrix::zeros(dim, self.len());
        columns.rows_mut(0, self.ambient_dim()).copy_from(&self.columns);
        Ok(VectorSequence { columns, origin: self.origin.clone() })
    }

    /// The sequence followed by `other` (same ambient dimension).
    pub fn concat(&self, other: &VectorSequence) -> Result<Self> {
        if other.ambient_dim() != self.ambient_dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} vs {}",
                self.ambient_dim(),
                other.ambient_dim()
            )));
        }
        let mut columns = CMatrix::zeros(self.ambient_dim(), self.len() + other.len());
        columns.columns_mut(0, self.len()).copy_from(&self.columns);
        columns.columns_mut(self.len(), other.len()).copy_from(&other.columns);
        Ok(VectorSequence { columns, origin: self.origin.clone() })
    }

    /// Applies the same linear map to every vector.
    pub fn transformed(&self, map: &CMatrix) -> Result<Self> {
        if map.ncols() != self.ambient_dim() {
            return Err(Error::DimensionMismatch(format!(
                "map with {} columns applied to dimension {}",
                map.ncols(),
                self.ambient_dim()
            )));
        }
        Ok(VectorSequence { columns: map * &self.columns, origin: self.origin.clone() }
            .checked()?)
    }

    fn checked(self) -> Result<Self> {
        if self.columns.ncols() == 0 || self.columns.nrows() == 0 {
            return Err(Error::invalid("a sequence needs at least one vector"));
        }
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real;

    fn e(dim: usize, k: usize) -> Vector {
        Vector::from_fn(dim, |i, _| real(if i == k { 1.0 } else { 0.0 }))
    }

    #[test]
    fn rejects_empty_and_ragged() {
        assert!(VectorSequence::new(&[]).is_err());
        assert!(VectorSequence::new(&[e(2, 0), e(3, 0)]).is_err());
    }

    #[test]
    fn padding_keeps_entries() {
        let s = VectorSequence::new(&[e(2, 1)]).unwrap();
        let p = s.padded(4).unwrap();
        assert_eq!(p.ambient_dim(), 4);
        assert_eq!(p.vector(0), e(4, 1));
    }

    #[test]
    fn select_reorders() {
        let s = VectorSequence::new(&[e(2, 0), e(2, 1)]).unwrap();
        let r = s.select(&[1, 0]).unwrap();
        assert_eq!(r.vector(0), e(2, 1));
        assert!(s.select(&[2]).is_err());
        assert!(s.select(&[]).is_err());
    }
}
