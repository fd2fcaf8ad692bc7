use crate::error::{Error, Result};
use crate::linalg::{column_space_basis, real, CMatrix, DEFAULT_RANK_CUTOFF};
use crate::seqcore::VectorSequence;

/// A subspace held through an orthonormal basis (the columns of `basis`).
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    basis: CMatrix,
}

impl Subspace {
    /// Columns must be orthonormal within 1e-10.
    pub fn new(basis: CMatrix) -> Result<Self> {
        if basis.nrows() == 0 {
            return Err(Error::invalid("subspace needs a positive ambient dimension"));
        }
        let k = basis.ncols();
        let defect = (basis.adjoint() * &basis - CMatrix::identity(k, k)).camax();
        if defect > 1e-10 {
            return Err(Error::invalid(format!("basis columns are not orthonormal (defect {defect:.3e})")));
        }
        Ok(Subspace { basis })
    }

    /// `span(e_1, ..., e_k)` inside dimension `ambient_dim`.
    pub fn coordinate(ambient_dim: usize, k: usize) -> Result<Self> {
        if k > ambient_dim {
            return Err(Error::DimensionMismatch(format!("span of {k} coordinates in dimension {ambient_dim}")));
        }
        Subspace::new(CMatrix::from_fn(ambient_dim, k, |i, j| real(if i == j { 1.0 } else { 0.0 })))
    }

    pub fn full(ambient_dim: usize) -> Result<Self> {
        Subspace::coordinate(ambient_dim, ambient_dim)
    }

    /// Span of the vectors of `seq`.
    pub fn span_of(seq: &VectorSequence) -> Self {
        Subspace { basis: column_space_basis(seq.columns(), DEFAULT_RANK_CUTOFF) }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    /// Orthogonal projector in ambient coordinates.
    pub fn projector(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }

    /// Same subspace seen in a larger ambient dimension.
    pub fn padded(&self, ambient_dim: usize) -> Result<Self> {
        if ambient_dim < self.ambient_dim() {
            return Err(Error::DimensionMismatch("cannot shrink a subspace's ambient dimension".into()));
        }
        let mut basis = CMatrix::zeros(ambient_dim, self.dim());
        basis.rows_mut(0, self.ambient_dim()).copy_from(&self.basis);
        Ok(Subspace { basis })
    }
}

/// `(P_W f_n)` in the coordinates of `W`'s basis.
pub fn project_sequence(seq: &VectorSequence, w: &Subspace) -> Result<VectorSequence> {
    if w.ambient_dim() != seq.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "subspace lives in dimension {}, sequence in {}",
            w.ambient_dim(),
            seq.ambient_dim()
        )));
    }
    if w.dim() == 0 {
        return Err(Error::invalid("cannot project onto the zero subspace"));
    }
    let coords = w.basis().adjoint() * seq.columns();
    let out = VectorSequence::from_columns(coords)?;
    Ok(match seq.origin() {
        Some(o) => out.with_origin(o.clone()),
        None => out,
    })
}
