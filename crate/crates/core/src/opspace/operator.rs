use serde::{Deserialize, Serialize};

use crate::linalg::{pinv, CMatrix, DEFAULT_RANK_CUTOFF};
use crate::seqcore::VectorSequence;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorRole {
    Analysis,
    Synthesis,
    Gram,
    FrameOperator,
    Multiplier,
    General,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    pub matrix: CMatrix,
    pub role: OperatorRole,
}

impl OperatorMatrix {
    pub fn new(matrix: CMatrix, role: OperatorRole) -> Self {
        OperatorMatrix { matrix, role }
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }
}

/// `f -> (<f, f_n>)_n`: row `n` is the conjugate transpose of `f_n`.
pub fn analysis_matrix(seq: &VectorSequence) -> OperatorMatrix {
    OperatorMatrix::new(seq.columns().adjoint(), OperatorRole::Analysis)
}

/// `(c_n) -> sum c_n f_n`.
pub fn synthesis_matrix(seq: &VectorSequence) -> OperatorMatrix {
    OperatorMatrix::new(seq.columns().clone(), OperatorRole::Synthesis)
}

/// Synthesis composed with analysis, `sum <f, f_n> f_n`.
pub fn frame_operator(seq: &VectorSequence) -> OperatorMatrix {
    let f = seq.columns();
    OperatorMatrix::new(f * f.adjoint(), OperatorRole::FrameOperator)
}

/// `G[m, n] = <f_n, f_m>`.
pub fn gram_matrix(seq: &VectorSequence) -> OperatorMatrix {
    let f = seq.columns();
    OperatorMatrix::new(f.adjoint() * f, OperatorRole::Gram)
}

/// Moore-Penrose pseudo-inverse with the default relative cutoff.
pub fn pseudo_inverse(mat: &OperatorMatrix) -> OperatorMatrix {
    OperatorMatrix::new(pinv(&mat.matrix, DEFAULT_RANK_CUTOFF), OperatorRole::General)
}
