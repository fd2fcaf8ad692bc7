use serde::{Deserialize, Serialize};

use super::operator::analysis_matrix;
use crate::error::{Error, Result};
use crate::linalg::{pinv, rank_from_singular_values, singular_values, DEFAULT_RANK_CUTOFF};
use crate::seqcore::VectorSequence;

/// Frame bounds and structural flags of one truncation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    /// Smallest squared singular value of the analysis matrix, 0 when the
    /// vectors do not span the ambient space.
    #[serde(rename = "lower_A")]
    pub lower_a: f64,
    /// Largest squared singular value.
    #[serde(rename = "upper_B")]
    pub upper_b: f64,
    pub ratio: f64,
    pub complete: bool,
    pub minimal: bool,
    pub excess: usize,
    pub rank: usize,
    pub ambient_dim: usize,
    pub count: usize,
    pub trunc_index: Option<usize>,
    /// Absolute threshold on `lower_A`: `(cutoff * sigma_max)^2`.
    pub tolerance: f64,
}

pub fn frame_bounds(seq: &VectorSequence) -> BoundsReport {
    frame_bounds_with(seq, DEFAULT_RANK_CUTOFF)
}

pub fn frame_bounds_with(seq: &VectorSequence, cutoff: f64) -> BoundsReport {
    // the synthesis matrix has the same singular values as the analysis one
    let sv = singular_values(seq.columns());
    let rank = rank_from_singular_values(&sv, cutoff);
    let dim = seq.ambient_dim();
    let smax = sv.first().copied().unwrap_or(0.0);
    let complete = rank == dim;
    let lower_a = if complete { sv[dim - 1].powi(2) } else { 0.0 };
    let upper_b = smax * smax;
    BoundsReport {
        lower_a,
        upper_b,
        ratio: if upper_b > 0.0 { lower_a / upper_b } else { 0.0 },
        complete,
        minimal: rank == seq.len(),
        excess: seq.len() - rank,
        rank,
        ambient_dim: dim,
        count: seq.len(),
        trunc_index: seq.trunc_index(),
        tolerance: (cutoff * smax).powi(2),
    }
}

/// No vector lies in the span of the others, i.e. the vectors are linearly
/// independent.
pub fn is_minimal(seq: &VectorSequence) -> bool {
    let sv = singular_values(seq.columns());
    rank_from_singular_values(&sv, DEFAULT_RANK_CUTOFF) == seq.len()
}

/// `len - rank`: the number of vectors removable without shrinking the span.
pub fn excess(seq: &VectorSequence) -> usize {
    let sv = singular_values(seq.columns());
    seq.len() - rank_from_singular_values(&sv, DEFAULT_RANK_CUTOFF)
}

/// Minimal-norm biorthogonal system `(g_m)` with `<f_n, g_m> = delta_nm`.
///
/// The vectors are the columns of the pseudo-inverse of the analysis
/// matrix, so every `g_m` lies in the span of the sequence.
pub fn biorthogonal(seq: &VectorSequence) -> Result<VectorSequence> {
    if !is_minimal(seq) {
        return Err(Error::precondition(
            "sequence is not minimal, so no biorthogonal system exists",
        ));
    }
    let g = pinv(&analysis_matrix(seq).matrix, DEFAULT_RANK_CUTOFF);
    let out = VectorSequence::from_columns(g)?;
    Ok(match seq.origin() {
        Some(o) => out.with_origin(o.clone()),
        None => out,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum RieszVerdict {
    RieszBasis {
        #[serde(rename = "A")]
        lower: f64,
        #[serde(rename = "B")]
        upper: f64,
    },
    NotRiesz {
        reason: String,
    },
}

impl RieszVerdict {
    pub fn is_riesz(&self) -> bool {
        matches!(self, RieszVerdict::RieszBasis { .. })
    }
}

/// A truncation is a Riesz basis when it has exactly `ambient_dim` vectors
/// and they span.
pub fn riesz_test(seq: &VectorSequence) -> RieszVerdict {
    let report = frame_bounds(seq);
    if report.excess > 0 {
        RieszVerdict::NotRiesz { reason: format!("excess {} > 0", report.excess) }
    } else if !report.complete {
        RieszVerdict::NotRiesz {
            reason: format!("spans {} of {} dimensions", report.rank, report.ambient_dim),
        }
    } else {
        RieszVerdict::RieszBasis { lower: report.lower_a, upper: report.upper_b }
    }
}
