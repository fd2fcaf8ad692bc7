use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opspace::frame_bounds;
use crate::seqcore::{apply_weights, VectorSequence, WeightSeq};

/// Inequality claimed for a weighted sequence.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Claim {
    BesselBound { bound: f64 },
    LowerBound { bound: f64 },
    FrameBounds { lower: f64, upper: f64 },
}

impl Claim {
    fn holds(&self, lower: f64, upper: f64, rel_tol: f64) -> bool {
        match *self {
            Claim::BesselBound { bound } => upper <= bound * (1.0 + rel_tol),
            Claim::LowerBound { bound } => lower >= bound * (1.0 - rel_tol),
            Claim::FrameBounds { lower: a, upper: b } => {
                lower >= a * (1.0 - rel_tol) && upper <= b * (1.0 + rel_tol)
            }
        }
    }

    /// Relative slack between the claim and the measured bounds.
    fn slack(&self, lower: f64, upper: f64) -> f64 {
        let rel = |num: f64, den: f64| if den > 0.0 { num / den } else { num };
        match *self {
            Claim::BesselBound { bound } => rel(bound - upper, bound),
            Claim::LowerBound { bound } => rel(lower - bound, bound),
            Claim::FrameBounds { lower: a, upper: b } => rel(lower - a, a).min(rel(b - upper, b)),
        }
    }
}

/// Weights together with a bound they provably achieve, measured at one
/// truncation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightCertificate {
    pub weights: WeightSeq,
    pub claim: Claim,
    pub verified_at: Option<usize>,
    /// Optimal lower bound of the weighted sequence (0 when it does not span).
    pub measured_lower: f64,
    /// Optimal upper bound of the weighted sequence.
    pub measured_upper: f64,
    /// Relative distance of the claim from the measured bounds.
    pub residual: f64,
}

impl WeightCertificate {
    /// Measures `weights . seq` and fails unless `claim` holds within `rel_tol`.
    pub fn issue(seq: &VectorSequence, weights: WeightSeq, claim: Claim, rel_tol: f64) -> Result<Self> {
        let report = frame_bounds(&apply_weights(seq, &weights)?);
        if !claim.holds(report.lower_a, report.upper_b, rel_tol) {
            return Err(Error::CertificateFailed(format!(
                "{claim:?} does not hold: measured A = {:.6e}, B = {:.6e}",
                report.lower_a, report.upper_b
            )));
        }
        Ok(WeightCertificate {
            residual: claim.slack(report.lower_a, report.upper_b),
            weights,
            claim,
            verified_at: seq.trunc_index(),
            measured_lower: report.lower_a,
            measured_upper: report.upper_b,
        })
    }

    /// Re-checks the claim against `seq` with `frame_bounds`.
    pub fn holds_for(&self, seq: &VectorSequence, rel_tol: f64) -> bool {
        match apply_weights(seq, &self.weights) {
            Ok(weighted) => {
                let r = frame_bounds(&weighted);
                self.claim.holds(r.lower_a, r.upper_b, rel_tol)
            }
            Err(_) => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;

    #[test]
    fn issue_and_recheck() {
        let s = VectorSequence::from_columns(CMatrix::identity(3, 3)).unwrap();
        let w = WeightSeq::positive(vec![0.5, 1.0, 2.0]).unwrap();
        let cert = WeightCertificate::issue(&s, w.clone(), Claim::FrameBounds { lower: 0.25, upper: 4.0 }, 1e-9).unwrap();
        assert!(cert.residual.abs() < 1e-12);
        assert!(cert.holds_for(&s, 1e-9));
        assert!(WeightCertificate::issue(&s, w, Claim::BesselBound { bound: 3.0 }, 1e-9).is_err());
    }
}
