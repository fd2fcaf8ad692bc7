use serde::{Deserialize, Serialize};

use super::sequence::VectorSequence;
use crate::error::{Error, Result};
use crate::linalg::{real, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Positivity {
    StrictlyPositive,
    ComplexNonzero,
    NonnegativeAllowed,
}

/// Per-index scalars applied multiplicatively to a sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightSeq {
    values: Vec<C64>,
    positivity: Positivity,
}

impl WeightSeq {
    pub fn positive(values: Vec<f64>) -> Result<Self> {
        if let Some((n, v)) = values.iter().enumerate().find(|(_, v)| !(**v > 0.0) || !v.is_finite()) {
            return Err(Error::invalid(format!("weight {n} must be positive, got {v}")));
        }
        Ok(WeightSeq { values: values.into_iter().map(real).collect(), positivity: Positivity::StrictlyPositive })
    }

    pub fn complex_nonzero(values: Vec<C64>) -> Result<Self> {
        if let Some((n, v)) = values.iter().enumerate().find(|(_, v)| !(v.norm() > 0.0) || !v.is_finite()) {
            return Err(Error::invalid(format!("weight {n} must be nonzero, got {v}")));
        }
        Ok(WeightSeq { values, positivity: Positivity::ComplexNonzero })
    }

    pub fn nonnegative(values: Vec<f64>) -> Result<Self> {
        if let Some((n, v)) = values.iter().enumerate().find(|(_, v)| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::invalid(format!("weight {n} must be nonnegative, got {v}")));
        }
        Ok(WeightSeq { values: values.into_iter().map(real).collect(), positivity: Positivity::NonnegativeAllowed })
    }

    pub fn ones(len: usize) -> Self {
        WeightSeq { values: vec![real(1.0); len], positivity: Positivity::StrictlyPositive }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn positivity(&self) -> Positivity {
        self.positivity
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    /// Real parts, for weights known to be real.
    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn inverse(&self) -> Result<Self> {
        match self.positivity {
            Positivity::StrictlyPositive => WeightSeq::positive(self.values.iter().map(|v| 1.0 / v.re).collect()),
            Positivity::ComplexNonzero => WeightSeq::complex_nonzero(self.values.iter().map(|v| v.inv()).collect()),
            Positivity::NonnegativeAllowed => Err(Error::invalid("weights with zeros have no inverse")),
        }
    }
}

/// Positive weights whose squares sum to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauWeights {
    values: Vec<f64>,
    normalized: bool,
}

impl TauWeights {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }
}

/// Rescales `raw` so that the squares sum to one.
pub fn normalize_tau(raw: &[f64]) -> Result<TauWeights> {
    if raw.is_empty() {
        return Err(Error::invalid("tau needs at least one value"));
    }
    if let Some(v) = raw.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::invalid(format!("tau values must be positive, got {v}")));
    }
    // scale by the max first so the sum of squares cannot overflow
    let top = raw.iter().copied().fold(0.0f64, f64::max);
    let norm = top * raw.iter().map(|v| (v / top).powi(2)).sum::<f64>().sqrt();
    let values: Vec<f64> = raw.iter().map(|v| v / norm).collect();
    if values.iter().any(|v| *v <= 0.0) {
        return Err(Error::invalid("tau underflows to zero after normalization"));
    }
    Ok(TauWeights { values, normalized: true })
}

/// Geometric rule `tau_n ~ 2^(-n/2)`, `n = 1..=len`, normalized.
///
/// Fails for `len > 2148`, where `2^(-n/2)` leaves the `f64` range.
pub fn default_tau(len: usize) -> Result<TauWeights> {
    if len == 0 {
        return Err(Error::invalid("default tau needs a positive length"));
    }
    let raw: Vec<f64> = (1..=len).map(|n| 2f64.powf(-(n as f64) / 2.0)).collect();
    normalize_tau(&raw)
}

/// `(w_n f_n)`.
pub fn apply_weights(seq: &VectorSequence, w: &WeightSeq) -> Result<VectorSequence> {
    if w.len() != seq.len() {
        return Err(Error::LengthMismatch { expected: seq.len(), got: w.len() });
    }
    let mut columns = seq.columns().clone();
    for (mut col, &wn) in columns.column_iter_mut().zip(w.values()) {
        col *= wn;
    }
    let out = VectorSequence::from_columns(columns)?;
    Ok(match seq.origin() {
        Some(o) => out.with_origin(o.clone()),
        None => out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, CMatrix};
    use crate::seqcore::{build_sequence, FamilyName, ScalarRule, SequenceSpec};
    use approx::assert_relative_eq;

    #[test]
    fn tau_symmetric_pair() {
        let t = normalize_tau(&[1.0, 1.0]).unwrap();
        assert_relative_eq!(t.values()[0], 0.5f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(t.values()[1], 0.5f64.sqrt(), max_relative = 1e-15);
        assert!(t.is_normalized());
    }

    #[test]
    fn tau_single_element() {
        assert_eq!(normalize_tau(&[3.0]).unwrap().values(), &[1.0]);
    }

    #[test]
    fn tau_geometric_closed_form() {
        // raw_n = 2^(-n/2), n = 1..L: sum of squares = 1 - 2^-L,
        // so tau_n = 2^(-n/2) / sqrt(1 - 2^-L)
        for len in [1usize, 2, 5, 17, 60] {
            let raw: Vec<f64> = (1..=len).map(|n| 2f64.powf(-(n as f64) / 2.0)).collect();
            let t = normalize_tau(&raw).unwrap();
            let scale = (1.0 - 2f64.powi(-(len as i32))).sqrt();
            for (n, v) in t.values().iter().enumerate() {
                assert_relative_eq!(*v, raw[n] / scale, max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn tau_errors() {
        assert!(normalize_tau(&[]).is_err());
        assert!(normalize_tau(&[1.0, 0.0]).is_err());
        assert!(normalize_tau(&[1.0, -2.0]).is_err());
        assert!(default_tau(0).is_err());
    }

    #[test]
    fn default_tau_small_cases() {
        assert_eq!(default_tau(1).unwrap().values(), &[1.0]);
        let t = default_tau(2).unwrap();
        assert_relative_eq!(t.values()[0], (2.0f64 / 3.0).sqrt(), max_relative = 1e-14);
        assert_relative_eq!(t.values()[1], (1.0f64 / 3.0).sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn default_tau_sums_to_one() {
        for len in [1usize, 3, 10, 100, 1000, 2148] {
            let t = default_tau(len).unwrap();
            let s: f64 = t.values().iter().map(|v| v * v).sum();
            assert!((s - 1.0).abs() < 1e-12, "len {len}: {s}");
            assert!(t.values().iter().all(|v| *v > 0.0));
        }
        assert!(default_tau(2200).is_err());
    }

    #[test]
    fn unit_weights_leave_onb_unchanged() {
        let s = build_sequence(&SequenceSpec::family(FamilyName::OrthonormalBasis), 3).unwrap();
        assert_eq!(apply_weights(&s, &WeightSeq::ones(3)).unwrap(), s);
    }

    #[test]
    fn reciprocal_weights_cancel_diagonal() {
        let spec = SequenceSpec::family(FamilyName::Diagonal {
            c: ScalarRule::Power { scale: 1.0, exponent: 1.0 },
        });
        let s = build_sequence(&spec, 6).unwrap();
        let w = WeightSeq::positive((1..=6).map(|n| 1.0 / n as f64).collect()).unwrap();
        let out = apply_weights(&s, &w).unwrap();
        assert!((out.columns() - CMatrix::identity(6, 6)).norm() < 1e-15);
    }

    #[test]
    fn complex_weight_scales_norm() {
        let s = build_sequence(&SequenceSpec::family(FamilyName::OnePlusEn), 5).unwrap();
        let w = WeightSeq::complex_nonzero(vec![c(1.0, 0.0), c(0.0, 3.0), c(-1.0, 1.0), c(0.5, 0.0)]).unwrap();
        let out = apply_weights(&s, &w).unwrap();
        for n in 0..4 {
            assert_relative_eq!(out.vector(n).norm(), w.values()[n].norm() * s.vector(n).norm(), max_relative = 1e-14);
        }
        assert!(apply_weights(&s, &WeightSeq::ones(3)).is_err());
    }

    #[test]
    fn weight_constructors_validate() {
        assert!(WeightSeq::positive(vec![1.0, 0.0]).is_err());
        assert!(WeightSeq::complex_nonzero(vec![c(0.0, 0.0)]).is_err());
        assert!(WeightSeq::nonnegative(vec![0.0, 1.0]).is_ok());
        assert!(WeightSeq::nonnegative(vec![-1.0]).is_err());
    }
}
