use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::certificate::{Claim, WeightCertificate};
use super::diagnostics::{
    biorthogonal_defect_scan, necessary_conditions_check, subsequence_lift, BiorthogonalScan,
    NecessaryCondition, NecessaryFinding,
};
use crate::config::{validate_ns, RunConfig};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_extreme_eigenpairs, numerical_rank, CMatrix, DEFAULT_RANK_CUTOFF};
use crate::opspace::{classify_series, frame_bounds, is_minimal, Trend, TrendThresholds};
use crate::seqcore::{apply_weights, build_sequence, default_tau, SequenceSpec, VectorSequence, WeightSeq};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMethod {
    /// `w_n = 1 / |f_n|`.
    Normalization,
    /// Normalized basis subsequence plus Bessel weights on the rest.
    SubsequenceLift,
    /// Gradient ascent on `log(A / B)` over log-weights.
    Ascent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum ObstructionReason {
    NotCompleteInLimit,
    BiorthogonalIncomplete,
    NecessaryConditionViolated { which: NecessaryCondition },
    RatioVanishes,
}

impl ObstructionReason {
    /// Reasons that rule out every weighting on their own.
    pub fn is_structural(&self) -> bool {
        matches!(self, ObstructionReason::NotCompleteInLimit | ObstructionReason::BiorthogonalIncomplete)
    }
}

/// Bounds of one weighting across the sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesEvidence {
    #[serde(rename = "lower_A")]
    pub lower_a: Vec<f64>,
    #[serde(rename = "upper_B")]
    pub upper_b: Vec<f64>,
    pub ratio: Vec<f64>,
    pub complete: Vec<bool>,
    pub lower_trend: Trend,
    pub upper_trend: Trend,
    pub ratio_trend: Trend,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictEvidence {
    #[serde(rename = "Ns")]
    pub ns: Vec<usize>,
    /// Unit weights.
    pub unweighted: SeriesEvidence,
    /// Best weights found by the synthesis step, if it ran.
    pub best: Option<SeriesEvidence>,
    pub biorthogonal: Option<BiorthogonalScan>,
    pub necessary: Vec<NecessaryFinding>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum WeightedFrameVerdict {
    IsFrameAlready { evidence: VerdictEvidence },
    WeightedFrame { method: WeightMethod, certificate: WeightCertificate, evidence: VerdictEvidence },
    ObstructionFound { reasons: Vec<ObstructionReason>, evidence: VerdictEvidence },
    Inconclusive { reasons: Vec<ObstructionReason>, evidence: VerdictEvidence },
}

impl WeightedFrameVerdict {
    pub fn status(&self) -> &'static str {
        match self {
            WeightedFrameVerdict::IsFrameAlready { .. } => "is_frame_already",
            WeightedFrameVerdict::WeightedFrame { .. } => "weighted_frame",
            WeightedFrameVerdict::ObstructionFound { .. } => "obstruction_found",
            WeightedFrameVerdict::Inconclusive { .. } => "inconclusive",
        }
    }

    pub fn reasons(&self) -> &[ObstructionReason] {
        match self {
            WeightedFrameVerdict::ObstructionFound { reasons, .. }
            | WeightedFrameVerdict::Inconclusive { reasons, .. } => reasons,
            _ => &[],
        }
    }

    pub fn evidence(&self) -> &VerdictEvidence {
        match self {
            WeightedFrameVerdict::IsFrameAlready { evidence }
            | WeightedFrameVerdict::WeightedFrame { evidence, .. }
            | WeightedFrameVerdict::ObstructionFound { evidence, .. }
            | WeightedFrameVerdict::Inconclusive { evidence, .. } => evidence,
        }
    }
}

fn series(
    xs: &[f64],
    weighted: &[VectorSequence],
    cutoff: f64,
    thresholds: TrendThresholds,
) -> Result<SeriesEvidence> {
    let reports: Vec<_> = weighted.iter().map(|s| crate::opspace::frame_bounds_with(s, cutoff)).collect();
    let lower_a: Vec<f64> = reports.iter().map(|r| r.lower_a).collect();
    let upper_b: Vec<f64> = reports.iter().map(|r| r.upper_b).collect();
    let ratio: Vec<f64> = reports.iter().map(|r| r.ratio).collect();
    Ok(SeriesEvidence {
        lower_trend: classify_series(xs, &lower_a, thresholds)?,
        upper_trend: classify_series(xs, &upper_b, thresholds)?,
        ratio_trend: classify_series(xs, &ratio, thresholds)?,
        complete: reports.iter().map(|r| r.complete).collect(),
        lower_a,
        upper_b,
        ratio,
    })
}

impl SeriesEvidence {
    fn stable_frame(&self) -> bool {
        self.complete.iter().all(|c| *c) && !self.lower_trend.is_vanishing() && !self.upper_trend.is_diverging()
    }
}

fn weight_all(seqs: &[VectorSequence], ws: &[WeightSeq]) -> Result<Vec<VectorSequence>> {
    seqs.iter().zip(ws).map(|(s, w)| apply_weights(s, w)).collect()
}

fn normalizing_weights(seq: &VectorSequence) -> WeightSeq {
    let values = seq.norms().iter().map(|&n| if n > 0.0 { 1.0 / n } else { 1.0 }).collect();
    WeightSeq::positive(values).expect("reciprocal norms are positive")
}

/// Greedy basis extraction by index, normalized, with Bessel weights on the
/// remaining vectors.
fn lift_weights(seq: &VectorSequence) -> Result<WeightSeq> {
    let mut chosen = Vec::new();
    for n in 0..seq.len() {
        chosen.push(n);
        if numerical_rank(seq.select(&chosen)?.columns(), DEFAULT_RANK_CUTOFF) < chosen.len() {
            chosen.pop();
        }
    }
    let sub = seq.select(&chosen)?;
    let cert = subsequence_lift(seq, &chosen, &normalizing_weights(&sub))?;
    Ok(cert.weights)
}

/// `log(lambda_min / lambda_max)` of the weighted frame operator, with the
/// extreme eigenvectors.
fn log_ratio(cols: &CMatrix, logw: &[f64]) -> Option<(f64, f64, crate::Vector, f64, crate::Vector)> {
    let mut weighted = cols.clone();
    for (mut col, &x) in weighted.column_iter_mut().zip(logw) {
        col *= crate::linalg::real(x.exp());
    }
    let s = &weighted * weighted.adjoint();
    let ((lmin, umin), (lmax, umax)) = hermitian_extreme_eigenpairs(&s);
    if !(lmin > DEFAULT_RANK_CUTOFF * lmax) || !(lmax > 0.0) {
        return None;
    }
    Some(((lmin / lmax).ln(), lmin, umin, lmax, umax))
}

/// Backtracking gradient ascent on `log(A/B)` over log-weights.
fn ascend(seq: &VectorSequence, start: Vec<f64>, iters: usize) -> (Vec<f64>, f64) {
    let cols = seq.columns();
    let Some(mut current) = log_ratio(cols, &start) else {
        return (start, f64::NEG_INFINITY);
    };
    let mut x = start;
    let mut step = 1.0;
    for _ in 0..iters {
        let (value, lmin, umin, lmax, umax) = &current;
        let grad: Vec<f64> = cols
            .column_iter()
            .zip(&x)
            .map(|(f, &xn)| {
                let pmin = umin.dotc(&f).norm_sqr();
                let pmax = umax.dotc(&f).norm_sqr();
                2.0 * (2.0 * xn).exp() * (pmin / lmin - pmax / lmax)
            })
            .collect();
        let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm < 1e-12 {
            break;
        }
        let mut accepted = false;
        while step > 1e-12 {
            let mut trial: Vec<f64> = x.iter().zip(&grad).map(|(a, g)| a + step * g / gnorm).collect();
            let mean = trial.iter().sum::<f64>() / trial.len() as f64;
            trial.iter_mut().for_each(|t| *t -= mean);
            match log_ratio(cols, &trial) {
                Some(next) if next.0 > *value => {
                    x = trial;
                    current = next;
                    step = (step * 1.5).min(4.0);
                    accepted = true;
                    break;
                }
                _ => step *= 0.5,
            }
        }
        if !accepted {
            break;
        }
    }
    (x, current.0)
}

fn ascent_weights(seq: &VectorSequence, iters: usize) -> Result<WeightSeq> {
    let ones = vec![0.0; seq.len()];
    let tau = default_tau(seq.len())?;
    let bessel: Vec<f64> = seq
        .norms()
        .iter()
        .zip(tau.values())
        .map(|(&n, &t)| if n > 0.0 { (t / n).ln() } else { 0.0 })
        .collect();
    let (a, va) = ascend(seq, ones, iters);
    let (b, vb) = ascend(seq, bessel, iters);
    let best = if vb > va { b } else { a };
    WeightSeq::positive(best.iter().map(|x| x.exp()).collect())
}

/// Decides whether some weighting turns the family described by `spec` into
/// a frame, sweeping the truncations `config.ns`.
///
/// The pipeline checks the unweighted family, then tries three weight
/// constructions, then looks for structural obstructions. Trend-based
/// observations (a vanishing ratio, a necessary condition failing for the
/// best weights found) are reported as supplementary reasons and never
/// produce `ObstructionFound` on their own.
pub fn weighted_frame_verdict(spec: &SequenceSpec, config: &RunConfig) -> Result<WeightedFrameVerdict> {
    config.validate()?;
    let ns = &config.ns;
    validate_ns(ns)?;
    if ns.len() < 3 {
        return Err(Error::invalid("the verdict needs at least three truncations"));
    }
    for &n in ns {
        let (dim, _) = spec.shape(n)?;
        if dim > config.max_dim {
            return Err(Error::DimensionOverflow { dim, cap: config.max_dim });
        }
    }
    let thresholds = config.trend_thresholds();
    let cutoff = config.svd_cutoff;
    let meta = spec.effective_meta();
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let seqs: Vec<VectorSequence> = ns.par_iter().map(|&n| build_sequence(spec, n)).collect::<Result<_>>()?;

    let unweighted = series(&xs, &seqs, cutoff, thresholds)?;
    let mut evidence = VerdictEvidence {
        ns: ns.clone(),
        unweighted,
        best: None,
        biorthogonal: None,
        necessary: Vec::new(),
    };

    if meta.complete_in_limit == Some(false) {
        return Ok(WeightedFrameVerdict::ObstructionFound {
            reasons: vec![ObstructionReason::NotCompleteInLimit],
            evidence,
        });
    }
    if meta.bessel_in_limit != Some(false) && evidence.unweighted.stable_frame() {
        return Ok(WeightedFrameVerdict::IsFrameAlready { evidence });
    }

    let last = seqs.last().expect("non-empty sweep");
    let certify = |w: &WeightSeq| -> Result<WeightCertificate> {
        let r = frame_bounds(&apply_weights(last, w)?);
        WeightCertificate::issue(last, w.clone(), Claim::FrameBounds { lower: r.lower_a, upper: r.upper_b }, config.tolerance)
    };

    let complete_everywhere = evidence.unweighted.complete.iter().all(|c| *c);
    let mut best: Option<(Vec<WeightSeq>, SeriesEvidence)> = None;
    if complete_everywhere {
        let normalized: Vec<WeightSeq> = seqs.iter().map(normalizing_weights).collect();
        let ev = series(&xs, &weight_all(&seqs, &normalized)?, cutoff, thresholds)?;
        if ev.stable_frame() {
            let certificate = certify(normalized.last().expect("non-empty"))?;
            evidence.best = Some(ev);
            return Ok(WeightedFrameVerdict::WeightedFrame { method: WeightMethod::Normalization, certificate, evidence });
        }

        if seqs.iter().any(|s| !is_minimal(s)) {
            let lifted: Vec<WeightSeq> = seqs.par_iter().map(lift_weights).collect::<Result<_>>()?;
            let ev = series(&xs, &weight_all(&seqs, &lifted)?, cutoff, thresholds)?;
            if ev.stable_frame() {
                let certificate = certify(lifted.last().expect("non-empty"))?;
                evidence.best = Some(ev);
                return Ok(WeightedFrameVerdict::WeightedFrame { method: WeightMethod::SubsequenceLift, certificate, evidence });
            }
        }

        let ascended: Vec<WeightSeq> =
            seqs.par_iter().map(|s| ascent_weights(s, config.ascent_iters)).collect::<Result<_>>()?;
        // rescale so that B = 1 at every truncation; the ratio is unchanged
        let weighted = weight_all(&seqs, &ascended)?;
        let ascended: Vec<WeightSeq> = ascended
            .iter()
            .zip(&weighted)
            .map(|(w, s)| {
                let b = frame_bounds(s).upper_b;
                WeightSeq::positive(w.real_values().iter().map(|v| v / b.sqrt()).collect())
            })
            .collect::<Result<_>>()?;
        let ev = series(&xs, &weight_all(&seqs, &ascended)?, cutoff, thresholds)?;
        if ev.stable_frame() {
            let certificate = certify(ascended.last().expect("non-empty"))?;
            evidence.best = Some(ev);
            return Ok(WeightedFrameVerdict::WeightedFrame { method: WeightMethod::Ascent, certificate, evidence });
        }
        best = Some((ascended, ev));
    }

    let mut reasons = Vec::new();
    if seqs.iter().all(is_minimal) {
        let scan = biorthogonal_defect_scan(&seqs, meta, config.defect_residual_threshold)?;
        if scan.fires {
            reasons.push(ObstructionReason::BiorthogonalIncomplete);
        }
        evidence.biorthogonal = Some(scan);
    }
    let best_weights: Vec<WeightSeq> = match &best {
        Some((w, _)) => w.clone(),
        None => seqs.iter().map(|s| WeightSeq::ones(s.len())).collect(),
    };
    let pairs: Vec<(VectorSequence, WeightSeq)> = seqs.iter().cloned().zip(best_weights).collect();
    evidence.necessary = necessary_conditions_check(&pairs, meta, thresholds)?;
    reasons.extend(
        evidence
            .necessary
            .iter()
            .map(|f| ObstructionReason::NecessaryConditionViolated { which: f.condition }),
    );
    let ratio_trend = match &best {
        Some((_, ev)) => ev.ratio_trend,
        None => evidence.unweighted.ratio_trend,
    };
    if ratio_trend.is_vanishing() {
        reasons.push(ObstructionReason::RatioVanishes);
    }
    evidence.best = best.map(|(_, ev)| ev);

    Ok(if reasons.iter().any(|r| r.is_structural()) {
        WeightedFrameVerdict::ObstructionFound { reasons, evidence }
    } else {
        WeightedFrameVerdict::Inconclusive { reasons, evidence }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::{FamilyName, ScalarRule};

    fn config() -> RunConfig {
        RunConfig { ns: vec![4, 8, 16, 32], ..RunConfig::default() }
    }

    #[test]
    fn onb_is_frame() {
        let v = weighted_frame_verdict(&SequenceSpec::family(FamilyName::OrthonormalBasis), &config()).unwrap();
        assert_eq!(v.status(), "is_frame_already");
    }

    #[test]
    fn diagonal_is_normalized() {
        let spec = SequenceSpec::family(FamilyName::Diagonal { c: ScalarRule::Power { scale: 1.0, exponent: 1.0 } });
        match weighted_frame_verdict(&spec, &config()).unwrap() {
            WeightedFrameVerdict::WeightedFrame { method, certificate, .. } => {
                assert_eq!(method, WeightMethod::Normalization);
                assert!((certificate.measured_lower - 1.0).abs() < 1e-9);
                assert!((certificate.measured_upper - 1.0).abs() < 1e-9);
            }
            other => panic!("unexpected verdict {other:?}"),
        }
    }

    #[test]
    fn one_plus_en_obstructed() {
        let v = weighted_frame_verdict(&SequenceSpec::family(FamilyName::OnePlusEn), &config()).unwrap();
        assert_eq!(v.status(), "obstruction_found");
        assert!(v.reasons().contains(&ObstructionReason::BiorthogonalIncomplete));
        assert!(v.reasons().contains(&ObstructionReason::RatioVanishes));
    }
}
