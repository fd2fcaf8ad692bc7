use serde::{Deserialize, Serialize};

use super::certificate::{Claim, WeightCertificate};
use super::synthesis::bessel_weights;
use crate::error::{Error, Result};
use crate::linalg::{pinv, singular_values, rank_from_singular_values, CMatrix, DEFAULT_RANK_CUTOFF};
use crate::opspace::{biorthogonal, classify_series, frame_bounds, is_minimal, riesz_test, Trend, TrendThresholds};
use crate::seqcore::{apply_weights, default_tau, LimitMeta, Positivity, VectorSequence, WeightSeq};

const CERT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NecessaryCondition {
    /// A weighted frame has `sup |w_n| |f_n| < inf`.
    SupWeightedNorm,
    /// With `inf |f_n| > 0`, a weighted frame has `sup |w_n| < inf`.
    SupWeight,
    /// For a non-Bessel sequence, a weighted frame needs `inf |w_n| = 0`.
    InfWeight,
}

/// A necessary condition for `(w_n f_n)` to be a frame that fails across the
/// sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NecessaryFinding {
    pub condition: NecessaryCondition,
    #[serde(rename = "Ns")]
    pub ns: Vec<usize>,
    pub series: Vec<f64>,
    pub trend: Trend,
}

fn sweep_abscissae<'a>(seqs: impl Iterator<Item = &'a VectorSequence>) -> Result<Vec<usize>> {
    let ns = seqs
        .map(|s| s.trunc_index())
        .collect::<Option<Vec<usize>>>()
        .ok_or_else(|| Error::invalid("sweep members need a truncation index"))?;
    crate::config::validate_ns(&ns)?;
    Ok(ns)
}

/// Runs the three necessary conditions over a sweep of weighted truncations
/// and returns the ones that fail. Fewer than three truncations give no
/// trend and therefore no findings.
pub fn necessary_conditions_check(
    sweep: &[(VectorSequence, WeightSeq)],
    meta: LimitMeta,
    thresholds: TrendThresholds,
) -> Result<Vec<NecessaryFinding>> {
    let ns = sweep_abscissae(sweep.iter().map(|(s, _)| s))?;
    for (s, w) in sweep {
        if s.len() != w.len() {
            return Err(Error::LengthMismatch { expected: s.len(), got: w.len() });
        }
    }
    if sweep.len() < 3 {
        return Ok(Vec::new());
    }
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);

    let mut sup_wnorm = Vec::new();
    let mut inf_norm = Vec::new();
    let mut sup_w = Vec::new();
    let mut inf_w = Vec::new();
    for (s, w) in sweep {
        let norms = s.norms();
        let mods = w.moduli();
        let weighted: Vec<f64> = norms.iter().zip(&mods).map(|(a, b)| a * b).collect();
        sup_wnorm.push(max(&weighted));
        inf_norm.push(min(&norms));
        sup_w.push(max(&mods));
        inf_w.push(min(&mods));
    }

    let mut findings = Vec::new();
    let mut push = |condition, series: Vec<f64>, trend: Trend| {
        findings.push(NecessaryFinding { condition, ns: ns.clone(), series, trend });
    };
    let t = classify_series(&xs, &sup_wnorm, thresholds)?;
    if t.is_diverging() {
        push(NecessaryCondition::SupWeightedNorm, sup_wnorm, t);
    }
    let norms_stay = inf_norm.iter().all(|v| *v > 0.0) && !classify_series(&xs, &inf_norm, thresholds)?.is_vanishing();
    let t = classify_series(&xs, &sup_w, thresholds)?;
    if norms_stay && t.is_diverging() {
        push(NecessaryCondition::SupWeight, sup_w, t);
    }
    if meta.bessel_in_limit == Some(false) {
        let t = classify_series(&xs, &inf_w, thresholds)?;
        if !t.is_vanishing() {
            push(NecessaryCondition::InfWeight, inf_w, t);
        }
    }
    Ok(findings)
}

/// How far the normalized biorthogonal system stays from spanning, per
/// truncation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiorthogonalScan {
    #[serde(rename = "Ns")]
    pub ns: Vec<usize>,
    /// `dim - rank` of the biorthogonal system.
    pub defects: Vec<usize>,
    /// Coordinate `k` (1-based) of the probe direction `e_k`.
    pub direction: usize,
    /// `1 - sum_m |<e_k, g_m / |g_m|>|^2`, clipped to `[0, 1]`.
    pub residuals: Vec<f64>,
    pub threshold: f64,
    /// The residual exceeds the threshold at every truncation while the
    /// sequence is declared complete in the limit.
    pub fires: bool,
}

/// Scans the normalized biorthogonal systems of a sweep of minimal
/// truncations for a fixed direction they fail to capture.
///
/// Among the coordinate directions present at the smallest truncation, the
/// one with the largest worst-case residual is reported.
pub fn biorthogonal_defect_scan(
    sweep: &[VectorSequence],
    meta: LimitMeta,
    threshold: f64,
) -> Result<BiorthogonalScan> {
    let ns = sweep_abscissae(sweep.iter())?;
    let mut defects = Vec::with_capacity(sweep.len());
    let mut energies: Vec<Vec<f64>> = Vec::with_capacity(sweep.len());
    let probe_dim = sweep.iter().map(|s| s.ambient_dim()).min().expect("non-empty sweep");
    for s in sweep {
        let g = biorthogonal(s)?;
        let sv = singular_values(g.columns());
        defects.push(g.ambient_dim() - rank_from_singular_values(&sv, DEFAULT_RANK_CUTOFF));
        let mut energy = vec![0.0; probe_dim];
        for col in g.columns().column_iter() {
            let norm2 = col.norm_squared();
            if norm2 == 0.0 {
                continue;
            }
            for (k, e) in energy.iter_mut().enumerate() {
                *e += col[k].norm_sqr() / norm2;
            }
        }
        energies.push(energy);
    }
    let worst = |k: usize| energies.iter().map(|e| (1.0 - e[k]).clamp(0.0, 1.0)).fold(1.0, f64::min);
    let mut direction = 0;
    for k in 1..probe_dim {
        if worst(k) > worst(direction) {
            direction = k;
        }
    }
    let residuals: Vec<f64> = energies.iter().map(|e| (1.0 - e[direction]).clamp(0.0, 1.0)).collect();
    let fires = meta.complete_in_limit == Some(true) && residuals.iter().all(|r| *r > threshold);
    Ok(BiorthogonalScan { ns, defects, direction: direction + 1, residuals, threshold, fires })
}

/// Evidence that a complete minimal sequence has a biorthogonal system that
/// is not complete, which rules out every weighting. `None` when the scan
/// does not fire.
pub fn biorthogonal_obstruction(
    sweep: &[VectorSequence],
    meta: LimitMeta,
    threshold: f64,
) -> Result<Option<BiorthogonalScan>> {
    if sweep.iter().any(|s| !is_minimal(s)) {
        return Ok(None);
    }
    let scan = biorthogonal_defect_scan(sweep, meta, threshold)?;
    Ok(scan.fires.then_some(scan))
}

/// Frame bounds for `seq` weighted by `subset_weights` on `subset` and by
/// Bessel weights (bound 1) elsewhere. The claim is
/// `A_sub <= A` and `B <= B_sub + 1`.
pub fn subsequence_lift(
    seq: &VectorSequence,
    subset: &[usize],
    subset_weights: &WeightSeq,
) -> Result<WeightCertificate> {
    if subset.len() != subset_weights.len() {
        return Err(Error::LengthMismatch { expected: subset.len(), got: subset_weights.len() });
    }
    if subset_weights.positivity() != Positivity::StrictlyPositive {
        return Err(Error::invalid("subset weights must be strictly positive"));
    }
    let mut in_subset = vec![false; seq.len()];
    for &i in subset {
        if i >= seq.len() || in_subset[i] {
            return Err(Error::invalid(format!("subset index {i} is out of range or repeated")));
        }
        in_subset[i] = true;
    }
    let sub = apply_weights(&seq.select(subset)?, subset_weights)?;
    let sub_bounds = frame_bounds(&sub);
    if !sub_bounds.complete {
        return Err(Error::precondition("weighted subsequence is not a frame"));
    }
    let mut full = vec![0.0; seq.len()];
    for (&i, w) in subset.iter().zip(subset_weights.real_values()) {
        full[i] = w;
    }
    let rest: Vec<usize> = (0..seq.len()).filter(|&i| !in_subset[i]).collect();
    let mut upper = sub_bounds.upper_b;
    if !rest.is_empty() {
        let lifted = bessel_weights(&seq.select(&rest)?, 1.0, &default_tau(rest.len())?)?;
        for (&i, w) in rest.iter().zip(lifted.weights.real_values()) {
            full[i] = w;
        }
        upper += 1.0;
    }
    WeightCertificate::issue(
        seq,
        WeightSeq::positive(full)?,
        Claim::FrameBounds { lower: sub_bounds.lower_a, upper },
        CERT_TOL,
    )
}

/// Indices of a Riesz basis obtained by removing exactly `excess` vectors
/// from the weighted frame `(w_n f_n)`.
///
/// Vectors are removed one at a time, each time choosing the removal that
/// keeps the largest lower bound (smallest index on ties).
pub fn excess_characterization(seq: &VectorSequence, w: &WeightSeq) -> Result<Vec<usize>> {
    let weighted = apply_weights(seq, w)?;
    let report = frame_bounds(&weighted);
    if !report.complete {
        return Err(Error::precondition("weighted sequence is not a frame"));
    }
    if report.excess == 0 {
        return Err(Error::precondition("sequence has no excess; it is already a Riesz basis"));
    }
    let dim = weighted.ambient_dim();
    let mut keep: Vec<usize> = (0..weighted.len()).collect();
    for _ in 0..report.excess {
        let mut best: Option<(usize, f64)> = None;
        for pos in 0..keep.len() {
            let mut trial = keep.clone();
            trial.remove(pos);
            let sv = singular_values(weighted.select(&trial)?.columns());
            if rank_from_singular_values(&sv, DEFAULT_RANK_CUTOFF) < dim {
                continue;
            }
            let lower = sv[dim - 1].powi(2);
            if best.map_or(true, |(_, b)| lower > b * (1.0 + 1e-12)) {
                best = Some((pos, lower));
            }
        }
        let (pos, _) = best.ok_or_else(|| Error::CertificateFailed("no removable vector left".into()))?;
        keep.remove(pos);
    }
    let verdict = riesz_test(&weighted.select(&keep)?);
    if !verdict.is_riesz() {
        return Err(Error::CertificateFailed(format!("reduced sequence is not a Riesz basis: {verdict:?}")));
    }
    Ok(keep)
}

/// Three computations of "`(w_n f_n)` is a frame": singular values of the
/// weighted synthesis, a pivoted QR of the weighted analysis matrix and the
/// range projector of the weighted synthesis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RangeCheck {
    pub frame: bool,
    pub analysis_bounded_below: bool,
    pub synthesis_onto: bool,
    pub consistent: bool,
}

pub fn range_characterization_check(seq: &VectorSequence, w: &WeightSeq, cutoff: f64) -> Result<RangeCheck> {
    if w.positivity() != Positivity::StrictlyPositive {
        return Err(Error::invalid("range characterization needs strictly positive weights"));
    }
    let weighted = apply_weights(seq, w)?;
    let dim = weighted.ambient_dim();

    let frame = crate::opspace::frame_bounds_with(&weighted, cutoff).complete;

    let qr = weighted.columns().adjoint().col_piv_qr();
    let r = qr.unpack_r();
    let diag: Vec<f64> = (0..r.nrows().min(r.ncols())).map(|i| r[(i, i)].norm()).collect();
    let lead = diag.first().copied().unwrap_or(0.0);
    let analysis_bounded_below = diag.len() == dim && diag.iter().all(|d| *d > cutoff * lead);

    let synth = weighted.columns();
    let projector = synth * pinv(synth, cutoff);
    let defect = crate::linalg::spectral_norm(&(projector - CMatrix::identity(dim, dim)));
    let synthesis_onto = defect < 0.5;

    Ok(RangeCheck {
        frame,
        analysis_bounded_below,
        synthesis_onto,
        consistent: frame == analysis_bounded_below && frame == synthesis_onto,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real;
    use crate::seqcore::{build_sequence, FamilyName, SequenceSpec};

    fn sweep(family: FamilyName, ns: &[usize]) -> Vec<VectorSequence> {
        let spec = SequenceSpec::family(family);
        ns.iter().map(|&n| build_sequence(&spec, n).unwrap()).collect()
    }

    #[test]
    fn one_plus_en_biorthogonal_fires() {
        let s = sweep(FamilyName::OnePlusEn, &[4, 8, 16]);
        let meta = FamilyName::OnePlusEn.known_limit_meta();
        let scan = biorthogonal_defect_scan(&s, meta, 0.5).unwrap();
        assert_eq!(scan.direction, 1);
        for (r, n) in scan.residuals.iter().zip(&scan.ns) {
            assert!((r - (1.0 - 1.0 / *n as f64)).abs() < 1e-10, "{r} at {n}");
        }
        assert!(scan.defects.iter().all(|d| *d == 1));
        assert!(biorthogonal_obstruction(&s, meta, 0.5).unwrap().is_some());
    }

    #[test]
    fn onb_biorthogonal_quiet() {
        let s = sweep(FamilyName::OrthonormalBasis, &[4, 8, 16]);
        let meta = FamilyName::OrthonormalBasis.known_limit_meta();
        assert!(biorthogonal_obstruction(&s, meta, 0.5).unwrap().is_none());
    }

    #[test]
    fn onb_with_linear_weights_violates_two() {
        let s = sweep(FamilyName::OrthonormalBasis, &[4, 8, 16, 32]);
        let pairs: Vec<_> = s
            .into_iter()
            .map(|s| {
                let w = WeightSeq::positive((1..=s.len()).map(|n| n as f64).collect()).unwrap();
                (s, w)
            })
            .collect();
        let found = necessary_conditions_check(&pairs, LimitMeta::default(), TrendThresholds::default()).unwrap();
        let kinds: Vec<_> = found.iter().map(|f| f.condition).collect();
        assert_eq!(kinds, vec![NecessaryCondition::SupWeightedNorm, NecessaryCondition::SupWeight]);
    }

    #[test]
    fn excess_removes_duplicate() {
        let mut cols = CMatrix::identity(2, 3);
        cols[(0, 2)] = real(1.0);
        let s = VectorSequence::from_columns(cols).unwrap();
        let keep = excess_characterization(&s, &WeightSeq::ones(3)).unwrap();
        assert_eq!(keep.len(), 2);
    }

    #[test]
    fn range_legs_agree_on_deficient() {
        let mut cols = CMatrix::identity(3, 3);
        cols[(2, 2)] = real(0.0);
        let s = VectorSequence::from_columns(cols).unwrap();
        let r = range_characterization_check(&s, &WeightSeq::ones(3), 1e-10).unwrap();
        assert!(r.consistent && !r.frame);
    }
}
