use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spec::{MultiplierSpec, TruncatedMultiplier};
use crate::config::validate_ns;
use crate::error::{Error, Result};
use crate::linalg::{c, distance_to_identity, real, singular_values, CMatrix, Vector, C64};
use crate::opspace::{
    classify_series, frame_bounds, is_minimal, semilog_slope, OperatorMatrix, OperatorRole, Trend,
    TrendThresholds,
};
use crate::seqcore::VectorSequence;

/// `Phi diag(m) Psi^*` for explicit sequences.
pub fn assemble_multiplier(phi: &VectorSequence, psi: &VectorSequence, symbol: &[C64]) -> Result<CMatrix> {
    if phi.ambient_dim() != psi.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "phi lives in dimension {} and psi in {}",
            phi.ambient_dim(),
            psi.ambient_dim()
        )));
    }
    if phi.len() != psi.len() {
        return Err(Error::LengthMismatch { expected: phi.len(), got: psi.len() });
    }
    if symbol.len() != phi.len() {
        return Err(Error::LengthMismatch { expected: phi.len(), got: symbol.len() });
    }
    let mut scaled = phi.columns().clone();
    for (mut col, &m) in scaled.column_iter_mut().zip(symbol) {
        col *= m;
    }
    Ok(scaled * psi.columns().adjoint())
}

pub fn multiplier_matrix(spec: &MultiplierSpec, trunc_index: usize) -> Result<OperatorMatrix> {
    let t = spec.truncate(trunc_index)?;
    Ok(OperatorMatrix::new(assemble_multiplier(&t.phi, &t.psi, &t.symbol)?, OperatorRole::Multiplier))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Invertibility {
    Invertible { condition: f64 },
    Singular { sigma_min: f64, sigma_max: f64 },
}

/// Invertible iff `sigma_min > cutoff * sigma_max`.
pub fn invertibility_check(spec: &MultiplierSpec, trunc_index: usize, cutoff: f64) -> Result<Invertibility> {
    let m = multiplier_matrix(spec, trunc_index)?.matrix;
    let sv = singular_values(&m);
    let (smax, smin) = (sv[0], *sv.last().expect("non-empty"));
    Ok(if smax > 0.0 && smin > cutoff * smax {
        Invertibility::Invertible { condition: smax / smin }
    } else {
        Invertibility::Singular { sigma_min: smin, sigma_max: smax }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnconditionalityVerdict {
    EvidenceUnconditional,
    EvidenceConditional,
    Inconclusive,
}

/// Statistics of the partial sums for one test vector `f`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestVectorSeries {
    /// `(sum |t_n|^2)^(1/2)` with `t_n = m_n <f, psi_n> phi_n`.
    pub lower: Vec<f64>,
    /// Best `|sum eps_n t_n|` over the sign patterns tried.
    pub sign_sup: Vec<f64>,
    /// `sum |t_n|`.
    pub majorant: Vec<f64>,
    pub lower_trend: Trend,
    pub majorant_trend: Trend,
    /// Slope of `sign_sup` against `ln N`.
    pub sign_sup_log_slope: f64,
    pub verdict: UnconditionalityVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnconditionalityReport {
    #[serde(rename = "Ns")]
    pub ns: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub tests: Vec<TestVectorSeries>,
    pub verdict: UnconditionalityVerdict,
}

const TEST_VECTORS: usize = 4;

fn sign_patterns(count: usize, trials: usize, seed: u64, terms: &[Vector]) -> Vec<Vec<f64>> {
    // greedy: each sign keeps Re<s, eps t_n> >= 0, so |s|^2 >= sum |t_n|^2
    let mut greedy = Vec::with_capacity(count);
    let mut s = Vector::zeros(terms.first().map_or(0, |t| t.len()));
    for t in terms {
        let e = if s.dotc(t).re >= 0.0 { 1.0 } else { -1.0 };
        s += t * real(e);
        greedy.push(e);
    }
    let mut patterns = vec![greedy];
    if trials > 1 {
        patterns.push(vec![1.0; count]);
    }
    let random: Vec<Vec<f64>> = (2..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            (0..count).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect()
        })
        .collect();
    patterns.extend(random);
    patterns
}

/// Evidence about unconditional convergence of the multiplier series from
/// the growth of partial-sum statistics across truncations.
///
/// The series is rendered once at the largest truncation; the statistic at
/// `N` uses its first `count(N)` terms. Test vectors are seeded unit vectors
/// with coefficients decaying like `k^-2`.
///
/// `EvidenceConditional` when the lower envelope diverges or the sign
/// supremum keeps growing logarithmically (`slope * ln(N_max/N_min)` above
/// `threshold * sign_sup(N_max)`); `EvidenceUnconditional` when the absolute
/// majorant stays bounded and the sign supremum does not grow.
pub fn unconditionality_diagnostic(
    spec: &MultiplierSpec,
    ns: &[usize],
    trials: usize,
    seed: u64,
    thresholds: TrendThresholds,
) -> Result<UnconditionalityReport> {
    validate_ns(ns)?;
    if ns.len() < 3 {
        return Err(Error::invalid("the diagnostic needs at least three truncations"));
    }
    if trials == 0 {
        return Err(Error::invalid("sign trials must be at least 1"));
    }
    let top = *ns.last().expect("non-empty");
    let TruncatedMultiplier { phi, psi, symbol } = spec.truncate(top)?;
    let counts: Vec<usize> = ns.iter().map(|&n| spec.shape(n).map(|s| s.1)).collect::<Result<_>>()?;
    let dim = phi.ambient_dim();
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tests: Vec<Vector> = (0..TEST_VECTORS)
        .map(|_| {
            let v = Vector::from_fn(dim, |k, _| {
                let z = c(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
                z / ((k + 1) as f64).powi(2)
            });
            let norm = v.norm();
            v / real(norm)
        })
        .collect();

    let mut series = Vec::with_capacity(tests.len());
    for (j, f) in tests.iter().enumerate() {
        let terms: Vec<Vector> = (0..phi.len())
            .map(|n| phi.vector(n) * (symbol[n] * psi.vector(n).dotc(f)))
            .collect();
        let norms: Vec<f64> = terms.iter().map(|t| t.norm()).collect();
        let patterns = sign_patterns(terms.len(), trials, seed.wrapping_add(j as u64), &terms);
        let mut lower = Vec::with_capacity(ns.len());
        let mut majorant = Vec::with_capacity(ns.len());
        let mut sign_sup = Vec::with_capacity(ns.len());
        for &count in &counts {
            lower.push(norms[..count].iter().map(|v| v * v).sum::<f64>().sqrt());
            majorant.push(norms[..count].iter().sum::<f64>());
            let best = patterns
                .par_iter()
                .map(|p| {
                    let mut s = Vector::zeros(dim);
                    for (t, e) in terms[..count].iter().zip(p) {
                        s += t * real(*e);
                    }
                    s.norm()
                })
                .reduce(|| 0.0, f64::max);
            sign_sup.push(best);
        }
        let lower_trend = classify_series(&xs, &lower, thresholds)?;
        let majorant_trend = classify_series(&xs, &majorant, thresholds)?;
        let slope = semilog_slope(&xs, &sign_sup);
        let growth = slope * (xs[xs.len() - 1] / xs[0]).ln();
        let last = *sign_sup.last().expect("non-empty");
        let grows = growth > thresholds.diverging * last;
        let verdict = if lower_trend.is_diverging() || grows {
            UnconditionalityVerdict::EvidenceConditional
        } else if !majorant_trend.is_diverging() {
            UnconditionalityVerdict::EvidenceUnconditional
        } else {
            UnconditionalityVerdict::Inconclusive
        };
        series.push(TestVectorSeries {
            lower,
            sign_sup,
            majorant,
            lower_trend,
            majorant_trend,
            sign_sup_log_slope: slope,
            verdict,
        });
    }
    let verdict = if series.iter().any(|s| s.verdict == UnconditionalityVerdict::EvidenceConditional) {
        UnconditionalityVerdict::EvidenceConditional
    } else if series.iter().all(|s| s.verdict == UnconditionalityVerdict::EvidenceUnconditional) {
        UnconditionalityVerdict::EvidenceUnconditional
    } else {
        UnconditionalityVerdict::Inconclusive
    };
    Ok(UnconditionalityReport { ns: ns.to_vec(), trials, seed, tests: series, verdict })
}

/// A split `alpha_n conj(beta_n) = m_n` of a symbol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftedWeights {
    pub alpha: Vec<C64>,
    pub beta: Vec<C64>,
}

impl ShiftedWeights {
    /// `alpha_n = m_n / sqrt|m_n|`, `beta_n = sqrt|m_n|`, both 0 where `m_n = 0`.
    pub fn canonical(symbol: &[C64]) -> Self {
        let (alpha, beta) = symbol
            .iter()
            .map(|m| {
                let r = m.norm();
                if r == 0.0 {
                    (real(0.0), real(0.0))
                } else {
                    (m / r.sqrt(), real(r.sqrt()))
                }
            })
            .unzip();
        ShiftedWeights { alpha, beta }
    }

    pub fn product(&self) -> Vec<C64> {
        self.alpha.iter().zip(&self.beta).map(|(a, b)| a * b.conj()).collect()
    }

    /// `(c_n alpha_n, beta_n / conj(c_n))`, which has the same product.
    pub fn rescaled(&self, factors: &[C64]) -> Result<Self> {
        if factors.len() != self.alpha.len() {
            return Err(Error::LengthMismatch { expected: self.alpha.len(), got: factors.len() });
        }
        if factors.iter().any(|f| f.norm() == 0.0) {
            return Err(Error::invalid("rescaling factors must be nonzero"));
        }
        Ok(ShiftedWeights {
            alpha: self.alpha.iter().zip(factors).map(|(a, f)| a * f).collect(),
            beta: self.beta.iter().zip(factors).map(|(b, f)| b / f.conj()).collect(),
        })
    }

    /// Largest `|alpha_n conj(beta_n) - m_n| / max(|m_n|, tiny)`.
    pub fn product_residual(&self, symbol: &[C64]) -> f64 {
        self.product()
            .iter()
            .zip(symbol)
            .map(|(p, m)| (p - m).norm() / m.norm().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftReport {
    /// Weights at the largest truncation.
    pub weights: ShiftedWeights,
    pub product_residual: f64,
    #[serde(rename = "Ns")]
    pub ns: Vec<usize>,
    /// Bessel bound of `(alpha_n phi_n)` per truncation.
    pub alpha_phi_bound: Vec<f64>,
    /// Bessel bound of `(beta_n psi_n)` per truncation.
    pub beta_psi_bound: Vec<f64>,
    pub alpha_phi_trend: Trend,
    pub beta_psi_trend: Trend,
    pub sup_symbol: f64,
    /// Both weighted sequences stay Bessel across the sweep.
    pub bessel_witness: bool,
}

fn scale_columns(seq: &VectorSequence, w: &[C64]) -> CMatrix {
    let mut cols = seq.columns().clone();
    for (mut col, &x) in cols.column_iter_mut().zip(w) {
        col *= x;
    }
    cols
}

fn upper_bound(cols: &CMatrix) -> f64 {
    singular_values(cols).first().map_or(0.0, |s| s * s)
}

/// Canonical split of the symbol and the Bessel bounds of both weighted
/// sequences across `ns`.
pub fn weight_shift(spec: &MultiplierSpec, ns: &[usize], thresholds: TrendThresholds) -> Result<ShiftReport> {
    validate_ns(ns)?;
    if ns.len() < 3 {
        return Err(Error::invalid("the shift report needs at least three truncations"));
    }
    let truncs: Vec<TruncatedMultiplier> = ns.par_iter().map(|&n| spec.truncate(n)).collect::<Result<_>>()?;
    let mut alpha_phi_bound = Vec::with_capacity(ns.len());
    let mut beta_psi_bound = Vec::with_capacity(ns.len());
    for t in &truncs {
        let w = ShiftedWeights::canonical(&t.symbol);
        alpha_phi_bound.push(upper_bound(&scale_columns(&t.phi, &w.alpha)));
        beta_psi_bound.push(upper_bound(&scale_columns(&t.psi, &w.beta)));
    }
    let last = truncs.last().expect("non-empty");
    let weights = ShiftedWeights::canonical(&last.symbol);
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let alpha_phi_trend = classify_series(&xs, &alpha_phi_bound, thresholds)?;
    let beta_psi_trend = classify_series(&xs, &beta_psi_bound, thresholds)?;
    Ok(ShiftReport {
        product_residual: weights.product_residual(&last.symbol),
        sup_symbol: last.symbol.iter().map(|m| m.norm()).fold(0.0, f64::max),
        weights,
        ns: ns.to_vec(),
        alpha_phi_bound,
        beta_psi_bound,
        bessel_witness: !alpha_phi_trend.is_diverging() && !beta_psi_trend.is_diverging(),
        alpha_phi_trend,
        beta_psi_trend,
    })
}

/// Where an interleaved member comes from (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "from", content = "index", rename_all = "snake_case")]
pub enum Slot {
    /// `(phi_n, psi_n, m_n)`.
    Symbol(usize),
    /// `(f_n, g_n, 1)` with `g_n = e_n` and `f_n = (I - M) g_n`.
    Complement(usize),
}

/// `M_{m', Xi, Theta} = I` built from `M_{m, Phi, Psi}`.
#[derive(Clone, Debug)]
pub struct InterleavedSystem {
    pub symbol: Vec<C64>,
    pub xi: VectorSequence,
    pub theta: VectorSequence,
    pub slots: Vec<Slot>,
    /// `|M_{m', Xi, Theta} - I|`.
    pub residual: f64,
}

impl InterleavedSystem {
    /// Positions (0-based) of the original multiplier members, in order.
    pub fn symbol_positions(&self) -> Vec<usize> {
        self.slots
            .iter()
            .enumerate()
            .filter_map(|(i, s)| matches!(s, Slot::Symbol(_)).then_some(i))
            .collect()
    }
}

/// Interleaves `(phi_n, psi_n, m_n)` with `((I - M) e_n, e_n, 1)`; leftover
/// members of the longer list are appended in order.
pub fn interleave_identity_construction(spec: &MultiplierSpec, trunc_index: usize) -> Result<InterleavedSystem> {
    let t = spec.truncate(trunc_index)?;
    interleave_truncated(&t)
}

pub(crate) fn interleave_truncated(t: &TruncatedMultiplier) -> Result<InterleavedSystem> {
    let m = assemble_multiplier(&t.phi, &t.psi, &t.symbol)?;
    let dim = m.nrows();
    let eye = CMatrix::identity(dim, dim);
    let complement = &eye - &m;
    let count = t.phi.len();
    let total = count + dim;
    let mut xi = CMatrix::zeros(dim, total);
    let mut theta = CMatrix::zeros(dim, total);
    let mut symbol = Vec::with_capacity(total);
    let mut slots = Vec::with_capacity(total);
    let (mut a, mut b) = (0, 0);
    while a < count || b < dim {
        if a < count && (a <= b || b == dim) {
            let k = slots.len();
            xi.set_column(k, &t.phi.columns().column(a));
            theta.set_column(k, &t.psi.columns().column(a));
            symbol.push(t.symbol[a]);
            a += 1;
            slots.push(Slot::Symbol(a));
        }
        if b < dim && (b < a || a == count) {
            let k = slots.len();
            xi.set_column(k, &complement.column(b));
            theta.set_column(k, &eye.column(b));
            symbol.push(real(1.0));
            b += 1;
            slots.push(Slot::Complement(b));
        }
    }
    let xi = VectorSequence::from_columns(xi)?;
    let theta = VectorSequence::from_columns(theta)?;
    let residual = distance_to_identity(&assemble_multiplier(&xi, &theta, &symbol)?);
    Ok(InterleavedSystem { symbol, xi, theta, slots, residual })
}

/// The three reconstruction statements for a pair `(F, G)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    /// `f = sum <f, f_n> g_n` for all `f`.
    pub stmt1: bool,
    /// `(|g_n| f_n)` and `(g_n / |g_n|)` are dual frames.
    pub stmt2: bool,
    /// `(|f_n| g_n)` and `(f_n / |f_n|)` are dual frames.
    pub stmt3: bool,
    pub consistent: bool,
    pub residual1: f64,
    pub residual2: f64,
    pub residual3: f64,
}

/// `(A, B)` are dual frames: both span and `B A^* = A B^* = I`.
fn dual_frames(a: &CMatrix, b: &CMatrix, tol: f64) -> (bool, f64) {
    let sa = VectorSequence::from_columns(a.clone()).map(|s| frame_bounds(&s).complete);
    let sb = VectorSequence::from_columns(b.clone()).map(|s| frame_bounds(&s).complete);
    let r = distance_to_identity(&(b * a.adjoint())).max(distance_to_identity(&(a * b.adjoint())));
    (matches!((sa, sb), (Ok(true), Ok(true))) && r <= tol, r)
}

/// Rescales `target` by `|source_n|` and `source` by `1/|source_n|`.
fn norm_swapped(target: &VectorSequence, source: &VectorSequence) -> Option<(CMatrix, CMatrix)> {
    let norms = source.norms();
    if norms.iter().any(|n| *n == 0.0) {
        return None;
    }
    let up: Vec<C64> = norms.iter().map(|n| real(*n)).collect();
    let down: Vec<C64> = norms.iter().map(|n| real(1.0 / n)).collect();
    Some((scale_columns(target, &up), scale_columns(source, &down)))
}

/// Evaluates the three equivalent reconstruction statements. Refuses pairs
/// with `inf |f_n||g_n| = 0` unless one of the sequences is minimal.
pub fn reconstruction_duality_check(f: &VectorSequence, g: &VectorSequence, tol: f64) -> Result<DualityReport> {
    if f.len() != g.len() || f.ambient_dim() != g.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "pair shapes differ: {}x{} and {}x{}",
            f.ambient_dim(),
            f.len(),
            g.ambient_dim(),
            g.len()
        )));
    }
    let inf = f.norms().iter().zip(g.norms()).map(|(a, b)| a * b).fold(f64::INFINITY, f64::min);
    if !(inf > tol) && !is_minimal(f) && !is_minimal(g) {
        return Err(Error::precondition(format!(
            "inf |f_n||g_n| = {inf:.3e} and neither sequence is minimal"
        )));
    }
    let residual1 = distance_to_identity(&(g.columns() * f.columns().adjoint()));
    let stmt1 = residual1 <= tol;
    let (stmt2, residual2) = match norm_swapped(f, g) {
        Some((fa, gb)) => dual_frames(&fa, &gb, tol),
        None => (false, f64::INFINITY),
    };
    let (stmt3, residual3) = match norm_swapped(g, f) {
        Some((gb, fa)) => dual_frames(&gb, &fa, tol),
        None => (false, f64::INFINITY),
    };
    Ok(DualityReport {
        stmt1,
        stmt2,
        stmt3,
        consistent: stmt1 == stmt2 && stmt2 == stmt3,
        residual1,
        residual2,
        residual3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiplier::SymbolSpec;
    use crate::seqcore::{FamilyName, SequenceSpec};

    fn onb_spec(m: SymbolSpec) -> MultiplierSpec {
        let onb = SequenceSpec::family(FamilyName::OrthonormalBasis);
        MultiplierSpec::new(m, onb.clone(), onb)
    }

    #[test]
    fn half_identity_interleaves_to_identity() {
        let sys = interleave_identity_construction(&onb_spec(SymbolSpec::constant(real(0.5))), 4).unwrap();
        assert!(sys.residual < 1e-15);
        assert_eq!(sys.slots[..4], [Slot::Symbol(1), Slot::Complement(1), Slot::Symbol(2), Slot::Complement(2)]);
        assert_eq!(sys.symbol_positions(), vec![0, 2, 4, 6]);
        assert_eq!(sys.xi.vector(1)[0], real(0.5));
    }

    #[test]
    fn uneven_counts_append_tail() {
        let spec = MultiplierSpec::new(
            SymbolSpec::constant(real(2.0)),
            SequenceSpec::family(FamilyName::RepeatedUnit { index: 2 }),
            SequenceSpec::family(FamilyName::RepeatedUnit { index: 2 }),
        );
        let sys = interleave_identity_construction(&spec, 5).unwrap();
        assert_eq!(sys.slots.len(), 7);
        assert_eq!(sys.slots[4..], [Slot::Symbol(3), Slot::Symbol(4), Slot::Symbol(5)]);
        assert!(sys.residual < 1e-12);
    }

    #[test]
    fn zero_symbol_is_singular_and_unconditional() {
        let spec = onb_spec(SymbolSpec::constant(real(0.0)));
        assert!(matches!(invertibility_check(&spec, 3, 1e-10).unwrap(), Invertibility::Singular { .. }));
        let r = unconditionality_diagnostic(&spec, &[4, 8, 16], 8, 1, TrendThresholds::default()).unwrap();
        assert_eq!(r.verdict, UnconditionalityVerdict::EvidenceUnconditional);
    }

    #[test]
    fn identity_invertible() {
        let spec = onb_spec(SymbolSpec::constant(real(1.0)));
        match invertibility_check(&spec, 5, 1e-10).unwrap() {
            Invertibility::Invertible { condition } => assert!((condition - 1.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn shift_of_unit_symbol() {
        let w = ShiftedWeights::canonical(&[real(1.0); 3]);
        assert_eq!(w.alpha, vec![real(1.0); 3]);
        assert_eq!(w.beta, vec![real(1.0); 3]);
        let z = C64::from_polar(4.0, 0.7);
        let w = ShiftedWeights::canonical(&[z, real(0.0)]);
        assert!((w.alpha[0] - C64::from_polar(2.0, 0.7)).norm() < 1e-14);
        assert_eq!(w.product()[1], real(0.0));
    }

    #[test]
    fn duality_on_diagonal_pair() {
        let f = VectorSequence::from_columns(CMatrix::from_diagonal(&Vector::from_vec(vec![real(2.0), real(0.1)]))).unwrap();
        let g = VectorSequence::from_columns(CMatrix::from_diagonal(&Vector::from_vec(vec![real(0.5), real(10.0)]))).unwrap();
        let r = reconstruction_duality_check(&f, &g, 1e-9).unwrap();
        assert!(r.stmt1 && r.stmt2 && r.stmt3 && r.consistent);
    }

    #[test]
    fn duality_refuses_degenerate() {
        let mut fm = CMatrix::identity(2, 3);
        fm[(0, 2)] = real(1.0);
        let mut gm = CMatrix::identity(2, 3);
        gm[(0, 2)] = real(0.0);
        let f = VectorSequence::from_columns(fm).unwrap();
        let g = VectorSequence::from_columns(gm).unwrap();
        assert!(matches!(reconstruction_duality_check(&f, &g, 1e-9), Err(Error::Precondition(_))));
    }
}
