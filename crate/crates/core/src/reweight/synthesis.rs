use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::certificate::{Claim, WeightCertificate};
use crate::error::{Error, Result};
use crate::linalg::{
    c, distance_to_identity, numerical_rank, pinv, singular_values, CMatrix, Vector, DEFAULT_RANK_CUTOFF,
};
use crate::opspace::{frame_bounds, project_sequence, Subspace};
use crate::seqcore::{apply_weights, Positivity, TauWeights, VectorSequence, WeightSeq};

const CERT_TOL: f64 = 1e-9;

fn same_shape(f: &VectorSequence, g: &VectorSequence) -> Result<()> {
    if f.len() != g.len() {
        return Err(Error::LengthMismatch { expected: f.len(), got: g.len() });
    }
    if f.ambient_dim() != g.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "paired sequences live in dimensions {} and {}",
            f.ambient_dim(),
            g.ambient_dim()
        )));
    }
    Ok(())
}

fn check_tau(tau: &TauWeights, len: usize) -> Result<()> {
    if tau.len() != len {
        return Err(Error::LengthMismatch { expected: len, got: tau.len() });
    }
    if !tau.is_normalized() {
        return Err(Error::invalid("tau must be normalized"));
    }
    Ok(())
}

/// Weights `lambda_n = tau_n sqrt(B) / |f_n|` (and 1 where `f_n = 0`), so
/// that `(lambda_n f_n)` is Bessel with bound `B`.
pub fn bessel_weights(seq: &VectorSequence, bound: f64, tau: &TauWeights) -> Result<WeightCertificate> {
    if !(bound > 0.0) || !bound.is_finite() {
        return Err(Error::invalid(format!("Bessel bound must be positive, got {bound}")));
    }
    check_tau(tau, seq.len())?;
    let root = bound.sqrt();
    let values: Vec<f64> = seq
        .norms()
        .iter()
        .zip(tau.values())
        .map(|(&norm, &t)| if norm > 0.0 { t * root / norm } else { 1.0 })
        .collect();
    let weights = WeightSeq::positive(values)?;
    WeightCertificate::issue(seq, weights, Claim::BesselBound { bound }, CERT_TOL)
}

/// Reweighting of a dual pair: `(lambda^-1 f, lambda g)` and
/// `(beta f, beta^-1 g)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DualPairReweight {
    pub lambda: WeightSeq,
    pub beta: WeightSeq,
    /// `lambda^-1 f` has lower bound 1.
    pub lower_f: WeightCertificate,
    /// `lambda g` is Bessel with bound 1.
    pub bessel_g: WeightCertificate,
    /// `beta^-1 g` has lower bound 1.
    pub lower_g: WeightCertificate,
    /// `beta f` is Bessel with bound 1.
    pub bessel_f: WeightCertificate,
    /// `|G F^* - I|` for the input pair.
    pub duality_residual: f64,
    /// The same residual for both reweighted pairs.
    pub reweighted_residuals: [f64; 2],
}

/// Splits a weakly dual pair (`G F^* = I`) into two pairs, each a lower semi
/// frame with lower bound 1 matched with a Bessel sequence of bound 1.
pub fn dual_pair_reweight(
    f: &VectorSequence,
    g: &VectorSequence,
    tau: &TauWeights,
    tol: f64,
) -> Result<DualPairReweight> {
    same_shape(f, g)?;
    check_tau(tau, f.len())?;
    let residual = distance_to_identity(&(g.columns() * f.columns().adjoint()));
    if residual > tol {
        return Err(Error::precondition(format!(
            "sequences are not weakly dual: |G F^* - I| = {residual:.3e}"
        )));
    }
    let lambda = bessel_weights(g, 1.0, tau)?;
    let beta = bessel_weights(f, 1.0, tau)?;
    let lambda_w = lambda.weights.clone();
    let beta_w = beta.weights.clone();
    let lower_f = WeightCertificate::issue(f, lambda_w.inverse()?, Claim::LowerBound { bound: 1.0 }, CERT_TOL)?;
    let lower_g = WeightCertificate::issue(g, beta_w.inverse()?, Claim::LowerBound { bound: 1.0 }, CERT_TOL)?;
    let pair_residual = |a: &WeightSeq, b: &WeightSeq| -> Result<f64> {
        let fa = apply_weights(f, a)?;
        let gb = apply_weights(g, b)?;
        Ok(distance_to_identity(&(gb.columns() * fa.columns().adjoint())))
    };
    let reweighted_residuals = [
        pair_residual(&lambda_w.inverse()?, &lambda_w)?,
        pair_residual(&beta_w, &beta_w.inverse()?)?,
    ];
    Ok(DualPairReweight {
        lambda: lambda_w,
        beta: beta_w,
        lower_f,
        bessel_g: lambda,
        lower_g,
        bessel_f: beta,
        duality_residual: residual,
        reweighted_residuals,
    })
}

/// Reweighting of a reproducing pair with operator `T = G F^*`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReproducingPairReweight {
    pub lambda: WeightSeq,
    pub beta: WeightSeq,
    pub t_norm: f64,
    pub t_inverse_norm: f64,
    pub condition: f64,
    /// `lambda^-1 f` has lower bound `A`.
    pub lower_f: WeightCertificate,
    /// `lambda g` is Bessel with bound `|T|^2 / A`.
    pub bessel_g: WeightCertificate,
    /// `beta^-1 g` has lower bound `A`.
    pub lower_g: WeightCertificate,
    /// `beta f` is Bessel with bound `1 / (A |T^-1|^2)`.
    pub bessel_f: WeightCertificate,
}

/// Turns a reproducing pair into two weighted pairs with lower bound `a`.
///
/// `lambda` makes `(lambda_n T^-1 g_n)` Bessel with bound `1/a`; `beta`
/// makes `(beta_n f_n)` Bessel with bound `1/(a |T^-1|^2)`.
pub fn reproducing_pair_reweight(
    f: &VectorSequence,
    g: &VectorSequence,
    a: f64,
    tau: &TauWeights,
    condition_cap: f64,
) -> Result<ReproducingPairReweight> {
    same_shape(f, g)?;
    check_tau(tau, f.len())?;
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::invalid(format!("target lower bound must be positive, got {a}")));
    }
    let t = g.columns() * f.columns().adjoint();
    let sv = singular_values(&t);
    let (smax, smin) = (sv[0], *sv.last().expect("square, non-empty"));
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= condition_cap) {
        return Err(Error::precondition(format!(
            "pair operator is not boundedly invertible (condition {condition:.3e} exceeds {condition_cap:.1e})"
        )));
    }
    let t_inv = t
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::precondition("pair operator is singular"))?;
    let h = g.transformed(&t_inv)?;
    let t_inverse_norm = 1.0 / smin;
    let lambda = bessel_weights(&h, 1.0 / a, tau)?.weights;
    let beta = bessel_weights(f, 1.0 / (a * t_inverse_norm.powi(2)), tau)?.weights;
    let lower = Claim::LowerBound { bound: a };
    Ok(ReproducingPairReweight {
        lower_f: WeightCertificate::issue(f, lambda.inverse()?, lower, CERT_TOL)?,
        bessel_g: WeightCertificate::issue(g, lambda.clone(), Claim::BesselBound { bound: smax * smax / a }, CERT_TOL)?,
        lower_g: WeightCertificate::issue(g, beta.inverse()?, lower, CERT_TOL)?,
        bessel_f: WeightCertificate::issue(
            f,
            beta.clone(),
            Claim::BesselBound { bound: 1.0 / (a * t_inverse_norm.powi(2)) },
            CERT_TOL,
        )?,
        lambda,
        beta,
        t_norm: smax,
        t_inverse_norm,
        condition,
    })
}

/// Dual system produced by a surjective multiplier.
#[derive(Clone, Debug)]
pub struct SurjectiveDual {
    pub dual: VectorSequence,
    /// Largest reconstruction error `|e_j - sum <e_j, d_n> f_n|` over a basis.
    pub residual: f64,
}

/// For `M = F G^*` onto, the vectors `(M^+)^* g_n` reconstruct with `f`:
/// `h = sum <h, (M^+)^* g_n> f_n`.
pub fn surjective_multiplier_dual(
    f: &VectorSequence,
    g: &VectorSequence,
    cutoff: f64,
    tol: f64,
) -> Result<SurjectiveDual> {
    same_shape(f, g)?;
    let m = f.columns() * g.columns().adjoint();
    let dim = m.nrows();
    let rank = numerical_rank(&m, cutoff);
    if rank < dim {
        return Err(Error::precondition(format!(
            "multiplier F G^* is not surjective (rank {rank} < {dim})"
        )));
    }
    let m_pinv = pinv(&m, cutoff);
    let dual = g.transformed(&m_pinv.adjoint())?;
    let recon = f.columns() * dual.columns().adjoint();
    let residual = (CMatrix::identity(dim, dim) - recon)
        .column_iter()
        .map(|col| col.norm())
        .fold(0.0, f64::max);
    if residual > tol {
        return Err(Error::CertificateFailed(format!(
            "dual reconstruction residual {residual:.3e} exceeds {tol:.1e}"
        )));
    }
    Ok(SurjectiveDual { dual, residual })
}

/// Lower bound of a sequence on a finite-dimensional subspace `W`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiniteDomainBound {
    /// Optimal lower bound on `W` with unit weights, measured in `W`
    /// coordinates.
    pub lower_bound: f64,
    /// Indices of `dim W` vectors whose projections form a basis of `W`.
    pub basis_indices: Vec<usize>,
    pub certificate: WeightCertificate,
}

/// `sum |<f, f_n>|^2 >= A |f|^2` for `f` in `W`, whenever the projections
/// `P_W f_n` span `W`.
pub fn finite_domain_lower_bound(seq: &VectorSequence, w: &Subspace) -> Result<FiniteDomainBound> {
    if w.dim() == 0 {
        return Err(Error::invalid("subspace has dimension 0"));
    }
    let projected = project_sequence(seq, w)?;
    let mut chosen: Vec<usize> = Vec::with_capacity(w.dim());
    for n in 0..projected.len() {
        if chosen.len() == w.dim() {
            break;
        }
        chosen.push(n);
        let rank = numerical_rank(projected.select(&chosen)?.columns(), DEFAULT_RANK_CUTOFF);
        if rank < chosen.len() {
            chosen.pop();
        }
    }
    if chosen.len() < w.dim() {
        return Err(Error::precondition(format!(
            "projections span only {} of {} dimensions",
            chosen.len(),
            w.dim()
        )));
    }
    let lower_bound = frame_bounds(&projected).lower_a;
    let certificate = WeightCertificate::issue(
        &projected,
        WeightSeq::ones(projected.len()),
        Claim::LowerBound { bound: lower_bound },
        CERT_TOL,
    )?;
    Ok(FiniteDomainBound { lower_bound, basis_indices: chosen, certificate })
}

/// Raising positive weights entrywise never lowers the lower bound or any
/// analysis energy. Checks both on the optimal bound and on seeded random
/// test vectors.
pub fn monotone_weight_check(
    seq: &VectorSequence,
    w_small: &WeightSeq,
    w_large: &WeightSeq,
    seed: u64,
) -> Result<bool> {
    for w in [w_small, w_large] {
        if w.positivity() != Positivity::StrictlyPositive {
            return Err(Error::invalid("monotonicity needs strictly positive weights"));
        }
        if w.len() != seq.len() {
            return Err(Error::LengthMismatch { expected: seq.len(), got: w.len() });
        }
    }
    let (small, large) = (w_small.real_values(), w_large.real_values());
    if let Some(n) = (0..small.len()).find(|&n| small[n] > large[n]) {
        return Err(Error::precondition(format!("weights are not ordered at index {n}")));
    }
    let ws = apply_weights(seq, w_small)?;
    let wl = apply_weights(seq, w_large)?;
    let (bs, bl) = (frame_bounds(&ws), frame_bounds(&wl));
    let bound_ok = bl.lower_a >= bs.lower_a - 1e-10 * bs.lower_a.max(1.0);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = seq.ambient_dim();
    let energy_ok = (0..16).all(|_| {
        let x = Vector::from_fn(dim, |_, _| {
            c(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
        });
        let es = (ws.columns().adjoint() * &x).norm_squared();
        let el = (wl.columns().adjoint() * &x).norm_squared();
        el >= es * (1.0 - 1e-12)
    });
    Ok(bound_ok && energy_ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real;
    use crate::seqcore::default_tau;
    use approx::assert_relative_eq;

    fn seq(cols: CMatrix) -> VectorSequence {
        VectorSequence::from_columns(cols).unwrap()
    }

    #[test]
    fn bessel_weights_on_growing_norms() {
        let s = seq(CMatrix::from_fn(3, 3, |i, j| real(if i == j { (j + 1) as f64 * 10.0 } else { 0.0 })));
        let tau = default_tau(3).unwrap();
        let cert = bessel_weights(&s, 2.0, &tau).unwrap();
        assert!(cert.measured_upper <= 2.0 * (1.0 + 1e-12));
        // diagonal case: weighted norms are tau_n sqrt(2)
        assert_relative_eq!(cert.measured_upper, 2.0 * tau.values()[0].powi(2), max_relative = 1e-12);
    }

    #[test]
    fn zero_vector_gets_unit_weight() {
        let mut cols = CMatrix::identity(2, 3);
        cols[(0, 2)] = real(0.0);
        let cert = bessel_weights(&seq(cols), 1.0, &default_tau(3).unwrap()).unwrap();
        assert_eq!(cert.weights.real_values()[2], 1.0);
    }

    #[test]
    fn surjective_refused_when_rank_deficient() {
        let f = seq(CMatrix::identity(2, 2));
        let mut gm = CMatrix::identity(2, 2);
        gm[(1, 1)] = real(0.0);
        let err = surjective_multiplier_dual(&f, &seq(gm), 1e-10, 1e-9).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn monotone_rejects_unordered() {
        let s = seq(CMatrix::identity(2, 2));
        let a = WeightSeq::positive(vec![1.0, 2.0]).unwrap();
        let b = WeightSeq::positive(vec![2.0, 1.0]).unwrap();
        assert!(monotone_weight_check(&s, &a, &b, 0).is_err());
        assert!(monotone_weight_check(&s, &a, &WeightSeq::positive(vec![1.5, 2.0]).unwrap(), 0).unwrap());
    }
}
