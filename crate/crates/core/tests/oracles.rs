//! Library results checked against independent computations: real
//! symmetric eigensolvers, brute-force subset search, closed forms.

use approx::assert_relative_eq;
use frameforge::linalg::{real, CMatrix, C64};
use frameforge::multiplier::{multiplier_matrix, reconstruction_duality_check, weight_shift, SymbolSpec};
use frameforge::opspace::{growth_classify, BoundsField, Subspace};
use frameforge::reweight::{
    dual_pair_reweight, finite_domain_lower_bound, range_characterization_check, subsequence_lift,
};
use frameforge::seqcore::{default_tau, FamilyName, SequenceSpec};
use frameforge::{
    biorthogonal, build_sequence, excess, frame_bounds, truncation_sweep, MultiplierSpec,
    TrendThresholds, Vector, VectorSequence, WeightSeq,
};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
}

/// Eigenvalues of a Hermitian matrix via its real `2n x 2n` embedding.
fn hermitian_eigs_real(h: &CMatrix) -> Vec<f64> {
    let n = h.nrows();
    let r = DMatrix::<f64>::from_fn(2 * n, 2 * n, |i, j| {
        let z = h[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let mut e: Vec<f64> = r.symmetric_eigen().eigenvalues.iter().copied().collect();
    e.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // each eigenvalue appears twice in the embedding
    e.into_iter().step_by(2).collect()
}

fn rank_by_elimination(m: &CMatrix) -> usize {
    let mut a = m.clone();
    let (rows, cols) = a.shape();
    let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let (piv, val) = (rank..rows)
            .map(|r| (r, a[(r, col)].norm()))
            .fold((rank, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= 1e-9 * scale.max(1e-300) {
            continue;
        }
        a.swap_rows(rank, piv);
        for r in rank + 1..rows {
            let factor = a[(r, col)] / a[(rank, col)];
            for c in col..cols {
                let v = a[(rank, c)];
                a[(r, c)] -= factor * v;
            }
        }
        rank += 1;
    }
    rank
}

#[test]
fn bounds_match_real_eigensolver() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..40 {
        let dim = 2 + trial % 7;
        let count = dim + trial % 5;
        let s = VectorSequence::from_columns(gaussian(&mut rng, dim, count)).unwrap();
        let r = frame_bounds(&s);
        let e = hermitian_eigs_real(&(s.columns() * s.columns().adjoint()));
        assert_relative_eq!(r.upper_b, e[e.len() - 1], max_relative = 1e-10);
        assert_relative_eq!(r.lower_a, e[0], max_relative = 1e-8);
    }
}

#[test]
fn excess_matches_elimination_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for trial in 0..60 {
        let dim = 2 + trial % 5;
        let rank = 1 + trial % dim;
        let count = rank + trial % 4;
        // product of thin factors has exactly `rank`
        let m = gaussian(&mut rng, dim, rank) * gaussian(&mut rng, rank, count);
        let s = VectorSequence::from_columns(m.clone()).unwrap();
        assert_eq!(rank_by_elimination(&m), rank.min(count));
        assert_eq!(excess(&s), count - rank.min(count));
    }
}

#[test]
fn one_plus_en_closed_forms() {
    let spec = SequenceSpec::family(FamilyName::OnePlusEn);
    for n in [4usize, 8, 16, 32, 64] {
        let s = build_sequence(&spec, n).unwrap();
        let r = frame_bounds(&s);
        // frame operator has eigenvalues N, 0 and 1 (multiplicity N-2)
        assert_relative_eq!(r.upper_b, n as f64, max_relative = 1e-12);
        assert_eq!(r.lower_a, 0.0);
        assert!(!r.complete && r.minimal);
        let g = biorthogonal(&s).unwrap();
        for m in 0..s.len() {
            let mut expected = Vector::from_element(n, real(-1.0 / n as f64));
            expected[0] = real(1.0 / n as f64);
            expected[m + 1] += real(1.0);
            assert!((g.vector(m) - expected).norm() < 1e-12);
        }
    }
    let reports = truncation_sweep(&spec, &[4, 8, 16, 32, 64]).unwrap();
    let trend = growth_classify(&reports, BoundsField::UpperB, TrendThresholds::default()).unwrap();
    assert!(trend.is_diverging());
    assert!((trend.slope().unwrap() - 1.0).abs() < 0.2);
}

#[test]
fn multiplier_matches_direct_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for trial in 0..20 {
        let dim = 2 + trial % 6;
        let count = 1 + trial % 9;
        let phi = gaussian(&mut rng, dim, count);
        let psi = gaussian(&mut rng, dim, count);
        let m: Vec<C64> = (0..count).map(|_| C64::new(StandardNormal.sample(&mut rng), 0.3)).collect();
        let to_vecs = |c: &CMatrix| (0..c.ncols()).map(|j| c.column(j).into_owned()).collect::<Vec<_>>();
        let spec = MultiplierSpec::new(
            SymbolSpec::Values(m.clone()),
            SequenceSpec::explicit(to_vecs(&phi)).unwrap(),
            SequenceSpec::explicit(to_vecs(&psi)).unwrap(),
        );
        let mat = multiplier_matrix(&spec, count).unwrap().matrix;
        let f = gaussian(&mut rng, dim, 1).column(0).into_owned();
        let mut direct = Vector::zeros(dim);
        for n in 0..count {
            direct += phi.column(n) * (m[n] * psi.column(n).dotc(&f));
        }
        assert!((mat * &f - direct).norm() <= 1e-12 * (1.0 + f.norm() * phi.norm() * psi.norm()));
    }
}

#[test]
fn canonical_dual_via_frame_operator_inverse() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for trial in 0..10 {
        let dim = 2 + trial % 5;
        let f = VectorSequence::from_columns(gaussian(&mut rng, dim, dim + 3)).unwrap();
        let s_inv = (f.columns() * f.columns().adjoint()).try_inverse().unwrap();
        let g = f.transformed(&s_inv).unwrap();
        let r = reconstruction_duality_check(&f, &g, 1e-9).unwrap();
        assert!(r.stmt1 && r.stmt2 && r.stmt3 && r.consistent, "{r:?}");
        let tau = default_tau(f.len()).unwrap();
        let pair = dual_pair_reweight(&f, &g, &tau, 1e-9).unwrap();
        assert!(pair.lower_f.measured_lower >= 1.0 - 1e-9);
        assert!(pair.bessel_g.measured_upper <= 1.0 + 1e-9);
        assert!(pair.reweighted_residuals.iter().all(|r| *r < 1e-9));
    }
}

#[test]
fn diagonal_pair_duality_collapses_to_onb() {
    let c = [0.5, 3.0, 7.0];
    let f = VectorSequence::from_columns(CMatrix::from_fn(3, 3, |i, j| real(if i == j { c[j] } else { 0.0 }))).unwrap();
    let g = VectorSequence::from_columns(CMatrix::from_fn(3, 3, |i, j| real(if i == j { 1.0 / c[j] } else { 0.0 }))).unwrap();
    let r = reconstruction_duality_check(&f, &g, 1e-12).unwrap();
    assert!(r.stmt1 && r.stmt2 && r.stmt3);
    let rescaled = frameforge::apply_weights(&f, &WeightSeq::positive(g.norms()).unwrap()).unwrap();
    assert!((rescaled.columns() - CMatrix::identity(3, 3)).norm() < 1e-15);
}

#[test]
fn finite_domain_example_on_coordinates() {
    for d in [1usize, 3, 5] {
        let spec = SequenceSpec::family(FamilyName::FiniteDomainExample { d });
        let s = build_sequence(&spec, 12).unwrap();
        let w = Subspace::coordinate(s.ambient_dim(), d).unwrap();
        let bound = finite_domain_lower_bound(&s, &w).unwrap();
        assert_relative_eq!(bound.lower_bound, 1.0, max_relative = 1e-12);
        assert_eq!(bound.basis_indices, (0..d).collect::<Vec<_>>());
        // the analysis energy of f in W equals that of the projected vectors
        let f = Vector::from_fn(s.ambient_dim(), |i, _| real(if i < d { (i + 1) as f64 } else { 0.0 }));
        let p = w.projector();
        let direct = (s.columns().adjoint() * &f).norm_squared();
        let projected = ((p * s.columns()).adjoint() * &f).norm_squared();
        assert_relative_eq!(direct, projected, max_relative = 1e-12);
    }
}

#[test]
fn subsequence_lift_on_onb_plus_junk() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let dim = 4;
    let junk = gaussian(&mut rng, dim, 6) * real(50.0);
    let mut cols = CMatrix::identity(dim, dim + 6);
    cols.columns_mut(dim, 6).copy_from(&junk);
    let s = VectorSequence::from_columns(cols).unwrap();
    let cert = subsequence_lift(&s, &[0, 1, 2, 3], &WeightSeq::ones(4)).unwrap();
    assert!(cert.measured_lower >= 1.0 - 1e-12);
    assert!(cert.measured_upper <= 2.0 + 1e-12);
    let whole: Vec<usize> = (0..s.len()).collect();
    let w = WeightSeq::positive(vec![0.3; s.len()]).unwrap();
    let cert = subsequence_lift(&s, &whole, &w).unwrap();
    let direct = frame_bounds(&frameforge::apply_weights(&s, &w).unwrap());
    assert_relative_eq!(cert.measured_lower, direct.lower_a, max_relative = 1e-12);
    assert_relative_eq!(cert.measured_upper, direct.upper_b, max_relative = 1e-12);
}

#[test]
fn range_legs_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for trial in 0..30 {
        let dim = 2 + trial % 5;
        let count = 1 + trial % 9;
        let s = VectorSequence::from_columns(gaussian(&mut rng, dim, count)).unwrap();
        let w = WeightSeq::positive((0..count).map(|n| 0.1 + (n as f64 * 0.7).sin().abs()).collect()).unwrap();
        let r = range_characterization_check(&s, &w, 1e-10).unwrap();
        assert!(r.consistent, "{r:?}");
        assert_eq!(r.frame, count >= dim);
    }
}

#[test]
fn shift_on_bounded_onb_multiplier() {
    let onb = SequenceSpec::family(FamilyName::OrthonormalBasis);
    let symbol: Vec<C64> = (1..=64).map(|n| C64::from_polar(1.0 + (n as f64).sin(), n as f64)).collect();
    let sup = symbol.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let spec = MultiplierSpec::new(SymbolSpec::Values(symbol), onb.clone(), onb);
    let r = weight_shift(&spec, &[4, 8, 16, 32, 64], TrendThresholds::default()).unwrap();
    assert!(r.bessel_witness);
    assert!(r.product_residual <= 1e-12);
    for (a, b) in r.alpha_phi_bound.iter().zip(&r.beta_psi_bound) {
        assert!(*a <= sup * (1.0 + 1e-12) && *b <= sup * (1.0 + 1e-12));
    }
}
