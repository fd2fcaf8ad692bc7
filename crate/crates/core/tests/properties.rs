use frameforge::linalg::{pinv, real, CMatrix, C64};
use frameforge::multiplier::{assemble_multiplier, ShiftedWeights};
use frameforge::{biorthogonal, frame_bounds, is_minimal, VectorSequence};
use proptest::prelude::*;

fn complex_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = CMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), r * c)
            .prop_map(move |v| CMatrix::from_iterator(r, c, v.into_iter().map(|(a, b)| C64::new(a, b))))
    })
}

fn unitary(dim: usize, seed: &[(f64, f64)]) -> CMatrix {
    let m = CMatrix::from_iterator(dim, dim, seed.iter().map(|&(a, b)| C64::new(a, b)));
    m.qr().q()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bounds_invariant_under_permutation(m in complex_matrix(6, 10), rot in 0usize..10) {
        let s = VectorSequence::from_columns(m.clone()).unwrap();
        let n = s.len();
        let order: Vec<usize> = (0..n).map(|i| (i + rot) % n).rev().collect();
        let a = frame_bounds(&s);
        let b = frame_bounds(&s.select(&order).unwrap());
        prop_assert!((a.upper_b - b.upper_b).abs() <= 1e-10 * a.upper_b.max(1.0));
        prop_assert!((a.lower_a - b.lower_a).abs() <= 1e-10 * a.upper_b.max(1.0));
        prop_assert_eq!(a.rank, b.rank);
    }

    #[test]
    fn bounds_invariant_under_unitary(m in complex_matrix(5, 8), seed in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 25)) {
        let dim = m.nrows();
        let u = unitary(dim, &seed[..dim * dim]);
        let s = VectorSequence::from_columns(m).unwrap();
        let a = frame_bounds(&s);
        let b = frame_bounds(&s.transformed(&u).unwrap());
        prop_assert!((a.upper_b - b.upper_b).abs() <= 1e-10 * a.upper_b.max(1.0));
        prop_assert!((a.lower_a - b.lower_a).abs() <= 1e-10 * a.upper_b.max(1.0));
    }

    #[test]
    fn penrose_identities(m in complex_matrix(64, 64)) {
        let p = pinv(&m, 1e-10);
        let scale = m.norm().max(1.0);
        let tol = 1e-8 * scale * p.norm().max(1.0);
        prop_assert!((&m * &p * &m - &m).norm() <= tol * scale);
        prop_assert!((&p * &m * &p - &p).norm() <= tol * p.norm().max(1.0));
        let mp = &m * &p;
        let pm = &p * &m;
        prop_assert!((mp.adjoint() - &mp).norm() <= tol);
        prop_assert!((pm.adjoint() - &pm).norm() <= tol);
    }

    #[test]
    fn energy_between_bounds(m in complex_matrix(6, 12), x in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 6)) {
        let s = VectorSequence::from_columns(m).unwrap();
        let r = frame_bounds(&s);
        let f = frameforge::Vector::from_iterator(s.ambient_dim(), x.iter().take(s.ambient_dim()).map(|&(a, b)| C64::new(a, b)));
        let energy = (s.columns().adjoint() * &f).norm_squared();
        let nf = f.norm_squared();
        prop_assert!(energy <= r.upper_b * nf * (1.0 + 1e-10) + 1e-14);
        prop_assert!(energy >= r.lower_a * nf * (1.0 - 1e-10) - 1e-14);
    }

    #[test]
    fn biorthogonal_is_an_involution(m in complex_matrix(6, 6)) {
        let s = VectorSequence::from_columns(m).unwrap();
        prop_assume!(is_minimal(&s));
        let r = frame_bounds(&s);
        // stay away from nearly dependent draws, where both maps are ill-conditioned
        prop_assume!(s.len() < s.ambient_dim() || r.ratio > 1e-6);
        let g = biorthogonal(&s).unwrap();
        prop_assume!(frame_bounds(&g).ratio > 1e-6 || s.len() == s.ambient_dim());
        let back = biorthogonal(&g).unwrap();
        let err = (back.columns() - s.columns()).norm() / s.columns().norm();
        prop_assert!(err < 1e-6, "relative error {}", err);
        let delta = s.columns().adjoint() * g.columns();
        prop_assert!((delta - CMatrix::identity(s.len(), s.len())).norm() < 1e-6);
    }

    #[test]
    fn multiplier_linear_in_symbol(
        phi in complex_matrix(5, 7),
        a in prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 7),
        b in prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 7),
        psi_seed in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 35),
    ) {
        let (d, n) = phi.shape();
        let psi = CMatrix::from_iterator(d, n, psi_seed.iter().take(d * n).map(|&(x, y)| C64::new(x, y)));
        let phi = VectorSequence::from_columns(phi).unwrap();
        let psi = VectorSequence::from_columns(psi).unwrap();
        let ma: Vec<C64> = a[..n].iter().map(|&(x, y)| C64::new(x, y)).collect();
        let mb: Vec<C64> = b[..n].iter().map(|&(x, y)| C64::new(x, y)).collect();
        let sum: Vec<C64> = ma.iter().zip(&mb).map(|(x, y)| x + y).collect();
        let lhs = assemble_multiplier(&phi, &psi, &sum).unwrap();
        let rhs = assemble_multiplier(&phi, &psi, &ma).unwrap() + assemble_multiplier(&phi, &psi, &mb).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + phi.columns().norm() * psi.columns().norm() * 4.0));
    }

    #[test]
    fn shift_product_and_rescaling(
        m in prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 1..20),
        c in prop::collection::vec((0.1..3.0f64, -3.14..3.14f64), 20),
        zero_at in prop::option::of(0usize..20),
    ) {
        let mut symbol: Vec<C64> = m.iter().map(|&(a, b)| C64::new(a, b)).collect();
        if let Some(k) = zero_at.filter(|k| *k < symbol.len()) {
            symbol[k] = real(0.0);
        }
        let w = ShiftedWeights::canonical(&symbol);
        for (p, s) in w.product().iter().zip(&symbol) {
            prop_assert!((p - s).norm() <= 1e-12 * s.norm());
        }
        let factors: Vec<C64> = c[..symbol.len()].iter().map(|&(r, t)| C64::from_polar(r, t)).collect();
        let moved = w.rescaled(&factors).unwrap();
        for (p, s) in moved.product().iter().zip(&symbol) {
            prop_assert!((p - s).norm() <= 1e-12 * s.norm().max(1e-300));
        }
    }
}
