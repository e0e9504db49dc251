//! Property tests for the structural invariants.

use num_complex::Complex64;
use proptest::prelude::*;

use hskdv::diophantine::{smoothing_gain, ContinuedFraction, MuAssignment, MuProvenance};
use hskdv::normal_form::{compute_coefficients, Coupling, NormalFormOperators};
use hskdv::oracle;
use hskdv::spectral::{
    dealiased_product, dft_forward, dft_inverse, sobolev_norm, GridSpec, SpectralField,
};
use hskdv::system::{linear_phase, propagate_linear};

fn field_strategy(n: usize, mean_zero: bool) -> impl Strategy<Value = SpectralField> {
    let coeff = (-1.0f64..1.0, -1.0f64..1.0);
    let mean = if mean_zero {
        Just(0.0f64).boxed()
    } else {
        (-1.0f64..1.0).boxed()
    };
    (proptest::collection::vec(coeff, n), mean).prop_map(move |(coeffs, mean)| {
        let mut f = SpectralField::zeros(n, mean_zero);
        for (i, (re, im)) in coeffs.into_iter().enumerate() {
            f.set_pair(i as i64 + 1, Complex64::new(re, im));
        }
        if !mean_zero {
            f.set_pair(0, Complex64::new(mean, 0.0));
        }
        f
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_round_trip_is_identity(field in field_strategy(24, false)) {
        let grid = GridSpec::for_modes(24);
        let samples = dft_inverse(&field, &grid).unwrap();
        let back = dft_forward(&samples, &grid).unwrap();
        prop_assert!(back.max_diff(&field) < 1e-12);
    }

    #[test]
    fn parseval_holds_on_the_grid(field in field_strategy(16, false)) {
        let grid = GridSpec::for_modes(16);
        let samples = dft_inverse(&field, &grid).unwrap();
        let phys: f64 = samples.iter().map(|s| s * s).sum::<f64>() / samples.len() as f64;
        let spec = sobolev_norm(&field, 0.0, false).powi(2);
        prop_assert!((phys - spec).abs() <= 1e-10 * spec.max(1.0));
    }

    #[test]
    fn products_match_direct_convolution(
        f in field_strategy(20, false),
        g in field_strategy(20, true),
    ) {
        let grid = GridSpec::for_modes(20);
        let fast = dealiased_product(&f, &g, &grid).unwrap();
        prop_assert!(fast.max_diff(&oracle::convolve_direct(&f, &g)) < 1e-12);
        prop_assert!(fast.check_hermitian().is_ok());
    }

    #[test]
    fn operators_preserve_hermitian_symmetry(
        u in field_strategy(6, true),
        v in field_strategy(6, false),
    ) {
        let rc = compute_coefficients(&Coupling::from_fraction(1, 3).unwrap()).unwrap();
        let ops = NormalFormOperators::new(rc, -1.0);
        prop_assert!(ops.b1(&u, &u).unwrap().check_hermitian().is_ok());
        prop_assert!(ops.b2(&v, &v).unwrap().check_hermitian().is_ok());
        prop_assert!(ops.b3(&u, &v).unwrap().check_hermitian().is_ok());
        prop_assert!(ops.r2(&u, &u, &u).unwrap().check_hermitian().is_ok());
        prop_assert!(ops.r4(&u, &u, &v).unwrap().check_hermitian().is_ok());
        prop_assert!(ops.rho2(&v, &v).check_hermitian().is_ok());
        prop_assert!(ops.rho3(&u, &v).check_hermitian().is_ok());
    }

    #[test]
    fn linear_propagation_is_isometric_and_hermitian(
        field in field_strategy(12, false),
        a in 0.26f64..0.99,
        t in 0.0f64..5.0,
    ) {
        prop_assert!((linear_phase(3, a, t).norm() - 1.0).abs() < 1e-14);
        let moved = propagate_linear(&field, a, t, 0.0);
        prop_assert!(moved.check_hermitian().is_ok());
        let before = sobolev_norm(&field, 1.0, false);
        let after = sobolev_norm(&moved, 1.0, false);
        prop_assert!((before - after).abs() <= 1e-12 * before.max(1.0));
    }

    #[test]
    fn convergents_satisfy_determinant_identity(
        num in -100_000i64..100_000,
        den in 1i64..100_000,
    ) {
        let cf = ContinuedFraction::from_rational(num, den, 50).unwrap();
        prop_assert!(cf.determinant_identity_holds());
        // Convergent denominators never decrease.
        for w in cf.convergents.windows(2) {
            prop_assert!(w[1].1 >= w[0].1);
        }
    }

    #[test]
    fn admissible_gain_is_monotone_in_s(s in 0.51f64..4.0, ds in 0.0f64..2.0) {
        let mu = MuAssignment { value: 2.0, provenance: MuProvenance::AlgebraicIrrational };
        let lo = smoothing_gain(s, &mu, false).unwrap();
        let hi = smoothing_gain(s + ds, &mu, false).unwrap();
        prop_assert!(hi >= lo - 1e-12);
    }

    #[test]
    fn coupling_fraction_round_trip(p in 1i64..1000, q in 1i64..1000) {
        prop_assume!(p < q);
        let c = Coupling::from_fraction(p, q).unwrap();
        let parsed: Coupling = c.to_string().parse().unwrap();
        prop_assert_eq!(c, parsed);
    }
}
