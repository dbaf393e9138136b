//! Randomized invariants of the public API: distribution laws of the steady
//! state, detector symmetry and positivity of the correlations, validity of
//! conditioned and propagated states, and the fringe-average sum rule.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use dicke_fringe::correlations::{
    classical_inequality_check, g1_intensity, g1_visibility, g2_analytic, g2_numeric,
};
use dicke_fringe::detection::reduce_on_detection;
use dicke_fringe::dynamics::{assemble_liouvillian, propagate, steady_state_closed_form};
use dicke_fringe::qcore::{
    hermitian_eigenvalues, Basis, C64, DensityMatrix4, DetectionDirection, Mat4, SystemParams,
    Vec4,
};
use dicke_fringe::Error;
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig { failure_persistence: None, ..ProptestConfig::default() }
}

fn drive() -> impl Strategy<Value = f64> {
    0.05f64..50.0
}

fn phase() -> impl Strategy<Value = f64> {
    0.0f64..TAU
}

prop_compose! {
    /// Random mixed state in the symmetrized basis: a 4-term convex mixture
    /// of random pure states.
    fn density()(
        parts in prop::array::uniform32(-1.0f64..1.0),
        weights in prop::array::uniform4(0.01f64..1.0),
    ) -> DensityMatrix4 {
        let total: f64 = weights.iter().sum();
        let mut m = Mat4::zeros();
        for k in 0..4 {
            let mut psi = Vec4::zeros();
            for i in 0..4 {
                psi[i] = C64::new(parts[8 * k + 2 * i], parts[8 * k + 2 * i + 1]);
            }
            if psi.norm_squared() < 1e-9 {
                psi[0] = C64::new(1.0, 0.0);
            }
            let scale = weights[k] / total / psi.norm_squared();
            m += psi * psi.adjoint() * C64::new(scale, 0.0);
        }
        DensityMatrix4::from_matrix_hermitized(m, Basis::Symmetrized)
            .expect("convex mixtures of pure states are valid")
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn steady_populations_form_a_distribution_with_a_degenerate_pair(omega in drive()) {
        let p = SystemParams::with_phi(omega, 0.0).unwrap();
        let pops = steady_state_closed_form(&p).unwrap().as_basis_ordered();
        prop_assert!((pops.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(pops.iter().all(|v| *v >= 0.0));
        // The drive-dark state |a⟩ is populated only through the decay
        // channel that also feeds from |e⟩; its weight equals ρ_ee.
        prop_assert!((pops[2] - pops[0]).abs() < 1e-14);
    }

    #[test]
    fn correlations_are_nonnegative_and_both_methods_agree(
        omega in 0.05f64..10.0,
        d1 in phase(),
        d2 in phase(),
        tau in 0.0f64..6.0,
    ) {
        let p = SystemParams::with_phi(omega, 0.0).unwrap();
        let analytic = g2_analytic(&p, d1, d2, tau).unwrap();
        let numeric = g2_numeric(
            &p,
            &DetectionDirection::Phase(d1),
            &DetectionDirection::Phase(d2),
            tau,
        )
        .unwrap();
        prop_assert!(analytic >= -1e-9, "negative correlation {analytic}");
        prop_assert!(
            (analytic - numeric).abs() < 1e-7,
            "methods disagree: {analytic} vs {numeric}"
        );
    }

    #[test]
    fn zero_delay_correlation_is_symmetric_in_the_detectors(
        omega in drive(),
        d1 in phase(),
        d2 in phase(),
    ) {
        let p = SystemParams::with_phi(omega, 0.0).unwrap();
        let fwd = g2_analytic(&p, d1, d2, 0.0).unwrap();
        let rev = g2_analytic(&p, d2, d1, 0.0).unwrap();
        prop_assert!((fwd - rev).abs() <= 1e-12 * fwd.abs().max(1.0));
    }

    #[test]
    fn same_point_detection_never_reports_a_classical_violation(
        omega in drive(),
        d in phase(),
    ) {
        let p = SystemParams::with_phi(omega, 0.0).unwrap();
        let check = classical_inequality_check(&p, d, d).unwrap();
        prop_assert!(!check.violated, "lhs {} vs rhs {}", check.lhs, check.rhs);
    }

    #[test]
    fn fringe_average_recovers_the_total_emission_rate(rho in density()) {
        // (1/2π) ∮ G¹(δ) dδ = 2ρ_ee + ρ_ss + ρ_aa; the integrand is a
        // degree-1 trigonometric polynomial, so the 4-point rectangle rule
        // is exact.
        let grid = [0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2];
        let avg: f64 =
            grid.iter().map(|&d| g1_intensity(&rho, d).unwrap()).sum::<f64>() / grid.len() as f64;
        let target = 2.0 * rho.population(0) + rho.population(1) + rho.population(2);
        prop_assert!((avg - target).abs() < 1e-12);
    }

    #[test]
    fn detection_reduction_yields_a_valid_state(rho in density(), d in phase()) {
        match reduce_on_detection(&rho, d) {
            Ok(post) => {
                let eigs = hermitian_eigenvalues(post.entries());
                prop_assert!(eigs.iter().all(|e| *e > -1e-9), "eigenvalues {eigs:?}");
                let trace: f64 = (0..4).map(|i| post.population(i)).sum();
                prop_assert!((trace - 1.0).abs() < 1e-10);
            }
            // A state dark toward this detector admits no detection.
            Err(Error::NoPhoton) => {}
            Err(e) => prop_assert!(false, "unexpected error: {e}"),
        }
    }

    #[test]
    fn propagation_preserves_state_validity(
        omega in 0.1f64..10.0,
        rho in density(),
        t in 0.0f64..30.0,
    ) {
        let p = SystemParams::with_phi(omega, 0.0).unwrap();
        let out = propagate(&assemble_liouvillian(&p), &rho, t).unwrap();
        let eigs = hermitian_eigenvalues(out.entries());
        prop_assert!(eigs.iter().all(|e| *e > -1e-9), "eigenvalues {eigs:?}");
        let trace: f64 = (0..4).map(|i| out.population(i)).sum();
        prop_assert!((trace - 1.0).abs() < 1e-10);
    }

    #[test]
    fn visibility_lies_in_the_unit_interval(omega in drive()) {
        let p = SystemParams::with_phi(omega, 0.0).unwrap();
        let v = g1_visibility(&p).unwrap();
        prop_assert!((0.0..=1.0).contains(&v), "visibility {v}");
    }
}
