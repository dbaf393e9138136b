//! Shared helpers for the unit-test modules: deterministic random states.

use crate::qcore::{Basis, C64, DensityMatrix4, Mat4, Vec4};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Random density matrix: convex mixture of four random pure states.
pub(crate) fn random_density(rng: &mut ChaCha8Rng, basis: Basis) -> DensityMatrix4 {
    let mut m = Mat4::zeros();
    let mut weights = [0.0; 4];
    let mut total = 0.0;
    for w in &mut weights {
        *w = rng.random::<f64>() + 1e-3;
        total += *w;
    }
    for w in &weights {
        let psi = random_ket(rng);
        let n2 = psi.norm_squared();
        m += psi * psi.adjoint() * C64::new(w / total / n2, 0.0);
    }
    DensityMatrix4::from_matrix_hermitized(m, basis).unwrap()
}

/// Random complex 4-vector with i.i.d. standard-normal components.
pub(crate) fn random_ket(rng: &mut ChaCha8Rng) -> Vec4 {
    Vec4::from_fn(|_, _| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
}

/// Random symmetrized-basis state on the 9-coordinate reduced manifold.
///
/// The manifold is the fixed-point set of the antilinear map
/// `ρ ↦ D ρ̄ D†` with `D = diag(1, −1, 1, 1)`; averaging a state with its
/// image is positivity-preserving and lands exactly on the manifold.
pub(crate) fn random_manifold_density(rng: &mut ChaCha8Rng) -> DensityMatrix4 {
    let rho = random_density(rng, Basis::Symmetrized);
    let d = Mat4::from_diagonal(&crate::qcore::Vec4::from_iterator(
        [1.0, -1.0, 1.0, 1.0].into_iter().map(|x| C64::new(x, 0.0)),
    ));
    let conj = rho.entries().conjugate();
    let mirrored = d * conj * d.adjoint();
    DensityMatrix4::from_matrix_hermitized(
        (rho.entries() + mirrored) * C64::new(0.5, 0.0),
        Basis::Symmetrized,
    )
    .unwrap()
}
