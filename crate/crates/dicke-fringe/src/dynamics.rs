//! Rotating-frame Liouvillian of the driven pair, propagation, steady states
//! (closed-form and numeric), and the reduced 6+3 real ODE system.
//!
//! The generator acts on column-stacked density matrices
//! (`vec(AρB) = (Bᵀ⊗A) vec(ρ)`). At exact resonance the rotating frame makes
//! it time-independent. In the symmetrized basis the drive couples only
//! `|g⟩ ↔ |s⟩ ↔ |e⟩` (the antisymmetric state is dark) and the generator is
//! independent of the laser phase φ; φ enters solely through the basis map.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::qcore::{
    kron, pauli_ops, unvec, vec_of, Basis, C64, DensityMatrix4, Mat16, Mat4, SystemParams, Vec16,
};

/// Residual bound for the numeric steady state, `‖L vec(ρ_SS)‖`.
pub const STEADY_RESIDUAL_TOL: f64 = 1e-11;
/// Singular values below this count as kernel directions.
pub const KERNEL_TOL: f64 = 1e-10;

/// 16×16 generator acting on column-vectorized 4×4 states, tagged with the
/// basis its matrix elements refer to.
#[derive(Debug, Clone)]
pub struct SuperOp {
    /// The generator, acting on `vec(ρ)` (column stacking).
    pub matrix: Mat16,
    /// Basis of the underlying 4×4 representation.
    pub basis: Basis,
}

impl SuperOp {
    /// Apply the generator to a 4×4 matrix: `unvec(L vec(m))`.
    pub fn apply(&self, m: &Mat4) -> Mat4 {
        unvec(&(self.matrix * vec_of(m)))
    }
}

/// Coherent part in the symmetrized basis:
/// `H = −√2 Ω (|e⟩⟨s| + |s⟩⟨e| + |s⟩⟨g| + |g⟩⟨s|)`.
pub fn hamiltonian_symmetrized(omega: f64) -> Mat4 {
    let g = C64::new(-(2.0f64).sqrt() * omega, 0.0);
    let mut h = Mat4::zeros();
    h[(0, 1)] = g;
    h[(1, 0)] = g;
    h[(1, 3)] = g;
    h[(3, 1)] = g;
    h
}

/// Decay (jump) operators in the symmetrized basis.
///
/// `Σ_s = |s⟩⟨e| + |g⟩⟨s|` and `Σ_a = −|a⟩⟨e| + |g⟩⟨a|`; together they
/// carry the same dissipator as the two single-atom lowering operators,
/// with `Σ_s†Σ_s + Σ_a†Σ_a = diag(2, 1, 1, 0)`.
pub fn jump_ops_symmetrized() -> [Mat4; 2] {
    let one = C64::new(1.0, 0.0);
    let mut sig_s = Mat4::zeros();
    sig_s[(1, 0)] = one;
    sig_s[(3, 1)] = one;
    let mut sig_a = Mat4::zeros();
    sig_a[(2, 0)] = -one;
    sig_a[(3, 2)] = one;
    [sig_s, sig_a]
}

/// Build a Lindblad generator from a Hamiltonian and jump operators, with
/// the dissipator `Σ_k (2 S_k ρ S_k† − S_k†S_k ρ − ρ S_k†S_k)` (single-atom
/// decay constant γ = 1; the excited-state population decays at 2γ).
pub fn liouvillian_from_parts(h: &Mat4, jumps: &[Mat4]) -> Mat16 {
    let id = Mat4::identity();
    let minus_i = C64::new(0.0, -1.0);
    let two = C64::new(2.0, 0.0);
    let mut l = (kron(&id, h) - kron(&h.transpose(), &id)) * minus_i;
    for s in jumps {
        let n = s.adjoint() * s;
        l += kron(&s.conjugate(), s) * two;
        l -= kron(&id, &n);
        l -= kron(&n.transpose(), &id);
    }
    l
}

/// Rotating-frame generator in the symmetrized basis (independent of φ).
pub fn assemble_liouvillian(params: &SystemParams) -> SuperOp {
    let h = hamiltonian_symmetrized(params.omega);
    SuperOp { matrix: liouvillian_from_parts(&h, &jump_ops_symmetrized()), basis: Basis::Symmetrized }
}

/// Rotating-frame generator in the product basis, with the explicit
/// per-atom drive phases `e^{∓iφ}` (midpoint gauge; orientation chosen so
/// the antisymmetric combination in the adapted basis is dark).
pub fn assemble_liouvillian_product(params: &SystemParams) -> SuperOp {
    let phi = params.phi();
    let ops = pauli_ops();
    let amp = C64::new(-params.omega, 0.0);
    let h = (ops.sigma_plus[0] * C64::from_polar(1.0, -phi)
        + ops.sigma_plus[1] * C64::from_polar(1.0, phi)
        + ops.sigma_minus[0] * C64::from_polar(1.0, phi)
        + ops.sigma_minus[1] * C64::from_polar(1.0, -phi))
        * amp;
    let jumps = [ops.sigma_minus[0], ops.sigma_minus[1]];
    SuperOp { matrix: liouvillian_from_parts(&h, &jumps), basis: Basis::Product }
}

/// The propagator `e^{Lt}` as a 16×16 matrix.
///
/// Exposed separately so grid evaluations can reuse one exponential for
/// many initial states.
pub fn propagator(l: &SuperOp, t: f64) -> Result<Mat16> {
    if t < 0.0 {
        return Err(Error::Domain(format!("propagation time must be ≥ 0, got {t}")));
    }
    Ok((l.matrix * C64::new(t, 0.0)).exp())
}

/// Evolve a state: `ρ(t) = e^{Lt} ρ₀`.
///
/// Uses the dense matrix exponential (accurate to ~1e-13 relative for the
/// norms occurring here, well inside the 1e-10 contract). The result is
/// re-Hermitized (pure round-off) and re-validated.
pub fn propagate(l: &SuperOp, rho0: &DensityMatrix4, t: f64) -> Result<DensityMatrix4> {
    rho0.require_basis(l.basis)?;
    if t == 0.0 {
        return Ok(*rho0);
    }
    let e = propagator(l, t)?;
    let out = unvec(&(e * vec_of(rho0.entries())));
    DensityMatrix4::from_matrix_hermitized(out, l.basis)
}

/// The four steady-state populations in the symmetrized basis.
///
/// These are the only steady-state components with a closed form here; the
/// steady coherences are obtained numerically via [`steady_state_numeric`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyPopulations {
    /// Ground `|g⟩⟨g|` population.
    pub rho_gg: f64,
    /// Symmetric one-excitation `|s⟩⟨s|` population.
    pub rho_ss: f64,
    /// Antisymmetric one-excitation `|a⟩⟨a|` population.
    pub rho_aa: f64,
    /// Doubly excited `|e⟩⟨e|` population.
    pub rho_ee: f64,
}

impl SteadyPopulations {
    /// `[ρ_ee, ρ_ss, ρ_aa, ρ_gg]` in basis order.
    pub fn as_basis_ordered(&self) -> [f64; 4] {
        [self.rho_ee, self.rho_ss, self.rho_aa, self.rho_gg]
    }
}

/// Closed-form steady-state populations:
///
/// ```text
/// ρ_gg = (γ²+Ω²)²   / (γ²+2 ²)²          (γ = 1)
/// ρ_ss = Ω²(2γ²+Ω²) / (γ²+2Ω²)²
/// ρ_aa = ρ_ee = Ω⁴  / (γ²+2Ω²)²
/// ```
///
/// Independent of the laser direction and the atom separation. Errors with
/// [`Error::DegenerateDrive`] at Ω = 0 (no fluorescence; downstream
/// correlation ratios undefined).
pub fn steady_state_closed_form(params: &SystemParams) -> Result<SteadyPopulations> {
    if params.omega <= 0.0 {
        return Err(Error::DegenerateDrive);
    }
    let w2 = params.omega * params.omega;
    let denom = (1.0 + 2.0 * w2) * (1.0 + 2.0 * w2);
    Ok(SteadyPopulations {
        rho_gg: (1.0 + w2) * (1.0 + w2) / denom,
        rho_ss: w2 * (2.0 + w2) / denom,
        rho_aa: w2 * w2 / denom,
        rho_ee: w2 * w2 / denom,
    })
}

/// Numeric steady state: solve `L ρ = 0, tr ρ = 1` as a bordered linear
/// system (the redundant row for `ρ_gg` is replaced by the trace
/// constraint), deterministically and without eigenvector phase ambiguity.
///
/// Checks that the kernel is one-dimensional (singular-value count below
/// [`KERNEL_TOL`]) and that `‖L vec(ρ)‖ <` [`STEADY_RESIDUAL_TOL`].
pub fn steady_state_numeric(l: &SuperOp) -> Result<DensityMatrix4> {
    let mut bordered = l.matrix;
    // vec index of (3,3) — the ρ_gg component, whose balance equation is
    // linearly dependent on the others by trace preservation.
    const REPLACED_ROW: usize = 15;
    for c in 0..16 {
        bordered[(REPLACED_ROW, c)] = C64::new(0.0, 0.0);
    }
    for i in 0..4 {
        bordered[(REPLACED_ROW, 5 * i)] = C64::new(1.0, 0.0);
    }
    let mut rhs = Vec16::zeros();
    rhs[REPLACED_ROW] = C64::new(1.0, 0.0);

    let v = match bordered.lu().solve(&rhs) {
        Some(v) => v,
        None => kernel_vector_by_svd(l)?,
    };

    // Kernel dimensionality: more than one near-zero singular value of the
    // unmodified generator means the bordered solve is not trustworthy.
    let svs = singular_values(l);
    let kernel_dim = svs.iter().filter(|s| **s < KERNEL_TOL).count();
    if kernel_dim != 1 {
        return Err(Error::SingularSteadyState(format!(
            "kernel dimension {kernel_dim}, smallest singular values {:?}",
            &svs[svs.len().saturating_sub(3)..]
        )));
    }

    let residual = (l.matrix * v).norm();
    if residual > STEADY_RESIDUAL_TOL {
        return Err(Error::SingularSteadyState(format!("residual ‖Lρ‖ = {residual:.3e}")));
    }
    DensityMatrix4::from_matrix_hermitized(unvec(&v), l.basis)
}

/// Fallback kernel extraction when the bordered matrix is singular:
/// smallest right singular vector, normalized to unit trace.
fn kernel_vector_by_svd(l: &SuperOp) -> Result<Vec16> {
    let d = DMatrix::<C64>::from_fn(16, 16, |r, c| l.matrix[(r, c)]);
    let svd = d.svd(false, true);
    let vt = svd.v_t.as_ref().ok_or_else(|| {
        Error::SingularSteadyState("SVD did not return right singular vectors".into())
    })?;
    // Singular values are sorted descending; the last right-singular vector
    // spans the (numerical) kernel.
    let row = vt.nrows() - 1;
    let mut v = Vec16::zeros();
    for c in 0..16 {
        v[c] = vt[(row, c)].conj();
    }
    let tr: C64 = (0..4).map(|i| v[5 * i]).sum();
    if tr.norm() < 1e-14 {
        return Err(Error::SingularSteadyState("kernel vector has zero trace".into()));
    }
    Ok(v / tr)
}

/// Singular values of the generator, ascending.
pub fn singular_values(l: &SuperOp) -> Vec<f64> {
    let d = DMatrix::<C64>::from_fn(16, 16, |r, c| l.matrix[(r, c)]);
    let mut svs: Vec<f64> = d.singular_values().iter().copied().collect();
    svs.sort_by(f64::total_cmp);
    svs
}

/// Full (complex, non-Hermitian) eigenvalue set of the generator.
///
/// Eigenvalues come in conjugate pairs (the generator maps Hermitian
/// matrices to Hermitian matrices) with exact degeneracies among decay
/// rates, so a solver with robust deflation is required; eigenvalues that
/// sit in nontrivial Jordan-like clusters may individually carry O(√ε)
/// error, which the spectral-gap assertions tolerate.
pub fn liouvillian_spectrum(l: &SuperOp) -> Result<Vec<C64>> {
    let m = faer::Mat::<faer::c64>::from_fn(16, 16, |r, c| {
        let v = l.matrix[(r, c)];
        faer::c64::new(v.re, v.im)
    });
    m.eigenvalues()
        .map_err(|e| Error::Domain(format!("eigenvalue iteration failed: {e:?}")))
}

/// The nine real coordinates that close under the dynamics when the state
/// is (and stays) in the physically reachable sector: three populations,
/// and the six coherence components that are purely imaginary
/// (`ρ_es, ρ_sg, ρ_sa`) or purely real (`ρ_eg, ρ_ea, ρ_ag`) there.
/// `ρ_gg` is implied by the trace.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ReducedState {
    /// Population of `|e⟩`.
    pub rho_ee: f64,
    /// Population of `|s⟩`.
    pub rho_ss: f64,
    /// Population of `|a⟩`.
    pub rho_aa: f64,
    /// `Im ρ_es`.
    pub rho_es_i: f64,
    /// `Im ρ_sg`.
    pub rho_sg_i: f64,
    /// `Re ρ_eg`.
    pub rho_eg_r: f64,
    /// `Re ρ_ea`.
    pub rho_ea_r: f64,
    /// `Im ρ_sa`.
    pub rho_sa_i: f64,
    /// `Re ρ_ag`.
    pub rho_ag_r: f64,
}

impl ReducedState {
    /// Ground-state population implied by the trace (states only; for a
    /// derivative the gg-component is `−(ρ̇_ee+ρ̇_ss+ρ̇_aa)` instead).
    pub fn rho_gg(&self) -> f64 {
        1.0 - self.rho_ee - self.rho_ss - self.rho_aa
    }

    /// Read the nine coordinates off a symmetrized-basis state.
    pub fn extract(rho: &DensityMatrix4) -> Result<Self> {
        rho.require_basis(Basis::Symmetrized)?;
        Ok(Self {
            rho_ee: rho.entry(0, 0).re,
            rho_ss: rho.entry(1, 1).re,
            rho_aa: rho.entry(2, 2).re,
            rho_es_i: rho.entry(0, 1).im,
            rho_sg_i: rho.entry(1, 3).im,
            rho_eg_r: rho.entry(0, 3).re,
            rho_ea_r: rho.entry(0, 2).re,
            rho_sa_i: rho.entry(1, 2).im,
            rho_ag_r: rho.entry(2, 3).re,
        })
    }

    /// Embed as a 4×4 matrix with `ρ_gg = 1 − (ρ_ee+ρ_ss+ρ_aa)` (a state).
    pub fn embed_state_matrix(&self) -> Mat4 {
        self.embed_with_gg(self.rho_gg())
    }

    /// Embed as a 4×4 matrix with `gg = −(ee+ss+aa)` (a tangent vector /
    /// time derivative, which is traceless).
    pub fn embed_tangent_matrix(&self) -> Mat4 {
        self.embed_with_gg(-(self.rho_ee + self.rho_ss + self.rho_aa))
    }

    fn embed_with_gg(&self, gg: f64) -> Mat4 {
        let re = |x: f64| C64::new(x, 0.0);
        let im = |x: f64| C64::new(0.0, x);
        let mut m = Mat4::zeros();
        m[(0, 0)] = re(self.rho_ee);
        m[(1, 1)] = re(self.rho_ss);
        m[(2, 2)] = re(self.rho_aa);
        m[(3, 3)] = re(gg);
        m[(0, 1)] = im(self.rho_es_i);
        m[(1, 0)] = -im(self.rho_es_i);
        m[(1, 3)] = im(self.rho_sg_i);
        m[(3, 1)] = -im(self.rho_sg_i);
        m[(0, 3)] = re(self.rho_eg_r);
        m[(3, 0)] = re(self.rho_eg_r);
        m[(0, 2)] = re(self.rho_ea_r);
        m[(2, 0)] = re(self.rho_ea_r);
        m[(1, 2)] = im(self.rho_sa_i);
        m[(2, 1)] = -im(self.rho_sa_i);
        m[(2, 3)] = re(self.rho_ag_r);
        m[(3, 2)] = re(self.rho_ag_r);
        m
    }

    /// Embed as a validated density matrix.
    pub fn to_density(&self) -> Result<DensityMatrix4> {
        DensityMatrix4::new(self.embed_state_matrix(), Basis::Symmetrized)
    }
}

/// Distance of a symmetrized-basis matrix from the reduced manifold
/// (the fixed-point set of `ρ ↦ D ρ̄ D†`, `D = diag(1,−1,1,1)`).
pub fn off_manifold_norm(m: &Mat4) -> f64 {
    let d = Mat4::from_diagonal(&crate::qcore::Vec4::from_iterator(
        [1.0, -1.0, 1.0, 1.0].into_iter().map(|x| C64::new(x, 0.0)),
    ));
    let mirrored = d * m.conjugate() * d.adjoint();
    ((m - mirrored) * C64::new(0.5, 0.0)).norm()
}

/// Time derivative of the reduced coordinates (time in `1/γ`,
/// `α = Ω/(√2 γ)`):
///
/// ```text
/// ρ̇_ee   = 4(α ρ_es^i − ρ_ee)
/// ρ̇_ss   = 2(ρ_ee − ρ_ss + 2α(ρ_sg^i − ρ_es^i))
/// ρ̇_aa   = 2(ρ_ee − ρ_aa)
/// ρ̇_es^i = −3ρ_es^i − 2α(ρ_ee − ρ_ss + ρ_eg^r)
/// ρ̇_sg^i = 2ρ_es^i − ρ_sg^i + 2α(1 − ρ_ee − ρ_aa − 2ρ_ss + ρ_eg^r)
/// ρ̇_eg^r = −2(ρ_eg^r + α(ρ_sg^i − ρ_es^i))
/// ρ̇_ea^r = −3ρ_ea^r − 2α ρ_sa^i
/// ρ̇_sa^i = 2(α(ρ_ea^r + ρ_ag^r) − ρ_sa^i)
/// ρ̇_ag^r = −2ρ_ea^r − 2α ρ_sa^i − ρ_ag^r
/// ```
///
/// The first six and last three equations do not couple to each other.
pub fn reduced_rhs(state: &ReducedState, alpha: f64) -> ReducedState {
    let s = state;
    ReducedState {
        rho_ee: 4.0 * (alpha * s.rho_es_i - s.rho_ee),
        rho_ss: 2.0 * (s.rho_ee - s.rho_ss + 2.0 * alpha * (s.rho_sg_i - s.rho_es_i)),
        rho_aa: 2.0 * (s.rho_ee - s.rho_aa),
        rho_es_i: -3.0 * s.rho_es_i - 2.0 * alpha * (s.rho_ee - s.rho_ss + s.rho_eg_r),
        rho_sg_i: 2.0 * s.rho_es_i - s.rho_sg_i
            + 2.0 * alpha * (1.0 - s.rho_ee - s.rho_aa - 2.0 * s.rho_ss + s.rho_eg_r),
        rho_eg_r: -2.0 * (s.rho_eg_r + alpha * (s.rho_sg_i - s.rho_es_i)),
        rho_ea_r: -3.0 * s.rho_ea_r - 2.0 * alpha * s.rho_sa_i,
        rho_sa_i: 2.0 * (alpha * (s.rho_ea_r + s.rho_ag_r) - s.rho_sa_i),
        rho_ag_r: -2.0 * s.rho_ea_r - 2.0 * alpha * s.rho_sa_i - s.rho_ag_r,
    }
}

/// `α = Ω/(√2 γ)` for a parameter set.
pub fn alpha(params: &SystemParams) -> f64 {
    params.omega / (2.0f64).sqrt()
}
