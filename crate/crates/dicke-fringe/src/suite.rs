//! The one-shot acceptance suite: ten numbered desk-scale checks covering
//! the steady state, the reduced equations of motion, the three correlation
//! methods, the classicality inequality, detection-conditioned states, and
//! the figure-level fringe features.
//!
//! Each criterion is an independent function returning a [`CriterionResult`]
//! with the measured numbers in its `details`, so a failure is directly
//! actionable. [`run_suite`] executes them in order; the `check` CLI command
//! prints one line per criterion and maps any failure to exit code 3.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::correlations::{
    classical_inequality_check, g1_visibility, g2_analytic, g2_numeric_grid,
};
use crate::detection::{reduce_on_detection, sa_coherence};
use crate::dynamics::{
    alpha, assemble_liouvillian, propagate, reduced_rhs, steady_state_closed_form,
    steady_state_numeric, ReducedState,
};
use crate::error::Result;
use crate::qcore::{Basis, C64, DensityMatrix4, Mat4, SystemParams, Vec4};
use crate::trajectories::{estimate_g2, simulate_trajectory_from, TauBins};

/// Verdict of a single acceptance criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    /// Criterion checked and satisfied.
    Pass,
    /// Criterion checked and not satisfied.
    Fail,
    /// Criterion not executed in this run (e.g. `--fast` skips Monte Carlo).
    Skip,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Outcome::Pass => write!(f, "PASS"),
            Outcome::Fail => write!(f, "FAIL"),
            Outcome::Skip => write!(f, "SKIP"),
        }
    }
}

/// Result of one acceptance criterion.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CriterionResult {
    /// Criterion number (1-based, stable).
    pub id: usize,
    /// Short human-readable name.
    pub name: &'static str,
    /// Pass/fail/skip verdict.
    pub outcome: Outcome,
    /// Measured values and required tolerances.
    pub details: String,
}

impl CriterionResult {
    /// Whether this criterion should gate a green suite (skips do not).
    pub fn acceptable(&self) -> bool {
        self.outcome != Outcome::Fail
    }
}

/// Suite-wide knobs.
#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    /// Skip the Monte Carlo criterion (it is the only slow one).
    pub fast: bool,
    /// Total simulated time for the Monte Carlo criterion (units of 1/γ).
    pub mc_budget: f64,
    /// Master seed for the Monte Carlo criterion.
    pub mc_seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { fast: false, mc_budget: 1e7, mc_seed: 7 }
    }
}

/// Run all ten criteria in order. With `fast` the Monte Carlo criterion is
/// listed as skipped rather than omitted.
pub fn run_suite(cfg: &SuiteConfig) -> Vec<CriterionResult> {
    let mut out = vec![
        criterion_01(),
        criterion_02(),
        criterion_03(),
        criterion_04(),
        criterion_05(),
        criterion_06(),
        criterion_07(),
        criterion_08(),
    ];
    out.push(if cfg.fast {
        CriterionResult {
            id: 9,
            name: NAME_09,
            outcome: Outcome::Skip,
            details: "Monte Carlo items skipped (fast mode)".into(),
        }
    } else {
        criterion_09(cfg.mc_budget, cfg.mc_seed)
    });
    out.push(criterion_10());
    out
}

/// `true` when no criterion failed (skips are acceptable).
pub fn all_acceptable(results: &[CriterionResult]) -> bool {
    results.iter().all(CriterionResult::acceptable)
}

fn verdict(id: usize, name: &'static str, body: impl FnOnce() -> Result<(bool, String)>) -> CriterionResult {
    match body() {
        Ok((pass, details)) => CriterionResult {
            id,
            name,
            outcome: if pass { Outcome::Pass } else { Outcome::Fail },
            details,
        },
        Err(e) => CriterionResult { id, name, outcome: Outcome::Fail, details: format!("error: {e}") },
    }
}

fn phi_zero(omega: f64) -> Result<SystemParams> {
    SystemParams::with_phi(omega, 0.0)
}

/// 1 — steady-state closed form vs the numeric kernel of the generator.
pub fn criterion_01() -> CriterionResult {
    verdict(1, "steady-state closed form vs numeric kernel", || {
        let mut worst = 0.0f64;
        for omega in [0.05, 0.2, 0.8, 1.0, 3.0, 10.0, 50.0] {
            let p = phi_zero(omega)?;
            let closed = steady_state_closed_form(&p)?.as_basis_ordered();
            let numeric = steady_state_numeric(&assemble_liouvillian(&p))?;
            for (i, c) in closed.iter().enumerate() {
                worst = worst.max((numeric.population(i) - c).abs());
            }
        }
        Ok((worst < 1e-10, format!("max |closed − kernel| = {worst:.3e} over 7 drives (< 1e-10 required)")))
    })
}

/// 2 — strong-field limit: all four populations equalize at 1/4.
pub fn criterion_02() -> CriterionResult {
    verdict(2, "strong-field population equalization", || {
        let pops = steady_state_closed_form(&phi_zero(1e3)?)?.as_basis_ordered();
        let worst = pops.iter().map(|p| (p - 0.25).abs()).fold(0.0, f64::max);
        Ok((worst < 1e-5, format!("max |ρ_ii − 1/4| = {worst:.3e} at Ω/γ = 10³ (< 1e-5 required)")))
    })
}

/// 3 — the nine reduced equations of motion embed back into the full
/// generator action on the invariant manifold.
pub fn criterion_03() -> CriterionResult {
    verdict(3, "reduced-equation embedding", || {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let omega = 0.1 + 4.9 * rng.random::<f64>();
            let p = phi_zero(omega)?;
            let rho = random_manifold_state(&mut rng);
            let full = assemble_liouvillian(&p).apply(rho.entries());
            let reduced = reduced_rhs(&ReducedState::extract(&rho)?, alpha(&p));
            let embedded = reduced.embed_tangent_matrix();
            let dev = (full - embedded).iter().map(|z| z.norm()).fold(0.0, f64::max);
            worst = worst.max(dev);
        }
        Ok((worst < 1e-10, format!("max entrywise |full − embedded| = {worst:.3e} on 100 manifold states (< 1e-10 required)")))
    })
}

/// 4 — closed-form vs regression-theorem g⁽²⁾ over the full grid, both
/// oscillatory and overdamped branches.
pub fn criterion_04() -> CriterionResult {
    verdict(4, "analytic vs regression correlation grid", || {
        let deltas: Vec<f64> = (0..21).map(|i| TAU * i as f64 / 21.0).collect();
        let taus: Vec<f64> = (0..13).map(|k| 6.0 * k as f64 / 12.0).collect();
        let mut worst = 0.0f64;
        for omega in [0.2, 0.8, 3.0] {
            let p = phi_zero(omega)?;
            let numeric = g2_numeric_grid(&p, &deltas, &deltas, &taus)?;
            for (i, &d1) in deltas.iter().enumerate() {
                for (j, &d2) in deltas.iter().enumerate() {
                    for (k, &tau) in taus.iter().enumerate() {
                        let a = g2_analytic(&p, d1, d2, tau)?;
                        worst = worst.max((a - numeric.value(i, j, k)).abs());
                    }
                }
            }
        }
        Ok((worst < 1e-7, format!("sup |analytic − regression| = {worst:.3e} over 21×21×13×3 (< 1e-7 required)")))
    })
}

/// 5 — zero-delay structure: opposed detectors are exactly dark; the
/// same-direction values at Ω/γ = 0.8 match the quoted constants by both
/// independent computations.
pub fn criterion_05() -> CriterionResult {
    verdict(5, "zero-delay correlation structure", || {
        let p = phi_zero(0.8)?;
        let mut rng = ChaCha8Rng::seed_from_u64(50);
        let mut worst_opposed = 0.0f64;
        for _ in 0..50 {
            let d = TAU * rng.random::<f64>();
            worst_opposed = worst_opposed.max(g2_analytic(&p, d, d + PI, 0.0)?);
        }
        let numeric = g2_numeric_grid(&p, &[0.0, PI], &[0.0, PI], &[0.0])?;
        let pairs = [
            ("g²(0,0,0)", g2_analytic(&p, 0.0, 0.0, 0.0)?, numeric.value(0, 0, 0), 0.4832),
            ("g²(π,π,0)", g2_analytic(&p, PI, PI, 0.0)?, numeric.value(1, 1, 0), 3.1729),
        ];
        let mut worst_const = 0.0f64;
        for (_, a, n, target) in pairs {
            worst_const = worst_const.max((a - target).abs()).max((n - target).abs());
        }
        let pass = worst_opposed < 1e-12 && worst_const <= 1e-4;
        Ok((pass, format!(
            "max g²(δ,δ+π,0) = {worst_opposed:.3e} over 50 random δ (< 1e-12 required); max deviation from 0.4832/3.1729 = {worst_const:.3e} across both methods (≤ 1e-4 required)"
        )))
    })
}

/// 6 — the classical intensity-correlation inequality is violated by
/// opposed detectors and never by a single detection direction.
pub fn criterion_06() -> CriterionResult {
    verdict(6, "classical inequality violation", || {
        let p = phi_zero(0.8)?;
        let opposed = classical_inequality_check(&p, 0.0, PI)?;
        let violated_ok = opposed.violated
            && (opposed.lhs + 1.123).abs() < 1e-3
            && (opposed.rhs - 1.0).abs() < 1e-12;
        let mut same_point_ok = true;
        for d in [0.0, 0.8, FRAC_PI_2, 2.2, PI] {
            if classical_inequality_check(&p, d, d)?.violated {
                same_point_ok = false;
            }
        }
        Ok((violated_ok && same_point_ok, format!(
            "opposed detectors: lhs = {:.6} < rhs = {:.6}, violated = {}; same-point scans report no violation: {}",
            opposed.lhs, opposed.rhs, opposed.violated, same_point_ok
        )))
    })
}

/// 7 — detection-conditioned coherence and entanglement at Ω = γ, φ = π/2:
/// the conditioned s–a coherence at aligned detection (δ = 0) is pinned at
/// 1/6, and a detection out of |e⟩ lands exactly on |s⟩.
pub fn criterion_07() -> CriterionResult {
    verdict(7, "detection-conditioned coherence and entanglement", || {
        let p = SystemParams::with_phi(1.0, FRAC_PI_2)?;
        let steady = steady_state_numeric(&assemble_liouvillian(&p))?;
        let im_sa = sa_coherence(&steady, 0.0)?;
        let coherence_ok = (im_sa - 1.0 / 6.0).abs() <= 1e-10;

        let mut e_ket = Vec4::zeros();
        e_ket[0] = C64::new(1.0, 0.0);
        let mut s_ket = Vec4::zeros();
        s_ket[1] = C64::new(1.0, 0.0);
        let conditioned = reduce_on_detection(&DensityMatrix4::pure(&e_ket, Basis::Symmetrized)?, 0.0)?;
        let fidelity = conditioned.fidelity_with_pure(&s_ket);
        let fidelity_ok = fidelity >= 1.0 - 1e-12;

        let coherence_note = if coherence_ok {
            String::new()
        } else {
            " — the direct reduction obeys Im ρ_sa(δ) = Ω² sin δ / (2(2Ω² + γ²(1 + cos δ))), which is 0 at δ = 0 and peaks at exactly 1/6 at δ = π/2; no detector alignment makes the δ = 0 value 1/6".into()
        };
        Ok((coherence_ok && fidelity_ok, format!(
            "Im ρ_sa(δ=0) = {im_sa:.6e} vs pinned 1/6 ± 1e-10{coherence_note}; detection out of |e⟩ lands on |s⟩ with fidelity deficit {:.2e} (≤ 1e-12 required)",
            1.0 - fidelity
        )))
    })
}

/// 8 — first-order fringe visibility: 1/3 at Ω = γ, washed out at strong
/// drive.
pub fn criterion_08() -> CriterionResult {
    verdict(8, "fringe visibility", || {
        let at_unit = g1_visibility(&phi_zero(1.0)?)?;
        let strong = g1_visibility(&phi_zero(1e3)?)?;
        let pass = (at_unit - 1.0 / 3.0).abs() <= 1e-10 && strong < 1e-5;
        Ok((pass, format!(
            "visibility(Ω=γ) = {at_unit:.12} (1/3 ± 1e-10 required); visibility(Ω=10³γ) = {strong:.3e} (< 1e-5 required)"
        )))
    })
}

const NAME_09: &str = "Monte Carlo consistency";

/// 9 — Monte Carlo estimates at the reference fringe points agree with the
/// closed form within 3σ, and the trajectory ensemble reproduces the
/// propagated state at t = 5 within 3σ elementwise.
///
/// The reference points are (δ₁, δ₂) ∈ {0, π}² at delays τ ∈ {0, 1}: six of
/// them carry a finite correlation checked at 3σ; the two opposed-detector
/// points at τ = 0 are exact zeros, checked as statistically zero counts.
pub fn criterion_09(mc_budget: f64, mc_seed: u64) -> CriterionResult {
    verdict(9, NAME_09, || {
        let p = phi_zero(0.8)?;
        // Bin width 0.05 with 21 bins puts bin centers at 0.025 and 1.025 —
        // the closed form is evaluated at the centers, so binning bias is
        // second order.
        let tau = TauBins::new(0.05, 21)?;
        let est = estimate_g2(&p, &[0.0, PI], &[0.0, PI], &tau, mc_budget, mc_seed)?;
        let mut worst_pull = 0.0f64;
        let mut fringe_ok = true;
        for (i, &d1) in [0.0, PI].iter().enumerate() {
            for (j, &d2) in [0.0, PI].iter().enumerate() {
                for k in [0usize, 20] {
                    let Some(bin) = est.bin(i, j, k) else {
                        return Ok((false, format!("window (δ₁={d1}, δ₂={d2}) collected no singles")));
                    };
                    let target = g2_analytic(&p, d1, d2, est.taus[k])?;
                    // The two exact zeros have σ dominated by the √max(C,1)
                    // floor; "within 3σ" there means statistically zero.
                    let pull = (bin.value - target).abs() / bin.stderr;
                    worst_pull = worst_pull.max(pull);
                    if pull > 3.0 {
                        fringe_ok = false;
                    }
                }
            }
        }

        let (ensemble_ok, worst_state_pull) = ensemble_matches_propagation(&p, 5.0, 2000, mc_seed)?;
        Ok((fringe_ok && ensemble_ok, format!(
            "worst fringe pull = {worst_pull:.2} σ over 8 reference points at budget {mc_budget:.1e} (≤ 3σ required); worst ensemble-state pull = {worst_state_pull:.2} σ over 2000 trajectories at t = 5 (≤ 3σ required)"
        )))
    })
}

/// 10 — figure-level fringe features at Ω/γ = 0.8: bunched maxima at odd
/// multiples of π, antibunched minima at even multiples, and the pair-scan
/// zeros exactly opposite the fixed detector.
pub fn criterion_10() -> CriterionResult {
    verdict(10, "figure-feature reproduction", || {
        let p = phi_zero(0.8)?;
        let n = 200usize;
        let deltas: Vec<f64> = (0..=n).map(|k| TAU * k as f64 / n as f64).collect();

        let single: Vec<f64> =
            deltas.iter().map(|&d| g2_analytic(&p, d, d, 0.0)).collect::<Result<_>>()?;
        let (argmax, max) = extremum(&single, f64::gt);
        let (argmin, min) = extremum(&single, f64::lt);
        let single_ok = argmax == n / 2 && max > 1.0 && (argmin == 0 || argmin == n) && min < 1.0;

        let scan = |d1: f64| -> Result<Vec<usize>> {
            let mut zeros = Vec::new();
            for (k, &d2) in deltas.iter().enumerate() {
                if g2_analytic(&p, d1, d2, 0.0)? < 1e-12 {
                    zeros.push(k);
                }
            }
            Ok(zeros)
        };
        let zeros_from_bright = scan(0.0)?;
        let zeros_from_dark = scan(PI)?;
        let pair_ok = zeros_from_bright == vec![n / 2] && zeros_from_dark == vec![0, n];

        Ok((single_ok && pair_ok, format!(
            "single-detector fringe: max {max:.4} at δ = {:.4} (π expected), min {min:.4} at δ = {:.4} (0 or 2π expected); δ₁ = 0 scan zeros at indices {zeros_from_bright:?} (π expected), δ₁ = π scan zeros at {zeros_from_dark:?} (0 and 2π expected)",
            deltas[argmax], deltas[argmin]
        )))
    })
}

/// Index and value of the extremum selected by `better` (first occurrence).
fn extremum(values: &[f64], better: fn(&f64, &f64) -> bool) -> (usize, f64) {
    let mut idx = 0;
    for (k, v) in values.iter().enumerate() {
        if better(v, &values[idx]) {
            idx = k;
        }
    }
    (idx, values[idx])
}

/// Average |ψ(t)⟩⟨ψ(t)| over `n` trajectories from |g⟩ and compare with the
/// propagated state elementwise at 3 empirical σ; returns the worst pull.
fn ensemble_matches_propagation(
    params: &SystemParams,
    t: f64,
    n: usize,
    seed: u64,
) -> Result<(bool, f64)> {
    let mut ground = Vec4::zeros();
    ground[3] = C64::new(1.0, 0.0);
    let finals: Vec<Mat4> = (0..n)
        .into_par_iter()
        .map(|k| {
            // Distinct RNG keys, offset away from the coincidence batch.
            let (_, psi) = simulate_trajectory_from(
                params,
                &ground,
                t,
                seed.wrapping_add(1_000_003).wrapping_add(k as u64),
            )?;
            Ok(psi * psi.adjoint())
        })
        .collect::<Result<_>>()?;
    let mean = finals.iter().fold(Mat4::zeros(), |acc, m| acc + m) * C64::new(1.0 / n as f64, 0.0);

    let rho0 = DensityMatrix4::pure(&ground, Basis::Symmetrized)?;
    let exact = propagate(&assemble_liouvillian(params), &rho0, t)?;
    let mut worst_pull = 0.0f64;
    for r in 0..4 {
        for c in 0..4 {
            let (mut var_re, mut var_im) = (0.0, 0.0);
            for m in &finals {
                var_re += (m[(r, c)].re - mean[(r, c)].re).powi(2);
                var_im += (m[(r, c)].im - mean[(r, c)].im).powi(2);
            }
            let scale = n as f64 * (n - 1) as f64;
            let se_re = (var_re / scale).sqrt() + 1e-9;
            let se_im = (var_im / scale).sqrt() + 1e-9;
            let diff = mean[(r, c)] - exact.entry(r, c);
            worst_pull = worst_pull.max(diff.re.abs() / se_re).max(diff.im.abs() / se_im);
        }
    }
    Ok((worst_pull <= 3.0, worst_pull))
}

/// Deterministic random state on the invariant manifold: a random mixture
/// of pure states averaged with its image under the antilinear symmetry
/// `ρ ↦ D ρ̄ D†`, `D = diag(1, −1, 1, 1)` (positivity-preserving, lands
/// exactly on the manifold).
fn random_manifold_state(rng: &mut ChaCha8Rng) -> DensityMatrix4 {
    let mut m = Mat4::zeros();
    let mut weights = [0.0f64; 4];
    let mut total = 0.0;
    for w in &mut weights {
        *w = rng.random::<f64>() + 1e-3;
        total += *w;
    }
    for w in &weights {
        let psi = Vec4::from_fn(|_, _| {
            C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
        });
        m += psi * psi.adjoint() * C64::new(w / total / psi.norm_squared(), 0.0);
    }
    let d = Mat4::from_diagonal(&Vec4::from_iterator(
        [1.0, -1.0, 1.0, 1.0].into_iter().map(|x| C64::new(x, 0.0)),
    ));
    let mirrored = d * m.conjugate() * d.adjoint();
    DensityMatrix4::from_matrix_hermitized((m + mirrored) * C64::new(0.5, 0.0), Basis::Symmetrized)
        .expect("symmetrized mixture is a valid state")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_suite_lists_all_ten_criteria() {
        let results = run_suite(&SuiteConfig { fast: true, ..SuiteConfig::default() });
        assert_eq!(results.len(), 10);
        assert_eq!(results[8].outcome, Outcome::Skip);
        for (k, r) in results.iter().enumerate() {
            assert_eq!(r.id, k + 1);
            assert!(!r.details.is_empty());
        }
    }

    #[test]
    fn desk_scale_criteria_pass_except_the_pinned_coherence() {
        // Criteria 1–6, 8, 10 must be green. Criterion 7 fails by
        // construction: it pins the δ = 0 conditioned coherence at 1/6,
        // while the reduction law Im ρ_sa ∝ sin δ makes it 0 there (the
        // entanglement clause of the same criterion does hold). That
        // failure is asserted explicitly in the acceptance tests.
        for result in [
            criterion_01(),
            criterion_02(),
            criterion_03(),
            criterion_04(),
            criterion_05(),
            criterion_06(),
            criterion_08(),
            criterion_10(),
        ] {
            assert_eq!(result.outcome, Outcome::Pass, "{}: {}", result.name, result.details);
        }
        let pinned = criterion_07();
        assert_eq!(pinned.outcome, Outcome::Fail, "{}", pinned.details);
        assert!(pinned.details.contains("Im ρ_sa"));
    }
}
