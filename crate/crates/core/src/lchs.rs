//! Gaussian-kernel linear combination of Hamiltonian simulations.
//!
//! The imaginary-time kernel `e^{−𝒜²t}` of a Hermitian generator dilation `𝒜`
//! never has to be synthesized directly: the Fourier identity
//!
//! > e^{−x²t} = ∫ f̂_t(k) · e^{−ikx} dk,  f̂_t(k) = e^{−k²/(4t)} / (2√(πt)),
//!
//! turns it into an integral over ordinary phases, and a truncated
//! Gauss-Legendre discretization of that integral into a *finite* combination
//!
//! > e^{−x²t} ≈ Σ_j c_j · e^{−i k_j x},  c_j = w_j · f̂_t(k_j) > 0,
//!
//! valid uniformly on the spectral range `x ∈ [−α_𝒜, α_𝒜]` of the generator.
//! Each term is one Hamiltonian-simulation primitive, so the cost of the
//! combination is governed by the node count `M_q` and the polynomial degrees
//! `D_j` needed to realize each phase `e^{−i k_j 𝒜}`.
//!
//! # Plan construction
//!
//! [`build_plan`] assembles a certified [`LchsPlan`] in three steps:
//!
//! 1. **Truncation window.**  [`truncation_wavenumber`] restricts the integral
//!    to `[−K, K]` with `K = max(2√t · 1.0000001, 2√(t·ln(4/(√π ε))))`; the
//!    discarded Gaussian tail is `erfc(K/(2√t)) ≤ ε/2`.
//! 2. **Quadrature.**  A single-panel Gauss-Legendre rule with
//!    `M_q ≥ (K α_𝒜 / 2 + ln(10/(ε√t))) / (2 ln(1+√2))` nodes discretizes the
//!    window; the silver-ratio constant comes from the Bernstein-ellipse
//!    convergence rate of Legendre quadrature for entire integrands.
//! 3. **Certification.**  The scalar surrogate `max_x |e^{−x²t} − Σ c_j
//!    e^{−i k_j x}|` is measured on a 10⁴-point grid over `[−α_𝒜, α_𝒜]`.  If
//!    it misses `ε` the node count doubles, up to four times, before the
//!    construction reports a hard error — the plan never ships uncertified.
//!
//! # Error allocation
//!
//! Downstream consumers realize each phase only approximately.  The plan
//! therefore carries per-node budgets `ε_j = min(0.1, ε/((M_q+1)·c_j))`, which
//! reproduce a total error `Σ_j c_j ε_j ≤ ε`, and matching polynomial degrees
//! `D_j` from the Jacobi-Anger tail rule at phase strength `|k_j|·α_𝒜`.  The
//! `0.1` cap keeps far-window nodes — whose coefficients vanish like
//! `e^{−k²/(4t)}` — from demanding astronomically loose (and useless) budgets.
//!
//! The combination weight `α_g = Σ_j c_j` stays within `1 + 10ε` of unity, so
//! amplitude overhead from the combination itself is negligible.
//!
//! [`apply_plan_exact`] evaluates the combination through an exact
//! eigendecomposition, which both validates a plan against the matrix kernel
//! `e^{−𝒜²t}` and serves as the reference backend for flux estimates.

use num_complex::Complex;
use num_traits::Zero;
use thiserror::Error;

use crate::linalg::{self, LinalgError};
use crate::scalar::Real;
use crate::special::{self, SpecialError};
use crate::CMatrix;

// ============================================================================
//                                   Errors
// ============================================================================

/// Failure modes of plan construction and application.
#[derive(Debug, Error)]
pub enum LchsError {
    /// Evolution time was zero, negative, or non-finite.
    #[error("evolution time must be positive and finite, got {0}")]
    InvalidTime(f64),
    /// Accuracy target outside the open interval `(0, 1)`.
    #[error("accuracy target must lie in (0, 1), got {0}")]
    InvalidTolerance(f64),
    /// Spectral-range bound `α_𝒜` was zero, negative, or non-finite.
    #[error("spectral-range bound must be positive and finite, got {0}")]
    InvalidNormBound(f64),
    /// Requested node count too small to carry a quadrature rule.
    #[error("node count must be at least 1, got {0}")]
    DegenerateNodeCount(usize),
    /// The scalar certificate still failed after the refinement budget.
    #[error(
        "quadrature certificate failed: error {achieved:.3e} > target {target:.3e} \
         at {m_q} nodes after {refinements} refinement(s)"
    )]
    CertificateFailed {
        /// Measured grid maximum of the surrogate error.
        achieved: f64,
        /// Requested accuracy `ε`.
        target: f64,
        /// Final node count reached by doubling.
        m_q: usize,
        /// Number of doublings performed.
        refinements: usize,
    },
    /// Operator handed to [`apply_plan_exact`] exceeds the plan's range bound.
    #[error("operator spectral norm {norm:.6e} exceeds the plan bound α_𝒜 = {alpha:.6e}")]
    NormViolation {
        /// Measured spectral norm of the operator.
        norm: f64,
        /// Bound `α_𝒜` the plan was built for.
        alpha: f64,
    },
    /// Quadrature-rule synthesis failed.
    #[error(transparent)]
    Special(#[from] SpecialError),
    /// Dense linear algebra failed.
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

// ============================================================================
//                             Truncation window
// ============================================================================

/// Truncation wavenumber `K` for the Gaussian kernel at time `t`, accuracy `ε`.
///
/// Restricting the Fourier integral to `[−K, K]` with
/// `K = max(2√t · 1.0000001, 2√(t · ln(4/(√π ε))))` discards a tail of mass
/// `erfc(K/(2√t)) ≤ ε/2`, uniformly in `x`.
///
/// ```
/// use fpflux_core::lchs::truncation_wavenumber;
/// let k = truncation_wavenumber(1.0, 1e-3).unwrap();
/// approx::assert_abs_diff_eq!(k, 5.557583898485862, epsilon = 1e-12);
/// // Scales as √t: quartering the time halves the window.
/// let k_quarter = truncation_wavenumber(0.25, 1e-3).unwrap();
/// approx::assert_abs_diff_eq!(k_quarter, 0.5 * k, epsilon = 1e-12);
/// ```
pub fn truncation_wavenumber<T: Real>(t: T, epsilon: T) -> Result<T, LchsError> {
    if !(t > T::zero()) || !t.is_finite() {
        return Err(LchsError::InvalidTime(t.as_f64()));
    }
    if !(epsilon > T::zero()) || !(epsilon < T::one()) {
        return Err(LchsError::InvalidTolerance(epsilon.as_f64()));
    }
    let sqrt_pi = T::of(std::f64::consts::PI).sqrt();
    let log_term = (T::of(4.0) / (sqrt_pi * epsilon)).ln();
    let principal = T::of(2.0) * (t * log_term).sqrt();
    let floor = T::of(2.0) * t.sqrt() * T::of(1.000_000_1);
    Ok(principal.max(floor))
}

// ============================================================================
//                             Plan construction
// ============================================================================

/// Certified quadrature plan for the Gaussian kernel `e^{−x²t}`.
///
/// Produced by [`build_plan`]; all fields are plain data so a plan can be
/// audited, serialized (see [`LchsPlan::to_text_record`]), and consumed by
/// both exact and circuit-level backends.
#[derive(Debug, Clone, PartialEq)]
pub struct LchsPlan<T> {
    /// Evolution time `t`.
    pub t: T,
    /// Accuracy target `ε` the certificate was checked against.
    pub epsilon: T,
    /// Spectral-range bound `α_𝒜` the plan covers.
    pub alpha_a: T,
    /// Truncation wavenumber `K`; all nodes lie in `[−K, K]`.
    pub k_trunc: T,
    /// Node count `M_q`.
    pub m_q: usize,
    /// Quadrature nodes `k_j`, ascending and symmetric about `0`.
    pub nodes: Vec<T>,
    /// Quadrature weights `w_j > 0`, symmetric under `k_j ↦ −k_j`.
    pub weights: Vec<T>,
    /// Combination coefficients `c_j = w_j · e^{−k_j²/(4t)} / (2√(πt)) > 0`.
    pub coefficients: Vec<T>,
    /// Combination weight `α_g = Σ_j c_j`.
    pub alpha_g: T,
    /// Per-node accuracy budgets `ε_j = min(0.1, ε/((M_q+1)·c_j))`.
    pub budgets: Vec<T>,
    /// Phase-polynomial degrees `D_j` from the Jacobi-Anger tail rule at
    /// strength `|k_j|·α_𝒜` and budget `ε_j`.
    pub degrees: Vec<usize>,
    /// Measured grid maximum of `|e^{−x²t} − Σ_j c_j e^{−i k_j x}|`.
    pub certified_error: T,
    /// Number of node-count doublings needed to pass the certificate.
    pub refinements: usize,
}

/// Number of sample points in the scalar certificate grid.
const CERTIFICATE_GRID: usize = 10_000;

/// Maximum number of node-count doublings before reporting failure.
const MAX_REFINEMENTS: usize = 4;

/// Cap on per-node budgets, so exponentially small coefficients do not demand
/// meaninglessly loose phase accuracy.
const BUDGET_CAP: f64 = 0.1;

impl<T: Real> LchsPlan<T> {
    /// Combination value `Σ_j c_j e^{−i k_j x}` at a scalar spectral point.
    pub fn evaluate_scalar(&self, x: T) -> Complex<T> {
        let mut acc: Complex<T> = Complex::zero();
        for (&c, &k) in self.coefficients.iter().zip(&self.nodes) {
            let phase = k * x;
            acc = acc + Complex::new(c * phase.cos(), -(c * phase.sin()));
        }
        acc
    }

    /// Grid maximum of `|e^{−x²t} − Σ_j c_j e^{−i k_j x}|` over `[−α_𝒜, α_𝒜]`.
    ///
    /// This is the quantity stored in [`LchsPlan::certified_error`]; it is
    /// re-evaluated from scratch so audits do not have to trust the stored
    /// value.
    pub fn certificate_error(&self) -> T {
        let denom = T::of((CERTIFICATE_GRID - 1) as f64);
        let mut worst = T::zero();
        for i in 0..CERTIFICATE_GRID {
            let frac = T::of(i as f64) / denom;
            let x = self.alpha_a * (T::of(2.0) * frac - T::one());
            let target = (-(x * x) * self.t).exp();
            let got = self.evaluate_scalar(x);
            let err = (Complex::new(got.re - target, got.im)).norm_sqr().sqrt();
            worst = worst.max(err);
        }
        worst
    }

    /// Largest phase-polynomial degree across nodes.
    ///
    /// One shared Chebyshev iterate of this depth serves every node, so this
    /// is the multiplexed query count per evaluation context.
    pub fn max_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    /// Sum of all per-node degrees — the query count of the naive,
    /// one-simulation-per-node schedule the multiplexed iterate replaces.
    pub fn degree_sum(&self) -> usize {
        self.degrees.iter().sum()
    }

    /// Structured text record of the plan for audit trails.
    ///
    /// One header line with the scalar summary, one column-name line, then one
    /// line per node carrying `k_j`, `w_j`, `c_j`, `D_j`, `ε_j` in full
    /// precision.
    pub fn to_text_record(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        writeln!(
            out,
            "lchs-plan t={:.17e} epsilon={:.3e} alpha-a={:.9e} k-trunc={:.17e} \
             m-q={} alpha-g={:.17e} certified-error={:.6e} refinements={}",
            self.t.as_f64(),
            self.epsilon.as_f64(),
            self.alpha_a.as_f64(),
            self.k_trunc.as_f64(),
            self.m_q,
            self.alpha_g.as_f64(),
            self.certified_error.as_f64(),
            self.refinements,
        )
        .expect("string writes cannot fail");
        writeln!(out, "node weight coefficient degree budget").expect("string writes cannot fail");
        for j in 0..self.m_q {
            writeln!(
                out,
                "{:+.17e} {:.17e} {:.17e} {} {:.9e}",
                self.nodes[j].as_f64(),
                self.weights[j].as_f64(),
                self.coefficients[j].as_f64(),
                self.degrees[j],
                self.budgets[j].as_f64(),
            )
            .expect("string writes cannot fail");
        }
        out
    }
}

/// Assemble the plan data for a fixed node count and measure its certificate.
fn assemble_plan<T: Real>(
    t: T,
    epsilon: T,
    alpha_a: T,
    m_q: usize,
    refinements: usize,
) -> Result<LchsPlan<T>, LchsError> {
    let k_trunc = truncation_wavenumber(t, epsilon)?;
    if m_q == 0 {
        return Err(LchsError::DegenerateNodeCount(m_q));
    }
    let (ref_nodes, ref_weights) = special::gauss_legendre::<T>(m_q)?;
    let nodes: Vec<T> = ref_nodes.iter().map(|&x| k_trunc * x).collect();
    let weights: Vec<T> = ref_weights.iter().map(|&w| k_trunc * w).collect();
    let prefactor = (T::of(2.0) * (T::of(std::f64::consts::PI) * t).sqrt()).recip();
    let four_t = T::of(4.0) * t;
    let coefficients: Vec<T> = nodes
        .iter()
        .zip(&weights)
        .map(|(&k, &w)| w * (-(k * k) / four_t).exp() * prefactor)
        .collect();
    let alpha_g = coefficients.iter().fold(T::zero(), |acc, &c| acc + c);

    let share = epsilon / T::of((m_q + 1) as f64);
    let budgets: Vec<T> = coefficients
        .iter()
        .map(|&c| {
            let raw = share / c;
            if raw.is_finite() {
                raw.min(T::of(BUDGET_CAP))
            } else {
                T::of(BUDGET_CAP)
            }
        })
        .collect();
    let degrees: Vec<usize> = nodes
        .iter()
        .zip(&budgets)
        .map(|(&k, &b)| special::jacobi_anger_degree(k * alpha_a, b))
        .collect();

    let mut plan = LchsPlan {
        t,
        epsilon,
        alpha_a,
        k_trunc,
        m_q,
        nodes,
        weights,
        coefficients,
        alpha_g,
        budgets,
        degrees,
        certified_error: T::infinity(),
        refinements,
    };
    plan.certified_error = plan.certificate_error();
    Ok(plan)
}

/// Validate the spectral-range bound shared by the plan constructors.
fn check_alpha<T: Real>(alpha_a: T) -> Result<(), LchsError> {
    if !(alpha_a > T::zero()) || !alpha_a.is_finite() {
        return Err(LchsError::InvalidNormBound(alpha_a.as_f64()));
    }
    Ok(())
}

/// Build a certified plan for `e^{−x²t}` on the range `|x| ≤ α_𝒜`.
///
/// Starts from the analytic node-count bound
/// `M_q ≥ (K α_𝒜 / 2 + ln(10/(ε√t))) / (2 ln(1+√2))`, measures the scalar
/// certificate on a 10⁴-point grid, and doubles the node count (at most four
/// times) until the certificate passes; a plan that still misses `ε` is a hard
/// error, never a silent degradation.
///
/// ```
/// use fpflux_core::lchs::build_plan;
/// let plan = build_plan(1.0, 1e-6, 1.0).unwrap();
/// assert!(plan.certified_error <= 1e-6);
/// // The combination weight is unity up to the accuracy target.
/// assert!(plan.alpha_g >= 1.0 - 1e-6 && plan.alpha_g <= 1.0 + 1e-5);
/// ```
pub fn build_plan<T: Real>(t: T, epsilon: T, alpha_a: T) -> Result<LchsPlan<T>, LchsError> {
    check_alpha(alpha_a)?;
    let k_trunc = truncation_wavenumber(t, epsilon)?;
    let silver = (1.0 + 2.0_f64.sqrt()).ln();
    let kf = k_trunc.as_f64();
    let bound = (kf * alpha_a.as_f64() / 2.0
        + (10.0 / (epsilon.as_f64() * t.as_f64().sqrt())).ln())
        / (2.0 * silver);
    let mut m_q = bound.ceil().max(2.0) as usize;
    let mut last = None;
    for refinements in 0..=MAX_REFINEMENTS {
        let plan = assemble_plan(t, epsilon, alpha_a, m_q, refinements)?;
        if plan.certified_error <= epsilon {
            return Ok(plan);
        }
        last = Some((plan.certified_error.as_f64(), m_q, refinements));
        m_q *= 2;
    }
    let (achieved, m_q, refinements) = last.expect("refinement loop ran at least once");
    Err(LchsError::CertificateFailed {
        achieved,
        target: epsilon.as_f64(),
        m_q,
        refinements,
    })
}

/// Build a plan with an explicitly chosen node count, skipping refinement.
///
/// The certificate is still measured and stored — the caller decides whether
/// [`LchsPlan::certified_error`] is acceptable.  Useful for node-count
/// studies:
///
/// ```
/// use fpflux_core::lchs::plan_with_node_count;
/// // Fourteen nodes resolve the t = 1 window at 1e−3; seven do not.
/// let coarse = plan_with_node_count(1.0, 1e-3, 1.0, 7).unwrap();
/// let fine = plan_with_node_count(1.0, 1e-3, 1.0, 14).unwrap();
/// assert!(coarse.certified_error > 1e-3);
/// assert!(fine.certified_error <= 1e-3);
/// ```
pub fn plan_with_node_count<T: Real>(
    t: T,
    epsilon: T,
    alpha_a: T,
    m_q: usize,
) -> Result<LchsPlan<T>, LchsError> {
    check_alpha(alpha_a)?;
    assemble_plan(t, epsilon, alpha_a, m_q, 0)
}

// ============================================================================
//                             Exact application
// ============================================================================

/// Evaluate the plan's combination `Σ_j c_j e^{−i k_j 𝒜}` exactly.
///
/// The generator must be Hermitian with spectral norm within the plan's bound
/// `α_𝒜` — a violation is an input error, since the certificate only covers
/// the spectral range the plan was built for.  One eigendecomposition serves
/// every node; by the certificate the result is within `ε` of the matrix
/// kernel `e^{−𝒜²t}` in the spectral norm.
///
/// ```
/// use fpflux_core::lchs::{apply_plan_exact, build_plan};
/// use fpflux_core::CMat;
/// use num_complex::Complex;
///
/// let plan = build_plan(1.0, 1e-3, 1.0).unwrap();
/// // 𝒜 = [[0, 1], [1, 0]] squares to the identity, so e^{−𝒜²t} = e^{−t}·I.
/// let a = CMat::from_shape_vec((2, 2), vec![
///     Complex::new(0.0, 0.0), Complex::new(1.0, 0.0),
///     Complex::new(1.0, 0.0), Complex::new(0.0, 0.0),
/// ]).unwrap();
/// let out = apply_plan_exact(&plan, &a).unwrap();
/// let want = (-1.0_f64).exp();
/// approx::assert_abs_diff_eq!(out[[0, 0]].re, want, epsilon = 1e-3);
/// approx::assert_abs_diff_eq!(out[[0, 1]].re, 0.0, epsilon = 1e-3);
/// ```
pub fn apply_plan_exact<T: Real>(
    plan: &LchsPlan<T>,
    generator: &CMatrix<T>,
) -> Result<CMatrix<T>, LchsError> {
    let (vals, vecs) = linalg::hermitian_eig(generator)?;
    let norm = vals.iter().fold(T::zero(), |acc, &v| acc.max(v.abs()));
    if norm > plan.alpha_a * T::of(1.0 + 1e-9) {
        return Err(LchsError::NormViolation {
            norm: norm.as_f64(),
            alpha: plan.alpha_a.as_f64(),
        });
    }
    Ok(linalg::spectral_matrix(&vals, &vecs, |lambda| {
        plan.evaluate_scalar(lambda)
    }))
}

/// Eigenvalues of the generator reused across plan applications.
///
/// Convenience for flux scans that apply several plans (different times `t`)
/// to one generator: eigendecompose once with [`linalg::hermitian_eig`], then
/// evaluate each plan through [`linalg::spectral_matrix`] or
/// [`linalg::spectral_apply`] with the closure this function returns.
pub fn plan_spectral_fn<T: Real>(plan: &LchsPlan<T>) -> impl Fn(T) -> Complex<T> + '_ {
    move |lambda| plan.evaluate_scalar(lambda)
}

// ============================================================================
//                                    Tests
// ============================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::{self, Basis};
    use crate::linalg::{hermitian_eig, hermitian_matfun_c, op_norm_2, spectral_apply};
    use crate::potentials::Potential;
    use crate::{CMat, CVec};
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // ------------------------------------------------------------------
    // Truncation window
    // ------------------------------------------------------------------

    #[test]
    fn truncation_window_matches_frozen_values() {
        // Closed form evaluated independently at high precision.
        let k = truncation_wavenumber(1.0_f64, 1e-3).unwrap();
        assert_abs_diff_eq!(k, 5.557583898485862, epsilon = 1e-12);
        let k = truncation_wavenumber(1.0_f64, 1e-6).unwrap();
        assert_abs_diff_eq!(k, 7.649690183572003, epsilon = 1e-12);
        let k = truncation_wavenumber(0.25_f64, 1e-3).unwrap();
        assert_abs_diff_eq!(k, 2.778791949242931, epsilon = 1e-12);
    }

    #[test]
    fn truncation_window_scales_as_sqrt_t() {
        for &eps in &[1e-2_f64, 1e-4, 1e-8] {
            let base = truncation_wavenumber(1.0_f64, eps).unwrap();
            for &t in &[0.25_f64, 4.0, 64.0] {
                let k = truncation_wavenumber(t, eps).unwrap();
                assert_abs_diff_eq!(k / base, t.sqrt(), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn truncation_tail_mass_is_within_half_budget() {
        // The discarded tail ∫_{|k|>K} f̂_t dk = erfc(K/(2√t)) must sit under
        // ε/2 so quadrature can spend the other half.
        for &t in &[0.1_f64, 1.0, 10.0, 100.0] {
            for &eps in &[1e-2_f64, 1e-3, 1e-6, 1e-8] {
                let k = truncation_wavenumber(t, eps).unwrap();
                let tail = special::erfc(k / (2.0 * t.sqrt()));
                assert!(
                    tail <= 0.5 * eps,
                    "tail {tail:.3e} exceeds ε/2 at t={t}, ε={eps}"
                );
            }
        }
    }

    #[test]
    fn truncation_rejects_bad_inputs() {
        assert!(matches!(
            truncation_wavenumber(0.0_f64, 1e-3),
            Err(LchsError::InvalidTime(_))
        ));
        assert!(matches!(
            truncation_wavenumber(-1.0_f64, 1e-3),
            Err(LchsError::InvalidTime(_))
        ));
        assert!(matches!(
            truncation_wavenumber(1.0_f64, 0.0),
            Err(LchsError::InvalidTolerance(_))
        ));
        assert!(matches!(
            truncation_wavenumber(1.0_f64, 1.0),
            Err(LchsError::InvalidTolerance(_))
        ));
        assert!(matches!(
            truncation_wavenumber(1.0_f64, 1.5),
            Err(LchsError::InvalidTolerance(_))
        ));
    }

    // ------------------------------------------------------------------
    // Plan construction and certification
    // ------------------------------------------------------------------

    #[test]
    fn plans_certify_across_parameter_sweep() {
        for &t in &[0.1_f64, 1.0, 10.0] {
            for &eps in &[1e-3_f64, 1e-6] {
                for &alpha in &[1.0_f64, 5.0] {
                    let plan = build_plan(t, eps, alpha).unwrap();
                    assert!(
                        plan.certified_error <= eps,
                        "certificate {:.3e} > ε {:.0e} at t={t}, α={alpha}",
                        plan.certified_error,
                        eps
                    );
                    assert!(
                        plan.alpha_g <= 1.0 + 10.0 * eps,
                        "α_g {:.9} too large at t={t}, ε={eps}, α={alpha}",
                        plan.alpha_g
                    );
                    // The analytic bound is loose (its ellipse constants drop
                    // the Gaussian factor's growth), so one doubling is the
                    // expected cost of certification — never more.
                    assert!(
                        plan.refinements <= 1,
                        "unexpectedly deep refinement at t={t}, ε={eps}, α={alpha}"
                    );
                }
            }
        }
    }

    #[test]
    fn combination_weight_stays_near_unity() {
        for &t in &[0.1_f64, 1.0, 10.0, 100.0] {
            for &eps in &[1e-2_f64, 1e-4, 1e-6, 1e-8] {
                let plan = build_plan(t, eps, 1.0).unwrap();
                assert!(plan.alpha_g <= 1.0 + 10.0 * eps, "t={t}, ε={eps}");
                assert!(plan.alpha_g >= 1.0 - 10.0 * eps, "t={t}, ε={eps}");
                assert!(plan.coefficients.iter().all(|&c| c > 0.0));
            }
        }
    }

    #[test]
    fn nodes_and_weights_are_symmetric() {
        let plan = build_plan(2.0_f64, 1e-6, 3.0).unwrap();
        let m = plan.m_q;
        for j in 0..m {
            assert_abs_diff_eq!(plan.nodes[j], -plan.nodes[m - 1 - j], epsilon = 1e-13);
            assert_abs_diff_eq!(
                plan.weights[j],
                plan.weights[m - 1 - j],
                epsilon = 1e-13 * plan.k_trunc
            );
            assert!(plan.weights[j] > 0.0);
            assert!(plan.nodes[j].abs() <= plan.k_trunc);
        }
    }

    #[test]
    fn two_point_rule_is_scaled_gauss_legendre() {
        // Underlying rule on [−1, 1]: nodes ±1/√3, weights 1; the plan scales
        // both by K.
        let plan = plan_with_node_count(1e-6_f64, 1e-3, 1.0, 2).unwrap();
        let k = plan.k_trunc;
        assert_abs_diff_eq!(plan.nodes[0], -k * 0.57735026918962576, epsilon = 1e-15);
        assert_abs_diff_eq!(plan.nodes[1], k * 0.57735026918962576, epsilon = 1e-15);
        assert_abs_diff_eq!(plan.weights[0], k, epsilon = 1e-15);
        assert_abs_diff_eq!(plan.weights[1], k, epsilon = 1e-15);
        // Two nodes can never certify, at any t: in scaled coordinates the
        // integrand is e^{−L·u²} with L = ln(4/(√π ε)) independent of t, and
        // the two-point rule captures only α_g ≈ 0.24 of its mass.  The grid
        // certificate reports that honestly.
        assert!(plan.certified_error > 0.5);
    }

    #[test]
    fn near_identity_regime_certifies_cheaply() {
        // t → 0: e^{−x²t} ≈ 1.  The kernel is easy, but node economy comes
        // from the analytic bound (which certifies immediately, without
        // refinement), not from a token two-point rule.
        let plan = build_plan(1e-6_f64, 1e-3, 1.0).unwrap();
        assert!(plan.certified_error <= 1e-3);
        assert_eq!(plan.refinements, 0);
        assert!(plan.m_q <= 12, "near-identity plan used {} nodes", plan.m_q);
    }

    #[test]
    fn budget_allocation_reproduces_total_error() {
        for &(t, eps) in &[(0.1_f64, 1e-3_f64), (1.0, 1e-6), (10.0, 1e-6)] {
            let plan = build_plan(t, eps, 1.0).unwrap();
            let total: f64 = plan
                .coefficients
                .iter()
                .zip(&plan.budgets)
                .map(|(&c, &b)| c * b)
                .sum();
            assert!(total <= eps, "Σ c_j ε_j = {total:.3e} > ε = {eps:.0e} at t={t}");
            for &b in &plan.budgets {
                assert!(b > 0.0 && b <= BUDGET_CAP + 1e-15);
            }
        }
    }

    #[test]
    fn far_window_budgets_hit_the_cap() {
        // At t = 10 the edge nodes sit at k ≈ K ≈ 24 where the Gaussian weight
        // e^{−k²/40} ≈ 5e−7 collapses the coefficient; the uncapped budget
        // would explode, so the cap must engage.
        let plan = build_plan(10.0_f64, 1e-6, 1.0).unwrap();
        assert_abs_diff_eq!(plan.budgets[0], BUDGET_CAP, epsilon = 0.0);
        assert_abs_diff_eq!(plan.budgets[plan.m_q - 1], BUDGET_CAP, epsilon = 0.0);
        // Central nodes carry real weight, so their budgets stay strict.
        assert!(plan.budgets[plan.m_q / 2] < BUDGET_CAP);
    }

    #[test]
    fn degrees_certify_their_jacobi_anger_tails() {
        let plan = build_plan(1.0_f64, 1e-6, 2.0).unwrap();
        for j in 0..plan.m_q {
            let strength = (plan.nodes[j] * plan.alpha_a).abs();
            let values = special::bessel_j_upto::<f64>(plan.degrees[j] + 300, strength);
            let tail: f64 = values[plan.degrees[j] + 1..]
                .iter()
                .map(|v| 2.0 * v.abs())
                .sum();
            assert!(
                tail <= plan.budgets[j],
                "node {j}: tail {tail:.3e} > budget {:.3e}",
                plan.budgets[j]
            );
        }
        // The budget cap relieves the window edge, so the deepest polynomial
        // sits at an interior node where the coefficient still carries weight;
        // the multiplexed/naive gap is what downstream scheduling exploits.
        assert_eq!(plan.max_degree(), plan.degrees.iter().copied().max().unwrap());
        assert!(plan.degree_sum() > plan.max_degree());
    }

    #[test]
    fn node_count_grows_as_sqrt_t() {
        // Power-law-plus-offset fit M(t) = a·t^p + b; the offset absorbs the
        // ln(1/ε√t) term so p isolates the quadrature-window scaling.
        let times = [0.5_f64, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0];
        let counts: Vec<f64> = times
            .iter()
            .map(|&t| build_plan(t, 1e-6, 5.0).unwrap().m_q as f64)
            .collect();
        let mut best = (f64::INFINITY, 0.0);
        let mut p = 0.30_f64;
        while p <= 0.70 {
            // Least squares in (a, b) for fixed p.
            let u: Vec<f64> = times.iter().map(|&t| t.powf(p)).collect();
            let n = u.len() as f64;
            let su: f64 = u.iter().sum();
            let suu: f64 = u.iter().map(|x| x * x).sum();
            let sm: f64 = counts.iter().sum();
            let sum_um: f64 = u.iter().zip(&counts).map(|(x, m)| x * m).sum();
            let det = n * suu - su * su;
            let a = (n * sum_um - su * sm) / det;
            let b = (sm * suu - su * sum_um) / det;
            let resid: f64 = u
                .iter()
                .zip(&counts)
                .map(|(x, m)| (a * x + b - m).powi(2))
                .sum();
            if resid < best.0 {
                best = (resid, p);
            }
            p += 0.002;
        }
        assert!(
            (best.1 - 0.5).abs() <= 0.05,
            "fitted node-count exponent {:.3} outside 0.5 ± 0.05",
            best.1
        );
    }

    #[test]
    fn quadrature_and_truncation_certificates_split_the_budget() {
        // Reference value of the truncated integral by adaptive quadrature:
        // T(x) = 2·∫_0^K f̂_t(k)·cos(kx) dk.
        let (t, eps) = (1.0_f64, 1e-3_f64);
        let plan = build_plan(t, eps, 1.0).unwrap();
        let prefactor = 1.0 / (2.0 * (std::f64::consts::PI * t).sqrt());
        for i in 0..=50 {
            let x = -1.0 + 2.0 * (i as f64) / 50.0;
            let truncated = 2.0
                * special::integrate(
                    |k: f64| prefactor * (-k * k / (4.0 * t)).exp() * (k * x).cos(),
                    0.0,
                    plan.k_trunc,
                    1e-12,
                )
                .unwrap();
            // Truncation leg: losing the tail costs at most ε/2.
            let trunc_err = (truncated - (-x * x * t).exp()).abs();
            assert!(trunc_err <= 0.5 * eps, "truncation {trunc_err:.3e} at x={x}");
            // Quadrature leg: the discrete rule tracks the truncated integral
            // to the other ε/2.
            let s = plan.evaluate_scalar(x);
            let quad_err = ((s.re - truncated).powi(2) + s.im.powi(2)).sqrt();
            assert!(quad_err <= 0.5 * eps, "quadrature {quad_err:.3e} at x={x}");
        }
    }

    #[test]
    fn underresolved_rules_report_their_error() {
        // One node cannot represent a sharp Gaussian; the stored certificate
        // must say so rather than degrade silently.
        let plan = plan_with_node_count(10.0_f64, 1e-6, 5.0, 1).unwrap();
        assert!(plan.certified_error > 1e-6);
        assert!(matches!(
            plan_with_node_count(10.0_f64, 1e-6, 5.0, 0),
            Err(LchsError::DegenerateNodeCount(0))
        ));
    }

    #[test]
    fn plan_rejects_bad_norm_bound() {
        assert!(matches!(
            build_plan(1.0_f64, 1e-3, 0.0),
            Err(LchsError::InvalidNormBound(_))
        ));
        assert!(matches!(
            build_plan(1.0_f64, 1e-3, -2.0),
            Err(LchsError::InvalidNormBound(_))
        ));
    }

    #[test]
    fn text_record_lists_every_node() {
        let plan = build_plan(0.5_f64, 1e-3, 1.0).unwrap();
        let record = plan.to_text_record();
        assert!(record.starts_with("lchs-plan t="));
        assert!(record.contains("alpha-g="));
        assert_eq!(record.lines().count(), 2 + plan.m_q);
        let data_line = record.lines().nth(2).unwrap();
        assert_eq!(data_line.split_whitespace().count(), 5);
    }

    #[test]
    fn single_precision_plan_certifies() {
        let plan = build_plan(0.5_f32, 1e-3_f32, 1.0_f32).unwrap();
        assert!(plan.certified_error <= 1e-3);
        assert!((plan.alpha_g - 1.0).abs() <= 1e-2);
    }

    // ------------------------------------------------------------------
    // Exact application
    // ------------------------------------------------------------------

    #[test]
    fn apply_on_zero_generator_returns_combination_weight() {
        let plan = build_plan(1.0_f64, 1e-3, 1.0).unwrap();
        let a = CMat::zeros((1, 1));
        let out = apply_plan_exact(&plan, &a).unwrap();
        // e^{−0²·t} = 1, so the entry is α_g and must sit within ε of 1.
        assert_abs_diff_eq!(out[[0, 0]].re, plan.alpha_g, epsilon = 1e-15);
        assert!((out[[0, 0]].re - 1.0).abs() <= 1e-3);
        assert_abs_diff_eq!(out[[0, 0]].im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn apply_matches_kernel_on_involution() {
        // 𝒜² = I, so the kernel is e^{−t}·I exactly.
        let a = CMat::from_shape_vec(
            (2, 2),
            vec![
                Complex::new(0.0, 0.0),
                Complex::new(1.0, 0.0),
                Complex::new(1.0, 0.0),
                Complex::new(0.0, 0.0),
            ],
        )
        .unwrap();
        for &eps in &[1e-3_f64, 1e-6] {
            let plan = build_plan(1.0, eps, 1.0).unwrap();
            let out = apply_plan_exact(&plan, &a).unwrap();
            let want = (-1.0_f64).exp();
            for i in 0..2 {
                for j in 0..2 {
                    let target = if i == j { want } else { 0.0 };
                    assert!((out[[i, j]].re - target).abs() <= eps);
                    assert!(out[[i, j]].im.abs() <= eps);
                }
            }
        }
    }

    #[test]
    fn apply_matches_kernel_on_random_generators() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x1c85);
        let (t, eps, alpha) = (0.7_f64, 1e-8_f64, 2.0_f64);
        let plan = build_plan(t, eps, alpha).unwrap();
        for _ in 0..5 {
            let n = 6;
            let mut a = Array2::zeros((n, n));
            for i in 0..n {
                for j in 0..n {
                    a[[i, j]] = Complex::new(
                        rng.random::<f64>() - 0.5,
                        rng.random::<f64>() - 0.5,
                    );
                }
            }
            let herm = (&a + &crate::linalg::adjoint(&a)).mapv(|z| z * 0.5);
            let norm = crate::linalg::op_norm_hermitian(&herm).unwrap();
            let scaled = herm.mapv(|z| z * (alpha * 0.9 / norm));
            let out = apply_plan_exact(&plan, &scaled).unwrap();
            let kernel = hermitian_matfun_c(&scaled, |lambda| {
                Complex::new((-lambda * lambda * t).exp(), 0.0)
            })
            .unwrap();
            let defect = op_norm_2(&(&out - &kernel)).unwrap();
            assert!(defect <= eps, "kernel defect {defect:.3e} > ε");
        }
    }

    #[test]
    fn apply_rejects_out_of_range_generator() {
        let plan = build_plan(1.0_f64, 1e-3, 1.0).unwrap();
        let a = CMat::from_shape_vec((1, 1), vec![Complex::new(2.0, 0.0)]).unwrap();
        assert!(matches!(
            apply_plan_exact(&plan, &a),
            Err(LchsError::NormViolation { .. })
        ));
    }

    #[test]
    fn dilated_generator_blocks_decouple_under_the_plan() {
        // Witten-form OU generator, dilated to 𝒜; the plan applied to a
        // system-block vector must reproduce e^{tH}x in the system block and
        // leave the residue blocks at the accuracy floor.
        let basis = Basis::<f64>::plane_wave(16, 6.0, 1, 1).unwrap();
        let potential = Potential::quadratic(1.0);
        let beta = 1.0;
        let sos = discretize::build_sos(&basis, &potential, beta).unwrap();
        let h = discretize::build_hbeta(
            &basis,
            &potential,
            beta,
            discretize::HbetaForm::SosConsistent,
        )
        .unwrap();
        let script_a = discretize::build_dilated_sqrt(&sos).unwrap();
        let alpha = crate::linalg::op_norm_hermitian(&script_a).unwrap() * 1.000001;
        let (t, eps) = (1.0, 1e-6);
        let plan = build_plan(t, eps, alpha).unwrap();

        let n = basis.total_dim();
        let blocks = script_a.nrows() / n;
        let mut rng = ChaCha8Rng::seed_from_u64(0x0d11);
        let mut x = CVec::zeros(n);
        for i in 0..n {
            x[i] = Complex::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        }
        let norm_x = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

        let mut padded = CVec::zeros(blocks * n);
        for i in 0..n {
            padded[i] = x[i];
        }
        let (vals, vecs) = hermitian_eig(&script_a).unwrap();
        let evolved = spectral_apply(&vals, &vecs, |l| plan.evaluate_scalar(l), &padded);

        let (hv, hq) = hermitian_eig(&h).unwrap();
        let want = spectral_apply(&hv, &hq, |l| Complex::new((t * l).exp(), 0.0), &x);

        let mut system_err = 0.0_f64;
        for i in 0..n {
            system_err += (evolved[i] - want[i]).norm_sqr();
        }
        assert!(
            system_err.sqrt() <= eps * norm_x * 2.0,
            "system block error {:.3e}",
            system_err.sqrt()
        );
        let mut residue = 0.0_f64;
        for i in n..blocks * n {
            residue += evolved[i].norm_sqr();
        }
        assert!(
            residue.sqrt() <= eps * norm_x * 2.0,
            "residue blocks carry {:.3e}",
            residue.sqrt()
        );
    }

    #[test]
    fn spectral_closure_matches_direct_application() {
        let plan = build_plan(0.5_f64, 1e-6, 1.0).unwrap();
        let f = plan_spectral_fn(&plan);
        let direct = plan.evaluate_scalar(0.3);
        let via_closure = f(0.3);
        assert_abs_diff_eq!(direct.re, via_closure.re, epsilon = 0.0);
        assert_abs_diff_eq!(direct.im, via_closure.im, epsilon = 0.0);
    }

    #[test]
    fn certificate_reevaluation_matches_stored_value() {
        let plan = build_plan(2.0_f64, 1e-4, 3.0).unwrap();
        assert_abs_diff_eq!(
            plan.certificate_error(),
            plan.certified_error,
            epsilon = 0.0
        );
    }

}
