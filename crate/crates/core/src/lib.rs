//! Spectral and stochastic numerics for estimating reaction rates of
//! overdamped Langevin dynamics through propagator overlaps.
//!
//! The crate is organized as a pipeline:
//!
//! 1. [`potentials`] — analytic potential-energy surfaces (pair interactions,
//!    double wells, confining augmentations) with gradients, Hessians, and the
//!    Witten effective potential.
//! 2. [`discretize`] — plane-wave and finite-difference discretizations of the
//!    Fokker-Planck generator, its self-adjoint (Witten) form `H_β`, the
//!    first-order sum-of-squares factors `A_j`, and the Hermitian dilation `𝒜`
//!    with `(−𝒜²)` block-diagonal structure.
//! 3. [`lchs`] — Gaussian linear-combination-of-Hamiltonian-simulations plans:
//!    certified node sets `{k_j, c_j}` with `e^{tH} ≈ Σ_j c_j e^{−i k_j 𝒜}`
//!    on the relevant spectral window.
//! 4. [`blockenc`] — block encodings, Chebyshev/phase-factor polynomial
//!    evaluation on encoded operators, Jacobi-Anger expansions, and
//!    multiplexed evaluation with shared iterates.
//! 5. [`overlap`] — the non-unitary overlap circuit: statevector simulation,
//!    analytic success probabilities, Bernoulli sampling, and flux/rate
//!    estimation against eigendecomposition oracles.
//! 6. [`stateprep`] — local thermal-state preparation in a convex region via
//!    an augmented confining potential and Witten-dynamics relaxation.
//! 7. [`baselines`] — classical references: Euler-Maruyama Langevin rate
//!    estimation, conditioning scans of the discretized generator, and
//!    pair-potential stiffness scans.
//! 8. [`resources`] — closed-form resource accounting (Toffoli counts,
//!    subnormalizations, query depths) with instrumentation cross-checks.
//! 9. [`verification`] — the end-to-end verification suite wiring all of the
//!    above into pass/fail reports.
//!
//! All numeric kernels are generic over the scalar type through
//! [`scalar::Real`] (instantiated at `f32` or `f64`); the crate root exports
//! `f64` aliases ([`RMat`], [`CMat`], …) used throughout examples and tests.
//!
//! # Example
//!
//! ```
//! use fpflux_core::{discretize, lchs, potentials};
//!
//! // Ornstein-Uhlenbeck process on a periodic box: V(x) = x²/2, β = 1.
//! let potential = potentials::Potential::quadratic(1.0);
//! let basis = discretize::Basis::plane_wave(64, 8.0, 1, 1).unwrap();
//! let h_beta = discretize::build_hbeta(&basis, &potential, 1.0,
//!     discretize::HbetaForm::GridDiagonal).unwrap();
//! let (eigs, _) = fpflux_core::linalg::hermitian_eig(&h_beta).unwrap();
//! // The generator spectrum is 0, −1, −2, … up to discretization error.
//! let top = eigs[eigs.len() - 1];
//! approx::assert_abs_diff_eq!(top, 0.0, epsilon = 1e-8);
//!
//! // A certified short-time propagator plan for a unit-norm generator.
//! let plan = lchs::build_plan(0.5, 1e-3, 1.0).unwrap();
//! assert!(plan.alpha_g <= 1.0 + 10.0 * 1e-3);
//! ```

pub mod baselines;
pub mod blockenc;
pub mod discretize;
pub mod lchs;
pub mod linalg;
pub mod overlap;
pub mod potentials;
pub mod resources;
pub mod scalar;
pub mod special;
pub mod stateprep;
pub mod verification;

pub use scalar::Real;

use ndarray::{Array1, Array2};
use num_complex::Complex;

// ============================================================================
// Scalar-generic array aliases
// ============================================================================

/// Dense complex matrix over a generic real scalar.
pub type CMatrix<T> = Array2<Complex<T>>;
/// Dense complex vector over a generic real scalar.
pub type CVector<T> = Array1<Complex<T>>;
/// Dense real matrix over a generic real scalar.
pub type RMatrix<T> = Array2<T>;
/// Dense real vector over a generic real scalar.
pub type RVector<T> = Array1<T>;

// ============================================================================
// Concrete f64 aliases
// ============================================================================

/// `f64` complex matrix — the workhorse type of the test suite.
pub type CMat = CMatrix<f64>;
/// `f64` complex vector.
pub type CVec = CVector<f64>;
/// `f64` real matrix.
pub type RMat = RMatrix<f64>;
/// `f64` real vector.
pub type RVec = RVector<f64>;
