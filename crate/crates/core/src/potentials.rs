//! Potential-energy surfaces: values, gradients, Hessians, Witten effective
//! potentials, and confining augmentations.
//!
//! Supported families:
//!
//! - **Polynomial pair potentials** `V(x) = Σ_{i<j} v(r_ij)` for `η` particles
//!   in `d` dimensions, with `v(r)` a polynomial in nonnegative even powers of
//!   `r` plus an optional `cos r` term. Keeping the powers even makes
//!   `v′(r)/r` polynomial, so gradients and Hessians stay analytic through
//!   particle coincidences.
//! - **1D double well** `V(x) = q₄x⁴ + q₂x²` (canonically `x⁴ − x²`).
//! - **Isotropic quadratic** `V(x) = (c/2)‖x‖²` (Ornstein-Uhlenbeck).
//! - **Cosine plus quadratic** `V(x) = A·cos(2πνx) + c·x²`, the metastable
//!   1D landscape used by the state-preparation demonstrations.
//! - **Augmented potentials** `V_R = V + κ·dist(x, R)²` confining the
//!   dynamics to a convex region `R` (axis-aligned box or ball) with a C¹
//!   seam at `∂R`.
//!
//! The Witten effective potential `U_β(x) = −(β/4)‖∇V‖² + ½ΔV` turns the
//! Fokker-Planck generator into a self-adjoint Schrödinger-type operator;
//! it is exposed here so discretizations can evaluate it pointwise.
//!
//! # Example
//!
//! ```
//! use fpflux_core::potentials::Potential;
//!
//! let dw = Potential::double_well();
//! approx::assert_abs_diff_eq!(dw.eval(&[0.0]).unwrap(), 0.0);
//! approx::assert_abs_diff_eq!(dw.gradient(&[1.0]).unwrap()[0], 2.0);
//!
//! // U_β for V = x⁴ − x² at β = 2, x = 1: −(2/4)·2² + ½·10 = 3.
//! approx::assert_abs_diff_eq!(dw.witten_u(2.0, &[1.0]).unwrap(), 3.0);
//! ```

use crate::scalar::Real;
use crate::RMatrix;
use ndarray::Array2;
use thiserror::Error;

// ============================================================================
// Errors
// ============================================================================

/// Failures of potential evaluation.
#[derive(Debug, Error)]
pub enum PotentialError {
    /// The configuration vector has the wrong number of coordinates.
    #[error("configuration has {got} coordinates, expected {expected}")]
    DimensionMismatch {
        /// Degrees of freedom the potential expects (`η·d`).
        expected: usize,
        /// Length of the configuration vector received.
        got: usize,
    },
}

// ============================================================================
// Convex regions
// ============================================================================

/// Convex region used for confining augmentations and region indicators.
///
/// Boxes may use infinite bounds to describe half-spaces (useful for
/// reactant/product indicators); confining augmentations and centroids
/// require finite extents.
#[derive(Debug, Clone, PartialEq)]
pub enum Region<T: Real> {
    /// Axis-aligned box `{x : lo_i ≤ x_i ≤ hi_i}`.
    IntervalBox {
        /// Lower corner (entries may be `−∞`).
        lo: Vec<T>,
        /// Upper corner (entries may be `+∞`).
        hi: Vec<T>,
    },
    /// Euclidean ball `{x : ‖x − center‖ ≤ radius}`.
    Ball {
        /// Center of the ball.
        center: Vec<T>,
        /// Radius (positive).
        radius: T,
    },
}

impl<T: Real> Region<T> {
    /// 1D interval `[lo, hi]`.
    pub fn interval(lo: T, hi: T) -> Self {
        Region::IntervalBox { lo: vec![lo], hi: vec![hi] }
    }

    /// 1D half-line `{x ≤ hi}`.
    pub fn half_line_below(hi: T) -> Self {
        Region::IntervalBox { lo: vec![-T::infinity()], hi: vec![hi] }
    }

    /// 1D half-line `{x ≥ lo}`.
    pub fn half_line_above(lo: T) -> Self {
        Region::IntervalBox { lo: vec![lo], hi: vec![T::infinity()] }
    }

    /// Number of coordinates the region constrains.
    pub fn dof(&self) -> usize {
        match self {
            Region::IntervalBox { lo, .. } => lo.len(),
            Region::Ball { center, .. } => center.len(),
        }
    }

    /// Whether `x` lies in the (closed) region.
    pub fn contains(&self, x: &[T]) -> bool {
        match self {
            Region::IntervalBox { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(&xi, (&l, &h))| xi >= l && xi <= h),
            Region::Ball { center, radius } => {
                let r2: T = x
                    .iter()
                    .zip(center)
                    .map(|(&xi, &ci)| (xi - ci) * (xi - ci))
                    .sum();
                r2 <= *radius * *radius
            }
        }
    }

    /// Euclidean projection of `x` onto the closed region.
    pub fn project(&self, x: &[T]) -> Vec<T> {
        match self {
            Region::IntervalBox { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(&xi, (&l, &h))| xi.max(l).min(h))
                .collect(),
            Region::Ball { center, radius } => {
                let mut delta: Vec<T> = x.iter().zip(center).map(|(&xi, &ci)| xi - ci).collect();
                let norm: T = delta.iter().map(|&d| d * d).sum::<T>().sqrt();
                if norm <= *radius {
                    x.to_vec()
                } else {
                    let scale = *radius / norm;
                    for d in delta.iter_mut() {
                        *d *= scale;
                    }
                    delta.iter().zip(center).map(|(&d, &c)| c + d).collect()
                }
            }
        }
    }

    /// Distance from `x` to the region (zero inside).
    pub fn dist(&self, x: &[T]) -> T {
        let p = self.project(x);
        x.iter()
            .zip(&p)
            .map(|(&xi, &pi)| (xi - pi) * (xi - pi))
            .sum::<T>()
            .sqrt()
    }

    /// Centroid of the region; requires finite extents.
    pub fn centroid(&self) -> Vec<T> {
        match self {
            Region::IntervalBox { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(&l, &h)| (l + h) / T::of(2.0))
                .collect(),
            Region::Ball { center, .. } => center.clone(),
        }
    }
}

// ============================================================================
// Pair potentials
// ============================================================================

/// Radial pair interaction `v(r) = Σ_j c_j·r^{2(j+1)} + a·cos r` summed over
/// all particle pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct PairPotential<T: Real> {
    /// `even_coeffs[j]` multiplies `r^{2(j+1)}` (so the list starts at `r²`);
    /// even powers only, which keeps `v′(r)/r` polynomial.
    pub even_coeffs: Vec<T>,
    /// Amplitude of the optional `cos r` term.
    pub cos_coeff: T,
    /// Number of particles `η`.
    pub eta: usize,
    /// Spatial dimension `d` per particle.
    pub dim: usize,
}

impl<T: Real> PairPotential<T> {
    /// Scalar interaction `v(r)`.
    pub fn v(&self, r: T) -> T {
        let r2 = r * r;
        let mut poly = T::zero();
        let mut power = r2;
        for &c in &self.even_coeffs {
            poly += c * power;
            power *= r2;
        }
        poly + self.cos_coeff * r.cos()
    }

    /// Radial derivative `v′(r)`.
    pub fn v_prime(&self, r: T) -> T {
        self.v_prime_over_r(r) * r
    }

    /// The analytic ratio `v′(r)/r`, finite through `r = 0`.
    pub fn v_prime_over_r(&self, r: T) -> T {
        let r2 = r * r;
        let mut poly = T::zero();
        let mut power = T::one();
        for (j, &c) in self.even_coeffs.iter().enumerate() {
            let exponent = T::of(2.0 * (j as f64 + 1.0));
            poly += c * exponent * power;
            power *= r2;
        }
        poly - self.cos_coeff * sinc(r)
    }

    /// Second radial derivative `v″(r)`.
    pub fn v_double_prime(&self, r: T) -> T {
        let r2 = r * r;
        let mut poly = T::zero();
        let mut power = T::one();
        for (j, &c) in self.even_coeffs.iter().enumerate() {
            let two_j = 2.0 * (j as f64 + 1.0);
            poly += c * T::of(two_j * (two_j - 1.0)) * power;
            power *= r2;
        }
        poly - self.cos_coeff * r.cos()
    }
}

/// Numerically stable `sin(r)/r`.
fn sinc<T: Real>(r: T) -> T {
    if r.abs() < T::of(1e-4) {
        let r2 = r * r;
        T::one() - r2 / T::of(6.0) + r2 * r2 / T::of(120.0)
    } else {
        r.sin() / r
    }
}

// ============================================================================
// Augmented potentials
// ============================================================================

/// Base potential plus a confining wall `κ·dist(x, R)²` outside `R`.
///
/// Inside `R` the augmentation vanishes identically; the gradient of the
/// wall is `2κ(x − proj_R(x))`, which is continuous across `∂R`, so the
/// augmented potential is C¹.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedPotential<T: Real> {
    /// Unconfined base potential.
    pub base: Potential<T>,
    /// Convex region the dynamics should stay in.
    pub region: Region<T>,
    /// Wall stiffness `κ` (energy / length²).
    pub kappa: T,
}

// ============================================================================
// The Potential enum
// ============================================================================

/// A potential-energy surface with analytic derivatives.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential<T: Real> {
    /// Sum of radial pair interactions over all particle pairs.
    PolynomialPair(PairPotential<T>),
    /// `V(x) = q₄·x⁴ + q₂·x²` in one dimension.
    DoubleWell1d {
        /// Quartic coefficient `q₄`.
        quartic: T,
        /// Quadratic coefficient `q₂` (negative for a double well).
        quadratic: T,
    },
    /// `V(x) = (c/2)·‖x‖²`.
    Quadratic {
        /// Curvature `c` (the Hessian is `c·I`).
        curvature: T,
        /// Number of coordinates.
        dim: usize,
    },
    /// `V(x) = A·cos(2πνx) + c·x²` in one dimension.
    CosinePlusQuadratic {
        /// Cosine amplitude `A`.
        amplitude: T,
        /// Cosine frequency `ν` (in cycles per unit length).
        frequency: T,
        /// Quadratic coefficient `c` (multiplies `x²`, not `x²/2`).
        curvature: T,
    },
    /// Base potential with a confining wall outside a convex region.
    Augmented(std::boxed::Box<AugmentedPotential<T>>),
}

impl<T: Real> Potential<T> {
    // ------------------------------------------------------------------
    // Constructors
    // ------------------------------------------------------------------

    /// The canonical 1D double well `V(x) = x⁴ − x²`.
    pub fn double_well() -> Self {
        Potential::DoubleWell1d { quartic: T::one(), quadratic: -T::one() }
    }

    /// 1D quadratic `V(x) = (c/2)x²`.
    pub fn quadratic(curvature: T) -> Self {
        Potential::Quadratic { curvature, dim: 1 }
    }

    /// Isotropic quadratic `V(x) = (c/2)‖x‖²` in `dim` coordinates.
    pub fn quadratic_nd(curvature: T, dim: usize) -> Self {
        Potential::Quadratic { curvature, dim }
    }

    /// `V(x) = A·cos(2πνx) + c·x²`.
    pub fn cosine_plus_quadratic(amplitude: T, frequency: T, curvature: T) -> Self {
        Potential::CosinePlusQuadratic { amplitude, frequency, curvature }
    }

    /// Pair potential from even-power coefficients and a cosine amplitude.
    pub fn pair(even_coeffs: Vec<T>, cos_coeff: T, eta: usize, dim: usize) -> Self {
        Potential::PolynomialPair(PairPotential { even_coeffs, cos_coeff, eta, dim })
    }

    /// Harmonic pair potential `v(r) = r²/2`.
    pub fn pair_harmonic(eta: usize, dim: usize) -> Self {
        Self::pair(vec![T::of(0.5)], T::zero(), eta, dim)
    }

    /// Cosine pair potential `v(r) = cos r`.
    pub fn pair_cosine(eta: usize, dim: usize) -> Self {
        Self::pair(Vec::new(), T::one(), eta, dim)
    }

    /// Wraps `self` in a confining wall of stiffness `kappa` outside `region`.
    pub fn augmented(self, region: Region<T>, kappa: T) -> Self {
        Potential::Augmented(std::boxed::Box::new(AugmentedPotential {
            base: self,
            region,
            kappa,
        }))
    }

    // ------------------------------------------------------------------
    // Shape
    // ------------------------------------------------------------------

    /// Total degrees of freedom of a configuration vector (`η·d`).
    pub fn dof(&self) -> usize {
        match self {
            Potential::PolynomialPair(p) => p.eta * p.dim,
            Potential::DoubleWell1d { .. } => 1,
            Potential::Quadratic { dim, .. } => *dim,
            Potential::CosinePlusQuadratic { .. } => 1,
            Potential::Augmented(a) => a.base.dof(),
        }
    }

    fn check_dof(&self, x: &[T]) -> Result<(), PotentialError> {
        let expected = self.dof();
        if x.len() != expected {
            return Err(PotentialError::DimensionMismatch { expected, got: x.len() });
        }
        Ok(())
    }

    // ------------------------------------------------------------------
    // Evaluation
    // ------------------------------------------------------------------

    /// Potential energy `V(x)`.
    ///
    /// ```
    /// use fpflux_core::potentials::Potential;
    /// // Pair potential v(r) = r²/2 between two 1D particles at 0 and 2.
    /// let p = Potential::pair_harmonic(2, 1);
    /// approx::assert_abs_diff_eq!(p.eval(&[0.0, 2.0]).unwrap(), 2.0);
    /// // cos(2πx) + x² at x = 1/2: cos(π) + 1/4 = −3/4.
    /// let c = Potential::cosine_plus_quadratic(1.0, 1.0, 1.0);
    /// approx::assert_abs_diff_eq!(c.eval(&[0.5]).unwrap(), -0.75, epsilon = 1e-15);
    /// ```
    pub fn eval(&self, x: &[T]) -> Result<T, PotentialError> {
        self.check_dof(x)?;
        Ok(match self {
            Potential::PolynomialPair(p) => {
                let mut total = T::zero();
                for i in 0..p.eta {
                    for j in i + 1..p.eta {
                        total += p.v(pair_distance(x, p.dim, i, j));
                    }
                }
                total
            }
            Potential::DoubleWell1d { quartic, quadratic } => {
                let x2 = x[0] * x[0];
                *quartic * x2 * x2 + *quadratic * x2
            }
            Potential::Quadratic { curvature, .. } => {
                let r2: T = x.iter().map(|&xi| xi * xi).sum();
                *curvature * r2 / T::of(2.0)
            }
            Potential::CosinePlusQuadratic { amplitude, frequency, curvature } => {
                let phase = T::of(2.0) * T::PI() * *frequency * x[0];
                *amplitude * phase.cos() + *curvature * x[0] * x[0]
            }
            Potential::Augmented(a) => {
                let wall = a.region.dist(x);
                a.base.eval(x)? + a.kappa * wall * wall
            }
        })
    }

    /// Gradient `∇V(x)` as a configuration vector.
    ///
    /// ```
    /// use fpflux_core::potentials::{Potential, Region};
    /// // Two 2D particles joined by a spring: equal and opposite forces.
    /// let p = Potential::pair_harmonic(2, 2);
    /// let g = p.gradient(&[0.0, 0.0, 1.0, 0.0]).unwrap();
    /// assert_eq!(g, vec![-1.0, 0.0, 1.0, 0.0]);
    /// // Confining wall: base 0, κ = 20, R = [−1, 1], x = 2 → 2κ(x−1) = 40.
    /// let wall = Potential::quadratic(0.0).augmented(Region::interval(-1.0, 1.0), 20.0);
    /// approx::assert_abs_diff_eq!(wall.gradient(&[2.0]).unwrap()[0], 40.0);
    /// ```
    pub fn gradient(&self, x: &[T]) -> Result<Vec<T>, PotentialError> {
        self.check_dof(x)?;
        Ok(match self {
            Potential::PolynomialPair(p) => {
                let mut g = vec![T::zero(); x.len()];
                for i in 0..p.eta {
                    for j in i + 1..p.eta {
                        let r = pair_distance(x, p.dim, i, j);
                        // v′(r)·(x_i − x_j)/r = (v′(r)/r)·(x_i − x_j),
                        // analytic through r = 0.
                        let q = p.v_prime_over_r(r);
                        for a in 0..p.dim {
                            let delta = x[i * p.dim + a] - x[j * p.dim + a];
                            g[i * p.dim + a] += q * delta;
                            g[j * p.dim + a] -= q * delta;
                        }
                    }
                }
                g
            }
            Potential::DoubleWell1d { quartic, quadratic } => {
                vec![T::of(4.0) * *quartic * x[0].powi(3) + T::of(2.0) * *quadratic * x[0]]
            }
            Potential::Quadratic { curvature, .. } => {
                x.iter().map(|&xi| *curvature * xi).collect()
            }
            Potential::CosinePlusQuadratic { amplitude, frequency, curvature } => {
                let omega = T::of(2.0) * T::PI() * *frequency;
                vec![-*amplitude * omega * (omega * x[0]).sin() + T::of(2.0) * *curvature * x[0]]
            }
            Potential::Augmented(a) => {
                let mut g = a.base.gradient(x)?;
                let proj = a.region.project(x);
                for (gi, (&xi, &pi)) in g.iter_mut().zip(x.iter().zip(&proj)) {
                    *gi += T::of(2.0) * a.kappa * (xi - pi);
                }
                g
            }
        })
    }

    /// Hessian `∇²V(x)` as a symmetric `ηd × ηd` matrix.
    ///
    /// ```
    /// use fpflux_core::potentials::Potential;
    /// let p = Potential::pair_harmonic(2, 1);
    /// let h = p.hessian(&[0.0, 1.0]).unwrap();
    /// assert_eq!(h[[0, 0]], 1.0);
    /// assert_eq!(h[[0, 1]], -1.0);
    /// assert_eq!(h[[1, 1]], 1.0);
    /// ```
    pub fn hessian(&self, x: &[T]) -> Result<RMatrix<T>, PotentialError> {
        self.check_dof(x)?;
        let n = x.len();
        Ok(match self {
            Potential::PolynomialPair(p) => {
                let mut h = Array2::zeros((n, n));
                for i in 0..p.eta {
                    for j in i + 1..p.eta {
                        let r = pair_distance(x, p.dim, i, j);
                        let q = p.v_prime_over_r(r);
                        let vpp = p.v_double_prime(r);
                        // Block A_ij = v″·uuᵀ + (v′/r)·(I − uuᵀ); at r = 0
                        // both coefficients coincide and A_ij = v″(0)·I.
                        for a in 0..p.dim {
                            for b in 0..p.dim {
                                let uu = if r > T::zero() {
                                    let ua = (x[i * p.dim + a] - x[j * p.dim + a]) / r;
                                    let ub = (x[i * p.dim + b] - x[j * p.dim + b]) / r;
                                    ua * ub
                                } else if a == b {
                                    T::one()
                                } else {
                                    T::zero()
                                };
                                let delta = if a == b { T::one() } else { T::zero() };
                                let block = if r > T::zero() {
                                    vpp * uu + q * (delta - uu)
                                } else {
                                    vpp * delta
                                };
                                let (ia, jb) = (i * p.dim + a, j * p.dim + b);
                                let (ib, ja) = (i * p.dim + b, j * p.dim + a);
                                h[[ia, ib]] += block;
                                h[[ja, jb]] += block;
                                h[[ia, jb]] -= block;
                                h[[ja, ib]] -= block;
                            }
                        }
                    }
                }
                h
            }
            Potential::DoubleWell1d { quartic, quadratic } => {
                let mut h = Array2::zeros((1, 1));
                h[[0, 0]] = T::of(12.0) * *quartic * x[0] * x[0] + T::of(2.0) * *quadratic;
                h
            }
            Potential::Quadratic { curvature, .. } => {
                let mut h = Array2::zeros((n, n));
                for i in 0..n {
                    h[[i, i]] = *curvature;
                }
                h
            }
            Potential::CosinePlusQuadratic { amplitude, frequency, curvature } => {
                let omega = T::of(2.0) * T::PI() * *frequency;
                let mut h = Array2::zeros((1, 1));
                h[[0, 0]] =
                    -*amplitude * omega * omega * (omega * x[0]).cos() + T::of(2.0) * *curvature;
                h
            }
            Potential::Augmented(a) => {
                let mut h = a.base.hessian(x)?;
                wall_hessian_add(&mut h, &a.region, a.kappa, x);
                h
            }
        })
    }

    /// Laplacian `ΔV(x)` (trace of the Hessian).
    pub fn laplacian(&self, x: &[T]) -> Result<T, PotentialError> {
        // Cheap closed forms for the scalar kinds; trace of the assembled
        // Hessian for the rest.
        match self {
            Potential::DoubleWell1d { quartic, quadratic } => {
                self.check_dof(x)?;
                Ok(T::of(12.0) * *quartic * x[0] * x[0] + T::of(2.0) * *quadratic)
            }
            Potential::Quadratic { curvature, dim } => {
                self.check_dof(x)?;
                Ok(*curvature * T::of(*dim as f64))
            }
            _ => {
                let h = self.hessian(x)?;
                Ok((0..x.len()).map(|i| h[[i, i]]).sum())
            }
        }
    }

    /// Witten effective potential `U_β(x) = −(β/4)‖∇V(x)‖² + ½ΔV(x)`.
    ///
    /// ```
    /// use fpflux_core::potentials::Potential;
    /// let ou = Potential::quadratic(1.0);
    /// approx::assert_abs_diff_eq!(ou.witten_u(1.0, &[0.0]).unwrap(), 0.5);
    /// approx::assert_abs_diff_eq!(ou.witten_u(4.0, &[1.0]).unwrap(), -0.5);
    /// ```
    pub fn witten_u(&self, beta: T, x: &[T]) -> Result<T, PotentialError> {
        let g = self.gradient(x)?;
        let grad_sq: T = g.iter().map(|&gi| gi * gi).sum();
        Ok(-beta / T::of(4.0) * grad_sq + self.laplacian(x)? / T::of(2.0))
    }

    // ------------------------------------------------------------------
    // Derived bounds
    // ------------------------------------------------------------------

    /// Grid-scan maximizer of `|v′(r)/r|` over `0 ≤ r ≤ √d·L` for pair
    /// potentials; `None` for other kinds.
    ///
    /// The scan resolution is user-set; the maximum of an even polynomial
    /// plus a sinc term moves smoothly, so a few thousand samples pin it
    /// far beyond the accuracy the resource formulas need.
    pub fn alpha_v(&self, box_half_width: T, grid: usize) -> Option<T> {
        let p = match self {
            Potential::PolynomialPair(p) => p,
            _ => return None,
        };
        let r_max = T::of((p.dim as f64).sqrt()) * box_half_width;
        let n = grid.max(2);
        let mut worst = T::zero();
        for k in 0..=n {
            let r = r_max * T::of(k as f64 / n as f64);
            worst = worst.max(p.v_prime_over_r(r).abs());
        }
        Some(worst)
    }
}

/// Distance between particles `i` and `j` of an `η×d` configuration.
fn pair_distance<T: Real>(x: &[T], dim: usize, i: usize, j: usize) -> T {
    let mut r2 = T::zero();
    for a in 0..dim {
        let delta = x[i * dim + a] - x[j * dim + a];
        r2 += delta * delta;
    }
    r2.sqrt()
}

/// Adds the Hessian of `κ·dist(x, R)²` to `h`.
fn wall_hessian_add<T: Real>(h: &mut RMatrix<T>, region: &Region<T>, kappa: T, x: &[T]) {
    let two_kappa = T::of(2.0) * kappa;
    match region {
        Region::IntervalBox { lo, hi } => {
            // dist² = Σ_i max(lo_i − x_i, x_i − hi_i, 0)², separable per axis.
            for (i, (&xi, (&l, &u))) in x.iter().zip(lo.iter().zip(hi)).enumerate() {
                if xi < l || xi > u {
                    h[[i, i]] += two_kappa;
                }
            }
        }
        Region::Ball { center, radius } => {
            let delta: Vec<T> = x.iter().zip(center).map(|(&xi, &ci)| xi - ci).collect();
            let r: T = delta.iter().map(|&d| d * d).sum::<T>().sqrt();
            if r <= *radius || r == T::zero() {
                return;
            }
            // dist² = (r − ρ)²: Hessian = 2[uuᵀ + (1 − ρ/r)(I − uuᵀ)].
            let radial = two_kappa;
            let tangential = two_kappa * (T::one() - *radius / r);
            for a in 0..x.len() {
                for b in 0..x.len() {
                    let uu = delta[a] * delta[b] / (r * r);
                    let id = if a == b { T::one() } else { T::zero() };
                    h[[a, b]] += radial * uu + tangential * (id - uu);
                }
            }
        }
    }
}
