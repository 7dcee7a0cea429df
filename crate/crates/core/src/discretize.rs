//! Finite-dimensional assemblies of the Fokker-Planck generator, its
//! self-adjoint Witten form, the first-order sum-of-squares factors, and the
//! Hermitian dilation.
//!
//! Two discretization schemes are supported:
//!
//! - **Finite differences** on a uniform grid with periodic or reflecting
//!   closure. The generator `F` is assembled in flux form,
//!   `(Fρ)_i ∝ Σ_± w_{i±1/2}[(e^{βV}ρ)_{i±1} − (e^{βV}ρ)_i]` with
//!   `w_{i+1/2} = e^{−β(V_i+V_{i+1})/2}`, which conserves probability
//!   (column sums vanish identically), annihilates the Boltzmann vector
//!   `e^{−βV}` exactly, and is *exactly* similar to the symmetric `H_β`
//!   assembled by [`build_hbeta`] under `D = diag(e^{−βV/2})`. The
//!   exponentially weighted diagonal Taylor-expands to the Witten potential
//!   `U_β = −(β/4)‖∇V‖² + ½ΔV`, so this is a consistent discretization of
//!   `β⁻¹Δ + U_β` that keeps the similarity relation exact at finite `Δx`.
//! - **Plane waves** on the same grid, with the derivative diagonal in the
//!   Fourier basis (`k_m = πm/L` for `m ∈ {−N/2, …, N/2−1}`). Here the
//!   sum-of-squares factors `A_j = −i(β^{−1/2}∂_j − (√β/2)F_j)` are exact
//!   matrices, and the ground-truth discrete generator is *defined* as
//!   `H_disc := −Σ_j A_j†A_j` rather than an independently truncated `H_β`:
//!   products of truncated operators differ from truncated products by
//!   aliasing, so the two assemblies are only compared on bandwidth-matched
//!   subspaces (or both against the continuum limit).
//!
//! The dilation `𝒜 = [[0, B†], [B, 0]]` with `B` the stacked factors is
//! Hermitian, squares block-diagonally, and satisfies
//! `e^{−𝒜²t}(|0⟩⊗|x⟩) = |0⟩ ⊗ e^{H_disc t}|x⟩` with the system block fixed
//! as block index 0.
//!
//! # Example
//!
//! ```
//! use fpflux_core::{discretize, linalg, potentials};
//!
//! let pot = potentials::Potential::quadratic(1.0);
//! let basis = discretize::Basis::plane_wave(64, 8.0, 1, 1).unwrap();
//! let h = discretize::build_hbeta(&basis, &pot, 1.0,
//!     discretize::HbetaForm::GridDiagonal).unwrap();
//! let (eigs, _) = linalg::hermitian_eig(&h).unwrap();
//! // Ornstein-Uhlenbeck spectrum: 0, −1, −2, …
//! approx::assert_abs_diff_eq!(eigs[eigs.len() - 1], 0.0, epsilon = 1e-8);
//! approx::assert_abs_diff_eq!(eigs[eigs.len() - 2], -1.0, epsilon = 1e-8);
//! ```

use crate::linalg::{adjoint, identity_c, kron};
use crate::potentials::{Potential, PotentialError};
use crate::scalar::Real;
use crate::{CMatrix, RMatrix};
use ndarray::Array2;
use num_complex::Complex;
use thiserror::Error;

/// Default cap on the total Hilbert-space dimension `N^{ηd}`.
pub const DEFAULT_DIM_CAP: usize = 1 << 14;

// ============================================================================
// Errors
// ============================================================================

/// Failures of matrix assembly.
#[derive(Debug, Error)]
pub enum DiscretizeError {
    /// The requested total dimension exceeds the configured cap.
    #[error("total Hilbert dimension {dim} exceeds the cap {cap}")]
    DimensionCap {
        /// Requested `N^{ηd}` (saturated on overflow).
        dim: usize,
        /// Configured cap.
        cap: usize,
    },
    /// Plane-wave bases need `N = 2ⁿ ≥ 2` points per degree of freedom.
    #[error("plane-wave bases need a power-of-two point count ≥ 2, got {points}")]
    InvalidPoints {
        /// Offending point count.
        points: usize,
    },
    /// The operation is only defined for one scheme.
    #[error("{op} requires the {required} scheme")]
    UnsupportedScheme {
        /// Operation that was attempted.
        op: &'static str,
        /// Scheme it needs.
        required: &'static str,
    },
    /// Dilation input blocks must be square and of equal dimension.
    #[error("dilated square root needs square factor blocks of equal dimension")]
    RaggedBlocks,
    /// Geometry parameters must be positive and nonempty.
    #[error("basis needs positive half-length, dimension, particle count, and ≥ 2 points")]
    InvalidGeometry,
    /// The potential rejected a grid point.
    #[error(transparent)]
    Potential(#[from] PotentialError),
}

// ============================================================================
// Bases
// ============================================================================

/// Discretization scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Second-order finite differences in flux form.
    FiniteDifference,
    /// Fourier spectral collocation.
    PlaneWave,
}

/// Closure of the finite-difference stencil at the box edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Periodic wrap (matches the plane-wave parity).
    Periodic,
    /// No-flux walls: boundary links are dropped.
    Reflecting,
}

/// Which assembly of `H_β` to use on a plane-wave basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HbetaForm {
    /// `β⁻¹Δ_disc + diag(U_β)` with the Witten potential sampled pointwise.
    GridDiagonal,
    /// `−Σ_j A_j†A_j` from the sum-of-squares factors (the ground-truth
    /// discrete generator the dilation exponentiates).
    SosConsistent,
}

/// A uniform tensor grid `x_i = −L + iΔx`, `Δx = 2L/N`, for `η` particles in
/// `d` dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis<T: Real> {
    /// Discretization scheme.
    pub scheme: Scheme,
    /// Points per degree of freedom, `N` (a power of two for plane waves).
    pub points: usize,
    /// Box half-length `L`; the grid covers `[−L, L)`.
    pub half_length: T,
    /// Spatial dimension `d` per particle.
    pub dim: usize,
    /// Particle count `η`.
    pub eta: usize,
    /// Finite-difference boundary closure (ignored for plane waves).
    pub boundary: Boundary,
    /// Cap on the total dimension `N^{ηd}`.
    pub dim_cap: usize,
}

impl<T: Real> Basis<T> {
    /// Plane-wave basis with wavenumbers `k_m = πm/L`, `m ∈ {−N/2,…,N/2−1}`.
    pub fn plane_wave(
        points: usize,
        half_length: T,
        dim: usize,
        eta: usize,
    ) -> Result<Self, DiscretizeError> {
        if !points.is_power_of_two() || points < 2 {
            return Err(DiscretizeError::InvalidPoints { points });
        }
        let basis = Basis {
            scheme: Scheme::PlaneWave,
            points,
            half_length,
            dim,
            eta,
            boundary: Boundary::Periodic,
            dim_cap: DEFAULT_DIM_CAP,
        };
        basis.validate()?;
        Ok(basis)
    }

    /// Finite-difference basis (any `N ≥ 2`), periodic by default.
    pub fn finite_difference(
        points: usize,
        half_length: T,
        dim: usize,
        eta: usize,
    ) -> Result<Self, DiscretizeError> {
        let basis = Basis {
            scheme: Scheme::FiniteDifference,
            points,
            half_length,
            dim,
            eta,
            boundary: Boundary::Periodic,
            dim_cap: DEFAULT_DIM_CAP,
        };
        basis.validate()?;
        Ok(basis)
    }

    /// Replaces the boundary closure (finite differences only).
    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    /// Replaces the dimension cap and revalidates.
    pub fn with_cap(mut self, cap: usize) -> Result<Self, DiscretizeError> {
        self.dim_cap = cap;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<(), DiscretizeError> {
        if self.points < 2
            || self.dim == 0
            || self.eta == 0
            || !(self.half_length > T::zero())
        {
            return Err(DiscretizeError::InvalidGeometry);
        }
        let dim = self.checked_total_dim().unwrap_or(usize::MAX);
        if dim > self.dim_cap {
            return Err(DiscretizeError::DimensionCap { dim, cap: self.dim_cap });
        }
        Ok(())
    }

    /// Degrees of freedom `ηd`.
    pub fn dofs(&self) -> usize {
        self.dim * self.eta
    }

    fn checked_total_dim(&self) -> Option<usize> {
        let mut total: usize = 1;
        for _ in 0..self.dofs() {
            total = total.checked_mul(self.points)?;
        }
        Some(total)
    }

    /// Total Hilbert dimension `N^{ηd}`.
    pub fn total_dim(&self) -> usize {
        self.checked_total_dim().expect("validated at construction")
    }

    /// Grid spacing `Δx = 2L/N`.
    pub fn delta_x(&self) -> T {
        T::of(2.0) * self.half_length / T::of(self.points as f64)
    }

    /// Coordinate of grid index `i` along one axis: `x_i = −L + iΔx`.
    pub fn coordinate(&self, i: usize) -> T {
        -self.half_length + T::of(i as f64) * self.delta_x()
    }

    /// Signed mode numbers `m ∈ {−N/2, …, N/2−1}` in ascending order.
    pub fn modes(&self) -> Vec<i64> {
        let half = self.points as i64 / 2;
        (-half..half).collect()
    }

    /// Wavenumber `k_m = πm/L`.
    pub fn wavenumber(&self, m: i64) -> T {
        T::PI() * T::of(m as f64) / self.half_length
    }

    /// Full configuration-space coordinates of flat grid index `p`
    /// (C order: axis 0 is the slowest).
    pub fn grid_point(&self, p: usize) -> Vec<T> {
        let dofs = self.dofs();
        let mut out = vec![T::zero(); dofs];
        let mut rem = p;
        for a in (0..dofs).rev() {
            out[a] = self.coordinate(rem % self.points);
            rem /= self.points;
        }
        out
    }

    /// All grid points in flat (C) order.
    pub fn grid_points(&self) -> Vec<Vec<T>> {
        (0..self.total_dim()).map(|p| self.grid_point(p)).collect()
    }
}

/// Potential values sampled on the full grid in flat order.
pub fn grid_potential_values<T: Real>(
    basis: &Basis<T>,
    potential: &Potential<T>,
) -> Result<Vec<T>, DiscretizeError> {
    (0..basis.total_dim())
        .map(|p| Ok(potential.eval(&basis.grid_point(p))?))
        .collect()
}

// ============================================================================
// Spectral building blocks
// ============================================================================

/// Unitary DFT matrix `Q_{m,i} = e^{−i k_m x_i}/√N` over one axis, with rows
/// ordered by ascending mode number.
pub fn dft_matrix<T: Real>(basis: &Basis<T>) -> CMatrix<T> {
    let n = basis.points;
    let norm = T::one() / T::of(n as f64).sqrt();
    let mut q = Array2::zeros((n, n));
    for (row, &m) in basis.modes().iter().enumerate() {
        let k = basis.wavenumber(m);
        for i in 0..n {
            let theta = k * basis.coordinate(i);
            q[[row, i]] = Complex::new(theta.cos() * norm, -theta.sin() * norm);
        }
    }
    q
}

/// Spectral derivative on one axis, `D = Q† diag(i k_m) Q`.
pub fn derivative_1d<T: Real>(basis: &Basis<T>) -> CMatrix<T> {
    let q = dft_matrix(basis);
    let mut kq = q.clone();
    for (row, &m) in basis.modes().iter().enumerate() {
        let ik = Complex::new(T::zero(), basis.wavenumber(m));
        for v in kq.row_mut(row) {
            *v *= ik;
        }
    }
    adjoint(&q).dot(&kq)
}

/// Spectral Laplacian on one axis, `Q† diag(−k_m²) Q`.
pub fn laplacian_1d<T: Real>(basis: &Basis<T>) -> CMatrix<T> {
    let q = dft_matrix(basis);
    let mut kq = q.clone();
    for (row, &m) in basis.modes().iter().enumerate() {
        let k = basis.wavenumber(m);
        let neg_k2 = Complex::new(-k * k, T::zero());
        for v in kq.row_mut(row) {
            *v *= neg_k2;
        }
    }
    adjoint(&q).dot(&kq)
}

/// Lifts a one-axis operator to the full tensor grid on the given axis
/// (axis 0 is the slowest index).
pub fn axis_operator<T: Real>(op: &CMatrix<T>, axis: usize, basis: &Basis<T>) -> CMatrix<T> {
    let n = basis.points;
    let dofs = basis.dofs();
    let before = n.pow(axis as u32);
    let after = n.pow((dofs - axis - 1) as u32);
    kron(&kron(&identity_c(before), op), &identity_c(after))
}

// ============================================================================
// Generator assemblies
// ============================================================================

/// Flux-form finite-difference Fokker-Planck generator.
///
/// Per directed link `j → i` the entry is
/// `F_{ij} = β⁻¹Δx⁻² e^{β(V_j − V_i)/2}`, with the same amount subtracted
/// from `F_{jj}`; columns therefore sum to zero identically and the
/// Boltzmann vector `ρ_i ∝ e^{−βV_i}` is stationary exactly.
pub fn build_fke_fd<T: Real>(
    basis: &Basis<T>,
    potential: &Potential<T>,
    beta: T,
) -> Result<RMatrix<T>, DiscretizeError> {
    if basis.scheme != Scheme::FiniteDifference {
        return Err(DiscretizeError::UnsupportedScheme {
            op: "build_fke_fd",
            required: "finite-difference",
        });
    }
    basis.validate()?;
    let dim = basis.total_dim();
    let v = grid_potential_values(basis, potential)?;
    let scale = T::one() / (beta * basis.delta_x() * basis.delta_x());
    let mut f = Array2::zeros((dim, dim));
    for_each_link(basis, |i, j| {
        // Contribution to ρ_i from ρ_j across the shared link.
        let val = scale * ((beta * (v[j] - v[i]) / T::of(2.0)).exp());
        f[[i, j]] += val;
        f[[j, j]] -= val;
    });
    Ok(f)
}

/// Self-adjoint Witten-form generator `H_β`.
///
/// Finite differences: the exact similarity transform of [`build_fke_fd`]
/// (constant off-diagonal `β⁻¹Δx⁻²`, exponentially weighted diagonal),
/// assembled independently; `form` must be [`HbetaForm::GridDiagonal`].
///
/// Plane waves: either `β⁻¹Δ_disc + diag(U_β)` with the Witten potential
/// sampled on the grid, or `−Σ_j A_j†A_j` from [`build_sos`].
pub fn build_hbeta<T: Real>(
    basis: &Basis<T>,
    potential: &Potential<T>,
    beta: T,
    form: HbetaForm,
) -> Result<CMatrix<T>, DiscretizeError> {
    basis.validate()?;
    match (basis.scheme, form) {
        (Scheme::FiniteDifference, HbetaForm::GridDiagonal) => {
            let dim = basis.total_dim();
            let v = grid_potential_values(basis, potential)?;
            let scale = T::one() / (beta * basis.delta_x() * basis.delta_x());
            let mut h = Array2::zeros((dim, dim));
            for_each_link(basis, |i, j| {
                h[[i, j]] += Complex::new(scale, T::zero());
                h[[j, j]] -= Complex::new(
                    scale * ((beta * (v[j] - v[i]) / T::of(2.0)).exp()),
                    T::zero(),
                );
            });
            Ok(h)
        }
        (Scheme::FiniteDifference, HbetaForm::SosConsistent) => {
            Err(DiscretizeError::UnsupportedScheme {
                op: "build_hbeta(SosConsistent)",
                required: "plane-wave",
            })
        }
        (Scheme::PlaneWave, HbetaForm::GridDiagonal) => {
            let dim = basis.total_dim();
            let lap = laplacian_1d(basis);
            let mut h: CMatrix<T> = Array2::zeros((dim, dim));
            for axis in 0..basis.dofs() {
                let lifted = axis_operator(&lap, axis, basis);
                let inv_beta = Complex::new(T::one() / beta, T::zero());
                h.zip_mut_with(&lifted, |acc, &l| *acc += l * inv_beta);
            }
            for p in 0..dim {
                let u = potential.witten_u(beta, &basis.grid_point(p))?;
                h[[p, p]] += Complex::new(u, T::zero());
            }
            Ok(h)
        }
        (Scheme::PlaneWave, HbetaForm::SosConsistent) => {
            let a_list = build_sos(basis, potential, beta)?;
            let dim = basis.total_dim();
            let mut h: CMatrix<T> = Array2::zeros((dim, dim));
            for a in &a_list {
                let ata = adjoint(a).dot(a);
                h.zip_mut_with(&ata, |acc, &x| *acc -= x);
            }
            Ok(h)
        }
    }
}

/// Sum-of-squares factors `A_j = −i(β^{−1/2}∂_j − (√β/2)F_j)` on a
/// plane-wave basis, one per degree of freedom, with the force `F_j = −∂_jV`
/// applied as a grid diagonal.
pub fn build_sos<T: Real>(
    basis: &Basis<T>,
    potential: &Potential<T>,
    beta: T,
) -> Result<Vec<CMatrix<T>>, DiscretizeError> {
    if basis.scheme != Scheme::PlaneWave {
        return Err(DiscretizeError::UnsupportedScheme {
            op: "build_sos",
            required: "plane-wave",
        });
    }
    basis.validate()?;
    let dim = basis.total_dim();
    let dofs = basis.dofs();
    let a_coef = T::one() / beta.sqrt();
    let b_coef = beta.sqrt() / T::of(2.0);
    // Force components on the grid: F_j(x) = −(∇V)_j.
    let mut forces = vec![vec![T::zero(); dim]; dofs];
    for p in 0..dim {
        let g = potential.gradient(&basis.grid_point(p))?;
        for (j, gj) in g.iter().enumerate() {
            forces[j][p] = -*gj;
        }
    }
    let d1 = derivative_1d(basis);
    let minus_i_a = Complex::new(T::zero(), -a_coef);
    let mut out = Vec::with_capacity(dofs);
    for (j, force) in forces.iter().enumerate() {
        let deriv = axis_operator(&d1, j, basis);
        // A_j = −i·a·D_j + i·b·diag(F_j).
        let mut a = deriv.mapv(|z| z * minus_i_a);
        for (p, &fp) in force.iter().enumerate() {
            a[[p, p]] += Complex::new(T::zero(), b_coef * fp);
        }
        out.push(a);
    }
    Ok(out)
}

/// Hermitian dilation `𝒜 = [[0, B†], [B, 0]]` of the stacked factors
/// `B = [A_1; …; A_m]`, with the system block first (block index 0).
///
/// `−𝒜²` is block diagonal with top-left block `−Σ_j A_j†A_j` exactly.
///
/// ```
/// use fpflux_core::discretize::build_dilated_sqrt;
/// use ndarray::array;
/// use num_complex::Complex;
///
/// let a = array![[Complex::new(1.0, 0.0)]];
/// let script_a = build_dilated_sqrt(&[a]).unwrap();
/// assert_eq!(script_a[[0, 1]], Complex::new(1.0, 0.0));
/// assert_eq!(script_a[[1, 0]], Complex::new(1.0, 0.0));
/// assert_eq!(script_a[[0, 0]], Complex::new(0.0, 0.0));
/// ```
pub fn build_dilated_sqrt<T: Real>(
    a_list: &[CMatrix<T>],
) -> Result<CMatrix<T>, DiscretizeError> {
    let m = a_list.len();
    if m == 0 {
        return Err(DiscretizeError::RaggedBlocks);
    }
    let n = a_list[0].nrows();
    for a in a_list {
        if a.nrows() != n || a.ncols() != n {
            return Err(DiscretizeError::RaggedBlocks);
        }
    }
    let total = (m + 1) * n;
    let mut script: CMatrix<T> = Array2::zeros((total, total));
    for (j, a) in a_list.iter().enumerate() {
        let off = (j + 1) * n;
        for r in 0..n {
            for c in 0..n {
                script[[off + r, c]] = a[[r, c]];
                script[[c, off + r]] = a[[r, c]].conj();
            }
        }
    }
    Ok(script)
}

// ============================================================================
// Operator sets
// ============================================================================

/// Assembled operators for one `(potential, β, basis)` triple; immutable and
/// shareable once built.
#[derive(Debug, Clone)]
pub struct OperatorSet<T: Real> {
    /// The basis everything was assembled on.
    pub basis: Basis<T>,
    /// Fokker-Planck generator (finite-difference scheme only).
    pub fke: Option<RMatrix<T>>,
    /// Self-adjoint generator `H_β` (sum-of-squares form on plane waves).
    pub h_beta: CMatrix<T>,
    /// Sum-of-squares factors (plane-wave scheme only).
    pub a_list: Vec<CMatrix<T>>,
    /// Hermitian dilation `𝒜` (plane-wave scheme only).
    pub script_a: Option<CMatrix<T>>,
}

/// Builds the full operator set for the basis scheme.
pub fn assemble_operator_set<T: Real>(
    basis: &Basis<T>,
    potential: &Potential<T>,
    beta: T,
) -> Result<OperatorSet<T>, DiscretizeError> {
    match basis.scheme {
        Scheme::FiniteDifference => Ok(OperatorSet {
            basis: basis.clone(),
            fke: Some(build_fke_fd(basis, potential, beta)?),
            h_beta: build_hbeta(basis, potential, beta, HbetaForm::GridDiagonal)?,
            a_list: Vec::new(),
            script_a: None,
        }),
        Scheme::PlaneWave => {
            let a_list = build_sos(basis, potential, beta)?;
            let dim = basis.total_dim();
            let mut h: CMatrix<T> = Array2::zeros((dim, dim));
            for a in &a_list {
                let ata = adjoint(a).dot(a);
                h.zip_mut_with(&ata, |acc, &x| *acc -= x);
            }
            let script_a = build_dilated_sqrt(&a_list)?;
            Ok(OperatorSet {
                basis: basis.clone(),
                fke: None,
                h_beta: h,
                a_list,
                script_a: Some(script_a),
            })
        }
    }
}

// ============================================================================
// Portable exports
// ============================================================================

/// Renders a complex matrix in matrix-market array format (column-major
/// `re im` lines), suitable for cross-checking in other tools.
pub fn matrix_market<T: Real>(m: &CMatrix<T>, comment: &str) -> String {
    let mut out = String::new();
    out.push_str("%%MatrixMarket matrix array complex general\n");
    if !comment.is_empty() {
        out.push_str(&format!("% {comment}\n"));
    }
    out.push_str(&format!("{} {}\n", m.nrows(), m.ncols()));
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            let z = m[[r, c]];
            out.push_str(&format!("{:e} {:e}\n", z.re, z.im));
        }
    }
    out
}

/// Serializes a complex matrix to a little-endian binary container:
/// magic `FPMX`, `u64` rows, `u64` cols, then row-major `(re, im)` pairs
/// as `f64`.
pub fn matrix_bytes<T: Real>(m: &CMatrix<T>) -> Vec<u8> {
    let mut out = Vec::with_capacity(20 + 16 * m.len());
    out.extend_from_slice(b"FPMX");
    out.extend_from_slice(&(m.nrows() as u64).to_le_bytes());
    out.extend_from_slice(&(m.ncols() as u64).to_le_bytes());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            out.extend_from_slice(&m[[r, c]].re.as_f64().to_le_bytes());
            out.extend_from_slice(&m[[r, c]].im.as_f64().to_le_bytes());
        }
    }
    out
}

// ============================================================================
// Grid topology
// ============================================================================

/// Visits every directed nearest-neighbor link `j → i` of the tensor grid,
/// respecting the boundary closure.
fn for_each_link<T: Real>(basis: &Basis<T>, mut visit: impl FnMut(usize, usize)) {
    let n = basis.points;
    let dofs = basis.dofs();
    let dim = basis.total_dim();
    for j in 0..dim {
        for axis in 0..dofs {
            let stride = n.pow((dofs - axis - 1) as u32);
            let idx = (j / stride) % n;
            for dir in [-1i64, 1] {
                let neighbor = idx as i64 + dir;
                let wrapped = match basis.boundary {
                    Boundary::Periodic => neighbor.rem_euclid(n as i64) as usize,
                    Boundary::Reflecting => {
                        if neighbor < 0 || neighbor >= n as i64 {
                            continue;
                        }
                        neighbor as usize
                    }
                };
                visit(j - idx * stride + wrapped * stride, j);
            }
        }
    }
}
