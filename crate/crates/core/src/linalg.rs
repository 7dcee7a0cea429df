//! Dense complex linear algebra tuned for the operator sizes of this crate.
//!
//! Every discretized generator handled here is Hermitian (or built from
//! Hermitian blocks), so the central routine is [`hermitian_eig`]: a
//! Householder tridiagonalization of the complex matrix, a diagonal phase
//! transform making the subdiagonal real, and an implicit-shift QL sweep
//! that accumulates eigenvectors. Matrix functions (`e^{tH}`, `e^{−ik𝒜}`,
//! PSD square roots, operator norms) are then spectral one-liners.
//!
//! The solver is deliberately dependency-free: the matrices are dense, at
//! most a few thousand rows, and complex-valued — a regime where a careful
//! `O(n³)` textbook implementation is fast enough for the whole test suite
//! while keeping the numerics auditable end to end.
//!
//! # Example
//!
//! ```
//! use fpflux_core::linalg::{hermitian_eig, hermiticity_defect};
//! use fpflux_core::CMat;
//! use num_complex::Complex;
//!
//! // A 2×2 Hermitian matrix with known spectrum {−1, 1}: the Pauli-Y matrix.
//! let i = Complex::new(0.0, 1.0);
//! let h = CMat::from_shape_vec((2, 2), vec![
//!     Complex::new(0.0, 0.0), -i,
//!     i, Complex::new(0.0, 0.0),
//! ]).unwrap();
//! assert!(hermiticity_defect(&h) == 0.0);
//! let (vals, _) = hermitian_eig(&h).unwrap();
//! approx::assert_abs_diff_eq!(vals[0], -1.0, epsilon = 1e-14);
//! approx::assert_abs_diff_eq!(vals[1], 1.0, epsilon = 1e-14);
//! ```

use crate::scalar::Real;
use crate::{CMatrix, CVector, RMatrix, RVector};
use ndarray::{Array1, Array2};
use num_complex::Complex;
use num_traits::{One, Zero};
use thiserror::Error;

// ============================================================================
// Errors
// ============================================================================

/// Failures of the dense solvers.
#[derive(Debug, Error)]
pub enum LinalgError {
    /// The operation requires a square matrix.
    #[error("expected a square matrix, got {rows}×{cols}")]
    NonSquare {
        /// Number of rows received.
        rows: usize,
        /// Number of columns received.
        cols: usize,
    },
    /// The matrix is too far from Hermitian for a symmetric eigensolve.
    #[error("matrix is not Hermitian: defect {defect:.3e} exceeds {tolerance:.3e}")]
    NonHermitian {
        /// Largest entry of `|A − A†|`.
        defect: f64,
        /// Tolerance the defect was compared against.
        tolerance: f64,
    },
    /// The QL iteration failed to deflate an eigenvalue.
    #[error("eigenvalue iteration failed to converge at index {index}")]
    NoConvergence {
        /// Row index whose off-diagonal entry would not deflate.
        index: usize,
    },
    /// A non-finite entry was encountered.
    #[error("matrix contains a non-finite entry")]
    NonFinite,
}

// ============================================================================
// Construction and elementwise helpers
// ============================================================================

/// Complex identity matrix of size `n`.
pub fn identity_c<T: Real>(n: usize) -> CMatrix<T> {
    let mut m = Array2::zeros((n, n));
    for i in 0..n {
        m[[i, i]] = Complex::one();
    }
    m
}

/// Widens a real matrix into a complex one.
pub fn to_complex<T: Real>(a: &RMatrix<T>) -> CMatrix<T> {
    a.mapv(|x| Complex::new(x, T::zero()))
}

/// Conjugate transpose `A†`.
pub fn adjoint<T: Real>(a: &CMatrix<T>) -> CMatrix<T> {
    let (rows, cols) = a.dim();
    Array2::from_shape_fn((cols, rows), |(i, j)| a[[j, i]].conj())
}

/// Kronecker product `A ⊗ B`.
///
/// Index convention: the first factor is the slow axis, so
/// `(A ⊗ B)[i·p + k, j·q + l] = A[i,j]·B[k,l]` for `B` of shape `p×q`.
pub fn kron<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    let (am, an) = a.dim();
    let (bm, bn) = b.dim();
    let mut out = Array2::zeros((am * bm, an * bn));
    for i in 0..am {
        for j in 0..an {
            let aij = a[[i, j]];
            for k in 0..bm {
                for l in 0..bn {
                    out[[i * bm + k, j * bn + l]] = aij * b[[k, l]];
                }
            }
        }
    }
    out
}

/// Largest entry magnitude `max_{ij} |A_{ij}|`.
pub fn max_abs_entry<T: Real>(a: &CMatrix<T>) -> T {
    a.iter().map(|z| z.norm()).fold(T::zero(), T::max)
}

/// Frobenius norm `‖A‖_F`.
pub fn frobenius_norm<T: Real>(a: &CMatrix<T>) -> T {
    a.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// Largest entry of `|A − A†|`; zero exactly when `A` is Hermitian.
pub fn hermiticity_defect<T: Real>(a: &CMatrix<T>) -> T {
    let (rows, cols) = a.dim();
    if rows != cols {
        return T::infinity();
    }
    let mut worst = T::zero();
    for i in 0..rows {
        for j in i..cols {
            let d = (a[[i, j]] - a[[j, i]].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

/// Largest entry of `|U†U − I|`; zero exactly when `U` is unitary.
pub fn unitarity_defect<T: Real>(u: &CMatrix<T>) -> T {
    let n = u.dim().1;
    let gram = adjoint(u).dot(u);
    let mut worst = T::zero();
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { Complex::one() } else { Complex::zero() };
            worst = worst.max((gram[[i, j]] - target).norm());
        }
    }
    worst
}

// ============================================================================
// Vector helpers
// ============================================================================

/// Euclidean norm of a complex vector.
pub fn vec_norm<T: Real>(v: &CVector<T>) -> T {
    v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// Inner product `⟨a|b⟩ = Σ_i conj(a_i)·b_i`, conjugate-linear in `a`.
pub fn vec_inner<T: Real>(a: &CVector<T>, b: &CVector<T>) -> Complex<T> {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b.iter())
        .fold(Complex::zero(), |acc, (x, y)| acc + x.conj() * *y)
}

/// Returns `v / ‖v‖`; the zero vector is returned unchanged.
pub fn normalized<T: Real>(v: &CVector<T>) -> CVector<T> {
    let n = vec_norm(v);
    if n > T::zero() {
        v.mapv(|z| z / n)
    } else {
        v.clone()
    }
}

// ============================================================================
// Hermitian eigendecomposition
// ============================================================================

/// Relative Hermiticity tolerance accepted by [`hermitian_eig`].
const HERMITICITY_RTOL: f64 = 1e-8;

/// Full eigendecomposition of a Hermitian matrix.
///
/// Returns `(λ, Q)` with eigenvalues ascending and eigenvectors as the
/// columns of `Q`, so `A = Q·diag(λ)·Q†`. The input may deviate from exact
/// Hermiticity by rounding noise (it is symmetrized internally); a defect
/// beyond `1e-8` relative to the largest entry is rejected.
///
/// # Example
///
/// ```
/// use fpflux_core::linalg::hermitian_eig;
/// use fpflux_core::CMat;
/// use num_complex::Complex;
///
/// let h = CMat::from_shape_vec((2, 2), vec![
///     Complex::new(2.0, 0.0), Complex::new(1.0, 0.0),
///     Complex::new(1.0, 0.0), Complex::new(2.0, 0.0),
/// ]).unwrap();
/// let (vals, vecs) = hermitian_eig(&h).unwrap();
/// approx::assert_abs_diff_eq!(vals[0], 1.0, epsilon = 1e-14);
/// approx::assert_abs_diff_eq!(vals[1], 3.0, epsilon = 1e-14);
/// // Columns are orthonormal eigenvectors.
/// let q0 = vecs.column(0);
/// approx::assert_abs_diff_eq!(q0[0].norm(), (0.5f64).sqrt(), epsilon = 1e-14);
/// ```
pub fn hermitian_eig<T: Real>(
    a: &CMatrix<T>,
) -> Result<(RVector<T>, CMatrix<T>), LinalgError> {
    let (rows, cols) = a.dim();
    if rows != cols {
        return Err(LinalgError::NonSquare { rows, cols });
    }
    let n = rows;
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(LinalgError::NonFinite);
    }
    let scale = max_abs_entry(a).max(T::one());
    let defect = hermiticity_defect(a);
    let tolerance = T::of(HERMITICITY_RTOL) * scale;
    if defect > tolerance {
        return Err(LinalgError::NonHermitian {
            defect: defect.as_f64(),
            tolerance: tolerance.as_f64(),
        });
    }
    if n == 0 {
        return Ok((Array1::zeros(0), Array2::zeros((0, 0))));
    }
    let magnitude = max_abs_entry(a);
    if magnitude == T::zero() {
        return Ok((Array1::zeros(n), identity_c::<T>(n)));
    }

    // Work on a symmetrized, unit-scaled copy: symmetrizing keeps rounding
    // noise from leaking through, and normalizing by the largest entry keeps
    // the QL recurrences away from the denormal range for tiny inputs.
    let mut m: CMatrix<T> = Array2::from_shape_fn((n, n), |(i, j)| {
        (a[[i, j]] + a[[j, i]].conj()) / (Complex::new(magnitude, T::zero()) * T::of(2.0))
    });
    let mut q = identity_c::<T>(n);

    householder_tridiagonalize(&mut m, &mut q);

    // Extract the tridiagonal data and rotate the subdiagonal real.
    let mut d: Vec<T> = (0..n).map(|i| m[[i, i]].re).collect();
    let mut e: Vec<T> = vec![T::zero(); n];
    // Column i of Q absorbs the phase accumulated up to row i, making the
    // subdiagonal real without changing A = Q·T·Q†.
    let mut phase: Complex<T> = Complex::one();
    for i in 0..n.saturating_sub(1) {
        let sub = m[[i + 1, i]];
        let r = sub.norm();
        e[i] = r;
        let next_phase = if r > T::zero() {
            phase * (sub / Complex::new(r, T::zero()))
        } else {
            phase
        };
        scale_column(&mut q, i, phase);
        phase = next_phase;
        if i + 1 == n - 1 {
            scale_column(&mut q, i + 1, phase);
        }
    }

    ql_implicit_shift(&mut d, &mut e, &mut q)?;

    // Sort ascending, permuting eigenvector columns alongside, and undo the
    // unit scaling.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).expect("eigenvalues are finite"));
    let vals = Array1::from_iter(order.iter().map(|&i| d[i] * magnitude));
    let mut vecs = Array2::zeros((n, n));
    for (new_col, &old_col) in order.iter().enumerate() {
        for r in 0..n {
            vecs[[r, new_col]] = q[[r, old_col]];
        }
    }
    Ok((vals, vecs))
}

/// Multiplies column `col` of `m` by the unit-modulus factor `phase`.
fn scale_column<T: Real>(m: &mut CMatrix<T>, col: usize, phase: Complex<T>) {
    let n = m.dim().0;
    for r in 0..n {
        m[[r, col]] = m[[r, col]] * phase;
    }
}

/// Householder reduction of a Hermitian matrix to tridiagonal form.
///
/// On exit `m` is tridiagonal (entries outside the three bands are rounding
/// residue and must be ignored) and `q` has been right-multiplied by the
/// product of reflectors, so the input satisfies `A = q·m·q†`.
fn householder_tridiagonalize<T: Real>(m: &mut CMatrix<T>, q: &mut CMatrix<T>) {
    let n = m.dim().0;
    let mut v: Vec<Complex<T>> = vec![Complex::zero(); n];
    let mut p: Vec<Complex<T>> = vec![Complex::zero(); n];
    for k in 0..n.saturating_sub(2) {
        // Norm of the column strictly below the subdiagonal target.
        let mut xnorm_sqr = T::zero();
        for i in k + 1..n {
            xnorm_sqr += m[[i, k]].norm_sqr();
        }
        let xnorm = xnorm_sqr.sqrt();
        let mut tail_sqr = T::zero();
        for i in k + 2..n {
            tail_sqr += m[[i, k]].norm_sqr();
        }
        if tail_sqr == T::zero() {
            continue; // Already tridiagonal in this column.
        }

        // Reflector v = x − α e₁ with α chosen to avoid cancellation.
        let x0 = m[[k + 1, k]];
        let phase = if x0.norm() > T::zero() {
            x0 / Complex::new(x0.norm(), T::zero())
        } else {
            Complex::one()
        };
        let alpha = -phase * xnorm;
        for slot in v.iter_mut() {
            *slot = Complex::zero();
        }
        for i in k + 1..n {
            v[i] = m[[i, k]];
        }
        v[k + 1] = v[k + 1] - alpha;
        let vnorm_sqr: T = v[k + 1..].iter().map(|z| z.norm_sqr()).sum();
        if vnorm_sqr <= T::zero() {
            continue;
        }
        let tau = T::of(2.0) / vnorm_sqr;

        // Hermitian rank-2 update M ← M − w v† − v w†,
        // where p = τ·M·v, K = (τ/2)·v†p, w = p − K·v. Rows above k are
        // already reduced, so p vanishes there and the update is confined
        // to the trailing block plus row/column k.
        for slot in p.iter_mut().take(k) {
            *slot = Complex::zero();
        }
        for i in k..n {
            let mut acc: Complex<T> = Complex::zero();
            for j in k + 1..n {
                acc = acc + m[[i, j]] * v[j];
            }
            p[i] = acc * tau;
        }
        let vtp: Complex<T> = v[k + 1..]
            .iter()
            .zip(&p[k + 1..])
            .fold(Complex::zero(), |acc, (vi, pi)| acc + vi.conj() * *pi);
        let kappa = vtp * (tau / T::of(2.0));
        // Reuse p as w.
        for i in k..n {
            p[i] = p[i] - kappa * v[i];
        }
        for i in k..n {
            let wi = p[i];
            let vi = v[i];
            for j in k + 1..n {
                let upd = wi * v[j].conj() + vi * p[j].conj();
                m[[i, j]] = m[[i, j]] - upd;
            }
        }
        // Columns 0..=k of the trailing update are touched only through the
        // reflected column k; mirror the affected column/row explicitly.
        for i in k + 1..n {
            let upd = p[i] * v[k].conj() + v[i] * p[k].conj();
            let new = m[[i, k]] - upd;
            m[[i, k]] = new;
            m[[k, i]] = new.conj();
        }

        // Accumulate Q ← Q·(I − τ v v†).
        for r in 0..n {
            let mut s = Complex::zero();
            for j in k + 1..n {
                s = s + q[[r, j]] * v[j];
            }
            let s_tau = s * tau;
            for j in k + 1..n {
                q[[r, j]] = q[[r, j]] - s_tau * v[j].conj();
            }
        }
    }
}

/// Implicit-shift QL iteration on a real symmetric tridiagonal matrix,
/// accumulating the rotations into the complex columns of `z`.
fn ql_implicit_shift<T: Real>(
    d: &mut [T],
    e: &mut [T],
    z: &mut CMatrix<T>,
) -> Result<(), LinalgError> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    let eps = T::epsilon();
    let two = T::of(2.0);
    // Absolute deflation floor: the relative criterion below stalls when two
    // adjacent diagonal entries are far beneath the matrix norm while the
    // coupling sits at the rounding floor, so anything under eps·‖T‖ is
    // negligible at the accuracy an eps-scaled similarity chain can deliver.
    let mut anorm = T::zero();
    for i in 0..n {
        anorm = anorm.max(d[i].abs() + e[i].abs());
    }
    let floor = eps * anorm;
    for l in 0..n {
        let mut iter = 0usize;
        loop {
            // Find the first negligible off-diagonal at or after l.
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 80 {
                return Err(LinalgError::NoConvergence { index: l });
            }

            // Wilkinson-style shift from the leading 2×2.
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            let sign_r = if g >= T::zero() { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / (g + sign_r);
            let mut s = T::one();
            let mut c = T::one();
            let mut p = T::zero();
            let mut underflow = false;

            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;

                // Rotate eigenvector columns i and i+1 (real Givens acting
                // on complex columns).
                let nrows = z.dim().0;
                for k in 0..nrows {
                    let zk1 = z[[k, i + 1]];
                    let zk0 = z[[k, i]];
                    z[[k, i + 1]] = zk0 * s + zk1 * c;
                    z[[k, i]] = zk0 * c - zk1 * s;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}

// ============================================================================
// Spectral matrix functions
// ============================================================================

/// Applies a scalar→complex function to a Hermitian matrix spectrally:
/// `f(A) = Q·diag(f(λ))·Q†`.
///
/// This is the workhorse behind `e^{tH}`, `e^{−ik𝒜}`, and friends; the
/// eigendecomposition is recomputed per call, so batch work should decompose
/// once and use [`spectral_apply`] / [`spectral_matrix`] directly.
pub fn hermitian_matfun_c<T: Real>(
    a: &CMatrix<T>,
    f: impl Fn(T) -> Complex<T>,
) -> Result<CMatrix<T>, LinalgError> {
    let (vals, vecs) = hermitian_eig(a)?;
    Ok(spectral_matrix(&vals, &vecs, f))
}

/// Applies a real scalar function to a Hermitian matrix spectrally.
pub fn hermitian_matfun<T: Real>(
    a: &CMatrix<T>,
    f: impl Fn(T) -> T,
) -> Result<CMatrix<T>, LinalgError> {
    hermitian_matfun_c(a, |x| Complex::new(f(x), T::zero()))
}

/// Rebuilds `Q·diag(f(λ))·Q†` from a precomputed eigendecomposition.
pub fn spectral_matrix<T: Real>(
    vals: &RVector<T>,
    vecs: &CMatrix<T>,
    f: impl Fn(T) -> Complex<T>,
) -> CMatrix<T> {
    let n = vals.len();
    let mut scaled = vecs.clone();
    for j in 0..n {
        let fj = f(vals[j]);
        for i in 0..n {
            scaled[[i, j]] = scaled[[i, j]] * fj;
        }
    }
    scaled.dot(&adjoint(vecs))
}

/// Applies `Q·diag(f(λ))·Q†` to a single vector without forming the matrix.
pub fn spectral_apply<T: Real>(
    vals: &RVector<T>,
    vecs: &CMatrix<T>,
    f: impl Fn(T) -> Complex<T>,
    v: &CVector<T>,
) -> CVector<T> {
    let n = vals.len();
    debug_assert_eq!(v.len(), n);
    // c = Q† v
    let mut c: CVector<T> = Array1::zeros(n);
    for j in 0..n {
        let mut acc: Complex<T> = Complex::zero();
        for i in 0..n {
            acc = acc + vecs[[i, j]].conj() * v[i];
        }
        c[j] = acc * f(vals[j]);
    }
    // out = Q c
    let mut out: CVector<T> = Array1::zeros(n);
    for i in 0..n {
        let mut acc: Complex<T> = Complex::zero();
        for j in 0..n {
            acc = acc + vecs[[i, j]] * c[j];
        }
        out[i] = acc;
    }
    out
}

/// Positive-semidefinite square root of a Hermitian PSD matrix.
///
/// Small negative eigenvalues from rounding are clamped to zero, so the
/// result is always well defined for numerically PSD inputs.
pub fn psd_sqrt<T: Real>(a: &CMatrix<T>) -> Result<CMatrix<T>, LinalgError> {
    hermitian_matfun(a, |x| x.max(T::zero()).sqrt())
}

// ============================================================================
// Operator norms
// ============================================================================

/// Spectral norm (largest singular value) of an arbitrary square matrix,
/// computed as `√λ_max(A†A)`.
pub fn op_norm_2<T: Real>(a: &CMatrix<T>) -> Result<T, LinalgError> {
    let gram = adjoint(a).dot(a);
    let (vals, _) = hermitian_eig(&gram)?;
    let top = vals[vals.len() - 1].max(T::zero());
    Ok(top.sqrt())
}

/// Spectral norm of a Hermitian matrix, `max_i |λ_i|`.
pub fn op_norm_hermitian<T: Real>(a: &CMatrix<T>) -> Result<T, LinalgError> {
    let (vals, _) = hermitian_eig(a)?;
    Ok(vals.iter().fold(T::zero(), |acc, &x| acc.max(x.abs())))
}
