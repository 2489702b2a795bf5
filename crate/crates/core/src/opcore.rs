//! Operator utilities on finite-dimensional Hilbert spaces.
//!
//! Everything here is built on one primitive, the Hermitian
//! eigendecomposition: square roots, Moore–Penrose pseudo-inverses and range
//! projectors are spectral functions. The minimal-contraction factorization
//! of a nonnegative 2×2 block operator and its Schur complement sit on top.
//!
//! Rank decisions compare eigenvalues against `rank_tol * lambda_max`.
//! Eigenvalues with `|lambda| <= rank_tol * lambda_max` are treated as exact
//! zeros everywhere in this module, so that the square root and the
//! pseudo-inverse of an operator always agree on its range.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    block2x2, identity, max_abs_entry, quadratic_form, spectral_norm, CMatrix, CVector, Spectrum,
};

/// Default relative asymmetry accepted by [`HermitianOperator::new`].
pub const DEFAULT_HERM_TOL: f64 = 1e-12;

/// Safety factor over `n * eps` for default rank decisions.
const RANK_TOL_FACTOR: f64 = 100.0;

/// Default relative rank tolerance for an operator of dimension `n`.
pub fn default_rank_tol(n: usize) -> f64 {
    RANK_TOL_FACTOR * (n.max(1) as f64) * f64::EPSILON
}

/// A selfadjoint operator on `C^dim`.
///
/// The stored matrix is exactly Hermitian (it is symmetrized on
/// construction after the asymmetry check).
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    entries: CMatrix,
}

impl HermitianOperator {
    pub fn new(entries: CMatrix) -> Result<Self> {
        Self::with_tolerance(entries, DEFAULT_HERM_TOL)
    }

    pub fn with_tolerance(entries: CMatrix, herm_tol: f64) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "Hermitian operator must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if !crate::linalg::all_finite(&entries) {
            return Err(Error::NonFinite("Hermitian operator".into()));
        }
        let asymmetry = max_abs_entry(&(&entries - entries.adjoint()));
        let threshold = herm_tol * max_abs_entry(&entries);
        if asymmetry > threshold {
            return Err(Error::NotHermitian { asymmetry, threshold });
        }
        Ok(Self::from_hermitian_part(&entries))
    }

    /// Symmetrizes `m` unconditionally. For internal products that are
    /// Hermitian up to roundoff.
    pub fn from_hermitian_part(m: &CMatrix) -> Self {
        HermitianOperator { entries: crate::linalg::hermitian_part(m) }
    }

    pub fn identity(n: usize) -> Self {
        HermitianOperator { entries: identity(n) }
    }

    pub fn zeros(n: usize) -> Self {
        HermitianOperator { entries: CMatrix::zeros(n, n) }
    }

    pub fn from_real_diag(values: &[f64]) -> Self {
        HermitianOperator { entries: crate::linalg::real_diag(values) }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum::of(&self.entries)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.spectrum().min()
    }

    /// Operator norm (largest absolute eigenvalue).
    pub fn norm(&self) -> f64 {
        self.spectrum().norm()
    }

    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|z| z.re).sum()
    }
}

/// The block operator `T = [[alpha, beta], [beta*, delta]]` on `X ⊕ U`.
#[derive(Clone, Debug)]
pub struct BlockNonneg {
    pub alpha: HermitianOperator,
    /// Operator `U -> X`, shape `n x m`.
    pub beta: CMatrix,
    pub delta: HermitianOperator,
}

impl BlockNonneg {
    pub fn new(alpha: HermitianOperator, beta: CMatrix, delta: HermitianOperator) -> Result<Self> {
        if beta.nrows() != alpha.dim() || beta.ncols() != delta.dim() {
            return Err(Error::DimensionMismatch(format!(
                "beta is {}x{}, expected {}x{}",
                beta.nrows(),
                beta.ncols(),
                alpha.dim(),
                delta.dim()
            )));
        }
        Ok(BlockNonneg { alpha, beta, delta })
    }

    /// Splits a Hermitian operator on `C^(n+m)` after its first `n` coordinates.
    pub fn split(t: &HermitianOperator, n: usize) -> Result<Self> {
        let total = t.dim();
        if n > total {
            return Err(Error::DimensionMismatch(format!("cannot split {total} at {n}")));
        }
        let m = total - n;
        let mat = t.matrix();
        Ok(BlockNonneg {
            alpha: HermitianOperator::from_hermitian_part(&mat.view((0, 0), (n, n)).into_owned()),
            beta: mat.view((0, n), (n, m)).into_owned(),
            delta: HermitianOperator::from_hermitian_part(&mat.view((n, n), (m, m)).into_owned()),
        })
    }

    pub fn x_dim(&self) -> usize {
        self.alpha.dim()
    }

    pub fn u_dim(&self) -> usize {
        self.delta.dim()
    }

    pub fn assemble(&self) -> HermitianOperator {
        HermitianOperator::from_hermitian_part(&block2x2(
            self.alpha.matrix(),
            &self.beta,
            &self.beta.adjoint(),
            self.delta.matrix(),
        ))
    }

    /// `<T [x; u], [x; u]>`.
    pub fn form(&self, x: &CVector, u: &CVector) -> f64 {
        let ax = quadratic_form(self.alpha.matrix(), x);
        let du = quadratic_form(self.delta.matrix(), u);
        let cross = (x.adjoint() * &self.beta * u)[(0, 0)].re;
        ax + 2.0 * cross + du
    }

    fn check_nonneg(&self, rank_tol: f64) -> Result<()> {
        let spec = self.assemble().spectrum();
        if spec.min() < -rank_tol * spec.norm() {
            return Err(Error::NotNonneg { min_eig: spec.min() });
        }
        Ok(())
    }
}

/// Minimal contraction `gamma: X -> U` and Schur complement supported by `X`.
#[derive(Clone, Debug)]
pub struct SchurFactorization {
    pub gamma: CMatrix,
    pub complement: HermitianOperator,
    pub rank_alpha: usize,
    pub rank_delta: usize,
    /// `‖beta* - delta^{1/2} gamma alpha^{1/2}‖`.
    pub residual: f64,
}

/// Outcome of a Loewner-order comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LoewnerOrder {
    LessEq,
    GreaterEq,
    Equal,
    Incomparable,
}

impl LoewnerOrder {
    pub fn reversed(self) -> Self {
        match self {
            LoewnerOrder::LessEq => LoewnerOrder::GreaterEq,
            LoewnerOrder::GreaterEq => LoewnerOrder::LessEq,
            other => other,
        }
    }
}

fn psd_spectrum(a: &HermitianOperator, rank_tol: f64) -> Result<(Spectrum, f64)> {
    let spec = a.spectrum();
    let threshold = rank_tol * spec.norm();
    if spec.min() < -threshold {
        return Err(Error::NotPsd { min_eig: spec.min(), threshold });
    }
    Ok((spec, threshold))
}

/// Unique positive semidefinite square root.
pub fn psd_sqrt(a: &HermitianOperator, rank_tol: f64) -> Result<HermitianOperator> {
    let (spec, threshold) = psd_spectrum(a, rank_tol)?;
    Ok(HermitianOperator::from_hermitian_part(
        &spec.map(|v| if v > threshold { v.sqrt() } else { 0.0 }),
    ))
}

/// Moore–Penrose pseudo-inverse of a positive semidefinite operator.
pub fn psd_pseudo_inverse(a: &HermitianOperator, rank_tol: f64) -> Result<HermitianOperator> {
    let (spec, threshold) = psd_spectrum(a, rank_tol)?;
    Ok(HermitianOperator::from_hermitian_part(
        &spec.map(|v| if v > threshold { 1.0 / v } else { 0.0 }),
    ))
}

/// Inverts eigenvalues above `threshold` and zeros the rest, without a
/// definiteness check. Used where the caller has already classified the
/// spectrum with its own (absolute) threshold.
pub fn thresholded_pseudo_inverse(a: &HermitianOperator, threshold: f64) -> HermitianOperator {
    let spec = a.spectrum();
    HermitianOperator::from_hermitian_part(&spec.map(|v| if v > threshold { 1.0 / v } else { 0.0 }))
}

/// Orthogonal projector onto the span of eigenvectors with eigenvalue above
/// `threshold`.
pub fn range_projector(a: &HermitianOperator, threshold: f64) -> CMatrix {
    let spec = a.spectrum();
    spec.map(|v| if v > threshold { 1.0 } else { 0.0 })
}

/// `‖(A^{1/2})^{[-1]} - (A^{[-1]})^{1/2}‖` with the default rank tolerance.
pub fn sqrt_pinv_commute_check(a: &HermitianOperator) -> Result<f64> {
    let tol = default_rank_tol(a.dim());
    let lhs = psd_pseudo_inverse(&psd_sqrt(a, tol)?, tol)?;
    let rhs = psd_sqrt(&psd_pseudo_inverse(a, tol)?, tol)?;
    Ok(spectral_norm(&(lhs.matrix() - rhs.matrix())))
}

/// Threshold for the factorization residual: noise at the rank tolerance
/// level in `alpha` or `delta` moves `beta` by its square root.
fn factor_residual_threshold(rank_tol: f64, scale: f64) -> f64 {
    rank_tol.sqrt() * (1.0 + scale)
}

/// Minimal contraction and Schur complement of a nonnegative block operator.
///
/// `gamma = (delta^{1/2})^{[-1]} beta* (alpha^{1/2})^{[-1]}`, restricted to
/// `closure(range delta)` on the left and `closure(range alpha)` on the
/// right; the complement is `alpha^{1/2} (I - gamma* gamma) alpha^{1/2}`.
pub fn minimal_contraction(t: &BlockNonneg, rank_tol: f64) -> Result<SchurFactorization> {
    t.check_nonneg(rank_tol)?;
    let alpha_sqrt = psd_sqrt(&t.alpha, rank_tol).map_err(as_nonneg)?;
    let delta_sqrt = psd_sqrt(&t.delta, rank_tol).map_err(as_nonneg)?;
    let alpha_sqrt_pinv = psd_pseudo_inverse(&alpha_sqrt, rank_tol)?;
    let delta_sqrt_pinv = psd_pseudo_inverse(&delta_sqrt, rank_tol)?;

    let p_alpha = alpha_sqrt.matrix() * alpha_sqrt_pinv.matrix();
    let p_delta = delta_sqrt.matrix() * delta_sqrt_pinv.matrix();
    let raw = delta_sqrt_pinv.matrix() * t.beta.adjoint() * alpha_sqrt_pinv.matrix();
    let gamma = &p_delta * raw * &p_alpha;

    let reconstructed = delta_sqrt.matrix() * &gamma * alpha_sqrt.matrix();
    let residual = spectral_norm(&(t.beta.adjoint() - reconstructed));
    let scale = t.assemble().norm();
    if residual > factor_residual_threshold(rank_tol, scale) {
        return Err(Error::RangeViolation { residual });
    }

    let n = t.x_dim();
    let inner = identity(n) - gamma.adjoint() * &gamma;
    let complement = HermitianOperator::from_hermitian_part(
        &(alpha_sqrt.matrix() * inner * alpha_sqrt.matrix()),
    );

    let rank = |s: &HermitianOperator| {
        let spec = s.spectrum();
        let thr = rank_tol * spec.norm();
        spec.values.iter().filter(|&&v| v > thr).count()
    };
    Ok(SchurFactorization {
        gamma,
        complement,
        rank_alpha: rank(&alpha_sqrt),
        rank_delta: rank(&delta_sqrt),
        residual,
    })
}

fn as_nonneg(e: Error) -> Error {
    match e {
        Error::NotPsd { min_eig, .. } => Error::NotNonneg { min_eig },
        other => other,
    }
}

/// Upper bound on the number of grid points evaluated by
/// [`brute_force_infimum`].
pub const MAX_GRID_POINTS: usize = 2_000_000;

/// Infimum over `u` of `<T [x; u], [x; u]>` by direct search.
///
/// A coarse grid over the real coordinates of `u` (real and imaginary parts,
/// `grid_steps` values per axis in `[-grid_radius, grid_radius]`) seeds a
/// conjugate-gradient descent on the quadratic in `u`. Uses no spectral
/// information about `T`, so it is independent of [`minimal_contraction`].
pub fn brute_force_infimum(
    t: &BlockNonneg,
    x: &CVector,
    grid_radius: f64,
    grid_steps: usize,
) -> Result<f64> {
    if x.len() != t.x_dim() {
        return Err(Error::DimensionMismatch(format!(
            "x has length {}, expected {}",
            x.len(),
            t.x_dim()
        )));
    }
    t.check_nonneg(default_rank_tol(t.x_dim() + t.u_dim()))?;
    let m = t.u_dim();
    let real_dims = 2 * m;
    let steps = grid_steps.max(1);
    let total = steps
        .checked_pow(real_dims as u32)
        .filter(|&p| p <= MAX_GRID_POINTS)
        .ok_or_else(|| Error::InvalidArgument(format!("grid of {steps}^{real_dims} points is too large")))?;

    let axis = |k: usize| -> f64 {
        if steps == 1 {
            0.0
        } else {
            -grid_radius + 2.0 * grid_radius * (k as f64) / ((steps - 1) as f64)
        }
    };

    let mut best_u = CVector::zeros(m);
    let mut best = t.form(x, &best_u);
    let mut u = CVector::zeros(m);
    for idx in 0..total {
        let mut rem = idx;
        for d in 0..real_dims {
            let v = axis(rem % steps);
            rem /= steps;
            let slot = &mut u[d / 2];
            if d % 2 == 0 {
                slot.re = v;
            } else {
                slot.im = v;
            }
        }
        let f = t.form(x, &u);
        if f < best {
            best = f;
            best_u.copy_from(&u);
        }
    }

    // Minimize u* delta u + 2 Re <beta* x, u> + <alpha x, x> by CG on
    // delta u = -beta* x, restarted from the best point so far.
    let g = t.beta.adjoint() * x;
    let delta = t.delta.matrix();
    let mut cur = best_u.clone();
    for _ in 0..4 {
        let mut r = -(delta * &cur + &g);
        let mut p = r.clone();
        let mut rr = r.norm_squared();
        for _ in 0..(4 * m.max(1)) {
            if rr <= f64::MIN_POSITIVE {
                break;
            }
            let dp = delta * &p;
            let curv = p.dotc(&dp).re;
            if curv <= 0.0 {
                break;
            }
            let step = rr / curv;
            cur += &p * crate::linalg::re(step);
            r -= &dp * crate::linalg::re(step);
            let rr_new = r.norm_squared();
            p = &r + &p * crate::linalg::re(rr_new / rr);
            rr = rr_new;
            let f = t.form(x, &cur);
            if f < best {
                best = f;
            }
        }
        let f = t.form(x, &cur);
        if f < best {
            best = f;
        }
    }
    Ok(best)
}

/// Loewner-order comparison: `H1 <= H2` iff `H2 - H1` is positive semidefinite.
pub fn loewner_compare(
    h1: &HermitianOperator,
    h2: &HermitianOperator,
    tol: f64,
) -> Result<LoewnerOrder> {
    if h1.dim() != h2.dim() {
        return Err(Error::DimensionMismatch(format!(
            "cannot compare operators of dimension {} and {}",
            h1.dim(),
            h2.dim()
        )));
    }
    let diff = HermitianOperator::from_hermitian_part(&(h2.matrix() - h1.matrix()));
    let spec = diff.spectrum();
    if spec.norm() <= tol {
        Ok(LoewnerOrder::Equal)
    } else if spec.min() >= -tol {
        Ok(LoewnerOrder::LessEq)
    } else if spec.max() <= tol {
        Ok(LoewnerOrder::GreaterEq)
    } else {
        Ok(LoewnerOrder::Incomparable)
    }
}
