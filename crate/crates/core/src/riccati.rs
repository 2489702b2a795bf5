//! Riccati residual operators, the KYP form and LMI, and membership in the
//! Riccati-equality (RE), Riccati-inequality (RI) and KYP solution sets.
//!
//! For a storage operator `H` on the (finite-dimensional) state space:
//!
//! ```text
//! alpha(H) = H - A* H A - C* C
//! beta(H)  = D* C + B* H A                  (U <- X)
//! delta(H) = I - D* D - B* H B
//! S(H)     = alpha - beta* delta^{[-1]} beta
//! L(H)     = [[alpha, -beta*], [-beta, delta]]
//! ```
//!
//! `H` is in RI iff `delta >= 0`, `range beta ⊆ range delta` and `S >= 0`,
//! equivalently iff `L(H) >= 0`. `H` is in RE iff it is in RI and `S = 0`.
//! Positive operators on a finite-dimensional space are boundedly
//! invertible, so the domain and core conditions that matter for unbounded
//! storage operators hold automatically and RI° is the set of RI members
//! whose associated system is minimal.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{block2x2, hstack, identity, spectral_norm, CMatrix, CVector};
use crate::opcore::{
    minimal_contraction, range_projector, thresholded_pseudo_inverse, BlockNonneg, HermitianOperator,
};
use crate::sysmodel::{is_minimal, system_matrix, SystemRealization, DEFAULT_RANK_TOL};

/// Threshold family for membership decisions.
///
/// Every threshold is relative to the scale of the operators involved
/// (see [`lmi_scale`]); on unit-scaled systems the defaults act as absolute
/// tolerances of the stated size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Tolerances {
    /// Semidefiniteness and equality threshold.
    pub tol: f64,
    /// Relative rank threshold for `delta(H)` and its pseudo-inverse.
    pub rank_tol: f64,
    /// Relative positive-definiteness threshold for storage operators.
    pub pd_tol: f64,
    /// Rank threshold for minimality of the associated system.
    pub minimal_tol: f64,
    /// A route disagreement counts as a boundary case when a deciding
    /// eigenvalue lies within `boundary_factor * tol` of zero.
    pub boundary_factor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol: 1e-9,
            rank_tol: 1e-12,
            pd_tol: 1e-12,
            minimal_tol: DEFAULT_RANK_TOL,
            boundary_factor: 100.0,
        }
    }
}

impl Tolerances {
    /// The whole family scaled from a single verdict tolerance.
    pub fn scaled(tol: f64) -> Self {
        Tolerances {
            tol,
            rank_tol: tol * 1e-3,
            pd_tol: tol * 1e-3,
            minimal_tol: (tol * 1e-1).max(f64::EPSILON),
            boundary_factor: 100.0,
        }
    }
}

/// A Hermitian positive-definite storage candidate with cached
/// `H^{1/2}` and `H^{-1/2}`.
#[derive(Clone, Debug)]
pub struct StorageOperator {
    h: HermitianOperator,
    sqrt: CMatrix,
    inv_sqrt: CMatrix,
}

impl StorageOperator {
    pub fn new(h: HermitianOperator) -> Result<Self> {
        Self::with_tolerance(h, Tolerances::default().pd_tol)
    }

    pub fn with_tolerance(h: HermitianOperator, pd_tol: f64) -> Result<Self> {
        let eig = h.spectrum();
        if !(eig.min() > pd_tol * eig.norm()) {
            return Err(Error::NotPd { min_eig: eig.min() });
        }
        let sqrt = eig.map(f64::sqrt);
        let inv_sqrt = eig.map(|v| 1.0 / v.sqrt());
        Ok(StorageOperator { h, sqrt, inv_sqrt })
    }

    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        Self::new(HermitianOperator::new(m)?)
    }

    pub fn from_real_diag(values: &[f64]) -> Result<Self> {
        Self::new(HermitianOperator::from_real_diag(values))
    }

    pub fn identity(n: usize) -> Self {
        Self::new(HermitianOperator::identity(n)).expect("identity is positive definite")
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.h
    }

    pub fn matrix(&self) -> &CMatrix {
        self.h.matrix()
    }

    pub fn sqrt(&self) -> &CMatrix {
        &self.sqrt
    }

    pub fn inv_sqrt(&self) -> &CMatrix {
        &self.inv_sqrt
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    pub fn inverse(&self) -> StorageOperator {
        let inv = HermitianOperator::from_hermitian_part(&(&self.inv_sqrt * &self.inv_sqrt));
        StorageOperator::with_tolerance(inv, 0.0).expect("inverse of a positive operator is positive")
    }
}

/// `alpha(H)`, `beta(H)`, `delta(H)` and the range-inclusion residual.
#[derive(Clone, Debug)]
pub struct RiccatiData {
    pub alpha: HermitianOperator,
    /// `m x n`.
    pub beta: CMatrix,
    pub delta: HermitianOperator,
    /// `‖(I - P_range(delta)) beta‖`.
    pub range_inclusion_residual: f64,
    /// Absolute eigenvalue threshold used to decide the range of `delta`.
    pub delta_rank_threshold: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MembershipDiagnostics {
    pub delta_min_eig: f64,
    /// `None` when `delta` fails to be semidefinite or the range inclusion fails.
    pub surplus_min_eig: Option<f64>,
    pub equality_residual: Option<f64>,
    pub lmi_min_eig: f64,
    pub c3_residual: f64,
    pub sigma_h_minimal: bool,
    /// Scale the thresholds were multiplied by.
    pub scale: f64,
    /// Verdict of the delta/range/surplus route.
    pub riccati_route: bool,
    /// Verdict of the LMI route.
    pub lmi_route: bool,
    /// Routes disagreed within the boundary band; the LMI route decided.
    pub boundary_disagreement: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MembershipVerdict {
    #[serde(rename = "inRI")]
    pub in_ri: bool,
    #[serde(rename = "inRE")]
    pub in_re: bool,
    #[serde(rename = "inRICirc")]
    pub in_ri_circ: bool,
    pub diagnostics: MembershipDiagnostics,
}

/// The system associated with `sigma` and `H`:
/// `(H^{1/2} A H^{-1/2}, H^{1/2} B, C H^{-1/2}, D)`.
#[derive(Clone, Debug)]
pub struct AssociatedSystem {
    pub system: SystemRealization,
    /// Largest residual among the similarity relations
    /// `A_H H^{1/2} = H^{1/2} A`, `B_H = H^{1/2} B`, `C_H H^{1/2} = C`.
    pub similarity_residual: f64,
}

fn check_dims(sigma: &SystemRealization, h: &StorageOperator) -> Result<()> {
    if h.dim() != sigma.n() {
        return Err(Error::DimensionMismatch(format!(
            "storage operator has dimension {}, state space has dimension {}",
            h.dim(),
            sigma.n()
        )));
    }
    Ok(())
}

/// Natural scale of `L(H)`: `1 + ‖H‖ (1 + ‖[A B]‖²) + ‖[C D]‖²`.
pub fn lmi_scale(sigma: &SystemRealization, h: &StorageOperator) -> f64 {
    let ab = spectral_norm(&hstack(sigma.a(), sigma.b()));
    let cd = spectral_norm(&hstack(sigma.c(), sigma.d()));
    1.0 + h.operator().norm() * (1.0 + ab * ab) + cd * cd
}

pub(crate) fn delta_scale(sigma: &SystemRealization, h: &StorageOperator) -> f64 {
    let b = spectral_norm(sigma.b());
    let d = spectral_norm(sigma.d());
    1.0 + d * d + b * b * h.operator().norm()
}

/// `(alpha, beta, delta)` for an arbitrary Hermitian matrix `hm`, with no
/// definiteness requirement. Used by iterative solvers.
pub fn raw_parts(sigma: &SystemRealization, hm: &CMatrix) -> (CMatrix, CMatrix, CMatrix) {
    let (a, b, c, d) = (sigma.a(), sigma.b(), sigma.c(), sigma.d());
    let alpha = hm - a.adjoint() * hm * a - c.adjoint() * c;
    let beta = d.adjoint() * c + b.adjoint() * hm * a;
    let delta = identity(sigma.m()) - d.adjoint() * d - b.adjoint() * hm * b;
    (alpha, beta, delta)
}

pub fn riccati_data(sigma: &SystemRealization, h: &StorageOperator) -> Result<RiccatiData> {
    riccati_data_with(sigma, h, &Tolerances::default())
}

pub fn riccati_data_with(
    sigma: &SystemRealization,
    h: &StorageOperator,
    tols: &Tolerances,
) -> Result<RiccatiData> {
    check_dims(sigma, h)?;
    let (alpha, beta, delta) = raw_parts(sigma, h.matrix());
    let alpha = HermitianOperator::from_hermitian_part(&alpha);
    let delta = HermitianOperator::from_hermitian_part(&delta);
    let threshold = tols.rank_tol * delta_scale(sigma, h).max(delta.norm());
    let projector = range_projector(&delta, threshold);
    let range_inclusion_residual = spectral_norm(&(&beta - projector * &beta));
    Ok(RiccatiData { alpha, beta, delta, range_inclusion_residual, delta_rank_threshold: threshold })
}

impl RiccatiData {
    /// `alpha - beta* delta^{[-1]} beta` with no preconditions checked.
    pub fn surplus_unchecked(&self) -> HermitianOperator {
        let pinv = thresholded_pseudo_inverse(&self.delta, self.delta_rank_threshold);
        HermitianOperator::from_hermitian_part(
            &(self.alpha.matrix() - self.beta.adjoint() * pinv.matrix() * &self.beta),
        )
    }
}

/// `S(H) = alpha - beta* delta^{[-1]} beta`; `H` is in RI iff this is
/// positive semidefinite.
pub fn inequality_surplus(
    sigma: &SystemRealization,
    h: &StorageOperator,
    tols: &Tolerances,
) -> Result<HermitianOperator> {
    let data = riccati_data_with(sigma, h, tols)?;
    let thr = tols.tol * lmi_scale(sigma, h);
    let delta_min = data.delta.min_eigenvalue();
    if delta_min < -thr {
        return Err(Error::DeltaNotPsd { min_eig: delta_min });
    }
    if data.range_inclusion_residual > thr {
        return Err(Error::C3Violation { residual: data.range_inclusion_residual });
    }
    Ok(data.surplus_unchecked())
}

/// `‖H^{1/2} x‖² + ‖u‖² - ‖H^{1/2}(Ax + Bu)‖² - ‖Cx + Du‖²`.
pub fn kyp_form(sigma: &SystemRealization, h: &StorageOperator, x: &CVector, u: &CVector) -> Result<f64> {
    check_dims(sigma, h)?;
    if x.len() != sigma.n() || u.len() != sigma.m() {
        return Err(Error::DimensionMismatch(format!(
            "expected x of length {} and u of length {}",
            sigma.n(),
            sigma.m()
        )));
    }
    let next = sigma.a() * x + sigma.b() * u;
    let y = sigma.c() * x + sigma.d() * u;
    Ok((h.sqrt() * x).norm_squared() + u.norm_squared() - (h.sqrt() * next).norm_squared() - y.norm_squared())
}

/// `L(H) = [[H - A*HA - C*C, -(A*HB + C*D)], [-(B*HA + D*C), I - B*HB - D*D]]`.
pub fn kyp_lmi(sigma: &SystemRealization, h: &StorageOperator) -> Result<HermitianOperator> {
    check_dims(sigma, h)?;
    let (a, b, c, d) = (sigma.a(), sigma.b(), sigma.c(), sigma.d());
    let hm = h.matrix();
    let top_left = hm - a.adjoint() * hm * a - c.adjoint() * c;
    let top_right = -(a.adjoint() * hm * b + c.adjoint() * d);
    let bottom_right = identity(sigma.m()) - b.adjoint() * hm * b - d.adjoint() * d;
    Ok(HermitianOperator::from_hermitian_part(&block2x2(
        &top_left,
        &top_right,
        &top_right.adjoint(),
        &bottom_right,
    )))
}

/// Decides membership of `H` in RI, RE and RI° by both the Riccati route
/// and the LMI route.
///
/// A disagreement between the routes outside the boundary band is a
/// numerical inconsistency and is reported as [`Error::InconsistentRoutes`].
pub fn membership(
    sigma: &SystemRealization,
    h: &StorageOperator,
    tols: &Tolerances,
) -> Result<MembershipVerdict> {
    let data = riccati_data_with(sigma, h, tols)?;
    let scale = lmi_scale(sigma, h);
    let thr = tols.tol * scale;
    let band = tols.boundary_factor * thr;

    let delta_min_eig = data.delta.min_eigenvalue();
    let c3_residual = data.range_inclusion_residual;
    let (surplus_min_eig, equality_residual) = if delta_min_eig >= -thr && c3_residual <= thr {
        let s = data.surplus_unchecked();
        let eig = s.spectrum();
        (Some(eig.min()), Some(eig.norm()))
    } else {
        (None, None)
    };
    let riccati_route = surplus_min_eig.is_some_and(|v| v >= -thr);

    let lmi_min_eig = kyp_lmi(sigma, h)?.min_eigenvalue();
    let lmi_route = lmi_min_eig >= -thr;

    let mut boundary_disagreement = false;
    if riccati_route != lmi_route {
        let near = |v: f64| v.abs() <= band;
        let boundary = near(lmi_min_eig)
            || near(delta_min_eig)
            || surplus_min_eig.is_some_and(near)
            || (c3_residual > thr && c3_residual <= band);
        if !boundary {
            return Err(Error::InconsistentRoutes {
                detail: format!(
                    "riccati route {riccati_route} (delta min {delta_min_eig:e}, c3 {c3_residual:e}, \
                     surplus min {surplus_min_eig:?}), lmi route {lmi_route} (min eig {lmi_min_eig:e})"
                ),
            });
        }
        boundary_disagreement = true;
    }
    let in_ri = if boundary_disagreement { lmi_route } else { riccati_route };
    let in_re = in_ri && equality_residual.is_some_and(|r| r <= thr);
    let sigma_h_minimal = is_minimal(&associated_system(sigma, h)?.system, tols.minimal_tol).minimal;
    Ok(MembershipVerdict {
        in_ri,
        in_re,
        in_ri_circ: in_ri && sigma_h_minimal,
        diagnostics: MembershipDiagnostics {
            delta_min_eig,
            surplus_min_eig,
            equality_residual,
            lmi_min_eig,
            c3_residual,
            sigma_h_minimal,
            scale,
            riccati_route,
            lmi_route,
            boundary_disagreement,
        },
    })
}

pub fn associated_system(sigma: &SystemRealization, h: &StorageOperator) -> Result<AssociatedSystem> {
    check_dims(sigma, h)?;
    let (s, si) = (h.sqrt(), h.inv_sqrt());
    let a_h = s * sigma.a() * si;
    let b_h = s * sigma.b();
    let c_h = sigma.c() * si;
    let residual = [
        spectral_norm(&(&a_h * s - s * sigma.a())),
        spectral_norm(&(&b_h - s * sigma.b())),
        spectral_norm(&(&c_h * s - sigma.c())),
    ]
    .into_iter()
    .fold(0.0_f64, f64::max);
    Ok(AssociatedSystem {
        system: SystemRealization::new(a_h, b_h, c_h, sigma.d().clone())?,
        similarity_residual: residual,
    })
}

/// `‖M(sigma_H)‖ <= 1 + tol`.
pub fn h_passivity_check(sigma: &SystemRealization, h: &StorageOperator, tol: f64) -> Result<bool> {
    let assoc = associated_system(sigma, h)?;
    Ok(spectral_norm(&system_matrix(&assoc.system).0) <= 1.0 + tol)
}

/// `R = I - M(sigma_H)* M(sigma_H)` split after the state coordinates.
pub fn passivity_defect(sigma: &SystemRealization, h: &StorageOperator) -> Result<BlockNonneg> {
    let assoc = associated_system(sigma, h)?;
    let m = system_matrix(&assoc.system).0;
    let r = identity(m.ncols()) - m.adjoint() * &m;
    BlockNonneg::split(&HermitianOperator::from_hermitian_part(&r), sigma.n())
}

/// Norm of the Schur complement, supported by the state space, of
/// `I - M(sigma_H)* M(sigma_H)`. Zero exactly when `H` solves the Riccati
/// equality.
pub fn equality_gap(sigma: &SystemRealization, h: &StorageOperator, tols: &Tolerances) -> Result<f64> {
    if !membership(sigma, h, tols)?.in_ri {
        return Err(Error::NotInRi);
    }
    let block = passivity_defect(sigma, h)?;
    // R is congruent to L(H), so it is PSD up to the same relative noise.
    let rank_tol = (tols.tol * lmi_scale(sigma, h)).max(tols.rank_tol);
    let f = minimal_contraction(&clip_to_psd(&block, rank_tol), rank_tol)?;
    Ok(f.complement.norm())
}

/// Projects a numerically nonnegative block operator onto the PSD cone.
fn clip_to_psd(block: &BlockNonneg, rel: f64) -> BlockNonneg {
    let t = block.assemble();
    let eig = t.spectrum();
    let thr = rel * eig.norm().max(1.0);
    let clipped = HermitianOperator::from_hermitian_part(&eig.map(|v| if v > thr { v } else { 0.0 }));
    BlockNonneg::split(&clipped, block.x_dim()).expect("split at the original position")
}

/// `H^{-1/2} S(H) H^{-1/2}`: the surplus transported to the associated system.
pub fn transported_surplus(
    sigma: &SystemRealization,
    h: &StorageOperator,
    tols: &Tolerances,
) -> Result<HermitianOperator> {
    let s = inequality_surplus(sigma, h, tols)?;
    Ok(HermitianOperator::from_hermitian_part(&(h.inv_sqrt() * s.matrix() * h.inv_sqrt())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{from_real, re};

    fn scalar_interval() -> SystemRealization {
        SystemRealization::from_real(1, 1, 1, &[-0.125], &[1.0], &[0.1875], &[0.5]).unwrap()
    }

    fn coinner_row() -> SystemRealization {
        SystemRealization::from_real(1, 2, 1, &[0.0], &[1.0, 0.0], &[1.0], &[0.0, 0.0]).unwrap()
    }

    fn h(v: f64) -> StorageOperator {
        StorageOperator::from_real_diag(&[v]).unwrap()
    }

    #[test]
    fn storage_rejects_singular() {
        assert!(matches!(StorageOperator::from_real_diag(&[1.0, 0.0]), Err(Error::NotPd { .. })));
        assert!(matches!(StorageOperator::from_real_diag(&[-1.0]), Err(Error::NotPd { .. })));
    }

    #[test]
    fn storage_caches_are_consistent() {
        let m = from_real(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let s = StorageOperator::from_matrix(m.clone()).unwrap();
        assert!((s.sqrt() * s.sqrt() - &m).norm() < 1e-12);
        assert!((s.sqrt() * s.inv_sqrt() - identity(2)).norm() < 1e-12);
        assert!((s.inverse().matrix() * &m - identity(2)).norm() < 1e-12);
    }

    #[test]
    fn scalar_data_matches_closed_forms() {
        for hv in [0.01, 3.0 / 64.0, 0.5, 0.75] {
            let d = riccati_data(&scalar_interval(), &h(hv)).unwrap();
            let alpha = 9.0 / 64.0 * (7.0 * hv - 0.25);
            let beta = 0.125 * (0.75 - hv);
            assert!((d.alpha.matrix()[(0, 0)] - re(alpha)).norm() < 1e-15);
            assert!((d.beta[(0, 0)] - re(beta)).norm() < 1e-15);
            assert!((d.delta.matrix()[(0, 0)] - re(0.75 - hv)).norm() < 1e-15);
        }
    }

    #[test]
    fn coinner_delta_at_one() {
        let d = riccati_data(&coinner_row(), &h(1.0)).unwrap();
        assert_eq!(d.delta.matrix(), &crate::linalg::real_diag(&[0.0, 1.0]));
    }

    #[test]
    fn no_input_no_output() {
        let s = SystemRealization::from_real(2, 1, 1, &[0.5, 0.1, 0.0, 0.3], &[0.0, 0.0], &[0.0, 0.0], &[0.0])
            .unwrap();
        let st = StorageOperator::from_matrix(from_real(2, 2, &[2.0, 0.3, 0.3, 1.0])).unwrap();
        let d = riccati_data(&s, &st).unwrap();
        let expected = st.matrix() - s.a().adjoint() * st.matrix() * s.a();
        assert!((d.alpha.matrix() - expected).norm() < 1e-14);
        assert!(d.beta.norm() == 0.0);
        assert_eq!(d.delta.matrix(), &identity(1));
    }

    #[test]
    fn surplus_values() {
        let t = Tolerances::default();
        let s = inequality_surplus(&scalar_interval(), &h(3.0 / 64.0), &t).unwrap();
        assert!(s.norm() < 1e-15);
        let s = inequality_surplus(&scalar_interval(), &h(0.75), &t).unwrap();
        assert!((s.matrix()[(0, 0)].re - 45.0 / 64.0).abs() < 1e-15);
        let s = inequality_surplus(&scalar_interval(), &h(0.01), &t).unwrap();
        let expected = 9.0 / 64.0 * (0.07 - 0.25) - (0.74) / 64.0;
        assert!((s.matrix()[(0, 0)].re - expected).abs() < 1e-15);
        assert!(expected < 0.0);
    }

    #[test]
    fn surplus_preconditions() {
        let t = Tolerances::default();
        assert!(matches!(
            inequality_surplus(&scalar_interval(), &h(0.8), &t),
            Err(Error::DeltaNotPsd { .. })
        ));
        // delta = diag(0, 1) but beta has a component in the kernel of delta
        let s = SystemRealization::from_real(1, 2, 1, &[0.5], &[1.0, 0.0], &[1.0], &[0.0, 0.0]).unwrap();
        assert!(matches!(inequality_surplus(&s, &h(1.0), &t), Err(Error::C3Violation { .. })));
    }

    #[test]
    fn kyp_form_at_zero_and_at_solution() {
        let s = scalar_interval();
        let zero = CVector::zeros(1);
        assert_eq!(kyp_form(&s, &h(1.0), &zero, &zero).unwrap(), 0.0);
        let one = CVector::from_vec(vec![re(1.0)]);
        let v = kyp_form(&s, &h(3.0 / 64.0), &one, &zero).unwrap();
        assert!((v - 45.0 / 4096.0).abs() < 1e-16);
    }

    #[test]
    fn lmi_sign_tracks_interval() {
        let s = scalar_interval();
        let at_solution = kyp_lmi(&s, &h(3.0 / 64.0)).unwrap();
        assert!(at_solution.min_eigenvalue() >= -1e-15);
        let below = kyp_lmi(&s, &h(0.01)).unwrap();
        assert!(below.min_eigenvalue() < 0.0);
    }

    #[test]
    fn membership_on_interval() {
        let t = Tolerances::default();
        let s = scalar_interval();
        let v = membership(&s, &h(3.0 / 64.0), &t).unwrap();
        assert!(v.in_ri && v.in_re && v.in_ri_circ);
        let v = membership(&s, &h(0.75), &t).unwrap();
        assert!(v.in_ri && !v.in_re);
        let v = membership(&s, &h(0.5), &t).unwrap();
        assert!(v.in_ri && !v.in_re);
        let v = membership(&s, &h(0.01), &t).unwrap();
        assert!(!v.in_ri && !v.in_re && !v.in_ri_circ);
    }

    #[test]
    fn associated_system_scalar() {
        let s = scalar_interval();
        let hv: f64 = 3.0 / 64.0;
        let a = associated_system(&s, &h(hv)).unwrap();
        assert!((a.system.a()[(0, 0)] - re(-0.125)).norm() < 1e-15);
        assert!((a.system.b()[(0, 0)] - re(hv.sqrt())).norm() < 1e-15);
        assert!((a.system.c()[(0, 0)] - re(0.1875 / hv.sqrt())).norm() < 1e-14);
        let id = associated_system(&s, &h(1.0)).unwrap();
        assert_eq!(id.system, s);
    }

    #[test]
    fn h_passivity() {
        let s = scalar_interval();
        assert!(h_passivity_check(&s, &h(3.0 / 64.0), 1e-12).unwrap());
        let big = SystemRealization::from_real(1, 1, 1, &[0.0], &[0.0], &[0.0], &[2.0]).unwrap();
        assert!(!h_passivity_check(&big, &h(1.0), 1e-12).unwrap());
    }

    #[test]
    fn gap_vanishes_on_equality() {
        let t = Tolerances::default();
        let s = scalar_interval();
        assert!(equality_gap(&s, &h(3.0 / 64.0), &t).unwrap() <= 1e-10);
        assert!(equality_gap(&s, &h(0.75), &t).unwrap() > 0.1);
        assert!(matches!(equality_gap(&s, &h(0.01), &t), Err(Error::NotInRi)));
    }
}
