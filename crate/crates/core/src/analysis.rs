//! Boundary behavior of the transfer function on the unit circle and the
//! uniqueness certificates that follow from it.
//!
//! The circle checks are certificates on a finite grid, not proofs. The
//! uniqueness certificate only covers the cases where a defect function
//! vanishes identically (inner or co-inner transfer functions); everything
//! else is reported as [`UniquenessVerdict::Unknown`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{identity, spectral_norm, CMatrix, C64};
use crate::riccati::{raw_parts, StorageOperator};
use crate::solver::{maximal_solution, minimal_solution, SolverConfig};
use crate::sysmodel::{adjoint, is_minimal, transfer_eval, SystemRealization};

pub const DEFAULT_GRID_STEPS: usize = 4096;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CircleSample {
    pub angle: f64,
    #[serde(skip)]
    pub value: CMatrix,
    /// `‖I - theta* theta‖`
    pub right_defect: f64,
    /// `‖I - theta theta*‖`
    pub left_defect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CircleProfile {
    pub samples: Vec<CircleSample>,
    pub max_defect_right: f64,
    pub max_defect_left: f64,
}

impl CircleProfile {
    /// Smallest right defect over the grid.
    pub fn min_defect_right(&self) -> f64 {
        self.samples.iter().map(|s| s.right_defect).fold(f64::INFINITY, f64::min)
    }
}

/// Samples `theta` at `exp(2 pi i k / grid_steps)`.
pub fn circle_profile(sigma: &SystemRealization, grid_steps: usize) -> Result<CircleProfile> {
    if grid_steps == 0 {
        return Err(Error::InvalidArgument("grid must have at least one point".into()));
    }
    let (m, p) = (sigma.m(), sigma.p());
    let mut samples = Vec::with_capacity(grid_steps);
    let (mut right, mut left) = (0.0_f64, 0.0_f64);
    for k in 0..grid_steps {
        let angle = std::f64::consts::TAU * k as f64 / grid_steps as f64;
        let value = match transfer_eval(sigma, C64::from_polar(1.0, angle)) {
            Ok(s) => s.value,
            Err(Error::SingularResolvent { .. }) => return Err(Error::PoleOnCircle { angle }),
            Err(e) => return Err(e),
        };
        let right_defect = spectral_norm(&(identity(m) - value.adjoint() * &value));
        let left_defect = spectral_norm(&(identity(p) - &value * value.adjoint()));
        right = right.max(right_defect);
        left = left.max(left_defect);
        samples.push(CircleSample { angle, value, right_defect, left_defect });
    }
    Ok(CircleProfile { samples, max_defect_right: right, max_defect_left: left })
}

pub fn is_inner(profile: &CircleProfile, tol: f64) -> bool {
    profile.max_defect_right <= tol
}

pub fn is_coinner(profile: &CircleProfile, tol: f64) -> bool {
    profile.max_defect_left <= tol
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum UniquenessVerdict {
    UniqueSingleton,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum UniquenessReason {
    InnerFr0,
    CoInnerFl0,
    ScalarModulusOne,
    None,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct UniquenessCertificate {
    pub verdict: UniquenessVerdict,
    pub reason: UniquenessReason,
    /// `‖delta(H)‖` at the computed solution: `delta_sigma(H_min)` for inner
    /// systems, `delta_{sigma*}(H_max^{-1})` for co-inner ones.
    pub delta_at_solution: Option<f64>,
    /// The single element of RI° when the verdict is a singleton.
    #[serde(skip)]
    pub solution: Option<StorageOperator>,
}

fn delta_norm(sigma: &SystemRealization, h: &CMatrix) -> f64 {
    spectral_norm(&raw_parts(sigma, h).2)
}

/// Singleton certificate for RI°.
///
/// Inner systems are checked through the minimal solution and
/// `delta_sigma(H_min) = 0`; co-inner ones through the maximal solution and
/// `delta_{sigma*}(H_max^{-1}) = 0`. A scalar transfer function with
/// modulus one on the circle is inner, so it is reported under
/// [`UniquenessReason::InnerFr0`].
pub fn uniqueness_certificate(
    sigma: &SystemRealization,
    profile: &CircleProfile,
    tol: f64,
    cfg: &SolverConfig,
) -> Result<UniquenessCertificate> {
    if !is_minimal(sigma, cfg.tolerances.minimal_tol).minimal {
        return Err(Error::NotMinimal);
    }
    if is_inner(profile, tol) {
        let lo = minimal_solution(sigma, cfg)?;
        let d = delta_norm(sigma, lo.storage.matrix());
        if d > tol {
            return Err(Error::CertificateFailed(format!(
                "inner transfer function but ‖delta(H_min)‖ = {d:e}"
            )));
        }
        return Ok(UniquenessCertificate {
            verdict: UniquenessVerdict::UniqueSingleton,
            reason: UniquenessReason::InnerFr0,
            delta_at_solution: Some(d),
            solution: Some(lo.storage),
        });
    }
    if is_coinner(profile, tol) {
        let hi = maximal_solution(sigma, cfg)?;
        let d = delta_norm(&adjoint(sigma), hi.storage.inverse().matrix());
        if d > tol {
            return Err(Error::CertificateFailed(format!(
                "co-inner transfer function but ‖delta of the adjoint at H_max^-1‖ = {d:e}"
            )));
        }
        return Ok(UniquenessCertificate {
            verdict: UniquenessVerdict::UniqueSingleton,
            reason: UniquenessReason::CoInnerFl0,
            delta_at_solution: Some(d),
            solution: Some(hi.storage),
        });
    }
    Ok(UniquenessCertificate {
        verdict: UniquenessVerdict::Unknown,
        reason: UniquenessReason::None,
        delta_at_solution: None,
        solution: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{coinner_row, scalar_interval, shift, two_state};
    use crate::linalg::{c, real_diag};

    #[test]
    fn shift_is_inner_and_coinner() {
        let p = circle_profile(&shift(), 256).unwrap();
        assert!(p.max_defect_right < 1e-14 && p.max_defect_left < 1e-14);
        assert!(is_inner(&p, 1e-10) && is_coinner(&p, 1e-10));
    }

    #[test]
    fn angles_increase_from_zero() {
        let p = circle_profile(&scalar_interval(), 64).unwrap();
        assert_eq!(p.samples[0].angle, 0.0);
        assert!(p.samples.windows(2).all(|w| w[0].angle < w[1].angle));
        assert!(p.samples.last().unwrap().angle < std::f64::consts::TAU);
    }

    #[test]
    fn row_defects() {
        let p = circle_profile(&coinner_row(), 128).unwrap();
        assert!((p.max_defect_right - 1.0).abs() < 1e-14);
        assert!(p.max_defect_left < 1e-14);
    }

    #[test]
    fn pole_on_circle() {
        // theta(lambda) = lambda / (1 - lambda) has a pole at 1.
        let s = SystemRealization::from_real(1, 1, 1, &[1.0], &[1.0], &[1.0], &[0.0]).unwrap();
        assert!(matches!(circle_profile(&s, 16), Err(Error::PoleOnCircle { angle }) if angle == 0.0));
    }

    #[test]
    fn certificates() {
        let cfg = SolverConfig::default();
        let cert = uniqueness_certificate(&shift(), &circle_profile(&shift(), 256).unwrap(), 1e-8, &cfg).unwrap();
        assert_eq!(cert.reason, UniquenessReason::InnerFr0);
        assert!(cert.delta_at_solution.unwrap() < 1e-12);

        let row = coinner_row();
        let cert = uniqueness_certificate(&row, &circle_profile(&row, 256).unwrap(), 1e-8, &cfg).unwrap();
        assert_eq!(cert.verdict, UniquenessVerdict::UniqueSingleton);
        assert_eq!(cert.reason, UniquenessReason::CoInnerFl0);
        let h = cert.solution.unwrap();
        assert!((h.matrix()[(0, 0)] - c(1.0, 0.0)).norm() < 1e-10);
        let delta = raw_parts(&row, h.matrix()).2;
        assert!((delta - real_diag(&[0.0, 1.0])).norm() < 1e-10);

        let s = two_state(0.6, 0.8);
        let cert = uniqueness_certificate(&s, &circle_profile(&s, 256).unwrap(), 1e-8, &cfg).unwrap();
        assert_eq!(cert.verdict, UniquenessVerdict::Unknown);
        assert_eq!(cert.reason, UniquenessReason::None);
    }
}
