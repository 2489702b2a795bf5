//! Discrete-time state-space systems
//!
//! ```text
//! x_{k+1} = A x_k + B u_k
//!   y_k   = C x_k + D u_k
//! ```
//!
//! with complex state, input and output spaces of dimensions `n`, `m`, `p`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    block2x2, c, complement_basis, hstack, identity, range_basis, spectral_norm, CMatrix,
    CVector, C64,
};
use crate::opcore::HermitianOperator;

/// Relative conditioning below which `I - lambda A` counts as singular.
pub const RESOLVENT_TOL: f64 = 1e-12;

/// Default rank tolerance for controllability and observability tests.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// The quadruple `(A, B, C, D)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemRealization {
    a: CMatrix,
    b: CMatrix,
    c: CMatrix,
    d: CMatrix,
}

impl SystemRealization {
    pub fn new(a: CMatrix, b: CMatrix, c: CMatrix, d: CMatrix) -> Result<Self> {
        let n = a.nrows();
        if n == 0 || !a.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "A must be square and non-empty, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        let m = b.ncols();
        let p = c.nrows();
        if m == 0 || p == 0 {
            return Err(Error::DimensionMismatch("input and output spaces must be non-trivial".into()));
        }
        if b.nrows() != n {
            return Err(Error::DimensionMismatch(format!("B has {} rows, A is {n}x{n}", b.nrows())));
        }
        if c.ncols() != n {
            return Err(Error::DimensionMismatch(format!("C has {} columns, A is {n}x{n}", c.ncols())));
        }
        if d.nrows() != p || d.ncols() != m {
            return Err(Error::DimensionMismatch(format!(
                "D is {}x{}, expected {p}x{m}",
                d.nrows(),
                d.ncols()
            )));
        }
        for (name, mat) in [("A", &a), ("B", &b), ("C", &c), ("D", &d)] {
            if !crate::linalg::all_finite(mat) {
                return Err(Error::NonFinite(name.into()));
            }
        }
        Ok(SystemRealization { a, b, c, d })
    }

    /// Convenience constructor from row-major real data.
    pub fn from_real(
        n: usize,
        m: usize,
        p: usize,
        a: &[f64],
        b: &[f64],
        c: &[f64],
        d: &[f64],
    ) -> Result<Self> {
        let check = |name: &str, data: &[f64], len: usize| {
            if data.len() == len {
                Ok(())
            } else {
                Err(Error::DimensionMismatch(format!("{name} has {} entries, expected {len}", data.len())))
            }
        };
        check("A", a, n * n)?;
        check("B", b, n * m)?;
        check("C", c, p * n)?;
        check("D", d, p * m)?;
        use crate::linalg::from_real as fr;
        Self::new(fr(n, n, a), fr(n, m, b), fr(p, n, c), fr(p, m, d))
    }

    pub fn a(&self) -> &CMatrix {
        &self.a
    }
    pub fn b(&self) -> &CMatrix {
        &self.b
    }
    pub fn c(&self) -> &CMatrix {
        &self.c
    }
    pub fn d(&self) -> &CMatrix {
        &self.d
    }
    /// State dimension.
    pub fn n(&self) -> usize {
        self.a.nrows()
    }
    /// Input dimension.
    pub fn m(&self) -> usize {
        self.b.ncols()
    }
    /// Output dimension.
    pub fn p(&self) -> usize {
        self.c.nrows()
    }
}

/// `M(sigma) = [[A, B], [C, D]] : X ⊕ U -> X ⊕ Y`.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemMatrix(pub CMatrix);

/// One evaluation of the transfer function.
#[derive(Clone, Debug)]
pub struct TransferSample {
    pub lambda: C64,
    pub value: CMatrix,
    /// Largest singular value of `value`.
    pub norm: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    /// `x_0 .. x_N`
    pub states: Vec<CVector>,
    /// `u_0 .. u_{N-1}`
    pub inputs: Vec<CVector>,
    /// `y_0 .. y_{N-1}`
    pub outputs: Vec<CVector>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MinimalityReport {
    pub minimal: bool,
    pub controllable_rank: usize,
    pub unobservable_dim: usize,
    pub state_dim: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PassivityReport {
    pub passive: bool,
    /// Largest singular value of the system matrix.
    pub norm: f64,
    /// `1 - norm`.
    pub margin: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DissipationReport {
    /// `‖u_k‖² - ‖y_k‖² - (x_{k+1}* H x_{k+1} - x_k* H x_k)`
    pub margins: Vec<f64>,
    pub min_margin: f64,
    pub satisfied: bool,
}

pub fn system_matrix(sigma: &SystemRealization) -> SystemMatrix {
    SystemMatrix(block2x2(&sigma.a, &sigma.b, &sigma.c, &sigma.d))
}

/// `theta(lambda) = D + lambda C (I - lambda A)^{-1} B`.
pub fn transfer_eval(sigma: &SystemRealization, lambda: C64) -> Result<TransferSample> {
    let n = sigma.n();
    let resolvent = identity(n) - sigma.a.map(|z| z * lambda);
    let svd = resolvent.clone().svd(false, false);
    let smax = svd.singular_values.iter().fold(0.0_f64, |a, &s| a.max(s));
    let smin = svd.singular_values.iter().fold(f64::INFINITY, |a, &s| a.min(s));
    if !(smin > RESOLVENT_TOL * smax) {
        return Err(Error::SingularResolvent { lambda });
    }
    let solved = resolvent
        .lu()
        .solve(&sigma.b)
        .ok_or(Error::SingularResolvent { lambda })?;
    let value = &sigma.d + (&sigma.c * solved).map(|z| z * lambda);
    let norm = spectral_norm(&value);
    Ok(TransferSample { lambda, value, norm })
}

fn krylov(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let mut blocks = b.clone();
    let mut power = b.clone();
    for _ in 1..n {
        power = a * power;
        blocks = hstack(&blocks, &power);
    }
    blocks
}

/// Orthonormal basis of `span{A^k B : 0 <= k <= n-1}`.
pub fn controllable_subspace(sigma: &SystemRealization, tol: f64) -> CMatrix {
    range_basis(&krylov(&sigma.a, &sigma.b), tol, 0.0)
}

/// Orthonormal basis of `⋂_k ker C A^k`.
pub fn unobservable_subspace(sigma: &SystemRealization, tol: f64) -> CMatrix {
    let observable = controllable_subspace(&adjoint(sigma), tol);
    complement_basis(&observable, sigma.n())
}

pub fn is_minimal(sigma: &SystemRealization, tol: f64) -> MinimalityReport {
    let controllable_rank = controllable_subspace(sigma, tol).ncols();
    let unobservable_dim = unobservable_subspace(sigma, tol).ncols();
    MinimalityReport {
        minimal: controllable_rank == sigma.n() && unobservable_dim == 0,
        controllable_rank,
        unobservable_dim,
        state_dim: sigma.n(),
    }
}

/// `sigma* = (A*, C*, B*, D*)`, with input and output spaces swapped.
pub fn adjoint(sigma: &SystemRealization) -> SystemRealization {
    SystemRealization {
        a: sigma.a.adjoint(),
        b: sigma.c.adjoint(),
        c: sigma.b.adjoint(),
        d: sigma.d.adjoint(),
    }
}

pub fn is_passive(sigma: &SystemRealization, tol: f64) -> PassivityReport {
    let norm = spectral_norm(&system_matrix(sigma).0);
    PassivityReport { passive: norm <= 1.0 + tol, norm, margin: 1.0 - norm }
}

/// `sup ‖theta(lambda)‖` over a polar grid of the closed disc of the given
/// radius: `grid_steps` radii and `grid_steps` angles, plus the centre.
///
/// A grid certificate only: a value `<= 1 + tol` is consistent with the
/// transfer function being of Schur class, not a proof of it.
pub fn schur_class_margin(sigma: &SystemRealization, grid_steps: usize, radius: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&radius) {
        return Err(Error::InvalidArgument(format!("radius must lie in [0, 1), got {radius}")));
    }
    let steps = grid_steps.max(1);
    let mut sup = transfer_eval(sigma, c(0.0, 0.0))?.norm;
    for i in 1..=steps {
        let r = radius * i as f64 / steps as f64;
        for j in 0..steps {
            let phi = 2.0 * PI * j as f64 / steps as f64;
            let sample = transfer_eval(sigma, C64::from_polar(r, phi))?;
            sup = sup.max(sample.norm);
        }
    }
    Ok(sup)
}

pub fn simulate(sigma: &SystemRealization, x0: &CVector, inputs: &[CVector]) -> Result<Trajectory> {
    if x0.len() != sigma.n() {
        return Err(Error::DimensionMismatch(format!("x0 has length {}, expected {}", x0.len(), sigma.n())));
    }
    if let Some((k, _)) = inputs.iter().enumerate().find(|(_, u)| u.len() != sigma.m()) {
        return Err(Error::DimensionMismatch(format!("input {k} has wrong length, expected {}", sigma.m())));
    }
    let mut states = Vec::with_capacity(inputs.len() + 1);
    let mut outputs = Vec::with_capacity(inputs.len());
    let mut x = x0.clone();
    for u in inputs {
        outputs.push(&sigma.c * &x + &sigma.d * u);
        let next = &sigma.a * &x + &sigma.b * u;
        states.push(std::mem::replace(&mut x, next));
    }
    states.push(x);
    Ok(Trajectory { states, inputs: inputs.to_vec(), outputs })
}

/// Per-step storage margins of a trajectory for the storage `x* H x`.
pub fn dissipation_check(traj: &Trajectory, h: &HermitianOperator, tol: f64) -> Result<DissipationReport> {
    let spec = h.spectrum();
    if spec.min() <= 0.0 {
        return Err(Error::NotPd { min_eig: spec.min() });
    }
    if traj.states.len() != traj.inputs.len() + 1 || traj.outputs.len() != traj.inputs.len() {
        return Err(Error::DimensionMismatch("trajectory sequences have inconsistent lengths".into()));
    }
    if traj.states.iter().any(|x| x.len() != h.dim()) {
        return Err(Error::DimensionMismatch("state length differs from storage dimension".into()));
    }
    let energy = |x: &CVector| crate::linalg::quadratic_form(h.matrix(), x);
    let margins: Vec<f64> = (0..traj.inputs.len())
        .map(|k| {
            traj.inputs[k].norm_squared() - traj.outputs[k].norm_squared()
                - (energy(&traj.states[k + 1]) - energy(&traj.states[k]))
        })
        .collect();
    let min_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
    let min_margin = if margins.is_empty() { 0.0 } else { min_margin };
    Ok(DissipationReport { satisfied: min_margin >= -tol, margins, min_margin })
}

/// Stacked `[x; u]`, the argument of the system matrix.
pub fn stack_state_input(x: &CVector, u: &CVector) -> CVector {
    CVector::from_iterator(x.len() + u.len(), x.iter().chain(u.iter()).copied())
}
