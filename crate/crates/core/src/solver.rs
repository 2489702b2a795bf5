//! Solutions of the Riccati equality and the extremal elements of RI°.
//!
//! - [`solve_re_scalar`]: closed form for one-dimensional state, input and
//!   output.
//! - [`solve_re`]: multi-start Newton iteration on
//!   `F(H) = alpha(H) - beta(H)* delta(H)^{-1} beta(H)`, plus the limits of
//!   the monotone fixed-point iteration for `sigma` and for its adjoint,
//!   which reach solutions where `delta(H)` is singular.
//! - [`minimal_solution`]: the fixed-point iteration
//!   `H_{k+1} = A* H_k A + C* C + beta(H_k)* delta(H_k)^{[-1]} beta(H_k)`
//!   from `H_0 = 0`, checked against every known RE member and against
//!   rejection-sampled RI members.
//! - [`maximal_solution`]: the inverse of the minimal solution of the
//!   adjoint system.
//!
//! Convergence of the fixed-point iteration to the minimal element is not
//! assumed: every result carries a sampled ordering certificate and the
//! call fails with [`Error::CertificateFailed`] when it is violated.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixtures::random_hermitian;
use crate::linalg::{hermitian_part, identity, re, spectral_norm, CMatrix, Spectrum};
use crate::opcore::{loewner_compare, thresholded_pseudo_inverse, HermitianOperator, LoewnerOrder};
use crate::riccati::{membership, raw_parts, StorageOperator, Tolerances};
use crate::sysmodel::{adjoint, is_minimal, SystemRealization};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolverConfig {
    /// Largest state dimension accepted by [`solve_re`].
    pub max_dim: usize,
    /// Number of random Newton starts on top of the deterministic ones.
    pub starts: usize,
    /// Relative stopping tolerance for Newton and fixed-point iterations.
    pub iter_tol: f64,
    /// Two solutions are merged when `‖H_i - H_j‖ <= dedup_tol (1 + tr H_i)`.
    pub dedup_tol: f64,
    pub seed: u64,
    /// Newton iteration cap per start.
    pub max_iter: usize,
    /// Fixed-point iteration cap.
    pub fixed_point_max_iter: usize,
    /// RI members sampled for ordering certificates and duality checks.
    pub samples: usize,
    pub tolerances: Tolerances,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_dim: 6,
            starts: 24,
            iter_tol: 1e-13,
            dedup_tol: 1e-7,
            seed: 0,
            max_iter: 100,
            fixed_point_max_iter: 20_000,
            samples: 64,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MemberProvenance {
    pub route: String,
    /// `‖F(H)‖` at the returned point.
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub i: usize,
    pub j: usize,
    /// Relation of member `i` to member `j`.
    pub order: LoewnerOrder,
}

#[derive(Clone, Debug)]
pub struct SolutionSet {
    pub members: Vec<StorageOperator>,
    pub comparisons: Vec<Comparison>,
    pub minimal_index: Option<usize>,
    pub maximal_index: Option<usize>,
    pub provenance: Vec<MemberProvenance>,
    pub warnings: Vec<String>,
}

impl SolutionSet {
    fn new(mut found: Vec<(StorageOperator, MemberProvenance)>, warnings: Vec<String>) -> Self {
        found.sort_by(|(a, _), (b, _)| canonical_order(a.matrix(), b.matrix()));
        let (members, provenance) = found.into_iter().unzip();
        SolutionSet {
            members,
            comparisons: Vec::new(),
            minimal_index: None,
            maximal_index: None,
            provenance,
            warnings,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn minimal(&self) -> Option<&StorageOperator> {
        self.minimal_index.map(|i| &self.members[i])
    }

    pub fn maximal(&self) -> Option<&StorageOperator> {
        self.maximal_index.map(|i| &self.members[i])
    }
}

/// Ordering certificate attached to an extremal solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExtremalityCertificate {
    pub re_members_compared: usize,
    pub ri_samples_compared: usize,
    /// Smallest eigenvalue of `H - H_min` (or `H_max - H`) over all
    /// compared members; nonnegative up to tolerance when the certificate
    /// holds.
    pub worst_margin: f64,
}

#[derive(Clone, Debug)]
pub struct ExtremalSolution {
    pub storage: StorageOperator,
    pub iterations: usize,
    pub residual: f64,
    pub certificate: ExtremalityCertificate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DualitySample {
    pub trace: f64,
    /// Smallest eigenvalue of the KYP LMI of the adjoint at `H^{-1}`.
    pub adjoint_lmi_min_eig: f64,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct DualityReport {
    pub samples: Vec<DualitySample>,
    pub all_passed: bool,
    pub re_sigma: Vec<CMatrix>,
    pub re_adjoint: Vec<CMatrix>,
    /// `{H^{-1} : H in RE_sigma}`.
    pub re_inverse_image: Vec<CMatrix>,
    /// Whether the inverse image of `RE_sigma` equals `RE_{sigma*}`; it need
    /// not, even though inversion maps RI° onto RI° of the adjoint.
    pub re_sets_coincide: bool,
}

fn canonical_order(a: &CMatrix, b: &CMatrix) -> std::cmp::Ordering {
    let tr = |m: &CMatrix| m.diagonal().iter().map(|z| z.re).sum::<f64>();
    tr(a).total_cmp(&tr(b)).then_with(|| {
        let n = a.nrows();
        for i in 0..n {
            for j in 0..n {
                let o = a[(i, j)].re.total_cmp(&b[(i, j)].re).then(a[(i, j)].im.total_cmp(&b[(i, j)].im));
                if o.is_ne() {
                    return o;
                }
            }
        }
        std::cmp::Ordering::Equal
    })
}

fn trace(m: &CMatrix) -> f64 {
    m.diagonal().iter().map(|z| z.re).sum()
}

// ---------------------------------------------------------------------------
// scalar closed form

/// Closed-form Riccati-equality solutions when `n = m = p = 1`.
///
/// On `delta(h) > 0` the equality is `alpha(h) delta(h) = |beta(h)|²`, a
/// polynomial of degree at most two. Points with `delta(h) = 0` are checked
/// separately: there `delta^{[-1]} = 0`, so `h` is a solution iff
/// `beta(h) = 0` and `alpha(h) = 0`.
pub fn solve_re_scalar(sigma: &SystemRealization) -> Result<SolutionSet> {
    solve_re_scalar_with(sigma, &Tolerances::default())
}

pub fn solve_re_scalar_with(sigma: &SystemRealization, tols: &Tolerances) -> Result<SolutionSet> {
    if sigma.n() != 1 || sigma.m() != 1 || sigma.p() != 1 {
        return Err(Error::NotScalar);
    }
    let (a, b, c, d) = (sigma.a()[(0, 0)], sigma.b()[(0, 0)], sigma.c()[(0, 0)], sigma.d()[(0, 0)]);
    // alpha = p0 + p1 h, delta = q0 + q1 h, beta = r0 + r1 h
    let (p0, p1) = (-c.norm_sqr(), 1.0 - a.norm_sqr());
    let (q0, q1) = (1.0 - d.norm_sqr(), -b.norm_sqr());
    let (r0, r1) = (d.conj() * c, b.conj() * a);
    let alpha = |h: f64| p0 + p1 * h;
    let delta = |h: f64| q0 + q1 * h;
    let beta = |h: f64| (r0 + r1 * h).norm();
    let scale = |h: f64| 1.0 + h.abs() * (1.0 + a.norm_sqr() + b.norm_sqr()) + c.norm_sqr() + d.norm_sqr();
    let thr = |h: f64| tols.tol * scale(h);

    let mut roots: Vec<(f64, &'static str)> = Vec::new();
    // alpha delta - |beta|² = k2 h² + k1 h + k0
    let k2 = p1 * q1 - r1.norm_sqr();
    let k1 = p0 * q1 + p1 * q0 - 2.0 * (r0.conj() * r1).re;
    let k0 = p0 * q0 - r0.norm_sqr();
    let coeff_scale = k2.abs() + k1.abs() + k0.abs();
    if coeff_scale == 0.0 {
        if q1 == 0.0 && q0 > 0.0 {
            return Err(Error::InvalidArgument("Riccati equality holds for every h: the solution set is not finite".into()));
        }
    } else {
        for h in real_quadratic_roots(k2, k1, k0, coeff_scale) {
            roots.push((h, "closed-form"));
        }
    }

    // Boundary points where delta vanishes.
    let mut boundary = Vec::new();
    if q1 != 0.0 {
        boundary.push(-q0 / q1);
    } else if q0.abs() <= tols.tol {
        if p1 != 0.0 {
            boundary.push(-p0 / p1);
        } else if p0.abs() <= tols.tol && r0.norm() <= tols.tol {
            return Err(Error::InvalidArgument("Riccati equality holds for every h: the solution set is not finite".into()));
        }
    }

    let mut found: Vec<(f64, &'static str)> = Vec::new();
    for (h, route) in roots {
        if h > 0.0 && delta(h) > thr(h) {
            found.push((h, route));
        }
    }
    for h in boundary {
        if h > 0.0 && delta(h).abs() <= thr(h) && beta(h) <= thr(h) && alpha(h).abs() <= thr(h) {
            found.push((h, "closed-form-boundary"));
        }
    }
    found.sort_by(|x, y| x.0.total_cmp(&y.0));
    found.dedup_by(|x, y| (x.0 - y.0).abs() <= 1e-12 * (1.0 + y.0.abs()));

    let mut members = Vec::new();
    for (h, route) in found {
        let storage = StorageOperator::from_real_diag(&[h])?;
        let residual = residual_norm(sigma, storage.matrix(), tols);
        members.push((storage, MemberProvenance { route: route.into(), residual, iterations: 0 }));
    }
    let mut set = SolutionSet::new(members, Vec::new());
    order_solutions_with(&mut set, tols);
    Ok(set)
}

fn real_quadratic_roots(k2: f64, k1: f64, k0: f64, scale: f64) -> Vec<f64> {
    if k2.abs() <= 1e-14 * scale {
        if k1.abs() <= 1e-14 * scale {
            return Vec::new();
        }
        return vec![-k0 / k1];
    }
    let disc = k1 * k1 - 4.0 * k2 * k0;
    if disc < -1e-14 * scale * scale {
        return Vec::new();
    }
    let sq = disc.max(0.0).sqrt();
    // Stable form avoiding cancellation.
    let sign = if k1 >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (k1 + sign * sq);
    let mut out = Vec::new();
    if q != 0.0 {
        out.push(q / k2);
        out.push(k0 / q);
    } else {
        out.push(0.0);
    }
    out
}

// ---------------------------------------------------------------------------
// general dimension

/// `‖alpha - beta* delta^{[-1]} beta‖` with the membership rank threshold.
fn residual_norm(sigma: &SystemRealization, hm: &CMatrix, tols: &Tolerances) -> f64 {
    let (alpha, beta, delta) = raw_parts(sigma, hm);
    let delta = HermitianOperator::from_hermitian_part(&delta);
    let thr = tols.rank_tol * delta_scale_raw(sigma, hm).max(delta.norm());
    let pinv = thresholded_pseudo_inverse(&delta, thr);
    spectral_norm(&hermitian_part(&(alpha - beta.adjoint() * pinv.matrix() * beta)))
}

fn delta_scale_raw(sigma: &SystemRealization, hm: &CMatrix) -> f64 {
    let b = spectral_norm(sigma.b());
    let d = spectral_norm(sigma.d());
    1.0 + d * d + b * b * spectral_norm(hm)
}

struct NewtonEval {
    residual: CMatrix,
    residual_norm: f64,
    gain: CMatrix,
}

/// `F(H)` and `K = delta^{-1} beta`; `None` when `delta(H)` is not safely
/// invertible.
fn newton_eval(sigma: &SystemRealization, hm: &CMatrix, tols: &Tolerances) -> Option<NewtonEval> {
    let (alpha, beta, delta) = raw_parts(sigma, hm);
    let spec = Spectrum::of(&delta);
    let smallest = spec.values.iter().fold(f64::INFINITY, |acc, v| acc.min(v.abs()));
    if !(smallest > tols.rank_tol.sqrt() * delta_scale_raw(sigma, hm)) {
        return None;
    }
    let gain = hermitian_part(&delta).lu().solve(&beta)?;
    let residual = hermitian_part(&(alpha - beta.adjoint() * &gain));
    let residual_norm = spectral_norm(&residual);
    residual_norm.is_finite().then_some(NewtonEval { residual, residual_norm, gain })
}

/// Solves `E - M* E M = Q` for `E`.
fn solve_stein(m: &CMatrix, q: &CMatrix) -> Option<CMatrix> {
    let n = m.nrows();
    let op = identity(n * n) - m.transpose().kronecker(&m.adjoint());
    let rhs = crate::linalg::CVector::from_column_slice(q.as_slice());
    let sol = op.lu().solve(&rhs)?;
    let e = CMatrix::from_column_slice(n, n, sol.as_slice());
    crate::linalg::all_finite(&e).then(|| hermitian_part(&e))
}

enum NewtonOutcome {
    Converged { h: CMatrix, residual: f64, iterations: usize },
    Failed { best_residual: f64 },
}

/// Newton iteration for `F(H) = 0`. The derivative of `F` at `H` is the
/// Stein operator `E -> E - A_K* E A_K` with `A_K = A + B K`.
fn newton(sigma: &SystemRealization, start: CMatrix, cfg: &SolverConfig) -> NewtonOutcome {
    let tols = &cfg.tolerances;
    let mut h = hermitian_part(&start);
    let Some(mut eval) = newton_eval(sigma, &h, tols) else {
        return NewtonOutcome::Failed { best_residual: f64::INFINITY };
    };
    let mut best = eval.residual_norm;
    for iter in 0..cfg.max_iter {
        let scale = 1.0 + spectral_norm(&h);
        if eval.residual_norm <= cfg.iter_tol * scale {
            return NewtonOutcome::Converged { h, residual: eval.residual_norm, iterations: iter };
        }
        let closed_loop = sigma.a() + sigma.b() * &eval.gain;
        let Some(step) = solve_stein(&closed_loop, &(-&eval.residual)) else {
            return NewtonOutcome::Failed { best_residual: best };
        };
        // Backtrack on the residual norm; fall back to the full step.
        let mut t = 1.0;
        let mut accepted = None;
        while t >= 1.0 / 64.0 {
            let trial = &h + &step * re(t);
            if let Some(e) = newton_eval(sigma, &trial, tols) {
                if e.residual_norm < eval.residual_norm {
                    accepted = Some((trial, e));
                    break;
                }
            }
            t *= 0.5;
        }
        match accepted {
            Some((next, e)) => {
                h = next;
                eval = e;
            }
            None => {
                let next = &h + &step;
                match newton_eval(sigma, &next, tols) {
                    Some(e) => {
                        h = next;
                        eval = e;
                    }
                    None => return NewtonOutcome::Failed { best_residual: best },
                }
            }
        }
        if spectral_norm(&h) > 1e12 {
            return NewtonOutcome::Failed { best_residual: best };
        }
        best = best.min(eval.residual_norm);
        if eval.residual_norm <= 1e-9 * (1.0 + spectral_norm(&h)) && iter + 1 == cfg.max_iter {
            return NewtonOutcome::Converged { h, residual: eval.residual_norm, iterations: iter + 1 };
        }
    }
    let scale = 1.0 + spectral_norm(&h);
    if eval.residual_norm <= 1e-9 * scale {
        NewtonOutcome::Converged { h, residual: eval.residual_norm, iterations: cfg.max_iter }
    } else {
        NewtonOutcome::Failed { best_residual: best }
    }
}

/// Result of the monotone fixed-point iteration.
#[derive(Clone, Debug)]
pub struct FixedPoint {
    pub h: CMatrix,
    pub iterations: usize,
    pub residual: f64,
}

/// `H_{k+1} = A* H_k A + C* C + beta(H_k)* delta(H_k)^{[-1]} beta(H_k)` from
/// `start` until successive iterates agree to `iter_tol`.
pub fn fixed_point_iteration(sigma: &SystemRealization, start: &CMatrix, cfg: &SolverConfig) -> Result<FixedPoint> {
    let tols = &cfg.tolerances;
    let mut h = hermitian_part(start);
    for k in 1..=cfg.fixed_point_max_iter {
        let next = fixed_point_step(sigma, &h, tols).map_err(|_| Error::IterationDiverged { iterations: k })?;
        let norm = spectral_norm(&next);
        if norm > 1e12 {
            return Err(Error::IterationDiverged { iterations: k });
        }
        let step = spectral_norm(&(&next - &h));
        h = next;
        if step <= cfg.iter_tol * (1.0 + norm) {
            let residual = residual_norm(sigma, &h, tols);
            return Ok(FixedPoint { h, iterations: k, residual });
        }
    }
    Err(Error::IterationDiverged { iterations: cfg.fixed_point_max_iter })
}

/// One step `H -> A* H A + C* C + beta(H)* delta(H)^{[-1]} beta(H)`.
///
/// Fails with [`Error::DeltaNotPsd`] when `delta(H)` is indefinite and with
/// [`Error::NonFinite`] on overflow.
pub fn fixed_point_step(sigma: &SystemRealization, h: &CMatrix, tols: &Tolerances) -> Result<CMatrix> {
    let (a, c) = (sigma.a(), sigma.c());
    let (_, beta, delta) = raw_parts(sigma, h);
    let delta = HermitianOperator::from_hermitian_part(&delta);
    let dscale = delta_scale_raw(sigma, h);
    let spec = delta.spectrum();
    if spec.min() < -tols.tol * dscale {
        return Err(Error::DeltaNotPsd { min_eig: spec.min() });
    }
    let pinv = thresholded_pseudo_inverse(&delta, tols.rank_tol * dscale.max(spec.norm()));
    let next = hermitian_part(&(a.adjoint() * h * a + c.adjoint() * c + beta.adjoint() * pinv.matrix() * &beta));
    if !crate::linalg::all_finite(&next) {
        return Err(Error::NonFinite("fixed-point iterate".into()));
    }
    Ok(next)
}

/// Newton polish that is only accepted when it stays close and improves
/// the residual.
fn polish(sigma: &SystemRealization, h: &CMatrix, residual: f64, cfg: &SolverConfig) -> (CMatrix, f64, usize) {
    let short = SolverConfig { max_iter: 20, ..cfg.clone() };
    if let NewtonOutcome::Converged { h: p, residual: r, iterations } = newton(sigma, h.clone(), &short) {
        let moved = spectral_norm(&(&p - h));
        if r < residual && moved <= 1e-6 * (1.0 + spectral_norm(h)) {
            return (p, r, iterations);
        }
    }
    (h.clone(), residual, 0)
}

/// Multi-start search for solutions of the Riccati equality.
///
/// Results are validated by [`membership`], deduplicated, and ordered by
/// trace and then lexicographically, so the output only depends on the
/// system and the configuration. Completeness is not claimed.
pub fn solve_re(sigma: &SystemRealization, cfg: &SolverConfig) -> Result<SolutionSet> {
    let n = sigma.n();
    if n > cfg.max_dim {
        return Err(Error::TooLarge { n, max: cfg.max_dim });
    }
    let tols = &cfg.tolerances;
    let mut warnings = Vec::new();
    if !is_minimal(sigma, tols.minimal_tol).minimal {
        warnings.push("realization is not minimal; the solution set may be unbounded or degenerate".to_string());
    }

    // Candidates that bypass Newton: fixed-point limits, valid even where
    // delta(H) is singular.
    let mut candidates: Vec<(CMatrix, MemberProvenance)> = Vec::new();
    let mut starts: Vec<(CMatrix, String)> = Vec::new();
    let mut spectrum_range = (f64::INFINITY, 0.0_f64);
    let mut note_range = |m: &CMatrix| {
        let s = Spectrum::of(m);
        spectrum_range = (spectrum_range.0.min(s.min()), spectrum_range.1.max(s.max()));
    };

    if let Ok(fp) = fixed_point_iteration(sigma, &CMatrix::zeros(n, n), cfg) {
        note_range(&fp.h);
        let (h, residual, extra) = polish(sigma, &fp.h, fp.residual, cfg);
        candidates.push((h.clone(), MemberProvenance {
            route: "fixed-point".into(),
            residual,
            iterations: fp.iterations + extra,
        }));
        starts.push((h, "newton:fixed-point".into()));
    }
    let adj = adjoint(sigma);
    if let Ok(fp) = fixed_point_iteration(&adj, &CMatrix::zeros(n, n), cfg) {
        if let Some(inv) = fp.h.clone().try_inverse() {
            let inv = hermitian_part(&inv);
            note_range(&inv);
            let residual = residual_norm(sigma, &inv, tols);
            let (h, residual, extra) = polish(sigma, &inv, residual, cfg);
            candidates.push((h.clone(), MemberProvenance {
                route: "adjoint-fixed-point-inverse".into(),
                residual,
                iterations: fp.iterations + extra,
            }));
            starts.push((h, "newton:adjoint-fixed-point-inverse".into()));
        }
    }

    starts.push((identity(n), "newton:identity".into()));
    for (k, s) in [0.25, 0.5, 2.0, 4.0].into_iter().enumerate() {
        starts.push((identity(n) * re(s), format!("newton:scaled-identity#{k}")));
    }
    let (lo, hi) = if spectrum_range.0.is_finite() && spectrum_range.0 > 0.0 {
        (spectrum_range.0 * 0.5, spectrum_range.1 * 2.0)
    } else {
        (1e-2, 1e2)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for k in 0..cfg.starts {
        let h = crate::fixtures::random_pd(&mut rng, n, lo, hi);
        starts.push((h.into_matrix(), format!("newton:random#{k}")));
    }
    let anchors: Vec<CMatrix> = candidates.iter().map(|(h, _)| h.clone()).collect();
    for (k, anchor) in anchors.iter().enumerate() {
        for j in 0..2 {
            let pert = random_hermitian(&mut rng, n, 0.2 * (1.0 + spectral_norm(anchor)));
            starts.push((anchor + pert.matrix(), format!("newton:perturbed-anchor#{k}.{j}")));
        }
    }
    if anchors.len() == 2 {
        for (k, w) in [0.25, 0.5, 0.75].into_iter().enumerate() {
            let mix = &anchors[0] * re(w) + &anchors[1] * re(1.0 - w);
            starts.push((mix, format!("newton:anchor-mix#{k}")));
        }
    }

    let mut best_residual = f64::INFINITY;
    for (start, label) in starts {
        match newton(sigma, start, cfg) {
            NewtonOutcome::Converged { h, residual, iterations } => {
                best_residual = best_residual.min(residual);
                candidates.push((h, MemberProvenance { route: label, residual, iterations }));
            }
            NewtonOutcome::Failed { best_residual: r } => best_residual = best_residual.min(r),
        }
    }

    let mut accepted: Vec<(StorageOperator, MemberProvenance)> = Vec::new();
    for (h, prov) in candidates {
        best_residual = best_residual.min(prov.residual);
        let Ok(herm) = HermitianOperator::new(h) else { continue };
        let Ok(storage) = StorageOperator::with_tolerance(herm, tols.pd_tol) else { continue };
        let verdict = match membership(sigma, &storage, tols) {
            Ok(v) => v,
            Err(_) => continue,
        };
        if !verdict.in_re {
            continue;
        }
        let dup = accepted.iter_mut().find(|(s, _)| {
            spectral_norm(&(s.matrix() - storage.matrix())) <= cfg.dedup_tol * (1.0 + s.operator().trace())
        });
        match dup {
            Some(existing) => {
                if prov.residual < existing.1.residual {
                    *existing = (storage, prov);
                }
            }
            None => accepted.push((storage, prov)),
        }
    }
    if accepted.is_empty() {
        return Err(Error::NoConvergence { best_residual });
    }
    let mut set = SolutionSet::new(accepted, warnings);
    order_solutions_with(&mut set, tols);
    Ok(set)
}

/// RE set by the closed form when the system is scalar, by [`solve_re`]
/// otherwise.
pub fn re_set(sigma: &SystemRealization, cfg: &SolverConfig) -> Result<SolutionSet> {
    if sigma.n() == 1 && sigma.m() == 1 && sigma.p() == 1 {
        solve_re_scalar_with(sigma, &cfg.tolerances)
    } else {
        solve_re(sigma, cfg)
    }
}

fn order_tol(members: &[StorageOperator], tols: &Tolerances) -> f64 {
    let scale = members.iter().map(|m| m.operator().norm()).fold(1.0, f64::max);
    10.0 * tols.tol * scale
}

/// Fills pairwise Loewner comparisons and flags a member that lies below
/// (above) every other member as minimal (maximal).
pub fn order_solutions(set: &mut SolutionSet) {
    order_solutions_with(set, &Tolerances::default())
}

#[allow(clippy::needless_range_loop)]
pub fn order_solutions_with(set: &mut SolutionSet, tols: &Tolerances) {
    let tol = order_tol(&set.members, tols);
    let k = set.members.len();
    let mut table = vec![vec![LoewnerOrder::Equal; k]; k];
    set.comparisons.clear();
    for i in 0..k {
        for j in (i + 1)..k {
            let o = loewner_compare(set.members[i].operator(), set.members[j].operator(), tol)
                .expect("members share the state dimension");
            table[i][j] = o;
            table[j][i] = o.reversed();
            set.comparisons.push(Comparison { i, j, order: o });
        }
    }
    let below = |o: LoewnerOrder| matches!(o, LoewnerOrder::LessEq | LoewnerOrder::Equal);
    let above = |o: LoewnerOrder| matches!(o, LoewnerOrder::GreaterEq | LoewnerOrder::Equal);
    set.minimal_index = (0..k).find(|&i| (0..k).all(|j| below(table[i][j])));
    set.maximal_index = (0..k).find(|&i| (0..k).all(|j| above(table[i][j])));
}

// ---------------------------------------------------------------------------
// RI sampling

/// Rejection sampling of RI members around `anchors` (known members).
///
/// RI is convex in `H` (the KYP LMI is affine), so random convex
/// combinations of anchors are members; perturbations of them are kept when
/// the LMI route accepts them.
pub fn sample_ri_members<R: Rng + ?Sized>(
    sigma: &SystemRealization,
    anchors: &[StorageOperator],
    count: usize,
    rng: &mut R,
    tols: &Tolerances,
) -> Vec<StorageOperator> {
    let mut out = Vec::with_capacity(count);
    if anchors.is_empty() {
        return out;
    }
    let n = sigma.n();
    let max_attempts = 10 * count.max(1);
    for _ in 0..max_attempts {
        if out.len() >= count {
            break;
        }
        let weights: Vec<f64> = anchors.iter().map(|_| rng.gen_range(0.0..1.0_f64).powi(2) + 1e-3).collect();
        let total: f64 = weights.iter().sum();
        let mut h = CMatrix::zeros(n, n);
        for (w, a) in weights.iter().zip(anchors) {
            h += a.matrix() * re(w / total);
        }
        let eps = [0.0, 1e-3, 1e-2, 5e-2, 0.2][rng.gen_range(0..5)];
        if eps > 0.0 {
            h += random_hermitian(rng, n, eps * (1.0 + spectral_norm(&h))).matrix();
        }
        let Ok(storage) = StorageOperator::with_tolerance(HermitianOperator::from_hermitian_part(&h), tols.pd_tol)
        else {
            continue;
        };
        let Ok(lmi) = crate::riccati::kyp_lmi(sigma, &storage) else { continue };
        let thr = tols.tol * crate::riccati::lmi_scale(sigma, &storage);
        if lmi.min_eigenvalue() >= thr {
            out.push(storage);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// extremal solutions

fn certificate_against(
    candidate: &StorageOperator,
    others: &[StorageOperator],
    samples: &[StorageOperator],
    lower: bool,
    tols: &Tolerances,
) -> Result<ExtremalityCertificate> {
    let mut worst = f64::INFINITY;
    for (k, other) in others.iter().chain(samples.iter()).enumerate() {
        let diff = if lower {
            other.matrix() - candidate.matrix()
        } else {
            candidate.matrix() - other.matrix()
        };
        let margin = Spectrum::of(&diff).min();
        worst = worst.min(margin);
        let tol = 10.0 * tols.tol * (1.0 + candidate.operator().norm().max(other.operator().norm()));
        if margin < -tol {
            let what = if k < others.len() { "RE member" } else { "sampled RI member" };
            let side = if lower { "below" } else { "above" };
            return Err(Error::CertificateFailed(format!(
                "{what} #{k} lies strictly {side} the candidate (margin {margin:e})"
            )));
        }
    }
    Ok(ExtremalityCertificate {
        re_members_compared: others.len(),
        ri_samples_compared: samples.len(),
        worst_margin: if worst.is_finite() { worst } else { 0.0 },
    })
}

fn minimal_candidate(sigma: &SystemRealization, cfg: &SolverConfig) -> Result<(StorageOperator, usize, f64)> {
    let n = sigma.n();
    let fp = fixed_point_iteration(sigma, &CMatrix::zeros(n, n), cfg)?;
    let (h, residual, extra) = polish(sigma, &fp.h, fp.residual, cfg);
    let storage = StorageOperator::with_tolerance(HermitianOperator::from_hermitian_part(&h), cfg.tolerances.pd_tol)
        .map_err(|_| Error::CertificateFailed("fixed-point limit is not positive definite".into()))?;
    Ok((storage, fp.iterations + extra, residual))
}

/// The minimal element of RI°.
pub fn minimal_solution(sigma: &SystemRealization, cfg: &SolverConfig) -> Result<ExtremalSolution> {
    let tols = &cfg.tolerances;
    if !is_minimal(sigma, tols.minimal_tol).minimal {
        return Err(Error::NotMinimal);
    }
    let (storage, iterations, residual) = minimal_candidate(sigma, cfg)?;
    let verdict = membership(sigma, &storage, tols)?;
    if !verdict.in_re {
        return Err(Error::CertificateFailed(
            "fixed-point limit does not solve the Riccati equality".into(),
        ));
    }
    let re = re_set(sigma, cfg)?;
    let mut anchors = re.members.clone();
    anchors.push(storage.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed_0001);
    let samples = sample_ri_members(sigma, &anchors, cfg.samples, &mut rng, tols);
    let certificate = certificate_against(&storage, &re.members, &samples, true, tols)?;
    Ok(ExtremalSolution { storage, iterations, residual, certificate })
}

/// The maximal element of RI°, as the inverse of the minimal element for
/// the adjoint system.
pub fn maximal_solution(sigma: &SystemRealization, cfg: &SolverConfig) -> Result<ExtremalSolution> {
    let tols = &cfg.tolerances;
    let dual = minimal_solution(&adjoint(sigma), cfg)?;
    let storage = dual.storage.inverse();
    let verdict = membership(sigma, &storage, tols)?;
    if !verdict.in_ri {
        return Err(Error::CertificateFailed(
            "inverse of the adjoint's minimal solution is not in RI".into(),
        ));
    }
    let re = re_set(sigma, cfg)?;
    let mut anchors = re.members.clone();
    anchors.push(storage.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed_0002);
    let samples = sample_ri_members(sigma, &anchors, cfg.samples, &mut rng, tols);
    let certificate = certificate_against(&storage, &re.members, &samples, false, tols)?;
    let residual = residual_norm(sigma, storage.matrix(), tols);
    Ok(ExtremalSolution { storage, iterations: dual.iterations, residual, certificate })
}

fn sets_coincide(a: &[CMatrix], b: &[CMatrix], dedup_tol: f64) -> bool {
    a.len() == b.len()
        && a.iter().all(|x| b.iter().any(|y| spectral_norm(&(x - y)) <= dedup_tol * (1.0 + trace(x).abs())))
}

/// Checks that inversion maps sampled RI° members of `sigma` into RI° of the
/// adjoint, and compares the inverse image of `RE_sigma` with `RE_{sigma*}`.
pub fn duality_check(sigma: &SystemRealization, cfg: &SolverConfig) -> Result<DualityReport> {
    let tols = &cfg.tolerances;
    if !is_minimal(sigma, tols.minimal_tol).minimal {
        return Err(Error::NotMinimal);
    }
    let adj = adjoint(sigma);
    let re_sigma = re_set(sigma, cfg)?;
    let re_adj = re_set(&adj, cfg)?;

    let mut anchors = re_sigma.members.clone();
    anchors.extend(re_adj.members.iter().map(StorageOperator::inverse));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed_0003);
    let samples = sample_ri_members(sigma, &anchors, cfg.samples, &mut rng, tols);

    let mut reports = Vec::with_capacity(samples.len());
    for h in &samples {
        let inv = h.inverse();
        let v = membership(&adj, &inv, tols)?;
        reports.push(DualitySample {
            trace: h.operator().trace(),
            adjoint_lmi_min_eig: v.diagnostics.lmi_min_eig,
            passed: v.in_ri_circ,
        });
    }
    let all_passed = reports.iter().all(|r| r.passed);
    let re_inverse_image: Vec<CMatrix> = re_sigma.members.iter().map(|h| h.inverse().matrix().clone()).collect();
    let re_adjoint: Vec<CMatrix> = re_adj.members.iter().map(|h| h.matrix().clone()).collect();
    let re_sets_coincide = sets_coincide(&re_inverse_image, &re_adjoint, cfg.dedup_tol);
    Ok(DualityReport {
        samples: reports,
        all_passed,
        re_sigma: re_sigma.members.iter().map(|h| h.matrix().clone()).collect(),
        re_adjoint,
        re_inverse_image,
        re_sets_coincide,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{scalar_interval, shift, two_state};

    fn scalar_values(set: &SolutionSet) -> Vec<f64> {
        set.members.iter().map(|h| h.matrix()[(0, 0)].re).collect()
    }

    #[test]
    fn scalar_closed_form() {
        let set = solve_re_scalar(&scalar_interval()).unwrap();
        let v = scalar_values(&set);
        assert_eq!(v.len(), 1);
        assert!((v[0] - 3.0 / 64.0).abs() < 1e-15);
        let set = solve_re_scalar(&adjoint(&scalar_interval())).unwrap();
        let v = scalar_values(&set);
        assert_eq!(v.len(), 1);
        assert!((v[0] - 4.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn scalar_shift_boundary_solution() {
        let set = solve_re_scalar(&shift()).unwrap();
        assert_eq!(scalar_values(&set), vec![1.0]);
        assert_eq!(set.provenance[0].route, "closed-form-boundary");
    }

    #[test]
    fn scalar_rejects_matrix_systems() {
        assert!(matches!(solve_re_scalar(&two_state(0.6, 0.8)), Err(Error::NotScalar)));
    }

    #[test]
    fn quadratic_roots() {
        let mut r = real_quadratic_roots(1.0, -3.0, 2.0, 6.0);
        r.sort_by(f64::total_cmp);
        assert_eq!(r, vec![1.0, 2.0]);
        assert!(real_quadratic_roots(1.0, 0.0, 1.0, 2.0).is_empty());
        assert_eq!(real_quadratic_roots(0.0, 2.0, -1.0, 3.0), vec![0.5]);
    }

    #[test]
    fn stein_solution_satisfies_equation() {
        let m = crate::linalg::from_real(2, 2, &[0.5, 0.2, -0.1, 0.3]);
        let q = crate::linalg::from_real(2, 2, &[1.0, 0.5, 0.5, 2.0]);
        let e = solve_stein(&m, &q).unwrap();
        assert!((&e - m.adjoint() * &e * &m - q).norm() < 1e-12);
    }

    #[test]
    fn fixed_point_reaches_scalar_minimum() {
        let fp = fixed_point_iteration(&scalar_interval(), &CMatrix::zeros(1, 1), &SolverConfig::default()).unwrap();
        assert!((fp.h[(0, 0)].re - 3.0 / 64.0).abs() < 1e-14);
    }

    #[test]
    fn general_solver_on_scalar_system() {
        let set = solve_re(&scalar_interval(), &SolverConfig::default()).unwrap();
        let v = scalar_values(&set);
        assert_eq!(v.len(), 1);
        assert!((v[0] - 3.0 / 64.0).abs() < 1e-12);
    }

    #[test]
    fn too_large_is_rejected() {
        let cfg = SolverConfig { max_dim: 1, ..SolverConfig::default() };
        assert!(matches!(solve_re(&two_state(0.6, 0.8), &cfg), Err(Error::TooLarge { n: 2, max: 1 })));
    }

    #[test]
    fn singleton_is_both_extremes() {
        let mut set = solve_re_scalar(&scalar_interval()).unwrap();
        order_solutions(&mut set);
        assert_eq!(set.minimal_index, Some(0));
        assert_eq!(set.maximal_index, Some(0));
        assert!(set.comparisons.is_empty());
    }

    #[test]
    fn extremes_of_scalar_interval() {
        let cfg = SolverConfig::default();
        let lo = minimal_solution(&scalar_interval(), &cfg).unwrap();
        assert!((lo.storage.matrix()[(0, 0)].re - 3.0 / 64.0).abs() < 1e-12);
        let hi = maximal_solution(&scalar_interval(), &cfg).unwrap();
        assert!((hi.storage.matrix()[(0, 0)].re - 0.75).abs() < 1e-10);
    }

    #[test]
    fn minimal_requires_minimal_realization() {
        let s = SystemRealization::from_real(2, 1, 1, &[0.5, 0.0, 0.0, 0.25], &[1.0, 0.0], &[1.0, 0.0], &[0.0])
            .unwrap();
        assert!(matches!(minimal_solution(&s, &SolverConfig::default()), Err(Error::NotMinimal)));
    }

    #[test]
    fn two_state_has_four_ordered_solutions() {
        let sigma = two_state(0.6, 0.8);
        let mut set = solve_re(&sigma, &SolverConfig::default()).unwrap();
        order_solutions(&mut set);
        let expected = crate::fixtures::two_state_solutions(0.6, 0.8);
        assert_eq!(set.len(), 4, "{:?}", set.members.iter().map(|h| h.matrix().clone()).collect::<Vec<_>>());
        for e in &expected {
            assert!(set.members.iter().any(|h| (h.matrix() - e).norm() < 1e-8));
        }
        assert!((set.minimal().unwrap().matrix() - &expected[0]).norm() < 1e-8);
        assert!((set.maximal().unwrap().matrix() - &expected[3]).norm() < 1e-8);
    }
}
