//! Reference systems and random generators.
//!
//! The reference systems are small realizations with known solution sets;
//! the generators produce random contractions, passive systems and
//! Hermitian operators for property checks and rejection sampling.

use rand::Rng;

use crate::linalg::{c, from_real, identity, re, spectral_norm, CMatrix, C64};
use crate::opcore::HermitianOperator;
use crate::sysmodel::SystemRealization;

/// `theta(lambda) = (2 lambda + 4) / (lambda + 8)`, realized as
/// `(-1/8, 1, 3/16, 1/2)`. RE = {3/64}, RI = [3/64, 3/4].
pub fn scalar_interval() -> SystemRealization {
    SystemRealization::from_real(1, 1, 1, &[-0.125], &[1.0], &[0.1875], &[0.5]).expect("valid")
}

/// `theta(lambda) = lambda a b / (1 - lambda² a b)` with `a² + b² = 1`,
/// realized on `C²` with `A = [[0, a], [b, 0]]`, `B = [0; a]`,
/// `C = [0, b]`, `D = 0`.
pub fn two_state(a: f64, b: f64) -> SystemRealization {
    SystemRealization::from_real(2, 1, 1, &[0.0, a, b, 0.0], &[0.0, a], &[0.0, b], &[0.0]).expect("valid")
}

/// The four Riccati-equality solutions of [`two_state`], ordered
/// `[H1, H2, H3, H4]`: the identity, the two solutions with equal diagonals
/// and off-diagonal entries of opposite sign, and the diagonal maximal one.
pub fn two_state_solutions(a: f64, b: f64) -> [CMatrix; 4] {
    let s = (b / a).sqrt();
    let scale = 1.0 / (a * a);
    let d1 = (1.0 - a * b) * b / a;
    let off = (b - a) * s;
    let d2 = 1.0 - a * b;
    let h2 = from_real(2, 2, &[d1, off, off, d2]) * re(scale);
    let h3 = from_real(2, 2, &[d1, -off, -off, d2]) * re(scale);
    let a4 = a.powi(4);
    let h4 = from_real(2, 2, &[b.powi(4) / a4, 0.0, 0.0, a * a * b * b / a4]);
    [identity(2), h2, h3, h4]
}

/// `theta(z) = [z, 0]`: `A = 0`, `B = [1, 0]`, `C = 1`, `D = [0, 0]`.
/// Co-inner, with a co-isometric system matrix.
pub fn coinner_row() -> SystemRealization {
    SystemRealization::from_real(1, 2, 1, &[0.0], &[1.0, 0.0], &[1.0], &[0.0, 0.0]).expect("valid")
}

/// `theta(lambda) = lambda`: `(0, 1, 1, 0)`.
pub fn shift() -> SystemRealization {
    SystemRealization::from_real(1, 1, 1, &[0.0], &[1.0], &[1.0], &[0.0]).expect("valid")
}

/// Unitary realization of the single Blaschke factor
/// `(lambda - a) / (1 - conj(a) lambda)`.
pub fn blaschke_factor(a: C64) -> SystemRealization {
    let s = (1.0 - a.norm_sqr()).sqrt();
    let m = |z: C64| CMatrix::from_element(1, 1, z);
    SystemRealization::new(m(a.conj()), m(re(s)), m(re(s)), m(-a)).expect("valid")
}

/// Series connection: the output of `first` drives `second`, so the
/// transfer function is `theta_second * theta_first`.
pub fn cascade(first: &SystemRealization, second: &SystemRealization) -> SystemRealization {
    let (n1, n2) = (first.n(), second.n());
    let mut a = CMatrix::zeros(n1 + n2, n1 + n2);
    a.view_mut((0, 0), (n1, n1)).copy_from(first.a());
    a.view_mut((n1, n1), (n2, n2)).copy_from(second.a());
    a.view_mut((n1, 0), (n2, n1)).copy_from(&(second.b() * first.c()));
    let mut b = CMatrix::zeros(n1 + n2, first.m());
    b.view_mut((0, 0), (n1, first.m())).copy_from(first.b());
    b.view_mut((n1, 0), (n2, first.m())).copy_from(&(second.b() * first.d()));
    let mut cm = CMatrix::zeros(second.p(), n1 + n2);
    cm.view_mut((0, 0), (second.p(), n1)).copy_from(&(second.d() * first.c()));
    cm.view_mut((0, n1), (second.p(), n2)).copy_from(second.c());
    let d = second.d() * first.d();
    SystemRealization::new(a, b, cm, d).expect("consistent cascade")
}

/// Unitary (hence minimal) realization of the finite Blaschke product with
/// the given zeros.
pub fn blaschke_product(zeros: &[C64]) -> SystemRealization {
    let mut iter = zeros.iter();
    let first = blaschke_factor(*iter.next().expect("at least one zero"));
    iter.fold(first, |acc, &z| cascade(&acc, &blaschke_factor(z)))
}

/// `(T A T^{-1}, T B, C T^{-1}, D)`.
pub fn similarity(sigma: &SystemRealization, t: &CMatrix) -> SystemRealization {
    let t_inv = t.clone().try_inverse().expect("invertible similarity");
    SystemRealization::new(t * sigma.a() * &t_inv, t * sigma.b(), sigma.c() * &t_inv, sigma.d().clone())
        .expect("similarity preserves dimensions")
}

pub fn random_complex<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

pub fn random_real<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| re(rng.gen_range(-1.0..1.0)))
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    random_complex(rng, n, n).qr().q()
}

/// Random matrix with spectral norm exactly `norm`.
pub fn random_contraction<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, norm: f64) -> CMatrix {
    let m = random_complex(rng, rows, cols);
    let s = spectral_norm(&m);
    m * re(norm / s)
}

/// System whose system matrix is a random matrix of the given norm.
pub fn random_system<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize, p: usize, norm: f64) -> SystemRealization {
    let big = random_contraction(rng, n + p, n + m, norm);
    SystemRealization::new(
        big.view((0, 0), (n, n)).into_owned(),
        big.view((0, n), (n, m)).into_owned(),
        big.view((n, 0), (p, n)).into_owned(),
        big.view((n, n), (p, m)).into_owned(),
    )
    .expect("consistent blocks")
}

/// `U diag(values) U*` with random unitary `U`.
pub fn random_hermitian_with_spectrum<R: Rng + ?Sized>(rng: &mut R, values: &[f64]) -> HermitianOperator {
    let u = random_unitary(rng, values.len());
    HermitianOperator::from_hermitian_part(&(&u * crate::linalg::real_diag(values) * u.adjoint()))
}

/// Positive definite with eigenvalues drawn log-uniformly from `[lo, hi]`.
pub fn random_pd<R: Rng + ?Sized>(rng: &mut R, n: usize, lo: f64, hi: f64) -> HermitianOperator {
    let values: Vec<f64> = (0..n).map(|_| (rng.gen_range(lo.ln()..=hi.ln())).exp()).collect();
    random_hermitian_with_spectrum(rng, &values)
}

/// Positive semidefinite of the given rank with nonzero eigenvalues in
/// `[0.1, 10]`.
pub fn random_psd_of_rank<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> HermitianOperator {
    let values: Vec<f64> = (0..n).map(|k| if k < rank { rng.gen_range(0.1..10.0) } else { 0.0 }).collect();
    random_hermitian_with_spectrum(rng, &values)
}

/// Random Hermitian matrix with spectral norm `norm`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize, norm: f64) -> HermitianOperator {
    let m = random_complex(rng, n, n);
    let h = crate::linalg::hermitian_part(&m);
    let s = spectral_norm(&h).max(f64::MIN_POSITIVE);
    HermitianOperator::from_hermitian_part(&(h * re(norm / s)))
}
