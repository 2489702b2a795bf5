//! Small dense complex linear-algebra helpers shared by every module.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    Complex::new(x, 0.0)
}

pub fn from_real(rows: usize, cols: usize, data_row_major: &[f64]) -> CMatrix {
    assert_eq!(data_row_major.len(), rows * cols);
    CMatrix::from_fn(rows, cols, |i, j| re(data_row_major[i * cols + j]))
}

pub fn real_diag(values: &[f64]) -> CMatrix {
    let n = values.len();
    CMatrix::from_fn(n, n, |i, j| if i == j { re(values[i]) } else { re(0.0) })
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Largest singular value; zero for empty matrices.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0_f64, |acc, &s| acc.max(s))
}

pub fn max_abs_entry(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn all_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// (M + M*) / 2.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * re(0.5)
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues in ascending order.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    /// Columns are orthonormal eigenvectors, in the order of `values`.
    pub vectors: CMatrix,
}

impl Spectrum {
    pub fn of(m: &CMatrix) -> Spectrum {
        let n = m.nrows();
        if n == 0 {
            return Spectrum { values: Vec::new(), vectors: CMatrix::zeros(0, 0) };
        }
        let eig = SymmetricEigen::new(hermitian_part(m));
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = CMatrix::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
        Spectrum { values, vectors }
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Largest absolute eigenvalue.
    pub fn norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// V diag(f(lambda)) V*.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for k in 0..n {
            scaled.column_mut(k).scale_mut(f(self.values[k]));
        }
        hermitian_part(&(scaled * self.vectors.adjoint()))
    }

    /// Orthonormal basis of the eigenvectors whose eigenvalue satisfies `keep`.
    pub fn basis_where(&self, keep: impl Fn(f64) -> bool) -> CMatrix {
        let cols: Vec<usize> = (0..self.values.len()).filter(|&k| keep(self.values[k])).collect();
        CMatrix::from_fn(self.vectors.nrows(), cols.len(), |r, k| self.vectors[(r, cols[k])])
    }
}

/// Smallest eigenvalue of the Hermitian part.
pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    Spectrum::of(m).min()
}

/// Orthogonal projector onto the span of the (orthonormal) columns of `q`.
pub fn projector(q: &CMatrix, dim: usize) -> CMatrix {
    if q.ncols() == 0 {
        return CMatrix::zeros(dim, dim);
    }
    q * q.adjoint()
}

/// Orthonormal basis of the column space of `m`, rank decided against
/// `rel_tol * sigma_max` (and an absolute floor of `abs_floor`).
pub fn range_basis(m: &CMatrix, rel_tol: f64, abs_floor: f64) -> CMatrix {
    let rows = m.nrows();
    if m.is_empty() {
        return CMatrix::zeros(rows, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.iter().fold(0.0_f64, |a, &s| a.max(s));
    let threshold = (rel_tol * smax).max(abs_floor);
    let cols: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > threshold)
        .collect();
    CMatrix::from_fn(rows, cols.len(), |r, k| u[(r, cols[k])])
}

/// Orthonormal basis of the orthogonal complement of span(q) in C^dim.
pub fn complement_basis(q: &CMatrix, dim: usize) -> CMatrix {
    let p = identity(dim) - projector(q, dim);
    Spectrum::of(&p).basis_where(|v| v > 0.5)
}

/// Stacks `[top; bottom]`.
pub fn vstack(top: &CMatrix, bottom: &CMatrix) -> CMatrix {
    assert_eq!(top.ncols(), bottom.ncols());
    let mut out = CMatrix::zeros(top.nrows() + bottom.nrows(), top.ncols());
    out.view_mut((0, 0), top.shape()).copy_from(top);
    out.view_mut((top.nrows(), 0), bottom.shape()).copy_from(bottom);
    out
}

/// Stacks `[left, right]`.
pub fn hstack(left: &CMatrix, right: &CMatrix) -> CMatrix {
    assert_eq!(left.nrows(), right.nrows());
    let mut out = CMatrix::zeros(left.nrows(), left.ncols() + right.ncols());
    out.view_mut((0, 0), left.shape()).copy_from(left);
    out.view_mut((0, left.ncols()), right.shape()).copy_from(right);
    out
}

/// `[[a, b], [c, d]]`.
pub fn block2x2(a: &CMatrix, b: &CMatrix, c: &CMatrix, d: &CMatrix) -> CMatrix {
    vstack(&hstack(a, b), &hstack(c, d))
}

/// `<M v, v>` real part.
pub fn quadratic_form(m: &CMatrix, v: &CVector) -> f64 {
    (v.adjoint() * m * v)[(0, 0)].re
}

pub fn block_diag(a: &CMatrix, b: &CMatrix) -> CMatrix {
    block2x2(
        a,
        &CMatrix::zeros(a.nrows(), b.ncols()),
        &CMatrix::zeros(b.nrows(), a.ncols()),
        b,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_is_ascending_and_reconstructs() {
        let m = from_real(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, 0.5, 0.0, 0.5, 1.0]);
        let s = Spectrum::of(&m);
        assert!(s.values.windows(2).all(|w| w[0] <= w[1]));
        let back = s.map(|v| v);
        assert!((back - m).norm() < 1e-12);
    }

    #[test]
    fn range_and_complement_split_the_space() {
        let m = from_real(3, 2, &[1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let q = range_basis(&m, 1e-12, 0.0);
        assert_eq!(q.ncols(), 1);
        let k = complement_basis(&q, 3);
        assert_eq!(k.ncols(), 2);
        assert!((q.adjoint() * &k).norm() < 1e-12);
    }
}
