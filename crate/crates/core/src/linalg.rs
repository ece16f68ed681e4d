//! Dense complex linear-algebra helpers built on nalgebra.

use nalgebra::{DMatrix, Schur, SymmetricEigen, QR};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{re, ComplexMatrix, ComplexVector, Real};

pub fn identity<T: Real>(n: usize) -> ComplexMatrix<T> {
    DMatrix::identity(n, n)
}

pub fn zeros<T: Real>(rows: usize, cols: usize) -> ComplexMatrix<T> {
    DMatrix::zeros(rows, cols)
}

/// Lifts a real matrix given in row-major order.
pub fn from_real_rows<T: Real>(rows: usize, cols: usize, data: &[f64]) -> ComplexMatrix<T> {
    assert_eq!(data.len(), rows * cols);
    DMatrix::from_fn(rows, cols, |i, j| re(T::lit(data[i * cols + j])))
}

pub fn from_real_vec<T: Real>(data: &[f64]) -> ComplexVector<T> {
    ComplexVector::from_iterator(data.len(), data.iter().map(|&x| re(T::lit(x))))
}

/// `(M + M*) / 2`.
pub fn hermitian_part<T: Real>(m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    (m + m.adjoint()).scale(T::lit(0.5))
}

pub fn all_finite<T: Real>(m: &ComplexMatrix<T>) -> bool {
    m.iter().all(|z| z.re.is_finite_value() && z.im.is_finite_value())
}

/// Eigenvalues of a Hermitian matrix in ascending order. The input is
/// symmetrized first, so rounding asymmetry cannot leak into the result.
pub fn hermitian_eigenvalues<T: Real>(m: &ComplexMatrix<T>) -> Vec<T> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let h = hermitian_part(m);
    let mut vals: Vec<T> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    vals
}

/// Hermitian eigendecomposition with eigenvalues ascending and matching
/// eigenvector columns.
pub fn hermitian_eigh<T: Real>(m: &ComplexMatrix<T>) -> (Vec<T>, ComplexMatrix<T>) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .expect("finite eigenvalues")
    });
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (vals, vecs)
}

/// Singular values in descending order; empty for degenerate shapes.
pub fn singular_values<T: Real>(m: &ComplexMatrix<T>) -> Vec<T> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<T> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
    s
}

/// Thin SVD `m = U diag(sigma) V*` with descending `sigma`.
///
/// nalgebra's complex SVD occasionally stops with an off-diagonal residue
/// around `1e-9 |m|` when singular values cluster. The factorization is
/// therefore repeated on the nearly diagonal `U* m V` until the residue is at
/// roundoff level.
pub fn thin_svd<T: Real>(m: &ComplexMatrix<T>) -> (ComplexMatrix<T>, Vec<T>, ComplexMatrix<T>) {
    let svd = m.clone().svd(true, true);
    let mut u = svd.u.expect("left singular vectors requested");
    let mut v = svd.v_t.expect("right singular vectors requested").adjoint();
    let mut sigma: Vec<T> = svd.singular_values.iter().copied().collect();
    let scale = sigma.first().copied().unwrap_or_else(T::zero);
    let target = T::lit(64.0) * T::machine_epsilon() * scale;
    for _ in 0..3 {
        let inner = u.adjoint() * m * &v;
        let mut off = inner.clone();
        off.fill_diagonal(Complex::new(T::zero(), T::zero()));
        if off.norm() <= target {
            break;
        }
        let again = inner.svd(true, true);
        u = &u * again.u.expect("left singular vectors requested");
        v = &v * again.v_t.expect("right singular vectors requested").adjoint();
        sigma = again.singular_values.iter().copied().collect();
    }
    (u, sigma, v)
}

/// Orthonormal frames for the leading rank-`k` singular subspaces of `m`.
/// Starts from the SVD and polishes with two rounds of subspace iteration,
/// since the complex SVD can leak a large column into a null direction
/// when singular values cluster.
pub fn range_frames<T: Real>(
    m: &ComplexMatrix<T>,
    u: &ComplexMatrix<T>,
    v: &ComplexMatrix<T>,
    k: usize,
) -> (ComplexMatrix<T>, ComplexMatrix<T>) {
    let mut uk = u.columns(0, k).into_owned();
    let mut vk = v.columns(0, k).into_owned();
    if k == 0 {
        return (uk, vk);
    }
    for _ in 0..2 {
        uk = QR::new(m * &vk).q();
        vk = QR::new(m.adjoint() * &uk).q();
    }
    uk = QR::new(m * &vk).q();
    (uk, vk)
}

/// Largest singular value (zero for empty matrices).
pub fn spectral_norm<T: Real>(m: &ComplexMatrix<T>) -> T {
    singular_values(m).first().copied().unwrap_or_else(T::zero)
}

pub fn vector_norm<T: Real>(v: &ComplexVector<T>) -> T {
    v.norm()
}

/// All eigenvalues of a general square complex matrix via the complex Schur form.
pub fn eigenvalues<T: Real>(m: &ComplexMatrix<T>) -> Result<Vec<Complex<T>>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let eps = T::lit(8.0) * T::machine_epsilon();
    let schur = Schur::try_new(m.clone(), eps, 10_000 * n.max(10))
        .ok_or(Error::NoConvergence)?;
    // Complex Schur forms are upper triangular, so the diagonal is the spectrum.
    let (_, t) = schur.unpack();
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

/// Inverse when the matrix is numerically nonsingular:
/// `sigma_min > rel_tol * sigma_max`.
pub fn checked_inverse<T: Real>(m: &ComplexMatrix<T>, rel_tol: T) -> Option<ComplexMatrix<T>> {
    if m.nrows() != m.ncols() {
        return None;
    }
    if m.nrows() == 0 {
        return Some(m.clone());
    }
    let s = singular_values(m);
    let (smax, smin) = (s[0], s[s.len() - 1]);
    if smax == T::zero() || smin <= rel_tol * smax {
        return None;
    }
    m.clone().lu().try_inverse()
}

/// Solves `m x = b` when `m` is numerically nonsingular.
pub fn checked_solve<T: Real>(
    m: &ComplexMatrix<T>,
    b: &ComplexVector<T>,
    rel_tol: T,
) -> Option<ComplexVector<T>> {
    if m.nrows() != m.ncols() || m.nrows() != b.len() {
        return None;
    }
    if m.nrows() == 0 {
        return Some(b.clone());
    }
    let s = singular_values(m);
    let (smax, smin) = (s[0], s[s.len() - 1]);
    if smax == T::zero() || smin <= rel_tol * smax {
        return None;
    }
    m.clone().lu().solve(b)
}

/// Orthonormal basis of the orthogonal complement of the column span of
/// `basis` (assumed to have orthonormal columns) inside `C^n`.
pub fn orthonormal_complement<T: Real>(basis: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let (n, r) = basis.shape();
    if r == n {
        return zeros(n, 0);
    }
    if r == 0 {
        return identity(n);
    }
    let mut stacked = zeros::<T>(n, r + n);
    stacked.view_mut((0, 0), (n, r)).copy_from(basis);
    stacked.view_mut((0, r), (n, n)).copy_from(&identity::<T>(n));
    let q = QR::new(stacked).q();
    q.columns(r, n - r).into_owned()
}

/// Assembles `[[a, b], [c, d]]`.
pub fn block2<T: Real>(
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
    c: &ComplexMatrix<T>,
    d: &ComplexMatrix<T>,
) -> ComplexMatrix<T> {
    debug_assert_eq!(a.nrows(), b.nrows());
    debug_assert_eq!(c.nrows(), d.nrows());
    debug_assert_eq!(a.ncols(), c.ncols());
    debug_assert_eq!(b.ncols(), d.ncols());
    let (r0, c0) = a.shape();
    let (r1, c1) = d.shape();
    let mut out = zeros::<T>(r0 + r1, c0 + c1);
    out.view_mut((0, 0), (r0, c0)).copy_from(a);
    out.view_mut((0, c0), (r0, c1)).copy_from(b);
    out.view_mut((r0, 0), (r1, c0)).copy_from(c);
    out.view_mut((r0, c0), (r1, c1)).copy_from(d);
    out
}

/// Block-diagonal `diag(a, b)`.
pub fn block_diag<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    block2(
        a,
        &zeros(a.nrows(), b.ncols()),
        &zeros(b.nrows(), a.ncols()),
        b,
    )
}

/// Concatenates two vectors.
pub fn concat<T: Real>(a: &ComplexVector<T>, b: &ComplexVector<T>) -> ComplexVector<T> {
    ComplexVector::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).copied())
}

/// Splits a vector at `at`.
pub fn split<T: Real>(v: &ComplexVector<T>, at: usize) -> (ComplexVector<T>, ComplexVector<T>) {
    (v.rows(0, at).into_owned(), v.rows(at, v.len() - at).into_owned())
}

/// `z I + m`.
pub fn shift<T: Real>(m: &ComplexMatrix<T>, z: Complex<T>) -> ComplexMatrix<T> {
    let mut out = m.clone();
    for i in 0..m.nrows().min(m.ncols()) {
        out[(i, i)] += z;
    }
    out
}

/// Frobenius norm of `m - m*`.
pub fn hermitian_defect<T: Real>(m: &ComplexMatrix<T>) -> T {
    (m - m.adjoint()).norm()
}
