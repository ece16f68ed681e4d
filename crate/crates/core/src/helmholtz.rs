//! Orthogonal range/kernel splittings of the coupling operator and the
//! z-dependent block elimination that separates the kernel of `C` from the
//! part of the system on which `C` is invertible.
//!
//! Coordinates of the three-block form are ordered
//! `(iota0* u, iota1* v, kappa0* u)`.

use num_complex::Complex;

use crate::error::{dim_mismatch, Error, Result};
use crate::linalg::{self, block2, identity, zeros};
use crate::model::{shape, Tolerances};
use crate::normalize::NormalizedSystem;
use crate::scalar::{ComplexMatrix, ComplexVector, Real};

/// Orthonormal frames for `ran(C*)`, `ker(C)`, `ran(C)` and `ker(C*)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HelmholtzFrames<T: Real> {
    /// n0 x r, spans `ran(C*)`.
    pub iota0: ComplexMatrix<T>,
    /// n0 x (n0 - r), spans `ker(C)`.
    pub kappa0: ComplexMatrix<T>,
    /// n1 x r, spans `ran(C)`.
    pub iota1: ComplexMatrix<T>,
    /// n1 x (n1 - r), spans `ker(C*)`.
    pub kappa1: ComplexMatrix<T>,
    pub rank: usize,
    /// Nonzero singular values of `C`, descending.
    pub singular_values: Vec<T>,
    /// Closed-range constant; `None` when `C = 0`.
    pub sigma_min_pos: Option<T>,
    /// `iota1* C iota0`, the invertible part of `C` (r x r).
    pub c_tilde: ComplexMatrix<T>,
    pub c_tilde_inv_norm: Option<T>,
}

impl<T: Real> HelmholtzFrames<T> {
    pub fn n0(&self) -> usize {
        self.iota0.nrows()
    }

    pub fn n1(&self) -> usize {
        self.iota1.nrows()
    }

    pub fn kernel_dim(&self) -> usize {
        self.kappa0.ncols()
    }

    /// Isometric embedding of `H0 x ran(C)` into `H0 x H1`:
    /// `[[I, 0], [0, iota1]]`.
    pub fn range_embedding(&self) -> ComplexMatrix<T> {
        linalg::block_diag(&identity(self.n0()), &self.iota1)
    }

    /// Residual of the orthogonal projection of `v` onto `ran(C)`.
    pub fn range_residual(&self, v: &ComplexVector<T>) -> T {
        (v - &self.iota1 * (self.iota1.adjoint() * v)).norm()
    }
}

/// Splits `H0 = ran(C*) + ker(C)` and `H1 = ran(C) + ker(C*)` using the
/// singular value decomposition of `C`.
///
/// Singular values with `sigma >= rank_rel_tol * sigma_max` count toward the
/// rank.
pub fn decompose<T: Real>(c: &ComplexMatrix<T>, tol: &Tolerances) -> HelmholtzFrames<T> {
    let (n1, n0) = c.shape();
    let empty = |n: usize| HelmholtzFrames {
        iota0: zeros(n0, 0),
        kappa0: identity(n0),
        iota1: zeros(n1, 0),
        kappa1: identity(n1),
        rank: 0,
        singular_values: Vec::new(),
        sigma_min_pos: None,
        c_tilde: zeros(n, n),
        c_tilde_inv_norm: None,
    };
    if n0 == 0 || n1 == 0 {
        return empty(0);
    }
    let (u, sigma, v) = linalg::thin_svd(c);
    let smax = sigma[0];
    if smax <= T::zero() {
        return empty(0);
    }
    let cutoff = T::lit(tol.rank_rel_tol) * smax;
    let rank = sigma.iter().take_while(|&&s| s >= cutoff).count();
    let (iota1, iota0) = linalg::range_frames(c, &u, &v, rank);
    let kappa0 = linalg::orthonormal_complement(&iota0);
    let kappa1 = linalg::orthonormal_complement(&iota1);
    let c_tilde = iota1.adjoint() * c * &iota0;
    // The polished frames no longer diagonalize C, so read the spectrum off C~.
    let sigma = linalg::singular_values(&c_tilde);
    let sigma_min_pos = sigma[rank - 1];
    HelmholtzFrames {
        iota0,
        kappa0,
        iota1,
        kappa1,
        rank,
        singular_values: sigma[..rank].to_vec(),
        sigma_min_pos: Some(sigma_min_pos),
        c_tilde,
        c_tilde_inv_norm: Some(T::one() / sigma_min_pos),
    }
}

/// The operator `B_z` restricted to `H0 x ran(C)` written in frame coordinates:
///
/// ```text
/// z + [[i0* g i0, 0, i0* g k0], [0, 0, 0], [k0* g i0, 0, k0* g k0]]
///   + [[0, -C~*, 0], [C~, 0, 0], [0, 0, 0]]
/// ```
pub fn three_block_form<T: Real>(
    gamma: &ComplexMatrix<T>,
    frames: &HelmholtzFrames<T>,
    z: Complex<T>,
) -> Result<ComplexMatrix<T>> {
    let n0 = frames.n0();
    if gamma.shape() != (n0, n0) {
        return Err(dim_mismatch("three_block_form gamma", format!("{n0}x{n0}"), shape(gamma)));
    }
    let r = frames.rank;
    let k = frames.kernel_dim();
    let (i0, k0) = (&frames.iota0, &frames.kappa0);
    let mut m = zeros::<T>(r + r + k, r + r + k);
    m.view_mut((0, 0), (r, r)).copy_from(&(i0.adjoint() * gamma * i0));
    m.view_mut((0, 2 * r), (r, k)).copy_from(&(i0.adjoint() * gamma * k0));
    m.view_mut((2 * r, 0), (k, r)).copy_from(&(k0.adjoint() * gamma * i0));
    m.view_mut((2 * r, 2 * r), (k, k)).copy_from(&(k0.adjoint() * gamma * k0));
    m.view_mut((0, r), (r, r)).copy_from(&(-frames.c_tilde.adjoint()));
    m.view_mut((r, 0), (r, r)).copy_from(&frames.c_tilde);
    Ok(linalg::shift(&m, z))
}

/// Block elimination data at a fixed `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoupledBlocks<T: Real> {
    pub z: Complex<T>,
    /// Schur block `i0* g i0 - i0* g k0 (z + k0* g k0)^-1 k0* g i0` (r x r).
    pub gamma1_z: ComplexMatrix<T>,
    /// `k0* g k0`.
    pub gamma2: ComplexMatrix<T>,
    /// `(z + k0* g k0)^-1`.
    pub kernel_inv: ComplexMatrix<T>,
    pub t1: ComplexMatrix<T>,
    pub t1_inv: ComplexMatrix<T>,
    pub t2: ComplexMatrix<T>,
    pub t2_inv: ComplexMatrix<T>,
}

/// Builds the elimination transforms `T1(z)`, `T2(z)` with
/// `T1 M T2 = diag(reduced, z + k0* g k0)` where `M` is the three-block form.
///
/// `c` is the coercivity constant of `gamma`; the construction requires
/// `Re z > -c`.
pub fn decoupling_transforms<T: Real>(
    gamma: &ComplexMatrix<T>,
    frames: &HelmholtzFrames<T>,
    z: Complex<T>,
    c: T,
    tol: &Tolerances,
) -> Result<DecoupledBlocks<T>> {
    let n0 = frames.n0();
    if gamma.shape() != (n0, n0) {
        return Err(dim_mismatch("decoupling_transforms gamma", format!("{n0}x{n0}"), shape(gamma)));
    }
    if z.re <= -c {
        return Err(Error::HalfPlaneViolation {
            re_z: z.re.as_f64(),
            floor: (-c).as_f64(),
        });
    }
    let r = frames.rank;
    let k = frames.kernel_dim();
    let (i0, k0) = (&frames.iota0, &frames.kappa0);
    let g00 = i0.adjoint() * gamma * i0;
    let g01 = i0.adjoint() * gamma * k0;
    let g10 = k0.adjoint() * gamma * i0;
    let gamma2 = k0.adjoint() * gamma * k0;
    let kernel_inv = linalg::checked_inverse(&linalg::shift(&gamma2, z), T::lit(tol.solve_tol))
        .ok_or(Error::SingularKernelBlock)?;
    let upper = &g01 * &kernel_inv;
    let lower = &kernel_inv * &g10;
    let gamma1_z = &g00 - &upper * &g10;

    let n = 2 * r + k;
    let mut t1 = identity::<T>(n);
    let mut t1_inv = identity::<T>(n);
    t1.view_mut((0, 2 * r), (r, k)).copy_from(&(-&upper));
    t1_inv.view_mut((0, 2 * r), (r, k)).copy_from(&upper);
    let mut t2 = identity::<T>(n);
    let mut t2_inv = identity::<T>(n);
    t2.view_mut((2 * r, 0), (k, r)).copy_from(&(-&lower));
    t2_inv.view_mut((2 * r, 0), (k, r)).copy_from(&lower);
    Ok(DecoupledBlocks {
        z,
        gamma1_z,
        gamma2,
        kernel_inv,
        t1,
        t1_inv,
        t2,
        t2_inv,
    })
}

/// The reduced operator `z + [[gamma1_z, -C~*], [C~, 0]]` on `ran(C*) x ran(C)`.
pub fn reduced_operator<T: Real>(
    blocks: &DecoupledBlocks<T>,
    frames: &HelmholtzFrames<T>,
) -> ComplexMatrix<T> {
    let r = frames.rank;
    let m = block2(
        &blocks.gamma1_z,
        &(-frames.c_tilde.adjoint()),
        &frames.c_tilde,
        &zeros(r, r),
    );
    linalg::shift(&m, blocks.z)
}

/// Solves `(z - B)(u, v) = (f, g)` with `g` in `ran(D)` by eliminating the
/// kernel block: the reduced two-block system and the kernel equation
/// `(z + k0* g k0) U3 = F3` are solved separately and mapped back.
pub fn decoupled_solve<T: Real>(
    ns: &NormalizedSystem<T>,
    frames: &HelmholtzFrames<T>,
    z: Complex<T>,
    f: &ComplexVector<T>,
    g: &ComplexVector<T>,
    tol: &Tolerances,
) -> Result<(ComplexVector<T>, ComplexVector<T>)> {
    let (n0, n1) = (ns.n0(), ns.n1());
    if f.len() != n0 || g.len() != n1 {
        return Err(dim_mismatch(
            "decoupled_solve rhs",
            format!("({n0}, {n1})"),
            format!("({}, {})", f.len(), g.len()),
        ));
    }
    let residual = frames.range_residual(g);
    if residual > T::lit(tol.solve_tol) * (g.norm() + f.norm()) {
        return Err(Error::NotInRange {
            residual: residual.as_f64(),
        });
    }
    let blocks = decoupling_transforms(&ns.gamma_tilde, frames, z, ns.c_gamma_tilde, tol)?;
    let r = frames.rank;
    let coords = linalg::concat(
        &linalg::concat(&(frames.iota0.adjoint() * f), &(frames.iota1.adjoint() * g)),
        &(frames.kappa0.adjoint() * f),
    );
    let rhs = &blocks.t1 * coords;
    let (f12, f3) = linalg::split(&rhs, 2 * r);
    let reduced = reduced_operator(&blocks, frames);
    let u12 = linalg::checked_solve(&reduced, &f12, T::lit(tol.solve_tol))
        .ok_or(Error::SingularReducedBlock)?;
    let u3 = &blocks.kernel_inv * f3;
    let x = &blocks.t2 * linalg::concat(&u12, &u3);
    let a = x.rows(0, r).into_owned();
    let b = x.rows(r, r).into_owned();
    let cpart = x.rows(2 * r, frames.kernel_dim()).into_owned();
    let u = &frames.iota0 * a + &frames.kappa0 * cpart;
    let v = &frames.iota1 * b;
    Ok((u, v))
}
