//! Symmetric eigendecomposition, Fourier transforms on graphs and complexes,
//! and the Hodge decomposition of cochains.

use nalgebra::{DMatrix, DVector};

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};

/// Maximum number of cyclic Jacobi sweeps.
pub const MAX_SWEEPS: usize = 100;
/// Off-diagonal stopping threshold relative to the Frobenius norm.
pub const JACOBI_TOL: f64 = 1e-12;
/// Default relative threshold below which an eigenvalue counts as zero.
pub const DEFAULT_KERNEL_TOL: f64 = 1e-8;
/// Eigenvalue cutoff used by pseudo-inverse solves.
pub const PINV_TOL: f64 = 1e-10;

/// Ascending eigenvalues with matching orthonormal eigenvectors (columns).
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralBasis {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl SpectralBasis {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(0.0, f64::max)
    }

    /// Absolute zero threshold `tol * max(1, lambda_max)`.
    pub fn zero_threshold(&self, tol: f64) -> f64 {
        tol * self.max_eigenvalue().max(1.0)
    }

    /// Number of eigenvalues below the zero threshold.
    pub fn kernel_dim(&self, tol: f64) -> usize {
        let cut = self.zero_threshold(tol);
        self.eigenvalues.iter().filter(|&&l| l < cut).count()
    }

    /// Forward transform `U^T s`.
    pub fn gft(&self, s: &DVector<f64>) -> Result<DVector<f64>> {
        self.check(s.len())?;
        Ok(self.eigenvectors.tr_mul(s))
    }

    /// Inverse transform `U s~`.
    pub fn igft(&self, coeffs: &DVector<f64>) -> Result<DVector<f64>> {
        self.check(coeffs.len())?;
        Ok(&self.eigenvectors * coeffs)
    }

    /// `U h(Lambda) U^T` for a scalar response `h`.
    pub fn filter_matrix(&self, h: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let gains = self.eigenvalues.map(h);
        let scaled = DMatrix::from_fn(self.dim(), self.dim(), |i, j| self.eigenvectors[(i, j)] * gains[j]);
        scaled * self.eigenvectors.transpose()
    }

    /// Moore-Penrose pseudo-inverse applied to `b`, discarding eigenvalues
    /// below `cutoff * max(1, lambda_max)`.
    pub fn pinv_apply(&self, b: &DVector<f64>, cutoff: f64) -> Result<DVector<f64>> {
        let cut = self.zero_threshold(cutoff);
        let mut coeffs = self.gft(b)?;
        for (c, &l) in coeffs.iter_mut().zip(self.eigenvalues.iter()) {
            *c = if l > cut { *c / l } else { 0.0 };
        }
        self.igft(&coeffs)
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: len });
        }
        Ok(())
    }
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// The input is symmetrized as `(M + M^T) / 2` first. Eigenvectors are sign
/// normalized so that their first entry with magnitude above `1e-12` is
/// positive.
pub fn eig_sym(m: &DMatrix<f64>) -> Result<SpectralBasis> {
    let (rows, cols) = m.shape();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    let n = rows;
    let mut a = (m + m.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(n, n);
    let stop = JACOBI_TOL * a.norm();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off = max_off_diagonal(&a);
        if off <= stop {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= stop * 1e-3 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut a, &mut v, p, q, c, s, t);
            }
        }
    }
    if !converged && max_off_diagonal(&a) > stop {
        return Err(Error::EigenNoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| a[(i, i)]));
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src).into_owned();
        if let Some(first) = col.iter().find(|x| x.abs() > 1e-12) {
            if *first < 0.0 {
                col.neg_mut();
            }
        }
        eigenvectors.set_column(dst, &col);
    }
    Ok(SpectralBasis { eigenvalues, eigenvectors })
}

fn max_off_diagonal(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut m = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            m = m.max(a[(i, j)].abs());
        }
    }
    m
}

#[allow(clippy::too_many_arguments)]
fn rotate(a: &mut DMatrix<f64>, v: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64, t: f64) {
    let n = a.nrows();
    let apq = a[(p, q)];
    let tau = s / (1.0 + c);
    a[(p, p)] -= t * apq;
    a[(q, q)] += t * apq;
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        let new_kp = akp - s * (akq + tau * akp);
        let new_kq = akq + s * (akp - tau * akq);
        a[(k, p)] = new_kp;
        a[(p, k)] = new_kp;
        a[(k, q)] = new_kq;
        a[(q, k)] = new_kq;
    }
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp - s * (vkq + tau * vkp);
        v[(k, q)] = vkq + s * (vkp - tau * vkq);
    }
}

/// Gradient / curl / harmonic split of a `k`-cochain.
#[derive(Clone, Debug, PartialEq)]
pub struct HodgeDecomposition {
    pub gradient: DVector<f64>,
    pub curl: DVector<f64>,
    pub harmonic: DVector<f64>,
    /// Minimum-norm `v` with `gradient = B_k^T v`.
    pub node_potential: DVector<f64>,
    /// Minimum-norm `t` with `curl = B_{k+1} t`.
    pub triangle_potential: DVector<f64>,
}

/// Hodge decomposition of an edge flow.
pub fn hodge_decompose(x: &SimplicialComplex, f: &DVector<f64>) -> Result<HodgeDecomposition> {
    hodge_decompose_order(x, 1, f)
}

/// Hodge decomposition of a signal on the order-`k` simplices.
///
/// Potentials are the minimum-norm least-squares solutions, computed with
/// the pseudo-inverses of `B_k B_k^T` and `B_{k+1}^T B_{k+1}`.
pub fn hodge_decompose_order(x: &SimplicialComplex, k: usize, f: &DVector<f64>) -> Result<HodgeDecomposition> {
    if x.max_order().is_none_or(|m| k > m) {
        return Err(Error::InvalidOrder { order: k, max_order: x.max_order() });
    }
    let n = x.count(k);
    if f.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: f.len() });
    }

    let (gradient, node_potential) = if k == 0 {
        (DVector::zeros(n), DVector::zeros(0))
    } else {
        let b = x.boundary_matrix(k)?.to_dense();
        let basis = eig_sym(&(&b * b.transpose()))?;
        let v = basis.pinv_apply(&(&b * f), PINV_TOL)?;
        (b.tr_mul(&v), v)
    };

    let b_up = x.boundary_matrix(k + 1)?.to_dense();
    let (curl, triangle_potential) = if b_up.ncols() == 0 {
        (DVector::zeros(n), DVector::zeros(0))
    } else {
        let basis = eig_sym(&b_up.tr_mul(&b_up))?;
        let t = basis.pinv_apply(&b_up.tr_mul(f), PINV_TOL)?;
        (&b_up * &t, t)
    };

    let harmonic = f - &gradient - &curl;
    Ok(HodgeDecomposition { gradient, curl, harmonic, node_potential, triangle_potential })
}

/// Orthonormal basis of `ker L_k` with the default threshold.
pub fn harmonic_basis(x: &SimplicialComplex, k: usize) -> Result<DMatrix<f64>> {
    harmonic_basis_with(x, k, DEFAULT_KERNEL_TOL)
}

pub fn harmonic_basis_with(x: &SimplicialComplex, k: usize, tol: f64) -> Result<DMatrix<f64>> {
    let basis = eig_sym(&x.hodge_laplacian(k)?)?;
    let dim = basis.kernel_dim(tol);
    Ok(basis.eigenvectors.columns(0, dim).into_owned())
}

/// Betti number `dim ker L_k`.
pub fn betti(x: &SimplicialComplex, k: usize) -> Result<usize> {
    Ok(harmonic_basis(x, k)?.ncols())
}

/// Orthogonal projection onto `ker L_k`.
pub fn harmonic_projection(x: &SimplicialComplex, k: usize, f: &DVector<f64>) -> Result<DVector<f64>> {
    let h = harmonic_basis(x, k)?;
    if f.len() != h.nrows() {
        return Err(Error::DimensionMismatch { expected: h.nrows(), found: f.len() });
    }
    Ok(&h * h.tr_mul(f))
}

/// Eigenvectors of `L_1` obtained by lifting nonzero eigenpairs of `L_0`
/// through `B_1^T`; they span the gradient space.
pub fn lift_gradient_eigenvectors(x: &SimplicialComplex) -> Result<Vec<(f64, DVector<f64>)>> {
    let b1 = x.boundary_matrix(1)?.to_dense();
    let basis = eig_sym(&(&b1 * b1.transpose()))?;
    Ok(lift(&basis, &b1.transpose()))
}

/// Eigenvectors of `L_1` obtained by lifting nonzero eigenpairs of
/// `B_2^T B_2` through `B_2`; they span the curl space.
pub fn lift_curl_eigenvectors(x: &SimplicialComplex) -> Result<Vec<(f64, DVector<f64>)>> {
    let b2 = x.boundary_matrix(2)?.to_dense();
    let basis = eig_sym(&b2.tr_mul(&b2))?;
    Ok(lift(&basis, &b2))
}

fn lift(basis: &SpectralBasis, map: &DMatrix<f64>) -> Vec<(f64, DVector<f64>)> {
    let cut = basis.zero_threshold(DEFAULT_KERNEL_TOL);
    basis
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > cut)
        .map(|(i, &l)| (l, map * basis.eigenvectors.column(i)))
        .collect()
}
