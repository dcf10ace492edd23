//! Shift-invariant filters on node and edge signals, and the flow denoising
//! comparison between line-graph, edge and Hodge regularizers.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::spectral::{eig_sym, SpectralBasis};

/// Largest off-diagonal entry of `U^T H U` accepted by
/// [`frequency_response_of`].
pub const SHIFT_INVARIANCE_TOL: f64 = 1e-6;

/// A filter defined relative to some symmetric shift operator.
#[derive(Clone, Debug, PartialEq)]
pub enum FilterSpec {
    /// `(I + alpha Q)^{-1}`
    Tikhonov { alpha: f64 },
    /// `(I - mu L)^steps`
    Iterative { mu: f64, steps: usize },
    /// `sum_k c_k G^k`
    Polynomial { coeffs: Vec<f64> },
    /// `U h(Lambda) U^T` with `h` linearly interpolated from an
    /// `(eigenvalue, gain)` table and held constant outside it.
    Spectral { response: Vec<(f64, f64)> },
}

impl FilterSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Tikhonov { alpha } if alpha.is_nan() || *alpha <= 0.0 => {
                Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")))
            }
            Self::Iterative { mu, .. } if mu.is_nan() || *mu <= 0.0 => {
                Err(Error::InvalidParameter(format!("mu must be positive, got {mu}")))
            }
            Self::Iterative { steps: 0, .. } => Err(Error::InvalidParameter("steps must be at least 1".into())),
            Self::Polynomial { coeffs } if coeffs.is_empty() => {
                Err(Error::InvalidParameter("polynomial needs at least one coefficient".into()))
            }
            Self::Spectral { response } if response.is_empty() => {
                Err(Error::InvalidParameter("spectral response table is empty".into()))
            }
            _ => Ok(()),
        }
    }

    /// Scalar frequency response at eigenvalue `lambda`.
    pub fn response(&self, lambda: f64) -> f64 {
        match self {
            Self::Tikhonov { alpha } => 1.0 / (1.0 + alpha * lambda),
            Self::Iterative { mu, steps } => (1.0 - mu * lambda).powi(*steps as i32),
            Self::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * lambda + c),
            Self::Spectral { response } => interpolate_table(response, lambda),
        }
    }

    /// Dense filter matrix for the shift operator `g`.
    pub fn matrix(&self, g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.validate()?;
        square(g)?;
        let n = g.nrows();
        match self {
            Self::Tikhonov { alpha } => {
                let a = DMatrix::identity(n, n) + g * *alpha;
                a.try_inverse().ok_or_else(|| Error::InvalidParameter("I + alpha Q is singular".into()))
            }
            Self::Iterative { mu, steps } => {
                let step = DMatrix::identity(n, n) - g * *mu;
                Ok((1..*steps).fold(step.clone(), |acc, _| &step * acc))
            }
            Self::Polynomial { coeffs } => {
                let id = DMatrix::identity(n, n);
                Ok(coeffs.iter().rev().fold(DMatrix::zeros(n, n), |acc, c| g * acc + &id * *c))
            }
            Self::Spectral { .. } => Ok(eig_sym(g)?.filter_matrix(|l| self.response(l))),
        }
    }

    pub fn apply(&self, g: &DMatrix<f64>, s: &DVector<f64>) -> Result<DVector<f64>> {
        match self {
            Self::Tikhonov { alpha } => denoise_tikhonov(g, s, *alpha),
            Self::Iterative { mu, steps } => smooth_iterative(g, s, *mu, *steps),
            Self::Polynomial { coeffs } => apply_polynomial(g, coeffs, s),
            Self::Spectral { .. } => {
                check_dims(g, s)?;
                Ok(self.matrix(g)? * s)
            }
        }
    }
}

fn interpolate_table(table: &[(f64, f64)], x: f64) -> f64 {
    let mut pts = table.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let first = pts[0];
    let last = pts[pts.len() - 1];
    if x <= first.0 {
        return first.1;
    }
    if x >= last.0 {
        return last.1;
    }
    for w in pts.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if x <= x1 {
            return if x1 > x0 { y0 + (y1 - y0) * (x - x0) / (x1 - x0) } else { y1 };
        }
    }
    last.1
}

fn square(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(())
}

fn check_dims(m: &DMatrix<f64>, s: &DVector<f64>) -> Result<()> {
    square(m)?;
    if m.nrows() != s.len() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), found: s.len() });
    }
    Ok(())
}

/// Minimizer of `||y_hat - y||^2 + alpha y_hat^T Q y_hat`, i.e.
/// `(I + alpha Q)^{-1} y`.
///
/// Solved by Cholesky; if the factorization fails or leaves a residual above
/// `1e-10 * max(1, ||y||)`, the spectral solve is used instead.
pub fn denoise_tikhonov(q: &DMatrix<f64>, y: &DVector<f64>, alpha: f64) -> Result<DVector<f64>> {
    FilterSpec::Tikhonov { alpha }.validate()?;
    check_dims(q, y)?;
    let n = q.nrows();
    let a = DMatrix::identity(n, n) + q * alpha;
    let tol = 1e-10 * y.norm().max(1.0);
    if let Some(chol) = a.clone().cholesky() {
        let x = chol.solve(y);
        if (&a * &x - y).norm() <= tol {
            return Ok(x);
        }
    }
    let basis = eig_sym(q)?;
    let coeffs = basis.gft(y)?.zip_map(&basis.eigenvalues, |c, l| c / (1.0 + alpha * l));
    basis.igft(&coeffs)
}

/// `mu >= 2 / lambda_max(L)`, where repeated smoothing steps amplify the
/// highest frequency instead of damping it.
pub fn is_divergent_step(l: &DMatrix<f64>, mu: f64) -> Result<bool> {
    let lmax = eig_sym(l)?.max_eigenvalue();
    Ok(lmax > 0.0 && mu >= 2.0 / lmax)
}

/// `(I - mu L)^steps y`, applied as `steps` explicit updates.
pub fn smooth_iterative(l: &DMatrix<f64>, y: &DVector<f64>, mu: f64, steps: usize) -> Result<DVector<f64>> {
    FilterSpec::Iterative { mu, steps }.validate()?;
    check_dims(l, y)?;
    if is_divergent_step(l, mu)? {
        log::warn!("smoothing step mu = {mu} is at or beyond 2 / lambda_max; iterates will not decay");
    }
    let mut out = y.clone();
    for _ in 0..steps {
        out = &out - (l * &out) * mu;
    }
    Ok(out)
}

/// Horner evaluation of `sum_k c_k G^k s`.
pub fn apply_polynomial(g: &DMatrix<f64>, coeffs: &[f64], s: &DVector<f64>) -> Result<DVector<f64>> {
    FilterSpec::Polynomial { coeffs: coeffs.to_vec() }.validate()?;
    check_dims(g, s)?;
    let mut acc = s * coeffs[coeffs.len() - 1];
    for c in coeffs.iter().rev().skip(1) {
        acc = g * acc + s * *c;
    }
    Ok(acc)
}

/// Diagonal of `U^T H U`. Errors if `H` is not diagonalized by the basis.
pub fn frequency_response_of(h: &DMatrix<f64>, basis: &SpectralBasis) -> Result<DVector<f64>> {
    square(h)?;
    if h.nrows() != basis.dim() {
        return Err(Error::DimensionMismatch { expected: basis.dim(), found: h.nrows() });
    }
    let u = &basis.eigenvectors;
    let d = u.transpose() * h * u;
    let n = d.nrows();
    let mut max_off = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                max_off = max_off.max(d[(i, j)].abs());
            }
        }
    }
    if max_off > SHIFT_INVARIANCE_TOL {
        return Err(Error::NotShiftInvariant { max_off_diagonal: max_off });
    }
    Ok(d.diagonal())
}

/// Regularizer choices for edge-flow denoising.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regularizer {
    /// Graph Laplacian of the line graph of the 1-skeleton.
    LineGraph,
    /// `B_1^T B_1`, ignoring filled triangles.
    Edge,
    /// `L_1 = B_1^T B_1 + B_2 B_2^T`.
    Hodge,
}

impl Regularizer {
    pub const ALL: [Regularizer; 3] = [Regularizer::LineGraph, Regularizer::Edge, Regularizer::Hodge];

    pub fn name(self) -> &'static str {
        match self {
            Self::LineGraph => "line-graph",
            Self::Edge => "edge",
            Self::Hodge => "hodge",
        }
    }

    /// The regularization matrix on the edges of `x`.
    pub fn matrix(self, x: &SimplicialComplex) -> Result<DMatrix<f64>> {
        match self {
            Self::LineGraph => x.line_graph_laplacian(),
            Self::Edge => x.lower_laplacian(1),
            Self::Hodge => x.hodge_laplacian(1),
        }
    }
}

impl fmt::Display for Regularizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Regularizer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "line-graph" | "line_graph" | "linegraph" => Ok(Self::LineGraph),
            "edge" => Ok(Self::Edge),
            "hodge" => Ok(Self::Hodge),
            other => Err(Error::UnknownRegularizer(other.to_string())),
        }
    }
}

/// I.i.d. Gaussian noise with standard deviation `sigma`.
///
/// The generator is ChaCha8 seeded with `seed` through
/// `SeedableRng::seed_from_u64`, sampled with the `rand_distr` ziggurat
/// standard normal, so a seed gives the same vector on every platform.
pub fn gaussian_noise(len: usize, sigma: f64, seed: u64) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DVector::from_iterator(
        len,
        (0..len).map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            sigma * z
        }),
    )
}

/// Result of one denoising run.
#[derive(Clone, Debug, PartialEq)]
pub struct DenoiseReport {
    pub seed: u64,
    pub noisy: DVector<f64>,
    /// `||y - f0||_2` of the raw observation.
    pub noisy_error: f64,
    /// Per-regularizer estimate and `||f_hat - f0||_2`.
    pub results: Vec<(Regularizer, DVector<f64>, f64)>,
}

impl DenoiseReport {
    pub fn error(&self, r: Regularizer) -> Option<f64> {
        self.results.iter().find(|(q, _, _)| *q == r).map(|(_, _, e)| *e)
    }
}

/// Adds seeded Gaussian noise to `f0` and denoises it with each requested
/// regularizer.
pub fn flow_denoise_experiment(
    x: &SimplicialComplex,
    f0: &DVector<f64>,
    sigma: f64,
    seed: u64,
    regularizers: &[Regularizer],
    alpha: f64,
) -> Result<DenoiseReport> {
    if f0.len() != x.num_edges() {
        return Err(Error::DimensionMismatch { expected: x.num_edges(), found: f0.len() });
    }
    if sigma.is_nan() || sigma < 0.0 {
        return Err(Error::InvalidParameter(format!("sigma must be non-negative, got {sigma}")));
    }
    let noisy = f0 + gaussian_noise(f0.len(), sigma, seed);
    let noisy_error = (&noisy - f0).norm();
    let results = regularizers
        .iter()
        .map(|&r| {
            let q = r.matrix(x)?;
            let est = denoise_tikhonov(&q, &noisy, alpha)?;
            let err = (&est - f0).norm();
            Ok((r, est, err))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DenoiseReport { seed, noisy, noisy_error, results })
}

/// Same as [`flow_denoise_experiment`] with regularizers given by name.
pub fn flow_denoise_experiment_named(
    x: &SimplicialComplex,
    f0: &DVector<f64>,
    sigma: f64,
    seed: u64,
    regularizers: &[&str],
    alpha: f64,
) -> Result<DenoiseReport> {
    let regs = regularizers.iter().map(|s| s.parse()).collect::<Result<Vec<Regularizer>>>()?;
    flow_denoise_experiment(x, f0, sigma, seed, &regs, alpha)
}

/// Mean and standard error of one error column over many trials.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorSummary {
    pub mean: f64,
    pub std_error: f64,
}

impl ErrorSummary {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var =
            if samples.len() > 1 { samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
        Self { mean, std_error: (var / n).sqrt() }
    }
}

/// Runs the experiment for seeds `first_seed .. first_seed + trials`.
pub fn flow_denoise_trials(
    x: &SimplicialComplex,
    f0: &DVector<f64>,
    sigma: f64,
    first_seed: u64,
    trials: usize,
    regularizers: &[Regularizer],
    alpha: f64,
) -> Result<Vec<DenoiseReport>> {
    (0..trials as u64).map(|i| flow_denoise_experiment(x, f0, sigma, first_seed + i, regularizers, alpha)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{harmonic_flow, path, two_holes};

    #[test]
    fn tikhonov_limits() {
        let l = path(4).hodge_laplacian(0).unwrap();
        let y = DVector::from_vec(vec![1.0, -2.0, 0.5, 3.0]);
        assert!(denoise_tikhonov(&l, &y, 0.0).is_err());
        assert!(denoise_tikhonov(&l, &y, -1.0).is_err());
        let out = denoise_tikhonov(&l, &y, 1e-12).unwrap();
        assert!((&out - &y).amax() < 1e-6);
        let out = denoise_tikhonov(&l, &y, 1e9).unwrap();
        assert!(out.iter().all(|v| (v - y.mean()).abs() < 1e-6));
        assert!(denoise_tikhonov(&l, &DVector::zeros(3), 1.0).is_err());
    }

    #[test]
    fn tikhonov_keeps_harmonic_flows() {
        let x = two_holes();
        let h = harmonic_flow();
        let out = denoise_tikhonov(&x.hodge_laplacian(1).unwrap(), &h, 0.7).unwrap();
        assert!((&out - &h).amax() < 1e-8);
    }

    #[test]
    fn smoothing_two_node_example() {
        let l = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
        let y = DVector::from_vec(vec![1.0, 0.0]);
        let out = smooth_iterative(&l, &y, 0.5, 1).unwrap();
        assert_eq!(out.as_slice(), &[0.5, 0.5]);
        let out = smooth_iterative(&l, &y, 1e-12, 1).unwrap();
        assert!((&out - &y).amax() < 1e-11);
        assert!(smooth_iterative(&l, &y, 0.0, 1).is_err());
        assert!(smooth_iterative(&l, &y, 0.5, 0).is_err());
        assert!(is_divergent_step(&l, 1.0).unwrap());
        assert!(!is_divergent_step(&l, 0.9).unwrap());
    }

    #[test]
    fn polynomial_examples() {
        let x = two_holes();
        let l0 = x.hodge_laplacian(0).unwrap();
        let s = DVector::from_vec(vec![1.0, 2.0, -1.0, 0.0, 3.0, -2.0, 1.5]);
        assert_eq!(apply_polynomial(&l0, &[1.0], &s).unwrap(), s);
        assert_eq!(apply_polynomial(&l0, &[0.0, 1.0], &s).unwrap(), &l0 * &s);
        assert!(apply_polynomial(&l0, &[], &s).is_err());
        assert!(apply_polynomial(&l0, &[1.0], &DVector::zeros(2)).is_err());
    }

    #[test]
    fn responses_of_standard_filters() {
        let x = two_holes();
        let l1 = x.hodge_laplacian(1).unwrap();
        let basis = eig_sym(&l1).unwrap();
        let alpha = 0.5;
        let h = FilterSpec::Tikhonov { alpha }.matrix(&l1).unwrap();
        let r = frequency_response_of(&h, &basis).unwrap();
        for (ri, li) in r.iter().zip(basis.eigenvalues.iter()) {
            assert!((ri - 1.0 / (1.0 + alpha * li)).abs() < 1e-10);
        }
        let (mu, k) = (0.1, 4);
        let h = FilterSpec::Iterative { mu, steps: k }.matrix(&l1).unwrap();
        let r = frequency_response_of(&h, &basis).unwrap();
        for (ri, li) in r.iter().zip(basis.eigenvalues.iter()) {
            assert!((ri - (1.0 - mu * li).powi(k as i32)).abs() < 1e-8);
        }
    }

    #[test]
    fn non_commuting_matrix_rejected() {
        let l1 = two_holes().hodge_laplacian(1).unwrap();
        let basis = eig_sym(&l1).unwrap();
        let mut h = DMatrix::zeros(10, 10);
        h[(0, 1)] = 1.0;
        h[(2, 2)] = 3.0;
        assert!(matches!(frequency_response_of(&h, &basis), Err(Error::NotShiftInvariant { .. })));
    }

    #[test]
    fn spectral_table_filter() {
        let spec = FilterSpec::Spectral { response: vec![(0.0, 1.0), (2.0, 0.0)] };
        assert_eq!(spec.response(1.0), 0.5);
        assert_eq!(spec.response(5.0), 0.0);
        assert_eq!(spec.response(-1.0), 1.0);
        assert!(FilterSpec::Spectral { response: vec![] }.validate().is_err());
    }

    #[test]
    fn regularizer_names() {
        for r in Regularizer::ALL {
            assert_eq!(r.name().parse::<Regularizer>().unwrap(), r);
        }
        assert_eq!("laplace".parse::<Regularizer>(), Err(Error::UnknownRegularizer("laplace".into())));
    }

    #[test]
    fn experiment_is_deterministic_and_clean_at_zero_noise() {
        let x = two_holes();
        let f0 = harmonic_flow();
        let a = flow_denoise_experiment(&x, &f0, 0.5, 11, &Regularizer::ALL, 0.5).unwrap();
        let b = flow_denoise_experiment(&x, &f0, 0.5, 11, &Regularizer::ALL, 0.5).unwrap();
        assert_eq!(a, b);

        let clean = flow_denoise_experiment(&x, &f0, 0.0, 3, &Regularizer::ALL, 0.5).unwrap();
        assert_eq!(clean.noisy_error, 0.0);
        assert!(clean.error(Regularizer::Edge).unwrap() < 1e-10);
        assert!(clean.error(Regularizer::Hodge).unwrap() < 1e-10);
        assert!(clean.error(Regularizer::LineGraph).unwrap() > 1e-3);

        assert!(flow_denoise_experiment_named(&x, &f0, 0.5, 1, &["curl"], 0.5).is_err());
    }
}
