//! Consensus on graphs, linear Hodge-flow dynamics `dw/dt = -L_k w`, the
//! componentwise nonlinear variant, and hole counting from final states.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::spectral::eig_sym;

/// Singular values below this fraction of the largest initial singular
/// value count as zero in [`detect_holes`].
pub const HOLE_RANK_TOL: f64 = 1e-6;

/// States sampled on the uniform grid `t_i = i * dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    pub order: usize,
}

impl Trajectory {
    pub fn final_state(&self) -> &DVector<f64> {
        self.states.last().expect("trajectory has at least one state")
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// `U exp(-Lambda t) U^T s0` at every grid time.
    ExactSpectral,
    /// Explicit Euler steps `s <- s - dt L s`.
    Euler,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral" | "exact" | "exact_spectral" => Ok(Self::ExactSpectral),
            "euler" => Ok(Self::Euler),
            other => Err(Error::InvalidParameter(format!("unknown integration method {other:?}"))),
        }
    }
}

/// Componentwise odd nonlinearity used in the nonlinear flow.
#[derive(Clone)]
pub enum Nonlinearity {
    Identity,
    Tanh,
    /// A user function with its antiderivative (vanishing at zero), used for
    /// the energy functional.
    Custom {
        name: String,
        func: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        antiderivative: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Nonlinearity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" | "linear" => Ok(Self::Identity),
            "tanh" => Ok(Self::Tanh),
            other => Err(Error::InvalidParameter(format!("unknown nonlinearity {other:?}"))),
        }
    }
}

impl Nonlinearity {
    pub fn name(&self) -> &str {
        match self {
            Self::Identity => "identity",
            Self::Tanh => "tanh",
            Self::Custom { name, .. } => name,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Self::Identity => x,
            Self::Tanh => x.tanh(),
            Self::Custom { func, .. } => func(x),
        }
    }

    /// Antiderivative `G` with `G(0) = 0`.
    pub fn antiderivative(&self, x: f64) -> f64 {
        match self {
            Self::Identity => 0.5 * x * x,
            // ln cosh x, written to avoid overflow for large |x|
            Self::Tanh => {
                let a = x.abs();
                a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
            }
            Self::Custom { antiderivative, .. } => antiderivative(x),
        }
    }

    /// Checks `|g(x) + g(-x)| <= 1e-10` on a fixed sample grid.
    pub fn check_odd(&self) -> Result<()> {
        let samples = (0..=200).map(|i| -10.0 + 0.1 * f64::from(i)).chain([1e-6, 0.5, 3.7, 25.0]);
        for x in samples {
            if (self.eval(x) + self.eval(-x)).abs() > 1e-10 {
                return Err(Error::NotOdd(self.name().to_string()));
            }
        }
        Ok(())
    }

    fn map(&self, v: &DVector<f64>) -> DVector<f64> {
        match self {
            Self::Identity => v.clone(),
            _ => v.map(|x| self.eval(x)),
        }
    }
}

fn grid(dt: f64, t_max: f64) -> Result<Vec<f64>> {
    if dt.is_nan() || dt <= 0.0 || dt.is_infinite() {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    if t_max.is_nan() || t_max < 0.0 || t_max.is_infinite() {
        return Err(Error::InvalidParameter(format!("t_max must be non-negative, got {t_max}")));
    }
    // round so that t_max = steps * dt lands on the grid despite rounding in the ratio
    let steps = (t_max / dt).round() as usize;
    Ok((0..=steps).map(|i| i as f64 * dt).collect())
}

fn check_square_len(l: &DMatrix<f64>, s0: &DVector<f64>) -> Result<()> {
    if l.nrows() != l.ncols() {
        return Err(Error::NotSquare { rows: l.nrows(), cols: l.ncols() });
    }
    if l.nrows() != s0.len() {
        return Err(Error::DimensionMismatch { expected: l.nrows(), found: s0.len() });
    }
    Ok(())
}

/// Solves `ds/dt = -L s` on the grid `0, dt, ..., t_max`.
pub fn simulate_consensus(
    l: &DMatrix<f64>,
    s0: &DVector<f64>,
    dt: f64,
    t_max: f64,
    method: Method,
) -> Result<Trajectory> {
    check_square_len(l, s0)?;
    let times = grid(dt, t_max)?;
    let states = match method {
        Method::ExactSpectral => propagate_spectral(l, s0, &times)?,
        Method::Euler => {
            warn_if_unstable(l, dt)?;
            let mut s = s0.clone();
            let mut out = vec![s.clone()];
            for _ in 1..times.len() {
                s = &s - (l * &s) * dt;
                out.push(s.clone());
            }
            out
        }
    };
    Ok(Trajectory { times, states, order: 0 })
}

fn propagate_spectral(l: &DMatrix<f64>, s0: &DVector<f64>, times: &[f64]) -> Result<Vec<DVector<f64>>> {
    let basis = eig_sym(l)?;
    let coeffs = basis.gft(s0)?;
    times
        .iter()
        .map(|&t| {
            let c = coeffs.zip_map(&basis.eigenvalues, |c, lam| c * (-lam * t).exp());
            basis.igft(&c)
        })
        .collect()
}

fn warn_if_unstable(l: &DMatrix<f64>, dt: f64) -> Result<()> {
    let lmax = eig_sym(l)?.max_eigenvalue();
    if lmax > 0.0 && dt >= 2.0 / lmax {
        log::warn!("Euler step dt = {dt} is at or beyond 2 / lambda_max = {}", 2.0 / lmax);
    }
    Ok(())
}

/// The pair of boundary operators acting on order-`k` signals, kept in
/// factored form so linear and nonlinear Euler steps share the same
/// arithmetic.
struct FactoredLaplacian {
    lower: DMatrix<f64>,
    upper: DMatrix<f64>,
}

impl FactoredLaplacian {
    fn new(x: &SimplicialComplex, k: usize) -> Result<Self> {
        if x.max_order().is_none_or(|m| k > m) {
            return Err(Error::InvalidOrder { order: k, max_order: x.max_order() });
        }
        let lower = if k == 0 { DMatrix::zeros(0, x.count(0)) } else { x.boundary_matrix(k)?.to_dense() };
        let upper = x.boundary_matrix(k + 1)?.to_dense();
        Ok(Self { lower, upper })
    }

    /// `B_{k+1} g(B_{k+1}^T w) + B_k^T g(B_k w)`
    fn gradient(&self, g: &Nonlinearity, w: &DVector<f64>) -> DVector<f64> {
        let up = &self.upper * g.map(&self.upper.tr_mul(w));
        let down = self.lower.tr_mul(&g.map(&(&self.lower * w)));
        up + down
    }

    fn energy(&self, g: &Nonlinearity, w: &DVector<f64>) -> f64 {
        let a: f64 = (&self.lower * w).iter().map(|&v| g.antiderivative(v)).sum();
        let b: f64 = self.upper.tr_mul(w).iter().map(|&v| g.antiderivative(v)).sum();
        a + b
    }
}

fn euler_factored(
    op: &FactoredLaplacian,
    g: &Nonlinearity,
    w0: &DVector<f64>,
    times: &[f64],
    dt: f64,
) -> Result<Vec<DVector<f64>>> {
    let mut w = w0.clone();
    let mut out = Vec::with_capacity(times.len());
    out.push(w.clone());
    for _ in 1..times.len() {
        w = &w - op.gradient(g, &w) * dt;
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("Euler integration diverged".into()));
        }
        out.push(w.clone());
    }
    Ok(out)
}

/// Solves `dw/dt = -L_k w` for a signal on the order-`k` simplices.
pub fn simulate_hodge_flow(
    x: &SimplicialComplex,
    k: usize,
    w0: &DVector<f64>,
    dt: f64,
    t_max: f64,
    method: Method,
) -> Result<Trajectory> {
    let op = FactoredLaplacian::new(x, k)?;
    let n = x.count(k);
    if w0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: w0.len() });
    }
    let times = grid(dt, t_max)?;
    let states = match method {
        Method::ExactSpectral => propagate_spectral(&x.hodge_laplacian(k)?, w0, &times)?,
        Method::Euler => {
            warn_if_unstable(&x.hodge_laplacian(k)?, dt)?;
            euler_factored(&op, &Nonlinearity::Identity, w0, &times, dt)?
        }
    };
    Ok(Trajectory { times, states, order: k })
}

/// Explicit Euler integration of
/// `dw/dt = -(B_{k+1} g(B_{k+1}^T w) + B_k^T g(B_k w))`.
pub fn simulate_nonlinear(
    x: &SimplicialComplex,
    k: usize,
    w0: &DVector<f64>,
    g: &Nonlinearity,
    dt: f64,
    t_max: f64,
) -> Result<Trajectory> {
    g.check_odd()?;
    let op = FactoredLaplacian::new(x, k)?;
    let n = x.count(k);
    if w0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: w0.len() });
    }
    let times = grid(dt, t_max)?;
    let states = euler_factored(&op, g, w0, &times, dt)?;
    Ok(Trajectory { times, states, order: k })
}

/// Energy `sum G(B_k w) + sum G(B_{k+1}^T w)` whose negative gradient drives
/// the nonlinear flow.
pub fn nonlinear_energy(x: &SimplicialComplex, k: usize, w: &DVector<f64>, g: &Nonlinearity) -> Result<f64> {
    let op = FactoredLaplacian::new(x, k)?;
    if w.len() != x.count(k) {
        return Err(Error::DimensionMismatch { expected: x.count(k), found: w.len() });
    }
    Ok(op.energy(g, w))
}

/// Standard Gaussian initial condition from a ChaCha8 generator.
pub fn random_initial(len: usize, seed: u64) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DVector::from_iterator(len, (0..len).map(|_| StandardNormal.sample(&mut rng)))
}

/// Estimates `dim ker L_k` by running the linear flow from `trials` random
/// initial conditions and taking the numerical rank of the final states.
///
/// Trial `i` uses seed `seed + i`. Singular values of the final-state matrix
/// below [`HOLE_RANK_TOL`] times the largest singular value of the initial
/// matrix are treated as zero.
pub fn detect_holes(x: &SimplicialComplex, k: usize, trials: usize, seed: u64, dt: f64, t_max: f64) -> Result<usize> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    if x.max_order().is_none_or(|m| k > m) {
        return Err(Error::InvalidOrder { order: k, max_order: x.max_order() });
    }
    let n = x.count(k);
    let mut init = DMatrix::zeros(n, trials);
    let mut fin = DMatrix::zeros(n, trials);
    for i in 0..trials {
        let w0 = random_initial(n, seed.wrapping_add(i as u64));
        let traj = simulate_hodge_flow(x, k, &w0, dt, t_max, Method::ExactSpectral)?;
        init.set_column(i, &w0);
        fin.set_column(i, traj.final_state());
    }
    let scale = init.singular_values().max();
    let cut = HOLE_RANK_TOL * scale;
    Ok(fin.singular_values().iter().filter(|&&s| s > cut).count())
}
