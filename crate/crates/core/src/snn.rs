//! Simplicial convolutional networks: layers `Y <- sigma(H Y W)` where `H` is
//! a polynomial in the Hodge Laplacian (or separate lower/upper parts), with
//! orientation-equivariance checks and a full-batch gradient-descent trainer.

use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{SignedIncidenceMatrix, SimplicialComplex};
use crate::error::{Error, Result};
use crate::spectral::eig_sym;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Identity,
    Tanh,
    Relu,
}

impl Activation {
    pub fn is_odd(self) -> bool {
        !matches!(self, Self::Relu)
    }

    pub fn eval(self, x: f64) -> f64 {
        match self {
            Self::Identity => x,
            Self::Tanh => x.tanh(),
            Self::Relu => x.max(0.0),
        }
    }

    pub fn derivative(self, x: f64) -> f64 {
        match self {
            Self::Identity => 1.0,
            Self::Tanh => 1.0 - x.tanh().powi(2),
            Self::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(Self::Identity),
            "tanh" => Ok(Self::Tanh),
            "relu" => Ok(Self::Relu),
            other => Err(Error::InvalidParameter(format!("unknown activation {other:?}"))),
        }
    }
}

/// How a layer's shift filter is built from the complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftKind {
    /// `H = sum_j c_j L_k^j`
    Hodge,
    /// `H = c_0 I + c_1 B_k^T B_k + c_2 B_{k+1} B_{k+1}^T`
    Split,
}

/// One layer: feature mixing weights (`in x out`) and shift coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerParams {
    pub weights: DMatrix<f64>,
    pub shift_coeffs: Vec<f64>,
}

impl LayerParams {
    pub fn in_features(&self) -> usize {
        self.weights.nrows()
    }

    pub fn out_features(&self) -> usize {
        self.weights.ncols()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SnnModel {
    pub order: usize,
    pub shift: ShiftKind,
    pub layers: Vec<LayerParams>,
    pub activation: Activation,
}

/// Lower and upper Laplacian parts for the signal order, in some
/// orientation.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftOperators {
    pub lower: DMatrix<f64>,
    pub upper: DMatrix<f64>,
}

impl ShiftOperators {
    pub fn from_complex(x: &SimplicialComplex, k: usize) -> Result<Self> {
        Ok(Self { lower: x.lower_laplacian(k)?, upper: x.upper_laplacian(k)? })
    }

    /// Builds `B_k^T B_k` and `B_{k+1} B_{k+1}^T` from (possibly re-oriented)
    /// boundary matrices. `lower` is `None` for node signals.
    pub fn from_boundaries(lower: Option<&SignedIncidenceMatrix>, upper: &SignedIncidenceMatrix) -> Self {
        let bu = upper.to_dense();
        let up = &bu * bu.transpose();
        let down = match lower {
            Some(b) => {
                let b = b.to_dense();
                b.transpose() * b
            }
            None => DMatrix::zeros(up.nrows(), up.nrows()),
        };
        Self { lower: down, upper: up }
    }

    pub fn dim(&self) -> usize {
        self.upper.nrows()
    }

    pub fn laplacian(&self) -> DMatrix<f64> {
        &self.lower + &self.upper
    }

    /// Basis operators `P_j` such that `H = sum_j c_j P_j`.
    pub fn basis(&self, kind: ShiftKind, n_coeffs: usize) -> Vec<DMatrix<f64>> {
        let n = self.dim();
        match kind {
            ShiftKind::Hodge => {
                let l = self.laplacian();
                let mut out = Vec::with_capacity(n_coeffs);
                let mut p = DMatrix::identity(n, n);
                for j in 0..n_coeffs {
                    if j > 0 {
                        p = &l * p;
                    }
                    out.push(p.clone());
                }
                out
            }
            ShiftKind::Split => vec![DMatrix::identity(n, n), self.lower.clone(), self.upper.clone()],
        }
    }

    pub fn filter(&self, kind: ShiftKind, coeffs: &[f64]) -> DMatrix<f64> {
        let n = self.dim();
        self.basis(kind, coeffs.len()).iter().zip(coeffs).fold(DMatrix::zeros(n, n), |acc, (p, c)| acc + p * *c)
    }
}

/// Serializable description used to build a randomly initialized model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub order: usize,
    /// Feature widths `[F_0, F_1, ..., F_K]`.
    pub dims: Vec<usize>,
    pub activation: Activation,
    #[serde(default = "default_shift")]
    pub shift: ShiftKind,
    #[serde(default)]
    pub seed: u64,
    /// Step in `H = I - mu L`; defaults to `1 / lambda_max(L_k)`.
    #[serde(default)]
    pub mu: Option<f64>,
}

fn default_shift() -> ShiftKind {
    ShiftKind::Hodge
}

impl SnnModel {
    /// Random model with weights uniform in `[-1/sqrt(fan_in), 1/sqrt(fan_in)]`
    /// drawn from ChaCha8 seeded with `spec.seed`, and every layer using
    /// `H = I - mu L_k` (split form: `I - mu L_down - mu L_up`).
    pub fn from_spec(x: &SimplicialComplex, spec: &ModelSpec) -> Result<Self> {
        if spec.dims.len() < 2 {
            return Err(Error::InvalidParameter("model needs at least input and output widths".into()));
        }
        if spec.dims.contains(&0) {
            return Err(Error::InvalidParameter("feature widths must be positive".into()));
        }
        let mu = match spec.mu {
            Some(mu) => mu,
            None => {
                let lmax = eig_sym(&x.hodge_laplacian(spec.order)?)?.max_eigenvalue();
                if lmax > 0.0 {
                    1.0 / lmax
                } else {
                    1.0
                }
            }
        };
        let coeffs = match spec.shift {
            ShiftKind::Hodge => vec![1.0, -mu],
            ShiftKind::Split => vec![1.0, -mu, -mu],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let layers = spec
            .dims
            .windows(2)
            .map(|w| {
                let bound = 1.0 / (w[0] as f64).sqrt();
                let weights = DMatrix::from_fn(w[0], w[1], |_, _| rng.random_range(-bound..=bound));
                LayerParams { weights, shift_coeffs: coeffs.clone() }
            })
            .collect();
        let model = Self { order: spec.order, shift: spec.shift, layers, activation: spec.activation };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::InvalidParameter("model has no layers".into()));
        }
        for (i, layer) in self.layers.iter().enumerate() {
            if layer.weights.is_empty() {
                return Err(Error::LayerMismatch { layer: i, detail: "empty weight matrix".into() });
            }
            if layer.weights.iter().chain(&layer.shift_coeffs).any(|v| !v.is_finite()) {
                return Err(Error::LayerMismatch { layer: i, detail: "non-finite parameter".into() });
            }
            match self.shift {
                ShiftKind::Hodge if layer.shift_coeffs.is_empty() => {
                    return Err(Error::LayerMismatch { layer: i, detail: "no shift coefficients".into() })
                }
                ShiftKind::Split if layer.shift_coeffs.len() != 3 => {
                    return Err(Error::LayerMismatch {
                        layer: i,
                        detail: format!("split shift needs 3 coefficients, got {}", layer.shift_coeffs.len()),
                    })
                }
                _ => {}
            }
            if i > 0 && self.layers[i - 1].out_features() != layer.in_features() {
                return Err(Error::LayerMismatch {
                    layer: i,
                    detail: format!(
                        "expects {} input features but previous layer produces {}",
                        layer.in_features(),
                        self.layers[i - 1].out_features()
                    ),
                });
            }
        }
        Ok(())
    }

    pub fn forward(&self, x: &SimplicialComplex, y0: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.forward_with(&ShiftOperators::from_complex(x, self.order)?, y0)
    }

    pub fn forward_with(&self, ops: &ShiftOperators, y0: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        Ok(self.forward_cached(ops, y0)?.output)
    }

    fn forward_cached(&self, ops: &ShiftOperators, y0: &DMatrix<f64>) -> Result<ForwardCache> {
        self.validate()?;
        if y0.nrows() != ops.dim() {
            return Err(Error::LayerMismatch {
                layer: 0,
                detail: format!("input has {} rows but there are {} simplices", y0.nrows(), ops.dim()),
            });
        }
        let mut y = y0.clone();
        let mut layers = Vec::with_capacity(self.layers.len());
        for (i, layer) in self.layers.iter().enumerate() {
            if y.ncols() != layer.in_features() {
                return Err(Error::LayerMismatch {
                    layer: i,
                    detail: format!("expects {} input features, got {}", layer.in_features(), y.ncols()),
                });
            }
            let basis = ops.basis(self.shift, layer.shift_coeffs.len());
            let h = basis
                .iter()
                .zip(&layer.shift_coeffs)
                .fold(DMatrix::zeros(ops.dim(), ops.dim()), |acc, (p, c)| acc + p * *c);
            let hy = &h * &y;
            let pre = &hy * &layer.weights;
            let out = pre.map(|v| self.activation.eval(v));
            layers.push(LayerCache { input: y, basis, h, hy, pre });
            y = out;
        }
        Ok(ForwardCache { layers, output: y })
    }
}

struct LayerCache {
    input: DMatrix<f64>,
    basis: Vec<DMatrix<f64>>,
    h: DMatrix<f64>,
    hy: DMatrix<f64>,
    pre: DMatrix<f64>,
}

struct ForwardCache {
    layers: Vec<LayerCache>,
    output: DMatrix<f64>,
}

/// Result of re-orienting a subset of order-`k` simplices.
#[derive(Clone, Debug, PartialEq)]
pub struct OrientationFlip {
    /// Diagonal of `D` (`-1` on flipped simplices).
    pub signs: DVector<f64>,
    /// `B_k D`, or `None` for node signals.
    pub lower_boundary: Option<SignedIncidenceMatrix>,
    /// `D B_{k+1}`.
    pub upper_boundary: SignedIncidenceMatrix,
}

impl OrientationFlip {
    pub fn operators(&self) -> ShiftOperators {
        ShiftOperators::from_boundaries(self.lower_boundary.as_ref(), &self.upper_boundary)
    }

    pub fn apply(&self, y: &DMatrix<f64>) -> DMatrix<f64> {
        DMatrix::from_fn(y.nrows(), y.ncols(), |i, j| self.signs[i] * y[(i, j)])
    }
}

/// Reverses the reference orientation of the listed order-`k` simplices.
pub fn orientation_flip(x: &SimplicialComplex, k: usize, flip_set: &[usize]) -> Result<OrientationFlip> {
    if k == 0 {
        return Err(Error::InvalidParameter("nodes carry no orientation".into()));
    }
    if x.max_order().is_none_or(|m| k > m) {
        return Err(Error::InvalidOrder { order: k, max_order: x.max_order() });
    }
    let n = x.count(k);
    let mut flip = vec![false; n];
    for &i in flip_set {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, dimension: n });
        }
        flip[i] = true;
    }
    let signs = DVector::from_iterator(n, flip.iter().map(|&f| if f { -1.0 } else { 1.0 }));
    Ok(OrientationFlip {
        signs,
        lower_boundary: Some(x.boundary_matrix(k)?.flip_columns(&flip)),
        upper_boundary: x.boundary_matrix(k + 1)?.flip_rows(&flip),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivarianceReport {
    /// `max |forward'(D Y0) - D forward(Y0)|`.
    pub max_deviation: f64,
    pub activation_odd: bool,
}

/// Compares the network run in the flipped orientation with the flipped
/// output of the original network.
pub fn check_equivariance(
    model: &SnnModel,
    x: &SimplicialComplex,
    y0: &DMatrix<f64>,
    flip_set: &[usize],
) -> Result<EquivarianceReport> {
    let flip = orientation_flip(x, model.order, flip_set)?;
    let reference = flip.apply(&model.forward(x, y0)?);
    let flipped = model.forward_with(&flip.operators(), &flip.apply(y0))?;
    let max_deviation = (flipped - reference).amax();
    Ok(EquivarianceReport { max_deviation, activation_odd: model.activation.is_odd() })
}

/// Gradients of the loss with respect to every parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub weights: Vec<DMatrix<f64>>,
    pub shift_coeffs: Vec<Vec<f64>>,
}

/// Mean squared error over all samples and entries.
pub fn mse_loss(model: &SnnModel, ops: &ShiftOperators, dataset: &[(DMatrix<f64>, DMatrix<f64>)]) -> Result<f64> {
    Ok(loss_and_gradients(model, ops, dataset)?.0)
}

/// Loss and analytic gradients by backpropagation through every layer.
pub fn loss_and_gradients(
    model: &SnnModel,
    ops: &ShiftOperators,
    dataset: &[(DMatrix<f64>, DMatrix<f64>)],
) -> Result<(f64, Gradients)> {
    if dataset.is_empty() {
        return Err(Error::InvalidParameter("dataset is empty".into()));
    }
    let mut grads = Gradients {
        weights: model.layers.iter().map(|l| DMatrix::zeros(l.in_features(), l.out_features())).collect(),
        shift_coeffs: model.layers.iter().map(|l| vec![0.0; l.shift_coeffs.len()]).collect(),
    };
    let entries: usize = dataset.iter().map(|(_, t)| t.len()).sum();
    let norm = 1.0 / entries as f64;
    let mut loss = 0.0;
    for (y0, target) in dataset {
        let cache = model.forward_cached(ops, y0)?;
        if cache.output.shape() != target.shape() {
            return Err(Error::DimensionMismatch { expected: cache.output.len(), found: target.len() });
        }
        let diff = &cache.output - target;
        loss += diff.norm_squared() * norm;
        let mut upstream = diff * (2.0 * norm);
        for (i, lc) in cache.layers.iter().enumerate().rev() {
            let layer = &model.layers[i];
            let dpre = upstream.zip_map(&lc.pre, |g, z| g * model.activation.derivative(z));
            grads.weights[i] += lc.hy.transpose() * &dpre;
            let yw = &lc.input * &layer.weights;
            for (j, p) in lc.basis.iter().enumerate() {
                grads.shift_coeffs[i][j] += (p * &yw).dot(&dpre);
            }
            // H is symmetric
            upstream = &lc.h * dpre * layer.weights.transpose();
        }
    }
    if !loss.is_finite() {
        return Err(Error::NonFinite("loss".into()));
    }
    Ok((loss, grads))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    /// Learning rate; zero leaves the model untouched.
    pub lr: f64,
    pub epochs: usize,
    /// Also update the shift coefficients, not only the weights.
    pub train_shift: bool,
    /// Step-size control: a step that increases the loss is rejected and
    /// the rate halved, up to 60 times per epoch.
    pub halve_on_increase: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { lr: 0.1, epochs: 100, train_shift: false, halve_on_increase: true }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainOutcome {
    pub model: SnnModel,
    /// Loss at the start of each epoch, followed by the final loss.
    pub losses: Vec<f64>,
    pub final_lr: f64,
}

/// Full-batch gradient descent on the mean squared error.
pub fn train(
    model: &SnnModel,
    x: &SimplicialComplex,
    dataset: &[(DMatrix<f64>, DMatrix<f64>)],
    config: &TrainConfig,
) -> Result<TrainOutcome> {
    if config.lr.is_nan() || config.lr < 0.0 || config.lr.is_infinite() {
        return Err(Error::InvalidParameter(format!("learning rate must be non-negative, got {}", config.lr)));
    }
    if config.epochs == 0 {
        return Err(Error::InvalidParameter("epochs must be at least 1".into()));
    }
    let ops = ShiftOperators::from_complex(x, model.order)?;
    let mut current = model.clone();
    let mut lr = config.lr;
    let mut losses = Vec::with_capacity(config.epochs + 1);
    let (mut loss, mut grads) = loss_and_gradients(&current, &ops, dataset)?;
    for _ in 0..config.epochs {
        losses.push(loss);
        if lr == 0.0 {
            continue;
        }
        let mut attempts = 0;
        loop {
            let candidate = step(&current, &grads, lr, config.train_shift);
            match loss_and_gradients(&candidate, &ops, dataset) {
                Ok((new_loss, new_grads)) if !(config.halve_on_increase && new_loss > loss) => {
                    current = candidate;
                    loss = new_loss;
                    grads = new_grads;
                    break;
                }
                Err(e) if !config.halve_on_increase => return Err(e),
                _ => {
                    attempts += 1;
                    lr *= 0.5;
                    if attempts >= 60 {
                        break;
                    }
                }
            }
        }
    }
    losses.push(loss);
    Ok(TrainOutcome { model: current, losses, final_lr: lr })
}

fn step(model: &SnnModel, grads: &Gradients, lr: f64, train_shift: bool) -> SnnModel {
    let mut out = model.clone();
    for (i, layer) in out.layers.iter_mut().enumerate() {
        layer.weights -= &grads.weights[i] * lr;
        if train_shift {
            for (c, g) in layer.shift_coeffs.iter_mut().zip(&grads.shift_coeffs[i]) {
                *c -= lr * g;
            }
        }
    }
    out
}

/// Weight-tied recurrent network `Y <- sigma(H Y W)` iterated until the
/// largest entry change drops below `tol`. Returns the fixed point and the
/// number of iterations used.
pub fn recurrent_forward(
    ops: &ShiftOperators,
    shift: ShiftKind,
    layer: &LayerParams,
    activation: Activation,
    y0: &DMatrix<f64>,
    max_iter: usize,
    tol: f64,
) -> Result<(DMatrix<f64>, usize)> {
    if layer.in_features() != layer.out_features() {
        return Err(Error::LayerMismatch { layer: 0, detail: "recurrent weights must be square".into() });
    }
    if y0.nrows() != ops.dim() || y0.ncols() != layer.in_features() {
        return Err(Error::DimensionMismatch { expected: ops.dim() * layer.in_features(), found: y0.len() });
    }
    let h = ops.filter(shift, &layer.shift_coeffs);
    let mut y = y0.clone();
    for it in 1..=max_iter {
        let next = (&h * &y * &layer.weights).map(|v| activation.eval(v));
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("recurrent iteration {it}")));
        }
        let change = (&next - &y).amax();
        y = next;
        if change <= tol {
            return Ok((y, it));
        }
    }
    Err(Error::NotConverged(max_iter))
}
