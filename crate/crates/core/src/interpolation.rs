//! Semi-supervised interpolation of node signals and edge flows from a
//! subset of exactly known labels.

use nalgebra::{DMatrix, DVector};

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};

/// Relative size of a diagonal entry of `R` below which the least-squares
/// system is considered rank deficient.
pub const RANK_TOL: f64 = 1e-10;

/// Known values on a strictly increasing subset of simplex indices.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledSignal {
    indices: Vec<usize>,
    values: Vec<f64>,
    total: usize,
}

impl LabeledSignal {
    pub fn new(indices: Vec<usize>, values: Vec<f64>, total: usize) -> Result<Self> {
        if indices.len() != values.len() {
            return Err(Error::DimensionMismatch { expected: indices.len(), found: values.len() });
        }
        let mut pairs: Vec<(usize, f64)> = indices.into_iter().zip(values).collect();
        pairs.sort_by_key(|p| p.0);
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::DuplicateIndex(w[0].0));
            }
        }
        if let Some(&(index, _)) = pairs.iter().find(|p| p.0 >= total) {
            return Err(Error::IndexOutOfRange { index, dimension: total });
        }
        let (indices, values) = pairs.into_iter().unzip();
        Ok(Self { indices, values, total })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn is_labeled(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    /// Complementary ascending index list.
    pub fn unlabeled(&self) -> Vec<usize> {
        (0..self.total).filter(|&i| !self.is_labeled(i)).collect()
    }

    /// Labels at their positions, zero elsewhere.
    pub fn zero_filled(&self) -> DVector<f64> {
        let mut f = DVector::zeros(self.total);
        for (&i, &v) in self.indices.iter().zip(&self.values) {
            f[i] = v;
        }
        f
    }
}

/// Selection map from the unlabeled coordinates into the full signal space:
/// column `j` is the unit vector of the `j`-th unlabeled index.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionOperator {
    total: usize,
    unlabeled: Vec<usize>,
}

impl ExpansionOperator {
    pub fn total(&self) -> usize {
        self.total
    }

    pub fn unlabeled(&self) -> &[usize] {
        &self.unlabeled
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let mut phi = DMatrix::zeros(self.total, self.unlabeled.len());
        for (j, &i) in self.unlabeled.iter().enumerate() {
            phi[(i, j)] = 1.0;
        }
        phi
    }

    /// `base + Phi x`, writing `x` into the unlabeled slots.
    pub fn expand(&self, base: &DVector<f64>, x: &DVector<f64>) -> DVector<f64> {
        let mut out = base.clone();
        for (&i, &v) in self.unlabeled.iter().zip(x.iter()) {
            out[i] += v;
        }
        out
    }
}

pub fn expansion_operator(total: usize, labeled_indices: &[usize]) -> Result<ExpansionOperator> {
    let labels = LabeledSignal::new(labeled_indices.to_vec(), vec![0.0; labeled_indices.len()], total)?;
    Ok(ExpansionOperator { total, unlabeled: labels.unlabeled() })
}

/// Harmonic interpolation of node labels: minimizes `y^T L_0 y` with the
/// labeled entries fixed.
pub fn interpolate_node_labels(x: &SimplicialComplex, labels: &LabeledSignal) -> Result<DVector<f64>> {
    let n = x.num_nodes();
    if labels.total() != n {
        return Err(Error::DimensionMismatch { expected: n, found: labels.total() });
    }
    let comps = x.node_components();
    let n_comps = comps.iter().copied().max().map_or(0, |m| m + 1);
    let mut covered = vec![false; n_comps];
    for &i in labels.indices() {
        covered[comps[i]] = true;
    }
    if let Some(c) = covered.iter().position(|&c| !c) {
        let node = comps.iter().position(|&k| k == c).expect("component has a node");
        return Err(Error::UnlabeledComponent { vertex: x.simplices(0)[node].vertices()[0] });
    }

    let l = x.hodge_laplacian(0)?;
    let unl = labels.unlabeled();
    let mut out = labels.zero_filled();
    if unl.is_empty() {
        return Ok(out);
    }
    let lab = labels.indices();
    let l_uu = DMatrix::from_fn(unl.len(), unl.len(), |a, b| l[(unl[a], unl[b])]);
    let rhs = DVector::from_fn(unl.len(), |a, _| {
        -lab.iter().zip(labels.values()).map(|(&j, &v)| l[(unl[a], j)] * v).sum::<f64>()
    });
    let sol = l_uu
        .cholesky()
        .ok_or_else(|| Error::InvalidParameter("reduced Laplacian is not positive definite".into()))?
        .solve(&rhs);
    for (a, &i) in unl.iter().enumerate() {
        out[i] = sol[a];
    }
    Ok(out)
}

/// Least-squares flow interpolation.
///
/// Solves for the unlabeled entries with the stacked system
/// `[B_1 Phi; alpha I] x ~ [-B_1 f0; 0]`, extended by
/// `B_2^T Phi x ~ -B_2^T f0` when `use_triangles` is set, where `f0` holds
/// the labels and zeros. Labeled entries of the result are the inputs.
pub fn interpolate_edge_flow(
    x: &SimplicialComplex,
    labels: &LabeledSignal,
    alpha: f64,
    use_triangles: bool,
) -> Result<DVector<f64>> {
    let m = x.num_edges();
    if labels.total() != m {
        return Err(Error::DimensionMismatch { expected: m, found: labels.total() });
    }
    if alpha.is_nan() || alpha < 0.0 {
        return Err(Error::InvalidParameter(format!("alpha must be non-negative, got {alpha}")));
    }
    let phi_op = expansion_operator(m, labels.indices())?;
    let f0 = labels.zero_filled();
    let nu = phi_op.unlabeled().len();
    if nu == 0 {
        return Ok(f0);
    }
    let phi = phi_op.matrix();
    let b1 = x.boundary_matrix(1)?.to_dense();

    let mut blocks: Vec<(DMatrix<f64>, DVector<f64>)> =
        vec![(&b1 * &phi, -(&b1 * &f0)), (DMatrix::identity(nu, nu) * alpha, DVector::zeros(nu))];
    if use_triangles {
        let b2t = x.boundary_matrix(2)?.to_dense().transpose();
        blocks.push((&b2t * &phi, -(&b2t * &f0)));
    }
    let rows: usize = blocks.iter().map(|b| b.0.nrows()).sum();
    let mut a = DMatrix::zeros(rows, nu);
    let mut rhs = DVector::zeros(rows);
    let mut r0 = 0;
    for (blk, b) in &blocks {
        a.view_mut((r0, 0), (blk.nrows(), nu)).copy_from(blk);
        rhs.rows_mut(r0, b.len()).copy_from(b);
        r0 += blk.nrows();
    }
    let xu = lstsq_qr(&a, &rhs)?;
    Ok(phi_op.expand(&f0, &xu))
}

/// Least-squares solution of `A x ~ b` via Householder QR. Requires full
/// column rank.
pub fn lstsq_qr(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let (rows, cols) = a.shape();
    if b.len() != rows {
        return Err(Error::DimensionMismatch { expected: rows, found: b.len() });
    }
    if rows < cols {
        return Err(Error::RankDeficient);
    }
    let qr = a.clone().qr();
    let r = qr.r();
    let scale = r.diagonal().amax();
    if scale == 0.0 || r.diagonal().iter().any(|d| d.abs() <= RANK_TOL * scale) {
        return Err(Error::RankDeficient);
    }
    let qtb = qr.q().tr_mul(b);
    r.solve_upper_triangular(&qtb).ok_or(Error::RankDeficient)
}

/// Sample Pearson correlation coefficient.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    if a.len() < 2 {
        return Err(Error::InvalidParameter("pearson needs at least two samples".into()));
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}
