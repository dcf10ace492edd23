//! Cyclic time-domain DSP: the DFT matrix, circulant filters and their
//! equivalent realizations (matrix product, cyclic convolution, sum of shift
//! powers, shift-register state evolution, and Fourier-domain gain).

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest imaginary part tolerated when a real signal goes through a
/// complex-valued route.
pub const IMAGINARY_TOLERANCE: f64 = 1e-10;

/// A real time series `s(0), ..., s(n-1)` with `n >= 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSignal(DVector<f64>);

impl TimeSignal {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidParameter("time signal must be non-empty".into()));
        }
        Ok(Self(DVector::from_vec(samples)))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_vector(self) -> DVector<f64> {
        self.0
    }
}

/// Impulse response `c_0, ..., c_{n-1}` of a cyclic filter.
#[derive(Clone, Debug, PartialEq)]
pub struct CirculantCoefficients(Vec<f64>);

impl CirculantCoefficients {
    pub fn new(c: Vec<f64>) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::InvalidParameter("coefficient vector must be non-empty".into()));
        }
        Ok(Self(c))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Unitary DFT matrix `F[j,k] = w^{jk} / sqrt(n)`, `w = exp(-2 pi i / n)`.
pub fn dft_matrix(n: usize) -> Result<DMatrix<Complex64>> {
    if n == 0 {
        return Err(Error::InvalidParameter("DFT size must be positive".into()));
    }
    let scale = 1.0 / (n as f64).sqrt();
    Ok(DMatrix::from_fn(n, n, |j, k| {
        // reduce the exponent first so large n keeps full accuracy
        let e = (j * k) % n;
        Complex64::from_polar(scale, -2.0 * PI * e as f64 / n as f64)
    }))
}

/// Circulant matrix `H[i,j] = c_{(i-j) mod n}`.
pub fn circulant_filter(c: &CirculantCoefficients) -> DMatrix<f64> {
    let n = c.len();
    DMatrix::from_fn(n, n, |i, j| c.0[(i + n - j) % n])
}

/// The cyclic shift `S` (`S[i, i-1] = 1`, `S[0, n-1] = 1`).
pub fn cyclic_shift(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| if (j + 1) % n == i { 1.0 } else { 0.0 })
}

/// Eigenvalues of the circulant filter, `sqrt(n) F c`.
pub fn frequency_response(c: &CirculantCoefficients) -> Vec<Complex64> {
    let n = c.len();
    (0..n)
        .map(|j| {
            c.0.iter()
                .enumerate()
                .map(|(k, &ck)| Complex64::from_polar(ck, -2.0 * PI * ((j * k) % n) as f64 / n as f64))
                .sum()
        })
        .collect()
}

fn check_len(c: &CirculantCoefficients, s: &TimeSignal) -> Result<()> {
    if c.len() != s.len() {
        return Err(Error::DimensionMismatch { expected: c.len(), found: s.len() });
    }
    Ok(())
}

/// `H s` with the explicit circulant matrix.
pub fn apply_filter_matrix(c: &CirculantCoefficients, s: &TimeSignal) -> Result<TimeSignal> {
    check_len(c, s)?;
    Ok(TimeSignal(circulant_filter(c) * &s.0))
}

/// Cyclic convolution `sum_i c(i) s((t - i) mod n)`.
pub fn apply_filter_convolution(c: &CirculantCoefficients, s: &TimeSignal) -> Result<TimeSignal> {
    check_len(c, s)?;
    let n = c.len();
    let out = (0..n).map(|t| (0..n).map(|i| c.0[i] * s.0[(t + n - i) % n]).sum()).collect();
    Ok(TimeSignal(DVector::from_vec(out)))
}

/// `sum_k c_k S^k s`, accumulating successive shift powers.
pub fn apply_filter_shift_form(c: &CirculantCoefficients, s: &TimeSignal) -> Result<TimeSignal> {
    check_len(c, s)?;
    let shift = cyclic_shift(c.len());
    let mut power = s.0.clone();
    let mut out = DVector::zeros(c.len());
    for (k, &ck) in c.0.iter().enumerate() {
        if k > 0 {
            power = &shift * power;
        }
        out += ck * &power;
    }
    Ok(TimeSignal(out))
}

/// Shift-register realization: the state starts at the input,
/// `x(t+1) = S x(t)` moves each sample one slot along the directed cycle, and
/// the output is the weighted sum of visited states `sum_t c_t x(t)`.
pub fn apply_filter_state_space(c: &CirculantCoefficients, s: &TimeSignal) -> Result<TimeSignal> {
    check_len(c, s)?;
    let n = c.len();
    let mut state = s.0.clone();
    let mut out = DVector::zeros(n);
    for &ct in &c.0 {
        out += ct * &state;
        // x(t+1) = S x(t) without forming S
        let last = state[n - 1];
        for i in (1..n).rev() {
            state[i] = state[i - 1];
        }
        state[0] = last;
    }
    Ok(TimeSignal(out))
}

/// `F^* diag(lambda) F s`. Fails if the result has an imaginary residue above
/// [`IMAGINARY_TOLERANCE`]; otherwise returns the real part.
pub fn apply_filter_spectral(c: &CirculantCoefficients, s: &TimeSignal) -> Result<TimeSignal> {
    check_len(c, s)?;
    let f = dft_matrix(c.len())?;
    let lambda = frequency_response(c);
    let sc = s.0.map(|x| Complex64::new(x, 0.0));
    let mut spec = &f * sc;
    for (v, l) in spec.iter_mut().zip(&lambda) {
        *v *= l;
    }
    let out = f.adjoint() * spec;
    let residue = out.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if residue > IMAGINARY_TOLERANCE {
        return Err(Error::ImaginaryResidue(residue));
    }
    Ok(TimeSignal(out.map(|z| z.re)))
}

/// Compares two complex multisets within `tol`, pairing each value of `a`
/// with its nearest unused partner in `b`.
pub fn multiset_close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    for x in a {
        let best = b
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, y)| (i, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1));
        match best {
            Some((i, d)) if d <= tol => used[i] = true,
            _ => return false,
        }
    }
    true
}
