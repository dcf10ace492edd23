//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hodge_sp::classic::{self, CirculantCoefficients, TimeSignal};
use hodge_sp::complex::integer_rank;
use hodge_sp::dynamics::{self, Method, Nonlinearity};
use hodge_sp::filters::{self, ErrorSummary, Regularizer};
use hodge_sp::fixtures::{self, two_holes};
use hodge_sp::interpolation::{self, LabeledSignal};
use hodge_sp::snn::{self, Activation, LayerParams, ShiftKind, ShiftOperators, SnnModel};
use hodge_sp::spectral;
use hodge_sp::{Simplex, SimplicialComplex};

const ORTHO_TOL: f64 = 1e-8;
const RECON_TOL: f64 = 1e-8;
const LIFT_TOL: f64 = 1e-8;
const SIGNIFICANCE: f64 = 3.0;
const PEARSON_MIN: f64 = 0.99;
const INTERP_ERR_MAX: f64 = 0.1;
const ALPHA_GRID: [f64; 4] = [0.01, 0.05, 0.1, 0.5];
const HARMONIC_TOL: f64 = 1e-6;
const EQUIVARIANCE_TOL: f64 = 1e-10;
const RELU_MIN_DEVIATION: f64 = 1e-3;
const FD_STEP: f64 = 1e-5;
const FD_REL_TOL: f64 = 1e-5;
const EIG_MULTISET_TOL: f64 = 1e-8;
const PATH_TOL: f64 = 1e-10;

type Outcome = Result<String, String>;
type Bump = Box<dyn Fn(&mut SnnModel, f64)>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal))
}

// Orthonormal basis of the column span by modified Gram-Schmidt.
fn gram_schmidt(a: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for j in 0..a.ncols() {
        let mut v = a.column(j).into_owned();
        for _ in 0..2 {
            for q in &basis {
                let c = q.dot(&v);
                v -= q * c;
            }
        }
        let n = v.norm();
        if n > 1e-9 {
            basis.push(v / n);
        }
    }
    basis
}

fn project(basis: &[DVector<f64>], f: &DVector<f64>) -> DVector<f64> {
    basis.iter().fold(DVector::zeros(f.len()), |acc, q| acc + q * q.dot(f))
}

fn criterion_1() -> Outcome {
    let x = two_holes();
    let b1: [[i64; 10]; 7] = [
        [-1, -1, -1, 0, 0, 0, 0, 0, 0, 0],
        [1, 0, 0, -1, 0, 0, 0, 0, 0, 0],
        [0, 1, 0, 1, -1, -1, 0, 0, 0, 0],
        [0, 0, 1, 0, 1, 0, -1, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 1, -1, -1, 0],
        [0, 0, 0, 0, 0, 1, 0, 1, 0, -1],
        [0, 0, 0, 0, 0, 0, 0, 0, 1, 1],
    ];
    let b2: [[i64; 2]; 10] = [[0, 0], [1, 0], [-1, 0], [0, 0], [1, 0], [0, 0], [0, 0], [0, 1], [0, -1], [0, 1]];
    let edges: Vec<String> = x.simplices(1).iter().map(|s| s.to_string()).collect();
    ensure(
        edges == ["(1,2)", "(1,3)", "(1,4)", "(2,3)", "(3,4)", "(3,6)", "(4,5)", "(5,6)", "(5,7)", "(6,7)"],
        || format!("edge order {edges:?}"),
    )?;
    let got1 = x.boundary_matrix(1).map_err(|e| e.to_string())?.to_dense_int();
    let got2 = x.boundary_matrix(2).map_err(|e| e.to_string())?.to_dense_int();
    let want1: Vec<Vec<i64>> = b1.iter().map(|r| r.to_vec()).collect();
    let want2: Vec<Vec<i64>> = b2.iter().map(|r| r.to_vec()).collect();
    ensure(got1 == want1, || format!("B1 differs: {got1:?}"))?;
    ensure(got2 == want2, || format!("B2 differs: {got2:?}"))?;
    Ok("B1 (7x10) and B2 (10x2) match entry for entry".into())
}

fn random_complex(rng: &mut ChaCha8Rng) -> SimplicialComplex {
    let nv = rng.random_range(1..=8);
    let count = rng.random_range(1..=6);
    let mut maximal = Vec::new();
    for _ in 0..count {
        let size = rng.random_range(1..=4.min(nv));
        let mut vs: Vec<usize> = (0..nv).collect();
        for i in 0..size {
            let j = rng.random_range(i..nv);
            vs.swap(i, j);
        }
        vs.truncate(size);
        maximal.push(Simplex::from_unsorted(vs).expect("distinct vertices"));
    }
    SimplicialComplex::from_maximal_simplices(&maximal)
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut products = 0;
    for trial in 0..500 {
        let x = random_complex(&mut rng);
        let top = x.max_order().unwrap_or(0);
        for k in 1..top {
            let bk = x.boundary_matrix(k).map_err(|e| e.to_string())?;
            let bk1 = x.boundary_matrix(k + 1).map_err(|e| e.to_string())?;
            let p = bk.mul_int(&bk1).map_err(|e| e.to_string())?;
            ensure(p.iter().flatten().all(|&v| v == 0), || format!("trial {trial}: B{k} B{} != 0", k + 1))?;
            products += 1;
        }
    }
    Ok(format!("500 complexes, {products} products B_k B_(k+1) all exactly zero"))
}

fn criterion_3() -> Outcome {
    let x = two_holes();
    let b1 = x.boundary_matrix(1).map_err(|e| e.to_string())?;
    let b2 = x.boundary_matrix(2).map_err(|e| e.to_string())?;
    let r1 = integer_rank(&b1.to_dense_int());
    let r2 = integer_rank(&b2.to_dense_int());
    let b = spectral::betti(&x, 1).map_err(|e| e.to_string())?;
    ensure(b == 2, || format!("b1 = {b}"))?;
    ensure(r1 + r2 + b == 10, || format!("rank(B1) {r1} + rank(B2) {r2} + b1 {b} != 10"))?;

    let grad_basis = gram_schmidt(&b1.to_dense().transpose());
    let curl_basis = gram_schmidt(&b2.to_dense());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    let mut flows = vec![fixtures::harmonic_flow(), DVector::from_row_slice(&fixtures::INTERPOLATION_TRUTH)];
    flows.extend((0..100).map(|_| gaussian(&mut rng, 10)));
    for (i, f) in flows.iter().enumerate() {
        let d = spectral::hodge_decompose(&x, f).map_err(|e| e.to_string())?;
        let dots = [d.gradient.dot(&d.curl), d.gradient.dot(&d.harmonic), d.curl.dot(&d.harmonic)];
        let recon = (&d.gradient + &d.curl + &d.harmonic - f).amax();
        let og = project(&grad_basis, f);
        let oc = project(&curl_basis, f);
        let oracle = (&d.gradient - &og).amax().max((&d.curl - &oc).amax()).max((&d.harmonic - (f - &og - &oc)).amax());
        ensure(dots.iter().all(|v| v.abs() <= ORTHO_TOL), || format!("flow {i}: dots {dots:?}"))?;
        ensure(recon <= RECON_TOL, || format!("flow {i}: reconstruction error {recon:e}"))?;
        ensure(oracle <= RECON_TOL, || format!("flow {i}: projection oracle differs by {oracle:e}"))?;
        worst = worst.max(recon).max(oracle).max(dots.iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    Ok(format!("ranks {r1}+{r2}+{b}=10, {} flows, worst deviation {worst:.1e}", flows.len()))
}

fn criterion_4() -> Outcome {
    let x = two_holes();
    let l1 = x.hodge_laplacian(1).map_err(|e| e.to_string())?;
    let grads = spectral::lift_gradient_eigenvectors(&x).map_err(|e| e.to_string())?;
    let curls = spectral::lift_curl_eigenvectors(&x).map_err(|e| e.to_string())?;
    ensure(grads.len() == 6 && curls.len() == 2, || format!("lift counts {} and {}", grads.len(), curls.len()))?;
    let mut worst = 0.0f64;
    for (lambda, v) in grads.iter().chain(&curls) {
        let res = (&l1 * v - v * *lambda).norm() / v.norm();
        ensure(res <= LIFT_TOL, || format!("lift with eigenvalue {lambda} has residual {res:e}"))?;
        worst = worst.max(res);
    }
    Ok(format!("6 gradient and 2 curl lifts, worst relative residual {worst:.1e}"))
}

fn criterion_5() -> Outcome {
    let x = two_holes();
    let f0 = fixtures::harmonic_flow();
    let harm = (x.hodge_laplacian(1).map_err(|e| e.to_string())? * &f0).amax();
    ensure(harm <= 1e-10, || format!("ground truth is not harmonic: |L1 f0| = {harm:e}"))?;
    let reports =
        filters::flow_denoise_trials(&x, &f0, 0.5, 0, 100, &Regularizer::ALL, 0.5).map_err(|e| e.to_string())?;
    let noisy = ErrorSummary::from_samples(&reports.iter().map(|r| r.noisy_error).collect::<Vec<_>>());
    let summary =
        |r: Regularizer| ErrorSummary::from_samples(&reports.iter().map(|p| p.error(r).unwrap()).collect::<Vec<_>>());
    let ladder = [
        ("hodge", summary(Regularizer::Hodge)),
        ("edge", summary(Regularizer::Edge)),
        ("noisy", noisy),
        ("line-graph", summary(Regularizer::LineGraph)),
    ];
    for w in ladder.windows(2) {
        let (a, sa) = w[0];
        let (b, sb) = w[1];
        let se = (sa.std_error.powi(2) + sb.std_error.powi(2)).sqrt();
        ensure(sb.mean - sa.mean > SIGNIFICANCE * se, || {
            format!("{a} {:.4} vs {b} {:.4}: gap below {SIGNIFICANCE} standard errors ({se:.4})", sa.mean, sb.mean)
        })?;
    }
    let text: Vec<String> = ladder.iter().map(|(n, s)| format!("{n} {:.3}±{:.3}", s.mean, s.std_error)).collect();
    Ok(text.join(" < "))
}

fn criterion_6() -> Outcome {
    let x = two_holes();
    let truth = DVector::from_row_slice(&fixtures::INTERPOLATION_TRUTH);
    let idx = fixtures::INTERPOLATION_LABELED_INDICES.to_vec();
    for (e, &i) in fixtures::INTERPOLATION_LABELED_EDGES.iter().zip(&idx) {
        let s = Simplex::new(e.to_vec()).map_err(|e| e.to_string())?;
        ensure(x.index_of(&s) == Some(i), || format!("label index of {s}"))?;
    }
    let labels =
        LabeledSignal::new(idx.clone(), idx.iter().map(|&i| truth[i]).collect(), 10).map_err(|e| e.to_string())?;
    let b1 = x.boundary_matrix(1).map_err(|e| e.to_string())?.to_dense();
    let phi = interpolation::expansion_operator(10, &idx).map_err(|e| e.to_string())?.matrix();
    let f0 = labels.zero_filled();
    let mut passing = Vec::new();
    let mut lines = Vec::new();
    for alpha in ALPHA_GRID {
        let est = interpolation::interpolate_edge_flow(&x, &labels, alpha, false).map_err(|e| e.to_string())?;
        // normal equations of the stacked problem
        let a = &b1 * &phi;
        let lhs = a.transpose() * &a + DMatrix::identity(phi.ncols(), phi.ncols()) * (alpha * alpha);
        let rhs = -(a.transpose() * (&b1 * &f0));
        let xu = lhs.lu().solve(&rhs).ok_or("singular normal equations")?;
        let oracle = &f0 + &phi * xu;
        let diff = (&est - &oracle).amax();
        ensure(diff <= 1e-9, || format!("alpha {alpha}: QR and normal equations differ by {diff:e}"))?;
        let p = interpolation::pearson(est.as_slice(), truth.as_slice()).map_err(|e| e.to_string())?;
        let err = (&est - &truth).norm();
        lines.push(format!("a={alpha}: r={p:.5} err={err:.3}"));
        if p >= PEARSON_MIN && err <= INTERP_ERR_MAX {
            passing.push(alpha);
        }
    }
    ensure(!passing.is_empty(), || format!("no alpha in the grid qualifies: {}", lines.join("; ")))?;
    Ok(format!("qualifying alpha {passing:?}; {}", lines.join("; ")))
}

fn criterion_7() -> Outcome {
    let x = two_holes();
    let b1 = x.boundary_matrix(1).map_err(|e| e.to_string())?.to_dense();
    let b2 = x.boundary_matrix(2).map_err(|e| e.to_string())?.to_dense();
    let mut image = DMatrix::zeros(10, 7 + 2);
    image.view_mut((0, 0), (10, 7)).copy_from(&b1.transpose());
    image.view_mut((0, 7), (10, 2)).copy_from(&b2);
    let image_basis = gram_schmidt(&image);
    let mut worst = 0.0f64;
    for seed in 0..20 {
        let w0 = dynamics::random_initial(10, 1000 + seed);
        let traj =
            dynamics::simulate_hodge_flow(&x, 1, &w0, 0.5, 50.0, Method::ExactSpectral).map_err(|e| e.to_string())?;
        let target = &w0 - project(&image_basis, &w0);
        let d = (traj.final_state() - target).norm();
        ensure(d <= HARMONIC_TOL, || format!("seed {seed}: distance to harmonic part {d:e}"))?;
        worst = worst.max(d);
    }
    let mut holes = Vec::new();
    for run in 0..20u64 {
        holes.push(dynamics::detect_holes(&x, 1, 10, run * 100, 0.5, 50.0).map_err(|e| e.to_string())?);
    }
    ensure(holes.iter().all(|&h| h == 2), || format!("detected holes {holes:?}"))?;
    Ok(format!("20 flows within {worst:.1e} of their harmonic part; 20/20 hole counts equal 2"))
}

fn criterion_8() -> Outcome {
    let x = two_holes();
    let l1 = x.hodge_laplacian(1).map_err(|e| e.to_string())?;
    let (dt, t_max) = (0.01, 10.0);
    let mut max_rise = f64::NEG_INFINITY;
    for seed in 0..20 {
        let w0 = dynamics::random_initial(10, 2000 + seed) * 0.5;
        let lin = dynamics::simulate_hodge_flow(&x, 1, &w0, dt, t_max, Method::Euler).map_err(|e| e.to_string())?;
        let ident =
            dynamics::simulate_nonlinear(&x, 1, &w0, &Nonlinearity::Identity, dt, t_max).map_err(|e| e.to_string())?;
        ensure(lin.states == ident.states, || format!("seed {seed}: identity trajectory is not bit-equal"))?;
        // plain matrix-form Euler as an independent reference
        let mut w = w0.clone();
        for _ in 1..lin.len() {
            w = &w - (&l1 * &w) * dt;
        }
        let gap = (&w - lin.final_state()).amax();
        ensure(gap <= 1e-12, || format!("seed {seed}: factored Euler differs from matrix Euler by {gap:e}"))?;

        let tanh =
            dynamics::simulate_nonlinear(&x, 1, &w0, &Nonlinearity::Tanh, dt, t_max).map_err(|e| e.to_string())?;
        ensure(tanh.len() == 1001, || format!("expected 1000 steps, got {}", tanh.len() - 1))?;
        let energies: Vec<f64> = tanh
            .states
            .iter()
            .map(|s| dynamics::nonlinear_energy(&x, 1, s, &Nonlinearity::Tanh))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        for (i, w) in energies.windows(2).enumerate() {
            ensure(w[1] <= w[0], || format!("seed {seed}: energy rises at step {i}: {} -> {}", w[0], w[1]))?;
            max_rise = max_rise.max(w[1] - w[0]);
        }
    }
    Ok(format!("20 identity runs bit-equal; tanh energy never rises (largest step change {max_rise:.1e})"))
}

fn random_model(rng: &mut ChaCha8Rng, activation: Activation) -> SnnModel {
    let depth = rng.random_range(1..=3);
    let dims: Vec<usize> = (0..=depth).map(|_| rng.random_range(1..=4)).collect();
    let shift = if rng.random_bool(0.5) { ShiftKind::Hodge } else { ShiftKind::Split };
    let layers = dims
        .windows(2)
        .map(|w| {
            let n_coeffs = match shift {
                ShiftKind::Hodge => rng.random_range(1..=3),
                ShiftKind::Split => 3,
            };
            LayerParams {
                weights: DMatrix::from_fn(w[0], w[1], |_, _| rng.random_range(-1.0..1.0)),
                shift_coeffs: (0..n_coeffs).map(|_| rng.random_range(-0.3..0.3)).collect(),
            }
        })
        .collect();
    SnnModel { order: 1, shift, layers, activation }
}

fn criterion_9() -> Outcome {
    let x = two_holes();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for trial in 0..100 {
        let act = if trial % 2 == 0 { Activation::Tanh } else { Activation::Identity };
        let model = random_model(&mut rng, act);
        let y0 = DMatrix::from_fn(10, model.layers[0].in_features(), |_, _| rng.random_range(-1.0..1.0));
        let flips: Vec<usize> = (0..10).filter(|_| rng.random_bool(0.5)).collect();
        let r = snn::check_equivariance(&model, &x, &y0, &flips).map_err(|e| e.to_string())?;
        ensure(r.max_deviation <= EQUIVARIANCE_TOL, || format!("trial {trial}: deviation {:e}", r.max_deviation))?;
        worst = worst.max(r.max_deviation);
    }

    let relu = SnnModel {
        order: 1,
        shift: ShiftKind::Hodge,
        layers: vec![LayerParams { weights: DMatrix::from_element(1, 1, 1.0), shift_coeffs: vec![1.0] }],
        activation: Activation::Relu,
    };
    let mut y0 = DMatrix::zeros(10, 1);
    y0[(3, 0)] = -1.0;
    let relu_dev = snn::check_equivariance(&relu, &x, &y0, &[3]).map_err(|e| e.to_string())?.max_deviation;
    ensure(relu_dev > RELU_MIN_DEVIATION, || format!("relu counterexample deviation only {relu_dev:e}"))?;

    let ops = ShiftOperators::from_complex(&x, 1).map_err(|e| e.to_string())?;
    let mut worst_fd = 0.0f64;
    let mut checked = 0;
    for m in 0..10 {
        let act = [Activation::Tanh, Activation::Identity][m % 2];
        let model = random_model(&mut rng, act);
        let fin = model.layers[0].in_features();
        let fout = model.layers.last().unwrap().out_features();
        let data: Vec<_> = (0..2)
            .map(|_| {
                (
                    DMatrix::from_fn(10, fin, |_, _| rng.random_range(-1.0..1.0)),
                    DMatrix::from_fn(10, fout, |_, _| rng.random_range(-1.0..1.0)),
                )
            })
            .collect();
        let (_, grads) = snn::loss_and_gradients(&model, &ops, &data).map_err(|e| e.to_string())?;
        let loss_at = |m: &SnnModel| snn::mse_loss(m, &ops, &data).unwrap();
        for (li, layer) in model.layers.iter().enumerate() {
            let mut params: Vec<(f64, Bump)> = Vec::new();
            for r in 0..layer.weights.nrows() {
                for c in 0..layer.weights.ncols() {
                    params.push((
                        grads.weights[li][(r, c)],
                        Box::new(move |m: &mut SnnModel, d| m.layers[li].weights[(r, c)] += d),
                    ));
                }
            }
            for j in 0..layer.shift_coeffs.len() {
                params.push((
                    grads.shift_coeffs[li][j],
                    Box::new(move |m: &mut SnnModel, d| m.layers[li].shift_coeffs[j] += d),
                ));
            }
            for (analytic, bump) in params {
                let mut plus = model.clone();
                bump(&mut plus, FD_STEP);
                let mut minus = model.clone();
                bump(&mut minus, -FD_STEP);
                let numeric = (loss_at(&plus) - loss_at(&minus)) / (2.0 * FD_STEP);
                let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-3);
                ensure(rel <= FD_REL_TOL, || {
                    format!("model {m} layer {li}: analytic {analytic:e} vs numeric {numeric:e} (relative {rel:e})")
                })?;
                worst_fd = worst_fd.max(rel);
                checked += 1;
            }
        }
    }
    Ok(format!(
        "100 flips within {worst:.1e}; relu counterexample {relu_dev:.2}; {checked} gradients within {worst_fd:.1e}"
    ))
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for n in 2..=16 {
        for _ in 0..5 {
            let c = CirculantCoefficients::new((0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
                .map_err(|e| e.to_string())?;
            let response = classic::frequency_response(&c);
            let eig: Vec<Complex64> = classic::circulant_filter(&c).complex_eigenvalues().iter().copied().collect();
            ensure(classic::multiset_close(&response, &eig, EIG_MULTISET_TOL), || {
                format!("n = {n}: response differs from eigenvalues")
            })?;
        }
    }
    let mut worst = 0.0f64;
    for trial in 0..100 {
        let n = rng.random_range(1..=32);
        let c = CirculantCoefficients::new((0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
            .map_err(|e| e.to_string())?;
        let s = TimeSignal::new((0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).map_err(|e| e.to_string())?;
        let reference = classic::apply_filter_matrix(&c, &s).map_err(|e| e.to_string())?;
        let others = [
            classic::apply_filter_convolution(&c, &s),
            classic::apply_filter_shift_form(&c, &s),
            classic::apply_filter_state_space(&c, &s),
            classic::apply_filter_spectral(&c, &s),
        ];
        for y in others {
            let d = (y.map_err(|e| e.to_string())?.as_vector() - reference.as_vector()).amax();
            ensure(d <= PATH_TOL, || format!("trial {trial} (n = {n}): paths differ by {d:e}"))?;
            worst = worst.max(d);
        }
    }
    Ok(format!("eigenvalue multisets match for n = 2..16; 100 signals, paths agree within {worst:.1e}"))
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

fn cli_suite() -> Vec<Vec<String>> {
    let sc = fixture("two_holes.sc");
    let flow = fixture("harmonic_flow.sig");
    let truth = fixture("interpolation_truth.sig");
    let labels = fixture("interpolation_labels.lab");
    let model = fixture("snn_model.json");
    let feats = fixture("snn_features.sig");
    let targets = fixture("snn_targets.sig");
    let s = |v: &[&str]| v.iter().map(|t| t.to_string()).collect::<Vec<_>>();
    vec![
        s(&["info", &sc]),
        s(&["info", "--dump", &sc]),
        s(&["classic", "--coeffs", "0.5,0.25,-0.125", "--signal", "1,-2,3,0.5,0,4"]),
        s(&["decompose", &sc, &truth]),
        s(&["denoise", "--seed", "7", &sc, &flow]),
        s(&["denoise", "--regularizer", "line-graph", "--seed", "7", &sc, &flow]),
        s(&["denoise", "--trials", "100", &sc, &flow]),
        s(&["denoise", "--mu", "0.1", "--steps", "5", "--seed", "3", &sc, &flow]),
        s(&["smooth", "--mu", "0.1", "--steps", "5", &sc, &flow]),
        s(&["interpolate", "--alpha", "0.1", &sc, &labels, "--truth", &truth]),
        s(&["interpolate", "--alpha", "0.1", "--use-triangles", &sc, &labels, "--truth", &truth]),
        s(&["dynamics", "--init", "random:5", "--holes", "10", &sc]),
        s(&["dynamics", "--method", "euler", "--nonlinearity", "tanh", "--t-max", "5", &sc]),
        s(&["snn", "forward", "--model", &model, &sc, &feats]),
        s(&["snn", "train", "--model", &model, "--epochs", "50", &sc, &feats, &targets]),
        s(&["snn", "equivariance", "--model", &model, "--flip", "0,3,7", &sc, &feats]),
    ]
}

fn run_suite(bin: &str) -> Result<Vec<Vec<u8>>, String> {
    cli_suite()
        .into_iter()
        .map(|args| {
            let out = Command::new(bin).args(&args).output().map_err(|e| e.to_string())?;
            if !out.status.success() {
                return Err(format!("{args:?} exited with {}: {}", out.status, String::from_utf8_lossy(&out.stderr)));
            }
            Ok(out.stdout)
        })
        .collect()
}

fn criterion_11() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_hodge-sp");
    let first = run_suite(bin)?;
    let second = run_suite(bin)?;
    let cases = cli_suite();
    for ((a, b), args) in first.iter().zip(&second).zip(&cases) {
        ensure(a == b, || format!("output differs between runs for {args:?}"))?;
        ensure(!a.is_empty(), || format!("{args:?} printed nothing"))?;
    }
    let bytes: usize = first.iter().map(Vec::len).sum();
    let interp = String::from_utf8_lossy(&first[9]);
    let pearson: f64 = interp
        .lines()
        .find_map(|l| l.strip_prefix("# pearson "))
        .and_then(|v| v.parse().ok())
        .ok_or("interpolate printed no pearson line")?;
    ensure(pearson >= PEARSON_MIN, || format!("CLI interpolation pearson {pearson}"))?;
    Ok(format!("{} invocations, {bytes} bytes, identical across two runs", cases.len()))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("boundary fixtures", criterion_1, Duration::from_millis(100)),
        ("boundary of boundary", criterion_2, Duration::from_secs(5)),
        ("hodge decomposition", criterion_3, Duration::from_secs(2)),
        ("eigenvector lifts", criterion_4, Duration::from_secs(1)),
        ("denoising ordering", criterion_5, Duration::from_secs(10)),
        ("interpolation fixture", criterion_6, Duration::from_secs(1)),
        ("harmonic dynamics", criterion_7, Duration::from_secs(2)),
        ("nonlinear reduction", criterion_8, Duration::from_secs(5)),
        ("snn equivariance and gradients", criterion_9, Duration::from_secs(10)),
        ("classic dsp cross-validation", criterion_10, Duration::from_secs(5)),
        ("cli reproducibility", criterion_11, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > *budget => Err(format!("took {elapsed:.2?}, budget {budget:.2?} ({detail})")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} [{elapsed:.2?}]: {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{elapsed:.2?}]: {reason}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
