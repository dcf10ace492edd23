//! Command-line front end.
//!
//! Every subcommand writes a CSV table with a header row. Summary values
//! follow the table on lines starting with `#`. Numbers use 17 significant
//! digits, so identical invocations produce identical bytes.
//!
//! Exit codes: 0 success, 1 computation error, 2 usage or I/O error.

use std::ffi::OsString;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::{DMatrix, DVector};

use crate::classic::{self, CirculantCoefficients, TimeSignal};
use crate::complex::SimplicialComplex;
use crate::dynamics::{self, Method, Nonlinearity};
use crate::error::Error;
use crate::filters::{self, ErrorSummary, Regularizer};
use crate::interpolation;
use crate::io::{self, fmt_num, simplex_label};
use crate::snn::{self, ModelSpec, SnnModel, TrainConfig};
use crate::spectral;

/// Parsed command line.
#[derive(Parser, Debug, Clone, PartialEq)]
#[command(name = "hodge-sp", version, about = "Signal processing on simplicial complexes")]
pub struct RunConfig {
    /// Write output to this file instead of standard output.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, PartialEq)]
pub enum Command {
    /// Simplex counts and Betti numbers.
    Info {
        complex: PathBuf,
        /// Print the maximal simplices in complex-file format instead.
        #[arg(long)]
        dump: bool,
    },
    /// Circulant filtering of a time signal along all computation paths.
    Classic {
        /// Filter coefficients, comma separated; zero padded to the signal
        /// length.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        coeffs: Vec<f64>,
        /// Signal samples, comma separated.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        signal: Vec<f64>,
    },
    /// Gradient, curl and harmonic parts of a signal.
    Decompose { complex: PathBuf, signal: PathBuf },
    /// Add seeded noise to a clean signal and filter it.
    Denoise(DenoiseArgs),
    /// Apply `(I - mu L)^steps` to a signal.
    #[command(allow_negative_numbers = true)]
    Smooth {
        complex: PathBuf,
        signal: PathBuf,
        #[arg(long, value_parser = positive)]
        mu: f64,
        #[arg(long, default_value_t = 1)]
        steps: usize,
    },
    /// Fill in unlabeled node or edge values.
    Interpolate(InterpolateArgs),
    /// Integrate the (non)linear Hodge flow.
    Dynamics(DynamicsArgs),
    /// Simplicial neural network tools.
    Snn {
        #[command(subcommand)]
        action: SnnAction,
    },
}

#[derive(Args, Debug, Clone, PartialEq)]
#[command(allow_negative_numbers = true)]
pub struct DenoiseArgs {
    pub complex: PathBuf,
    /// Clean signal; noise is added with `--sigma` and `--seed`.
    pub signal: PathBuf,
    #[arg(long, value_parser = order_01, default_value_t = 1)]
    pub order: usize,
    #[arg(long, value_enum, default_value_t = RegularizerArg::Hodge)]
    pub regularizer: RegularizerArg,
    /// Tikhonov weight.
    #[arg(long, value_parser = positive, default_value_t = 0.5)]
    pub alpha: f64,
    /// Use iterative smoothing with this step instead of Tikhonov.
    #[arg(long, value_parser = positive)]
    pub mu: Option<f64>,
    #[arg(long, default_value_t = 1, requires = "mu")]
    pub steps: usize,
    #[arg(long, value_parser = non_negative, default_value_t = 0.5)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Repeat with seeds `seed .. seed + trials` and report mean errors of
    /// every regularizer.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
}

#[derive(Args, Debug, Clone, PartialEq)]
#[command(allow_negative_numbers = true)]
pub struct InterpolateArgs {
    pub complex: PathBuf,
    pub labels: PathBuf,
    #[arg(long, value_parser = order_01, default_value_t = 1)]
    pub order: usize,
    #[arg(long, value_parser = non_negative, default_value_t = 0.1)]
    pub alpha: f64,
    /// Also penalize curl on filled triangles.
    #[arg(long)]
    pub use_triangles: bool,
    /// Ground truth signal for Pearson correlation and error norm.
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, PartialEq)]
#[command(allow_negative_numbers = true)]
pub struct DynamicsArgs {
    pub complex: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub order: usize,
    #[arg(long, value_parser = positive, default_value_t = 0.01)]
    pub dt: f64,
    #[arg(long, value_parser = non_negative, default_value_t = 50.0)]
    pub t_max: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Spectral)]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value_t = NonlinearityArg::Identity)]
    pub nonlinearity: NonlinearityArg,
    /// Initial state: a signal file or `random:SEED`.
    #[arg(long, default_value = "random:0")]
    pub init: String,
    /// Print every n-th time step.
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub every: u64,
    /// Also estimate the number of holes from this many random runs.
    #[arg(long)]
    pub holes: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, PartialEq)]
pub enum SnnAction {
    /// Run the model on a feature file.
    Forward {
        #[arg(long)]
        model: PathBuf,
        complex: PathBuf,
        features: PathBuf,
    },
    /// Gradient descent on mean squared error; prints the loss curve.
    #[command(allow_negative_numbers = true)]
    Train {
        #[arg(long)]
        model: PathBuf,
        complex: PathBuf,
        features: PathBuf,
        targets: PathBuf,
        #[arg(long, value_parser = non_negative, default_value_t = 0.1)]
        lr: f64,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        epochs: u64,
        #[arg(long)]
        train_shift: bool,
    },
    /// Compare the model before and after an orientation flip.
    Equivariance {
        #[arg(long)]
        model: PathBuf,
        complex: PathBuf,
        features: PathBuf,
        /// Canonical indices of the simplices to flip.
        #[arg(long, value_delimiter = ',')]
        flip: Vec<usize>,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegularizerArg {
    Hodge,
    Edge,
    LineGraph,
}

impl From<RegularizerArg> for Regularizer {
    fn from(r: RegularizerArg) -> Self {
        match r {
            RegularizerArg::Hodge => Regularizer::Hodge,
            RegularizerArg::Edge => Regularizer::Edge,
            RegularizerArg::LineGraph => Regularizer::LineGraph,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodArg {
    Spectral,
    Euler,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonlinearityArg {
    Identity,
    Tanh,
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s:?} is not finite"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be positive, got {v}"))
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("must be non-negative, got {v}"))
    }
}

fn order_01(s: &str) -> Result<usize, String> {
    match s {
        "0" => Ok(0),
        "1" => Ok(1),
        _ => Err(format!("order must be 0 or 1, got {s:?}")),
    }
}

/// Failure of a CLI invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } | Error::MissingSimplices(_) => 2,
            _ => 1,
        };
        Self { code, message: e.to_string() }
    }
}

/// Parses arguments (including the program name). Help and version
/// requests come back as errors with exit code 0.
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    RunConfig::try_parse_from(argv).map_err(|e| {
        let code = if e.use_stderr() { 2 } else { 0 };
        CliError { code, message: e.render().to_string() }
    })
}

/// Runs the command and writes its output; returns the exit code.
pub fn run(config: &RunConfig) -> i32 {
    let result = execute(config).and_then(|text| match &config.output {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message.trim_end());
            e.code
        }
    }
}

/// Runs the command and returns its output text.
pub fn execute(config: &RunConfig) -> Result<String, CliError> {
    match &config.command {
        Command::Info { complex, dump } => info(&load_complex(complex)?, *dump),
        Command::Classic { coeffs, signal } => classic_cmd(coeffs, signal),
        Command::Decompose { complex, signal } => decompose(complex, signal),
        Command::Denoise(args) => denoise(args),
        Command::Smooth { complex, signal, mu, steps } => smooth(complex, signal, *mu, *steps),
        Command::Interpolate(args) => interpolate(args),
        Command::Dynamics(args) => dynamics_cmd(args),
        Command::Snn { action } => snn_cmd(action),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

fn with_path(path: &Path, e: Error) -> CliError {
    let mut err = CliError::from(e);
    err.message = format!("{}: {}", path.display(), err.message);
    err
}

fn load_complex(path: &Path) -> Result<SimplicialComplex, CliError> {
    io::parse_complex(&read(path)?).map_err(|e| with_path(path, e))
}

fn load_signal(path: &Path, x: &SimplicialComplex) -> Result<(usize, DVector<f64>), CliError> {
    io::parse_signal(&read(path)?, x).map_err(|e| with_path(path, e))
}

fn load_features(path: &Path, x: &SimplicialComplex, order: usize) -> Result<DMatrix<f64>, CliError> {
    io::parse_features(&read(path)?, x, order).map_err(|e| with_path(path, e))
}

fn load_model(path: &Path, x: &SimplicialComplex) -> Result<SnnModel, CliError> {
    let spec: ModelSpec =
        serde_json::from_str(&read(path)?).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    Ok(SnnModel::from_spec(x, &spec)?)
}

fn table(header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn summary(out: &mut String, key: &str, value: impl fmt::Display) {
    let _ = writeln!(out, "# {key} {value}");
}

fn info(x: &SimplicialComplex, dump: bool) -> Result<String, CliError> {
    if dump {
        return Ok(io::format_complex(x));
    }
    let top = x.max_order().map_or(0, |m| m + 1);
    let rows = (0..top)
        .map(|k| Ok(vec![k.to_string(), x.count(k).to_string(), spectral::betti(x, k)?.to_string()]))
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(table(&["order".into(), "count".into(), "betti".into()], rows))
}

fn classic_cmd(coeffs: &[f64], signal: &[f64]) -> Result<String, CliError> {
    if coeffs.len() > signal.len() {
        return Err(CliError::usage(format!("{} coefficients for a signal of length {}", coeffs.len(), signal.len())));
    }
    // missing taps are zero
    let mut taps = coeffs.to_vec();
    taps.resize(signal.len(), 0.0);
    let c = CirculantCoefficients::new(taps)?;
    let s = TimeSignal::new(signal.to_vec())?;
    let paths = [
        ("matrix", classic::apply_filter_matrix(&c, &s)?),
        ("convolution", classic::apply_filter_convolution(&c, &s)?),
        ("shift", classic::apply_filter_shift_form(&c, &s)?),
        ("state_space", classic::apply_filter_state_space(&c, &s)?),
        ("spectral", classic::apply_filter_spectral(&c, &s)?),
    ];
    let response = classic::frequency_response(&c);
    let mut header = vec!["index".to_string(), "input".to_string()];
    header.extend(paths.iter().map(|(n, _)| n.to_string()));
    header.extend(["response_re".to_string(), "response_im".to_string()]);
    let rows = (0..s.len()).map(|i| {
        let mut row = vec![i.to_string(), fmt_num(s.as_vector()[i])];
        row.extend(paths.iter().map(|(_, y)| fmt_num(y.as_vector()[i])));
        row.extend([fmt_num(response[i].re), fmt_num(response[i].im)]);
        row
    });
    let mut out = table(&header, rows);
    let reference = paths[0].1.as_vector();
    let spread = paths.iter().map(|(_, y)| (y.as_vector() - reference).amax()).fold(0.0, f64::max);
    summary(&mut out, "max_path_difference", fmt_num(spread));
    Ok(out)
}

fn decompose(complex: &Path, signal: &Path) -> Result<String, CliError> {
    let x = load_complex(complex)?;
    let (k, f) = load_signal(signal, &x)?;
    let d = spectral::hodge_decompose_order(&x, k, &f)?;
    let rows = x.simplices(k).iter().enumerate().map(|(i, s)| {
        vec![simplex_label(s), fmt_num(f[i]), fmt_num(d.gradient[i]), fmt_num(d.curl[i]), fmt_num(d.harmonic[i])]
    });
    let header = ["simplex", "input", "gradient", "curl", "harmonic"].map(String::from);
    let mut out = table(&header, rows);
    summary(&mut out, "norm_input", fmt_num(f.norm()));
    summary(&mut out, "norm_gradient", fmt_num(d.gradient.norm()));
    summary(&mut out, "norm_curl", fmt_num(d.curl.norm()));
    summary(&mut out, "norm_harmonic", fmt_num(d.harmonic.norm()));
    Ok(out)
}

fn denoise(args: &DenoiseArgs) -> Result<String, CliError> {
    let x = load_complex(&args.complex)?;
    let (k, f0) = load_signal(&args.signal, &x)?;
    if k != args.order {
        return Err(CliError::usage(format!("signal has order {k} but --order is {}", args.order)));
    }
    let regularizer = Regularizer::from(args.regularizer);
    if k == 0 && regularizer != Regularizer::Hodge {
        return Err(CliError::usage("node signals only support --regularizer hodge"));
    }
    let q = match k {
        0 => x.hodge_laplacian(0)?,
        _ => regularizer.matrix(&x)?,
    };
    let filter = |y: &DVector<f64>| match args.mu {
        Some(mu) => filters::smooth_iterative(&q, y, mu, args.steps),
        None => filters::denoise_tikhonov(&q, y, args.alpha),
    };

    if args.trials > 1 {
        let regs: Vec<Regularizer> = if k == 0 { vec![Regularizer::Hodge] } else { Regularizer::ALL.to_vec() };
        let mats =
            regs.iter().map(|r| if k == 0 { Ok(q.clone()) } else { r.matrix(&x) }).collect::<Result<Vec<_>, _>>()?;
        let mut noisy_err = Vec::new();
        let mut errs = vec![Vec::new(); regs.len()];
        for t in 0..args.trials {
            let noisy = &f0 + filters::gaussian_noise(f0.len(), args.sigma, args.seed.wrapping_add(t));
            noisy_err.push((&noisy - &f0).norm());
            for (m, e) in mats.iter().zip(errs.iter_mut()) {
                let est = match args.mu {
                    Some(mu) => filters::smooth_iterative(m, &noisy, mu, args.steps)?,
                    None => filters::denoise_tikhonov(m, &noisy, args.alpha)?,
                };
                e.push((est - &f0).norm());
            }
        }
        let mut rows = vec![("noisy".to_string(), ErrorSummary::from_samples(&noisy_err))];
        rows.extend(regs.iter().zip(&errs).map(|(r, e)| (r.name().to_string(), ErrorSummary::from_samples(e))));
        let header = ["method", "mean_error", "std_error"].map(String::from);
        let mut out = table(&header, rows.into_iter().map(|(n, s)| vec![n, fmt_num(s.mean), fmt_num(s.std_error)]));
        summary(&mut out, "trials", args.trials);
        return Ok(out);
    }

    let noisy = &f0 + filters::gaussian_noise(f0.len(), args.sigma, args.seed);
    let est = filter(&noisy)?;
    let rows = x
        .simplices(k)
        .iter()
        .enumerate()
        .map(|(i, s)| vec![simplex_label(s), fmt_num(noisy[i]), fmt_num(est[i]), fmt_num(f0[i])]);
    let header = ["simplex", "noisy", "denoised", "truth"].map(String::from);
    let mut out = table(&header, rows);
    summary(&mut out, "error_noisy", fmt_num((&noisy - &f0).norm()));
    summary(&mut out, "error_denoised", fmt_num((&est - &f0).norm()));
    Ok(out)
}

fn smooth(complex: &Path, signal: &Path, mu: f64, steps: usize) -> Result<String, CliError> {
    let x = load_complex(complex)?;
    let (k, y) = load_signal(signal, &x)?;
    let l = x.hodge_laplacian(k)?;
    let out_sig = filters::smooth_iterative(&l, &y, mu, steps)?;
    let rows =
        x.simplices(k).iter().enumerate().map(|(i, s)| vec![simplex_label(s), fmt_num(y[i]), fmt_num(out_sig[i])]);
    let mut out = table(&["simplex", "input", "smoothed"].map(String::from), rows);
    summary(&mut out, "divergent_step", filters::is_divergent_step(&l, mu)?);
    Ok(out)
}

fn interpolate(args: &InterpolateArgs) -> Result<String, CliError> {
    let x = load_complex(&args.complex)?;
    let (k, labels) = io::parse_labels(&read(&args.labels)?, &x).map_err(|e| with_path(&args.labels, e))?;
    if k != args.order {
        return Err(CliError::usage(format!("labels have order {k} but --order is {}", args.order)));
    }
    let est = match k {
        0 => interpolation::interpolate_node_labels(&x, &labels)?,
        _ => interpolation::interpolate_edge_flow(&x, &labels, args.alpha, args.use_triangles)?,
    };
    let truth = match &args.truth {
        Some(p) => {
            let (tk, t) = load_signal(p, &x)?;
            if tk != k {
                return Err(CliError::usage(format!("truth has order {tk} but labels have order {k}")));
            }
            Some(t)
        }
        None => None,
    };
    let mut header = ["simplex", "labeled", "value"].map(String::from).to_vec();
    if truth.is_some() {
        header.push("truth".into());
    }
    let rows = x.simplices(k).iter().enumerate().map(|(i, s)| {
        let mut row = vec![simplex_label(s), u8::from(labels.is_labeled(i)).to_string(), fmt_num(est[i])];
        if let Some(t) = &truth {
            row.push(fmt_num(t[i]));
        }
        row
    });
    let mut out = table(&header, rows);
    if let Some(t) = &truth {
        summary(&mut out, "pearson", fmt_num(interpolation::pearson(est.as_slice(), t.as_slice())?));
        summary(&mut out, "error_norm", fmt_num((&est - t).norm()));
    }
    Ok(out)
}

fn dynamics_cmd(args: &DynamicsArgs) -> Result<String, CliError> {
    let x = load_complex(&args.complex)?;
    let k = args.order;
    if x.max_order().is_none_or(|m| k > m) {
        return Err(CliError::usage(format!("complex has no simplices of order {k}")));
    }
    let w0 = match args.init.strip_prefix("random:") {
        Some(seed) => {
            let seed: u64 = seed.parse().map_err(|_| CliError::usage(format!("bad seed in --init {:?}", args.init)))?;
            dynamics::random_initial(x.count(k), seed)
        }
        None => {
            let (sk, w) = load_signal(Path::new(&args.init), &x)?;
            if sk != k {
                return Err(CliError::usage(format!("initial state has order {sk} but --order is {k}")));
            }
            w
        }
    };
    let g = match args.nonlinearity {
        NonlinearityArg::Identity => Nonlinearity::Identity,
        NonlinearityArg::Tanh => Nonlinearity::Tanh,
    };
    let traj = match (args.nonlinearity, args.method) {
        (NonlinearityArg::Identity, MethodArg::Spectral) => {
            dynamics::simulate_hodge_flow(&x, k, &w0, args.dt, args.t_max, Method::ExactSpectral)?
        }
        (NonlinearityArg::Identity, MethodArg::Euler) => {
            dynamics::simulate_hodge_flow(&x, k, &w0, args.dt, args.t_max, Method::Euler)?
        }
        (_, MethodArg::Euler) => dynamics::simulate_nonlinear(&x, k, &w0, &g, args.dt, args.t_max)?,
        (_, MethodArg::Spectral) => {
            return Err(CliError::usage("the spectral method needs --nonlinearity identity"));
        }
    };
    let mut header = vec!["t".to_string()];
    header.extend(x.simplices(k).iter().map(simplex_label));
    header.push("energy".into());
    let every = args.every as usize;
    let last = traj.len() - 1;
    let mut rows = Vec::new();
    for (i, (t, w)) in traj.times.iter().zip(&traj.states).enumerate() {
        if i % every == 0 || i == last {
            let mut row = vec![fmt_num(*t)];
            row.extend(w.iter().map(|v| fmt_num(*v)));
            row.push(fmt_num(dynamics::nonlinear_energy(&x, k, w, &g)?));
            rows.push(row);
        }
    }
    let mut out = table(&header, rows);
    let harmonic = spectral::harmonic_projection(&x, k, &w0)?;
    summary(&mut out, "distance_to_harmonic", fmt_num((traj.final_state() - harmonic).norm()));
    if let Some(trials) = args.holes {
        let b = dynamics::detect_holes(&x, k, trials, 0, args.dt, args.t_max)?;
        summary(&mut out, "holes", b);
        summary(&mut out, "betti", spectral::betti(&x, k)?);
    }
    Ok(out)
}

fn feature_table(x: &SimplicialComplex, order: usize, y: &DMatrix<f64>) -> String {
    let mut header = vec!["simplex".to_string()];
    header.extend((0..y.ncols()).map(|j| format!("y{j}")));
    let rows = x.simplices(order).iter().enumerate().map(|(i, s)| {
        let mut row = vec![simplex_label(s)];
        row.extend((0..y.ncols()).map(|j| fmt_num(y[(i, j)])));
        row
    });
    table(&header, rows)
}

fn snn_cmd(action: &SnnAction) -> Result<String, CliError> {
    match action {
        SnnAction::Forward { model, complex, features } => {
            let x = load_complex(complex)?;
            let m = load_model(model, &x)?;
            let y0 = load_features(features, &x, m.order)?;
            let y = m.forward(&x, &y0)?;
            Ok(feature_table(&x, m.order, &y))
        }
        SnnAction::Train { model, complex, features, targets, lr, epochs, train_shift } => {
            let x = load_complex(complex)?;
            let m = load_model(model, &x)?;
            let y0 = load_features(features, &x, m.order)?;
            let t = load_features(targets, &x, m.order)?;
            let cfg =
                TrainConfig { lr: *lr, epochs: *epochs as usize, train_shift: *train_shift, halve_on_increase: true };
            let outcome = snn::train(&m, &x, &[(y0, t)], &cfg)?;
            let rows = outcome.losses.iter().enumerate().map(|(i, l)| vec![i.to_string(), fmt_num(*l)]);
            let mut out = table(&["epoch".into(), "loss".into()], rows);
            summary(&mut out, "final_lr", fmt_num(outcome.final_lr));
            Ok(out)
        }
        SnnAction::Equivariance { model, complex, features, flip } => {
            let x = load_complex(complex)?;
            let m = load_model(model, &x)?;
            let y0 = load_features(features, &x, m.order)?;
            let report = snn::check_equivariance(&m, &x, &y0, flip)?;
            let mut out = table(
                &["max_deviation".into(), "activation_odd".into()],
                [vec![fmt_num(report.max_deviation), report.activation_odd.to_string()]],
            );
            summary(&mut out, "flipped", flip.len());
            Ok(out)
        }
    }
}
