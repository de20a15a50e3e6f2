//! `phonon`: steady-state solves, labelled sweeps, Levenberg–Marquardt
//! training and prediction for the phonon-blockade detector.

mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use phonon_core::c64;
use phonon_core::dataset::{
    figure_preset, generate, read_csv, split, write_csv, Dataset, GenerateOptions, Interval,
    SampleMode, SweepRanges, DEFAULT_FRACTIONS, DEFAULT_SAMPLES, PRESET_NAMES,
};
use phonon_core::effective::{effective_params, LabParams};
use phonon_core::mlp::{self, train_lm, write_history_csv, MLPModel, TrainOptions};
use phonon_core::quantum::{
    converge_dims, solve_point, ConvergenceOptions, EffectiveParams, HilbertDims,
};

const EXIT_DOMAIN: u8 = 2;
const EXIT_USAGE: u8 = 64;
/// Fidelity band used in eval summaries, in log10 units.
const FIDELITY_BAND: f64 = 0.15;

#[derive(Parser, Debug)]
#[command(
    name = "phonon",
    version,
    about = "Phonon-blockade steady states and neural-network detector"
)]
#[command(args_override_self = true)]
struct Cli {
    /// TOML file with a table per subcommand; keys are long flag names.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one parameter point and print the observables.
    #[command(allow_negative_numbers = true)]
    Solve(SolveArgs),
    /// Sample, label and write a sweep as CSV.
    #[command(allow_negative_numbers = true)]
    Sweep(SweepArgs),
    /// Train the network on a labelled CSV.
    Train(TrainArgs),
    /// Report MSE of a model on a CSV and write predicted-vs-real rows.
    Eval(EvalArgs),
    /// Predict log10 g2 from optical features.
    #[command(allow_negative_numbers = true)]
    Predict(PredictArgs),
}

fn parse_dims(s: &str) -> Result<HilbertDims, String> {
    let (a, b) = s
        .split_once(['x', ','])
        .ok_or_else(|| format!("expected NCAVxNMECH, got `{s}`"))?;
    let n_cav = a
        .trim()
        .parse()
        .map_err(|_| format!("bad cavity size `{a}`"))?;
    let n_mech = b
        .trim()
        .parse()
        .map_err(|_| format!("bad mechanical size `{b}`"))?;
    HilbertDims::new(n_cav, n_mech).map_err(|e| e.to_string())
}

fn parse_interval(s: &str) -> Result<Interval, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("bad number `{t}`"))
    };
    let iv = match s.split_once(':') {
        Some((lo, hi)) => Interval::new(num(lo)?, num(hi)?),
        None => Interval::fixed(num(s)?),
    };
    if !(iv.lo <= iv.hi) {
        return Err(format!("empty interval `{s}`"));
    }
    Ok(iv)
}

fn parse_mode(s: &str) -> Result<SampleMode, String> {
    s.parse()
}

fn parse_preset(s: &str) -> Result<String, String> {
    if PRESET_NAMES.contains(&s) {
        Ok(s.to_string())
    } else {
        Err(format!(
            "unknown figure `{s}` (one of {})",
            PRESET_NAMES.join(", ")
        ))
    }
}

#[derive(Args, Debug)]
struct PointArgs {
    /// Common detuning Delta_a = Delta_b (units of kappa).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    delta: f64,
    #[arg(long, allow_hyphen_values = true)]
    delta_a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta_b: Option<f64>,
    /// Real part of the effective coupling J.
    #[arg(long = "J", default_value_t = 0.2, allow_hyphen_values = true)]
    j: f64,
    #[arg(long = "J-im", default_value_t = 0.0, allow_hyphen_values = true)]
    j_im: f64,
    #[arg(long, default_value_t = EffectiveParams::CANONICAL_EPS_A, allow_hyphen_values = true)]
    eps_a: f64,
    #[arg(long, default_value_t = 0.002, allow_hyphen_values = true)]
    eps_b: f64,
    #[arg(long, default_value_t = EffectiveParams::CANONICAL_GAMMA, allow_hyphen_values = true)]
    gamma: f64,
    #[arg(long, default_value_t = EffectiveParams::CANONICAL_N_TH, allow_hyphen_values = true)]
    n_th: f64,
}

impl PointArgs {
    fn params(&self) -> EffectiveParams {
        EffectiveParams {
            delta_a: self.delta_a.unwrap_or(self.delta),
            delta_b: self.delta_b.unwrap_or(self.delta),
            coupling: c64::new(self.j, self.j_im),
            eps_a: self.eps_a,
            eps_b: self.eps_b,
            kappa: 1.0,
            gamma: self.gamma,
            n_th: self.n_th,
        }
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    point: PointArgs,
    /// Fock truncation as NCAVxNMECH.
    #[arg(long, value_parser = parse_dims, default_value = "4x8")]
    dims: HilbertDims,
    /// Laboratory parameter file (key = value, SI units); replaces the point flags.
    #[arg(long, value_name = "FILE")]
    lab: Option<PathBuf>,
    /// Grow the truncation from --dims until g2 is converged.
    #[arg(long)]
    converge: bool,
    #[arg(long, default_value_t = 1e-6)]
    rel_tol: f64,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    out: PathBuf,
    /// Number of points (preset default with --fig, else 20000).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Regular grid instead of uniform random sampling.
    #[arg(long)]
    grid: bool,
    #[arg(long, value_parser = parse_mode, conflicts_with = "grid")]
    mode: Option<SampleMode>,
    /// Figure preset.
    #[arg(long, value_parser = parse_preset)]
    fig: Option<String>,
    /// Worker threads (0 = all cores).
    #[arg(long, env = "PHONON_JOBS", default_value_t = 0)]
    jobs: usize,
    #[arg(long, value_parser = parse_dims, default_value = "4x8")]
    dims: HilbertDims,
    /// Detuning as LO:HI or a single value.
    #[arg(long, value_parser = parse_interval, allow_hyphen_values = true)]
    delta: Option<Interval>,
    #[arg(long = "J", value_parser = parse_interval, allow_hyphen_values = true)]
    j: Option<Interval>,
    #[arg(long, value_parser = parse_interval)]
    eps_a: Option<Interval>,
    #[arg(long, value_parser = parse_interval)]
    eps_b: Option<Interval>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    n_th: Option<f64>,
}

#[derive(Args, Debug)]
struct TrainArgs {
    /// Labelled CSV; split into train/test/val.
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    model_out: PathBuf,
    /// Defaults to MODEL_OUT with a `.history.csv` extension.
    #[arg(long)]
    history_out: Option<PathBuf>,
    /// Also write train.csv, test.csv and val.csv into this directory.
    #[arg(long, value_name = "DIR")]
    save_split: Option<PathBuf>,
    #[arg(long, default_value_t = mlp::DEFAULT_HIDDEN)]
    hidden: usize,
    /// Weight initialization seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    split_seed: u64,
    #[arg(long, default_value_t = DEFAULT_FRACTIONS.0)]
    train_fraction: f64,
    #[arg(long, default_value_t = DEFAULT_FRACTIONS.1)]
    test_fraction: f64,
    #[arg(long, default_value_t = DEFAULT_FRACTIONS.2)]
    val_fraction: f64,
    #[arg(long, default_value_t = 1000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-3)]
    lambda0: f64,
    #[arg(long, default_value_t = 10.0)]
    lambda_up: f64,
    #[arg(long, default_value_t = 0.1)]
    lambda_down: f64,
    #[arg(long, default_value_t = 6)]
    patience: usize,
    #[arg(long, default_value_t = 1e-7)]
    grad_tol: f64,
    #[arg(long, default_value_t = 0.0)]
    mse_tol: f64,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Predicted-vs-real CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    p: f64,
    #[arg(long, allow_hyphen_values = true)]
    q: f64,
    #[arg(long, allow_hyphen_values = true)]
    n_c: f64,
}

type CmdResult = Result<(), String>;

fn cmd_solve(args: &SolveArgs) -> CmdResult {
    let params = match &args.lab {
        Some(path) => {
            let lab = LabParams::from_config_file(path).map_err(|e| e.to_string())?;
            let (params, report) = effective_params(&lab).map_err(|e| e.to_string())?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            params
        }
        None => args.point.params(),
    };
    let dims = if args.converge {
        let opts = ConvergenceOptions {
            rel_tol: args.rel_tol,
            ..Default::default()
        };
        converge_dims(&params, args.dims, opts).map_err(|e| e.to_string())?
    } else {
        args.dims
    };
    let (_, obs) = solve_point(&params, dims).map_err(|e| e.to_string())?;
    println!("delta_a = {:e}", params.delta_a);
    println!("delta_b = {:e}", params.delta_b);
    println!("J = {:e}", params.coupling.re);
    println!("J_im = {:e}", params.coupling.im);
    println!("eps_a = {:e}", params.eps_a);
    println!("eps_b = {:e}", params.eps_b);
    println!("dims = {}x{}", dims.n_cav, dims.n_mech);
    println!("p = {:e}", obs.p);
    println!("q = {:e}", obs.q);
    println!("n_c = {:e}", obs.n_c);
    println!("n_b = {:e}", obs.n_b);
    println!("g2b = {:e}", obs.g2b);
    println!("log10_g2b = {:e}", obs.log10_g2b());
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> CmdResult {
    let (mut ranges, mut mode, mut n) = match &args.fig {
        Some(name) => {
            let p = figure_preset(name).expect("validated by the parser");
            (p.ranges, p.mode, p.n)
        }
        None => (
            SweepRanges::default(),
            SampleMode::UniformRandom,
            DEFAULT_SAMPLES,
        ),
    };
    if args.grid {
        mode = SampleMode::Grid;
    }
    if let Some(m) = args.mode {
        mode = m;
    }
    n = args.n.unwrap_or(n);
    ranges.delta = args.delta.unwrap_or(ranges.delta);
    ranges.coupling = args.j.unwrap_or(ranges.coupling);
    ranges.eps_a = args.eps_a.unwrap_or(ranges.eps_a);
    ranges.eps_b = args.eps_b.unwrap_or(ranges.eps_b);
    ranges.gamma = args.gamma.unwrap_or(ranges.gamma);
    ranges.n_th = args.n_th.unwrap_or(ranges.n_th);
    ranges.validate().map_err(|e| e.to_string())?;

    let opts = GenerateOptions {
        n,
        seed: args.seed,
        mode,
        dims: args.dims,
        jobs: args.jobs,
    };
    let ds = generate(&ranges, &opts).map_err(|e| e.to_string())?;
    write_csv(&ds, &args.out).map_err(|e| e.to_string())?;
    if !ds.rejects.is_empty() {
        let path = args.out.with_extension("rejects.csv");
        let mut text = String::from("index,delta,J_re,eps_a,eps_b,reason\n");
        for r in &ds.rejects {
            text.push_str(&format!(
                "{},{:e},{:e},{:e},{:e},\"{}\"\n",
                r.index,
                r.params.delta_a,
                r.params.coupling.re,
                r.params.eps_a,
                r.params.eps_b,
                r.reason.replace('"', "'")
            ));
        }
        fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))?;
        eprintln!(
            "warning: {} points rejected, see {}",
            ds.rejects.len(),
            path.display()
        );
    }
    if !ds.flagged.is_empty() {
        eprintln!(
            "warning: {} samples have n_c > 0.1 (outside the weak-drive regime)",
            ds.flagged.len()
        );
    }
    println!("wrote {} samples to {}", ds.len(), args.out.display());
    Ok(())
}

fn cmd_train(args: &TrainArgs) -> CmdResult {
    let ds = read_csv(&args.data).map_err(|e| e.to_string())?;
    if ds.is_empty() {
        return Err(format!("{}: no samples", args.data.display()));
    }
    let fractions = (args.train_fraction, args.test_fraction, args.val_fraction);
    let parts = split(&ds, fractions, args.split_seed).map_err(|e| e.to_string())?;
    if let Some(dir) = &args.save_split {
        fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
        for (name, part) in [
            ("train", &parts.train),
            ("test", &parts.test),
            ("val", &parts.val),
        ] {
            let part = Dataset {
                provenance: None,
                ..part.clone()
            };
            write_csv(&part, &dir.join(format!("{name}.csv"))).map_err(|e| e.to_string())?;
        }
    }
    let opts = TrainOptions {
        lambda0: args.lambda0,
        lambda_up: args.lambda_up,
        lambda_down: args.lambda_down,
        max_iters: args.max_iters,
        val_patience: args.patience,
        grad_tol: args.grad_tol,
        mse_tol: args.mse_tol,
        seed: args.seed,
        ..TrainOptions::default()
    };
    let model = MLPModel::init(args.hidden, args.seed).map_err(|e| e.to_string())?;
    let (model, history) = train_lm(&model, &parts.train, &parts.val, &parts.test, &opts)
        .map_err(|e| e.to_string())?;
    mlp::save(&model, &args.model_out).map_err(|e| e.to_string())?;
    let history_path = args
        .history_out
        .clone()
        .unwrap_or_else(|| args.model_out.with_extension("history.csv"));
    write_history_csv(&history, &history_path).map_err(|e| e.to_string())?;

    let best = history
        .records
        .iter()
        .find(|r| r.iteration == history.best_iteration)
        .expect("best iteration is recorded");
    println!(
        "samples = {} train / {} test / {} val",
        parts.train.len(),
        parts.test.len(),
        parts.val.len()
    );
    println!(
        "iterations = {}",
        history.records.last().map_or(0, |r| r.iteration)
    );
    println!("stop = {}", history.stop_reason);
    println!("best_iteration = {}", history.best_iteration);
    println!("train_mse = {:e}", best.train_mse);
    println!("test_mse = {:e}", best.test_mse);
    println!("val_mse = {:e}", best.val_mse);
    println!("(MSE in raw log10 g2 units)");
    println!("model = {}", args.model_out.display());
    println!("history = {}", history_path.display());
    Ok(())
}

fn cmd_eval(args: &EvalArgs) -> CmdResult {
    let model = mlp::load(&args.model).map_err(|e| e.to_string())?;
    let ds = read_csv(&args.data).map_err(|e| e.to_string())?;
    let mse = mlp::mse(&model, &ds).map_err(|e| format!("{}: {e}", args.data.display()))?;
    let preds = model.predict(&ds.inputs());
    let within = ds
        .samples
        .iter()
        .zip(&preds)
        .filter(|(s, y)| (*y - s.y).abs() <= FIDELITY_BAND)
        .count();
    if let Some(out) = &args.out {
        let file = fs::File::create(out).map_err(|e| format!("{}: {e}", out.display()))?;
        let mut w = std::io::BufWriter::new(file);
        let mut emit = || -> std::io::Result<()> {
            writeln!(
                w,
                "delta,J_re,eps_a,eps_b,p,q,n_c,log10_g2,log10_g2_pred,abs_err"
            )?;
            for (s, y) in ds.samples.iter().zip(&preds) {
                writeln!(
                    w,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    s.params.delta_a,
                    s.params.coupling.re,
                    s.params.eps_a,
                    s.params.eps_b,
                    s.x.p,
                    s.x.q,
                    s.x.n_c,
                    s.y,
                    y,
                    (y - s.y).abs()
                )?;
            }
            w.flush()
        };
        emit().map_err(|e| format!("{}: {e}", out.display()))?;
    }
    println!("samples = {}", ds.len());
    println!("mse = {mse:e}");
    println!("(MSE in raw log10 g2 units)");
    println!(
        "within_{FIDELITY_BAND} = {:.6}",
        within as f64 / ds.len() as f64
    );
    Ok(())
}

fn cmd_predict(args: &PredictArgs) -> CmdResult {
    let model = mlp::load(&args.model).map_err(|e| e.to_string())?;
    let x = [args.p, args.q, args.n_c];
    if x.iter().any(|v| !v.is_finite()) {
        return Err("features must be finite".into());
    }
    const NAMES: [&str; 3] = ["p", "q", "n_c"];
    for (i, v) in model.scaler.out_of_range(&x) {
        eprintln!(
            "warning: {} = {v:e} lies outside the training range [{:e}, {:e}]; extrapolating",
            NAMES[i], model.scaler.x_min[i], model.scaler.x_max[i]
        );
    }
    println!("log10_g2b = {:e}", model.forward(&x));
    Ok(())
}

/// Splices `--config` entries in front of the user's flags for the chosen
/// subcommand.
fn expand_args(raw: Vec<String>) -> Result<Vec<String>, String> {
    let mut config: Option<PathBuf> = None;
    let mut rest = Vec::with_capacity(raw.len());
    let mut iter = raw.into_iter();
    if let Some(prog) = iter.next() {
        rest.push(prog);
    }
    while let Some(arg) = iter.next() {
        if arg == "--config" {
            config = Some(iter.next().ok_or("--config needs a file")?.into());
        } else if let Some(v) = arg.strip_prefix("--config=") {
            config = Some(v.into());
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = config else { return Ok(rest) };
    let Some(pos) = rest
        .iter()
        .skip(1)
        .position(|a| !a.starts_with('-'))
        .map(|p| p + 1)
    else {
        return Ok(rest);
    };
    let extra = config::config_args(Path::new(&path), &rest[pos])?;
    rest.splice(pos + 1..pos + 1, extra);
    Ok(rest)
}

fn main() -> ExitCode {
    let args = match expand_args(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Train(a) => cmd_train(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Predict(a) => cmd_predict(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_DOMAIN)
        }
    }
}
