//! `tailfence`: sampling, fence theory, estimation and Monte-Carlo studies
//! for the Exponentiated-Fréchet family.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage or validation error,
//! 3 estimator not applicable, 4 non-convergence.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tailfence_core::format::sig17;
use tailfence_core::{iapo, sim, theory, DistParams, Error, Estimator, SortedSample, StudyConfig};

#[derive(Parser, Debug)]
#[command(
    name = "tailfence",
    version,
    about = "Asymmetric p-fences and tail estimation for the Exponentiated-Fréchet family"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw a sample and write one observation per line.
    Sample(SampleArgs),
    /// Print theoretical fences and outside probabilities.
    Theory(TheoryArgs),
    /// Estimate (alpha, lambda) from a sample file.
    Estimate(EstimateArgs),
    /// Run the Monte-Carlo study and write per-size aggregates.
    Simulate(StudyArgs),
    /// Tabulate the tail-index RMSE of each estimator per sample size.
    Compare(StudyArgs),
}

#[derive(Args, Debug)]
struct ParamArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    lambda: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    mu: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    sigma: f64,
}

impl ParamArgs {
    fn params(&self) -> Result<DistParams, Error> {
        DistParams::new(self.alpha, self.lambda, self.mu, self.sigma)
    }
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long)]
    n: usize,
    #[arg(long, env = "TAILFENCE_SEED")]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct TheoryArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Fence level in (0, 0.5]; repeatable.
    #[arg(long = "p", required = true)]
    p: Vec<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MethodArg {
    Iapo,
    IapoNm,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    /// Sample file: one number per line, `#` comments and blank lines ignored.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum)]
    method: MethodArg,
    #[arg(long)]
    p1: f64,
    #[arg(long)]
    p2: f64,
    /// Location assumed by IAPO when standardizing the fences.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    mu: f64,
    /// Scale assumed by IAPO when standardizing the fences.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    sigma: f64,
    /// Fit (mu, sigma) by matching the empirical quantiles at `q_lo,q_hi`
    /// (0.25,0.5 when given without a value).
    #[arg(long, value_name = "Q_LO,Q_HI")]
    match_quantiles: Option<Option<Anchors>>,
}

/// Quantile levels `0 < q_lo < q_hi < 1` for location/scale matching.
#[derive(Clone, Copy, Debug)]
struct Anchors(f64, f64);

impl std::str::FromStr for Anchors {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parsed = s
            .split_once(',')
            .and_then(|(lo, hi)| Some((lo.trim().parse::<f64>().ok()?, hi.trim().parse::<f64>().ok()?)));
        match parsed {
            Some((lo, hi)) if lo > 0.0 && lo < hi && hi < 1.0 => Ok(Anchors(lo, hi)),
            _ => Err(format!("expected q_lo,q_hi with 0 < q_lo < q_hi < 1, got `{s}`")),
        }
    }
}

#[derive(Args, Debug)]
struct StudyArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    #[arg(long, default_value_t = 30)]
    n_min: usize,
    #[arg(long, default_value_t = 500)]
    n_max: usize,
    #[arg(long, default_value_t = 1)]
    n_step: usize,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    p1: f64,
    #[arg(long, default_value_t = 0.2)]
    p2: f64,
    #[arg(long, env = "TAILFENCE_SEED")]
    seed: u64,
    /// Comma-separated subset of iapo, iapo-nm, hill, pickands, dedh.
    #[arg(long, value_delimiter = ',')]
    estimators: Option<Vec<Estimator>>,
    /// Top order statistics for the baselines; floor(sqrt(n)) when omitted.
    #[arg(long)]
    k: Option<usize>,
    /// Worker threads; all available cores when omitted.
    #[arg(long)]
    workers: Option<usize>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl StudyArgs {
    fn config(&self, default_estimators: &[Estimator]) -> Result<StudyConfig, Error> {
        let cfg = StudyConfig {
            params: self.params.params()?,
            reps: self.reps,
            n_min: self.n_min,
            n_max: self.n_max,
            n_step: self.n_step,
            p1: self.p1,
            p2: self.p2,
            master_seed: self.seed,
            estimators: self.estimators.clone().unwrap_or_else(|| default_estimators.to_vec()),
            baseline_k: self.k,
        };
        cfg.validate()?;
        if cfg.estimators.is_empty() {
            return Err(Error::param("estimators", 0.0, "at least one estimator is required"));
        }
        if self.workers == Some(0) {
            return Err(Error::param("workers", 0.0, "must be positive"));
        }
        Ok(cfg)
    }
}

enum Failure {
    Core(Error),
    Io(io::Error, String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn io(context: impl Into<String>) -> impl FnOnce(io::Error) -> Failure {
        let context = context.into();
        move |e| Failure::Io(e, context)
    }

    fn exit_code(&self) -> u8 {
        match self {
            Failure::Io(..) => 1,
            Failure::Core(e) => match e {
                Error::InvalidParameter { .. }
                | Error::SampleTooSmall { .. }
                | Error::NonFiniteObservation { .. }
                | Error::Parse { .. } => 2,
                Error::NotApplicable(_)
                | Error::Degenerate(_)
                | Error::DegenerateThreshold
                | Error::AllReplicationsFailed { .. } => 3,
                Error::NoBracket | Error::NonConvergence { .. } => 4,
            },
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io(e, context) => write!(f, "{context}: {e}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Sample(args) => cmd_sample(&args),
        Command::Theory(args) => cmd_theory(&args),
        Command::Estimate(args) => cmd_estimate(&args),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Compare(args) => cmd_compare(&args),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(Failure::io(format!("cannot create {}", path.display())))
}

/// Writes to `path`, or to standard output when `path` is `None`.
fn with_output(path: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<(), Failure> {
    let context = path.map_or_else(|| "standard output".to_string(), |p| p.display().to_string());
    let result = match path {
        Some(p) => {
            let mut out = create(p)?;
            write(&mut out).and_then(|()| out.flush())
        }
        None => {
            let mut out = io::stdout().lock();
            write(&mut out).and_then(|()| out.flush())
        }
    };
    result.map_err(Failure::io(format!("cannot write {context}")))
}

fn cmd_sample(args: &SampleArgs) -> Result<(), Failure> {
    let params = args.params.params()?;
    if args.n == 0 {
        return Err(Error::param("n", 0.0, "must be positive").into());
    }
    let draws = params.draw(args.n, &mut ChaCha8Rng::seed_from_u64(args.seed));
    with_output(Some(&args.out), |out| {
        for x in &draws {
            writeln!(out, "{}", sig17(*x))?;
        }
        Ok(())
    })
}

fn cmd_theory(args: &TheoryArgs) -> Result<(), Failure> {
    let params = args.params.params()?;
    for &p in &args.p {
        if !(p > 0.0 && p <= 0.5) {
            return Err(Error::param("p", p, "must lie in (0, 0.5]").into());
        }
    }
    let p0 = theory::p0_threshold(&params)?;
    let mut rows = Vec::with_capacity(args.p.len());
    for &p in &args.p {
        let fences = theory::theoretical_fences(&params, p)?;
        let p_left = theory::prob_left_outside(&params, p)?.value();
        let p_right = theory::prob_right_outside(&params, p)?.value();
        rows.push([p, fences.left_fence, fences.right_fence, p_left, p_right, p0]);
    }
    with_output(None, |out| {
        writeln!(out, "p,left_fence,right_fence,p_left,p_right,p0")?;
        for row in &rows {
            let cols: Vec<String> = row.iter().map(|&x| sig17(x)).collect();
            writeln!(out, "{}", cols.join(","))?;
        }
        Ok(())
    })
}

fn cmd_estimate(args: &EstimateArgs) -> Result<(), Failure> {
    for (name, p) in [("p1", args.p1), ("p2", args.p2)] {
        if !(p > 0.0 && p < 0.5) {
            return Err(Error::param(name, p, "must lie in (0, 0.5)").into());
        }
    }
    if args.p1 == args.p2 {
        return Err(Error::param("p2", args.p2, "must differ from p1").into());
    }
    if !(args.sigma > 0.0 && args.sigma.is_finite()) || !args.mu.is_finite() {
        return Err(Error::param("sigma", args.sigma, "need finite mu and sigma > 0").into());
    }
    let anchors = args
        .match_quantiles
        .map(|a| a.map_or(iapo::DEFAULT_MATCH_LEVELS, |Anchors(lo, hi)| (lo, hi)));

    let file = File::open(&args.input).map_err(Failure::io(format!("cannot open {}", args.input.display())))?;
    let sample = SortedSample::from_reader(BufReader::new(file))
        .map_err(Failure::io(format!("cannot read {}", args.input.display())))??;

    let mut est = match args.method {
        MethodArg::Iapo => iapo::iapo_estimate(&sample, args.p1, args.p2, args.mu, args.sigma)?,
        MethodArg::IapoNm => iapo::iapo_nm_estimate(&sample, args.p1, args.p2)?,
    };
    if let Some((lo, hi)) = anchors {
        est = est.with_location_scale(&sample, lo, hi)?;
    }
    let opt = |x: Option<f64>| x.map(sig17).unwrap_or_default();
    with_output(None, |out| {
        writeln!(
            out,
            "method,alpha_hat,lambda_hat,product,mu_hat,sigma_hat,residual,iterations"
        )?;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            est.method.label(),
            sig17(est.alpha_hat),
            sig17(est.lambda_hat),
            sig17(est.product()),
            opt(est.mu_hat),
            opt(est.sigma_hat),
            sig17(est.residual),
            est.iterations
        )
    })
}

fn cmd_simulate(args: &StudyArgs) -> Result<(), Failure> {
    let cfg = args.config(&[Estimator::Iapo, Estimator::IapoNm])?;
    let rows = sim::with_workers(args.workers, || sim::run_study(&cfg))?;
    with_output(args.out.as_deref(), |out| sim::write_study_csv(&rows, out))
}

fn cmd_compare(args: &StudyArgs) -> Result<(), Failure> {
    let cfg = args.config(&Estimator::ALL)?;
    let table = sim::with_workers(args.workers, || sim::compare_baselines(&cfg))?;
    with_output(args.out.as_deref(), |out| table.write_csv(out))
}
