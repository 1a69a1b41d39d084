//! Seeded Monte-Carlo study of the estimators over a sweep of sample sizes.
//!
//! Each replication draws one sample of size `n_max` from its own ChaCha
//! stream (`seed = master_seed`, `stream = rep_id`), and every size `n` in
//! the sweep is evaluated on the first `n` observations of that sample.
//! Replications run on the rayon pool in fixed-size chunks and are folded
//! into the aggregates in replication order, so results do not depend on
//! the number of worker threads.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::baseline::{self, BaselineMethod};
use crate::dist::DistParams;
use crate::empirical::SortedSample;
use crate::error::{Error, Result};
use crate::format::sig17;
use crate::iapo;

/// Two-sided 0.95 normal quantile.
pub const Z_95: f64 = 1.96;

/// Replications evaluated in parallel before being folded in order.
const CHUNK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Estimator {
    Iapo,
    IapoNm,
    Hill,
    Pickands,
    Dedh,
}

impl Estimator {
    pub const ALL: [Estimator; 5] = [
        Estimator::Iapo,
        Estimator::IapoNm,
        Estimator::Hill,
        Estimator::Pickands,
        Estimator::Dedh,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Estimator::Iapo => "iapo",
            Estimator::IapoNm => "iapo-nm",
            Estimator::Hill => "hill",
            Estimator::Pickands => "pickands",
            Estimator::Dedh => "dedh",
        }
    }

    fn baseline(self) -> Option<BaselineMethod> {
        match self {
            Estimator::Hill => Some(BaselineMethod::Hill),
            Estimator::Pickands => Some(BaselineMethod::Pickands),
            Estimator::Dedh => Some(BaselineMethod::Dedh),
            Estimator::Iapo | Estimator::IapoNm => None,
        }
    }

    /// Targets reported for this estimator. Baselines only estimate the tail
    /// index, reported under [`Target::Product`].
    fn targets(self) -> &'static [Target] {
        match self.baseline() {
            Some(_) => &[Target::Product],
            None => &[Target::Alpha, Target::Lambda, Target::Product],
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Estimator {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Estimator::ALL
            .into_iter()
            .find(|e| e.label().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown estimator `{s}` (expected one of iapo, iapo-nm, hill, pickands, dedh)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    Alpha,
    Lambda,
    Product,
    FreqP1,
    FreqP2,
    FenceP1,
    FenceP2,
}

impl Target {
    pub fn label(self) -> &'static str {
        match self {
            Target::Alpha => "alpha",
            Target::Lambda => "lambda",
            Target::Product => "product",
            Target::FreqP1 => "freq_p1",
            Target::FreqP2 => "freq_p2",
            Target::FenceP1 => "fence_p1",
            Target::FenceP2 => "fence_p2",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Label used for the empirical fence and frequency series.
pub const EMPIRICAL: &str = "empirical";

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub params: DistParams,
    pub reps: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub n_step: usize,
    pub p1: f64,
    pub p2: f64,
    pub master_seed: u64,
    pub estimators: Vec<Estimator>,
    /// Top order statistics for the baselines; `floor(sqrt(n))` when unset.
    pub baseline_k: Option<usize>,
}

impl StudyConfig {
    /// 1000 replications, `n = 30..=500`, `p1 = 1/3`, `p2 = 1/5`, IAPO only.
    pub fn new(params: DistParams, master_seed: u64) -> Self {
        StudyConfig {
            params,
            reps: 1000,
            n_min: 30,
            n_max: 500,
            n_step: 1,
            p1: 1.0 / 3.0,
            p2: 0.2,
            master_seed,
            estimators: vec![Estimator::Iapo],
            baseline_k: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::param("reps", 0.0, "must be positive"));
        }
        if self.n_min < 30 {
            return Err(Error::param("n_min", self.n_min as f64, "must be at least 30"));
        }
        if self.n_max < self.n_min {
            return Err(Error::param("n_max", self.n_max as f64, "must be at least n_min"));
        }
        if self.n_step == 0 {
            return Err(Error::param("n_step", 0.0, "must be positive"));
        }
        for (name, p) in [("p1", self.p1), ("p2", self.p2)] {
            if !(p > 0.0 && p < 0.5) {
                return Err(Error::param(name, p, "must lie in (0, 0.5)"));
            }
        }
        if self.p1 == self.p2 {
            return Err(Error::param("p2", self.p2, "must differ from p1"));
        }
        if self.baseline_k == Some(0) {
            return Err(Error::param("k", 0.0, "must be positive"));
        }
        Ok(())
    }

    /// Sample sizes in the sweep, ascending.
    pub fn sizes(&self) -> Vec<usize> {
        (self.n_min..=self.n_max).step_by(self.n_step).collect()
    }

    fn series(&self) -> Vec<(&'static str, Target)> {
        let mut series = vec![
            (EMPIRICAL, Target::FreqP1),
            (EMPIRICAL, Target::FreqP2),
            (EMPIRICAL, Target::FenceP1),
            (EMPIRICAL, Target::FenceP2),
        ];
        for est in self.ordered_estimators() {
            series.extend(est.targets().iter().map(|&t| (est.label(), t)));
        }
        series
    }

    /// Requested estimators in canonical order, without duplicates.
    fn ordered_estimators(&self) -> Vec<Estimator> {
        Estimator::ALL
            .into_iter()
            .filter(|e| self.estimators.contains(e))
            .collect()
    }
}

/// Estimates from one replication at one sample size, one entry per series
/// (`None` marks a failed estimation).
#[derive(Debug, Clone, PartialEq)]
pub struct SizeRecord {
    pub n: usize,
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Replication {
    pub rep_id: usize,
    pub records: Vec<SizeRecord>,
}

impl Replication {
    /// Value of `(estimator label, target)` at size `n`, if it was requested.
    pub fn get(&self, cfg: &StudyConfig, n: usize, estimator: &str, target: Target) -> Option<Option<f64>> {
        let idx = cfg.series().iter().position(|&(e, t)| e == estimator && t == target)?;
        let rec = self.records.iter().find(|r| r.n == n)?;
        Some(rec.values[idx])
    }
}

/// Generator for replication `rep_id`.
pub fn replication_rng(master_seed: u64, rep_id: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(rep_id as u64);
    rng
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn evaluate(cfg: &StudyConfig, estimators: &[Estimator], s: &SortedSample, out: &mut Vec<Option<f64>>) {
    let n = s.len();
    for p in [cfg.p1, cfg.p2] {
        out.push(s.count_outside(p).ok().map(|c| c.freq_right));
    }
    for p in [cfg.p1, cfg.p2] {
        out.push(s.emp_right_fence(p).ok());
    }
    for &est in estimators {
        match est.baseline() {
            Some(method) => {
                let k = cfg.baseline_k.unwrap_or_else(|| baseline::default_k(n));
                let value = method
                    .estimate(s, k)
                    .ok()
                    .filter(|e| e.gamma_hat > 0.0)
                    .and_then(|e| finite(e.tail_index()));
                out.push(value);
            }
            None => {
                let fit = match est {
                    Estimator::Iapo => iapo::iapo_estimate(s, cfg.p1, cfg.p2, cfg.params.mu(), cfg.params.sigma()),
                    _ => iapo::iapo_nm_estimate(s, cfg.p1, cfg.p2),
                };
                match fit {
                    Ok(e) if e.alpha_hat.is_finite() && e.lambda_hat.is_finite() => {
                        out.extend([Some(e.alpha_hat), Some(e.lambda_hat), finite(e.product())]);
                    }
                    _ => out.extend([None, None, None]),
                }
            }
        }
    }
}

/// Runs one replication over the whole size sweep. Estimator failures are
/// recorded as `None`.
pub fn run_replication(cfg: &StudyConfig, rep_id: usize) -> Result<Replication> {
    cfg.validate()?;
    if rep_id >= cfg.reps {
        return Err(Error::param("rep_id", rep_id as f64, "must be below reps"));
    }
    Ok(replicate(cfg, &cfg.sizes(), &cfg.ordered_estimators(), rep_id))
}

fn replicate(cfg: &StudyConfig, sizes: &[usize], estimators: &[Estimator], rep_id: usize) -> Replication {
    let draws = cfg
        .params
        .draw(cfg.n_max, &mut replication_rng(cfg.master_seed, rep_id));
    let width = cfg.series().len();
    let mut sorted: Vec<f64> = Vec::with_capacity(cfg.n_max);
    let mut records = Vec::with_capacity(sizes.len());
    let mut next = sizes.iter().copied().peekable();
    for (i, &x) in draws.iter().enumerate() {
        let at = sorted.partition_point(|&v| v <= x);
        sorted.insert(at, x);
        if next.peek() == Some(&(i + 1)) {
            next.next();
            let s = SortedSample::from_sorted_unchecked(sorted.clone());
            let mut values = Vec::with_capacity(width);
            evaluate(cfg, estimators, &s, &mut values);
            records.push(SizeRecord { n: i + 1, values });
        }
    }
    Replication { rep_id, records }
}

/// Running mean/variance (Welford) plus squared error against a reference.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Summary {
    pub count: usize,
    pub failed: usize,
    mean: f64,
    m2: f64,
    sq_err: f64,
}

impl Summary {
    pub fn push(&mut self, value: Option<f64>, reference: f64) {
        let Some(x) = value else {
            self.failed += 1;
            return;
        };
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
        self.sq_err += (x - reference) * (x - reference);
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            f64::NAN
        } else {
            self.mean
        }
    }

    /// Sample standard deviation over `sqrt(count)`; zero for one value.
    pub fn std_err(&self) -> f64 {
        match self.count {
            0 => f64::NAN,
            1 => 0.0,
            c => (self.m2 / (c - 1) as f64).sqrt() / (c as f64).sqrt(),
        }
    }

    /// Root mean squared error against the reference passed to `push`.
    pub fn rmse(&self) -> f64 {
        if self.count == 0 {
            f64::NAN
        } else {
            (self.sq_err / self.count as f64).sqrt()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub n: usize,
    pub estimator: &'static str,
    pub target: Target,
    pub mean: f64,
    pub std_err: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub n_failed: usize,
}

impl StudyRow {
    fn from_summary(n: usize, estimator: &'static str, target: Target, s: &Summary) -> Self {
        let (mean, std_err) = (s.mean(), s.std_err());
        StudyRow {
            n,
            estimator,
            target,
            mean,
            std_err,
            ci_lo: mean - Z_95 * std_err,
            ci_hi: mean + Z_95 * std_err,
            n_failed: s.failed,
        }
    }
}

/// Aggregates indexed by `[size][series]`.
struct Aggregates {
    sizes: Vec<usize>,
    series: Vec<(&'static str, Target)>,
    cells: Vec<Vec<Summary>>,
}

fn aggregate(cfg: &StudyConfig) -> Result<Aggregates> {
    cfg.validate()?;
    let sizes = cfg.sizes();
    let series = cfg.series();
    let estimators = cfg.ordered_estimators();
    let truth = cfg.params.tail_index();
    let mut cells = vec![vec![Summary::default(); series.len()]; sizes.len()];

    for start in (0..cfg.reps).step_by(CHUNK) {
        let end = (start + CHUNK).min(cfg.reps);
        let chunk: Vec<Replication> = (start..end)
            .into_par_iter()
            .map(|rep_id| replicate(cfg, &sizes, &estimators, rep_id))
            .collect();
        for rep in &chunk {
            for (row, rec) in cells.iter_mut().zip(&rep.records) {
                for (cell, &value) in row.iter_mut().zip(&rec.values) {
                    cell.push(value, truth);
                }
            }
        }
    }
    Ok(Aggregates { sizes, series, cells })
}

/// Means, standard errors and 0.95 intervals per `(n, estimator, target)`,
/// ordered by ascending `n` then by a fixed series order.
pub fn run_study(cfg: &StudyConfig) -> Result<Vec<StudyRow>> {
    let agg = aggregate(cfg)?;
    let mut rows = Vec::with_capacity(agg.sizes.len() * agg.series.len());
    for (&n, row) in agg.sizes.iter().zip(&agg.cells) {
        for (&(estimator, target), cell) in agg.series.iter().zip(row) {
            if cell.count == 0 {
                return Err(Error::AllReplicationsFailed {
                    estimator: estimator.to_string(),
                    n,
                });
            }
            rows.push(StudyRow::from_summary(n, estimator, target, cell));
        }
    }
    Ok(rows)
}

/// Runs `f` on a dedicated pool with `workers` threads, or on the global
/// pool when `workers` is `None`.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match workers {
        None => f(),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .expect("thread pool construction")
            .install(f),
    }
}

pub const STUDY_CSV_HEADER: &str = "n,estimator,target,mean,std_err,ci_lo,ci_hi,n_failed";

pub fn write_study_csv<W: Write>(rows: &[StudyRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{STUDY_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.n,
            r.estimator,
            r.target,
            sig17(r.mean),
            sig17(r.std_err),
            sig17(r.ci_lo),
            sig17(r.ci_hi),
            r.n_failed
        )?;
    }
    Ok(())
}

/// RMSE of each estimator's tail-index estimate against `alpha * lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub estimators: Vec<Estimator>,
    /// `(n, rmse per estimator)`; NaN where every replication failed.
    pub rows: Vec<(usize, Vec<f64>)>,
}

impl ComparisonTable {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let header: Vec<&str> = self.estimators.iter().map(|e| e.label()).collect();
        writeln!(out, "n,{}", header.join(","))?;
        for (n, rmse) in &self.rows {
            let cols: Vec<String> = rmse.iter().map(|&x| sig17(x)).collect();
            writeln!(out, "{n},{}", cols.join(","))?;
        }
        Ok(())
    }
}

/// Side-by-side RMSE of the tail index for every requested estimator.
pub fn compare_baselines(cfg: &StudyConfig) -> Result<ComparisonTable> {
    let agg = aggregate(cfg)?;
    let estimators = cfg.ordered_estimators();
    let columns: Vec<usize> = estimators
        .iter()
        .map(|e| {
            agg.series
                .iter()
                .position(|&(label, t)| label == e.label() && t == Target::Product)
                .expect("every estimator reports a product series")
        })
        .collect();
    let rows = agg
        .sizes
        .iter()
        .zip(&agg.cells)
        .map(|(&n, row)| (n, columns.iter().map(|&c| row[c].rmse()).collect()))
        .collect();
    Ok(ComparisonTable { estimators, rows })
}
