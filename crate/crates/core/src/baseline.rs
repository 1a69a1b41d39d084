//! Classical nonparametric estimators of the extreme-value index `gamma`
//! (tail index `1 / gamma`), computed from the top `k` order statistics.

use std::fmt;

use crate::empirical::SortedSample;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaselineMethod {
    Hill,
    Pickands,
    Dedh,
}

impl BaselineMethod {
    pub fn label(self) -> &'static str {
        match self {
            BaselineMethod::Hill => "hill",
            BaselineMethod::Pickands => "pickands",
            BaselineMethod::Dedh => "dedh",
        }
    }

    pub fn estimate(self, s: &SortedSample, k: usize) -> Result<TailIndexEstimate> {
        match self {
            BaselineMethod::Hill => hill(s, k),
            BaselineMethod::Pickands => pickands(s, k),
            BaselineMethod::Dedh => dedh_moment(s, k),
        }
    }
}

impl fmt::Display for BaselineMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaselineMethod::Hill => "Hill",
            BaselineMethod::Pickands => "Pickands",
            BaselineMethod::Dedh => "DEdH",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailIndexEstimate {
    pub gamma_hat: f64,
    pub k: usize,
    pub method: BaselineMethod,
}

impl TailIndexEstimate {
    /// `1 / gamma_hat`; infinite or negative when `gamma_hat <= 0`.
    pub fn tail_index(&self) -> f64 {
        1.0 / self.gamma_hat
    }
}

/// `floor(sqrt(n))`, at least 1.
pub fn default_k(n: usize) -> usize {
    ((n as f64).sqrt().floor() as usize).max(1)
}

fn check_k(s: &SortedSample, k: usize) -> Result<()> {
    if k == 0 || k >= s.len() {
        return Err(Error::param("k", k as f64, "need 1 <= k <= n - 1"));
    }
    Ok(())
}

/// First two moments of `log X_{n-i:n} - log X_{n-k:n}`, `i = 0..k-1`.
fn log_excess_moments(s: &SortedSample, k: usize) -> Result<(f64, f64)> {
    check_k(s, k)?;
    let n = s.len();
    let threshold = s.order_stat(n - k);
    if !(threshold > 0.0) {
        return Err(Error::Degenerate(format!(
            "order statistic X_(n-k) = {threshold} must be positive"
        )));
    }
    let log_threshold = threshold.ln();
    let (m1, m2) = s.values()[n - k..]
        .iter()
        .map(|&x| x.ln() - log_threshold)
        .fold((0.0, 0.0), |(a, b), d| (a + d, b + d * d));
    Ok((m1 / k as f64, m2 / k as f64))
}

/// Hill: mean log-excess over `X_{n-k:n}`.
pub fn hill(s: &SortedSample, k: usize) -> Result<TailIndexEstimate> {
    let (m1, _) = log_excess_moments(s, k)?;
    Ok(TailIndexEstimate {
        gamma_hat: m1,
        k,
        method: BaselineMethod::Hill,
    })
}

/// Pickands: `log2[(X_{n-k+1} - X_{n-2k+1}) / (X_{n-2k+1} - X_{n-4k+1})]`.
pub fn pickands(s: &SortedSample, k: usize) -> Result<TailIndexEstimate> {
    let n = s.len();
    if k == 0 || 4 * k > n {
        return Err(Error::param("k", k as f64, "need 1 <= k and 4k <= n"));
    }
    let top = s.order_stat(n - k + 1);
    let mid = s.order_stat(n - 2 * k + 1);
    let low = s.order_stat(n - 4 * k + 1);
    let (num, den) = (top - mid, mid - low);
    if den == 0.0 || num == 0.0 {
        return Err(Error::Degenerate("tied order statistics in the Pickands ratio".into()));
    }
    Ok(TailIndexEstimate {
        gamma_hat: (num / den).log2(),
        k,
        method: BaselineMethod::Pickands,
    })
}

/// Dekkers–Einmahl–de Haan moment estimator
/// `M1 + 1 - 1 / (2 (1 - M1^2 / M2))`.
pub fn dedh_moment(s: &SortedSample, k: usize) -> Result<TailIndexEstimate> {
    let (m1, m2) = log_excess_moments(s, k)?;
    // M2 = M1^2 up to rounding means all log-excesses coincide
    if !((m2 - m1 * m1).abs() > 1e-12 * m2) {
        return Err(Error::Degenerate("second log-moment equals the squared first".into()));
    }
    Ok(TailIndexEstimate {
        gamma_hat: m1 + 1.0 - 0.5 / (1.0 - m1 * m1 / m2),
        k,
        method: BaselineMethod::Dedh,
    })
}
