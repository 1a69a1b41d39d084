//! IAPO and IAPO-NM estimators of the tail shape `(alpha, lambda)`.
//!
//! Both estimators invert the right-outside probability
//!
//! ```text
//! P(X > R(p)) = {1 - exp(-R~(p)^(-lambda))}^alpha
//! ```
//!
//! at two levels `p1 != p2`, using the empirical right-outside frequencies
//! in place of the probabilities.
//!
//! * IAPO takes the empirical fences `R_n(p_i)` together with a known
//!   `(mu, sigma)` as the standardized fences. Dividing the two log-equations
//!   eliminates `alpha`, leaving a scalar root problem in `lambda`; `alpha`
//!   then follows in closed form.
//! * IAPO-NM uses the theoretical fences, so it needs no location or scale,
//!   and solves the 2x2 system in the least-squares sense with Nelder–Mead
//!   over `(ln alpha, ln lambda)`.
//!
//! `(mu, sigma)` can afterwards be fitted by two-quantile matching. For
//! raw data whose location and scale are unknown, fit the shape with IAPO-NM
//! first and match quantiles second.

use std::fmt;

use crate::dist::DistParams;
use crate::empirical::SortedSample;
use crate::error::{Error, Result};
use crate::numerics;
use crate::theory;

pub const LAMBDA_SCAN_MIN: f64 = 1e-3;
pub const LAMBDA_SCAN_MAX: f64 = 1e3;
pub const LAMBDA_SCAN_POINTS: usize = 200;
pub const LAMBDA_TOLERANCE: f64 = 1e-12;

pub const NM_STEP: f64 = 0.5;
pub const NM_TOLERANCE: f64 = 1e-10;
pub const NM_MAX_ITER: usize = 2_000;
/// IAPO-NM estimates outside `[NM_PARAM_MIN, NM_PARAM_MAX]` in either
/// coordinate are reported as non-convergence.
pub const NM_PARAM_MIN: f64 = 1e-3;
pub const NM_PARAM_MAX: f64 = 1e3;

/// Default quantile levels for location/scale matching.
pub const DEFAULT_MATCH_LEVELS: (f64, f64) = (0.25, 0.5);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Iapo,
    IapoNm,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Iapo => "iapo",
            Method::IapoNm => "iapo-nm",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Iapo => "IAPO",
            Method::IapoNm => "IAPO-NM",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    pub alpha_hat: f64,
    pub lambda_hat: f64,
    pub mu_hat: Option<f64>,
    pub sigma_hat: Option<f64>,
    pub method: Method,
    pub p1: f64,
    pub p2: f64,
    pub iterations: usize,
    /// Euclidean norm of the system residual for IAPO, final sum of
    /// squares for IAPO-NM.
    pub residual: f64,
}

impl EstimateResult {
    /// Estimated tail index `alpha_hat * lambda_hat`.
    pub fn product(&self) -> f64 {
        self.alpha_hat * self.lambda_hat
    }

    /// Standardized parameters at the estimated shape.
    pub fn shape(&self) -> Result<DistParams> {
        DistParams::standard(self.alpha_hat, self.lambda_hat)
    }

    /// Attaches `(mu_hat, sigma_hat)` from two-quantile matching.
    pub fn with_location_scale(mut self, s: &SortedSample, q_lo: f64, q_hi: f64) -> Result<Self> {
        let (mu, sigma) = match_location_scale(s, self.alpha_hat, self.lambda_hat, q_lo, q_hi)?;
        self.mu_hat = Some(mu);
        self.sigma_hat = Some(sigma);
        Ok(self)
    }
}

/// Right-outside frequencies at two fence levels.
///
/// The smaller level has the farther fence and must have the strictly
/// smaller, nonzero frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyPair {
    pub p1: f64,
    pub p2: f64,
    pub f1: f64,
    pub f2: f64,
}

fn check_level_pair(p1: f64, p2: f64) -> Result<()> {
    for (name, p) in [("p1", p1), ("p2", p2)] {
        if !(p > 0.0 && p < 0.5) {
            return Err(Error::param(name, p, "must lie in (0, 0.5)"));
        }
    }
    if p1 == p2 {
        return Err(Error::param("p2", p2, "must differ from p1"));
    }
    Ok(())
}

impl FrequencyPair {
    pub fn new(p1: f64, p2: f64, f1: f64, f2: f64) -> Result<Self> {
        check_level_pair(p1, p2)?;
        for (p, f) in [(p1, f1), (p2, f2)] {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::param("frequency", f, "must lie in [0, 1]"));
            }
            if f == 0.0 {
                return Err(Error::NotApplicable(format!("no right outside values at p = {p}")));
            }
            if f == 1.0 {
                return Err(Error::Degenerate(format!("every observation is outside at p = {p}")));
            }
        }
        if f1 == f2 {
            return Err(Error::Degenerate(format!(
                "equal outside frequencies {f1} at both levels"
            )));
        }
        if (p1 < p2) != (f1 < f2) {
            return Err(Error::Degenerate(format!(
                "frequencies ({f1}, {f2}) are not ordered like the levels ({p1}, {p2})"
            )));
        }
        Ok(FrequencyPair { p1, p2, f1, f2 })
    }

    /// Empirical right-outside frequencies of `s` at both levels.
    pub fn from_sample(s: &SortedSample, p1: f64, p2: f64) -> Result<Self> {
        check_level_pair(p1, p2)?;
        let f1 = s.count_outside(p1)?.freq_right;
        let f2 = s.count_outside(p2)?.freq_right;
        Self::new(p1, p2, f1, f2)
    }

    /// Theoretical right-outside probabilities of `params` at both levels.
    pub fn theoretical(params: &DistParams, p1: f64, p2: f64) -> Result<Self> {
        check_level_pair(p1, p2)?;
        let f1 = theory::prob_right_outside(params, p1)?.value();
        let f2 = theory::prob_right_outside(params, p2)?.value();
        Self::new(p1, p2, f1, f2)
    }

    /// `log_{f2}(f1)`
    pub fn log_ratio(&self) -> f64 {
        self.f1.ln() / self.f2.ln()
    }
}

/// `ln(1 - exp(-r^(-lambda)))` for a standardized fence `r > 0`.
#[inline]
fn log_tail_base(r: f64, lambda: f64) -> f64 {
    let w = r.powf(-lambda);
    if w > std::f64::consts::LN_2 {
        (-(-w).exp()).ln_1p()
    } else {
        (-(-w).exp_m1()).ln()
    }
}

/// Closed-form `alpha` given `lambda`: `ln f / ln(1 - exp(-r^(-lambda)))`.
pub fn alpha_given_lambda(freq: f64, std_fence: f64, lambda: f64) -> f64 {
    freq.ln() / log_tail_base(std_fence, lambda)
}

/// IAPO on standardized fences `r_i = (R(p_i) - mu) / sigma`.
pub fn iapo_from_std_fences(freqs: &FrequencyPair, r1: f64, r2: f64) -> Result<EstimateResult> {
    for r in [r1, r2] {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::NotApplicable(format!(
                "standardized right fence {r} is not inside the support"
            )));
        }
    }
    // S2^c = S1 in log form; both sides vanish together for large lambda
    let c = freqs.log_ratio();
    let g = |lambda: f64| c * log_tail_base(r2, lambda) - log_tail_base(r1, lambda);

    let bracket =
        numerics::bracket_scan(g, LAMBDA_SCAN_MIN, LAMBDA_SCAN_MAX, LAMBDA_SCAN_POINTS).ok_or(Error::NoBracket)?;
    let root = numerics::bisect(g, bracket, LAMBDA_TOLERANCE)?;
    let lambda_hat = root.x;
    let alpha_hat = alpha_given_lambda(freqs.f1, r1, lambda_hat);
    if !(alpha_hat > 0.0 && alpha_hat.is_finite()) {
        return Err(Error::Degenerate(format!(
            "closed-form alpha {alpha_hat} is not positive"
        )));
    }

    let fitted = |r: f64| (alpha_hat * log_tail_base(r, lambda_hat)).exp();
    let residual = (fitted(r1) - freqs.f1).hypot(fitted(r2) - freqs.f2);
    Ok(EstimateResult {
        alpha_hat,
        lambda_hat,
        mu_hat: None,
        sigma_hat: None,
        method: Method::Iapo,
        p1: freqs.p1,
        p2: freqs.p2,
        iterations: root.iterations,
        residual,
    })
}

/// IAPO on fences in data units with a known location and scale.
pub fn iapo_from_fences(
    freqs: &FrequencyPair,
    fence1: f64,
    fence2: f64,
    mu: f64,
    sigma: f64,
) -> Result<EstimateResult> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::param("sigma", sigma, "must be positive and finite"));
    }
    iapo_from_std_fences(freqs, (fence1 - mu) / sigma, (fence2 - mu) / sigma)
}

/// IAPO estimate from a sample, given preliminary `(mu, sigma)`.
pub fn iapo_estimate(s: &SortedSample, p1: f64, p2: f64, mu: f64, sigma: f64) -> Result<EstimateResult> {
    let freqs = FrequencyPair::from_sample(s, p1, p2)?;
    let fence1 = s.emp_right_fence(p1)?;
    let fence2 = s.emp_right_fence(p2)?;
    iapo_from_fences(&freqs, fence1, fence2, mu, sigma)
}

/// Sum of squared differences between the target frequencies and the
/// theoretical right-outside probabilities at `(e^u, e^v)`.
pub fn nm_objective(freqs: &FrequencyPair, log_alpha: f64, log_lambda: f64) -> f64 {
    let Ok(params) = DistParams::standard(log_alpha.exp(), log_lambda.exp()) else {
        return f64::INFINITY;
    };
    let d1 = theory::std_prob_right(&params, freqs.p1) - freqs.f1;
    let d2 = theory::std_prob_right(&params, freqs.p2) - freqs.f2;
    d1 * d1 + d2 * d2
}

/// IAPO-NM from a pair of target frequencies.
pub fn iapo_nm_from_frequencies(freqs: &FrequencyPair) -> Result<EstimateResult> {
    let objective = |x: &[f64]| nm_objective(freqs, x[0], x[1]);
    let fit = numerics::nelder_mead(objective, &[0.0, 0.0], NM_STEP, NM_TOLERANCE, NM_MAX_ITER)?;
    let (alpha_hat, lambda_hat) = (fit.x[0].exp(), fit.x[1].exp());
    let inside = |x: f64| (NM_PARAM_MIN..=NM_PARAM_MAX).contains(&x);
    if !(inside(alpha_hat) && inside(lambda_hat)) {
        // the sum of squares has no interior minimum and the simplex drifted along a ridge
        return Err(Error::NonConvergence {
            iterations: fit.iterations,
            residual: fit.f_x,
        });
    }
    Ok(EstimateResult {
        alpha_hat,
        lambda_hat,
        mu_hat: None,
        sigma_hat: None,
        method: Method::IapoNm,
        p1: freqs.p1,
        p2: freqs.p2,
        iterations: fit.iterations,
        residual: fit.f_x,
    })
}

/// IAPO-NM estimate from a sample. Location and scale are not needed.
pub fn iapo_nm_estimate(s: &SortedSample, p1: f64, p2: f64) -> Result<EstimateResult> {
    iapo_nm_from_frequencies(&FrequencyPair::from_sample(s, p1, p2)?)
}

/// Fits `(mu, sigma)` so that the model quantiles at `q_lo` and `q_hi`
/// equal the empirical ones, for a fixed shape `(alpha, lambda)`.
pub fn match_location_scale(s: &SortedSample, alpha: f64, lambda: f64, q_lo: f64, q_hi: f64) -> Result<(f64, f64)> {
    if !(q_lo > 0.0 && q_lo < q_hi && q_hi < 1.0) {
        return Err(Error::param("q_lo", q_lo, "need 0 < q_lo < q_hi < 1"));
    }
    let shape = DistParams::standard(alpha, lambda)?;
    let (emp_lo, emp_hi) = (s.emp_quantile(q_lo)?, s.emp_quantile(q_hi)?);
    if !(emp_hi > emp_lo) {
        return Err(Error::Degenerate(format!(
            "empirical quantiles at {q_lo} and {q_hi} coincide ({emp_lo})"
        )));
    }
    let (model_lo, model_hi) = (shape.quantile(q_lo)?, shape.quantile(q_hi)?);
    let sigma = (emp_hi - emp_lo) / (model_hi - model_lo);
    let mu = emp_lo - sigma * model_lo;
    Ok((mu, sigma))
}

/// Quantile of the fitted law, for levels beyond the observed range.
pub fn extrapolate_quantile(est: &EstimateResult, mu: f64, sigma: f64, p: f64) -> Result<f64> {
    DistParams::new(est.alpha_hat, est.lambda_hat, mu, sigma)?.quantile(p)
}
