//! The Exponentiated-Fréchet distribution `Exp-Fr(alpha, lambda; mu, sigma)`.
//!
//! The c.d.f. is
//!
//! ```text
//! F(x) = 1 - [1 - exp(-((x - mu) / sigma)^(-lambda))]^alpha,   x > mu
//! F(x) = 0,                                                     x <= mu
//! ```
//!
//! and the right tail is regularly varying with index `-alpha * lambda`.
//! With `alpha = 1` the family reduces to the classical Fréchet law.

use rand::distr::Open01;
use rand::Rng;

use crate::empirical::SortedSample;
use crate::error::{Error, Result};

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(Error::param("probability", value, "must lie in [0, 1]"))
        }
    }

    /// Wraps a value already known to be in `[0, 1]`; clamps rounding spill.
    pub(crate) fn clamped(value: f64) -> Self {
        Probability(value.clamp(0.0, 1.0))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

/// Parameters of `Exp-Fr(alpha, lambda; mu, sigma)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistParams {
    alpha: f64,
    lambda: f64,
    mu: f64,
    sigma: f64,
}

impl DistParams {
    pub fn new(alpha: f64, lambda: f64, mu: f64, sigma: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::param("alpha", alpha, "must be positive and finite"));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::param("lambda", lambda, "must be positive and finite"));
        }
        if !mu.is_finite() {
            return Err(Error::param("mu", mu, "must be finite"));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::param("sigma", sigma, "must be positive and finite"));
        }
        Ok(DistParams {
            alpha,
            lambda,
            mu,
            sigma,
        })
    }

    /// `Exp-Fr(alpha, lambda; 0, 1)`.
    pub fn standard(alpha: f64, lambda: f64) -> Result<Self> {
        Self::new(alpha, lambda, 0.0, 1.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Same shape parameters with `mu = 0`, `sigma = 1`.
    pub fn standardized(&self) -> Self {
        DistParams {
            mu: 0.0,
            sigma: 1.0,
            ..*self
        }
    }

    /// Index of regular variation of the right tail, `alpha * lambda`.
    pub fn tail_index(&self) -> f64 {
        self.alpha * self.lambda
    }

    pub fn cdf(&self, x: f64) -> Probability {
        if x.is_nan() {
            return Probability(f64::NAN);
        }
        if x <= self.mu {
            return Probability(0.0);
        }
        let log_sf = self.log_sf_std((x - self.mu) / self.sigma);
        // F = 1 - exp(log_sf)
        Probability::clamped(-log_sf.exp_m1())
    }

    /// Survival function `P(X > x)`.
    pub fn sf(&self, x: f64) -> Probability {
        if x <= self.mu {
            return Probability(1.0);
        }
        Probability::clamped(self.log_sf_std((x - self.mu) / self.sigma).exp())
    }

    /// `alpha * log(1 - exp(-z^(-lambda)))` for a standardized `z > 0`.
    pub(crate) fn log_sf_std(&self, z: f64) -> f64 {
        let w = z.powf(-self.lambda);
        // log(1 - e^{-w}); log1p is accurate when e^{-w} is small, expm1 otherwise
        let log_one_minus_t = if w > std::f64::consts::LN_2 {
            (-(-w).exp()).ln_1p()
        } else {
            (-(-w).exp_m1()).ln()
        };
        self.alpha * log_one_minus_t
    }

    /// Quantile function `mu + sigma * {-log[1 - (1-p)^(1/alpha)]}^(-1/lambda)`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::param("p", p, "quantile level must lie in (0, 1)"));
        }
        Ok(self.mu + self.sigma * self.std_quantile_log_upper((-p).ln_1p()))
    }

    /// Standardized quantile at level `1 - s`, given `log_upper = ln(s)`.
    ///
    /// Taking the log of the upper-tail mass lets callers pass `ln(p)` for the
    /// `1 - p` quantile without forming `1 - (1 - p)`.
    pub(crate) fn std_quantile_log_upper(&self, log_upper: f64) -> f64 {
        // -log(1 - t) with t = s^(1/alpha): log1p when t is small, expm1 when t is near 1
        let scaled = log_upper / self.alpha;
        let t = scaled.exp();
        let neg_log = if t < 0.5 {
            -(-t).ln_1p()
        } else {
            -(-scaled.exp_m1()).ln()
        };
        neg_log.powf(-1.0 / self.lambda)
    }

    /// Standardized quantile at `p`.
    pub(crate) fn std_quantile(&self, p: f64) -> f64 {
        self.std_quantile_log_upper((-p).ln_1p())
    }

    /// Standardized quantile at `1 - p`.
    pub(crate) fn std_quantile_upper(&self, p: f64) -> f64 {
        self.std_quantile_log_upper(p.ln())
    }

    pub fn median(&self) -> f64 {
        self.mu + self.sigma * self.std_quantile(0.5)
    }

    /// Maps a single uniform variate through the quantile function.
    pub fn transform(&self, u: f64) -> Result<f64> {
        self.quantile(u)
    }

    /// Draws `n` unsorted observations by inverse transform, consuming one
    /// open-interval uniform per draw in stream order.
    pub fn draw<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        (0..n)
            .map(|_| {
                let u: f64 = rng.sample(Open01);
                self.mu + self.sigma * self.std_quantile(u)
            })
            .collect()
    }

    /// Draws `n` observations and returns them in ascending order.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<SortedSample> {
        if n == 0 {
            return Err(Error::SampleTooSmall { needed: 1, got: 0 });
        }
        SortedSample::new(self.draw(n, rng))
    }

    /// Inverse transform of caller-supplied uniforms in `(0, 1)`.
    pub fn sample_from_uniforms<I>(&self, uniforms: I) -> Result<SortedSample>
    where
        I: IntoIterator<Item = f64>,
    {
        let values = uniforms
            .into_iter()
            .map(|u| self.quantile(u))
            .collect::<Result<Vec<_>>>()?;
        SortedSample::new(values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{E, LN_2};

    fn p(alpha: f64, lambda: f64, mu: f64, sigma: f64) -> DistParams {
        DistParams::new(alpha, lambda, mu, sigma).unwrap()
    }

    #[test]
    fn rejects_invalid_params() {
        assert!(DistParams::new(0.0, 1.0, 0.0, 1.0).is_err());
        assert!(DistParams::new(1.0, -1.0, 0.0, 1.0).is_err());
        assert!(DistParams::new(1.0, 1.0, f64::NAN, 1.0).is_err());
        assert!(DistParams::new(1.0, 1.0, 0.0, 0.0).is_err());
        assert!(DistParams::new(f64::INFINITY, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn cdf_examples() {
        assert_relative_eq!(p(1.0, 1.0, 0.0, 1.0).cdf(1.0).value(), 1.0 / E, max_relative = 1e-15);
        assert_eq!(p(2.0, 1.3, 4.0, 3.0).cdf(4.0).value(), 0.0);
        assert_eq!(p(2.0, 1.3, 4.0, 3.0).cdf(-100.0).value(), 0.0);
        // mpmath, 40 digits
        assert_relative_eq!(
            p(2.0, 1.3, 0.0, 1.0).cdf(5.0).value(),
            0.986_521_728_426_507_7,
            max_relative = 1e-14
        );
    }

    #[test]
    fn cdf_limits() {
        let d = p(0.7, 2.0, 1.0, 2.0);
        assert!(d.cdf(1.0 + 1e-9).value() < 1e-12);
        assert!(d.cdf(1e12).value() > 1.0 - 1e-12);
    }

    #[test]
    fn quantile_examples() {
        let d = p(1.0, 1.0, 0.0, 1.0);
        assert_relative_eq!(d.quantile((-1.0f64).exp()).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(d.quantile(0.5).unwrap(), 1.0 / LN_2, max_relative = 1e-15);
        assert_relative_eq!(
            p(0.5, 1.3, 0.0, 1.0).quantile(0.5).unwrap(),
            2.607_479_628_377_3,
            max_relative = 1e-14
        );
    }

    #[test]
    fn quantile_rejects_out_of_range() {
        let d = p(1.0, 1.0, 0.0, 1.0);
        for bad in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(d.quantile(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn round_trip_grid() {
        for &alpha in &[0.5, 1.0, 2.0] {
            for &lambda in &[0.5, 1.0, 2.0] {
                for &mu in &[0.0, 3.0, -3.0] {
                    for &sigma in &[0.5, 1.0, 4.0] {
                        let d = p(alpha, lambda, mu, sigma);
                        for i in 1..100 {
                            let prob = i as f64 / 100.0;
                            let back = d.cdf(d.quantile(prob).unwrap()).value();
                            assert!(
                                (back - prob).abs() <= 1e-10,
                                "{alpha} {lambda} {mu} {sigma} {prob}: {back}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn location_scale_equivariance() {
        let base = p(1.7, 0.8, 0.0, 1.0);
        let moved = p(1.7, 0.8, -2.5, 3.5);
        for i in 1..100 {
            let prob = i as f64 / 100.0;
            let expect = -2.5 + 3.5 * base.quantile(prob).unwrap();
            assert_relative_eq!(moved.quantile(prob).unwrap(), expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn frechet_degeneracy() {
        let d = p(1.0, 1.7, 0.5, 2.0);
        for i in 1..200 {
            let x = 0.5 + i as f64 * 0.1;
            let frechet = (-((x - 0.5) / 2.0).powf(-1.7)).exp();
            assert!((d.cdf(x).value() - frechet).abs() <= 1e-14);
        }
    }

    #[test]
    fn strictly_monotone() {
        let d = p(0.5, 2.0, 0.0, 1.0);
        let mut prev_q = f64::NEG_INFINITY;
        let mut prev_f = -1.0;
        for i in 1..1000 {
            let q = d.quantile(i as f64 / 1000.0).unwrap();
            assert!(q > prev_q);
            prev_q = q;
            let f = d.cdf(0.2 + i as f64 * 0.01).value();
            assert!(f > prev_f);
            prev_f = f;
        }
    }

    #[test]
    fn tail_index_is_product() {
        assert_eq!(p(1.0, 1.0, 0.0, 1.0).tail_index(), 1.0);
        assert_relative_eq!(p(0.5, 1.3, 0.0, 1.0).tail_index(), 0.65);
        assert_eq!(p(2.0, 0.5, 0.0, 1.0).tail_index(), p(1.0, 1.0, 0.0, 1.0).tail_index());
    }

    #[test]
    fn single_uniform_half_gives_median() {
        let d = p(0.5, 1.3, 2.0, 3.0);
        let s = d.sample_from_uniforms([0.5]).unwrap();
        assert_eq!(s.values(), &[d.median()]);
    }

    #[test]
    fn sample_is_sorted_and_deterministic() {
        let d = p(1.0, 1.0, 0.0, 1.0);
        let a = d.sample(1000, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        let b = d.sample(1000, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        assert_eq!(a, b);
        assert!(a.values().windows(2).all(|w| w[0] <= w[1]));
        assert!(d.sample(0, &mut ChaCha8Rng::seed_from_u64(1)).is_err());
    }

    #[test]
    fn kolmogorov_smirnov_large_sample() {
        let d = p(1.0, 1.0, 0.0, 1.0);
        let n = 100_000;
        let s = d.sample(n, &mut ChaCha8Rng::seed_from_u64(2024)).unwrap();
        let nf = n as f64;
        let ks = s
            .values()
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = d.cdf(x).value();
                (f - i as f64 / nf).abs().max((((i + 1) as f64) / nf - f).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 1.95 / nf.sqrt(), "KS = {ks}");
    }
}
