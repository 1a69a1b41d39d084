//! Order statistics, the empirical c.d.f., type-1 empirical quantiles and
//! asymmetric empirical fences.

use std::io::BufRead;

use crate::dist::Probability;
use crate::error::{Error, Result};
use crate::theory::{check_fence_level, fence_multiplier, FenceOrigin, FenceReport};

/// Observations in ascending order, `X_{1:n} <= ... <= X_{n:n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedSample {
    values: Vec<f64>,
}

/// Counts and relative frequencies of empirical outside values at level `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutsideCounts {
    pub p: f64,
    pub n_right: usize,
    pub n_left: usize,
    pub freq_right: f64,
    pub freq_left: f64,
}

impl SortedSample {
    /// Sorts the observations. Empty input and non-finite values are rejected.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::SampleTooSmall { needed: 1, got: 0 });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteObservation { index });
        }
        values.sort_by(f64::total_cmp);
        Ok(SortedSample { values })
    }

    /// Wraps a vector the caller has already sorted.
    pub(crate) fn from_sorted_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(values.windows(2).all(|w| w[0] <= w[1]));
        SortedSample { values }
    }

    /// Parses newline-delimited decimal literals. Blank lines and lines
    /// starting with `#` are skipped. Line numbers in errors are 1-based.
    pub fn from_reader<R: BufRead>(reader: R) -> std::io::Result<Result<Self>> {
        let mut values = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            match trimmed.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => {
                    return Ok(Err(Error::Parse {
                        line: i + 1,
                        content: trimmed.to_string(),
                    }))
                }
            }
        }
        Ok(Self::new(values))
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        Self::from_reader(text.as_bytes()).expect("reading from memory cannot fail")
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    /// Order statistic `X_{i:n}`, 1-based.
    pub fn order_stat(&self, i: usize) -> f64 {
        assert!(
            (1..=self.len()).contains(&i),
            "order statistic index {i} out of 1..={}",
            self.len()
        );
        self.values[i - 1]
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.len() - 1]
    }

    /// Applies `x -> scale * x + shift` with `scale > 0`; order is preserved.
    pub fn affine(&self, shift: f64, scale: f64) -> Result<Self> {
        if !(scale > 0.0) {
            return Err(Error::param("scale", scale, "must be positive"));
        }
        Ok(SortedSample {
            values: self.values.iter().map(|&x| scale * x + shift).collect(),
        })
    }

    /// Empirical c.d.f., right-continuous: `F_n(X_{i:n}) = i / n`.
    pub fn emp_cdf(&self, x: f64) -> Probability {
        let below_or_at = self.values.partition_point(|&v| v <= x);
        Probability::clamped(below_or_at as f64 / self.len() as f64)
    }

    /// Rank `ceil(n p)` used by the type-1 quantile.
    ///
    /// A product `n * p` within a few ulps of an integer counts as that
    /// integer, so `p = i / n` selects `X_{i:n}` despite rounding in `p`.
    fn quantile_rank(&self, p: f64) -> usize {
        let n = self.len();
        let np = n as f64 * p;
        let nearest = np.round();
        let rank = if (np - nearest).abs() <= 8.0 * f64::EPSILON * np.max(1.0) {
            nearest
        } else {
            np.ceil()
        };
        (rank as usize).clamp(1, n)
    }

    /// Type-1 empirical quantile `X_{ceil(np):n}` for `p` in `(0, 1]`.
    pub fn emp_quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::param("p", p, "empirical quantile level must lie in (0, 1]"));
        }
        Ok(self.values[self.quantile_rank(p) - 1])
    }

    fn require_fence_size(&self) -> Result<()> {
        if self.len() < 2 {
            return Err(Error::SampleTooSmall {
                needed: 2,
                got: self.len(),
            });
        }
        Ok(())
    }

    /// Asymmetric empirical right p-fence
    /// `med + (2-p)/p * (F_n^{-1}(1-p) - med)`.
    pub fn emp_right_fence(&self, p: f64) -> Result<f64> {
        check_fence_level(p)?;
        self.require_fence_size()?;
        let med = self.emp_quantile(0.5)?;
        let upper = self.emp_quantile(1.0 - p)?;
        Ok(med + fence_multiplier(p) * (upper - med))
    }

    /// Asymmetric empirical left p-fence
    /// `med - (2-p)/p * (med - F_n^{-1}(p))`.
    pub fn emp_left_fence(&self, p: f64) -> Result<f64> {
        check_fence_level(p)?;
        self.require_fence_size()?;
        let med = self.emp_quantile(0.5)?;
        let lower = self.emp_quantile(p)?;
        Ok(med - fence_multiplier(p) * (med - lower))
    }

    pub fn fences(&self, p: f64) -> Result<FenceReport> {
        Ok(FenceReport {
            p,
            left_fence: self.emp_left_fence(p)?,
            right_fence: self.emp_right_fence(p)?,
            origin: FenceOrigin::Empirical,
        })
    }

    /// Observations strictly beyond the empirical fences. Ties at a fence
    /// are not outside values.
    pub fn count_outside(&self, p: f64) -> Result<OutsideCounts> {
        let fences = self.fences(p)?;
        let n = self.len();
        let n_right = n - self.values.partition_point(|&v| v <= fences.right_fence);
        let n_left = self.values.partition_point(|&v| v < fences.left_fence);
        Ok(OutsideCounts {
            p,
            n_right,
            n_left,
            freq_right: n_right as f64 / n as f64,
            freq_left: n_left as f64 / n as f64,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn s(v: &[f64]) -> SortedSample {
        SortedSample::new(v.to_vec()).unwrap()
    }

    fn one_to(n: usize) -> SortedSample {
        s(&(1..=n).map(|i| i as f64).collect::<Vec<_>>())
    }

    #[test]
    fn construction_sorts_and_validates() {
        let x = s(&[3.0, 1.0, 2.0]);
        assert_eq!(x.values(), &[1.0, 2.0, 3.0]);
        assert_eq!(x.order_stat(1), 1.0);
        assert_eq!(x.order_stat(3), 3.0);
        assert!(matches!(SortedSample::new(vec![]), Err(Error::SampleTooSmall { .. })));
        assert_eq!(
            SortedSample::new(vec![1.0, f64::NAN]),
            Err(Error::NonFiniteObservation { index: 1 })
        );
    }

    #[test]
    fn emp_cdf_examples() {
        let x = s(&[1.0, 2.0, 3.0]);
        assert_eq!(x.emp_cdf(0.5).value(), 0.0);
        assert_relative_eq!(x.emp_cdf(2.0).value(), 2.0 / 3.0);
        assert_relative_eq!(x.emp_cdf(2.5).value(), 2.0 / 3.0);
        assert_eq!(x.emp_cdf(3.7).value(), 1.0);
        assert_relative_eq!(x.emp_cdf(1.0).value(), 1.0 / 3.0);
    }

    #[test]
    fn emp_quantile_examples() {
        let x = one_to(5);
        assert_eq!(x.emp_quantile(0.5).unwrap(), 3.0);
        assert_eq!(x.emp_quantile(0.4).unwrap(), 2.0);
        assert_eq!(x.emp_quantile(1.0).unwrap(), 5.0);
        assert_eq!(x.emp_quantile(1e-9).unwrap(), 1.0);
        assert!(x.emp_quantile(0.0).is_err());
        assert!(x.emp_quantile(1.01).is_err());
    }

    #[test]
    fn emp_quantile_hits_order_stats_at_i_over_n() {
        for n in 1..200 {
            let x = one_to(n);
            for i in 1..=n {
                assert_eq!(x.emp_quantile(i as f64 / n as f64).unwrap(), i as f64);
            }
        }
    }

    #[test]
    fn fence_examples() {
        let x = one_to(10);
        assert_relative_eq!(
            x.emp_right_fence(0.3).unwrap(),
            5.0 + 1.7 / 0.3 * 2.0,
            max_relative = 1e-14
        );
        assert_eq!(x.emp_right_fence(0.5).unwrap(), 5.0);
        assert_relative_eq!(
            x.emp_left_fence(0.3).unwrap(),
            5.0 - 1.7 / 0.3 * 2.0,
            max_relative = 1e-14
        );
        assert_eq!(x.emp_left_fence(0.5).unwrap(), 5.0);

        let moved = x.affine(1.0, 2.0).unwrap();
        assert_relative_eq!(
            moved.emp_right_fence(0.3).unwrap(),
            2.0 * x.emp_right_fence(0.3).unwrap() + 1.0,
            max_relative = 1e-14
        );

        let flat = s(&[4.2; 7]);
        for p in [0.1, 0.3, 0.5] {
            assert_eq!(flat.emp_left_fence(p).unwrap(), 4.2);
            assert_eq!(flat.emp_right_fence(p).unwrap(), 4.2);
        }
    }

    #[test]
    fn fences_need_two_points_and_valid_p() {
        let single = s(&[1.0]);
        assert!(matches!(
            single.emp_right_fence(0.3),
            Err(Error::SampleTooSmall { needed: 2, got: 1 })
        ));
        assert!(single.count_outside(0.3).is_err());
        let x = one_to(10);
        assert!(x.emp_right_fence(0.0).is_err());
        assert!(x.emp_left_fence(0.51).is_err());
    }

    #[test]
    fn count_outside_examples() {
        let x = one_to(10);
        let c = x.count_outside(0.3).unwrap();
        assert_eq!((c.n_right, c.freq_right), (0, 0.0));

        let mut v: Vec<f64> = (1..=9).map(|i| i as f64).collect();
        v.push(100.0);
        let c = s(&v).count_outside(0.3).unwrap();
        assert_eq!(c.n_right, 1);
        assert_relative_eq!(c.freq_right, 0.1);

        let c = x.count_outside(0.5).unwrap();
        assert_eq!(c.n_right, 5);
        assert_eq!(c.n_left, 4);
    }

    #[test]
    fn ties_at_fence_are_not_outside() {
        let x = s(&[1.0, 1.0, 1.0, 1.0]);
        let c = x.count_outside(0.25).unwrap();
        assert_eq!((c.n_left, c.n_right), (0, 0));
    }

    #[test]
    fn parses_sample_files() {
        let text = "# header\n3.5\n\n  1e-1 \n# comment\n-2\n";
        assert_eq!(SortedSample::parse_str(text).unwrap().values(), &[-2.0, 0.1, 3.5]);
        assert_eq!(
            SortedSample::parse_str("1\n2\nabc\n"),
            Err(Error::Parse {
                line: 3,
                content: "abc".into()
            })
        );
        assert!(SortedSample::parse_str("# nothing\n").is_err());
        assert!(matches!(
            SortedSample::parse_str("1\ninf\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}
