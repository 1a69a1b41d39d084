//! Theoretical asymmetric p-fences and the probabilities of asymmetric
//! left/right p-outside values for `Exp-Fr(alpha, lambda; mu, sigma)`.
//!
//! For `p` in `(0, 0.5]` and quantile function `Q`,
//!
//! ```text
//! R(p) = Q(0.5) + (2-p)/p * (Q(1-p) - Q(0.5))
//! L(p) = Q(0.5) - (2-p)/p * (Q(0.5) - Q(p))
//! ```
//!
//! Both fences are equivariant under `x -> sigma x + mu`, so the outside
//! probabilities depend on `(alpha, lambda)` only and are computed on the
//! standardized law.

use crate::dist::{DistParams, Probability};
use crate::error::{Error, Result};
use crate::numerics;

/// Number of log-spaced points used to locate the left-fence sign change.
pub const P0_SCAN_POINTS: usize = 512;
/// Lower end of the `p0` scan grid.
pub const P0_SCAN_MIN: f64 = 1e-6;
/// Absolute tolerance on `p0`.
pub const P0_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FenceOrigin {
    Theoretical,
    Empirical,
}

/// Left and right asymmetric p-fences, in data units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FenceReport {
    pub p: f64,
    pub left_fence: f64,
    pub right_fence: f64,
    pub origin: FenceOrigin,
}

pub(crate) fn check_fence_level(p: f64) -> Result<()> {
    if p > 0.0 && p <= 0.5 {
        Ok(())
    } else {
        Err(Error::param("p", p, "fence level must lie in (0, 0.5]"))
    }
}

/// `(2 - p) / p`
#[inline]
pub(crate) fn fence_multiplier(p: f64) -> f64 {
    (2.0 - p) / p
}

/// Right fence of the standardized law.
pub(crate) fn std_right_fence(params: &DistParams, p: f64) -> f64 {
    let med = params.std_quantile(0.5);
    med + fence_multiplier(p) * (params.std_quantile_upper(p) - med)
}

/// Left fence of the standardized law.
pub(crate) fn std_left_fence(params: &DistParams, p: f64) -> f64 {
    let med = params.std_quantile(0.5);
    med - fence_multiplier(p) * (med - params.std_quantile(p))
}

/// Right-outside probability from the standardized fence, as a raw `f64`.
pub(crate) fn std_prob_right(params: &DistParams, p: f64) -> f64 {
    let fence = std_right_fence(params, p);
    if fence <= 0.0 {
        return 1.0;
    }
    params.log_sf_std(fence).exp()
}

pub fn right_fence_theory(params: &DistParams, p: f64) -> Result<f64> {
    check_fence_level(p)?;
    Ok(params.mu() + params.sigma() * std_right_fence(params, p))
}

/// May fall below `mu`, in which case no left-outside values can occur.
pub fn left_fence_theory(params: &DistParams, p: f64) -> Result<f64> {
    check_fence_level(p)?;
    Ok(params.mu() + params.sigma() * std_left_fence(params, p))
}

pub fn theoretical_fences(params: &DistParams, p: f64) -> Result<FenceReport> {
    Ok(FenceReport {
        p,
        left_fence: left_fence_theory(params, p)?,
        right_fence: right_fence_theory(params, p)?,
        origin: FenceOrigin::Theoretical,
    })
}

/// `P(X > R(p)) = {1 - exp(-R~^(-lambda))}^alpha` with `R~` the standardized
/// right fence.
pub fn prob_right_outside(params: &DistParams, p: f64) -> Result<Probability> {
    check_fence_level(p)?;
    let std = params.standardized();
    Ok(std.sf(std_right_fence(params, p)))
}

/// `P(X < L(p))`; exactly zero whenever the left fence does not exceed `mu`.
pub fn prob_left_outside(params: &DistParams, p: f64) -> Result<Probability> {
    check_fence_level(p)?;
    let fence = std_left_fence(params, p);
    if fence <= 0.0 {
        return Ok(Probability::clamped(0.0));
    }
    Ok(params.standardized().cdf(fence))
}

/// Smallest `p` in `(0, 0.5]` at which the left fence reaches `mu`.
///
/// Located by a sign scan of the standardized left fence on a log-spaced
/// grid followed by bisection; depends on `(alpha, lambda)` only.
pub fn p0_threshold(params: &DistParams) -> Result<f64> {
    let fence = |p: f64| std_left_fence(params, p);
    let grid = numerics::log_grid(P0_SCAN_MIN, 0.5, P0_SCAN_POINTS);
    if fence(grid[0]) >= 0.0 {
        return Err(Error::DegenerateThreshold);
    }
    let hi_idx = grid
        .iter()
        .position(|&p| fence(p) >= 0.0)
        .ok_or(Error::DegenerateThreshold)?;
    let bracket = (grid[hi_idx - 1], grid[hi_idx]);
    Ok(numerics::bisect(fence, bracket, P0_TOLERANCE)?.x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::LN_2;

    fn std(alpha: f64, lambda: f64) -> DistParams {
        DistParams::standard(alpha, lambda).unwrap()
    }

    // Reference values below come from 40-digit mpmath evaluation of the
    // closed forms.
    const R_1_1_THIRD: f64 = 6.560_737_148_326_305;
    const L_1_1_THIRD: f64 = -1.219_584_030_421_666_7;
    const L_1_1_045: f64 = 0.787_014_183_666_037_5;
    const PR_1_1_THIRD: f64 = 0.141_374_047_155_359_6;
    const PL_1_1_045: f64 = 0.280_656_120_165_596_67;
    const P0_1_1: f64 = 0.397_719_266_491_431_99;

    #[test]
    fn right_fence_examples() {
        let d = std(1.0, 1.0);
        assert_relative_eq!(right_fence_theory(&d, 0.5).unwrap(), 1.0 / LN_2, max_relative = 1e-14);
        assert_relative_eq!(
            right_fence_theory(&d, 1.0 / 3.0).unwrap(),
            R_1_1_THIRD,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            right_fence_theory(&d, 1.0 / 3.0).unwrap(),
            5.0 / 1.5f64.ln() - 4.0 / LN_2,
            max_relative = 1e-13
        );
        let moved = DistParams::new(1.0, 1.0, 10.0, 2.0).unwrap();
        assert_relative_eq!(
            right_fence_theory(&moved, 1.0 / 3.0).unwrap(),
            10.0 + 2.0 * R_1_1_THIRD,
            max_relative = 1e-13
        );
    }

    #[test]
    fn left_fence_examples() {
        let d = std(1.0, 1.0);
        assert_relative_eq!(left_fence_theory(&d, 0.5).unwrap(), 1.0 / LN_2, max_relative = 1e-14);
        assert_relative_eq!(
            left_fence_theory(&d, 1.0 / 3.0).unwrap(),
            L_1_1_THIRD,
            max_relative = 1e-13
        );
        assert_relative_eq!(left_fence_theory(&d, 0.45).unwrap(), L_1_1_045, max_relative = 1e-13);
    }

    #[test]
    fn fence_level_validation() {
        let d = std(1.0, 1.0);
        for bad in [0.0, -0.1, 0.5000001, 1.0, f64::NAN] {
            assert!(right_fence_theory(&d, bad).is_err());
            assert!(left_fence_theory(&d, bad).is_err());
            assert!(prob_right_outside(&d, bad).is_err());
            assert!(prob_left_outside(&d, bad).is_err());
        }
    }

    #[test]
    fn outside_probability_examples() {
        let d = std(1.0, 1.0);
        assert_relative_eq!(
            prob_right_outside(&d, 1.0 / 3.0).unwrap().value(),
            PR_1_1_THIRD,
            max_relative = 1e-13
        );
        let moved = DistParams::new(1.0, 1.0, 7.0, 3.0).unwrap();
        assert_relative_eq!(
            prob_right_outside(&moved, 1.0 / 3.0).unwrap().value(),
            PR_1_1_THIRD,
            max_relative = 1e-13
        );
        assert_eq!(prob_left_outside(&d, 1.0 / 3.0).unwrap().value(), 0.0);
        assert_relative_eq!(
            prob_left_outside(&d, 0.45).unwrap().value(),
            PL_1_1_045,
            max_relative = 1e-13
        );
        for (a, l) in [(0.3, 4.0), (1.0, 1.0), (5.0, 0.2)] {
            let d = std(a, l);
            assert!((prob_right_outside(&d, 0.5).unwrap().value() - 0.5).abs() <= 1e-12);
            assert!((prob_left_outside(&d, 0.5).unwrap().value() - 0.5).abs() <= 1e-12);
        }
    }

    #[test]
    fn right_fence_never_below_mu() {
        for &a in &[0.1, 0.5, 1.0, 3.0, 10.0] {
            for &l in &[0.1, 0.5, 1.0, 3.0, 10.0] {
                let d = DistParams::new(a, l, -2.0, 3.0).unwrap();
                for i in 1..=50 {
                    let p = i as f64 / 100.0;
                    let r = right_fence_theory(&d, p).unwrap();
                    assert!(r >= -2.0);
                    assert!(r >= d.median() - 1e-12 * d.median().abs());
                }
            }
        }
    }

    #[test]
    fn definitional_consistency() {
        for &a in &[0.25, 0.5, 1.0, 2.0, 4.0] {
            for &l in &[0.5, 1.0, 2.0] {
                let d = DistParams::new(a, l, 1.5, 0.7).unwrap();
                for &p in &[0.05, 0.2, 1.0 / 3.0, 0.45, 0.5] {
                    let pr = prob_right_outside(&d, p).unwrap().value();
                    let via_cdf = 1.0 - d.cdf(right_fence_theory(&d, p).unwrap()).value();
                    assert!((pr - via_cdf).abs() <= 1e-12, "{a} {l} {p}");
                    let pl = prob_left_outside(&d, p).unwrap().value();
                    let via_cdf = d.cdf(left_fence_theory(&d, p).unwrap()).value();
                    assert!((pl - via_cdf).abs() <= 1e-12, "{a} {l} {p}");
                }
            }
        }
    }

    #[test]
    fn p0_examples() {
        let d = std(1.0, 1.0);
        let p0 = p0_threshold(&d).unwrap();
        assert!((p0 - P0_1_1).abs() <= 1e-9, "{p0}");
        assert!(p0 > 0.39 && p0 < 0.40);
        let moved = DistParams::new(1.0, 1.0, 5.0, 2.0).unwrap();
        assert_eq!(p0_threshold(&moved).unwrap(), p0);
    }

    #[test]
    fn p0_separates_zero_region() {
        for &a in &[0.25, 0.5, 1.0, 2.0, 4.0] {
            for &l in &[0.25, 0.5, 1.3, 2.0, 5.0] {
                let d = DistParams::new(a, l, -1.0, 2.0).unwrap();
                let p0 = p0_threshold(&d).unwrap();
                assert!(p0 > 0.0 && p0 <= 0.5);
                assert!(left_fence_theory(&d, (p0 + 1e-6).min(0.5)).unwrap() >= -1.0);
                assert!(left_fence_theory(&d, p0 - 1e-6).unwrap() <= -1.0);
                assert_eq!(prob_left_outside(&d, p0 - 1e-6).unwrap().value(), 0.0);
            }
        }
    }

    #[test]
    fn p0_matches_high_precision_roots() {
        // mpmath roots of the standardized left fence
        let cases = [
            (0.5, 0.5, 0.460_704_849_655_600_7),
            (0.5, 1.3, 0.411_647_993_837_615_5),
            (2.0, 2.0, 0.300_197_849_015_098_9),
        ];
        for (a, l, expect) in cases {
            let p0 = p0_threshold(&std(a, l)).unwrap();
            assert!((p0 - expect).abs() <= 1e-9, "{a} {l}: {p0}");
        }
    }
}
