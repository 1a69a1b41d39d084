//! One-dimensional root bracketing/bisection and Nelder–Mead minimization.

use crate::error::{Error, Result};

const BISECT_MAX_ITER: usize = 2_000;

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootResult {
    pub x: f64,
    pub f_x: f64,
    pub iterations: usize,
    /// Last bracket straddling the sign change; `x` is its midpoint.
    pub bracket: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub f_x: f64,
    pub iterations: usize,
    pub diameter: f64,
}

/// `points` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && points >= 2);
    let (llo, lhi) = (lo.ln(), hi.ln());
    let step = (lhi - llo) / (points - 1) as f64;
    let mut grid: Vec<f64> = (0..points).map(|i| (llo + step * i as f64).exp()).collect();
    grid[0] = lo;
    grid[points - 1] = hi;
    grid
}

/// First pair of consecutive log-spaced grid points on `[lo, hi]` where `f`
/// has opposite signs. Points where `f` is zero or not finite are skipped.
pub fn bracket_scan<F>(f: F, lo: f64, hi: f64, points: usize) -> Option<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let mut prev: Option<(f64, f64)> = None;
    for x in log_grid(lo, hi, points) {
        let fx = f(x);
        if !fx.is_finite() || fx == 0.0 {
            continue;
        }
        if let Some((px, pf)) = prev {
            if (pf < 0.0) != (fx < 0.0) {
                return Some((px, x));
            }
        }
        prev = Some((x, fx));
    }
    None
}

/// Bisection on a sign-changing bracket. Stops when `|f(x)| <= tol` or the
/// half-width falls to `tol * max(1, |x|)`.
pub fn bisect<F>(f: F, bracket: (f64, f64), tol: f64) -> Result<RootResult>
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = bracket;
    let (mut fa, fb) = (f(a), f(b));
    if !(fa.is_finite() && fb.is_finite()) {
        return Err(Error::Degenerate("objective is not finite at the bracket ends".into()));
    }
    if fa == 0.0 {
        return Ok(RootResult {
            x: a,
            f_x: fa,
            iterations: 0,
            bracket,
        });
    }
    if fb == 0.0 {
        return Ok(RootResult {
            x: b,
            f_x: fb,
            iterations: 0,
            bracket,
        });
    }
    if (fa < 0.0) == (fb < 0.0) {
        return Err(Error::NoBracket);
    }
    for iterations in 1..=BISECT_MAX_ITER {
        let m = a + 0.5 * (b - a);
        let fm = f(m);
        if !fm.is_finite() {
            return Err(Error::Degenerate(format!("objective is not finite at {m}")));
        }
        let half_width = 0.5 * (b - a).abs();
        if fm == 0.0 || fm.abs() <= tol || half_width <= tol * m.abs().max(1.0) || m == a || m == b {
            return Ok(RootResult {
                x: m,
                f_x: fm,
                iterations,
                bracket: (a, b),
            });
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Err(Error::NonConvergence {
        iterations: BISECT_MAX_ITER,
        residual: (b - a).abs(),
    })
}

fn eval<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64]) -> f64 {
    let v = f(x);
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

fn diameter(simplex: &[(Vec<f64>, f64)]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, (xi, _)) in simplex.iter().enumerate() {
        for (xj, _) in &simplex[i + 1..] {
            let dist = xi.iter().zip(xj).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            d = d.max(dist);
        }
    }
    d
}

/// Point `c + t * (x - c)`.
fn along(c: &[f64], x: &[f64], t: f64) -> Vec<f64> {
    c.iter().zip(x).map(|(ci, xi)| ci + t * (xi - ci)).collect()
}

/// Nelder–Mead simplex minimization with the standard coefficients.
///
/// The initial simplex is `x0` plus `x0 + step * e_i` for each axis. NaN
/// objective values are treated as `+inf`. Terminates when the largest
/// vertex distance is at most `tol`; reaching `cap` iterations first is
/// reported as [`Error::NonConvergence`].
pub fn nelder_mead<F>(f: F, x0: &[f64], step: f64, tol: f64, cap: usize) -> Result<SimplexResult>
where
    F: Fn(&[f64]) -> f64,
{
    let dim = x0.len();
    assert!(dim >= 1, "Nelder–Mead needs at least one coordinate");

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.to_vec(), eval(&f, x0)));
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] += step;
        let fx = eval(&f, &x);
        simplex.push((x, fx));
    }
    if simplex.iter().any(|(_, fx)| !fx.is_finite()) {
        return Err(Error::Degenerate(
            "objective is not finite on the initial simplex".into(),
        ));
    }

    let mut iterations = 0;
    loop {
        // stable: on ties the earlier vertex stays ahead
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diam = diameter(&simplex);
        if diam <= tol {
            let (x, f_x) = simplex.swap_remove(0);
            return Ok(SimplexResult {
                x,
                f_x,
                iterations,
                diameter: diam,
            });
        }
        if iterations == cap {
            return Err(Error::NonConvergence {
                iterations,
                residual: simplex[0].1,
            });
        }
        iterations += 1;

        let mut centroid = vec![0.0; dim];
        for (x, _) in &simplex[..dim] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / dim as f64;
            }
        }
        let f_best = simplex[0].1;
        let f_second_worst = simplex[dim - 1].1;
        let (worst, f_worst) = simplex[dim].clone();

        let reflected = along(&centroid, &worst, -REFLECT);
        let f_reflected = eval(&f, &reflected);

        if f_reflected < f_best {
            let expanded = along(&centroid, &worst, -EXPAND);
            let f_expanded = eval(&f, &expanded);
            simplex[dim] = if f_expanded < f_reflected {
                (expanded, f_expanded)
            } else {
                (reflected, f_reflected)
            };
            continue;
        }
        if f_reflected < f_second_worst {
            simplex[dim] = (reflected, f_reflected);
            continue;
        }
        if f_reflected < f_worst {
            let outside = along(&centroid, &reflected, CONTRACT);
            let f_outside = eval(&f, &outside);
            if f_outside <= f_reflected {
                simplex[dim] = (outside, f_outside);
                continue;
            }
        } else {
            let inside = along(&centroid, &worst, CONTRACT);
            let f_inside = eval(&f, &inside);
            if f_inside < f_worst {
                simplex[dim] = (inside, f_inside);
                continue;
            }
        }

        let best = simplex[0].0.clone();
        for (x, fx) in simplex.iter_mut().skip(1) {
            *x = along(&best, x, SHRINK);
            *fx = eval(&f, x);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::SQRT_2;

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(1e-3, 1e3, 200);
        assert_eq!(g.len(), 200);
        assert_eq!(g[0], 1e-3);
        assert_eq!(g[199], 1e3);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn bracket_scan_examples() {
        let (a, b) = bracket_scan(|x| x - 1.0, 0.1, 10.0, 50).unwrap();
        assert!(a < 1.0 && 1.0 < b);
        assert!(bracket_scan(|x| x * x + 1.0, 0.1, 10.0, 50).is_none());
    }

    #[test]
    fn bracket_scan_skips_non_finite() {
        let f = |x: f64| if (0.9..1.1).contains(&x) { f64::NAN } else { x - 1.0 };
        let (a, b) = bracket_scan(f, 0.1, 10.0, 50).unwrap();
        assert!(a < 0.9 && b >= 1.1);
    }

    #[test]
    fn bisect_examples() {
        let r = bisect(|x| x * x - 2.0, (1.0, 2.0), 1e-12).unwrap();
        assert!((r.x - SQRT_2).abs() <= 1e-12);
        let r = bisect(|x| x, (-1.0, 1.0), 1e-12).unwrap();
        assert_eq!(r.x, 0.0);
        let r = bisect(|x| 2.0 - x * x, (2.0, 1.0), 1e-12).unwrap();
        assert!((r.x - SQRT_2).abs() <= 1e-12);
    }

    #[test]
    fn bisect_rejects_invalid_bracket() {
        assert_eq!(bisect(|x| x * x + 1.0, (-1.0, 1.0), 1e-9), Err(Error::NoBracket));
        assert!(bisect(|_| f64::NAN, (-1.0, 1.0), 1e-9).is_err());
    }

    #[test]
    fn bisect_iteration_bound() {
        let tol = 1e-12;
        for (lo, hi, root) in [(0.0, 1.0, 0.3), (-5.0, 40.0, 3.7), (0.5, 0.6, 0.512345)] {
            let r = bisect(|x| x - root, (lo, hi), tol).unwrap();
            let bound = ((hi - lo) / tol).log2().ceil() as usize + 2;
            assert!(r.iterations <= bound, "{} > {bound}", r.iterations);
            let ulps = 4.0 * f64::EPSILON * lo.abs().max(hi.abs());
            assert!((r.bracket.1 - r.bracket.0).abs() <= (hi - lo) / 2f64.powi(r.iterations as i32 - 1) + ulps);
        }
    }

    #[test]
    fn nelder_mead_quadratic_bowl() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + (x[1] + 2.0).powi(2);
        let r = nelder_mead(f, &[0.0, 0.0], 0.5, 1e-10, 2000).unwrap();
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] + 2.0).abs() < 1e-6, "{:?}", r.x);
        assert!(r.diameter <= 1e-10);
    }

    #[test]
    fn nelder_mead_constant_objective_collapses_on_start() {
        let r = nelder_mead(|_| 3.0, &[0.25, -1.5], 0.5, 1e-10, 2000).unwrap();
        assert_eq!(r.x, vec![0.25, -1.5]);
        assert_eq!(r.f_x, 3.0);
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let f = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        let r = nelder_mead(f, &[-1.2, 1.0], 0.5, 1e-12, 5000).unwrap();
        assert!((r.x[0] - 1.0).abs() < 1e-5 && (r.x[1] - 1.0).abs() < 1e-5, "{:?}", r.x);
    }

    #[test]
    fn nelder_mead_reports_cap() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + (x[1] + 2.0).powi(2);
        assert!(matches!(
            nelder_mead(f, &[0.0, 0.0], 0.5, 1e-10, 5),
            Err(Error::NonConvergence { iterations: 5, .. })
        ));
    }

    #[test]
    fn nelder_mead_rejects_non_finite_start() {
        let f = |x: &[f64]| if x[0] > 0.1 { f64::INFINITY } else { 0.0 };
        assert!(matches!(
            nelder_mead(f, &[0.0, 0.0], 0.5, 1e-10, 10),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn nelder_mead_never_worse_than_best_seen() {
        use std::cell::Cell;
        let best_seen = Cell::new(f64::INFINITY);
        let f = |x: &[f64]| {
            let v = (x[0] - 0.3).abs().powf(1.5) + 4.0 * (x[1] - x[0]).powi(2) + (3.0 * x[1]).sin() * 0.1;
            best_seen.set(best_seen.get().min(v));
            v
        };
        let r = nelder_mead(f, &[2.0, -1.0], 0.7, 1e-9, 2000).unwrap();
        assert!(r.f_x <= best_seen.get());
    }
}
