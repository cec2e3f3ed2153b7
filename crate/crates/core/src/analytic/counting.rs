use std::f64::consts::{PI, TAU};

use serde::Serialize;

use super::phase::phase_alpha;
use crate::error::{Error, Result};
use crate::spectra::PeriodicSpectrum;

/// Exact convolution extends this many periods past the window; beyond that
/// `psi` is replaced by its periodic mean.
const TAIL_PERIODS: f64 = 32.0;

/// `N(t) = #{lambda in [0, t]}` for `t >= 0` and `-#{lambda in [t, 0)}` for
/// `t < 0`.
pub fn counting_function(spec: &PeriodicSpectrum, t: f64) -> i64 {
    let p = spec.period();
    spec.points_in_period()
        .iter()
        .map(|g| {
            let u = (t - g) / p;
            if t >= 0.0 {
                (u.floor() as i64 + 1).max(0)
            } else {
                (u.ceil() as i64).min(0)
            }
        })
        .sum()
}

/// `N` and `psi(x) = 2 pi (x - N(x))` sampled on `[-W, W]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountingGrid {
    pub window: f64,
    pub step: f64,
    pub x: Vec<f64>,
    pub n_values: Vec<i64>,
    pub psi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountingDiagnostic {
    pub grid: CountingGrid,
    /// `min_c max |P_y[psi](x) + alpha(x) - c|` over `[-W/2, W/2]`.
    pub consistency_residual: f64,
    /// The fitted `c`.
    pub constant: f64,
}

/// Normalized Poisson extension of `psi` at `x`. Between consecutive points
/// `psi` is linear, so each piece integrates in closed form; past
/// `[-D, D]` the periodic mean of `psi` is used.
fn poisson_extension(points: &[f64], n_start: i64, far: f64, mean: f64, y: f64, x: f64) -> f64 {
    let mut total = 0.0;
    let mut n = n_start;
    let atan = |s: f64| ((s - x) / y).atan();
    let mut atan_a = atan(-far);
    for (i, b) in points
        .iter()
        .copied()
        .chain(std::iter::once(far))
        .enumerate()
    {
        let atan_b = atan(b);
        total += 2.0 * (x - n as f64) * (atan_b - atan_a);
        atan_a = atan_b;
        if i < points.len() {
            n += 1;
        }
    }
    // linear part of each piece integrates to y * log((b-x)^2 + y^2), which telescopes
    total += y * (((far - x).powi(2) + y * y).ln() - ((far + x).powi(2) + y * y).ln());
    let outside = ((y / (far - x)).atan() + (y / (far + x)).atan()) / PI;
    total + mean * outside
}

/// Compares the Poisson extension of `psi = 2 pi (x - N)` with the phase
/// function `alpha`; they agree up to an additive constant, fitted here.
pub fn counting_diagnostic(
    spec: &PeriodicSpectrum,
    y: f64,
    window: f64,
    grid_size: usize,
) -> Result<CountingDiagnostic> {
    let p = spec.period();
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::invalid(format!("y = {y} must be positive")));
    }
    if !(window >= 4.0 * p) || !window.is_finite() {
        return Err(Error::invalid(format!(
            "window W = {window} must cover at least 4 periods (period {p})"
        )));
    }
    if grid_size < 4 {
        return Err(Error::invalid(format!(
            "grid_size = {grid_size} is too small"
        )));
    }
    let step = window / grid_size as f64;
    let x: Vec<f64> = (0..=2 * grid_size)
        .map(|i| -window + i as f64 * step)
        .collect();
    let n_values: Vec<i64> = x.iter().map(|t| counting_function(spec, *t)).collect();
    let psi = x
        .iter()
        .zip(&n_values)
        .map(|(t, n)| TAU * (t - *n as f64))
        .collect();

    let far = window + TAIL_PERIODS * p;
    let points: Vec<f64> = spec
        .points_between(-far, far)
        .into_iter()
        .filter(|t| *t > -far && *t < far)
        .collect();
    let first = points.first().copied().unwrap_or(far);
    let n_start = counting_function(spec, 0.5 * (first - far));
    let gens = spec.points_in_period();
    let mean = TAU * (gens.iter().sum::<f64>() / gens.len() as f64 - p / 2.0);

    let alpha = phase_alpha(spec, y, grid_size)?;
    let lo = grid_size / 2;
    let hi = 3 * grid_size / 2;
    let diffs: Vec<f64> = (lo..=hi)
        .map(|i| poisson_extension(&points, n_start, far, mean, y, x[i]) + alpha.value_at(x[i]))
        .collect();
    let max = diffs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = diffs.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(CountingDiagnostic {
        grid: CountingGrid {
            window,
            step,
            x,
            n_values,
            psi,
        },
        consistency_residual: 0.5 * (max - min),
        constant: 0.5 * (max + min),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn counting_function_of_integers() {
        let z = PeriodicSpectrum::from_points(1, &[0.0]).unwrap();
        assert_eq!(counting_function(&z, 0.0), 1);
        assert_eq!(counting_function(&z, -1e-9), 0);
        assert_eq!(counting_function(&z, 2.5), 3);
        assert_eq!(counting_function(&z, -0.5), 0);
        assert_eq!(counting_function(&z, -1.0), -1);
        assert_eq!(counting_function(&z, -1.5), -1);
        assert_eq!(counting_function(&z, -2.0), -2);
    }

    #[test]
    fn counting_function_matches_direct_count() {
        let spec = PeriodicSpectrum::from_points(3, &[0.4, 1.2, 2.9]).unwrap();
        let pts = spec.points_between(-40.0, 40.0);
        for i in 0..400 {
            let t = -30.0 + 0.151 * i as f64;
            let direct = if t >= 0.0 {
                pts.iter().filter(|l| **l >= 0.0 && **l <= t).count() as i64
            } else {
                -(pts.iter().filter(|l| **l >= t && **l < 0.0).count() as i64)
            };
            assert_eq!(counting_function(&spec, t), direct, "t = {t}");
        }
    }

    #[test]
    fn steps_sit_at_spectrum_points() {
        let spec = PeriodicSpectrum::from_points(2, &[0.3, 1.6]).unwrap();
        let d = counting_diagnostic(&spec, 1.0, 8.0, 256).unwrap();
        let g = &d.grid;
        for w in g.n_values.windows(2) {
            assert!(w[1] >= w[0]);
        }
        for i in 1..g.x.len() {
            let jumps = g.n_values[i] - g.n_values[i - 1];
            let inside = spec
                .points_between(g.x[i - 1], g.x[i])
                .iter()
                .filter(|l| **l > g.x[i - 1])
                .count() as i64;
            assert_eq!(jumps, inside);
        }
        let bound = TAU * (2.0 + 1.0);
        assert!(g.psi.iter().all(|v| v.abs() <= bound));
    }

    #[test]
    fn extension_of_a_constant_is_constant() {
        // no points: N is constant on the window and the mean carries the rest
        let v = poisson_extension(&[], 0, 50.0, -3.0, 1.0, 0.0);
        // 2 pi x integrates to zero at x = 0 by symmetry
        let inside = 2.0 * (50.0f64).atan() * 0.0;
        let outside = 2.0 * (1.0f64 / 50.0).atan() / PI;
        assert_abs_diff_eq!(v, inside - 3.0 * outside, epsilon = 1e-14);
    }

    #[test]
    fn integers_are_consistent() {
        let z = PeriodicSpectrum::from_points(1, &[0.0]).unwrap();
        let d = counting_diagnostic(&z, 1.0, 16.0, 4096).unwrap();
        assert!(d.consistency_residual < 1e-2, "{}", d.consistency_residual);
    }

    #[test]
    fn rejects_small_window() {
        let spec = PeriodicSpectrum::from_points(4, &[0.0, 1.0, 2.0, 3.0]).unwrap();
        assert!(counting_diagnostic(&spec, 1.0, 15.0, 256).is_err());
        assert!(counting_diagnostic(&spec, 0.0, 16.0, 256).is_err());
    }
}
