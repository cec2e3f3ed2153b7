use std::f64::consts::TAU;

use serde::Serialize;

use super::{golden_max, refine_until_stable, relative_change, Refined, DEFAULT_GRID_SIZE};
use crate::error::{Error, Result};
use crate::spectra::PeriodicSpectrum;

/// Smallest accepted grid.
pub const MIN_GRID_SIZE: usize = 256;

/// Generator of a sampled weight, kept so extrema can be refined off-grid.
#[derive(Debug, Clone, PartialEq)]
struct ProductSource {
    centers: Vec<f64>,
    y: f64,
}

impl ProductSource {
    fn log_eval(&self, period: f64, x: f64) -> f64 {
        let a = TAU * self.y / period;
        let q = (-a).exp();
        let one_minus_q = -(-a).exp_m1();
        self.centers
            .iter()
            .map(|c| {
                let s = (std::f64::consts::PI * (x - c) / period).sin();
                // |1 - q e^{i phi}|^2 = (1-q)^2 + 4 q sin^2(phi/2)
                (one_minus_q * one_minus_q + 4.0 * q * s * s).ln()
            })
            .sum()
    }
}

/// Positive periodic weight sampled at `x_i = i P / G`, `i = 0..G-1`.
///
/// Values are stored up to a common positive constant; every quantity
/// derived from a grid (`m/M`, the A2 estimate) is invariant under scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightGrid {
    period: f64,
    samples: Vec<f64>,
    source: Option<ProductSource>,
}

impl WeightGrid {
    pub fn from_samples(period: f64, samples: Vec<f64>) -> Result<Self> {
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::invalid(format!(
                "period = {period} must be positive"
            )));
        }
        check_grid_size(samples.len())?;
        if let Some(i) = samples.iter().position(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::invalid(format!(
                "weight sample {i} = {} is not a positive number",
                samples[i]
            )));
        }
        Ok(Self {
            period,
            samples,
            source: None,
        })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn grid_size(&self) -> usize {
        self.samples.len()
    }

    pub fn step(&self) -> f64 {
        self.period / self.samples.len() as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.step()
    }

    /// Weight at an arbitrary point: exact when the grid came from a
    /// spectrum, periodic linear interpolation otherwise.
    pub fn value_at(&self, x: f64) -> f64 {
        if let Some(src) = &self.source {
            return src.log_eval(self.period, x).exp();
        }
        let g = self.samples.len();
        let u = (x / self.period).rem_euclid(1.0) * g as f64;
        let i = (u.floor() as usize).min(g - 1);
        let t = u - i as f64;
        self.samples[i] * (1.0 - t) + self.samples[(i + 1) % g] * t
    }
}

pub(crate) fn check_grid_size(g: usize) -> Result<()> {
    if g < MIN_GRID_SIZE || !g.is_power_of_two() {
        return Err(Error::invalid(format!(
            "grid_size = {g} must be a power of two and at least {MIN_GRID_SIZE}"
        )));
    }
    Ok(())
}

/// `w(x) = prod_k |1 - e^{(2 pi i / K)(x + iy - x_k)}|^2` over the generators
/// `x_k` of one period; equals the generating-function weight up to a
/// positive constant.
pub fn periodic_weight(spec: &PeriodicSpectrum, y: f64, grid_size: usize) -> Result<WeightGrid> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::invalid(format!("y = {y} must be positive")));
    }
    check_grid_size(grid_size)?;
    let period = spec.period();
    let source = ProductSource {
        centers: spec.points_in_period(),
        y,
    };
    let h = period / grid_size as f64;
    let samples = (0..grid_size)
        .map(|i| source.log_eval(period, i as f64 * h).exp())
        .collect();
    Ok(WeightGrid {
        period,
        samples,
        source: Some(source),
    })
}

/// Minimum and maximum of the weight; raw values are defined up to the
/// same positive constant as the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightExtrema {
    pub m: f64,
    pub big_m: f64,
}

impl WeightExtrema {
    pub fn ratio(&self) -> f64 {
        self.m / self.big_m
    }
}

/// Grid extrema, each polished by one golden-section pass over the two
/// cells around the extremal sample.
pub fn weight_extrema(w: &WeightGrid) -> WeightExtrema {
    let g = w.grid_size();
    let (mut imin, mut imax) = (0, 0);
    for (i, v) in w.samples.iter().enumerate() {
        if *v < w.samples[imin] {
            imin = i;
        }
        if *v > w.samples[imax] {
            imax = i;
        }
    }
    let mut m = w.samples[imin];
    let mut big_m = w.samples[imax];
    if w.source.is_some() && g > 1 {
        let h = w.step();
        let xi = w.x(imin);
        let (_, neg) = golden_max(|x| -w.value_at(x), xi - h, xi + h);
        m = m.min(-neg);
        let xa = w.x(imax);
        let (_, top) = golden_max(|x| w.value_at(x), xa - h, xa + h);
        big_m = big_m.max(top);
    }
    WeightExtrema { m, big_m }
}

/// Extrema of the spectrum weight with the grid doubled from the default
/// until `m/M` settles.
pub fn stable_weight_extrema(spec: &PeriodicSpectrum, y: f64) -> Result<Refined<WeightExtrema>> {
    periodic_weight(spec, y, MIN_GRID_SIZE)?;
    Ok(refine_until_stable(
        DEFAULT_GRID_SIZE,
        |g| weight_extrema(&periodic_weight(spec, y, g).expect("validated above")),
        |a, b| relative_change(a.ratio(), b.ratio()),
    ))
}

/// Lower estimate of `sup_I |I|^{-2} int_I w int_I 1/w` over intervals of
/// `2^j` grid cells at every grid position, `2^j` up to
/// `max_scale_periods` periods. Cell integrals use the trapezoid rule.
pub fn a2_constant(w: &WeightGrid, max_scale_periods: f64) -> Result<f64> {
    if !(max_scale_periods > 0.0) || !max_scale_periods.is_finite() {
        return Err(Error::invalid(format!(
            "max_scale_periods = {max_scale_periods} must be positive"
        )));
    }
    let g = w.grid_size();
    let h = w.step();
    let max_cells = (max_scale_periods * g as f64).floor().max(1.0) as usize;
    let cell = |f: &dyn Fn(f64) -> f64| -> Vec<f64> {
        (0..g)
            .map(|i| 0.5 * h * (f(w.samples[i]) + f(w.samples[(i + 1) % g])))
            .collect()
    };
    // windows of 2^j cells starting at every position, built by doubling
    let mut sw = cell(&|v| v);
    let mut sinv = cell(&|v| 1.0 / v);
    let mut len = 1usize;
    let mut best = 1.0f64;
    loop {
        let width = len as f64 * h;
        for i in 0..g {
            best = best.max(sw[i] * sinv[i] / (width * width));
        }
        if len * 2 > max_cells {
            break;
        }
        let shift = len % g;
        sw = (0..g).map(|i| sw[i] + sw[(i + shift) % g]).collect();
        sinv = (0..g).map(|i| sinv[i] + sinv[(i + shift) % g]).collect();
        len *= 2;
    }
    Ok(best)
}
