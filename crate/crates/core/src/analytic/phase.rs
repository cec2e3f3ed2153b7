use std::f64::consts::TAU;

use serde::Serialize;

use super::kernel::{periodic_kernel_antiderivative, poisson_kernel_periodic};
use super::{golden_max, refine_until_stable, relative_change, Refined};
use crate::error::{Error, Result};
use crate::spectra::{PeriodicSpectrum, PerturbationSpec};

/// Simpson panels per grid cell.
const PANELS_PER_CELL: usize = 8;

/// Samples of `alpha(x) = 2 int_0^x sum_lambda y/((t - lambda)^2 + y^2) dt - 2 pi x`
/// at `x_i = i P / G`, `i = 0..=G`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseGrid {
    pub period: f64,
    pub y: f64,
    pub grid_size: usize,
    pub samples: Vec<f64>,
    pub quadrature: &'static str,
}

impl PhaseGrid {
    pub fn step(&self) -> f64 {
        self.period / self.grid_size as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.step()
    }

    /// `alpha(P) - alpha(0)`; zero for spectra with one point per unit length.
    pub fn period_drift(&self) -> f64 {
        self.samples[self.grid_size] - self.samples[0]
    }

    /// Linear interpolation, extended periodically.
    pub fn value_at(&self, x: f64) -> f64 {
        let g = self.grid_size;
        let u = (x / self.period).rem_euclid(1.0) * g as f64;
        let i = (u.floor() as usize).min(g - 1);
        let t = u - i as f64;
        self.samples[i] * (1.0 - t) + self.samples[i + 1] * t
    }
}

/// Phase function of the shifted spectrum on one period. The kernel sum over
/// each residue class is the periodic closed form; its integral is composite
/// Simpson with `8 * grid_size` panels.
pub fn phase_alpha(spec: &PeriodicSpectrum, y: f64, grid_size: usize) -> Result<PhaseGrid> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::invalid(format!("y = {y} must be positive")));
    }
    if grid_size < 2 {
        return Err(Error::invalid(format!(
            "grid_size = {grid_size} is too small"
        )));
    }
    let period = spec.period();
    let centers = spec.points_in_period();
    let kernel = |t: f64| -> f64 {
        centers
            .iter()
            .map(|c| poisson_kernel_periodic(t - c, y, period).expect("validated"))
            .sum()
    };
    let h = period / grid_size as f64;
    let ph = h / PANELS_PER_CELL as f64;
    let mut samples = Vec::with_capacity(grid_size + 1);
    samples.push(0.0);
    let mut integral = 0.0;
    let mut left = kernel(0.0);
    for i in 0..grid_size {
        let x0 = i as f64 * h;
        let mut cell = left;
        for k in 1..PANELS_PER_CELL {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            cell += w * kernel(x0 + k as f64 * ph);
        }
        let right = kernel(x0 + h);
        cell += right;
        integral += cell * ph / 3.0;
        left = right;
        let x = (i + 1) as f64 * h;
        samples.push(2.0 * integral - TAU * x);
    }
    Ok(PhaseGrid {
        period,
        y,
        grid_size,
        samples,
        quadrature: "composite_simpson",
    })
}

/// Location and size of `sup_x |sum_n int_x^{x + mu_n} y/((n - t)^2 + y^2) dt|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauSup {
    pub value: f64,
    pub argmax: f64,
}

fn tau_integrand(d: f64, mu: &[f64], y: f64, x: f64) -> f64 {
    mu.iter()
        .enumerate()
        .map(|(r, m)| {
            let s = x - r as f64;
            periodic_kernel_antiderivative(s + m, y, d).expect("validated")
                - periodic_kernel_antiderivative(s, y, d).expect("validated")
        })
        .sum()
}

/// `tau_y` for a `d`-periodic displacement pattern on `Z`. Residue class `r`
/// contributes exactly through the antiderivative of the period-`d` kernel,
/// so the sum over `n` has no truncation; the supremum is taken on a grid of
/// one period followed by a golden-section pass.
pub fn tau_sup(d: usize, pert: &PerturbationSpec, y: f64, grid_size: usize) -> Result<TauSup> {
    if d == 0 || pert.d() != d {
        return Err(Error::invalid(format!(
            "perturbation has {} entries, expected d = {d}",
            pert.d()
        )));
    }
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::invalid(format!("y = {y} must be positive")));
    }
    if grid_size < 2 {
        return Err(Error::invalid(format!(
            "grid_size = {grid_size} is too small"
        )));
    }
    let df = d as f64;
    let h = df / grid_size as f64;
    let f = |x: f64| tau_integrand(df, &pert.mu, y, x).abs();
    let (mut ibest, mut vbest) = (0, f(0.0));
    for i in 1..grid_size {
        let v = f(i as f64 * h);
        if v > vbest {
            ibest = i;
            vbest = v;
        }
    }
    let xb = ibest as f64 * h;
    let (xr, vr) = golden_max(f, xb - h, xb + h);
    Ok(if vr > vbest {
        TauSup {
            value: vr,
            argmax: xr.rem_euclid(df),
        }
    } else {
        TauSup {
            value: vbest,
            argmax: xb,
        }
    })
}

/// [`tau_sup`] with the grid doubled from `grid_size` until stable.
pub fn tau_sup_stable(
    d: usize,
    pert: &PerturbationSpec,
    y: f64,
    grid_size: usize,
) -> Result<Refined<TauSup>> {
    tau_sup(d, pert, y, 2)?;
    Ok(refine_until_stable(
        grid_size,
        |g| tau_sup(d, pert, y, g).expect("validated above"),
        |a, b| relative_change(a.value, b.value),
    ))
}
