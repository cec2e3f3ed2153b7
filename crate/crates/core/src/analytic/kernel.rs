use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

fn check(y: f64, period: f64) -> Result<()> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::invalid(format!("y = {y} must be positive")));
    }
    if !(period > 0.0) || !period.is_finite() {
        return Err(Error::invalid(format!(
            "period = {period} must be positive"
        )));
    }
    Ok(())
}

/// `sum_n y / ((t - nP)^2 + y^2)` in closed form,
/// `(pi/P)(1 - q^2) / |1 - q e^{2 pi i t / P}|^2` with `q = e^{-2 pi y / P}`.
pub fn poisson_kernel_periodic(t: f64, y: f64, period: f64) -> Result<f64> {
    check(y, period)?;
    let a = TAU * y / period;
    let q = (-a).exp();
    let one_minus_q = -(-a).exp_m1();
    let one_minus_q2 = -(-2.0 * a).exp_m1();
    let half_angle = PI * t / period;
    let denom = one_minus_q * one_minus_q + 4.0 * q * half_angle.sin().powi(2);
    Ok(PI / period * one_minus_q2 / denom)
}

/// Antiderivative of [`poisson_kernel_periodic`] in `t`:
/// `pi t / P + atan2(q sin(2 pi t/P), 1 - q cos(2 pi t/P))`.
///
/// Continuous in `t`; the increment over one period is `pi`.
pub fn periodic_kernel_antiderivative(t: f64, y: f64, period: f64) -> Result<f64> {
    check(y, period)?;
    let q = (-TAU * y / period).exp();
    let theta = TAU * (t / period).fract();
    Ok(PI * t / period + (q * theta.sin()).atan2(1.0 - q * theta.cos()))
}

/// Direct sum over `|n| <= terms`.
pub fn poisson_kernel_truncated(t: f64, y: f64, period: f64, terms: usize) -> Result<f64> {
    check(y, period)?;
    let mut sum = y / (t * t + y * y);
    for n in 1..=terms {
        let s = n as f64 * period;
        sum += y / ((t - s).powi(2) + y * y) + y / ((t + s).powi(2) + y * y);
    }
    Ok(sum)
}

/// Bound on the terms `|n| > terms` dropped by
/// [`poisson_kernel_truncated`], valid for `terms * P > |t|`:
/// `2 y / (P (terms P - |t|))`.
pub fn truncation_tail_bound(t: f64, y: f64, period: f64, terms: usize) -> f64 {
    let r = terms as f64 * period - t.abs();
    2.0 * y / (period * r)
}
