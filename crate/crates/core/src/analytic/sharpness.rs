use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectra::{NodeSet, PeriodicSpectrum};
use crate::vandermonde::exact_bounds;

/// Truncation radius of the `phi_L` sum, in units of `L`.
const PHI_RADIUS_FACTOR: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiDecay {
    pub l: usize,
    /// `sum |phi_L(lambda)|^2` over `|lambda| <= 1e4 L`.
    pub s_l: f64,
    /// Upper bound on the dropped terms.
    pub tail: f64,
    pub a_exact: f64,
    /// `8 / pi^L`.
    pub decay_bound: f64,
    pub pass: bool,
}

/// `phi_L(x) = (L sin(pi x / L) / (pi x))^L`.
pub fn phi_l(l: usize, x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let lf = l as f64;
    (lf * (PI * x / lf).sin() / (PI * x)).powi(l as i32)
}

/// Generators of the `4L`-periodic set `{L, L + 1/2, ..., 3L - 1/2}`.
pub fn phi_generators(l: usize) -> Vec<f64> {
    (0..4 * l).map(|k| l as f64 + 0.5 * k as f64).collect()
}

/// Checks `A(Lambda_L) <= S_L <= 8 / pi^L` up to the truncation tail.
pub fn phi_decay_check(l: usize) -> Result<PhiDecay> {
    if !(2..=8).contains(&l) {
        return Err(Error::invalid(format!("L = {l} must lie in 2..=8")));
    }
    let lf = l as f64;
    let period = 4.0 * lf;
    let radius = PHI_RADIUS_FACTOR * lf;
    let gens = phi_generators(l);
    let reps = (radius / period).ceil() as i64 + 1;
    let mut s_l = 0.0;
    for m in -reps..=reps {
        for g in &gens {
            let lam = g + m as f64 * period;
            if lam.abs() <= radius {
                s_l += phi_l(l, lam).powi(2);
            }
        }
    }
    // points have spacing 1/2, so per side sum_{lambda > R} lambda^{-2L}
    // <= R^{-2L} + 2 R^{1-2L} / (2L - 1)
    let two_l = 2.0 * lf;
    let side = radius.powf(-two_l) + 2.0 * radius.powf(1.0 - two_l) / (two_l - 1.0);
    let tail = (lf / PI).powf(two_l) * 2.0 * side;
    let nodes = NodeSet::new(gens.iter().map(|g| g / period).collect::<Vec<_>>())?;
    let a_exact = exact_bounds(&nodes)?.a;
    let decay_bound = 8.0 / PI.powi(l as i32);
    Ok(PhiDecay {
        l,
        s_l,
        tail,
        a_exact,
        decay_bound,
        pass: a_exact <= s_l + tail && s_l <= decay_bound + tail,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NuCheck {
    pub max_abs_nu: f64,
    /// Largest value of `nu_y`; never positive.
    pub max_nu: f64,
    pub bound: f64,
    /// Grid points skipped because they sit on the spectrum.
    pub skipped: usize,
    pub pass: bool,
}

/// `2 pi y (delta^2 + 4 y^2) / delta^3`.
pub fn nu_bound_value(delta: f64, y: f64) -> f64 {
    2.0 * PI * y * (delta * delta + 4.0 * y * y) / delta.powi(3)
}

/// `nu_y(x) = sum_{lambda != lambda_0} log(1 - y^2 / ((lambda - x)^2 + y^2))`
/// through the periodic sine product.
fn nu_at(gens: &[f64], period: f64, y: f64, x: f64) -> Option<f64> {
    let sh2 = (PI * y / period).sinh().powi(2);
    let offsets: Vec<f64> = gens
        .iter()
        .map(|g| {
            let u = (x - g).rem_euclid(period);
            if u > 0.5 * period {
                u - period
            } else {
                u
            }
        })
        .collect();
    let nearest = (0..gens.len()).min_by(|a, b| offsets[*a].abs().total_cmp(&offsets[*b].abs()))?;
    let u0 = offsets[nearest];
    if u0.abs() < 1e-12 {
        return None;
    }
    let mut nu = 0.0;
    for (k, u) in offsets.iter().enumerate() {
        let s = (PI * u / period).sin();
        let s2 = s * s;
        if k == nearest {
            // remove the single factor u0^2 / (u0^2 + y^2) without cancellation
            nu += (s2 / (u0 * u0)).ln() + ((u0 * u0 + y * y) / (s2 + sh2)).ln();
        } else {
            nu += (s2 / (s2 + sh2)).ln();
        }
    }
    Some(nu)
}

/// Sup norm of `nu_y` on a grid of one period, against its bound.
pub fn nu_bound_check(spec: &PeriodicSpectrum, y: f64, grid: usize) -> Result<NuCheck> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::invalid(format!("y = {y} must be positive")));
    }
    if grid == 0 {
        return Err(Error::invalid("grid must be positive"));
    }
    let period = spec.period();
    let gens = spec.points_in_period();
    let h = period / grid as f64;
    let mut max_abs_nu = 0.0f64;
    let mut max_nu = f64::NEG_INFINITY;
    let mut skipped = 0;
    for i in 0..grid {
        match nu_at(&gens, period, y, i as f64 * h) {
            Some(nu) => {
                max_abs_nu = max_abs_nu.max(nu.abs());
                max_nu = max_nu.max(nu);
            }
            None => skipped += 1,
        }
    }
    let bound = nu_bound_value(spec.separation(), y);
    Ok(NuCheck {
        max_abs_nu,
        max_nu,
        bound,
        skipped,
        pass: max_abs_nu <= bound + 1e-6 && max_nu <= 1e-12,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn phi_values() {
        for l in 2..=8 {
            assert_eq!(phi_l(l, 0.0), 1.0);
            for k in [1i32, 2, 3, -1, -2] {
                assert!(phi_l(l, (k * l as i32) as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn small_l_decay_values() {
        let two = phi_decay_check(2).unwrap();
        assert!(two.pass);
        assert!(two.s_l <= 8.0 / PI.powi(2));
        assert_relative_eq!(
            two.decay_bound,
            0.810_569_469_138_702_2,
            max_relative = 1e-12
        );
        let three = phi_decay_check(3).unwrap();
        assert!(three.pass);
        assert!(three.s_l <= 0.2581);
        assert!(phi_decay_check(1).is_err());
        assert!(phi_decay_check(9).is_err());
    }

    #[test]
    fn phi_sum_against_direct_half_grid() {
        // all points of Lambda_2 lie on the half-integer grid
        let l = 2;
        let p = 8.0;
        let mut direct = 0.0;
        for j in -200_000i64..=200_000 {
            let lam = 0.5 * j as f64;
            let r = lam.rem_euclid(p);
            if (2.0..6.0).contains(&r) {
                direct += phi_l(l, lam).powi(2);
            }
        }
        let c = phi_decay_check(l).unwrap();
        assert!((c.s_l - direct).abs() <= 10.0 * c.tail + 1e-9);
    }

    /// Product over the points within `reps` periods.
    fn nu_direct(spec: &PeriodicSpectrum, y: f64, x: f64, reps: i64) -> f64 {
        let pts = spec.points_between(
            x - reps as f64 * spec.period(),
            x + reps as f64 * spec.period(),
        );
        let l0 = pts
            .iter()
            .copied()
            .min_by(|a, b| (a - x).abs().total_cmp(&(b - x).abs()))
            .unwrap();
        pts.iter()
            .filter(|l| **l != l0)
            .map(|l| (1.0 - y * y / ((l - x).powi(2) + y * y)).ln())
            .sum()
    }

    #[test]
    fn nu_matches_direct_product() {
        let spec = PeriodicSpectrum::from_points(3, &[0.0, 1.2, 2.1]).unwrap();
        let gens = spec.points_in_period();
        for i in 0..12 {
            let x = 0.13 + 0.25 * i as f64;
            let got = nu_at(&gens, 3.0, 0.3, x).unwrap();
            let oracle = nu_direct(&spec, 0.3, x, 100_000);
            // tail of the product: about 2 y^2 / (reps * P)
            assert!((got - oracle).abs() < 1e-6, "{got} vs {oracle}");
        }
    }

    #[test]
    fn integers_at_small_y() {
        let z = PeriodicSpectrum::from_points(1, &[0.0]).unwrap();
        let c = nu_bound_check(&z, 0.1, 4096).unwrap();
        assert!(c.pass);
        assert!(c.max_nu <= 0.0);
        assert_relative_eq!(c.bound, 2.0 * PI * 0.1 * 1.04, max_relative = 1e-12);
        assert_eq!(c.skipped, 1);
        let tiny = nu_bound_check(&z, 1e-4, 1024).unwrap();
        assert!(tiny.max_abs_nu < 1e-6);
    }
}
