//! Exact lower and upper sampling bounds of a node set through the extreme
//! singular values of its Vandermonde matrix.
//!
//! For `d` nodes the normalized exponentials `e_d(theta)` form a Riesz basis
//! of `C^d` with bounds `A = sigma_min^2 / d` and `B = sigma_max^2 / d`; the
//! same numbers are the Riesz bounds of the `d`-periodic line spectrum
//! `d*theta_j + d*Z` in `L^2[0, 1]`.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectra::NodeSet;

/// Below this `sigma_min` the node set is treated as degenerate.
pub const NEAR_SINGULAR_SIGMA: f64 = 1e-13;

/// `V(j, k) = exp(2 pi i k theta_j)`, rows indexed by nodes, columns by
/// powers `k = 0..d-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct VandermondeMatrix {
    entries: DMatrix<Complex64>,
}

impl VandermondeMatrix {
    pub fn d(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }
}

pub fn build_vandermonde(theta: &NodeSet) -> VandermondeMatrix {
    let d = theta.d();
    let nodes = theta.nodes();
    let entries = DMatrix::from_fn(d, d, |j, k| {
        // reduce k*theta mod 1 before scaling to keep the phase accurate
        let phase = (k as f64 * nodes[j]).fract();
        Complex64::from_polar(1.0, TAU * phase)
    });
    VandermondeMatrix { entries }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactBounds {
    pub a: f64,
    pub b: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

fn singular_values(
    v: &VandermondeMatrix,
    with_v: bool,
) -> Result<nalgebra::SVD<Complex64, nalgebra::Dyn, nalgebra::Dyn>> {
    let d = v.d();
    nalgebra::SVD::try_new(
        v.entries.clone(),
        false,
        with_v,
        f64::EPSILON,
        1000 * d.max(8),
    )
    .ok_or(Error::SvdNoConvergence { d })
}

/// Full SVD of `V(theta)`.
pub fn exact_bounds(theta: &NodeSet) -> Result<ExactBounds> {
    let v = build_vandermonde(theta);
    let d = v.d() as f64;
    let svd = singular_values(&v, false)?;
    let sigma_min = svd.singular_values.min();
    let sigma_max = svd.singular_values.max();
    if !sigma_min.is_finite() || !sigma_max.is_finite() {
        return Err(Error::SvdNoConvergence { d: v.d() });
    }
    Ok(ExactBounds {
        a: sigma_min * sigma_min / d,
        b: sigma_max * sigma_max / d,
        sigma_min,
        sigma_max,
    })
}

/// Operator norm of `V(theta)^{-1}`, i.e. `1 / sigma_min`.
pub fn inverse_norm(theta: &NodeSet) -> Result<f64> {
    let bounds = exact_bounds(theta)?;
    if bounds.sigma_min < NEAR_SINGULAR_SIGMA {
        return Err(Error::NearSingular {
            d: theta.d(),
            sigma_min: bounds.sigma_min,
        });
    }
    Ok(1.0 / bounds.sigma_min)
}

/// Coefficient vector attaining the lower bound: the right singular vector
/// of `sigma_min`.
pub fn extremal_coefficients(theta: &NodeSet) -> Result<Vec<Complex64>> {
    let v = build_vandermonde(theta);
    let svd = singular_values(&v, true)?;
    let v_t = svd.v_t.ok_or(Error::SvdNoConvergence { d: v.d() })?;
    let imin = svd.singular_values.imin();
    Ok(v_t.row(imin).iter().map(|z| z.conj()).collect())
}

/// Sampling quotient `(1/d) sum_j |p(e^{2 pi i theta_j})|^2 / sum_k |a_k|^2`
/// of `p(z) = sum_k a_k z^k`.
pub fn sampling_ratio(theta: &NodeSet, coeffs: &[Complex64]) -> Result<f64> {
    let d = theta.d();
    if coeffs.len() != d {
        return Err(Error::invalid(format!(
            "expected {d} coefficients, got {}",
            coeffs.len()
        )));
    }
    let energy: f64 = coeffs.iter().map(|a| a.norm_sqr()).sum();
    if !(energy > 0.0) {
        return Err(Error::invalid("coefficient vector is zero"));
    }
    let v = build_vandermonde(theta);
    let values = v.entries() * DVector::from_column_slice(coeffs);
    let sampled: f64 = values.iter().map(|z| z.norm_sqr()).sum();
    Ok(sampled / (d as f64 * energy))
}
