//! wasm-bindgen surface for `www/index.html`. Every export is a thin wrapper
//! over a plain function in this crate so the logic is testable natively.

use wasm_bindgen::prelude::*;

use riesz_core::analytic::{periodic_weight, phase_alpha, weight_extrema};
use riesz_core::bounds::{bessel_upper, gautschi_bound, mz_kadec_bound, mz_kadec_upper};
use riesz_core::spectra::{
    apply_perturbation, make_perturbation, roots_of_unity, PerturbationKind,
};
use riesz_core::{exact_bounds, NodeSet};

fn msg(e: riesz_core::Error) -> String {
    e.to_string()
}

/// `[A, B, sigma_min, sigma_max, delta_circ, gautschi]` for nodes in `[0, 1)`.
pub fn bounds_of(nodes: &[f64]) -> Result<Vec<f64>, String> {
    let theta = NodeSet::new(nodes.to_vec()).map_err(msg)?;
    let b = exact_bounds(&theta).map_err(msg)?;
    Ok(vec![
        b.a,
        b.b,
        b.sigma_min,
        b.sigma_max,
        theta.separation(),
        gautschi_bound(&theta).value,
    ])
}

/// One random Kadec perturbation of the `d`-th roots of unity.
#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct KadecSample {
    nodes: Vec<f64>,
    a: f64,
    b: f64,
    lower: f64,
    upper: f64,
    bessel: f64,
}

#[wasm_bindgen]
impl KadecSample {
    #[wasm_bindgen(getter)]
    pub fn nodes(&self) -> Vec<f64> {
        self.nodes.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn a(&self) -> f64 {
        self.a
    }
    #[wasm_bindgen(getter)]
    pub fn b(&self) -> f64 {
        self.b
    }
    /// `2 sin^2((pi/4)(1 - 4 mu_max))`.
    #[wasm_bindgen(getter)]
    pub fn lower(&self) -> f64 {
        self.lower
    }
    #[wasm_bindgen(getter)]
    pub fn upper(&self) -> f64 {
        self.upper
    }
    /// Upper bound from the separation of the perturbed set.
    #[wasm_bindgen(getter)]
    pub fn bessel(&self) -> f64 {
        self.bessel
    }
}

pub fn kadec_sample(d: usize, mu_max: f64, seed: u64) -> Result<KadecSample, String> {
    let pert =
        make_perturbation(PerturbationKind::UniformKadec { mu_max }, d, seed).map_err(msg)?;
    let theta = apply_perturbation(&roots_of_unity(d).map_err(msg)?, &pert).map_err(msg)?;
    let e = exact_bounds(&theta).map_err(msg)?;
    Ok(KadecSample {
        nodes: theta.nodes().to_vec(),
        a: e.a,
        b: e.b,
        lower: mz_kadec_bound(mu_max).map_err(msg)?.value,
        upper: mz_kadec_upper().value,
        bessel: bessel_upper(d as f64 * theta.separation())
            .map_err(msg)?
            .value,
    })
}

/// Weight `w` on one period `[0, d)` of the spectrum `d * nodes + d Z`,
/// normalized so its maximum is 1. Returns `[m/M, w_0, .., w_{G-1}]`.
pub fn weight_curve(nodes: &[f64], y: f64, grid_size: usize) -> Result<Vec<f64>, String> {
    let theta = NodeSet::new(nodes.to_vec()).map_err(msg)?;
    let w = periodic_weight(&theta.spectrum(), y, grid_size).map_err(msg)?;
    let ext = weight_extrema(&w);
    let top = w.samples().iter().copied().fold(0.0, f64::max);
    let mut out = Vec::with_capacity(w.grid_size() + 1);
    out.push(ext.ratio());
    out.extend(w.samples().iter().map(|v| v / top));
    Ok(out)
}

/// Phase samples at `x_i = i P / G`, `i = 0..=G`.
pub fn phase_curve(nodes: &[f64], y: f64, grid_size: usize) -> Result<Vec<f64>, String> {
    let theta = NodeSet::new(nodes.to_vec()).map_err(msg)?;
    Ok(phase_alpha(&theta.spectrum(), y, grid_size)
        .map_err(msg)?
        .samples)
}

#[wasm_bindgen(js_name = exactBounds)]
pub fn exact_bounds_js(nodes: &[f64]) -> Result<Vec<f64>, JsError> {
    bounds_of(nodes).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = kadecSample)]
pub fn kadec_sample_js(d: usize, mu_max: f64, seed: u64) -> Result<KadecSample, JsError> {
    kadec_sample(d, mu_max, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = weightCurve)]
pub fn weight_curve_js(nodes: &[f64], y: f64, grid_size: usize) -> Result<Vec<f64>, JsError> {
    weight_curve(nodes, y, grid_size).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = phaseCurve)]
pub fn phase_curve_js(nodes: &[f64], y: f64, grid_size: usize) -> Result<Vec<f64>, JsError> {
    phase_curve(nodes, y, grid_size).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_node_bounds() {
        let b = bounds_of(&[0.0, 0.25]).unwrap();
        assert!((b[0] - (2.0 - 2f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!((b[1] - (2.0 + 2f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!(bounds_of(&[0.1, 0.1]).is_err());
    }

    #[test]
    fn kadec_sample_respects_bounds() {
        for seed in 0..20 {
            let s = kadec_sample(17, 0.2, seed).unwrap();
            assert_eq!(s.nodes.len(), 17);
            assert!(s.a >= s.lower - 1e-9 && s.b <= s.upper);
        }
        assert!(kadec_sample(4, 0.3, 0).is_err());
    }

    #[test]
    fn curves_have_expected_shape() {
        let w = weight_curve(&[0.0, 0.5], 0.5, 256).unwrap();
        assert_eq!(w.len(), 257);
        assert!(w[0] > 0.0 && w[0] <= 1.0);
        assert!(w[1..].iter().all(|v| *v > 0.0 && *v <= 1.0));
        let p = phase_curve(&[0.0, 0.5], 0.5, 256).unwrap();
        assert_eq!(p.len(), 257);
        assert!(p[0].abs() < 1e-12);
    }
}
