//! Closed-form theoretical bounds on Riesz basis constants.
//!
//! Several of these are far below the smallest positive double (the Avdonin
//! bound at `delta = L = N = 1` is about `e^{-3016}`), so every bound is
//! evaluated as a natural logarithm first and exponentiated only for the
//! linear value. Comparisons against exact bounds use the log value.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_4, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectra::NodeSet;

/// A bound value together with its natural logarithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundValue {
    pub value: f64,
    pub log_value: f64,
}

impl BoundValue {
    pub fn from_log(log_value: f64) -> Self {
        BoundValue {
            value: log_value.exp(),
            log_value,
        }
    }

    pub fn from_value(value: f64) -> Self {
        BoundValue {
            value,
            log_value: value.ln(),
        }
    }

    pub fn zero() -> Self {
        BoundValue {
            value: 0.0,
            log_value: f64::NEG_INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundName {
    Kadec,
    Avdonin,
    SineType,
    GeneralStability,
    Bessel,
    Ingham,
    Periodic,
    Gautschi,
    BasisPerturbation,
    HsRatio,
    MzKadec,
    MzKadecUpper,
    MzAvdonin,
}

impl BoundName {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundName::Kadec => "kadec",
            BoundName::Avdonin => "avdonin",
            BoundName::SineType => "sine_type",
            BoundName::GeneralStability => "general_stability",
            BoundName::Bessel => "bessel",
            BoundName::Ingham => "ingham",
            BoundName::Periodic => "periodic",
            BoundName::Gautschi => "gautschi",
            BoundName::BasisPerturbation => "basis_perturbation",
            BoundName::HsRatio => "hs_ratio",
            BoundName::MzKadec => "mz_kadec",
            BoundName::MzKadecUpper => "mz_kadec_upper",
            BoundName::MzAvdonin => "mz_avdonin",
        }
    }

    /// Upper bounds are compared as `exact <= bound`, all others as
    /// `exact >= bound`.
    pub fn is_upper(self) -> bool {
        matches!(
            self,
            BoundName::Bessel | BoundName::Gautschi | BoundName::MzKadecUpper
        )
    }
}

impl std::fmt::Display for BoundName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Relative slack for log-space comparisons.
pub const LOG_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Comparison {
    pub exact: f64,
    /// `exact - bound` for lower bounds, `bound - exact` for upper bounds.
    pub margin: f64,
    /// Same orientation in log space.
    pub margin_log: f64,
    pub pass: bool,
}

impl Comparison {
    pub fn new(name: BoundName, bound: BoundValue, exact: f64) -> Self {
        let (margin, margin_log) = if name.is_upper() {
            (bound.value - exact, bound.log_value - exact.ln())
        } else {
            (exact - bound.value, exact.ln() - bound.log_value)
        };
        // a zero lower bound is met by any nonnegative exact value
        let pass = if !name.is_upper() && bound.value == 0.0 && bound.log_value == f64::NEG_INFINITY
        {
            exact >= 0.0
        } else {
            margin_log >= -LOG_TOLERANCE
        };
        Comparison {
            exact,
            margin,
            margin_log,
            pass,
        }
    }
}

/// A named bound, the parameters it was evaluated at, and optionally the
/// exact value it was checked against.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: BoundName,
    pub params: BTreeMap<String, f64>,
    pub bound: BoundValue,
    pub comparison: Option<Comparison>,
}

impl BoundReport {
    pub fn new(name: BoundName, params: &[(&str, f64)], bound: BoundValue) -> Self {
        BoundReport {
            name,
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            bound,
            comparison: None,
        }
    }

    pub fn compare(mut self, exact: f64) -> Self {
        self.comparison = Some(Comparison::new(self.name, self.bound, exact));
        self
    }
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "{name} = {x} must be positive and finite"
        )))
    }
}

// ln(2 sin^2(pi/4 (1 - 4 mu)))
fn log_two_sin_sq(mu: f64) -> f64 {
    2f64.ln() + 2.0 * (FRAC_PI_4 * (1.0 - 4.0 * mu)).sin().ln()
}

fn check_quarter(name: &str, mu: f64) -> Result<()> {
    if (0.0..=0.25).contains(&mu) {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "{name} = {mu} must lie in [0, 1/4]"
        )))
    }
}

/// `2 sin^2((pi/4)(1 - 4 mu))`, the lower bound for `sup |lambda_n - n| <= mu`.
pub fn kadec_bound(mu: f64) -> Result<BoundValue> {
    check_quarter("mu", mu)?;
    if mu == 0.25 {
        return Ok(BoundValue::zero());
    }
    let value = 2.0 * (FRAC_PI_4 * (1.0 - 4.0 * mu)).sin().powi(2);
    Ok(BoundValue {
        value,
        log_value: log_two_sin_sq(mu),
    })
}

/// Same formula as [`kadec_bound`], reported for perturbed roots of unity.
pub fn mz_kadec_bound(mu: f64) -> Result<BoundValue> {
    kadec_bound(mu)
}

/// Upper MZ bound `8` of the discrete Kadec theorem.
pub fn mz_kadec_upper() -> BoundValue {
    BoundValue::from_value(8.0)
}

/// `(1/(7 delta)) exp(-960 pi L^2 N / (delta (1 - 4 mu*)^2)) sin^2((pi/4)(1 - 4 mu*))`.
pub fn avdonin_bound(delta: f64, l: f64, n: usize, mu_star: f64) -> Result<BoundValue> {
    check_positive("delta", delta)?;
    check_positive("L", l)?;
    if n == 0 {
        return Err(Error::invalid("block size N must be at least 1"));
    }
    check_quarter("mu*", mu_star)?;
    if mu_star == 0.25 {
        return Ok(BoundValue::zero());
    }
    let gap = 1.0 - 4.0 * mu_star;
    let log_value = -(7.0 * delta).ln() - 960.0 * PI * l * l * n as f64 / (delta * gap * gap)
        + 2.0 * (FRAC_PI_4 * gap).sin().ln();
    Ok(BoundValue::from_log(log_value))
}

/// [`avdonin_bound`] with the block average `rho` of a triangular family.
pub fn mz_avdonin_bound(delta: f64, l: f64, n: usize, rho: f64) -> Result<BoundValue> {
    avdonin_bound(delta, l, n, rho)
}

/// `(1/(7 delta)) (m/M) exp(-8 pi y / delta)`.
pub fn sine_type_bound(delta: f64, y: f64, m: f64, big_m: f64) -> Result<BoundValue> {
    check_positive("delta", delta)?;
    check_positive("y", y)?;
    let ratio = hs_ratio_bound(m, big_m)?;
    let log_value = -(7.0 * delta).ln() + ratio.log_value - 8.0 * PI * y / delta;
    Ok(BoundValue::from_log(log_value))
}

/// `(1/(28 delta)) exp(-8 pi y0 / delta) cos^2(2 tau)` for `tau < pi/4`,
/// `y0 >= 1`; zero at `tau = pi/4`.
pub fn general_stability_bound(delta: f64, y0: f64, tau: f64) -> Result<BoundValue> {
    check_positive("delta", delta)?;
    if !(y0 >= 1.0) || !y0.is_finite() {
        return Err(Error::invalid(format!("y0 = {y0} must be at least 1")));
    }
    if !(0.0..=FRAC_PI_4).contains(&tau) {
        return Err(Error::invalid(format!("tau = {tau} must lie in [0, pi/4)")));
    }
    if tau == FRAC_PI_4 {
        return Ok(BoundValue::zero());
    }
    let log_value = -(28.0 * delta).ln() - 8.0 * PI * y0 / delta + 2.0 * (2.0 * tau).cos().ln();
    Ok(BoundValue::from_log(log_value))
}

/// Upper bound `8 pi / min(delta, 1)` for a `delta`-separated spectrum.
pub fn bessel_upper(delta: f64) -> Result<BoundValue> {
    check_positive("delta", delta)?;
    Ok(BoundValue::from_value(8.0 * PI / delta.min(1.0)))
}

/// Ingham's lower bound `(a/pi^2)(1 - 1/(a delta)^2)` on `[0, a]`, valid
/// for `a delta > 1`.
pub fn ingham_bound(a: f64, delta: f64) -> Result<BoundValue> {
    check_positive("a", a)?;
    check_positive("delta", delta)?;
    let ad = a * delta;
    if ad <= 1.0 {
        return Err(Error::invalid(format!(
            "Ingham's inequality needs a*delta > 1, got {ad}"
        )));
    }
    Ok(BoundValue::from_value(
        a / (PI * PI) * (1.0 - 1.0 / (ad * ad)),
    ))
}

/// `(1/(7 delta)) 18^{-2K/delta}` for a `K`-periodic spectrum with `delta <= 1`.
pub fn periodic_bound(delta: f64, k: usize) -> Result<BoundValue> {
    check_positive("delta", delta)?;
    if delta > 1.0 {
        return Err(Error::invalid(format!("delta = {delta} must not exceed 1")));
    }
    if k == 0 {
        return Err(Error::invalid("period K must be positive"));
    }
    let log_value = -(7.0 * delta).ln() - 2.0 * k as f64 / delta * 18f64.ln();
    Ok(BoundValue::from_log(log_value))
}

/// Upper bound `sqrt(d) pi^{d-1} max_k prod_{j != k} 1/delta_jk` on the
/// norm of the inverse Vandermonde matrix.
pub fn gautschi_bound(theta: &NodeSet) -> BoundValue {
    let nodes = theta.nodes();
    let d = nodes.len();
    let worst = (0..d)
        .map(|k| {
            (0..d)
                .filter(|&j| j != k)
                .map(|j| {
                    let diff = (nodes[j] - nodes[k]).abs();
                    -(diff.min(1.0 - diff)).ln()
                })
                .sum::<f64>()
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let log_value = 0.5 * (d as f64).ln() + (d as f64 - 1.0) * PI.ln() + worst;
    BoundValue::from_log(log_value)
}

/// `(sqrt(A) - 8 pi mu / delta)^2` for `mu < sqrt(A) delta / (8 pi)`.
pub fn basis_perturbation_bound(a: f64, delta: f64, mu: f64) -> Result<BoundValue> {
    check_positive("A", a)?;
    check_positive("delta", delta)?;
    if !(mu >= 0.0) {
        return Err(Error::invalid(format!("mu = {mu} must be nonnegative")));
    }
    let threshold = a.sqrt() * delta / (8.0 * PI);
    if mu >= threshold {
        return Err(Error::invalid(format!(
            "mu = {mu} must be below sqrt(A) delta / (8 pi) = {threshold}"
        )));
    }
    let root = a.sqrt() - 8.0 * PI * mu / delta;
    Ok(BoundValue {
        value: root * root,
        log_value: 2.0 * root.ln(),
    })
}

/// `m / M`, the lower estimate of the Helson-Szego factor for a weight
/// bounded between `m` and `M`.
pub fn hs_ratio_bound(m: f64, big_m: f64) -> Result<BoundValue> {
    check_positive("m", m)?;
    check_positive("M", big_m)?;
    if m > big_m {
        return Err(Error::invalid(format!("m = {m} exceeds M = {big_m}")));
    }
    Ok(BoundValue {
        value: m / big_m,
        log_value: m.ln() - big_m.ln(),
    })
}
