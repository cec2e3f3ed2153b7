//! Randomized verification suites: each trial builds a node set, computes
//! its exact bounds and checks one or more theoretical bounds against them.
//!
//! Trials are seeded independently from `(seed, trial)`, so reports do not
//! depend on evaluation order.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analytic::{stable_weight_extrema, tau_sup};
use crate::bounds::{
    gautschi_bound, general_stability_bound, mz_avdonin_bound, periodic_bound, sine_type_bound,
    BoundName, BoundReport,
};
use crate::error::{Error, Result};
use crate::mz::rho_average;
use crate::spectra::{
    apply_perturbation, make_perturbation, roots_of_unity, seeded_rng, NodeSet, PeriodicSpectrum,
    PerturbationKind,
};
use crate::vandermonde::{exact_bounds, ExactBounds};

/// One bound checked against one exact quantity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub trial: usize,
    pub d: usize,
    pub delta_circ: f64,
    pub a_exact: f64,
    pub b_exact: f64,
    pub bound_name: BoundName,
    pub bound_value: f64,
    pub bound_value_log: f64,
    /// The exact quantity compared (`A`, `B` or `1/sigma_min`).
    pub compared: f64,
    pub margin: f64,
    pub margin_log: f64,
    pub pass: bool,
    pub params: BTreeMap<String, f64>,
}

impl CheckRecord {
    pub fn new(
        trial: usize,
        theta: &NodeSet,
        exact: &ExactBounds,
        report: BoundReport,
        compared: f64,
    ) -> Self {
        let report = report.compare(compared);
        let c = report.comparison.expect("compared above");
        CheckRecord {
            trial,
            d: theta.d(),
            delta_circ: theta.separation(),
            a_exact: exact.a,
            b_exact: exact.b,
            bound_name: report.name,
            bound_value: report.bound.value,
            bound_value_log: report.bound.log_value,
            compared,
            margin: c.margin,
            margin_log: c.margin_log,
            pass: c.pass,
            params: report.params,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub pass_count: usize,
    pub fail_count: usize,
    /// Smallest finite log margin; absent when no record has one.
    pub min_margin_log: Option<f64>,
}

impl Summary {
    pub fn of(records: &[CheckRecord]) -> Self {
        let pass_count = records.iter().filter(|r| r.pass).count();
        let min_margin_log = records
            .iter()
            .map(|r| r.margin_log)
            .filter(|m| m.is_finite())
            .min_by(f64::total_cmp);
        Summary {
            pass_count,
            fail_count: records.len() - pass_count,
            min_margin_log,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub seed: u64,
    pub params: BTreeMap<String, f64>,
    pub records: Vec<CheckRecord>,
    pub summary: Summary,
}

impl VerifyReport {
    pub fn new(suite: &str, seed: u64, params: &[(&str, f64)], records: Vec<CheckRecord>) -> Self {
        let summary = Summary::of(&records);
        VerifyReport {
            suite: suite.to_string(),
            seed,
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            records,
            summary,
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.fail_count == 0
    }
}

/// Independent stream for trial `trial` of a run seeded with `seed`.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    // splitmix64 finalizer
    let mut z = seed
        ^ (trial as u64)
            .wrapping_add(1)
            .wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub(crate) fn run_trials<F>(trials: usize, seed: u64, f: F) -> Result<Vec<CheckRecord>>
where
    F: Fn(usize, &mut ChaCha8Rng) -> Result<Vec<CheckRecord>> + Sync + Send,
{
    let idx: Vec<usize> = (0..trials).collect();
    let per = crate::par_map(&idx, |t| f(*t, &mut seeded_rng(trial_seed(seed, *t))));
    let mut out = Vec::new();
    for r in per {
        out.extend(r?);
    }
    Ok(out)
}

/// `d` uniform nodes, redrawn until `d * delta_circ >= min_separation`.
pub fn random_nodes(rng: &mut ChaCha8Rng, d: usize, min_separation: f64) -> Result<NodeSet> {
    for _ in 0..10_000 {
        let nodes: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..1.0)).collect();
        if let Ok(set) = NodeSet::new(nodes) {
            if d as f64 * set.separation() >= min_separation {
                return Ok(set);
            }
        }
    }
    Err(Error::invalid(format!(
        "could not draw {d} nodes with separation {min_separation}"
    )))
}

/// `K`-periodic spectrum with one point in each `[k - 0.45, k + 0.45]`.
pub fn random_periodic_spectrum(rng: &mut ChaCha8Rng, k: usize) -> Result<PeriodicSpectrum> {
    let points: Vec<f64> = (0..k)
        .map(|i| (i as f64 + rng.random_range(-0.45..=0.45)).rem_euclid(k as f64))
        .collect();
    PeriodicSpectrum::from_points(k, &points)
}

/// Discrete Avdonin theorem on random block perturbations of the roots of
/// unity, compared in log space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AvdoninConfig {
    pub trials: usize,
    pub dmax: usize,
    pub l_min: f64,
    pub l_max: f64,
    pub mu_star_max: f64,
    pub min_separation: f64,
}

impl Default for AvdoninConfig {
    fn default() -> Self {
        AvdoninConfig {
            trials: 200,
            dmax: 128,
            l_min: 0.3,
            l_max: 2.0,
            mu_star_max: 0.2,
            min_separation: 0.05,
        }
    }
}

const BLOCK_SIZES: [usize; 3] = [2, 4, 8];

pub fn avdonin_verify(cfg: AvdoninConfig, seed: u64) -> Result<VerifyReport> {
    if cfg.dmax < 8
        || !(cfg.l_min > 0.0)
        || cfg.l_max < cfg.l_min
        || !(0.0..0.25).contains(&cfg.mu_star_max)
    {
        return Err(Error::invalid(
            "avdonin suite needs dmax >= 8, 0 < l_min <= l_max, mu_star_max < 1/4",
        ));
    }
    let records = run_trials(cfg.trials, seed, |trial, rng| {
        for _ in 0..1000 {
            let n = BLOCK_SIZES[rng.random_range(0..BLOCK_SIZES.len())];
            let d = n * rng.random_range(1..=cfg.dmax / n);
            let l = rng.random_range(cfg.l_min..=cfg.l_max);
            let mu_star = rng.random_range(0.0..=cfg.mu_star_max.min(l));
            let pert = make_perturbation(
                PerturbationKind::BlockAvdonin { l, n, mu_star },
                d,
                rng.random(),
            )?;
            let Ok(theta) = apply_perturbation(&roots_of_unity(d)?, &pert) else {
                continue;
            };
            let delta = d as f64 * theta.separation();
            if delta < cfg.min_separation {
                continue;
            }
            let rho = rho_average(&pert.mu, n)?;
            let exact = exact_bounds(&theta)?;
            let bound = mz_avdonin_bound(delta, l, n, rho)?;
            let report = BoundReport::new(
                BoundName::MzAvdonin,
                &[("delta", delta), ("l", l), ("n", n as f64), ("rho", rho)],
                bound,
            );
            return Ok(vec![CheckRecord::new(
                trial, &theta, &exact, report, exact.a,
            )]);
        }
        Err(Error::invalid(
            "no admissible avdonin sample after 1000 draws",
        ))
    })?;
    Ok(VerifyReport::new(
        "avdonin",
        seed,
        &[
            ("trials", cfg.trials as f64),
            ("dmax", cfg.dmax as f64),
            ("l_min", cfg.l_min),
            ("l_max", cfg.l_max),
            ("mu_star_max", cfg.mu_star_max),
            ("min_separation", cfg.min_separation),
        ],
        records,
    ))
}

/// `y = K ln 3 / (2 pi)`, where the single-factor weight ratio is `1/4`.
pub fn sine_type_height(k: usize) -> f64 {
    k as f64 * 3f64.ln() / std::f64::consts::TAU
}

/// Sine-type and periodic bounds on random periodic spectra of period at
/// most `kmax`.
pub fn sine_type_verify(trials: usize, kmax: usize, seed: u64) -> Result<VerifyReport> {
    if kmax == 0 {
        return Err(Error::invalid("kmax must be positive"));
    }
    let records = run_trials(trials, seed, |trial, rng| {
        let k = rng.random_range(1..=kmax);
        let spec = random_periodic_spectrum(rng, k)?;
        let y = sine_type_height(k);
        let delta = spec.separation();
        let ext = stable_weight_extrema(&spec, y)?.value;
        let exact = exact_bounds(&spec.base)?;
        let sine = BoundReport::new(
            BoundName::SineType,
            &[
                ("delta", delta),
                ("y", y),
                ("m", ext.m),
                ("big_m", ext.big_m),
            ],
            sine_type_bound(delta, y, ext.m, ext.big_m)?,
        );
        let periodic = BoundReport::new(
            BoundName::Periodic,
            &[("delta", delta), ("k", k as f64)],
            periodic_bound(delta.min(1.0), k)?,
        );
        Ok(vec![
            CheckRecord::new(trial, &spec.base, &exact, sine, exact.a),
            CheckRecord::new(trial, &spec.base, &exact, periodic, exact.a),
        ])
    })?;
    Ok(VerifyReport::new(
        "sine_type",
        seed,
        &[("trials", trials as f64), ("kmax", kmax as f64)],
        records,
    ))
}

/// `1/sigma_min` against the Gautschi bound on random node sets.
pub fn gautschi_verify(trials: usize, dmax: usize, seed: u64) -> Result<VerifyReport> {
    if dmax == 0 {
        return Err(Error::invalid("dmax must be positive"));
    }
    let records = run_trials(trials, seed, |trial, rng| {
        let d = rng.random_range(1..=dmax);
        let theta = random_nodes(rng, d, 1e-3)?;
        let exact = exact_bounds(&theta)?;
        let report = BoundReport::new(
            BoundName::Gautschi,
            &[("d", d as f64)],
            gautschi_bound(&theta),
        );
        Ok(vec![CheckRecord::new(
            trial,
            &theta,
            &exact,
            report,
            1.0 / exact.sigma_min,
        )])
    })?;
    Ok(VerifyReport::new(
        "gautschi",
        seed,
        &[("trials", trials as f64), ("dmax", dmax as f64)],
        records,
    ))
}

/// General stability bound: `d`-periodic perturbations of `Z` with
/// `tau_{y0} < pi/4` measured on a grid.
pub fn general_stability_verify(trials: usize, dmax: usize, seed: u64) -> Result<VerifyReport> {
    if dmax == 0 {
        return Err(Error::invalid("dmax must be positive"));
    }
    let records = run_trials(trials, seed, |trial, rng| {
        for _ in 0..1000 {
            let d = rng.random_range(1..=dmax);
            let mu_max = rng.random_range(0.0..0.24);
            let y0 = rng.random_range(1.0..2.0);
            let pert =
                make_perturbation(PerturbationKind::UniformKadec { mu_max }, d, rng.random())?;
            let tau = tau_sup(d, &pert, y0, 1024)?.value;
            if tau >= FRAC_PI_4 {
                continue;
            }
            let theta = apply_perturbation(&roots_of_unity(d)?, &pert)?;
            let delta = d as f64 * theta.separation();
            let exact = exact_bounds(&theta)?;
            let report = BoundReport::new(
                BoundName::GeneralStability,
                &[("delta", delta), ("y0", y0), ("tau", tau)],
                general_stability_bound(delta, y0, tau)?,
            );
            return Ok(vec![CheckRecord::new(
                trial, &theta, &exact, report, exact.a,
            )]);
        }
        Err(Error::invalid(
            "no sample with tau below pi/4 after 1000 draws",
        ))
    })?;
    Ok(VerifyReport::new(
        "general_stability",
        seed,
        &[("trials", trials as f64), ("dmax", dmax as f64)],
        records,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trial_seeds_differ() {
        let s: Vec<u64> = (0..100).map(|t| trial_seed(7, t)).collect();
        let mut u = s.clone();
        u.sort();
        u.dedup();
        assert_eq!(u.len(), s.len());
        assert_ne!(trial_seed(7, 0), trial_seed(8, 0));
    }

    #[test]
    fn summary_counts() {
        let theta = roots_of_unity(3).unwrap();
        let exact = exact_bounds(&theta).unwrap();
        let ok = CheckRecord::new(
            0,
            &theta,
            &exact,
            BoundReport::new(
                BoundName::Kadec,
                &[],
                crate::bounds::kadec_bound(0.1).unwrap(),
            ),
            exact.a,
        );
        let mut bad = ok.clone();
        bad.pass = false;
        bad.margin_log = -2.0;
        let s = Summary::of(&[ok, bad]);
        assert_eq!((s.pass_count, s.fail_count), (1, 1));
        assert_eq!(s.min_margin_log, Some(-2.0));
        assert_eq!(Summary::of(&[]).min_margin_log, None);
    }

    #[test]
    fn sine_height_gives_quarter_ratio() {
        for k in 1..=16 {
            let q = (-std::f64::consts::TAU * sine_type_height(k) / k as f64).exp();
            assert!((((1.0 - q) / (1.0 + q)).powi(2) - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn small_suites_pass_and_are_deterministic() {
        let a = gautschi_verify(20, 12, 3).unwrap();
        assert!(a.passed());
        assert_eq!(a, gautschi_verify(20, 12, 3).unwrap());
        let s = sine_type_verify(5, 6, 1).unwrap();
        assert!(s.passed());
        assert_eq!(s.records.len(), 10);
        let g = general_stability_verify(5, 16, 2).unwrap();
        assert!(g.passed());
        let cfg = AvdoninConfig {
            trials: 5,
            dmax: 32,
            ..AvdoninConfig::default()
        };
        let av = avdonin_verify(cfg, 9).unwrap();
        assert!(av.passed());
        assert!(av.records.iter().all(|r| r.delta_circ * r.d as f64 >= 0.05));
    }
}
