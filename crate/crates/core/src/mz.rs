//! Triangular families `{Theta_d}` of node sets, scans of their exact MZ
//! bounds over a range of `d`, and the discrete Kadec theorems as suites.
//!
//! Aggregates over `d` (`A_inf`, `B_sup`, `delta(Upsilon)`) cover only the
//! scanned range and are labelled `range_restricted`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use crate::bounds::{
    basis_perturbation_bound, bessel_upper, mz_avdonin_bound, mz_kadec_bound, mz_kadec_upper,
    BoundName, BoundReport,
};
use crate::error::{Error, Result};
use crate::spectra::{
    apply_perturbation, block_average_sup, counterexample_family, make_perturbation,
    roots_of_unity, NodeSet, PerturbationKind, PerturbationSpec,
};
use crate::suites::{run_trials, CheckRecord, VerifyReport};
use crate::vandermonde::{exact_bounds, ExactBounds};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    /// Roots of unity.
    Canonical,
    /// Roots of unity moved by uniform displacements in `[-mu_max, mu_max]`.
    KadecPerturbed { mu_max: f64 },
    /// Roots of unity moved by block perturbations; needs `n | d`.
    AvdoninBlock { l: f64, n: usize, mu_star: f64 },
    /// The sharpness family with a quarter-offset gap at zero.
    Counterexample,
    /// Explicit node sets, keyed by `d`.
    Custom { sets: BTreeMap<usize, Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TriangularFamily {
    pub kind: FamilyKind,
    pub seed: u64,
}

impl TriangularFamily {
    pub fn new(kind: FamilyKind, seed: u64) -> Self {
        TriangularFamily { kind, seed }
    }

    pub fn canonical() -> Self {
        TriangularFamily::new(FamilyKind::Canonical, 0)
    }

    /// Lower bound on `d * delta_circ(Theta_d)` guaranteed by construction.
    pub fn declared_separation(&self) -> Option<f64> {
        match &self.kind {
            FamilyKind::Canonical => Some(1.0),
            FamilyKind::KadecPerturbed { mu_max } => Some(1.0 - 2.0 * mu_max),
            FamilyKind::AvdoninBlock { l, .. } if *l < 0.5 => Some(1.0 - 2.0 * l),
            FamilyKind::Counterexample => Some(0.75),
            _ => None,
        }
    }

    fn perturbation(&self, d: usize) -> Result<Option<PerturbationSpec>> {
        let kind = match &self.kind {
            FamilyKind::KadecPerturbed { mu_max } => {
                PerturbationKind::UniformKadec { mu_max: *mu_max }
            }
            FamilyKind::AvdoninBlock { l, n, mu_star } => PerturbationKind::BlockAvdonin {
                l: *l,
                n: *n,
                mu_star: *mu_star,
            },
            _ => return Ok(None),
        };
        make_perturbation(kind, d, self.seed ^ d as u64).map(Some)
    }
}

/// `rho(N)` of a grid-unit displacement pattern: converting to absolute
/// units divides by `d` and the `d/N` prefactor restores it, leaving the
/// largest block mean.
pub fn rho_average(mu: &[f64], n: usize) -> Result<f64> {
    block_average_sup(mu, n)
}

pub fn family_generate(family: &TriangularFamily, d: usize) -> Result<NodeSet> {
    if d == 0 {
        return Err(Error::invalid("d must be positive"));
    }
    match &family.kind {
        FamilyKind::Canonical => roots_of_unity(d),
        FamilyKind::Counterexample => counterexample_family(d),
        FamilyKind::Custom { sets } => {
            let nodes = sets.get(&d).ok_or_else(|| {
                Error::invalid(format!("custom family has no node set for d = {d}"))
            })?;
            let set = NodeSet::new(nodes.clone())?;
            if set.d() != d {
                return Err(Error::invalid(format!(
                    "custom node set for d = {d} has {} nodes",
                    set.d()
                )));
            }
            Ok(set)
        }
        _ => {
            let pert = family.perturbation(d)?.expect("perturbed kinds");
            apply_perturbation(&roots_of_unity(d)?, &pert)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MzRecord {
    pub d: usize,
    pub delta_circ: f64,
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MzScanReport {
    pub family: TriangularFamily,
    pub records: Vec<MzRecord>,
    pub checks: Vec<CheckRecord>,
    pub a_inf: f64,
    pub b_sup: f64,
    /// `min_d d * delta_circ(Theta_d)` over the scanned range.
    pub delta: f64,
    pub range_restricted: bool,
}

struct Generated {
    theta: NodeSet,
    exact: ExactBounds,
    pert: Option<PerturbationSpec>,
}

fn generate_all(family: &TriangularFamily, d_values: &[usize]) -> Result<Vec<Generated>> {
    crate::par_map(d_values, |&d| -> Result<Generated> {
        let theta = family_generate(family, d).map_err(|e| match e {
            Error::InvalidInput(m) => Error::invalid(format!("generation failed at d = {d}: {m}")),
            other => other,
        })?;
        let exact = exact_bounds(&theta)?;
        Ok(Generated {
            theta,
            exact,
            pert: family.perturbation(d)?,
        })
    })
    .into_iter()
    .collect()
}

/// Exact bounds for every `d`, each checked against the Bessel bound and
/// the lower bound that applies to the family kind.
pub fn mz_scan(family: &TriangularFamily, d_values: &[usize]) -> Result<MzScanReport> {
    if d_values.is_empty() {
        return Err(Error::invalid("no dimensions to scan"));
    }
    let gen = generate_all(family, d_values)?;
    let delta = gen
        .iter()
        .map(|g| g.theta.d() as f64 * g.theta.separation())
        .fold(f64::INFINITY, f64::min);
    let lower: Option<BoundReport> = match &family.kind {
        FamilyKind::Canonical => Some(BoundReport::new(
            BoundName::MzKadec,
            &[("mu", 0.0)],
            mz_kadec_bound(0.0)?,
        )),
        FamilyKind::KadecPerturbed { mu_max } => Some(BoundReport::new(
            BoundName::MzKadec,
            &[("mu", *mu_max)],
            mz_kadec_bound(*mu_max)?,
        )),
        FamilyKind::AvdoninBlock { l, n, .. } => {
            let mut rho = 0.0f64;
            for g in &gen {
                rho = rho.max(rho_average(&g.pert.as_ref().expect("perturbed").mu, *n)?);
            }
            if rho < 0.25 {
                Some(BoundReport::new(
                    BoundName::MzAvdonin,
                    &[("delta", delta), ("l", *l), ("n", *n as f64), ("rho", rho)],
                    mz_avdonin_bound(delta, *l, *n, rho)?,
                ))
            } else {
                None
            }
        }
        _ => None,
    };
    let kadec_like = matches!(
        family.kind,
        FamilyKind::Canonical | FamilyKind::KadecPerturbed { .. }
    );
    let mut records = Vec::with_capacity(gen.len());
    let mut checks = Vec::new();
    for g in &gen {
        let d = g.theta.d();
        let sep = d as f64 * g.theta.separation();
        records.push(MzRecord {
            d,
            delta_circ: g.theta.separation(),
            a: g.exact.a,
            b: g.exact.b,
        });
        let bessel = BoundReport::new(BoundName::Bessel, &[("delta", sep)], bessel_upper(sep)?);
        checks.push(CheckRecord::new(0, &g.theta, &g.exact, bessel, g.exact.b));
        if let Some(lb) = &lower {
            checks.push(CheckRecord::new(
                0,
                &g.theta,
                &g.exact,
                lb.clone(),
                g.exact.a,
            ));
        }
        if kadec_like {
            let ub = BoundReport::new(BoundName::MzKadecUpper, &[], mz_kadec_upper());
            checks.push(CheckRecord::new(0, &g.theta, &g.exact, ub, g.exact.b));
        }
    }
    Ok(MzScanReport {
        family: family.clone(),
        a_inf: records.iter().map(|r| r.a).fold(f64::INFINITY, f64::min),
        b_sup: records
            .iter()
            .map(|r| r.b)
            .fold(f64::NEG_INFINITY, f64::max),
        records,
        checks,
        delta,
        range_restricted: true,
    })
}

fn check_d_values(d_values: &[usize]) -> Result<()> {
    if d_values.is_empty() || d_values.contains(&0) {
        return Err(Error::invalid(
            "d values must be a nonempty list of positive integers",
        ));
    }
    Ok(())
}

/// Discrete Kadec theorem: each trial draws `d` from `d_values` and a
/// uniform perturbation of size `mu_max`, then checks `A >= 2 sin^2(...)`
/// and `B <= 8`.
pub fn mz_kadec_verify(
    d_values: &[usize],
    mu_max: f64,
    trials: usize,
    seed: u64,
) -> Result<VerifyReport> {
    check_d_values(d_values)?;
    if !(0.0..0.25).contains(&mu_max) {
        return Err(Error::invalid(format!(
            "mu_max = {mu_max} must lie in [0, 1/4)"
        )));
    }
    let lower = mz_kadec_bound(mu_max)?;
    let records = run_trials(trials, seed, |trial, rng| {
        let d = d_values[rng.random_range(0..d_values.len())];
        let pert = make_perturbation(PerturbationKind::UniformKadec { mu_max }, d, rng.random())?;
        let theta = apply_perturbation(&roots_of_unity(d)?, &pert)?;
        let exact = exact_bounds(&theta)?;
        Ok(vec![
            CheckRecord::new(
                trial,
                &theta,
                &exact,
                BoundReport::new(BoundName::MzKadec, &[("mu", mu_max)], lower),
                exact.a,
            ),
            CheckRecord::new(
                trial,
                &theta,
                &exact,
                BoundReport::new(BoundName::MzKadecUpper, &[], mz_kadec_upper()),
                exact.b,
            ),
        ])
    })?;
    Ok(VerifyReport::new(
        "kadec",
        seed,
        &[
            ("mu_max", mu_max),
            ("trials", trials as f64),
            ("dmax", *d_values.iter().max().unwrap() as f64),
        ],
        records,
    ))
}

/// General discrete Kadec theorem. `A_inf` and `delta(Upsilon)` of the base
/// family come from a scan over `d_values`; `mu` must stay below
/// `sqrt(A_inf) delta / (8 pi)`.
pub fn mz_general_kadec_verify(
    base: &TriangularFamily,
    mu: f64,
    d_values: &[usize],
    trials: usize,
    seed: u64,
) -> Result<VerifyReport> {
    check_d_values(d_values)?;
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(Error::invalid(format!("mu = {mu} must be nonnegative")));
    }
    let scan = mz_scan(base, d_values)?;
    let threshold = scan.a_inf.sqrt() * scan.delta / (8.0 * PI);
    if mu >= threshold {
        return Err(Error::invalid(format!(
            "mu = {mu} is not below the measured threshold sqrt(A_inf) delta / (8 pi) = {threshold}"
        )));
    }
    let bound = basis_perturbation_bound(scan.a_inf, scan.delta, mu)?;
    let records = run_trials(trials, seed, |trial, rng| {
        let d = d_values[rng.random_range(0..d_values.len())];
        let base_set = family_generate(base, d)?;
        let shifts: Vec<f64> = (0..d)
            .map(|_| {
                if mu > 0.0 {
                    rng.random_range(-mu..=mu)
                } else {
                    0.0
                }
            })
            .collect();
        let theta = apply_perturbation(&base_set, &PerturbationSpec::new(shifts, None)?)?;
        let exact = exact_bounds(&theta)?;
        let report = BoundReport::new(
            BoundName::BasisPerturbation,
            &[("a_inf", scan.a_inf), ("delta", scan.delta), ("mu", mu)],
            bound,
        );
        Ok(vec![CheckRecord::new(
            trial, &theta, &exact, report, exact.a,
        )])
    })?;
    Ok(VerifyReport::new(
        "general_kadec",
        seed,
        &[
            ("mu", mu),
            ("a_inf", scan.a_inf),
            ("delta", scan.delta),
            ("threshold", threshold),
            ("trials", trials as f64),
        ],
        records,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rho_examples() {
        assert_eq!(rho_average(&[0.0; 6], 2).unwrap(), 0.0);
        assert_eq!(rho_average(&[0.3, -0.3, 0.3, -0.3], 2).unwrap(), 0.0);
        for n in 1..=5 {
            assert_abs_diff_eq!(rho_average(&[0.17; 5], n).unwrap(), 0.17, epsilon = 1e-15);
        }
        let mu = [0.1, -0.4, 0.25, 0.0];
        assert_abs_diff_eq!(rho_average(&mu, 1).unwrap(), 0.4);
        assert!(rho_average(&mu, 5).is_err());
        assert!(rho_average(&mu, 0).is_err());
    }

    #[test]
    fn generate_examples() {
        let c = family_generate(&TriangularFamily::canonical(), 8).unwrap();
        assert_eq!(c.nodes(), roots_of_unity(8).unwrap().nodes());
        let s = family_generate(&TriangularFamily::new(FamilyKind::Counterexample, 0), 5).unwrap();
        for (got, want) in s.nodes().iter().zip([0.0, 0.15, 0.35, 0.65, 0.85]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
        let k = TriangularFamily::new(FamilyKind::KadecPerturbed { mu_max: 0.2 }, 42);
        assert_eq!(
            family_generate(&k, 17).unwrap(),
            family_generate(&k, 17).unwrap()
        );
        let av = TriangularFamily::new(
            FamilyKind::AvdoninBlock {
                l: 0.4,
                n: 4,
                mu_star: 0.1,
            },
            1,
        );
        assert!(family_generate(&av, 16).is_ok());
        assert!(family_generate(&av, 18).is_err());
        let mut sets = BTreeMap::new();
        sets.insert(2, vec![0.0, 0.3]);
        let custom = TriangularFamily::new(FamilyKind::Custom { sets }, 0);
        assert!(family_generate(&custom, 2).is_ok());
        assert!(family_generate(&custom, 3).is_err());
    }

    #[test]
    fn canonical_scan_is_identity() {
        let d: Vec<usize> = (1..=64).collect();
        let r = mz_scan(&TriangularFamily::canonical(), &d).unwrap();
        for rec in &r.records {
            assert_abs_diff_eq!(rec.a, 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(rec.b, 1.0, epsilon = 1e-10);
        }
        assert!(r.checks.iter().all(|c| c.pass));
        assert!(r.range_restricted);
        assert_abs_diff_eq!(r.delta, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn counterexample_scan_decreases() {
        let r = mz_scan(
            &TriangularFamily::new(FamilyKind::Counterexample, 0),
            &[5, 25, 125],
        )
        .unwrap();
        assert!(r.records[0].a > r.records[1].a && r.records[1].a > r.records[2].a);
        assert!(r.checks.iter().all(|c| c.pass));
    }

    #[test]
    fn kadec_scan_respects_bound() {
        let fam = TriangularFamily::new(FamilyKind::KadecPerturbed { mu_max: 0.2 }, 5);
        let d: Vec<usize> = (1..=40).collect();
        let r = mz_scan(&fam, &d).unwrap();
        let bound = mz_kadec_bound(0.2).unwrap().value;
        assert_abs_diff_eq!(bound, 2.0 * (0.05 * PI).sin().powi(2), epsilon = 1e-15);
        assert!(r.a_inf >= bound);
        assert!(r.checks.iter().all(|c| c.pass));
        for rec in &r.records {
            assert!(r.a_inf <= rec.a && r.b_sup >= rec.b);
            assert!(rec.a <= 1.0 + 1e-12 && rec.b >= 1.0 - 1e-12);
            assert!(rec.d as f64 * rec.delta_circ >= fam.declared_separation().unwrap() - 1e-12);
        }
    }

    #[test]
    fn avdonin_scan_has_log_bound() {
        let fam = TriangularFamily::new(
            FamilyKind::AvdoninBlock {
                l: 0.4,
                n: 2,
                mu_star: 0.1,
            },
            3,
        );
        let r = mz_scan(&fam, &[4, 8, 16, 32]).unwrap();
        let lower: Vec<_> = r
            .checks
            .iter()
            .filter(|c| c.bound_name == BoundName::MzAvdonin)
            .collect();
        assert_eq!(lower.len(), 4);
        assert!(lower
            .iter()
            .all(|c| c.pass && c.bound_value_log.is_finite()));
    }

    #[test]
    fn kadec_verify_cases() {
        let d: Vec<usize> = (1..=32).collect();
        let zero = mz_kadec_verify(&d, 0.0, 10, 1).unwrap();
        assert!(zero.passed());
        for r in zero
            .records
            .iter()
            .filter(|r| r.bound_name == BoundName::MzKadec)
        {
            assert_abs_diff_eq!(r.a_exact, 1.0, epsilon = 1e-10);
        }
        let hi = mz_kadec_verify(&d, 0.24, 30, 2).unwrap();
        assert!(hi.passed());
        assert!(mz_kadec_verify(&d, 0.3, 10, 1).is_err());
    }

    #[test]
    fn general_kadec_cases() {
        let d: Vec<usize> = (1..=24).collect();
        let mu = 1.0 / (32.0 * PI);
        let r = mz_general_kadec_verify(&TriangularFamily::canonical(), mu, &d, 20, 4).unwrap();
        assert!(r.passed());
        assert_abs_diff_eq!(r.records[0].bound_value, 9.0 / 16.0, epsilon = 1e-9);
        let z = mz_general_kadec_verify(&TriangularFamily::canonical(), 0.0, &d, 3, 4).unwrap();
        assert_abs_diff_eq!(z.records[0].bound_value, 1.0, epsilon = 1e-9);
        match mz_general_kadec_verify(&TriangularFamily::canonical(), 0.05, &d, 3, 4) {
            Err(Error::InvalidInput(m)) => assert!(m.contains("threshold")),
            other => panic!("expected threshold error, got {other:?}"),
        }
    }
}
