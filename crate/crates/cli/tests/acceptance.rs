//! Acceptance checks, one PASS/FAIL line each. Exits nonzero if any fails.

use std::f64::consts::PI;
use std::time::Instant;

use rand::Rng;
use serde_json::Value;

use riesz_cli::{run_with_args, validate_report};
use riesz_core::analytic::{
    a2_constant, counting_diagnostic, nu_bound_check, phi_decay_check, poisson_kernel_periodic,
    poisson_kernel_truncated, stable_weight_extrema, tau_sup, truncation_tail_bound, WeightGrid,
};
use riesz_core::bounds::{mz_kadec_bound, periodic_bound, sine_type_bound};
use riesz_core::mz::mz_kadec_verify;
use riesz_core::spectra::{
    counterexample_family, make_perturbation, roots_of_unity, seeded_rng, PeriodicSpectrum,
    PerturbationKind,
};
use riesz_core::suites::{
    avdonin_verify, gautschi_verify, random_periodic_spectrum, sine_type_height, sine_type_verify,
    AvdoninConfig, VerifyReport,
};
use riesz_core::vandermonde::inverse_norm;
use riesz_core::{bounds::gautschi_bound, exact_bounds, NodeSet};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn clean(v: &VerifyReport) -> Result<(), String> {
    ensure(
        v.summary.fail_count == 0 && v.summary.pass_count > 0,
        || {
            let worst = v.records.iter().filter(|r| !r.pass).take(3).map(|r| {
                format!(
                    "trial {} d {} {} margin_log {:.3e}",
                    r.trial,
                    r.d,
                    r.bound_name.as_str(),
                    r.margin_log
                )
            });
            format!(
                "{}: {} failures ({})",
                v.suite,
                v.summary.fail_count,
                worst.collect::<Vec<_>>().join("; ")
            )
        },
    )
}

fn c1_orthonormal() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for d in 1..=256 {
        let b = exact_bounds(&roots_of_unity(d).map_err(err)?).map_err(err)?;
        worst = worst.max((b.a - 1.0).abs()).max((b.b - 1.0).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(worst <= 1e-10, || format!("max deviation {worst:.3e}"))?;
    ensure(secs < 30.0, || format!("took {secs:.1}s"))?;
    Ok(format!("max |A-1|,|B-1| = {worst:.2e}, {secs:.2}s"))
}

fn c2_kadec() -> Outcome {
    let ds: Vec<usize> = (1..=64).collect();
    let mut n = 0;
    for (i, mu) in [0.05, 0.1, 0.2, 0.24].into_iter().enumerate() {
        let v = mz_kadec_verify(&ds, mu, 500, 100 + i as u64).map_err(err)?;
        clean(&v)?;
        // independent restatement of the two inequalities
        let lower = mz_kadec_bound(mu).map_err(err)?.value;
        for r in &v.records {
            ensure(r.a_exact >= lower - 1e-9 && r.b_exact <= 8.0 + 1e-9, || {
                format!("mu {mu} trial {}: A {} B {}", r.trial, r.a_exact, r.b_exact)
            })?;
        }
        n += v.records.len();
    }
    Ok(format!("{n} checks over 4 x 500 trials"))
}

fn c3_avdonin() -> Outcome {
    let v = avdonin_verify(AvdoninConfig::default(), 3).map_err(err)?;
    clean(&v)?;
    ensure(v.records.len() == 200, || {
        format!("{} records", v.records.len())
    })?;
    let min = v.summary.min_margin_log.unwrap_or(f64::NAN);
    Ok(format!("200 trials, min log margin {min:.3}"))
}

fn c4_sine_type() -> Outcome {
    let v = sine_type_verify(100, 16, 4).map_err(err)?;
    clean(&v)?;
    // recompute a handful of trials from scratch
    let mut rng = seeded_rng(44);
    for _ in 0..10 {
        let k = rng.random_range(1..=16);
        let s = random_periodic_spectrum(&mut rng, k).map_err(err)?;
        let y = sine_type_height(k);
        let delta = s.separation();
        let ext = stable_weight_extrema(&s, y).map_err(err)?.value;
        let nodes = NodeSet::new(
            s.points_in_period()
                .iter()
                .map(|p| p / k as f64)
                .collect::<Vec<_>>(),
        )
        .map_err(err)?;
        let a = exact_bounds(&nodes).map_err(err)?.a;
        let lb = sine_type_bound(delta, y, ext.m, ext.big_m).map_err(err)?;
        let pb = periodic_bound(delta, k).map_err(err)?;
        ensure(
            a.ln() >= lb.log_value - 1e-9 && a.ln() >= pb.log_value - 1e-9,
            || {
                format!(
                    "K {k}: A {a:e}, sine-type {:e}, periodic {:e}",
                    lb.value, pb.value
                )
            },
        )?;
    }
    Ok(format!("{} checks, 10 recomputed", v.records.len()))
}

fn c5_sharpness() -> Outcome {
    let mut a = Vec::new();
    for l in 2..=5 {
        let p = phi_decay_check(l).map_err(err)?;
        ensure(p.a_exact <= p.s_l + p.tail, || {
            format!("L {l}: A {} > S+tail {}", p.a_exact, p.s_l + p.tail)
        })?;
        ensure(p.s_l + p.tail <= 8.0 / PI.powi(l as i32) + p.tail, || {
            format!("L {l}: S {} > 8/pi^L", p.s_l)
        })?;
        ensure(p.pass, || format!("L {l}: check reports failure"))?;
        a.push(p.a_exact);
    }
    ensure(a[3] < a[0] / 10.0, || {
        format!("A(5) {} vs A(2) {}", a[3], a[0])
    })?;
    Ok(format!("A(2) {:.3e}, A(5) {:.3e}", a[0], a[3]))
}

/// Frozen from the Jacobi-rotation oracle in the core tests.
const COUNTER_GOLDEN: [(usize, f64); 4] = [
    (5, 2.4606705220292843e-1),
    (15, 1.449552441244933e-1),
    (45, 9.522331239297818e-2),
    (135, 6.71868075635251e-2),
];

fn c6_counterexample() -> Outcome {
    let mut prev = f64::INFINITY;
    for (d, golden) in COUNTER_GOLDEN {
        let a = exact_bounds(&counterexample_family(d).map_err(err)?)
            .map_err(err)?
            .a;
        ensure((a - golden).abs() <= 1e-8, || {
            format!("d {d}: {a} vs golden {golden}")
        })?;
        ensure(a < prev, || format!("d {d}: {a} not below {prev}"))?;
        prev = a;
    }
    Ok("strictly decreasing, matches golden data".into())
}

fn c7_gautschi() -> Outcome {
    let v = gautschi_verify(200, 24, 7).map_err(err)?;
    clean(&v)?;
    let theta = counterexample_family(24).map_err(err)?;
    let inv = inverse_norm(&theta).map_err(err)?;
    let g = gautschi_bound(&theta).value;
    ensure(inv <= g, || format!("counterexample d 24: {inv} > {g}"))?;
    Ok(format!("{} trials", v.records.len()))
}

fn c8_poisson() -> Outcome {
    let terms = 10_000;
    let mut n = 0;
    for iy in 0..8 {
        let y = 0.05 * 2f64.powi(iy);
        for it in 0..32 {
            let t = -0.5 + it as f64 / 32.0;
            let closed = poisson_kernel_periodic(t, y, 1.0).map_err(err)?;
            let trunc = poisson_kernel_truncated(t, y, 1.0, terms).map_err(err)?;
            let tail = truncation_tail_bound(t, y, 1.0, terms);
            ensure((closed - trunc).abs() <= tail + 1e-12, || {
                format!("t {t} y {y}: diff {:e} > tail {tail:e}", closed - trunc)
            })?;
            n += 1;
        }
    }
    for y in [2.0, 2.5, 3.0, 5.0] {
        for it in 0..16 {
            let v = poisson_kernel_periodic(it as f64 / 16.0, y, 1.0).map_err(err)?;
            let allowed = 6.0 * PI * (-2.0 * PI * y).exp();
            ensure((v - PI).abs() <= allowed, || {
                format!("y {y}: |{v} - pi| > {allowed:e}")
            })?;
            n += 1;
        }
    }
    Ok(format!("{n} points"))
}

fn c9_a2() -> Outcome {
    let flat = WeightGrid::from_samples(3.0, vec![1.0; 1024]).map_err(err)?;
    let c = a2_constant(&flat, 1.0).map_err(err)?;
    ensure((c - 1.0).abs() <= 1e-12, || {
        format!("constant weight gives {c}")
    })?;
    let mut rng = seeded_rng(9);
    for trial in 0..20 {
        let g = 256 << rng.random_range(0..3);
        let samples: Vec<f64> = (0..g)
            .map(|_| rng.random_range(-3.0f64..3.0).exp())
            .collect();
        let w = WeightGrid::from_samples(rng.random_range(0.5..8.0), samples).map_err(err)?;
        let mut prev = 0.0;
        for s in [1.0 / 64.0, 1.0 / 16.0, 0.25, 0.5, 1.0] {
            let v = a2_constant(&w, s).map_err(err)?;
            ensure(v >= prev * (1.0 - 1e-12), || {
                format!("trial {trial}: scale {s} gives {v} < {prev}")
            })?;
            prev = v;
        }
    }
    Ok(format!(
        "constant weight {c:.15}, 20 random weights monotone"
    ))
}

fn c10_tau() -> Outcome {
    let mut rng = seeded_rng(10);
    let mut worst = f64::INFINITY;
    for i in 0..50 {
        let d = rng.random_range(1..=12);
        let mu_max = rng.random_range(0.01..0.24);
        let pert = make_perturbation(PerturbationKind::UniformKadec { mu_max }, d, rng.random())
            .map_err(err)?;
        let y = rng.random_range(0.05..3.0);
        let tau = tau_sup(d, &pert, y, 1024).map_err(err)?.value;
        let q = (-2.0 * PI * y).exp();
        let bound = pert.sup_norm * PI * (1.0 + q) / (1.0 - q);
        ensure(tau <= bound + 1e-8, || {
            format!("case {i}: tau {tau} > {bound}")
        })?;
        worst = worst.min(bound - tau);
    }
    Ok(format!("50 cases, min slack {worst:.3e}"))
}

fn c11_counting() -> Outcome {
    let mut specs = vec![PeriodicSpectrum::from_points(1, &[0.0]).map_err(err)?];
    let mut rng = seeded_rng(11);
    // the window must cover four periods, so K <= 4 at W = 16
    for _ in 0..10 {
        let k = rng.random_range(1..=4);
        specs.push(random_periodic_spectrum(&mut rng, k).map_err(err)?);
    }
    let mut worst = 0.0f64;
    for (i, s) in specs.iter().enumerate() {
        let r = counting_diagnostic(s, 1.0, 16.0, 4096)
            .map_err(err)?
            .consistency_residual;
        ensure(r < 1e-2, || format!("spectrum {i}: residual {r:e}"))?;
        worst = worst.max(r);
    }
    Ok(format!("11 spectra, max residual {worst:.2e}"))
}

fn c12_nu() -> Outcome {
    let mut rng = seeded_rng(12);
    for i in 0..50 {
        let k = rng.random_range(1..=16);
        let s = random_periodic_spectrum(&mut rng, k).map_err(err)?;
        let y = rng.random_range(0.05..2.0);
        let c = nu_bound_check(&s, y, 2048).map_err(err)?;
        ensure(c.max_abs_nu <= c.bound + 1e-6, || {
            format!("case {i}: max|nu| {} > {}", c.max_abs_nu, c.bound)
        })?;
        ensure(c.max_nu <= 0.0, || {
            format!("case {i}: nu reaches {}", c.max_nu)
        })?;
        ensure(c.pass, || format!("case {i}: check reports failure"))?;
    }
    Ok("50 cases".into())
}

fn run(args: &[&str]) -> Result<String, String> {
    let argv = std::iter::once("riesz")
        .chain(args.iter().copied())
        .map(String::from)
        .collect();
    let (mut out, mut errb) = (Vec::new(), Vec::new());
    let code = run_with_args(argv, &mut out, &mut errb);
    ensure(code == 0, || {
        format!("{args:?} exited {code}: {}", String::from_utf8_lossy(&errb))
    })?;
    String::from_utf8(out).map_err(err)
}

fn c13_determinism() -> Outcome {
    let suites: [&[&str]; 6] = [
        &[
            "verify", "--suite", "kadec", "--trials", "50", "--seed", "13",
        ],
        &[
            "verify",
            "--suite",
            "general-kadec",
            "--trials",
            "20",
            "--dmax",
            "32",
            "--seed",
            "13",
        ],
        &[
            "verify", "--suite", "avdonin", "--trials", "30", "--seed", "13",
        ],
        &[
            "verify",
            "--suite",
            "sine-type",
            "--trials",
            "10",
            "--seed",
            "13",
        ],
        &[
            "verify", "--suite", "gautschi", "--trials", "30", "--seed", "13",
        ],
        &[
            "verify",
            "--suite",
            "general-stability",
            "--trials",
            "5",
            "--dmax",
            "8",
            "--seed",
            "13",
        ],
    ];
    for args in suites {
        let a = run(args)?;
        ensure(a == run(args)?, || format!("{args:?}: reruns differ"))?;
        let v: Value = serde_json::from_str(&a).map_err(err)?;
        validate_report(&v).map_err(|e| format!("{args:?}: {e}"))?;
        let mut csv_args = args.to_vec();
        csv_args.extend(["--format", "csv"]);
        ensure(run(&csv_args)? == run(&csv_args)?, || {
            format!("{args:?}: csv reruns differ")
        })?;
    }
    Ok("6 suites byte-identical in JSON and CSV, schema valid".into())
}

fn main() {
    let criteria: [Criterion; 13] = [
        ("orthonormal identity", c1_orthonormal),
        ("kadec dominance", c2_kadec),
        ("avdonin dominance", c3_avdonin),
        ("sine-type dominance", c4_sine_type),
        ("sharpness decay", c5_sharpness),
        ("counterexample decay", c6_counterexample),
        ("gautschi", c7_gautschi),
        ("poisson identity", c8_poisson),
        ("a2 estimator", c9_a2),
        ("tau kernel bound", c10_tau),
        ("phase/counting consistency", c11_counting),
        ("nu bound", c12_nu),
        ("cli determinism", c13_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 13 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
