use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use riesz_core::analytic::{
    a2_constant, counting_diagnostic, periodic_weight, phase_alpha, phi_decay_check,
    poisson_kernel_periodic, poisson_kernel_truncated, truncation_tail_bound, weight_extrema,
};
use riesz_core::bounds::{self, BoundName, BoundReport, BoundValue};
use riesz_core::exact_bounds;
use riesz_core::mz::{
    mz_general_kadec_verify, mz_kadec_verify, mz_scan, FamilyKind, TriangularFamily,
};
use riesz_core::suites::{
    avdonin_verify, gautschi_verify, general_stability_verify, sine_type_verify, AvdoninConfig,
};
use riesz_core::vandermonde::NEAR_SINGULAR_SIGMA;

use crate::error::CliError;
use crate::nodes::{parse_node_spec, MAX_GENERATED_D};
use crate::report::{to_value, Column, Format, Report};

#[derive(Debug, Parser)]
#[command(
    name = "riesz",
    version,
    about = "Exact and theoretical Riesz basis bounds for periodic exponential systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// File of `key = value` lines mirroring the flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundKind {
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
    MzAvdonin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Canonical,
    Kadec,
    Avdonin,
    Counter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Kadec,
    GeneralKadec,
    Avdonin,
    SineType,
    Gautschi,
    GeneralStability,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact lower and upper bounds of a node set.
    Exact {
        #[arg(long)]
        nodes: String,
    },
    /// Evaluate one closed-form bound, optionally against a node set.
    Bound {
        #[arg(value_enum)]
        name: BoundKind,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        l: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        mu_star: Option<f64>,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        y: Option<f64>,
        #[arg(long)]
        m: Option<f64>,
        #[arg(long)]
        big_m: Option<f64>,
        #[arg(long)]
        y0: Option<f64>,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        k: Option<usize>,
        /// Compare against the exact bounds of these nodes.
        #[arg(long)]
        nodes: Option<String>,
    },
    /// Exact bounds of a triangular family over a range of dimensions.
    Sweep {
        #[arg(long, value_enum, default_value_t = FamilyArg::Canonical)]
        family: FamilyArg,
        #[arg(long, default_value_t = 0.2)]
        mu_max: f64,
        #[arg(long, default_value_t = 0.4)]
        l: f64,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 0.1)]
        mu_star: f64,
        #[arg(long, default_value_t = 1)]
        dmin: usize,
        #[arg(long, default_value_t = 64)]
        dmax: usize,
        /// Comma-separated dimensions; overrides the range.
        #[arg(long)]
        d_list: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Randomized verification suite; exits 1 on any failed check.
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 64)]
        dmax: usize,
        #[arg(long, default_value_t = 0.24)]
        mu_max: f64,
        /// Perturbation size for the general Kadec suite.
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long, default_value_t = 16)]
        kmax: usize,
        #[arg(long, default_value_t = 0.3)]
        l_min: f64,
        #[arg(long, default_value_t = 2.0)]
        l_max: f64,
        #[arg(long, default_value_t = 0.2)]
        mu_star_max: f64,
        #[arg(long, default_value_t = 0.05)]
        min_separation: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generating-function weight of the spectrum and its A2 estimate.
    A2 {
        #[arg(long)]
        nodes: String,
        #[arg(long, default_value_t = 1.0)]
        y: f64,
        #[arg(long, default_value_t = 4096)]
        grid_size: usize,
        #[arg(long, default_value_t = 1.0)]
        max_scale_periods: f64,
    },
    /// Phase function on one period, optionally with the counting diagnostic.
    Phase {
        #[arg(long)]
        nodes: String,
        #[arg(long, default_value_t = 1.0)]
        y: f64,
        #[arg(long, default_value_t = 4096)]
        grid_size: usize,
        /// Half-width W of the counting window.
        #[arg(long)]
        window: Option<f64>,
    },
    /// Closed-form periodic Poisson sum against the truncated direct sum.
    CheckPoisson {
        #[arg(long, default_value_t = 1.0)]
        period: f64,
        #[arg(long, default_value_t = 10_000)]
        terms: usize,
    },
    /// Sharpness example: exact A of the phi_L spectrum against its decay bound.
    PhiDecay {
        /// Single L; default runs L = 2..=5.
        #[arg(long)]
        l: Option<usize>,
    },
}

const CHECK_COLUMNS: [Column; 11] = [
    ("trial", "trial"),
    ("d", "d"),
    ("delta_circ", "delta_circ"),
    ("A_exact", "a_exact"),
    ("B_exact", "b_exact"),
    ("bound_name", "bound_name"),
    ("bound_value", "bound_value"),
    ("bound_value_log", "bound_value_log"),
    ("compared", "compared"),
    ("margin_log", "margin_log"),
    ("pass", "pass"),
];

pub fn dispatch(cmd: &Command) -> Result<Report, CliError> {
    match cmd {
        Command::Exact { nodes } => exact(nodes),
        Command::Bound { .. } => bound(cmd),
        Command::Sweep {
            family,
            mu_max,
            l,
            n,
            mu_star,
            dmin,
            dmax,
            d_list,
            seed,
        } => {
            let kind = match family {
                FamilyArg::Canonical => FamilyKind::Canonical,
                FamilyArg::Kadec => FamilyKind::KadecPerturbed { mu_max: *mu_max },
                FamilyArg::Avdonin => FamilyKind::AvdoninBlock {
                    l: *l,
                    n: *n,
                    mu_star: *mu_star,
                },
                FamilyArg::Counter => FamilyKind::Counterexample,
            };
            let ds = match d_list {
                Some(list) => parse_d_list(list)?,
                None => {
                    if *dmin == 0 || dmin > dmax {
                        return Err(CliError::parse(format!(
                            "--dmin {dmin} / --dmax {dmax}: need 1 <= dmin <= dmax"
                        )));
                    }
                    (*dmin..=*dmax)
                        .filter(|d| *family != FamilyArg::Avdonin || *n == 0 || d % n == 0)
                        .collect()
                }
            };
            sweep(TriangularFamily::new(kind, *seed), &ds)
        }
        Command::Verify { .. } => verify(cmd),
        Command::A2 {
            nodes,
            y,
            grid_size,
            max_scale_periods,
        } => a2(nodes, *y, *grid_size, *max_scale_periods),
        Command::Phase {
            nodes,
            y,
            grid_size,
            window,
        } => phase(nodes, *y, *grid_size, *window),
        Command::CheckPoisson { period, terms } => check_poisson(*period, *terms),
        Command::PhiDecay { l } => phi_decay(*l),
    }
}

fn parse_d_list(list: &str) -> Result<Vec<usize>, CliError> {
    list.split(',')
        .enumerate()
        .map(|(i, s)| {
            s.trim()
                .parse::<usize>()
                .ok()
                .filter(|d| *d > 0)
                .ok_or_else(|| {
                    CliError::parse(format!(
                        "--d-list entry {}: '{}' is not a positive integer",
                        i + 1,
                        s.trim()
                    ))
                })
        })
        .collect()
}

fn check_dimension(d: usize) -> Result<(), CliError> {
    if d > MAX_GENERATED_D {
        return Err(CliError::parse(format!(
            "dimension {d} exceeds {MAX_GENERATED_D}"
        )));
    }
    Ok(())
}

fn exact(spec: &str) -> Result<Report, CliError> {
    let theta = parse_node_spec(spec)?;
    let b = exact_bounds(&theta)?;
    if b.sigma_min < NEAR_SINGULAR_SIGMA {
        return Err(riesz_core::Error::NearSingular {
            d: theta.d(),
            sigma_min: b.sigma_min,
        }
        .into());
    }
    let mut r = Report::new(
        "exact",
        vec![
            ("d", "d"),
            ("A", "a"),
            ("B", "b"),
            ("sigma_min", "sigma_min"),
            ("sigma_max", "sigma_max"),
            ("delta_circ", "delta_circ"),
        ],
    )
    .param("nodes", spec);
    r.records.push(json!({
        "d": theta.d(),
        "a": b.a,
        "b": b.b,
        "sigma_min": b.sigma_min,
        "sigma_max": b.sigma_max,
        "delta_circ": theta.separation(),
    }));
    r.tally();
    Ok(r)
}

fn need<T: Copy>(v: Option<T>, flag: &str, name: BoundKind) -> Result<T, CliError> {
    v.ok_or_else(|| {
        CliError::parse(format!(
            "bound {}: missing --{flag}",
            name.to_possible_value().expect("named").get_name()
        ))
    })
}

fn bound(cmd: &Command) -> Result<Report, CliError> {
    let Command::Bound {
        name,
        mu,
        delta,
        l,
        n,
        mu_star,
        rho,
        y,
        m,
        big_m,
        y0,
        tau,
        a,
        k,
        nodes,
    } = cmd
    else {
        unreachable!()
    };
    let name = *name;
    let theta = nodes.as_deref().map(parse_node_spec).transpose()?;
    let f = |v: Option<f64>, flag: &str| need(v, flag, name);
    let (bname, params, value): (BoundName, Vec<(&str, f64)>, BoundValue) = match name {
        BoundKind::Kadec => {
            let mu = f(*mu, "mu")?;
            (BoundName::Kadec, vec![("mu", mu)], bounds::kadec_bound(mu)?)
        }
        BoundKind::MzKadec => {
            let mu = f(*mu, "mu")?;
            (
                BoundName::MzKadec,
                vec![("mu", mu)],
                bounds::mz_kadec_bound(mu)?,
            )
        }
        BoundKind::Avdonin => {
            let (d, l, n, s) = (
                f(*delta, "delta")?,
                f(*l, "l")?,
                need(*n, "n", name)?,
                f(*mu_star, "mu-star")?,
            );
            (
                BoundName::Avdonin,
                vec![("delta", d), ("l", l), ("n", n as f64), ("mu_star", s)],
                bounds::avdonin_bound(d, l, n, s)?,
            )
        }
        BoundKind::MzAvdonin => {
            let (d, l, n, r) = (
                f(*delta, "delta")?,
                f(*l, "l")?,
                need(*n, "n", name)?,
                f(*rho, "rho")?,
            );
            (
                BoundName::MzAvdonin,
                vec![("delta", d), ("l", l), ("n", n as f64), ("rho", r)],
                bounds::mz_avdonin_bound(d, l, n, r)?,
            )
        }
        BoundKind::SineType => {
            let (d, y, m, bm) = (
                f(*delta, "delta")?,
                f(*y, "y")?,
                f(*m, "m")?,
                f(*big_m, "big-m")?,
            );
            (
                BoundName::SineType,
                vec![("delta", d), ("y", y), ("m", m), ("big_m", bm)],
                bounds::sine_type_bound(d, y, m, bm)?,
            )
        }
        BoundKind::GeneralStability => {
            let (d, y0, t) = (f(*delta, "delta")?, f(*y0, "y0")?, f(*tau, "tau")?);
            (
                BoundName::GeneralStability,
                vec![("delta", d), ("y0", y0), ("tau", t)],
                bounds::general_stability_bound(d, y0, t)?,
            )
        }
        BoundKind::Bessel => {
            let d = f(*delta, "delta")?;
            (
                BoundName::Bessel,
                vec![("delta", d)],
                bounds::bessel_upper(d)?,
            )
        }
        BoundKind::Ingham => {
            let (a, d) = (f(*a, "a")?, f(*delta, "delta")?);
            (
                BoundName::Ingham,
                vec![("a", a), ("delta", d)],
                bounds::ingham_bound(a, d)?,
            )
        }
        BoundKind::Periodic => {
            let (d, k) = (f(*delta, "delta")?, need(*k, "k", name)?);
            (
                BoundName::Periodic,
                vec![("delta", d), ("k", k as f64)],
                bounds::periodic_bound(d, k)?,
            )
        }
        BoundKind::Gautschi => {
            let t = theta
                .as_ref()
                .ok_or_else(|| CliError::parse("bound gautschi: missing --nodes"))?;
            (
                BoundName::Gautschi,
                vec![("d", t.d() as f64)],
                bounds::gautschi_bound(t),
            )
        }
        BoundKind::BasisPerturbation => {
            let (a, d, mu) = (f(*a, "a")?, f(*delta, "delta")?, f(*mu, "mu")?);
            (
                BoundName::BasisPerturbation,
                vec![("a", a), ("delta", d), ("mu", mu)],
                bounds::basis_perturbation_bound(a, d, mu)?,
            )
        }
        BoundKind::HsRatio => {
            let (m, bm) = (f(*m, "m")?, f(*big_m, "big-m")?);
            (
                BoundName::HsRatio,
                vec![("m", m), ("big_m", bm)],
                bounds::hs_ratio_bound(m, bm)?,
            )
        }
    };
    let mut report = BoundReport::new(bname, &params, value);
    if let Some(t) = &theta {
        let e = exact_bounds(t)?;
        let compared = match bname {
            BoundName::Gautschi => 1.0 / e.sigma_min,
            n if n.is_upper() => e.b,
            _ => e.a,
        };
        report = report.compare(compared);
    }
    let mut r = Report::new(
        "bound",
        vec![
            ("bound_name", "bound_name"),
            ("bound_value", "bound_value"),
            ("bound_value_log", "bound_value_log"),
            ("compared", "compared"),
            ("margin", "margin"),
            ("margin_log", "margin_log"),
            ("pass", "pass"),
        ],
    )
    .param("name", bname.as_str());
    for (k, v) in &params {
        r = r.param(k, v);
    }
    if let Some(spec) = nodes {
        r = r.param("nodes", spec);
    }
    let mut rec = json!({
        "bound_name": bname.as_str(),
        "params": to_value(&report.params),
        "bound_value": report.bound.value,
        "bound_value_log": report.bound.log_value,
    });
    if let Some(c) = report.comparison {
        rec["compared"] = c.exact.into();
        rec["margin"] = c.margin.into();
        rec["margin_log"] = c.margin_log.into();
        rec["pass"] = c.pass.into();
    }
    r.records.push(rec);
    r.tally();
    Ok(r)
}

fn sweep(family: TriangularFamily, ds: &[usize]) -> Result<Report, CliError> {
    check_dimension(ds.iter().copied().max().unwrap_or(0))?;
    let scan = mz_scan(&family, ds)?;
    let mut r = Report::new(
        "sweep",
        vec![
            ("d", "d"),
            ("delta_circ", "delta_circ"),
            ("A_exact", "a_exact"),
            ("B_exact", "b_exact"),
            ("bound_name", "bound_name"),
            ("bound_value_log", "bound_value_log"),
            ("margin_log", "margin_log"),
            ("pass", "pass"),
        ],
    )
    .param("family", &family.kind)
    .param("d_values", ds);
    r.seed = Some(family.seed);
    r.records = scan.checks.iter().map(to_value).collect();
    r.tally();
    r.summary.insert("a_inf".into(), scan.a_inf.into());
    r.summary.insert("b_sup".into(), scan.b_sup.into());
    r.summary.insert("delta".into(), scan.delta.into());
    r.summary
        .insert("range_restricted".into(), scan.range_restricted.into());
    Ok(r)
}

fn verify(cmd: &Command) -> Result<Report, CliError> {
    let Command::Verify {
        suite,
        trials,
        dmax,
        mu_max,
        mu,
        kmax,
        l_min,
        l_max,
        mu_star_max,
        min_separation,
        seed,
    } = cmd
    else {
        unreachable!()
    };
    if *dmax == 0 {
        return Err(CliError::parse("--dmax must be positive"));
    }
    check_dimension(*dmax)?;
    let ds: Vec<usize> = (1..=*dmax).collect();
    let v = match suite {
        SuiteArg::Kadec => mz_kadec_verify(&ds, *mu_max, *trials, *seed)?,
        SuiteArg::GeneralKadec => mz_general_kadec_verify(
            &TriangularFamily::canonical(),
            mu.unwrap_or(1.0 / (32.0 * PI)),
            &ds,
            *trials,
            *seed,
        )?,
        SuiteArg::Avdonin => avdonin_verify(
            AvdoninConfig {
                trials: *trials,
                dmax: *dmax,
                l_min: *l_min,
                l_max: *l_max,
                mu_star_max: *mu_star_max,
                min_separation: *min_separation,
            },
            *seed,
        )?,
        SuiteArg::SineType => sine_type_verify(*trials, *kmax, *seed)?,
        SuiteArg::Gautschi => gautschi_verify(*trials, *dmax, *seed)?,
        SuiteArg::GeneralStability => general_stability_verify(*trials, *dmax, *seed)?,
    };
    Ok(Report::from_verify(&v, CHECK_COLUMNS.to_vec()))
}

fn a2(spec: &str, y: f64, grid: usize, scale: f64) -> Result<Report, CliError> {
    let theta = parse_node_spec(spec)?;
    let w = periodic_weight(&theta.spectrum(), y, grid)?;
    let a2 = a2_constant(&w, scale)?;
    let ext = weight_extrema(&w);
    let mut r = Report::new("a2", vec![("x", "x"), ("value", "value")])
        .param("nodes", spec)
        .param("y", y)
        .param("grid_size", grid)
        .param("max_scale_periods", scale);
    r.records = (0..w.grid_size())
        .map(|i| json!({"x": w.x(i), "value": w.samples()[i]}))
        .collect();
    r.tally();
    r.summary.insert("a2_estimate".into(), a2.into());
    r.summary
        .insert("a2_estimate_kind".into(), "lower_estimate".into());
    r.summary.insert("m".into(), ext.m.into());
    r.summary.insert("big_m".into(), ext.big_m.into());
    r.summary.insert("ratio".into(), ext.ratio().into());
    r.summary.insert(
        "scale".into(),
        "weight defined up to a positive constant".into(),
    );
    r.csv_header = Some(json!({
        "period": w.period(),
        "y": y,
        "grid_size": grid,
        "quadrature": "trapezoid",
        "a2_estimate": a2,
    }));
    Ok(r)
}

fn phase(spec: &str, y: f64, grid: usize, window: Option<f64>) -> Result<Report, CliError> {
    let theta = parse_node_spec(spec)?;
    let s = theta.spectrum();
    let alpha = phase_alpha(&s, y, grid)?;
    let mut r = Report::new("phase", vec![("x", "x"), ("value", "value")])
        .param("nodes", spec)
        .param("y", y)
        .param("grid_size", grid);
    r.records = alpha
        .samples
        .iter()
        .enumerate()
        .map(|(i, v)| json!({"x": alpha.x(i), "value": v}))
        .collect();
    r.tally();
    r.summary
        .insert("period_drift".into(), alpha.period_drift().into());
    let mut header = json!({
        "period": alpha.period,
        "y": y,
        "grid_size": grid,
        "quadrature": alpha.quadrature,
    });
    if let Some(wdw) = window {
        r = r.param("window", wdw);
        let c = counting_diagnostic(&s, y, wdw, grid)?;
        r.summary
            .insert("consistency_residual".into(), c.consistency_residual.into());
        r.summary
            .insert("fitted_constant".into(), c.constant.into());
        header["consistency_residual"] = c.consistency_residual.into();
    }
    r.csv_header = Some(header);
    Ok(r)
}

fn check_poisson(period: f64, terms: usize) -> Result<Report, CliError> {
    if !(period > 0.0) {
        return Err(CliError::parse("--period must be positive"));
    }
    let mut r = Report::new(
        "check-poisson",
        vec![
            ("check", "check"),
            ("t", "t"),
            ("y", "y"),
            ("closed", "closed"),
            ("reference", "reference"),
            ("difference", "difference"),
            ("allowed", "allowed"),
            ("pass", "pass"),
        ],
    )
    .param("period", period)
    .param("terms", terms);
    for iy in 0..8 {
        let y = period * 0.05 * 2f64.powi(iy);
        for it in 0..32 {
            let t = period * (-0.5 + it as f64 / 32.0);
            let closed = poisson_kernel_periodic(t, y, period)?;
            let trunc = poisson_kernel_truncated(t, y, period, terms)?;
            let tail = truncation_tail_bound(t, y, period, terms);
            let diff = closed - trunc;
            r.records.push(json!({
                "check": "truncation", "t": t, "y": y, "closed": closed, "reference": trunc,
                "difference": diff, "allowed": tail,
                "pass": diff >= -1e-12 && diff <= tail + 1e-12,
            }));
        }
    }
    for &y in &[2.0, 2.5, 3.0, 4.0] {
        for it in 0..8 {
            let t = it as f64 / 8.0;
            let v = poisson_kernel_periodic(t, y, 1.0)?;
            let allowed = 6.0 * PI * (-2.0 * PI * y).exp();
            r.records.push(json!({
                "check": "large_y", "t": t, "y": y, "closed": v, "reference": PI,
                "difference": v - PI, "allowed": allowed, "pass": (v - PI).abs() <= allowed,
            }));
        }
    }
    r.tally();
    Ok(r)
}

fn phi_decay(l: Option<usize>) -> Result<Report, CliError> {
    let ls: Vec<usize> = match l {
        Some(l) => vec![l],
        None => (2..=5).collect(),
    };
    let mut r = Report::new(
        "phi-decay",
        vec![
            ("l", "l"),
            ("s_l", "s_l"),
            ("tail", "tail"),
            ("a_exact", "a_exact"),
            ("decay_bound", "decay_bound"),
            ("pass", "pass"),
        ],
    )
    .param("l_values", &ls);
    for l in ls {
        r.records.push(to_value(&phi_decay_check(l)?));
    }
    r.tally();
    Ok(r)
}
