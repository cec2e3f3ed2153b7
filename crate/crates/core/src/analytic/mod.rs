//! Numerical realizations of the analytic objects attached to a periodic
//! spectrum: Poisson kernel sums, generating-function weights and their
//! Muckenhoupt constants, the phase function, perturbation suprema, the
//! counting-function diagnostic, and the sharpness computations.

mod counting;
mod kernel;
mod phase;
mod sharpness;
mod weight;

pub use counting::{counting_diagnostic, counting_function, CountingDiagnostic, CountingGrid};
pub use kernel::{
    periodic_kernel_antiderivative, poisson_kernel_periodic, poisson_kernel_truncated,
    truncation_tail_bound,
};
pub use phase::{phase_alpha, tau_sup, tau_sup_stable, PhaseGrid, TauSup};
pub use sharpness::{
    nu_bound_check, nu_bound_value, phi_decay_check, phi_generators, phi_l, NuCheck, PhiDecay,
};
pub use weight::{
    a2_constant, periodic_weight, stable_weight_extrema, weight_extrema, WeightExtrema, WeightGrid,
};

/// Default samples per period for grid-based suprema.
pub const DEFAULT_GRID_SIZE: usize = 4096;
/// Largest grid reached by automatic refinement.
pub const MAX_GRID_SIZE: usize = 1 << 20;
/// Relative change below which a refined grid quantity counts as stable.
pub const STABILITY_TOL: f64 = 1e-8;

/// Outcome of doubling a grid until a quantity settles.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Refined<T> {
    pub value: T,
    pub grid_size: usize,
    /// Set when the maximal grid was reached before the quantity settled.
    pub precision_warning: bool,
}

pub(crate) fn refine_until_stable<T, F, D>(
    start: usize,
    mut eval: F,
    mut rel_change: D,
) -> Refined<T>
where
    F: FnMut(usize) -> T,
    D: FnMut(&T, &T) -> f64,
{
    let mut grid = start.max(2);
    let mut current = eval(grid);
    while grid < MAX_GRID_SIZE {
        let next_grid = grid * 2;
        let next = eval(next_grid);
        let change = rel_change(&current, &next);
        current = next;
        grid = next_grid;
        if change < STABILITY_TOL {
            return Refined {
                value: current,
                grid_size: grid,
                precision_warning: false,
            };
        }
    }
    Refined {
        value: current,
        grid_size: grid,
        precision_warning: true,
    }
}

pub(crate) fn relative_change(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a maximizer of `f` on `[a, b]`; returns the
/// best point seen and its value.
pub(crate) fn golden_max<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..80 {
        if (b - a).abs() <= 1e-13 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
