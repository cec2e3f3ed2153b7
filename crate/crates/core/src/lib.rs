//! Exact and theoretical lower Riesz basis bounds for periodic exponential
//! systems.
//!
//! A set of `d` nodes on the circle generates the `d`-periodic spectrum
//! `d*theta_j + d*Z`, whose Riesz bounds in `L^2[0, 1]` equal the extreme
//! squared singular values of the node Vandermonde matrix divided by `d`.
//! [`vandermonde`] computes those exactly; [`bounds`] evaluates the closed
//! form lower bounds (Kadec, Avdonin, sine-type, ...) that the verification
//! suites in [`mz`] and [`suites`] check against them. [`analytic`] holds
//! the weights, kernels and phase functions that feed the bounds.
//!
//! ```
//! use riesz_core::{exact_bounds, NodeSet};
//! use riesz_core::bounds::{mz_kadec_bound, BoundName, BoundReport};
//!
//! let theta = NodeSet::new(vec![0.0, 0.27, 0.49, 0.77])?;
//! let exact = exact_bounds(&theta)?;
//! let report = BoundReport::new(BoundName::MzKadec, &[("mu", 0.1)], mz_kadec_bound(0.1)?)
//!     .compare(exact.a);
//! assert!(report.comparison.unwrap().pass);
//! # Ok::<(), riesz_core::Error>(())
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod bounds;
pub mod error;
pub mod mz;
pub mod spectra;
pub mod suites;
pub mod vandermonde;

pub use error::{Error, Result};
pub use spectra::{NodeSet, PeriodicSpectrum, PerturbationKind, PerturbationSpec};
pub use vandermonde::{exact_bounds, ExactBounds};

/// Order-preserving map, parallel when the `parallel` feature is on.
#[cfg(feature = "parallel")]
pub(crate) fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}
