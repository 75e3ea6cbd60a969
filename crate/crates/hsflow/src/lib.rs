//! Exact solver and transport metrics for the Hunter-Saxton equation on
//! piecewise-linear data.
//!
//! The equation u_t + (u²/2)_x = ¼(∫_{-∞}^x − ∫_x^∞) u_x² dx develops gradient
//! blow-up in finite time whenever the initial slope is negative somewhere.
//! On continuous piecewise-linear data with square-integrable derivative every
//! quantity of the dissipative continuation — characteristics, blow-up times,
//! the solution itself, the energy defect measure — has a closed form, so the
//! semigroup can be evaluated exactly at any time without time stepping.
//!
//! Modules:
//! - [`plfunc`]: piecewise-linear functions with constant tails, the data class
//!   everything else is built on.
//! - [`flow`]: the dissipative semigroup (characteristics, blow-up bookkeeping,
//!   exact solution snapshots).
//! - [`energy`]: the atomic dissipation measure and weak-form energy checks.
//! - [`metric`]: a monotone optimal-transport distance between energy measures,
//!   with the explicit time-shift plan and the evolved-plan growth bound.
//! - [`experiments`]: scripted scenarios (weak-convergence counterexample,
//!   monotone-vs-Kantorovich contrast, peakon dynamics, zero-data branches).
//! - [`cli`]: deterministic JSON-config / CSV-output front end.

pub mod cli;
pub mod csvio;
pub mod energy;
pub mod experiments;
pub mod flow;
pub mod metric;
pub mod plfunc;
#[cfg(test)]
pub(crate) mod test_support;

pub use flow::FlowState;
pub use metric::MetricParams;
pub use plfunc::{PeakonConfig, PiecewiseLinearFn};
