//! Continuous piecewise-linear functions with constant tails.
//!
//! This is the data class on which the whole pipeline is closed-form: the
//! derivative is piecewise constant with compact support, so u_x ∈ L², the
//! function is bounded, and the kinetic energy ∫u_x² dx is a finite sum of
//! slope²·length terms evaluated exactly.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance used when comparing functions for equality.
///
/// The solver pipeline is closed-form, so errors stay near machine epsilon;
/// 1e-9 absorbs accumulation across compositions.
pub const EQ_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum PlError {
    #[error("breakpoint list must not be empty")]
    Empty,
    #[error("breakpoints and values must have equal length ({x} vs {y})")]
    LengthMismatch { x: usize, y: usize },
    #[error("breakpoints must be strictly increasing (violation at index {index})")]
    NonIncreasingBreakpoints { index: usize },
    #[error("coordinates must be finite")]
    NonFinite,
    #[error("peakon amplitudes must sum to zero (got {sum})")]
    ConstraintViolated { sum: f64 },
    #[error("peakon positions must be distinct")]
    DuplicatePosition,
}

/// A continuous piecewise-linear function, constant outside its breakpoint
/// range.
///
/// Stored as breakpoints x₀ < … < x_K with values u(x₀), …, u(x_K); the two
/// tails extend the extreme values with slope zero. A single breakpoint
/// represents a constant function.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(into = "PlFnRepr")]
pub struct PiecewiseLinearFn {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

/// Wire form: `{"x":[…],"y":[…]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct PlFnRepr {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl From<PiecewiseLinearFn> for PlFnRepr {
    fn from(f: PiecewiseLinearFn) -> Self {
        PlFnRepr {
            x: f.breakpoints,
            y: f.values,
        }
    }
}

impl<'de> Deserialize<'de> for PiecewiseLinearFn {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = PlFnRepr::deserialize(deserializer)?;
        PiecewiseLinearFn::new(repr.x, repr.y).map_err(serde::de::Error::custom)
    }
}

/// One linear segment between consecutive breakpoints.
#[derive(Debug, Clone, Copy)]
pub struct Segment {
    pub x0: f64,
    pub x1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Segment {
    pub fn slope(&self) -> f64 {
        (self.v1 - self.v0) / (self.x1 - self.x0)
    }

    pub fn length(&self) -> f64 {
        self.x1 - self.x0
    }

    /// Energy carried by the segment, ∫ u_x² over [x0, x1] = slope²·length.
    pub fn mass(&self) -> f64 {
        let s = self.slope();
        s * s * self.length()
    }
}

impl PiecewiseLinearFn {
    /// Build a function from breakpoints and values.
    ///
    /// Breakpoints must be strictly increasing; zero-length segments are
    /// rejected at construction so later blow-up bookkeeping can rely on
    /// segment identity.
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self, PlError> {
        if breakpoints.is_empty() {
            return Err(PlError::Empty);
        }
        if breakpoints.len() != values.len() {
            return Err(PlError::LengthMismatch {
                x: breakpoints.len(),
                y: values.len(),
            });
        }
        if breakpoints.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(PlError::NonFinite);
        }
        for i in 1..breakpoints.len() {
            if breakpoints[i] <= breakpoints[i - 1] {
                return Err(PlError::NonIncreasingBreakpoints { index: i });
            }
        }
        Ok(Self {
            breakpoints,
            values,
        })
    }

    /// The constant function with the given level.
    pub fn constant(level: f64) -> Self {
        Self {
            breakpoints: vec![0.0],
            values: vec![level],
        }
    }

    /// The zero function.
    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn segment_count(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn segment(&self, k: usize) -> Segment {
        Segment {
            x0: self.breakpoints[k],
            x1: self.breakpoints[k + 1],
            v0: self.values[k],
            v1: self.values[k + 1],
        }
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        (0..self.segment_count()).map(|k| self.segment(k))
    }

    /// Values of the constant tails, (left, right).
    pub fn tail_values(&self) -> (f64, f64) {
        (self.values[0], *self.values.last().unwrap())
    }

    /// Exact interpolated value; constant beyond the breakpoint range.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.breakpoints.len();
        if x <= self.breakpoints[0] {
            return self.values[0];
        }
        if x >= self.breakpoints[n - 1] {
            return self.values[n - 1];
        }
        // index of the segment [x_k, x_{k+1}) containing x
        let k = self.breakpoints.partition_point(|&b| b <= x) - 1;
        let seg = self.segment(k);
        seg.v0 + seg.slope() * (x - seg.x0)
    }

    /// Derivative at `x`, right-continuous at breakpoints; zero on both tails.
    pub fn slope_at(&self, x: f64) -> f64 {
        let n = self.breakpoints.len();
        if x < self.breakpoints[0] || x >= self.breakpoints[n - 1] {
            return 0.0;
        }
        let k = self.breakpoints.partition_point(|&b| b <= x) - 1;
        self.segment(k).slope()
    }

    /// Kinetic energy ∫ u_x² dx = Σ slope²·length, computed exactly.
    pub fn energy(&self) -> f64 {
        self.segments().map(|s| s.mass()).sum()
    }

    /// Supremum of |self|, attained at a breakpoint (tails are constant).
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Exact sup-norm of the difference of two piecewise-linear functions.
    ///
    /// The difference is again piecewise linear with breakpoints in the union
    /// of the two breakpoint sets, so its extreme values occur there.
    pub fn sup_norm_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for &x in self.breakpoints.iter().chain(other.breakpoints.iter()) {
            worst = worst.max((self.eval(x) - other.eval(x)).abs());
        }
        worst
    }

    /// Merge adjacent collinear segments (and drop interior breakpoints that
    /// carry no kink). Off the construction path by default so blow-up
    /// bookkeeping keeps segment identity.
    pub fn merge_collinear(&self, slope_tol: f64) -> Self {
        if self.segment_count() <= 1 {
            return self.clone();
        }
        let mut bx = vec![self.breakpoints[0]];
        let mut by = vec![self.values[0]];
        for k in 0..self.segment_count() {
            let seg = self.segment(k);
            let keep = if k + 1 == self.segment_count() {
                true
            } else {
                (self.segment(k + 1).slope() - seg.slope()).abs() > slope_tol
            };
            if keep {
                bx.push(seg.x1);
                by.push(seg.v1);
            }
        }
        Self {
            breakpoints: bx,
            values: by,
        }
    }

    /// Equality up to normalization: equal breakpoint sets after collinear
    /// merging, with coordinates within `EQ_TOLERANCE`.
    pub fn approx_eq(&self, other: &Self) -> bool {
        let a = self.merge_collinear(EQ_TOLERANCE);
        let b = other.merge_collinear(EQ_TOLERANCE);
        if a.breakpoints.len() != b.breakpoints.len() {
            return false;
        }
        a.breakpoints
            .iter()
            .zip(&b.breakpoints)
            .all(|(p, q)| (p - q).abs() <= EQ_TOLERANCE)
            && a.values
                .iter()
                .zip(&b.values)
                .all(|(p, q)| (p - q).abs() <= EQ_TOLERANCE)
    }

    /// Check the square-root modulus of continuity |f(x)−f(y)| ≤ K√|x−y|
    /// with K = ‖f_x‖_{L²} on every supplied pair.
    ///
    /// The bound follows from Cauchy-Schwarz and can be attained, so the
    /// comparison carries a relative machine-level slack.
    pub fn holder_bound_check(&self, pairs: &[(f64, f64)]) -> bool {
        let k = self.energy().sqrt();
        pairs.iter().all(|&(x, y)| {
            let lhs = (self.eval(x) - self.eval(y)).abs();
            let rhs = k * (x - y).abs().sqrt();
            lhs <= rhs * (1.0 + 1e-12) + 1e-14
        })
    }
}

/// Antisymmetric peakon-type configuration u(x) = Σ αᵢ |x − xᵢ| with Σαᵢ = 0.
///
/// The zero-sum constraint is exactly the condition for u_x ∈ L²; it also
/// makes both tails flat. On this class the evolution reduces to a
/// finite-dimensional Hamiltonian system (see [`crate::experiments`]).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(into = "PeakonRepr")]
pub struct PeakonConfig {
    amplitudes: Vec<f64>,
    positions: Vec<f64>,
}

/// Wire form: `{"alpha":[…],"pos":[…]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct PeakonRepr {
    alpha: Vec<f64>,
    pos: Vec<f64>,
}

impl From<PeakonConfig> for PeakonRepr {
    fn from(c: PeakonConfig) -> Self {
        PeakonRepr {
            alpha: c.amplitudes,
            pos: c.positions,
        }
    }
}

impl<'de> Deserialize<'de> for PeakonConfig {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = PeakonRepr::deserialize(deserializer)?;
        PeakonConfig::new(repr.alpha, repr.pos).map_err(serde::de::Error::custom)
    }
}

impl PeakonConfig {
    /// Tolerance on |Σαᵢ| below which the zero-sum constraint is accepted.
    pub const CONSTRAINT_TOL: f64 = 1e-9;

    pub fn new(amplitudes: Vec<f64>, positions: Vec<f64>) -> Result<Self, PlError> {
        if amplitudes.is_empty() {
            return Err(PlError::Empty);
        }
        if amplitudes.len() != positions.len() {
            return Err(PlError::LengthMismatch {
                x: positions.len(),
                y: amplitudes.len(),
            });
        }
        if amplitudes
            .iter()
            .chain(positions.iter())
            .any(|v| !v.is_finite())
        {
            return Err(PlError::NonFinite);
        }
        let sum: f64 = amplitudes.iter().sum();
        let scale: f64 = amplitudes.iter().map(|a| a.abs()).sum::<f64>().max(1.0);
        if sum.abs() > Self::CONSTRAINT_TOL * scale {
            return Err(PlError::ConstraintViolated { sum });
        }
        // sort by position, carrying amplitudes along
        let mut order: Vec<usize> = (0..positions.len()).collect();
        order.sort_by(|&i, &j| positions[i].total_cmp(&positions[j]));
        let positions_sorted: Vec<f64> = order.iter().map(|&i| positions[i]).collect();
        let amplitudes_sorted: Vec<f64> = order.iter().map(|&i| amplitudes[i]).collect();
        if positions_sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(PlError::DuplicatePosition);
        }
        Ok(Self {
            amplitudes: amplitudes_sorted,
            positions: positions_sorted,
        })
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    /// Σ αᵢ xᵢ. With Σαᵢ = 0 this equals the left-tail value of the induced
    /// function (the right tail is its negative).
    pub fn tail_moment(&self) -> f64 {
        self.amplitudes
            .iter()
            .zip(&self.positions)
            .map(|(a, x)| a * x)
            .sum()
    }

    /// Direct evaluation of Σ αᵢ |x − xᵢ|.
    pub fn eval(&self, x: f64) -> f64 {
        self.amplitudes
            .iter()
            .zip(&self.positions)
            .map(|(a, p)| a * (x - p).abs())
            .sum()
    }

    /// Convert to the breakpoint representation.
    ///
    /// Breakpoints are the peakon positions; both tails come out flat because
    /// the amplitude sum vanishes.
    pub fn to_piecewise_linear(&self) -> PiecewiseLinearFn {
        let values: Vec<f64> = self.positions.iter().map(|&x| self.eval(x)).collect();
        PiecewiseLinearFn::new(self.positions.clone(), values)
            .expect("positions sorted and distinct by construction")
    }
}

/// Builds the piecewise-linear function of a peakon configuration.
pub fn from_peakons(config: &PeakonConfig) -> PiecewiseLinearFn {
    config.to_piecewise_linear()
}
