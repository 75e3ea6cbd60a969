//! A monotone optimal-transport distance between energy measures.
//!
//! Each function u with u_x ∈ L² carries the measure obtained by pushing
//! u_x² dx onto the compactified state space
//! X = ℝ² × (−π/2, π/2] ∪ {∞}, a point recording position, value and slope
//! angle; all points with angle −π/2 are identified with ∞, which is where a
//! blown-up characteristic ends. Plans transport one energy measure onto
//! another by a monotone map, with the option of dumping mass at ∞; the
//! distance is the infimum of plan costs.
//!
//! The computable surrogate here quantizes both measures into atoms of equal
//! mass and optimizes over monotone atom matchings by dynamic programming.
//! The DP value is exact on the quantized family and upper-bounds the
//! continuum infimum up to O(ε) slack; every axiom and growth check below
//! carries that slack explicitly.

use crate::flow::FlowState;
use crate::plfunc::PiecewiseLinearFn;
use std::f64::consts::PI;

/// Weight of the angular coordinate in the ground distance.
#[derive(Debug, Clone, Copy)]
pub struct MetricParams {
    kappa0: f64,
}

impl MetricParams {
    pub fn new(kappa0: f64) -> Self {
        assert!(
            kappa0.is_finite() && kappa0 > 0.0,
            "kappa0 must be finite and positive"
        );
        Self { kappa0 }
    }

    /// Default weight max(1, energy of the data).
    pub fn for_data(u: &PiecewiseLinearFn) -> Self {
        Self::new(u.energy().max(1.0))
    }

    pub fn kappa0(&self) -> f64 {
        self.kappa0
    }

    /// Ground distance on X: the cheaper of the direct route and the route
    /// through ∞. Never exceeds 2κ₀π.
    pub fn dist(&self, p: &PointX, q: &PointX) -> f64 {
        match (p, q) {
            (PointX::Infinity, PointX::Infinity) => 0.0,
            (PointX::Infinity, PointX::Finite { w, .. })
            | (PointX::Finite { w, .. }, PointX::Infinity) => self.kappa0 * (PI / 2.0 + w).abs(),
            (
                PointX::Finite { x, u, w },
                PointX::Finite {
                    x: x2,
                    u: u2,
                    w: w2,
                },
            ) => {
                let direct = (x - x2).abs() + (u - u2).abs() + self.kappa0 * (w - w2).abs();
                let via_infinity =
                    self.kappa0 * ((PI / 2.0 + w).abs() + (PI / 2.0 + w2).abs());
                direct.min(via_infinity)
            }
        }
    }

    fn dist_to_infinity(&self, w: f64) -> f64 {
        self.kappa0 * (PI / 2.0 + w).abs()
    }
}

/// A point of the compactified state space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointX {
    Finite { x: f64, u: f64, w: f64 },
    Infinity,
}

/// One quantum of energy: mass `mass` sitting at (x, u(x), arctan u_x(x)).
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct EnergyAtom {
    pub x: f64,
    pub u: f64,
    pub w: f64,
    pub mass: f64,
}

impl EnergyAtom {
    pub fn point(&self) -> PointX {
        PointX::Finite {
            x: self.x,
            u: self.u,
            w: self.w,
        }
    }
}

/// The energy measure of a function quantized into atoms of equal mass
/// (the final atom may be smaller), ordered left to right.
#[derive(Debug, Clone)]
pub struct EnergyAtomSeq {
    pub atoms: Vec<EnergyAtom>,
    pub quantum: f64,
    pub total_mass: f64,
}

/// Cut the cumulative-energy profile of `u` at multiples of ε and represent
/// each mass chunk by the state at its mass midpoint. The angle comes from
/// the segment containing that midpoint even when the chunk straddles a
/// breakpoint (an O(ε) perturbation of any plan cost).
pub fn quantize(u: &PiecewiseLinearFn, eps: f64) -> EnergyAtomSeq {
    assert!(eps > 0.0 && eps.is_finite(), "quantum must be positive");
    // positive-mass segments with their cumulative mass offsets
    let mut cum = Vec::new();
    let mut total = 0.0;
    for seg in u.segments() {
        let mass = seg.mass();
        if mass > 0.0 {
            cum.push((seg.x0, seg.slope(), total, total + mass));
            total += mass;
        }
    }
    if total == 0.0 {
        return EnergyAtomSeq {
            atoms: Vec::new(),
            quantum: eps,
            total_mass: 0.0,
        };
    }
    let n_atoms = ((total / eps) - 1e-9).ceil().max(1.0) as usize;
    let mut atoms = Vec::with_capacity(n_atoms);
    let mut cursor = 0usize;
    for j in 0..n_atoms {
        let lo = j as f64 * eps;
        let mass = if j + 1 == n_atoms { total - lo } else { eps };
        let target = lo + 0.5 * mass;
        while cum[cursor].3 < target && cursor + 1 < cum.len() {
            cursor += 1;
        }
        let (x0, slope, c0, _) = cum[cursor];
        let x = x0 + (target - c0) / (slope * slope);
        atoms.push(EnergyAtom {
            x,
            u: u.eval(x),
            w: u.slope_at(x).atan(),
            mass,
        });
    }
    EnergyAtomSeq {
        atoms,
        quantum: eps,
        total_mass: total,
    }
}

/// A monotone matching between two atom sequences: matched index pairs are
/// strictly increasing in both coordinates, every other atom is discarded to
/// ∞. When a matched pair has unequal masses (a remainder atom), only the
/// common mass travels and the excess is priced to ∞.
#[derive(Debug, Clone, Default)]
pub struct MonotonePlan {
    pub matched: Vec<(usize, usize)>,
    pub discarded_left: Vec<usize>,
    pub discarded_right: Vec<usize>,
}

/// Value and matching of the alignment DP.
#[derive(Debug, Clone)]
pub struct TransportOutcome {
    pub value: f64,
    pub plan: MonotonePlan,
    pub left: EnergyAtomSeq,
    pub right: EnergyAtomSeq,
}

fn match_cost(a: &EnergyAtom, b: &EnergyAtom, mp: &MetricParams) -> f64 {
    let common = a.mass.min(b.mass);
    common * mp.dist(&a.point(), &b.point())
        + (a.mass - common) * mp.dist_to_infinity(a.w)
        + (b.mass - common) * mp.dist_to_infinity(b.w)
}

fn discard_cost(a: &EnergyAtom, mp: &MetricParams) -> f64 {
    a.mass * mp.dist_to_infinity(a.w)
}

/// Optimal monotone alignment of the two quantized energy measures.
///
/// Recurrence over atom prefixes: match the current pair, or discard either
/// atom to ∞. The result is the exact optimum over quantized monotone plans
/// and an upper-bound surrogate for the continuum distance.
pub fn j_upper_dp(
    u: &PiecewiseLinearFn,
    v: &PiecewiseLinearFn,
    eps: f64,
    mp: &MetricParams,
) -> TransportOutcome {
    let left = quantize(u, eps);
    let right = quantize(v, eps);
    let (n, m) = (left.atoms.len(), right.atoms.len());
    let width = m + 1;
    let mut cost = vec![0.0f64; (n + 1) * width];
    let mut step = vec![0u8; (n + 1) * width]; // 0 diag, 1 drop left, 2 drop right
    for j in 1..=m {
        cost[j] = cost[j - 1] + discard_cost(&right.atoms[j - 1], mp);
        step[j] = 2;
    }
    for i in 1..=n {
        cost[i * width] = cost[(i - 1) * width] + discard_cost(&left.atoms[i - 1], mp);
        step[i * width] = 1;
        for j in 1..=m {
            let a = &left.atoms[i - 1];
            let b = &right.atoms[j - 1];
            let diag = cost[(i - 1) * width + j - 1] + match_cost(a, b, mp);
            let up = cost[(i - 1) * width + j] + discard_cost(a, mp);
            let lft = cost[i * width + j - 1] + discard_cost(b, mp);
            let (best, s) = if diag <= up && diag <= lft {
                (diag, 0)
            } else if up <= lft {
                (up, 1)
            } else {
                (lft, 2)
            };
            cost[i * width + j] = best;
            step[i * width + j] = s;
        }
    }
    let mut plan = MonotonePlan::default();
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        match step[i * width + j] {
            0 => {
                plan.matched.push((i - 1, j - 1));
                i -= 1;
                j -= 1;
            }
            1 => {
                plan.discarded_left.push(i - 1);
                i -= 1;
            }
            _ => {
                plan.discarded_right.push(j - 1);
                j -= 1;
            }
        }
    }
    plan.matched.reverse();
    plan.discarded_left.reverse();
    plan.discarded_right.reverse();
    TransportOutcome {
        value: cost[n * width + m],
        plan,
        left,
        right,
    }
}

/// Cost and a-priori bound of the explicit time-shift plan.
#[derive(Debug, Clone, Copy)]
pub struct TimeShiftCost {
    pub cost: f64,
    pub bound: f64,
}

/// The plan that follows each surviving characteristic from time 0 to time t
/// and sends dead segments to ∞, evaluated exactly.
///
/// On a segment, both the displacement x − ξ(t,x) and the value change
/// ū(x) − u(t,ξ(t,x)) are linear in x, and the slope angles are constant, so
/// each segment contributes a closed-form integral. The bound is
/// (πt/4 + (1+κ₀)/2 + ‖ū‖_∞ + (t+2)/8·E)·t·E with E the initial energy; the
/// constant 1 is admissible because π/2 + arctan y ≤ 1/|y| for y < 0.
pub fn plan_cost_time_shift(state: &FlowState, t: f64, mp: &MetricParams) -> TimeShiftCost {
    assert!(t >= 0.0, "flow is defined for t >= 0 only");
    let kappa = mp.kappa0();
    let mut cost = 0.0;
    for seg in state.segment_flows() {
        if seg.alive(t) {
            let s = seg.slope;
            let density = s * s;
            let angle_gap = (s.atan() - (2.0 * s / (2.0 + t * s)).atan()).abs();
            let d0 = state.xi(t, seg.x0) - seg.x0;
            let d1 = state.xi(t, seg.x1) - seg.x1;
            let v0 = state.u_along(t, seg.x0) - state.initial().eval(seg.x0);
            let v1 = state.u_along(t, seg.x1) - state.initial().eval(seg.x1);
            cost += density
                * (abs_linear_integral(d0, d1, seg.len)
                    + abs_linear_integral(v0, v1, seg.len)
                    + kappa * angle_gap * seg.len);
        } else {
            cost += kappa * (PI / 2.0 + seg.slope.atan()) * seg.mass;
        }
    }
    let energy = state.total_mass();
    let sup = state.initial().sup_norm();
    let bound =
        (PI * t / 4.0 + (1.0 + kappa) / 2.0 + sup + (t + 2.0) / 8.0 * energy) * t * energy;
    TimeShiftCost { cost, bound }
}

/// ∫₀^len |a + (b−a)·ξ/len| dξ for a linear function with endpoint values a, b.
fn abs_linear_integral(a: f64, b: f64, len: f64) -> f64 {
    if a * b >= 0.0 {
        0.5 * (a.abs() + b.abs()) * len
    } else {
        let cut = a / (a - b); // sign change in (0,1)
        0.5 * len * (a.abs() * cut + b.abs() * (1.0 - cut))
    }
}

fn evolve_atom(state: &FlowState, atom: &EnergyAtom, t: f64) -> PointX {
    let g = state.gradient_along(t, atom.x);
    if g == f64::NEG_INFINITY {
        PointX::Infinity
    } else {
        PointX::Finite {
            x: state.xi(t, atom.x),
            u: state.u_along(t, atom.x),
            w: g.atan(),
        }
    }
}

fn point_to_infinity(mp: &MetricParams, p: &PointX) -> f64 {
    mp.dist(p, &PointX::Infinity)
}

/// Push a base plan along the two flows: matched atoms ride their
/// characteristics; once either side blows up the pair's mass is re-priced
/// to ∞; discarded atoms keep their ∞ pricing with updated angles.
pub fn evolved_plan_cost(
    state_u: &FlowState,
    state_v: &FlowState,
    base: &TransportOutcome,
    t: f64,
    mp: &MetricParams,
) -> f64 {
    assert!(t >= 0.0, "flow is defined for t >= 0 only");
    let mut cost = 0.0;
    for &(i, j) in &base.plan.matched {
        let a = &base.left.atoms[i];
        let b = &base.right.atoms[j];
        let pa = evolve_atom(state_u, a, t);
        let pb = evolve_atom(state_v, b, t);
        let common = a.mass.min(b.mass);
        match (&pa, &pb) {
            (PointX::Finite { .. }, PointX::Finite { .. }) => {
                cost += common * mp.dist(&pa, &pb)
                    + (a.mass - common) * point_to_infinity(mp, &pa)
                    + (b.mass - common) * point_to_infinity(mp, &pb);
            }
            _ => {
                // blow-up along either characteristic sends the mass to ∞
                cost += a.mass * point_to_infinity(mp, &pa)
                    + b.mass * point_to_infinity(mp, &pb);
            }
        }
    }
    for &i in &base.plan.discarded_left {
        cost += base.left.atoms[i].mass * point_to_infinity(mp, &evolve_atom(state_u, &base.left.atoms[i], t));
    }
    for &j in &base.plan.discarded_right {
        cost += base.right.atoms[j].mass
            * point_to_infinity(mp, &evolve_atom(state_v, &base.right.atoms[j], t));
    }
    cost
}

/// Metric-axiom report for a corpus of functions at one quantum.
#[derive(Debug, Clone, serde::Serialize)]
pub struct AxiomReport {
    pub identity_max: f64,
    pub symmetry_max: f64,
    pub triangle_max: f64,
    pub slack: f64,
    pub pass: bool,
}

/// Check identity, symmetry and the triangle inequality of the DP value on
/// every pair and triple from the corpus, within the quantization slack
/// 2εκ₀π (the price of one atom fully rerouted through ∞ on both sides).
pub fn metric_axioms_suite(
    corpus: &[PiecewiseLinearFn],
    eps: f64,
    mp: &MetricParams,
) -> AxiomReport {
    assert!(corpus.len() >= 3, "need at least three functions");
    let n = corpus.len();
    let mut table = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in 0..n {
            table[i][j] = j_upper_dp(&corpus[i], &corpus[j], eps, mp).value;
        }
    }
    let slack = 2.0 * eps * mp.kappa0() * PI;
    let mut identity_max: f64 = 0.0;
    let mut symmetry_max: f64 = 0.0;
    let mut triangle_max: f64 = 0.0;
    for i in 0..n {
        identity_max = identity_max.max(table[i][i]);
        for j in 0..n {
            symmetry_max = symmetry_max.max((table[i][j] - table[j][i]).abs());
            for k in 0..n {
                triangle_max = triangle_max.max(table[i][k] - table[i][j] - table[j][k]);
            }
        }
    }
    let pass = identity_max <= 1e-12 && symmetry_max <= slack && triangle_max <= slack;
    AxiomReport {
        identity_max,
        symmetry_max,
        triangle_max,
        slack,
        pass,
    }
}

/// Exact minimum-cost assignment between two atom sequences of equal length,
/// ignoring the monotonicity constraint. This is the Kantorovich-style
/// contrast: without monotonicity the optimum can vanish where the monotone
/// distance stays bounded away from zero.
pub fn assignment_cost(a: &EnergyAtomSeq, b: &EnergyAtomSeq, mp: &MetricParams) -> f64 {
    assert_eq!(
        a.atoms.len(),
        b.atoms.len(),
        "assignment contrast needs equal atom counts"
    );
    if a.atoms.is_empty() {
        return 0.0;
    }
    let cost: Vec<Vec<f64>> = a
        .atoms
        .iter()
        .map(|ai| b.atoms.iter().map(|bj| match_cost(ai, bj, mp)).collect())
        .collect();
    min_cost_assignment(&cost).0
}

/// Hungarian algorithm with potentials, O(n³), square matrices.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> (f64, Vec<usize>) {
    let n = cost.len();
    assert!(n > 0 && cost.iter().all(|row| row.len() == n));
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut matched = vec![0usize; n + 1]; // matched[j] = row assigned to column j, 1-based
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matched[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched[j0] = matched[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; n];
    let mut total = 0.0;
    for j in 1..=n {
        assignment[matched[j] - 1] = j - 1;
        total += cost[matched[j] - 1][j - 1];
    }
    (total, assignment)
}
