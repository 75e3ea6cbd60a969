//! Scripted reproductions of the worked examples: the weak-convergence
//! counterexample, the monotone-vs-Kantorovich sawtooth contrast, peakon
//! tail drift, the finite-dimensional Hamiltonian cross-check and the two
//! zero-data continuations.

use crate::csvio;
use crate::energy::{self, BumpTestFn};
use crate::flow::FlowState;
use crate::metric::{self, MetricParams};
use crate::plfunc::{PeakonConfig, PiecewiseLinearFn};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("first blow-up at t = {first_epoch} precedes the requested time {t}")]
    BlowupBeforeT { first_epoch: f64, t: f64 },
    #[error("peakon collision near t = {time}")]
    CollisionDetected { time: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Invalid(#[from] crate::plfunc::PlError),
}

/// Outputs of one scenario: named scalars, named pass/fail flags and the
/// CSV files written along the way. Deterministic field ordering.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ScenarioResult {
    pub name: String,
    pub params: BTreeMap<String, f64>,
    pub scalars: BTreeMap<String, f64>,
    pub flags: BTreeMap<String, bool>,
    pub artifacts: Vec<String>,
}

impl ScenarioResult {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            params: BTreeMap::new(),
            scalars: BTreeMap::new(),
            flags: BTreeMap::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.flags.values().all(|&ok| ok)
    }
}

/// The tent function 1 − |x| on [−1, 1], zero outside.
pub fn hat() -> PiecewiseLinearFn {
    PiecewiseLinearFn::new(vec![-1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]).unwrap()
}

/// First member of the weak-convergence counterexample: the tent with its
/// right wing replaced by n sawtooth cells built from the profile that drops
/// with slope −2 on the first half of each cell and rests on the second.
pub fn example1_u(n: usize) -> PiecewiseLinearFn {
    assert!(n >= 1);
    let nf = n as f64;
    let mut bx = vec![-1.0, 0.0];
    let mut by = vec![0.0, 1.0];
    for i in 1..=n {
        let level = 1.0 - i as f64 / nf;
        bx.push((i as f64 - 0.5) / nf);
        by.push(level);
        bx.push(i as f64 / nf);
        by.push(level);
    }
    PiecewiseLinearFn::new(bx, by).unwrap()
}

/// Second member: same cells built from the profile with slopes −3, 0, −1 on
/// the first sixth, middle third and second half of each cell. Uniformly
/// within 1/(2n) of [`example1_u`], with the same energy, but the steep
/// pieces blow up at t = 2/3 instead of t = 1.
pub fn example1_v(n: usize) -> PiecewiseLinearFn {
    assert!(n >= 1);
    let nf = n as f64;
    let mut bx = vec![-1.0, 0.0];
    let mut by = vec![0.0, 1.0];
    for i in 1..=n {
        let level = 1.0 - i as f64 / nf;
        let plateau = level + 0.5 / nf;
        bx.push((i as f64 - 5.0 / 6.0) / nf);
        by.push(plateau);
        bx.push((i as f64 - 0.5) / nf);
        by.push(plateau);
        bx.push(i as f64 / nf);
        by.push(level);
    }
    PiecewiseLinearFn::new(bx, by).unwrap()
}

/// Unit-slope sawtooth with m teeth on [0, 1]: u_x = ±1, energy 1, slope
/// angles ±π/4.
pub fn example2_sawtooth(m: usize) -> PiecewiseLinearFn {
    assert!(m >= 1);
    let mf = m as f64;
    let mut bx = vec![0.0];
    let mut by = vec![0.0];
    for i in 1..=m {
        bx.push((2.0 * i as f64 - 1.0) / (2.0 * mf));
        by.push(0.5 / mf);
        bx.push(i as f64 / mf);
        by.push(0.0);
    }
    PiecewiseLinearFn::new(bx, by).unwrap()
}

/// ∫_a^b of the derivative (p = 1) or its square (p = 2), exact.
fn derivative_integral(f: &PiecewiseLinearFn, square: bool, a: f64, b: f64) -> f64 {
    let mut acc = 0.0;
    for seg in f.segments() {
        let lo = seg.x0.max(a);
        let hi = seg.x1.min(b);
        if hi > lo {
            let s = seg.slope();
            acc += if square { s * s } else { s } * (hi - lo);
        }
    }
    acc
}

fn energy_curve(state: &FlowState, horizon: f64) -> Vec<(f64, f64)> {
    let mut times = vec![0.0];
    times.extend(state.epochs().iter().copied().filter(|&e| e <= horizon));
    if horizon > 0.0 {
        times.push(horizon);
    }
    times.sort_by(f64::total_cmp);
    times.dedup();
    times
        .into_iter()
        .map(|t| (t, state.surviving_mass(t)))
        .collect()
}

/// Weak convergence does not control the flow: ū_n and v̄_n approach each
/// other uniformly (and their derivatives weakly) as n grows, yet after the
/// steep cells of v̄_n blow up at t = 2/3 the two solutions stay a bounded
/// transport distance apart, no matter how large n is.
pub fn example1(n: usize, t: f64, out: Option<&Path>) -> Result<ScenarioResult, ExperimentError> {
    let mut result = ScenarioResult::new("example1");
    result.params.insert("n".into(), n as f64);
    result.params.insert("t".into(), t);
    let eps = 0.02;
    let kappa0 = 3.0;
    result.params.insert("eps".into(), eps);
    result.params.insert("kappa0".into(), kappa0);

    let u0 = example1_u(n);
    let v0 = example1_v(n);
    let sup_diff = u0.sup_norm_diff(&v0);
    result.scalars.insert("sup_diff_initial".into(), sup_diff);
    result
        .flags
        .insert("sup_diff_le_2_over_n".into(), sup_diff <= 2.0 / n as f64);

    result.scalars.insert("energy_u_initial".into(), u0.energy());
    result.scalars.insert("energy_v_initial".into(), v0.energy());
    result.flags.insert(
        "initial_energies_equal_three".into(),
        (u0.energy() - 3.0).abs() < 1e-12 && (v0.energy() - 3.0).abs() < 1e-12,
    );

    // weak-convergence premises: cumulative differences of the derivatives
    // and their squares shrink like 1/n, uniformly on [0, 1]
    let mut premise = true;
    for k in 0..=100 {
        let x = k as f64 / 100.0;
        let d1 = derivative_integral(&u0, false, 0.0, x) - derivative_integral(&v0, false, 0.0, x);
        let d2 = derivative_integral(&u0, true, 0.0, x) - derivative_integral(&v0, true, 0.0, x);
        premise &= d1.abs() <= 1.0 / n as f64 + 1e-12 && d2.abs() <= 1.0 / n as f64 + 1e-12;
    }
    result
        .flags
        .insert("weak_convergence_premises".into(), premise);

    let su = FlowState::new(u0);
    let sv = FlowState::new(v0);
    result.scalars.insert(
        "first_blowup_u".into(),
        su.first_epoch(),
    );
    result.scalars.insert(
        "first_blowup_v".into(),
        sv.first_epoch(),
    );
    result.flags.insert(
        "blowup_times".into(),
        (su.first_epoch() - 1.0).abs() < 1e-12 && (sv.first_epoch() - 2.0 / 3.0).abs() < 1e-12,
    );

    let ut = su.solve(t);
    let vt = sv.solve(t);
    let (eu, ev) = (ut.energy(), vt.energy());
    result.scalars.insert("energy_u_at_t".into(), eu);
    result.scalars.insert("energy_v_at_t".into(), ev);
    result.flags.insert(
        "energy_matches_survivor_mass".into(),
        (eu - su.surviving_mass(t)).abs() <= 1e-12 * eu.max(1.0)
            && (ev - sv.surviving_mass(t)).abs() <= 1e-12 * ev.max(1.0),
    );

    let mp = MetricParams::new(kappa0);
    let dp = metric::j_upper_dp(&ut, &vt, eps, &mp);
    result.scalars.insert("dp_distance_at_t".into(), dp.value);
    if t > 2.0 / 3.0 && t < 1.0 {
        result.flags.insert(
            "solutions_separate_after_first_blowup".into(),
            dp.value > 0.1,
        );
        result
            .flags
            .insert("energies_split_three_vs_half".into(), (eu - 3.0).abs() < 1e-12 && (ev - 1.5).abs() < 1e-12);
    }

    if let Some(dir) = out {
        let paths = [
            ("u_initial.csv", su.initial().clone()),
            ("v_initial.csv", sv.initial().clone()),
            ("u_at_t.csv", ut),
            ("v_at_t.csv", vt),
        ];
        for (name, f) in paths {
            csvio::write_function_csv(&dir.join(name), &f)?;
            result.artifacts.push(name.to_string());
        }
        for (name, state) in [("energy_u.csv", &su), ("energy_v.csv", &sv)] {
            csvio::write_curve_csv(&dir.join(name), "energy", &energy_curve(state, t.max(3.0)))?;
            result.artifacts.push(name.to_string());
        }
    }
    Ok(result)
}

/// Sawtooth sequences are Cauchy for unconstrained (Kantorovich) transport
/// but not for the monotone distance: any monotone plan between u^m and u^n
/// pays at least (n−m)/(8n).
pub fn example2(
    m: usize,
    n: usize,
    eps: f64,
    mp: &MetricParams,
    out: Option<&Path>,
) -> Result<ScenarioResult, ExperimentError> {
    assert!(m < n, "needs m < n");
    let mut result = ScenarioResult::new("example2");
    result.params.insert("m".into(), m as f64);
    result.params.insert("n".into(), n as f64);
    result.params.insert("eps".into(), eps);
    result.params.insert("kappa0".into(), mp.kappa0());

    let um = example2_sawtooth(m);
    let un = example2_sawtooth(n);
    let dp = metric::j_upper_dp(&um, &un, eps, mp);
    let lower = (n - m) as f64 / (8.0 * n as f64);
    result.scalars.insert("dp_value".into(), dp.value);
    result.scalars.insert("monotone_lower_bound".into(), lower);
    result
        .flags
        .insert("dp_above_monotone_lower_bound".into(), dp.value >= lower);

    // Kantorovich contrast: free assignment between equally many atoms
    let (a, b) = (&dp.left, &dp.right);
    if a.atoms.len() == b.atoms.len() && a.atoms.len() <= 200 && !a.atoms.is_empty() {
        let free = metric::assignment_cost(a, b, mp);
        result.scalars.insert("assignment_value".into(), free);
        result
            .flags
            .insert("assignment_below_monotone".into(), free < dp.value);
    }

    if let Some(dir) = out {
        for (name, seq) in [("atoms_m.csv", a), ("atoms_n.csv", b)] {
            csvio::write_energy_atoms_csv(&dir.join(name), &seq.atoms)?;
            result.artifacts.push(name.to_string());
        }
    }
    Ok(result)
}

/// Tail drift of antisymmetric peakon data: beyond the support each tail
/// moves linearly in time at rate ±energy/4 while no segment has blown up.
/// Both candidate readings of the drift rate (a quarter of the energy versus
/// a quarter of the half-energy invariant) are reported; the solver matches
/// the former.
pub fn peakon_drift(
    config: &PeakonConfig,
    t: f64,
    out: Option<&Path>,
) -> Result<ScenarioResult, ExperimentError> {
    let state = FlowState::new(config.to_piecewise_linear());
    if state.first_epoch() <= t {
        return Err(ExperimentError::BlowupBeforeT {
            first_epoch: state.first_epoch(),
            t,
        });
    }
    let mut result = ScenarioResult::new("peakon_drift");
    result.params.insert("t".into(), t);
    result
        .params
        .insert("peakons".into(), config.amplitudes().len() as f64);

    let energy = state.total_mass();
    let (l0, r0) = state.initial().tail_values();
    let snapshot = state.solve(t);
    let (lt, rt) = snapshot.tail_values();
    let drift_right = rt - r0;
    let drift_left = lt - l0;
    let quarter_energy_rate = t * energy / 4.0;
    let eighth_energy_rate = t * energy / 8.0;

    result.scalars.insert("energy".into(), energy);
    result.scalars.insert("tail_moment".into(), config.tail_moment());
    result.scalars.insert("left_tail_initial".into(), l0);
    result.scalars.insert("right_tail_initial".into(), r0);
    result.scalars.insert("drift_right".into(), drift_right);
    result.scalars.insert("drift_left".into(), drift_left);
    result
        .scalars
        .insert("predicted_drift_quarter_energy".into(), quarter_energy_rate);
    result
        .scalars
        .insert("predicted_drift_eighth_energy".into(), eighth_energy_rate);

    let tol = 1e-12 * energy.max(1.0) * t.max(1.0);
    result.flags.insert(
        "tail_moment_equals_left_tail".into(),
        (config.tail_moment() - l0).abs() <= 1e-9,
    );
    result.flags.insert(
        "tails_drift_antisymmetrically".into(),
        (drift_left + drift_right).abs() <= tol,
    );
    // the solver realizes the quarter-energy rate; the half-invariant
    // reading would be half of that, so flag the distinction explicitly
    let matches_quarter = (drift_right - quarter_energy_rate).abs() <= tol;
    let matches_eighth = energy > 0.0 && (drift_right - eighth_energy_rate).abs() <= tol;
    result.flags.insert(
        "drift_rate_is_quarter_energy".into(),
        matches_quarter && !matches_eighth,
    );
    // linearity: halving the time halves the drift while nothing blows up
    let (l_half, r_half) = state.solve(t / 2.0).tail_values();
    result.flags.insert(
        "drift_linear_in_time".into(),
        (drift_right - 2.0 * (r_half - r0)).abs() <= tol
            && (drift_left - 2.0 * (l_half - l0)).abs() <= tol,
    );

    if let Some(dir) = out {
        csvio::write_function_csv(&dir.join("peakon_solution.csv"), &snapshot)?;
        result.artifacts.push("peakon_solution.csv".to_string());
    }
    Ok(result)
}

fn hamiltonian(pos: &[f64], alpha: &[f64]) -> f64 {
    let mut h = 0.0;
    for i in 0..pos.len() {
        for j in 0..pos.len() {
            h += alpha[i] * alpha[j] * (pos[i] - pos[j]).abs();
        }
    }
    0.5 * h
}

fn peakon_derivs(pos: &[f64], alpha: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = pos.len();
    let mut dx = vec![0.0; n];
    let mut da = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            dx[i] += alpha[j] * (pos[i] - pos[j]).abs();
            if j != i {
                da[i] -= alpha[i] * alpha[j] * (pos[i] - pos[j]).signum();
            }
        }
    }
    (dx, da)
}

fn rk4_peakon_step(pos: &mut Vec<f64>, alpha: &mut Vec<f64>, h: f64) {
    let n = pos.len();
    let (k1x, k1a) = peakon_derivs(pos, alpha);
    let stage = |px: &Vec<f64>, pa: &Vec<f64>, kx: &Vec<f64>, ka: &Vec<f64>, c: f64| {
        let sx: Vec<f64> = (0..n).map(|i| px[i] + c * h * kx[i]).collect();
        let sa: Vec<f64> = (0..n).map(|i| pa[i] + c * h * ka[i]).collect();
        peakon_derivs(&sx, &sa)
    };
    let (k2x, k2a) = stage(pos, alpha, &k1x, &k1a, 0.5);
    let (k3x, k3a) = stage(pos, alpha, &k2x, &k2a, 0.5);
    let (k4x, k4a) = stage(pos, alpha, &k3x, &k3a, 1.0);
    for i in 0..n {
        pos[i] += h / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
        alpha[i] += h / 6.0 * (k1a[i] + 2.0 * k2a[i] + 2.0 * k3a[i] + k4a[i]);
    }
}

fn integrate_peakons(
    config: &PeakonConfig,
    t: f64,
    steps: usize,
) -> Result<(Vec<f64>, Vec<f64>), ExperimentError> {
    let mut pos = config.positions().to_vec();
    let mut alpha = config.amplitudes().to_vec();
    let h = t / steps as f64;
    for k in 0..steps {
        rk4_peakon_step(&mut pos, &mut alpha, h);
        if pos.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ExperimentError::CollisionDetected {
                time: (k + 1) as f64 * h,
            });
        }
    }
    Ok((pos, alpha))
}

/// Mutual validation of the exact solver against 4th-order integration of
/// the finite-dimensional peakon system ẋᵢ = ∂H/∂αᵢ, α̇ᵢ = −∂H/∂xᵢ with
/// H = ½ Σ αᵢαⱼ|xᵢ−xⱼ|.
pub fn hamiltonian_crosscheck(
    config: &PeakonConfig,
    t: f64,
    steps: usize,
    out: Option<&Path>,
) -> Result<ScenarioResult, ExperimentError> {
    assert!(steps >= 4 && t > 0.0);
    let state = FlowState::new(config.to_piecewise_linear());
    if state.first_epoch() <= t {
        return Err(ExperimentError::BlowupBeforeT {
            first_epoch: state.first_epoch(),
            t,
        });
    }
    let mut result = ScenarioResult::new("hamiltonian_crosscheck");
    result.params.insert("t".into(), t);
    result.params.insert("steps".into(), steps as f64);

    let exact = state.solve(t);
    let h0 = hamiltonian(config.positions(), config.amplitudes());
    let (pos, alpha) = integrate_peakons(config, t, steps)?;
    let rebuilt = PeakonConfig::new(alpha.clone(), pos.clone())?.to_piecewise_linear();
    let sup = exact.sup_norm_diff(&rebuilt);
    let h_drift = (hamiltonian(&pos, &alpha) - h0).abs();
    let alpha_sum = alpha.iter().sum::<f64>().abs();
    let energy_drift = (rebuilt.energy() - state.total_mass()).abs();

    result.scalars.insert("sup_discrepancy".into(), sup);
    result.scalars.insert("hamiltonian_drift".into(), h_drift);
    result.scalars.insert("amplitude_sum".into(), alpha_sum);
    result.scalars.insert("energy_drift".into(), energy_drift);

    // empirical convergence order from two coarse step sizes
    let coarse = (steps / 8).max(4);
    let err = |n: usize| -> Result<f64, ExperimentError> {
        let (p, a) = integrate_peakons(config, t, n)?;
        Ok(exact.sup_norm_diff(&PeakonConfig::new(a, p)?.to_piecewise_linear()))
    };
    let (e1, e2) = (err(coarse)?, err(2 * coarse)?);
    let order = (e1 / e2).log2();
    result.scalars.insert("empirical_order".into(), order);

    result.flags.insert("sup_within_tolerance".into(), sup <= 1e-6);
    result
        .flags
        .insert("hamiltonian_conserved".into(), h_drift <= 1e-9);
    result
        .flags
        .insert("amplitude_sum_preserved".into(), alpha_sum <= 1e-9);
    result
        .flags
        .insert("energy_invariant_preserved".into(), energy_drift <= 1e-9);
    result
        .flags
        .insert("fourth_order_convergence".into(), (3.5..=4.5).contains(&order));

    if let Some(dir) = out {
        for (name, f) in [("exact.csv", &exact), ("ode.csv", &rebuilt)] {
            csvio::write_function_csv(&dir.join(name), f)?;
            result.artifacts.push(name.to_string());
        }
    }
    Ok(result)
}

/// The two continuations of zero data: the dissipative branch stays at rest
/// with zero energy; the conservative branch instantly carries energy 8,
/// satisfies the weak conservation identity for bumps away from t = 0, and
/// breaks the dissipation inequality started at t = 0.
pub fn zero_data_suite(out: Option<&Path>) -> Result<ScenarioResult, ExperimentError> {
    let mut result = ScenarioResult::new("zero_data");
    let state = FlowState::new(PiecewiseLinearFn::zero());
    let mut rest = true;
    for &t in &[0.0, 0.5, 1.0, 4.0] {
        let u = state.solve(t);
        rest &= u.energy() == 0.0 && u.eval(0.0) == 0.0 && u.eval(-7.0) == 0.0;
    }
    result.flags.insert("dissipative_branch_stays_zero".into(), rest);

    let witness_at_one = energy::conservative_witness(1.0);
    result.scalars.insert(
        "witness_energy_at_one".into(),
        witness_at_one.energy(),
    );
    result.flags.insert(
        "witness_slope_is_two_over_t".into(),
        (witness_at_one.slope_at(0.0) - 2.0).abs() < 1e-12,
    );
    let mut energy_eight = true;
    for &t in &[0.25, 1.0, 2.5] {
        energy_eight &= (energy::conservative_witness(t).energy() - 8.0).abs() < 1e-12;
    }
    result.flags.insert("witness_energy_is_eight".into(), energy_eight);

    // conservation identity for a bump supported in t > 0
    let interior = BumpTestFn::new(1.2, 0.7, 0.0, 2.0);
    let check = energy::conservative_witness_check(&interior).map_err(io_from_energy)?;
    result
        .scalars
        .insert("witness_identity_residual".into(), check.identity_residual);
    result.flags.insert(
        "witness_conserves_energy_weakly".into(),
        check.identity_residual <= energy::TOL_QUAD,
    );

    // dissipation inequality from t = 0 fails by 8·φ(0,0)
    let origin = BumpTestFn::new(0.0, 1.0, 0.0, 1.5);
    let check0 = energy::conservative_witness_check(&origin).map_err(io_from_energy)?;
    result.scalars.insert(
        "witness_dissipativity_violation".into(),
        check0.dissipativity_violation,
    );
    let expected = 8.0 * origin.value(0.0, 0.0);
    result.flags.insert(
        "witness_violates_dissipativity_from_zero".into(),
        (check0.dissipativity_violation - expected).abs() <= 10.0 * energy::TOL_QUAD
            && check0.dissipativity_violation > 1.0,
    );

    if let Some(dir) = out {
        csvio::write_function_csv(&dir.join("witness_at_one.csv"), &witness_at_one)?;
        result.artifacts.push("witness_at_one.csv".to_string());
    }
    Ok(result)
}

fn io_from_energy(e: crate::energy::EnergyError) -> ExperimentError {
    ExperimentError::Io(std::io::Error::other(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::dissipation_atoms;

    #[test]
    fn example1_functions_have_energy_three() {
        for n in [1, 4, 16, 64] {
            let u = example1_u(n);
            let v = example1_v(n);
            // independent bookkeeping from the displayed profiles:
            // wing 1, cells n·(4/(2n)) = 2 for u; n·(9/(6n) + 1/(2n)) = 2 for v
            assert!((u.energy() - 3.0).abs() < 1e-12, "n={n}");
            assert!((v.energy() - 3.0).abs() < 1e-12, "n={n}");
            // profile integrals over one cell scale: ∫f'² = ∫g'² = 2
            let cell_u = derivative_integral(&u, true, 0.0, 1.0);
            let cell_v = derivative_integral(&v, true, 0.0, 1.0);
            assert!((cell_u - 2.0).abs() < 1e-12);
            assert!((cell_v - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn example1_slopes_and_blowups() {
        let v = example1_v(4);
        let slopes: Vec<i64> = v
            .segments()
            .map(|s| s.slope().round() as i64)
            .collect();
        assert_eq!(slopes[0], 1); // left wing
        assert_eq!(&slopes[1..4], &[-3, 0, -1]);
        let sv = FlowState::new(v);
        assert!((sv.first_epoch() - 2.0 / 3.0).abs() < 1e-12);
        let su = FlowState::new(example1_u(4));
        assert!((su.first_epoch() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn example1_survivor_energy_at_intermediate_time() {
        for n in [2, 8] {
            let sv = FlowState::new(example1_v(n));
            // steep cells (slope −3, total mass 1.5) die at 2/3
            assert!((sv.solve(0.8).energy() - 1.5).abs() < 1e-12);
            let su = FlowState::new(example1_u(n));
            assert!((su.solve(0.8).energy() - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn example1_dissipation_atoms() {
        let n = 4;
        let sv = FlowState::new(example1_v(n));
        let atoms = dissipation_atoms(&sv);
        // n steep atoms at 2/3 and n shallow atoms at 2
        assert_eq!(atoms.len(), 2 * n);
        let steep: f64 = atoms
            .iter()
            .filter(|a| (a.epoch - 2.0 / 3.0).abs() < 1e-12)
            .map(|a| a.mass)
            .sum();
        let shallow: f64 = atoms
            .iter()
            .filter(|a| (a.epoch - 2.0).abs() < 1e-12)
            .map(|a| a.mass)
            .sum();
        assert!((steep - 1.5).abs() < 1e-12);
        assert!((shallow - 0.5).abs() < 1e-12);
        // balance over the window that brackets the first epoch
        let (lhs, rhs) = crate::energy::energy_balance(&sv, 0.5, 0.7).unwrap();
        assert!((lhs - 1.5).abs() < 1e-12);
        assert!((rhs - 1.5).abs() < 1e-12);
    }

    #[test]
    fn example1_scenario_passes_inside_window() {
        for n in [4, 16] {
            let r = example1(n, 0.8, None).unwrap();
            assert!(r.passed(), "n={n}: {:?}", r.flags);
            assert!(r.scalars["dp_distance_at_t"] > 0.1);
        }
    }

    #[test]
    fn example2_sawtooth_shape() {
        let u = example2_sawtooth(3);
        assert!((u.energy() - 1.0).abs() < 1e-12);
        for seg in u.segments() {
            assert!((seg.slope().abs() - 1.0).abs() < 1e-12);
        }
        assert_eq!(u.eval(0.0), 0.0);
        assert_eq!(u.eval(1.0), 0.0);
        assert!((u.eval(1.0 / 6.0) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn example2_bound_for_spec_pair() {
        let mp = MetricParams::new(1.0);
        let r = example2(1, 8, 1.0 / 64.0, &mp, None).unwrap();
        assert!(r.passed(), "{:?}", r.flags);
        // bound 7/64 ≈ 0.109
        assert!((r.scalars["monotone_lower_bound"] - 7.0 / 64.0).abs() < 1e-15);
        assert!(r.scalars["dp_value"] >= 7.0 / 64.0);
    }

    #[test]
    fn example2_assignment_contrast() {
        let mp = MetricParams::new(1.0);
        let r = example2(4, 8, 1.0 / 64.0, &mp, None).unwrap();
        assert!(r.passed(), "{:?}", r.flags);
        assert!(r.scalars["assignment_value"] < r.scalars["dp_value"]);
    }

    #[test]
    fn peakon_drift_matches_quarter_energy_rate() {
        let c = PeakonConfig::new(vec![0.5, -0.5], vec![-1.0, 1.0]).unwrap();
        let r = peakon_drift(&c, 0.4, None).unwrap();
        assert!(r.passed(), "{:?}", r.flags);
        let e = r.scalars["energy"];
        assert!((r.scalars["drift_right"] - 0.4 * e / 4.0).abs() < 1e-12);
    }

    #[test]
    fn peakon_drift_zero_amplitudes_do_not_drift() {
        let c = PeakonConfig::new(vec![0.0, 0.0], vec![0.0, 1.0]).unwrap();
        let r = peakon_drift(&c, 1.0, None).unwrap();
        assert_eq!(r.scalars["drift_right"], 0.0);
        assert!(r.passed());
    }

    #[test]
    fn peakon_drift_rejects_post_blowup_times() {
        // slopes: between the peaks u_x = −2, blow-up at t = 1
        let c = PeakonConfig::new(vec![-1.0, 1.0], vec![0.0, 1.0]).unwrap();
        assert!(matches!(
            peakon_drift(&c, 1.5, None),
            Err(ExperimentError::BlowupBeforeT { .. })
        ));
    }

    #[test]
    fn hamiltonian_crosscheck_pair() {
        let c = PeakonConfig::new(vec![1.0, -1.0], vec![0.0, 1.0]).unwrap();
        let r = hamiltonian_crosscheck(&c, 0.2, 200, None).unwrap();
        assert!(r.passed(), "{:?} {:?}", r.flags, r.scalars);
        assert!(r.scalars["sup_discrepancy"] <= 1e-6);
    }

    #[test]
    fn zero_data_suite_passes() {
        let r = zero_data_suite(None).unwrap();
        assert!(r.passed(), "{:?}", r.flags);
        assert!(r.scalars["witness_dissipativity_violation"] > 1.0);
    }
}
