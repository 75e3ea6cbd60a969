//! Shared corpus generation for the integration suites: seeded, deterministic
//! piecewise-linear data with moderate slopes and support.

use hsflow::flow::FlowState;
use hsflow::plfunc::PiecewiseLinearFn;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random continuous piecewise-linear datum: slopes within ±2.5, segment
/// lengths within [0.05, 0.35], support starting in [−2, −1].
pub fn random_pl(rng: &mut ChaCha8Rng, max_segments: usize) -> PiecewiseLinearFn {
    let n = rng.gen_range(2..=max_segments.max(2));
    let mut bx = vec![rng.gen_range(-2.0..-1.0)];
    let mut by = vec![rng.gen_range(-1.0..1.0)];
    for _ in 0..n {
        let gap = rng.gen_range(0.05..0.35);
        let slope = rng.gen_range(-2.5..2.5);
        bx.push(bx.last().unwrap() + gap);
        by.push(by.last().unwrap() + slope * gap);
    }
    PiecewiseLinearFn::new(bx, by).unwrap()
}

pub fn corpus(seed: u64, count: usize, max_segments: usize) -> Vec<PiecewiseLinearFn> {
    let mut r = rng(seed);
    (0..count).map(|_| random_pl(&mut r, max_segments)).collect()
}

/// Small perturbation of the values (same breakpoints): a nearby datum for
/// continuity-in-data checks.
pub fn perturb(rng: &mut ChaCha8Rng, f: &PiecewiseLinearFn, amplitude: f64) -> PiecewiseLinearFn {
    let values = f
        .values()
        .iter()
        .map(|v| v + rng.gen_range(-amplitude..amplitude))
        .collect();
    PiecewiseLinearFn::new(f.breakpoints().to_vec(), values).unwrap()
}

/// Push a time out of the narrow collars around blow-up epochs, where a
/// nearly-collapsed segment's width falls below the resolution of its two
/// breakpoints and differencing cannot recover it to 1e-12.
pub fn clear_of_collapse_collar(state: &FlowState, mut t: f64, margin: f64) -> f64 {
    'retry: loop {
        for seg in state.segment_flows() {
            if seg.slope < 0.0 && (2.0 + t * seg.slope).abs() < margin {
                t += (margin + 1e-3) / seg.slope.abs();
                continue 'retry;
            }
        }
        return t;
    }
}
