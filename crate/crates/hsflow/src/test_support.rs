//! Shared helpers for the unit tests: independent oracles (ODE integration,
//! grid quadrature) and proptest generators. Test-only; never part of the
//! production evaluation path.

use crate::plfunc::PiecewiseLinearFn;
use proptest::collection::vec;
use proptest::prelude::*;

pub fn hat() -> PiecewiseLinearFn {
    PiecewiseLinearFn::new(vec![-1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]).unwrap()
}

/// RK4 integrator for the gradient equation ż = −z²/2.
pub struct GradientOde {
    pub z0: f64,
}

pub fn rk4_gradient_ode(z0: f64) -> GradientOde {
    GradientOde { z0 }
}

impl GradientOde {
    fn rhs(z: f64) -> f64 {
        -0.5 * z * z
    }

    fn step(z: f64, h: f64) -> f64 {
        let k1 = Self::rhs(z);
        let k2 = Self::rhs(z + 0.5 * h * k1);
        let k3 = Self::rhs(z + 0.5 * h * k2);
        let k4 = Self::rhs(z + h * k3);
        z + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    }

    /// Integrate to a fixed horizon (caller guarantees no blow-up before it).
    pub fn integrate_to(&self, t_end: f64) -> f64 {
        let mut z = self.z0;
        let mut t = 0.0;
        while t < t_end {
            let h = (0.002 / z.abs().max(1.0)).min(t_end - t);
            z = Self::step(z, h);
            t += h;
        }
        z
    }

    /// Integrate until |z| exceeds 1e6 and report the time reached.
    pub fn integrate_to_blowup(&self) -> f64 {
        assert!(self.z0 < 0.0);
        let mut z = self.z0;
        let mut t = 0.0;
        while z.abs() < 1e6 {
            let h = 0.002 / z.abs().max(1.0);
            z = Self::step(z, h);
            t += h;
        }
        t
    }
}

/// Grid quadrature of ¼ ∫_{alive} sign(y−x) ū_x²(x) dx, with the survivor
/// test applied pointwise from the sampled slope.
pub fn phi_by_quadrature(u: &PiecewiseLinearFn, t: f64, y: f64, cells: usize) -> f64 {
    let (a, b) = (
        u.breakpoints()[0],
        *u.breakpoints().last().unwrap(),
    );
    if a == b {
        return 0.0;
    }
    let h = (b - a) / cells as f64;
    let mut acc = 0.0;
    for i in 0..cells {
        let x = a + (i as f64 + 0.5) * h;
        let s = u.slope_at(x);
        if 2.0 + t * s <= 0.0 {
            continue;
        }
        acc += (y - x).signum() * s * s * h;
    }
    0.25 * acc
}

/// Simpson quadrature of ξ(t,y) = y + t·ū(y) + ∫₀ᵗ (t−s)φ(s,y) ds with φ
/// itself obtained by grid quadrature. The integrand jumps wherever some
/// sampled slope blows up, so the rule is applied piecewise between those
/// times (detected here from the sampled slopes alone).
pub fn xi_by_quadrature(u: &PiecewiseLinearFn, t: f64, y: f64) -> f64 {
    let mut cuts = vec![0.0, t];
    let (a, b) = (u.breakpoints()[0], *u.breakpoints().last().unwrap());
    for i in 0..2000 {
        let s = u.slope_at(a + (i as f64 + 0.5) * (b - a) / 2000.0);
        if s < 0.0 && -2.0 / s < t {
            cuts.push(-2.0 / s);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let f = |s: f64| (t - s) * phi_by_quadrature(u, s, y, 4000);
    let mut acc = 0.0;
    for w in cuts.windows(2) {
        let n = 500; // even
        let h = (w[1] - w[0]) / n as f64;
        // keep evaluation inside the open interval: the integrand jumps at
        // the cut times themselves
        let nudge = h * 1e-6;
        let g = |s: f64| f(s.clamp(w[0] + nudge, w[1] - nudge));
        let mut piece = g(w[0]) + g(w[1]);
        for i in 1..n {
            piece += if i % 2 == 1 { 4.0 } else { 2.0 } * g(w[0] + i as f64 * h);
        }
        acc += piece * h / 3.0;
    }
    y + t * u.eval(y) + acc
}

/// Push a time out of the narrow collars around blow-up epochs where a
/// nearly-collapsed segment's width falls below breakpoint resolution.
pub fn clear_of_collapse_collar(state: &crate::flow::FlowState, mut t: f64, margin: f64) -> f64 {
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

/// Random piecewise-linear functions with moderate slopes and support.
pub fn arb_plfn() -> impl Strategy<Value = PiecewiseLinearFn> {
    (2usize..8).prop_flat_map(|n| {
        (
            vec(0.05f64..0.8, n),
            vec(-3.0f64..3.0, n),
            -2.0f64..0.0,
            -1.0f64..1.0,
        )
            .prop_map(|(gaps, slopes, x0, v0)| {
                let mut bx = vec![x0];
                let mut by = vec![v0];
                for (g, s) in gaps.iter().zip(&slopes) {
                    bx.push(bx.last().unwrap() + g);
                    by.push(by.last().unwrap() + s * g);
                }
                PiecewiseLinearFn::new(bx, by).unwrap()
            })
    })
}
