//! The radial reduction of the generalized graph equation: a first-order
//! ODE for the slope variable `v = f_,s / sqrt(1 + f_,s²)` of the graph,
//!
//! ```text
//! dv/dr = sqrt(g11) ka
//!       + sqrt(g11) (2 kb - 2 (rho'/(sqrt(g11) rho)) v) / (1 - v²)
//!       - v (rho''/rho' - g11'/(2 g11))
//! ```
//!
//! integrated node to node with an embedded Dormand–Prince 5(4) scheme.
//! `|v| -> 1` marks a blow-up of the graph (the classical signature of a
//! marginally trapped sphere); the solver stops when `1 - v²` drops below
//! a configurable threshold and refines the blow-up radius by bisecting
//! the final partial step. A sign change of `rho'` (a minimal sphere,
//! where the equation degenerates) also stops the march.
//!
//! Alongside `v` the solution carries the graph's proper arclength
//! element `ds = sqrt(g11 / (1 - v²)) dr` (stored increment-first, which
//! downstream difference operators rely on), the graph areal slope
//! `phi = rho_,s = sqrt(1 - v²) rho' / sqrt(g11)`, and the quasi-local
//! mass `m = (rho/2)(1 - phi²)` along the deformed slice.

use crate::geometry::GeometryProfile;
use crate::numerics;
use crate::radial_data::{Domain, FieldKind, InitialData};

/// Errors from setting up or running the solver.
#[derive(Debug, thiserror::Error)]
pub enum JangError {
    #[error("the regular-center boundary condition applies to ball data only")]
    CenterNeedsBall,
    #[error("inner boundary values apply to annulus data only")]
    InnerBcNeedsAnnulus,
    #[error("inner value v = {0} must lie strictly inside (-1, 1) with 1 - v² above the blow-up threshold")]
    BadInnerValue(f64),
    #[error("step limit {0} exceeded")]
    StepLimit(usize),
    #[error("rho' must be positive where integration starts")]
    DegenerateStart,
}

/// Boundary condition selecting the solution branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JangBc {
    /// Regular-center start on a ball: `v(0) = 0` with the interior series
    /// `v ≈ (tr k(0)/3) r + (tr k'(0)/4) r²` seeding the march just off
    /// the center.
    Center,
    /// Explicit inner value `v(r_min)` on an annulus.
    InnerValue(f64),
    /// Geometric inner value `v(r_min) = tr_S k / H` on an annulus (the
    /// value that makes the inner sphere a marginal sphere of the graph).
    Matched,
}

/// Solver tolerances and guards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JangConfig {
    /// Relative tolerance of the embedded error control.
    pub rtol: f64,
    /// Absolute tolerance of the embedded error control.
    pub atol: f64,
    /// Blow-up threshold: stop once `1 - v²` drops below this.
    pub eps_blow: f64,
    /// Hard cap on accepted + rejected steps.
    pub max_steps: usize,
}

impl Default for JangConfig {
    fn default() -> Self {
        Self { rtol: 1e-9, atol: 1e-12, eps_blow: 1e-6, max_steps: 1_000_000 }
    }
}

/// Why the march ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    /// Reached the outer grid boundary.
    Completed,
    /// `1 - v²` fell below the threshold.
    BlowUp {
        /// Refined blow-up radius.
        r_star: f64,
        /// `v` at the stop.
        v_last: f64,
        /// `1 - v²` at the stop.
        one_minus_v_sq: f64,
        /// True when the stop was forced by step underflow rather than the
        /// threshold test.
        step_underflow: bool,
    },
    /// `rho'` lost positivity at the reported node.
    MinimalSphere { r: f64 },
}

/// Solution of the slope equation over (a prefix of) the grid.
#[derive(Debug, Clone)]
pub struct JangSolution {
    /// Covered grid nodes (always a prefix of the data grid).
    pub r: Vec<f64>,
    /// Slope variable at the covered nodes.
    pub v: Vec<f64>,
    /// Per-interval increments of graph arclength (primary data; `s` is
    /// their prefix sum).
    pub ds: Vec<f64>,
    /// Graph arclength from the first covered node.
    pub s: Vec<f64>,
    /// Graph areal slope `rho_,s`.
    pub phi: Vec<f64>,
    /// Quasi-local mass `(rho/2)(1 - phi²)` along the graph.
    pub geroch_m: Vec<f64>,
    pub termination: Termination,
}

impl JangSolution {
    /// Whether the march covered the whole grid.
    pub fn completed(&self) -> bool {
        matches!(self.termination, Termination::Completed)
    }
}

// ------------------------------------------------------------ DP5(4) core

/// One embedded Dormand–Prince 5(4) trial step from `(r, v)` with size `h`.
/// Returns the fifth-order value and the embedded error estimate; any
/// non-finite stage yields `(NAN, INF)` so the controller rejects it.
fn dp54_step(rhs: &dyn Fn(f64, f64) -> f64, r: f64, v: f64, h: f64) -> (f64, f64) {
    const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 6] = [
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    let mut k = [0.0f64; 7];
    k[0] = rhs(r, v);
    if !k[0].is_finite() {
        return (f64::NAN, f64::INFINITY);
    }
    for stage in 0..6 {
        let mut acc = 0.0;
        for (j, &kj) in k.iter().enumerate().take(stage + 1) {
            acc += A[stage][j] * kj;
        }
        k[stage + 1] = rhs(r + C[stage] * h, v + h * acc);
        if !k[stage + 1].is_finite() {
            return (f64::NAN, f64::INFINITY);
        }
    }
    let mut v5 = 0.0;
    let mut v4 = 0.0;
    for j in 0..7 {
        v5 += B5[j] * k[j];
        v4 += B4[j] * k[j];
    }
    let v5 = v + h * v5;
    let v4 = v + h * v4;
    (v5, (v5 - v4).abs())
}

enum IntervalEnd {
    Reached { v: f64, h_next: f64 },
    Stopped { r_star: f64, v_last: f64, one_minus_v_sq: f64, step_underflow: bool },
}

/// Integrate the slope equation across `[a, b]` starting from `v0`,
/// stopping early on blow-up.
fn integrate_interval(
    rhs: &dyn Fn(f64, f64) -> f64,
    a: f64,
    b: f64,
    v0: f64,
    h0: f64,
    cfg: &JangConfig,
    steps: &mut usize,
) -> Result<IntervalEnd, JangError> {
    let mut r = a;
    let mut v = v0;
    let mut h = h0.min(b - a).max(1e-300);
    loop {
        if *steps >= cfg.max_steps {
            return Err(JangError::StepLimit(cfg.max_steps));
        }
        *steps += 1;
        let clamped = h.min(b - r);
        let (v_new, err) = dp54_step(rhs, r, v, clamped);
        let tol = cfg.atol + cfg.rtol * v.abs().max(if v_new.is_finite() { v_new.abs() } else { 0.0 });
        if !v_new.is_finite() || err > tol {
            // reject: shrink and retry
            let factor = if v_new.is_finite() { (0.9 * (tol / err).powf(0.2)).clamp(0.2, 1.0) } else { 0.5 };
            h = clamped * factor;
            if h < 4.0 * f64::EPSILON * r.abs().max(1.0) {
                return Ok(IntervalEnd::Stopped {
                    r_star: r,
                    v_last: v,
                    one_minus_v_sq: 1.0 - v * v,
                    step_underflow: true,
                });
            }
            continue;
        }
        // accepted; check for blow-up inside this step
        if 1.0 - v_new * v_new < cfg.eps_blow {
            let (r_star, v_stop) = refine_blow_up(rhs, r, v, clamped, cfg.eps_blow);
            return Ok(IntervalEnd::Stopped {
                r_star,
                v_last: v_stop,
                one_minus_v_sq: 1.0 - v_stop * v_stop,
                step_underflow: false,
            });
        }
        r += clamped;
        v = v_new;
        let grow = if err == 0.0 { 5.0 } else { (0.9 * (tol / err).powf(0.2)).clamp(0.2, 5.0) };
        h = (clamped * grow).max(1e-300);
        if r >= b - 0.5 * f64::EPSILON * b.abs().max(1.0) {
            return Ok(IntervalEnd::Reached { v, h_next: h });
        }
    }
}

/// Bisect the fraction of the final step at which `1 - v²` crosses the
/// blow-up threshold. The partial step is re-taken as a single trial step,
/// which is accurate because the full step already passed error control.
fn refine_blow_up(
    rhs: &dyn Fn(f64, f64) -> f64,
    r: f64,
    v: f64,
    h: f64,
    eps_blow: f64,
) -> (f64, f64) {
    let gap = |alpha: f64| -> (f64, f64) {
        if alpha == 0.0 {
            return (1.0 - v * v - eps_blow, v);
        }
        let (v_a, _) = dp54_step(rhs, r, v, alpha * h);
        if v_a.is_finite() {
            (1.0 - v_a * v_a - eps_blow, v_a)
        } else {
            (f64::NEG_INFINITY, v)
        }
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut v_stop = gap(1.0).1;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let (g, v_mid) = gap(mid);
        if g > 0.0 {
            lo = mid;
        } else {
            hi = mid;
            v_stop = v_mid;
        }
    }
    (r + hi * h, v_stop)
}

// ---------------------------------------------------------------- solver

/// Solve the slope equation over the data grid.
pub fn solve_jang(data: &InitialData, bc: JangBc, cfg: &JangConfig) -> Result<JangSolution, JangError> {
    let grid = data.grid();
    let r = grid.r();
    let n = r.len();
    let ball = grid.domain() == Domain::Ball;

    let g11 = data.eval(FieldKind::G11);
    let rho = data.eval(FieldKind::Rho);
    let ka = data.eval(FieldKind::Ka);
    let kb = data.eval(FieldKind::Kb);
    let rhs = move |x: f64, v: f64| -> f64 {
        let g = g11.value(x);
        let dg = g11.d1(x);
        let p = rho.value(x);
        let dp = rho.d1(x);
        let ddp = rho.d2(x);
        let sg = g.sqrt();
        let one_mv2 = 1.0 - v * v;
        sg * ka.value(x) + sg * (2.0 * kb.value(x) - 2.0 * (dp / (sg * p)) * v) / one_mv2
            - v * (ddp / dp - dg / (2.0 * g))
    };

    let drho = data.derivative(FieldKind::Rho, 1);

    // starting state: (first covered node index, radius, v there, and the v
    // recorded for that node)
    let (start_r, start_v, node0_v) = match bc {
        JangBc::Center => {
            if !ball {
                return Err(JangError::CenterNeedsBall);
            }
            let ka0 = data.samples(FieldKind::Ka)[0];
            let kb0 = data.samples(FieldKind::Kb)[0];
            let trk0 = ka0 + 2.0 * kb0;
            let dtrk0 = data.derivative(FieldKind::Ka, 1)[0] + 2.0 * data.derivative(FieldKind::Kb, 1)[0];
            let r_eps = r[1] * 1e-3;
            let v_eps = trk0 / 3.0 * r_eps + dtrk0 / 4.0 * r_eps * r_eps;
            (r_eps, v_eps, 0.0)
        }
        JangBc::InnerValue(v0) => {
            if ball {
                return Err(JangError::InnerBcNeedsAnnulus);
            }
            if !(v0.is_finite() && 1.0 - v0 * v0 >= cfg.eps_blow) {
                return Err(JangError::BadInnerValue(v0));
            }
            (r[0], v0, v0)
        }
        JangBc::Matched => {
            if ball {
                return Err(JangError::InnerBcNeedsAnnulus);
            }
            // v = tr_S k / H = kb rho sqrt(g11) / rho'
            let v0 = kb.value(r[0]) * rho.value(r[0]) * g11.value(r[0]).sqrt() / rho.d1(r[0]);
            if !(v0.is_finite() && 1.0 - v0 * v0 >= cfg.eps_blow) {
                return Err(JangError::BadInnerValue(v0));
            }
            (r[0], v0, v0)
        }
    };
    if drho[0] <= 0.0 || (ball && drho.get(1).copied().unwrap_or(1.0) <= 0.0) {
        return Err(JangError::DegenerateStart);
    }

    let mut covered_r = vec![r[0]];
    let mut covered_v = vec![node0_v];
    let mut termination = Termination::Completed;
    let mut steps = 0usize;
    let mut cur_r = start_r;
    let mut cur_v = start_v;
    let mut h = (r[n - 1] - r[0]) * 1e-3;

    for i in 1..n {
        if drho[i] <= 0.0 {
            termination = Termination::MinimalSphere { r: r[i] };
            break;
        }
        match integrate_interval(&rhs, cur_r, r[i], cur_v, h, cfg, &mut steps)? {
            IntervalEnd::Reached { v, h_next } => {
                covered_r.push(r[i]);
                covered_v.push(v);
                cur_r = r[i];
                cur_v = v;
                h = h_next;
            }
            IntervalEnd::Stopped { r_star, v_last, one_minus_v_sq, step_underflow } => {
                termination = Termination::BlowUp { r_star, v_last, one_minus_v_sq, step_underflow };
                break;
            }
        }
    }

    Ok(finish_solution(data, covered_r, covered_v, termination))
}

/// Attach the derived fields (arclength increments, areal slope, graph
/// mass) to a slope profile over a covered prefix of the grid.
fn finish_solution(
    data: &InitialData,
    covered_r: Vec<f64>,
    covered_v: Vec<f64>,
    termination: Termination,
) -> JangSolution {
    let m = covered_r.len();
    let g11s = data.samples(FieldKind::G11);
    let rhos = data.samples(FieldKind::Rho);
    let drho = data.derivative(FieldKind::Rho, 1);
    let integrand: Vec<f64> =
        (0..m).map(|i| (g11s[i] / (1.0 - covered_v[i] * covered_v[i])).sqrt()).collect();
    let ds = if m >= 2 { numerics::quadrature_increments(&covered_r, &integrand) } else { Vec::new() };
    let s = numerics::prefix_sums(&ds);
    let phi: Vec<f64> = (0..m)
        .map(|i| (1.0 - covered_v[i] * covered_v[i]).sqrt() * drho[i] / g11s[i].sqrt())
        .collect();
    let geroch_m: Vec<f64> = (0..m).map(|i| 0.5 * rhos[i] * (1.0 - phi[i] * phi[i])).collect();
    JangSolution { r: covered_r, v: covered_v, ds, s, phi, geroch_m, termination }
}

/// Build a solution directly from a closed-form slope profile, without
/// integrating the ODE. Useful for validating the downstream identities
/// against exact branches. On a ball, `v_of_r` must be regular with
/// `v(0) = 0`.
pub fn solution_from_slope(data: &InitialData, v_of_r: impl Fn(f64) -> f64) -> JangSolution {
    let r = data.grid().r().to_vec();
    let v: Vec<f64> = r.iter().map(|&x| v_of_r(x)).collect();
    finish_solution(data, r, v, Termination::Completed)
}

// ------------------------------------------------------------- diagnostics

/// Pointwise diagnostics of a solution along the graph.
#[derive(Debug, Clone)]
pub struct JangDiagnostics {
    /// Covered nodes (copy of the solution's).
    pub r: Vec<f64>,
    /// Tilt component of the graph's second fundamental form defect,
    /// `a_t = sqrt(g^11) (rho'/rho) v - kb` (center entry is its limit
    /// `(ka - kb)/3`).
    pub a_t: Vec<f64>,
    /// Normal component `a_n = -2 a_t / (1 - v²)`.
    pub a_n: Vec<f64>,
    /// Flux component `q_s = -2 v a_t / sqrt(1 - v²)`.
    pub q_s: Vec<f64>,
    /// `a_n² + 2 a_t²` (enters the mass identity as the shear-like square).
    pub h_k_sq: Vec<f64>,
    /// `q_s²`.
    pub q_sq: Vec<f64>,
    /// Tilted matter density `mu - v J(n)`.
    pub mu_jw: Vec<f64>,
    /// Radial derivative of the reconstructed graph height,
    /// `f' = v sqrt(g11) / (phi sqrt(1 - v²))`.
    pub f_r: Vec<f64>,
    /// Boundary mass density `sqrt(g^11) rho' v a_t rho²`.
    pub boundary_density: Vec<f64>,
}

/// Compute diagnostics for a solution. `profile` must belong to the same
/// data set (it supplies `mu` and `jn`).
pub fn jang_diagnostics(
    data: &InitialData,
    profile: &GeometryProfile,
    sol: &JangSolution,
) -> JangDiagnostics {
    let m = sol.r.len();
    let g11 = data.samples(FieldKind::G11);
    let rho = data.samples(FieldKind::Rho);
    let kas = data.samples(FieldKind::Ka);
    let kbs = data.samples(FieldKind::Kb);
    let drho = data.derivative(FieldKind::Rho, 1);
    let ball = data.grid().domain() == Domain::Ball;

    let mut a_t = Vec::with_capacity(m);
    for i in 0..m {
        if i == 0 && ball {
            a_t.push((kas[0] - kbs[0]) / 3.0);
        } else {
            a_t.push(drho[i] / (g11[i].sqrt() * rho[i]) * sol.v[i] - kbs[i]);
        }
    }
    let mut out = JangDiagnostics {
        r: sol.r.clone(),
        a_t,
        a_n: Vec::with_capacity(m),
        q_s: Vec::with_capacity(m),
        h_k_sq: Vec::with_capacity(m),
        q_sq: Vec::with_capacity(m),
        mu_jw: Vec::with_capacity(m),
        f_r: Vec::with_capacity(m),
        boundary_density: Vec::with_capacity(m),
    };
    for i in 0..m {
        let v = sol.v[i];
        let one_mv2 = 1.0 - v * v;
        let at = out.a_t[i];
        let an = -2.0 * at / one_mv2;
        let qs = -2.0 * v * at / one_mv2.sqrt();
        out.a_n.push(an);
        out.q_s.push(qs);
        out.h_k_sq.push(an * an + 2.0 * at * at);
        out.q_sq.push(qs * qs);
        out.mu_jw.push(profile.mu[i] - v * profile.jn[i]);
        out.f_r.push(v * g11[i].sqrt() / (sol.phi[i] * one_mv2.sqrt()));
        out.boundary_density.push(drho[i] / g11[i].sqrt() * v * at * rho[i] * rho[i]);
    }
    out
}

/// Reconstruct the graph height `f` (up to its free constant) by
/// integrating `f_r` over the covered nodes; `f = 0` at the first node.
pub fn reconstruct_f(diag: &JangDiagnostics) -> Vec<f64> {
    numerics::cumulative_integral(&diag.r, &diag.f_r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry;
    use crate::radial_data::{build_family, Domain, FamilySpec, RadialGrid};
    use approx::assert_relative_eq;

    fn ball(n: usize, r_max: f64) -> RadialGrid {
        RadialGrid::uniform(0.0, r_max, n, Domain::Ball).unwrap()
    }

    fn annulus(r0: f64, r1: f64, n: usize) -> RadialGrid {
        RadialGrid::uniform(r0, r1, n, Domain::Annulus).unwrap()
    }

    #[test]
    fn flat_slicing_matched_solution_tracks_closed_form() {
        let data = build_family(&FamilySpec::PainleveGullstrand { m: 1.0 }, annulus(3.0, 10.0, 57)).unwrap();
        let sol = solve_jang(&data, JangBc::Matched, &JangConfig::default()).unwrap();
        assert!(sol.completed());
        // the matched start is exactly on the closed-form branch v = -sqrt(2/r)
        assert_relative_eq!(sol.v[0], -(2.0f64 / 3.0).sqrt(), max_relative = 1e-14);
        for (i, &r) in sol.r.iter().enumerate() {
            let exact = -(2.0 / r).sqrt();
            assert_relative_eq!(sol.v[i], exact, max_relative = 1e-8);
            assert_relative_eq!(sol.phi[i], (1.0 - 2.0 / r).sqrt(), max_relative = 1e-8);
            assert_relative_eq!(sol.geroch_m[i], 1.0, max_relative = 1e-8);
        }
        assert_relative_eq!(*sol.v.last().unwrap(), -0.4472135954999579, max_relative = 1e-9);
    }

    #[test]
    fn time_symmetric_data_has_the_trivial_solution_exactly() {
        let mu0 = 3.0 / (800.0 * std::f64::consts::PI);
        let data = build_family(&FamilySpec::ConstantDensityStar { mu0, r_star: 5.0 }, ball(65, 6.0)).unwrap();
        let sol = solve_jang(&data, JangBc::Center, &JangConfig::default()).unwrap();
        assert!(sol.completed());
        for &v in &sol.v {
            assert_eq!(v, 0.0, "trivial branch must be exact in floating point");
        }
        // with v = 0 the graph arclength is the proper radius and the graph
        // mass is the quasi-local mass of the slice itself
        let profile = geometry::geometry_profile(&data);
        for i in 0..sol.r.len() {
            assert_eq!(sol.s[i].to_bits(), profile.rad[i].to_bits());
            assert_relative_eq!(sol.phi[i], profile.rho_t[i], max_relative = 1e-14);
        }
    }

    #[test]
    fn flat_slicing_from_zero_inner_value_blows_up_early() {
        let data = build_family(&FamilySpec::PainleveGullstrand { m: 1.0 }, annulus(0.5, 10.0, 97)).unwrap();
        let sol = solve_jang(&data, JangBc::InnerValue(0.0), &JangConfig::default()).unwrap();
        let Termination::BlowUp { r_star, v_last, one_minus_v_sq, step_underflow } = sol.termination else {
            panic!("expected a blow-up, got {:?}", sol.termination);
        };
        assert!((r_star - 0.6823).abs() < 1e-3, "blow-up radius {r_star}");
        assert!(!step_underflow);
        assert!(one_minus_v_sq <= 1.01e-6, "stop threshold honored: {one_minus_v_sq}");
        assert!(v_last < -0.999);
        // no recorded node crosses the threshold
        for &v in &sol.v {
            assert!(1.0 - v * v >= 0.99e-6);
        }
        // nodes stop strictly before the blow-up radius
        assert!(*sol.r.last().unwrap() <= r_star);
        assert!(sol.r.len() < 97);
    }

    #[test]
    fn collapsing_slice_blows_up_at_the_trapped_radius() {
        let data = build_family(
            &FamilySpec::UniformCollapse { k0: 2.0, beta: 2.9, scale: 1.0 },
            ball(65, 1.0),
        )
        .unwrap();
        let sol = solve_jang(&data, JangBc::Center, &JangConfig::default()).unwrap();
        let Termination::BlowUp { r_star, step_underflow, .. } = sol.termination else {
            panic!("expected a blow-up, got {:?}", sol.termination);
        };
        assert!(!step_underflow);
        // v -> -1 exactly where θ₊ roots (r = 1/k0 = 0.5), approached from below
        assert!((r_star - 0.5).abs() < 1e-3, "blow-up radius {r_star}");
        assert!(r_star < 0.5);
    }

    #[test]
    fn collapsing_slice_spot_values_match_the_reference_integration() {
        let data = build_family(
            &FamilySpec::UniformCollapse { k0: 1.0, beta: 1.0, scale: 1.0 },
            ball(129, 0.8),
        )
        .unwrap();
        let cfg = JangConfig { rtol: 1e-10, ..JangConfig::default() };
        let sol = solve_jang(&data, JangBc::Center, &cfg).unwrap();
        assert!(sol.completed());
        assert_relative_eq!(*sol.v.last().unwrap(), -0.8826322762976753, max_relative = 1e-8);
        assert_relative_eq!(*sol.geroch_m.last().unwrap(), 0.3116158940649663, max_relative = 1e-7);
        // ds/dr = 1/sqrt(1-v²) > 1 on a flat metric
        assert!(*sol.s.last().unwrap() > 0.8);
    }

    #[test]
    fn center_series_matches_the_first_two_orders() {
        // tr k = -(3 + r): v ≈ -r - r²/4 near the center
        let data = build_family(
            &FamilySpec::UniformCollapse { k0: 1.0, beta: 1.0, scale: 1.0 },
            ball(17, 0.01),
        )
        .unwrap();
        let sol = solve_jang(&data, JangBc::Center, &JangConfig { rtol: 1e-12, ..Default::default() }).unwrap();
        let r = *sol.r.last().unwrap();
        let series = -r - r * r / 4.0;
        assert!((sol.v.last().unwrap() - series).abs() < 1e-8, "v({r}) = {} vs series {series}", sol.v.last().unwrap());
    }

    #[test]
    fn boundary_conditions_respect_domains() {
        let ann = build_family(&FamilySpec::PainleveGullstrand { m: 1.0 }, annulus(3.0, 10.0, 33)).unwrap();
        assert!(matches!(
            solve_jang(&ann, JangBc::Center, &JangConfig::default()),
            Err(JangError::CenterNeedsBall)
        ));
        let ball_data = build_family(&FamilySpec::Minkowski, ball(33, 1.0)).unwrap();
        assert!(matches!(
            solve_jang(&ball_data, JangBc::InnerValue(0.1), &JangConfig::default()),
            Err(JangError::InnerBcNeedsAnnulus)
        ));
        assert!(matches!(
            solve_jang(&ann, JangBc::InnerValue(1.5), &JangConfig::default()),
            Err(JangError::BadInnerValue(_))
        ));
    }

    #[test]
    fn diagnostics_follow_the_closed_form_on_the_flat_slicing() {
        let data = build_family(&FamilySpec::PainleveGullstrand { m: 1.0 }, annulus(3.0, 10.0, 57)).unwrap();
        let profile = geometry::geometry_profile(&data);
        let sol = solve_jang(&data, JangBc::Matched, &JangConfig::default()).unwrap();
        let diag = jang_diagnostics(&data, &profile, &sol);
        for (i, &r) in diag.r.iter().enumerate() {
            // exact branch: a_t = v/r - kb = -sqrt(2/r³) + sqrt(2/r³) = 0
            assert!(diag.a_t[i].abs() < 1e-8, "a_t({r}) = {}", diag.a_t[i]);
            // f' = -sqrt(2/r)/(1 - 2/r)
            let exact_fr = -(2.0 / r).sqrt() / (1.0 - 2.0 / r);
            assert_relative_eq!(diag.f_r[i], exact_fr, max_relative = 1e-7);
            assert!(diag.mu_jw[i].abs() < 1e-11, "vacuum tilted density at r = {r}");
        }
    }

    #[test]
    fn collapsing_slice_diagnostic_spot_values() {
        let data = build_family(
            &FamilySpec::UniformCollapse { k0: 1.0, beta: 1.0, scale: 1.0 },
            ball(129, 0.8),
        )
        .unwrap();
        let profile = geometry::geometry_profile(&data);
        let cfg = JangConfig { rtol: 1e-10, ..JangConfig::default() };
        let sol = solve_jang(&data, JangBc::Center, &cfg).unwrap();
        let diag = jang_diagnostics(&data, &profile, &sol);
        assert_relative_eq!(*diag.a_t.last().unwrap(), -0.10329034537209392, max_relative = 1e-7);
        // center limit: a_t(0) = (ka - kb)/3 = (-1 + 1)/3 = 0
        assert!(diag.a_t[0].abs() < 1e-15);
        // the tilted density dips at an interior radius
        let (mut min_v, mut min_r) = (f64::INFINITY, 0.0);
        for (i, &v) in diag.mu_jw.iter().enumerate() {
            if v < min_v {
                min_v = v;
                min_r = diag.r[i];
            }
        }
        assert!((min_v - 0.1125013).abs() < 1e-4, "min tilted density {min_v}");
        assert!((min_r - 0.7427).abs() < 0.02, "minimum sits near r = 0.74, got {min_r}");
        // algebraic identity q_s = v a_n sqrt(1 - v²)
        for i in 0..diag.r.len() {
            let v = sol.v[i];
            let want = v * diag.a_n[i] * (1.0 - v * v).sqrt();
            assert_relative_eq!(diag.q_s[i], want, epsilon = 1e-13, max_relative = 1e-11);
        }
    }

    #[test]
    fn minimal_sphere_stops_the_march() {
        // rho = sin(r) on [0, 2]: rho' changes sign at π/2
        use crate::radial_data::{AnalyticField, FieldProvider, InitialData, Units};
        let data = InitialData::new(
            ball(65, 2.0),
            FieldProvider::analytic(Units::Dimensionless, AnalyticField::constant(1.0)),
            FieldProvider::analytic(
                Units::Length,
                AnalyticField::new(|r| r.sin(), |r| r.cos(), |r| -r.sin()),
            ),
            FieldProvider::analytic(Units::InverseLength, AnalyticField::constant(0.0)),
            FieldProvider::analytic(Units::InverseLength, AnalyticField::constant(0.0)),
            "closed slice",
        )
        .unwrap();
        let sol = solve_jang(&data, JangBc::Center, &JangConfig::default()).unwrap();
        let Termination::MinimalSphere { r } = sol.termination else {
            panic!("expected minimal-sphere stop, got {:?}", sol.termination);
        };
        assert!(r > std::f64::consts::FRAC_PI_2 && r < std::f64::consts::FRAC_PI_2 + 0.1);
        assert!(*sol.r.last().unwrap() < r);
    }
}
