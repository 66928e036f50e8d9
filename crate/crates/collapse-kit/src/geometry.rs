//! Pointwise geometry of a radial data set: intrinsic curvature, the
//! constraint densities `mu` and `J(n)`, sphere expansions, and cumulative
//! proper radius / volume.
//!
//! Notation: `'` is `d/dr`, the unit radial derivative is
//! `d/dt = (1/sqrt(g11)) d/dr`, and `rho_t = rho' / sqrt(g11)`.
//! The formulas implemented here are
//!
//! ```text
//! R      = -4 rho_tt / rho + 2 (1 - rho_t^2) / rho^2
//! 16π mu = R + (tr k)^2 - |k|^2,   tr k = ka + 2 kb,  |k|^2 = ka^2 + 2 kb^2
//! 8π J(n) = 2 (rho_t / rho)(ka - kb) - 2 kb_t
//! H      = 2 rho_t / rho,          tr_S k = 2 kb
//! θ±     = H ± tr_S k
//! ```
//!
//! On a ball the center entries of `R`, `mu`, and `J(n)` are `r -> 0`
//! limits (Richardson extrapolation for closed-form data, quadratic
//! extrapolation from the first interior nodes for tabulated data), while
//! `H` and `θ±` diverge there and are stored as `+inf`.

use crate::numerics;
use crate::radial_data::{Domain, FieldKind, InitialData};

/// 4π, the area of the unit sphere.
pub const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// Geometry at a single radius.
#[derive(Debug, Clone, Copy)]
pub struct PointGeometry {
    pub r: f64,
    pub sqrt_g11: f64,
    pub rho: f64,
    pub rho_t: f64,
    pub scalar_curvature: f64,
    pub mu: f64,
    pub jn: f64,
    pub mean_curvature: f64,
    pub tr_sk: f64,
    pub theta_plus: f64,
    pub theta_minus: f64,
    pub tr_gk: f64,
    pub k_norm_sq: f64,
}

#[allow(clippy::too_many_arguments)]
fn point_geometry(
    r: f64,
    g11: f64,
    dg11: f64,
    rho: f64,
    drho: f64,
    ddrho: f64,
    ka: f64,
    kb: f64,
    dkb: f64,
) -> PointGeometry {
    let sg = g11.sqrt();
    let rho_t = drho / sg;
    let rho_tt = ddrho / g11 - drho * dg11 / (2.0 * g11 * g11);
    let scalar_curvature = -4.0 * rho_tt / rho + 2.0 * (1.0 - rho_t * rho_t) / (rho * rho);
    let tr_gk = ka + 2.0 * kb;
    let k_norm_sq = ka * ka + 2.0 * kb * kb;
    let mu = (scalar_curvature + tr_gk * tr_gk - k_norm_sq) / (4.0 * FOUR_PI);
    let jn = (2.0 * (rho_t / rho) * (ka - kb) - 2.0 * dkb / sg) / (2.0 * FOUR_PI);
    let mean_curvature = 2.0 * rho_t / rho;
    let tr_sk = 2.0 * kb;
    PointGeometry {
        r,
        sqrt_g11: sg,
        rho,
        rho_t,
        scalar_curvature,
        mu,
        jn,
        mean_curvature,
        tr_sk,
        theta_plus: mean_curvature + tr_sk,
        theta_minus: mean_curvature - tr_sk,
        tr_gk,
        k_norm_sq,
    }
}

/// Geometry at any radius in the domain (`r > 0` on a ball).
///
/// Closed-form fields are evaluated exactly; tabulated fields through the
/// local-cubic interpolant.
pub fn geometry_at(data: &InitialData, r: f64) -> PointGeometry {
    let g11 = data.eval(FieldKind::G11);
    let rho = data.eval(FieldKind::Rho);
    let ka = data.eval(FieldKind::Ka);
    let kb = data.eval(FieldKind::Kb);
    point_geometry(
        r,
        g11.value(r),
        g11.d1(r),
        rho.value(r),
        rho.d1(r),
        rho.d2(r),
        ka.value(r),
        kb.value(r),
        kb.d1(r),
    )
}

/// Per-node geometry of a data set.
#[derive(Debug, Clone)]
pub struct GeometryProfile {
    pub r: Vec<f64>,
    pub sqrt_g11: Vec<f64>,
    pub rho: Vec<f64>,
    /// Unit-radial derivative of the areal radius, `rho' / sqrt(g11)`.
    pub rho_t: Vec<f64>,
    /// Intrinsic scalar curvature of the slice.
    pub scalar_curvature: Vec<f64>,
    /// Energy density (Hamiltonian constraint).
    pub mu: Vec<f64>,
    /// Radial momentum density (momentum constraint).
    pub jn: Vec<f64>,
    /// Mean curvature of the centered sphere through each node.
    pub mean_curvature: Vec<f64>,
    /// Sphere-tangential trace of k, `2 kb`.
    pub tr_sk: Vec<f64>,
    pub theta_plus: Vec<f64>,
    pub theta_minus: Vec<f64>,
    pub tr_gk: Vec<f64>,
    pub k_norm_sq: Vec<f64>,
    /// Proper radial distance from the inner grid boundary.
    pub rad: Vec<f64>,
    /// Proper volume swept from the inner grid boundary.
    pub vol: Vec<f64>,
    pub domain: Domain,
    /// True when node 0 is a regular center: its `R`/`mu`/`jn` entries are
    /// extrapolated limits and `H`, `θ±` are `+inf` there.
    pub center_is_limit: bool,
}

impl GeometryProfile {
    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.r.len()
    }

    /// Never true for profiles built by [`geometry_profile`].
    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Pointwise dominant-energy margin `mu - |jn|`.
    pub fn dec_margin(&self) -> Vec<f64> {
        self.mu.iter().zip(self.jn.iter()).map(|(&m, &j)| m - j.abs()).collect()
    }
}

/// Dominant-energy-condition summary for a profile.
#[derive(Debug, Clone, Copy)]
pub struct DecReport {
    /// Whether `mu >= |jn| - tol` holds at every node.
    pub satisfied: bool,
    /// Smallest margin `mu - |jn|` over the nodes.
    pub worst_margin: f64,
    /// Radius where the smallest margin occurs.
    pub worst_r: f64,
    /// Number of nodes with margin below `-tol`.
    pub violation_count: usize,
    /// Absolute tolerance used.
    pub tol: f64,
}

/// Check the dominant energy condition `mu >= |jn|` node by node.
pub fn dec_check(profile: &GeometryProfile, tol: f64) -> DecReport {
    let margins = profile.dec_margin();
    let (mut worst, mut worst_r, mut count) = (f64::INFINITY, profile.r[0], 0usize);
    for (i, &m) in margins.iter().enumerate() {
        if m < worst {
            worst = m;
            worst_r = profile.r[i];
        }
        if m < -tol {
            count += 1;
        }
    }
    DecReport { satisfied: count == 0, worst_margin: worst, worst_r, violation_count: count, tol }
}

/// Compute the full per-node geometry of a data set.
pub fn geometry_profile(data: &InitialData) -> GeometryProfile {
    let grid = data.grid();
    let r = grid.r().to_vec();
    let n = r.len();
    let ball = grid.domain() == Domain::Ball;

    let g11 = data.samples(FieldKind::G11);
    let rho = data.samples(FieldKind::Rho);
    let ka = data.samples(FieldKind::Ka);
    let kb = data.samples(FieldKind::Kb);
    let drho = data.derivative(FieldKind::Rho, 1);
    let ddrho = data.derivative(FieldKind::Rho, 2);
    let dg11 = data.derivative(FieldKind::G11, 1);
    let dkb = data.derivative(FieldKind::Kb, 1);

    let mut out = GeometryProfile {
        r: r.clone(),
        sqrt_g11: vec![0.0; n],
        rho: rho.clone(),
        rho_t: vec![0.0; n],
        scalar_curvature: vec![0.0; n],
        mu: vec![0.0; n],
        jn: vec![0.0; n],
        mean_curvature: vec![0.0; n],
        tr_sk: vec![0.0; n],
        theta_plus: vec![0.0; n],
        theta_minus: vec![0.0; n],
        tr_gk: vec![0.0; n],
        k_norm_sq: vec![0.0; n],
        rad: Vec::new(),
        vol: Vec::new(),
        domain: grid.domain(),
        center_is_limit: ball,
    };

    let start = usize::from(ball);
    for i in start..n {
        let p = point_geometry(r[i], g11[i], dg11[i], rho[i], drho[i], ddrho[i], ka[i], kb[i], dkb[i]);
        out.sqrt_g11[i] = p.sqrt_g11;
        out.rho_t[i] = p.rho_t;
        out.scalar_curvature[i] = p.scalar_curvature;
        out.mu[i] = p.mu;
        out.jn[i] = p.jn;
        out.mean_curvature[i] = p.mean_curvature;
        out.tr_sk[i] = p.tr_sk;
        out.theta_plus[i] = p.theta_plus;
        out.theta_minus[i] = p.theta_minus;
        out.tr_gk[i] = p.tr_gk;
        out.k_norm_sq[i] = p.k_norm_sq;
    }

    if ball {
        // regular values at the center
        out.sqrt_g11[0] = g11[0].sqrt();
        out.rho_t[0] = drho[0] / out.sqrt_g11[0];
        out.tr_sk[0] = 2.0 * kb[0];
        out.tr_gk[0] = ka[0] + 2.0 * kb[0];
        out.k_norm_sq[0] = ka[0] * ka[0] + 2.0 * kb[0] * kb[0];
        // divergent values at the center
        out.mean_curvature[0] = f64::INFINITY;
        out.theta_plus[0] = f64::INFINITY;
        out.theta_minus[0] = f64::INFINITY;
        // r -> 0 limits of the singular-looking quotients
        if data.is_analytic() {
            let h0 = grid.r_max() / 8.0;
            out.scalar_curvature[0] =
                numerics::limit_by_extrapolation(|h| geometry_at(data, h).scalar_curvature, h0, 7);
            out.mu[0] = numerics::limit_by_extrapolation(|h| geometry_at(data, h).mu, h0, 7);
            out.jn[0] = numerics::limit_by_extrapolation(|h| geometry_at(data, h).jn, h0, 7);
        } else {
            let pts = |v: &[f64]| [(r[1], v[1]), (r[2], v[2]), (r[3], v[3])];
            out.scalar_curvature[0] = numerics::extrapolate_quadratic(pts(&out.scalar_curvature), 0.0);
            out.mu[0] = numerics::extrapolate_quadratic(pts(&out.mu), 0.0);
            out.jn[0] = numerics::extrapolate_quadratic(pts(&out.jn), 0.0);
        }
    }

    let sqrt_g11 = out.sqrt_g11.clone();
    out.rad = numerics::cumulative_integral(&r, &sqrt_g11);
    let vol_integrand: Vec<f64> =
        (0..n).map(|i| FOUR_PI * sqrt_g11[i] * rho[i] * rho[i]).collect();
    out.vol = numerics::cumulative_integral(&r, &vol_integrand);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial_data::{
        build_family, AnalyticField, Domain, FamilySpec, FieldProvider, InitialData, RadialGrid,
        Units,
    };
    use approx::assert_relative_eq;

    fn ball(n: usize, r_max: f64) -> RadialGrid {
        RadialGrid::uniform(0.0, r_max, n, Domain::Ball).unwrap()
    }

    fn annulus(r0: f64, r1: f64, n: usize) -> RadialGrid {
        RadialGrid::uniform(r0, r1, n, Domain::Annulus).unwrap()
    }

    /// Round 3-sphere sector: g11 = 1, rho = sin r, so R = 6 everywhere.
    fn round_sphere(n: usize) -> InitialData {
        InitialData::new(
            ball(n, 1.5),
            FieldProvider::analytic(Units::Dimensionless, AnalyticField::constant(1.0)),
            FieldProvider::analytic(
                Units::Length,
                AnalyticField::new(|r| r.sin(), |r| r.cos(), |r| -r.sin()),
            ),
            FieldProvider::analytic(Units::InverseLength, AnalyticField::constant(0.0)),
            FieldProvider::analytic(Units::InverseLength, AnalyticField::constant(0.0)),
            "round sphere",
        )
        .unwrap()
    }

    #[test]
    fn round_sphere_has_constant_curvature_six() {
        let profile = geometry_profile(&round_sphere(64));
        for (i, &rr) in profile.scalar_curvature.iter().enumerate() {
            assert_relative_eq!(rr, 6.0, max_relative = 1e-9, epsilon = 1e-9);
            assert_relative_eq!(profile.mu[i], 6.0 / (4.0 * FOUR_PI), max_relative = 1e-9);
            assert!(profile.jn[i].abs() < 1e-12, "node {i}");
        }
        assert!(profile.center_is_limit);
        assert!(profile.mean_curvature[0].is_infinite());
    }

    #[test]
    fn static_and_flat_slicings_are_vacuum() {
        for (spec, r_min) in [
            (FamilySpec::SchwarzschildTs { m: 1.0 }, 2.5),
            (FamilySpec::PainleveGullstrand { m: 1.0 }, 0.5),
        ] {
            let data = build_family(&spec, annulus(r_min, 10.0, 97)).unwrap();
            let profile = geometry_profile(&data);
            for i in 0..profile.len() {
                assert!(profile.mu[i].abs() < 1e-12, "{spec:?} mu at node {i} = {}", profile.mu[i]);
                assert!(profile.jn[i].abs() < 1e-12, "{spec:?} jn at node {i} = {}", profile.jn[i]);
            }
        }
    }

    #[test]
    fn star_density_is_piecewise_constant() {
        let mu0 = 3.0 / (800.0 * std::f64::consts::PI); // c = 1/100
        let data = build_family(
            &FamilySpec::ConstantDensityStar { mu0, r_star: 5.0 },
            ball(161, 8.0),
        )
        .unwrap();
        let profile = geometry_profile(&data);
        for (i, &r) in profile.r.iter().enumerate() {
            // node 0 is a Richardson limit and carries ~1e-10 extrapolation noise
            let tol = if i == 0 { 5e-9 } else { 1e-10 };
            if r <= 5.0 {
                assert_relative_eq!(profile.mu[i], mu0, max_relative = tol);
                assert_relative_eq!(profile.scalar_curvature[i], 16.0 * std::f64::consts::PI * mu0, max_relative = tol);
            } else {
                assert!(profile.mu[i].abs() < 1e-14, "exterior mu at r = {r}");
            }
            assert!(profile.jn[i].abs() < 1e-14);
        }
    }

    #[test]
    fn uniform_collapse_matches_closed_form() {
        let (k0, beta, scale) = (2.0, 2.9, 1.0);
        let data = build_family(&FamilySpec::UniformCollapse { k0, beta, scale }, ball(65, 1.0)).unwrap();
        let profile = geometry_profile(&data);
        let pi = std::f64::consts::PI;
        for (i, &r) in profile.r.iter().enumerate() {
            let mu = k0 * k0 * (3.0 + 2.0 * beta * r / scale) / (8.0 * pi);
            let jn = -k0 * beta / (4.0 * pi * scale);
            assert_relative_eq!(profile.mu[i], mu, max_relative = 1e-10);
            assert_relative_eq!(profile.jn[i], jn, max_relative = 1e-10);
        }
        // dec boundary: beta = 1.5 k0 scale is marginal, above it fails
        let dec = dec_check(&profile, 1e-12);
        assert!(dec.satisfied, "beta = 2.9 < 3.0 satisfies the dec");
        let bad = build_family(
            &FamilySpec::UniformCollapse { k0, beta: 3.05, scale },
            ball(65, 1.0),
        )
        .unwrap();
        let dec = dec_check(&geometry_profile(&bad), 1e-12);
        assert!(!dec.satisfied);
        assert_relative_eq!(dec.worst_r, 0.0); // tightest at the center
    }

    #[test]
    fn minkowski_radius_volume_and_mean_curvature() {
        let data = build_family(&FamilySpec::Minkowski, ball(65, 2.0)).unwrap();
        let profile = geometry_profile(&data);
        let pi = std::f64::consts::PI;
        for (i, &r) in profile.r.iter().enumerate() {
            assert_relative_eq!(profile.rad[i], r, epsilon = 1e-14);
            assert_relative_eq!(profile.vol[i], 4.0 * pi * r * r * r / 3.0, epsilon = 1e-13, max_relative = 1e-13);
            if i > 0 {
                assert_relative_eq!(profile.mean_curvature[i], 2.0 / r, max_relative = 1e-13);
                assert_relative_eq!(profile.theta_plus[i], 2.0 / r, max_relative = 1e-13);
            }
            assert!(profile.mu[i].abs() < 1e-14);
            assert!(profile.scalar_curvature[i].abs() < 1e-14);
        }
    }

    #[test]
    fn flat_slicing_expansions_vanish_at_the_horizon_radius() {
        let data = build_family(&FamilySpec::PainleveGullstrand { m: 1.0 }, annulus(0.5, 10.0, 97)).unwrap();
        let at = |r: f64| geometry_at(&data, r);
        assert!(at(1.9).theta_plus < 0.0);
        assert!(at(2.1).theta_plus > 0.0);
        assert!(at(2.0).theta_plus.abs() < 1e-14);
        for r in [0.6, 1.0, 2.0, 5.0] {
            assert!(at(r).theta_minus > 0.0);
        }
    }

    #[test]
    fn tabulated_profile_converges_at_second_order() {
        let spec = FamilySpec::GaussianBlob { amplitude: 0.5, width: 2.0 };
        let exact = |n: usize| geometry_profile(&build_family(&spec, ball(n, 8.0)).unwrap());
        let approx_of = |n: usize| {
            geometry_profile(&build_family(&spec, ball(n, 8.0)).unwrap().tabulate())
        };
        let mut errs = Vec::new();
        let mut hs = Vec::new();
        for n in [65usize, 129, 257] {
            let e = exact(n);
            let a = approx_of(n);
            let err = e
                .mu
                .iter()
                .zip(a.mu.iter())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0f64, f64::max);
            errs.push(err);
            hs.push(8.0 / (n - 1) as f64);
        }
        let q = numerics::fit_order(&hs, &errs, 1e-15);
        assert!(q > 1.9, "mu convergence order {q} (errors {errs:?})");
    }

    #[test]
    fn center_limits_for_tabulated_data_match_closed_form() {
        let (k0, beta, scale) = (1.0, 1.0, 1.0);
        let data = build_family(&FamilySpec::UniformCollapse { k0, beta, scale }, ball(65, 0.8))
            .unwrap()
            .tabulate();
        let profile = geometry_profile(&data);
        let pi = std::f64::consts::PI;
        // mu is linear in r and jn constant, so quadratic extrapolation is exact
        assert_relative_eq!(profile.mu[0], 3.0 * k0 * k0 / (8.0 * pi), max_relative = 1e-11);
        assert_relative_eq!(profile.jn[0], -k0 * beta / (4.0 * pi * scale), max_relative = 1e-11);
    }

    #[test]
    fn proper_radius_exceeds_coordinate_radius_in_curved_space() {
        let mu0 = 3.0 / (800.0 * std::f64::consts::PI);
        let data = build_family(&FamilySpec::ConstantDensityStar { mu0, r_star: 5.0 }, ball(513, 8.0)).unwrap();
        let profile = geometry_profile(&data);
        // closed form inside: rad(r) = arcsin(sqrt(c) r)/sqrt(c), c = 1/100
        let c: f64 = 0.01;
        let i = 256; // r = 4
        let want = (c.sqrt() * profile.r[i]).asin() / c.sqrt();
        assert_relative_eq!(profile.rad[i], want, max_relative = 1e-10);
        assert!(profile.rad[i] > profile.r[i]);
    }
}
