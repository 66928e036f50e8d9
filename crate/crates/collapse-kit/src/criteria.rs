//! Sufficient criteria for the presence of trapped spheres in ball data.
//!
//! Two families of checks are provided, each in a future and a past
//! variant (the future variant pairs `mu` with `-J(n)`, the past one with
//! `+J(n)`):
//!
//! * the pointwise criterion
//!   `min_(0,r] (mu ∓ J(n)) + (3/32π) θ₊θ₋(r) > (3/2) Rad(r)/Vol(r)`,
//!   whose running minimum is seeded with the `r -> 0` limit of the matter
//!   term so the infimum over the full half-open interval is honored;
//!
//! * the integral criterion
//!   `4π ∫₀^r (mu ∓ J(n)) rho² dl > Rad(r)`, evaluated with the proper
//!   measure `dl = sqrt(g11) dr` (primary) and with the areal measure
//!   `dl = rho' dr` alongside; the report flags any point where the two
//!   variants disagree by more than 0.1%. Its soundness theorem assumes a
//!   maximal slice, so the report carries `max |tr k|` and a maximality
//!   flag.
//!
//! When a criterion fires, a trapped sphere must exist in the ball; every
//! report therefore carries a horizon scan and a consistency verdict.

use crate::geometry::{self, GeometryProfile, FOUR_PI};
use crate::horizon;
use crate::numerics;
use crate::radial_data::{build_family, Domain, FamilySpec, InitialData, RadialGrid};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Errors from the criteria layer.
#[derive(Debug, thiserror::Error)]
pub enum CriteriaError {
    #[error("the collapse criteria apply to balls centered at r = 0 (got an annulus)")]
    NeedsBall,
    #[error("geometry profile has {profile} nodes but the data set has {data}")]
    Mismatch { profile: usize, data: usize },
    #[error("building a sweep trial failed: {0}")]
    Trial(#[from] crate::radial_data::DataError),
}

/// Future or past variant of a criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeDirection {
    Future,
    Past,
}

impl TimeDirection {
    /// Sign attached to `J(n)` in the matter combination `mu ∓ J(n)`.
    pub fn momentum_sign(self) -> f64 {
        match self {
            TimeDirection::Future => -1.0,
            TimeDirection::Past => 1.0,
        }
    }

    /// Short tag for report rows.
    pub fn tag(self) -> &'static str {
        match self {
            TimeDirection::Future => "future",
            TimeDirection::Past => "past",
        }
    }
}

fn check_ball(data: &InitialData, profile: &GeometryProfile) -> Result<(), CriteriaError> {
    if data.grid().domain() != Domain::Ball {
        return Err(CriteriaError::NeedsBall);
    }
    if profile.len() != data.grid().len() {
        return Err(CriteriaError::Mismatch { profile: profile.len(), data: data.grid().len() });
    }
    Ok(())
}

// ------------------------------------------------------- pointwise criterion

/// One radius of the pointwise criterion (`r > 0`).
#[derive(Debug, Clone, Copy)]
pub struct CriterionRow {
    pub r: f64,
    /// Running minimum of `mu ∓ J(n)` over `(0, r]`.
    pub matter_min: f64,
    /// `(3/32π) θ₊ θ₋` at `r`.
    pub bending: f64,
    /// `(3/2) Rad(r) / Vol(r)`.
    pub rhs: f64,
    /// `matter_min + bending - rhs`; the criterion fires when positive.
    pub margin: f64,
    pub fires: bool,
}

/// Pointwise-criterion report over a ball.
#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub direction: TimeDirection,
    /// `r -> 0` limit of `mu ∓ J(n)`, the seed of the running minimum.
    pub center_matter: f64,
    /// One row per positive-radius node.
    pub rows: Vec<CriterionRow>,
    pub fires: bool,
    pub first_fire_r: Option<f64>,
    pub contains_horizon: bool,
    pub outermost_root: Option<f64>,
    /// `fires` implies a trapped sphere; false only on a counterexample.
    pub consistent: bool,
}

/// Evaluate the pointwise criterion on ball data.
pub fn criterion_report(
    data: &InitialData,
    profile: &GeometryProfile,
    direction: TimeDirection,
) -> Result<CriterionReport, CriteriaError> {
    check_ball(data, profile)?;
    let sign = direction.momentum_sign();
    let n = profile.len();
    let center_matter = profile.mu[0] + sign * profile.jn[0];
    let mut running = center_matter;
    let mut rows = Vec::with_capacity(n - 1);
    for i in 1..n {
        running = running.min(profile.mu[i] + sign * profile.jn[i]);
        let bending = 3.0 / (8.0 * FOUR_PI) * profile.theta_plus[i] * profile.theta_minus[i];
        let rhs = 1.5 * profile.rad[i] / profile.vol[i];
        let margin = running + bending - rhs;
        rows.push(CriterionRow {
            r: profile.r[i],
            matter_min: running,
            bending,
            rhs,
            margin,
            fires: margin > 0.0,
        });
    }
    let report = horizon::scan_horizons(data);
    let fires = rows.iter().any(|row| row.fires);
    let first_fire_r = rows.iter().find(|row| row.fires).map(|row| row.r);
    let contains_horizon = report.contains_horizon();
    Ok(CriterionReport {
        direction,
        center_matter,
        rows,
        fires,
        first_fire_r,
        contains_horizon,
        outermost_root: report.outermost_root(),
        consistent: !fires || contains_horizon,
    })
}

// -------------------------------------------------------- integral criterion

/// One radius of the integral criterion (`r > 0`).
#[derive(Debug, Clone, Copy)]
pub struct MoRow {
    pub r: f64,
    /// `4π ∫ (mu ∓ J(n)) rho² sqrt(g11) dr` (proper measure, primary).
    pub lhs_proper: f64,
    /// `4π ∫ (mu ∓ J(n)) rho² rho' dr` (areal measure, informational).
    pub lhs_areal: f64,
    /// Proper radius `Rad(r)`.
    pub rhs: f64,
    /// `lhs_proper - rhs`.
    pub margin: f64,
    pub fires: bool,
}

/// Integral-criterion report over a ball.
#[derive(Debug, Clone)]
pub struct MoReport {
    pub direction: TimeDirection,
    pub rows: Vec<MoRow>,
    pub fires: bool,
    pub first_fire_r: Option<f64>,
    /// Largest `|tr k|` over the nodes; the soundness theorem needs 0.
    pub max_abs_tr_k: f64,
    /// Whether the slice is maximal to round-off.
    pub maximal: bool,
    /// Largest relative gap between the proper and areal variants.
    pub variant_max_rel_gap: f64,
    /// True when the gap exceeds 0.1% somewhere.
    pub variant_gap_flagged: bool,
    pub contains_horizon: bool,
    /// Counterexample check, vacuous unless the slice is maximal.
    pub consistent: bool,
}

/// Evaluate the integral criterion on ball data.
pub fn mo_report(
    data: &InitialData,
    profile: &GeometryProfile,
    direction: TimeDirection,
) -> Result<MoReport, CriteriaError> {
    check_ball(data, profile)?;
    let sign = direction.momentum_sign();
    let n = profile.len();
    let drho = data.derivative(crate::radial_data::FieldKind::Rho, 1);
    let matter: Vec<f64> = (0..n).map(|i| profile.mu[i] + sign * profile.jn[i]).collect();
    let proper_integrand: Vec<f64> = (0..n)
        .map(|i| FOUR_PI * matter[i] * profile.rho[i] * profile.rho[i] * profile.sqrt_g11[i])
        .collect();
    let areal_integrand: Vec<f64> = (0..n)
        .map(|i| FOUR_PI * matter[i] * profile.rho[i] * profile.rho[i] * drho[i])
        .collect();
    let lhs_proper = numerics::cumulative_integral(&profile.r, &proper_integrand);
    let lhs_areal = numerics::cumulative_integral(&profile.r, &areal_integrand);

    let mut rows = Vec::with_capacity(n - 1);
    let mut gap = 0.0f64;
    for i in 1..n {
        let margin = lhs_proper[i] - profile.rad[i];
        let denom = lhs_proper[i].abs().max(lhs_areal[i].abs());
        if denom > 1e-14 {
            gap = gap.max((lhs_proper[i] - lhs_areal[i]).abs() / denom);
        }
        rows.push(MoRow {
            r: profile.r[i],
            lhs_proper: lhs_proper[i],
            lhs_areal: lhs_areal[i],
            rhs: profile.rad[i],
            margin,
            fires: margin > 0.0,
        });
    }
    let max_abs_tr_k = profile.tr_gk.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let k_scale = profile.k_norm_sq.iter().fold(0.0f64, |a, &v| a.max(v)).sqrt();
    let maximal = max_abs_tr_k <= 1e-12 * (1.0 + k_scale);
    let fires = rows.iter().any(|row| row.fires);
    let first_fire_r = rows_first_fire(&rows);
    let report = horizon::scan_horizons(data);
    let contains_horizon = report.contains_horizon();
    Ok(MoReport {
        direction,
        rows,
        fires,
        first_fire_r,
        max_abs_tr_k,
        maximal,
        variant_max_rel_gap: gap,
        variant_gap_flagged: gap > 1e-3,
        contains_horizon,
        consistent: !fires || !maximal || contains_horizon,
    })
}

fn rows_first_fire(rows: &[MoRow]) -> Option<f64> {
    rows.iter().find(|row| row.fires).map(|row| row.r)
}

// ----------------------------------------------------------------- sweeps

/// Parameter ranges for one sweep family.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepFamily {
    /// Constant-density stars on the ball `[0, r_star]`; `cr2` is the
    /// compactness `(8π/3) mu0 r_star²` at the surface.
    ConstantDensityStar { cr2: (f64, f64), r_star: (f64, f64) },
    /// Collapsing flat slices on `[0, r_max]`; `beta_frac` is the fraction
    /// of the dominant-energy bound `beta = frac · 1.5 · k0 · scale`.
    UniformCollapse { k0: (f64, f64), beta_frac: (f64, f64), r_max: (f64, f64) },
}

/// Sweep configuration. Trials are seeded deterministically from `seed`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub seed: u64,
    pub trials: usize,
    /// Grid nodes per trial.
    pub n: usize,
    pub family: SweepFamily,
}

/// Outcome of one sweep trial.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub trial: usize,
    pub label: String,
    pub dec_satisfied: bool,
    pub fires_future: bool,
    pub fires_past: bool,
    pub contains_horizon: bool,
    /// False only when a criterion fired on horizon-free data.
    pub sound: bool,
}

fn sweep_trial(family: &SweepFamily, trial: usize, sub_seed: u64, n: usize) -> Result<SweepOutcome, CriteriaError> {
    let mut rng = ChaCha8Rng::seed_from_u64(sub_seed);
    let (spec, r_max) = match family {
        SweepFamily::ConstantDensityStar { cr2, r_star } => {
            let cr2 = rng.gen_range(cr2.0..=cr2.1);
            let r_star = rng.gen_range(r_star.0..=r_star.1);
            let c = cr2 / (r_star * r_star);
            let mu0 = 3.0 * c / (2.0 * FOUR_PI);
            (FamilySpec::ConstantDensityStar { mu0, r_star }, r_star)
        }
        SweepFamily::UniformCollapse { k0, beta_frac, r_max } => {
            let k0 = rng.gen_range(k0.0..=k0.1);
            let frac = rng.gen_range(beta_frac.0..=beta_frac.1);
            let r_max = rng.gen_range(r_max.0..=r_max.1);
            let beta = frac * 1.5 * k0;
            (FamilySpec::UniformCollapse { k0, beta, scale: 1.0 }, r_max)
        }
    };
    let grid = RadialGrid::uniform(0.0, r_max, n, Domain::Ball)?;
    let data = build_family(&spec, grid)?;
    let profile = geometry::geometry_profile(&data);
    let mu_scale = profile.mu.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let dec = geometry::dec_check(&profile, 1e-10 * (1.0 + mu_scale));
    let future = criterion_report(&data, &profile, TimeDirection::Future)?;
    let past = criterion_report(&data, &profile, TimeDirection::Past)?;
    let contains_horizon = future.contains_horizon;
    let fires_any = future.fires || past.fires;
    Ok(SweepOutcome {
        trial,
        label: format!("trial {trial}: {}", data.label),
        dec_satisfied: dec.satisfied,
        fires_future: future.fires,
        fires_past: past.fires,
        contains_horizon,
        sound: !fires_any || contains_horizon,
    })
}

/// Run a deterministic randomized sweep. Trials execute in parallel but the
/// outcomes are returned in trial order, and every trial derives its own
/// random stream from `config.seed`, so results are independent of thread
/// count.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepOutcome>, CriteriaError> {
    let mut master = ChaCha8Rng::seed_from_u64(config.seed);
    let sub_seeds: Vec<u64> = (0..config.trials).map(|_| master.gen()).collect();
    sub_seeds
        .par_iter()
        .enumerate()
        .map(|(trial, &sub)| sweep_trial(&config.family, trial, sub, config.n))
        .collect()
}
