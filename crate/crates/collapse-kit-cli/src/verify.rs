//! The `verify` subcommand: identity suites with convergence tables.
//!
//! Each check produces one error value per refinement level and a
//! verdict: the check passes when the final value sits below an
//! absolute floor (the sequence is exact to roundoff) or when the
//! observed convergence order reaches the design order of the
//! discretization (1.9, against a nominal 2).

use crate::args::VerifyPlan;
use crate::commands::emit;
use crate::error::CliError;
use crate::report::{self, Cell, Csv};
use collapse_kit::energy;
use collapse_kit::geometry;
use collapse_kit::horizon;
use collapse_kit::jang::{self, JangBc, JangConfig, JangSolution};
use collapse_kit::numerics;
use collapse_kit::radial_data::{self, Domain, FamilySpec, InitialData, RadialGrid};

/// Observed order that counts as second-order convergence.
const ORDER_PASS: f64 = 1.9;
/// Relative floor below which a residual counts as exact.
const FLOOR_IDENTITY: f64 = 1e-8;
/// Relative slack allowed on the chain margins at every level.
const MARGIN_SLACK: f64 = 1e-8;
/// Final relative error the solver oracle must reach.
const ORACLE_TOL: f64 = 1e-6;

struct LevelRow {
    check: &'static str,
    level: usize,
    n: usize,
    knob_kind: &'static str,
    knob: f64,
    value: f64,
}

struct Verdict {
    check: &'static str,
    mode: &'static str,
    order: Option<f64>,
    final_value: f64,
    floor: f64,
    pass: bool,
    detail: String,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Build the refinement ladder. Data generated from a family on a
/// uniform grid is resampled from the closed forms at every level and
/// then tabulated, so each level carries exact samples; anything else
/// is refined by interpolation.
fn data_ladder(base: &InitialData, levels: usize) -> Result<Vec<InitialData>, CliError> {
    let grid = base.grid();
    let mut ladder = Vec::with_capacity(levels);
    ladder.push(base.clone());
    match (&base.family, grid.is_uniform()) {
        (Some(spec), true) => {
            for level in 1..levels {
                let n = (grid.len() - 1) * (1usize << level) + 1;
                let fine =
                    RadialGrid::uniform(grid.r_min(), grid.r_max(), n, grid.domain())?;
                let mut data = radial_data::build_family(spec, fine)?.tabulate();
                data.label = base.label.clone();
                ladder.push(data);
            }
        }
        _ => {
            for _ in 1..levels {
                let prev = ladder.last().expect("ladder starts non-empty");
                ladder.push(prev.refine(2)?);
            }
        }
    }
    Ok(ladder)
}

fn spacing(data: &InitialData) -> f64 {
    let grid = data.grid();
    (grid.r_max() - grid.r_min()) / (grid.len() - 1) as f64
}

/// Slope solution for the identity checks: exact branches where the
/// data admits one (time symmetry, the flat vacuum slicing), the
/// solver elsewhere.
fn identity_solution(data: &InitialData, rtol: f64) -> Result<(JangSolution, &'static str), CliError> {
    if data.is_time_symmetric() {
        return Ok((jang::solution_from_slope(data, |_| 0.0), "time-symmetric slope 0"));
    }
    if let Some(FamilySpec::PainleveGullstrand { m }) = data.family {
        if data.grid().domain() == Domain::Annulus && data.grid().r_min() > 2.0 * m {
            let sol = jang::solution_from_slope(data, move |r| -(2.0 * m / r).sqrt());
            return Ok((sol, "closed-form slope"));
        }
    }
    let bc = match data.grid().domain() {
        Domain::Ball => JangBc::Center,
        Domain::Annulus => JangBc::Matched,
    };
    let cfg = JangConfig { rtol, atol: 1e-14, ..JangConfig::default() };
    Ok((jang::solve_jang(data, bc, &cfg)?, "adaptive solve"))
}

fn fit(hs: &[f64], values: &[f64], floor: f64) -> Option<f64> {
    if hs.len() < 2 {
        return None;
    }
    Some(numerics::fit_order(hs, values, floor))
}

/// Verdict for a residual series expected to converge at second order
/// (or to sit at roundoff).
fn residual_verdict(
    check: &'static str,
    hs: &[f64],
    values: &[f64],
    detail_source: &str,
) -> Verdict {
    let final_value = *values.last().expect("at least one level");
    let order = fit(hs, values, FLOOR_IDENTITY);
    let at_floor = final_value <= FLOOR_IDENTITY;
    let order_ok = order.is_some_and(|p| p >= ORDER_PASS);
    let pass = at_floor || order_ok;
    Verdict {
        check,
        mode: if at_floor { "floor" } else { "order" },
        order,
        final_value,
        floor: FLOOR_IDENTITY,
        pass,
        detail: format!(
            "relative residual vs {detail_source}; pass needs final <= floor or order >= {ORDER_PASS}"
        ),
    }
}

struct Suite {
    levels: Vec<LevelRow>,
    verdicts: Vec<Verdict>,
}

impl Suite {
    fn new() -> Self {
        Suite { levels: Vec::new(), verdicts: Vec::new() }
    }

    fn push_levels(
        &mut self,
        check: &'static str,
        ladder: &[InitialData],
        knob_kind: &'static str,
        knobs: &[f64],
        values: &[f64],
    ) {
        for (level, ((data, &knob), &value)) in
            ladder.iter().zip(knobs).zip(values).enumerate()
        {
            self.levels.push(LevelRow {
                check,
                level,
                n: data.grid().len(),
                knob_kind,
                knob,
                value,
            });
        }
    }
}

// ----------------------------------------------------------------- checks

fn check_geroch(suite: &mut Suite, ladder: &[InitialData], rtol: f64) -> Result<(), CliError> {
    let mut hs = Vec::new();
    let mut values = Vec::new();
    let mut source = "";
    for data in ladder {
        let (sol, used) = identity_solution(data, rtol)?;
        source = used;
        let check = energy::geroch_identity_check(data, &sol)
            .map_err(|err| usage(format!("geroch check failed: {err}")))?;
        hs.push(spacing(data));
        values.push(check.max_residual / check.scale.max(1.0));
    }
    suite.push_levels("geroch", ladder, "h", &hs, &values);
    let mut verdict = residual_verdict("geroch", &hs, &values, "quasi-local mass transport");
    verdict.detail = format!("slope source: {source}; {}", verdict.detail);
    suite.verdicts.push(verdict);
    Ok(())
}

fn check_de(suite: &mut Suite, ladder: &[InitialData]) {
    let mut hs = Vec::new();
    let mut values = Vec::new();
    for data in ladder {
        let profile = geometry::geometry_profile(data);
        let eprofile = energy::energy_profile(data, &profile);
        hs.push(spacing(data));
        values.push(eprofile.max_flux_residual() / eprofile.scale());
    }
    suite.push_levels("de", ladder, "h", &hs, &values);
    suite.verdicts.push(residual_verdict("de", &hs, &values, "constraint flux"));
}

fn check_mass_chain(suite: &mut Suite, ladder: &[InitialData], rtol: f64) -> Result<(), CliError> {
    // Data containing trapped spheres sits outside the chain's
    // hypotheses; record that and move on rather than asserting bounds
    // the statement does not make.
    let horizons = horizon::scan_horizons(&ladder[0]);
    if horizons.contains_horizon() {
        for check in ["chain-margins", "chain-equality"] {
            suite.verdicts.push(Verdict {
                check: match check {
                    "chain-margins" => "chain-margins",
                    _ => "chain-equality",
                },
                mode: "skipped",
                order: None,
                final_value: f64::NAN,
                floor: f64::NAN,
                pass: true,
                detail: "input contains a trapped sphere; chain bounds not asserted".into(),
            });
        }
        return Ok(());
    }

    let mut hs = Vec::new();
    let mut margin_values = Vec::new();
    let mut equality_values = Vec::new();
    let mut gated_everywhere = true;
    let mut max_tilt = 0.0f64;
    for data in ladder {
        let profile = geometry::geometry_profile(data);
        let (sol, _) = identity_solution(data, rtol)?;
        let (chain, equality, _) = energy::verify_mass_chain(data, &profile, &sol)
            .map_err(|err| usage(format!("mass-chain check failed: {err}")))?;
        let worst_margin = chain
            .min_margin_integral
            .min(chain.min_margin_pointwise)
            .min(chain.min_margin_criterion);
        let scale = chain.consistency_scale.max(1.0);
        hs.push(spacing(data));
        margin_values.push(worst_margin / scale);
        equality_values.push(equality.max_residual / equality.scale.max(1.0));
        gated_everywhere &= equality.gated;
        max_tilt = max_tilt.max(equality.max_abs_a_t);
    }
    suite.push_levels("chain-margins", ladder, "h", &hs, &margin_values);
    suite.push_levels("chain-equality", ladder, "h", &hs, &equality_values);

    // A chain margin can legitimately saturate (sit at zero), where
    // discretization noise makes the sampled worst margin dip slightly
    // negative on coarse tabulated data. Judge the negative excursion
    // like a residual: it must stay inside the slack or shrink at
    // second order under refinement.
    let violations: Vec<f64> = margin_values.iter().map(|&m| (-m).max(0.0)).collect();
    let worst = margin_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let final_violation = *violations.last().expect("levels nonempty");
    let order = fit(&hs, &violations, MARGIN_SLACK);
    let inside_slack = final_violation <= MARGIN_SLACK;
    suite.verdicts.push(Verdict {
        check: "chain-margins",
        mode: if inside_slack { "margins" } else { "order" },
        order,
        final_value: *margin_values.last().expect("levels nonempty"),
        floor: MARGIN_SLACK,
        pass: inside_slack || order.is_some_and(|p| p >= ORDER_PASS),
        detail: format!(
            "signed worst margin / scale, every level (min over levels {}); pass needs negative excursion <= slack or shrinking at order >= {ORDER_PASS}",
            report::fmt_human(worst)
        ),
    });
    if gated_everywhere {
        let mut verdict =
            residual_verdict("chain-equality", &hs, &equality_values, "integrated mass identity");
        verdict.detail = format!("tilt gate met (max |a_t| = {}); {}", report::fmt_human(max_tilt), verdict.detail);
        suite.verdicts.push(verdict);
    } else {
        suite.verdicts.push(Verdict {
            check: "chain-equality",
            mode: "non-gating",
            order: fit(&hs, &equality_values, FLOOR_IDENTITY),
            final_value: *equality_values.last().expect("levels nonempty"),
            floor: f64::NAN,
            pass: true,
            detail: format!(
                "tilt above gate (max |a_t| = {}); equality residual reported, not asserted",
                report::fmt_human(max_tilt)
            ),
        });
    }
    Ok(())
}

/// Internal solver oracle: the flat vacuum slicing on an annulus, where
/// the slope equation has the closed-form solution the solver must
/// reproduce to tightening tolerances.
fn check_pg_oracle(suite: &mut Suite, levels: usize) -> Result<(), CliError> {
    const M: f64 = 1.0;
    let grid = RadialGrid::uniform(3.0, 10.0, 257, Domain::Annulus)?;
    let data = radial_data::build_family(&FamilySpec::PainleveGullstrand { m: M }, grid)?;
    let profile_nodes: Vec<f64> = data.grid().r().to_vec();

    let mut rtols = Vec::new();
    let mut values = Vec::new();
    let mut final_sol: Option<JangSolution> = None;
    for level in 0..levels {
        let rtol = 1e-7 * 10f64.powi(-(level as i32));
        let cfg = JangConfig { rtol, atol: rtol * 1e-3, ..JangConfig::default() };
        let sol = jang::solve_jang(&data, JangBc::Matched, &cfg)?;
        let err = sol
            .r
            .iter()
            .zip(sol.v.iter())
            .map(|(&r, &v)| {
                let exact = -(2.0 * M / r).sqrt();
                ((v - exact) / exact).abs()
            })
            .fold(0.0f64, f64::max);
        rtols.push(rtol);
        values.push(err);
        final_sol = Some(sol);
    }
    for (level, (&rtol, &value)) in rtols.iter().zip(values.iter()).enumerate() {
        suite.levels.push(LevelRow {
            check: "pg-oracle",
            level,
            n: profile_nodes.len(),
            knob_kind: "rtol",
            knob: rtol,
            value,
        });
    }

    let sol = final_sol.expect("at least one level");
    let mass_err = sol
        .geroch_m
        .iter()
        .map(|&m| (m - M).abs())
        .fold(0.0f64, f64::max);
    let slope_err = sol
        .r
        .iter()
        .zip(sol.phi.iter())
        .map(|(&r, &phi)| (phi - (1.0 - 2.0 * M / r).sqrt()).abs())
        .fold(0.0f64, f64::max);
    let final_value = *values.last().expect("levels nonempty");
    let tightening = values.windows(2).all(|w| w[1] <= 1.2 * w[0]);
    let pass =
        final_value <= ORACLE_TOL && tightening && mass_err <= ORACLE_TOL && slope_err <= ORACLE_TOL;
    suite.verdicts.push(Verdict {
        check: "pg-oracle",
        mode: "oracle",
        order: None,
        final_value,
        floor: ORACLE_TOL,
        pass,
        detail: format!(
            "closed-form slope on [3, 10]; max |m - 1| = {}; max slope defect = {}; errors tighten with rtol: {}",
            report::fmt_human(mass_err),
            report::fmt_human(slope_err),
            tightening
        ),
    });
    Ok(())
}

// ------------------------------------------------------------------ entry

pub fn run(plan: VerifyPlan) -> Result<(), CliError> {
    let data = match &plan.input {
        Some(path) => {
            let data = radial_data::load_data(std::path::Path::new(path))?;
            let violations = data.violations();
            if !violations.is_empty() {
                return Err(usage(format!(
                    "input fails validation: {}",
                    violations[0]
                )));
            }
            Some(data)
        }
        None => None,
    };

    let checks: Vec<String> = match plan.checks.clone() {
        Some(list) => list,
        None => {
            let mut list = Vec::new();
            if let Some(data) = &data {
                list.push("geroch".to_string());
                list.push("de".to_string());
                if data.grid().domain() == Domain::Ball {
                    list.push("mass-chain".to_string());
                }
            }
            list.push("pg-oracle".to_string());
            list
        }
    };
    for check in &checks {
        if check != "pg-oracle" && data.is_none() {
            return Err(usage(format!("check {check} needs an input data file")));
        }
        if check == "mass-chain" {
            if let Some(data) = &data {
                if data.grid().domain() != Domain::Ball {
                    return Err(usage("check mass-chain needs ball data (the bounds integrate from a regular center)"));
                }
            }
        }
    }

    let ladder = match &data {
        Some(base) => data_ladder(base, plan.refine)?,
        None => Vec::new(),
    };

    let mut suite = Suite::new();
    for check in &checks {
        match check.as_str() {
            "geroch" => check_geroch(&mut suite, &ladder, plan.rtol)?,
            "de" => check_de(&mut suite, &ladder),
            "mass-chain" => check_mass_chain(&mut suite, &ladder, plan.rtol)?,
            "pg-oracle" => check_pg_oracle(&mut suite, plan.refine)?,
            other => return Err(usage(format!("unknown check {other}"))),
        }
    }

    let digest = report::config_digest(&plan);
    let mut csv = Csv::new("verify", &digest);
    if let Some(data) = &data {
        csv.comment(&format!("label: {}", data.label));
        csv.comment(&format!(
            "ladder: {} levels from n = {}, {}",
            plan.refine,
            data.grid().len(),
            if data.family.is_some() && data.grid().is_uniform() {
                "resampled from family closed forms"
            } else {
                "refined by interpolation"
            }
        ));
    }
    csv.comment(&format!("checks: {}", checks.join(", ")));
    csv.comment("levels");
    csv.columns(&["check", "level", "n", "knob_kind", "knob", "value"]);
    for row in &suite.levels {
        csv.row(&[
            Cell::S(row.check),
            Cell::U(row.level),
            Cell::U(row.n),
            Cell::S(row.knob_kind),
            Cell::F(row.knob),
            Cell::F(row.value),
        ]);
    }
    csv.comment("verdicts");
    csv.columns(&["check", "mode", "order", "final_value", "floor", "pass", "detail"]);
    let mut all_pass = true;
    let mut failing = Vec::new();
    for v in &suite.verdicts {
        all_pass &= v.pass;
        if !v.pass {
            failing.push(v.check);
        }
        csv.row(&[
            Cell::S(v.check),
            Cell::S(v.mode),
            Cell::F(v.order.unwrap_or(f64::NAN)),
            Cell::F(v.final_value),
            Cell::F(v.floor),
            Cell::B(v.pass),
            Cell::S(&v.detail),
        ]);
    }
    csv.comment(&format!("overall: {}", if all_pass { "PASS" } else { "FAIL" }));

    let mut summary = Vec::new();
    for v in &suite.verdicts {
        let order_note = match v.order {
            Some(p) if p.is_finite() => format!("order {p:.2}, "),
            Some(_) => "exact to roundoff, ".to_string(),
            None => String::new(),
        };
        summary.push(format!(
            "verify {}: {} ({}final {})",
            v.check,
            if v.pass { "PASS" } else { "FAIL" },
            order_note,
            report::fmt_human(v.final_value)
        ));
    }
    summary.push(format!("verify overall: {}", if all_pass { "PASS" } else { "FAIL" }));
    summary.push(format!("config digest {digest}"));
    emit(plan.out.as_deref(), &csv.into_string(), &summary)?;

    if all_pass {
        Ok(())
    } else {
        Err(CliError::Verify(format!("checks failed: {}", failing.join(", "))))
    }
}
