//! Subcommand implementations and the top-level dispatcher.

use crate::args::{Cli, Command, ConfigFile};
use crate::error::CliError;
use crate::report::{self, Cell, Csv};
use collapse_kit::criteria::{
    self, CriterionReport, MoReport, SweepConfig, SweepFamily, SweepOutcome, TimeDirection,
};
use collapse_kit::energy;
use collapse_kit::geometry;
use collapse_kit::horizon::{self, HorizonReport};
use collapse_kit::jang::{self, JangBc, JangConfig, Termination};
use collapse_kit::radial_data::{self, Domain, InitialData, RadialGrid};
use serde::Serialize;
use std::path::Path;

/// Dispatch a parsed command line.
pub fn run(cli: Cli) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(path) => crate::args::load_config(path)?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Command::Generate(a) => {
            generate(a.merged_over(config.generate.unwrap_or_default()).resolve()?)
        }
        Command::Analyze(a) => {
            analyze(a.merged_over(config.analyze.unwrap_or_default()).resolve()?)
        }
        Command::Criterion(a) => {
            criterion(a.merged_over(config.criterion.unwrap_or_default()).resolve()?)
        }
        Command::Jang(a) => jang_cmd(a.merged_over(config.jang.unwrap_or_default()).resolve()?),
        Command::Energy(a) => {
            energy_cmd(a.merged_over(config.energy.unwrap_or_default()).resolve()?)
        }
        Command::Verify(a) => {
            crate::verify::run(a.merged_over(config.verify.unwrap_or_default()).resolve()?)
        }
        Command::Sweep(a) => sweep(a.merged_over(config.sweep.unwrap_or_default()).resolve()?),
    }
}

/// Deliver an artifact: to a file (with a human summary on stdout) or,
/// without an output path, verbatim to stdout.
pub fn emit(out: Option<&str>, artifact: &str, summary: &[String]) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, artifact)
                .map_err(|err| CliError::Usage(format!("cannot write {path}: {err}")))?;
            for line in summary {
                println!("{line}");
            }
            println!("wrote {path}");
        }
        None => print!("{artifact}"),
    }
    Ok(())
}

fn load(input: &str) -> Result<InitialData, CliError> {
    Ok(radial_data::load_data(Path::new(input))?)
}

fn domain_tag(domain: Domain) -> &'static str {
    match domain {
        Domain::Ball => "ball",
        Domain::Annulus => "annulus",
    }
}

// ---------------------------------------------------------------- generate

fn generate(plan: crate::args::GeneratePlan) -> Result<(), CliError> {
    if !(plan.rmin >= 0.0 && plan.rmax.is_finite()) {
        return Err(CliError::Usage(format!(
            "rmin must be nonnegative and rmax finite, got rmin = {}, rmax = {}",
            plan.rmin, plan.rmax
        )));
    }
    let domain = if plan.rmin == 0.0 { Domain::Ball } else { Domain::Annulus };
    let grid = match plan.geometric {
        Some(ratio) => RadialGrid::geometric(plan.rmin, plan.rmax, plan.n, ratio, domain)?,
        None => RadialGrid::uniform(plan.rmin, plan.rmax, plan.n, domain)?,
    };
    let mut data = radial_data::build_family(&plan.family, grid)?;
    data.label = plan.label.clone();
    data.validate()?;

    let digest = report::config_digest(&plan);
    let mut artifact = radial_data::data_json_string(&data)?;
    artifact.push('\n');
    let summary = vec![
        format!(
            "generated {}: family {} on {} nodes over [{}, {}] ({})",
            plan.label,
            plan.family.tag(),
            plan.n,
            plan.rmin,
            plan.rmax,
            domain_tag(domain)
        ),
        format!("config digest {digest}"),
    ];
    emit(plan.out.as_deref(), &artifact, &summary)
}

// ----------------------------------------------------------------- analyze

/// Reject data with physics violations, naming the field and radius.
fn check_violations(data: &InitialData) -> Result<(), CliError> {
    let violations = data.violations();
    if violations.is_empty() {
        return Ok(());
    }
    let shown: Vec<String> = violations
        .iter()
        .take(3)
        .map(|v| match v.index {
            Some(i) => format!("{v} at r = {}", data.grid().r()[i]),
            None => v.to_string(),
        })
        .collect();
    let more = if violations.len() > 3 {
        format!(" (+{} more)", violations.len() - 3)
    } else {
        String::new()
    };
    Err(CliError::Usage(format!(
        "input fails validation: {}{more}",
        shown.join("; ")
    )))
}

fn horizon_comments(csv: &mut Csv, horizons: &HorizonReport) {
    for scan in [&horizons.plus, &horizons.minus] {
        let roots: Vec<String> =
            scan.roots.iter().map(|root| report::fmt_full(root.r)).collect();
        csv.comment(&format!(
            "theta_{} roots: [{}]; min {} at r = {}",
            scan.sheet.tag(),
            roots.join(", "),
            report::fmt_full(scan.min_value),
            report::fmt_full(scan.min_r)
        ));
    }
    csv.comment(&format!("contains_horizon: {}", horizons.contains_horizon()));
    if let Some(r0) = horizons.outermost_root() {
        csv.comment(&format!("outermost_root: {}", report::fmt_full(r0)));
    }
}

#[derive(Serialize)]
struct AnalyzeJson<'a> {
    schema: &'static str,
    subcommand: &'static str,
    config_digest: &'a str,
    j_sign: &'static str,
    mo_measure: &'static str,
    label: &'a str,
    domain: &'static str,
    center_is_limit: bool,
    dec_satisfied: bool,
    dec_worst_margin: f64,
    dec_worst_r: f64,
    contains_horizon: bool,
    outermost_root: Option<f64>,
    theta_plus_roots: Vec<f64>,
    theta_minus_roots: Vec<f64>,
    r: &'a [f64],
    sqrt_g11: &'a [f64],
    rho: &'a [f64],
    rho_t: &'a [f64],
    scalar_curvature: &'a [f64],
    mu: &'a [f64],
    jn: &'a [f64],
    mean_curvature: &'a [f64],
    tr_sk: &'a [f64],
    theta_plus: &'a [f64],
    theta_minus: &'a [f64],
    tr_gk: &'a [f64],
    k_norm_sq: &'a [f64],
    rad: &'a [f64],
    vol: &'a [f64],
    dec_margin: Vec<f64>,
}

fn analyze(plan: crate::args::AnalyzePlan) -> Result<(), CliError> {
    let data = load(&plan.input)?;
    check_violations(&data)?;
    let profile = geometry::geometry_profile(&data);
    let horizons = horizon::scan_horizons(&data);
    let dec = geometry::dec_check(&profile, 1e-12);
    let digest = report::config_digest(&plan);

    let artifact = if plan.format == "json" {
        let json = AnalyzeJson {
            schema: "collapse-kit-report/v1",
            subcommand: "analyze",
            config_digest: &digest,
            j_sign: report::J_SIGN_NOTE,
            mo_measure: report::MO_MEASURE_NOTE,
            label: &data.label,
            domain: domain_tag(profile.domain),
            center_is_limit: profile.center_is_limit,
            dec_satisfied: dec.satisfied,
            dec_worst_margin: dec.worst_margin,
            dec_worst_r: dec.worst_r,
            contains_horizon: horizons.contains_horizon(),
            outermost_root: horizons.outermost_root(),
            theta_plus_roots: horizons.plus.roots.iter().map(|r| r.r).collect(),
            theta_minus_roots: horizons.minus.roots.iter().map(|r| r.r).collect(),
            r: &profile.r,
            sqrt_g11: &profile.sqrt_g11,
            rho: &profile.rho,
            rho_t: &profile.rho_t,
            scalar_curvature: &profile.scalar_curvature,
            mu: &profile.mu,
            jn: &profile.jn,
            mean_curvature: &profile.mean_curvature,
            tr_sk: &profile.tr_sk,
            theta_plus: &profile.theta_plus,
            theta_minus: &profile.theta_minus,
            tr_gk: &profile.tr_gk,
            k_norm_sq: &profile.k_norm_sq,
            rad: &profile.rad,
            vol: &profile.vol,
            dec_margin: profile.dec_margin(),
        };
        let mut text = radial_data::to_json_string(&json)
            .map_err(|err| CliError::Usage(format!("cannot encode report: {err}")))?;
        text.push('\n');
        text
    } else {
        let mut csv = Csv::new("analyze", &digest);
        csv.comment(&format!("label: {}", data.label));
        csv.comment(&format!(
            "domain: {} ({} nodes, r in [{}, {}])",
            domain_tag(profile.domain),
            profile.len(),
            report::fmt_full(data.grid().r_min()),
            report::fmt_full(data.grid().r_max())
        ));
        csv.comment(&format!("center_is_limit: {}", profile.center_is_limit));
        csv.comment(&format!(
            "dec_satisfied: {}; worst margin {} at r = {}",
            dec.satisfied,
            report::fmt_full(dec.worst_margin),
            report::fmt_full(dec.worst_r)
        ));
        horizon_comments(&mut csv, &horizons);
        csv.comment("non-finite cells (the center's diverging expansions) are left empty");
        csv.columns(&[
            "r",
            "sqrt_g11",
            "rho",
            "rho_t",
            "scalar_curvature",
            "mu",
            "jn",
            "mean_curvature",
            "tr_sk",
            "theta_plus",
            "theta_minus",
            "tr_gk",
            "k_norm_sq",
            "rad",
            "vol",
            "dec_margin",
        ]);
        let margins = profile.dec_margin();
        for (i, &margin) in margins.iter().enumerate() {
            csv.row(&[
                Cell::F(profile.r[i]),
                Cell::F(profile.sqrt_g11[i]),
                Cell::F(profile.rho[i]),
                Cell::F(profile.rho_t[i]),
                Cell::F(profile.scalar_curvature[i]),
                Cell::F(profile.mu[i]),
                Cell::F(profile.jn[i]),
                Cell::F(profile.mean_curvature[i]),
                Cell::F(profile.tr_sk[i]),
                Cell::F(profile.theta_plus[i]),
                Cell::F(profile.theta_minus[i]),
                Cell::F(profile.tr_gk[i]),
                Cell::F(profile.k_norm_sq[i]),
                Cell::F(profile.rad[i]),
                Cell::F(profile.vol[i]),
                Cell::F(margin),
            ]);
        }
        csv.into_string()
    };

    let summary = vec![
        format!(
            "analyze {}: {} nodes, dec_satisfied={} (worst margin {} at r = {}), contains_horizon={}",
            data.label,
            profile.len(),
            dec.satisfied,
            report::fmt_human(dec.worst_margin),
            report::fmt_human(dec.worst_r),
            horizons.contains_horizon()
        ),
        format!("config digest {digest}"),
    ];
    emit(plan.out.as_deref(), &artifact, &summary)
}

// --------------------------------------------------------------- criterion

fn criterion_comments(csv: &mut Csv, point: &CriterionReport, integral: &MoReport) {
    let dir = point.direction.tag();
    csv.comment(&format!(
        "[{dir}] center matter seed: {}",
        report::fmt_full(point.center_matter)
    ));
    csv.comment(&format!(
        "[{dir}] fires: {}{}",
        point.fires,
        match point.first_fire_r {
            Some(r) => format!(" (first at r = {})", report::fmt_full(r)),
            None => String::new(),
        }
    ));
    csv.comment(&format!(
        "[{dir}] mo_fires: {}{}",
        integral.fires,
        match integral.first_fire_r {
            Some(r) => format!(" (first at r = {})", report::fmt_full(r)),
            None => String::new(),
        }
    ));
    csv.comment(&format!(
        "[{dir}] maximal: {} (max |tr k| = {})",
        integral.maximal,
        report::fmt_full(integral.max_abs_tr_k)
    ));
    csv.comment(&format!(
        "[{dir}] mo_variant_gap_flagged: {} (max relative gap {})",
        integral.variant_gap_flagged,
        report::fmt_full(integral.variant_max_rel_gap)
    ));
    csv.comment(&format!(
        "[{dir}] contains_horizon: {}; consistent: {}; mo_consistent: {}",
        point.contains_horizon, point.consistent, integral.consistent
    ));
    if let Some(r0) = point.outermost_root {
        csv.comment(&format!("[{dir}] outermost_root: {}", report::fmt_full(r0)));
    }
}

fn criterion(plan: crate::args::CriterionPlan) -> Result<(), CliError> {
    let data = load(&plan.input)?;
    check_violations(&data)?;
    let profile = geometry::geometry_profile(&data);
    let directions: &[TimeDirection] = match plan.mode.as_str() {
        "future" => &[TimeDirection::Future],
        "past" => &[TimeDirection::Past],
        _ => &[TimeDirection::Future, TimeDirection::Past],
    };

    let digest = report::config_digest(&plan);
    let mut csv = Csv::new("criterion", &digest);
    csv.comment(&format!("label: {}", data.label));
    let mut reports = Vec::new();
    for &dir in directions {
        let point = criteria::criterion_report(&data, &profile, dir)?;
        let integral = criteria::mo_report(&data, &profile, dir)?;
        criterion_comments(&mut csv, &point, &integral);
        reports.push((point, integral));
    }
    csv.columns(&[
        "direction",
        "r",
        "matter_min",
        "bending",
        "rhs",
        "margin",
        "fires",
        "mo_lhs_proper",
        "mo_lhs_areal",
        "mo_rhs",
        "mo_margin",
        "mo_fires",
    ]);
    for (point, integral) in &reports {
        for (row, mo) in point.rows.iter().zip(integral.rows.iter()) {
            csv.row(&[
                Cell::S(point.direction.tag()),
                Cell::F(row.r),
                Cell::F(row.matter_min),
                Cell::F(row.bending),
                Cell::F(row.rhs),
                Cell::F(row.margin),
                Cell::B(row.fires),
                Cell::F(mo.lhs_proper),
                Cell::F(mo.lhs_areal),
                Cell::F(mo.rhs),
                Cell::F(mo.margin),
                Cell::B(mo.fires),
            ]);
        }
    }

    let mut summary = Vec::new();
    for (point, integral) in &reports {
        summary.push(format!(
            "criterion[{}]: fires={}, mo_fires={}, contains_horizon={}, consistent={}",
            point.direction.tag(),
            point.fires,
            integral.fires,
            point.contains_horizon,
            point.consistent && integral.consistent
        ));
    }
    summary.push(format!("config digest {digest}"));
    emit(plan.out.as_deref(), &csv.into_string(), &summary)
}

// -------------------------------------------------------------------- jang

/// Parse the `--bc` token list against the data's grid.
fn parse_bc(raw: Option<&str>, data: &InitialData) -> Result<JangBc, CliError> {
    let domain = data.grid().domain();
    let default_bc = match domain {
        Domain::Ball => JangBc::Center,
        Domain::Annulus => JangBc::Matched,
    };
    let Some(raw) = raw else { return Ok(default_bc) };
    let mut bc = None;
    for token in raw.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        if let Some(rest) = token.strip_prefix("r1=") {
            let r1: f64 = rest
                .parse()
                .map_err(|_| CliError::Usage(format!("bad bc radius {rest:?} in --bc")))?;
            let r_min = data.grid().r_min();
            if (r1 - r_min).abs() > 1e-9 * (1.0 + r_min.abs()) {
                return Err(CliError::Usage(format!(
                    "bc names inner radius r1 = {r1} but the grid starts at r = {r_min}"
                )));
            }
        } else if let Some(rest) = token.strip_prefix("value=") {
            let v: f64 = rest
                .parse()
                .map_err(|_| CliError::Usage(format!("bad bc value {rest:?} in --bc")))?;
            set_bc(&mut bc, JangBc::InnerValue(v))?;
        } else if token == "center" {
            set_bc(&mut bc, JangBc::Center)?;
        } else if token == "matched" {
            set_bc(&mut bc, JangBc::Matched)?;
        } else {
            return Err(CliError::Usage(format!(
                "unknown bc token {token:?}; expected center, matched, value=<v>, or r1=<radius>"
            )));
        }
    }
    Ok(bc.unwrap_or(default_bc))
}

fn set_bc(slot: &mut Option<JangBc>, bc: JangBc) -> Result<(), CliError> {
    if slot.is_some() {
        return Err(CliError::Usage("bc specifies more than one condition".into()));
    }
    *slot = Some(bc);
    Ok(())
}

fn termination_text(termination: &Termination) -> String {
    match termination {
        Termination::Completed => "completed".into(),
        Termination::BlowUp { r_star, v_last, one_minus_v_sq, step_underflow } => format!(
            "blow_up at r_star = {} (v = {}, 1 - v^2 = {}, step_underflow = {step_underflow})",
            report::fmt_full(*r_star),
            report::fmt_full(*v_last),
            report::fmt_full(*one_minus_v_sq)
        ),
        Termination::MinimalSphere { r } => {
            format!("minimal_sphere at r = {}", report::fmt_full(*r))
        }
    }
}

fn jang_cmd(plan: crate::args::JangPlan) -> Result<(), CliError> {
    let data = load(&plan.input)?;
    check_violations(&data)?;
    let bc = parse_bc(plan.bc.as_deref(), &data)?;
    let cfg = JangConfig {
        rtol: plan.rtol,
        atol: plan.atol,
        eps_blow: plan.blow_eps,
        max_steps: plan.max_steps,
    };
    let sol = jang::solve_jang(&data, bc, &cfg)?;
    let profile = geometry::geometry_profile(&data);
    let diag = jang::jang_diagnostics(&data, &profile, &sol);
    let f = jang::reconstruct_f(&diag);

    let digest = report::config_digest(&plan);
    let mut csv = Csv::new("jang", &digest);
    csv.comment(&format!("label: {}", data.label));
    csv.comment(&format!("bc: {bc:?}"));
    csv.comment(&format!("termination: {}", termination_text(&sol.termination)));
    csv.comment(&format!("covered {} of {} grid nodes", sol.r.len(), data.grid().len()));
    csv.comment("ds is the arclength increment from the previous node; the first cell is empty");
    csv.columns(&[
        "r",
        "v",
        "ds",
        "s",
        "phi",
        "geroch_m",
        "a_t",
        "a_n",
        "q_s",
        "h_k_sq",
        "q_sq",
        "mu_jw",
        "f_r",
        "boundary_density",
        "f",
    ]);
    for (i, &f_i) in f.iter().enumerate() {
        let ds = if i == 0 { Cell::S("") } else { Cell::F(sol.ds[i - 1]) };
        csv.row(&[
            Cell::F(sol.r[i]),
            Cell::F(sol.v[i]),
            ds,
            Cell::F(sol.s[i]),
            Cell::F(sol.phi[i]),
            Cell::F(sol.geroch_m[i]),
            Cell::F(diag.a_t[i]),
            Cell::F(diag.a_n[i]),
            Cell::F(diag.q_s[i]),
            Cell::F(diag.h_k_sq[i]),
            Cell::F(diag.q_sq[i]),
            Cell::F(diag.mu_jw[i]),
            Cell::F(diag.f_r[i]),
            Cell::F(diag.boundary_density[i]),
            Cell::F(f_i),
        ]);
    }

    let m = sol.r.len();
    let summary = vec![
        format!(
            "jang {}: {}; covered {}/{} nodes; v({}) = {}",
            data.label,
            termination_text(&sol.termination),
            m,
            data.grid().len(),
            report::fmt_human(sol.r[m - 1]),
            report::fmt_human(sol.v[m - 1])
        ),
        format!("config digest {digest}"),
    ];
    emit(plan.out.as_deref(), &csv.into_string(), &summary)
}

// ------------------------------------------------------------------ energy

fn energy_cmd(plan: crate::args::EnergyPlan) -> Result<(), CliError> {
    let data = load(&plan.input)?;
    check_violations(&data)?;
    let profile = geometry::geometry_profile(&data);
    let eprofile = energy::energy_profile(&data, &profile);
    let horizons = horizon::scan_horizons(&data);
    let verdicts = energy::theorem_report(&data, &profile, &eprofile, &horizons, plan.tol);

    let digest = report::config_digest(&plan);
    let mut csv = Csv::new("energy", &digest);
    csv.comment(&format!("label: {}", data.label));
    csv.comment(&format!(
        "scale: {}; max_flux_residual: {}",
        report::fmt_full(verdicts.scale),
        report::fmt_full(eprofile.max_flux_residual())
    ));
    csv.comment(&format!(
        "nonnegative: {}; min e = {} at r = {}",
        match verdicts.nonnegative {
            Some(v) => v.to_string(),
            None => "n/a (horizon present)".into(),
        },
        report::fmt_full(verdicts.min_e),
        report::fmt_full(verdicts.min_e_r)
    ));
    csv.comment(&format!(
        "monotone_on_untrapped: {}; worst flux {}",
        verdicts.monotone_on_untrapped,
        report::fmt_full(verdicts.worst_flux)
    ));
    match (verdicts.outermost_root, verdicts.outer_bound_ok) {
        (Some(r0), Some(ok)) => csv.comment(&format!(
            "outer_bound_ok: {ok} beyond r0 = {} (min slack {})",
            report::fmt_full(r0),
            report::fmt_full(verdicts.outer_bound_min_slack.unwrap_or(f64::NAN))
        )),
        _ => csv.comment("outer_bound_ok: n/a (no marginal sphere)"),
    }
    csv.comment(&format!(
        "rigid_flat: {}; rigid_saturated: {}",
        verdicts.rigid_flat, verdicts.rigid_saturated
    ));
    csv.columns(&["r", "e", "e_expansion_form", "de_dt", "de_flux"]);
    for i in 0..eprofile.r.len() {
        csv.row(&[
            Cell::F(eprofile.r[i]),
            Cell::F(eprofile.e[i]),
            Cell::F(eprofile.e_expansion_form[i]),
            Cell::F(eprofile.de_dt[i]),
            Cell::F(eprofile.de_flux[i]),
        ]);
    }

    let summary = vec![
        format!(
            "energy {}: nonnegative={}, monotone_on_untrapped={}, max flux residual {}",
            data.label,
            match verdicts.nonnegative {
                Some(v) => v.to_string(),
                None => "n/a".into(),
            },
            verdicts.monotone_on_untrapped,
            report::fmt_human(eprofile.max_flux_residual())
        ),
        format!("config digest {digest}"),
    ];
    emit(plan.out.as_deref(), &csv.into_string(), &summary)
}

// ------------------------------------------------------------------- sweep

fn sweep(plan: crate::args::SweepPlan) -> Result<(), CliError> {
    let star = SweepFamily::ConstantDensityStar { cr2: plan.cr2, r_star: plan.rstar };
    let collapse =
        SweepFamily::UniformCollapse { k0: plan.k0, beta_frac: plan.beta_frac, r_max: plan.rmax };

    let mut outcomes: Vec<SweepOutcome> = Vec::with_capacity(plan.trials);
    let mut run_block = |family: SweepFamily, trials: usize, seed: u64, offset: usize| {
        if trials == 0 {
            return Ok(());
        }
        let config = SweepConfig { seed, trials, n: plan.n, family };
        let block = criteria::run_sweep(&config)?;
        outcomes.extend(block.into_iter().map(|mut outcome| {
            outcome.trial += offset;
            outcome
        }));
        Ok::<(), CliError>(())
    };
    match plan.family.as_str() {
        "star" => run_block(star, plan.trials, plan.seed, 0)?,
        "collapse" => run_block(collapse, plan.trials, plan.seed, 0)?,
        _ => {
            let star_trials = plan.trials.div_ceil(2);
            run_block(star, star_trials, plan.seed, 0)?;
            run_block(collapse, plan.trials - star_trials, plan.seed + 1, star_trials)?;
        }
    }

    let dec_count = outcomes.iter().filter(|o| o.dec_satisfied).count();
    let fired = outcomes
        .iter()
        .filter(|o| o.dec_satisfied && (o.fires_future || o.fires_past))
        .count();
    let horizon_count = outcomes.iter().filter(|o| o.contains_horizon).count();
    let unsound: Vec<usize> =
        outcomes.iter().filter(|o| !o.sound).map(|o| o.trial).collect();

    let digest = report::config_digest(&plan);
    let mut csv = Csv::new("sweep", &digest);
    csv.comment(&format!(
        "trials: {} (family {}, seed {}, n {})",
        outcomes.len(),
        plan.family,
        plan.seed,
        plan.n
    ));
    csv.comment(&format!(
        "dec_satisfied: {dec_count}; fired under dec: {fired}; with horizon: {horizon_count}"
    ));
    csv.comment(&format!(
        "unsound trials (criterion fired, no trapped sphere): {}",
        unsound.len()
    ));
    csv.comment(&format!("verdict: {}", if unsound.is_empty() { "PASS" } else { "FAIL" }));
    csv.columns(&[
        "trial",
        "label",
        "dec_satisfied",
        "fires_future",
        "fires_past",
        "contains_horizon",
        "sound",
    ]);
    for o in &outcomes {
        csv.row(&[
            Cell::U(o.trial),
            Cell::S(&o.label),
            Cell::B(o.dec_satisfied),
            Cell::B(o.fires_future),
            Cell::B(o.fires_past),
            Cell::B(o.contains_horizon),
            Cell::B(o.sound),
        ]);
    }

    let summary = vec![
        format!(
            "sweep: {} trials, {} satisfied dec, {} fired, {} contain horizons, {} unsound",
            outcomes.len(),
            dec_count,
            fired,
            horizon_count,
            unsound.len()
        ),
        format!("config digest {digest}"),
    ];
    emit(plan.out.as_deref(), &csv.into_string(), &summary)?;
    if !unsound.is_empty() {
        return Err(CliError::Verify(format!(
            "sweep found {} trial(s) where the criterion fired without a trapped sphere: {:?}",
            unsound.len(),
            &unsound[..unsound.len().min(8)]
        )));
    }
    Ok(())
}
