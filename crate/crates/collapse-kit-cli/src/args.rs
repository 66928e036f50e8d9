//! Command-line arguments, TOML configuration, and their resolution.
//!
//! Every subcommand's argument struct doubles as its TOML section:
//! the same field names work as `--flags` and as keys, a configuration
//! file may pre-fill any subset, and flags override the file. Unknown
//! keys are rejected. Resolution applies defaults and produces a
//! fully-determined *run plan* — the serializable value whose digest
//! is stamped on every artifact.

use crate::error::CliError;
use clap::{Args, Parser, Subcommand};
use collapse_kit::radial_data::FamilySpec;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Analyze spherically symmetric initial data: trapped-surface
/// criteria, horizon scans, a generalized graph-slope solver, and
/// quasi-local energy identities.
#[derive(Debug, Parser)]
#[command(name = "collapse-kit", version, about)]
pub struct Cli {
    /// TOML configuration file; command-line flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a data file from a named family.
    Generate(GenerateArgs),
    /// Validate a data file and write its geometry/horizon profile.
    Analyze(AnalyzeArgs),
    /// Evaluate the concentration criterion and the integral variant.
    Criterion(CriterionArgs),
    /// Integrate the generalized slope equation with diagnostics.
    Jang(JangArgs),
    /// Quasi-local energy profile and monotonicity checks.
    Energy(EnergyArgs),
    /// Run the identity suites with convergence tables.
    Verify(VerifyArgs),
    /// Seeded soundness sweep over family parameters.
    Sweep(SweepArgs),
}

/// The optional TOML configuration file: one section per subcommand.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigFile {
    pub generate: Option<GenerateArgs>,
    pub analyze: Option<AnalyzeArgs>,
    pub criterion: Option<CriterionArgs>,
    pub jang: Option<JangArgs>,
    pub energy: Option<EnergyArgs>,
    pub verify: Option<VerifyArgs>,
    pub sweep: Option<SweepArgs>,
}

/// Read and parse a configuration file.
pub fn load_config(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|err| usage(format!("cannot read config {}: {err}", path.display())))?;
    toml::from_str(&text).map_err(|err| usage(format!("bad config {}: {err}", path.display())))
}

macro_rules! merge_options {
    ($self:ident, $base:ident; $($f:ident),+ $(,)?) => {
        Self { $($f: $self.$f.or($base.$f)),+ }
    };
}

fn path_string(p: &Path) -> String {
    p.display().to_string()
}

// ---------------------------------------------------------------- generate

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GenerateArgs {
    /// Family: minkowski, schwarzschild, pg, star, collapse, or blob.
    #[arg(long)]
    pub family: Option<String>,
    /// Mass parameter (schwarzschild, pg); default 1.
    #[arg(long)]
    pub mass: Option<f64>,
    /// Central energy density (star).
    #[arg(long)]
    pub mu0: Option<f64>,
    /// Surface radius (star).
    #[arg(long)]
    pub rstar: Option<f64>,
    /// Contraction rate (collapse).
    #[arg(long)]
    pub k0: Option<f64>,
    /// Radial gradient of the contraction (collapse).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Gradient length scale (collapse); default 1.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Central mass amplitude (blob).
    #[arg(long)]
    pub amplitude: Option<f64>,
    /// Mass profile width (blob).
    #[arg(long)]
    pub width: Option<f64>,
    /// Grid nodes; default 257.
    #[arg(long)]
    pub n: Option<usize>,
    /// Inner radius; 0 gives a ball, positive values an annulus.
    #[arg(long)]
    pub rmin: Option<f64>,
    /// Outer radius (required).
    #[arg(long)]
    pub rmax: Option<f64>,
    /// Geometric grid-spacing ratio instead of a uniform grid.
    #[arg(long)]
    pub geometric: Option<f64>,
    /// Free-form label; defaults to the family name.
    #[arg(long)]
    pub label: Option<String>,
    /// Output JSON path; omitted means stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct GeneratePlan {
    pub subcommand: String,
    pub n: usize,
    pub rmin: f64,
    pub rmax: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geometric: Option<f64>,
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    pub family: FamilySpec,
}

fn canonical_family(name: &str) -> Result<&'static str, CliError> {
    match name.to_ascii_lowercase().as_str() {
        "minkowski" => Ok("minkowski"),
        "schwarzschild" | "schwarzschild_ts" => Ok("schwarzschild"),
        "pg" | "painleve_gullstrand" | "painleve-gullstrand" => Ok("pg"),
        "star" | "constant_density_star" => Ok("star"),
        "collapse" | "uniform_collapse" => Ok("collapse"),
        "blob" | "gaussian_blob" => Ok("blob"),
        other => Err(usage(format!(
            "unknown family {other:?}; expected minkowski, schwarzschild, pg, star, collapse, or blob"
        ))),
    }
}

impl GenerateArgs {
    pub fn merged_over(self, base: Self) -> Self {
        merge_options!(self, base; family, mass, mu0, rstar, k0, beta, scale,
            amplitude, width, n, rmin, rmax, geometric, label, out)
    }

    pub fn resolve(self) -> Result<GeneratePlan, CliError> {
        let name = self
            .family
            .as_deref()
            .ok_or_else(|| usage("family is required (minkowski, schwarzschild, pg, star, collapse, blob)"))?;
        let canon = canonical_family(name)?;

        // Reject parameters that do not belong to the chosen family, so
        // a typo cannot silently fall back to a default.
        let applicability: [(&str, bool, &[&str]); 7] = [
            ("mass", self.mass.is_some(), &["schwarzschild", "pg"]),
            ("mu0", self.mu0.is_some(), &["star"]),
            ("rstar", self.rstar.is_some(), &["star"]),
            ("k0", self.k0.is_some(), &["collapse"]),
            ("beta", self.beta.is_some(), &["collapse"]),
            ("amplitude", self.amplitude.is_some(), &["blob"]),
            ("width", self.width.is_some(), &["blob"]),
        ];
        for (flag, given, families) in applicability {
            if given && !families.contains(&canon) {
                return Err(usage(format!("--{flag} does not apply to family {canon}")));
            }
        }
        if self.scale.is_some() && canon != "collapse" {
            return Err(usage(format!("--scale does not apply to family {canon}")));
        }

        let req = |value: Option<f64>, flag: &str| {
            value.ok_or_else(|| usage(format!("--{flag} is required for family {canon}")))
        };
        let family = match canon {
            "minkowski" => FamilySpec::Minkowski,
            "schwarzschild" => FamilySpec::SchwarzschildTs { m: self.mass.unwrap_or(1.0) },
            "pg" => FamilySpec::PainleveGullstrand { m: self.mass.unwrap_or(1.0) },
            "star" => FamilySpec::ConstantDensityStar {
                mu0: req(self.mu0, "mu0")?,
                r_star: req(self.rstar, "rstar")?,
            },
            "collapse" => FamilySpec::UniformCollapse {
                k0: req(self.k0, "k0")?,
                beta: req(self.beta, "beta")?,
                scale: self.scale.unwrap_or(1.0),
            },
            "blob" => FamilySpec::GaussianBlob {
                amplitude: req(self.amplitude, "amplitude")?,
                width: req(self.width, "width")?,
            },
            _ => unreachable!("canonical_family covers all names"),
        };

        let rmax = self.rmax.ok_or_else(|| usage("--rmax is required"))?;
        let rmin = self.rmin.unwrap_or(0.0);
        Ok(GeneratePlan {
            subcommand: "generate".into(),
            n: self.n.unwrap_or(257),
            rmin,
            rmax,
            geometric: self.geometric,
            label: self.label.unwrap_or_else(|| family.tag().to_string()),
            out: self.out.as_deref().map(path_string),
            family,
        })
    }
}

// ----------------------------------------------------------------- analyze

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalyzeArgs {
    /// Input data file (JSON).
    #[arg(value_name = "DATA")]
    pub input: Option<PathBuf>,
    /// Output format: csv (default) or json.
    #[arg(long)]
    pub format: Option<String>,
    /// Output path; omitted means stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct AnalyzePlan {
    pub subcommand: String,
    pub input: String,
    pub format: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl AnalyzeArgs {
    pub fn merged_over(self, base: Self) -> Self {
        merge_options!(self, base; input, format, out)
    }

    pub fn resolve(self) -> Result<AnalyzePlan, CliError> {
        let format = self.format.unwrap_or_else(|| "csv".into()).to_ascii_lowercase();
        if format != "csv" && format != "json" {
            return Err(usage(format!("--format must be csv or json, got {format:?}")));
        }
        Ok(AnalyzePlan {
            subcommand: "analyze".into(),
            input: required_input(self.input)?,
            format,
            out: self.out.as_deref().map(path_string),
        })
    }
}

fn required_input(input: Option<PathBuf>) -> Result<String, CliError> {
    input
        .as_deref()
        .map(path_string)
        .ok_or_else(|| usage("an input data file is required"))
}

// --------------------------------------------------------------- criterion

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CriterionArgs {
    /// Input data file (JSON); must be ball data.
    #[arg(value_name = "DATA")]
    pub input: Option<PathBuf>,
    /// Time direction: future (default), past, or both.
    #[arg(long)]
    pub mode: Option<String>,
    /// Output path; omitted means stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct CriterionPlan {
    pub subcommand: String,
    pub input: String,
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl CriterionArgs {
    pub fn merged_over(self, base: Self) -> Self {
        merge_options!(self, base; input, mode, out)
    }

    pub fn resolve(self) -> Result<CriterionPlan, CliError> {
        let mode = self.mode.unwrap_or_else(|| "future".into()).to_ascii_lowercase();
        if !matches!(mode.as_str(), "future" | "past" | "both") {
            return Err(usage(format!("--mode must be future, past, or both, got {mode:?}")));
        }
        Ok(CriterionPlan {
            subcommand: "criterion".into(),
            input: required_input(self.input)?,
            mode,
            out: self.out.as_deref().map(path_string),
        })
    }
}

// -------------------------------------------------------------------- jang

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct JangArgs {
    /// Input data file (JSON).
    #[arg(value_name = "DATA")]
    pub input: Option<PathBuf>,
    /// Boundary condition: center, matched, value=<v>, optionally
    /// prefixed with r1=<radius> naming the inner grid radius
    /// (e.g. "r1=3,matched"). Defaults by domain: balls use center,
    /// annuli use matched.
    #[arg(long)]
    pub bc: Option<String>,
    /// Relative step tolerance; default 1e-9.
    #[arg(long)]
    pub rtol: Option<f64>,
    /// Absolute step tolerance; default 1e-12.
    #[arg(long)]
    pub atol: Option<f64>,
    /// Blow-up threshold on 1 - v^2; default 1e-6.
    #[arg(long)]
    pub blow_eps: Option<f64>,
    /// Step budget; default 1000000.
    #[arg(long)]
    pub max_steps: Option<usize>,
    /// Output path; omitted means stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct JangPlan {
    pub subcommand: String,
    pub input: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bc: Option<String>,
    pub rtol: f64,
    pub atol: f64,
    pub blow_eps: f64,
    pub max_steps: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl JangArgs {
    pub fn merged_over(self, base: Self) -> Self {
        merge_options!(self, base; input, bc, rtol, atol, blow_eps, max_steps, out)
    }

    pub fn resolve(self) -> Result<JangPlan, CliError> {
        for (flag, value) in
            [("rtol", self.rtol), ("atol", self.atol), ("blow-eps", self.blow_eps)]
        {
            if let Some(v) = value {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(usage(format!("--{flag} must be positive and finite, got {v}")));
                }
            }
        }
        Ok(JangPlan {
            subcommand: "jang".into(),
            input: required_input(self.input)?,
            bc: self.bc.map(|s| s.trim().to_ascii_lowercase()),
            rtol: self.rtol.unwrap_or(1e-9),
            atol: self.atol.unwrap_or(1e-12),
            blow_eps: self.blow_eps.unwrap_or(1e-6),
            max_steps: self.max_steps.unwrap_or(1_000_000),
            out: self.out.as_deref().map(path_string),
        })
    }
}

// ------------------------------------------------------------------ energy

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnergyArgs {
    /// Input data file (JSON).
    #[arg(value_name = "DATA")]
    pub input: Option<PathBuf>,
    /// Relative tolerance for the monotonicity/positivity verdicts;
    /// default 1e-10.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output path; omitted means stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct EnergyPlan {
    pub subcommand: String,
    pub input: String,
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl EnergyArgs {
    pub fn merged_over(self, base: Self) -> Self {
        merge_options!(self, base; input, tol, out)
    }

    pub fn resolve(self) -> Result<EnergyPlan, CliError> {
        let tol = self.tol.unwrap_or(1e-10);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(usage(format!("--tol must be positive and finite, got {tol}")));
        }
        Ok(EnergyPlan {
            subcommand: "energy".into(),
            input: required_input(self.input)?,
            tol,
            out: self.out.as_deref().map(path_string),
        })
    }
}

// ------------------------------------------------------------------ verify

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyArgs {
    /// Input data file (JSON). Optional when the requested checks do
    /// not need one (pg-oracle).
    #[arg(value_name = "DATA")]
    pub input: Option<PathBuf>,
    /// Comma-separated checks: geroch, de, mass-chain, pg-oracle.
    /// Defaults to every check applicable to the input.
    #[arg(long)]
    pub check: Option<String>,
    /// Number of refinement levels in each convergence table;
    /// default 3.
    #[arg(long)]
    pub refine: Option<usize>,
    /// Solver tolerance for checks that integrate the slope equation;
    /// default 1e-11.
    #[arg(long)]
    pub rtol: Option<f64>,
    /// Output path; omitted means stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct VerifyPlan {
    pub subcommand: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    /// None means "all applicable"; resolved against the input later.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checks: Option<Vec<String>>,
    pub refine: usize,
    pub rtol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

pub const VERIFY_CHECKS: [&str; 4] = ["geroch", "de", "mass-chain", "pg-oracle"];

impl VerifyArgs {
    pub fn merged_over(self, base: Self) -> Self {
        merge_options!(self, base; input, check, refine, rtol, out)
    }

    pub fn resolve(self) -> Result<VerifyPlan, CliError> {
        let checks = match self.check {
            None => None,
            Some(raw) => {
                let mut list = Vec::new();
                for token in raw.split(',') {
                    let canon = match token.trim().to_ascii_lowercase().as_str() {
                        "geroch" => "geroch",
                        "de" => "de",
                        "mass-chain" | "mass_chain" | "chain" => "mass-chain",
                        "pg-oracle" | "pg_oracle" | "pg" => "pg-oracle",
                        other => {
                            return Err(usage(format!(
                                "unknown check {other:?}; expected one of {VERIFY_CHECKS:?}"
                            )))
                        }
                    };
                    if !list.iter().any(|c| c == canon) {
                        list.push(canon.to_string());
                    }
                }
                if list.is_empty() {
                    return Err(usage("--check given but empty"));
                }
                Some(list)
            }
        };
        let refine = self.refine.unwrap_or(3);
        if refine == 0 || refine > 8 {
            return Err(usage(format!("--refine must be between 1 and 8, got {refine}")));
        }
        let rtol = self.rtol.unwrap_or(1e-11);
        if !(rtol > 0.0 && rtol.is_finite()) {
            return Err(usage(format!("--rtol must be positive and finite, got {rtol}")));
        }
        Ok(VerifyPlan {
            subcommand: "verify".into(),
            input: self.input.as_deref().map(path_string),
            checks,
            refine,
            rtol,
            out: self.out.as_deref().map(path_string),
        })
    }
}

// ------------------------------------------------------------------- sweep

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepArgs {
    /// Family to draw from: star, collapse, or both (default).
    #[arg(long)]
    pub family: Option<String>,
    /// Master seed; default 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of trials; default 200.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Grid nodes per trial; default 65.
    #[arg(long)]
    pub n: Option<usize>,
    /// Star compactness range, as lo:hi; default 0.05:0.9.
    #[arg(long)]
    pub cr2: Option<String>,
    /// Star surface-radius range, as lo:hi; default 0.5:2.
    #[arg(long)]
    pub rstar: Option<String>,
    /// Collapse contraction-rate range, as lo:hi; default 0.2:3.
    #[arg(long)]
    pub k0: Option<String>,
    /// Collapse gradient fraction of the energy bound, as lo:hi;
    /// default 0:1.
    #[arg(long)]
    pub beta_frac: Option<String>,
    /// Collapse ball-radius range, as lo:hi; default 0.5:2.
    #[arg(long)]
    pub rmax: Option<String>,
    /// Output path; omitted means stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct SweepPlan {
    pub subcommand: String,
    pub family: String,
    pub seed: u64,
    pub trials: usize,
    pub n: usize,
    pub cr2: (f64, f64),
    pub rstar: (f64, f64),
    pub k0: (f64, f64),
    pub beta_frac: (f64, f64),
    pub rmax: (f64, f64),
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

fn parse_range(raw: Option<String>, flag: &str, default: (f64, f64)) -> Result<(f64, f64), CliError> {
    match raw {
        None => Ok(default),
        Some(text) => {
            let parts: Vec<&str> = text.split(':').collect();
            let bad = || usage(format!("--{flag} must look like lo:hi, got {text:?}"));
            if parts.len() != 2 {
                return Err(bad());
            }
            let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
            let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(bad());
            }
            Ok((lo, hi))
        }
    }
}

impl SweepArgs {
    pub fn merged_over(self, base: Self) -> Self {
        merge_options!(self, base; family, seed, trials, n, cr2, rstar, k0, beta_frac, rmax, out)
    }

    pub fn resolve(self) -> Result<SweepPlan, CliError> {
        let family = self.family.unwrap_or_else(|| "both".into()).to_ascii_lowercase();
        if !matches!(family.as_str(), "star" | "collapse" | "both") {
            return Err(usage(format!("--family must be star, collapse, or both, got {family:?}")));
        }
        let trials = self.trials.unwrap_or(200);
        if trials == 0 {
            return Err(usage("--trials must be positive"));
        }
        Ok(SweepPlan {
            subcommand: "sweep".into(),
            family,
            seed: self.seed.unwrap_or(0),
            trials,
            n: self.n.unwrap_or(65),
            cr2: parse_range(self.cr2, "cr2", (0.05, 0.9))?,
            rstar: parse_range(self.rstar, "rstar", (0.5, 2.0))?,
            k0: parse_range(self.k0, "k0", (0.2, 3.0))?,
            beta_frac: parse_range(self.beta_frac, "beta-frac", (0.0, 1.0))?,
            rmax: parse_range(self.rmax, "rmax", (0.5, 2.0))?,
            out: self.out.as_deref().map(path_string),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_config_values() {
        let file: ConfigFile = toml::from_str(
            "[generate]\nfamily = \"pg\"\nmass = 2.0\nn = 129\nrmin = 3.0\nrmax = 10.0\n",
        )
        .unwrap();
        let flags = GenerateArgs { mass: Some(1.0), ..Default::default() };
        let plan = flags.merged_over(file.generate.unwrap()).resolve().unwrap();
        assert_eq!(plan.n, 129);
        assert!(matches!(plan.family, FamilySpec::PainleveGullstrand { m } if m == 1.0));
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let err = toml::from_str::<ConfigFile>("[generate]\nfamly = \"pg\"\n").unwrap_err();
        assert!(err.to_string().contains("famly"));
    }

    #[test]
    fn inapplicable_family_parameters_are_rejected() {
        let args = GenerateArgs {
            family: Some("star".into()),
            mass: Some(1.0),
            mu0: Some(0.001),
            rstar: Some(2.0),
            rmax: Some(3.0),
            ..Default::default()
        };
        let err = args.resolve().unwrap_err();
        assert!(err.to_string().contains("--mass"));
    }

    #[test]
    fn family_aliases_resolve() {
        for name in ["pg", "painleve_gullstrand", "PAINLEVE-GULLSTRAND"] {
            let args = GenerateArgs {
                family: Some(name.into()),
                rmin: Some(3.0),
                rmax: Some(10.0),
                ..Default::default()
            };
            let plan = args.resolve().unwrap();
            assert!(matches!(plan.family, FamilySpec::PainleveGullstrand { .. }));
        }
    }

    #[test]
    fn sweep_ranges_parse_and_validate() {
        assert_eq!(parse_range(Some("0.1:0.5".into()), "cr2", (0.0, 1.0)).unwrap(), (0.1, 0.5));
        assert!(parse_range(Some("0.5:0.1".into()), "cr2", (0.0, 1.0)).is_err());
        assert!(parse_range(Some("x:1".into()), "cr2", (0.0, 1.0)).is_err());
        assert_eq!(parse_range(None, "cr2", (0.0, 1.0)).unwrap(), (0.0, 1.0));
    }

    #[test]
    fn verify_check_list_canonicalizes_and_rejects_unknowns() {
        let args = VerifyArgs { check: Some("geroch, dE, chain".into()), ..Default::default() };
        // "dE" canonicalizes case-insensitively; "chain" is an alias.
        let plan = args.resolve().unwrap();
        assert_eq!(plan.checks.unwrap(), vec!["geroch", "de", "mass-chain"]);
        let bad = VerifyArgs { check: Some("gerok".into()), ..Default::default() };
        assert!(bad.resolve().is_err());
    }

    #[test]
    fn plans_serialize_for_digesting() {
        let plan = GenerateArgs {
            family: Some("collapse".into()),
            k0: Some(1.0),
            beta: Some(1.0),
            rmax: Some(0.8),
            ..Default::default()
        }
        .resolve()
        .unwrap();
        let a = crate::report::config_digest(&plan);
        assert_eq!(a.len(), 64);
    }
}
