//! Command-line front end: compute single functionals, run checks, batteries
//! and sweeps, and write self-describing JSON or CSV reports.

pub mod output;
pub mod spec;

use clap::{Parser, Subcommand, ValueEnum};
use geomtomo::functionals::{
    body_measure, kdim_projection_volume, kdim_section_volume, mean_width, mixed_measure, mu_projection,
    projection_area, section_measure, surface_area, MixedMethod, MixedWith,
};
use geomtomo::linalg::basis_vector;
use geomtomo::verifiers::{
    battery, lemma_bank, sharpness_sweep, verify_cor13, verify_gk, verify_prop29, verify_prop31, verify_prop53,
    verify_thm12, verify_thm14, verify_thm51, verify_thm61, BatteryReport, CheckConfig, NamedValue, Suite,
    SweepConfig, SweepTable, Variant, LEMMA_IDS,
};
use geomtomo::{BodySpec, CheckReport, EvalConfig, Frame, FunctionalValue, GeomError, MeasureSpec, Verdict};
use serde::Serialize;
use serde_json::{json, Value};

use spec::{parse_body, parse_checks, parse_measure, CheckSpec};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable or malformed input, unsupported combinations.
    Config(String),
    Geom(GeomError),
}

impl From<GeomError> for CliError {
    fn from(e: GeomError) -> Self {
        CliError::Geom(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "{m}"),
            CliError::Geom(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

#[derive(Parser, Debug)]
#[command(name = "geomtomo", version, about = "Sections, projections and comparison checks for convex bodies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Quadrature level, 1 to 5.
    #[arg(long, global = true, default_value_t = 3)]
    pub level: u8,
    /// Seed for every stochastic rule and random instance.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Report file; standard output when omitted.
    #[arg(long, global = true)]
    pub output: Option<std::path::PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate one functional of one body.
    Compute {
        #[arg(value_enum)]
        functional: Functional,
        /// Body: inline JSON, a JSON file, or a short form like `ball:2`.
        #[arg(long, default_value = "ball")]
        body: String,
        /// Measure: inline JSON, a JSON file, or a short form like `gaussian:1`.
        #[arg(long, default_value = "lebesgue")]
        measure: String,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        /// Subspace dimension for sections and projections (coordinate
        /// subspace spanned by the first k axes); hyperplanes when omitted.
        #[arg(long)]
        k: Option<usize>,
        /// Hyperplane normal, comma separated; the last axis when omitted.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        theta: Option<Vec<f64>>,
    },
    /// Run checks on a pair of bodies.
    Verify {
        /// Check ids (comma separated), a check spec or a manifest array.
        #[arg(long)]
        check: String,
        /// `K`, then optionally `L`; `L = K` when given once.
        #[arg(long, num_args = 1, default_values_t = vec!["ball".to_string()])]
        body: Vec<String>,
        #[arg(long, default_value = "lebesgue")]
        measure: String,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        /// Radius parameter of the bounded-density and log-concave bounds.
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        /// Additive slack of the section hypothesis.
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        /// Subspace dimension; `dim − 1` when omitted.
        #[arg(long)]
        k: Option<usize>,
        /// Level of the hypothesis direction grid; `--level` when omitted.
        #[arg(long)]
        grid: Option<u8>,
        /// Dilate `L` onto the hypothesis before checking.
        #[arg(long)]
        enforce: bool,
    },
    /// Parameter sweeps over equality and near-equality cases.
    Sweep {
        #[arg(value_enum)]
        name: SweepName,
        /// Dimension; a list for remark61.
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        /// Density exponents (remark31 powers, remark41 cone exponents).
        #[arg(long, value_delimiter = ',')]
        p: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        /// Quadrature levels for remark32.
        #[arg(long, value_delimiter = ',')]
        levels: Vec<u8>,
    },
    /// Run a named suite of seeded random checks.
    Battery {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long)]
        grid: Option<u8>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    Volume,
    Measure,
    Section,
    Projection,
    MuProjection,
    Mixed,
    SurfaceArea,
    MeanWidth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepName {
    Remark31,
    Remark32,
    Remark41,
    Remark61,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum SuiteArg {
    LemmaBank,
    Theorems,
}

/// The resolved run configuration embedded in every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub level: u8,
    pub grid_level: u8,
    pub seed: u64,
    pub format: Format,
    pub inputs: Value,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Payload {
    Values(Vec<NamedValue>),
    Reports(Vec<CheckReport>),
    Battery(BatteryReport),
    Sweep(SweepTable),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub diagnostic: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Document {
    pub tool: &'static str,
    pub version: &'static str,
    /// The only field that differs between identical runs.
    pub timestamp: String,
    pub config: RunConfig,
    pub summary: Summary,
    pub payload: Payload,
}

impl Document {
    /// 0 when no non-diagnostic check failed, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.summary.fail == 0 {
            0
        } else {
            2
        }
    }
}

fn summarize<'a>(reports: impl IntoIterator<Item = &'a CheckReport>) -> Summary {
    let mut s = Summary::default();
    for r in reports.into_iter().flat_map(|r| r.flatten()) {
        match r.verdict {
            Verdict::Pass => s.pass += 1,
            Verdict::Fail => s.fail += 1,
            Verdict::Diagnostic => s.diagnostic += 1,
        }
    }
    s
}

fn check_level(what: &str, l: u8) -> Result<u8, CliError> {
    if (1..=5).contains(&l) {
        Ok(l)
    } else {
        Err(CliError::Config(format!("{what} must be between 1 and 5, got {l}")))
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

/// Executes a parsed command line. The timestamp is the caller's so that
/// tests can pin it.
pub fn run(cli: &Cli, timestamp: String) -> Result<Document, CliError> {
    let level = check_level("--level", cli.level)?;
    let (command, grid_level, inputs, payload, summary) = match &cli.command {
        Command::Compute {
            functional,
            body,
            measure,
            dim,
            k,
            theta,
        } => {
            let body = parse_body(body, *dim)?;
            let n = body.dim;
            let measure = parse_measure(measure, n)?;
            let cfg = EvalConfig {
                level,
                seed: cli.seed,
                closed_forms: true,
            };
            let values = compute(*functional, &body, &measure, *k, theta.as_deref(), &cfg)?;
            let inputs = json!({
                "functional": functional,
                "body": body,
                "measure": measure,
                "k": k,
                "theta": theta,
            });
            ("compute", level, inputs, Payload::Values(values), Summary::default())
        }
        Command::Verify {
            check,
            body,
            measure,
            dim,
            r,
            epsilon,
            k,
            grid,
            enforce,
        } => {
            let grid_level = check_level("--grid", grid.unwrap_or(level))?;
            if body.len() > 2 {
                return Err(CliError::Config("--body takes K and optionally L".into()));
            }
            let kb = parse_body(&body[0], *dim)?;
            let lb = match body.get(1) {
                Some(s) => parse_body(s, kb.dim)?,
                None => kb.clone(),
            };
            let measure = parse_measure(measure, kb.dim)?;
            let defaults = CheckSpec {
                check: String::new(),
                k: Some(kb),
                l: Some(lb),
                measure: Some(measure),
                r: Some(*r),
                epsilon: Some(*epsilon),
                sub_dim: *k,
                enforce: Some(*enforce),
            };
            let cfg = CheckConfig {
                level,
                grid_level,
                seed: cli.seed,
                enforce: *enforce,
            };
            let specs: Vec<CheckSpec> = parse_checks(check)?
                .into_iter()
                .map(|c| CheckSpec {
                    k: c.k.or(defaults.k.clone()),
                    l: c.l.or(defaults.l.clone()),
                    measure: c.measure.or(defaults.measure.clone()),
                    r: c.r.or(defaults.r),
                    epsilon: c.epsilon.or(defaults.epsilon),
                    sub_dim: c.sub_dim.or(defaults.sub_dim),
                    enforce: c.enforce.or(defaults.enforce),
                    check: c.check,
                })
                .collect();
            let reports = specs.iter().map(|s| verify(s, &cfg)).collect::<Result<Vec<_>, _>>()?;
            let summary = summarize(&reports);
            ("verify", grid_level, json!({ "checks": specs }), Payload::Reports(reports), summary)
        }
        Command::Sweep { name, n, p, r, levels } => {
            let config = sweep_config(*name, n, p, *r, levels)?;
            let cfg = CheckConfig {
                seed: cli.seed,
                ..CheckConfig::with_level(level)
            };
            let table = sharpness_sweep(&config, &cfg)?;
            ("sweep", level, to_json(&config), Payload::Sweep(table), Summary::default())
        }
        Command::Battery { suite, grid } => {
            let grid_level = check_level("--grid", grid.unwrap_or(level))?;
            let suite = match suite {
                SuiteArg::LemmaBank => Suite::LemmaBank,
                SuiteArg::Theorems => Suite::Theorems,
            };
            let cfg = CheckConfig {
                level,
                grid_level,
                seed: cli.seed,
                enforce: false,
            };
            let rep = battery(suite, cli.seed, &cfg)?;
            let summary = summarize(&rep.reports);
            ("battery", grid_level, json!({ "suite": suite }), Payload::Battery(rep), summary)
        }
    };
    Ok(Document {
        tool: "geomtomo",
        version: env!("CARGO_PKG_VERSION"),
        timestamp,
        config: RunConfig {
            command,
            level,
            grid_level,
            seed: cli.seed,
            format: cli.format,
            inputs,
        },
        summary,
        payload,
    })
}

fn named(name: &str, value: FunctionalValue) -> NamedValue {
    NamedValue {
        name: name.to_string(),
        value,
    }
}

fn compute(
    f: Functional,
    body: &BodySpec,
    measure: &MeasureSpec,
    k: Option<usize>,
    theta: Option<&[f64]>,
    cfg: &EvalConfig,
) -> Result<Vec<NamedValue>, CliError> {
    let n = body.dim;
    if measure.dim != n {
        return Err(CliError::Config(format!(
            "measure dimension {} does not match body dimension {n}",
            measure.dim
        )));
    }
    let frame = || -> Result<Frame, CliError> {
        match k {
            Some(k) if k + 1 != n => {
                if k == 0 || k >= n {
                    return Err(CliError::Config(format!("--k must lie in 1..{n}")));
                }
                Ok(Frame::coordinate(n, &(0..k).collect::<Vec<_>>())?)
            }
            _ => {
                let t = theta.map(<[f64]>::to_vec).unwrap_or_else(|| basis_vector(n, n - 1));
                if t.len() != n {
                    return Err(CliError::Config(format!("--theta needs {n} components")));
                }
                Ok(Frame::hyperplane(&t)?)
            }
        }
    };
    let lebesgue_only = |what: &str| {
        if measure.is_lebesgue() {
            Ok(())
        } else {
            Err(CliError::Config(format!("{what} is defined for the lebesgue measure only")))
        }
    };
    let name = to_json(&f).as_str().unwrap_or_default().to_string();
    Ok(match f {
        Functional::Volume => vec![named(&name, body_measure(&MeasureSpec::lebesgue(n), body, cfg)?)],
        Functional::Measure => vec![named(&name, body_measure(measure, body, cfg)?)],
        Functional::Section => {
            let h = frame()?;
            if h.k + 1 == n {
                vec![named(&name, section_measure(measure, body, &h, cfg)?)]
            } else {
                lebesgue_only("a section of codimension above one")?;
                vec![named(&name, kdim_section_volume(body, &h, cfg)?)]
            }
        }
        Functional::Projection => {
            lebesgue_only("projection")?;
            let h = frame()?;
            if h.k + 1 == n {
                vec![named(&name, projection_area(body, &h, cfg)?)]
            } else {
                vec![named(&name, kdim_projection_volume(body, &h, cfg)?)]
            }
        }
        Functional::MuProjection => {
            let h = frame()?;
            if h.k + 1 != n {
                return Err(CliError::Config("mu_projection is defined on hyperplanes only".into()));
            }
            vec![named(&name, mu_projection(measure, body, &h, cfg)?)]
        }
        Functional::Mixed => {
            let with = MixedWith::Ball { radius: 1.0 };
            vec![
                named(
                    "mixed_boundary_integral",
                    mixed_measure(measure, body, &with, MixedMethod::BoundaryIntegral, cfg)?,
                ),
                named(
                    "mixed_finite_difference",
                    mixed_measure(measure, body, &with, MixedMethod::FiniteDifference, cfg)?,
                ),
            ]
        }
        Functional::SurfaceArea => {
            lebesgue_only("surface area")?;
            vec![named(&name, surface_area(body, cfg)?)]
        }
        Functional::MeanWidth => {
            lebesgue_only("mean width")?;
            vec![named(&name, mean_width(body, cfg)?)]
        }
    })
}

fn verify(spec: &CheckSpec, base: &CheckConfig) -> Result<CheckReport, CliError> {
    let (k, l, m) = match (&spec.k, &spec.l, &spec.measure) {
        (Some(k), Some(l), Some(m)) => (k, l, m),
        _ => return Err(CliError::Config(format!("check '{}' needs k, l and measure", spec.check))),
    };
    if l.dim != k.dim || m.dim != k.dim {
        return Err(CliError::Config(format!("check '{}': dimensions of k, l and measure differ", spec.check)));
    }
    let n = k.dim;
    let cfg = CheckConfig {
        enforce: spec.enforce.unwrap_or(base.enforce),
        ..*base
    };
    let r = spec.r.unwrap_or(1.0);
    let sub = spec.sub_dim.unwrap_or(n - 1);
    let rep = match spec.check.as_str() {
        "gk" => verify_gk(k, l, sub, &cfg)?,
        "thm12a" => verify_thm12(k, l, m, Variant::A, &cfg)?,
        "thm12b" => verify_thm12(k, l, m, Variant::B, &cfg)?,
        "cor13a" => verify_cor13(k, l, m, Variant::A, &cfg)?,
        "cor13b" => verify_cor13(k, l, m, Variant::B, &cfg)?,
        "prop31" => verify_prop31(k, l, sub, &cfg)?,
        "thm14" => verify_thm14(k, l, m, spec.epsilon.unwrap_or(0.0), &cfg)?,
        "thm51" => verify_thm51(k, l, m, r, &cfg)?,
        "prop53" => verify_prop53(m, l, &cfg)?,
        "thm61" => verify_thm61(k, l, m, r, &cfg)?,
        "prop29" => verify_prop29(m, k, &cfg)?,
        id => match LEMMA_IDS.iter().position(|x| *x == id) {
            // lemma checks draw their own random instances from the seed
            Some(i) => lemma_bank(&[cfg.seed], &cfg)?.swap_remove(i),
            None => {
                return Err(CliError::Config(format!(
                    "unknown check '{id}'; expected one of gk, thm12a, thm12b, cor13a, cor13b, prop31, thm14, \
                     thm51, prop53, thm61, prop29, {}",
                    LEMMA_IDS.join(", ")
                )))
            }
        },
    };
    Ok(rep)
}

fn single<T: Copy>(v: &[T], what: &str, default: T) -> Result<T, CliError> {
    match v {
        [] => Ok(default),
        [x] => Ok(*x),
        _ => Err(CliError::Config(format!("this sweep takes a single {what}"))),
    }
}

fn sweep_config(name: SweepName, n: &[usize], p: &[f64], r: f64, levels: &[u8]) -> Result<SweepConfig, CliError> {
    let list = |v: &[f64], d: &[f64]| if v.is_empty() { d.to_vec() } else { v.to_vec() };
    Ok(match name {
        SweepName::Remark31 => SweepConfig::Remark31 {
            n: single(n, "--n", 3)?,
            ps: list(p, &[1.0, 10.0, 100.0, 1000.0]),
        },
        SweepName::Remark32 => {
            let levels = if levels.is_empty() { vec![1, 2, 3, 4] } else { levels.to_vec() };
            for &l in &levels {
                check_level("--levels", l)?;
            }
            SweepConfig::Remark32 {
                n: single(n, "--n", 3)?,
                radius: r,
                levels,
            }
        }
        SweepName::Remark41 => SweepConfig::Remark41 {
            n: single(n, "--n", 3)?,
            exponents: list(p, &[0.5, 1.0, 2.0, 4.0]),
        },
        SweepName::Remark61 => SweepConfig::Remark61 {
            ns: if n.is_empty() { vec![3, 4, 5] } else { n.to_vec() },
            r,
        },
    })
}
