//! Parsing and validation of run configurations.

use std::path::PathBuf;

use lmproj_core::problems::{desk_by_name, gen_spectra_instance, read_instance};
use lmproj_core::sets::ProjectionMode;
use lmproj_core::solve::{GlobalConfig, LocalConfig, NlsProblem, ProjectionConfig, ThetaSchedule};
use lmproj_core::trace::RunMeta;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid configuration: {}", self.0)
    }
}

fn bad<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Local,
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Box41,
    Spectra42,
}

/// Problem selector: `desk:<name>`, `spectra:<n>,<m>,<q>,<seed>`, or
/// `file:<path>` for a stored instance.
pub enum ProblemSpec {
    Desk(String),
    Spectra {
        n: usize,
        m: usize,
        q: usize,
        seed: u64,
    },
    File(PathBuf),
}

impl ProblemSpec {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        if let Some(name) = s.strip_prefix("desk:") {
            return Ok(ProblemSpec::Desk(name.to_string()));
        }
        if let Some(dims) = s.strip_prefix("spectra:") {
            let parts: Vec<&str> = dims.split(',').collect();
            if parts.len() != 4 {
                return bad(format!("expected spectra:<n>,<m>,<q>,<seed>, got `{s}`"));
            }
            let parse = |p: &str, what: &str| -> Result<u64, ConfigError> {
                p.trim()
                    .parse()
                    .map_err(|_| ConfigError(format!("bad {what} in `{s}`")))
            };
            return Ok(ProblemSpec::Spectra {
                n: parse(parts[0], "n")? as usize,
                m: parse(parts[1], "m")? as usize,
                q: parse(parts[2], "q")? as usize,
                seed: parse(parts[3], "seed")?,
            });
        }
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(ProblemSpec::File(PathBuf::from(path)));
        }
        bad(format!(
            "problem must be desk:<name>, spectra:<n>,<m>,<q>,<seed> or file:<path>, got `{s}`"
        ))
    }

    pub fn build(&self) -> Result<Box<dyn NlsProblem>, ConfigError> {
        match self {
            ProblemSpec::Desk(name) => match desk_by_name(name) {
                Some(p) => Ok(Box::new(p)),
                None => bad(format!("unknown desk problem `{name}` (try D1..D4)")),
            },
            ProblemSpec::Spectra { n, m, q, seed } => gen_spectra_instance(*n, *m, *q, *seed)
                .map(|p| Box::new(p) as Box<dyn NlsProblem>)
                .map_err(|e| ConfigError(e.to_string())),
            ProblemSpec::File(path) => read_instance(path)
                .map(|p| Box::new(p) as Box<dyn NlsProblem>)
                .map_err(|e| ConfigError(e.to_string())),
        }
    }

    pub fn is_spectra(&self) -> bool {
        !matches!(self, ProblemSpec::Desk(_))
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            ProblemSpec::Spectra { seed, .. } => Some(*seed),
            _ => None,
        }
    }
}

pub fn parse_method(s: &str) -> Result<Method, ConfigError> {
    match s {
        "local" => Ok(Method::Local),
        "global" => Ok(Method::Global),
        _ => bad(format!("method must be local|global, got `{s}`")),
    }
}

pub fn parse_projection(s: &str) -> Result<ProjectionMode, ConfigError> {
    match s {
        "exact" => Ok(ProjectionMode::Exact),
        "condg" => Ok(ProjectionMode::CondG),
        "fwp" => Ok(ProjectionMode::FwP),
        _ => bad(format!("projection must be exact|condg|fwp, got `{s}`")),
    }
}

pub fn parse_preset(s: &str) -> Result<Preset, ConfigError> {
    match s {
        "box41" => Ok(Preset::Box41),
        "spectra42" => Ok(Preset::Spectra42),
        _ => bad(format!("preset must be box41|spectra42, got `{s}`")),
    }
}

/// `zero`, `const:<t>`, or `geom:<t0>,<rho>`.
pub fn parse_theta(s: &str) -> Result<ThetaSchedule, ConfigError> {
    if s == "zero" {
        return Ok(ThetaSchedule::Zero);
    }
    if let Some(v) = s.strip_prefix("const:") {
        let t: f64 = v
            .parse()
            .map_err(|_| ConfigError(format!("bad theta constant `{v}`")))?;
        if t < 0.0 {
            return bad("theta must be nonnegative");
        }
        return Ok(ThetaSchedule::Constant(t));
    }
    if let Some(v) = s.strip_prefix("geom:") {
        let parts: Vec<&str> = v.split(',').collect();
        if parts.len() != 2 {
            return bad(format!("expected geom:<theta0>,<rho>, got `{s}`"));
        }
        let theta0: f64 = parts[0]
            .parse()
            .map_err(|_| ConfigError("bad theta0".into()))?;
        let rho: f64 = parts[1]
            .parse()
            .map_err(|_| ConfigError("bad rho".into()))?;
        if theta0 < 0.0 || !(0.0..1.0).contains(&rho) {
            return bad("need theta0 >= 0 and rho in (0, 1)");
        }
        return Ok(ThetaSchedule::Geometric { theta0, rho });
    }
    bad(format!(
        "theta must be zero, const:<t> or geom:<t0>,<rho>, got `{s}`"
    ))
}

/// Fully validated run plan.
pub struct RunPlan {
    pub problem: Box<dyn NlsProblem>,
    pub method: Method,
    pub global: GlobalConfig,
    pub local: LocalConfig,
    pub start: Vec<f64>,
    pub meta: RunMeta,
}

pub struct RunOverrides {
    pub theta: Option<String>,
    pub tol_f: Option<f64>,
    pub tol_stationarity: Option<f64>,
    pub max_iters: Option<usize>,
    pub max_backtracks: Option<usize>,
    pub memory: Option<usize>,
    pub eta1: Option<f64>,
    pub eta2: Option<f64>,
    pub eta3: Option<f64>,
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
    pub condg_budget: Option<usize>,
    pub initial_rank: Option<usize>,
    pub force_iterative: bool,
    pub start_a: Option<f64>,
    pub start: Option<String>,
}

#[allow(clippy::too_many_arguments)]
pub fn build_plan(
    problem_spec: &str,
    method_s: &str,
    projection_s: &str,
    preset_s: Option<&str>,
    ov: &RunOverrides,
) -> Result<RunPlan, ConfigError> {
    let spec = ProblemSpec::parse(problem_spec)?;
    let method = parse_method(method_s)?;
    let mode = parse_projection(projection_s)?;
    let preset = match preset_s {
        Some(p) => parse_preset(p)?,
        None => {
            if spec.is_spectra() {
                Preset::Spectra42
            } else {
                Preset::Box41
            }
        }
    };

    let problem = spec.build()?;
    mode.validate(problem.feasible_set())
        .map_err(|e| ConfigError(format!("projection `{projection_s}` on this set: {e}")))?;

    let mut global = match preset {
        Preset::Box41 => GlobalConfig::preset_box(),
        Preset::Spectra42 => GlobalConfig::preset_spectrahedron(),
    };
    if let Some(t) = &ov.theta {
        global.theta = parse_theta(t)?;
    }
    if let Some(v) = ov.tol_f {
        if v <= 0.0 {
            return bad("tol-f must be positive");
        }
        global.tol_f = v;
    }
    if let Some(v) = ov.tol_stationarity {
        if v <= 0.0 {
            return bad("tol-stationarity must be positive");
        }
        global.tol_stationarity = v;
    }
    if let Some(v) = ov.max_iters {
        global.max_iters = v;
    }
    if let Some(v) = ov.max_backtracks {
        global.max_backtracks = v;
    }
    if let Some(v) = ov.memory {
        global.memory = v;
    }
    if let Some(v) = ov.eta1 {
        global.eta1 = v;
    }
    if let Some(v) = ov.eta2 {
        global.eta2 = v;
    }
    if let Some(v) = ov.eta3 {
        global.eta3 = v;
    }
    if let Some(v) = ov.gamma {
        global.gamma = v;
    }
    if let Some(v) = ov.beta {
        global.beta = v;
    }
    if !(global.eta1 > 0.0 && global.eta2 > 0.0 && global.eta3 > global.eta2) {
        return bad("need eta1 > 0 and eta3 > eta2 > 0");
    }
    if !(global.gamma > 0.0 && global.gamma < 1.0 && global.beta > 0.0 && global.beta < 1.0) {
        return bad("need gamma, beta in (0, 1)");
    }
    global.projection = ProjectionConfig {
        mode,
        condg_budget: ov.condg_budget.unwrap_or(10_000),
        force_iterative: ov.force_iterative,
        initial_rank: ov.initial_rank.unwrap_or(1).max(1),
    };

    let local = LocalConfig {
        theta: global.theta,
        tol_f: global.tol_f,
        max_iters: global.max_iters,
        projection: global.projection,
    };

    let start = resolve_start(&spec, problem.as_ref(), ov)?;

    let meta = RunMeta {
        problem: problem_spec.to_string(),
        method: method_s.to_string(),
        projection: projection_s.to_string(),
        preset: match preset {
            Preset::Box41 => "box41".into(),
            Preset::Spectra42 => "spectra42".into(),
        },
        theta: match global.theta {
            ThetaSchedule::Zero => "zero".into(),
            ThetaSchedule::Constant(t) => format!("const:{t}"),
            ThetaSchedule::Geometric { theta0, rho } => format!("geom:{theta0},{rho}"),
        },
        seed: spec.seed(),
    };

    Ok(RunPlan {
        problem,
        method,
        global,
        local,
        start,
        meta,
    })
}

fn resolve_start(
    spec: &ProblemSpec,
    problem: &dyn NlsProblem,
    ov: &RunOverrides,
) -> Result<Vec<f64>, ConfigError> {
    if let Some(csv) = &ov.start {
        let vals: Result<Vec<f64>, _> = csv.split(',').map(|v| v.trim().parse()).collect();
        let vals = vals.map_err(|_| ConfigError(format!("bad --start vector `{csv}`")))?;
        if vals.len() != problem.var_dim() {
            return bad(format!(
                "--start has {} entries, problem needs {}",
                vals.len(),
                problem.var_dim()
            ));
        }
        return Ok(vals);
    }
    match spec {
        ProblemSpec::Desk(name) => {
            let desk = desk_by_name(name).expect("validated above");
            Ok(desk.recommended_start().to_vec())
        }
        _ => {
            let a = ov.start_a.unwrap_or(0.0);
            if !(0.0..=1.0).contains(&a) {
                return bad("--start-a must lie in [0, 1]");
            }
            let n = match problem.feasible_set() {
                lmproj_core::sets::FeasibleSet::Spectrahedron(s) => s.matrix_dim(),
                _ => return bad("start-a only applies to spectrahedron problems"),
            };
            Ok(lmproj_core::problems::spectra_start(n, a))
        }
    }
}
