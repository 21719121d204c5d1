//! Experiment configuration, read from and written to TOML.

use std::path::Path;
use std::sync::Arc;

use osccomp_core::diagnostics::{DEFAULT_CRIT_TOL, DEFAULT_TAU};
use osccomp_core::linalg::{dist, norm};
use osccomp_core::measures::DEFAULT_RESOLUTION;
use osccomp_core::{
    AffinePiece, Ball, BoundingBox, Builtin, Checkpoints, FunctionOracle, PolyhedralFunction,
    SelectionKind, SelectionPolicy, StepSchedule, DEFAULT_TOL_ACTIVE,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    /// Number of steps `N`; the run records `x_0, ..., x_N`.
    pub n: usize,
    pub x0: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_policy")]
    pub policy: SelectionKind,
    #[serde(default = "default_tol_active")]
    pub tol_active: f64,
    /// Store every `thin`-th iterate; `0` picks a stride automatically.
    #[serde(default)]
    pub thin: usize,
    #[serde(default)]
    pub guard: GuardSpec,
    pub function: FunctionSpec,
    pub schedule: StepSchedule,
    #[serde(default, skip_serializing_if = "DiagnosticsConfig::is_empty")]
    pub diagnostics: DiagnosticsConfig,
}

fn default_policy() -> SelectionKind {
    SelectionKind::FirstActive
}

fn default_tol_active() -> f64 {
    DEFAULT_TOL_ACTIVE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FunctionSpec {
    Builtin { name: Builtin },
    /// `max_j (gradient_j . x + offset_j)`
    MaxAffine { pieces: Vec<AffinePiece> },
}

/// `"default"` for `[-10, 10]^n`, `"none"`, or an explicit `{ lo, hi }` box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GuardSpec {
    Keyword(GuardKeyword),
    Box(BoundingBox),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GuardKeyword {
    Default,
    None,
}

impl Default for GuardSpec {
    fn default() -> Self {
        GuardSpec::Keyword(GuardKeyword::Default)
    }
}

impl GuardSpec {
    pub fn resolve(&self, dim: usize) -> Option<BoundingBox> {
        match self {
            GuardSpec::Keyword(GuardKeyword::Default) => Some(BoundingBox::default_guard(dim)),
            GuardSpec::Keyword(GuardKeyword::None) => None,
            GuardSpec::Box(b) => Some(b.clone()),
        }
    }
}

/// Explicit checkpoint indices, or the geometric sequence
/// `round(10^(k/4))` restricted to indices `>= from`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CheckpointSpec {
    List(Vec<usize>),
    Geometric { from: usize },
}

impl Default for CheckpointSpec {
    fn default() -> Self {
        CheckpointSpec::Geometric { from: 1 }
    }
}

impl CheckpointSpec {
    pub fn resolve(&self, last_index: usize) -> CliResult<Checkpoints> {
        match self {
            CheckpointSpec::List(v) => {
                let c = Checkpoints::new(v.clone())?;
                c.check_within(last_index)?;
                Ok(c)
            }
            CheckpointSpec::Geometric { from } => Ok(Checkpoints::geometric_from(*from, last_index)),
        }
    }

    fn validate(&self, n: usize) -> Result<(), String> {
        match self {
            CheckpointSpec::List(v) => {
                Checkpoints::new(v.clone()).map_err(|e| e.to_string())?;
                if v.last().is_some_and(|&l| l > n) {
                    return Err(format!("checkpoint {} exceeds n = {n}", v.last().unwrap()));
                }
                Ok(())
            }
            CheckpointSpec::Geometric { .. } => Ok(()),
        }
    }
}

/// Parameters and pass thresholds of every diagnostic the config enables.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub global: Option<GlobalConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compensation: Option<CompensationConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub essacc: Option<EssAccConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regions: Option<RegionsConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<ValuesConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub defect: Option<DefectConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub centroid: Option<CentroidConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circulation: Option<CirculationConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intervals: Option<IntervalsConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separation: Option<SeparationConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perpendicularity: Option<PerpendicularityConfig>,
}

pub const DIAGNOSTIC_NAMES: [&str; 11] = [
    "global",
    "compensation",
    "essacc",
    "regions",
    "values",
    "defect",
    "centroid",
    "circulation",
    "intervals",
    "separation",
    "perpendicularity",
];

impl DiagnosticsConfig {
    pub fn is_empty(&self) -> bool {
        self.enabled().is_empty()
    }

    /// Names of the configured diagnostics, in canonical order.
    pub fn enabled(&self) -> Vec<&'static str> {
        let on = [
            self.global.is_some(),
            self.compensation.is_some(),
            self.essacc.is_some(),
            self.regions.is_some(),
            self.values.is_some(),
            self.defect.is_some(),
            self.centroid.is_some(),
            self.circulation.is_some(),
            self.intervals.is_some(),
            self.separation.is_some(),
            self.perpendicularity.is_some(),
        ];
        DIAGNOSTIC_NAMES.iter().zip(on).filter(|(_, on)| *on).map(|(n, _)| *n).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GlobalConfig {
    pub checkpoints: CheckpointSpec,
    /// The drift ratio at the last checkpoint is compared with the one at
    /// this index.
    pub compare_from: usize,
    pub max_shrink: f64,
    pub max_telescoping_error: f64,
}

impl Default for GlobalConfig {
    fn default() -> Self {
        Self {
            checkpoints: CheckpointSpec::default(),
            compare_from: 1000,
            max_shrink: 0.1,
            max_telescoping_error: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompensationConfig {
    /// Defaults to the origin.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    pub eta: f64,
    pub delta: f64,
    pub checkpoints: CheckpointSpec,
    pub max_ratio: f64,
    pub min_mass: f64,
}

impl Default for CompensationConfig {
    fn default() -> Self {
        Self {
            center: None,
            eta: 0.05,
            delta: 0.1,
            checkpoints: CheckpointSpec::default(),
            max_ratio: 0.1,
            min_mass: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EssAccConfig {
    /// Defaults to `[-10, 10]^n`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<BoundingBox>,
    pub resolution: usize,
    pub tau: f64,
    pub crit_tol: f64,
    pub checkpoints: CheckpointSpec,
    pub max_dist: f64,
}

impl Default for EssAccConfig {
    fn default() -> Self {
        Self {
            grid: None,
            resolution: DEFAULT_RESOLUTION,
            tau: DEFAULT_TAU,
            crit_tol: DEFAULT_CRIT_TOL,
            checkpoints: CheckpointSpec::default(),
            max_dist: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegionsConfig {
    pub checkpoints: CheckpointSpec,
    pub max_residual: f64,
}

impl Default for RegionsConfig {
    fn default() -> Self {
        Self { checkpoints: CheckpointSpec::default(), max_residual: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValuesConfig {
    /// Clamped to the number of recorded steps.
    pub window: usize,
    pub max_oscillation: f64,
}

impl Default for ValuesConfig {
    fn default() -> Self {
        Self { window: 10_000, max_oscillation: 0.01 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DefectConfig {
    pub degree: u32,
    pub checkpoints: CheckpointSpec,
    /// Pass when the last defect is at most this multiple of the first.
    pub max_ratio: f64,
}

impl Default for DefectConfig {
    fn default() -> Self {
        Self { degree: 2, checkpoints: CheckpointSpec::Geometric { from: 10_000 }, max_ratio: 1.0 / 3.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CentroidConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<BoundingBox>,
    pub resolution: usize,
    /// The verdict looks at the cell containing this point; defaults to the
    /// origin.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe: Option<Vec<f64>>,
    pub max_norm: f64,
}

impl Default for CentroidConfig {
    fn default() -> Self {
        Self { grid: None, resolution: DEFAULT_RESOLUTION, probe: None, max_norm: 0.05 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureKind {
    /// Exact splitting on polyhedral functions, midpoints elsewhere.
    Auto,
    Exact,
    Midpoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CirculationConfig {
    pub quadrature: QuadratureKind,
    /// Interior points per segment for midpoint quadrature.
    pub points: usize,
    pub policies: Vec<SelectionKind>,
    pub seed: u64,
    /// Defaults to 1e-10 with exact quadrature and 1e-3 otherwise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_rel_error: Option<f64>,
}

impl Default for CirculationConfig {
    fn default() -> Self {
        Self {
            quadrature: QuadratureKind::Auto,
            points: 4,
            policies: SelectionKind::ALL.to_vec(),
            seed: 0,
            max_rel_error: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntervalsConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    pub eta: f64,
    pub delta: f64,
    /// Bound on `||sum_A eps_i v_i|| / sum_A eps_i` over the intervals.
    pub max_statistic: f64,
    /// If set, the last interval must also last this many times longer than
    /// the first.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_growth: Option<f64>,
}

impl Default for IntervalsConfig {
    fn default() -> Self {
        Self { center: None, eta: 0.05, delta: 0.2, max_statistic: 0.1, min_growth: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeparationConfig {
    pub from: Ball,
    pub to: Ball,
    /// Start indices `j`.
    #[serde(default)]
    pub starts: CheckpointSpec,
    /// Pass when no transition starts at the last `j`, or when `T_j` there is
    /// at least this multiple of `T_j` at the first.
    #[serde(default = "default_min_growth")]
    pub min_growth: f64,
}

fn default_min_growth() -> f64 {
    3.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerpendicularityConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    pub radius: f64,
    /// Unit tangent vectors; defaults to the declared stratum at `center`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tangents: Option<Vec<Vec<f64>>>,
    pub tail_fraction: f64,
    pub min_velocity_norm: f64,
    pub max_component: f64,
}

impl Default for PerpendicularityConfig {
    fn default() -> Self {
        Self {
            center: None,
            radius: 0.1,
            tangents: None,
            tail_fraction: 0.5,
            min_velocity_norm: 0.5,
            max_component: 0.1,
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::usage(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| e.context(path.display()))
    }

    pub fn emit(&self) -> String {
        toml::to_string(self).expect("configs serialize to TOML")
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    pub fn policy(&self) -> SelectionPolicy {
        SelectionPolicy::new(self.policy, self.seed)
    }

    pub fn oracle(&self) -> CliResult<Arc<dyn FunctionOracle>> {
        Ok(match &self.function {
            FunctionSpec::Builtin { name } => name.oracle(),
            FunctionSpec::MaxAffine { pieces } => {
                Arc::new(PolyhedralFunction::new(pieces.clone())?.with_name(self.name.clone()))
            }
        })
    }

    pub fn function_name(&self) -> String {
        match &self.function {
            FunctionSpec::Builtin { name } => name.to_string(),
            FunctionSpec::MaxAffine { .. } => "max-affine".into(),
        }
    }

    /// Checks everything that can be checked without running.
    pub fn validate(&self) -> CliResult<()> {
        let fail = |what: &str, msg: String| Err(CliError::usage(format!("{what}: {msg}")));
        if self.name.is_empty()
            || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c))
        {
            return fail("name", "use letters, digits, `-`, `_` and `.` only".into());
        }
        if self.n == 0 {
            return fail("n", "must be at least 1".into());
        }
        if self.seed > i64::MAX as u64 {
            return fail("seed", "must be at most 2^63 - 1".into());
        }
        if !(self.tol_active >= 0.0 && self.tol_active.is_finite()) {
            return fail("tol_active", "must be finite and nonnegative".into());
        }
        if let Err(e) = self.schedule.validate() {
            return fail("schedule", e.to_string());
        }
        let oracle = self.oracle().map_err(|e| e.context("function"))?;
        let dim = oracle.dimension();
        if self.x0.len() != dim {
            return fail("x0", format!("has {} coordinates, the function needs {dim}", self.x0.len()));
        }
        if self.x0.iter().any(|c| !c.is_finite()) {
            return fail("x0", "must be finite".into());
        }
        if let GuardSpec::Box(b) = &self.guard {
            if let Err(e) = BoundingBox::new(b.lo.clone(), b.hi.clone()) {
                return fail("guard", e.to_string());
            }
            if b.dim() != dim {
                return fail("guard", format!("has dimension {}, expected {dim}", b.dim()));
            }
        }
        self.validate_diagnostics(dim)
    }

    fn validate_diagnostics(&self, dim: usize) -> CliResult<()> {
        let d = &self.diagnostics;
        let n = self.n;
        let err = |name: &str, msg: String| CliError::usage(format!("diagnostics.{name}: {msg}"));
        let point = |name: &str, p: &Option<Vec<f64>>| -> CliResult<()> {
            match p {
                Some(c) if c.len() != dim => {
                    Err(err(name, format!("point has {} coordinates, expected {dim}", c.len())))
                }
                Some(c) if c.iter().any(|x| !x.is_finite()) => Err(err(name, "point must be finite".into())),
                _ => Ok(()),
            }
        };
        let grid = |name: &str, g: &Option<BoundingBox>, res: usize| -> CliResult<()> {
            if let Some(b) = g {
                BoundingBox::new(b.lo.clone(), b.hi.clone()).map_err(|e| err(name, e.to_string()))?;
                if b.dim() != dim {
                    return Err(err(name, format!("grid has dimension {}, expected {dim}", b.dim())));
                }
            }
            if res == 0 {
                return Err(err(name, "resolution must be positive".into()));
            }
            Ok(())
        };
        let checkpoints =
            |name: &str, c: &CheckpointSpec| c.validate(n).map_err(|m| err(name, m));
        let radii = |name: &str, eta: f64, delta: f64| -> CliResult<()> {
            if !(eta > 0.0 && delta > eta && delta.is_finite()) {
                return Err(err(name, format!("need 0 < eta < delta, got eta = {eta}, delta = {delta}")));
            }
            Ok(())
        };

        if let Some(c) = &d.global {
            checkpoints("global", &c.checkpoints)?;
        }
        if let Some(c) = &d.compensation {
            point("compensation", &c.center)?;
            radii("compensation", c.eta, c.delta)?;
            checkpoints("compensation", &c.checkpoints)?;
        }
        if let Some(c) = &d.essacc {
            grid("essacc", &c.grid, c.resolution)?;
            if !(c.tau > 0.0 && c.tau < 1.0) {
                return Err(err("essacc", format!("tau must lie in (0, 1), got {}", c.tau)));
            }
            if !(c.crit_tol >= 0.0) {
                return Err(err("essacc", "crit_tol must be nonnegative".into()));
            }
            checkpoints("essacc", &c.checkpoints)?;
        }
        if let Some(c) = &d.regions {
            checkpoints("regions", &c.checkpoints)?;
        }
        if let Some(c) = &d.values {
            if c.window == 0 {
                return Err(err("values", "window must be positive".into()));
            }
        }
        if let Some(c) = &d.defect {
            if c.degree == 0 {
                return Err(err("defect", "degree must be positive".into()));
            }
            checkpoints("defect", &c.checkpoints)?;
        }
        if let Some(c) = &d.centroid {
            grid("centroid", &c.grid, c.resolution)?;
            point("centroid", &c.probe)?;
        }
        if let Some(c) = &d.circulation {
            if c.points == 0 {
                return Err(err("circulation", "points must be positive".into()));
            }
            if c.policies.is_empty() {
                return Err(err("circulation", "at least one policy is needed".into()));
            }
            if c.seed > i64::MAX as u64 {
                return Err(err("circulation", "seed must be at most 2^63 - 1".into()));
            }
        }
        if let Some(c) = &d.intervals {
            point("intervals", &c.center)?;
            radii("intervals", c.eta, c.delta)?;
        }
        if let Some(c) = &d.separation {
            for (which, b) in [("from", &c.from), ("to", &c.to)] {
                if b.center.len() != dim {
                    return Err(err("separation", format!("ball `{which}` has dimension {}, expected {dim}", b.center.len())));
                }
                if !(b.radius > 0.0 && b.radius.is_finite()) {
                    return Err(err("separation", format!("ball `{which}` needs a positive radius")));
                }
            }
            if !c.from.is_separated_from(&c.to) {
                return Err(err(
                    "separation",
                    format!(
                        "balls overlap: centre distance {} <= radii sum {}",
                        dist(&c.from.center, &c.to.center),
                        c.from.radius + c.to.radius
                    ),
                ));
            }
            checkpoints("separation", &c.starts)?;
        }
        if let Some(c) = &d.perpendicularity {
            point("perpendicularity", &c.center)?;
            if !(c.radius > 0.0) {
                return Err(err("perpendicularity", "radius must be positive".into()));
            }
            if !(c.tail_fraction > 0.0 && c.tail_fraction <= 1.0) {
                return Err(err("perpendicularity", "tail_fraction must lie in (0, 1]".into()));
            }
            for w in c.tangents.iter().flatten() {
                if w.len() != dim || (norm(w) - 1.0).abs() > 1e-9 {
                    return Err(err("perpendicularity", format!("tangent {w:?} is not a unit vector in R^{dim}")));
                }
            }
        }
        Ok(())
    }
}
