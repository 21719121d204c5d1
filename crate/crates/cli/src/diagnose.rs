//! `diagnose`: evaluate the configured diagnostics on a stored trajectory.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use osccomp_core::diagnostics::{
    compensation_ratio, essacc_estimate, global_ratio, interval_decomposition,
    perpendicularity, polyhedral_regions, region_occupation, separation_times,
    value_convergence, Cutoff,
};
use osccomp_core::dynamics::read_csv;
use osccomp_core::funcs::stratum_at;
use osccomp_core::linalg::{dist, norm};
use osccomp_core::measures::{
    centroid_field, circulation, closedness_defect, phase_measure_range, SegmentQuadrature,
};
use osccomp_core::{
    BoundingBox, Checkpoints, FunctionOracle, Grid, SelectionPolicy, Trajectory,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::*;
use crate::error::{CliError, CliResult};
use crate::manifest::{run_dir, Manifest, SUMMARY_FILE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The statistic is undefined on this run, e.g. the trajectory never
    /// entered the cutoff's support.
    Inapplicable,
}

impl Verdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticSummary {
    pub verdict: Verdict,
    pub detail: String,
    /// CSV file next to the manifest.
    pub csv: String,
    /// Key results; non-finite numbers are written as strings.
    pub scalars: BTreeMap<String, Value>,
}

pub type Summary = BTreeMap<String, DiagnosticSummary>;

struct Context<'a> {
    cfg: &'a ExperimentConfig,
    traj: &'a Trajectory,
    oracle: Arc<dyn FunctionOracle>,
}

impl Context<'_> {
    fn dim(&self) -> usize {
        self.traj.dim()
    }

    fn last(&self) -> usize {
        self.traj.last_index()
    }

    fn point_or_origin(&self, p: &Option<Vec<f64>>) -> Vec<f64> {
        p.clone().unwrap_or_else(|| vec![0.0; self.dim()])
    }

    fn grid(&self, bbox: &Option<BoundingBox>, res: usize) -> CliResult<Grid> {
        let b = bbox.clone().unwrap_or_else(|| BoundingBox::default_guard(self.dim()));
        Ok(Grid::new(b, res)?)
    }
}

/// Result of one diagnostic before anything is written.
struct Outcome {
    verdict: Verdict,
    detail: String,
    scalars: BTreeMap<String, Value>,
    csv: String,
}

impl Outcome {
    fn new(verdict: Verdict, detail: impl Into<String>, csv: String) -> Self {
        Self { verdict, detail: detail.into(), scalars: BTreeMap::new(), csv }
    }

    fn scalar(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.scalars.insert(key.into(), v.into());
        self
    }

    fn number(self, key: &str, x: f64) -> Self {
        self.scalar(key, num(x))
    }

    fn maybe(self, key: &str, x: Option<f64>) -> Self {
        match x {
            Some(x) => self.number(key, x),
            None => self,
        }
    }
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

/// Reads a number written by [`num`].
pub fn scalar_value(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

fn e(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(e).unwrap_or_default()
}

fn header(cols: &[&str]) -> String {
    let mut s = cols.join(",");
    s.push('\n');
    s
}

fn indexed(prefix: &str, d: usize) -> Vec<String> {
    (0..d).map(|k| format!("{prefix}{k}")).collect()
}

fn global(ctx: &Context, c: &GlobalConfig) -> CliResult<Outcome> {
    let cps = c.checkpoints.resolve(ctx.last())?;
    let series = global_ratio(ctx.traj, &cps)?;
    let mut csv = header(&["n", "ratio"]);
    for (n, r) in &series {
        writeln!(csv, "{n},{}", e(*r)).unwrap();
    }
    let telescoping = ctx.traj.aggregates().map(|agg| {
        let drift: Vec<f64> =
            ctx.traj.point(0).iter().zip(&agg.next_point).map(|(a, b)| a - b).collect();
        dist(&drift, &agg.weighted_velocity_sum) / norm(&drift).max(f64::MIN_POSITIVE)
    });
    let last = ctx.last();
    if c.compare_from == 0 || c.compare_from >= last {
        return Ok(Outcome::new(
            Verdict::Inapplicable,
            format!("compare_from = {} needs to lie in [1, {last})", c.compare_from),
            csv,
        )
        .maybe("telescoping_error", telescoping));
    }
    let pair = global_ratio(ctx.traj, &Checkpoints::new(vec![c.compare_from, last])?)?;
    let shrink = pair[1].1 / pair[0].1;
    let ok = shrink <= c.max_shrink && telescoping.is_none_or(|t| t <= c.max_telescoping_error);
    let detail = format!(
        "drift ratio {:.3e} at n = {} -> {:.3e} at n = {last} (x{shrink:.3}, limit x{}); telescoping error {}",
        pair[0].1,
        c.compare_from,
        pair[1].1,
        c.max_shrink,
        telescoping.map_or("unavailable".into(), |t| format!("{t:.1e}")),
    );
    Ok(Outcome::new(Verdict::from_bool(ok), detail, csv)
        .number("ratio", pair[1].1)
        .number("shrink", shrink)
        .maybe("telescoping_error", telescoping))
}

fn compensation(ctx: &Context, c: &CompensationConfig) -> CliResult<Outcome> {
    let psi = Cutoff::new(ctx.point_or_origin(&c.center), c.eta, c.delta)?;
    let cps = c.checkpoints.resolve(ctx.last())?;
    let pts = compensation_ratio(ctx.traj, &psi, &cps)?;
    let mut csv = header(&["n", "ratio", "mass"]);
    for p in &pts {
        writeln!(csv, "{},{},{}", p.n, opt(p.ratio), e(p.mass)).unwrap();
    }
    let last = pts.last().expect("checkpoints are nonempty");
    let Some(ratio) = last.ratio else {
        return Ok(Outcome::new(
            Verdict::Inapplicable,
            "the trajectory never entered the support of the cutoff",
            csv,
        )
        .number("mass", last.mass));
    };
    let ok = ratio <= c.max_ratio && last.mass >= c.min_mass;
    let detail = format!(
        "R = {ratio:.3e} (<= {}), M = {:.3} (>= {}) at n = {}",
        c.max_ratio, last.mass, c.min_mass, last.n
    );
    Ok(Outcome::new(Verdict::from_bool(ok), detail, csv).number("ratio", ratio).number("mass", last.mass))
}

fn essacc(ctx: &Context, c: &EssAccConfig) -> CliResult<Outcome> {
    let grid = ctx.grid(&c.grid, c.resolution)?;
    let cps = c.checkpoints.resolve(ctx.last())?;
    let report =
        essacc_estimate(ctx.traj, &grid, &cps, c.tau, Some((ctx.oracle.as_ref(), c.crit_tol)))?;
    let d = ctx.dim();
    let mut cols = vec!["cell".to_string()];
    cols.extend(indexed("center", d));
    cols.extend(["tail_max", "essential", "accumulated"].map(String::from));
    cols.extend(indexed("mean", d));
    cols.extend(["dist_at_center", "dist_at_mean"].map(String::from));
    let mut csv = cols.join(",") + "\n";
    for cell in &report.cells {
        let mut row = vec![cell.cell.to_string()];
        row.extend(cell.center.iter().map(|&x| e(x)));
        row.push(e(cell.tail_max));
        row.push(cell.essential.to_string());
        row.push(cell.accumulated.to_string());
        row.extend(cell.mean_point.iter().map(|&x| e(x)));
        row.push(opt(cell.dist_at_center));
        row.push(opt(cell.dist_at_mean));
        writeln!(csv, "{}", row.join(",")).unwrap();
    }
    let flagged: Vec<_> = report.essential_cells().collect();
    let listing: Vec<Value> = flagged
        .iter()
        .map(|c| json!({ "cell": c.cell, "center": c.center, "dist_at_mean": c.dist_at_mean.map(num) }))
        .collect();
    if flagged.is_empty() {
        return Ok(Outcome::new(Verdict::Inapplicable, format!("no cell keeps a time share above {}", c.tau), csv)
            .scalar("flagged", listing));
    }
    let worst = flagged.iter().filter_map(|c| c.dist_at_mean).fold(0.0, f64::max);
    let ok = worst <= c.max_dist;
    let detail = format!(
        "{} flagged cells, largest distance to criticality at the mean point {worst:.3e} (<= {})",
        flagged.len(),
        c.max_dist
    );
    Ok(Outcome::new(Verdict::from_bool(ok), detail, csv)
        .scalar("flagged_count", flagged.len())
        .number("max_dist", worst)
        .scalar("flagged", listing))
}

fn regions(ctx: &Context, c: &RegionsConfig) -> CliResult<Outcome> {
    let cps = c.checkpoints.resolve(ctx.last())?;
    let Some(poly) = ctx.oracle.as_polyhedral() else {
        let csv = header(&["n", "residual"]);
        return Ok(Outcome::new(Verdict::Inapplicable, "region occupation needs a max-affine function", csv));
    };
    let regions = polyhedral_regions(poly, ctx.cfg.tol_active);
    let pts = region_occupation(ctx.traj, &regions, &cps)?;
    let mut cols = vec!["n".to_string()];
    cols.extend(indexed("lambda", regions.len()));
    cols.push("residual".into());
    let mut csv = cols.join(",") + "\n";
    for p in &pts {
        let lam: Vec<String> = p.fractions.iter().map(|&x| e(x)).collect();
        writeln!(csv, "{},{},{}", p.n, lam.join(","), e(p.residual)).unwrap();
    }
    let last = pts.last().expect("checkpoints are nonempty");
    let ok = last.residual <= c.max_residual;
    let shown: Vec<String> = last.fractions.iter().map(|x| format!("{x:.3}")).collect();
    let detail = format!(
        "lambda = ({}), residual {:.3e} (<= {}) at n = {}",
        shown.join(", "),
        last.residual,
        c.max_residual,
        last.n
    );
    Ok(Outcome::new(Verdict::from_bool(ok), detail, csv)
        .number("residual", last.residual)
        .scalar("lambda", last.fractions.clone()))
}

fn values(ctx: &Context, c: &ValuesConfig) -> CliResult<Outcome> {
    let steps = ctx.traj.len() - 1;
    let csv_head = header(&["window", "oscillation", "limit_estimate"]);
    if steps == 0 {
        return Ok(Outcome::new(Verdict::Inapplicable, "a single stored iterate has no tail", csv_head));
    }
    let window = c.window.min(steps);
    let tail = value_convergence(ctx.traj, window)?;
    let csv = format!("{csv_head}{window},{},{}\n", e(tail.oscillation), e(tail.limit_estimate));
    let ok = tail.oscillation <= c.max_oscillation;
    let detail = format!(
        "f oscillates by {:.3e} (<= {}) over the last {window} stored iterates, mean {:.6e}",
        tail.oscillation, c.max_oscillation, tail.limit_estimate
    );
    Ok(Outcome::new(Verdict::from_bool(ok), detail, csv)
        .number("oscillation", tail.oscillation)
        .number("limit_estimate", tail.limit_estimate)
        .scalar("window", window))
}

fn defect(ctx: &Context, c: &DefectConfig) -> CliResult<Outcome> {
    let cps = c.checkpoints.resolve(ctx.last())?;
    let mut csv = header(&["n", "defect"]);
    let mut series = Vec::with_capacity(cps.len());
    for &n in cps.as_slice() {
        let mu = phase_measure_range(ctx.traj, 0, n)?;
        let d = closedness_defect(&mu, c.degree)?.defect();
        writeln!(csv, "{n},{}", e(d)).unwrap();
        series.push((n, d));
    }
    let (n1, first) = series[0];
    let (n2, last) = *series.last().unwrap();
    if series.len() < 2 {
        return Ok(Outcome::new(Verdict::Inapplicable, "needs at least two checkpoints", csv)
            .number("defect", last));
    }
    let ok = last <= c.max_ratio * first;
    let detail = format!(
        "degree-{} defect {first:.3e} at n = {n1} -> {last:.3e} at n = {n2} (ratio {:.3}, limit {:.3})",
        c.degree,
        last / first,
        c.max_ratio
    );
    Ok(Outcome::new(Verdict::from_bool(ok), detail, csv)
        .number("defect", last)
        .number("ratio", last / first))
}

fn centroid(ctx: &Context, c: &CentroidConfig) -> CliResult<Outcome> {
    let grid = ctx.grid(&c.grid, c.resolution)?;
    let mu = phase_measure_range(ctx.traj, 0, ctx.last())?;
    let field = centroid_field(&mu, &grid)?;
    let mut buf = Vec::new();
    field.write_csv(&mut buf)?;
    let csv = String::from_utf8(buf).expect("CSV output is UTF-8");
    let probe = ctx.point_or_origin(&c.probe);
    let out = |v, d: String| {
        Outcome::new(v, d, csv.clone())
            .maybe("mean_centroid_norm", field.mean_centroid_norm())
            .number("overflow_mass", field.overflow_mass())
    };
    let Some(centroid) = grid.cell_of(&probe).and_then(|cell| field.centroid(cell)) else {
        return Ok(out(Verdict::Inapplicable, format!("the cell containing {probe:?} is never visited")));
    };
    let n = norm(&centroid);
    Ok(out(
        Verdict::from_bool(n <= c.max_norm),
        format!("centroid norm {n:.3e} (<= {}) in the cell containing {probe:?}", c.max_norm),
    )
    .number("probe_centroid_norm", n))
}

fn circulation_diag(ctx: &Context, c: &CirculationConfig) -> CliResult<Outcome> {
    let csv_head = header(&["policy", "integral", "reference", "rel_error"]);
    let upto = ctx.traj.len() - 1;
    if upto == 0 {
        return Ok(Outcome::new(Verdict::Inapplicable, "no segment to integrate over", csv_head));
    }
    let poly = ctx.oracle.as_polyhedral().is_some();
    let quad = match (c.quadrature, poly) {
        (QuadratureKind::Exact, _) | (QuadratureKind::Auto, true) => SegmentQuadrature::Exact,
        _ => SegmentQuadrature::Midpoint(c.points),
    };
    let tol = c.max_rel_error.unwrap_or(match quad {
        SegmentQuadrature::Exact => 1e-10,
        SegmentQuadrature::Midpoint(_) => 1e-3,
    });
    let mut csv = csv_head;
    let mut results = Vec::new();
    for &kind in &c.policies {
        let r = circulation(
            ctx.oracle.as_ref(),
            ctx.traj,
            upto,
            SelectionPolicy::new(kind, c.seed),
            quad,
            ctx.cfg.tol_active,
        )?;
        writeln!(csv, "{},{},{},{}", kind.as_str(), e(r.integral), e(r.reference), e(r.rel_error()))
            .unwrap();
        results.push(r);
    }
    let scale = results[0].reference.abs().max(f64::MIN_POSITIVE);
    let worst = results.iter().map(|r| r.rel_error()).fold(0.0, f64::max);
    let lo = results.iter().map(|r| r.integral).fold(f64::INFINITY, f64::min);
    let hi = results.iter().map(|r| r.integral).fold(f64::NEG_INFINITY, f64::max);
    let spread = (hi - lo) / scale;
    let ok = worst <= tol && spread <= tol;
    let label = match quad {
        SegmentQuadrature::Exact => "exact".to_string(),
        SegmentQuadrature::Midpoint(m) => format!("midpoint({m})"),
    };
    let detail = format!(
        "{label} quadrature, {} policies: largest relative error {worst:.1e}, spread {spread:.1e} (<= {tol:.0e})",
        results.len()
    );
    Ok(Outcome::new(Verdict::from_bool(ok), detail, csv)
        .number("max_rel_error", worst)
        .number("spread", spread)
        .number("reference", results[0].reference))
}

fn intervals(ctx: &Context, c: &IntervalsConfig) -> CliResult<Outcome> {
    let center = ctx.point_or_origin(&c.center);
    let d = interval_decomposition(ctx.traj, &center, c.eta, c.delta)?;
    let mut csv = header(&["start", "end", "time", "drift", "open_ended"]);
    for i in &d.intervals {
        writeln!(csv, "{},{},{},{},{}", i.start, i.end, e(i.time), e(norm(&i.weighted_velocity)), i.open_ended)
            .unwrap();
    }
    let Some(stat) = d.statistic else {
        return Ok(Outcome::new(Verdict::Inapplicable, "the trajectory never entered the inner ball", csv)
            .scalar("count", 0));
    };
    let growth = match (d.intervals.first(), d.intervals.last()) {
        (Some(a), Some(b)) if d.intervals.len() >= 2 => Some(b.time / a.time),
        _ => None,
    };
    let mut ok = stat <= c.max_statistic;
    let mut detail = format!("{} intervals, statistic {stat:.3e} (<= {})", d.intervals.len(), c.max_statistic);
    if let Some(min) = c.min_growth {
        match growth {
            Some(g) => {
                ok &= g >= min;
                write!(detail, ", growth x{g:.3} (>= {min})").unwrap();
            }
            None => {
                return Ok(Outcome::new(
                    Verdict::Inapplicable,
                    format!("{detail}; growth needs at least two intervals"),
                    csv,
                )
                .number("statistic", stat)
                .scalar("count", d.intervals.len()));
            }
        }
    }
    Ok(Outcome::new(Verdict::from_bool(ok), detail, csv)
        .number("statistic", stat)
        .scalar("count", d.intervals.len())
        .maybe("growth", growth))
}

fn separation(ctx: &Context, c: &SeparationConfig) -> CliResult<Outcome> {
    let js = c.starts.resolve(ctx.last())?;
    let ts = separation_times(ctx.traj, &c.from, &c.to, js.as_slice())?;
    let mut csv = header(&["j", "separation_time"]);
    for (j, t) in js.as_slice().iter().zip(&ts) {
        writeln!(csv, "{j},{}", e(*t)).unwrap();
    }
    let (first, last) = (ts[0], *ts.last().unwrap());
    if !first.is_finite() {
        return Ok(Outcome::new(Verdict::Inapplicable, "no transition between the balls was recorded", csv));
    }
    let trend = last / first;
    let ok = trend >= c.min_growth;
    let detail = format!(
        "T = {first:.3e} at j = {} -> {last:.3e} at j = {} (x{trend:.3}, >= {})",
        js.as_slice()[0],
        js.last(),
        c.min_growth
    );
    Ok(Outcome::new(Verdict::from_bool(ok), detail, csv)
        .number("first", first)
        .number("last", last)
        .number("trend", trend))
}

fn perpendicular(ctx: &Context, c: &PerpendicularityConfig) -> CliResult<Outcome> {
    let center = ctx.point_or_origin(&c.center);
    let csv_head = header(&["stratum_dim", "samples", "max", "mean"]);
    let tangents = match &c.tangents {
        Some(t) => t.clone(),
        None => match stratum_at(ctx.oracle.as_ref(), &center, ctx.cfg.tol_active) {
            Some(s) => s.tangents.clone(),
            None => {
                return Ok(Outcome::new(
                    Verdict::Inapplicable,
                    format!("no declared stratum contains {center:?} and no tangents are given"),
                    csv_head,
                ))
            }
        },
    };
    let r = perpendicularity(ctx.traj, &center, c.radius, &tangents, c.tail_fraction, c.min_velocity_norm)?;
    let csv = format!("{csv_head}{},{},{},{}\n", tangents.len(), r.samples, opt(r.max), opt(r.mean));
    let Some(max) = r.max else {
        return Ok(Outcome::new(Verdict::Inapplicable, "no tail iterate qualifies", csv).scalar("samples", 0));
    };
    let detail = format!(
        "max |w.v| = {max:.3e} (<= {}) over {} iterates, {} tangent directions",
        c.max_component,
        r.samples,
        tangents.len()
    );
    Ok(Outcome::new(Verdict::from_bool(max <= c.max_component), detail, csv)
        .number("max", max)
        .scalar("samples", r.samples)
        .scalar("stratum_dim", tangents.len()))
}

/// The diagnostics to evaluate with their parameters: the `--only` names, or
/// everything configured, or every diagnostic that needs no extra
/// parameters when nothing is configured.
pub fn selection(cfg: &DiagnosticsConfig, only: Option<&[String]>) -> CliResult<DiagnosticsConfig> {
    let names: Vec<String> = match only {
        Some(list) => list.to_vec(),
        None if !cfg.is_empty() => return Ok(cfg.clone()),
        None => DIAGNOSTIC_NAMES.iter().filter(|&&n| n != "separation").map(|n| n.to_string()).collect(),
    };
    let mut out = DiagnosticsConfig::default();
    for name in &names {
        match name.as_str() {
            "global" => out.global = Some(cfg.global.clone().unwrap_or_default()),
            "compensation" => out.compensation = Some(cfg.compensation.clone().unwrap_or_default()),
            "essacc" => out.essacc = Some(cfg.essacc.clone().unwrap_or_default()),
            "regions" => out.regions = Some(cfg.regions.clone().unwrap_or_default()),
            "values" => out.values = Some(cfg.values.clone().unwrap_or_default()),
            "defect" => out.defect = Some(cfg.defect.clone().unwrap_or_default()),
            "centroid" => out.centroid = Some(cfg.centroid.clone().unwrap_or_default()),
            "circulation" => out.circulation = Some(cfg.circulation.clone().unwrap_or_default()),
            "intervals" => out.intervals = Some(cfg.intervals.clone().unwrap_or_default()),
            "perpendicularity" => {
                out.perpendicularity = Some(cfg.perpendicularity.clone().unwrap_or_default())
            }
            "separation" => {
                out.separation = Some(cfg.separation.clone().ok_or_else(|| {
                    CliError::usage("diagnostics.separation: needs `from` and `to` balls in the config")
                })?)
            }
            other => {
                return Err(CliError::usage(format!(
                    "unknown diagnostic `{other}`; expected one of {}",
                    DIAGNOSTIC_NAMES.join(", ")
                )))
            }
        }
    }
    Ok(out)
}

fn evaluate(ctx: &Context, sel: &DiagnosticsConfig, name: &str) -> CliResult<Outcome> {
    let r = match name {
        "global" => global(ctx, sel.global.as_ref().unwrap()),
        "compensation" => compensation(ctx, sel.compensation.as_ref().unwrap()),
        "essacc" => essacc(ctx, sel.essacc.as_ref().unwrap()),
        "regions" => regions(ctx, sel.regions.as_ref().unwrap()),
        "values" => values(ctx, sel.values.as_ref().unwrap()),
        "defect" => defect(ctx, sel.defect.as_ref().unwrap()),
        "centroid" => centroid(ctx, sel.centroid.as_ref().unwrap()),
        "circulation" => circulation_diag(ctx, sel.circulation.as_ref().unwrap()),
        "intervals" => intervals(ctx, sel.intervals.as_ref().unwrap()),
        "separation" => separation(ctx, sel.separation.as_ref().unwrap()),
        "perpendicularity" => perpendicular(ctx, sel.perpendicularity.as_ref().unwrap()),
        _ => unreachable!("names come from DIAGNOSTIC_NAMES"),
    };
    r.map_err(|e| e.context(format!("diagnostics.{name}")))
}

/// Loads the stored trajectory of a manifest, with the run's exact
/// aggregates attached.
pub fn load_trajectory(manifest: &Manifest, dir: &Path) -> CliResult<Trajectory> {
    let path = manifest.artifact(dir, "trajectory").ok_or_else(|| {
        CliError::usage(format!("run `{}` has no stored trajectory", manifest.config.name))
    })?;
    let file = File::open(&path).map_err(|e| CliError::io(&path, e))?;
    let traj = read_csv(BufReader::new(file)).map_err(|e| CliError::io(&path, e))?;
    Ok(match &manifest.aggregates {
        Some(a) => traj.with_aggregates(a.clone()),
        None => traj,
    })
}

pub fn summary_path(manifest_path: &Path) -> PathBuf {
    run_dir(manifest_path).join(SUMMARY_FILE)
}

pub fn load_summary(path: &Path) -> CliResult<Summary> {
    if !path.exists() {
        return Ok(Summary::new());
    }
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::io(path, e))
}

/// Diagnostics that completed, and the first failure in canonical order.
pub struct DiagnoseOutcome {
    pub summary: Summary,
    pub error: Option<CliError>,
}

/// Runs the selected diagnostics on the run behind `manifest_path`, writes
/// `<name>.csv` and merges the results into the run's summary.
pub fn diagnose(manifest_path: &Path, only: Option<&[String]>, jobs: usize) -> CliResult<DiagnoseOutcome> {
    let mut manifest = Manifest::load(manifest_path)?;
    let dir = run_dir(manifest_path);
    let sel = selection(&manifest.config.diagnostics, only)?;
    let traj = load_trajectory(&manifest, &dir)?;
    let ctx = Context { cfg: &manifest.config, traj: &traj, oracle: manifest.config.oracle()? };

    let names = sel.enabled();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::usage(format!("cannot start {jobs} workers: {e}")))?;
    let results: Vec<CliResult<Outcome>> =
        pool.install(|| names.par_iter().map(|n| evaluate(&ctx, &sel, n)).collect());

    let spath = summary_path(manifest_path);
    let mut summary = load_summary(&spath)?;
    let mut fresh = Summary::new();
    let mut error = None;
    for (name, r) in names.iter().zip(results) {
        match r {
            Ok(o) => {
                let file = format!("{name}.csv");
                let path = dir.join(&file);
                std::fs::write(&path, &o.csv).map_err(|e| CliError::io(&path, e))?;
                manifest.artifacts.insert(format!("diagnostics.{name}"), file.clone());
                let s = DiagnosticSummary { verdict: o.verdict, detail: o.detail, csv: file, scalars: o.scalars };
                summary.insert(name.to_string(), s.clone());
                fresh.insert(name.to_string(), s);
            }
            Err(e) => {
                error.get_or_insert(e);
            }
        }
    }
    let mut text = serde_json::to_string_pretty(&summary).expect("summaries serialize");
    text.push('\n');
    std::fs::write(&spath, text).map_err(|e| CliError::io(&spath, e))?;
    manifest.artifacts.insert("summary".into(), SUMMARY_FILE.into());
    manifest.save(manifest_path)?;
    Ok(DiagnoseOutcome { summary: fresh, error })
}
