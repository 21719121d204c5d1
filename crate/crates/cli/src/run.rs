//! `run`: simulate configured experiments and persist their trajectories.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use osccomp_core::dynamics::write_csv;
use osccomp_core::{run, Divergence, RunOptions, VERSION};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::{exit, CliError, CliResult};
use crate::manifest::{Manifest, CONFIG_FILE, MANIFEST_FILE, TRAJECTORY_FILE};

/// Outcome of one configured run whose manifest was written.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub manifest_path: PathBuf,
    pub manifest: Manifest,
}

impl RunOutcome {
    pub fn exit_code(&self) -> u8 {
        if self.manifest.diverged {
            exit::DIVERGED
        } else {
            exit::OK
        }
    }
}

/// Runs one experiment into `<out>/<name>/`.
pub fn run_experiment(cfg: &ExperimentConfig, out: &Path) -> CliResult<RunOutcome> {
    let dir = out.join(&cfg.name);
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let cfg_path = dir.join(CONFIG_FILE);
    std::fs::write(&cfg_path, cfg.emit()).map_err(|e| CliError::io(&cfg_path, e))?;
    let traj_path = dir.join(TRAJECTORY_FILE);
    if traj_path.exists() {
        std::fs::remove_file(&traj_path).map_err(|e| CliError::io(&traj_path, e))?;
    }

    let mut artifacts = BTreeMap::from([("config".to_string(), CONFIG_FILE.to_string())]);
    let guard = cfg.guard.resolve(cfg.dim());
    let started = Instant::now();
    let manifest = if guard.as_ref().is_some_and(|g| !g.contains(&cfg.x0)) {
        // Nothing can be computed from a start outside the guard.
        Manifest {
            config: cfg.clone(),
            library_version: VERSION.to_string(),
            wall_clock_seconds: started.elapsed().as_secs_f64(),
            rows: 0,
            thin: 0,
            diverged: true,
            divergence: Some(Divergence { index: 0, point: cfg.x0.clone() }),
            aggregates: None,
            artifacts,
        }
    } else {
        let oracle = cfg.oracle()?;
        let opts = RunOptions { guard_box: guard, thin: cfg.thin, tol_active: cfg.tol_active };
        let traj = run(oracle.as_ref(), &cfg.x0, cfg.schedule, cfg.policy(), cfg.n, &opts)
            .map_err(|e| CliError::from(e).context(&cfg.name))?;
        let wall = started.elapsed().as_secs_f64();
        let file = File::create(&traj_path).map_err(|e| CliError::io(&traj_path, e))?;
        write_csv(&traj, BufWriter::new(file)).map_err(|e| CliError::io(&traj_path, e))?;
        artifacts.insert("trajectory".into(), TRAJECTORY_FILE.into());
        Manifest {
            config: cfg.clone(),
            library_version: VERSION.to_string(),
            wall_clock_seconds: wall,
            rows: traj.len(),
            thin: traj.thin(),
            diverged: traj.diverged(),
            divergence: traj.divergence().cloned(),
            aggregates: traj.aggregates().cloned(),
            artifacts,
        }
    };
    let manifest_path = dir.join(MANIFEST_FILE);
    manifest.save(&manifest_path)?;
    Ok(RunOutcome { manifest_path, manifest })
}

/// Loads every config, then runs them on `jobs` workers (`0` for all cores).
///
/// Results come back in input order. Loading stops at the first invalid
/// config so that nothing runs on a partially valid batch.
pub fn run_all(
    paths: &[PathBuf],
    out: &Path,
    jobs: usize,
    thin: Option<usize>,
) -> CliResult<Vec<CliResult<RunOutcome>>> {
    if paths.is_empty() {
        return Err(CliError::usage("no config given"));
    }
    let mut configs = Vec::with_capacity(paths.len());
    let mut names = BTreeSet::new();
    for p in paths {
        let mut cfg = ExperimentConfig::load(p)?;
        if let Some(k) = thin {
            cfg.thin = k;
        }
        if !names.insert(cfg.name.clone()) {
            return Err(CliError::usage(format!(
                "{}: another config in this batch is also named `{}`",
                p.display(),
                cfg.name
            )));
        }
        configs.push(cfg);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::usage(format!("cannot start {jobs} workers: {e}")))?;
    Ok(pool.install(|| configs.par_iter().map(|c| run_experiment(c, out)).collect()))
}
