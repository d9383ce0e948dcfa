//! Config-driven runner behind the `fvstab` binary.

pub mod csv_out;

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use crate::analysis::{run_refinement_study, LevelResult, RefinementStudy};
use crate::config::{Problem, RunConfig};
use crate::error::{Error, Result};
use crate::sim::{run_1d, run_md};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verb {
    Run,
    Study,
    Check,
}

#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub stride: Option<usize>,
}

/// Process exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_setup_error() {
        EXIT_CONFIG
    } else {
        EXIT_RUNTIME
    }
}

/// Load, apply overrides and validate. Every failure here is a config error.
pub fn load(path: &Path, ov: &Overrides) -> Result<(RunConfig, Problem)> {
    let mut cfg = RunConfig::load(path)?;
    if let Some(out) = &ov.out {
        cfg.output.dir = Some(out.clone());
    }
    if let Some(s) = ov.stride {
        if s == 0 {
            return Err(Error::Config("stride must be positive".into()));
        }
        cfg.output.stride = Some(s);
    }
    let problem = cfg.problem()?;
    Ok((cfg, problem))
}

fn out_dir(cfg: &RunConfig) -> Result<PathBuf> {
    let dir = cfg.output.dir.clone().unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Execute one verb; returns human-readable lines describing what was done.
pub fn execute(verb: Verb, config: &Path, ov: &Overrides) -> Result<Vec<String>> {
    let (cfg, problem) = load(config, ov)?;
    match verb {
        Verb::Check => check(&cfg, &problem),
        Verb::Run => run(&cfg, &problem),
        Verb::Study => study(&cfg),
    }
}

fn check(cfg: &RunConfig, problem: &Problem) -> Result<Vec<String>> {
    let mut lines = vec![format!("config ok: {} dimension(s)", cfg.dim())];
    match problem {
        Problem::OneD(s) => {
            let p = s.params()?;
            lines.push(format!(
                "dt = {}, courant = {}, q = {}, 1 - C_L dt = {}",
                p.dt(),
                p.courant(),
                p.q(),
                1.0 - p.c_l() * p.dt()
            ));
        }
        Problem::MultiD(s) => {
            let dt = s.time_step()?;
            lines.push(format!("dt = {dt}, 1 - C_L dt = {}", 1.0 - s.c_l * dt));
            for (i, c) in s.components.iter().enumerate() {
                let ok = crate::lyapunov::multid_bound_preconditions(&c.weights, &c.speeds, s.c_l).is_ok();
                lines.push(format!(
                    "component {i}: per-direction decay condition {}",
                    if ok { "holds" } else { "fails (no multi-D bounds)" }
                ));
            }
        }
    }
    Ok(lines)
}

fn run(cfg: &RunConfig, problem: &Problem) -> Result<Vec<String>> {
    let dir = out_dir(cfg)?;
    fs::write(dir.join("config.toml"), cfg.to_toml()?)?;
    let stride = cfg.output.stride;
    match problem {
        Problem::OneD(s) => {
            let series = run_1d(s)?;
            let path = dir.join("series.csv");
            csv_out::write_series_1d(create(&path)?, &series, stride)?;
            Ok(vec![format!(
                "{} steps, L(T) = {}, wrote {}",
                series.rows.len() - 1,
                series.last().lyapunov,
                path.display()
            )])
        }
        Problem::MultiD(s) => {
            let series = run_md(s)?;
            let path = dir.join("series.csv");
            csv_out::write_series_md(create(&path)?, &series, stride)?;
            let row_len = s.grid.axis(0).cells();
            for snap in &series.snapshots {
                for c in 0..snap.fields.len() {
                    let p = dir.join(csv_out::snapshot_name(c, snap.n));
                    csv_out::write_snapshot(create(&p)?, snap, c, row_len)?;
                }
            }
            let last = series.rows.last().expect("initial row always present");
            Ok(vec![format!(
                "{} steps, L_hat(T) = {}, {} snapshot(s), wrote {}",
                series.rows.len() - 1,
                last.l_hat,
                series.snapshots.len(),
                path.display()
            )])
        }
    }
}

/// Final-time Lyapunov data of one simulation at the given resolution.
pub fn simulate_level(cfg: &RunConfig, cells: &[usize]) -> Result<LevelResult> {
    match cfg.with_cells(cells).problem()? {
        Problem::OneD(s) => {
            let series = run_1d(&s)?;
            let last = series.last();
            Ok(LevelResult {
                l_final: last.lyapunov,
                t_final: last.t,
                l0_grid: series.rows[0].lyapunov,
                l0_cont: series.lyapunov0_cont,
            })
        }
        Problem::MultiD(s) => {
            let series = run_md(&s)?;
            let last = series.rows.last().expect("initial row always present");
            Ok(LevelResult {
                l_final: last.l_hat,
                t_final: last.t,
                l0_grid: series.rows[0].l_hat,
                l0_cont: series.lyapunov0_cont,
            })
        }
    }
}

/// Run the configured refinement study for every listed viscosity.
pub fn run_studies(cfg: &RunConfig) -> Result<Vec<RefinementStudy>> {
    let study = cfg
        .study
        .as_ref()
        .ok_or_else(|| Error::Config("the study verb needs a [study] section".into()))?;
    let viscosities = if study.viscosities.is_empty() {
        vec![cfg.scheme.viscosity[0]]
    } else {
        study.viscosities.clone()
    };
    // validate every level before simulating any of them
    for v in &viscosities {
        for cells in &study.resolutions {
            cfg.with_viscosity(*v).with_cells(cells).problem()?;
        }
    }
    viscosities
        .iter()
        .map(|v| {
            let c = cfg.with_viscosity(*v);
            run_refinement_study(*v, &study.resolutions, cfg.scheme.decay_constant, |cells| {
                simulate_level(&c, cells)
            })
        })
        .collect()
}

fn study(cfg: &RunConfig) -> Result<Vec<String>> {
    let studies = run_studies(cfg)?;
    let dir = out_dir(cfg)?;
    let path = dir.join("study.csv");
    csv_out::write_study(create(&path)?, &studies)?;
    let mut lines = Vec::new();
    for s in &studies {
        let orders: Vec<String> = s
            .eoc
            .iter()
            .zip(&s.eoc_grid)
            .map(|(p, g)| format!("{} (grid {g:.4})", p.map_or("-".into(), |p| format!("{p:.4}"))))
            .collect();
        lines.push(format!("q = {}: eoc {}", csv_out::viscosity_label(&s.viscosity), orders.join(", ")));
    }
    lines.push(format!("wrote {}", path.display()));
    Ok(lines)
}
