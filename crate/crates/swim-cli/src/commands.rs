//! The four verbs: `run`, `field`, `sweep`, `steady`.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use nalgebra::Vector3;

use swim_core::dynamics::{simulate, IntegratorConfig, Model, RunSpec, Thresholds};
use swim_core::series::{pair_coefficients, steady_state_scan, Q2dAlphaMode};
use swim_core::solver::{assemble_alpha_system, flow_field, isolated_speed, solve_alpha};
use swim_core::Error;

use crate::config::{
    build_medium, build_pair, swimmer_params, AlphaModeKind, MediumKind, ModelKind, RunConfig,
    Scenario,
};
use crate::output::{
    field_csv, num, summary_text, sweep_csv, trajectory_csv, write_file, FieldRow, SweepRow,
};
use crate::CliError;

/// Grid used by the steady-state root scan.
const STEADY_GRID: usize = 1024;

fn model_of(cfg: &RunConfig) -> Model {
    match cfg.model {
        ModelKind::Full => Model::FullSolver,
        ModelKind::Asym => Model::Asymptotic {
            order: cfg.order,
            q2d_alpha: match cfg.q2d_alpha {
                AlphaModeKind::SelfConsistent => Q2dAlphaMode::SelfConsistent,
                AlphaModeKind::BulkClosedForm => Q2dAlphaMode::BulkClosedForm,
            },
        },
    }
}

fn integrator_of(cfg: &RunConfig) -> IntegratorConfig {
    IntegratorConfig {
        dt: cfg.integrator.dt,
        renormalize: true,
        max_disp_frac: cfg.integrator.max_disp_frac,
    }
}

fn thresholds_of(cfg: &RunConfig) -> Thresholds {
    Thresholds {
        d_in: cfg.thresholds.d_in,
        d_off: cfg.thresholds.d_off,
    }
}

pub fn cmd_run(cfg: &RunConfig) -> Result<(), CliError> {
    let pair = build_pair(cfg)?;
    let medium = build_medium(cfg.medium, &cfg.fluid);
    let spec = RunSpec {
        t_max: cfg.integrator.t_max,
        sample_every: cfg.integrator.sample_every,
        t_start: 0.0,
    };
    let (traj, outcome) = simulate(
        &pair,
        &model_of(cfg),
        &medium,
        &integrator_of(cfg),
        &thresholds_of(cfg),
        &spec,
    )?;
    let v0 = isolated_speed(&swimmer_params(&cfg.swimmer)?, &medium)?;
    write_file(&cfg.output.dir, "config.toml", &cfg.to_text())?;
    write_file(&cfg.output.dir, "trajectory.csv", &trajectory_csv(&traj))?;
    write_file(
        &cfg.output.dir,
        "summary.txt",
        &summary_text(&outcome, traj.times.len(), v0),
    )?;
    println!(
        "run: {:?} after {} samples, final separation {}",
        outcome.verdict,
        traj.times.len(),
        num(outcome.final_sep)
    );
    Ok(())
}

pub fn cmd_field(cfg: &RunConfig) -> Result<(), CliError> {
    let pair = build_pair(cfg)?;
    let medium = build_medium(cfg.medium, &cfg.fluid);
    let system = assemble_alpha_system(&pair, &medium)?;
    let solution = solve_alpha(&system, &pair)?;
    let three_d = cfg.medium == MediumKind::Bulk3d;
    let center = pair[0].state.x_c;
    let f = &cfg.field;
    let mut rows = Vec::with_capacity(f.nx * f.ny);
    for iy in 0..f.ny {
        for ix in 0..f.nx {
            let x = center.x + f.x_min + (f.x_max - f.x_min) * ix as f64 / (f.nx - 1) as f64;
            let y = center.y + f.y_min + (f.y_max - f.y_min) * iy as f64 / (f.ny - 1) as f64;
            let probe = Vector3::new(x, y, center.z);
            let velocity = match flow_field(&probe, &pair, &solution, &medium) {
                Ok(u) => Some(u),
                Err(
                    Error::SingularPoint(_) | Error::InsideSphere { .. } | Error::OutOfFilm { .. },
                ) => None,
                Err(e) => return Err(e.into()),
            };
            rows.push(FieldRow {
                x,
                y,
                z: three_d.then_some(center.z),
                velocity,
            });
        }
    }
    let blank = rows.iter().filter(|r| r.velocity.is_none()).count();
    write_file(&cfg.output.dir, "config.toml", &cfg.to_text())?;
    write_file(&cfg.output.dir, "field.csv", &field_csv(&rows, three_d))?;
    println!("field: {} samples, {} singular", rows.len(), blank);
    Ok(())
}

/// Parsed `--sweep key=start:stop:step`.
pub struct SweepSpec {
    pub key: String,
    pub values: Vec<f64>,
}

pub fn parse_sweep(spec: &str) -> Result<SweepSpec, CliError> {
    let bad = || {
        CliError::Config(format!(
            "sweep must look like key=start:stop:step, got '{spec}'"
        ))
    };
    let (key, range) = spec.split_once('=').ok_or_else(bad)?;
    let parts: Vec<&str> = range.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0) || stop < start {
        return Err(CliError::Config(
            "sweep needs a positive step and stop >= start".into(),
        ));
    }
    if !matches!(key, "zeta" | "delta0" | "a0") {
        return Err(CliError::Config(format!(
            "unknown sweep key '{key}'; supported: zeta, delta0, a0"
        )));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    let values = (0..n).map(|i| start + step * i as f64).collect();
    Ok(SweepSpec {
        key: key.to_string(),
        values,
    })
}

fn apply_sweep_value(base: &RunConfig, key: &str, value: f64) -> RunConfig {
    let mut cfg = base.clone();
    match key {
        "zeta" => cfg.swimmer.zeta = value,
        "delta0" => cfg.pose.delta0 = value,
        "a0" => cfg.pose.a0 = value,
        _ => unreachable!("parse_sweep vets the key"),
    }
    cfg
}

fn sweep_one(base: &RunConfig, key: &str, value: f64) -> SweepRow {
    let cfg = apply_sweep_value(base, key, value);
    let fail = |msg: String| SweepRow {
        value,
        verdict: None,
        t_event: None,
        rate: None,
        final_sep: None,
        error: Some(msg),
    };
    let pair = match build_pair(&cfg) {
        Ok(p) => p,
        Err(e) => return fail(e.to_string()),
    };
    let medium = build_medium(cfg.medium, &cfg.fluid);
    let spec = RunSpec {
        t_max: cfg.integrator.t_max,
        sample_every: cfg.integrator.sample_every,
        t_start: 0.0,
    };
    match simulate(
        &pair,
        &model_of(&cfg),
        &medium,
        &integrator_of(&cfg),
        &thresholds_of(&cfg),
        &spec,
    ) {
        Ok((traj, outcome)) => {
            let t0 = traj.times.first().copied().unwrap_or(0.0);
            let t1 = traj.times.last().copied().unwrap_or(0.0);
            let s0 = traj.seps.first().copied().unwrap_or(f64::NAN);
            let rate = (t1 > t0).then(|| (outcome.final_sep - s0) / (t1 - t0));
            SweepRow {
                value,
                verdict: Some(outcome.verdict),
                t_event: outcome.t_event,
                rate,
                final_sep: Some(outcome.final_sep),
                error: None,
            }
        }
        Err(e) => fail(e.to_string()),
    }
}

fn worker_count(rows: usize) -> usize {
    let available = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    let cap = std::env::var("SWIM_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(available);
    cap.min(rows).max(1)
}

pub fn cmd_sweep(cfg: &RunConfig, spec: &SweepSpec) -> Result<(), CliError> {
    let n = spec.values.len();
    let slots: Vec<Mutex<Option<SweepRow>>> = (0..n).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = worker_count(n);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let row = sweep_one(cfg, &spec.key, spec.values[i]);
                *slots[i].lock().unwrap() = Some(row);
            });
        }
    });
    let rows: Vec<SweepRow> = slots
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("every slot is filled"))
        .collect();
    let errors = rows.iter().filter(|r| r.error.is_some()).count();
    write_file(&cfg.output.dir, "config.toml", &cfg.to_text())?;
    write_file(&cfg.output.dir, "sweep.csv", &sweep_csv(&spec.key, &rows))?;
    println!("sweep: {n} rows, {errors} errors");
    Ok(())
}

fn roots_line(label: &str, roots: &[f64]) -> String {
    let body = roots.iter().map(|r| num(*r)).collect::<Vec<_>>().join(" ");
    format!("{label} = {body}")
}

pub fn cmd_steady(cfg: &RunConfig, eps_zero: bool) -> Result<(), CliError> {
    if cfg.scenario != Scenario::Mirror {
        return Err(CliError::Config(format!(
            "steady analysis applies to the mirror scenario, got {}",
            cfg.scenario
        )));
    }
    if cfg.medium != MediumKind::Bulk3d {
        return Err(CliError::Config(
            "steady analysis is available in the bulk medium only".into(),
        ));
    }
    if eps_zero {
        // Vanishing interaction: the turn rate keeps only its leading
        // harmonics and the steady headings sit on the axes.
        let pi = std::f64::consts::PI;
        println!(
            "{}",
            roots_line("rotational_roots", &[-pi / 2.0, 0.0, pi / 2.0, pi])
        );
        println!("{}", roots_line("translational_roots", &[0.0, pi]));
        println!("{}", roots_line("joint_roots", &[]));
        return Ok(());
    }
    let params = swimmer_params(&cfg.swimmer)?;
    let coeffs = pair_coefficients(&params, cfg.fluid.mu)?;
    let eps = 1.0 / cfg.pose.a0;
    let scan = steady_state_scan(&coeffs, eps, STEADY_GRID)?;
    println!("{}", roots_line("rotational_roots", &scan.rotational));
    println!("{}", roots_line("translational_roots", &scan.translational));
    println!("{}", roots_line("joint_roots", &scan.joint));
    if !scan.joint.is_empty() {
        return Err(CliError::Numeric(format!(
            "{} joint steady roots found; a steady pose without drift should not exist",
            scan.joint.len()
        )));
    }
    Ok(())
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidGeometry(_)
            | Error::Ambiguous
            | Error::NonPositiveDiffusion
            | Error::DegenerateAspect => CliError::Config(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}
