//! File writers. All numbers are printed with 17 significant digits so
//! that repeated runs produce byte-identical files and parsing them back
//! recovers the exact binary values.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use swim_core::dynamics::{EncounterOutcome, Trajectory, Verdict};

use crate::CliError;

/// Canonical float formatting: scientific, 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::SwimIn => "swim_in",
        Verdict::SwimOff => "swim_off",
        Verdict::Undecided => "undecided",
    }
}

/// Quotes a CSV cell if it contains a delimiter, quote, or newline.
fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub const TRAJECTORY_HEADER: &str = "t,x1,y1,theta1,x2,y2,theta2,sep";

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::with_capacity(64 * traj.times.len());
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for ((t, states), sep) in traj.times.iter().zip(&traj.states).zip(&traj.seps) {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            num(*t),
            num(states[0].x_c.x),
            num(states[0].x_c.y),
            num(states[0].angle()),
            num(states[1].x_c.x),
            num(states[1].x_c.y),
            num(states[1].angle()),
            num(*sep),
        );
    }
    out
}

pub fn summary_text(out: &EncounterOutcome, samples: usize, v0: f64) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "verdict = {}", verdict_name(out.verdict));
    match out.t_event {
        Some(t) => {
            let _ = writeln!(s, "t_event = {}", num(t));
        }
        None => {
            let _ = writeln!(s, "t_event = none");
        }
    }
    match out.t_turn {
        Some(t) => {
            let _ = writeln!(s, "t_turn = {}", num(t));
        }
        None => {
            let _ = writeln!(s, "t_turn = none");
        }
    }
    let _ = writeln!(s, "final_sep = {}", num(out.final_sep));
    let _ = writeln!(s, "samples = {samples}");
    let _ = writeln!(s, "v0 = {}", num(v0));
    s
}

/// One sweep result; numeric fields are blank when the run failed.
pub struct SweepRow {
    pub value: f64,
    pub verdict: Option<Verdict>,
    pub t_event: Option<f64>,
    pub rate: Option<f64>,
    pub final_sep: Option<f64>,
    pub error: Option<String>,
}

pub const SWEEP_HEADER: &str = "key,value,verdict,t_event,rate,final_sep,error";

pub fn sweep_csv(key: &str, rows: &[SweepRow]) -> String {
    let opt = |v: &Option<f64>| v.map(num).unwrap_or_default();
    let mut out = String::new();
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            key,
            num(r.value),
            r.verdict.map(verdict_name).unwrap_or_default(),
            opt(&r.t_event),
            opt(&r.rate),
            opt(&r.final_sep),
            csv_cell(r.error.as_deref().unwrap_or_default()),
        );
    }
    out
}

/// One field sample; `velocity` is `None` on a singular cell, which is
/// emitted with blank velocity columns.
pub struct FieldRow {
    pub x: f64,
    pub y: f64,
    pub z: Option<f64>,
    pub velocity: Option<nalgebra::Vector3<f64>>,
}

pub fn field_csv(rows: &[FieldRow], three_d: bool) -> String {
    let mut out = String::new();
    out.push_str(if three_d {
        "x,y,z,u_x,u_y,u_z"
    } else {
        "x,y,u_x,u_y"
    });
    out.push('\n');
    for r in rows {
        let _ = write!(out, "{},{}", num(r.x), num(r.y));
        if three_d {
            let _ = write!(out, ",{}", num(r.z.unwrap_or(0.0)));
        }
        match &r.velocity {
            Some(u) => {
                let _ = write!(out, ",{},{}", num(u.x), num(u.y));
                if three_d {
                    let _ = write!(out, ",{}", num(u.z));
                }
            }
            None => {
                out.push_str(if three_d { ",,," } else { ",," });
            }
        }
        out.push('\n');
    }
    out
}

pub fn write_file(dir: &Path, name: &str, content: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, content)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}
