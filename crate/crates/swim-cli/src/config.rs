//! Run configuration: file format, scenario presets, flag overrides.
//!
//! Config files are flat `key = value` text grouped into sections. Every
//! key has a default, so an empty file (or none at all) is a valid run;
//! unknown keys and sections are rejected. A fully resolved configuration
//! serializes back to the same text it parses from.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;

use swim_core::dynamics::{head_to_tail_pair, perturbed_mirror_pair};
use swim_core::model::{DragConvention, Medium, Swimmer, SwimmerParams, SwimmerState};
use swim_core::solver::isolated_speed;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Mirror,
    Parallel,
    #[value(name = "head_to_tail")]
    HeadToTail,
    Custom,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Scenario::Mirror => "mirror",
            Scenario::Parallel => "parallel",
            Scenario::HeadToTail => "head_to_tail",
            Scenario::Custom => "custom",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum MediumKind {
    #[serde(rename = "bulk3d")]
    #[value(name = "bulk3d")]
    Bulk3d,
    #[serde(rename = "q2d")]
    #[value(name = "q2d")]
    Q2d,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Full,
    Asym,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DragKind {
    Stokes,
    PointForce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaModeKind {
    SelfConsistent,
    BulkClosedForm,
}

/// Fully resolved run configuration. Every field is concrete; the partial
/// layers (file, preset, flags) collapse into this in [`resolve`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub medium: MediumKind,
    pub model: ModelKind,
    pub order: u32,
    pub q2d_alpha: AlphaModeKind,
    pub swimmer: SwimmerSection,
    pub fluid: FluidSection,
    pub pose: PoseSection,
    pub integrator: IntegratorSection,
    pub thresholds: ThresholdSection,
    pub output: OutputSection,
    pub field: FieldSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwimmerSection {
    pub f_p: f64,
    pub half_length: f64,
    pub ball_radius: f64,
    pub zeta: f64,
    pub drag: DragKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluidSection {
    pub mu: f64,
    /// Film gap; only read when the medium is quasi-two-dimensional.
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoseSection {
    pub a0: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub phi: f64,
    /// Initial defect, subtracted from `theta2` when the pair is built.
    pub delta0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    pub dt: f64,
    pub t_max: f64,
    pub sample_every: usize,
    pub max_disp_frac: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdSection {
    pub d_in: f64,
    pub d_off: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

/// Sampling window for the `field` command, in coordinates relative to
/// swimmer 1's center. Rows are written in absolute coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSection {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub ny: usize,
}

/// Partial configuration as read from a file: any subset of the keys.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: Option<Scenario>,
    medium: Option<MediumKind>,
    model: Option<ModelKind>,
    order: Option<u32>,
    q2d_alpha: Option<AlphaModeKind>,
    #[serde(default)]
    swimmer: RawSwimmer,
    #[serde(default)]
    fluid: RawFluid,
    #[serde(default)]
    pose: RawPose,
    #[serde(default)]
    integrator: RawIntegrator,
    #[serde(default)]
    thresholds: RawThresholds,
    #[serde(default)]
    output: RawOutput,
    #[serde(default)]
    field: RawField,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSwimmer {
    f_p: Option<f64>,
    half_length: Option<f64>,
    ball_radius: Option<f64>,
    zeta: Option<f64>,
    drag: Option<DragKind>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFluid {
    mu: Option<f64>,
    h: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPose {
    a0: Option<f64>,
    theta1: Option<f64>,
    theta2: Option<f64>,
    phi: Option<f64>,
    delta0: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIntegrator {
    dt: Option<f64>,
    t_max: Option<f64>,
    sample_every: Option<usize>,
    max_disp_frac: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawThresholds {
    d_in: Option<f64>,
    d_off: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawField {
    x_min: Option<f64>,
    x_max: Option<f64>,
    nx: Option<usize>,
    y_min: Option<f64>,
    y_max: Option<f64>,
    ny: Option<usize>,
}

/// Command-line overrides that take precedence over the file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub scenario: Option<Scenario>,
    pub medium: Option<MediumKind>,
    pub model: Option<ModelKind>,
    pub order: Option<u32>,
    pub zeta: Option<f64>,
    pub a0: Option<f64>,
    pub dt: Option<f64>,
    pub t_max: Option<f64>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// Serializes to the same `key = value` text the parser accepts;
    /// `resolve(print(c)) == c` for any resolved configuration.
    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("resolved config always serializes")
    }
}

/// Builds the resolved configuration from optional file text plus flag
/// overrides, then validates it.
pub fn resolve(file_text: Option<&str>, over: &Overrides) -> Result<RunConfig, CliError> {
    let raw: RawConfig = match file_text {
        Some(text) => {
            toml::from_str(text).map_err(|e| CliError::Config(format!("config file: {e}")))?
        }
        None => RawConfig::default(),
    };

    let scenario = over
        .scenario
        .or(raw.scenario)
        .unwrap_or(Scenario::Mirror);
    let medium = over.medium.or(raw.medium).unwrap_or(MediumKind::Bulk3d);
    let model = over.model.or(raw.model).unwrap_or(ModelKind::Full);
    let order = over.order.or(raw.order).unwrap_or(match medium {
        MediumKind::Bulk3d => 4,
        MediumKind::Q2d => 5,
    });
    let q2d_alpha = raw.q2d_alpha.unwrap_or(AlphaModeKind::SelfConsistent);

    let swimmer = SwimmerSection {
        f_p: raw.swimmer.f_p.unwrap_or(1.0),
        half_length: raw.swimmer.half_length.unwrap_or(1.0),
        ball_radius: raw.swimmer.ball_radius.unwrap_or(match medium {
            MediumKind::Bulk3d => 0.05,
            MediumKind::Q2d => 0.04,
        }),
        zeta: over.zeta.or(raw.swimmer.zeta).unwrap_or(-2.0),
        drag: raw.swimmer.drag.unwrap_or(DragKind::PointForce),
    };
    let fluid = FluidSection {
        mu: raw.fluid.mu.unwrap_or(1.0),
        h: raw.fluid.h.unwrap_or(0.2),
    };

    let preset = preset_pose(scenario);
    let a0 = over.a0.or(raw.pose.a0).unwrap_or(preset.a0);
    let theta1 = raw.pose.theta1.unwrap_or(preset.theta1);
    let theta2 = raw.pose.theta2.unwrap_or(match scenario {
        Scenario::Mirror => -theta1,
        Scenario::Parallel | Scenario::HeadToTail => theta1,
        Scenario::Custom => preset.theta2,
    });
    let pose = PoseSection {
        a0,
        theta1,
        theta2,
        phi: raw.pose.phi.unwrap_or(preset.phi),
        delta0: raw.pose.delta0.unwrap_or(0.0),
    };

    let cfg_params = swimmer_params(&swimmer)?;
    let cfg_medium = build_medium(medium, &fluid);
    let v0 = isolated_speed(&cfg_params, &cfg_medium)
        .map_err(|e| CliError::Config(format!("swimmer parameters: {e}")))?;
    let t_max_default = if v0.abs() > 1e-12 {
        5.0 * pose.a0 / v0.abs()
    } else {
        1e4
    };
    let t_max = over.t_max.or(raw.integrator.t_max).unwrap_or(t_max_default);
    let integrator = IntegratorSection {
        dt: over.dt.or(raw.integrator.dt).unwrap_or(t_max_default / 50.0),
        t_max,
        sample_every: raw.integrator.sample_every.unwrap_or(1),
        max_disp_frac: raw.integrator.max_disp_frac.unwrap_or(0.5),
    };
    let thresholds = ThresholdSection {
        d_in: raw
            .thresholds
            .d_in
            .unwrap_or(4.0 * swimmer.half_length),
        d_off: raw.thresholds.d_off.unwrap_or(10.0 * pose.a0),
    };
    let output = OutputSection {
        dir: over
            .out
            .clone()
            .or(raw.output.dir)
            .unwrap_or_else(|| PathBuf::from("out")),
    };
    let ext = 10.0 * swimmer.half_length;
    let field = FieldSection {
        x_min: raw.field.x_min.unwrap_or(-ext),
        x_max: raw.field.x_max.unwrap_or(ext),
        nx: raw.field.nx.unwrap_or(41),
        y_min: raw.field.y_min.unwrap_or(-ext),
        y_max: raw.field.y_max.unwrap_or(ext),
        ny: raw.field.ny.unwrap_or(41),
    };

    let cfg = RunConfig {
        scenario,
        medium,
        model,
        order,
        q2d_alpha,
        swimmer,
        fluid,
        pose,
        integrator,
        thresholds,
        output,
        field,
    };
    validate(&cfg)?;
    Ok(cfg)
}

struct PresetPose {
    a0: f64,
    theta1: f64,
    theta2: f64,
    phi: f64,
}

fn preset_pose(scenario: Scenario) -> PresetPose {
    match scenario {
        Scenario::Mirror => PresetPose {
            a0: 200.0,
            theta1: 0.0,
            theta2: 0.0,
            phi: PI / 2.0,
        },
        Scenario::Parallel => PresetPose {
            a0: 200.0,
            theta1: 0.0,
            theta2: 0.0,
            phi: PI / 2.0,
        },
        Scenario::HeadToTail => PresetPose {
            a0: 10.0,
            theta1: 0.0,
            theta2: 0.0,
            phi: 0.0,
        },
        Scenario::Custom => PresetPose {
            a0: 200.0,
            theta1: 0.0,
            theta2: 0.0,
            phi: 0.0,
        },
    }
}

fn validate(cfg: &RunConfig) -> Result<(), CliError> {
    swimmer_params(&cfg.swimmer)?;
    if cfg.fluid.mu <= 0.0 {
        return Err(CliError::Config("fluid viscosity must be positive".into()));
    }
    if cfg.medium == MediumKind::Q2d && cfg.fluid.h <= 0.0 {
        return Err(CliError::Config("film gap must be positive".into()));
    }
    if cfg.pose.a0 <= 0.0 {
        return Err(CliError::Config("initial separation must be positive".into()));
    }
    if cfg.integrator.dt <= 0.0 {
        return Err(CliError::Config("time step must be positive".into()));
    }
    if cfg.integrator.t_max < 0.0 {
        return Err(CliError::Config("horizon must be nonnegative".into()));
    }
    if cfg.integrator.sample_every == 0 {
        return Err(CliError::Config("sample stride must be at least 1".into()));
    }
    if cfg.thresholds.d_in < 0.0 || cfg.thresholds.d_off <= cfg.thresholds.d_in {
        return Err(CliError::Config(
            "thresholds must satisfy 0 <= d_in < d_off".into(),
        ));
    }
    let max_order = match cfg.medium {
        MediumKind::Bulk3d => 4,
        MediumKind::Q2d => 5,
    };
    if cfg.order < 2 || cfg.order > max_order {
        return Err(CliError::Config(format!(
            "expansion order must lie in 2..={max_order} for this medium, got {}",
            cfg.order
        )));
    }
    if cfg.field.nx < 2 || cfg.field.ny < 2 {
        return Err(CliError::Config("field grid needs at least 2x2 points".into()));
    }
    if cfg.field.x_max <= cfg.field.x_min || cfg.field.y_max <= cfg.field.y_min {
        return Err(CliError::Config("field window must have positive extent".into()));
    }
    Ok(())
}

/// Swimmer parameters for the core library; margin violations surface as
/// configuration errors.
pub fn swimmer_params(s: &SwimmerSection) -> Result<SwimmerParams, CliError> {
    let params = SwimmerParams {
        f_p: s.f_p,
        half_length: s.half_length,
        ball_radius: s.ball_radius,
        zeta: s.zeta,
        drag: match s.drag {
            DragKind::Stokes => DragConvention::Stokes,
            DragKind::PointForce => DragConvention::PointForce,
        },
    };
    params
        .validate()
        .map_err(|e| CliError::Config(format!("swimmer parameters: {e}")))?;
    Ok(params)
}

pub fn build_medium(kind: MediumKind, fluid: &FluidSection) -> Medium {
    match kind {
        MediumKind::Bulk3d => Medium::Bulk3d { mu: fluid.mu },
        MediumKind::Q2d => Medium::QuasiTwoD {
            mu: fluid.mu,
            h: fluid.h,
        },
    }
}

/// Builds the initial pair for the configured scenario. The defect
/// `delta0` always acts on swimmer 2's orientation.
pub fn build_pair(cfg: &RunConfig) -> Result<[Swimmer; 2], CliError> {
    let params = swimmer_params(&cfg.swimmer)?;
    let p = &cfg.pose;
    let pair = match cfg.scenario {
        Scenario::Mirror => perturbed_mirror_pair(&params, p.theta1, p.delta0, p.a0)
            .map_err(|e| CliError::Config(format!("mirror pose: {e}")))?,
        Scenario::HeadToTail if p.theta1 == 0.0 && p.delta0 == 0.0 => {
            // The dedicated builder keeps the axes bitwise identical.
            head_to_tail_pair(&params, p.a0)
        }
        _ => custom_pair(&params, p),
    };
    Ok(pair)
}

fn custom_pair(params: &SwimmerParams, p: &PoseSection) -> [Swimmer; 2] {
    let theta2 = p.theta2 - p.delta0;
    let make = |x: f64, y: f64, theta: f64| Swimmer {
        params: *params,
        state: SwimmerState {
            x_c: nalgebra::Vector3::new(x, y, 0.0),
            tau: nalgebra::Vector3::new(theta.cos(), theta.sin(), 0.0),
        },
    };
    [
        make(0.0, 0.0, p.theta1),
        make(p.a0 * p.phi.cos(), p.a0 * p.phi.sin(), theta2),
    ]
}
