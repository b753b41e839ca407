use serde::Serialize;

use crate::error::Result;
use crate::io::Payload;
use crate::units;
use crate::{BeamConfig, GasParameters};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct Document<P: Serialize, D: Serialize> {
    schema_version: u32,
    kind: &'static str,
    parameters: P,
    data: D,
}

#[derive(Serialize)]
struct GasEcho {
    t_over_m_mk_per_1e36kg: f64,
    kt_over_m_kms2: f64,
    m0_msun: f64,
    r0_kpc: f64,
    rho0_msun_pc3: f64,
    gamma: f64,
}

impl From<&GasParameters> for GasEcho {
    fn from(p: &GasParameters) -> Self {
        Self {
            t_over_m_mk_per_1e36kg: units::velocity_sq_to_t_over_m(p.kt_over_m).unwrap_or(f64::NAN),
            kt_over_m_kms2: p.kt_over_m,
            m0_msun: p.m0,
            r0_kpc: p.r0,
            rho0_msun_pc3: units::density_internal_to_msun_pc3(p.rho0).unwrap_or(f64::NAN),
            gamma: p.gamma,
        }
    }
}

#[derive(Serialize)]
struct BeamEcho {
    wavelength_m: f64,
    fringe_spacing_m: f64,
    full_crossing_angle_rad: f64,
    e0_sq: f64,
    region_width_m: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    wire_width_m: Option<f64>,
}

fn beam(c: &BeamConfig, wire_width: Option<f64>) -> BeamEcho {
    BeamEcho {
        wavelength_m: c.wavelength,
        fringe_spacing_m: c.fringe_spacing,
        full_crossing_angle_rad: c.full_crossing_angle(),
        e0_sq: c.e0_sq,
        region_width_m: c.region_width,
        wire_width_m: wire_width,
    }
}

#[derive(Serialize)]
struct ProfileData<'a> {
    r_kpc: &'a [f64],
    rho_msun_kpc3: &'a [f64],
    menc_msun: Vec<f64>,
    v_kms: &'a [f64],
    truncated: bool,
}

#[derive(Serialize)]
struct ObservedData {
    r_kpc: Vec<f64>,
    v_kms: Vec<f64>,
    sigma_kms: Vec<f64>,
}

#[derive(Serialize)]
struct ScanData<'a> {
    pos_m: &'a [f64],
    f: &'a [f64],
    f_detector1: Vec<f64>,
    f_detector2: Vec<f64>,
}

#[derive(Serialize)]
struct FitData {
    t_over_m_best: f64,
    chi2: f64,
    reduced_chi2: f64,
    evaluations: usize,
    bracket: [f64; 2],
    boundary_hit: bool,
    points: usize,
}

#[derive(Serialize)]
struct MetricsRow {
    v: f64,
    k: f64,
    sum_sq: f64,
    satisfied: bool,
}

#[derive(Serialize)]
struct IntensityData {
    y_m: Vec<f64>,
    intensity: Vec<f64>,
}

#[derive(Serialize)]
struct WaveSpeedData {
    v_s_kms: f64,
}

#[derive(Serialize)]
struct Empty {}

fn to_string<P: Serialize, D: Serialize>(kind: &'static str, parameters: P, data: D) -> Result<String> {
    let doc = Document {
        schema_version: SCHEMA_VERSION,
        kind,
        parameters,
        data,
    };
    let mut s = serde_json::to_string_pretty(&doc)?;
    s.push('\n');
    Ok(s)
}

pub(crate) fn render(payload: &Payload<'_>) -> Result<String> {
    match payload {
        Payload::Profile { params, profile, curve } => to_string(
            "rotcurve",
            GasEcho::from(*params),
            ProfileData {
                r_kpc: profile.r(),
                rho_msun_kpc3: profile.rho(),
                menc_msun: profile.m_dm().iter().map(|m| params.m0 + m).collect(),
                v_kms: curve.v(),
                truncated: profile.truncated(),
            },
        ),
        Payload::Observed(obs) => to_string(
            "observed",
            Empty {},
            ObservedData {
                r_kpc: obs.points().iter().map(|p| p.r).collect(),
                v_kms: obs.points().iter().map(|p| p.v).collect(),
                sigma_kms: obs.points().iter().map(|p| p.sigma).collect(),
            },
        ),
        Payload::Scan { config, wire_width, scan } => to_string(
            "scanwire",
            beam(config, Some(*wire_width)),
            ScanData {
                pos_m: &scan.positions,
                f: &scan.f,
                f_detector1: scan.per_detector.iter().map(|d| d.0).collect(),
                f_detector2: scan.per_detector.iter().map(|d| d.1).collect(),
            },
        ),
        Payload::Fit { template, points, fit } => to_string(
            "fit",
            GasEcho::from(*template),
            FitData {
                t_over_m_best: fit.t_over_m_best,
                chi2: fit.chi2,
                reduced_chi2: fit.reduced_chi2,
                evaluations: fit.evaluations,
                bracket: [fit.bracket.0, fit.bracket.1],
                boundary_hit: fit.boundary_hit,
                points: *points,
            },
        ),
        Payload::Metrics(rows) => to_string(
            "complementarity",
            Empty {},
            rows.iter()
                .map(|m| MetricsRow {
                    v: m.visibility,
                    k: m.which_way,
                    sum_sq: m.sum_sq,
                    satisfied: m.satisfied,
                })
                .collect::<Vec<_>>(),
        ),
        Payload::Intensity { config, samples } => to_string(
            "interference",
            beam(config, None),
            IntensityData {
                y_m: samples.iter().map(|s| s.0).collect(),
                intensity: samples.iter().map(|s| s.1).collect(),
            },
        ),
        Payload::WaveSpeed { params, speed_kms } => to_string(
            "wavespeed",
            GasEcho::from(*params),
            WaveSpeedData { v_s_kms: *speed_kms },
        ),
    }
}
