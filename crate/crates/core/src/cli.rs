//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::fitting::{self, FitOptions};
use crate::gas::{self, DEFAULT_GRID_POINTS};
use crate::io::{self, Axes, Format, Payload, Scale, Series};
use crate::numerics::cumulative_trapezoid;
use crate::optics::{self, FarField, GridSpec, WireSpec};
use crate::units;
use crate::{BeamConfig, GasParameters};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

/// Environment variable capping worker threads (0 = one per core).
pub const THREADS_ENV: &str = "DARKGAS_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "darkgas",
    version,
    about = "Isothermal neutrino-gas rotation curves and crossed-beam wire-scan optics",
    after_help = "Exit codes: 0 success, 1 usage error, 2 numerical failure.\n\
                  Set DARKGAS_THREADS to cap worker threads (0 = auto)."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the density profile and write the rotation curve.
    Rotcurve {
        #[command(flatten)]
        gas: GasArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Fit T/m to an observed rotation curve.
    Fit {
        /// Observed curve, CSV with header `r_kpc,v_kms[,sigma_kms]` (sigma defaults to 5 km/s).
        #[arg(long, value_name = "CSV")]
        data: Option<PathBuf>,
        /// Lower edge of the T/m search bracket, mK per 1e-36 kg.
        #[arg(long, default_value_t = fitting::DEFAULT_BRACKET.0)]
        bracket_lo: f64,
        /// Upper edge of the T/m search bracket, mK per 1e-36 kg.
        #[arg(long, default_value_t = fitting::DEFAULT_BRACKET.1)]
        bracket_hi: f64,
        /// Absolute tolerance on T/m.
        #[arg(long, default_value_t = fitting::DEFAULT_FIT_TOL)]
        tol: f64,
        #[command(flatten)]
        gas: GasArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Print the isentropic wave speed sqrt(gamma k_B T / m).
    Wavespeed {
        #[command(flatten)]
        gas: GasArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Scan an absorbing wire across the beam overlap and report the photon-count fraction.
    Scanwire {
        #[command(flatten)]
        beam: BeamArgs,
        /// Wire width, m (17 um: 12.5 times thinner than the default fringe spacing).
        #[arg(long, default_value_t = optics::DEFAULT_WIRE_WIDTH_M)]
        wire_width: f64,
        /// First wire position, m from the central bright fringe [default: -fringe_spacing/2].
        #[arg(long, allow_negative_numbers = true)]
        from: Option<f64>,
        /// Last wire position, m [default: +fringe_spacing/2].
        #[arg(long, allow_negative_numbers = true)]
        to: Option<f64>,
        /// Number of positions.
        #[arg(long, default_value_t = 41)]
        count: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Dump the two-beam interference intensity across the overlap.
    Interference {
        #[command(flatten)]
        beam: BeamArgs,
        /// Number of samples across the overlap.
        #[arg(long, default_value_t = 1001)]
        samples: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the invariant checks and print the complementarity table.
    Check {
        #[command(flatten)]
        gas: GasArgs,
        #[command(flatten)]
        beam: BeamArgs,
        /// Wire width, m.
        #[arg(long, default_value_t = optics::DEFAULT_WIRE_WIDTH_M)]
        wire_width: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args, Clone)]
pub struct GasArgs {
    /// Gas temperature over neutrino mass, mK per 1e-36 kg (6 matches the Milky Way; 5.35 mK at 0.89e-36 kg).
    #[arg(long, default_value_t = gas::DEFAULT_T_OVER_M)]
    pub t_over_m: f64,
    /// Central mass inside r0, M_sun (9e10 puts v(r0) near 215 km/s; not a measured value).
    #[arg(long, default_value_t = gas::DEFAULT_M0)]
    pub m0: f64,
    /// Inner radius (solar circle), kpc.
    #[arg(long, default_value_t = gas::DEFAULT_R0)]
    pub r0: f64,
    /// Dark-matter density at r0, M_sun/pc^3 (local density 0.01).
    #[arg(long, default_value_t = gas::DEFAULT_RHO0_MSUN_PC3)]
    pub rho0: f64,
    /// Adiabatic index (5/3 for three degrees of freedom).
    #[arg(long, default_value_t = 5.0 / 3.0)]
    pub gamma: f64,
    /// Outer radius of the solved profile, kpc.
    #[arg(long, default_value_t = gas::DEFAULT_R_MAX)]
    pub r_max: f64,
    /// Relative tolerance of the ODE solver.
    #[arg(long, default_value_t = gas::DEFAULT_REL_TOL)]
    pub rtol: f64,
    /// Points in the log-uniform output grid.
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    pub points: usize,
}

impl GasArgs {
    pub fn params(&self) -> Result<GasParameters> {
        GasParameters::new(
            units::t_over_m_to_velocity_sq(self.t_over_m)?,
            self.m0,
            self.r0,
            units::density_msun_pc3_to_internal(self.rho0)?,
            self.gamma,
        )
    }
}

#[derive(Debug, Args, Clone)]
pub struct BeamArgs {
    /// Wavelength, m (650 nm diode laser).
    #[arg(long, default_value_t = optics::DEFAULT_WAVELENGTH_M)]
    pub wavelength: f64,
    /// Fringe spacing, m; the crossing angle is derived as wavelength / spacing.
    #[arg(long, default_value_t = optics::DEFAULT_FRINGE_SPACING_M)]
    pub fringe_spacing: f64,
    /// Width of the beam overlap, m (1.0 mm).
    #[arg(long, default_value_t = optics::DEFAULT_REGION_WIDTH_M)]
    pub region_width: f64,
    /// Intensity scale E0^2.
    #[arg(long, default_value_t = 1.0)]
    pub e0_sq: f64,
    /// log2 of the transverse sample count.
    #[arg(long, default_value_t = optics::DEFAULT_LOG2_SAMPLES)]
    pub grid_log2: u32,
    /// Detector half-acceptance in diffraction half-widths (wavelength / region width).
    #[arg(long, default_value_t = optics::DEFAULT_WINDOW_HALFWIDTHS)]
    pub window: f64,
}

impl BeamArgs {
    pub fn config(&self) -> Result<BeamConfig> {
        BeamConfig::new(self.wavelength, self.fringe_spacing, self.e0_sq, self.region_width)
    }

    pub fn grid(&self) -> GridSpec<f64> {
        GridSpec {
            log2_samples: self.grid_log2,
            window_halfwidths: self.window,
            ..GridSpec::default()
        }
    }
}

#[derive(Debug, Args, Clone)]
pub struct OutputArgs {
    /// Output file (stdout when omitted).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long, default_value = "csv")]
    pub format: String,
    /// Also write an SVG plot here.
    #[arg(long, value_name = "SVG")]
    pub plot: Option<PathBuf>,
}

impl OutputArgs {
    fn emit(&self, payload: &Payload<'_>, stdout: &mut dyn Write) -> Result<()> {
        let format: Format = self.format.parse()?;
        match &self.out {
            Some(path) => io::write_results(path, format, payload),
            None => {
                stdout.write_all(io::render(format, payload)?.as_bytes())?;
                Ok(())
            }
        }
    }

    fn plot(&self, series: &[Series], axes: &Axes, stderr: &mut dyn Write) -> Result<()> {
        if let Some(path) = &self.plot {
            let skipped = io::emit_svg_plot(path, series, axes)?;
            if skipped > 0 {
                let _ = writeln!(stderr, "warning: {skipped} non-plottable points skipped");
            }
        }
        Ok(())
    }
}

fn configure_threads() {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    // A second call in the same process finds the pool already built; that is fine.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
}

/// Parses `argv` (including the program name) and runs it. Returns the exit code.
pub fn run_cli<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let mut stdout = std::io::stdout().lock();
    let mut stderr = std::io::stderr().lock();
    run_with(argv, &mut stdout, &mut stderr)
}

pub fn run_with<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    configure_threads();
    match dispatch(&cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_USAGE
            }
        }
    }
}

fn dispatch(command: &Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Rotcurve { gas, output } => rotcurve(gas, output, stdout, stderr),
        Command::Fit {
            data,
            bracket_lo,
            bracket_hi,
            tol,
            gas,
            output,
        } => {
            let Some(data) = data else {
                let _ = writeln!(stderr, "error: `fit` requires --data <CSV>");
                return Ok(EXIT_USAGE);
            };
            fit(data, (*bracket_lo, *bracket_hi), *tol, gas, output, stdout, stderr)
        }
        Command::Wavespeed { gas, output } => {
            let params = gas.params_unchecked()?;
            let speed = gas::isentropic_wave_speed(&params);
            match &output.out {
                Some(_) => output.emit(&Payload::WaveSpeed { params: &params, speed_kms: speed }, stdout)?,
                None => {
                    writeln!(stdout, "v_s = {speed:.1} km/s (T/m = {}, gamma = {:.4})", gas.t_over_m, gas.gamma)?
                }
            }
            Ok(EXIT_OK)
        }
        Command::Scanwire {
            beam,
            wire_width,
            from,
            to,
            count,
            output,
        } => scanwire(beam, *wire_width, *from, *to, *count, output, stdout, stderr),
        Command::Interference { beam, samples, output } => {
            let config = beam.config()?;
            let samples = optics::intensity_profile(&config, *samples)?;
            output.emit(&Payload::Intensity { config: &config, samples: &samples }, stdout)?;
            output.plot(
                &[Series::line("intensity", samples.iter().map(|&(y, i)| (y * 1e3, i)).collect())],
                &Axes::linear("Two-beam interference", "y (mm)", "intensity / E0^2"),
                stderr,
            )?;
            Ok(EXIT_OK)
        }
        Command::Check {
            gas,
            beam,
            wire_width,
            output,
        } => check(gas, beam, *wire_width, output, stdout),
    }
}

impl GasArgs {
    /// Parameters without the positivity check on T/m (wave speed accepts 0).
    fn params_unchecked(&self) -> Result<GasParameters> {
        let p = GasParameters {
            kt_over_m: units::t_over_m_to_velocity_sq(self.t_over_m)?,
            m0: self.m0,
            r0: self.r0,
            rho0: units::density_msun_pc3_to_internal(self.rho0)?,
            gamma: self.gamma,
        };
        if !(p.gamma > 1.0) {
            return Err(Error::Argument(format!("gamma must exceed 1, got {}", p.gamma)));
        }
        Ok(p)
    }
}

fn solve(gas: &GasArgs) -> Result<(GasParameters, crate::DensityProfile, crate::RotationCurve)> {
    let params = gas.params()?;
    if !(gas.r_max > params.r0) {
        return Err(Error::Argument(format!("--r-max {} must exceed --r0 {}", gas.r_max, params.r0)));
    }
    let grid = gas::log_grid(params.r0, gas.r_max, gas.points)?;
    let profile = gas::solve_density_profile_on(&params, &grid, gas.rtol)?;
    let curve = gas::rotation_curve(&profile, &params)?;
    Ok((params, profile, curve))
}

fn rotcurve(gas: &GasArgs, output: &OutputArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let (params, profile, curve) = solve(gas)?;
    if profile.truncated() {
        let _ = writeln!(stderr, "warning: density vanished; profile truncated at r = {} kpc", profile.r_max());
    }
    output.emit(&Payload::Profile { params: &params, profile: &profile, curve: &curve }, stdout)?;
    output.plot(
        &[Series::line(
            format!("model, T/m = {}", gas.t_over_m),
            curve.r().iter().copied().zip(curve.v().iter().copied()).collect(),
        )],
        &Axes {
            x_scale: Scale::Log,
            ..Axes::linear("Rotation curve", "r (kpc)", "v (km/s)")
        },
        stderr,
    )?;
    Ok(EXIT_OK)
}

fn fit(
    data: &Path,
    bracket: (f64, f64),
    tol: f64,
    gas: &GasArgs,
    output: &OutputArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32> {
    let observed = io::load_observed_csv(data)?;
    let template = gas.params()?;
    let opts = FitOptions {
        bracket,
        tol,
        rel_tol: gas.rtol,
        grid_points: gas.points,
    };
    let result = fitting::fit_t_over_m_with(&observed, &template, &opts)?;
    if result.boundary_hit {
        let _ = writeln!(stderr, "warning: best T/m = {} sits on the bracket edge", result.t_over_m_best);
    }
    output.emit(
        &Payload::Fit {
            template: &template,
            points: observed.len(),
            fit: &result,
        },
        stdout,
    )?;
    if output.plot.is_some() {
        let r_max = observed.points().last().map(|p| p.r).unwrap_or(gas.r_max).max(gas.r_max);
        let curve = fitting::model_curve(&template, result.t_over_m_best, r_max, gas.rtol, gas.points)?;
        output.plot(
            &[
                Series::line(
                    format!("model, T/m = {:.3}", result.t_over_m_best),
                    curve.r().iter().copied().zip(curve.v().iter().copied()).collect(),
                ),
                Series::line("observed", observed.points().iter().map(|p| (p.r, p.v)).collect()).with_markers(),
            ],
            &Axes::linear("Rotation curve fit", "r (kpc)", "v (km/s)"),
            stderr,
        )?;
    }
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn scanwire(
    beam: &BeamArgs,
    wire_width: f64,
    from: Option<f64>,
    to: Option<f64>,
    count: usize,
    output: &OutputArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32> {
    let config = beam.config()?;
    let from = from.unwrap_or(-config.fringe_spacing / 2.0);
    let to = to.unwrap_or(config.fringe_spacing / 2.0);
    let positions: Vec<f64> = match count {
        0 => Vec::new(),
        1 => vec![from],
        n => (0..n).map(|i| from + (to - from) * i as f64 / (n - 1) as f64).collect(),
    };
    let scan = optics::scan_wire_on(&config, beam.grid(), wire_width, &positions)?;
    output.emit(&Payload::Scan { config: &config, wire_width, scan: &scan }, stdout)?;
    if !scan.is_empty() {
        output.plot(
            &[Series::line(
                "f",
                scan.positions.iter().map(|p| p * 1e3).zip(scan.f.iter().copied()).collect(),
            )
            .with_markers()],
            &Axes::linear("Photon-count fraction with wire", "wire position (mm)", "f"),
            stderr,
        )?;
    }
    Ok(EXIT_OK)
}

struct CheckLine {
    name: String,
    value: f64,
    limit: f64,
    pass: bool,
}

fn check(
    gas: &GasArgs,
    beam: &BeamArgs,
    wire_width: f64,
    output: &OutputArgs,
    stdout: &mut dyn Write,
) -> Result<i32> {
    let mut lines = Vec::new();
    let (params, profile, _) = solve(gas)?;

    // Log-spaced interior radii; fixed so the report is reproducible.
    let (lo, hi) = (profile.r_min().ln(), profile.r_max().ln());
    let mut worst: f64 = 0.0;
    for k in 1..=10 {
        let r = (lo + (hi - lo) * k as f64 / 11.0).exp();
        worst = worst.max(gas::euler_residual(&profile, &params, r)?);
    }
    lines.push(CheckLine {
        name: "hydrostatic residual (max of 10 radii)".into(),
        value: worst,
        limit: 1e-3,
        pass: worst < 1e-3,
    });

    let integrand: Vec<f64> = profile
        .r()
        .iter()
        .zip(profile.rho())
        .map(|(r, rho)| 4.0 * std::f64::consts::PI * rho * r * r)
        .collect();
    let trap = cumulative_trapezoid(profile.r(), &integrand)?;
    let m_end = *profile.m_dm().last().expect("non-empty");
    let t_end = *trap.last().expect("non-empty");
    let mass_err = if m_end == 0.0 { t_end.abs() } else { ((t_end - m_end) / m_end).abs() };
    lines.push(CheckLine {
        name: "enclosed mass vs trapezoid at r_max".into(),
        value: mass_err,
        limit: 1e-4,
        pass: mass_err < 1e-4,
    });

    let config = beam.config()?;
    let engine = FarField::new(config, beam.grid())?;
    let wire = WireSpec::absorber(wire_width, 0.0);
    let (near, far) = engine.parseval(&wire)?;
    let parseval = ((near - far) / near).abs();
    lines.push(CheckLine {
        name: "Parseval (near vs far power)".into(),
        value: parseval,
        limit: 1e-9,
        pass: parseval < 1e-9,
    });

    let f_n = engine.fractions(&wire)?.total;
    let fine = GridSpec {
        log2_samples: beam.grid_log2 + 1,
        ..beam.grid()
    };
    let f_2n = FarField::new(config, fine)?.fractions(&wire)?.total;
    lines.push(CheckLine {
        name: "bright-fringe f, grid N vs 2N".into(),
        value: (f_n - f_2n).abs(),
        limit: 0.005,
        pass: (f_n - f_2n).abs() < 0.005,
    });

    let s = 0.5f64.sqrt();
    let table = [
        optics::complementarity_check(1.0, 0.0)?,
        optics::complementarity_check(1.0, 1.0)?,
        optics::complementarity_check(s, s)?,
    ];

    for l in &lines {
        writeln!(
            stdout,
            "{} {:<42} {:.3e} (limit {:.0e})",
            if l.pass { "PASS" } else { "FAIL" },
            l.name,
            l.value,
            l.limit
        )?;
    }
    writeln!(stdout, "bright-fringe f = {f_n:.4}")?;
    writeln!(stdout, "     V      K  K^2+V^2  bound")?;
    for m in &table {
        writeln!(
            stdout,
            "{:6.4} {:6.4} {:8.4}  {}",
            m.visibility,
            m.which_way,
            m.sum_sq,
            if m.satisfied { "satisfied" } else { "violated" }
        )?;
    }
    if output.out.is_some() {
        output.emit(&Payload::Metrics(&table), stdout)?;
    }
    Ok(if lines.iter().all(|l| l.pass) { EXIT_OK } else { EXIT_NUMERICAL })
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("darkgas").chain(args.iter().copied());
        let code = run_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn wavespeed_prints_371_6() {
        let (code, out, _) = run(&["wavespeed", "--t-over-m", "6"]);
        assert_eq!(code, 0);
        assert!(out.contains("371.6 km/s"), "{out}");
    }

    #[test]
    fn fit_without_data_is_usage_error() {
        let (code, _, err) = run(&["fit"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("--data"));
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        let (code, _, err) = run(&["rotcurve", "--bogus"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(!err.is_empty());
        let (code, _, _) = run(&["rotcurve", "--format", "xml"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("rotcurve") && out.contains("scanwire"));
    }

    #[test]
    fn bad_physics_input_is_usage_error() {
        let (code, _, _) = run(&["rotcurve", "--m0", "-1"]);
        assert_eq!(code, EXIT_USAGE);
    }

    #[test]
    fn numerical_failure_exit_code() {
        let (code, _, err) = run(&["scanwire", "--grid-log2", "8", "--count", "3"]);
        assert_eq!(code, EXIT_NUMERICAL, "{err}");
    }
}
