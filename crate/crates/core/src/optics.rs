//! Crossed-beam interference and the wire-scan photon-count fraction.
//!
//! Two in-phase plane waves cross with full angle `lambda / Lambda`, where
//! `Lambda` is the fringe spacing; across the overlap region of width `W` the
//! intensity is `E0^2 (1 + cos(2 pi y / Lambda))`, with a bright fringe at
//! `y = 0`. A wire of width `w` is an amplitude mask on that field. The masked
//! field is carried to the far field by an FFT and the power landing inside two
//! acceptance windows around the beam directions is compared with the
//! unobstructed power.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::real::Real;

pub const DEFAULT_WAVELENGTH_M: f64 = 650e-9;
/// 12.5 times the 17 um wire width.
pub const DEFAULT_FRINGE_SPACING_M: f64 = 212.5e-6;
pub const DEFAULT_REGION_WIDTH_M: f64 = 1.0e-3;
pub const DEFAULT_WIRE_WIDTH_M: f64 = 17e-6;
pub const DEFAULT_LOG2_SAMPLES: u32 = 14;
/// Simulated window width in units of the region width (zero padding).
pub const DEFAULT_PADDING: f64 = 4.0;
/// Detector half-acceptance in diffraction half-widths `lambda / W`.
pub const DEFAULT_WINDOW_HALFWIDTHS: f64 = 3.0;
/// Fewest grid samples a wire may cover.
pub const MIN_WIRE_SAMPLES: usize = 8;
/// Slack on the complementarity bound.
pub const COMPLEMENTARITY_SLACK: f64 = 1e-12;

/// Geometry of the two crossing beams. The fringe spacing is authoritative;
/// crossing angles are derived from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamConfig<T> {
    /// m
    pub wavelength: T,
    /// m
    pub fringe_spacing: T,
    /// Peak single-beam intensity scale (the intensity is `e0_sq (1 + cos)`).
    pub e0_sq: T,
    /// Transverse extent of the overlap, m.
    pub region_width: T,
}

impl<T: Real> BeamConfig<T> {
    pub fn new(wavelength: T, fringe_spacing: T, e0_sq: T, region_width: T) -> Result<Self> {
        let c = Self {
            wavelength,
            fringe_spacing,
            e0_sq,
            region_width,
        };
        c.validate()?;
        Ok(c)
    }

    /// 650 nm light, 212.5 um fringes, 1.0 mm overlap, unit intensity.
    pub fn afshar() -> Self {
        Self {
            wavelength: T::lit(DEFAULT_WAVELENGTH_M),
            fringe_spacing: T::lit(DEFAULT_FRINGE_SPACING_M),
            e0_sq: T::one(),
            region_width: T::lit(DEFAULT_REGION_WIDTH_M),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |x: T| x.is_finite() && x > T::zero();
        if !(pos(self.wavelength) && pos(self.fringe_spacing) && pos(self.e0_sq) && pos(self.region_width)) {
            return Err(Error::arg("beam wavelength, fringe spacing, E0^2 and region width must be positive"));
        }
        if self.region_width / self.fringe_spacing < T::lit(2.0) {
            return Err(Error::arg("region must span at least two fringes"));
        }
        if self.half_crossing_angle() > T::lit(0.1) {
            return Err(Error::arg(format!(
                "half crossing angle {} rad is outside the small-angle regime",
                self.half_crossing_angle()
            )));
        }
        Ok(())
    }

    /// Angle of each beam to the axis, radians.
    pub fn half_crossing_angle(&self) -> T {
        self.wavelength / (T::lit(2.0) * self.fringe_spacing)
    }

    /// Angle between the beams, radians.
    pub fn full_crossing_angle(&self) -> T {
        self.wavelength / self.fringe_spacing
    }

    /// Transverse spatial frequency of each beam, cycles/m.
    fn beam_frequency(&self) -> T {
        T::one() / (T::lit(2.0) * self.fringe_spacing)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WireModel<T> {
    /// Opaque: zero amplitude across the wire.
    Absorber,
    /// Uniform amplitude transmission in `[0, 1]`.
    Partial(T),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WireSpec<T> {
    /// m
    pub width: T,
    /// Transverse position of the wire axis, m; `0` is the central bright fringe.
    pub center: T,
    pub model: WireModel<T>,
}

impl<T: Real> WireSpec<T> {
    pub fn absorber(width: T, center: T) -> Self {
        Self {
            width,
            center,
            model: WireModel::Absorber,
        }
    }

    fn transmission(&self) -> T {
        match self.model {
            WireModel::Absorber => T::zero(),
            WireModel::Partial(t) => t,
        }
    }
}

/// Transverse sampling and detector acceptance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    pub log2_samples: u32,
    /// Simulated width over region width.
    pub padding: T,
    /// Detector half-acceptance in units of `lambda / W`.
    pub window_halfwidths: T,
}

impl<T: Real> Default for GridSpec<T> {
    fn default() -> Self {
        Self {
            log2_samples: DEFAULT_LOG2_SAMPLES,
            padding: T::lit(DEFAULT_PADDING),
            window_halfwidths: T::lit(DEFAULT_WINDOW_HALFWIDTHS),
        }
    }
}

/// Photon-count fractions, wire in over wire out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorFractions<T> {
    /// Both windows together.
    pub total: T,
    /// Detector on the +alpha beam.
    pub detector1: T,
    /// Detector on the -alpha beam.
    pub detector2: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WireScanResult<T> {
    pub positions: Vec<T>,
    pub f: Vec<T>,
    pub per_detector: Vec<(T, T)>,
}

impl<T> WireScanResult<T> {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Visibility, which-way information and `K^2 + V^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplementarityMetrics<T> {
    pub visibility: T,
    pub which_way: T,
    pub sum_sq: T,
    /// `sum_sq <= 1` up to [`COMPLEMENTARITY_SLACK`].
    pub satisfied: bool,
}

/// Two-beam intensity `e0_sq (1 + cos(2 pi y / Lambda))` inside the overlap.
pub fn two_beam_intensity<T: Real>(config: &BeamConfig<T>, y: T) -> Result<T> {
    let half = config.region_width / T::lit(2.0);
    if !(y.abs() <= half) {
        return Err(Error::Range {
            what: "transverse position",
            value: y.as_f64(),
            lo: -half.as_f64(),
            hi: half.as_f64(),
        });
    }
    Ok(config.e0_sq * (T::one() + (T::TAU() * y / config.fringe_spacing).cos()))
}

/// `n` evenly spaced `(y, I(y))` samples across the overlap, edges included.
pub fn intensity_profile<T: Real>(config: &BeamConfig<T>, n: usize) -> Result<Vec<(T, T)>> {
    config.validate()?;
    if n < 2 {
        return Err(Error::arg("intensity profile needs at least two samples"));
    }
    let half = config.region_width / T::lit(2.0);
    let step = config.region_width / T::from_count(n - 1);
    (0..n)
        .map(|i| {
            let y = if i == n - 1 { half } else { -half + step * T::from_count(i) };
            Ok((y, two_beam_intensity(config, y)?))
        })
        .collect()
}

/// Far-field engine for one beam geometry; reusable across wire positions.
pub struct FarField<T: Real> {
    config: BeamConfig<T>,
    grid: GridSpec<T>,
    dx: T,
    y: Vec<T>,
    field: Vec<Complex<T>>,
    fft: Arc<dyn Fft<T>>,
    window1: Vec<bool>,
    window2: Vec<bool>,
    baseline: (T, T, T),
}

impl<T: Real> FarField<T> {
    pub fn new(config: BeamConfig<T>, grid: GridSpec<T>) -> Result<Self> {
        config.validate()?;
        if !(grid.padding >= T::one()) || !(grid.window_halfwidths > T::zero()) {
            return Err(Error::arg("padding must be >= 1 and window half-width positive"));
        }
        if !(4..=26).contains(&grid.log2_samples) {
            return Err(Error::arg("log2 grid size must be in 4..=26"));
        }
        let n = 1usize << grid.log2_samples;
        let span = grid.padding * config.region_width;
        let dx = span / T::from_count(n);
        let half_n = T::from_count(n / 2);
        let y: Vec<T> = (0..n).map(|i| (T::from_count(i) - half_n) * dx).collect();

        // Each beam carries amplitude sqrt(e0_sq / 2) so the fringes peak at 2 e0_sq.
        let amp = (config.e0_sq / T::lit(2.0)).sqrt();
        let k = T::PI() / config.fringe_spacing;
        let half_w = config.region_width / T::lit(2.0);
        let field: Vec<Complex<T>> = y
            .iter()
            .map(|&yi| {
                if yi.abs() <= half_w {
                    Complex::new(T::lit(2.0) * amp * (k * yi).cos(), T::zero())
                } else {
                    Complex::new(T::zero(), T::zero())
                }
            })
            .collect();

        let nu_beam = config.beam_frequency();
        let accept = grid.window_halfwidths / config.region_width;
        let freq = |i: usize| {
            let k = if i < n / 2 { i as f64 } else { i as f64 - n as f64 };
            T::lit(k) / span
        };
        let window1: Vec<bool> = (0..n).map(|i| (freq(i) - nu_beam).abs() <= accept).collect();
        let window2: Vec<bool> = (0..n).map(|i| (freq(i) + nu_beam).abs() <= accept).collect();

        let fft = FftPlanner::new().plan_fft_forward(n);
        let mut this = Self {
            config,
            grid,
            dx,
            y,
            field,
            fft,
            window1,
            window2,
            baseline: (T::zero(), T::zero(), T::zero()),
        };
        let power = this.transform(this.field.clone());
        this.baseline = this.window_powers(&power);
        Ok(this)
    }

    pub fn config(&self) -> &BeamConfig<T> {
        &self.config
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    /// Sample spacing, m.
    pub fn dx(&self) -> T {
        self.dx
    }

    pub fn samples(&self) -> usize {
        self.y.len()
    }

    fn transform(&self, mut buf: Vec<Complex<T>>) -> Vec<T> {
        self.fft.process(&mut buf);
        buf.into_iter().map(|c| c.norm_sqr()).collect()
    }

    fn window_powers(&self, power: &[T]) -> (T, T, T) {
        let mut p = (T::zero(), T::zero(), T::zero());
        for ((&pw, &w1), &w2) in power.iter().zip(&self.window1).zip(&self.window2) {
            if w1 {
                p.0 = p.0 + pw;
            }
            if w2 {
                p.1 = p.1 + pw;
            }
            if w1 || w2 {
                p.2 = p.2 + pw;
            }
        }
        p
    }

    /// Near field with the wire applied.
    pub fn masked_field(&self, wire: &WireSpec<T>) -> Result<Vec<Complex<T>>> {
        let half_w = self.config.region_width / T::lit(2.0);
        if !(wire.width > T::zero()) {
            return Err(Error::arg("wire width must be positive"));
        }
        if wire.width >= self.config.fringe_spacing {
            return Err(Error::arg("wire must be narrower than the fringe spacing"));
        }
        if !(wire.center.abs() + wire.width / T::lit(2.0) <= half_w) {
            return Err(Error::Range {
                what: "wire center",
                value: wire.center.as_f64(),
                lo: (-half_w + wire.width / T::lit(2.0)).as_f64(),
                hi: (half_w - wire.width / T::lit(2.0)).as_f64(),
            });
        }
        let t = wire.transmission();
        if !(t >= T::zero() && t <= T::one()) {
            return Err(Error::arg("wire transmission must lie in [0, 1]"));
        }
        let half = wire.width / T::lit(2.0);
        let mut covered = 0usize;
        let field = self
            .y
            .iter()
            .zip(&self.field)
            .map(|(&yi, &e)| {
                if (yi - wire.center).abs() < half {
                    covered += 1;
                    e * t
                } else {
                    e
                }
            })
            .collect();
        if covered < MIN_WIRE_SAMPLES {
            return Err(Error::Resolution {
                samples: covered,
                required: MIN_WIRE_SAMPLES,
            });
        }
        Ok(field)
    }

    /// Unnormalized far-field power spectrum (FFT bin order) of the masked field.
    pub fn far_field_power(&self, wire: &WireSpec<T>) -> Result<Vec<T>> {
        Ok(self.transform(self.masked_field(wire)?))
    }

    pub fn fractions(&self, wire: &WireSpec<T>) -> Result<DetectorFractions<T>> {
        let (p1, p2, pt) = self.window_powers(&self.far_field_power(wire)?);
        let (b1, b2, bt) = self.baseline;
        Ok(DetectorFractions {
            total: pt / bt,
            detector1: p1 / b1,
            detector2: p2 / b2,
        })
    }

    /// `(near, far)` total powers of the masked field, with the FFT's factor `N` removed.
    pub fn parseval(&self, wire: &WireSpec<T>) -> Result<(T, T)> {
        let near_field = self.masked_field(wire)?;
        let near = near_field.iter().fold(T::zero(), |a, c| a + c.norm_sqr());
        let far = self
            .transform(near_field)
            .into_iter()
            .fold(T::zero(), |a, p| a + p)
            / T::from_count(self.samples());
        Ok((near, far))
    }
}

/// Photon-count fraction (both detectors) with the wire in place, default grid.
pub fn detector_fraction<T: Real>(config: &BeamConfig<T>, wire: &WireSpec<T>) -> Result<T> {
    Ok(FarField::new(*config, GridSpec::default())?.fractions(wire)?.total)
}

/// Scans an absorbing wire across `positions`, evaluating positions in parallel.
pub fn scan_wire<T: Real>(
    config: &BeamConfig<T>,
    wire_width: T,
    positions: &[T],
) -> Result<WireScanResult<T>> {
    scan_wire_on(config, GridSpec::default(), wire_width, positions)
}

pub fn scan_wire_on<T: Real>(
    config: &BeamConfig<T>,
    grid: GridSpec<T>,
    wire_width: T,
    positions: &[T],
) -> Result<WireScanResult<T>> {
    if positions.is_empty() {
        return Ok(WireScanResult {
            positions: Vec::new(),
            f: Vec::new(),
            per_detector: Vec::new(),
        });
    }
    let engine = FarField::new(*config, grid)?;
    let fractions: Vec<DetectorFractions<T>> = positions
        .par_iter()
        .map(|&c| engine.fractions(&WireSpec::absorber(wire_width, c)))
        .collect::<Result<_>>()?;
    Ok(WireScanResult {
        positions: positions.to_vec(),
        f: fractions.iter().map(|d| d.total).collect(),
        per_detector: fractions.iter().map(|d| (d.detector1, d.detector2)).collect(),
    })
}

/// `(I_max - I_min) / (I_max + I_min)`.
pub fn visibility<T: Real>(i_max: T, i_min: T) -> Result<T> {
    if !(i_min >= T::zero()) || !i_max.is_finite() {
        return Err(Error::arg("intensities must be finite and non-negative"));
    }
    if i_min > i_max {
        return Err(Error::arg(format!("i_min = {i_min} exceeds i_max = {i_max}")));
    }
    if i_max == T::zero() {
        return Err(Error::UndefinedVisibility);
    }
    Ok((i_max - i_min) / (i_max + i_min))
}

/// Which-way information as detector distinguishability `|p1 - p2| / (p1 + p2)`.
pub fn which_way<T: Real>(p1: T, p2: T) -> Result<T> {
    if !(p1 >= T::zero() && p2 >= T::zero()) || !(p1 + p2).is_finite() {
        return Err(Error::arg("probabilities must be finite and non-negative"));
    }
    if p1 + p2 == T::zero() {
        return Err(Error::arg("probabilities cannot both be zero"));
    }
    Ok((p1 - p2).abs() / (p1 + p2))
}

/// Evaluates `K^2 + V^2 <= 1`.
pub fn complementarity_check<T: Real>(visibility: T, which_way: T) -> Result<ComplementarityMetrics<T>> {
    let unit = |x: T| x >= T::zero() && x <= T::one();
    if !(unit(visibility) && unit(which_way)) {
        return Err(Error::arg(format!(
            "V = {visibility} and K = {which_way} must both lie in [0, 1]"
        )));
    }
    let sum_sq = which_way * which_way + visibility * visibility;
    Ok(ComplementarityMetrics {
        visibility,
        which_way,
        sum_sq,
        satisfied: sum_sq <= T::one() + T::lit(COMPLEMENTARITY_SLACK),
    })
}
