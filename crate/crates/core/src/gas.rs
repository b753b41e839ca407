//! Hydrostatic isothermal ideal gas bound by its own gravity plus a central mass.
//!
//! Beyond the inner radius `r0` the gas obeys
//!
//! ```text
//! dM/dr   = 4 pi rho r^2
//! drho/dr = -(G / (k_B T/m)) rho (M0 + M) / r^2
//! ```
//!
//! with `rho(r0) = rho0` and `M(r0) = 0`, which is hydrostatic balance
//! `(1/rho) dP/dr + g = 0` for `P = (k_B T/m) rho` differentiated once. The
//! circular speed follows from `v^2 / r = g`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{integrate_ivp_with, IvpOptions};
use crate::real::Real;
use crate::units::{self, g_gal};

/// Central mass used when none is supplied, M_sun. Puts the solar-circle speed near 215 km/s.
pub const DEFAULT_M0: f64 = 9e10;
/// Inner radius (solar circle), kpc.
pub const DEFAULT_R0: f64 = 8.34;
/// Density at `r0`, M_sun/pc^3.
pub const DEFAULT_RHO0_MSUN_PC3: f64 = 0.01;
/// T/m in mK per 1e-36 kg.
pub const DEFAULT_T_OVER_M: f64 = 6.0;
/// Outer radius of solved profiles, kpc.
pub const DEFAULT_R_MAX: f64 = 250.0;
/// Points in the log-uniform output grid.
pub const DEFAULT_GRID_POINTS: usize = 512;
pub const DEFAULT_REL_TOL: f64 = 1e-9;

/// Physical inputs of the gas model, in internal units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasParameters<T> {
    /// `k_B T / m`, (km/s)^2.
    pub kt_over_m: T,
    /// Central mass inside `r0`, M_sun.
    pub m0: T,
    /// kpc.
    pub r0: T,
    /// Density at `r0`, M_sun/kpc^3.
    pub rho0: T,
    /// Adiabatic index.
    pub gamma: T,
}

impl<T: Real> GasParameters<T> {
    pub fn new(kt_over_m: T, m0: T, r0: T, rho0: T, gamma: T) -> Result<Self> {
        let p = Self {
            kt_over_m,
            m0,
            r0,
            rho0,
            gamma,
        };
        p.validate()?;
        Ok(p)
    }

    /// Milky Way defaults: T/m = 6, M0 = 9e10 M_sun, r0 = 8.34 kpc,
    /// rho0 = 0.01 M_sun/pc^3, gamma = 5/3.
    pub fn milky_way() -> Self {
        Self {
            kt_over_m: units::t_over_m_to_velocity_sq(T::lit(DEFAULT_T_OVER_M)).expect("positive"),
            m0: T::lit(DEFAULT_M0),
            r0: T::lit(DEFAULT_R0),
            rho0: units::density_msun_pc3_to_internal(T::lit(DEFAULT_RHO0_MSUN_PC3)).expect("positive"),
            gamma: T::lit(5.0 / 3.0),
        }
    }

    pub fn with_kt_over_m(self, kt_over_m: T) -> Self {
        Self { kt_over_m, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: T| x.is_finite();
        if !(ok(self.kt_over_m) && self.kt_over_m > T::zero()) {
            return Err(Error::arg(format!("k_B T/m must be positive, got {}", self.kt_over_m)));
        }
        if !(ok(self.m0) && self.m0 > T::zero()) {
            return Err(Error::arg(format!("M0 must be positive, got {}", self.m0)));
        }
        if !(ok(self.r0) && self.r0 > T::zero()) {
            return Err(Error::arg(format!("r0 must be positive, got {}", self.r0)));
        }
        if !(ok(self.rho0) && self.rho0 >= T::zero()) {
            return Err(Error::arg(format!("rho0 must be non-negative, got {}", self.rho0)));
        }
        if !(ok(self.gamma) && self.gamma > T::one()) {
            return Err(Error::arg(format!("gamma must exceed 1, got {}", self.gamma)));
        }
        Ok(())
    }
}

/// Density and enclosed gas mass on a radial grid starting at `r0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile<T> {
    r: Vec<T>,
    rho: Vec<T>,
    m_dm: Vec<T>,
    truncated: bool,
}

impl<T: Real> DensityProfile<T> {
    /// Structural checks only: equal lengths, increasing radii, finite non-negative
    /// values, `m_dm[0] == 0`. See [`DensityProfile::check_physical`].
    pub fn new(r: Vec<T>, rho: Vec<T>, m_dm: Vec<T>) -> Result<Self> {
        if r.len() != rho.len() || r.len() != m_dm.len() {
            return Err(Error::arg("profile columns must have equal length"));
        }
        if r.len() < 2 {
            return Err(Error::arg("profile needs at least two radii"));
        }
        if r.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::arg("profile radii must be strictly increasing"));
        }
        let bad = |x: &T| !x.is_finite() || *x < T::zero();
        if r.iter().any(bad) || rho.iter().any(bad) || m_dm.iter().any(bad) {
            return Err(Error::arg("profile values must be finite and non-negative"));
        }
        if m_dm[0] != T::zero() {
            return Err(Error::arg("enclosed gas mass must vanish at r0"));
        }
        Ok(Self {
            r,
            rho,
            m_dm,
            truncated: false,
        })
    }

    pub fn r(&self) -> &[T] {
        &self.r
    }

    pub fn rho(&self) -> &[T] {
        &self.rho
    }

    /// Gas mass between `r0` and each radius.
    pub fn m_dm(&self) -> &[T] {
        &self.m_dm
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Set when the solution went non-positive and the grid was cut short.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn r_min(&self) -> T {
        self.r[0]
    }

    pub fn r_max(&self) -> T {
        self.r[self.r.len() - 1]
    }

    /// Either identically zero density, or strictly positive and strictly
    /// decreasing with non-decreasing enclosed mass.
    pub fn check_physical(&self) -> Result<()> {
        if self.rho.iter().all(|&x| x == T::zero()) {
            return if self.m_dm.iter().all(|&m| m == T::zero()) {
                Ok(())
            } else {
                Err(Error::domain("empty profile with non-zero mass"))
            };
        }
        if self.rho.iter().any(|&x| x <= T::zero()) {
            return Err(Error::domain("density must be strictly positive"));
        }
        if self.rho.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::domain("density must be strictly decreasing"));
        }
        if self.m_dm.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::domain("enclosed mass must be non-decreasing"));
        }
        Ok(())
    }

    fn check_range(&self, r: T) -> Result<()> {
        if r >= self.r_min() && r <= self.r_max() {
            Ok(())
        } else {
            Err(Error::Range {
                what: "radius",
                value: r.as_f64(),
                lo: self.r_min().as_f64(),
                hi: self.r_max().as_f64(),
            })
        }
    }

    fn segment(&self, r: T) -> usize {
        self.r.partition_point(|&x| x <= r).clamp(1, self.r.len() - 1) - 1
    }

    /// Gas mass inside `r` (beyond `r0`), by cubic Hermite interpolation using
    /// `dM/dr = 4 pi rho r^2` at the bracketing nodes.
    pub fn enclosed_gas_mass(&self, r: T) -> Result<T> {
        self.check_range(r)?;
        let i = self.segment(r);
        let (x0, x1) = (self.r[i], self.r[i + 1]);
        let h = x1 - x0;
        let s = (r - x0) / h;
        let four_pi = T::lit(4.0 * PI);
        let d0 = four_pi * self.rho[i] * x0 * x0;
        let d1 = four_pi * self.rho[i + 1] * x1 * x1;
        let (s2, s3) = (s * s, s * s * s);
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let h00 = two * s3 - three * s2 + T::one();
        let h10 = s3 - two * s2 + s;
        let h01 = -two * s3 + three * s2;
        let h11 = s3 - s2;
        Ok(h00 * self.m_dm[i] + h10 * h * d0 + h01 * self.m_dm[i + 1] + h11 * h * d1)
    }

    /// `d ln rho / dr` at every node: second-order differences on the
    /// non-uniform grid, one-sided at the ends.
    fn log_density_gradient(&self) -> Result<Vec<T>> {
        if self.rho.iter().any(|&x| x <= T::zero()) {
            return Err(Error::domain("log-density gradient needs positive density"));
        }
        let n = self.r.len();
        let ln: Vec<T> = self.rho.iter().map(|x| x.ln()).collect();
        let x = &self.r;
        let mut out = vec![T::zero(); n];
        if n == 2 {
            let s = (ln[1] - ln[0]) / (x[1] - x[0]);
            return Ok(vec![s, s]);
        }
        for i in 0..n {
            let (a, b, c) = if i == 0 {
                (0, 1, 2)
            } else if i == n - 1 {
                (n - 3, n - 2, n - 1)
            } else {
                (i - 1, i, i + 1)
            };
            // Derivative at x[i] of the parabola through the three nodes.
            let xi = x[i];
            let la = (T::lit(2.0) * xi - x[b] - x[c]) / ((x[a] - x[b]) * (x[a] - x[c]));
            let lb = (T::lit(2.0) * xi - x[a] - x[c]) / ((x[b] - x[a]) * (x[b] - x[c]));
            let lc = (T::lit(2.0) * xi - x[a] - x[b]) / ((x[c] - x[a]) * (x[c] - x[b]));
            out[i] = la * ln[a] + lb * ln[b] + lc * ln[c];
        }
        Ok(out)
    }

    /// Finite-difference `d ln rho / d ln r` at `r`.
    pub fn log_slope(&self, r: T) -> Result<T> {
        self.check_range(r)?;
        let grad = self.log_density_gradient()?;
        let i = self.segment(r);
        let w = (r - self.r[i]) / (self.r[i + 1] - self.r[i]);
        Ok(r * (grad[i] + (grad[i + 1] - grad[i]) * w))
    }

    /// Density at `r`, interpolating `ln rho` linearly in `ln r` between nodes.
    pub fn density_at(&self, r: T) -> Result<T> {
        self.check_range(r)?;
        let i = self.segment(r);
        if r == self.r[i] {
            return Ok(self.rho[i]);
        }
        if r == self.r[i + 1] {
            return Ok(self.rho[i + 1]);
        }
        let (a, b) = (self.rho[i], self.rho[i + 1]);
        if a > T::zero() && b > T::zero() {
            let w = (r / self.r[i]).ln() / (self.r[i + 1] / self.r[i]).ln();
            Ok((a.ln() + (b.ln() - a.ln()) * w).exp())
        } else {
            let w = (r - self.r[i]) / (self.r[i + 1] - self.r[i]);
            Ok(a + (b - a) * w)
        }
    }

    /// Same profile resampled onto `grid` (within range).
    pub fn resample(&self, grid: &[T]) -> Result<Self> {
        let mut rho = Vec::with_capacity(grid.len());
        let mut m = Vec::with_capacity(grid.len());
        for &r in grid {
            rho.push(self.density_at(r)?);
            m.push(if r == self.r_min() { T::zero() } else { self.enclosed_gas_mass(r)? });
        }
        let mut out = Self::new(grid.to_vec(), rho, m)?;
        out.truncated = self.truncated;
        Ok(out)
    }
}

/// Circular speed against radius.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationCurve<T> {
    r: Vec<T>,
    v: Vec<T>,
}

impl<T: Real> RotationCurve<T> {
    pub fn new(r: Vec<T>, v: Vec<T>) -> Result<Self> {
        if r.len() != v.len() || r.is_empty() {
            return Err(Error::arg("rotation curve needs equal, non-empty r and v"));
        }
        if r.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::arg("rotation curve radii must be strictly increasing"));
        }
        if v.iter().any(|x| !(x.is_finite() && *x > T::zero())) {
            return Err(Error::arg("rotation speeds must be positive and finite"));
        }
        Ok(Self { r, v })
    }

    pub fn r(&self) -> &[T] {
        &self.r
    }

    pub fn v(&self) -> &[T] {
        &self.v
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Linear interpolation; `None` outside the grid.
    pub fn interpolate(&self, r: T) -> Option<T> {
        let (lo, hi) = (self.r[0], self.r[self.r.len() - 1]);
        if r < lo || r > hi {
            return None;
        }
        if self.r.len() == 1 {
            return Some(self.v[0]);
        }
        let i = self.r.partition_point(|&x| x <= r).clamp(1, self.r.len() - 1) - 1;
        let w = (r - self.r[i]) / (self.r[i + 1] - self.r[i]);
        Some(self.v[i] + (self.v[i + 1] - self.v[i]) * w)
    }
}

/// Ideal-gas pressure `(k_B T/m) rho`, in M_sun (km/s)^2 / kpc^3.
pub fn pressure<T: Real>(rho: T, params: &GasParameters<T>) -> Result<T> {
    if !(rho >= T::zero()) {
        return Err(Error::arg(format!("density must be non-negative, got {rho}")));
    }
    Ok(params.kt_over_m * rho)
}

/// `n` log-uniform radii from `r0` to `r_max`, both endpoints exact.
pub fn log_grid<T: Real>(r0: T, r_max: T, n: usize) -> Result<Vec<T>> {
    if !(r0 > T::zero() && r_max > r0) || n < 2 {
        return Err(Error::arg(format!(
            "log grid needs 0 < r0 < r_max and n >= 2 (r0 = {r0}, r_max = {r_max}, n = {n})"
        )));
    }
    let (a, b) = (r0.ln(), r_max.ln());
    let last = T::from_count(n - 1);
    let mut grid: Vec<T> = (0..n)
        .map(|i| (a + (b - a) * T::from_count(i) / last).exp())
        .collect();
    grid[0] = r0;
    grid[n - 1] = r_max;
    Ok(grid)
}

/// Solves the profile on the default 512-point log grid out to `r_max`.
pub fn solve_density_profile<T: Real>(
    params: &GasParameters<T>,
    r_max: T,
    rel_tol: T,
) -> Result<DensityProfile<T>> {
    params.validate()?;
    if !(r_max > params.r0) {
        return Err(Error::arg(format!("r_max = {r_max} must exceed r0 = {}", params.r0)));
    }
    let grid = log_grid(params.r0, r_max, DEFAULT_GRID_POINTS)?;
    solve_density_profile_on(params, &grid, rel_tol)
}

/// Solves the profile, reporting it exactly at the radii in `grid` (which must start at `r0`).
pub fn solve_density_profile_on<T: Real>(
    params: &GasParameters<T>,
    grid: &[T],
    rel_tol: T,
) -> Result<DensityProfile<T>> {
    params.validate()?;
    if !(rel_tol > T::zero()) {
        return Err(Error::arg("rel_tol must be positive"));
    }
    if grid.len() < 2 || grid[0] != params.r0 {
        return Err(Error::arg("grid must start at r0 and hold at least two radii"));
    }
    if params.rho0 == T::zero() {
        let zeros = vec![T::zero(); grid.len()];
        return DensityProfile::new(grid.to_vec(), zeros.clone(), zeros);
    }

    // Scaled state: u = rho / rho0, m = M / M0.
    let g = g_gal::<T>();
    let mass_coef = T::lit(4.0 * PI) * params.rho0 / params.m0;
    let grav_coef = g * params.m0 / params.kt_over_m;
    let rhs = |r: T, y: &[T], d: &mut [T]| {
        let (u, m) = (y[0], y[1]);
        d[0] = -grav_coef * u * (T::one() + m) / (r * r);
        d[1] = mass_coef * u * r * r;
    };

    let n = grid.len();
    let opts = IvpOptions::new(rel_tol, rel_tol * T::lit(1e-8))
        .checkpoints(grid[1..n - 1].to_vec())
        .record_steps(false);
    let traj = integrate_ivp_with(rhs, &[T::one(), T::zero()], (grid[0], grid[n - 1]), &opts)?;

    let mut r = Vec::with_capacity(n);
    let mut rho = Vec::with_capacity(n);
    let mut m_dm = Vec::with_capacity(n);
    let mut truncated = false;
    for (&ri, state) in traj.abscissae().iter().zip(traj.states()) {
        if !(state[0] > T::zero()) {
            truncated = true;
            break;
        }
        r.push(ri);
        rho.push(state[0] * params.rho0);
        m_dm.push(state[1] * params.m0);
    }
    m_dm[0] = T::zero();
    if r.len() < 2 {
        return Err(Error::domain("density vanished immediately beyond r0"));
    }
    let mut profile = DensityProfile::new(r, rho, m_dm)?;
    profile.truncated = truncated;
    Ok(profile)
}

/// `g(r) = G (M0 + M_dm(r)) / r^2`, in (km/s)^2 / kpc.
pub fn gravitational_field<T: Real>(
    profile: &DensityProfile<T>,
    params: &GasParameters<T>,
    r: T,
) -> Result<T> {
    let m = profile.enclosed_gas_mass(r)?;
    Ok(g_gal::<T>() * (params.m0 + m) / (r * r))
}

/// `v = sqrt(g r)` at every profile radius.
pub fn rotation_curve<T: Real>(
    profile: &DensityProfile<T>,
    params: &GasParameters<T>,
) -> Result<RotationCurve<T>> {
    let g = g_gal::<T>();
    let v = profile
        .r()
        .iter()
        .zip(profile.m_dm())
        .map(|(&r, &m)| {
            let field = g * (params.m0 + m) / (r * r);
            (field * r).sqrt()
        })
        .collect();
    RotationCurve::new(profile.r().to_vec(), v)
}

/// `sqrt(gamma k_B T / m)` in km/s.
pub fn isentropic_wave_speed<T: Real>(params: &GasParameters<T>) -> T {
    (params.gamma * params.kt_over_m).max(T::zero()).sqrt()
}

/// Normalized hydrostatic residual `|(k_B T/m) d ln rho/dr + g| / g` at `r`,
/// with the density gradient taken by finite differences on the profile grid.
pub fn euler_residual<T: Real>(
    profile: &DensityProfile<T>,
    params: &GasParameters<T>,
    r: T,
) -> Result<T> {
    if !(r > profile.r_min() && r < profile.r_max()) {
        return Err(Error::Range {
            what: "residual radius (open interval)",
            value: r.as_f64(),
            lo: profile.r_min().as_f64(),
            hi: profile.r_max().as_f64(),
        });
    }
    let grad = profile.log_density_gradient()?;
    let i = profile.segment(r);
    let w = (r - profile.r[i]) / (profile.r[i + 1] - profile.r[i]);
    let dln = grad[i] + (grad[i + 1] - grad[i]) * w;
    let g = gravitational_field(profile, params, r)?;
    Ok((params.kt_over_m * dln + g).abs() / g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::cumulative_trapezoid;
    use proptest::prelude::*;

    fn milky_way() -> GasParameters<f64> {
        GasParameters::milky_way()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn pressure_is_linear() {
        let p = milky_way().with_kt_over_m(8.284e4);
        assert_eq!(pressure(0.0, &p).unwrap(), 0.0);
        assert!(rel(pressure(1e7, &p).unwrap(), 8.284e11) < 1e-12);
        assert_eq!(pressure(2e7, &p).unwrap(), 2.0 * pressure(1e7, &p).unwrap());
        assert!(pressure(-1.0, &p).is_err());
    }

    #[test]
    fn parameter_validation() {
        assert!(GasParameters::new(1.0, 1.0, 1.0, 0.0, 5.0 / 3.0).is_ok());
        assert!(GasParameters::new(0.0, 1.0, 1.0, 0.0, 5.0 / 3.0).is_err());
        assert!(GasParameters::new(1.0, -1.0, 1.0, 0.0, 5.0 / 3.0).is_err());
        assert!(GasParameters::new(1.0, 1.0, 0.0, 0.0, 5.0 / 3.0).is_err());
        assert!(GasParameters::new(1.0, 1.0, 1.0, -1.0, 5.0 / 3.0).is_err());
        assert!(GasParameters::new(1.0, 1.0, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn empty_gas_gives_zero_profile() {
        let p = GasParameters { rho0: 0.0, ..milky_way() };
        let prof = solve_density_profile(&p, 100.0, 1e-8).unwrap();
        assert!(prof.rho().iter().all(|&x| x == 0.0));
        assert!(prof.m_dm().iter().all(|&x| x == 0.0));
        prof.check_physical().unwrap();
    }

    #[test]
    fn boundary_conditions_exact() {
        let p = milky_way();
        let prof = solve_density_profile(&p, 250.0, 1e-9).unwrap();
        assert_eq!(prof.r()[0], p.r0);
        assert_eq!(prof.rho()[0], p.rho0);
        assert_eq!(prof.m_dm()[0], 0.0);
        assert_eq!(prof.len(), DEFAULT_GRID_POINTS);
        assert_eq!(prof.r_max(), 250.0);
        assert!(!prof.truncated());
        prof.check_physical().unwrap();
    }

    #[test]
    fn self_convergence_between_tolerances() {
        let p = milky_way();
        let a = solve_density_profile(&p, 250.0, 1e-8).unwrap();
        let b = solve_density_profile(&p, 250.0, 1e-10).unwrap();
        let i = a.r().partition_point(|&r| r < 50.0);
        let ra = a.density_at(50.0).unwrap();
        let rb = b.density_at(50.0).unwrap();
        assert!(rel(ra, rb) < 1e-6, "{ra} vs {rb}");
        assert!(rel(a.rho()[i], b.rho()[i]) < 1e-6);
    }

    #[test]
    fn field_at_r0_is_central_mass_only() {
        let p = milky_way();
        let prof = solve_density_profile(&p, 100.0, 1e-9).unwrap();
        let g = gravitational_field(&prof, &p, p.r0).unwrap();
        assert!(rel(g, g_gal::<f64>() * p.m0 / (p.r0 * p.r0)) < 1e-15);
        assert!(gravitational_field(&prof, &p, 5.0).is_err());
        assert!(gravitational_field(&prof, &p, 101.0).is_err());
    }

    #[test]
    fn empty_gas_field_is_inverse_square() {
        let p = GasParameters { rho0: 0.0, ..milky_way() };
        let prof = solve_density_profile(&p, 100.0, 1e-8).unwrap();
        let g1 = gravitational_field(&prof, &p, p.r0).unwrap();
        let g2 = gravitational_field(&prof, &p, 2.0 * p.r0).unwrap();
        assert!(rel(g2, g1 / 4.0) < 1e-14);
    }

    #[test]
    fn enclosed_mass_times_r2_nondecreasing() {
        let p = milky_way();
        let prof = solve_density_profile(&p, 250.0, 1e-9).unwrap();
        let mut prev = 0.0;
        for k in 0..2000 {
            let r = p.r0 + (250.0 - p.r0) * k as f64 / 1999.0;
            let gr2 = gravitational_field(&prof, &p, r).unwrap() * r * r;
            assert!(gr2 >= prev);
            prev = gr2;
        }
    }

    #[test]
    fn keplerian_rotation_without_gas() {
        let p = GasParameters { rho0: 0.0, m0: 9e10, r0: 8.34, ..milky_way() };
        let prof = solve_density_profile(&p, 4.0 * 8.34, 1e-8).unwrap();
        let curve = rotation_curve(&prof, &p).unwrap();
        let v0 = curve.v()[0];
        assert!((v0 - (4.30091e-6f64 * 9e10 / 8.34).sqrt()).abs() < 1e-9);
        assert!((v0 - 215.5).abs() < 0.1, "{v0}");
        let v_last = *curve.v().last().unwrap();
        assert!(rel(v_last, v0 / 2.0) < 1e-14);
    }

    #[test]
    fn wave_speed() {
        let vs = isentropic_wave_speed(&milky_way());
        assert!((vs - 371.6).abs() < 0.1, "{vs}");
        assert!(rel(vs, 370.0) < 0.01);
        let p = GasParameters { kt_over_m: 0.0, ..milky_way() };
        assert_eq!(isentropic_wave_speed(&p), 0.0);
        let p = GasParameters { kt_over_m: 3.0, gamma: 3.0, ..milky_way() };
        assert_eq!(isentropic_wave_speed(&p), 3.0);
    }

    #[test]
    fn euler_residual_small_on_solution() {
        let p = milky_way();
        let prof = solve_density_profile(&p, 250.0, 1e-10).unwrap();
        let res = euler_residual(&prof, &p, 2.0 * p.r0).unwrap();
        assert!(res < 1e-4, "{res}");
        assert!(euler_residual(&prof, &p, p.r0).is_err());
        assert!(euler_residual(&prof, &p, 250.0).is_err());
    }

    #[test]
    fn euler_residual_flags_corruption() {
        let p = milky_way();
        let prof = solve_density_profile(&p, 250.0, 1e-10).unwrap();
        let j = 100;
        let mut rho = prof.rho().to_vec();
        rho[j] *= 2.0;
        let bad = DensityProfile::new(prof.r().to_vec(), rho, prof.m_dm().to_vec()).unwrap();
        let r = 0.5 * (prof.r()[j] + prof.r()[j + 1]);
        let res = euler_residual(&bad, &p, r).unwrap();
        assert!(res > 1.0, "{res}");
    }

    #[test]
    fn euler_residual_is_one_for_flat_density() {
        let p = milky_way();
        let r = log_grid(p.r0, 50.0, 64).unwrap();
        let flat = DensityProfile::new(r.clone(), vec![1e7; 64], vec![0.0; 64]).unwrap();
        let res = euler_residual(&flat, &p, 20.0).unwrap();
        assert!((res - 1.0).abs() < 1e-12);
        assert!(flat.check_physical().is_err());
    }

    #[test]
    fn solver_mass_matches_trapezoid() {
        let p = milky_way();
        let prof = solve_density_profile(&p, 250.0, 1e-10).unwrap();
        let integrand: Vec<f64> = prof
            .r()
            .iter()
            .zip(prof.rho())
            .map(|(r, rho)| 4.0 * PI * rho * r * r)
            .collect();
        let trap = cumulative_trapezoid(prof.r(), &integrand).unwrap();
        let n = prof.len() - 1;
        assert!(rel(trap[n], prof.m_dm()[n]) < 1e-4);
    }

    #[test]
    fn hermite_mass_interpolation_is_accurate() {
        let p = milky_way();
        let coarse = solve_density_profile_on(&p, &log_grid(p.r0, 100.0, 64).unwrap(), 1e-11).unwrap();
        let fine = solve_density_profile_on(&p, &log_grid(p.r0, 100.0, 2048).unwrap(), 1e-11).unwrap();
        for k in (1..2047).step_by(37) {
            let r = fine.r()[k];
            let interp = coarse.enclosed_gas_mass(r).unwrap();
            assert!(rel(interp, fine.m_dm()[k]) < 1e-5, "r={r}");
        }
    }

    #[test]
    fn grid_must_start_at_r0() {
        let p = milky_way();
        assert!(solve_density_profile_on(&p, &[9.0, 10.0], 1e-8).is_err());
        assert!(solve_density_profile(&p, 8.0, 1e-8).is_err());
        assert!(solve_density_profile(&p, 100.0, 0.0).is_err());
    }

    #[test]
    fn single_precision_profile() {
        let p = GasParameters::<f32>::milky_way();
        let prof = solve_density_profile(&p, 250.0, 1e-5).unwrap();
        prof.check_physical().unwrap();
        let p64 = milky_way();
        let prof64 = solve_density_profile(&p64, 250.0, 1e-9).unwrap();
        let last = prof.len() - 1;
        assert!(rel(prof.rho()[last] as f64, prof64.rho()[last]) < 1e-3);
    }

    #[test]
    fn resample_keeps_boundary() {
        let p = milky_way();
        let prof = solve_density_profile(&p, 250.0, 1e-9).unwrap();
        let grid = log_grid(p.r0, 200.0, 100).unwrap();
        let rs = prof.resample(&grid).unwrap();
        assert_eq!(rs.m_dm()[0], 0.0);
        assert_eq!(rs.rho()[0], p.rho0);
        rs.check_physical().unwrap();
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn solved_profiles_are_physical(
            t_over_m in 0.5f64..50.0, m0 in 1e10f64..3e11, rho_pc3 in 1e-4f64..0.1,
        ) {
            let p = GasParameters {
                kt_over_m: units::t_over_m_to_velocity_sq(t_over_m).unwrap(),
                m0,
                rho0: units::density_msun_pc3_to_internal(rho_pc3).unwrap(),
                ..milky_way()
            };
            let prof = solve_density_profile(&p, 250.0, 1e-9).unwrap();
            prop_assert!(prof.check_physical().is_ok());
            for k in 1..10 {
                let r = prof.r()[k * prof.len() / 10];
                prop_assert!(euler_residual(&prof, &p, r).unwrap() < 1e-3);
            }
        }

        #[test]
        fn homology_scales_speed_by_sqrt_c(c in 0.2f64..5.0) {
            let p = milky_way();
            let q = GasParameters { m0: c * p.m0, rho0: c * p.rho0, kt_over_m: c * p.kt_over_m, ..p };
            let a = rotation_curve(&solve_density_profile(&p, 200.0, 1e-10).unwrap(), &p).unwrap();
            let b = rotation_curve(&solve_density_profile(&q, 200.0, 1e-10).unwrap(), &q).unwrap();
            for (va, vb) in a.v().iter().zip(b.v()).step_by(17) {
                prop_assert!(rel(*vb, va * c.sqrt()) < 1e-7);
            }
        }
    }
}
