//! Physical constants and the boundary conversions into the internal unit system.
//!
//! Internal units: length in kpc, mass in solar masses, velocity in km/s. The
//! gas temperature enters only as `k_B T / m`, carried in (km/s)^2.
//!
//! The temperature-over-mass input convention is millikelvin per 1e-36 kg:
//! 5.35 mK over 0.89e-36 kg gives T/m close to 6 in these units, and
//! `sqrt(5/3 * k_B T / m)` then comes out near 370 km/s.

use crate::error::{Error, Result};
use crate::real::Real;

/// Physical constants, SI unless noted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    /// Gravitational constant in kpc (km/s)^2 / M_sun.
    pub g_gal: f64,
    /// Gravitational constant in m^3 / (kg s^2).
    pub g_si: f64,
    /// Boltzmann constant in J/K.
    pub k_b: f64,
    pub m_sun_kg: f64,
    pub pc_m: f64,
    pub kpc_m: f64,
    /// Mass of 1 eV/c^2 in kg.
    pub ev_per_c2_kg: f64,
}

pub const CONSTANTS: Constants = Constants {
    g_gal: 4.30091e-6,
    g_si: 6.674_30e-11,
    k_b: 1.380_649e-23,
    m_sun_kg: 1.988_47e30,
    pc_m: 3.085_677_581_491_367e16,
    kpc_m: 3.085_677_581_491_367e19,
    ev_per_c2_kg: 1.782_66e-36,
};

/// `G` in kpc (km/s)^2 / M_sun.
#[inline]
pub fn g_gal<T: Real>() -> T {
    T::lit(CONSTANTS.g_gal)
}

// mK -> K, per 1e-36 kg -> per kg, m^2/s^2 -> (km/s)^2
const T_OVER_M_SCALE: f64 = 1.380_649e-23 * 1e-3 / 1e-36 / 1e6;

fn non_negative<T: Real>(what: &str, x: T) -> Result<T> {
    if x >= T::zero() && x.is_finite() {
        Ok(x)
    } else {
        Err(Error::arg(format!("{what} must be a finite non-negative number, got {x}")))
    }
}

/// T/m in mK per 1e-36 kg -> `k_B T / m` in (km/s)^2.
pub fn t_over_m_to_velocity_sq<T: Real>(t_over_m: T) -> Result<T> {
    Ok(non_negative("T/m", t_over_m)? * T::lit(T_OVER_M_SCALE))
}

/// Inverse of [`t_over_m_to_velocity_sq`].
pub fn velocity_sq_to_t_over_m<T: Real>(kt_over_m: T) -> Result<T> {
    Ok(non_negative("k_B T/m", kt_over_m)? / T::lit(T_OVER_M_SCALE))
}

/// M_sun/pc^3 -> M_sun/kpc^3.
pub fn density_msun_pc3_to_internal<T: Real>(rho: T) -> Result<T> {
    Ok(non_negative("density", rho)? * T::lit(1e9))
}

/// M_sun/kpc^3 -> M_sun/pc^3.
pub fn density_internal_to_msun_pc3<T: Real>(rho: T) -> Result<T> {
    Ok(non_negative("density", rho)? / T::lit(1e9))
}

pub fn neutrino_mass_ev_to_kg<T: Real>(m_ev: T) -> Result<T> {
    Ok(non_negative("mass", m_ev)? * T::lit(CONSTANTS.ev_per_c2_kg))
}

pub fn neutrino_mass_kg_to_ev<T: Real>(m_kg: T) -> Result<T> {
    Ok(non_negative("mass", m_kg)? / T::lit(CONSTANTS.ev_per_c2_kg))
}
