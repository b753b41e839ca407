//! One-parameter chi-square fit of T/m to an observed rotation curve.

use crate::error::{Error, Result};
use crate::gas::{
    log_grid, rotation_curve, solve_density_profile_on, GasParameters, RotationCurve,
    DEFAULT_GRID_POINTS,
};
use crate::numerics::minimize_scalar;
use crate::real::Real;
use crate::units;

/// Uncertainty assumed when the data omit one, km/s.
pub const DEFAULT_SIGMA_KMS: f64 = 5.0;
/// T/m search range, mK per 1e-36 kg.
pub const DEFAULT_BRACKET: (f64, f64) = (0.5, 50.0);
pub const DEFAULT_FIT_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservedPoint<T> {
    /// kpc
    pub r: T,
    /// km/s
    pub v: T,
    /// km/s
    pub sigma: T,
}

/// Measured rotation speeds, sorted by radius.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservedCurve<T> {
    points: Vec<ObservedPoint<T>>,
}

impl<T: Real> ObservedCurve<T> {
    /// Sorts by radius; rejects duplicates, non-finite values and non-positive sigma.
    pub fn new(mut points: Vec<ObservedPoint<T>>) -> Result<Self> {
        for p in &points {
            if !(p.r.is_finite() && p.v.is_finite() && p.sigma.is_finite()) {
                return Err(Error::arg(format!("non-finite observation at r = {}", p.r)));
            }
            if !(p.sigma > T::zero()) {
                return Err(Error::arg(format!("sigma must be positive at r = {}", p.r)));
            }
        }
        points.sort_by(|a, b| a.r.partial_cmp(&b.r).expect("finite"));
        if let Some(w) = points.windows(2).find(|w| w[0].r == w[1].r) {
            return Err(Error::arg(format!("duplicate radius {}", w[0].r)));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[ObservedPoint<T>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn radii(&self) -> Vec<T> {
        self.points.iter().map(|p| p.r).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult<T> {
    /// mK per 1e-36 kg.
    pub t_over_m_best: T,
    pub chi2: T,
    /// `chi2 / (n - 1)`, or `chi2` for a single point.
    pub reduced_chi2: T,
    pub evaluations: usize,
    pub bracket: (T, T),
    /// Best value lies within the tolerance of a bracket edge.
    pub boundary_hit: bool,
}

/// Knobs for [`fit_t_over_m_with`].
#[derive(Debug, Clone, Copy)]
pub struct FitOptions<T> {
    pub bracket: (T, T),
    pub tol: T,
    pub rel_tol: T,
    pub grid_points: usize,
}

impl<T: Real> Default for FitOptions<T> {
    fn default() -> Self {
        Self {
            bracket: (T::lit(DEFAULT_BRACKET.0), T::lit(DEFAULT_BRACKET.1)),
            tol: T::lit(DEFAULT_FIT_TOL),
            rel_tol: T::lit(1e-9),
            grid_points: DEFAULT_GRID_POINTS,
        }
    }
}

/// `sum(((v_model - v) / sigma)^2)` with the model linearly interpolated.
pub fn chi_square<T: Real>(model: &RotationCurve<T>, observed: &ObservedCurve<T>) -> Result<T> {
    let mut sum = T::zero();
    let (lo, hi) = (model.r()[0], model.r()[model.len() - 1]);
    for (i, p) in observed.points().iter().enumerate() {
        let vm = model.interpolate(p.r).ok_or_else(|| Error::Range {
            what: if i == 0 { "observed point 0 radius" } else { "observed point radius" },
            value: p.r.as_f64(),
            lo: lo.as_f64(),
            hi: hi.as_f64(),
        })?;
        let z = (vm - p.v) / p.sigma;
        sum = sum + z * z;
    }
    Ok(sum)
}

/// Rotation curve for one trial T/m on the grid used by the fit.
pub fn model_curve<T: Real>(
    template: &GasParameters<T>,
    t_over_m: T,
    r_max: T,
    rel_tol: T,
    grid_points: usize,
) -> Result<RotationCurve<T>> {
    let params = template.with_kt_over_m(units::t_over_m_to_velocity_sq(t_over_m)?);
    let grid = log_grid(params.r0, r_max, grid_points)?;
    let profile = solve_density_profile_on(&params, &grid, rel_tol)?;
    if profile.truncated() {
        return Err(Error::domain("density profile truncated before the outermost datum"));
    }
    rotation_curve(&profile, &params)
}

/// Fits T/m (mK per 1e-36 kg) inside `bracket` with `M0`, `r0`, `rho0` held at the template values.
pub fn fit_t_over_m<T: Real>(
    observed: &ObservedCurve<T>,
    template: &GasParameters<T>,
    bracket: (T, T),
    tol: T,
) -> Result<FitResult<T>> {
    let opts = FitOptions {
        bracket,
        tol,
        ..FitOptions::default()
    };
    fit_t_over_m_with(observed, template, &opts)
}

pub fn fit_t_over_m_with<T: Real>(
    observed: &ObservedCurve<T>,
    template: &GasParameters<T>,
    opts: &FitOptions<T>,
) -> Result<FitResult<T>> {
    let (lo, hi) = opts.bracket;
    if !(lo > T::zero() && lo < hi) {
        return Err(Error::arg(format!("bracket [{lo}, {hi}] must be positive with lo < hi")));
    }
    if observed.is_empty() {
        return Err(Error::arg("no observed points to fit"));
    }
    let first = observed.points()[0].r;
    if first < template.r0 {
        return Err(Error::Range {
            what: "observed radius",
            value: first.as_f64(),
            lo: template.r0.as_f64(),
            hi: f64::INFINITY,
        });
    }
    let last = observed.points()[observed.len() - 1].r;
    let r_max = if last > template.r0 {
        last
    } else {
        template.r0 * T::lit(1.01)
    };

    let objective = |t: T| -> T {
        model_curve(template, t, r_max, opts.rel_tol, opts.grid_points)
            .and_then(|curve| chi_square(&curve, observed))
            .unwrap_or(T::infinity())
    };
    let min = minimize_scalar(objective, (lo, hi), opts.tol)?;
    if !min.fmin.is_finite() {
        return Err(Error::Fit(format!(
            "model failed at every trial T/m in [{lo}, {hi}]"
        )));
    }
    let dof = observed.len().saturating_sub(1).max(1);
    let boundary_hit = min.argmin - lo <= opts.tol || hi - min.argmin <= opts.tol;
    Ok(FitResult {
        t_over_m_best: min.argmin,
        chi2: min.fmin,
        reduced_chi2: min.fmin / T::from_count(dof),
        evaluations: min.evaluations,
        bracket: (lo, hi),
        boundary_hit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas::DEFAULT_R0;

    fn pts(v: &[(f64, f64, f64)]) -> ObservedCurve<f64> {
        ObservedCurve::new(v.iter().map(|&(r, v, sigma)| ObservedPoint { r, v, sigma }).collect()).unwrap()
    }

    fn line() -> RotationCurve<f64> {
        RotationCurve::new(vec![10.0, 20.0, 30.0], vec![200.0, 210.0, 220.0]).unwrap()
    }

    #[test]
    fn chi_square_arithmetic() {
        let m = line();
        assert_eq!(chi_square(&m, &pts(&[(10.0, 200.0, 1.0), (15.0, 205.0, 1.0)])).unwrap(), 0.0);
        assert_eq!(chi_square(&m, &pts(&[(20.0, 211.0, 1.0)])).unwrap(), 1.0);
        assert_eq!(chi_square(&m, &pts(&[(10.0, 202.0, 1.0), (30.0, 217.0, 1.0)])).unwrap(), 13.0);
        assert_eq!(chi_square(&m, &pts(&[(20.0, 220.0, 5.0)])).unwrap(), 4.0);
    }

    #[test]
    fn chi_square_out_of_range() {
        let err = chi_square(&line(), &pts(&[(35.0, 1.0, 1.0)])).unwrap_err();
        assert!(matches!(err, Error::Range { value, .. } if value == 35.0));
    }

    #[test]
    fn chi_square_ignores_input_order() {
        let a = pts(&[(12.0, 201.0, 2.0), (25.0, 230.0, 3.0), (18.0, 190.0, 1.0)]);
        let b = pts(&[(25.0, 230.0, 3.0), (18.0, 190.0, 1.0), (12.0, 201.0, 2.0)]);
        assert_eq!(chi_square(&line(), &a).unwrap(), chi_square(&line(), &b).unwrap());
    }

    #[test]
    fn observed_curve_validation() {
        let p = |r, s| ObservedPoint { r, v: 200.0, sigma: s };
        assert!(ObservedCurve::new(vec![p(10.0, 0.0)]).is_err());
        assert!(ObservedCurve::new(vec![p(10.0, 1.0), p(10.0, 1.0)]).is_err());
        let c = ObservedCurve::new(vec![p(20.0, 1.0), p(10.0, 1.0)]).unwrap();
        assert_eq!(c.radii(), vec![10.0, 20.0]);
    }

    #[test]
    fn fit_rejects_bad_input() {
        let t = GasParameters::milky_way();
        let obs = pts(&[(20.0, 250.0, 5.0)]);
        assert!(fit_t_over_m(&obs, &t, (5.0, 1.0), 1e-3).is_err());
        assert!(fit_t_over_m(&obs, &t, (0.0, 1.0), 1e-3).is_err());
        assert!(fit_t_over_m(&ObservedCurve::new(vec![]).unwrap(), &t, (1.0, 20.0), 1e-3).is_err());
        let inner = pts(&[(DEFAULT_R0 - 1.0, 250.0, 5.0)]);
        assert!(matches!(fit_t_over_m(&inner, &t, (1.0, 20.0), 1e-3), Err(Error::Range { .. })));
    }

    #[test]
    fn keplerian_data_pushes_to_lower_edge() {
        let t = GasParameters::<f64>::milky_way();
        let g = crate::units::g_gal::<f64>();
        let obs = ObservedCurve::new(
            (0..12)
                .map(|i| {
                    let r = 10.0 + 15.0 * i as f64;
                    ObservedPoint { r, v: (g * t.m0 / r).sqrt(), sigma: 5.0 }
                })
                .collect(),
        )
        .unwrap();
        let fit = fit_t_over_m(&obs, &t, (0.5, 50.0), 1e-3).unwrap();
        assert!(fit.boundary_hit, "{fit:?}");
        assert!(fit.t_over_m_best - 0.5 <= 1e-3);
    }
}
