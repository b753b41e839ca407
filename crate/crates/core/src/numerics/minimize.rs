//! Bounded one-dimensional minimization (Brent: golden section with parabolic steps).

use crate::error::{Error, Result};
use crate::real::Real;

/// Evaluation cap for [`minimize_scalar`].
pub const MAX_EVALUATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum<T> {
    pub argmin: T,
    pub fmin: T,
    pub evaluations: usize,
}

/// Minimizes `f` on `[lo, hi]` to an absolute abscissa tolerance `tol`.
///
/// `+inf` is accepted as an "infeasible" value; NaN or `-inf` is a domain error.
/// The bracket edges are also evaluated, so the result is never worse than either edge.
pub fn minimize_scalar<T, F>(f: F, bracket: (T, T), tol: T) -> Result<Minimum<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    minimize_scalar_capped(f, bracket, tol, MAX_EVALUATIONS)
}

pub fn minimize_scalar_capped<T, F>(
    mut f: F,
    bracket: (T, T),
    tol: T,
    max_evaluations: usize,
) -> Result<Minimum<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let (lo, hi) = bracket;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::arg(format!("bracket [{lo}, {hi}] must satisfy lo < hi")));
    }
    if !(tol > T::zero()) {
        return Err(Error::arg("tolerance must be positive"));
    }

    let mut evaluations = 0usize;
    let mut best = (T::nan(), T::infinity());
    let mut call = |x: T, evaluations: &mut usize, best: &mut (T, T)| -> Result<T> {
        if *evaluations >= max_evaluations {
            return Err(Error::Convergence {
                evaluations: *evaluations,
                best_x: best.0.as_f64(),
                best_f: best.1.as_f64(),
            });
        }
        *evaluations += 1;
        let fx = f(x);
        if fx.is_nan() || fx == T::neg_infinity() {
            return Err(Error::domain(format!("objective is {fx} at x = {x}")));
        }
        if fx < best.1 || best.0.is_nan() {
            *best = (x, fx);
        }
        Ok(fx)
    };

    let golden = T::lit(0.381_966_011_250_105_1);
    let sqrt_eps = T::epsilon().sqrt();
    let half = T::lit(0.5);
    let two = T::lit(2.0);

    let (mut a, mut b) = (lo, hi);
    let mut x = a + golden * (b - a);
    let (mut v, mut w) = (x, x);
    let mut fx = call(x, &mut evaluations, &mut best)?;
    let (mut fv, mut fw) = (fx, fx);
    let (mut d, mut e) = (T::zero(), T::zero());

    loop {
        let xm = half * (a + b);
        let tol1 = sqrt_eps * x.abs() + tol / T::lit(3.0);
        let tol2 = two * tol1;
        if (x - xm).abs() <= tol2 - half * (b - a) {
            break;
        }

        let mut take_golden = true;
        if e.abs() > tol1 {
            let mut r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = two * (q - r);
            if q > T::zero() {
                p = -p;
            }
            q = q.abs();
            r = e;
            e = d;
            if p.abs() < (half * q * r).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if xm >= x { tol1 } else { -tol1 };
                }
                take_golden = false;
            }
        }
        if take_golden {
            e = if x >= xm { a - x } else { b - x };
            d = golden * e;
        }

        let u = if d.abs() >= tol1 {
            x + d
        } else if d >= T::zero() {
            x + tol1
        } else {
            x - tol1
        };
        let fu = call(u, &mut evaluations, &mut best)?;

        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }

    // Edge points close the gap for minima sitting on the bracket boundary.
    let mut result = (x, fx);
    for edge in [lo, hi] {
        let fe = call(edge, &mut evaluations, &mut best)?;
        if fe < result.1 {
            result = (edge, fe);
        }
    }
    Ok(Minimum {
        argmin: result.0,
        fmin: result.1,
        evaluations,
    })
}
