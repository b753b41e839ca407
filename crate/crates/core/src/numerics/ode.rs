//! Explicit adaptive Runge-Kutta integration (Dormand-Prince 5(4)).

use crate::error::{Error, Result};
use crate::real::Real;

/// Hard cap on attempted steps for one integration.
pub const MAX_STEPS: usize = 1_000_000;

/// Solution samples of an initial-value problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    abscissae: Vec<T>,
    states: Vec<Vec<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn new(abscissae: Vec<T>, states: Vec<Vec<T>>) -> Result<Self> {
        if abscissae.len() != states.len() {
            return Err(Error::arg(format!(
                "{} abscissae but {} states",
                abscissae.len(),
                states.len()
            )));
        }
        if abscissae.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::arg("trajectory abscissae must be strictly increasing"));
        }
        Ok(Self { abscissae, states })
    }

    pub fn abscissae(&self) -> &[T] {
        &self.abscissae
    }

    pub fn states(&self) -> &[Vec<T>] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.abscissae.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissae.is_empty()
    }

    /// Final `(t, y)` sample.
    pub fn last(&self) -> Option<(T, &[T])> {
        let t = *self.abscissae.last()?;
        Some((t, self.states.last()?.as_slice()))
    }

    /// Samples of one state component.
    pub fn component(&self, index: usize) -> Vec<T> {
        self.states.iter().map(|s| s[index]).collect()
    }

    /// State at `t` by linear interpolation between stored samples.
    pub fn interpolate(&self, t: T) -> Option<Vec<T>> {
        let xs = &self.abscissae;
        let (first, last) = (*xs.first()?, *xs.last()?);
        if t < first || t > last {
            return None;
        }
        let hi = xs.partition_point(|&x| x < t).max(1).min(xs.len() - 1);
        if xs.len() == 1 {
            return Some(self.states[0].clone());
        }
        let lo = hi - 1;
        let w = (t - xs[lo]) / (xs[hi] - xs[lo]);
        Some(
            self.states[lo]
                .iter()
                .zip(&self.states[hi])
                .map(|(&a, &b)| a + (b - a) * w)
                .collect(),
        )
    }
}

/// Settings for [`integrate_ivp_with`].
#[derive(Debug, Clone)]
pub struct IvpOptions<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_steps: usize,
    /// Abscissae the integrator must land on exactly. Strictly inside the span, increasing.
    pub checkpoints: Vec<T>,
    /// When false only the span endpoints and the checkpoints are recorded.
    pub record_steps: bool,
}

impl<T: Real> IvpOptions<T> {
    pub fn new(rel_tol: T, abs_tol: T) -> Self {
        Self {
            rel_tol,
            abs_tol,
            max_steps: MAX_STEPS,
            checkpoints: Vec::new(),
            record_steps: true,
        }
    }

    pub fn checkpoints(mut self, checkpoints: Vec<T>) -> Self {
        self.checkpoints = checkpoints;
        self
    }

    pub fn record_steps(mut self, record: bool) -> Self {
        self.record_steps = record;
        self
    }
}

/// Integrates `y' = rhs(t, y)` over `span`, recording every accepted step.
///
/// `rhs(t, y, dydt)` writes the derivative into `dydt`.
pub fn integrate_ivp<T, F>(
    rhs: F,
    y0: &[T],
    span: (T, T),
    rel_tol: T,
    abs_tol: T,
) -> Result<Trajectory<T>>
where
    T: Real,
    F: FnMut(T, &[T], &mut [T]),
{
    integrate_ivp_with(rhs, y0, span, &IvpOptions::new(rel_tol, abs_tol))
}

// Dormand-Prince tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Tableau<T> {
    c: [T; 7],
    a: [[T; 6]; 7],
    e: [T; 7],
}

impl<T: Real> Tableau<T> {
    fn new() -> Self {
        Self {
            c: C.map(T::lit),
            a: A.map(|row| row.map(T::lit)),
            e: E.map(T::lit),
        }
    }
}

fn rms_norm<T: Real>(v: impl Iterator<Item = T>, n: usize) -> T {
    let sum = v.fold(T::zero(), |acc, x| acc + x * x);
    (sum / T::from_count(n.max(1))).sqrt()
}

fn eval<T: Real, F: FnMut(T, &[T], &mut [T])>(
    rhs: &mut F,
    t: T,
    y: &[T],
    out: &mut [T],
) -> Result<()> {
    rhs(t, y, out);
    if out.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::domain(format!("non-finite derivative at t = {}", t)))
    }
}

/// Integrates `y' = rhs(t, y)` over `span` with full control over recording.
pub fn integrate_ivp_with<T, F>(
    mut rhs: F,
    y0: &[T],
    span: (T, T),
    opts: &IvpOptions<T>,
) -> Result<Trajectory<T>>
where
    T: Real,
    F: FnMut(T, &[T], &mut [T]),
{
    let (a, b) = span;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::arg(format!("integration span [{a}, {b}] must satisfy a < b")));
    }
    if !(opts.rel_tol > T::zero()) || !(opts.abs_tol > T::zero()) {
        return Err(Error::arg("tolerances must be positive"));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("non-finite initial state"));
    }
    let mut prev = a;
    for &c in &opts.checkpoints {
        if !(c > prev && c < b) {
            return Err(Error::arg(format!(
                "checkpoint {c} not strictly increasing inside ({a}, {b})"
            )));
        }
        prev = c;
    }

    let tab = Tableau::<T>::new();
    let n = y0.len();
    let (rtol, atol) = (opts.rel_tol, opts.abs_tol);
    let eps = T::epsilon();

    let mut ts = vec![a];
    let mut ys = vec![y0.to_vec()];

    let mut t = a;
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<T>> = vec![vec![T::zero(); n]; 7];
    let mut stage = vec![T::zero(); n];
    let mut y_new = vec![T::zero(); n];
    eval(&mut rhs, t, &y, &mut k[0])?;

    let mut h = initial_step(&mut rhs, t, &y, &k[0], b - a, rtol, atol)?;
    let mut targets = opts.checkpoints.iter().copied().chain(std::iter::once(b));
    let mut target = targets.next().unwrap_or(b);
    let mut steps = 0usize;

    loop {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::Integration {
                last_good: t.as_f64(),
                reason: format!("step cap of {} exceeded", opts.max_steps),
            });
        }
        let h_min = T::lit(16.0) * eps * t.abs().max(T::one());
        if h < h_min {
            return Err(Error::Integration {
                last_good: t.as_f64(),
                reason: format!("step size underflow (h = {h:e})"),
            });
        }

        let remaining = target - t;
        let hits_target = h >= remaining * (T::one() - T::lit(4.0) * eps);
        let h_step = if hits_target { remaining } else { h };

        for s in 1..7 {
            for i in 0..n {
                let mut acc = T::zero();
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc = acc + tab.a[s][j] * kj[i];
                }
                stage[i] = y[i] + h_step * acc;
            }
            eval(&mut rhs, t + tab.c[s] * h_step, &stage, &mut k[s])?;
        }
        // Stage 7 is evaluated at the fifth-order solution (FSAL).
        y_new.copy_from_slice(&stage);

        let err = rms_norm(
            (0..n).map(|i| {
                let mut e = T::zero();
                for (s, ks) in k.iter().enumerate() {
                    e = e + tab.e[s] * ks[i];
                }
                let sc = atol + rtol * y[i].abs().max(y_new[i].abs());
                h_step * e / sc
            }),
            n,
        );
        if !err.is_finite() {
            h = h_step * T::lit(0.2);
            continue;
        }

        let fac = if err == T::zero() {
            T::lit(10.0)
        } else {
            (T::lit(0.9) * err.powf(T::lit(-0.2))).min(T::lit(10.0)).max(T::lit(0.2))
        };

        if err <= T::one() {
            t = if hits_target { target } else { t + h_step };
            std::mem::swap(&mut y, &mut y_new);
            let last = k.pop().expect("seven stages");
            k.insert(0, last);

            if hits_target || opts.record_steps {
                ts.push(t);
                ys.push(y.clone());
            }
            if hits_target {
                if t == b {
                    break;
                }
                target = targets.next().unwrap_or(b);
            }
            h = h_step * fac;
        } else {
            h = h_step * fac.min(T::one());
        }
    }

    Trajectory::new(ts, ys)
}

fn initial_step<T, F>(
    rhs: &mut F,
    t: T,
    y: &[T],
    f0: &[T],
    span: T,
    rtol: T,
    atol: T,
) -> Result<T>
where
    T: Real,
    F: FnMut(T, &[T], &mut [T]),
{
    let n = y.len();
    let sc: Vec<T> = y.iter().map(|v| atol + rtol * v.abs()).collect();
    let d0 = rms_norm(y.iter().zip(&sc).map(|(&v, &s)| v / s), n);
    let d1 = rms_norm(f0.iter().zip(&sc).map(|(&v, &s)| v / s), n);
    let tiny = T::lit(1e-5);
    let h0 = if d0 < tiny || d1 < tiny {
        T::lit(1e-6) * span
    } else {
        (T::lit(0.01) * d0 / d1).min(span)
    };
    let y1: Vec<T> = y.iter().zip(f0).map(|(&v, &d)| v + h0 * d).collect();
    let mut f1 = vec![T::zero(); n];
    eval(rhs, t + h0, &y1, &mut f1)?;
    let d2 = rms_norm(
        f1.iter().zip(f0).zip(&sc).map(|((&a, &b), &s)| (a - b) / s),
        n,
    ) / h0;
    let dmax = d1.max(d2);
    let h1 = if dmax <= T::lit(1e-15) {
        (h0 * T::lit(1e-3)).max(T::lit(1e-6) * span)
    } else {
        (T::lit(0.01) / dmax).powf(T::lit(0.2))
    };
    let floor = T::lit(1600.0) * T::epsilon() * t.abs().max(T::one());
    Ok((T::lit(100.0) * h0).min(h1).max(floor).min(span))
}
