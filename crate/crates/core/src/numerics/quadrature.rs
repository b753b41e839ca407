use crate::error::{Error, Result};
use crate::real::Real;

/// Running trapezoid-rule integral of `ys` over `xs`, starting at zero.
pub fn cumulative_trapezoid<T: Real>(xs: &[T], ys: &[T]) -> Result<Vec<T>> {
    if xs.len() != ys.len() {
        return Err(Error::arg(format!(
            "xs has {} samples but ys has {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::arg("cumulative_trapezoid needs at least two samples"));
    }
    if xs.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::arg("xs must be strictly increasing"));
    }
    let half = T::lit(0.5);
    let mut out = Vec::with_capacity(xs.len());
    let mut acc = T::zero();
    out.push(acc);
    for i in 1..xs.len() {
        acc = acc + half * (xs[i] - xs[i - 1]) * (ys[i] + ys[i - 1]);
        out.push(acc);
    }
    Ok(out)
}
