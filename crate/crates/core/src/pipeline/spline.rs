//! Not-a-knot cubic spline interpolation.

use crate::error::{Error, Result};

/// Cubic spline through `(t, y)` knots with not-a-knot end conditions.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    t: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(t: &[f64], y: &[f64]) -> Result<Self> {
        if t.len() != y.len() {
            return Err(Error::dim(t.len(), y.len(), "spline knot values"));
        }
        if t.len() < 4 {
            return Err(Error::ParameterDomain(format!(
                "not-a-knot spline needs at least 4 knots, got {}",
                t.len()
            )));
        }
        if t.iter().chain(y).any(|v| !v.is_finite()) {
            return Err(Error::ParameterDomain("spline knots must be finite".into()));
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::ParameterDomain(
                "spline knot times must be strictly increasing".into(),
            ));
        }
        let m = second_derivatives(t, y);
        Ok(Self {
            t: t.to_vec(),
            y: y.to_vec(),
            m,
        })
    }

    pub fn span(&self) -> (f64, f64) {
        (self.t[0], self.t[self.t.len() - 1])
    }

    /// Evaluates at `q`, which must lie inside the knot span.
    pub fn eval(&self, q: f64) -> Result<f64> {
        let (lo, hi) = self.span();
        if !(lo..=hi).contains(&q) {
            return Err(Error::OutOfRange {
                lo,
                hi,
                offending: vec![q],
            });
        }
        Ok(self.eval_unchecked(q))
    }

    fn eval_unchecked(&self, q: f64) -> f64 {
        // index of the first knot strictly greater than q
        let upper = self.t.partition_point(|&k| k <= q);
        if upper > 0 && self.t[upper - 1] == q {
            return self.y[upper - 1];
        }
        let i = upper.clamp(1, self.t.len() - 1) - 1;
        let (t0, t1) = (self.t[i], self.t[i + 1]);
        let h = t1 - t0;
        let (a, b) = (t1 - q, q - t0);
        self.m[i] * a * a * a / (6.0 * h)
            + self.m[i + 1] * b * b * b / (6.0 * h)
            + (self.y[i] / h - self.m[i] * h / 6.0) * a
            + (self.y[i + 1] / h - self.m[i + 1] * h / 6.0) * b
    }

    /// Evaluates at every query; all must be inside the span.
    pub fn eval_many(&self, queries: &[f64]) -> Result<Vec<f64>> {
        let (lo, hi) = self.span();
        let offending: Vec<f64> = queries
            .iter()
            .copied()
            .filter(|q| !(lo..=hi).contains(q))
            .collect();
        if !offending.is_empty() {
            return Err(Error::OutOfRange { lo, hi, offending });
        }
        Ok(queries.iter().map(|&q| self.eval_unchecked(q)).collect())
    }
}

/// Resamples `(knots_t, knots_y)` at `query_t`.
pub fn spline_resample(knots_t: &[f64], knots_y: &[f64], query_t: &[f64]) -> Result<Vec<f64>> {
    CubicSpline::new(knots_t, knots_y)?.eval_many(query_t)
}

/// Solves for knot second derivatives. The not-a-knot rows are used to
/// eliminate the two end moments, leaving a tridiagonal system in the
/// interior moments.
fn second_derivatives(t: &[f64], y: &[f64]) -> Vec<f64> {
    let n = t.len();
    let h: Vec<f64> = t.windows(2).map(|w| w[1] - w[0]).collect();
    let k = n - 2;
    let mut sub = vec![0.0; k];
    let mut diag = vec![0.0; k];
    let mut sup = vec![0.0; k];
    let mut rhs = vec![0.0; k];
    for r in 0..k {
        let i = r + 1;
        sub[r] = h[i - 1];
        diag[r] = 2.0 * (h[i - 1] + h[i]);
        sup[r] = h[i];
        rhs[r] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
    }
    // M0 = ((h0 + h1) M1 - h0 M2) / h1
    let (h0, h1) = (h[0], h[1]);
    diag[0] += h0 * (h0 + h1) / h1;
    sup[0] -= h0 * h0 / h1;
    // M_{n-1} = ((a + b) M_{n-2} - b M_{n-3}) / a, a = h[n-3], b = h[n-2]
    let (a, b) = (h[n - 3], h[n - 2]);
    diag[k - 1] += b * (a + b) / a;
    sub[k - 1] -= b * b / a;

    // n >= 4, so there are at least two interior moments
    let interior = thomas(&sub, &diag, &sup, &rhs);
    let mut m = Vec::with_capacity(n);
    m.push(((h0 + h1) * interior[0] - h0 * interior[1]) / h1);
    m.extend_from_slice(&interior);
    m.push(((a + b) * interior[k - 1] - b * interior[k - 2]) / a);
    m
}

fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let k = diag.len();
    let mut c = vec![0.0; k];
    let mut d = vec![0.0; k];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..k {
        let denom = diag[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / denom;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / denom;
    }
    let mut x = vec![0.0; k];
    x[k - 1] = d[k - 1];
    for i in (0..k - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}
