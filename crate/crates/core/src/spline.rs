//! One-dimensional interpolating splines stored in Hermite form.
//!
//! Every variant reduces to knot values plus knot derivatives; evaluation is
//! shared.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Spline {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

fn check_knots(x: &[f64], y: &[f64], min: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "{} knots but {} values",
            x.len(),
            y.len()
        )));
    }
    if x.len() < min {
        return Err(Error::InvalidArgument(format!(
            "spline needs at least {min} knots, got {}",
            x.len()
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite spline data".into()));
    }
    for i in 0..x.len() - 1 {
        if !(x[i + 1] > x[i]) {
            return Err(Error::DegenerateSegment { index: i });
        }
    }
    Ok(())
}

fn slopes(x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..h.len()).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    (h, delta)
}

/// Solves a tridiagonal system (Thomas algorithm); `a` sub, `b` main, `c` super.
fn solve_tridiagonal(a: &[f64], b: &[f64], c: &[f64], r: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut cp = vec![0.0; n];
    let mut rp = vec![0.0; n];
    cp[0] = c[0] / b[0];
    rp[0] = r[0] / b[0];
    for i in 1..n {
        let m = b[i] - a[i] * cp[i - 1];
        cp[i] = if i + 1 < n { c[i] / m } else { 0.0 };
        rp[i] = (r[i] - a[i] * rp[i - 1]) / m;
    }
    let mut out = vec![0.0; n];
    out[n - 1] = rp[n - 1];
    for i in (0..n - 1).rev() {
        out[i] = rp[i] - cp[i] * out[i + 1];
    }
    out
}

/// Derivatives of the cubic spline with knot second derivatives `m`.
fn derivatives_from_moments(h: &[f64], delta: &[f64], m: &[f64]) -> Vec<f64> {
    let k = h.len();
    let mut d: Vec<f64> = (0..k)
        .map(|i| delta[i] - h[i] * (2.0 * m[i] + m[i + 1]) / 6.0)
        .collect();
    d.push(delta[k - 1] + h[k - 1] * (m[k - 1] + 2.0 * m[k]) / 6.0);
    d
}

impl Spline {
    /// Natural cubic spline (zero second derivative at both ends).
    ///
    /// Two knots give the straight line.
    pub fn natural(x: &[f64], y: &[f64]) -> Result<Self> {
        check_knots(x, y, 2)?;
        let (h, delta) = slopes(x, y);
        let n = x.len();
        if n == 2 {
            return Ok(Self::linear(x, y, delta[0]));
        }
        let inner = n - 2;
        let a: Vec<f64> = (0..inner).map(|i| h[i]).collect();
        let b: Vec<f64> = (0..inner).map(|i| 2.0 * (h[i] + h[i + 1])).collect();
        let c: Vec<f64> = (0..inner).map(|i| h[i + 1]).collect();
        let r: Vec<f64> = (0..inner).map(|i| 6.0 * (delta[i + 1] - delta[i])).collect();
        let mut m = vec![0.0];
        m.extend(solve_tridiagonal(&a, &b, &c, &r));
        m.push(0.0);
        Ok(Self {
            x: x.to_vec(),
            y: y.to_vec(),
            d: derivatives_from_moments(&h, &delta, &m),
        })
    }

    /// Periodic cubic spline; requires `y[0] == y[n-1]` and at least 4 knots.
    pub fn periodic(x: &[f64], y: &[f64]) -> Result<Self> {
        check_knots(x, y, 4)?;
        let n = x.len();
        let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        if (y[0] - y[n - 1]).abs() > 1e-12 * scale {
            return Err(Error::InvalidArgument(
                "periodic spline needs equal first and last values".into(),
            ));
        }
        let (h, delta) = slopes(x, y);
        // unknown moments m_0..m_{k-1} with m_k = m_0, k = n - 1 intervals
        let k = n - 1;
        let a: Vec<f64> = (0..k).map(|i| h[(i + k - 1) % k]).collect();
        let b: Vec<f64> = (0..k).map(|i| 2.0 * (h[(i + k - 1) % k] + h[i])).collect();
        let c: Vec<f64> = (0..k).map(|i| h[i]).collect();
        let r: Vec<f64> = (0..k)
            .map(|i| 6.0 * (delta[i] - delta[(i + k - 1) % k]))
            .collect();
        let mut m = solve_cyclic(&a, &b, &c, &r);
        m.push(m[0]);
        Ok(Self {
            x: x.to_vec(),
            y: y.to_vec(),
            d: derivatives_from_moments(&h, &delta, &m),
        })
    }

    /// Spline used for affine schedules: linear for 2 knots, the interpolating
    /// parabola (not-a-knot) for 3, natural cubic otherwise.
    pub fn affine_schedule(x: &[f64], y: &[f64]) -> Result<Self> {
        check_knots(x, y, 2)?;
        if x.len() != 3 {
            return Self::natural(x, y);
        }
        let (h, delta) = slopes(x, y);
        let curvature = (delta[1] - delta[0]) / (h[0] + h[1]);
        let d = vec![
            delta[0] - curvature * h[0],
            delta[0] + curvature * h[0],
            delta[1] + curvature * h[1],
        ];
        Ok(Self {
            x: x.to_vec(),
            y: y.to_vec(),
            d,
        })
    }

    /// Monotone piecewise cubic Hermite interpolation (Fritsch–Carlson with
    /// weighted harmonic means and one-sided three-point end derivatives).
    pub fn pchip(x: &[f64], y: &[f64]) -> Result<Self> {
        check_knots(x, y, 2)?;
        let (h, delta) = slopes(x, y);
        let n = x.len();
        if n == 2 {
            return Ok(Self::linear(x, y, delta[0]));
        }
        let mut d = vec![0.0; n];
        for k in 1..n - 1 {
            if delta[k - 1] * delta[k] > 0.0 {
                let w1 = 2.0 * h[k] + h[k - 1];
                let w2 = h[k] + 2.0 * h[k - 1];
                d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
            }
        }
        d[0] = pchip_end(h[0], h[1], delta[0], delta[1]);
        d[n - 1] = pchip_end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        Ok(Self {
            x: x.to_vec(),
            y: y.to_vec(),
            d,
        })
    }

    fn linear(x: &[f64], y: &[f64], slope: f64) -> Self {
        Self {
            x: x.to_vec(),
            y: y.to_vec(),
            d: vec![slope, slope],
        }
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    fn interval(&self, t: f64) -> usize {
        let k = self.x.len() - 1;
        self.x[1..k].partition_point(|&v| v <= t)
    }

    /// Value at `t`; outside the knot range the end cubic is extended.
    pub fn eval(&self, t: f64) -> f64 {
        let i = self.interval(t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        if s == 0.0 {
            return self.y[i];
        }
        if s == 1.0 {
            return self.y[i + 1];
        }
        h00 * self.y[i] + h10 * h * self.d[i] + h01 * self.y[i + 1] + h11 * h * self.d[i + 1]
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let i = self.interval(t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let s2 = s * s;
        let dh00 = (6.0 * s2 - 6.0 * s) / h;
        let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
        let dh01 = (-6.0 * s2 + 6.0 * s) / h;
        let dh11 = 3.0 * s2 - 2.0 * s;
        dh00 * self.y[i] + dh10 * self.d[i] + dh01 * self.y[i + 1] + dh11 * self.d[i + 1]
    }
}

fn pchip_end(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d.signum() != del0.signum() || del0 == 0.0 {
        0.0
    } else if del0.signum() != del1.signum() && d.abs() > 3.0 * del0.abs() {
        3.0 * del0
    } else {
        d
    }
}

/// Cyclic tridiagonal solve via Sherman–Morrison; `a[0]` couples to the last
/// unknown and `c[k-1]` to the first.
fn solve_cyclic(a: &[f64], b: &[f64], c: &[f64], r: &[f64]) -> Vec<f64> {
    let k = b.len();
    let gamma = -b[0];
    let mut bb = b.to_vec();
    bb[0] -= gamma;
    bb[k - 1] -= a[0] * c[k - 1] / gamma;
    let x = solve_tridiagonal(a, &bb, c, r);
    let mut u = vec![0.0; k];
    u[0] = gamma;
    u[k - 1] = c[k - 1];
    let z = solve_tridiagonal(a, &bb, c, &u);
    let fact = (x[0] + a[0] * x[k - 1] / gamma) / (1.0 + z[0] + a[0] * z[k - 1] / gamma);
    x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect()
}
