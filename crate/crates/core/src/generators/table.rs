//! Tabulated generators: monotone cubic Hermite (Fritsch–Carlson) interpolation.

use std::sync::Arc;

use super::{Curvature, FGenerator, Limit, Normalization, Params, ScalarFn};
use crate::error::{Error, Result};

#[derive(Debug)]
struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl Pchip {
    fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let d: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
        let mut m = vec![0.0; n];
        for k in 1..n - 1 {
            if d[k - 1] * d[k] > 0.0 {
                let w1 = 2.0 * h[k] + h[k - 1];
                let w2 = h[k] + 2.0 * h[k - 1];
                m[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
            }
        }
        m[0] = edge(h[0], h[1], d[0], d[1]);
        m[n - 1] = edge(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
        Pchip { x, y, m }
    }

    /// Returns `(interval, offset)` with clamping to the end intervals.
    fn locate(&self, t: f64) -> (usize, f64) {
        let n = self.x.len();
        let k = match self.x.partition_point(|&xi| xi <= t) {
            0 => 0,
            i if i >= n => n - 2,
            i => i - 1,
        };
        (k, t - self.x[k])
    }

    fn coeffs(&self, k: usize) -> (f64, f64, f64, f64) {
        let h = self.x[k + 1] - self.x[k];
        let d = (self.y[k + 1] - self.y[k]) / h;
        let (m0, m1) = (self.m[k], self.m[k + 1]);
        (self.y[k], m0, (3.0 * d - 2.0 * m0 - m1) / h, (m0 + m1 - 2.0 * d) / (h * h))
    }

    fn eval(&self, t: f64, order: u8) -> f64 {
        let n = self.x.len();
        // linear extension beyond the table
        if t < self.x[0] || t > self.x[n - 1] {
            let i = if t < self.x[0] { 0 } else { n - 1 };
            return match order {
                0 => self.y[i] + self.m[i] * (t - self.x[i]),
                1 => self.m[i],
                _ => 0.0,
            };
        }
        let (k, dx) = self.locate(t);
        let (a, b, c, d) = self.coeffs(k);
        match order {
            0 => a + dx * (b + dx * (c + dx * d)),
            1 => b + dx * (2.0 * c + 3.0 * d * dx),
            _ => 2.0 * c + 6.0 * d * dx,
        }
    }
}

/// Three-point end slope, limited to keep the interpolant shape-preserving.
fn edge(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}

pub(super) fn tabulated(points: &[[f64; 2]]) -> Result<FGenerator> {
    if points.len() < 3 {
        return Err(Error::InvalidInput("a generator table needs at least 3 points".into()));
    }
    for w in points.windows(2) {
        if !(w[1][0] > w[0][0]) {
            return Err(Error::InvalidInput("table abscissae must be strictly increasing".into()));
        }
    }
    if points.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) || points[0][0] < 0.0 {
        return Err(Error::InvalidInput("table entries must be finite with x ≥ 0".into()));
    }
    let x: Vec<f64> = points.iter().map(|p| p[0]).collect();
    let y: Vec<f64> = points.iter().map(|p| p[1]).collect();
    if !(x[0] <= 1.0 && 1.0 <= x[x.len() - 1]) {
        return Err(Error::InvalidInput("table must cover x = 1".into()));
    }

    let slopes: Vec<f64> = points.windows(2).map(|w| (w[1][1] - w[0][1]) / (w[1][0] - w[0][0])).collect();
    let curvature = if slopes.windows(2).all(|s| s[1] >= s[0]) {
        Curvature::Convex
    } else if slopes.windows(2).all(|s| s[1] <= s[0]) {
        Curvature::Concave
    } else {
        return Err(Error::NotAdmissible("table is neither convex nor concave".into()));
    };

    let interp = Arc::new(Pchip::new(x, y));
    let at_one = interp.eval(1.0, 0);
    let norm = if at_one.abs() <= 1e-12 {
        Normalization::ZeroAtOne
    } else if (at_one - 1.0).abs() <= 1e-12 {
        Normalization::OneAtOne
    } else {
        return Err(Error::NotAdmissible(format!("table gives f(1) = {at_one}, expected 0 or 1")));
    };

    let f0 = interp.eval(0.0, 0);
    let slope = *interp.m.last().unwrap();
    let (i0, i1, i2) = (interp.clone(), interp.clone(), interp.clone());
    let f: ScalarFn = Arc::new(move |t| i0.eval(t, 0));
    let d1: ScalarFn = Arc::new(move |t| i1.eval(t, 1));
    let d2: ScalarFn = Arc::new(move |t| i2.eval(t, 2));
    Ok(FGenerator {
        name: "table".into(),
        params: Params::new(),
        norm,
        curvature,
        f,
        d1: Some(d1),
        d2: Some(d2),
        d3: None,
        d4: None,
        f0: Limit::Value(f0),
        slope_inf: Limit::Value(slope),
        fd_fallback: true,
    })
}
