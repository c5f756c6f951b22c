//! Gauss–Legendre rules, composite panels and a simple adaptive integrator.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// A Gauss–Legendre rule that can be mapped onto arbitrary intervals.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    x: Vec<f64>,
    w: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        Self { x, w }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut s = 0.0;
        for (xi, wi) in self.x.iter().zip(&self.w) {
            s += wi * f(c + h * xi);
        }
        s * h
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn nodes_on(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let x = self.x.iter().map(|xi| c + h * xi).collect();
        let w = self.w.iter().map(|wi| h * wi).collect();
        (x, w)
    }
}

/// Composite rule with `panels` equal panels of `n` Gauss nodes each.
pub fn composite_nodes(a: f64, b: f64, panels: usize, n: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = GaussLegendre::new(n);
    let mut xs = Vec::with_capacity(panels * n);
    let mut ws = Vec::with_capacity(panels * n);
    let h = (b - a) / panels as f64;
    for k in 0..panels {
        let lo = a + k as f64 * h;
        let hi = if k + 1 == panels { b } else { lo + h };
        let (x, w) = rule.nodes_on(lo, hi);
        xs.extend(x);
        ws.extend(w);
    }
    (xs, ws)
}

/// Adaptive Gauss–Legendre integration: a panel is accepted when the
/// 20-point estimate agrees with the sum over its two halves.
pub fn adaptive_integrate<F: FnMut(f64) -> f64>(a: f64, b: f64, tol: f64, mut f: F) -> Result<f64> {
    let rule = GaussLegendre::new(20);
    if a == b {
        return Ok(0.0);
    }
    let whole = rule.integrate(a, b, &mut f);
    let mut total = 0.0;
    let mut stack = vec![(a, b, whole, tol, 0usize)];
    while let Some((lo, hi, est, tol_here, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = rule.integrate(lo, mid, &mut f);
        let right = rule.integrate(mid, hi, &mut f);
        let refined = left + right;
        if !refined.is_finite() {
            return Err(Error::Accuracy {
                t: mid,
                reason: "non-finite integrand".into(),
            });
        }
        if (refined - est).abs() <= tol_here.max(1e-15 * refined.abs()) {
            total += refined;
        } else if depth >= 40 {
            return Err(Error::Accuracy {
                t: mid,
                reason: format!("adaptive quadrature did not converge on [{lo}, {hi}]"),
            });
        } else {
            stack.push((lo, mid, left, 0.5 * tol_here, depth + 1));
            stack.push((mid, hi, right, 0.5 * tol_here, depth + 1));
        }
    }
    Ok(total)
}
