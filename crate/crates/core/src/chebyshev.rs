//! Chebyshev series on an interval, built from samples at Chebyshev–Lobatto points.

use std::f64::consts::PI;

/// A truncated Chebyshev series `Σ c_k T_k(x)` with `x` mapped from `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cheb {
    a: f64,
    b: f64,
    coeffs: Vec<f64>,
}

/// The `n + 1` Lobatto points `cos(πk/n)` mapped to `[a, b]`, in decreasing order.
pub fn lobatto_points(a: f64, b: f64, n: usize) -> Vec<f64> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    (0..=n)
        .map(|k| {
            if k == 0 {
                b
            } else if k == n {
                a
            } else {
                c + h * (PI * k as f64 / n as f64).cos()
            }
        })
        .collect()
}

impl Cheb {
    pub fn from_coeffs(a: f64, b: f64, coeffs: Vec<f64>) -> Self {
        assert!(b > a, "empty interval");
        let coeffs = if coeffs.is_empty() { vec![0.0] } else { coeffs };
        Self { a, b, coeffs }
    }

    /// Interpolant through values sampled at [`lobatto_points`]`(a, b, n)`.
    pub fn from_lobatto_values(a: f64, b: f64, values: &[f64]) -> Self {
        let n = values.len() - 1;
        if n == 0 {
            return Self::from_coeffs(a, b, vec![values[0]]);
        }
        let m = 2 * n;
        let cos_table: Vec<f64> = (0..m).map(|k| (PI * k as f64 / n as f64).cos()).collect();
        let mut coeffs = vec![0.0; n + 1];
        for (j, cj) in coeffs.iter_mut().enumerate() {
            let mut s = 0.5 * (values[0] + values[n] * if j % 2 == 0 { 1.0 } else { -1.0 });
            for (k, v) in values.iter().enumerate().take(n).skip(1) {
                s += v * cos_table[(j * k) % m];
            }
            *cj = 2.0 * s / n as f64;
        }
        coeffs[0] *= 0.5;
        coeffs[n] *= 0.5;
        Self::from_coeffs(a, b, coeffs)
    }

    pub fn fit<F: FnMut(f64) -> f64>(a: f64, b: f64, n: usize, mut f: F) -> Self {
        let values: Vec<f64> = lobatto_points(a, b, n).into_iter().map(&mut f).collect();
        Self::from_lobatto_values(a, b, &values)
    }

    /// Doubles the degree from `n_min` until the tail drops below `tol`
    /// relative to the largest coefficient, then chops the negligible tail.
    pub fn adaptive<F: FnMut(f64) -> f64>(
        a: f64,
        b: f64,
        tol: f64,
        n_min: usize,
        n_max: usize,
        mut f: F,
    ) -> (Self, bool) {
        let mut n = n_min.max(4);
        let mut values: Vec<f64> = lobatto_points(a, b, n).into_iter().map(&mut f).collect();
        loop {
            let cheb = Self::from_lobatto_values(a, b, &values);
            let scale = cheb.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            let tail_len = (n / 8).max(3);
            let tail = cheb.coeffs[n + 1 - tail_len..]
                .iter()
                .fold(0.0f64, |m, c| m.max(c.abs()));
            if tail <= tol * scale || scale == 0.0 {
                return (cheb.chopped(tol * scale), true);
            }
            if 2 * n > n_max {
                return (cheb, false);
            }
            // reuse the even-indexed samples of the doubled grid
            let pts = lobatto_points(a, b, 2 * n);
            let mut next = Vec::with_capacity(2 * n + 1);
            for (k, &x) in pts.iter().enumerate() {
                if k % 2 == 0 {
                    next.push(values[k / 2]);
                } else {
                    next.push(f(x));
                }
            }
            values = next;
            n *= 2;
        }
    }

    fn chopped(mut self, abs_tol: f64) -> Self {
        while self.coeffs.len() > 1 && self.coeffs.last().map_or(false, |c| c.abs() <= abs_tol) {
            self.coeffs.pop();
        }
        self
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    #[inline]
    fn to_unit(&self, t: f64) -> f64 {
        (2.0 * t - self.a - self.b) / (self.b - self.a)
    }

    /// Clenshaw evaluation; arguments outside the domain are extrapolated.
    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        let x = self.to_unit(t);
        let x2 = 2.0 * x;
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in self.coeffs[1..].iter().rev() {
            let b0 = c + x2 * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs[0] + x * b1 - b2
    }

    pub fn derivative(&self) -> Self {
        let n = self.coeffs.len();
        if n == 1 {
            return Self::from_coeffs(self.a, self.b, vec![0.0]);
        }
        let mut d = vec![0.0; n + 1];
        for k in (1..n).rev() {
            d[k - 1] = d[k + 1] + 2.0 * k as f64 * self.coeffs[k];
        }
        d[0] *= 0.5;
        d.truncate(n - 1);
        let s = 2.0 / (self.b - self.a);
        Self::from_coeffs(self.a, self.b, d.into_iter().map(|c| c * s).collect())
    }

    /// Antiderivative vanishing at the left end of the domain.
    pub fn integral(&self) -> Self {
        let n = self.coeffs.len();
        let c = |k: usize| if k < n { self.coeffs[k] } else { 0.0 };
        let h = 0.5 * (self.b - self.a);
        let mut out = vec![0.0; n + 1];
        for (k, o) in out.iter_mut().enumerate().skip(1) {
            let lower = if k == 1 { 2.0 * c(0) } else { c(k - 1) };
            *o = h * (lower - c(k + 1)) / (2.0 * k as f64);
        }
        let mut cheb = Self::from_coeffs(self.a, self.b, out);
        let v = cheb.eval(self.a);
        cheb.coeffs[0] -= v;
        cheb
    }

    pub fn max_abs_sampled(&self, samples: usize) -> f64 {
        let pts = lobatto_points(self.a, self.b, samples.max(2));
        pts.into_iter().fold(0.0f64, |m, t| m.max(self.eval(t).abs()))
    }

    pub fn scale(&mut self, factor: f64) {
        for c in &mut self.coeffs {
            *c *= factor;
        }
    }
}

/// Chebyshev series on consecutive subintervals.
#[derive(Debug, Clone, PartialEq)]
pub struct Piecewise {
    pieces: Vec<Cheb>,
}

impl Piecewise {
    /// Pieces must be ordered and contiguous.
    pub fn new(pieces: Vec<Cheb>) -> Self {
        assert!(!pieces.is_empty(), "no pieces");
        Self { pieces }
    }

    pub fn pieces(&self) -> &[Cheb] {
        &self.pieces
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.pieces[0].a, self.pieces[self.pieces.len() - 1].b)
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        let k = self.pieces.iter().position(|c| t <= c.b).unwrap_or(self.pieces.len() - 1);
        self.pieces[k].eval(t)
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.pieces.iter().map(Cheb::derivative).collect())
    }

    pub fn max_abs_sampled(&self, samples: usize) -> f64 {
        let per = (samples / self.pieces.len()).max(2);
        self.pieces.iter().map(|c| c.max_abs_sampled(per)).fold(0.0, f64::max)
    }

    pub fn scale(&mut self, factor: f64) {
        for c in &mut self.pieces {
            c.scale(factor);
        }
    }
}

impl From<Cheb> for Piecewise {
    fn from(c: Cheb) -> Self {
        Self::new(vec![c])
    }
}
