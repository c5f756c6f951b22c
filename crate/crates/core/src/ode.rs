//! Dormand–Prince 5(4) integrator with continuous output.
//!
//! Only the first `error_components` state components enter the local error
//! norm; trailing components ride along (used for variational equations).

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dopri5Options {
    pub rtol: f64,
    pub atol: f64,
    pub error_components: usize,
    /// Components from this index on are weighted with unit magnitude
    /// instead of `|y|` (for logarithmic amplitudes).
    pub unit_scale_from: usize,
    pub max_steps: usize,
}

impl Default for Dopri5Options {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-11,
            error_components: usize::MAX,
            unit_scale_from: usize::MAX,
            max_steps: 200_000,
        }
    }
}

/// Coefficients of the quartic interpolant on one accepted step.
#[derive(Debug, Clone)]
struct DenseStep<const N: usize> {
    t0: f64,
    h: f64,
    r: [[f64; N]; 5],
}

/// Accepted steps of an integration with continuous output on `[t_start, t_end]`.
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    steps: Vec<DenseStep<N>>,
    t_start: f64,
    t_end: f64,
    y_start: [f64; N],
    y_end: [f64; N],
    rhs_evals: usize,
}

impl<const N: usize> Trajectory<N> {
    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn y_start(&self) -> &[f64; N] {
        &self.y_start
    }

    pub fn y_end(&self) -> &[f64; N] {
        &self.y_end
    }

    pub fn n_steps(&self) -> usize {
        self.steps.len()
    }

    pub fn rhs_evals(&self) -> usize {
        self.rhs_evals
    }

    /// Step boundaries `t_0 < t_1 < .. < t_end`.
    pub fn mesh(&self) -> Vec<f64> {
        let mut m: Vec<f64> = self.steps.iter().map(|s| s.t0).collect();
        m.push(self.t_end);
        m
    }

    /// Continuous output; arguments are clamped to the integration range.
    pub fn eval(&self, t: f64) -> [f64; N] {
        if self.steps.is_empty() || t <= self.t_start {
            return self.y_start;
        }
        if t >= self.t_end {
            return self.y_end;
        }
        let idx = match self
            .steps
            .binary_search_by(|s| s.t0.partial_cmp(&t).unwrap_or(std::cmp::Ordering::Less))
        {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        };
        let st = &self.steps[idx];
        let th = (t - st.t0) / st.h;
        let th1 = 1.0 - th;
        let mut y = [0.0; N];
        for (i, yi) in y.iter_mut().enumerate() {
            let r = &st.r;
            *yi = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
        }
        y
    }
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        let hc = h * c;
        for i in 0..N {
            out[i] += hc * k[i];
        }
    }
    out
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end > t0`.
pub fn dopri5<const N: usize, F>(mut f: F, t0: f64, y0: [f64; N], t_end: f64, opts: &Dopri5Options) -> Result<Trajectory<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    if !(t_end > t0) {
        return Err(Error::InvalidParams(format!("integration range [{t0}, {t_end}] is empty")));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::Accuracy {
            t: t0,
            reason: "non-finite initial state".into(),
        });
    }
    let m = opts.error_components.min(N);
    let mag = |i: usize, v: f64| if i >= opts.unit_scale_from { 1.0 } else { v.abs() };
    let norm = |e: &[f64; N], y: &[f64; N], yn: &[f64; N]| -> f64 {
        let mut s = 0.0;
        for i in 0..m {
            let sk = opts.atol + opts.rtol * mag(i, y[i]).max(mag(i, yn[i]));
            let r = e[i] / sk;
            s += r * r;
        }
        (s / m as f64).sqrt()
    };

    let span = t_end - t0;
    let mut evals = 0usize;
    let mut k1 = f(t0, &y0);
    evals += 1;

    // initial step from the scaled sizes of y and y'
    let mut h = {
        let mut d0 = 0.0;
        let mut d1 = 0.0;
        for i in 0..m {
            let sk = opts.atol + opts.rtol * mag(i, y0[i]);
            d0 += (mag(i, y0[i]) / sk).powi(2);
            d1 += (k1[i] / sk).powi(2);
        }
        let (d0, d1) = ((d0 / m as f64).sqrt(), (d1 / m as f64).sqrt());
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let ytry = axpy(&y0, h0, &[(1.0, &k1)]);
        let k = f(t0 + h0, &ytry);
        evals += 1;
        let mut d2 = 0.0;
        for i in 0..m {
            let sk = opts.atol + opts.rtol * mag(i, y0[i]);
            d2 += ((k[i] - k1[i]) / sk).powi(2);
        }
        let d2 = (d2 / m as f64).sqrt() / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(span)
    };

    let mut t = t0;
    let mut y = y0;
    let mut steps = Vec::new();
    let mut rejected_last = false;
    let mut fac_old = 1e-4f64;
    let mut n = 0usize;
    while t < t_end {
        n += 1;
        if n > opts.max_steps {
            return Err(Error::Accuracy {
                t,
                reason: format!("more than {} steps", opts.max_steps),
            });
        }
        if h < 1e-14 * span.max(t.abs()) {
            return Err(Error::Accuracy {
                t,
                reason: format!("step size underflow (h = {h:e})"),
            });
        }
        let last = t + h >= t_end - 1e-14 * span;
        if last {
            h = t_end - t;
        }
        let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(t + C5 * h, &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = f(
            t + h,
            &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let yn = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(t + h, &yn);
        evals += 6;
        let mut e = [0.0; N];
        for i in 0..N {
            e[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let err = norm(&e, &y, &yn);
        if !err.is_finite() || yn.iter().any(|v| !v.is_finite()) {
            h *= 0.1;
            rejected_last = true;
            continue;
        }
        // Lund-stabilized controller
        let fac11 = err.powf(0.17);
        let mut fac = fac11 / fac_old.powf(0.04) / 0.9;
        fac = fac.clamp(0.1, 5.0);
        let h_new = h / fac;
        if err <= 1.0 {
            fac_old = err.max(1e-4);
            let mut r = [[0.0; N]; 5];
            for i in 0..N {
                let ydiff = yn[i] - y[i];
                let bspl = h * k1[i] - ydiff;
                r[0][i] = y[i];
                r[1][i] = ydiff;
                r[2][i] = bspl;
                r[3][i] = ydiff - h * k7[i] - bspl;
                r[4][i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            steps.push(DenseStep { t0: t, h, r });
            t = if last { t_end } else { t + h };
            y = yn;
            k1 = k7;
            h = if rejected_last { h_new.min(h) } else { h_new };
            rejected_last = false;
        } else {
            h /= (fac11 / 0.9).min(10.0);
            rejected_last = true;
        }
    }
    Ok(Trajectory {
        steps,
        t_start: t0,
        t_end,
        y_start: y0,
        y_end: y,
        rhs_evals: evals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_end_and_dense() {
        let opts = Dopri5Options::default();
        let tr = dopri5(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [1.0, 0.0], 10.0, &opts).unwrap();
        let y = tr.y_end();
        assert!((y[0] - 10f64.cos()).abs() < 1e-8);
        assert!((y[1] + 10f64.sin()).abs() < 1e-8);
        for k in 0..200 {
            let t = 10.0 * k as f64 / 199.0;
            let v = tr.eval(t);
            assert!((v[0] - t.cos()).abs() < 1e-8, "t={t}: {}", v[0] - t.cos());
        }
    }

    #[test]
    fn dense_output_is_fifth_order_accurate() {
        // exponential growth; interpolant error tracks the step error
        let opts = Dopri5Options {
            rtol: 1e-12,
            atol: 1e-14,
            ..Default::default()
        };
        let tr = dopri5(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 3.0, &opts).unwrap();
        for k in 0..301 {
            let t = 3.0 * k as f64 / 300.0;
            assert!((tr.eval(t)[0] / t.exp() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn ignored_components_do_not_limit_steps() {
        let base = Dopri5Options::default();
        let only_first = Dopri5Options {
            error_components: 1,
            ..base
        };
        let f = |_: f64, y: &[f64; 2]| [1.0, (50.0 * y[0]).cos()];
        let a = dopri5(f, 0.0, [0.0, 0.0], 5.0, &base).unwrap();
        let b = dopri5(f, 0.0, [0.0, 0.0], 5.0, &only_first).unwrap();
        assert!(b.n_steps() < a.n_steps());
    }

    #[test]
    fn rejects_empty_range() {
        assert!(dopri5(|_, y: &[f64; 1]| *y, 1.0, [1.0], 1.0, &Dopri5Options::default()).is_err());
    }
}
