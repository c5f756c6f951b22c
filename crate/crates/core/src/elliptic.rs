//! The weight `ω`, the elliptic integral `Ω` with breakpoints `b_j = Ω(a_j)`,
//! and the inverse `φ = Ω^{-1}`.
//!
//! On each interval `(a_{j-1}, a_j)` the integral is split at the midpoint;
//! the substitutions `σ = a_{j-1} + u²` and `σ = a_j - u²` turn the
//! inverse-square-root endpoint singularities into analytic integrands in `u`.

use std::fmt::Write as _;
use std::path::Path;

use crate::chebyshev::{lobatto_points, Cheb};
use crate::error::{Error, Result};
use crate::geometry::ParamsA;
use crate::quadrature::adaptive_integrate;

pub const DEFAULT_OMEGA_TOL: f64 = 1e-11;
const CACHE_HEADER: &str = "cyclide-omega-table";
const CACHE_VERSION: u32 = 1;

/// `ω(s) = |(s-a0)(s-a1)(s-a2)(s-a3)|^{1/2}` on `[a0, a3]`.
pub fn omega_weight(s: f64, a: &ParamsA) -> Result<f64> {
    if !(s >= a.get(0) && s <= a.get(3)) {
        return Err(Error::domain(s, format!("[{}, {}]", a.get(0), a.get(3))));
    }
    Ok(omega_unchecked(s, a))
}

#[inline]
fn omega_unchecked(s: f64, a: &ParamsA) -> f64 {
    ((s - a.get(0)) * (s - a.get(1)) * (s - a.get(2)) * (s - a.get(3))).abs().sqrt()
}

/// Substituted integrand on one half of interval `j`: `2 / sqrt|Π_{i≠e}(σ - a_i)|`
/// where `e` is the endpoint the substitution starts from.
fn half_integrand(a: &ParamsA, j: usize, left: bool, u: f64) -> f64 {
    let (e, sigma) = if left {
        (j - 1, a.get(j - 1) + u * u)
    } else {
        (j, a.get(j) - u * u)
    };
    let prod: f64 = (0..4).filter(|&i| i != e).map(|i| (sigma - a.get(i)).abs()).product();
    2.0 / prod.sqrt()
}

/// Integral of `1/ω` over `[a_{j-1}, a_j]` by adaptive Gauss–Legendre in the
/// substituted variables.
pub fn interval_integral(a: &ParamsA, j: usize, tol: f64) -> Result<f64> {
    let umax = (0.5 * (a.get(j) - a.get(j - 1))).sqrt();
    let left = adaptive_integrate(0.0, umax, 0.5 * tol, |u| half_integrand(a, j, true, u))?;
    let right = adaptive_integrate(0.0, umax, 0.5 * tol, |u| half_integrand(a, j, false, u))?;
    Ok(left + right)
}

/// Antiderivative of one substituted half, `U ↦ ∫_0^U g(u) du`.
#[derive(Debug, Clone)]
struct Half {
    anti: Cheb,
}

impl Half {
    fn build(a: &ParamsA, j: usize, left: bool, rel_tol: f64) -> Result<Self> {
        let umax = (0.5 * (a.get(j) - a.get(j - 1))).sqrt();
        let (g, ok) = Cheb::adaptive(0.0, umax, rel_tol, 16, 4096, |u| half_integrand(a, j, left, u));
        if !ok {
            return Err(Error::Accuracy {
                t: a.get(j),
                reason: "Chebyshev series of the substituted integrand did not converge".into(),
            });
        }
        Ok(Self { anti: g.integral() })
    }

    #[inline]
    fn value(&self, u: f64) -> f64 {
        self.anti.eval(u)
    }

    #[inline]
    fn total(&self) -> f64 {
        self.anti.eval(self.anti.domain().1)
    }
}

/// `Ω`, its breakpoints and its inverse `φ`, built once and then read-only.
#[derive(Debug, Clone)]
pub struct OmegaTable {
    a: ParamsA,
    tol: f64,
    b: [f64; 4],
    left: Vec<Half>,
    right: Vec<Half>,
    phi: Vec<Cheb>,
}

impl OmegaTable {
    pub fn new(a: ParamsA) -> Result<Self> {
        Self::with_tolerance(a, DEFAULT_OMEGA_TOL)
    }

    pub fn with_tolerance(a: ParamsA, tol: f64) -> Result<Self> {
        let mut table = Self::skeleton(a, tol)?;
        let mut phi = Vec::with_capacity(3);
        for j in 1..=3 {
            let (lo, hi) = (table.b[j - 1], table.b[j]);
            let (cheb, ok) = Cheb::adaptive(lo, hi, table.series_tol(), 16, 4096, |t| {
                table.invert(j, t)
            });
            if !ok {
                return Err(Error::Accuracy {
                    t: hi,
                    reason: format!("φ series on interval {j} did not converge"),
                });
            }
            phi.push(cheb);
        }
        table.phi = phi;
        table.validate()?;
        Ok(table)
    }

    fn skeleton(a: ParamsA, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidParams(format!("tolerance must be positive, got {tol}")));
        }
        let rel = (tol * 1e-4).max(1e-16);
        let mut left = Vec::with_capacity(3);
        let mut right = Vec::with_capacity(3);
        let mut b = [0.0; 4];
        for j in 1..=3 {
            let l = Half::build(&a, j, true, rel)?;
            let r = Half::build(&a, j, false, rel)?;
            b[j] = b[j - 1] + l.total() + r.total();
            left.push(l);
            right.push(r);
        }
        Ok(Self {
            a,
            tol,
            b,
            left,
            right,
            phi: Vec::new(),
        })
    }

    fn series_tol(&self) -> f64 {
        (self.tol * 1e-4).clamp(1e-15, 1e-6)
    }

    fn validate(&self) -> Result<()> {
        for j in 1..=3 {
            for t in lobatto_points(self.b[j - 1], self.b[j], 37) {
                let s = self.phi_on(j, t);
                let back = self.omega_on(j, s);
                if (back - t).abs() > self.tol.max(1e-13) {
                    return Err(Error::Accuracy {
                        t,
                        reason: format!("Ω(φ(t)) - t = {:e} exceeds tolerance", back - t),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn params(&self) -> &ParamsA {
        &self.a
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// Breakpoints `[b0, b1, b2, b3]` with `b0 = 0`.
    pub fn breakpoints(&self) -> [f64; 4] {
        self.b
    }

    /// `t`-interval `[b_{i-1}, b_i]` of coordinate `i`.
    pub fn t_interval(&self, i: usize) -> (f64, f64) {
        (self.b[i - 1], self.b[i])
    }

    pub fn omega_weight(&self, s: f64) -> Result<f64> {
        omega_weight(s, &self.a)
    }

    /// `Ω(s)` for `s ∈ [a0, a3]`.
    pub fn omega(&self, s: f64) -> Result<f64> {
        let (a0, a3) = (self.a.get(0), self.a.get(3));
        if !(s >= a0 && s <= a3) {
            return Err(Error::domain(s, format!("[{a0}, {a3}]")));
        }
        let j = if s <= self.a.get(1) {
            1
        } else if s <= self.a.get(2) {
            2
        } else {
            3
        };
        Ok(self.omega_on(j, s))
    }

    /// `Ω(s)` for `s` known to lie in the closed interval `j`.
    pub fn omega_on(&self, j: usize, s: f64) -> f64 {
        let lo = self.a.get(j - 1);
        let hi = self.a.get(j);
        if s <= lo {
            return self.b[j - 1];
        }
        if s >= hi {
            return self.b[j];
        }
        let mid = 0.5 * (lo + hi);
        if s <= mid {
            self.b[j - 1] + self.left[j - 1].value((s - lo).sqrt())
        } else {
            self.b[j] - self.right[j - 1].value((hi - s).sqrt())
        }
    }

    /// Solves `Ω(s) = t` on interval `j` by safeguarded Newton in the `u` variable.
    fn invert(&self, j: usize, t: f64) -> f64 {
        let lo = self.a.get(j - 1);
        let hi = self.a.get(j);
        if t <= self.b[j - 1] {
            return lo;
        }
        if t >= self.b[j] {
            return hi;
        }
        let half = &self.left[j - 1];
        let split = self.b[j - 1] + half.total();
        let (h, target, left) = if t <= split {
            (half, t - self.b[j - 1], true)
        } else {
            (&self.right[j - 1], self.b[j] - t, false)
        };
        let umax = h.anti.domain().1;
        let (mut ulo, mut uhi) = (0.0, umax);
        // the integrand is about constant, so a linear guess is close
        let mut u = (target / h.total() * umax).clamp(0.0, umax);
        for _ in 0..100 {
            let f = h.value(u) - target;
            if f > 0.0 {
                uhi = u;
            } else {
                ulo = u;
            }
            let g = half_integrand(&self.a, j, left, u);
            let mut next = u - f / g;
            if !(next > ulo && next < uhi) {
                next = 0.5 * (ulo + uhi);
            }
            if (next - u).abs() <= 1e-16 * umax.max(1.0) {
                u = next;
                break;
            }
            u = next;
        }
        if left {
            lo + u * u
        } else {
            hi - u * u
        }
    }

    /// `φ(t)` for `t ∈ [0, b3]`; breakpoints map exactly to the focal parameters.
    pub fn phi(&self, t: f64) -> Result<f64> {
        let b3 = self.b[3];
        if !(t >= 0.0 && t <= b3) {
            return Err(Error::domain(t, format!("[0, {b3}]")));
        }
        let j = if t <= self.b[1] {
            1
        } else if t <= self.b[2] {
            2
        } else {
            3
        };
        Ok(self.phi_on(j, t))
    }

    /// `φ(t)` evaluated with the series of interval `j`.
    #[inline]
    pub fn phi_on(&self, j: usize, t: f64) -> f64 {
        if t == self.b[j - 1] {
            return self.a.get(j - 1);
        }
        if t == self.b[j] {
            return self.a.get(j);
        }
        self.phi[j - 1].eval(t).clamp(self.a.get(j - 1), self.a.get(j))
    }

    /// `φ(t)` followed by one Newton correction `s ← s - (Ω(s) - t)·ω(s)`.
    pub fn phi_refined(&self, t: f64) -> Result<f64> {
        let s = self.phi(t)?;
        let j = self.interval_of_t(t);
        let (lo, hi) = (self.a.get(j - 1), self.a.get(j));
        let corr = (self.omega_on(j, s) - t) * omega_unchecked(s, &self.a);
        Ok((s - corr).clamp(lo, hi))
    }

    pub fn interval_of_t(&self, t: f64) -> usize {
        if t <= self.b[1] {
            1
        } else if t <= self.b[2] {
            2
        } else {
            3
        }
    }

    pub fn phi_series(&self, j: usize) -> &Cheb {
        &self.phi[j - 1]
    }

    /// Plain-text cache holding the `φ` samples at the Lobatto nodes of each interval.
    pub fn to_cache_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{CACHE_HEADER} {CACHE_VERSION}");
        let a = self.a.as_array();
        let _ = writeln!(out, "a {} {} {} {}", a[0], a[1], a[2], a[3]);
        let _ = writeln!(out, "tol {}", self.tol);
        for j in 1..=3 {
            let cheb = &self.phi[j - 1];
            let n = cheb.degree().max(1);
            let _ = writeln!(out, "interval {j} {n}");
            for t in lobatto_points(self.b[j - 1], self.b[j], n) {
                let _ = writeln!(out, "{} {}", t, self.phi_on(j, t));
            }
        }
        out
    }

    /// Rebuilds a table from [`to_cache_string`](Self::to_cache_string) output.
    pub fn from_cache_str(text: &str, a: ParamsA, tol: f64) -> Result<Self> {
        let bad = |msg: &str| Error::Parse(format!("omega cache: {msg}"));
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad("empty file"))?;
        if header != format!("{CACHE_HEADER} {CACHE_VERSION}") {
            return Err(bad("unsupported header"));
        }
        let parse_f = |s: &str| s.parse::<f64>().map_err(|_| bad(&format!("bad number {s:?}")));
        let a_line = lines.next().ok_or_else(|| bad("missing a"))?;
        let a_vals: Vec<f64> = a_line
            .strip_prefix("a ")
            .ok_or_else(|| bad("missing a"))?
            .split_whitespace()
            .map(parse_f)
            .collect::<Result<_>>()?;
        if a_vals != a.as_array() {
            return Err(bad("focal parameters differ"));
        }
        let tol_line = lines.next().ok_or_else(|| bad("missing tol"))?;
        let cached_tol = parse_f(tol_line.strip_prefix("tol ").ok_or_else(|| bad("missing tol"))?)?;
        if cached_tol > tol {
            return Err(bad("cached tolerance is looser than requested"));
        }
        let mut table = Self::skeleton(a, cached_tol)?;
        for j in 1..=3 {
            let head = lines.next().ok_or_else(|| bad("missing interval"))?;
            let parts: Vec<&str> = head.split_whitespace().collect();
            if parts.len() != 3 || parts[0] != "interval" || parts[1] != j.to_string() {
                return Err(bad("bad interval header"));
            }
            let n: usize = parts[2].parse().map_err(|_| bad("bad node count"))?;
            let mut values = Vec::with_capacity(n + 1);
            for _ in 0..=n {
                let line = lines.next().ok_or_else(|| bad("truncated samples"))?;
                let mut it = line.split_whitespace();
                let _t = parse_f(it.next().ok_or_else(|| bad("missing t"))?)?;
                values.push(parse_f(it.next().ok_or_else(|| bad("missing phi"))?)?);
            }
            table
                .phi
                .push(Cheb::from_lobatto_values(table.b[j - 1], table.b[j], &values));
        }
        table.validate()?;
        Ok(table)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_cache_string())?;
        Ok(())
    }

    pub fn load(path: &Path, a: ParamsA, tol: f64) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_cache_str(&text, a, tol)
    }

    /// Loads from `dir` when a matching cache file exists, otherwise builds and stores it.
    pub fn cached(dir: &Path, a: ParamsA, tol: f64) -> Result<Self> {
        let aa = a.as_array();
        let name = format!(
            "omega-{:016x}-{:016x}-{:016x}-{:016x}-{:016x}.txt",
            aa[0].to_bits(),
            aa[1].to_bits(),
            aa[2].to_bits(),
            aa[3].to_bits(),
            tol.to_bits()
        );
        let path = dir.join(name);
        if let Ok(table) = Self::load(&path, a, tol) {
            return Ok(table);
        }
        let table = Self::with_tolerance(a, tol)?;
        if std::fs::create_dir_all(dir).is_ok() {
            // a failed write only costs a rebuild next time
            let _ = table.save(&path);
        }
        Ok(table)
    }
}
