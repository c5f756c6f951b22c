//! Single Sturm–Liouville equations `u'' + σ(Q(φ(t)))u = 0` on one `t`-interval.
//!
//! Solutions are carried in scaled Prüfer variables
//! `u = ρ sin θ / √S`, `u' = ρ √S cos θ`, so zeros of `u` are exactly the
//! crossings of `θ` through multiples of π and amplitudes live in `ln ρ`.
//! The sensitivities `∂θ/∂λ1`, `∂θ/∂λ2` are integrated alongside.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::elliptic::OmegaTable;
use crate::error::{Error, Result};
use crate::ode::{dopri5, Dopri5Options, Trajectory};

/// Separation constants of the van Vleck polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VanVleck {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl VanVleck {
    pub fn new(lambda1: f64, lambda2: f64) -> Self {
        Self { lambda1, lambda2 }
    }
}

/// `Q(s) = (3/16)s² + λ1 s + λ2`.
#[inline]
pub fn van_vleck(s: f64, vv: VanVleck) -> f64 {
    0.1875 * s * s + vv.lambda1 * s + vv.lambda2
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeTolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl OdeTolerances {
    pub const DEFAULT: Self = Self { rtol: 1e-9, atol: 1e-11 };
    pub const TIGHT: Self = Self { rtol: 1e-14, atol: 1e-16 };

    pub fn new(rtol: f64, atol: f64) -> Result<Self> {
        if !(rtol > 0.0 && atol > 0.0 && rtol.is_finite() && atol.is_finite()) {
            return Err(Error::InvalidParams(format!("tolerances must be positive, got rtol={rtol}, atol={atol}")));
        }
        Ok(Self { rtol, atol })
    }

    /// The tighter of `self` and `other`, componentwise.
    pub fn min(self, other: Self) -> Self {
        Self {
            rtol: self.rtol.min(other.rtol),
            atol: self.atol.min(other.atol),
        }
    }
}

impl Default for OdeTolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Endpoint condition: `u' = 0` (exponent 0) or `u = 0` (exponent 1/2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Bc {
    Neumann,
    Dirichlet,
}

impl Bc {
    pub fn from_bit(bit: u8) -> Self {
        if bit == 0 {
            Bc::Neumann
        } else {
            Bc::Dirichlet
        }
    }

    /// Initial data `(u, u')` realizing the condition with unit size.
    pub fn initial_values(self) -> (f64, f64) {
        match self {
            Bc::Neumann => (1.0, 0.0),
            Bc::Dirichlet => (0.0, 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BcPair {
    pub left: Bc,
    pub right: Bc,
}

impl BcPair {
    pub fn new(left: Bc, right: Bc) -> Self {
        Self { left, right }
    }

    /// `(mπ/L)²` for the lowest-to-`n`-th mode of `u'' + μu = 0` with these conditions.
    fn comparison_mu(self, n: usize, len: f64) -> f64 {
        let m = match (self.left, self.right) {
            (Bc::Neumann, Bc::Neumann) => n as f64,
            (Bc::Dirichlet, Bc::Dirichlet) => n as f64 + 1.0,
            _ => n as f64 + 0.5,
        };
        (m * PI / len).powi(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    LeftToRight,
    RightToLeft,
}

/// The coefficient `t ↦ base(t) + λ1·slope(t)` multiplying `σ` in the equation,
/// plus the constant `λ2`.
pub trait Potential: Sync {
    fn terms(&self, t: f64) -> (f64, f64);

    /// Bounds `(min, max)` of `base + λ1·slope` over `[lo, hi]`.
    fn aux_range(&self, lambda1: f64, lo: f64, hi: f64) -> (f64, f64);
}

/// `Q(φ(t))`: base `(3/16)φ²`, slope `φ`.
#[derive(Debug, Clone, Copy)]
pub struct VanVleckPotential<'a> {
    table: &'a OmegaTable,
}

impl<'a> VanVleckPotential<'a> {
    pub fn new(table: &'a OmegaTable) -> Self {
        Self { table }
    }
}

impl Potential for VanVleckPotential<'_> {
    #[inline]
    fn terms(&self, t: f64) -> (f64, f64) {
        let j = self.table.interval_of_t(t);
        let s = self.table.phi_on(j, t);
        (0.1875 * s * s, s)
    }

    fn aux_range(&self, lambda1: f64, lo: f64, hi: f64) -> (f64, f64) {
        let s_lo = self.table.phi_on(self.table.interval_of_t(lo), lo);
        let s_hi = self.table.phi_on(self.table.interval_of_t(hi), hi);
        let f = |s: f64| 0.1875 * s * s + lambda1 * s;
        let mut lo_v = f(s_lo).min(f(s_hi));
        let hi_v = f(s_lo).max(f(s_hi));
        let vertex = -lambda1 / 0.375;
        if vertex > s_lo && vertex < s_hi {
            lo_v = lo_v.min(f(vertex));
        }
        (lo_v, hi_v)
    }
}

/// Constant coefficient `value` (plus `λ2`); independent of `λ1`.
#[derive(Debug, Clone, Copy)]
pub struct ConstantPotential {
    pub value: f64,
}

impl Potential for ConstantPotential {
    fn terms(&self, _t: f64) -> (f64, f64) {
        (self.value, 0.0)
    }

    fn aux_range(&self, _lambda1: f64, _lo: f64, _hi: f64) -> (f64, f64) {
        (self.value, self.value)
    }
}

/// Potential from a closure returning `(base, slope)`; ranges are sampled.
pub struct FnPotential<F> {
    f: F,
}

impl<F: Fn(f64) -> (f64, f64) + Sync> FnPotential<F> {
    pub fn new(f: F) -> Self {
        Self { f }
    }
}

impl<F: Fn(f64) -> (f64, f64) + Sync> Potential for FnPotential<F> {
    fn terms(&self, t: f64) -> (f64, f64) {
        (self.f)(t)
    }

    fn aux_range(&self, lambda1: f64, lo: f64, hi: f64) -> (f64, f64) {
        let mut m = f64::INFINITY;
        let mut mx = f64::NEG_INFINITY;
        for k in 0..=400 {
            let t = lo + (hi - lo) * k as f64 / 400.0;
            let (b, s) = (self.f)(t);
            let v = b + lambda1 * s;
            m = m.min(v);
            mx = mx.max(v);
        }
        let pad = 0.05 * (mx - m) + 1e-9 * (1.0 + m.abs().max(mx.abs()));
        (m - pad, mx + pad)
    }
}

/// Solution of an initial-value problem on one interval, in Prüfer form.
#[derive(Debug, Clone)]
pub struct IvpSolution {
    interval: (f64, f64),
    sigma: f64,
    direction: Direction,
    vv: VanVleck,
    scale: f64,
    init: (f64, f64),
    traj: Trajectory<4>,
}

const ZERO_TOL: f64 = 1e-7;

impl IvpSolution {
    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn van_vleck(&self) -> VanVleck {
        self.vv
    }

    #[inline]
    fn tau(&self, t: f64) -> f64 {
        match self.direction {
            Direction::LeftToRight => t - self.interval.0,
            Direction::RightToLeft => self.interval.1 - t,
        }
    }

    fn from_state(&self, y: &[f64; 4]) -> (f64, f64) {
        let r = y[1].exp();
        let sq = self.scale.sqrt();
        let u = r * y[0].sin() / sq;
        let du_tau = r * sq * y[0].cos();
        match self.direction {
            Direction::LeftToRight => (u, du_tau),
            Direction::RightToLeft => (u, -du_tau),
        }
    }

    /// `(u(t), u'(t))` from the continuous output; `t` is clamped to the interval.
    /// The initial data is returned exactly at the starting end.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let t = t.clamp(self.interval.0, self.interval.1);
        if t == self.start_point() {
            return self.init;
        }
        self.from_state(&self.traj.eval(self.tau(t)))
    }

    /// Prüfer angle at `t`, measured along the integration direction.
    pub fn theta(&self, t: f64) -> f64 {
        let t = t.clamp(self.interval.0, self.interval.1);
        self.traj.eval(self.tau(t))[0]
    }

    pub fn ln_rho(&self, t: f64) -> f64 {
        let t = t.clamp(self.interval.0, self.interval.1);
        self.traj.eval(self.tau(t))[1]
    }

    pub fn theta_start(&self) -> f64 {
        self.traj.y_start()[0]
    }

    pub fn theta_end(&self) -> f64 {
        self.traj.y_end()[0]
    }

    /// `(∂θ_end/∂λ1, ∂θ_end/∂λ2)`.
    pub fn theta_sensitivity(&self) -> (f64, f64) {
        let y = self.traj.y_end();
        (y[2], y[3])
    }

    /// The end of the interval where integration started.
    pub fn start_point(&self) -> f64 {
        match self.direction {
            Direction::LeftToRight => self.interval.0,
            Direction::RightToLeft => self.interval.1,
        }
    }

    pub fn end_point(&self) -> f64 {
        match self.direction {
            Direction::LeftToRight => self.interval.1,
            Direction::RightToLeft => self.interval.0,
        }
    }

    /// `(u, u')` at the far end.
    pub fn terminal(&self) -> (f64, f64) {
        self.from_state(self.traj.y_end())
    }

    /// Zeros of `u` strictly inside the interval, from crossings of `θ` through `kπ`.
    pub fn zero_count(&self) -> usize {
        let lo = self.theta_start() + ZERO_TOL;
        let hi = self.theta_end() - ZERO_TOL;
        if hi <= lo {
            return 0;
        }
        let k_min = (lo / PI).floor() as i64 + 1;
        let k_max = (hi / PI).ceil() as i64 - 1;
        (k_max - k_min + 1).max(0) as usize
    }

    /// Scale-free miss of the condition `bc` at the far end: `|sin θ|` for
    /// `u = 0`, `|cos θ|` for `u' = 0`.
    pub fn bc_residual(&self, bc: Bc) -> f64 {
        let th = self.theta_end();
        match bc {
            Bc::Dirichlet => th.sin().abs(),
            Bc::Neumann => th.cos().abs(),
        }
    }

    /// Step boundaries of the integrator mapped back to `t`, increasing.
    pub fn mesh(&self) -> Vec<f64> {
        let mut m: Vec<f64> = self.traj.mesh().into_iter().map(|tau| match self.direction {
            Direction::LeftToRight => self.interval.0 + tau,
            Direction::RightToLeft => self.interval.1 - tau,
        }).collect();
        m.sort_by(f64::total_cmp);
        m
    }
}

/// Number of interior zeros of a solution.
pub fn count_zeros(sol: &IvpSolution) -> usize {
    sol.zero_count()
}

fn validate_interval(interval: (f64, f64)) -> Result<()> {
    let (lo, hi) = interval;
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::InvalidParams(format!("invalid interval [{lo}, {hi}]")));
    }
    Ok(())
}

fn validate_sigma(sigma: f64) -> Result<()> {
    if sigma != 1.0 && sigma != -1.0 {
        return Err(Error::InvalidParams(format!("sign must be +1 or -1, got {sigma}")));
    }
    Ok(())
}

/// Integrates `u'' + σ(base + λ1·slope + λ2)u = 0` from the starting end
/// of `interval` with data `init = (u, u')` there.
pub fn integrate_ivp(
    pot: &dyn Potential,
    interval: (f64, f64),
    sigma: f64,
    vv: VanVleck,
    init: (f64, f64),
    direction: Direction,
    tol: OdeTolerances,
) -> Result<IvpSolution> {
    validate_interval(interval)?;
    let scale = prufer_scale(pot, interval, sigma, vv);
    integrate_scaled(pot, interval, sigma, vv, init, direction, tol, scale)
}

/// `S = sqrt(max(1, mean |σQ|))` over `interval`.
fn prufer_scale(pot: &dyn Potential, interval: (f64, f64), sigma: f64, vv: VanVleck) -> f64 {
    let (lo, hi) = interval;
    let q_at = |t: f64| {
        let (b, s) = pot.terms(t);
        sigma * (b + vv.lambda1 * s + vv.lambda2)
    };
    let mean_q = (0..=16).map(|k| q_at(lo + (hi - lo) * k as f64 / 16.0).abs()).sum::<f64>() / 17.0;
    mean_q.max(1.0).sqrt()
}

#[allow(clippy::too_many_arguments)]
fn integrate_scaled(
    pot: &dyn Potential,
    interval: (f64, f64),
    sigma: f64,
    vv: VanVleck,
    init: (f64, f64),
    direction: Direction,
    tol: OdeTolerances,
    scale: f64,
) -> Result<IvpSolution> {
    validate_interval(interval)?;
    validate_sigma(sigma)?;
    if !(init.0.is_finite() && init.1.is_finite()) || (init.0 == 0.0 && init.1 == 0.0) {
        return Err(Error::TrivialSolution);
    }
    let (lo, hi) = interval;
    let len = hi - lo;
    let sq = scale.sqrt();

    let du_tau = match direction {
        Direction::LeftToRight => init.1,
        Direction::RightToLeft => -init.1,
    };
    let theta0 = (sq * init.0).atan2(du_tau / sq);
    let ln_rho0 = 0.5 * (scale * init.0 * init.0 + du_tau * du_tau / scale).ln();

    let rhs = |tau: f64, y: &[f64; 4]| -> [f64; 4] {
        let t = match direction {
            Direction::LeftToRight => lo + tau,
            Direction::RightToLeft => hi - tau,
        };
        let (b, slope) = pot.terms(t);
        let q = sigma * (b + vv.lambda1 * slope + vv.lambda2);
        let (s, c) = y[0].sin_cos();
        let qs = q / scale;
        let ss = s * s;
        let g = (qs - scale) * 2.0 * s * c;
        [
            scale * c * c + qs * ss,
            (scale - qs) * s * c,
            g * y[2] + sigma * slope / scale * ss,
            g * y[3] + sigma / scale * ss,
        ]
    };
    let opts = Dopri5Options {
        rtol: tol.rtol,
        atol: tol.atol,
        error_components: 2,
        unit_scale_from: 1,
        ..Default::default()
    };
    let traj = dopri5(rhs, 0.0, [theta0, ln_rho0, 0.0, 0.0], len, &opts).map_err(|e| match e {
        Error::Accuracy { t, reason } => Error::Accuracy {
            t: match direction {
                Direction::LeftToRight => lo + t,
                Direction::RightToLeft => hi - t,
            },
            reason: format!("{reason} (sigma={sigma}, lambda=({}, {}))", vv.lambda1, vv.lambda2),
        },
        other => other,
    })?;
    Ok(IvpSolution {
        interval,
        sigma,
        direction,
        vv,
        scale,
        init,
        traj,
    })
}

/// An eigenfunction candidate built from two shots meeting at an interior point:
/// one from the left end with the left condition, one from the right end with
/// the right condition, the second rescaled to agree with the first at the meeting point.
#[derive(Debug, Clone)]
pub struct MatchedSolution {
    left: IvpSolution,
    right: IvpSolution,
    meet: f64,
    factor: f64,
}

impl MatchedSolution {
    pub fn interval(&self) -> (f64, f64) {
        (self.left.interval.0, self.right.interval.1)
    }

    pub fn meeting_point(&self) -> f64 {
        self.meet
    }

    pub fn van_vleck(&self) -> VanVleck {
        self.left.vv
    }

    pub fn left(&self) -> &IvpSolution {
        &self.left
    }

    pub fn right(&self) -> &IvpSolution {
        &self.right
    }

    /// `θ_L + θ_R` at the meeting point; `(n+1)π` for an eigenfunction.
    pub fn phase_sum(&self) -> f64 {
        self.left.theta_end() + self.right.theta_end()
    }

    /// Sensitivities of [`Self::phase_sum`] to `(λ1, λ2)`.
    pub fn phase_sensitivity(&self) -> (f64, f64) {
        let (a1, a2) = self.left.theta_sensitivity();
        let (b1, b2) = self.right.theta_sensitivity();
        (a1 + b1, a2 + b2)
    }

    /// `(u, u')` of the joined function.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        if t <= self.meet {
            self.left.eval(t)
        } else {
            let (u, du) = self.right.eval(t);
            (self.factor * u, self.factor * du)
        }
    }

    /// `(u, u')` from one shot: `0` for the left, `1` for the rescaled right.
    pub fn eval_piece(&self, piece: usize, t: f64) -> (f64, f64) {
        if piece == 0 {
            self.left.eval(t)
        } else {
            let (u, du) = self.right.eval(t);
            (self.factor * u, self.factor * du)
        }
    }

    /// Interior zeros, from the Prüfer angles of both shots.
    pub fn zero_count(&self) -> usize {
        let a = self.left.theta_end();
        let b = self.right.theta_end();
        let zl = ((a + ZERO_TOL) / PI).floor().max(0.0);
        let zr = (((b - ZERO_TOL) / PI).ceil() - 1.0).max(0.0);
        (zl + zr) as usize
    }

    /// `|sin(θ_L + θ_R)|`: zero when the two shots join smoothly.
    pub fn matching_residual(&self) -> f64 {
        self.phase_sum().sin().abs()
    }

    /// Step boundaries of both shots, increasing.
    pub fn mesh(&self) -> Vec<f64> {
        let mut m = self.left.mesh();
        m.extend(self.right.mesh());
        m.sort_by(f64::total_cmp);
        m.dedup();
        m
    }
}

/// Meeting point for two-sided shooting: where `σ(base + λ1·slope)` is largest,
/// kept away from the ends.
pub fn meeting_point(pot: &dyn Potential, interval: (f64, f64), sigma: f64, lambda1: f64) -> f64 {
    let (lo, hi) = interval;
    let len = hi - lo;
    let mut best = (f64::NEG_INFINITY, 0.5 * (lo + hi));
    for k in 0..=64 {
        let t = lo + len * k as f64 / 64.0;
        let (b, s) = pot.terms(t);
        let v = sigma * (b + lambda1 * s);
        // ties go to the centre
        if v > best.0 + 1e-12 * v.abs().max(1.0) || (v >= best.0 - 1e-12 * v.abs().max(1.0) && (t - 0.5 * (lo + hi)).abs() < (best.1 - 0.5 * (lo + hi)).abs()) {
            best = (v, t);
        }
    }
    best.1.clamp(lo + 0.1 * len, hi - 0.1 * len)
}

/// Two-sided shot for `prob` at `vv`.
pub fn integrate_matched(pot: &dyn Potential, prob: &SlProblem, vv: VanVleck, tol: OdeTolerances) -> Result<MatchedSolution> {
    validate_interval(prob.interval)?;
    let (lo, hi) = prob.interval;
    let meet = meeting_point(pot, prob.interval, prob.sigma, vv.lambda1);
    let scale = prufer_scale(pot, prob.interval, prob.sigma, vv);
    let left = integrate_scaled(pot, (lo, meet), prob.sigma, vv, prob.bc.left.initial_values(), Direction::LeftToRight, tol, scale)?;
    // u' taken along the shot so both start at angle 0 or π/2
    let (u0, du0) = prob.bc.right.initial_values();
    let right = integrate_scaled(pot, (meet, hi), prob.sigma, vv, (u0, -du0), Direction::RightToLeft, tol, scale)?;
    let sign = if prob.n % 2 == 0 { 1.0 } else { -1.0 };
    let factor = sign * (left.traj.y_end()[1] - right.traj.y_end()[1]).exp();
    Ok(MatchedSolution {
        left,
        right,
        meet,
        factor,
    })
}

/// One equation of a two-parameter problem: interval, sign, conditions and
/// the prescribed number of interior zeros.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlProblem {
    pub interval: (f64, f64),
    pub sigma: f64,
    pub bc: BcPair,
    pub n: usize,
}

impl SlProblem {
    /// `θ_L + θ_R` at the meeting point for the `n`-th eigenfunction.
    pub fn target_phase(&self) -> f64 {
        (self.n as f64 + 1.0) * PI
    }

    /// A `λ2` interval guaranteed by Sturm comparison to hold the eigenvalue.
    pub fn comparison_bracket(&self, pot: &dyn Potential, lambda1: f64) -> (f64, f64) {
        let (lo, hi) = self.interval;
        let mu = self.bc.comparison_mu(self.n, hi - lo);
        let (m, mx) = pot.aux_range(lambda1, lo, hi);
        let (a, b) = if self.sigma > 0.0 { (mu - mx, mu - m) } else { (-mu - mx, -mu - m) };
        let pad = 1e-8 * (1.0 + mu.abs() + m.abs() + mx.abs()) + 1e-3 * (b - a);
        (a - pad, b + pad)
    }
}

#[derive(Debug, Clone)]
pub struct SlEigen {
    pub lambda2: f64,
    /// `dλ2/dλ1` along the eigencurve.
    pub slope: f64,
    pub solution: MatchedSolution,
    pub iterations: usize,
}

/// The unique `λ2` for which the `n`-th eigenfunction exists at fixed `λ1`.
pub fn single_sl_eigenvalue(pot: &dyn Potential, prob: &SlProblem, lambda1: f64, tol: OdeTolerances) -> Result<SlEigen> {
    single_sl_eigenvalue_near(pot, prob, lambda1, None, tol)
}

/// As [`single_sl_eigenvalue`], starting Newton's method from `guess` when given.
pub fn single_sl_eigenvalue_near(
    pot: &dyn Potential,
    prob: &SlProblem,
    lambda1: f64,
    guess: Option<f64>,
    tol: OdeTolerances,
) -> Result<SlEigen> {
    validate_interval(prob.interval)?;
    validate_sigma(prob.sigma)?;
    if !lambda1.is_finite() {
        return Err(Error::InvalidParams(format!("lambda1 = {lambda1}")));
    }
    let target = prob.target_phase();
    let sigma = prob.sigma;
    let phase_tol = (10.0 * tol.rtol).max(1e-12) * target.max(1.0);

    let (mut lo, mut hi) = prob.comparison_bracket(pot, lambda1);
    let mut x = match guess {
        Some(g) if g > lo && g < hi => g,
        _ => {
            let (a, b) = pot.terms(0.5 * (prob.interval.0 + prob.interval.1));
            let (l, h) = prob.interval;
            let mu = prob.bc.comparison_mu(prob.n, h - l);
            let mid = if sigma > 0.0 { mu - (a + lambda1 * b) } else { -mu - (a + lambda1 * b) };
            if mid > lo && mid < hi {
                mid
            } else {
                0.5 * (lo + hi)
            }
        }
    };
    let (orig_lo, orig_hi) = (lo, hi);
    let mut lo_checked = false;
    let mut hi_checked = false;
    let mut best: Option<(f64, MatchedSolution)> = None;
    for it in 0..200 {
        let sol = integrate_matched(pot, prob, VanVleck::new(lambda1, x), tol)?;
        // g increases with λ2 for either sign
        let g = sigma * (sol.phase_sum() - target);
        let dg = sigma * sol.phase_sensitivity().1;
        if g.abs() <= phase_tol {
            let (t1, t2) = sol.phase_sensitivity();
            return Ok(SlEigen {
                lambda2: x,
                slope: -t1 / t2,
                solution: sol,
                iterations: it + 1,
            });
        }
        if g < 0.0 {
            lo = x;
            if x == orig_lo {
                lo_checked = true;
            }
        } else {
            hi = x;
            if x == orig_hi {
                hi_checked = true;
            }
        }
        if best.as_ref().map_or(true, |(bg, _)| g.abs() < *bg) {
            best = Some((g.abs(), sol));
        }
        let width = hi - lo;
        if width <= 4.0 * f64::EPSILON * (1.0 + x.abs()) {
            break;
        }
        let mut next = x - g / dg;
        if !(dg > 0.0) || !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        // the comparison bracket is only trusted after a sign check at its ends
        if (next - orig_lo).abs() < 1e-12 * width.max(1.0) && !lo_checked {
            next = orig_lo;
        } else if (next - orig_hi).abs() < 1e-12 * width.max(1.0) && !hi_checked {
            next = orig_hi;
        }
        x = next;
    }
    let (miss, sol) = best.ok_or_else(|| Error::Search {
        lo,
        hi,
        reason: "no evaluation".into(),
    })?;
    if miss <= 1e3 * phase_tol {
        let (t1, t2) = sol.phase_sensitivity();
        return Ok(SlEigen {
            lambda2: sol.van_vleck().lambda2,
            slope: -t1 / t2,
            solution: sol,
            iterations: 200,
        });
    }
    Err(Error::Search {
        lo,
        hi,
        reason: format!(
            "phase miss {miss:e} for n={} on [{}, {}] at lambda1={lambda1}",
            prob.n, prob.interval.0, prob.interval.1
        ),
    })
}
