//! The three two-parameter eigenvalue problems.
//!
//! Each kind couples two of the three `t`-intervals ("spectral" intervals
//! `a` below `b`) through a common pair `(λ1, λ2)`; the remaining interval
//! carries the companion solution started from the shared endpoint. For
//! fixed `λ1`, each spectral equation has a unique `λ2` with the requested
//! number of zeros (its eigencurve); the eigenvalue is the intersection of the
//! two eigencurves, found by Newton's method on their difference.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chebyshev::{Cheb, Piecewise};
use crate::elliptic::OmegaTable;
use crate::error::{Error, Result};
use crate::geometry::RegionKind;
use crate::quadrature::composite_nodes;
use crate::sturm::{
    integrate_ivp, integrate_matched, single_sl_eigenvalue_near, Bc, BcPair, Direction, OdeTolerances, SlEigen, SlProblem, VanVleck,
    VanVleckPotential,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProblemKind {
    I,
    II,
    III,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 3] = [ProblemKind::I, ProblemKind::II, ProblemKind::III];

    /// Focal endpoints `a_j` carrying a parity bit, in order.
    pub fn endpoints(self) -> &'static [usize] {
        match self {
            ProblemKind::I => &[1, 2, 3],
            ProblemKind::II => &[0, 1, 2, 3],
            ProblemKind::III => &[0, 1, 2],
        }
    }

    /// Coordinate indices `(a, b)` of the spectral intervals, `a < b`.
    pub fn spectral(self) -> [usize; 2] {
        match self {
            ProblemKind::I => [2, 3],
            ProblemKind::II => [1, 3],
            ProblemKind::III => [1, 2],
        }
    }

    pub fn companion(self) -> usize {
        match self {
            ProblemKind::I => 1,
            ProblemKind::II => 2,
            ProblemKind::III => 3,
        }
    }

    /// Sign `σ` of the equation on coordinate interval `i`.
    pub fn sigma(self, i: usize) -> f64 {
        if i == 2 {
            1.0
        } else {
            -1.0
        }
    }

    /// Focal endpoint where the companion solution starts.
    pub fn companion_start(self) -> usize {
        match self {
            ProblemKind::I | ProblemKind::II => 1,
            ProblemKind::III => 2,
        }
    }

    pub fn region(self) -> RegionKind {
        match self {
            ProblemKind::I => RegionKind::First,
            ProblemKind::II => RegionKind::Second,
            ProblemKind::III => RegionKind::Third,
        }
    }

    pub fn from_region(r: RegionKind) -> Self {
        match r {
            RegionKind::First => ProblemKind::I,
            RegionKind::Second => ProblemKind::II,
            RegionKind::Third => ProblemKind::III,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(ProblemKind::I),
            "II" | "2" => Ok(ProblemKind::II),
            "III" | "3" => Ok(ProblemKind::III),
            other => Err(Error::Parse(format!("unknown problem kind '{other}'"))),
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ProblemKind::I => "I",
            ProblemKind::II => "II",
            ProblemKind::III => "III",
        };
        f.write_str(s)
    }
}

/// Parity bits of one kind, stored by focal endpoint (bit `j` ↔ `a_j`, which
/// also indexes the symmetry `σ_j`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Parity {
    kind: ProblemKind,
    mask: u8,
}

impl Parity {
    /// Bits listed in the order of [`ProblemKind::endpoints`].
    pub fn new(kind: ProblemKind, bits: &[u8]) -> Result<Self> {
        let ends = kind.endpoints();
        if bits.len() != ends.len() || bits.iter().any(|b| *b > 1) {
            return Err(Error::InvalidParams(format!(
                "kind {kind} needs {} parity bits in {{0,1}}, got {bits:?}",
                ends.len()
            )));
        }
        let mask = ends.iter().zip(bits).fold(0u8, |m, (&j, &b)| m | (b << j));
        Ok(Self { kind, mask })
    }

    pub fn zero(kind: ProblemKind) -> Self {
        Self { kind, mask: 0 }
    }

    /// Parses a bit string such as `"010"`.
    pub fn parse(kind: ProblemKind, s: &str) -> Result<Self> {
        let bits: Vec<u8> = s
            .trim()
            .chars()
            .filter(|c| *c != ',')
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Parse(format!("invalid parity string '{s}'"))),
            })
            .collect::<Result<_>>()?;
        Self::new(kind, &bits)
    }

    pub fn all(kind: ProblemKind) -> Vec<Self> {
        let m = kind.endpoints().len();
        (0..1u32 << m)
            .map(|code| {
                let bits: Vec<u8> = (0..m).map(|i| ((code >> (m - 1 - i)) & 1) as u8).collect();
                Self::new(kind, &bits).expect("valid bits")
            })
            .collect()
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    /// Bit at focal endpoint `a_j` (zero for endpoints the kind does not use).
    #[inline]
    pub fn at(&self, j: usize) -> u8 {
        (self.mask >> j) & 1
    }

    pub fn mask(&self) -> u8 {
        self.mask
    }

    pub fn bits(&self) -> Vec<u8> {
        self.kind.endpoints().iter().map(|&j| self.at(j)).collect()
    }

    pub fn bc_pair(&self, interval: usize) -> BcPair {
        BcPair::new(Bc::from_bit(self.at(interval - 1)), Bc::from_bit(self.at(interval)))
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    /// Tolerances for the eigenvalue search.
    pub ode: OdeTolerances,
    /// Tolerances for the final Newton steps and eigenfunctions.
    pub polish: OdeTolerances,
    /// Starting value for `λ1`; a comparison estimate is used otherwise.
    pub initial_lambda1: Option<f64>,
    pub max_iter: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            ode: OdeTolerances::DEFAULT,
            polish: OdeTolerances::TIGHT,
            initial_lambda1: None,
            max_iter: 80,
        }
    }
}

/// An eigenvalue pair with its three solution functions in the `t`-variable.
#[derive(Debug, Clone)]
pub struct EigenTriple {
    pub kind: ProblemKind,
    pub n: (usize, usize),
    pub parity: Parity,
    pub lambda: VanVleck,
    table: Arc<OmegaTable>,
    funcs: [Piecewise; 3],
    derivs: [Piecewise; 3],
    /// Prüfer zero counts of the two spectral solutions.
    pub zero_counts: [usize; 2],
    /// Scale-free boundary-condition misses at the far ends of the spectral intervals.
    pub bc_residuals: [f64; 2],
    /// Factors applied to the raw spectral solutions by normalization.
    pub scale: [f64; 2],
    pub iterations: usize,
}

impl EigenTriple {
    pub fn table(&self) -> &Arc<OmegaTable> {
        &self.table
    }

    /// `u_i(t)` on coordinate interval `i`; `t` is clamped to `[b_{i-1}, b_i]`.
    #[inline]
    pub fn u(&self, i: usize, t: f64) -> f64 {
        let (lo, hi) = self.table.t_interval(i);
        self.funcs[i - 1].eval(t.clamp(lo, hi))
    }

    pub fn du(&self, i: usize, t: f64) -> f64 {
        let (lo, hi) = self.table.t_interval(i);
        self.derivs[i - 1].eval(t.clamp(lo, hi))
    }

    pub fn series(&self, i: usize) -> &Piecewise {
        &self.funcs[i - 1]
    }

    /// `E_i(s) = u_i(Ω(s))` for `s` in the closed interval `[a_{i-1}, a_i]`.
    pub fn eval_e(&self, i: usize, s: f64) -> Result<f64> {
        if !(1..=3).contains(&i) {
            return Err(Error::InvalidParams(format!("no coordinate interval {i}")));
        }
        let (lo, hi) = self.table.params().interval(i);
        if !(s >= lo && s <= hi) {
            return Err(Error::domain(s, format!("[{lo}, {hi}]")));
        }
        Ok(self.u(i, self.table.omega_on(i, s)))
    }

    /// `E_i` for `s` known to be in the closed interval (clamped).
    #[inline]
    pub(crate) fn e_unchecked(&self, i: usize, s: f64) -> f64 {
        self.u(i, self.table.omega_on(i, s))
    }

    /// Companion value `E_c(d)` used as the series denominator.
    pub fn companion_value(&self, d: f64) -> Result<f64> {
        self.eval_e(self.kind.companion(), d)
    }

    /// Maximum of `|u_c|` over the companion interval.
    pub fn companion_max(&self) -> f64 {
        self.funcs[self.kind.companion() - 1].max_abs_sampled(400)
    }

    /// `∫∫ (φ(t_b) - φ(t_a)) u_a² u_b²` by direct tensor quadrature.
    pub fn norm_check(&self) -> f64 {
        let [ia, ib] = self.kind.spectral();
        let (ta, wa) = product_grid(&self.table, ia, self.n.0);
        let (tb, wb) = product_grid(&self.table, ib, self.n.1);
        let pa: Vec<f64> = ta.iter().map(|&t| self.table.phi_on(ia, t)).collect();
        let pb: Vec<f64> = tb.iter().map(|&t| self.table.phi_on(ib, t)).collect();
        let ua: Vec<f64> = ta.iter().map(|&t| self.u(ia, t).powi(2)).collect();
        let ub: Vec<f64> = tb.iter().map(|&t| self.u(ib, t).powi(2)).collect();
        let mut s = 0.0;
        for j in 0..tb.len() {
            let mut row = 0.0;
            for i in 0..ta.len() {
                row += wa[i] * (pb[j] - pa[i]) * ua[i];
            }
            s += wb[j] * ub[j] * row;
        }
        s
    }
}

/// Composite Gauss nodes on coordinate interval `i`, fine enough for products
/// of eigenfunctions with up to about `n` zeros.
pub(crate) fn product_grid(table: &OmegaTable, i: usize, n: usize) -> (Vec<f64>, Vec<f64>) {
    let (lo, hi) = table.t_interval(i);
    composite_nodes(lo, hi, 6 + n, 20)
}

fn spectral_problem(kind: ProblemKind, parity: Parity, table: &OmegaTable, which: usize, n: usize) -> SlProblem {
    let i = kind.spectral()[which];
    SlProblem {
        interval: table.t_interval(i),
        sigma: kind.sigma(i),
        bc: parity.bc_pair(i),
        n,
    }
}

fn check_parity(kind: ProblemKind, parity: Parity) -> Result<()> {
    if parity.kind() != kind {
        return Err(Error::InvalidParams(format!(
            "parity {parity} belongs to kind {}, not {kind}",
            parity.kind()
        )));
    }
    Ok(())
}

/// Estimate of `λ1` from replacing `φ` by its midpoint on each spectral interval.
fn comparison_guess(table: &OmegaTable, pa: &SlProblem, pb: &SlProblem) -> f64 {
    let mid = |p: &SlProblem| {
        let (lo, hi) = p.interval;
        let s = table.phi_on(table.interval_of_t(0.5 * (lo + hi)), 0.5 * (lo + hi));
        let m = match (p.bc.left, p.bc.right) {
            (Bc::Neumann, Bc::Neumann) => p.n as f64,
            (Bc::Dirichlet, Bc::Dirichlet) => p.n as f64 + 1.0,
            _ => p.n as f64 + 0.5,
        };
        let mu = (m * std::f64::consts::PI / (hi - lo)).powi(2);
        (s, p.sigma * mu - 0.1875 * s * s)
    };
    let (sa, ra) = mid(pa);
    let (sb, rb) = mid(pb);
    // λ2 + λ1 s = r on both intervals
    (ra - rb) / (sa - sb)
}

/// Seed half-width for the `λ1` search.
fn seed_scale(table: &OmegaTable, n: (usize, usize)) -> f64 {
    let a = table.params();
    let min_len = (1..=3)
        .map(|i| {
            let (lo, hi) = table.t_interval(i);
            hi - lo
        })
        .fold(f64::INFINITY, f64::min);
    let c = 4.0 * std::f64::consts::PI.powi(2) / min_len.powi(2) / (a.get(2) - a.get(1)) + 0.375 * a.get(3).abs();
    c * ((n.0 * n.0 + n.1 * n.1 + 1) as f64)
}

struct CurvePoint {
    lambda1: f64,
    delta: f64,
    slope: f64,
    ea: SlEigen,
    eb: SlEigen,
}

/// Solves the two-parameter problem of `kind` for zero counts `n` and `parity`.
pub fn solve_two_param(
    kind: ProblemKind,
    n: (usize, usize),
    parity: Parity,
    table: &Arc<OmegaTable>,
    opts: &EigenOptions,
) -> Result<EigenTriple> {
    check_parity(kind, parity)?;
    let tab: &OmegaTable = table;
    let pot = VanVleckPotential::new(tab);
    let pa = spectral_problem(kind, parity, tab, 0, n.0);
    let pb = spectral_problem(kind, parity, tab, 1, n.1);

    let eval = |x: f64, guess: Option<(&SlEigen, &SlEigen, f64)>, tol: OdeTolerances| -> Result<CurvePoint> {
        let (ga, gb) = match guess {
            Some((a, b, x0)) => (
                Some(a.lambda2 + a.slope * (x - x0)),
                Some(b.lambda2 + b.slope * (x - x0)),
            ),
            None => (None, None),
        };
        let ea = single_sl_eigenvalue_near(&pot, &pa, x, ga, tol)?;
        let eb = single_sl_eigenvalue_near(&pot, &pb, x, gb, tol)?;
        Ok(CurvePoint {
            lambda1: x,
            delta: ea.lambda2 - eb.lambda2,
            slope: ea.slope - eb.slope,
            ea,
            eb,
        })
    };

    let width = seed_scale(tab, n);
    let mut x = opts
        .initial_lambda1
        .unwrap_or_else(|| comparison_guess(tab, &pa, &pb));
    if !x.is_finite() {
        x = 0.0;
    }
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    let mut f_lo = f64::NAN;
    let mut f_hi = f64::NAN;
    let mut cur = eval(x, None, opts.ode)?;
    let mut iterations = 1;
    let mut tol = opts.ode;
    let mut polishing = false;
    let mut polish_steps = 0;
    loop {
        let scale = 1.0 + cur.ea.lambda2.abs().max(cur.eb.lambda2.abs());
        let dtol = if polishing { 1e-12 * scale } else { 1e-9 * scale };
        if cur.delta < 0.0 {
            lo = cur.lambda1;
            f_lo = cur.delta;
        } else {
            hi = cur.lambda1;
            f_hi = cur.delta;
        }
        if cur.delta.abs() <= dtol || (polishing && polish_steps >= 6) {
            if polishing {
                break;
            }
            polishing = true;
            tol = opts.polish;
            // the tighter curves may cross slightly off the old bracket
            (lo, hi) = (f64::NEG_INFINITY, f64::INFINITY);
            cur = eval(cur.lambda1, Some((&cur.ea, &cur.eb, cur.lambda1)), tol)?;
            iterations += 1;
            continue;
        }
        if iterations >= opts.max_iter {
            return Err(Error::NonConvergence {
                lo,
                hi,
                f_lower: f_lo,
                f_upper: f_hi,
            });
        }
        let mut next = if cur.slope > 0.0 {
            cur.lambda1 - cur.delta / cur.slope
        } else {
            f64::NAN
        };
        if lo.is_finite() && hi.is_finite() {
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (hi - lo) <= 1e-15 * (1.0 + cur.lambda1.abs()) {
                if polishing {
                    break;
                }
                polishing = true;
                tol = opts.polish;
                (lo, hi) = (f64::NEG_INFINITY, f64::INFINITY);
            }
        } else {
            // expand toward the unbracketed side by at most the seed width
            let step_max = width;
            if !next.is_finite() {
                next = cur.lambda1 + if cur.delta < 0.0 { step_max } else { -step_max };
            }
            next = next.clamp(cur.lambda1 - step_max, cur.lambda1 + step_max);
        }
        let prev = cur;
        cur = match eval(next, Some((&prev.ea, &prev.eb, prev.lambda1)), tol) {
            Ok(c) => c,
            Err(_) => {
                // retry without warm start
                eval(next, None, tol)?
            }
        };
        if polishing {
            polish_steps += 1;
        }
        iterations += 1;
    }
    let lambda = VanVleck::new(cur.lambda1, 0.5 * (cur.ea.lambda2 + cur.eb.lambda2));
    build_triple(kind, n, parity, table, lambda, opts.polish, iterations)
}

/// Relative tail size at which eigenfunction samples count as resolved; about
/// the noise level of the dense output at the tight tolerance.
const CHEB_TOL: f64 = 1e-13;

/// Integrates all three equations at the final eigenvalue and normalizes.
fn build_triple(
    kind: ProblemKind,
    n: (usize, usize),
    parity: Parity,
    table: &Arc<OmegaTable>,
    lambda: VanVleck,
    tol: OdeTolerances,
    iterations: usize,
) -> Result<EigenTriple> {
    let tab: &OmegaTable = table;
    let pot = VanVleckPotential::new(tab);
    let [ia, ib] = kind.spectral();
    let mut counts = [0; 2];
    let mut residuals = [0.0; 2];
    let mut funcs: Vec<Piecewise> = Vec::with_capacity(3);
    for i in 1..=3 {
        let (lo, hi) = tab.t_interval(i);
        let cheb = if i == kind.companion() {
            let sol = companion_solution(kind, lambda, parity, tab, tol)?;
            Piecewise::from(Cheb::adaptive(lo, hi, CHEB_TOL, 16, 1024, |t| sol.eval(t).0).0)
        } else {
            let k = if i == ia { 0 } else { 1 };
            let prob = spectral_problem(kind, parity, tab, k, n.0 * (1 - k) + n.1 * k);
            let sol = integrate_matched(&pot, &prob, lambda, tol)?;
            counts[k] = sol.zero_count();
            residuals[k] = sol.matching_residual();
            let m = sol.meeting_point();
            Piecewise::new(vec![
                Cheb::adaptive(lo, m, CHEB_TOL, 16, 1024, |t| sol.eval_piece(0, t).0).0,
                Cheb::adaptive(m, hi, CHEB_TOL, 16, 1024, |t| sol.eval_piece(1, t).0).0,
            ])
        };
        funcs.push(cheb);
    }
    let mut funcs: [Piecewise; 3] = funcs.try_into().expect("three intervals");
    let expected = [n.0, n.1];
    if counts != expected {
        return Err(Error::InternalConsistency(format!(
            "kind {kind} parity {parity}: zero counts {counts:?} differ from requested {expected:?}"
        )));
    }

    // separated normalization integrals
    let moments = |i: usize, f: &Piecewise, nz: usize| {
        let (t, w) = product_grid(tab, i, nz);
        let mut m0 = 0.0;
        let mut m1 = 0.0;
        for (tk, wk) in t.iter().zip(&w) {
            let u2 = f.eval(*tk).powi(2);
            m0 += wk * u2;
            m1 += wk * tab.phi_on(i, *tk) * u2;
        }
        (m0, m1)
    };
    let (a0, a1) = moments(ia, &funcs[ia - 1], n.0);
    let (b0, b1) = moments(ib, &funcs[ib - 1], n.1);
    let norm = a0 * b1 - a1 * b0;
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::InternalConsistency(format!(
            "normalization integral {norm} is not positive"
        )));
    }
    let alpha = 1.0 / a0.sqrt();
    let beta = (a0 / norm).sqrt();
    funcs[ia - 1].scale(alpha);
    funcs[ib - 1].scale(beta);
    let derivs = [funcs[0].derivative(), funcs[1].derivative(), funcs[2].derivative()];
    Ok(EigenTriple {
        kind,
        n,
        parity,
        lambda,
        table: Arc::clone(table),
        funcs,
        derivs,
        zero_counts: counts,
        bc_residuals: residuals,
        scale: [alpha, beta],
        iterations,
    })
}

/// The companion solution on the non-spectral interval for a given eigenvalue,
/// started from the shared endpoint with parity-determined data.
pub fn companion_solution(
    kind: ProblemKind,
    lambda: VanVleck,
    parity: Parity,
    table: &OmegaTable,
    tol: OdeTolerances,
) -> Result<crate::sturm::IvpSolution> {
    check_parity(kind, parity)?;
    let pot = VanVleckPotential::new(table);
    let i = kind.companion();
    let start = kind.companion_start();
    let init = Bc::from_bit(parity.at(start)).initial_values();
    let dir = if start == i - 1 {
        Direction::LeftToRight
    } else {
        Direction::RightToLeft
    };
    integrate_ivp(&pot, table.t_interval(i), kind.sigma(i), lambda, init, dir, tol)
}

/// Rescales `u_a` so that `∫u_a² = 1` and `u_b` so the product norm is one.
/// Returns the applied factors.
pub fn normalize(triple: &mut EigenTriple) -> Result<[f64; 2]> {
    let tab = Arc::clone(&triple.table);
    let [ia, ib] = triple.kind.spectral();
    let grid = |i: usize, nz: usize| product_grid(&tab, i, nz);
    let (ta, wa) = grid(ia, triple.n.0);
    let (tb, wb) = grid(ib, triple.n.1);
    let mom = |i: usize, t: &[f64], w: &[f64], f: &Piecewise| {
        t.iter().zip(w).fold((0.0, 0.0), |(m0, m1), (tk, wk)| {
            let u2 = f.eval(*tk).powi(2);
            (m0 + wk * u2, m1 + wk * tab.phi_on(i, *tk) * u2)
        })
    };
    let (a0, a1) = mom(ia, &ta, &wa, &triple.funcs[ia - 1]);
    let (b0, b1) = mom(ib, &tb, &wb, &triple.funcs[ib - 1]);
    let norm = a0 * b1 - a1 * b0;
    if !(norm > 0.0) || !norm.is_finite() || a0 == 0.0 {
        return Err(Error::InternalConsistency(format!(
            "normalization integral {norm} is not positive"
        )));
    }
    let alpha = 1.0 / a0.sqrt();
    let beta = (a0 / norm).sqrt();
    // sign convention: first nonvanishing of (u, u') at the left end is positive
    let sign = |f: &Piecewise, lo: f64| {
        let v = f.eval(lo);
        let d = f.derivative().eval(lo);
        let lead = if v.abs() > 1e-10 * (v.abs() + d.abs()) { v } else { d };
        if lead < 0.0 {
            -1.0
        } else {
            1.0
        }
    };
    let sa = sign(&triple.funcs[ia - 1], tab.t_interval(ia).0);
    let sb = sign(&triple.funcs[ib - 1], tab.t_interval(ib).0);
    triple.funcs[ia - 1].scale(alpha * sa);
    triple.funcs[ib - 1].scale(beta * sb);
    triple.derivs[ia - 1] = triple.funcs[ia - 1].derivative();
    triple.derivs[ib - 1] = triple.funcs[ib - 1].derivative();
    triple.scale = [triple.scale[0] * alpha * sa, triple.scale[1] * beta * sb];
    Ok([alpha * sa, beta * sb])
}

impl EigenTriple {
    /// Multiplies the spectral solutions by `c` and `1/c` (for testing invariances).
    pub fn rescaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        let [ia, ib] = self.kind.spectral();
        out.funcs[ia - 1].scale(c);
        out.funcs[ib - 1].scale(1.0 / c);
        out.derivs[ia - 1] = out.funcs[ia - 1].derivative();
        out.derivs[ib - 1] = out.funcs[ib - 1].derivative();
        out
    }
}

/// All triples with `n_a, n_b < n_max` for one parity, ordered by `(n_a, n_b)`.
pub fn solve_rectangle(
    kind: ProblemKind,
    parity: Parity,
    n_max: usize,
    table: &Arc<OmegaTable>,
    opts: &EigenOptions,
) -> Vec<((usize, usize), Result<EigenTriple>)> {
    let idx: Vec<(usize, usize)> = (0..n_max).flat_map(|i| (0..n_max).map(move |j| (i, j))).collect();
    idx.into_par_iter()
        .map(|n| (n, solve_two_param(kind, n, parity, table, opts)))
        .collect()
}

/// Weighted inner products of the products `u_a u_b` of the given triples.
pub fn gram_of(triples: &[EigenTriple]) -> Vec<Vec<f64>> {
    if triples.is_empty() {
        return Vec::new();
    }
    let kind = triples[0].kind;
    let tab = Arc::clone(&triples[0].table);
    let [ia, ib] = kind.spectral();
    let nmax = triples.iter().map(|t| t.n.0.max(t.n.1)).max().unwrap_or(0);
    let (ta, wa) = product_grid(&tab, ia, 2 * nmax);
    let (tb, wb) = product_grid(&tab, ib, 2 * nmax);
    let pa: Vec<f64> = ta.iter().map(|&t| tab.phi_on(ia, t)).collect();
    let pb: Vec<f64> = tb.iter().map(|&t| tab.phi_on(ib, t)).collect();
    let ua: Vec<Vec<f64>> = triples.iter().map(|tr| ta.iter().map(|&t| tr.u(ia, t)).collect()).collect();
    let ub: Vec<Vec<f64>> = triples.iter().map(|tr| tb.iter().map(|&t| tr.u(ib, t)).collect()).collect();
    let m = triples.len();
    let mut g = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i..m {
            let (mut a0, mut a1, mut b0, mut b1) = (0.0, 0.0, 0.0, 0.0);
            for k in 0..ta.len() {
                let p = wa[k] * ua[i][k] * ua[j][k];
                a0 += p;
                a1 += p * pa[k];
            }
            for k in 0..tb.len() {
                let p = wb[k] * ub[i][k] * ub[j][k];
                b0 += p;
                b1 += p * pb[k];
            }
            let v = a0 * b1 - a1 * b0;
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    g
}

/// Gram matrix of the basis `{n_a, n_b < n_max}` for one kind and parity,
/// with the index order used for its rows.
pub fn gram_matrix(
    kind: ProblemKind,
    parity: Parity,
    n_max: usize,
    table: &Arc<OmegaTable>,
    opts: &EigenOptions,
) -> Result<(Vec<(usize, usize)>, Vec<Vec<f64>>)> {
    if n_max == 0 {
        return Err(Error::InvalidParams("truncation must be at least 1".into()));
    }
    let mut triples = Vec::new();
    let mut index = Vec::new();
    for (n, r) in solve_rectangle(kind, parity, n_max, table, opts) {
        triples.push(r?);
        index.push(n);
    }
    Ok((index, gram_of(&triples)))
}
