//! Internal cyclidic harmonics of the three kinds and finite-difference
//! Laplacian checks in three and four dimensions.

use std::sync::Arc;

use crate::eigensolver::{EigenTriple, Parity, ProblemKind};
use crate::error::{Error, Result};
use crate::geometry::{stereo_project, to_cyclide, CyclideCoords, ParamsA, Point3, Point4};

/// Coordinates and symmetry data of a point, shared by all harmonics evaluated there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointData {
    pub p: Point3,
    pub s: CyclideCoords,
    pub rho2: f64,
    /// Bit `j` set when `σ_j` maps the canonical representative to `p`:
    /// bit 0 outside the unit ball, bits 1..3 for negative `x, y, z`.
    pub word: u8,
}

impl PointData {
    pub fn new(p: &Point3, a: &ParamsA) -> Self {
        let rho2 = p.norm_squared();
        let mut word = 0u8;
        if rho2 > 1.0 {
            word |= 1;
        }
        for i in 0..3 {
            if p[i] < 0.0 {
                word |= 1 << (i + 1);
            }
        }
        Self {
            p: *p,
            s: to_cyclide(p, a),
            rho2,
            word,
        }
    }

    /// `(-1)^{p·ε}` for the symmetries relevant to `parity`.
    #[inline]
    pub fn parity_sign(&self, parity: &Parity) -> f64 {
        let mut relevant = 0u8;
        for &j in parity.kind().endpoints() {
            relevant |= 1 << j;
        }
        if (parity.mask() & self.word & relevant).count_ones() % 2 == 1 {
            -1.0
        } else {
            1.0
        }
    }
}

/// `G = (ρ²+1)^{-1/2} E_1(s_1) E_2(s_2) E_3(s_3)`, extended by parity.
#[derive(Debug, Clone)]
pub struct CyclidicHarmonic {
    triple: Arc<EigenTriple>,
}

impl CyclidicHarmonic {
    pub fn new(triple: EigenTriple) -> Self {
        Self {
            triple: Arc::new(triple),
        }
    }

    pub fn from_arc(triple: Arc<EigenTriple>) -> Self {
        Self { triple }
    }

    pub fn triple(&self) -> &EigenTriple {
        &self.triple
    }

    pub fn kind(&self) -> ProblemKind {
        self.triple.kind
    }

    pub fn parity(&self) -> Parity {
        self.triple.parity
    }

    pub fn params(&self) -> &ParamsA {
        self.triple.table().params()
    }

    /// Domain check for `p`.
    pub fn check_domain(&self, p: &Point3) -> Result<()> {
        if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
            return Err(Error::domain(f64::NAN, "finite points"));
        }
        match self.kind() {
            ProblemKind::I if p.norm_squared() > 1.0 => Err(Error::domain(p.norm(), "closed unit ball")),
            ProblemKind::III if !(p.z > 0.0) => Err(Error::domain(p.z, "z > 0")),
            _ => Ok(()),
        }
    }

    /// `E_1 E_2 E_3` at the coordinates of `pt` times the parity sign.
    #[inline]
    pub fn w_prepared(&self, pt: &PointData) -> f64 {
        let t = &self.triple;
        let e = t.eval_e_clamped(1, pt.s.s[0]) * t.eval_e_clamped(2, pt.s.s[1]) * t.eval_e_clamped(3, pt.s.s[2]);
        e * pt.parity_sign(&t.parity)
    }

    /// `G` at a prepared point; the domain is not checked.
    #[inline]
    pub fn eval_prepared(&self, pt: &PointData) -> f64 {
        self.w_prepared(pt) / (pt.rho2 + 1.0).sqrt()
    }

    pub fn eval(&self, p: &Point3) -> Result<f64> {
        self.check_domain(p)?;
        Ok(self.eval_prepared(&PointData::new(p, self.params())))
    }

    /// Value plus a flag set where harmonicity is not guaranteed
    /// (the `s2 = a2` set for the second kind).
    pub fn eval_flagged(&self, p: &Point3) -> Result<(f64, bool)> {
        self.check_domain(p)?;
        let pt = PointData::new(p, self.params());
        let a = self.params();
        let flagged = self.kind() == ProblemKind::II && pt.s.s[1] >= a.get(2) - 1e-10 * a.span();
        Ok((self.eval_prepared(&pt), flagged))
    }

    /// `U(x) = |x|^{-1/2} w(P(x/|x|))` on `R^4`, with `w = (ρ²+1)^{1/2} G`.
    pub fn lift_4d(&self, x: &Point4) -> Result<f64> {
        let r = x.norm();
        if r == 0.0 {
            return Err(Error::Singular("origin of R^4".into()));
        }
        let p = stereo_project(&(x / r))?;
        self.check_domain(&p)?;
        let pt = PointData::new(&p, self.params());
        Ok(self.w_prepared(&pt) / r.sqrt())
    }
}

impl EigenTriple {
    #[inline]
    pub(crate) fn eval_e_clamped(&self, i: usize, s: f64) -> f64 {
        let (lo, hi) = self.table().params().interval(i);
        self.e_unchecked(i, s.clamp(lo, hi))
    }
}

pub fn eval_g(h: &CyclidicHarmonic, p: &Point3) -> Result<f64> {
    h.eval(p)
}

/// Seven-point finite-difference Laplacian of `f` at `p` with step `h`.
pub fn laplacian_residual<F>(f: F, p: &Point3, h: f64) -> Result<f64>
where
    F: Fn(&Point3) -> Result<f64>,
{
    if !(h > 0.0) {
        return Err(Error::InvalidParams(format!("step must be positive, got {h}")));
    }
    let c = f(p)?;
    let mut s = -6.0 * c;
    for i in 0..3 {
        for sign in [-1.0, 1.0] {
            let mut q = *p;
            q[i] += sign * h;
            s += f(&q)?;
        }
    }
    Ok(s / (h * h))
}

/// Nine-point finite-difference Laplacian in `R^4`.
pub fn laplacian_residual_4d<F>(f: F, x: &Point4, h: f64) -> Result<f64>
where
    F: Fn(&Point4) -> Result<f64>,
{
    if !(h > 0.0) {
        return Err(Error::InvalidParams(format!("step must be positive, got {h}")));
    }
    let c = f(x)?;
    let mut s = -8.0 * c;
    for i in 0..4 {
        for sign in [-1.0, 1.0] {
            let mut q = *x;
            q[i] += sign * h;
            s += f(&q)?;
        }
    }
    Ok(s / (h * h))
}

/// Residuals at steps `h` and `h/2` and their ratio (about 4 for a harmonic `f`).
pub fn richardson_pair<F>(f: F, p: &Point3, h: f64) -> Result<(f64, f64, f64)>
where
    F: Fn(&Point3) -> Result<f64>,
{
    let r1 = laplacian_residual(&f, p, h)?;
    let r2 = laplacian_residual(&f, p, 0.5 * h)?;
    Ok((r1, r2, r1.abs() / r2.abs()))
}
