//! Focal parameters, sphero-conal and stereographic maps, 5-cyclide
//! coordinates, the symmetry group, scale factors, regions and meshes.

use std::collections::HashMap;
use std::fmt::Write as _;

use nalgebra::{Matrix3, Matrix4, SymmetricEigen, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point3 = nalgebra::Vector3<f64>;
pub type Point4 = nalgebra::Vector4<f64>;

/// The focal parameters `a0 < a1 < a2 < a3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct ParamsA {
    a: [f64; 4],
}

impl ParamsA {
    pub fn new(a: [f64; 4]) -> Result<Self> {
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams(format!("non-finite focal parameter in {a:?}")));
        }
        if !(a[0] < a[1] && a[1] < a[2] && a[2] < a[3]) {
            return Err(Error::InvalidParams(format!(
                "focal parameters must be strictly increasing, got {a:?}"
            )));
        }
        Ok(Self { a })
    }

    pub fn from_slice(a: &[f64]) -> Result<Self> {
        let arr: [f64; 4] = a
            .try_into()
            .map_err(|_| Error::InvalidParams(format!("expected 4 focal parameters, got {}", a.len())))?;
        Self::new(arr)
    }

    #[inline]
    pub fn get(&self, j: usize) -> f64 {
        self.a[j]
    }

    #[inline]
    pub fn as_array(&self) -> [f64; 4] {
        self.a
    }

    pub fn span(&self) -> f64 {
        self.a[3] - self.a[0]
    }

    /// Closed interval `[a_{i-1}, a_i]` of coordinate `s_i`, `i = 1..=3`.
    pub fn interval(&self, i: usize) -> (f64, f64) {
        (self.a[i - 1], self.a[i])
    }
}

impl Default for ParamsA {
    fn default() -> Self {
        Self { a: [0.0, 1.0, 2.0, 3.0] }
    }
}

impl TryFrom<[f64; 4]> for ParamsA {
    type Error = Error;
    fn try_from(a: [f64; 4]) -> Result<Self> {
        Self::new(a)
    }
}

impl From<ParamsA> for [f64; 4] {
    fn from(p: ParamsA) -> Self {
        p.a
    }
}

/// Coordinates `(s1, s2, s3)` with `s_i ∈ [a_{i-1}, a_i]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CyclideCoords {
    pub s: [f64; 3],
}

impl CyclideCoords {
    pub fn new(s1: f64, s2: f64, s3: f64) -> Self {
        Self { s: [s1, s2, s3] }
    }

    /// Checks `a_{i-1} < s_i < a_i` for all three coordinates.
    pub fn check_interior(&self, a: &ParamsA) -> Result<()> {
        for i in 0..3 {
            let (lo, hi) = a.interval(i + 1);
            let s = self.s[i];
            if !s.is_finite() || s < lo || s > hi {
                return Err(Error::domain(s, format!("[{lo}, {hi}]")));
            }
            if s == lo || s == hi {
                return Err(Error::BoundaryCoordinate { index: i + 1, value: s });
            }
        }
        Ok(())
    }
}

/// Which preimage under the inversion is selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Inside,
    Outside,
}

/// Octant signs and ball side selecting one of the 16 points with given coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignProfile {
    pub eps: [i8; 3],
    pub side: Side,
}

impl SignProfile {
    pub const POSITIVE: SignProfile = SignProfile {
        eps: [1, 1, 1],
        side: Side::Inside,
    };

    pub fn new(eps: [i8; 3], side: Side) -> Result<Self> {
        if eps.iter().any(|e| *e != 1 && *e != -1) {
            return Err(Error::InvalidParams(format!("signs must be ±1, got {eps:?}")));
        }
        Ok(Self { eps, side })
    }

    /// Sheet id in `0..16`: bit `i` set for a negative `eps_{i+1}`, bit 3 for outside.
    pub fn id(&self) -> usize {
        let mut id = 0;
        for i in 0..3 {
            if self.eps[i] < 0 {
                id |= 1 << i;
            }
        }
        if self.side == Side::Outside {
            id |= 8;
        }
        id
    }

    pub fn from_id(id: usize) -> Self {
        let e = |bit: usize| if id & (1 << bit) != 0 { -1 } else { 1 };
        Self {
            eps: [e(0), e(1), e(2)],
            side: if id & 8 != 0 { Side::Outside } else { Side::Inside },
        }
    }

    pub fn all() -> impl Iterator<Item = SignProfile> {
        (0..16).map(Self::from_id)
    }

    /// Profile of a point off the symmetry sets.
    pub fn of_point(p: &Point3) -> Self {
        let e = |v: f64| if v < 0.0 { -1 } else { 1 };
        Self {
            eps: [e(p.x), e(p.y), e(p.z)],
            side: if p.norm_squared() > 1.0 { Side::Outside } else { Side::Inside },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionKind {
    First,
    Second,
    Third,
}

impl RegionKind {
    /// Index of the coordinate held fixed on the boundary.
    pub fn boundary_coordinate(&self) -> usize {
        match self {
            RegionKind::First => 1,
            RegionKind::Second => 2,
            RegionKind::Third => 3,
        }
    }
}

/// One of the three region families with its defining constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub kind: RegionKind,
    pub d: f64,
}

impl RegionSpec {
    pub fn new(kind: RegionKind, d: f64, a: &ParamsA) -> Result<Self> {
        let (lo, hi) = a.interval(kind.boundary_coordinate());
        if !(d > lo && d < hi) {
            return Err(Error::InvalidParams(format!(
                "region constant d = {d} must lie in ({lo}, {hi})"
            )));
        }
        Ok(Self { kind, d })
    }
}

// ---------------------------------------------------------------------------
// sphero-conal coordinates on R^{k+1}

fn check_increasing(a: &[f64]) -> Result<()> {
    if a.len() < 2 {
        return Err(Error::InvalidParams("need at least two focal parameters".into()));
    }
    if a.windows(2).any(|w| !(w[0] < w[1])) || a.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "focal parameters must be strictly increasing, got {a:?}"
        )));
    }
    Ok(())
}

/// Forward sphero-conal map of a point in the open positive cone of `R^{k+1}`:
/// returns `r` and the roots `s_1 < .. < s_k` with `s_i ∈ (a_{i-1}, a_i)`.
pub fn sphero_conal_forward(x: &[f64], a: &[f64]) -> Result<(f64, Vec<f64>)> {
    check_increasing(a)?;
    if x.len() != a.len() {
        return Err(Error::InvalidParams(format!(
            "point has {} components but {} focal parameters were given",
            x.len(),
            a.len()
        )));
    }
    if x.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::DegenerateInput(format!(
            "point {x:?} is not in the open positive cone"
        )));
    }
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let w: Vec<f64> = x.iter().map(|v| (v / r) * (v / r)).collect();
    let f = |s: f64| -> f64 { w.iter().zip(a).map(|(wj, aj)| wj / (s - aj)).sum() };
    let mut roots = Vec::with_capacity(a.len() - 1);
    for i in 1..a.len() {
        // strictly decreasing from +inf to -inf on the open interval
        let (mut lo, mut hi) = (a[i - 1], a[i]);
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    Ok((r, roots))
}

/// Inverse sphero-conal map onto the positive cone.
pub fn sphero_conal_inverse(r: f64, s: &[f64], a: &[f64]) -> Result<Vec<f64>> {
    check_increasing(a)?;
    if s.len() + 1 != a.len() {
        return Err(Error::InvalidParams(format!(
            "expected {} coordinates, got {}",
            a.len() - 1,
            s.len()
        )));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::domain(r, "(0, inf)"));
    }
    for (i, si) in s.iter().enumerate() {
        if !(*si > a[i] && *si < a[i + 1]) {
            return Err(Error::domain(*si, format!("({}, {})", a[i], a[i + 1])));
        }
    }
    let x = (0..a.len())
        .map(|j| {
            let num: f64 = s.iter().map(|si| si - a[j]).product();
            let den: f64 = (0..a.len()).filter(|&i| i != j).map(|i| a[i] - a[j]).product();
            r * (num / den).max(0.0).sqrt()
        })
        .collect();
    Ok(x)
}

/// Squared sphero-conal scale factors `H_{s_i}^2` at a positive-cone point,
/// each as the pair (Cartesian sum, product form).
pub fn sphero_conal_scale_sq(x: &[f64], a: &[f64]) -> Result<Vec<(f64, f64)>> {
    let (r, s) = sphero_conal_forward(x, a)?;
    let out = (0..s.len())
        .map(|i| {
            let si = s[i];
            let sum: f64 = x
                .iter()
                .zip(a)
                .map(|(xj, aj)| xj * xj / ((si - aj) * (si - aj)))
                .sum::<f64>()
                * 0.25;
            let num: f64 = (0..s.len()).filter(|&j| j != i).map(|j| si - s[j]).product();
            let den: f64 = a.iter().map(|aj| si - aj).product();
            (sum, -0.25 * r * r * num / den)
        })
        .collect();
    Ok(out)
}

// ---------------------------------------------------------------------------
// stereographic projection

/// `P(x0, x1, x2, x3) = (x1, x2, x3) / (1 - x0)`.
pub fn stereo_project(p: &Point4) -> Result<Point3> {
    let den = 1.0 - p[0];
    if den == 0.0 {
        return Err(Error::Pole);
    }
    Ok(Point3::new(p[1] / den, p[2] / den, p[3] / den))
}

/// `P^{-1}(x, y, z) = (ρ² - 1, 2x, 2y, 2z) / (ρ² + 1)`.
pub fn stereo_invert(p: &Point3) -> Point4 {
    let rho2 = p.norm_squared();
    let den = rho2 + 1.0;
    Vector4::new((rho2 - 1.0) / den, 2.0 * p.x / den, 2.0 * p.y / den, 2.0 * p.z / den)
}

/// Unnormalized preimage `(ρ² - 1, 2x, 2y, 2z)`.
#[inline]
fn lifted(p: &Point3) -> [f64; 4] {
    [p.norm_squared() - 1.0, 2.0 * p.x, 2.0 * p.y, 2.0 * p.z]
}

// ---------------------------------------------------------------------------
// 5-cyclide coordinates

/// 5-cyclide coordinates of an arbitrary point.
///
/// The three roots are the eigenvalues of `diag(a)` compressed to the
/// orthogonal complement of the lifted point, which keeps each root inside
/// its closed interval even where two roots merge.
pub fn to_cyclide(p: &Point3, a: &ParamsA) -> CyclideCoords {
    let x = lifted(p);
    let norm = (x.iter().map(|v| v * v).sum::<f64>()).sqrt();
    let v = Vector4::new(x[0] / norm, x[1] / norm, x[2] / norm, x[3] / norm);
    let aa = a.as_array();
    let mean = 0.25 * aa.iter().sum::<f64>();
    let d = Matrix4::from_diagonal(&Vector4::new(aa[0] - mean, aa[1] - mean, aa[2] - mean, aa[3] - mean));

    // Householder reflector sending v to a multiple of e_k
    let k = v.iamax();
    let mut w = v;
    w[k] += v[k].signum();
    let beta = w.norm_squared();
    let h = Matrix4::identity() - w * w.transpose() * (2.0 / beta);
    let m = h * d * h;
    let keep: Vec<usize> = (0..4).filter(|&i| i != k).collect();
    let sub = Matrix3::from_fn(|i, j| 0.5 * (m[(keep[i], keep[j])] + m[(keep[j], keep[i])]));
    let eig = SymmetricEigen::new(sub);
    let mut s = [eig.eigenvalues[0], eig.eigenvalues[1], eig.eigenvalues[2]];
    s.sort_by(|p, q| p.partial_cmp(q).unwrap());
    for (i, si) in s.iter_mut().enumerate() {
        *si = (*si + mean).clamp(aa[i], aa[i + 1]);
    }
    CyclideCoords { s }
}

/// Residual of the cleared cubic `Σ_j X_j² Π_{i≠j}(s - a_i)` relative to its term scale.
pub fn cubic_residual(p: &Point3, s: f64, a: &ParamsA) -> f64 {
    let x = lifted(p);
    let aa = a.as_array();
    let mut val = 0.0;
    let mut scale = 0.0;
    for j in 0..4 {
        let w = x[j] * x[j];
        let mut prod = 1.0;
        let mut prod_abs = 1.0;
        for (i, ai) in aa.iter().enumerate() {
            if i != j {
                prod *= s - ai;
                prod_abs *= s.abs() + ai.abs();
            }
        }
        val += w * prod;
        scale += w * prod_abs;
    }
    if scale == 0.0 {
        0.0
    } else {
        val.abs() / scale
    }
}

/// Unit-sphere point in `R^4` with squared components from the coordinate formula.
fn sphere_point(c: &CyclideCoords, signs: &SignProfile, a: &ParamsA) -> Result<Point4> {
    let aa = a.as_array();
    let mut x = [0.0; 4];
    for j in 0..4 {
        let num: f64 = c.s.iter().map(|si| si - aa[j]).product();
        let den: f64 = (0..4).filter(|&i| i != j).map(|i| aa[i] - aa[j]).product();
        let mut sq = num / den;
        if sq < 0.0 {
            if sq > -1e-13 {
                sq = 0.0;
            } else {
                return Err(Error::InternalConsistency(format!(
                    "negative squared component {sq} for coordinates {:?}",
                    c.s
                )));
            }
        }
        x[j] = sq.sqrt();
    }
    x[0] = match signs.side {
        Side::Inside => -x[0],
        Side::Outside => x[0],
    };
    for i in 0..3 {
        x[i + 1] *= f64::from(signs.eps[i]);
    }
    Ok(Vector4::new(x[0], x[1], x[2], x[3]))
}

/// The point with coordinates `c` selected by `signs`; coordinates must be interior.
pub fn from_cyclide(c: &CyclideCoords, signs: &SignProfile, a: &ParamsA) -> Result<Point3> {
    c.check_interior(a)?;
    from_cyclide_closed(c, signs, a)
}

/// Like [`from_cyclide`] but accepts coordinates on interval endpoints.
pub fn from_cyclide_closed(c: &CyclideCoords, signs: &SignProfile, a: &ParamsA) -> Result<Point3> {
    for i in 0..3 {
        let (lo, hi) = a.interval(i + 1);
        if !(c.s[i] >= lo && c.s[i] <= hi) {
            return Err(Error::domain(c.s[i], format!("[{lo}, {hi}]")));
        }
    }
    let x = sphere_point(c, signs, a)?;
    stereo_project(&x)
}

// ---------------------------------------------------------------------------
// symmetries

/// `σ0` is inversion at the unit sphere, `σ1..σ3` reflect in the coordinate planes.
pub fn apply_symmetry(i: usize, p: &Point3) -> Result<Point3> {
    match i {
        0 => {
            let rho2 = p.norm_squared();
            if rho2 == 0.0 {
                return Err(Error::Singular("inversion at the origin".into()));
            }
            Ok(p / rho2)
        }
        1..=3 => {
            let mut q = *p;
            q[i - 1] = -q[i - 1];
            Ok(q)
        }
        _ => Err(Error::InvalidParams(format!("no symmetry with index {i}"))),
    }
}

// ---------------------------------------------------------------------------
// scale factors

/// Scale factors from the Cartesian sum and from the product formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleFactors {
    pub cartesian: [f64; 3],
    pub product: [f64; 3],
}

impl ScaleFactors {
    pub fn h(&self) -> [f64; 3] {
        self.product
    }
}

/// Cartesian-sum scale factor of coordinate value `s` at point `p`.
pub fn scale_factor_cartesian(p: &Point3, s: f64, a: &ParamsA) -> f64 {
    let x = lifted(p);
    let sum: f64 = (0..4).map(|j| x[j] * x[j] / ((s - a.get(j)) * (s - a.get(j)))).sum();
    (sum / 16.0).sqrt()
}

/// Product-form scale factors at coordinates `s` of a point with `ρ² = rho2`.
pub fn scale_factors_product(s: &[f64; 3], rho2: f64, a: &ParamsA) -> [f64; 3] {
    let pre = (rho2 + 1.0) * (rho2 + 1.0) / 16.0;
    let mut h = [0.0; 3];
    for i in 0..3 {
        let num: f64 = (0..3).filter(|&j| j != i).map(|j| (s[j] - s[i]).abs()).product();
        let den: f64 = (0..4).map(|j| (s[i] - a.get(j)).abs()).product();
        h[i] = (pre * num / den).sqrt();
    }
    h
}

pub fn scale_factors(p: &Point3, a: &ParamsA) -> Result<ScaleFactors> {
    let c = to_cyclide(p, a);
    let s = c.s;
    let tol = 1e-12 * a.span();
    if (s[1] - s[0]).abs() < tol || (s[2] - s[1]).abs() < tol {
        return Err(Error::Degenerate(format!("coordinates {s:?} coincide")));
    }
    for (i, si) in s.iter().enumerate() {
        let (lo, hi) = a.interval(i + 1);
        if (si - lo).abs() < tol || (hi - si).abs() < tol {
            return Err(Error::BoundaryCoordinate { index: i + 1, value: *si });
        }
    }
    let cartesian = [
        scale_factor_cartesian(p, s[0], a),
        scale_factor_cartesian(p, s[1], a),
        scale_factor_cartesian(p, s[2], a),
    ];
    let product = scale_factors_product(&s, p.norm_squared(), a);
    Ok(ScaleFactors { cartesian, product })
}

// ---------------------------------------------------------------------------
// regions

/// Membership in the open region; boundary points are excluded.
pub fn region_contains(r: &RegionSpec, p: &Point3, a: &ParamsA) -> bool {
    let s = to_cyclide(p, a).s;
    match r.kind {
        RegionKind::First => p.norm_squared() < 1.0 && s[0] > r.d,
        RegionKind::Second => s[1] < r.d,
        RegionKind::Third => p.z > 0.0 && s[2] < r.d,
    }
}

/// Residual of the coordinate-surface equation `Σ X_j²/(d - a_j) = 0`, scaled by its terms.
pub fn surface_residual(p: &Point3, d: f64, a: &ParamsA) -> f64 {
    let x = lifted(p);
    let mut val = 0.0;
    let mut scale = 0.0;
    for j in 0..4 {
        let term = x[j] * x[j] / (d - a.get(j));
        val += term;
        scale += term.abs();
    }
    if scale == 0.0 {
        0.0
    } else {
        val.abs() / scale
    }
}

// ---------------------------------------------------------------------------
// coordinate-surface meshes

/// One sign-profile sheet of a coordinate surface sampled on a rectangular grid.
#[derive(Debug, Clone)]
pub struct Sheet {
    pub profile: SignProfile,
    pub rows: usize,
    pub cols: usize,
    pub points: Vec<Point3>,
}

impl Sheet {
    pub fn at(&self, i: usize, j: usize) -> &Point3 {
        &self.points[i * self.cols + j]
    }
}

/// The coordinate surface `s_i = d` as 16 sign-profile sheets.
#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    pub index: usize,
    pub d: f64,
    pub sheets: Vec<Sheet>,
}

/// Angle-uniform samples of `[lo, hi]` including both ends.
fn lobatto_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n)
        .map(|k| {
            if k == 0 {
                lo
            } else if k == n - 1 {
                hi
            } else {
                let th = std::f64::consts::PI * k as f64 / (n - 1) as f64;
                0.5 * (lo + hi) - 0.5 * (hi - lo) * th.cos()
            }
        })
        .collect()
}

pub fn surface_mesh(i: usize, d: f64, resolution: (usize, usize), a: &ParamsA) -> Result<SurfaceMesh> {
    if !(1..=3).contains(&i) {
        return Err(Error::InvalidParams(format!("coordinate index {i} not in 1..=3")));
    }
    let (lo, hi) = a.interval(i);
    if !(d > lo && d < hi) {
        return Err(Error::DegenerateSurface(format!(
            "d = {d} is not strictly inside ({lo}, {hi})"
        )));
    }
    let (rows, cols) = resolution;
    if rows < 2 || cols < 2 {
        return Err(Error::InvalidParams("mesh resolution must be at least 2x2".into()));
    }
    let others: Vec<usize> = (1..=3).filter(|&k| k != i).collect();
    let (u0, u1) = a.interval(others[0]);
    let (v0, v1) = a.interval(others[1]);
    let us = lobatto_grid(u0, u1, rows);
    let vs = lobatto_grid(v0, v1, cols);
    let mut sheets = Vec::with_capacity(16);
    for profile in SignProfile::all() {
        let mut points = Vec::with_capacity(rows * cols);
        for &u in &us {
            for &v in &vs {
                let mut s = [0.0; 3];
                s[i - 1] = d;
                s[others[0] - 1] = u;
                s[others[1] - 1] = v;
                points.push(from_cyclide_closed(&CyclideCoords { s }, &profile, a)?);
            }
        }
        sheets.push(Sheet {
            profile,
            rows,
            cols,
            points,
        });
    }
    Ok(SurfaceMesh { index: i, d, sheets })
}

impl SurfaceMesh {
    /// CSV with columns `x,y,z,sheet`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,z,sheet\n");
        for sheet in &self.sheets {
            let id = sheet.profile.id();
            for p in &sheet.points {
                let _ = writeln!(out, "{:.16e},{:.16e},{:.16e},{}", p.x, p.y, p.z, id);
            }
        }
        out
    }

    /// Indexed triangle list with vertices shared across sheet seams.
    pub fn to_indexed_triangles(&self) -> String {
        let quant = 1e-9;
        let mut index: HashMap<(i64, i64, i64), usize> = HashMap::new();
        let mut verts: Vec<Point3> = Vec::new();
        let mut tris: Vec<[usize; 3]> = Vec::new();
        for sheet in &self.sheets {
            let mut ids = Vec::with_capacity(sheet.points.len());
            for p in &sheet.points {
                let key = (
                    (p.x / quant).round() as i64,
                    (p.y / quant).round() as i64,
                    (p.z / quant).round() as i64,
                );
                let id = *index.entry(key).or_insert_with(|| {
                    verts.push(*p);
                    verts.len() - 1
                });
                ids.push(id);
            }
            for r in 0..sheet.rows - 1 {
                for c in 0..sheet.cols - 1 {
                    let v00 = ids[r * sheet.cols + c];
                    let v01 = ids[r * sheet.cols + c + 1];
                    let v10 = ids[(r + 1) * sheet.cols + c];
                    let v11 = ids[(r + 1) * sheet.cols + c + 1];
                    for t in [[v00, v10, v11], [v00, v11, v01]] {
                        if t[0] != t[1] && t[1] != t[2] && t[0] != t[2] {
                            tris.push(t);
                        }
                    }
                }
            }
        }
        let mut out = String::new();
        let _ = writeln!(out, "vertices {}", verts.len());
        for v in &verts {
            let _ = writeln!(out, "{:.16e} {:.16e} {:.16e}", v.x, v.y, v.z);
        }
        let _ = writeln!(out, "triangles {}", tris.len());
        for t in &tris {
            let _ = writeln!(out, "{} {} {}", t[0], t[1], t[2]);
        }
        out
    }
}
