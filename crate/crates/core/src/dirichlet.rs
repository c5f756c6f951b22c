//! Series solutions of the Dirichlet problem on the three region families.
//!
//! Boundary data `e` is turned into `f = (ρ²+1)^{1/2} e`, split into parity
//! components over the symmetry group of the region, and expanded in the
//! products `E_a E_b` of each parity class. Coefficients are computed on the
//! `t`-rectangle of the two spectral coordinates, and independently as a
//! surface integral over the boundary.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::eigensolver::{solve_two_param, EigenOptions, EigenTriple, Parity, ProblemKind};
use crate::elliptic::OmegaTable;
use crate::error::{Error, Result};
use crate::geometry::{
    apply_symmetry, from_cyclide_closed, region_contains, scale_factor_cartesian, CyclideCoords, Point3, RegionSpec,
    Side, SignProfile,
};
use crate::harmonics::{CyclidicHarmonic, PointData};
use crate::quadrature::composite_nodes;

/// A function on `R^3` (typically only evaluated on a boundary surface).
pub trait ScalarField: Sync {
    fn value(&self, p: &Point3) -> f64;
}

impl<F: Fn(&Point3) -> f64 + Sync> ScalarField for F {
    fn value(&self, p: &Point3) -> f64 {
        self(p)
    }
}

/// `1/|p - at|`, harmonic away from `at`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSource {
    pub at: Point3,
}

impl ScalarField for PointSource {
    fn value(&self, p: &Point3) -> f64 {
        1.0 / (p - self.at).norm()
    }
}

/// Symmetry group used for the parity decomposition of a region's data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryGroup {
    /// `σ1, σ2, σ3`.
    Reflections,
    /// `σ0, σ1, σ2, σ3`.
    InversionReflections,
    /// `σ0, σ1, σ2`.
    InversionTwoReflections,
}

impl SymmetryGroup {
    pub fn of_kind(kind: ProblemKind) -> Self {
        match kind {
            ProblemKind::I => SymmetryGroup::Reflections,
            ProblemKind::II => SymmetryGroup::InversionReflections,
            ProblemKind::III => SymmetryGroup::InversionTwoReflections,
        }
    }

    pub fn generators(self) -> &'static [usize] {
        match self {
            SymmetryGroup::Reflections => &[1, 2, 3],
            SymmetryGroup::InversionReflections => &[0, 1, 2, 3],
            SymmetryGroup::InversionTwoReflections => &[0, 1, 2],
        }
    }

    /// All group words as bit masks over the generator indices.
    pub fn words(self) -> Vec<u8> {
        let gens = self.generators();
        (0..1u32 << gens.len())
            .map(|code| {
                gens.iter()
                    .enumerate()
                    .fold(0u8, |m, (k, &j)| if code & (1 << k) != 0 { m | (1 << j) } else { m })
            })
            .collect()
    }
}

/// Applies the symmetries in `word` (bit `j` ↔ `σ_j`).
pub fn apply_word(word: u8, p: &Point3) -> Result<Point3> {
    let mut q = *p;
    for j in 0..4 {
        if word & (1 << j) != 0 {
            q = apply_symmetry(j, &q)?;
        }
    }
    Ok(q)
}

#[inline]
fn character(parity: &Parity, word: u8) -> f64 {
    if (parity.mask() & word).count_ones() % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// Parity component `f_p(x) = 2^{-m} Σ_ε (-1)^{p·ε} f(σ^ε x)`.
pub fn parity_project(f: &dyn ScalarField, parity: &Parity, x: &Point3) -> Result<f64> {
    let words = SymmetryGroup::of_kind(parity.kind()).words();
    let mut s = 0.0;
    for &w in &words {
        s += character(parity, w) * f.value(&apply_word(w, x)?);
    }
    Ok(s / words.len() as f64)
}

/// Sign profile of the boundary sheet reached by `word` from the positive sector.
pub fn sheet_profile(word: u8) -> SignProfile {
    let e = |j: usize| if word & (1 << j) != 0 { -1 } else { 1 };
    SignProfile {
        eps: [e(1), e(2), e(3)],
        side: if word & 1 != 0 { Side::Outside } else { Side::Inside },
    }
}

/// Boundary values, addressed by sheet and spectral `t`-coordinates as well as by point.
pub trait BoundaryData: Sync {
    fn value(&self, sheet: SignProfile, p: &Point3, ta: f64, tb: f64) -> Result<f64>;
}

/// Boundary data given as the trace of a field.
pub struct FieldBoundary<F> {
    pub field: F,
}

impl<F: ScalarField> FieldBoundary<F> {
    pub fn new(field: F) -> Self {
        Self { field }
    }
}

impl<F: ScalarField> BoundaryData for FieldBoundary<F> {
    fn value(&self, _sheet: SignProfile, p: &Point3, _ta: f64, _tb: f64) -> Result<f64> {
        Ok(self.field.value(p))
    }
}

#[derive(Debug, Clone)]
struct GridSheet {
    ta: Vec<f64>,
    tb: Vec<f64>,
    values: Vec<f64>,
}

/// Boundary data sampled on a rectangular `(t_a, t_b)` grid per sheet,
/// interpolated bilinearly.
#[derive(Debug, Clone)]
pub struct GridBoundary {
    sheets: BTreeMap<usize, GridSheet>,
}

impl GridBoundary {
    /// Parses CSV with header `sheet,ta,tb,e`.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows: BTreeMap<usize, Vec<(f64, f64, f64)>> = BTreeMap::new();
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty grid file".into()))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols != ["sheet", "ta", "tb", "e"] {
            return Err(Error::Parse(format!("expected header 'sheet,ta,tb,e', got '{header}'")));
        }
        for (k, line) in lines.enumerate() {
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 4 {
                return Err(Error::Parse(format!("line {}: expected 4 fields", k + 2)));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Parse(format!("line {}: bad number '{s}'", k + 2)));
            let sheet: usize = f[0]
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad sheet id '{}'", k + 2, f[0])))?;
            if sheet >= 16 {
                return Err(Error::Parse(format!("line {}: sheet id {sheet} out of range", k + 2)));
            }
            rows.entry(sheet).or_default().push((num(f[1])?, num(f[2])?, num(f[3])?));
        }
        let mut sheets = BTreeMap::new();
        for (id, r) in rows {
            let mut ta: Vec<f64> = r.iter().map(|x| x.0).collect();
            let mut tb: Vec<f64> = r.iter().map(|x| x.1).collect();
            ta.sort_by(f64::total_cmp);
            ta.dedup();
            tb.sort_by(f64::total_cmp);
            tb.dedup();
            if ta.len() < 2 || tb.len() < 2 || ta.len() * tb.len() != r.len() {
                return Err(Error::Parse(format!("sheet {id}: samples do not form a full rectangular grid")));
            }
            let mut values = vec![f64::NAN; ta.len() * tb.len()];
            for (a, b, v) in r {
                let i = ta.binary_search_by(|x| x.total_cmp(&a)).expect("present");
                let j = tb.binary_search_by(|x| x.total_cmp(&b)).expect("present");
                values[i * tb.len() + j] = v;
            }
            if values.iter().any(|v| v.is_nan()) {
                return Err(Error::Parse(format!("sheet {id}: duplicate grid samples")));
            }
            sheets.insert(id, GridSheet { ta, tb, values });
        }
        Ok(Self { sheets })
    }

    /// Samples `e` on every sheet used by `kind` at the given grid lines.
    pub fn sample(
        region: &RegionSpec,
        table: &OmegaTable,
        ta: &[f64],
        tb: &[f64],
        e: &dyn ScalarField,
    ) -> Result<String> {
        let kind = ProblemKind::from_region(region.kind);
        let [ia, ib] = kind.spectral();
        let mut out = String::from("sheet,ta,tb,e\n");
        for w in SymmetryGroup::of_kind(kind).words() {
            let prof = sheet_profile(w);
            for &a in ta {
                for &b in tb {
                    let p = boundary_point(table, kind, region.d, ia, a, ib, b, &prof)?;
                    out.push_str(&format!("{},{:.16e},{:.16e},{:.16e}\n", prof.id(), a, b, e.value(&p)));
                }
            }
        }
        Ok(out)
    }
}

fn bracket(xs: &[f64], x: f64) -> (usize, f64) {
    let n = xs.len();
    if x <= xs[0] {
        return (0, 0.0);
    }
    if x >= xs[n - 1] {
        return (n - 2, 1.0);
    }
    let i = xs.partition_point(|v| *v <= x) - 1;
    let i = i.min(n - 2);
    (i, (x - xs[i]) / (xs[i + 1] - xs[i]))
}

impl BoundaryData for GridBoundary {
    fn value(&self, sheet: SignProfile, _p: &Point3, ta: f64, tb: f64) -> Result<f64> {
        let g = self
            .sheets
            .get(&sheet.id())
            .ok_or_else(|| Error::InvalidParams(format!("grid has no sheet {}", sheet.id())))?;
        let (i, u) = bracket(&g.ta, ta);
        let (j, v) = bracket(&g.tb, tb);
        let m = g.tb.len();
        let f = |i: usize, j: usize| g.values[i * m + j];
        Ok((1.0 - u) * (1.0 - v) * f(i, j) + u * (1.0 - v) * f(i + 1, j) + (1.0 - u) * v * f(i, j + 1) + u * v * f(i + 1, j + 1))
    }
}

#[allow(clippy::too_many_arguments)]
fn boundary_point(
    table: &OmegaTable,
    kind: ProblemKind,
    level: f64,
    ia: usize,
    ta: f64,
    ib: usize,
    tb: f64,
    prof: &SignProfile,
) -> Result<Point3> {
    let mut s = [0.0; 3];
    s[kind.companion() - 1] = level;
    s[ia - 1] = table.phi_on(ia, ta);
    s[ib - 1] = table.phi_on(ib, tb);
    from_cyclide_closed(&CyclideCoords { s }, prof, table.params())
}

/// Quadrature resolution and tolerances for the Dirichlet solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirichletOptions {
    pub eigen: EigenOptions,
    /// Composite Gauss panels and nodes per panel on each spectral interval.
    pub panels: usize,
    pub order: usize,
    /// Resolution of the surface-integral cross-check; `0` panels disables it.
    pub surface_panels: usize,
    pub surface_order: usize,
    /// Terms with `|c / E_c(d)|·max|G|` below this are dropped.
    pub drop_tol: f64,
    /// Denominators below this fraction of `max|E_c|` are reported, not divided by.
    pub denominator_tol: f64,
}

impl Default for DirichletOptions {
    fn default() -> Self {
        Self {
            eigen: EigenOptions::default(),
            panels: 8,
            order: 16,
            surface_panels: 0,
            surface_order: 12,
            drop_tol: 1e-12,
            denominator_tol: 1e-12,
        }
    }
}

/// The rectangle of spectral `t`-coordinates with Gauss weights and the
/// parity components `g_p` of the boundary data at the nodes.
#[derive(Debug, Clone)]
pub struct BoundarySamples {
    pub kind: ProblemKind,
    pub ta: Vec<f64>,
    pub wa: Vec<f64>,
    pub tb: Vec<f64>,
    pub wb: Vec<f64>,
    phi_a: Vec<f64>,
    phi_b: Vec<f64>,
    /// Row-major `g_p[i * tb.len() + j]` keyed by parity mask.
    components: BTreeMap<u8, Vec<f64>>,
    /// `2^{-m} Σ_sheets ∫∫ (φ_b - φ_a) f²`.
    pub norm_sq: f64,
}

impl BoundarySamples {
    pub fn new(region: &RegionSpec, data: &dyn BoundaryData, table: &OmegaTable, panels: usize, order: usize) -> Result<Self> {
        Self::at_level(region, region.d, data, table, panels, order)
    }

    fn at_level(
        region: &RegionSpec,
        level: f64,
        data: &dyn BoundaryData,
        table: &OmegaTable,
        panels: usize,
        order: usize,
    ) -> Result<Self> {
        let kind = ProblemKind::from_region(region.kind);
        let [ia, ib] = kind.spectral();
        let (la, ha) = table.t_interval(ia);
        let (lb, hb) = table.t_interval(ib);
        let (ta, wa) = composite_nodes(la, ha, panels, order);
        let (tb, wb) = composite_nodes(lb, hb, panels, order);
        let phi_a: Vec<f64> = ta.iter().map(|&t| table.phi_on(ia, t)).collect();
        let phi_b: Vec<f64> = tb.iter().map(|&t| table.phi_on(ib, t)).collect();
        let words = SymmetryGroup::of_kind(kind).words();
        let nb = tb.len();
        // f on every sheet at every node
        let per_sheet: Vec<Vec<f64>> = words
            .par_iter()
            .map(|&w| {
                let prof = sheet_profile(w);
                let mut v = Vec::with_capacity(ta.len() * nb);
                for &a in &ta {
                    for &b in &tb {
                        let p = boundary_point(table, kind, level, ia, a, ib, b, &prof)?;
                        let e = data.value(prof, &p, a, b)?;
                        v.push((p.norm_squared() + 1.0).sqrt() * e);
                    }
                }
                Ok(v)
            })
            .collect::<Result<_>>()?;
        if per_sheet.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("boundary data is not finite on the boundary".into()));
        }
        let scale = 1.0 / words.len() as f64;
        let mut components = BTreeMap::new();
        for parity in Parity::all(kind) {
            let mut g = vec![0.0; ta.len() * nb];
            for (k, &w) in words.iter().enumerate() {
                let c = character(&parity, w) * scale;
                for (gi, fi) in g.iter_mut().zip(&per_sheet[k]) {
                    *gi += c * fi;
                }
            }
            components.insert(parity.mask(), g);
        }
        let mut norm_sq = 0.0;
        for f in &per_sheet {
            for i in 0..ta.len() {
                for j in 0..nb {
                    norm_sq += wa[i] * wb[j] * (phi_b[j] - phi_a[i]) * f[i * nb + j].powi(2);
                }
            }
        }
        norm_sq *= scale;
        Ok(Self {
            kind,
            ta,
            wa,
            tb,
            wb,
            phi_a,
            phi_b,
            components,
            norm_sq,
        })
    }

    /// `g_p` at node `(i, j)`.
    pub fn component(&self, parity: &Parity, i: usize, j: usize) -> f64 {
        self.components[&parity.mask()][i * self.tb.len() + j]
    }

    /// Weighted norm `Σ_p ‖g_p‖²` restricted to one parity class.
    pub fn component_norm_sq(&self, parity: &Parity) -> f64 {
        let g = &self.components[&parity.mask()];
        let nb = self.tb.len();
        let mut s = 0.0;
        for i in 0..self.ta.len() {
            for j in 0..nb {
                s += self.wa[i] * self.wb[j] * (self.phi_b[j] - self.phi_a[i]) * g[i * nb + j].powi(2);
            }
        }
        s
    }

    /// `∫∫ (φ_b - φ_a) g_p u_a u_b` for one triple.
    pub fn coefficient(&self, triple: &EigenTriple) -> f64 {
        let [ia, ib] = triple.kind.spectral();
        let g = &self.components[&triple.parity.mask()];
        let ua: Vec<f64> = self.ta.iter().map(|&t| triple.u(ia, t)).collect();
        let ub: Vec<f64> = self.tb.iter().map(|&t| triple.u(ib, t)).collect();
        let nb = self.tb.len();
        let mut c = 0.0;
        for i in 0..self.ta.len() {
            let wi = self.wa[i] * ua[i];
            let row = &g[i * nb..(i + 1) * nb];
            let mut acc = 0.0;
            for j in 0..nb {
                acc += self.wb[j] * ub[j] * (self.phi_b[j] - self.phi_a[i]) * row[j];
            }
            c += wi * acc;
        }
        c
    }
}

/// Weighted coefficient of a function `g(s_a, s_b)` of the spectral coordinates.
pub fn fourier_coeff<G: Fn(f64, f64) -> f64>(g: G, triple: &EigenTriple) -> f64 {
    let tab = triple.table();
    let [ia, ib] = triple.kind.spectral();
    let nz = triple.n.0.max(triple.n.1);
    let (la, ha) = tab.t_interval(ia);
    let (lb, hb) = tab.t_interval(ib);
    let (ta, wa) = composite_nodes(la, ha, 8 + nz, 20);
    let (tb, wb) = composite_nodes(lb, hb, 8 + nz, 20);
    let mut c = 0.0;
    for (i, &a) in ta.iter().enumerate() {
        let sa = tab.phi_on(ia, a);
        let ua = triple.u(ia, a);
        let mut acc = 0.0;
        for (j, &b) in tb.iter().enumerate() {
            let sb = tab.phi_on(ib, b);
            acc += wb[j] * (sb - sa) * g(sa, sb) * triple.u(ib, b);
        }
        c += wa[i] * ua * acc;
    }
    c
}

/// Surface points of the boundary with their quadrature data, shared by all
/// triples of one region.
#[derive(Debug, Clone)]
pub struct SurfaceSamples {
    kind: ProblemKind,
    d: f64,
    /// Point data and `weight · e · (h_a h_b / h_c) ω_a ω_b`.
    points: Vec<(PointData, f64)>,
}

impl SurfaceSamples {
    pub fn new(region: &RegionSpec, data: &dyn BoundaryData, table: &OmegaTable, panels: usize, order: usize) -> Result<Self> {
        let kind = ProblemKind::from_region(region.kind);
        let [ia, ib] = kind.spectral();
        let c = kind.companion();
        let a = table.params();
        let (la, ha) = table.t_interval(ia);
        let (lb, hb) = table.t_interval(ib);
        let (ta, wa) = composite_nodes(la, ha, panels, order);
        let (tb, wb) = composite_nodes(lb, hb, panels, order);
        let words = SymmetryGroup::of_kind(kind).words();
        let chunks: Vec<Vec<(PointData, f64)>> = words
            .par_iter()
            .map(|&w| {
                let prof = sheet_profile(w);
                let mut out = Vec::with_capacity(ta.len() * tb.len());
                for (i, &x) in ta.iter().enumerate() {
                    for (j, &y) in tb.iter().enumerate() {
                        let p = boundary_point(table, kind, region.d, ia, x, ib, y, &prof)?;
                        let pd = PointData::new(&p, a);
                        let e = data.value(prof, &p, x, y)?;
                        let s = pd.s.s;
                        let hc = scale_factor_cartesian(&p, region.d, a);
                        let hfa = scale_factor_cartesian(&p, s[ia - 1], a);
                        let hfb = scale_factor_cartesian(&p, s[ib - 1], a);
                        let oa = table.omega_weight(s[ia - 1].clamp(a.get(ia - 1), a.get(ia)))?;
                        let ob = table.omega_weight(s[ib - 1].clamp(a.get(ib - 1), a.get(ib)))?;
                        let wgt = wa[i] * wb[j] * e * hfa * hfb * oa * ob / hc;
                        out.push((pd, wgt));
                    }
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        let _ = c;
        Ok(Self {
            kind,
            d: region.d,
            points: chunks.into_iter().flatten().collect(),
        })
    }

    /// `1/(K ω(d) E_c(d)) ∫ (e/h_c) G dS` with `K = 2` for three generators, `4` for four.
    pub fn coefficient(&self, triple: &EigenTriple) -> Result<f64> {
        if triple.kind != self.kind {
            return Err(Error::InvalidParams("triple and region kinds differ".into()));
        }
        let h = CyclidicHarmonic::new(triple.clone());
        let sum: f64 = self.points.iter().map(|(pd, w)| w * h.eval_prepared(pd)).sum();
        let ec = triple.companion_value(self.d)?;
        let omega_d = triple.table().omega_weight(self.d)?;
        let k = if SymmetryGroup::of_kind(self.kind).generators().len() == 4 { 4.0 } else { 2.0 };
        Ok(sum / (k * omega_d * ec))
    }
}

/// Surface-integral form of a single coefficient.
pub fn fourier_coeff_surface(data: &dyn BoundaryData, triple: &EigenTriple, region: &RegionSpec) -> Result<f64> {
    let nz = triple.n.0.max(triple.n.1);
    SurfaceSamples::new(region, data, triple.table(), 6 + nz, 12)?.coefficient(triple)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermStatus {
    Active,
    /// Contribution below the drop tolerance.
    Dropped,
    /// Companion value at `d` too close to zero to divide by.
    IllConditioned,
}

#[derive(Debug, Clone)]
pub struct SeriesTerm {
    pub n: (usize, usize),
    pub parity: Parity,
    pub coeff: f64,
    pub coeff_surface: Option<f64>,
    /// `E_c(d)`.
    pub denominator: f64,
    pub status: TermStatus,
    pub harmonic: CyclidicHarmonic,
}

/// A truncated series `Σ c_{n,p} / E_c(d) · G_{n,p}`.
#[derive(Debug, Clone)]
pub struct SeriesSolution {
    pub region: RegionSpec,
    pub kind: ProblemKind,
    pub truncation: usize,
    pub terms: Vec<SeriesTerm>,
    /// `‖f‖²` of the boundary data in the weighted space (all parities).
    pub data_norm_sq: f64,
    table: Arc<OmegaTable>,
}

impl SeriesSolution {
    pub fn table(&self) -> &Arc<OmegaTable> {
        &self.table
    }

    /// Terms with `n_a, n_b < n`, keeping the computed coefficients.
    pub fn truncated(&self, n: usize) -> Self {
        let mut out = self.clone();
        out.terms.retain(|t| t.n.0 < n && t.n.1 < n);
        out.truncation = n.min(self.truncation);
        out
    }

    pub fn coefficient(&self, n: (usize, usize), parity: &Parity) -> Option<f64> {
        self.terms.iter().find(|t| t.n == n && t.parity == *parity).map(|t| t.coeff)
    }

    /// Series value without the region check.
    pub fn eval_unchecked(&self, p: &Point3) -> f64 {
        let pd = PointData::new(p, self.table.params());
        let inv = 1.0 / (pd.rho2 + 1.0).sqrt();
        let mut s = 0.0;
        for t in self.terms.iter().filter(|t| t.status == TermStatus::Active) {
            s += t.coeff / t.denominator * t.harmonic.w_prepared(&pd);
        }
        s * inv
    }

    pub fn eval(&self, p: &Point3) -> Result<f64> {
        if !region_contains(&self.region, p, self.table.params()) {
            return Err(Error::domain(f64::NAN, format!("interior of the {:?} region", self.region.kind)));
        }
        Ok(self.eval_unchecked(p))
    }

    /// `Σ c²` over all computed coefficients.
    pub fn coefficient_energy(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff * t.coeff).sum()
    }

    /// Share of `‖f‖²` captured by the coefficients.
    pub fn parseval_ratio(&self) -> f64 {
        if self.data_norm_sq == 0.0 {
            1.0
        } else {
            self.coefficient_energy() / self.data_norm_sq
        }
    }

    pub fn ill_conditioned(&self) -> Vec<&SeriesTerm> {
        self.terms.iter().filter(|t| t.status == TermStatus::IllConditioned).collect()
    }
}

/// Solves for all `n_a, n_b < truncation` and every parity of the region.
pub fn solve_dirichlet(
    region: &RegionSpec,
    data: &dyn BoundaryData,
    truncation: usize,
    table: &Arc<OmegaTable>,
    opts: &DirichletOptions,
) -> Result<SeriesSolution> {
    if truncation == 0 {
        return Err(Error::InvalidParams("truncation must be at least 1".into()));
    }
    let a = table.params();
    RegionSpec::new(region.kind, region.d, a)?;
    let kind = ProblemKind::from_region(region.kind);
    let samples = BoundarySamples::new(region, data, table, opts.panels.max(truncation + 2), opts.order)?;
    let surface = if opts.surface_panels > 0 {
        Some(SurfaceSamples::new(region, data, table, opts.surface_panels.max(truncation + 2), opts.surface_order)?)
    } else {
        None
    };
    let mut jobs = Vec::new();
    for parity in Parity::all(kind) {
        for na in 0..truncation {
            for nb in 0..truncation {
                jobs.push(((na, nb), parity));
            }
        }
    }
    let results: Vec<(((usize, usize), Parity), Result<SeriesTerm>)> = jobs
        .into_par_iter()
        .map(|(n, parity)| {
            let r = (|| {
                let triple = solve_two_param(kind, n, parity, table, &opts.eigen)?;
                let coeff = samples.coefficient(&triple);
                let coeff_surface = match &surface {
                    Some(s) => Some(s.coefficient(&triple)?),
                    None => None,
                };
                let denominator = triple.companion_value(region.d)?;
                let cmax = triple.companion_max();
                let [ia, ib] = kind.spectral();
                let gmax = cmax * triple.series(ia).max_abs_sampled(200) * triple.series(ib).max_abs_sampled(200);
                let status = if denominator.abs() < opts.denominator_tol * cmax {
                    TermStatus::IllConditioned
                } else if (coeff / denominator).abs() * gmax < opts.drop_tol {
                    TermStatus::Dropped
                } else {
                    TermStatus::Active
                };
                Ok(SeriesTerm {
                    n,
                    parity,
                    coeff,
                    coeff_surface,
                    denominator,
                    status,
                    harmonic: CyclidicHarmonic::new(triple),
                })
            })();
            ((n, parity), r)
        })
        .collect();
    let mut terms = Vec::with_capacity(results.len());
    let mut failed = Vec::new();
    for ((n, parity), r) in results {
        match r {
            Ok(t) => terms.push(t),
            Err(e) => failed.push(format!("n=({},{}) p={parity}: {e}", n.0, n.1)),
        }
    }
    if !failed.is_empty() {
        return Err(Error::PartialResult { failed });
    }
    terms.sort_by_key(|t| (t.n.0 + t.n.1, t.n.0, t.parity.mask()));
    Ok(SeriesSolution {
        region: *region,
        kind,
        truncation,
        terms,
        data_norm_sq: samples.norm_sq,
        table: Arc::clone(table),
    })
}

/// Weighted L² distance between `f` on the boundary and `(ρ²+1)^{1/2} u` on
/// the level surface `s_c = level`, matching points by their spectral coordinates.
pub fn boundary_l2_error(sol: &SeriesSolution, data: &dyn BoundaryData, level: f64, resolution: (usize, usize)) -> Result<f64> {
    let tab = sol.table();
    let a = tab.params();
    let kind = sol.kind;
    let c = kind.companion();
    let (lo, hi) = a.interval(c);
    let d = sol.region.d;
    let inside = match kind {
        ProblemKind::I => level > d && level < hi,
        _ => level < d && level > lo,
    };
    if !inside {
        return Err(Error::domain(level, "strictly between the far end of the coordinate interval and d"));
    }
    let [ia, ib] = kind.spectral();
    let (la, ha) = tab.t_interval(ia);
    let (lb, hb) = tab.t_interval(ib);
    let (ta, wa) = composite_nodes(la, ha, resolution.0, 8);
    let (tb, wb) = composite_nodes(lb, hb, resolution.1, 8);
    let words = SymmetryGroup::of_kind(kind).words();
    let total: f64 = words
        .par_iter()
        .map(|&w| {
            let prof = sheet_profile(w);
            let mut s = 0.0;
            for (i, &x) in ta.iter().enumerate() {
                let pa = tab.phi_on(ia, x);
                for (j, &y) in tb.iter().enumerate() {
                    let pb = tab.phi_on(ib, y);
                    let pd = boundary_point(tab, kind, d, ia, x, ib, y, &prof)?;
                    let fd = (pd.norm_squared() + 1.0).sqrt() * data.value(prof, &pd, x, y)?;
                    let pl = boundary_point(tab, kind, level, ia, x, ib, y, &prof)?;
                    let ul = (pl.norm_squared() + 1.0).sqrt() * sol.eval_unchecked(&pl);
                    s += wa[i] * wb[j] * (pb - pa) * (fd - ul).powi(2);
                }
            }
            Ok(s)
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .sum();
    Ok((total / words.len() as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ParamsA, RegionKind};

    fn table() -> Arc<OmegaTable> {
        Arc::new(OmegaTable::new(ParamsA::default()).unwrap())
    }

    #[test]
    fn projections_partition_the_function() {
        let f = PointSource {
            at: Point3::new(0.3, -1.2, 2.0),
        };
        let x = Point3::new(0.4, 0.2, -0.7);
        for kind in ProblemKind::ALL {
            let total: f64 = Parity::all(kind).iter().map(|p| parity_project(&f, p, &x).unwrap()).sum();
            assert!((total - f.value(&x)).abs() < 1e-12);
        }
        let one = |_: &Point3| 1.0;
        for p in Parity::all(ProblemKind::I) {
            let v = parity_project(&one, &p, &x).unwrap();
            assert_eq!(v, if p.mask() == 0 { 1.0 } else { 0.0 });
        }
        let xf = |q: &Point3| q.x;
        for p in Parity::all(ProblemKind::I) {
            let v = parity_project(&xf, &p, &x).unwrap();
            let want = if p.bits() == [1, 0, 0] { x.x } else { 0.0 };
            assert!((v - want).abs() < 1e-15);
        }
    }

    #[test]
    fn words_cover_the_group() {
        assert_eq!(SymmetryGroup::Reflections.words().len(), 8);
        assert!(SymmetryGroup::InversionTwoReflections.words().iter().all(|w| w & 8 == 0));
        assert_eq!(SymmetryGroup::InversionReflections.words().len(), 16);
    }

    #[test]
    fn zero_data_gives_zero_series() {
        let tab = table();
        let region = RegionSpec::new(RegionKind::First, 0.5, tab.params()).unwrap();
        let zero = FieldBoundary::new(|_: &Point3| 0.0);
        let sol = solve_dirichlet(&region, &zero, 2, &tab, &DirichletOptions::default()).unwrap();
        assert!(sol.terms.iter().all(|t| t.coeff == 0.0));
        assert_eq!(sol.eval(&Point3::new(0.1, 0.1, 0.1)).unwrap(), 0.0);
        let err = boundary_l2_error(&sol, &zero, 0.7, (4, 4)).unwrap();
        assert_eq!(err, 0.0);
    }

    #[test]
    fn own_trace_gives_kronecker_coefficients() {
        let tab = table();
        let par = Parity::parse(ProblemKind::I, "010").unwrap();
        let triple = solve_two_param(ProblemKind::I, (1, 0), par, &tab, &EigenOptions::default()).unwrap();
        let own = fourier_coeff(
            |sa, sb| triple.eval_e(2, sa).unwrap() * triple.eval_e(3, sb).unwrap(),
            &triple,
        );
        assert!((own - 1.0).abs() < 1e-7);
        let other = solve_two_param(ProblemKind::I, (0, 1), par, &tab, &EigenOptions::default()).unwrap();
        let cross = fourier_coeff(
            |sa, sb| triple.eval_e(2, sa).unwrap() * triple.eval_e(3, sb).unwrap(),
            &other,
        );
        assert!(cross.abs() < 1e-7);
        assert_eq!(fourier_coeff(|_, _| 0.0, &triple), 0.0);
    }

    #[test]
    fn surface_route_matches_rectangle() {
        let tab = table();
        let region = RegionSpec::new(RegionKind::First, 0.5, tab.params()).unwrap();
        let data = FieldBoundary::new(PointSource {
            at: Point3::new(5.0, 5.0, 5.0),
        });
        let par = Parity::parse(ProblemKind::I, "100").unwrap();
        let triple = solve_two_param(ProblemKind::I, (1, 1), par, &tab, &EigenOptions::default()).unwrap();
        let rect = BoundarySamples::new(&region, &data, &tab, 8, 16).unwrap().coefficient(&triple);
        let surf = fourier_coeff_surface(&data, &triple, &region).unwrap();
        assert!((rect - surf).abs() < 1e-8, "{rect} {surf}");
        assert!(rect.abs() > 1e-6);
    }

    #[test]
    fn grid_boundary_round_trip() {
        let tab = table();
        let region = RegionSpec::new(RegionKind::Third, 2.5, tab.params()).unwrap();
        let f = |p: &Point3| p.x + 2.0 * p.z;
        let (la, ha) = tab.t_interval(1);
        let (lb, hb) = tab.t_interval(2);
        let ta: Vec<f64> = (0..=40).map(|k| la + (ha - la) * k as f64 / 40.0).collect();
        let tb: Vec<f64> = (0..=40).map(|k| lb + (hb - lb) * k as f64 / 40.0).collect();
        let csv = GridBoundary::sample(&region, &tab, &ta, &tb, &f).unwrap();
        let grid = GridBoundary::from_csv(&csv).unwrap();
        let prof = sheet_profile(0b011);
        let (x, y) = (la + 0.37 * (ha - la), lb + 0.61 * (hb - lb));
        let p = boundary_point(&tab, ProblemKind::III, 2.5, 1, x, 2, y, &prof).unwrap();
        let v = grid.value(prof, &p, x, y).unwrap();
        assert!((v - f(&p)).abs() < 1e-2);
        assert!(GridBoundary::from_csv("sheet,ta,tb\n").is_err());
    }
}
