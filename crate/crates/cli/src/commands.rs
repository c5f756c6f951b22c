use std::sync::Arc;

use cyclide::dirichlet::{
    boundary_l2_error, sheet_profile, solve_dirichlet, BoundaryData, DirichletOptions, FieldBoundary, GridBoundary,
    PointSource, ScalarField, SeriesSolution, SymmetryGroup, TermStatus,
};
use cyclide::eigensolver::{solve_two_param, EigenOptions, EigenTriple, Parity, ProblemKind};
use cyclide::elliptic::OmegaTable;
use cyclide::geometry::{
    from_cyclide, from_cyclide_closed, region_contains, surface_mesh, to_cyclide, CyclideCoords, Point3,
    RegionKind, RegionSpec, SignProfile,
};
use cyclide::harmonics::{richardson_pair, CyclidicHarmonic};
use cyclide::sturm::OdeTolerances;
use cyclide::Error;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::args::{
    CoordsCmd, EigenArgs, HarmonicCmd, HarmonicSpec, KindArg, OmegaArgs, RegionArg, SolveArgs, SurfaceArgs,
    VerifyArgs,
};
use crate::config::{parse_fixed, parse_pair, Config};
use crate::error::CliError;
use crate::table::{emit_table, json_f64, parse_csv, Format, Table};

pub type Output = Result<String, CliError>;

fn json_out(v: Value) -> String {
    let mut s = v.to_string();
    s.push('\n');
    s
}

fn floats(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| json_f64(*x)).collect())
}

fn kind_of(k: KindArg) -> ProblemKind {
    match k {
        KindArg::I => ProblemKind::I,
        KindArg::II => ProblemKind::II,
        KindArg::III => ProblemKind::III,
    }
}

fn parity_of(kind: ProblemKind, bits: Option<&str>) -> Result<Parity, CliError> {
    Ok(match bits {
        Some(b) => Parity::parse(kind, b)?,
        None => Parity::zero(kind),
    })
}

fn eigen_options(cfg: &Config) -> EigenOptions {
    EigenOptions {
        ode: cfg.ode,
        polish: OdeTolerances::TIGHT.min(cfg.ode),
        ..Default::default()
    }
}

fn harmonic(spec: &HarmonicSpec, cfg: &Config) -> Result<CyclidicHarmonic, CliError> {
    let kind = kind_of(spec.kind);
    let n = parse_pair(&spec.n, "n")?;
    let parity = parity_of(kind, spec.parity.as_deref())?;
    let table = Arc::new(cfg.table()?);
    let triple = solve_two_param(kind, n, parity, &table, &eigen_options(cfg))?;
    Ok(CyclidicHarmonic::new(triple))
}

fn read_points(path: &std::path::Path) -> Result<Vec<Point3>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let (header, rows) = parse_csv(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::usage(format!("{}: missing column '{name}'", path.display())))
    };
    let (ix, iy, iz) = (col("x")?, col("y")?, col("z")?);
    Ok(rows.iter().map(|r| Point3::new(r[ix], r[iy], r[iz])).collect())
}

pub fn coords(cmd: &CoordsCmd, cfg: &Config) -> Output {
    match cmd {
        CoordsCmd::To { point } => {
            let [x, y, z] = parse_fixed::<3>(point, "point")?;
            let c = to_cyclide(&Point3::new(x, y, z), &cfg.a);
            Ok(json_out(json!({ "s": floats(&c.s) })))
        }
        CoordsCmd::From { s, sheet } => {
            if *sheet >= 16 {
                return Err(CliError::usage(format!("--sheet must be in 0..16, got {sheet}")));
            }
            let s = parse_fixed::<3>(s, "s")?;
            let p = from_cyclide_closed(&CyclideCoords { s }, &SignProfile::from_id(*sheet), &cfg.a)?;
            Ok(json_out(json!({ "p": floats(&[p.x, p.y, p.z]) })))
        }
    }
}

pub fn omega(args: &OmegaArgs, cfg: &Config) -> Output {
    let table = cfg.table()?;
    match (args.at, args.inverse) {
        (Some(s), _) => Ok(json_out(json!({ "Omega": json_f64(table.omega(s)?) }))),
        (None, Some(t)) => Ok(json_out(json!({ "phi": json_f64(table.phi(t)?) }))),
        (None, None) => Err(CliError::usage("one of --at or --inverse is required")),
    }
}

fn triple_json(t: &EigenTriple) -> Value {
    json!({
        "kind": t.kind.to_string(),
        "n": [t.n.0, t.n.1],
        "parity": t.parity.to_string(),
        "lambda1": json_f64(t.lambda.lambda1),
        "lambda2": json_f64(t.lambda.lambda2),
        "zero_counts": t.zero_counts,
        "norm_check": json_f64(t.norm_check()),
        "residuals": floats(&t.bc_residuals),
        "iterations": t.iterations,
    })
}

pub fn eigen(args: &EigenArgs, cfg: &Config) -> Output {
    let kind = kind_of(args.kind);
    let parity = parity_of(kind, args.parity.as_deref())?;
    let mut opts = eigen_options(cfg);
    if let Some(tol) = args.tol {
        opts.polish = OdeTolerances::new(tol, tol * 1e-2)?;
    }
    let table = Arc::new(cfg.table()?);
    if let Some(n) = &args.n {
        let n = parse_pair(n, "n")?;
        let t = solve_two_param(kind, n, parity, &table, &opts)?;
        let text = match cfg.format_or(Format::Json) {
            Format::Json => json_out(triple_json(&t)),
            Format::Csv => emit_table(&eigen_table(std::slice::from_ref(&t)), Format::Csv),
        };
        return Ok(text);
    }
    let (na, nb) = parse_pair(args.batch.as_deref().expect("clap requires --n or --batch"), "batch")?;
    let jobs: Vec<(usize, usize)> = (0..=na).flat_map(|i| (0..=nb).map(move |j| (i, j))).collect();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&n| solve_two_param(kind, n, parity, &table, &opts))
        .collect();
    let mut triples = Vec::with_capacity(jobs.len());
    let mut failed = Vec::new();
    for (n, r) in jobs.iter().zip(results) {
        match r {
            Ok(t) => triples.push(t),
            Err(e) => failed.push(format!("({},{}): {e}", n.0, n.1)),
        }
    }
    if !failed.is_empty() {
        return Err(Error::PartialResult { failed }.into());
    }
    Ok(emit_table(&eigen_table(&triples), cfg.format_or(Format::Csv)))
}

fn eigen_table(triples: &[EigenTriple]) -> Table {
    let mut t = Table::new(vec![
        "n_a", "n_b", "parity", "lambda1", "lambda2", "zeros_a", "zeros_b", "norm_check", "residual_a", "residual_b",
    ]);
    for e in triples {
        t.push(vec![
            e.n.0.into(),
            e.n.1.into(),
            e.parity.to_string().into(),
            e.lambda.lambda1.into(),
            e.lambda.lambda2.into(),
            e.zero_counts[0].into(),
            e.zero_counts[1].into(),
            e.norm_check().into(),
            e.bc_residuals[0].into(),
            e.bc_residuals[1].into(),
        ]);
    }
    t
}

pub fn harmonic_cmd(cmd: &HarmonicCmd, cfg: &Config) -> Output {
    match cmd {
        HarmonicCmd::Eval { spec, points } => {
            let pts = read_points(points)?;
            let h = harmonic(spec, cfg)?;
            let mut t = Table::new(vec!["x", "y", "z", "G", "flagged"]);
            for p in &pts {
                let (g, flagged) = h.eval_flagged(p)?;
                t.push(vec![p.x.into(), p.y.into(), p.z.into(), g.into(), flagged.into()]);
            }
            Ok(emit_table(&t, cfg.format_or(Format::Csv)))
        }
    }
}

pub fn surface(args: &SurfaceArgs, cfg: &Config) -> Output {
    let res = parse_pair(&args.res, "res")?;
    let mesh = surface_mesh(args.index, args.d, res, &cfg.a)?;
    if args.triangles {
        return Ok(mesh.to_indexed_triangles());
    }
    let mut t = Table::new(vec!["x", "y", "z", "sheet"]);
    for sheet in &mesh.sheets {
        for p in &sheet.points {
            t.push(vec![p.x.into(), p.y.into(), p.z.into(), sheet.profile.id().into()]);
        }
    }
    Ok(emit_table(&t, cfg.format_or(Format::Csv)))
}

fn region_kind(r: RegionArg) -> RegionKind {
    match r {
        RegionArg::First => RegionKind::First,
        RegionArg::Second => RegionKind::Second,
        RegionArg::Third => RegionKind::Third,
    }
}

enum Boundary {
    Source(PointSource),
    Grid(GridBoundary),
}

fn parse_boundary(args: &SolveArgs) -> Result<Boundary, CliError> {
    if args.boundary == "builtin:point-source" {
        let [x, y, z] = parse_fixed::<3>(&args.at, "at")?;
        Ok(Boundary::Source(PointSource {
            at: Point3::new(x, y, z),
        }))
    } else if let Some(path) = args.boundary.strip_prefix("grid:") {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {path}: {e}")))?;
        Ok(Boundary::Grid(GridBoundary::from_csv(&text)?))
    } else {
        Err(CliError::usage(format!(
            "--boundary must be builtin:point-source or grid:FILE, got '{}'",
            args.boundary
        )))
    }
}

/// Five levels of the companion coordinate moving from the interior towards `d`.
pub fn approach_levels(region: &RegionSpec, table: &OmegaTable) -> [f64; 5] {
    let c = ProblemKind::from_region(region.kind).companion();
    let (lo, hi) = table.params().interval(c);
    let far = if region.kind == RegionKind::First { hi } else { lo };
    [0.5, 0.6, 0.7, 0.8, 0.9].map(|f| far + f * (region.d - far))
}

/// Points halfway between `d` and the far end of the companion interval on every sheet.
fn interior_points(region: &RegionSpec, table: &OmegaTable) -> Vec<Point3> {
    let kind = ProblemKind::from_region(region.kind);
    let a = table.params();
    let [ia, ib] = kind.spectral();
    let c = kind.companion();
    let level = approach_levels(region, table)[0];
    let (la, ha) = a.interval(ia);
    let (lb, hb) = a.interval(ib);
    let mut out = Vec::new();
    for w in SymmetryGroup::of_kind(kind).words() {
        let prof = sheet_profile(w);
        for k in 1..4 {
            for m in 1..4 {
                let mut s = [0.0; 3];
                s[c - 1] = level;
                s[ia - 1] = la + (ha - la) * k as f64 / 4.0;
                s[ib - 1] = lb + (hb - lb) * m as f64 / 4.0;
                if let Ok(p) = from_cyclide(&CyclideCoords { s }, &prof, a) {
                    if region_contains(region, &p, a) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

fn term_json(t: &cyclide::dirichlet::SeriesTerm) -> Value {
    let status = match t.status {
        TermStatus::Active => "active",
        TermStatus::Dropped => "dropped",
        TermStatus::IllConditioned => "ill_conditioned",
    };
    json!({
        "n": [t.n.0, t.n.1],
        "parity": t.parity.to_string(),
        "coeff": json_f64(t.coeff),
        "coeff_surface": t.coeff_surface.map(json_f64),
        "denominator": json_f64(t.denominator),
        "status": status,
    })
}

fn field_csv(sol: &SeriesSolution, res: usize) -> String {
    let a = sol.table().params();
    let (lo, hi, zlo) = match sol.region.kind {
        RegionKind::First => (-1.0, 1.0, -1.0),
        RegionKind::Second => (-3.0, 3.0, -3.0),
        RegionKind::Third => (-3.0, 3.0, 0.0),
    };
    let res = res.max(2);
    let grid = |lo: f64, hi: f64, k: usize| lo + (hi - lo) * k as f64 / (res - 1) as f64;
    let mut t = Table::new(vec!["x", "y", "z", "u"]);
    for i in 0..res {
        for j in 0..res {
            for k in 0..res {
                let p = Point3::new(grid(lo, hi, i), grid(lo, hi, j), grid(zlo, hi, k));
                if region_contains(&sol.region, &p, a) {
                    t.push(vec![p.x.into(), p.y.into(), p.z.into(), sol.eval_unchecked(&p).into()]);
                }
            }
        }
    }
    emit_table(&t, Format::Csv)
}

pub fn solve(args: &SolveArgs, cfg: &Config) -> Output {
    let region = RegionSpec::new(region_kind(args.region), args.d, &cfg.a)?;
    let boundary = parse_boundary(args)?;
    let table = Arc::new(cfg.table()?);
    let opts = DirichletOptions {
        eigen: eigen_options(cfg),
        surface_panels: if args.surface_check { 10 } else { 0 },
        ..Default::default()
    };
    let source_field;
    let data: &dyn BoundaryData = match &boundary {
        Boundary::Source(src) => {
            source_field = FieldBoundary::new(*src);
            &source_field
        }
        Boundary::Grid(g) => g,
    };
    let sol = solve_dirichlet(&region, data, args.truncation, &table, &opts)?;
    let mut manifest = json!({
        "region": format!("{:?}", region.kind).to_lowercase(),
        "d": json_f64(region.d),
        "a": floats(&cfg.a.as_array()),
        "kind": sol.kind.to_string(),
        "N": sol.truncation,
        "boundary": args.boundary,
        "terms": sol.terms.iter().map(term_json).collect::<Vec<_>>(),
        "diagnostics": {
            "data_norm_sq": json_f64(sol.data_norm_sq),
            "coefficient_energy": json_f64(sol.coefficient_energy()),
            "parseval_ratio": json_f64(sol.parseval_ratio()),
            "ill_conditioned": sol.ill_conditioned().iter().map(|t| json!({
                "n": [t.n.0, t.n.1],
                "parity": t.parity.to_string(),
                "denominator": json_f64(t.denominator),
            })).collect::<Vec<_>>(),
            "max_surface_gap": sol.terms.iter()
                .filter_map(|t| t.coeff_surface.map(|s| (s - t.coeff).abs()))
                .reduce(f64::max)
                .map(json_f64),
        },
    });
    if let Boundary::Source(src) = &boundary {
        manifest["at"] = floats(&[src.at.x, src.at.y, src.at.z]);
    }
    if args.check {
        let levels = approach_levels(&region, &table);
        let errors = levels
            .iter()
            .map(|&l| Ok(json!({ "level": json_f64(l), "error": json_f64(boundary_l2_error(&sol, data, l, (8, 8))?) })))
            .collect::<Result<Vec<_>, Error>>()?;
        manifest["check"] = json!({ "boundary_l2": errors });
        if let Boundary::Source(src) = &boundary {
            let pts = interior_points(&region, &table);
            let worst = pts
                .iter()
                .map(|p| (sol.eval_unchecked(p) - src.value(p)).abs())
                .fold(0.0f64, f64::max);
            manifest["check"]["interior_points"] = json!(pts.len());
            manifest["check"]["interior_error"] = json_f64(worst);
        }
    }
    if let Some(path) = &args.field {
        std::fs::write(path, field_csv(&sol, args.field_res))?;
    }
    Ok(json_out(manifest))
}

/// Sample points in the domain of `h`, off the symmetry planes.
fn verify_points(h: &CyclidicHarmonic, count: usize) -> Vec<Point3> {
    let a = *h.params();
    let mut out = Vec::with_capacity(count);
    // golden-ratio sequences in the coordinate box
    let g = [0.754_877_666_246_693, 0.569_840_290_998_053, 0.430_159_709_001_947];
    let mut k = 0usize;
    while out.len() < count && k < 100 * count.max(1) {
        k += 1;
        let mut s = [0.0; 3];
        for i in 0..3 {
            let (lo, hi) = a.interval(i + 1);
            let u = 0.1 + 0.8 * (0.5 + k as f64 * g[i]).fract();
            s[i] = lo + u * (hi - lo);
        }
        let prof = SignProfile::from_id(k % 16);
        let Ok(p) = from_cyclide(&CyclideCoords { s }, &prof, &a) else {
            continue;
        };
        let clear = p.iter().all(|v| v.abs() > 0.05) && (p.norm() - 1.0).abs() > 0.05 && p.norm() < 3.0;
        let inside = match h.kind() {
            ProblemKind::I => p.norm() < 0.95,
            ProblemKind::III => p.z > 0.05,
            ProblemKind::II => true,
        };
        if clear && inside {
            out.push(p);
        }
    }
    out
}

pub fn verify(args: &VerifyArgs, cfg: &Config) -> Output {
    if !args.laplacian {
        return Err(CliError::usage("nothing to verify; pass --laplacian"));
    }
    if !(args.h > 0.0) {
        return Err(CliError::usage(format!("--h must be positive, got {}", args.h)));
    }
    let h = harmonic(&args.spec, cfg)?;
    let pts = match &args.points {
        Some(path) => read_points(path)?,
        None => verify_points(&h, args.samples),
    };
    let mut rows = Vec::with_capacity(pts.len());
    let mut max_residual = 0.0f64;
    let mut min_ratio = f64::INFINITY;
    for p in &pts {
        let (r1, r2, ratio) = richardson_pair(|q: &Point3| h.eval(q), p, args.h)?;
        max_residual = max_residual.max(r2.abs());
        min_ratio = min_ratio.min(ratio);
        rows.push(json!({
            "point": floats(&[p.x, p.y, p.z]),
            "residual_h": json_f64(r1),
            "residual_h2": json_f64(r2),
            "ratio": json_f64(ratio),
        }));
    }
    let t = h.triple();
    Ok(json_out(json!({
        "kind": t.kind.to_string(),
        "n": [t.n.0, t.n.1],
        "parity": t.parity.to_string(),
        "h": json_f64(args.h),
        "points": rows,
        "max_residual": json_f64(max_residual),
        "min_ratio": json_f64(min_ratio),
        "second_order": min_ratio > 3.5,
    })))
}
