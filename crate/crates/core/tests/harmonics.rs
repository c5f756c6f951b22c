use std::sync::Arc;

use cyclide::eigensolver::{solve_two_param, EigenOptions, Parity, ProblemKind};
use cyclide::elliptic::OmegaTable;
use cyclide::geometry::{apply_symmetry, from_cyclide, CyclideCoords, ParamsA, Point3, SignProfile};
use cyclide::harmonics::{richardson_pair, CyclidicHarmonic, PointData};

fn harmonic(kind: ProblemKind, n: (usize, usize), bits: &str) -> CyclidicHarmonic {
    let tab = Arc::new(OmegaTable::new(ParamsA::default()).unwrap());
    let par = Parity::parse(kind, bits).unwrap();
    CyclidicHarmonic::new(solve_two_param(kind, n, par, &tab, &EigenOptions::default()).unwrap())
}

#[test]
fn separated_form_matches_the_product() {
    let a = ParamsA::default();
    for (kind, n, bits) in [
        (ProblemKind::I, (1, 2), "011"),
        (ProblemKind::II, (2, 0), "0101"),
        (ProblemKind::III, (1, 1), "001"),
    ] {
        let h = harmonic(kind, n, bits);
        let t = h.triple();
        for id in 0..16 {
            let c = CyclideCoords::new(0.37, 1.61, 2.23);
            let p = from_cyclide(&c, &SignProfile::from_id(id), &a).unwrap();
            if h.check_domain(&p).is_err() {
                continue;
            }
            let pt = PointData::new(&p, &a);
            let prod: f64 = (1..=3).map(|i| t.eval_e(i, c.s[i - 1]).unwrap()).product();
            let want = pt.parity_sign(&t.parity) * prod / (p.norm_squared() + 1.0).sqrt();
            assert!((h.eval(&p).unwrap() - want).abs() < 1e-9, "{kind} {id}");
        }
    }
}

#[test]
fn continuous_across_planes_and_the_sphere() {
    // even harmonics of the second kind are smooth across every symmetry set
    let h = harmonic(ProblemKind::II, (1, 1), "0000");
    let eps = 1e-7;
    let base = [
        Point3::new(0.0, 0.4, 0.3),
        Point3::new(0.3, 0.0, -0.5),
        Point3::new(0.6, -0.2, 0.0),
        Point3::new(0.6, 0.48, 0.64),
    ];
    for (k, p) in base.iter().enumerate() {
        let normal = if k < 3 {
            let mut v = Point3::zeros();
            v[k] = 1.0;
            v
        } else {
            p.normalize()
        };
        let g1 = h.eval(&(p + eps * normal)).unwrap();
        let g2 = h.eval(&(p - eps * normal)).unwrap();
        assert!((g1 - g2).abs() < 1e-5 * (1.0 + g1.abs()), "{k}: {g1} {g2}");
    }
}

#[test]
fn odd_harmonics_vanish_on_their_plane() {
    let h = harmonic(ProblemKind::I, (1, 0), "010");
    let p = Point3::new(0.2, 1e-9, 0.3);
    assert!(h.eval(&p).unwrap().abs() < 1e-6);
    let q = apply_symmetry(2, &p).unwrap();
    assert!((h.eval(&q).unwrap() + h.eval(&p).unwrap()).abs() < 1e-12);
}

#[test]
fn all_kinds_are_harmonic_at_sample_points() {
    for (kind, p) in [
        (ProblemKind::I, Point3::new(0.2, 0.3, -0.25)),
        (ProblemKind::II, Point3::new(-0.7, 0.9, 0.4)),
        (ProblemKind::III, Point3::new(0.3, -0.4, 0.6)),
    ] {
        let h = harmonic(kind, (1, 1), if kind == ProblemKind::II { "0000" } else { "000" });
        let (_, _, ratio) = richardson_pair(|q: &Point3| h.eval(q), &p, 1e-2).unwrap();
        assert!(ratio > 3.5, "{kind}: {ratio}");
    }
}
