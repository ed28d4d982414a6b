mod common;

use std::f64::consts::PI;

use common::{pl_godrons, surface};
use fronts::zeroset::*;
use fronts::{MapSpec, Tolerances};

fn census(name: &str, grid: usize) -> GodronCensus {
    let opts = CensusOptions {
        grid,
        ..Default::default()
    };
    verify_theorem_c(&surface(name), &opts).unwrap()
}

#[test]
fn parabolic_line_of_graph() {
    let spec = surface("parabolic_graph");
    let curves = trace_zero_curve(&spec, ZeroFunction::Hessian, 64, &Tolerances::default()).unwrap();
    assert_eq!(curves.len(), 1);
    let c = &curves[0];
    assert!(!c.closed);
    assert!(c.vertices.iter().all(|v| v.point[1].abs() < 1e-9));
    let span = c.vertices.iter().map(|v| v.point[0]).fold(f64::NEG_INFINITY, f64::max)
        - c.vertices.iter().map(|v| v.point[0]).fold(f64::INFINITY, f64::min);
    assert!(span > 1.9);
    // ξ = ∂_u is transverse to v = 0
    assert!(c.vertices.iter().all(|v| v.psi.abs() > 0.99));
}

#[test]
fn sphere_patch_has_no_inflections() {
    let spec = MapSpec::parse(
        "name: cap\nkind: affine\nvars: u v\ndomain: u -1 1\ndomain: v -1 1\ncomponent: u\ncomponent: v\ncomponent: sqrt(4 - u^2 - v^2)\n",
    )
    .unwrap();
    let curves = trace_zero_curve(&spec, ZeroFunction::Hessian, 32, &Tolerances::default()).unwrap();
    assert!(curves.is_empty());
}

#[test]
fn torus_parabolic_circles() {
    let c = census("torus", 128);
    assert_eq!(c.curves.len(), 2);
    for curve in &c.curves {
        assert!(curve.closed);
        let v0 = curve.vertices[0].point[1];
        assert!((v0 - PI / 2.0).abs() < 1e-9 || (v0 - 3.0 * PI / 2.0).abs() < 1e-9, "{v0}");
        assert!(curve.vertices.iter().all(|v| (v.point[1] - v0).abs() < 1e-9));
    }
    assert!(c.godrons.is_empty());
    assert_eq!((c.chi_m_minus, c.chi_m_plus, c.residual), (0, 0, Some(0)));
    assert_eq!(c.warnings.len(), 2);
}

#[test]
fn euler_of_torus_regions() {
    let count = euler_characteristic_m_minus(&surface("torus"), 64, 256, &Tolerances::default()).unwrap();
    assert_eq!(count.chi_m_minus, 0);
    assert_eq!(count.chi_m_minus + count.chi_m_plus, count.chi_surface);
    let dent = euler_characteristic_m_minus(&surface("dented_torus"), 256, 1024, &Tolerances::default()).unwrap();
    assert_eq!(dent.chi_m_minus, 1);
    assert_eq!(dent.chi_m_plus, -1);
}

#[test]
fn bumpy_torus_census() {
    let c = census("bumpy_torus", 256);
    assert_eq!(c.godrons.len(), 8);
    assert_eq!(c.residual, Some(0));
    assert!(c.total_even && c.hypotheses_hold());
    assert_eq!((c.i2_plus, c.i2_minus), (4, 4));
    assert!(c.godrons.iter().all(|g| g.verdict.label() == "A3-inflection"));
    assert!(c.godrons.iter().all(|g| g.tail.as_ref().is_some_and(|t| t.confirmed)));

    let fine = census("bumpy_torus", 512);
    assert_eq!(fine.godrons.len(), 8);
    let grid = Grid::new(&surface("bumpy_torus"), 256).unwrap();
    for g in &c.godrons {
        let p = [g.point[0], g.point[1]];
        let twin = fine
            .godrons
            .iter()
            .find(|f| grid.distance([f.point[0], f.point[1]], p) < 1e-6)
            .expect("godron moved under grid doubling");
        assert_eq!(twin.sign, g.sign);
    }
}

#[test]
fn bumpy_torus_matches_piecewise_linear_oracle() {
    let c = census("bumpy_torus", 256);
    let oracle = pl_godrons(&surface("bumpy_torus"), 1024);
    assert_eq!(oracle.len(), c.godrons.len());
    let grid = Grid::new(&surface("bumpy_torus"), 1024).unwrap();
    for g in &c.godrons {
        assert!(oracle.iter().any(|q| grid.distance(*q, g.point) < 0.02), "{:?}", g.point);
    }
}

#[test]
fn signs_survive_orientation_reversal() {
    let spec = surface("bumpy_torus");
    let mirrored = MapSpec::parse(
        &std::fs::read_to_string(format!("{}/surfaces/bumpy_torus.map", env!("CARGO_MANIFEST_DIR")))
            .unwrap()
            .replace("(v)", "(-v)"),
    )
    .unwrap();
    let opts = CensusOptions {
        grid: 128,
        ..Default::default()
    };
    let a = verify_theorem_c(&spec, &opts).unwrap();
    let b = verify_theorem_c(&mirrored, &opts).unwrap();
    assert_eq!(a.godrons.len(), b.godrons.len());
    assert_eq!((a.i2_plus, a.i2_minus), (b.i2_plus, b.i2_minus));
    for g in &a.godrons {
        let circ = |x: f64| {
            let r = x.rem_euclid(2.0 * PI);
            r.min(2.0 * PI - r)
        };
        let m = b
            .godrons
            .iter()
            .find(|h| circ(h.point[0] - g.point[0]) < 1e-6 && circ(h.point[1] + g.point[1]) < 1e-6)
            .expect("mirror image of a godron");
        assert_eq!(m.sign, g.sign);
    }
}

#[test]
fn dented_torus_has_nonzero_euler_and_balances() {
    let c = census("dented_torus", 256);
    assert_eq!(c.chi_m_minus, 1);
    assert_eq!(c.residual, Some(0));
    assert_eq!(c.i2_plus as i64 - c.i2_minus as i64, 2);
    assert!(c.total_even);
}

#[test]
fn projective_tori() {
    let s3 = census("clifford_s3", 256);
    assert_eq!(s3.chi_m_minus, -8);
    assert_eq!(s3.residual, Some(0));
    let h3 = census("bumpy_torus_h3", 256);
    assert_eq!(h3.godrons.len(), 8);
    assert_eq!(h3.residual, Some(0));
}

#[test]
fn engineered_a4_point_is_a_violation() {
    let c = census("a4_torus", 128);
    assert!(!c.hypotheses_hold());
    assert_eq!(c.residual, None);
    assert!(c
        .violations
        .iter()
        .any(|v| v.point[0].0.abs() < 1e-6 && v.point[1].0.abs() < 1e-6 && v.verdict == "degenerate-nondiagnosable"));
}

#[test]
fn exports_are_deterministic() {
    let spec = surface("bumpy_torus");
    let a = census("bumpy_torus", 64);
    let b = census("bumpy_torus", 64);
    let grid = Grid::new(&spec, 64).unwrap();
    assert_eq!(curves_csv(&a.curves, &grid), curves_csv(&b.curves, &grid));
    assert_eq!(curves_svg(&a.curves, &a.godrons, &grid), curves_svg(&b.curves, &b.godrons, &grid));
    assert_eq!(fronts::report::to_json(&a), fronts::report::to_json(&b));
    let csv = curves_csv(&a.curves, &grid);
    assert!(csv.starts_with("curve,index,u,v,value\n"));
    assert_eq!(csv.lines().count(), 1 + a.curves.iter().map(|c| c.vertices.len()).sum::<usize>());
}

#[test]
fn lambda_curve_of_plane_map() {
    let spec = MapSpec::parse(
        "name: c\nkind: planemap\nvars: u v\ndomain: u -1 1\ndomain: v -1 1\ncomponent: u\ncomponent: v^3 + u*v\n",
    )
    .unwrap();
    let curves = trace_zero_curve(&spec, ZeroFunction::Lambda, 64, &Tolerances::default()).unwrap();
    assert_eq!(curves.len(), 1);
    for v in &curves[0].vertices {
        assert!((3.0 * v.point[1] * v.point[1] + v.point[0]).abs() < 1e-8, "{:?}", v.point);
    }
}
