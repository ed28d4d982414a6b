use std::fmt::Write;

use super::godron::Godron;
use super::grid::Grid;
use super::trace::TracedCurve;

/// `curve,index,u,v,value` rows, one per vertex, coordinates wrapped into the
/// fundamental box.
pub fn curves_csv(curves: &[TracedCurve], grid: &Grid) -> String {
    let mut out = String::from("curve,index,u,v,value\n");
    for (c, curve) in curves.iter().enumerate() {
        for (k, v) in curve.vertices.iter().enumerate() {
            let p = grid.wrap(v.point);
            writeln!(out, "{c},{k},{:.16e},{:.16e},{:.16e}", p[0], p[1], v.value).unwrap();
        }
    }
    out
}

const SIZE: f64 = 512.0;

/// Static SVG of the parameter box with the zero curves and signed godron
/// markers (`+` filled red circle, `-` filled blue square, unresolved hollow).
pub fn curves_svg(curves: &[TracedCurve], godrons: &[Godron], grid: &Grid) -> String {
    let w = grid.width();
    let map = |p: [f64; 2]| {
        let q = grid.wrap(p);
        (
            (q[0] - grid.lo[0]) / w[0] * SIZE,
            SIZE - (q[1] - grid.lo[1]) / w[1] * SIZE,
        )
    };
    let mut out = String::new();
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    )
    .unwrap();
    writeln!(out, "<rect x=\"0\" y=\"0\" width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\" stroke=\"black\"/>").unwrap();
    for curve in curves {
        let mut runs: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
        let mut pts: Vec<[f64; 2]> = curve.vertices.iter().map(|v| v.point).collect();
        if curve.closed {
            if let Some(first) = pts.first().copied() {
                let last = *pts.last().unwrap();
                let d = grid.delta(last, first);
                pts.push([last[0] + d[0], last[1] + d[1]]);
            }
        }
        let mut prev: Option<(f64, f64)> = None;
        for p in pts {
            let q = map(p);
            if let Some(r) = prev {
                if (q.0 - r.0).abs() > SIZE / 2.0 || (q.1 - r.1).abs() > SIZE / 2.0 {
                    runs.push(Vec::new());
                }
            }
            runs.last_mut().unwrap().push(q);
            prev = Some(q);
        }
        for run in runs.iter().filter(|r| r.len() > 1) {
            let pts: Vec<String> = run.iter().map(|(x, y)| format!("{x:.3},{y:.3}")).collect();
            writeln!(out, "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"{}\"/>", pts.join(" ")).unwrap();
        }
    }
    for g in godrons {
        let (x, y) = map(g.point);
        match g.sign {
            Some(1) => writeln!(out, "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"5\" fill=\"red\"/>"),
            Some(_) => writeln!(
                out,
                "<rect x=\"{:.3}\" y=\"{:.3}\" width=\"10\" height=\"10\" fill=\"blue\"/>",
                x - 5.0,
                y - 5.0
            ),
            None => writeln!(out, "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"5\" fill=\"none\" stroke=\"gray\"/>"),
        }
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}
