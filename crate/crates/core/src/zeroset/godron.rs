use serde::{Serialize, Serializer};

use crate::classify::{classify_gauss_morin, classify_inflection, ClassifyOptions, ContactChain, Verdict};
use crate::error::{Error, Result};
use crate::geometry::{self, MapKind, MapSpec};
use crate::jet::{det, directional_derivative, Jet};
use crate::linalg;
use crate::report::Real17;

use super::grid::Grid;
use super::trace::TracedCurve;
use super::Sampler;

/// A located `A_3`-inflection point.
#[derive(Debug, Clone)]
pub struct Godron {
    pub point: [f64; 2],
    pub verdict: Verdict,
    pub certificate: ContactChain<f64>,
    /// `+1` when `h < 0` on the tail part, `-1` when `h > 0`; `None` when the
    /// dual self-intersection was not found or its sides were inconsistent.
    pub sign: Option<i8>,
    pub tail: Option<TailEvidence>,
    /// Verdict of the affine Gauss map at the point (affine maps only).
    pub gauss: Option<Verdict>,
}

/// A preimage pair `q1 ≠ q2` of one self-intersection point of the dual
/// front near a godron, found at half-separation `s` along the null direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailEvidence {
    pub separation: f64,
    pub pair: [[f64; 2]; 2],
    /// `h` at the two preimages.
    pub h_pair: [f64; 2],
    /// `h` at their midpoint, on the tail side.
    pub h_tail: f64,
    /// The same sign was found at half the separation.
    pub confirmed: bool,
}

impl Serialize for Godron {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        #[derive(Serialize)]
        struct Tail {
            separation: Real17,
            pair: [[Real17; 2]; 2],
            h_pair: [Real17; 2],
            h_tail: Real17,
            confirmed: bool,
        }
        #[derive(Serialize)]
        struct Repr<'a> {
            point: [Real17; 2],
            verdict: Verdict,
            sign: Option<i8>,
            tail: Option<Tail>,
            gauss: Option<Verdict>,
            certificate: &'a ContactChain<f64>,
        }
        let r2 = |p: [f64; 2]| [Real17(p[0]), Real17(p[1])];
        Repr {
            point: r2(self.point),
            verdict: self.verdict,
            sign: self.sign,
            tail: self.tail.map(|t| Tail {
                separation: Real17(t.separation),
                pair: [r2(t.pair[0]), r2(t.pair[1])],
                h_pair: [Real17(t.h_pair[0]), Real17(t.h_pair[1])],
                h_tail: Real17(t.h_tail),
                confirmed: t.confirmed,
            }),
            gauss: self.gauss,
            certificate: &self.certificate,
        }
        .serialize(s)
    }
}

/// A point where the hypotheses of the signed count fail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub point: [Real17; 2],
    pub verdict: String,
    pub message: String,
}

impl Violation {
    pub fn new(p: [f64; 2], verdict: impl Into<String>, message: impl Into<String>) -> Self {
        Violation {
            point: [Real17(p[0]), Real17(p[1])],
            verdict: verdict.into(),
            message: message.into(),
        }
    }
}

/// Where a godron search starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedKind {
    /// `ψ` changes sign between two vertices.
    SignChange,
    /// `|ψ|` has a small local minimum without a sign change (a candidate
    /// double zero).
    Minimum,
}

/// Seeds for `ψ = 0` on the traced curves: linear interpolation across each
/// sign change of the oriented `ψ`, plus vertices where `|ψ|` has a local
/// minimum below `min_psi` away from any sign change.
pub fn godron_seeds(curves: &[TracedCurve], grid: &Grid, min_psi: f64) -> Vec<([f64; 2], SeedKind)> {
    let mut out = Vec::new();
    for c in curves {
        let pairs = c.psi_pairs();
        let mut near_change = vec![false; c.vertices.len()];
        for &(a, b, pa, pb) in &pairs {
            // an exact zero at a vertex counts as a change on both sides
            if pa * pb < 0.0 || (pa == 0.0) != (pb == 0.0) {
                let t = pa / (pa - pb);
                let (p, q) = (c.vertices[a].point, c.vertices[b].point);
                let d = grid.delta(p, q);
                out.push(([p[0] + t * d[0], p[1] + t * d[1]], SeedKind::SignChange));
                near_change[a] = true;
                near_change[b] = true;
            }
        }
        let n = c.vertices.len();
        for k in 0..n {
            if near_change[k] || (!c.closed && (k == 0 || k + 1 == n)) || n < 3 {
                continue;
            }
            let x = c.vertices[k].psi.abs();
            let prev = c.vertices[(k + n - 1) % n].psi.abs();
            let next = c.vertices[(k + 1) % n].psi.abs();
            if x < min_psi && x <= prev && x < next {
                out.push((c.vertices[k].point, SeedKind::Minimum));
            }
        }
    }
    out
}

/// Newton on `(h, h')` with `h' = dh(ξ)`, damped on residual increase.
pub fn refine_godron(spec: &MapSpec, guess: [f64; 2], sampler: &Sampler) -> Result<Option<[f64; 2]>> {
    let eval = |p: [f64; 2]| -> Result<(Jet<f64>, Jet<f64>)> {
        let (_, hess) = geometry::hessian_system(spec, &p, 2)?;
        let h = det(&hess)?;
        let (xi, _) = geometry::kernel_field(&hess)?;
        let hp = directional_derivative(&h, &xi)?;
        Ok((h, hp))
    };
    let tol = sampler.tol.singular;
    let resid = |h: &Jet<f64>, hp: &Jet<f64>| (h.value() / h.max_abs()).hypot(hp.value() / hp.max_abs());
    let mut p = guess;
    let (mut h, mut hp) = eval(p)?;
    for _ in 0..30 {
        if h.value().abs() <= tol * h.max_abs() && hp.value().abs() <= tol * hp.max_abs() {
            return Ok(Some(p));
        }
        let j = vec![h.gradient(), hp.gradient()];
        let Some(step) = linalg::solve(&j, &[-h.value(), -hp.value()]) else {
            return Ok(None);
        };
        let r0 = resid(&h, &hp);
        let mut damp = 1.0;
        loop {
            let q = [p[0] + damp * step[0], p[1] + damp * step[1]];
            let (h1, hp1) = eval(q)?;
            if resid(&h1, &hp1) < r0 || damp < 1e-3 {
                p = q;
                h = h1;
                hp = hp1;
                break;
            }
            damp *= 0.5;
        }
    }
    let ok = h.value().abs() <= tol * h.max_abs() && hp.value().abs() <= tol * hp.max_abs();
    Ok(ok.then_some(p))
}

/// Affine chart `Φ = (G_i / G_k)_{i≠k}` of the dual front, with its Jacobian.
fn dual_chart(lifted: &MapSpec, k: usize, q: [f64; 2]) -> Result<(Vec<f64>, Vec<[f64; 2]>)> {
    let g = geometry::dual_front_jets(&lifted.jets(&q, 2)?)?;
    let gk = g[k].value();
    let dk = g[k].gradient();
    let mut val = Vec::with_capacity(g.len() - 1);
    let mut jac = Vec::with_capacity(g.len() - 1);
    for (i, gi) in g.iter().enumerate() {
        if i == k {
            continue;
        }
        let (v, d) = (gi.value(), gi.gradient());
        val.push(v / gk);
        jac.push([(d[0] * gk - v * dk[0]) / (gk * gk), (d[1] * gk - v * dk[1]) / (gk * gk)]);
    }
    Ok((val, jac))
}

/// Solves `Φ(q1) = Φ(q2)`, `(q1 - q2)·η = 2s` near `p ± sη + c n`.
fn self_intersection(
    lifted: &MapSpec,
    k: usize,
    p: [f64; 2],
    eta: [f64; 2],
    n: [f64; 2],
    s: f64,
) -> Result<Option<[[f64; 2]; 2]>> {
    let residual = |q1: [f64; 2], q2: [f64; 2]| -> Result<(Vec<f64>, Vec<[f64; 2]>, Vec<[f64; 2]>)> {
        let (a, ja) = dual_chart(lifted, k, q1)?;
        let (b, jb) = dual_chart(lifted, k, q2)?;
        let mut r: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        r.push((q1[0] - q2[0]) * eta[0] + (q1[1] - q2[1]) * eta[1] - 2.0 * s);
        Ok((r, ja, jb))
    };
    let norm = |r: &[f64]| r.iter().map(|x| x * x).sum::<f64>().sqrt();
    let seed = |c: f64| {
        (
            [p[0] + s * eta[0] + c * n[0], p[1] + s * eta[1] + c * n[1]],
            [p[0] - s * eta[0] + c * n[0], p[1] - s * eta[1] + c * n[1]],
        )
    };
    let mut seeds = Vec::new();
    for m in -40..=40 {
        let c = s * m as f64 / 40.0;
        let (q1, q2) = seed(c);
        let (r, _, _) = residual(q1, q2)?;
        seeds.push((norm(&r), c));
    }
    seeds.sort_by(|a, b| a.0.total_cmp(&b.0));
    for &(_, c) in seeds.iter().take(4) {
        let (mut q1, mut q2) = seed(c);
        let (mut r, mut ja, mut jb) = residual(q1, q2)?;
        for _ in 0..40 {
            let rows: Vec<Vec<f64>> = (0..3)
                .map(|i| vec![ja[i][0], ja[i][1], -jb[i][0], -jb[i][1]])
                .chain(std::iter::once(vec![eta[0], eta[1], -eta[0], -eta[1]]))
                .collect();
            let rhs: Vec<f64> = r.iter().map(|x| -x).collect();
            let Some(d) = linalg::solve(&rows, &rhs) else { break };
            let r0 = norm(&r);
            let mut damp = 1.0;
            loop {
                let a = [q1[0] + damp * d[0], q1[1] + damp * d[1]];
                let b = [q2[0] + damp * d[2], q2[1] + damp * d[3]];
                let (r1, ja1, jb1) = residual(a, b)?;
                if norm(&r1) < r0 || damp < 1e-4 {
                    (q1, q2, r, ja, jb) = (a, b, r1, ja1, jb1);
                    break;
                }
                damp *= 0.5;
            }
            if norm(&r) < 1e-13 {
                break;
            }
        }
        let off = |q: [f64; 2]| (q[0] - p[0]).hypot(q[1] - p[1]);
        if norm(&r) < 1e-11 && off(q1) < 4.0 * s && off(q2) < 4.0 * s {
            return Ok(Some([q1, q2]));
        }
    }
    Ok(None)
}

/// Sign of an `A_3`-inflection point from the dual swallowtail. The preimage
/// pairs of its self-intersection lie on one side of the singular curve; the
/// tail part is the other side, sampled at the pair midpoints. The sign is
/// `+1` when `h < 0` there.
pub fn godron_sign(spec: &MapSpec, p: [f64; 2], grid: &Grid) -> Result<(Option<i8>, Option<TailEvidence>)> {
    let lifted = spec.lifted()?;
    let data = geometry::hessian_data::<f64>(spec, &p, &Default::default())?;
    let xi = data
        .asymptotic
        .ok_or_else(|| Error::Domain("no asymptotic direction at the godron".into()))?;
    let gn = linalg::norm(&data.grad_h);
    let n = [data.grad_h[0] / gn, data.grad_h[1] / gn];
    let eta = [xi[0], xi[1]];
    let g = geometry::dual_front_jets(&lifted.jets(&p, 1)?)?;
    let k = geometry::argmax_modulus(&g.iter().map(Jet::value).collect::<Vec<_>>());
    let h_at = |q: [f64; 2]| -> Result<f64> {
        let (_, hess) = geometry::hessian_system(spec, &q, 0)?;
        Ok(det(&hess)?.value())
    };
    let width = grid.width();
    let mut s = 0.01 * width[0].min(width[1]);
    let mut found: Option<TailEvidence> = None;
    for _ in 0..8 {
        if let Some(pair) = self_intersection(&lifted, k, p, eta, n, s)? {
            let mid = [(pair[0][0] + pair[1][0]) / 2.0, (pair[0][1] + pair[1][1]) / 2.0];
            let ev = TailEvidence {
                separation: s,
                pair,
                h_pair: [h_at(pair[0])?, h_at(pair[1])?],
                h_tail: h_at(mid)?,
                confirmed: false,
            };
            let sides = ev.h_pair[0].signum() == ev.h_pair[1].signum() && ev.h_tail.signum() == -ev.h_pair[0].signum();
            if sides {
                if let Some(prev) = found {
                    if prev.h_tail.signum() == ev.h_tail.signum() {
                        let ev = TailEvidence { confirmed: true, ..prev };
                        return Ok((Some(if ev.h_tail < 0.0 { 1 } else { -1 }), Some(ev)));
                    }
                }
                found = Some(ev);
            }
        }
        s *= 0.5;
    }
    Ok((None, found))
}

/// Classifies a refined candidate, attaching sign and Gauss verdict for
/// `A_3`-inflections.
pub fn examine(spec: &MapSpec, p: [f64; 2], grid: &Grid, opts: &ClassifyOptions) -> Result<std::result::Result<Godron, Violation>> {
    let c = classify_inflection::<f64>(spec, &p, opts)?;
    match c.verdict {
        Verdict::Inflection(3) => {
            let (sign, tail) = godron_sign(spec, p, grid)?;
            let gauss = if spec.kind == MapKind::Affine {
                Some(classify_gauss_morin::<f64>(spec, &p, opts)?.verdict)
            } else {
                None
            };
            Ok(Ok(Godron {
                point: grid.wrap(p),
                verdict: c.verdict,
                certificate: c.certificate,
                sign,
                tail,
                gauss,
            }))
        }
        v => {
            let why = match c.reason {
                Some(r) => format!("{r:?}"),
                None => "not an A3-inflection".into(),
            };
            Ok(Err(Violation::new(grid.wrap(p), v.label(), why)))
        }
    }
}
