use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::Result;
use crate::report::Real17;

use super::grid::SignedTriangulation;
use super::Sampler;

/// A vertex of a traced curve: a point of the zero set with the local data
/// used for godron detection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveVertex {
    /// Unwrapped along the curve, so consecutive vertices are close.
    pub point: [f64; 2],
    pub value: f64,
    pub scale: f64,
    pub grad: [f64; 2],
    /// Asymptotic (or null) direction, oriented continuously along the curve.
    pub field: [f64; 2],
    /// `dφ(ξ) / (|dφ| |ξ|)`.
    pub psi: f64,
    pub nondegenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TracedCurve {
    pub vertices: Vec<CurveVertex>,
    pub closed: bool,
    /// The oriented field returns reversed after one turn of a closed curve.
    pub monodromy: bool,
    pub tolerance: f64,
}

impl TracedCurve {
    pub fn max_abs_psi(&self) -> f64 {
        self.vertices.iter().map(|v| v.psi.abs()).fold(0.0, f64::max)
    }

    /// Pairs of consecutive vertices, including the closing pair of a closed
    /// curve, with the second `ψ` sign-corrected for monodromy.
    pub fn psi_pairs(&self) -> Vec<(usize, usize, f64, f64)> {
        let n = self.vertices.len();
        let mut out: Vec<_> = (0..n.saturating_sub(1))
            .map(|k| (k, k + 1, self.vertices[k].psi, self.vertices[k + 1].psi))
            .collect();
        if self.closed && n > 1 {
            let flip = if self.monodromy { -1.0 } else { 1.0 };
            out.push((n - 1, 0, self.vertices[n - 1].psi, flip * self.vertices[0].psi));
        }
        out
    }
}

impl Serialize for TracedCurve {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        #[derive(Serialize)]
        struct Repr {
            closed: bool,
            monodromy: bool,
            tolerance: Real17,
            points: Vec<[Real17; 2]>,
            values: Vec<Real17>,
            psi: Vec<Real17>,
        }
        Repr {
            closed: self.closed,
            monodromy: self.monodromy,
            tolerance: Real17(self.tolerance),
            points: self.vertices.iter().map(|v| [Real17(v.point[0]), Real17(v.point[1])]).collect(),
            values: self.vertices.iter().map(|v| Real17(v.value)).collect(),
            psi: self.vertices.iter().map(|v| Real17(v.psi)).collect(),
        }
        .serialize(s)
    }
}

type NodeKey = usize;
type EdgeKey = (NodeKey, NodeKey);

struct Crossing {
    a: [f64; 2],
    b: [f64; 2],
    va: f64,
    vb: f64,
    triangles: Vec<usize>,
}

/// Root of `φ` on the segment `a → b`, where `φ` changes sign: Newton along
/// the edge with bisection whenever a step leaves the bracket.
pub(crate) fn edge_root(sampler: &Sampler, a: [f64; 2], b: [f64; 2], va: f64, vb: f64) -> Result<[f64; 2]> {
    let at = |t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut t = va / (va - vb);
    for iter in 0..90 {
        let p = at(t);
        let (v, grad, scale) = sampler.value_grad(p)?;
        if v.abs() <= sampler.tol.singular * scale || hi - lo < 1e-15 {
            return Ok(p);
        }
        if (v < 0.0) == (va < 0.0) {
            lo = t;
        } else {
            hi = t;
        }
        let d = grad[0] * (b[0] - a[0]) + grad[1] * (b[1] - a[1]);
        let newton = t - v / d;
        t = if iter < 30 && d != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Ok(at(t))
}

/// Traces the sign-change set of a sampled lattice into polylines, refining
/// every vertex onto the zero set.
pub fn trace(sampler: &Sampler, tri: &SignedTriangulation) -> Result<Vec<TracedCurve>> {
    let g = &tri.grid;
    let mut crossings: BTreeMap<EdgeKey, Crossing> = BTreeMap::new();
    let mut tri_edges: Vec<[EdgeKey; 2]> = Vec::new();
    for t in g.triangles() {
        let neg: Vec<bool> = t.iter().map(|&(i, j)| tri.negative(i, j)).collect();
        if neg.iter().all(|&x| x) || neg.iter().all(|&x| !x) {
            continue;
        }
        let id = tri_edges.len();
        let mut keys = Vec::with_capacity(2);
        for (x, y) in [(0, 1), (1, 2), (2, 0)] {
            if neg[x] == neg[y] {
                continue;
            }
            let (na, nb) = (t[x], t[y]);
            let (ka, kb) = (g.index(na.0, na.1), g.index(nb.0, nb.1));
            let key = (ka.min(kb), ka.max(kb));
            crossings
                .entry(key)
                .or_insert_with(|| Crossing {
                    a: g.point(na.0, na.1),
                    b: g.point(nb.0, nb.1),
                    va: tri.value(na.0, na.1),
                    vb: tri.value(nb.0, nb.1),
                    triangles: Vec::new(),
                })
                .triangles
                .push(id);
            keys.push(key);
        }
        tri_edges.push([keys[0], keys[1]]);
    }
    let keys: Vec<EdgeKey> = crossings.keys().copied().collect();
    let roots: Vec<[f64; 2]> = keys
        .par_iter()
        .map(|k| {
            let c = &crossings[k];
            edge_root(sampler, c.a, c.b, c.va, c.vb).map(|p| g.wrap(p))
        })
        .collect::<Result<_>>()?;
    let root_of: BTreeMap<EdgeKey, [f64; 2]> = keys.iter().copied().zip(roots).collect();

    let mut visited = vec![false; tri_edges.len()];
    let mut chains: Vec<(Vec<EdgeKey>, bool)> = Vec::new();
    let walk = |start: EdgeKey, first: usize, visited: &mut Vec<bool>| -> (Vec<EdgeKey>, bool) {
        let mut seq = vec![start];
        let mut cur = first;
        let mut edge = start;
        loop {
            visited[cur] = true;
            let [e0, e1] = tri_edges[cur];
            edge = if e0 == edge { e1 } else { e0 };
            if edge == seq[0] {
                return (seq, true);
            }
            seq.push(edge);
            let next = crossings[&edge].triangles.iter().copied().find(|&t| t != cur);
            match next {
                Some(t) if !visited[t] => cur = t,
                _ => return (seq, false),
            }
        }
    };
    for (key, c) in &crossings {
        if c.triangles.len() == 1 && !visited[c.triangles[0]] {
            chains.push(walk(*key, c.triangles[0], &mut visited));
        }
    }
    for t in 0..tri_edges.len() {
        if !visited[t] {
            chains.push(walk(tri_edges[t][0], t, &mut visited));
        }
    }

    chains
        .into_iter()
        .map(|(seq, closed)| {
            let mut pts: Vec<[f64; 2]> = Vec::with_capacity(seq.len());
            for key in &seq {
                let r = root_of[key];
                let p = match pts.last() {
                    Some(prev) => {
                        let d = g.delta(*prev, r);
                        [prev[0] + d[0], prev[1] + d[1]]
                    }
                    None => r,
                };
                // a zero on a lattice node is the root of several edges
                if pts.last().is_some_and(|q| (q[0] - p[0]).abs().max((q[1] - p[1]).abs()) <= 1e-12 * g.width()[0].max(g.width()[1])) {
                    continue;
                }
                pts.push(p);
            }
            if closed && pts.len() > 1 && g.distance(pts[0], pts[pts.len() - 1]) <= 1e-12 * g.width()[0].max(g.width()[1]) {
                pts.pop();
            }
            let mut vertices = pts
                .par_iter()
                .map(|p| sampler.vertex(*p))
                .collect::<Result<Vec<CurveVertex>>>()?;
            for k in 1..vertices.len() {
                let prev = vertices[k - 1].field;
                let v = &mut vertices[k];
                if prev[0] * v.field[0] + prev[1] * v.field[1] < 0.0 {
                    v.field = [-v.field[0], -v.field[1]];
                    v.psi = -v.psi;
                }
            }
            let monodromy = closed && {
                let (a, b) = (vertices[vertices.len() - 1].field, vertices[0].field);
                a[0] * b[0] + a[1] * b[1] < 0.0
            };
            Ok(TracedCurve {
                vertices,
                closed,
                monodromy,
                tolerance: sampler.tol.singular,
            })
        })
        .collect()
}
