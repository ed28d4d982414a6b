use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::MapSpec;

/// Regular lattice over a 2-D parameter box. Periodic axes identify the last
/// node with the first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub cells: [usize; 2],
    pub periodic: [bool; 2],
    pub lo: [f64; 2],
    pub step: [f64; 2],
}

impl Grid {
    pub fn new(spec: &MapSpec, cells: usize) -> Result<Grid> {
        if spec.nvars() != 2 {
            return Err(Error::Kind(format!("zero sets need 2 variables, got {}", spec.nvars())));
        }
        if cells < 16 {
            return Err(Error::Domain(format!("grid must be at least 16, got {cells}")));
        }
        let mut lo = [0.0; 2];
        let mut step = [0.0; 2];
        let mut periodic = [false; 2];
        for a in 0..2 {
            let iv = spec.domain[a]
                .as_ref()
                .ok_or_else(|| Error::Domain(format!("variable `{}` needs a finite domain", spec.vars[a])))?;
            lo[a] = iv.lo;
            step[a] = iv.width() / cells as f64;
            periodic[a] = iv.periodic;
        }
        Ok(Grid {
            cells: [cells; 2],
            periodic,
            lo,
            step,
        })
    }

    pub fn refined(&self) -> Grid {
        Grid {
            cells: [self.cells[0] * 2, self.cells[1] * 2],
            step: [self.step[0] / 2.0, self.step[1] / 2.0],
            ..*self
        }
    }

    pub fn nodes(&self, axis: usize) -> usize {
        if self.periodic[axis] {
            self.cells[axis]
        } else {
            self.cells[axis] + 1
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes(0) * self.nodes(1)
    }

    /// Index of lattice node `(i, j)`, wrapping periodic axes.
    pub fn index(&self, i: usize, j: usize) -> usize {
        let i = if self.periodic[0] { i % self.cells[0] } else { i };
        let j = if self.periodic[1] { j % self.cells[1] } else { j };
        i * self.nodes(1) + j
    }

    pub fn ij(&self, index: usize) -> (usize, usize) {
        (index / self.nodes(1), index % self.nodes(1))
    }

    /// Parameter point of `(i, j)` without wrapping.
    pub fn point(&self, i: usize, j: usize) -> [f64; 2] {
        [self.lo[0] + i as f64 * self.step[0], self.lo[1] + j as f64 * self.step[1]]
    }

    pub fn width(&self) -> [f64; 2] {
        [self.step[0] * self.cells[0] as f64, self.step[1] * self.cells[1] as f64]
    }

    /// Brings a point into the fundamental box.
    pub fn wrap(&self, p: [f64; 2]) -> [f64; 2] {
        let mut q = p;
        for a in 0..2 {
            if self.periodic[a] {
                let w = self.width()[a];
                q[a] = (p[a] - self.lo[a]).rem_euclid(w) + self.lo[a];
                if q[a] >= self.lo[a] + w {
                    q[a] = self.lo[a];
                }
            }
        }
        q
    }

    /// Shortest displacement from `a` to `b` under the identifications.
    pub fn delta(&self, a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
        let mut d = [b[0] - a[0], b[1] - a[1]];
        for (ax, da) in d.iter_mut().enumerate() {
            if self.periodic[ax] {
                let w = self.width()[ax];
                *da -= w * (*da / w).round();
            }
        }
        d
    }

    pub fn distance(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        let d = self.delta(a, b);
        d[0].hypot(d[1])
    }

    /// Triangles as node triples; each cell `(i, j)` splits along its
    /// `(i, j)`–`(i+1, j+1)` diagonal.
    pub fn triangles(&self) -> impl Iterator<Item = [(usize, usize); 3]> + '_ {
        (0..self.cells[0]).flat_map(move |i| {
            (0..self.cells[1]).flat_map(move |j| {
                [
                    [(i, j), (i + 1, j), (i + 1, j + 1)],
                    [(i, j), (i + 1, j + 1), (i, j + 1)],
                ]
            })
        })
    }

    /// Every edge once, as node pairs `(start, end)` with `end` one step along
    /// the `u`, `v` or diagonal direction.
    pub fn edges(&self) -> impl Iterator<Item = [(usize, usize); 2]> + '_ {
        let (nu, nv) = (self.nodes(0), self.nodes(1));
        let (cu, cv) = (self.cells[0], self.cells[1]);
        let horizontal = (0..cu).flat_map(move |i| (0..nv).map(move |j| [(i, j), (i + 1, j)]));
        let vertical = (0..nu).flat_map(move |i| (0..cv).map(move |j| [(i, j), (i, j + 1)]));
        let diagonal = (0..cu).flat_map(move |i| (0..cv).map(move |j| [(i, j), (i + 1, j + 1)]));
        horizontal.chain(vertical).chain(diagonal)
    }

    /// Euler characteristic of the whole identified complex.
    pub fn euler(&self) -> i64 {
        self.node_count() as i64 - self.edges().count() as i64 + self.triangles().count() as i64
    }
}

/// A lattice with sampled values and their signs.
#[derive(Debug, Clone)]
pub struct SignedTriangulation {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl SignedTriangulation {
    pub fn sample<F>(grid: Grid, f: F) -> Result<SignedTriangulation>
    where
        F: Fn([f64; 2]) -> Result<f64> + Sync,
    {
        let values = (0..grid.node_count())
            .into_par_iter()
            .map(|k| {
                let (i, j) = grid.ij(k);
                f(grid.point(i, j))
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(SignedTriangulation { grid, values })
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn negative(&self, i: usize, j: usize) -> bool {
        self.value(i, j) < 0.0
    }

    /// `V - E + F` of the full subcomplex on the nodes where `keep` holds.
    pub fn euler_where(&self, keep: impl Fn(f64) -> bool) -> i64 {
        let g = &self.grid;
        let on = |(i, j): (usize, usize)| keep(self.value(i, j));
        let v = self.values.iter().filter(|x| keep(**x)).count() as i64;
        let e = g.edges().filter(|e| e.iter().all(|n| on(*n))).count() as i64;
        let f = g.triangles().filter(|t| t.iter().all(|n| on(*n))).count() as i64;
        v - e + f
    }

    /// `χ` of the negative region.
    pub fn chi_negative(&self) -> i64 {
        self.euler_where(|x| x < 0.0)
    }

    /// `χ` of the complement of the negative region.
    pub fn chi_nonnegative(&self) -> i64 {
        self.euler_where(|x| x >= 0.0)
    }

    /// Cells whose corners alternate in sign around the square; their
    /// topology depends on the diagonal choice.
    pub fn ambiguous_cells(&self) -> Vec<(usize, usize)> {
        let g = &self.grid;
        let mut out = Vec::new();
        for i in 0..g.cells[0] {
            for j in 0..g.cells[1] {
                let s = [
                    self.negative(i, j),
                    self.negative(i + 1, j),
                    self.negative(i + 1, j + 1),
                    self.negative(i, j + 1),
                ];
                if s[0] == s[2] && s[1] == s[3] && s[0] != s[1] {
                    out.push((i, j));
                }
            }
        }
        out
    }
}
