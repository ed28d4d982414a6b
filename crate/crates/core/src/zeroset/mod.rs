//! Global structures over 2-D real parameter domains: tracing of `{h = 0}`
//! and `{λ = 0}`, godrons with their signs, and `χ(M_-)`.

mod export;
mod godron;
mod grid;
mod trace;

use rayon::prelude::*;
use serde::Serialize;

use crate::classify::ClassifyOptions;
use crate::error::{Error, Result};
use crate::geometry::{self, MapKind, MapSpec};
use crate::jet::{det, Jet};
use crate::linalg;
use crate::scalar::Field;
use crate::tolerance::Tolerances;

pub use export::{curves_csv, curves_svg};
pub use godron::{godron_seeds, godron_sign, refine_godron, Godron, SeedKind, TailEvidence, Violation};
pub use grid::{Grid, SignedTriangulation};
pub use trace::{CurveVertex, TracedCurve};

/// Which function's zero set to trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroFunction {
    /// The Hessian `h` with the asymptotic field.
    Hessian,
    /// `λ` of a front or plane map with the null field.
    Lambda,
}

/// Pointwise evaluator of the traced function and its field.
pub struct Sampler<'a> {
    pub spec: &'a MapSpec,
    pub which: ZeroFunction,
    pub tol: Tolerances,
}

impl<'a> Sampler<'a> {
    pub fn new(spec: &'a MapSpec, which: ZeroFunction, tol: Tolerances) -> Result<Self> {
        if spec.field != Field::Real || spec.nvars() != 2 {
            return Err(Error::Kind("zero sets need a real map of 2 variables".into()));
        }
        match (which, spec.kind) {
            (ZeroFunction::Hessian, MapKind::Affine | MapKind::Projective) => {}
            (ZeroFunction::Lambda, MapKind::Affine | MapKind::PlaneMap) => {}
            (w, k) => return Err(Error::Kind(format!("cannot trace {w:?} of a {} map", k.as_str()))),
        }
        Ok(Sampler { spec, which, tol })
    }

    fn local(&self, p: [f64; 2], order: usize) -> Result<(Jet<f64>, Vec<Jet<f64>>)> {
        match self.which {
            ZeroFunction::Hessian => {
                let (_, hess) = geometry::hessian_system(self.spec, &p, order)?;
                let h = det(&hess)?;
                let (xi, _) = geometry::kernel_field(&hess)?;
                Ok((h, xi))
            }
            ZeroFunction::Lambda => {
                let fj = if self.spec.kind == MapKind::PlaneMap {
                    geometry::lambda_map_jets(&self.spec.jets(&p, order + 1)?)?
                } else {
                    geometry::front_system(self.spec, &p, order, &self.tol)?
                };
                Ok((fj.lambda, fj.null_field))
            }
        }
    }

    pub fn value(&self, p: [f64; 2]) -> Result<f64> {
        if self.which == ZeroFunction::Hessian {
            let (_, hess) = geometry::hessian_system(self.spec, &p, 0)?;
            return Ok(det(&hess)?.value());
        }
        Ok(self.local(p, 0)?.0.value())
    }

    /// Value, gradient and jet scale.
    pub fn value_grad(&self, p: [f64; 2]) -> Result<(f64, [f64; 2], f64)> {
        let (phi, _) = self.local(p, 1)?;
        let g = phi.gradient();
        Ok((phi.value(), [g[0], g[1]], phi.max_abs()))
    }

    /// Curve vertex data; the nondegeneracy scale includes second derivatives
    /// so that isolated zeros with `dφ = 0` are caught.
    pub fn vertex(&self, p: [f64; 2]) -> Result<CurveVertex> {
        let (phi, field) = self.local(p, 2)?;
        let g = phi.gradient();
        let f: Vec<f64> = field.iter().map(Jet::value).collect();
        let (gn, fnorm) = (linalg::norm(&g), linalg::norm(&f));
        let field = if fnorm > 0.0 { [f[0] / fnorm, f[1] / fnorm] } else { [0.0, 0.0] };
        let psi = if gn > 0.0 && fnorm > 0.0 {
            (g[0] * field[0] + g[1] * field[1]) / gn
        } else {
            0.0
        };
        let scale = phi.max_abs();
        Ok(CurveVertex {
            point: p,
            value: phi.value(),
            scale,
            grad: [g[0], g[1]],
            field,
            psi,
            nondegenerate: gn > self.tol.zero * scale,
        })
    }
}

/// Samples the traced function on a lattice of `cells × cells`.
pub fn sample(sampler: &Sampler, cells: usize) -> Result<SignedTriangulation> {
    let grid = Grid::new(sampler.spec, cells)?;
    SignedTriangulation::sample(grid, |p| sampler.value(p))
}

/// Zero curves of `h` or `λ` on a `grid × grid` lattice.
pub fn trace_zero_curve(spec: &MapSpec, which: ZeroFunction, grid: usize, tol: &Tolerances) -> Result<Vec<TracedCurve>> {
    let sampler = Sampler::new(spec, which, *tol)?;
    let tri = sample(&sampler, grid)?;
    trace::trace(&sampler, &tri)
}

/// `χ(M_-)` and `χ(M_+)` from the signed lattice, doubling the lattice while
/// saddle-ambiguous cells remain, up to `max_grid`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EulerCount {
    pub grid: usize,
    pub chi_m_minus: i64,
    pub chi_m_plus: i64,
    pub chi_surface: i64,
    pub ambiguous_cells: usize,
}

pub fn euler_counts(tri: &SignedTriangulation) -> EulerCount {
    EulerCount {
        grid: tri.grid.cells[0],
        chi_m_minus: tri.chi_negative(),
        chi_m_plus: tri.chi_nonnegative(),
        chi_surface: tri.grid.euler(),
        ambiguous_cells: tri.ambiguous_cells().len(),
    }
}

fn resolve(sampler: &Sampler, grid: usize, max_grid: usize) -> Result<SignedTriangulation> {
    let mut tri = sample(sampler, grid)?;
    while !tri.ambiguous_cells().is_empty() && tri.grid.cells[0] * 2 <= max_grid {
        let g = tri.grid.refined();
        tri = SignedTriangulation::sample(g, |p| sampler.value(p))?;
    }
    Ok(tri)
}

pub fn euler_characteristic_m_minus(spec: &MapSpec, grid: usize, max_grid: usize, tol: &Tolerances) -> Result<EulerCount> {
    let sampler = Sampler::new(spec, ZeroFunction::Hessian, *tol)?;
    let tri = resolve(&sampler, grid, max_grid)?;
    let count = euler_counts(&tri);
    if count.ambiguous_cells > 0 {
        return Err(Error::Domain(format!(
            "{} saddle-ambiguous cells remain at grid {}",
            count.ambiguous_cells, count.grid
        )));
    }
    Ok(count)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CensusOptions {
    pub grid: usize,
    pub max_grid: usize,
    pub tol: Tolerances,
    pub classify: ClassifyOptions,
    /// Curves with `max |ψ|` below this are reported as tangent to their
    /// asymptotic field everywhere and yield no godron candidates.
    pub tangent_psi: f64,
    /// Local minima of `|ψ|` below this are searched for double zeros.
    pub min_psi: f64,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            grid: 256,
            max_grid: 1024,
            tol: Tolerances::default(),
            classify: ClassifyOptions::default(),
            tangent_psi: 1e-6,
            min_psi: 0.05,
        }
    }
}

/// Signed count of `A_3`-inflection points against `χ(M_-)`.
#[derive(Debug, Clone, Serialize)]
pub struct GodronCensus {
    pub surface: String,
    pub grid: usize,
    pub tolerances: Tolerances,
    pub curves: Vec<TracedCurve>,
    pub godrons: Vec<Godron>,
    pub i2_plus: usize,
    pub i2_minus: usize,
    pub chi_m_minus: i64,
    pub chi_m_plus: i64,
    pub chi_surface: i64,
    /// `i2_plus - i2_minus - 2 χ(M_-)`; absent when a sign is unresolved or
    /// the hypotheses fail.
    pub residual: Option<i64>,
    pub total_even: bool,
    pub warnings: Vec<String>,
    pub violations: Vec<Violation>,
}

impl GodronCensus {
    pub fn hypotheses_hold(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Godrons located on already traced curves.
pub fn find_godrons(
    spec: &MapSpec,
    curves: &[TracedCurve],
    grid: &Grid,
    opts: &CensusOptions,
) -> Result<(Vec<Godron>, Vec<Violation>, Vec<String>)> {
    let sampler = Sampler::new(spec, ZeroFunction::Hessian, opts.tol)?;
    let mut warnings = Vec::new();
    let mut violations = Vec::new();
    let mut live = Vec::new();
    for (idx, c) in curves.iter().enumerate() {
        for v in c.vertices.iter().filter(|v| !v.nondegenerate) {
            let p = grid.wrap(v.point);
            let seen = violations
                .iter()
                .any(|w: &Violation| grid.distance([w.point[0].0, w.point[1].0], p) < 1e-6);
            if !seen {
                violations.push(Violation::new(p, "degenerate-nondiagnosable", "dh vanishes on the curve"));
            }
        }
        if c.max_abs_psi() < opts.tangent_psi {
            warnings.push(format!(
                "curve {idx}: asymptotic field tangent along the whole curve (max |psi| = {:.3e}); no godrons counted",
                c.max_abs_psi()
            ));
        } else {
            live.push(c.clone());
        }
    }
    let seeds = godron_seeds(&live, grid, opts.min_psi);
    let refined: Vec<Option<[f64; 2]>> = seeds
        .par_iter()
        .map(|(s, _)| refine_godron(spec, *s, &sampler))
        .collect::<Result<_>>()?;
    let mut points: Vec<[f64; 2]> = Vec::new();
    for ((seed, kind), r) in seeds.iter().zip(refined) {
        match (r, kind) {
            (Some(p), _) => {
                let p = grid.wrap(p);
                if !points.iter().any(|q| grid.distance(*q, p) < 1e-6) {
                    points.push(p);
                }
            }
            (None, SeedKind::SignChange) => {
                violations.push(Violation::new(grid.wrap(*seed), "unrefined", "Newton on (h, h') did not converge"))
            }
            (None, SeedKind::Minimum) => {}
        }
    }
    points.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let examined: Vec<_> = points
        .par_iter()
        .map(|p| godron::examine(spec, *p, grid, &opts.classify))
        .collect::<Result<_>>()?;
    let mut godrons = Vec::new();
    for e in examined {
        match e {
            Ok(g) => godrons.push(g),
            Err(v) => violations.push(v),
        }
    }
    Ok((godrons, violations, warnings))
}

/// Full pipeline: trace, godrons, signs, `χ(M_-)`, residual and parity.
pub fn verify_theorem_c(spec: &MapSpec, opts: &CensusOptions) -> Result<GodronCensus> {
    let sampler = Sampler::new(spec, ZeroFunction::Hessian, opts.tol)?;
    let tri = resolve(&sampler, opts.grid, opts.max_grid)?;
    let counts = euler_counts(&tri);
    let curves = trace::trace(&sampler, &tri)?;
    let (godrons, mut violations, mut warnings) = find_godrons(spec, &curves, &tri.grid, opts)?;
    if counts.ambiguous_cells > 0 {
        warnings.push(format!("{} saddle-ambiguous cells at grid {}", counts.ambiguous_cells, counts.grid));
    }
    if !tri.grid.periodic.iter().all(|&p| p) {
        warnings.push("domain is not closed; the count identity needs a compact surface".into());
    }
    for g in godrons.iter().filter(|g| g.sign.is_none()) {
        violations.push(Violation::new(g.point, g.verdict.label(), "dual self-intersection not found; sign unresolved"));
    }
    let i2_plus = godrons.iter().filter(|g| g.sign == Some(1)).count();
    let i2_minus = godrons.iter().filter(|g| g.sign == Some(-1)).count();
    let residual = violations
        .is_empty()
        .then(|| i2_plus as i64 - i2_minus as i64 - 2 * counts.chi_m_minus);
    Ok(GodronCensus {
        surface: spec.name.clone(),
        grid: counts.grid,
        tolerances: opts.tol,
        curves,
        total_even: godrons.len() % 2 == 0,
        godrons,
        i2_plus,
        i2_minus,
        chi_m_minus: counts.chi_m_minus,
        chi_m_plus: counts.chi_m_plus,
        chi_surface: counts.chi_surface,
        residual,
        warnings,
        violations,
    })
}
