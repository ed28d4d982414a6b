//! Metrology of planar 3/2-cusps: detection, cuspidal curvature, the
//! best-approximating cycloid, and the osculating cycloid at regular points.

use std::f64::consts::PI;
use std::fmt::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{shift_down, MapKind, MapSpec};
use crate::jet::Jet;
use crate::report::real17;
use crate::scalar::Field;

/// Thresholds of the cusp criterion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CuspTolerances {
    /// `γ̇` counts as zero below `speed * scale`.
    #[serde(serialize_with = "real17::one")]
    pub speed: f64,
    /// `det(γ̈, γ⃛)` counts as nonzero above `det * scale³`.
    #[serde(serialize_with = "real17::one")]
    pub det: f64,
}

impl Default for CuspTolerances {
    fn default() -> Self {
        CuspTolerances { speed: 1e-9, det: 1e-9 }
    }
}

/// Derivatives of a planar curve at `t0` and the cusp test on them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveDerivatives {
    #[serde(serialize_with = "real17::one")]
    pub t0: f64,
    #[serde(serialize_with = "real17::pair")]
    pub point: [f64; 2],
    #[serde(serialize_with = "real17::pair")]
    pub d1: [f64; 2],
    #[serde(serialize_with = "real17::pair")]
    pub d2: [f64; 2],
    #[serde(serialize_with = "real17::pair")]
    pub d3: [f64; 2],
    /// Largest of `|γ̇|`, `|γ̈|`, `|γ⃛|`.
    #[serde(serialize_with = "real17::one")]
    pub scale: f64,
    /// `det(γ̈, γ⃛)`.
    #[serde(serialize_with = "real17::one")]
    pub det23: f64,
    pub singular: bool,
    pub is_cusp: bool,
    pub tolerances: CuspTolerances,
}

fn det2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn norm2(a: [f64; 2]) -> f64 {
    a[0].hypot(a[1])
}

fn dot2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn check_curve(spec: &MapSpec) -> Result<()> {
    if spec.kind != MapKind::Curve || spec.nvars() != 1 || spec.field != Field::Real {
        return Err(Error::Kind("cusp analysis needs a real planar curve (kind: curve, one variable)".into()));
    }
    Ok(())
}

fn curve_jets(spec: &MapSpec, t0: f64, order: usize) -> Result<Vec<Jet<f64>>> {
    check_curve(spec)?;
    spec.jets(&[t0], order)
}

fn derivative(jets: &[Jet<f64>], k: u32) -> [f64; 2] {
    [jets[0].derivative(&[k]), jets[1].derivative(&[k])]
}

/// 3/2-cusp test: `γ̇(t0) = 0` and `det(γ̈, γ⃛) ≠ 0`.
pub fn detect_cusp(spec: &MapSpec, t0: f64, tol: &CuspTolerances) -> Result<CurveDerivatives> {
    let jets = curve_jets(spec, t0, 4)?;
    let (d1, d2, d3) = (derivative(&jets, 1), derivative(&jets, 2), derivative(&jets, 3));
    let scale = norm2(d1).max(norm2(d2)).max(norm2(d3));
    let det23 = det2(d2, d3);
    let singular = norm2(d1) < tol.speed * scale;
    Ok(CurveDerivatives {
        t0,
        point: [jets[0].value(), jets[1].value()],
        d1,
        d2,
        d3,
        scale,
        det23,
        singular,
        is_cusp: singular && det23.abs() > tol.det * scale.powi(3),
        tolerances: *tol,
    })
}

/// Cuspidal curvature by both expressions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CuspidalCurvature {
    /// `det(γ̈, γ⃛) / |γ̈|^{5/2}`.
    #[serde(serialize_with = "real17::one")]
    pub mu: f64,
    /// `2 det(ν, ν̇) / √|det(γ̈, ν)|` with `ν` the smooth unit normal.
    #[serde(serialize_with = "real17::one")]
    pub mu_normal: f64,
}

/// Smooth unit normal through a singular point, `J w / |w|` with
/// `w = (γ̇ - γ̇(t0)) / (t - t0)`.
fn cusp_normal(jets: &[Jet<f64>]) -> Result<Vec<Jet<f64>>> {
    let w: Vec<Jet<f64>> = jets
        .iter()
        .map(|c| c.partial(0).and_then(|d| shift_down(&d)))
        .collect::<Result<_>>()?;
    let n = [-&w[1], w[0].clone()];
    let len = (&(&n[0] * &n[0]) + &(&n[1] * &n[1])).sqrt()?;
    let inv = len.recip()?;
    Ok(vec![&n[0] * &inv, &n[1] * &inv])
}

pub fn cuspidal_curvature(spec: &MapSpec, t0: f64, tol: &CuspTolerances) -> Result<CuspidalCurvature> {
    let d = detect_cusp(spec, t0, tol)?;
    if !d.is_cusp {
        return Err(Error::Domain(format!("t = {t0} is not a 3/2-cusp (degenerate cusp)")));
    }
    let mu = d.det23 / norm2(d.d2).powf(2.5);
    let jets = curve_jets(spec, t0, 5)?;
    let nu = cusp_normal(&jets)?;
    let nv = [nu[0].value(), nu[1].value()];
    let nd = [nu[0].derivative(&[1]), nu[1].derivative(&[1])];
    let mu_normal = 2.0 * det2(nv, nd) / det2(d.d2, nv).abs().sqrt();
    Ok(CuspidalCurvature { mu, mu_normal })
}

/// Placement of `a (τ - sin τ, 1 - cos τ)` in the plane:
/// `origin + a (τ - sin τ) x_axis + a (1 - cos τ) y_axis`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cycloid {
    #[serde(serialize_with = "real17::one")]
    pub radius: f64,
    #[serde(serialize_with = "real17::pair")]
    pub origin: [f64; 2],
    #[serde(serialize_with = "real17::pair")]
    pub x_axis: [f64; 2],
    /// The cycloid's axis: normal line at its cusp, pointing into the arch.
    #[serde(serialize_with = "real17::pair")]
    pub y_axis: [f64; 2],
    /// `(x_axis, y_axis)` is negatively oriented.
    pub reflected: bool,
    /// Direction angle of `x_axis`.
    #[serde(serialize_with = "real17::one")]
    pub angle: f64,
    /// `dτ/dt` at `t0` under the normalizing parameter.
    #[serde(serialize_with = "real17::one")]
    pub tau_rate: f64,
}

/// `τ - sin τ` without cancellation near 0.
fn tau_minus_sin(t: f64) -> f64 {
    if t.abs() > 0.5 {
        return t - t.sin();
    }
    let (t2, mut term, mut sum): (f64, f64, f64) = (t * t, t * t * t / 6.0, 0.0);
    let mut k = 3.0;
    while term.abs() > 1e-18 * sum.abs().max(f64::MIN_POSITIVE) {
        sum += term;
        term *= -t2 / ((k + 1.0) * (k + 2.0));
        k += 2.0;
    }
    sum
}

impl Cycloid {
    pub fn standard(radius: f64, tau: f64) -> [f64; 2] {
        let h = (tau / 2.0).sin();
        [radius * tau_minus_sin(tau), 2.0 * radius * h * h]
    }

    pub fn at(&self, tau: f64) -> [f64; 2] {
        let c = Cycloid::standard(self.radius, tau);
        [
            self.origin[0] + c[0] * self.x_axis[0] + c[1] * self.y_axis[0],
            self.origin[1] + c[0] * self.x_axis[1] + c[1] * self.y_axis[1],
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CuspSign {
    Positive,
    Negative,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CuspReport {
    #[serde(serialize_with = "real17::one")]
    pub t0: f64,
    pub is_cusp: bool,
    #[serde(serialize_with = "real17::one")]
    pub mu: f64,
    #[serde(serialize_with = "real17::one")]
    pub mu_normal: f64,
    pub sign: CuspSign,
    /// Cuspidal curvature radius `1/μ²`.
    #[serde(serialize_with = "real17::one")]
    pub radius: f64,
    /// Normal-form coefficient: `γ ≈ (α s³, s²)` after the rigid motion.
    #[serde(serialize_with = "real17::one")]
    pub alpha: f64,
    pub cycloid: Cycloid,
    #[serde(serialize_with = "real17::one")]
    pub window: f64,
    /// `sup |s| ≤ window` of `dist(γ, c) / |s|³`.
    #[serde(serialize_with = "real17::one")]
    pub residual: f64,
    /// The same over half the window.
    #[serde(serialize_with = "real17::one")]
    pub residual_half: f64,
    pub derivatives: CurveDerivatives,
}

impl CuspReport {
    /// The residual shrinks under window halving, as an `o(s³)` fit must, or
    /// is already at round-off level (the curve is a cycloid).
    pub fn contact_verified(&self) -> bool {
        self.residual_half < self.residual || self.residual < Self::EXACT
    }

    pub const EXACT: f64 = 1e-9;
}

/// Orthonormal frame of the normalization: `y` along `γ̈`, `x` chosen with
/// `α > 0` in the (possibly reflected) frame.
struct Normalization {
    origin: [f64; 2],
    x_axis: [f64; 2],
    y_axis: [f64; 2],
    alpha: f64,
    b: f64,
}

impl Normalization {
    fn new(d: &CurveDerivatives) -> Result<Self> {
        let n2 = norm2(d.d2);
        let y_axis = [d.d2[0] / n2, d.d2[1] / n2];
        let mut x_axis = [y_axis[1], -y_axis[0]];
        let b = n2 / 2.0;
        let mut alpha = dot2(x_axis, d.d3) / 6.0 / b.powf(1.5);
        if alpha == 0.0 {
            return Err(Error::Domain("alpha = 0: not a 3/2-cusp".into()));
        }
        if alpha < 0.0 {
            x_axis = [-x_axis[0], -x_axis[1]];
            alpha = -alpha;
        }
        Ok(Normalization {
            origin: d.point,
            x_axis,
            y_axis,
            alpha,
            b,
        })
    }

    fn local(&self, p: [f64; 2]) -> [f64; 2] {
        let q = [p[0] - self.origin[0], p[1] - self.origin[1]];
        [dot2(q, self.x_axis), dot2(q, self.y_axis)]
    }
}

fn eval_curve(spec: &MapSpec, t: f64) -> Result<[f64; 2]> {
    let v = spec.eval::<f64>(&[t])?;
    Ok([v[0], v[1]])
}

/// Parameter `t` with normalized height `y(t) = s²` on the side of `sign(s)`.
fn t_at(spec: &MapSpec, nz: &Normalization, t0: f64, s: f64) -> Result<f64> {
    let target = s * s;
    let dir = s.signum();
    let y = |dt: f64| -> Result<f64> { Ok(nz.local(eval_curve(spec, t0 + dir * dt)?)[1]) };
    let mut hi = s.abs() / nz.b.sqrt();
    let mut grow = 0;
    while y(hi)? < target {
        hi *= 1.5;
        grow += 1;
        if grow > 60 {
            return Err(Error::Domain("normalized parameter not monotone near the cusp".into()));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if y(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(t0 + dir * 0.5 * (lo + hi))
}

/// Distance from a normalized point to the standard cycloid of radius `a`,
/// searched near `τ0`.
fn distance_to_cycloid(a: f64, p: [f64; 2], tau0: f64) -> f64 {
    let d2 = |tau: f64| {
        let c = Cycloid::standard(a, tau);
        (c[0] - p[0]).powi(2) + (c[1] - p[1]).powi(2)
    };
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (tau0 - 0.5 * tau0.abs(), tau0 + 0.5 * tau0.abs());
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (d2(x1), d2(x2));
    for _ in 0..200 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = d2(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = d2(x2);
        }
    }
    f1.min(f2).sqrt()
}

fn fit_residual(spec: &MapSpec, nz: &Normalization, a: f64, t0: f64, window: f64) -> Result<f64> {
    const SAMPLES: usize = 20;
    let mut worst: f64 = 0.0;
    for k in 1..=SAMPLES {
        for sign in [-1.0, 1.0] {
            let s = sign * window * k as f64 / SAMPLES as f64;
            let t = t_at(spec, nz, t0, s)?;
            let mut p = nz.local(eval_curve(spec, t)?);
            p[1] = p[1].max(0.0);
            let d = distance_to_cycloid(a, p, 3.0 * nz.alpha * s);
            worst = worst.max(d / s.abs().powi(3));
        }
    }
    Ok(worst)
}

/// The unique cycloid with third-order contact at a 3/2-cusp.
pub fn best_cycloid(spec: &MapSpec, t0: f64, window: f64, tol: &CuspTolerances) -> Result<CuspReport> {
    let d = detect_cusp(spec, t0, tol)?;
    if !d.is_cusp {
        return Err(Error::Domain(format!("t = {t0} is not a 3/2-cusp (degenerate cusp)")));
    }
    let k = cuspidal_curvature(spec, t0, tol)?;
    let nz = Normalization::new(&d)?;
    let a = 2.0 / (9.0 * nz.alpha * nz.alpha);
    let cycloid = Cycloid {
        radius: a,
        origin: nz.origin,
        x_axis: nz.x_axis,
        y_axis: nz.y_axis,
        reflected: det2(nz.x_axis, nz.y_axis) < 0.0,
        angle: nz.x_axis[1].atan2(nz.x_axis[0]),
        tau_rate: 3.0 * nz.alpha * nz.b.sqrt(),
    };
    let residual = fit_residual(spec, &nz, a, t0, window)?;
    let residual_half = fit_residual(spec, &nz, a, t0, window / 2.0)?;
    Ok(CuspReport {
        t0,
        is_cusp: true,
        mu: k.mu,
        mu_normal: k.mu_normal,
        sign: if k.mu > 0.0 { CuspSign::Positive } else { CuspSign::Negative },
        radius: 1.0 / (k.mu * k.mu),
        alpha: nz.alpha,
        cycloid,
        window,
        residual,
        residual_half,
        derivatives: d,
    })
}

/// Cycloid through a regular point by the curvature formulas
/// `sin θ = κ²/√(κ⁴+κ̇²)` and `a = √(κ⁴+κ̇²)/|κ|³` (arclength derivatives).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OsculatingCycloid {
    #[serde(serialize_with = "real17::one")]
    pub t0: f64,
    #[serde(serialize_with = "real17::one")]
    pub kappa: f64,
    #[serde(serialize_with = "real17::one")]
    pub kappa_dot: f64,
    /// Angle between the cycloid's axis and the normal line of the curve.
    #[serde(serialize_with = "real17::one")]
    pub theta: f64,
    #[serde(serialize_with = "real17::one")]
    pub a: f64,
}

impl OsculatingCycloid {
    /// `a/4`: on a cycloid of generating radius `r` the formula for `a`
    /// returns `4r` at every regular point.
    pub fn generating_radius(&self) -> f64 {
        self.a / 4.0
    }
}

pub fn osculating_cycloid_regular(spec: &MapSpec, t0: f64, tol: &CuspTolerances) -> Result<OsculatingCycloid> {
    let jets = curve_jets(spec, t0, 4)?;
    let d1: Vec<Jet<f64>> = jets.iter().map(|c| c.partial(0).map(|j| j.truncate(2))).collect::<Result<_>>()?;
    let d2: Vec<Jet<f64>> = jets
        .iter()
        .map(|c| c.partial(0)?.partial(0))
        .collect::<Result<_>>()?;
    let scale = jets.iter().map(|c| c.derivative(&[1]).abs()).fold(0.0, f64::max)
        .max(jets.iter().map(|c| c.derivative(&[2]).abs()).fold(0.0, f64::max));
    let speed2 = &(&d1[0] * &d1[0]) + &(&d1[1] * &d1[1]);
    if speed2.value().sqrt() <= tol.speed * scale {
        return Err(Error::Domain(format!("t = {t0} is a singular point; use the cusp report")));
    }
    let cross = &(&d1[0] * &d2[1]) - &(&d1[1] * &d2[0]);
    let kappa_t = cross.try_mul(&speed2.powf(-1.5)?)?;
    let speed = speed2.value().sqrt();
    let kappa = kappa_t.value();
    let kappa_dot = kappa_t.derivative(&[1]) / speed;
    if cross.value().abs() <= tol.speed * speed * norm2([d2[0].value(), d2[1].value()]).max(f64::MIN_POSITIVE) {
        return Err(Error::Domain(format!(
            "curvature vanishes at t = {t0}; no osculating cycloid direction"
        )));
    }
    let root = (kappa.powi(4) + kappa_dot * kappa_dot).sqrt();
    Ok(OsculatingCycloid {
        t0,
        kappa,
        kappa_dot,
        theta: (kappa * kappa / root).clamp(-1.0, 1.0).asin(),
        a: root / kappa.abs().powi(3),
    })
}

/// Static SVG of the curve near the cusp and the fitted cycloid arch.
pub fn cusp_svg(spec: &MapSpec, report: &CuspReport) -> Result<String> {
    const SIZE: f64 = 512.0;
    const N: usize = 200;
    let c = &report.cycloid;
    let span = PI / c.tau_rate;
    let curve: Vec<[f64; 2]> = (0..=N)
        .map(|k| eval_curve(spec, report.t0 - span + 2.0 * span * k as f64 / N as f64))
        .collect::<Result<_>>()?;
    let arch: Vec<[f64; 2]> = (0..=N).map(|k| c.at(-PI + 2.0 * PI * k as f64 / N as f64)).collect();
    let all = curve.iter().chain(arch.iter()).filter(|p| p[0].is_finite() && p[1].is_finite());
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in all {
        for a in 0..2 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let w = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(f64::MIN_POSITIVE) * 1.1;
    let mid = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
    let map = |p: &[f64; 2]| {
        (
            ((p[0] - mid[0]) / w + 0.5) * SIZE,
            (0.5 - (p[1] - mid[1]) / w) * SIZE,
        )
    };
    let line = |pts: &[[f64; 2]], colour: &str| {
        let s: Vec<String> = pts
            .iter()
            .filter(|p| p[0].is_finite() && p[1].is_finite())
            .map(|p| {
                let (x, y) = map(p);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        format!("<polyline fill=\"none\" stroke=\"{colour}\" stroke-width=\"1\" points=\"{}\"/>\n", s.join(" "))
    };
    let mut out = String::new();
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">"
    )
    .unwrap();
    out.push_str(&line(&arch, "red"));
    out.push_str(&line(&curve, "black"));
    let (x, y) = map(&c.origin);
    writeln!(out, "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"3\" fill=\"black\"/>").unwrap();
    out.push_str("</svg>\n");
    Ok(out)
}
