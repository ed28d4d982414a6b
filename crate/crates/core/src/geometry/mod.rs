//! Normal maps, Hessians, dual fronts and singular-set functions.
//!
//! The jet-level functions take the component jets of a map at a base point and
//! return jets; the spec-level wrappers evaluate a [`MapSpec`] at the orders
//! they need. Vectors in `K^{m}` and covectors in `(K^{m})^*` are both plain
//! component lists; `·` is the bilinear pairing `Σ a_k b_k`.

mod mapspec;
mod projective;

pub use mapspec::{Interval, MapKind, MapSpec};
pub use projective::{chart_projection, ChartProjection, HomogeneousPoint};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::{adjugate, det, Jet};
use crate::linalg;
use crate::scalar::Scalar;
use crate::tolerance::Tolerances;

/// `result[j][c] = ∂F^c/∂x^j`.
pub fn partials<S: Scalar>(f: &[Jet<S>]) -> Result<Vec<Vec<Jet<S>>>> {
    let n = f.first().ok_or(Error::ZeroOrder)?.nvars();
    (0..n).map(|j| f.iter().map(|c| c.partial(j)).collect()).collect()
}

/// Components of `det(c_1, …, c_d, ·)` for `d` column vectors in `K^{d+1}`.
pub fn wedge<S: Scalar>(columns: &[Vec<Jet<S>>]) -> Result<Vec<Jet<S>>> {
    let d = columns.len();
    let dim = d + 1;
    for c in columns {
        if c.len() != dim {
            return Err(Error::NonSquare { rows: c.len(), cols: dim });
        }
    }
    let first = &columns.first().ok_or(Error::NonSquare { rows: 0, cols: 0 })?[0];
    let order = columns.iter().flatten().map(Jet::order).min().unwrap_or(0);
    (0..dim)
        .map(|k| {
            if d == 0 {
                return Ok(Jet::constant(S::one(), first.nvars(), order));
            }
            let minor: Vec<Vec<Jet<S>>> = (0..dim)
                .filter(|&r| r != k)
                .map(|r| columns.iter().map(|c| c[r].clone()).collect())
                .collect();
            let m = det(&minor)?;
            Ok(if (k + d) % 2 == 0 { m } else { -&m })
        })
        .collect()
}

/// `Σ a_k b_k` in jet arithmetic.
pub fn pair_jets<S: Scalar>(a: &[Jet<S>], b: &[Jet<S>]) -> Jet<S> {
    let mut it = a.iter().zip(b).map(|(x, y)| x * y);
    let first = it.next().expect("nonempty vectors");
    it.fold(first, |acc, t| &acc + &t)
}

fn values<S: Scalar>(v: &[Jet<S>]) -> Vec<S> {
    v.iter().map(Jet::value).collect()
}

/// Normal map `ν_k = det(F_{x^1}, …, F_{x^n}, e_k)` of an affine map, one order
/// below `f`.
pub fn normal_jets<S: Scalar>(f: &[Jet<S>]) -> Result<Vec<Jet<S>>> {
    wedge(&partials(f)?)
}

/// Dual front `G = F_{x^1} ∧ ⋯ ∧ F_{x^n} ∧ F` of a homogeneous lift, one order
/// below `f`.
pub fn dual_front_jets<S: Scalar>(f: &[Jet<S>]) -> Result<Vec<Jet<S>>> {
    let mut cols = partials(f)?;
    let order = f[0].order().saturating_sub(1);
    cols.push(f.iter().map(|c| c.truncate(order)).collect());
    wedge(&cols)
}

/// `h_ij = ν · F_{x^i x^j}`, two orders below `f`.
pub fn hessian_jets<S: Scalar>(f: &[Jet<S>], nu: &[Jet<S>]) -> Result<Vec<Vec<Jet<S>>>> {
    let d1 = partials(f)?;
    let n = d1.len();
    let mut hess = vec![Vec::with_capacity(n); n];
    for i in 0..n {
        let d2 = partials(&d1[i])?;
        hess[i] = d2.iter().map(|col| pair_jets(nu, col)).collect();
    }
    Ok(hess)
}

/// Column of `adj(m)` with the largest norm at the base point; it spans the
/// kernel wherever `m` has corank one. Returns the column and its index.
pub fn kernel_field<S: Scalar>(m: &[Vec<Jet<S>>]) -> Result<(Vec<Jet<S>>, usize)> {
    let adj = adjugate(m)?;
    let k = adj.len();
    let mut best = 0;
    let mut best_norm = -1.0;
    for c in 0..k {
        let norm: f64 = (0..k).map(|r| adj[r][c].value().modulus_squared()).sum();
        if norm > best_norm {
            best = c;
            best_norm = norm;
        }
    }
    Ok(((0..k).map(|r| adj[r][best].clone()).collect(), best))
}

/// Affine chart of a projective vector: divides by the component of largest
/// modulus at the base point and drops it.
pub fn affine_chart<S: Scalar>(v: &[Jet<S>]) -> Result<(usize, Vec<Jet<S>>)> {
    let k = argmax_modulus(&values(v));
    if v[k].value() == S::zero() {
        return Err(Error::VanishingNormal);
    }
    let inv = v[k].recip()?;
    Ok((
        k,
        v.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, c)| c * &inv).collect(),
    ))
}

pub(crate) fn argmax_modulus<S: Scalar>(v: &[S]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        // strict comparison keeps the lowest index on ties
        if x.modulus() > v[best].modulus() {
            best = i;
        }
    }
    best
}

/// Jacobian `m[r][c] = ∂Φ^r/∂x^c`.
pub fn jacobian_jets<S: Scalar>(phi: &[Jet<S>]) -> Result<Vec<Vec<Jet<S>>>> {
    let d = partials(phi)?;
    Ok((0..phi.len()).map(|r| d.iter().map(|col| col[r].clone()).collect()).collect())
}

/// Which singular-set function a [`FrontJets`] carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LambdaKind {
    /// `λ = det(Φ_{x^1}, …, Φ_{x^n})` for `Φ: K^n → K^n`.
    Map,
    /// `λ = det(Φ_{x^1}, …, Φ_{x^n}, ν)` for a front `Φ: K^n → K^{n+1}`.
    Front,
}

/// `λ` and the null field of a map or front, as jets.
#[derive(Debug, Clone)]
pub struct FrontJets<S: Scalar> {
    pub which: LambdaKind,
    pub lambda: Jet<S>,
    pub null_field: Vec<Jet<S>>,
}

/// `λ` of an equidimensional map and its kernel field, one order below `phi`.
pub fn lambda_map_jets<S: Scalar>(phi: &[Jet<S>]) -> Result<FrontJets<S>> {
    let m = jacobian_jets(phi)?;
    let lambda = det(&m)?;
    let (null_field, _) = kernel_field(&m)?;
    Ok(FrontJets {
        which: LambdaKind::Map,
        lambda,
        null_field,
    })
}

/// `λ` of a front with normal `nu` and its null field, one order below `phi`.
pub fn lambda_front_jets<S: Scalar>(phi: &[Jet<S>], nu: &[Jet<S>]) -> Result<FrontJets<S>> {
    let d = partials(phi)?;
    let n = d.len();
    if phi.len() != n + 1 || nu.len() != n + 1 {
        return Err(Error::Kind(format!(
            "front needs {} components and normal entries, got {} and {}",
            n + 1,
            phi.len(),
            nu.len()
        )));
    }
    let order = d[0][0].order();
    let m: Vec<Vec<Jet<S>>> = (0..=n)
        .map(|r| {
            let mut row: Vec<Jet<S>> = d.iter().map(|col| col[r].clone()).collect();
            row.push(nu[r].truncate(order));
            row
        })
        .collect();
    let lambda = det(&m)?;
    let (mut null_field, _) = kernel_field(&m)?;
    null_field.truncate(n);
    Ok(FrontJets {
        which: LambdaKind::Front,
        lambda,
        null_field,
    })
}

/// Normal of a planar curve `J w` with `w = γ̇`, or `w = γ̇ / (t - t0)` when
/// `γ̇(t0)` vanishes (a coefficient shift of the jet). One or two orders below `f`.
pub fn curve_normal_jets<S: Scalar>(f: &[Jet<S>], tol: f64) -> Result<Vec<Jet<S>>> {
    if f.len() != 2 || f[0].nvars() != 1 {
        return Err(Error::Kind("curve normal needs a planar curve".into()));
    }
    let d: Vec<Jet<S>> = f.iter().map(|c| c.partial(0)).collect::<Result<_>>()?;
    let scale = f.iter().map(Jet::max_abs).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let speed = linalg::norm(&values(&d));
    let w = if speed > tol * scale {
        d
    } else {
        d.iter().map(shift_down).collect::<Result<_>>()?
    };
    Ok(vec![-&w[1], w[0].clone()])
}

/// `(g - g(t0)) / (t - t0)` for a one-variable jet, one order lower.
pub(crate) fn shift_down<S: Scalar>(g: &Jet<S>) -> Result<Jet<S>> {
    if g.order() == 0 {
        return Err(Error::ZeroOrder);
    }
    let order = g.order() - 1;
    Jet::from_terms(1, order, (0..=order).map(|k| (vec![k as u32], g.coeff(&[k as u32 + 1]))))
}

/// Per-point bundle of the Hessian quantities.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct HessianData<S: Scalar> {
    #[serde(skip)]
    pub point: Vec<S>,
    #[serde(skip)]
    pub nu: Vec<S>,
    #[serde(skip)]
    pub hess: Vec<Vec<S>>,
    #[serde(skip)]
    pub h: S,
    #[serde(skip)]
    pub grad_h: Vec<S>,
    #[serde(skip)]
    pub asymptotic: Option<Vec<S>>,
    pub nondegenerate: bool,
    /// Largest coefficient of the `h` jet, the reference for zero tests.
    pub scale: f64,
}

impl<S: Scalar> HessianData<S> {
    pub fn is_inflection(&self, tol: &Tolerances) -> bool {
        self.h.modulus() <= tol.singular * self.scale
    }
}

/// Normal (affine kinds) or dual front (projective kind) and the Hessian matrix
/// at order `order`.
pub fn hessian_system<S: Scalar>(
    spec: &MapSpec,
    point: &[S],
    order: usize,
) -> Result<(Vec<Jet<S>>, Vec<Vec<Jet<S>>>)> {
    let f = spec.jets(point, order + 2)?;
    let nu = match spec.kind {
        MapKind::Affine | MapKind::Curve => normal_map_from(spec, point, &f, order + 1)?,
        MapKind::Projective => dual_front_jets(&f)?,
        MapKind::PlaneMap => return Err(Error::Kind("a plane map has no Hessian".into())),
    };
    let hess = hessian_jets(&f, &nu)?;
    Ok((nu, hess))
}

fn normal_map_from<S: Scalar>(spec: &MapSpec, point: &[S], f: &[Jet<S>], order: usize) -> Result<Vec<Jet<S>>> {
    if let Some(nu) = spec.normal_jets(point, order)? {
        if linalg::norm(&values(&nu)) == 0.0 {
            return Err(Error::VanishingNormal);
        }
        return Ok(nu);
    }
    let nu = normal_jets(f)?;
    let scale = f.iter().map(Jet::max_abs).fold(0.0, f64::max);
    let n = spec.nvars() as i32;
    if linalg::norm(&values(&nu)) <= 1e-12 * scale.powi(n).max(f64::MIN_POSITIVE) {
        return Err(Error::RankDeficient);
    }
    Ok(nu)
}

/// Normal map of an affine map or curve as jets of the given order.
pub fn normal_map<S: Scalar>(spec: &MapSpec, point: &[S], order: usize) -> Result<Vec<Jet<S>>> {
    if !matches!(spec.kind, MapKind::Affine | MapKind::Curve) {
        return Err(Error::Kind(format!("normal map needs an affine map, got {}", spec.kind.as_str())));
    }
    let f = spec.jets(point, order + 1)?;
    normal_map_from(spec, point, &f, order)
}

pub fn hessian_data<S: Scalar>(spec: &MapSpec, point: &[S], tol: &Tolerances) -> Result<HessianData<S>> {
    let (nu, hess) = hessian_system(spec, point, 1)?;
    let h = det(&hess)?;
    let scale = h.max_abs().max(hess.iter().flatten().map(Jet::max_abs).fold(0.0, f64::max));
    let hess_vals: Vec<Vec<S>> = hess.iter().map(|r| values(r)).collect();
    let grad_h = h.gradient();
    let n = hess.len();
    let sv = linalg::singular_values(&hess_vals);
    let top = sv.first().copied().unwrap_or(0.0);
    let cut = (tol.rank * top).max(tol.rank * scale);
    let corank_one = sv.last().is_some_and(|&s| s <= cut) && (n < 2 || sv[n - 2] > cut);
    let asymptotic = if corank_one {
        let (field, _) = kernel_field(&hess)?;
        Some(unit_representative(&values(&field)))
    } else {
        None
    };
    Ok(HessianData {
        point: point.to_vec(),
        nu: values(&nu),
        hess: hess_vals,
        h: h.value(),
        nondegenerate: linalg::norm(&grad_h) > tol.zero * scale,
        grad_h,
        asymptotic,
        scale,
    })
}

/// Unit vector with its largest-modulus entry real and positive.
pub(crate) fn unit_representative<S: Scalar>(v: &[S]) -> Vec<S> {
    let k = argmax_modulus(v);
    let norm = linalg::norm(v);
    if norm == 0.0 {
        return v.to_vec();
    }
    let phase = v[k] / S::lift(v[k].modulus());
    v.iter().map(|x| *x / phase / S::lift(norm)).collect()
}

/// Affine Gauss map `[ν_p]`.
pub fn affine_gauss<S: Scalar>(spec: &MapSpec, point: &[S]) -> Result<HomogeneousPoint<S>> {
    let nu = normal_map(spec, point, 0)?;
    HomogeneousPoint::new(values(&nu)).ok_or(Error::VanishingNormal)
}

/// Dual front of a projective map (affine maps are lifted to `[F : 1]` first).
pub fn dual_front<S: Scalar>(spec: &MapSpec, point: &[S], order: usize) -> Result<Vec<Jet<S>>> {
    let lifted = spec.lifted()?;
    dual_front_jets(&lifted.jets(point, order + 1)?)
}

/// Normalizes a jet vector so its base value has unit norm.
fn unit_jets<S: Scalar>(v: &[Jet<S>]) -> Vec<Jet<S>> {
    let n = linalg::norm(&values(v));
    if n == 0.0 {
        return v.to_vec();
    }
    v.iter().map(|c| c.scale(S::lift(1.0 / n))).collect()
}

/// Largest of `|G·F|`, `|G·F_{x^j}|`, `|G_{x^j}·F|` at the base point, after
/// scaling both to unit-norm representatives. Needs order ≥ 1 jets.
pub fn incidence_check<S: Scalar>(f: &[Jet<S>], g: &[Jet<S>]) -> Result<f64> {
    if f.len() != g.len() {
        return Err(Error::ShapeMismatch(f.len(), 0, g.len(), 0));
    }
    let f = unit_jets(f);
    let g = unit_jets(g);
    let fv = values(&f);
    let gv = values(&g);
    let mut r = linalg::pair(&gv, &fv).modulus();
    let df = partials(&f)?;
    let dg = partials(&g)?;
    for (a, b) in df.iter().zip(&dg) {
        r = r.max(linalg::pair(&gv, &values(a)).modulus());
        r = r.max(linalg::pair(&values(b), &fv).modulus());
    }
    Ok(r)
}

/// Numbers describing a map or front at one point.
#[derive(Debug, Clone)]
pub struct FrontFrame<S: Scalar> {
    pub point: Vec<S>,
    pub which: LambdaKind,
    pub lambda: S,
    pub singular: bool,
    /// Null direction at singular points.
    pub null: Option<Vec<S>>,
}

fn frame_from<S: Scalar>(point: &[S], fj: &FrontJets<S>, tol: &Tolerances) -> FrontFrame<S> {
    let scale = fj.lambda.max_abs().max(f64::MIN_POSITIVE);
    let singular = fj.lambda.value().modulus() <= tol.singular * scale;
    FrontFrame {
        point: point.to_vec(),
        which: fj.which,
        lambda: fj.lambda.value(),
        singular,
        null: singular.then(|| unit_representative(&values(&fj.null_field))),
    }
}

/// Front jets of an affine map or curve: uses the declared normal, else the
/// shifted curve normal for curves; immersed points fall back to the cofactor normal.
pub fn front_system<S: Scalar>(spec: &MapSpec, point: &[S], order: usize, tol: &Tolerances) -> Result<FrontJets<S>> {
    let f = spec.jets(point, order + 1)?;
    let nu = match spec.normal_jets(point, order)? {
        Some(nu) => nu,
        None if spec.kind == MapKind::Curve => {
            // the shift loses one order, so evaluate one higher
            let f2 = spec.jets(point, order + 2)?;
            curve_normal_jets(&f2, tol.zero)?.iter().map(|c| c.truncate(order)).collect()
        }
        None => normal_map_from(spec, point, &f, order)?,
    };
    if linalg::norm(&values(&nu)) == 0.0 {
        return Err(Error::VanishingNormal);
    }
    lambda_front_jets(&f, &nu)
}

/// `λ = det(Φ_x, ν)` of a front at a point.
pub fn lambda_front<S: Scalar>(spec: &MapSpec, point: &[S], tol: &Tolerances) -> Result<FrontFrame<S>> {
    if !matches!(spec.kind, MapKind::Affine | MapKind::Curve) {
        return Err(Error::Kind("lambda_front needs an affine map or curve".into()));
    }
    let fj = front_system(spec, point, 1, tol)?;
    Ok(frame_from(point, &fj, tol))
}

/// `λ = det(dΦ)` of a plane map at a point.
pub fn lambda_map<S: Scalar>(spec: &MapSpec, point: &[S], tol: &Tolerances) -> Result<FrontFrame<S>> {
    if spec.kind != MapKind::PlaneMap {
        return Err(Error::Kind("lambda_map needs a plane map".into()));
    }
    let fj = lambda_map_jets(&spec.jets(point, 2)?)?;
    Ok(frame_from(point, &fj, tol))
}
