//! Contact chains and A_k verdicts.
//!
//! Given an admissible function `φ` (zero set `S`, `dφ ≠ 0`) and a vector field
//! `η` along `S`, the chain `φ^(j+1) = dφ^(j)(η̃)` for an extension `η̃`
//! measures how `η` meets `S`. With `k` the first index where `φ^(k)(p) ≠ 0`,
//! `η` is k-nondegenerate without contact of multiplicity k+1 exactly when the
//! Jacobian of `(φ, …, φ^(k-1))` has rank `k`. The three admissible functions
//! used here are the Hessian `h` (inflections), `λ` of a front (A_{k+1}
//! singularities) and `λ` of an equidimensional map (A_k-Morin singularities).

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{self, FrontJets, MapKind, MapSpec};
use crate::jet::{det, directional_derivative, Jet, DEFAULT_ORDER};
use crate::linalg;
use crate::report::{self, ScalarRepr};
use crate::scalar::Scalar;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdmissibleKind {
    HessianH,
    LambdaMap,
    LambdaFront,
}

/// The certificate behind a verdict.
#[derive(Debug, Clone)]
pub struct ContactChain<S: Scalar> {
    pub point: Vec<S>,
    pub function: AdmissibleKind,
    /// `φ(p), φ'(p), …` as far as the chain was evaluated.
    pub values: Vec<S>,
    /// Zero-test reference for each value.
    pub scales: Vec<f64>,
    /// First index with a nonzero value.
    pub k: Option<usize>,
    /// Gradients of `φ, …, φ^(k-1)` at `p`, one row each.
    pub jacobi: Vec<Vec<S>>,
    pub rank: usize,
    pub admissible: bool,
    /// The chain ran out of depth before a nonzero value appeared.
    pub truncated: bool,
    pub tolerances: Tolerances,
}

impl<S: Scalar> ContactChain<S> {
    pub fn is_zero(&self, j: usize) -> bool {
        self.values[j].modulus() <= self.tolerances.zero * self.scales[j]
    }
}

impl<S: Scalar> Serialize for ContactChain<S> {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            point: Vec<ScalarRepr>,
            function: AdmissibleKind,
            values: Vec<ScalarRepr>,
            scales: Vec<report::Real17>,
            k: Option<usize>,
            jacobi: Vec<Vec<ScalarRepr>>,
            rank: usize,
            admissible: bool,
            truncated: bool,
            tolerances: &'a Tolerances,
        }
        Repr {
            point: report::scalars(&self.point),
            function: self.function,
            values: report::scalars(&self.values),
            scales: report::reals(&self.scales),
            k: self.k,
            jacobi: report::matrix(&self.jacobi),
            rank: self.rank,
            admissible: self.admissible,
            truncated: self.truncated,
            tolerances: &self.tolerances,
        }
        .serialize(s)
    }
}

/// Frozen extension of `field`: `η̃ = η ∘ π`, where `π` slides along the fixed
/// direction `n = conj(∇φ(p)) / |∇φ(p)|²` onto the level set `{φ = φ(p)}`.
/// On that level set `η̃ = η`, and `η̃` is constant along `n`.
pub fn extend_field<S: Scalar>(field: &[Jet<S>], phi: &Jet<S>) -> Result<Vec<Jet<S>>> {
    let n = phi.nvars();
    if field.len() != n {
        return Err(Error::ShapeMismatch(field.len(), 0, n, phi.order()));
    }
    let order = field.iter().map(Jet::order).min().unwrap_or(0).min(phi.order());
    let grad = phi.gradient();
    let g2: f64 = grad.iter().map(|g| g.modulus_squared()).sum();
    if g2 == 0.0 {
        return Err(Error::Domain("extension needs dφ(p) ≠ 0".into()));
    }
    let dir: Vec<S> = grad.iter().map(|g| g.conjugate() / S::lift(g2)).collect();
    let delta = phi.truncate(order).add_const(-phi.value());
    let x: Vec<Jet<S>> = (0..n)
        .map(|i| Jet::variable(i, S::zero(), n, order).expect("index in range"))
        .collect();
    let displacement = |t: &Jet<S>| -> Vec<Jet<S>> {
        x.iter().zip(&dir).map(|(xi, d)| xi - &t.scale(*d)).collect()
    };
    let mut t = Jet::zero(n, order);
    for _ in 0..=order {
        let r = delta.compose(&displacement(&t))?;
        t = &t + &r;
    }
    let disp = displacement(&t);
    field.iter().map(|c| c.truncate(order).compose(&disp)).collect()
}

/// Evaluates the chain of `phi` along `field` (used as given) up to `max_k`.
pub fn contact_chain<S: Scalar>(
    phi: &Jet<S>,
    field: &[Jet<S>],
    function: AdmissibleKind,
    point: &[S],
    max_k: usize,
    tol: &Tolerances,
) -> Result<ContactChain<S>> {
    let n = phi.nvars();
    if field.len() != n {
        return Err(Error::ShapeMismatch(field.len(), 0, n, phi.order()));
    }
    let cap = phi.order().saturating_sub(2);
    let limit = max_k.min(cap);
    let scale0 = phi.max_abs().max(f64::MIN_POSITIVE);
    let field_norm = linalg::norm(&field.iter().map(Jet::value).collect::<Vec<_>>());
    let mut chain = ContactChain {
        point: point.to_vec(),
        function,
        values: vec![phi.value()],
        scales: vec![scale0],
        k: None,
        jacobi: Vec::new(),
        rank: 0,
        admissible: linalg::norm(&phi.gradient()) > tol.zero * scale0,
        truncated: false,
        tolerances: *tol,
    };
    if !chain.admissible {
        return Ok(chain);
    }
    let mut jets = vec![phi.clone()];
    for j in 1..=limit {
        let next = directional_derivative(&jets[j - 1], field)?;
        chain.values.push(next.value());
        chain.scales.push(scale0 * field_norm.powi(j as i32));
        jets.push(next);
        if !chain.is_zero(j) {
            chain.k = Some(j);
            break;
        }
    }
    let Some(k) = chain.k else {
        chain.truncated = true;
        return Ok(chain);
    };
    chain.jacobi = jets[..k].iter().map(Jet::gradient).collect();
    let scaled: Vec<Vec<S>> = chain
        .jacobi
        .iter()
        .zip(&chain.scales)
        .map(|(row, s)| row.iter().map(|x| *x / S::lift(*s)).collect())
        .collect();
    chain.rank = linalg::rank(&scaled, tol.rank, 0.0);
    Ok(chain)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Regular,
    /// A_m-inflection.
    Inflection(usize),
    /// A_m-singularity of a front.
    FrontSingularity(usize),
    /// A_m-Morin singularity.
    Morin(usize),
    DegenerateNondiagnosable,
}

impl Verdict {
    pub fn label(self) -> String {
        match self {
            Verdict::Regular => "regular".into(),
            Verdict::Inflection(m) => format!("A{m}-inflection"),
            Verdict::FrontSingularity(m) => format!("A{m}-singularity"),
            Verdict::Morin(m) => format!("A{m}-Morin"),
            Verdict::DegenerateNondiagnosable => "degenerate-nondiagnosable".into(),
        }
    }

    pub fn is_degenerate(self) -> bool {
        self == Verdict::DegenerateNondiagnosable
    }
}

impl Serialize for Verdict {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        s.serialize_str(&self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Degeneracy {
    /// `dφ(p) = 0`.
    NotAdmissible,
    /// The Jacobian of `(φ, …, φ^(k-1))` has rank below `k`.
    RankDeficient,
    /// No nonzero chain value within the available depth.
    Truncated,
    /// The null or asymptotic field vanishes at `p`.
    NullFieldVanishes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    Inflection,
    Front,
    Morin,
}

impl Family {
    fn verdict(self, k: usize) -> Verdict {
        match self {
            Family::Inflection => Verdict::Inflection(k + 1),
            Family::Front => Verdict::FrontSingularity(k + 1),
            Family::Morin => Verdict::Morin(k),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct SingularityClass<S: Scalar> {
    pub verdict: Verdict,
    pub k: Option<usize>,
    pub reason: Option<Degeneracy>,
    pub certificate: ContactChain<S>,
}

/// How the field is extended off the zero set before differentiating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Extension {
    /// [`extend_field`].
    #[default]
    Frozen,
    /// The adjugate field as computed (already defined off the zero set).
    AsGiven,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    /// Jet order of the admissible function.
    pub order: usize,
    /// Deepest chain index requested; defaults to `min(n, order - 2)`.
    pub max_k: Option<usize>,
    pub tol: Tolerances,
    pub extension: Extension,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            order: DEFAULT_ORDER,
            max_k: None,
            tol: Tolerances::default(),
            extension: Extension::Frozen,
        }
    }
}

fn classify_chain<S: Scalar>(
    point: &[S],
    phi: &Jet<S>,
    field: &[Jet<S>],
    function: AdmissibleKind,
    family: Family,
    opts: &ClassifyOptions,
) -> Result<SingularityClass<S>> {
    let tol = &opts.tol;
    let n = phi.nvars();
    let max_k = opts.max_k.unwrap_or(n.min(phi.order().saturating_sub(2)));
    let scale = phi.max_abs().max(f64::MIN_POSITIVE);
    let out = |verdict, reason, certificate| SingularityClass {
        verdict,
        k: None,
        reason,
        certificate,
    };
    let bare = ContactChain {
        point: point.to_vec(),
        function,
        values: vec![phi.value()],
        scales: vec![scale],
        k: None,
        jacobi: Vec::new(),
        rank: 0,
        admissible: true,
        truncated: false,
        tolerances: *tol,
    };
    if phi.value().modulus() > tol.singular * scale {
        return Ok(out(Verdict::Regular, None, bare));
    }
    if linalg::norm(&phi.gradient()) <= tol.zero * scale {
        let mut c = bare;
        c.admissible = false;
        return Ok(out(Verdict::DegenerateNondiagnosable, Some(Degeneracy::NotAdmissible), c));
    }
    let field_scale = field.iter().map(Jet::max_abs).fold(0.0, f64::max);
    let field_norm = linalg::norm(&field.iter().map(Jet::value).collect::<Vec<_>>());
    if field_norm <= 1e-12 * field_scale.max(f64::MIN_POSITIVE) || field_norm == 0.0 {
        return Ok(out(Verdict::DegenerateNondiagnosable, Some(Degeneracy::NullFieldVanishes), bare));
    }
    let field = match opts.extension {
        Extension::Frozen => extend_field(field, phi)?,
        Extension::AsGiven => field.to_vec(),
    };
    let mut chain = contact_chain(phi, &field, function, point, max_k, tol)?;
    if opts.max_k.is_some_and(|m| m > phi.order().saturating_sub(2)) && chain.k.is_none() {
        chain.truncated = true;
    }
    let Some(k) = chain.k else {
        return Ok(out(Verdict::DegenerateNondiagnosable, Some(Degeneracy::Truncated), chain));
    };
    // any field is 1-nondegenerate, so k = 1 needs no rank condition
    let (verdict, reason) = if k == 1 || chain.rank == k {
        (family.verdict(k), None)
    } else {
        (Verdict::DegenerateNondiagnosable, Some(Degeneracy::RankDeficient))
    };
    Ok(SingularityClass {
        verdict,
        k: Some(k),
        reason,
        certificate: chain,
    })
}

/// Inflection verdict from a Hessian matrix of jets: `φ = det`, field = the
/// adjugate column rule.
pub fn classify_hessian<S: Scalar>(
    point: &[S],
    hess: &[Vec<Jet<S>>],
    opts: &ClassifyOptions,
) -> Result<SingularityClass<S>> {
    let h = det(hess)?;
    let (xi, _) = geometry::kernel_field(hess)?;
    classify_chain(point, &h, &xi, AdmissibleKind::HessianH, Family::Inflection, opts)
}

/// Singularity verdict from `λ` and its null field.
pub fn classify_lambda<S: Scalar>(point: &[S], fj: &FrontJets<S>, opts: &ClassifyOptions) -> Result<SingularityClass<S>> {
    let (function, family) = match fj.which {
        geometry::LambdaKind::Map => (AdmissibleKind::LambdaMap, Family::Morin),
        geometry::LambdaKind::Front => (AdmissibleKind::LambdaFront, Family::Front),
    };
    classify_chain(point, &fj.lambda, &fj.null_field, function, family, opts)
}

/// Inflection verdict of an affine map, curve or projective map.
pub fn classify_inflection<S: Scalar>(spec: &MapSpec, point: &[S], opts: &ClassifyOptions) -> Result<SingularityClass<S>> {
    let (_, hess) = geometry::hessian_system(spec, point, opts.order)?;
    classify_hessian(point, &hess, opts)
}

/// A_{k+1}-singularity verdict of a front (affine map or curve with a normal).
pub fn classify_front_singularity<S: Scalar>(
    spec: &MapSpec,
    point: &[S],
    opts: &ClassifyOptions,
) -> Result<SingularityClass<S>> {
    if !matches!(spec.kind, MapKind::Affine | MapKind::Curve) {
        return Err(Error::Kind("front singularities need an affine map or curve".into()));
    }
    let fj = geometry::front_system(spec, point, opts.order, &opts.tol)?;
    classify_lambda(point, &fj, opts)
}

/// A_k-Morin verdict of an equidimensional map.
pub fn classify_morin<S: Scalar>(spec: &MapSpec, point: &[S], opts: &ClassifyOptions) -> Result<SingularityClass<S>> {
    if spec.kind != MapKind::PlaneMap {
        return Err(Error::Kind("Morin singularities need a plane map".into()));
    }
    let fj = geometry::lambda_map_jets(&spec.jets(point, opts.order + 1)?)?;
    classify_lambda(point, &fj, opts)
}

/// Morin verdict of the affine Gauss map `[ν]`, read in the affine chart of
/// the largest normal component.
pub fn classify_gauss_morin<S: Scalar>(spec: &MapSpec, point: &[S], opts: &ClassifyOptions) -> Result<SingularityClass<S>> {
    let nu = geometry::normal_map(spec, point, opts.order + 1)?;
    let (_, chart) = geometry::affine_chart(&nu)?;
    let fj = geometry::lambda_map_jets(&chart)?;
    classify_lambda(point, &fj, opts)
}

/// Front verdict of the dual front `g = [G]` in the affine chart of the largest
/// component of `G`, whose normal there is `(F_i)_{i≠k}`.
pub fn classify_dual_front<S: Scalar>(spec: &MapSpec, point: &[S], opts: &ClassifyOptions) -> Result<SingularityClass<S>> {
    let lifted = spec.lifted()?;
    let f = lifted.jets(point, opts.order + 2)?;
    let g = geometry::dual_front_jets(&f)?;
    let (k, chart) = geometry::affine_chart(&g)?;
    let normal: Vec<Jet<S>> = f
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != k)
        .map(|(_, c)| c.truncate(opts.order + 1))
        .collect();
    let fj = geometry::lambda_front_jets(&chart, &normal)?;
    classify_lambda(point, &fj, opts)
}

/// Inflection verdict of the affine Gauss map `𝒢 = [ν]` of a front: the
/// Hessian is still `ν·F_{x^i x^j}`, now read on the side of `𝒢`. Requires `𝒢`
/// to be an immersion at `p`, i.e. `(ν_{x^1}, …, ν_{x^n}, ν)` of full rank.
pub fn classify_normal_inflection<S: Scalar>(
    spec: &MapSpec,
    point: &[S],
    opts: &ClassifyOptions,
) -> Result<SingularityClass<S>> {
    if !matches!(spec.kind, MapKind::Affine | MapKind::Curve) {
        return Err(Error::Kind("the affine Gauss map needs an affine map or curve".into()));
    }
    let (nu, hess) = geometry::hessian_system(spec, point, opts.order)?;
    let mut rows: Vec<Vec<S>> = geometry::partials(&nu)?
        .iter()
        .map(|col| col.iter().map(Jet::value).collect())
        .collect();
    rows.push(nu.iter().map(Jet::value).collect());
    if linalg::rank(&rows, opts.tol.rank, 0.0) < rows.len() {
        return Err(Error::Hypothesis("the affine Gauss map is not an immersion here".into()));
    }
    classify_hessian(point, &hess, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Theorem {
    /// Inflections of `F` against Morin singularities of the affine Gauss map.
    A,
    /// Singularities of a front `F` against inflections of its normal.
    APrime,
    /// Inflections of `f` against singularities of the dual front.
    B,
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct DualityReport<S: Scalar> {
    pub theorem: Theorem,
    pub primary: SingularityClass<S>,
    pub dual: SingularityClass<S>,
    pub consistent: bool,
}

/// Expected dual verdict for a primary verdict under each theorem.
fn dual_of(theorem: Theorem, v: Verdict) -> Option<Verdict> {
    match (theorem, v) {
        (_, Verdict::Regular) => Some(Verdict::Regular),
        (Theorem::A, Verdict::Inflection(m)) => Some(Verdict::Morin(m - 1)),
        (Theorem::APrime, Verdict::FrontSingularity(m)) => Some(Verdict::Inflection(m)),
        (Theorem::B, Verdict::Inflection(m)) => Some(Verdict::FrontSingularity(m)),
        _ => None,
    }
}

/// Default theorem for a map kind: A for affine maps and curves without a
/// declared normal, A′ with one, B for projective maps.
pub fn default_theorem(spec: &MapSpec) -> Result<Theorem> {
    match spec.kind {
        MapKind::Affine | MapKind::Curve if spec.normal.is_some() => Ok(Theorem::APrime),
        MapKind::Affine | MapKind::Curve => Ok(Theorem::A),
        MapKind::Projective => Ok(Theorem::B),
        MapKind::PlaneMap => Err(Error::Kind("a plane map has no dual".into())),
    }
}

pub fn duality_check<S: Scalar>(
    spec: &MapSpec,
    point: &[S],
    theorem: Option<Theorem>,
    opts: &ClassifyOptions,
) -> Result<DualityReport<S>> {
    let theorem = match theorem {
        Some(t) => t,
        None => default_theorem(spec)?,
    };
    let (primary, dual) = match theorem {
        Theorem::A => (classify_inflection(spec, point, opts)?, classify_gauss_morin(spec, point, opts)?),
        Theorem::APrime => (
            classify_front_singularity(spec, point, opts)?,
            classify_normal_inflection(spec, point, opts)?,
        ),
        Theorem::B => (classify_inflection(spec, point, opts)?, classify_dual_front(spec, point, opts)?),
    };
    let consistent = match dual_of(theorem, primary.verdict) {
        Some(expected) => expected == dual.verdict,
        None => primary.verdict.is_degenerate() && dual.verdict.is_degenerate(),
    };
    Ok(DualityReport {
        theorem,
        primary,
        dual,
        consistent,
    })
}

/// Largest entry of `(ν_{x^1}; …; ν_{x^n}; ν)(F_{x^1}, …, F_{x^n}, ᵗν)` minus
/// its block form: `−h_ij` in the top-left block, zeros under it and `ν·ᵗν` in
/// the corner. The top-right column is unconstrained.
pub fn split_identity_residual(spec: &MapSpec, point: &[f64]) -> Result<f64> {
    let f = spec.jets(point, 3)?;
    let nu = geometry::normal_jets(&f)?;
    let hess = geometry::hessian_jets(&f, &nu)?;
    let dnu = geometry::partials(&nu)?;
    let df = geometry::partials(&f)?;
    let n = df.len();
    let val = |v: &[Jet<f64>]| v.iter().map(Jet::value).collect::<Vec<_>>();
    let nu0 = val(&nu);
    let mut rows: Vec<Vec<f64>> = dnu.iter().map(|r| val(r)).collect();
    rows.push(nu0.clone());
    let mut cols: Vec<Vec<f64>> = df.iter().map(|c| val(c)).collect();
    cols.push(nu0.clone());
    let scale = hess.iter().flatten().map(|h| h.value().abs()).fold(linalg::pair(&nu0, &nu0), f64::max);
    let mut worst: f64 = 0.0;
    for i in 0..=n {
        for j in 0..=n {
            let got = linalg::pair(&rows[i], &cols[j]);
            let want = match (i < n, j < n) {
                (true, true) => -hess[i][j].value(),
                (false, true) => 0.0,
                (false, false) => linalg::pair(&nu0, &nu0),
                (true, false) => continue,
            };
            worst = worst.max((got - want).abs() / scale);
        }
    }
    Ok(worst)
}
