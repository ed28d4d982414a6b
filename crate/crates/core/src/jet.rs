//! Truncated multivariate Taylor jets.
//!
//! A [`Jet`] holds the Taylor coefficients of a scalar quantity at a base point,
//! up to a fixed total degree. The coefficient of the multi-index `α` is
//! `∂^α f / α!`, so arithmetic on jets is arithmetic on truncated power series
//! in the displacement from the base point. Every derivative used elsewhere in
//! the crate (normals, Hessians, contact chains) is read off a jet.
//!
//! Coefficients are stored densely in graded order, which is a storage detail:
//! the semantics are those of a sparse map from multi-index to scalar with
//! absent entries equal to zero.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Jet order used when callers do not ask for something else.
pub const DEFAULT_ORDER: usize = 6;
/// Largest supported jet order.
pub const MAX_ORDER: usize = 16;

/// Exponent vector of a monomial, one entry per variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(nvars: usize) -> Self {
        MultiIndex(vec![0; nvars])
    }

    pub fn unit(index: usize, nvars: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        MultiIndex(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    /// `α!` as a float.
    pub fn factorial(&self) -> f64 {
        self.0.iter().map(|&e| factorial(e as usize)).product()
    }
}

impl From<&[u32]> for MultiIndex {
    fn from(e: &[u32]) -> Self {
        MultiIndex(e.to_vec())
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Monomial layout shared by all jets with the same `(nvars, order)`.
struct Shape {
    nvars: usize,
    order: usize,
    monomials: Vec<MultiIndex>,
    /// Offset of the first monomial of each degree; `degree_start[d+1]` ends it.
    degree_start: Vec<usize>,
    lookup: HashMap<Vec<u32>, usize>,
    /// `(i, j, k)`: monomial i times monomial j is monomial k.
    products: Vec<(u32, u32, u32)>,
    /// Per variable: `(src, dst, factor)` so that `∂_v` sends `c[src]` to
    /// `factor * c[src]` at `dst`.
    partials: Vec<Vec<(u32, u32, f64)>>,
}

impl Shape {
    fn build(nvars: usize, order: usize) -> Shape {
        let mut monomials = Vec::new();
        let mut degree_start = Vec::with_capacity(order + 2);
        for d in 0..=order {
            degree_start.push(monomials.len());
            let mut current = vec![0u32; nvars];
            push_compositions(d as u32, 0, &mut current, &mut monomials);
        }
        degree_start.push(monomials.len());

        let lookup: HashMap<Vec<u32>, usize> = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.0.clone(), i))
            .collect();

        let mut products = Vec::new();
        for (i, a) in monomials.iter().enumerate() {
            let da = a.degree();
            for (j, b) in monomials.iter().enumerate() {
                if da + b.degree() > order {
                    // monomials are graded, nothing further fits
                    if b.degree() > order - da {
                        break;
                    }
                    continue;
                }
                let sum: Vec<u32> = a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect();
                products.push((i as u32, j as u32, lookup[&sum] as u32));
            }
        }

        let mut partials = vec![Vec::new(); nvars];
        for (src, m) in monomials.iter().enumerate() {
            for (v, list) in partials.iter_mut().enumerate() {
                let e = m.0[v];
                if e == 0 {
                    continue;
                }
                let mut lowered = m.0.clone();
                lowered[v] -= 1;
                list.push((src as u32, lookup[&lowered] as u32, e as f64));
            }
        }

        Shape {
            nvars,
            order,
            monomials,
            degree_start,
            lookup,
            products,
            partials,
        }
    }

    fn len(&self) -> usize {
        self.monomials.len()
    }

    fn len_through(&self, degree: usize) -> usize {
        self.degree_start[degree + 1]
    }
}

fn push_compositions(remaining: u32, var: usize, current: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    let n = current.len();
    if var + 1 == n {
        current[var] = remaining;
        out.push(MultiIndex(current.clone()));
        current[var] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        current[var] = e;
        push_compositions(remaining - e, var + 1, current, out);
    }
    current[var] = 0;
}

fn shape(nvars: usize, order: usize) -> Arc<Shape> {
    static CACHE: OnceLock<RwLock<HashMap<(usize, usize), Arc<Shape>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(s) = cache.read().expect("jet shape cache poisoned").get(&(nvars, order)) {
        return s.clone();
    }
    let built = Arc::new(Shape::build(nvars, order));
    cache
        .write()
        .expect("jet shape cache poisoned")
        .entry((nvars, order))
        .or_insert(built)
        .clone()
}

/// A truncated Taylor expansion in `nvars` variables up to total degree `order`.
#[derive(Clone)]
pub struct Jet<S: Scalar> {
    shape: Arc<Shape>,
    coeffs: Vec<S>,
}

impl<S: Scalar> fmt::Debug for Jet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut map = f.debug_map();
        for (m, c) in self.terms() {
            map.entry(&m.0, &c);
        }
        map.finish()
    }
}

impl<S: Scalar> PartialEq for Jet<S> {
    fn eq(&self, other: &Self) -> bool {
        self.nvars() == other.nvars() && self.order() == other.order() && self.coeffs == other.coeffs
    }
}

impl<S: Scalar> Jet<S> {
    fn check_shape(nvars: usize, order: usize) {
        assert!(nvars >= 1, "a jet needs at least one variable");
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
    }

    pub fn zero(nvars: usize, order: usize) -> Self {
        Self::check_shape(nvars, order);
        let shape = shape(nvars, order);
        let coeffs = vec![S::zero(); shape.len()];
        Jet { shape, coeffs }
    }

    /// The constant function `c`.
    pub fn constant(c: S, nvars: usize, order: usize) -> Self {
        let mut j = Self::zero(nvars, order);
        j.coeffs[0] = c;
        j
    }

    /// The coordinate function `x^index`, expanded at `base`.
    pub fn variable(index: usize, base: S, nvars: usize, order: usize) -> Result<Self> {
        if index >= nvars {
            return Err(Error::IndexOutOfRange { index, nvars });
        }
        let mut j = Self::constant(base, nvars, order);
        if order >= 1 {
            j.coeffs[1 + index] = S::one();
        }
        Ok(j)
    }

    /// Coordinate jets for every variable at `point`.
    pub fn variables(point: &[S], order: usize) -> Vec<Self> {
        let n = point.len();
        (0..n)
            .map(|i| Self::variable(i, point[i], n, order).expect("index in range"))
            .collect()
    }

    /// Builds a jet from `(multi-index, coefficient)` pairs; indices above the
    /// order are dropped.
    pub fn from_terms<I>(nvars: usize, order: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, S)>,
    {
        let mut j = Self::zero(nvars, order);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::ShapeMismatch(e.len(), order, nvars, order));
            }
            if e.iter().map(|&x| x as usize).sum::<usize>() > order {
                continue;
            }
            let k = j.shape.lookup[&e];
            j.coeffs[k] += c;
        }
        Ok(j)
    }

    pub fn nvars(&self) -> usize {
        self.shape.nvars
    }

    pub fn order(&self) -> usize {
        self.shape.order
    }

    /// Value at the base point.
    pub fn value(&self) -> S {
        self.coeffs[0]
    }

    /// Coefficient of the given multi-index (zero above the order).
    pub fn coeff(&self, exponents: &[u32]) -> S {
        self.shape
            .lookup
            .get(exponents)
            .map(|&k| self.coeffs[k])
            .unwrap_or_else(S::zero)
    }

    /// Partial derivative `∂^α f` at the base point.
    pub fn derivative(&self, exponents: &[u32]) -> S {
        let alpha = MultiIndex::from(exponents);
        self.coeff(exponents) * S::lift(alpha.factorial())
    }

    /// Gradient at the base point.
    pub fn gradient(&self) -> Vec<S> {
        (0..self.nvars())
            .map(|i| {
                if self.order() >= 1 {
                    self.coeffs[1 + i]
                } else {
                    S::zero()
                }
            })
            .collect()
    }

    /// Nonzero terms in graded order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, S)> + '_ {
        self.shape
            .monomials
            .iter()
            .zip(self.coeffs.iter().copied())
            .filter(|(_, c)| *c != S::zero())
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.modulus()).fold(0.0, f64::max)
    }

    /// Drops every term of degree above `order`.
    pub fn truncate(&self, order: usize) -> Self {
        if order >= self.order() {
            return self.clone();
        }
        let shape = shape(self.nvars(), order);
        let coeffs = self.coeffs[..shape.len()].to_vec();
        Jet { shape, coeffs }
    }

    /// Re-embeds the jet at a higher order, padding with zeros. Only meaningful
    /// when the caller knows the missing terms vanish (constants, polynomials).
    pub fn pad(&self, order: usize) -> Self {
        if order <= self.order() {
            return self.truncate(order);
        }
        let mut out = Self::zero(self.nvars(), order);
        out.coeffs[..self.coeffs.len()].copy_from_slice(&self.coeffs);
        out
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.nvars() != other.nvars() || self.order() != other.order() {
            return Err(Error::ShapeMismatch(
                self.nvars(),
                self.order(),
                other.nvars(),
                other.order(),
            ));
        }
        Ok(())
    }

    /// Brings two jets to their common (lower) order.
    fn align(a: &Self, b: &Self) -> (Self, Self) {
        assert_eq!(a.nvars(), b.nvars(), "jets over different variable counts");
        let order = a.order().min(b.order());
        (a.truncate(order), b.truncate(order))
    }

    pub fn scale(&self, c: S) -> Self {
        Jet {
            shape: self.shape.clone(),
            coeffs: self.coeffs.iter().map(|&x| x * c).collect(),
        }
    }

    pub fn add_const(&self, c: S) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += c;
        out
    }

    /// Shape-checked product.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(self.mul_same(other))
    }

    fn mul_same(&self, other: &Self) -> Self {
        let mut coeffs = vec![S::zero(); self.coeffs.len()];
        for &(i, j, k) in &self.shape.products {
            let a = self.coeffs[i as usize];
            if a == S::zero() {
                continue;
            }
            coeffs[k as usize] += a * other.coeffs[j as usize];
        }
        Jet {
            shape: self.shape.clone(),
            coeffs,
        }
    }

    /// `∂f/∂x^var`, one order lower.
    pub fn partial(&self, var: usize) -> Result<Self> {
        if self.order() == 0 {
            return Err(Error::ZeroOrder);
        }
        if var >= self.nvars() {
            return Err(Error::IndexOutOfRange {
                index: var,
                nvars: self.nvars(),
            });
        }
        let mut out = Self::zero(self.nvars(), self.order() - 1);
        let n = out.coeffs.len();
        for &(src, dst, factor) in &self.shape.partials[var] {
            let dst = dst as usize;
            if dst < n {
                out.coeffs[dst] += self.coeffs[src as usize] * S::lift(factor);
            }
        }
        Ok(out)
    }

    /// Taylor expansion of `f ∘ self` where `f_taylor[k]` is the k-th Taylor
    /// coefficient of `f` at `self.value()` (Horner evaluation in `self - value`).
    pub fn compose_scalar(&self, f_taylor: &[S]) -> Result<Self> {
        let n = self.order();
        if f_taylor.len() < n + 1 {
            return Err(Error::InsufficientTaylor {
                needed: n + 1,
                got: f_taylor.len(),
            });
        }
        let mut delta = self.clone();
        delta.coeffs[0] = S::zero();
        let mut acc = Self::constant(f_taylor[n], self.nvars(), n);
        for k in (0..n).rev() {
            acc = acc.mul_same(&delta);
            acc.coeffs[0] += f_taylor[k];
        }
        Ok(acc)
    }

    /// Substitutes `displacement[i]` for `x^i - base^i`: the result is the jet
    /// of `self ∘ (base + displacement)` at the displacements' base point.
    /// Constant terms of the displacements are ignored.
    pub fn compose(&self, displacement: &[Self]) -> Result<Self> {
        if displacement.len() != self.nvars() {
            return Err(Error::ShapeMismatch(
                displacement.len(),
                0,
                self.nvars(),
                self.order(),
            ));
        }
        let first = displacement.first().ok_or(Error::ZeroOrder)?;
        let (inner_vars, inner_order) = (first.nvars(), first.order());
        for d in displacement {
            if d.nvars() != inner_vars {
                return Err(Error::ShapeMismatch(d.nvars(), d.order(), inner_vars, inner_order));
            }
        }
        let order = displacement.iter().map(|d| d.order()).min().unwrap_or(0);
        // powers[i][k] = δ_i^k
        let powers: Vec<Vec<Self>> = displacement
            .iter()
            .map(|d| {
                let mut d = d.truncate(order);
                d.coeffs[0] = S::zero();
                let mut p = vec![Self::constant(S::one(), inner_vars, order)];
                for k in 1..=self.order().min(order) {
                    let next = p[k - 1].mul_same(&d);
                    p.push(next);
                }
                p
            })
            .collect();
        let mut out = Self::zero(inner_vars, order);
        for (m, c) in self.shape.monomials.iter().zip(&self.coeffs) {
            if *c == S::zero() || m.degree() > order {
                continue;
            }
            let mut term = Self::constant(*c, inner_vars, order);
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term = term.mul_same(&powers[i][e as usize]);
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Evaluates the truncated polynomial at a displacement from the base point.
    pub fn eval_at(&self, displacement: &[S]) -> S {
        let mut total = S::zero();
        for (m, c) in self.shape.monomials.iter().zip(&self.coeffs) {
            if *c == S::zero() {
                continue;
            }
            let mut t = *c;
            for (&e, &x) in m.0.iter().zip(displacement) {
                for _ in 0..e {
                    t *= x;
                }
            }
            total += t;
        }
        total
    }

    /// Highest-degree block of coefficients (used by order-consistency checks).
    pub fn degree_slice(&self, degree: usize) -> &[S] {
        let start = self.shape.degree_start[degree];
        let end = self.shape.len_through(degree);
        &self.coeffs[start..end]
    }

    pub fn recip(&self) -> Result<Self> {
        let c = self.value();
        if c == S::zero() {
            return Err(Error::Domain("division by a jet with zero constant term".into()));
        }
        let n = self.order();
        let inv = S::one() / c;
        let mut t = Vec::with_capacity(n + 1);
        let mut p = inv;
        for k in 0..=n {
            t.push(if k % 2 == 0 { p } else { -p });
            p *= inv;
        }
        self.compose_scalar(&t)
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        let (a, b) = Self::align(self, other);
        Ok(a.mul_same(&b.recip()?))
    }

    /// Integer power by repeated squaring (negative powers via the reciprocal).
    pub fn powi(&self, n: i64) -> Result<Self> {
        let base = if n < 0 { self.recip()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::constant(S::one(), self.nvars(), self.order());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_same(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul_same(&sq);
            }
        }
        Ok(acc)
    }

    /// Real power `self^p` through `exp(p log self)`; requires a positive real
    /// constant term in either field.
    pub fn powf(&self, p: f64) -> Result<Self> {
        if p.fract() == 0.0 && p.abs() < 1e9 {
            return self.powi(p as i64);
        }
        if !self.value().is_positive_real() {
            return Err(Error::Domain(format!(
                "non-integer power {p} needs a positive real base, got {}",
                self.value()
            )));
        }
        self.ln()?.scale(S::lift(p)).exp()
    }

    pub fn exp(&self) -> Result<Self> {
        let c = self.value().exp();
        let t: Vec<S> = (0..=self.order())
            .map(|k| c * S::lift(1.0 / factorial(k)))
            .collect();
        self.compose_scalar(&t)
    }

    pub fn ln(&self) -> Result<Self> {
        let c = self.value();
        if S::IS_COMPLEX {
            if c == S::zero() {
                return Err(Error::Domain("log of zero".into()));
            }
        } else if !(c.re() > 0.0) {
            return Err(Error::Domain(format!("log of non-positive real {}", c.re())));
        }
        let n = self.order();
        let inv = S::one() / c;
        let mut t = vec![c.ln()];
        let mut p = inv;
        for k in 1..=n {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            t.push(p * S::lift(sign / k as f64));
            p *= inv;
        }
        self.compose_scalar(&t)
    }

    /// `(c + t)^p = c^p Σ binom(p, k) (t/c)^k` with the given value of `c^p`.
    fn binomial_series(&self, c_pow: S, p: f64) -> Result<Self> {
        let c = self.value();
        let n = self.order();
        if n > 0 && c == S::zero() {
            return Err(Error::Domain(format!("power {p} is not analytic at zero")));
        }
        let mut t = Vec::with_capacity(n + 1);
        let mut binom = 1.0;
        let mut inv_pow = S::one();
        let inv = if n > 0 { S::one() / c } else { S::one() };
        for k in 0..=n {
            t.push(c_pow * S::lift(binom) * inv_pow);
            binom *= (p - k as f64) / (k as f64 + 1.0);
            inv_pow *= inv;
        }
        self.compose_scalar(&t)
    }

    pub fn sqrt(&self) -> Result<Self> {
        let c = self.value();
        if !S::IS_COMPLEX && c.re() < 0.0 {
            return Err(Error::Domain(format!("sqrt of negative real {}", c.re())));
        }
        self.binomial_series(c.sqrt(), 0.5)
    }

    /// Cube root: the real odd root over ℝ, the principal branch over ℂ.
    pub fn cbrt(&self) -> Result<Self> {
        let c = self.value();
        self.binomial_series(c.cbrt(), 1.0 / 3.0)
    }

    fn cyclic(&self, derivs: [S; 4]) -> Result<Self> {
        let t: Vec<S> = (0..=self.order())
            .map(|k| derivs[k % 4] * S::lift(1.0 / factorial(k)))
            .collect();
        self.compose_scalar(&t)
    }

    pub fn sin(&self) -> Result<Self> {
        let (s, c) = (self.value().sin(), self.value().cos());
        self.cyclic([s, c, -s, -c])
    }

    pub fn cos(&self) -> Result<Self> {
        let (s, c) = (self.value().sin(), self.value().cos());
        self.cyclic([c, -s, -c, s])
    }

    pub fn tan(&self) -> Result<Self> {
        if self.value().cos() == S::zero() {
            return Err(Error::Domain("tan at a pole".into()));
        }
        self.sin()?.try_div(&self.cos()?)
    }

    pub fn sinh(&self) -> Result<Self> {
        let (s, c) = (self.value().sinh(), self.value().cosh());
        self.cyclic([s, c, s, c])
    }

    pub fn cosh(&self) -> Result<Self> {
        let (s, c) = (self.value().sinh(), self.value().cosh());
        self.cyclic([c, s, c, s])
    }
}

impl<S: Scalar> Add for &Jet<S> {
    type Output = Jet<S>;
    fn add(self, rhs: &Jet<S>) -> Jet<S> {
        let (mut a, b) = Jet::align(self, rhs);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x += *y;
        }
        a
    }
}

impl<S: Scalar> Sub for &Jet<S> {
    type Output = Jet<S>;
    fn sub(self, rhs: &Jet<S>) -> Jet<S> {
        let (mut a, b) = Jet::align(self, rhs);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x -= *y;
        }
        a
    }
}

impl<S: Scalar> Mul for &Jet<S> {
    type Output = Jet<S>;
    fn mul(self, rhs: &Jet<S>) -> Jet<S> {
        let (a, b) = Jet::align(self, rhs);
        a.mul_same(&b)
    }
}

impl<S: Scalar> Neg for &Jet<S> {
    type Output = Jet<S>;
    fn neg(self) -> Jet<S> {
        self.scale(-S::one())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<S: Scalar> $tr for Jet<S> {
            type Output = Jet<S>;
            fn $m(self, rhs: Jet<S>) -> Jet<S> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Determinant of a square matrix of jets (rows of equal length).
///
/// Computed by Laplace expansion over column subsets, so only ring operations
/// are used and the result is exact to truncation order.
pub fn det<S: Scalar>(m: &[Vec<Jet<S>>]) -> Result<Jet<S>> {
    let k = m.len();
    for row in m {
        if row.len() != k {
            return Err(Error::NonSquare {
                rows: k,
                cols: row.len(),
            });
        }
    }
    if k == 0 {
        return Err(Error::NonSquare { rows: 0, cols: 0 });
    }
    let nvars = m[0][0].nvars();
    let order = m.iter().flatten().map(|j| j.order()).min().unwrap_or(0);
    // minors[mask] = det of rows 0..popcount(mask) against the columns in mask
    let mut minors: Vec<Option<Jet<S>>> = vec![None; 1 << k];
    minors[0] = Some(Jet::constant(S::one(), nvars, order));
    for mask in 1usize..(1 << k) {
        let r = mask.count_ones() as usize - 1;
        let mut acc = Jet::zero(nvars, order);
        for c in 0..k {
            if mask & (1 << c) == 0 {
                continue;
            }
            let rest = mask & !(1 << c);
            let sub = minors[rest].as_ref().expect("filled in increasing order");
            let above = (mask >> (c + 1)).count_ones();
            let term = &m[r][c] * sub;
            acc = if above % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        minors[mask] = Some(acc);
    }
    Ok(minors.pop().flatten().expect("full mask"))
}

/// Adjugate (transposed cofactor matrix) of a square jet matrix.
pub fn adjugate<S: Scalar>(m: &[Vec<Jet<S>>]) -> Result<Vec<Vec<Jet<S>>>> {
    let k = m.len();
    if k == 0 || m.iter().any(|r| r.len() != k) {
        return Err(Error::NonSquare {
            rows: k,
            cols: m.first().map_or(0, |r| r.len()),
        });
    }
    let nvars = m[0][0].nvars();
    let order = m.iter().flatten().map(|j| j.order()).min().unwrap_or(0);
    if k == 1 {
        return Ok(vec![vec![Jet::constant(S::one(), nvars, order)]]);
    }
    let mut adj = vec![vec![Jet::zero(nvars, order); k]; k];
    for i in 0..k {
        for j in 0..k {
            let minor: Vec<Vec<Jet<S>>> = (0..k)
                .filter(|&r| r != i)
                .map(|r| (0..k).filter(|&c| c != j).map(|c| m[r][c].clone()).collect())
                .collect();
            let d = det(&minor)?;
            // adj[j][i] = (-1)^(i+j) M_ij
            adj[j][i] = if (i + j) % 2 == 0 { d } else { -&d };
        }
    }
    Ok(adj)
}

/// `dφ(field) = Σ_j field[j] ∂φ/∂x^j`, one order lower than `phi`.
pub fn directional_derivative<S: Scalar>(phi: &Jet<S>, field: &[Jet<S>]) -> Result<Jet<S>> {
    if phi.order() == 0 {
        return Err(Error::ZeroOrder);
    }
    if field.len() != phi.nvars() {
        return Err(Error::ShapeMismatch(
            field.len(),
            phi.order(),
            phi.nvars(),
            phi.order(),
        ));
    }
    let order = phi.order() - 1;
    let mut acc = Jet::zero(phi.nvars(), order);
    for (j, f) in field.iter().enumerate() {
        if f.nvars() != phi.nvars() {
            return Err(Error::ShapeMismatch(f.nvars(), f.order(), phi.nvars(), phi.order()));
        }
        acc = &acc + &(&f.truncate(order) * &phi.partial(j)?);
    }
    Ok(acc)
}
