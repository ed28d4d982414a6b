//! Map definition files.
//!
//! ```text
//! # comments and blank lines are ignored
//! name: torus
//! field: real
//! kind: affine
//! vars: u v
//! domain: u 0 2*pi periodic
//! domain: v 0 2*pi periodic
//! component: (2 + cos(v))*cos(u)
//! component: (2 + cos(v))*sin(u)
//! component: sin(v)
//! ```
//!
//! `kind` is one of `affine` (n+1 components), `projective` (n+2 homogeneous
//! components), `curve` (one variable, two components) or `planemap` (n
//! components). Fronts may add one `normal:` line per component. Domain bounds
//! are constant expressions written without spaces. Formatting a parsed spec
//! yields the canonical text, which parses back to the same spec.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{parse, Expr};
use crate::jet::Jet;
use crate::scalar::{Field, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    Affine,
    Projective,
    Curve,
    PlaneMap,
}

impl MapKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MapKind::Affine => "affine",
            MapKind::Projective => "projective",
            MapKind::Curve => "curve",
            MapKind::PlaneMap => "planemap",
        }
    }

    fn parse(s: &str) -> Option<MapKind> {
        [MapKind::Affine, MapKind::Projective, MapKind::Curve, MapKind::PlaneMap]
            .into_iter()
            .find(|k| k.as_str() == s)
    }

    /// Component count for `n` variables.
    pub fn components(self, n: usize) -> usize {
        match self {
            MapKind::Affine | MapKind::Curve => n + 1,
            MapKind::Projective => n + 2,
            MapKind::PlaneMap => n,
        }
    }
}

/// Closed parameter interval; periodic intervals are exactly one period.
#[derive(Debug, Clone, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub periodic: bool,
    lo_text: String,
    hi_text: String,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, periodic: bool) -> Self {
        Interval {
            lo,
            hi,
            periodic,
            lo_text: format!("{lo}"),
            hi_text: format!("{hi}"),
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Brings `x` into `[lo, hi)` when periodic.
    pub fn wrap(&self, x: f64) -> f64 {
        if !self.periodic {
            return x;
        }
        let w = self.width();
        let y = (x - self.lo).rem_euclid(w) + self.lo;
        if y >= self.hi {
            self.lo
        } else {
            y
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.periodic || (x >= self.lo && x <= self.hi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapSpec {
    pub name: String,
    pub field: Field,
    pub kind: MapKind,
    pub vars: Vec<String>,
    /// One entry per variable; `None` means unbounded.
    pub domain: Vec<Option<Interval>>,
    pub components: Vec<Expr>,
    pub normal: Option<Vec<Expr>>,
}

fn spec_err(line: usize, message: impl Into<String>) -> Error {
    Error::MapSpec {
        line,
        message: message.into(),
    }
}

fn constant(text: &str, line: usize) -> Result<f64> {
    let e = parse(text, &[]).map_err(|e| spec_err(line, format!("bound `{text}`: {e}")))?;
    e.eval::<f64>(&[])
        .map_err(|e| spec_err(line, format!("bound `{text}`: {e}")))
}

impl MapSpec {
    pub fn parse(text: &str) -> Result<MapSpec> {
        let mut name = None;
        let mut field = None;
        let mut kind = None;
        let mut vars: Option<Vec<String>> = None;
        let mut domains: Vec<(usize, String, Interval)> = Vec::new();
        let mut components = Vec::new();
        let mut normals = Vec::new();

        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once(':')
                .ok_or_else(|| spec_err(line, "expected `key: value`"))?;
            let value = value.trim();
            match key.trim() {
                "name" => name = Some(value.to_string()),
                "field" => {
                    field = Some(match value {
                        "real" => Field::Real,
                        "complex" => Field::Complex,
                        _ => return Err(spec_err(line, format!("unknown field `{value}`"))),
                    })
                }
                "kind" => {
                    kind = Some(
                        MapKind::parse(value)
                            .ok_or_else(|| spec_err(line, format!("unknown kind `{value}`")))?,
                    )
                }
                "vars" => {
                    let v: Vec<String> = value.split_whitespace().map(str::to_string).collect();
                    for name in &v {
                        let ok = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
                        if !ok || ["pi", "i"].contains(&name.as_str()) || crate::expr::Func::from_name(name).is_some() {
                            return Err(spec_err(line, format!("invalid variable name `{name}`")));
                        }
                    }
                    if v.is_empty() {
                        return Err(spec_err(line, "no variables declared"));
                    }
                    vars = Some(v);
                }
                "domain" => {
                    let parts: Vec<&str> = value.split_whitespace().collect();
                    let periodic = match parts.len() {
                        3 => false,
                        4 if parts[3] == "periodic" => true,
                        _ => return Err(spec_err(line, "expected `domain: var lo hi [periodic]`")),
                    };
                    let lo = constant(parts[1], line)?;
                    let hi = constant(parts[2], line)?;
                    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                        return Err(spec_err(line, "domain needs finite lo < hi"));
                    }
                    domains.push((
                        line,
                        parts[0].to_string(),
                        Interval {
                            lo,
                            hi,
                            periodic,
                            lo_text: parts[1].to_string(),
                            hi_text: parts[2].to_string(),
                        },
                    ));
                }
                "component" => components.push((line, value.to_string())),
                "normal" => normals.push((line, value.to_string())),
                other => return Err(spec_err(line, format!("unknown key `{other}`"))),
            }
        }

        let last = text.lines().count().max(1);
        let name = name.ok_or_else(|| spec_err(last, "missing `name`"))?;
        let kind = kind.ok_or_else(|| spec_err(last, "missing `kind`"))?;
        let vars = vars.ok_or_else(|| spec_err(last, "missing `vars`"))?;
        let field = field.unwrap_or(Field::Real);
        let names: Vec<&str> = vars.iter().map(String::as_str).collect();

        let mut domain = vec![None; vars.len()];
        for (line, var, interval) in domains {
            let idx = names
                .iter()
                .position(|v| *v == var)
                .ok_or_else(|| spec_err(line, format!("domain for undeclared variable `{var}`")))?;
            if domain[idx].is_some() {
                return Err(spec_err(line, format!("duplicate domain for `{var}`")));
            }
            domain[idx] = Some(interval);
        }

        let exprs = |list: Vec<(usize, String)>| -> Result<Vec<Expr>> {
            list.into_iter()
                .map(|(line, src)| parse(&src, &names).map_err(|e| spec_err(line, e.to_string())))
                .collect()
        };
        let components = exprs(components)?;
        let normals = exprs(normals)?;

        let n = vars.len();
        let m = kind.components(n);
        if kind == MapKind::Curve && n != 1 {
            return Err(spec_err(last, "a curve has exactly one variable"));
        }
        if components.len() != m {
            return Err(spec_err(
                last,
                format!("kind {} with {n} variable(s) needs {m} components, got {}", kind.as_str(), components.len()),
            ));
        }
        let normal = if normals.is_empty() {
            None
        } else {
            if !matches!(kind, MapKind::Affine | MapKind::Curve) {
                return Err(spec_err(last, "normal lines are only allowed for affine maps and curves"));
            }
            if normals.len() != m {
                return Err(spec_err(last, format!("need {m} normal components, got {}", normals.len())));
            }
            Some(normals)
        };
        let spec = MapSpec {
            name,
            field,
            kind,
            vars,
            domain,
            components,
            normal,
        };
        if field == Field::Real && spec.uses_imaginary_unit() {
            return Err(spec_err(last, "`i` needs `field: complex`"));
        }
        Ok(spec)
    }

    fn uses_imaginary_unit(&self) -> bool {
        fn has_i(e: &Expr) -> bool {
            match e {
                Expr::I => true,
                Expr::Const(_) | Expr::Pi | Expr::Var { .. } => false,
                Expr::Neg(a) | Expr::Call(_, a) => has_i(a),
                Expr::Binary(_, a, b) => has_i(a) || has_i(b),
            }
        }
        self.components.iter().chain(self.normal.iter().flatten()).any(has_i)
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn ncomponents(&self) -> usize {
        self.components.len()
    }

    pub fn var_names(&self) -> Vec<&str> {
        self.vars.iter().map(String::as_str).collect()
    }

    fn check_point<S>(&self, point: &[S]) -> Result<()> {
        if point.len() != self.nvars() {
            return Err(Error::PointArity {
                expected: self.nvars(),
                got: point.len(),
            });
        }
        Ok(())
    }

    /// Component values at `point`.
    pub fn eval<S: Scalar>(&self, point: &[S]) -> Result<Vec<S>> {
        self.check_point(point)?;
        self.components.iter().map(|c| c.eval(point)).collect()
    }

    /// Component jets at `point`.
    pub fn jets<S: Scalar>(&self, point: &[S], order: usize) -> Result<Vec<Jet<S>>> {
        self.check_point(point)?;
        let vars = Jet::variables(point, order);
        self.components.iter().map(|c| c.eval_jets(&vars)).collect()
    }

    /// Jets of the user-supplied normal, if any.
    pub fn normal_jets<S: Scalar>(&self, point: &[S], order: usize) -> Result<Option<Vec<Jet<S>>>> {
        self.check_point(point)?;
        let Some(normal) = &self.normal else {
            return Ok(None);
        };
        let vars = Jet::variables(point, order);
        normal.iter().map(|c| c.eval_jets(&vars)).collect::<Result<_>>().map(Some)
    }

    /// The homogeneous lift `[F : 1]` of an affine map (identity on projective maps).
    pub fn lifted(&self) -> Result<MapSpec> {
        match self.kind {
            MapKind::Projective => Ok(self.clone()),
            MapKind::Affine | MapKind::Curve => {
                let mut out = self.clone();
                out.kind = MapKind::Projective;
                out.components.push(Expr::Const(1.0));
                out.normal = None;
                Ok(out)
            }
            MapKind::PlaneMap => Err(Error::Kind("a plane map has no dual front".into())),
        }
    }

    /// Parses `"u=1,v=pi/2"` (or bare values in variable order) into a point.
    pub fn parse_point<S: Scalar>(&self, text: &str) -> Result<Vec<S>> {
        let parts: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        if parts.len() != self.nvars() {
            return Err(Error::PointArity {
                expected: self.nvars(),
                got: parts.len(),
            });
        }
        let mut point = vec![None; self.nvars()];
        for (pos, part) in parts.iter().enumerate() {
            let (idx, value) = match part.split_once('=') {
                Some((name, value)) => {
                    let name = name.trim();
                    let idx = self.vars.iter().position(|v| v == name).ok_or(Error::UndeclaredVariable {
                        name: name.to_string(),
                        offset: 0,
                    })?;
                    (idx, value)
                }
                None => (pos, *part),
            };
            let v: S = parse(value.trim(), &[])?.eval(&[])?;
            if point[idx].replace(v).is_some() {
                return Err(Error::Syntax {
                    offset: 0,
                    message: format!("coordinate `{}` given twice", self.vars[idx]),
                });
            }
        }
        Ok(point.into_iter().map(|v| v.expect("every coordinate set")).collect())
    }
}

impl fmt::Display for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "name: {}", self.name)?;
        writeln!(f, "field: {}", self.field.as_str())?;
        writeln!(f, "kind: {}", self.kind.as_str())?;
        writeln!(f, "vars: {}", self.vars.join(" "))?;
        for (var, d) in self.vars.iter().zip(&self.domain) {
            if let Some(d) = d {
                write!(f, "domain: {var} {} {}", d.lo_text, d.hi_text)?;
                if d.periodic {
                    f.write_str(" periodic")?;
                }
                writeln!(f)?;
            }
        }
        for c in &self.components {
            writeln!(f, "component: {c}")?;
        }
        for c in self.normal.iter().flatten() {
            writeln!(f, "normal: {c}")?;
        }
        Ok(())
    }
}
