//! JSON report helpers: floats are written with 17 significant digits so that
//! reports are byte-stable and round-trip exactly.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::scalar::Scalar;

/// A float serialized as `d.dddddddddddddddde±x` (17 significant digits);
/// non-finite values become `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real17(pub f64);

impl Serialize for Real17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let text = format!("{:.16e}", self.0);
        let raw = RawValue::from_string(text).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

/// A field element: a number over ℝ, `[re, im]` over ℂ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalarRepr {
    Real(Real17),
    Complex([Real17; 2]),
}

impl Serialize for ScalarRepr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ScalarRepr::Real(x) => x.serialize(s),
            ScalarRepr::Complex(z) => z.serialize(s),
        }
    }
}

pub fn scalar<S: Scalar>(x: S) -> ScalarRepr {
    if S::IS_COMPLEX {
        ScalarRepr::Complex([Real17(x.re()), Real17(x.im())])
    } else {
        ScalarRepr::Real(Real17(x.re()))
    }
}

pub fn scalars<S: Scalar>(v: &[S]) -> Vec<ScalarRepr> {
    v.iter().map(|x| scalar(*x)).collect()
}

pub fn matrix<S: Scalar>(m: &[Vec<S>]) -> Vec<Vec<ScalarRepr>> {
    m.iter().map(|r| scalars(r)).collect()
}

pub fn reals(v: &[f64]) -> Vec<Real17> {
    v.iter().map(|x| Real17(*x)).collect()
}

/// `serialize_with` adaptors for plain `f64` fields.
pub mod real17 {
    use super::Real17;
    use serde::{Serialize, Serializer};

    pub fn one<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        Real17(*x).serialize(s)
    }

    pub fn pair<S: Serializer>(x: &[f64; 2], s: S) -> Result<S::Ok, S::Error> {
        [Real17(x[0]), Real17(x[1])].serialize(s)
    }

    pub fn many<S: Serializer>(x: &[f64], s: S) -> Result<S::Ok, S::Error> {
        super::reals(x).serialize(s)
    }

    pub fn pairs<S: Serializer>(x: &[[f64; 2]], s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<[Real17; 2]> = x.iter().map(|p| [Real17(p[0]), Real17(p[1])]).collect();
        v.serialize(s)
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}
