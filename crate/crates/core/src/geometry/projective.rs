use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Scalar;

use super::argmax_modulus;

/// A point of projective space, stored with its largest-modulus coordinate
/// equal to 1 (lowest index on ties).
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousPoint<S: Scalar> {
    coords: Vec<S>,
}

impl<S: Scalar> HomogeneousPoint<S> {
    /// `None` for the zero vector.
    pub fn new(v: Vec<S>) -> Option<Self> {
        if v.is_empty() {
            return None;
        }
        let k = argmax_modulus(&v);
        let pivot = v[k];
        if pivot == S::zero() || !pivot.modulus().is_finite() {
            return None;
        }
        let mut coords: Vec<S> = v.iter().map(|x| *x / pivot).collect();
        coords[k] = S::one();
        Some(HomogeneousPoint { coords })
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Sine of the angle between representatives, `|a ∧ b| / (|a| |b|)`.
    pub fn distance(&self, other: &Self) -> f64 {
        let (a, b) = (&self.coords, &other.coords);
        let mut w = 0.0;
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                w += (a[i] * b[j] - a[j] * b[i]).modulus_squared();
            }
        }
        w.sqrt() / (linalg::norm(a) * linalg::norm(b))
    }
}

impl<S: Scalar> Serialize for HomogeneousPoint<S> {
    fn serialize<Z: serde::Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        crate::report::scalars(&self.coords).serialize(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChartProjection {
    /// `S³ → P(ℝ⁴)`, `p ↦ [p]`.
    SphereToProjective,
    /// Klein map `H³ → S³₊`, `x ↦ x / |x|` (Euclidean norm).
    HyperbolicToHemisphere,
}

/// Applies a chart projection to a model point in `ℝ⁴`. Points must lie on the
/// model within `1e-9`.
pub fn chart_projection(which: ChartProjection, p: &[f64]) -> Result<Vec<f64>> {
    if p.len() != 4 {
        return Err(Error::OffModel(format!("expected 4 coordinates, got {}", p.len())));
    }
    let euclid = p.iter().map(|x| x * x).sum::<f64>().sqrt();
    match which {
        ChartProjection::SphereToProjective => {
            if (euclid - 1.0).abs() > 1e-9 {
                return Err(Error::OffModel(format!("|p| = {euclid}, not on S³")));
            }
            let hp = HomogeneousPoint::new(p.to_vec()).ok_or_else(|| Error::OffModel("zero vector".into()))?;
            Ok(hp.coords().to_vec())
        }
        ChartProjection::HyperbolicToHemisphere => {
            let lorentz = -p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3];
            if (lorentz + 1.0).abs() > 1e-9 * p[0].abs().max(1.0).powi(2) || p[0] <= 0.0 {
                return Err(Error::OffModel(format!(
                    "Lorentz norm {lorentz}, x0 = {}: not on H³",
                    p[0]
                )));
            }
            Ok(p.iter().map(|x| x / euclid).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_picks_largest_coordinate() {
        let p = HomogeneousPoint::new(vec![2.0, -4.0, 1.0]).unwrap();
        assert_eq!(p.coords(), &[-0.5, 1.0, -0.25]);
        let q = HomogeneousPoint::new(vec![3.0, 3.0]).unwrap();
        assert_eq!(q.coords(), &[1.0, 1.0]);
        assert!(HomogeneousPoint::new(vec![0.0, 0.0]).is_none());
    }

    #[test]
    fn projections() {
        let north = [1.0, 0.0, 0.0, 0.0];
        assert_eq!(chart_projection(ChartProjection::SphereToProjective, &north).unwrap(), north);
        assert_eq!(chart_projection(ChartProjection::HyperbolicToHemisphere, &north).unwrap(), north);
        let s = 0.5f64.sqrt();
        let a = chart_projection(ChartProjection::SphereToProjective, &[s, 0.0, -s, 0.0]).unwrap();
        let b = chart_projection(ChartProjection::SphereToProjective, &[-s, 0.0, s, 0.0]).unwrap();
        assert_eq!(a, b);
        let r: f64 = 0.8;
        let h = [r.cosh(), r.sinh(), 0.0, 0.0];
        let k = chart_projection(ChartProjection::HyperbolicToHemisphere, &h).unwrap();
        assert!(k[0] > 0.0 && (k.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-14);
        assert!(chart_projection(ChartProjection::SphereToProjective, &[2.0, 0.0, 0.0, 0.0]).is_err());
        assert!(chart_projection(ChartProjection::HyperbolicToHemisphere, &[-1.0, 0.0, 0.0, 0.0]).is_err());
    }
}
