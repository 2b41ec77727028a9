//! Points of a finite-dimensional real affine space, ordered point families
//! and the barycentric combinations used throughout the crate.

use crate::error::{Error, Result};

/// Default minimum pairwise distance for a family to count as distinct.
pub const DEFAULT_DISTINCTNESS_TOL: f64 = 1e-12;

/// A point with `d >= 1` finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinePoint {
    coords: Vec<f64>,
}

impl AffinePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Euclidean distance. Panics if dimensions differ.
    pub fn distance(&self, other: &AffinePoint) -> f64 {
        assert_eq!(self.dim(), other.dim(), "distance between points of different dimension");
        self.coords.iter().zip(&other.coords).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }
}

impl TryFrom<Vec<f64>> for AffinePoint {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        AffinePoint::new(coords)
    }
}

/// Ordered tuple of `p >= 2` points sharing one dimension.
///
/// Families built with [`PointFamily::new`] are pairwise distinct up to a
/// tolerance. Iterates of the barypolygon map are built with
/// [`PointFamily::from_iterate`], which keeps the shape checks but not the
/// distinctness one since iterates collapse toward a single point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointFamily {
    points: Vec<AffinePoint>,
    dim: usize,
}

impl PointFamily {
    pub fn new(points: Vec<AffinePoint>) -> Result<Self> {
        Self::with_tolerance(points, DEFAULT_DISTINCTNESS_TOL)
    }

    pub fn with_tolerance(points: Vec<AffinePoint>, tol: f64) -> Result<Self> {
        let family = Self::from_iterate(points)?;
        for i in 0..family.len() {
            for j in i + 1..family.len() {
                let distance = family.points[i].distance(&family.points[j]);
                if distance <= tol {
                    return Err(Error::PointsNotDistinct { i, j, distance });
                }
            }
        }
        Ok(family)
    }

    /// Builds a family without the distinctness check.
    pub fn from_iterate(points: Vec<AffinePoint>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::TooFewPoints { min: 2, got: points.len() });
        }
        let dim = points[0].dim();
        if let Some(bad) = points.iter().find(|pt| pt.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: bad.dim() });
        }
        Ok(Self { points, dim })
    }

    /// Convenience constructor from coordinate rows, with distinctness check.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let points = rows.iter().map(|r| AffinePoint::new(r.as_ref().to_vec())).collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    pub fn points(&self) -> &[AffinePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn iter(&self) -> std::slice::Iter<'_, AffinePoint> {
        self.points.iter()
    }

    /// Applies `f` to every point, keeping the family shape.
    pub fn map_points<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(&AffinePoint) -> AffinePoint,
    {
        Self::from_iterate(self.points.iter().map(f).collect())
    }
}

impl<'a> IntoIterator for &'a PointFamily {
    type Item = &'a AffinePoint;
    type IntoIter = std::slice::Iter<'a, AffinePoint>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

/// Strictly positive barycentric weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    weights: Vec<f64>,
}

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        for (index, &value) in weights.iter().enumerate() {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::NonPositiveWeight { index, value });
            }
        }
        Ok(Self { weights })
    }

    pub fn uniform(p: usize) -> Self {
        Self { weights: vec![1.0; p] }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Weighted barycenter. Weights are normalized by their sum before combining.
pub fn barycenter(family: &PointFamily, w: &WeightVector) -> Result<AffinePoint> {
    if w.len() != family.len() {
        return Err(Error::LengthMismatch { expected: family.len(), got: w.len() });
    }
    let total: f64 = w.as_slice().iter().sum();
    let mut coords = vec![0.0; family.dim()];
    for (pt, &wk) in family.iter().zip(w.as_slice()) {
        let lambda = wk / total;
        for (c, x) in coords.iter_mut().zip(pt.coords()) {
            *c += lambda * x;
        }
    }
    AffinePoint::new(coords)
}

/// Equal-weight barycenter.
pub fn centroid(family: &PointFamily) -> AffinePoint {
    barycenter(family, &WeightVector::uniform(family.len())).expect("uniform weights always match the family")
}

/// Largest pairwise Euclidean distance.
pub fn diameter(family: &PointFamily) -> f64 {
    let pts = family.points();
    let mut best = 0.0f64;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            best = best.max(pts[i].distance(&pts[j]));
        }
    }
    best
}
