//! The barypolygon map, its iterated sequence and the closed-form limit.
//!
//! Given points `A_1..A_p` and parameters `t_1..t_p` in (0, 1), one step
//! replaces `A_k` by `t_k A_k + (1 - t_k) A_{k+1}` (indices cyclic). The
//! iterates contract to the barycenter of the `A_k` weighted by
//! `prod_{i != k} (1 - t_i)`, see [`limit_point`].

use crate::affine::{barycenter, diameter, AffinePoint, PointFamily, WeightVector};
use crate::error::{Error, Result};

/// Stored-iterate cap used by [`iterate_sequence`].
pub const DEFAULT_TRACE_CAP: usize = 10_000;

/// Default diameter threshold for [`iterate_until_collapsed`].
pub const DEFAULT_STOP_DIAMETER: f64 = 1e-12;

/// `p >= 2` parameters, each strictly inside (0, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    t: Vec<f64>,
}

impl ParamVector {
    pub fn new(t: Vec<f64>) -> Result<Self> {
        if t.len() < 2 {
            return Err(Error::TooFewPoints { min: 2, got: t.len() });
        }
        for (index, &value) in t.iter().enumerate() {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::ParameterOutOfRange { index, value });
            }
        }
        Ok(Self { t })
    }

    /// All `p` components equal to `value`.
    pub fn regular(p: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; p])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.t
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// max - min over the components.
    pub fn spread(&self) -> f64 {
        let (lo, hi) = self.t.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        hi - lo
    }

    pub fn is_regular(&self, tol: f64) -> bool {
        self.spread() <= tol
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.t
    }
}

/// Iterates `B_0 = A, B_1, ..., B_N` of one barypolygonal sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonTrace {
    pub iterates: Vec<PointFamily>,
    pub params: ParamVector,
}

impl PolygonTrace {
    pub fn last(&self) -> &PointFamily {
        self.iterates.last().expect("a trace always holds its start family")
    }
}

fn check_len(family: &PointFamily, t: &ParamVector) -> Result<()> {
    if family.len() != t.len() {
        return Err(Error::LengthMismatch { expected: family.len(), got: t.len() });
    }
    Ok(())
}

/// One barypolygon step. The output is not required to be distinct.
pub fn barypolygon_step(current: &PointFamily, t: &ParamVector) -> Result<PointFamily> {
    check_len(current, t)?;
    let pts = current.points();
    let p = pts.len();
    let next = (0..p)
        .map(|k| {
            let tk = t.as_slice()[k];
            let a = pts[k].coords();
            let b = pts[(k + 1) % p].coords();
            let coords = a.iter().zip(b).map(|(x, y)| tk * x + (1.0 - tk) * y).collect();
            AffinePoint::new(coords)
        })
        .collect::<Result<Vec<_>>>()?;
    PointFamily::from_iterate(next)
}

/// `n` steps from `start`, keeping every iterate. Fails if `n + 1` exceeds
/// [`DEFAULT_TRACE_CAP`].
pub fn iterate_sequence(start: &PointFamily, t: &ParamVector, n: usize) -> Result<PolygonTrace> {
    iterate_sequence_capped(start, t, n, DEFAULT_TRACE_CAP)
}

pub fn iterate_sequence_capped(start: &PointFamily, t: &ParamVector, n: usize, cap: usize) -> Result<PolygonTrace> {
    check_len(start, t)?;
    if n.saturating_add(1) > cap {
        return Err(Error::TraceTooLong { requested: n.saturating_add(1), cap });
    }
    let mut iterates = Vec::with_capacity(n + 1);
    iterates.push(start.clone());
    for _ in 0..n {
        let next = barypolygon_step(iterates.last().unwrap(), t)?;
        iterates.push(next);
    }
    Ok(PolygonTrace { iterates, params: t.clone() })
}

/// Streaming variant: returns only `B_n`.
pub fn iterate_final(start: &PointFamily, t: &ParamVector, n: usize) -> Result<PointFamily> {
    check_len(start, t)?;
    let mut cur = start.clone();
    for _ in 0..n {
        cur = barypolygon_step(&cur, t)?;
    }
    Ok(cur)
}

/// Steps until `diameter(B_n) < eps` or `max_steps` is reached. Returns the
/// last family and the number of steps taken.
pub fn iterate_until_collapsed(
    start: &PointFamily,
    t: &ParamVector,
    eps: f64,
    max_steps: usize,
) -> Result<(PointFamily, usize)> {
    check_len(start, t)?;
    let mut cur = start.clone();
    let mut steps = 0;
    while steps < max_steps && diameter(&cur) >= eps {
        cur = barypolygon_step(&cur, t)?;
        steps += 1;
    }
    Ok((cur, steps))
}

/// Product-form limit weights `w_k = prod_{i != k} (1 - t_i)`.
pub fn limit_weights(t: &ParamVector) -> Vec<f64> {
    let t = t.as_slice();
    (0..t.len()).map(|k| t.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, ti)| 1.0 - ti).product()).collect()
}

/// Limit of the barypolygonal sequence of `family` with parameters `t`.
pub fn limit_point(family: &PointFamily, t: &ParamVector) -> Result<AffinePoint> {
    check_len(family, t)?;
    barycenter(family, &WeightVector::new(limit_weights(t))?)
}

/// `max_k |B_k^(n) - target|` for every iterate of the trace.
pub fn convergence_gap(trace: &PolygonTrace, target: &AffinePoint) -> Result<Vec<f64>> {
    let dim = trace.iterates[0].dim();
    if target.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: target.dim() });
    }
    Ok(trace.iterates.iter().map(|fam| fam.iter().map(|b| b.distance(target)).fold(0.0, f64::max)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::centroid;

    fn tri() -> PointFamily {
        PointFamily::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap()
    }

    fn rows(f: &PointFamily) -> Vec<Vec<f64>> {
        f.iter().map(|p| p.coords().to_vec()).collect()
    }

    fn assert_rows_close(got: &[Vec<f64>], want: &[&[f64]], tol: f64) {
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(want) {
            for (a, b) in g.iter().zip(w.iter()) {
                assert!((a - b).abs() <= tol, "{got:?} vs {want:?}");
            }
        }
    }

    #[test]
    fn param_vector_rejects_endpoints() {
        assert!(matches!(ParamVector::new(vec![0.5, 1.0]), Err(Error::ParameterOutOfRange { index: 1, .. })));
        assert!(ParamVector::new(vec![0.0, 0.5]).is_err());
        assert!(ParamVector::new(vec![f64::NAN, 0.5]).is_err());
        assert!(matches!(ParamVector::new(vec![0.5]), Err(Error::TooFewPoints { .. })));
    }

    #[test]
    fn step_examples() {
        let seg = PointFamily::from_rows(&[[0.0], [1.0]]).unwrap();
        let out = barypolygon_step(&seg, &ParamVector::regular(2, 0.5).unwrap()).unwrap();
        assert_eq!(rows(&out), vec![vec![0.5], vec![0.5]]);

        let medial = barypolygon_step(&tri(), &ParamVector::regular(3, 0.5).unwrap()).unwrap();
        assert_rows_close(&rows(&medial), &[&[0.5, 0.0], &[0.5, 0.5], &[0.0, 0.5]], 0.0);

        let t = ParamVector::new(vec![0.5, 1.0 / 3.0, 0.25]).unwrap();
        let out = barypolygon_step(&tri(), &t).unwrap();
        assert_rows_close(&rows(&out), &[&[0.5, 0.0], &[1.0 / 3.0, 2.0 / 3.0], &[0.0, 0.25]], 1e-15);
    }

    #[test]
    fn step_length_mismatch() {
        let t = ParamVector::regular(2, 0.5).unwrap();
        assert!(matches!(barypolygon_step(&tri(), &t), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn sequence_shapes() {
        let t = ParamVector::regular(3, 0.3).unwrap();
        let tr = iterate_sequence(&tri(), &t, 0).unwrap();
        assert_eq!(tr.iterates, vec![tri()]);
        let tr = iterate_sequence(&tri(), &t, 7).unwrap();
        assert_eq!(tr.iterates.len(), 8);
        assert_eq!(tr.last(), &iterate_final(&tri(), &t, 7).unwrap());
        assert!(matches!(
            iterate_sequence_capped(&tri(), &t, 10, 5),
            Err(Error::TraceTooLong { requested: 11, cap: 5 })
        ));
    }

    #[test]
    fn limit_point_examples() {
        let seg = PointFamily::from_rows(&[[0.0], [1.0]]).unwrap();
        let g = limit_point(&seg, &ParamVector::regular(2, 0.5).unwrap()).unwrap();
        assert_eq!(g.coords(), &[0.5]);

        let t = ParamVector::new(vec![0.5, 1.0 / 3.0, 0.25]).unwrap();
        let w = limit_weights(&t);
        for (a, b) in w.iter().zip([0.5, 3.0 / 8.0, 1.0 / 3.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        let g = limit_point(&tri(), &t).unwrap();
        assert!((g.coords()[0] - 9.0 / 29.0).abs() < 1e-15);
        assert!((g.coords()[1] - 8.0 / 29.0).abs() < 1e-15);

        // Cross-check against brute-force iteration.
        let b200 = iterate_final(&tri(), &t, 200).unwrap();
        for pt in &b200 {
            assert!(pt.distance(&g) < 1e-9);
        }
    }

    #[test]
    fn regular_limit_is_centroid() {
        let fam = PointFamily::from_rows(&[[0.0, 0.0], [4.0, 1.0], [3.0, 5.0], [-1.0, 2.0]]).unwrap();
        let g = limit_point(&fam, &ParamVector::regular(4, 0.37).unwrap()).unwrap();
        let c = centroid(&fam);
        assert!(g.distance(&c) < 1e-15);
    }

    #[test]
    fn gap_examples() {
        let seg = PointFamily::from_rows(&[[0.0], [1.0]]).unwrap();
        let t = ParamVector::regular(2, 0.5).unwrap();
        let target = AffinePoint::new(vec![0.5]).unwrap();
        let tr = iterate_sequence(&seg, &t, 1).unwrap();
        assert_eq!(convergence_gap(&tr, &target).unwrap(), vec![0.5, 0.0]);

        let single = PointFamily::from_iterate(vec![target.clone(), target.clone()]).unwrap();
        let tr = iterate_sequence(&single, &t, 0).unwrap();
        assert_eq!(convergence_gap(&tr, &target).unwrap(), vec![0.0]);

        let bad = AffinePoint::new(vec![0.5, 0.5]).unwrap();
        assert!(matches!(convergence_gap(&tr, &bad), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn stop_rule() {
        let t = ParamVector::regular(3, 0.5).unwrap();
        let (fam, steps) = iterate_until_collapsed(&tri(), &t, DEFAULT_STOP_DIAMETER, 10_000).unwrap();
        assert!(diameter(&fam) < DEFAULT_STOP_DIAMETER);
        assert!(steps > 0 && steps < 200);
    }
}
