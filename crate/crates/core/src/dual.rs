//! The dual sequence: limit points `G_m` of the barypolygonal sequences
//! driven by each derived parameter vector `t^(m)`.

use crate::affine::{centroid, AffinePoint, PointFamily};
use crate::barypolygonal::{limit_point, limit_weights, ParamVector};
use crate::derived::{derived_trace, DerivedTrace};
use crate::error::{Error, Result};

/// Limit point of the `t_m`-barypolygonal sequence of `family`.
pub fn dual_point(family: &PointFamily, t_m: &ParamVector) -> Result<AffinePoint> {
    limit_point(family, t_m)
}

/// Product-form weights of [`dual_point`]. They coincide with the next
/// derived parameter vector.
pub fn dual_weights(t_m: &ParamVector) -> Vec<f64> {
    limit_weights(t_m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualTrace {
    pub points: Vec<AffinePoint>,
    /// Distance of each `G_m` to the centroid of the family.
    pub distances: Vec<f64>,
    pub params_used: DerivedTrace,
    pub centroid: AffinePoint,
}

impl DualTrace {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_truncated(&self) -> bool {
        self.params_used.is_saturated()
    }
}

/// `G_0 .. G_M`, truncated where the derived trace saturates.
pub fn dual_trace(family: &PointFamily, t0: &ParamVector, steps: usize) -> Result<DualTrace> {
    if family.len() != t0.len() {
        return Err(Error::LengthMismatch { expected: family.len(), got: t0.len() });
    }
    let params_used = derived_trace(t0, steps);
    let c = centroid(family);
    let points = params_used.params.iter().map(|t| dual_point(family, t)).collect::<Result<Vec<_>>>()?;
    let distances = points.iter().map(|g| g.distance(&c)).collect();
    Ok(DualTrace { points, distances, params_used, centroid: c })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub distances: Vec<f64>,
    /// First `m` with `d_m < 1e-6`.
    pub first_below: Option<usize>,
    /// Every `d_m` vanishes (regular parameters): converged from the start,
    /// no rate to fit.
    pub immediate: bool,
    /// Least-squares slope of `ln d_m` against `m`, reported as the
    /// per-step factor `exp(slope)`.
    pub decay_rate: Option<f64>,
    /// Irregular `p >= 4`: centroid convergence is only conjectured there.
    pub conjectured: bool,
}

/// Distance threshold reported as `first_below`.
pub const CONVERGED_DISTANCE: f64 = 1e-6;
/// Distances that count as zero in the regular case.
pub const REGULAR_DISTANCE_TOL: f64 = 1e-12;

pub fn centroid_convergence_report(trace: &DualTrace, regularity_tol: f64) -> Result<ConvergenceReport> {
    let t0 = &trace.params_used.params[0];
    let p = t0.len();
    let regular = t0.is_regular(regularity_tol);
    if p == 2 && !regular {
        return Err(Error::Precondition(
            "dual sequence of an irregular two-point family is 2-periodic, not convergent".into(),
        ));
    }
    let d = &trace.distances;
    let first_below = d.iter().position(|&x| x < CONVERGED_DISTANCE);
    let conjectured = p >= 4 && !regular;
    if d.iter().all(|&x| x <= REGULAR_DISTANCE_TOL) {
        return Ok(ConvergenceReport {
            distances: d.clone(),
            first_below,
            immediate: true,
            decay_rate: None,
            conjectured,
        });
    }
    let scale = d.iter().copied().fold(0.0, f64::max);
    let floor = scale * 1e-13;
    let pts: Vec<(f64, f64)> =
        d.iter().enumerate().filter(|&(_, &x)| x > floor).map(|(m, &x)| (m as f64, x.ln())).collect();
    Ok(ConvergenceReport {
        distances: d.clone(),
        first_below,
        immediate: false,
        decay_rate: least_squares_slope(&pts).map(f64::exp),
        conjectured,
    })
}

fn least_squares_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derived::solve_alpha;

    fn tri() -> PointFamily {
        PointFamily::from_rows(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap()
    }

    fn pv(t: &[f64]) -> ParamVector {
        ParamVector::new(t.to_vec()).unwrap()
    }

    #[test]
    fn dual_point_examples() {
        let g = dual_point(&tri(), &ParamVector::regular(3, 0.42).unwrap()).unwrap();
        assert!(g.distance(&centroid(&tri())) < 1e-15);

        let t = pv(&[0.5, 1.0 / 3.0, 0.25]);
        let g = dual_point(&tri(), &t).unwrap();
        assert!((g.coords()[0] - 9.0 / 29.0).abs() < 1e-15);
        assert!((g.coords()[1] - 8.0 / 29.0).abs() < 1e-15);

        let next = crate::derived::derived_step(&t).interior().unwrap();
        assert_eq!(dual_weights(&t), next.as_slice());
    }

    #[test]
    fn trace_examples() {
        let t0 = pv(&[0.2, 0.3, 0.4]);
        let tr = dual_trace(&tri(), &t0, 0).unwrap();
        assert_eq!(tr.points, vec![limit_point(&tri(), &t0).unwrap()]);

        let seg = PointFamily::from_rows(&[[0.0, 0.0], [2.0, 1.0]]).unwrap();
        let tr = dual_trace(&seg, &pv(&[0.3, 0.7]), 10).unwrap();
        assert!(tr.points.iter().all(|g| g.distance(&tr.points[0]) < 1e-12));

        let tr = dual_trace(&seg, &pv(&[0.3, 0.5]), 10).unwrap();
        assert!(tr.points[0].distance(&tr.points[1]) > 1e-3);
        for m in 0..tr.len() - 2 {
            assert!(tr.points[m].distance(&tr.points[m + 2]) <= 1e-12);
        }
    }

    #[test]
    fn regular_report_is_immediate() {
        let tr = dual_trace(&tri(), &ParamVector::regular(3, 0.2).unwrap(), 30).unwrap();
        let rep = centroid_convergence_report(&tr, 1e-12).unwrap();
        assert!(rep.immediate);
        assert_eq!(rep.first_below, Some(0));
        assert!(rep.decay_rate.is_none());
    }

    #[test]
    fn irregular_three_converges() {
        let tr = dual_trace(&tri(), &pv(&[0.2, 0.3, 0.4]), 200).unwrap();
        let rep = centroid_convergence_report(&tr, 1e-12).unwrap();
        assert!(!rep.immediate && !rep.conjectured);
        let m = rep.first_below.expect("gets below 1e-6");
        assert!(m < tr.len());
        assert!(rep.decay_rate.unwrap() < 1.0);
    }

    #[test]
    fn near_fixed_point_still_converges() {
        let a = solve_alpha(3).unwrap();
        let t0 = pv(&[1.0 - a + 1e-3, 1.0 - a, 1.0 - a - 1e-3]);
        let tr = dual_trace(&tri(), &t0, 200).unwrap();
        let rep = centroid_convergence_report(&tr, 1e-12).unwrap();
        assert!(rep.first_below.is_some());
    }

    #[test]
    fn two_point_irregular_report_rejected() {
        let seg = PointFamily::from_rows(&[[0.0], [1.0]]).unwrap();
        let tr = dual_trace(&seg, &pv(&[0.3, 0.5]), 4).unwrap();
        assert!(centroid_convergence_report(&tr, 1e-12).is_err());
    }

    #[test]
    fn p4_report_flagged_conjectured() {
        let sq = PointFamily::from_rows(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let tr = dual_trace(&sq, &pv(&[0.1, 0.2, 0.3, 0.4]), 200).unwrap();
        assert!(centroid_convergence_report(&tr, 1e-12).unwrap().conjectured);
    }
}
