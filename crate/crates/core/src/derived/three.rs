//! Analysis of the three-component conjugate system
//! `u' = 1 - v w`, `v' = 1 - u w`, `w' = 1 - u v`.

use super::{conjugate_map, derived_map, solve_alpha, ConjugateState, TwoSidedState};
use crate::error::{Error, Result};

/// Residual bound for the stationary-point checks.
pub const STATIONARY_RESIDUAL_TOL: f64 = 1e-12;

fn alpha3() -> f64 {
    solve_alpha(3).expect("p = 3 is supported")
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn require_three(trace: &[ConjugateState]) -> Result<()> {
    let first = trace.first().ok_or_else(|| Error::Precondition("empty trace".into()))?;
    if first.len() != 3 {
        return Err(Error::NotThreeComponents(first.len()));
    }
    Ok(())
}

/// The four fixed points of the conjugate system and the matching fixed
/// points of the derived system, with their one-step residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryPoints3 {
    pub conjugate: [[f64; 3]; 4],
    pub derived: [[f64; 3]; 4],
    pub conjugate_residuals: [f64; 4],
    pub derived_residuals: [f64; 4],
}

impl StationaryPoints3 {
    pub fn max_residual(&self) -> f64 {
        self.conjugate_residuals.iter().chain(&self.derived_residuals).copied().fold(0.0, f64::max)
    }
}

pub fn stationary_points3() -> Result<StationaryPoints3> {
    let a = alpha3();
    let conjugate = [[1.0, 1.0, 0.0], [0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [a, a, a]];
    let derived = conjugate.map(|u| u.map(|x| 1.0 - x));
    let conjugate_residuals = conjugate.map(|u| max_abs_diff(&conjugate_map(&u), &u));
    let derived_residuals = derived.map(|t| max_abs_diff(&derived_map(&t), &t));
    let report = StationaryPoints3 { conjugate, derived, conjugate_residuals, derived_residuals };
    if report.max_residual() > STATIONARY_RESIDUAL_TOL {
        return Err(Error::Precondition(format!(
            "stationary point residual {:e} above {STATIONARY_RESIDUAL_TOL:e}",
            report.max_residual()
        )));
    }
    Ok(report)
}

/// Linearization of the conjugate system at `(alpha, alpha, alpha)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport3 {
    pub alpha: f64,
    pub stationary: StationaryPoints3,
    /// Zero diagonal, `-alpha` off the diagonal.
    pub jacobian: [[f64; 3]; 3],
    /// `[-2 alpha, alpha, alpha]`.
    pub eigenvalues: [f64; 3],
    /// Monic characteristic polynomial from the matrix invariants,
    /// highest degree first.
    pub char_poly: [f64; 4],
    /// Expansion of `(X - alpha)^2 (X + 2 alpha)`, highest degree first.
    pub char_poly_expected: [f64; 4],
    pub spectral_radius: f64,
}

impl StabilityReport3 {
    pub fn char_poly_error(&self) -> f64 {
        max_abs_diff(&self.char_poly, &self.char_poly_expected)
    }

    pub fn is_unstable(&self) -> bool {
        self.spectral_radius > 1.0
    }
}

pub fn jacobian_eigen3() -> Result<StabilityReport3> {
    let a = alpha3();
    let stationary = stationary_points3()?;
    let j = [[0.0, -a, -a], [-a, 0.0, -a], [-a, -a, 0.0]];

    // det(X I - J) = X^3 - tr X^2 + (sum of principal 2-minors) X - det
    let trace = j[0][0] + j[1][1] + j[2][2];
    let minors = (j[0][0] * j[1][1] - j[0][1] * j[1][0])
        + (j[0][0] * j[2][2] - j[0][2] * j[2][0])
        + (j[1][1] * j[2][2] - j[1][2] * j[2][1]);
    let det = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) - j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0])
        + j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
    let char_poly = [1.0, -trace, minors, -det];

    // (X^2 - 2aX + a^2)(X + 2a) = X^3 - 3a^2 X + 2a^3
    let char_poly_expected = [1.0, 0.0, -3.0 * a * a, 2.0 * a * a * a];

    Ok(StabilityReport3 {
        alpha: a,
        stationary,
        jacobian: j,
        eigenvalues: [-2.0 * a, a, a],
        char_poly,
        char_poly_expected,
        spectral_radius: 2.0 * a,
    })
}

/// Number of conjugate steps until a start displaced from `(alpha_p, ...)`
/// by `delta` in every coordinate drifts more than `threshold` away in max
/// norm. `None` if it stays within `max_steps`.
pub fn escape_steps(p: usize, delta: f64, threshold: f64, max_steps: usize) -> Result<Option<usize>> {
    let a = solve_alpha(p)?;
    let mut u = vec![a + delta; p];
    for m in 1..=max_steps {
        u = conjugate_map(&u);
        if u.iter().map(|x| (x - a).abs()).fold(0.0, f64::max) > threshold {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// Whether the ascending order `u <= v <= w` of the first state holds at
/// every state of the trace.
pub fn order_check(trace: &[ConjugateState]) -> Result<bool> {
    require_three(trace)?;
    if !trace[0].is_sorted() {
        return Err(Error::UnsortedState);
    }
    Ok(trace.iter().all(ConjugateState::is_sorted))
}

/// Outcome of checking the halving bound on `w_{2q}/u_{2q} - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioBoundReport {
    /// `u_0 = w_0`: all ratios are identically one and the bound is vacuous.
    pub regular: bool,
    /// `w_{2q}/u_{2q} - 1` for every even index in the trace, evaluated
    /// without cancellation.
    pub gaps: Vec<f64>,
    pub positive: bool,
    /// `gap_q < (1/2)^q gap_0` for `q >= 1`.
    pub bound_holds: bool,
    /// `1 <= r_{m+2} <= r_m` for `r` in `v/u`, `w/v`, `w/u` and every `m`.
    pub ratios_monotone: bool,
    /// Largest `gap_q / ((1/2)^q gap_0)` over `q >= 1`.
    pub worst_bound_fraction: f64,
}

impl RatioBoundReport {
    pub fn holds(&self) -> bool {
        self.regular || (self.positive && self.bound_holds && self.ratios_monotone)
    }
}

pub fn ratio_bound_check(trace: &[ConjugateState]) -> Result<RatioBoundReport> {
    require_three(trace)?;
    if !trace[0].is_sorted() {
        return Err(Error::UnsortedState);
    }
    let first = trace[0].as_slice();
    if first[0] == first[2] {
        return Ok(RatioBoundReport {
            regular: true,
            gaps: vec![0.0; trace.len().div_ceil(2)],
            positive: true,
            bound_holds: true,
            ratios_monotone: true,
            worst_bound_fraction: 0.0,
        });
    }

    // Component differences follow v' - u' = w (v - u) and w' - v' = u (w - v)
    // exactly, so they are carried multiplicatively instead of subtracting
    // nearly equal components. The components come from a two-sided orbit so
    // the small ones keep their relative accuracy.
    let mut state = TwoSidedState::new(&trace[0]);
    let (mut d_vu, mut d_wv) = (first[1] - first[0], first[2] - first[1]);
    let mut excess = Vec::with_capacity(trace.len());
    for m in 0..trace.len() {
        if m > 0 {
            let prev = &state.u;
            let (nvu, nwv) = (prev[2] * d_vu, prev[0] * d_wv);
            d_vu = nvu;
            d_wv = nwv;
            state = state.step();
        }
        let [u, v] = [state.u[0], state.u[1]];
        excess.push([d_vu / u, d_wv / v, (d_vu + d_wv) / u]);
    }
    let gaps: Vec<f64> = excess.iter().step_by(2).map(|e| e[2]).collect();

    let g0 = gaps[0];
    let positive = gaps.iter().all(|&g| g > 0.0);
    let mut bound_holds = true;
    let mut worst = 0.0f64;
    let mut scale = 1.0;
    for &g in &gaps[1..] {
        scale *= 0.5;
        let bound = scale * g0;
        bound_holds &= g < bound;
        worst = worst.max(g / bound);
    }

    // Ratios r - 1 never grow over two steps and stay non-negative.
    let ratios_monotone = excess.windows(3).all(|win| win[0].iter().zip(&win[2]).all(|(a, b)| 0.0 <= *b && b <= a));

    Ok(RatioBoundReport { regular: false, gaps, positive, bound_holds, ratios_monotone, worst_bound_fraction: worst })
}

/// Max discrepancy between two direct conjugate steps and the linear form
/// `u'' = K u + C`, `w'' = K w + C` with `K = v - u v w`, `C = u w`.
pub fn km_cm_residual(state: &ConjugateState) -> Result<f64> {
    if state.len() != 3 {
        return Err(Error::NotThreeComponents(state.len()));
    }
    let [u, v, w] = [state.as_slice()[0], state.as_slice()[1], state.as_slice()[2]];
    let two = conjugate_map(&conjugate_map(state.as_slice()));
    let k = v - u * v * w;
    let c = u * w;
    Ok((two[0] - (k * u + c)).abs().max((two[2] - (k * w + c)).abs()))
}

/// How the comparison sequence was started.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TauInit {
    /// `tau = w_{m0}` because `u_{m0+1} > f(w_{m0})`.
    LargestComponent,
    /// `tau = f^{-1}(u_{m0+1}) = sqrt(1 - u_{m0+1})`.
    Preimage,
}

/// Comparison of the trace with the scalar orbit `tau_{m+1} = 1 - tau_m^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TauReport {
    pub start: usize,
    pub init: TauInit,
    /// `tau_{start}, tau_{start+1}, ...` aligned with the trace.
    pub tau: Vec<f64>,
    /// Number of inequalities checked across both families.
    pub checked: usize,
    /// Trace index of the first failed inequality.
    pub first_violation: Option<usize>,
}

impl TauReport {
    pub fn holds(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Checks `tau_{m0+2q} >= w_{m0+2q}` and `tau_{m0+2q+1} <= u_{m0+2q+1}` for
/// every index the trace covers. The state at `m0` must be sorted and lie in
/// `(0, alpha)^3`.
pub fn tau_comparison(trace: &[ConjugateState], m0: usize) -> Result<TauReport> {
    require_three(trace)?;
    if m0 + 1 >= trace.len() {
        return Err(Error::Precondition(format!(
            "trace of length {} too short for a comparison from index {m0}",
            trace.len()
        )));
    }
    let a = alpha3();
    let s = trace[m0].as_slice();
    if !trace[m0].is_sorted() {
        return Err(Error::UnsortedState);
    }
    if !s.iter().all(|&x| x > 0.0 && x < a) {
        return Err(Error::NotBelowAlpha);
    }

    let f = |x: f64| 1.0 - x * x;
    let w0 = s[2];
    let u1 = trace[m0 + 1].as_slice()[0];
    let (init, tau0, tau1) = if u1 > f(w0) {
        (TauInit::LargestComponent, w0, f(w0))
    } else {
        // f(tau0) = u1 exactly in real arithmetic; keep that equality rather
        // than round-tripping through the square root. tau0 >= w0 holds in
        // this branch, the max only absorbs sqrt rounding.
        (TauInit::Preimage, (1.0 - u1).sqrt().max(w0), u1)
    };

    let mut tau = vec![tau0, tau1];
    while tau.len() < trace.len() - m0 {
        let next = f(*tau.last().unwrap());
        tau.push(next);
    }

    let mut checked = 0;
    let mut first_violation = None;
    for (offset, &tv) in tau.iter().enumerate() {
        let st = trace[m0 + offset].as_slice();
        let ok = if offset % 2 == 0 { tv >= st[2] } else { tv <= st[0] };
        checked += 1;
        if !ok && first_violation.is_none() {
            first_violation = Some(m0 + offset);
        }
    }

    Ok(TauReport { start: m0, init, tau, checked, first_violation })
}

#[cfg(test)]
mod tests {
    use super::super::conjugate_trace;
    use super::*;

    fn cs(u: &[f64]) -> ConjugateState {
        ConjugateState::new(u.to_vec()).unwrap()
    }

    #[test]
    fn stationary_points() {
        let sp = stationary_points3().unwrap();
        assert!(sp.max_residual() <= 1e-12);
        let a = alpha3();
        assert_eq!(sp.conjugate[3], [a, a, a]);
        assert_eq!(sp.derived[0], [0.0, 0.0, 1.0]);
        assert_eq!(sp.conjugate_residuals[0], 0.0);
        assert!((sp.derived[3][0] - (1.0 - a)).abs() < 1e-16);
    }

    #[test]
    fn linearization() {
        let r = jacobian_eigen3().unwrap();
        assert!(r.char_poly_error() <= 1e-12);
        assert!(r.is_unstable());
        assert!((r.spectral_radius - (5f64.sqrt() - 1.0)).abs() < 1e-12);
        // (1, 1, 1) has eigenvalue -2 alpha: every row sums to -2 alpha.
        for row in r.jacobian {
            assert!((row.iter().sum::<f64>() + 2.0 * r.alpha).abs() < 1e-15);
        }
        // The other eigenvalues: (1, -1, 0) maps to alpha (1, -1, 0).
        let v = [1.0, -1.0, 0.0];
        for (i, row) in r.jacobian.iter().enumerate() {
            let jv: f64 = row.iter().zip(&v).map(|(a, b)| a * b).sum();
            assert!((jv - r.alpha * v[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn linearization_predicts_escape_time() {
        let steps = escape_steps(3, 1e-6, 1e-2, 60).unwrap().expect("escapes");
        // growth 2 alpha per step along (1, 1, 1)
        let predicted = (1e-2f64 / 1e-6).ln() / (2.0 * alpha3()).ln();
        assert!((steps as f64 - predicted).abs() < 3.0, "{steps} vs {predicted}");
    }

    #[test]
    fn order_examples() {
        let tr = conjugate_trace(&cs(&[0.2, 0.2, 0.2]), 10).unwrap();
        assert!(order_check(&tr.states).unwrap());
        let tr = conjugate_trace(&cs(&[0.5, 0.6, 0.7]), 50).unwrap();
        assert!(order_check(&tr.states).unwrap());
        assert_eq!(order_check(&[cs(&[0.7, 0.6, 0.5])]), Err(Error::UnsortedState));
        assert_eq!(order_check(&[cs(&[0.1, 0.2])]), Err(Error::NotThreeComponents(2)));
    }

    #[test]
    fn ratio_bound_examples() {
        for u0 in [[0.5, 0.6, 0.7], [0.1, 0.2, 0.9]] {
            let tr = conjugate_trace(&cs(&u0), 31).unwrap();
            let rep = ratio_bound_check(&tr.states).unwrap();
            assert!(rep.holds(), "{u0:?}: {rep:?}");
            assert!(!rep.regular);
        }
        let tr = conjugate_trace(&cs(&[0.5, 0.6, 0.7]), 31).unwrap();
        assert!(ratio_bound_check(&tr.states).unwrap().gaps.len() >= 8);

        let tr = conjugate_trace(&cs(&[0.4, 0.4, 0.4]), 20).unwrap();
        let rep = ratio_bound_check(&tr.states).unwrap();
        assert!(rep.regular && rep.holds());
        assert!(rep.gaps.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn km_cm_examples() {
        let a = alpha3();
        assert!(km_cm_residual(&cs(&[a, a, a])).unwrap() <= 1e-14);
        assert!(km_cm_residual(&cs(&[0.5, 0.6, 0.7])).unwrap() <= 1e-12);
        assert!(km_cm_residual(&cs(&[0.01, 0.5, 0.99])).unwrap() <= 1e-12);
    }

    #[test]
    fn tau_examples() {
        let tr = conjugate_trace(&cs(&[0.3, 0.3, 0.3]), 30).unwrap();
        let rep = tau_comparison(&tr.states, 0).unwrap();
        assert!(rep.holds());
        assert_eq!(rep.tau[0], 0.3);
        assert_eq!(rep.tau[1], tr.states[1].as_slice()[0]);

        for u in [[0.3, 0.4, 0.5], [0.1, 0.15, 0.6]] {
            let tr = conjugate_trace(&cs(&u), 40).unwrap();
            let rep = tau_comparison(&tr.states, 0).unwrap();
            assert!(rep.holds(), "{u:?}: {rep:?}");
            assert!(rep.checked >= 2);
        }

        let tr = conjugate_trace(&cs(&[0.7, 0.8, 0.9]), 10).unwrap();
        assert_eq!(tau_comparison(&tr.states, 0), Err(Error::NotBelowAlpha));
    }
}
