//! Classification of derived-system orbits.

use super::{conjugate_trace, derived_trace, solve_alpha, ConjugateState, Tolerances};
use crate::barypolygonal::ParamVector;
use crate::error::Result;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Stationary,
    Periodic2,
    /// Alternation between neighbourhoods of 0 and 1, proven for this case.
    AlternatingDivergent,
    /// Same observed behaviour for irregular `p >= 4`, where it is only
    /// conjectured.
    ConjecturedAlternating,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Stationary => "Stationary",
            Verdict::Periodic2 => "Periodic2",
            Verdict::AlternatingDivergent => "AlternatingDivergent",
            Verdict::ConjecturedAlternating => "ConjecturedAlternating",
        };
        f.write_str(s)
    }
}

/// Which conjugate subsequence tends to 0. The other tends to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parity {
    EvenToZero,
    OddToZero,
}

/// Side of alpha a whole state lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Below,
    Above,
}

impl Side {
    fn flip(self) -> Self {
        match self {
            Side::Below => Side::Above,
            Side::Above => Side::Below,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyConfig {
    pub tolerances: Tolerances,
    /// Number of derived steps computed.
    pub horizon: usize,
    /// Even/odd pairs after lock-in needed to call the alternation confirmed.
    pub min_confirming_pairs: usize,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self { tolerances: Tolerances::default(), horizon: 200, min_confirming_pairs: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DynamicsClass {
    pub verdict: Verdict,
    pub parity: Option<Parity>,
    pub lockin_index: Option<usize>,
    pub alpha: f64,
    /// Largest `|t^(m+1) - t^(m)|` (stationary) or `|t^(m+2) - t^(m)|`
    /// (periodic) over the computed trace.
    pub evidence: Option<f64>,
    /// Alternating pairs observed after lock-in, before saturation.
    pub confirmed_pairs: usize,
    pub confirmed: bool,
    pub saturated_at: Option<usize>,
    pub steps_computed: usize,
}

/// Side of `alpha` shared by every component of `u`, if any. Components
/// within `tie` of alpha count as neither side.
pub fn common_side(u: &[f64], alpha: f64, tie: f64) -> Option<Side> {
    if u.iter().all(|&x| x < alpha - tie) {
        Some(Side::Below)
    } else if u.iter().all(|&x| x > alpha + tie) {
        Some(Side::Above)
    } else {
        None
    }
}

/// First index whose state lies entirely on one side of `alpha`.
pub fn lockin_index(states: &[ConjugateState], alpha: f64, tie: f64) -> Option<(usize, Side)> {
    states.iter().enumerate().find_map(|(m, s)| common_side(s.as_slice(), alpha, tie).map(|side| (m, side)))
}

/// Number of consecutive states from `m0` on that alternate sides of
/// `alpha` starting on `side`, and whether the alternation covers the rest
/// of the trace.
pub fn alternation_run(states: &[ConjugateState], m0: usize, side: Side, alpha: f64, tie: f64) -> (usize, bool) {
    let mut expected = side;
    let mut run = 0;
    for s in &states[m0..] {
        if common_side(s.as_slice(), alpha, tie) != Some(expected) {
            return (run, false);
        }
        run += 1;
        expected = expected.flip();
    }
    (run, true)
}

fn parity_for(m0: usize, side: Side) -> Parity {
    // Below-alpha states head to 0.
    match (m0.is_multiple_of(2), side) {
        (true, Side::Below) | (false, Side::Above) => Parity::EvenToZero,
        _ => Parity::OddToZero,
    }
}

fn max_lag_diff(params: &[ParamVector], lag: usize) -> f64 {
    params
        .iter()
        .zip(params.iter().skip(lag))
        .map(|(a, b)| a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
        .fold(0.0, f64::max)
}

/// Classifies the derived-system orbit of `t0`.
///
/// * `p = 2`: stationary iff `t_2 = 1 - t_1`, otherwise 2-periodic.
/// * regular `t0`: stationary iff `t = 1 - alpha_p`, otherwise alternating.
/// * irregular `p = 3`: alternating; the lock-in index is measured.
/// * irregular `p >= 4`: same measurement, reported as conjectured.
pub fn classify_dynamics(t0: &ParamVector, config: &ClassifyConfig) -> Result<DynamicsClass> {
    let tol = &config.tolerances;
    let p = t0.len();
    let alpha = solve_alpha(p)?;
    let t = t0.as_slice();

    if p == 2 {
        let trace = derived_trace(t0, config.horizon);
        let stationary = (t[1] - (1.0 - t[0])).abs() <= tol.stationary;
        let (verdict, evidence) = if stationary {
            (Verdict::Stationary, max_lag_diff(&trace.params, 1))
        } else {
            (Verdict::Periodic2, max_lag_diff(&trace.params, 2))
        };
        return Ok(DynamicsClass {
            verdict,
            parity: None,
            lockin_index: None,
            alpha,
            evidence: Some(evidence),
            confirmed_pairs: 0,
            confirmed: evidence <= if stationary { tol.stationary } else { tol.periodic },
            saturated_at: trace.saturated_at,
            steps_computed: trace.len() - 1,
        });
    }

    let regular = t0.is_regular(tol.regularity);
    if regular {
        let off = t.iter().map(|x| (x - (1.0 - alpha)).abs()).fold(0.0, f64::max);
        if off <= tol.stationary {
            return Ok(DynamicsClass {
                verdict: Verdict::Stationary,
                parity: None,
                lockin_index: None,
                alpha,
                evidence: Some(off),
                confirmed_pairs: 0,
                confirmed: true,
                saturated_at: None,
                steps_computed: 0,
            });
        }
    }

    let trace = conjugate_trace(&ConjugateState::from_params(t0), config.horizon)?;
    let verdict = if regular || p == 3 { Verdict::AlternatingDivergent } else { Verdict::ConjecturedAlternating };
    let lock = if regular {
        let u0 = 1.0 - t[0];
        Some((0, if u0 < alpha { Side::Below } else { Side::Above }))
    } else {
        lockin_index(&trace.states, alpha, tol.alpha_tie)
    };
    let (parity, lockin_index, confirmed_pairs) = match lock {
        Some((m0, side)) => {
            let (run, _) = alternation_run(&trace.states, m0, side, alpha, tol.alpha_tie);
            (Some(parity_for(m0, side)), Some(m0), run / 2)
        }
        None => (None, None, 0),
    };
    Ok(DynamicsClass {
        verdict,
        parity,
        lockin_index,
        alpha,
        evidence: None,
        confirmed_pairs,
        confirmed: confirmed_pairs >= config.min_confirming_pairs,
        saturated_at: trace.saturated_at,
        steps_computed: trace.len() - 1,
    })
}
