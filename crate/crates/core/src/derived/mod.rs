//! The derived parameter system and its conjugate.
//!
//! The derived system maps a parameter vector to
//! `t'_k = prod_{i != k} (1 - t_i)`. Writing `u = 1 - t` turns it into the
//! conjugate system `u'_k = 1 - prod_{i != k} u_i`. In exact arithmetic
//! both stay inside the open unit cube; in `f64` the orbits run to {0, 1}
//! fast enough that a component eventually rounds onto the boundary. That
//! event is recorded as saturation and ends the trace.

pub mod classify;
pub mod roots;
pub mod three;

pub use classify::{classify_dynamics, ClassifyConfig, DynamicsClass, Parity, Side, Verdict};
pub use roots::{
    alpha_equation, critical_mu, eval_f, eval_g, eval_h, eval_h_prime, scan_h_roots, solve_alpha, CriticalPoint,
};
pub use three::{
    jacobian_eigen3, km_cm_residual, order_check, ratio_bound_check, stationary_points3, tau_comparison,
    RatioBoundReport, StabilityReport3, StationaryPoints3, TauReport,
};

use crate::barypolygonal::{limit_weights, ParamVector};
use crate::error::{Error, Result};

/// Named tolerances for the derived-system diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub stationary: f64,
    pub periodic: f64,
    pub regularity: f64,
    pub root_residual: f64,
    /// A component within this distance of alpha counts as a tie.
    pub alpha_tie: f64,
    pub distinctness: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            stationary: 1e-9,
            periodic: 1e-9,
            regularity: 1e-12,
            root_residual: 1e-14,
            alpha_tie: 1e-15,
            distinctness: crate::affine::DEFAULT_DISTINCTNESS_TOL,
        }
    }
}

/// Result of one step that may land on the boundary of the unit cube.
#[derive(Debug, Clone, PartialEq)]
pub enum Stepped<T> {
    Interior(T),
    Saturated(Vec<f64>),
}

impl<T> Stepped<T> {
    pub fn interior(self) -> Option<T> {
        match self {
            Stepped::Interior(x) => Some(x),
            Stepped::Saturated(_) => None,
        }
    }
}

/// The derived map on raw components in the closed cube.
pub fn derived_map(t: &[f64]) -> Vec<f64> {
    (0..t.len()).map(|k| t.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, ti)| 1.0 - ti).product()).collect()
}

/// The conjugate map on raw components in the closed cube.
pub fn conjugate_map(u: &[f64]) -> Vec<f64> {
    (0..u.len())
        .map(|k| {
            let prod: f64 = u.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, ui)| ui).product();
            1.0 - prod
        })
        .collect()
}

fn is_interior(x: &[f64]) -> bool {
    x.iter().all(|&v| v > 0.0 && v < 1.0)
}

/// One step of the derived system.
pub fn derived_step(t: &ParamVector) -> Stepped<ParamVector> {
    let next = limit_weights(t);
    if is_interior(&next) {
        Stepped::Interior(ParamVector::new(next).expect("interior components"))
    } else {
        Stepped::Saturated(next)
    }
}

/// Parameter vectors `t^(0), t^(1), ...` of the derived system.
///
/// `params` only holds interior vectors. When step `s` lands on the cube
/// boundary, `saturated_at = Some(s)` and the raw vector is kept in
/// `saturated_state`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedTrace {
    pub params: Vec<ParamVector>,
    pub saturated_at: Option<usize>,
    pub saturated_state: Option<Vec<f64>>,
}

impl DerivedTrace {
    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn is_saturated(&self) -> bool {
        self.saturated_at.is_some()
    }

    pub fn conjugate_states(&self) -> Vec<ConjugateState> {
        self.params.iter().map(ConjugateState::from_params).collect()
    }
}

/// Up to `steps` derived steps from `t0`, stopping early at saturation.
pub fn derived_trace(t0: &ParamVector, steps: usize) -> DerivedTrace {
    let mut params = vec![t0.clone()];
    for m in 1..=steps {
        match derived_step(params.last().unwrap()) {
            Stepped::Interior(t) => params.push(t),
            Stepped::Saturated(raw) => {
                return DerivedTrace { params, saturated_at: Some(m), saturated_state: Some(raw) }
            }
        }
    }
    DerivedTrace { params, saturated_at: None, saturated_state: None }
}

/// A state of the conjugate system, `u = 1 - t`, in the closed cube
/// `[0, 1]^p`. Boundary states are allowed so the corner fixed points can
/// be represented.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugateState {
    u: Vec<f64>,
}

impl ConjugateState {
    pub fn new(u: Vec<f64>) -> Result<Self> {
        if u.len() < 2 {
            return Err(Error::TooFewPoints { min: 2, got: u.len() });
        }
        for (index, &value) in u.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::StateOutOfRange { index, value });
            }
        }
        Ok(Self { u })
    }

    pub fn from_params(t: &ParamVector) -> Self {
        Self { u: t.as_slice().iter().map(|x| 1.0 - x).collect() }
    }

    /// `t = 1 - u`, if that lies in the open cube.
    pub fn to_params(&self) -> Option<ParamVector> {
        ParamVector::new(self.u.iter().map(|x| 1.0 - x).collect()).ok()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.u
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_interior(&self) -> bool {
        is_interior(&self.u)
    }

    pub fn is_sorted(&self) -> bool {
        self.u.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn max_abs_diff(&self, other: &ConjugateState) -> f64 {
        self.u.iter().zip(&other.u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// One step of the conjugate system.
pub fn conjugate_step(u: &ConjugateState) -> ConjugateState {
    ConjugateState { u: conjugate_map(&u.u) }
}

/// A conjugate state stored together with its complement `t = 1 - u`, each
/// to full relative accuracy.
///
/// Near saturation a plain f64 state keeps components like `1e-15` only as
/// `1 - (something close to 1)`, with almost no correct digits. Stepping in
/// log space keeps the small side exact enough to compare components.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSidedState {
    pub u: Vec<f64>,
    pub t: Vec<f64>,
}

impl TwoSidedState {
    pub fn new(u: &ConjugateState) -> Self {
        Self { u: u.u.clone(), t: u.u.iter().map(|x| 1.0 - x).collect() }
    }

    /// `u'_k = 1 - P_k` and `t'_k = P_k` with `P_k = prod_{i != k} u_i`,
    /// through `ln P_k`.
    pub fn step(&self) -> Self {
        let logs: Vec<f64> =
            self.u.iter().zip(&self.t).map(|(&u, &t)| if u <= 0.5 { u.ln() } else { (-t).ln_1p() }).collect();
        // Summing all logs and subtracting one would cancel when that one
        // dominates.
        let (u, t) = (0..logs.len())
            .map(|k| {
                let lk: f64 = logs.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, l)| l).sum();
                (-lk.exp_m1(), lk.exp())
            })
            .unzip();
        Self { u, t }
    }
}

/// Interior conjugate states `u_0, u_1, ...`; same saturation convention as
/// [`DerivedTrace`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugateTrace {
    pub states: Vec<ConjugateState>,
    pub saturated_at: Option<usize>,
}

impl ConjugateTrace {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Up to `steps` conjugate steps from the interior state `u0`.
pub fn conjugate_trace(u0: &ConjugateState, steps: usize) -> Result<ConjugateTrace> {
    if !u0.is_interior() {
        return Err(Error::Precondition("conjugate trace needs an interior start".into()));
    }
    let mut states = vec![u0.clone()];
    for m in 1..=steps {
        let next = conjugate_step(states.last().unwrap());
        if !next.is_interior() {
            return Ok(ConjugateTrace { states, saturated_at: Some(m) });
        }
        states.push(next);
    }
    Ok(ConjugateTrace { states, saturated_at: None })
}
