//! The scalar maps of the regular case: `f_p(x) = 1 - x^(p-1)`, its second
//! iterate `g_p`, `h_p = g_p - id`, and the fixed point `alpha_p` solving
//! `x^(p-1) + x - 1 = 0` on [0, 1].

use crate::error::{Error, Result};

/// Target residual for [`solve_alpha`].
pub const ALPHA_RESIDUAL_TOL: f64 = 1e-14;

const BISECTION_WIDTH: f64 = 1e-8;
const NEWTON_MAX_ITERS: usize = 60;

fn pow_m1(x: f64, p: usize) -> f64 {
    x.powi((p - 1) as i32)
}

/// `x^(p-1) + x - 1`.
pub fn alpha_equation(p: usize, x: f64) -> f64 {
    pow_m1(x, p) + x - 1.0
}

/// Unique root in [0, 1] of `x^(p-1) + x - 1`: bisection on [0, 1], then
/// Newton steps kept inside the final bracket.
pub fn solve_alpha(p: usize) -> Result<f64> {
    if p < 2 {
        return Err(Error::UnsupportedOrder { min: 2, got: p });
    }
    let phi = |x: f64| alpha_equation(p, x);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        let v = phi(mid);
        if v == 0.0 {
            return Ok(mid);
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..NEWTON_MAX_ITERS {
        let v = phi(x);
        if v == 0.0 {
            break;
        }
        let slope = (p - 1) as f64 * x.powi(p as i32 - 2) + 1.0;
        let next = (x - v / slope).clamp(lo, hi);
        if next == x {
            break;
        }
        x = next;
    }
    // Newton can stall one ulp away from the best representable root.
    let mut best = x;
    for cand in [x.next_down(), x.next_up()] {
        if phi(cand).abs() < phi(best).abs() {
            best = cand;
        }
    }
    Ok(best)
}

fn check_domain(p: usize, x: f64) -> Result<()> {
    if p < 3 {
        return Err(Error::UnsupportedOrder { min: 3, got: p });
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutsideUnitInterval(x));
    }
    Ok(())
}

/// `f_p(x) = 1 - x^(p-1)`.
pub fn eval_f(p: usize, x: f64) -> Result<f64> {
    check_domain(p, x)?;
    Ok(1.0 - pow_m1(x, p))
}

/// `g_p = f_p o f_p`.
pub fn eval_g(p: usize, x: f64) -> Result<f64> {
    eval_f(p, eval_f(p, x)?)
}

/// `h_p(x) = 1 - x - (1 - x^(p-1))^(p-1)`.
pub fn eval_h(p: usize, x: f64) -> Result<f64> {
    check_domain(p, x)?;
    Ok(1.0 - x - pow_m1(1.0 - pow_m1(x, p), p))
}

/// `h_p'(x) = -1 + (p-1)^2 x^(p-2) (1 - x^(p-1))^(p-2)`.
pub fn eval_h_prime(p: usize, x: f64) -> Result<f64> {
    check_domain(p, x)?;
    let k = (p - 1) as f64;
    let e = p as i32 - 2;
    Ok(-1.0 + k * k * x.powi(e) * (1.0 - pow_m1(x, p)).powi(e))
}

/// Location and value of the interior maximum of `h_p'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub theta: f64,
    pub mu: f64,
}

/// `theta_p = (1/p)^(1/(p-1))` and `mu = h_p'(theta_p)`, which must be positive.
pub fn critical_mu(p: usize) -> Result<CriticalPoint> {
    if p < 3 {
        return Err(Error::UnsupportedOrder { min: 3, got: p });
    }
    let theta = (1.0 / p as f64).powf(1.0 / (p - 1) as f64);
    let mu = eval_h_prime(p, theta)?;
    if mu.is_nan() || mu <= 0.0 {
        return Err(Error::Precondition(format!("h_{p}' is not positive at its maximum: {mu}")));
    }
    Ok(CriticalPoint { theta, mu })
}

/// Approximate zeros of `h_p` found by scanning [0, 1] with spacing `step`.
///
/// A grid point where `h_p` is exactly zero is reported as is; a strict sign
/// change between neighbours is reported at their midpoint.
pub fn scan_h_roots(p: usize, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::Precondition(format!("scan step must lie in (0, 1], got {step}")));
    }
    let n = (1.0 / step).round() as usize;
    let xs: Vec<f64> = (0..=n).map(|i| (i as f64 / n as f64).min(1.0)).collect();
    let hs = xs.iter().map(|&x| eval_h(p, x)).collect::<Result<Vec<_>>>()?;
    let mut roots = Vec::new();
    for i in 0..xs.len() {
        if hs[i] == 0.0 {
            roots.push(xs[i]);
        } else if i + 1 < xs.len() && hs[i + 1] != 0.0 && hs[i].signum() != hs[i + 1].signum() {
            roots.push(0.5 * (xs[i] + xs[i + 1]));
        }
    }
    Ok(roots)
}
