//! Exponential integral `E1`, its density, its inverse `H = E1^{-1}` and a
//! bracketed bisection solver.
//!
//! `H` maps Poisson arrival levels to jump sizes of the Gamma process. It is
//! computed by a halve-and-check search: the bracket is grown by doubling or
//! halving, then bisected.

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Relative residual accepted by [`h_inverse`].
pub const TOL_REL: f64 = 1e-12;
/// Absolute residual accepted by [`solve_bracketed`] when none is given.
pub const TOL_ABS: f64 = 1e-14;
/// Bisection iteration cap.
pub const MAX_ITER: usize = 200;

/// Above this level `H(x) = exp(-γ - x)` to within double precision, since
/// `E1(v) = -γ - ln v + v + O(v²)` and `v < 3e-18`.
const H_ASYMPTOTIC_LEVEL: f64 = 40.0;

/// Series/continued-fraction crossover for `E1`.
const E1_SERIES_MAX: f64 = 1.0;

/// Lévy density of the Gamma process, `e^{-x}/x`.
pub fn e1_density(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("e1_density needs x > 0, got {x}")));
    }
    Ok((-x).exp() / x)
}

/// Exponential integral `E1(v) = ∫_v^∞ e^{-x}/x dx`.
pub fn exp_integral_e1(v: f64) -> Result<f64> {
    if !(v > 0.0) || v.is_nan() {
        return Err(Error::domain(format!("E1 needs v > 0, got {v}")));
    }
    Ok(e1_unchecked(v))
}

pub(crate) fn e1_unchecked(v: f64) -> f64 {
    if v <= E1_SERIES_MAX {
        e1_series(v)
    } else {
        e1_continued_fraction(v)
    }
}

/// `-γ - ln v - Σ_{k≥1} (-1)^k v^k / (k·k!)`.
fn e1_series(v: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0; // (-1)^{k+1} v^k / k!
    for k in 1..=60 {
        let kf = k as f64;
        term *= if k == 1 { v } else { -v / kf };
        let add = term / kf;
        sum += add;
        if add.abs() <= f64::EPSILON * sum.abs() {
            break;
        }
    }
    -EULER_GAMMA - v.ln() + sum
}

/// Modified Lentz evaluation of `E1(v) = e^{-v} / (v + 1 - 1²/(v + 3 - 2²/(v + 5 - ...)))`.
fn e1_continued_fraction(v: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = v + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=500 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() <= f64::EPSILON {
            break;
        }
    }
    h * (-v).exp()
}

/// Inverse of the exponential integral, `H(x) = E1^{-1}(x)`.
///
/// The returned `v` satisfies `|E1(v) - x| ≤ x·TOL_REL`, unless the bracket
/// collapses to adjacent floats first, in which case the nearer endpoint is
/// returned.
pub fn h_inverse(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("H needs 0 < x < inf, got {x}")));
    }
    Ok(h_unchecked(x))
}

pub(crate) fn h_unchecked(x: f64) -> f64 {
    if x >= H_ASYMPTOTIC_LEVEL {
        return (-EULER_GAMMA - x).exp();
    }
    // E1 is decreasing: E1(lo) >= x >= E1(hi).
    // For x >= 1, g = e^{−γ−x} has E1(g) = x + g − O(g²) > x and
    // E1(g(1+2g)) < x, so the bracket starts at width 2g².
    let (mut lo, mut hi) = if x >= 1.0 {
        let g = (-EULER_GAMMA - x).exp();
        (g, g * (1.0 + 2.0 * g))
    } else {
        let guess = (-x.ln()).max(0.5);
        (guess, guess)
    };
    while e1_unchecked(lo) < x {
        lo *= 0.5;
    }
    while e1_unchecked(hi) > x {
        hi *= 2.0;
    }
    let tol = x * TOL_REL;
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let r = e1_unchecked(mid) - x;
        if r.abs() <= tol {
            return mid;
        }
        if r > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (e1_unchecked(lo) - x).abs() <= (e1_unchecked(hi) - x).abs() {
        lo
    } else {
        hi
    }
}

/// A scalar equation `g(x) = 0` with a sign change on `[lo, hi]`.
pub struct BracketedEquation<'a> {
    pub evaluator: Box<dyn Fn(f64) -> f64 + 'a>,
    pub lo: f64,
    pub hi: f64,
    pub tol_abs: f64,
}

impl<'a> BracketedEquation<'a> {
    pub fn new(evaluator: impl Fn(f64) -> f64 + 'a, lo: f64, hi: f64) -> Self {
        Self {
            evaluator: Box::new(evaluator),
            lo,
            hi,
            tol_abs: TOL_ABS,
        }
    }

    pub fn with_tol(mut self, tol_abs: f64) -> Self {
        self.tol_abs = tol_abs;
        self
    }
}

/// Deterministic bisection.
///
/// Stops when `|g(mid)| ≤ tol_abs` or when the bracket can no longer be split.
pub fn solve_bracketed(eq: &BracketedEquation<'_>) -> Result<f64> {
    let g = &eq.evaluator;
    let (mut lo, mut hi) = (eq.lo, eq.hi);
    if !(lo < hi) || !(eq.tol_abs > 0.0) {
        return Err(Error::precondition(format!(
            "bracket needs lo < hi and tol_abs > 0, got [{lo}, {hi}], tol {}",
            eq.tol_abs
        )));
    }
    let (glo, ghi) = (g(lo), g(hi));
    if glo.is_nan() || ghi.is_nan() || glo * ghi > 0.0 {
        return Err(Error::precondition(format!(
            "no sign change on [{lo}, {hi}]: g(lo) = {glo}, g(hi) = {ghi}"
        )));
    }
    if glo == 0.0 {
        return Ok(lo);
    }
    if ghi == 0.0 {
        return Ok(hi);
    }
    let lo_positive = glo > 0.0;
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm.abs() <= eq.tol_abs || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if (gm > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Numeric {
        msg: format!("bisection did not converge in {MAX_ITER} iterations"),
        lo,
        hi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_values() {
        assert!((e1_density(1.0).unwrap() - 0.367_879_441_171_442_3).abs() < 1e-15);
        assert!((e1_density(2.0).unwrap() - 0.067_667_641_618_306_34).abs() < 1e-15);
        assert!(matches!(e1_density(0.0), Err(Error::Domain(_))));
        assert!(e1_density(-1.0).is_err());
    }

    #[test]
    fn e1_rejects_nonpositive() {
        assert!(exp_integral_e1(0.0).is_err());
        assert!(exp_integral_e1(f64::NAN).is_err());
    }

    #[test]
    fn e1_tiny_argument_matches_log_expansion() {
        let v: f64 = 1e-8;
        let expected = -EULER_GAMMA - v.ln() + v;
        assert!((exp_integral_e1(v).unwrap() - expected).abs() < 1e-12);
        assert!((exp_integral_e1(v).unwrap() - 17.843_465).abs() < 1e-6);
    }

    #[test]
    fn e1_is_continuous_at_crossover() {
        let below = e1_series(1.0);
        let above = e1_continued_fraction(1.0);
        assert!((below - above).abs() < 1e-14, "{below} vs {above}");
    }

    #[test]
    fn e1_decreasing_on_grid() {
        let grid: Vec<f64> = (0..400).map(|i| 1e-8 * 1.06f64.powi(i)).collect();
        for w in grid.windows(2) {
            assert!(exp_integral_e1(w[1]).unwrap() < exp_integral_e1(w[0]).unwrap());
        }
    }

    #[test]
    fn h_roundtrip_examples() {
        let x = exp_integral_e1(0.5).unwrap();
        assert!((h_inverse(x).unwrap() - 0.5).abs() < 1e-10);
        assert!(h_inverse(0.0).is_err());
        assert!(h_inverse(f64::INFINITY).is_err());
    }

    #[test]
    fn h_asymptotic_branch_agrees_with_bisection() {
        // Just below the switch the bisection result must match the closed form.
        let x = H_ASYMPTOTIC_LEVEL - 1e-9;
        let v = h_unchecked(x);
        let closed = (-EULER_GAMMA - x).exp();
        assert!((v - closed).abs() <= 1e-12 * closed);
    }

    #[test]
    fn solver_examples() {
        let id = BracketedEquation::new(|x| x, -1.0, 1.0);
        assert_eq!(solve_bracketed(&id).unwrap(), 0.0);

        let fixed = BracketedEquation::new(|c: f64| c - (1.0 - c * c).ln(), -0.99, -0.1);
        let c = solve_bracketed(&fixed).unwrap();
        assert!((c + 0.714_556).abs() < 1e-5, "{c}");

        let bad = BracketedEquation::new(|x| x * x + 1.0, -1.0, 1.0);
        assert!(matches!(solve_bracketed(&bad), Err(Error::Precondition(_))));
        let reversed = BracketedEquation::new(|x| x, 1.0, -1.0);
        assert!(solve_bracketed(&reversed).is_err());
    }
}
