//! Martingale fields of the Gamma and symmetric Gamma processes.
//!
//! Exponential martingales are evaluated in log space; at large `t` the
//! factors `(1+θ)^t` and `e^{−θΓ_t}` overflow long before their product does.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::jumpcalc::JumpPath;
use crate::rng::Stream;
use crate::sim::{sample_symmetric, HSeriesConfig};
use crate::specfun::{self, BracketedEquation};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum MartingaleKind {
    /// `M_t = (1+θ)^t e^{−θΓ_t}`, `θ > −1`.
    Gamma(f64),
    /// `M̃_t = (1−θ²)^{t/2} e^{−θS_t}`, `|θ| < 1`.
    Symmetric(f64),
}

impl MartingaleKind {
    pub fn gamma(theta: f64) -> Result<Self> {
        if !(theta > -1.0) || !theta.is_finite() {
            return Err(Error::domain(format!("gamma martingale needs θ > −1, got {theta}")));
        }
        Ok(MartingaleKind::Gamma(theta))
    }

    pub fn symmetric(theta: f64) -> Result<Self> {
        if !(theta.abs() < 1.0) {
            return Err(Error::domain(format!(
                "symmetric martingale needs |θ| < 1, got {theta}"
            )));
        }
        Ok(MartingaleKind::Symmetric(theta))
    }

    pub fn theta(&self) -> f64 {
        match *self {
            MartingaleKind::Gamma(t) | MartingaleKind::Symmetric(t) => t,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            MartingaleKind::Gamma(t) => MartingaleKind::gamma(t).map(|_| ()),
            MartingaleKind::Symmetric(t) => MartingaleKind::symmetric(t).map(|_| ()),
        }
    }
}

/// `ln M_t`.
pub fn ln_exp_martingale(kind: MartingaleKind, t: f64, path_value: f64) -> Result<f64> {
    kind.validate()?;
    if !(t >= 0.0) {
        return Err(Error::domain(format!("t must be nonnegative, got {t}")));
    }
    match kind {
        MartingaleKind::Gamma(theta) => {
            if path_value < 0.0 {
                return Err(Error::domain("a Gamma path value cannot be negative"));
            }
            if theta == 0.0 {
                return Ok(0.0);
            }
            Ok(t * theta.ln_1p() - theta * path_value)
        }
        MartingaleKind::Symmetric(theta) => {
            if theta == 0.0 {
                return Ok(0.0);
            }
            Ok(0.5 * t * (-theta * theta).ln_1p() - theta * path_value)
        }
    }
}

/// `M_t` evaluated at the path value `Γ_t` (or `S_t`).
pub fn exp_martingale(kind: MartingaleKind, t: f64, path_value: f64) -> Result<f64> {
    Ok(ln_exp_martingale(kind, t, path_value)?.exp())
}

/// Base `c_p` with `E M_t^p = c_p^t`.
pub fn pth_moment_base(kind: MartingaleKind, p: f64) -> Result<f64> {
    kind.validate()?;
    match kind {
        MartingaleKind::Gamma(theta) => {
            if !(p * theta > -1.0) {
                return Err(Error::domain(format!("c_p needs pθ > −1, got p={p}, θ={theta}")));
            }
            Ok((p * theta.ln_1p() - (p * theta).ln_1p()).exp())
        }
        MartingaleKind::Symmetric(theta) => {
            if !((p * theta).abs() < 1.0) {
                return Err(Error::domain(format!("c_p needs |pθ| < 1, got p={p}, θ={theta}")));
            }
            let t2 = theta * theta;
            Ok((0.5 * (p * (-t2).ln_1p() - (-p * p * t2).ln_1p())).exp())
        }
    }
}

/// `(t)_j = t(t−1)⋯(t−j+1)`.
pub fn falling_factorial(t: f64, j: u32) -> f64 {
    (0..j).map(|i| t - i as f64).product()
}

/// `C(a, j)` for real `a`.
pub fn binomial_real(a: f64, j: u32) -> f64 {
    falling_factorial(a, j) / (1..=j).map(|i| i as f64).product::<f64>()
}

fn binomial(n: u32, k: u32) -> f64 {
    binomial_real(n as f64, k)
}

pub const MAX_POLY_ORDER: u32 = 8;

/// Coefficients of `P_n` (or `P̃_n`) in descending powers `x^n, x^{n−1}, …, 1`.
pub fn poly_coefficients(kind: MartingaleKind, n: u32, t: f64) -> Result<Vec<f64>> {
    if n == 0 || n > MAX_POLY_ORDER {
        return Err(Error::domain(format!(
            "polynomial order must lie in 1..={MAX_POLY_ORDER}, got {n}"
        )));
    }
    let mut coeffs = vec![0.0; n as usize + 1];
    match kind {
        MartingaleKind::Gamma(_) => {
            for j in 0..=n {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                coeffs[j as usize] = sign * binomial(n, j) * falling_factorial(t, j);
            }
        }
        MartingaleKind::Symmetric(_) => {
            for j in 0..=n / 2 {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                let two_j_fact: f64 = (1..=2 * j).map(|i| i as f64).product();
                coeffs[2 * j as usize] = sign * binomial(n, 2 * j) * binomial_real(0.5 * t, j) * two_j_fact;
            }
        }
    }
    Ok(coeffs)
}

/// `P_n(Γ_t)` or `P̃_n(S_t)`; the parameter `θ` of `kind` is ignored.
pub fn poly_martingale(kind: MartingaleKind, n: u32, t: f64, path_value: f64) -> Result<f64> {
    let coeffs = poly_coefficients(kind, n, t)?;
    Ok(coeffs.iter().fold(0.0, |acc, c| acc * path_value + c))
}

/// `Γ(t+k) e^{Γ_t} / (Γ_t + θ)^{t+k}`, with mean `(k−1)!/θ^k`.
pub fn laplace_martingale(t: f64, theta: f64, path_value: f64, k: u32) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(Error::domain(format!("θ must be positive, got {theta}")));
    }
    if !(t >= 0.0) || path_value < 0.0 || k == 0 {
        return Err(Error::domain("need t >= 0, a nonnegative path value and k >= 1"));
    }
    let a = t + k as f64;
    Ok((ln_gamma(a) + path_value - a * (path_value + theta).ln()).exp())
}

/// `b_θ = (1+θ)²/(1+2θ)`, so that `E M_t² = b_θ^t`.
pub fn oblique_bracket_base(theta: f64) -> Result<f64> {
    if !(1.0 + 2.0 * theta > 0.0) {
        return Err(Error::domain(format!("oblique bracket needs θ > −1/2, got {theta}")));
    }
    Ok((2.0 * theta.ln_1p() - (2.0 * theta).ln_1p()).exp())
}

/// Rate `(ln b_θ) b_θ^t` of the oblique bracket.
pub fn oblique_bracket_rate(theta: f64, t: f64) -> Result<f64> {
    let b = oblique_bracket_base(theta)?;
    Ok(b.ln() * b.powf(t))
}

/// `2 sinh(x)/x` with the removable singularity filled in.
pub fn two_sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        2.0 * (1.0 + x * x / 6.0)
    } else {
        2.0 * x.sinh() / x
    }
}

/// `L̃_t = 2 E'[sinh(s − S'_t)/(s − S'_t)]` estimated from `inner_reps`
/// independent draws of `S'_t`.
pub fn sinh_martingale(
    t: f64,
    s_value: f64,
    inner_reps: usize,
    config: &HSeriesConfig,
    rng: &mut Stream,
) -> Result<f64> {
    if inner_reps == 0 {
        return Err(Error::config("need at least one inner replicate"));
    }
    if !(t >= 0.0) {
        return Err(Error::domain(format!("t must be nonnegative, got {t}")));
    }
    let mut total = 0.0;
    for _ in 0..inner_reps {
        let inner = if t == 0.0 {
            0.0
        } else {
            sample_symmetric(t, config, rng)?
        };
        total += two_sinhc(s_value - inner);
    }
    Ok(total / inner_reps as f64)
}

/// Root of `c = ln(1 − c²)` on `(−1, 0)`.
pub fn shifted_symmetric_fixed_point() -> Result<f64> {
    specfun::solve_bracketed(&BracketedEquation::new(|c: f64| c - (1.0 - c * c).ln(), -0.99, -0.1))
}

/// Residuals of the pathwise dynamics of `M_t = (1+θ)^t e^{−θΓ_t}` on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SdeResidual {
    /// `M_t − M_{t_0}` against exact jumps `M_{u−}(e^{−θh} − 1)` plus the
    /// left Riemann sum of `ln(1+θ) M dt`; vanishes with the mesh.
    pub drift: f64,
    /// The same with first-order jumps `−θ M_{u−} h`; does not vanish.
    pub first_order: f64,
    /// Grid quadratic variation of `M` against `Σ M_{u−}²(e^{−θh} − 1)²`.
    pub bracket: f64,
}

pub fn exp_martingale_sde_residual(path: &JumpPath, theta: f64, t_grid: &[f64]) -> Result<SdeResidual> {
    let kind = MartingaleKind::gamma(theta)?;
    if t_grid.len() < 2 || t_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::precondition(
            "residual grid needs at least two increasing points",
        ));
    }
    let m = |t: f64| exp_martingale(kind, t, path.amass(t));
    let m_left = |t: f64| exp_martingale(kind, t, path.amass_left(t));
    let rate = theta.ln_1p();
    let (t0, m0) = (t_grid[0], m(t_grid[0])?);
    let (mut drift_int, mut exact_jumps, mut linear_jumps, mut grid_qv, mut jump_qv) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let (mut worst_drift, mut worst_first, mut worst_bracket) = (0.0f64, 0.0f64, 0.0f64);
    let times = path.times();
    let mut next_jump = times.partition_point(|&u| u <= t0);
    let mut prev = (t0, m0);
    for &t in &t_grid[1..] {
        let cur = m(t)?;
        drift_int += rate * prev.1 * (t - prev.0);
        grid_qv += (cur - prev.1) * (cur - prev.1);
        while next_jump < times.len() && times[next_jump] <= t {
            let u = times[next_jump];
            let h = path.heights()[next_jump];
            let before = m_left(u)?;
            let dm = before * (-theta * h).exp_m1();
            exact_jumps += dm;
            linear_jumps += -theta * before * h;
            jump_qv += dm * dm;
            next_jump += 1;
        }
        let lhs = cur - m0;
        worst_drift = worst_drift.max((lhs - exact_jumps - drift_int).abs());
        worst_first = worst_first.max((lhs - linear_jumps - drift_int).abs());
        worst_bracket = worst_bracket.max((grid_qv - jump_qv).abs());
        prev = (t, cur);
    }
    Ok(SdeResidual {
        drift: worst_drift,
        first_order: worst_first,
        bracket: worst_bracket,
    })
}
