//! Modulars `Φ(f) = ∫ φ(|f|) dλ`, their F-norms, and the integrability tests
//! for Gamma integrals.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extended::Extended;
use crate::integrand::Integrand;
use crate::quad::{self, Integral, QuadOptions};
use crate::specfun::{self, BracketedEquation};

/// A function `φ` with `φ(0) = 0`, nondecreasing and continuous at 0.
#[derive(Clone)]
pub enum ModularKind {
    /// `u ∧ 1`
    Phi0Min,
    /// `u / (1 + u)`
    Phi0Ratio,
    /// `1 − e^{−u}`
    Phi0Exp,
    /// `arctan u`
    Phi0Arctan,
    /// `ln(1 + u)`
    Phi1,
    /// `½ ln(1 + u²)`
    Phi2,
    /// `ln(1 + u²)`, the squared modification of `Phi1`.
    Phi1Squared,
    Custom(CustomModular),
}

#[derive(Clone)]
pub struct CustomModular {
    pub name: String,
    phi: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl ModularKind {
    /// A custom `φ`, spot-checked on a grid for `φ(0) = 0`, monotonicity and
    /// `φ(αu + (1−α)v) ≤ φ(u) + φ(v)`.
    pub fn custom(name: &str, phi: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let kind = ModularKind::Custom(CustomModular {
            name: name.to_string(),
            phi: Arc::new(phi),
        });
        kind.check_axioms()?;
        Ok(kind)
    }

    pub fn eval(&self, u: f64) -> f64 {
        match self {
            ModularKind::Phi0Min => u.min(1.0),
            ModularKind::Phi0Ratio => u / (1.0 + u),
            ModularKind::Phi0Exp => -(-u).exp_m1(),
            ModularKind::Phi0Arctan => u.atan(),
            ModularKind::Phi1 => u.ln_1p(),
            ModularKind::Phi2 => 0.5 * (u * u).ln_1p(),
            ModularKind::Phi1Squared => (u * u).ln_1p(),
            ModularKind::Custom(c) => (c.phi)(u),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            ModularKind::Phi0Min => "phi0_min",
            ModularKind::Phi0Ratio => "phi0_ratio",
            ModularKind::Phi0Exp => "phi0_exp",
            ModularKind::Phi0Arctan => "phi0_arctan",
            ModularKind::Phi1 => "phi1",
            ModularKind::Phi2 => "phi2",
            ModularKind::Phi1Squared => "phi1_sq",
            ModularKind::Custom(c) => &c.name,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "phi0_min" => ModularKind::Phi0Min,
            "phi0_ratio" => ModularKind::Phi0Ratio,
            "phi0_exp" => ModularKind::Phi0Exp,
            "phi0_arctan" => ModularKind::Phi0Arctan,
            "phi1" => ModularKind::Phi1,
            "phi2" => ModularKind::Phi2,
            "phi1_sq" => ModularKind::Phi1Squared,
            other => return Err(Error::config(format!("unknown modular '{other}'"))),
        })
    }

    fn check_axioms(&self) -> Result<()> {
        if self.eval(0.0) != 0.0 {
            return Err(Error::precondition(format!("{}: φ(0) must be 0", self.name())));
        }
        let grid: Vec<f64> = (0..=60).map(|i| 1e-4 * 1.3f64.powi(i)).collect();
        let vals: Vec<f64> = grid.iter().map(|&u| self.eval(u)).collect();
        if vals.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::precondition(format!(
                "{}: φ must be finite and nonnegative",
                self.name()
            )));
        }
        if vals.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::precondition(format!("{}: φ must be nondecreasing", self.name())));
        }
        for (i, &u) in grid.iter().enumerate().step_by(5) {
            for (j, &v) in grid.iter().enumerate().step_by(5) {
                for alpha in [0.25, 0.5, 0.75] {
                    let lhs = self.eval(alpha * u + (1.0 - alpha) * v);
                    if lhs > (vals[i] + vals[j]) * (1.0 + 1e-12) {
                        return Err(Error::precondition(format!(
                            "{}: φ(αu+(1−α)v) ≤ φ(u)+φ(v) fails at u={u}, v={v}, α={alpha}",
                            self.name()
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ModularKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `Φ(f) = ∫ φ(|f|) dλ`; `Infinite` when the integral diverges.
pub fn modular_value(phi: &ModularKind, f: &Integrand) -> Result<Extended> {
    f.integrate_abs(&|u| phi.eval(u))
}

/// `‖f‖_φ = inf{c > 0 : Φ(f/c) ≤ c}`.
pub fn f_norm(phi: &ModularKind, f: &Integrand) -> Result<Extended> {
    let excess = |c: f64| -> Result<f64> { Ok(modular_value(phi, &f.scaled(1.0 / c))?.to_f64() - c) };
    let (mut lo, mut hi) = (1.0, 1.0);
    // Grow hi until feasible.
    while excess(hi)? > 0.0 {
        hi *= 2.0;
        if hi > 1e300 {
            return Ok(Extended::Infinite);
        }
    }
    // Shrink lo until infeasible.
    while excess(lo)? <= 0.0 {
        lo *= 0.5;
        if lo < 1e-300 {
            return Ok(Extended::Finite(0.0));
        }
    }
    // The bisection needs a closure that cannot fail; quadrature errors are
    // surfaced afterwards.
    let failure = std::cell::RefCell::new(None);
    let root = specfun::solve_bracketed(
        &BracketedEquation::new(
            |c| match excess(c) {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            },
            lo,
            hi,
        )
        .with_tol(1e-15),
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(Extended::Finite(root?))
}

/// `a·φ_i(b·u) ≤ φ_j(u)` for every `u` in the grid.
pub fn equivalence_witness(phi_i: &ModularKind, phi_j: &ModularKind, a: f64, b: f64, grid: &[f64]) -> Result<bool> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::precondition(format!(
            "witness constants must be positive, got a={a}, b={b}"
        )));
    }
    Ok(grid.iter().all(|&u| a * phi_i.eval(b * u) <= phi_j.eval(u)))
}

/// Log-spaced grid on `[lo, hi]` with `n` points, plus 0.
pub fn witness_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi / lo).ln() / (n - 1) as f64;
    std::iter::once(0.0)
        .chain((0..n).map(|i| lo * (step * i as f64).exp()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Integrability {
    Integrable,
    NotIntegrable,
    /// Quadrature could neither converge nor detect divergence.
    Boundary,
}

impl Integrability {
    pub fn is_integrable(&self) -> bool {
        *self == Integrability::Integrable
    }
}

/// Whether `Γ^{(β)} f` is well defined: `Φ1(f) < ∞` for `β ≠ 0`, `Φ2(f) < ∞`
/// for `β = 0`. Since `ln(1 + cx) ≤ max(1, c) ln(1 + x)`, finiteness at
/// scale 1 decides every scale.
pub fn gamma_integrable(f: &Integrand, beta: f64) -> Result<Integrability> {
    if !(-1.0..=1.0).contains(&beta) {
        return Err(Error::domain(format!("beta must lie in [-1, 1], got {beta}")));
    }
    let phi = if beta != 0.0 {
        ModularKind::Phi1
    } else {
        ModularKind::Phi2
    };
    match modular_value(&phi, f) {
        Ok(Extended::Finite(_)) => Ok(Integrability::Integrable),
        Ok(Extended::Infinite) => Ok(Integrability::NotIntegrable),
        Err(Error::Numeric { .. }) => Ok(Integrability::Boundary),
        Err(e) => Err(e),
    }
}

/// `E|Γf|^p < ∞` iff `λ|f| 1{|f| ≤ c} < ∞` and `λ|f|^p 1{|f| > c} < ∞`.
pub fn p_moment_exists(f: &Integrand, p: f64, c: f64) -> Result<bool> {
    if !(p > 0.0 && c > 0.0) {
        return Err(Error::domain(format!("p and c must be positive, got p={p}, c={c}")));
    }
    let small = f.truncated_abs_moment(1.0, c, false)?;
    let large = f.truncated_abs_moment(p, c, true)?;
    Ok(small.is_finite() && large.is_finite())
}

/// `½ E ln(1 + 2θ²Z²)` by quadrature against the Gaussian density.
pub fn qv_kernel_gauss(theta: f64) -> Result<f64> {
    let g = |z: f64| 0.5 * (2.0 * theta * theta * z * z).ln_1p();
    quad::gaussian_expectation(&g, QuadOptions::default())
}

/// `∫_0^∞ (1 − e^{−x²θ²}) e^{−x}/x dx`.
pub fn qv_kernel_direct(theta: f64) -> Result<f64> {
    let t2 = theta * theta;
    let g = |x: f64| -(-x * x * t2).exp_m1() * (-x).exp() / x;
    match quad::integrate(&g, 0.0, f64::INFINITY, QuadOptions::default())? {
        Integral::Converged { value, .. } => Ok(value),
        Integral::Divergent => Err(Error::Numeric {
            msg: "quadratic-variation kernel reported divergent".into(),
            lo: 0.0,
            hi: f64::INFINITY,
        }),
    }
}

/// `∫ ½ E ln(1 + 2 f(x)² Z²) dx`, the modular of the quadratic variation.
pub fn qv_modular(f: &Integrand) -> Result<Extended> {
    f.integrate_abs(&|u| qv_kernel_gauss(u).unwrap_or(f64::NAN))
}

/// `∫ (1 − cos ux) e^{−x}/x dx = ½ ln(1 + u²)`.
pub fn cosine_functional(u: f64) -> f64 {
    0.5 * (u * u).ln_1p()
}

/// `∫ sin(ux) e^{−x}/x dx = arctan u`.
pub fn sine_functional(u: f64) -> f64 {
    u.atan()
}

/// `φ^ν(u) = ∫ (ux ∧ 1) ν(dx)` for the Gamma Lévy measure.
pub fn phi_nu(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    let a = 1.0 / u;
    -u * (-a).exp_m1() + specfun::e1_unchecked(a)
}

/// `φ̃^ν(u) = ∫ ((ux)² ∧ 1) ν(dx)` for the Gamma Lévy measure.
pub fn phi_nu_squared(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    let a = 1.0 / u;
    // ∫_0^a x e^{-x} dx = 1 − e^{−a}(1 + a)
    let head = if a < 1e-3 {
        a * a * (0.5 - a / 3.0 + a * a / 8.0)
    } else {
        1.0 - (-a).exp() * (1.0 + a)
    };
    u * u * head + specfun::e1_unchecked(a)
}
