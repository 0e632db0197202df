//! Deterministic integrands on `[0, ∞)` with exact power integrals.
//!
//! Text form used by the CLI:
//!
//! ```text
//! integrand := step | power
//! step      := "pc:" number ("," number)* ";v=" number ("," number)*
//! power     := "pow:" param ("," param)*
//! param     := ("c" | "alpha" | "k" | "a" | "b") "=" number
//! ```
//!
//! `pc:0,0.5,1;v=2,1` is `2` on `[0, 0.5]` and `1` on `(0.5, 1]`.
//! `pow:c=1,alpha=0.5,a=0,b=1` is `x^{-1/alpha}` on `(0, 1]`; `k=` gives the
//! exponent directly and `b=inf` an unbounded interval.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::extended::Extended;
use crate::quad::{self, Integral, QuadOptions};

/// Piecewise-constant function: `values[i]` on `(breaks[i], breaks[i+1]]`,
/// with the first interval closed on the left. Zero outside.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    breaks: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breaks.len() < 2 || values.len() + 1 != breaks.len() {
            return Err(Error::config(format!(
                "step function needs n+1 breakpoints for n values, got {} and {}",
                breaks.len(),
                values.len()
            )));
        }
        if breaks[0] < 0.0 || breaks.iter().any(|b| !b.is_finite()) {
            return Err(Error::config("step breakpoints must be finite and nonnegative"));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config("step breakpoints must be strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("step values must be finite"));
        }
        Ok(Self { breaks, values })
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(length, value)` for every piece.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.breaks.windows(2).zip(&self.values).map(|(w, &v)| (w[1] - w[0], v))
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (first, last) = (self.breaks[0], *self.breaks.last().unwrap());
        if x < first || x > last {
            return 0.0;
        }
        // first index with breaks[i] >= x
        let i = self.breaks.partition_point(|&b| b < x);
        if i == 0 {
            self.values[0]
        } else {
            self.values[i - 1]
        }
    }

    /// Pointwise combination on the merged breakpoint grid.
    pub fn combine(&self, other: &StepFunction, op: impl Fn(f64, f64) -> f64) -> StepFunction {
        let mut grid: Vec<f64> = self.breaks.iter().chain(&other.breaks).copied().collect();
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        let values = grid
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                op(self.eval(mid), other.eval(mid))
            })
            .collect();
        StepFunction { breaks: grid, values }
    }
}

/// `coef · x^exponent` on `(a, b]`; `b` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerFunction {
    pub coef: f64,
    pub exponent: f64,
    pub a: f64,
    pub b: f64,
}

impl PowerFunction {
    pub fn new(coef: f64, exponent: f64, a: f64, b: f64) -> Result<Self> {
        if !(a >= 0.0 && a < b && a.is_finite()) || b.is_nan() {
            return Err(Error::config(format!(
                "power interval needs 0 <= a < b, got ({a}, {b}]"
            )));
        }
        if !coef.is_finite() || !exponent.is_finite() {
            return Err(Error::config("power coefficient and exponent must be finite"));
        }
        Ok(Self { coef, exponent, a, b })
    }

    /// `c · x^{-1/α}`.
    pub fn stable(coef: f64, alpha: f64, a: f64, b: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::config(format!("alpha must be positive, got {alpha}")));
        }
        Self::new(coef, -1.0 / alpha, a, b)
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.a || x > self.b {
            0.0
        } else {
            self.coef * x.powf(self.exponent)
        }
    }

    /// `∫_lo^hi x^p dx` scaled by `scale ≥ 0`, with divergence reported.
    fn monomial_integral(scale: f64, p: f64, lo: f64, hi: f64) -> Extended {
        if scale == 0.0 || lo >= hi {
            return Extended::Finite(0.0);
        }
        if p == -1.0 {
            if lo == 0.0 || hi.is_infinite() {
                return Extended::Infinite;
            }
            return Extended::Finite(scale * (hi / lo).ln());
        }
        let q = p + 1.0;
        if (lo == 0.0 && q < 0.0) || (hi.is_infinite() && q > 0.0) {
            return Extended::Infinite;
        }
        let upper = if hi.is_infinite() { 0.0 } else { hi.powf(q) };
        let lower = if lo == 0.0 { 0.0 } else { lo.powf(q) };
        Extended::Finite(scale * (upper - lower) / q)
    }

    /// Subinterval of `(a, b]` where `|f| > level` (`above`) or `|f| ≤ level`.
    fn level_set(&self, level: f64, above: bool) -> Vec<(f64, f64)> {
        let c = self.coef.abs();
        let k = self.exponent;
        if c == 0.0 || k == 0.0 {
            return if (c > level) == above {
                vec![(self.a, self.b)]
            } else {
                vec![]
            };
        }
        // |f(x)| > level  <=>  x^k > level / c
        let cross = (level / c).powf(1.0 / k);
        let (lo_side, hi_side) = ((self.a, cross.min(self.b)), (cross.max(self.a), self.b));
        let big_on_left = k < 0.0;
        let part = if above == big_on_left { lo_side } else { hi_side };
        if part.0 < part.1 {
            vec![part]
        } else {
            vec![]
        }
    }
}

/// Arbitrary evaluator on `(a, b]`; integrals by quadrature.
#[derive(Clone)]
pub struct CustomFunction {
    pub name: String,
    pub a: f64,
    pub b: f64,
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl CustomFunction {
    pub fn new(name: impl Into<String>, a: f64, b: f64, eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            a,
            b,
            eval: Arc::new(eval),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.a || x > self.b {
            0.0
        } else {
            (self.eval)(x)
        }
    }
}

impl fmt::Debug for CustomFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CustomFunction({}, ({}, {}])", self.name, self.a, self.b)
    }
}

/// An integrand `f` on `[0, ∞)`.
#[derive(Debug, Clone)]
pub enum Integrand {
    Step(StepFunction),
    Power(PowerFunction),
    Custom(CustomFunction),
}

impl Integrand {
    /// `value · 1_{[lo, hi]}`.
    pub fn indicator(lo: f64, hi: f64, value: f64) -> Result<Self> {
        Ok(Integrand::Step(StepFunction::new(vec![lo, hi], vec![value])?))
    }

    pub fn step(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Ok(Integrand::Step(StepFunction::new(breaks, values)?))
    }

    pub fn power(coef: f64, exponent: f64, a: f64, b: f64) -> Result<Self> {
        Ok(Integrand::Power(PowerFunction::new(coef, exponent, a, b)?))
    }

    /// `c · x^{-1/α}` on `(a, b]`.
    pub fn stable(coef: f64, alpha: f64, a: f64, b: f64) -> Result<Self> {
        Ok(Integrand::Power(PowerFunction::stable(coef, alpha, a, b)?))
    }

    pub fn custom(name: &str, a: f64, b: f64, eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Integrand::Custom(CustomFunction::new(name, a, b, eval))
    }

    pub fn zero() -> Self {
        Integrand::Step(StepFunction {
            breaks: vec![0.0, 1.0],
            values: vec![0.0],
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Integrand::Step(s) => s.eval(x),
            Integrand::Power(p) => p.eval(x),
            Integrand::Custom(c) => c.eval(x),
        }
    }

    /// Smallest interval containing the support.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Integrand::Step(s) => (s.breaks[0], *s.breaks.last().unwrap()),
            Integrand::Power(p) => (p.a, p.b),
            Integrand::Custom(c) => (c.a, c.b),
        }
    }

    /// `λ{f ≠ 0}`; for custom integrands the length of the declared interval.
    pub fn support_measure(&self) -> Extended {
        match self {
            Integrand::Step(s) => Extended::Finite(s.pieces().filter(|&(_, v)| v != 0.0).map(|(l, _)| l).sum()),
            Integrand::Power(p) => {
                if p.coef == 0.0 {
                    Extended::Finite(0.0)
                } else {
                    Extended::from(p.b - p.a)
                }
            }
            Integrand::Custom(c) => Extended::from(c.b - c.a),
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        match self {
            Integrand::Step(s) => s.values.iter().all(|&v| v >= 0.0),
            Integrand::Power(p) => p.coef >= 0.0,
            Integrand::Custom(c) => {
                let n = 512;
                let hi = if c.b.is_finite() { c.b } else { c.a + 1e3 };
                (1..=n).all(|i| c.eval(c.a + (hi - c.a) * i as f64 / n as f64) >= 0.0)
            }
        }
    }

    pub fn scaled(&self, factor: f64) -> Integrand {
        match self {
            Integrand::Step(s) => Integrand::Step(StepFunction {
                breaks: s.breaks.clone(),
                values: s.values.iter().map(|v| v * factor).collect(),
            }),
            Integrand::Power(p) => Integrand::Power(PowerFunction {
                coef: p.coef * factor,
                ..*p
            }),
            Integrand::Custom(c) => {
                let inner = c.clone();
                Integrand::custom(&format!("{factor}*{}", c.name), c.a, c.b, move |x| {
                    factor * inner.eval(x)
                })
            }
        }
    }

    /// `f²` when it stays in the step or power family.
    pub fn squared(&self) -> Option<Integrand> {
        match self {
            Integrand::Step(s) => Some(Integrand::Step(StepFunction {
                breaks: s.breaks.clone(),
                values: s.values.iter().map(|v| v * v).collect(),
            })),
            Integrand::Power(p) => Some(Integrand::Power(PowerFunction {
                coef: p.coef * p.coef,
                exponent: 2.0 * p.exponent,
                ..*p
            })),
            Integrand::Custom(_) => None,
        }
    }

    /// Pointwise sum; defined for step functions only.
    pub fn add(&self, other: &Integrand) -> Result<Integrand> {
        match (self, other) {
            (Integrand::Step(a), Integrand::Step(b)) => Ok(Integrand::Step(a.combine(b, |x, y| x + y))),
            _ => Err(Error::config("pointwise sums are implemented for step integrands only")),
        }
    }

    /// `λ g(|f|)` for a function with `g(0) = 0`.
    pub fn integrate_abs(&self, g: &dyn Fn(f64) -> f64) -> Result<Extended> {
        self.integrate_composed(&|y: f64| g(y.abs()))
    }

    /// `λ g(f)` for a function with `g(0) = 0`.
    pub fn integrate_composed(&self, g: &dyn Fn(f64) -> f64) -> Result<Extended> {
        match self {
            Integrand::Step(s) => {
                let mut total = 0.0;
                for (len, v) in s.pieces() {
                    if v == 0.0 {
                        continue;
                    }
                    let gv = g(v);
                    if !gv.is_finite() {
                        return Ok(Extended::Infinite);
                    }
                    total += len * gv;
                }
                Ok(Extended::Finite(total))
            }
            _ => {
                let (a, b) = self.support();
                let h = |x: f64| g(self.eval(x));
                match quad::integrate(&h, a, b, QuadOptions::default())? {
                    Integral::Converged { value, .. } => Ok(Extended::Finite(value)),
                    Integral::Divergent => Ok(Extended::Infinite),
                }
            }
        }
    }

    /// `λ|f|^ℓ`, exact for step and power integrands.
    pub fn abs_moment(&self, ell: f64) -> Result<Extended> {
        match self {
            Integrand::Step(s) => Ok(Extended::Finite(
                s.pieces()
                    .filter(|&(_, v)| v != 0.0)
                    .map(|(l, v)| l * v.abs().powf(ell))
                    .sum(),
            )),
            Integrand::Power(p) => Ok(PowerFunction::monomial_integral(
                p.coef.abs().powf(ell),
                p.exponent * ell,
                p.a,
                p.b,
            )),
            Integrand::Custom(_) => self.integrate_abs(&|y| y.powf(ell)),
        }
    }

    /// Signed moment `λf^ℓ` for integer `ℓ ≥ 1`; `None` when divergent.
    pub fn moment(&self, ell: u32) -> Result<Option<f64>> {
        let e = ell as i32;
        let value = match self {
            Integrand::Step(s) => Extended::Finite(s.pieces().map(|(l, v)| l * v.powi(e)).sum()),
            Integrand::Power(p) => {
                let m = PowerFunction::monomial_integral(1.0, p.exponent * ell as f64, p.a, p.b);
                match m {
                    Extended::Finite(x) => Extended::Finite(p.coef.powi(e) * x),
                    Extended::Infinite => Extended::Infinite,
                }
            }
            Integrand::Custom(_) => self.integrate_composed(&|y| y.powi(e))?,
        };
        Ok(value.finite())
    }

    /// `λ|f|^ℓ 1{|f| > level}` when `above`, else `λ|f|^ℓ 1{|f| ≤ level}`.
    pub fn truncated_abs_moment(&self, ell: f64, level: f64, above: bool) -> Result<Extended> {
        let keep = |y: f64| (y.abs() > level) == above;
        match self {
            Integrand::Step(s) => Ok(Extended::Finite(
                s.pieces()
                    .filter(|&(_, v)| v != 0.0 && keep(v))
                    .map(|(l, v)| l * v.abs().powf(ell))
                    .sum(),
            )),
            Integrand::Power(p) => {
                let mut total = 0.0;
                for (lo, hi) in p.level_set(level, above) {
                    match PowerFunction::monomial_integral(p.coef.abs().powf(ell), p.exponent * ell, lo, hi) {
                        Extended::Finite(x) => total += x,
                        Extended::Infinite => return Ok(Extended::Infinite),
                    }
                }
                Ok(Extended::Finite(total))
            }
            Integrand::Custom(_) => self.integrate_composed(&|y| if keep(y) { y.abs().powf(ell) } else { 0.0 }),
        }
    }

    /// `∫_lo^hi f(x) dx`.
    pub fn integral_over(&self, lo: f64, hi: f64) -> Result<Extended> {
        match self {
            Integrand::Step(s) => {
                let total = s
                    .breaks
                    .windows(2)
                    .zip(&s.values)
                    .map(|(w, &v)| v * (w[1].min(hi) - w[0].max(lo)).max(0.0))
                    .sum();
                Ok(Extended::Finite(total))
            }
            Integrand::Power(p) => {
                let (l, h) = (lo.max(p.a), hi.min(p.b));
                if l >= h {
                    return Ok(Extended::Finite(0.0));
                }
                Ok(match PowerFunction::monomial_integral(1.0, p.exponent, l, h) {
                    Extended::Finite(x) => Extended::Finite(p.coef * x),
                    Extended::Infinite => Extended::Infinite,
                })
            }
            Integrand::Custom(c) => {
                let (l, h) = (lo.max(c.a), hi.min(c.b));
                if l >= h {
                    return Ok(Extended::Finite(0.0));
                }
                let g = |x: f64| c.eval(x);
                Ok(match quad::integrate(&g, l, h, QuadOptions::default())? {
                    Integral::Converged { value, .. } => Extended::Finite(value),
                    Integral::Divergent => Extended::Infinite,
                })
            }
        }
    }

    /// Parses the CLI mini-language.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let num = |s: &str| -> Result<f64> {
            match s.trim() {
                "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
                t => t
                    .parse::<f64>()
                    .map_err(|_| Error::config(format!("bad number '{t}' in integrand spec"))),
            }
        };
        if let Some(rest) = spec.strip_prefix("pc:") {
            let (bs, vs) = rest
                .split_once(";v=")
                .ok_or_else(|| Error::config("step spec needs ';v=' before the values"))?;
            let breaks = bs.split(',').map(num).collect::<Result<Vec<_>>>()?;
            let values = vs.split(',').map(num).collect::<Result<Vec<_>>>()?;
            return Integrand::step(breaks, values);
        }
        if let Some(rest) = spec.strip_prefix("pow:") {
            let (mut c, mut exponent, mut a, mut b) = (1.0, None, 0.0, 1.0);
            for kv in rest.split(',') {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| Error::config(format!("expected key=value, got '{kv}'")))?;
                let v = num(v)?;
                match k.trim() {
                    "c" => c = v,
                    "alpha" => {
                        if !(v > 0.0) {
                            return Err(Error::config("alpha must be positive"));
                        }
                        exponent = Some(-1.0 / v)
                    }
                    "k" => exponent = Some(v),
                    "a" => a = v,
                    "b" => b = v,
                    other => return Err(Error::config(format!("unknown power parameter '{other}'"))),
                }
            }
            let exponent = exponent.ok_or_else(|| Error::config("power spec needs alpha= or k="))?;
            return Integrand::power(c, exponent, a, b);
        }
        Err(Error::config(format!(
            "integrand spec must start with 'pc:' or 'pow:', got '{spec}'"
        )))
    }
}

impl fmt::Display for Integrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: &[f64]| xs.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",");
        match self {
            Integrand::Step(s) => write!(f, "pc:{};v={}", join(&s.breaks), join(&s.values)),
            Integrand::Power(p) => write!(f, "pow:c={},k={},a={},b={}", p.coef, p.exponent, p.a, p.b),
            Integrand::Custom(c) => write!(f, "custom:{}", c.name),
        }
    }
}
