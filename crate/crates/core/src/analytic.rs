//! Closed forms for Gamma integrals: transforms, moments, moment bounds, the
//! Thorin correspondence and the moment classifier of the inverse process.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};
use crate::extended::Extended;
use crate::integrand::Integrand;
use crate::quad::{self, Integral, QuadOptions};
use crate::specfun::{self, BracketedEquation};

fn finite_or_domain(x: Extended, what: &str) -> Result<f64> {
    x.finite()
        .ok_or_else(|| Error::domain(format!("{what} diverges for this integrand")))
}

/// `E e^{−θΓf} = exp(−λ ln(1 + θf))` for `f ≥ 0`.
pub fn laplace_gamma(f: &Integrand, theta: f64) -> Result<f64> {
    if !(theta >= 0.0) {
        return Err(Error::domain(format!("theta must be nonnegative, got {theta}")));
    }
    if !f.is_nonnegative() {
        return Err(Error::domain("the Laplace transform needs f >= 0"));
    }
    if theta == 0.0 {
        return Ok(1.0);
    }
    let exponent = finite_or_domain(f.integrate_composed(&|y| (theta * y).ln_1p())?, "λ ln(1 + θf)")?;
    Ok((-exponent).exp())
}

/// `E e^{iθΓ^{(β)}f} = exp(−½ λ ln(1 + θ²f²) + iβ λ arctan(θf))`.
pub fn fourier_gamma(f: &Integrand, theta: f64, beta: f64) -> Result<Complex64> {
    if !(-1.0..=1.0).contains(&beta) {
        return Err(Error::domain(format!("beta must lie in [-1, 1], got {beta}")));
    }
    if theta == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let t2 = theta * theta;
    let modulus = finite_or_domain(f.integrate_composed(&|y| 0.5 * (t2 * y * y).ln_1p())?, "λ ln(1 + θ²f²)")?;
    let phase = if beta == 0.0 {
        0.0
    } else {
        beta * finite_or_domain(f.integrate_composed(&|y| (theta * y).atan())?, "λ arctan(θf)")?
    };
    Ok(Complex64::from_polar((-modulus).exp(), phase))
}

/// Partitions of `n` as multiplicity vectors `j` (`j[ℓ-1]` parts of size ℓ),
/// in lexicographic order of the parts.
pub fn integer_partitions(n: usize) -> Vec<Vec<u32>> {
    fn rec(rest: usize, max: usize, parts: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(parts.clone());
            return;
        }
        for part in (1..=max.min(rest)).rev() {
            parts.push(part);
            rec(rest - part, part, parts, out);
            parts.pop();
        }
    }
    let mut raw = Vec::new();
    rec(n, n, &mut Vec::new(), &mut raw);
    raw.into_iter()
        .map(|parts| {
            let mut j = vec![0u32; n];
            for p in parts {
                j[p - 1] += 1;
            }
            j
        })
        .collect()
}

const MAX_EXACT_ORDER: usize = 20;

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

fn check_order(n: usize) -> Result<()> {
    if n == 0 || n > MAX_EXACT_ORDER {
        return Err(Error::domain(format!(
            "order must lie in 1..={MAX_EXACT_ORDER}, got {n}"
        )));
    }
    Ok(())
}

/// Partial Bell polynomial `B_{n,k}(x_1, ..., x_{n−k+1})`.
pub fn bell_partial(n: usize, k: usize, x: &[f64]) -> Result<f64> {
    check_order(n)?;
    if k == 0 || k > n {
        return Err(Error::domain(format!("need 1 <= k <= n, got k={k}, n={n}")));
    }
    if x.len() < n - k + 1 {
        return Err(Error::domain(format!(
            "B_{{{n},{k}}} needs {} arguments, got {}",
            n - k + 1,
            x.len()
        )));
    }
    let nf = factorial(n);
    let mut total = 0.0;
    for j in integer_partitions(n) {
        if j.iter().sum::<u32>() as usize != k {
            continue;
        }
        // n! / Π j_ℓ! (ℓ!)^{j_ℓ}
        let mut denom: u128 = 1;
        let mut prod = 1.0;
        for (l, &jl) in j.iter().enumerate() {
            if jl == 0 {
                continue;
            }
            denom *= factorial(jl as usize) * factorial(l + 1).pow(jl);
            prod *= x[l].powi(jl as i32);
        }
        total += (nf / denom) as f64 * prod;
    }
    Ok(total)
}

/// Moments `m_ℓ = λf^ℓ`, `ℓ = 1..=p`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector(pub Vec<f64>);

impl MomentVector {
    pub fn from_integrand(f: &Integrand, p: usize) -> Result<Self> {
        (1..=p as u32)
            .map(|l| f.moment(l)?.ok_or_else(|| Error::domain(format!("λf^{l} diverges"))))
            .collect::<Result<Vec<_>>>()
            .map(MomentVector)
    }
}

/// Summands `p!/(Π j_ℓ! ℓ^{j_ℓ}) Π m_ℓ^{j_ℓ}` of `E(Γf)^p`, one per partition.
pub fn moment_terms(m: &MomentVector, p: usize) -> Result<Vec<f64>> {
    check_order(p)?;
    if m.0.len() < p {
        return Err(Error::domain(format!("need {p} moments, got {}", m.0.len())));
    }
    let pf = factorial(p);
    let terms: Vec<f64> = integer_partitions(p)
        .into_iter()
        .map(|j| {
            let mut denom: u128 = 1;
            let mut prod = 1.0;
            for (l, &jl) in j.iter().enumerate() {
                if jl == 0 {
                    continue;
                }
                denom *= factorial(jl as usize) * ((l + 1) as u128).pow(jl);
                prod *= m.0[l].powi(jl as i32);
            }
            (pf / denom) as f64 * prod
        })
        .collect();
    // With m_1 = 0 and even p ≤ 6 every surviving partition uses even parts
    // or a square of an odd moment.
    if p.is_multiple_of(2) && p <= 6 && m.0[0] == 0.0 {
        debug_assert!(terms.iter().all(|&t| t >= 0.0));
    }
    Ok(terms)
}

/// `E(Γf)^p` from the Lévy moments `m_ℓ`.
pub fn moments_from_levy(m: &MomentVector, p: usize) -> Result<f64> {
    Ok(moment_terms(m, p)?.iter().sum())
}

/// Bounds on `E(Γf)^p` for `f ≥ 0` with support of measure `c`:
/// `Γ(c+p−1)/Γ(c) · μ_p ≤ E(Γf)^p ≤ Γ(c+p)/Γ(c) · μ_p`, with
/// `μ_p = λf^p / c` the mean of `f^p` over its support.
pub fn pnorm_bounds(f: &Integrand, p: f64) -> Result<(f64, f64)> {
    if !(p >= 1.0) {
        return Err(Error::domain(format!("p must be at least 1, got {p}")));
    }
    if !f.is_nonnegative() {
        return Err(Error::precondition("moment bounds need f >= 0"));
    }
    let c = f
        .support_measure()
        .finite()
        .ok_or_else(|| Error::precondition("moment bounds need a support of finite measure"))?;
    if c == 0.0 {
        return Ok((0.0, 0.0));
    }
    let mp = f
        .abs_moment(p)?
        .finite()
        .ok_or_else(|| Error::precondition(format!("λf^{p} diverges")))?;
    let mean = mp / c;
    let lg = ln_gamma(c);
    Ok((
        (ln_gamma(c + p - 1.0) - lg).exp() * mean,
        (ln_gamma(c + p) - lg).exp() * mean,
    ))
}

/// The law of `1/f(U)`, `U` uniform on `[0, 1]`.
#[derive(Clone)]
pub enum ThorinRepr {
    /// `(weight, location)` pairs.
    PointMasses(Vec<(f64, f64)>),
    /// `u ↦ 1/f(u)`; values may be infinite where `f` vanishes.
    Transport(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for ThorinRepr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThorinRepr::PointMasses(m) => write!(f, "PointMasses({m:?})"),
            ThorinRepr::Transport(_) => f.write_str("Transport"),
        }
    }
}

/// `k(y) = E e^{−y/f(U)}` together with its Thorin measure.
#[derive(Debug, Clone)]
pub struct ThorinDescriptor {
    pub repr: ThorinRepr,
}

impl ThorinDescriptor {
    pub fn k(&self, y: f64) -> Result<f64> {
        match &self.repr {
            ThorinRepr::PointMasses(m) => Ok(m.iter().map(|&(w, z)| w * (-y * z).exp()).sum()),
            ThorinRepr::Transport(inv) => {
                let g = |u: f64| {
                    let z = inv(u);
                    if z.is_finite() {
                        (-y * z).exp()
                    } else {
                        0.0
                    }
                };
                let (v, _) = quad::integrate_finite(&g, 0.0, 1.0, QuadOptions::default())?;
                Ok(v)
            }
        }
    }

    /// Necessary condition for complete monotonicity: divided differences of
    /// order `n = 1, 2, 3` on consecutive grid points have sign `(−1)^n`.
    pub fn passes_monotonicity_check(&self, grid: &[f64]) -> Result<bool> {
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::precondition("monotonicity grid must be strictly increasing"));
        }
        let mut diffs: Vec<f64> = grid.iter().map(|&y| self.k(y)).collect::<Result<_>>()?;
        for order in 1..=3 {
            let slack = 1e-9 * diffs.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            diffs = diffs
                .windows(2)
                .enumerate()
                .map(|(i, w)| (w[1] - w[0]) / (grid[i + order] - grid[i]))
                .collect();
            let sign = if order % 2 == 1 { -1.0 } else { 1.0 };
            if diffs.iter().any(|d| sign * d < -slack) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Thorin descriptor of `Γf` for `f ≥ 0` on `[0, 1]`. Where `f` vanishes the
/// Thorin mass sits at infinity and does not contribute to `k(y)`, `y > 0`.
pub fn thorin_from_integrand(f: &Integrand) -> Result<ThorinDescriptor> {
    let (lo, hi) = f.support();
    if lo < 0.0 || hi > 1.0 {
        return Err(Error::precondition(format!(
            "Thorin form needs f on [0, 1], got support [{lo}, {hi}]"
        )));
    }
    if !f.is_nonnegative() {
        return Err(Error::precondition("Thorin form needs f >= 0"));
    }
    let repr = match f {
        Integrand::Step(s) => ThorinRepr::PointMasses(
            s.pieces()
                .filter(|&(_, v)| v > 0.0)
                .map(|(len, v)| (len, 1.0 / v))
                .collect(),
        ),
        _ => {
            let f = f.clone();
            ThorinRepr::Transport(Arc::new(move |u| {
                let v = f.eval(u);
                if v > 0.0 {
                    1.0 / v
                } else {
                    f64::INFINITY
                }
            }))
        }
    };
    Ok(ThorinDescriptor { repr })
}

/// A distribution on `(0, ∞)` given to [`integrand_from_thorin`].
#[derive(Clone)]
pub enum ThorinLaw {
    PointMasses(Vec<(f64, f64)>),
    Cdf(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// `f(u) = 1/G^{-1}(u)` on `[0, 1]`.
pub fn integrand_from_thorin(law: &ThorinLaw) -> Result<Integrand> {
    match law {
        ThorinLaw::PointMasses(masses) => {
            if masses.is_empty() {
                return Err(Error::precondition("empty Thorin law"));
            }
            if masses.iter().any(|&(w, y)| !(w > 0.0 && y > 0.0 && y.is_finite())) {
                return Err(Error::precondition(
                    "point masses need positive weights at finite positive locations",
                ));
            }
            let total: f64 = masses.iter().map(|m| m.0).sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::precondition(format!("weights must sum to 1, got {total}")));
            }
            let mut sorted = masses.clone();
            sorted.sort_by(|a, b| a.1.total_cmp(&b.1));
            let mut breaks = vec![0.0];
            let mut values = Vec::new();
            let mut acc = 0.0;
            for (i, &(w, y)) in sorted.iter().enumerate() {
                acc += w;
                breaks.push(if i + 1 == sorted.len() { 1.0 } else { acc });
                values.push(1.0 / y);
            }
            Integrand::step(breaks, values)
        }
        ThorinLaw::Cdf(g) => {
            check_cdf(g.as_ref())?;
            let g = g.clone();
            Ok(Integrand::custom("thorin-quantile", 0.0, 1.0, move |u| {
                1.0 / quantile(g.as_ref(), u)
            }))
        }
    }
}

fn check_cdf(g: &dyn Fn(f64) -> f64) -> Result<()> {
    let grid: Vec<f64> = (-40..=40).map(|i| 10f64.powf(i as f64 / 4.0)).collect();
    let vals: Vec<f64> = grid.iter().map(|&y| g(y)).collect();
    if vals.iter().any(|v| !(0.0..=1.0).contains(v)) || vals.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::precondition("G must be a nondecreasing function into [0, 1]"));
    }
    if g(1e-300) > 1e-9 || g(1e300) < 1.0 - 1e-9 {
        return Err(Error::precondition("G must be a proper cdf on (0, ∞)"));
    }
    Ok(())
}

/// `inf{y : G(y) ≥ u}` by bracketing and bisection.
fn quantile(g: &dyn Fn(f64) -> f64, u: f64) -> f64 {
    let (mut lo, mut hi) = (1.0, 1.0);
    while g(lo) >= u && lo > 1e-300 {
        lo *= 0.5;
    }
    while g(hi) < u && hi < 1e300 {
        hi *= 2.0;
    }
    let eq = BracketedEquation::new(|y| g(y) - u, lo, hi).with_tol(1e-15);
    specfun::solve_bracketed(&eq).unwrap_or(hi)
}

/// `E R_t^{θ R_t} < ∞` for the inverse process `R`: always for `θ < 1`, for
/// `θ = 1` iff `t < 1/e`, never for `θ > 1`.
pub fn inverse_moment_finite(theta: f64, t: f64) -> Result<bool> {
    if !(theta > 0.0 && t > 0.0) {
        return Err(Error::domain(format!("theta and t must be positive, got {theta}, {t}")));
    }
    Ok(if theta < 1.0 {
        true
    } else if theta == 1.0 {
        t < (-1.0f64).exp()
    } else {
        false
    })
}

/// `P(Γ_x ≤ t) = ∫_0^t y^{x−1} e^{−y} dy / Γ(x)` by quadrature.
pub fn gamma_cdf(shape: f64, t: f64) -> Result<f64> {
    if !(shape > 0.0) {
        return Err(Error::domain(format!("shape must be positive, got {shape}")));
    }
    if t <= 0.0 {
        return Ok(0.0);
    }
    // Substituting y = s^{1/x} removes the singularity at 0:
    // ∫_0^t y^{x−1} e^{−y} dy = (1/x) ∫_0^{t^x} e^{−s^{1/x}} ds.
    let g = |s: f64| (-s.powf(1.0 / shape)).exp();
    let upper = t.powf(shape);
    let value = match quad::integrate(&g, 0.0, upper, QuadOptions::default())? {
        Integral::Converged { value, .. } => value,
        Integral::Divergent => unreachable!("bounded integrand on a bounded range"),
    };
    Ok((value / (shape * gamma(shape))).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn unit() -> Integrand {
        Integrand::indicator(0.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn laplace_examples() {
        for (t, theta) in [(1.0, 1.0), (2.5, 0.3), (0.5, 4.0)] {
            let f = Integrand::indicator(0.0, t, 1.0).unwrap();
            let l = laplace_gamma(&f, theta).unwrap();
            assert!((l - (1.0 + theta).powf(-t)).abs() < 1e-15);
        }
        assert_eq!(laplace_gamma(&unit(), 0.0).unwrap(), 1.0);
        // λ ln(1 + θx^{-2}) = π√θ
        let f = Integrand::stable(1.0, 0.5, 0.0, f64::INFINITY).unwrap();
        for theta in [0.25, 1.0, 4.0] {
            let l = laplace_gamma(&f, theta).unwrap();
            assert!((l - (-PI * theta.sqrt()).exp()).abs() < 1e-10, "θ={theta}: {l}");
        }
        let bad = Integrand::stable(1.0, 1.0, 0.0, f64::INFINITY).unwrap();
        assert!(matches!(laplace_gamma(&bad, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn fourier_examples() {
        let z = fourier_gamma(&unit(), 1.0, 0.0).unwrap();
        assert!((z.re - FRAC_1_SQRT_2).abs() < 1e-15 && z.im.abs() < 1e-15);
        assert_eq!(fourier_gamma(&unit(), 0.0, 0.5).unwrap(), Complex64::new(1.0, 0.0));
        let w = fourier_gamma(&unit(), 1.0, 1.0).unwrap();
        assert!((w.re - 0.5).abs() < 1e-15 && (w.im - 0.5).abs() < 1e-15);
        let f = Integrand::parse("pc:0,0.3,1.2;v=-1.5,0.7").unwrap();
        for theta in [0.2, 1.0, 3.0] {
            let a = fourier_gamma(&f, theta, 0.4).unwrap();
            let b = fourier_gamma(&f, -theta, 0.4).unwrap();
            assert!(a.norm() <= 1.0);
            assert!((a - b.conj()).norm() < 1e-15);
        }
    }

    #[test]
    fn laplace_multiplies_over_disjoint_supports() {
        let f = Integrand::parse("pc:0,0.5;v=2").unwrap();
        let g = Integrand::parse("pc:0.5,1.5;v=0.3").unwrap();
        let fg = f.add(&g).unwrap();
        let lhs = laplace_gamma(&f, 1.3).unwrap() * laplace_gamma(&g, 1.3).unwrap();
        assert!((lhs - laplace_gamma(&fg, 1.3).unwrap()).abs() < 1e-15);
    }

    /// Set partitions of `{0..n}` into exactly `k` blocks, counted by block sizes.
    fn brute_bell(n: usize, k: usize, x: &[f64]) -> f64 {
        fn rec(i: usize, n: usize, blocks: &mut Vec<usize>, k: usize, x: &[f64], total: &mut f64) {
            if i == n {
                if blocks.len() == k {
                    *total += blocks.iter().map(|&s| x[s - 1]).product::<f64>();
                }
                return;
            }
            for b in 0..blocks.len() {
                blocks[b] += 1;
                rec(i + 1, n, blocks, k, x, total);
                blocks[b] -= 1;
            }
            if blocks.len() < k {
                blocks.push(1);
                rec(i + 1, n, blocks, k, x, total);
                blocks.pop();
            }
        }
        let mut total = 0.0;
        rec(0, n, &mut Vec::new(), k, x, &mut total);
        total
    }

    #[test]
    fn bell_matches_set_partitions() {
        let x = [1.3, -0.7, 2.1, 0.4, 1.1, -1.9, 0.8];
        for n in 1..=7 {
            for k in 1..=n {
                let exact = bell_partial(n, k, &x).unwrap();
                let brute = brute_bell(n, k, &x);
                assert!((exact - brute).abs() < 1e-9 * brute.abs().max(1.0), "B_{n},{k}");
            }
            assert_eq!(bell_partial(n, 1, &x).unwrap(), x[n - 1]);
            assert!((bell_partial(n, n, &x).unwrap() - x[0].powi(n as i32)).abs() < 1e-12);
        }
        assert_eq!(bell_partial(3, 2, &[2.0, 5.0]).unwrap(), 30.0);
        assert!(bell_partial(3, 4, &x).is_err());
    }

    /// Complete Bell recursion `B_{n+1} = Σ C(n,i) B_{n−i} κ_{i+1}` on cumulants.
    fn bell_recursion(kappa: &[f64], p: usize) -> f64 {
        let mut b = vec![1.0];
        for n in 0..p {
            let mut next = 0.0;
            let mut binom = 1.0;
            for i in 0..=n {
                next += binom * b[n - i] * kappa[i];
                binom = binom * (n - i) as f64 / (i + 1) as f64;
            }
            b.push(next);
        }
        b[p]
    }

    #[test]
    fn moments_match_cumulant_recursion() {
        // The cumulants of Γf are κ_ℓ = (ℓ−1)! m_ℓ.
        let m = MomentVector(vec![0.7, 1.1, -0.4, 2.0, 0.3, 1.5, -0.2, 0.9]);
        for p in 1..=8 {
            let kappa: Vec<f64> = (0..p).map(|l| factorial(l) as f64 * m.0[l]).collect();
            let a = moments_from_levy(&m, p).unwrap();
            let b = bell_recursion(&kappa, p);
            assert!((a - b).abs() < 1e-10 * b.abs().max(1.0), "p={p}: {a} vs {b}");
        }
    }

    #[test]
    fn unit_moments_are_factorials() {
        let ones = MomentVector(vec![1.0; 10]);
        for p in 1..=10 {
            assert_eq!(moments_from_levy(&ones, p).unwrap(), factorial(p) as f64);
        }
        let m = MomentVector(vec![0.5, 1.0 / 3.0, 0.25]);
        assert!((moments_from_levy(&m, 2).unwrap() - 7.0 / 12.0).abs() < 1e-15);
        let (m1, m2, m3) = (0.5, 1.0 / 3.0, 0.25);
        let expect = 2.0 * m3 + 3.0 * m1 * m2 + m1 * m1 * m1;
        assert!((moments_from_levy(&m, 3).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn even_moment_terms_nonnegative_when_centred() {
        let m = MomentVector(vec![0.0, 1.2, -0.8, 0.6, 2.0, 0.4]);
        for p in [2, 4, 6] {
            assert!(moment_terms(&m, p).unwrap().iter().all(|&t| t >= 0.0));
        }
        // At p = 8 the partition {5, 3} contributes m_5·m_3 < 0 here.
        let m = MomentVector(vec![0.0, 0.1, 1.0, 0.1, -1.0, 0.1, 0.1, 0.1]);
        assert!(moment_terms(&m, 8).unwrap().iter().any(|&t| t < 0.0));
    }

    #[test]
    fn pnorm_examples() {
        let (lo, hi) = pnorm_bounds(&unit(), 2.0).unwrap();
        assert!((lo - 1.0).abs() < 1e-14 && (hi - 2.0).abs() < 1e-13);
        let (lo, hi) = pnorm_bounds(&unit(), 1.0).unwrap();
        assert!((lo - 1.0).abs() < 1e-14 && (hi - 1.0).abs() < 1e-14);
        let two = Integrand::indicator(0.0, 2.0, 1.0).unwrap();
        let (lo, hi) = pnorm_bounds(&two, 2.0).unwrap();
        assert!((lo - 2.0).abs() < 1e-12 && (hi - 6.0).abs() < 1e-12);
        let unbounded = Integrand::power(1.0, -2.0, 1.0, f64::INFINITY).unwrap();
        assert!(matches!(pnorm_bounds(&unbounded, 2.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn thorin_examples() {
        let a = 2.5;
        let k = thorin_from_integrand(&Integrand::indicator(0.0, 1.0, a).unwrap()).unwrap();
        assert!((k.k(1.7).unwrap() - (-1.7 / a).exp()).abs() < 1e-15);
        let two = thorin_from_integrand(&Integrand::parse("pc:0,0.5,1;v=2,1").unwrap()).unwrap();
        let y = 0.9;
        assert!((two.k(y).unwrap() - 0.5 * ((-y / 2.0).exp() + (-y).exp())).abs() < 1e-15);
        let grid: Vec<f64> = (0..30).map(|i| 0.05 * 1.2f64.powi(i)).collect();
        let x = thorin_from_integrand(&Integrand::power(1.0, 1.0, 0.0, 1.0).unwrap()).unwrap();
        assert!(x.passes_monotonicity_check(&grid).unwrap());
        // k(y) = E e^{-y/U} = y Γ(−1, y) = e^{−y} − y E1(y)
        let y: f64 = 0.8;
        let exact = (-y).exp() - y * specfun::exp_integral_e1(y).unwrap();
        assert!((x.k(y).unwrap() - exact).abs() < 1e-10);
    }

    #[test]
    fn thorin_roundtrip() {
        let law = ThorinLaw::PointMasses(vec![(0.2, 3.0), (0.5, 0.5), (0.3, 1.0)]);
        let f = integrand_from_thorin(&law).unwrap();
        let k = thorin_from_integrand(&f).unwrap();
        for i in 0..20 {
            let y = 0.1 * i as f64;
            let k_in = 0.2 * (-3.0 * y).exp() + 0.5 * (-0.5 * y).exp() + 0.3 * (-y).exp();
            assert!((k.k(y).unwrap() - k_in).abs() < 1e-12);
        }
        let two = integrand_from_thorin(&ThorinLaw::PointMasses(vec![(0.5, 0.5), (0.5, 1.0)])).unwrap();
        assert_eq!(two.to_string(), "pc:0,0.5,1;v=2,1");
        assert!(integrand_from_thorin(&ThorinLaw::PointMasses(vec![(0.5, 1.0)])).is_err());
    }

    #[test]
    fn thorin_from_cdf() {
        // 1/f(U) ~ Exp(1): k(y) = E e^{−yE} = 1/(1+y).
        let law = ThorinLaw::Cdf(Arc::new(|y: f64| if y <= 0.0 { 0.0 } else { -(-y).exp_m1() }));
        let f = integrand_from_thorin(&law).unwrap();
        let k = thorin_from_integrand(&f).unwrap();
        for y in [0.1, 1.0, 5.0] {
            assert!((k.k(y).unwrap() - 1.0 / (1.0 + y)).abs() < 1e-8, "{y}");
        }
        let improper = ThorinLaw::Cdf(Arc::new(|y: f64| 0.5 * (-(-y).exp_m1())));
        assert!(matches!(integrand_from_thorin(&improper), Err(Error::Precondition(_))));
    }

    #[test]
    fn inverse_moment_classifier() {
        assert!(inverse_moment_finite(0.5, 100.0).unwrap());
        assert!(inverse_moment_finite(1.0, 0.3).unwrap());
        assert!(!inverse_moment_finite(1.0, 0.5).unwrap());
        assert!(!inverse_moment_finite(1.2, 0.01).unwrap());
    }

    #[test]
    fn gamma_cdf_matches_regularized_incomplete_gamma() {
        for shape in [0.5, 1.0, 2.0] {
            for t in [0.1, 0.5, 3.0] {
                let q = gamma_cdf(shape, t).unwrap();
                let r = statrs::function::gamma::gamma_lr(shape, t);
                assert!((q - r).abs() < 1e-10, "{shape} {t}: {q} vs {r}");
            }
        }
        assert!((gamma_cdf(1.0, 0.5).unwrap() - (1.0 - (-0.5f64).exp())).abs() < 1e-13);
    }
}
