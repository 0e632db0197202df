//! Samplers built on the H-series `Γf = Σ H(S_n p(U_n)) f(U_n)`.
//!
//! `S_n` are the arrivals of a unit-rate Poisson process, `U_n` are i.i.d.
//! with density `p` on the base space and `H = E1^{-1}`. Each sampler takes
//! the replicate's random stream; [`replicate`] maps a sampler over
//! replicate indices with per-index streams.

use std::fmt;
use std::sync::Arc;

use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::extended::Extended;
use crate::integrand::Integrand;
use crate::jumpcalc::{InverseFn, JumpPath};
use crate::par::Exec;
use crate::rng::{SeedPolicy, Stream};
use crate::specfun::h_unchecked;

/// Distribution of the marks `U_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaseDensity {
    /// Uniform on `[0, horizon]`.
    Uniform,
    /// `e^{−u}` on `[0, ∞)`.
    Exponential,
    /// `(P−1)(1+u)^{−P}` on `[0, ∞)`, `P > 1`.
    Pareto(f64),
}

impl BaseDensity {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "uniform" | "uniform01" => Ok(BaseDensity::Uniform),
            "exp" | "exponential" => Ok(BaseDensity::Exponential),
            _ => {
                let p = s
                    .strip_prefix("pareto:")
                    .ok_or_else(|| Error::config(format!("unknown density '{s}'")))?
                    .parse::<f64>()
                    .map_err(|_| Error::config(format!("bad pareto parameter in '{s}'")))?;
                Ok(BaseDensity::Pareto(p))
            }
        }
    }

    #[inline]
    fn sample(&self, horizon: f64, rng: &mut Stream) -> f64 {
        match *self {
            BaseDensity::Uniform => horizon * rng.uniform(),
            BaseDensity::Exponential => rng.exponential(),
            BaseDensity::Pareto(p) => rng.uniform().powf(-1.0 / (p - 1.0)) - 1.0,
        }
    }

    #[inline]
    pub fn density(&self, u: f64, horizon: f64) -> f64 {
        match *self {
            BaseDensity::Uniform => {
                if (0.0..=horizon).contains(&u) {
                    1.0 / horizon
                } else {
                    0.0
                }
            }
            BaseDensity::Exponential => (-u).exp(),
            BaseDensity::Pareto(p) => (p - 1.0) * (1.0 + u).powf(-p),
        }
    }
}

impl fmt::Display for BaseDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseDensity::Uniform => f.write_str("uniform"),
            BaseDensity::Exponential => f.write_str("exp"),
            BaseDensity::Pareto(p) => write!(f, "pareto:{p}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HSeriesConfig {
    pub terms: usize,
    pub base_density: BaseDensity,
    /// Width of the uniform base space, and the display window of paths.
    pub horizon: f64,
    pub seed: u64,
}

impl HSeriesConfig {
    pub fn new(terms: usize, base_density: BaseDensity, horizon: f64, seed: u64) -> Result<Self> {
        let cfg = Self {
            terms,
            base_density,
            horizon,
            seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `terms` on the uniform base `[0, 1]`.
    pub fn unit(terms: usize, seed: u64) -> Self {
        Self {
            terms,
            base_density: BaseDensity::Uniform,
            horizon: 1.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.terms == 0 {
            return Err(Error::config("the H-series needs at least one term"));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::config(format!(
                "horizon must be positive and finite, got {}",
                self.horizon
            )));
        }
        if let BaseDensity::Pareto(p) = self.base_density {
            if !(p > 1.0) {
                return Err(Error::config(format!("pareto parameter must exceed 1, got {p}")));
            }
        }
        Ok(())
    }

    pub fn seeds(&self) -> SeedPolicy {
        SeedPolicy::new(self.seed)
    }
}

/// Multipliers `K_n` of the jumps.
#[derive(Clone)]
pub enum RewardKind {
    None,
    /// `K = ±1` with `P(K = 1) = (1 + β)/2`.
    Bernoulli(f64),
    /// `K = Q(V)` for a quantile function `Q` and `V` uniform.
    Quantile(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl RewardKind {
    pub fn bernoulli(beta: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&beta) {
            return Err(Error::config(format!(
                "bernoulli reward needs beta in [-1, 1], got {beta}"
            )));
        }
        Ok(RewardKind::Bernoulli(beta))
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "none" => Ok(RewardKind::None),
            other => {
                let b = other
                    .strip_prefix("bernoulli:")
                    .ok_or_else(|| Error::config(format!("unknown reward '{other}'")))?
                    .parse::<f64>()
                    .map_err(|_| Error::config(format!("bad bernoulli parameter in '{other}'")))?;
                RewardKind::bernoulli(b)
            }
        }
    }

    #[inline]
    pub fn draw(&self, rng: &mut Stream) -> f64 {
        match self {
            RewardKind::None => 1.0,
            RewardKind::Bernoulli(beta) => {
                if rng.uniform() < 0.5 * (1.0 + beta) {
                    1.0
                } else {
                    -1.0
                }
            }
            RewardKind::Quantile(q) => q(rng.uniform()),
        }
    }
}

impl fmt::Debug for RewardKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RewardKind::None => f.write_str("none"),
            RewardKind::Bernoulli(b) => write!(f, "bernoulli:{b}"),
            RewardKind::Quantile(_) => f.write_str("quantile"),
        }
    }
}

/// Maps `sampler` over replicate indices `0..reps`, each with its own stream.
pub fn replicate<T, F>(exec: Exec, seeds: SeedPolicy, reps: u64, sampler: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut Stream) -> T + Sync + Send,
{
    exec.map(reps, |i| sampler(&mut seeds.stream(i)))
}

/// First `n` arrivals of a unit-rate Poisson process.
pub fn sample_arrivals(n: usize, rng: &mut Stream) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::config("need at least one arrival"));
    }
    let mut s = 0.0;
    Ok((0..n)
        .map(|_| {
            s += rng.exponential();
            s
        })
        .collect())
}

/// Visits the `(U_n, H_n)` of one H-series realization in arrival order.
#[inline]
fn for_each_jump(config: &HSeriesConfig, rng: &mut Stream, mut visit: impl FnMut(f64, f64, &mut Stream)) {
    let mut s = 0.0;
    for _ in 0..config.terms {
        s += rng.exponential();
        let u = config.base_density.sample(config.horizon, rng);
        let level = s * config.base_density.density(u, config.horizon);
        let h = if level > 0.0 { h_unchecked(level) } else { 0.0 };
        visit(u, h, rng);
    }
}

/// Truncated Gamma path: jumps `H(S_n p(U_n))` at times `U_n`, sorted.
pub fn sample_gamma_path(config: &HSeriesConfig, rng: &mut Stream) -> Result<JumpPath> {
    config.validate()?;
    let mut jumps = Vec::with_capacity(config.terms);
    for_each_jump(config, rng, |u, h, _| jumps.push((u, h)));
    JumpPath::from_jumps(jumps)
}

/// One replicate of `Γ^{(κ)} f = Σ K_n H_n f(U_n)`.
pub fn sample_gamma_integral(f: &Integrand, config: &HSeriesConfig, reward: &RewardKind, rng: &mut Stream) -> f64 {
    let mut total = 0.0;
    for_each_jump(config, rng, |u, h, rng| {
        let k = reward.draw(rng);
        let v = f.eval(u);
        if v != 0.0 {
            total += k * h * v;
        }
    });
    total
}

/// `Γ_t` from `terms` H-series terms on the uniform base `[0, t]`.
#[inline]
pub fn sample_gamma_value(t: f64, terms: usize, rng: &mut Stream) -> f64 {
    let mut s = 0.0;
    let mut total = 0.0;
    for _ in 0..terms {
        s += rng.exponential();
        total += h_unchecked(s / t);
    }
    total
}

/// `S_t = Γ_{t/2} − Γ'_{t/2}` with independent terms.
pub fn sample_symmetric(t: f64, config: &HSeriesConfig, rng: &mut Stream) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("t must be positive, got {t}")));
    }
    let a = sample_gamma_value(0.5 * t, config.terms, rng);
    let b = sample_gamma_value(0.5 * t, config.terms, rng);
    Ok(a - b)
}

/// `√2 · W(Γ_{t/2})`: a Gaussian with random variance `2Γ_{t/2}`.
pub fn sample_subordinated_wiener(t: f64, config: &HSeriesConfig, rng: &mut Stream) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("t must be positive, got {t}")));
    }
    let g = sample_gamma_value(0.5 * t, config.terms, rng);
    let z: f64 = StandardNormal.sample(rng);
    Ok((2.0 * g).sqrt() * z)
}

/// Inverse `R_v = inf{t : Γ_t > v}` of a truncated Gamma path; `Infinite`
/// past the path's total mass.
pub fn sample_inverse_path(config: &HSeriesConfig, v_max: f64, rng: &mut Stream) -> Result<InverseFn> {
    if !(v_max > 0.0) {
        return Err(Error::domain(format!("v_max must be positive, got {v_max}")));
    }
    sample_gamma_path(config, rng)?.rcll_inverse()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionRule {
    /// `a_j = f(u_{j−1})`
    Left,
    /// `a_j = n ∫_{u_{j−1}}^{u_j} f`
    Average,
}

impl PartitionRule {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "left" => Ok(PartitionRule::Left),
            "average" => Ok(PartitionRule::Average),
            other => Err(Error::config(format!("unknown partition rule '{other}'"))),
        }
    }
}

fn check_unit_support(f: &Integrand, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::config("partition needs n >= 1"));
    }
    let (lo, hi) = f.support();
    if lo < 0.0 || hi > 1.0 {
        return Err(Error::precondition(format!(
            "partition schemes need f supported in [0, 1], got [{lo}, {hi}]"
        )));
    }
    Ok(())
}

/// Step values `a_j` on the uniform grid `u_j = j/n`.
pub fn partition_coefficients(f: &Integrand, n: usize, rule: PartitionRule) -> Result<Vec<f64>> {
    check_unit_support(f, n)?;
    let nf = n as f64;
    (1..=n)
        .map(|j| {
            let (lo, hi) = ((j - 1) as f64 / nf, j as f64 / nf);
            match rule {
                // Right limit, so that a step already constant on the cell is exact.
                PartitionRule::Left => Ok(match f {
                    Integrand::Step(_) => f.eval(lo.next_up()),
                    _ => f.eval(lo),
                }),
                PartitionRule::Average => match f.integral_over(lo, hi)? {
                    Extended::Finite(v) => Ok(nf * v),
                    Extended::Infinite => Err(Error::domain(format!("f is not integrable on [{lo}, {hi}]"))),
                },
            }
        })
        .collect()
}

/// `Σ a_j (Γ_{u_j} − Γ_{u_{j−1}})` with i.i.d. `Gamma(1/n, 1)` increments.
pub fn sample_partition_path(f: &Integrand, n: usize, rule: PartitionRule, rng: &mut Stream) -> Result<f64> {
    let coeffs = partition_coefficients(f, n, rule)?;
    Ok(sample_partition_with(&coeffs, rng))
}

/// Partition sample for precomputed step values.
pub fn sample_partition_with(coeffs: &[f64], rng: &mut Stream) -> f64 {
    let shape = 1.0 / coeffs.len() as f64;
    let gamma = Gamma::new(shape, 1.0).expect("shape is positive");
    coeffs.iter().map(|a| a * gamma.sample(rng)).sum()
}

/// `ε_n = ‖f − g‖²₂` for the step approximation `g` on `n` cells.
pub fn partition_error(f: &Integrand, n: usize, rule: PartitionRule) -> Result<Extended> {
    check_unit_support(f, n)?;
    if !f.abs_moment(2.0)?.is_finite() {
        return Ok(Extended::Infinite);
    }
    let coeffs = partition_coefficients(f, n, rule)?;
    let squared = f.squared();
    let nf = n as f64;
    let mut total = 0.0;
    for (j, &a) in coeffs.iter().enumerate() {
        let (lo, hi) = (j as f64 / nf, (j + 1) as f64 / nf);
        let cell = match &squared {
            Some(sq) => {
                let f2 = sq.integral_over(lo, hi)?.to_f64();
                let f1 = f.integral_over(lo, hi)?.to_f64();
                f2 - 2.0 * a * f1 + a * a * (hi - lo)
            }
            None => {
                let shifted = Integrand::custom("residual", lo, hi, {
                    let f = f.clone();
                    move |x| (f.eval(x) - a).powi(2)
                });
                shifted.integral_over(lo, hi)?.to_f64()
            }
        };
        total += cell;
    }
    Ok(Extended::Finite(total.max(0.0)))
}

/// Least-squares fit of `ln E R_N^p` against `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    /// `−∞` when some remainder moment vanished.
    pub slope: f64,
    pub points: Vec<(usize, f64)>,
}

/// Fits the decay of `E R_N^p` for the remainder `R_N = Σ_{n>N} H_n f(U_n)`
/// on the uniform base over `f`'s support.
///
/// `S_{N+k} = S_N + S'_k` with `S_N ~ Gamma(N, 1)`, so the first `N` terms are
/// never simulated. Even `p` is required, except `p = 1` for the mean.
pub fn remainder_decay_probe(
    f: &Integrand,
    p: u32,
    n_list: &[usize],
    reps: u64,
    seed: u64,
    exec: Exec,
) -> Result<DecayFit> {
    if p != 1 && !p.is_multiple_of(2) {
        return Err(Error::precondition(format!(
            "remainder probe needs an even moment order (or p = 1), got {p}"
        )));
    }
    if n_list.len() < 2 {
        return Err(Error::precondition("slope fit needs at least two truncation levels"));
    }
    if !f.is_nonnegative() {
        return Err(Error::precondition("remainder probe needs f >= 0"));
    }
    let (lo, hi) = f.support();
    if !hi.is_finite() {
        return Err(Error::precondition("remainder probe needs f with bounded support"));
    }
    let width = hi - lo;
    let seeds = SeedPolicy::new(seed).derive("remainder");
    let mut points = Vec::with_capacity(n_list.len());
    for &big_n in n_list {
        let per_rep = replicate(exec, seeds.derive(&big_n.to_string()), reps, |rng| {
            let mut s = if big_n == 0 {
                0.0
            } else {
                Gamma::new(big_n as f64, 1.0).expect("positive shape").sample(rng)
            };
            let stop = s + 60.0 * width;
            let mut r = 0.0;
            while s < stop {
                s += rng.exponential();
                let u = lo + width * rng.uniform();
                r += h_unchecked(s / width) * f.eval(u);
            }
            r.powi(p as i32)
        });
        let mean = crate::par::kahan_sum(per_rep.iter().copied()) / reps as f64;
        points.push((big_n, mean));
    }
    if points.iter().any(|&(_, m)| !(m > 0.0)) {
        return Ok(DecayFit {
            slope: f64::NEG_INFINITY,
            points,
        });
    }
    let xs: Vec<f64> = points.iter().map(|&(n, _)| n as f64).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, m)| m.ln()).collect();
    Ok(DecayFit {
        slope: least_squares_slope(&xs, &ys),
        points,
    })
}

pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::par::mean_se;

    fn seeds() -> SeedPolicy {
        SeedPolicy::new(2024)
    }

    #[test]
    fn right_difference_quotients_vanish() {
        let cfg = HSeriesConfig::unit(200, 5);
        let path = sample_gamma_path(&cfg, &mut seeds().stream(9)).unwrap();
        for a in [0.1, 0.4, 0.7] {
            let q = |h: f64| (path.amass(a + h) - path.amass(a)) / h;
            assert_eq!(q(1e-12), 0.0);
            assert!(q(1e-12) <= q(0.3));
        }
    }

    #[test]
    fn arrivals_increase() {
        let mut rng = Stream::new(1);
        let s = sample_arrivals(5, &mut rng).unwrap();
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert!(sample_arrivals(0, &mut rng).is_err());
        let firsts = replicate(Exec::Sequential, seeds(), 100_000, |r| {
            sample_arrivals(5, r).unwrap()[4]
        });
        let (m, se) = mean_se(&firsts);
        assert!((m - 5.0).abs() < 3.0 * se, "{m} ± {se}");
    }

    #[test]
    fn config_validation() {
        assert!(HSeriesConfig::new(0, BaseDensity::Uniform, 1.0, 0).is_err());
        assert!(HSeriesConfig::new(1, BaseDensity::Pareto(1.0), 1.0, 0).is_err());
        assert_eq!(BaseDensity::parse("pareto:1.5").unwrap(), BaseDensity::Pareto(1.5));
        assert!(BaseDensity::parse("normal").is_err());
        assert!(RewardKind::parse("bernoulli:2").is_err());
    }

    #[test]
    fn one_term_path_has_one_jump() {
        let cfg = HSeriesConfig::unit(1, 0);
        let p = sample_gamma_path(&cfg, &mut Stream::new(3)).unwrap();
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn uniform_heights_are_decreasing_in_arrival_order() {
        let cfg = HSeriesConfig::unit(200, 0);
        let mut hs = Vec::new();
        for_each_jump(&cfg, &mut Stream::new(11), |_, h, _| hs.push(h));
        assert!(hs.windows(2).all(|w| w[0] > w[1]));
        assert!(hs.iter().all(|&h| h > 0.0));
    }

    #[test]
    fn deterministic_under_parallelism() {
        let cfg = HSeriesConfig::unit(50, 9);
        let f = Integrand::power(1.0, 1.0, 0.0, 1.0).unwrap();
        let run = |exec| {
            replicate(exec, cfg.seeds(), 500, |r| {
                sample_gamma_integral(&f, &cfg, &RewardKind::None, r)
            })
        };
        let a = run(Exec::Sequential);
        let b = run(Exec::with_jobs(3));
        assert_eq!(a, b);
    }

    #[test]
    fn unit_integral_is_standard_gamma() {
        let cfg = HSeriesConfig::unit(200, 5);
        let f = Integrand::indicator(0.0, 1.0, 1.0).unwrap();
        let xs = replicate(Exec::with_jobs(2), cfg.seeds(), 20_000, |r| {
            sample_gamma_integral(&f, &cfg, &RewardKind::None, r)
        });
        let (m, se) = mean_se(&xs);
        assert!((m - 1.0).abs() < 3.0 * se);
        let sq: Vec<f64> = xs.iter().map(|x| (x - 1.0).powi(2)).collect();
        let (v, vse) = mean_se(&sq);
        assert!((v - 1.0).abs() < 3.0 * vse, "{v} ± {vse}");
    }

    #[test]
    fn symmetric_reward_has_zero_mean() {
        let cfg = HSeriesConfig::unit(200, 6);
        let f = Integrand::indicator(0.0, 1.0, 1.0).unwrap();
        let reward = RewardKind::bernoulli(0.0).unwrap();
        let xs = replicate(Exec::Sequential, cfg.seeds(), 20_000, |r| {
            sample_gamma_integral(&f, &cfg, &reward, r)
        });
        let (m, se) = mean_se(&xs);
        assert!(m.abs() < 3.0 * se);
    }

    #[test]
    fn symmetric_variance_is_t() {
        let cfg = HSeriesConfig::unit(100, 8);
        let t = 2.0;
        let xs = replicate(Exec::Sequential, cfg.seeds(), 20_000, |r| {
            sample_symmetric(t, &cfg, r).unwrap()
        });
        let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let (v, se) = mean_se(&sq);
        assert!((v - t).abs() < 3.0 * se, "{v} ± {se}");
        assert!(sample_symmetric(0.0, &cfg, &mut Stream::new(0)).is_err());
    }

    #[test]
    fn inverse_paths_are_monotone_and_refine() {
        let coarse = HSeriesConfig::new(20, BaseDensity::Uniform, 1.0, 0).unwrap();
        let fine = HSeriesConfig::new(2000, BaseDensity::Uniform, 1.0, 0).unwrap();
        let mut jumps = [0.0; 2];
        for (slot, cfg) in [coarse, fine].iter().enumerate() {
            let mut total = 0.0;
            for i in 0..200 {
                let inv = sample_inverse_path(cfg, 1.0, &mut cfg.seeds().stream(i)).unwrap();
                let vals: Vec<f64> = (0..100).map(|k| inv.eval(k as f64 * 0.01).to_f64()).collect();
                assert!(vals.windows(2).all(|w| w[0] <= w[1]));
                total += inv.max_jump();
            }
            jumps[slot] = total;
        }
        assert!(jumps[1] < jumps[0]);
    }

    #[test]
    fn partition_examples() {
        let x = Integrand::power(1.0, 1.0, 0.0, 1.0).unwrap();
        for n in [1usize, 10, 100] {
            let nf = n as f64;
            let left = partition_error(&x, n, PartitionRule::Left).unwrap().to_f64();
            let avg = partition_error(&x, n, PartitionRule::Average).unwrap().to_f64();
            assert!((left - 1.0 / (3.0 * nf * nf)).abs() < 1e-12);
            assert!((avg - 1.0 / (12.0 * nf * nf)).abs() < 1e-12);
        }
        let step = Integrand::parse("pc:0,0.5,1;v=2,1").unwrap();
        assert!(partition_error(&step, 2, PartitionRule::Left).unwrap().to_f64().abs() < 1e-15);
        let mut rng = Stream::new(1);
        assert_eq!(
            sample_partition_path(&x, 1, PartitionRule::Left, &mut rng).unwrap(),
            0.0
        );
        let wide = Integrand::indicator(0.0, 2.0, 1.0).unwrap();
        assert!(partition_error(&wide, 4, PartitionRule::Left).is_err());
    }

    #[test]
    fn partition_error_custom_matches_closed_form() {
        let x = Integrand::custom("x", 0.0, 1.0, |x| x);
        let e = partition_error(&x, 10, PartitionRule::Average).unwrap().to_f64();
        assert!((e - 1.0 / 1200.0).abs() < 1e-12);
    }

    #[test]
    fn partition_sampler_mean() {
        let x = Integrand::power(1.0, 1.0, 0.0, 1.0).unwrap();
        let coeffs = partition_coefficients(&x, 20, PartitionRule::Average).unwrap();
        let xs = replicate(Exec::Sequential, seeds(), 50_000, |r| sample_partition_with(&coeffs, r));
        let (m, se) = mean_se(&xs);
        assert!((m - 0.5).abs() < 3.0 * se);
    }

    #[test]
    fn remainder_probe_rejects_bad_input() {
        let f = Integrand::indicator(0.0, 1.0, 1.0).unwrap();
        assert!(remainder_decay_probe(&f, 3, &[1, 2], 10, 0, Exec::Sequential).is_err());
        assert!(remainder_decay_probe(&f, 2, &[4], 10, 0, Exec::Sequential).is_err());
    }

    #[test]
    fn remainder_mean_halves() {
        let f = Integrand::indicator(0.0, 1.0, 1.0).unwrap();
        let fit = remainder_decay_probe(&f, 1, &[2, 4, 6, 8], 20_000, 3, Exec::Sequential).unwrap();
        assert!(fit.slope <= -(2f64.ln()) + 0.1, "{fit:?}");
    }

    #[test]
    fn pareto_base_beats_exponential_base() {
        let f = Integrand::indicator(0.0, 10.0, 1.0).unwrap();
        let deficit = |density| {
            let cfg = HSeriesConfig::new(500, density, 1.0, 17).unwrap();
            let xs = replicate(Exec::Sequential, cfg.seeds(), 2_000, |r| {
                sample_gamma_integral(&f, &cfg, &RewardKind::None, r)
            });
            10.0 - mean_se(&xs).0
        };
        let pareto = deficit(BaseDensity::Pareto(1.1));
        let exp = deficit(BaseDensity::Exponential);
        assert!(pareto < exp, "pareto {pareto} vs exp {exp}");
    }
}
