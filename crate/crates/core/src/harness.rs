//! Monte Carlo verification against closed forms, and the check suite.
//!
//! Every check draws from streams derived from `(seed, check name)`, so a
//! check's output does not depend on which other checks run or on the worker
//! count. Reports are JSON lines.

use std::io::Write;

use serde::Serialize;

use crate::analytic::{self, MomentVector, ThorinLaw, ThorinRepr};
use crate::error::{Error, Result};
use crate::integrand::Integrand;
use crate::martingales::{self, MartingaleKind};
use crate::modular::{self, ModularKind};
use crate::par::{kahan_sum, mean_se, Exec};
use crate::rng::{SeedPolicy, Stream};
use crate::sim::{self, BaseDensity, HSeriesConfig, PartitionRule, RewardKind};
use crate::specfun::{self, BracketedEquation};

pub const Z_MAX: f64 = 3.0;
pub const DEFAULT_TERMS: usize = 200;
pub const DEFAULT_REPS: u64 = 100_000;

/// Mean of replicates against a target, judged by `|z| ≤ Z_MAX`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McReport {
    pub estimate: f64,
    pub std_error: f64,
    pub reps: u64,
    pub target: f64,
    pub z: f64,
    pub pass: bool,
}

impl McReport {
    pub fn from_estimate(estimate: f64, std_error: f64, reps: u64, target: f64) -> Self {
        let diff = estimate - target;
        let z = if std_error > 0.0 {
            diff / std_error
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        };
        Self {
            estimate,
            std_error,
            reps,
            target,
            z,
            pass: z.abs() <= Z_MAX,
        }
    }

    pub fn from_samples(xs: &[f64], target: f64) -> Self {
        let (m, se) = mean_se(xs);
        Self::from_estimate(m, se, xs.len() as u64, target)
    }
}

/// Mean of replicates against an interval widened by `Z_MAX` standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalReport {
    pub estimate: f64,
    pub std_error: f64,
    pub reps: u64,
    pub lower: f64,
    pub upper: f64,
    pub pass: bool,
}

/// Empirical probability against an upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub estimate: f64,
    pub std_error: f64,
    pub reps: u64,
    pub bound: f64,
    pub pass: bool,
}

/// Two-sample Kolmogorov–Smirnov test at level 1%.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsReport {
    pub statistic: f64,
    pub critical: f64,
    pub n: usize,
    pub m: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|value − target| ≤ tolerance`
    Close,
    /// `value ≤ target + tolerance`
    AtMost,
    /// `value == target`
    Equal,
}

/// A deterministic quantity against a target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValueReport {
    pub value: f64,
    pub target: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl ValueReport {
    pub fn close(value: f64, target: f64, tolerance: f64) -> Self {
        Self {
            value,
            target,
            tolerance,
            relation: Relation::Close,
            pass: (value - target).abs() <= tolerance,
        }
    }

    pub fn at_most(value: f64, target: f64, tolerance: f64) -> Self {
        Self {
            value,
            target,
            tolerance,
            relation: Relation::AtMost,
            pass: value <= target + tolerance,
        }
    }

    pub fn equal(value: f64, target: f64) -> Self {
        Self {
            value,
            target,
            tolerance: 0.0,
            relation: Relation::Equal,
            pass: value == target,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    Mc(McReport),
    Interval(IntervalReport),
    Bound(BoundReport),
    Ks(KsReport),
    Value(ValueReport),
}

impl Outcome {
    pub fn pass(&self) -> bool {
        match self {
            Outcome::Mc(r) => r.pass,
            Outcome::Interval(r) => r.pass,
            Outcome::Bound(r) => r.pass,
            Outcome::Ks(r) => r.pass,
            Outcome::Value(r) => r.pass,
        }
    }
}

/// One line of a suite report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub item: String,
    #[serde(flatten)]
    pub outcome: Outcome,
}

/// Shared Monte Carlo settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub terms: usize,
    pub reps: u64,
    pub seed: u64,
    pub exec: Exec,
}

impl McConfig {
    pub fn new(reps: u64, seed: u64, exec: Exec) -> Self {
        Self {
            terms: DEFAULT_TERMS,
            reps,
            seed,
            exec,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::config("need at least one replicate"));
        }
        if self.terms == 0 {
            return Err(Error::config("the H-series needs at least one term"));
        }
        Ok(())
    }

    fn seeds(&self, label: &str) -> SeedPolicy {
        SeedPolicy::new(self.seed).derive(label)
    }

    /// Uniform base over a bounded support, exponential base otherwise.
    fn series_for(&self, f: &Integrand) -> Result<HSeriesConfig> {
        let (lo, hi) = f.support();
        if lo < 0.0 {
            return Err(Error::precondition("integrands must live on [0, ∞)"));
        }
        if hi.is_finite() {
            HSeriesConfig::new(self.terms, BaseDensity::Uniform, hi.max(f64::MIN_POSITIVE), self.seed)
        } else {
            HSeriesConfig::new(self.terms, BaseDensity::Exponential, 1.0, self.seed)
        }
    }
}

fn integral_samples(f: &Integrand, reward: &RewardKind, cfg: &McConfig, label: &str) -> Result<Vec<f64>> {
    cfg.validate()?;
    let series = cfg.series_for(f)?;
    Ok(sim::replicate(cfg.exec, cfg.seeds(label), cfg.reps, |rng| {
        sim::sample_gamma_integral(f, &series, reward, rng)
    }))
}

/// `E e^{−θΓf}` against the Laplace transform, one report per `θ`.
pub fn verify_laplace(f: &Integrand, thetas: &[f64], cfg: &McConfig) -> Result<Vec<McReport>> {
    if !f.is_nonnegative() {
        return Err(Error::precondition("Laplace check needs f >= 0"));
    }
    let xs = integral_samples(f, &RewardKind::None, cfg, "laplace")?;
    thetas
        .iter()
        .map(|&theta| {
            let target = analytic::laplace_gamma(f, theta)?;
            let ys: Vec<f64> = xs.iter().map(|x| (-theta * x).exp()).collect();
            Ok(McReport::from_samples(&ys, target))
        })
        .collect()
}

/// Real and imaginary parts of `E e^{iθΓ^{(β)}f}` against the closed form,
/// two reports per `θ`.
pub fn verify_fourier(f: &Integrand, thetas: &[f64], beta: f64, cfg: &McConfig) -> Result<Vec<McReport>> {
    let xs = integral_samples(f, &RewardKind::bernoulli(beta)?, cfg, &format!("fourier:{beta}"))?;
    let mut out = Vec::with_capacity(2 * thetas.len());
    for &theta in thetas {
        let target = analytic::fourier_gamma(f, theta, beta)?;
        let re: Vec<f64> = xs.iter().map(|x| (theta * x).cos()).collect();
        let im: Vec<f64> = xs.iter().map(|x| (theta * x).sin()).collect();
        out.push(McReport::from_samples(&re, target.re));
        out.push(McReport::from_samples(&im, target.im));
    }
    Ok(out)
}

/// `E(Γf)^p` against the moment formula.
pub fn verify_moments(f: &Integrand, ps: &[usize], cfg: &McConfig) -> Result<Vec<McReport>> {
    if !f.is_nonnegative() {
        return Err(Error::precondition("moment check needs f >= 0"));
    }
    let p_max = ps.iter().copied().max().unwrap_or(0);
    if ps.iter().any(|&p| p == 0 || p > 6) {
        return Err(Error::domain("moment orders must lie in 1..=6"));
    }
    let m = MomentVector::from_integrand(f, p_max)?;
    let xs = integral_samples(f, &RewardKind::None, cfg, "moments")?;
    ps.iter()
        .map(|&p| {
            let target = analytic::moments_from_levy(&m, p)?;
            let ys: Vec<f64> = xs.iter().map(|x| x.powi(p as i32)).collect();
            Ok(McReport::from_samples(&ys, target))
        })
        .collect()
}

/// `E(Γf)^p` inside the bounds from the support measure.
pub fn verify_moment_bounds(f: &Integrand, p: usize, cfg: &McConfig, label: &str) -> Result<IntervalReport> {
    let (lower, upper) = analytic::pnorm_bounds(f, p as f64)?;
    let xs = integral_samples(f, &RewardKind::None, cfg, label)?;
    let ys: Vec<f64> = xs.iter().map(|x| x.powi(p as i32)).collect();
    let (estimate, std_error) = mean_se(&ys);
    Ok(IntervalReport {
        estimate,
        std_error,
        reps: cfg.reps,
        lower,
        upper,
        pass: estimate >= lower - Z_MAX * std_error && estimate <= upper + Z_MAX * std_error,
    })
}

/// `E[Γ_a Γ_c] = a + ac`, with both values read off one path.
pub fn verify_projection(a: f64, c: f64, cfg: &McConfig) -> Result<McReport> {
    cfg.validate()?;
    if !(a >= 0.0 && c > 0.0 && a <= c) {
        return Err(Error::precondition(format!(
            "projection needs 0 <= a <= c, got a={a}, c={c}"
        )));
    }
    let series = HSeriesConfig::new(cfg.terms, BaseDensity::Uniform, c, cfg.seed)?;
    let xs: Vec<Result<f64>> = sim::replicate(cfg.exec, cfg.seeds("projection"), cfg.reps, |rng| {
        let path = sim::sample_gamma_path(&series, rng)?;
        Ok(path.amass(a) * path.amass(c))
    });
    let xs = xs.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(McReport::from_samples(&xs, a + a * c))
}

/// `P(|Γ^{(β)}f| > ε)` against the Chebyshev-type bound: `(3/ε)Φ1(f)`, or
/// `(1/ε)Φ2(f)` when `β = 0`.
pub fn verify_tail_bound(f: &Integrand, beta: f64, eps: f64, cfg: &McConfig) -> Result<BoundReport> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::domain(format!("ε must lie in (0, 1/2], got {eps}")));
    }
    let bound = if beta == 0.0 {
        modular::modular_value(&ModularKind::Phi2, f)?.to_f64() / eps
    } else {
        3.0 * modular::modular_value(&ModularKind::Phi1, f)?.to_f64() / eps
    };
    let xs = integral_samples(f, &RewardKind::bernoulli(beta)?, cfg, "tail")?;
    let hits: Vec<f64> = xs.iter().map(|x| if x.abs() > eps { 1.0 } else { 0.0 }).collect();
    let (p, _) = mean_se(&hits);
    let std_error = (p * (1.0 - p) / cfg.reps as f64).sqrt();
    Ok(BoundReport {
        estimate: p,
        std_error,
        reps: cfg.reps,
        bound,
        pass: p <= bound + Z_MAX * std_error,
    })
}

/// Two-sample Kolmogorov–Smirnov statistic with the 1% critical value
/// `1.628·√((n+m)/(nm))`.
pub fn two_sample_ks(a: &[f64], b: &[f64]) -> Result<KsReport> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::precondition("KS test needs two nonempty samples"));
    }
    if a.iter().chain(b).any(|x| x.is_nan()) {
        return Err(Error::domain("KS test samples contain NaN"));
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < n && j < m {
        let v = xs[i].min(ys[j]);
        while i < n && xs[i] <= v {
            i += 1;
        }
        while j < m && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let critical = 1.628 * ((n + m) as f64 / (n * m) as f64).sqrt();
    Ok(KsReport {
        statistic: d,
        critical,
        n,
        m,
        pass: d < critical,
    })
}

/// Random step integrand on `[0, c]`, `c ~ U(0.5, 3)`, with 1–4 pieces and
/// values in `[0.25, 2]`.
pub fn random_step(rng: &mut Stream) -> Integrand {
    let c = 0.5 + 2.5 * rng.uniform();
    let pieces = 1 + (4.0 * rng.uniform()) as usize;
    let mut inner: Vec<f64> = (1..pieces).map(|_| c * rng.uniform()).collect();
    inner.sort_by(f64::total_cmp);
    let mut breaks = vec![0.0];
    breaks.extend(inner);
    breaks.push(c);
    breaks.dedup();
    let values = (1..breaks.len()).map(|_| 0.25 + 1.75 * rng.uniform()).collect();
    Integrand::step(breaks, values).expect("breaks are increasing")
}

/// Martingale identities at time `t`, from one shared set of `(Γ_t, S_t)`
/// draws.
pub fn verify_martingales(t: f64, cfg: &McConfig) -> Result<Vec<(String, McReport)>> {
    cfg.validate()?;
    let series = HSeriesConfig::unit(cfg.terms, cfg.seed);
    let draws: Vec<Result<(f64, f64)>> =
        sim::replicate(cfg.exec, cfg.seeds(&format!("martingales:{t}")), cfg.reps, |rng| {
            let g = sim::sample_gamma_value(t, cfg.terms, rng);
            let s = sim::sample_symmetric(t, &series, rng)?;
            Ok((g, s))
        });
    let draws = draws.into_iter().collect::<Result<Vec<_>>>()?;
    let stat =
        |f: &dyn Fn(f64, f64) -> Result<f64>| -> Result<Vec<f64>> { draws.iter().map(|&(g, s)| f(g, s)).collect() };
    let mut out = Vec::new();
    for theta in [-0.5, 0.5, 1.0] {
        let kind = MartingaleKind::gamma(theta)?;
        let xs = stat(&|g, _| martingales::exp_martingale(kind, t, g))?;
        out.push((
            format!("exp_mean:gamma:theta={theta}"),
            McReport::from_samples(&xs, 1.0),
        ));
    }
    for theta in [-0.5, 0.5] {
        let kind = MartingaleKind::symmetric(theta)?;
        let xs = stat(&|_, s| martingales::exp_martingale(kind, t, s))?;
        out.push((
            format!("exp_mean:symmetric:theta={theta}"),
            McReport::from_samples(&xs, 1.0),
        ));
    }
    for n in 1..=4 {
        let xs = stat(&|g, _| martingales::poly_martingale(MartingaleKind::Gamma(0.0), n, t, g))?;
        out.push((format!("poly:gamma:n={n}"), McReport::from_samples(&xs, 0.0)));
        let xs = stat(&|_, s| martingales::poly_martingale(MartingaleKind::Symmetric(0.0), n, t, s))?;
        out.push((format!("poly:symmetric:n={n}"), McReport::from_samples(&xs, 0.0)));
    }
    let theta = 2.0;
    let xs = stat(&|g, _| martingales::laplace_martingale(t, theta, g, 1))?;
    out.push((
        format!("laplace:theta={theta}"),
        McReport::from_samples(&xs, 1.0 / theta),
    ));
    let theta = 0.5;
    let kind = MartingaleKind::gamma(theta)?;
    let xs = stat(&|g, _| Ok(martingales::exp_martingale(kind, t, g)?.powi(2)))?;
    let target = martingales::oblique_bracket_base(theta)?.powf(t);
    out.push((
        format!("second_moment:theta={theta}"),
        McReport::from_samples(&xs, target),
    ));
    Ok(out)
}

/// Names of the checks in the default suite, in report order.
pub const DEFAULT_MANIFEST: [&str; 16] = [
    "e1_roundtrip",
    "jump_inequality",
    "laplace",
    "fourier",
    "moments",
    "moment_bounds",
    "truncation_decay",
    "partition_error",
    "qv_modular",
    "f_norm",
    "martingales",
    "fixed_point",
    "inverse_law",
    "projection",
    "thorin_roundtrip",
    "ks_subordinated",
];

/// Checks runnable by name but left out of the default suite.
pub const EXTRA_CHECKS: [&str; 1] = ["tail_bound"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Replaces every check's default replicate count.
    pub reps: Option<u64>,
    pub exec: Exec,
}

impl SuiteOptions {
    pub fn new(seed: u64, exec: Exec) -> Self {
        Self { seed, reps: None, exec }
    }

    fn mc(&self, default_reps: u64) -> McConfig {
        McConfig::new(self.reps.unwrap_or(default_reps), self.seed, self.exec)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SuiteReport {
    pub records: Vec<CheckRecord>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.outcome.pass())
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.outcome.pass())
    }

    pub fn to_jsonl(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            s.push_str(&serde_json::to_string(r).expect("records serialize"));
            s.push('\n');
        }
        s
    }

    pub fn write_jsonl(&self, out: &mut dyn Write) -> Result<()> {
        out.write_all(self.to_jsonl().as_bytes())?;
        Ok(())
    }
}

/// Check names from a manifest file: one per line, `#` starts a comment.
pub fn parse_manifest(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_owned)
        .collect()
}

pub fn is_known_check(name: &str) -> bool {
    DEFAULT_MANIFEST.contains(&name) || EXTRA_CHECKS.contains(&name)
}

/// Runs the named checks in order. Unknown names are rejected before any
/// check runs.
pub fn run_suite(manifest: &[String], opts: &SuiteOptions) -> Result<SuiteReport> {
    if let Some(bad) = manifest.iter().find(|n| !is_known_check(n)) {
        return Err(Error::config(format!("unknown check '{bad}'")));
    }
    let mut report = SuiteReport::default();
    for name in manifest {
        report.records.extend(run_check(name, opts)?);
    }
    Ok(report)
}

pub fn default_manifest() -> Vec<String> {
    DEFAULT_MANIFEST.iter().map(|s| s.to_string()).collect()
}

pub fn run_check(name: &str, opts: &SuiteOptions) -> Result<Vec<CheckRecord>> {
    let mut items: Vec<(String, Outcome)> = Vec::new();
    let opts = SuiteOptions {
        seed: SeedPolicy::new(opts.seed).derive(name).master_seed,
        ..*opts
    };
    match name {
        "e1_roundtrip" => {
            let worst = log_grid(1e-8, 20.0, 100)
                .into_iter()
                .map(|x| Ok((specfun::exp_integral_e1(specfun::h_inverse(x)?)? - x).abs() / x))
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            items.push((
                "max_rel_error".into(),
                Outcome::Value(ValueReport::at_most(worst, 0.0, 1e-10)),
            ));
        }
        "jump_inequality" => {
            let grid = log_grid(1e-4, 20.0, 50);
            let mut worst = f64::NEG_INFINITY;
            for &x in &grid {
                for &y in &grid {
                    let excess = specfun::h_inverse(x + y)? - (-x).exp() * specfun::h_inverse(y)?;
                    worst = worst.max(excess);
                }
            }
            items.push((
                "max_excess".into(),
                Outcome::Value(ValueReport::at_most(worst, 0.0, 1e-12)),
            ));
        }
        "laplace" => {
            let f = Integrand::indicator(0.0, 1.0, 1.0)?;
            let thetas = [1.0, 0.5, 2.0];
            for (theta, r) in thetas.iter().zip(verify_laplace(&f, &thetas, &opts.mc(DEFAULT_REPS))?) {
                items.push((format!("theta={theta}"), Outcome::Mc(r)));
            }
        }
        "fourier" => {
            let f = Integrand::indicator(0.0, 1.0, 1.0)?;
            for beta in [0.0, 1.0] {
                let r = verify_fourier(&f, &[1.0], beta, &opts.mc(DEFAULT_REPS))?;
                items.push((format!("beta={beta}:theta=1:re"), Outcome::Mc(r[0])));
                items.push((format!("beta={beta}:theta=1:im"), Outcome::Mc(r[1])));
            }
        }
        "moments" => {
            let unit = Integrand::indicator(0.0, 1.0, 1.0)?;
            for (p, r) in [1, 2, 3]
                .iter()
                .zip(verify_moments(&unit, &[1, 2, 3], &opts.mc(DEFAULT_REPS))?)
            {
                items.push((format!("indicator:p={p}"), Outcome::Mc(r)));
            }
            let x = Integrand::power(1.0, 1.0, 0.0, 1.0)?;
            let r = verify_moments(&x, &[2], &opts.mc(DEFAULT_REPS))?;
            items.push(("identity:p=2".into(), Outcome::Mc(r[0])));
        }
        "moment_bounds" => {
            let mut rng = SeedPolicy::new(opts.seed).derive("integrands").stream(0);
            for i in 0..5 {
                let f = random_step(&mut rng);
                for p in [2, 3] {
                    let r = verify_moment_bounds(&f, p, &opts.mc(50_000), &format!("bounds:{i}"))?;
                    items.push((format!("{f}:p={p}"), Outcome::Interval(r)));
                }
            }
        }
        "truncation_decay" => {
            let f = Integrand::indicator(0.0, 1.0, 1.0)?;
            let fit = sim::remainder_decay_probe(
                &f,
                2,
                &[2, 4, 6, 8, 10],
                opts.reps.unwrap_or(DEFAULT_REPS),
                opts.seed,
                opts.exec,
            )?;
            items.push((
                "slope:p=2".into(),
                Outcome::Value(ValueReport::at_most(fit.slope, -(3f64.ln()) + 0.15, 0.0)),
            ));
        }
        "partition_error" => {
            let f = Integrand::power(1.0, 1.0, 0.0, 1.0)?;
            for n in [1usize, 10, 100] {
                let nf = (n * n) as f64;
                for (rule, target) in [
                    (PartitionRule::Left, 1.0 / (3.0 * nf)),
                    (PartitionRule::Average, 1.0 / (12.0 * nf)),
                ] {
                    let e = sim::partition_error(&f, n, rule)?.to_f64();
                    items.push((
                        format!("{rule:?}:n={n}").to_lowercase(),
                        Outcome::Value(ValueReport::close(e, target, 1e-12)),
                    ));
                }
            }
        }
        "qv_modular" => {
            for theta in [0.5, 1.0, 2.0] {
                let a = modular::qv_kernel_gauss(theta)?;
                let b = modular::qv_kernel_direct(theta)?;
                items.push((format!("theta={theta}"), Outcome::Value(ValueReport::close(a, b, 1e-8))));
            }
        }
        "f_norm" => {
            let unit = Integrand::indicator(0.0, 1.0, 1.0)?;
            let oracle = specfun::solve_bracketed(
                &BracketedEquation::new(|c: f64| (1.0 + 1.0 / c).ln() - c, 0.1, 2.0).with_tol(1e-15),
            )?;
            let n = modular::f_norm(&ModularKind::Phi1, &unit)?.to_f64();
            items.push((
                "unit_indicator".into(),
                Outcome::Value(ValueReport::close(n, oracle, 1e-9)),
            ));
            let mut rng = SeedPolicy::new(opts.seed).derive("pairs").stream(0);
            let mut worst = f64::NEG_INFINITY;
            for _ in 0..20 {
                let f = random_step(&mut rng);
                let g = random_step(&mut rng);
                let sum = f.add(&g)?;
                let norm = |h: &Integrand| modular::f_norm(&ModularKind::Phi1, h).map(|v| v.to_f64());
                worst = worst.max(norm(&sum)? - norm(&f)? - norm(&g)?);
            }
            items.push((
                "triangle:max_excess".into(),
                Outcome::Value(ValueReport::at_most(worst, 0.0, 1e-12)),
            ));
        }
        "martingales" => {
            for t in [0.5, 2.0] {
                for (item, r) in verify_martingales(t, &opts.mc(DEFAULT_REPS))? {
                    items.push((format!("t={t}:{item}"), Outcome::Mc(r)));
                }
            }
        }
        "fixed_point" => {
            let c = martingales::shifted_symmetric_fixed_point()?;
            items.push((
                "magnitude".into(),
                Outcome::Value(ValueReport::close(c.abs(), 0.714556, 1e-5)),
            ));
            items.push((
                "residual".into(),
                Outcome::Value(ValueReport::close(c - (1.0 - c * c).ln(), 0.0, 1e-12)),
            ));
        }
        "inverse_law" => {
            let cfg = opts.mc(DEFAULT_REPS);
            cfg.validate()?;
            let (ts, xs) = ([0.1, 0.5], [0.5, 1.0, 2.0]);
            let horizon = 4.0;
            let series = HSeriesConfig::new(cfg.terms, BaseDensity::Uniform, horizon, cfg.seed)?;
            let paths: Vec<Result<Vec<bool>>> = sim::replicate(cfg.exec, cfg.seeds("inverse"), cfg.reps, |rng| {
                let inv = sim::sample_inverse_path(&series, 0.5, rng)?;
                Ok(ts
                    .iter()
                    .flat_map(|&t| xs.iter().map(move |&x| (t, x)))
                    .map(|(t, x)| inv.eval(t).to_f64() > x)
                    .collect())
            });
            let paths = paths.into_iter().collect::<Result<Vec<_>>>()?;
            for (k, (t, x)) in ts.iter().flat_map(|&t| xs.iter().map(move |&x| (t, x))).enumerate() {
                let hits: Vec<f64> = paths.iter().map(|p| if p[k] { 1.0 } else { 0.0 }).collect();
                let target = analytic::gamma_cdf(x, t)?;
                let p = kahan_sum(hits.iter().copied()) / hits.len() as f64;
                let se = (target * (1.0 - target) / hits.len() as f64).sqrt();
                items.push((
                    format!("t={t}:x={x}"),
                    Outcome::Mc(McReport::from_estimate(p, se, cfg.reps, target)),
                ));
            }
            for (theta, t, expect) in [(0.5, 10.0, true), (1.0, 0.3, true), (1.0, 0.5, false)] {
                let got = analytic::inverse_moment_finite(theta, t)?;
                items.push((
                    format!("classifier:theta={theta}:t={t}"),
                    Outcome::Value(ValueReport::equal(got as u8 as f64, expect as u8 as f64)),
                ));
            }
        }
        "projection" => {
            let r = verify_projection(0.5, 1.0, &opts.mc(DEFAULT_REPS))?;
            items.push(("a=0.5:c=1".into(), Outcome::Mc(r)));
        }
        "thorin_roundtrip" => {
            let grid: Vec<f64> = (0..20).map(|i| 0.25 * i as f64).collect();
            for spec in ["pc:0,1;v=2", "pc:0,0.3,1;v=0.5,4"] {
                let f = Integrand::parse(spec)?;
                let k = analytic::thorin_from_integrand(&f)?;
                let law = match &k.repr {
                    ThorinRepr::PointMasses(m) => ThorinLaw::PointMasses(m.clone()),
                    ThorinRepr::Transport(_) => return Err(Error::precondition("step integrands give point masses")),
                };
                let back = analytic::thorin_from_integrand(&analytic::integrand_from_thorin(&law)?)?;
                let mut worst = 0.0f64;
                for &y in &grid {
                    worst = worst.max((k.k(y)? - back.k(y)?).abs());
                }
                items.push((spec.to_string(), Outcome::Value(ValueReport::at_most(worst, 0.0, 1e-9))));
            }
        }
        "ks_subordinated" => {
            let cfg = opts.mc(20_000);
            cfg.validate()?;
            let series = HSeriesConfig::unit(cfg.terms, cfg.seed);
            let a: Vec<Result<f64>> = sim::replicate(cfg.exec, cfg.seeds("symmetric"), cfg.reps, |rng| {
                sim::sample_symmetric(1.0, &series, rng)
            });
            let b: Vec<Result<f64>> = sim::replicate(cfg.exec, cfg.seeds("wiener"), cfg.reps, |rng| {
                sim::sample_subordinated_wiener(1.0, &series, rng)
            });
            let a = a.into_iter().collect::<Result<Vec<_>>>()?;
            let b = b.into_iter().collect::<Result<Vec<_>>>()?;
            items.push(("t=1".into(), Outcome::Ks(two_sample_ks(&a, &b)?)));
        }
        "tail_bound" => {
            let f = Integrand::indicator(0.0, 1.0, 0.01)?;
            for beta in [1.0, 0.0] {
                let r = verify_tail_bound(&f, beta, 0.5, &opts.mc(DEFAULT_REPS))?;
                items.push((format!("beta={beta}:eps=0.5"), Outcome::Bound(r)));
            }
        }
        other => return Err(Error::config(format!("unknown check '{other}'"))),
    }
    Ok(items
        .into_iter()
        .map(|(item, outcome)| CheckRecord {
            check: name.to_string(),
            item,
            outcome,
        })
        .collect())
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}
