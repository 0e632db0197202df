#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod config;
mod output;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::process::ExitCode;

use clap::Parser;

use gammatime::analytic::{self, MomentVector};
use gammatime::harness::{self, McReport, SuiteOptions};
use gammatime::martingales::{self, MartingaleKind};
use gammatime::modular::{self, ModularKind};
use gammatime::sim::{self, BaseDensity, HSeriesConfig, PartitionRule, RewardKind};
use gammatime::{specfun, Error, Exec, Integrand, SeedPolicy};

use args::{Cli, Command, MartKind, MartingaleArgs, NormWhat, Rule, SimKind, SimulateArgs, VerifyArgs};
use output::{fmt15, Header, Sink};

/// Process exit codes.
mod exit {
    pub const CHECK_FAILED: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const NUMERIC: u8 = 3;
    pub const IO: u8 = 4;
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Domain(_) | Error::Numeric { .. } | Error::Precondition(_) => exit::NUMERIC,
        Error::Config(_) => exit::USAGE,
        Error::Io(_) => exit::IO,
    }
}

fn main() -> ExitCode {
    let argv: Vec<OsString> = std::env::args_os().collect();
    let cfg = match config::config_path(&argv) {
        Some(p) => match config::read_config(p.as_ref()) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("gammatime: {e}");
                return ExitCode::from(exit_code(&e));
            }
        },
        None => BTreeMap::new(),
    };
    let cli = match Cli::try_parse_from(config::merge(argv, &cfg)) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command, &cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(exit::CHECK_FAILED),
        Err(e) => {
            eprintln!("gammatime: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// `Ok(false)` when a check ran and failed.
fn run(command: Command, cfg: &BTreeMap<String, String>) -> gammatime::Result<bool> {
    match command {
        Command::E1 { v } => {
            println!("{}", fmt15(specfun::exp_integral_e1(v)?));
            Ok(true)
        }
        Command::Invert { x } => {
            println!("{}", fmt15(specfun::h_inverse(x)?));
            Ok(true)
        }
        Command::Simulate(a) => simulate(a, cfg),
        Command::Norm(a) => {
            let f = Integrand::parse(&a.f)?;
            let phi = ModularKind::parse(&a.phi)?;
            let v = match a.what {
                NormWhat::Norm => modular::f_norm(&phi, &f)?,
                NormWhat::Modular => modular::modular_value(&phi, &f)?,
            };
            println!("{}", output::fmt_extended(v));
            Ok(true)
        }
        Command::Moments { f, p } => {
            let f = Integrand::parse(&f)?;
            let m = MomentVector::from_integrand(&f, p)?;
            println!("{}", fmt15(analytic::moments_from_levy(&m, p)?));
            Ok(true)
        }
        Command::Transform(a) => {
            let f = Integrand::parse(&a.f)?;
            let mut header = Header::new("transform");
            header.push("f", &a.f).push("theta", join(&a.theta));
            if let Some(b) = a.beta {
                header.push("beta", b);
            }
            let mut sink = Sink::open(a.out.as_deref(), &header)?;
            match a.beta {
                None => {
                    sink.line("theta,laplace")?;
                    for &th in &a.theta {
                        sink.line(&format!("{},{}", fmt15(th), fmt15(analytic::laplace_gamma(&f, th)?)))?;
                    }
                }
                Some(beta) => {
                    sink.line("theta,re,im")?;
                    for &th in &a.theta {
                        let z = analytic::fourier_gamma(&f, th, beta)?;
                        sink.line(&format!("{},{},{}", fmt15(th), fmt15(z.re), fmt15(z.im)))?;
                    }
                }
            }
            sink.finish()?;
            Ok(true)
        }
        Command::Thorin(a) => {
            let f = Integrand::parse(&a.from_f)?;
            if a.points < 2 || !(a.y_max > 0.0) {
                return Err(Error::Config(
                    "thorin table needs at least 2 points and y-max > 0".into(),
                ));
            }
            let k = analytic::thorin_from_integrand(&f)?;
            let mut header = Header::new("thorin");
            header
                .push("from-f", &a.from_f)
                .push("y-max", a.y_max)
                .push("points", a.points);
            let mut sink = Sink::open(a.out.as_deref(), &header)?;
            sink.line("y,k")?;
            for i in 0..a.points {
                let y = a.y_max * i as f64 / (a.points - 1) as f64;
                sink.line(&format!("{},{}", fmt15(y), fmt15(k.k(y)?)))?;
            }
            sink.finish()?;
            Ok(true)
        }
        Command::Martingale(a) => martingale(a, cfg),
        Command::Verify(a) => verify(a, cfg),
    }
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn simulate(a: SimulateArgs, cfg: &BTreeMap<String, String>) -> gammatime::Result<bool> {
    let (seed, source) = config::resolve_seed(a.seed, cfg)?;
    let density = BaseDensity::parse(&a.density)?;
    let reward = RewardKind::parse(&a.reward)?;
    let series = HSeriesConfig::new(a.terms, density, a.horizon, seed)?;
    let exec = Exec::with_jobs(a.jobs);
    let kind_name = format!("{:?}", a.kind).to_lowercase();

    let mut header = Header::new("simulate");
    header
        .push("kind", &kind_name)
        .push("terms", a.terms)
        .push("density", density)
        .push("reward", &a.reward)
        .push("horizon", a.horizon);
    match a.kind {
        SimKind::Symmetric | SimKind::Subwiener => {
            header.push("t", a.t);
        }
        SimKind::Partition => {
            header
                .push("n", a.n)
                .push("rule", format!("{:?}", a.rule).to_lowercase());
        }
        SimKind::Inverse => {
            header.push("v-max", a.v_max).push("points", a.points);
        }
        _ => {}
    }
    if let Some(f) = &a.f {
        header.push("f", f);
    }
    if let Some(r) = a.reps {
        header.push("reps", r).push("jobs", a.jobs);
    }
    header.seed(seed, source);

    let seeds = SeedPolicy::new(seed).derive(&kind_name);
    let path_mode = a.reps.is_none() && matches!(a.kind, SimKind::Gamma | SimKind::Compound | SimKind::Inverse);
    if path_mode {
        let mut rng = seeds.stream(0);
        let path = sim::sample_gamma_path(&series, &mut rng)?;
        let mut sink = Sink::open(a.out.as_deref(), &header)?;
        let mut buf = Vec::new();
        match a.kind {
            SimKind::Gamma => path.write_csv(&mut buf)?,
            SimKind::Compound => {
                let marks: Vec<f64> = (0..path.len()).map(|_| reward.draw(&mut rng)).collect();
                path.compound(&marks)?.write_csv(&mut buf)?;
            }
            _ => {
                if a.points < 2 || !(a.v_max > 0.0) {
                    return Err(Error::Config(
                        "inverse grid needs at least 2 points and v-max > 0".into(),
                    ));
                }
                let inv = path.rcll_inverse()?;
                let grid: Vec<f64> = (0..a.points)
                    .map(|i| a.v_max * i as f64 / (a.points - 1) as f64)
                    .collect();
                inv.write_grid_csv(&grid, &mut buf)?;
            }
        }
        sink.raw(&buf)?;
        sink.finish()?;
        return Ok(true);
    }

    let reps = a.reps.unwrap_or(1);
    if reps == 0 {
        return Err(Error::Config("reps must be positive".into()));
    }
    let f = match &a.f {
        Some(s) => Integrand::parse(s)?,
        None => Integrand::indicator(0.0, a.horizon, 1.0)?,
    };
    let values: Vec<gammatime::Result<String>> = match a.kind {
        SimKind::Gamma => sim::replicate(exec, seeds, reps, |rng| {
            Ok(fmt15(sim::sample_gamma_integral(&f, &series, &RewardKind::None, rng)))
        }),
        SimKind::Compound => sim::replicate(exec, seeds, reps, |rng| {
            Ok(fmt15(sim::sample_gamma_integral(&f, &series, &reward, rng)))
        }),
        SimKind::Symmetric => sim::replicate(exec, seeds, reps, |rng| {
            Ok(fmt15(sim::sample_symmetric(a.t, &series, rng)?))
        }),
        SimKind::Subwiener => sim::replicate(exec, seeds, reps, |rng| {
            Ok(fmt15(sim::sample_subordinated_wiener(a.t, &series, rng)?))
        }),
        SimKind::Inverse => sim::replicate(exec, seeds, reps, |rng| {
            Ok(output::fmt_extended(
                sim::sample_inverse_path(&series, a.v_max, rng)?.eval(a.v_max),
            ))
        }),
        SimKind::Partition => {
            let rule = match a.rule {
                Rule::Left => PartitionRule::Left,
                Rule::Average => PartitionRule::Average,
            };
            let coeffs = sim::partition_coefficients(&f, a.n, rule)?;
            sim::replicate(exec, seeds, reps, |rng| {
                Ok(fmt15(sim::sample_partition_with(&coeffs, rng)))
            })
        }
    };
    let mut sink = Sink::open(a.out.as_deref(), &header)?;
    sink.line("rep,value")?;
    for (i, v) in values.into_iter().enumerate() {
        sink.line(&format!("{i},{}", v?))?;
    }
    sink.finish()?;
    Ok(true)
}

fn martingale(a: MartingaleArgs, cfg: &BTreeMap<String, String>) -> gammatime::Result<bool> {
    let (seed, _) = config::resolve_seed(a.seed, cfg)?;
    if a.reps == 0 || a.terms == 0 {
        return Err(Error::Config("reps and terms must be positive".into()));
    }
    if !(a.t > 0.0) {
        return Err(Error::Domain(format!("t must be positive, got {}", a.t)));
    }
    let kind = match a.kind {
        MartKind::Gamma => MartingaleKind::gamma(a.theta)?,
        MartKind::Symmetric => MartingaleKind::symmetric(a.theta)?,
    };
    let series = HSeriesConfig::unit(a.terms, seed);
    let exec = Exec::with_jobs(a.jobs);
    let t = a.t;
    let draws: Vec<gammatime::Result<f64>> = sim::replicate(
        exec,
        SeedPolicy::new(seed).derive("martingale"),
        a.reps,
        |rng| match kind {
            MartingaleKind::Gamma(_) => Ok(sim::sample_gamma_value(t, a.terms, rng)),
            MartingaleKind::Symmetric(_) => sim::sample_symmetric(t, &series, rng),
        },
    );
    let draws = draws.into_iter().collect::<gammatime::Result<Vec<f64>>>()?;
    let (values, target): (Vec<f64>, f64) = match a.check.as_str() {
        "mean" => (
            draws
                .iter()
                .map(|&x| martingales::exp_martingale(kind, t, x))
                .collect::<gammatime::Result<_>>()?,
            1.0,
        ),
        "bracket" => (
            draws
                .iter()
                .map(|&x| martingales::exp_martingale(kind, t, x).map(|m| m * m))
                .collect::<gammatime::Result<_>>()?,
            martingales::pth_moment_base(kind, 2.0)?.powf(t),
        ),
        other => {
            if let Some(n) = other.strip_prefix("poly:") {
                let n: u32 = n
                    .parse()
                    .map_err(|_| Error::Config(format!("bad polynomial order in '{other}'")))?;
                let base = match kind {
                    MartingaleKind::Gamma(_) => MartingaleKind::Gamma(0.0),
                    MartingaleKind::Symmetric(_) => MartingaleKind::Symmetric(0.0),
                };
                (
                    draws
                        .iter()
                        .map(|&x| martingales::poly_martingale(base, n, t, x))
                        .collect::<gammatime::Result<_>>()?,
                    0.0,
                )
            } else if let Some(k) = other.strip_prefix("laplace:") {
                let k: u32 = k
                    .parse()
                    .map_err(|_| Error::Config(format!("bad order in '{other}'")))?;
                if !matches!(kind, MartingaleKind::Gamma(_)) {
                    return Err(Error::Config(
                        "laplace martingales are defined for the gamma kind".into(),
                    ));
                }
                let fact: f64 = (1..k).map(f64::from).product();
                (
                    draws
                        .iter()
                        .map(|&x| martingales::laplace_martingale(t, a.theta, x, k))
                        .collect::<gammatime::Result<_>>()?,
                    fact / a.theta.powi(k as i32),
                )
            } else {
                return Err(Error::Config(format!("unknown martingale check '{other}'")));
            }
        }
    };
    let report = McReport::from_samples(&values, target);
    let mut json = serde_json::to_value(report).map_err(|e| Error::Io(e.to_string()))?;
    json["check"] = serde_json::Value::String(a.check.clone());
    println!("{json}");
    Ok(report.pass)
}

fn verify(a: VerifyArgs, cfg: &BTreeMap<String, String>) -> gammatime::Result<bool> {
    let (seed, source) = config::resolve_seed(a.seed, cfg)?;
    let manifest = if a.suite == "default" {
        harness::default_manifest()
    } else {
        let text = std::fs::read_to_string(&a.suite).map_err(|e| Error::Io(format!("{}: {e}", a.suite)))?;
        harness::parse_manifest(&text)
    };
    let opts = SuiteOptions {
        seed,
        reps: a.reps,
        exec: Exec::with_jobs(a.jobs),
    };
    let report = harness::run_suite(&manifest, &opts)?;
    let mut header = Header::new("verify");
    header.push("suite", &a.suite);
    if let Some(r) = a.reps {
        header.push("reps", r);
    }
    header.push("jobs", a.jobs).seed(seed, source);
    let mut sink = Sink::open(a.out.as_deref(), &header)?;
    sink.raw(report.to_jsonl().as_bytes())?;
    sink.finish()?;
    let failed = report.failures().count();
    eprintln!("{} checks, {} failed", report.records.len(), failed);
    for r in report.failures() {
        eprintln!("FAIL {} {}", r.check, r.item);
    }
    Ok(failed == 0)
}
