//! Adaptive Gauss–Kronrod quadrature with divergence probes.

use crate::error::{Error, Result};

// G7/K15 abscissae and weights on [-1, 1] (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_subdivisions: 4000,
        }
    }
}

/// Outcome of integrating over a possibly unbounded range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Integral {
    Converged { value: f64, error: f64 },
    Divergent,
}

impl Integral {
    pub fn value(&self) -> Option<f64> {
        match *self {
            Integral::Converged { value, .. } => Some(value),
            Integral::Divergent => None,
        }
    }
}

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        resk += WGK[j] * s;
        if j % 2 == 1 {
            resg += WG[j / 2] * s;
        }
    }
    (resk * half, ((resk - resg) * half).abs())
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    splittable: bool,
}

/// Adaptive integration on a finite interval `[a, b]`.
pub fn integrate_finite(f: &dyn Fn(f64) -> f64, a: f64, b: f64, opts: QuadOptions) -> Result<(f64, f64)> {
    if a == b {
        return Ok((0.0, 0.0));
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("integrate_finite needs finite limits"));
    }
    let (v, e) = gk15(f, a, b);
    let mut pieces = vec![Piece {
        a,
        b,
        value: v,
        error: e,
        splittable: true,
    }];
    loop {
        let total: f64 = pieces.iter().map(|p| p.value).sum();
        let err: f64 = pieces.iter().map(|p| p.error).sum();
        if !total.is_finite() || !err.is_finite() {
            return Err(Error::Numeric {
                msg: "non-finite integrand value".into(),
                lo: a,
                hi: b,
            });
        }
        if err <= opts.abs_tol.max(opts.rel_tol * total.abs()) {
            return Ok((total, err));
        }
        let worst = pieces
            .iter()
            .enumerate()
            .filter(|(_, p)| p.splittable)
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i);
        let Some(i) = worst else {
            // Every remaining piece is at float resolution.
            return Ok((total, err));
        };
        if pieces.len() >= opts.max_subdivisions {
            return Err(Error::Numeric {
                msg: format!(
                    "quadrature exceeded {} subdivisions (error {err:e})",
                    opts.max_subdivisions
                ),
                lo: a,
                hi: b,
            });
        }
        let p = pieces.swap_remove(i);
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) || (p.b - p.a) <= 1e-15 * p.a.abs().max(p.b.abs()) {
            pieces.push(Piece { splittable: false, ..p });
            continue;
        }
        for (l, r) in [(p.a, mid), (mid, p.b)] {
            let (v, e) = gk15(f, l, r);
            pieces.push(Piece {
                a: l,
                b: r,
                value: v,
                error: e,
                splittable: true,
            });
        }
    }
}

/// Estimated power `s` in `|g(x)| ~ x^s` as `x → ∞`.
fn tail_exponent(g: &dyn Fn(f64) -> f64, start: f64) -> Option<f64> {
    let mut last = None;
    let mut x = start;
    for _ in 0..6 {
        let g1 = g(x).abs();
        let g2 = g(2.0 * x).abs();
        if g1 == 0.0 || g2 == 0.0 || !g1.is_finite() || !g2.is_finite() {
            return if g2 == 0.0 { Some(f64::NEG_INFINITY) } else { last };
        }
        last = Some((g2 / g1).log2());
        x *= 16.0;
    }
    last
}

/// Estimated power `s` in `|g(x)| ~ (x - a)^s` as `x ↓ a`.
fn head_exponent(g: &dyn Fn(f64) -> f64, a: f64, width: f64) -> Option<f64> {
    let mut last = None;
    let mut h = width * 1e-6;
    for _ in 0..6 {
        let g1 = g(a + h).abs();
        let g2 = g(a + 0.5 * h).abs();
        if g1 == 0.0 || g2 == 0.0 || !g1.is_finite() || !g2.is_finite() {
            return last;
        }
        last = Some(-(g2 / g1).log2());
        h *= 1e-3;
    }
    last
}

/// Slack below -1 that still counts as a divergent power.
const DIVERGENCE_SLACK: f64 = 1e-3;

/// Integrates `g` over `(a, b]` where `b` may be infinite.
///
/// Before integrating, power-law probes at `b = ∞` and at the left endpoint
/// classify non-integrable tails and singularities as `Divergent`.
pub fn integrate(g: &dyn Fn(f64) -> f64, a: f64, b: f64, opts: QuadOptions) -> Result<Integral> {
    if !(a <= b) || a.is_nan() || a == f64::INFINITY {
        return Err(Error::domain(format!("bad integration range ({a}, {b}]")));
    }
    if a == b {
        return Ok(Integral::Converged { value: 0.0, error: 0.0 });
    }
    let width = if b.is_finite() { b - a } else { 1.0 };
    if let Some(s) = head_exponent(g, a, width) {
        if s <= -1.0 + DIVERGENCE_SLACK {
            return Ok(Integral::Divergent);
        }
    }
    if b.is_finite() {
        return integrate_finite(g, a, b, opts).map(|(value, error)| Integral::Converged { value, error });
    }
    if let Some(s) = tail_exponent(g, a.abs().max(1.0) * 1e6) {
        if s >= -1.0 - DIVERGENCE_SLACK {
            return Ok(Integral::Divergent);
        }
    }
    integrate_tail(g, a, opts)
}

/// `∫_a^∞ g` over doubling cells `[a + 2^{k−1}, a + 2^k]`. Once successive
/// cell ratios settle, the rest is summed as a geometric series, which is
/// exact for power tails.
fn integrate_tail(g: &dyn Fn(f64) -> f64, a: f64, opts: QuadOptions) -> Result<Integral> {
    let (mut value, mut error) = integrate_finite(g, a, a + 1.0, opts)?;
    let mut prev_cell: Option<f64> = None;
    let mut prev_ratio: Option<f64> = None;
    let mut lo = 1.0f64;
    while lo < 1e300 {
        let hi = 2.0 * lo;
        let (cell, cell_err) = integrate_finite(g, a + lo, a + hi, opts)?;
        value += cell;
        error += cell_err;
        lo = hi;
        let tol = opts.abs_tol.max(opts.rel_tol * value.abs());
        if cell.abs() <= 0.01 * tol {
            return Ok(Integral::Converged { value, error });
        }
        if let Some(p) = prev_cell {
            if p != 0.0 {
                let r = cell / p;
                if let Some(rp) = prev_ratio {
                    if r > 0.0 && r < 1.0 {
                        let rest = cell * r / (1.0 - r);
                        let drift = (r - rp).abs() * cell.abs() / ((1.0 - r) * (1.0 - r));
                        if drift <= tol {
                            return Ok(Integral::Converged {
                                value: value + rest,
                                error: error + drift,
                            });
                        }
                    }
                }
                prev_ratio = Some(r);
            }
        }
        prev_cell = Some(cell);
    }
    Err(Error::Numeric {
        msg: "tail integral did not settle".into(),
        lo: a,
        hi: f64::INFINITY,
    })
}

/// `E g(Z)` for a standard Gaussian `Z`, folded onto `(0, ∞)`.
pub fn gaussian_expectation(g: &dyn Fn(f64) -> f64, opts: QuadOptions) -> Result<f64> {
    let norm = (2.0 * std::f64::consts::PI).sqrt();
    let folded = |z: f64| (g(z) + g(-z)) * (-0.5 * z * z).exp() / norm;
    match integrate(&folded, 0.0, f64::INFINITY, opts)? {
        Integral::Converged { value, .. } => Ok(value),
        Integral::Divergent => Err(Error::Numeric {
            msg: "Gaussian expectation diverged".into(),
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }),
    }
}
