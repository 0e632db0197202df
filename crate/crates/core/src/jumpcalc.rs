//! Calculus of finite pure-jump paths.
//!
//! A path `x_t = Σ h_n 1{u_n ≤ t}` is stored as its jump times and heights
//! together with prefix sums, so evaluation is a binary search.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::extended::Extended;
use crate::integrand::Integrand;

/// Right-continuous step path with finitely many jumps, starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpPath {
    times: Vec<f64>,
    heights: Vec<f64>,
    cum: Vec<f64>,
}

impl JumpPath {
    /// Times must be finite, nonnegative and strictly increasing.
    pub fn new(times: Vec<f64>, heights: Vec<f64>) -> Result<Self> {
        if times.len() != heights.len() {
            return Err(Error::precondition(format!(
                "{} jump times but {} heights",
                times.len(),
                heights.len()
            )));
        }
        if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(Error::precondition("jump times must be finite and nonnegative"));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::precondition("jump times must be strictly increasing"));
        }
        if heights.iter().any(|h| !h.is_finite()) {
            return Err(Error::precondition("jump heights must be finite"));
        }
        Ok(Self::from_sorted(times, heights))
    }

    fn from_sorted(times: Vec<f64>, heights: Vec<f64>) -> Self {
        let mut acc = 0.0;
        let cum = heights
            .iter()
            .map(|h| {
                acc += h;
                acc
            })
            .collect();
        Self { times, heights, cum }
    }

    /// Sorts by time and merges coincident times by adding their heights.
    pub fn from_jumps(mut jumps: Vec<(f64, f64)>) -> Result<Self> {
        jumps.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut times: Vec<f64> = Vec::with_capacity(jumps.len());
        let mut heights: Vec<f64> = Vec::with_capacity(jumps.len());
        for (t, h) in jumps {
            if times.last() == Some(&t) {
                *heights.last_mut().unwrap() += h;
            } else {
                times.push(t);
                heights.push(h);
            }
        }
        Self::new(times, heights)
    }

    pub fn empty() -> Self {
        Self::from_sorted(Vec::new(), Vec::new())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.cum.last().copied().unwrap_or(0.0)
    }

    /// Number of jumps at times `≤ t`.
    fn count_upto(&self, t: f64) -> usize {
        self.times.partition_point(|&u| u <= t)
    }

    /// `x_t`, right-continuous.
    pub fn amass(&self, t: f64) -> f64 {
        match self.count_upto(t) {
            0 => 0.0,
            k => self.cum[k - 1],
        }
    }

    /// `x_{t-}`.
    pub fn amass_left(&self, t: f64) -> f64 {
        match self.times.partition_point(|&u| u < t) {
            0 => 0.0,
            k => self.cum[k - 1],
        }
    }

    /// `Δx_t`.
    pub fn jump_at(&self, t: f64) -> f64 {
        match self.times.binary_search_by(|u| u.total_cmp(&t)) {
            Ok(i) => self.heights[i],
            Err(_) => 0.0,
        }
    }

    /// `Σ h_n f(u_n)`.
    pub fn integrate_fn(&self, f: impl Fn(f64) -> f64) -> Result<f64> {
        let mut total = 0.0;
        for (&u, &h) in self.times.iter().zip(&self.heights) {
            let v = f(u);
            if !v.is_finite() {
                return Err(Error::domain(format!("integrand is not finite at jump time {u}")));
            }
            total += h * v;
        }
        Ok(total)
    }

    pub fn integrate(&self, f: &Integrand) -> Result<f64> {
        self.integrate_fn(|u| f.eval(u))
    }

    /// Heights multiplied by `k_n`.
    pub fn compound(&self, k: &[f64]) -> Result<JumpPath> {
        if k.len() != self.len() {
            return Err(Error::precondition(format!(
                "{} multipliers for {} jumps",
                k.len(),
                self.len()
            )));
        }
        let heights = self.heights.iter().zip(k).map(|(h, k)| h * k).collect();
        Ok(Self::from_sorted(self.times.clone(), heights))
    }

    /// `[x]^φ`: the path with jumps `φ(h_n)`.
    pub fn variation(&self, phi: impl Fn(f64) -> f64) -> JumpPath {
        let heights = self.heights.iter().map(|&h| phi(h)).collect();
        Self::from_sorted(self.times.clone(), heights)
    }

    /// Jumps of `φ(x)`: `φ(x_{u_n}) − φ(x_{u_n−})`.
    pub fn compose_smooth(&self, phi: impl Fn(f64) -> f64) -> JumpPath {
        let mut prev = 0.0;
        let heights = self
            .cum
            .iter()
            .map(|&x| {
                let d = phi(x) - phi(prev);
                prev = x;
                d
            })
            .collect();
        Self::from_sorted(self.times.clone(), heights)
    }

    /// `t ↦ a(t) x_t` together with its quadratic variation, whose jumps are
    /// `a(u_n)² h_n²`.
    pub fn modulate<'a>(&'a self, a: impl Fn(f64) -> f64 + 'a) -> (Box<dyn Fn(f64) -> f64 + 'a>, JumpPath) {
        let heights = self
            .times
            .iter()
            .zip(&self.heights)
            .map(|(&u, &h)| {
                let au = a(u);
                au * au * h * h
            })
            .collect();
        let qv = Self::from_sorted(self.times.clone(), heights);
        (Box::new(move |t| a(t) * self.amass(t)), qv)
    }

    /// `Σ (x_{t_k} − x_{t_{k−1}})²` over the grid.
    pub fn partition_qv(&self, grid: &[f64]) -> f64 {
        partition_qv(|t| self.amass(t), grid)
    }

    /// `x̂_v = inf{t : x_t > v}`.
    pub fn rcll_inverse(&self) -> Result<InverseFn> {
        if self.heights.iter().any(|&h| h < 0.0) {
            return Err(Error::precondition("rcll inverse needs nonnegative heights"));
        }
        let mut thresholds = Vec::with_capacity(self.len());
        let mut plateaus = Vec::with_capacity(self.len());
        for ((&u, &h), &g) in self.times.iter().zip(&self.heights).zip(&self.cum) {
            if h > 0.0 {
                thresholds.push(g);
                plateaus.push(u);
            }
        }
        Ok(InverseFn {
            cap: self.total(),
            thresholds,
            plateaus,
        })
    }

    /// Writes `t,h` rows at 17 significant digits.
    pub fn write_csv(&self, out: &mut dyn Write) -> Result<()> {
        writeln!(out, "t,h")?;
        for (t, h) in self.times.iter().zip(&self.heights) {
            writeln!(out, "{t:.16e},{h:.16e}")?;
        }
        Ok(())
    }

    /// Reads the `t,h` format, skipping `#` comment lines.
    pub fn read_csv(input: &mut dyn BufRead) -> Result<JumpPath> {
        let mut jumps = Vec::new();
        let mut header_seen = false;
        for line in input.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !header_seen {
                if line != "t,h" {
                    return Err(Error::config(format!("expected header 't,h', got '{line}'")));
                }
                header_seen = true;
                continue;
            }
            let (t, h) = line
                .split_once(',')
                .ok_or_else(|| Error::config(format!("bad path row '{line}'")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::config(format!("bad number '{s}' in path row")))
            };
            jumps.push((parse(t)?, parse(h)?));
        }
        let (times, heights) = jumps.into_iter().unzip();
        JumpPath::new(times, heights)
    }

    /// Writes `t,x` rows of the path sampled on a grid.
    pub fn write_grid_csv(&self, grid: &[f64], out: &mut dyn Write) -> Result<()> {
        writeln!(out, "t,x")?;
        for &t in grid {
            writeln!(out, "{t:.16e},{:.16e}", self.amass(t))?;
        }
        Ok(())
    }
}

/// `Σ (x(t_k) − x(t_{k−1}))²` for an arbitrary evaluator.
pub fn partition_qv(x: impl Fn(f64) -> f64, grid: &[f64]) -> f64 {
    let mut prev = match grid.first() {
        Some(&t) => x(t),
        None => return 0.0,
    };
    let mut total = 0.0;
    for &t in &grid[1..] {
        let cur = x(t);
        total += (cur - prev) * (cur - prev);
        prev = cur;
    }
    total
}

/// Right-continuous inverse of a nondecreasing jump path.
///
/// `eval(v)` is the time `u_k` of the first jump whose partial sum `g_k`
/// exceeds `v`, and `Infinite` once `v` reaches the total mass.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseFn {
    thresholds: Vec<f64>,
    plateaus: Vec<f64>,
    cap: f64,
}

impl InverseFn {
    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn plateaus(&self) -> &[f64] {
        &self.plateaus
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    pub fn eval(&self, v: f64) -> Extended {
        let k = self.thresholds.partition_point(|&g| g <= v);
        match self.plateaus.get(k) {
            Some(&u) => Extended::Finite(u),
            None => Extended::Infinite,
        }
    }

    /// Inverse of the inverse: `inf{v : x̂_v > t}`, which is `x_t`.
    pub fn invert_at(&self, t: f64) -> f64 {
        match self.plateaus.partition_point(|&u| u <= t) {
            0 => 0.0,
            k => self.thresholds[k - 1],
        }
    }

    /// Largest jump of `v ↦ x̂_v` on `[0, cap)`, including the initial level.
    pub fn max_jump(&self) -> f64 {
        let mut best = self.plateaus.first().copied().unwrap_or(0.0);
        for w in self.plateaus.windows(2) {
            best = best.max(w[1] - w[0]);
        }
        best
    }

    /// The finite part of `v ↦ x̂_v` as a jump path in `v`; the initial
    /// level sits at time 0.
    pub fn as_path(&self) -> JumpPath {
        let mut times = Vec::with_capacity(self.plateaus.len());
        let mut heights = Vec::with_capacity(self.plateaus.len());
        let mut prev = 0.0;
        for (k, &u) in self.plateaus.iter().enumerate() {
            times.push(if k == 0 { 0.0 } else { self.thresholds[k - 1] });
            heights.push(u - prev);
            prev = u;
        }
        JumpPath::from_sorted(times, heights)
    }

    /// Writes `t,x` rows of `v ↦ x̂_v`, with `inf` past the cap.
    pub fn write_grid_csv(&self, grid: &[f64], out: &mut dyn Write) -> Result<()> {
        writeln!(out, "t,x")?;
        for &v in grid {
            match self.eval(v) {
                Extended::Finite(x) => writeln!(out, "{v:.16e},{x:.16e}")?,
                Extended::Infinite => writeln!(out, "{v:.16e},inf")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_jumps() -> JumpPath {
        JumpPath::new(vec![0.5, 1.0], vec![1.0, 2.0]).unwrap()
    }

    fn dyadic(end: f64, level: u32) -> Vec<f64> {
        let n = 1usize << level;
        (0..=n).map(|i| end * i as f64 / n as f64).collect()
    }

    #[test]
    fn amass_is_rcll() {
        let p = two_jumps();
        assert_eq!(p.amass(0.75), 1.0);
        assert_eq!(p.amass(1.0), 3.0);
        assert_eq!(p.amass(0.4999), 0.0);
        assert_eq!(p.amass(0.5) - p.amass_left(0.5), p.jump_at(0.5));
        assert_eq!(p.jump_at(0.7), 0.0);
    }

    #[test]
    fn integrate_examples() {
        let p = two_jumps();
        assert_eq!(p.integrate_fn(|_| 1.0).unwrap(), 3.0);
        let ind = Integrand::indicator(0.0, 0.6, 1.0).unwrap();
        assert_eq!(p.integrate(&ind).unwrap(), 1.0);
        assert_eq!(p.integrate_fn(|x| x).unwrap(), 2.5);
        assert!(p.integrate_fn(|x| 1.0 / (x - 0.5)).is_err());
    }

    #[test]
    fn compound_examples() {
        let p = two_jumps();
        assert_eq!(p.compound(&[1.0, 1.0]).unwrap(), p);
        assert_eq!(p.compound(&[0.0, 0.0]).unwrap().total(), 0.0);
        assert_eq!(p.compound(&[-1.0, 1.0]).unwrap().heights(), &[-1.0, 2.0]);
        assert!(p.compound(&[1.0]).is_err());
    }

    #[test]
    fn quadratic_variation_refines_to_sum_of_squares() {
        let p = two_jumps();
        assert_eq!(p.variation(|h| h * h).heights(), &[1.0, 4.0]);
        // Any grid that separates the jumps gives the exact value.
        assert_eq!(p.partition_qv(&dyadic(1.5, 4)), 5.0);
        // A coarse grid merges them.
        assert_eq!(p.partition_qv(&[0.0, 1.5]), 9.0);
    }

    #[test]
    fn compose_smooth_telescopes() {
        let p = two_jumps();
        assert_eq!(p.compose_smooth(|x| x), p);
        let q = p.compose_smooth(|x| x * x);
        assert_eq!(q.heights(), &[1.0, 8.0]);
        for t in [0.0, 0.3, 0.5, 0.9, 1.0, 2.0] {
            assert_eq!(q.amass(t), p.amass(t).powi(2));
        }
    }

    #[test]
    fn composed_variation_is_first_order_for_small_jumps() {
        // d[φ(x)] against φ'(x_{t−})² d[x]; the gap shrinks with the jump size.
        let phi = |x: f64| x.sin() + x * x;
        let dphi = |x: f64| x.cos() + 2.0 * x;
        let mut gaps = Vec::new();
        for scale in [1e-1, 1e-2, 1e-3] {
            let times: Vec<f64> = (1..=20).map(|i| i as f64 / 20.0).collect();
            let heights: Vec<f64> = (1..=20).map(|i| scale * (1.0 + (i % 3) as f64)).collect();
            let p = JumpPath::new(times, heights).unwrap();
            let exact = p.compose_smooth(phi).variation(|h| h * h).total();
            let approx: f64 = p
                .times()
                .iter()
                .zip(p.heights())
                .map(|(&u, &h)| (dphi(p.amass_left(u)) * h).powi(2))
                .sum();
            gaps.push((exact - approx).abs() / exact);
        }
        assert!(
            gaps[0] > gaps[1] && gaps[1] > gaps[2] && gaps[0] > 10.0 * gaps[2],
            "{gaps:?}"
        );
        assert!(gaps[2] < 1e-2);
    }

    #[test]
    fn modulate_examples() {
        let p = JumpPath::new(vec![0.5], vec![1.0]).unwrap();
        let (ay, qv) = p.modulate(|t| t);
        assert_eq!(qv.heights(), &[0.25]);
        assert_eq!(ay(0.75), 0.75);
        let (_, unit) = two_jumps().modulate(|_| 1.0);
        assert_eq!(unit, two_jumps().variation(|h| h * h));
        // The drift term a'·y·dt vanishes under refinement.
        let mut prev_err = f64::INFINITY;
        for level in [6, 10, 14] {
            let err = (partition_qv(&ay, &dyadic(1.0, level)) - 0.25).abs();
            assert!(err < prev_err);
            prev_err = err;
        }
        assert!(prev_err < 1e-4);
    }

    #[test]
    fn inverse_examples() {
        let inv = two_jumps().rcll_inverse().unwrap();
        assert_eq!(inv.eval(0.0), Extended::Finite(0.5));
        assert_eq!(inv.eval(1.0), Extended::Finite(1.0));
        assert_eq!(inv.eval(2.5), Extended::Finite(1.0));
        assert_eq!(inv.eval(3.0), Extended::Infinite);
        let neg = JumpPath::new(vec![1.0], vec![-1.0]).unwrap();
        assert!(matches!(neg.rcll_inverse(), Err(Error::Precondition(_))));
    }

    #[test]
    fn inverse_duality_on_grid() {
        let p = JumpPath::new(vec![0.1, 0.4, 0.45, 0.9], vec![0.3, 0.0, 1.2, 0.5]).unwrap();
        let inv = p.rcll_inverse().unwrap();
        for i in 0..=40 {
            let t = i as f64 * 0.025;
            for j in 0..=40 {
                let v = j as f64 * 0.05;
                let above = match inv.eval(v) {
                    Extended::Finite(x) => x > t,
                    Extended::Infinite => true,
                };
                assert_eq!(above, p.amass(t) <= v, "t={t} v={v}");
            }
            assert_eq!(inv.invert_at(t), p.amass(t));
        }
    }

    #[test]
    fn inverse_as_path_reinverts() {
        let p = two_jumps();
        let inv = p.rcll_inverse().unwrap();
        let back = inv.as_path().rcll_inverse().unwrap();
        // The final jump of the inverse goes to infinity and is not part of
        // the finite path, so the re-inversion agrees below the last jump time.
        for i in 0..150 {
            let t = i as f64 * 0.01;
            if t < 1.0 {
                assert_eq!(back.eval(t), Extended::Finite(p.amass(t)));
            } else {
                assert_eq!(back.eval(t), Extended::Infinite);
            }
        }
        assert_eq!(inv.max_jump(), 0.5);
    }

    #[test]
    fn polarization() {
        let x = JumpPath::new(vec![0.2, 0.6, 0.7], vec![1.0, -2.0, 0.5]).unwrap();
        let y = JumpPath::new(vec![0.2, 0.6, 0.7], vec![0.3, 0.4, -1.0]).unwrap();
        let sum = x.compound(&[1.0; 3]).unwrap();
        let plus: Vec<f64> = sum.heights().iter().zip(y.heights()).map(|(a, b)| a + b).collect();
        let minus: Vec<f64> = sum.heights().iter().zip(y.heights()).map(|(a, b)| a - b).collect();
        let qv = |h: Vec<f64>| {
            JumpPath::new(x.times().to_vec(), h)
                .unwrap()
                .variation(|v| v * v)
                .total()
        };
        let bracket: f64 = x.heights().iter().zip(y.heights()).map(|(a, b)| a * b).sum();
        assert!((qv(plus) - qv(minus) - 4.0 * bracket).abs() < 1e-14);
    }

    #[test]
    fn csv_roundtrip_is_exact() {
        let p = JumpPath::new(vec![0.1, 1.0 / 3.0, 0.7], vec![std::f64::consts::PI, 1e-300, 2.0]).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let mut with_comment = b"# comment\n".to_vec();
        with_comment.extend(buf);
        let q = JumpPath::read_csv(&mut with_comment.as_slice()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn from_jumps_merges_ties() {
        let p = JumpPath::from_jumps(vec![(1.0, 1.0), (0.5, 2.0), (1.0, 3.0)]).unwrap();
        assert_eq!(p.times(), &[0.5, 1.0]);
        assert_eq!(p.heights(), &[2.0, 4.0]);
    }
}
