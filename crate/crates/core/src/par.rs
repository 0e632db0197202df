//! Replicate execution and order-stable reductions.
//!
//! Replicates are mapped over their indices and collected in index order, then
//! reduced sequentially with compensated summation. The reduction never sees
//! the worker count, so results are bit-identical for any degree of
//! parallelism.

use serde::Serialize;

/// How replicate loops are executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Exec {
    #[default]
    Sequential,
    Parallel {
        jobs: usize,
    },
}

impl Exec {
    /// `jobs <= 1` runs sequentially.
    pub fn with_jobs(jobs: usize) -> Self {
        if jobs <= 1 {
            Exec::Sequential
        } else {
            Exec::Parallel { jobs }
        }
    }

    pub fn jobs(&self) -> usize {
        match *self {
            Exec::Sequential => 1,
            Exec::Parallel { jobs } => jobs,
        }
    }

    /// `(0..n).map(f)` collected in index order.
    pub fn map<T, F>(&self, n: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        match *self {
            Exec::Sequential => (0..n).map(f).collect(),
            Exec::Parallel { jobs } => parallel_map(jobs, n, f),
        }
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, F>(jobs: usize, n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(|| (0..n).into_par_iter().map(&f).collect()),
        Err(_) => (0..n).map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, F>(_jobs: usize, n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Neumaier-compensated sum in iteration order.
pub fn kahan_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Sample mean and standard error `sd/√n`.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = kahan_sum(xs.iter().copied()) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss = kahan_sum(xs.iter().map(|x| (x - mean) * (x - mean)));
    (mean, (ss / (n - 1) as f64 / n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_keeps_index_order() {
        let seq = Exec::Sequential.map(1000, |i| i * i);
        let par = Exec::with_jobs(4).map(1000, |i| i * i);
        assert_eq!(seq, par);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(kahan_sum(xs), 2.0);
    }

    #[test]
    fn mean_se_of_constant() {
        assert_eq!(mean_se(&[2.0; 10]), (2.0, 0.0));
        let (m, se) = mean_se(&[0.0, 2.0]);
        assert_eq!(m, 1.0);
        assert!((se - 1.0).abs() < 1e-15);
    }
}
