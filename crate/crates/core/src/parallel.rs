//! Data-parallel map over independent work items.
//!
//! With the `parallel` feature (default) items are distributed over a rayon
//! pool; `STIFFNESS_LAB_THREADS` caps its size. Without the feature, or with
//! [`Execution::Sequential`], items are processed in order on the calling
//! thread. Output order always matches input order.

use crate::coefficients::CoefficientProfile;
use crate::error::Result;
use crate::integrator::{integrate, IntegrationConfig, PlanarState, Trajectory};

pub const THREADS_ENV: &str = "STIFFNESS_LAB_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

/// Thread cap from `STIFFNESS_LAB_THREADS`, ignoring unparsable or zero values.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

pub fn map<T, R, F>(items: &[T], exec: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        Execution::Sequential => items.iter().map(f).collect(),
        Execution::Parallel => par_map(items, f),
    }
}

#[cfg(feature = "parallel")]
fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    let run = || items.par_iter().map(&f).collect();
    match thread_cap() {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        },
        None => run(),
    }
}

#[cfg(not(feature = "parallel"))]
fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.iter().map(f).collect()
}

/// One independent integration.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationJob {
    pub alpha: CoefficientProfile,
    pub k: CoefficientProfile,
    pub x0: PlanarState,
    pub config: IntegrationConfig,
}

pub fn integrate_batch(jobs: &[IntegrationJob], exec: Execution) -> Vec<Result<Trajectory>> {
    map(jobs, exec, |j| integrate(&j.alpha, &j.k, j.x0, &j.config))
}
