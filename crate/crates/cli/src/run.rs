use std::panic::{self, AssertUnwindSafe};
use std::time::Instant;

use fivevec_core::connection::null_frame;
use fivevec_core::npo;
use fivevec_core::sampling::{PointSampler, SamplingError};
use fivevec_core::{Point, DIM5};
use rayon::prelude::*;
use thiserror::Error;

use crate::checks::{self, Check, Context};
use crate::report::{CheckResult, Report};
use crate::scenario::Scenario;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid filter pattern: {0}")]
    Filter(#[from] glob::PatternError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Glob over check names; all enabled checks when absent.
    pub filter: Option<String>,
    pub seed: Option<u64>,
    pub points: Option<usize>,
    pub timings: bool,
}

/// FNV-1a, used to give each check its own stable seed.
fn name_hash(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

pub fn check_seed(run_seed: u64, name: &str) -> u64 {
    run_seed ^ name_hash(name)
}

/// A point is admissible when every scenario field evaluates finitely and
/// the metric is Lorentzian there.
fn admissible(s: &Scenario, p: &Point) -> bool {
    let Ok(g) = s.metric.eval(p) else {
        return false;
    };
    if null_frame(&g).is_none() || s.connection.eval(p).is_err() {
        return false;
    }
    let finite = |m: &fivevec_core::linalg::ComplexMatrix| m.eval(p).is_ok();
    if let Some(gauge) = &s.gauge {
        if !finite(&gauge.theta) || !gauge.field.slices().iter().all(finite) {
            return false;
        }
    }
    if let Some(sector) = &s.npo {
        match npo::assemble(&sector.fields, &sector.gens) {
            Ok(c) => {
                if !(0..DIM5).all(|a| finite(c.slice(a))) {
                    return false;
                }
            }
            Err(_) => return false,
        }
    }
    true
}

pub fn sample(s: &Scenario, seed: u64, count: usize) -> Result<Vec<Point>, SamplingError> {
    PointSampler::new(s.chart, seed).sample(count, |p| admissible(s, p))
}

fn panic_message(payload: &(dyn std::any::Any + Send)) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "check panicked".to_string()
    }
}

fn run_one(check: &Check, s: &Scenario, points: &[Point], run_seed: u64, timings: bool) -> CheckResult {
    let tolerance = s
        .tolerances
        .checks
        .get(check.name)
        .copied()
        .unwrap_or_else(|| check.class.default_tolerance(&s.tolerances));
    let cx = Context {
        scenario: s,
        points,
        seed: check_seed(run_seed, check.name),
    };
    let start = Instant::now();
    let outcome = panic::catch_unwind(AssertUnwindSafe(|| (check.run)(&cx)));
    let wall_ms = timings.then(|| start.elapsed().as_secs_f64() * 1e3);
    let (residual, measured_points, error) = match outcome {
        Ok(Ok(m)) if m.residual.is_finite() => (Some(m.residual), m.points, None),
        Ok(Ok(m)) => (None, m.points, Some(format!("non-finite residual {}", m.residual))),
        Ok(Err(e)) => (None, 0, Some(e.to_string())),
        Err(payload) => (None, 0, Some(format!("panic: {}", panic_message(payload.as_ref())))),
    };
    CheckResult {
        name: check.name.to_string(),
        identity: check.identity.to_string(),
        class: check.class,
        passed: residual.is_some_and(|r| r <= tolerance),
        residual,
        tolerance,
        points: measured_points,
        error,
        wall_ms,
    }
}

/// Checks enabled for `s` and matching the filter, sorted by name.
pub fn selected(s: &Scenario, filter: Option<&str>) -> Result<Vec<Check>, RunError> {
    let pattern = filter.map(glob::Pattern::new).transpose()?;
    Ok(checks::registry()
        .into_iter()
        .filter(|c| c.enabled_for(s))
        .filter(|c| pattern.as_ref().is_none_or(|p| p.matches(c.name)))
        .collect())
}

/// Runs the selected checks in parallel. A panicking or erroring check is
/// reported as a failure and never aborts the run.
pub fn run(s: &Scenario, options: &RunOptions) -> Result<Report, RunError> {
    let seed = options.seed.unwrap_or(s.seed);
    let count = options.points.unwrap_or(s.points);
    let chosen = selected(s, options.filter.as_deref())?;
    let points = if chosen.is_empty() {
        Vec::new()
    } else {
        sample(s, seed, count)?
    };
    Ok(run_checks(s, &chosen, &points, seed, options.timings))
}

/// Runs `checks` on fixed points. Completion order never affects the report.
pub fn run_checks(s: &Scenario, checks: &[Check], points: &[Point], seed: u64, timings: bool) -> Report {
    let results: Vec<CheckResult> = checks
        .par_iter()
        .map(|c| run_one(c, s, points, seed, timings))
        .collect();
    Report::new(s.name.clone(), seed, points.len(), results)
}

/// Runs a single check by name; used by tests that need one residual.
pub fn run_named(s: &Scenario, name: &str, points: &[Point], seed: u64) -> Option<CheckResult> {
    let check = checks::find(name)?;
    Some(run_one(&check, s, points, seed, false))
}
