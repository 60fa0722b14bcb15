//! Lyapunov-exponent estimation for the logistic map and the parameter
//! sweep used to expose negative-exponent pockets inside the nominally
//! chaotic control interval.

use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LyapunovError {
    #[error("control parameter r must lie in (0, 4], got {0}")]
    ControlParameter(f64),
    #[error("initial state x0 must lie in (0, 1), got {0}")]
    InitialState(f64),
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("sweep range invalid: r_min={r_min}, r_max={r_max}, step={step}")]
    SweepRange { r_min: f64, r_max: f64, step: f64 },
}

/// Burn-in before accumulation starts.
pub const DEFAULT_BURN_IN: usize = 1000;
/// Samples per grid point in sweeps and parameter screening.
pub const SWEEP_SAMPLES: usize = 100_000;
/// Samples for stand-alone estimates.
pub const POINT_SAMPLES: usize = 1_000_000;
/// Screening threshold: a margin above zero guards against estimator noise.
pub const CHAOS_THRESHOLD: f64 = 0.05;

/// Running-average estimate of the exponent, in nats per iteration.
///
/// `singular` is set when a derivative term |r(1-2x)| was exactly zero;
/// such terms are skipped rather than poisoning the average. If every term
/// was singular (a superstable orbit pinned at x = 0.5) `lambda` is
/// negative infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovEstimate {
    pub r: f64,
    pub x0: f64,
    pub burn_in: usize,
    pub samples: usize,
    pub lambda: f64,
    pub singular: bool,
}

/// lambda = (1/n) * sum of ln|r*(1 - 2x_i)| over the post-burn-in orbit.
pub fn lyapunov_logistic(
    r: f64,
    x0: f64,
    burn_in: usize,
    samples: usize,
) -> Result<LyapunovEstimate, LyapunovError> {
    if !(r > 0.0 && r <= 4.0) {
        return Err(LyapunovError::ControlParameter(r));
    }
    if !(x0 > 0.0 && x0 < 1.0) {
        return Err(LyapunovError::InitialState(x0));
    }
    if samples == 0 {
        return Err(LyapunovError::NoSamples);
    }
    let mut x = x0;
    for _ in 0..burn_in {
        x = r * x * (1.0 - x);
    }
    let mut sum = 0.0;
    let mut kept = 0usize;
    let mut singular = false;
    for _ in 0..samples {
        let derivative = (r * (1.0 - 2.0 * x)).abs();
        if derivative == 0.0 {
            singular = true;
        } else {
            sum += derivative.ln();
            kept += 1;
        }
        x = r * x * (1.0 - x);
    }
    let lambda = if kept == 0 {
        f64::NEG_INFINITY
    } else {
        sum / kept as f64
    };
    Ok(LyapunovEstimate {
        r,
        x0,
        burn_in,
        samples,
        lambda,
        singular,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepEntry {
    pub r: f64,
    pub lambda: f64,
    pub chaotic: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub r_min: f64,
    pub r_max: f64,
    pub step: f64,
    pub x0: f64,
    pub entries: Vec<SweepEntry>,
}

impl SweepReport {
    pub fn negative_count(&self) -> usize {
        self.entries.iter().filter(|e| e.lambda < 0.0).count()
    }

    /// `r,lambda,chaotic` records for plotting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,lambda,chaotic\n");
        for e in &self.entries {
            out.push_str(&format!("{:.6},{:.6},{}\n", e.r, e.lambda, e.chaotic));
        }
        out
    }
}

/// Estimates the exponent on the grid r_min, r_min+step, ... capped at
/// r_max, with [`DEFAULT_BURN_IN`] and [`SWEEP_SAMPLES`] per point.
/// Grid points are evaluated in parallel and assembled in grid order, so
/// identical inputs give bit-identical reports.
pub fn lyapunov_sweep(
    r_min: f64,
    r_max: f64,
    step: f64,
    x0: f64,
) -> Result<SweepReport, LyapunovError> {
    let range_ok = r_min > 0.0 && r_min <= r_max && r_max <= 4.0 && step > 0.0;
    if !range_ok {
        return Err(LyapunovError::SweepRange { r_min, r_max, step });
    }
    if !(x0 > 0.0 && x0 < 1.0) {
        return Err(LyapunovError::InitialState(x0));
    }
    let count = ((r_max - r_min) / step + 1e-9).floor() as usize;
    let entries: Vec<SweepEntry> = (0..=count)
        .into_par_iter()
        .map(|i| {
            let r = (r_min + i as f64 * step).min(r_max);
            let est = lyapunov_logistic(r, x0, DEFAULT_BURN_IN, SWEEP_SAMPLES)
                .expect("grid point within validated domain");
            SweepEntry {
                r,
                lambda: est.lambda,
                chaotic: est.lambda > 0.0,
            }
        })
        .collect();
    Ok(SweepReport {
        r_min,
        r_max,
        step,
        x0,
        entries,
    })
}

/// Key-quality gate: true when the estimated exponent clears
/// [`CHAOS_THRESHOLD`] at sweep-scale sampling.
pub fn screen_parameter(r: f64, x0: f64) -> Result<bool, LyapunovError> {
    Ok(lyapunov_logistic(r, x0, DEFAULT_BURN_IN, SWEEP_SAMPLES)?.lambda > CHAOS_THRESHOLD)
}
