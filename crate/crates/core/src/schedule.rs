//! Sample-size schedules: geometric generation from a target ratio and
//! validation of arbitrary schedules against the extension-factor bound.

use std::fmt;

use crate::bounds::{self, BoundParams, SolveError};

/// Sizes beyond this lose integer precision in the f64 ratio arithmetic.
const MAX_SIZE: u64 = 1 << 53;

#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleError {
    Empty,
    NotStrictlyIncreasing { index: usize, prev: u64, next: u64 },
    SizeZero,
    /// A requested size exceeded the exactly-representable integer range.
    SizeOverflow { size: u64 },
    RhoNotAboveOne { rho: f64 },
    StepZero,
    Solve(SolveError),
}

impl fmt::Display for ScheduleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Empty => write!(f, "schedule must contain at least one size"),
            Self::NotStrictlyIncreasing { index, prev, next } => write!(
                f,
                "sizes must be strictly increasing: position {index} has {next} after {prev}"
            ),
            Self::SizeZero => write!(f, "sample sizes must be at least 1"),
            Self::SizeOverflow { size } => {
                write!(f, "size {size} exceeds the exactly representable range (2^53)")
            }
            Self::RhoNotAboveOne { rho } => {
                write!(f, "growth ratio must exceed 1, got {rho}")
            }
            Self::StepZero => write!(f, "arithmetic step must be at least 1"),
            Self::Solve(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ScheduleError {}

impl From<SolveError> for ScheduleError {
    fn from(e: SolveError) -> Self {
        Self::Solve(e)
    }
}

/// A strictly increasing list of sample sizes `n_1 < n_2 < ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    sizes: Vec<u64>,
}

impl Schedule {
    pub fn new(sizes: Vec<u64>) -> Result<Self, ScheduleError> {
        if sizes.is_empty() {
            return Err(ScheduleError::Empty);
        }
        if sizes[0] == 0 {
            return Err(ScheduleError::SizeZero);
        }
        for (i, pair) in sizes.windows(2).enumerate() {
            if pair[1] <= pair[0] {
                return Err(ScheduleError::NotStrictlyIncreasing {
                    index: i + 1,
                    prev: pair[0],
                    next: pair[1],
                });
            }
        }
        if *sizes.last().unwrap() > MAX_SIZE {
            return Err(ScheduleError::SizeOverflow { size: *sizes.last().unwrap() });
        }
        Ok(Self { sizes })
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    /// Consecutive ratios `rho_k = n_{k+1} / n_k`.
    pub fn ratios(&self) -> Vec<f64> {
        self.sizes
            .windows(2)
            .map(|w| w[1] as f64 / w[0] as f64)
            .collect()
    }
}

/// Validation outcome: per-step ratios against the solved floor.
#[derive(Debug, Clone)]
pub struct ScheduleReport {
    pub ratios: Vec<f64>,
    /// The critical factor `rho*` the ratios were compared against.
    pub floor: f64,
    /// 1-based step indices `k` (ratio `n_{k+1}/n_k`) that fell below the
    /// floor, with the offending ratio.
    pub violations: Vec<(usize, f64)>,
    pub admissible: bool,
}

/// Builds `count` sizes starting at `n1` with target ratio `rho`, rounding
/// up and forcing strict growth: `n_{k+1} = max(n_k + 1, ceil(rho * n_k))`.
///
/// Every realized ratio is therefore at least `min(rho, (n_k + 1) / n_k)`.
pub fn geometric_schedule(n1: u64, rho: f64, count: usize) -> Result<Schedule, ScheduleError> {
    if n1 == 0 {
        return Err(ScheduleError::SizeZero);
    }
    if count == 0 {
        return Err(ScheduleError::Empty);
    }
    if !rho.is_finite() || rho <= 1.0 {
        return Err(ScheduleError::RhoNotAboveOne { rho });
    }
    let mut sizes = Vec::with_capacity(count);
    let mut n = n1;
    for _ in 0..count {
        if n > MAX_SIZE {
            return Err(ScheduleError::SizeOverflow { size: n });
        }
        sizes.push(n);
        let scaled = (rho * n as f64).ceil();
        if scaled > MAX_SIZE as f64 {
            // the next push would overflow; only an issue if more are needed
            n = MAX_SIZE + 1;
        } else {
            n = (n + 1).max(scaled as u64);
        }
    }
    Schedule::new(sizes)
}

/// Arithmetic schedule `n_k = n1 + (k-1) * step`.
pub fn arithmetic_schedule(n1: u64, step: u64, count: usize) -> Result<Schedule, ScheduleError> {
    if n1 == 0 {
        return Err(ScheduleError::SizeZero);
    }
    if step == 0 {
        return Err(ScheduleError::StepZero);
    }
    if count == 0 {
        return Err(ScheduleError::Empty);
    }
    let last = (count as u64 - 1)
        .checked_mul(step)
        .and_then(|d| n1.checked_add(d))
        .ok_or(ScheduleError::SizeOverflow { size: u64::MAX })?;
    if last > MAX_SIZE {
        return Err(ScheduleError::SizeOverflow { size: last });
    }
    let sizes = (0..count as u64).map(|k| n1 + k * step).collect();
    Schedule::new(sizes)
}

/// Checks every consecutive ratio against the solved critical factor for
/// `p`, admitting ratio `rho_k` when `rho_k >= rho* - tol`.
///
/// A single-size schedule is trivially admissible with an empty ratio list.
pub fn validate_schedule(
    s: &Schedule,
    p: BoundParams,
    tol: f64,
) -> Result<ScheduleReport, ScheduleError> {
    let sol = bounds::solve_rho_star(p, bounds::DEFAULT_SOLVE_TOL)?;
    let ratios = s.ratios();
    let mut violations = Vec::new();
    for (i, &rho) in ratios.iter().enumerate() {
        // ratio excess n_{k+1}/n_k - 1 >= 1/n_k is always representable, so
        // comparing in excess space costs nothing and survives tiny floors
        if rho - 1.0 < sol.rho_star_excess - tol {
            violations.push((i + 1, rho));
        }
    }
    let admissible = violations.is_empty();
    Ok(ScheduleReport { ratios, floor: sol.rho_star, violations, admissible })
}
