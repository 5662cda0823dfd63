//! Desk-scale empirical harness: signed error profiles `eta_n`, the exact
//! per-realization error identities, RMS estimation over independent
//! randomizations, convergence-rate fitting, and the weighted block
//! estimator.
//!
//! All averages go through compensated summation; the identity residual
//! tolerances elsewhere assume that.

mod harness;
mod integrands;
mod sequences;

pub use harness::{
    registered_sample_sizes, rms_sample_sizes, run_identity_suite, IdentityCaseResult,
    IdentitySuiteReport, IDENTITY_RELATIVE_TOL,
};
pub use integrands::{Integrand, SmoothnessClass};
pub use sequences::{derive_seed, van_der_corput, PointSequence, ReplicatedSequence};

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum QuadratureError {
    BaseTooSmall { base: u32 },
    UnsupportedDimension { dimension: usize },
    DimensionMismatch { sequence: usize, integrand: usize },
    /// The claimed analytic mean failed the registration grid check.
    MeanMismatch { label: String, claimed: f64, measured: f64 },
    SampleSizesNotIncreasing,
    EmptySampleSizes,
    InvalidBlock { n_lo: u64, n_hi: u64 },
    EmptyBlocks,
    BlockSizeZero,
    WeightExponentBelowOne { a: f64 },
    /// Fewer than three nonzero errors left to fit a slope through.
    InsufficientData { usable: usize },
    TooFewReplicates { replicates: u32 },
    /// RMS over re-randomizations needs a randomized sequence.
    DeterministicSequence,
    AlreadyRandomized,
    ShiftOutOfRange,
}

impl fmt::Display for QuadratureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::BaseTooSmall { base } => write!(f, "base must be at least 2, got {base}"),
            Self::UnsupportedDimension { dimension } => {
                write!(f, "unsupported dimension {dimension}")
            }
            Self::DimensionMismatch { sequence, integrand } => write!(
                f,
                "sequence dimension {sequence} does not match integrand dimension {integrand}"
            ),
            Self::MeanMismatch { label, claimed, measured } => write!(
                f,
                "integrand '{label}': claimed mean {claimed} but grid check measured {measured}"
            ),
            Self::SampleSizesNotIncreasing => {
                write!(f, "sample sizes must be strictly increasing and at least 1")
            }
            Self::EmptySampleSizes => write!(f, "at least one sample size is required"),
            Self::InvalidBlock { n_lo, n_hi } => {
                write!(f, "block bounds must satisfy n_lo < n_hi, got ({n_lo}, {n_hi}]")
            }
            Self::EmptyBlocks => write!(f, "block list must not be empty"),
            Self::BlockSizeZero => write!(f, "block sizes must be at least 1"),
            Self::WeightExponentBelowOne { a } => {
                write!(f, "weight exponent must be at least 1, got {a}")
            }
            Self::InsufficientData { usable } => {
                write!(f, "need at least 3 nonzero errors for a rate fit, have {usable}")
            }
            Self::TooFewReplicates { replicates } => {
                write!(f, "need at least 2 replicates, got {replicates}")
            }
            Self::DeterministicSequence => {
                write!(f, "RMS over randomizations requires a randomized sequence")
            }
            Self::AlreadyRandomized => {
                write!(f, "sequence is already randomized; shift a deterministic base")
            }
            Self::ShiftOutOfRange => write!(f, "shift coordinates must lie in [0, 1)"),
        }
    }
}

impl std::error::Error for QuadratureError {}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.c += (self.sum - t) + v;
        } else {
            self.c += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.c
    }
}

/// Signed quadrature errors `eta_n = (1/n) sum f(x_i) - mu` at chosen sample
/// sizes. Also used to carry RMS curves (error magnitudes per size).
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorProfile {
    sample_sizes: Vec<u64>,
    eta: Vec<f64>,
}

impl ErrorProfile {
    pub fn new(sample_sizes: Vec<u64>, eta: Vec<f64>) -> Result<Self, QuadratureError> {
        if sample_sizes.is_empty() {
            return Err(QuadratureError::EmptySampleSizes);
        }
        if sample_sizes[0] == 0
            || sample_sizes.windows(2).any(|w| w[1] <= w[0])
            || sample_sizes.len() != eta.len()
        {
            return Err(QuadratureError::SampleSizesNotIncreasing);
        }
        Ok(Self { sample_sizes, eta })
    }

    pub fn sample_sizes(&self) -> &[u64] {
        &self.sample_sizes
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    pub fn len(&self) -> usize {
        self.sample_sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sample_sizes.is_empty()
    }

    /// The profile restricted to its first `k` entries.
    pub fn prefix(&self, k: usize) -> Self {
        Self {
            sample_sizes: self.sample_sizes[..k].to_vec(),
            eta: self.eta[..k].to_vec(),
        }
    }
}

fn check_dims(seq: &PointSequence, f: &Integrand) -> Result<(), QuadratureError> {
    if seq.dimension() != f.dimension() {
        return Err(QuadratureError::DimensionMismatch {
            sequence: seq.dimension(),
            integrand: f.dimension(),
        });
    }
    Ok(())
}

/// Computes `eta_n` at every requested size in one pass with a running
/// compensated sum, so nested sizes reuse points exactly.
pub fn eta_profile(
    seq: &PointSequence,
    f: &Integrand,
    ns: &[u64],
) -> Result<ErrorProfile, QuadratureError> {
    check_dims(seq, f)?;
    if ns.is_empty() {
        return Err(QuadratureError::EmptySampleSizes);
    }
    if ns[0] == 0 || ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(QuadratureError::SampleSizesNotIncreasing);
    }
    let mut acc = KahanSum::default();
    let mut buf = vec![0.0; seq.dimension()];
    let mut eta = Vec::with_capacity(ns.len());
    let mut next = 0;
    for i in 1..=*ns.last().expect("nonempty") {
        seq.point_into(i, &mut buf);
        acc.add(f.eval(&buf));
        if ns[next] == i {
            eta.push(acc.value() / i as f64 - f.true_mean());
            next += 1;
        }
    }
    ErrorProfile::new(ns.to_vec(), eta)
}

/// Residual of the one-point identity
/// `|f(x_{n+1}) - mu| = |(n+1) eta_{n+1} - n eta_n|`.
///
/// Mathematically zero for every sequence and integrand; the return is pure
/// floating-point noise and a direct probe of summation quality.
pub fn sobol_identity_residual(
    seq: &PointSequence,
    f: &Integrand,
    n: u64,
) -> Result<f64, QuadratureError> {
    let profile = eta_profile(seq, f, &[n, n + 1])?;
    let eta_n = profile.eta()[0];
    let eta_n1 = profile.eta()[1];
    let x = seq.point(n + 1);
    let lhs = (f.eval(&x) - f.true_mean()).abs();
    let rhs = ((n as f64 + 1.0) * eta_n1 - n as f64 * eta_n).abs();
    Ok((lhs - rhs).abs())
}

/// Mean centered error over the block `(n_lo, n_hi]`, computed directly
/// from the block's points. `n_lo = 0` degenerates to the full prefix and
/// equals `eta_{n_hi}`.
pub fn block_error(
    seq: &PointSequence,
    f: &Integrand,
    n_lo: u64,
    n_hi: u64,
) -> Result<f64, QuadratureError> {
    check_dims(seq, f)?;
    if n_lo >= n_hi {
        return Err(QuadratureError::InvalidBlock { n_lo, n_hi });
    }
    let mut acc = KahanSum::default();
    let mut buf = vec![0.0; seq.dimension()];
    for i in (n_lo + 1)..=n_hi {
        seq.point_into(i, &mut buf);
        acc.add(f.eval(&buf) - f.true_mean());
    }
    Ok(acc.value() / (n_hi - n_lo) as f64)
}

/// Residual of the block identity
/// `block_error = (n_hi eta_{n_hi} - n_lo eta_{n_lo}) / (n_hi - n_lo)`,
/// checked per realization (it holds pathwise, randomized or not).
pub fn block_identity_residual(
    seq: &PointSequence,
    f: &Integrand,
    n_lo: u64,
    n_hi: u64,
) -> Result<f64, QuadratureError> {
    let direct = block_error(seq, f, n_lo, n_hi)?;
    let delta = (n_hi - n_lo) as f64;
    let via_eta = if n_lo == 0 {
        let profile = eta_profile(seq, f, &[n_hi])?;
        n_hi as f64 * profile.eta()[0] / delta
    } else {
        let profile = eta_profile(seq, f, &[n_lo, n_hi])?;
        (n_hi as f64 * profile.eta()[1] - n_lo as f64 * profile.eta()[0]) / delta
    };
    Ok((direct - via_eta).abs())
}

/// Root mean square of `eta_n` over independent replicates of a randomized
/// sequence, with replicate seeds derived from the factory's master seed.
pub fn rms_error(
    factory: &ReplicatedSequence,
    f: &Integrand,
    n: u64,
    replicates: u32,
) -> Result<f64, QuadratureError> {
    Ok(rms_profile(factory, f, &[n], replicates)?.eta()[0])
}

/// RMS curve over several sizes, sharing the single pass per replicate.
/// The reduction order over replicates is fixed, so results do not depend
/// on scheduling.
pub fn rms_profile(
    factory: &ReplicatedSequence,
    f: &Integrand,
    ns: &[u64],
    replicates: u32,
) -> Result<ErrorProfile, QuadratureError> {
    if replicates < 2 {
        return Err(QuadratureError::TooFewReplicates { replicates });
    }
    let mut squares = vec![KahanSum::default(); ns.len()];
    for r in 0..replicates {
        let seq = factory.replicate(r);
        let profile = eta_profile(&seq, f, ns)?;
        for (acc, &e) in squares.iter_mut().zip(profile.eta()) {
            acc.add(e * e);
        }
    }
    let rms = squares
        .iter()
        .map(|acc| (acc.value() / replicates as f64).sqrt())
        .collect();
    ErrorProfile::new(ns.to_vec(), rms)
}

/// Fitted log-log convergence order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    /// Slope of `log |error|` against `log n`; `-alpha_hat`.
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Zero errors dropped before fitting (their log is undefined).
    pub dropped_zeros: usize,
}

/// Ordinary least squares of `log |error|` on `log n`. Zero errors are
/// dropped (with the count reported) rather than floored.
pub fn fit_rate(profile: &ErrorProfile) -> Result<RateFit, QuadratureError> {
    let mut xs = Vec::with_capacity(profile.len());
    let mut ys = Vec::with_capacity(profile.len());
    let mut dropped = 0usize;
    for (&n, &e) in profile.sample_sizes().iter().zip(profile.eta()) {
        if e == 0.0 {
            dropped += 1;
        } else {
            xs.push((n as f64).ln());
            ys.push(e.abs().ln());
        }
    }
    if xs.len() < 3 {
        return Err(QuadratureError::InsufficientData { usable: xs.len() });
    }
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(&ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - (syy - slope * sxy) / syy).clamp(0.0, 1.0)
    };
    Ok(RateFit { slope, intercept, r_squared, dropped_zeros: dropped })
}

/// Partitions the first `sum(block_sizes)` points into consecutive blocks
/// and returns the block means recombined with weights proportional to
/// `n_j^a` (normalized to sum to 1).
pub fn weighted_block_estimate(
    seq: &PointSequence,
    f: &Integrand,
    block_sizes: &[u64],
    a: f64,
) -> Result<f64, QuadratureError> {
    check_dims(seq, f)?;
    if block_sizes.is_empty() {
        return Err(QuadratureError::EmptyBlocks);
    }
    if block_sizes.contains(&0) {
        return Err(QuadratureError::BlockSizeZero);
    }
    if !a.is_finite() || a < 1.0 {
        return Err(QuadratureError::WeightExponentBelowOne { a });
    }
    let mut weight_total = KahanSum::default();
    for &n_j in block_sizes {
        weight_total.add((n_j as f64).powf(a));
    }
    let mut buf = vec![0.0; seq.dimension()];
    let mut estimate = KahanSum::default();
    let mut index = 0u64;
    for &n_j in block_sizes {
        let mut block = KahanSum::default();
        for _ in 0..n_j {
            index += 1;
            seq.point_into(index, &mut buf);
            block.add(f.eval(&buf));
        }
        let mean_j = block.value() / n_j as f64;
        let w_j = (n_j as f64).powf(a) / weight_total.value();
        estimate.add(w_j * mean_j);
    }
    Ok(estimate.value())
}
