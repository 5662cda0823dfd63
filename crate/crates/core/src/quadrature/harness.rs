//! The registered identity suite: a fixed cross-product of sequences,
//! integrands and sample sizes on which the exact error identities are
//! checked wholesale.
//!
//! Residuals are compared against [`IDENTITY_RELATIVE_TOL`] after scaling by
//! the natural magnitude of each identity's sides (`n` times the integrand
//! bound for the one-point identity), so a failure means the summation
//! pipeline is broken, not that the tolerance was guessed wrong.

use super::integrands::Integrand;
use super::sequences::{derive_seed, PointSequence};
use super::{block_error, eta_profile};

/// Relative tolerance for both identity residual checks.
pub const IDENTITY_RELATIVE_TOL: f64 = 1e-10;

/// Sample sizes of the registered cross-product (powers of two up to 2^12
/// plus off-dyadic values).
pub fn registered_sample_sizes() -> Vec<u64> {
    vec![
        1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 32, 33, 63, 64, 100, 127, 128, 255, 256, 511,
        512, 1000, 1023, 1024, 2048, 4095, 4096,
    ]
}

/// Sizes used by the RMS rate experiments: 2^4 .. 2^12.
pub fn rms_sample_sizes() -> Vec<u64> {
    (4..=12).map(|k| 1u64 << k).collect()
}

fn registered_sequences_1d(master_seed: u64) -> Vec<PointSequence> {
    vec![
        PointSequence::van_der_corput(2).expect("base 2"),
        PointSequence::van_der_corput(3).expect("base 3"),
        PointSequence::iid_uniform(1, derive_seed(master_seed, 101)).expect("dim 1"),
        PointSequence::van_der_corput(2)
            .expect("base 2")
            .random_shift(derive_seed(master_seed, 102))
            .expect("deterministic base"),
        PointSequence::scrambled_base2(derive_seed(master_seed, 103)),
    ]
}

fn registered_sequences_2d(master_seed: u64) -> Vec<PointSequence> {
    vec![
        PointSequence::halton(2).expect("two primes"),
        PointSequence::iid_uniform(2, derive_seed(master_seed, 201)).expect("dim 2"),
        PointSequence::halton(2)
            .expect("two primes")
            .random_shift(derive_seed(master_seed, 202))
            .expect("deterministic base"),
    ]
}

/// One (sequence, integrand, n) case of the identity suite.
#[derive(Debug, Clone)]
pub struct IdentityCaseResult {
    pub generator: String,
    pub integrand: String,
    pub n: u64,
    pub sobol_residual: f64,
    pub block_residual: f64,
    /// Largest residual after dividing by the identity's natural scale.
    pub scaled_residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct IdentitySuiteReport {
    pub cases: Vec<IdentityCaseResult>,
    pub max_scaled_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl IdentitySuiteReport {
    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }
}

/// Runs both exact-identity checks over the registered cross-product
/// (5 one-dimensional sequences x 4 integrands plus 3 two-dimensional
/// sequences x 1 integrand, each at every registered size: 667 cases).
///
/// Per case the one-point identity is checked at `n`, and the block
/// identity on `(floor(n/2), n]` and on the degenerate prefix `(0, n]`
/// against an independently accumulated block sum.
pub fn run_identity_suite(master_seed: u64) -> IdentitySuiteReport {
    let suite = Integrand::suite();
    let ns = registered_sample_sizes();
    let mut cases = Vec::new();

    let one_d: Vec<&Integrand> = suite.iter().filter(|f| f.dimension() == 1).collect();
    let two_d: Vec<&Integrand> = suite.iter().filter(|f| f.dimension() == 2).collect();

    for seq in registered_sequences_1d(master_seed) {
        for f in &one_d {
            run_pair(&seq, f, &ns, &mut cases);
        }
    }
    for seq in registered_sequences_2d(master_seed) {
        for f in &two_d {
            run_pair(&seq, f, &ns, &mut cases);
        }
    }

    let max_scaled_residual = cases
        .iter()
        .map(|c| c.scaled_residual)
        .fold(0.0, f64::max);
    let pass = cases.iter().all(|c| c.pass);
    IdentitySuiteReport { cases, max_scaled_residual, tolerance: IDENTITY_RELATIVE_TOL, pass }
}

fn run_pair(
    seq: &PointSequence,
    f: &Integrand,
    ns: &[u64],
    out: &mut Vec<IdentityCaseResult>,
) {
    // one profile pass covers eta at every n, n+1 and floor(n/2)
    let mut wanted: Vec<u64> = Vec::new();
    for &n in ns {
        wanted.push(n);
        wanted.push(n + 1);
        if n >= 2 {
            wanted.push(n / 2);
        }
    }
    wanted.sort_unstable();
    wanted.dedup();
    let profile = eta_profile(seq, f, &wanted).expect("registered sizes are valid");
    let eta_at = |n: u64| -> f64 {
        let idx = wanted.binary_search(&n).expect("requested size present");
        profile.eta()[idx]
    };

    let magnitude = f.abs_bound() + f.true_mean().abs();
    let mut buf = vec![0.0; seq.dimension()];
    for &n in ns {
        // one-point identity via the shared profile
        seq.point_into(n + 1, &mut buf);
        let lhs = (f.eval(&buf) - f.true_mean()).abs();
        let rhs = ((n as f64 + 1.0) * eta_at(n + 1) - n as f64 * eta_at(n)).abs();
        let sobol_residual = (lhs - rhs).abs();
        let sobol_scale = ((n as f64 + 1.0) * magnitude).max(1.0);

        // block identity on (floor(n/2), n] with an independent block sum
        let (block_residual, block_scale) = if n >= 2 {
            let n_lo = n / 2;
            let delta = (n - n_lo) as f64;
            let direct = block_error(seq, f, n_lo, n).expect("valid block");
            let via_eta = (n as f64 * eta_at(n) - n_lo as f64 * eta_at(n_lo)) / delta;
            let res = (direct - via_eta).abs();
            (res, (n as f64 * magnitude / delta).max(1.0))
        } else {
            (0.0, 1.0)
        };

        // degenerate prefix block must reproduce eta_n from a second pass
        let prefix = block_error(seq, f, 0, n).expect("valid block");
        let prefix_residual = (prefix - eta_at(n)).abs();
        let prefix_scale = magnitude.max(1.0);

        let scaled_residual = (sobol_residual / sobol_scale)
            .max(block_residual / block_scale)
            .max(prefix_residual / prefix_scale);
        out.push(IdentityCaseResult {
            generator: seq.label(),
            integrand: f.label().to_string(),
            n,
            sobol_residual,
            block_residual: block_residual.max(prefix_residual),
            scaled_residual,
            pass: scaled_residual <= IDENTITY_RELATIVE_TOL,
        });
    }
}
