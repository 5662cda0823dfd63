//! The extension-factor bound for rate-optimal equal-weight quadrature.
//!
//! For a function class whose worst-case (or RMS) error is squeezed between
//! `m n^-alpha` and `M n^-alpha` with `alpha > 1`, any sequence of sample
//! sizes at which an equal-weight rule attains the rate must satisfy
//!
//! ```text
//! rho >= g(rho),   g(rho) = 1 + [ (m/M) (1 + rho^(1-alpha))^-1 ]^(1/(alpha-1))
//! ```
//!
//! for every consecutive ratio `rho = n_{k+1} / n_k`. The map `g` is an
//! increasing contraction of `[1, 2]` into itself, so it has a unique fixed
//! point `rho* in (1, 2)`: the critical extension factor. This module solves
//! for `rho*` (by fixed-point iteration and by a Brent root find, cross
//! checked), exposes the analytic facts about `g` (derivative, Lipschitz
//! constant, closed-form floor `g(1)`), inverts the bound into the minimum
//! inefficiency `M/m` a slowly extending sequence must pay, and generalizes
//! the floor to rates carrying a logarithmic factor.
//!
//! Numerics: quantities of the form `rho - 1` can sit far below the f64
//! resolution of numbers near 1 (e.g. `alpha = 1.1`, `m/M = 0.01` puts the
//! floor at `1 + 1e-23`). Every computation therefore runs in "excess" form
//! `e = rho - 1` using `ln_1p`, and the solved excess is reported alongside
//! the rounded `rho*`.

use std::fmt;

use crate::rootfind::{
    self, Bracket, RootFindError, DEFAULT_BRENT_MAX_ITER, DEFAULT_FIXED_POINT_MAX_ITER,
};

/// Default absolute tolerance on `rho*` for [`solve_rho_star`].
pub const DEFAULT_SOLVE_TOL: f64 = 1e-12;

/// Above this `alpha` the solve switches to the flagged asymptotic path:
/// `rho^(1-alpha)` is numerically invisible next to 1 and `rho*` is within
/// one part in 1e19 of 2, so the solution is reported as `2 - correction`
/// with [`SolveMethod::AsymptoticCap`] instead of pretending both routes
/// independently confirmed it.
pub const ALPHA_NUMERIC_CAP: f64 = 64.0;

/// Default slack when deciding whether a step ratio clears the bound, sized
/// so that schedules built from the solver's own output always validate.
pub const DEFAULT_VALIDATION_TOL: f64 = 1e-9;

/// Largest representable excess `rho - 1` strictly below 1, i.e.
/// `1 + MAX_EXCESS` is the largest f64 strictly below 2.
const MAX_EXCESS: f64 = 1.0 - f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamError {
    /// The theory only applies to superlinear rates.
    AlphaNotAboveOne { alpha: f64 },
    LowerConstantNotPositive { m: f64 },
    UpperConstantBelowLower { m: f64, big_m: f64 },
    NonFinite,
    /// `rho` must lie strictly inside the stated interval.
    RhoOutOfRange { rho: f64, lo: f64, hi: f64 },
    GammaOutOfRange { gamma: f64, alpha: f64 },
    BetaNegative { beta: f64 },
}

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::AlphaNotAboveOne { alpha } => {
                write!(f, "alpha must exceed 1, got {alpha}")
            }
            Self::LowerConstantNotPositive { m } => {
                write!(f, "lower constant m must be positive, got {m}")
            }
            Self::UpperConstantBelowLower { m, big_m } => {
                write!(f, "upper constant M = {big_m} must be at least m = {m}")
            }
            Self::NonFinite => write!(f, "parameters must be finite"),
            Self::RhoOutOfRange { rho, lo, hi } => {
                write!(f, "rho must lie in ({lo}, {hi}), got {rho}")
            }
            Self::GammaOutOfRange { gamma, alpha } => {
                write!(f, "gamma must lie in (1, alpha) = (1, {alpha}), got {gamma}")
            }
            Self::BetaNegative { beta } => {
                write!(f, "log exponent beta must be nonnegative, got {beta}")
            }
        }
    }
}

impl std::error::Error for ParamError {}

/// The rate exponent and error-constant pair of the two-sided bound
/// `m n^-alpha <= error <= M n^-alpha`.
///
/// Construction validates `alpha > 1` and `0 < m <= M < inf`, so a value of
/// this type is always usable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    alpha: f64,
    m: f64,
    big_m: f64,
}

impl BoundParams {
    pub fn new(alpha: f64, m: f64, big_m: f64) -> Result<Self, ParamError> {
        if !alpha.is_finite() || !m.is_finite() || !big_m.is_finite() {
            return Err(ParamError::NonFinite);
        }
        if alpha <= 1.0 {
            return Err(ParamError::AlphaNotAboveOne { alpha });
        }
        if m <= 0.0 {
            return Err(ParamError::LowerConstantNotPositive { m });
        }
        if big_m < m {
            return Err(ParamError::UpperConstantBelowLower { m, big_m });
        }
        Ok(Self { alpha, m, big_m })
    }

    /// Convenience constructor for `m = ratio`, `M = 1`.
    pub fn from_ratio(alpha: f64, ratio: f64) -> Result<Self, ParamError> {
        Self::new(alpha, ratio, 1.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn big_m(&self) -> f64 {
        self.big_m
    }

    /// `m / M`, always in `(0, 1]`.
    pub fn ratio(&self) -> f64 {
        self.m / self.big_m
    }

    /// The recurring exponent `1 / (alpha - 1)`.
    fn exponent(&self) -> f64 {
        1.0 / (self.alpha - 1.0)
    }
}

/// How a reported `rho*` was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    FixedPoint,
    Brent,
    /// Both routes ran and agreed within `10 * tol`.
    AgreementOfBoth,
    /// `alpha` exceeded [`ALPHA_NUMERIC_CAP`]; the value is the flagged
    /// `2 - correction` report from the excess-space iteration alone.
    AsymptoticCap,
}

impl fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::FixedPoint => "fixed_point",
            Self::Brent => "brent",
            Self::AgreementOfBoth => "agreement_of_both",
            Self::AsymptoticCap => "asymptotic_cap",
        };
        f.write_str(s)
    }
}

/// The solved critical extension factor with convergence metadata.
#[derive(Debug, Clone, Copy)]
pub struct ExtensionSolution {
    /// `1 + rho_star_excess`, rounded to f64. Always strictly inside (1, 2),
    /// but may collapse onto the excess's representable neighbour of 1 when
    /// the excess is tiny.
    pub rho_star: f64,
    /// `rho* - 1` carried separately so spacings far below the f64 grid near
    /// 1 survive (e.g. `alpha = 1.1`, `m/M = 0.01` gives an excess ~ 1e-23).
    pub rho_star_excess: f64,
    /// `|g(rho*) - rho*|` at the returned point.
    pub residual: f64,
    /// Combined iteration count over the routes that ran.
    pub iterations: usize,
    pub method: SolveMethod,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolveError {
    NonPositiveTolerance { tol: f64 },
    /// Carries the best iterate found before the cap was hit.
    NonConvergence { best_rho: f64, residual: f64, iterations: usize },
    /// Fixed-point and Brent answers differ by more than `10 * tol`.
    SolverDisagreement { fixed_point: f64, brent: f64 },
    RootFind(RootFindError),
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NonPositiveTolerance { tol } => {
                write!(f, "tolerance must be positive, got {tol}")
            }
            Self::NonConvergence { best_rho, residual, iterations } => write!(
                f,
                "no convergence after {iterations} iterations; best rho = {best_rho} (residual {residual:.3e})"
            ),
            Self::SolverDisagreement { fixed_point, brent } => write!(
                f,
                "fixed-point ({fixed_point}) and Brent ({brent}) answers disagree beyond 10*tol"
            ),
            Self::RootFind(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for SolveError {}

impl From<RootFindError> for SolveError {
    fn from(e: RootFindError) -> Self {
        Self::RootFind(e)
    }
}

/// `g(1 + e) - 1` without ever forming `1 + e`: the bound map in excess form.
///
/// `t = (1+e)^(1-alpha)` and the outer power both go through logarithms, so
/// excesses down to the subnormal range stay meaningful.
pub fn fixed_point_map_excess(excess: f64, p: BoundParams) -> f64 {
    let t = ((1.0 - p.alpha) * excess.ln_1p()).exp();
    ((p.ratio().ln() - t.ln_1p()) * p.exponent()).exp()
}

/// The bound map `g(rho) = 1 + [(m/M)(1 + rho^(1-alpha))^-1]^(1/(alpha-1))`.
///
/// Maps `[1, 2]` into `(1, 2)` for every valid parameter set.
pub fn fixed_point_map(rho: f64, p: BoundParams) -> f64 {
    1.0 + fixed_point_map_excess(rho - 1.0, p)
}

/// `g'(rho) = (m/M)^(1/(alpha-1)) (1 + rho^(1-alpha))^(-1/(alpha-1)-1) rho^-alpha`,
/// strictly positive on `[1, 2]` and maximal at `rho = 1`.
pub fn map_derivative(rho: f64, p: BoundParams) -> f64 {
    let k = p.exponent();
    let t = ((1.0 - p.alpha) * rho.ln()).exp();
    (k * p.ratio().ln() - (k + 1.0) * t.ln_1p() - p.alpha * rho.ln()).exp()
}

/// `g(1) - 1 = (m/2M)^(1/(alpha-1))`, the closed-form floor in excess form.
pub fn closed_form_floor_excess(p: BoundParams) -> f64 {
    ((p.ratio() / 2.0).ln() * p.exponent()).exp()
}

/// The closed-form floor `g(1) = 1 + (m/2M)^(1/(alpha-1)) < rho*`.
pub fn closed_form_floor(p: BoundParams) -> f64 {
    1.0 + closed_form_floor_excess(p)
}

/// The Lipschitz constant of `g` on `[1, 2]`:
/// `lambda = (m/M)^(1/(alpha-1)) 2^(-1/(alpha-1)-1) = g'(1) < 1/2`.
pub fn lipschitz_bound(p: BoundParams) -> f64 {
    let k = p.exponent();
    (k * p.ratio().ln() - (k + 1.0) * std::f64::consts::LN_2).exp()
}

/// Solves `g(rho*) = rho*` on `(1, 2)` two ways — fixed-point iteration from
/// `rho = 1` and a Brent root find of `g(rho) - rho` on `[1, 2]` — and
/// requires the answers to agree within `10 * tol`.
///
/// For `alpha` above [`ALPHA_NUMERIC_CAP`] only the excess-space iteration
/// runs and the result is flagged [`SolveMethod::AsymptoticCap`]; `rho*` is
/// then within one part in 1e19 of 2 and reported as `2 - correction`,
/// clamped to the largest f64 strictly below 2.
pub fn solve_rho_star(p: BoundParams, tol: f64) -> Result<ExtensionSolution, SolveError> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(SolveError::NonPositiveTolerance { tol });
    }
    let g = |e: f64| fixed_point_map_excess(e, p);

    let fp = rootfind::fixed_point_iterate(g, 0.0, 0.0, 1.0, tol, DEFAULT_FIXED_POINT_MAX_ITER)?;
    if !fp.converged {
        return Err(SolveError::NonConvergence {
            best_rho: 1.0 + fp.x,
            residual: fp.residual,
            iterations: fp.iterations,
        });
    }

    // One post-convergence refinement: when the floor g(1) itself lies
    // within tol of 1 the iteration stops on its very first iterate, which
    // is exactly the floor; a single extra contraction step restores the
    // strict floor < rho* ordering wherever f64 can represent it, and for a
    // contraction it can only move the estimate closer to the root.
    let refined = g(fp.x);

    if p.alpha() > ALPHA_NUMERIC_CAP {
        let excess = refined.min(MAX_EXCESS);
        return Ok(ExtensionSolution {
            rho_star: 1.0 + excess,
            rho_star_excess: excess,
            residual: (g(excess) - excess).abs(),
            iterations: fp.iterations,
            method: SolveMethod::AsymptoticCap,
        });
    }

    let h = |e: f64| g(e) - e;
    let bracket = Bracket::new(h, 0.0, 1.0)?;
    let br = rootfind::brent(h, &bracket, tol, DEFAULT_BRENT_MAX_ITER)?;
    if !br.converged {
        return Err(SolveError::NonConvergence {
            best_rho: 1.0 + br.x,
            residual: br.f_x.abs(),
            iterations: br.iterations,
        });
    }
    if (fp.x - br.x).abs() > 10.0 * tol {
        return Err(SolveError::SolverDisagreement {
            fixed_point: 1.0 + fp.x,
            brent: 1.0 + br.x,
        });
    }

    // the monotone fixed-point answer is canonical; Brent corroborates it
    let excess = refined.min(MAX_EXCESS);
    Ok(ExtensionSolution {
        rho_star: 1.0 + excess,
        rho_star_excess: excess,
        residual: (g(excess) - excess).abs(),
        iterations: fp.iterations + br.iterations,
        method: SolveMethod::AgreementOfBoth,
    })
}

/// Solves with the default tolerance and iteration caps.
pub fn solve_rho_star_default(p: BoundParams) -> Result<ExtensionSolution, SolveError> {
    solve_rho_star(p, DEFAULT_SOLVE_TOL)
}

/// Whether a step ratio `rho` clears the bound `rho >= g(rho)`, i.e. whether
/// a rate-optimal sequence is permitted to contain it. Evaluated with
/// [`DEFAULT_VALIDATION_TOL`] of slack so the solver's own `rho*` passes.
///
/// `rho = 2` (and anything larger) is always admissible: the bound never
/// rules out doubling the sample size.
pub fn is_admissible_extension(rho: f64, p: BoundParams) -> Result<bool, ParamError> {
    is_admissible_extension_with_tol(rho, p, DEFAULT_VALIDATION_TOL)
}

/// [`is_admissible_extension`] with an explicit slack.
pub fn is_admissible_extension_with_tol(
    rho: f64,
    p: BoundParams,
    tol: f64,
) -> Result<bool, ParamError> {
    if !rho.is_finite() || rho <= 1.0 {
        return Err(ParamError::RhoOutOfRange { rho, lo: 1.0, hi: f64::INFINITY });
    }
    let e = rho - 1.0;
    Ok(e + tol >= fixed_point_map_excess(e, p))
}

/// The smallest admissible inefficiency `M/m` for a rate-optimal sequence
/// containing the step ratio `rho`, from the exact rearrangement of the
/// bound at equality:
///
/// ```text
/// M/m = (1 + rho^(1-alpha))^-1 (rho - 1)^(1-alpha)
/// ```
///
/// Diverges as `rho` falls to 1: approaching an arithmetic progression costs
/// unbounded constant-factor inefficiency.
pub fn min_inefficiency(rho: f64, alpha: f64) -> Result<f64, ParamError> {
    if !rho.is_finite() || rho <= 1.0 || rho >= 2.0 {
        return Err(ParamError::RhoOutOfRange { rho, lo: 1.0, hi: 2.0 });
    }
    min_inefficiency_excess(rho - 1.0, alpha)
}

/// [`min_inefficiency`] taking `rho - 1` directly, for excesses too small to
/// survive the `1 + e` rounding.
pub fn min_inefficiency_excess(excess: f64, alpha: f64) -> Result<f64, ParamError> {
    if !alpha.is_finite() || alpha <= 1.0 {
        return Err(ParamError::AlphaNotAboveOne { alpha });
    }
    if !excess.is_finite() || excess <= 0.0 || excess >= 1.0 {
        return Err(ParamError::RhoOutOfRange { rho: 1.0 + excess, lo: 1.0, hi: 2.0 });
    }
    let t = ((1.0 - alpha) * excess.ln_1p()).exp();
    Ok((-t.ln_1p() + (1.0 - alpha) * excess.ln()).exp())
}

/// The display form of the inversion as printed in the source analysis,
/// `M/m = (1 + rho^(1-alpha))^(-1/(alpha-1)) / (rho - 1)`.
///
/// Coincides with [`min_inefficiency`] only at `alpha = 2`; the exact
/// rearrangement is the default because it round-trips with
/// [`solve_rho_star`]. Kept for comparison.
pub fn min_inefficiency_printed_form(rho: f64, alpha: f64) -> Result<f64, ParamError> {
    if !alpha.is_finite() || alpha <= 1.0 {
        return Err(ParamError::AlphaNotAboveOne { alpha });
    }
    if !rho.is_finite() || rho <= 1.0 || rho >= 2.0 {
        return Err(ParamError::RhoOutOfRange { rho, lo: 1.0, hi: 2.0 });
    }
    let e = rho - 1.0;
    let k = 1.0 / (alpha - 1.0);
    let t = ((1.0 - alpha) * e.ln_1p()).exp();
    Ok((-k * t.ln_1p() - e.ln()).exp())
}

/// Parameters for rates of the form `n^-alpha log(n)^beta`.
///
/// `beta` is carried for interface completeness but does not enter the floor
/// formula; the surrogate exponent `gamma in (1, alpha)` does.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRateParams {
    base: BoundParams,
    beta: f64,
    gamma: f64,
}

impl LogRateParams {
    pub fn new(base: BoundParams, beta: f64, gamma: f64) -> Result<Self, ParamError> {
        if !beta.is_finite() || !gamma.is_finite() {
            return Err(ParamError::NonFinite);
        }
        if beta < 0.0 {
            return Err(ParamError::BetaNegative { beta });
        }
        if gamma <= 1.0 || gamma >= base.alpha() {
            return Err(ParamError::GammaOutOfRange { gamma, alpha: base.alpha() });
        }
        Ok(Self { base, beta, gamma })
    }

    pub fn base(&self) -> BoundParams {
        self.base
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Asymptotic step-ratio floor under the rate `n^-alpha log(n)^beta`:
/// `1 + (m/2M)^(1/(gamma-1))` for any surrogate `1 < gamma < alpha`.
pub fn log_rate_floor(lp: &LogRateParams) -> f64 {
    1.0 + log_rate_floor_excess(lp)
}

/// [`log_rate_floor`] in excess form.
pub fn log_rate_floor_excess(lp: &LogRateParams) -> f64 {
    ((lp.base.ratio() / 2.0).ln() / (lp.gamma - 1.0)).exp()
}
