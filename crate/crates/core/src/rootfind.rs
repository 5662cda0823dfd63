//! Bracketed scalar root finding (Brent's method) and fixed-point iteration
//! with convergence accounting.
//!
//! Both solvers report how they stopped instead of silently returning a
//! number: iteration counts, the residual at the returned point, and for the
//! fixed-point driver whether the iterates moved monotonically.

use std::fmt;

/// Default iteration cap for [`brent`].
pub const DEFAULT_BRENT_MAX_ITER: usize = 100;

/// Default iteration cap for [`fixed_point_iterate`].
pub const DEFAULT_FIXED_POINT_MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RootFindError {
    /// The endpoints do not bracket a sign change.
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    /// `lo` must be a finite number strictly below `hi`.
    InvalidInterval { lo: f64, hi: f64 },
    NonPositiveTolerance { tol: f64 },
    /// An iterate left the stated interval, so the map is not a self-map.
    DomainViolation { x: f64, lo: f64, hi: f64 },
    NonFiniteEvaluation { x: f64 },
}

impl fmt::Display for RootFindError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NoSignChange { lo, hi, f_lo, f_hi } => write!(
                f,
                "no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}"
            ),
            Self::InvalidInterval { lo, hi } => {
                write!(f, "invalid interval: lo = {lo} must be below hi = {hi}")
            }
            Self::NonPositiveTolerance { tol } => {
                write!(f, "tolerance must be positive, got {tol}")
            }
            Self::DomainViolation { x, lo, hi } => {
                write!(f, "iterate {x} escaped the interval [{lo}, {hi}]")
            }
            Self::NonFiniteEvaluation { x } => {
                write!(f, "function evaluated to a non-finite value near x = {x}")
            }
        }
    }
}

impl std::error::Error for RootFindError {}

/// An interval on which the target function changes sign.
///
/// The sign change is checked at construction, so a `Bracket` handed to
/// [`brent`] is already known to contain a root.
#[derive(Debug, Clone, Copy)]
pub struct Bracket {
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_hi: f64,
}

impl Bracket {
    pub fn new<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<Self, RootFindError> {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(RootFindError::InvalidInterval { lo, hi });
        }
        let f_lo = f(lo);
        let f_hi = f(hi);
        if !f_lo.is_finite() {
            return Err(RootFindError::NonFiniteEvaluation { x: lo });
        }
        if !f_hi.is_finite() {
            return Err(RootFindError::NonFiniteEvaluation { x: hi });
        }
        if f_lo * f_hi > 0.0 {
            return Err(RootFindError::NoSignChange { lo, hi, f_lo, f_hi });
        }
        Ok(Self { lo, hi, f_lo, f_hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }
}

/// Outcome of a bracketed root find.
#[derive(Debug, Clone, Copy)]
pub struct RootResult {
    pub x: f64,
    pub f_x: f64,
    pub iterations: usize,
    /// True when `|f_x| <= tol` or the remaining bracket shrank to `tol`
    /// (either criterion suffices; this keeps the stop robust near flat
    /// functions).
    pub converged: bool,
}

/// Brent's method: inverse quadratic interpolation with secant and bisection
/// fallbacks. Never evaluates `f` outside the initial bracket.
pub fn brent<F: Fn(f64) -> f64>(
    f: F,
    bracket: &Bracket,
    tol: f64,
    max_iter: usize,
) -> Result<RootResult, RootFindError> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(RootFindError::NonPositiveTolerance { tol });
    }
    let eps = f64::EPSILON;
    let mut a = bracket.lo;
    let mut b = bracket.hi;
    let mut fa = bracket.f_lo;
    let mut fb = bracket.f_hi;
    if fa == 0.0 {
        return Ok(RootResult { x: a, f_x: 0.0, iterations: 0, converged: true });
    }
    if fb == 0.0 {
        return Ok(RootResult { x: b, f_x: 0.0, iterations: 0, converged: true });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for iter in 1..=max_iter {
        if (fb > 0.0 && fc > 0.0) || (fb < 0.0 && fc < 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * eps * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 || fb.abs() <= tol {
            return Ok(RootResult { x: b, f_x: fb, iterations: iter, converged: true });
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // inverse quadratic interpolation, secant when only two points are distinct
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if d.abs() > tol1 {
            b += d;
        } else if xm > 0.0 {
            b += tol1;
        } else {
            b -= tol1;
        }
        fb = f(b);
        if !fb.is_finite() {
            return Err(RootFindError::NonFiniteEvaluation { x: b });
        }
    }
    Ok(RootResult { x: b, f_x: fb, iterations: max_iter, converged: false })
}

/// Direction the fixed-point iterates moved in, ignoring the final stalled
/// repeat once the sequence has converged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    /// Every iterate equalled its predecessor (e.g. the identity map, or a
    /// start already at the fixed point).
    Constant,
    Mixed,
}

/// Outcome of a fixed-point iteration.
#[derive(Debug, Clone, Copy)]
pub struct FixedPointResult {
    pub x: f64,
    /// `|g(x) - x|` at the returned point.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub monotonicity: Monotonicity,
}

/// Iterates `x <- g(x)` from `x0`, requiring every iterate to stay in
/// `[lo, hi]`. Stops once a step is no larger than `tol`.
///
/// For a contraction the returned residual is also at most `tol`.
pub fn fixed_point_iterate<G: Fn(f64) -> f64>(
    g: G,
    x0: f64,
    lo: f64,
    hi: f64,
    tol: f64,
    max_iter: usize,
) -> Result<FixedPointResult, RootFindError> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(RootFindError::NonPositiveTolerance { tol });
    }
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(RootFindError::InvalidInterval { lo, hi });
    }
    if x0.is_nan() || !(lo..=hi).contains(&x0) {
        return Err(RootFindError::DomainViolation { x: x0, lo, hi });
    }
    let mut x = x0;
    let mut increased = false;
    let mut decreased = false;
    let classify = |inc: bool, dec: bool| match (inc, dec) {
        (true, false) => Monotonicity::Increasing,
        (false, true) => Monotonicity::Decreasing,
        (false, false) => Monotonicity::Constant,
        (true, true) => Monotonicity::Mixed,
    };
    for iter in 1..=max_iter {
        let next = g(x);
        if !next.is_finite() {
            return Err(RootFindError::NonFiniteEvaluation { x });
        }
        if next < lo || next > hi {
            return Err(RootFindError::DomainViolation { x: next, lo, hi });
        }
        if next > x {
            increased = true;
        } else if next < x {
            decreased = true;
        }
        let step = (next - x).abs();
        x = next;
        if step <= tol {
            return Ok(FixedPointResult {
                x,
                residual: (g(x) - x).abs(),
                iterations: iter,
                converged: true,
                monotonicity: classify(increased, decreased),
            });
        }
    }
    Ok(FixedPointResult {
        x,
        residual: (g(x) - x).abs(),
        iterations: max_iter,
        converged: false,
        monotonicity: classify(increased, decreased),
    })
}
