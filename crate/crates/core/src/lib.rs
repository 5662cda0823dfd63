//! Geometric-spacing constraints for extensible equal-weight quadrature rules.
//!
//! When the worst-case (or root-mean-square) integration error of a function
//! class decays like `n^-alpha` with `alpha > 1`, an equal-weight rule can
//! only be rate-optimal along sample sizes that grow at least geometrically.
//! This crate computes the critical extension factor `rho*` — the smallest
//! admissible ratio of consecutive sample sizes — its closed-form floor, and
//! the inefficiency cost of extending more slowly, and it ships a desk-scale
//! empirical harness (low-discrepancy generators, exact error identities,
//! convergence-rate fits) for checking those claims numerically.
//!
//! Everything here is a pure function of its inputs; there is no shared
//! mutable state and all public types are `Send + Sync`.
//!
//! ```
//! use extquad::bounds::{solve_rho_star_default, BoundParams};
//! use extquad::schedule::{geometric_schedule, validate_schedule};
//!
//! // alpha = 2 with matched constants: rho* is the golden ratio
//! let p = BoundParams::new(2.0, 1.0, 1.0)?;
//! let sol = solve_rho_star_default(p)?;
//! assert!((sol.rho_star - 1.618033988749895).abs() < 1e-10);
//!
//! // a schedule built from the solved factor validates cleanly
//! let schedule = geometric_schedule(100, sol.rho_star, 8)?;
//! assert!(validate_schedule(&schedule, p, 1e-9)?.admissible);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod bounds;
pub mod quadrature;
pub mod rootfind;
pub mod schedule;

pub use bounds::{BoundParams, ExtensionSolution, LogRateParams, SolveMethod};
pub use quadrature::{ErrorProfile, Integrand, PointSequence, RateFit};
pub use schedule::{Schedule, ScheduleReport};
