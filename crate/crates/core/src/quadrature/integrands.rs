//! Test integrands with analytically known means.
//!
//! Registration cross-checks the claimed mean against a deterministic
//! midpoint grid, so a typo in a hand-computed integral fails fast instead
//! of poisoning every error measurement downstream.

use std::fmt;
use std::sync::Arc;

use super::QuadratureError;

type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Tolerance of the registration grid check.
const REGISTRATION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmoothnessClass {
    BoundedVariation,
    Smooth,
    Antisymmetric,
}

impl fmt::Display for SmoothnessClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::BoundedVariation => "bounded_variation",
            Self::Smooth => "smooth",
            Self::Antisymmetric => "antisymmetric",
        };
        f.write_str(s)
    }
}

/// An integrand over `[0, 1]^d` with its exact mean.
#[derive(Clone)]
pub struct Integrand {
    label: String,
    dimension: usize,
    evaluator: Evaluator,
    true_mean: f64,
    smoothness: SmoothnessClass,
    /// A bound on `|f|` over the domain, used to scale identity residuals.
    abs_bound: f64,
}

impl fmt::Debug for Integrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Integrand")
            .field("label", &self.label)
            .field("dimension", &self.dimension)
            .field("true_mean", &self.true_mean)
            .field("smoothness", &self.smoothness)
            .finish()
    }
}

impl Integrand {
    /// Registers an integrand, validating `true_mean` against a midpoint
    /// grid (65536 cells in 1-d, 256x256 in 2-d) to 1e-6.
    pub fn new(
        label: impl Into<String>,
        dimension: usize,
        evaluator: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        true_mean: f64,
        smoothness: SmoothnessClass,
        abs_bound: f64,
    ) -> Result<Self, QuadratureError> {
        if dimension == 0 || dimension > 4 {
            return Err(QuadratureError::UnsupportedDimension { dimension });
        }
        let candidate = Self {
            label: label.into(),
            dimension,
            evaluator: Arc::new(evaluator),
            true_mean,
            smoothness,
            abs_bound,
        };
        let measured = candidate.grid_mean();
        if !(measured - true_mean).abs().is_finite()
            || (measured - true_mean).abs() > REGISTRATION_TOL
        {
            return Err(QuadratureError::MeanMismatch {
                label: candidate.label,
                claimed: true_mean,
                measured,
            });
        }
        Ok(candidate)
    }

    fn grid_mean(&self) -> f64 {
        let per_dim: usize = match self.dimension {
            1 => 65536,
            2 => 256,
            3 => 64,
            _ => 32,
        };
        let cells = per_dim.pow(self.dimension as u32);
        let mut sum = super::KahanSum::default();
        let mut x = vec![0.0; self.dimension];
        for c in 0..cells {
            let mut rem = c;
            for coord in x.iter_mut() {
                *coord = (rem % per_dim) as f64 + 0.5;
                *coord /= per_dim as f64;
                rem /= per_dim;
            }
            sum.add((self.evaluator)(&x));
        }
        sum.value() / cells as f64
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dimension);
        (self.evaluator)(x)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn true_mean(&self) -> f64 {
        self.true_mean
    }

    pub fn smoothness(&self) -> SmoothnessClass {
        self.smoothness
    }

    pub fn abs_bound(&self) -> f64 {
        self.abs_bound
    }

    /// The fixed harness suite: analytic means, spanning bounded-variation,
    /// smooth, antisymmetric and a 2-d case.
    pub fn suite() -> Vec<Integrand> {
        vec![
            Self::new("x", 1, |x| x[0], 0.5, SmoothnessClass::BoundedVariation, 1.0)
                .expect("suite integrand"),
            Self::new("x2", 1, |x| x[0] * x[0], 1.0 / 3.0, SmoothnessClass::Smooth, 1.0)
                .expect("suite integrand"),
            Self::new(
                "expx",
                1,
                |x| x[0].exp(),
                std::f64::consts::E - 1.0,
                SmoothnessClass::Smooth,
                std::f64::consts::E,
            )
            .expect("suite integrand"),
            Self::new(
                "xy",
                2,
                |x| x[0] * x[1],
                0.25,
                SmoothnessClass::Smooth,
                1.0,
            )
            .expect("suite integrand"),
            Self::new(
                "x_centered",
                1,
                |x| x[0] - 0.5,
                0.0,
                SmoothnessClass::Antisymmetric,
                0.5,
            )
            .expect("suite integrand"),
        ]
    }
}
