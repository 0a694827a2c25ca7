//! Ensemble parameters shared by every kernel.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamsError {
    #[error("alpha must exceed -1, got {0}")]
    Alpha(f64),
    #[error("theta must be positive, got {0}")]
    Theta(f64),
    #[error("theta must be at least 1 for this operation, got {0}")]
    ThetaBelowOne(f64),
    #[error("ensemble size must be at least 1")]
    EmptyEnsemble,
}

/// The triple `(α, θ, n)` of a biorthogonal Laguerre ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleParams {
    alpha: f64,
    theta: f64,
    n: usize,
}

impl EnsembleParams {
    pub fn new(alpha: f64, theta: f64, n: usize) -> Result<Self, ParamsError> {
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(ParamsError::Alpha(alpha));
        }
        if !(theta > 0.0) || !theta.is_finite() {
            return Err(ParamsError::Theta(theta));
        }
        if n == 0 {
            return Err(ParamsError::EmptyEnsemble);
        }
        Ok(Self { alpha, theta, n })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn with_n(&self, n: usize) -> Result<Self, ParamsError> {
        Self::new(self.alpha, self.theta, n)
    }

    /// Large-n statements are only established for `θ ≥ 1`.
    pub fn require_theta_at_least_one(&self) -> Result<(), ParamsError> {
        if self.theta >= 1.0 {
            Ok(())
        } else {
            Err(ParamsError::ThetaBelowOne(self.theta))
        }
    }

    /// `max{0, 1 − (α+1)/θ}`, the left edge of the admissible abscissae.
    pub fn abscissa_floor(&self) -> f64 {
        (1.0 - (self.alpha + 1.0) / self.theta).max(0.0)
    }
}
