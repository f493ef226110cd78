//! Operator parameters and their admissibility constraints.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the operator `L = (1 + |x|^alpha) * Laplacian` on `R^N`.
///
/// The laboratory works in the regime where the whole-space theory is
/// nontrivial:
///
/// - `dim >= 3`, so the Newtonian kernel `|x|^(2-N)` decays at infinity and
///   the explicit inverse of `-L` converges;
/// - `alpha > 2`, so the diffusion coefficient grows fast enough for the
///   inverse to be bounded (and for the generator to have compact resolvent);
/// - when a Lebesgue exponent is supplied, `p > N/(N-2)`, the sharp threshold
///   below which `(-L)^{-1}` fails to be bounded on `L^p`.
///
/// `p = None` selects the sup-norm / space-of-continuous-functions setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorParams {
    dim: u32,
    alpha: f64,
    p: Option<f64>,
}

impl OperatorParams {
    /// Validates and stores the parameter triple.
    pub fn new(dim: u32, alpha: f64, p: Option<f64>) -> Result<Self> {
        if dim < 3 {
            return Err(Error::InvalidParams(format!(
                "dimension must be at least 3, got {dim}"
            )));
        }
        if !alpha.is_finite() || alpha <= 2.0 {
            return Err(Error::InvalidParams(format!(
                "coefficient exponent must satisfy alpha > 2, got {alpha}"
            )));
        }
        if let Some(p) = p {
            let critical = dim as f64 / (dim as f64 - 2.0);
            if !p.is_finite() || p <= critical {
                return Err(Error::InvalidParams(format!(
                    "Lebesgue exponent must satisfy p > N/(N-2) = {critical:.6}, got {p}"
                )));
            }
        }
        Ok(Self { dim, alpha, p })
    }

    /// Space dimension `N`.
    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// Space dimension as a float, for formulas.
    pub fn n(&self) -> f64 {
        self.dim as f64
    }

    /// Growth exponent `alpha` of the diffusion coefficient.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Lebesgue exponent, if one was supplied.
    pub fn p(&self) -> Option<f64> {
        self.p
    }

    /// Lebesgue exponent, for callers that require one.
    pub fn p_required(&self) -> Result<f64> {
        self.p
            .ok_or_else(|| Error::InvalidParams("this routine needs a Lebesgue exponent p".into()))
    }

    /// Conjugate exponent `p' = p/(p-1)`.
    pub fn p_conjugate(&self) -> Result<f64> {
        let p = self.p_required()?;
        Ok(p / (p - 1.0))
    }

    /// The threshold `N/(N-2)` below which the inverse is unbounded on `L^p`.
    pub fn critical_p(&self) -> f64 {
        self.n() / (self.n() - 2.0)
    }

    /// Diffusion coefficient `1 + r^alpha`.
    pub fn coefficient(&self, r: f64) -> f64 {
        1.0 + r.powf(self.alpha)
    }

    /// Returns a copy with a different Lebesgue exponent (re-validated).
    pub fn with_p(&self, p: Option<f64>) -> Result<Self> {
        Self::new(self.dim, self.alpha, p)
    }
}
