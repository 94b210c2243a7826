//! Regularized asperity-contact law and the nonlinear complementarity
//! functions for normal and frictional contact.
//!
//! The layer closes exponentially: `gap(p) = g_eff (1 - exp(-p / (kappa g_eff)))`
//! with `g_eff = (1 - tol) g_max`. Its slope at `p = 0` is `1 / kappa`, so
//! `kappa g_max` acts as the stiffness of the asperity layer, and the film
//! thickness `h = g + g_max` never drops below `tol g_max`.

use serde::{Deserialize, Serialize};

use crate::ad::Scalar;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularizationParams {
    /// Thickness of the asperity layer [mm].
    pub g_max: f64,
    /// Initial compliance scale [MPa/mm].
    pub kappa: f64,
    /// Fraction of `g_max` kept open at full saturation.
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Combined RMS roughness [mm].
    #[serde(default)]
    pub sigma: f64,
}

fn default_tol() -> f64 {
    0.01
}

impl RegularizationParams {
    pub fn new(g_max: f64, kappa: f64) -> Result<Self> {
        let p = Self {
            g_max,
            kappa,
            tol: default_tol(),
            sigma: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g_max > 0.0 && self.g_max.is_finite()) {
            return Err(Error::InvalidParameter(format!("g_max must be positive, got {}", self.g_max)));
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!("kappa must be positive, got {}", self.kappa)));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::InvalidParameter(format!("tol must lie in (0, 1), got {}", self.tol)));
        }
        if !(self.sigma >= 0.0) {
            return Err(Error::InvalidParameter(format!("sigma must be nonnegative, got {}", self.sigma)));
        }
        Ok(())
    }

    pub fn g_eff(&self) -> f64 {
        (1.0 - self.tol) * self.g_max
    }

    /// Stiffness of the asperity layer, `kappa * g_max` [MPa].
    pub fn layer_modulus(&self) -> f64 {
        self.kappa * self.g_max
    }

    /// Smooth extension of the gap law, valid for any sign of `p`.
    pub fn gap_law<T: Scalar>(&self, p: T) -> T {
        let ge = self.g_eff();
        (T::cst(1.0) - (p * (-1.0 / (self.kappa * ge))).exp()) * ge
    }

    /// Film thickness `g + g_max`, grouped so the saturated layer gives
    /// exactly `tol g_max`.
    pub fn film<T: Scalar>(&self, weighted_gap: T) -> T {
        (weighted_gap + self.g_eff()) + self.tol * self.g_max
    }

    pub fn gap_law_slope<T: Scalar>(&self, p: T) -> T {
        let ge = self.g_eff();
        (p * (-1.0 / (self.kappa * ge))).exp() * (1.0 / self.kappa)
    }
}

/// Regularized gap closure for a nonnegative contact pressure.
pub fn regularized_gap(p: f64, params: &RegularizationParams) -> Result<f64> {
    if !(p >= 0.0) {
        return Err(Error::Domain(format!("contact pressure must be nonnegative, got {p}")));
    }
    Ok(params.gap_law(p))
}

pub fn regularized_gap_slope(p: f64, params: &RegularizationParams) -> Result<f64> {
    if !(p >= 0.0) {
        return Err(Error::Domain(format!("contact pressure must be nonnegative, got {p}")));
    }
    Ok(params.gap_law_slope(p))
}

/// Pressure needed to close the layer by `g` (inverse of the gap law).
pub fn pressure_for_gap(g: f64, params: &RegularizationParams) -> Result<f64> {
    let ge = params.g_eff();
    if !(g >= 0.0 && g < ge) {
        return Err(Error::Domain(format!("closure {g} outside [0, {ge})")));
    }
    Ok(-params.kappa * ge * (1.0 - g / ge).ln())
}

/// Heuristic initial compliance giving a layer one tenth as stiff as the bulk.
pub fn suggest_kappa(youngs_modulus: f64, g_max: f64) -> f64 {
    youngs_modulus / (10.0 * g_max)
}

/// Film thickness `h = g + g_max` from a weighted gap.
pub fn film_thickness(weighted_gap: f64, params: &RegularizationParams) -> Result<f64> {
    let h = params.film(weighted_gap);
    if !(h > 0.0) {
        return Err(Error::Domain(format!("film thickness {h} is not positive")));
    }
    Ok(h)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContactStatus {
    Inactive,
    Stick,
    Slip,
}

impl ContactStatus {
    pub fn is_active(self) -> bool {
        self != ContactStatus::Inactive
    }
}

/// `C_n = lambda_n - max(0, lambda_n - c_n (g + gap(lambda_n)))`.
pub fn ncp_normal(lambda_n: f64, weighted_gap: f64, params: &RegularizationParams, c_n: f64) -> f64 {
    lambda_n - (lambda_n - c_n * (weighted_gap + params.gap_law(lambda_n))).max(0.0)
}

/// Frictional NCP for the single tangential component of a 2D problem:
/// `C_t = max(mu lambda_n, |lambda_t + c_t v|) lambda_t - mu lambda_n (lambda_t + c_t v)`.
pub fn ncp_tangential(lambda_t: f64, lambda_n: f64, rel_velocity: f64, mu: f64, c_t: f64) -> f64 {
    let z = lambda_t + c_t * rel_velocity;
    (mu * lambda_n).max(z.abs()) * lambda_t - mu * lambda_n * z
}

/// Branch of the semi-smooth NCPs at the given state.
pub fn classify(
    lambda_n: f64,
    lambda_t: f64,
    weighted_gap: f64,
    rel_velocity: f64,
    params: &RegularizationParams,
    mu: f64,
    c_n: f64,
    c_t: f64,
) -> ContactStatus {
    if lambda_n - c_n * (weighted_gap + params.gap_law(lambda_n)) <= 0.0 {
        return ContactStatus::Inactive;
    }
    if (lambda_t + c_t * rel_velocity).abs() > mu * lambda_n {
        ContactStatus::Slip
    } else {
        ContactStatus::Stick
    }
}
