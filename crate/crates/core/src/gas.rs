//! Polytropic gas closure in Lagrangian variables.
//!
//! Pressure is always evaluated in its `(v, theta)` form `R theta / v`; the
//! internal energy carries no additive constant.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Thermodynamic constants plus the scaled heat conductivity `nu = kappa / eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasParams {
    pub gamma: f64,
    pub r: f64,
    #[serde(default = "default_nu")]
    pub nu: f64,
}

fn default_nu() -> f64 {
    1.0
}

impl GasParams {
    pub fn new(gamma: f64, r: f64, nu: f64) -> Result<Self> {
        let g = GasParams { gamma, r, nu };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 1.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: format!("{} must exceed 1", self.gamma),
            });
        }
        if !(self.r > 0.0) || !self.r.is_finite() {
            return Err(Error::InvalidParameter {
                name: "r",
                reason: format!("{} must be positive", self.r),
            });
        }
        if !(self.nu > 0.0) || !self.nu.is_finite() {
            return Err(Error::InvalidParameter {
                name: "nu",
                reason: format!("{} must be positive", self.nu),
            });
        }
        Ok(())
    }

    /// `R / (gamma - 1)`, the specific heat at constant volume.
    #[inline]
    pub fn cv(&self) -> f64 {
        self.r / (self.gamma - 1.0)
    }

    /// Pressure from specific volume and temperature.
    #[inline]
    pub fn p(&self, v: f64, theta: f64) -> f64 {
        self.r * theta / v
    }
}

/// Fluid state `(v, u, theta)` at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct State {
    pub v: f64,
    pub u: f64,
    pub theta: f64,
}

impl State {
    pub const fn new(v: f64, u: f64, theta: f64) -> Self {
        State { v, u, theta }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v > 0.0) || !self.v.is_finite() {
            return Err(Error::InvalidParameter {
                name: "v",
                reason: format!("{} must be positive", self.v),
            });
        }
        if !self.u.is_finite() {
            return Err(Error::InvalidParameter {
                name: "u",
                reason: "must be finite".into(),
            });
        }
        if !(self.theta > 0.0) || !self.theta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "theta",
                reason: format!("{} must be positive", self.theta),
            });
        }
        Ok(())
    }

    /// Componentwise max-norm distance.
    pub fn distance(&self, other: &State) -> f64 {
        (self.v - other.v)
            .abs()
            .max((self.u - other.u).abs())
            .max((self.theta - other.theta).abs())
    }
}

pub fn pressure(s: &State, g: &GasParams) -> f64 {
    g.r * s.theta / s.v
}

pub fn internal_energy(theta: f64, g: &GasParams) -> f64 {
    g.cv() * theta
}

/// Total energy density `e + u^2/2`.
pub fn total_energy(s: &State, g: &GasParams) -> f64 {
    internal_energy(s.theta, g) + 0.5 * s.u * s.u
}

/// Characteristic speeds `(lambda1, lambda2, lambda3)` of the inviscid system.
pub fn eigenvalues(s: &State, g: &GasParams) -> (f64, f64, f64) {
    let l3 = (g.gamma * g.r * s.theta).sqrt() / s.v;
    (-l3, 0.0, l3)
}

#[inline]
pub fn lambda3(s: &State, g: &GasParams) -> f64 {
    eigenvalues(s, g).2
}
