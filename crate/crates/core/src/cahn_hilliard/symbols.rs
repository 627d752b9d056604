use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ARG_SLACK: f64 = 1e-12;

/// Which dynamic boundary problem is treated: the biharmonic one with
/// `(λ + Δ²)` in the interior, or the second-order heat variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Biharmonic,
    Heat,
}

/// Sector data `θ ∈ (π/2, π)`, `ε ∈ (0, (π-θ)/4)`, shift `λ₀ > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChConfig {
    pub theta: f64,
    pub eps: f64,
    pub lambda0: f64,
    pub model: Model,
}

impl ChConfig {
    pub fn new(theta: f64, eps: f64, lambda0: f64, model: Model) -> Result<Self> {
        let cfg = ChConfig {
            theta,
            eps,
            lambda0,
            model,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta > PI / 2.0 && self.theta < PI) {
            return Err(Error::Parameter(format!("θ = {} not in (π/2, π)", self.theta)));
        }
        if !(self.eps > 0.0 && self.eps < (PI - self.theta) / 4.0) {
            return Err(Error::Parameter(format!(
                "ε = {} not in (0, (π-θ)/4) = (0, {})",
                self.eps,
                (PI - self.theta) / 4.0
            )));
        }
        if !(self.lambda0 > 0.0 && self.lambda0.is_finite()) {
            return Err(Error::Parameter(format!("λ₀ = {} must be positive", self.lambda0)));
        }
        Ok(())
    }

    /// `z ∈ Σ̄_ε`, `λ ∈ Σ̄_θ`, `(z, λ) ≠ 0`.
    pub fn check_domain(&self, z: Complex64, lambda: Complex64) -> Result<()> {
        let zero = Complex64::new(0.0, 0.0);
        if z == zero && lambda == zero {
            return Err(Error::Domain("(z, λ) = (0, 0)".into()));
        }
        if z != zero && z.arg().abs() > self.eps + ARG_SLACK {
            return Err(Error::Domain(format!("z = {z} outside Σ_ε")));
        }
        if lambda != zero && lambda.arg().abs() > self.theta + ARG_SLACK {
            return Err(Error::Domain(format!("λ = {lambda} outside Σ_θ")));
        }
        if !(z.is_finite() && lambda.is_finite()) {
            return Err(Error::Domain("non-finite argument".into()));
        }
        Ok(())
    }

    /// Quasi-homogeneity exponent `q` in `|z| + |λ|^{1/q}`.
    pub fn lambda_exponent(&self) -> i32 {
        match self.model {
            Model::Biharmonic => 4,
            Model::Heat => 2,
        }
    }
}

/// `τ_{1,2} = √(z² ± i√λ)`, principal branches, inner root first.
pub fn tau_unchecked(z: Complex64, lambda: Complex64) -> (Complex64, Complex64) {
    let s = Complex64::i() * lambda.sqrt();
    let z2 = z * z;
    ((z2 + s).sqrt(), (z2 - s).sqrt())
}

pub fn tau(cfg: &ChConfig, z: Complex64, lambda: Complex64) -> Result<(Complex64, Complex64)> {
    cfg.check_domain(z, lambda)?;
    Ok(tau_unchecked(z, lambda))
}

/// `√(λ + z²)`, the single root of the heat variant.
pub fn tau_heat(z: Complex64, lambda: Complex64) -> Complex64 {
    (lambda + z * z).sqrt()
}

fn singular(what: &str, z: Complex64, lambda: Complex64) -> Error {
    Error::Singular(format!("{what} denominator vanishes at z = {z}, λ = {lambda}"))
}

/// `S = (τ₁+τ₂) / ((τ₁+τ₂)(λ+z²) + 2τ₁τ₂)`
pub fn s_unchecked(z: Complex64, lambda: Complex64) -> Result<Complex64> {
    let (t1, t2) = tau_unchecked(z, lambda);
    let sum = t1 + t2;
    let a = sum * (lambda + z * z);
    let b = 2.0 * t1 * t2;
    let den = a + b;
    if den.norm() <= 1e-14 * (a.norm() + b.norm()) || den.norm() == 0.0 {
        return Err(singular("S", z, lambda));
    }
    Ok(sum / den)
}

pub fn s_symbol(cfg: &ChConfig, z: Complex64, lambda: Complex64) -> Result<Complex64> {
    cfg.check_domain(z, lambda)?;
    match cfg.model {
        Model::Biharmonic => s_unchecked(z, lambda),
        Model::Heat => s_heat_unchecked(z, lambda),
    }
}

/// `m = (λ + z²) S`
pub fn m_unchecked(z: Complex64, lambda: Complex64) -> Result<Complex64> {
    Ok((lambda + z * z) * s_unchecked(z, lambda)?)
}

pub fn m_symbol(cfg: &ChConfig, z: Complex64, lambda: Complex64) -> Result<Complex64> {
    cfg.check_domain(z, lambda)?;
    m_unchecked(z, lambda)
}

/// `1 / (λ + √(λ+z²))`, the boundary symbol of the heat variant.
pub fn s_heat_unchecked(z: Complex64, lambda: Complex64) -> Result<Complex64> {
    let t = tau_heat(z, lambda);
    let den = lambda + t;
    if den.norm() <= 1e-14 * (lambda.norm() + t.norm()) || den.norm() == 0.0 {
        return Err(singular("heat", z, lambda));
    }
    Ok(den.inv())
}

/// `λ / (λ + √(λ+z²))`
pub fn m_heat_unchecked(z: Complex64, lambda: Complex64) -> Result<Complex64> {
    Ok(lambda * s_heat_unchecked(z, lambda)?)
}

pub fn m_heat(cfg: &ChConfig, z: Complex64, lambda: Complex64) -> Result<Complex64> {
    cfg.check_domain(z, lambda)?;
    m_heat_unchecked(z, lambda)
}

/// `|1 + 2τ₁τ₂ / ((λ+z²)(τ₁+τ₂))|`, the reciprocal of `|m|`.
pub fn m_denominator_margin(z: Complex64, lambda: Complex64) -> f64 {
    let (t1, t2) = tau_unchecked(z, lambda);
    (1.0 + 2.0 * t1 * t2 / ((lambda + z * z) * (t1 + t2))).norm()
}
