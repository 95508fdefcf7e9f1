use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use core::fmt;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::phase::Sign;

/// A univariate function `z ↦ φ(z)` on jets.
pub type Profile = Arc<dyn Fn(&Jet) -> Result<Jet> + Send + Sync>;

/// Profiles `(φ₁, φ₂)` tied by `φ₁φ₂ + φ₁ + φ₂ = σz²`.
#[derive(Clone)]
pub struct ProfilePair {
    name: String,
    phi1: Profile,
    phi2: Profile,
    sigma: Sign,
}

impl fmt::Debug for ProfilePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProfilePair").field("name", &self.name).field("sigma", &self.sigma).finish()
    }
}

/// `φ₂ = (σz² − φ₁)/(1 + φ₁)`.
pub fn solve_phi2(phi1: Profile, sigma: Sign) -> Profile {
    let s = sigma.value();
    Arc::new(move |z: &Jet| {
        let f1 = phi1(z)?;
        let den = &f1 + 1.0;
        if den.real().abs() < 1e-12 {
            return Err(Error::SingularProfile { z: z.real() });
        }
        Ok((z.square() * s - &f1) / den)
    })
}

impl ProfilePair {
    /// Pair whose second profile is solved from the first.
    pub fn from_phi1(name: impl Into<String>, phi1: Profile, sigma: Sign) -> Self {
        let phi2 = solve_phi2(phi1.clone(), sigma);
        ProfilePair { name: name.into(), phi1, phi2, sigma }
    }

    /// Pair with both profiles given; the constraint is not enforced here.
    pub fn explicit(name: impl Into<String>, phi1: Profile, phi2: Profile, sigma: Sign) -> Self {
        ProfilePair { name: name.into(), phi1, phi2, sigma }
    }

    /// `φ₁ = σz²`, `φ₂ = 0`.
    pub fn phi2_zero(sigma: Sign) -> Self {
        let s = sigma.value();
        Self::explicit("phi2_zero", Arc::new(move |z| Ok(z.square() * s)), Arc::new(|z| Ok(z.constant_like(0.0))), sigma)
    }

    /// `φ₁ = 0`, `φ₂ = σz²`.
    pub fn phi1_zero(sigma: Sign) -> Self {
        let s = sigma.value();
        Self::explicit("phi1_zero", Arc::new(|z| Ok(z.constant_like(0.0))), Arc::new(move |z| Ok(z.square() * s)), sigma)
    }

    /// `φ₁ = kσz²` with `φ₂` solved.
    pub fn scaled(k: f64, sigma: Sign) -> Self {
        let s = sigma.value();
        Self::from_phi1(format!("custom:{k}"), Arc::new(move |z| Ok(z.square() * (k * s))), sigma)
    }

    /// `φ₁ = σz²/2` with `φ₂` solved.
    pub fn half(sigma: Sign) -> Self {
        let mut p = Self::scaled(0.5, sigma);
        p.name = "half".into();
        p
    }

    /// Named presets: `phi2_zero`, `phi1_zero`, `half`, `custom:<k>`.
    pub fn preset(name: &str, sigma: Sign) -> Result<Self> {
        match name {
            "phi2_zero" => Ok(Self::phi2_zero(sigma)),
            "phi1_zero" => Ok(Self::phi1_zero(sigma)),
            "half" => Ok(Self::half(sigma)),
            _ => {
                let k = name
                    .strip_prefix("custom:")
                    .and_then(|k| k.parse::<f64>().ok())
                    .filter(|k| k.is_finite())
                    .ok_or_else(|| Error::invalid(format!("unknown profile preset '{name}'")))?;
                Ok(Self::scaled(k, sigma))
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sigma(&self) -> Sign {
        self.sigma
    }

    pub fn phi1(&self, z: &Jet) -> Result<Jet> {
        (self.phi1)(z)
    }

    pub fn phi2(&self, z: &Jet) -> Result<Jet> {
        (self.phi2)(z)
    }

    /// `|φ₁φ₂ + φ₁ + φ₂ − σz²|` at a real `z`.
    pub fn constraint_residual(&self, z: f64) -> Result<f64> {
        let zj = Jet::constant(0, 0, z);
        let (a, b) = (self.phi1(&zj)?.real(), self.phi2(&zj)?.real());
        Ok((a * b + a + b - self.sigma.value() * z * z).abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(p: &Profile, z: f64) -> Result<f64> {
        Ok(p(&Jet::constant(0, 0, z))?.real())
    }

    #[test]
    fn solved_examples() {
        let phi2 = solve_phi2(Arc::new(|z: &Jet| Ok(z.square())), Sign::Plus);
        assert_eq!(at(&phi2, 0.4).unwrap(), 0.0);
        let phi2 = solve_phi2(Arc::new(|z: &Jet| Ok(z.constant_like(0.0))), Sign::Plus);
        assert!((at(&phi2, 0.4).unwrap() - 0.16).abs() < 1e-16);
        let phi2 = solve_phi2(Arc::new(|z: &Jet| Ok(z.constant_like(-1.0))), Sign::Plus);
        assert!(matches!(at(&phi2, 0.4), Err(Error::SingularProfile { .. })));
    }

    #[test]
    fn constraint_holds_on_grid() {
        for sigma in [Sign::Plus, Sign::Minus] {
            for name in ["phi2_zero", "phi1_zero", "half", "custom:0.25", "custom:-0.5"] {
                let p = ProfilePair::preset(name, sigma).unwrap();
                for i in 0..=100 {
                    let z = -0.5 + i as f64 * 0.01;
                    assert!(p.constraint_residual(z).unwrap() < 1e-10, "{name} {z}");
                }
            }
        }
        assert!(ProfilePair::preset("custom:x", Sign::Plus).is_err());
        assert!(ProfilePair::preset("nope", Sign::Plus).is_err());
    }
}
