use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use super::{Family, GenId, GeneratorSet, Profile};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::jet::Jet;
use crate::phase::{minkowski_dot_jets, ModelParams};

/// `φ₁(u)` for the `α = 0` family, `u = β²p²`.
#[derive(Clone)]
pub struct SnyderProfile {
    name: &'static str,
    phi1: Profile,
    /// Radicand that must stay positive, if any.
    guard: Option<Profile>,
    /// Use the numerator `1 + φ̇₁φ₁` instead of `1 + 2φ̇₁φ₁`.
    printed: bool,
}

impl fmt::Debug for SnyderProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name)?;
        if self.printed {
            f.write_str("+printed")?;
        }
        Ok(())
    }
}

impl SnyderProfile {
    /// `φ₁ ≡ 1`.
    pub fn unit() -> Self {
        SnyderProfile { name: "one", phi1: Arc::new(|u| Ok(u.constant_like(1.0))), guard: None, printed: false }
    }

    /// `φ₁ = √(1 − u)`.
    pub fn sqrt() -> Self {
        SnyderProfile {
            name: "sqrt",
            phi1: Arc::new(|u| Ok((1.0 - u).try_sqrt()?)),
            guard: Some(Arc::new(|u| Ok(1.0 - u))),
            printed: false,
        }
    }

    pub fn custom(name: &'static str, phi1: Profile, guard: Option<Profile>) -> Self {
        SnyderProfile { name, phi1, guard, printed: false }
    }

    /// Same `φ₁` with `φ₂ = (1 + φ̇₁φ₁)/(φ₁ − 2uφ̇₁)`. This rule agrees with
    /// the closing one only where `φ̇₁φ₁ = 0`.
    pub fn with_printed_rule(mut self) -> Self {
        self.printed = true;
        self
    }

    pub fn is_printed(&self) -> bool {
        self.printed
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "one" => Ok(Self::unit()),
            "sqrt" => Ok(Self::sqrt()),
            _ => Err(Error::invalid(alloc::format!("unknown Snyder profile '{name}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    /// `(φ₁, φ₂)` at `u`, with `φ₂ = (1 + 2φ̇₁φ₁)/(φ₁ − 2uφ̇₁)`, the rule
    /// under which `{x̂_μ, x̂_ν} = β²M_{μν}`.
    pub fn profiles(&self, u: &Jet) -> Result<(Jet, Jet)> {
        let f1 = (self.phi1)(u)?;
        let d1 = u.derivative_of(|w| (self.phi1)(w))?;
        if f1.real().abs() < 1e-12 {
            return Err(Error::SingularProfile { z: u.real() });
        }
        let den = &f1 - &(u * &d1) * 2.0;
        if den.real().abs() < 1e-12 {
            return Err(Error::SingularProfile { z: u.real() });
        }
        let k = if self.printed { 1.0 } else { 2.0 };
        let f2 = (1.0 + &d1 * &f1 * k) / den;
        Ok((f1, f2))
    }
}

/// `x̂_μ = x_μφ₁(u) + β²(x·p)p_μφ₂(u)`, `p̂_μ = p_μ/φ₁(u)`; needs `α = 0`.
pub fn snyder_realization(params: &ModelParams, profile: &SnyderProfile) -> Result<GeneratorSet> {
    params.validate()?;
    if params.alpha != 0.0 {
        return Err(Error::invalid("the Snyder realization needs alpha = 0"));
    }
    let b2 = params.beta * params.beta;
    let label = if profile.printed { alloc::format!("{}+printed", profile.name()) } else { profile.name().into() };
    let mut set = GeneratorSet::new(Family::Snyder, *params, label);
    for mu in 0..params.n {
        let pr = profile.clone();
        set.insert(
            GenId::XHat(mu),
            ScalarField::new("x", move |c| {
                let n = c.len() / 2;
                let (x, p) = c.split_at(n);
                let u = minkowski_dot_jets(p, p) * b2;
                let (f1, f2) = pr.profiles(&u)?;
                let xp = minkowski_dot_jets(x, p);
                Ok(&x[mu] * &f1 + xp * &p[mu] * &f2 * b2)
            }),
        );
        let pr = profile.clone();
        set.insert(
            GenId::PHat(mu),
            ScalarField::new("p", move |c| {
                let n = c.len() / 2;
                let p = &c[n..];
                let u = minkowski_dot_jets(p, p) * b2;
                let f1 = (pr.phi1)(&u)?;
                Ok(p[mu].clone() / f1)
            }),
        );
    }
    set.insert_lorentz();
    if let Some(g) = profile.guard.clone() {
        set.add_guard(ScalarField::new("snyder.guard", move |c| {
            let n = c.len() / 2;
            let p: Vec<Jet> = c[n..].to_vec();
            g(&(minkowski_dot_jets(&p, &p) * b2))
        }));
    }
    Ok(set)
}
