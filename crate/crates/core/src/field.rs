//! Scalar fields on phase space.
//!
//! A [`ScalarField`] maps the `2n` canonical coordinates, given as jets of
//! any depth, to a jet of the same depth. Evaluation is pure, so fields are
//! shared freely between threads.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::phase::{minkowski_dot_jets, PhasePoint};

type FieldFn = dyn Fn(&[Jet]) -> Result<Jet> + Send + Sync;

#[derive(Clone)]
pub struct ScalarField {
    name: Arc<str>,
    f: Arc<FieldFn>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("ScalarField").field(&self.name).finish()
    }
}

impl ScalarField {
    pub fn new<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(&[Jet]) -> Result<Jet> + Send + Sync + 'static,
    {
        let name: String = name.into();
        ScalarField { name: name.into(), f: Arc::new(f) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        let name: String = name.into();
        ScalarField { name: name.into(), f: self.f.clone() }
    }

    /// Evaluates at coordinates that are already jets.
    pub fn eval_at(&self, coords: &[Jet]) -> Result<Jet> {
        let out = (self.f)(coords)?;
        if !out.is_finite() {
            return Err(Error::Domain(crate::error::DomainError { op: "non-finite result", value: out.real() }));
        }
        Ok(out)
    }

    /// Plain value at a point.
    pub fn eval(&self, pt: &PhasePoint) -> Result<f64> {
        Ok(self.eval_at(&pt.seed(0))?.real())
    }

    /// Value and gradient at a point.
    pub fn jet(&self, pt: &PhasePoint) -> Result<Jet> {
        self.eval_at(&pt.seed(1))
    }

    /// All partials up to order `depth`.
    pub fn eval_depth(&self, pt: &PhasePoint, depth: usize) -> Result<Jet> {
        self.eval_at(&pt.seed(depth))
    }

    pub fn constant(value: f64) -> Self {
        ScalarField::new(format!("{value}"), move |c| Ok(c[0].constant_like(value)))
    }

    /// The coordinate `x_μ`.
    pub fn x(mu: usize) -> Self {
        ScalarField::new(format!("x{mu}"), move |c| Ok(c[mu].clone()))
    }

    /// The momentum `p_μ`.
    pub fn p(mu: usize) -> Self {
        ScalarField::new(format!("p{mu}"), move |c| {
            let n = c.len() / 2;
            Ok(c[n + mu].clone())
        })
    }

    /// Minkowski square `x²`.
    pub fn x_squared() -> Self {
        ScalarField::new("x^2", |c| {
            let n = c.len() / 2;
            Ok(minkowski_dot_jets(&c[..n], &c[..n]))
        })
    }

    /// Minkowski square `p²`.
    pub fn p_squared() -> Self {
        ScalarField::new("p^2", |c| {
            let n = c.len() / 2;
            Ok(minkowski_dot_jets(&c[n..], &c[n..]))
        })
    }

    /// `(x·p)`.
    pub fn x_dot_p() -> Self {
        ScalarField::new("xp", |c| {
            let n = c.len() / 2;
            Ok(minkowski_dot_jets(&c[..n], &c[n..]))
        })
    }

    /// Lorentz generator `M_{μν} = x_μ p_ν − x_ν p_μ`.
    pub fn lorentz(mu: usize, nu: usize) -> Self {
        ScalarField::new(format!("M{mu}{nu}"), move |c| {
            let n = c.len() / 2;
            Ok(&c[mu] * &c[n + nu] - &c[nu] * &c[n + mu])
        })
    }

    pub fn scale(&self, k: f64) -> Self {
        let f = self.clone();
        ScalarField::new(format!("{k}*{}", self.name), move |c| Ok(f.eval_at(c)? * k))
    }

    /// `Σ c_i f_i`.
    pub fn linear_combination(name: impl Into<String>, terms: Vec<(f64, ScalarField)>) -> Self {
        ScalarField::new(name, move |c| {
            let mut acc = c[0].constant_like(0.0);
            for (k, f) in &terms {
                if *k != 0.0 {
                    acc += &(f.eval_at(c)? * *k);
                }
            }
            Ok(acc)
        })
    }

    /// Pointwise map of one field's jet.
    pub fn map<F>(&self, name: impl Into<String>, g: F) -> Self
    where
        F: Fn(Jet) -> Result<Jet> + Send + Sync + 'static,
    {
        let f = self.clone();
        ScalarField::new(name, move |c| g(f.eval_at(c)?))
    }

    /// Pointwise combination of two fields.
    pub fn zip<F>(&self, other: &ScalarField, name: impl Into<String>, g: F) -> Self
    where
        F: Fn(Jet, Jet) -> Result<Jet> + Send + Sync + 'static,
    {
        let (a, b) = (self.clone(), other.clone());
        ScalarField::new(name, move |c| g(a.eval_at(c)?, b.eval_at(c)?))
    }
}

impl core::ops::Add for &ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: &ScalarField) -> ScalarField {
        self.zip(rhs, format!("({}+{})", self.name, rhs.name), |a, b| Ok(a + b))
    }
}

impl core::ops::Sub for &ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: &ScalarField) -> ScalarField {
        self.zip(rhs, format!("({}-{})", self.name, rhs.name), |a, b| Ok(a - b))
    }
}

impl core::ops::Mul for &ScalarField {
    type Output = ScalarField;
    fn mul(self, rhs: &ScalarField) -> ScalarField {
        self.zip(rhs, format!("({}*{})", self.name, rhs.name), |a, b| Ok(a * b))
    }
}

impl core::ops::Neg for &ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        self.map(format!("-{}", self.name), |a| Ok(-a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn pt() -> PhasePoint {
        PhasePoint::new(vec![0.3, -0.2, 0.5, 0.1], vec![0.7, 0.4, -0.6, 0.2]).unwrap()
    }

    #[test]
    fn coordinate_fields() {
        let p = pt();
        assert_eq!(ScalarField::x(2).eval(&p).unwrap(), 0.5);
        assert_eq!(ScalarField::p(0).eval(&p).unwrap(), 0.7);
        let j = ScalarField::p(1).jet(&p).unwrap();
        assert_eq!(j.gradient()[5], 1.0);
    }

    #[test]
    fn evaluation_is_deterministic() {
        let f = &ScalarField::x_squared() * &ScalarField::p_squared();
        let a = f.jet(&pt()).unwrap();
        let b = f.jet(&pt()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn lorentz_generator_value() {
        let p = pt();
        let m = ScalarField::lorentz(0, 1).eval(&p).unwrap();
        assert!((m - (0.3 * 0.4 - (-0.2) * 0.7)).abs() < 1e-15);
    }

    #[test]
    fn non_finite_output_is_a_domain_error() {
        let f = ScalarField::new("inf", |c| Ok(c[0].constant_like(f64::INFINITY)));
        assert!(f.eval(&pt()).unwrap_err().is_domain());
    }
}
