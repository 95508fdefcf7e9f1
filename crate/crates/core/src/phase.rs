//! Canonical phase space, the Minkowski metric and model parameters.
//!
//! All stored components carry lowered indices. Contractions multiply by
//! the diagonal sign vector `(-1, +1, ..., +1)` explicitly.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::jet::Jet;

/// Diagonal Minkowski metric `diag(-1, 1, ..., 1)` in `n` dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Metric {
    n: usize,
}

impl Default for Metric {
    fn default() -> Self {
        Metric { n: 4 }
    }
}

impl Metric {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        Ok(Metric { n })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `η_{μμ}`.
    pub fn sign(&self, mu: usize) -> f64 {
        metric_sign(mu)
    }

    /// `η_{μν}`.
    pub fn eta(&self, mu: usize, nu: usize) -> f64 {
        if mu == nu {
            metric_sign(mu)
        } else {
            0.0
        }
    }

    pub fn dot(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        if a.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: a.len() });
        }
        minkowski_dot(a, b)
    }
}

#[inline]
pub(crate) fn metric_sign(mu: usize) -> f64 {
    if mu == 0 {
        -1.0
    } else {
        1.0
    }
}

/// `Σ_μ η_{μμ} a_μ b_μ`.
pub fn minkowski_dot(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    Ok(a.iter().zip(b).enumerate().map(|(mu, (x, y))| metric_sign(mu) * x * y).sum())
}

/// Minkowski product of two jet vectors.
pub fn minkowski_dot_jets(a: &[Jet], b: &[Jet]) -> Jet {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = a[0].constant_like(0.0);
    for (mu, (x, y)) in a.iter().zip(b).enumerate() {
        let t = x * y;
        if mu == 0 {
            acc -= &t;
        } else {
            acc += &t;
        }
    }
    acc
}

/// A point `(x_μ, p_μ)` of the canonical phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhasePoint {
    pub fn new(x: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if x.len() != p.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), found: p.len() });
        }
        if x.iter().chain(&p).any(|v| !v.is_finite()) {
            return Err(Error::invalid("phase point has non-finite entries"));
        }
        Ok(PhasePoint { x, p })
    }

    pub fn origin(n: usize) -> Self {
        PhasePoint { x: alloc::vec![0.0; n], p: alloc::vec![0.0; n] }
    }

    /// From the flat layout `(x_0..x_{n-1}, p_0..p_{n-1})`.
    pub fn from_flat(z: &[f64]) -> Self {
        let n = z.len() / 2;
        PhasePoint { x: z[..n].to_vec(), p: z[n..].to_vec() }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut z = self.x.clone();
        z.extend_from_slice(&self.p);
        z
    }

    /// Every coordinate as a jet of the given depth over the `2n` phase
    /// coordinates.
    pub fn seed(&self, depth: usize) -> Vec<Jet> {
        let vars = 2 * self.dim();
        self.x
            .iter()
            .chain(&self.p)
            .enumerate()
            .map(|(i, v)| Jet::variable(vars, depth, i, *v))
            .collect()
    }
}

/// Sign `ε ∈ {-1, +1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn from_value(v: f64) -> Result<Self> {
        if v == 1.0 {
            Ok(Sign::Plus)
        } else if v == -1.0 {
            Ok(Sign::Minus)
        } else {
            Err(Error::invalid(alloc::format!("sign must be +1 or -1, got {v}")))
        }
    }
}

impl core::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// The four `(ε₁, ε₂)` model cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelCase {
    /// `(+1, +1)`, the o(1,5) Yang model.
    PP,
    /// `(-1, -1)`, related to o(3,3).
    MM,
    /// `(+1, -1)`, related to o(2,4).
    PM,
    /// `(-1, +1)`, related to o(2,4).
    MP,
}

impl ModelCase {
    pub const ALL: [ModelCase; 4] = [ModelCase::PP, ModelCase::MM, ModelCase::PM, ModelCase::MP];

    pub fn from_signs(eps1: Sign, eps2: Sign) -> Self {
        match (eps1, eps2) {
            (Sign::Plus, Sign::Plus) => ModelCase::PP,
            (Sign::Minus, Sign::Minus) => ModelCase::MM,
            (Sign::Plus, Sign::Minus) => ModelCase::PM,
            (Sign::Minus, Sign::Plus) => ModelCase::MP,
        }
    }

    pub fn eps1(self) -> Sign {
        match self {
            ModelCase::PP | ModelCase::PM => Sign::Plus,
            ModelCase::MM | ModelCase::MP => Sign::Minus,
        }
    }

    pub fn eps2(self) -> Sign {
        match self {
            ModelCase::PP | ModelCase::MP => Sign::Plus,
            ModelCase::MM | ModelCase::PM => Sign::Minus,
        }
    }

    /// `σ = ε₁ε₂`, the sign on the right of the profile constraint.
    pub fn sigma(self) -> Sign {
        self.eps1() * self.eps2()
    }

    /// Mixed-sign cases use hyperbolic frames.
    pub fn is_mixed(self) -> bool {
        self.sigma() == Sign::Minus
    }

    /// Case with `ε₁` and `ε₂` exchanged.
    pub fn swapped(self) -> Self {
        ModelCase::from_signs(self.eps2(), self.eps1())
    }

    pub fn label(self) -> &'static str {
        match self {
            ModelCase::PP => "pp",
            ModelCase::MM => "mm",
            ModelCase::PM => "pm",
            ModelCase::MP => "mp",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "pp" | "++" => Ok(ModelCase::PP),
            "mm" | "--" => Ok(ModelCase::MM),
            "pm" | "+-" => Ok(ModelCase::PM),
            "mp" | "-+" => Ok(ModelCase::MP),
            other => Err(Error::invalid(alloc::format!("unknown model case '{other}'"))),
        }
    }
}

impl fmt::Display for ModelCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Deformation scales and signs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Inverse-length scale.
    pub alpha: f64,
    /// Inverse-momentum scale.
    pub beta: f64,
    pub case: ModelCase,
    pub n: usize,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams { alpha: 0.1, beta: 0.1, case: ModelCase::PP, n: 4 }
    }
}

impl ModelParams {
    pub fn new(alpha: f64, beta: f64, case: ModelCase, n: usize) -> Result<Self> {
        let p = ModelParams { alpha, beta, case, n };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::invalid("alpha must be a finite real >= 0"));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::invalid("beta must be a finite real >= 0"));
        }
        if self.n == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        Ok(())
    }

    pub fn eps1(&self) -> f64 {
        self.case.eps1().value()
    }

    pub fn eps2(&self) -> f64 {
        self.case.eps2().value()
    }

    pub fn metric(&self) -> Metric {
        Metric { n: self.n }
    }
}

/// Lorentz-invariant combinations `(u, v, z)` of a phase point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarTriple {
    /// Scaled momentum square: `β²p²` (Yang scaling) or `β̃²p²`.
    pub u: f64,
    /// Scaled position square: `α²x²` or `α̃²x²`.
    pub v: f64,
    /// Scaled `(x·p)`: `αβ(xp)` or `(α̃β̃/AB)(xp)`.
    pub z: f64,
}

/// Which scale factors enter `(u, v, z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scaling {
    /// `u = β²p²`, `v = α²x²`, `z = αβ(xp)`.
    Yang { alpha: f64, beta: f64 },
    /// `u = β̃²p²`, `v = α̃²x²`, `z = (α̃β̃/AB)(xp)`.
    Generalized { alpha_t: f64, beta_t: f64, a: f64, b: f64 },
}

impl Scaling {
    fn factors(&self) -> (f64, f64, f64) {
        match *self {
            Scaling::Yang { alpha, beta } => (beta * beta, alpha * alpha, alpha * beta),
            Scaling::Generalized { alpha_t, beta_t, a, b } => {
                (beta_t * beta_t, alpha_t * alpha_t, alpha_t * beta_t / (a * b))
            }
        }
    }
}

pub fn invariants(pt: &PhasePoint, scaling: Scaling) -> ScalarTriple {
    let (cu, cv, cz) = scaling.factors();
    let p2 = minkowski_dot(&pt.p, &pt.p).unwrap_or(0.0);
    let x2 = minkowski_dot(&pt.x, &pt.x).unwrap_or(0.0);
    let xp = minkowski_dot(&pt.x, &pt.p).unwrap_or(0.0);
    ScalarTriple { u: cu * p2, v: cv * x2, z: cz * xp }
}

/// Jet version of [`invariants`] over flat coordinates `(x, p)`.
pub fn invariant_jets(coords: &[Jet], scaling: Scaling) -> (Jet, Jet, Jet) {
    let (cu, cv, cz) = scaling.factors();
    let n = coords.len() / 2;
    let (x, p) = coords.split_at(n);
    (
        minkowski_dot_jets(p, p) * cu,
        minkowski_dot_jets(x, x) * cv,
        minkowski_dot_jets(x, p) * cz,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn dot_examples() {
        assert_eq!(minkowski_dot(&[1., 0., 0., 0.], &[1., 0., 0., 0.]).unwrap(), -1.0);
        assert_eq!(minkowski_dot(&[0., 1., 0., 0.], &[0., 1., 0., 0.]).unwrap(), 1.0);
        assert_eq!(minkowski_dot(&[1., 1., 0., 0.], &[1., 1., 0., 0.]).unwrap(), 0.0);
        assert!(minkowski_dot(&[1., 1.], &[1., 1., 0.]).is_err());
        assert!(Metric::default().dot(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn invariant_examples() {
        let y = Scaling::Yang { alpha: 1.0, beta: 1.0 };
        let t = invariants(&PhasePoint::origin(4), y);
        assert_eq!((t.u, t.v, t.z), (0.0, 0.0, 0.0));
        let pt = PhasePoint::new(vec![0., 1., 0., 0.], vec![0., 1., 0., 0.]).unwrap();
        let t = invariants(&pt, y);
        assert_eq!((t.u, t.v, t.z), (1.0, 1.0, 1.0));
        let pt = PhasePoint::new(vec![0., 2., 0., 0.], vec![0., 3., 0., 0.]).unwrap();
        let t = invariants(&pt, Scaling::Yang { alpha: 0.1, beta: 0.1 });
        assert!((t.u - 0.09).abs() < 1e-15);
        assert!((t.v - 0.04).abs() < 1e-15);
        assert!((t.z - 0.06).abs() < 1e-15);
    }

    #[test]
    fn generalized_scaling_divides_by_ab() {
        let pt = PhasePoint::new(vec![0., 2., 0., 0.], vec![0., 3., 0., 0.]).unwrap();
        let t = invariants(&pt, Scaling::Generalized { alpha_t: 0.2, beta_t: 0.3, a: 2.0, b: 1.5 });
        assert!((t.u - 0.81).abs() < 1e-14);
        assert!((t.v - 0.16).abs() < 1e-14);
        assert!((t.z - 0.06 * 6.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn case_table() {
        for c in ModelCase::ALL {
            assert_eq!(ModelCase::from_signs(c.eps1(), c.eps2()), c);
            assert_eq!(ModelCase::parse(c.label()).unwrap(), c);
            assert_eq!(c.swapped().swapped(), c);
        }
        assert!(ModelCase::PM.is_mixed() && ModelCase::MP.is_mixed());
        assert!(!ModelCase::PP.is_mixed() && !ModelCase::MM.is_mixed());
    }

    #[test]
    fn seeded_point_has_unit_gradients() {
        let pt = PhasePoint::new(vec![0.1, 0.2], vec![0.3, 0.4]).unwrap();
        let s = pt.seed(1);
        assert_eq!(s.len(), 4);
        assert_eq!(s[2].real(), 0.3);
        assert_eq!(s[2].gradient(), vec![0.0, 0.0, 1.0, 0.0]);
    }
}
