//! Nested forward-mode jets.
//!
//! A [`Jet`] of depth 1 carries a value and its gradient over `vars`
//! independent variables. Depth `d` nests this: the value and every partial
//! are themselves jets of depth `d - 1`, so a depth-`d` evaluation carries all
//! mixed partials up to order `d`. Poisson brackets of brackets are computed
//! by contracting the partial blocks of deeper jets, which keeps nested
//! brackets exact to rounding.
//!
//! Storage is flat: a depth-`d` jet holds `(vars + 1)^d` reals, block `0` is
//! the value and block `k` (1-based) the partial along variable `k - 1`.

use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use smallvec::{smallvec, SmallVec};

use crate::error::DomainError;

type Buf = SmallVec<[f64; 9]>;

#[derive(Clone, PartialEq)]
pub struct Jet {
    vars: u16,
    depth: u8,
    data: Buf,
}

fn block_len(vars: usize, depth: usize) -> usize {
    (vars + 1).pow(depth as u32)
}

impl Jet {
    pub fn constant(vars: usize, depth: usize, value: f64) -> Self {
        let mut data: Buf = smallvec![0.0; block_len(vars, depth)];
        data[0] = value;
        Jet { vars: vars as u16, depth: depth as u8, data }
    }

    pub fn zero(vars: usize, depth: usize) -> Self {
        Self::constant(vars, depth, 0.0)
    }

    /// The independent variable `index` taking `value`, seeded at every
    /// nesting level.
    pub fn variable(vars: usize, depth: usize, index: usize, value: f64) -> Self {
        assert!(index < vars, "variable index {index} out of range {vars}");
        let mut jet = Self::constant(vars, depth, value);
        let mut stride = 1;
        for _ in 0..depth {
            jet.data[(index + 1) * stride] = 1.0;
            stride *= vars + 1;
        }
        jet
    }

    /// Assembles a jet one level deeper from a value and its partials.
    pub fn from_parts(value: &Jet, partials: &[Jet]) -> Self {
        let vars = value.vars();
        assert_eq!(partials.len(), vars, "need one partial per variable");
        let s = value.data.len();
        let mut data: Buf = SmallVec::with_capacity(s * (vars + 1));
        data.extend_from_slice(&value.data);
        for d in partials {
            debug_assert!(d.vars == value.vars && d.depth == value.depth);
            data.extend_from_slice(&d.data);
        }
        Jet { vars: value.vars, depth: value.depth + 1, data }
    }

    /// Same shape as `self`, constant value.
    pub fn constant_like(&self, value: f64) -> Self {
        Self::constant(self.vars(), self.depth(), value)
    }

    pub fn vars(&self) -> usize {
        self.vars as usize
    }

    pub fn depth(&self) -> usize {
        self.depth as usize
    }

    /// The plain real value (innermost scalar).
    pub fn real(&self) -> f64 {
        self.data[0]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    fn block_size(&self) -> usize {
        block_len(self.vars(), self.depth() - 1)
    }

    fn block(&self, k: usize) -> Jet {
        assert!(self.depth > 0, "a depth-0 jet has no blocks");
        let s = self.block_size();
        Jet {
            vars: self.vars,
            depth: self.depth - 1,
            data: SmallVec::from_slice(&self.data[k * s..(k + 1) * s]),
        }
    }

    fn block_is_zero(&self, k: usize) -> bool {
        let s = self.block_size();
        self.data[k * s..(k + 1) * s].iter().all(|v| *v == 0.0)
    }

    /// The value as a jet one level shallower.
    pub fn value(&self) -> Jet {
        self.block(0)
    }

    /// Partial derivative along `var`, one level shallower.
    pub fn partial(&self, var: usize) -> Jet {
        self.block(var + 1)
    }

    /// Real gradient of a depth-1 jet (the top-level partials' values).
    pub fn gradient(&self) -> alloc::vec::Vec<f64> {
        assert!(self.depth > 0, "a depth-0 jet has no gradient");
        let s = self.block_size();
        (1..=self.vars()).map(|k| self.data[k * s]).collect()
    }

    /// Embeds `self` one level deeper as a constant of the new level.
    pub fn lift(&self) -> Jet {
        let zero = Jet::zero(self.vars(), self.depth());
        let partials: alloc::vec::Vec<Jet> = (0..self.vars()).map(|_| zero.clone()).collect();
        Jet::from_parts(self, &partials)
    }

    fn check_shape(&self, other: &Jet) {
        assert!(
            self.vars == other.vars && self.depth == other.depth,
            "jet shape mismatch: ({}, {}) vs ({}, {})",
            self.vars,
            self.depth,
            other.vars,
            other.depth
        );
    }

    fn mul_jet(&self, other: &Jet) -> Jet {
        self.check_shape(other);
        let mut out = Jet::zero(self.vars(), self.depth());
        mul_into(&self.data, &other.data, &mut out.data, self.vars(), self.depth());
        out
    }

    /// Chain rule: `op` evaluates the function one level shallower, `f0` at
    /// depth 0, `deriv(v, fv)` gives the derivative at value `v` with `fv = op(v)`.
    fn chain(&self, op: &dyn Fn(&Jet) -> Jet, f0: &dyn Fn(f64) -> f64, deriv: &dyn Fn(&Jet, &Jet) -> Jet) -> Jet {
        if self.depth == 0 {
            return Jet { vars: self.vars, depth: 0, data: smallvec![f0(self.data[0])] };
        }
        let v = self.value();
        let fv = op(&v);
        let d = deriv(&v, &fv);
        let s = self.block_size();
        let mut out = Jet::zero(self.vars(), self.depth());
        out.data[..s].copy_from_slice(&fv.data);
        for k in 1..=self.vars() {
            if self.block_is_zero(k) {
                continue;
            }
            let p = d.mul_jet(&self.block(k));
            out.data[k * s..(k + 1) * s].copy_from_slice(&p.data);
        }
        out
    }

    pub fn recip(&self) -> Jet {
        self.chain(&Jet::recip, &|x| 1.0 / x, &|_, fv| -(fv * fv))
    }

    pub fn sqrt(&self) -> Jet {
        self.chain(&Jet::sqrt, &libm::sqrt, &|_, fv| fv.recip() * 0.5)
    }

    pub fn exp(&self) -> Jet {
        self.chain(&Jet::exp, &libm::exp, &|_, fv| fv.clone())
    }

    pub fn ln(&self) -> Jet {
        self.chain(&Jet::ln, &libm::log, &|v, _| v.recip())
    }

    pub fn sin(&self) -> Jet {
        self.chain(&Jet::sin, &libm::sin, &|v, _| v.cos())
    }

    pub fn cos(&self) -> Jet {
        self.chain(&Jet::cos, &libm::cos, &|v, _| -v.sin())
    }

    pub fn sinh(&self) -> Jet {
        self.chain(&Jet::sinh, &libm::sinh, &|v, _| v.cosh())
    }

    pub fn cosh(&self) -> Jet {
        self.chain(&Jet::cosh, &libm::cosh, &|v, _| v.sinh())
    }

    pub fn atan(&self) -> Jet {
        self.chain(&Jet::atan, &libm::atan, &|v, _| (v * v + 1.0).recip())
    }

    /// Real power `x^r` for `x > 0` (unchecked).
    pub fn powf(&self, r: f64) -> Jet {
        self.chain(&|v: &Jet| v.powf(r), &|x| libm::pow(x, r), &|v, _| v.powf(r - 1.0) * r)
    }

    pub fn powi(&self, k: i32) -> Jet {
        if k < 0 {
            return self.powi(-k).recip();
        }
        let mut result = self.constant_like(1.0);
        let mut base = self.clone();
        let mut e = k as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn square(&self) -> Jet {
        self * self
    }

    pub fn try_sqrt(&self) -> Result<Jet, DomainError> {
        let x = self.real();
        if !(x > 0.0) {
            return Err(DomainError { op: "sqrt", value: x });
        }
        Ok(self.sqrt())
    }

    pub fn try_ln(&self) -> Result<Jet, DomainError> {
        let x = self.real();
        if !(x > 0.0) {
            return Err(DomainError { op: "ln", value: x });
        }
        Ok(self.ln())
    }

    pub fn try_recip(&self) -> Result<Jet, DomainError> {
        let x = self.real();
        if x == 0.0 || !x.is_finite() {
            return Err(DomainError { op: "division", value: x });
        }
        Ok(self.recip())
    }

    pub fn try_div(&self, den: &Jet) -> Result<Jet, DomainError> {
        Ok(self * &den.try_recip()?)
    }

    pub fn try_powf(&self, r: f64) -> Result<Jet, DomainError> {
        let x = self.real();
        if !(x > 0.0) {
            return Err(DomainError { op: "powf", value: x });
        }
        Ok(self.powf(r))
    }

    /// Derivative of a univariate function at `self`, one level deeper
    /// internally: lifts `self` with a unit tangent along variable 0.
    pub fn derivative_of<E>(&self, f: impl Fn(&Jet) -> Result<Jet, E>) -> Result<Jet, E> {
        if self.vars() == 0 {
            let d = f(&Jet::variable(1, 1, 0, self.real()))?.partial(0).real();
            return Ok(Jet::constant(0, self.depth(), d));
        }
        if self.vars() == 0 {
            let d = f(&Jet::variable(1, 1, 0, self.real()))?.partial(0).real();
            return Ok(Jet::constant(0, self.depth(), d));
        }
        let zero = Jet::zero(self.vars(), self.depth());
        let mut partials: alloc::vec::Vec<Jet> = (0..self.vars()).map(|_| zero.clone()).collect();
        partials[0] = self.constant_like(1.0);
        let lifted = Jet::from_parts(self, &partials);
        Ok(f(&lifted)?.partial(0))
    }
}

/// `out = a * b` on flat storage of the given depth.
fn mul_into(a: &[f64], b: &[f64], out: &mut [f64], vars: usize, depth: usize) {
    if depth == 0 {
        out[0] = a[0] * b[0];
        return;
    }
    if depth == 1 {
        let (a0, b0) = (a[0], b[0]);
        out[0] = a0 * b0;
        for k in 1..=vars {
            out[k] = a0 * b[k] + a[k] * b0;
        }
        return;
    }
    let s = block_len(vars, depth - 1);
    let (a0, b0) = (&a[..s], &b[..s]);
    mul_into(a0, b0, &mut out[..s], vars, depth - 1);
    let mut tmp = alloc::vec![0.0; s];
    for k in 1..=vars {
        let ak = &a[k * s..(k + 1) * s];
        let bk = &b[k * s..(k + 1) * s];
        let a_zero = ak.iter().all(|v| *v == 0.0);
        let b_zero = bk.iter().all(|v| *v == 0.0);
        let ok = &mut out[k * s..(k + 1) * s];
        if b_zero {
            ok.iter_mut().for_each(|v| *v = 0.0);
        } else {
            mul_into(a0, bk, ok, vars, depth - 1);
        }
        if !a_zero {
            mul_into(ak, b0, &mut tmp, vars, depth - 1);
            ok.iter_mut().zip(&tmp).for_each(|(o, t)| *o += t);
        }
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("vars", &self.vars)
            .field("depth", &self.depth)
            .field("data", &&self.data[..])
            .finish()
    }
}

impl AddAssign<&Jet> for Jet {
    fn add_assign(&mut self, rhs: &Jet) {
        self.check_shape(rhs);
        self.data.iter_mut().zip(&rhs.data).for_each(|(a, b)| *a += b);
    }
}

impl SubAssign<&Jet> for Jet {
    fn sub_assign(&mut self, rhs: &Jet) {
        self.check_shape(rhs);
        self.data.iter_mut().zip(&rhs.data).for_each(|(a, b)| *a -= b);
    }
}

impl MulAssign<f64> for Jet {
    fn mul_assign(&mut self, rhs: f64) {
        self.data.iter_mut().for_each(|a| *a *= rhs);
    }
}

impl AddAssign<f64> for Jet {
    fn add_assign(&mut self, rhs: f64) {
        self.data[0] += rhs;
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        self.data.iter_mut().for_each(|a| *a = -*a);
        self
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        -self.clone()
    }
}

macro_rules! jet_binops {
    ($($tr:ident $method:ident $assign:ident);*) => {$(
        impl $tr<&Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                let mut out = self.clone();
                out.$assign(rhs);
                out
            }
        }
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $method(mut self, rhs: Jet) -> Jet {
                self.$assign(&rhs);
                self
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $method(mut self, rhs: &Jet) -> Jet {
                self.$assign(rhs);
                self
            }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                let mut out = self.clone();
                out.$assign(&rhs);
                out
            }
        }
    )*};
}

jet_binops!(Add add add_assign; Sub sub sub_assign);

impl Mul<&Jet> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.mul_jet(rhs)
    }
}

impl Mul<Jet> for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        self.mul_jet(&rhs)
    }
}

impl Mul<&Jet> for Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.mul_jet(rhs)
    }
}

impl Mul<Jet> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        self.mul_jet(&rhs)
    }
}

impl Div<&Jet> for &Jet {
    type Output = Jet;
    fn div(self, rhs: &Jet) -> Jet {
        self.mul_jet(&rhs.recip())
    }
}

impl Div<Jet> for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        self.mul_jet(&rhs.recip())
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, rhs: f64) -> Jet {
        self *= rhs;
        self
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.clone() * rhs
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs * self
    }
}

impl Mul<&Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        rhs.clone() * self
    }
}

impl Div<f64> for Jet {
    type Output = Jet;
    fn div(self, rhs: f64) -> Jet {
        self * (1.0 / rhs)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self += rhs;
        self
    }
}

impl Add<f64> for &Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        self.clone() + rhs
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self += -rhs;
        self
    }
}

impl Sub<f64> for &Jet {
    type Output = Jet;
    fn sub(self, rhs: f64) -> Jet {
        self.clone() - rhs
    }
}

impl Add<Jet> for f64 {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        rhs + self
    }
}

impl Sub<Jet> for f64 {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        -rhs + self
    }
}

impl Sub<&Jet> for f64 {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        -rhs + self
    }
}
