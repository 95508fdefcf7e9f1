//! Generators linear in `x̂`, `p̂` and `M`, their constants, inverse and the
//! position/momentum duality.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::yang::lorentz_square;
use super::{Family, GenId, GeneratorSet};
use crate::error::{DomainError, Error, Result};
use crate::field::ScalarField;
use crate::jet::Jet;
use crate::phase::{metric_sign, minkowski_dot, minkowski_dot_jets, ModelCase, ModelParams};

/// Dimensionless parameters `(A, B, φ, ψ, a_μ, b_μ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    /// `A`
    pub amp_a: f64,
    /// `B`
    pub amp_b: f64,
    pub phi: f64,
    pub psi: f64,
    /// `a_μ`, lowered index.
    pub a: Vec<f64>,
    /// `b_μ`, lowered index.
    pub b: Vec<f64>,
}

impl GenParams {
    /// `A = B = 1`, zero angles and shifts.
    pub fn identity(n: usize) -> Self {
        GenParams { amp_a: 1.0, amp_b: 1.0, phi: 0.0, psi: 0.0, a: vec![0.0; n], b: vec![0.0; n] }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.a.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.a.len() });
        }
        if self.b.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.b.len() });
        }
        let all = [self.amp_a, self.amp_b, self.phi, self.psi];
        if all.iter().chain(&self.a).chain(&self.b).any(|v| !v.is_finite()) {
            return Err(Error::invalid("generator parameters must be finite"));
        }
        if self.amp_a * self.amp_b == 0.0 {
            return Err(Error::invalid("AB must be nonzero"));
        }
        Ok(())
    }
}

/// Rotation (`ε₁ε₂ = 1`) or boost (mixed signs) coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub c1: f64,
    pub s1: f64,
    pub c2: f64,
    pub s2: f64,
}

impl Frame {
    pub fn new(case: ModelCase, phi: f64, psi: f64) -> Self {
        if case.is_mixed() {
            Frame { c1: libm::cosh(phi), s1: libm::sinh(phi), c2: libm::cosh(psi), s2: libm::sinh(psi) }
        } else {
            Frame { c1: libm::cos(phi), s1: libm::sin(phi), c2: libm::cos(psi), s2: libm::sin(psi) }
        }
    }

    /// `cos(φ+ψ)` resp. `cosh(ψ−φ)`.
    pub fn det(&self) -> f64 {
        self.c1 * self.c2 - self.s1 * self.s2
    }
}

/// `ρ̃`, `Ã`, `B̃` and the rescaled `α̃ = α√|B̃|`, `β̃ = β√|Ã|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants {
    pub rho: f64,
    pub a_t: f64,
    pub b_t: f64,
    pub alpha_t: f64,
    pub beta_t: f64,
}

impl DerivedConstants {
    pub fn compute(params: &ModelParams, gp: &GenParams) -> Result<Self> {
        gp.validate(params.n)?;
        let (aa, bb) = (gp.amp_a, gp.amp_b);
        let ab = minkowski_dot(&gp.a, &gp.b)? / (aa * bb);
        let a2 = minkowski_dot(&gp.a, &gp.a)?;
        let b2 = minkowski_dot(&gp.b, &gp.b)?;
        let (rho, a_t, b_t) = match params.case {
            ModelCase::PP => (libm::sin(gp.phi + gp.psi) + ab, aa * aa + a2, bb * bb + b2),
            ModelCase::MM => (-libm::sin(gp.phi + gp.psi) + ab, -aa * aa + a2, -bb * bb + b2),
            ModelCase::PM => (libm::sinh(gp.psi - gp.phi) + ab, aa * aa + a2, -bb * bb + b2),
            ModelCase::MP => (-libm::sinh(gp.psi - gp.phi) + ab, -aa * aa + a2, bb * bb + b2),
        };
        Ok(DerivedConstants {
            rho,
            a_t,
            b_t,
            alpha_t: params.alpha * libm::sqrt(b_t.abs()),
            beta_t: params.beta * libm::sqrt(a_t.abs()),
        })
    }
}

/// `k / d`, allowing `0/0 = 0` for a vanishing coefficient.
fn ratio(k: f64, num: f64, den: f64, what: &'static str) -> Result<f64> {
    if k == 0.0 {
        Ok(0.0)
    } else if den == 0.0 {
        Err(DomainError { op: what, value: num }.into())
    } else {
        Ok(k * num / den)
    }
}

fn fetch(set: &GeneratorSet, ids: impl Iterator<Item = GenId>) -> Result<Vec<ScalarField>> {
    ids.map(|id| set.get(id).cloned()).collect()
}

fn eval_all(fs: &[ScalarField], c: &[Jet]) -> Result<Vec<Jet>> {
    fs.iter().map(|f| f.eval_at(c)).collect()
}

/// `Σ_ν M_{μν} η^{νν} w_ν` from canonical coordinates.
fn lorentz_contract(c: &[Jet], mu: usize, w: &[f64]) -> Jet {
    let n = c.len() / 2;
    let mut acc = c[0].constant_like(0.0);
    for (nu, wv) in w.iter().enumerate() {
        if nu != mu && *wv != 0.0 {
            let m = &c[mu] * &c[n + nu] - &c[nu] * &c[n + mu];
            acc += &(m * (metric_sign(nu) * wv));
        }
    }
    acc
}

/// `X̃`, `P̃` and `h̃` on top of a Yang set of the same case.
///
/// `X̃_μ = A(c₁x̂_μ + (β/α)s₁p̂_μ) + β M_{μν}a^ν`,
/// `P̃_μ = B(c₂p̂_μ + (α/β)s₂x̂_μ) + α M_{μν}b^ν`,
/// `h̃ = AB(c₁c₂ − s₁s₂)h + β a·P̃ − α b·X̃ − αβ a^μ b^ν M_{μν}`, with
/// trigonometric coefficients for `ε₁ε₂ = 1` and hyperbolic ones otherwise.
pub fn generalized_generators(params: &ModelParams, gp: &GenParams, base: &GeneratorSet) -> Result<GeneratorSet> {
    if base.family != Family::Yang || base.params.case != params.case {
        return Err(Error::invalid("generalized generators need a Yang set of the same case"));
    }
    let constants = DerivedConstants::compute(params, gp)?;
    let n = params.n;
    let fr = Frame::new(params.case, gp.phi, gp.psi);
    let (al, be) = (params.alpha, params.beta);
    let kx = gp.amp_a * ratio(fr.s1, be, al, "beta/alpha")?;
    let kp = gp.amp_b * ratio(fr.s2, al, be, "alpha/beta")?;
    let (ca, cb) = (gp.amp_a * fr.c1, gp.amp_b * fr.c2);

    let xs = fetch(base, (0..n).map(GenId::XHat))?;
    let ps = fetch(base, (0..n).map(GenId::PHat))?;
    let h = base.get(GenId::H)?.clone();

    let mut set = base.clone();
    set.family = Family::Generalized;
    set.gen_params = Some(gp.clone());
    set.constants = Some(constants);

    let mut xt = Vec::with_capacity(n);
    let mut pt = Vec::with_capacity(n);
    for mu in 0..n {
        let (x, p, a) = (xs[mu].clone(), ps[mu].clone(), gp.a.clone());
        let f = ScalarField::new("X", move |c| {
            let mut out = x.eval_at(c)? * ca;
            if kx != 0.0 {
                out += &(p.eval_at(c)? * kx);
            }
            out += &(lorentz_contract(c, mu, &a) * be);
            Ok(out)
        });
        set.insert(GenId::XTilde(mu), f.clone());
        xt.push(f);
        let (x, p, b) = (xs[mu].clone(), ps[mu].clone(), gp.b.clone());
        let f = ScalarField::new("P", move |c| {
            let mut out = p.eval_at(c)? * cb;
            if kp != 0.0 {
                out += &(x.eval_at(c)? * kp);
            }
            out += &(lorentz_contract(c, mu, &b) * al);
            Ok(out)
        });
        set.insert(GenId::PTilde(mu), f.clone());
        pt.push(f);
    }

    let kh = gp.amp_a * gp.amp_b * fr.det();
    let (a, b) = (gp.a.clone(), gp.b.clone());
    let ht = ScalarField::new("htilde", move |c| {
        let mut out = h.eval_at(c)? * kh;
        let xv = eval_all(&xt, c)?;
        let pv = eval_all(&pt, c)?;
        for mu in 0..a.len() {
            let s = metric_sign(mu);
            if a[mu] != 0.0 {
                out += &(&pv[mu] * (be * s * a[mu]));
                out -= &(lorentz_contract(c, mu, &b) * (al * be * s * a[mu]));
            }
            if b[mu] != 0.0 {
                out -= &(&xv[mu] * (al * s * b[mu]));
            }
        }
        Ok(out)
    });
    set.insert(GenId::HTilde, ht);
    Ok(set)
}

/// Closed form of `h̃` in terms of `X̃`, `P̃`, `M` for `a = b = 0`:
/// `sgn(d) √(A²B²d² − α̃²X̃² − β̃²P̃² + 2ρ̃α̃β̃(X̃P̃) − d²α̃²β̃²M²/2)` with
/// `d = cos(φ+ψ)` (Yang scaling of the base set, profile `φ₂ = 0` or any
/// other, since only the universal form of `h` enters).
pub fn htilde_closed_form(set: &GeneratorSet) -> Result<ScalarField> {
    closed_form(set, false)
}

/// The variant `AB d √(1 − α̃²X̃² − β̃²P̃² + 2ρ̃α̃β̃(X̃P̃) − (α̃²β̃²/2A²B²)M²)`;
/// it agrees with [`htilde_closed_form`] only when `d² = 1`.
pub fn htilde_printed_form(set: &GeneratorSet) -> Result<ScalarField> {
    closed_form(set, true)
}

fn closed_form(set: &GeneratorSet, printed: bool) -> Result<ScalarField> {
    let gp = set.gen_params.clone().ok_or_else(|| Error::invalid("set has no generator parameters"))?;
    let k = set.constants.ok_or_else(|| Error::invalid("set has no derived constants"))?;
    let n = set.params.n;
    let xs = fetch(set, (0..n).map(GenId::XTilde))?;
    let ps = fetch(set, (0..n).map(GenId::PTilde))?;
    let (at, bt) = (k.alpha_t, k.beta_t);
    let ab = gp.amp_a * gp.amp_b;
    let d = Frame::new(set.params.case, gp.phi, gp.psi).det();
    let (c0, cm, pre) = if printed {
        (1.0, at * at * bt * bt / (2.0 * ab * ab), ab * d)
    } else {
        (ab * ab * d * d, d * d * at * at * bt * bt / 2.0, d.signum())
    };
    Ok(ScalarField::new("htilde.closed", move |c| {
        let x = eval_all(&xs, c)?;
        let p = eval_all(&ps, c)?;
        let rad = c0 - minkowski_dot_jets(&x, &x) * (at * at) - minkowski_dot_jets(&p, &p) * (bt * bt)
            + minkowski_dot_jets(&x, &p) * (2.0 * k.rho * at * bt)
            - lorentz_square(c) * cm;
        Ok(rad.try_sqrt()? * pre)
    }))
}

/// Recovers `(x̂, p̂)` from values of `X̃`, `P̃` and the full antisymmetric
/// matrix `M` at one point.
pub fn inverse_transform(
    params: &ModelParams,
    gp: &GenParams,
    xt: &[f64],
    pt: &[f64],
    m: &[Vec<f64>],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = params.n;
    gp.validate(n)?;
    for len in [xt.len(), pt.len(), m.len()] {
        if len != n {
            return Err(Error::DimensionMismatch { expected: n, found: len });
        }
    }
    let fr = Frame::new(params.case, gp.phi, gp.psi);
    let det = fr.det();
    if det.abs() < 1e-12 {
        return Err(Error::DegenerateFrame { det });
    }
    let (al, be) = (params.alpha, params.beta);
    let kx = ratio(fr.s1, be, al, "beta/alpha")?;
    let kp = ratio(fr.s2, al, be, "alpha/beta")?;
    let mut xh = vec![0.0; n];
    let mut ph = vec![0.0; n];
    for mu in 0..n {
        let (mut sa, mut sb) = (0.0, 0.0);
        for nu in 0..n {
            sa += m[mu][nu] * metric_sign(nu) * gp.a[nu];
            sb += m[mu][nu] * metric_sign(nu) * gp.b[nu];
        }
        let xs = (xt[mu] - be * sa) / gp.amp_a;
        let ps = (pt[mu] - al * sb) / gp.amp_b;
        xh[mu] = (fr.c2 * xs - kx * ps) / det;
        ph[mu] = (fr.c1 * ps - kp * xs) / det;
    }
    Ok((xh, ph))
}

/// Which components the duality acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DualMode {
    #[default]
    All,
    /// Leaves `a_0`, `b_0` untouched.
    Spatial,
}

/// `α ↔ β`, `A ↔ B`, `(φ, ψ) → (−ψ, −φ)`, `a → −b`, `b → a`,
/// `(ε₁, ε₂) → (ε₂, ε₁)`.
pub fn born_dual_params(params: &ModelParams, gp: &GenParams, mode: DualMode) -> (ModelParams, GenParams) {
    let dp = ModelParams { alpha: params.beta, beta: params.alpha, case: params.case.swapped(), n: params.n };
    let mut a: Vec<f64> = gp.b.iter().map(|v| -v).collect();
    let mut b = gp.a.clone();
    if mode == DualMode::Spatial && !a.is_empty() {
        a[0] = gp.a[0];
        b[0] = gp.b[0];
    }
    let dg = GenParams { amp_a: gp.amp_b, amp_b: gp.amp_a, phi: -gp.psi, psi: -gp.phi, a, b };
    (dp, dg)
}

/// Relabels a generalized set under the duality: `X̃ → −P̃`, `P̃ → X̃`,
/// `x̂ → −p̂`, `p̂ → x̂`, with `h`, `h̃`, `M` fixed and constants recomputed.
pub fn born_dual(set: &GeneratorSet, mode: DualMode) -> Result<GeneratorSet> {
    let gp = set.gen_params.as_ref().ok_or_else(|| Error::invalid("duality needs a generalized set"))?;
    let (dp, dg) = born_dual_params(&set.params, gp, mode);
    let constants = DerivedConstants::compute(&dp, &dg)?;
    let mut out = set.clone();
    out.params = dp;
    out.gen_params = Some(dg);
    out.constants = Some(constants);
    out.profile = format!("{}+dual", set.profile);
    for mu in 0..dp.n {
        let pairs = [
            (GenId::XTilde(mu), GenId::PTilde(mu), -1.0),
            (GenId::PTilde(mu), GenId::XTilde(mu), 1.0),
            (GenId::XHat(mu), GenId::PHat(mu), -1.0),
            (GenId::PHat(mu), GenId::XHat(mu), 1.0),
        ];
        for (to, from, k) in pairs {
            if set.contains(from) {
                let f = set.get(from)?;
                out.insert(to, if k < 0.0 { -f } else { f.clone() });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::PhasePoint;
    use crate::realizations::{yang_special, ProfilePair};

    fn pt() -> PhasePoint {
        PhasePoint::new(vec![0.3, -0.2, 0.5, 0.1], vec![0.7, 0.4, -0.6, 0.2]).unwrap()
    }

    fn base(params: &ModelParams) -> GeneratorSet {
        yang_special(params, &ProfilePair::phi2_zero(params.case.sigma())).unwrap()
    }

    fn sample_gp() -> GenParams {
        GenParams {
            amp_a: 1.1,
            amp_b: 0.9,
            phi: 0.2,
            psi: -0.1,
            a: vec![0.1, -0.05, 0.15, 0.02],
            b: vec![-0.12, 0.08, 0.03, -0.1],
        }
    }

    #[test]
    fn identity_parameters() {
        let params = ModelParams { alpha: 0.3, beta: 0.2, ..Default::default() };
        let b = base(&params);
        let g = generalized_generators(&params, &GenParams::identity(4), &b).unwrap();
        let k = g.constants.unwrap();
        assert_eq!((k.rho, k.a_t, k.b_t), (0.0, 1.0, 1.0));
        let p = pt();
        for mu in 0..4 {
            let x = g.get(GenId::XTilde(mu)).unwrap().eval(&p).unwrap();
            assert!((x - b.get(GenId::XHat(mu)).unwrap().eval(&p).unwrap()).abs() < 1e-15);
            let y = g.get(GenId::PTilde(mu)).unwrap().eval(&p).unwrap();
            assert!((y - b.get(GenId::PHat(mu)).unwrap().eval(&p).unwrap()).abs() < 1e-15);
        }
        let ht = g.get(GenId::HTilde).unwrap().eval(&p).unwrap();
        assert!((ht - b.get(GenId::H).unwrap().eval(&p).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn zero_amplitude_is_rejected() {
        let params = ModelParams::default();
        let gp = GenParams { amp_a: 0.0, ..GenParams::identity(4) };
        assert!(generalized_generators(&params, &gp, &base(&params)).is_err());
    }

    #[test]
    fn zero_alpha_with_rotation_is_a_domain_error() {
        let params = ModelParams { alpha: 0.0, ..Default::default() };
        let gp = GenParams { phi: 0.2, ..GenParams::identity(4) };
        let r = generalized_generators(&params, &gp, &base(&params));
        assert!(r.unwrap_err().is_domain());
    }

    #[test]
    fn constants_table() {
        let gp = sample_gp();
        let ab = minkowski_dot(&gp.a, &gp.b).unwrap() / (1.1 * 0.9);
        let want = [
            (ModelCase::PP, libm::sin(0.1) + ab),
            (ModelCase::MM, -libm::sin(0.1) + ab),
            (ModelCase::PM, libm::sinh(-0.3) + ab),
            (ModelCase::MP, -libm::sinh(-0.3) + ab),
        ];
        for (case, rho) in want {
            let params = ModelParams { case, ..Default::default() };
            let k = DerivedConstants::compute(&params, &gp).unwrap();
            assert!((k.rho - rho).abs() < 1e-15, "{case}");
        }
    }

    #[test]
    fn closed_form_htilde() {
        let params = ModelParams { alpha: 0.3, beta: 0.2, ..Default::default() };
        let p = pt();
        for (phi, psi) in [(0.2, -0.1), (0.25, 0.3), (-0.3, 0.1)] {
            let gp = GenParams { amp_a: 1.1, amp_b: 0.9, phi, psi, ..GenParams::identity(4) };
            let g = generalized_generators(&params, &gp, &base(&params)).unwrap();
            let built = g.get(GenId::HTilde).unwrap().eval(&p).unwrap();
            let closed = htilde_closed_form(&g).unwrap().eval(&p).unwrap();
            assert!((closed - built).abs() < 1e-14, "{closed} {built}");
            let printed = htilde_printed_form(&g).unwrap().eval(&p).unwrap();
            assert!((printed - built).abs() > 1e-5);
            // the two forms coincide at unit amplitudes and φ + ψ = 0
            let unit = GenParams { amp_a: 1.0, amp_b: 1.0, phi, psi: -phi, ..GenParams::identity(4) };
            let g = generalized_generators(&params, &unit, &base(&params)).unwrap();
            let built = g.get(GenId::HTilde).unwrap().eval(&p).unwrap();
            let printed = htilde_printed_form(&g).unwrap().eval(&p).unwrap();
            assert!((printed - built).abs() < 1e-14);
        }
    }

    #[test]
    fn quarter_turn_degenerates() {
        let params = ModelParams { alpha: 0.3, beta: 0.2, ..Default::default() };
        let gp = GenParams { phi: 0.5, psi: core::f64::consts::FRAC_PI_2 - 0.5, ..GenParams::identity(4) };
        let g = generalized_generators(&params, &gp, &base(&params)).unwrap();
        let k = g.constants.unwrap();
        assert!((k.rho - 1.0).abs() < 1e-15);
        let p = pt();
        assert!(g.get(GenId::HTilde).unwrap().eval(&p).unwrap().abs() < 1e-9);
        for mu in 0..4 {
            let x = g.get(GenId::XTilde(mu)).unwrap().eval(&p).unwrap();
            let y = g.get(GenId::PTilde(mu)).unwrap().eval(&p).unwrap();
            assert!((x - k.beta_t / k.alpha_t * y).abs() < 1e-9);
        }
    }

    #[test]
    fn round_trip_all_cases() {
        let p = pt();
        for case in ModelCase::ALL {
            let params = ModelParams { alpha: 0.3, beta: 0.2, case, n: 4 };
            let gp = sample_gp();
            let b = base(&params);
            let g = generalized_generators(&params, &gp, &b).unwrap();
            let xt: Vec<f64> = (0..4).map(|m| g.get(GenId::XTilde(m)).unwrap().eval(&p).unwrap()).collect();
            let pv: Vec<f64> = (0..4).map(|m| g.get(GenId::PTilde(m)).unwrap().eval(&p).unwrap()).collect();
            let m: Vec<Vec<f64>> =
                (0..4).map(|i| (0..4).map(|j| p.x[i] * p.p[j] - p.x[j] * p.p[i]).collect()).collect();
            let (xh, ph) = inverse_transform(&params, &gp, &xt, &pv, &m).unwrap();
            for mu in 0..4 {
                assert!((xh[mu] - b.get(GenId::XHat(mu)).unwrap().eval(&p).unwrap()).abs() < 1e-12);
                assert!((ph[mu] - b.get(GenId::PHat(mu)).unwrap().eval(&p).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_frame() {
        let params = ModelParams::default();
        let gp = GenParams { phi: core::f64::consts::FRAC_PI_2, ..GenParams::identity(4) };
        let z = vec![0.0; 4];
        let m = vec![z.clone(); 4];
        assert!(matches!(inverse_transform(&params, &gp, &z, &z, &m), Err(Error::DegenerateFrame { .. })));
    }

    #[test]
    fn dual_twice_flips_shifts() {
        let params = ModelParams { alpha: 0.3, beta: 0.2, case: ModelCase::PM, n: 4 };
        let gp = sample_gp();
        let (p1, g1) = born_dual_params(&params, &gp, DualMode::All);
        let (p2, g2) = born_dual_params(&p1, &g1, DualMode::All);
        assert_eq!(p2, params);
        assert_eq!((g2.amp_a, g2.amp_b, g2.phi, g2.psi), (gp.amp_a, gp.amp_b, gp.phi, gp.psi));
        let neg = |v: &[f64]| v.iter().map(|x| -x).collect::<Vec<_>>();
        assert_eq!(g2.a, neg(&gp.a));
        assert_eq!(g2.b, neg(&gp.b));
        let k0 = DerivedConstants::compute(&params, &gp).unwrap();
        let k2 = DerivedConstants::compute(&p2, &g2).unwrap();
        assert_eq!(k0, k2);
    }

    #[test]
    fn dual_flips_rho_and_swaps_scales() {
        for case in ModelCase::ALL {
            let params = ModelParams { alpha: 0.3, beta: 0.2, case, n: 4 };
            let gp = sample_gp();
            let (dp, dg) = born_dual_params(&params, &gp, DualMode::All);
            let k = DerivedConstants::compute(&params, &gp).unwrap();
            let d = DerivedConstants::compute(&dp, &dg).unwrap();
            assert!((k.rho + d.rho).abs() < 1e-15, "{case}");
            assert!((k.a_t - d.b_t).abs() < 1e-15);
            assert!((k.b_t - d.a_t).abs() < 1e-15);
        }
    }
}
