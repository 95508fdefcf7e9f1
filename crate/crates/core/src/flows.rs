//! Hamiltonian flows on the deformed phase space.
//!
//! `e^{tL_K} f = f ∘ Φ^K_t` is realized by integrating the flow of `K`
//! (see [`crate::bracket::pullback`]). On top of that: the exact `G` and its
//! series, rotation flows generated by `h/(αβ)`, the operator that maps
//! `x̂⁽⁰⁾` to the special realization, truncated BCH composition and
//! automorphisms `e^{L_F}`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{echo, sweep, PointMap, PointOutcome, ResidualReport};
use crate::bracket::{bracket_field, contract_gradients, flow_coords, pullback, FlowSpec};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::jet::Jet;
use crate::phase::{metric_sign, minkowski_dot_jets, ModelCase, ModelParams, PhasePoint, Sign};
use crate::realizations::{yang_special, GenId, GeneratorSet, ProfilePair};
use crate::sample::SampleSpec;

fn check_ab(alpha: f64, beta: f64) -> Result<f64> {
    let ab = alpha * beta;
    if ab == 0.0 || !ab.is_finite() {
        return Err(Error::invalid("G needs alpha*beta != 0"));
    }
    Ok(ab)
}

/// `z(1 − ½ln(1+z²)) − arctan z`, i.e. `αβ·G`, on jets.
pub fn g_scaled_jet(z: &Jet) -> Jet {
    z * &(1.0 - (1.0 + z.square()).ln() * 0.5) - z.atan()
}

/// Exact `G = (1/(αβ))(z(1 − ½ln(1+z²)) − arctan z)`.
pub fn g_closed(z: f64, alpha: f64, beta: f64) -> Result<f64> {
    let ab = check_ab(alpha, beta)?;
    Ok((z * (1.0 - 0.5 * libm::log1p(z * z)) - libm::atan(z)) / ab)
}

/// Partial sum `(1/(αβ)) Σ_{n=1}^{N} (−1)ⁿ z^{2n+1}/(2n(2n+1))`.
pub fn g_series(z: f64, alpha: f64, beta: f64, order: usize) -> Result<f64> {
    let ab = check_ab(alpha, beta)?;
    Ok((1..=order).map(|n| g_series_term(z, n)).sum::<f64>() / ab)
}

/// Term `n` of the series for `αβ·G`.
pub fn g_series_term(z: f64, n: usize) -> f64 {
    let k = 2 * n as i32;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    sign * libm::pow(z, (k + 1) as f64) / (k as f64 * (k + 1) as f64)
}

/// Taylor coefficients `c_0..c_order` of `αβ·G` at `z = 0`, from nested jets.
pub fn g_taylor_coefficients(order: usize) -> Vec<f64> {
    let mut j = g_scaled_jet(&Jet::variable(1, order, 0, 0.0));
    let mut out = Vec::with_capacity(order + 1);
    let mut fact = 1.0;
    for k in 0..=order {
        if k > 0 {
            fact *= k as f64;
        }
        out.push(j.real() / fact);
        if k < order {
            j = j.partial(0);
        }
    }
    out
}

/// `G` as a phase-space field, `z = αβ(x·p)`.
pub fn g_field(alpha: f64, beta: f64) -> Result<ScalarField> {
    let ab = check_ab(alpha, beta)?;
    Ok(ScalarField::new("G", move |c| {
        let n = c.len() / 2;
        let z = minkowski_dot_jets(&c[..n], &c[n..]) * ab;
        Ok(g_scaled_jet(&z) * (1.0 / ab))
    }))
}

/// `x̂⁽⁰⁾_μ = √(1−β²p²) x_μ`.
pub fn x_hat0(beta: f64, mu: usize) -> ScalarField {
    ScalarField::new(format!("x0.{mu}"), move |c| {
        let n = c.len() / 2;
        Ok(&c[mu] * &(1.0 - minkowski_dot_jets(&c[n..], &c[n..]) * (beta * beta)).try_sqrt()?)
    })
}

/// `p̂⁽⁰⁾_μ = √(1−α²x²) p_μ`.
pub fn p_hat0(alpha: f64, mu: usize) -> ScalarField {
    ScalarField::new(format!("p0.{mu}"), move |c| {
        let n = c.len() / 2;
        Ok(&c[n + mu] * &(1.0 - minkowski_dot_jets(&c[..n], &c[..n]) * (alpha * alpha)).try_sqrt()?)
    })
}

/// `K = h/(αβ)`, generator of the rotation flows.
pub fn rotation_generator(set: &GeneratorSet) -> Result<ScalarField> {
    let ab = check_ab(set.params.alpha, set.params.beta)?;
    Ok(set.get(GenId::H)?.scale(1.0 / ab).renamed("h/(ab)"))
}

fn require_pp(params: &ModelParams) -> Result<()> {
    if params.case != ModelCase::PP {
        return Err(Error::invalid("this check is defined for the (+1,+1) case"));
    }
    if !(params.alpha > 0.0 && params.beta > 0.0) {
        return Err(Error::invalid("this check needs alpha, beta > 0"));
    }
    Ok(())
}

fn report(set: &GeneratorSet, name: &str, stats: &crate::algebra::SweepStats, k: usize, tol: f64, fd: bool) -> ResidualReport {
    let label = (set.family.label(), set.params.case.label());
    let mut r = ResidualReport::from_stats(label, name, stats, k, tol, echo(set));
    r.fd_jets = fd;
    r
}

/// Rotation flows: `e^{φL_K}x̂_μ = cos φ x̂_μ + (β/α) sin φ p̂_μ` and
/// `e^{−φL_K}p̂_μ = cos φ p̂_μ + (α/β) sin φ x̂_μ`, `K = h/(αβ)`, pointwise.
/// Reports `rotation.x` and `rotation.p`.
pub fn rotation_check(
    set: &GeneratorSet,
    angle: f64,
    sample: &SampleSpec,
    flow: &FlowSpec,
    tol: f64,
    map: &dyn PointMap,
) -> Result<Vec<ResidualReport>> {
    let params = set.params;
    require_pp(&params)?;
    let k = rotation_generator(set)?;
    let (al, be) = (params.alpha, params.beta);
    let (c, s) = (libm::cos(angle), libm::sin(angle));
    let xs: Vec<ScalarField> = (0..params.n).map(|mu| set.get(GenId::XHat(mu)).cloned()).collect::<Result<_>>()?;
    let ps: Vec<ScalarField> = (0..params.n).map(|mu| set.get(GenId::PHat(mu)).cloned()).collect::<Result<_>>()?;
    let fwd = FlowSpec { t: angle, ..*flow };
    let back = FlowSpec { t: -angle, ..*flow };
    let f = |pt: &PhasePoint| -> PointOutcome {
        let c0 = pt.seed(0);
        let plus = flow_coords(&k, &fwd, &c0)?;
        let minus = flow_coords(&k, &back, &c0)?;
        let (mut rx, mut rp) = (0.0f64, 0.0f64);
        for mu in 0..params.n {
            let (x, p) = (xs[mu].eval_at(&c0)?.real(), ps[mu].eval_at(&c0)?.real());
            let x_rot = xs[mu].eval_at(&plus)?.real();
            let p_rot = ps[mu].eval_at(&minus)?.real();
            rx = rx.max((x_rot - (c * x + be / al * s * p)).abs());
            rp = rp.max((p_rot - (c * p + al / be * s * x)).abs());
        }
        Ok(vec![rx, rp])
    };
    let stats = sweep(sample, params.n, set.guards(), 2, map, &f)?;
    Ok(vec![report(set, "rotation.x", &stats, 0, tol, false), report(set, "rotation.p", &stats, 1, tol, false)])
}

/// `e^{φ₁L_K} e^{φ₂L_K} x̂_μ` against `e^{(φ₁+φ₂)L_K} x̂_μ`, pointwise.
pub fn angle_additivity(
    set: &GeneratorSet,
    phi1: f64,
    phi2: f64,
    sample: &SampleSpec,
    flow: &FlowSpec,
    tol: f64,
    map: &dyn PointMap,
) -> Result<ResidualReport> {
    let params = set.params;
    require_pp(&params)?;
    let k = rotation_generator(set)?;
    let xs: Vec<ScalarField> = (0..params.n).map(|mu| set.get(GenId::XHat(mu)).cloned()).collect::<Result<_>>()?;
    let (s1, s2, s12) = (FlowSpec { t: phi1, ..*flow }, FlowSpec { t: phi2, ..*flow }, FlowSpec { t: phi1 + phi2, ..*flow });
    let f = |pt: &PhasePoint| -> PointOutcome {
        let c0 = pt.seed(0);
        // e^{φ₁L}(e^{φ₂L}f) = f ∘ Φ_{φ₂} ∘ Φ_{φ₁}
        let two = flow_coords(&k, &s2, &flow_coords(&k, &s1, &c0)?)?;
        let one = flow_coords(&k, &s12, &c0)?;
        let mut r = 0.0f64;
        for x in &xs {
            r = r.max((x.eval_at(&two)?.real() - x.eval_at(&one)?.real()).abs());
        }
        Ok(vec![r])
    };
    let stats = sweep(sample, params.n, set.guards(), 1, map, &f)?;
    Ok(report(set, "rotation.additivity", &stats, 0, tol, false))
}

/// Nested brackets `{h,{h,x̂}} = −α²β²x̂` and `{h,{h,{h,x̂}}} = −α²β⁴p̂`,
/// from jets of depth 3. Reports `induction.2` and `induction.3`.
pub fn induction_check(set: &GeneratorSet, sample: &SampleSpec, tol: f64, map: &dyn PointMap) -> Result<Vec<ResidualReport>> {
    let params = set.params;
    let (a2, b2) = (params.alpha * params.alpha, params.beta * params.beta);
    let h = set.get(GenId::H)?.clone();
    let mut nested = Vec::new();
    for mu in 0..params.n {
        let x = set.get(GenId::XHat(mu))?.clone();
        let p = set.get(GenId::PHat(mu))?.clone();
        let two = bracket_field(&h, &bracket_field(&h, &x));
        let three = bracket_field(&h, &two);
        nested.push((x, p, two, three));
    }
    let f = |pt: &PhasePoint| -> PointOutcome {
        let (mut r2, mut r3) = (0.0f64, 0.0f64);
        for (x, p, two, three) in &nested {
            let (xv, pv) = (x.eval(pt)?, p.eval(pt)?);
            r2 = r2.max((two.eval(pt)? + a2 * b2 * xv).abs());
            r3 = r3.max((three.eval(pt)? + a2 * b2 * b2 * pv).abs());
        }
        Ok(vec![r2, r3])
    };
    let stats = sweep(sample, params.n, set.guards(), 2, map, &f)?;
    Ok(vec![report(set, "induction.2", &stats, 0, tol, false), report(set, "induction.3", &stats, 1, tol, false)])
}

/// Settings of [`og_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OgSpec {
    /// Amplitude `A` of `X̃⁽¹⁾`.
    pub amp: f64,
    /// Rotation angle `φ` of `X̃⁽¹⁾`.
    pub angle: f64,
}

impl Default for OgSpec {
    fn default() -> Self {
        OgSpec { amp: 1.0, angle: 0.2 }
    }
}

/// The special realization with `φ₁ = z²`, `φ₂ = 0` reached from `x̂⁽⁰⁾`
/// through `e^{L_G}`. Three reports:
/// - `og.i`: `e^{L_G}x̂⁽⁰⁾_μ − √(1−β²p²+z²) x_μ`, pointwise;
/// - `og.ii`: `{e^{L_G}x̂⁽⁰⁾_μ, p̂⁽⁰⁾_ν} − η_{μν}h`;
/// - `og.iii`: `{X̃⁽¹⁾_μ, P̃⁽⁰⁾_ν} − η_{μν}A cos φ h⁽¹'⁰⁾ − A sin φ αβM_{μν}`
///   with `X̃⁽¹⁾ = A e^{φL_K} e^{L_G} x̂⁽⁰⁾`.
///
/// Brackets (ii) and (iii) use first derivatives of flow maps from finite
/// differences.
pub fn og_check(
    params: &ModelParams,
    og: &OgSpec,
    sample: &SampleSpec,
    flow: &FlowSpec,
    tol: f64,
    map: &dyn PointMap,
) -> Result<Vec<ResidualReport>> {
    require_pp(params)?;
    let set = yang_special(params, &ProfilePair::phi2_zero(Sign::Plus))?;
    let g = g_field(params.alpha, params.beta)?;
    let k = rotation_generator(&set)?;
    let n = params.n;
    let (al, be) = (params.alpha, params.beta);
    let x0: Vec<ScalarField> = (0..n).map(|mu| x_hat0(be, mu)).collect();
    let p0: Vec<ScalarField> = (0..n).map(|mu| p_hat0(al, mu)).collect();
    let xs: Vec<ScalarField> = (0..n).map(|mu| set.get(GenId::XHat(mu)).cloned()).collect::<Result<_>>()?;
    let h = set.get(GenId::H)?.clone();
    let g_spec = FlowSpec { t: 1.0, ..*flow };
    let k_spec = FlowSpec { t: og.angle, ..*flow };
    let (ca, sa) = (og.amp * libm::cos(og.angle), og.amp * libm::sin(og.angle));
    let f = |pt: &PhasePoint| -> PointOutcome {
        let c0 = pt.seed(0);
        let c1 = pt.seed(1);
        let after_g0 = flow_coords(&g, &g_spec, &c0)?;
        let after_g1 = flow_coords(&g, &g_spec, &c1)?;
        let after_kg = flow_coords(&g, &g_spec, &flow_coords(&k, &k_spec, &c1)?)?;
        let hv = h.eval_at(&c0)?.real();
        let p0g: Vec<Vec<f64>> = p0.iter().map(|p| Ok(p.eval_at(&c1)?.gradient())).collect::<Result<_>>()?;
        let (mut r1, mut r2, mut r3) = (0.0f64, 0.0f64, 0.0f64);
        for mu in 0..n {
            r1 = r1.max((x0[mu].eval_at(&after_g0)?.real() - xs[mu].eval_at(&c0)?.real()).abs());
            let xg = x0[mu].eval_at(&after_g1)?.gradient();
            let x1: Vec<f64> = x0[mu].eval_at(&after_kg)?.gradient().iter().map(|v| v * og.amp).collect();
            for nu in 0..n {
                let eta = if mu == nu { metric_sign(mu) } else { 0.0 };
                r2 = r2.max((contract_gradients(&xg, &p0g[nu]) - eta * hv).abs());
                let m = pt.x[mu] * pt.p[nu] - pt.x[nu] * pt.p[mu];
                let rhs = eta * ca * hv + sa * al * be * m;
                r3 = r3.max((contract_gradients(&x1, &p0g[nu]) - rhs).abs());
            }
        }
        Ok(vec![r1, r2, r3])
    };
    let stats = sweep(sample, n, set.guards(), 3, map, &f)?;
    Ok(vec![
        report(&set, "og.i", &stats, 0, tol, false),
        report(&set, "og.ii", &stats, 1, tol, true),
        report(&set, "og.iii", &stats, 2, tol, true),
    ])
}

/// `C = A + B + ½{A,B} + (1/12){A,{A,B}} − (1/12){B,{A,B}}`, truncated
/// after `order` (1, 2 or 3) in the combined degree of `A` and `B`.
pub fn bch_compose(a: &ScalarField, b: &ScalarField, order: usize) -> Result<ScalarField> {
    if !(1..=3).contains(&order) {
        return Err(Error::invalid("BCH order must be 1, 2 or 3"));
    }
    let mut terms = vec![(1.0, a.clone()), (1.0, b.clone())];
    if order >= 2 {
        let ab = bracket_field(a, b);
        if order >= 3 {
            terms.push((1.0 / 12.0, bracket_field(a, &ab)));
            terms.push((-1.0 / 12.0, bracket_field(b, &ab)));
        }
        terms.push((0.5, ab));
    }
    Ok(ScalarField::linear_combination(format!("bch{order}"), terms))
}

/// Error of one BCH composition at a list of points:
/// `max |e^{L_A}e^{L_B}f − e^{L_C}f|`.
pub fn bch_error(a: &ScalarField, b: &ScalarField, f: &ScalarField, order: usize, pts: &[PhasePoint], flow: &FlowSpec) -> Result<f64> {
    let c = bch_compose(a, b, order)?;
    let unit = FlowSpec { t: 1.0, ..*flow };
    let mut worst = 0.0f64;
    for pt in pts {
        let c0 = pt.seed(0);
        // e^{L_A}(e^{L_B}f) = f ∘ Φ_B ∘ Φ_A
        let lhs = f.eval_at(&flow_coords(b, &unit, &flow_coords(a, &unit, &c0)?)?)?.real();
        let rhs = f.eval_at(&flow_coords(&c, &unit, &c0)?)?.real();
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Outcome of the scaling test of the truncated BCH composition.
#[derive(Debug, Clone, PartialEq)]
pub struct BchOrderReport {
    pub scales: Vec<f64>,
    pub errors: Vec<f64>,
    /// `errors[i] / errors[i+1]`.
    pub ratios: Vec<f64>,
    pub min_ratio: f64,
    pub pass: bool,
}

/// `A = εx_1²`, `B = εp_1²` with `ε = eps0/2^k`, `k = 0..=halvings`, and
/// `f = x_1 + p_1`; passes when every halving shrinks the third-order
/// truncation error by at least `min_ratio`.
pub fn bch_order_test(eps0: f64, halvings: usize, min_ratio: f64, pts: &[PhasePoint], flow: &FlowSpec) -> Result<BchOrderReport> {
    let n = pts.first().map(PhasePoint::dim).ok_or_else(|| Error::invalid("BCH order test needs points"))?;
    if n < 2 {
        return Err(Error::invalid("BCH order test needs n >= 2"));
    }
    let f = &ScalarField::x(1) + &ScalarField::p(1);
    let mut scales = Vec::new();
    let mut errors = Vec::new();
    for k in 0..=halvings {
        let eps = eps0 / libm::pow(2.0, k as f64);
        let a = ScalarField::new("eps x1^2", move |c| Ok(c[1].square() * eps));
        let b = ScalarField::new("eps p1^2", move |c| {
            let n = c.len() / 2;
            Ok(c[n + 1].square() * eps)
        });
        scales.push(eps);
        errors.push(bch_error(&a, &b, &f, 3, pts, flow)?);
    }
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[0] / w[1]).collect();
    let min_ratio_seen = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(BchOrderReport { scales, errors, ratios, min_ratio: min_ratio_seen, pass: min_ratio_seen >= min_ratio })
}

/// `e^{L_F}` applied to every generator and guard of `set`.
pub fn automorphism_pushforward(f: &ScalarField, set: &GeneratorSet, flow: &FlowSpec) -> GeneratorSet {
    let mut out = set.map_fields(|_, g| pullback(f, 1.0, g, flow)).map_guards(|g| pullback(f, 1.0, g, flow));
    out.fd_jets = true;
    out.profile = format!("{} after exp(L[{}])", set.profile, f.name());
    out
}

/// `F = k·z·β²p²` with `z = αβ(x·p)`, a Lorentz-invariant automorphism
/// generator.
pub fn invariant_generator(params: &ModelParams, k: f64) -> ScalarField {
    let (al, be) = (params.alpha, params.beta);
    ScalarField::new(format!("{k}*z*b2p2"), move |c| {
        let n = c.len() / 2;
        let (x, p) = c.split_at(n);
        Ok(minkowski_dot_jets(x, p) * minkowski_dot_jets(p, p) * (k * al * be * be * be))
    })
}
