use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::{Family, GenId, GeneratorSet, ProfilePair};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::jet::Jet;
use crate::phase::{metric_sign, minkowski_dot_jets, ModelCase, ModelParams};

/// Signs `(s₁, s₂)` in the radicands `1 + s₁β²p² + φ₁` and `1 + s₂α²x² + φ₂`.
pub fn radicand_signs(case: ModelCase) -> (f64, f64) {
    match case {
        ModelCase::PP => (-1.0, -1.0),
        ModelCase::MM => (1.0, 1.0),
        ModelCase::PM => (-1.0, 1.0),
        ModelCase::MP => (1.0, -1.0),
    }
}

fn radicand_fields(params: &ModelParams, profiles: &ProfilePair) -> (ScalarField, ScalarField) {
    let (s1, s2) = radicand_signs(params.case);
    let (a, b) = (params.alpha, params.beta);
    let pr1 = Arc::new(profiles.clone());
    let pr2 = pr1.clone();
    let r1 = ScalarField::new("r1", move |c| {
        let n = c.len() / 2;
        let (x, p) = c.split_at(n);
        let z = minkowski_dot_jets(x, p) * (a * b);
        Ok(minkowski_dot_jets(p, p) * (s1 * b * b) + 1.0 + pr1.phi1(&z)?)
    });
    let r2 = ScalarField::new("r2", move |c| {
        let n = c.len() / 2;
        let (x, p) = c.split_at(n);
        let z = minkowski_dot_jets(x, p) * (a * b);
        Ok(minkowski_dot_jets(x, x) * (s2 * a * a) + 1.0 + pr2.phi2(&z)?)
    });
    (r1, r2)
}

/// `x̂_μ = x_μ√r₁`, `p̂_μ = p_μ√r₂`, `h = √r₁√r₂`, with the case's radicands.
pub fn yang_special(params: &ModelParams, profiles: &ProfilePair) -> Result<GeneratorSet> {
    params.validate()?;
    if profiles.sigma() != params.case.sigma() {
        return Err(Error::invalid(format!(
            "profile constraint sign {:?} does not match case {}",
            profiles.sigma(),
            params.case
        )));
    }
    let (r1, r2) = radicand_fields(params, profiles);
    let sq1 = r1.map("sqrt r1", |r| Ok(r.try_sqrt()?));
    let sq2 = r2.map("sqrt r2", |r| Ok(r.try_sqrt()?));
    let mut set = GeneratorSet::new(Family::Yang, *params, profiles.name());
    for mu in 0..params.n {
        set.insert(GenId::XHat(mu), &ScalarField::x(mu) * &sq1);
        set.insert(GenId::PHat(mu), &ScalarField::p(mu) * &sq2);
    }
    set.insert(GenId::H, &sq1 * &sq2);
    set.insert_lorentz();
    set.add_guard(r1);
    set.add_guard(r2);
    Ok(set)
}

/// `M² = Σ_{μν} η^{μμ}η^{νν} M_{μν}²` over the full double sum.
pub(crate) fn lorentz_square(c: &[Jet]) -> Jet {
    let n = c.len() / 2;
    let mut acc = c[0].constant_like(0.0);
    for mu in 0..n {
        for nu in mu + 1..n {
            let m = &c[mu] * &c[n + nu] - &c[nu] * &c[n + mu];
            acc += &(m.square() * (2.0 * metric_sign(mu) * metric_sign(nu)));
        }
    }
    acc
}

/// `h = √(1 − ε₂α²x̂² − ε₁β²p̂² − ε₁ε₂(α²β²/2)M²)` built from the set's
/// `x̂` and `p̂`.
pub fn universal_h(params: &ModelParams, set: &GeneratorSet) -> Result<ScalarField> {
    let n = params.n;
    let xs: Vec<ScalarField> = (0..n).map(|m| set.get(GenId::XHat(m)).cloned()).collect::<Result<_>>()?;
    let ps: Vec<ScalarField> = (0..n).map(|m| set.get(GenId::PHat(m)).cloned()).collect::<Result<_>>()?;
    let (e1, e2) = (params.eps1(), params.eps2());
    let (a2, b2) = (params.alpha * params.alpha, params.beta * params.beta);
    Ok(ScalarField::new("h.universal", move |c| {
        let xh: Vec<Jet> = xs.iter().map(|f| f.eval_at(c)).collect::<Result<_>>()?;
        let ph: Vec<Jet> = ps.iter().map(|f| f.eval_at(c)).collect::<Result<_>>()?;
        let rad = 1.0 - minkowski_dot_jets(&xh, &xh) * (e2 * a2) - minkowski_dot_jets(&ph, &ph) * (e1 * b2)
            - lorentz_square(c) * (e1 * e2 * a2 * b2 / 2.0);
        Ok(rad.try_sqrt()?)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::{PhasePoint, Sign};
    use alloc::vec;

    fn pt() -> PhasePoint {
        PhasePoint::new(vec![0.3, -0.2, 0.5, 0.1], vec![0.7, 0.4, -0.6, 0.2]).unwrap()
    }

    #[test]
    fn undeformed_limit() {
        let params = ModelParams { alpha: 0.0, beta: 0.0, ..Default::default() };
        let set = yang_special(&params, &ProfilePair::phi2_zero(Sign::Plus)).unwrap();
        let p = pt();
        for mu in 0..4 {
            assert_eq!(set.get(GenId::XHat(mu)).unwrap().eval(&p).unwrap(), p.x[mu]);
            assert_eq!(set.get(GenId::PHat(mu)).unwrap().eval(&p).unwrap(), p.p[mu]);
        }
        assert_eq!(set.get(GenId::H).unwrap().eval(&p).unwrap(), 1.0);
        assert_eq!(universal_h(&params, &set).unwrap().eval(&p).unwrap(), 1.0);
    }

    #[test]
    fn minus_minus_radicand() {
        let params = ModelParams { alpha: 0.3, beta: 0.2, case: ModelCase::MM, n: 4 };
        let set = yang_special(&params, &ProfilePair::phi2_zero(Sign::Plus)).unwrap();
        let p = pt();
        let p2 = crate::phase::minkowski_dot(&p.p, &p.p).unwrap();
        let z = 0.06 * crate::phase::minkowski_dot(&p.x, &p.p).unwrap();
        let want = p.x[1] * libm::sqrt(1.0 + 0.04 * p2 + z * z);
        assert!((set.get(GenId::XHat(1)).unwrap().eval(&p).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn sign_mismatch_is_rejected() {
        let params = ModelParams { case: ModelCase::PM, ..Default::default() };
        assert!(yang_special(&params, &ProfilePair::phi2_zero(Sign::Plus)).is_err());
    }

    #[test]
    fn universal_h_at_origin() {
        let params = ModelParams::default();
        let set = yang_special(&params, &ProfilePair::half(Sign::Plus)).unwrap();
        let h = universal_h(&params, &set).unwrap();
        assert_eq!(h.eval(&PhasePoint::origin(4)).unwrap(), 1.0);
    }

    #[test]
    fn universal_h_matches_product_form() {
        let p = pt();
        for case in ModelCase::ALL {
            let params = ModelParams { alpha: 0.3, beta: 0.3, case, n: 4 };
            for name in ["phi2_zero", "phi1_zero", "half"] {
                let set = yang_special(&params, &ProfilePair::preset(name, case.sigma()).unwrap()).unwrap();
                let a = set.get(GenId::H).unwrap().jet(&p).unwrap();
                let b = universal_h(&params, &set).unwrap().jet(&p).unwrap();
                assert!((a.real() - b.real()).abs() < 1e-14, "{case} {name}");
                for (ga, gb) in a.gradient().iter().zip(b.gradient()) {
                    assert!((ga - gb).abs() < 1e-13);
                }
            }
        }
    }
}
