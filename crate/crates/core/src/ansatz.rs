//! Ansatz quadruples `(f, g, f̃, g̃)` over `(u, v, z)` and the seven
//! first-order equations they must satisfy.
//!
//! With `X̃_μ = x_μ f + (β̃/α̃) p_μ g` and `P̃_μ = p_μ f̃ + (α̃/β̃) x_μ g̃`,
//! the brackets `{X̃,X̃} = β̃²M`, `{P̃,P̃} = α̃²M` and
//! `{X̃_μ,P̃_ν} = η_{μν}h̃ + α̃β̃ρ̃M_{μν}` reduce to equations `e1..e7` in the
//! invariants `u = β̃²p²`, `v = α̃²x²`, `z = (α̃β̃/AB)(xp)`.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::jet::Jet;
use crate::phase::{invariant_jets, ModelParams, Scaling};
use crate::realizations::{DerivedConstants, Family, GenId, GenParams, GeneratorSet};

/// A function of `(u, v, z)` on jets of any shape.
pub type TriFn = Arc<dyn Fn(&Jet, &Jet, &Jet) -> Result<Jet> + Send + Sync>;

/// Value and `(∂u, ∂v, ∂z)` of a [`TriFn`] at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriJet {
    pub value: f64,
    pub du: f64,
    pub dv: f64,
    pub dz: f64,
}

impl TriJet {
    pub fn eval(f: &TriFn, u: f64, v: f64, z: f64) -> Result<Self> {
        let j = f(&Jet::variable(3, 1, 0, u), &Jet::variable(3, 1, 1, v), &Jet::variable(3, 1, 2, z))?;
        if !j.is_finite() {
            return Err(Error::Domain(crate::DomainError { op: "ansatz function", value: j.real() }));
        }
        let g = j.gradient();
        Ok(TriJet { value: j.real(), du: g[0], dv: g[1], dz: g[2] })
    }
}

#[derive(Clone)]
pub struct AnsatzQuadruple {
    pub name: String,
    pub f: TriFn,
    pub g: TriFn,
    pub ft: TriFn,
    pub gt: TriFn,
    /// Declared `h̃`; `f f̃ − g g̃` when absent.
    pub target: Option<TriFn>,
    pub rho: f64,
}

impl fmt::Debug for AnsatzQuadruple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnsatzQuadruple").field("name", &self.name).field("rho", &self.rho).finish()
    }
}

fn tri(f: impl Fn(&Jet, &Jet, &Jet) -> Result<Jet> + Send + Sync + 'static) -> TriFn {
    Arc::new(f)
}

fn zero() -> TriFn {
    tri(|u, _, _| Ok(u.constant_like(0.0)))
}

/// `√(1 − u/A² + z²)`
fn root_u(a: f64) -> TriFn {
    tri(move |u, _, z| Ok((1.0 - u * (1.0 / (a * a)) + z.square()).try_sqrt()?))
}

/// `√(1 − v/B²)`
fn root_v(b: f64) -> TriFn {
    tri(move |_, v, _| Ok((1.0 - v * (1.0 / (b * b))).try_sqrt()?))
}

fn scaled(k: f64, f: TriFn) -> TriFn {
    tri(move |u, v, z| Ok(f(u, v, z)? * k))
}

/// Which angle multiplies `g̃` in the composed quadruple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GtAngle {
    /// `A sin ψ`, as obtained by composing the generators.
    Psi,
    /// `A sin φ`, the literal printed form.
    Phi,
}

impl AnsatzQuadruple {
    /// `f = √(1−u+z²)`, `g = 0`, `f̃ = √(1−v)`, `g̃ = 0`, `ρ̃ = 0`.
    pub fn special() -> Self {
        AnsatzQuadruple {
            name: "special".into(),
            f: root_u(1.0),
            g: zero(),
            ft: root_v(1.0),
            gt: zero(),
            target: None,
            rho: 0.0,
        }
    }

    /// `f = A cos φ √(1−u/A²+z²)`, `g = B sin φ √(1−v/B²)`,
    /// `f̃ = B cos ψ √(1−v/B²)`, `g̃ = A sin(ψ or φ) √(1−u/A²+z²)`,
    /// `ρ̃ = sin(φ+ψ)`; profile `φ₁ = z²`, `φ₂ = 0`.
    pub fn composed(amp_a: f64, amp_b: f64, phi: f64, psi: f64, angle: GtAngle) -> Self {
        let gt_angle = match angle {
            GtAngle::Psi => psi,
            GtAngle::Phi => phi,
        };
        let label = match angle {
            GtAngle::Psi => "composed",
            GtAngle::Phi => "composed_printed",
        };
        AnsatzQuadruple {
            name: label.into(),
            f: scaled(amp_a * libm::cos(phi), root_u(amp_a)),
            g: scaled(amp_b * libm::sin(phi), root_v(amp_b)),
            ft: scaled(amp_b * libm::cos(psi), root_v(amp_b)),
            gt: scaled(amp_a * libm::sin(gt_angle), root_u(amp_a)),
            target: None,
            rho: libm::sin(phi + psi),
        }
    }

    /// `f̃ = √(1−v)`, `g̃ = 0`, `f = √((1−ρ̃²)(1−u+z²))`, `g = ρ̃√(1−v)`,
    /// target `h̃ = √((1−ρ̃²)(1−u−v+uv+z²−vz²))`.
    pub fn particular(rho: f64) -> Self {
        let k = 1.0 - rho * rho;
        AnsatzQuadruple {
            name: "particular".into(),
            f: tri(move |u, _, z| Ok(((1.0 - u + z.square()) * k).try_sqrt()?)),
            g: scaled(rho, root_v(1.0)),
            ft: root_v(1.0),
            gt: zero(),
            target: Some(tri(move |u, v, z| {
                let z2 = z.square();
                let inner = 1.0 - u - v + u * v + &z2 - v * &z2;
                Ok((inner * k).try_sqrt()?)
            })),
            rho,
        }
    }

    /// The three quadruples of the default suite.
    pub fn shipped() -> Vec<Self> {
        alloc::vec![Self::special(), Self::composed(1.0, 1.0, 0.2, 0.1, GtAngle::Psi), Self::particular(0.3)]
    }

    /// Multiplies `f` by `1 + κu`, a smooth departure from a solution.
    pub fn perturbed(&self, kappa: f64) -> Self {
        let f = self.f.clone();
        let mut q = self.clone();
        q.name = alloc::format!("{}+{kappa}", self.name);
        q.f = tri(move |u, v, z| Ok(f(u, v, z)? * (1.0 + u * kappa)));
        q
    }

    fn target_value(&self, u: f64, v: f64, z: f64, f: &TriJet, g: &TriJet, ft: &TriJet, gt: &TriJet) -> Result<f64> {
        match &self.target {
            Some(t) => Ok(TriJet::eval(t, u, v, z)?.value),
            None => Ok(f.value * ft.value - g.value * gt.value),
        }
    }
}

/// The bilinear form shared by all seven equations:
/// `4z(a_v b_u − a_u b_v) + 2v(a_v b_z − a_z b_v) + 2u(a_z b_u − a_u b_z)`.
fn cross(a: &TriJet, b: &TriJet, u: f64, v: f64, z: f64) -> f64 {
    4.0 * z * (a.dv * b.du - a.du * b.dv) + 2.0 * v * (a.dv * b.dz - a.dz * b.dv) + 2.0 * u * (a.dz * b.du - a.du * b.dz)
}

/// `LHS − RHS` of `e1..e7` at `(u, v, z)`.
pub fn pde_residuals(q: &AnsatzQuadruple, u: f64, v: f64, z: f64) -> Result<[f64; 7]> {
    let f = TriJet::eval(&q.f, u, v, z)?;
    let g = TriJet::eval(&q.g, u, v, z)?;
    let ft = TriJet::eval(&q.ft, u, v, z)?;
    let gt = TriJet::eval(&q.gt, u, v, z)?;
    let ht = q.target_value(u, v, z, &f, &g, &ft, &gt)?;
    let rho = q.rho;
    let e1 = -2.0 * f.value * f.du - 2.0 * g.value * g.dv + cross(&f, &g, u, v, z) + f.value * g.dz + g.value * f.dz - 1.0;
    let e2 = -2.0 * ft.value * ft.dv - 2.0 * gt.value * gt.du - cross(&ft, &gt, u, v, z)
        + ft.value * gt.dz
        + gt.value * ft.dz
        - 1.0;
    let e3 = f.value * ft.value - g.value * gt.value - ht;
    let e4 = 2.0 * ft.value * f.dv - 2.0 * g.value * gt.dv + cross(&f, &gt, u, v, z) + f.value * gt.dz - gt.value * f.dz;
    let e5 = -2.0 * f.value * ft.du - 2.0 * gt.value * g.du + cross(&g, &ft, u, v, z) + ft.value * g.dz - g.value * ft.dz;
    let e6 = -2.0 * gt.value * f.du - 2.0 * g.value * ft.dv + cross(&f, &ft, u, v, z) + f.value * ft.dz + ft.value * f.dz - rho;
    let e7 = 2.0 * f.value * gt.du + 2.0 * ft.value * g.dv + cross(&g, &gt, u, v, z) - g.value * gt.dz - gt.value * g.dz + rho;
    Ok([e1, e2, e3, e4, e5, e6, e7])
}

/// Tensor grid over `(u, v, z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub u: (f64, f64, usize),
    pub v: (f64, f64, usize),
    pub z: (f64, f64, usize),
}

impl Default for Grid {
    /// `u, v ∈ [0, 0.5]` with 9 nodes each, `z ∈ [−0.5, 0.5]` with 21.
    fn default() -> Self {
        Grid { u: (0.0, 0.5, 9), v: (0.0, 0.5, 9), z: (-0.5, 0.5, 21) }
    }
}

fn axis((lo, hi, n): (f64, f64, usize)) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

impl Grid {
    pub fn points(&self) -> Vec<(f64, f64, f64)> {
        let (us, vs, zs) = (axis(self.u), axis(self.v), axis(self.z));
        let mut out = Vec::with_capacity(us.len() * vs.len() * zs.len());
        for &u in &us {
            for &v in &vs {
                for &z in &zs {
                    out.push((u, v, z));
                }
            }
        }
        out
    }
}

/// One grid row: the point and its seven residuals.
pub type GridRow = ((f64, f64, f64), [f64; 7]);

pub fn grid_residuals(q: &AnsatzQuadruple, grid: &Grid) -> Result<Vec<GridRow>> {
    grid.points().into_iter().map(|(u, v, z)| Ok(((u, v, z), pde_residuals(q, u, v, z)?))).collect()
}

/// Column-wise maximum of `|e_k|` over rows.
pub fn max_residuals(rows: &[GridRow]) -> [f64; 7] {
    let mut m = [0.0f64; 7];
    for (_, r) in rows {
        for k in 0..7 {
            m[k] = m[k].max(r[k].abs());
        }
    }
    m
}

/// Builds `X̃`, `P̃` (and `h̃` from the declared target, `M`) as a
/// generalized set with `a = b = 0` and the quadruple's `ρ̃`.
pub fn ansatz_to_fields(q: &AnsatzQuadruple, params: &ModelParams, gp: &GenParams) -> Result<GeneratorSet> {
    let mut gp0 = gp.clone();
    gp0.a.iter_mut().chain(gp0.b.iter_mut()).for_each(|v| *v = 0.0);
    let mut k = DerivedConstants::compute(params, &gp0)?;
    if k.alpha_t == 0.0 || k.beta_t == 0.0 {
        return Err(Error::invalid("the ansatz needs nonzero scaled alpha and beta"));
    }
    k.rho = q.rho;
    let scaling = Scaling::Generalized { alpha_t: k.alpha_t, beta_t: k.beta_t, a: gp.amp_a, b: gp.amp_b };
    let (rx, rp) = (k.beta_t / k.alpha_t, k.alpha_t / k.beta_t);
    let mut set = GeneratorSet::new(Family::Generalized, *params, q.name.clone());
    set.gen_params = Some(gp0);
    set.constants = Some(k);
    for mu in 0..params.n {
        let (f, g) = (q.f.clone(), q.g.clone());
        set.insert(
            GenId::XTilde(mu),
            ScalarField::new("X", move |c| {
                let n = c.len() / 2;
                let (u, v, z) = invariant_jets(c, scaling);
                Ok(&c[mu] * &f(&u, &v, &z)? + &c[n + mu] * &g(&u, &v, &z)? * rx)
            }),
        );
        let (ft, gt) = (q.ft.clone(), q.gt.clone());
        set.insert(
            GenId::PTilde(mu),
            ScalarField::new("P", move |c| {
                let n = c.len() / 2;
                let (u, v, z) = invariant_jets(c, scaling);
                Ok(&c[n + mu] * &ft(&u, &v, &z)? + &c[mu] * &gt(&u, &v, &z)? * rp)
            }),
        );
    }
    let q2 = q.clone();
    set.insert(
        GenId::HTilde,
        ScalarField::new("htilde", move |c| {
            let (u, v, z) = invariant_jets(c, scaling);
            match &q2.target {
                Some(t) => t(&u, &v, &z),
                None => Ok(q2.f.as_ref()(&u, &v, &z)? * q2.ft.as_ref()(&u, &v, &z)?
                    - q2.g.as_ref()(&u, &v, &z)? * q2.gt.as_ref()(&u, &v, &z)?),
            }
        }),
    );
    set.insert_lorentz();
    Ok(set)
}

/// Relation-id prefixes of the brackets the seven equations encode.
pub const ANSATZ_RELATIONS: [&str; 3] = ["XX.", "PP.", "XP."];

/// The `X̃X̃`, `P̃P̃` and `X̃P̃` relations of a set built by [`ansatz_to_fields`].
pub fn ansatz_relations(set: &GeneratorSet) -> Result<Vec<crate::algebra::Relation>> {
    Ok(crate::algebra::relation_set(set)?
        .into_iter()
        .filter(|r| ANSATZ_RELATIONS.iter().any(|p| r.id.starts_with(p)))
        .collect())
}

/// Largest bracket residual of the ansatz relations over a sweep.
pub fn bracket_residual_max(
    q: &AnsatzQuadruple,
    params: &ModelParams,
    spec: &crate::sample::SampleSpec,
    map: &dyn crate::algebra::PointMap,
) -> Result<f64> {
    let set = ansatz_to_fields(q, params, &GenParams::identity(params.n))?;
    let rels = ansatz_relations(&set)?;
    let reports = crate::algebra::check_relations_with(&set, &rels, spec, f64::INFINITY, map)?;
    Ok(reports.iter().map(|r| r.max_abs).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::PhasePoint;
    use crate::realizations::{generalized_generators, yang_special, ProfilePair};
    use alloc::vec;

    #[test]
    fn trijet_matches_differences() {
        let q = AnsatzQuadruple::particular(0.3);
        let (u, v, z) = (0.2, 0.3, -0.25);
        let j = TriJet::eval(&q.f, u, v, z).unwrap();
        let h = 1e-6;
        let at = |u: f64, v: f64, z: f64| TriJet::eval(&q.f, u, v, z).unwrap().value;
        let fd = [
            (at(u + h, v, z) - at(u - h, v, z)) / (2.0 * h),
            (at(u, v + h, z) - at(u, v - h, z)) / (2.0 * h),
            (at(u, v, z + h) - at(u, v, z - h)) / (2.0 * h),
        ];
        for (a, b) in [j.du, j.dv, j.dz].iter().zip(fd) {
            assert!((a - b).abs() <= 1e-7 * b.abs().max(1e-3));
        }
    }

    #[test]
    fn special_first_equation_by_hand() {
        // f² = 1 − u + z² gives −2f ∂f/∂u = 1
        let r = pde_residuals(&AnsatzQuadruple::special(), 0.3, 0.1, 0.2).unwrap();
        assert!(r[0].abs() < 1e-15);
    }

    #[test]
    fn grid_shape() {
        assert_eq!(Grid::default().points().len(), 9 * 9 * 21);
    }

    #[test]
    fn canonical_quadruple_fields() {
        let q = AnsatzQuadruple {
            name: "unit".into(),
            f: tri(|u, _, _| Ok(u.constant_like(1.0))),
            g: zero(),
            ft: tri(|u, _, _| Ok(u.constant_like(1.0))),
            gt: zero(),
            target: None,
            rho: 0.0,
        };
        let set = ansatz_to_fields(&q, &ModelParams::default(), &GenParams::identity(4)).unwrap();
        let p = PhasePoint::new(vec![0.3, -0.2, 0.5, 0.1], vec![0.7, 0.4, -0.6, 0.2]).unwrap();
        for mu in 0..4 {
            assert_eq!(set.get(GenId::XTilde(mu)).unwrap().eval(&p).unwrap(), p.x[mu]);
            assert_eq!(set.get(GenId::PTilde(mu)).unwrap().eval(&p).unwrap(), p.p[mu]);
        }
    }

    #[test]
    fn composed_matches_generator_route() {
        let params = ModelParams { alpha: 0.3, beta: 0.2, ..Default::default() };
        let gp = GenParams { phi: 0.2, psi: 0.1, ..GenParams::identity(4) };
        let base = yang_special(&params, &ProfilePair::phi2_zero(crate::phase::Sign::Plus)).unwrap();
        let direct = generalized_generators(&params, &gp, &base).unwrap();
        let q = AnsatzQuadruple::composed(1.0, 1.0, 0.2, 0.1, GtAngle::Psi);
        let via = ansatz_to_fields(&q, &params, &gp).unwrap();
        let p = PhasePoint::new(vec![0.3, -0.2, 0.5, 0.1], vec![0.7, 0.4, -0.6, 0.2]).unwrap();
        for id in [GenId::XTilde(0), GenId::XTilde(3), GenId::PTilde(1), GenId::PTilde(2), GenId::HTilde] {
            let a = direct.get(id).unwrap().eval(&p).unwrap();
            let b = via.get(id).unwrap().eval(&p).unwrap();
            assert!((a - b).abs() < 1e-14, "{id}");
        }
    }

    fn worst_on_grid(q: &AnsatzQuadruple) -> f64 {
        let rows = grid_residuals(q, &Grid::default()).unwrap();
        max_residuals(&rows).iter().cloned().fold(0.0, f64::max)
    }

    #[test]
    fn shipped_quadruples_solve_the_system() {
        for q in AnsatzQuadruple::shipped() {
            assert!(worst_on_grid(&q) < 1e-12, "{}", q.name);
        }
    }

    #[test]
    fn printed_angle_variant_fails() {
        let q = AnsatzQuadruple::composed(1.0, 1.0, 0.2, 0.1, GtAngle::Phi);
        assert!(worst_on_grid(&q) > 1e-3);
    }

    #[test]
    fn unequal_amplitudes_leave_the_system() {
        let q = AnsatzQuadruple::composed(1.3, 0.8, 0.2, 0.1, GtAngle::Psi);
        assert!(worst_on_grid(&q) > 1e-3);
    }

    #[test]
    fn particular_target_is_the_product() {
        let q = AnsatzQuadruple::particular(0.3);
        let r = pde_residuals(&q, 0.1, 0.4, -0.3).unwrap();
        assert!(r[2].abs() < 1e-15);
    }

    fn sweep_brackets(q: &AnsatzQuadruple) -> f64 {
        let params = ModelParams { alpha: 0.4, beta: 0.5, ..Default::default() };
        let spec = crate::sample::SampleSpec { count: 200, seed: 3, ..Default::default() };
        let set = ansatz_to_fields(q, &params, &GenParams::identity(4)).unwrap();
        assert_eq!(ansatz_relations(&set).unwrap().len(), 6 + 6 + 16);
        bracket_residual_max(q, &params, &spec, &crate::algebra::Serial).unwrap()
    }

    #[test]
    fn solutions_close_the_brackets() {
        for q in AnsatzQuadruple::shipped() {
            assert!(sweep_brackets(&q) < 1e-12, "{}", q.name);
        }
    }

    #[test]
    fn residual_sizes_track_each_other() {
        // a perturbed quadruple breaks both the equations and the brackets
        for kappa in [1e-2, 1e-4] {
            let q = AnsatzQuadruple::special().perturbed(kappa);
            let pde = worst_on_grid(&q);
            let br = sweep_brackets(&q);
            assert!(pde > 0.1 * kappa && br > 0.01 * kappa, "{pde} {br}");
            assert!(br < 100.0 * pde && pde < 100.0 * br, "{pde} {br}");
        }
    }
}
