//! Relation sets and randomized residual sweeps.
//!
//! A [`Relation`] states `{lhs.0, lhs.1} = Σ cᵢ gᵢ + c₀` over generator ids.
//! Sweeps draw seeded points inside a set's guards, evaluate every generator
//! once per point and compare brackets with right-hand sides.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::bracket::{contract_gradients, jacobi_from_jets};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::phase::{metric_sign, PhasePoint};
use crate::realizations::{DerivedConstants, Family, GenId, GenParams, GeneratorSet};
use crate::sample::{SampleSpec, Sampler};

/// Default pass threshold of the analytic-jet sweeps.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Largest tolerated fraction of evaluation-time rejections.
pub const MAX_REJECT_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub id: String,
    pub lhs: (GenId, GenId),
    pub rhs: Vec<(f64, GenId)>,
    pub constant: f64,
}

impl Relation {
    fn new(id: String, lhs: (GenId, GenId)) -> Self {
        Relation { id, lhs, rhs: Vec::new(), constant: 0.0 }
    }

    /// Adds `k · id`, merging repeated ids and dropping zeros.
    fn add(&mut self, k: f64, id: GenId) {
        if k == 0.0 {
            return;
        }
        match self.rhs.iter_mut().find(|(_, g)| *g == id) {
            Some(slot) => slot.0 += k,
            None => self.rhs.push((k, id)),
        }
        self.rhs.retain(|(c, _)| *c != 0.0);
    }

    /// Adds `k · M_{μν}` for any index order.
    fn add_m(&mut self, k: f64, mu: usize, nu: usize) {
        if let Some((s, id)) = GenId::lorentz(mu, nu) {
            self.add(k * s, id);
        }
    }

    /// Every generator the relation mentions.
    pub fn generators(&self) -> impl Iterator<Item = GenId> + '_ {
        [self.lhs.0, self.lhs.1].into_iter().chain(self.rhs.iter().map(|(_, g)| *g))
    }
}

fn eta(mu: usize, nu: usize) -> f64 {
    if mu == nu {
        metric_sign(mu)
    } else {
        0.0
    }
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for mu in 0..n {
        for nu in mu + 1..n {
            v.push((mu, nu));
        }
    }
    v
}

/// `{M_{μν}, M_{ρσ}} = η_{μρ}M_{νσ} − η_{νρ}M_{μσ} − η_{μσ}M_{νρ} + η_{νσ}M_{μρ}`.
fn lorentz_relations(n: usize, out: &mut Vec<Relation>) {
    for &(m, v) in &pairs(n) {
        for &(r, s) in &pairs(n) {
            let mut rel = Relation::new(format!("lorentz.{m}.{v}.{r}.{s}"), (GenId::M(m, v), GenId::M(r, s)));
            rel.add_m(eta(m, r), v, s);
            rel.add_m(-eta(v, r), m, s);
            rel.add_m(-eta(m, s), v, r);
            rel.add_m(eta(v, s), m, r);
            out.push(rel);
        }
    }
}

/// `{M_{μν}, V_λ} = η_{μλ}V_ν − η_{νλ}V_μ + k(w_μ M_{λν} − w_ν M_{λμ})`.
fn lorentz_action(n: usize, family: &str, v: fn(usize) -> GenId, k: f64, w: &[f64], out: &mut Vec<Relation>) {
    for &(m, nu) in &pairs(n) {
        for l in 0..n {
            let mut rel = Relation::new(format!("{family}.{m}.{nu}.{l}"), (GenId::M(m, nu), v(l)));
            rel.add(eta(m, l), v(nu));
            rel.add(-eta(nu, l), v(m));
            if !w.is_empty() {
                rel.add_m(k * w[m], l, nu);
                rel.add_m(-k * w[nu], l, m);
            }
            out.push(rel);
        }
    }
}

/// Yang relations with sign factors: Lorentz algebra and actions,
/// `{x̂,x̂} = ε₁β²M`, `{p̂,p̂} = ε₂α²M`, `{x̂_μ,p̂_ν} = η_{μν}h`,
/// `{h,x̂} = ε₁β²p̂`, `{h,p̂} = −ε₂α²x̂`, `{M,h} = 0`.
pub fn yang_relations(set: &GeneratorSet) -> Vec<Relation> {
    let p = set.params;
    let n = p.n;
    let (a2, b2) = (p.alpha * p.alpha, p.beta * p.beta);
    let (e1, e2) = (p.eps1(), p.eps2());
    let mut out = Vec::new();
    lorentz_relations(n, &mut out);
    lorentz_action(n, "lorentz_x", GenId::XHat, 0.0, &[], &mut out);
    lorentz_action(n, "lorentz_p", GenId::PHat, 0.0, &[], &mut out);
    for &(m, v) in &pairs(n) {
        let mut rel = Relation::new(format!("xx.{m}.{v}"), (GenId::XHat(m), GenId::XHat(v)));
        rel.add_m(e1 * b2, m, v);
        out.push(rel);
    }
    for &(m, v) in &pairs(n) {
        let mut rel = Relation::new(format!("pp.{m}.{v}"), (GenId::PHat(m), GenId::PHat(v)));
        rel.add_m(e2 * a2, m, v);
        out.push(rel);
    }
    for m in 0..n {
        for v in 0..n {
            let mut rel = Relation::new(format!("xp.{m}.{v}"), (GenId::XHat(m), GenId::PHat(v)));
            rel.add(eta(m, v), GenId::H);
            out.push(rel);
        }
    }
    for m in 0..n {
        let mut rel = Relation::new(format!("h_x.{m}"), (GenId::H, GenId::XHat(m)));
        rel.add(e1 * b2, GenId::PHat(m));
        out.push(rel);
    }
    for m in 0..n {
        let mut rel = Relation::new(format!("h_p.{m}"), (GenId::H, GenId::PHat(m)));
        rel.add(-e2 * a2, GenId::XHat(m));
        out.push(rel);
    }
    for &(m, v) in &pairs(n) {
        out.push(Relation::new(format!("lorentz_h.{m}.{v}"), (GenId::M(m, v), GenId::H)));
    }
    out
}

/// Relations of `X̃`, `P̃`, `M`, `h̃` with constants `Ã`, `B̃`, `ρ̃`.
pub fn generalized_relations(set: &GeneratorSet, gp: &GenParams, k: &DerivedConstants) -> Vec<Relation> {
    let p = set.params;
    let n = p.n;
    let (al, be) = (p.alpha, p.beta);
    let (a, b) = (&gp.a, &gp.b);
    let r = al * be * gp.amp_a * gp.amp_b * k.rho;
    let mut out = Vec::new();
    for &(m, v) in &pairs(n) {
        let mut rel = Relation::new(format!("XX.{m}.{v}"), (GenId::XTilde(m), GenId::XTilde(v)));
        rel.add_m(be * be * k.a_t, m, v);
        rel.add(be * a[m], GenId::XTilde(v));
        rel.add(-be * a[v], GenId::XTilde(m));
        out.push(rel);
    }
    for &(m, v) in &pairs(n) {
        let mut rel = Relation::new(format!("PP.{m}.{v}"), (GenId::PTilde(m), GenId::PTilde(v)));
        rel.add_m(al * al * k.b_t, m, v);
        rel.add(al * b[m], GenId::PTilde(v));
        rel.add(-al * b[v], GenId::PTilde(m));
        out.push(rel);
    }
    for m in 0..n {
        for v in 0..n {
            let mut rel = Relation::new(format!("XP.{m}.{v}"), (GenId::XTilde(m), GenId::PTilde(v)));
            rel.add(eta(m, v), GenId::HTilde);
            rel.add(al * b[m], GenId::XTilde(v));
            rel.add(-be * a[v], GenId::PTilde(m));
            rel.add_m(r, m, v);
            out.push(rel);
        }
    }
    lorentz_action(n, "M_X", GenId::XTilde, be, a, &mut out);
    lorentz_action(n, "M_P", GenId::PTilde, al, b, &mut out);
    for &(m, v) in &pairs(n) {
        let mut rel = Relation::new(format!("M_h.{m}.{v}"), (GenId::M(m, v), GenId::HTilde));
        rel.add(al * b[v], GenId::XTilde(m));
        rel.add(-al * b[m], GenId::XTilde(v));
        rel.add(-be * a[v], GenId::PTilde(m));
        rel.add(be * a[m], GenId::PTilde(v));
        out.push(rel);
    }
    for m in 0..n {
        let mut rel = Relation::new(format!("h_X.{m}"), (GenId::HTilde, GenId::XTilde(m)));
        rel.add(be * be * k.a_t, GenId::PTilde(m));
        rel.add(-r, GenId::XTilde(m));
        rel.add(-be * a[m], GenId::HTilde);
        out.push(rel);
    }
    for m in 0..n {
        let mut rel = Relation::new(format!("h_P.{m}"), (GenId::HTilde, GenId::PTilde(m)));
        rel.add(-al * al * k.b_t, GenId::XTilde(m));
        rel.add(r, GenId::PTilde(m));
        rel.add(-al * b[m], GenId::HTilde);
        out.push(rel);
    }
    out
}

/// `{x̂,x̂} = β²M`, `{p̂,p̂} = 0` and the Lorentz algebra and actions.
pub fn snyder_relations(set: &GeneratorSet) -> Vec<Relation> {
    let n = set.params.n;
    let b2 = set.params.beta * set.params.beta;
    let mut out = Vec::new();
    lorentz_relations(n, &mut out);
    lorentz_action(n, "lorentz_x", GenId::XHat, 0.0, &[], &mut out);
    lorentz_action(n, "lorentz_p", GenId::PHat, 0.0, &[], &mut out);
    for &(m, v) in &pairs(n) {
        let mut rel = Relation::new(format!("xx.{m}.{v}"), (GenId::XHat(m), GenId::XHat(v)));
        rel.add_m(b2, m, v);
        out.push(rel);
    }
    for &(m, v) in &pairs(n) {
        out.push(Relation::new(format!("pp.{m}.{v}"), (GenId::PHat(m), GenId::PHat(v))));
    }
    out
}

/// The relation set matching a generator set's family.
pub fn relation_set(set: &GeneratorSet) -> Result<Vec<Relation>> {
    match set.family {
        Family::Yang => Ok(yang_relations(set)),
        Family::Snyder => Ok(snyder_relations(set)),
        Family::Generalized => {
            let gp = set.gen_params.as_ref().ok_or_else(|| Error::invalid("generalized set without parameters"))?;
            let k = set.constants.as_ref().ok_or_else(|| Error::invalid("generalized set without constants"))?;
            Ok(generalized_relations(set, gp, k))
        }
    }
}

/// Expected relation counts `(yang, generalized, snyder)` in dimension `n`.
pub fn expected_counts(n: usize) -> (usize, usize, usize) {
    let m = n * (n - 1) / 2;
    let yang = m * m + 2 * m * n + 2 * m + n * n + 2 * n + m;
    let gen = 2 * m + n * n + 2 * m * n + m + 2 * n;
    let snyder = m * m + 2 * m * n + 2 * m;
    (yang, gen, snyder)
}

/// Model parameters echoed into reports.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamsEcho {
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
    pub profile: String,
    pub gen: Option<GenParams>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub model: String,
    pub case: String,
    pub relation: String,
    pub samples: usize,
    pub max_abs: f64,
    pub mean_abs: f64,
    pub tol: f64,
    pub pass: bool,
    /// Points dropped because evaluation left a domain.
    pub rejects: u64,
    /// Jets came from finite differences of a flow.
    pub fd_jets: bool,
    pub params: ParamsEcho,
}

impl ResidualReport {
    /// Builds a report; passes iff `max_abs < tol` and rejections stay
    /// within [`MAX_REJECT_FRACTION`].
    pub fn from_stats(set_label: (&str, &str), relation: &str, stats: &SweepStats, k: usize, tol: f64, echo: ParamsEcho) -> Self {
        let (max_abs, mean_abs) = stats.column(k);
        let total = stats.samples as f64 + stats.rejects as f64;
        let ok_rejects = total == 0.0 || (stats.rejects as f64) <= MAX_REJECT_FRACTION * total;
        ResidualReport {
            model: set_label.0.into(),
            case: set_label.1.into(),
            relation: relation.into(),
            samples: stats.samples,
            max_abs,
            mean_abs,
            tol,
            pass: max_abs < tol && ok_rejects && stats.samples > 0,
            rejects: stats.rejects,
            fd_jets: false,
            params: echo,
        }
    }
}

pub fn echo(set: &GeneratorSet) -> ParamsEcho {
    ParamsEcho {
        alpha: set.params.alpha,
        beta: set.params.beta,
        n: set.params.n,
        profile: set.profile.clone(),
        gen: set.gen_params.clone(),
    }
}

/// Outcome of one point's evaluation: residual columns or an error.
pub type PointOutcome = Result<Vec<f64>>;

/// Evaluates a per-point job over a batch; implementations may run in
/// parallel but must return results in input order.
pub trait PointMap: Sync {
    fn map(&self, pts: &[PhasePoint], f: &(dyn Fn(&PhasePoint) -> PointOutcome + Sync)) -> Vec<PointOutcome>;
}

/// In-order sequential evaluation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Serial;

impl PointMap for Serial {
    fn map(&self, pts: &[PhasePoint], f: &(dyn Fn(&PhasePoint) -> PointOutcome + Sync)) -> Vec<PointOutcome> {
        pts.iter().map(f).collect()
    }
}

/// Column-wise max and sum of absolute residuals over accepted points.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepStats {
    pub max: Vec<f64>,
    pub sum: Vec<f64>,
    pub samples: usize,
    pub rejects: u64,
}

impl SweepStats {
    pub fn new(width: usize) -> Self {
        SweepStats { max: vec![0.0; width], sum: vec![0.0; width], samples: 0, rejects: 0 }
    }

    fn push(&mut self, row: &[f64]) {
        for (k, r) in row.iter().enumerate() {
            let a = r.abs();
            // NaN must not hide behind max
            self.max[k] = if a.is_nan() || self.max[k].is_nan() { f64::NAN } else { self.max[k].max(a) };
            self.sum[k] += a;
        }
        self.samples += 1;
    }

    /// `(max, mean)` of column `k`.
    pub fn column(&self, k: usize) -> (f64, f64) {
        let mean = if self.samples == 0 { 0.0 } else { self.sum[k] / self.samples as f64 };
        (self.max[k], mean)
    }

    /// Associative merge of two disjoint sweeps.
    pub fn merge(&mut self, other: &SweepStats) {
        for k in 0..self.max.len() {
            self.max[k] = self.max[k].max(other.max[k]);
            self.sum[k] += other.sum[k];
        }
        self.samples += other.samples;
        self.rejects += other.rejects;
    }
}

/// Draws `spec.count` accepted points in batches, evaluates `f` on each and
/// aggregates. Points whose evaluation raises a domain error are counted
/// and replaced by fresh draws; the sweep gives up once rejections exceed
/// the sample count. Results do not depend on how `map` schedules work.
pub fn sweep(
    spec: &SampleSpec,
    n: usize,
    guards: &[crate::field::ScalarField],
    width: usize,
    map: &dyn PointMap,
    f: &(dyn Fn(&PhasePoint) -> PointOutcome + Sync),
) -> Result<SweepStats> {
    let mut sampler = Sampler::new(spec, n, guards)?;
    let mut stats = SweepStats::new(width);
    while stats.samples < spec.count && stats.rejects <= spec.count as u64 {
        let need = spec.count - stats.samples;
        let batch: Vec<PhasePoint> = (0..need).map(|_| sampler.next_point()).collect::<Result<_>>()?;
        for out in map.map(&batch, f) {
            match out {
                Ok(row) if stats.samples < spec.count => stats.push(&row),
                Ok(_) => {}
                Err(e) if e.is_domain() => stats.rejects += 1,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(stats)
}

/// Depth-1 jets of every generator of `set` at `pt`.
pub fn generator_jets(set: &GeneratorSet, pt: &PhasePoint, depth: usize) -> Result<BTreeMap<GenId, Jet>> {
    let coords = pt.seed(depth);
    set.fields().iter().map(|(id, f)| Ok((*id, f.eval_at(&coords)?))).collect()
}

/// Residual `|{A,B} − Σ cᵢgᵢ − c₀|` of each relation at one point.
pub fn relation_residuals(set: &GeneratorSet, rels: &[Relation], pt: &PhasePoint) -> Result<Vec<f64>> {
    let jets = generator_jets(set, pt, 1)?;
    let grads: BTreeMap<GenId, Vec<f64>> = jets.iter().map(|(k, j)| (*k, j.gradient())).collect();
    rels.iter()
        .map(|rel| {
            let lhs = contract_gradients(&grads[&rel.lhs.0], &grads[&rel.lhs.1]);
            let rhs: f64 = rel.rhs.iter().map(|(c, g)| c * jets[g].real()).sum::<f64>() + rel.constant;
            Ok((lhs - rhs).abs())
        })
        .collect()
}

fn check_ids(set: &GeneratorSet, rels: &[Relation]) -> Result<()> {
    for rel in rels {
        for id in rel.generators() {
            set.get(id)?;
        }
    }
    Ok(())
}

/// One report per relation; sequential.
pub fn check_relations(set: &GeneratorSet, rels: &[Relation], spec: &SampleSpec, tol: f64) -> Result<Vec<ResidualReport>> {
    check_relations_with(set, rels, spec, tol, &Serial)
}

pub fn check_relations_with(
    set: &GeneratorSet,
    rels: &[Relation],
    spec: &SampleSpec,
    tol: f64,
    map: &dyn PointMap,
) -> Result<Vec<ResidualReport>> {
    check_ids(set, rels)?;
    let f = |pt: &PhasePoint| relation_residuals(set, rels, pt);
    let stats = sweep(spec, set.params.n, set.guards(), rels.len(), map, &f)?;
    let label = (set.family.label(), set.params.case.label());
    let e = echo(set);
    Ok(rels
        .iter()
        .enumerate()
        .map(|(k, rel)| {
            let mut r = ResidualReport::from_stats(label, &rel.id, &stats, k, tol, e.clone());
            r.fd_jets = set.fd_jets;
            r
        })
        .collect())
}

/// Generator ids entering the Jacobi suite: `x̂`, `p̂`, `h` and, when
/// present, `X̃`, `P̃`, `h̃`.
pub fn jacobi_ids(set: &GeneratorSet) -> Vec<GenId> {
    set.ids().into_iter().filter(|id| !matches!(id, GenId::M(..))).collect()
}

/// Maximum Jacobi residual over all triples of distinct generators, with
/// nested brackets from depth-2 jets.
pub fn jacobi_suite(set: &GeneratorSet, spec: &SampleSpec, tol: f64, map: &dyn PointMap) -> Result<ResidualReport> {
    let ids = jacobi_ids(set);
    let f = |pt: &PhasePoint| -> PointOutcome {
        let jets = generator_jets(set, pt, 2)?;
        let js: Vec<&Jet> = ids.iter().map(|id| &jets[id]).collect();
        let mut worst = 0.0f64;
        for i in 0..js.len() {
            for j in i + 1..js.len() {
                for k in j + 1..js.len() {
                    worst = worst.max(jacobi_from_jets(js[i], js[j], js[k]));
                }
            }
        }
        Ok(vec![worst])
    };
    let stats = sweep(spec, set.params.n, set.guards(), 1, map, &f)?;
    let label = (set.family.label(), set.params.case.label());
    let mut r = ResidualReport::from_stats(label, "jacobi", &stats, 0, tol, echo(set));
    r.fd_jets = set.fd_jets;
    Ok(r)
}

/// Worst report of a list, `None` when empty.
pub fn worst(reports: &[ResidualReport]) -> Option<&ResidualReport> {
    reports.iter().max_by(|a, b| a.max_abs.partial_cmp(&b.max_abs).unwrap_or(core::cmp::Ordering::Greater))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::{ModelCase, ModelParams, Sign};
    use crate::realizations::{canonical_set, generalized_generators, yang_special, ProfilePair};

    fn small() -> SampleSpec {
        SampleSpec { count: 40, seed: 7, ..Default::default() }
    }

    #[test]
    fn relation_counts() {
        let set = yang_special(&ModelParams::default(), &ProfilePair::phi2_zero(Sign::Plus)).unwrap();
        let (y, g, s) = expected_counts(4);
        assert_eq!((y, g, s), (126, 90, 96));
        assert_eq!(yang_relations(&set).len(), y);
        let gp = GenParams::identity(4);
        let gs = generalized_generators(&set.params, &gp, &set).unwrap();
        assert_eq!(relation_set(&gs).unwrap().len(), g);
    }

    #[test]
    fn yang_contains_xp_h() {
        let set = canonical_set(ModelParams::default());
        let rels = yang_relations(&set);
        let r = rels.iter().find(|r| r.id == "xp.1.1").unwrap();
        assert_eq!(r.rhs, vec![(1.0, GenId::H)]);
        let r = rels.iter().find(|r| r.id == "xp.0.1").unwrap();
        assert!(r.rhs.is_empty());
    }

    #[test]
    fn generalized_xp_has_rho_term() {
        let params = ModelParams::default();
        let base = yang_special(&params, &ProfilePair::phi2_zero(Sign::Plus)).unwrap();
        let gp = GenParams { phi: 0.2, psi: 0.1, ..GenParams::identity(4) };
        let set = generalized_generators(&params, &gp, &base).unwrap();
        let k = set.constants.unwrap();
        let rels = relation_set(&set).unwrap();
        let r = rels.iter().find(|r| r.id == "XP.1.2").unwrap();
        assert_eq!(r.rhs.len(), 1);
        assert_eq!(r.rhs[0].1, GenId::M(1, 2));
        assert!((r.rhs[0].0 - 0.01 * k.rho).abs() < 1e-18);
        // a = 0 leaves the pure vector action
        let r = rels.iter().find(|r| r.id == "M_X.0.1.1").unwrap();
        assert_eq!(r.rhs, vec![(-1.0, GenId::XTilde(0))]);
    }

    #[test]
    fn canonical_set_passes() {
        let params = ModelParams { alpha: 0.0, beta: 0.0, ..Default::default() };
        let set = canonical_set(params);
        let reports = check_relations(&set, &yang_relations(&set), &small(), 1e-14).unwrap();
        assert!(reports.iter().all(|r| r.pass && r.max_abs == 0.0), "{:?}", worst(&reports));
        let j = jacobi_suite(&set, &small(), 1e-14, &Serial).unwrap();
        assert_eq!(j.max_abs, 0.0);
    }

    #[test]
    fn yang_sweep_all_cases() {
        for case in ModelCase::ALL {
            let params = ModelParams { alpha: 0.3, beta: 0.2, case, n: 4 };
            let set = yang_special(&params, &ProfilePair::half(case.sigma())).unwrap();
            let reports = check_relations(&set, &relation_set(&set).unwrap(), &small(), 1e-12).unwrap();
            let w = worst(&reports).unwrap();
            assert!(reports.iter().all(|r| r.pass), "{case}: {w:?}");
        }
    }

    fn shifted_params() -> GenParams {
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
    fn generalized_sweep_all_cases() {
        for case in ModelCase::ALL {
            let params = ModelParams { alpha: 0.3, beta: 0.2, case, n: 4 };
            let base = yang_special(&params, &ProfilePair::phi2_zero(case.sigma())).unwrap();
            let set = generalized_generators(&params, &shifted_params(), &base).unwrap();
            let reports = check_relations(&set, &relation_set(&set).unwrap(), &small(), 1e-12).unwrap();
            assert!(reports.iter().all(|r| r.pass), "{case}: {:?}", worst(&reports));
        }
    }

    #[test]
    fn born_dual_sweep_all_cases() {
        use crate::realizations::{born_dual, DualMode};
        for case in ModelCase::ALL {
            let params = ModelParams { alpha: 0.3, beta: 0.2, case, n: 4 };
            let base = yang_special(&params, &ProfilePair::phi2_zero(case.sigma())).unwrap();
            let set = generalized_generators(&params, &shifted_params(), &base).unwrap();
            let dual = born_dual(&set, DualMode::All).unwrap();
            let reports = check_relations(&dual, &relation_set(&dual).unwrap(), &small(), 1e-12).unwrap();
            assert!(reports.iter().all(|r| r.pass), "{case}: {:?}", worst(&reports));
            let mut yang = dual.clone();
            yang.family = Family::Yang;
            let reports = check_relations(&yang, &yang_relations(&yang), &small(), 1e-12).unwrap();
            assert!(reports.iter().all(|r| r.pass), "{case}: {:?}", worst(&reports));
            let spatial = born_dual(&set, DualMode::Spatial).unwrap();
            let reports = check_relations(&spatial, &relation_set(&spatial).unwrap(), &small(), 1e-12).unwrap();
            assert!(reports.iter().any(|r| !r.pass));
        }
    }

    #[test]
    fn wrong_rhs_fails() {
        let set = yang_special(&ModelParams::default(), &ProfilePair::phi2_zero(Sign::Plus)).unwrap();
        let mut rels = yang_relations(&set);
        for r in rels.iter_mut().filter(|r| r.id.starts_with("h_p")) {
            for t in r.rhs.iter_mut() {
                t.0 = -t.0;
            }
        }
        let reports = check_relations(&set, &rels, &small(), 1e-8).unwrap();
        assert!(reports.iter().filter(|r| r.relation.starts_with("h_p")).all(|r| !r.pass));
    }

    #[test]
    fn missing_generator() {
        let set = canonical_set(ModelParams::default());
        let rel = Relation::new("x".into(), (GenId::HTilde, GenId::H));
        assert!(matches!(check_relations(&set, &[rel], &small(), 1e-8), Err(Error::MissingGenerator(GenId::HTilde))));
    }

    #[test]
    fn merge_is_associative() {
        let mut a = SweepStats::new(1);
        a.push(&[1.0]);
        let mut b = SweepStats::new(1);
        b.push(&[3.0]);
        b.push(&[-2.0]);
        a.merge(&b);
        assert_eq!(a.column(0), (3.0, 2.0));
        assert_eq!(a.samples, 3);
    }
}
