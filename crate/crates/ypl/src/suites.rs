//! Verification suites. Each suite maps a validated [`RunConfig`] to a
//! [`SuiteOutcome`]; library errors are recorded in the outcome and the
//! suite carries on with its remaining checks.

use std::f64::consts::TAU;
use std::fmt::Display;

use rayon::prelude::*;
use ypl_core::algebra::{
    check_relations_with, echo, jacobi_suite, relation_set, sweep, yang_relations, PointMap, PointOutcome, ResidualReport,
};
use ypl_core::ansatz::{bracket_residual_max, grid_residuals, max_residuals, AnsatzQuadruple, Grid};
use ypl_core::bracket::FlowSpec;
use ypl_core::dynamics::{measure_period, oscillator_set, scan_row, simulate, strict_trend, ScanSpec, Trend};
use ypl_core::flows::{
    angle_additivity, automorphism_pushforward, bch_order_test, g_closed, g_series, g_series_term, g_taylor_coefficients,
    induction_check, invariant_generator, og_check, rotation_check,
};
use ypl_core::realizations::{
    born_dual, generalized_generators, snyder_realization, universal_h, yang_special, DualMode, GenId, GenParams, GeneratorSet,
    ProfilePair,
};
use ypl_core::sample::{draw_gen_params, sample_points, SampleSpec};
use ypl_core::{ModelCase, ModelParams, PhasePoint, Sign};

use crate::config::RunConfig;
use crate::report::{CheckEntry, ResidualEntry, ScanRowJson, SuiteOutcome};

/// Profiles compared in the universal-`h` check.
pub const UNIVERSAL_H_PROFILES: [&str; 3] = ["phi2_zero", "phi1_zero", "half"];
/// `|g_closed − g_series(8)|` bound for `|z| ≤ 0.3` at `αβ = 1`.
pub const G_SERIES_TOL: f64 = 1e-12;
pub const G_SERIES_ORDER: usize = 8;
pub const G_TAYLOR_TOL: f64 = 1e-10;
/// Rounding allowance of the remainder-bound check.
pub const G_ROUNDING: f64 = 1e-15;
/// `M_{01}` before and after the automorphism.
pub const M_INVARIANCE_TOL: f64 = 1e-8;
/// Largest accepted ratio between PDE and bracket residuals of a perturbed quadruple.
pub const EQUIVALENCE_RATIO: f64 = 100.0;
pub const EQUIVALENCE_KAPPAS: [f64; 2] = [1e-2, 1e-4];
/// `(α, β)` of the equivalence sweep; small deformations hide the bracket residual.
pub const EQUIVALENCE_PARAMS: (f64, f64) = (0.4, 0.5);
pub const CANONICAL_PERIOD_TOL: f64 = 1e-6;
/// `max |x_1(t) − a₀cos ωt|` at `α = β = 0`.
pub const UNDEFORMED_TOL: f64 = 1e-9;
pub const ENERGY_DRIFT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Suite {
    Algebra,
    Jacobi,
    Pde,
    Flows,
    Born,
    Snyder,
    Dynamics,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] =
        [Suite::Algebra, Suite::Jacobi, Suite::Pde, Suite::Flows, Suite::Born, Suite::Snyder, Suite::Dynamics];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Jacobi => "jacobi",
            Suite::Pde => "pde",
            Suite::Flows => "flows",
            Suite::Born => "born",
            Suite::Snyder => "snyder",
            Suite::Dynamics => "dynamics",
            Suite::All => "all",
        }
    }

    pub fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => Suite::EACH.to_vec(),
            s => vec![s],
        }
    }

    pub fn run(self, cfg: &RunConfig, map: &dyn PointMap) -> SuiteOutcome {
        let mut out = SuiteOutcome::default();
        for s in self.expand() {
            out.extend(match s {
                Suite::Algebra => algebra(cfg, map),
                Suite::Jacobi => jacobi(cfg, map),
                Suite::Pde => pde(cfg, map),
                Suite::Flows => flows(cfg, map),
                Suite::Born => born(cfg, map),
                Suite::Snyder => snyder(cfg, map),
                Suite::Dynamics => dynamics(cfg),
                Suite::All => unreachable!(),
            });
        }
        out
    }

    /// Notes about how the configuration is adapted for this suite.
    pub fn warnings(self, cfg: &RunConfig) -> Vec<String> {
        let mut w = Vec::new();
        let case = cfg.case().ok();
        if self.expand().contains(&Suite::Flows) && case.is_some_and(|c| c != ModelCase::PP) {
            w.push(format!("flows: rotation, G and BCH checks are defined for case pp; running them at pp instead of {}", cfg.model.case));
        }
        if self.expand().contains(&Suite::Snyder) {
            w.push("snyder: the Snyder realization runs at alpha = 0".into());
        }
        w
    }
}

struct Collector {
    suite: &'static str,
    out: SuiteOutcome,
}

impl Collector {
    fn new(suite: &'static str) -> Self {
        Collector { suite, out: SuiteOutcome::default() }
    }

    fn error(&mut self, what: &str, e: impl Display) {
        self.out.errors.push(format!("{}: {what}: {e}", self.suite));
    }

    fn report(&mut self, what: &str, r: ypl_core::Result<ResidualReport>) {
        self.reports(what, r.map(|r| vec![r]));
    }

    fn reports(&mut self, what: &str, r: ypl_core::Result<Vec<ResidualReport>>) {
        match r {
            Ok(rs) => self.out.residuals.extend(rs.iter().map(|r| ResidualEntry::from_report(self.suite, r))),
            Err(e) => self.error(what, e),
        }
    }

    fn check(&mut self, c: CheckEntry) {
        self.out.checks.push(c);
    }
}

fn rename(mut rs: Vec<ResidualReport>, f: impl Fn(&str) -> String) -> Vec<ResidualReport> {
    for r in &mut rs {
        r.relation = f(&r.relation);
    }
    rs
}

/// Sets built from the configured case and preset.
fn yang_set(cfg: &RunConfig) -> Result<GeneratorSet, String> {
    let params = cfg.model_params().map_err(|e| e.to_string())?;
    let profile = cfg.profile().map_err(|e| e.to_string())?;
    yang_special(&params, &profile).map_err(|e| e.to_string())
}

pub fn generalized_set(params: &ModelParams, profile: &str, gp: &GenParams) -> ypl_core::Result<GeneratorSet> {
    let base = yang_special(params, &ProfilePair::preset(profile, params.case.sigma())?)?;
    generalized_generators(params, gp, &base)
}

/// The configured `(case, GenParams)` followed by `gen.draws` seeded draws
/// in each of the four cases, all from one stream.
pub fn generalized_configs(cfg: &RunConfig) -> Result<Vec<(ModelParams, GenParams)>, String> {
    let params = cfg.model_params().map_err(|e| e.to_string())?;
    let gp = cfg.gen_params().map_err(|e| e.to_string())?;
    let mut out = vec![(params, gp)];
    let draws = draw_gen_params(&cfg.gen_draw(), params.n, 4 * cfg.gen.draws, cfg.sample.seed);
    for (k, case) in ModelCase::ALL.into_iter().enumerate() {
        for g in &draws[k * cfg.gen.draws..(k + 1) * cfg.gen.draws] {
            out.push((ModelParams { case, ..params }, g.clone()));
        }
    }
    Ok(out)
}

/// `|h − h_universal|` over a sweep of the set built from `profile`.
pub fn universal_h_check(
    params: &ModelParams,
    profile: &ProfilePair,
    spec: &SampleSpec,
    tol: f64,
    map: &dyn PointMap,
) -> ypl_core::Result<ResidualReport> {
    let set = yang_special(params, profile)?;
    let h = set.get(GenId::H)?.clone();
    let hu = universal_h(params, &set)?;
    let f = |pt: &PhasePoint| -> PointOutcome { Ok(vec![(h.eval(pt)? - hu.eval(pt)?).abs()]) };
    let stats = sweep(spec, params.n, set.guards(), 1, map, &f)?;
    Ok(ResidualReport::from_stats((set.family.label(), params.case.label()), "universal_h", &stats, 0, tol, echo(&set)))
}

fn relations(set: &GeneratorSet, spec: &SampleSpec, tol: f64, map: &dyn PointMap) -> ypl_core::Result<Vec<ResidualReport>> {
    check_relations_with(set, &relation_set(set)?, spec, tol, map)
}

pub fn algebra(cfg: &RunConfig, map: &dyn PointMap) -> SuiteOutcome {
    let mut c = Collector::new("algebra");
    let spec = cfg.sample_spec();
    match yang_set(cfg) {
        Ok(set) => c.reports("yang", check_relations_with(&set, &yang_relations(&set), &spec, cfg.tol.algebra, map)),
        Err(e) => c.error("yang", e),
    }
    if let Ok(params) = cfg.model_params() {
        for name in UNIVERSAL_H_PROFILES {
            match ProfilePair::preset(name, params.case.sigma()) {
                Ok(p) => c.report("universal_h", universal_h_check(&params, &p, &spec, cfg.tol.universal_h, map)),
                Err(e) => c.error("universal_h", e),
            }
        }
    }
    match generalized_configs(cfg) {
        Ok(configs) => {
            for (params, gp) in configs {
                let r = generalized_set(&params, &cfg.model.profile, &gp).and_then(|s| relations(&s, &spec, cfg.tol.generalized, map));
                c.reports("generalized", r);
            }
        }
        Err(e) => c.error("generalized", e),
    }
    c.out
}

pub fn jacobi(cfg: &RunConfig, map: &dyn PointMap) -> SuiteOutcome {
    let mut c = Collector::new("jacobi");
    let spec = cfg.sample_spec();
    match yang_set(cfg) {
        Ok(set) => c.report("yang", jacobi_suite(&set, &spec, cfg.tol.jacobi, map)),
        Err(e) => c.error("yang", e),
    }
    match (cfg.model_params(), cfg.gen_params()) {
        (Ok(params), Ok(gp)) => {
            let r = generalized_set(&params, &cfg.model.profile, &gp).and_then(|s| jacobi_suite(&s, &spec, cfg.tol.jacobi, map));
            c.report("generalized", r);
        }
        (Err(e), _) | (_, Err(e)) => c.error("generalized", e),
    }
    c.out
}

pub fn born(cfg: &RunConfig, map: &dyn PointMap) -> SuiteOutcome {
    let mut c = Collector::new("born");
    let spec = cfg.sample_spec();
    match generalized_configs(cfg) {
        Ok(configs) => {
            for (params, gp) in configs {
                let r = generalized_set(&params, &cfg.model.profile, &gp)
                    .and_then(|s| born_dual(&s, DualMode::All))
                    .and_then(|d| relations(&d, &spec, cfg.tol.generalized, map));
                c.reports("dual", r);
            }
        }
        Err(e) => c.error("dual", e),
    }
    c.out
}

pub fn snyder(cfg: &RunConfig, map: &dyn PointMap) -> SuiteOutcome {
    let mut c = Collector::new("snyder");
    let spec = cfg.sample_spec();
    let params = ModelParams { alpha: 0.0, beta: cfg.model.beta, case: ModelCase::PP, n: cfg.model.n };
    let profiles = match cfg.snyder_profiles() {
        Ok(p) => p,
        Err(e) => {
            c.error("config", e);
            return c.out;
        }
    };
    for p in profiles {
        let name = format!("{p:?}");
        match snyder_realization(&params, &p) {
            Ok(set) => {
                c.reports(&name, relations(&set, &spec, cfg.tol.algebra, map));
                c.report(&name, jacobi_suite(&set, &spec, cfg.tol.jacobi, map));
            }
            Err(e) => c.error(&name, e),
        }
    }
    c.out
}

fn worst_grid(q: &AnsatzQuadruple) -> ypl_core::Result<[f64; 7]> {
    Ok(max_residuals(&grid_residuals(q, &Grid::default())?))
}

fn fold_max(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(*b) })
}

pub fn pde(cfg: &RunConfig, map: &dyn PointMap) -> SuiteOutcome {
    let mut c = Collector::new("pde");
    let spec = cfg.sample_spec();
    let grid_points = Grid::default().points().len() as f64;
    let quadruples = match cfg.quadruples() {
        Ok(q) => q,
        Err(e) => {
            c.error("config", e);
            return c.out;
        }
    };
    for q in &quadruples {
        match worst_grid(q) {
            Ok(m) => c.check(
                CheckEntry::below("pde", format!("grid.{}", q.name), fold_max(&m), cfg.tol.pde)
                    .with("max_abs_e1_to_e7", m.to_vec())
                    .with("grid_points", vec![grid_points]),
            ),
            Err(e) => c.error(&q.name, e),
        }
    }
    let params = ModelParams { alpha: cfg.model.alpha, beta: cfg.model.beta, case: ModelCase::PP, n: cfg.model.n };
    for q in &quadruples {
        match bracket_residual_max(q, &params, &spec, map) {
            Ok(v) => c.check(CheckEntry::below("pde", format!("brackets.{}", q.name), v, cfg.tol.algebra)),
            Err(e) => c.error(&q.name, e),
        }
    }
    let (al, be) = EQUIVALENCE_PARAMS;
    let eq_params = ModelParams { alpha: al, beta: be, ..params };
    for kappa in EQUIVALENCE_KAPPAS {
        let q = AnsatzQuadruple::special().perturbed(kappa);
        let r = worst_grid(&q).and_then(|m| Ok((fold_max(&m), bracket_residual_max(&q, &eq_params, &spec, map)?)));
        match r {
            Ok((p, b)) => {
                let ratio = (p / b).max(b / p);
                c.check(
                    CheckEntry::below("pde", format!("equivalence.kappa={kappa:e}"), ratio, EQUIVALENCE_RATIO)
                        .with("pde_max", vec![p])
                        .with("bracket_max", vec![b]),
                );
            }
            Err(e) => c.error("equivalence", e),
        }
    }
    c.out
}

/// `z` nodes of the `G` checks: `count` points evenly spread on `[−r, r]`.
fn z_nodes(r: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| -r + 2.0 * r * k as f64 / (count - 1) as f64).collect()
}

/// `G` closed form against its series, the alternating remainder bound and
/// the leading Taylor coefficients.
pub fn g_checks() -> Vec<CheckEntry> {
    let mut out = Vec::new();
    let gap = |z: f64, order: usize| (g_closed(z, 1.0, 1.0).unwrap_or(f64::NAN) - g_series(z, 1.0, 1.0, order).unwrap_or(f64::NAN)).abs();
    let series: Vec<f64> = z_nodes(0.3, 61).into_iter().map(|z| gap(z, G_SERIES_ORDER)).collect();
    out.push(CheckEntry::below("flows", "g.series", fold_max(&series), G_SERIES_TOL));
    // alternating series: |closed − series_N| ≤ |term_{N+1}|, up to rounding
    let mut excess = 0.0f64;
    for z in z_nodes(0.5, 41) {
        for order in 1..=G_SERIES_ORDER {
            excess = excess.max(gap(z, order) - g_series_term(z, order + 1).abs());
        }
    }
    out.push(CheckEntry::below("flows", "g.remainder_bound", excess, G_ROUNDING));
    let c = g_taylor_coefficients(5);
    let err = (c[3] + 1.0 / 6.0).abs().max((c[5] - 1.0 / 20.0).abs());
    out.push(CheckEntry::below("flows", "g.taylor", err, G_TAYLOR_TOL).with("coefficients", c));
    out
}

pub fn flows(cfg: &RunConfig, map: &dyn PointMap) -> SuiteOutcome {
    let mut c = Collector::new("flows");
    for g in g_checks() {
        c.check(g);
    }
    let params = ModelParams { alpha: cfg.model.alpha, beta: cfg.model.beta, case: ModelCase::PP, n: cfg.model.n };
    let set = match ProfilePair::preset(&cfg.model.profile, Sign::Plus).and_then(|p| yang_special(&params, &p)) {
        Ok(s) => s,
        Err(e) => {
            c.error("yang", e);
            return c.out;
        }
    };
    let flow = cfg.flow_spec();
    let base = cfg.sample_spec();
    let fs = SampleSpec { count: cfg.flows.samples, ..base };
    for &angle in &cfg.flows.angles {
        let r = rotation_check(&set, angle, &fs, &flow, cfg.tol.flow, map).map(|rs| rename(rs, |n| format!("{n}[phi={angle}]")));
        c.reports("rotation", r);
    }
    if let Some(&p1) = cfg.flows.angles.first() {
        let p2 = cfg.flows.angles.get(1).copied().unwrap_or(p1);
        let r = angle_additivity(&set, p1, p2, &fs, &flow, cfg.tol.flow, map).map(|r| {
            let mut r = r;
            r.relation = format!("{}[phi1={p1},phi2={p2}]", r.relation);
            r
        });
        c.report("additivity", r);
    }
    c.reports("induction", induction_check(&set, &fs, cfg.tol.flow, map));
    let og = SampleSpec { count: cfg.flows.og_samples, ..base };
    c.reports("og", og_check(&params, &cfg.og_spec(), &og, &flow, cfg.tol.fd, map));

    let pts = sample_points(&SampleSpec { count: cfg.flows.bch_points, ..base }, params.n, &[]);
    let bch_flow = FlowSpec { abs_tol: cfg.flows.bch_integrator_tol, rel_tol: cfg.flows.bch_integrator_tol, ..flow };
    match pts.and_then(|pts| bch_order_test(cfg.flows.bch_eps, cfg.flows.bch_halvings, cfg.flows.bch_min_ratio, &pts, &bch_flow)) {
        Ok(r) => {
            let mut e = CheckEntry::below("flows", "bch.order", r.min_ratio, cfg.flows.bch_min_ratio)
                .with("scales", r.scales)
                .with("errors", r.errors)
                .with("ratios", r.ratios);
            e.pass = r.pass;
            c.check(e);
        }
        Err(e) => c.error("bch", e),
    }

    let f = invariant_generator(&params, cfg.flows.automorphism_k);
    let moved = automorphism_pushforward(&f, &set, &flow);
    let aspec = SampleSpec { count: cfg.flows.automorphism_samples, ..base };
    let r = check_relations_with(&moved, &yang_relations(&moved), &aspec, cfg.tol.fd, map).map(|rs| rename(rs, |n| format!("pushed.{n}")));
    c.reports("automorphism", r);
    c.report("automorphism", lorentz_invariance(&set, &moved, &aspec, map));
    c.out
}

/// `|M_{01}` after the automorphism `− M_{01}` before`|`.
fn lorentz_invariance(set: &GeneratorSet, moved: &GeneratorSet, spec: &SampleSpec, map: &dyn PointMap) -> ypl_core::Result<ResidualReport> {
    let before = set.get(GenId::M(0, 1))?.clone();
    let after = moved.get(GenId::M(0, 1))?.clone();
    let f = |pt: &PhasePoint| -> PointOutcome { Ok(vec![(after.eval(pt)? - before.eval(pt)?).abs()]) };
    let stats = sweep(spec, set.params.n, set.guards(), 1, map, &f)?;
    let mut r = ResidualReport::from_stats((moved.family.label(), moved.params.case.label()), "pushed.M.0.1.invariance", &stats, 0, M_INVARIANCE_TOL, echo(moved));
    r.fd_jets = true;
    Ok(r)
}

/// Period–energy scan rows in case-major order, computed in parallel.
pub fn scan(spec: &ScanSpec) -> Vec<ScanRowJson> {
    let cells: Vec<(ModelCase, f64)> = spec.cases.iter().flat_map(|&c| spec.amplitudes.iter().map(move |&a| (c, a))).collect();
    cells.par_iter().map(|&(c, a)| ScanRowJson::from(&scan_row(spec, c, a))).collect()
}

pub fn scan_spec(cfg: &RunConfig, cases: Vec<ModelCase>) -> ScanSpec {
    ScanSpec {
        alpha: cfg.model.alpha,
        beta: cfg.model.beta,
        n: cfg.model.n,
        cases,
        amplitudes: cfg.dynamics.amplitudes.clone(),
        oscillator: cfg.oscillator(),
    }
}

fn canonical_period(cfg: &RunConfig) -> ypl_core::Result<(f64, f64)> {
    let s = cfg.dynamics.canonical_scale;
    let set = oscillator_set(s, s, cfg.model.n, ModelCase::PP)?;
    let traj = simulate(&set, &cfg.oscillator())?;
    let est = measure_period(&traj)?;
    let exact = TAU / cfg.dynamics.omega;
    Ok(((est.period - exact).abs() / exact, est.period))
}

fn undeformed_gap(cfg: &RunConfig) -> ypl_core::Result<f64> {
    let set = oscillator_set(0.0, 0.0, cfg.model.n, ModelCase::PP)?;
    let spec = cfg.oscillator();
    let traj = simulate(&set, &spec)?;
    let gap = traj.times.iter().zip(traj.x1()).map(|(t, x)| (x - spec.amplitude * (spec.omega * t).cos()).abs()).fold(0.0, f64::max);
    Ok(gap)
}

pub fn dynamics(cfg: &RunConfig) -> SuiteOutcome {
    let mut c = Collector::new("dynamics");
    match canonical_period(cfg) {
        Ok((rel, period)) => c.check(CheckEntry::below("dynamics", "canonical_period", rel, CANONICAL_PERIOD_TOL).with("period", vec![period])),
        Err(e) => c.error("canonical_period", e),
    }
    match undeformed_gap(cfg) {
        Ok(g) => c.check(CheckEntry::below("dynamics", "undeformed_cosine", g, UNDEFORMED_TOL)),
        Err(e) => c.error("undeformed_cosine", e),
    }
    let cases = match cfg.dynamics_cases() {
        Ok(cs) => cs,
        Err(e) => {
            c.error("cases", e);
            return c.out;
        }
    };
    let rows = scan(&scan_spec(cfg, cases.clone()));
    if cases.contains(&ModelCase::PP) {
        let pp: Vec<&ScanRowJson> = rows.iter().filter(|r| r.case == ModelCase::PP.label()).collect();
        let periods: Vec<f64> = pp.iter().map(|r| r.period).collect();
        let trend = strict_trend(&periods);
        // steps that break the direction of the first step
        let first = periods.windows(2).next().map(|w| w[1] - w[0]).unwrap_or(f64::NAN);
        let breaks = periods.windows(2).filter(|w| !((w[1] - w[0]) * first > 0.0)).count() + usize::from(periods.len() < 2);
        let mut e = CheckEntry::below("dynamics", "period_trend.pp", breaks as f64, 1.0)
            .with("amplitudes", pp.iter().map(|r| r.amplitude).collect())
            .with("periods", periods);
        if trend == Some(Trend::Decreasing) {
            e.name.push_str(".decreasing");
        } else if trend == Some(Trend::Increasing) {
            e.name.push_str(".increasing");
        }
        c.check(e);
        for r in pp.iter().filter(|r| r.error.is_some()) {
            c.error("scan", format!("pp amplitude {}: {}", r.amplitude, r.error.as_deref().unwrap_or_default()));
        }
    }
    let drifts: Vec<f64> = rows.iter().filter(|r| r.error.is_none()).map(|r| r.energy_drift).collect();
    c.check(CheckEntry::below("dynamics", "energy_drift", fold_max(&drifts), ENERGY_DRIFT_TOL));
    c.out.scan = rows;
    c.out
}
