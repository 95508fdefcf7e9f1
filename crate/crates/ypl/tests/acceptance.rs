//! Acceptance gate: one line per criterion, then a non-zero exit if any fails.

use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

use ypl::parallel::{init_threads, Rayon};
use ypl::report::CheckEntry;
use ypl::suites::{self, generalized_configs, generalized_set, universal_h_check, UNIVERSAL_H_PROFILES};
use ypl::RunConfig;
use ypl_core::algebra::{check_relations_with, relation_set, yang_relations, ResidualReport};
use ypl_core::ansatz::{grid_residuals, max_residuals, AnsatzQuadruple, Grid};
use ypl_core::bracket::FlowSpec;
use ypl_core::flows::{angle_additivity, bch_order_test, og_check, rotation_check, OgSpec};
use ypl_core::realizations::{born_dual, yang_special, DualMode, ProfilePair};
use ypl_core::sample::{sample_points, SampleSpec};
use ypl_core::{ModelCase, ModelParams, Sign};

const YANG_TOL: f64 = 1e-7;
const YANG_POINTS: usize = 1000;
const YANG_SECONDS: f64 = 10.0;
const UNIVERSAL_H_TOL: f64 = 1e-9;
const GENERALIZED_TOL: f64 = 1e-6;
const GENERALIZED_DRAWS: usize = 5;
const PDE_TOL: f64 = 1e-9;
const ROTATION_ANGLES: [f64; 3] = [0.1, 0.3, FRAC_PI_2];
const ROTATION_TOL: f64 = 1e-6;
const ROTATION_INTEGRATOR_TOL: f64 = 1e-10;
const OG_TOL: f64 = 1e-5;
const OG_POINTS: usize = 200;
const BCH_MIN_RATIO: f64 = 8.0;
const BCH_HALVINGS: usize = 3;
const DYNAMICS_SECONDS: f64 = 30.0;

struct Line {
    pass: bool,
    text: String,
}

fn worst(reports: &[ResidualReport]) -> (f64, bool) {
    let max = reports.iter().map(|r| r.max_abs).fold(0.0, f64::max);
    (max, !reports.is_empty() && reports.iter().all(|r| r.pass))
}

fn fail(e: impl std::fmt::Display) -> Line {
    Line { pass: false, text: format!("error: {e}") }
}

fn defaults() -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.validate().expect("default configuration is valid");
    cfg
}

fn pp() -> ModelParams {
    ModelParams { alpha: 0.1, beta: 0.1, case: ModelCase::PP, n: 4 }
}

fn yang_closure() -> Line {
    let spec = SampleSpec { count: YANG_POINTS, ..defaults().sample_spec() };
    let start = Instant::now();
    let r = yang_special(&pp(), &ProfilePair::phi2_zero(Sign::Plus))
        .and_then(|set| check_relations_with(&set, &yang_relations(&set), &spec, YANG_TOL, &Rayon));
    let secs = start.elapsed().as_secs_f64();
    match r {
        Ok(rs) => {
            let (max, ok) = worst(&rs);
            let samples = rs.iter().map(|r| r.samples).min().unwrap_or(0);
            Line {
                pass: ok && samples == YANG_POINTS && secs < YANG_SECONDS,
                text: format!(
                    "{} relations, {samples} points, max residual {max:.3e} (< {YANG_TOL:e}), {secs:.2} s (< {YANG_SECONDS} s)",
                    rs.len()
                ),
            }
        }
        Err(e) => fail(e),
    }
}

fn universal_h() -> Line {
    let spec = SampleSpec { count: YANG_POINTS, ..defaults().sample_spec() };
    let mut rs = Vec::new();
    for name in UNIVERSAL_H_PROFILES {
        match ProfilePair::preset(name, Sign::Plus).and_then(|p| universal_h_check(&pp(), &p, &spec, UNIVERSAL_H_TOL, &Rayon)) {
            Ok(r) => rs.push(r),
            Err(e) => return fail(e),
        }
    }
    let (max, ok) = worst(&rs);
    Line { pass: ok && rs.len() == 3, text: format!("profiles {UNIVERSAL_H_PROFILES:?}, max |h - h_universal| {max:.3e} (< {UNIVERSAL_H_TOL:e})") }
}

/// Relation sweeps of the seeded draws, optionally dualized first.
fn generalized(dual: bool) -> Line {
    let mut cfg = defaults();
    cfg.gen.draws = GENERALIZED_DRAWS;
    let spec = cfg.sample_spec();
    let configs = match generalized_configs(&cfg) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    // the first entry is the configured parameter set, the rest are draws
    let draws = &configs[1..];
    let mut rs = Vec::new();
    for (params, gp) in draws {
        let set = generalized_set(params, &cfg.model.profile, gp);
        let set = if dual { set.and_then(|s| born_dual(&s, DualMode::All)) } else { set };
        match set.and_then(|s| check_relations_with(&s, &relation_set(&s)?, &spec, GENERALIZED_TOL, &Rayon)) {
            Ok(r) => rs.extend(r),
            Err(e) => return fail(e),
        }
    }
    let (max, ok) = worst(&rs);
    let cases = ModelCase::ALL.iter().all(|c| draws.iter().filter(|(p, _)| p.case == *c).count() == GENERALIZED_DRAWS);
    let what = if dual { "dualized draws" } else { "draws" };
    Line {
        pass: ok && cases,
        text: format!("{} {what} over 4 cases, {} component sweeps, max residual {max:.3e} (< {GENERALIZED_TOL:e})", draws.len(), rs.len()),
    }
}

fn pde() -> Line {
    let mut parts = Vec::new();
    let mut pass = true;
    for q in AnsatzQuadruple::shipped() {
        match grid_residuals(&q, &Grid::default()) {
            Ok(rows) => {
                let m = max_residuals(&rows).iter().cloned().fold(0.0, f64::max);
                pass &= m < PDE_TOL;
                parts.push(format!("{} {m:.1e}", q.name));
            }
            Err(e) => return fail(e),
        }
    }
    Line { pass, text: format!("max |e1..e7| on the default grid: {} (< {PDE_TOL:e})", parts.join(", ")) }
}

fn rotation() -> Line {
    let set = match yang_special(&pp(), &ProfilePair::phi2_zero(Sign::Plus)) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let cfg = defaults();
    let spec = SampleSpec { count: cfg.flows.samples, ..cfg.sample_spec() };
    let flow = FlowSpec { abs_tol: ROTATION_INTEGRATOR_TOL, rel_tol: ROTATION_INTEGRATOR_TOL, ..FlowSpec::default() };
    let mut rs = Vec::new();
    for angle in ROTATION_ANGLES {
        match rotation_check(&set, angle, &spec, &flow, ROTATION_TOL, &Rayon) {
            Ok(r) => rs.extend(r),
            Err(e) => return fail(e),
        }
    }
    let (rot, rot_ok) = worst(&rs);
    match angle_additivity(&set, 0.1, 0.3, &spec, &flow, ROTATION_TOL, &Rayon) {
        Ok(a) => Line {
            pass: rot_ok && a.pass,
            text: format!("angles {ROTATION_ANGLES:?}: max {rot:.3e}; additivity 0.1+0.3: {:.3e} (< {ROTATION_TOL:e})", a.max_abs),
        },
        Err(e) => fail(e),
    }
}

fn g_function() -> Line {
    let checks: Vec<CheckEntry> = suites::g_checks();
    let get = |name: &str| checks.iter().find(|c| c.name == name);
    match (get("g.series"), get("g.taylor")) {
        (Some(s), Some(t)) => {
            let c = &t.data["coefficients"];
            Line {
                pass: s.pass && t.pass,
                text: format!(
                    "|closed - series(8)| over |z| <= 0.3 at alpha*beta = 1: {:.3e} (< {:e}); z^3, z^5 coefficients {:.12}, {:.12}, error {:.1e} (< {:e})",
                    s.value, s.tol, c[3], c[5], t.value, t.tol
                ),
            }
        }
        _ => fail("missing G checks"),
    }
}

fn og() -> Line {
    let spec = SampleSpec { count: OG_POINTS, ..defaults().sample_spec() };
    let flow = defaults().flow_spec();
    match og_check(&pp(), &OgSpec::default(), &spec, &flow, OG_TOL, &Rayon) {
        Ok(rs) => {
            let parts: Vec<String> = rs.iter().map(|r| format!("{} {:.2e}", r.relation, r.max_abs)).collect();
            let (_, ok) = worst(&rs);
            let full = rs.len() == 3 && rs.iter().all(|r| r.samples == OG_POINTS);
            Line { pass: ok && full, text: format!("{OG_POINTS} points: {} (< {OG_TOL:e})", parts.join(", ")) }
        }
        Err(e) => fail(e),
    }
}

fn bch() -> Line {
    let cfg = defaults();
    let flow = FlowSpec { abs_tol: cfg.flows.bch_integrator_tol, rel_tol: cfg.flows.bch_integrator_tol, ..FlowSpec::default() };
    let pts = match sample_points(&SampleSpec { count: cfg.flows.bch_points, ..cfg.sample_spec() }, 4, &[]) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    match bch_order_test(cfg.flows.bch_eps, BCH_HALVINGS, BCH_MIN_RATIO, &pts, &flow) {
        Ok(r) => Line {
            pass: r.pass && r.ratios.len() == BCH_HALVINGS,
            text: format!(
                "eps {:?}: errors [{}], ratios {:.2?} (each >= {BCH_MIN_RATIO})",
                r.scales,
                r.errors.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>().join(", "),
                r.ratios
            ),
        },
        Err(e) => fail(e),
    }
}

fn dynamics() -> Line {
    let start = Instant::now();
    let out = suites::dynamics(&defaults());
    let secs = start.elapsed().as_secs_f64();
    let get = |prefix: &str| out.checks.iter().find(|c| c.name.starts_with(prefix));
    let (Some(period), Some(trend), Some(drift)) = (get("canonical_period"), get("period_trend.pp"), get("energy_drift")) else {
        return fail(format!("missing dynamics checks: {:?}", out.errors));
    };
    let periods = &trend.data["periods"];
    Line {
        pass: out.pass() && secs < DYNAMICS_SECONDS,
        text: format!(
            "canonical period rel. error {:.2e} (< {:e}); pp periods {periods:.8?} ({}); energy drift {:.2e} (< {:e}); {secs:.2} s (< {DYNAMICS_SECONDS} s)",
            period.value,
            period.tol,
            trend.name.trim_start_matches("period_trend.pp."),
            drift.value,
            drift.tol
        ),
    }
}

fn main() {
    if let Err(e) = init_threads() {
        eprintln!("{e}");
    }
    let criteria: [(&str, fn() -> Line); 10] = [
        ("Yang algebra closure", yang_closure),
        ("universal h", universal_h),
        ("generalized algebra", || generalized(false)),
        ("seven-PDE suite", pde),
        ("rotation flows", rotation),
        ("G function", g_function),
        ("G-flow and X1 brackets", og),
        ("BCH order test", bch),
        ("Born duality", || generalized(true)),
        ("oscillator dynamics", dynamics),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let line = run();
        if !line.pass {
            failed += 1;
        }
        println!("criterion {:>2} {} {name}: {}", k + 1, if line.pass { "PASS" } else { "FAIL" }, line.text);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
