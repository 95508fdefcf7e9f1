//! The deformed harmonic oscillator `H = ½(p̂² + ω²x̂²)`.
//!
//! Orbits start at `x_1 = a₀` with all other coordinates zero and stay on
//! that plane, where the Minkowski squares are positive. Time evolution is
//! `ḟ = {f, H}`, the Hamiltonian flow of `−H` in the bracket convention of
//! [`crate::bracket`].

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::bracket::hamiltonian_vector_field;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::jet::Jet;
use crate::ode::{Integrator, Tolerances};
use crate::phase::{minkowski_dot_jets, ModelCase, ModelParams};
use crate::realizations::{yang_special, GenId, GeneratorSet, ProfilePair};

/// Coordinate index of the excited degree of freedom.
pub const EXCITED: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorSpec {
    pub omega: f64,
    /// Initial `x_1`; `p_1` starts at zero.
    pub amplitude: f64,
    pub t_end: f64,
    pub dt_out: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_steps: usize,
}

impl Default for OscillatorSpec {
    fn default() -> Self {
        OscillatorSpec {
            omega: 1.0,
            amplitude: 0.2,
            t_end: 20.0,
            dt_out: 0.01,
            abs_tol: 1e-13,
            rel_tol: 1e-13,
            max_steps: 1_000_000,
        }
    }
}

impl OscillatorSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::invalid("omega must be a finite real > 0"));
        }
        if !self.amplitude.is_finite() {
            return Err(Error::invalid("amplitude must be finite"));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::invalid("t_end must be a finite real > 0"));
        }
        if !(self.dt_out > 0.0 && self.dt_out <= self.t_end) {
            return Err(Error::invalid("dt_out must lie in (0, t_end]"));
        }
        let ok = |v: f64| v > 0.0 && v <= 1e-2;
        if !ok(self.abs_tol) || !ok(self.rel_tol) {
            return Err(Error::invalid("integrator tolerances must lie in (0, 1e-2]"));
        }
        Ok(())
    }
}

/// `H = ½(p̂·p̂ + ω² x̂·x̂)` built from a set's `x̂` and `p̂`.
pub fn oscillator_hamiltonian(set: &GeneratorSet, omega: f64) -> Result<ScalarField> {
    let n = set.params.n;
    let xs: Vec<ScalarField> = (0..n).map(|mu| set.get(GenId::XHat(mu)).cloned()).collect::<Result<_>>()?;
    let ps: Vec<ScalarField> = (0..n).map(|mu| set.get(GenId::PHat(mu)).cloned()).collect::<Result<_>>()?;
    let w2 = omega * omega;
    Ok(ScalarField::new("oscillator", move |c| {
        let x: Vec<Jet> = xs.iter().map(|f| f.eval_at(c)).collect::<Result<_>>()?;
        let p: Vec<Jet> = ps.iter().map(|f| f.eval_at(c)).collect::<Result<_>>()?;
        Ok((minkowski_dot_jets(&p, &p) + minkowski_dot_jets(&x, &x) * w2) * 0.5)
    }))
}

/// Samples of an orbit at `dt_out` spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Flat `(x, p)` per sample.
    pub states: Vec<Vec<f64>>,
    pub energies: Vec<f64>,
    /// `dx_1/dt` per sample.
    pub rates: Vec<f64>,
    /// `max |H(t) − H(0)| / |H(0)|`.
    pub energy_drift: f64,
    /// Largest coordinate off the `(x_1, p_1)` plane.
    pub off_plane: f64,
}

impl Trajectory {
    pub fn x1(&self) -> Vec<f64> {
        self.states.iter().map(|s| s[EXCITED]).collect()
    }
}

/// Integrates `ḟ = {f, H}` from `x_1 = a₀`.
pub fn simulate(set: &GeneratorSet, spec: &OscillatorSpec) -> Result<Trajectory> {
    spec.validate()?;
    let n = set.params.n;
    if n < 2 {
        return Err(Error::invalid("the oscillator needs n >= 2"));
    }
    let h = oscillator_hamiltonian(set, spec.omega)?;
    let k = h.scale(-1.0);
    let mut y0 = vec![0.0; 2 * n];
    y0[EXCITED] = spec.amplitude;
    let energy = |y: &[f64]| -> Result<f64> {
        let c: Vec<Jet> = y.iter().map(|v| Jet::constant(0, 0, *v)).collect();
        Ok(h.eval_at(&c)?.real())
    };
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| -> Result<()> {
        hamiltonian_vector_field(&k, y, dy).map_err(|e| match e {
            Error::Domain(cause) => Error::OrbitExit { t, cause },
            other => other,
        })
    };
    let mut dy = vec![0.0; 2 * n];
    let mut rate = |t: f64, y: &[f64]| -> Result<f64> {
        rhs(t, y, &mut dy)?;
        Ok(dy[EXCITED])
    };
    let e0 = energy(&y0)?;
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![y0.clone()],
        energies: vec![e0],
        rates: vec![rate(0.0, &y0)?],
        energy_drift: 0.0,
        off_plane: 0.0,
    };
    let tol = Tolerances { abs: spec.abs_tol, rel: spec.rel_tol };
    let mut integ = Integrator::new(rhs, 0.0, &y0, tol, spec.max_steps);
    let samples = libm::ceil(spec.t_end / spec.dt_out - 1e-9) as usize;
    let scale = if e0 != 0.0 { e0.abs() } else { 1.0 };
    for i in 1..=samples {
        let t = (i as f64 * spec.dt_out).min(spec.t_end);
        integ.advance_to(t)?;
        let y = integ.state().to_vec();
        let e = energy(&y).map_err(|err| match err {
            Error::Domain(cause) => Error::OrbitExit { t, cause },
            other => other,
        })?;
        traj.energy_drift = traj.energy_drift.max((e - e0).abs() / scale);
        for (j, v) in y.iter().enumerate() {
            if j != EXCITED && j != n + EXCITED {
                traj.off_plane = traj.off_plane.max(v.abs());
            }
        }
        traj.rates.push(rate(t, &y)?);
        traj.times.push(t);
        traj.states.push(y);
        traj.energies.push(e);
    }
    Ok(traj)
}

/// Period estimate from section crossings.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodEstimate {
    pub period: f64,
    /// Largest deviation of a single crossing interval from `period`.
    pub err: f64,
    pub crossings: Vec<f64>,
}

/// Cubic Hermite interpolant on `[t0, t1]`.
fn hermite(t0: f64, t1: f64, x0: f64, x1: f64, v0: f64, v1: f64, t: f64) -> f64 {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let (s2, s3) = (s * s, s * s * s);
    (2.0 * s3 - 3.0 * s2 + 1.0) * x0 + (s3 - 2.0 * s2 + s) * h * v0 + (-2.0 * s3 + 3.0 * s2) * x1 + (s3 - s2) * h * v1
}

/// Times where `x_1` crosses zero upwards, located on the cubic Hermite
/// interpolant of the samples.
pub fn upward_crossings(traj: &Trajectory) -> Vec<f64> {
    let x = traj.x1();
    let mut out = Vec::new();
    for k in 0..x.len().saturating_sub(1) {
        if !(x[k] < 0.0 && x[k + 1] >= 0.0) {
            continue;
        }
        let (t0, t1) = (traj.times[k], traj.times[k + 1]);
        let f = |t: f64| hermite(t0, t1, x[k], x[k + 1], traj.rates[k], traj.rates[k + 1], t);
        let (mut lo, mut hi) = (t0, t1);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * hi.abs().max(1.0) {
                break;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    out
}

/// Mean interval between upward zero crossings of `x_1`.
pub fn measure_period(traj: &Trajectory) -> Result<PeriodEstimate> {
    let crossings = upward_crossings(traj);
    if crossings.len() < 2 {
        return Err(Error::NoPeriodDetected);
    }
    let m = crossings.len() - 1;
    let period = (crossings[m] - crossings[0]) / m as f64;
    let err = crossings.windows(2).map(|w| ((w[1] - w[0]) - period).abs()).fold(0.0, f64::max);
    Ok(PeriodEstimate { period, err, crossings })
}

/// Inputs of a period–energy scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
    pub cases: Vec<ModelCase>,
    pub amplitudes: Vec<f64>,
    pub oscillator: OscillatorSpec,
}

impl Default for ScanSpec {
    fn default() -> Self {
        ScanSpec {
            alpha: 0.1,
            beta: 0.1,
            n: 4,
            cases: vec![ModelCase::PP],
            amplitudes: vec![0.2, 0.4, 0.6],
            oscillator: OscillatorSpec::default(),
        }
    }
}

/// One scan row; `error` is set when the run failed.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub case: ModelCase,
    pub alpha: f64,
    pub beta: f64,
    pub omega: f64,
    pub amplitude: f64,
    pub energy: f64,
    pub period: f64,
    pub period_err: f64,
    pub energy_drift: f64,
    pub error: Option<String>,
}

/// The special realization used for a case: `φ₁ = σz²`, `φ₂ = 0`.
pub fn oscillator_set(alpha: f64, beta: f64, n: usize, case: ModelCase) -> Result<GeneratorSet> {
    let params = ModelParams::new(alpha, beta, case, n)?;
    yang_special(&params, &ProfilePair::phi2_zero(case.sigma()))
}

/// Runs one `(case, amplitude)` cell of a scan.
pub fn scan_row(scan: &ScanSpec, case: ModelCase, amplitude: f64) -> ScanRow {
    let mut row = ScanRow {
        case,
        alpha: scan.alpha,
        beta: scan.beta,
        omega: scan.oscillator.omega,
        amplitude,
        energy: f64::NAN,
        period: f64::NAN,
        period_err: f64::NAN,
        energy_drift: f64::NAN,
        error: None,
    };
    let run = || -> Result<(f64, PeriodEstimate, f64)> {
        let set = oscillator_set(scan.alpha, scan.beta, scan.n, case)?;
        let traj = simulate(&set, &OscillatorSpec { amplitude, ..scan.oscillator })?;
        Ok((traj.energies[0], measure_period(&traj)?, traj.energy_drift))
    };
    match run() {
        Ok((e, p, drift)) => {
            row.energy = e;
            row.period = p.period;
            row.period_err = p.err;
            row.energy_drift = drift;
        }
        Err(e) => row.error = Some(format!("{e}")),
    }
    row
}

/// All cells of a scan, case-major; failures are kept as rows.
pub fn period_energy_scan(scan: &ScanSpec) -> Vec<ScanRow> {
    scan.cases.iter().flat_map(|&c| scan.amplitudes.iter().map(move |&a| (c, a))).map(|(c, a)| scan_row(scan, c, a)).collect()
}

/// Direction of a strictly monotone sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    Increasing,
    Decreasing,
}

pub fn strict_trend(values: &[f64]) -> Option<Trend> {
    if values.len() < 2 || values.iter().any(|v| !v.is_finite()) {
        return None;
    }
    if values.windows(2).all(|w| w[1] > w[0]) {
        Some(Trend::Increasing)
    } else if values.windows(2).all(|w| w[1] < w[0]) {
        Some(Trend::Decreasing)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn undeformed_orbit_is_a_cosine() {
        let set = oscillator_set(0.0, 0.0, 4, ModelCase::PP).unwrap();
        let spec = OscillatorSpec { amplitude: 0.3, t_end: 7.0, ..Default::default() };
        let traj = simulate(&set, &spec).unwrap();
        for (t, s) in traj.times.iter().zip(&traj.states) {
            assert!((s[1] - 0.3 * libm::cos(*t)).abs() < 1e-10);
        }
        assert!(traj.off_plane == 0.0);
    }

    #[test]
    fn canonical_period() {
        let set = oscillator_set(0.0, 0.0, 4, ModelCase::PP).unwrap();
        let spec = OscillatorSpec { omega: 2.0, amplitude: 0.5, t_end: 10.0, ..Default::default() };
        let p = measure_period(&simulate(&set, &spec).unwrap()).unwrap();
        assert!((p.period - PI).abs() < 1e-6 * PI, "{p:?}");
    }

    #[test]
    fn constant_trajectory_has_no_period() {
        let set = oscillator_set(0.1, 0.1, 4, ModelCase::PP).unwrap();
        let traj = simulate(&set, &OscillatorSpec { amplitude: 0.0, t_end: 5.0, ..Default::default() }).unwrap();
        assert_eq!(measure_period(&traj), Err(Error::NoPeriodDetected));
    }

    #[test]
    fn deformed_runs_conserve_energy_and_plane() {
        let set = oscillator_set(0.1, 0.1, 4, ModelCase::PP).unwrap();
        let traj = simulate(&set, &OscillatorSpec { amplitude: 0.6, ..Default::default() }).unwrap();
        assert!(traj.energy_drift < 1e-8, "{}", traj.energy_drift);
        assert!(traj.off_plane < 1e-10);
    }

    #[test]
    fn leaving_the_domain_reports_time() {
        let set = oscillator_set(0.5, 0.5, 4, ModelCase::PP).unwrap();
        let r = simulate(&set, &OscillatorSpec { amplitude: 3.0, ..Default::default() });
        assert!(matches!(r, Err(Error::Domain(_)) | Err(Error::OrbitExit { .. })), "{r:?}");
    }

    #[test]
    fn period_is_stable_under_output_spacing() {
        let set = oscillator_set(0.1, 0.1, 4, ModelCase::PP).unwrap();
        let a = measure_period(&simulate(&set, &OscillatorSpec { amplitude: 0.4, ..Default::default() }).unwrap()).unwrap();
        let b = measure_period(&simulate(&set, &OscillatorSpec { amplitude: 0.4, dt_out: 0.037, ..Default::default() }).unwrap())
            .unwrap();
        assert!((a.period - b.period).abs() < 1e-5, "{a:?} {b:?}");
    }

    #[test]
    fn scan_rows_and_trend() {
        let rows = period_energy_scan(&ScanSpec::default());
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.error.is_none()));
        let periods: Vec<f64> = rows.iter().map(|r| r.period).collect();
        assert!(strict_trend(&periods).is_some(), "{periods:?}");
        let energies: Vec<f64> = rows.iter().map(|r| r.energy).collect();
        assert_eq!(strict_trend(&energies), Some(Trend::Increasing));
    }

    #[test]
    fn opposite_trend_for_negative_signs() {
        let scan = ScanSpec { cases: vec![ModelCase::PP, ModelCase::MM], ..Default::default() };
        let rows = period_energy_scan(&scan);
        let periods = |c| rows.iter().filter(|r| r.case == c).map(|r| r.period).collect::<Vec<_>>();
        assert_eq!(strict_trend(&periods(ModelCase::PP)), Some(Trend::Increasing));
        assert_eq!(strict_trend(&periods(ModelCase::MM)), Some(Trend::Decreasing));
    }

    #[test]
    fn hermite_reproduces_cubics() {
        let f = |t: f64| t * t * t - 2.0 * t + 0.5;
        let df = |t: f64| 3.0 * t * t - 2.0;
        let v = hermite(0.2, 0.9, f(0.2), f(0.9), df(0.2), df(0.9), 0.47);
        assert!((v - f(0.47)).abs() < 1e-14);
    }
}
