//! Run configuration: TOML file, flag overrides, validation.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use ypl_core::ansatz::{AnsatzQuadruple, GtAngle};
use ypl_core::bracket::FlowSpec;
use ypl_core::dynamics::OscillatorSpec;
use ypl_core::flows::OgSpec;
use ypl_core::realizations::{GenParams, ProfilePair, SnyderProfile};
use ypl_core::sample::{GenDraw, SampleSpec};
use ypl_core::{ModelCase, ModelParams, Sign};

/// A rejected field, addressed by its dotted path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub path: String,
    pub reason: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError { path: path.into(), reason: reason.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.reason)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    /// `pp`, `mm`, `pm` or `mp`.
    pub case: String,
    /// Sign overrides; both must be given together.
    pub eps1: Option<i32>,
    pub eps2: Option<i32>,
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
    /// `phi2_zero`, `phi1_zero`, `half` or `custom:<k>`.
    pub profile: String,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection { case: "pp".into(), eps1: None, eps2: None, alpha: 0.1, beta: 0.1, n: 4, profile: "phi2_zero".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenSection {
    #[serde(rename = "A")]
    pub amp_a: f64,
    #[serde(rename = "B")]
    pub amp_b: f64,
    pub phi: f64,
    pub psi: f64,
    /// Lowered `a_μ`; zeros when empty.
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// `auto`, `trig` or `hyperbolic`.
    pub frame: String,
    /// Random draws per case for the generalized sweeps.
    pub draws: usize,
    pub angle_max: f64,
    pub shift_max: f64,
    pub amp_min: f64,
    pub amp_max: f64,
}

impl Default for GenSection {
    fn default() -> Self {
        let d = GenDraw::default();
        GenSection {
            amp_a: 1.0,
            amp_b: 1.0,
            phi: 0.0,
            psi: 0.0,
            a: Vec::new(),
            b: Vec::new(),
            frame: "auto".into(),
            draws: 5,
            angle_max: d.angle_max,
            shift_max: d.shift_max,
            amp_min: d.amp_min,
            amp_max: d.amp_max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleSection {
    pub count: usize,
    pub seed: u64,
    pub radius: f64,
    pub margin: f64,
}

impl Default for SampleSection {
    fn default() -> Self {
        let s = SampleSpec::default();
        SampleSection { count: s.count, seed: s.seed, radius: s.radius, margin: s.margin }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TolSection {
    /// Relations from exact jets.
    pub algebra: f64,
    pub jacobi: f64,
    pub universal_h: f64,
    pub generalized: f64,
    pub pde: f64,
    /// Pointwise flow comparisons.
    pub flow: f64,
    /// Brackets with finite-difference flow derivatives.
    pub fd: f64,
}

impl Default for TolSection {
    fn default() -> Self {
        TolSection { algebra: 1e-7, jacobi: 1e-7, universal_h: 1e-9, generalized: 1e-6, pde: 1e-9, flow: 1e-6, fd: 1e-5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowsSection {
    pub angles: Vec<f64>,
    pub integrator_tol: f64,
    pub og_amp: f64,
    pub og_angle: f64,
    pub og_samples: usize,
    /// Points for the rotation and induction sweeps.
    pub samples: usize,
    pub bch_eps: f64,
    pub bch_halvings: usize,
    pub bch_min_ratio: f64,
    pub bch_points: usize,
    /// The order test resolves errors near `ε⁴`, below the default flow tolerance.
    pub bch_integrator_tol: f64,
    pub automorphism_k: f64,
    pub automorphism_samples: usize,
}

impl Default for FlowsSection {
    fn default() -> Self {
        FlowsSection {
            angles: vec![0.1, 0.3, std::f64::consts::FRAC_PI_2],
            integrator_tol: 1e-10,
            og_amp: 1.0,
            og_angle: 0.2,
            og_samples: 200,
            samples: 200,
            bch_eps: 0.2,
            bch_halvings: 3,
            bch_min_ratio: 8.0,
            bch_points: 8,
            bch_integrator_tol: 1e-14,
            automorphism_k: 0.1,
            automorphism_samples: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicsSection {
    pub omega: f64,
    pub amplitudes: Vec<f64>,
    pub cases: Vec<String>,
    /// Run length in units of the undeformed period `2π/ω`.
    pub periods: f64,
    pub dt_out: f64,
    pub integrator_tol: f64,
    /// `α = β` of the near-canonical reference run.
    pub canonical_scale: f64,
    pub canonical_amplitude: f64,
}

impl Default for DynamicsSection {
    fn default() -> Self {
        DynamicsSection {
            omega: 1.0,
            amplitudes: vec![0.2, 0.4, 0.6],
            cases: vec!["pp".into(), "mm".into(), "pm".into(), "mp".into()],
            periods: 3.2,
            dt_out: 0.01,
            integrator_tol: 1e-13,
            canonical_scale: 1e-4,
            canonical_amplitude: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PdeSection {
    /// Angle on `g̃` of the composed quadruple: `psi` (composition) or `phi` (printed).
    pub composed_angle: String,
    pub composed_phi: f64,
    pub composed_psi: f64,
    pub particular_rho: f64,
}

impl Default for PdeSection {
    fn default() -> Self {
        PdeSection { composed_angle: "psi".into(), composed_phi: 0.2, composed_psi: 0.1, particular_rho: 0.3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SnyderSection {
    /// `one` and/or `sqrt`.
    pub profiles: Vec<String>,
    /// `closing` (`1 + 2φ̇₁φ₁`) or `printed` (`1 + φ̇₁φ₁`).
    pub rule: String,
}

impl Default for SnyderSection {
    fn default() -> Self {
        SnyderSection { profiles: vec!["one".into(), "sqrt".into()], rule: "closing".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

/// Everything a run needs. Every field has a default, so an empty file is
/// a valid configuration.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub gen: GenSection,
    pub sample: SampleSection,
    pub tol: TolSection,
    pub flows: FlowsSection,
    pub dynamics: DynamicsSection,
    pub pde: PdeSection,
    pub snyder: SnyderSection,
    pub output: OutputSection,
}

/// Command-line values that win over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub case: Option<String>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub angle: Option<f64>,
    pub omega: Option<f64>,
    pub amplitudes: Option<Vec<f64>>,
}

pub fn parse_case(s: &str) -> Option<ModelCase> {
    ModelCase::parse(s).ok()
}

fn finite(path: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::new(path, "must be finite"))
    }
}

fn positive(path: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::new(path, "must be a finite real > 0"))
    }
}

impl RunConfig {
    /// Parses TOML text; the result still needs [`RunConfig::validate`].
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| {
            let path = e.span().map(|s| format!("toml@{}..{}", s.start, s.end)).unwrap_or_else(|| "toml".into());
            ConfigError::new(path, e.message().to_string())
        })
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::new("config", format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(c) = &o.case {
            self.model.case = c.clone();
            self.model.eps1 = None;
            self.model.eps2 = None;
        }
        if let Some(v) = o.alpha {
            self.model.alpha = v;
        }
        if let Some(v) = o.beta {
            self.model.beta = v;
        }
        if let Some(v) = o.samples {
            self.sample.count = v;
        }
        if let Some(v) = o.seed {
            self.sample.seed = v;
        }
        if let Some(v) = o.tol {
            self.tol.algebra = v;
            self.tol.jacobi = v;
        }
        if let Some(v) = &o.out {
            self.output.json = Some(v.clone());
        }
        if let Some(v) = &o.csv {
            self.output.csv = Some(v.clone());
        }
        if let Some(v) = o.angle {
            self.flows.angles = vec![v];
        }
        if let Some(v) = o.omega {
            self.dynamics.omega = v;
        }
        if let Some(v) = &o.amplitudes {
            self.dynamics.amplitudes = v.clone();
        }
    }

    /// Loads, overrides and validates. Returns the config and any warnings.
    pub fn load(path: Option<&Path>, o: &Overrides) -> Result<(Self, Vec<String>), ConfigError> {
        let mut cfg = match path {
            Some(p) => Self::from_file(p)?,
            None => RunConfig::default(),
        };
        cfg.apply(o);
        let warnings = cfg.validate()?;
        Ok((cfg, warnings))
    }

    pub fn case(&self) -> Result<ModelCase, ConfigError> {
        match (self.model.eps1, self.model.eps2) {
            (None, None) => parse_case(&self.model.case)
                .ok_or_else(|| ConfigError::new("model.case", format!("unknown case '{}' (pp|mm|pm|mp)", self.model.case))),
            (Some(e1), Some(e2)) => {
                let s1 = Sign::from_value(e1 as f64).map_err(|_| ConfigError::new("model.eps1", "must be +1 or -1"))?;
                let s2 = Sign::from_value(e2 as f64).map_err(|_| ConfigError::new("model.eps2", "must be +1 or -1"))?;
                Ok(ModelCase::from_signs(s1, s2))
            }
            (Some(_), None) => Err(ConfigError::new("model.eps2", "required together with model.eps1")),
            (None, Some(_)) => Err(ConfigError::new("model.eps1", "required together with model.eps2")),
        }
    }

    pub fn model_params(&self) -> Result<ModelParams, ConfigError> {
        let case = self.case()?;
        finite("model.alpha", self.model.alpha)?;
        finite("model.beta", self.model.beta)?;
        if self.model.alpha < 0.0 {
            return Err(ConfigError::new("model.alpha", "must be >= 0"));
        }
        if self.model.beta < 0.0 {
            return Err(ConfigError::new("model.beta", "must be >= 0"));
        }
        if self.model.n < 2 {
            return Err(ConfigError::new("model.n", "must be at least 2"));
        }
        Ok(ModelParams { alpha: self.model.alpha, beta: self.model.beta, case, n: self.model.n })
    }

    pub fn profile(&self) -> Result<ProfilePair, ConfigError> {
        let sigma = self.case()?.sigma();
        ProfilePair::preset(&self.model.profile, sigma).map_err(|e| ConfigError::new("model.profile", e.to_string()))
    }

    pub fn gen_params(&self) -> Result<GenParams, ConfigError> {
        let n = self.model.n;
        let shift = |path: &str, v: &[f64]| -> Result<Vec<f64>, ConfigError> {
            match v.len() {
                0 => Ok(vec![0.0; n]),
                l if l == n => {
                    for x in v {
                        finite(path, *x)?;
                    }
                    Ok(v.to_vec())
                }
                l => Err(ConfigError::new(path, format!("expected {n} components, found {l}"))),
            }
        };
        let g = &self.gen;
        for (p, v) in [("gen.A", g.amp_a), ("gen.B", g.amp_b), ("gen.phi", g.phi), ("gen.psi", g.psi)] {
            finite(p, v)?;
        }
        if g.amp_a == 0.0 {
            return Err(ConfigError::new("gen.A", "AB must be nonzero"));
        }
        if g.amp_b == 0.0 {
            return Err(ConfigError::new("gen.B", "AB must be nonzero"));
        }
        Ok(GenParams { amp_a: g.amp_a, amp_b: g.amp_b, phi: g.phi, psi: g.psi, a: shift("gen.a", &g.a)?, b: shift("gen.b", &g.b)? })
    }

    pub fn gen_draw(&self) -> GenDraw {
        GenDraw { angle_max: self.gen.angle_max, shift_max: self.gen.shift_max, amp_min: self.gen.amp_min, amp_max: self.gen.amp_max }
    }

    pub fn sample_spec(&self) -> SampleSpec {
        SampleSpec { radius: self.sample.radius, margin: self.sample.margin, count: self.sample.count, seed: self.sample.seed }
    }

    pub fn og_spec(&self) -> OgSpec {
        OgSpec { amp: self.flows.og_amp, angle: self.flows.og_angle }
    }

    pub fn oscillator(&self) -> OscillatorSpec {
        let d = &self.dynamics;
        OscillatorSpec {
            omega: d.omega,
            amplitude: d.canonical_amplitude,
            t_end: d.periods * std::f64::consts::TAU / d.omega,
            dt_out: d.dt_out,
            abs_tol: d.integrator_tol,
            rel_tol: d.integrator_tol,
            ..OscillatorSpec::default()
        }
    }

    pub fn flow_spec(&self) -> FlowSpec {
        FlowSpec { abs_tol: self.flows.integrator_tol, rel_tol: self.flows.integrator_tol, ..FlowSpec::default() }
    }

    pub fn quadruples(&self) -> Result<Vec<AnsatzQuadruple>, ConfigError> {
        let p = &self.pde;
        let angle = match p.composed_angle.as_str() {
            "psi" => GtAngle::Psi,
            "phi" => GtAngle::Phi,
            other => return Err(ConfigError::new("pde.composed_angle", format!("unknown angle '{other}' (psi|phi)"))),
        };
        Ok(vec![
            AnsatzQuadruple::special(),
            AnsatzQuadruple::composed(1.0, 1.0, p.composed_phi, p.composed_psi, angle),
            AnsatzQuadruple::particular(p.particular_rho),
        ])
    }

    pub fn snyder_profiles(&self) -> Result<Vec<SnyderProfile>, ConfigError> {
        let printed = match self.snyder.rule.as_str() {
            "closing" => false,
            "printed" => true,
            other => return Err(ConfigError::new("snyder.rule", format!("unknown rule '{other}' (closing|printed)"))),
        };
        self.snyder
            .profiles
            .iter()
            .map(|name| {
                let p = SnyderProfile::preset(name).map_err(|e| ConfigError::new("snyder.profiles", e.to_string()))?;
                Ok(if printed { p.with_printed_rule() } else { p })
            })
            .collect()
    }

    pub fn dynamics_cases(&self) -> Result<Vec<ModelCase>, ConfigError> {
        self.dynamics
            .cases
            .iter()
            .map(|c| parse_case(c).ok_or_else(|| ConfigError::new("dynamics.cases", format!("unknown case '{c}'"))))
            .collect()
    }

    /// Checks every field against its domain and the case table; returns
    /// warnings for automatic adjustments.
    pub fn validate(&mut self) -> Result<Vec<String>, ConfigError> {
        let mut warnings = Vec::new();
        let params = self.model_params()?;
        self.profile()?;
        self.gen_params()?;
        match self.gen.frame.as_str() {
            "auto" => {}
            "trig" if params.case.is_mixed() => {
                warnings.push(format!(
                    "gen.frame: case {} has mixed signs; switching from trigonometric to hyperbolic generators",
                    params.case
                ));
                self.gen.frame = "hyperbolic".into();
            }
            "trig" => {}
            "hyperbolic" if !params.case.is_mixed() => {
                return Err(ConfigError::new("gen.frame", format!("hyperbolic generators need mixed signs, case is {}", params.case)));
            }
            "hyperbolic" => {}
            other => return Err(ConfigError::new("gen.frame", format!("unknown frame '{other}' (auto|trig|hyperbolic)"))),
        }
        if self.gen.amp_min > self.gen.amp_max || self.gen.amp_min * self.gen.amp_max <= 0.0 {
            return Err(ConfigError::new("gen.amp_min", "amplitude range must be nonempty and exclude zero"));
        }
        for (p, v) in [("gen.angle_max", self.gen.angle_max), ("gen.shift_max", self.gen.shift_max)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(ConfigError::new(p, "must be a finite real >= 0"));
            }
        }
        self.sample_spec().validate().map_err(|e| ConfigError::new("sample", e.to_string()))?;
        for (p, v) in [
            ("tol.algebra", self.tol.algebra),
            ("tol.jacobi", self.tol.jacobi),
            ("tol.universal_h", self.tol.universal_h),
            ("tol.generalized", self.tol.generalized),
            ("tol.pde", self.tol.pde),
            ("tol.flow", self.tol.flow),
            ("tol.fd", self.tol.fd),
            ("flows.integrator_tol", self.flows.integrator_tol),
            ("dynamics.omega", self.dynamics.omega),
            ("dynamics.periods", self.dynamics.periods),
            ("dynamics.dt_out", self.dynamics.dt_out),
            ("dynamics.integrator_tol", self.dynamics.integrator_tol),
            ("flows.bch_eps", self.flows.bch_eps),
            ("flows.bch_integrator_tol", self.flows.bch_integrator_tol),
        ] {
            positive(p, v)?;
        }
        for a in &self.flows.angles {
            finite("flows.angles", *a)?;
        }
        if self.flows.og_samples == 0 || self.flows.samples == 0 || self.flows.automorphism_samples == 0 || self.flows.bch_points == 0 {
            return Err(ConfigError::new("flows", "sample counts must be positive"));
        }
        if self.dynamics.amplitudes.iter().any(|a| !a.is_finite()) {
            return Err(ConfigError::new("dynamics.amplitudes", "must be finite"));
        }
        self.dynamics_cases()?;
        for (path, v) in [("pde.composed_phi", self.pde.composed_phi), ("pde.composed_psi", self.pde.composed_psi)] {
            finite(path, v)?;
        }
        if !(self.pde.particular_rho.abs() < 1.0) {
            return Err(ConfigError::new("pde.particular_rho", "must lie in (-1, 1)"));
        }
        self.quadruples()?;
        self.snyder_profiles()?;
        Ok(warnings)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let mut cfg = RunConfig::from_toml("").unwrap();
        assert!(cfg.validate().unwrap().is_empty());
        let p = cfg.model_params().unwrap();
        assert_eq!((p.n, p.alpha, p.beta, p.case), (4, 0.1, 0.1, ModelCase::PP));
        assert_eq!(cfg.model.profile, "phi2_zero");
    }

    #[test]
    fn zero_amplitude_is_rejected() {
        let mut cfg = RunConfig::from_toml("[gen]\nA = 0.0\n").unwrap();
        assert_eq!(cfg.validate().unwrap_err().to_string(), "gen.A: AB must be nonzero");
    }

    #[test]
    fn trig_frame_in_mixed_case_switches() {
        let mut cfg = RunConfig::from_toml("[model]\neps1 = -1\neps2 = 1\n[gen]\nframe = \"trig\"\n").unwrap();
        let w = cfg.validate().unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(cfg.gen.frame, "hyperbolic");
        let mut cfg = RunConfig::from_toml("[model]\neps1 = -1\neps2 = -1\n[gen]\nframe = \"trig\"\n").unwrap();
        assert!(cfg.validate().unwrap().is_empty());
        assert_eq!(cfg.case().unwrap(), ModelCase::MM);
    }

    #[test]
    fn flags_win() {
        let o = Overrides { alpha: Some(0.3), case: Some("mm".into()), samples: Some(7), ..Default::default() };
        let dir = std::env::temp_dir().join(format!("ypl-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.toml");
        std::fs::write(&path, "[model]\nalpha = 0.2\ncase = \"pm\"\n").unwrap();
        let (cfg, _) = RunConfig::load(Some(&path), &o).unwrap();
        assert_eq!(cfg.model.alpha, 0.3);
        assert_eq!(cfg.case().unwrap(), ModelCase::MM);
        assert_eq!(cfg.sample.count, 7);
        std::fs::remove_dir_all(dir).ok();
    }

    #[test]
    fn unknown_keys_and_bad_values() {
        assert!(RunConfig::from_toml("[model]\nbogus = 1\n").is_err());
        let mut cfg = RunConfig::from_toml("[model]\ncase = \"xx\"\n").unwrap();
        assert_eq!(cfg.validate().unwrap_err().path, "model.case");
        let mut cfg = RunConfig::from_toml("[gen]\na = [0.1]\n").unwrap();
        assert_eq!(cfg.validate().unwrap_err().path, "gen.a");
        let mut cfg = RunConfig::from_toml("[gen]\nframe = \"hyperbolic\"\n").unwrap();
        assert_eq!(cfg.validate().unwrap_err().path, "gen.frame");
    }
}
