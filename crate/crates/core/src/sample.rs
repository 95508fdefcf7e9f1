//! Seeded rejection sampling of phase points inside radicand guards.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::phase::PhasePoint;
use crate::realizations::GenParams;

/// Consecutive rejections tolerated before giving up.
pub const MAX_CONSECUTIVE_REJECTS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSpec {
    /// Half-width of the box `[−R, R]^{2n}`.
    pub radius: f64,
    /// Minimum accepted guard value.
    pub margin: f64,
    pub count: usize,
    pub seed: u64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec { radius: 1.0, margin: 1e-6, count: 1000, seed: 0 }
    }
}

impl SampleSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::invalid("sample radius must be > 0"));
        }
        if !(self.margin > 0.0 && self.margin < 1.0) {
            return Err(Error::invalid("sample margin must lie in (0, 1)"));
        }
        if self.count == 0 {
            return Err(Error::invalid("sample count must be positive"));
        }
        Ok(())
    }
}

/// Endless stream of accepted points.
pub struct Sampler {
    rng: ChaCha8Rng,
    n: usize,
    radius: f64,
    margin: f64,
    guards: Vec<ScalarField>,
    rejected: u64,
}

impl Sampler {
    pub fn new(spec: &SampleSpec, n: usize, guards: &[ScalarField]) -> Result<Self> {
        spec.validate()?;
        Ok(Sampler {
            rng: ChaCha8Rng::seed_from_u64(spec.seed),
            n,
            radius: spec.radius,
            margin: spec.margin,
            guards: guards.to_vec(),
            rejected: 0,
        })
    }

    /// Total rejections so far.
    pub fn rejected(&self) -> u64 {
        self.rejected
    }

    fn accepts(&self, pt: &PhasePoint) -> bool {
        self.guards.iter().all(|g| matches!(g.eval(pt), Ok(v) if v >= self.margin))
    }

    pub fn next_point(&mut self) -> Result<PhasePoint> {
        let mut streak = 0u64;
        loop {
            let flat: Vec<f64> = (0..2 * self.n).map(|_| self.rng.random_range(-self.radius..=self.radius)).collect();
            let pt = PhasePoint::from_flat(&flat);
            if self.accepts(&pt) {
                return Ok(pt);
            }
            self.rejected += 1;
            streak += 1;
            if streak >= MAX_CONSECUTIVE_REJECTS {
                return Err(Error::SamplingExhausted { attempts: streak });
            }
        }
    }
}

impl Iterator for Sampler {
    type Item = Result<PhasePoint>;

    fn next(&mut self) -> Option<Self::Item> {
        Some(self.next_point())
    }
}

/// `spec.count` accepted points in dimension `n`.
pub fn sample_points(spec: &SampleSpec, n: usize, guards: &[ScalarField]) -> Result<Vec<PhasePoint>> {
    let mut s = Sampler::new(spec, n, guards)?;
    (0..spec.count).map(|_| s.next_point()).collect()
}

/// Ranges of random generator parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenDraw {
    /// `|φ|, |ψ| ≤ angle_max`.
    pub angle_max: f64,
    /// `|a_μ|, |b_μ| ≤ shift_max`.
    pub shift_max: f64,
    /// `A, B ∈ [amp_min, amp_max]`.
    pub amp_min: f64,
    pub amp_max: f64,
}

impl Default for GenDraw {
    fn default() -> Self {
        GenDraw { angle_max: 0.3, shift_max: 0.2, amp_min: 0.7, amp_max: 1.3 }
    }
}

/// `count` seeded draws of [`GenParams`] in dimension `n`.
pub fn draw_gen_params(draw: &GenDraw, n: usize, count: usize, seed: u64) -> Vec<GenParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sym = |m: f64| if m > 0.0 { rng.random_range(-m..=m) } else { 0.0 };
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let phi = sym(draw.angle_max);
        let psi = sym(draw.angle_max);
        let a: Vec<f64> = (0..n).map(|_| sym(draw.shift_max)).collect();
        let b: Vec<f64> = (0..n).map(|_| sym(draw.shift_max)).collect();
        let mid = 0.5 * (draw.amp_min + draw.amp_max);
        let half = 0.5 * (draw.amp_max - draw.amp_min);
        let amp_a = mid + sym(half);
        let amp_b = mid + sym(half);
        out.push(GenParams { amp_a, amp_b, phi, psi, a, b });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn guard(k: f64, field: ScalarField) -> ScalarField {
        field.map("guard", move |s| Ok(1.0 - s * k))
    }

    #[test]
    fn empty_guards() {
        let spec = SampleSpec { count: 3, ..Default::default() };
        let pts = sample_points(&spec, 4, &[]).unwrap();
        assert_eq!(pts.len(), 3);
        assert!(pts.iter().all(|p| p.to_flat().iter().all(|v| v.abs() <= 1.0)));
    }

    #[test]
    fn loose_guard_accepts_everything() {
        let spec = SampleSpec { count: 200, ..Default::default() };
        let g = guard(0.01, ScalarField::p_squared());
        let mut s = Sampler::new(&spec, 4, &[g.clone()]).unwrap();
        for _ in 0..200 {
            let p = s.next_point().unwrap();
            assert!(g.eval(&p).unwrap() >= spec.margin);
        }
        assert_eq!(s.rejected(), 0);
    }

    #[test]
    fn tight_guard_fails_cleanly() {
        let spec = SampleSpec { count: 10, margin: 0.99, ..Default::default() };
        let g = guard(4.0, ScalarField::x_squared());
        match sample_points(&spec, 4, &[g.clone()]) {
            Ok(pts) => assert!(pts.iter().all(|p| g.eval(p).unwrap() >= 0.99)),
            Err(e) => assert!(matches!(e, Error::SamplingExhausted { .. })),
        }
    }

    #[test]
    fn unsatisfiable_guard_exhausts() {
        let spec = SampleSpec { count: 1, margin: 0.99, ..Default::default() };
        let r = sample_points(&spec, 1, &[ScalarField::constant(0.5)]);
        assert!(matches!(r, Err(Error::SamplingExhausted { attempts }) if attempts == MAX_CONSECUTIVE_REJECTS));
    }

    #[test]
    fn deterministic_per_seed() {
        let spec = SampleSpec { count: 5, seed: 42, ..Default::default() };
        let a = sample_points(&spec, 4, &[]).unwrap();
        let b = sample_points(&spec, 4, &[]).unwrap();
        assert_eq!(a, b);
        let c = sample_points(&SampleSpec { seed: 43, ..spec }, 4, &[]).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn gen_draws_in_range() {
        let d = GenDraw::default();
        let draws = draw_gen_params(&d, 4, 20, 1);
        assert_eq!(draws, draw_gen_params(&d, 4, 20, 1));
        for g in &draws {
            assert!(g.phi.abs() <= 0.3 && g.psi.abs() <= 0.3);
            assert!(g.a.iter().chain(&g.b).all(|v| v.abs() <= 0.2));
            assert!((0.7..=1.3).contains(&g.amp_a) && (0.7..=1.3).contains(&g.amp_b));
            g.validate(4).unwrap();
        }
    }
}
