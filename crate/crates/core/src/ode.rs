//! Adaptive Dormand–Prince 5(4) integration.
//!
//! Accepted step sizes are recorded so a neighbouring initial condition can
//! be pushed through the identical discrete map with [`replay`]; finite
//! differences of replayed trajectories are then smooth in the initial data.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];

// fifth-order weights are the last row of A
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { abs: 1e-10, rel: 1e-10 }
    }
}

/// Right-hand side `dy/dt = f(t, y)`.
pub trait Rhs {
    fn eval(&mut self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()>;
}

impl<F> Rhs for F
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    fn eval(&mut self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        self(t, y, dy)
    }
}

/// Stateful adaptive integrator.
pub struct Integrator<R> {
    rhs: R,
    tol: Tolerances,
    max_steps: usize,
    t: f64,
    y: Vec<f64>,
    h: Option<f64>,
    attempts: usize,
    steps: Vec<f64>,
}

impl<R: Rhs> Integrator<R> {
    pub fn new(rhs: R, t0: f64, y0: &[f64], tol: Tolerances, max_steps: usize) -> Self {
        Integrator { rhs, tol, max_steps, t: t0, y: y0.to_vec(), h: None, attempts: 0, steps: Vec::new() }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> &[f64] {
        &self.y
    }

    /// Accepted step sizes so far (signed).
    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<f64>) {
        (self.y, self.steps)
    }

    fn scale(&self, i: usize, y_new: &[f64]) -> f64 {
        self.tol.abs + self.tol.rel * self.y[i].abs().max(y_new[i].abs())
    }

    fn initial_step(&mut self, dir: f64, span: f64) -> Result<f64> {
        let n = self.y.len();
        let mut f0 = vec![0.0; n];
        self.rhs.eval(self.t, &self.y, &mut f0)?;
        let sc: Vec<f64> = self.y.iter().map(|v| self.tol.abs + self.tol.rel * v.abs()).collect();
        let rms = |v: &[f64]| libm::sqrt(v.iter().zip(&sc).map(|(a, s)| (a / s) * (a / s)).sum::<f64>() / n as f64);
        let d0 = rms(&self.y);
        let d1 = rms(&f0);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(span);
        let y1: Vec<f64> = self.y.iter().zip(&f0).map(|(y, f)| y + dir * h0 * f).collect();
        let mut f1 = vec![0.0; n];
        self.rhs.eval(self.t + dir * h0, &y1, &mut f1)?;
        let diff: Vec<f64> = f1.iter().zip(&f0).map(|(a, b)| a - b).collect();
        let d2 = rms(&diff) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            libm::pow(0.01 / d1.max(d2), 1.0 / 5.0)
        };
        Ok((100.0 * h0).min(h1).min(span))
    }

    /// Advances exactly to `t_end`.
    pub fn advance_to(&mut self, t_end: f64) -> Result<()> {
        let span = t_end - self.t;
        if span == 0.0 {
            return Ok(());
        }
        let dir = span.signum();
        let n = self.y.len();
        let mut h = match self.h {
            Some(h) => h.abs(),
            None => self.initial_step(dir, span.abs())?,
        };
        let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
        let mut stage = vec![0.0; n];
        let mut y5 = vec![0.0; n];
        loop {
            let remaining = (t_end - self.t) * dir;
            if remaining <= 0.0 {
                break;
            }
            let last = h >= remaining;
            let h_try = if last { remaining } else { h };
            self.attempts += 1;
            if self.attempts > self.max_steps {
                return Err(Error::StepLimitExceeded { steps: self.max_steps, t: self.t });
            }
            let hs = dir * h_try;
            match dp_step(&mut self.rhs, self.t, &self.y, hs, &mut k, &mut stage, &mut y5) {
                Ok(()) => {}
                Err(e) if e.is_domain() => {
                    // a trial stage left the domain: retreat before giving up
                    h = h_try * 0.25;
                    if h < 1e-14 * (1.0 + self.t.abs()) {
                        return Err(e);
                    }
                    continue;
                }
                Err(e) => return Err(e),
            }
            let mut acc = 0.0;
            for i in 0..n {
                let mut e = 0.0;
                for (s, ks) in k.iter().enumerate() {
                    e += (B5[s] - B4[s]) * ks[i];
                }
                let r = hs * e / self.scale(i, &y5);
                acc += r * r;
            }
            let err = libm::sqrt(acc / n as f64);
            if err <= 1.0 {
                self.t = if last { t_end } else { self.t + hs };
                self.y.copy_from_slice(&y5);
                self.steps.push(hs);
                let factor = if err == 0.0 { 5.0 } else { (0.9 * libm::pow(err, -0.2)).clamp(0.2, 5.0) };
                // keep the unclipped size for the next call
                h = if last { h.max(h_try * factor) } else { h_try * factor };
            } else {
                h = h_try * (0.9 * libm::pow(err, -0.2)).max(0.2);
            }
            if !h.is_finite() || h == 0.0 {
                return Err(Error::StepLimitExceeded { steps: self.attempts, t: self.t });
            }
        }
        self.h = Some(h);
        Ok(())
    }
}

fn dp_step<R: Rhs>(
    rhs: &mut R,
    t: f64,
    y: &[f64],
    h: f64,
    k: &mut [Vec<f64>],
    stage: &mut [f64],
    y5: &mut [f64],
) -> Result<()> {
    let n = y.len();
    rhs.eval(t, y, &mut k[0])?;
    for s in 1..7 {
        for i in 0..n {
            let mut acc = 0.0;
            for (j, kj) in k.iter().enumerate().take(s) {
                acc += A[s][j] * kj[i];
            }
            stage[i] = y[i] + h * acc;
        }
        rhs.eval(t + C[s] * h, stage, &mut k[s])?;
    }
    // the seventh stage point is the fifth-order solution
    y5.copy_from_slice(stage);
    Ok(())
}

/// Integrates from `t0` to `t1`, returning the end state and accepted steps.
pub fn integrate<R: Rhs>(rhs: R, t0: f64, y0: &[f64], t1: f64, tol: Tolerances, max_steps: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut it = Integrator::new(rhs, t0, y0, tol, max_steps);
    it.advance_to(t1)?;
    Ok(it.into_parts())
}

/// Pushes `y0` through the fixed step sequence `steps` (fifth-order map).
pub fn replay<R: Rhs>(mut rhs: R, t0: f64, y0: &[f64], steps: &[f64]) -> Result<Vec<f64>> {
    let n = y0.len();
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    let mut stage = vec![0.0; n];
    let mut y = y0.to_vec();
    let mut y5 = vec![0.0; n];
    let mut t = t0;
    for &h in steps {
        dp_step(&mut rhs, t, &y, h, &mut k, &mut stage, &mut y5)?;
        y.copy_from_slice(&y5);
        t += h;
    }
    Ok(y)
}
