//! Poisson brackets, Jacobi residuals and Hamiltonian flows.
//!
//! With lowered indices the canonical bracket is
//! `{F, G} = Σ_μ η_{μμ} (∂F/∂x_μ ∂G/∂p_μ − ∂F/∂p_μ ∂G/∂x_μ)`, so that
//! `{x_α, p_β} = η_{αβ}`. The derivation `L_K f = {K, f}` generates the flow
//! `dz/dt = {K, z}`, and `e^{t L_K} f = f ∘ Φ_t`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::jet::Jet;
use crate::ode::{self, Tolerances};
use crate::phase::{metric_sign, PhasePoint};

/// Step of the central differences taken through a flow.
pub const FLOW_FD_STEP: f64 = 1e-5;

/// Contracts two jets of depth `d + 1` into their bracket at depth `d`.
pub fn contract(f: &Jet, g: &Jet) -> Jet {
    let n = f.vars() / 2;
    let mut acc = Jet::zero(f.vars(), f.depth() - 1);
    for mu in 0..n {
        let t = &f.partial(mu) * &g.partial(n + mu) - &f.partial(n + mu) * &g.partial(mu);
        if metric_sign(mu) < 0.0 {
            acc -= &t;
        } else {
            acc += &t;
        }
    }
    acc
}

/// Real bracket from two depth-1 gradients.
pub fn contract_gradients(gf: &[f64], gg: &[f64]) -> f64 {
    let n = gf.len() / 2;
    (0..n).map(|mu| metric_sign(mu) * (gf[mu] * gg[n + mu] - gf[n + mu] * gg[mu])).sum()
}

/// Coordinates one level deeper: each coordinate becomes its own variable
/// in the new level.
pub fn lift_coords(coords: &[Jet]) -> Vec<Jet> {
    let vars = coords.len();
    coords
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let zero = Jet::zero(vars, c.depth());
            let mut partials = vec![zero; vars];
            partials[i] = c.constant_like(1.0);
            Jet::from_parts(c, &partials)
        })
        .collect()
}

pub fn poisson_bracket(f: &ScalarField, g: &ScalarField, pt: &PhasePoint) -> Result<f64> {
    let fj = f.jet(pt)?;
    let gj = g.jet(pt)?;
    Ok(contract_gradients(&fj.gradient(), &gj.gradient()))
}

/// `{F, G}` as a field; nested brackets differentiate one level deeper.
pub fn bracket_field(f: &ScalarField, g: &ScalarField) -> ScalarField {
    let (f, g) = (f.clone(), g.clone());
    let name = format!("{{{},{}}}", f.name(), g.name());
    ScalarField::new(name, move |c| {
        let lifted = lift_coords(c);
        let fj = f.eval_at(&lifted)?;
        let gj = g.eval_at(&lifted)?;
        Ok(contract(&fj, &gj))
    })
}

/// `|{A,{B,C}} + {B,{C,A}} + {C,{A,B}}|` at a point.
pub fn jacobi_residual(a: &ScalarField, b: &ScalarField, c: &ScalarField, pt: &PhasePoint) -> Result<f64> {
    let s1 = poisson_bracket(a, &bracket_field(b, c), pt)?;
    let s2 = poisson_bracket(b, &bracket_field(c, a), pt)?;
    let s3 = poisson_bracket(c, &bracket_field(a, b), pt)?;
    Ok((s1 + s2 + s3).abs())
}

/// Same residual from depth-2 jets of the three fields.
pub fn jacobi_from_jets(a: &Jet, b: &Jet, c: &Jet) -> f64 {
    let bc = contract(b, c);
    let ca = contract(c, a);
    let ab = contract(a, b);
    let s = contract(&a.value(), &bc).real() + contract(&b.value(), &ca).real() + contract(&c.value(), &ab).real();
    s.abs()
}

/// Time and tolerances of a flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowSpec {
    pub t: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_steps: usize,
}

impl Default for FlowSpec {
    fn default() -> Self {
        FlowSpec { t: 1.0, abs_tol: 1e-10, rel_tol: 1e-10, max_steps: 100_000 }
    }
}

impl FlowSpec {
    pub fn with_time(t: f64) -> Self {
        FlowSpec { t, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v > 0.0 && v <= 1e-2;
        if !ok(self.abs_tol) || !ok(self.rel_tol) {
            return Err(Error::invalid("flow tolerances must lie in (0, 1e-2]"));
        }
        if self.max_steps < 1 {
            return Err(Error::invalid("max_steps must be at least 1"));
        }
        if !self.t.is_finite() {
            return Err(Error::invalid("flow time must be finite"));
        }
        Ok(())
    }

    fn tolerances(&self) -> Tolerances {
        Tolerances { abs: self.abs_tol, rel: self.rel_tol }
    }
}

/// Hamiltonian vector field `z ↦ {K, z}` of a generator.
pub fn hamiltonian_vector_field(k: &ScalarField, y: &[f64], dy: &mut [f64]) -> Result<()> {
    let n = y.len() / 2;
    let vars = y.len();
    let coords: Vec<Jet> = y.iter().enumerate().map(|(i, v)| Jet::variable(vars, 1, i, *v)).collect();
    let grad = k.eval_at(&coords)?.gradient();
    for mu in 0..n {
        let s = metric_sign(mu);
        dy[mu] = -s * grad[n + mu];
        dy[n + mu] = s * grad[mu];
    }
    Ok(())
}

fn flow_rhs(k: &ScalarField) -> impl FnMut(f64, &[f64], &mut [f64]) -> Result<()> + '_ {
    move |_t, y, dy| hamiltonian_vector_field(k, y, dy)
}

/// Endpoint of the flow of `K` for time `spec.t`, plus the accepted steps.
pub fn flow_flat(k: &ScalarField, y0: &[f64], spec: &FlowSpec) -> Result<(Vec<f64>, Vec<f64>)> {
    spec.validate()?;
    if spec.t == 0.0 {
        return Ok((y0.to_vec(), Vec::new()));
    }
    ode::integrate(flow_rhs(k), 0.0, y0, spec.t, spec.tolerances(), spec.max_steps)
}

pub fn hamiltonian_flow(k: &ScalarField, pt: &PhasePoint, spec: &FlowSpec) -> Result<PhasePoint> {
    let (y, _) = flow_flat(k, &pt.to_flat(), spec)?;
    Ok(PhasePoint::from_flat(&y))
}

/// Flow endpoint and its Jacobian `∂Φ_i/∂z_j` by central differences of
/// step [`FLOW_FD_STEP`], replaying the base trajectory's step sequence.
pub fn flow_jacobian(k: &ScalarField, y0: &[f64], spec: &FlowSpec) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let dim = y0.len();
    let (y, steps) = flow_flat(k, y0, spec)?;
    let mut jac = vec![vec![0.0; dim]; dim];
    if steps.is_empty() {
        for (i, row) in jac.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        return Ok((y, jac));
    }
    let h = FLOW_FD_STEP;
    let mut probe = y0.to_vec();
    for j in 0..dim {
        probe[j] = y0[j] + h;
        let plus = ode::replay(flow_rhs(k), 0.0, &probe, &steps)?;
        probe[j] = y0[j] - h;
        let minus = ode::replay(flow_rhs(k), 0.0, &probe, &steps)?;
        probe[j] = y0[j];
        for i in 0..dim {
            jac[i][j] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    Ok((y, jac))
}

/// Pushes depth-≤1 coordinate jets through a map with known value and
/// Jacobian at the coordinates' values.
pub fn chain_coords(coords: &[Jet], image: &[f64], jac: &[Vec<f64>]) -> Result<Vec<Jet>> {
    let depth = coords[0].depth();
    match depth {
        0 => Ok(image.iter().map(|v| coords[0].constant_like(*v)).collect()),
        1 => {
            let vars = coords[0].vars();
            Ok(image
                .iter()
                .zip(jac)
                .map(|(w, row)| {
                    let mut out = Jet::constant(vars, 1, *w);
                    for (j, c) in coords.iter().enumerate() {
                        if row[j] != 0.0 {
                            let mut d = c.clone();
                            d += -c.real();
                            out += &(d * row[j]);
                        }
                    }
                    out
                })
                .collect())
        }
        _ => Err(Error::Unsupported("flow pullbacks carry first derivatives only")),
    }
}

/// The field `z ↦ f(Φ^K_t(z))`, i.e. `e^{t L_K} f`.
///
/// Values come from the integrated flow; first derivatives from central
/// differences of the flow map (see [`flow_jacobian`]), the one place in the
/// crate where jets are not exact.
pub fn pullback(k: &ScalarField, t: f64, f: &ScalarField, spec: &FlowSpec) -> ScalarField {
    let (k, f) = (k.clone(), f.clone());
    let spec = FlowSpec { t, ..*spec };
    let name = format!("exp({t}L[{}]){}", k.name(), f.name());
    ScalarField::new(name, move |c| {
        if spec.t == 0.0 {
            return f.eval_at(c);
        }
        f.eval_at(&flow_coords(&k, &spec, c)?)
    })
}

/// Coordinate jets moved by the flow of `K` for time `spec.t`; shared by
/// several pullbacks evaluated at the same point.
pub fn flow_coords(k: &ScalarField, spec: &FlowSpec, c: &[Jet]) -> Result<Vec<Jet>> {
    if spec.t == 0.0 {
        return Ok(c.to_vec());
    }
    let y0: Vec<f64> = c.iter().map(Jet::real).collect();
    match c[0].depth() {
        0 => {
            let (y, _) = flow_flat(k, &y0, spec)?;
            Ok(y.iter().map(|v| c[0].constant_like(*v)).collect())
        }
        _ => {
            let (y, jac) = flow_jacobian(k, &y0, spec)?;
            chain_coords(c, &y, &jac)
        }
    }
}
