//! Generator sets realized on canonical phase space.
//!
//! Every generator is a [`ScalarField`] addressed by a [`GenId`]. Sets carry
//! the radicands of their square roots as sampling guards.

mod generalized;
mod ids;
mod profiles;
mod snyder;
mod yang;

use alloc::string::String;
use alloc::vec::Vec;

pub use generalized::{
    born_dual, born_dual_params, generalized_generators, htilde_closed_form, htilde_printed_form, inverse_transform, DerivedConstants,
    DualMode, Frame, GenParams,
};
pub use ids::GenId;
pub use profiles::{solve_phi2, Profile, ProfilePair};
pub use snyder::{snyder_realization, SnyderProfile};
pub use yang::{radicand_signs, universal_h, yang_special};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::phase::ModelParams;

/// Which family a set realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Yang,
    Generalized,
    Snyder,
}

impl Family {
    pub fn label(self) -> &'static str {
        match self {
            Family::Yang => "yang",
            Family::Generalized => "generalized",
            Family::Snyder => "snyder",
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeneratorSet {
    pub family: Family,
    pub params: ModelParams,
    pub gen_params: Option<GenParams>,
    pub constants: Option<DerivedConstants>,
    /// Free-form description of the profile or preset used.
    pub profile: String,
    /// Some first derivatives come from finite differences of a flow.
    pub fd_jets: bool,
    fields: Vec<(GenId, ScalarField)>,
    guards: Vec<ScalarField>,
}

impl GeneratorSet {
    pub fn new(family: Family, params: ModelParams, profile: impl Into<String>) -> Self {
        GeneratorSet {
            family,
            params,
            gen_params: None,
            constants: None,
            profile: profile.into(),
            fd_jets: false,
            fields: Vec::new(),
            guards: Vec::new(),
        }
    }

    /// Inserts or replaces a generator.
    pub fn insert(&mut self, id: GenId, field: ScalarField) {
        let field = field.renamed(alloc::format!("{id}"));
        match self.fields.iter_mut().find(|(k, _)| *k == id) {
            Some(slot) => slot.1 = field,
            None => self.fields.push((id, field)),
        }
    }

    pub fn add_guard(&mut self, guard: ScalarField) {
        self.guards.push(guard);
    }

    pub fn get(&self, id: GenId) -> Result<&ScalarField> {
        self.fields.iter().find(|(k, _)| *k == id).map(|(_, f)| f).ok_or(Error::MissingGenerator(id))
    }

    pub fn contains(&self, id: GenId) -> bool {
        self.fields.iter().any(|(k, _)| *k == id)
    }

    pub fn ids(&self) -> Vec<GenId> {
        self.fields.iter().map(|(k, _)| *k).collect()
    }

    pub fn fields(&self) -> &[(GenId, ScalarField)] {
        &self.fields
    }

    pub fn guards(&self) -> &[ScalarField] {
        &self.guards
    }

    /// Adds the undeformed Lorentz generators `M_{μν}`, `μ < ν`.
    pub fn insert_lorentz(&mut self) {
        let n = self.params.n;
        for mu in 0..n {
            for nu in mu + 1..n {
                self.insert(GenId::M(mu, nu), ScalarField::lorentz(mu, nu));
            }
        }
    }

    /// Applies `f` to every generator, keeping ids and guards.
    pub fn map_fields(&self, mut f: impl FnMut(GenId, &ScalarField) -> ScalarField) -> Self {
        let mut out = self.clone();
        out.fields = self.fields.iter().map(|(id, g)| (*id, f(*id, g).renamed(alloc::format!("{id}")))).collect();
        out
    }

    /// Applies `f` to every sampling guard.
    pub fn map_guards(&self, f: impl FnMut(&ScalarField) -> ScalarField) -> Self {
        let mut out = self.clone();
        out.guards = self.guards.iter().map(f).collect();
        out
    }
}

/// The canonical set `x̂ = x`, `p̂ = p`, `h = 1`.
pub fn canonical_set(params: ModelParams) -> GeneratorSet {
    let mut set = GeneratorSet::new(Family::Yang, params, "canonical");
    for mu in 0..params.n {
        set.insert(GenId::XHat(mu), ScalarField::x(mu));
        set.insert(GenId::PHat(mu), ScalarField::p(mu));
    }
    set.insert(GenId::H, ScalarField::constant(1.0));
    set.insert_lorentz();
    set
}
