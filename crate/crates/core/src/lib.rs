//! Dynamic term-modal logic for epistemic social networks.
//!
//! * [`syntax`]: signatures, terms, formulas, substitution.
//! * [`model`] and [`semantics`]: finite models with non-rigid names and the
//!   satisfaction relation.
//! * [`action`]: action models with pre-, post- and edge-conditions and
//!   their product update.
//! * [`hybrid`]: hybrid network models, their indexical language and the
//!   translation into term-modal logic.
//! * [`kdl`]: feature models with diffusion and learning updates, their
//!   compilation into action models, bounded morphisms and the static axioms
//!   that characterise the image class.
//! * [`random`]: seeded generators used by the differential suites.

// worlds and agents are indices into several parallel tables at once
#![allow(clippy::needless_range_loop)]

pub mod action;
pub mod hybrid;
pub mod kdl;
pub mod model;
pub mod morphism;
pub mod random;
pub mod semantics;
pub mod syntax;

pub use action::{ActionModel, ActionRegistry, PointedAction, PointedModel, Update};
pub use hybrid::{HybridFormula, HybridModel, NetworkFrame, Pivot};
pub use model::{AgentId, Model, Partition, Valuation, WorldId};
pub use semantics::Checker;
pub use syntax::{Formula, GroundAtom, Signature, Term, XSTAR};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("signature: {0}")]
    Signature(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("unknown action model `{0}`")]
    UnknownAction(String),
    #[error("action model `{action}` has no event `{event}`")]
    UnknownEvent { action: String, event: String },
    #[error("invalid action model `{action}`: {reason}")]
    InvalidAction { action: String, reason: String },
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("update yields empty model")]
    EmptyUpdate,
    #[error("update undefined at actual world: {world} does not satisfy pre({event}) = {pre}")]
    NotApplicable {
        event: String,
        world: String,
        pre: String,
    },
    #[error("[{action}:{event}] is undefined at {world}")]
    UndefinedDynamic {
        action: String,
        event: String,
        world: String,
    },
    #[error("relation of {agent} is not an equivalence after the update: {detail}")]
    NotEquivalence { agent: String, detail: String },
    #[error("hybrid: {0}")]
    Hybrid(String),
    #[error("pivot collision: `{0}` occurs in the formula")]
    PivotCollision(String),
    #[error("Φ not pairwise inconsistent here: two members hold at ({world}, {agent})")]
    NotPairwiseInconsistent { world: String, agent: String },
    #[error("invalid KDL model: {0}")]
    InvalidKdl(String),
    #[error("valuation blow-up: {grounded} grounded formulas give 2^{grounded} events, above the cap of {cap}")]
    EventCap { grounded: usize, cap: usize },
    #[error("{0}")]
    Other(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
