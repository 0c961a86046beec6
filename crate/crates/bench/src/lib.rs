//! Inputs shared by the benchmarks.

use dtml_core::action::ActionModel;
use dtml_core::kdl::{KdlModel, KdlUpdate, KdlUpdates};
use dtml_core::random::{self, ModelShape};
use dtml_core::syntax::{Formula, Term};
use dtml_core::Model;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random model with `agents` agents and `worlds` worlds exactly.
pub fn model(seed: u64, agents: usize, worlds: usize) -> Model {
    let mut rng = rng(seed);
    loop {
        let m = random::random_model(
            &mut rng,
            &ModelShape {
                max_agents: agents,
                max_worlds: worlds,
                constants: agents,
                predicates: 2,
            },
        );
        if m.agent_count() == agents && m.world_count() == worlds {
            return m;
        }
    }
}

/// Four events keyed on who is `P0`. Events 1 and 2 look alike to
/// everyone, as do 3 and 4; the classes are told apart. Fixed classes keep
/// the updated relations equivalences on any model.
pub fn action(m: &Model) -> ActionModel {
    let events: Vec<String> = (1..=4).map(|i| i.to_string()).collect();
    let mut d = ActionModel::new("bench", events).expect("four events");
    let c0 = Term::cst(m.signature.constants()[0].clone());
    let p0 = || Formula::pred("P0", c0.clone());
    d.set_pre(0, p0());
    d.set_pre(1, Formula::not(p0()));
    d.set_pre(2, Formula::exists("x", Formula::pred("P1", Term::var("x"))));
    for (e, f) in [(0, 1), (1, 0), (2, 3), (3, 2)] {
        d.set_edge(e, f, Formula::Top);
    }
    d
}

/// A KDL model with one random learning update `l` and one transformation
/// `d` registered.
pub fn kdl(seed: u64) -> (KdlModel, KdlUpdates) {
    let mut rng = rng(seed);
    let m = random::random_kdl_model(&mut rng, 3, 4, 2);
    let mut updates = KdlUpdates::new();
    let d = random::random_transformation(&mut rng, &m, &[]);
    updates.insert("d", KdlUpdate::Transformation(d)).expect("fresh name");
    let mut l = random::random_learning(&mut rng, &m, &[], 1);
    if l.formulas.is_empty() {
        l.formulas.push(dtml_core::kdl::KdlFormula::Top);
    }
    updates.insert("l", KdlUpdate::Learning(l)).expect("fresh name");
    (m, updates)
}
