//! The satisfaction relation.
//!
//! [`Checker`] evaluates formulas over one model. Action modalities are
//! answered by building the product update once per action model and
//! keeping a checker for the result, so repeated `[Δ,e]` lookups (and nested
//! ones) reuse earlier work.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use crate::action::{ActionModel, ActionRegistry, Update};
use crate::model::{Model, Valuation, WorldId};
use crate::syntax::{Formula, XSTAR};
use crate::{Error, Result};

pub struct Checker<'r> {
    model: Model,
    actions: &'r ActionRegistry,
    strict: bool,
    updates: RefCell<HashMap<String, Rc<Child<'r>>>>,
}

struct Child<'r> {
    checker: Checker<'r>,
    origin: HashMap<(WorldId, usize), WorldId>,
}

impl<'r> Checker<'r> {
    pub fn new(model: Model, actions: &'r ActionRegistry) -> Self {
        Checker {
            model,
            actions,
            strict: false,
            updates: RefCell::new(HashMap::new()),
        }
    }

    /// In strict mode `[Δ,e]φ` is an error, rather than vacuously true, at
    /// worlds where `pre(e)` fails.
    pub fn strict(mut self, strict: bool) -> Self {
        self.strict = strict;
        self
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn actions(&self) -> &'r ActionRegistry {
        self.actions
    }

    pub fn into_model(self) -> Model {
        self.model
    }

    pub fn satisfies(&self, w: WorldId, g: &Valuation, phi: &Formula) -> Result<bool> {
        self.model.signature.check_formula(phi)?;
        for name in phi.action_refs() {
            self.actions.get(&name)?;
        }
        let mut g = g.clone();
        self.eval(w, &mut g, phi)
    }

    /// Satisfaction of a closed formula; the valuation is irrelevant.
    pub fn holds(&self, w: WorldId, phi: &Formula) -> Result<bool> {
        self.satisfies(w, &Valuation::new(), phi)
    }

    /// Worlds where `phi` holds under `g`.
    pub fn truth_set(&self, g: &Valuation, phi: &Formula) -> Result<Vec<WorldId>> {
        let mut out = Vec::new();
        for w in 0..self.model.world_count() {
            if self.satisfies(w, g, phi)? {
                out.push(w);
            }
        }
        Ok(out)
    }

    pub(crate) fn eval(&self, w: WorldId, g: &mut Valuation, phi: &Formula) -> Result<bool> {
        let m = &self.model;
        Ok(match phi {
            Formula::Top => true,
            Formula::Pred(p, t) => m.holds_pred(p, m.extension(t, w, g), w),
            Formula::Net(a, b) => m.holds_net(m.extension(a, w, g), m.extension(b, w, g), w),
            Formula::Eq(a, b) => m.extension(a, w, g) == m.extension(b, w, g),
            Formula::Not(a) => !self.eval(w, g, a)?,
            Formula::And(a, b) => self.eval(w, g, a)? && self.eval(w, g, b)?,
            Formula::Know(t, a) => {
                // the index is evaluated at the current world
                let agent = m.extension(t, w, g);
                for &v in m.epistemic[agent].cell_of(w) {
                    if !self.eval(v, g, a)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Forall(x, a) => {
                for agent in 0..m.agent_count() {
                    g.push(x.clone(), agent);
                    let r = self.eval(w, g, a);
                    g.pop();
                    if !r? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Action {
                action,
                event,
                body,
            } => {
                let d = self.actions.get(action)?;
                let e = d.event_index(event).ok_or_else(|| Error::UnknownEvent {
                    action: action.clone(),
                    event: event.clone(),
                })?;
                if !self.eval(w, g, d.pre(e))? {
                    if self.strict {
                        return Err(Error::UndefinedDynamic {
                            action: action.clone(),
                            event: event.clone(),
                            world: m.worlds[w].clone(),
                        });
                    }
                    return Ok(true);
                }
                let child = self.child(d)?;
                let target = child.origin[&(w, e)];
                child.checker.eval(target, g, body)?
            }
        })
    }

    fn child(&self, d: &ActionModel) -> Result<Rc<Child<'r>>> {
        if let Some(c) = self.updates.borrow().get(d.name()) {
            return Ok(Rc::clone(c));
        }
        let Update { model, origin } = self.product(d)?;
        let origin = origin
            .into_iter()
            .enumerate()
            .map(|(i, we)| (we, i))
            .collect();
        let child = Rc::new(Child {
            checker: Checker::new(model, self.actions).strict(self.strict),
            origin,
        });
        self.updates
            .borrow_mut()
            .insert(d.name().to_string(), Rc::clone(&child));
        Ok(child)
    }

    /// Evaluates an edge condition at `w` with `x*` bound to `agent`.
    pub(crate) fn edge_holds(&self, w: WorldId, agent: usize, q: &Formula) -> Result<bool> {
        let mut g = Valuation::new();
        g.push(XSTAR.to_string(), agent);
        self.eval(w, &mut g, q)
    }
}

/// `M, w ⊨_g φ` for formulas without action modalities (or whose action
/// models are all in `actions`).
pub fn satisfies(
    m: &Model,
    actions: &ActionRegistry,
    w: WorldId,
    g: &Valuation,
    phi: &Formula,
) -> Result<bool> {
    Checker::new(m.clone(), actions).satisfies(w, g, phi)
}
