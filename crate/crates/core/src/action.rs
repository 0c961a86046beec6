//! Action models and product update.

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::model::{Model, Partition, Valuation, WorldId, WorldInterp};
use crate::semantics::Checker;
use crate::syntax::{Formula, GroundAtom, Postconditions, Signature, Term, XSTAR};
use crate::{Error, Result};

/// `x* ≐ x*`, the edge condition of every event with itself.
pub fn reflexive_edge() -> Formula {
    Formula::eq(Term::xstar(), Term::xstar())
}

/// `¬(x* ≐ x*)`: nobody confuses the two events.
pub fn distinguishing_edge() -> Formula {
    Formula::not(reflexive_edge())
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Edges {
    /// Explicit entries; distinct pairs not listed get `default`, the
    /// diagonal gets `x* ≐ x*`.
    Table {
        explicit: BTreeMap<(usize, usize), Formula>,
        default: Formula,
    },
    /// Events are truth-value assignments to formulas each owned by a
    /// constant. Two distinct events are confused by `x*` unless `x*` is
    /// linked to an owner on whose formulas they disagree. The diagonal is `⊤`.
    Disagreement {
        owners: Vec<String>,
        valuations: Vec<Vec<bool>>,
    },
}

/// `Δ = (E, Q, pre, post)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionModel {
    name: String,
    events: Vec<String>,
    index: HashMap<String, usize>,
    pre: Vec<Formula>,
    post: Vec<Postconditions>,
    edges: Edges,
}

impl ActionModel {
    /// Events with precondition `⊤`, identity postconditions and fully
    /// distinguishing edges.
    pub fn new(name: impl Into<String>, events: Vec<String>) -> Result<Self> {
        let name = name.into();
        if events.is_empty() {
            return Err(Error::InvalidAction {
                action: name,
                reason: "no events".into(),
            });
        }
        let mut index = HashMap::with_capacity(events.len());
        for (i, e) in events.iter().enumerate() {
            if index.insert(e.clone(), i).is_some() {
                return Err(Error::InvalidAction {
                    action: name,
                    reason: format!("event `{e}` declared twice"),
                });
            }
        }
        let n = events.len();
        Ok(ActionModel {
            name,
            events,
            index,
            pre: vec![Formula::Top; n],
            post: vec![Postconditions::new(); n],
            edges: Edges::Table {
                explicit: BTreeMap::new(),
                default: distinguishing_edge(),
            },
        })
    }

    /// A single event with precondition `⊤` that changes nothing.
    pub fn identity(name: impl Into<String>) -> Self {
        Self::new(name, vec!["e".into()]).expect("one event")
    }

    /// A single event `e` with precondition `phi`: public announcement.
    pub fn announcement(name: impl Into<String>, phi: Formula) -> Self {
        let mut d = Self::identity(name);
        d.pre[0] = phi;
        d
    }

    /// The action model of a learning-style update: one event per
    /// valuation of some grounded formulas, each owned by a constant.
    /// `Q(e,e) = ⊤`, and for distinct events `Q(e,f)` is the conjunction of
    /// `¬N(x*, c)` over owners `c` of a formula on which they disagree.
    pub fn from_valuations(
        name: impl Into<String>,
        events: Vec<String>,
        pre: Vec<Formula>,
        owners: Vec<String>,
        valuations: Vec<Vec<bool>>,
    ) -> Result<Self> {
        let mut d = Self::new(name, events)?;
        assert_eq!(pre.len(), d.events.len());
        assert_eq!(valuations.len(), d.events.len());
        d.pre = pre;
        d.edges = Edges::Disagreement { owners, valuations };
        Ok(d)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn events(&self) -> &[String] {
        &self.events
    }

    pub fn event_count(&self) -> usize {
        self.events.len()
    }

    pub fn event_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn pre(&self, e: usize) -> &Formula {
        &self.pre[e]
    }

    pub fn post(&self, e: usize) -> &Postconditions {
        &self.post[e]
    }

    /// `Q(e, f)`.
    pub fn edge(&self, e: usize, f: usize) -> Cow<'_, Formula> {
        match &self.edges {
            Edges::Table { explicit, default } => match explicit.get(&(e, f)) {
                Some(q) => Cow::Borrowed(q),
                None if e == f => Cow::Owned(reflexive_edge()),
                None => Cow::Borrowed(default),
            },
            Edges::Disagreement { owners, valuations } => {
                if e == f {
                    return Cow::Owned(Formula::Top);
                }
                let mut cut = BTreeSet::new();
                for (k, owner) in owners.iter().enumerate() {
                    if valuations[e][k] != valuations[f][k] {
                        cut.insert(owner);
                    }
                }
                Cow::Owned(Formula::conj(cut.into_iter().map(|c| {
                    Formula::not(Formula::net(Term::xstar(), Term::cst(c.clone())))
                })))
            }
        }
    }

    /// The condition used for distinct event pairs without an explicit edge.
    pub fn edge_default(&self) -> Option<&Formula> {
        match &self.edges {
            Edges::Table { default, .. } => Some(default),
            Edges::Disagreement { .. } => None,
        }
    }

    /// Explicitly set edge conditions, in order.
    pub fn explicit_edges(&self) -> Vec<(usize, usize, Formula)> {
        match &self.edges {
            Edges::Table { explicit, .. } => {
                explicit.iter().map(|(&(e, f), q)| (e, f, q.clone())).collect()
            }
            Edges::Disagreement { .. } => {
                let n = self.events.len();
                let mut out = Vec::new();
                for e in 0..n {
                    for f in 0..n {
                        out.push((e, f, self.edge(e, f).into_owned()));
                    }
                }
                out
            }
        }
    }

    pub fn set_pre(&mut self, e: usize, phi: Formula) {
        self.pre[e] = phi;
    }

    pub fn set_post(&mut self, e: usize, atom: GroundAtom, phi: Formula) {
        self.post[e].insert(atom, phi);
    }

    pub fn set_edge(&mut self, e: usize, f: usize, phi: Formula) {
        self.table().0.insert((e, f), phi);
    }

    pub fn set_edge_default(&mut self, phi: Formula) {
        *self.table().1 = phi;
    }

    fn table(&mut self) -> (&mut BTreeMap<(usize, usize), Formula>, &mut Formula) {
        if let Edges::Disagreement { .. } = self.edges {
            let explicit = self
                .explicit_edges()
                .into_iter()
                .map(|(e, f, q)| ((e, f), q))
                .collect();
            self.edges = Edges::Table {
                explicit,
                default: distinguishing_edge(),
            };
        }
        match &mut self.edges {
            Edges::Table { explicit, default } => (explicit, default),
            Edges::Disagreement { .. } => unreachable!(),
        }
    }

    /// Checks the action-model invariants over `sig`: closed
    /// preconditions and postconditions, edge conditions free in at most
    /// `x*`, reflexive diagonal, ground non-equality postcondition keys.
    pub fn validate(&self, sig: &Signature) -> Result<()> {
        let fail = |reason: String| {
            Err(Error::InvalidAction {
                action: self.name.clone(),
                reason,
            })
        };
        let check = |phi: &Formula| {
            sig.check_formula(phi).map_err(|e| Error::InvalidAction {
                action: self.name.clone(),
                reason: e.to_string(),
            })
        };
        for (e, name) in self.events.iter().enumerate() {
            let pre = &self.pre[e];
            check(pre)?;
            if !pre.is_closed() {
                return fail(format!("pre({name}) has free variables"));
            }
            for (atom, phi) in &self.post[e] {
                if let GroundAtom::Eq(..) = atom {
                    return fail(format!("post({name}) overrides the equality atom {atom}"));
                }
                check(&atom.to_formula())?;
                check(phi)?;
                if !phi.is_closed() {
                    return fail(format!("post({name})({atom}) has free variables"));
                }
            }
        }
        let edge_ok = |e: usize, f: usize, q: &Formula| {
            check(q)?;
            if q.free_variables().iter().any(|v| v != XSTAR) {
                return fail(format!(
                    "Q({},{}) has free variables other than {XSTAR}",
                    self.events[e], self.events[f]
                ));
            }
            if e == f && *q != Formula::Top && *q != reflexive_edge() {
                return fail(format!("Q({0},{0}) must be {XSTAR} = {XSTAR}", self.events[e]));
            }
            Ok(())
        };
        match &self.edges {
            Edges::Table { explicit, default } => {
                for (&(e, f), q) in explicit {
                    if e >= self.events.len() || f >= self.events.len() {
                        return fail("edge between unknown events".into());
                    }
                    edge_ok(e, f, q)?;
                }
                if self.events.len() > 1 {
                    edge_ok(0, 1, default)?;
                }
            }
            Edges::Disagreement { owners, valuations } => {
                for c in owners {
                    if !sig.is_constant(c) {
                        return fail(format!("undeclared constant `{c}`"));
                    }
                }
                if valuations.iter().any(|v| v.len() != owners.len()) {
                    return fail("valuation length mismatch".into());
                }
            }
        }
        Ok(())
    }

    /// Every action model mentioned in a condition.
    pub fn action_refs(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for pre in &self.pre {
            out.extend(pre.action_refs());
        }
        for post in &self.post {
            for phi in post.values() {
                out.extend(phi.action_refs());
            }
        }
        if let Edges::Table { explicit, default } = &self.edges {
            for q in explicit.values().chain([default]) {
                out.extend(q.action_refs());
            }
        }
        out
    }
}

/// Named action models. Conditions may only mention models registered
/// earlier, so references are acyclic.
#[derive(Debug, Clone, Default)]
pub struct ActionRegistry {
    models: BTreeMap<String, Arc<ActionModel>>,
}

impl ActionRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, model: ActionModel, sig: &Signature) -> Result<Arc<ActionModel>> {
        model.validate(sig)?;
        if self.models.contains_key(model.name()) {
            return Err(Error::InvalidAction {
                action: model.name.clone(),
                reason: "an action model with this name is already registered".into(),
            });
        }
        for r in model.action_refs() {
            if !self.models.contains_key(&r) {
                return Err(Error::InvalidAction {
                    action: model.name.clone(),
                    reason: format!("refers to `{r}`, which is not registered before it"),
                });
            }
        }
        let model = Arc::new(model);
        self.models.insert(model.name.clone(), Arc::clone(&model));
        Ok(model)
    }

    pub fn get(&self, name: &str) -> Result<&Arc<ActionModel>> {
        self.models
            .get(name)
            .ok_or_else(|| Error::UnknownAction(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.models.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.models.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }
}

/// `(M, w)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedModel {
    pub model: Model,
    pub actual: WorldId,
}

/// `(Δ, e)`.
#[derive(Debug, Clone)]
pub struct PointedAction {
    pub action: Arc<ActionModel>,
    pub event: usize,
}

impl PointedAction {
    pub fn new(action: Arc<ActionModel>, event: &str) -> Result<Self> {
        let e = action.event_index(event).ok_or_else(|| Error::UnknownEvent {
            action: action.name.clone(),
            event: event.to_string(),
        })?;
        Ok(PointedAction { action, event: e })
    }

    pub fn event_name(&self) -> &str {
        &self.action.events[self.event]
    }
}

/// The result of a product update: the model and, for each new world, the
/// `(world, event)` pair it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Update {
    pub model: Model,
    pub origin: Vec<(WorldId, usize)>,
}

impl Update {
    pub fn world_of(&self, w: WorldId, e: usize) -> Option<WorldId> {
        self.origin.iter().position(|&p| p == (w, e))
    }
}

/// Which closure property of an updated relation fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ClosureProperty {
    Reflexivity,
    Symmetry,
    Transitivity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationViolation {
    pub agent: String,
    pub property: ClosureProperty,
    /// The worlds involved: one for reflexivity, the offending pair for
    /// symmetry, the chain `u ∼ v ∼ w` for transitivity.
    pub worlds: Vec<String>,
}

impl fmt::Display for RelationViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.property {
            ClosureProperty::Reflexivity => "reflexivity",
            ClosureProperty::Symmetry => "symmetry",
            ClosureProperty::Transitivity => "transitivity",
        };
        write!(f, "{}: {what} fails at ({})", self.agent, self.worlds.join(", "))
    }
}

struct RawProduct {
    model: Model,
    origin: Vec<(WorldId, usize)>,
    relations: Vec<Vec<Vec<bool>>>,
}

impl<'r> Checker<'r> {
    fn raw_product(&self, d: &ActionModel) -> Result<RawProduct> {
        let m = self.model();
        let mut origin = Vec::new();
        let mut g = Valuation::new();
        for w in 0..m.world_count() {
            for e in 0..d.event_count() {
                if self.eval(w, &mut g, d.pre(e))? {
                    origin.push((w, e));
                }
            }
        }
        if origin.is_empty() {
            return Err(Error::EmptyUpdate);
        }
        let n = origin.len();
        let mut relations = Vec::with_capacity(m.agent_count());
        for agent in 0..m.agent_count() {
            let mut rel = vec![vec![false; n]; n];
            for (i, &(w, e)) in origin.iter().enumerate() {
                for (j, &(v, f)) in origin.iter().enumerate() {
                    if m.related(agent, w, v) {
                        rel[i][j] = self.edge_holds(w, agent, &d.edge(e, f))?;
                    }
                }
            }
            relations.push(rel);
        }
        let mut interp = Vec::with_capacity(n);
        for &(w, e) in &origin {
            interp.push(self.post_interp(w, d.post(e))?);
        }
        let worlds = product_world_names(m, d, &origin);
        let model = Model {
            signature: m.signature.clone(),
            agents: m.agents.clone(),
            epistemic: Vec::new(),
            worlds,
            interp,
        };
        Ok(RawProduct {
            model,
            origin,
            relations,
        })
    }

    /// `I'(·, (w,e))`: constants unchanged, overridden atoms added when their
    /// postcondition holds at `w` and removed when it fails.
    fn post_interp(&self, w: WorldId, post: &Postconditions) -> Result<WorldInterp> {
        let m = self.model();
        let old = &m.interp[w];
        let mut new = old.clone();
        if post.is_empty() {
            return Ok(new);
        }
        let mut g = Valuation::new();
        let npred = m.signature.predicates().len();
        let mut plus = vec![BTreeSet::new(); npred];
        let mut minus = vec![BTreeSet::new(); npred];
        let mut net_plus = BTreeSet::new();
        let mut net_minus = BTreeSet::new();
        for (atom, phi) in post {
            let holds = self.eval(w, &mut g, phi)?;
            let den = |c: &str| m.extension(&Term::cst(c), w, &g);
            match atom {
                GroundAtom::Pred(p, c) => {
                    let i = m.signature.predicate_index(p).expect("validated");
                    let target = if holds { &mut plus[i] } else { &mut minus[i] };
                    target.insert(den(c));
                }
                GroundAtom::Net(a, b) => {
                    let pair = (den(a), den(b));
                    if holds {
                        net_plus.insert(pair);
                    } else {
                        net_minus.insert(pair);
                    }
                }
                GroundAtom::Eq(..) => {}
            }
        }
        for i in 0..npred {
            new.predicates[i] = old.predicates[i]
                .union(&plus[i])
                .filter(|a| !minus[i].contains(a))
                .copied()
                .collect();
        }
        new.network = old
            .network
            .union(&net_plus)
            .filter(|p| !net_minus.contains(p))
            .copied()
            .collect();
        Ok(new)
    }

    /// `M ⊗ Δ`. Fails when no pair survives or when some updated relation
    /// is not an equivalence.
    pub fn product(&self, d: &ActionModel) -> Result<Update> {
        let RawProduct {
            mut model,
            origin,
            relations,
        } = self.raw_product(d)?;
        for (agent, rel) in relations.iter().enumerate() {
            if let Some(v) = closure_violations(rel, &model, &model.agents[agent]).first() {
                return Err(Error::NotEquivalence {
                    agent: model.agents[agent].clone(),
                    detail: v.to_string(),
                });
            }
        }
        model.epistemic = relations.iter().map(|rel| partition_of(rel)).collect();
        Ok(Update { model, origin })
    }

    /// Closure failures of the relations `M ⊗ Δ` would have.
    pub fn update_violations(&self, d: &ActionModel) -> Result<Vec<RelationViolation>> {
        let raw = match self.raw_product(d) {
            Ok(raw) => raw,
            Err(Error::EmptyUpdate) => return Ok(Vec::new()),
            Err(e) => return Err(e),
        };
        let mut out = Vec::new();
        for (agent, rel) in raw.relations.iter().enumerate() {
            out.extend(closure_violations(rel, &raw.model, &raw.model.agents[agent]));
        }
        Ok(out)
    }
}

fn product_world_names(m: &Model, d: &ActionModel, origin: &[(WorldId, usize)]) -> Vec<String> {
    let concat: Vec<String> = origin
        .iter()
        .map(|&(w, e)| format!("{}{}", m.worlds[w], d.events()[e]))
        .collect();
    if distinct(&concat) {
        return concat;
    }
    let paired: Vec<String> = origin
        .iter()
        .map(|&(w, e)| format!("({},{})", m.worlds[w], d.events()[e]))
        .collect();
    if distinct(&paired) {
        return paired;
    }
    (0..origin.len()).map(|i| format!("{}#{i}", paired[i])).collect()
}

fn distinct(names: &[String]) -> bool {
    names.iter().collect::<BTreeSet<_>>().len() == names.len()
}

fn closure_violations(rel: &[Vec<bool>], m: &Model, agent: &str) -> Vec<RelationViolation> {
    let n = rel.len();
    let name = |i: usize| m.worlds[i].clone();
    let mut out = Vec::new();
    let mut push = |property, worlds: Vec<usize>| {
        out.push(RelationViolation {
            agent: agent.to_string(),
            property,
            worlds: worlds.into_iter().map(name).collect(),
        })
    };
    for i in 0..n {
        if !rel[i][i] {
            push(ClosureProperty::Reflexivity, vec![i]);
        }
    }
    for i in 0..n {
        for j in 0..n {
            if rel[i][j] && !rel[j][i] {
                push(ClosureProperty::Symmetry, vec![i, j]);
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if !rel[i][j] {
                continue;
            }
            for k in 0..n {
                if rel[j][k] && !rel[i][k] {
                    push(ClosureProperty::Transitivity, vec![i, j, k]);
                }
            }
        }
    }
    out
}

fn partition_of(rel: &[Vec<bool>]) -> Partition {
    let n = rel.len();
    let mut seen = vec![false; n];
    let mut cells = Vec::new();
    for i in 0..n {
        if seen[i] {
            continue;
        }
        let cell: Vec<usize> = (0..n).filter(|&j| rel[i][j]).collect();
        for &j in &cell {
            seen[j] = true;
        }
        cells.push(cell);
    }
    Partition::from_cells(n, cells)
}

/// Whether `pre(e)` holds at the actual world.
pub fn applicable(pm: &PointedModel, pa: &PointedAction, actions: &ActionRegistry) -> Result<bool> {
    Checker::new(pm.model.clone(), actions).holds(pm.actual, pa.action.pre(pa.event))
}

/// `M ⊗ Δ`.
pub fn product_update(m: &Model, d: &ActionModel, actions: &ActionRegistry) -> Result<Update> {
    Checker::new(m.clone(), actions).product(d)
}

/// `(M ⊗ Δ, (w, e))`; undefined when `pre(e)` fails at `w`.
pub fn product_update_pointed(
    pm: &PointedModel,
    pa: &PointedAction,
    actions: &ActionRegistry,
) -> Result<PointedModel> {
    let checker = Checker::new(pm.model.clone(), actions);
    let pre = pa.action.pre(pa.event);
    if !checker.holds(pm.actual, pre)? {
        return Err(Error::NotApplicable {
            event: pa.event_name().to_string(),
            world: pm.model.worlds[pm.actual].clone(),
            pre: pre.to_string(),
        });
    }
    let update = checker.product(&pa.action)?;
    let actual = update
        .world_of(pm.actual, pa.event)
        .expect("applicable pair survives");
    Ok(PointedModel {
        model: update.model,
        actual,
    })
}

/// Reflexivity, symmetry and transitivity failures of the updated
/// relations. Empty when the update is well defined.
pub fn validate_update(
    m: &Model,
    d: &ActionModel,
    actions: &ActionRegistry,
) -> Result<Vec<RelationViolation>> {
    Checker::new(m.clone(), actions).update_violations(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_world_model() -> Model {
        let sig = Signature::new(["a_"], ["P"]).unwrap();
        let mut m = Model::blank(sig, vec!["a".into(), "b".into()], vec!["w".into(), "v".into()]);
        for w in 0..2 {
            m.interp[w].constants[0] = Some(0);
        }
        m.interp[0].predicates[0].insert(0);
        m
    }

    #[test]
    fn announcement_keeps_satisfying_worlds() {
        let m = two_world_model();
        let reg = ActionRegistry::new();
        let d = ActionModel::announcement("!", Formula::pred("P", Term::cst("a_")));
        let up = product_update(&m, &d, &reg).unwrap();
        assert_eq!(up.model.worlds, vec!["we"]);
        assert_eq!(up.origin, vec![(0, 0)]);
    }

    #[test]
    fn empty_update_is_an_error() {
        let m = two_world_model();
        let reg = ActionRegistry::new();
        let d = ActionModel::announcement("!", Formula::bottom());
        assert_eq!(product_update(&m, &d, &reg), Err(Error::EmptyUpdate));
    }

    #[test]
    fn postconditions_add_and_remove() {
        let m = two_world_model();
        let reg = ActionRegistry::new();
        let mut d = ActionModel::identity("flip");
        let pa = GroundAtom::Pred("P".into(), "a_".into());
        d.set_post(0, pa.clone(), Formula::not(pa.to_formula()));
        d.set_post(0, GroundAtom::Net("a_".into(), "a_".into()), Formula::Top);
        let up = product_update(&m, &d, &reg).unwrap();
        assert!(up.model.interp[0].predicates[0].is_empty());
        assert!(up.model.interp[1].predicates[0].contains(&0));
        assert!(up.model.interp[0].network.contains(&(0, 0)));
    }

    #[test]
    fn equality_postcondition_is_rejected() {
        let m = two_world_model();
        let mut d = ActionModel::identity("bad");
        d.set_post(0, GroundAtom::Eq("a_".into(), "a_".into()), Formula::bottom());
        assert!(matches!(d.validate(&m.signature), Err(Error::InvalidAction { .. })));
    }

    #[test]
    fn edge_with_other_free_variable_is_rejected() {
        let m = two_world_model();
        let mut d = ActionModel::new("bad", vec!["1".into(), "2".into()]).unwrap();
        d.set_edge(0, 1, Formula::pred("P", Term::var("y")));
        assert!(d.validate(&m.signature).is_err());
    }

    #[test]
    fn asymmetric_edges_are_diagnosed() {
        let m = two_world_model();
        let reg = ActionRegistry::new();
        let mut d = ActionModel::new("asym", vec!["1".into(), "2".into()]).unwrap();
        d.set_edge(0, 1, Formula::pred("P", Term::xstar()));
        let violations = validate_update(&m, &d, &reg).unwrap();
        assert!(violations
            .iter()
            .any(|v| v.property == ClosureProperty::Symmetry && v.agent == "a"));
        assert!(matches!(
            product_update(&m, &d, &reg),
            Err(Error::NotEquivalence { .. })
        ));
    }

    #[test]
    fn registry_requires_earlier_references() {
        let m = two_world_model();
        let mut reg = ActionRegistry::new();
        let inner = Formula::action("later", "e", Formula::Top);
        let d = ActionModel::announcement("first", inner);
        assert!(reg.insert(d, &m.signature).is_err());
        reg.insert(ActionModel::identity("later"), &m.signature).unwrap();
        let d = ActionModel::announcement("first", Formula::action("later", "e", Formula::Top));
        reg.insert(d, &m.signature).unwrap();
    }

    #[test]
    fn world_names_fall_back_on_collision() {
        let sig = Signature::new(Vec::<String>::new(), Vec::<String>::new()).unwrap();
        let m = Model::blank(sig, vec!["a".into()], vec!["w1".into(), "w".into()]);
        let reg = ActionRegistry::new();
        let d = ActionModel::new("d", vec!["1".into(), "11".into()]).unwrap();
        let up = product_update(&m, &d, &reg).unwrap();
        assert_eq!(up.model.worlds, vec!["(w1,1)", "(w1,11)", "(w,1)", "(w,11)"]);
    }

    #[test]
    fn disagreement_edges() {
        let d = ActionModel::from_valuations(
            "l",
            vec!["00".into(), "01".into(), "10".into(), "11".into()],
            vec![Formula::Top; 4],
            vec!["a_".into(), "b_".into()],
            vec![
                vec![false, false],
                vec![false, true],
                vec![true, false],
                vec![true, true],
            ],
        )
        .unwrap();
        assert_eq!(d.edge(0, 0).into_owned(), Formula::Top);
        assert_eq!(
            d.edge(0, 2).into_owned(),
            Formula::not(Formula::net(Term::xstar(), Term::cst("a_")))
        );
        assert_eq!(d.edge(0, 3).into_owned().to_string(), "!N(xstar,a_) & !N(xstar,b_)");
    }
}
