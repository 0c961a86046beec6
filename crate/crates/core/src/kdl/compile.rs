//! Compiling KDL updates to action models and translating the dynamic
//! language.
//!
//! Conditions of action models must be closed, so nominals occurring in
//! the formulas of an update are replaced by the constant of the agent they
//! name. In the image models constants are rigid, so this changes nothing
//! semantically.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::{proposition, FeatureSpace, KdlChecker, KdlFormula, KdlModel, KdlUpdate, KdlUpdates};
use crate::action::{ActionModel, ActionRegistry};
use crate::hybrid::{tml_image, Pivot};
use crate::morphism::{bounded_morphism_check, MorphismViolation};
use crate::semantics::Checker;
use crate::syntax::{Formula, GroundAtom, Signature, Term};
use crate::{Error, Result};

/// Largest number of events a compiled learning update may have.
pub const DEFAULT_EVENT_CAP: usize = 1 << 16;

/// Builds `Δ^d` and `Δ^ℓ` for the updates of one model's signature and
/// translates KDL formulas into the dynamic term-modal language.
pub struct Compiler<'u> {
    updates: &'u KdlUpdates,
    features: FeatureSpace,
    /// One constant per agent, in agent order.
    constants: Vec<String>,
    grounding: BTreeMap<String, String>,
    signature: Signature,
    registry: ActionRegistry,
    cap: usize,
}

impl<'u> Compiler<'u> {
    pub fn new(m: &KdlModel, updates: &'u KdlUpdates, cap: usize) -> Result<Self> {
        let hm = m.to_hybrid();
        let signature = hm.image_signature()?;
        for i in m.nominals.keys() {
            check_pivot(i)?;
        }
        let constants: Vec<String> = (0..m.frame.agent_count())
            .map(|a| m.frame.constant_for(a))
            .collect();
        let grounding = m
            .nominals
            .iter()
            .map(|(i, &a)| (i.clone(), constants[a].clone()))
            .collect();
        Ok(Compiler {
            updates,
            features: m.features.clone(),
            constants,
            grounding,
            signature,
            registry: ActionRegistry::new(),
            cap,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn registry(&self) -> &ActionRegistry {
        &self.registry
    }

    pub fn into_registry(self) -> ActionRegistry {
        self.registry
    }

    /// The name of the action model compiled from update `update`.
    pub fn action_name(update: &str) -> String {
        format!("Delta_{update}")
    }

    /// `Δ^†` for the named update, compiling what it depends on first.
    pub fn compile(&mut self, update: &str) -> Result<Arc<ActionModel>> {
        let name = Self::action_name(update);
        if let Ok(d) = self.registry.get(&name) {
            return Ok(Arc::clone(d));
        }
        let action = match self.updates.get(update)? {
            KdlUpdate::Transformation(d) => {
                let mut action = ActionModel::new(name, vec!["e".into()])?;
                action.set_edge(0, 0, Formula::Top);
                for post in &d.post {
                    for (f, z) in post {
                        self.features.lookup(f, z)?;
                    }
                }
                for c in self.constants.clone() {
                    let grounded: Vec<Formula> = d
                        .phi
                        .iter()
                        .map(|phi| self.grounded_at(phi, &c))
                        .collect::<Result<_>>()?;
                    for feat in self.features.features().to_vec() {
                        let sets_any = Formula::disj(
                            (0..d.phi.len())
                                .filter(|&k| d.post_of(k, &feat.name).is_some())
                                .map(|k| grounded[k].clone()),
                        );
                        for z in &feat.values {
                            let sets_z = Formula::disj(
                                (0..d.phi.len())
                                    .filter(|&k| d.post_of(k, &feat.name) == Some(z.as_str()))
                                    .map(|k| grounded[k].clone()),
                            );
                            let p = proposition(&feat.name, z);
                            let keep = Formula::and(
                                Formula::not(sets_any.clone()),
                                Formula::pred(p.clone(), Term::cst(c.clone())),
                            );
                            action.set_post(0, GroundAtom::Pred(p, c.clone()), Formula::or(sets_z, keep));
                        }
                    }
                }
                action
            }
            KdlUpdate::Learning(l) => {
                let mut grounded = Vec::new();
                let mut owners = Vec::new();
                for phi in &l.formulas {
                    for c in self.constants.clone() {
                        grounded.push(self.grounded_at(phi, &c)?);
                        owners.push(c);
                    }
                }
                let k = grounded.len();
                let too_many = k >= usize::BITS as usize || (1usize << k) > self.cap;
                if too_many {
                    return Err(Error::EventCap {
                        grounded: k,
                        cap: self.cap,
                    });
                }
                let mut events = Vec::with_capacity(1 << k);
                let mut pre = Vec::with_capacity(1 << k);
                let mut valuations = Vec::with_capacity(1 << k);
                for idx in 0..(1usize << k) {
                    let bits: Vec<bool> = (0..k).map(|j| idx >> (k - 1 - j) & 1 == 1).collect();
                    let label: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
                    events.push(format!("e{label}"));
                    pre.push(Formula::conj(grounded.iter().zip(&bits).map(|(g, &b)| {
                        if b {
                            g.clone()
                        } else {
                            Formula::not(g.clone())
                        }
                    })));
                    valuations.push(bits);
                }
                ActionModel::from_valuations(name, events, pre, owners, valuations)?
            }
        };
        self.registry.insert(action, &self.signature)
    }

    /// `T_•(φ)`. Nominals become variables of the same name.
    pub fn translate(&mut self, phi: &KdlFormula, pivot: Pivot) -> Result<Formula> {
        for i in phi.nominals() {
            check_pivot(&i)?;
        }
        self.tr(phi, pivot)
    }

    /// `T_x(φ)(x ↦ c)` with nominals grounded: a closed formula.
    fn grounded_at(&mut self, phi: &KdlFormula, constant: &str) -> Result<Formula> {
        let mut t = self.translate(phi, Pivot::X)?;
        for (i, c) in &self.grounding {
            t = t.substitute(i, &Term::cst(c.clone()));
        }
        if let Some(i) = t.free_variables().into_iter().find(|v| v != Pivot::X.var()) {
            return Err(Error::InvalidKdl(format!("undeclared nominal `{i}`")));
        }
        Ok(t.substitute(Pivot::X.var(), &Term::cst(constant)))
    }

    fn tr(&mut self, phi: &KdlFormula, pivot: Pivot) -> Result<Formula> {
        let here = Term::var(pivot.var());
        Ok(match phi {
            KdlFormula::Top => Formula::Top,
            KdlFormula::Feature(f, z) => {
                self.features.lookup(f, z)?;
                Formula::pred(proposition(f, z), here)
            }
            KdlFormula::Nominal(i) => Formula::eq(here, Term::var(i.clone())),
            KdlFormula::Not(a) => Formula::not(self.tr(a, pivot)?),
            KdlFormula::And(a, b) => Formula::and(self.tr(a, pivot)?, self.tr(b, pivot)?),
            KdlFormula::At(i, a) => self.tr(a, pivot)?.substitute(pivot.var(), &Term::var(i.clone())),
            KdlFormula::Know(a) => Formula::know(here, self.tr(a, pivot)?),
            KdlFormula::Neighbor(a) => {
                let y = pivot.other().var();
                Formula::forall(
                    y,
                    Formula::implies(Formula::net(here, Term::var(y)), self.tr(a, pivot.other())?),
                )
            }
            KdlFormula::Dynamic(u, a) => {
                let action = self.compile(u)?;
                let body = self.tr(a, pivot)?;
                match self.updates.get(u)? {
                    KdlUpdate::Transformation(_) => Formula::action(action.name(), "e", body),
                    KdlUpdate::Learning(_) => {
                        Formula::conj((0..action.event_count()).map(|e| {
                            Formula::implies(
                                action.pre(e).clone(),
                                Formula::action(action.name(), action.events()[e].clone(), body.clone()),
                            )
                        }))
                    }
                }
            }
        })
    }
}

fn check_pivot(nominal: &str) -> Result<()> {
    if nominal == Pivot::X.var() || nominal == Pivot::Y.var() {
        return Err(Error::PivotCollision(nominal.to_string()));
    }
    Ok(())
}

/// Outcome of comparing an update's direct semantics with its compiled
/// action model on one model.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Prop2Report {
    /// Worlds where the number of executable events is not exactly one.
    pub map_problems: Vec<String>,
    pub morphism: Vec<MorphismViolation>,
    pub disagreements: Vec<String>,
    /// Number of (formula, world, agent, pivot) comparisons made.
    pub comparisons: usize,
}

impl Prop2Report {
    pub fn is_clean(&self) -> bool {
        self.map_problems.is_empty() && self.morphism.is_empty() && self.disagreements.is_empty()
    }
}

impl fmt::Display for Prop2Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} comparisons", self.comparisons)?;
        for p in &self.map_problems {
            writeln!(f, "map: {p}")?;
        }
        for v in &self.morphism {
            writeln!(f, "{v}")?;
        }
        for d in &self.disagreements {
            writeln!(f, "{d}")?;
        }
        Ok(())
    }
}

/// For the update named `update`: checks that `w ↦ (w, e)` is a bounded
/// morphism from `𝖳(M^†)` into `𝖳(M) ⊗ Δ^†`, and that every formula of
/// `corpus` (and its `[†]`-prefixed version) has the same truth value
/// under the direct and the compiled semantics, at every world, agent and
/// pivot.
pub fn check_prop2(
    m: &KdlModel,
    updates: &KdlUpdates,
    update: &str,
    corpus: &[KdlFormula],
    cap: usize,
) -> Result<Prop2Report> {
    m.validate()?;
    let direct = KdlChecker::new(m.clone(), updates);
    let updated = match updates.get(update)? {
        KdlUpdate::Transformation(d) => direct.transform(d)?,
        KdlUpdate::Learning(l) => direct.learn(l)?,
    };
    let mut compiler = Compiler::new(m, updates, cap)?;
    let delta = compiler.compile(update)?;
    let mut translated = Vec::with_capacity(corpus.len());
    for phi in corpus {
        direct.check_formula(phi)?;
        let boxed = KdlFormula::dynamic(update, phi.clone());
        let mut per_pivot = Vec::new();
        for pivot in Pivot::both() {
            per_pivot.push((pivot, compiler.translate(phi, pivot)?, compiler.translate(&boxed, pivot)?));
        }
        translated.push((phi, boxed, per_pivot));
    }
    let registry = compiler.into_registry();

    let hm = m.to_hybrid();
    let g = hm.nominal_valuation();
    let checker = Checker::new(tml_image(&hm)?, &registry);
    let product = checker.product(&delta)?;
    let mut report = Prop2Report::default();
    let mut map = Vec::with_capacity(m.frame.world_count());
    for w in 0..m.frame.world_count() {
        let hits: Vec<usize> = (0..product.origin.len())
            .filter(|&i| product.origin[i].0 == w)
            .collect();
        if hits.len() != 1 {
            report.map_problems.push(format!(
                "{} has {} executable events",
                m.frame.worlds[w],
                hits.len()
            ));
        } else {
            map.push(hits[0]);
        }
    }
    if !report.map_problems.is_empty() {
        return Ok(report);
    }
    let updated_image = tml_image(&updated.to_hybrid())?;
    report.morphism = bounded_morphism_check(&updated_image, &product.model, &map);

    let after = KdlChecker::new(updated, updates);
    let product_checker = Checker::new(product.model, &registry);
    for (phi, boxed, per_pivot) in &translated {
        for (pivot, t, t_boxed) in per_pivot {
            for w in 0..m.frame.world_count() {
                for a in 0..m.frame.agent_count() {
                    let ga = g.with(pivot.var(), a);
                    let lhs = after.satisfies(w, a, phi)?;
                    let rhs = product_checker.satisfies(map[w], &ga, t)?;
                    let lhs_boxed = direct.satisfies(w, a, boxed)?;
                    let rhs_boxed = checker.satisfies(w, &ga, t_boxed)?;
                    report.comparisons += 2;
                    let at = format!(
                        "at ({}, {}) pivot {pivot}",
                        m.frame.worlds[w], m.frame.agents[a]
                    );
                    if lhs != rhs {
                        report
                            .disagreements
                            .push(format!("{phi} {at}: updated model {lhs}, product {rhs}"));
                    }
                    if lhs_boxed != rhs_boxed {
                        report
                            .disagreements
                            .push(format!("{boxed} {at}: direct {lhs_boxed}, compiled {rhs_boxed}"));
                    }
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hybrid::NetworkFrame;
    use crate::kdl::{DynamicTransformation, Feature, LearningUpdate};
    use std::collections::BTreeSet;

    fn binary(name: &str) -> Feature {
        Feature {
            name: name.into(),
            values: vec!["0".into(), "1".into()],
        }
    }

    fn pair() -> KdlModel {
        let mut frame = NetworkFrame::blank(vec!["a".into(), "b".into()], vec!["w".into(), "v".into()]);
        for net in &mut frame.networks {
            *net = BTreeSet::from([(0, 1), (1, 0)]);
        }
        KdlModel {
            frame,
            nominals: BTreeMap::from([("i".to_string(), 1)]),
            features: FeatureSpace::new(vec![binary("f")]).unwrap(),
            values: vec![vec![vec![0], vec![1]], vec![vec![0], vec![0]]],
        }
    }

    fn updates() -> KdlUpdates {
        let mut u = KdlUpdates::new();
        u.insert(
            "d",
            KdlUpdate::Transformation(
                DynamicTransformation::new(vec![(
                    KdlFormula::neighbor(KdlFormula::feature("f", "1")),
                    BTreeMap::from([("f".to_string(), "1".to_string())]),
                )])
                .unwrap(),
            ),
        )
        .unwrap();
        u.insert(
            "l",
            KdlUpdate::Learning(LearningUpdate {
                formulas: vec![KdlFormula::feature("f", "1")],
            }),
        )
        .unwrap();
        u.insert("none", KdlUpdate::Learning(LearningUpdate::default())).unwrap();
        u
    }

    #[test]
    fn transformation_has_one_event() {
        let m = pair();
        let u = updates();
        let mut c = Compiler::new(&m, &u, DEFAULT_EVENT_CAP).unwrap();
        let d = c.compile("d").unwrap();
        assert_eq!(d.event_count(), 1);
        assert_eq!(*d.pre(0), Formula::Top);
        assert_eq!(*d.edge(0, 0), Formula::Top);
        assert_eq!(d.post(0).len(), 4);
    }

    #[test]
    fn learning_event_count_and_edges() {
        let m = pair();
        let u = updates();
        let mut c = Compiler::new(&m, &u, DEFAULT_EVENT_CAP).unwrap();
        let l = c.compile("l").unwrap();
        assert_eq!(l.event_count(), 4);
        assert_eq!(l.events(), ["e00", "e01", "e10", "e11"]);
        // e00 and e10 disagree only on a_'s formula
        assert_eq!(
            *l.edge(0, 2),
            Formula::not(Formula::net(Term::xstar(), Term::cst("a_")))
        );
        let none = c.compile("none").unwrap();
        assert_eq!(none.event_count(), 1);
        assert_eq!(*none.pre(0), Formula::Top);
    }

    #[test]
    fn event_cap() {
        let m = pair();
        let u = updates();
        let mut c = Compiler::new(&m, &u, 2).unwrap();
        assert_eq!(c.compile("l").unwrap_err(), Error::EventCap { grounded: 2, cap: 2 });
    }

    #[test]
    fn translation_of_dynamic_clauses() {
        let m = pair();
        let u = updates();
        let mut c = Compiler::new(&m, &u, DEFAULT_EVENT_CAP).unwrap();
        let phi = KdlFormula::dynamic("d", KdlFormula::feature("f", "1"));
        assert_eq!(c.translate(&phi, Pivot::X).unwrap().to_string(), "[Delta_d:e] f_1(x)");
        let learn = KdlFormula::dynamic("l", KdlFormula::Top);
        let t = c.translate(&learn, Pivot::X).unwrap();
        let reg = c.registry().clone();
        let checker = Checker::new(tml_image(&m.to_hybrid()).unwrap(), &reg);
        for w in 0..2 {
            assert!(checker.satisfies(w, &Default::default(), &t).unwrap());
        }
    }

    #[test]
    fn nominals_are_grounded_in_conditions() {
        let m = pair();
        let mut u = KdlUpdates::new();
        u.insert(
            "li",
            KdlUpdate::Learning(LearningUpdate {
                formulas: vec![KdlFormula::at("i", KdlFormula::feature("f", "1"))],
            }),
        )
        .unwrap();
        let mut c = Compiler::new(&m, &u, DEFAULT_EVENT_CAP).unwrap();
        let l = c.compile("li").unwrap();
        assert!(l.pre(1).is_closed());
        assert_eq!(l.pre(3).to_string(), "f_1(b_) & f_1(b_)");
    }

    #[test]
    fn prop2_on_small_model() {
        let m = pair();
        let u = updates();
        let corpus = vec![
            KdlFormula::know(KdlFormula::neighbor(KdlFormula::feature("f", "1"))),
            KdlFormula::at("i", KdlFormula::feature("f", "0")),
            KdlFormula::dynamic("l", KdlFormula::know(KdlFormula::feature("f", "1"))),
        ];
        for name in ["d", "l", "none"] {
            let report = check_prop2(&m, &u, name, &corpus, DEFAULT_EVENT_CAP).unwrap();
            assert!(report.is_clean(), "{name}: {report}");
            assert!(report.comparisons > 0);
        }
    }
}
