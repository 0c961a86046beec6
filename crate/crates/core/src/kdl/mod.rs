//! Knowledge, diffusion and learning over feature models.
//!
//! Agents carry one value per feature. A dynamic transformation rewrites
//! feature values, a learning update cuts epistemic links. Both have a
//! direct semantics here and a compiled action-model counterpart in
//! [`compile`].

pub mod axioms;
pub mod compile;

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;

use crate::hybrid::{HybridModel, NetworkFrame};
use crate::model::{AgentId, Partition, WorldId};
use crate::{Error, Result};

pub use axioms::{check_characterization, generate_fn, mutate, Axiom, AxiomFailure, Mutation};
pub use compile::{check_prop2, Compiler, Prop2Report, DEFAULT_EVENT_CAP};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Feature {
    pub name: String,
    pub values: Vec<String>,
}

/// The features and their finite value sets.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FeatureSpace {
    features: Vec<Feature>,
}

impl FeatureSpace {
    pub fn new(features: Vec<Feature>) -> Result<Self> {
        let mut props = BTreeSet::new();
        let mut names = BTreeSet::new();
        for f in &features {
            if !names.insert(&f.name) {
                return Err(Error::InvalidKdl(format!("feature {} declared twice", f.name)));
            }
            if f.values.is_empty() {
                return Err(Error::InvalidKdl(format!("feature {} has no values", f.name)));
            }
            for z in &f.values {
                if !props.insert(proposition(&f.name, z)) {
                    return Err(Error::InvalidKdl(format!(
                        "feature proposition {} is ambiguous",
                        proposition(&f.name, z)
                    )));
                }
            }
        }
        Ok(FeatureSpace { features })
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    pub fn value_index(&self, feature: usize, value: &str) -> Option<usize> {
        self.features[feature].values.iter().position(|z| z == value)
    }

    /// `(feature, value)` indices of a feature proposition.
    pub fn lookup(&self, feature: &str, value: &str) -> Result<(usize, usize)> {
        let f = self
            .feature_index(feature)
            .ok_or_else(|| Error::InvalidKdl(format!("unknown feature `{feature}`")))?;
        let z = self
            .value_index(f, value)
            .ok_or_else(|| Error::InvalidKdl(format!("`{value}` is not a value of {feature}")))?;
        Ok((f, z))
    }

    /// Every feature proposition name, feature by feature.
    pub fn propositions(&self) -> Vec<String> {
        self.features
            .iter()
            .flat_map(|f| f.values.iter().map(|z| proposition(&f.name, z)))
            .collect()
    }
}

/// The predicate standing for the feature proposition `f ≐ z`.
pub fn proposition(feature: &str, value: &str) -> String {
    format!("{feature}_{value}")
}

/// A hybrid network model whose valuation is given by feature values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KdlModel {
    pub frame: NetworkFrame,
    pub nominals: BTreeMap<String, AgentId>,
    pub features: FeatureSpace,
    /// `values[w][a][f]` indexes into the value set of feature `f`.
    pub values: Vec<Vec<Vec<usize>>>,
}

impl KdlModel {
    pub fn value(&self, w: WorldId, a: AgentId, f: usize) -> usize {
        self.values[w][a][f]
    }

    /// Frame and value table well formed; networks irreflexive, symmetric
    /// and known to the agents whose links they are.
    pub fn validate(&self) -> Result<()> {
        self.frame.validate()?;
        let (nw, na, nf) = (
            self.frame.world_count(),
            self.frame.agent_count(),
            self.features.features().len(),
        );
        if self.values.len() != nw || self.values.iter().any(|row| row.len() != na) {
            return Err(Error::InvalidKdl("value table does not match the frame".into()));
        }
        for (w, row) in self.values.iter().enumerate() {
            for (a, vals) in row.iter().enumerate() {
                if vals.len() != nf {
                    return Err(Error::InvalidKdl(format!(
                        "{} at {} needs exactly one value per feature",
                        self.frame.agents[a], self.frame.worlds[w]
                    )));
                }
                for (f, &z) in vals.iter().enumerate() {
                    if z >= self.features.features()[f].values.len() {
                        return Err(Error::InvalidKdl("feature value out of range".into()));
                    }
                }
            }
        }
        for (i, &a) in &self.nominals {
            if a >= na {
                return Err(Error::InvalidKdl(format!("nominal {i} names an unknown agent")));
            }
        }
        for (w, net) in self.frame.networks.iter().enumerate() {
            let world = &self.frame.worlds[w];
            for &(a, b) in net {
                if a == b {
                    return Err(Error::InvalidKdl(format!(
                        "network at {world} has a loop at {}",
                        self.frame.agents[a]
                    )));
                }
                if !net.contains(&(b, a)) {
                    return Err(Error::InvalidKdl(format!(
                        "network at {world} is not symmetric: {} > {}",
                        self.frame.agents[a], self.frame.agents[b]
                    )));
                }
            }
        }
        for a in 0..na {
            for w in 0..nw {
                let here: Vec<_> = self.frame.neighbours(w, a).collect();
                for &v in self.frame.epistemic[a].cell_of(w) {
                    if self.frame.neighbours(v, a).ne(here.iter().copied()) {
                        return Err(Error::InvalidKdl(format!(
                            "{} does not know its neighbours: they differ between {} and {}",
                            self.frame.agents[a], self.frame.worlds[w], self.frame.worlds[v]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The hybrid model whose propositions are the feature propositions.
    pub fn to_hybrid(&self) -> HybridModel {
        let mut valuation: BTreeMap<String, BTreeSet<(WorldId, AgentId)>> = self
            .features
            .propositions()
            .into_iter()
            .map(|p| (p, BTreeSet::new()))
            .collect();
        for (w, row) in self.values.iter().enumerate() {
            for (a, vals) in row.iter().enumerate() {
                for (f, &z) in vals.iter().enumerate() {
                    let feat = &self.features.features()[f];
                    let p = proposition(&feat.name, &feat.values[z]);
                    valuation.get_mut(&p).expect("declared").insert((w, a));
                }
            }
        }
        HybridModel {
            frame: self.frame.clone(),
            nominals: self.nominals.clone(),
            valuation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KdlFormula {
    Top,
    /// `f ≐ z`.
    Feature(String, String),
    Nominal(String),
    Not(Box<KdlFormula>),
    And(Box<KdlFormula>, Box<KdlFormula>),
    At(String, Box<KdlFormula>),
    Know(Box<KdlFormula>),
    Neighbor(Box<KdlFormula>),
    /// `[d]φ` or `[ℓ]φ`, by the update's registered name.
    Dynamic(String, Box<KdlFormula>),
}

impl KdlFormula {
    pub fn feature(f: impl Into<String>, z: impl Into<String>) -> Self {
        KdlFormula::Feature(f.into(), z.into())
    }

    pub fn nominal(i: impl Into<String>) -> Self {
        KdlFormula::Nominal(i.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Self) -> Self {
        KdlFormula::Not(Box::new(a))
    }

    pub fn and(a: Self, b: Self) -> Self {
        KdlFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Self, b: Self) -> Self {
        Self::not(Self::and(Self::not(a), Self::not(b)))
    }

    pub fn at(i: impl Into<String>, a: Self) -> Self {
        KdlFormula::At(i.into(), Box::new(a))
    }

    pub fn know(a: Self) -> Self {
        KdlFormula::Know(Box::new(a))
    }

    pub fn neighbor(a: Self) -> Self {
        KdlFormula::Neighbor(Box::new(a))
    }

    pub fn dynamic(update: impl Into<String>, a: Self) -> Self {
        KdlFormula::Dynamic(update.into(), Box::new(a))
    }

    fn visit(&self, f: &mut impl FnMut(&KdlFormula)) {
        f(self);
        match self {
            KdlFormula::Top | KdlFormula::Feature(..) | KdlFormula::Nominal(_) => {}
            KdlFormula::Not(a)
            | KdlFormula::At(_, a)
            | KdlFormula::Know(a)
            | KdlFormula::Neighbor(a)
            | KdlFormula::Dynamic(_, a) => a.visit(f),
            KdlFormula::And(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    pub fn nominals(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            KdlFormula::Nominal(i) | KdlFormula::At(i, _) => {
                out.insert(i.clone());
            }
            _ => {}
        });
        out
    }

    pub fn update_refs(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let KdlFormula::Dynamic(u, _) = f {
                out.insert(u.clone());
            }
        });
        out
    }

    pub fn depth(&self) -> usize {
        match self {
            KdlFormula::Top | KdlFormula::Feature(..) | KdlFormula::Nominal(_) => 0,
            KdlFormula::Not(a)
            | KdlFormula::At(_, a)
            | KdlFormula::Know(a)
            | KdlFormula::Neighbor(a)
            | KdlFormula::Dynamic(_, a) => 1 + a.depth(),
            KdlFormula::And(a, b) => 1 + a.depth().max(b.depth()),
        }
    }
}

impl fmt::Display for KdlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KdlFormula::Top => write!(f, "true"),
            KdlFormula::Feature(feat, z) => write!(f, "{feat}={z}"),
            KdlFormula::Nominal(i) => write!(f, "{i}"),
            KdlFormula::Not(a) => write!(f, "!{a}"),
            KdlFormula::And(a, b) => write!(f, "({a} & {b})"),
            KdlFormula::At(i, a) => write!(f, "@{i} {a}"),
            KdlFormula::Know(a) => write!(f, "K {a}"),
            KdlFormula::Neighbor(a) => write!(f, "N {a}"),
            KdlFormula::Dynamic(u, a) => write!(f, "[{u}] {a}"),
        }
    }
}

/// `d = (Φ, post)`. `post[k]` maps features to the value that the `k`-th
/// member of `Φ` sets; features it does not mention are left alone (`⋆`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicTransformation {
    pub phi: Vec<KdlFormula>,
    pub post: Vec<BTreeMap<String, String>>,
}

impl DynamicTransformation {
    pub fn new(rules: Vec<(KdlFormula, BTreeMap<String, String>)>) -> Result<Self> {
        if rules.is_empty() {
            return Err(Error::InvalidKdl("a transformation needs at least one formula".into()));
        }
        let (phi, post) = rules.into_iter().unzip();
        Ok(DynamicTransformation { phi, post })
    }

    /// `post(φ_k, f)`, `None` for `⋆`.
    pub fn post_of(&self, k: usize, feature: &str) -> Option<&str> {
        self.post[k].get(feature).map(String::as_str)
    }
}

/// `ℓ`: a finite set of formulas.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LearningUpdate {
    pub formulas: Vec<KdlFormula>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KdlUpdate {
    Transformation(DynamicTransformation),
    Learning(LearningUpdate),
}

impl KdlUpdate {
    fn formulas(&self) -> &[KdlFormula] {
        match self {
            KdlUpdate::Transformation(d) => &d.phi,
            KdlUpdate::Learning(l) => &l.formulas,
        }
    }
}

/// Named updates. An update's formulas may only mention updates
/// registered before it.
#[derive(Debug, Clone, Default)]
pub struct KdlUpdates {
    updates: BTreeMap<String, KdlUpdate>,
    order: Vec<String>,
}

impl KdlUpdates {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, update: KdlUpdate) -> Result<()> {
        let name = name.into();
        if self.updates.contains_key(&name) {
            return Err(Error::InvalidKdl(format!("update {name} declared twice")));
        }
        for phi in update.formulas() {
            if let Some(r) = phi.update_refs().into_iter().find(|r| !self.updates.contains_key(r)) {
                return Err(Error::InvalidKdl(format!(
                    "update {name} mentions {r}, which is not declared before it"
                )));
            }
        }
        self.order.push(name.clone());
        self.updates.insert(name, update);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&KdlUpdate> {
        self.updates
            .get(name)
            .ok_or_else(|| Error::InvalidKdl(format!("unknown update `{name}`")))
    }

    /// Names in declaration order.
    pub fn names(&self) -> &[String] {
        &self.order
    }
}

/// Direct semantics of KDL formulas over one model. Updated models are
/// built once per update and kept.
pub struct KdlChecker<'u> {
    model: KdlModel,
    updates: &'u KdlUpdates,
    children: RefCell<HashMap<String, Rc<KdlChecker<'u>>>>,
}

impl<'u> KdlChecker<'u> {
    pub fn new(model: KdlModel, updates: &'u KdlUpdates) -> Self {
        KdlChecker {
            model,
            updates,
            children: RefCell::new(HashMap::new()),
        }
    }

    pub fn model(&self) -> &KdlModel {
        &self.model
    }

    /// Errors on undeclared nominals, features, values or updates.
    pub fn check_formula(&self, phi: &KdlFormula) -> Result<()> {
        let mut problem = None;
        phi.visit(&mut |f| {
            if problem.is_some() {
                return;
            }
            problem = match f {
                KdlFormula::Feature(feat, z) => self.model.features.lookup(feat, z).err(),
                KdlFormula::Nominal(i) | KdlFormula::At(i, _)
                    if !self.model.nominals.contains_key(i) =>
                {
                    Some(Error::InvalidKdl(format!("undeclared nominal `{i}`")))
                }
                KdlFormula::Dynamic(u, _) => self.updates.get(u).err(),
                _ => None,
            };
        });
        match problem {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    /// `M, w, a ⊨ φ`.
    pub fn satisfies(&self, w: WorldId, a: AgentId, phi: &KdlFormula) -> Result<bool> {
        self.check_formula(phi)?;
        self.eval(w, a, phi)
    }

    fn eval(&self, w: WorldId, a: AgentId, phi: &KdlFormula) -> Result<bool> {
        let m = &self.model;
        Ok(match phi {
            KdlFormula::Top => true,
            KdlFormula::Feature(feat, z) => {
                let (f, z) = m.features.lookup(feat, z)?;
                m.value(w, a, f) == z
            }
            KdlFormula::Nominal(i) => m.nominals[i] == a,
            KdlFormula::Not(b) => !self.eval(w, a, b)?,
            KdlFormula::And(b, c) => self.eval(w, a, b)? && self.eval(w, a, c)?,
            KdlFormula::At(i, b) => self.eval(w, m.nominals[i], b)?,
            KdlFormula::Know(b) => {
                for &v in m.frame.epistemic[a].cell_of(w) {
                    if !self.eval(v, a, b)? {
                        return Ok(false);
                    }
                }
                true
            }
            KdlFormula::Neighbor(b) => {
                for c in m.frame.neighbours(w, a) {
                    if !self.eval(w, c, b)? {
                        return Ok(false);
                    }
                }
                true
            }
            KdlFormula::Dynamic(u, b) => self.child(u)?.eval(w, a, b)?,
        })
    }

    fn child(&self, name: &str) -> Result<Rc<KdlChecker<'u>>> {
        if let Some(c) = self.children.borrow().get(name) {
            return Ok(Rc::clone(c));
        }
        let updated = match self.updates.get(name)? {
            KdlUpdate::Transformation(d) => self.transform(d)?,
            KdlUpdate::Learning(l) => self.learn(l)?,
        };
        let child = Rc::new(KdlChecker::new(updated, self.updates));
        self.children
            .borrow_mut()
            .insert(name.to_string(), Rc::clone(&child));
        Ok(child)
    }

    /// `M^d`: only feature values change.
    pub fn transform(&self, d: &DynamicTransformation) -> Result<KdlModel> {
        let m = &self.model;
        for phi in &d.phi {
            self.check_formula(phi)?;
        }
        let mut targets = Vec::with_capacity(d.post.len());
        for post in &d.post {
            let mut t = Vec::new();
            for (feat, z) in post {
                t.push(m.features.lookup(feat, z)?);
            }
            targets.push(t);
        }
        let mut values = m.values.clone();
        for w in 0..m.frame.world_count() {
            for a in 0..m.frame.agent_count() {
                let mut fired = None;
                for (k, phi) in d.phi.iter().enumerate() {
                    if self.eval(w, a, phi)? {
                        if fired.is_some() {
                            return Err(Error::NotPairwiseInconsistent {
                                world: m.frame.worlds[w].clone(),
                                agent: m.frame.agents[a].clone(),
                            });
                        }
                        fired = Some(k);
                    }
                }
                if let Some(k) = fired {
                    for &(f, z) in &targets[k] {
                        values[w][a][f] = z;
                    }
                }
            }
        }
        Ok(KdlModel {
            values,
            ..m.clone()
        })
    }

    /// `M^ℓ`: only epistemic links change, and only by being cut.
    pub fn learn(&self, l: &LearningUpdate) -> Result<KdlModel> {
        let m = &self.model;
        for phi in &l.formulas {
            self.check_formula(phi)?;
        }
        let (nw, na) = (m.frame.world_count(), m.frame.agent_count());
        // truth[k][w][b]
        let mut truth = Vec::with_capacity(l.formulas.len());
        for phi in &l.formulas {
            let mut table = vec![vec![false; na]; nw];
            for (w, row) in table.iter_mut().enumerate() {
                for (b, cell) in row.iter_mut().enumerate() {
                    *cell = self.eval(w, b, phi)?;
                }
            }
            truth.push(table);
        }
        let epistemic: Vec<Partition> = (0..na)
            .map(|a| {
                m.frame.epistemic[a].refine(|w, v| {
                    m.frame
                        .neighbours(w, a)
                        .all(|b| truth.iter().all(|t| t[w][b] == t[v][b]))
                })
            })
            .collect();
        let mut frame = m.frame.clone();
        frame.epistemic = epistemic;
        Ok(KdlModel {
            frame,
            ..m.clone()
        })
    }
}

/// `M^d`.
pub fn apply_transformation(
    m: &KdlModel,
    d: &DynamicTransformation,
    updates: &KdlUpdates,
) -> Result<KdlModel> {
    KdlChecker::new(m.clone(), updates).transform(d)
}

pub fn apply_learning(m: &KdlModel, l: &LearningUpdate, updates: &KdlUpdates) -> Result<KdlModel> {
    KdlChecker::new(m.clone(), updates).learn(l)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary(name: &str) -> Feature {
        Feature {
            name: name.into(),
            values: vec!["0".into(), "1".into()],
        }
    }

    /// One world, agents a and b linked; a has f=1, b has f=0.
    fn chain() -> KdlModel {
        let mut frame = NetworkFrame::blank(vec!["a".into(), "b".into()], vec!["w".into()]);
        frame.networks[0] = BTreeSet::from([(0, 1), (1, 0)]);
        KdlModel {
            frame,
            nominals: BTreeMap::new(),
            features: FeatureSpace::new(vec![binary("f")]).unwrap(),
            values: vec![vec![vec![1], vec![0]]],
        }
    }

    #[test]
    fn adoption_from_neighbour() {
        let m = chain();
        m.validate().unwrap();
        let d = DynamicTransformation::new(vec![(
            KdlFormula::neighbor(KdlFormula::feature("f", "1")),
            BTreeMap::from([("f".to_string(), "1".to_string())]),
        )])
        .unwrap();
        let out = apply_transformation(&m, &d, &KdlUpdates::new()).unwrap();
        assert_eq!(out.values, vec![vec![vec![1], vec![1]]]);
        assert_eq!(out.frame, m.frame);
    }

    #[test]
    fn star_everywhere_changes_nothing() {
        let m = chain();
        let d = DynamicTransformation::new(vec![(KdlFormula::Top, BTreeMap::new())]).unwrap();
        assert_eq!(apply_transformation(&m, &d, &KdlUpdates::new()).unwrap(), m);
    }

    #[test]
    fn overlapping_phi_is_rejected() {
        let m = chain();
        let d = DynamicTransformation::new(vec![
            (KdlFormula::Top, BTreeMap::new()),
            (KdlFormula::feature("f", "1"), BTreeMap::new()),
        ])
        .unwrap();
        assert!(matches!(
            apply_transformation(&m, &d, &KdlUpdates::new()),
            Err(Error::NotPairwiseInconsistent { .. })
        ));
    }

    /// Worlds w, v; a cannot tell them apart; a's neighbour b has f=1 at w
    /// and f=0 at v. b's only neighbour a has the same value at both.
    fn two_worlds() -> KdlModel {
        let mut frame = NetworkFrame::blank(vec!["a".into(), "b".into()], vec!["w".into(), "v".into()]);
        for net in &mut frame.networks {
            *net = BTreeSet::from([(0, 1), (1, 0)]);
        }
        KdlModel {
            frame,
            nominals: BTreeMap::new(),
            features: FeatureSpace::new(vec![binary("f")]).unwrap(),
            values: vec![vec![vec![0], vec![1]], vec![vec![0], vec![0]]],
        }
    }

    #[test]
    fn learning_cuts_only_informative_links() {
        let m = two_worlds();
        m.validate().unwrap();
        let l = LearningUpdate {
            formulas: vec![KdlFormula::feature("f", "1")],
        };
        let out = apply_learning(&m, &l, &KdlUpdates::new()).unwrap();
        assert!(!out.frame.epistemic[0].related(0, 1));
        assert!(out.frame.epistemic[1].related(0, 1));
        assert_eq!(out.values, m.values);
        let none = apply_learning(&m, &LearningUpdate::default(), &KdlUpdates::new()).unwrap();
        assert_eq!(none, m);
    }

    #[test]
    fn dynamic_modality_uses_updated_model() {
        let m = two_worlds();
        let mut updates = KdlUpdates::new();
        updates
            .insert(
                "l",
                KdlUpdate::Learning(LearningUpdate {
                    formulas: vec![KdlFormula::feature("f", "1")],
                }),
            )
            .unwrap();
        let c = KdlChecker::new(m, &updates);
        let knows = KdlFormula::know(KdlFormula::neighbor(KdlFormula::feature("f", "1")));
        assert!(!c.satisfies(0, 0, &knows).unwrap());
        assert!(c.satisfies(0, 0, &KdlFormula::dynamic("l", knows)).unwrap());
    }

    #[test]
    fn validation_rejects_unknown_neighbours() {
        let mut m = two_worlds();
        m.frame.networks[1].clear();
        assert!(m.validate().is_err());
    }
}
