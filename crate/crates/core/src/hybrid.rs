//! Hybrid network models, their indexical language and the translation
//! into term-modal logic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::action::ActionRegistry;
use crate::model::{AgentId, Model, Partition, Valuation, WorldId, WorldInterp};
use crate::semantics::Checker;
use crate::syntax::{Formula, Signature, Term};
use crate::{Error, Result};

/// Agents, worlds, one network per world and one partition per agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkFrame {
    pub agents: Vec<String>,
    pub worlds: Vec<String>,
    pub networks: Vec<BTreeSet<(AgentId, AgentId)>>,
    pub epistemic: Vec<Partition>,
}

impl NetworkFrame {
    /// Empty networks, every agent's relation total.
    pub fn blank(agents: Vec<String>, worlds: Vec<String>) -> Self {
        let n = worlds.len();
        NetworkFrame {
            networks: vec![BTreeSet::new(); n],
            epistemic: vec![Partition::total(n); agents.len()],
            agents,
            worlds,
        }
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn world_count(&self) -> usize {
        self.worlds.len()
    }

    pub fn agent_index(&self, name: &str) -> Option<AgentId> {
        self.agents.iter().position(|a| a == name)
    }

    pub fn world_index(&self, name: &str) -> Option<WorldId> {
        self.worlds.iter().position(|w| w == name)
    }

    pub fn neighbours(&self, w: WorldId, a: AgentId) -> impl Iterator<Item = AgentId> + '_ {
        self.networks[w]
            .range((a, 0)..=(a, usize::MAX))
            .map(|&(_, b)| b)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |s: String| Err(Error::InvalidModel(s));
        if self.agents.is_empty() {
            return fail("no agents".into());
        }
        if self.worlds.is_empty() {
            return fail("no worlds".into());
        }
        if self.networks.len() != self.worlds.len() {
            return fail("network count differs from world count".into());
        }
        if self.epistemic.len() != self.agents.len() {
            return fail("partition count differs from agent count".into());
        }
        for (a, p) in self.epistemic.iter().enumerate() {
            if p.world_count() != self.worlds.len() || !p.is_valid() {
                return fail(format!("partition of {} is not a partition of the worlds", self.agents[a]));
            }
        }
        let n = self.agents.len();
        for (w, net) in self.networks.iter().enumerate() {
            if net.iter().any(|&(a, b)| a >= n || b >= n) {
                return fail(format!("network at {} mentions an unknown agent", self.worlds[w]));
            }
        }
        Ok(())
    }

    /// The constant naming agent `a` in the image signature.
    pub fn constant_for(&self, a: AgentId) -> String {
        format!("{}_", self.agents[a])
    }
}

/// `(A, W, (N_w), ∼, g, V)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HybridModel {
    pub frame: NetworkFrame,
    pub nominals: BTreeMap<String, AgentId>,
    /// `V(p)` as sets of (world, agent) pairs; the keys are the declared
    /// propositions.
    pub valuation: BTreeMap<String, BTreeSet<(WorldId, AgentId)>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HybridFormula {
    Top,
    Prop(String),
    Nominal(String),
    Not(Box<HybridFormula>),
    And(Box<HybridFormula>, Box<HybridFormula>),
    At(String, Box<HybridFormula>),
    Know(Box<HybridFormula>),
    Neighbor(Box<HybridFormula>),
    Univ(Box<HybridFormula>),
}

impl HybridFormula {
    pub fn prop(p: impl Into<String>) -> Self {
        HybridFormula::Prop(p.into())
    }

    pub fn nominal(i: impl Into<String>) -> Self {
        HybridFormula::Nominal(i.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Self) -> Self {
        HybridFormula::Not(Box::new(a))
    }

    pub fn and(a: Self, b: Self) -> Self {
        HybridFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Self, b: Self) -> Self {
        Self::not(Self::and(Self::not(a), Self::not(b)))
    }

    pub fn implies(a: Self, b: Self) -> Self {
        Self::not(Self::and(a, Self::not(b)))
    }

    pub fn at(i: impl Into<String>, a: Self) -> Self {
        HybridFormula::At(i.into(), Box::new(a))
    }

    pub fn know(a: Self) -> Self {
        HybridFormula::Know(Box::new(a))
    }

    pub fn neighbor(a: Self) -> Self {
        HybridFormula::Neighbor(Box::new(a))
    }

    pub fn univ(a: Self) -> Self {
        HybridFormula::Univ(Box::new(a))
    }

    pub fn nominals(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect(&mut out, &mut BTreeSet::new());
        out
    }

    pub fn propositions(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect(&mut BTreeSet::new(), &mut out);
        out
    }

    fn collect(&self, noms: &mut BTreeSet<String>, props: &mut BTreeSet<String>) {
        match self {
            HybridFormula::Top => {}
            HybridFormula::Prop(p) => {
                props.insert(p.clone());
            }
            HybridFormula::Nominal(i) => {
                noms.insert(i.clone());
            }
            HybridFormula::At(i, a) => {
                noms.insert(i.clone());
                a.collect(noms, props);
            }
            HybridFormula::Not(a)
            | HybridFormula::Know(a)
            | HybridFormula::Neighbor(a)
            | HybridFormula::Univ(a) => a.collect(noms, props),
            HybridFormula::And(a, b) => {
                a.collect(noms, props);
                b.collect(noms, props);
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            HybridFormula::Top | HybridFormula::Prop(_) | HybridFormula::Nominal(_) => 0,
            HybridFormula::Not(a)
            | HybridFormula::At(_, a)
            | HybridFormula::Know(a)
            | HybridFormula::Neighbor(a)
            | HybridFormula::Univ(a) => 1 + a.depth(),
            HybridFormula::And(a, b) => 1 + a.depth().max(b.depth()),
        }
    }
}

impl fmt::Display for HybridFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HybridFormula::Top => write!(f, "true"),
            HybridFormula::Prop(p) | HybridFormula::Nominal(p) => write!(f, "{p}"),
            HybridFormula::Not(a) => write!(f, "!{}", a),
            HybridFormula::And(a, b) => write!(f, "({a} & {b})"),
            HybridFormula::At(i, a) => write!(f, "@{i} {}", a),
            HybridFormula::Know(a) => write!(f, "K {}", a),
            HybridFormula::Neighbor(a) => write!(f, "N {}", a),
            HybridFormula::Univ(a) => write!(f, "U {}", a),
        }
    }
}

impl HybridModel {
    pub fn validate(&self) -> Result<()> {
        self.frame.validate()?;
        let n = self.frame.agent_count();
        for (i, &a) in &self.nominals {
            if a >= n {
                return Err(Error::Hybrid(format!("nominal {i} names an unknown agent")));
            }
        }
        let (nw, na) = (self.frame.world_count(), n);
        for (p, set) in &self.valuation {
            if set.iter().any(|&(w, a)| w >= nw || a >= na) {
                return Err(Error::Hybrid(format!("V({p}) mentions an unknown world or agent")));
            }
        }
        Ok(())
    }

    /// Errors on nominals or propositions the model does not declare.
    pub fn check_formula(&self, phi: &HybridFormula) -> Result<()> {
        if let Some(i) = phi.nominals().iter().find(|i| !self.nominals.contains_key(*i)) {
            return Err(Error::Hybrid(format!("undeclared nominal `{i}`")));
        }
        if let Some(p) = phi.propositions().iter().find(|p| !self.valuation.contains_key(*p)) {
            return Err(Error::Hybrid(format!("undeclared proposition `{p}`")));
        }
        Ok(())
    }

    /// `M, w, a ⊨ φ`.
    pub fn satisfies(&self, w: WorldId, a: AgentId, phi: &HybridFormula) -> Result<bool> {
        self.check_formula(phi)?;
        Ok(self.eval(w, a, phi))
    }

    fn eval(&self, w: WorldId, a: AgentId, phi: &HybridFormula) -> bool {
        match phi {
            HybridFormula::Top => true,
            HybridFormula::Prop(p) => self.valuation[p].contains(&(w, a)),
            HybridFormula::Nominal(i) => self.nominals[i] == a,
            HybridFormula::Not(b) => !self.eval(w, a, b),
            HybridFormula::And(b, c) => self.eval(w, a, b) && self.eval(w, a, c),
            HybridFormula::At(i, b) => self.eval(w, self.nominals[i], b),
            HybridFormula::Know(b) => self.frame.epistemic[a]
                .cell_of(w)
                .iter()
                .all(|&v| self.eval(v, a, b)),
            HybridFormula::Neighbor(b) => self.frame.neighbours(w, a).all(|c| self.eval(w, c, b)),
            HybridFormula::Univ(b) => (0..self.frame.agent_count()).all(|c| self.eval(w, c, b)),
        }
    }

    /// The signature of the image: one constant per agent, one predicate
    /// per proposition.
    pub fn image_signature(&self) -> Result<Signature> {
        let constants: Vec<String> = (0..self.frame.agent_count())
            .map(|a| self.frame.constant_for(a))
            .collect();
        Signature::new(constants, self.valuation.keys().cloned())
    }

    /// The valuation for evaluating translations: every nominal-variable
    /// bound to its agent.
    pub fn nominal_valuation(&self) -> Valuation {
        let mut g = Valuation::new();
        for (i, &a) in &self.nominals {
            g.push(i.clone(), a);
        }
        g
    }
}

/// `𝖳(M)` with constants interpreted rigidly: the `k`-th constant names the
/// `k`-th agent at every world.
pub fn tml_image(hm: &HybridModel) -> Result<Model> {
    hm.validate()?;
    let sig = hm.image_signature()?;
    let props: Vec<&String> = hm.valuation.keys().collect();
    let n = hm.frame.agent_count();
    let interp = (0..hm.frame.world_count())
        .map(|w| WorldInterp {
            constants: (0..n).map(Some).collect(),
            predicates: props
                .iter()
                .map(|p| {
                    hm.valuation[*p]
                        .iter()
                        .filter(|&&(v, _)| v == w)
                        .map(|&(_, a)| a)
                        .collect()
                })
                .collect(),
            network: hm.frame.networks[w].clone(),
        })
        .collect();
    Ok(Model {
        signature: sig,
        agents: hm.frame.agents.clone(),
        worlds: hm.frame.worlds.clone(),
        epistemic: hm.frame.epistemic.clone(),
        interp,
    })
}

/// The variable a translation is relative to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pivot {
    X,
    Y,
}

impl Pivot {
    pub fn var(self) -> &'static str {
        match self {
            Pivot::X => "x",
            Pivot::Y => "y",
        }
    }

    pub fn other(self) -> Pivot {
        match self {
            Pivot::X => Pivot::Y,
            Pivot::Y => Pivot::X,
        }
    }

    pub fn both() -> [Pivot; 2] {
        [Pivot::X, Pivot::Y]
    }
}

impl fmt::Display for Pivot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.var())
    }
}

impl std::str::FromStr for Pivot {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "x" => Ok(Pivot::X),
            "y" => Ok(Pivot::Y),
            _ => Err(format!("pivot must be x or y, got `{s}`")),
        }
    }
}

/// `T_x` or `T_y`. Nominals become variables of the same name.
pub fn translate(phi: &HybridFormula, pivot: Pivot) -> Result<Formula> {
    if let Some(i) = phi
        .nominals()
        .into_iter()
        .find(|i| i == Pivot::X.var() || i == Pivot::Y.var())
    {
        return Err(Error::PivotCollision(i));
    }
    Ok(translate_unchecked(phi, pivot))
}

pub(crate) fn translate_unchecked(phi: &HybridFormula, pivot: Pivot) -> Formula {
    let x = pivot.var();
    let here = Term::var(x);
    match phi {
        HybridFormula::Top => Formula::Top,
        HybridFormula::Prop(p) => Formula::pred(p.clone(), here),
        HybridFormula::Nominal(i) => Formula::eq(here, Term::var(i.clone())),
        HybridFormula::Not(a) => Formula::not(translate_unchecked(a, pivot)),
        HybridFormula::And(a, b) => {
            Formula::and(translate_unchecked(a, pivot), translate_unchecked(b, pivot))
        }
        HybridFormula::At(i, a) => translate_unchecked(a, pivot).substitute(x, &Term::var(i.clone())),
        HybridFormula::Know(a) => Formula::know(here, translate_unchecked(a, pivot)),
        HybridFormula::Neighbor(a) => {
            let y = pivot.other().var();
            Formula::forall(
                y,
                Formula::implies(
                    Formula::net(here, Term::var(y)),
                    translate_unchecked(a, pivot.other()),
                ),
            )
        }
        HybridFormula::Univ(a) => Formula::forall(x, translate_unchecked(a, pivot)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prop1Counterexample {
    pub formula: String,
    pub world: String,
    pub agent: String,
    pub pivot: Pivot,
    pub hybrid: bool,
    pub translated: bool,
}

impl fmt::Display for Prop1Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} at ({}, {}) pivot {}: hybrid {} but translation {}",
            self.formula, self.world, self.agent, self.pivot, self.hybrid, self.translated
        )
    }
}

/// Compares `M, w, a ⊨ φ` with `𝖳(M), w ⊨_g T_•(φ)` (where `g` maps the
/// pivot to `a` and each nominal to its agent) for every formula, world,
/// agent and pivot. Returns the disagreements.
pub fn check_prop1(hm: &HybridModel, corpus: &[HybridFormula]) -> Result<Vec<Prop1Counterexample>> {
    let image = tml_image(hm)?;
    let registry = ActionRegistry::new();
    let checker = Checker::new(image, &registry);
    let base = hm.nominal_valuation();
    let mut out = Vec::new();
    for phi in corpus {
        hm.check_formula(phi)?;
        for pivot in Pivot::both() {
            let t = translate(phi, pivot)?;
            for w in 0..hm.frame.world_count() {
                for a in 0..hm.frame.agent_count() {
                    let hybrid = hm.eval(w, a, phi);
                    let translated = checker.satisfies(w, &base.with(pivot.var(), a), &t)?;
                    if hybrid != translated {
                        out.push(Prop1Counterexample {
                            formula: phi.to_string(),
                            world: hm.frame.worlds[w].clone(),
                            agent: hm.frame.agents[a].clone(),
                            pivot,
                            hybrid,
                            translated,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Agents a, b; worlds w, v with a unsure between them; a's only
    /// neighbour is b, and p holds of b at both worlds.
    fn knows_neighbours() -> HybridModel {
        let mut frame = NetworkFrame::blank(vec!["a".into(), "b".into()], vec!["w".into(), "v".into()]);
        frame.epistemic[1] = Partition::discrete(2);
        for w in 0..2 {
            frame.networks[w].insert((0, 1));
            frame.networks[w].insert((1, 0));
        }
        HybridModel {
            frame,
            nominals: BTreeMap::from([("i".to_string(), 0)]),
            valuation: BTreeMap::from([("p".to_string(), BTreeSet::from([(0, 1), (1, 1)]))]),
        }
    }

    #[test]
    fn knows_all_neighbours_are_p() {
        let hm = knows_neighbours();
        let phi = HybridFormula::know(HybridFormula::neighbor(HybridFormula::prop("p")));
        assert!(hm.satisfies(0, 0, &phi).unwrap());
        assert!(!hm.satisfies(0, 1, &phi).unwrap());
        assert!(check_prop1(&hm, &[phi]).unwrap().is_empty());
    }

    #[test]
    fn translation_clauses() {
        let p = HybridFormula::prop("p");
        assert_eq!(translate(&p, Pivot::X).unwrap().to_string(), "p(x)");
        let np = HybridFormula::neighbor(p.clone());
        assert_eq!(translate(&np, Pivot::X).unwrap().to_string(), "forall y. N(x,y) -> p(y)");
        assert_eq!(translate(&np, Pivot::Y).unwrap().to_string(), "forall x. N(y,x) -> p(x)");
        let at = HybridFormula::at("i", HybridFormula::know(p.clone()));
        assert_eq!(
            translate(&at, Pivot::X).unwrap(),
            Formula::know(Term::var("i"), Formula::pred("p", Term::var("i")))
        );
        let u = HybridFormula::univ(p);
        assert_eq!(translate(&u, Pivot::X).unwrap().to_string(), "forall x. p(x)");
    }

    #[test]
    fn pivot_collision() {
        let phi = HybridFormula::at("x", HybridFormula::Top);
        assert_eq!(translate(&phi, Pivot::Y), Err(Error::PivotCollision("x".into())));
    }

    #[test]
    fn undeclared_names() {
        let hm = knows_neighbours();
        assert!(hm.satisfies(0, 0, &HybridFormula::prop("q")).is_err());
        assert!(hm.satisfies(0, 0, &HybridFormula::nominal("j")).is_err());
    }

    #[test]
    fn image_shares_frame() {
        let hm = knows_neighbours();
        let m = tml_image(&hm).unwrap();
        assert_eq!(m.agents, hm.frame.agents);
        assert_eq!(m.worlds, hm.frame.worlds);
        assert_eq!(m.epistemic, hm.frame.epistemic);
        assert_eq!(m.signature.constants(), ["a_", "b_"]);
        assert!(m.validate().is_empty());
    }
}
