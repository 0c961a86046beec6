//! Finite constant-domain models with non-rigid constants.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::syntax::{Signature, Term};

pub type AgentId = usize;
pub type WorldId = usize;

/// An equivalence relation on worlds, stored as its cells.
///
/// A `Partition` built from arbitrary cells may be malformed (overlapping or
/// missing worlds); [`Partition::problems`] reports that, and
/// [`Model::validate`] surfaces it as diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    cells: Vec<Vec<WorldId>>,
    class_of: Vec<Option<usize>>,
    identity: Vec<WorldId>,
}

impl Partition {
    pub fn from_cells(world_count: usize, cells: Vec<Vec<WorldId>>) -> Self {
        let mut class_of = vec![None; world_count];
        for (i, cell) in cells.iter().enumerate() {
            for &w in cell {
                if let Some(slot) = class_of.get_mut(w) {
                    slot.get_or_insert(i);
                }
            }
        }
        Partition {
            cells,
            class_of,
            identity: (0..world_count).collect(),
        }
    }

    /// Every world in its own cell.
    pub fn discrete(world_count: usize) -> Self {
        Self::from_cells(world_count, (0..world_count).map(|w| vec![w]).collect())
    }

    /// One cell holding every world.
    pub fn total(world_count: usize) -> Self {
        Self::from_cells(world_count, vec![(0..world_count).collect()])
    }

    /// The reflexive-symmetric-transitive closure of `pairs`.
    pub fn closure_of(world_count: usize, pairs: &[(WorldId, WorldId)]) -> Self {
        let mut parent: Vec<usize> = (0..world_count).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for &(a, b) in pairs {
            if a < world_count && b < world_count {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
        let mut cells: BTreeMap<usize, Vec<WorldId>> = BTreeMap::new();
        for w in 0..world_count {
            let r = find(&mut parent, w);
            cells.entry(r).or_default().push(w);
        }
        Self::from_cells(world_count, cells.into_values().collect())
    }

    /// Classes from a labelling of worlds: worlds with equal labels share a cell.
    pub fn from_labels<L: Ord>(labels: &[L]) -> Self {
        let mut cells: BTreeMap<&L, Vec<WorldId>> = BTreeMap::new();
        for (w, l) in labels.iter().enumerate() {
            cells.entry(l).or_default().push(w);
        }
        let mut cells: Vec<_> = cells.into_values().collect();
        cells.sort();
        Self::from_cells(labels.len(), cells)
    }

    pub fn cells(&self) -> &[Vec<WorldId>] {
        &self.cells
    }

    pub fn world_count(&self) -> usize {
        self.class_of.len()
    }

    pub fn related(&self, w: WorldId, v: WorldId) -> bool {
        match (self.class_of[w], self.class_of[v]) {
            (Some(a), Some(b)) => a == b,
            _ => w == v,
        }
    }

    /// The cell containing `w` (just `[w]` if the partition misses it).
    pub fn cell_of(&self, w: WorldId) -> &[WorldId] {
        match self.class_of[w] {
            Some(c) => &self.cells[c],
            None => &self.identity[w..=w],
        }
    }

    /// Each world belongs to exactly one cell and every cell mentions only
    /// existing worlds.
    pub fn problems(&self) -> Vec<PartitionProblem> {
        let n = self.world_count();
        let mut seen = vec![0usize; n];
        let mut out = Vec::new();
        for cell in &self.cells {
            if cell.is_empty() {
                out.push(PartitionProblem::EmptyCell);
            }
            for &w in cell {
                match seen.get_mut(w) {
                    Some(count) => *count += 1,
                    None => out.push(PartitionProblem::UnknownWorld(w)),
                }
            }
        }
        for (w, &count) in seen.iter().enumerate() {
            match count {
                0 => out.push(PartitionProblem::Uncovered(w)),
                1 => {}
                _ => out.push(PartitionProblem::Overlap(w)),
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.problems().is_empty()
    }

    /// Canonical form: cells sorted internally and by first element.
    pub fn normalized(&self) -> Partition {
        let mut cells: Vec<Vec<WorldId>> = self
            .cells
            .iter()
            .map(|c| {
                let mut c = c.clone();
                c.sort_unstable();
                c.dedup();
                c
            })
            .collect();
        cells.sort();
        Partition::from_cells(self.world_count(), cells)
    }

    /// The partition induced on `keep`, renumbered in the order of `keep`.
    pub fn restrict(&self, keep: &[WorldId]) -> Partition {
        let mut new_id = vec![None; self.world_count()];
        for (i, &w) in keep.iter().enumerate() {
            new_id[w] = Some(i);
        }
        let cells = self
            .cells
            .iter()
            .map(|c| c.iter().filter_map(|&w| new_id.get(w).copied().flatten()).collect::<Vec<_>>())
            .filter(|c| !c.is_empty())
            .collect();
        Partition::from_cells(keep.len(), cells)
    }

    /// Refines this partition by `same`: worlds stay together only when the
    /// predicate holds. `same` must itself be an equivalence on each cell.
    pub fn refine(&self, mut same: impl FnMut(WorldId, WorldId) -> bool) -> Partition {
        let mut cells = Vec::new();
        for cell in &self.cells {
            let mut groups: Vec<Vec<WorldId>> = Vec::new();
            for &w in cell {
                match groups.iter_mut().find(|g| same(g[0], w)) {
                    Some(g) => g.push(w),
                    None => groups.push(vec![w]),
                }
            }
            cells.extend(groups);
        }
        Partition::from_cells(self.world_count(), cells)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionProblem {
    EmptyCell,
    UnknownWorld(WorldId),
    Uncovered(WorldId),
    Overlap(WorldId),
}

/// The interpretation at one world: constant denotations (indexed like the
/// signature's constants), predicate extensions and the network.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WorldInterp {
    pub constants: Vec<Option<AgentId>>,
    pub predicates: Vec<BTreeSet<AgentId>>,
    pub network: BTreeSet<(AgentId, AgentId)>,
}

impl WorldInterp {
    pub fn empty(sig: &Signature) -> Self {
        WorldInterp {
            constants: vec![None; sig.constants().len()],
            predicates: vec![BTreeSet::new(); sig.predicates().len()],
            network: BTreeSet::new(),
        }
    }
}

/// `M = (A, W, ∼, I)` over a fixed signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub signature: Signature,
    pub agents: Vec<String>,
    pub worlds: Vec<String>,
    /// One partition of the worlds per agent.
    pub epistemic: Vec<Partition>,
    /// One interpretation per world.
    pub interp: Vec<WorldInterp>,
}

impl Model {
    /// A model with every relation total and an empty interpretation.
    pub fn blank(signature: Signature, agents: Vec<String>, worlds: Vec<String>) -> Self {
        let n = worlds.len();
        let interp = (0..n).map(|_| WorldInterp::empty(&signature)).collect();
        Model {
            epistemic: vec![Partition::total(n); agents.len()],
            signature,
            agents,
            worlds,
            interp,
        }
    }

    pub fn agent_index(&self, name: &str) -> Option<AgentId> {
        self.agents.iter().position(|a| a == name)
    }

    pub fn world_index(&self, name: &str) -> Option<WorldId> {
        self.worlds.iter().position(|w| w == name)
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn world_count(&self) -> usize {
        self.worlds.len()
    }

    pub fn related(&self, agent: AgentId, w: WorldId, v: WorldId) -> bool {
        self.epistemic[agent].related(w, v)
    }

    /// `I(c, w)` by constant name.
    pub fn denotation(&self, constant: &str, w: WorldId) -> Option<AgentId> {
        let i = self.signature.constant_index(constant)?;
        self.interp[w].constants[i]
    }

    /// `⟦t⟧_w^{I,g}`. Panics on an undeclared or undenoted constant, which
    /// [`Model::validate`] and [`Signature::check_formula`] rule out.
    pub fn extension(&self, t: &Term, w: WorldId, g: &Valuation) -> AgentId {
        match t {
            Term::Var(x) => g.get(x),
            Term::Const(c) => self
                .denotation(c, w)
                .unwrap_or_else(|| panic!("constant `{c}` has no denotation at world {w}")),
        }
    }

    pub fn holds_pred(&self, pred: &str, agent: AgentId, w: WorldId) -> bool {
        match self.signature.predicate_index(pred) {
            Some(i) => self.interp[w].predicates[i].contains(&agent),
            None => false,
        }
    }

    pub fn holds_net(&self, a: AgentId, b: AgentId, w: WorldId) -> bool {
        self.interp[w].network.contains(&(a, b))
    }

    /// The submodel on `keep` with relations restricted.
    pub fn submodel(&self, keep: &[WorldId]) -> Model {
        Model {
            signature: self.signature.clone(),
            agents: self.agents.clone(),
            worlds: keep.iter().map(|&w| self.worlds[w].clone()).collect(),
            epistemic: self.epistemic.iter().map(|p| p.restrict(keep)).collect(),
            interp: keep.iter().map(|&w| self.interp[w].clone()).collect(),
        }
    }

    /// Diagnostics for every violated model invariant; empty iff valid.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if self.agents.is_empty() {
            out.push(Diagnostic::NoAgents);
        }
        if self.worlds.is_empty() {
            out.push(Diagnostic::NoWorlds);
        }
        duplicates(&self.agents, &mut out, Diagnostic::DuplicateAgent);
        duplicates(&self.worlds, &mut out, Diagnostic::DuplicateWorld);
        if self.epistemic.len() != self.agents.len() {
            out.push(Diagnostic::PartitionCount {
                expected: self.agents.len(),
                found: self.epistemic.len(),
            });
        }
        for (a, part) in self.epistemic.iter().enumerate() {
            let agent = self.agents.get(a).cloned().unwrap_or_else(|| format!("#{a}"));
            if part.world_count() != self.worlds.len() {
                out.push(Diagnostic::PartitionSize { agent: agent.clone() });
                continue;
            }
            for p in part.problems() {
                let world = |w: usize| self.worlds.get(w).cloned().unwrap_or_else(|| format!("#{w}"));
                out.push(match p {
                    PartitionProblem::EmptyCell => Diagnostic::EmptyCell { agent: agent.clone() },
                    PartitionProblem::UnknownWorld(w) => Diagnostic::CellUnknownWorld {
                        agent: agent.clone(),
                        world: w,
                    },
                    PartitionProblem::Uncovered(w) => Diagnostic::Uncovered {
                        agent: agent.clone(),
                        world: world(w),
                    },
                    PartitionProblem::Overlap(w) => Diagnostic::Overlap {
                        agent: agent.clone(),
                        world: world(w),
                    },
                });
            }
        }
        if self.interp.len() != self.worlds.len() {
            out.push(Diagnostic::InterpCount);
            return out;
        }
        let n = self.agents.len();
        for (w, interp) in self.interp.iter().enumerate() {
            let world = &self.worlds[w];
            for (i, c) in self.signature.constants().iter().enumerate() {
                match interp.constants.get(i).copied().flatten() {
                    None => out.push(Diagnostic::Undenoted {
                        constant: c.clone(),
                        world: world.clone(),
                    }),
                    Some(a) if a >= n => out.push(Diagnostic::AgentOutOfRange {
                        world: world.clone(),
                        agent: a,
                    }),
                    Some(_) => {}
                }
            }
            if interp.predicates.len() != self.signature.predicates().len() {
                out.push(Diagnostic::PredicateCount { world: world.clone() });
            }
            let bad_agent = interp
                .predicates
                .iter()
                .flatten()
                .chain(interp.network.iter().flat_map(|(a, b)| [a, b]))
                .find(|&&a| a >= n);
            if let Some(&a) = bad_agent {
                out.push(Diagnostic::AgentOutOfRange {
                    world: world.clone(),
                    agent: a,
                });
            }
        }
        out
    }
}

fn duplicates(names: &[String], out: &mut Vec<Diagnostic>, mk: impl Fn(String) -> Diagnostic) {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            out.push(mk(n.clone()));
        }
    }
}

/// A model invariant violation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    NoAgents,
    NoWorlds,
    DuplicateAgent(String),
    DuplicateWorld(String),
    PartitionCount { expected: usize, found: usize },
    PartitionSize { agent: String },
    EmptyCell { agent: String },
    CellUnknownWorld { agent: String, world: usize },
    Uncovered { agent: String, world: String },
    Overlap { agent: String, world: String },
    InterpCount,
    Undenoted { constant: String, world: String },
    PredicateCount { world: String },
    AgentOutOfRange { world: String, agent: usize },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::NoAgents => write!(f, "model has no agents"),
            Diagnostic::NoWorlds => write!(f, "model has no worlds"),
            Diagnostic::DuplicateAgent(a) => write!(f, "agent {a} declared twice"),
            Diagnostic::DuplicateWorld(w) => write!(f, "world {w} declared twice"),
            Diagnostic::PartitionCount { expected, found } => {
                write!(f, "expected {expected} epistemic partitions, found {found}")
            }
            Diagnostic::PartitionSize { agent } => {
                write!(f, "partition of {agent} is over the wrong number of worlds")
            }
            Diagnostic::EmptyCell { agent } => write!(f, "partition of {agent} has an empty cell"),
            Diagnostic::CellUnknownWorld { agent, world } => {
                write!(f, "partition of {agent} mentions unknown world #{world}")
            }
            Diagnostic::Uncovered { agent, world } => {
                write!(f, "partition of {agent} does not cover world {world}")
            }
            Diagnostic::Overlap { agent, world } => {
                write!(f, "partition of {agent} has overlapping cells at world {world}")
            }
            Diagnostic::InterpCount => write!(f, "interpretation count differs from world count"),
            Diagnostic::Undenoted { constant, world } => {
                write!(f, "constant {constant} undenoted at {world}")
            }
            Diagnostic::PredicateCount { world } => {
                write!(f, "predicate table at {world} does not match the signature")
            }
            Diagnostic::AgentOutOfRange { world, agent } => {
                write!(f, "agent #{agent} out of range at {world}")
            }
        }
    }
}

/// A total variable assignment: finitely many bindings plus a default agent
/// for every other variable.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Valuation {
    bindings: Vec<(String, AgentId)>,
    default: AgentId,
}

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_default(default: AgentId) -> Self {
        Valuation {
            bindings: Vec::new(),
            default,
        }
    }

    pub fn get(&self, x: &str) -> AgentId {
        self.bindings
            .iter()
            .rev()
            .find(|(v, _)| v == x)
            .map_or(self.default, |&(_, a)| a)
    }

    /// `g[x ↦ a]`.
    pub fn with(&self, x: impl Into<String>, a: AgentId) -> Self {
        let mut g = self.clone();
        g.push(x.into(), a);
        g
    }

    pub(crate) fn push(&mut self, x: String, a: AgentId) {
        self.bindings.push((x, a));
    }

    pub(crate) fn pop(&mut self) {
        self.bindings.pop();
    }

    /// The bindings restricted to `vars`, sorted; used as a cache key.
    pub fn restrict(&self, vars: &BTreeSet<String>) -> Vec<(String, AgentId)> {
        vars.iter().map(|v| (v.clone(), self.get(v))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_merges_chains() {
        let p = Partition::closure_of(4, &[(0, 1), (1, 2)]);
        assert!(p.related(0, 2));
        assert!(!p.related(0, 3));
        assert!(p.is_valid());
    }

    #[test]
    fn overlapping_cells_are_reported() {
        let p = Partition::from_cells(3, vec![vec![0, 1], vec![1, 2]]);
        assert_eq!(p.problems(), vec![PartitionProblem::Overlap(1)]);
        let p = Partition::from_cells(3, vec![vec![0, 1]]);
        assert_eq!(p.problems(), vec![PartitionProblem::Uncovered(2)]);
    }

    #[test]
    fn undenoted_constant_is_diagnosed() {
        let sig = Signature::new(["a_"], Vec::<String>::new()).unwrap();
        let m = Model::blank(sig, vec!["a".into()], vec!["w".into()]);
        let diags = m.validate();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].to_string(), "constant a_ undenoted at w");
    }

    #[test]
    fn valuation_shadowing() {
        let mut g = Valuation::with_default(2);
        assert_eq!(g.get("x"), 2);
        g.push("x".into(), 0);
        g.push("x".into(), 1);
        assert_eq!(g.get("x"), 1);
        g.pop();
        assert_eq!(g.get("x"), 0);
    }

    #[test]
    fn refine_splits_cells() {
        let p = Partition::total(4).refine(|a, b| a % 2 == b % 2);
        assert!(p.related(0, 2));
        assert!(!p.related(0, 1));
        assert!(p.is_valid());
    }
}
