//! The static axioms characterising images of KDL models, and targeted
//! mutations that break exactly one of them.

use std::fmt;

use crate::action::ActionRegistry;
use crate::model::{Model, Partition};
use crate::semantics::Checker;
use crate::syntax::{Formula, Term};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    /// There are exactly `n` agents and the constants name them all.
    Named,
    /// Constants denote the same agent across any epistemic link.
    Rig,
    /// Networks are irreflexive and symmetric.
    Neigh,
    /// Agents know who their neighbours are.
    KnowNeigh,
}

impl Axiom {
    pub const ALL: [Axiom; 4] = [Axiom::Named, Axiom::Rig, Axiom::Neigh, Axiom::KnowNeigh];
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::Named => "Named_n",
            Axiom::Rig => "Rig_n",
            Axiom::Neigh => "Neigh",
            Axiom::KnowNeigh => "KnowNeigh",
        })
    }
}

/// The four axioms for the signature whose constants are `constants`
/// (`n = constants.len()`), each as a closed formula.
pub fn generate_fn(constants: &[String]) -> Result<Vec<(Axiom, Formula)>> {
    let n = constants.len();
    if n == 0 {
        return Err(Error::Other("the axioms need at least one constant".into()));
    }
    let var = |i: usize| Term::var(format!("x{}", i + 1));
    let cst = |i: usize| Term::cst(constants[i].clone());
    let (x, y) = (Term::var("x"), Term::var("y"));

    let mut parts = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            parts.push(Formula::not(Formula::eq(var(i), var(j))));
        }
    }
    parts.push(Formula::forall(
        "y",
        Formula::disj((0..n).map(|i| Formula::eq(y.clone(), var(i)))),
    ));
    for i in 0..n {
        for j in i + 1..n {
            parts.push(Formula::not(Formula::eq(cst(i), cst(j))));
        }
    }
    for i in 0..n {
        parts.push(Formula::eq(var(i), cst(i)));
    }
    let mut named = Formula::conj(parts);
    for i in (0..n).rev() {
        named = Formula::exists(format!("x{}", i + 1), named);
    }

    let rig = Formula::conj((0..n).map(|i| {
        let same = Formula::eq(cst(i), x.clone());
        Formula::forall(
            "x",
            Formula::implies(same.clone(), Formula::forall("y", Formula::know(y.clone(), same))),
        )
    }));

    let neigh = Formula::forall(
        "x",
        Formula::forall(
            "y",
            Formula::and(
                Formula::not(Formula::net(x.clone(), x.clone())),
                Formula::iff(
                    Formula::net(x.clone(), y.clone()),
                    Formula::net(y.clone(), x.clone()),
                ),
            ),
        ),
    );

    let know_neigh = Formula::forall(
        "x",
        Formula::forall(
            "y",
            Formula::iff(
                Formula::net(x.clone(), y.clone()),
                Formula::know(x.clone(), Formula::net(x.clone(), y.clone())),
            ),
        ),
    );

    Ok(vec![
        (Axiom::Named, named),
        (Axiom::Rig, rig),
        (Axiom::Neigh, neigh),
        (Axiom::KnowNeigh, know_neigh),
    ])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomFailure {
    pub world: String,
    pub axiom: Axiom,
}

impl fmt::Display for AxiomFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} fails at {}", self.axiom, self.world)
    }
}

/// Model-checks every axiom at every world; lists the failures.
pub fn check_characterization(m: &Model) -> Result<Vec<AxiomFailure>> {
    let axioms = generate_fn(m.signature.constants())?;
    let registry = ActionRegistry::new();
    let checker = Checker::new(m.clone(), &registry);
    let mut out = Vec::new();
    for w in 0..m.world_count() {
        for (axiom, phi) in &axioms {
            if !checker.holds(w, phi)? {
                out.push(AxiomFailure {
                    world: m.worlds[w].clone(),
                    axiom: *axiom,
                });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mutation {
    AsymmetricNetwork,
    BrokenRigidity,
    BrokenKnowNeigh,
}

impl Mutation {
    pub const ALL: [Mutation; 3] = [
        Mutation::AsymmetricNetwork,
        Mutation::BrokenRigidity,
        Mutation::BrokenKnowNeigh,
    ];

    /// The axiom this mutation is meant to falsify.
    pub fn target(self) -> Axiom {
        match self {
            Mutation::AsymmetricNetwork => Axiom::Neigh,
            Mutation::BrokenRigidity => Axiom::Rig,
            Mutation::BrokenKnowNeigh => Axiom::KnowNeigh,
        }
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mutation::AsymmetricNetwork => "asymmetric-network",
            Mutation::BrokenRigidity => "broken-rigidity",
            Mutation::BrokenKnowNeigh => "broken-know-neigh",
        })
    }
}

impl std::str::FromStr for Mutation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Mutation::ALL
            .into_iter()
            .find(|m| m.to_string() == s)
            .ok_or_else(|| format!("unknown mutation `{s}`"))
    }
}

/// Applies `mutation` to an image model, touching as little as possible so
/// that only the targeted axiom breaks. `None` when the model has no
/// suitable spot: at least two agents are needed, and an agent whose
/// partition has a cell with two or more worlds.
///
/// * asymmetric network: add or remove the directed edge `(a, b)` on every
///   world of one of `a`'s cells, leaving `(b, a)` alone;
/// * broken rigidity: swap the denotations of two constants at one world
///   that some agent cannot tell apart from another;
/// * broken knowledge of neighbours: toggle the edge `{a, b}` in both
///   directions at a single world of a non-singleton cell of `a`.
pub fn mutate(m: &Model, mutation: Mutation) -> Option<Model> {
    if m.agent_count() < 2 {
        return None;
    }
    let (a, cell) = wide_cell(m)?;
    let b = if a == 0 { 1 } else { 0 };
    let mut out = m.clone();
    match mutation {
        Mutation::AsymmetricNetwork => {
            for &w in &cell {
                toggle(&mut out.interp[w].network, (a, b));
            }
        }
        Mutation::BrokenRigidity => {
            if m.signature.constants().len() < 2 {
                return None;
            }
            let w = cell[0];
            out.interp[w].constants.swap(0, 1);
            if out.interp[w].constants[0] == out.interp[w].constants[1] {
                return None;
            }
        }
        Mutation::BrokenKnowNeigh => {
            let w = cell[0];
            toggle(&mut out.interp[w].network, (a, b));
            toggle(&mut out.interp[w].network, (b, a));
        }
    }
    Some(out)
}

fn wide_cell(m: &Model) -> Option<(usize, Vec<usize>)> {
    m.epistemic.iter().enumerate().find_map(|(a, p): (usize, &Partition)| {
        p.cells().iter().find(|c| c.len() >= 2).map(|c| (a, c.clone()))
    })
}

fn toggle(set: &mut std::collections::BTreeSet<(usize, usize)>, pair: (usize, usize)) {
    if !set.remove(&pair) {
        set.insert(pair);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::WorldInterp;
    use crate::syntax::Signature;

    fn consts(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("c{i}_")).collect()
    }

    #[test]
    fn named_for_one_constant() {
        let axioms = generate_fn(&consts(1)).unwrap();
        let named = &axioms[0].1;
        let expected = Formula::exists(
            "x1",
            Formula::and(
                Formula::forall("y", Formula::eq(Term::var("y"), Term::var("x1"))),
                Formula::eq(Term::var("x1"), Term::cst("c0_")),
            ),
        );
        assert_eq!(*named, expected);
        assert!(generate_fn(&[]).is_err());
    }

    #[test]
    fn neigh_and_know_neigh_shapes() {
        let axioms = generate_fn(&consts(2)).unwrap();
        assert_eq!(
            axioms[2].1.to_string(),
            "forall x. forall y. !N(x,x) & (N(x,y) <-> N(y,x))"
        );
        assert_eq!(axioms[3].1.to_string(), "forall x. forall y. N(x,y) <-> (K[x] N(x,y))");
        for (_, phi) in &axioms {
            assert!(phi.is_closed());
        }
    }

    /// Two agents named rigidly, a single cell for agent 0, edge {0,1}
    /// everywhere.
    fn image() -> Model {
        let sig = Signature::new(consts(2), Vec::<String>::new()).unwrap();
        let mut m = Model::blank(sig, vec!["p".into(), "q".into()], vec!["w".into(), "v".into()]);
        m.epistemic[1] = Partition::discrete(2);
        for w in 0..2 {
            m.interp[w] = WorldInterp {
                constants: vec![Some(0), Some(1)],
                predicates: vec![],
                network: [(0, 1), (1, 0)].into(),
            };
        }
        m
    }

    #[test]
    fn mutations_break_exactly_their_axiom() {
        let m = image();
        assert!(check_characterization(&m).unwrap().is_empty());
        for mutation in Mutation::ALL {
            let bad = mutate(&m, mutation).unwrap();
            let failing: std::collections::BTreeSet<Axiom> = check_characterization(&bad)
                .unwrap()
                .into_iter()
                .map(|f| f.axiom)
                .collect();
            assert_eq!(failing, [mutation.target()].into(), "{mutation}");
        }
    }

    #[test]
    fn unnamed_agent_breaks_named() {
        let mut m = image();
        m.interp[0].constants = vec![Some(0), Some(0)];
        m.interp[1].constants = vec![Some(0), Some(0)];
        let failing: Vec<Axiom> = check_characterization(&m).unwrap().into_iter().map(|f| f.axiom).collect();
        assert_eq!(failing, vec![Axiom::Named, Axiom::Named]);
    }
}
