//! World maps between models over the same agents: bounded morphisms and
//! isomorphisms.

use std::fmt;

use crate::model::{Model, Valuation, WorldId};
use crate::syntax::{GroundAtom, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MorphismViolation {
    /// The models or the map do not fit together at all.
    Shape(String),
    Denotation {
        world: String,
        image: String,
        constant: String,
    },
    Atom {
        world: String,
        image: String,
        atom: String,
    },
    /// `w ∼_a v` but not `b(w) ∼_a b(v)`.
    Forth {
        agent: String,
        from: String,
        to: String,
    },
    /// `b(w) ∼_a u` but no `v ∼_a w` has `b(v) = u`.
    Back {
        agent: String,
        world: String,
        target: String,
    },
}

impl fmt::Display for MorphismViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MorphismViolation::Shape(s) => write!(f, "shape: {s}"),
            MorphismViolation::Denotation {
                world,
                image,
                constant,
            } => write!(f, "atoms: {constant} denotes differently at {world} and {image}"),
            MorphismViolation::Atom { world, image, atom } => {
                write!(f, "atoms: {atom} differs between {world} and {image}")
            }
            MorphismViolation::Forth { agent, from, to } => {
                write!(f, "forth: {from} ~{agent} {to} is not preserved")
            }
            MorphismViolation::Back {
                agent,
                world,
                target,
            } => write!(f, "back: image of {world} ~{agent} {target} has no preimage step"),
        }
    }
}

/// Checks that `map` (indexed by `m1`'s worlds) is a bounded morphism into
/// `m2`: atoms and denotations agree, links go forth, links come back.
pub fn bounded_morphism_check(m1: &Model, m2: &Model, map: &[WorldId]) -> Vec<MorphismViolation> {
    let mut out = Vec::new();
    if m1.agents != m2.agents {
        out.push(MorphismViolation::Shape("agent domains differ".into()));
    }
    if m1.signature != m2.signature {
        out.push(MorphismViolation::Shape("signatures differ".into()));
    }
    if map.len() != m1.world_count() {
        out.push(MorphismViolation::Shape(format!(
            "map covers {} of {} worlds",
            map.len(),
            m1.world_count()
        )));
    }
    if let Some(&u) = map.iter().find(|&&u| u >= m2.world_count()) {
        out.push(MorphismViolation::Shape(format!("map target #{u} out of range")));
    }
    if !out.is_empty() {
        return out;
    }
    let g = Valuation::new();
    let atoms = m1.signature.ground_atoms();
    for (w, &u) in map.iter().enumerate() {
        let (world, image) = (&m1.worlds[w], &m2.worlds[u]);
        for c in m1.signature.constants() {
            if m1.denotation(c, w) != m2.denotation(c, u) {
                out.push(MorphismViolation::Denotation {
                    world: world.clone(),
                    image: image.clone(),
                    constant: c.clone(),
                });
            }
        }
        for atom in &atoms {
            if atom_holds(m1, w, atom, &g) != atom_holds(m2, u, atom, &g) {
                out.push(MorphismViolation::Atom {
                    world: world.clone(),
                    image: image.clone(),
                    atom: atom.to_string(),
                });
            }
        }
    }
    for (agent, name) in m1.agents.iter().enumerate() {
        for w in 0..m1.world_count() {
            for &v in m1.epistemic[agent].cell_of(w) {
                if !m2.related(agent, map[w], map[v]) {
                    out.push(MorphismViolation::Forth {
                        agent: name.clone(),
                        from: m1.worlds[w].clone(),
                        to: m1.worlds[v].clone(),
                    });
                }
            }
            for &u in m2.epistemic[agent].cell_of(map[w]) {
                let hit = m1.epistemic[agent].cell_of(w).iter().any(|&v| map[v] == u);
                if !hit {
                    out.push(MorphismViolation::Back {
                        agent: name.clone(),
                        world: m1.worlds[w].clone(),
                        target: m2.worlds[u].clone(),
                    });
                }
            }
        }
    }
    out
}

fn atom_holds(m: &Model, w: WorldId, atom: &GroundAtom, g: &Valuation) -> bool {
    let den = |c: &str| m.extension(&Term::cst(c), w, g);
    match atom {
        GroundAtom::Pred(p, c) => m.holds_pred(p, den(c), w),
        GroundAtom::Net(a, b) => m.holds_net(den(a), den(b), w),
        GroundAtom::Eq(a, b) => den(a) == den(b),
    }
}

/// A bijection on worlds preserving the interpretation and every relation
/// in both directions, if one exists. World names are ignored.
pub fn find_isomorphism(a: &Model, b: &Model) -> Option<Vec<WorldId>> {
    if a.agents != b.agents || a.signature != b.signature || a.world_count() != b.world_count() {
        return None;
    }
    let n = a.world_count();
    let candidates: Vec<Vec<WorldId>> = (0..n)
        .map(|w| (0..n).filter(|&u| a.interp[w] == b.interp[u]).collect())
        .collect();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if extend(a, b, &candidates, 0, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}

fn extend(
    a: &Model,
    b: &Model,
    candidates: &[Vec<WorldId>],
    w: WorldId,
    map: &mut [WorldId],
    used: &mut [bool],
) -> bool {
    if w == map.len() {
        return true;
    }
    for &u in &candidates[w] {
        if used[u] {
            continue;
        }
        let consistent = (0..w).all(|v| {
            (0..a.agent_count()).all(|ag| a.related(ag, w, v) == b.related(ag, u, map[v]))
        });
        if !consistent {
            continue;
        }
        map[w] = u;
        used[u] = true;
        if extend(a, b, candidates, w + 1, map, used) {
            return true;
        }
        used[u] = false;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Partition;
    use crate::syntax::Signature;

    fn sample() -> Model {
        let sig = Signature::new(["a_"], ["P"]).unwrap();
        let mut m = Model::blank(
            sig,
            vec!["a".into(), "b".into()],
            vec!["w".into(), "v".into(), "u".into()],
        );
        for w in 0..3 {
            m.interp[w].constants[0] = Some(0);
        }
        m.interp[0].predicates[0].insert(0);
        m.interp[2].predicates[0].insert(1);
        m.epistemic[1] = Partition::from_cells(3, vec![vec![0, 1], vec![2]]);
        m
    }

    #[test]
    fn identity_is_a_bounded_morphism() {
        let m = sample();
        assert!(bounded_morphism_check(&m, &m, &[0, 1, 2]).is_empty());
    }

    #[test]
    fn collapsing_disagreeing_worlds_breaks_atoms() {
        let m = sample();
        let report = bounded_morphism_check(&m, &m, &[1, 1, 2]);
        assert!(report.iter().any(|v| matches!(v, MorphismViolation::Atom { .. })));
    }

    #[test]
    fn back_condition() {
        let m = sample();
        let mut coarse = m.clone();
        coarse.epistemic[1] = Partition::total(3);
        assert!(bounded_morphism_check(&m, &coarse, &[0, 1, 2])
            .iter()
            .any(|v| matches!(v, MorphismViolation::Back { .. })));
        assert!(bounded_morphism_check(&coarse, &m, &[0, 1, 2])
            .iter()
            .any(|v| matches!(v, MorphismViolation::Forth { .. })));
    }

    #[test]
    fn isomorphism_up_to_reordering() {
        let m = sample();
        let mut r = m.submodel(&[2, 0, 1]);
        r.worlds = vec!["x".into(), "y".into(), "z".into()];
        assert_eq!(find_isomorphism(&m, &r), Some(vec![1, 2, 0]));
        let mut other = m.clone();
        other.epistemic[0] = Partition::discrete(3);
        assert_eq!(find_isomorphism(&m, &other), None);
    }
}
