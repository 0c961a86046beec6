//! Seeded generators for models and formulas, used by the differential and
//! property suites.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::hybrid::{HybridFormula, HybridModel, NetworkFrame};
use crate::kdl::{DynamicTransformation, Feature, FeatureSpace, KdlFormula, KdlModel, LearningUpdate};
use crate::model::{Model, Partition, WorldInterp};
use crate::syntax::{Formula, Signature, Term};

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// A partition of `n` worlds with roughly `1..=n` cells.
pub fn random_partition<R: Rng>(rng: &mut R, n: usize) -> Partition {
    let k = rng.gen_range(1..=n.max(1));
    let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
    Partition::from_labels(&labels)
}

fn random_network<R: Rng>(rng: &mut R, agents: usize, density: f64) -> BTreeSet<(usize, usize)> {
    let mut net = BTreeSet::new();
    for a in 0..agents {
        for b in 0..agents {
            if rng.gen_bool(density) {
                net.insert((a, b));
            }
        }
    }
    net
}

/// Shape of random term-modal models.
#[derive(Debug, Clone)]
pub struct ModelShape {
    pub max_agents: usize,
    pub max_worlds: usize,
    pub constants: usize,
    pub predicates: usize,
}

impl Default for ModelShape {
    fn default() -> Self {
        ModelShape {
            max_agents: 3,
            max_worlds: 4,
            constants: 2,
            predicates: 2,
        }
    }
}

/// A valid model with non-rigid constants and arbitrary networks.
pub fn random_model<R: Rng>(rng: &mut R, shape: &ModelShape) -> Model {
    let na = rng.gen_range(1..=shape.max_agents.max(1));
    let nw = rng.gen_range(1..=shape.max_worlds.max(1));
    let sig = Signature::new(names("c", shape.constants).into_iter().map(|c| c + "_"), names("P", shape.predicates))
        .expect("generated names are valid");
    let mut m = Model::blank(sig, names("a", na), names("w", nw));
    m.epistemic = (0..na).map(|_| random_partition(rng, nw)).collect();
    for w in 0..nw {
        m.interp[w] = WorldInterp {
            constants: (0..shape.constants).map(|_| Some(rng.gen_range(0..na))).collect(),
            predicates: (0..shape.predicates)
                .map(|_| (0..na).filter(|_| rng.gen_bool(0.5)).collect())
                .collect(),
            network: random_network(rng, na, 0.4),
        };
    }
    m
}

/// A closed formula over `sig` with modal and quantifier depth bounded by
/// `depth`. No action modalities.
pub fn random_closed_formula<R: Rng>(rng: &mut R, sig: &Signature, depth: usize) -> Formula {
    let mut bound = Vec::new();
    formula_in_scope(rng, sig, depth, &mut bound)
}

fn random_term<R: Rng>(rng: &mut R, sig: &Signature, bound: &[String]) -> Term {
    let nc = sig.constants().len();
    let total = nc + bound.len();
    if total == 0 {
        // only reachable with no constants and nothing bound; callers avoid it
        return Term::var("z");
    }
    let i = rng.gen_range(0..total);
    if i < nc {
        Term::cst(sig.constants()[i].clone())
    } else {
        Term::var(bound[i - nc].clone())
    }
}

fn formula_in_scope<R: Rng>(rng: &mut R, sig: &Signature, depth: usize, bound: &mut Vec<String>) -> Formula {
    let has_terms = !sig.constants().is_empty() || !bound.is_empty();
    if depth == 0 || rng.gen_bool(0.25) {
        if !has_terms {
            return if rng.gen_bool(0.5) { Formula::Top } else { Formula::bottom() };
        }
        let np = sig.predicates().len();
        return match rng.gen_range(0..4) {
            0 if np > 0 => {
                let p = sig.predicates()[rng.gen_range(0..np)].clone();
                Formula::pred(p, random_term(rng, sig, bound))
            }
            1 => Formula::eq(random_term(rng, sig, bound), random_term(rng, sig, bound)),
            _ => Formula::net(random_term(rng, sig, bound), random_term(rng, sig, bound)),
        };
    }
    match rng.gen_range(0..6) {
        0 => Formula::not(formula_in_scope(rng, sig, depth - 1, bound)),
        1 => Formula::and(
            formula_in_scope(rng, sig, depth - 1, bound),
            formula_in_scope(rng, sig, depth - 1, bound),
        ),
        2 => Formula::or(
            formula_in_scope(rng, sig, depth - 1, bound),
            formula_in_scope(rng, sig, depth - 1, bound),
        ),
        3 if has_terms => {
            let t = random_term(rng, sig, bound);
            Formula::know(t, formula_in_scope(rng, sig, depth - 1, bound))
        }
        _ => {
            let x = format!("v{}", bound.len());
            bound.push(x.clone());
            let body = formula_in_scope(rng, sig, depth - 1, bound);
            bound.pop();
            if rng.gen_bool(0.5) {
                Formula::forall(x, body)
            } else {
                Formula::exists(x, body)
            }
        }
    }
}

/// A hybrid model with up to `max_agents` agents and `max_worlds` worlds,
/// propositions `p0..`, nominals `i0..` assigned at random.
pub fn random_hybrid_model<R: Rng>(
    rng: &mut R,
    max_agents: usize,
    max_worlds: usize,
    props: usize,
    nominals: usize,
) -> HybridModel {
    let na = rng.gen_range(1..=max_agents.max(1));
    let nw = rng.gen_range(1..=max_worlds.max(1));
    let mut frame = NetworkFrame::blank(names("a", na), names("w", nw));
    frame.epistemic = (0..na).map(|_| random_partition(rng, nw)).collect();
    frame.networks = (0..nw).map(|_| random_network(rng, na, 0.4)).collect();
    let nominals = names("i", nominals)
        .into_iter()
        .map(|i| (i, rng.gen_range(0..na)))
        .collect();
    let mut valuation = BTreeMap::new();
    for p in names("p", props) {
        let mut set = BTreeSet::new();
        for w in 0..nw {
            for a in 0..na {
                if rng.gen_bool(0.5) {
                    set.insert((w, a));
                }
            }
        }
        valuation.insert(p, set);
    }
    HybridModel {
        frame,
        nominals,
        valuation,
    }
}

/// A formula of the full hybrid language over the model's propositions and
/// nominals, of depth at most `depth`.
pub fn random_hybrid_formula<R: Rng>(rng: &mut R, hm: &HybridModel, depth: usize) -> HybridFormula {
    let props: Vec<&String> = hm.valuation.keys().collect();
    let noms: Vec<&String> = hm.nominals.keys().collect();
    hybrid_formula(rng, &props, &noms, depth)
}

fn hybrid_formula<R: Rng>(rng: &mut R, props: &[&String], noms: &[&String], depth: usize) -> HybridFormula {
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..5) {
            0 => HybridFormula::Top,
            1 | 2 if !noms.is_empty() => HybridFormula::nominal(noms.choose(rng).unwrap().as_str()),
            _ if !props.is_empty() => HybridFormula::prop(props.choose(rng).unwrap().as_str()),
            _ => HybridFormula::Top,
        };
    }
    let sub = |rng: &mut R| hybrid_formula(rng, props, noms, depth - 1);
    match rng.gen_range(0..7) {
        0 => HybridFormula::not(sub(rng)),
        1 => HybridFormula::and(sub(rng), sub(rng)),
        2 if !noms.is_empty() => {
            let i = noms.choose(rng).unwrap().as_str();
            HybridFormula::at(i, sub(rng))
        }
        3 => HybridFormula::know(sub(rng)),
        4 => HybridFormula::neighbor(sub(rng)),
        5 => HybridFormula::univ(sub(rng)),
        _ => HybridFormula::not(HybridFormula::and(sub(rng), sub(rng))),
    }
}

/// A valid KDL model: binary features `f0..`, irreflexive symmetric
/// networks that every agent knows, and one nominal per agent `i0..`
/// (assigned in a random order).
pub fn random_kdl_model<R: Rng>(
    rng: &mut R,
    max_agents: usize,
    max_worlds: usize,
    max_features: usize,
) -> KdlModel {
    let na = rng.gen_range(1..=max_agents.max(1));
    let nw = rng.gen_range(1..=max_worlds.max(1));
    let nf = rng.gen_range(1..=max_features.max(1));
    let mut frame = NetworkFrame::blank(names("a", na), names("w", nw));
    frame.epistemic = (0..na).map(|_| random_partition(rng, nw)).collect();
    for a in 0..na {
        for b in a + 1..na {
            // an edge must look the same to both ends across their cells
            let mut pairs = Vec::new();
            for agent in [a, b] {
                for cell in frame.epistemic[agent].cells() {
                    pairs.extend(cell.windows(2).map(|p| (p[0], p[1])));
                }
            }
            let joint = Partition::closure_of(nw, &pairs);
            for cell in joint.cells() {
                if rng.gen_bool(0.5) {
                    for &w in cell {
                        frame.networks[w].insert((a, b));
                        frame.networks[w].insert((b, a));
                    }
                }
            }
        }
    }
    let features = FeatureSpace::new(
        names("f", nf)
            .into_iter()
            .map(|name| Feature {
                name,
                values: vec!["0".into(), "1".into()],
            })
            .collect(),
    )
    .expect("distinct feature names");
    let values = (0..nw)
        .map(|_| (0..na).map(|_| (0..nf).map(|_| rng.gen_range(0..2)).collect()).collect())
        .collect();
    let mut order: Vec<usize> = (0..na).collect();
    order.shuffle(rng);
    let nominals = order
        .into_iter()
        .enumerate()
        .map(|(k, a)| (format!("i{k}"), a))
        .collect();
    KdlModel {
        frame,
        nominals,
        features,
        values,
    }
}

/// A KDL formula over the model's features and nominals that may mention
/// the updates in `updates`.
pub fn random_kdl_formula<R: Rng>(rng: &mut R, m: &KdlModel, updates: &[String], depth: usize) -> KdlFormula {
    if depth == 0 || rng.gen_bool(0.2) {
        return kdl_atom(rng, m);
    }
    let sub = |rng: &mut R| random_kdl_formula(rng, m, updates, depth - 1);
    match rng.gen_range(0..8) {
        0 => KdlFormula::not(sub(rng)),
        1 => KdlFormula::and(sub(rng), sub(rng)),
        2 if !m.nominals.is_empty() => {
            let i = m.nominals.keys().nth(rng.gen_range(0..m.nominals.len())).unwrap().clone();
            KdlFormula::at(i, sub(rng))
        }
        3 => KdlFormula::know(sub(rng)),
        4 => KdlFormula::neighbor(sub(rng)),
        5 | 6 if !updates.is_empty() => {
            let u = updates.choose(rng).unwrap().clone();
            KdlFormula::dynamic(u, sub(rng))
        }
        _ => KdlFormula::or(sub(rng), sub(rng)),
    }
}

fn kdl_atom<R: Rng>(rng: &mut R, m: &KdlModel) -> KdlFormula {
    match rng.gen_range(0..6) {
        0 => KdlFormula::Top,
        1 if !m.nominals.is_empty() => {
            let i = m.nominals.keys().nth(rng.gen_range(0..m.nominals.len())).unwrap();
            KdlFormula::nominal(i.clone())
        }
        _ => {
            let f = m.features.features().choose(rng).expect("at least one feature");
            KdlFormula::feature(f.name.clone(), f.values.choose(rng).unwrap().clone())
        }
    }
}

/// A transformation whose formulas are pairwise inconsistent by
/// construction: a non-empty subset of `{ψ ∧ χ, ψ ∧ ¬χ, ¬ψ}`.
pub fn random_transformation<R: Rng>(rng: &mut R, m: &KdlModel, updates: &[String]) -> DynamicTransformation {
    let psi = random_kdl_formula(rng, m, updates, 2);
    let chi = random_kdl_formula(rng, m, updates, 2);
    let mut candidates = vec![
        KdlFormula::and(psi.clone(), chi.clone()),
        KdlFormula::and(psi.clone(), KdlFormula::not(chi)),
        KdlFormula::not(psi),
    ];
    candidates.shuffle(rng);
    let keep = rng.gen_range(1..=3);
    let rules = candidates
        .into_iter()
        .take(keep)
        .map(|phi| {
            let mut post = BTreeMap::new();
            for f in m.features.features() {
                if rng.gen_bool(0.6) {
                    post.insert(f.name.clone(), f.values.choose(rng).unwrap().clone());
                }
            }
            (phi, post)
        })
        .collect();
    DynamicTransformation::new(rules).expect("non-empty")
}

/// A learning update with at most `max_size` formulas.
pub fn random_learning<R: Rng>(rng: &mut R, m: &KdlModel, updates: &[String], max_size: usize) -> LearningUpdate {
    let k = rng.gen_range(0..=max_size);
    LearningUpdate {
        formulas: (0..k).map(|_| random_kdl_formula(rng, m, updates, 2)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_models_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            assert!(random_model(&mut rng, &ModelShape::default()).validate().is_empty());
            random_hybrid_model(&mut rng, 4, 5, 2, 2).validate().unwrap();
            random_kdl_model(&mut rng, 3, 4, 2).validate().unwrap();
        }
    }

    #[test]
    fn generated_formulas_are_closed_and_well_formed() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = random_model(&mut rng, &ModelShape::default());
        for _ in 0..100 {
            let phi = random_closed_formula(&mut rng, &m.signature, 4);
            assert!(phi.is_closed(), "{phi}");
            m.signature.check_formula(&phi).unwrap();
        }
    }

    #[test]
    fn same_seed_same_output() {
        let a = random_kdl_model(&mut ChaCha8Rng::seed_from_u64(3), 3, 4, 2);
        let b = random_kdl_model(&mut ChaCha8Rng::seed_from_u64(3), 3, 4, 2);
        assert_eq!(a, b);
    }
}
