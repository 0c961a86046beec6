use dtml_core::random::{random_closed_formula, random_model, ModelShape};
use dtml_core::{ActionRegistry, Checker, Formula, Model, Term, Valuation};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn shape() -> ModelShape {
    ModelShape {
        max_agents: 3,
        max_worlds: 4,
        constants: 2,
        predicates: 2,
    }
}

fn setup(seed: u64) -> (ChaCha8Rng, Model) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = random_model(&mut rng, &shape());
    (rng, m)
}

fn all_valuations(m: &Model, vars: &[&str]) -> Vec<Valuation> {
    let mut out = vec![Valuation::new()];
    for x in vars {
        out = out
            .into_iter()
            .flat_map(|g| (0..m.agent_count()).map(move |a| g.with(*x, a)))
            .collect();
    }
    out
}

/// The three S5 schemata for an agent bound by a universal quantifier.
fn s5_instances(phi: &Formula) -> Vec<Formula> {
    let x = Term::var("s");
    let k = |f: Formula| Formula::know(x.clone(), f);
    vec![
        Formula::forall("s", Formula::implies(k(phi.clone()), phi.clone())),
        Formula::forall("s", Formula::implies(k(phi.clone()), k(k(phi.clone())))),
        Formula::forall(
            "s",
            Formula::implies(Formula::not(k(phi.clone())), k(Formula::not(k(phi.clone())))),
        ),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn s5_schemata_are_valid(seed in any::<u64>()) {
        let (mut rng, m) = setup(seed);
        let reg = ActionRegistry::new();
        let checker = Checker::new(m.clone(), &reg);
        for _ in 0..4 {
            let phi = random_closed_formula(&mut rng, &m.signature, 3);
            for schema in s5_instances(&phi) {
                for w in 0..m.world_count() {
                    prop_assert!(checker.holds(w, &schema).unwrap(), "{} at {}", schema, w);
                }
            }
        }
    }

    #[test]
    fn closed_formulas_ignore_the_valuation(seed in any::<u64>()) {
        let (mut rng, m) = setup(seed);
        let reg = ActionRegistry::new();
        let checker = Checker::new(m.clone(), &reg);
        let phi = random_closed_formula(&mut rng, &m.signature, 4);
        for w in 0..m.world_count() {
            let base = checker.holds(w, &phi).unwrap();
            for g in all_valuations(&m, &["v0", "v1", "q"]) {
                prop_assert_eq!(checker.satisfies(w, &g, &phi).unwrap(), base);
            }
        }
    }

    #[test]
    fn universal_quantifier_unfolds_over_agents(seed in any::<u64>()) {
        let (mut rng, m) = setup(seed);
        let reg = ActionRegistry::new();
        let checker = Checker::new(m.clone(), &reg);
        let body = Formula::or(
            random_closed_formula(&mut rng, &m.signature, 3),
            Formula::pred("P0", Term::var("q")),
        );
        let all = Formula::forall("q", body.clone());
        for w in 0..m.world_count() {
            let unfolded = (0..m.agent_count())
                .all(|a| checker.satisfies(w, &Valuation::new().with("q", a), &body).unwrap());
            prop_assert_eq!(checker.holds(w, &all).unwrap(), unfolded);
        }
    }

    #[test]
    fn substituting_a_variable_matches_rebinding(seed in any::<u64>()) {
        let (mut rng, m) = setup(seed);
        let reg = ActionRegistry::new();
        let checker = Checker::new(m.clone(), &reg);
        // an open body with v0 free, possibly binding y inside
        let inner = random_closed_formula(&mut rng, &m.signature, 3);
        let open = Formula::and(
            Formula::know(Term::var("v0"), Formula::exists("y", Formula::net(Term::var("v0"), Term::var("y")))),
            Formula::or(inner, Formula::pred("P1", Term::var("v0"))),
        );
        let substituted = open.substitute("v0", &Term::var("y"));
        prop_assert!(!substituted.free_variables().contains("v0"));
        for w in 0..m.world_count() {
            for a in 0..m.agent_count() {
                let g = Valuation::new().with("y", a);
                prop_assert_eq!(
                    checker.satisfies(w, &g, &substituted).unwrap(),
                    checker.satisfies(w, &g.with("v0", a), &open).unwrap()
                );
            }
        }
    }

    #[test]
    fn knowledge_is_constant_across_a_cell_for_a_fixed_agent(seed in any::<u64>()) {
        let (mut rng, m) = setup(seed);
        let reg = ActionRegistry::new();
        let checker = Checker::new(m.clone(), &reg);
        let phi = Formula::know(Term::var("s"), random_closed_formula(&mut rng, &m.signature, 2));
        for a in 0..m.agent_count() {
            let g = Valuation::new().with("s", a);
            for cell in m.epistemic[a].cells() {
                let first = checker.satisfies(cell[0], &g, &phi).unwrap();
                for &w in cell {
                    prop_assert_eq!(checker.satisfies(w, &g, &phi).unwrap(), first);
                }
            }
        }
    }
}

#[test]
fn de_dicto_without_de_re() {
    // agent 0 cannot tell w from v; P0 holds of a different agent in each
    let sig = dtml_core::Signature::new(["c0_"], ["P0"]).unwrap();
    let mut m = Model::blank(sig, vec!["a".into(), "b".into(), "c".into()], vec!["w".into(), "v".into()]);
    m.epistemic[1] = dtml_core::Partition::discrete(2);
    m.epistemic[2] = dtml_core::Partition::discrete(2);
    for w in 0..2 {
        m.interp[w].constants = vec![Some(0)];
        m.interp[w].predicates[0].insert(w + 1);
    }
    let reg = ActionRegistry::new();
    let checker = Checker::new(m, &reg);
    let a = Term::cst("c0_");
    let de_dicto = Formula::know(a.clone(), Formula::exists("y", Formula::pred("P0", Term::var("y"))));
    let de_re = Formula::exists("y", Formula::know(a, Formula::pred("P0", Term::var("y"))));
    assert!(checker.holds(0, &de_dicto).unwrap());
    assert!(!checker.holds(0, &de_re).unwrap());
}

#[test]
fn random_models_have_no_diagnostics() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..100 {
        let m = random_model(&mut rng, &shape());
        assert!(m.validate().is_empty());
    }
}
