//! Seeded verification suites behind `dtml verify`.
//!
//! Every case draws its own seed from the suite seed, and counterexamples
//! print that case seed, so a failure can be replayed on its own.

use std::collections::BTreeSet;
use std::fmt;

use clap::ValueEnum;
use dtml_core::hybrid::{check_prop1, tml_image};
use dtml_core::kdl::{
    check_characterization, check_prop2, mutate, Axiom, KdlModel, KdlUpdate, KdlUpdates, Mutation,
    DEFAULT_EVENT_CAP,
};
use dtml_core::random::{
    random_closed_formula, random_hybrid_formula, random_hybrid_model, random_kdl_formula, random_kdl_model,
    random_learning, random_model, random_transformation, ModelShape,
};
use dtml_core::{ActionRegistry, Checker, Formula, Model, Term};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fixtures;
use crate::scenario::run_scenario;

pub const DEFAULT_SEED: u64 = 20_190_722;

/// Listed counterexamples are capped; the count is not.
const SHOWN: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Hybrid semantics against the translation on the image model.
    Prop1,
    /// KDL updates against their compiled action models.
    Prop2,
    /// Static axioms on KDL images, and targeted mutations.
    Fn,
    /// Replays the shipped figure scenarios.
    Figures,
    /// T, 4 and 5 on random models.
    S5,
}

impl Suite {
    pub fn default_iterations(self) -> usize {
        match self {
            Suite::Prop1 => 200,
            Suite::Prop2 | Suite::Fn => 100,
            Suite::Figures => 1,
            Suite::S5 => 50,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.to_possible_value().expect("no skipped variants");
        f.write_str(v.get_name())
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub suite: Suite,
    pub seed: u64,
    pub iterations: usize,
    /// Applied to every image in the `fn` suite instead of the mutation sweep.
    pub mutate: Option<Mutation>,
    pub event_cap: usize,
}

impl VerifyOptions {
    pub fn new(suite: Suite) -> Self {
        VerifyOptions {
            suite,
            seed: DEFAULT_SEED,
            iterations: suite.default_iterations(),
            mutate: None,
            event_cap: DEFAULT_EVENT_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    pub cases: usize,
    pub checks: usize,
    pub counterexamples: Vec<String>,
    /// Extra summary lines.
    pub notes: Vec<String>,
}

impl VerifyReport {
    fn new(opts: &VerifyOptions) -> Self {
        VerifyReport {
            suite: opts.suite,
            seed: opts.seed,
            cases: 0,
            checks: 0,
            counterexamples: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {} seed {}", self.suite, self.seed)?;
        for n in &self.notes {
            writeln!(f, "  {n}")?;
        }
        for c in self.counterexamples.iter().take(SHOWN) {
            writeln!(f, "  counterexample: {c}")?;
        }
        if self.counterexamples.len() > SHOWN {
            writeln!(f, "  ... {} more", self.counterexamples.len() - SHOWN)?;
        }
        write!(
            f,
            "{}: {} cases, {} checks, {} counterexamples",
            if self.passed() { "ok" } else { "FAILED" },
            self.cases,
            self.checks,
            self.counterexamples.len()
        )
    }
}

pub fn run(opts: &VerifyOptions) -> dtml_core::Result<VerifyReport> {
    let mut report = VerifyReport::new(opts);
    let mut seeds = ChaCha8Rng::seed_from_u64(opts.seed);
    let case_seeds: Vec<u64> = (0..opts.iterations).map(|_| seeds.gen()).collect();
    match opts.suite {
        Suite::Prop1 => prop1(&case_seeds, &mut report)?,
        Suite::Prop2 => prop2(&case_seeds, opts.event_cap, &mut report)?,
        Suite::Fn => fn_suite(&case_seeds, opts, &mut report)?,
        Suite::Figures => figures(&mut report),
        Suite::S5 => s5(&case_seeds, &mut report)?,
    }
    Ok(report)
}

fn prop1(seeds: &[u64], report: &mut VerifyReport) -> dtml_core::Result<()> {
    for &s in seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let hm = random_hybrid_model(&mut rng, 4, 5, 2, 2);
        let corpus: Vec<_> = (0..10).map(|_| random_hybrid_formula(&mut rng, &hm, 4)).collect();
        let bad = check_prop1(&hm, &corpus)?;
        report.cases += 1;
        report.checks += corpus.len() * 2 * hm.frame.world_count() * hm.frame.agent_count();
        report
            .counterexamples
            .extend(bad.iter().map(|c| format!("case {s}: {c}")));
    }
    Ok(())
}

/// A random KDL model with a transformation `d` and a learning update `l`
/// of at most one formula, which may mention `d`.
pub fn kdl_case(seed: u64) -> (ChaCha8Rng, KdlModel, KdlUpdates) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = random_kdl_model(&mut rng, 3, 4, 2);
    let mut updates = KdlUpdates::new();
    let d = random_transformation(&mut rng, &m, &[]);
    updates
        .insert("d", KdlUpdate::Transformation(d))
        .expect("fresh name");
    let l = random_learning(&mut rng, &m, &["d".to_string()], 1);
    updates.insert("l", KdlUpdate::Learning(l)).expect("d is declared");
    (rng, m, updates)
}

fn prop2(seeds: &[u64], cap: usize, report: &mut VerifyReport) -> dtml_core::Result<()> {
    let names = ["d".to_string(), "l".to_string()];
    let mut morphism_checks = 0;
    for &s in seeds {
        let (mut rng, m, updates) = kdl_case(s);
        let corpus: Vec<_> = (0..100).map(|_| random_kdl_formula(&mut rng, &m, &names, 3)).collect();
        report.cases += 1;
        for name in &names {
            let r = check_prop2(&m, &updates, name, &corpus, cap)?;
            morphism_checks += 1;
            report.checks += r.comparisons;
            let problems = r
                .map_problems
                .iter()
                .map(|p| format!("map: {p}"))
                .chain(r.morphism.iter().map(|v| v.to_string()))
                .chain(r.disagreements.iter().cloned());
            report
                .counterexamples
                .extend(problems.map(|p| format!("case {s}, update {name}: {p}")));
        }
    }
    report
        .notes
        .push(format!("{morphism_checks} bounded-morphism checks, 100 formulas per model"));
    Ok(())
}

/// The images of `M`, `M^d` and `M^l` for one case.
fn images(seed: u64) -> dtml_core::Result<Vec<Model>> {
    let (_, m, updates) = kdl_case(seed);
    let mut out = vec![tml_image(&m.to_hybrid())?];
    let checker = dtml_core::kdl::KdlChecker::new(m, &updates);
    for name in ["d", "l"] {
        let after = match updates.get(name)? {
            KdlUpdate::Transformation(d) => checker.transform(d)?,
            KdlUpdate::Learning(l) => checker.learn(l)?,
        };
        out.push(tml_image(&after.to_hybrid())?);
    }
    Ok(out)
}

fn fn_suite(seeds: &[u64], opts: &VerifyOptions, report: &mut VerifyReport) -> dtml_core::Result<()> {
    let mut applied = [0usize; 3];
    for &s in seeds {
        report.cases += 1;
        for image in images(s)? {
            if let Some(mutation) = opts.mutate {
                let Some(mutated) = mutate(&image, mutation) else { continue };
                report.checks += 1;
                for f in check_characterization(&mutated)? {
                    report.counterexamples.push(format!("case {s}, {mutation}: {f}"));
                }
                continue;
            }
            report.checks += 1;
            for f in check_characterization(&image)? {
                report.counterexamples.push(format!("case {s}: {f}"));
            }
            for (k, mutation) in Mutation::ALL.into_iter().enumerate() {
                let Some(mutated) = mutate(&image, mutation) else { continue };
                applied[k] += 1;
                report.checks += 1;
                let failed: BTreeSet<Axiom> = check_characterization(&mutated)?.into_iter().map(|f| f.axiom).collect();
                if failed != BTreeSet::from([mutation.target()]) {
                    let names: Vec<String> = failed.iter().map(Axiom::to_string).collect();
                    report.counterexamples.push(format!(
                        "case {s}, {mutation}: expected only {} to fail, got [{}]",
                        mutation.target(),
                        names.join(", ")
                    ));
                }
            }
        }
    }
    if opts.mutate.is_none() {
        for (k, mutation) in Mutation::ALL.into_iter().enumerate() {
            report
                .notes
                .push(format!("{mutation} applied to {} images, falsifies {}", applied[k], mutation.target()));
            if applied[k] == 0 {
                report
                    .counterexamples
                    .push(format!("{mutation} found no image to apply to"));
            }
        }
    }
    Ok(())
}

fn figures(report: &mut VerifyReport) {
    for dir in fixtures::SCENARIOS {
        let r = run_scenario(fixtures::scenario(dir), &mut |p| fixtures::read(dir, p));
        report.cases += 1;
        report.checks += r.transcript.len();
        for line in &r.transcript {
            if line.contains("FAILED") || line.contains("ERROR") {
                report.counterexamples.push(format!("{dir}.scenario {line}"));
            }
        }
        report.notes.push(format!("{dir}.scenario: {} steps", r.transcript.len()));
    }
}

/// T, 4 and 5 for an agent bound by a universal quantifier.
pub fn s5_schemata(phi: &Formula) -> [Formula; 3] {
    let k = |f: Formula| Formula::know(Term::var("s"), f);
    let all = |f: Formula| Formula::forall("s", f);
    [
        all(Formula::implies(k(phi.clone()), phi.clone())),
        all(Formula::implies(k(phi.clone()), k(k(phi.clone())))),
        all(Formula::implies(Formula::not(k(phi.clone())), k(Formula::not(k(phi.clone()))))),
    ]
}

fn s5(seeds: &[u64], report: &mut VerifyReport) -> dtml_core::Result<()> {
    let shape = ModelShape {
        max_agents: 3,
        max_worlds: 4,
        constants: 2,
        predicates: 2,
    };
    let registry = ActionRegistry::new();
    for &s in seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let m = random_model(&mut rng, &shape);
        report.cases += 1;
        if let Some(d) = m.validate().first() {
            report.counterexamples.push(format!("case {s}: invalid model: {d}"));
            continue;
        }
        let checker = Checker::new(m.clone(), &registry);
        for _ in 0..50 {
            let phi = random_closed_formula(&mut rng, &m.signature, 3);
            for (name, schema) in ["T", "4", "5"].into_iter().zip(s5_schemata(&phi)) {
                for w in 0..m.world_count() {
                    report.checks += 1;
                    if !checker.holds(w, &schema)? {
                        report
                            .counterexamples
                            .push(format!("case {s}: {name} fails at {} for {phi}", m.worlds[w]));
                    }
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_are_deterministic() {
        let mut opts = VerifyOptions::new(Suite::Prop1);
        opts.iterations = 5;
        let a = run(&opts).unwrap();
        assert_eq!(a, run(&opts).unwrap());
        assert!(a.to_string().starts_with(&format!("suite prop1 seed {DEFAULT_SEED}")));
        assert_ne!(a.checks, 0);
        opts.seed += 1;
        assert_ne!(a, run(&opts).unwrap());
    }

    #[test]
    fn mutations_name_the_axiom() {
        let mut opts = VerifyOptions::new(Suite::Fn);
        opts.iterations = 10;
        assert!(run(&opts).unwrap().passed());
        opts.mutate = Some(Mutation::BrokenKnowNeigh);
        let r = run(&opts).unwrap();
        assert_eq!(r.exit_code(), 1);
        assert!(r.counterexamples.iter().all(|c| c.contains("KnowNeigh")), "{r}");
    }

    #[test]
    fn small_suites_pass() {
        for suite in [Suite::Prop2, Suite::Figures, Suite::S5] {
            let mut opts = VerifyOptions::new(suite);
            opts.iterations = 3;
            let r = run(&opts).unwrap();
            assert!(r.passed(), "{r}");
        }
    }
}
