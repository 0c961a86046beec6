//! Acceptance criteria 1 to 10, one line each.
//!
//! Fixture criteria load the shipped fixture files and check the claims
//! with small hand-written oracles next to the model checker. Suite
//! criteria run the seeded verification suites at full size.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use dtml_cli::files::{parse_action, parse_model};
use dtml_cli::fixtures;
use dtml_cli::parse::parse_formula;
use dtml_cli::scenario::run_scenario;
use dtml_cli::verify::{self, Suite, VerifyOptions};
use dtml_core::action::product_update_pointed;
use dtml_core::{ActionRegistry, Checker, GroundAtom, Model, PointedAction, PointedModel};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

/// A pointed model threaded through the fixture actions.
struct Run {
    dir: &'static str,
    pm: PointedModel,
    actions: ActionRegistry,
}

impl Run {
    fn load(dir: &'static str, model: &str) -> Result<Self, String> {
        let text = fixtures::get(dir, model).ok_or(format!("missing {dir}/{model}"))?;
        let file = parse_model(text).map_err(|e| e.to_string())?;
        let actual = file.actual.ok_or("fixture names no actual world")?;
        Ok(Run {
            dir,
            pm: PointedModel {
                model: file.model,
                actual,
            },
            actions: ActionRegistry::new(),
        })
    }

    fn update(&mut self, file: &str, event: &str) -> Result<(), String> {
        let text = fixtures::get(self.dir, file).ok_or(format!("missing {file}"))?;
        let d = parse_action(text, &self.pm.model.signature).map_err(|e| e.to_string())?;
        let d = self.actions.insert(d, &self.pm.model.signature).map_err(|e| e.to_string())?;
        let pa = PointedAction::new(d, event).map_err(|e| e.to_string())?;
        self.pm = product_update_pointed(&self.pm, &pa, &self.actions).map_err(|e| e.to_string())?;
        Ok(())
    }

    fn m(&self) -> &Model {
        &self.pm.model
    }

    fn world(&self, name: &str) -> Result<usize, String> {
        self.m().world_index(name).ok_or(format!("no world {name}"))
    }

    fn agent(&self, name: &str) -> usize {
        self.m().agent_index(name).expect("fixture agent")
    }

    fn holds_at(&self, w: usize, text: &str) -> Result<bool, String> {
        let phi = parse_formula(text, Some(&self.m().signature)).map_err(|e| e.to_string())?;
        Checker::new(self.m().clone(), &self.actions)
            .holds(w, &phi)
            .map_err(|e| e.to_string())
    }

    fn holds(&self, text: &str) -> Result<bool, String> {
        self.holds_at(self.pm.actual, text)
    }

    fn cell(&self, agent: usize, w: usize) -> Vec<usize> {
        (0..self.m().world_count()).filter(|&v| self.m().related(agent, w, v)).collect()
    }

    /// `M` holds of someone at `w`.
    fn someone_failed(&self, w: usize) -> bool {
        (0..self.m().agent_count()).any(|x| self.m().holds_pred("M", x, w))
    }
}

fn criterion_1() -> Outcome {
    let r = Run::load("server_error", "server_error.model")?;
    let u = r.world("u")?;
    ensure!(r.pm.actual == u, "actual world is not u");
    // nobody knows: each agent's cell holds a world where nobody failed
    let oracle = (0..r.m().agent_count()).all(|x| r.cell(x, u).iter().any(|&v| !r.someone_failed(v)));
    ensure!(oracle, "oracle: some agent knows that someone failed");
    ensure!(r.holds("forall x. !K[x] exists y. M(y)")?, "nobody-knows formula is false");
    let c = r.agent("c");
    let oracle = r.cell(r.agent("a"), u).iter().all(|&v| r.m().holds_pred("M", c, v));
    ensure!(!oracle, "oracle: a knows M(c)");
    ensure!(!r.holds("K[a_] M(c_)")?, "K[a_] M(c_) is true before the log");
    Ok("nobody knows; K[a_] M(c_) false".into())
}

fn criterion_2() -> Outcome {
    let mut r = Run::load("server_error", "server_error.model")?;
    r.update("log.action", "3")?;
    let names: BTreeSet<&str> = r.m().worlds.iter().map(String::as_str).collect();
    ensure!(
        names == BTreeSet::from(["w1", "v2", "v4", "u3", "u4"]),
        "worlds are {names:?}"
    );
    let (a, b) = (r.agent("a"), r.agent("b"));
    let (w1, v2, v4, u4, u3) = (r.world("w1")?, r.world("v2")?, r.world("v4")?, r.world("u4")?, r.world("u3")?);
    ensure!(r.m().related(b, w1, v2), "w1 ~b v2 missing");
    ensure!(r.m().related(a, v4, u4), "v4 ~a u4 missing");
    ensure!(!r.m().related(a, w1, v2), "w1 ~a v2 present");
    ensure!(r.pm.actual == u3, "actual is not u3");
    let c = r.agent("c");
    ensure!(
        r.cell(a, u3).iter().all(|&v| r.m().holds_pred("M", c, v)),
        "oracle: a does not know M(c) at u3"
    );
    ensure!(r.holds("K[a_] M(c_)")?, "K[a_] M(c_) false at u3");
    Ok("5 worlds, edges as derived, K[a_] M(c_) at u3".into())
}

fn after_dedicto() -> Result<Run, String> {
    let mut r = Run::load("server_error", "server_error.model")?;
    r.update("log.action", "3")?;
    r.update("dedicto.action", "e")?;
    Ok(r)
}

fn criterion_3() -> Outcome {
    let r = after_dedicto()?;
    ensure!(r.m().world_count() == 4, "{} worlds", r.m().world_count());
    ensure!(r.m().worlds[r.pm.actual] == "u3e", "actual is {}", r.m().worlds[r.pm.actual]);
    for phi in [
        "forall x. K[x] exists y. M(y)",
        "exists x. K[a_] M(x)",
        "forall x. ((exists y. N(y,x)) -> <K[x]> !exists z. K[a_] M(z))",
    ] {
        ensure!(r.holds(phi)?, "false at u3e: {phi}");
    }
    // suspense: b and c each see a world where a knows nobody in particular
    let a = r.agent("a");
    let a_knows_someone = |w: usize| {
        (0..r.m().agent_count()).any(|x| r.cell(a, w).iter().all(|&v| r.m().holds_pred("M", x, v)))
    };
    for who in ["b", "c"] {
        let x = r.agent(who);
        ensure!(
            r.cell(x, r.pm.actual).iter().any(|&v| !a_knows_someone(v)),
            "oracle: {who} is not in suspense"
        );
    }
    Ok("4 worlds, the three suspense formulas true at u3e".into())
}

fn criterion_4() -> Outcome {
    let mut r = after_dedicto()?;
    r.update("dere.action", "s")?;
    ensure!(r.m().world_count() == 2, "{} worlds", r.m().world_count());
    ensure!(r.holds("forall x. K[x] exists y. K[a_] M(y)")?, "not everyone knows a knows de re");
    ensure!(
        r.holds("forall x. ((x = b_ | x = c_) -> (K[x] exists y. M(y)) & !exists z. K[x] M(z))")?,
        "b or c has de re knowledge"
    );
    for who in ["b", "c"] {
        let x = r.agent(who);
        let cell = r.cell(x, r.pm.actual);
        let de_re = (0..r.m().agent_count()).any(|y| cell.iter().all(|&v| r.m().holds_pred("M", y, v)));
        ensure!(!de_re, "oracle: {who} knows who failed");
    }
    Ok("2 worlds, de re knowledge of a shared, b and c lack it".into())
}

fn criterion_5() -> Outcome {
    let mut r = after_dedicto()?;
    r.update("dere.action", "s")?;
    let before = r.m().clone();
    let w = r.pm.actual;
    r.update("fired.action", "f")?;
    // set algebra: keep the old edges, add those set true, drop those set false
    let text = fixtures::get("server_error", "fired.action").unwrap();
    let d = parse_action(text, &before.signature).map_err(|e| e.to_string())?;
    let mut expected = before.interp[w].network.clone();
    let den = |c: &str| before.denotation(c, w).unwrap();
    for (atom, phi) in d.post(0) {
        let GroundAtom::Net(s, t) = atom else { continue };
        match phi {
            dtml_core::Formula::Top => {
                expected.insert((den(s), den(t)));
            }
            _ => {
                expected.remove(&(den(s), den(t)));
            }
        }
    }
    let (a, c) = (r.agent("a"), r.agent("c"));
    ensure!(expected == BTreeSet::from([(a, c)]), "oracle gives {expected:?}");
    let got = &r.m().interp[r.pm.actual].network;
    ensure!(*got == expected, "network is {got:?}");
    Ok("network {(a,c)}".into())
}

fn criterion_6() -> Outcome {
    let mut r = Run::load("thieves", "thieves.model")?;
    ensure!(r.m().worlds[r.pm.actual] == "w1", "actual is not w1");
    ensure!(r.holds("!exists x. K[c_](x = t_)")?, "cop knows who Tokyo is");
    let cop = r.agent("c");
    let cell = r.cell(cop, r.pm.actual);
    let tokyo: BTreeSet<usize> = cell.iter().map(|&v| r.m().denotation("t_", v).unwrap()).collect();
    ensure!(tokyo.len() > 1, "oracle: t_ is rigid across the cop's cell");

    r.update("criminal.action", "e")?;
    ensure!(r.holds("forall x. (N(t_,x) -> K[t_] N(t_,x))")?, "Tokyo does not know every neighbour");
    ensure!(
        r.holds("K[c_] exists x. (x != t_ & x != b_ & N(t_,x))")?,
        "cop lacks de dicto knowledge"
    );
    ensure!(
        !r.holds("exists x. K[c_] (x != t_ & x != b_ & N(t_,x))")?,
        "cop has de re knowledge"
    );
    // de re oracle: no single agent is Tokyo's third contact in every cell world
    let cell = r.cell(cop, r.pm.actual);
    let third = |v: usize, x: usize| {
        let m = r.m();
        let t = m.denotation("t_", v).unwrap();
        x != t && x != m.denotation("b_", v).unwrap() && m.holds_net(t, x, v)
    };
    ensure!(
        !(0..r.m().agent_count()).any(|x| cell.iter().all(|&v| third(v, x))),
        "oracle: the cop knows the contact de re"
    );

    r.update("reveal.action", "e")?;
    ensure!(r.m().world_count() == 2, "{} worlds after a_ = h_", r.m().world_count());
    for v in 0..r.m().world_count() {
        ensure!(
            r.m().denotation("a_", v) == r.m().denotation("h_", v),
            "a_ and h_ differ at {}",
            r.m().worlds[v]
        );
    }
    Ok("cop ignorant; Tokyo knows neighbours; de dicto not de re; 2 worlds after reveal".into())
}

fn suite(suite: Suite) -> Result<verify::VerifyReport, String> {
    let report = verify::run(&VerifyOptions::new(suite)).map_err(|e| e.to_string())?;
    ensure!(report.passed(), "{report}");
    Ok(report)
}

fn criterion_7() -> Outcome {
    let r = suite(Suite::Prop1)?;
    ensure!(r.cases == 200, "{} models", r.cases);
    Ok(format!("{} models, {} comparisons, no disagreement", r.cases, r.checks))
}

fn criterion_8() -> Outcome {
    let r = suite(Suite::Prop2)?;
    ensure!(r.cases == 100, "{} models", r.cases);
    Ok(format!("{} models, {} comparisons, morphisms and formulas agree", r.cases, r.checks))
}

fn criterion_9() -> Outcome {
    let r = suite(Suite::Fn)?;
    Ok(format!("images of {} models and their updates; {}", r.cases, r.notes.join("; ")))
}

fn criterion_10() -> Outcome {
    let r = suite(Suite::S5)?;
    ensure!(r.cases == 50, "{} models", r.cases);
    Ok(format!("{} models x 50 formulas, {} instances true", r.cases, r.checks))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("server error: nobody knows", criterion_1),
        ("server error: log update", criterion_2),
        ("server error: de dicto announcement", criterion_3),
        ("server error: de re announcement", criterion_4),
        ("server error: getting fired", criterion_5),
        ("thieves", criterion_6),
        ("hybrid translation suite", criterion_7),
        ("KDL compilation suite", criterion_8),
        ("static axiom suite", criterion_9),
        ("S5 suite", criterion_10),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = check();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail} ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {why} ({secs:.2}s)", i + 1);
            }
        }
    }
    // the scenario files must agree with the checks above
    for dir in fixtures::SCENARIOS {
        let r = run_scenario(fixtures::scenario(dir), &mut |p| fixtures::read(dir, p));
        if !r.passed() {
            failed += 1;
            println!("scenario {dir} FAIL:\n{}", r.transcript.join("\n"));
        }
    }
    println!(
        "{} of 10 criteria passed in {:.1}s",
        10 - failed.min(10),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
