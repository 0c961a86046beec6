//! Scenario scripts: load a model and some action models, then thread the
//! model through updates while checking formulas along the way.
//!
//! ```text
//! model server_error.model
//! action log.action
//! assert forall x. !K[x] exists y. M(y)
//! update Log 3
//! expect-worlds 5
//! assert at u3 K[a_] M(c_)
//! ```
//!
//! Steps:
//!
//! * `model PATH`, `action PATH`: paths are resolved by the caller's loader.
//! * `update ACTION EVENT`: full product; the actual world moves to
//!   `(actual, EVENT)`, which must exist.
//! * `at WORLD`: moves the actual world.
//! * `assert [at WORLD] FORMULA`, `refute [at WORLD] FORMULA`.
//! * `expect-worlds N`, `expect-related AGENT W V`, `expect-unrelated AGENT W V`.
//! * `expect-network [at WORLD] a>b ...`: the exact network.
//! * `expect-error STEP`: the step must fail; the state is left unchanged.

use std::collections::BTreeSet;

use dtml_core::action::product_update_pointed;
use dtml_core::{ActionRegistry, Checker, Model, PointedAction, PointedModel, WorldId};

use crate::files::{parse_action, parse_model};
use crate::parse::parse_formula;

#[derive(Debug, Clone, Default)]
pub struct ScenarioReport {
    pub transcript: Vec<String>,
    pub failures: usize,
    /// The step error that stopped the run.
    pub error: Option<String>,
}

impl ScenarioReport {
    pub fn exit_code(&self) -> i32 {
        if self.error.is_some() {
            2
        } else if self.failures > 0 {
            1
        } else {
            0
        }
    }

    pub fn passed(&self) -> bool {
        self.exit_code() == 0
    }
}

#[derive(Clone, Default)]
struct State {
    model: Option<Model>,
    actual: Option<WorldId>,
    actions: ActionRegistry,
}

enum Verdict {
    Done(String),
    Failed(String),
}

impl State {
    fn model(&self) -> Result<&Model, String> {
        self.model.as_ref().ok_or_else(|| "no model loaded".to_string())
    }

    fn world(&self, name: &str) -> Result<WorldId, String> {
        self.model()?
            .world_index(name)
            .ok_or_else(|| format!("unknown world `{name}`"))
    }

    fn agent(&self, name: &str) -> Result<usize, String> {
        self.model()?
            .agent_index(name)
            .ok_or_else(|| format!("unknown agent `{name}`"))
    }

    fn actual(&self) -> Result<WorldId, String> {
        self.actual.ok_or_else(|| "no actual world; use `at WORLD`".to_string())
    }

    /// Splits an optional leading `at WORLD`.
    fn located<'a>(&self, rest: &'a str) -> Result<(WorldId, &'a str), String> {
        match rest.strip_prefix("at ") {
            Some(tail) => {
                let tail = tail.trim_start();
                let (w, tail) = tail.split_once(char::is_whitespace).unwrap_or((tail, ""));
                Ok((self.world(w)?, tail.trim()))
            }
            None => Ok((self.actual()?, rest)),
        }
    }

    fn step(
        &mut self,
        key: &str,
        rest: &str,
        loader: &mut dyn FnMut(&str) -> Result<String, String>,
    ) -> Result<Verdict, String> {
        let count = |n: usize| if n == 1 { "1 world".to_string() } else { format!("{n} worlds") };
        match key {
            "model" => {
                let file = parse_model(&loader(rest)?).map_err(|e| format!("{rest}:{e}"))?;
                let n = file.model.world_count();
                self.actual = file.actual;
                self.model = Some(file.model);
                self.actions = ActionRegistry::new();
                Ok(Verdict::Done(count(n)))
            }
            "action" => {
                let text = loader(rest)?;
                let sig = self.model()?.signature.clone();
                let d = parse_action(&text, &sig).map_err(|e| format!("{rest}:{e}"))?;
                let name = d.name().to_string();
                let n = d.event_count();
                self.actions.insert(d, &sig).map_err(|e| e.to_string())?;
                Ok(Verdict::Done(format!("{name}, {n} events")))
            }
            "update" => {
                let (name, event) = rest
                    .split_once(char::is_whitespace)
                    .ok_or("expected `update ACTION EVENT`")?;
                let d = self.actions.get(name).map_err(|e| e.to_string())?.clone();
                let pa = PointedAction::new(d, event.trim()).map_err(|e| e.to_string())?;
                let pm = PointedModel {
                    model: self.model()?.clone(),
                    actual: self.actual()?,
                };
                let next = product_update_pointed(&pm, &pa, &self.actions).map_err(|e| e.to_string())?;
                let summary = format!("{}, actual {}", count(next.model.world_count()), next.model.worlds[next.actual]);
                self.actual = Some(next.actual);
                self.model = Some(next.model);
                Ok(Verdict::Done(summary))
            }
            "at" => {
                self.actual = Some(self.world(rest)?);
                Ok(Verdict::Done("ok".into()))
            }
            "assert" | "refute" => {
                let (w, text) = self.located(rest)?;
                let m = self.model()?;
                let phi = parse_formula(text, Some(&m.signature)).map_err(|e| e.to_string())?;
                let value = Checker::new(m.clone(), &self.actions)
                    .holds(w, &phi)
                    .map_err(|e| e.to_string())?;
                let verdict = if value { "true" } else { "false" };
                if value == (key == "assert") {
                    Ok(Verdict::Done(format!("{verdict} at {}", m.worlds[w])))
                } else {
                    Ok(Verdict::Failed(format!("{verdict} at {}", m.worlds[w])))
                }
            }
            "expect-worlds" => {
                let want: usize = rest.parse().map_err(|_| format!("not a number: `{rest}`"))?;
                let got = self.model()?.world_count();
                if got == want {
                    Ok(Verdict::Done(count(got)))
                } else {
                    Ok(Verdict::Failed(count(got)))
                }
            }
            "expect-related" | "expect-unrelated" => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                let [a, w, v] = parts[..] else {
                    return Err(format!("expected `{key} AGENT WORLD WORLD`"));
                };
                let related = self.model()?.related(self.agent(a)?, self.world(w)?, self.world(v)?);
                let shown = if related { "related" } else { "unrelated" };
                if related == (key == "expect-related") {
                    Ok(Verdict::Done(shown.into()))
                } else {
                    Ok(Verdict::Failed(shown.into()))
                }
            }
            "expect-network" => {
                let (w, items) = self.located(rest)?;
                let mut want = BTreeSet::new();
                for item in items.split_whitespace() {
                    let (a, b) = item.split_once('>').ok_or_else(|| format!("expected `a>b`, found `{item}`"))?;
                    want.insert((self.agent(a)?, self.agent(b)?));
                }
                let m = self.model()?;
                let got = &m.interp[w].network;
                let shown: Vec<String> = got
                    .iter()
                    .map(|&(a, b)| format!("{}>{}", m.agents[a], m.agents[b]))
                    .collect();
                let shown = format!("{{{}}} at {}", shown.join(" "), m.worlds[w]);
                if *got == want {
                    Ok(Verdict::Done(shown))
                } else {
                    Ok(Verdict::Failed(shown))
                }
            }
            "expect-error" => {
                let (inner, tail) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                let mut probe = self.clone();
                match probe.step(inner, tail.trim(), loader) {
                    Err(e) => Ok(Verdict::Done(format!("error: {e}"))),
                    Ok(_) => Ok(Verdict::Failed("no error".into())),
                }
            }
            _ => Err(format!("unknown step `{key}`")),
        }
    }
}

/// Runs `script`, reading referenced files through `loader`. Assertion
/// failures are recorded and the run continues; any other error stops it.
pub fn run_scenario(script: &str, loader: &mut dyn FnMut(&str) -> Result<String, String>) -> ScenarioReport {
    let mut report = ScenarioReport::default();
    let mut state = State::default();
    for (i, raw) in script.lines().enumerate() {
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let (key, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
        match state.step(key, rest.trim(), loader) {
            Ok(Verdict::Done(note)) => report.transcript.push(format!("{}: {text}: {note}", i + 1)),
            Ok(Verdict::Failed(note)) => {
                report.failures += 1;
                report.transcript.push(format!("{}: {text}: FAILED ({note})", i + 1));
            }
            Err(e) => {
                report.transcript.push(format!("{}: {text}: ERROR {e}", i + 1));
                report.error = Some(format!("line {}: {e}", i + 1));
                break;
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn run(script: &str) -> ScenarioReport {
        run_scenario(script, &mut |p| fixtures::read("server_error", p))
    }

    #[test]
    fn empty_script() {
        let r = run("# nothing\n\n");
        assert_eq!(r.exit_code(), 0);
        assert!(r.transcript.is_empty());
    }

    #[test]
    fn failures_and_errors() {
        let r = run("model server_error.model\nassert K[a_] M(c_)\nexpect-worlds 3\n");
        assert_eq!(r.exit_code(), 1);
        assert_eq!(r.failures, 1);
        assert_eq!(r.transcript.len(), 3);
        let r = run("model server_error.model\nupdate Log 3\nexpect-worlds 3\n");
        assert_eq!(r.exit_code(), 2);
        assert_eq!(r.transcript.len(), 2);
    }

    #[test]
    fn expect_error_leaves_state_alone() {
        let r = run("model server_error.model\naction log.action\nat w\nexpect-error update Log 2\nexpect-worlds 3\n");
        assert!(r.passed(), "{:?}", r.transcript);
        assert!(r.transcript[3].contains("does not satisfy"), "{}", r.transcript[3]);
        let r = run("model server_error.model\nexpect-error at u\n");
        assert_eq!(r.exit_code(), 1);
    }

    #[test]
    fn shipped_fixtures_replay() {
        for dir in fixtures::SCENARIOS {
            let r = run_scenario(fixtures::scenario(dir), &mut |p| fixtures::read(dir, p));
            assert!(r.passed(), "{dir}:\n{}", r.transcript.join("\n"));
        }
    }
}
