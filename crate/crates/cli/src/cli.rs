//! Command-line interface. Exit codes: 0 success, 1 a check came out
//! false or an update was not applicable, 2 any error.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use dtml_core::action::{product_update_pointed, validate_update};
use dtml_core::kdl::{Compiler, KdlModel, KdlUpdates, Mutation, DEFAULT_EVENT_CAP};
use dtml_core::morphism::find_isomorphism;
use dtml_core::{hybrid, ActionModel, ActionRegistry, Checker, Model, PointedAction, PointedModel, Pivot};

use crate::files::{parse_action, parse_kdl_model, parse_model, parse_updates, write_action, write_model};
use crate::parse::{parse_formula, parse_hybrid, parse_kdl};
use crate::scenario::run_scenario;
use crate::verify::{self, Suite, VerifyOptions, DEFAULT_SEED};

#[derive(Debug, Parser)]
#[command(name = "dtml", version, about = "Model checker for dynamic term-modal logic on epistemic social networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate formulas at a world of a model.
    Check {
        model: PathBuf,
        /// Defaults to the model's actual world.
        #[arg(long)]
        world: Option<String>,
        #[arg(long = "formula", short = 'f')]
        formulas: Vec<String>,
        /// One formula per line; `#` starts a comment.
        #[arg(long)]
        formula_file: Option<PathBuf>,
        /// Action model files that `[A:e]` may refer to.
        #[arg(long = "action", short = 'a')]
        actions: Vec<PathBuf>,
        /// Make `[A:e] phi` an error where `pre(e)` fails instead of true.
        #[arg(long)]
        strict_dynamic: bool,
    },
    /// Apply a pointed product update and write the result.
    Update {
        model: PathBuf,
        action: PathBuf,
        #[arg(long)]
        event: String,
        /// Defaults to the model's actual world.
        #[arg(long)]
        world: Option<String>,
        /// Written to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also check that the output reads back unchanged, that an update
        /// by the identity action is an isomorphism, and, when the action
        /// itself is trivial, that the output is isomorphic to the input.
        #[arg(long)]
        self_test: bool,
    },
    /// Print the term-modal translation of a hybrid or KDL formula.
    Translate {
        #[arg(long, conflicts_with = "kdl_formula", required_unless_present = "kdl_formula")]
        hybrid_formula: Option<String>,
        /// Needs `--model`.
        #[arg(long, requires = "model")]
        kdl_formula: Option<String>,
        #[arg(long, default_value = "x")]
        pivot: Pivot,
        /// Comma-separated nominals for a hybrid formula.
        #[arg(long, value_delimiter = ',')]
        nominals: Vec<String>,
        /// KDL model supplying nominals and features.
        #[arg(long)]
        model: Option<PathBuf>,
        /// KDL updates file for `[u]` operators.
        #[arg(long, requires = "model")]
        updates: Option<PathBuf>,
        /// Also print the action models the translation refers to.
        #[arg(long)]
        show_actions: bool,
    },
    /// Run a randomized or fixture verification suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Defaults depend on the suite.
        #[arg(long)]
        iterations: Option<usize>,
        /// For `fn`: apply this mutation to every image and report the
        /// axioms it breaks.
        #[arg(long)]
        mutate: Option<Mutation>,
        /// Largest learning action model to compile.
        #[arg(long, env = "DTML_EVENT_CAP", default_value_t = DEFAULT_EVENT_CAP)]
        event_cap: usize,
    },
    /// Run a scenario script; paths in it are relative to the script.
    Scenario { script: PathBuf },
}

/// Reported as exit code 2.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path, err: &mut dyn Write) -> Result<(Model, Option<usize>), Failure> {
    let file = parse_model(&read(path)?).map_err(|e| Failure(format!("{}:{e}", path.display())))?;
    for w in &file.warnings {
        let _ = writeln!(err, "warning: {}: {w}", path.display());
    }
    Ok((file.model, file.actual))
}

fn load_action(path: &Path, m: &Model) -> Result<ActionModel, Failure> {
    parse_action(&read(path)?, &m.signature).map_err(|e| Failure(format!("{}:{e}", path.display())))
}

fn pick_world(m: &Model, world: Option<&str>, actual: Option<usize>) -> Result<usize, Failure> {
    match world {
        Some(w) => m
            .world_index(w)
            .ok_or_else(|| Failure(format!("unknown world `{w}`"))),
        None => actual.ok_or_else(|| Failure("no --world given and the model names no actual world".into())),
    }
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Check {
            model,
            world,
            formulas,
            formula_file,
            actions,
            strict_dynamic,
        } => {
            let (m, actual) = load_model(&model, err)?;
            let w = pick_world(&m, world.as_deref(), actual)?;
            let mut registry = ActionRegistry::new();
            for path in &actions {
                registry.insert(load_action(path, &m)?, &m.signature)?;
            }
            let mut texts: Vec<(String, String)> = formulas
                .into_iter()
                .enumerate()
                .map(|(i, f)| (format!("--formula #{}", i + 1), f))
                .collect();
            if let Some(path) = &formula_file {
                for (i, line) in read(path)?.lines().enumerate() {
                    let text = line.split('#').next().unwrap_or("").trim();
                    if !text.is_empty() {
                        texts.push((format!("{}:{}", path.display(), i + 1), text.to_string()));
                    }
                }
            }
            if texts.is_empty() {
                return Err(Failure("no formulas given".into()));
            }
            let checker = Checker::new(m.clone(), &registry).strict(strict_dynamic);
            let mut all = true;
            for (origin, text) in texts {
                let phi = parse_formula(&text, Some(&m.signature)).map_err(|e| Failure(format!("{origin}: {e}")))?;
                let value = checker.holds(w, &phi)?;
                all &= value;
                writeln!(out, "{:<5} {} |= {phi}", value, m.worlds[w])?;
            }
            Ok(if all { 0 } else { 1 })
        }
        Command::Update {
            model,
            action,
            event,
            world,
            out: out_path,
            self_test,
        } => {
            let (m, actual) = load_model(&model, err)?;
            let w = pick_world(&m, world.as_deref(), actual)?;
            let d = load_action(&action, &m)?;
            let mut registry = ActionRegistry::new();
            let d = registry.insert(d, &m.signature)?;
            let pa = PointedAction::new(d.clone(), &event)?;
            let pm = PointedModel { model: m.clone(), actual: w };
            let next = match product_update_pointed(&pm, &pa, &registry) {
                Ok(next) => next,
                Err(e @ dtml_core::Error::NotApplicable { .. }) => {
                    writeln!(out, "not applicable: {e}")?;
                    return Ok(1);
                }
                Err(e) => return Err(e.into()),
            };
            let text = write_model(&next.model, Some(next.actual));
            let summary = format!(
                "{} worlds, actual {}",
                next.model.world_count(),
                next.model.worlds[next.actual]
            );
            match &out_path {
                Some(p) => {
                    fs::write(p, &text).map_err(|e| Failure(format!("{}: {e}", p.display())))?;
                    writeln!(out, "{summary}")?;
                }
                None => {
                    out.write_all(text.as_bytes())?;
                    writeln!(err, "{summary}")?;
                }
            }
            if !self_test {
                return Ok(0);
            }
            let mut problems = Vec::new();
            match parse_model(&text) {
                Ok(back) if back.model == next.model && back.actual == Some(next.actual) => {}
                Ok(_) => problems.push("written model reads back differently".to_string()),
                Err(e) => problems.push(format!("written model does not parse: {e}")),
            }
            for v in validate_update(&m, &d, &registry)? {
                problems.push(format!("{v:?}"));
            }
            let id = dtml_core::action::product_update(&m, &ActionModel::identity("Id"), &registry)?;
            if find_isomorphism(&m, &id.model).is_none() {
                problems.push("identity update is not an isomorphism".into());
            }
            let trivial = d.event_count() == 1 && *d.pre(0) == dtml_core::Formula::Top && d.post(0).is_empty();
            if trivial && find_isomorphism(&m, &next.model).is_none() {
                problems.push("trivial action changed the model".into());
            }
            for p in &problems {
                writeln!(err, "self-test: {p}")?;
            }
            if problems.is_empty() {
                writeln!(err, "self-test: ok")?;
                Ok(0)
            } else {
                Ok(1)
            }
        }
        Command::Translate {
            hybrid_formula,
            kdl_formula,
            pivot,
            nominals,
            model,
            updates,
            show_actions,
        } => {
            let kdl_model: Option<KdlModel> = match &model {
                Some(p) => Some(parse_kdl_model(&read(p)?).map_err(|e| Failure(format!("{}:{e}", p.display())))?),
                None => None,
            };
            let mut noms: BTreeSet<String> = nominals.into_iter().filter(|n| !n.is_empty()).collect();
            if let Some(km) = &kdl_model {
                noms.extend(km.nominals.keys().cloned());
            }
            if let Some(text) = hybrid_formula {
                let phi = parse_hybrid(&text, &noms)?;
                writeln!(out, "{}", hybrid::translate(&phi, pivot)?)?;
                return Ok(0);
            }
            let km = kdl_model.expect("clap requires --model");
            let text = kdl_formula.expect("clap requires one formula");
            let ups = match &updates {
                Some(p) => parse_updates(&read(p)?, &km).map_err(|e| Failure(format!("{}:{e}", p.display())))?,
                None => KdlUpdates::new(),
            };
            let declared: BTreeSet<String> = ups.names().iter().cloned().collect();
            let phi = parse_kdl(&text, &noms, Some(&declared))?;
            let mut compiler = Compiler::new(&km, &ups, DEFAULT_EVENT_CAP)?;
            writeln!(out, "{}", compiler.translate(&phi, pivot)?)?;
            if show_actions {
                let registry = compiler.into_registry();
                let names: Vec<String> = registry.names().map(str::to_string).collect();
                for name in names {
                    writeln!(out, "\n{}", write_action(registry.get(&name)?).trim_end())?;
                }
            }
            Ok(0)
        }
        Command::Verify {
            suite,
            seed,
            iterations,
            mutate,
            event_cap,
        } => {
            let mut opts = VerifyOptions::new(suite);
            opts.seed = seed;
            opts.iterations = iterations.unwrap_or(opts.iterations);
            opts.mutate = mutate;
            opts.event_cap = event_cap;
            if mutate.is_some() && suite != Suite::Fn {
                return Err(Failure("--mutate only applies to --suite fn".into()));
            }
            let report = verify::run(&opts)?;
            writeln!(out, "{report}")?;
            Ok(report.exit_code())
        }
        Command::Scenario { script } => {
            let text = read(&script)?;
            let base = script.parent().map(Path::to_path_buf).unwrap_or_default();
            let report = run_scenario(&text, &mut |p| {
                let path = base.join(p);
                fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))
            });
            for line in &report.transcript {
                writeln!(out, "{line}")?;
            }
            if let Some(e) = &report.error {
                writeln!(err, "error: {e}")?;
            }
            Ok(report.exit_code())
        }
    }
}
