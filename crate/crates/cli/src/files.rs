//! Line-oriented text formats for models, action models, KDL models and
//! KDL updates, with writers that the readers accept back.
//!
//! `#` starts a comment. Formulas run to the end of their line.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use dtml_core::hybrid::NetworkFrame;
use dtml_core::kdl::{
    DynamicTransformation, Feature, FeatureSpace, KdlModel, KdlUpdate, KdlUpdates, LearningUpdate,
};
use dtml_core::model::WorldInterp;
use dtml_core::{ActionModel, Formula, GroundAtom, Model, Partition, Signature, WorldId};

use crate::parse::{parse_formula, parse_kdl, ParseError};

/// A parsed model file.
#[derive(Debug, Clone)]
pub struct ModelFile {
    pub model: Model,
    pub actual: Option<WorldId>,
    /// Non-fatal remarks, e.g. relations that had to be closed.
    pub warnings: Vec<String>,
}

/// One significant line: number, text without comment, and the offset of
/// the text within the raw line.
struct Line<'a> {
    no: usize,
    text: &'a str,
    indent: usize,
}

impl Line<'_> {
    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.no, self.indent + 1, message)
    }

    /// The directive keyword and the rest of the line.
    fn split(&self) -> (&str, &str) {
        match self.text.split_once(char::is_whitespace) {
            Some((k, rest)) => (k, rest.trim()),
            None => (self.text, ""),
        }
    }

    /// Column (1-based) of `part`, which must be a subslice of the line.
    fn col_of(&self, part: &str) -> usize {
        self.indent + (part.as_ptr() as usize - self.text.as_ptr() as usize) + 1
    }
}

fn lines(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let body = raw.split('#').next().unwrap_or("");
            let trimmed = body.trim();
            if trimmed.is_empty() {
                return None;
            }
            Some(Line {
                no: i + 1,
                text: trimmed,
                indent: body.len() - body.trim_start().len(),
            })
        })
        .collect()
}

/// Splits `head: tail` at the first colon.
fn colon<'a>(line: &Line<'a>, rest: &'a str) -> Result<(&'a str, &'a str), ParseError> {
    rest.split_once(':')
        .map(|(a, b)| (a.trim(), b.trim()))
        .ok_or_else(|| line.err("expected `:`"))
}

fn formula_on(line: &Line<'_>, part: &str, sig: &Signature) -> Result<Formula, ParseError> {
    parse_formula(part, Some(sig)).map_err(|e| e.shifted(line.no, line.col_of(part)))
}

fn index_of(names: &[String], name: &str, what: &str, line: &Line<'_>) -> Result<usize, ParseError> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| line.err(format!("unknown {what} `{name}`")))
}

fn words(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_string).collect()
}

/// Reads `partition a b: w v | u`, `partition a: total` or
/// `partition a: discrete`.
fn partition_line(
    line: &Line<'_>,
    rest: &str,
    agents: &[String],
    worlds: &[String],
    out: &mut [Option<Partition>],
) -> Result<(), ParseError> {
    let (who, cells) = colon(line, rest)?;
    let n = worlds.len();
    let p = match cells {
        "total" => Partition::total(n),
        "discrete" => Partition::discrete(n),
        _ => {
            let mut parsed = Vec::new();
            for cell in cells.split('|') {
                let mut c = Vec::new();
                for w in cell.split_whitespace() {
                    c.push(index_of(worlds, w, "world", line)?);
                }
                parsed.push(c);
            }
            let p = Partition::from_cells(n, parsed);
            if let Some(problem) = p.problems().first() {
                return Err(line.err(format!("not a partition of the worlds: {problem:?}")));
            }
            p
        }
    };
    for a in who.split_whitespace() {
        out[index_of(agents, a, "agent", line)?] = Some(p.clone());
    }
    Ok(())
}

/// Reads `edges a: w-v v-u`, closing the pairs to an equivalence.
fn edges_line(
    line: &Line<'_>,
    rest: &str,
    agents: &[String],
    worlds: &[String],
    out: &mut [Option<Partition>],
    warnings: &mut Vec<String>,
) -> Result<(), ParseError> {
    let (who, pairs) = colon(line, rest)?;
    let mut parsed = Vec::new();
    for pair in pairs.split_whitespace() {
        let (w, v) = pair
            .split_once('-')
            .ok_or_else(|| line.err(format!("expected `world-world`, found `{pair}`")))?;
        parsed.push((index_of(worlds, w, "world", line)?, index_of(worlds, v, "world", line)?));
    }
    let p = Partition::closure_of(worlds.len(), &parsed);
    for a in who.split_whitespace() {
        out[index_of(agents, a, "agent", line)?] = Some(p.clone());
        warnings.push(format!(
            "line {}: edges for {a} closed under reflexivity, symmetry and transitivity",
            line.no
        ));
    }
    Ok(())
}

/// Reads `a>b`, `a<b` and `a<>b` items into directed pairs.
fn net_items(line: &Line<'_>, rest: &str, agents: &[String]) -> Result<Vec<(usize, usize)>, ParseError> {
    let mut out = Vec::new();
    for item in rest.split_whitespace() {
        let (a, b, both, flip) = if let Some((a, b)) = item.split_once("<>") {
            (a, b, true, false)
        } else if let Some((a, b)) = item.split_once('>') {
            (a, b, false, false)
        } else if let Some((a, b)) = item.split_once('<') {
            (a, b, false, true)
        } else {
            return Err(line.err(format!("expected `a>b` or `a<>b`, found `{item}`")));
        };
        let (a, b) = (index_of(agents, a, "agent", line)?, index_of(agents, b, "agent", line)?);
        if flip {
            out.push((b, a));
        } else {
            out.push((a, b));
        }
        if both {
            out.push((b, a));
        }
    }
    Ok(out)
}

/// The worlds a `world` header applies to: one name or `*`.
fn world_targets(line: &Line<'_>, rest: &str, worlds: &[String]) -> Result<Vec<WorldId>, ParseError> {
    if rest == "*" {
        Ok((0..worlds.len()).collect())
    } else {
        Ok(vec![index_of(worlds, rest, "world", line)?])
    }
}

fn need<'a, T>(value: &'a Option<T>, line: &Line<'_>, what: &str) -> Result<&'a T, ParseError> {
    value.as_ref().ok_or_else(|| line.err(format!("`{what}` must come first")))
}

pub fn parse_model(text: &str) -> Result<ModelFile, ParseError> {
    let mut constants = Vec::new();
    let mut predicates = Vec::new();
    let mut agents: Option<Vec<String>> = None;
    let mut worlds: Option<Vec<String>> = None;
    let mut actual_name: Option<(String, usize)> = None;
    let mut partitions: Vec<Option<Partition>> = Vec::new();
    let mut interp: Vec<WorldInterp> = Vec::new();
    let mut sig: Option<Signature> = None;
    let mut current: Vec<WorldId> = Vec::new();
    let mut warnings = Vec::new();

    for line in lines(text) {
        let (key, rest) = line.split();
        match key {
            "constants" | "predicates" | "agents" | "worlds" => {
                if !interp.is_empty() {
                    return Err(line.err(format!("`{key}` after the first world block")));
                }
                let slot = match key {
                    "constants" => &mut constants,
                    "predicates" => &mut predicates,
                    "agents" => agents.get_or_insert_with(Vec::new),
                    _ => worlds.get_or_insert_with(Vec::new),
                };
                *slot = words(rest);
            }
            "actual" => actual_name = Some((rest.to_string(), line.no)),
            "partition" | "edges" => {
                let agents = need(&agents, &line, "agents")?;
                let worlds = need(&worlds, &line, "worlds")?;
                partitions.resize(agents.len(), None);
                if key == "partition" {
                    partition_line(&line, rest, agents, worlds, &mut partitions)?;
                } else {
                    edges_line(&line, rest, agents, worlds, &mut partitions, &mut warnings)?;
                }
            }
            "world" => {
                let worlds = need(&worlds, &line, "worlds")?;
                need(&agents, &line, "agents")?;
                if sig.is_none() {
                    let s = Signature::new(constants.clone(), predicates.clone())
                        .map_err(|e| line.err(e.to_string()))?;
                    interp = vec![WorldInterp::empty(&s); worlds.len()];
                    sig = Some(s);
                }
                current = world_targets(&line, rest, worlds)?;
            }
            "const" | "pred" | "net" => {
                if current.is_empty() {
                    return Err(line.err(format!("`{key}` outside a world block")));
                }
                let agents = agents.as_ref().expect("checked at the world header");
                let s = sig.as_ref().expect("set at the world header");
                match key {
                    "const" => {
                        for item in rest.split_whitespace() {
                            let (c, a) = item
                                .split_once('=')
                                .ok_or_else(|| line.err(format!("expected `c_=agent`, found `{item}`")))?;
                            let ci = s
                                .constant_index(c)
                                .ok_or_else(|| line.err(format!("undeclared constant `{c}`")))?;
                            let ai = index_of(agents, a, "agent", &line)?;
                            for &w in &current {
                                interp[w].constants[ci] = Some(ai);
                            }
                        }
                    }
                    "pred" => {
                        let (p, members) = colon(&line, rest)?;
                        let pi = s
                            .predicate_index(p)
                            .ok_or_else(|| line.err(format!("undeclared predicate `{p}`")))?;
                        for a in members.split_whitespace() {
                            let ai = index_of(agents, a, "agent", &line)?;
                            for &w in &current {
                                interp[w].predicates[pi].insert(ai);
                            }
                        }
                    }
                    _ => {
                        for pair in net_items(&line, rest, agents)? {
                            for &w in &current {
                                interp[w].network.insert(pair);
                            }
                        }
                    }
                }
            }
            _ => return Err(line.err(format!("unknown directive `{key}`"))),
        }
    }

    let end = ParseError::new(text.lines().count().max(1), 1, "");
    let agents = agents.ok_or_else(|| ParseError { message: "no `agents` line".into(), ..end.clone() })?;
    let worlds = worlds.ok_or_else(|| ParseError { message: "no `worlds` line".into(), ..end.clone() })?;
    let sig = match sig {
        Some(s) => s,
        None => {
            let s = Signature::new(constants, predicates)
                .map_err(|e| ParseError { message: e.to_string(), ..end.clone() })?;
            interp = vec![WorldInterp::empty(&s); worlds.len()];
            s
        }
    };
    partitions.resize(agents.len(), None);
    let mut epistemic = Vec::with_capacity(agents.len());
    for (a, p) in partitions.into_iter().enumerate() {
        epistemic.push(p.ok_or_else(|| ParseError {
            message: format!("no partition for agent `{}`", agents[a]),
            ..end.clone()
        })?);
    }
    let actual = match actual_name {
        Some((name, no)) => Some(
            worlds
                .iter()
                .position(|w| *w == name)
                .ok_or_else(|| ParseError::new(no, 1, format!("unknown world `{name}`")))?,
        ),
        None => None,
    };
    let mut model = Model::blank(sig, agents, worlds);
    model.epistemic = epistemic;
    model.interp = interp;
    if let Some(d) = model.validate().first() {
        return Err(ParseError { message: d.to_string(), ..end });
    }
    Ok(ModelFile {
        model,
        actual,
        warnings,
    })
}

fn write_partition(out: &mut String, p: &Partition, worlds: &[String]) {
    let cells: Vec<String> = p
        .cells()
        .iter()
        .map(|c| c.iter().map(|&w| worlds[w].as_str()).collect::<Vec<_>>().join(" "))
        .collect();
    out.push_str(&cells.join(" | "));
}

pub fn write_model(m: &Model, actual: Option<WorldId>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "constants {}", m.signature.constants().join(" "));
    let _ = writeln!(out, "predicates {}", m.signature.predicates().join(" "));
    let _ = writeln!(out, "agents {}", m.agents.join(" "));
    let _ = writeln!(out, "worlds {}", m.worlds.join(" "));
    if let Some(w) = actual {
        let _ = writeln!(out, "actual {}", m.worlds[w]);
    }
    for (a, p) in m.epistemic.iter().enumerate() {
        let _ = write!(out, "partition {}: ", m.agents[a]);
        write_partition(&mut out, p, &m.worlds);
        out.push('\n');
    }
    for (w, i) in m.interp.iter().enumerate() {
        let _ = writeln!(out, "world {}", m.worlds[w]);
        let consts: Vec<String> = m
            .signature
            .constants()
            .iter()
            .zip(&i.constants)
            .filter_map(|(c, a)| a.map(|a| format!("{c}={}", m.agents[a])))
            .collect();
        if !consts.is_empty() {
            let _ = writeln!(out, "  const {}", consts.join(" "));
        }
        for (p, members) in m.signature.predicates().iter().zip(&i.predicates) {
            let names: Vec<&str> = members.iter().map(|&a| m.agents[a].as_str()).collect();
            let _ = writeln!(out, "  pred {p}: {}", names.join(" "));
        }
        if !i.network.is_empty() {
            let pairs: Vec<String> = i
                .network
                .iter()
                .map(|&(a, b)| format!("{}>{}", m.agents[a], m.agents[b]))
                .collect();
            let _ = writeln!(out, "  net {}", pairs.join(" "));
        }
    }
    out
}

/// Reads an action model whose conditions are formulas over `sig`. Distinct
/// event pairs without an `edge` line get the `edge-default` condition,
/// `!(xstar = xstar)` unless given.
pub fn parse_action(text: &str, sig: &Signature) -> Result<ActionModel, ParseError> {
    let all = lines(text);
    let mut name = None;
    let mut action: Option<ActionModel> = None;
    for line in &all {
        let (key, rest) = line.split();
        let event = |action: &ActionModel, e: &str| {
            action
                .event_index(e)
                .ok_or_else(|| line.err(format!("unknown event `{e}`")))
        };
        match key {
            "action" => name = Some(rest.to_string()),
            "events" => {
                let n = name.clone().ok_or_else(|| line.err("`action` must come first"))?;
                action = Some(ActionModel::new(n, words(rest)).map_err(|e| line.err(e.to_string()))?);
            }
            "pre" | "post" | "edge" | "edge-default:" | "edge-default" => {
                let d = action.as_mut().ok_or_else(|| line.err("`events` must come first"))?;
                if key.starts_with("edge-default") {
                    let phi = rest.trim_start_matches(':').trim();
                    let q = formula_on(line, phi, sig)?;
                    d.set_edge_default(q);
                    continue;
                }
                let (head, tail) = colon(line, rest)?;
                match key {
                    "pre" => {
                        let e = event(d, head)?;
                        let phi = formula_on(line, tail, sig)?;
                        d.set_pre(e, phi);
                    }
                    "post" => {
                        let e = event(d, head)?;
                        let (atom, value) = tail
                            .split_once(":=")
                            .ok_or_else(|| line.err("expected `atom := formula`"))?;
                        let atom_f = formula_on(line, atom.trim(), sig)?;
                        let atom = GroundAtom::from_formula(&atom_f)
                            .ok_or_else(|| line.err(format!("`{atom_f}` is not a ground atom")))?;
                        let value = value.trim();
                        let phi = formula_on(line, value, sig)?;
                        d.set_post(e, atom, phi);
                    }
                    _ => {
                        let ends: Vec<&str> = head.split_whitespace().collect();
                        if ends.len() != 2 {
                            return Err(line.err("expected `edge e f: formula`"));
                        }
                        let (e, f) = (event(d, ends[0])?, event(d, ends[1])?);
                        let q = formula_on(line, tail, sig)?;
                        d.set_edge(e, f, q);
                    }
                }
            }
            _ => return Err(line.err(format!("unknown directive `{key}`"))),
        }
    }
    let d = action.ok_or_else(|| ParseError::new(text.lines().count().max(1), 1, "no `events` line"))?;
    d.validate(sig)
        .map_err(|e| ParseError::new(text.lines().count().max(1), 1, e.to_string()))?;
    Ok(d)
}

pub fn write_action(d: &ActionModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "action {}", d.name());
    let _ = writeln!(out, "events {}", d.events().join(" "));
    for (e, name) in d.events().iter().enumerate() {
        let _ = writeln!(out, "pre {name}: {}", d.pre(e));
        for (atom, phi) in d.post(e) {
            let _ = writeln!(out, "post {name}: {atom} := {phi}");
        }
    }
    for (e, f, q) in d.explicit_edges() {
        let _ = writeln!(out, "edge {} {}: {q}", d.events()[e], d.events()[f]);
    }
    if let Some(q) = d.edge_default() {
        let _ = writeln!(out, "edge-default: {q}");
    }
    out
}

/// Reads a KDL model:
///
/// ```text
/// agents a b
/// worlds w v
/// feature f 0 1
/// nominals i=a
/// partition a: w v
/// partition b: discrete
/// world *
///   net a<>b
/// world w
///   values a: f=1
/// ```
///
/// Values not given default to the first value of their feature.
pub fn parse_kdl_model(text: &str) -> Result<KdlModel, ParseError> {
    let mut agents: Option<Vec<String>> = None;
    let mut worlds: Option<Vec<String>> = None;
    let mut features = Vec::new();
    let mut nominal_lines = Vec::new();
    let mut partitions: Vec<Option<Partition>> = Vec::new();
    let mut networks: Vec<BTreeSet<(usize, usize)>> = Vec::new();
    let mut assignments = Vec::new();
    let mut current: Vec<WorldId> = Vec::new();
    let mut warnings = Vec::new();
    let all = lines(text);
    for line in &all {
        let (key, rest) = line.split();
        match key {
            "agents" => agents = Some(words(rest)),
            "worlds" => worlds = Some(words(rest)),
            "feature" => {
                let mut w = words(rest);
                if w.len() < 2 {
                    return Err(line.err("expected `feature name value...`"));
                }
                let name = w.remove(0);
                features.push(Feature { name, values: w });
            }
            "nominals" => nominal_lines.push(line),
            "partition" | "edges" => {
                let agents = need(&agents, line, "agents")?;
                let worlds = need(&worlds, line, "worlds")?;
                partitions.resize(agents.len(), None);
                if key == "partition" {
                    partition_line(line, rest, agents, worlds, &mut partitions)?;
                } else {
                    edges_line(line, rest, agents, worlds, &mut partitions, &mut warnings)?;
                }
            }
            "world" => {
                let worlds = need(&worlds, line, "worlds")?;
                need(&agents, line, "agents")?;
                networks.resize(worlds.len(), BTreeSet::new());
                current = world_targets(line, rest, worlds)?;
            }
            "net" | "values" => {
                if current.is_empty() {
                    return Err(line.err(format!("`{key}` outside a world block")));
                }
                let agents = agents.as_ref().expect("checked at the world header");
                if key == "net" {
                    for pair in net_items(line, rest, agents)? {
                        for &w in &current {
                            networks[w].insert(pair);
                        }
                    }
                } else {
                    let (who, items) = colon(line, rest)?;
                    let a = index_of(agents, who, "agent", line)?;
                    assignments.push((line, current.clone(), a, items));
                }
            }
            _ => return Err(line.err(format!("unknown directive `{key}`"))),
        }
    }
    let end = ParseError::new(text.lines().count().max(1), 1, "");
    let agents = agents.ok_or_else(|| ParseError { message: "no `agents` line".into(), ..end.clone() })?;
    let worlds = worlds.ok_or_else(|| ParseError { message: "no `worlds` line".into(), ..end.clone() })?;
    let space = FeatureSpace::new(features).map_err(|e| ParseError { message: e.to_string(), ..end.clone() })?;
    let mut values = vec![vec![vec![0; space.features().len()]; agents.len()]; worlds.len()];
    for (line, targets, a, items) in assignments {
        for item in items.split_whitespace() {
            let (f, z) = item
                .split_once('=')
                .ok_or_else(|| line.err(format!("expected `feature=value`, found `{item}`")))?;
            let (fi, zi) = space.lookup(f, z).map_err(|e| line.err(e.to_string()))?;
            for &w in &targets {
                values[w][a][fi] = zi;
            }
        }
    }
    let mut nominals = BTreeMap::new();
    for line in nominal_lines {
        for item in line.split().1.split_whitespace() {
            let (i, a) = item
                .split_once('=')
                .ok_or_else(|| line.err(format!("expected `nominal=agent`, found `{item}`")))?;
            nominals.insert(i.to_string(), index_of(&agents, a, "agent", line)?);
        }
    }
    partitions.resize(agents.len(), None);
    let mut epistemic = Vec::new();
    for (a, p) in partitions.into_iter().enumerate() {
        epistemic.push(p.ok_or_else(|| ParseError {
            message: format!("no partition for agent `{}`", agents[a]),
            ..end.clone()
        })?);
    }
    networks.resize(worlds.len(), BTreeSet::new());
    let m = KdlModel {
        frame: NetworkFrame {
            agents,
            worlds,
            networks,
            epistemic,
        },
        nominals,
        features: space,
        values,
    };
    m.validate().map_err(|e| ParseError { message: e.to_string(), ..end })?;
    Ok(m)
}

pub fn write_kdl_model(m: &KdlModel) -> String {
    let f = &m.frame;
    let mut out = String::new();
    let _ = writeln!(out, "agents {}", f.agents.join(" "));
    let _ = writeln!(out, "worlds {}", f.worlds.join(" "));
    for feat in m.features.features() {
        let _ = writeln!(out, "feature {} {}", feat.name, feat.values.join(" "));
    }
    if !m.nominals.is_empty() {
        let items: Vec<String> = m.nominals.iter().map(|(i, &a)| format!("{i}={}", f.agents[a])).collect();
        let _ = writeln!(out, "nominals {}", items.join(" "));
    }
    for (a, p) in f.epistemic.iter().enumerate() {
        let _ = write!(out, "partition {}: ", f.agents[a]);
        write_partition(&mut out, p, &f.worlds);
        out.push('\n');
    }
    for w in 0..f.world_count() {
        let _ = writeln!(out, "world {}", f.worlds[w]);
        if !f.networks[w].is_empty() {
            let pairs: Vec<String> = f.networks[w]
                .iter()
                .map(|&(a, b)| format!("{}>{}", f.agents[a], f.agents[b]))
                .collect();
            let _ = writeln!(out, "  net {}", pairs.join(" "));
        }
        for a in 0..f.agent_count() {
            let items: Vec<String> = m
                .features
                .features()
                .iter()
                .enumerate()
                .map(|(fi, feat)| format!("{}={}", feat.name, feat.values[m.value(w, a, fi)]))
                .collect();
            let _ = writeln!(out, "  values {}: {}", f.agents[a], items.join(" "));
        }
    }
    out
}

/// Reads named updates for `m`:
///
/// ```text
/// transformation d
///   when N f=1 => f=1
///   when !N f=1 =>
/// learning l
///   formula f=1
/// ```
///
/// A `when` line with nothing after `=>` sets no feature. Formulas may
/// mention updates declared earlier in the file.
pub fn parse_updates(text: &str, m: &KdlModel) -> Result<KdlUpdates, ParseError> {
    let nominals: BTreeSet<String> = m.nominals.keys().cloned().collect();
    let mut updates = KdlUpdates::new();
    let mut declared = BTreeSet::new();
    let mut pending: Option<(String, KdlUpdate, usize)> = None;
    let flush = |pending: &mut Option<(String, KdlUpdate, usize)>,
                 updates: &mut KdlUpdates,
                 declared: &mut BTreeSet<String>|
     -> Result<(), ParseError> {
        if let Some((name, u, no)) = pending.take() {
            if let KdlUpdate::Transformation(d) = &u {
                if d.phi.is_empty() {
                    return Err(ParseError::new(no, 1, format!("transformation `{name}` has no `when` line")));
                }
            }
            updates
                .insert(name.clone(), u)
                .map_err(|e| ParseError::new(no, 1, e.to_string()))?;
            declared.insert(name);
        }
        Ok(())
    };
    for line in lines(text) {
        let (key, rest) = line.split();
        let kdl_on = |part: &str, declared: &BTreeSet<String>| {
            parse_kdl(part, &nominals, Some(declared)).map_err(|e| e.shifted(line.no, line.col_of(part)))
        };
        match key {
            "transformation" | "learning" => {
                flush(&mut pending, &mut updates, &mut declared)?;
                if rest.is_empty() || rest.contains(char::is_whitespace) {
                    return Err(line.err(format!("expected `{key} name`")));
                }
                let u = if key == "learning" {
                    KdlUpdate::Learning(LearningUpdate::default())
                } else {
                    KdlUpdate::Transformation(DynamicTransformation {
                        phi: Vec::new(),
                        post: Vec::new(),
                    })
                };
                pending = Some((rest.to_string(), u, line.no));
            }
            "when" => match &mut pending {
                Some((_, KdlUpdate::Transformation(d), _)) => {
                    let (cond, sets) = rest
                        .split_once("=>")
                        .ok_or_else(|| line.err("expected `when formula => f=z, ...`"))?;
                    let phi = kdl_on(cond.trim(), &declared)?;
                    let mut post = BTreeMap::new();
                    for item in sets.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                        let (f, z) = item
                            .split_once('=')
                            .ok_or_else(|| line.err(format!("expected `feature=value`, found `{item}`")))?;
                        let (f, z) = (f.trim(), z.trim());
                        m.features.lookup(f, z).map_err(|e| line.err(e.to_string()))?;
                        post.insert(f.to_string(), z.to_string());
                    }
                    d.phi.push(phi);
                    d.post.push(post);
                }
                _ => return Err(line.err("`when` outside a transformation")),
            },
            "formula" => match &mut pending {
                Some((_, KdlUpdate::Learning(l), _)) => {
                    let phi = kdl_on(rest, &declared)?;
                    l.formulas.push(phi);
                }
                _ => return Err(line.err("`formula` outside a learning update")),
            },
            _ => return Err(line.err(format!("unknown directive `{key}`"))),
        }
    }
    flush(&mut pending, &mut updates, &mut declared)?;
    Ok(updates)
}

pub fn write_updates(updates: &KdlUpdates) -> String {
    let mut out = String::new();
    for name in updates.names() {
        match updates.get(name).expect("listed") {
            KdlUpdate::Transformation(d) => {
                let _ = writeln!(out, "transformation {name}");
                for (phi, post) in d.phi.iter().zip(&d.post) {
                    let sets: Vec<String> = post.iter().map(|(f, z)| format!("{f}={z}")).collect();
                    let _ = writeln!(out, "  when {phi} => {}", sets.join(", "));
                }
            }
            KdlUpdate::Learning(l) => {
                let _ = writeln!(out, "learning {name}");
                for phi in &l.formulas {
                    let _ = writeln!(out, "  formula {phi}");
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
constants a_ b_
predicates M
agents a b
worlds w v
actual v
partition a: w v
partition b: w | v
world *
  const a_=a b_=b
world v
  pred M: b
  net a>b b<>a
";

    #[test]
    fn model_round_trip() {
        let file = parse_model(SMALL).unwrap();
        assert_eq!(file.actual, Some(1));
        let m = &file.model;
        assert!(m.holds_pred("M", 1, 1));
        assert!(m.holds_net(1, 0, 1));
        assert!(!m.related(1, 0, 1));
        let again = parse_model(&write_model(m, file.actual)).unwrap();
        assert_eq!(again.model, file.model);
        assert_eq!(again.actual, file.actual);
    }

    #[test]
    fn model_errors_point_at_the_line() {
        let bad = SMALL.replace("pred M: b", "pred Q: b");
        let err = parse_model(&bad).unwrap_err();
        assert_eq!(err.line, 11);
        assert!(err.message.contains("undeclared predicate"), "{err}");
        let missing = SMALL.replace("partition b: w | v\n", "");
        assert!(parse_model(&missing).unwrap_err().message.contains("no partition"));
    }

    #[test]
    fn edges_are_closed_with_a_warning() {
        let text = SMALL.replace("partition b: w | v", "edges b: w-v");
        let file = parse_model(&text).unwrap();
        assert!(file.model.related(1, 0, 1));
        assert_eq!(file.warnings.len(), 1);
    }

    #[test]
    fn action_round_trip_and_positions() {
        let sig = parse_model(SMALL).unwrap().model.signature;
        let text = "\
action Log
events 1 2
pre 1: !exists x. M(x)
pre 2: M(b_)
post 2: N(a_,b_) := false
edge 1 2: exists x. N(x,xstar)
edge-default: exists x. N(x, xstar)
";
        let d = parse_action(text, &sig).unwrap();
        assert_eq!(d.event_count(), 2);
        assert_eq!(d.post(1).len(), 1);
        assert_eq!(parse_action(&write_action(&d), &sig).unwrap(), d);
        let err = parse_action(&text.replace("M(b_)", "M(z_)"), &sig).unwrap_err();
        assert_eq!((err.line, err.col), (4, 10));
    }

    const KDL: &str = "\
agents a b
worlds w v
feature f 0 1
nominals i=a
partition a: w v
partition b: discrete
world *
  net a<>b
world w
  values a: f=1
";

    #[test]
    fn kdl_round_trip() {
        let m = parse_kdl_model(KDL).unwrap();
        assert_eq!(m.value(0, 0, 0), 1);
        assert_eq!(m.value(1, 0, 0), 0);
        assert_eq!(parse_kdl_model(&write_kdl_model(&m)).unwrap(), m);
        let text = "\
transformation d
  when N f=1 => f=1
  when !N f=1 =>
learning l
  formula [d] @i f=1
";
        let u = parse_updates(text, &m).unwrap();
        assert_eq!(u.names(), ["d", "l"]);
        let again = parse_updates(&write_updates(&u), &m).unwrap();
        assert_eq!(again.names(), u.names());
        for n in u.names() {
            assert_eq!(again.get(n).unwrap(), u.get(n).unwrap());
        }
        let err = parse_updates("learning l\n  formula [l] f=1\n", &m).unwrap_err();
        assert_eq!((err.line, err.col), (2, 12));
    }
}
