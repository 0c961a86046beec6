//! Signatures, terms and formulas of the dynamic term-modal language.
//!
//! The primitive connectives are atoms, `¬`, `∧`, `K_t`, `∀x` and the action
//! modality `[Δ,e]`. Everything else (`∨`, `→`, `↔`, `∃`, `K̂_t`, `⊥`) is built
//! from those by the constructors on [`Formula`]; the printer recognises the
//! abbreviation shapes again so output stays readable.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::Error;

/// Name of the reserved edge-condition variable `x*`.
pub const XSTAR: &str = "xstar";

/// Words that cannot be used as predicate, constant or variable names.
pub const RESERVED: &[&str] = &["N", "K", "true", "false", "forall", "exists"];

/// A first-order signature: constants and unary predicates. The network
/// symbol `N` and equality are always present; variables are every other
/// identifier.
#[derive(Debug, Clone, Default)]
pub struct Signature {
    constants: Vec<String>,
    predicates: Vec<String>,
    const_index: HashMap<String, usize>,
    pred_index: HashMap<String, usize>,
}

impl PartialEq for Signature {
    fn eq(&self, other: &Self) -> bool {
        self.constants == other.constants && self.predicates == other.predicates
    }
}

impl Eq for Signature {}

impl Signature {
    pub fn new<C, P>(constants: C, predicates: P) -> Result<Self, Error>
    where
        C: IntoIterator,
        C::Item: Into<String>,
        P: IntoIterator,
        P::Item: Into<String>,
    {
        let mut sig = Signature::default();
        for c in constants {
            let c = c.into();
            sig.check_fresh(&c)?;
            sig.const_index.insert(c.clone(), sig.constants.len());
            sig.constants.push(c);
        }
        for p in predicates {
            let p = p.into();
            sig.check_fresh(&p)?;
            sig.pred_index.insert(p.clone(), sig.predicates.len());
            sig.predicates.push(p);
        }
        Ok(sig)
    }

    fn check_fresh(&self, name: &str) -> Result<(), Error> {
        if name.is_empty() || RESERVED.contains(&name) || name == XSTAR {
            return Err(Error::Signature(format!("`{name}` is reserved")));
        }
        if self.const_index.contains_key(name) || self.pred_index.contains_key(name) {
            return Err(Error::Signature(format!("`{name}` declared twice")));
        }
        Ok(())
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn predicates(&self) -> &[String] {
        &self.predicates
    }

    pub fn constant_index(&self, name: &str) -> Option<usize> {
        self.const_index.get(name).copied()
    }

    pub fn predicate_index(&self, name: &str) -> Option<usize> {
        self.pred_index.get(name).copied()
    }

    pub fn is_constant(&self, name: &str) -> bool {
        self.const_index.contains_key(name)
    }

    pub fn is_predicate(&self, name: &str) -> bool {
        self.pred_index.contains_key(name)
    }

    /// Checks that `phi` only uses declared constants and predicates, that
    /// no quantifier binds a constant name or `x*`, and that variables do not
    /// clash with predicate names.
    pub fn check_formula(&self, phi: &Formula) -> Result<(), Error> {
        let mut problem = None;
        phi.visit(&mut |f| {
            if problem.is_some() {
                return;
            }
            let check_term = |t: &Term| match t {
                Term::Const(c) if !self.is_constant(c) => {
                    Some(format!("undeclared constant `{c}`"))
                }
                Term::Var(v) if self.is_constant(v) || self.is_predicate(v) => {
                    Some(format!("`{v}` used as a variable but declared in the signature"))
                }
                _ => None,
            };
            problem = match f {
                Formula::Pred(p, t) => {
                    if self.is_predicate(p) {
                        check_term(t)
                    } else {
                        Some(format!("undeclared predicate `{p}`"))
                    }
                }
                Formula::Net(a, b) | Formula::Eq(a, b) => check_term(a).or_else(|| check_term(b)),
                Formula::Know(t, _) => check_term(t),
                Formula::Forall(x, _) if x == XSTAR => {
                    Some(format!("the edge variable `{XSTAR}` cannot be quantified"))
                }
                Formula::Forall(x, _) if self.is_constant(x) || self.is_predicate(x) => {
                    Some(format!("`{x}` is declared in the signature and cannot be bound"))
                }
                _ => None,
            };
        });
        match problem {
            Some(msg) => Err(Error::Signature(msg)),
            None => Ok(()),
        }
    }

    /// All ground atoms `P(c)`, `N(c,d)` and `c ≐ d` over the signature.
    pub fn ground_atoms(&self) -> Vec<GroundAtom> {
        let mut out = Vec::with_capacity(
            self.predicates.len() * self.constants.len() + 2 * self.constants.len().pow(2),
        );
        for p in &self.predicates {
            for c in &self.constants {
                out.push(GroundAtom::Pred(p.clone(), c.clone()));
            }
        }
        for c in &self.constants {
            for d in &self.constants {
                out.push(GroundAtom::Net(c.clone(), d.clone()));
            }
        }
        for c in &self.constants {
            for d in &self.constants {
                out.push(GroundAtom::Eq(c.clone(), d.clone()));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn cst(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }

    pub fn xstar() -> Self {
        Term::Var(XSTAR.to_string())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }

    fn substitute(&self, x: &str, t: &Term) -> Term {
        match self {
            Term::Var(v) if v == x => t.clone(),
            _ => self.clone(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) | Term::Const(v) => f.write_str(v),
        }
    }
}

/// A variable-free atom; the keys of postcondition maps.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroundAtom {
    Pred(String, String),
    Net(String, String),
    Eq(String, String),
}

impl GroundAtom {
    /// Converts an atomic formula whose terms are all constants.
    pub fn from_formula(phi: &Formula) -> Option<Self> {
        match phi {
            Formula::Pred(p, Term::Const(c)) => Some(GroundAtom::Pred(p.clone(), c.clone())),
            Formula::Net(Term::Const(a), Term::Const(b)) => {
                Some(GroundAtom::Net(a.clone(), b.clone()))
            }
            Formula::Eq(Term::Const(a), Term::Const(b)) => {
                Some(GroundAtom::Eq(a.clone(), b.clone()))
            }
            _ => None,
        }
    }

    pub fn to_formula(&self) -> Formula {
        match self {
            GroundAtom::Pred(p, c) => Formula::Pred(p.clone(), Term::cst(c)),
            GroundAtom::Net(a, b) => Formula::Net(Term::cst(a), Term::cst(b)),
            GroundAtom::Eq(a, b) => Formula::Eq(Term::cst(a), Term::cst(b)),
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

/// Formulas of the term-modal language extended with action modalities.
///
/// `Top` is kept primitive: the signature may have no constants, so a closed
/// tautology cannot always be written with the other constructors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Top,
    Pred(String, Term),
    Net(Term, Term),
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Know(Term, Box<Formula>),
    Forall(String, Box<Formula>),
    /// `[Δ, e] φ`; the action model is looked up by name at evaluation time.
    Action {
        action: String,
        event: String,
        body: Box<Formula>,
    },
}

impl Formula {
    pub fn top() -> Self {
        Formula::Top
    }

    pub fn bottom() -> Self {
        Formula::not(Formula::Top)
    }

    pub fn pred(p: impl Into<String>, t: Term) -> Self {
        Formula::Pred(p.into(), t)
    }

    pub fn net(a: Term, b: Term) -> Self {
        Formula::Net(a, b)
    }

    pub fn eq(a: Term, b: Term) -> Self {
        Formula::Eq(a, b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(phi: Formula) -> Self {
        Formula::Not(Box::new(phi))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::and(a, Formula::not(b)))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
    }

    pub fn know(t: Term, phi: Formula) -> Self {
        Formula::Know(t, Box::new(phi))
    }

    /// `K̂_t φ = ¬K_t¬φ`.
    pub fn possible(t: Term, phi: Formula) -> Self {
        Formula::not(Formula::know(t, Formula::not(phi)))
    }

    pub fn forall(x: impl Into<String>, phi: Formula) -> Self {
        Formula::Forall(x.into(), Box::new(phi))
    }

    pub fn exists(x: impl Into<String>, phi: Formula) -> Self {
        Formula::not(Formula::forall(x, Formula::not(phi)))
    }

    pub fn action(action: impl Into<String>, event: impl Into<String>, body: Formula) -> Self {
        Formula::Action {
            action: action.into(),
            event: event.into(),
            body: Box::new(body),
        }
    }

    /// Left-nested conjunction; the empty conjunction is `⊤`.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Self {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::Top)
    }

    /// Left-nested disjunction; the empty disjunction is `⊥`.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Self {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or_else(Formula::bottom)
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Pred(..) | Formula::Net(..) | Formula::Eq(..))
    }

    /// Pre-order traversal over every subformula, including `self`.
    pub fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Top | Formula::Pred(..) | Formula::Net(..) | Formula::Eq(..) => {}
            Formula::Not(a) | Formula::Know(_, a) | Formula::Forall(_, a) => a.visit(f),
            Formula::And(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Formula::Action { body, .. } => body.visit(f),
        }
    }

    /// Names of the action models referenced by `[Δ,e]` subformulas.
    pub fn action_refs(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Action { action, .. } = f {
                out.insert(action.clone());
            }
        });
        out
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            let mut add = |t: &Term| {
                if let Term::Var(v) = t {
                    out.insert(v.clone());
                }
            };
            match f {
                Formula::Pred(_, t) | Formula::Know(t, _) => add(t),
                Formula::Net(a, b) | Formula::Eq(a, b) => {
                    add(a);
                    add(b);
                }
                Formula::Forall(x, _) => {
                    out.insert(x.clone());
                }
                _ => {}
            }
        });
        out
    }

    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
        let mut term = |t: &Term, bound: &Vec<&str>| {
            if let Term::Var(v) = t {
                if !bound.contains(&v.as_str()) {
                    out.insert(v.clone());
                }
            }
        };
        match self {
            Formula::Top => {}
            Formula::Pred(_, t) => term(t, bound),
            Formula::Net(a, b) | Formula::Eq(a, b) => {
                term(a, bound);
                term(b, bound);
            }
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Know(t, a) => {
                term(t, bound);
                a.collect_free(bound, out);
            }
            Formula::Forall(x, a) => {
                bound.push(x);
                a.collect_free(bound, out);
                bound.pop();
            }
            Formula::Action { body, .. } => body.collect_free(bound, out),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_variables().is_empty()
    }

    /// Replaces the free occurrences of `x` by `t`, renaming bound variables
    /// that would capture `t`.
    pub fn substitute(&self, x: &str, t: &Term) -> Formula {
        if !self.free_variables().contains(x) {
            return self.clone();
        }
        self.subst(x, t)
    }

    fn subst(&self, x: &str, t: &Term) -> Formula {
        match self {
            Formula::Top => Formula::Top,
            Formula::Pred(p, s) => Formula::Pred(p.clone(), s.substitute(x, t)),
            Formula::Net(a, b) => Formula::Net(a.substitute(x, t), b.substitute(x, t)),
            Formula::Eq(a, b) => Formula::Eq(a.substitute(x, t), b.substitute(x, t)),
            Formula::Not(a) => Formula::not(a.subst(x, t)),
            Formula::And(a, b) => Formula::and(a.subst(x, t), b.subst(x, t)),
            Formula::Know(s, a) => Formula::know(s.substitute(x, t), a.subst(x, t)),
            Formula::Forall(y, body) => {
                if y == x || !body.free_variables().contains(x) {
                    return self.clone();
                }
                if t.as_var() == Some(y.as_str()) {
                    let mut avoid = body.all_variables();
                    avoid.insert(x.to_string());
                    let fresh = fresh_variable(y, &avoid);
                    let renamed = body.subst(y, &Term::Var(fresh.clone()));
                    Formula::forall(fresh, renamed.subst(x, t))
                } else {
                    Formula::forall(y.clone(), body.subst(x, t))
                }
            }
            Formula::Action {
                action,
                event,
                body,
            } => Formula::action(action.clone(), event.clone(), body.subst(x, t)),
        }
    }

    /// Structural size (number of constructor nodes).
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }
}

/// Priming `base` until it avoids every name in `avoid`.
pub fn fresh_variable(base: &str, avoid: &BTreeSet<String>) -> String {
    let mut name = format!("{base}'");
    while avoid.contains(&name) || name == XSTAR {
        name.push('\'');
    }
    name
}

// Printer. Binding strength from loose to tight: scope forms (quantifiers,
// modalities) extend to the end of the enclosing parenthesis, then `<->`,
// `->` (right associative), `|`, `&`, `!`.
const P_IFF: u8 = 1;
const P_IMP: u8 = 2;
const P_OR: u8 = 3;
const P_AND: u8 = 4;
const P_NOT: u8 = 5;
const P_ATOM: u8 = 6;

enum Shape<'a> {
    Iff(&'a Formula, &'a Formula),
    Or(&'a Formula, &'a Formula),
    Implies(&'a Formula, &'a Formula),
    And(&'a Formula, &'a Formula),
    Not(&'a Formula),
    Exists(&'a str, &'a Formula),
    Possible(&'a Term, &'a Formula),
    Forall(&'a str, &'a Formula),
    Know(&'a Term, &'a Formula),
    Action(&'a str, &'a str, &'a Formula),
    False,
    Atom,
}

fn negated(phi: &Formula) -> Option<&Formula> {
    match phi {
        Formula::Not(a) => Some(a),
        _ => None,
    }
}

fn implication(phi: &Formula) -> Option<(&Formula, &Formula)> {
    match negated(phi)? {
        Formula::And(a, b) => Some((a, negated(b)?)),
        _ => None,
    }
}

fn shape(phi: &Formula) -> Shape<'_> {
    match phi {
        Formula::And(l, r) => {
            if let (Some((a, b)), Some((c, d))) = (implication(l), implication(r)) {
                if a == d && b == c {
                    return Shape::Iff(a, b);
                }
            }
            Shape::And(l, r)
        }
        Formula::Not(inner) => match &**inner {
            Formula::Top => Shape::False,
            Formula::And(a, b) => match (negated(a), negated(b)) {
                (Some(a), Some(b)) => Shape::Or(a, b),
                (None, Some(b)) => Shape::Implies(a, b),
                _ => Shape::Not(inner),
            },
            Formula::Forall(x, body) => match negated(body) {
                Some(b) => Shape::Exists(x, b),
                None => Shape::Not(inner),
            },
            // `!K[t] exists x. p` reads better than `<K[t]> forall x. !p`
            Formula::Know(t, body) => match negated(body) {
                Some(b) if matches!(shape(body), Shape::Not(_)) => Shape::Possible(t, b),
                _ => Shape::Not(inner),
            },
            _ => Shape::Not(inner),
        },
        Formula::Forall(x, body) => Shape::Forall(x, body),
        Formula::Know(t, body) => Shape::Know(t, body),
        Formula::Action {
            action,
            event,
            body,
        } => Shape::Action(action, event, body),
        _ => Shape::Atom,
    }
}

fn precedence(phi: &Formula) -> u8 {
    match shape(phi) {
        Shape::Iff(..) => P_IFF,
        Shape::Implies(..) => P_IMP,
        Shape::Or(..) => P_OR,
        Shape::And(..) => P_AND,
        Shape::Not(_) => P_NOT,
        Shape::False | Shape::Atom => P_ATOM,
        // scope forms are printed as prefixes; `open_tail` decides parens
        _ => P_NOT,
    }
}

/// True when the printed form ends in a scope that would swallow whatever
/// follows it.
fn open_tail(phi: &Formula) -> bool {
    match shape(phi) {
        Shape::Exists(..)
        | Shape::Possible(..)
        | Shape::Forall(..)
        | Shape::Know(..)
        | Shape::Action(..) => true,
        Shape::Not(a) => open_tail(a),
        _ => false,
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, phi: &Formula, min: u8) -> fmt::Result {
    if precedence(phi) < min || open_tail(phi) {
        write!(f, "({phi})")
    } else {
        write!(f, "{phi}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match shape(self) {
            Shape::Iff(a, b) => {
                write_operand(f, a, P_IFF + 1)?;
                f.write_str(" <-> ")?;
                write_operand(f, b, P_IFF + 1)
            }
            Shape::Implies(a, b) => {
                write_operand(f, a, P_IMP + 1)?;
                f.write_str(" -> ")?;
                write_operand(f, b, P_IMP)
            }
            Shape::Or(a, b) => {
                write_operand(f, a, P_OR)?;
                f.write_str(" | ")?;
                write_operand(f, b, P_OR + 1)
            }
            Shape::And(a, b) => {
                write_operand(f, a, P_AND)?;
                f.write_str(" & ")?;
                write_operand(f, b, P_AND + 1)
            }
            Shape::Not(a) => {
                if let Formula::Eq(s, t) = a {
                    return write!(f, "{s} != {t}");
                }
                f.write_str("!")?;
                if precedence(a) >= P_NOT {
                    write!(f, "{a}")
                } else {
                    write!(f, "({a})")
                }
            }
            Shape::Exists(x, b) => write!(f, "exists {x}. {b}"),
            Shape::Possible(t, b) => write!(f, "<K[{t}]> {b}"),
            Shape::Forall(x, b) => write!(f, "forall {x}. {b}"),
            Shape::Know(t, b) => write!(f, "K[{t}] {b}"),
            Shape::Action(a, e, b) => write!(f, "[{a}:{e}] {b}"),
            Shape::False => f.write_str("false"),
            Shape::Atom => match self {
                Formula::Top => f.write_str("true"),
                Formula::Pred(p, t) => write!(f, "{p}({t})"),
                Formula::Net(a, b) => write!(f, "N({a},{b})"),
                Formula::Eq(a, b) => write!(f, "{a} = {b}"),
                _ => unreachable!("non-atomic formula classified as atom"),
            },
        }
    }
}

/// A partial map from ground atoms to formulas; atoms not in the map keep
/// their value.
pub type Postconditions = BTreeMap<GroundAtom, Formula>;

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Term {
        Term::var("x")
    }
    fn y() -> Term {
        Term::var("y")
    }

    #[test]
    fn substitution_of_non_free_variable_is_identity() {
        let phi = Formula::pred("P", y());
        assert_eq!(phi.substitute("x", &Term::cst("c_")), phi);
    }

    #[test]
    fn substitution_reaches_modal_index() {
        let phi = Formula::know(x(), Formula::pred("P", x()));
        let a = Term::cst("a_");
        assert_eq!(
            phi.substitute("x", &a),
            Formula::know(a.clone(), Formula::pred("P", a))
        );
    }

    #[test]
    fn substitution_avoids_capture() {
        // ∀y N(x,y) with x := y becomes ∀y' N(y,y')
        let phi = Formula::forall("y", Formula::net(x(), y()));
        let out = phi.substitute("x", &y());
        assert_eq!(
            out,
            Formula::forall("y'", Formula::net(y(), Term::var("y'")))
        );
        assert_eq!(out.free_variables(), BTreeSet::from(["y".to_string()]));
    }

    #[test]
    fn substitution_stops_at_rebinding() {
        let phi = Formula::and(Formula::pred("P", x()), Formula::forall("x", Formula::pred("P", x())));
        let out = phi.substitute("x", &Term::cst("c_"));
        assert_eq!(
            out,
            Formula::and(
                Formula::pred("P", Term::cst("c_")),
                Formula::forall("x", Formula::pred("P", x()))
            )
        );
    }

    #[test]
    fn free_variables_examples() {
        let closed = Formula::exists(
            "x",
            Formula::know(Term::cst("a_"), Formula::net(Term::cst("a_"), x())),
        );
        assert!(closed.free_variables().is_empty());

        let edge = Formula::exists("x", Formula::net(x(), Term::xstar()));
        assert_eq!(edge.free_variables(), BTreeSet::from([XSTAR.to_string()]));

        let kn = Formula::implies(Formula::net(x(), y()), Formula::know(x(), Formula::net(x(), y())));
        assert_eq!(
            kn.free_variables(),
            BTreeSet::from(["x".to_string(), "y".to_string()])
        );
    }

    #[test]
    fn ground_atom_counts() {
        let sig = Signature::new(["a_"], ["M"]).unwrap();
        let atoms = sig.ground_atoms();
        assert_eq!(
            atoms,
            vec![
                GroundAtom::Pred("M".into(), "a_".into()),
                GroundAtom::Net("a_".into(), "a_".into()),
                GroundAtom::Eq("a_".into(), "a_".into()),
            ]
        );
        let sig = Signature::new(["a_", "b_", "c_"], ["M"]).unwrap();
        assert_eq!(sig.ground_atoms().len(), 3 + 9 + 9);
        let sig = Signature::new(Vec::<String>::new(), ["M"]).unwrap();
        assert!(sig.ground_atoms().is_empty());
    }

    #[test]
    fn signature_rejects_clashes() {
        assert!(Signature::new(["a_", "a_"], Vec::<String>::new()).is_err());
        assert!(Signature::new(["a_"], ["a_"]).is_err());
        assert!(Signature::new(["N"], Vec::<String>::new()).is_err());
        assert!(Signature::new([XSTAR], Vec::<String>::new()).is_err());
    }

    #[test]
    fn signature_rejects_bound_xstar() {
        let sig = Signature::new(["a_"], ["M"]).unwrap();
        let bad = Formula::forall(XSTAR, Formula::pred("M", Term::xstar()));
        assert!(sig.check_formula(&bad).is_err());
        let undeclared = Formula::pred("Q", Term::cst("a_"));
        assert!(sig.check_formula(&undeclared).is_err());
        let ok = Formula::exists("x", Formula::net(x(), Term::xstar()));
        assert!(sig.check_formula(&ok).is_ok());
    }

    #[test]
    fn printer_uses_abbreviations() {
        let phi = Formula::forall("y", Formula::implies(Formula::net(x(), y()), Formula::pred("p", y())));
        assert_eq!(phi.to_string(), "forall y. N(x,y) -> p(y)");
        let q = Formula::not(Formula::exists(
            "x",
            Formula::know(Term::cst("c_"), Formula::eq(x(), Term::cst("t_"))),
        ));
        assert_eq!(q.to_string(), "!exists x. K[c_] x = t_");
        let scoped = Formula::and(
            Formula::exists("y", Formula::pred("M", y())),
            Formula::pred("M", x()),
        );
        assert_eq!(scoped.to_string(), "(exists y. M(y)) & M(x)");
        assert_eq!(Formula::bottom().to_string(), "false");
        assert_eq!(Formula::conj([]).to_string(), "true");
    }
}
