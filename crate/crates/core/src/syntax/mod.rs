//! Abstract syntax for concepts, TBoxes, ABoxes, queries, and OMQs,
//! together with parsing, printing, signatures, dialect validation, and
//! role-hierarchy entailment.
//!
//! All values are immutable after construction and every operation here is
//! pure, so sharing across threads is safe.

mod parse;

pub use parse::{
    parse_abox, parse_concept, parse_omq, parse_query, parse_tbox, ParseError, ParseOptions,
};

use serde::Serialize;
use std::collections::BTreeSet;
use std::fmt;

/// A role expression: a role name, possibly inverted, or the universal role.
///
/// Double inversion is never represented and the universal role is its own
/// inverse, both enforced at construction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct RoleExpr {
    pub name: String,
    pub inverted: bool,
    pub universal: bool,
}

impl RoleExpr {
    pub fn named(name: impl Into<String>) -> Self {
        RoleExpr { name: name.into(), inverted: false, universal: false }
    }

    pub fn inv(name: impl Into<String>) -> Self {
        RoleExpr { name: name.into(), inverted: true, universal: false }
    }

    pub fn universal() -> Self {
        RoleExpr { name: "u".into(), inverted: false, universal: true }
    }

    /// The inverse role; `u⁻ ≡ u`.
    pub fn inverse(&self) -> Self {
        if self.universal {
            self.clone()
        } else {
            RoleExpr { name: self.name.clone(), inverted: !self.inverted, universal: false }
        }
    }
}

impl fmt::Display for RoleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.universal {
            write!(f, "u")
        } else if self.inverted {
            write!(f, "{}-", self.name)
        } else {
            write!(f, "{}", self.name)
        }
    }
}

/// A concept of `ALCI^u` (with ⊤ and ⊥ as primitives).
///
/// `C -> D` is sugar for `¬C ⊔ D` and is expanded at construction time.
/// The binary operands of ⊓ and ⊔ are kept in a canonical order (chains are
/// flattened, sorted by rendered text, and re-folded to the right), so that
/// structural equality is equality up to commutativity and associativity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Concept {
    Top,
    Bot,
    Name(String),
    Not(Box<Concept>),
    And(Box<Concept>, Box<Concept>),
    Or(Box<Concept>, Box<Concept>),
    Exists(RoleExpr, Box<Concept>),
    Forall(RoleExpr, Box<Concept>),
}

impl Concept {
    pub fn name(n: impl Into<String>) -> Self {
        Concept::Name(n.into())
    }

    pub fn not(c: Concept) -> Self {
        Concept::Not(Box::new(c))
    }

    pub fn exists(r: RoleExpr, c: Concept) -> Self {
        Concept::Exists(r, Box::new(c))
    }

    pub fn forall(r: RoleExpr, c: Concept) -> Self {
        Concept::Forall(r, Box::new(c))
    }

    /// Canonical conjunction: flattens, applies ⊤-absorption, sorts.
    pub fn and(a: Concept, b: Concept) -> Self {
        Self::and_many(vec![a, b])
    }

    /// Canonical disjunction: flattens and sorts.
    pub fn or(a: Concept, b: Concept) -> Self {
        Self::or_many(vec![a, b])
    }

    pub fn and_many(cs: Vec<Concept>) -> Self {
        let mut flat = Vec::new();
        for c in cs {
            c.flatten_and(&mut flat);
        }
        flat.retain(|c| *c != Concept::Top);
        if flat.is_empty() {
            return Concept::Top;
        }
        flat.sort_by(|a, b| a.render().cmp(&b.render()));
        fold_right(flat, |a, b| Concept::And(Box::new(a), Box::new(b)))
    }

    pub fn or_many(cs: Vec<Concept>) -> Self {
        let mut flat = Vec::new();
        for c in cs {
            c.flatten_or(&mut flat);
        }
        if flat.is_empty() {
            return Concept::Bot;
        }
        flat.sort_by(|a, b| a.render().cmp(&b.render()));
        fold_right(flat, |a, b| Concept::Or(Box::new(a), Box::new(b)))
    }

    /// `C -> D`, expanded to `¬C ⊔ D`; a ⊤ antecedent is absorbed.
    pub fn implies(c: Concept, d: Concept) -> Self {
        if c == Concept::Top {
            d
        } else {
            Concept::or(Concept::not(c), d)
        }
    }

    fn flatten_and(self, out: &mut Vec<Concept>) {
        match self {
            Concept::And(a, b) => {
                a.flatten_and(out);
                b.flatten_and(out);
            }
            other => out.push(other),
        }
    }

    fn flatten_or(self, out: &mut Vec<Concept>) {
        match self {
            Concept::Or(a, b) => {
                a.flatten_or(out);
                b.flatten_or(out);
            }
            other => out.push(other),
        }
    }

    /// Conjuncts of a (possibly nested) conjunction.
    pub fn conjuncts(&self) -> Vec<&Concept> {
        let mut out = Vec::new();
        fn walk<'a>(c: &'a Concept, out: &mut Vec<&'a Concept>) {
            match c {
                Concept::And(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                other => out.push(other),
            }
        }
        walk(self, &mut out);
        out
    }

    pub fn disjuncts_of(&self) -> Vec<&Concept> {
        let mut out = Vec::new();
        fn walk<'a>(c: &'a Concept, out: &mut Vec<&'a Concept>) {
            match c {
                Concept::Or(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                other => out.push(other),
            }
        }
        walk(self, &mut out);
        out
    }

    /// Deterministic canonical text; `parse(render(c))` equals `c` for
    /// canonically constructed concepts.
    pub fn render(&self) -> String {
        match self {
            Concept::Top => "top".into(),
            Concept::Bot => "bot".into(),
            Concept::Name(n) => n.clone(),
            Concept::Not(c) => format!("not {}", c.render()),
            Concept::And(..) => {
                let parts: Vec<String> = self.conjuncts().iter().map(|c| c.render()).collect();
                format!("({})", parts.join(" and "))
            }
            Concept::Or(..) => {
                let parts: Vec<String> = self.disjuncts_of().iter().map(|c| c.render()).collect();
                format!("({})", parts.join(" or "))
            }
            Concept::Exists(r, c) => format!("exists {}. {}", r, c.render()),
            Concept::Forall(r, c) => format!("forall {}. {}", r, c.render()),
        }
    }

    /// All subconcepts, including `self`, deduplicated, in deterministic order.
    pub fn subconcepts(&self) -> Vec<Concept> {
        let mut set = BTreeSet::new();
        fn walk(c: &Concept, set: &mut BTreeSet<Concept>) {
            set.insert(c.clone());
            match c {
                Concept::Not(d) => walk(d, set),
                Concept::And(a, b) | Concept::Or(a, b) => {
                    walk(a, set);
                    walk(b, set);
                }
                Concept::Exists(_, d) | Concept::Forall(_, d) => walk(d, set),
                _ => {}
            }
        }
        walk(self, &mut set);
        set.into_iter().collect()
    }

    /// Replaces every occurrence of `from` (as a whole subconcept) by `to`,
    /// re-canonicalizing on the way up.
    pub fn replace(&self, from: &Concept, to: &Concept) -> Concept {
        if self == from {
            return to.clone();
        }
        match self {
            Concept::Not(c) => Concept::not(c.replace(from, to)),
            Concept::And(..) => Concept::and_many(
                self.conjuncts().iter().map(|c| c.replace(from, to)).collect(),
            ),
            Concept::Or(..) => Concept::or_many(
                self.disjuncts_of().iter().map(|c| c.replace(from, to)).collect(),
            ),
            Concept::Exists(r, c) => Concept::exists(r.clone(), c.replace(from, to)),
            Concept::Forall(r, c) => Concept::forall(r.clone(), c.replace(from, to)),
            other => other.clone(),
        }
    }

    /// Size of the concept tree (number of constructors).
    pub fn size(&self) -> usize {
        match self {
            Concept::Top | Concept::Bot | Concept::Name(_) => 1,
            Concept::Not(c) => 1 + c.size(),
            Concept::And(a, b) | Concept::Or(a, b) => 1 + a.size() + b.size(),
            Concept::Exists(_, c) | Concept::Forall(_, c) => 1 + c.size(),
        }
    }

    pub fn uses_inverse(&self) -> bool {
        match self {
            Concept::Top | Concept::Bot | Concept::Name(_) => false,
            Concept::Not(c) => c.uses_inverse(),
            Concept::And(a, b) | Concept::Or(a, b) => a.uses_inverse() || b.uses_inverse(),
            Concept::Exists(r, c) | Concept::Forall(r, c) => {
                (r.inverted && !r.universal) || c.uses_inverse()
            }
        }
    }

    pub fn uses_universal(&self) -> bool {
        match self {
            Concept::Top | Concept::Bot | Concept::Name(_) => false,
            Concept::Not(c) => c.uses_universal(),
            Concept::And(a, b) | Concept::Or(a, b) => a.uses_universal() || b.uses_universal(),
            Concept::Exists(r, c) | Concept::Forall(r, c) => r.universal || c.uses_universal(),
        }
    }
}

fn fold_right(mut cs: Vec<Concept>, f: impl Fn(Concept, Concept) -> Concept) -> Concept {
    let last = cs.pop().expect("nonempty");
    cs.into_iter().rev().fold(last, |acc, c| f(c, acc))
}

/// A set of concept and role names.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub concepts: BTreeSet<String>,
    pub roles: BTreeSet<String>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn union(&self, other: &Signature) -> Signature {
        Signature {
            concepts: self.concepts.union(&other.concepts).cloned().collect(),
            roles: self.roles.union(&other.roles).cloned().collect(),
        }
    }

    pub fn is_subset(&self, other: &Signature) -> bool {
        self.concepts.is_subset(&other.concepts) && self.roles.is_subset(&other.roles)
    }

    pub fn contains_name(&self, name: &str) -> bool {
        self.concepts.contains(name) || self.roles.contains(name)
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty() && self.roles.is_empty()
    }

    pub fn render(&self) -> String {
        let mut names: Vec<&String> = self.concepts.iter().chain(self.roles.iter()).collect();
        names.sort();
        names.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
    }
}

/// Anything with a signature.
pub trait HasSignature {
    fn signature(&self) -> Signature;
}

impl HasSignature for Concept {
    fn signature(&self) -> Signature {
        let mut sig = Signature::new();
        fn walk(c: &Concept, sig: &mut Signature) {
            match c {
                Concept::Name(n) => {
                    sig.concepts.insert(n.clone());
                }
                Concept::Not(d) => walk(d, sig),
                Concept::And(a, b) | Concept::Or(a, b) => {
                    walk(a, sig);
                    walk(b, sig);
                }
                Concept::Exists(r, d) | Concept::Forall(r, d) => {
                    if !r.universal {
                        sig.roles.insert(r.name.clone());
                    }
                    walk(d, sig);
                }
                _ => {}
            }
        }
        walk(self, &mut sig);
        sig
    }
}

/// A TBox: concept inclusions, role inclusions, functionality assertions.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TBox {
    pub concept_inclusions: BTreeSet<(Concept, Concept)>,
    pub role_inclusions: BTreeSet<(RoleExpr, RoleExpr)>,
    pub functionality: BTreeSet<RoleExpr>,
}

impl TBox {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.concept_inclusions.is_empty()
            && self.role_inclusions.is_empty()
            && self.functionality.is_empty()
    }

    pub fn functionality_only(&self) -> bool {
        self.concept_inclusions.is_empty() && self.role_inclusions.is_empty()
    }

    /// `T ⊨ sub ⊑ sup`: the reflexive-transitive closure of the declared
    /// role inclusions plus inverse lifting (`p ⊑ q` entails `p⁻ ⊑ q⁻`).
    /// Both roles must be non-universal.
    pub fn role_entails(&self, sub: &RoleExpr, sup: &RoleExpr) -> bool {
        debug_assert!(!sub.universal && !sup.universal);
        if sub == sup {
            return true;
        }
        let mut seen: BTreeSet<RoleExpr> = BTreeSet::new();
        let mut frontier = vec![sub.clone()];
        seen.insert(sub.clone());
        while let Some(cur) = frontier.pop() {
            for (p, q) in &self.role_inclusions {
                let step = if *p == cur {
                    Some(q.clone())
                } else if p.inverse() == cur {
                    Some(q.inverse())
                } else {
                    None
                };
                if let Some(next) = step {
                    if next == *sup {
                        return true;
                    }
                    if seen.insert(next.clone()) {
                        frontier.push(next);
                    }
                }
            }
        }
        false
    }

    /// All role expressions entailed to be superroles of `sub` (including it).
    pub fn superroles(&self, sub: &RoleExpr) -> BTreeSet<RoleExpr> {
        let mut seen: BTreeSet<RoleExpr> = BTreeSet::new();
        let mut frontier = vec![sub.clone()];
        seen.insert(sub.clone());
        while let Some(cur) = frontier.pop() {
            for (p, q) in &self.role_inclusions {
                let step = if *p == cur {
                    Some(q.clone())
                } else if p.inverse() == cur {
                    Some(q.inverse())
                } else {
                    None
                };
                if let Some(next) = step {
                    if seen.insert(next.clone()) {
                        frontier.push(next);
                    }
                }
            }
        }
        seen
    }

    /// Is `r` (or a subrole of it... no: r itself) declared functional,
    /// where declarations on `r` apply as written.
    pub fn is_functional(&self, r: &RoleExpr) -> bool {
        self.functionality.contains(r)
    }

    /// Role names occurring anywhere in the TBox.
    pub fn role_names(&self) -> BTreeSet<String> {
        self.signature().roles
    }

    pub fn render(&self) -> String {
        let mut lines = Vec::new();
        for (c, d) in &self.concept_inclusions {
            lines.push(format!("{} sub {}", c.render(), d.render()));
        }
        for (r, s) in &self.role_inclusions {
            lines.push(format!("{} sub {}", r, s));
        }
        for r in &self.functionality {
            lines.push(format!("func({})", r));
        }
        lines.join("\n")
    }
}

impl HasSignature for TBox {
    fn signature(&self) -> Signature {
        let mut sig = Signature::new();
        for (c, d) in &self.concept_inclusions {
            sig = sig.union(&c.signature()).union(&d.signature());
        }
        for (r, s) in &self.role_inclusions {
            sig.roles.insert(r.name.clone());
            sig.roles.insert(s.name.clone());
        }
        for r in &self.functionality {
            sig.roles.insert(r.name.clone());
        }
        sig
    }
}

/// An ABox: concept assertions and role assertions over individual names.
/// A plain ABox has only concept-name assertions; an extended ABox (eABox)
/// may assert compound concepts.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ABox {
    pub concept_assertions: BTreeSet<(Concept, String)>,
    pub role_assertions: BTreeSet<(String, String, String)>,
}

impl ABox {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn is_extended(&self) -> bool {
        self.concept_assertions.iter().any(|(c, _)| !matches!(c, Concept::Name(_)))
    }

    pub fn individuals(&self) -> BTreeSet<String> {
        let mut inds = BTreeSet::new();
        for (_, a) in &self.concept_assertions {
            inds.insert(a.clone());
        }
        for (_, a, b) in &self.role_assertions {
            inds.insert(a.clone());
            inds.insert(b.clone());
        }
        inds
    }

    /// Restriction to the individuals undirected-reachable from `a`
    /// (the connected component of `a`).
    pub fn component_of(&self, a: &str) -> ABox {
        let mut reach: BTreeSet<String> = BTreeSet::new();
        reach.insert(a.to_string());
        let mut changed = true;
        while changed {
            changed = false;
            for (_, x, y) in &self.role_assertions {
                if reach.contains(x) && reach.insert(y.clone()) {
                    changed = true;
                }
                if reach.contains(y) && reach.insert(x.clone()) {
                    changed = true;
                }
            }
        }
        ABox {
            concept_assertions: self
                .concept_assertions
                .iter()
                .filter(|(_, x)| reach.contains(x))
                .cloned()
                .collect(),
            role_assertions: self
                .role_assertions
                .iter()
                .filter(|(_, x, y)| reach.contains(x) && reach.contains(y))
                .cloned()
                .collect(),
        }
    }

    pub fn render(&self) -> String {
        let mut lines = Vec::new();
        for (c, a) in &self.concept_assertions {
            match c {
                Concept::Name(n) => lines.push(format!("{}({})", n, a)),
                other => {
                    let r = other.render();
                    if r.starts_with('(') {
                        lines.push(format!("{}({})", r, a));
                    } else {
                        lines.push(format!("({})({})", r, a));
                    }
                }
            }
        }
        for (r, a, b) in &self.role_assertions {
            lines.push(format!("{}({},{})", r, a, b));
        }
        lines.join("\n")
    }
}

impl HasSignature for ABox {
    fn signature(&self) -> Signature {
        let mut sig = Signature::new();
        for (c, _) in &self.concept_assertions {
            sig = sig.union(&c.signature());
        }
        for (r, _, _) in &self.role_assertions {
            sig.roles.insert(r.clone());
        }
        sig
    }
}

/// An atom of a conjunctive query. Role atoms are stored with role-name
/// orientation only: an input atom `r-(x,y)` is normalized to `r(y,x)`.
/// Concept atoms with compound concepts make the query an eCQ.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum QueryAtom {
    Concept(Concept, String),
    Role(String, String, String),
}

impl QueryAtom {
    pub fn role(r: impl Into<String>, x: impl Into<String>, y: impl Into<String>) -> Self {
        QueryAtom::Role(r.into(), x.into(), y.into())
    }

    pub fn concept(c: Concept, x: impl Into<String>) -> Self {
        QueryAtom::Concept(c, x.into())
    }

    /// Role atom from a role expression, normalizing orientation.
    pub fn role_expr(r: &RoleExpr, x: impl Into<String>, y: impl Into<String>) -> Self {
        debug_assert!(!r.universal);
        if r.inverted {
            QueryAtom::Role(r.name.clone(), y.into(), x.into())
        } else {
            QueryAtom::Role(r.name.clone(), x.into(), y.into())
        }
    }

    pub fn render(&self) -> String {
        match self {
            QueryAtom::Concept(Concept::Name(n), x) => format!("{}({})", n, x),
            QueryAtom::Concept(c, x) => {
                let r = c.render();
                if r.starts_with('(') {
                    format!("{}({})", r, x)
                } else {
                    format!("({})({})", r, x)
                }
            }
            QueryAtom::Role(r, x, y) => format!("{}({},{})", r, x, y),
        }
    }

    pub fn vars(&self) -> Vec<&String> {
        match self {
            QueryAtom::Concept(_, x) => vec![x],
            QueryAtom::Role(_, x, y) => vec![x, y],
        }
    }
}

/// A conjunctive query with one answer variable. The answer variable is a
/// member of the variable set even if it occurs in no atom.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Cq {
    pub answer: String,
    pub atoms: BTreeSet<QueryAtom>,
}

impl Cq {
    pub fn new(answer: impl Into<String>, atoms: impl IntoIterator<Item = QueryAtom>) -> Self {
        Cq { answer: answer.into(), atoms: atoms.into_iter().collect() }
    }

    pub fn top(answer: impl Into<String>) -> Self {
        Cq { answer: answer.into(), atoms: BTreeSet::new() }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut vs: BTreeSet<String> = BTreeSet::new();
        vs.insert(self.answer.clone());
        for a in &self.atoms {
            for v in a.vars() {
                vs.insert(v.clone());
            }
        }
        vs
    }

    pub fn is_extended(&self) -> bool {
        self.atoms
            .iter()
            .any(|a| matches!(a, QueryAtom::Concept(c, _) if !matches!(c, Concept::Name(_))))
    }

    pub fn role_atoms(&self) -> impl Iterator<Item = (&String, &String, &String)> {
        self.atoms.iter().filter_map(|a| match a {
            QueryAtom::Role(r, x, y) => Some((r, x, y)),
            _ => None,
        })
    }

    /// The query viewed as an (extended) ABox: variables become individuals.
    pub fn as_abox(&self) -> ABox {
        let mut abox = ABox::empty();
        for a in &self.atoms {
            match a {
                QueryAtom::Concept(c, x) => {
                    abox.concept_assertions.insert((c.clone(), x.clone()));
                }
                QueryAtom::Role(r, x, y) => {
                    abox.role_assertions.insert((r.clone(), x.clone(), y.clone()));
                }
            }
        }
        abox
    }

    pub fn render(&self) -> String {
        if self.atoms.is_empty() {
            return format!("q({}) :- .", self.answer);
        }
        let mut parts: Vec<String> = self.atoms.iter().map(|a| a.render()).collect();
        parts.sort();
        format!("q({}) :- {}.", self.answer, parts.join(", "))
    }
}

impl HasSignature for Cq {
    fn signature(&self) -> Signature {
        let mut sig = Signature::new();
        for a in &self.atoms {
            match a {
                QueryAtom::Concept(c, _) => sig = sig.union(&c.signature()),
                QueryAtom::Role(r, _, _) => {
                    sig.roles.insert(r.clone());
                }
            }
        }
        sig
    }
}

/// A union of conjunctive queries; all disjuncts share the answer variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ucq {
    pub answer: String,
    pub disjuncts: Vec<Cq>,
}

impl Ucq {
    pub fn new(disjuncts: Vec<Cq>) -> Result<Self, String> {
        let first = disjuncts
            .first()
            .ok_or_else(|| "a UCQ must have at least one disjunct".to_string())?;
        let answer = first.answer.clone();
        if disjuncts.iter().any(|d| d.answer != answer) {
            return Err("all disjuncts of a UCQ must share the answer variable".into());
        }
        Ok(Ucq { answer, disjuncts })
    }

    pub fn single(cq: Cq) -> Self {
        Ucq { answer: cq.answer.clone(), disjuncts: vec![cq] }
    }

    pub fn is_extended(&self) -> bool {
        self.disjuncts.iter().any(|d| d.is_extended())
    }

    pub fn render(&self) -> String {
        self.disjuncts.iter().map(|d| d.render()).collect::<Vec<_>>().join("\n")
    }
}

impl HasSignature for Ucq {
    fn signature(&self) -> Signature {
        self.disjuncts
            .iter()
            .fold(Signature::new(), |acc, d| acc.union(&d.signature()))
    }
}

/// An instance query `C(x)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Iq {
    pub concept: Concept,
    pub var: String,
}

impl Iq {
    pub fn new(concept: Concept, var: impl Into<String>) -> Self {
        Iq { concept, var: var.into() }
    }

    pub fn render(&self) -> String {
        let r = self.concept.render();
        if r.starts_with('(') {
            format!("q({}) :- {}({}).", self.var, r, self.var)
        } else {
            format!("q({}) :- ({})({}).", self.var, r, self.var)
        }
    }
}

impl HasSignature for Iq {
    fn signature(&self) -> Signature {
        self.concept.signature()
    }
}

/// The actual query of an OMQ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Query {
    Ucq(Ucq),
    Iq(Iq),
}

impl Query {
    pub fn answer_var(&self) -> &str {
        match self {
            Query::Ucq(u) => &u.answer,
            Query::Iq(iq) => &iq.var,
        }
    }

    pub fn render(&self) -> String {
        match self {
            Query::Ucq(u) => u.render(),
            Query::Iq(iq) => iq.render(),
        }
    }
}

impl HasSignature for Query {
    fn signature(&self) -> Signature {
        match self {
            Query::Ucq(u) => u.signature(),
            Query::Iq(iq) => iq.signature(),
        }
    }
}

/// TBox dialect: base language {ALC, ALCH, ALCI, ALCHI} optionally extended
/// with the universal role (`+u`) and functionality (`+f`).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Dialect {
    pub inverse: bool,
    pub hierarchy: bool,
    pub universal: bool,
    pub functional: bool,
}

impl Dialect {
    pub const ALC: Dialect =
        Dialect { inverse: false, hierarchy: false, universal: false, functional: false };
    pub const ALCI: Dialect =
        Dialect { inverse: true, hierarchy: false, universal: false, functional: false };
    pub const ALCH: Dialect =
        Dialect { inverse: false, hierarchy: true, universal: false, functional: false };
    pub const ALCHI: Dialect =
        Dialect { inverse: true, hierarchy: true, universal: false, functional: false };

    pub fn with_universal(mut self) -> Dialect {
        self.universal = true;
        self
    }

    pub fn with_functionality(mut self) -> Dialect {
        self.functional = true;
        self
    }

    /// Full dialect, everything allowed.
    pub fn alchif_u() -> Dialect {
        Dialect { inverse: true, hierarchy: true, universal: true, functional: true }
    }

    pub fn render(&self) -> String {
        let mut s = String::from("alc");
        if self.hierarchy {
            s.push('h');
        }
        if self.inverse {
            s.push('i');
        }
        if self.universal {
            s.push_str("+u");
        }
        if self.functional {
            s.push_str("+f");
        }
        s
    }

    pub fn parse_tag(tag: &str) -> Result<Dialect, String> {
        let tag = tag.trim().to_ascii_lowercase();
        let mut base = tag.as_str();
        let mut universal = false;
        let mut functional = false;
        while let Some(pos) = base.rfind('+') {
            match &base[pos..] {
                "+u" => universal = true,
                "+f" => functional = true,
                other => return Err(format!("unknown dialect suffix '{}'", other)),
            }
            base = &base[..pos];
        }
        let (hierarchy, inverse) = match base {
            "alc" => (false, false),
            "alch" => (true, false),
            "alci" => (false, true),
            "alchi" => (true, true),
            "alcf" => {
                functional = true;
                (false, false)
            }
            "alcif" | "alcfi" => {
                functional = true;
                (false, true)
            }
            other => return Err(format!("unknown dialect '{}'", other)),
        };
        Ok(Dialect { inverse, hierarchy, universal, functional })
    }
}

/// A dialect violation found by [`validate_dialect`]-style checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    InverseRole(String),
    UniversalRole(String),
    RoleInclusion(String),
    Functionality(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InverseRole(w) => write!(f, "inverse role: {}", w),
            Violation::UniversalRole(w) => write!(f, "universal role: {}", w),
            Violation::RoleInclusion(w) => write!(f, "role inclusion: {}", w),
            Violation::Functionality(w) => write!(f, "functionality: {}", w),
        }
    }
}

fn role_violations(r: &RoleExpr, dialect: Dialect, out: &mut Vec<Violation>) {
    if r.universal {
        if !dialect.universal {
            out.push(Violation::UniversalRole(r.to_string()));
        }
    } else if r.inverted && !dialect.inverse {
        out.push(Violation::InverseRole(r.to_string()));
    }
}

pub fn concept_violations(c: &Concept, dialect: Dialect) -> Vec<Violation> {
    let mut out = Vec::new();
    fn walk(c: &Concept, dialect: Dialect, out: &mut Vec<Violation>) {
        match c {
            Concept::Not(d) => walk(d, dialect, out),
            Concept::And(a, b) | Concept::Or(a, b) => {
                walk(a, dialect, out);
                walk(b, dialect, out);
            }
            Concept::Exists(r, d) | Concept::Forall(r, d) => {
                role_violations(r, dialect, out);
                walk(d, dialect, out);
            }
            _ => {}
        }
    }
    walk(c, dialect, &mut out);
    out
}

pub fn tbox_violations(t: &TBox, dialect: Dialect) -> Vec<Violation> {
    let mut out = Vec::new();
    for (c, d) in &t.concept_inclusions {
        out.extend(concept_violations(c, dialect));
        out.extend(concept_violations(d, dialect));
    }
    for (r, s) in &t.role_inclusions {
        if !dialect.hierarchy {
            out.push(Violation::RoleInclusion(format!("{} sub {}", r, s)));
        }
        role_violations(r, dialect, &mut out);
        role_violations(s, dialect, &mut out);
    }
    for r in &t.functionality {
        if !dialect.functional {
            out.push(Violation::Functionality(format!("func({})", r)));
        }
        role_violations(r, dialect, &mut out);
    }
    out
}

pub fn query_violations(q: &Query, dialect: Dialect) -> Vec<Violation> {
    match q {
        Query::Iq(iq) => concept_violations(&iq.concept, dialect),
        Query::Ucq(u) => {
            let mut out = Vec::new();
            for d in &u.disjuncts {
                for a in &d.atoms {
                    if let QueryAtom::Concept(c, _) = a {
                        out.extend(concept_violations(c, dialect));
                    }
                }
            }
            out
        }
    }
}

/// An ontology-mediated query `(T, Σ, q)` with its dialect tag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Omq {
    pub tbox: TBox,
    pub sigma: Signature,
    pub query: Query,
    pub dialect: Dialect,
}

impl Omq {
    /// Constructs an OMQ, enforcing `Σ ⊆ sig(T) ∪ sig(q)`.
    pub fn new(tbox: TBox, sigma: Signature, query: Query, dialect: Dialect) -> Result<Self, String> {
        let full = tbox.signature().union(&query.signature());
        if !sigma.is_subset(&full) {
            return Err(format!(
                "ABox signature must be contained in sig(T) ∪ sig(q); offending names: {}",
                sigma
                    .concepts
                    .difference(&full.concepts)
                    .chain(sigma.roles.difference(&full.roles))
                    .cloned()
                    .collect::<Vec<_>>()
                    .join(", ")
            ));
        }
        Ok(Omq { tbox, sigma, query, dialect })
    }

    /// OMQ with the full ABox signature `sig(T) ∪ sig(q)`.
    pub fn with_full_sigma(tbox: TBox, query: Query, dialect: Dialect) -> Self {
        let sigma = tbox.signature().union(&query.signature());
        Omq { tbox, sigma, query, dialect }
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = tbox_violations(&self.tbox, self.dialect);
        out.extend(query_violations(&self.query, self.dialect));
        out
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("[dialect] {}\n", self.dialect.render()));
        out.push_str(&format!("[sigma] {}\n", self.sigma.render()));
        out.push_str("[tbox]\n");
        let t = self.tbox.render();
        if !t.is_empty() {
            out.push_str(&t);
            out.push('\n');
        }
        out.push_str("[query]\n");
        out.push_str(&self.query.render());
        out.push('\n');
        out
    }
}

impl HasSignature for Omq {
    fn signature(&self) -> Signature {
        self.tbox.signature().union(&self.query.signature())
    }
}

/// Deterministic generator of fresh names in the reserved `@` namespace.
///
/// The parser rejects `@` in ordinary input, so freshness with respect to any
/// parsed signature is structural. Collisions with programmatically built
/// signatures are skipped.
#[derive(Debug, Default)]
pub struct FreshNames {
    counters: std::collections::BTreeMap<String, usize>,
}

impl FreshNames {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn next(&mut self, avoid: &Signature, tag: &str) -> String {
        let counter = self.counters.entry(tag.to_string()).or_insert(0);
        loop {
            let name = format!("@{}{}", tag, *counter);
            *counter += 1;
            if !avoid.contains_name(&name) {
                return name;
            }
        }
    }
}

/// Deterministic sequence of `count` fresh names `@tag0, @tag1, …`
/// disjoint from all supplied signatures.
pub fn fresh_names(contexts: &[&Signature], count: usize, tag: &str) -> Vec<String> {
    let avoid = contexts
        .iter()
        .fold(Signature::new(), |acc, s| acc.union(s));
    let mut gen = FreshNames::new();
    (0..count).map(|_| gen.next(&avoid, tag)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: &str) -> Concept {
        Concept::name(n)
    }

    #[test]
    fn and_sorts_canonically() {
        let ba = Concept::and(c("B"), c("A"));
        assert_eq!(ba.render(), "(A and B)");
        assert_eq!(ba, Concept::and(c("A"), c("B")));
    }

    #[test]
    fn top_absorption_in_and_only() {
        assert_eq!(Concept::and(Concept::Top, c("A")), c("A"));
        let or = Concept::or(Concept::Top, c("A"));
        assert_eq!(or.render(), "(A or top)");
    }

    #[test]
    fn implies_expands_and_absorbs_top() {
        let p_imp = Concept::implies(c("P"), Concept::exists(RoleExpr::named("r"), c("P")));
        assert_eq!(p_imp.render(), "(exists r. P or not P)");
        assert_eq!(Concept::implies(Concept::Top, c("A")), c("A"));
    }

    #[test]
    fn role_expr_normalization() {
        let u = RoleExpr::universal();
        assert_eq!(u.inverse(), u);
        let r = RoleExpr::inv("r");
        assert_eq!(r.inverse(), RoleExpr::named("r"));
        assert_eq!(r.inverse().inverse(), r);
    }

    #[test]
    fn signature_of_example_query() {
        // q(x) = ∃y r(y,x) ∧ s(y,x) has signature {r, s}.
        let q = Cq::new("x", [QueryAtom::role("r", "y", "x"), QueryAtom::role("s", "y", "x")]);
        let sig = q.signature();
        assert!(sig.concepts.is_empty());
        assert_eq!(sig.roles.into_iter().collect::<Vec<_>>(), vec!["r", "s"]);
    }

    #[test]
    fn signature_of_empty_tbox_and_extension() {
        assert!(TBox::empty().signature().is_empty());
        let mut t = TBox::empty();
        t.concept_inclusions.insert((
            Concept::exists(RoleExpr::named("s"), c("P")),
            Concept::forall(RoleExpr::named("r"), c("Pp")),
        ));
        let sig = t.signature();
        assert_eq!(sig.roles.iter().cloned().collect::<Vec<_>>(), vec!["r", "s"]);
        assert_eq!(sig.concepts.iter().cloned().collect::<Vec<_>>(), vec!["P", "Pp"]);
    }

    #[test]
    fn dialect_violations() {
        let inv = Concept::exists(RoleExpr::inv("r"), c("P"));
        let v = concept_violations(&inv, Dialect::ALC);
        assert_eq!(v, vec![Violation::InverseRole("r-".into())]);
        assert!(concept_violations(&inv, Dialect::ALCI).is_empty());

        let mut t = TBox::empty();
        t.functionality.insert(RoleExpr::named("r"));
        let v = tbox_violations(&t, Dialect::ALCHI);
        assert!(matches!(v.as_slice(), [Violation::Functionality(_)]));

        // IQ P -> ∃r.P is fine in plain ALC.
        let iq = Iq::new(
            Concept::implies(c("P"), Concept::exists(RoleExpr::named("r"), c("P"))),
            "x",
        );
        assert!(query_violations(&Query::Iq(iq), Dialect::ALC).is_empty());
    }

    #[test]
    fn role_entails_reflexive_transitive() {
        let t = TBox::empty();
        assert!(t.role_entails(&RoleExpr::named("r"), &RoleExpr::named("r")));
        assert!(!t.role_entails(&RoleExpr::named("r"), &RoleExpr::named("s")));

        let mut t = TBox::empty();
        t.role_inclusions.insert((RoleExpr::named("r"), RoleExpr::named("s")));
        t.role_inclusions.insert((RoleExpr::named("s"), RoleExpr::named("t")));
        assert!(t.role_entails(&RoleExpr::named("r"), &RoleExpr::named("t")));
        assert!(!t.role_entails(&RoleExpr::named("t"), &RoleExpr::named("r")));
    }

    #[test]
    fn role_entails_inverse_lifting() {
        let mut t = TBox::empty();
        t.role_inclusions.insert((RoleExpr::named("r"), RoleExpr::named("s")));
        assert!(t.role_entails(&RoleExpr::inv("r"), &RoleExpr::inv("s")));
        assert!(!t.role_entails(&RoleExpr::inv("s"), &RoleExpr::inv("r")));
    }

    #[test]
    fn fresh_name_sequences() {
        let mut sig = Signature::new();
        sig.concepts.insert("A".into());
        sig.roles.insert("r".into());
        assert_eq!(fresh_names(&[&sig], 1, "p"), vec!["@p0"]);
        assert_eq!(fresh_names(&[&sig], 1, "p"), vec!["@p0"]);
        assert_eq!(
            fresh_names(&[], 3, "pd"),
            vec!["@pd0", "@pd1", "@pd2"]
        );
    }

    #[test]
    fn cq_render_sorted() {
        let q = Cq::new("x", [QueryAtom::role("s", "x", "y"), QueryAtom::role("r", "x", "y")]);
        assert_eq!(q.render(), "q(x) :- r(x,y), s(x,y).");
        assert_eq!(Cq::top("x").render(), "q(x) :- .");
    }

    #[test]
    fn abox_render_wraps_compound() {
        let mut a = ABox::empty();
        a.concept_assertions.insert((Concept::and(c("P"), Concept::not(c("P"))), "a".into()));
        assert_eq!(a.render(), "(P and not P)(a)");
    }

    #[test]
    fn dialect_tags_round_trip() {
        for tag in ["alc", "alch", "alci", "alchi", "alc+u", "alchi+u+f"] {
            let d = Dialect::parse_tag(tag).unwrap();
            assert_eq!(d.render(), tag);
        }
        assert!(Dialect::parse_tag("alq").is_err());
    }
}
