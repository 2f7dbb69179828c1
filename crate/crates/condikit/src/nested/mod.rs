//! Polarized nested sequents with indexed brackets, and their calculus.
//!
//! A nested sequent is a multiset of polarized formulas and brackets
//! `[index: body]`; an *input sequent* contains no output-polarity formula
//! anywhere, a *nested sequent* contains exactly one. Rules apply at any
//! depth; positions are addressed by paths of bracket indices, which stay
//! stable because rules only append to nodes.

mod check;
mod cutelim;
mod prove;
mod rules;
pub mod structural;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Formula, Polarity};

pub use check::{check_nested, check_nested_report, NestedCheckError, RuleSet};
pub use cutelim::{eliminate_cut, eliminate_cut_trace, eliminate_rep, reduce_cut};
pub use prove::{prove_nested, prove_nested_with, NestedBudget, NestedProofResult};
pub use rules::{nested_rule_instances, premises_of};
pub use structural::{apply_structural, generalized_init, Invertible, StructuralKind};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Bracket {
    pub index: Formula,
    pub body: NestedSequent,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NestedSequent {
    pub formulas: Vec<(Formula, Polarity)>,
    pub brackets: Vec<Bracket>,
}

/// A position: the sequence of bracket positions from the root down.
pub type Path = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NestedError {
    #[error("no bracket at position {0} of path {1:?}")]
    BadPath(usize, Path),
    #[error("expected exactly one output formula, found {0}")]
    NotNested(usize),
    #[error("expected an input sequent, found an output formula")]
    NotInput,
    #[error("{0}")]
    Other(String),
}

impl NestedSequent {
    pub fn empty() -> Self {
        NestedSequent::default()
    }

    pub fn from_parts(formulas: Vec<(Formula, Polarity)>, brackets: Vec<Bracket>) -> Self {
        NestedSequent { formulas, brackets }
    }

    /// A nested sequent holding a single output formula.
    pub fn goal(f: Formula) -> Self {
        NestedSequent { formulas: vec![(f, Polarity::Out)], brackets: Vec::new() }
    }

    pub fn out_count(&self) -> usize {
        self.formulas.iter().filter(|(_, p)| *p == Polarity::Out).count()
            + self.brackets.iter().map(|b| b.body.out_count()).sum::<usize>()
    }

    pub fn is_input(&self) -> bool {
        self.out_count() == 0
    }

    pub fn is_nested(&self) -> bool {
        self.out_count() == 1
    }

    /// Path and formula of the unique output occurrence.
    pub fn out_position(&self) -> Option<(Path, Formula)> {
        if let Some((f, _)) = self.formulas.iter().find(|(_, p)| *p == Polarity::Out) {
            return Some((Vec::new(), f.clone()));
        }
        for (i, b) in self.brackets.iter().enumerate() {
            if let Some((mut path, f)) = b.body.out_position() {
                path.insert(0, i);
                return Some((path, f));
            }
        }
        None
    }

    pub fn at(&self, path: &[usize]) -> Result<&NestedSequent, NestedError> {
        let mut cur = self;
        for (depth, &i) in path.iter().enumerate() {
            cur = &cur
                .brackets
                .get(i)
                .ok_or_else(|| NestedError::BadPath(i, path[..=depth].to_vec()))?
                .body;
        }
        Ok(cur)
    }

    fn at_mut(&mut self, path: &[usize]) -> Result<&mut NestedSequent, NestedError> {
        let mut cur = self;
        for (depth, &i) in path.iter().enumerate() {
            if i >= cur.brackets.len() {
                return Err(NestedError::BadPath(i, path[..=depth].to_vec()));
            }
            cur = &mut cur.brackets[i].body;
        }
        Ok(cur)
    }

    pub fn with_formula(&self, path: &[usize], f: Formula, pol: Polarity) -> Result<Self, NestedError> {
        let mut out = self.clone();
        out.at_mut(path)?.formulas.push((f, pol));
        Ok(out)
    }

    /// Removes one occurrence of `(f, pol)` at the node.
    pub fn without_formula(
        &self,
        path: &[usize],
        f: &Formula,
        pol: Polarity,
    ) -> Result<Self, NestedError> {
        let mut out = self.clone();
        let node = out.at_mut(path)?;
        let i = node
            .formulas
            .iter()
            .position(|(g, p)| g == f && *p == pol)
            .ok_or_else(|| NestedError::Other(format!("`{f}{pol}` not at node")))?;
        node.formulas.remove(i);
        Ok(out)
    }

    /// Appends a bracket at the node, returning its position.
    pub fn with_bracket(&self, path: &[usize], bracket: Bracket) -> Result<(Self, usize), NestedError> {
        let mut out = self.clone();
        let node = out.at_mut(path)?;
        node.brackets.push(bracket);
        let pos = node.brackets.len() - 1;
        Ok((out, pos))
    }

    pub fn bracket_at(&self, path: &[usize], pos: usize) -> Result<&Bracket, NestedError> {
        self.at(path)?
            .brackets
            .get(pos)
            .ok_or_else(|| NestedError::BadPath(pos, path.to_vec()))
    }

    /// Adds content into the body of the bracket `pos` at `path`.
    pub fn into_bracket(
        &self,
        path: &[usize],
        pos: usize,
        f: Formula,
        pol: Polarity,
    ) -> Result<Self, NestedError> {
        let mut sub_path = path.to_vec();
        sub_path.push(pos);
        self.with_formula(&sub_path, f, pol)
    }

    /// Removes the unique output formula (the down-arrow context operation).
    pub fn remove_out(&self) -> Result<Self, NestedError> {
        let (path, f) = self.out_position().ok_or(NestedError::NotNested(0))?;
        self.without_formula(&path, &f, Polarity::Out)
    }

    /// Replaces the index of the bracket `pos` at `path`.
    pub fn with_index(
        &self,
        path: &[usize],
        pos: usize,
        index: Formula,
    ) -> Result<Self, NestedError> {
        let mut out = self.clone();
        let node = out.at_mut(path)?;
        if pos >= node.brackets.len() {
            return Err(NestedError::BadPath(pos, path.to_vec()));
        }
        node.brackets[pos].index = index;
        Ok(out)
    }

    /// Multiset union of `content` into the node at `path`.
    pub fn with_content(&self, path: &[usize], content: &NestedSequent) -> Result<Self, NestedError> {
        let mut out = self.clone();
        let node = out.at_mut(path)?;
        node.formulas.extend(content.formulas.iter().cloned());
        node.brackets.extend(content.brackets.iter().cloned());
        Ok(out)
    }

    /// Multiset subtraction of `content` from the node at `path`; bracket
    /// removal compares bodies as multisets.
    pub fn without_content(
        &self,
        path: &[usize],
        content: &NestedSequent,
    ) -> Result<Self, NestedError> {
        let mut out = self.clone();
        let node = out.at_mut(path)?;
        for (f, p) in &content.formulas {
            let i = node
                .formulas
                .iter()
                .position(|(g, q)| g == f && q == p)
                .ok_or_else(|| NestedError::Other(format!("`{f}{p}` not at node")))?;
            node.formulas.remove(i);
        }
        for b in &content.brackets {
            let i = node
                .brackets
                .iter()
                .position(|c| c.index == b.index && c.body.same_multiset(&b.body))
                .ok_or_else(|| NestedError::Other(format!("bracket `{b}` not at node")))?;
            node.brackets.remove(i);
        }
        Ok(out)
    }

    /// Canonical (recursively sorted) copy; multiset-equal sequents share it.
    pub fn canonical(&self) -> NestedSequent {
        let mut formulas = self.formulas.clone();
        formulas.sort();
        let mut brackets: Vec<Bracket> = self
            .brackets
            .iter()
            .map(|b| Bracket { index: b.index.clone(), body: b.body.canonical() })
            .collect();
        brackets.sort();
        NestedSequent { formulas, brackets }
    }

    pub fn same_multiset(&self, other: &NestedSequent) -> bool {
        self.canonical() == other.canonical()
    }

    /// Set-normal form: canonical with duplicate formulas and duplicate
    /// brackets removed at every node, used as the search history key.
    pub fn set_normal(&self) -> NestedSequent {
        let mut formulas = self.formulas.clone();
        formulas.sort();
        formulas.dedup();
        let mut brackets: Vec<Bracket> = self
            .brackets
            .iter()
            .map(|b| Bracket { index: b.index.clone(), body: b.body.set_normal() })
            .collect();
        brackets.sort();
        brackets.dedup();
        NestedSequent { formulas, brackets }
    }

    /// Maximal bracket nesting depth.
    pub fn depth(&self) -> usize {
        self.brackets.iter().map(|b| 1 + b.body.depth()).max().unwrap_or(0)
    }

    /// The formula interpretation. Input items fold as conjunctions in
    /// lexicographic print order starting from `true`; the output item, if
    /// present, wraps the result in an implication.
    pub fn interpret(&self) -> Formula {
        let mut items: Vec<(String, Formula)> = Vec::new();
        let mut out_item: Option<Formula> = None;
        for (f, p) in &self.formulas {
            match p {
                Polarity::In => items.push((f.to_string(), f.clone())),
                Polarity::Out => out_item = Some(f.clone()),
            }
        }
        for b in &self.brackets {
            let inner = b.body.interpret();
            if b.body.is_input() {
                let f = crate::formula::cond_diam(b.index.clone(), inner);
                items.push((f.to_string(), f));
            } else {
                out_item = Some(crate::formula::cond_box(b.index.clone(), inner));
            }
        }
        items.sort_by(|a, b| a.0.cmp(&b.0));
        let mut acc = crate::formula::top();
        for (_, f) in items {
            acc = crate::formula::and(acc, f);
        }
        match out_item {
            None => acc,
            Some(f) => crate::formula::imp(acc, f),
        }
    }
}

impl fmt::Display for Bracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}: {}]", self.index, self.body)
    }
}

impl fmt::Display for NestedSequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (g, p) in &self.formulas {
            if !first {
                write!(f, ", ")?;
            }
            write!(f, "{g}{p}")?;
            first = false;
        }
        for b in &self.brackets {
            if !first {
                write!(f, ", ")?;
            }
            write!(f, "{b}")?;
            first = false;
        }
        if first {
            write!(f, "<empty>")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct NestedRepr {
    formulas: Vec<(String, Polarity)>,
    brackets: Vec<BracketRepr>,
}

#[derive(Serialize, Deserialize)]
struct BracketRepr {
    index: String,
    body: NestedRepr,
}

impl From<&NestedSequent> for NestedRepr {
    fn from(ns: &NestedSequent) -> Self {
        NestedRepr {
            formulas: ns.formulas.iter().map(|(f, p)| (f.to_string(), *p)).collect(),
            brackets: ns
                .brackets
                .iter()
                .map(|b| BracketRepr { index: b.index.to_string(), body: (&b.body).into() })
                .collect(),
        }
    }
}

impl Serialize for NestedSequent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        NestedRepr::from(self).serialize(s)
    }
}

impl Serialize for Polarity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Polarity::In => "in".serialize(s),
            Polarity::Out => "out".serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Polarity {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        match String::deserialize(d)?.as_str() {
            "in" => Ok(Polarity::In),
            "out" => Ok(Polarity::Out),
            other => Err(D::Error::custom(format!("bad polarity `{other}`"))),
        }
    }
}

impl<'de> Deserialize<'de> for NestedSequent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        fn build<E: serde::de::Error>(repr: &NestedRepr) -> Result<NestedSequent, E> {
            Ok(NestedSequent {
                formulas: repr
                    .formulas
                    .iter()
                    .map(|(t, p)| Ok((crate::formula::parse(t).map_err(E::custom)?, *p)))
                    .collect::<Result<_, E>>()?,
                brackets: repr
                    .brackets
                    .iter()
                    .map(|b| {
                        Ok(Bracket {
                            index: crate::formula::parse(&b.index).map_err(E::custom)?,
                            body: build(&b.body)?,
                        })
                    })
                    .collect::<Result<_, E>>()?,
            })
        }
        build(&NestedRepr::deserialize(d)?)
    }
}

/// Rules of the nested calculus plus the structural, cut and
/// index-replacement rules, each carrying its target position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum NestedRule {
    Init { path: Path },
    BotIn { path: Path },
    AndIn { path: Path, main: Formula },
    AndOut { path: Path, main: Formula },
    OrIn { path: Path, main: Formula },
    OrOut1 { path: Path, main: Formula },
    OrOut2 { path: Path, main: Formula },
    ImpIn { path: Path, main: Formula },
    ImpOut { path: Path, main: Formula },
    /// Moves the box consequent into the bracket at the same node.
    BoxIn { path: Path, main: Formula, bracket: usize },
    /// Creates a fresh bracket from the output box.
    BoxOut { path: Path, main: Formula },
    /// Creates a fresh bracket from the input might.
    DiamIn { path: Path, main: Formula },
    /// Moves the might consequent into the bracket at the same node.
    DiamOut { path: Path, main: Formula, bracket: usize },
    W { path: Path, inserted: NestedSequent },
    Nec,
    M { path: Path, bracket: usize, split: NestedSequent },
    C { path: Path, main: Formula },
    Cut { path: Path, formula: Formula },
    Rep { path: Path, bracket: usize, old_index: Formula },
}

impl NestedRule {
    pub fn name(&self) -> &'static str {
        match self {
            NestedRule::Init { .. } => "init",
            NestedRule::BotIn { .. } => "bot_in",
            NestedRule::AndIn { .. } => "and_in",
            NestedRule::AndOut { .. } => "and_out",
            NestedRule::OrIn { .. } => "or_in",
            NestedRule::OrOut1 { .. } => "or_out1",
            NestedRule::OrOut2 { .. } => "or_out2",
            NestedRule::ImpIn { .. } => "imp_in",
            NestedRule::ImpOut { .. } => "imp_out",
            NestedRule::BoxIn { .. } => "box_in",
            NestedRule::BoxOut { .. } => "box_out",
            NestedRule::DiamIn { .. } => "diam_in",
            NestedRule::DiamOut { .. } => "diam_out",
            NestedRule::W { .. } => "w",
            NestedRule::Nec => "nec",
            NestedRule::M { .. } => "m",
            NestedRule::C { .. } => "c",
            NestedRule::Cut { .. } => "cut",
            NestedRule::Rep { .. } => "rep",
        }
    }

    pub fn is_structural(&self) -> bool {
        matches!(
            self,
            NestedRule::W { .. } | NestedRule::Nec | NestedRule::M { .. } | NestedRule::C { .. }
        )
    }
}

/// A rule-labeled tree over nested sequents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NestedDerivation {
    pub conclusion: NestedSequent,
    pub rule: NestedRule,
    pub premises: Vec<NestedDerivation>,
}

impl NestedDerivation {
    pub fn leaf(conclusion: NestedSequent, rule: NestedRule) -> Self {
        NestedDerivation { conclusion, rule, premises: Vec::new() }
    }

    pub fn height(&self) -> usize {
        self.premises.iter().map(|p| 1 + p.height()).max().unwrap_or(0)
    }

    /// Maximum over cut nodes of the cut formula's weight plus one.
    pub fn rank(&self) -> usize {
        let own = match &self.rule {
            NestedRule::Cut { formula, .. } => formula.weight() + 1,
            _ => 0,
        };
        self.premises.iter().map(NestedDerivation::rank).max().unwrap_or(0).max(own)
    }

    pub fn uses_cut(&self) -> bool {
        matches!(self.rule, NestedRule::Cut { .. }) || self.premises.iter().any(Self::uses_cut)
    }

    pub fn uses_rep(&self) -> bool {
        matches!(self.rule, NestedRule::Rep { .. }) || self.premises.iter().any(Self::uses_rep)
    }

    pub fn uses_structural(&self) -> bool {
        self.rule.is_structural() || self.premises.iter().any(Self::uses_structural)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{atom, parse};

    fn ns(formulas: Vec<(Formula, Polarity)>, brackets: Vec<Bracket>) -> NestedSequent {
        NestedSequent::from_parts(formulas, brackets)
    }

    #[test]
    fn polarity_counting() {
        let g = NestedSequent::goal(atom("p"));
        assert!(g.is_nested());
        let inner = ns(vec![(atom("q"), Polarity::Out)], vec![]);
        let s = ns(
            vec![(atom("p"), Polarity::In)],
            vec![Bracket { index: atom("r"), body: inner }],
        );
        assert!(s.is_nested());
        assert_eq!(s.out_position().unwrap().0, vec![0]);
        assert!(s.remove_out().unwrap().is_input());
    }

    #[test]
    fn interpretation_clauses() {
        let empty = NestedSequent::empty();
        assert_eq!(empty.interpret(), parse("true").unwrap());
        let s = ns(
            vec![(atom("p"), Polarity::In), (atom("q"), Polarity::Out)],
            vec![],
        );
        assert_eq!(s.interpret(), parse("true & p -> q").unwrap());
        let s = ns(
            vec![(atom("p"), Polarity::In)],
            vec![Bracket {
                index: atom("r"),
                body: ns(vec![(atom("q"), Polarity::In)], vec![]),
            }],
        );
        assert_eq!(s.interpret(), parse("(true & p) & (r ?> true & q)").unwrap());
        let s = ns(
            vec![],
            vec![Bracket {
                index: atom("r"),
                body: NestedSequent::goal(atom("q")),
            }],
        );
        assert_eq!(s.interpret(), parse("true -> (r > (true -> q))").unwrap());
    }

    #[test]
    fn multiset_identity_of_brackets() {
        let b1 = Bracket { index: atom("r"), body: ns(vec![(atom("p"), Polarity::In), (atom("q"), Polarity::In)], vec![]) };
        let b2 = Bracket { index: atom("r"), body: ns(vec![(atom("q"), Polarity::In), (atom("p"), Polarity::In)], vec![]) };
        let s1 = ns(vec![], vec![b1.clone()]);
        let s2 = ns(vec![], vec![b2]);
        assert!(s1.same_multiset(&s2));
        let s3 = ns(vec![], vec![b1.clone(), b1]);
        assert!(!s1.same_multiset(&s3));
        assert_eq!(s1.set_normal(), s3.set_normal());
    }

    #[test]
    fn printing_uses_star_and_caret() {
        let s = ns(
            vec![(atom("p"), Polarity::In), (atom("q"), Polarity::Out)],
            vec![Bracket {
                index: atom("r"),
                body: ns(vec![(atom("s"), Polarity::In)], vec![]),
            }],
        );
        assert_eq!(s.to_string(), "p*, q^, [r: s*]");
        let js = serde_json::to_string(&s).unwrap();
        let back: NestedSequent = serde_json::from_str(&js).unwrap();
        assert_eq!(back, s);
    }
}
