//! Gentzen-style sequents and the rule systems for the constructive
//! conditional logics, their extensions, and classical CK.

mod check;
mod probe;
pub mod prove;
mod rules;

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::formula::{parse, Formula};

pub use check::{check_derivation, check_derivation_report, CheckError};
pub(crate) use rules::{conditional_instances, CondInstance};
pub use probe::{
    admissibility_probe, conservativity_probe, Conservativity, ProbeKind, ProbeReport,
};
pub use prove::{prove, prove_bounded, ProofResult, SearchBudget};
pub use rules::rule_instances;

/// The logics with a sequent-calculus presentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogicId {
    ConstCKBox,
    ConstCK,
    CCKID,
    CCKMP,
    CCKMPID,
    CCKCEM,
    ClassicalCK,
}

impl LogicId {
    pub const ALL: [LogicId; 7] = [
        LogicId::ConstCKBox,
        LogicId::ConstCK,
        LogicId::CCKID,
        LogicId::CCKMP,
        LogicId::CCKMPID,
        LogicId::CCKCEM,
        LogicId::ClassicalCK,
    ];

    /// Single-succedent calculi restrict `|Δ| <= 1`.
    pub fn single_succedent(self) -> bool {
        !matches!(self, LogicId::ClassicalCK)
    }

    /// The box-only logic is formulated in the might-free language.
    pub fn diamond_free_language(self) -> bool {
        matches!(self, LogicId::ConstCKBox)
    }

    pub fn name(self) -> &'static str {
        match self {
            LogicId::ConstCKBox => "ConstCK-box",
            LogicId::ConstCK => "ConstCK",
            LogicId::CCKID => "ConstCKID",
            LogicId::CCKMP => "ConstCKMP",
            LogicId::CCKMPID => "ConstCKMPID",
            LogicId::CCKCEM => "ConstCKCEM",
            LogicId::ClassicalCK => "CK",
        }
    }
}

impl fmt::Display for LogicId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// A pair of finite multisets of formulas. Both sides are kept sorted, so
/// equality and hashing are multiset equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sequent {
    ant: Vec<Formula>,
    suc: Vec<Formula>,
}

impl Sequent {
    pub fn new(mut ant: Vec<Formula>, mut suc: Vec<Formula>) -> Self {
        ant.sort();
        suc.sort();
        Sequent { ant, suc }
    }

    /// Single-succedent constructor; `suc = None` is the empty succedent.
    pub fn single(ant: Vec<Formula>, suc: Option<Formula>) -> Self {
        Sequent::new(ant, suc.into_iter().collect())
    }

    /// `=> f`
    pub fn goal(f: Formula) -> Self {
        Sequent::single(Vec::new(), Some(f))
    }

    pub fn ant(&self) -> &[Formula] {
        &self.ant
    }

    pub fn suc(&self) -> &[Formula] {
        &self.suc
    }

    pub fn is_single_succedent(&self) -> bool {
        self.suc.len() <= 1
    }

    pub fn is_diamond_free(&self) -> bool {
        self.ant.iter().chain(&self.suc).all(Formula::is_diamond_free)
    }

    /// Respects the succedent restriction and language of `logic`.
    pub fn legal_for(&self, logic: LogicId) -> bool {
        (!logic.single_succedent() || self.is_single_succedent())
            && (!logic.diamond_free_language() || self.is_diamond_free())
    }

    pub fn with_ant(&self, f: Formula) -> Sequent {
        let mut ant = self.ant.clone();
        ant.push(f);
        Sequent::new(ant, self.suc.clone())
    }

    /// Removes one occurrence of `f` from the antecedent.
    pub fn without_ant(&self, f: &Formula) -> Sequent {
        let mut ant = self.ant.clone();
        if let Some(i) = ant.iter().position(|g| g == f) {
            ant.remove(i);
        }
        Sequent { ant, suc: self.suc.clone() }
    }

    /// The two sequents abbreviated by `Γ <=> Δ`: here specialized to single
    /// formulas, which is the only use the conditional rules make of it.
    pub fn equivalence(l: &Formula, r: &Formula) -> [Sequent; 2] {
        [
            Sequent::single(vec![l.clone()], Some(r.clone())),
            Sequent::single(vec![r.clone()], Some(l.clone())),
        ]
    }

    /// Set-normalized copy (duplicates dropped on both sides), used as the
    /// loop-check key during search.
    pub(crate) fn normalized(&self) -> Sequent {
        let mut ant = self.ant.clone();
        let mut suc = self.suc.clone();
        ant.dedup();
        suc.dedup();
        Sequent { ant, suc }
    }

    /// Formula interpretation: `/\ant -> \/suc`, with the empty antecedent
    /// omitted and the empty succedent read as `false`.
    pub fn interpretation(&self) -> Formula {
        let suc = fold_or(&self.suc);
        match fold_and(&self.ant) {
            None => suc,
            Some(a) => crate::formula::imp(a, suc),
        }
    }
}

/// Right-nested conjunction of a canonically ordered list.
pub fn fold_and(fs: &[Formula]) -> Option<Formula> {
    let mut it = fs.iter().rev().cloned();
    let last = it.next()?;
    Some(it.fold(last, |acc, f| crate::formula::and(f, acc)))
}

/// Right-nested disjunction; the empty disjunction is `false`.
pub fn fold_or(fs: &[Formula]) -> Formula {
    let mut it = fs.iter().rev().cloned();
    match it.next() {
        None => Formula::Bot,
        Some(last) => it.fold(last, |acc, f| crate::formula::or(f, acc)),
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.ant.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        if self.ant.is_empty() {
            write!(f, "=>")?;
        } else {
            write!(f, " =>")?;
        }
        for (i, s) in self.suc.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, " {s}")?;
        }
        Ok(())
    }
}

/// Rule names across all the calculi. Which rules are available is decided
/// per [`LogicId`] by the instance enumerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeqRule {
    Init,
    BotL,
    AndL,
    AndR,
    OrL,
    OrR1,
    OrR2,
    /// Classical right disjunction rule (both disjuncts in one premise).
    OrR,
    ImpR,
    ImpL,
    /// Conditional right rule of the box-only and full constructive calculi.
    Cb,
    /// Might rule with a might succedent.
    Cd,
    /// Might rule with an unconstrained succedent and empty premise succedent.
    Cbd,
    CbId,
    CdId,
    CbdId,
    MpBox,
    MpDiam,
    CdCem,
    CbdCem,
    /// Classical right conditional rule (boxes and mights together).
    CkR,
    /// Classical left conditional rule.
    CkL,
}

impl SeqRule {
    pub fn name(self) -> &'static str {
        match self {
            SeqRule::Init => "init",
            SeqRule::BotL => "bot_l",
            SeqRule::AndL => "and_l",
            SeqRule::AndR => "and_r",
            SeqRule::OrL => "or_l",
            SeqRule::OrR1 => "or_r1",
            SeqRule::OrR2 => "or_r2",
            SeqRule::OrR => "or_r",
            SeqRule::ImpR => "imp_r",
            SeqRule::ImpL => "imp_l",
            SeqRule::Cb => "cb",
            SeqRule::Cd => "cd",
            SeqRule::Cbd => "cbd",
            SeqRule::CbId => "cb_id",
            SeqRule::CdId => "cd_id",
            SeqRule::CbdId => "cbd_id",
            SeqRule::MpBox => "mp_box",
            SeqRule::MpDiam => "mp_diam",
            SeqRule::CdCem => "cd_cem",
            SeqRule::CbdCem => "cbd_cem",
            SeqRule::CkR => "ck_r",
            SeqRule::CkL => "ck_l",
        }
    }
}

/// A rule-labeled derivation tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeqDerivation {
    pub conclusion: Sequent,
    pub rule: SeqRule,
    pub premises: Vec<SeqDerivation>,
}

impl SeqDerivation {
    pub fn leaf(conclusion: Sequent, rule: SeqRule) -> Self {
        SeqDerivation { conclusion, rule, premises: Vec::new() }
    }

    /// Length of the longest branch, minus one.
    pub fn height(&self) -> usize {
        self.premises.iter().map(|p| 1 + p.height()).max().unwrap_or(0)
    }

    pub fn node_count(&self) -> usize {
        1 + self.premises.iter().map(SeqDerivation::node_count).sum::<usize>()
    }
}

#[derive(Serialize, Deserialize)]
struct SequentRepr {
    ant: Vec<String>,
    suc: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct DerivationRepr {
    rule: SeqRule,
    sequent: SequentRepr,
    premises: Vec<DerivationRepr>,
}

impl Serialize for Sequent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SequentRepr {
            ant: self.ant.iter().map(|f| f.to_string()).collect(),
            suc: self.suc.iter().map(|f| f.to_string()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Sequent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = SequentRepr::deserialize(d)?;
        let ant = repr
            .ant
            .iter()
            .map(|t| parse(t))
            .collect::<Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        let suc = repr
            .suc
            .iter()
            .map(|t| parse(t))
            .collect::<Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        Ok(Sequent::new(ant, suc))
    }
}

impl From<&SeqDerivation> for DerivationRepr {
    fn from(d: &SeqDerivation) -> Self {
        DerivationRepr {
            rule: d.rule,
            sequent: SequentRepr {
                ant: d.conclusion.ant.iter().map(|f| f.to_string()).collect(),
                suc: d.conclusion.suc.iter().map(|f| f.to_string()).collect(),
            },
            premises: d.premises.iter().map(DerivationRepr::from).collect(),
        }
    }
}

impl Serialize for SeqDerivation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DerivationRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for SeqDerivation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        fn build<E: serde::de::Error>(repr: &DerivationRepr) -> Result<SeqDerivation, E> {
            let ant = repr
                .sequent
                .ant
                .iter()
                .map(|t| parse(t))
                .collect::<Result<Vec<_>, _>>()
                .map_err(E::custom)?;
            let suc = repr
                .sequent
                .suc
                .iter()
                .map(|t| parse(t))
                .collect::<Result<Vec<_>, _>>()
                .map_err(E::custom)?;
            Ok(SeqDerivation {
                conclusion: Sequent::new(ant, suc),
                rule: repr.rule,
                premises: repr
                    .premises
                    .iter()
                    .map(build)
                    .collect::<Result<Vec<_>, E>>()?,
            })
        }
        let repr = DerivationRepr::deserialize(d)?;
        build(&repr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{atom, imp};

    #[test]
    fn sequent_is_a_multiset() {
        let a = Sequent::new(vec![atom("q"), atom("p")], vec![atom("r")]);
        let b = Sequent::new(vec![atom("p"), atom("q")], vec![atom("r")]);
        assert_eq!(a, b);
        let c = Sequent::new(vec![atom("p"), atom("p")], vec![atom("r")]);
        assert_ne!(a, c);
        assert_eq!(c.normalized().ant().len(), 1);
    }

    #[test]
    fn interpretation_edge_cases() {
        let empty = Sequent::new(vec![], vec![]);
        assert_eq!(empty.interpretation(), Formula::Bot);
        let s = Sequent::single(vec![atom("p")], Some(atom("q")));
        assert_eq!(s.interpretation(), imp(atom("p"), atom("q")));
        let t = Sequent::single(vec![atom("p")], None);
        assert_eq!(t.interpretation(), imp(atom("p"), Formula::Bot));
    }

    #[test]
    fn derivation_json_round_trip() {
        let d = SeqDerivation::leaf(
            Sequent::single(vec![atom("p")], Some(atom("p"))),
            SeqRule::Init,
        );
        let js = serde_json::to_string(&d).unwrap();
        assert!(js.contains("\"rule\":\"init\""));
        let back: SeqDerivation = serde_json::from_str(&js).unwrap();
        assert_eq!(back, d);
    }
}
