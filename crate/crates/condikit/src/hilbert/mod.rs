//! Axiomatic systems: schemas, line-checked proofs, derived-rule macros, the
//! sequent-to-Hilbert compiler and the modal embedding.

mod build;
mod compile;
mod macros;
mod modal;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::Formula;
use crate::sequent::LogicId;

pub use build::{Builder, Ref};
pub use compile::{compile_to_hilbert, CompileError};
pub use macros::{macro_expand, MacroInstantiation, MacroRule, UnboundMetavariable};
pub use modal::{modal_translate, parse_modal, ModalFormula};

/// Axiom schemas across all systems; which are available is decided per
/// [`HilbertSystem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxiomId {
    CmBox,
    CcBox,
    CnBox,
    CmDiam,
    CcDiam,
    CnDiam,
    Cw,
    Cfs,
    CkDiam,
    DefDiam,
    IdBox,
    MpBox,
    MpDiam,
    CemBox,
    CemDiam,
    Ipl1,
    Ipl2,
    Ipl3,
    Ipl4,
    Ipl5,
    Ipl6,
    Ipl7,
    Ipl8,
    Ipl9,
    Ipl10,
    /// Double negation elimination; together with the IPL schemas this is the
    /// classical propositional base.
    Dne,
}

/// Inference rules of the axiomatic systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HRule {
    /// From `a` and `a -> b`, infer `b`; premises `[a, a -> b]`.
    Mp,
    /// From `a <-> b`, infer `(a > c) <-> (b > c)`.
    RaBox,
    /// From `b <-> c`, infer `(a > b) <-> (a > c)`.
    RcBox,
    /// From `a <-> b`, infer `(a ?> c) <-> (b ?> c)`.
    RaDiam,
    /// From `b <-> c`, infer `(a ?> b) <-> (a ?> c)`.
    RcDiam,
}

impl HRule {
    pub fn name(self) -> &'static str {
        match self {
            HRule::Mp => "mp",
            HRule::RaBox => "ra_box",
            HRule::RcBox => "rc_box",
            HRule::RaDiam => "ra_diam",
            HRule::RcDiam => "rc_diam",
        }
    }
}

/// The systems `check_hilbert` understands: the sequent logics plus the
/// intuitionistic conditional logic of the nested calculus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HilbertSystem {
    ConstCKBox,
    ConstCK,
    CCKID,
    CCKMP,
    CCKMPID,
    CCKCEM,
    IntCK,
    ClassicalCK,
}

impl From<LogicId> for HilbertSystem {
    fn from(l: LogicId) -> Self {
        match l {
            LogicId::ConstCKBox => HilbertSystem::ConstCKBox,
            LogicId::ConstCK => HilbertSystem::ConstCK,
            LogicId::CCKID => HilbertSystem::CCKID,
            LogicId::CCKMP => HilbertSystem::CCKMP,
            LogicId::CCKMPID => HilbertSystem::CCKMPID,
            LogicId::CCKCEM => HilbertSystem::CCKCEM,
            LogicId::ClassicalCK => HilbertSystem::ClassicalCK,
        }
    }
}

const IPL: [AxiomId; 10] = [
    AxiomId::Ipl1,
    AxiomId::Ipl2,
    AxiomId::Ipl3,
    AxiomId::Ipl4,
    AxiomId::Ipl5,
    AxiomId::Ipl6,
    AxiomId::Ipl7,
    AxiomId::Ipl8,
    AxiomId::Ipl9,
    AxiomId::Ipl10,
];

impl HilbertSystem {
    pub fn name(self) -> &'static str {
        match self {
            HilbertSystem::ConstCKBox => "ConstCK-box",
            HilbertSystem::ConstCK => "ConstCK",
            HilbertSystem::CCKID => "ConstCKID",
            HilbertSystem::CCKMP => "ConstCKMP",
            HilbertSystem::CCKMPID => "ConstCKMPID",
            HilbertSystem::CCKCEM => "ConstCKCEM",
            HilbertSystem::IntCK => "IntCK",
            HilbertSystem::ClassicalCK => "CK",
        }
    }

    /// The axiom schemas of the system on top of the propositional base.
    pub fn conditional_axioms(self) -> &'static [AxiomId] {
        use AxiomId::*;
        match self {
            HilbertSystem::ConstCKBox => &[CmBox, CcBox, CnBox],
            HilbertSystem::ConstCK => &[CmBox, CcBox, CnBox, CnDiam, CkDiam],
            HilbertSystem::CCKID => &[CmBox, CcBox, CnBox, CnDiam, CkDiam, IdBox],
            HilbertSystem::CCKMP => &[CmBox, CcBox, CnBox, CnDiam, CkDiam, MpBox, MpDiam],
            HilbertSystem::CCKMPID => {
                &[CmBox, CcBox, CnBox, CnDiam, CkDiam, IdBox, MpBox, MpDiam]
            }
            HilbertSystem::CCKCEM => &[CmBox, CcBox, CnBox, CnDiam, CkDiam, CemDiam],
            HilbertSystem::IntCK => &[CmBox, CmDiam, CcBox, CcDiam, CnBox, CnDiam, Cw, Cfs],
            HilbertSystem::ClassicalCK => &[CmBox, CcBox, CnBox, DefDiam],
        }
    }

    pub fn has_axiom(self, id: AxiomId) -> bool {
        if IPL.contains(&id) {
            return true;
        }
        if id == AxiomId::Dne {
            return self == HilbertSystem::ClassicalCK;
        }
        self.conditional_axioms().contains(&id)
    }

    pub fn has_rule(self, rule: HRule) -> bool {
        match rule {
            HRule::Mp | HRule::RaBox | HRule::RcBox => true,
            HRule::RaDiam | HRule::RcDiam => !matches!(
                self,
                HilbertSystem::ConstCKBox | HilbertSystem::ClassicalCK
            ),
        }
    }

    pub fn diamond_free_language(self) -> bool {
        self == HilbertSystem::ConstCKBox
    }
}

impl fmt::Display for HilbertSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

// --- schema matching -----------------------------------------------------

/// Schema patterns over metavariables `0..4` (displayed a, b, c, d).
#[derive(Debug, Clone)]
enum Pat {
    V(u8),
    Bot,
    And(Box<Pat>, Box<Pat>),
    Or(Box<Pat>, Box<Pat>),
    Imp(Box<Pat>, Box<Pat>),
    CBox(Box<Pat>, Box<Pat>),
    CDiam(Box<Pat>, Box<Pat>),
}

fn v(i: u8) -> Pat {
    Pat::V(i)
}
fn pand(l: Pat, r: Pat) -> Pat {
    Pat::And(Box::new(l), Box::new(r))
}
fn por(l: Pat, r: Pat) -> Pat {
    Pat::Or(Box::new(l), Box::new(r))
}
fn pimp(l: Pat, r: Pat) -> Pat {
    Pat::Imp(Box::new(l), Box::new(r))
}
fn pbox(l: Pat, r: Pat) -> Pat {
    Pat::CBox(Box::new(l), Box::new(r))
}
fn pdiam(l: Pat, r: Pat) -> Pat {
    Pat::CDiam(Box::new(l), Box::new(r))
}
fn pneg(p: Pat) -> Pat {
    pimp(p, Pat::Bot)
}
fn ptop() -> Pat {
    pimp(Pat::Bot, Pat::Bot)
}
fn piff(l: Pat, r: Pat) -> Pat {
    pand(pimp(l.clone(), r.clone()), pimp(r, l))
}

impl AxiomId {
    fn pattern(self) -> Pat {
        let (a, b, c) = (v(0), v(1), v(2));
        match self {
            AxiomId::CmBox => pimp(
                pbox(a.clone(), pand(b.clone(), c.clone())),
                pand(pbox(a.clone(), b), pbox(a, c)),
            ),
            AxiomId::CcBox => pimp(
                pand(pbox(a.clone(), b.clone()), pbox(a.clone(), c.clone())),
                pbox(a, pand(b, c)),
            ),
            AxiomId::CnBox => pbox(a, ptop()),
            AxiomId::CmDiam => pimp(
                por(pdiam(a.clone(), b.clone()), pdiam(a.clone(), c.clone())),
                pdiam(a, por(b, c)),
            ),
            AxiomId::CcDiam => pimp(
                pdiam(a.clone(), por(b.clone(), c.clone())),
                por(pdiam(a.clone(), b), pdiam(a, c)),
            ),
            AxiomId::CnDiam => pneg(pdiam(a, Pat::Bot)),
            AxiomId::Cw => pimp(
                pand(pdiam(a.clone(), b.clone()), pbox(a.clone(), c.clone())),
                pdiam(a, pand(b, c)),
            ),
            AxiomId::Cfs => pimp(
                pimp(pdiam(a.clone(), b.clone()), pbox(a.clone(), c.clone())),
                pbox(a, pimp(b, c)),
            ),
            AxiomId::CkDiam => pimp(
                pbox(a.clone(), pimp(b.clone(), c.clone())),
                pimp(pdiam(a.clone(), b), pdiam(a, c)),
            ),
            AxiomId::DefDiam => piff(pdiam(a.clone(), b.clone()), pneg(pbox(a, pneg(b)))),
            AxiomId::IdBox => pbox(a.clone(), a),
            AxiomId::MpBox => pimp(pbox(a.clone(), b.clone()), pimp(a, b)),
            AxiomId::MpDiam => pimp(pand(a.clone(), b.clone()), pdiam(a, b)),
            AxiomId::CemBox => por(pbox(a.clone(), b.clone()), pbox(a, pneg(b))),
            AxiomId::CemDiam => pimp(
                pand(pdiam(a.clone(), b.clone()), pdiam(a.clone(), c.clone())),
                pdiam(a, pand(b, c)),
            ),
            AxiomId::Ipl1 => pimp(a.clone(), pimp(b, a)),
            AxiomId::Ipl2 => pimp(
                pimp(a.clone(), pimp(b.clone(), c.clone())),
                pimp(pimp(a.clone(), b), pimp(a, c)),
            ),
            AxiomId::Ipl3 => pimp(pand(a.clone(), b), a),
            AxiomId::Ipl4 => pimp(pand(a, b.clone()), b),
            AxiomId::Ipl5 => pimp(a.clone(), pimp(b.clone(), pand(a, b))),
            AxiomId::Ipl6 => pimp(a.clone(), por(a, b)),
            AxiomId::Ipl7 => pimp(b.clone(), por(a, b)),
            AxiomId::Ipl8 => pimp(
                pimp(a.clone(), c.clone()),
                pimp(pimp(b.clone(), c.clone()), pimp(por(a, b), c)),
            ),
            AxiomId::Ipl9 => pimp(Pat::Bot, a),
            AxiomId::Ipl10 => pimp(pand(pimp(a.clone(), b.clone()), pimp(b, c.clone())), pimp(a, c)),
            AxiomId::Dne => pimp(pneg(pneg(a.clone())), a),
        }
    }

    /// True iff `f` is an instance of the schema.
    pub fn matches(self, f: &Formula) -> bool {
        let mut binding: [Option<&Formula>; 4] = [None, None, None, None];
        match_pat(&self.pattern(), f, &mut binding)
    }

    pub fn name(self) -> &'static str {
        match self {
            AxiomId::CmBox => "CM-box",
            AxiomId::CcBox => "CC-box",
            AxiomId::CnBox => "CN-box",
            AxiomId::CmDiam => "CM-might",
            AxiomId::CcDiam => "CC-might",
            AxiomId::CnDiam => "CN-might",
            AxiomId::Cw => "CW",
            AxiomId::Cfs => "CFS",
            AxiomId::CkDiam => "CK-might",
            AxiomId::DefDiam => "def-might",
            AxiomId::IdBox => "ID-box",
            AxiomId::MpBox => "MP-box",
            AxiomId::MpDiam => "MP-might",
            AxiomId::CemBox => "CEM-box",
            AxiomId::CemDiam => "CEM-might",
            AxiomId::Ipl1 => "IPL1",
            AxiomId::Ipl2 => "IPL2",
            AxiomId::Ipl3 => "IPL3",
            AxiomId::Ipl4 => "IPL4",
            AxiomId::Ipl5 => "IPL5",
            AxiomId::Ipl6 => "IPL6",
            AxiomId::Ipl7 => "IPL7",
            AxiomId::Ipl8 => "IPL8",
            AxiomId::Ipl9 => "IPL9",
            AxiomId::Ipl10 => "IPL10",
            AxiomId::Dne => "DNE",
        }
    }
}

fn match_pat<'a>(pat: &Pat, f: &'a Formula, binding: &mut [Option<&'a Formula>; 4]) -> bool {
    match (pat, f) {
        (Pat::V(i), _) => match binding[*i as usize] {
            Some(bound) => bound == f,
            None => {
                binding[*i as usize] = Some(f);
                true
            }
        },
        (Pat::Bot, Formula::Bot) => true,
        (Pat::And(pl, pr), Formula::And(l, r))
        | (Pat::Or(pl, pr), Formula::Or(l, r))
        | (Pat::Imp(pl, pr), Formula::Imp(l, r))
        | (Pat::CBox(pl, pr), Formula::CondBox(l, r))
        | (Pat::CDiam(pl, pr), Formula::CondDiam(l, r)) => {
            match_pat(pl, l, binding) && match_pat(pr, r, binding)
        }
        _ => false,
    }
}

// --- proofs and the checker ----------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Justification {
    Hypothesis,
    Axiom(AxiomId),
    Rule { rule: HRule, premises: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertLine {
    pub formula: Formula,
    pub just: Justification,
}

/// A sequence of justified formulas; hypothesis lines make it a proof *from*
/// those premises.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HilbertProof {
    pub lines: Vec<HilbertLine>,
}

impl HilbertProof {
    pub fn conclusion(&self) -> Option<&Formula> {
        self.lines.last().map(|l| &l.formula)
    }

    pub fn hypotheses(&self) -> impl Iterator<Item = &Formula> {
        self.lines
            .iter()
            .filter(|l| l.just == Justification::Hypothesis)
            .map(|l| &l.formula)
    }

    /// Appendix-style text rendering: formula, right-aligned justification.
    pub fn render_text(&self) -> String {
        let texts: Vec<String> = self.lines.iter().map(|l| l.formula.to_string()).collect();
        let width = texts.iter().map(String::len).max().unwrap_or(0).min(78);
        let mut out = String::new();
        for (i, line) in self.lines.iter().enumerate() {
            let just = match &line.just {
                Justification::Hypothesis => "hypothesis".to_owned(),
                Justification::Axiom(a) => a.name().to_owned(),
                Justification::Rule { rule, premises } => {
                    let ps: Vec<String> = premises.iter().map(|p| (p + 1).to_string()).collect();
                    format!("{} {}", rule.name(), ps.join(","))
                }
            };
            out.push_str(&format!("{:>3}. {:<width$}  [{}]\n", i + 1, texts[i], just));
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct LineRepr {
    formula: String,
    just: Justification,
}

impl Serialize for HilbertProof {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let lines: Vec<LineRepr> = self
            .lines
            .iter()
            .map(|l| LineRepr { formula: l.formula.to_string(), just: l.just.clone() })
            .collect();
        lines.serialize(s)
    }
}

impl<'de> Deserialize<'de> for HilbertProof {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let lines = Vec::<LineRepr>::deserialize(d)?;
        Ok(HilbertProof {
            lines: lines
                .into_iter()
                .map(|l| {
                    Ok(HilbertLine {
                        formula: crate::formula::parse(&l.formula).map_err(D::Error::custom)?,
                        just: l.just,
                    })
                })
                .collect::<Result<_, D::Error>>()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {reason}")]
pub struct HilbertError {
    /// 0-based index of the offending line.
    pub line: usize,
    pub reason: String,
}

/// True iff every line is justified under the system's schema set.
pub fn check_hilbert(proof: &HilbertProof, system: HilbertSystem) -> bool {
    check_hilbert_report(proof, system).is_ok()
}

pub fn check_hilbert_report(proof: &HilbertProof, system: HilbertSystem) -> Result<(), HilbertError> {
    for (i, line) in proof.lines.iter().enumerate() {
        let fail = |reason: String| Err(HilbertError { line: i, reason });
        if system.diamond_free_language() && !line.formula.is_diamond_free() {
            return fail(format!("`{}` is not in the might-free language", line.formula));
        }
        match &line.just {
            Justification::Hypothesis => {}
            Justification::Axiom(id) => {
                if !system.has_axiom(*id) {
                    return fail(format!("axiom {} is not in {}", id.name(), system));
                }
                if !id.matches(&line.formula) {
                    return fail(format!(
                        "`{}` is not an instance of {}",
                        line.formula,
                        id.name()
                    ));
                }
            }
            Justification::Rule { rule, premises } => {
                if !system.has_rule(*rule) {
                    return fail(format!("rule {} is not in {}", rule.name(), system));
                }
                for p in premises {
                    if *p >= i {
                        return fail(format!("premise {} does not precede line {}", p + 1, i + 1));
                    }
                }
                let prem = |k: usize| &proof.lines[premises[k]].formula;
                let ok = match rule {
                    HRule::Mp => {
                        premises.len() == 2
                            && *prem(1)
                                == crate::formula::imp(prem(0).clone(), line.formula.clone())
                    }
                    HRule::RaBox | HRule::RaDiam | HRule::RcBox | HRule::RcDiam => {
                        premises.len() == 1 && check_cond_rule(*rule, prem(0), &line.formula)
                    }
                };
                if !ok {
                    return fail(format!(
                        "`{}` is not a {} consequence of its premises",
                        line.formula,
                        rule.name()
                    ));
                }
            }
        }
    }
    Ok(())
}

/// The equivalence-congruence rules: premise `x <-> y`, conclusion the
/// congruence at the antecedent or consequent position of a conditional.
pub(crate) fn check_cond_rule(rule: HRule, premise: &Formula, conclusion: &Formula) -> bool {
    use crate::formula::{cond_box, cond_diam, iff};
    let Formula::And(l, _) = premise else { return false };
    let Formula::Imp(x, y) = &**l else { return false };
    if *premise != iff((**x).clone(), (**y).clone()) {
        return false;
    }
    let (x, y) = ((**x).clone(), (**y).clone());
    match conclusion {
        Formula::And(first, _) => {
            let Formula::Imp(lhs, _) = &**first else { return false };
            let expected = match (rule, &**lhs) {
                (HRule::RaBox, Formula::CondBox(_, z)) => {
                    iff(cond_box(x, (**z).clone()), cond_box(y, (**z).clone()))
                }
                (HRule::RaDiam, Formula::CondDiam(_, z)) => {
                    iff(cond_diam(x, (**z).clone()), cond_diam(y, (**z).clone()))
                }
                (HRule::RcBox, Formula::CondBox(a, _)) => {
                    iff(cond_box((**a).clone(), x), cond_box((**a).clone(), y))
                }
                (HRule::RcDiam, Formula::CondDiam(a, _)) => {
                    iff(cond_diam((**a).clone(), x), cond_diam((**a).clone(), y))
                }
                _ => return false,
            };
            *conclusion == expected
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{atom, cond_box, cond_diam, iff, imp, neg, parse};

    #[test]
    fn schema_matching() {
        assert!(AxiomId::CnBox.matches(&parse("p > true").unwrap()));
        assert!(!AxiomId::CnBox.matches(&parse("p > q").unwrap()));
        assert!(AxiomId::IdBox.matches(&parse("(p & q) > (p & q)").unwrap()));
        assert!(!AxiomId::IdBox.matches(&parse("p > q").unwrap()));
        assert!(AxiomId::DefDiam.matches(&parse("(p ?> q) <-> ~(p > ~q)").unwrap()));
        assert!(AxiomId::CmBox.matches(&parse("(p > q & r) -> (p > q) & (p > r)").unwrap()));
        assert!(!AxiomId::CmBox.matches(&parse("(p > q & r) -> (p > r) & (p > q)").unwrap()));
    }

    #[test]
    fn checker_accepts_a_small_proof() {
        // CN-might instantiated, then weakened through IPL1.
        let ax = neg(cond_diam(atom("p"), Formula::Bot));
        let proof = HilbertProof {
            lines: vec![
                HilbertLine { formula: ax.clone(), just: Justification::Axiom(AxiomId::CnDiam) },
                HilbertLine {
                    formula: imp(ax.clone(), imp(atom("q"), ax.clone())),
                    just: Justification::Axiom(AxiomId::Ipl1),
                },
                HilbertLine {
                    formula: imp(atom("q"), ax),
                    just: Justification::Rule { rule: HRule::Mp, premises: vec![0, 1] },
                },
            ],
        };
        assert!(check_hilbert(&proof, HilbertSystem::ConstCK));
        // CN-might is not available in the box-only system.
        assert!(!check_hilbert(&proof, HilbertSystem::ConstCKBox));
    }

    #[test]
    fn def_diam_is_classical_only() {
        let proof = HilbertProof {
            lines: vec![HilbertLine {
                formula: parse("(p ?> q) <-> ~(p > ~q)").unwrap(),
                just: Justification::Axiom(AxiomId::DefDiam),
            }],
        };
        assert!(check_hilbert(&proof, HilbertSystem::ClassicalCK));
        assert!(!check_hilbert(&proof, HilbertSystem::ConstCK));
    }

    #[test]
    fn congruence_rules_check() {
        let premise = iff(atom("p"), atom("q"));
        let conc = iff(cond_box(atom("p"), atom("r")), cond_box(atom("q"), atom("r")));
        assert!(check_cond_rule(HRule::RaBox, &premise, &conc));
        assert!(!check_cond_rule(HRule::RcBox, &premise, &conc));
        let conc = iff(cond_diam(atom("s"), atom("p")), cond_diam(atom("s"), atom("q")));
        assert!(check_cond_rule(HRule::RcDiam, &premise, &conc));
    }

    #[test]
    fn proof_json_round_trip() {
        let proof = HilbertProof {
            lines: vec![HilbertLine {
                formula: parse("p > true").unwrap(),
                just: Justification::Axiom(AxiomId::CnBox),
            }],
        };
        let js = serde_json::to_string(&proof).unwrap();
        let back: HilbertProof = serde_json::from_str(&js).unwrap();
        assert_eq!(back, proof);
        assert!(proof.render_text().contains("CN-box"));
    }
}
