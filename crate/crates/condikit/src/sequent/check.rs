//! Derivation checking against the rule schemas of a logic.

use std::fmt;

use super::{rule_instances, LogicId, SeqDerivation, Sequent};

/// Why a derivation failed to check; `path` indexes premises from the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckError {
    pub path: Vec<usize>,
    pub conclusion: Sequent,
    pub reason: String,
}

impl fmt::Display for CheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at premise path {:?}: `{}`: {}", self.path, self.conclusion, self.reason)
    }
}

/// True iff every node is a legal instance of its named rule in `logic`.
pub fn check_derivation(d: &SeqDerivation, logic: LogicId) -> bool {
    check_derivation_report(d, logic).is_ok()
}

/// As [`check_derivation`] but reports the first violation.
pub fn check_derivation_report(d: &SeqDerivation, logic: LogicId) -> Result<(), CheckError> {
    let mut path = Vec::new();
    check_node(d, logic, &mut path)
}

fn check_node(d: &SeqDerivation, logic: LogicId, path: &mut Vec<usize>) -> Result<(), CheckError> {
    let instances = rule_instances(&d.conclusion, logic).map_err(|e| CheckError {
        path: path.clone(),
        conclusion: d.conclusion.clone(),
        reason: e.to_string(),
    })?;
    let mut got: Vec<&Sequent> = d.premises.iter().map(|p| &p.conclusion).collect();
    got.sort();
    let matched = instances.iter().any(|(rule, premises)| {
        if *rule != d.rule || premises.len() != got.len() {
            return false;
        }
        let mut want: Vec<&Sequent> = premises.iter().collect();
        want.sort();
        want == got
    });
    if !matched {
        return Err(CheckError {
            path: path.clone(),
            conclusion: d.conclusion.clone(),
            reason: format!(
                "no `{}` instance of this conclusion has the given premises",
                d.rule.name()
            ),
        });
    }
    for (i, p) in d.premises.iter().enumerate() {
        path.push(i);
        check_node(p, logic, path)?;
        path.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{and, atom, cond_box, imp, parse};
    use crate::sequent::SeqRule;

    fn seq(ant: &[&str], suc: Option<&str>) -> Sequent {
        Sequent::single(
            ant.iter().map(|t| parse(t).unwrap()).collect(),
            suc.map(|t| parse(t).unwrap()),
        )
    }

    /// The derivation of `(p > q & r) -> (p > q) & (p > r)` transcribed from
    /// the calculus by hand.
    fn cm_box_derivation() -> SeqDerivation {
        let eq = SeqDerivation::leaf(seq(&["p"], Some("p")), SeqRule::Init);
        let left = SeqDerivation {
            conclusion: seq(&["p > q & r"], Some("p > q")),
            rule: SeqRule::Cb,
            premises: vec![
                eq.clone(),
                eq.clone(),
                SeqDerivation {
                    conclusion: seq(&["q & r"], Some("q")),
                    rule: SeqRule::AndL,
                    premises: vec![SeqDerivation::leaf(seq(&["q", "r"], Some("q")), SeqRule::Init)],
                },
            ],
        };
        let right = SeqDerivation {
            conclusion: seq(&["p > q & r"], Some("p > r")),
            rule: SeqRule::Cb,
            premises: vec![
                eq.clone(),
                eq,
                SeqDerivation {
                    conclusion: seq(&["q & r"], Some("r")),
                    rule: SeqRule::AndL,
                    premises: vec![SeqDerivation::leaf(seq(&["q", "r"], Some("r")), SeqRule::Init)],
                },
            ],
        };
        let pair = SeqDerivation {
            conclusion: seq(&["p > q & r"], Some("(p > q) & (p > r)")),
            rule: SeqRule::AndR,
            premises: vec![left, right],
        };
        SeqDerivation {
            conclusion: seq(&[], Some("(p > q & r) -> (p > q) & (p > r)")),
            rule: SeqRule::ImpR,
            premises: vec![pair],
        }
    }

    #[test]
    fn transcribed_cm_box_checks() {
        let d = cm_box_derivation();
        assert!(check_derivation(&d, LogicId::ConstCK));
        assert!(check_derivation(&d, LogicId::ConstCKBox));
    }

    #[test]
    fn arity_mismatch_is_rejected() {
        let mut d = cm_box_derivation();
        d.premises[0].premises[0].premises.pop();
        let err = check_derivation_report(&d, LogicId::ConstCK).unwrap_err();
        assert_eq!(err.path, vec![0, 0]);
    }

    #[test]
    fn rule_not_in_system_is_rejected() {
        // A might rule checked under the box-only calculus.
        let d = SeqDerivation {
            conclusion: seq(&["p ?> false"], Some("false")),
            rule: SeqRule::Cbd,
            premises: vec![SeqDerivation::leaf(seq(&["false"], None), SeqRule::BotL)],
        };
        assert!(check_derivation(&d, LogicId::ConstCK));
        assert!(!check_derivation(&d, LogicId::ConstCKBox));
        assert!(!check_derivation(&d, LogicId::CCKCEM));
    }

    #[test]
    fn wrong_premise_content_is_rejected() {
        let bad = SeqDerivation {
            conclusion: Sequent::goal(imp(and(atom("p"), atom("q")), atom("p"))),
            rule: SeqRule::ImpR,
            premises: vec![SeqDerivation::leaf(
                Sequent::single(vec![atom("p")], Some(atom("p"))),
                SeqRule::Init,
            )],
        };
        assert!(!check_derivation(&bad, LogicId::ConstCK));
        let _ = cond_box(atom("p"), atom("q"));
    }
}
