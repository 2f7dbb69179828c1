//! Positional checking of nested derivations.

use std::fmt;

use super::{premises_of, NestedDerivation, NestedRule, NestedSequent, Path};

/// Which rules a derivation may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleSet {
    /// The calculus rules only: a proper proof.
    Calculus,
    /// Calculus plus cut.
    WithCut,
    /// Calculus plus cut and index replacement.
    WithCutRep,
    /// Everything, including the admissible structural rules.
    All,
}

impl RuleSet {
    fn allows(self, rule: &NestedRule) -> bool {
        match rule {
            NestedRule::Cut { .. } => {
                matches!(self, RuleSet::WithCut | RuleSet::WithCutRep | RuleSet::All)
            }
            NestedRule::Rep { .. } => matches!(self, RuleSet::WithCutRep | RuleSet::All),
            r if r.is_structural() => matches!(self, RuleSet::All),
            _ => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NestedCheckError {
    pub at: Path,
    pub conclusion: String,
    pub reason: String,
}

impl fmt::Display for NestedCheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at premise path {:?}: `{}`: {}", self.at, self.conclusion, self.reason)
    }
}

pub fn check_nested(d: &NestedDerivation, rules: RuleSet) -> bool {
    check_nested_report(d, rules).is_ok()
}

pub fn check_nested_report(d: &NestedDerivation, rules: RuleSet) -> Result<(), NestedCheckError> {
    check_node(d, rules, &mut Vec::new())
}

fn check_node(
    d: &NestedDerivation,
    rules: RuleSet,
    at: &mut Path,
) -> Result<(), NestedCheckError> {
    let fail = |reason: String| NestedCheckError {
        at: at.clone(),
        conclusion: d.conclusion.to_string(),
        reason,
    };
    if !rules.allows(&d.rule) {
        return Err(fail(format!("rule {} is not allowed here", d.rule.name())));
    }
    // Every node in a derivation is a nested sequent except the two
    // top-level equivalence premises, whose shape premises_of dictates.
    let expected = premises_of(&d.conclusion, &d.rule).map_err(|e| fail(e.to_string()))?;
    if expected.len() != d.premises.len() {
        return Err(fail(format!(
            "rule {} expects {} premises, got {}",
            d.rule.name(),
            expected.len(),
            d.premises.len()
        )));
    }
    for (i, (want, got)) in expected.iter().zip(&d.premises).enumerate() {
        if !want.same_multiset(&got.conclusion) {
            return Err(fail(format!(
                "premise {} should be `{want}`, got `{}`",
                i + 1,
                got.conclusion
            )));
        }
    }
    for (i, p) in d.premises.iter().enumerate() {
        at.push(i);
        check_node(p, rules, at)?;
        at.pop();
    }
    Ok(())
}

/// Convenience for transformation code: reject non-multiset-equal premise
/// wiring early in debug builds.
pub(crate) fn debug_check_step(conclusion: &NestedSequent, rule: &NestedRule, premises: &[&NestedSequent]) {
    if cfg!(debug_assertions) {
        let expected = premises_of(conclusion, rule)
            .unwrap_or_else(|e| panic!("bad step {} on `{conclusion}`: {e}", rule.name()));
        assert_eq!(expected.len(), premises.len(), "arity of {}", rule.name());
        for (want, got) in expected.iter().zip(premises) {
            assert!(
                want.same_multiset(got),
                "step {} on `{conclusion}`: premise should be `{want}`, got `{got}`",
                rule.name()
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{atom, imp, Polarity};
    use crate::nested::NestedSequent;

    #[test]
    fn checks_a_small_proof() {
        // p -> p
        let goal = NestedSequent::goal(imp(atom("p"), atom("p")));
        let mid = NestedSequent::from_parts(
            vec![(atom("p"), Polarity::In), (atom("p"), Polarity::Out)],
            vec![],
        );
        let d = NestedDerivation {
            conclusion: goal,
            rule: NestedRule::ImpOut { path: vec![], main: imp(atom("p"), atom("p")) },
            premises: vec![NestedDerivation::leaf(mid, NestedRule::Init { path: vec![] })],
        };
        assert!(check_nested(&d, RuleSet::Calculus));
    }

    #[test]
    fn rejects_wrong_premises() {
        let goal = NestedSequent::goal(imp(atom("p"), atom("q")));
        let bad = NestedSequent::from_parts(
            vec![(atom("p"), Polarity::In), (atom("p"), Polarity::Out)],
            vec![],
        );
        let d = NestedDerivation {
            conclusion: goal,
            rule: NestedRule::ImpOut { path: vec![], main: imp(atom("p"), atom("q")) },
            premises: vec![NestedDerivation::leaf(bad, NestedRule::Init { path: vec![] })],
        };
        assert!(!check_nested(&d, RuleSet::Calculus));
    }

    #[test]
    fn rule_set_gates_cut() {
        let p = atom("p");
        let left = NestedSequent::goal(p.clone());
        let d = NestedDerivation {
            conclusion: NestedSequent::goal(p.clone()),
            rule: NestedRule::Cut { path: vec![], formula: p.clone() },
            premises: vec![
                NestedDerivation::leaf(left.clone(), NestedRule::Init { path: vec![] }),
                NestedDerivation::leaf(
                    NestedSequent::from_parts(
                        vec![(p.clone(), Polarity::In), (p, Polarity::Out)],
                        vec![],
                    ),
                    NestedRule::Init { path: vec![] },
                ),
            ],
        };
        // Shape-wise the cut is fine (its first premise is not derivable,
        // but the leaf rule there is bogus, so full checking fails for a
        // different reason too). Here only the gating is under test.
        assert!(!check_nested(&d, RuleSet::Calculus));
    }
}
