//! Property harnesses for the admissible structural rules and for
//! conservativity of the full calculus over the box-only one.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::formula::{random_formula_with, Formula};

use super::{prove, prove_bounded, LogicId, ProofResult, SearchBudget, Sequent};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeKind {
    Weakening,
    Contraction,
    Cut,
}

impl ProbeKind {
    pub fn name(self) -> &'static str {
        match self {
            ProbeKind::Weakening => "weakening",
            ProbeKind::Contraction => "contraction",
            ProbeKind::Cut => "cut",
        }
    }
}

/// Outcome of one admissibility probe run.
#[derive(Debug, Clone)]
pub struct ProbeReport {
    pub kind: ProbeKind,
    pub logic: LogicId,
    /// Trials with a successfully synthesized provable premise.
    pub trials: usize,
    /// Sampling attempts spent to reach `trials`.
    pub attempts: usize,
    /// Conclusions the prover refuted; must stay empty.
    pub counterexamples: Vec<String>,
    /// Conclusions provable but not within the premise height
    /// (weakening/contraction only); must stay empty.
    pub height_violations: Vec<String>,
    /// Trials abandoned on a budget verdict.
    pub inconclusive: usize,
}

impl ProbeReport {
    pub fn ok(&self) -> bool {
        self.counterexamples.is_empty() && self.height_violations.is_empty()
    }
}

fn random_small_formula(rng: &mut ChaCha8Rng, logic: LogicId) -> Formula {
    random_formula_with(rng, 2, 2, !logic.diamond_free_language())
}

/// A sequent with a decent chance of being provable: a couple of context
/// formulas plus a succedent that often reuses antecedent material.
fn random_candidate(rng: &mut ChaCha8Rng, logic: LogicId) -> Sequent {
    let n = rng.gen_range(0..=2);
    let mut ant: Vec<Formula> = (0..n).map(|_| random_small_formula(rng, logic)).collect();
    let suc = match rng.gen_range(0..4) {
        0 if !ant.is_empty() => Some(ant[rng.gen_range(0..ant.len())].clone()),
        1 => {
            let f = random_small_formula(rng, logic);
            ant.push(f.clone());
            Some(crate::formula::or(f, random_small_formula(rng, logic)))
        }
        2 => Some(crate::formula::imp(
            random_small_formula(rng, logic),
            random_small_formula(rng, logic),
        )),
        _ => Some(random_small_formula(rng, logic)),
    };
    Sequent::single(ant, suc)
}

/// Synthesizes provable premises of the structural rule `kind`, forms the
/// rule's conclusion and re-proves it.
pub fn admissibility_probe(
    kind: ProbeKind,
    logic: LogicId,
    trials: usize,
    seed: u64,
) -> ProbeReport {
    assert!(trials >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ProbeReport {
        kind,
        logic,
        trials: 0,
        attempts: 0,
        counterexamples: Vec::new(),
        height_violations: Vec::new(),
        inconclusive: 0,
    };
    let budget = SearchBudget::default();
    let max_attempts = trials * 400;

    while report.trials < trials && report.attempts < max_attempts {
        report.attempts += 1;
        match kind {
            ProbeKind::Weakening => {
                let premise = random_candidate(&mut rng, logic);
                let Ok(ProofResult::Proved(d)) = prove(&premise, logic, budget) else {
                    continue;
                };
                report.trials += 1;
                let conclusion = premise.with_ant(random_small_formula(&mut rng, logic));
                check_hp(&conclusion, d.height(), logic, budget, &mut report);
            }
            ProbeKind::Contraction => {
                let base = random_candidate(&mut rng, logic);
                let dup = random_small_formula(&mut rng, logic);
                let premise = base.with_ant(dup.clone()).with_ant(dup.clone());
                let Ok(ProofResult::Proved(d)) = prove(&premise, logic, budget) else {
                    continue;
                };
                report.trials += 1;
                let conclusion = base.with_ant(dup);
                check_hp(&conclusion, d.height(), logic, budget, &mut report);
            }
            ProbeKind::Cut => {
                let cut_formula = random_small_formula(&mut rng, logic);
                let left_ctx = random_candidate(&mut rng, logic);
                let left = Sequent::new(left_ctx.ant().to_vec(), vec![cut_formula.clone()]);
                if !matches!(prove(&left, logic, budget), Ok(ProofResult::Proved(_))) {
                    continue;
                }
                let right_base = random_candidate(&mut rng, logic);
                let right = right_base.with_ant(cut_formula);
                if !matches!(prove(&right, logic, budget), Ok(ProofResult::Proved(_))) {
                    continue;
                }
                report.trials += 1;
                let mut ant = left.ant().to_vec();
                ant.extend(right_base.ant().iter().cloned());
                let conclusion = Sequent::new(ant, right_base.suc().to_vec());
                match prove(&conclusion, logic, budget) {
                    Ok(ProofResult::Proved(_)) => {}
                    Ok(ProofResult::Refuted) => report.counterexamples.push(conclusion.to_string()),
                    _ => report.inconclusive += 1,
                }
            }
        }
    }
    report
}

fn check_hp(
    conclusion: &Sequent,
    height: usize,
    logic: LogicId,
    budget: SearchBudget,
    report: &mut ProbeReport,
) {
    let capped = SearchBudget::new(height, budget.nodes);
    match prove_bounded(conclusion, logic, capped, true) {
        Ok(ProofResult::Proved(_)) => return,
        Ok(_) => {}
        Err(_) => unreachable!("probe conclusions are legal for the logic"),
    }
    match prove(conclusion, logic, budget) {
        Ok(ProofResult::Proved(_)) => report.height_violations.push(conclusion.to_string()),
        Ok(ProofResult::Refuted) => report.counterexamples.push(conclusion.to_string()),
        _ => report.inconclusive += 1,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conservativity {
    /// Both calculi returned the same definite verdict.
    Agree { proved: bool },
    /// Definite verdicts that differ; falsifies the conservativity theorem.
    Disagree,
    /// A budget verdict on at least one side.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("conservativity probe requires a might-free formula, got `{0}`")]
pub struct NotDiamondFree(pub String);

/// Compares the verdicts of the full and the box-only calculus on a
/// might-free formula.
pub fn conservativity_probe(
    f: &Formula,
    budget: SearchBudget,
) -> Result<Conservativity, NotDiamondFree> {
    if !f.is_diamond_free() {
        return Err(NotDiamondFree(f.to_string()));
    }
    let goal = Sequent::goal(f.clone());
    let full = prove(&goal, LogicId::ConstCK, budget).expect("goal is legal");
    let boxed = prove(&goal, LogicId::ConstCKBox, budget).expect("goal is might-free");
    Ok(match (full, boxed) {
        (ProofResult::BudgetExhausted, _) | (_, ProofResult::BudgetExhausted) => {
            Conservativity::Inconclusive
        }
        (a, b) if a.is_proved() == b.is_proved() => Conservativity::Agree { proved: a.is_proved() },
        _ => Conservativity::Disagree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    #[test]
    fn small_probes_are_clean() {
        for kind in [ProbeKind::Weakening, ProbeKind::Contraction, ProbeKind::Cut] {
            let report = admissibility_probe(kind, LogicId::ConstCK, 10, 1);
            assert!(report.ok(), "{:?}: {:?}", kind, report);
            assert!(report.trials >= 10, "only {} trials synthesized", report.trials);
        }
    }

    #[test]
    fn cut_identity_instance() {
        // premises p => p and p => p; conclusion p, p => p... the degenerate
        // identity instance from the contract.
        let p = parse("p").unwrap();
        let s = Sequent::single(vec![p.clone()], Some(p));
        assert!(matches!(
            prove(&s, LogicId::ConstCK, SearchBudget::default()).unwrap(),
            ProofResult::Proved(_)
        ));
    }

    #[test]
    fn conservativity_examples() {
        let budget = SearchBudget::default();
        let cn = parse("p > true").unwrap();
        assert_eq!(
            conservativity_probe(&cn, budget).unwrap(),
            Conservativity::Agree { proved: true }
        );
        let sep = parse("~~(true > false) -> (true > false)").unwrap();
        assert_eq!(
            conservativity_probe(&sep, budget).unwrap(),
            Conservativity::Agree { proved: false }
        );
        let triv = parse("p -> p").unwrap();
        assert_eq!(
            conservativity_probe(&triv, budget).unwrap(),
            Conservativity::Agree { proved: true }
        );
        assert!(conservativity_probe(&parse("p ?> q").unwrap(), budget).is_err());
    }
}
