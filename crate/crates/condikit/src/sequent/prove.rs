//! Backward proof search with loop checking.
//!
//! The searcher works on multiset sequents but keys its per-branch history on
//! set-normalized goals: a branch is pruned as soon as its normalized goal
//! repeats, which is sound because weakening and contraction are
//! height-preserving admissible in every calculus here. All formulas arising
//! during search are subformulas of the root goal, so the normalized state
//! space is finite and an exhaustive failure is a genuine non-derivability
//! verdict for the single-succedent calculi.
//!
//! Conditional rules quantify over selections of box (and might) formulas.
//! The searcher first decides the equivalence obligations `phi <=> rho` per
//! candidate (memoized; these are obligations on strict subformulas) and then
//! applies the rule with the maximal passing selection only: any instance
//! with a smaller selection is subsumed by height-preserving weakening of the
//! side premise. In strict-height mode (used by the admissibility probes)
//! this shortcut is disabled and the complete instance list is explored, so
//! failure within a height bound refutes derivability within that bound.

use std::collections::{HashMap, HashSet};

use crate::formula::Formula;

use super::rules::{boxes_of, diamonds_of, rule_instances, IllegalGoal};
use super::{LogicId, SeqDerivation, SeqRule, Sequent};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    /// Maximal derivation height explored.
    pub depth: usize,
    /// Node budget across the whole query.
    pub nodes: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { depth: 40, nodes: 200_000 }
    }
}

impl SearchBudget {
    pub fn new(depth: usize, nodes: u64) -> Self {
        SearchBudget { depth, nodes }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProofResult {
    Proved(SeqDerivation),
    Refuted,
    BudgetExhausted,
}

impl ProofResult {
    pub fn is_proved(&self) -> bool {
        matches!(self, ProofResult::Proved(_))
    }

    pub fn verdict(&self) -> &'static str {
        match self {
            ProofResult::Proved(_) => "proved",
            ProofResult::Refuted => "refuted",
            ProofResult::BudgetExhausted => "budget-exhausted",
        }
    }
}

/// Backward proof search for `goal` in `logic`.
pub fn prove(goal: &Sequent, logic: LogicId, budget: SearchBudget) -> Result<ProofResult, IllegalGoal> {
    prove_bounded(goal, logic, budget, false)
}

/// As [`prove`], but `strict_height` makes the search complete relative to
/// the height bound `budget.depth`: if it fails exhaustively, no derivation
/// of height `<= budget.depth` exists.
pub fn prove_bounded(
    goal: &Sequent,
    logic: LogicId,
    budget: SearchBudget,
    strict_height: bool,
) -> Result<ProofResult, IllegalGoal> {
    // Surface the same legality errors as the instance enumerator.
    rule_instances(goal, logic)?;
    let mut searcher = Searcher {
        logic,
        nodes_left: budget.nodes,
        strict_height,
        memo_proved: HashMap::new(),
        memo_refuted: HashSet::new(),
        history: Vec::new(),
    };
    let (out, _) = searcher.search(goal, budget.depth);
    Ok(match out {
        Out::Proved(d) => ProofResult::Proved(d),
        Out::Fail { exhaustive: true } if logic.single_succedent() => ProofResult::Refuted,
        Out::Fail { .. } => ProofResult::BudgetExhausted,
    })
}

const NO_LINK: usize = usize::MAX;

enum Out {
    Proved(SeqDerivation),
    Fail { exhaustive: bool },
}

struct Searcher {
    logic: LogicId,
    nodes_left: u64,
    strict_height: bool,
    memo_proved: HashMap<Sequent, SeqDerivation>,
    memo_refuted: HashSet<Sequent>,
    history: Vec<Sequent>,
}

impl Searcher {
    fn search(&mut self, goal: &Sequent, depth_left: usize) -> (Out, usize) {
        if self.nodes_left == 0 {
            return (Out::Fail { exhaustive: false }, NO_LINK);
        }
        self.nodes_left -= 1;

        if let Some(d) = self.memo_proved.get(goal) {
            if d.height() <= depth_left {
                return (Out::Proved(d.clone()), NO_LINK);
            }
        }
        let norm = goal.normalized();
        if self.memo_refuted.contains(&norm) {
            return (Out::Fail { exhaustive: true }, NO_LINK);
        }
        if let Some(i) = self.history.iter().position(|h| *h == norm) {
            return (Out::Fail { exhaustive: true }, i);
        }

        let my_idx = self.history.len();
        self.history.push(norm.clone());
        let (out, lowlink) = self.expand(goal, depth_left);
        self.history.pop();

        match &out {
            Out::Proved(d) => {
                self.memo_proved.entry(goal.clone()).or_insert_with(|| d.clone());
                (out, NO_LINK)
            }
            Out::Fail { exhaustive } => {
                if *exhaustive && lowlink >= my_idx {
                    self.memo_refuted.insert(norm);
                    (out, NO_LINK)
                } else {
                    (out, lowlink)
                }
            }
        }
    }

    fn expand(&mut self, goal: &Sequent, depth_left: usize) -> (Out, usize) {
        if self.closes(goal) {
            let rule = if goal.ant().contains(&Formula::Bot) { SeqRule::BotL } else { SeqRule::Init };
            return (Out::Proved(SeqDerivation::leaf(goal.clone(), rule)), NO_LINK);
        }
        if depth_left == 0 {
            return (Out::Fail { exhaustive: false }, NO_LINK);
        }

        if self.strict_height {
            // Complete instance set, explored as plain alternatives.
            let instances = rule_instances(goal, self.logic).expect("goal legality checked at entry");
            return self.try_choices(goal, depth_left, instances);
        }

        if let Some(instance) = self.invertible_instance(goal) {
            let (rule, premises) = instance;
            let (res, lowlink) = self.search_all(&premises, depth_left - 1);
            return match res {
                Ok(ds) => (
                    Out::Proved(SeqDerivation { conclusion: goal.clone(), rule, premises: ds }),
                    NO_LINK,
                ),
                Err(exhaustive) => (Out::Fail { exhaustive }, lowlink),
            };
        }

        let mut all_exhaustive = true;
        let mut lowlink = NO_LINK;
        for (rule, premises) in self.prop_choices(goal) {
            let (res, ll) = self.search_all(&premises, depth_left - 1);
            match res {
                Ok(ds) => {
                    return (
                        Out::Proved(SeqDerivation { conclusion: goal.clone(), rule, premises: ds }),
                        NO_LINK,
                    );
                }
                Err(exhaustive) => {
                    all_exhaustive &= exhaustive;
                    lowlink = lowlink.min(ll);
                }
            }
        }
        match self.try_conditionals(goal, depth_left) {
            ConditionalScan::Proved(d) => (Out::Proved(d), NO_LINK),
            ConditionalScan::Done { capped, lowlink: ll } => {
                all_exhaustive &= !capped;
                (Out::Fail { exhaustive: all_exhaustive }, lowlink.min(ll))
            }
        }
    }

    /// Backtracking propositional alternatives: the disjunction right rules
    /// and left implication.
    fn prop_choices(&self, goal: &Sequent) -> Vec<(SeqRule, Vec<Sequent>)> {
        let mut out = Vec::new();
        if self.logic != LogicId::ClassicalCK {
            if let Some(Formula::Or(l, r)) = goal.suc().first() {
                out.push((
                    SeqRule::OrR1,
                    vec![Sequent::new(goal.ant().to_vec(), vec![(**l).clone()])],
                ));
                out.push((
                    SeqRule::OrR2,
                    vec![Sequent::new(goal.ant().to_vec(), vec![(**r).clone()])],
                ));
            }
            let mut seen: Vec<&Formula> = Vec::new();
            for f in goal.ant() {
                if seen.contains(&f) {
                    continue;
                }
                seen.push(f);
                if let Formula::Imp(l, r) = f {
                    let left = Sequent::new(goal.ant().to_vec(), vec![(**l).clone()]);
                    let right = goal.without_ant(f).with_ant((**r).clone());
                    out.push((SeqRule::ImpL, vec![left, right]));
                }
            }
        }
        out
    }

    fn try_choices(
        &mut self,
        goal: &Sequent,
        depth_left: usize,
        choices: Vec<(SeqRule, Vec<Sequent>)>,
    ) -> (Out, usize) {
        let mut all_exhaustive = true;
        let mut lowlink = NO_LINK;
        for (rule, premises) in choices {
            if premises.is_empty() {
                return (Out::Proved(SeqDerivation::leaf(goal.clone(), rule)), NO_LINK);
            }
            let (res, ll) = self.search_all(&premises, depth_left - 1);
            match res {
                Ok(ds) => {
                    return (
                        Out::Proved(SeqDerivation { conclusion: goal.clone(), rule, premises: ds }),
                        NO_LINK,
                    );
                }
                Err(exhaustive) => {
                    all_exhaustive &= exhaustive;
                    lowlink = lowlink.min(ll);
                }
            }
        }
        (Out::Fail { exhaustive: all_exhaustive }, lowlink)
    }

    /// Searches every premise; fails fast on the first failure, reporting
    /// whether that failure was exhaustive.
    fn search_all(
        &mut self,
        premises: &[Sequent],
        depth_left: usize,
    ) -> (Result<Vec<SeqDerivation>, bool>, usize) {
        let mut ds = Vec::with_capacity(premises.len());
        for p in premises {
            let (out, ll) = self.search(p, depth_left);
            match out {
                Out::Proved(d) => ds.push(d),
                Out::Fail { exhaustive } => return (Err(exhaustive), ll),
            }
        }
        (Ok(ds), NO_LINK)
    }

    fn closes(&self, goal: &Sequent) -> bool {
        if goal.ant().contains(&Formula::Bot) {
            return true;
        }
        goal.ant().iter().any(|f| matches!(f, Formula::Atom(_)) && goal.suc().contains(f))
    }

    /// First applicable height-preserving-invertible instance, applied
    /// deterministically.
    fn invertible_instance(&self, goal: &Sequent) -> Option<(SeqRule, Vec<Sequent>)> {
        if self.logic == LogicId::ClassicalCK {
            return self.classical_invertible(goal);
        }
        for f in goal.ant() {
            if let Formula::And(l, r) = f {
                let p = goal.without_ant(f).with_ant((**l).clone()).with_ant((**r).clone());
                return Some((SeqRule::AndL, vec![p]));
            }
        }
        match goal.suc().first() {
            Some(Formula::Imp(l, r)) => {
                let p = Sequent::new(
                    goal.ant().iter().cloned().chain([(**l).clone()]).collect(),
                    vec![(**r).clone()],
                );
                return Some((SeqRule::ImpR, vec![p]));
            }
            Some(Formula::And(l, r)) => {
                return Some((
                    SeqRule::AndR,
                    vec![
                        Sequent::new(goal.ant().to_vec(), vec![(**l).clone()]),
                        Sequent::new(goal.ant().to_vec(), vec![(**r).clone()]),
                    ],
                ));
            }
            _ => {}
        }
        for f in goal.ant() {
            if let Formula::Or(l, r) = f {
                let base = goal.without_ant(f);
                return Some((
                    SeqRule::OrL,
                    vec![base.with_ant((**l).clone()), base.with_ant((**r).clone())],
                ));
            }
        }
        None
    }

    /// All G3-style classical propositional rules are invertible.
    fn classical_invertible(&self, goal: &Sequent) -> Option<(SeqRule, Vec<Sequent>)> {
        for f in goal.ant() {
            match f {
                Formula::And(l, r) => {
                    let p = goal.without_ant(f).with_ant((**l).clone()).with_ant((**r).clone());
                    return Some((SeqRule::AndL, vec![p]));
                }
                Formula::Or(l, r) => {
                    let base = goal.without_ant(f);
                    return Some((
                        SeqRule::OrL,
                        vec![base.with_ant((**l).clone()), base.with_ant((**r).clone())],
                    ));
                }
                Formula::Imp(l, r) => {
                    let base = goal.without_ant(f);
                    let mut suc_l = base.suc().to_vec();
                    suc_l.push((**l).clone());
                    return Some((
                        SeqRule::ImpL,
                        vec![
                            Sequent::new(base.ant().to_vec(), suc_l),
                            base.with_ant((**r).clone()),
                        ],
                    ));
                }
                _ => {}
            }
        }
        for f in goal.suc() {
            match f {
                Formula::And(l, r) => {
                    let mut s1 = goal.suc().to_vec();
                    s1.remove(s1.iter().position(|g| g == f).unwrap());
                    let mut s2 = s1.clone();
                    s1.push((**l).clone());
                    s2.push((**r).clone());
                    return Some((
                        SeqRule::AndR,
                        vec![
                            Sequent::new(goal.ant().to_vec(), s1),
                            Sequent::new(goal.ant().to_vec(), s2),
                        ],
                    ));
                }
                Formula::Or(l, r) => {
                    let mut s = goal.suc().to_vec();
                    s.remove(s.iter().position(|g| g == f).unwrap());
                    s.push((**l).clone());
                    s.push((**r).clone());
                    return Some((SeqRule::OrR, vec![Sequent::new(goal.ant().to_vec(), s)]));
                }
                Formula::Imp(l, r) => {
                    let mut s = goal.suc().to_vec();
                    s.remove(s.iter().position(|g| g == f).unwrap());
                    s.push((**r).clone());
                    let mut a = goal.ant().to_vec();
                    a.push((**l).clone());
                    return Some((SeqRule::ImpR, vec![Sequent::new(a, s)]));
                }
                _ => {}
            }
        }
        None
    }

    /// Decides `l <=> r` with the current branch context; returns the two
    /// derivations on success.
    fn probe_equivalence(
        &mut self,
        l: &Formula,
        r: &Formula,
        depth_left: usize,
        lowlink: &mut usize,
        capped: &mut bool,
    ) -> Option<[SeqDerivation; 2]> {
        let [fwd, bwd] = Sequent::equivalence(l, r);
        let (o1, ll1) = self.search(&fwd, depth_left);
        let d1 = match o1 {
            Out::Proved(d) => d,
            Out::Fail { exhaustive } => {
                *capped |= !exhaustive;
                *lowlink = (*lowlink).min(ll1);
                return None;
            }
        };
        let (o2, ll2) = self.search(&bwd, depth_left);
        let d2 = match o2 {
            Out::Proved(d) => d,
            Out::Fail { exhaustive } => {
                *capped |= !exhaustive;
                *lowlink = (*lowlink).min(ll2);
                return None;
            }
        };
        Some([d1, d2])
    }

    fn try_conditionals(&mut self, goal: &Sequent, depth_left: usize) -> ConditionalScan {
        let mut capped = false;
        let mut lowlink = NO_LINK;
        if depth_left == 0 {
            return ConditionalScan::Done { capped: true, lowlink };
        }
        let d = depth_left - 1;
        let suc = goal.suc().first().cloned();
        let with_id = matches!(self.logic, LogicId::CCKID | LogicId::CCKMPID);

        if self.logic == LogicId::ClassicalCK {
            if let Some(d_) = self.classical_conditionals(goal, d, &mut capped, &mut lowlink) {
                return ConditionalScan::Proved(d_);
            }
            return ConditionalScan::Done { capped, lowlink };
        }

        // Right box rule.
        if let Some(Formula::CondBox(phi, psi)) = &suc {
            let (eq_premises, sigma) =
                self.maximal_boxes(goal.ant(), phi, d, &mut capped, &mut lowlink);
            let mut side_ant = sigma;
            if with_id {
                side_ant.push((**phi).clone());
            }
            let side = Sequent::new(side_ant, vec![(**psi).clone()]);
            let (res, ll) = self.search_all(&[side.clone()], d);
            match res {
                Ok(mut side_d) => {
                    let mut premises: Vec<SeqDerivation> =
                        eq_premises.into_iter().flatten().collect();
                    premises.append(&mut side_d);
                    return ConditionalScan::Proved(SeqDerivation {
                        conclusion: goal.clone(),
                        rule: if with_id { SeqRule::CbId } else { SeqRule::Cb },
                        premises,
                    });
                }
                Err(exhaustive) => {
                    capped |= !exhaustive;
                    lowlink = lowlink.min(ll);
                }
            }
        }

        if self.logic == LogicId::ConstCKBox {
            return ConditionalScan::Done { capped, lowlink };
        }

        // Left might rules (cd / cbd and their variants).
        let mut seen: Vec<Formula> = Vec::new();
        for f in goal.ant().to_vec() {
            let (phi, psi) = match &f {
                Formula::CondDiam(a, c) => ((**a).clone(), (**c).clone()),
                _ => continue,
            };
            if seen.contains(&f) {
                continue;
            }
            seen.push(f.clone());
            let rest = goal.without_ant(&f);
            let (eq_premises, sigma) =
                self.maximal_boxes(rest.ant(), &phi, d, &mut capped, &mut lowlink);

            let (diam_eqs, chis) = if self.logic == LogicId::CCKCEM {
                self.maximal_diamonds(rest.ant(), &phi, d, &mut capped, &mut lowlink)
            } else {
                (Vec::new(), Vec::new())
            };

            let mut side_ant = sigma.clone();
            side_ant.extend(chis.clone());
            if with_id {
                side_ant.push(phi.clone());
            }
            side_ant.push(psi.clone());

            // cd: the succedent is itself a might conditional.
            if let Some(Formula::CondDiam(eta, theta)) = &suc {
                if let Some(eq_eta) = self.probe_equivalence(&phi, eta, d, &mut lowlink, &mut capped)
                {
                    let side = Sequent::new(side_ant.clone(), vec![(**theta).clone()]);
                    let (res, ll) = self.search_all(&[side], d);
                    match res {
                        Ok(mut side_d) => {
                            let mut premises: Vec<SeqDerivation> =
                                eq_premises.iter().flatten().cloned().collect();
                            premises.extend(diam_eqs.iter().flatten().cloned());
                            premises.extend(eq_eta);
                            premises.append(&mut side_d);
                            let rule = if self.logic == LogicId::CCKCEM {
                                SeqRule::CdCem
                            } else if with_id {
                                SeqRule::CdId
                            } else {
                                SeqRule::Cd
                            };
                            return ConditionalScan::Proved(SeqDerivation {
                                conclusion: goal.clone(),
                                rule,
                                premises,
                            });
                        }
                        Err(exhaustive) => {
                            capped |= !exhaustive;
                            lowlink = lowlink.min(ll);
                        }
                    }
                }
            }

            // cbd: unconstrained succedent, empty premise succedent.
            let side = Sequent::new(side_ant, vec![]);
            let (res, ll) = self.search_all(&[side], d);
            match res {
                Ok(mut side_d) => {
                    let mut premises: Vec<SeqDerivation> =
                        eq_premises.into_iter().flatten().collect();
                    premises.extend(diam_eqs.into_iter().flatten());
                    premises.append(&mut side_d);
                    let rule = if self.logic == LogicId::CCKCEM {
                        SeqRule::CbdCem
                    } else if with_id {
                        SeqRule::CbdId
                    } else {
                        SeqRule::Cbd
                    };
                    return ConditionalScan::Proved(SeqDerivation {
                        conclusion: goal.clone(),
                        rule,
                        premises,
                    });
                }
                Err(exhaustive) => {
                    capped |= !exhaustive;
                    lowlink = lowlink.min(ll);
                }
            }
        }

        // Conditional modus ponens rules.
        if matches!(self.logic, LogicId::CCKMP | LogicId::CCKMPID) {
            let mut seen: Vec<Formula> = Vec::new();
            for f in goal.ant().to_vec() {
                let (phi, psi) = match &f {
                    Formula::CondBox(a, c) => ((**a).clone(), (**c).clone()),
                    _ => continue,
                };
                if seen.contains(&f) {
                    continue;
                }
                seen.push(f.clone());
                let left = Sequent::new(goal.ant().to_vec(), vec![phi]);
                let right = goal.with_ant(psi);
                let (res, ll) = self.search_all(&[left, right], d);
                match res {
                    Ok(premises) => {
                        return ConditionalScan::Proved(SeqDerivation {
                            conclusion: goal.clone(),
                            rule: SeqRule::MpBox,
                            premises,
                        });
                    }
                    Err(exhaustive) => {
                        capped |= !exhaustive;
                        lowlink = lowlink.min(ll);
                    }
                }
            }
            if let Some(Formula::CondDiam(phi, psi)) = &suc {
                let prem = vec![
                    Sequent::new(goal.ant().to_vec(), vec![(**phi).clone()]),
                    Sequent::new(goal.ant().to_vec(), vec![(**psi).clone()]),
                ];
                let (res, ll) = self.search_all(&prem, d);
                match res {
                    Ok(premises) => {
                        return ConditionalScan::Proved(SeqDerivation {
                            conclusion: goal.clone(),
                            rule: SeqRule::MpDiam,
                            premises,
                        });
                    }
                    Err(exhaustive) => {
                        capped |= !exhaustive;
                        lowlink = lowlink.min(ll);
                    }
                }
            }
        }

        ConditionalScan::Done { capped, lowlink }
    }

    fn classical_conditionals(
        &mut self,
        goal: &Sequent,
        d: usize,
        capped: &mut bool,
        lowlink: &mut usize,
    ) -> Option<SeqDerivation> {
        // Right rule: each box in the succedent.
        let mut seen: Vec<Formula> = Vec::new();
        for f in goal.suc().to_vec() {
            let (phi, psi) = match &f {
                Formula::CondBox(a, c) => ((**a).clone(), (**c).clone()),
                _ => continue,
            };
            if seen.contains(&f) {
                continue;
            }
            seen.push(f.clone());
            let (box_eqs, sigma) = self.maximal_boxes(goal.ant(), &phi, d, capped, lowlink);
            let (diam_eqs, chis) = self.maximal_suc_diamonds(goal.suc(), &phi, d, capped, lowlink);
            let mut suc = chis;
            suc.push(psi.clone());
            let side = Sequent::new(sigma, suc);
            let (res, ll) = self.search_all(&[side], d);
            match res {
                Ok(mut side_d) => {
                    let mut premises: Vec<SeqDerivation> = box_eqs.into_iter().flatten().collect();
                    premises.extend(diam_eqs.into_iter().flatten());
                    premises.append(&mut side_d);
                    return Some(SeqDerivation {
                        conclusion: goal.clone(),
                        rule: SeqRule::CkR,
                        premises,
                    });
                }
                Err(exhaustive) => {
                    *capped |= !exhaustive;
                    *lowlink = (*lowlink).min(ll);
                }
            }
        }
        // Left rule: each might in the antecedent.
        let mut seen: Vec<Formula> = Vec::new();
        for f in goal.ant().to_vec() {
            let (phi, psi) = match &f {
                Formula::CondDiam(a, c) => ((**a).clone(), (**c).clone()),
                _ => continue,
            };
            if seen.contains(&f) {
                continue;
            }
            seen.push(f.clone());
            let rest = goal.without_ant(&f);
            let (box_eqs, sigma) = self.maximal_boxes(rest.ant(), &phi, d, capped, lowlink);
            let (diam_eqs, chis) = self.maximal_suc_diamonds(goal.suc(), &phi, d, capped, lowlink);
            let mut ant = sigma;
            ant.push(psi.clone());
            let side = Sequent::new(ant, chis);
            let (res, ll) = self.search_all(&[side], d);
            match res {
                Ok(mut side_d) => {
                    let mut premises: Vec<SeqDerivation> = box_eqs.into_iter().flatten().collect();
                    premises.extend(diam_eqs.into_iter().flatten());
                    premises.append(&mut side_d);
                    return Some(SeqDerivation {
                        conclusion: goal.clone(),
                        rule: SeqRule::CkL,
                        premises,
                    });
                }
                Err(exhaustive) => {
                    *capped |= !exhaustive;
                    *lowlink = (*lowlink).min(ll);
                }
            }
        }
        None
    }

    /// Every box occurrence in `ant` whose antecedent is provably equivalent
    /// to `phi`, together with the equivalence derivations and the collected
    /// consequents.
    #[allow(clippy::type_complexity)]
    fn maximal_boxes(
        &mut self,
        ant: &[Formula],
        phi: &Formula,
        d: usize,
        capped: &mut bool,
        lowlink: &mut usize,
    ) -> (Vec<[SeqDerivation; 2]>, Vec<Formula>) {
        let mut eqs = Vec::new();
        let mut sigma = Vec::new();
        let mut decided: HashMap<Formula, Option<[SeqDerivation; 2]>> = HashMap::new();
        for (rho, s) in boxes_of(ant) {
            let entry = decided
                .entry(rho.clone())
                .or_insert_with(|| self.probe_equivalence(phi, &rho, d, lowlink, capped));
            if let Some(pair) = entry {
                eqs.push(pair.clone());
                sigma.push(s);
            }
        }
        (eqs, sigma)
    }

    #[allow(clippy::type_complexity)]
    fn maximal_diamonds(
        &mut self,
        ant: &[Formula],
        phi: &Formula,
        d: usize,
        capped: &mut bool,
        lowlink: &mut usize,
    ) -> (Vec<[SeqDerivation; 2]>, Vec<Formula>) {
        let mut eqs = Vec::new();
        let mut chis = Vec::new();
        let mut decided: HashMap<Formula, Option<[SeqDerivation; 2]>> = HashMap::new();
        for (xi, c) in diamonds_of(ant) {
            let entry = decided
                .entry(xi.clone())
                .or_insert_with(|| self.probe_equivalence(phi, &xi, d, lowlink, capped));
            if let Some(pair) = entry {
                eqs.push(pair.clone());
                chis.push(c);
            }
        }
        (eqs, chis)
    }

    #[allow(clippy::type_complexity)]
    fn maximal_suc_diamonds(
        &mut self,
        suc: &[Formula],
        phi: &Formula,
        d: usize,
        capped: &mut bool,
        lowlink: &mut usize,
    ) -> (Vec<[SeqDerivation; 2]>, Vec<Formula>) {
        self.maximal_diamonds(suc, phi, d, capped, lowlink)
    }
}

enum ConditionalScan {
    Proved(SeqDerivation),
    Done { capped: bool, lowlink: usize },
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{and, atom, cond_box, cond_diam, imp, neg, or, parse, top, Formula};
    use crate::sequent::check_derivation;

    fn assert_proved(text: &str, logic: LogicId) -> SeqDerivation {
        let goal = Sequent::goal(parse(text).unwrap());
        match prove(&goal, logic, SearchBudget::default()).unwrap() {
            ProofResult::Proved(d) => {
                assert!(check_derivation(&d, logic), "search/checker disagree on {text}");
                d
            }
            other => panic!("{text} in {logic}: expected proved, got {}", other.verdict()),
        }
    }

    fn assert_refuted(text: &str, logic: LogicId) {
        let goal = Sequent::goal(parse(text).unwrap());
        match prove(&goal, logic, SearchBudget::default()).unwrap() {
            ProofResult::Refuted => {}
            other => panic!("{text} in {logic}: expected refuted, got {}", other.verdict()),
        }
    }

    #[test]
    fn might_bottom_negation_is_provable() {
        assert_proved("(p ?> false) -> false", LogicId::ConstCK);
    }

    #[test]
    fn excluded_middle_is_refuted() {
        assert_refuted("p | ~p", LogicId::ConstCK);
    }

    #[test]
    fn might_definition_is_classical_only() {
        assert_proved("(p ?> q) <-> ~(p > ~q)", LogicId::ClassicalCK);
        let goal = Sequent::goal(parse("~(p > ~q) -> (p ?> q)").unwrap());
        let res = prove(&goal, LogicId::ConstCK, SearchBudget::default()).unwrap();
        assert_eq!(res, ProofResult::Refuted);
    }

    #[test]
    fn identity_axiom_needs_the_id_calculus() {
        assert_proved("p > p", LogicId::CCKID);
        assert_refuted("p > p", LogicId::ConstCK);
    }

    #[test]
    fn conditional_modus_ponens_axioms() {
        assert_proved("(p > q) -> (p -> q)", LogicId::CCKMP);
        assert_proved("p & q -> (p ?> q)", LogicId::CCKMP);
        assert_refuted("(p > q) -> (p -> q)", LogicId::ConstCK);
    }

    #[test]
    fn excluded_middle_for_might_consequents() {
        assert_proved("(p ?> q) & (p ?> r) -> (p ?> q & r)", LogicId::CCKCEM);
        assert_refuted("(p ?> q) & (p ?> r) -> (p ?> q & r)", LogicId::ConstCK);
    }

    #[test]
    fn separating_formula_fails_in_the_box_calculus() {
        assert_refuted("~~(true > false) -> (true > false)", LogicId::ConstCKBox);
    }

    #[test]
    fn identity_sequents_are_provable_for_compound_formulas() {
        for f in [
            cond_box(atom("p"), atom("q")),
            cond_diam(atom("p"), atom("q")),
            imp(or(atom("p"), atom("q")), and(atom("p"), atom("p"))),
            neg(cond_diam(top(), Formula::Bot)),
        ] {
            let goal = Sequent::single(vec![f.clone()], Some(f));
            let res = prove(&goal, LogicId::ConstCK, SearchBudget::default()).unwrap();
            assert!(res.is_proved(), "identity failed");
        }
    }

    #[test]
    fn equivalent_but_unequal_antecedents_are_matched() {
        // p > q and (p & p) > r can both feed the right box rule.
        let goal = Sequent::single(
            vec![
                cond_box(atom("p"), atom("q")),
                cond_box(and(atom("p"), atom("p")), imp(atom("q"), atom("r"))),
            ],
            Some(cond_box(atom("p"), atom("r"))),
        );
        let res = prove(&goal, LogicId::ConstCK, SearchBudget::default()).unwrap();
        match res {
            ProofResult::Proved(d) => assert!(check_derivation(&d, LogicId::ConstCK)),
            other => panic!("expected proved, got {}", other.verdict()),
        }
    }
}
