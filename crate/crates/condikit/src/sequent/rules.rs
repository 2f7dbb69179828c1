//! Complete backward rule-instance enumeration.
//!
//! For a goal sequent and a logic, [`rule_instances`] lists every backward
//! rule application whose conclusion is the goal. Conditional rules carry one
//! instance per sub-multiset of box formulas in the antecedent (and, for the
//! cem rules, per sub-multiset of might formulas); each equivalence side
//! condition contributes its two premise sequents explicitly.

use thiserror::Error;

use crate::formula::Formula;

use super::{LogicId, SeqRule, Sequent};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("goal `{goal}` is not legal for {logic}: {reason}")]
pub struct IllegalGoal {
    pub goal: String,
    pub logic: LogicId,
    pub reason: String,
}

pub type Instance = (SeqRule, Vec<Sequent>);

/// Structured form of a conditional-rule instance, used by the checker's
/// enumerator and by the sequent-to-Hilbert compiler.
#[derive(Debug, Clone)]
pub(crate) struct CondInstance {
    pub rule: SeqRule,
    pub premises: Vec<Sequent>,
    /// Antecedent of the principal conditional (the output box for right
    /// rules, the principal might for left rules).
    pub phi: Formula,
    pub psi: Formula,
    /// Selected box formulas `(rho_i, sigma_i)`.
    pub boxes: Vec<(Formula, Formula)>,
    /// Selected might formulas (cem rules and the classical rules).
    pub diams: Vec<(Formula, Formula)>,
    /// Succedent might data for the cd-style rules.
    pub eta: Option<Formula>,
    pub theta: Option<Formula>,
    pub side: Sequent,
}

/// Every backward rule application available on `goal` in `logic`.
pub fn rule_instances(goal: &Sequent, logic: LogicId) -> Result<Vec<Instance>, IllegalGoal> {
    check_legal(goal, logic)?;
    let mut out = Vec::new();
    if logic == LogicId::ClassicalCK {
        classical_prop_instances(goal, &mut out);
    } else {
        intuitionistic_prop_instances(goal, &mut out);
        mp_instances(goal, logic, &mut out);
    }
    for inst in conditional_instances(goal, logic) {
        out.push((inst.rule, inst.premises));
    }
    out.sort_by(|a, b| (a.0.name(), &a.1).cmp(&(b.0.name(), &b.1)));
    out.dedup();
    Ok(out)
}

pub(crate) fn check_legal(goal: &Sequent, logic: LogicId) -> Result<(), IllegalGoal> {
    if !goal.legal_for(logic) {
        let reason = if logic.single_succedent() && !goal.is_single_succedent() {
            "succedent must have at most one formula".to_owned()
        } else {
            "might conditionals are not in this logic's language".to_owned()
        };
        return Err(IllegalGoal { goal: goal.to_string(), logic, reason });
    }
    Ok(())
}

fn uniques(fs: &[Formula]) -> Vec<&Formula> {
    let mut seen: Vec<&Formula> = Vec::new();
    for f in fs {
        if !seen.contains(&f) {
            seen.push(f);
        }
    }
    seen
}

pub(crate) fn boxes_of(fs: &[Formula]) -> Vec<(Formula, Formula)> {
    fs.iter()
        .filter_map(|f| match f {
            Formula::CondBox(a, c) => Some(((**a).clone(), (**c).clone())),
            _ => None,
        })
        .collect()
}

pub(crate) fn diamonds_of(fs: &[Formula]) -> Vec<(Formula, Formula)> {
    fs.iter()
        .filter_map(|f| match f {
            Formula::CondDiam(a, c) => Some(((**a).clone(), (**c).clone())),
            _ => None,
        })
        .collect()
}

fn submultisets<T: Clone>(items: &[T]) -> impl Iterator<Item = Vec<T>> + '_ {
    assert!(items.len() < 20, "sub-multiset enumeration blown up");
    (0u32..(1 << items.len())).map(move |mask| {
        items
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, x)| x.clone())
            .collect()
    })
}

fn intuitionistic_prop_instances(goal: &Sequent, out: &mut Vec<Instance>) {
    let suc = goal.suc().first();

    if let Some(Formula::Atom(p)) = suc {
        if goal.ant().contains(&Formula::Atom(p.clone())) {
            out.push((SeqRule::Init, vec![]));
        }
    }
    if goal.ant().contains(&Formula::Bot) {
        out.push((SeqRule::BotL, vec![]));
    }

    for f in uniques(goal.ant()) {
        match f {
            Formula::And(l, r) => {
                let mut p = goal.without_ant(f);
                p = p.with_ant((**l).clone()).with_ant((**r).clone());
                out.push((SeqRule::AndL, vec![p]));
            }
            Formula::Or(l, r) => {
                let base = goal.without_ant(f);
                out.push((
                    SeqRule::OrL,
                    vec![base.with_ant((**l).clone()), base.with_ant((**r).clone())],
                ));
            }
            Formula::Imp(l, r) => {
                let left = Sequent::new(goal.ant().to_vec(), vec![(**l).clone()]);
                let right = goal.without_ant(f).with_ant((**r).clone());
                out.push((SeqRule::ImpL, vec![left, right]));
            }
            _ => {}
        }
    }

    match suc {
        Some(Formula::And(l, r)) => {
            out.push((
                SeqRule::AndR,
                vec![
                    Sequent::new(goal.ant().to_vec(), vec![(**l).clone()]),
                    Sequent::new(goal.ant().to_vec(), vec![(**r).clone()]),
                ],
            ));
        }
        Some(Formula::Or(l, r)) => {
            out.push((
                SeqRule::OrR1,
                vec![Sequent::new(goal.ant().to_vec(), vec![(**l).clone()])],
            ));
            out.push((
                SeqRule::OrR2,
                vec![Sequent::new(goal.ant().to_vec(), vec![(**r).clone()])],
            ));
        }
        Some(Formula::Imp(l, r)) => {
            let mut ant = goal.ant().to_vec();
            ant.push((**l).clone());
            out.push((SeqRule::ImpR, vec![Sequent::new(ant, vec![(**r).clone()])]));
        }
        _ => {}
    }
}

/// Premises `{phi <=> rho_i}` for the selected boxes, in order.
fn equivalence_premises(phi: &Formula, selected: &[(Formula, Formula)], out: &mut Vec<Sequent>) {
    for (rho, _) in selected {
        out.extend(Sequent::equivalence(phi, rho));
    }
}

fn sigma_of(selected: &[(Formula, Formula)]) -> Vec<Formula> {
    selected.iter().map(|(_, s)| s.clone()).collect()
}

fn mp_instances(goal: &Sequent, logic: LogicId, out: &mut Vec<Instance>) {
    if !matches!(logic, LogicId::CCKMP | LogicId::CCKMPID) {
        return;
    }
    for f in uniques(goal.ant()) {
        if let Formula::CondBox(phi, psi) = f {
            let left = Sequent::new(goal.ant().to_vec(), vec![(**phi).clone()]);
            let right = goal.with_ant((**psi).clone());
            out.push((SeqRule::MpBox, vec![left, right]));
        }
    }
    if let Some(Formula::CondDiam(phi, psi)) = goal.suc().first() {
        out.push((
            SeqRule::MpDiam,
            vec![
                Sequent::new(goal.ant().to_vec(), vec![(**phi).clone()]),
                Sequent::new(goal.ant().to_vec(), vec![(**psi).clone()]),
            ],
        ));
    }
}

/// All conditional-rule instances of the goal, in structured form.
pub(crate) fn conditional_instances(goal: &Sequent, logic: LogicId) -> Vec<CondInstance> {
    let mut out = Vec::new();
    if logic == LogicId::ClassicalCK {
        classical_conditional_instances(goal, &mut out);
        return out;
    }
    let with_id = matches!(logic, LogicId::CCKID | LogicId::CCKMPID);
    let boxes = boxes_of(goal.ant());
    let suc = goal.suc().first();

    // Right box rule, with the identity variant folding the output
    // antecedent into the premise.
    if let Some(Formula::CondBox(phi, psi)) = suc {
        for selected in submultisets(&boxes) {
            let mut premises = Vec::new();
            equivalence_premises(phi, &selected, &mut premises);
            let mut sigma = sigma_of(&selected);
            if with_id {
                sigma.push((**phi).clone());
            }
            let side = Sequent::new(sigma, vec![(**psi).clone()]);
            premises.push(side.clone());
            out.push(CondInstance {
                rule: if with_id { SeqRule::CbId } else { SeqRule::Cb },
                premises,
                phi: (**phi).clone(),
                psi: (**psi).clone(),
                boxes: selected,
                diams: Vec::new(),
                eta: None,
                theta: None,
                side,
            });
        }
    }

    if logic == LogicId::ConstCKBox {
        return out;
    }
    let with_cem = logic == LogicId::CCKCEM;

    // Left might rules.
    for principal in uniques(goal.ant()) {
        let (phi, psi) = match principal {
            Formula::CondDiam(a, c) => ((**a).clone(), (**c).clone()),
            _ => continue,
        };
        let rest = goal.without_ant(principal);
        let rest_boxes = boxes_of(rest.ant());
        let rest_diams: Vec<(Formula, Formula)> =
            if with_cem { diamonds_of(rest.ant()) } else { Vec::new() };
        for sel_boxes in submultisets(&rest_boxes) {
            for sel_diams in submultisets(&rest_diams) {
                let sel_boxes = sel_boxes.clone();
                let mut sigma = sigma_of(&sel_boxes);
                sigma.extend(sigma_of(&sel_diams));
                if with_id {
                    sigma.push(phi.clone());
                }
                sigma.push(psi.clone());
                let mut eq_premises = Vec::new();
                equivalence_premises(&phi, &sel_boxes, &mut eq_premises);
                equivalence_premises(&phi, &sel_diams, &mut eq_premises);

                if let Some(Formula::CondDiam(eta, theta)) = suc {
                    let side = Sequent::new(sigma.clone(), vec![(**theta).clone()]);
                    let mut premises = eq_premises.clone();
                    premises.extend(Sequent::equivalence(&phi, eta));
                    premises.push(side.clone());
                    out.push(CondInstance {
                        rule: if with_cem {
                            SeqRule::CdCem
                        } else if with_id {
                            SeqRule::CdId
                        } else {
                            SeqRule::Cd
                        },
                        premises,
                        phi: phi.clone(),
                        psi: psi.clone(),
                        boxes: sel_boxes.clone(),
                        diams: sel_diams.clone(),
                        eta: Some((**eta).clone()),
                        theta: Some((**theta).clone()),
                        side,
                    });
                }
                let side = Sequent::new(sigma, vec![]);
                let mut premises = eq_premises;
                premises.push(side.clone());
                out.push(CondInstance {
                    rule: if with_cem {
                        SeqRule::CbdCem
                    } else if with_id {
                        SeqRule::CbdId
                    } else {
                        SeqRule::Cbd
                    },
                    premises,
                    phi: phi.clone(),
                    psi: psi.clone(),
                    boxes: sel_boxes,
                    diams: sel_diams,
                    eta: None,
                    theta: None,
                    side,
                });
            }
        }
    }
    out
}

fn without_suc(goal: &Sequent, f: &Formula) -> (Vec<Formula>, Vec<Formula>) {
    let ant = goal.ant().to_vec();
    let mut suc = goal.suc().to_vec();
    if let Some(i) = suc.iter().position(|g| g == f) {
        suc.remove(i);
    }
    (ant, suc)
}

fn classical_conditional_instances(goal: &Sequent, out: &mut Vec<CondInstance>) {
    let ant_boxes = boxes_of(goal.ant());
    let suc_diamonds = diamonds_of(goal.suc());

    // Right conditional rule: principal box on the right plus any selection
    // of boxes on the left and mights on the right.
    for f in uniques(goal.suc()) {
        if let Formula::CondBox(phi, psi) = f {
            for sel_boxes in submultisets(&ant_boxes) {
                for sel_diams in submultisets(&suc_diamonds) {
                    let sel_boxes = sel_boxes.clone();
                    let mut premises = Vec::new();
                    equivalence_premises(phi, &sel_boxes, &mut premises);
                    equivalence_premises(phi, &sel_diams, &mut premises);
                    let sigma = sigma_of(&sel_boxes);
                    let mut chi = sigma_of(&sel_diams);
                    chi.push((**psi).clone());
                    let side = Sequent::new(sigma, chi);
                    premises.push(side.clone());
                    out.push(CondInstance {
                        rule: SeqRule::CkR,
                        premises,
                        phi: (**phi).clone(),
                        psi: (**psi).clone(),
                        boxes: sel_boxes,
                        diams: sel_diams,
                        eta: None,
                        theta: None,
                        side,
                    });
                }
            }
        }
    }

    // Left conditional rule: principal might on the left.
    for f in uniques(goal.ant()) {
        if let Formula::CondDiam(phi, psi) = f {
            let rest = goal.without_ant(f);
            let rest_boxes = boxes_of(rest.ant());
            for sel_boxes in submultisets(&rest_boxes) {
                for sel_diams in submultisets(&suc_diamonds) {
                    let sel_boxes = sel_boxes.clone();
                    let mut premises = Vec::new();
                    equivalence_premises(phi, &sel_boxes, &mut premises);
                    equivalence_premises(phi, &sel_diams, &mut premises);
                    let mut sigma = sigma_of(&sel_boxes);
                    sigma.push((**psi).clone());
                    let chi = sigma_of(&sel_diams);
                    let side = Sequent::new(sigma, chi);
                    premises.push(side.clone());
                    out.push(CondInstance {
                        rule: SeqRule::CkL,
                        premises,
                        phi: (**phi).clone(),
                        psi: (**psi).clone(),
                        boxes: sel_boxes,
                        diams: sel_diams,
                        eta: None,
                        theta: None,
                        side,
                    });
                }
            }
        }
    }
}

fn classical_prop_instances(goal: &Sequent, out: &mut Vec<Instance>) {
    for f in uniques(goal.ant()) {
        if matches!(f, Formula::Atom(_)) && goal.suc().contains(f) {
            out.push((SeqRule::Init, vec![]));
        }
    }
    if goal.ant().contains(&Formula::Bot) {
        out.push((SeqRule::BotL, vec![]));
    }

    for f in uniques(goal.ant()) {
        match f {
            Formula::And(l, r) => {
                let p = goal.without_ant(f).with_ant((**l).clone()).with_ant((**r).clone());
                out.push((SeqRule::AndL, vec![p]));
            }
            Formula::Or(l, r) => {
                let base = goal.without_ant(f);
                out.push((
                    SeqRule::OrL,
                    vec![base.with_ant((**l).clone()), base.with_ant((**r).clone())],
                ));
            }
            Formula::Imp(l, r) => {
                let base = goal.without_ant(f);
                let mut suc_l = base.suc().to_vec();
                suc_l.push((**l).clone());
                out.push((
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

    for f in uniques(goal.suc()) {
        match f {
            Formula::And(l, r) => {
                let (ant, suc) = without_suc(goal, f);
                let mut s1 = suc.clone();
                s1.push((**l).clone());
                let mut s2 = suc;
                s2.push((**r).clone());
                out.push((
                    SeqRule::AndR,
                    vec![Sequent::new(ant.clone(), s1), Sequent::new(ant, s2)],
                ));
            }
            Formula::Or(l, r) => {
                let (ant, mut suc) = without_suc(goal, f);
                suc.push((**l).clone());
                suc.push((**r).clone());
                out.push((SeqRule::OrR, vec![Sequent::new(ant, suc)]));
            }
            Formula::Imp(l, r) => {
                let (mut ant, mut suc) = without_suc(goal, f);
                ant.push((**l).clone());
                suc.push((**r).clone());
                out.push((SeqRule::ImpR, vec![Sequent::new(ant, suc)]));
            }
            _ => {}
        }
    }

}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{atom, cond_box, top, Formula};

    #[test]
    fn box_rule_with_one_selected_box() {
        // p > q => p > q admits the instance with n = 1 and premises
        // {p => p, p => p, q => q}.
        let goal = Sequent::single(
            vec![cond_box(atom("p"), atom("q"))],
            Some(cond_box(atom("p"), atom("q"))),
        );
        let instances = rule_instances(&goal, LogicId::ConstCK).unwrap();
        let want: Vec<Sequent> = vec![
            Sequent::single(vec![atom("p")], Some(atom("p"))),
            Sequent::single(vec![atom("p")], Some(atom("p"))),
            Sequent::single(vec![atom("q")], Some(atom("q"))),
        ];
        assert!(instances
            .iter()
            .any(|(r, ps)| *r == SeqRule::Cb && ps == &want));
    }

    #[test]
    fn box_rule_with_empty_selection() {
        let goal = Sequent::goal(cond_box(atom("p"), top()));
        let instances = rule_instances(&goal, LogicId::ConstCKBox).unwrap();
        let want = vec![Sequent::goal(top())];
        assert!(instances
            .iter()
            .any(|(r, ps)| *r == SeqRule::Cb && ps == &want));
    }

    #[test]
    fn bottom_left_is_zero_premise() {
        let goal = Sequent::single(vec![atom("p"), Formula::Bot], Some(atom("q")));
        let instances = rule_instances(&goal, LogicId::ConstCK).unwrap();
        assert!(instances.iter().any(|(r, ps)| *r == SeqRule::BotL && ps.is_empty()));
    }

    #[test]
    fn illegal_goals_are_rejected() {
        let two = Sequent::new(vec![], vec![atom("p"), atom("q")]);
        assert!(rule_instances(&two, LogicId::ConstCK).is_err());
        assert!(rule_instances(&two, LogicId::ClassicalCK).is_ok());
        let diam = Sequent::goal(crate::formula::cond_diam(atom("p"), atom("q")));
        assert!(rule_instances(&diam, LogicId::ConstCKBox).is_err());
        assert!(rule_instances(&diam, LogicId::ConstCK).is_ok());
    }
}
