//! Structural recursion from sequent derivations to Hilbert proofs.
//!
//! Each sequent rule is replaced by a derived Hilbert rule: the conditional
//! rules by the congruence/monotonicity templates, the propositional rules by
//! deduction-theorem glue. The formula interpretation of a sequent is
//! `/\ant -> \/suc` with the empty antecedent omitted and the empty succedent
//! read as `false`.

use thiserror::Error;

use crate::formula::{and, imp, neg, Formula};
use crate::sequent::{
    check_derivation_report, conditional_instances, fold_and, fold_or, CondInstance, LogicId,
    SeqDerivation, SeqRule, Sequent,
};

use super::build::{Builder, Env, Ref};
use super::{AxiomId, HilbertProof};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("derivation does not check in {logic}: {reason}")]
    BadDerivation { logic: LogicId, reason: String },
}

/// Compiles a checked derivation into a Hilbert proof of the formula
/// interpretation of its conclusion.
pub fn compile_to_hilbert(d: &SeqDerivation, logic: LogicId) -> Result<HilbertProof, CompileError> {
    check_derivation_report(d, logic).map_err(|e| CompileError::BadDerivation {
        logic,
        reason: e.to_string(),
    })?;
    let mut c = Compiler { b: Builder::new(logic.into()), logic };
    let out = c.node(d);
    assert_eq!(
        *c.b.formula(out),
        d.conclusion.interpretation(),
        "compiled theorem must be the interpretation of the conclusion"
    );
    Ok(c.b.finish_at(out))
}

struct Compiler {
    b: Builder,
    logic: LogicId,
}

impl Compiler {
    fn node(&mut self, d: &SeqDerivation) -> Ref {
        let premise_thms: Vec<(Sequent, Ref)> = d
            .premises
            .iter()
            .map(|p| (p.conclusion.clone(), self.node(p)))
            .collect();
        let lookup = move |want: &Sequent| -> Ref {
            premise_thms
                .iter()
                .find(|(s, _)| s == want)
                .map(|(_, r)| *r)
                .expect("checked derivation premise")
        };
        match d.rule {
            SeqRule::MpBox => self.mp_box(d, &lookup),
            SeqRule::MpDiam => self.mp_diam(&d.conclusion, &lookup),
            SeqRule::Init
            | SeqRule::BotL
            | SeqRule::AndL
            | SeqRule::AndR
            | SeqRule::OrL
            | SeqRule::OrR1
            | SeqRule::OrR2
            | SeqRule::OrR
            | SeqRule::ImpR
            | SeqRule::ImpL => self.propositional(d, &lookup),
            _ => self.conditional(d, &lookup),
        }
    }

    /// Runs `body` under the hypothesis `/\goal.ant` (or at the top level if
    /// the antecedent is empty) and returns the theorem `iota(goal)`.
    fn under_ant<F>(&mut self, goal: &Sequent, body: F) -> Ref
    where
        F: FnOnce(&mut Self, &Env) -> Ref,
    {
        match fold_and(goal.ant()) {
            None => {
                let env = Env::new();
                body(self, &env)
            }
            Some(conj) => {
                let h = self.b.begin(conj);
                let mut env = Env::new();
                self.b.explode_conj(h, &mut env);
                let r = body(self, &env);
                self.b.end(r)
            }
        }
    }

    /// The `\/suc` value of a premise, from its compiled theorem.
    fn use_premise(&mut self, thm: Ref, premise: &Sequent, env: &Env) -> Ref {
        match fold_and(premise.ant()) {
            None => self.b.import(thm),
            Some(conj) => {
                let a = self.b.assemble_conj(&conj, env);
                self.b.mp(a, thm)
            }
        }
    }

    /// Lifts a derived disjunct into the goal succedent.
    fn inject(&mut self, value: Ref, suc: &[Formula]) -> Ref {
        let f = self.b.formula(value).clone();
        if suc.len() == 1 && suc[0] == f {
            return value;
        }
        if suc.is_empty() {
            debug_assert_eq!(f, Formula::Bot);
            return value;
        }
        let im = self.b.imp_into_disj(&f, suc);
        self.b.mp(value, im)
    }

    fn propositional(&mut self, d: &SeqDerivation, lookup: &dyn Fn(&Sequent) -> Ref) -> Ref {
        let goal = d.conclusion.clone();
        let suc = goal.suc().to_vec();
        match d.rule {
            SeqRule::Init => self.under_ant(&goal, |c, env| {
                let p = suc
                    .iter()
                    .find(|f| matches!(f, Formula::Atom(_)) && env.contains_key(*f))
                    .expect("init shares an atom")
                    .clone();
                let r = env[&p];
                c.inject(r, &suc)
            }),
            SeqRule::BotL => self.under_ant(&goal, |c, env| {
                let bot = env[&Formula::Bot];
                c.b.ex_falso(bot, fold_or(&suc))
            }),
            SeqRule::AndL | SeqRule::OrR => {
                // The exploded antecedent already covers the and-left premise;
                // the classical or-right premise splits one succedent
                // disjunct in two.
                let premise = d.premises[0].conclusion.clone();
                let thm = lookup(&premise);
                self.under_ant(&goal, |c, env| {
                    let v = c.use_premise(thm, &premise, env);
                    c.lift_disj(v, premise.suc(), &suc)
                })
            }
            SeqRule::AndR => self.and_r(d, lookup),
            SeqRule::OrR1 | SeqRule::OrR2 => {
                let premise = d.premises[0].conclusion.clone();
                let thm = lookup(&premise);
                let or_f = suc[0].clone();
                let right = d.rule == SeqRule::OrR2;
                self.under_ant(&goal, |c, env| {
                    let v = c.use_premise(thm, &premise, env);
                    let ax = match &or_f {
                        Formula::Or(l, r) => {
                            if right {
                                c.b.axiom(AxiomId::Ipl7, imp((**r).clone(), or_f.clone()))
                            } else {
                                c.b.axiom(AxiomId::Ipl6, imp((**l).clone(), or_f.clone()))
                            }
                        }
                        _ => unreachable!(),
                    };
                    c.b.mp(v, ax)
                })
            }
            SeqRule::OrL => self.or_l(d, lookup),
            SeqRule::ImpR => self.imp_r(d, lookup),
            SeqRule::ImpL => {
                if self.logic == LogicId::ClassicalCK {
                    self.classical_imp_l(d, lookup)
                } else {
                    self.imp_l(d, lookup)
                }
            }
            _ => unreachable!("not a propositional rule"),
        }
    }

    fn and_r(&mut self, d: &SeqDerivation, lookup: &dyn Fn(&Sequent) -> Ref) -> Ref {
        let goal = d.conclusion.clone();
        let suc = goal.suc().to_vec();
        let (l, r, p1, p2) = goal
            .suc()
            .iter()
            .find_map(|f| match f {
                Formula::And(l, r) => {
                    let mut rest = suc.clone();
                    rest.remove(rest.iter().position(|g| g == f).unwrap());
                    let mut s1 = rest.clone();
                    s1.push((**l).clone());
                    let mut s2 = rest;
                    s2.push((**r).clone());
                    let p1 = Sequent::new(goal.ant().to_vec(), s1);
                    let p2 = Sequent::new(goal.ant().to_vec(), s2);
                    (d.premises.iter().any(|p| p.conclusion == p1)
                        && d.premises.iter().any(|p| p.conclusion == p2))
                    .then(|| ((**l).clone(), (**r).clone(), p1, p2))
                }
                _ => None,
            })
            .expect("and_r principal");
        let (t1, t2) = (lookup(&p1), lookup(&p2));
        self.under_ant(&goal, |c, env| {
            let v1 = c.use_premise(t1, &p1, env);
            if c.logic != LogicId::ClassicalCK {
                let v2 = c.use_premise(t2, &p2, env);
                let pair = c.b.and_intro(v1, v2);
                return c.inject(pair, &suc);
            }
            let v2 = c.use_premise(t2, &p2, env);
            let goal_disj = fold_or(&suc);
            let p1_suc = p1.suc().to_vec();
            let p2_suc = p2.suc().to_vec();
            let suc_vec = suc.clone();
            let (l2, r2) = (l.clone(), r.clone());
            c.b.disj_cases(v1, &p1_suc, &goal_disj, &mut |b, case, h| {
                if *case == l2 && !suc_vec.contains(case) {
                    b.disj_cases(v2, &p2_suc, &fold_or(&suc_vec), &mut |b2, case2, h2| {
                        if *case2 == r2 && !suc_vec.contains(case2) {
                            let pair = b2.and_intro(h, h2);
                            let im = b2.imp_into_disj(&and(l2.clone(), r2.clone()), &suc_vec);
                            b2.mp(pair, im)
                        } else {
                            let im = b2.imp_into_disj(case2, &suc_vec);
                            b2.mp(h2, im)
                        }
                    })
                } else {
                    let im = b.imp_into_disj(case, &suc_vec);
                    b.mp(h, im)
                }
            })
        })
    }

    fn or_l(&mut self, d: &SeqDerivation, lookup: &dyn Fn(&Sequent) -> Ref) -> Ref {
        let goal = d.conclusion.clone();
        let suc = goal.suc().to_vec();
        let (or_formula, l, r) = goal
            .ant()
            .iter()
            .find_map(|f| match f {
                Formula::Or(l, r) => {
                    let base = goal.without_ant(f);
                    let p1 = base.with_ant((**l).clone());
                    let p2 = base.with_ant((**r).clone());
                    (d.premises.iter().any(|p| p.conclusion == p1)
                        && d.premises.iter().any(|p| p.conclusion == p2))
                    .then(|| (f.clone(), (**l).clone(), (**r).clone()))
                }
                _ => None,
            })
            .expect("or_l principal");
        let base = goal.without_ant(&or_formula);
        let p1 = base.with_ant(l.clone());
        let p2 = base.with_ant(r.clone());
        let (t1, t2) = (lookup(&p1), lookup(&p2));
        let goal_disj = fold_or(&suc);
        self.under_ant(&goal, |c, env| {
            let or_ref = env[&or_formula];
            let disj = vec![l.clone(), r.clone()];
            c.b.disj_cases(or_ref, &disj, &goal_disj, &mut |b, case, h| {
                let mut env2 = env.clone();
                b.explode_conj(h, &mut env2);
                let (thm, prem) = if *case == l { (t1, &p1) } else { (t2, &p2) };
                match fold_and(prem.ant()) {
                    None => b.import(thm),
                    Some(conj) => {
                        let a = b.assemble_conj(&conj, &env2);
                        b.mp(a, thm)
                    }
                }
            })
        })
    }

    fn imp_r(&mut self, d: &SeqDerivation, lookup: &dyn Fn(&Sequent) -> Ref) -> Ref {
        let goal = d.conclusion.clone();
        let suc = goal.suc().to_vec();
        let (l, r, premise) = goal
            .suc()
            .iter()
            .find_map(|f| match f {
                Formula::Imp(l, r) => {
                    let mut rest = suc.clone();
                    rest.remove(rest.iter().position(|g| g == f).unwrap());
                    rest.push((**r).clone());
                    let p = Sequent::new(
                        goal.ant().iter().cloned().chain([(**l).clone()]).collect(),
                        if self.logic == LogicId::ClassicalCK { rest } else { vec![(**r).clone()] },
                    );
                    d.premises
                        .iter()
                        .any(|q| q.conclusion == p)
                        .then(|| ((**l).clone(), (**r).clone(), p))
                }
                _ => None,
            })
            .expect("imp_r principal");
        let thm = lookup(&premise);
        if self.logic != LogicId::ClassicalCK {
            return self.under_ant(&goal, |c, env| {
                let h = c.b.begin(l.clone());
                let mut env2 = env.clone();
                c.b.explode_conj(h, &mut env2);
                let v = match fold_and(premise.ant()) {
                    None => c.b.import(thm),
                    Some(conj) => {
                        let a = c.b.assemble_conj(&conj, &env2);
                        c.b.mp(a, thm)
                    }
                };
                let out = c.b.end(v);
                c.inject(out, &suc)
            });
        }
        self.under_ant(&goal, |c, env| {
            let em = c.b.excluded_middle(&l);
            let cases = vec![l.clone(), neg(l.clone())];
            let goal_disj = fold_or(&suc);
            let suc_vec = suc.clone();
            let p_suc = premise.suc().to_vec();
            let (l2, r2) = (l.clone(), r.clone());
            let premise = premise.clone();
            let env = env.clone();
            c.b.disj_cases(em, &cases, &goal_disj, &mut |b, case, h| {
                if *case == l2 {
                    let mut env2 = env.clone();
                    b.explode_conj(h, &mut env2);
                    let v = match fold_and(premise.ant()) {
                        None => b.import(thm),
                        Some(conj) => {
                            let a = b.assemble_conj(&conj, &env2);
                            b.mp(a, thm)
                        }
                    };
                    b.disj_cases(v, &p_suc, &fold_or(&suc_vec), &mut |b2, case2, h2| {
                        if *case2 == r2 && !suc_vec.contains(case2) {
                            let ax =
                                b2.axiom(AxiomId::Ipl1, imp(r2.clone(), imp(l2.clone(), r2.clone())));
                            let ir = b2.mp(h2, ax);
                            let im = b2.imp_into_disj(&imp(l2.clone(), r2.clone()), &suc_vec);
                            b2.mp(ir, im)
                        } else {
                            let im = b2.imp_into_disj(case2, &suc_vec);
                            b2.mp(h2, im)
                        }
                    })
                } else {
                    let lr = {
                        let hl = b.begin(l2.clone());
                        let bot = b.mp(hl, h);
                        let out = b.ex_falso(bot, r2.clone());
                        b.end(out)
                    };
                    let im = b.imp_into_disj(&imp(l2.clone(), r2.clone()), &suc_vec);
                    b.mp(lr, im)
                }
            })
        })
    }

    fn imp_l(&mut self, d: &SeqDerivation, lookup: &dyn Fn(&Sequent) -> Ref) -> Ref {
        let goal = d.conclusion.clone();
        let (imp_formula, l, r) = goal
            .ant()
            .iter()
            .find_map(|f| match f {
                Formula::Imp(l, r) => {
                    let left = Sequent::new(goal.ant().to_vec(), vec![(**l).clone()]);
                    let right = goal.without_ant(f).with_ant((**r).clone());
                    (d.premises.iter().any(|p| p.conclusion == left)
                        && d.premises.iter().any(|p| p.conclusion == right))
                    .then(|| (f.clone(), (**l).clone(), (**r).clone()))
                }
                _ => None,
            })
            .expect("imp_l principal");
        let left = Sequent::new(goal.ant().to_vec(), vec![l]);
        let right = goal.without_ant(&imp_formula).with_ant(r);
        let (t1, t2) = (lookup(&left), lookup(&right));
        self.under_ant(&goal, |c, env| {
            let phi = c.use_premise(t1, &left, env);
            let imp_ref = env[&imp_formula];
            let psi = c.b.mp(phi, imp_ref);
            let mut env2 = env.clone();
            c.b.explode_conj(psi, &mut env2);
            c.use_premise(t2, &right, &env2)
        })
    }

    fn classical_imp_l(&mut self, d: &SeqDerivation, lookup: &dyn Fn(&Sequent) -> Ref) -> Ref {
        let goal = d.conclusion.clone();
        let suc = goal.suc().to_vec();
        let (imp_formula, l, _r, p1, p2) = goal
            .ant()
            .iter()
            .find_map(|f| match f {
                Formula::Imp(l, r) => {
                    let base = goal.without_ant(f);
                    let mut suc_l = base.suc().to_vec();
                    suc_l.push((**l).clone());
                    let p1 = Sequent::new(base.ant().to_vec(), suc_l);
                    let p2 = base.with_ant((**r).clone());
                    (d.premises.iter().any(|p| p.conclusion == p1)
                        && d.premises.iter().any(|p| p.conclusion == p2))
                    .then(|| (f.clone(), (**l).clone(), (**r).clone(), p1, p2))
                }
                _ => None,
            })
            .expect("imp_l principal");
        let (t1, t2) = (lookup(&p1), lookup(&p2));
        self.under_ant(&goal, |c, env| {
            let v1 = c.use_premise(t1, &p1, env);
            let p1_suc = p1.suc().to_vec();
            let goal_disj = fold_or(&suc);
            let suc_vec = suc.clone();
            let env = env.clone();
            let p2 = p2.clone();
            let imp_formula = imp_formula.clone();
            let l = l.clone();
            c.b.disj_cases(v1, &p1_suc, &goal_disj, &mut |b, case, h| {
                if *case == l && !suc_vec.contains(case) {
                    let psi = b.mp(h, env[&imp_formula]);
                    let mut env2 = env.clone();
                    b.explode_conj(psi, &mut env2);
                    match fold_and(p2.ant()) {
                        None => b.import(t2),
                        Some(conj) => {
                            let a = b.assemble_conj(&conj, &env2);
                            b.mp(a, t2)
                        }
                    }
                } else {
                    let im = b.imp_into_disj(case, &suc_vec);
                    b.mp(h, im)
                }
            })
        })
    }

    /// From a `\/from` value, derive `\/to` when each disjunct of `from` is
    /// either a disjunct of `to` or a direct disjunct of one of its members.
    fn lift_disj(&mut self, value: Ref, from: &[Formula], to: &[Formula]) -> Ref {
        if from == to {
            return value;
        }
        if from.is_empty() {
            return self.b.ex_falso(value, fold_or(to));
        }
        let goal_disj = fold_or(to);
        let from_vec = from.to_vec();
        let to_vec = to.to_vec();
        self.b.disj_cases(value, &from_vec, &goal_disj, &mut |b, case, h| {
            if to_vec.contains(case) {
                let im = b.imp_into_disj(case, &to_vec);
                return b.mp(h, im);
            }
            let or_f = to_vec
                .iter()
                .find(|f| matches!(f, Formula::Or(l, r) if **l == *case || **r == *case))
                .expect("disjunct embeds into the goal")
                .clone();
            let ax = match &or_f {
                Formula::Or(l, _) if **l == *case => {
                    b.axiom(AxiomId::Ipl6, imp(case.clone(), or_f.clone()))
                }
                Formula::Or(_, _) => b.axiom(AxiomId::Ipl7, imp(case.clone(), or_f.clone())),
                _ => unreachable!(),
            };
            let v = b.mp(h, ax);
            let im = b.imp_into_disj(&or_f, &to_vec);
            b.mp(v, im)
        })
    }

    fn mp_box(&mut self, d: &SeqDerivation, lookup: &dyn Fn(&Sequent) -> Ref) -> Ref {
        let goal = d.conclusion.clone();
        let (box_formula, phi, psi) = goal
            .ant()
            .iter()
            .find_map(|f| match f {
                Formula::CondBox(a, b) => {
                    let left = Sequent::new(goal.ant().to_vec(), vec![(**a).clone()]);
                    let right = goal.with_ant((**b).clone());
                    (d.premises.iter().any(|p| p.conclusion == left)
                        && d.premises.iter().any(|p| p.conclusion == right))
                    .then(|| (f.clone(), (**a).clone(), (**b).clone()))
                }
                _ => None,
            })
            .expect("mp_box principal");
        let left = Sequent::new(goal.ant().to_vec(), vec![phi.clone()]);
        let right = goal.with_ant(psi.clone());
        let (t1, t2) = (lookup(&left), lookup(&right));
        self.under_ant(&goal, |c, env| {
            let phi_v = c.use_premise(t1, &left, env);
            let ax = c.b.axiom(
                AxiomId::MpBox,
                imp(box_formula.clone(), imp(phi.clone(), psi.clone())),
            );
            let pimp = c.b.mp(env[&box_formula], ax);
            let psi_v = c.b.mp(phi_v, pimp);
            let mut env2 = env.clone();
            c.b.explode_conj(psi_v, &mut env2);
            match fold_and(right.ant()) {
                None => c.b.import(t2),
                Some(conj) => {
                    let a = c.b.assemble_conj(&conj, &env2);
                    c.b.mp(a, t2)
                }
            }
        })
    }

    fn mp_diam(&mut self, goal: &Sequent, lookup: &dyn Fn(&Sequent) -> Ref) -> Ref {
        let (phi, psi) = match goal.suc().first() {
            Some(Formula::CondDiam(a, b)) => ((**a).clone(), (**b).clone()),
            _ => unreachable!("mp_diam needs a might succedent"),
        };
        let p1 = Sequent::new(goal.ant().to_vec(), vec![phi.clone()]);
        let p2 = Sequent::new(goal.ant().to_vec(), vec![psi.clone()]);
        let (t1, t2) = (lookup(&p1), lookup(&p2));
        let goal2 = goal.clone();
        self.under_ant(&goal2, |c, env| {
            let a = c.use_premise(t1, &p1, env);
            let b = c.use_premise(t2, &p2, env);
            let pair = c.b.and_intro(a, b);
            let ax = c.b.axiom(
                AxiomId::MpDiam,
                imp(
                    and(phi.clone(), psi.clone()),
                    crate::formula::cond_diam(phi.clone(), psi.clone()),
                ),
            );
            c.b.mp(pair, ax)
        })
    }

    /// The conditional rules, via the structured instance that produced this
    /// node.
    fn conditional(&mut self, d: &SeqDerivation, lookup: &dyn Fn(&Sequent) -> Ref) -> Ref {
        let inst = match_cond_instance(d, self.logic);
        let eq_box: Vec<(Ref, Ref)> = inst
            .boxes
            .iter()
            .map(|(rho, _)| eq_pair(&inst.phi, rho, lookup))
            .collect();
        let eq_diam: Vec<(Ref, Ref)> = inst
            .diams
            .iter()
            .map(|(xi, _)| eq_pair(&inst.phi, xi, lookup))
            .collect();
        let eq_eta = inst.eta.as_ref().map(|eta| eq_pair(&inst.phi, eta, lookup));
        let side_thm = lookup(&inst.side);
        let core = CondCore { inst: &inst, eq_box, eq_diam, eq_eta, side_thm };
        let (g, sources) = cond_rule_theorem(&mut self.b, &core);
        let goal = d.conclusion.clone();
        let suc = goal.suc().to_vec();
        match d.rule {
            SeqRule::CkR | SeqRule::CkL => {
                self.classical_conditional_embed(&goal, &suc, &inst, g, &sources)
            }
            _ => self.under_ant(&goal, |c, env| {
                let value = if sources.is_empty() {
                    c.b.import(g)
                } else {
                    let conj = fold_and(&sources).unwrap();
                    let a = c.b.assemble_conj(&conj, env);
                    c.b.mp(a, g)
                };
                let f = c.b.formula(value).clone();
                if f == Formula::Bot {
                    c.b.ex_falso(value, fold_or(&suc))
                } else {
                    c.inject(value, &suc)
                }
            }),
        }
    }

    /// Embeds the classical conditional theorem under the antecedent, with
    /// excluded-middle case analysis over the selected succedent mights.
    fn classical_conditional_embed(
        &mut self,
        goal: &Sequent,
        suc: &[Formula],
        inst: &CondInstance,
        g: Ref,
        sources: &[Formula],
    ) -> Ref {
        let diam_formulas: Vec<Formula> = inst
            .diams
            .iter()
            .map(|(eta, chi)| crate::formula::cond_diam(eta.clone(), chi.clone()))
            .collect();
        let neg_to_box: Vec<Ref> = inst
            .diams
            .iter()
            .map(|(eta, chi)| self.neg_diam_to_box(eta, chi))
            .collect();
        let is_left = inst.rule == SeqRule::CkL;
        let goal2 = goal.clone();
        let suc_vec = suc.to_vec();
        let sources = sources.to_vec();
        self.under_ant(&goal2, |c, env| {
            em_cascade(
                &mut c.b,
                &diam_formulas,
                &neg_to_box,
                0,
                &mut Vec::new(),
                &suc_vec,
                &mut |b, neg_boxes| {
                    let mut env2 = env.clone();
                    for r in neg_boxes {
                        let f = b.formula(*r).clone();
                        env2.insert(f, *r);
                    }
                    let value = if sources.is_empty() {
                        b.import(g)
                    } else {
                        let conj = fold_and(&sources).unwrap();
                        let a = b.assemble_conj(&conj, &env2);
                        b.mp(a, g)
                    };
                    if is_left {
                        b.ex_falso(value, fold_or(&suc_vec))
                    } else {
                        let f = b.formula(value).clone();
                        let im = b.imp_into_disj(&f, &suc_vec);
                        b.mp(value, im)
                    }
                },
            )
        })
    }

    /// `~(eta ?> chi) -> (eta > ~chi)` from the classical might definition.
    fn neg_diam_to_box(&mut self, eta: &Formula, chi: &Formula) -> Ref {
        let diam = crate::formula::cond_diam(eta.clone(), chi.clone());
        let boxed = crate::formula::cond_box(eta.clone(), neg(chi.clone()));
        let def = self.b.axiom(
            AxiomId::DefDiam,
            crate::formula::iff(diam.clone(), neg(boxed.clone())),
        );
        let back = self.b.and_elim_r(def); // ~(eta > ~chi) -> (eta ?> chi)
        let nn = {
            let h = self.b.begin(neg(diam.clone()));
            let inner = {
                let h2 = self.b.begin(neg(boxed.clone()));
                let dm = self.b.mp(h2, back);
                let bot = self.b.mp(dm, h);
                self.b.end(bot)
            };
            self.b.end(inner)
        };
        let dne = self.b.axiom(AxiomId::Dne, imp(neg(neg(boxed.clone())), boxed));
        self.b.imp_trans(nn, dne)
    }
}

fn eq_pair(phi: &Formula, rho: &Formula, lookup: &dyn Fn(&Sequent) -> Ref) -> (Ref, Ref) {
    let [fwd, bwd] = Sequent::equivalence(phi, rho);
    (lookup(&fwd), lookup(&bwd))
}

/// Recovers the structured instance behind a checked conditional node.
fn match_cond_instance(d: &SeqDerivation, logic: LogicId) -> CondInstance {
    let mut got: Vec<&Sequent> = d.premises.iter().map(|p| &p.conclusion).collect();
    got.sort();
    conditional_instances(&d.conclusion, logic)
        .into_iter()
        .find(|inst| {
            if inst.rule != d.rule || inst.premises.len() != got.len() {
                return false;
            }
            let mut want: Vec<&Sequent> = inst.premises.iter().collect();
            want.sort();
            want == got
        })
        .expect("checked conditional node matches an instance")
}

/// Nested excluded-middle case analysis over the selected succedent mights.
fn em_cascade(
    b: &mut Builder,
    diams: &[Formula],
    neg_to_box: &[Ref],
    idx: usize,
    neg_boxes: &mut Vec<Ref>,
    suc: &[Formula],
    all_neg: &mut dyn FnMut(&mut Builder, &[Ref]) -> Ref,
) -> Ref {
    if idx == diams.len() {
        return all_neg(b, neg_boxes);
    }
    let dj = diams[idx].clone();
    let em = b.excluded_middle(&dj);
    let cases = vec![dj.clone(), neg(dj.clone())];
    let goal = fold_or(suc);
    b.disj_cases(em, &cases, &goal, &mut |b, case, h| {
        if *case == dj {
            let im = b.imp_into_disj(&dj, suc);
            b.mp(h, im)
        } else {
            let boxed = b.mp(h, neg_to_box[idx]);
            neg_boxes.push(boxed);
            let out = em_cascade(b, diams, neg_to_box, idx + 1, neg_boxes, suc, all_neg);
            neg_boxes.pop();
            out
        }
    })
}

/// Premise theorems for the conditional core.
pub(crate) struct CondCore<'a> {
    pub inst: &'a CondInstance,
    /// Theorems `phi -> rho_i` and `rho_i -> phi` per selected box.
    pub eq_box: Vec<(Ref, Ref)>,
    /// The same for the selected mights.
    pub eq_diam: Vec<(Ref, Ref)>,
    pub eq_eta: Option<(Ref, Ref)>,
    /// Theorem `iota(side)`.
    pub side_thm: Ref,
}

/// Builds the derived Hilbert rule behind a conditional sequent rule: a
/// theorem `/\sources -> value` over the rule's consumed conditionals, or
/// the bare value when none are consumed. Sources come in box, might,
/// principal order.
pub(crate) fn cond_rule_theorem(b: &mut Builder, core: &CondCore<'_>) -> (Ref, Vec<Formula>) {
    let inst = core.inst;
    let phi = inst.phi.clone();
    let with_id = matches!(inst.rule, SeqRule::CbId | SeqRule::CdId | SeqRule::CbdId);

    // Theorems converting each selected box into a phi-headed one.
    let box_conversions: Vec<(Formula, Formula, Ref)> = inst
        .boxes
        .iter()
        .zip(&core.eq_box)
        .map(|((rho, sigma), (f, g))| {
            let equiv = b.and_intro(*f, *g);
            let conv = b.ra_box_bwd(equiv, sigma); // (rho > sigma) -> (phi > sigma)
            (crate::formula::cond_box(rho.clone(), sigma.clone()), sigma.clone(), conv)
        })
        .collect();

    match inst.rule {
        SeqRule::Cb | SeqRule::CbId | SeqRule::CkR => {
            cond_box_right(b, core, &phi, with_id, box_conversions)
        }
        SeqRule::Cd
        | SeqRule::CdId
        | SeqRule::Cbd
        | SeqRule::CbdId
        | SeqRule::CdCem
        | SeqRule::CbdCem => cond_might_left(b, core, &phi, with_id, box_conversions),
        SeqRule::CkL => classical_might_left(b, core, &phi, box_conversions),
        _ => unreachable!("not a conditional rule"),
    }
}

fn box_payload(f: &Formula) -> Formula {
    match f {
        Formula::CondBox(_, p) => (**p).clone(),
        other => panic!("expected a box, got `{other}`"),
    }
}

fn diam_payload(f: &Formula) -> Formula {
    match f {
        Formula::CondDiam(_, p) => (**p).clone(),
        other => panic!("expected a might, got `{other}`"),
    }
}

/// Folds phi-headed boxes into one box over the right-nested conjunction of
/// their payloads; `values` and `payloads` run in parallel.
fn cc_fold(b: &mut Builder, phi: &Formula, values: &[Ref], payloads: &[Formula]) -> Ref {
    let mut acc = *values.last().unwrap();
    for i in (0..values.len() - 1).rev() {
        let acc_payload = box_payload(b.formula(acc));
        let this_payload = payloads[i].clone();
        let cc = b.axiom(
            AxiomId::CcBox,
            imp(
                and(
                    crate::formula::cond_box(phi.clone(), this_payload.clone()),
                    crate::formula::cond_box(phi.clone(), acc_payload.clone()),
                ),
                crate::formula::cond_box(phi.clone(), and(this_payload, acc_payload)),
            ),
        );
        let pair = b.and_intro(values[i], acc);
        acc = b.mp(pair, cc);
    }
    acc
}

/// Right box rules: derive `phi > psi` from the selected boxes (plus, for
/// the classical rule, boxes obtained from refuted succedent mights).
fn cond_box_right(
    b: &mut Builder,
    core: &CondCore<'_>,
    phi: &Formula,
    with_id: bool,
    mut conversions: Vec<(Formula, Formula, Ref)>,
) -> (Ref, Vec<Formula>) {
    let inst = core.inst;
    let psi = inst.psi.clone();
    let classical = inst.rule == SeqRule::CkR;

    if classical {
        for ((eta, chi), (f, g)) in inst.diams.iter().zip(&core.eq_diam) {
            let equiv = b.and_intro(*f, *g);
            let payload = neg(chi.clone());
            let conv = b.ra_box_bwd(equiv, &payload);
            conversions.push((
                crate::formula::cond_box(eta.clone(), payload.clone()),
                payload,
                conv,
            ));
        }
    }

    let mut payloads: Vec<Formula> = conversions.iter().map(|(_, p, _)| p.clone()).collect();
    if with_id {
        payloads.push(phi.clone());
    }

    if payloads.is_empty() {
        // Nothing consumed: the side premise is a theorem.
        let value = b.box_of_theorem(core.side_thm, phi);
        return (value, Vec::new());
    }

    let payload_conj = fold_and(&payloads).unwrap();
    let to_psi = if classical {
        classical_side_glue(b, core, &payload_conj, &psi)
    } else {
        let target = fold_and(inst.side.ant()).expect("side premise has an antecedent");
        if payload_conj == target {
            core.side_thm
        } else {
            let reassoc = b.prove_conj_imp(&payload_conj, &target);
            b.imp_trans(reassoc, core.side_thm)
        }
    };
    let rm = b.rm_box(to_psi, phi); // (phi > payload) -> (phi > psi)

    let sources: Vec<Formula> = conversions.iter().map(|(src, _, _)| src.clone()).collect();
    if sources.is_empty() {
        // Only the virtual identity box: the theorem needs no antecedent.
        let id = b.axiom(AxiomId::IdBox, crate::formula::cond_box(phi.clone(), phi.clone()));
        let value = b.mp(id, rm);
        return (value, Vec::new());
    }
    let src_conj = fold_and(&sources).unwrap();
    let h = b.begin(src_conj);
    let mut env = Env::new();
    b.explode_conj(h, &mut env);
    let mut values: Vec<Ref> = Vec::new();
    for (src, _, conv) in &conversions {
        let s = env[src];
        values.push(b.mp(s, *conv));
    }
    if with_id {
        values.push(b.axiom(AxiomId::IdBox, crate::formula::cond_box(phi.clone(), phi.clone())));
    }
    let acc = cc_fold(b, phi, &values, &payloads);
    debug_assert_eq!(box_payload(b.formula(acc)), payload_conj);
    let out = b.mp(acc, rm);
    let g = b.end(out);
    (g, sources)
}

/// `payload -> psi` for the classical right rule: the side theorem gives
/// `\/ (chis + psi)` from the sigmas, and the negated chis in the payload
/// cut the other disjuncts down to `psi`.
fn classical_side_glue(
    b: &mut Builder,
    core: &CondCore<'_>,
    payload: &Formula,
    psi: &Formula,
) -> Ref {
    let side = core.inst.side.clone();
    let side_suc = side.suc().to_vec();
    let side_thm = core.side_thm;
    let psi = psi.clone();
    let h = b.begin(payload.clone());
    let mut env = Env::new();
    b.explode_conj(h, &mut env);
    let value = match fold_and(side.ant()) {
        None => b.import(side_thm),
        Some(conj) => {
            let a = b.assemble_conj(&conj, &env);
            b.mp(a, side_thm)
        }
    };
    let out = b.disj_cases(value, &side_suc, &psi, &mut |b2, case, h2| {
        if *case == psi {
            h2
        } else {
            let nc = env[&neg(case.clone())];
            let bot = b2.mp(h2, nc);
            b2.ex_falso(bot, psi.clone())
        }
    });
    b.end(out)
}

/// Left might rules of the constructive calculi: derive `eta ?> theta`
/// (or bottom) from the selected boxes, extra cem mights, and the principal.
fn cond_might_left(
    b: &mut Builder,
    core: &CondCore<'_>,
    phi: &Formula,
    with_id: bool,
    conversions: Vec<(Formula, Formula, Ref)>,
) -> (Ref, Vec<Formula>) {
    let inst = core.inst;
    let psi = inst.psi.clone();
    let principal = crate::formula::cond_diam(phi.clone(), psi.clone());
    let closing = inst.eta.is_none();

    let diam_conversions: Vec<(Formula, Formula, Ref)> = inst
        .diams
        .iter()
        .zip(&core.eq_diam)
        .map(|((xi, chi), (f, g))| {
            let equiv = b.and_intro(*f, *g);
            let conv = b.ra_diam_bwd(equiv, chi); // (xi ?> chi) -> (phi ?> chi)
            (crate::formula::cond_diam(xi.clone(), chi.clone()), chi.clone(), conv)
        })
        .collect();

    // Payload evolution: psi, then the cem chis, then the box sigmas (the
    // id variants add phi as a virtual identity box).
    let mut payload = psi.clone();
    let mut cem_steps: Vec<Ref> = Vec::new();
    for (_, chi, _) in &diam_conversions {
        let ax = b.axiom(
            AxiomId::CemDiam,
            imp(
                and(
                    crate::formula::cond_diam(phi.clone(), payload.clone()),
                    crate::formula::cond_diam(phi.clone(), chi.clone()),
                ),
                crate::formula::cond_diam(phi.clone(), and(payload.clone(), chi.clone())),
            ),
        );
        payload = and(payload, chi.clone());
        cem_steps.push(ax);
    }
    let mut box_payloads: Vec<Formula> = conversions.iter().map(|(_, s, _)| s.clone()).collect();
    if with_id {
        box_payloads.push(phi.clone());
    }
    let mut cw_steps: Vec<Ref> = Vec::new();
    for sigma in &box_payloads {
        let cw = b.cw_instance(phi, &payload, sigma);
        payload = and(payload, sigma.clone());
        cw_steps.push(cw);
    }

    let target = fold_and(inst.side.ant()).expect("side premise contains psi");
    let side_imp = if payload == target {
        core.side_thm
    } else {
        let reassoc = b.prove_conj_imp(&payload, &target);
        b.imp_trans(reassoc, core.side_thm)
    };
    let rm = b.rm_diam(side_imp, phi); // (phi ?> payload) -> (phi ?> theta|false)

    let finish: Ref = if closing {
        b.axiom(
            AxiomId::CnDiam,
            neg(crate::formula::cond_diam(phi.clone(), Formula::Bot)),
        )
    } else {
        let theta = inst.theta.as_ref().unwrap();
        let (f, g) = core.eq_eta.expect("cd rules carry the eta equivalence");
        let equiv = b.and_intro(f, g);
        b.ra_diam_fwd(equiv, theta) // (phi ?> theta) -> (eta ?> theta)
    };

    let mut sources: Vec<Formula> = conversions.iter().map(|(s, _, _)| s.clone()).collect();
    sources.extend(diam_conversions.iter().map(|(s, _, _)| s.clone()));
    sources.push(principal.clone());
    let src_conj = fold_and(&sources).unwrap();
    let h = b.begin(src_conj);
    let mut env = Env::new();
    b.explode_conj(h, &mut env);

    let mut cur = env[&principal];
    for ((src, _, conv), ax) in diam_conversions.iter().zip(&cem_steps) {
        let v = b.mp(env[src], *conv);
        let pair = b.and_intro(cur, v);
        cur = b.mp(pair, *ax);
    }
    let mut box_values: Vec<Ref> = Vec::new();
    for (src, _, conv) in &conversions {
        let s = env[src];
        box_values.push(b.mp(s, *conv));
    }
    if with_id {
        box_values.push(b.axiom(AxiomId::IdBox, crate::formula::cond_box(phi.clone(), phi.clone())));
    }
    for (v, cw) in box_values.iter().zip(&cw_steps) {
        let pair = b.and_intro(cur, *v);
        cur = b.mp(pair, *cw);
    }
    debug_assert_eq!(diam_payload(b.formula(cur)), payload);
    let moved = b.mp(cur, rm);
    let out = b.mp(moved, finish);
    let g = b.end(out);
    (g, sources)
}

/// The classical left rule: everything, including the principal might,
/// collapses into bottom through the might definition.
fn classical_might_left(
    b: &mut Builder,
    core: &CondCore<'_>,
    phi: &Formula,
    conversions: Vec<(Formula, Formula, Ref)>,
) -> (Ref, Vec<Formula>) {
    let inst = core.inst;
    let psi = inst.psi.clone();
    let principal = crate::formula::cond_diam(phi.clone(), psi.clone());

    let mut all_conversions = conversions;
    for ((eta, chi), (f, g)) in inst.diams.iter().zip(&core.eq_diam) {
        let equiv = b.and_intro(*f, *g);
        let payload = neg(chi.clone());
        let conv = b.ra_box_bwd(equiv, &payload);
        all_conversions.push((
            crate::formula::cond_box(eta.clone(), payload.clone()),
            payload,
            conv,
        ));
    }

    let payloads: Vec<Formula> = all_conversions.iter().map(|(_, p, _)| p.clone()).collect();
    let payload_conj = fold_and(&payloads);
    let glue = classical_left_glue(b, core, payload_conj.as_ref(), &psi, phi);

    let def = b.axiom(
        AxiomId::DefDiam,
        crate::formula::iff(
            principal.clone(),
            neg(crate::formula::cond_box(phi.clone(), neg(psi.clone()))),
        ),
    );
    let diam_to_neg = b.and_elim_l(def); // (phi ?> psi) -> ~(phi > ~psi)

    let rm = payload_conj.as_ref().map(|_| b.rm_box(glue, phi));

    let mut sources: Vec<Formula> = all_conversions.iter().map(|(s, _, _)| s.clone()).collect();
    sources.push(principal.clone());
    let src_conj = fold_and(&sources).unwrap();
    let h = b.begin(src_conj);
    let mut env = Env::new();
    b.explode_conj(h, &mut env);
    let boxed_not_psi = match rm {
        Some(rm) => {
            let mut values: Vec<Ref> = Vec::new();
            for (src, _, conv) in &all_conversions {
                let s = env[src];
                values.push(b.mp(s, *conv));
            }
            let acc = cc_fold(b, phi, &values, &payloads);
            b.mp(acc, rm)
        }
        None => b.import(glue), // already `phi > ~psi`
    };
    let nd = b.mp(env[&principal], diam_to_neg);
    let bot = b.mp(boxed_not_psi, nd);
    let g = b.end(bot);
    (g, sources)
}

/// `payload -> ~psi` for the classical left rule, or the theorem
/// `phi > ~psi` directly when only the principal is consumed.
fn classical_left_glue(
    b: &mut Builder,
    core: &CondCore<'_>,
    payload: Option<&Formula>,
    psi: &Formula,
    phi: &Formula,
) -> Ref {
    let side = core.inst.side.clone();
    let side_suc = side.suc().to_vec();
    let side_thm = core.side_thm;
    let not_psi = |b: &mut Builder, env: &Env| -> Ref {
        let hp = b.begin(psi.clone());
        let mut env2 = env.clone();
        b.explode_conj(hp, &mut env2);
        let value = match fold_and(side.ant()) {
            None => b.import(side_thm),
            Some(conj) => {
                let a = b.assemble_conj(&conj, &env2);
                b.mp(a, side_thm)
            }
        };
        let bot = if side_suc.is_empty() {
            value
        } else {
            b.disj_cases(value, &side_suc, &Formula::Bot, &mut |b2, case, h2| {
                let nc = env2[&neg(case.clone())];
                b2.mp(h2, nc)
            })
        };
        b.end(bot)
    };
    match payload {
        Some(p) => {
            let h = b.begin(p.clone());
            let mut env = Env::new();
            b.explode_conj(h, &mut env);
            let np = not_psi(b, &env);
            b.end(np)
        }
        None => {
            let env = Env::new();
            let np = not_psi(b, &env);
            b.box_of_theorem(np, phi)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::hilbert::{check_hilbert_report, HilbertSystem};
    use crate::sequent::{prove, ProofResult, SearchBudget};

    fn compile_checked(text: &str, logic: LogicId) {
        let goal = Sequent::goal(parse(text).unwrap());
        let d = match prove(&goal, logic, SearchBudget::default()).unwrap() {
            ProofResult::Proved(d) => d,
            other => panic!("{text}: expected proved, got {}", other.verdict()),
        };
        let proof = compile_to_hilbert(&d, logic).unwrap();
        let system: HilbertSystem = logic.into();
        if let Err(e) = check_hilbert_report(&proof, system) {
            panic!("{text} in {logic}: {e}\n{}", proof.render_text());
        }
        assert!(proof.hypotheses().next().is_none(), "compiled proofs are theorems");
        assert_eq!(*proof.conclusion().unwrap(), goal.interpretation());
    }

    #[test]
    fn compiles_the_box_axioms() {
        compile_checked("p > true", LogicId::ConstCKBox);
        compile_checked("(p > q & r) -> (p > q) & (p > r)", LogicId::ConstCK);
        compile_checked("(p > q) & (p > r) -> (p > q & r)", LogicId::ConstCK);
    }

    #[test]
    fn compiles_the_might_axioms() {
        compile_checked("~(p ?> false)", LogicId::ConstCK);
        compile_checked("(p > (q -> r)) -> ((p ?> q) -> (p ?> r))", LogicId::ConstCK);
        compile_checked("(p ?> q) & (p > r) -> (p ?> q & r)", LogicId::ConstCK);
    }

    #[test]
    fn compiles_propositional_reasoning() {
        compile_checked("p & q -> q & p", LogicId::ConstCK);
        compile_checked("(p | q) -> (q | p)", LogicId::ConstCK);
        compile_checked("(p -> q) -> ((q -> r) -> (p -> r))", LogicId::ConstCK);
        compile_checked("false -> p", LogicId::ConstCK);
    }

    #[test]
    fn compiles_the_extension_axioms() {
        compile_checked("p > p", LogicId::CCKID);
        compile_checked("(p & q) > (q & p)", LogicId::CCKID);
        compile_checked("(p > q) -> (p -> q)", LogicId::CCKMP);
        compile_checked("p & q -> (p ?> q)", LogicId::CCKMP);
        compile_checked("(p ?> q) & (p ?> r) -> (p ?> q & r)", LogicId::CCKCEM);
        compile_checked("p > p", LogicId::CCKMPID);
    }

    #[test]
    fn compiles_classical_derivations() {
        compile_checked("p | ~p", LogicId::ClassicalCK);
        compile_checked("(p ?> q) -> ~(p > ~q)", LogicId::ClassicalCK);
        compile_checked("~(p > ~q) -> (p ?> q)", LogicId::ClassicalCK);
        compile_checked("(p ?> q) <-> ~(p > ~q)", LogicId::ClassicalCK);
    }

    #[test]
    fn compiles_ex_falso_weakening() {
        // derivation of p & false => q exercised through a provable goal
        compile_checked("p & false -> q", LogicId::ConstCK);
    }

    #[test]
    fn rejects_unchecked_derivations() {
        let d = SeqDerivation::leaf(
            Sequent::goal(parse("p | ~p").unwrap()),
            SeqRule::Init,
        );
        assert!(compile_to_hilbert(&d, LogicId::ConstCK).is_err());
    }
}
