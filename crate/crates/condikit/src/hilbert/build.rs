//! Imperative construction of checkable Hilbert proofs.
//!
//! The builder maintains a stack of hypothesis frames. Inside a frame,
//! axioms and modus ponens are available; closing the frame discharges the
//! hypothesis by the standard deduction-theorem transformation (IPL1/IPL2),
//! so natural-deduction-style code produces plain Hilbert lines. The
//! equivalence-congruence rules only apply at the top level, where every
//! line is a theorem (or follows from the proof's hypothesis lines, which is
//! what the derived-rule macros need).

use std::collections::HashMap;

use crate::formula::{and, imp, or, Formula};

use super::{
    check_cond_rule, AxiomId, HRule, HilbertLine, HilbertProof, HilbertSystem, Justification,
};

/// A line reference; valid while the builder is at the same depth or deeper.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ref {
    depth: usize,
    idx: usize,
}

#[derive(Clone)]
enum StepJust {
    Hyp,
    Axiom(AxiomId),
    Mp(usize, usize),
    Lower(Ref),
}

struct Step {
    formula: Formula,
    just: StepJust,
}

struct Frame {
    hyp: Formula,
    steps: Vec<Step>,
    index: HashMap<Formula, usize>,
}

pub struct Builder {
    system: HilbertSystem,
    lines: Vec<HilbertLine>,
    global_index: HashMap<Formula, usize>,
    frames: Vec<Frame>,
}

/// Leaf environment: formulas derived in scope, for conjunction assembly.
pub type Env = HashMap<Formula, Ref>;

impl Builder {
    pub fn new(system: HilbertSystem) -> Self {
        Builder { system, lines: Vec::new(), global_index: HashMap::new(), frames: Vec::new() }
    }

    pub fn system(&self) -> HilbertSystem {
        self.system
    }

    pub fn depth(&self) -> usize {
        self.frames.len()
    }

    pub fn formula(&self, r: Ref) -> &Formula {
        if r.depth == 0 {
            &self.lines[r.idx].formula
        } else {
            &self.frames[r.depth - 1].steps[r.idx].formula
        }
    }

    pub fn finish(self) -> HilbertProof {
        assert!(self.frames.is_empty(), "unclosed hypothesis frame");
        HilbertProof { lines: self.lines }
    }

    /// Finishes with `r` as the proof's final line. Line reuse can leave the
    /// intended conclusion in the middle of the proof; in that case it is
    /// restated through a fresh modus ponens on `r -> r`.
    pub fn finish_at(mut self, r: Ref) -> HilbertProof {
        assert!(self.frames.is_empty(), "unclosed hypothesis frame");
        assert_eq!(r.depth, 0);
        if r.idx + 1 != self.lines.len() {
            let f = self.lines[r.idx].formula.clone();
            let identity = self.imp_self(f.clone());
            self.lines.push(HilbertLine {
                formula: f,
                just: Justification::Rule { rule: HRule::Mp, premises: vec![r.idx, identity.idx] },
            });
        }
        HilbertProof { lines: self.lines }
    }

    fn push_global(&mut self, formula: Formula, just: Justification) -> Ref {
        if let Some(&idx) = self.global_index.get(&formula) {
            return Ref { depth: 0, idx };
        }
        let idx = self.lines.len();
        self.global_index.insert(formula.clone(), idx);
        self.lines.push(HilbertLine { formula, just });
        Ref { depth: 0, idx }
    }

    fn push_step(&mut self, formula: Formula, just: StepJust) -> Ref {
        let depth = self.frames.len();
        if depth == 0 {
            let j = match just {
                StepJust::Axiom(id) => Justification::Axiom(id),
                StepJust::Mp(a, b) => Justification::Rule { rule: HRule::Mp, premises: vec![a, b] },
                StepJust::Hyp | StepJust::Lower(_) => unreachable!("global steps are lines"),
            };
            return self.push_global(formula, j);
        }
        let frame = self.frames.last_mut().unwrap();
        if let Some(&idx) = frame.index.get(&formula) {
            return Ref { depth, idx };
        }
        let idx = frame.steps.len();
        frame.index.insert(formula.clone(), idx);
        frame.steps.push(Step { formula, just });
        Ref { depth, idx }
    }

    /// Makes `r` usable at the current depth.
    pub(crate) fn import(&mut self, r: Ref) -> Ref {
        let depth = self.frames.len();
        assert!(r.depth <= depth, "reference into a closed frame");
        if r.depth == depth {
            return r;
        }
        let f = self.formula(r).clone();
        self.push_step(f, StepJust::Lower(r))
    }

    /// A top-level premise line; the proof then derives its conclusion from
    /// these hypotheses.
    pub fn hypothesis(&mut self, f: Formula) -> Ref {
        assert!(self.frames.is_empty(), "hypotheses only at the top level");
        self.push_global(f, Justification::Hypothesis)
    }

    pub fn axiom(&mut self, id: AxiomId, f: Formula) -> Ref {
        debug_assert!(self.system.has_axiom(id), "{} not in {}", id.name(), self.system);
        debug_assert!(id.matches(&f), "`{f}` does not match {}", id.name());
        self.push_step(f, StepJust::Axiom(id))
    }

    /// Modus ponens; `im` must be the implication.
    pub fn mp(&mut self, ant: Ref, im: Ref) -> Ref {
        let ant = self.import(ant);
        let im = self.import(im);
        let conclusion = match self.formula(im) {
            Formula::Imp(l, r) if **l == *self.formula(ant) => (**r).clone(),
            other => panic!("mp: `{other}` does not start with `{}`", self.formula(ant)),
        };
        if self.frames.is_empty() {
            self.push_global(
                conclusion,
                Justification::Rule { rule: HRule::Mp, premises: vec![ant.idx, im.idx] },
            )
        } else {
            self.push_step(conclusion, StepJust::Mp(ant.idx, im.idx))
        }
    }

    /// One of the equivalence-congruence rules, at the top level only.
    pub fn cond_rule(&mut self, rule: HRule, premise: Ref, conclusion: Formula) -> Ref {
        assert!(self.frames.is_empty(), "congruence rules only apply to theorems");
        debug_assert!(self.system.has_rule(rule));
        debug_assert!(
            check_cond_rule(rule, self.formula(premise), &conclusion),
            "bad {} instance: `{}` from `{}`",
            rule.name(),
            conclusion,
            self.formula(premise),
        );
        self.push_global(
            conclusion,
            Justification::Rule { rule, premises: vec![premise.idx] },
        )
    }

    /// Opens a hypothesis frame; the returned reference is the hypothesis.
    pub fn begin(&mut self, hyp: Formula) -> Ref {
        let mut index = HashMap::new();
        index.insert(hyp.clone(), 0);
        self.frames.push(Frame {
            hyp: hyp.clone(),
            steps: vec![Step { formula: hyp, just: StepJust::Hyp }],
            index,
        });
        Ref { depth: self.frames.len(), idx: 0 }
    }

    /// Closes the innermost frame, returning `hyp -> target` one level down.
    pub fn end(&mut self, target: Ref) -> Ref {
        assert_eq!(target.depth, self.frames.len(), "target must live in the closing frame");
        let frame = self.frames.pop().expect("no open frame");
        let hyp = frame.hyp;
        let mut lifted: Vec<Option<Ref>> = vec![None; frame.steps.len()];
        for i in 0..=target.idx {
            let f = frame.steps[i].formula.clone();
            let r = match frame.steps[i].just.clone() {
                StepJust::Hyp => self.imp_self(hyp.clone()),
                StepJust::Axiom(id) => {
                    let base = self.axiom(id, f);
                    self.weaken_under(&hyp, base)
                }
                StepJust::Lower(r) => {
                    let base = self.import(r);
                    self.weaken_under(&hyp, base)
                }
                StepJust::Mp(a, b) => {
                    let ha = lifted[a].expect("premise precedes use");
                    let hb = lifted[b].expect("premise precedes use");
                    // hb : hyp -> (A -> F); ha : hyp -> A
                    let (fa, ff) = match self.formula(hb) {
                        Formula::Imp(_, inner) => match &**inner {
                            Formula::Imp(l, r) => ((**l).clone(), (**r).clone()),
                            _ => unreachable!(),
                        },
                        _ => unreachable!(),
                    };
                    let ax = self.axiom(
                        AxiomId::Ipl2,
                        imp(
                            imp(hyp.clone(), imp(fa.clone(), ff.clone())),
                            imp(imp(hyp.clone(), fa), imp(hyp.clone(), ff)),
                        ),
                    );
                    let s = self.mp(hb, ax);
                    self.mp(ha, s)
                }
            };
            lifted[i] = Some(r);
        }
        lifted[target.idx].unwrap()
    }

    /// `f -> f`.
    pub fn imp_self(&mut self, f: Formula) -> Ref {
        let ff = imp(f.clone(), f.clone());
        let fi = imp(ff.clone(), f.clone());
        let a1 = self.axiom(AxiomId::Ipl1, imp(f.clone(), fi.clone()));
        let a2 = self.axiom(
            AxiomId::Ipl2,
            imp(imp(f.clone(), fi), imp(imp(f.clone(), ff.clone()), ff.clone())),
        );
        let s1 = self.mp(a1, a2);
        let a3 = self.axiom(AxiomId::Ipl1, imp(f.clone(), ff));
        self.mp(a3, s1)
    }

    /// From `F`, get `hyp -> F`.
    fn weaken_under(&mut self, hyp: &Formula, r: Ref) -> Ref {
        let f = self.formula(r).clone();
        let ax = self.axiom(AxiomId::Ipl1, imp(f.clone(), imp(hyp.clone(), f)));
        self.mp(r, ax)
    }

    // --- conjunction and disjunction toolkit -----------------------------

    pub fn and_intro(&mut self, a: Ref, b: Ref) -> Ref {
        let (fa, fb) = (self.formula(a).clone(), self.formula(b).clone());
        let ax = self.axiom(
            AxiomId::Ipl5,
            imp(fa.clone(), imp(fb.clone(), and(fa.clone(), fb.clone()))),
        );
        let s = self.mp(a, ax);
        self.mp(b, s)
    }

    pub fn and_elim_l(&mut self, r: Ref) -> Ref {
        let (fa, fb) = match self.formula(r) {
            Formula::And(l, rr) => ((**l).clone(), (**rr).clone()),
            other => panic!("and_elim_l on `{other}`"),
        };
        let ax = self.axiom(AxiomId::Ipl3, imp(and(fa.clone(), fb), fa));
        self.mp(r, ax)
    }

    pub fn and_elim_r(&mut self, r: Ref) -> Ref {
        let (fa, fb) = match self.formula(r) {
            Formula::And(l, rr) => ((**l).clone(), (**rr).clone()),
            other => panic!("and_elim_r on `{other}`"),
        };
        let ax = self.axiom(AxiomId::Ipl4, imp(and(fa, fb.clone()), fb));
        self.mp(r, ax)
    }

    /// From `A -> B` and `B -> C`, get `A -> C`.
    pub fn imp_trans(&mut self, ab: Ref, bc: Ref) -> Ref {
        let (fa, fb) = match self.formula(ab) {
            Formula::Imp(l, r) => ((**l).clone(), (**r).clone()),
            other => panic!("imp_trans on `{other}`"),
        };
        let fc = match self.formula(bc) {
            Formula::Imp(l, r) if **l == fb => (**r).clone(),
            other => panic!("imp_trans: `{other}` does not continue from `{fb}`"),
        };
        let pair = self.and_intro(ab, bc);
        let ax = self.axiom(
            AxiomId::Ipl10,
            imp(
                and(imp(fa.clone(), fb.clone()), imp(fb, fc.clone())),
                imp(fa, fc),
            ),
        );
        self.mp(pair, ax)
    }

    /// From a bottom reference, any formula.
    pub fn ex_falso(&mut self, bot: Ref, target: Formula) -> Ref {
        debug_assert_eq!(*self.formula(bot), Formula::Bot);
        if target == Formula::Bot {
            return bot;
        }
        let ax = self.axiom(AxiomId::Ipl9, imp(Formula::Bot, target));
        self.mp(bot, ax)
    }

    /// `true`, that is `false -> false`.
    pub fn top(&mut self) -> Ref {
        self.imp_self(Formula::Bot)
    }

    /// From a derived `f`, the equivalence `true <-> f`.
    pub fn top_iff(&mut self, r: Ref) -> Ref {
        let f = self.formula(r).clone();
        let t = crate::formula::top();
        let to_f = {
            let ax = self.axiom(AxiomId::Ipl1, imp(f.clone(), imp(t.clone(), f.clone())));
            self.mp(r, ax)
        };
        let from_f = {
            let tr = self.top();
            let ax = self.axiom(AxiomId::Ipl1, imp(t.clone(), imp(f.clone(), t.clone())));
            self.mp(tr, ax)
        };
        self.and_intro(to_f, from_f)
    }

    /// Records `r` and every conjunct reachable from it in `env`.
    pub fn explode_conj(&mut self, r: Ref, env: &mut Env) {
        let f = self.formula(r).clone();
        env.insert(f.clone(), r);
        if matches!(f, Formula::And(_, _)) {
            let l = self.and_elim_l(r);
            let rr = self.and_elim_r(r);
            self.explode_conj(l, env);
            self.explode_conj(rr, env);
        }
    }

    /// Builds `goal` from the environment by conjunction introduction.
    pub fn assemble_conj(&mut self, goal: &Formula, env: &Env) -> Ref {
        if let Some(&r) = env.get(goal) {
            return self.import(r);
        }
        match goal {
            Formula::And(l, r) => {
                let a = self.assemble_conj(l, env);
                let b = self.assemble_conj(r, env);
                self.and_intro(a, b)
            }
            other => panic!("assemble_conj: `{other}` is not available"),
        }
    }

    /// `from -> to` where `to` is built from `from`'s conjuncts.
    pub fn prove_conj_imp(&mut self, from: &Formula, to: &Formula) -> Ref {
        if from == to {
            return self.imp_self(from.clone());
        }
        let h = self.begin(from.clone());
        let mut env = Env::new();
        self.explode_conj(h, &mut env);
        let r = self.assemble_conj(to, &env);
        self.end(r)
    }

    /// `from <-> to` for conjunction trees over the same leaves.
    pub fn prove_cnj_equiv(&mut self, a: &Formula, b: &Formula) -> Ref {
        let fwd = self.prove_conj_imp(a, b);
        let bwd = self.prove_conj_imp(b, a);
        self.and_intro(fwd, bwd)
    }

    /// `from -> d1 | (d2 | ...)` where `from` occurs in the list.
    pub fn imp_into_disj(&mut self, from: &Formula, disj: &[Formula]) -> Ref {
        assert!(!disj.is_empty(), "cannot inject into the empty disjunction");
        if disj.len() == 1 {
            assert_eq!(&disj[0], from, "formula not among the disjuncts");
            return self.imp_self(from.clone());
        }
        let head = disj[0].clone();
        let tail = crate::sequent::fold_or(&disj[1..]);
        if head == *from {
            return self.axiom(AxiomId::Ipl6, imp(head.clone(), or(head, tail)));
        }
        let inner = self.imp_into_disj(from, &disj[1..]);
        let ax = self.axiom(AxiomId::Ipl7, imp(tail.clone(), or(head, tail)));
        self.imp_trans(inner, ax)
    }

    /// Case analysis on a derived disjunction `d1 | (d2 | ...)`; `case`
    /// derives `goal` from each disjunct under a fresh hypothesis frame.
    pub fn disj_cases<F>(&mut self, disj_ref: Ref, disj: &[Formula], goal: &Formula, case: &mut F) -> Ref
    where
        F: FnMut(&mut Builder, &Formula, Ref) -> Ref,
    {
        assert!(!disj.is_empty());
        if disj.len() == 1 {
            return case(self, &disj[0], disj_ref);
        }
        let head = disj[0].clone();
        let tail_f = crate::sequent::fold_or(&disj[1..]);
        let head_imp = {
            let h = self.begin(head.clone());
            let r = case(self, &head.clone(), h);
            self.end(r)
        };
        let tail_imp = {
            let h = self.begin(tail_f.clone());
            let inner = self.disj_cases(h, &disj[1..], goal, case);
            self.end(inner)
        };
        let ax = self.axiom(
            AxiomId::Ipl8,
            imp(
                imp(head.clone(), goal.clone()),
                imp(
                    imp(tail_f.clone(), goal.clone()),
                    imp(or(head, tail_f), goal.clone()),
                ),
            ),
        );
        let s = self.mp(head_imp, ax);
        let s = self.mp(tail_imp, s);
        self.mp(disj_ref, s)
    }

    /// Excluded middle, via double negation elimination.
    pub fn excluded_middle(&mut self, f: &Formula) -> Ref {
        let em = or(f.clone(), crate::formula::neg(f.clone()));
        let nn = {
            let h = self.begin(crate::formula::neg(em.clone()));
            let not_f = {
                let h2 = self.begin(f.clone());
                let ax = self.axiom(AxiomId::Ipl6, imp(f.clone(), em.clone()));
                let e = self.mp(h2, ax);
                let bot = self.mp(e, h);
                self.end(bot)
            };
            let ax = self.axiom(AxiomId::Ipl7, imp(crate::formula::neg(f.clone()), em.clone()));
            let e = self.mp(not_f, ax);
            let bot = self.mp(e, h);
            self.end(bot)
        };
        let dne = self.axiom(AxiomId::Dne, imp(crate::formula::neg(crate::formula::neg(em.clone())), em.clone()));
        self.mp(nn, dne)
    }

    // --- conditional toolkit ---------------------------------------------

    /// From `A <-> B`, the forward implication of `(x > A) <-> (x > B)`.
    pub fn rc_box_fwd(&mut self, equiv: Ref, x: &Formula) -> Ref {
        let (fa, fb) = equiv_sides(self.formula(equiv));
        let conc = crate::formula::iff(
            crate::formula::cond_box(x.clone(), fa),
            crate::formula::cond_box(x.clone(), fb),
        );
        let r = self.cond_rule(HRule::RcBox, equiv, conc);
        self.and_elim_l(r)
    }

    pub fn rc_diam_fwd(&mut self, equiv: Ref, x: &Formula) -> Ref {
        let (fa, fb) = equiv_sides(self.formula(equiv));
        let conc = crate::formula::iff(
            crate::formula::cond_diam(x.clone(), fa),
            crate::formula::cond_diam(x.clone(), fb),
        );
        let r = self.cond_rule(HRule::RcDiam, equiv, conc);
        self.and_elim_l(r)
    }

    /// From `A <-> B`, the implication `(B > z) -> (A > z)`.
    pub fn ra_box_bwd(&mut self, equiv: Ref, z: &Formula) -> Ref {
        let (fa, fb) = equiv_sides(self.formula(equiv));
        let conc = crate::formula::iff(
            crate::formula::cond_box(fa, z.clone()),
            crate::formula::cond_box(fb, z.clone()),
        );
        let r = self.cond_rule(HRule::RaBox, equiv, conc);
        self.and_elim_r(r)
    }

    /// From `A <-> B`, the implication `(A ?> z) -> (B ?> z)`.
    pub fn ra_diam_fwd(&mut self, equiv: Ref, z: &Formula) -> Ref {
        let (fa, fb) = equiv_sides(self.formula(equiv));
        let conc = crate::formula::iff(
            crate::formula::cond_diam(fa, z.clone()),
            crate::formula::cond_diam(fb, z.clone()),
        );
        let r = self.cond_rule(HRule::RaDiam, equiv, conc);
        self.and_elim_l(r)
    }

    /// From `A <-> B`, the implication `(B ?> z) -> (A ?> z)`.
    pub fn ra_diam_bwd(&mut self, equiv: Ref, z: &Formula) -> Ref {
        let (fa, fb) = equiv_sides(self.formula(equiv));
        let conc = crate::formula::iff(
            crate::formula::cond_diam(fa, z.clone()),
            crate::formula::cond_diam(fb, z.clone()),
        );
        let r = self.cond_rule(HRule::RaDiam, equiv, conc);
        self.and_elim_r(r)
    }

    /// `x > f` from a derived theorem `f` (CN-box plus consequent rewriting).
    pub fn box_of_theorem(&mut self, thm: Ref, x: &Formula) -> Ref {
        let f = self.formula(thm).clone();
        let t = crate::formula::top();
        let equiv = self.top_iff(thm);
        let fwd = self.rc_box_fwd(equiv, x);
        let cn = self.axiom(AxiomId::CnBox, crate::formula::cond_box(x.clone(), t));
        let _ = f;
        self.mp(cn, fwd)
    }

    /// The derived monotonicity rule for the would conditional: from a
    /// theorem `A -> B`, get `(x > A) -> (x > B)`.
    pub fn rm_box(&mut self, ab: Ref, x: &Formula) -> Ref {
        let (fa, fb) = match self.formula(ab) {
            Formula::Imp(l, r) => ((**l).clone(), (**r).clone()),
            other => panic!("rm_box on `{other}`"),
        };
        if fa == fb {
            return self.imp_self(crate::formula::cond_box(x.clone(), fa));
        }
        // A <-> A & B
        let a_to_ab = {
            let h = self.begin(fa.clone());
            let b = self.mp(h, ab);
            let pair = self.and_intro(h, b);
            self.end(pair)
        };
        let ab_to_a = self.axiom(AxiomId::Ipl3, imp(and(fa.clone(), fb.clone()), fa.clone()));
        let equiv = self.and_intro(a_to_ab, ab_to_a);
        let rewrite = self.rc_box_fwd(equiv, x); // (x > A) -> (x > A & B)
        let cm = self.axiom(
            AxiomId::CmBox,
            imp(
                crate::formula::cond_box(x.clone(), and(fa.clone(), fb.clone())),
                and(
                    crate::formula::cond_box(x.clone(), fa.clone()),
                    crate::formula::cond_box(x.clone(), fb.clone()),
                ),
            ),
        );
        let h = self.begin(crate::formula::cond_box(x.clone(), fa));
        let step = self.mp(h, rewrite);
        let pair = self.mp(step, cm);
        let out = self.and_elim_r(pair);
        self.end(out)
    }

    /// The derived monotonicity rule for the might conditional, through
    /// CK-might: from a theorem `A -> B`, get `(x ?> A) -> (x ?> B)`.
    pub fn rm_diam(&mut self, ab: Ref, x: &Formula) -> Ref {
        let (fa, fb) = match self.formula(ab) {
            Formula::Imp(l, r) => ((**l).clone(), (**r).clone()),
            other => panic!("rm_diam on `{other}`"),
        };
        let boxed = self.box_of_theorem(ab, x); // x > (A -> B)
        let ck = self.axiom(
            AxiomId::CkDiam,
            imp(
                crate::formula::cond_box(x.clone(), imp(fa.clone(), fb.clone())),
                imp(
                    crate::formula::cond_diam(x.clone(), fa),
                    crate::formula::cond_diam(x.clone(), fb),
                ),
            ),
        );
        self.mp(boxed, ck)
    }

    /// The derived CW implication `(x ?> A) & (x > B) -> (x ?> A & B)`.
    pub fn cw_instance(&mut self, x: &Formula, a: &Formula, b: &Formula) -> Ref {
        if self.system.has_axiom(AxiomId::Cw) {
            return self.axiom(
                AxiomId::Cw,
                imp(
                    and(
                        crate::formula::cond_diam(x.clone(), a.clone()),
                        crate::formula::cond_box(x.clone(), b.clone()),
                    ),
                    crate::formula::cond_diam(x.clone(), and(a.clone(), b.clone())),
                ),
            );
        }
        // b -> (a -> a & b)
        let curry = {
            let hb = self.begin(b.clone());
            let r = {
                let ha = self.begin(a.clone());
                let pair = self.and_intro(ha, hb);
                self.end(pair)
            };
            self.end(r)
        };
        let boxed = self.rm_box(curry, x); // (x > b) -> (x > (a -> a & b))
        let ck = self.axiom(
            AxiomId::CkDiam,
            imp(
                crate::formula::cond_box(x.clone(), imp(a.clone(), and(a.clone(), b.clone()))),
                imp(
                    crate::formula::cond_diam(x.clone(), a.clone()),
                    crate::formula::cond_diam(x.clone(), and(a.clone(), b.clone())),
                ),
            ),
        );
        let goal_ant = and(
            crate::formula::cond_diam(x.clone(), a.clone()),
            crate::formula::cond_box(x.clone(), b.clone()),
        );
        let h = self.begin(goal_ant);
        let da = self.and_elim_l(h);
        let bb = self.and_elim_r(h);
        let step = self.mp(bb, boxed);
        let step = self.mp(step, ck);
        let out = self.mp(da, step);
        self.end(out)
    }
}

fn equiv_sides(f: &Formula) -> (Formula, Formula) {
    match f {
        Formula::And(l, _) => match &**l {
            Formula::Imp(a, b) => ((**a).clone(), (**b).clone()),
            other => panic!("not an equivalence: `{other}`"),
        },
        other => panic!("not an equivalence: `{other}`"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{atom, cond_box, cond_diam, neg, parse};
    use crate::hilbert::check_hilbert_report;

    fn check(b: Builder) -> HilbertProof {
        let system = b.system();
        let proof = b.finish();
        if let Err(e) = check_hilbert_report(&proof, system) {
            panic!("{e}\n{}", proof.render_text());
        }
        proof
    }

    #[test]
    fn deduction_theorem_produces_checkable_lines() {
        let mut b = Builder::new(HilbertSystem::ConstCK);
        // p & q -> q & p
        let h = b.begin(and(atom("p"), atom("q")));
        let l = b.and_elim_l(h);
        let r = b.and_elim_r(h);
        let sw = b.and_intro(r, l);
        let out = b.end(sw);
        assert_eq!(*b.formula(out), parse("p & q -> q & p").unwrap());
        check(b);
    }

    #[test]
    fn nested_frames() {
        let mut b = Builder::new(HilbertSystem::ConstCK);
        // p -> (q -> p & q)
        let hp = b.begin(atom("p"));
        let inner = {
            let hq = b.begin(atom("q"));
            let pair = b.and_intro(hp, hq);
            b.end(pair)
        };
        let out = b.end(inner);
        assert_eq!(*b.formula(out), parse("p -> q -> p & q").unwrap());
        check(b);
    }

    #[test]
    fn rm_rules_and_cw() {
        let mut b = Builder::new(HilbertSystem::ConstCK);
        let ax = b.axiom(AxiomId::Ipl3, parse("p & q -> p").unwrap());
        let boxed = b.rm_box(ax, &atom("r"));
        assert_eq!(*b.formula(boxed), imp(cond_box(atom("r"), parse("p & q").unwrap()), cond_box(atom("r"), atom("p"))));
        let diam = b.rm_diam(ax, &atom("r"));
        assert_eq!(*b.formula(diam), imp(cond_diam(atom("r"), parse("p & q").unwrap()), cond_diam(atom("r"), atom("p"))));
        let cw = b.cw_instance(&atom("r"), &atom("p"), &atom("q"));
        assert_eq!(*b.formula(cw), parse("(r ?> p) & (r > q) -> (r ?> p & q)").unwrap());
        check(b);
    }

    #[test]
    fn excluded_middle_needs_the_classical_base() {
        let mut b = Builder::new(HilbertSystem::ClassicalCK);
        let em = b.excluded_middle(&atom("p"));
        assert_eq!(*b.formula(em), parse("p | ~p").unwrap());
        check(b);
    }

    #[test]
    fn disjunction_toolkit() {
        let mut b = Builder::new(HilbertSystem::ConstCK);
        let disj = vec![atom("p"), atom("q"), atom("r")];
        let inj = b.imp_into_disj(&atom("q"), &disj);
        assert_eq!(*b.formula(inj), parse("q -> p | (q | r)").unwrap());
        // (p | (q | r)) -> (r | (q | p)) by cases.
        let goal = parse("r | (q | p)").unwrap();
        let rev = vec![atom("r"), atom("q"), atom("p")];
        let h = b.begin(parse("p | (q | r)").unwrap());
        let out = b.disj_cases(h, &disj, &goal, &mut |b, case, r| {
            let imp_in = b.imp_into_disj(case, &rev);
            b.mp(r, imp_in)
        });
        let closed = b.end(out);
        assert_eq!(*b.formula(closed), parse("(p | (q | r)) -> (r | (q | p))").unwrap());
        check(b);
    }

    #[test]
    fn conj_equivalences() {
        let mut b = Builder::new(HilbertSystem::ConstCK);
        let a = parse("(p & q) & r").unwrap();
        let c = parse("r & (q & p)").unwrap();
        let eq = b.prove_cnj_equiv(&a, &c);
        assert_eq!(*b.formula(eq), crate::formula::iff(a, c));
        check(b);
    }

    #[test]
    fn top_toolkit() {
        let mut b = Builder::new(HilbertSystem::ConstCK);
        let t = b.top();
        let bt = b.box_of_theorem(t, &atom("p"));
        assert_eq!(*b.formula(bt), parse("p > true").unwrap());
        let _ = neg(atom("p"));
        check(b);
    }
}
