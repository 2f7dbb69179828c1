//! Derived-rule macro templates.
//!
//! Each template is a Hilbert proof of a rule's conclusion from its premises
//! as hypothesis lines. The n-ary conditional templates generalize the
//! two-box appendix scripts by iterating the conjunction-combination and
//! CW steps; every expansion is validated by the checker in the tests rather
//! than trusted.

use thiserror::Error;

use crate::formula::{iff, Formula};
use crate::sequent::{CondInstance, SeqRule, Sequent};

use super::build::Builder;
use super::compile::{cond_rule_theorem, CondCore};
use super::{HilbertProof, HilbertSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MacroRule {
    /// From `psi -> theta`, infer `(phi > psi) -> (phi > theta)`.
    RmBox,
    /// From `psi -> theta`, infer `(phi ?> psi) -> (phi ?> theta)`.
    RmDiam,
    /// The CW implication, derived rather than axiomatic.
    Cw,
    Cb,
    CbId,
    Cd,
    CdId,
    Cbd,
    CbdId,
    MpBox,
    MpDiam,
    CdCem,
    CbdCem,
}

impl MacroRule {
    pub fn name(self) -> &'static str {
        match self {
            MacroRule::RmBox => "rm_box",
            MacroRule::RmDiam => "rm_diam",
            MacroRule::Cw => "cw",
            MacroRule::Cb => "cb",
            MacroRule::CbId => "cb_id",
            MacroRule::Cd => "cd",
            MacroRule::CdId => "cd_id",
            MacroRule::Cbd => "cbd",
            MacroRule::CbdId => "cbd_id",
            MacroRule::MpBox => "mp_box",
            MacroRule::MpDiam => "mp_diam",
            MacroRule::CdCem => "cd_cem",
            MacroRule::CbdCem => "cbd_cem",
        }
    }

    /// The weakest system whose schema set carries the template.
    pub fn system(self) -> HilbertSystem {
        match self {
            MacroRule::RmBox | MacroRule::Cb => HilbertSystem::ConstCK,
            MacroRule::RmDiam | MacroRule::Cw | MacroRule::Cd | MacroRule::Cbd => {
                HilbertSystem::ConstCK
            }
            MacroRule::CbId | MacroRule::CdId | MacroRule::CbdId => HilbertSystem::CCKID,
            MacroRule::MpBox | MacroRule::MpDiam => HilbertSystem::CCKMP,
            MacroRule::CdCem | MacroRule::CbdCem => HilbertSystem::CCKCEM,
        }
    }
}

/// Metavariable bindings for a template; the box and might lists drive the
/// n-ary generalization.
#[derive(Debug, Clone, Default)]
pub struct MacroInstantiation {
    pub phi: Option<Formula>,
    pub psi: Option<Formula>,
    pub theta: Option<Formula>,
    pub eta: Option<Formula>,
    pub boxes: Vec<(Formula, Formula)>,
    pub diams: Vec<(Formula, Formula)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("macro {rule}: metavariable `{var}` is unbound")]
pub struct UnboundMetavariable {
    pub rule: &'static str,
    pub var: &'static str,
}

/// Expands a derived-rule template into a checkable proof of the rule's
/// conclusion from its premises as hypotheses.
pub fn macro_expand(
    rule: MacroRule,
    inst: &MacroInstantiation,
) -> Result<HilbertProof, UnboundMetavariable> {
    let need = |var: &'static str, v: &Option<Formula>| -> Result<Formula, UnboundMetavariable> {
        v.clone().ok_or(UnboundMetavariable { rule: rule.name(), var })
    };
    let mut b = Builder::new(rule.system());
    let phi = need("phi", &inst.phi)?;
    let out = match rule {
        MacroRule::RmBox | MacroRule::RmDiam => {
            let psi = need("psi", &inst.psi)?;
            let theta = need("theta", &inst.theta)?;
            let h = b.hypothesis(crate::formula::imp(psi, theta));
            if rule == MacroRule::RmBox {
                b.rm_box(h, &phi)
            } else {
                b.rm_diam(h, &phi)
            }
        }
        MacroRule::Cw => {
            let psi = need("psi", &inst.psi)?;
            let theta = need("theta", &inst.theta)?;
            b.cw_instance(&phi, &psi, &theta)
        }
        MacroRule::MpBox => {
            // From `(phi > psi) -> phi` and `(phi > psi) & psi -> theta`,
            // infer `(phi > psi) -> theta`.
            let psi = need("psi", &inst.psi)?;
            let theta = need("theta", &inst.theta)?;
            let boxed = crate::formula::cond_box(phi.clone(), psi.clone());
            let h1 = b.hypothesis(crate::formula::imp(boxed.clone(), phi.clone()));
            let h2 = b.hypothesis(crate::formula::imp(
                crate::formula::and(boxed.clone(), psi.clone()),
                theta.clone(),
            ));
            let hb = b.begin(boxed.clone());
            let phi_v = b.mp(hb, h1);
            let ax = b.axiom(
                super::AxiomId::MpBox,
                crate::formula::imp(boxed.clone(), crate::formula::imp(phi.clone(), psi.clone())),
            );
            let im = b.mp(hb, ax);
            let psi_v = b.mp(phi_v, im);
            let pair = b.and_intro(hb, psi_v);
            let out = b.mp(pair, h2);
            b.end(out)
        }
        MacroRule::MpDiam => {
            // From `theta -> phi` and `theta -> psi`, infer
            // `theta -> (phi ?> psi)`.
            let psi = need("psi", &inst.psi)?;
            let theta = need("theta", &inst.theta)?;
            let h1 = b.hypothesis(crate::formula::imp(theta.clone(), phi.clone()));
            let h2 = b.hypothesis(crate::formula::imp(theta.clone(), psi.clone()));
            let ht = b.begin(theta.clone());
            let a = b.mp(ht, h1);
            let c = b.mp(ht, h2);
            let pair = b.and_intro(a, c);
            let ax = b.axiom(
                super::AxiomId::MpDiam,
                crate::formula::imp(
                    crate::formula::and(phi.clone(), psi.clone()),
                    crate::formula::cond_diam(phi.clone(), psi.clone()),
                ),
            );
            let out = b.mp(pair, ax);
            b.end(out)
        }
        MacroRule::Cb
        | MacroRule::CbId
        | MacroRule::Cd
        | MacroRule::CdId
        | MacroRule::Cbd
        | MacroRule::CbdId
        | MacroRule::CdCem
        | MacroRule::CbdCem => {
            let psi = need("psi", &inst.psi)?;
            let (seq_rule, with_eta) = match rule {
                MacroRule::Cb => (SeqRule::Cb, false),
                MacroRule::CbId => (SeqRule::CbId, false),
                MacroRule::Cd => (SeqRule::Cd, true),
                MacroRule::CdId => (SeqRule::CdId, true),
                MacroRule::Cbd => (SeqRule::Cbd, false),
                MacroRule::CbdId => (SeqRule::CbdId, false),
                MacroRule::CdCem => (SeqRule::CdCem, true),
                MacroRule::CbdCem => (SeqRule::CbdCem, false),
                _ => unreachable!(),
            };
            let with_id = matches!(rule, MacroRule::CbId | MacroRule::CdId | MacroRule::CbdId);
            let right_box = matches!(rule, MacroRule::Cb | MacroRule::CbId);
            let (eta, theta) = if with_eta {
                (Some(need("eta", &inst.eta)?), Some(need("theta", &inst.theta)?))
            } else if right_box {
                (None, None)
            } else {
                (None, None)
            };
            // Side premise of the corresponding sequent rule.
            let mut side_ant: Vec<Formula> =
                inst.boxes.iter().map(|(_, s)| s.clone()).collect();
            side_ant.extend(inst.diams.iter().map(|(_, c)| c.clone()));
            if with_id {
                side_ant.push(phi.clone());
            }
            let side_suc = if right_box {
                vec![psi.clone()]
            } else {
                side_ant.push(psi.clone());
                theta.clone().into_iter().collect()
            };
            let side = Sequent::new(side_ant, side_suc);
            let cond = CondInstance {
                rule: seq_rule,
                premises: Vec::new(),
                phi: phi.clone(),
                psi: psi.clone(),
                boxes: inst.boxes.clone(),
                diams: inst.diams.clone(),
                eta: eta.clone(),
                theta: theta.clone(),
                side: side.clone(),
            };
            // Hypotheses: one equivalence per selected conditional, the eta
            // equivalence for the cd rules, and the side interpretation.
            let eq_box: Vec<_> = inst
                .boxes
                .iter()
                .map(|(rho, _)| {
                    let h = b.hypothesis(iff(phi.clone(), rho.clone()));
                    (b.and_elim_l(h), b.and_elim_r(h))
                })
                .collect();
            let eq_diam: Vec<_> = inst
                .diams
                .iter()
                .map(|(xi, _)| {
                    let h = b.hypothesis(iff(phi.clone(), xi.clone()));
                    (b.and_elim_l(h), b.and_elim_r(h))
                })
                .collect();
            let eq_eta = eta.as_ref().map(|e| {
                let h = b.hypothesis(iff(phi.clone(), e.clone()));
                (b.and_elim_l(h), b.and_elim_r(h))
            });
            let side_thm = b.hypothesis(side.interpretation());
            let core = CondCore { inst: &cond, eq_box, eq_diam, eq_eta, side_thm };
            let (g, _sources) = cond_rule_theorem(&mut b, &core);
            g
        }
    };
    Ok(b.finish_at(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{atom, or, parse};
    use crate::hilbert::{check_hilbert_report, HilbertProof};

    fn assert_checks(rule: MacroRule, proof: &HilbertProof) {
        if let Err(e) = check_hilbert_report(proof, rule.system()) {
            panic!("{}: {e}\n{}", rule.name(), proof.render_text());
        }
    }

    #[test]
    fn rm_rules_from_hypotheses() {
        let inst = MacroInstantiation {
            phi: Some(atom("r")),
            psi: Some(atom("p")),
            theta: Some(or(atom("p"), atom("q"))),
            ..Default::default()
        };
        let proof = macro_expand(MacroRule::RmBox, &inst).unwrap();
        assert_eq!(*proof.conclusion().unwrap(), parse("(r > p) -> (r > p | q)").unwrap());
        assert_checks(MacroRule::RmBox, &proof);

        let proof = macro_expand(MacroRule::RmDiam, &inst).unwrap();
        assert_eq!(*proof.conclusion().unwrap(), parse("(r ?> p) -> (r ?> p | q)").unwrap());
        assert_checks(MacroRule::RmDiam, &proof);
        assert_eq!(proof.hypotheses().count(), 1);
    }

    #[test]
    fn cw_template() {
        let inst = MacroInstantiation {
            phi: Some(atom("p")),
            psi: Some(atom("q")),
            theta: Some(atom("r")),
            ..Default::default()
        };
        let proof = macro_expand(MacroRule::Cw, &inst).unwrap();
        assert_eq!(
            *proof.conclusion().unwrap(),
            parse("(p ?> q) & (p > r) -> (p ?> q & r)").unwrap()
        );
        assert_checks(MacroRule::Cw, &proof);
        assert_eq!(proof.hypotheses().count(), 0);
    }

    #[test]
    fn cd_template_across_arities() {
        for n in 0..=4usize {
            let boxes: Vec<_> = (0..n)
                .map(|i| (atom(&format!("r{i}")), atom(&format!("s{i}"))))
                .collect();
            let inst = MacroInstantiation {
                phi: Some(atom("p")),
                psi: Some(atom("q")),
                eta: Some(atom("e")),
                theta: Some(atom("t")),
                boxes,
                ..Default::default()
            };
            let proof = macro_expand(MacroRule::Cd, &inst).unwrap();
            assert_checks(MacroRule::Cd, &proof);
            // one equivalence per box, one for eta, one side premise
            assert_eq!(proof.hypotheses().count(), n + 2);
        }
    }

    #[test]
    fn box_and_closing_templates_across_arities() {
        for rule in [
            MacroRule::Cb,
            MacroRule::CbId,
            MacroRule::Cbd,
            MacroRule::CbdId,
            MacroRule::CdId,
        ] {
            for n in 0..=4usize {
                let boxes: Vec<_> = (0..n)
                    .map(|i| (atom("p"), atom(&format!("s{i}"))))
                    .collect();
                let inst = MacroInstantiation {
                    phi: Some(atom("p")),
                    psi: Some(atom("q")),
                    eta: Some(atom("p")),
                    theta: Some(atom("t")),
                    boxes,
                    ..Default::default()
                };
                let proof = macro_expand(rule, &inst).unwrap();
                assert_checks(rule, &proof);
            }
        }
    }

    #[test]
    fn cem_templates_with_extra_mights() {
        for k in 0..=3usize {
            let diams: Vec<_> = (0..k)
                .map(|j| (atom("p"), atom(&format!("c{j}"))))
                .collect();
            let inst = MacroInstantiation {
                phi: Some(atom("p")),
                psi: Some(atom("q")),
                eta: Some(atom("p")),
                theta: Some(atom("t")),
                boxes: vec![(atom("p"), atom("s"))],
                diams,
            };
            let proof = macro_expand(MacroRule::CdCem, &inst).unwrap();
            assert_checks(MacroRule::CdCem, &proof);
            let proof = macro_expand(MacroRule::CbdCem, &inst).unwrap();
            assert_checks(MacroRule::CbdCem, &proof);
        }
    }

    #[test]
    fn mp_templates() {
        let inst = MacroInstantiation {
            phi: Some(atom("p")),
            psi: Some(atom("q")),
            theta: Some(atom("t")),
            ..Default::default()
        };
        let proof = macro_expand(MacroRule::MpBox, &inst).unwrap();
        assert_eq!(
            *proof.conclusion().unwrap(),
            parse("(p > q) -> t").unwrap()
        );
        assert_checks(MacroRule::MpBox, &proof);
        let proof = macro_expand(MacroRule::MpDiam, &inst).unwrap();
        assert_eq!(*proof.conclusion().unwrap(), parse("t -> (p ?> q)").unwrap());
        assert_checks(MacroRule::MpDiam, &proof);
    }

    #[test]
    fn unbound_metavariables_are_reported() {
        let err = macro_expand(MacroRule::RmBox, &MacroInstantiation::default()).unwrap_err();
        assert_eq!(err.var, "phi");
    }
}
