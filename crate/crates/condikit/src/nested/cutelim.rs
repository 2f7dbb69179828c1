//! Executable index-replacement and cut elimination.
//!
//! `eliminate_rep` turns an index-replacement step into cuts on the two
//! indices. `reduce_cut` removes one topmost maximal cut, by the usual
//! principal/parametric case analysis; where the paper's construction
//! duplicates the target bracket and contracts, this implementation fuses
//! the cut formula's fresh bracket directly into the paired one, which
//! absorbs index replacements into cuts on strictly smaller formulas as it
//! goes. `eliminate_cut` drives both until the derivation is cut- and
//! rep-free; the rank trace it records is non-increasing and ends at zero.

use crate::formula::{Formula, Polarity};

use super::structural::{cut_node, invert, weaken, Invertible};
use super::{
    check_nested_report, NestedDerivation, NestedError, NestedRule, NestedSequent, Path, RuleSet,
};

fn only_in(f: &Formula) -> NestedSequent {
    NestedSequent::from_parts(vec![(f.clone(), Polarity::In)], vec![])
}

/// Splits a two-formula top-level sequent `a*, b^` into `(a, b)`.
fn equivalence_sides(ns: &NestedSequent) -> Result<(Formula, Formula), NestedError> {
    if !ns.brackets.is_empty() || ns.formulas.len() != 2 {
        return Err(NestedError::Other(format!("`{ns}` is not an equivalence premise")));
    }
    let a = ns.formulas.iter().find(|(_, p)| *p == Polarity::In);
    let b = ns.formulas.iter().find(|(_, p)| *p == Polarity::Out);
    match (a, b) {
        (Some((a, _)), Some((b, _))) => Ok((a.clone(), b.clone())),
        _ => Err(NestedError::Other(format!("`{ns}` is not an equivalence premise"))),
    }
}

/// Simulates the index-replacement rule: from derivations of `phi*, eta^`,
/// `eta*, phi^` and `Gamma{[phi: Delta]}`, a derivation of
/// `Gamma{[eta: Delta]}` whose new cuts all have cut formula `phi`.
pub fn eliminate_rep(
    d1: &NestedDerivation,
    d2: &NestedDerivation,
    d3: &NestedDerivation,
) -> Result<NestedDerivation, NestedError> {
    let (phi, eta) = equivalence_sides(&d1.conclusion)?;
    let (eta2, phi2) = equivalence_sides(&d2.conclusion)?;
    if phi != phi2 || eta != eta2 {
        return Err(NestedError::Other("equivalence premises do not match".into()));
    }
    if phi == eta {
        return Ok(d3.clone());
    }
    let (path, bracket) = find_bracket(&d3.conclusion, &phi, &mut Vec::new())
        .ok_or_else(|| NestedError::Other(format!("no bracket indexed `{phi}`")))?;
    Ok(replace_index(d3, &path, bracket, &phi, &eta, d1, d2))
}

fn find_bracket(ns: &NestedSequent, index: &Formula, path: &mut Path) -> Option<(Path, usize)> {
    for (i, b) in ns.brackets.iter().enumerate() {
        if b.index == *index {
            return Some((path.clone(), i));
        }
    }
    for (i, b) in ns.brackets.iter().enumerate() {
        path.push(i);
        if let Some(hit) = find_bracket(&b.body, index, path) {
            return Some(hit);
        }
        path.pop();
    }
    None
}

/// Replaces the index of the bracket at `(path, bracket)` by `eta`
/// throughout `d3`, cutting on `phi` where a pairing rule consulted it.
pub(super) fn replace_index(
    d3: &NestedDerivation,
    path: &[usize],
    bracket: usize,
    phi: &Formula,
    eta: &Formula,
    d1: &NestedDerivation,
    d2: &NestedDerivation,
) -> NestedDerivation {
    let conclusion = d3
        .conclusion
        .with_index(path, bracket, eta.clone())
        .expect("bracket position");
    match &d3.rule {
        NestedRule::BoxIn { path: rp, bracket: rb, main }
        | NestedRule::DiamOut { path: rp, bracket: rb, main }
            if rp == path && *rb == bracket =>
        {
            let chi = match main {
                Formula::CondBox(a, _) | Formula::CondDiam(a, _) => (**a).clone(),
                _ => unreachable!(),
            };
            // chi*, eta^ by cutting phi against the rule's first premise.
            let e1 = {
                let concl = NestedSequent::from_parts(
                    vec![(chi.clone(), Polarity::In), (eta.clone(), Polarity::Out)],
                    vec![],
                );
                let right = weaken(d1, &[], &only_in(&chi));
                cut_node(concl, vec![], phi.clone(), d3.premises[0].clone(), right)
            };
            // eta*, chi^ by cutting phi against the rule's second premise.
            let e2 = {
                let concl = NestedSequent::from_parts(
                    vec![(eta.clone(), Polarity::In), (chi.clone(), Polarity::Out)],
                    vec![],
                );
                let right = weaken(&d3.premises[1], &[], &only_in(eta));
                cut_node(concl, vec![], phi.clone(), d2.clone(), right)
            };
            let p3 = replace_index(&d3.premises[2], path, bracket, phi, eta, d1, d2);
            let rule = d3.rule.clone();
            NestedDerivation { conclusion, rule, premises: vec![e1, e2, p3] }
        }
        NestedRule::Rep { .. } => {
            unreachable!("index replacement expects a rep-free input")
        }
        NestedRule::Nec => {
            assert!(!path.is_empty());
            let inner = replace_index(&d3.premises[0], &path[1..], bracket, phi, eta, d1, d2);
            NestedDerivation { conclusion, rule: NestedRule::Nec, premises: vec![inner] }
        }
        rule => {
            let ctx: Vec<usize> = match rule {
                NestedRule::BoxIn { .. } | NestedRule::DiamOut { .. } => vec![2],
                _ => (0..d3.premises.len()).collect(),
            };
            let premises = d3
                .premises
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    if ctx.contains(&i) {
                        replace_index(p, path, bracket, phi, eta, d1, d2)
                    } else {
                        p.clone()
                    }
                })
                .collect();
            NestedDerivation { conclusion, rule: rule.clone(), premises }
        }
    }
}

struct CutCfg {
    conclusion: NestedSequent,
    path: Path,
    xi: Formula,
}

/// Removes a cut whose premises have rank at most the cut formula's weight:
/// from derivations of `C-without-output + xi^` and `C + xi*` (both at the
/// node `path`), a derivation of `C` of the same rank bound.
pub fn reduce_cut(
    d1: &NestedDerivation,
    d2: &NestedDerivation,
    cut_formula: &Formula,
) -> Result<NestedDerivation, NestedError> {
    // Recover the conclusion and cut position from the premises.
    let mut candidates = Vec::new();
    collect_in_positions(&d2.conclusion, cut_formula, &mut Vec::new(), &mut candidates);
    for path in candidates {
        let c = d2
            .conclusion
            .without_formula(&path, cut_formula, Polarity::In)
            .expect("candidate position");
        let left_expected = c
            .remove_out()
            .and_then(|x| x.with_formula(&path, cut_formula.clone(), Polarity::Out));
        if let Ok(expected) = left_expected {
            if expected.same_multiset(&d1.conclusion) {
                let cfg = CutCfg { conclusion: c, path, xi: cut_formula.clone() };
                return Ok(cut_reduce(&cfg, d1, d2));
            }
        }
    }
    Err(NestedError::Other("premises do not match the cut schema".into()))
}

fn collect_in_positions(ns: &NestedSequent, f: &Formula, path: &mut Path, out: &mut Vec<Path>) {
    if ns.formulas.iter().any(|(g, p)| g == f && *p == Polarity::In) {
        out.push(path.clone());
    }
    for (i, b) in ns.brackets.iter().enumerate() {
        path.push(i);
        collect_in_positions(&b.body, f, path, out);
        path.pop();
    }
}

fn principal_left(rule: &NestedRule, path: &[usize], xi: &Formula) -> bool {
    match rule {
        NestedRule::AndOut { path: p, main }
        | NestedRule::OrOut1 { path: p, main }
        | NestedRule::OrOut2 { path: p, main }
        | NestedRule::ImpOut { path: p, main }
        | NestedRule::BoxOut { path: p, main }
        | NestedRule::DiamOut { path: p, main, .. } => p == path && main == xi,
        _ => false,
    }
}

fn principal_right(rule: &NestedRule, path: &[usize], xi: &Formula) -> bool {
    match rule {
        NestedRule::AndIn { path: p, main }
        | NestedRule::OrIn { path: p, main }
        | NestedRule::ImpIn { path: p, main }
        | NestedRule::BoxIn { path: p, main, .. }
        | NestedRule::DiamIn { path: p, main } => p == path && main == xi,
        _ => false,
    }
}

fn cut_reduce(cfg: &CutCfg, d1: &NestedDerivation, d2: &NestedDerivation) -> NestedDerivation {
    let c = &cfg.conclusion;
    let p = &cfg.path;
    let xi = &cfg.xi;

    // (i) axiomatic premises.
    if let NestedRule::Init { path: q } = &d1.rule {
        // The pair's output is the cut formula (the only output in d1), so
        // xi is an atom present as input at the node; the conclusion keeps
        // both occurrences and d2 proves C with a duplicate.
        debug_assert_eq!(q, p);
        let contracted = super::structural::contract(d2, p, xi).expect("cut-atom contraction");
        return contracted;
    }
    if let NestedRule::BotIn { path: q } = &d1.rule {
        return NestedDerivation::leaf(c.clone(), NestedRule::BotIn { path: q.clone() });
    }
    if let NestedRule::Init { path: q } = &d2.rule {
        let node = c.at(q).expect("init node");
        let pair_in_c = node.formulas.iter().any(|(f, pol)| {
            *pol == Polarity::Out
                && matches!(f, Formula::Atom(_))
                && node.formulas.contains(&(f.clone(), Polarity::In))
        });
        if pair_in_c {
            return NestedDerivation::leaf(c.clone(), NestedRule::Init { path: q.clone() });
        }
        // The pair used the cut occurrence: d1 already proves C.
        debug_assert!(d1.conclusion.same_multiset(c));
        return d1.clone();
    }
    if let NestedRule::BotIn { path: q } = &d2.rule {
        let node = c.at(q).expect("bot node");
        if node.formulas.contains(&(Formula::Bot, Polarity::In)) {
            return NestedDerivation::leaf(c.clone(), NestedRule::BotIn { path: q.clone() });
        }
        // xi is bottom; rewire d1's useless output to the real one.
        debug_assert_eq!(*xi, Formula::Bot);
        let (to_path, omega) = c.out_position().expect("conclusion is nested");
        return swap_out(d1, p, &to_path, &omega);
    }

    let left_main = principal_left(&d1.rule, p, xi);
    let right_main = principal_right(&d2.rule, p, xi);
    match (left_main, right_main) {
        (true, true) => principal_case(cfg, d1, d2),
        (_, false) => commute_right(cfg, d1, d2),
        (false, true) => commute_left(cfg, d1, d2),
    }
}

fn rebuild(conclusion: NestedSequent, rule: NestedRule, premises: Vec<NestedDerivation>) -> NestedDerivation {
    {
        let refs: Vec<&NestedSequent> = premises.iter().map(|x| &x.conclusion).collect();
        super::check::debug_check_step(&conclusion, &rule, &refs);
    }
    NestedDerivation { conclusion, rule, premises }
}

fn principal_case(cfg: &CutCfg, d1: &NestedDerivation, d2: &NestedDerivation) -> NestedDerivation {
    let c = &cfg.conclusion;
    let p = &cfg.path;
    match &cfg.xi {
        Formula::And(l, r) => {
            let (l, r) = ((**l).clone(), (**r).clone());
            let prem_l = &d1.premises[0];
            let prem_r = &d1.premises[1];
            let prem = &d2.premises[0];
            let c1 = c.with_formula(p, r.clone(), Polarity::In).unwrap();
            let left1 = weaken(prem_l, p, &only_in(&r));
            let r1 = cut_node(c1.clone(), p.clone(), l, left1, prem.clone());
            cut_node(c.clone(), p.clone(), r, prem_r.clone(), r1)
        }
        Formula::Or(l, r) => {
            let (l, r) = ((**l).clone(), (**r).clone());
            let (formula, prem_idx) = match &d1.rule {
                NestedRule::OrOut1 { .. } => (l, 0),
                NestedRule::OrOut2 { .. } => (r, 1),
                _ => unreachable!(),
            };
            cut_node(
                c.clone(),
                p.clone(),
                formula,
                d1.premises[0].clone(),
                d2.premises[prem_idx].clone(),
            )
        }
        Formula::Imp(l, r) => {
            let (l, r) = ((**l).clone(), (**r).clone());
            let d1_1 = &d1.premises[0]; // C_down + l*, r^
            let p0 = &d2.premises[0]; // C_down + xi*, l^ (principal kept)
            let p1 = &d2.premises[1]; // C + r*
            let c0 = c
                .remove_out()
                .unwrap()
                .with_formula(p, l.clone(), Polarity::Out)
                .unwrap();
            let r1 = cut_reduce(&CutCfg { conclusion: c0, path: p.clone(), xi: cfg.xi.clone() }, d1, p0);
            let c2 = c
                .remove_out()
                .unwrap()
                .with_formula(p, r.clone(), Polarity::Out)
                .unwrap();
            let r2 = cut_node(c2, p.clone(), l, r1, d1_1.clone());
            cut_node(c.clone(), p.clone(), r, r2, p1.clone())
        }
        Formula::CondBox(a, b) => {
            let (a, b) = ((**a).clone(), (**b).clone());
            let beta = match &d2.rule {
                NestedRule::BoxIn { bracket, .. } => *bracket,
                _ => unreachable!(),
            };
            let eta = c.bracket_at(p, beta).expect("paired bracket").index.clone();
            let d1_1 = &d1.premises[0]; // fresh [a: b^] appended
            let e1 = &d2.premises[0];
            let e2 = &d2.premises[1];
            let p2 = &d2.premises[2]; // C + xi* + b* in beta
            let fresh = c.at(p).expect("node").brackets.len();
            // Rename the fresh bracket's index to the paired one, then fuse
            // it into the paired bracket.
            let x1 = if a == eta {
                d1_1.clone()
            } else {
                rebuild(
                    d1_1.conclusion.with_index(p, fresh, eta.clone()).unwrap(),
                    NestedRule::Rep { path: p.clone(), bracket: fresh, old_index: a },
                    vec![e1.clone(), e2.clone(), d1_1.clone()],
                )
            };
            let fused = super::structural::fuse(&x1, p, fresh, beta, None)
                .expect("fusing the fresh bracket");
            let mut sub = p.clone();
            sub.push(beta);
            let c3 = c.with_formula(&sub, b.clone(), Polarity::In).unwrap();
            let d1w = weaken(d1, &sub, &only_in(&b));
            let x3 = cut_reduce(
                &CutCfg { conclusion: c3, path: p.clone(), xi: cfg.xi.clone() },
                &d1w,
                p2,
            );
            cut_node(c.clone(), sub, b, fused, x3)
        }
        Formula::CondDiam(a, b) => {
            let (a, b) = ((**a).clone(), (**b).clone());
            let beta = match &d1.rule {
                NestedRule::DiamOut { bracket, .. } => *bracket,
                _ => unreachable!(),
            };
            let eta = c.bracket_at(p, beta).expect("paired bracket").index.clone();
            let e1 = &d1.premises[0];
            let e2 = &d1.premises[1];
            let d1_3 = &d1.premises[2]; // C_down + b^ in beta
            let prem = &d2.premises[0]; // C + fresh [a: b*]
            let fresh = c.at(p).expect("node").brackets.len();
            let x1 = if a == eta {
                prem.clone()
            } else {
                rebuild(
                    prem.conclusion.with_index(p, fresh, eta.clone()).unwrap(),
                    NestedRule::Rep { path: p.clone(), bracket: fresh, old_index: a },
                    vec![e1.clone(), e2.clone(), prem.clone()],
                )
            };
            let fused = super::structural::fuse(&x1, p, fresh, beta, None)
                .expect("fusing the fresh bracket");
            let mut sub = p.clone();
            sub.push(beta);
            cut_node(c.clone(), sub, b, d1_3.clone(), fused)
        }
        Formula::Atom(_) | Formula::Bot => unreachable!("handled by the axiomatic cases"),
    }
}

/// The cut formula is parametric in d2's last rule: push the cut upward on
/// the right.
fn commute_right(cfg: &CutCfg, d1: &NestedDerivation, d2: &NestedDerivation) -> NestedDerivation {
    let c = &cfg.conclusion;
    let p = &cfg.path;
    let xi = &cfg.xi;
    let sub = |conclusion: NestedSequent, left: &NestedDerivation, right: &NestedDerivation| {
        cut_reduce(&CutCfg { conclusion, path: p.clone(), xi: xi.clone() }, left, right)
    };
    match d2.rule.clone() {
        NestedRule::AndIn { path: t, main } => {
            let d1i = invert(Invertible::AndIn, d1, &t, &main, None).unwrap();
            let (l, r) = two(&main);
            let c1 = c
                .without_formula(&t, &main, Polarity::In)
                .unwrap()
                .with_formula(&t, l, Polarity::In)
                .unwrap()
                .with_formula(&t, r, Polarity::In)
                .unwrap();
            let q = sub(c1, &d1i, &d2.premises[0]);
            rebuild(c.clone(), NestedRule::AndIn { path: t, main }, vec![q])
        }
        NestedRule::OrIn { path: t, main } => {
            let (l, r) = two(&main);
            let base = c.without_formula(&t, &main, Polarity::In).unwrap();
            let d1l = invert(Invertible::OrInL, d1, &t, &main, None).unwrap();
            let d1r = invert(Invertible::OrInR, d1, &t, &main, None).unwrap();
            let ql = sub(base.with_formula(&t, l, Polarity::In).unwrap(), &d1l, &d2.premises[0]);
            let qr = sub(base.with_formula(&t, r, Polarity::In).unwrap(), &d1r, &d2.premises[1]);
            rebuild(c.clone(), NestedRule::OrIn { path: t, main }, vec![ql, qr])
        }
        NestedRule::ImpIn { path: t, main } => {
            let (l, r) = two(&main);
            let c0 = c
                .remove_out()
                .unwrap()
                .with_formula(&t, l, Polarity::Out)
                .unwrap();
            let q0 = sub(c0, d1, &d2.premises[0]);
            let d1i = invert(Invertible::ImpInRight, d1, &t, &main, None).unwrap();
            let c1 = c
                .without_formula(&t, &main, Polarity::In)
                .unwrap()
                .with_formula(&t, r, Polarity::In)
                .unwrap();
            let q1 = sub(c1, &d1i, &d2.premises[1]);
            rebuild(c.clone(), NestedRule::ImpIn { path: t, main }, vec![q0, q1])
        }
        NestedRule::DiamIn { path: t, main } => {
            let d1i = invert(Invertible::DiamIn, d1, &t, &main, None).unwrap();
            let (l, r) = two(&main);
            let base = c.without_formula(&t, &main, Polarity::In).unwrap();
            let (c1, _) = base
                .with_bracket(
                    &t,
                    super::Bracket {
                        index: l,
                        body: NestedSequent::from_parts(vec![(r, Polarity::In)], vec![]),
                    },
                )
                .unwrap();
            let q = sub(c1, &d1i, &d2.premises[0]);
            rebuild(c.clone(), NestedRule::DiamIn { path: t, main }, vec![q])
        }
        NestedRule::BoxIn { path: t, main, bracket } => {
            let (_, consequent) = two(&main);
            let mut bp = t.clone();
            bp.push(bracket);
            let d1w = weaken(d1, &bp, &only_in(&consequent));
            let c1 = c.with_formula(&bp, consequent, Polarity::In).unwrap();
            let q = sub(c1, &d1w, &d2.premises[2]);
            rebuild(
                c.clone(),
                NestedRule::BoxIn { path: t, main, bracket },
                vec![d2.premises[0].clone(), d2.premises[1].clone(), q],
            )
        }
        NestedRule::AndOut { path: t, main } => {
            let (l, r) = two(&main);
            let base = c.without_formula(&t, &main, Polarity::Out).unwrap();
            let ql = sub(base.with_formula(&t, l, Polarity::Out).unwrap(), d1, &d2.premises[0]);
            let qr = sub(base.with_formula(&t, r, Polarity::Out).unwrap(), d1, &d2.premises[1]);
            rebuild(c.clone(), NestedRule::AndOut { path: t, main }, vec![ql, qr])
        }
        NestedRule::OrOut1 { path: t, main } => {
            let (l, _) = two(&main);
            let base = c.without_formula(&t, &main, Polarity::Out).unwrap();
            let q = sub(base.with_formula(&t, l, Polarity::Out).unwrap(), d1, &d2.premises[0]);
            rebuild(c.clone(), NestedRule::OrOut1 { path: t, main }, vec![q])
        }
        NestedRule::OrOut2 { path: t, main } => {
            let (_, r) = two(&main);
            let base = c.without_formula(&t, &main, Polarity::Out).unwrap();
            let q = sub(base.with_formula(&t, r, Polarity::Out).unwrap(), d1, &d2.premises[0]);
            rebuild(c.clone(), NestedRule::OrOut2 { path: t, main }, vec![q])
        }
        NestedRule::ImpOut { path: t, main } => {
            let (l, r) = two(&main);
            let c1 = c
                .without_formula(&t, &main, Polarity::Out)
                .unwrap()
                .with_formula(&t, l.clone(), Polarity::In)
                .unwrap()
                .with_formula(&t, r, Polarity::Out)
                .unwrap();
            let d1w = weaken(d1, &t, &only_in(&l));
            let q = sub(c1, &d1w, &d2.premises[0]);
            rebuild(c.clone(), NestedRule::ImpOut { path: t, main }, vec![q])
        }
        NestedRule::BoxOut { path: t, main } => {
            let (l, r) = two(&main);
            let base = c.without_formula(&t, &main, Polarity::Out).unwrap();
            let (c1, pos) = base
                .with_bracket(&t, super::Bracket { index: l.clone(), body: NestedSequent::goal(r) })
                .unwrap();
            let empty = NestedSequent::from_parts(
                vec![],
                vec![super::Bracket { index: l, body: NestedSequent::empty() }],
            );
            let d1w = weaken(d1, &t, &empty);
            let _ = pos;
            let q = sub(c1, &d1w, &d2.premises[0]);
            rebuild(c.clone(), NestedRule::BoxOut { path: t, main }, vec![q])
        }
        NestedRule::DiamOut { path: t, main, bracket } => {
            let (_, consequent) = two(&main);
            let mut bp = t.clone();
            bp.push(bracket);
            let c1 = c
                .without_formula(&t, &main, Polarity::Out)
                .unwrap()
                .with_formula(&bp, consequent, Polarity::Out)
                .unwrap();
            let q = sub(c1, d1, &d2.premises[2]);
            rebuild(
                c.clone(),
                NestedRule::DiamOut { path: t, main, bracket },
                vec![d2.premises[0].clone(), d2.premises[1].clone(), q],
            )
        }
        NestedRule::Cut { path: pc, formula: zeta } => {
            let c0 = c
                .remove_out()
                .unwrap()
                .with_formula(&pc, zeta.clone(), Polarity::Out)
                .unwrap();
            let q0 = sub(c0, d1, &d2.premises[0]);
            let c1 = c.with_formula(&pc, zeta.clone(), Polarity::In).unwrap();
            let d1w = weaken(d1, &pc, &only_in(&zeta));
            let q1 = sub(c1, &d1w, &d2.premises[1]);
            rebuild(c.clone(), NestedRule::Cut { path: pc, formula: zeta }, vec![q0, q1])
        }
        other => unreachable!("unexpected rule {} during cut reduction", other.name()),
    }
}

/// The cut formula is principal on the right but parametric in d1's last
/// rule: push the cut upward on the left.
fn commute_left(cfg: &CutCfg, d1: &NestedDerivation, d2: &NestedDerivation) -> NestedDerivation {
    let c = &cfg.conclusion;
    let p = &cfg.path;
    let xi = &cfg.xi;
    let sub = |conclusion: NestedSequent, left: &NestedDerivation, right: &NestedDerivation| {
        cut_reduce(&CutCfg { conclusion, path: p.clone(), xi: xi.clone() }, left, right)
    };
    match d1.rule.clone() {
        NestedRule::AndIn { path: t, main } => {
            let d2i = invert(Invertible::AndIn, d2, &t, &main, None).unwrap();
            let (l, r) = two(&main);
            let c1 = c
                .without_formula(&t, &main, Polarity::In)
                .unwrap()
                .with_formula(&t, l, Polarity::In)
                .unwrap()
                .with_formula(&t, r, Polarity::In)
                .unwrap();
            let q = sub(c1, &d1.premises[0], &d2i);
            rebuild(c.clone(), NestedRule::AndIn { path: t, main }, vec![q])
        }
        NestedRule::OrIn { path: t, main } => {
            let (l, r) = two(&main);
            let base = c.without_formula(&t, &main, Polarity::In).unwrap();
            let d2l = invert(Invertible::OrInL, d2, &t, &main, None).unwrap();
            let d2r = invert(Invertible::OrInR, d2, &t, &main, None).unwrap();
            let ql = sub(base.with_formula(&t, l, Polarity::In).unwrap(), &d1.premises[0], &d2l);
            let qr = sub(base.with_formula(&t, r, Polarity::In).unwrap(), &d1.premises[1], &d2r);
            rebuild(c.clone(), NestedRule::OrIn { path: t, main }, vec![ql, qr])
        }
        NestedRule::ImpIn { path: t, main } => {
            let (_, r) = two(&main);
            // The first premise already lost the cut output; reuse it.
            let p0 = d1.premises[0].clone();
            let d2i = invert(Invertible::ImpInRight, d2, &t, &main, None).unwrap();
            let c1 = c
                .without_formula(&t, &main, Polarity::In)
                .unwrap()
                .with_formula(&t, r, Polarity::In)
                .unwrap();
            let q1 = sub(c1, &d1.premises[1], &d2i);
            rebuild(c.clone(), NestedRule::ImpIn { path: t, main }, vec![p0, q1])
        }
        NestedRule::DiamIn { path: t, main } => {
            let d2i = invert(Invertible::DiamIn, d2, &t, &main, None).unwrap();
            let (l, r) = two(&main);
            let base = c.without_formula(&t, &main, Polarity::In).unwrap();
            let (c1, _) = base
                .with_bracket(
                    &t,
                    super::Bracket {
                        index: l,
                        body: NestedSequent::from_parts(vec![(r, Polarity::In)], vec![]),
                    },
                )
                .unwrap();
            let q = sub(c1, &d1.premises[0], &d2i);
            rebuild(c.clone(), NestedRule::DiamIn { path: t, main }, vec![q])
        }
        NestedRule::BoxIn { path: t, main, bracket } => {
            let (_, consequent) = two(&main);
            let mut bp = t.clone();
            bp.push(bracket);
            let d2w = weaken(d2, &bp, &only_in(&consequent));
            let c1 = c.with_formula(&bp, consequent, Polarity::In).unwrap();
            let q = sub(c1, &d1.premises[2], &d2w);
            rebuild(
                c.clone(),
                NestedRule::BoxIn { path: t, main, bracket },
                vec![d1.premises[0].clone(), d1.premises[1].clone(), q],
            )
        }
        NestedRule::Cut { path: pc, formula: zeta } => {
            // The left premise of the inner cut lost the output; reuse it as
            // the rebuilt inner cut's own left premise.
            let p0 = d1.premises[0].clone();
            let c1 = c.with_formula(&pc, zeta.clone(), Polarity::In).unwrap();
            let d2w = weaken(d2, &pc, &only_in(&zeta));
            let q1 = sub(c1, &d1.premises[1], &d2w);
            rebuild(c.clone(), NestedRule::Cut { path: pc, formula: zeta }, vec![p0, q1])
        }
        other => unreachable!("unexpected left rule {} during cut reduction", other.name()),
    }
}

fn two(f: &Formula) -> (Formula, Formula) {
    match f {
        Formula::And(l, r)
        | Formula::Or(l, r)
        | Formula::Imp(l, r)
        | Formula::CondBox(l, r)
        | Formula::CondDiam(l, r) => ((**l).clone(), (**r).clone()),
        other => panic!("`{other}` is not binary"),
    }
}

/// Moves a useless bottom output at `from` to the conclusion's real output
/// `omega` at `to`.
fn swap_out(d: &NestedDerivation, from: &[usize], to: &[usize], omega: &Formula) -> NestedDerivation {
    let node_has = d
        .conclusion
        .at(from)
        .map(|n| n.formulas.contains(&(Formula::Bot, Polarity::Out)))
        .unwrap_or(false);
    if !node_has {
        // The bottom output was already consumed above a premise that
        // dropped the output; this subtree is reused verbatim by the caller.
        unreachable!("swap_out called below an output-dropping premise");
    }
    let conclusion = d
        .conclusion
        .without_formula(from, &Formula::Bot, Polarity::Out)
        .unwrap()
        .with_formula(to, omega.clone(), Polarity::Out)
        .unwrap();
    match &d.rule {
        NestedRule::ImpIn { .. } => {
            // Premise 0 drops the output; it proves exactly the transformed
            // premise, so it is reused.
            let p1 = swap_out(&d.premises[1], from, to, omega);
            rebuild(conclusion, d.rule.clone(), vec![d.premises[0].clone(), p1])
        }
        NestedRule::Cut { .. } => {
            let p1 = swap_out(&d.premises[1], from, to, omega);
            rebuild(conclusion, d.rule.clone(), vec![d.premises[0].clone(), p1])
        }
        NestedRule::Nec => {
            assert!(!from.is_empty() && !to.is_empty() && from[0] == 0 && to[0] == 0);
            let inner = swap_out(&d.premises[0], &from[1..], &to[1..], omega);
            rebuild(conclusion, NestedRule::Nec, vec![inner])
        }
        rule => {
            let ctx: Vec<usize> = match rule {
                NestedRule::BoxIn { .. } | NestedRule::DiamOut { .. } | NestedRule::Rep { .. } => {
                    vec![2]
                }
                _ => (0..d.premises.len()).collect(),
            };
            let premises = d
                .premises
                .iter()
                .enumerate()
                .map(|(i, q)| if ctx.contains(&i) { swap_out(q, from, to, omega) } else { q.clone() })
                .collect();
            rebuild(conclusion, rule.clone(), premises)
        }
    }
}

/// Full cut elimination: returns the cut- and rep-free derivation and the
/// non-increasing rank trace recorded after each reduction round.
pub fn eliminate_cut(d: &NestedDerivation) -> Result<NestedDerivation, NestedError> {
    Ok(eliminate_cut_trace(d)?.0)
}

pub fn eliminate_cut_trace(
    d: &NestedDerivation,
) -> Result<(NestedDerivation, Vec<usize>), NestedError> {
    check_nested_report(d, RuleSet::WithCut)
        .map_err(|e| NestedError::Other(format!("input does not check: {e}")))?;
    if d.uses_rep() || d.uses_structural() {
        return Err(NestedError::Other(
            "cut elimination expects a derivation in the calculus plus cut".into(),
        ));
    }
    let mut cur = d.clone();
    let mut ranks = vec![cur.rank()];
    let mut guard = 0usize;
    while cur.rank() > 0 {
        guard += 1;
        assert!(guard < 10_000, "cut elimination failed to converge");
        let max = cur.rank();
        cur = reduce_topmost(cur, max);
        cur = drop_reps(cur)?;
        let r = cur.rank();
        assert!(r <= max, "rank increased from {max} to {r}");
        ranks.push(r);
    }
    debug_assert!(!cur.uses_cut() && !cur.uses_rep());
    Ok((cur, ranks))
}

/// Replaces one topmost maximal-rank cut.
fn reduce_topmost(d: NestedDerivation, max: usize) -> NestedDerivation {
    // Recurse first: a topmost cut has no maximal cut above it.
    let own_rank = match &d.rule {
        NestedRule::Cut { formula, .. } => formula.weight() + 1,
        _ => 0,
    };
    let premises_have_max = d
        .premises
        .iter()
        .any(|p| p.rank() == max);
    if premises_have_max {
        let mut done = false;
        let premises = d
            .premises
            .into_iter()
            .map(|p| {
                if !done && p.rank() == max {
                    done = true;
                    reduce_topmost(p, max)
                } else {
                    p
                }
            })
            .collect();
        return NestedDerivation { conclusion: d.conclusion, rule: d.rule, premises };
    }
    if own_rank == max {
        if let NestedRule::Cut { path, formula } = &d.rule {
            let cfg = CutCfg {
                conclusion: d.conclusion.clone(),
                path: path.clone(),
                xi: formula.clone(),
            };
            return cut_reduce(&cfg, &d.premises[0], &d.premises[1]);
        }
    }
    d
}

/// Eliminates every index-replacement node, highest first.
fn drop_reps(d: NestedDerivation) -> Result<NestedDerivation, NestedError> {
    let premises = d
        .premises
        .into_iter()
        .map(drop_reps)
        .collect::<Result<Vec<_>, _>>()?;
    if let NestedRule::Rep { path, bracket, old_index } = &d.rule {
        let eta = d
            .conclusion
            .bracket_at(path, *bracket)?
            .index
            .clone();
        if *old_index == eta {
            return Ok(premises.into_iter().nth(2).unwrap());
        }
        let out = replace_index(
            &premises[2],
            path,
            *bracket,
            old_index,
            &eta,
            &premises[0],
            &premises[1],
        );
        return Ok(out);
    }
    Ok(NestedDerivation { conclusion: d.conclusion, rule: d.rule, premises })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{and, atom, cond_box, parse};
    use crate::nested::structural::generalized_init;
    use crate::nested::{check_nested, prove_nested, NestedBudget, NestedProofResult};

    fn proof_of(text: &str) -> NestedDerivation {
        let goal = NestedSequent::goal(parse(text).unwrap());
        match prove_nested(&goal, NestedBudget::default()).unwrap() {
            NestedProofResult::Proved(d) => d,
            other => panic!("{text}: {}", other.verdict()),
        }
    }

    /// Builds `cut(d1, d2)` from proofs of `xi^`-flavored goals: d1 proves
    /// `ctx_down + xi^`, d2 proves `ctx + xi*`.
    fn compose_cut(
        conclusion: NestedSequent,
        path: &[usize],
        xi: &Formula,
        d1: NestedDerivation,
        d2: NestedDerivation,
    ) -> NestedDerivation {
        let rule = NestedRule::Cut { path: path.to_vec(), formula: xi.clone() };
        let d = NestedDerivation { conclusion, rule, premises: vec![d1, d2] };
        assert!(check_nested(&d, RuleSet::WithCut), "composed cut must check");
        d
    }

    #[test]
    fn cut_free_input_is_unchanged() {
        let d = proof_of("p > true");
        let (out, ranks) = eliminate_cut_trace(&d).unwrap();
        assert_eq!(out, d);
        assert_eq!(ranks, vec![0]);
    }

    #[test]
    fn atomic_cut_over_init_leaves() {
        // d1: p*, p^ ; d2: p*, p*, q^ -> p... compose over conclusion
        // p*, (p -> p)^ is simpler: cut on p.
        let xi = atom("p");
        // conclusion: p*, q*, q^ with cut at the root on p.
        let conclusion = NestedSequent::from_parts(
            vec![
                (atom("p"), Polarity::In),
                (atom("q"), Polarity::In),
                (atom("q"), Polarity::Out),
            ],
            vec![],
        );
        let d1 = {
            // p*, q*, p^
            let base = NestedSequent::from_parts(
                vec![(atom("q"), Polarity::In)],
                vec![],
            );
            let d = generalized_init(&base, &[], &atom("p")).unwrap();
            d
        };
        let d2 = {
            // p*, p*, q*, q^
            let base = NestedSequent::from_parts(
                vec![(atom("p"), Polarity::In), (atom("p"), Polarity::In)],
                vec![],
            );
            generalized_init(&base, &[], &atom("q")).unwrap()
        };
        let cut = compose_cut(conclusion.clone(), &[], &xi, d1, d2);
        assert_eq!(cut.rank(), 1);
        let (out, ranks) = eliminate_cut_trace(&cut).unwrap();
        assert!(check_nested(&out, RuleSet::Calculus));
        assert!(out.conclusion.same_multiset(&conclusion));
        assert_eq!(*ranks.last().unwrap(), 0);
        assert!(ranks.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn box_principal_cut_reduces() {
        // The Lemma-4 style instance: cut formula p > q, both sides
        // principal, paired bracket indexed by an equivalent-but-unequal
        // formula p & p.
        let xi = cond_box(atom("p"), atom("q"));
        let pp = and(atom("p"), atom("p"));
        // conclusion: (p > q)*, [p & p: q*, q^]
        let conclusion = NestedSequent::from_parts(
            vec![(xi.clone(), Polarity::In)],
            vec![super::super::Bracket {
                index: pp.clone(),
                body: NestedSequent::from_parts(
                    vec![(atom("q"), Polarity::In), (atom("q"), Polarity::Out)],
                    vec![],
                ),
            }],
        );
        // d1 proves conclusion_down + xi^; d2 proves conclusion + xi*.
        let d1_goal = conclusion
            .remove_out()
            .unwrap()
            .with_formula(&[], xi.clone(), Polarity::Out)
            .unwrap();
        let d2_goal = conclusion.with_formula(&[], xi.clone(), Polarity::In).unwrap();
        let d1 = match prove_nested(&d1_goal, NestedBudget::default()).unwrap() {
            NestedProofResult::Proved(d) => d,
            other => panic!("left premise: {}", other.verdict()),
        };
        let d2 = match prove_nested(&d2_goal, NestedBudget::default()).unwrap() {
            NestedProofResult::Proved(d) => d,
            other => panic!("right premise: {}", other.verdict()),
        };
        let cut = compose_cut(conclusion.clone(), &[], &xi, d1, d2);
        let (out, ranks) = eliminate_cut_trace(&cut).unwrap();
        assert!(check_nested(&out, RuleSet::Calculus), "{out:#?}");
        assert!(out.conclusion.same_multiset(&conclusion));
        assert!(!out.uses_cut() && !out.uses_rep() && !out.uses_structural());
        assert!(ranks.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*ranks.last().unwrap(), 0);
    }

    #[test]
    fn rep_elimination_standalone() {
        // Start from a proof of [p: q*, q^] with bracket index p, replace
        // the index by p & p using p <-> p & p.
        let pp = and(atom("p"), atom("p"));
        let base = NestedSequent::from_parts(
            vec![],
            vec![super::super::Bracket { index: atom("p"), body: NestedSequent::empty() }],
        );
        let d3 = generalized_init(&base, &[0], &atom("q")).unwrap();
        let d1 = proof_of_pair(&atom("p"), &pp);
        let d2 = proof_of_pair(&pp, &atom("p"));
        let out = eliminate_rep(&d1, &d2, &d3).unwrap();
        assert!(check_nested(&out, RuleSet::WithCut));
        assert_eq!(out.conclusion.brackets[0].index, pp);
        // Identity replacement returns the input unchanged.
        let same = eliminate_rep(
            &proof_of_pair(&atom("p"), &atom("p")),
            &proof_of_pair(&atom("p"), &atom("p")),
            &d3,
        )
        .unwrap();
        assert_eq!(same, d3);
    }

    fn proof_of_pair(a: &Formula, b: &Formula) -> NestedDerivation {
        let goal = NestedSequent::from_parts(
            vec![(a.clone(), Polarity::In), (b.clone(), Polarity::Out)],
            vec![],
        );
        match prove_nested(&goal, NestedBudget::default()).unwrap() {
            NestedProofResult::Proved(d) => d,
            other => panic!("{a} => {b}: {}", other.verdict()),
        }
    }

    use crate::formula::Polarity;
    use crate::nested::RuleSet;
}
