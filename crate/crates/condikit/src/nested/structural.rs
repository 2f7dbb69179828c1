//! Executable admissibility of the structural rules.
//!
//! Every transformer here rewrites a derivation in the calculus plus cut and
//! index replacement into another one, height- and rank-preserving unless
//! noted. Positions stay addressable because rules only append brackets;
//! the one exception is bracket fusion, which removes a bracket and
//! therefore rewrites stored positions as it goes.

use crate::formula::{Formula, Polarity};

use super::check::debug_check_step;
use super::rules::premises_of;
use super::{Bracket, NestedDerivation, NestedError, NestedRule, NestedSequent, Path};

/// Premise positions that live in the conclusion's context (as opposed to
/// the top-level equivalence premises).
fn context_premises(rule: &NestedRule, arity: usize) -> Vec<usize> {
    match rule {
        NestedRule::BoxIn { .. } | NestedRule::DiamOut { .. } | NestedRule::Rep { .. } => vec![2],
        _ => (0..arity).collect(),
    }
}

fn rebuild(conclusion: NestedSequent, rule: NestedRule, premises: Vec<NestedDerivation>) -> NestedDerivation {
    {
        let refs: Vec<&NestedSequent> = premises.iter().map(|p| &p.conclusion).collect();
        debug_check_step(&conclusion, &rule, &refs);
    }
    NestedDerivation { conclusion, rule, premises }
}

/// Inserts the input sequent `content` at `path` throughout `d`.
pub fn weaken(d: &NestedDerivation, path: &[usize], content: &NestedSequent) -> NestedDerivation {
    assert!(content.is_input(), "only input sequents can be weakened in");
    if content.formulas.is_empty() && content.brackets.is_empty() {
        return d.clone();
    }
    weaken_rec(d, path, content)
}

fn weaken_rec(d: &NestedDerivation, path: &[usize], content: &NestedSequent) -> NestedDerivation {
    let conclusion = d.conclusion.with_content(path, content).expect("weaken path");
    match &d.rule {
        NestedRule::Nec => {
            assert!(!path.is_empty(), "cannot weaken beside a necessitation bracket");
            let inner = weaken_rec(&d.premises[0], &path[1..], content);
            rebuild(conclusion, NestedRule::Nec, vec![inner])
        }
        rule => {
            let ctx = context_premises(rule, d.premises.len());
            let premises = d
                .premises
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    if ctx.contains(&i) {
                        weaken_rec(p, path, content)
                    } else {
                        p.clone()
                    }
                })
                .collect();
            rebuild(conclusion, rule.clone(), premises)
        }
    }
}

/// Wraps a derivation of `Gamma` into one of `[index: Gamma]`.
pub fn nec_wrap(d: &NestedDerivation, index: &Formula) -> NestedDerivation {
    fn wrap(d: &NestedDerivation, index: &Formula) -> NestedDerivation {
        let conclusion = NestedSequent::from_parts(
            Vec::new(),
            vec![Bracket { index: index.clone(), body: d.conclusion.clone() }],
        );
        let rule = prefix_rule(&d.rule, 0);
        let ctx = context_premises(&d.rule, d.premises.len());
        let premises = d
            .premises
            .iter()
            .enumerate()
            .map(|(i, p)| if ctx.contains(&i) { wrap(p, index) } else { p.clone() })
            .collect();
        rebuild(conclusion, rule, premises)
    }
    wrap(d, index)
}

fn prefix_path(path: &[usize], first: usize) -> Path {
    let mut p = Vec::with_capacity(path.len() + 1);
    p.push(first);
    p.extend_from_slice(path);
    p
}

fn prefix_rule(rule: &NestedRule, first: usize) -> NestedRule {
    let mut r = rule.clone();
    match &mut r {
        NestedRule::Init { path }
        | NestedRule::BotIn { path }
        | NestedRule::AndIn { path, .. }
        | NestedRule::AndOut { path, .. }
        | NestedRule::OrIn { path, .. }
        | NestedRule::OrOut1 { path, .. }
        | NestedRule::OrOut2 { path, .. }
        | NestedRule::ImpIn { path, .. }
        | NestedRule::ImpOut { path, .. }
        | NestedRule::BoxIn { path, .. }
        | NestedRule::BoxOut { path, .. }
        | NestedRule::DiamIn { path, .. }
        | NestedRule::DiamOut { path, .. }
        | NestedRule::W { path, .. }
        | NestedRule::M { path, .. }
        | NestedRule::C { path, .. }
        | NestedRule::Cut { path, .. }
        | NestedRule::Rep { path, .. } => *path = prefix_path(path, first),
        NestedRule::Nec => panic!("cannot wrap a necessitation node"),
    }
    r
}

/// The box-medial rule as a transformation: from `Gamma{[eta: D1]}` and
/// `Gamma{[eta: D2]}` (the bracket at the same position), a derivation of
/// `Gamma{[eta: D1, D2]}`. One of the bodies is an input sequent, so this is
/// weakening into the bracket of the derivation holding the output side.
pub fn merge(
    d1: &NestedDerivation,
    d2: &NestedDerivation,
    path: &[usize],
    bracket: usize,
) -> Result<NestedDerivation, NestedError> {
    let b1 = d1.conclusion.bracket_at(path, bracket)?.clone();
    let b2 = d2.conclusion.bracket_at(path, bracket)?.clone();
    if b1.index != b2.index {
        return Err(NestedError::Other("merge needs equal indices".into()));
    }
    let mut sub = path.to_vec();
    sub.push(bracket);
    if b2.body.is_input() {
        Ok(weaken(d1, &sub, &b2.body))
    } else if b1.body.is_input() {
        Ok(weaken(d2, &sub, &b1.body))
    } else {
        Err(NestedError::Other("both bracket bodies carry an output formula".into()))
    }
}

/// The invertible rules of the calculus (plus the right premise of the
/// left implication rule, which is needed internally).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Invertible {
    AndIn,
    AndOutL,
    AndOutR,
    OrInL,
    OrInR,
    ImpOut,
    BoxOut,
    DiamIn,
    /// Premise 3 of the box-left rule; equivalent to weakening the
    /// consequent into the bracket.
    BoxIn,
    /// The right premise of the implication-left rule.
    ImpInRight,
}

/// Height- and rank-preserving inversion of `rule` applied at
/// `(path, main)`; for `BoxIn` the target bracket must be supplied.
pub fn invert(
    kind: Invertible,
    d: &NestedDerivation,
    path: &[usize],
    main: &Formula,
    bracket: Option<usize>,
) -> Result<NestedDerivation, NestedError> {
    let (l, r) = match main {
        Formula::And(l, r)
        | Formula::Or(l, r)
        | Formula::Imp(l, r)
        | Formula::CondBox(l, r)
        | Formula::CondDiam(l, r) => ((**l).clone(), (**r).clone()),
        other => return Err(NestedError::Other(format!("`{other}` has no premises to invert"))),
    };
    use Polarity::{In, Out};
    let (pol, replacement, pick): (Polarity, NestedSequent, usize) = match kind {
        Invertible::AndIn => (
            In,
            NestedSequent::from_parts(vec![(l, In), (r, In)], vec![]),
            0,
        ),
        Invertible::AndOutL => (Out, NestedSequent::from_parts(vec![(l, Out)], vec![]), 0),
        Invertible::AndOutR => (Out, NestedSequent::from_parts(vec![(r, Out)], vec![]), 1),
        Invertible::OrInL => (In, NestedSequent::from_parts(vec![(l, In)], vec![]), 0),
        Invertible::OrInR => (In, NestedSequent::from_parts(vec![(r, In)], vec![]), 1),
        Invertible::ImpOut => (
            Out,
            NestedSequent::from_parts(vec![(l, In), (r, Out)], vec![]),
            0,
        ),
        Invertible::BoxOut => (
            Out,
            NestedSequent::from_parts(
                vec![],
                vec![Bracket { index: l, body: NestedSequent::goal(r) }],
            ),
            0,
        ),
        Invertible::DiamIn => (
            In,
            NestedSequent::from_parts(
                vec![],
                vec![Bracket {
                    index: l,
                    body: NestedSequent::from_parts(vec![(r, In)], vec![]),
                }],
            ),
            0,
        ),
        Invertible::ImpInRight => (In, NestedSequent::from_parts(vec![(r, In)], vec![]), 1),
        Invertible::BoxIn => {
            let b = bracket.ok_or_else(|| NestedError::Other("box inversion needs a bracket".into()))?;
            let mut sub = path.to_vec();
            sub.push(b);
            let inner = NestedSequent::from_parts(vec![(r, In)], vec![]);
            return Ok(weaken(d, &sub, &inner));
        }
    };
    invert_once(d, path, main, pol, &replacement, kind, pick)
}

fn matches_kind(kind: Invertible, rule: &NestedRule, path: &[usize], main: &Formula) -> bool {
    let (rp, rm) = match rule {
        NestedRule::AndIn { path, main } if kind == Invertible::AndIn => (path, main),
        NestedRule::AndOut { path, main }
            if matches!(kind, Invertible::AndOutL | Invertible::AndOutR) =>
        {
            (path, main)
        }
        NestedRule::OrIn { path, main } if matches!(kind, Invertible::OrInL | Invertible::OrInR) => {
            (path, main)
        }
        NestedRule::ImpOut { path, main } if kind == Invertible::ImpOut => (path, main),
        NestedRule::BoxOut { path, main } if kind == Invertible::BoxOut => (path, main),
        NestedRule::DiamIn { path, main } if kind == Invertible::DiamIn => (path, main),
        NestedRule::ImpIn { path, main } if kind == Invertible::ImpInRight => (path, main),
        _ => return false,
    };
    rp == path && rm == main
}

/// Replaces one `(main, pol)` occurrence at `path` by `replacement`
/// throughout the derivation; where the matching rule fires on exactly that
/// occurrence, the premise `pick` is spliced in.
fn invert_once(
    d: &NestedDerivation,
    path: &[usize],
    main: &Formula,
    pol: Polarity,
    replacement: &NestedSequent,
    kind: Invertible,
    pick: usize,
) -> Result<NestedDerivation, NestedError> {
    if matches_kind(kind, &d.rule, path, main) {
        return Ok(d.premises[pick].clone());
    }
    let conclusion = d
        .conclusion
        .without_formula(path, main, pol)?
        .with_content(path, replacement)?;
    match &d.rule {
        NestedRule::Nec => {
            assert!(!path.is_empty());
            let inner = invert_once(&d.premises[0], &path[1..], main, pol, replacement, kind, pick)?;
            Ok(rebuild(conclusion, NestedRule::Nec, vec![inner]))
        }
        rule => {
            let ctx = context_premises(rule, d.premises.len());
            let mut premises = Vec::with_capacity(d.premises.len());
            for (i, p) in d.premises.iter().enumerate() {
                if ctx.contains(&i) && premise_carries(rule, i, &p.conclusion, path, main, pol) {
                    premises.push(invert_once(p, path, main, pol, replacement, kind, pick)?);
                } else {
                    premises.push(p.clone());
                }
            }
            Ok(rebuild(conclusion, rule.clone(), premises))
        }
    }
}

/// Output-polarity occurrences disappear from the first premise of the
/// implication-left rule and from cut's second premise side; this detects
/// whether the tracked occurrence survives into a premise.
fn premise_carries(
    _rule: &NestedRule,
    _i: usize,
    premise: &NestedSequent,
    path: &[usize],
    main: &Formula,
    pol: Polarity,
) -> bool {
    premise
        .at(path)
        .map(|node| node.formulas.iter().any(|(g, q)| g == main && *q == pol))
        .unwrap_or(false)
}

/// Contraction: from a derivation of the conclusion with `main` twice at
/// `path`, one with a single occurrence. Height- and rank-preserving on
/// rep-free inputs.
pub fn contract(
    d: &NestedDerivation,
    path: &[usize],
    main: &Formula,
) -> Result<NestedDerivation, NestedError> {
    let conclusion = d.conclusion.without_formula(path, main, Polarity::In)?;
    // The rule consuming one of the two copies, if any.
    let principal = match &d.rule {
        NestedRule::AndIn { path: rp, main: rm }
        | NestedRule::OrIn { path: rp, main: rm }
        | NestedRule::ImpIn { path: rp, main: rm }
        | NestedRule::DiamIn { path: rp, main: rm }
        | NestedRule::BoxIn { path: rp, main: rm, .. } => rp == path && rm == main,
        _ => false,
    };
    if !principal {
        // Parametric: both copies flow into every context premise.
        return match &d.rule {
            NestedRule::Nec => {
                assert!(!path.is_empty());
                let inner = contract(&d.premises[0], &path[1..], main)?;
                Ok(rebuild(conclusion, NestedRule::Nec, vec![inner]))
            }
            rule => {
                let ctx = context_premises(rule, d.premises.len());
                let mut premises = Vec::with_capacity(d.premises.len());
                for (i, p) in d.premises.iter().enumerate() {
                    if ctx.contains(&i) {
                        premises.push(contract(p, path, main)?);
                    } else {
                        premises.push(p.clone());
                    }
                }
                Ok(rebuild(conclusion, rule.clone(), premises))
            }
        };
    }
    match &d.rule {
        NestedRule::BoxIn { bracket, .. } => {
            // The principal is kept in the third premise.
            let p3 = contract(&d.premises[2], path, main)?;
            Ok(rebuild(
                conclusion,
                NestedRule::BoxIn { path: path.to_vec(), main: main.clone(), bracket: *bracket },
                vec![d.premises[0].clone(), d.premises[1].clone(), p3],
            ))
        }
        NestedRule::AndIn { .. } => {
            let (l, r) = split(main);
            // Premise: l, r and the surviving copy. Invert the copy, then
            // contract the doubled components.
            let p = invert(Invertible::AndIn, &d.premises[0], path, main, None)?;
            let p = contract(&p, path, &l)?;
            let p = contract(&p, path, &r)?;
            Ok(rebuild(
                conclusion,
                NestedRule::AndIn { path: path.to_vec(), main: main.clone() },
                vec![p],
            ))
        }
        NestedRule::OrIn { .. } => {
            let (l, r) = split(main);
            let pl = invert(Invertible::OrInL, &d.premises[0], path, main, None)?;
            let pl = contract(&pl, path, &l)?;
            let pr = invert(Invertible::OrInR, &d.premises[1], path, main, None)?;
            let pr = contract(&pr, path, &r)?;
            Ok(rebuild(
                conclusion,
                NestedRule::OrIn { path: path.to_vec(), main: main.clone() },
                vec![pl, pr],
            ))
        }
        NestedRule::ImpIn { .. } => {
            let (_, r) = split(main);
            // Both copies persist in the first premise; the second loses one
            // copy but gains the consequent.
            let p0 = contract(&d.premises[0], path, main)?;
            let p1 = invert(Invertible::ImpInRight, &d.premises[1], path, main, None)?;
            let p1 = contract(&p1, path, &r)?;
            Ok(rebuild(
                conclusion,
                NestedRule::ImpIn { path: path.to_vec(), main: main.clone() },
                vec![p0, p1],
            ))
        }
        NestedRule::DiamIn { .. } => {
            let (l, r) = split(main);
            // Premise: a fresh bracket plus the surviving copy. Invert the
            // copy into a second bracket, fuse the two, and contract the
            // doubled consequent inside.
            let p = invert(Invertible::DiamIn, &d.premises[0], path, main, None)?;
            let node = p.conclusion.at(path)?;
            let positions: Vec<usize> = node
                .brackets
                .iter()
                .enumerate()
                .filter(|(_, b)| {
                    b.index == l
                        && b.body.same_multiset(&NestedSequent::from_parts(
                            vec![(r.clone(), Polarity::In)],
                            vec![],
                        ))
                })
                .map(|(i, _)| i)
                .collect();
            assert!(positions.len() >= 2, "two freshly created brackets expected");
            let fused = fuse(&p, path, positions[0], positions[1], None)?;
            // The fused bracket sits where the kept one was, adjusted.
            let keep = if positions[1] > positions[0] { positions[1] - 1 } else { positions[1] };
            let mut sub = path.to_vec();
            sub.push(keep);
            let inner = contract(&fused, &sub, &r)?;
            Ok(rebuild(
                conclusion,
                NestedRule::DiamIn { path: path.to_vec(), main: main.clone() },
                vec![inner],
            ))
        }
        _ => unreachable!(),
    }
}

fn split(f: &Formula) -> (Formula, Formula) {
    match f {
        Formula::And(l, r)
        | Formula::Or(l, r)
        | Formula::Imp(l, r)
        | Formula::CondBox(l, r)
        | Formula::CondDiam(l, r) => ((**l).clone(), (**r).clone()),
        other => panic!("`{other}` is not binary"),
    }
}

/// Contracts a duplicated input sequent at `path`: formulas through `c`,
/// identical brackets through fusion.
pub fn contract_content(
    d: &NestedDerivation,
    path: &[usize],
    content: &NestedSequent,
) -> Result<NestedDerivation, NestedError> {
    let mut out = d.clone();
    for (f, pol) in &content.formulas {
        assert_eq!(*pol, Polarity::In);
        out = contract(&out, path, f)?;
    }
    for b in &content.brackets {
        // Locate two multiset-equal copies of the bracket.
        let node = out.conclusion.at(path)?;
        let mut hits = node
            .brackets
            .iter()
            .enumerate()
            .filter(|(_, c)| c.index == b.index && c.body.same_multiset(&b.body))
            .map(|(i, _)| i);
        let b1 = hits.next().ok_or_else(|| NestedError::Other("bracket copy missing".into()))?;
        let b2 = hits.next().ok_or_else(|| NestedError::Other("bracket copy missing".into()))?;
        out = fuse(&out, path, b1, b2, None)?;
        let keep = if b2 > b1 { b2 - 1 } else { b2 };
        let mut sub = path.to_vec();
        sub.push(keep);
        out = contract_content(&out, &sub, &b.body)?;
    }
    Ok(out)
}

// --- bracket fusion -------------------------------------------------------

/// Position bookkeeping for fusion: bracket `from` at `node_path` is removed
/// and its body appended to bracket `into`.
struct Fusion {
    node_path: Path,
    from: usize,
    into: usize,
    /// Brackets already in the surviving body (offset for paths coming
    /// through `from`).
    offset: usize,
}

impl Fusion {
    fn adjust_component(&self, j: usize) -> usize {
        if j == self.from {
            self.kept()
        } else if j > self.from {
            j - 1
        } else {
            j
        }
    }

    fn kept(&self) -> usize {
        if self.into > self.from {
            self.into - 1
        } else {
            self.into
        }
    }

    fn adjust_path(&self, path: &[usize]) -> Path {
        let n = self.node_path.len();
        if path.len() <= n || path[..n] != self.node_path[..] {
            return path.to_vec();
        }
        let mut out = path.to_vec();
        let came_into = out[n] == self.into;
        out[n] = self.adjust_component(out[n]);
        if came_into && out.len() > n + 1 {
            out[n + 1] += self.offset;
        }
        out
    }

    /// Adjusts a (path, bracket) pair viewed as one extended path.
    fn adjust_bracket(&self, path: &[usize], bracket: usize) -> (Path, usize) {
        let mut full = path.to_vec();
        full.push(bracket);
        let adjusted = self.adjust_path(&full);
        let b = *adjusted.last().unwrap();
        (adjusted[..adjusted.len() - 1].to_vec(), b)
    }

    fn adjust_rule(&self, rule: &NestedRule) -> NestedRule {
        let mut r = rule.clone();
        match &mut r {
            NestedRule::Init { path }
            | NestedRule::BotIn { path }
            | NestedRule::AndIn { path, .. }
            | NestedRule::AndOut { path, .. }
            | NestedRule::OrIn { path, .. }
            | NestedRule::OrOut1 { path, .. }
            | NestedRule::OrOut2 { path, .. }
            | NestedRule::ImpIn { path, .. }
            | NestedRule::ImpOut { path, .. }
            | NestedRule::BoxOut { path, .. }
            | NestedRule::DiamIn { path, .. }
            | NestedRule::W { path, .. }
            | NestedRule::C { path, .. }
            | NestedRule::Cut { path, .. } => *path = self.adjust_path(path),
            NestedRule::BoxIn { path, bracket, .. }
            | NestedRule::DiamOut { path, bracket, .. }
            | NestedRule::Rep { path, bracket, .. }
            | NestedRule::M { path, bracket, .. } => {
                let (p, b) = self.adjust_bracket(path, *bracket);
                *path = p;
                *bracket = b;
            }
            NestedRule::Nec => {}
        }
        r
    }

    fn apply(&self, ns: &NestedSequent) -> NestedSequent {
        let mut out = ns.clone();
        let node = out.at_mut(&self.node_path).expect("fusion node");
        let from_bracket = node.brackets.remove(self.from);
        let kept = self.kept();
        node.brackets[kept].body.formulas.extend(from_bracket.body.formulas);
        node.brackets[kept]
            .body
            .brackets
            .splice(0..0, from_bracket.body.brackets);
        out
    }
}

/// Fuses two brackets at the same node into one: from a derivation of
/// `Gamma{[a: D1], [b: D2]}` (positions `from` and `into`), a derivation of
/// `Gamma{[b: D1, D2]}`. When the indices differ, `eq` must supply
/// derivations of `a*, b^` and `b*, a^`; absorbed index replacements then
/// cost cuts on the intermediate indices.
pub fn fuse(
    d: &NestedDerivation,
    node_path: &[usize],
    from: usize,
    into: usize,
    eq: Option<(&NestedDerivation, &NestedDerivation)>,
) -> Result<NestedDerivation, NestedError> {
    assert_ne!(from, into);
    let bf = d.conclusion.bracket_at(node_path, from)?.clone();
    let bi = d.conclusion.bracket_at(node_path, into)?.clone();
    if bf.index != bi.index && eq.is_none() {
        return Err(NestedError::Other("fusing unequal indices needs equivalences".into()));
    }
    let fusion = Fusion {
        node_path: node_path.to_vec(),
        from,
        into,
        offset: bf.body.brackets.len(),
    };
    fuse_rec(d, &fusion, &bf.index, &bi.index, eq)
}

fn fuse_rec(
    d: &NestedDerivation,
    fusion: &Fusion,
    theta_from: &Formula,
    theta_into: &Formula,
    eq: Option<(&NestedDerivation, &NestedDerivation)>,
) -> Result<NestedDerivation, NestedError> {
    let conclusion = fusion.apply(&d.conclusion);
    // Rules targeting one of the fused brackets need their equivalence
    // premises rerouted; index replacements of either bracket are absorbed.
    let on_from = |rule: &NestedRule| -> Option<Formula> {
        match rule {
            NestedRule::BoxIn { path, bracket, main } if *path == fusion.node_path && *bracket == fusion.from => {
                Some(match main {
                    Formula::CondBox(a, _) => (**a).clone(),
                    _ => unreachable!(),
                })
            }
            NestedRule::DiamOut { path, bracket, main }
                if *path == fusion.node_path && *bracket == fusion.from =>
            {
                Some(match main {
                    Formula::CondDiam(a, _) => (**a).clone(),
                    _ => unreachable!(),
                })
            }
            _ => None,
        }
    };

    match &d.rule {
        // Index replacement of the `from` bracket: recurse into the premise
        // with the older index and the rule's own equivalences.
        NestedRule::Rep { path, bracket, old_index }
            if *path == fusion.node_path && *bracket == fusion.from =>
        {
            let (e1, e2) = (&d.premises[0], &d.premises[1]);
            // e1: old*, theta_from^; e2: theta_from*, old^
            let new_eq = compose_eq(old_index, theta_from, theta_into, e1, e2, eq)?;
            fuse_rec(&d.premises[2], fusion, old_index, theta_into, Some((&new_eq.0, &new_eq.1)))
        }
        // Index replacement of the `into` bracket: fuse toward the premise
        // index, then replay the replacement on the fused bracket.
        NestedRule::Rep { path, bracket, old_index }
            if *path == fusion.node_path && *bracket == fusion.into =>
        {
            let (e1, e2) = (d.premises[0].clone(), d.premises[1].clone());
            // e1: old*, theta_into^; e2: theta_into*, old^
            let new_eq = compose_eq_into(theta_from, theta_into, old_index, &e1, &e2, eq)?;
            let fused = fuse_rec(
                &d.premises[2],
                fusion,
                theta_from,
                old_index,
                Some((&new_eq.0, &new_eq.1)),
            )?;
            let (p, b) = fusion.adjust_bracket(&fusion.node_path, fusion.into);
            let rule = NestedRule::Rep { path: p, bracket: b, old_index: old_index.clone() };
            Ok(rebuild(conclusion, rule, vec![e1, e2, fused]))
        }
        rule => {
            if let Some(chi) = on_from(rule) {
                // A pairing rule on the `from` bracket: reroute its
                // equivalences to the surviving index.
                let (e1, e2) = (&d.premises[0], &d.premises[1]);
                let (e1n, e2n) = if theta_from == theta_into {
                    (e1.clone(), e2.clone())
                } else {
                    let (q1, q2) = eq.expect("unequal indices carry equivalences");
                    reroute_eq(&chi, theta_from, theta_into, e1, e2, q1, q2)
                };
                let p3 = fuse_rec(&d.premises[2], fusion, theta_from, theta_into, eq)?;
                let rule = fusion.adjust_rule(rule);
                return Ok(rebuild(conclusion, rule, vec![e1n, e2n, p3]));
            }
            match rule {
                NestedRule::Nec => {
                    // Fusion happens strictly below the wrapper.
                    assert!(!fusion.node_path.is_empty());
                    let inner = Fusion {
                        node_path: fusion.node_path[1..].to_vec(),
                        from: fusion.from,
                        into: fusion.into,
                        offset: fusion.offset,
                    };
                    let p = fuse_rec(&d.premises[0], &inner, theta_from, theta_into, eq)?;
                    Ok(rebuild(conclusion, NestedRule::Nec, vec![p]))
                }
                _ => {
                    let ctx = context_premises(rule, d.premises.len());
                    let mut premises = Vec::with_capacity(d.premises.len());
                    for (i, p) in d.premises.iter().enumerate() {
                        if ctx.contains(&i) {
                            premises.push(fuse_rec(p, fusion, theta_from, theta_into, eq)?);
                        } else {
                            premises.push(p.clone());
                        }
                    }
                    Ok(rebuild(conclusion, fusion.adjust_rule(rule), premises))
                }
            }
        }
    }
}

/// Builds a cut node with an explicit conclusion.
pub(crate) fn cut_node(
    conclusion: NestedSequent,
    path: Path,
    formula: Formula,
    left: NestedDerivation,
    right: NestedDerivation,
) -> NestedDerivation {
    rebuild(
        conclusion,
        NestedRule::Cut { path, formula },
        vec![left, right],
    )
}

/// From `zeta <-> theta_from` (two derivations) and, when the indices
/// differ, `theta_from <-> theta_into`, produce `zeta <-> theta_into` by
/// cutting on `theta_from`.
fn compose_eq(
    zeta: &Formula,
    theta_from: &Formula,
    theta_into: &Formula,
    e1: &NestedDerivation, // zeta*, theta_from^
    e2: &NestedDerivation, // theta_from*, zeta^
    eq: Option<(&NestedDerivation, &NestedDerivation)>,
) -> Result<(NestedDerivation, NestedDerivation), NestedError> {
    if theta_from == theta_into {
        return Ok((e1.clone(), e2.clone()));
    }
    let (q1, q2) = eq.expect("unequal indices carry equivalences");
    // zeta*, theta_into^ by cut on theta_from.
    let c1 = {
        let conclusion = pair(zeta, theta_into);
        let left = e1.clone(); // zeta*, theta_from^
        let right = weaken(q1, &[], &only_in(zeta)); // zeta*, theta_from*, theta_into^
        cut_node(conclusion, vec![], theta_from.clone(), left, right)
    };
    // theta_into*, zeta^ by cut on theta_from.
    let c2 = {
        let conclusion = pair(theta_into, zeta);
        let left = q2.clone(); // theta_into*, theta_from^
        let right = weaken(e2, &[], &only_in(theta_into)); // theta_into*, theta_from*, zeta^
        cut_node(conclusion, vec![], theta_from.clone(), left, right)
    };
    Ok((c1, c2))
}

/// Equivalence `theta_from <-> old` from `theta_from <-> theta_into` and
/// the replacement's own `old <-> theta_into`, cutting on `theta_into`.
fn compose_eq_into(
    theta_from: &Formula,
    theta_into: &Formula,
    old: &Formula,
    e1: &NestedDerivation, // old*, theta_into^
    e2: &NestedDerivation, // theta_into*, old^
    eq: Option<(&NestedDerivation, &NestedDerivation)>,
) -> Result<(NestedDerivation, NestedDerivation), NestedError> {
    if theta_from == theta_into {
        // theta_from <-> old is the replacement's own pair, reversed.
        return Ok((e2.clone(), e1.clone()));
    }
    let (q1, q2) = eq.expect("unequal indices carry equivalences");
    // theta_from*, old^ by cut on theta_into.
    let c1 = {
        let conclusion = pair(theta_from, old);
        let left = q1.clone(); // theta_from*, theta_into^
        let right = weaken(e2, &[], &only_in(theta_from)); // theta_from*, theta_into*, old^
        cut_node(conclusion, vec![], theta_into.clone(), left, right)
    };
    // old*, theta_from^ by cut on theta_into.
    let c2 = {
        let conclusion = pair(old, theta_from);
        let left = e1.clone(); // old*, theta_into^
        let right = weaken(q2, &[], &only_in(old)); // old*, theta_into*, theta_from^
        cut_node(conclusion, vec![], theta_into.clone(), left, right)
    };
    Ok((c1, c2))
}

/// Reroutes a pairing rule's equivalences `chi <-> theta_from` to
/// `chi <-> theta_into`, cutting on `theta_from`.
fn reroute_eq(
    chi: &Formula,
    theta_from: &Formula,
    theta_into: &Formula,
    e1: &NestedDerivation, // chi*, theta_from^
    e2: &NestedDerivation, // theta_from*, chi^
    q1: &NestedDerivation, // theta_from*, theta_into^
    q2: &NestedDerivation, // theta_into*, theta_from^
) -> (NestedDerivation, NestedDerivation) {
    let c1 = {
        let conclusion = pair(chi, theta_into);
        let right = weaken(q1, &[], &only_in(chi));
        cut_node(conclusion, vec![], theta_from.clone(), e1.clone(), right)
    };
    let c2 = {
        let conclusion = pair(theta_into, chi);
        let right = weaken(e2, &[], &only_in(theta_into));
        cut_node(conclusion, vec![], theta_from.clone(), q2.clone(), right)
    };
    (c1, c2)
}

fn pair(a: &Formula, b: &Formula) -> NestedSequent {
    NestedSequent::from_parts(
        vec![(a.clone(), Polarity::In), (b.clone(), Polarity::Out)],
        vec![],
    )
}

fn only_in(f: &Formula) -> NestedSequent {
    NestedSequent::from_parts(vec![(f.clone(), Polarity::In)], vec![])
}

// --- generalized init ----------------------------------------------------

/// A cut-free derivation of `base` with `{f*, f^}` added at `path`; `base`
/// must be an input sequent.
pub fn generalized_init(
    base: &NestedSequent,
    path: &[usize],
    f: &Formula,
) -> Result<NestedDerivation, NestedError> {
    if !base.is_input() {
        return Err(NestedError::NotInput);
    }
    let goal = base
        .with_formula(path, f.clone(), Polarity::In)?
        .with_formula(path, f.clone(), Polarity::Out)?;
    Ok(gen_init(goal, path.to_vec(), f))
}

fn gen_init(goal: NestedSequent, path: Path, f: &Formula) -> NestedDerivation {
    match f {
        Formula::Atom(_) => {
            NestedDerivation::leaf(goal, NestedRule::Init { path })
        }
        Formula::Bot => NestedDerivation::leaf(goal, NestedRule::BotIn { path }),
        Formula::And(l, r) => {
            // Split the output, then the input on each side.
            let rule_out = NestedRule::AndOut { path: path.clone(), main: f.clone() };
            let [g_l, g_r]: [NestedSequent; 2] =
                premises_of(&goal, &rule_out).expect("and_out").try_into().ok().unwrap();
            let rule_in = NestedRule::AndIn { path: path.clone(), main: f.clone() };
            let make = |g: NestedSequent, keep: &Formula| {
                let inner = premises_of(&g, &rule_in).expect("and_in").remove(0);
                let sub = gen_init(inner, path.clone(), keep);
                rebuild(g, rule_in.clone(), vec![sub])
            };
            let d_l = make(g_l, l);
            let d_r = make(g_r, r);
            rebuild(goal, rule_out, vec![d_l, d_r])
        }
        Formula::Or(l, r) => {
            let rule_in = NestedRule::OrIn { path: path.clone(), main: f.clone() };
            let [g_l, g_r]: [NestedSequent; 2] =
                premises_of(&goal, &rule_in).expect("or_in").try_into().ok().unwrap();
            let make = |g: NestedSequent, keep: &Formula, rule_out: NestedRule| {
                let inner = premises_of(&g, &rule_out).expect("or_out").remove(0);
                let sub = gen_init(inner, path.clone(), keep);
                rebuild(g, rule_out, vec![sub])
            };
            let d_l = make(g_l, l, NestedRule::OrOut1 { path: path.clone(), main: f.clone() });
            let d_r = make(g_r, r, NestedRule::OrOut2 { path: path.clone(), main: f.clone() });
            rebuild(goal, rule_in, vec![d_l, d_r])
        }
        Formula::Imp(l, r) => {
            let rule_out = NestedRule::ImpOut { path: path.clone(), main: f.clone() };
            let g1 = premises_of(&goal, &rule_out).expect("imp_out").remove(0);
            let rule_in = NestedRule::ImpIn { path: path.clone(), main: f.clone() };
            let ps = premises_of(&g1, &rule_in).expect("imp_in");
            let p0 = gen_init(ps[0].clone(), path.clone(), l);
            let p1 = gen_init(ps[1].clone(), path.clone(), r);
            let mid = rebuild(g1, rule_in, vec![p0, p1]);
            rebuild(goal, rule_out, vec![mid])
        }
        Formula::CondBox(l, r) => {
            let rule_out = NestedRule::BoxOut { path: path.clone(), main: f.clone() };
            let g1 = premises_of(&goal, &rule_out).expect("box_out").remove(0);
            // The fresh bracket was appended at the node.
            let bracket = g1.at(&path).expect("node").brackets.len() - 1;
            let rule_in = NestedRule::BoxIn { path: path.clone(), main: f.clone(), bracket };
            let ps = premises_of(&g1, &rule_in).expect("box_in");
            let e1 = gen_init(ps[0].clone(), vec![], l);
            let e2 = gen_init(ps[1].clone(), vec![], l);
            let mut sub = path.clone();
            sub.push(bracket);
            let p3 = gen_init(ps[2].clone(), sub, r);
            let mid = rebuild(g1, rule_in, vec![e1, e2, p3]);
            rebuild(goal, rule_out, vec![mid])
        }
        Formula::CondDiam(l, r) => {
            let rule_in = NestedRule::DiamIn { path: path.clone(), main: f.clone() };
            let g1 = premises_of(&goal, &rule_in).expect("diam_in").remove(0);
            let bracket = g1.at(&path).expect("node").brackets.len() - 1;
            let rule_out = NestedRule::DiamOut { path: path.clone(), main: f.clone(), bracket };
            let ps = premises_of(&g1, &rule_out).expect("diam_out");
            let e1 = gen_init(ps[0].clone(), vec![], l);
            let e2 = gen_init(ps[1].clone(), vec![], l);
            let mut sub = path.clone();
            sub.push(bracket);
            let p3 = gen_init(ps[2].clone(), sub, r);
            let mid = rebuild(g1, rule_out, vec![e1, e2, p3]);
            rebuild(goal, rule_in, vec![mid])
        }
    }
}

/// The structural rules exposed as one operation.
pub enum StructuralKind {
    Weaken { path: Path, content: NestedSequent },
    Nec { index: Formula },
    Merge { other: NestedDerivation, path: Path, bracket: usize },
    Contract { path: Path, main: Formula },
    Invert { kind: Invertible, path: Path, main: Formula, bracket: Option<usize> },
}

pub fn apply_structural(
    kind: StructuralKind,
    d: &NestedDerivation,
) -> Result<NestedDerivation, NestedError> {
    match kind {
        StructuralKind::Weaken { path, content } => Ok(weaken(d, &path, &content)),
        StructuralKind::Nec { index } => Ok(nec_wrap(d, &index)),
        StructuralKind::Merge { other, path, bracket } => merge(d, &other, &path, bracket),
        StructuralKind::Contract { path, main } => contract(d, &path, &main),
        StructuralKind::Invert { kind, path, main, bracket } => {
            invert(kind, d, &path, &main, bracket)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{and, atom, cond_box, cond_diam, imp, or, parse};
    use crate::nested::{check_nested, prove_nested, NestedBudget, NestedProofResult, RuleSet};

    fn proof_of(text: &str) -> NestedDerivation {
        let goal = NestedSequent::goal(parse(text).unwrap());
        match prove_nested(&goal, NestedBudget::default()).unwrap() {
            NestedProofResult::Proved(d) => d,
            other => panic!("{text}: {}", other.verdict()),
        }
    }

    #[test]
    fn weakening_preserves_height_and_checks() {
        let d = proof_of("p > true");
        let content = NestedSequent::from_parts(vec![(atom("q"), Polarity::In)], vec![]);
        let w = weaken(&d, &[], &content);
        assert_eq!(w.height(), d.height());
        assert_eq!(w.rank(), d.rank());
        assert!(check_nested(&w, RuleSet::Calculus));
        assert!(w
            .conclusion
            .formulas
            .contains(&(atom("q"), Polarity::In)));
    }

    #[test]
    fn necessitation_wraps() {
        let d = proof_of("p -> p");
        let w = nec_wrap(&d, &atom("r"));
        assert!(check_nested(&w, RuleSet::Calculus));
        assert_eq!(w.height(), d.height());
        assert_eq!(w.conclusion.brackets.len(), 1);
        assert_eq!(w.conclusion.brackets[0].index, atom("r"));
    }

    #[test]
    fn inversion_returns_premises() {
        let d = proof_of("p & q -> q & p");
        // Last rule is imp-out; invert it.
        let main = parse("p & q -> q & p").unwrap();
        let inv = invert(Invertible::ImpOut, &d, &[], &main, None).unwrap();
        assert!(check_nested(&inv, RuleSet::Calculus));
        assert!(inv.height() <= d.height());
        assert!(inv
            .conclusion
            .formulas
            .contains(&(parse("p & q").unwrap(), Polarity::In)));
    }

    #[test]
    fn contraction_of_a_duplicated_hypothesis() {
        // Prove (p & q) -> ((p & q) -> q & p) and strip to the sequent with
        // the hypothesis twice, then contract.
        let d = proof_of("p & q -> (p & q -> q & p)");
        let outer = parse("p & q -> (p & q -> q & p)").unwrap();
        let inner = parse("p & q -> q & p").unwrap();
        let d = invert(Invertible::ImpOut, &d, &[], &outer, None).unwrap();
        let d = invert(Invertible::ImpOut, &d, &[], &inner, None).unwrap();
        let pq = parse("p & q").unwrap();
        let c = contract(&d, &[], &pq).unwrap();
        assert!(check_nested(&c, RuleSet::Calculus));
        assert!(c.height() <= d.height());
        let n = c
            .conclusion
            .formulas
            .iter()
            .filter(|(f, p)| *f == pq && *p == Polarity::In)
            .count();
        assert_eq!(n, 1);
    }

    #[test]
    fn contraction_of_conditionals() {
        // might: (p ?> q) twice.
        let d = proof_of("(p ?> q) -> ((p ?> q) -> (p ?> q))");
        let outer = parse("(p ?> q) -> ((p ?> q) -> (p ?> q))").unwrap();
        let inner = parse("(p ?> q) -> (p ?> q)").unwrap();
        let d = invert(Invertible::ImpOut, &d, &[], &outer, None).unwrap();
        let d = invert(Invertible::ImpOut, &d, &[], &inner, None).unwrap();
        let dm = cond_diam(atom("p"), atom("q"));
        let c = contract(&d, &[], &dm).unwrap();
        assert!(check_nested(&c, RuleSet::Calculus), "{c:#?}");
        assert!(c.height() <= d.height());

        let d = proof_of("(p > q) -> ((p > q) -> (p > q))");
        let outer = parse("(p > q) -> ((p > q) -> (p > q))").unwrap();
        let inner = parse("(p > q) -> (p > q)").unwrap();
        let d = invert(Invertible::ImpOut, &d, &[], &outer, None).unwrap();
        let d = invert(Invertible::ImpOut, &d, &[], &inner, None).unwrap();
        let bx = cond_box(atom("p"), atom("q"));
        let c = contract(&d, &[], &bx).unwrap();
        assert!(check_nested(&c, RuleSet::Calculus));
        assert!(c.height() <= d.height());
    }

    #[test]
    fn generalized_init_examples() {
        let empty = NestedSequent::empty();
        for f in [
            atom("p"),
            and(atom("p"), atom("q")),
            or(atom("p"), atom("q")),
            imp(atom("p"), atom("q")),
            cond_box(atom("p"), atom("q")),
            cond_diam(atom("p"), atom("q")),
            cond_box(and(atom("p"), atom("p")), imp(atom("q"), atom("r"))),
        ] {
            let d = generalized_init(&empty, &[], &f).unwrap();
            assert!(check_nested(&d, RuleSet::Calculus), "{f}");
            assert!(!d.uses_cut());
        }
        // Inside a bracket context.
        let base = NestedSequent::from_parts(
            vec![],
            vec![Bracket { index: atom("r"), body: NestedSequent::empty() }],
        );
        let d = generalized_init(&base, &[0], &cond_box(atom("p"), atom("q"))).unwrap();
        assert!(check_nested(&d, RuleSet::Calculus));
    }

    #[test]
    fn merge_is_weakening() {
        // Both premises share the context u*, u^ and hold the bracket
        // bodies q* and p* respectively.
        let with_bracket = |body: NestedSequent| {
            NestedSequent::from_parts(
                vec![],
                vec![Bracket { index: atom("r"), body }],
            )
        };
        let base_q = with_bracket(NestedSequent::from_parts(
            vec![(atom("q"), Polarity::In)],
            vec![],
        ));
        let base_p = with_bracket(NestedSequent::from_parts(
            vec![(atom("p"), Polarity::In)],
            vec![],
        ));
        let d1 = generalized_init(&base_q, &[], &atom("u")).unwrap();
        let d2 = generalized_init(&base_p, &[], &atom("u")).unwrap();
        let merged = merge(&d1, &d2, &[], 0).unwrap();
        assert!(check_nested(&merged, RuleSet::Calculus));
        let body = &merged.conclusion.brackets[0].body;
        assert!(body.formulas.contains(&(atom("q"), Polarity::In)));
        assert!(body.formulas.contains(&(atom("p"), Polarity::In)));
        assert_eq!(merged.height(), d1.height().max(d2.height()));
    }
}
