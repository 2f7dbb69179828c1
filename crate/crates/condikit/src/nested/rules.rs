//! Rule schemas of the nested calculus: premise computation (the single
//! authority used by the checker and the transformations) and backward
//! instance enumeration for proof search.

use crate::formula::{Formula, Polarity};

use super::{Bracket, NestedError, NestedRule, NestedSequent, Path};

fn top_level(a: Formula, pa: Polarity, b: Formula, pb: Polarity) -> NestedSequent {
    NestedSequent::from_parts(vec![(a, pa), (b, pb)], Vec::new())
}

/// The two top-level equivalence premises `phi*, eta^` and `eta*, phi^`.
pub(crate) fn equivalence_premises(phi: &Formula, eta: &Formula) -> [NestedSequent; 2] {
    [
        top_level(phi.clone(), Polarity::In, eta.clone(), Polarity::Out),
        top_level(eta.clone(), Polarity::In, phi.clone(), Polarity::Out),
    ]
}

fn has(conclusion: &NestedSequent, path: &[usize], f: &Formula, pol: Polarity) -> Result<(), NestedError> {
    let node = conclusion.at(path)?;
    if node.formulas.iter().any(|(g, p)| g == f && *p == pol) {
        Ok(())
    } else {
        Err(NestedError::Other(format!("`{f}{pol}` is not at the target node")))
    }
}

/// The premises of applying `rule` to `conclusion`, in schema order.
pub fn premises_of(
    conclusion: &NestedSequent,
    rule: &NestedRule,
) -> Result<Vec<NestedSequent>, NestedError> {
    match rule {
        NestedRule::Init { path } => {
            let node = conclusion.at(path)?;
            let ok = node.formulas.iter().any(|(f, p)| {
                *p == Polarity::Out
                    && matches!(f, Formula::Atom(_))
                    && node.formulas.contains(&(f.clone(), Polarity::In))
            });
            if ok {
                Ok(Vec::new())
            } else {
                Err(NestedError::Other("no matching atom pair at the node".into()))
            }
        }
        NestedRule::BotIn { path } => {
            has(conclusion, path, &Formula::Bot, Polarity::In)?;
            Ok(Vec::new())
        }
        NestedRule::AndIn { path, main } => {
            let (l, r) = binary(main, "and_in", |f| matches!(f, Formula::And(_, _)))?;
            has(conclusion, path, main, Polarity::In)?;
            let p = conclusion
                .without_formula(path, main, Polarity::In)?
                .with_formula(path, l, Polarity::In)?
                .with_formula(path, r, Polarity::In)?;
            Ok(vec![p])
        }
        NestedRule::AndOut { path, main } => {
            let (l, r) = binary(main, "and_out", |f| matches!(f, Formula::And(_, _)))?;
            has(conclusion, path, main, Polarity::Out)?;
            let base = conclusion.without_formula(path, main, Polarity::Out)?;
            Ok(vec![
                base.with_formula(path, l, Polarity::Out)?,
                base.with_formula(path, r, Polarity::Out)?,
            ])
        }
        NestedRule::OrIn { path, main } => {
            let (l, r) = binary(main, "or_in", |f| matches!(f, Formula::Or(_, _)))?;
            has(conclusion, path, main, Polarity::In)?;
            let base = conclusion.without_formula(path, main, Polarity::In)?;
            Ok(vec![
                base.with_formula(path, l, Polarity::In)?,
                base.with_formula(path, r, Polarity::In)?,
            ])
        }
        NestedRule::OrOut1 { path, main } | NestedRule::OrOut2 { path, main } => {
            let (l, r) = binary(main, "or_out", |f| matches!(f, Formula::Or(_, _)))?;
            has(conclusion, path, main, Polarity::Out)?;
            let base = conclusion.without_formula(path, main, Polarity::Out)?;
            let keep = if matches!(rule, NestedRule::OrOut1 { .. }) { l } else { r };
            Ok(vec![base.with_formula(path, keep, Polarity::Out)?])
        }
        NestedRule::ImpIn { path, main } => {
            let (l, r) = binary(main, "imp_in", |f| matches!(f, Formula::Imp(_, _)))?;
            has(conclusion, path, main, Polarity::In)?;
            // First premise: the output formula is removed from the whole
            // sequent and the antecedent becomes the new output at the node;
            // the principal implication is kept.
            let p1 = conclusion.remove_out()?.with_formula(path, l, Polarity::Out)?;
            let p2 = conclusion
                .without_formula(path, main, Polarity::In)?
                .with_formula(path, r, Polarity::In)?;
            Ok(vec![p1, p2])
        }
        NestedRule::ImpOut { path, main } => {
            let (l, r) = binary(main, "imp_out", |f| matches!(f, Formula::Imp(_, _)))?;
            has(conclusion, path, main, Polarity::Out)?;
            let p = conclusion
                .without_formula(path, main, Polarity::Out)?
                .with_formula(path, l, Polarity::In)?
                .with_formula(path, r, Polarity::Out)?;
            Ok(vec![p])
        }
        NestedRule::BoxIn { path, main, bracket } => {
            let (phi, psi) = binary(main, "box_in", |f| matches!(f, Formula::CondBox(_, _)))?;
            has(conclusion, path, main, Polarity::In)?;
            let eta = conclusion.bracket_at(path, *bracket)?.index.clone();
            let [e1, e2] = equivalence_premises(&phi, &eta);
            let p3 = conclusion.into_bracket(path, *bracket, psi, Polarity::In)?;
            Ok(vec![e1, e2, p3])
        }
        NestedRule::BoxOut { path, main } => {
            let (phi, psi) = binary(main, "box_out", |f| matches!(f, Formula::CondBox(_, _)))?;
            has(conclusion, path, main, Polarity::Out)?;
            let base = conclusion.without_formula(path, main, Polarity::Out)?;
            let (p, _) = base.with_bracket(
                path,
                Bracket { index: phi, body: NestedSequent::goal(psi) },
            )?;
            Ok(vec![p])
        }
        NestedRule::DiamIn { path, main } => {
            let (phi, psi) = binary(main, "diam_in", |f| matches!(f, Formula::CondDiam(_, _)))?;
            has(conclusion, path, main, Polarity::In)?;
            let base = conclusion.without_formula(path, main, Polarity::In)?;
            let (p, _) = base.with_bracket(
                path,
                Bracket {
                    index: phi,
                    body: NestedSequent::from_parts(vec![(psi, Polarity::In)], Vec::new()),
                },
            )?;
            Ok(vec![p])
        }
        NestedRule::DiamOut { path, main, bracket } => {
            let (phi, psi) = binary(main, "diam_out", |f| matches!(f, Formula::CondDiam(_, _)))?;
            has(conclusion, path, main, Polarity::Out)?;
            let eta = conclusion.bracket_at(path, *bracket)?.index.clone();
            let [e1, e2] = equivalence_premises(&phi, &eta);
            let p3 = conclusion
                .without_formula(path, main, Polarity::Out)?
                .into_bracket(path, *bracket, psi, Polarity::Out)?;
            Ok(vec![e1, e2, p3])
        }
        NestedRule::W { path, inserted } => {
            if !inserted.is_input() {
                return Err(NestedError::NotInput);
            }
            Ok(vec![conclusion.without_content(path, inserted)?])
        }
        NestedRule::Nec => {
            if !conclusion.formulas.is_empty() || conclusion.brackets.len() != 1 {
                return Err(NestedError::Other(
                    "necessitation conclusion is a single bracket".into(),
                ));
            }
            Ok(vec![conclusion.brackets[0].body.clone()])
        }
        NestedRule::M { path, bracket, split } => {
            let b = conclusion.bracket_at(path, *bracket)?;
            let index = b.index.clone();
            let body = b.body.clone();
            let rest = NestedSequent::empty().with_content(&[], &body)?.without_content(&[], split)?;
            let mut p1 = conclusion.clone();
            p1.at_mut(path)?.brackets[*bracket] = Bracket { index: index.clone(), body: split.clone() };
            let mut p2 = conclusion.clone();
            p2.at_mut(path)?.brackets[*bracket] = Bracket { index, body: rest };
            Ok(vec![p1, p2])
        }
        NestedRule::C { path, main } => {
            has(conclusion, path, main, Polarity::In)?;
            Ok(vec![conclusion.with_formula(path, main.clone(), Polarity::In)?])
        }
        NestedRule::Cut { path, formula } => {
            let p1 = conclusion.remove_out()?.with_formula(path, formula.clone(), Polarity::Out)?;
            let p2 = conclusion.with_formula(path, formula.clone(), Polarity::In)?;
            Ok(vec![p1, p2])
        }
        NestedRule::Rep { path, bracket, old_index } => {
            let eta = conclusion.bracket_at(path, *bracket)?.index.clone();
            let [e1, e2] = equivalence_premises(old_index, &eta);
            let p3 = conclusion.with_index(path, *bracket, old_index.clone())?;
            Ok(vec![e1, e2, p3])
        }
    }
}

fn binary(
    f: &Formula,
    rule: &str,
    check: impl Fn(&Formula) -> bool,
) -> Result<(Formula, Formula), NestedError> {
    if !check(f) {
        return Err(NestedError::Other(format!("`{f}` is not principal for {rule}")));
    }
    match f {
        Formula::And(l, r)
        | Formula::Or(l, r)
        | Formula::Imp(l, r)
        | Formula::CondBox(l, r)
        | Formula::CondDiam(l, r) => Ok(((**l).clone(), (**r).clone())),
        _ => unreachable!(),
    }
}

/// Complete enumeration of the calculus rules applicable to `goal`, over all
/// positions.
pub fn nested_rule_instances(
    goal: &NestedSequent,
) -> Result<Vec<(NestedRule, Vec<NestedSequent>)>, NestedError> {
    if !goal.is_nested() {
        return Err(NestedError::NotNested(goal.out_count()));
    }
    let mut out = Vec::new();
    walk(goal, goal, &mut Vec::new(), &mut out);
    Ok(out)
}

fn walk(
    root: &NestedSequent,
    node: &NestedSequent,
    path: &mut Path,
    out: &mut Vec<(NestedRule, Vec<NestedSequent>)>,
) {
    let mut seen: Vec<(&Formula, Polarity)> = Vec::new();
    for (f, pol) in &node.formulas {
        if seen.contains(&(f, *pol)) {
            continue;
        }
        seen.push((f, *pol));
        let rules: Vec<NestedRule> = match (f, pol) {
            (Formula::Atom(_), Polarity::Out) => vec![NestedRule::Init { path: path.clone() }],
            (Formula::Bot, Polarity::In) => vec![NestedRule::BotIn { path: path.clone() }],
            (Formula::And(_, _), Polarity::In) => {
                vec![NestedRule::AndIn { path: path.clone(), main: f.clone() }]
            }
            (Formula::And(_, _), Polarity::Out) => {
                vec![NestedRule::AndOut { path: path.clone(), main: f.clone() }]
            }
            (Formula::Or(_, _), Polarity::In) => {
                vec![NestedRule::OrIn { path: path.clone(), main: f.clone() }]
            }
            (Formula::Or(_, _), Polarity::Out) => vec![
                NestedRule::OrOut1 { path: path.clone(), main: f.clone() },
                NestedRule::OrOut2 { path: path.clone(), main: f.clone() },
            ],
            (Formula::Imp(_, _), Polarity::In) => {
                vec![NestedRule::ImpIn { path: path.clone(), main: f.clone() }]
            }
            (Formula::Imp(_, _), Polarity::Out) => {
                vec![NestedRule::ImpOut { path: path.clone(), main: f.clone() }]
            }
            (Formula::CondBox(_, _), Polarity::In) => (0..node.brackets.len())
                .map(|b| NestedRule::BoxIn { path: path.clone(), main: f.clone(), bracket: b })
                .collect(),
            (Formula::CondBox(_, _), Polarity::Out) => {
                vec![NestedRule::BoxOut { path: path.clone(), main: f.clone() }]
            }
            (Formula::CondDiam(_, _), Polarity::In) => {
                vec![NestedRule::DiamIn { path: path.clone(), main: f.clone() }]
            }
            (Formula::CondDiam(_, _), Polarity::Out) => (0..node.brackets.len())
                .map(|b| NestedRule::DiamOut { path: path.clone(), main: f.clone(), bracket: b })
                .collect(),
            _ => Vec::new(),
        };
        for rule in rules {
            if let Ok(premises) = premises_of(root, &rule) {
                out.push((rule, premises));
            }
        }
    }
    for (i, b) in node.brackets.iter().enumerate() {
        path.push(i);
        walk(root, &b.body, path, out);
        path.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{atom, cond_box, cond_diam, or};

    #[test]
    fn init_instances() {
        let goal = NestedSequent::from_parts(
            vec![(atom("p"), Polarity::In), (atom("p"), Polarity::Out)],
            vec![],
        );
        let instances = nested_rule_instances(&goal).unwrap();
        assert!(instances
            .iter()
            .any(|(r, ps)| matches!(r, NestedRule::Init { .. }) && ps.is_empty()));
    }

    #[test]
    fn diam_in_creates_a_bracket() {
        // (p ?> q)*, (p ?> (q | r))^ admits the might-left rule producing
        // [p: q*], (p ?> (q | r))^.
        let goal = NestedSequent::from_parts(
            vec![
                (cond_diam(atom("p"), atom("q")), Polarity::In),
                (cond_diam(atom("p"), or(atom("q"), atom("r"))), Polarity::Out),
            ],
            vec![],
        );
        let instances = nested_rule_instances(&goal).unwrap();
        let expected = NestedSequent::from_parts(
            vec![(cond_diam(atom("p"), or(atom("q"), atom("r"))), Polarity::Out)],
            vec![Bracket {
                index: atom("p"),
                body: NestedSequent::from_parts(vec![(atom("q"), Polarity::In)], vec![]),
            }],
        );
        assert!(instances.iter().any(|(r, ps)| matches!(r, NestedRule::DiamIn { .. })
            && ps.len() == 1
            && ps[0].same_multiset(&expected)));
    }

    #[test]
    fn box_in_keeps_principal_and_emits_equivalences() {
        let main = cond_box(atom("p"), atom("q"));
        let goal = NestedSequent::from_parts(
            vec![(main.clone(), Polarity::In)],
            vec![Bracket { index: atom("r"), body: NestedSequent::goal(atom("s")) }],
        );
        let instances = nested_rule_instances(&goal).unwrap();
        let (rule, premises) = instances
            .iter()
            .find(|(r, _)| matches!(r, NestedRule::BoxIn { .. }))
            .unwrap();
        assert_eq!(premises.len(), 3);
        let [e1, e2] = equivalence_premises(&atom("p"), &atom("r"));
        assert!(premises[0].same_multiset(&e1));
        assert!(premises[1].same_multiset(&e2));
        // The principal is kept and the consequent lands in the bracket.
        assert!(premises[2]
            .formulas
            .contains(&(main.clone(), Polarity::In)));
        assert!(premises[2].brackets[0]
            .body
            .formulas
            .contains(&(atom("q"), Polarity::In)));
        let _ = rule;
    }

    #[test]
    fn input_sequents_are_rejected() {
        let input =
            NestedSequent::from_parts(vec![(atom("p"), Polarity::In)], vec![]);
        assert!(nested_rule_instances(&input).is_err());
    }
}
