//! The theorem/non-theorem matrix and property suites behind
//! `condikit conformance` and the acceptance test target.

use std::time::Instant;

use crate::exec;
use crate::formula::{parse, random_formula, Formula};
use crate::hilbert::{check_hilbert_report, compile_to_hilbert, modal_translate, parse_modal};
use crate::nested::{
    check_nested, eliminate_cut_trace, prove_nested, NestedBudget, NestedDerivation,
    NestedProofResult, NestedRule, NestedSequent, RuleSet,
};
use crate::semantics::{
    check_frame, find_countermodel, hereditary_check, random_model, satisfies, valid_in,
    ModelClass, SatProfile,
};
use crate::sequent::{
    admissibility_probe, check_derivation, conservativity_probe, prove, prove_bounded,
    Conservativity, LogicId, ProbeKind, ProofResult, SearchBudget, SeqDerivation, SeqRule,
    Sequent,
};
use crate::Polarity;

#[derive(Debug, Clone)]
pub struct ConformanceRow {
    pub name: String,
    pub pass: bool,
    pub detail: String,
    pub millis: u128,
}

#[derive(Debug, Clone, Default)]
pub struct ConformanceReport {
    pub rows: Vec<ConformanceRow>,
}

impl ConformanceReport {
    pub fn ok(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            out.push_str(&format!(
                "{} {:<58} {:>6} ms  {}\n",
                if r.pass { "PASS" } else { "FAIL" },
                r.name,
                r.millis,
                r.detail
            ));
        }
        let (passed, total) = (self.rows.iter().filter(|r| r.pass).count(), self.rows.len());
        out.push_str(&format!("{passed}/{total} rows passed\n"));
        out
    }
}

type RowFn = Box<dyn Fn() -> Result<String, String> + Send + Sync>;

fn logic_class(logic: LogicId) -> Option<ModelClass> {
    match logic {
        LogicId::ConstCKBox => Some(ModelClass::Weiss),
        LogicId::ConstCK => Some(ModelClass::CCM),
        LogicId::CCKID => Some(ModelClass::CCMID),
        LogicId::CCKMP => Some(ModelClass::CCMMP),
        LogicId::CCKMPID => Some(ModelClass::CCMMPID),
        LogicId::CCKCEM | LogicId::ClassicalCK => None,
    }
}

/// Runs the whole acceptance matrix; rows execute data-parallel.
pub fn conformance_suite(seed: u64) -> ConformanceReport {
    let mut rows: Vec<(String, RowFn)> = Vec::new();

    theorem_matrix_rows(&mut rows);
    non_theorem_rows(&mut rows);
    soundness_rows(&mut rows, seed);
    admissibility_rows(&mut rows, seed);
    cut_elimination_row(&mut rows);
    compile_rows(&mut rows);
    conservativity_row(&mut rows, seed);
    hereditary_rows(&mut rows, seed);
    parser_row(&mut rows, seed);
    nested_soundness_row(&mut rows, seed);
    cross_system_row(&mut rows, seed);
    invertibility_row(&mut rows, seed);
    structural_bounds_row(&mut rows);
    modal_translation_row(&mut rows);

    let results = exec::batch_map(rows, |(name, f)| {
        let started = Instant::now();
        let outcome = f();
        let millis = started.elapsed().as_millis();
        match outcome {
            Ok(detail) => ConformanceRow { name, pass: true, detail, millis },
            Err(detail) => ConformanceRow { name, pass: false, detail, millis },
        }
    });
    ConformanceReport { rows: results }
}

fn push(rows: &mut Vec<(String, RowFn)>, name: impl Into<String>, f: RowFn) {
    rows.push((name.into(), f));
}

fn prove_seq(text: &str, logic: LogicId) -> Result<SeqDerivation, String> {
    let goal = Sequent::goal(parse(text).map_err(|e| e.to_string())?);
    match prove(&goal, logic, SearchBudget::default()).map_err(|e| e.to_string())? {
        ProofResult::Proved(d) => {
            if !check_derivation(&d, logic) {
                return Err(format!("`{text}` proved but the derivation fails the checker"));
            }
            Ok(d)
        }
        other => Err(format!("`{text}` in {logic}: expected proved, got {}", other.verdict())),
    }
}

fn refute_seq(text: &str, logic: LogicId) -> Result<(), String> {
    let goal = Sequent::goal(parse(text).map_err(|e| e.to_string())?);
    match prove(&goal, logic, SearchBudget::default()).map_err(|e| e.to_string())? {
        ProofResult::Refuted => Ok(()),
        other => Err(format!("`{text}` in {logic}: expected refuted, got {}", other.verdict())),
    }
}

fn prove_intck(text: &str) -> Result<NestedDerivation, String> {
    let goal = NestedSequent::goal(parse(text).map_err(|e| e.to_string())?);
    match prove_nested(&goal, NestedBudget::default()).map_err(|e| e.to_string())? {
        NestedProofResult::Proved(d) => {
            if !check_nested(&d, RuleSet::Calculus) {
                return Err(format!("`{text}` proved but the nested checker rejects it"));
            }
            Ok(d)
        }
        other => Err(format!("`{text}` in IntCK: expected proved, got {}", other.verdict())),
    }
}

/// The sequent-system rows of the theorem matrix, used both here and by the
/// compile row.
fn sequent_theorems() -> Vec<(&'static str, &'static str, LogicId)> {
    use LogicId::*;
    vec![
        ("CM-box", "(p > q & r) -> (p > q) & (p > r)", ConstCKBox),
        ("CC-box", "(p > q) & (p > r) -> (p > q & r)", ConstCKBox),
        ("CN-box", "p > true", ConstCKBox),
        ("CM-box", "(p > q & r) -> (p > q) & (p > r)", ConstCK),
        ("CC-box", "(p > q) & (p > r) -> (p > q & r)", ConstCK),
        ("CN-box", "p > true", ConstCK),
        ("CN-might", "~(p ?> false)", ConstCK),
        ("CK-might", "(p > (q -> r)) -> ((p ?> q) -> (p ?> r))", ConstCK),
        ("CW", "(p ?> q) & (p > r) -> (p ?> q & r)", ConstCK),
        ("ID-box", "p > p", CCKID),
        ("MP-box", "(p > q) -> (p -> q)", CCKMP),
        ("MP-might", "p & q -> (p ?> q)", CCKMP),
        ("ID-box", "p > p", CCKMPID),
        ("MP-box", "(p > q) -> (p -> q)", CCKMPID),
        ("CEM-might", "(p ?> q) & (p ?> r) -> (p ?> q & r)", CCKCEM),
        ("def-might-fwd", "(p ?> q) -> ~(p > ~q)", ClassicalCK),
        ("def-might-bwd", "~(p > ~q) -> (p ?> q)", ClassicalCK),
        ("def-might", "(p ?> q) <-> ~(p > ~q)", ClassicalCK),
    ]
}

fn intck_theorems() -> Vec<(&'static str, &'static str)> {
    vec![
        ("CM-box", "(p > q & r) -> (p > q) & (p > r)"),
        ("CC-box", "(p > q) & (p > r) -> (p > q & r)"),
        ("CN-box", "p > true"),
        ("CM-might", "(p ?> q) | (p ?> r) -> (p ?> (q | r))"),
        ("CC-might", "(p ?> (q | r)) -> (p ?> q) | (p ?> r)"),
        ("CN-might", "~(p ?> false)"),
        ("CW", "(p ?> q) & (p > r) -> (p ?> q & r)"),
        ("CFS", "((p ?> q) -> (p > r)) -> (p > (q -> r))"),
    ]
}

fn theorem_matrix_rows(rows: &mut Vec<(String, RowFn)>) {
    for (name, text, logic) in sequent_theorems() {
        push(
            rows,
            format!("theorem: {name} in {logic}"),
            Box::new(move || prove_seq(text, logic).map(|d| format!("height {}", d.height()))),
        );
    }
    for (name, text) in intck_theorems() {
        push(
            rows,
            format!("theorem: {name} in N.IntCK"),
            Box::new(move || prove_intck(text).map(|d| format!("height {}", d.height()))),
        );
    }
}

fn non_theorem_rows(rows: &mut Vec<(String, RowFn)>) {
    push(
        rows,
        "non-theorem: double negation of a box, box calculus vs nested",
        Box::new(|| {
            refute_seq("~~(true > false) -> (true > false)", LogicId::ConstCKBox)?;
            prove_intck("~~(true > false) -> (true > false)")?;
            Ok("refuted in the box calculus, proved in the nested one".into())
        }),
    );
    push(
        rows,
        "non-theorem: excluded middle with a two-world countermodel",
        Box::new(|| {
            refute_seq("p | ~p", LogicId::ConstCK)?;
            let f = parse("p | ~p").unwrap();
            let (m, w) = find_countermodel(&f, ModelClass::CCM, SatProfile::ccm(), 2)
                .ok_or("no countermodel at two worlds")?;
            if satisfies(&m, w, &f, SatProfile::ccm()).map_err(|e| e.to_string())? {
                return Err("countermodel does not falsify the formula".into());
            }
            check_frame(&m, ModelClass::CCM).map_err(|e| e.to_string())?;
            Ok(format!("countermodel on {} world(s) at world {w}", m.world_count()))
        }),
    );
    push(
        rows,
        "non-theorem: classical might definition fails constructively",
        Box::new(|| {
            refute_seq("~(p > ~q) -> (p ?> q)", LogicId::ConstCK)?;
            let f = parse("~(p > ~q) -> (p ?> q)").unwrap();
            let (m, w) = find_countermodel(&f, ModelClass::CCM, SatProfile::ccm(), 4)
                .ok_or("no countermodel within four worlds")?;
            if satisfies(&m, w, &f, SatProfile::ccm()).map_err(|e| e.to_string())? {
                return Err("countermodel does not falsify the formula".into());
            }
            check_frame(&m, ModelClass::CCM).map_err(|e| e.to_string())?;
            Ok(format!("countermodel on {} world(s)", m.world_count()))
        }),
    );
    push(
        rows,
        "non-theorem: conditional identity needs the id frame condition",
        Box::new(|| {
            refute_seq("p > p", LogicId::ConstCK)?;
            let f = parse("p > p").unwrap();
            let (m, w) = find_countermodel(&f, ModelClass::CCM, SatProfile::ccm(), 2)
                .ok_or("no ccm countermodel")?;
            if satisfies(&m, w, &f, SatProfile::ccm()).map_err(|e| e.to_string())? {
                return Err("countermodel does not falsify the formula".into());
            }
            if check_frame(&m, ModelClass::CCMID).is_ok() {
                return Err("countermodel unexpectedly satisfies the id condition".into());
            }
            for s in 0..200u64 {
                let idm = random_model(ModelClass::CCMID, 4, s);
                if !valid_in(&idm, &f, SatProfile::ccm()).map_err(|e| e.to_string())? {
                    return Err(format!("p > p fails on an id model (seed {s})"));
                }
            }
            Ok("countermodel violates (id); valid on 200 id models".into())
        }),
    );
}

fn soundness_rows(rows: &mut Vec<(String, RowFn)>, seed: u64) {
    for logic in [
        LogicId::ConstCKBox,
        LogicId::ConstCK,
        LogicId::CCKID,
        LogicId::CCKMP,
        LogicId::CCKMPID,
    ] {
        let class = logic_class(logic).unwrap();
        push(
            rows,
            format!("soundness: 500 formulas x 100 {class} models for {logic}"),
            Box::new(move || {
                let profile = class.profile();
                let mut proved = 0usize;
                for i in 0..500u64 {
                    let f = random_formula(4, 3, !logic.diamond_free_language(), seed ^ (i * 977));
                    let goal = Sequent::goal(f.clone());
                    let res = prove(&goal, logic, SearchBudget::default())
                        .map_err(|e| e.to_string())?;
                    if let ProofResult::Proved(_) = res {
                        proved += 1;
                        for m in 0..100u64 {
                            let model = random_model(class, 4, seed ^ (m * 7919 + 13));
                            if !valid_in(&model, &f, profile).map_err(|e| e.to_string())? {
                                return Err(format!(
                                    "proved `{f}` is falsified on a {class} model (seed {})",
                                    seed ^ (m * 7919 + 13)
                                ));
                            }
                        }
                    }
                }
                Ok(format!("{proved}/500 proved, all valid"))
            }),
        );
    }
}

fn admissibility_rows(rows: &mut Vec<(String, RowFn)>, seed: u64) {
    for logic in LogicId::ALL {
        for kind in [ProbeKind::Weakening, ProbeKind::Contraction, ProbeKind::Cut] {
            push(
                rows,
                format!("admissibility: {} over 50 trials in {logic}", kind.name()),
                Box::new(move || {
                    let report = admissibility_probe(kind, logic, 50, seed);
                    if report.trials < 50 {
                        return Err(format!(
                            "only {} provable premises synthesized in {} attempts",
                            report.trials, report.attempts
                        ));
                    }
                    if !report.counterexamples.is_empty() {
                        return Err(format!("counterexamples: {:?}", report.counterexamples));
                    }
                    if !report.height_violations.is_empty() {
                        return Err(format!(
                            "height not preserved: {:?}",
                            report.height_violations
                        ));
                    }
                    Ok(format!(
                        "50 trials, 0 counterexamples, {} inconclusive",
                        report.inconclusive
                    ))
                }),
            );
        }
    }
}

/// Triples `(delta, xi, chi)` with `delta |- xi` and `delta, xi |- chi`;
/// each gives a cut-bearing derivation of `delta*, chi^`.
fn cut_triples() -> Vec<(&'static str, &'static str, &'static str)> {
    vec![
        ("p & q", "q & p", "q | s"),
        ("p & q", "p", "p | r"),
        ("p", "p | q", "q | p"),
        ("p & (p -> q)", "q", "q | r"),
        ("p & (p -> q)", "p & q", "q & p"),
        ("p & q & r", "q & r", "r"),
        ("p -> q", "(p -> q) & (p -> q)", "p -> q"),
        ("p > (q & r)", "p > q", "(p > q) | s"),
        ("(p & p) > q", "p > q", "(p > q) & (p > q)"),
        ("p ?> (q & r)", "p ?> q", "(p ?> q) | s"),
        ("(p & p) ?> q", "p ?> q", "p ?> q"),
        ("p & ~p", "false", "s"),
    ]
}

fn build_cut_corpus() -> Result<Vec<NestedDerivation>, String> {
    let mut corpus = Vec::new();
    let budget = NestedBudget::default();
    for (delta, xi, chi) in cut_triples() {
        let delta = parse(delta).unwrap();
        let xi = parse(xi).unwrap();
        let chi = parse(chi).unwrap();
        for bracketed in [false, true] {
            let make = |formulas: Vec<(Formula, Polarity)>| {
                if bracketed {
                    NestedSequent::from_parts(
                        vec![],
                        vec![crate::nested::Bracket {
                            index: parse("t").unwrap(),
                            body: NestedSequent::from_parts(formulas, vec![]),
                        }],
                    )
                } else {
                    NestedSequent::from_parts(formulas, vec![])
                }
            };
            let path: Vec<usize> = if bracketed { vec![0] } else { vec![] };
            let conclusion = make(vec![
                (delta.clone(), Polarity::In),
                (chi.clone(), Polarity::Out),
            ]);
            let left_goal = make(vec![(delta.clone(), Polarity::In), (xi.clone(), Polarity::Out)]);
            let right_goal = conclusion
                .with_formula(&path, xi.clone(), Polarity::In)
                .unwrap();
            let d1 = match prove_nested(&left_goal, budget).map_err(|e| e.to_string())? {
                NestedProofResult::Proved(d) => d,
                other => return Err(format!("`{left_goal}`: {}", other.verdict())),
            };
            let d2 = match prove_nested(&right_goal, budget).map_err(|e| e.to_string())? {
                NestedProofResult::Proved(d) => d,
                other => return Err(format!("`{right_goal}`: {}", other.verdict())),
            };
            corpus.push(NestedDerivation {
                conclusion,
                rule: NestedRule::Cut { path, formula: xi.clone() },
                premises: vec![d1, d2],
            });
        }
    }
    // The box-principal instance with an equivalent-but-unequal bracket
    // index, so the reduction exercises index replacement.
    {
        let xi = parse("p > q").unwrap();
        let conclusion = NestedSequent::from_parts(
            vec![(xi.clone(), Polarity::In)],
            vec![crate::nested::Bracket {
                index: parse("p & p").unwrap(),
                body: NestedSequent::from_parts(
                    vec![
                        (parse("q -> r").unwrap(), Polarity::In),
                        (parse("r").unwrap(), Polarity::Out),
                    ],
                    vec![],
                ),
            }],
        );
        let left_goal = conclusion
            .remove_out()
            .unwrap()
            .with_formula(&[], xi.clone(), Polarity::Out)
            .unwrap();
        let right_goal = conclusion.with_formula(&[], xi.clone(), Polarity::In).unwrap();
        let d1 = match prove_nested(&left_goal, budget).map_err(|e| e.to_string())? {
            NestedProofResult::Proved(d) => d,
            other => return Err(format!("principal instance left: {}", other.verdict())),
        };
        let d2 = match prove_nested(&right_goal, budget).map_err(|e| e.to_string())? {
            NestedProofResult::Proved(d) => d,
            other => return Err(format!("principal instance right: {}", other.verdict())),
        };
        if !matches!(d1.rule, NestedRule::BoxOut { .. }) || !matches!(d2.rule, NestedRule::BoxIn { .. })
        {
            return Err("principal instance did not end in the box rules".into());
        }
        corpus.push(NestedDerivation {
            conclusion,
            rule: NestedRule::Cut { path: vec![], formula: xi },
            premises: vec![d1, d2],
        });
    }
    Ok(corpus)
}

fn cut_elimination_row(rows: &mut Vec<(String, RowFn)>) {
    push(
        rows,
        "cut elimination: corpus of composed cut-bearing derivations",
        Box::new(|| {
            let corpus = build_cut_corpus()?;
            if corpus.len() < 20 {
                return Err(format!("corpus too small: {}", corpus.len()));
            }
            for d in &corpus {
                if !check_nested(d, RuleSet::WithCut) {
                    return Err(format!("composed input fails the checker: `{}`", d.conclusion));
                }
                let (out, ranks) = eliminate_cut_trace(d).map_err(|e| e.to_string())?;
                if !check_nested(&out, RuleSet::Calculus) {
                    return Err(format!("output fails the checker for `{}`", d.conclusion));
                }
                if !out.conclusion.same_multiset(&d.conclusion) {
                    return Err(format!("conclusion changed for `{}`", d.conclusion));
                }
                if out.uses_cut() || out.uses_rep() || out.uses_structural() {
                    return Err("output is not cut- and rep-free".into());
                }
                if !ranks.windows(2).all(|w| w[1] <= w[0]) || *ranks.last().unwrap() != 0 {
                    return Err(format!("rank trace {ranks:?} is not non-increasing to zero"));
                }
            }
            Ok(format!("{} derivations reduced, rank traces non-increasing", corpus.len()))
        }),
    );
}

fn compile_rows(rows: &mut Vec<(String, RowFn)>) {
    push(
        rows,
        "syntactic equivalence: theorem matrix compiles to checked Hilbert proofs",
        Box::new(|| {
            let mut count = 0;
            for (name, text, logic) in sequent_theorems() {
                let d = prove_seq(text, logic)?;
                let proof = compile_to_hilbert(&d, logic)
                    .map_err(|e| format!("{name} in {logic}: {e}"))?;
                check_hilbert_report(&proof, logic.into())
                    .map_err(|e| format!("{name} in {logic}: {e}"))?;
                if proof.conclusion() != Some(&d.conclusion.interpretation()) {
                    return Err(format!("{name} in {logic}: conclusion mismatch"));
                }
                count += 1;
            }
            Ok(format!("{count} derivations compiled and checked"))
        }),
    );
}

fn conservativity_row(rows: &mut Vec<(String, RowFn)>, seed: u64) {
    push(
        rows,
        "conservativity: 300 might-free formulas agree across the two calculi",
        Box::new(move || {
            let total = 300u64;
            let mut conclusive = 0usize;
            for i in 0..total {
                let f = random_formula(4, 3, false, seed ^ (i * 31337 + 7));
                match conservativity_probe(&f, SearchBudget::default()).map_err(|e| e.to_string())? {
                    Conservativity::Agree { .. } => conclusive += 1,
                    Conservativity::Disagree => {
                        return Err(format!("verdicts disagree on `{f}`"));
                    }
                    Conservativity::Inconclusive => {}
                }
            }
            let ratio = conclusive as f64 / total as f64;
            if ratio < 0.9 {
                return Err(format!("only {conclusive}/{total} conclusive"));
            }
            Ok(format!("{conclusive}/{total} conclusive, no disagreement"))
        }),
    );
}

fn hereditary_rows(rows: &mut Vec<(String, RowFn)>, seed: u64) {
    for class in ModelClass::ALL {
        push(
            rows,
            format!("hereditary: 200 random model/formula pairs in class {class}"),
            Box::new(move || {
                let profile = class.profile();
                let diamond = profile.diam_clause.is_some();
                for i in 0..200u64 {
                    let m = random_model(class, 4, seed ^ (i * 104729));
                    let f = random_formula(4, 3, diamond, seed ^ (i * 104729 + 1));
                    if !hereditary_check(&m, profile, &f).map_err(|e| e.to_string())? {
                        return Err(format!("`{f}` is not persistent on a {class} model"));
                    }
                }
                Ok("200 pairs persistent".into())
            }),
        );
    }
}

fn parser_row(rows: &mut Vec<(String, RowFn)>, seed: u64) {
    push(
        rows,
        "parser: 1000 random formulas round-trip print/parse exactly",
        Box::new(move || {
            for i in 0..1000u64 {
                let f = random_formula(6, 4, true, seed ^ (i * 65537));
                let printed = f.to_string();
                let back = parse(&printed).map_err(|e| format!("`{printed}`: {e}"))?;
                if back != f {
                    return Err(format!("round trip changed `{printed}`"));
                }
            }
            Ok("1000 round trips exact".into())
        }),
    );
}

fn nested_soundness_row(rows: &mut Vec<(String, RowFn)>, seed: u64) {
    push(
        rows,
        "soundness: nested prover against 100 Olkhovikov models",
        Box::new(move || {
            let profile = SatProfile::olkhovikov();
            let mut proved = 0usize;
            for i in 0..200u64 {
                let f = random_formula(4, 3, true, seed ^ (i * 613));
                let goal = NestedSequent::goal(f.clone());
                if let NestedProofResult::Proved(d) =
                    prove_nested(&goal, NestedBudget::default()).map_err(|e| e.to_string())?
                {
                    proved += 1;
                    let interpretation = d.conclusion.interpret();
                    for m in 0..100u64 {
                        let model = random_model(ModelClass::Olkhovikov, 4, seed ^ (m * 31 + 5));
                        if !valid_in(&model, &interpretation, profile).map_err(|e| e.to_string())? {
                            return Err(format!("proved `{f}` fails on an Olkhovikov model"));
                        }
                    }
                }
            }
            Ok(format!("{proved}/200 proved, all interpretations valid"))
        }),
    );
}

fn cross_system_row(rows: &mut Vec<(String, RowFn)>, seed: u64) {
    push(
        rows,
        "cross-system: box-calculus theorems are nested-calculus theorems",
        Box::new(move || {
            let mut carried = 0usize;
            for i in 0..200u64 {
                let f = random_formula(4, 3, false, seed ^ (i * 409));
                let goal = Sequent::goal(f.clone());
                if let ProofResult::Proved(_) =
                    prove(&goal, LogicId::ConstCKBox, SearchBudget::default())
                        .map_err(|e| e.to_string())?
                {
                    carried += 1;
                    let nested_goal = NestedSequent::goal(f.clone());
                    match prove_nested(&nested_goal, NestedBudget::default())
                        .map_err(|e| e.to_string())?
                    {
                        NestedProofResult::Proved(_) => {}
                        other => {
                            return Err(format!(
                                "`{f}` proved in the box calculus but {} in the nested one",
                                other.verdict()
                            ))
                        }
                    }
                }
            }
            Ok(format!("{carried} theorems carried over"))
        }),
    );
}

fn invertibility_row(rows: &mut Vec<(String, RowFn)>, seed: u64) {
    push(
        rows,
        "invertibility: height-preserving premises for the invertible rules",
        Box::new(move || {
            let mut checked = 0usize;
            for i in 0..300u64 {
                let f = random_formula(3, 2, true, seed ^ (i * 1201));
                let goal = Sequent::goal(f);
                let Ok(ProofResult::Proved(d)) = prove(&goal, LogicId::ConstCK, SearchBudget::default())
                else {
                    continue;
                };
                let h = d.height();
                for (rule, premises) in
                    crate::sequent::rule_instances(&goal, LogicId::ConstCK).map_err(|e| e.to_string())?
                {
                    let listed = matches!(
                        rule,
                        SeqRule::AndL | SeqRule::AndR | SeqRule::OrL | SeqRule::ImpR
                    );
                    for (k, premise) in premises.iter().enumerate() {
                        let check = listed || (rule == SeqRule::ImpL && k == 1);
                        if !check {
                            continue;
                        }
                        checked += 1;
                        let capped = SearchBudget::new(h, SearchBudget::default().nodes);
                        match prove_bounded(premise, LogicId::ConstCK, capped, true)
                            .map_err(|e| e.to_string())?
                        {
                            ProofResult::Proved(_) => {}
                            _ => {
                                return Err(format!(
                                    "premise `{premise}` of {} not provable within height {h}",
                                    rule.name()
                                ))
                            }
                        }
                    }
                }
            }
            Ok(format!("{checked} premises within height"))
        }),
    );
}

fn structural_bounds_row(rows: &mut Vec<(String, RowFn)>) {
    push(
        rows,
        "structural rules: height and rank preserved on a derivation corpus",
        Box::new(|| {
            use crate::nested::structural::{self, Invertible};
            let corpus = build_cut_corpus()?;
            let mut checked = 0usize;
            for d in corpus.iter().take(8) {
                let (h, r) = (d.height(), d.rank());
                let content = NestedSequent::from_parts(
                    vec![(parse("u").unwrap(), Polarity::In)],
                    vec![],
                );
                let w = structural::weaken(d, &[], &content);
                if w.height() > h || w.rank() > r || !check_nested(&w, RuleSet::WithCut) {
                    return Err("weakening bound violated".into());
                }
                let n = structural::nec_wrap(d, &parse("v").unwrap());
                if n.height() > h || n.rank() > r || !check_nested(&n, RuleSet::WithCut) {
                    return Err("necessitation bound violated".into());
                }
                checked += 2;
            }
            // Inversion bounds on proofs of the nested theorems.
            for (_, text) in intck_theorems() {
                let d = prove_intck(text)?;
                let main = parse(text).unwrap();
                let inv = structural::invert(Invertible::ImpOut, &d, &[], &main, None)
                    .map_err(|e| e.to_string())?;
                if inv.height() > d.height() || inv.rank() > d.rank() {
                    return Err(format!("inversion bound violated on `{text}`"));
                }
                if !check_nested(&inv, RuleSet::Calculus) {
                    return Err(format!("inverted derivation fails the checker on `{text}`"));
                }
                checked += 1;
            }
            Ok(format!("{checked} transformations within bounds"))
        }),
    );
}

fn modal_translation_row(rows: &mut Vec<(String, RowFn)>) {
    push(
        rows,
        "modal embedding: translated K-style axioms are provable",
        Box::new(|| {
            for text in [
                "[](p -> q) -> ([]p -> []q)",
                "[](p -> q) -> (<>p -> <>q)",
                "~<>false",
            ] {
                let modal = parse_modal(text).map_err(|e| e.to_string())?;
                let f = modal_translate(&modal);
                let goal = Sequent::goal(f.clone());
                match prove(&goal, LogicId::ConstCK, SearchBudget::default())
                    .map_err(|e| e.to_string())?
                {
                    ProofResult::Proved(_) => {}
                    other => {
                        return Err(format!("tau image `{f}`: {}", other.verdict()));
                    }
                }
            }
            Ok("three translated axioms proved".into())
        }),
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_lists_cover_the_required_rows() {
        let seq = sequent_theorems();
        assert!(seq.iter().any(|(n, _, l)| *n == "CW" && *l == LogicId::ConstCK));
        assert!(seq.iter().any(|(n, _, l)| *n == "def-might" && *l == LogicId::ClassicalCK));
        assert_eq!(intck_theorems().len(), 8);
        assert!(cut_triples().len() * 2 + 1 >= 20);
    }
}
