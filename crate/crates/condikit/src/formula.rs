//! Formula AST, concrete syntax and syntactic measures.
//!
//! The language has atoms, `false`, conjunction, disjunction, intuitionistic
//! implication and the two conditional modalities: the *would* conditional
//! (written `>`) and the *might* conditional (written `?>`). Negation, `true`
//! and `<->` are surface sugar and are expanded by the parser:
//! `~f == f -> false`, `true == ~false`, `a <-> b == (a -> b) & (b -> a)`.

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Input (`*`, antecedent) or output (`^`, succedent) occurrence of a formula
/// inside a nested sequent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    In,
    Out,
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polarity::In => write!(f, "*"),
            Polarity::Out => write!(f, "^"),
        }
    }
}

// Formulas serialize as their concrete syntax.
impl serde::Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_string().serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for Formula {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        parse(&String::deserialize(d)?).map_err(D::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(String),
    Bot,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    /// The *would* conditional, `antecedent > consequent`.
    CondBox(Box<Formula>, Box<Formula>),
    /// The *might* conditional, `antecedent ?> consequent`.
    CondDiam(Box<Formula>, Box<Formula>),
}

pub use Formula::Bot;

pub fn atom(name: &str) -> Formula {
    Formula::Atom(name.to_owned())
}

pub fn and(l: Formula, r: Formula) -> Formula {
    Formula::And(Box::new(l), Box::new(r))
}

pub fn or(l: Formula, r: Formula) -> Formula {
    Formula::Or(Box::new(l), Box::new(r))
}

pub fn imp(l: Formula, r: Formula) -> Formula {
    Formula::Imp(Box::new(l), Box::new(r))
}

pub fn cond_box(l: Formula, r: Formula) -> Formula {
    Formula::CondBox(Box::new(l), Box::new(r))
}

pub fn cond_diam(l: Formula, r: Formula) -> Formula {
    Formula::CondDiam(Box::new(l), Box::new(r))
}

pub fn neg(f: Formula) -> Formula {
    imp(f, Formula::Bot)
}

pub fn top() -> Formula {
    neg(Formula::Bot)
}

pub fn iff(l: Formula, r: Formula) -> Formula {
    and(imp(l.clone(), r.clone()), imp(r, l))
}

impl Formula {
    /// Number of binary connectives in the formula.
    pub fn weight(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Bot => 0,
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Imp(l, r)
            | Formula::CondBox(l, r)
            | Formula::CondDiam(l, r) => 1 + l.weight() + r.weight(),
        }
    }

    /// True iff no might conditional occurs anywhere in the formula.
    pub fn is_diamond_free(&self) -> bool {
        match self {
            Formula::Atom(_) | Formula::Bot => true,
            Formula::CondDiam(_, _) => false,
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) | Formula::CondBox(l, r) => {
                l.is_diamond_free() && r.is_diamond_free()
            }
        }
    }

    /// Maximal nesting depth of conditional operators.
    pub fn conditional_depth(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Bot => 0,
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                l.conditional_depth().max(r.conditional_depth())
            }
            Formula::CondBox(l, r) | Formula::CondDiam(l, r) => {
                1 + l.conditional_depth().max(r.conditional_depth())
            }
        }
    }

    /// Atom names occurring in the formula, in first-occurrence order.
    pub fn atoms(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut Vec<String>) {
        match self {
            Formula::Atom(a) => {
                if !out.iter().any(|x| x == a) {
                    out.push(a.clone());
                }
            }
            Formula::Bot => {}
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Imp(l, r)
            | Formula::CondBox(l, r)
            | Formula::CondDiam(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    /// Antecedents of all conditional subformulas, outermost first, deduplicated.
    pub fn conditional_antecedents(&self) -> Vec<Formula> {
        let mut out = Vec::new();
        self.collect_antecedents(&mut out);
        out
    }

    fn collect_antecedents(&self, out: &mut Vec<Formula>) {
        match self {
            Formula::Atom(_) | Formula::Bot => {}
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                l.collect_antecedents(out);
                r.collect_antecedents(out);
            }
            Formula::CondBox(l, r) | Formula::CondDiam(l, r) => {
                if !out.contains(l) {
                    out.push((**l).clone());
                }
                l.collect_antecedents(out);
                r.collect_antecedents(out);
            }
        }
    }
}

// Precedence levels used by the printer: arrows 0, `|` 1, `&` 2, `~` 3, leaf 4.
fn print_prec(f: &Formula, prec: u8, out: &mut String) {
    let level = match f {
        Formula::Atom(_) | Formula::Bot => 4,
        Formula::Imp(l, r) if **r == Formula::Bot && **l == Formula::Bot => 4, // `true`
        Formula::Imp(_, r) if **r == Formula::Bot => 3,                       // `~f`
        Formula::And(_, _) => 2,
        Formula::Or(_, _) => 1,
        Formula::Imp(_, _) | Formula::CondBox(_, _) | Formula::CondDiam(_, _) => 0,
    };
    let parens = level < prec;
    if parens {
        out.push('(');
    }
    match f {
        Formula::Atom(a) => out.push_str(a),
        Formula::Bot => out.push_str("false"),
        Formula::Imp(l, r) if **r == Formula::Bot && **l == Formula::Bot => out.push_str("true"),
        Formula::Imp(l, r) if **r == Formula::Bot => {
            out.push('~');
            print_prec(l, 4, out);
        }
        Formula::And(l, r) => {
            print_prec(l, 2, out);
            out.push_str(" & ");
            print_prec(r, 3, out);
        }
        Formula::Or(l, r) => {
            print_prec(l, 1, out);
            out.push_str(" | ");
            print_prec(r, 2, out);
        }
        Formula::Imp(l, r) => {
            print_prec(l, 1, out);
            out.push_str(" -> ");
            print_prec(r, 0, out);
        }
        Formula::CondBox(l, r) => {
            print_prec(l, 1, out);
            out.push_str(" > ");
            print_prec(r, 1, out);
        }
        Formula::CondDiam(l, r) => {
            print_prec(l, 1, out);
            out.push_str(" ?> ");
            print_prec(r, 1, out);
        }
    }
    if parens {
        out.push(')');
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        print_prec(self, 0, &mut s);
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Atom(String),
    False,
    True,
    Not,
    And,
    Or,
    Imp,
    WouldBox,
    MightDiam,
    Iff,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '(' => {
                toks.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                toks.push((i, Tok::RParen));
                i += 1;
            }
            '~' => {
                toks.push((i, Tok::Not));
                i += 1;
            }
            '&' => {
                toks.push((i, Tok::And));
                i += 1;
            }
            '|' => {
                toks.push((i, Tok::Or));
                i += 1;
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((i, Tok::Imp));
                    i += 2;
                } else {
                    return Err(ParseError { pos: i, msg: "expected `->`".into() });
                }
            }
            '<' => {
                if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') {
                    toks.push((i, Tok::Iff));
                    i += 3;
                } else {
                    return Err(ParseError { pos: i, msg: "expected `<->`".into() });
                }
            }
            '?' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((i, Tok::MightDiam));
                    i += 2;
                } else {
                    return Err(ParseError { pos: i, msg: "expected `?>`".into() });
                }
            }
            '>' => {
                toks.push((i, Tok::WouldBox));
                i += 1;
            }
            'a'..='z' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let word = &text[start..i];
                match word {
                    "false" => toks.push((start, Tok::False)),
                    "true" => toks.push((start, Tok::True)),
                    _ => toks.push((start, Tok::Atom(word.to_owned()))),
                }
            }
            _ => {
                return Err(ParseError { pos: i, msg: format!("unknown token `{c}`") });
            }
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn err(&self, msg: &str) -> ParseError {
        ParseError { pos: self.here(), msg: msg.to_owned() }
    }

    // arrow level: `->` right-associative; `>`, `?>`, `<->` non-associative
    fn arrow(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disj()?;
        match self.peek() {
            Some(Tok::Imp) => {
                self.bump();
                let rhs = self.arrow()?;
                Ok(imp(lhs, rhs))
            }
            Some(Tok::WouldBox) => {
                self.bump();
                let rhs = self.disj()?;
                self.no_more_arrows("`>`")?;
                Ok(cond_box(lhs, rhs))
            }
            Some(Tok::MightDiam) => {
                self.bump();
                let rhs = self.disj()?;
                self.no_more_arrows("`?>`")?;
                Ok(cond_diam(lhs, rhs))
            }
            Some(Tok::Iff) => {
                self.bump();
                let rhs = self.disj()?;
                self.no_more_arrows("`<->`")?;
                Ok(iff(lhs, rhs))
            }
            _ => Ok(lhs),
        }
    }

    fn no_more_arrows(&self, op: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Imp | Tok::WouldBox | Tok::MightDiam | Tok::Iff) => Err(self.err(&format!(
                "{op} is non-associative; parenthesize the nested conditional"
            ))),
            _ => Ok(()),
        }
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conj()?;
        while self.peek() == Some(&Tok::Or) {
            self.bump();
            let rhs = self.conj()?;
            lhs = or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.bump();
            let rhs = self.unary()?;
            lhs = and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Not) => {
                self.bump();
                Ok(neg(self.unary()?))
            }
            _ => self.leaf(),
        }
    }

    fn leaf(&mut self) -> Result<Formula, ParseError> {
        match self.bump() {
            Some(Tok::Atom(a)) => Ok(Formula::Atom(a)),
            Some(Tok::False) => Ok(Formula::Bot),
            Some(Tok::True) => Ok(top()),
            Some(Tok::LParen) => {
                let f = self.arrow()?;
                if self.bump() != Some(Tok::RParen) {
                    self.pos -= 1;
                    return Err(self.err("expected `)`"));
                }
                Ok(f)
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.err("expected a formula"))
            }
        }
    }
}

/// Parse a formula in the concrete grammar.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, end: text.len() };
    let f = p.arrow()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(f)
}

/// Seed-deterministic random formula of weight at most `max_weight`.
///
/// `atoms` must be at least 1; atoms are named `p`, `q`, `r`, `s`, `t`, `u`,
/// then `a6`, `a7`, ...
pub fn random_formula(max_weight: usize, atoms: usize, allow_diamond: bool, seed: u64) -> Formula {
    assert!(atoms >= 1, "need at least one atom");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_formula_with(&mut rng, max_weight, atoms, allow_diamond)
}

pub(crate) fn atom_name(i: usize) -> String {
    const NAMES: [&str; 6] = ["p", "q", "r", "s", "t", "u"];
    if i < NAMES.len() {
        NAMES[i].to_owned()
    } else {
        format!("a{i}")
    }
}

pub(crate) fn random_formula_with(
    rng: &mut impl Rng,
    max_weight: usize,
    atoms: usize,
    allow_diamond: bool,
) -> Formula {
    if max_weight == 0 {
        // Leaves are mostly atoms; bottom shows up occasionally.
        if rng.gen_ratio(1, 8) {
            return Formula::Bot;
        }
        return Formula::Atom(atom_name(rng.gen_range(0..atoms)));
    }
    let n_conn = if allow_diamond { 5 } else { 4 };
    match rng.gen_range(0..n_conn + 2) {
        0 | 1 => {
            // Stop early: weight strictly below the budget is allowed.
            random_formula_with(rng, 0, atoms, allow_diamond)
        }
        k => {
            let budget = max_weight - 1;
            let left = rng.gen_range(0..=budget);
            let l = random_formula_with(rng, left, atoms, allow_diamond);
            let r = random_formula_with(rng, budget - left, atoms, allow_diamond);
            match k - 2 {
                0 => and(l, r),
                1 => or(l, r),
                2 => imp(l, r),
                3 => cond_box(l, r),
                _ => cond_diam(l, r),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_abbreviations() {
        assert_eq!(parse("p > true").unwrap(), cond_box(atom("p"), top()));
        assert_eq!(
            parse("~(p ?> false)").unwrap(),
            neg(cond_diam(atom("p"), Formula::Bot))
        );
        assert_eq!(
            parse("p & q -> p").unwrap(),
            imp(and(atom("p"), atom("q")), atom("p"))
        );
    }

    #[test]
    fn parse_precedence_and_associativity() {
        assert_eq!(
            parse("p -> q -> r").unwrap(),
            imp(atom("p"), imp(atom("q"), atom("r")))
        );
        assert_eq!(
            parse("p & q & r").unwrap(),
            and(and(atom("p"), atom("q")), atom("r"))
        );
        assert_eq!(
            parse("p | q & r").unwrap(),
            or(atom("p"), and(atom("q"), atom("r")))
        );
        assert_eq!(
            parse("p <-> q").unwrap(),
            and(imp(atom("p"), atom("q")), imp(atom("q"), atom("p")))
        );
        // conditionals are non-associative
        assert!(parse("p > q > r").is_err());
        assert!(parse("p > q -> r").is_err());
        assert!(parse("p -> q > r").is_ok());
    }

    #[test]
    fn parse_errors_carry_position() {
        let e = parse("p & $").unwrap_err();
        assert_eq!(e.pos, 4);
        assert!(parse("p &").is_err());
        assert!(parse("p q").is_err());
    }

    #[test]
    fn weight_examples() {
        assert_eq!(atom("p").weight(), 0);
        assert_eq!(neg(atom("p")).weight(), 1);
        assert_eq!(cond_box(and(atom("p"), atom("q")), atom("r")).weight(), 2);
    }

    #[test]
    fn diamond_free_examples() {
        assert!(cond_box(atom("p"), atom("q")).is_diamond_free());
        assert!(!cond_diam(atom("p"), atom("q")).is_diamond_free());
        assert!(!imp(cond_diam(atom("p"), atom("q")), atom("r")).is_diamond_free());
    }

    #[test]
    fn random_formula_contract() {
        let f = random_formula(0, 1, false, 7);
        assert_eq!(f.weight(), 0);
        let g1 = random_formula(3, 2, true, 42);
        let g2 = random_formula(3, 2, true, 42);
        assert_eq!(g1, g2);
        assert!(g1.weight() <= 3);
        for seed in 0..50 {
            assert!(random_formula(2, 1, false, seed).is_diamond_free());
        }
    }

    fn arb_formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            (0usize..4).prop_map(|i| Formula::Atom(atom_name(i))),
            Just(Formula::Bot),
        ];
        leaf.prop_recursive(5, 64, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(l, r)| and(l, r)),
                (inner.clone(), inner.clone()).prop_map(|(l, r)| or(l, r)),
                (inner.clone(), inner.clone()).prop_map(|(l, r)| imp(l, r)),
                (inner.clone(), inner.clone()).prop_map(|(l, r)| cond_box(l, r)),
                (inner.clone(), inner.clone()).prop_map(|(l, r)| cond_diam(l, r)),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(f in arb_formula()) {
            let printed = f.to_string();
            let back = parse(&printed).unwrap();
            prop_assert_eq!(&back, &f);
            prop_assert_eq!(back.weight(), f.weight());
        }

        #[test]
        fn diamond_free_agrees_with_printed_scan(f in arb_formula()) {
            let printed = f.to_string();
            prop_assert_eq!(f.is_diamond_free(), !printed.contains("?>"));
        }
    }
}
