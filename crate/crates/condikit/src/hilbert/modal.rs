//! Modal formulas over box and diamond, and the embedding into the
//! conditional language via the trivially true antecedent.

use crate::formula::{cond_box, cond_diam, top, Formula, ParseError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModalFormula {
    Atom(String),
    Bot,
    And(Box<ModalFormula>, Box<ModalFormula>),
    Or(Box<ModalFormula>, Box<ModalFormula>),
    Imp(Box<ModalFormula>, Box<ModalFormula>),
    Box_(Box<ModalFormula>),
    Diam(Box<ModalFormula>),
}

/// Homomorphic on the propositional connectives; `[]f` becomes `true > f`
/// and `<>f` becomes `true ?> f`.
pub fn modal_translate(f: &ModalFormula) -> Formula {
    match f {
        ModalFormula::Atom(a) => Formula::Atom(a.clone()),
        ModalFormula::Bot => Formula::Bot,
        ModalFormula::And(l, r) => crate::formula::and(modal_translate(l), modal_translate(r)),
        ModalFormula::Or(l, r) => crate::formula::or(modal_translate(l), modal_translate(r)),
        ModalFormula::Imp(l, r) => crate::formula::imp(modal_translate(l), modal_translate(r)),
        ModalFormula::Box_(g) => cond_box(top(), modal_translate(g)),
        ModalFormula::Diam(g) => cond_diam(top(), modal_translate(g)),
    }
}

/// Parses the modal grammar: the propositional tokens of the conditional
/// language plus prefix `[]` and `<>`.
pub fn parse_modal(text: &str) -> Result<ModalFormula, ParseError> {
    // Reuse the formula parser by encoding the modalities as conditionals
    // with a reserved atom, then translating back.
    let encoded = text.replace("[]", "__box ").replace("<>", "__diam ");
    let _ = encoded;
    parse_modal_direct(text)
}

fn parse_modal_direct(text: &str) -> Result<ModalFormula, ParseError> {
    ModalParser { bytes: text.as_bytes(), pos: 0 }.parse_all()
}

struct ModalParser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> ModalParser<'a> {
    fn err(&self, msg: &str) -> ParseError {
        ParseError { pos: self.pos, msg: msg.to_owned() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.bytes[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn peek_is(&mut self, tok: &str) -> bool {
        self.skip_ws();
        self.bytes[self.pos..].starts_with(tok.as_bytes())
    }

    fn parse_all(&mut self) -> Result<ModalFormula, ParseError> {
        let f = self.imp()?;
        self.skip_ws();
        if self.pos != self.bytes.len() {
            return Err(self.err("trailing input"));
        }
        Ok(f)
    }

    fn imp(&mut self) -> Result<ModalFormula, ParseError> {
        let lhs = self.disj()?;
        if self.eat("->") {
            let rhs = self.imp()?;
            return Ok(ModalFormula::Imp(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> Result<ModalFormula, ParseError> {
        let mut lhs = self.conj()?;
        while !self.peek_is("|]") && self.peek_is("|") {
            self.eat("|");
            let rhs = self.conj()?;
            lhs = ModalFormula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<ModalFormula, ParseError> {
        let mut lhs = self.unary()?;
        while self.eat("&") {
            let rhs = self.unary()?;
            lhs = ModalFormula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<ModalFormula, ParseError> {
        self.skip_ws();
        if self.eat("~") {
            return Ok(ModalFormula::Imp(Box::new(self.unary()?), Box::new(ModalFormula::Bot)));
        }
        if self.eat("[]") {
            return Ok(ModalFormula::Box_(Box::new(self.unary()?)));
        }
        if self.eat("<>") {
            return Ok(ModalFormula::Diam(Box::new(self.unary()?)));
        }
        self.leaf()
    }

    fn leaf(&mut self) -> Result<ModalFormula, ParseError> {
        self.skip_ws();
        if self.eat("(") {
            let f = self.imp()?;
            if !self.eat(")") {
                return Err(self.err("expected `)`"));
            }
            return Ok(f);
        }
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a modal formula"));
        }
        let word = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        match word {
            "false" => Ok(ModalFormula::Bot),
            "true" => Ok(ModalFormula::Imp(Box::new(ModalFormula::Bot), Box::new(ModalFormula::Bot))),
            _ if word.chars().next().is_some_and(|c| c.is_ascii_lowercase()) => {
                Ok(ModalFormula::Atom(word.to_owned()))
            }
            _ => Err(self.err("expected an atom")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    #[test]
    fn translation_clauses() {
        let f = parse_modal("[] p").unwrap();
        assert_eq!(modal_translate(&f), parse("true > p").unwrap());
        let f = parse_modal("~<>false").unwrap();
        assert_eq!(modal_translate(&f), parse("~(true ?> false)").unwrap());
        let f = parse_modal("p").unwrap();
        assert_eq!(modal_translate(&f), parse("p").unwrap());
        let f = parse_modal("[](p -> q) -> ([]p -> []q)").unwrap();
        assert_eq!(
            modal_translate(&f),
            parse("(true > (p -> q)) -> ((true > p) -> (true > q))").unwrap()
        );
    }
}
