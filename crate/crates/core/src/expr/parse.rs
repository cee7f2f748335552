//! Recursive-descent parser for the expression DSL.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | factor
//! factor := atom ('^' exponent)?
//! exponent := '-'? integer | '(' '-'? integer ')'
//! atom   := number | ident | func '(' expr ')' | '(' expr ')'
//! func   := sin | cos | exp | log | sqrt
//! ```
//!
//! Identifiers are `x1..xn`, plus any aliases registered on the [`Parser`].

use super::{Expr, Func, Node};
use crate::error::Error;

/// Parses `text` with variables `x1..x{n_vars}`.
pub fn parse_expr(text: &str, n_vars: usize) -> Result<Expr, Error> {
    Parser::new(n_vars).parse(text)
}

#[derive(Debug, Clone)]
pub struct Parser {
    n_vars: usize,
    aliases: Vec<(String, usize)>,
}

impl Parser {
    pub fn new(n_vars: usize) -> Self {
        Self {
            n_vars,
            aliases: Vec::new(),
        }
    }

    /// Makes `name` an alternative spelling of the zero-based variable `index`.
    pub fn alias(mut self, name: impl Into<String>, index: usize) -> Self {
        self.aliases.push((name.into(), index));
        self
    }

    pub fn parse(&self, text: &str) -> Result<Expr, Error> {
        let mut state = State {
            parser: self,
            chars: text.char_indices().collect(),
            pos: 0,
            len: text.len(),
        };
        let e = state.expr()?;
        state.skip_ws();
        if let Some(&(at, c)) = state.chars.get(state.pos) {
            return Err(syntax(at, format!("unexpected `{c}`")));
        }
        Ok(e)
    }

    fn resolve(&self, name: &str) -> Option<usize> {
        if let Some((_, idx)) = self.aliases.iter().find(|(a, _)| a == name) {
            return Some(*idx);
        }
        let digits = name.strip_prefix('x')?;
        if digits.is_empty()
            || !digits.bytes().all(|b| b.is_ascii_digit())
            || digits.starts_with('0')
        {
            return None;
        }
        let k: usize = digits.parse().ok()?;
        (1..=self.n_vars).contains(&k).then(|| k - 1)
    }
}

fn syntax(position: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        position,
        message: message.into(),
    }
}

struct State<'a> {
    parser: &'a Parser,
    chars: Vec<(usize, char)>,
    pos: usize,
    len: usize,
}

impl State<'_> {
    fn skip_ws(&mut self) {
        while matches!(self.chars.get(self.pos), Some((_, c)) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.len, |&(at, _)| at)
    }

    fn expect(&mut self, want: char) -> Result<(), Error> {
        match self.peek() {
            Some(c) if c == want => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => Err(syntax(
                self.offset(),
                format!("expected `{want}`, found `{c}`"),
            )),
            None => Err(syntax(
                self.offset(),
                format!("expected `{want}`, found end of input"),
            )),
        }
    }

    fn expr(&mut self) -> Result<Expr, Error> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    terms.push(self.term()?);
                }
                Some('-') => {
                    self.pos += 1;
                    terms.push(negate(self.term()?));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::new(Node::Sum(terms))
        })
    }

    fn term(&mut self) -> Result<Expr, Error> {
        let mut factors = vec![self.unary()?];
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    factors.push(self.unary()?);
                }
                Some('/') => {
                    self.pos += 1;
                    let num = collect_product(std::mem::take(&mut factors));
                    let den = self.unary()?;
                    factors.push(Expr::new(Node::Quotient(num, den)));
                }
                _ => break,
            }
        }
        Ok(collect_product(factors))
    }

    fn unary(&mut self) -> Result<Expr, Error> {
        if self.peek() == Some('-') {
            self.pos += 1;
            return Ok(negate(self.unary()?));
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<Expr, Error> {
        let base = self.atom()?;
        if self.peek() != Some('^') {
            return Ok(base);
        }
        self.pos += 1;
        let k = if self.peek() == Some('(') {
            self.pos += 1;
            let k = self.integer()?;
            self.expect(')')?;
            k
        } else {
            self.integer()?
        };
        Ok(Expr::new(Node::IntPow(base, k)))
    }

    fn integer(&mut self) -> Result<i32, Error> {
        let negative = if self.peek() == Some('-') {
            self.pos += 1;
            true
        } else {
            false
        };
        self.skip_ws();
        let start = self.offset();
        let mut digits = String::new();
        while let Some(&(_, c)) = self.chars.get(self.pos) {
            if !c.is_ascii_digit() {
                break;
            }
            digits.push(c);
            self.pos += 1;
        }
        if digits.is_empty() {
            return Err(syntax(start, "exponent must be an integer"));
        }
        if matches!(self.chars.get(self.pos), Some((_, '.' | 'e' | 'E'))) {
            return Err(syntax(start, "exponent must be an integer"));
        }
        let k: i32 = digits
            .parse()
            .map_err(|_| syntax(start, "exponent out of range"))?;
        Ok(if negative { -k } else { k })
    }

    fn atom(&mut self) -> Result<Expr, Error> {
        let start = self.offset();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_alphabetic() || c == '_' => {
                let mut name = String::new();
                while let Some(&(_, c)) = self.chars.get(self.pos) {
                    if !(c.is_alphanumeric() || c == '_') {
                        break;
                    }
                    name.push(c);
                    self.pos += 1;
                }
                if let Some(func) = Func::from_name(&name) {
                    if self.peek() != Some('(') {
                        return Err(syntax(
                            self.offset(),
                            format!("`{name}` must be followed by `(`"),
                        ));
                    }
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(Expr::new(Node::Unary(func, arg)));
                }
                self.parser
                    .resolve(&name)
                    .map(Expr::var)
                    .ok_or(Error::UnknownVariable(name))
            }
            Some(c) => Err(syntax(start, format!("unexpected `{c}`"))),
            None => Err(syntax(start, "unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr, Error> {
        let start = self.offset();
        let mut lexeme = String::new();
        let mut seen_exp = false;
        while let Some(&(_, c)) = self.chars.get(self.pos) {
            let take = c.is_ascii_digit()
                || c == '.'
                || (!seen_exp && (c == 'e' || c == 'E'))
                || ((c == '+' || c == '-') && matches!(lexeme.chars().last(), Some('e' | 'E')));
            if !take {
                break;
            }
            seen_exp |= c == 'e' || c == 'E';
            lexeme.push(c);
            self.pos += 1;
        }
        lexeme
            .parse::<f64>()
            .map(Expr::constant)
            .map_err(|_| syntax(start, format!("malformed number `{lexeme}`")))
    }
}

fn negate(e: Expr) -> Expr {
    match e.node() {
        Node::Const(c) => Expr::constant(-c),
        _ => Expr::new(Node::Product(vec![Expr::constant(-1.0), e])),
    }
}

fn collect_product(mut factors: Vec<Expr>) -> Expr {
    if factors.len() == 1 {
        factors.pop().unwrap()
    } else {
        Expr::new(Node::Product(factors))
    }
}
