//! Reader for the Prolog-like text format.
//!
//! ```text
//! % comment
//! #abducible flies/1.
//! bird(a).
//! flies(X) :- bird(X).
//! :- flies(b).          % constraint files only
//! #layer                % layered-theory files only
//! ```
//!
//! Identifiers starting with an uppercase letter or `_` are variables; every
//! other identifier (letters, digits, `_`) names a constant, functor or
//! predicate.

use std::collections::BTreeSet;

use super::clause::{Clause, DefiniteGoal};
use super::term::{Atom, Signature, Term};
use super::theory::{ArityTable, Theory};
use crate::error::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Var(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Slash,
    Neck,
    Directive(String),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Var(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Neck => "`:-`".into(),
            Tok::Directive(d) => format!("`#{d}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    pos: Pos,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1, 1);

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else if c.is_some() {
                column += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let pos = Pos { line, column };
        let tok = match c {
            c if c.is_whitespace() => {
                bump!();
                continue;
            }
            '%' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    bump!();
                }
                continue;
            }
            '(' | ')' | ',' | '.' | '/' => {
                bump!();
                match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ',' => Tok::Comma,
                    '.' => Tok::Dot,
                    _ => Tok::Slash,
                }
            }
            ':' => {
                bump!();
                if chars.peek() == Some(&'-') {
                    bump!();
                    Tok::Neck
                } else {
                    return Err(ParseError::new(pos.line, pos.column, "expected `:-`"));
                }
            }
            '#' => {
                bump!();
                let mut name = String::new();
                while chars.peek().is_some_and(|&c| is_ident_char(c)) {
                    name.push(bump!().unwrap());
                }
                if name.is_empty() {
                    return Err(ParseError::new(
                        pos.line,
                        pos.column,
                        "expected a directive name after `#`",
                    ));
                }
                Tok::Directive(name)
            }
            c if is_ident_char(c) => {
                let mut name = String::new();
                while chars.peek().is_some_and(|&c| is_ident_char(c)) {
                    name.push(bump!().unwrap());
                }
                if c.is_ascii_uppercase() || c == '_' {
                    Tok::Var(name)
                } else {
                    Tok::Ident(name)
                }
            }
            other => {
                return Err(ParseError::new(
                    pos.line,
                    pos.column,
                    format!("unexpected character `{other}`"),
                ))
            }
        };
        out.push(Token { tok, pos });
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, column },
    });
    Ok(out)
}

#[derive(Debug)]
enum Item {
    Clause(Clause),
    Goal(DefiniteGoal),
    Abducibles(Vec<Signature>),
    Layer,
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
    anonymous: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ParseError> {
        Ok(Parser {
            tokens: lex(text)?,
            at: 0,
            anonymous: 0,
        })
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.at]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.at].clone();
        if t.tok != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        let pos = self.peek().pos;
        ParseError::new(pos.line, pos.column, message)
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.peek().tok == tok {
            self.next();
            Ok(())
        } else {
            Err(self.error_here(format!(
                "expected {}, found {}",
                tok.describe(),
                self.peek().tok.describe()
            )))
        }
    }

    fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    fn args(&mut self) -> Result<Vec<Term>, ParseError> {
        if self.peek().tok != Tok::LParen {
            return Ok(Vec::new());
        }
        let open = self.next().pos;
        let mut args = vec![self.term()?];
        loop {
            match self.peek().tok {
                Tok::Comma => {
                    self.next();
                    args.push(self.term()?);
                }
                Tok::RParen => {
                    self.next();
                    return Ok(args);
                }
                Tok::Eof => return Err(ParseError::new(open.line, open.column, "unclosed `(`")),
                _ => {
                    return Err(self.error_here(format!(
                        "expected `,` or `)`, found {}",
                        self.peek().tok.describe()
                    )))
                }
            }
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let t = self.next();
        match t.tok {
            Tok::Var(v) if v == "_" => {
                self.anonymous += 1;
                Ok(Term::Var(format!("_{}", self.anonymous)))
            }
            Tok::Var(v) => Ok(Term::Var(v)),
            Tok::Ident(f) => Ok(Term::App(f, self.args()?)),
            other => Err(ParseError::new(
                t.pos.line,
                t.pos.column,
                format!("expected a term, found {}", other.describe()),
            )),
        }
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let t = self.next();
        match t.tok {
            Tok::Ident(p) => Ok(Atom::new(p, self.args()?)),
            other => Err(ParseError::new(
                t.pos.line,
                t.pos.column,
                format!("expected an atom, found {}", other.describe()),
            )),
        }
    }

    fn atoms(&mut self) -> Result<Vec<Atom>, ParseError> {
        let mut out = vec![self.atom()?];
        while self.peek().tok == Tok::Comma {
            self.next();
            out.push(self.atom()?);
        }
        Ok(out)
    }

    fn signature(&mut self) -> Result<Signature, ParseError> {
        let name = match self.next() {
            Token {
                tok: Tok::Ident(n), ..
            } => n,
            t => {
                return Err(ParseError::new(
                    t.pos.line,
                    t.pos.column,
                    "expected a predicate name",
                ))
            }
        };
        self.expect(Tok::Slash)?;
        let t = self.next();
        match &t.tok {
            Tok::Ident(n) => n
                .parse()
                .map(|arity| Signature::new(name, arity))
                .map_err(|_| {
                    ParseError::new(t.pos.line, t.pos.column, format!("invalid arity `{n}`"))
                }),
            _ => Err(ParseError::new(
                t.pos.line,
                t.pos.column,
                "expected an arity",
            )),
        }
    }

    fn item(&mut self) -> Result<(Item, Pos), ParseError> {
        let pos = self.peek().pos;
        let item = match self.peek().tok.clone() {
            Tok::Directive(d) if d == "abducible" => {
                self.next();
                let mut sigs = vec![self.signature()?];
                while self.peek().tok == Tok::Comma {
                    self.next();
                    sigs.push(self.signature()?);
                }
                self.expect(Tok::Dot)?;
                Item::Abducibles(sigs)
            }
            Tok::Directive(d) if d == "layer" => {
                self.next();
                // optional layer number on the same line
                if let Tok::Ident(n) = &self.peek().tok {
                    if self.peek().pos.line == pos.line && n.chars().all(|c| c.is_ascii_digit()) {
                        self.next();
                    }
                }
                Item::Layer
            }
            Tok::Directive(d) => {
                return Err(ParseError::new(
                    pos.line,
                    pos.column,
                    format!("unknown directive `#{d}`"),
                ))
            }
            Tok::Neck => {
                self.next();
                let body = self.atoms()?;
                self.expect(Tok::Dot)?;
                Item::Goal(DefiniteGoal::new(body).expect("nonempty body"))
            }
            _ => {
                let head = self.atom()?;
                let body = if self.peek().tok == Tok::Neck {
                    self.next();
                    self.atoms()?
                } else {
                    Vec::new()
                };
                self.expect(Tok::Dot)?;
                Item::Clause(Clause::new(head, body))
            }
        };
        Ok((item, pos))
    }

    fn document(&mut self) -> Result<Vec<(Item, Pos)>, ParseError> {
        let mut items = Vec::new();
        let mut arities = ArityTable::new();
        while !self.at_eof() {
            let (item, pos) = self.item()?;
            let checked = match &item {
                Item::Clause(c) => arities.observe_clause(c),
                Item::Goal(g) => g.body().iter().try_for_each(|a| arities.observe_atom(a)),
                _ => Ok(()),
            };
            if let Err(e) = checked {
                return Err(ParseError::new(pos.line, pos.column, e.to_string()));
            }
            items.push((item, pos));
        }
        Ok(items)
    }
}

fn misplaced(pos: Pos, what: &str, file: &str) -> ParseError {
    ParseError::new(
        pos.line,
        pos.column,
        format!("{what} not allowed in a {file}"),
    )
}

/// Parses a file of definite clauses.
pub fn parse_theory(text: &str) -> Result<Theory, ParseError> {
    let mut theory = Theory::new();
    for (item, pos) in Parser::new(text)?.document()? {
        match item {
            Item::Clause(c) => {
                theory.insert(c);
            }
            Item::Goal(_) => return Err(misplaced(pos, "integrity constraint", "theory file")),
            Item::Abducibles(_) => return Err(misplaced(pos, "`#abducible`", "theory file")),
            Item::Layer => return Err(misplaced(pos, "`#layer`", "theory file")),
        }
    }
    Ok(theory)
}

/// Parses a program file: clauses plus `#abducible` declarations.
pub fn parse_program(text: &str) -> Result<(Theory, BTreeSet<Signature>), ParseError> {
    let mut theory = Theory::new();
    let mut abducibles = BTreeSet::new();
    for (item, pos) in Parser::new(text)?.document()? {
        match item {
            Item::Clause(c) => {
                theory.insert(c);
            }
            Item::Abducibles(sigs) => abducibles.extend(sigs),
            Item::Goal(_) => return Err(misplaced(pos, "integrity constraint", "program file")),
            Item::Layer => return Err(misplaced(pos, "`#layer`", "program file")),
        }
    }
    Ok((theory, abducibles))
}

/// Parses a constraint file: integrity constraints `:- b1, …, bn.` only.
pub fn parse_constraints(text: &str) -> Result<Vec<DefiniteGoal>, ParseError> {
    let mut goals = Vec::new();
    for (item, pos) in Parser::new(text)?.document()? {
        match item {
            Item::Goal(g) => goals.push(g),
            _ => {
                return Err(ParseError::new(
                    pos.line,
                    pos.column,
                    "a constraint file may only contain `:- …` constraints",
                ))
            }
        }
    }
    Ok(goals)
}

/// Parses a layered theory: layers separated by `#layer` lines, layer 1
/// first. Clauses before the first `#layer` form layer 1.
pub fn parse_layers(text: &str) -> Result<Vec<Vec<Clause>>, ParseError> {
    let mut layers: Vec<Vec<Clause>> = Vec::new();
    let mut current: Option<Vec<Clause>> = None;
    for (item, pos) in Parser::new(text)?.document()? {
        match item {
            Item::Layer => {
                if let Some(layer) = current.take() {
                    layers.push(layer);
                }
                current = Some(Vec::new());
            }
            Item::Clause(c) => {
                let layer = current.get_or_insert_with(Vec::new);
                if !layer.contains(&c) {
                    layer.push(c);
                }
            }
            Item::Goal(_) => {
                return Err(misplaced(
                    pos,
                    "integrity constraint",
                    "layered theory file",
                ))
            }
            Item::Abducibles(_) => {
                return Err(misplaced(pos, "`#abducible`", "layered theory file"))
            }
        }
    }
    layers.extend(current);
    Ok(layers)
}

/// Parses a single atom, with or without a trailing `.`.
pub fn parse_atom(text: &str) -> Result<Atom, ParseError> {
    let mut p = Parser::new(text)?;
    let atom = p.atom()?;
    if p.peek().tok == Tok::Dot {
        p.next();
    }
    if !p.at_eof() {
        return Err(p.error_here("unexpected input after atom"));
    }
    let mut arities = ArityTable::new();
    arities
        .observe_atom(&atom)
        .map_err(|e| ParseError::new(1, 1, e.to_string()))?;
    Ok(atom)
}

/// Parses a single clause; the trailing `.` is optional.
pub fn parse_clause(text: &str) -> Result<Clause, ParseError> {
    let mut p = Parser::new(text)?;
    let head = p.atom()?;
    let body = if p.peek().tok == Tok::Neck {
        p.next();
        p.atoms()?
    } else {
        Vec::new()
    };
    if p.peek().tok == Tok::Dot {
        p.next();
    }
    if !p.at_eof() {
        return Err(p.error_here("unexpected input after clause"));
    }
    let clause = Clause::new(head, body);
    ArityTable::new()
        .observe_clause(&clause)
        .map_err(|e| ParseError::new(1, 1, e.to_string()))?;
    Ok(clause)
}

/// Parses `p/1, q/2` (a trailing `.` is allowed).
pub fn parse_signatures(text: &str) -> Result<Vec<Signature>, ParseError> {
    let mut p = Parser::new(text)?;
    let mut out = Vec::new();
    if p.at_eof() {
        return Ok(out);
    }
    out.push(p.signature()?);
    while p.peek().tok == Tok::Comma {
        p.next();
        out.push(p.signature()?);
    }
    if p.peek().tok == Tok::Dot {
        p.next();
    }
    if !p.at_eof() {
        return Err(p.error_here("unexpected input after signature list"));
    }
    Ok(out)
}
