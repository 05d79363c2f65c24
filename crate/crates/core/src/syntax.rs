//! Concrete s-expression syntax.
//!
//! ```text
//! type   := "*" | "Nat" | "Bool" | "(->" type type ")"
//! ground := "Nat" | "Bool" | "Fun"
//! term   := ident | "(lam" "(" ident ":" type ")" term ")" | "(" term term ")"
//!         | "(nat" integer ")" | "true" | "false"
//!         | "(inj" ground term ")" | "(proj" ground term ")" | "(blame" type ")"
//! ```
//!
//! `;` starts a comment running to the end of the line. Core terms, which
//! carry no annotations, print lambdas as `(lam (x) e)` and blame as `blame`;
//! that form is for display only.

use std::fmt::Write as _;

use thiserror::Error;

use crate::abt::Term;
use crate::typecheck::{AnnNode, AnnTerm, Span};
use crate::types::{Ground, Lit, Type};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: {message}")]
    Syntax {
        message: String,
        line: usize,
        col: usize,
    },
    #[error("{line}:{col}: unbound name `{name}`")]
    UnboundName {
        name: String,
        line: usize,
        col: usize,
    },
}

const KEYWORDS: [&str; 7] = ["lam", "nat", "inj", "proj", "blame", "true", "false"];

/// 1-based line and column of a byte offset.
pub fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Open,
    Close,
    Colon,
    Arrow,
    Star,
    Atom(String),
    Int(String),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: Span,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

struct Parser<'a> {
    text: &'a str,
    tokens: Vec<Token>,
    pos: usize,
    names: Vec<String>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Result<Parser<'a>, ParseError> {
        let mut p = Parser {
            text,
            tokens: Vec::new(),
            pos: 0,
            names: Vec::new(),
        };
        p.lex()?;
        Ok(p)
    }

    fn error_at(&self, offset: usize, message: impl Into<String>) -> ParseError {
        let (line, col) = line_col(self.text, offset);
        ParseError::Syntax {
            message: message.into(),
            line,
            col,
        }
    }

    fn lex(&mut self) -> Result<(), ParseError> {
        let bytes: Vec<(usize, char)> = self.text.char_indices().collect();
        let mut i = 0;
        while i < bytes.len() {
            let (off, c) = bytes[i];
            let single = |tok| Token {
                tok,
                span: Span::new(off, off + 1),
            };
            match c {
                c if c.is_whitespace() => i += 1,
                ';' => {
                    while i < bytes.len() && bytes[i].1 != '\n' {
                        i += 1;
                    }
                }
                '(' => {
                    self.tokens.push(single(Tok::Open));
                    i += 1;
                }
                ')' => {
                    self.tokens.push(single(Tok::Close));
                    i += 1;
                }
                ':' => {
                    self.tokens.push(single(Tok::Colon));
                    i += 1;
                }
                '*' => {
                    self.tokens.push(single(Tok::Star));
                    i += 1;
                }
                '-' if bytes.get(i + 1).map(|b| b.1) == Some('>') => {
                    self.tokens.push(Token {
                        tok: Tok::Arrow,
                        span: Span::new(off, off + 2),
                    });
                    i += 2;
                }
                c if c.is_ascii_digit() || is_ident_start(c) => {
                    let numeric = c.is_ascii_digit();
                    let start = i;
                    while i < bytes.len() && is_ident_char(bytes[i].1) {
                        i += 1;
                    }
                    let end = bytes.get(i).map_or(self.text.len(), |b| b.0);
                    let word = self.text[off..end].to_string();
                    let tok = if numeric {
                        if !word.chars().all(|c| c.is_ascii_digit()) {
                            return Err(
                                self.error_at(bytes[start].0, format!("malformed number `{word}`"))
                            );
                        }
                        Tok::Int(word)
                    } else {
                        Tok::Atom(word)
                    };
                    self.tokens.push(Token {
                        tok,
                        span: Span::new(off, end),
                    });
                }
                other => return Err(self.error_at(off, format!("unexpected character `{other}`"))),
            }
        }
        Ok(())
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn end_offset(&self) -> usize {
        self.text.len()
    }

    fn next(&mut self, what: &str) -> Result<Token, ParseError> {
        match self.tokens.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => Err(self.error_at(
                self.end_offset(),
                format!("unexpected end of input, expected {what}"),
            )),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Span, ParseError> {
        let t = self.next(what)?;
        if t.tok == tok {
            Ok(t.span)
        } else {
            Err(self.error_at(t.span.start, format!("expected {what}")))
        }
    }

    fn ident(&mut self) -> Result<(String, Span), ParseError> {
        let t = self.next("identifier")?;
        match t.tok {
            Tok::Atom(name) if !KEYWORDS.contains(&name.as_str()) => Ok((name, t.span)),
            _ => Err(self.error_at(t.span.start, "expected identifier")),
        }
    }

    fn ty(&mut self) -> Result<Type, ParseError> {
        let t = self.next("type")?;
        match t.tok {
            Tok::Star => Ok(Type::Unknown),
            Tok::Atom(ref a) if a == "Nat" => Ok(Type::NAT),
            Tok::Atom(ref a) if a == "Bool" => Ok(Type::BOOL),
            Tok::Open => {
                self.expect(Tok::Arrow, "`->`")?;
                let a = self.ty()?;
                let b = self.ty()?;
                self.expect(Tok::Close, "`)`")?;
                Ok(Type::arrow(a, b))
            }
            _ => Err(self.error_at(t.span.start, "expected type")),
        }
    }

    fn ground(&mut self) -> Result<Ground, ParseError> {
        let t = self.next("ground type")?;
        match t.tok {
            Tok::Atom(ref a) if a == "Nat" => Ok(Ground::NAT),
            Tok::Atom(ref a) if a == "Bool" => Ok(Ground::BOOL),
            Tok::Atom(ref a) if a == "Fun" => Ok(Ground::Fun),
            _ => Err(self.error_at(t.span.start, "expected ground type (Nat, Bool or Fun)")),
        }
    }

    fn resolve(&self, name: &str, span: Span) -> Result<usize, ParseError> {
        match self.names.iter().rev().position(|n| n == name) {
            Some(i) => Ok(i),
            None => {
                let (line, col) = line_col(self.text, span.start);
                Err(ParseError::UnboundName {
                    name: name.to_string(),
                    line,
                    col,
                })
            }
        }
    }

    fn term(&mut self) -> Result<AnnTerm, ParseError> {
        let t = self.next("term")?;
        let start = t.span.start;
        match t.tok {
            Tok::Atom(ref a) if a == "true" => {
                Ok(AnnTerm::with_span(AnnNode::Lit(Lit::Bool(true)), t.span))
            }
            Tok::Atom(ref a) if a == "false" => {
                Ok(AnnTerm::with_span(AnnNode::Lit(Lit::Bool(false)), t.span))
            }
            Tok::Atom(ref a) if !KEYWORDS.contains(&a.as_str()) => {
                let i = self.resolve(a, t.span)?;
                Ok(AnnTerm::with_span(AnnNode::Var(i), t.span))
            }
            Tok::Open => {
                let keyword = match self.peek() {
                    Some(Token {
                        tok: Tok::Atom(a), ..
                    }) if KEYWORDS[..5].contains(&a.as_str()) => Some(a.clone()),
                    _ => None,
                };
                let node = match keyword.as_deref() {
                    Some("lam") => {
                        self.pos += 1;
                        self.expect(Tok::Open, "`(` before binder")?;
                        let (name, _) = self.ident()?;
                        self.expect(Tok::Colon, "`:`")?;
                        let dom = self.ty()?;
                        self.expect(Tok::Close, "`)`")?;
                        self.names.push(name);
                        let body = self.term();
                        self.names.pop();
                        AnnNode::Lam(dom, Box::new(body?))
                    }
                    Some("nat") => {
                        self.pos += 1;
                        let n = self.next("integer")?;
                        match n.tok {
                            Tok::Int(digits) => {
                                let v = digits.parse::<u64>().map_err(|_| {
                                    self.error_at(n.span.start, "integer literal out of range")
                                })?;
                                AnnNode::Lit(Lit::Num(v))
                            }
                            _ => return Err(self.error_at(n.span.start, "expected integer")),
                        }
                    }
                    Some("inj") => {
                        self.pos += 1;
                        let g = self.ground()?;
                        AnnNode::Inject(Box::new(self.term()?), g)
                    }
                    Some("proj") => {
                        self.pos += 1;
                        let h = self.ground()?;
                        AnnNode::Project(Box::new(self.term()?), h)
                    }
                    Some("blame") => {
                        self.pos += 1;
                        AnnNode::Blame(self.ty()?)
                    }
                    _ => {
                        let f = self.term()?;
                        let a = self.term()?;
                        AnnNode::App(Box::new(f), Box::new(a))
                    }
                };
                let close = self.expect(Tok::Close, "`)`")?;
                Ok(AnnTerm::with_span(node, Span::new(start, close.end)))
            }
            _ => Err(self.error_at(start, "expected term")),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(self.error_at(t.span.start, "trailing input")),
        }
    }
}

/// Parse a closed program.
pub fn parse(text: &str) -> Result<AnnTerm, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_type(text: &str) -> Result<Type, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.ty()?;
    p.finish()?;
    Ok(t)
}

fn binder_name(depth: usize) -> String {
    format!("x{depth}")
}

fn var_name(i: usize, depth: usize) -> String {
    if i < depth {
        binder_name(depth - 1 - i)
    } else {
        format!("#{}", i - depth)
    }
}

fn write_lit(out: &mut String, c: &Lit) {
    match c {
        Lit::Num(n) => write!(out, "(nat {n})").unwrap(),
        Lit::Bool(b) => write!(out, "{b}").unwrap(),
    }
}

fn write_ann(out: &mut String, m: &AnnTerm, depth: usize) {
    match &m.node {
        AnnNode::Var(i) => out.push_str(&var_name(*i, depth)),
        AnnNode::Lit(c) => write_lit(out, c),
        AnnNode::Lam(dom, body) => {
            write!(out, "(lam ({} : {dom}) ", binder_name(depth)).unwrap();
            write_ann(out, body, depth + 1);
            out.push(')');
        }
        AnnNode::App(f, a) => {
            out.push('(');
            write_ann(out, f, depth);
            out.push(' ');
            write_ann(out, a, depth);
            out.push(')');
        }
        AnnNode::Inject(n, g) => {
            write!(out, "(inj {g} ").unwrap();
            write_ann(out, n, depth);
            out.push(')');
        }
        AnnNode::Project(n, h) => {
            write!(out, "(proj {h} ").unwrap();
            write_ann(out, n, depth);
            out.push(')');
        }
        AnnNode::Blame(a) => write!(out, "(blame {a})").unwrap(),
    }
}

fn write_term(out: &mut String, m: &Term, depth: usize) {
    match m {
        Term::Var(i) => out.push_str(&var_name(*i, depth)),
        Term::Lit(c) => write_lit(out, c),
        Term::Lam(body) => {
            write!(out, "(lam ({}) ", binder_name(depth)).unwrap();
            write_term(out, body, depth + 1);
            out.push(')');
        }
        Term::App(f, a) => {
            out.push('(');
            write_term(out, f, depth);
            out.push(' ');
            write_term(out, a, depth);
            out.push(')');
        }
        Term::Inject(n, g) => {
            write!(out, "(inj {g} ").unwrap();
            write_term(out, n, depth);
            out.push(')');
        }
        Term::Project(n, h) => {
            write!(out, "(proj {h} ").unwrap();
            write_term(out, n, depth);
            out.push(')');
        }
        Term::Blame => out.push_str("blame"),
    }
}

/// Print an annotated term; closed terms round-trip through [`parse`].
pub fn print_ann(m: &AnnTerm) -> String {
    let mut out = String::new();
    write_ann(&mut out, m, 0);
    out
}

/// Display form of a core term.
pub fn print_term(m: &Term) -> String {
    let mut out = String::new();
    write_term(&mut out, m, 0);
    out
}
