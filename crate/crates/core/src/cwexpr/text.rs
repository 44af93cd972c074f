//! `.cwe` text format: `(v i)`, `(oplus e e)`, `(eta i j e)`, `(rho i j e)`.
//! A `;` starts a comment that runs to the end of the line.

use super::{CwExpr, Node};
use crate::error::{Error, Result};

/// 1-based line and column of a node's opening parenthesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug)]
enum Tok<'a> {
    Open,
    Close,
    Atom(&'a str),
}

fn tokenize(text: &str) -> Vec<(Tok<'_>, Position)> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split(';').next().unwrap_or("");
        let bytes = line.as_bytes();
        let mut k = 0;
        while k < bytes.len() {
            let pos = Position {
                line: ln + 1,
                column: k + 1,
            };
            match bytes[k] {
                b'(' => {
                    out.push((Tok::Open, pos));
                    k += 1;
                }
                b')' => {
                    out.push((Tok::Close, pos));
                    k += 1;
                }
                c if c.is_ascii_whitespace() => k += 1,
                _ => {
                    let start = k;
                    while k < bytes.len()
                        && !bytes[k].is_ascii_whitespace()
                        && bytes[k] != b'('
                        && bytes[k] != b')'
                    {
                        k += 1;
                    }
                    out.push((Tok::Atom(&line[start..k]), pos));
                }
            }
        }
    }
    out
}

fn err<T>(pos: Position, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        line: pos.line,
        column: pos.column,
        message: message.into(),
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Op {
    V,
    Oplus,
    Eta,
    Rho,
}

impl Op {
    fn arity(self) -> (usize, usize) {
        match self {
            Op::V => (1, 0),
            Op::Oplus => (0, 2),
            Op::Eta | Op::Rho => (2, 1),
        }
    }
}

struct Frame {
    op: Op,
    pos: Position,
    ints: Vec<u32>,
    kids: Vec<usize>,
}

pub fn parse(text: &str) -> Result<CwExpr> {
    parse_with_positions(text).map(|(e, _)| e)
}

/// Parses and also returns the source position of every arena node.
pub fn parse_with_positions(text: &str) -> Result<(CwExpr, Vec<Position>)> {
    let toks = tokenize(text);
    let end = Position {
        line: text.lines().count().max(1),
        column: 1,
    };
    let mut nodes = Vec::new();
    let mut positions = Vec::new();
    let mut stack: Vec<Frame> = Vec::new();
    let mut root = None;
    let mut k = 0;
    while k < toks.len() {
        let (ref tok, pos) = toks[k];
        if root.is_some() {
            return err(pos, "trailing input after the expression");
        }
        match tok {
            Tok::Open => {
                let op = match toks.get(k + 1) {
                    Some((Tok::Atom("v"), _)) => Op::V,
                    Some((Tok::Atom("oplus"), _)) => Op::Oplus,
                    Some((Tok::Atom("eta"), _)) => Op::Eta,
                    Some((Tok::Atom("rho"), _)) => Op::Rho,
                    Some((Tok::Atom(a), p)) => return err(*p, format!("unknown operator {a:?}")),
                    Some((_, p)) => return err(*p, "expected an operator after '('"),
                    None => return err(pos, "unexpected end of input"),
                };
                if let Some(parent) = stack.last() {
                    if parent.ints.len() < parent.op.arity().0 {
                        return err(pos, "expected a label, found a subexpression");
                    }
                }
                stack.push(Frame {
                    op,
                    pos,
                    ints: Vec::new(),
                    kids: Vec::new(),
                });
                k += 2;
                continue;
            }
            Tok::Atom(a) => {
                let Some(top) = stack.last_mut() else {
                    return err(pos, format!("unexpected token {a:?} outside parentheses"));
                };
                if top.ints.len() >= top.op.arity().0 || !top.kids.is_empty() {
                    return err(pos, format!("unexpected label {a:?}"));
                }
                let l: u32 = match a.parse() {
                    Ok(l) if l >= 1 => l,
                    _ => return err(pos, format!("label {a:?} is not a positive integer")),
                };
                top.ints.push(l);
            }
            Tok::Close => {
                let Some(f) = stack.pop() else {
                    return err(pos, "unbalanced ')'");
                };
                let (ni, nk) = f.op.arity();
                if f.ints.len() != ni || f.kids.len() != nk {
                    return err(f.pos, format!("expected {ni} label(s) and {nk} subexpression(s)"));
                }
                let node = match f.op {
                    Op::V => Node::Intro(f.ints[0]),
                    Op::Oplus => Node::Union(f.kids[0], f.kids[1]),
                    Op::Eta | Op::Rho => {
                        let (i, j) = (f.ints[0], f.ints[1]);
                        if i == j {
                            return err(f.pos, format!("labels must differ, got {i} twice"));
                        }
                        if f.op == Op::Eta {
                            Node::Join(i, j, f.kids[0])
                        } else {
                            Node::Relabel(i, j, f.kids[0])
                        }
                    }
                };
                nodes.push(node);
                positions.push(f.pos);
                let id = nodes.len() - 1;
                match stack.last_mut() {
                    Some(parent) => {
                        if parent.kids.len() >= parent.op.arity().1 {
                            return err(f.pos, "too many subexpressions");
                        }
                        parent.kids.push(id);
                    }
                    None => root = Some(id),
                }
            }
        }
        k += 1;
    }
    if let Some(f) = stack.last() {
        return err(f.pos, "unclosed '('");
    }
    if root.is_none() {
        return err(end, "empty input");
    }
    Ok((CwExpr::from_nodes(nodes)?, positions))
}

pub fn serialize(e: &CwExpr) -> String {
    enum Item {
        Node(usize),
        Text(&'static str),
    }
    let mut out = String::new();
    let mut todo = vec![Item::Node(e.root())];
    while let Some(item) = todo.pop() {
        match item {
            Item::Text(t) => out.push_str(t),
            Item::Node(idx) => match e.nodes()[idx] {
                Node::Intro(l) => out.push_str(&format!("(v {l})")),
                Node::Union(a, b) => {
                    out.push_str("(oplus ");
                    todo.push(Item::Text(")"));
                    todo.push(Item::Node(b));
                    todo.push(Item::Text(" "));
                    todo.push(Item::Node(a));
                }
                Node::Join(i, j, c) | Node::Relabel(i, j, c) => {
                    let op = if matches!(e.nodes()[idx], Node::Join(..)) { "eta" } else { "rho" };
                    out.push_str(&format!("({op} {i} {j} "));
                    todo.push(Item::Text(")"));
                    todo.push(Item::Node(c));
                }
            },
        }
    }
    out
}
