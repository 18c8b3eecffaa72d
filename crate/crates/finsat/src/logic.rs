//! First-order syntax over finite signatures.
//!
//! Formulas are de Bruijn indexed: `Var(0)` is the variable bound by the
//! innermost enclosing quantifier, and indices past the binder depth are
//! free. Negation is not primitive; `neg(phi)` abbreviates `phi -> false`.
//! The surface syntax is s-expressions, see [`parse_formula`].

use std::collections::HashSet;
use std::fmt;
use thiserror::Error;

/// Names that the parser claims for syntax; symbols may not use them.
pub const RESERVED_NAMES: &[&str] = &[
    "false", "and", "or", "->", "iff", "forall", "exists", "emp", "star", "wand", "eq",
    "pointsto", "hooks", "null",
];

/// Errors from syntax construction, parsing, and printing.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum LogicError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown symbol `{name}`")]
    UnknownSymbol { name: String },
    #[error("arity mismatch for `{symbol}`: declared {expected}, used with {got}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        got: usize,
    },
    #[error("duplicate symbol `{name}` in signature")]
    DuplicateSymbol { name: String },
    #[error("`{name}` is reserved syntax and cannot be a symbol or variable")]
    ReservedName { name: String },
    #[error("shift by {delta} at cutoff {cutoff} would capture index {index}")]
    ShiftUnderflow {
        index: usize,
        cutoff: usize,
        delta: isize,
    },
}

/// Binary connectives. Everything else is sugar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    Impl,
    And,
    Or,
}

/// Quantifiers, binding one variable each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantifier {
    All,
    Ex,
}

/// Terms: variables by de Bruijn index, or function applications.
/// Constants are applications with an empty argument list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(usize),
    App(String, Vec<Term>),
}

/// Formulas over an ambient signature.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Falsum,
    Atom(String, Vec<Term>),
    Bin(BinOp, Box<Formula>, Box<Formula>),
    Quant(Quantifier, Box<Formula>),
}

impl Term {
    pub fn var(n: usize) -> Term {
        Term::Var(n)
    }

    pub fn app(name: impl Into<String>, args: Vec<Term>) -> Term {
        Term::App(name.into(), args)
    }

    /// A constant: nullary application.
    pub fn cnst(name: impl Into<String>) -> Term {
        Term::App(name.into(), Vec::new())
    }

    fn collect_free(&self, depth: usize, out: &mut Vec<usize>) {
        match self {
            Term::Var(n) => {
                if *n >= depth {
                    out.push(*n - depth);
                }
            }
            Term::App(_, args) => {
                for a in args {
                    a.collect_free(depth, out);
                }
            }
        }
    }

    fn shift_inner(&self, cutoff: usize, delta: isize) -> Result<Term, LogicError> {
        match self {
            Term::Var(n) => {
                if *n < cutoff {
                    Ok(Term::Var(*n))
                } else if delta >= 0 {
                    Ok(Term::Var(n + delta as usize))
                } else {
                    let d = (-delta) as usize;
                    if *n < cutoff + d {
                        Err(LogicError::ShiftUnderflow {
                            index: *n,
                            cutoff,
                            delta,
                        })
                    } else {
                        Ok(Term::Var(n - d))
                    }
                }
            }
            Term::App(f, args) => {
                let args = args
                    .iter()
                    .map(|a| a.shift_inner(cutoff, delta))
                    .collect::<Result<_, _>>()?;
                Ok(Term::App(f.clone(), args))
            }
        }
    }

    /// Adds `delta` to every variable index `>= cutoff`.
    pub fn shift(&self, cutoff: usize, delta: isize) -> Result<Term, LogicError> {
        self.shift_inner(cutoff, delta)
    }

    fn max_var(&self) -> Option<usize> {
        match self {
            Term::Var(n) => Some(*n),
            Term::App(_, args) => args.iter().filter_map(|a| a.max_var()).max(),
        }
    }
}

impl Formula {
    pub fn atom(name: impl Into<String>, args: Vec<Term>) -> Formula {
        Formula::Atom(name.into(), args)
    }

    pub fn bin(op: BinOp, lhs: Formula, rhs: Formula) -> Formula {
        Formula::Bin(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn and(lhs: Formula, rhs: Formula) -> Formula {
        Formula::bin(BinOp::And, lhs, rhs)
    }

    pub fn or(lhs: Formula, rhs: Formula) -> Formula {
        Formula::bin(BinOp::Or, lhs, rhs)
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Formula {
        Formula::bin(BinOp::Impl, lhs, rhs)
    }

    /// `neg(phi)` is `phi -> false`.
    pub fn neg(phi: Formula) -> Formula {
        Formula::implies(phi, Formula::Falsum)
    }

    /// `iff(a, b)` expands to `(a -> b) and (b -> a)`.
    pub fn iff(lhs: Formula, rhs: Formula) -> Formula {
        Formula::and(
            Formula::implies(lhs.clone(), rhs.clone()),
            Formula::implies(rhs, lhs),
        )
    }

    pub fn forall(body: Formula) -> Formula {
        Formula::Quant(Quantifier::All, Box::new(body))
    }

    pub fn exists(body: Formula) -> Formula {
        Formula::Quant(Quantifier::Ex, Box::new(body))
    }

    /// Conjunction of a list; empty list is the true formula `false -> false`.
    pub fn conj(mut parts: Vec<Formula>) -> Formula {
        match parts.len() {
            0 => Formula::neg(Formula::Falsum),
            _ => {
                let mut acc = parts.pop().unwrap();
                while let Some(p) = parts.pop() {
                    acc = Formula::and(p, acc);
                }
                acc
            }
        }
    }

    /// Disjunction of a list; empty list is `false`.
    pub fn disj(mut parts: Vec<Formula>) -> Formula {
        match parts.len() {
            0 => Formula::Falsum,
            _ => {
                let mut acc = parts.pop().unwrap();
                while let Some(p) = parts.pop() {
                    acc = Formula::or(p, acc);
                }
                acc
            }
        }
    }

    fn collect_free(&self, depth: usize, out: &mut Vec<usize>) {
        match self {
            Formula::Falsum => {}
            Formula::Atom(_, args) => {
                for a in args {
                    a.collect_free(depth, out);
                }
            }
            Formula::Bin(_, l, r) => {
                l.collect_free(depth, out);
                r.collect_free(depth, out);
            }
            Formula::Quant(_, body) => body.collect_free(depth + 1, out),
        }
    }

    /// Free variable indices, sorted and deduplicated.
    pub fn free_vars(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_free(0, &mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    /// First free index above every free variable: `1 + max(free_vars)`, or 0.
    pub fn fresh_free(&self) -> usize {
        self.free_vars().last().map_or(0, |m| m + 1)
    }

    /// Function and relation names occurring in the formula, in order of
    /// first occurrence.
    pub fn symbols(&self) -> (Vec<String>, Vec<String>) {
        fn walk_term(t: &Term, funs: &mut Vec<String>, seen: &mut HashSet<String>) {
            if let Term::App(f, args) = t {
                if seen.insert(f.clone()) {
                    funs.push(f.clone());
                }
                for a in args {
                    walk_term(a, funs, seen);
                }
            }
        }
        fn walk(
            phi: &Formula,
            funs: &mut Vec<String>,
            rels: &mut Vec<String>,
            seen_f: &mut HashSet<String>,
            seen_r: &mut HashSet<String>,
        ) {
            match phi {
                Formula::Falsum => {}
                Formula::Atom(p, args) => {
                    if seen_r.insert(p.clone()) {
                        rels.push(p.clone());
                    }
                    for a in args {
                        walk_term(a, funs, seen_f);
                    }
                }
                Formula::Bin(_, l, r) => {
                    walk(l, funs, rels, seen_f, seen_r);
                    walk(r, funs, rels, seen_f, seen_r);
                }
                Formula::Quant(_, body) => walk(body, funs, rels, seen_f, seen_r),
            }
        }
        let mut funs = Vec::new();
        let mut rels = Vec::new();
        walk(
            self,
            &mut funs,
            &mut rels,
            &mut HashSet::new(),
            &mut HashSet::new(),
        );
        (funs, rels)
    }

    /// Adds `delta` to every variable index `>= cutoff`; the cutoff grows
    /// under binders. A negative `delta` errors if it would cross the cutoff.
    pub fn shift(&self, cutoff: usize, delta: isize) -> Result<Formula, LogicError> {
        match self {
            Formula::Falsum => Ok(Formula::Falsum),
            Formula::Atom(p, args) => {
                let args = args
                    .iter()
                    .map(|a| a.shift_inner(cutoff, delta))
                    .collect::<Result<_, _>>()?;
                Ok(Formula::Atom(p.clone(), args))
            }
            Formula::Bin(op, l, r) => Ok(Formula::bin(
                *op,
                l.shift(cutoff, delta)?,
                r.shift(cutoff, delta)?,
            )),
            Formula::Quant(q, body) => Ok(Formula::Quant(
                *q,
                Box::new(body.shift(cutoff + 1, delta)?),
            )),
        }
    }

    /// Number of syntax nodes; used as a crude evaluation-cost estimate.
    pub fn size(&self) -> usize {
        match self {
            Formula::Falsum => 1,
            Formula::Atom(_, _) => 1,
            Formula::Bin(_, l, r) => 1 + l.size() + r.size(),
            Formula::Quant(_, body) => 1 + body.size(),
        }
    }

    /// Maximum quantifier nesting.
    pub fn quant_depth(&self) -> usize {
        match self {
            Formula::Falsum | Formula::Atom(_, _) => 0,
            Formula::Bin(_, l, r) => l.quant_depth().max(r.quant_depth()),
            Formula::Quant(_, body) => 1 + body.quant_depth(),
        }
    }

    fn max_var(&self, depth: usize) -> Option<usize> {
        match self {
            Formula::Falsum => None,
            Formula::Atom(_, args) => args
                .iter()
                .filter_map(|a| a.max_var())
                .max()
                .and_then(|m| m.checked_sub(depth)),
            Formula::Bin(_, l, r) => l.max_var(depth).max(r.max_var(depth)),
            Formula::Quant(_, body) => body.max_var(depth + 1),
        }
    }

    /// Maximum free index, if any variable is free.
    pub fn max_free(&self) -> Option<usize> {
        self.max_var(0)
    }
}

/// A finite signature: function symbols and relation symbols with arities.
///
/// Names are unique across both namespaces and may not be reserved syntax.
/// Declaration order is significant: witness enumeration and canonical
/// renamings follow it.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Signature {
    functions: Vec<(String, usize)>,
    relations: Vec<(String, usize)>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    /// Builds a signature from `(name, arity)` lists.
    pub fn make(
        functions: &[(&str, usize)],
        relations: &[(&str, usize)],
    ) -> Result<Signature, LogicError> {
        let mut sig = Signature::new();
        for (f, a) in functions {
            sig.add_function(f, *a)?;
        }
        for (r, a) in relations {
            sig.add_relation(r, *a)?;
        }
        Ok(sig)
    }

    fn check_name(&self, name: &str) -> Result<(), LogicError> {
        if name.is_empty() || RESERVED_NAMES.contains(&name) {
            return Err(LogicError::ReservedName {
                name: name.to_string(),
            });
        }
        if self.function_arity(name).is_some() || self.relation_arity(name).is_some() {
            return Err(LogicError::DuplicateSymbol {
                name: name.to_string(),
            });
        }
        Ok(())
    }

    pub fn add_function(&mut self, name: &str, arity: usize) -> Result<(), LogicError> {
        self.check_name(name)?;
        self.functions.push((name.to_string(), arity));
        Ok(())
    }

    pub fn add_relation(&mut self, name: &str, arity: usize) -> Result<(), LogicError> {
        self.check_name(name)?;
        self.relations.push((name.to_string(), arity));
        Ok(())
    }

    pub fn functions(&self) -> &[(String, usize)] {
        &self.functions
    }

    pub fn relations(&self) -> &[(String, usize)] {
        &self.relations
    }

    pub fn function_arity(&self, name: &str) -> Option<usize> {
        self.functions
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, a)| *a)
    }

    pub fn relation_arity(&self, name: &str) -> Option<usize> {
        self.relations
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, a)| *a)
    }

    pub fn max_relation_arity(&self) -> Option<usize> {
        self.relations.iter().map(|(_, a)| *a).max()
    }

    pub fn max_function_arity(&self) -> Option<usize> {
        self.functions.iter().map(|(_, a)| *a).max()
    }

    fn validate_term(&self, t: &Term) -> Result<(), LogicError> {
        match t {
            Term::Var(_) => Ok(()),
            Term::App(f, args) => {
                let arity = self
                    .function_arity(f)
                    .ok_or_else(|| LogicError::UnknownSymbol { name: f.clone() })?;
                if arity != args.len() {
                    return Err(LogicError::ArityMismatch {
                        symbol: f.clone(),
                        expected: arity,
                        got: args.len(),
                    });
                }
                for a in args {
                    self.validate_term(a)?;
                }
                Ok(())
            }
        }
    }

    /// Checks that every symbol in `phi` is declared with the right arity.
    pub fn validate_formula(&self, phi: &Formula) -> Result<(), LogicError> {
        match phi {
            Formula::Falsum => Ok(()),
            Formula::Atom(p, args) => {
                let arity = self
                    .relation_arity(p)
                    .ok_or_else(|| LogicError::UnknownSymbol { name: p.clone() })?;
                if arity != args.len() {
                    return Err(LogicError::ArityMismatch {
                        symbol: p.clone(),
                        expected: arity,
                        got: args.len(),
                    });
                }
                for a in args {
                    self.validate_term(a)?;
                }
                Ok(())
            }
            Formula::Bin(_, l, r) => {
                self.validate_formula(l)?;
                self.validate_formula(r)
            }
            Formula::Quant(_, body) => self.validate_formula(body),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    LParen(usize),
    RParen(usize),
    Ident(usize, String),
}

fn lex(src: &str) -> Result<Vec<Token>, LogicError> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c == '(' {
            out.push(Token::LParen(i));
            i += 1;
        } else if c == ')' {
            out.push(Token::RParen(i));
            i += 1;
        } else {
            let start = i;
            while i < bytes.len() {
                let c = bytes[i] as char;
                if c.is_whitespace() || c == '(' || c == ')' {
                    break;
                }
                i += 1;
            }
            out.push(Token::Ident(start, src[start..i].to_string()));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    sig: &'a Signature,
    binders: Vec<String>,
    free_names: Vec<String>,
    src_len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, pos: usize, msg: impl Into<String>) -> LogicError {
        LogicError::Syntax {
            pos,
            msg: msg.into(),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), LogicError> {
        match self.next() {
            Some(Token::RParen(_)) => Ok(()),
            Some(Token::LParen(p)) | Some(Token::Ident(p, _)) => {
                Err(self.err(p, "expected `)`"))
            }
            None => Err(self.err(self.src_len, "expected `)`, found end of input")),
        }
    }

    /// Resolves a bare identifier in term position: innermost binder first,
    /// then nullary function symbols, then free names in first-appearance
    /// order offset past the current binder depth.
    fn resolve_ident(&mut self, pos: usize, name: &str) -> Result<Term, LogicError> {
        if let Some(slot) = self.binders.iter().rev().position(|b| b == name) {
            return Ok(Term::Var(slot));
        }
        if let Some(arity) = self.sig.function_arity(name) {
            if arity == 0 {
                return Ok(Term::cnst(name));
            }
            return Err(LogicError::ArityMismatch {
                symbol: name.to_string(),
                expected: arity,
                got: 0,
            });
        }
        if RESERVED_NAMES.contains(&name) {
            return Err(self.err(pos, format!("`{name}` cannot be a variable")));
        }
        let idx = match self.free_names.iter().position(|f| f == name) {
            Some(i) => i,
            None => {
                self.free_names.push(name.to_string());
                self.free_names.len() - 1
            }
        };
        Ok(Term::Var(self.binders.len() + idx))
    }

    fn parse_term(&mut self) -> Result<Term, LogicError> {
        match self.next() {
            Some(Token::Ident(pos, name)) => self.resolve_ident(pos, &name),
            Some(Token::LParen(pos)) => {
                let (hpos, head) = match self.next() {
                    Some(Token::Ident(p, n)) => (p, n),
                    _ => return Err(self.err(pos, "expected a function symbol after `(`")),
                };
                let arity = self
                    .sig
                    .function_arity(&head)
                    .ok_or(LogicError::UnknownSymbol { name: head.clone() })?;
                let mut args = Vec::new();
                while !matches!(self.peek(), Some(Token::RParen(_)) | None) {
                    args.push(self.parse_term()?);
                }
                self.expect_rparen()?;
                if args.len() != arity {
                    return Err(LogicError::ArityMismatch {
                        symbol: head,
                        expected: arity,
                        got: args.len(),
                    });
                }
                let _ = hpos;
                Ok(Term::App(head, args))
            }
            Some(Token::RParen(p)) => Err(self.err(p, "expected a term")),
            None => Err(self.err(self.src_len, "expected a term, found end of input")),
        }
    }

    fn parse_binder(&mut self, q: Quantifier) -> Result<Formula, LogicError> {
        let name = match self.next() {
            Some(Token::Ident(pos, n)) => {
                if RESERVED_NAMES.contains(&n.as_str()) {
                    return Err(self.err(pos, format!("`{n}` cannot be a binder name")));
                }
                n
            }
            Some(Token::LParen(p)) | Some(Token::RParen(p)) => {
                return Err(self.err(p, "expected a binder name"))
            }
            None => return Err(self.err(self.src_len, "expected a binder name")),
        };
        self.binders.push(name);
        let body = self.parse_formula();
        self.binders.pop();
        let body = body?;
        self.expect_rparen()?;
        Ok(Formula::Quant(q, Box::new(body)))
    }

    fn parse_formula(&mut self) -> Result<Formula, LogicError> {
        match self.next() {
            Some(Token::Ident(pos, name)) => {
                if name == "false" {
                    Ok(Formula::Falsum)
                } else {
                    Err(self.err(pos, format!("expected a formula, found `{name}`")))
                }
            }
            Some(Token::LParen(pos)) => {
                let (hpos, head) = match self.next() {
                    Some(Token::Ident(p, n)) => (p, n),
                    _ => return Err(self.err(pos, "expected a connective or relation symbol")),
                };
                match head.as_str() {
                    "and" | "or" | "->" | "iff" => {
                        let lhs = self.parse_formula()?;
                        let rhs = self.parse_formula()?;
                        self.expect_rparen()?;
                        Ok(match head.as_str() {
                            "and" => Formula::and(lhs, rhs),
                            "or" => Formula::or(lhs, rhs),
                            "->" => Formula::implies(lhs, rhs),
                            _ => Formula::iff(lhs, rhs),
                        })
                    }
                    "forall" => self.parse_binder(Quantifier::All),
                    "exists" => self.parse_binder(Quantifier::Ex),
                    _ => {
                        let arity = self
                            .sig
                            .relation_arity(&head)
                            .ok_or(LogicError::UnknownSymbol { name: head.clone() })?;
                        let mut args = Vec::new();
                        while !matches!(self.peek(), Some(Token::RParen(_)) | None) {
                            args.push(self.parse_term()?);
                        }
                        self.expect_rparen()?;
                        if args.len() != arity {
                            return Err(LogicError::ArityMismatch {
                                symbol: head,
                                expected: arity,
                                got: args.len(),
                            });
                        }
                        let _ = hpos;
                        Ok(Formula::Atom(head, args))
                    }
                }
            }
            Some(Token::RParen(p)) => Err(self.err(p, "expected a formula")),
            None => Err(self.err(self.src_len, "expected a formula, found end of input")),
        }
    }
}

/// Parses an s-expression formula over `sig`.
///
/// Grammar:
///
/// ```text
/// term    := ident | "(" fident term* ")"
/// formula := "false"
///          | "(" rident term* ")"
///          | "(" ("and"|"or"|"->"|"iff") formula formula ")"
///          | "(" ("forall"|"exists") ident formula ")"
/// ```
///
/// `iff` is expanded into conjoined implications at parse time. Bare
/// identifiers resolve to the innermost matching binder, then to nullary
/// function symbols, then to free variables. Free names are numbered in
/// order of first appearance and offset past the binders in scope at each
/// occurrence.
pub fn parse_formula(src: &str, sig: &Signature) -> Result<Formula, LogicError> {
    let tokens = lex(src)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        sig,
        binders: Vec::new(),
        free_names: Vec::new(),
        src_len: src.len(),
    };
    let phi = p.parse_formula()?;
    if let Some(t) = p.peek() {
        let pos = match t {
            Token::LParen(p) | Token::RParen(p) | Token::Ident(p, _) => *p,
        };
        return Err(LogicError::Syntax {
            pos,
            msg: "trailing input after formula".to_string(),
        });
    }
    Ok(phi)
}

fn print_term(t: &Term, depth: usize, out: &mut String) {
    match t {
        Term::Var(n) => {
            if *n < depth {
                out.push_str(&format!("v{}", depth - 1 - n));
            } else {
                out.push_str(&format!("u{}", n - depth));
            }
        }
        Term::App(f, args) => {
            out.push('(');
            out.push_str(f);
            for a in args {
                out.push(' ');
                print_term(a, depth, out);
            }
            out.push(')');
        }
    }
}

fn print_inner(phi: &Formula, depth: usize, out: &mut String) {
    match phi {
        Formula::Falsum => out.push_str("false"),
        Formula::Atom(p, args) => {
            out.push('(');
            out.push_str(p);
            for a in args {
                out.push(' ');
                print_term(a, depth, out);
            }
            out.push(')');
        }
        Formula::Bin(op, l, r) => {
            out.push('(');
            out.push_str(match op {
                BinOp::And => "and",
                BinOp::Or => "or",
                BinOp::Impl => "->",
            });
            out.push(' ');
            print_inner(l, depth, out);
            out.push(' ');
            print_inner(r, depth, out);
            out.push(')');
        }
        Formula::Quant(q, body) => {
            out.push('(');
            out.push_str(match q {
                Quantifier::All => "forall",
                Quantifier::Ex => "exists",
            });
            out.push_str(&format!(" v{} ", depth));
            print_inner(body, depth + 1, out);
            out.push(')');
        }
    }
}

/// Renders a formula in the surface grammar. Binders are named `v0, v1, ...`
/// by depth and free index `j` prints as `uj`, so `parse_formula` recovers
/// the exact tree whenever the free indices of `phi` first occur in
/// increasing order (every parser output and every closed formula qualifies).
pub fn print_formula(phi: &Formula) -> String {
    let mut out = String::new();
    print_inner(phi, 0, &mut out);
    out
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig_pf() -> Signature {
        Signature::make(&[("f", 1)], &[("P", 2)]).unwrap()
    }

    #[test]
    fn free_vars_sees_past_binders() {
        // forall P(#0, #3) has exactly the free index 2.
        let phi = Formula::forall(Formula::atom("P", vec![Term::var(0), Term::var(3)]));
        assert_eq!(phi.free_vars(), vec![2]);
    }

    #[test]
    fn parse_assigns_free_names_by_first_appearance() {
        let sig = sig_pf();
        let phi = parse_formula("(forall x (exists y (-> (P x u) (P y v))))", &sig).unwrap();
        let expected = Formula::forall(Formula::exists(Formula::implies(
            Formula::atom("P", vec![Term::var(1), Term::var(2)]),
            Formula::atom("P", vec![Term::var(0), Term::var(3)]),
        )));
        assert_eq!(phi, expected);
    }

    #[test]
    fn parse_rejects_unknown_and_arity_errors_distinctly() {
        let sig = sig_pf();
        assert!(matches!(
            parse_formula("(Q x)", &sig),
            Err(LogicError::UnknownSymbol { .. })
        ));
        assert!(matches!(
            parse_formula("(P x)", &sig),
            Err(LogicError::ArityMismatch { .. })
        ));
        assert!(matches!(
            parse_formula("(P x y", &sig),
            Err(LogicError::Syntax { .. })
        ));
    }

    #[test]
    fn parse_shadowing_picks_innermost_binder() {
        let sig = sig_pf();
        let phi = parse_formula("(forall x (forall x (P x (f x))))", &sig).unwrap();
        let expected = Formula::forall(Formula::forall(Formula::atom(
            "P",
            vec![Term::var(0), Term::app("f", vec![Term::var(0)])],
        )));
        assert_eq!(phi, expected);
    }

    #[test]
    fn constants_parse_bare_and_parenthesized() {
        let sig = Signature::make(&[("c", 0)], &[("P", 1)]).unwrap();
        let a = parse_formula("(P c)", &sig).unwrap();
        let b = parse_formula("(P (c))", &sig).unwrap();
        let expected = Formula::atom("P", vec![Term::cnst("c")]);
        assert_eq!(a, expected);
        assert_eq!(b, expected);
    }

    #[test]
    fn iff_expands_at_parse_time() {
        let sig = Signature::make(&[], &[("A", 0), ("B", 0)]).unwrap();
        let phi = parse_formula("(iff (A) (B))", &sig).unwrap();
        let a = Formula::atom("A", vec![]);
        let b = Formula::atom("B", vec![]);
        assert_eq!(phi, Formula::iff(a, b));
    }

    #[test]
    fn shift_moves_only_cutoff_and_above() {
        let phi = Formula::forall(Formula::atom("P", vec![Term::var(0), Term::var(2)]));
        let shifted = phi.shift(0, 2).unwrap();
        assert_eq!(
            shifted,
            Formula::forall(Formula::atom("P", vec![Term::var(0), Term::var(4)]))
        );
        let back = shifted.shift(0, -2).unwrap();
        assert_eq!(back, phi);
    }

    #[test]
    fn negative_shift_refuses_to_cross_cutoff() {
        let phi = Formula::atom("P", vec![Term::var(0), Term::var(5)]);
        assert!(matches!(
            phi.shift(0, -1),
            Err(LogicError::ShiftUnderflow { index: 0, .. })
        ));
    }

    #[test]
    fn symbols_in_first_occurrence_order() {
        let sig = Signature::make(&[("f", 1), ("g", 1)], &[("P", 2), ("Q", 1)]).unwrap();
        let phi = parse_formula("(and (Q (g x)) (P (f x) y))", &sig).unwrap();
        let (funs, rels) = phi.symbols();
        assert_eq!(funs, vec!["g".to_string(), "f".to_string()]);
        assert_eq!(rels, vec!["Q".to_string(), "P".to_string()]);
    }

    #[test]
    fn signature_rejects_duplicates_and_reserved() {
        let mut sig = Signature::new();
        sig.add_function("f", 1).unwrap();
        assert!(matches!(
            sig.add_relation("f", 2),
            Err(LogicError::DuplicateSymbol { .. })
        ));
        assert!(matches!(
            sig.add_relation("and", 2),
            Err(LogicError::ReservedName { .. })
        ));
    }

    #[test]
    fn print_then_parse_is_identity_on_parser_output() {
        let sig = sig_pf();
        for src in [
            "(forall x (exists y (-> (P x u) (P y v))))",
            "(or (P a b) (and false (exists z (P z (f z)))))",
            "(-> (P x x) (P (f (f x)) y))",
        ] {
            let phi = parse_formula(src, &sig).unwrap();
            let printed = print_formula(&phi);
            let reparsed = parse_formula(&printed, &sig).unwrap();
            assert_eq!(reparsed, phi, "round trip failed for {src}");
        }
    }
}
