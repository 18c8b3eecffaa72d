//! Separation logic over finite heaps, and a reduction from one-binary-relation
//! satisfiability into its minimal fragment.
//!
//! Heaps are finite functional maps from addresses to pairs of optional
//! addresses, stored as sorted cell lists. Formulas use de Bruijn variables;
//! a term is either a variable or the literal null address. The minimal
//! fragment keeps only the membership atom (`hooks`), falsum, the binary
//! connectives, and the quantifiers; [`encode_fsat_to_msl`] lands inside it,
//! and [`msl_to_sl`] embeds it back into the full language.
//!
//! Truth of quantified formulas is relative to a finite universe of values,
//! by default the null address plus every address mentioned by the heap or
//! the stack. For formulas in the image of [`encode_fsat_to_msl`] every
//! quantifier is guarded by a heap membership, so the default universe is
//! exact; for arbitrary formulas the evaluation is only as good as the
//! universe handed in. Separating implication is checked against candidate
//! heaps of bounded size and is flagged as bounded in the result.

use crate::logic::{BinOp, Formula, LogicError, Quantifier, Signature, Term, RESERVED_NAMES};
use crate::semantics::{tuple_index, Env, FinModel, ModelError};
use crate::toolkit::cantor_pair;
use thiserror::Error;

/// Relation name used by [`heap_to_model`].
pub const HEAP_RELATION: &str = "P";

/// Syntactic term: a de Bruijn variable or the null address literal.
pub type SlTerm = Option<usize>;

/// Semantic value: an address or the null address.
pub type SlValue = Option<usize>;

/// Errors from heap construction, evaluation, and the encodings.
#[derive(Debug, Error)]
pub enum SlError {
    #[error("heap maps address {addr} to two different pairs")]
    NonFunctionalHeap { addr: usize },
    #[error("separating implication needs a wand bound")]
    WandNeedsBound,
    #[error("formula leaves the minimal fragment")]
    NotMsl,
    #[error("formula has a free variable ({0}) but must be closed")]
    NotClosed(usize),
    #[error("expected a function-free signature with one binary relation")]
    NotBinarySignature,
    #[error("model must carry exactly one binary relation and no functions")]
    NotRelationalModel,
    #[error("heap has no empty cell to serve as a domain element")]
    NoEmptyCell,
    #[error("syntax error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Separation logic formulas. `Bin` and `Quant` reuse the first-order
/// connectives; negation is implication into [`SlFormula::Falsum`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SlFormula {
    /// The heap is exactly one cell at the first term's address.
    PointsTo(SlTerm, SlTerm, SlTerm),
    /// The heap contains a cell at the first term's address.
    Hooks(SlTerm, SlTerm, SlTerm),
    Emp,
    Star(Box<SlFormula>, Box<SlFormula>),
    Wand(Box<SlFormula>, Box<SlFormula>),
    Eq(SlTerm, SlTerm),
    Falsum,
    Bin(BinOp, Box<SlFormula>, Box<SlFormula>),
    Quant(Quantifier, Box<SlFormula>),
}

impl SlFormula {
    pub fn pointsto(t: SlTerm, a: SlTerm, b: SlTerm) -> SlFormula {
        SlFormula::PointsTo(t, a, b)
    }

    pub fn hooks(t: SlTerm, a: SlTerm, b: SlTerm) -> SlFormula {
        SlFormula::Hooks(t, a, b)
    }

    pub fn star(lhs: SlFormula, rhs: SlFormula) -> SlFormula {
        SlFormula::Star(Box::new(lhs), Box::new(rhs))
    }

    pub fn wand(lhs: SlFormula, rhs: SlFormula) -> SlFormula {
        SlFormula::Wand(Box::new(lhs), Box::new(rhs))
    }

    pub fn bin(op: BinOp, lhs: SlFormula, rhs: SlFormula) -> SlFormula {
        SlFormula::Bin(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn and(lhs: SlFormula, rhs: SlFormula) -> SlFormula {
        SlFormula::bin(BinOp::And, lhs, rhs)
    }

    pub fn or(lhs: SlFormula, rhs: SlFormula) -> SlFormula {
        SlFormula::bin(BinOp::Or, lhs, rhs)
    }

    pub fn implies(lhs: SlFormula, rhs: SlFormula) -> SlFormula {
        SlFormula::bin(BinOp::Impl, lhs, rhs)
    }

    pub fn neg(phi: SlFormula) -> SlFormula {
        SlFormula::implies(phi, SlFormula::Falsum)
    }

    /// `iff` is sugar for conjoined implications, as in the first-order syntax.
    pub fn iff(lhs: SlFormula, rhs: SlFormula) -> SlFormula {
        SlFormula::and(
            SlFormula::implies(lhs.clone(), rhs.clone()),
            SlFormula::implies(rhs, lhs),
        )
    }

    /// Truth as implication from falsum.
    pub fn top() -> SlFormula {
        SlFormula::implies(SlFormula::Falsum, SlFormula::Falsum)
    }

    pub fn forall(body: SlFormula) -> SlFormula {
        SlFormula::Quant(Quantifier::All, Box::new(body))
    }

    pub fn exists(body: SlFormula) -> SlFormula {
        SlFormula::Quant(Quantifier::Ex, Box::new(body))
    }

    /// True on the minimal fragment: hooks, falsum, connectives, quantifiers.
    pub fn is_msl(&self) -> bool {
        match self {
            SlFormula::Hooks(..) | SlFormula::Falsum => true,
            SlFormula::Bin(_, l, r) => l.is_msl() && r.is_msl(),
            SlFormula::Quant(_, body) => body.is_msl(),
            _ => false,
        }
    }

    /// Evaluates under the default universe with no wand bound.
    pub fn holds_in(&self, h: &Heap, s: &Stack) -> Result<bool, SlError> {
        eval_sl(h, s, self, None, None).map(|e| e.value)
    }
}

/// Finite functional heap, kept sorted by address with duplicates removed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Heap {
    cells: Vec<(usize, (SlValue, SlValue))>,
}

impl Heap {
    pub fn empty() -> Heap {
        Heap { cells: Vec::new() }
    }

    /// Sorts and deduplicates the cells. Two cells at one address with
    /// different contents are rejected.
    pub fn new(mut cells: Vec<(usize, (SlValue, SlValue))>) -> Result<Heap, SlError> {
        cells.sort();
        cells.dedup();
        for w in cells.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(SlError::NonFunctionalHeap { addr: w[0].0 });
            }
        }
        Ok(Heap { cells })
    }

    pub fn cells(&self) -> &[(usize, (SlValue, SlValue))] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains_address(&self, addr: usize) -> bool {
        self.cells.iter().any(|(a, _)| *a == addr)
    }

    /// Union of heaps with disjoint address sets.
    fn disjoint_union(&self, other: &Heap) -> Heap {
        let mut cells = Vec::with_capacity(self.cells.len() + other.cells.len());
        cells.extend_from_slice(&self.cells);
        cells.extend_from_slice(&other.cells);
        cells.sort();
        Heap { cells }
    }

    /// The sub-heap of cells selected by the bit mask.
    fn select(&self, mask: u128) -> Heap {
        let cells = self
            .cells
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> *i & 1 == 1)
            .map(|(_, c)| *c)
            .collect();
        Heap { cells }
    }
}

/// Stack of optional addresses: an explicit prefix and a default for every
/// variable past it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stack {
    prefix: Vec<SlValue>,
    default: SlValue,
}

impl Stack {
    pub fn new(prefix: Vec<SlValue>, default: SlValue) -> Stack {
        Stack { prefix, default }
    }

    pub fn constant(value: SlValue) -> Stack {
        Stack::new(Vec::new(), value)
    }

    pub fn lookup(&self, index: usize) -> SlValue {
        self.prefix.get(index).copied().unwrap_or(self.default)
    }

    pub fn prefix(&self) -> &[SlValue] {
        &self.prefix
    }

    pub fn default_value(&self) -> SlValue {
        self.default
    }

    /// Pushes a value for variable 0, shifting the rest up.
    pub fn push(&self, value: SlValue) -> Stack {
        let mut prefix = Vec::with_capacity(self.prefix.len() + 1);
        prefix.push(value);
        prefix.extend_from_slice(&self.prefix);
        Stack::new(prefix, self.default)
    }

    fn term(&self, t: &SlTerm) -> SlValue {
        match t {
            Some(x) => self.lookup(*x),
            None => None,
        }
    }
}

/// Evaluation result. `wand_bounded` records that some separating
/// implication was decided by the bounded candidate scan, so a `true`
/// verdict under it is not conclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlEval {
    pub value: bool,
    pub wand_bounded: bool,
}

/// The default quantifier universe: null, then every heap address, then
/// every address the stack prefix or default mentions.
pub fn default_universe(h: &Heap, s: &Stack) -> Vec<SlValue> {
    let mut universe = vec![None];
    let mut add = |v: SlValue| {
        if v.is_some() && !universe.contains(&v) {
            universe.push(v);
        }
    };
    for (a, _) in h.cells() {
        add(Some(*a));
    }
    for v in s.prefix() {
        add(*v);
    }
    add(s.default_value());
    universe
}

struct SlCtx<'a> {
    universe: &'a [SlValue],
    wand_bound: Option<usize>,
    wand_used: bool,
}

impl SlCtx<'_> {
    fn eval(&mut self, h: &Heap, s: &Stack, phi: &SlFormula) -> Result<bool, SlError> {
        match phi {
            SlFormula::PointsTo(t, a, b) => Ok(match s.term(t) {
                Some(addr) => h.cells() == [(addr, (s.term(a), s.term(b)))],
                None => false,
            }),
            SlFormula::Hooks(t, a, b) => Ok(match s.term(t) {
                Some(addr) => h.cells().contains(&(addr, (s.term(a), s.term(b)))),
                None => false,
            }),
            SlFormula::Emp => Ok(h.is_empty()),
            SlFormula::Star(lhs, rhs) => {
                for mask in 0..1u128 << h.len() {
                    let left = h.select(mask);
                    let right = h.select(!mask);
                    if self.eval(&left, s, lhs)? && self.eval(&right, s, rhs)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            SlFormula::Wand(lhs, rhs) => {
                let bound = self.wand_bound.ok_or(SlError::WandNeedsBound)?;
                self.wand_used = true;
                let addrs: Vec<usize> = self
                    .universe
                    .iter()
                    .filter_map(|v| *v)
                    .filter(|a| !h.contains_address(*a))
                    .collect();
                for candidate in bounded_heaps(&addrs, self.universe, bound) {
                    if self.eval(&candidate, s, lhs)? {
                        let joined = h.disjoint_union(&candidate);
                        if !self.eval(&joined, s, rhs)? {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            }
            SlFormula::Eq(a, b) => Ok(s.term(a) == s.term(b)),
            SlFormula::Falsum => Ok(false),
            SlFormula::Bin(op, lhs, rhs) => {
                let l = self.eval(h, s, lhs)?;
                let r = self.eval(h, s, rhs)?;
                Ok(match op {
                    BinOp::Impl => !l || r,
                    BinOp::And => l && r,
                    BinOp::Or => l || r,
                })
            }
            SlFormula::Quant(q, body) => {
                for v in self.universe {
                    let inner = s.push(*v);
                    let holds = self.eval(h, &inner, body)?;
                    match q {
                        Quantifier::All if !holds => return Ok(false),
                        Quantifier::Ex if holds => return Ok(true),
                        _ => {}
                    }
                }
                Ok(matches!(q, Quantifier::All))
            }
        }
    }
}

/// All functional heaps with at most `bound` cells whose addresses come from
/// `addrs` (assumed sorted and distinct) and whose cell contents come from
/// `values`.
fn bounded_heaps(addrs: &[usize], values: &[SlValue], bound: usize) -> Vec<Heap> {
    let mut out = vec![Heap::empty()];
    let mut cur = Vec::new();
    grow_heaps(addrs, values, bound, 0, &mut cur, &mut out);
    out
}

fn grow_heaps(
    addrs: &[usize],
    values: &[SlValue],
    bound: usize,
    start: usize,
    cur: &mut Vec<(usize, (SlValue, SlValue))>,
    out: &mut Vec<Heap>,
) {
    if cur.len() == bound {
        return;
    }
    for i in start..addrs.len() {
        for a in values {
            for b in values {
                cur.push((addrs[i], (*a, *b)));
                out.push(Heap { cells: cur.clone() });
                grow_heaps(addrs, values, bound, i + 1, cur, out);
                cur.pop();
            }
        }
    }
}

/// Evaluates `phi` on heap `h` under stack `s`.
///
/// Quantifiers range over `universe`, or over [`default_universe`] when
/// absent. The default is exact for formulas whose quantifiers are all
/// guarded by heap membership, which covers the image of
/// [`encode_fsat_to_msl`]. Separating conjunction tries all `2^|h|` splits.
/// Separating implication needs `wand_bound` and checks candidate extension
/// heaps with at most that many cells over the universe; the result is then
/// flagged as bounded.
pub fn eval_sl(
    h: &Heap,
    s: &Stack,
    phi: &SlFormula,
    universe: Option<&[SlValue]>,
    wand_bound: Option<usize>,
) -> Result<SlEval, SlError> {
    let default;
    let universe = match universe {
        Some(u) => u,
        None => {
            default = default_universe(h, s);
            &default
        }
    };
    let mut ctx = SlCtx {
        universe,
        wand_bound,
        wand_used: false,
    };
    let value = ctx.eval(h, s, phi)?;
    Ok(SlEval {
        value,
        wand_bounded: ctx.wand_used,
    })
}

fn single_binary_relation(sig: &Signature) -> Result<String, SlError> {
    if !sig.functions().is_empty() {
        return Err(SlError::NotBinarySignature);
    }
    match sig.relations() {
        [(name, 2)] => Ok(name.clone()),
        _ => Err(SlError::NotBinarySignature),
    }
}

/// Guarded translation into the minimal fragment, atom by atom.
///
/// `sig` must be function-free with exactly one binary relation. An atom
/// `P[x, y]` becomes a cell witness for the pair plus empty-cell guards on
/// both arguments; each quantifier is relativized to the empty-cell guard on
/// the variable it binds. Free variables stay free.
pub fn msl_translation(phi: &Formula, sig: &Signature) -> Result<SlFormula, SlError> {
    let rel = single_binary_relation(sig)?;
    sig.validate_formula(phi)?;
    translate(phi, &rel)
}

fn translate(phi: &Formula, rel: &str) -> Result<SlFormula, SlError> {
    match phi {
        Formula::Falsum => Ok(SlFormula::Falsum),
        Formula::Atom(name, args) => {
            if name != rel || args.len() != 2 {
                return Err(SlError::NotBinarySignature);
            }
            let (x, y) = match (&args[0], &args[1]) {
                (Term::Var(x), Term::Var(y)) => (*x, *y),
                _ => return Err(SlError::NotBinarySignature),
            };
            let pair = SlFormula::exists(SlFormula::hooks(Some(0), Some(x + 1), Some(y + 1)));
            let guards = SlFormula::and(
                SlFormula::hooks(Some(x), None, None),
                SlFormula::hooks(Some(y), None, None),
            );
            Ok(SlFormula::and(pair, guards))
        }
        Formula::Bin(op, lhs, rhs) => Ok(SlFormula::bin(
            *op,
            translate(lhs, rel)?,
            translate(rhs, rel)?,
        )),
        Formula::Quant(Quantifier::All, body) => Ok(SlFormula::forall(SlFormula::implies(
            SlFormula::hooks(Some(0), None, None),
            translate(body, rel)?,
        ))),
        Formula::Quant(Quantifier::Ex, body) => Ok(SlFormula::exists(SlFormula::and(
            SlFormula::hooks(Some(0), None, None),
            translate(body, rel)?,
        ))),
    }
}

/// Encodes satisfiability of a closed formula over one binary relation as
/// satisfiability in the minimal fragment.
///
/// The result conjoins a nonemptiness witness (some empty cell exists) with
/// the guarded translation, so its heap models are exactly the flattened
/// finite models of `phi`.
pub fn encode_fsat_to_msl(phi: &Formula, sig: &Signature) -> Result<SlFormula, SlError> {
    if let Some(v) = phi.max_free() {
        return Err(SlError::NotClosed(v));
    }
    let body = msl_translation(phi, sig)?;
    let nonempty = SlFormula::exists(SlFormula::hooks(Some(0), None, None));
    Ok(SlFormula::and(nonempty, body))
}

/// Flattens a model over one binary relation into a heap and a stack.
///
/// Element `d` becomes an empty cell at address `d`; each related pair
/// `(d, e)` becomes a cell above the domain block whose address is the pair
/// code of `(d, e)` shifted past the domain. The environment maps into the
/// domain cell addresses unchanged.
pub fn model_to_heap(m: &FinModel, env: &Env) -> Result<(Heap, Stack), SlError> {
    if m.function_names().next().is_some() {
        return Err(SlError::NotRelationalModel);
    }
    let mut names = m.relation_names();
    let rel = match (names.next(), names.next()) {
        (Some(name), None) => name.to_string(),
        _ => return Err(SlError::NotRelationalModel),
    };
    let k = m.size();
    let mut cells: Vec<(usize, (SlValue, SlValue))> = (0..k).map(|d| (d, (None, None))).collect();
    for d in 0..k {
        for e in 0..k {
            if m.relation_holds(&rel, &[d, e])? {
                cells.push((cantor_pair(d, e) + k, (Some(d), Some(e))));
            }
        }
    }
    let stack = Stack::new(
        env.prefix().iter().map(|v| Some(*v)).collect(),
        Some(env.default_value()),
    );
    Ok((Heap::new(cells)?, stack))
}

/// Reads a model over one binary relation back out of a heap.
///
/// The domain is the set of empty-cell addresses in address order; the
/// relation holds on `(i, j)` when some cell stores the pair of their
/// addresses. Stack values outside the domain fall back to element 0.
pub fn heap_to_model(h: &Heap, s: &Stack) -> Result<(FinModel, Env), SlError> {
    let domain: Vec<usize> = h
        .cells()
        .iter()
        .filter(|(_, p)| *p == (None, None))
        .map(|(a, _)| *a)
        .collect();
    if domain.is_empty() {
        return Err(SlError::NoEmptyCell);
    }
    let k = domain.len();
    let mut table = vec![false; k * k];
    for (i, ai) in domain.iter().enumerate() {
        for (j, aj) in domain.iter().enumerate() {
            let hit = h
                .cells()
                .iter()
                .any(|(_, p)| *p == (Some(*ai), Some(*aj)));
            table[tuple_index(k, &[i, j])] = hit;
        }
    }
    let mut m = FinModel::new(k)?;
    m.set_relation(HEAP_RELATION, 2, table)?;
    let back = |v: SlValue| match v {
        Some(a) => domain.iter().position(|d| *d == a).unwrap_or(0),
        None => 0,
    };
    let env = Env::new(
        s.prefix().iter().map(|v| back(*v)).collect(),
        back(s.default_value()),
    );
    Ok((m, env))
}

/// Embeds the minimal fragment into the full language: each membership atom
/// becomes a points-to cell separated from an unconstrained rest.
pub fn msl_to_sl(phi: &SlFormula) -> Result<SlFormula, SlError> {
    match phi {
        SlFormula::Hooks(t, a, b) => Ok(SlFormula::star(
            SlFormula::pointsto(*t, *a, *b),
            SlFormula::top(),
        )),
        SlFormula::Falsum => Ok(SlFormula::Falsum),
        SlFormula::Bin(op, lhs, rhs) => Ok(SlFormula::bin(*op, msl_to_sl(lhs)?, msl_to_sl(rhs)?)),
        SlFormula::Quant(q, body) => Ok(SlFormula::Quant(*q, Box::new(msl_to_sl(body)?))),
        _ => Err(SlError::NotMsl),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    LParen(usize),
    RParen(usize),
    Ident(usize, String),
}

fn lex(src: &str) -> Vec<Token> {
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
    out
}

struct SlParser {
    tokens: Vec<Token>,
    pos: usize,
    binders: Vec<String>,
    free_names: Vec<String>,
    src_len: usize,
}

impl SlParser {
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

    fn err(&self, pos: usize, msg: impl Into<String>) -> SlError {
        SlError::Parse {
            pos,
            msg: msg.into(),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), SlError> {
        match self.next() {
            Some(Token::RParen(_)) => Ok(()),
            Some(Token::LParen(p)) | Some(Token::Ident(p, _)) => Err(self.err(p, "expected `)`")),
            None => Err(self.err(self.src_len, "expected `)`, found end of input")),
        }
    }

    /// Bare identifiers resolve to `null`, then the innermost matching
    /// binder, then free names in first-appearance order offset past the
    /// binders in scope.
    fn parse_term(&mut self) -> Result<SlTerm, SlError> {
        match self.next() {
            Some(Token::Ident(_, name)) if name == "null" => Ok(None),
            Some(Token::Ident(pos, name)) => {
                if let Some(slot) = self.binders.iter().rev().position(|b| *b == name) {
                    return Ok(Some(slot));
                }
                if RESERVED_NAMES.contains(&name.as_str()) {
                    return Err(self.err(pos, format!("`{name}` cannot be a variable")));
                }
                let idx = match self.free_names.iter().position(|f| *f == name) {
                    Some(i) => i,
                    None => {
                        self.free_names.push(name);
                        self.free_names.len() - 1
                    }
                };
                Ok(Some(self.binders.len() + idx))
            }
            Some(Token::LParen(p)) | Some(Token::RParen(p)) => Err(self.err(p, "expected a term")),
            None => Err(self.err(self.src_len, "expected a term, found end of input")),
        }
    }

    fn parse_binder(&mut self, q: Quantifier) -> Result<SlFormula, SlError> {
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
        Ok(SlFormula::Quant(q, Box::new(body)))
    }

    fn parse_formula(&mut self) -> Result<SlFormula, SlError> {
        match self.next() {
            Some(Token::Ident(pos, name)) => match name.as_str() {
                "false" => Ok(SlFormula::Falsum),
                "emp" => Ok(SlFormula::Emp),
                _ => Err(self.err(pos, format!("expected a formula, found `{name}`"))),
            },
            Some(Token::LParen(pos)) => {
                let head = match self.next() {
                    Some(Token::Ident(_, n)) => n,
                    _ => return Err(self.err(pos, "expected a connective after `(`")),
                };
                match head.as_str() {
                    "and" | "or" | "->" | "iff" | "star" | "wand" => {
                        let lhs = self.parse_formula()?;
                        let rhs = self.parse_formula()?;
                        self.expect_rparen()?;
                        Ok(match head.as_str() {
                            "and" => SlFormula::and(lhs, rhs),
                            "or" => SlFormula::or(lhs, rhs),
                            "->" => SlFormula::implies(lhs, rhs),
                            "iff" => SlFormula::iff(lhs, rhs),
                            "star" => SlFormula::star(lhs, rhs),
                            _ => SlFormula::wand(lhs, rhs),
                        })
                    }
                    "forall" => self.parse_binder(Quantifier::All),
                    "exists" => self.parse_binder(Quantifier::Ex),
                    "eq" => {
                        let a = self.parse_term()?;
                        let b = self.parse_term()?;
                        self.expect_rparen()?;
                        Ok(SlFormula::Eq(a, b))
                    }
                    "pointsto" | "hooks" => {
                        let t = self.parse_term()?;
                        let a = self.parse_term()?;
                        let b = self.parse_term()?;
                        self.expect_rparen()?;
                        Ok(if head == "pointsto" {
                            SlFormula::pointsto(t, a, b)
                        } else {
                            SlFormula::hooks(t, a, b)
                        })
                    }
                    _ => Err(self.err(pos, format!("unknown form `{head}`"))),
                }
            }
            Some(Token::RParen(p)) => Err(self.err(p, "expected a formula")),
            None => Err(self.err(self.src_len, "expected a formula, found end of input")),
        }
    }
}

/// Parses an s-expression separation logic formula.
///
/// Grammar:
///
/// ```text
/// term    := "null" | ident
/// formula := "false" | "emp"
///          | "(" ("and"|"or"|"->"|"iff"|"star"|"wand") formula formula ")"
///          | "(" ("forall"|"exists") ident formula ")"
///          | "(" "eq" term term ")"
///          | "(" ("pointsto"|"hooks") term term term ")"
/// ```
///
/// Name resolution follows the first-order parser: binders shadow outer
/// names, and free names are numbered in order of first appearance, offset
/// past the binders in scope at each occurrence.
pub fn parse_sl(src: &str) -> Result<SlFormula, SlError> {
    let tokens = lex(src);
    let mut p = SlParser {
        tokens,
        pos: 0,
        binders: Vec::new(),
        free_names: Vec::new(),
        src_len: src.len(),
    };
    let phi = p.parse_formula()?;
    if let Some(t) = p.peek() {
        let pos = match t {
            Token::LParen(p) | Token::RParen(p) | Token::Ident(p, _) => *p,
        };
        return Err(SlError::Parse {
            pos,
            msg: "trailing input after formula".to_string(),
        });
    }
    Ok(phi)
}

fn print_term(t: &SlTerm, depth: usize, out: &mut String) {
    match t {
        None => out.push_str("null"),
        Some(n) if *n < depth => out.push_str(&format!("v{}", depth - 1 - n)),
        Some(n) => out.push_str(&format!("u{}", n - depth)),
    }
}

fn print_inner(phi: &SlFormula, depth: usize, out: &mut String) {
    match phi {
        SlFormula::Falsum => out.push_str("false"),
        SlFormula::Emp => out.push_str("emp"),
        SlFormula::PointsTo(t, a, b) | SlFormula::Hooks(t, a, b) => {
            out.push('(');
            out.push_str(if matches!(phi, SlFormula::PointsTo(..)) {
                "pointsto"
            } else {
                "hooks"
            });
            for part in [t, a, b] {
                out.push(' ');
                print_term(part, depth, out);
            }
            out.push(')');
        }
        SlFormula::Eq(a, b) => {
            out.push_str("(eq");
            for part in [a, b] {
                out.push(' ');
                print_term(part, depth, out);
            }
            out.push(')');
        }
        SlFormula::Star(l, r) | SlFormula::Wand(l, r) => {
            out.push('(');
            out.push_str(if matches!(phi, SlFormula::Star(..)) {
                "star"
            } else {
                "wand"
            });
            out.push(' ');
            print_inner(l, depth, out);
            out.push(' ');
            print_inner(r, depth, out);
            out.push(')');
        }
        SlFormula::Bin(op, l, r) => {
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
        SlFormula::Quant(q, body) => {
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

/// Renders a formula in the surface grammar, naming binders `v0, v1, ...`
/// by depth and free index `j` as `uj`, matching the first-order printer.
pub fn print_sl(phi: &SlFormula) -> String {
    let mut out = String::new();
    print_inner(phi, 0, &mut out);
    out
}
