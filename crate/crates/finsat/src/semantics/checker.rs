//! Accelerated evaluator for repeated queries against one fixed model.
//!
//! Agrees with [`FinModel::eval`] on every input. The speedups preserve
//! truth values:
//! - a subformula's truth depends only on its shape and the values of its
//!   free variables, so quantified subformulas are memoized under a
//!   shape-canonical hash plus those values;
//! - conjunctions and disjunctions evaluate their syntactically smaller
//!   side first;
//! - an existential search is restricted to candidates every witness must
//!   satisfy, read off conjuncts of the body: a binary atom on the bound
//!   variable, a two-element-set conjunct (any witness in an element slot
//!   is a member of the set), or an encoded ordered pair (any witness in a
//!   component slot lies two membership steps below the pair).

use super::{Env, FinModel, ModelError};
use crate::logic::{BinOp, Formula, Quantifier, Term};
use std::cell::RefCell;
use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

const MEMO_MAX_VARS: usize = 4;
const MEMO_MIN_SIZE: u32 = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum GuardKind {
    Row,
    Col,
    Members,
    TwoStep,
}

/// Candidate restriction for one existential quantifier. `container` is a
/// variable index relative to the quantifier node.
#[derive(Debug, Clone)]
struct Guard {
    kind: GuardKind,
    rel: String,
    container: usize,
}

#[derive(Debug)]
enum Kind {
    Falsum,
    Atom(String, Vec<Term>),
    Bin(BinOp, usize, usize),
    Quant(Quantifier, usize),
}

#[derive(Debug)]
struct Node {
    kind: Kind,
    size: u32,
    chash: u64,
    /// Free variables relative to this node, in first-occurrence order.
    fvs: Vec<usize>,
    guards: Vec<Guard>,
}

/// Evaluator bound to one model and one formula, reusable across
/// environments. Memoized results stay valid because they are keyed on
/// free-variable values.
pub struct ModelChecker<'m> {
    model: &'m FinModel,
    nodes: Vec<Node>,
    root: usize,
    memo: RefCell<HashMap<(u64, u128), bool>>,
    guard_cache: RefCell<HashMap<(GuardKind, String, usize), Vec<bool>>>,
}

impl<'m> ModelChecker<'m> {
    pub fn new(model: &'m FinModel, phi: &Formula) -> ModelChecker<'m> {
        let mut nodes = Vec::new();
        let root = build(&mut nodes, phi);
        for id in 0..nodes.len() {
            let mut h = DefaultHasher::new();
            let mut slots = Vec::new();
            canon(&nodes, id, 0, &mut slots, &mut h);
            h.write_u32(nodes[id].size);
            nodes[id].chash = h.finish();
            nodes[id].fvs = slots;
        }
        ModelChecker {
            model,
            nodes,
            root,
            memo: RefCell::new(HashMap::new()),
            guard_cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn eval(&self, env: &Env) -> Result<bool, ModelError> {
        self.eval_node(self.root, env, &mut Vec::new())
    }

    fn eval_node(
        &self,
        id: usize,
        env: &Env,
        scope: &mut Vec<usize>,
    ) -> Result<bool, ModelError> {
        match &self.nodes[id].kind {
            Kind::Falsum => Ok(false),
            Kind::Atom(p, args) => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.model.eval_term_scoped(env, scope, a)?);
                }
                self.model.relation_holds(p, &vals)
            }
            Kind::Bin(op, l, r) => match op {
                BinOp::Impl => {
                    if !self.eval_node(*l, env, scope)? {
                        Ok(true)
                    } else {
                        self.eval_node(*r, env, scope)
                    }
                }
                BinOp::And => {
                    let (a, b) = self.cheap_first(*l, *r);
                    if !self.eval_node(a, env, scope)? {
                        Ok(false)
                    } else {
                        self.eval_node(b, env, scope)
                    }
                }
                BinOp::Or => {
                    let (a, b) = self.cheap_first(*l, *r);
                    if self.eval_node(a, env, scope)? {
                        Ok(true)
                    } else {
                        self.eval_node(b, env, scope)
                    }
                }
            },
            Kind::Quant(q, body) => {
                let node = &self.nodes[id];
                let key = self.memo_key(node, env, scope)?;
                if let Some(k) = &key {
                    if let Some(v) = self.memo.borrow().get(k) {
                        return Ok(*v);
                    }
                }
                let result = self.eval_quant(*q, *body, &node.guards, env, scope)?;
                if let Some(k) = key {
                    self.memo.borrow_mut().insert(k, result);
                }
                Ok(result)
            }
        }
    }

    fn cheap_first(&self, l: usize, r: usize) -> (usize, usize) {
        if self.nodes[l].size <= self.nodes[r].size {
            (l, r)
        } else {
            (r, l)
        }
    }

    fn memo_key(
        &self,
        node: &Node,
        env: &Env,
        scope: &[usize],
    ) -> Result<Option<(u64, u128)>, ModelError> {
        if node.size < MEMO_MIN_SIZE || node.fvs.len() > MEMO_MAX_VARS {
            return Ok(None);
        }
        let mut packed: u128 = node.fvs.len() as u128;
        for &fv in &node.fvs {
            let v = self.model.lookup_var(env, scope, fv)?;
            packed = (packed << 31) | v as u128;
        }
        Ok(Some((node.chash, packed)))
    }

    fn eval_quant(
        &self,
        q: Quantifier,
        body: usize,
        guards: &[Guard],
        env: &Env,
        scope: &mut Vec<usize>,
    ) -> Result<bool, ModelError> {
        let k = self.model.size();
        let mut allowed: Option<Vec<bool>> = None;
        if q == Quantifier::Ex {
            for g in guards {
                if let Some(set) = self.guard_set(g, env, scope) {
                    allowed = Some(match allowed {
                        None => set,
                        Some(mut acc) => {
                            for (slot, s) in acc.iter_mut().zip(set.iter()) {
                                *slot = *slot && *s;
                            }
                            acc
                        }
                    });
                }
            }
        }
        for a in 0..k {
            if let Some(set) = &allowed {
                if !set[a] {
                    continue;
                }
            }
            scope.push(a);
            let holds = self.eval_node(body, env, scope);
            scope.pop();
            match (q, holds?) {
                (Quantifier::All, false) => return Ok(false),
                (Quantifier::Ex, true) => return Ok(true),
                _ => {}
            }
        }
        Ok(q == Quantifier::All)
    }

    fn guard_set(&self, g: &Guard, env: &Env, scope: &[usize]) -> Option<Vec<bool>> {
        let v = self.model.lookup_var(env, scope, g.container).ok()?;
        let cache_key = (g.kind, g.rel.clone(), v);
        if let Some(set) = self.guard_cache.borrow().get(&cache_key) {
            return Some(set.clone());
        }
        let (ar, table) = self.model.relation(&g.rel)?;
        if ar != 2 {
            return None;
        }
        let k = self.model.size();
        let set: Vec<bool> = match g.kind {
            GuardKind::Row | GuardKind::Members => (0..k).map(|a| table[a * k + v]).collect(),
            GuardKind::Col => (0..k).map(|a| table[v * k + a]).collect(),
            GuardKind::TwoStep => {
                let mut s = vec![false; k];
                for b in 0..k {
                    if table[b * k + v] {
                        for (a, slot) in s.iter_mut().enumerate() {
                            if table[a * k + b] {
                                *slot = true;
                            }
                        }
                    }
                }
                s
            }
        };
        self.guard_cache
            .borrow_mut()
            .insert(cache_key, set.clone());
        Some(set)
    }
}

fn term_size(t: &Term) -> u32 {
    match t {
        Term::Var(_) => 1,
        Term::App(_, args) => 1 + args.iter().map(term_size).sum::<u32>(),
    }
}

fn build(nodes: &mut Vec<Node>, f: &Formula) -> usize {
    let (kind, size, guards) = match f {
        Formula::Falsum => (Kind::Falsum, 1, Vec::new()),
        Formula::Atom(p, args) => (
            Kind::Atom(p.clone(), args.clone()),
            1 + args.iter().map(term_size).sum::<u32>(),
            Vec::new(),
        ),
        Formula::Bin(op, l, r) => {
            let li = build(nodes, l);
            let ri = build(nodes, r);
            (
                Kind::Bin(*op, li, ri),
                1 + nodes[li].size + nodes[ri].size,
                Vec::new(),
            )
        }
        Formula::Quant(q, b) => {
            let bi = build(nodes, b);
            let guards = if *q == Quantifier::Ex {
                ex_guards(b)
            } else {
                Vec::new()
            };
            (Kind::Quant(*q, bi), 1 + nodes[bi].size, guards)
        }
    };
    nodes.push(Node {
        kind,
        size,
        chash: 0,
        fvs: Vec::new(),
        guards,
    });
    nodes.len() - 1
}

/// Hashes the subtree at `id` with free variables renumbered by first
/// occurrence, so shape-identical subtrees collide on purpose.
fn canon(nodes: &[Node], id: usize, depth: usize, slots: &mut Vec<usize>, h: &mut DefaultHasher) {
    match &nodes[id].kind {
        Kind::Falsum => h.write_u8(0),
        Kind::Atom(p, args) => {
            h.write_u8(1);
            p.hash(h);
            h.write_usize(args.len());
            for a in args {
                canon_term(a, depth, slots, h);
            }
        }
        Kind::Bin(op, l, r) => {
            h.write_u8(2);
            h.write_u8(*op as u8);
            canon(nodes, *l, depth, slots, h);
            canon(nodes, *r, depth, slots, h);
        }
        Kind::Quant(q, b) => {
            h.write_u8(3);
            h.write_u8(*q as u8);
            canon(nodes, *b, depth + 1, slots, h);
        }
    }
}

fn canon_term(t: &Term, depth: usize, slots: &mut Vec<usize>, h: &mut DefaultHasher) {
    match t {
        Term::Var(n) => {
            if *n < depth {
                h.write_u8(4);
                h.write_usize(*n);
            } else {
                let fv = *n - depth;
                let slot = match slots.iter().position(|s| *s == fv) {
                    Some(p) => p,
                    None => {
                        slots.push(fv);
                        slots.len() - 1
                    }
                };
                h.write_u8(5);
                h.write_usize(slot);
            }
        }
        Term::App(f, args) => {
            h.write_u8(6);
            f.hash(h);
            h.write_usize(args.len());
            for a in args {
                canon_term(a, depth, slots, h);
            }
        }
    }
}

fn as_var(t: &Term) -> Option<usize> {
    match t {
        Term::Var(n) => Some(*n),
        _ => None,
    }
}

/// Binary atom on two plain variables: `(a, b, relation)`.
fn match_mem(f: &Formula) -> Option<(usize, usize, &str)> {
    if let Formula::Atom(r, args) = f {
        if args.len() == 2 {
            return Some((as_var(&args[0])?, as_var(&args[1])?, r.as_str()));
        }
    }
    None
}

/// Extensional equality shape: forall z, z in x iff z in y. Returns `(x, y,
/// relation)` relative to the node.
pub(crate) fn match_approx(f: &Formula) -> Option<(usize, usize, &str)> {
    let Formula::Quant(Quantifier::All, body) = f else {
        return None;
    };
    let Formula::Bin(BinOp::And, fwd, bwd) = &**body else {
        return None;
    };
    let Formula::Bin(BinOp::Impl, a1, a2) = &**fwd else {
        return None;
    };
    let Formula::Bin(BinOp::Impl, b1, b2) = &**bwd else {
        return None;
    };
    if a1 != b2 || a2 != b1 {
        return None;
    }
    let (z1, x, r1) = match_mem(a1)?;
    let (z2, y, r2) = match_mem(a2)?;
    if z1 != 0 || z2 != 0 || r1 != r2 || x == 0 || y == 0 {
        return None;
    }
    Some((x - 1, y - 1, r1))
}

/// Two-element-set shape: forall z, z in p iff (z ~ x or z ~ y). Returns
/// `(p, x, y, relation)` relative to the node.
pub(crate) fn match_is_pair(f: &Formula) -> Option<(usize, usize, usize, &str)> {
    let Formula::Quant(Quantifier::All, body) = f else {
        return None;
    };
    let Formula::Bin(BinOp::And, fwd, bwd) = &**body else {
        return None;
    };
    let Formula::Bin(BinOp::Impl, m1, o1) = &**fwd else {
        return None;
    };
    let Formula::Bin(BinOp::Impl, o2, m2) = &**bwd else {
        return None;
    };
    if m1 != m2 || o1 != o2 {
        return None;
    }
    let (z, p, rm) = match_mem(m1)?;
    if z != 0 || p == 0 {
        return None;
    }
    let Formula::Bin(BinOp::Or, e1, e2) = &**o1 else {
        return None;
    };
    let (za, x, ra) = match_approx(e1)?;
    let (zb, y, rb) = match_approx(e2)?;
    if za != 0 || zb != 0 || ra != rm || rb != rm || x == 0 || y == 0 {
        return None;
    }
    Some((p - 1, x - 1, y - 1, rm))
}

/// Encoded ordered pair shape: exists a b, a ~ {x,x} and b ~ {x,p} and
/// t ~ {a,b}. Returns `(t, x, p, relation)` relative to the node.
pub(crate) fn match_is_opair(f: &Formula) -> Option<(usize, usize, usize, &str)> {
    let Formula::Quant(Quantifier::Ex, b1) = f else {
        return None;
    };
    let Formula::Quant(Quantifier::Ex, b2) = &**b1 else {
        return None;
    };
    let Formula::Bin(BinOp::And, c1, rest) = &**b2 else {
        return None;
    };
    let Formula::Bin(BinOp::And, c2, c3) = &**rest else {
        return None;
    };
    let (pa, xa, ya, r1) = match_is_pair(c1)?;
    let (pb, xb, yb, r2) = match_is_pair(c2)?;
    let (pt, xt, yt, r3) = match_is_pair(c3)?;
    if pa != 1 || xa != ya || xa < 2 {
        return None;
    }
    if pb != 0 || xb != xa || yb < 2 {
        return None;
    }
    if pt < 2 || xt != 1 || yt != 0 {
        return None;
    }
    if r1 != r2 || r2 != r3 {
        return None;
    }
    Some((pt - 2, xa - 2, yb - 2, r1))
}

/// Collects candidate restrictions for the variable bound by an existential
/// quantifier with the given body. Walks conjunctions and nested
/// existentials; `off` tracks how many binders lie between the walk position
/// and the bound variable.
fn ex_guards(body: &Formula) -> Vec<Guard> {
    let mut out = Vec::new();
    let mut stack = vec![(0usize, body)];
    while let Some((off, f)) = stack.pop() {
        if let Some((a, b, rel)) = match_mem(f) {
            if a == off && b > off {
                out.push(Guard {
                    kind: GuardKind::Row,
                    rel: rel.to_string(),
                    container: b - off - 1,
                });
            } else if b == off && a > off {
                out.push(Guard {
                    kind: GuardKind::Col,
                    rel: rel.to_string(),
                    container: a - off - 1,
                });
            }
        }
        if let Some((p, x, y, rel)) = match_is_pair(f) {
            if (x == off || y == off) && p > off {
                out.push(Guard {
                    kind: GuardKind::Members,
                    rel: rel.to_string(),
                    container: p - off - 1,
                });
            }
        }
        if let Some((t, x, p, rel)) = match_is_opair(f) {
            if (x == off || p == off) && t > off {
                out.push(Guard {
                    kind: GuardKind::TwoStep,
                    rel: rel.to_string(),
                    container: t - off - 1,
                });
            }
        }
        match f {
            Formula::Bin(BinOp::And, l, r) => {
                stack.push((off, l));
                stack.push((off, r));
            }
            Formula::Quant(Quantifier::Ex, b) => stack.push((off + 1, b)),
            _ => {}
        }
    }
    out
}
