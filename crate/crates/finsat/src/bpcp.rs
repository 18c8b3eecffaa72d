//! Bounded Post correspondence: instances, the derivability decider, bounded
//! solving, the axiomatisation over a fixed signature, intended models, and
//! solution extraction from arbitrary models of the axioms.

use std::collections::HashMap;

use thiserror::Error;

use crate::logic::{Formula, Signature, Term};
use crate::semantics::{Env, FinModel, ModelChecker, ModelError};

/// Constant naming the overflow value for strings past the length bound.
pub const UNDEF: &str = "undef";
/// Constant naming the empty string.
pub const NIL: &str = "e";
/// Unary function prepending a true bit.
pub const CONS_TT: &str = "f_tt";
/// Unary function prepending a false bit.
pub const CONS_FF: &str = "f_ff";
/// Binary relation interpreted as derivability of pairs.
pub const DERIVES: &str = "P";
/// Binary relation interpreted as the strict suffix order.
pub const SUFFIX: &str = "prec";
/// Binary relation interpreted as equality.
pub const EQUALITY: &str = "equiv";

/// A bit string; `true` prints as `1`.
pub type Bits = Vec<bool>;

#[derive(Debug, Error)]
pub enum BpcpError {
    #[error("character {0:?} is not a 0/1 bit")]
    BadBit(char),
    #[error("model does not interpret {name}")]
    MissingSymbol { name: String },
    #[error("model interprets {name} with arity {got}, expected {expected}")]
    SymbolArity {
        name: String,
        got: usize,
        expected: usize,
    },
    #[error("equality relation is not the diagonal")]
    EqualityNotDiagonal,
    #[error("model does not satisfy the encoding")]
    NotAModel,
    #[error("pair decomposition exceeded its depth bound")]
    FuelExhausted,
    #[error("no card decomposition matches the tables")]
    ExtractionStuck,
    #[error("extracted pair is not a solution")]
    InvalidSolution,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A correspondence instance: a finite set of cards, each a pair of bit
/// strings. Card order and duplicates do not affect semantics; duplicates
/// are dropped on construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BpcpInstance {
    cards: Vec<(Bits, Bits)>,
}

impl BpcpInstance {
    pub fn new(cards: Vec<(Bits, Bits)>) -> BpcpInstance {
        let mut kept: Vec<(Bits, Bits)> = Vec::new();
        for c in cards {
            if !kept.contains(&c) {
                kept.push(c);
            }
        }
        BpcpInstance { cards: kept }
    }

    /// Builds an instance from `0`/`1` strings.
    pub fn from_strings(pairs: &[(&str, &str)]) -> Result<BpcpInstance, BpcpError> {
        let mut cards = Vec::new();
        for (s, t) in pairs {
            cards.push((bits_from_string(s)?, bits_from_string(t)?));
        }
        Ok(BpcpInstance::new(cards))
    }

    pub fn cards(&self) -> &[(Bits, Bits)] {
        &self.cards
    }
}

pub fn bits_from_string(s: &str) -> Result<Bits, BpcpError> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(BpcpError::BadBit(other)),
        })
        .collect()
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// The signature the encoding lives over: two constants, one cons function
/// per bit, and relations for derivability, strict suffix, and equality.
pub fn sig_bpcp() -> Signature {
    Signature::make(
        &[(UNDEF, 0), (NIL, 0), (CONS_TT, 1), (CONS_FF, 1)],
        &[(DERIVES, 2), (SUFFIX, 2), (EQUALITY, 2)],
    )
    .expect("fixed signature names are valid")
}

/// Decides whether the pair `s/t` is derivable from the cards of `r`:
/// either the pair is a card, or some card is a prefix pair and the strict
/// remainder is derivable.
pub fn derivable(r: &BpcpInstance, s: &[bool], t: &[bool]) -> bool {
    let mut memo = vec![None; (s.len() + 1) * (t.len() + 1)];
    derivable_at(r, s, t, 0, 0, &mut memo)
}

/// Subproblems are always suffix pairs of the original input, keyed here by
/// their start offsets.
fn derivable_at(
    r: &BpcpInstance,
    s: &[bool],
    t: &[bool],
    i: usize,
    j: usize,
    memo: &mut [Option<bool>],
) -> bool {
    let key = i * (t.len() + 1) + j;
    if let Some(known) = memo[key] {
        return known;
    }
    let (su, tv) = (&s[i..], &t[j..]);
    let mut hit = r
        .cards()
        .iter()
        .any(|(a, b)| a.as_slice() == su && b.as_slice() == tv);
    if !hit {
        // Cards empty on both sides only repeat the current pair; skipping
        // them keeps the remainder strictly smaller.
        hit = r.cards().iter().any(|(a, b)| {
            (!a.is_empty() || !b.is_empty())
                && su.starts_with(a)
                && tv.starts_with(b)
                && derivable_at(r, s, t, i + a.len(), j + b.len(), memo)
        });
    }
    memo[key] = Some(hit);
    hit
}

/// Searches for a solution string of length at most `max_len`, shortest
/// first. `None` means no solution within the bound, not unsolvability.
pub fn solve_bpcp(r: &BpcpInstance, max_len: usize) -> Option<Bits> {
    for len in 0..=max_len {
        let mut s = vec![false; len];
        loop {
            if derivable(r, &s, &s) {
                return Some(s);
            }
            if !bump(&mut s) {
                break;
            }
        }
    }
    None
}

/// Advances a bit string one step in lexicographic order, least significant
/// position first; false once it wraps around.
fn bump(s: &mut [bool]) -> bool {
    for b in s.iter_mut() {
        if !*b {
            *b = true;
            return true;
        }
        *b = false;
    }
    false
}

fn equal(l: Term, r: Term) -> Formula {
    Formula::atom(EQUALITY, vec![l, r])
}

fn not_equal(l: Term, r: Term) -> Formula {
    Formula::neg(equal(l, r))
}

fn undef_term() -> Term {
    Term::cnst(UNDEF)
}

/// The term `s̄` in front of a tail: cons applications from the last bit
/// inward, so the first bit of `s` ends up outermost.
fn string_term(s: &[bool], tail: Term) -> Term {
    let mut t = tail;
    for &b in s.iter().rev() {
        t = Term::app(if b { CONS_TT } else { CONS_FF }, vec![t]);
    }
    t
}

fn derives(x: Term, y: Term) -> Formula {
    Formula::atom(DERIVES, vec![x, y])
}

fn smaller(x: Term, y: Term) -> Formula {
    Formula::atom(SUFFIX, vec![x, y])
}

/// Closed conjunction of the axioms plus the existence of a reflexive
/// derivable pair.
pub fn encode_phi(r: &BpcpInstance) -> Formula {
    let v = Term::var;
    // Derivability only relates defined values.
    let proper = Formula::forall(Formula::forall(Formula::implies(
        derives(v(1), v(0)),
        Formula::and(
            not_equal(v(1), undef_term()),
            not_equal(v(0), undef_term()),
        ),
    )));
    // Irreflexive and transitive.
    let strict_order = Formula::and(
        Formula::forall(Formula::neg(smaller(v(0), v(0)))),
        Formula::forall(Formula::forall(Formula::forall(Formula::implies(
            smaller(v(2), v(1)),
            Formula::implies(smaller(v(1), v(0)), smaller(v(2), v(0))),
        )))),
    );
    let solution = Formula::exists(derives(v(0), v(0)));
    Formula::conj(vec![
        proper,
        strict_order,
        cons_axioms(),
        inversion_axiom(r),
        solution,
    ])
}

/// Cons is absorbed by the overflow value, avoids the empty string, and is
/// injective below overflow; the two cons images meet only at overflow.
fn cons_axioms() -> Formula {
    let v = Term::var;
    let tt = |t| Term::app(CONS_TT, vec![t]);
    let ff = |t| Term::app(CONS_FF, vec![t]);
    let nil = || Term::cnst(NIL);
    Formula::conj(vec![
        equal(tt(undef_term()), undef_term()),
        equal(ff(undef_term()), undef_term()),
        Formula::forall(not_equal(tt(v(0)), nil())),
        Formula::forall(not_equal(ff(v(0)), nil())),
        Formula::forall(Formula::forall(Formula::implies(
            not_equal(tt(v(1)), undef_term()),
            Formula::implies(equal(tt(v(1)), tt(v(0))), equal(v(1), v(0))),
        ))),
        Formula::forall(Formula::forall(Formula::implies(
            not_equal(ff(v(1)), undef_term()),
            Formula::implies(equal(ff(v(1)), ff(v(0))), equal(v(1), v(0))),
        ))),
        Formula::forall(Formula::forall(Formula::implies(
            equal(tt(v(1)), ff(v(0))),
            Formula::and(
                equal(tt(v(1)), undef_term()),
                equal(ff(v(0)), undef_term()),
            ),
        ))),
    ])
}

/// Forces the inversion principle of derivability on the interpreted pair
/// relation: every related pair matches some card, either exactly or as a
/// card prefix of a strictly smaller related pair.
fn inversion_axiom(r: &BpcpInstance) -> Formula {
    let v = Term::var;
    let branches: Vec<Formula> = r
        .cards()
        .iter()
        .map(|(a, b)| {
            // Under the two outer binders: x = 1, y = 0.
            let base = Formula::and(
                equal(v(1), string_term(a, Term::cnst(NIL))),
                equal(v(0), string_term(b, Term::cnst(NIL))),
            );
            // Two more binders for the smaller pair: u = 1, w = 0.
            let step = Formula::exists(Formula::exists(Formula::conj(vec![
                derives(v(1), v(0)),
                equal(v(3), string_term(a, v(1))),
                equal(v(2), string_term(b, v(0))),
                pair_smaller(1, 0, 3, 2),
            ])));
            Formula::or(base, step)
        })
        .collect();
    Formula::forall(Formula::forall(Formula::implies(
        derives(v(1), v(0)),
        Formula::disj(branches),
    )))
}

/// The pair order used for the descent: strictly smaller in one component
/// and equal in the other, or strictly smaller in both.
fn pair_smaller(ui: usize, wi: usize, xi: usize, yi: usize) -> Formula {
    let v = Term::var;
    Formula::disj(vec![
        Formula::and(smaller(v(ui), v(xi)), equal(v(wi), v(yi))),
        Formula::and(smaller(v(wi), v(yi)), equal(v(ui), v(xi))),
        Formula::and(smaller(v(ui), v(xi)), smaller(v(wi), v(yi))),
    ])
}

/// Enumerates the bounded-string domain: index 0 is the overflow value,
/// defined strings follow ordered by length then lexicographically.
pub fn bn_domain(n: usize) -> Vec<Option<Bits>> {
    let mut out = vec![None];
    for len in 0..=n {
        let mut s = vec![false; len];
        loop {
            out.push(Some(s.clone()));
            if !bump(&mut s) {
                break;
            }
        }
    }
    out
}

/// Builds the intended model over strings of length at most `n`, with the
/// all-overflow assignment. Satisfies the encoding exactly when the
/// instance has a solution of length at most `n`.
pub fn build_bn(r: &BpcpInstance, n: usize) -> Result<(FinModel, Env), BpcpError> {
    let domain = bn_domain(n);
    let k = domain.len();
    let mut index: HashMap<Bits, usize> = HashMap::new();
    for (i, d) in domain.iter().enumerate() {
        if let Some(s) = d {
            index.insert(s.clone(), i);
        }
    }

    let mut m = FinModel::new(k)?;
    m.set_function(UNDEF, 0, vec![0])?;
    m.set_function(NIL, 0, vec![index[&Bits::new()]])?;
    for (name, bit) in [(CONS_TT, true), (CONS_FF, false)] {
        let mut table = vec![0usize; k];
        for (i, d) in domain.iter().enumerate() {
            if let Some(s) = d {
                if s.len() < n {
                    let mut cons = vec![bit];
                    cons.extend_from_slice(s);
                    table[i] = index[&cons];
                }
            }
        }
        m.set_function(name, 1, table)?;
    }

    let mut pairs = vec![false; k * k];
    let mut suffixes = vec![false; k * k];
    let mut diagonal = vec![false; k * k];
    for (i, di) in domain.iter().enumerate() {
        diagonal[i * k + i] = true;
        for (j, dj) in domain.iter().enumerate() {
            if let (Some(s), Some(t)) = (di, dj) {
                pairs[i * k + j] = derivable(r, s, t);
                suffixes[i * k + j] = s != t && t.ends_with(s);
            }
        }
    }
    m.set_relation(DERIVES, 2, pairs)?;
    m.set_relation(SUFFIX, 2, suffixes)?;
    m.set_relation(EQUALITY, 2, diagonal)?;
    Ok((m, Env::constant(0)))
}

/// Checks the model interprets every signature symbol at the right arity
/// and equality as the diagonal.
fn check_shape(m: &FinModel) -> Result<(), BpcpError> {
    let sig = sig_bpcp();
    for (name, arity) in sig.functions() {
        match m.function(name) {
            None => return Err(BpcpError::MissingSymbol { name: name.clone() }),
            Some((got, _)) if got != *arity => {
                return Err(BpcpError::SymbolArity {
                    name: name.clone(),
                    got,
                    expected: *arity,
                })
            }
            Some(_) => {}
        }
    }
    for (name, arity) in sig.relations() {
        match m.relation(name) {
            None => return Err(BpcpError::MissingSymbol { name: name.clone() }),
            Some((got, _)) if got != *arity => {
                return Err(BpcpError::SymbolArity {
                    name: name.clone(),
                    got,
                    expected: *arity,
                })
            }
            Some(_) => {}
        }
    }
    let k = m.size();
    let (_, table) = m.relation(EQUALITY).expect("checked above");
    for i in 0..k {
        for j in 0..k {
            if table[i * k + j] != (i == j) {
                return Err(BpcpError::EqualityNotDiagonal);
            }
        }
    }
    Ok(())
}

/// Reads a solution back out of any model of the encoding whose equality
/// relation is the diagonal. The result is revalidated against the
/// derivability decider.
pub fn extract_solution(
    r: &BpcpInstance,
    m: &FinModel,
    env: &Env,
) -> Result<Bits, BpcpError> {
    check_shape(m)?;
    let phi = encode_phi(r);
    let mc = ModelChecker::new(m, &phi);
    if !mc.eval(env)? {
        return Err(BpcpError::NotAModel);
    }

    let k = m.size();
    let mut start = None;
    for x in 0..k {
        if m.relation_holds(DERIVES, &[x, x])? {
            start = Some(x);
            break;
        }
    }
    let start = start.ok_or(BpcpError::NotAModel)?;

    let cons_value = |bits: &[bool], tail: usize| -> Result<usize, BpcpError> {
        let mut value = tail;
        for &b in bits.iter().rev() {
            value = m.apply_function(if b { CONS_TT } else { CONS_FF }, &[value])?;
        }
        Ok(value)
    };
    let pair_smaller = |u: usize, w: usize, x: usize, y: usize| -> Result<bool, BpcpError> {
        let left = m.relation_holds(SUFFIX, &[u, x])?;
        let right = m.relation_holds(SUFFIX, &[w, y])?;
        Ok(left && w == y || right && u == x || left && right)
    };
    let nil_value = m.apply_function(NIL, &[])?;

    let (mut x, mut y) = (start, start);
    let mut s: Bits = Vec::new();
    let mut t: Bits = Vec::new();
    // Decomposition pairs strictly descend in a strict order on a finite
    // domain, so chains never exceed the pair count.
    let mut fuel = k * k + 1;
    loop {
        if fuel == 0 {
            return Err(BpcpError::FuelExhausted);
        }
        fuel -= 1;

        let mut base = None;
        for (a, b) in r.cards() {
            if cons_value(a, nil_value)? == x && cons_value(b, nil_value)? == y {
                base = Some((a, b));
                break;
            }
        }
        if let Some((a, b)) = base {
            s.extend_from_slice(a);
            t.extend_from_slice(b);
            break;
        }

        let mut next = None;
        'cards: for (a, b) in r.cards() {
            if a.is_empty() && b.is_empty() {
                continue;
            }
            for u in 0..k {
                if cons_value(a, u)? != x {
                    continue;
                }
                for w in 0..k {
                    if m.relation_holds(DERIVES, &[u, w])?
                        && cons_value(b, w)? == y
                        && pair_smaller(u, w, x, y)?
                    {
                        next = Some((a, b, u, w));
                        break 'cards;
                    }
                }
            }
        }
        match next {
            Some((a, b, u, w)) => {
                s.extend_from_slice(a);
                t.extend_from_slice(b);
                x = u;
                y = w;
            }
            None => return Err(BpcpError::ExtractionStuck),
        }
    }

    if s != t || !derivable(r, &s, &s) {
        return Err(BpcpError::InvalidSolution);
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn inst(pairs: &[(&str, &str)]) -> BpcpInstance {
        BpcpInstance::from_strings(pairs).unwrap()
    }

    #[test]
    fn bit_strings_parse_and_print() {
        assert_eq!(
            bits_from_string("0110").unwrap(),
            vec![false, true, true, false]
        );
        assert_eq!(bits_to_string(&[true, false]), "10");
        assert!(matches!(bits_from_string("012"), Err(BpcpError::BadBit('2'))));
    }

    #[test]
    fn instances_dedup_their_cards() {
        let r = BpcpInstance::new(vec![
            (vec![true], vec![]),
            (vec![true], vec![]),
            (vec![], vec![true]),
        ]);
        assert_eq!(r.cards().len(), 2);
    }

    #[test]
    fn derivability_follows_the_two_rules() {
        let r = inst(&[("1", "1")]);
        assert!(derivable(&r, &[true], &[true]));

        let r = inst(&[("1", "0")]);
        assert!(derivable(&r, &[true, true], &[false, false]));
        assert!(!derivable(&r, &[true], &[true]));

        let empty = BpcpInstance::new(Vec::new());
        assert!(!derivable(&empty, &[], &[]));
        assert!(!derivable(&empty, &[true], &[false]));
    }

    #[test]
    fn derivability_matches_a_rule_closure() {
        // Closure of the two rules over pairs with both strings of length
        // at most 6; bounded pairs only ever decompose into bounded pairs.
        fn closure(r: &BpcpInstance, max: usize) -> BTreeSet<(Bits, Bits)> {
            let mut set: BTreeSet<(Bits, Bits)> = r
                .cards()
                .iter()
                .filter(|(a, b)| a.len() <= max && b.len() <= max)
                .cloned()
                .collect();
            loop {
                let mut grew = false;
                let snapshot: Vec<(Bits, Bits)> = set.iter().cloned().collect();
                for (a, b) in r.cards() {
                    for (u, v) in &snapshot {
                        if a.len() + u.len() <= max && b.len() + v.len() <= max {
                            let mut s = a.clone();
                            s.extend_from_slice(u);
                            let mut t = b.clone();
                            t.extend_from_slice(v);
                            grew |= set.insert((s, t));
                        }
                    }
                }
                if !grew {
                    return set;
                }
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let strings: Vec<Bits> = bn_domain(6).into_iter().flatten().collect();
        for _ in 0..25 {
            let count = rng.random_range(0..=3);
            let cards: Vec<(Bits, Bits)> = (0..count)
                .map(|_| {
                    let mut pick = || {
                        let len = rng.random_range(0..=3);
                        (0..len).map(|_| rng.random()).collect::<Bits>()
                    };
                    (pick(), pick())
                })
                .collect();
            let r = BpcpInstance::new(cards);
            let closed = closure(&r, 6);
            for s in &strings {
                for t in &strings {
                    assert_eq!(
                        derivable(&r, s, t),
                        closed.contains(&(s.clone(), t.clone())),
                        "cards {:?} pair {:?}/{:?}",
                        r.cards(),
                        s,
                        t
                    );
                }
            }
        }
    }

    #[test]
    fn solving_returns_the_shortest_witness() {
        let r = inst(&[("1", "1")]);
        assert_eq!(solve_bpcp(&r, 3), Some(vec![true]));

        let r = inst(&[("1", "11"), ("11", "1")]);
        let s = solve_bpcp(&r, 4).unwrap();
        assert_eq!(s, vec![true, true, true]);
        assert!(derivable(&r, &s, &s));

        let r = inst(&[("1", "0")]);
        assert_eq!(solve_bpcp(&r, 6), None);
    }

    #[test]
    fn encoding_is_closed_over_the_fixed_signature() {
        fn or_spine_len(phi: &Formula) -> usize {
            match phi {
                Formula::Bin(crate::logic::BinOp::Or, l, r) => {
                    or_spine_len(l) + or_spine_len(r)
                }
                _ => 1,
            }
        }
        // The inversion axiom sits fourth in the conjunction; its body is
        // an implication whose right side disjoins two branches per card.
        fn inversion_branches(phi: &Formula) -> usize {
            let mut cur = phi;
            for _ in 0..3 {
                match cur {
                    Formula::Bin(crate::logic::BinOp::And, _, r) => cur = r,
                    other => panic!("expected conjunction, got {other:?}"),
                }
            }
            let Formula::Bin(crate::logic::BinOp::And, inv, _) = cur else {
                panic!("expected conjunction tail");
            };
            let Formula::Quant(_, body) = &**inv else {
                panic!("expected quantifier");
            };
            let Formula::Quant(_, body) = &**body else {
                panic!("expected quantifier");
            };
            let Formula::Bin(crate::logic::BinOp::Impl, _, branches) = &**body else {
                panic!("expected implication");
            };
            or_spine_len(branches)
        }

        let one = encode_phi(&inst(&[("1", "1")]));
        assert!(one.free_vars().is_empty());
        sig_bpcp().validate_formula(&one).unwrap();
        assert_eq!(inversion_branches(&one), 2);

        let two = encode_phi(&inst(&[("1", "1"), ("0", "01")]));
        assert!(two.free_vars().is_empty());
        assert_eq!(inversion_branches(&two), 4);
    }

    #[test]
    fn intended_models_enumerate_bounded_strings() {
        let dom = bn_domain(1);
        assert_eq!(dom.len(), 4);
        assert_eq!(dom[0], None);
        assert_eq!(dom[1], Some(Bits::new()));

        let r = inst(&[("1", "1")]);
        let (m, env) = build_bn(&r, 1).unwrap();
        assert_eq!(m.size(), 4);
        assert_eq!(env.lookup(7), 0);

        let nil = m.apply_function(NIL, &[]).unwrap();
        assert_eq!(nil, 1);
        let one = m.apply_function(CONS_TT, &[nil]).unwrap();
        assert_eq!(dom[one], Some(vec![true]));
        // Cons overflows once the length bound is reached.
        assert_eq!(m.apply_function(CONS_TT, &[one]).unwrap(), 0);
        assert_eq!(m.apply_function(UNDEF, &[]).unwrap(), 0);
    }

    #[test]
    fn solvable_instances_satisfy_their_encoding() {
        let r = inst(&[("1", "1")]);
        let (m, env) = build_bn(&r, 1).unwrap();
        assert!(m.eval(&env, &encode_phi(&r)).unwrap());
    }

    #[test]
    fn unsolvable_instances_refute_the_solution_conjunct() {
        let r = inst(&[("1", "0")]);
        let (m, env) = build_bn(&r, 2).unwrap();
        assert!(!m.eval(&env, &encode_phi(&r)).unwrap());
    }

    #[test]
    fn extraction_recovers_a_solution() {
        let r = inst(&[("1", "1")]);
        let (m, env) = build_bn(&r, 1).unwrap();
        assert_eq!(extract_solution(&r, &m, &env).unwrap(), vec![true]);

        let r = inst(&[("1", "11"), ("11", "1")]);
        let (m, env) = build_bn(&r, 3).unwrap();
        let s = extract_solution(&r, &m, &env).unwrap();
        assert_eq!(s.len(), 3);
        assert!(derivable(&r, &s, &s));
    }

    #[test]
    fn extraction_rejects_non_models() {
        let r = inst(&[("1", "0")]);
        let (m, env) = build_bn(&r, 1).unwrap();
        assert!(matches!(
            extract_solution(&r, &m, &env),
            Err(BpcpError::NotAModel)
        ));

        let bare = FinModel::new(2).unwrap();
        assert!(matches!(
            extract_solution(&r, &bare, &Env::constant(0)),
            Err(BpcpError::MissingSymbol { .. })
        ));
    }
}
