//! Hereditarily finite sets as canonical ordered trees, their encodings of
//! pairs and tuples, and the builder that turns a one-relation model into a
//! pure membership model.
//!
//! Canonical form: children sorted under the derived total order and
//! duplicate-free, recursively. Equality of canonical forms is extensional
//! set equality, and membership is a binary search.

use crate::logic::Formula;
use crate::semantics::FinModel;
use thiserror::Error;

/// Relation name used for membership in generated models and formulas.
pub const MEM_REL: &str = "mem";

/// Largest membership-model universe the builder will produce.
pub const MAX_UNIVERSE: usize = 4096;

/// Largest child count `powerset` accepts.
pub const POWERSET_GUARD: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HfsError {
    #[error("powerset of a set with {size} members exceeds the guard of {max}")]
    PowersetTooLarge { size: usize, max: usize },
    #[error("membership universe of {size} sets exceeds the guard of {max}")]
    UniverseTooLarge { size: usize, max: usize },
    #[error("membership-model builder expects exactly one relation, found {count}")]
    NotSingleRelation { count: usize },
}

/// A hereditarily finite set in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Hfs {
    children: Vec<Hfs>,
}

/// An unnormalized finite tree, the input to [`normalize`].
#[derive(Debug, Clone)]
pub struct RawTree(pub Vec<RawTree>);

/// Sorts and deduplicates recursively. Idempotent; trees equal up to
/// permutation and repetition of members normalize identically.
pub fn normalize(raw: &RawTree) -> Hfs {
    let children = raw.0.iter().map(normalize).collect();
    Hfs::from_children(children)
}

impl Hfs {
    pub fn empty() -> Hfs {
        Hfs { children: Vec::new() }
    }

    /// Canonical set with the given members.
    pub fn from_children(mut children: Vec<Hfs>) -> Hfs {
        children.sort();
        children.dedup();
        Hfs { children }
    }

    pub fn singleton(x: Hfs) -> Hfs {
        Hfs { children: vec![x] }
    }

    pub fn pair_set(x: Hfs, y: Hfs) -> Hfs {
        Hfs::from_children(vec![x, y])
    }

    pub fn children(&self) -> &[Hfs] {
        &self.children
    }

    pub fn is_empty(&self) -> bool {
        self.children.is_empty()
    }

    pub fn card(&self) -> usize {
        self.children.len()
    }

    /// Membership by ordered search.
    pub fn has_member(&self, x: &Hfs) -> bool {
        self.children.binary_search(x).is_ok()
    }

    pub fn rank(&self) -> usize {
        self.children.iter().map(|c| c.rank() + 1).max().unwrap_or(0)
    }

    /// Kuratowski ordered pair `{{x},{x,y}}`.
    pub fn opair(x: Hfs, y: Hfs) -> Hfs {
        Hfs::from_children(vec![
            Hfs::singleton(x.clone()),
            Hfs::pair_set(x, y),
        ])
    }

    /// Right-nested tuple: `[] = empty`, `[x, rest..] = opair(x, [rest..])`.
    pub fn tuple(components: &[Hfs]) -> Hfs {
        match components.split_first() {
            None => Hfs::empty(),
            Some((head, rest)) => Hfs::opair(head.clone(), Hfs::tuple(rest)),
        }
    }

    /// Von Neumann numeral: `0` is empty, `n+1` adjoins `numeral(n)` to
    /// itself. Distinct for distinct arguments, rank `n`.
    pub fn numeral(n: usize) -> Hfs {
        let mut s = Hfs::empty();
        for _ in 0..n {
            let mut children = s.children.clone();
            children.push(s);
            s = Hfs::from_children(children);
        }
        s
    }

    pub fn powerset(&self) -> Result<Hfs, HfsError> {
        let n = self.children.len();
        if n > POWERSET_GUARD {
            return Err(HfsError::PowersetTooLarge {
                size: n,
                max: POWERSET_GUARD,
            });
        }
        let mut subsets = Vec::with_capacity(1 << n);
        for mask in 0u32..1 << n {
            let members = self
                .children
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, c)| c.clone())
                .collect();
            subsets.push(Hfs::from_children(members));
        }
        Ok(Hfs::from_children(subsets))
    }
}

impl std::fmt::Display for Hfs {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (i, c) in self.children.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "}}")
    }
}

/// The roots together with every hereditary member, sorted canonically.
pub fn transitive_closure(roots: &[Hfs]) -> Vec<Hfs> {
    let mut seen: std::collections::BTreeSet<Hfs> = std::collections::BTreeSet::new();
    let mut queue: Vec<Hfs> = roots.to_vec();
    while let Some(s) = queue.pop() {
        if seen.insert(s.clone()) {
            queue.extend(s.children.iter().cloned());
        }
    }
    seen.into_iter().collect()
}

/// Formula `forall z, z in x iff z in y` with `x`, `y` indices at the
/// formula's own level.
pub fn eq_ext(x: usize, y: usize, rel: &str) -> Formula {
    Formula::forall(Formula::iff(mem_atom(0, x + 1, rel), mem_atom(0, y + 1, rel)))
}

/// Formula `p` has exactly the members `x` and `y`: forall z, z in p iff
/// (z ~ x or z ~ y).
pub fn set_is_pair(p: usize, x: usize, y: usize, rel: &str) -> Formula {
    Formula::forall(Formula::iff(
        mem_atom(0, p + 1, rel),
        Formula::or(eq_ext(0, x + 1, rel), eq_ext(0, y + 1, rel)),
    ))
}

/// Formula `t` encodes the ordered pair of `x` and `y`: exists a b,
/// a ~ {x,x} and b ~ {x,y} and t ~ {a,b}.
pub fn set_is_opair(t: usize, x: usize, y: usize, rel: &str) -> Formula {
    Formula::exists(Formula::exists(Formula::and(
        set_is_pair(1, x + 2, x + 2, rel),
        Formula::and(
            set_is_pair(0, x + 2, y + 2, rel),
            set_is_pair(t + 2, 1, 0, rel),
        ),
    )))
}

/// Formula `e` is empty: forall z, not (z in e).
pub fn set_is_empty(e: usize, rel: &str) -> Formula {
    Formula::forall(Formula::neg(mem_atom(0, e + 1, rel)))
}

/// Formula `t` encodes the right-nested tuple of the listed component
/// variables.
pub fn set_is_tuple(t: usize, components: &[usize], rel: &str) -> Formula {
    match components.split_first() {
        None => set_is_empty(t, rel),
        Some((head, rest)) => {
            let shifted: Vec<usize> = rest.iter().map(|v| v + 1).collect();
            Formula::exists(Formula::and(
                set_is_opair(t + 1, head + 1, 0, rel),
                set_is_tuple(0, &shifted, rel),
            ))
        }
    }
}

/// Formula: the tuple of the component variables is a member of `r`.
pub fn tuple_mem(r: usize, components: &[usize], rel: &str) -> Formula {
    let shifted: Vec<usize> = components.iter().map(|v| v + 1).collect();
    Formula::exists(Formula::and(
        set_is_tuple(0, &shifted, rel),
        mem_atom(0, r + 1, rel),
    ))
}

/// The extensionality sentence: equal-membered sets belong to the same
/// sets.
pub fn ext_sentence(rel: &str) -> Formula {
    Formula::forall(Formula::forall(Formula::implies(
        eq_ext(1, 0, rel),
        Formula::forall(Formula::implies(
            mem_atom(2, 0, rel),
            mem_atom(1, 0, rel),
        )),
    )))
}

fn mem_atom(a: usize, b: usize, rel: &str) -> Formula {
    use crate::logic::Term;
    Formula::atom(rel, vec![Term::var(a), Term::var(b)])
}

/// A finite model of pure membership, produced from a one-relation model.
#[derive(Debug, Clone)]
pub struct MembershipModel {
    /// Domain = indices into `universe`; single relation [`MEM_REL`].
    pub model: FinModel,
    /// Canonically sorted universe; position = domain element.
    pub universe: Vec<Hfs>,
    /// Index of the set of element codes.
    pub d_index: usize,
    /// Index of the set of encoded true tuples.
    pub r_index: usize,
    /// Position of each source element's code `i(x)`.
    pub element_index: Vec<usize>,
}

/// Encodes a model interpreting exactly one relation into a membership
/// model: elements become numerals, true tuples become nested Kuratowski
/// pairs collected in `r`, and the universe is the transitive closure of
/// `{d, r}` plus tuple intermediates.
pub fn build_membership_model(m: &FinModel) -> Result<MembershipModel, HfsError> {
    let rel_names: Vec<String> = m.relation_names().map(String::from).collect();
    if rel_names.len() != 1 {
        return Err(HfsError::NotSingleRelation {
            count: rel_names.len(),
        });
    }
    let rel = &rel_names[0];
    let (arity, table) = m.relation(rel).expect("relation listed");
    let k = m.size();

    let codes: Vec<Hfs> = (0..k).map(Hfs::numeral).collect();
    let d = Hfs::from_children(codes.clone());
    let mut roots = vec![d.clone()];
    let mut true_tuples = Vec::new();
    for (idx, holds) in table.iter().enumerate() {
        if !*holds {
            continue;
        }
        let digits = crate::semantics::tuple_of_index(k, arity, idx);
        let encoded: Vec<Hfs> = digits.iter().map(|v| codes[*v].clone()).collect();
        // Every tuple suffix is an intermediate of the encoding.
        for j in 0..=encoded.len() {
            roots.push(Hfs::tuple(&encoded[j..]));
        }
        true_tuples.push(Hfs::tuple(&encoded));
    }
    let r = Hfs::from_children(true_tuples);
    roots.push(r.clone());

    let universe = transitive_closure(&roots);
    let size = universe.len();
    if size > MAX_UNIVERSE {
        return Err(HfsError::UniverseTooLarge {
            size,
            max: MAX_UNIVERSE,
        });
    }

    let pos = |s: &Hfs| universe.binary_search(s).expect("closed universe");
    let mut mem_table = vec![false; size * size];
    for (yi, y) in universe.iter().enumerate() {
        for c in y.children() {
            mem_table[pos(c) * size + yi] = true;
        }
    }
    let mut model = FinModel::new(size).expect("nonempty universe");
    model
        .set_relation(MEM_REL, 2, mem_table)
        .expect("table sized");

    Ok(MembershipModel {
        model,
        d_index: pos(&d),
        r_index: pos(&r),
        element_index: codes.iter().map(pos).collect(),
        universe,
    })
}
