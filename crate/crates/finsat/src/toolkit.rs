//! Finite combinatorics used across the crate: duplicate finding by
//! scanning, quotients of finite lists by a decidable equivalence, powerset
//! enumeration over a small universe, and the Cantor pairing polynomial.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ToolkitError {
    #[error("powerset universe of {size} points exceeds the guard of {max}")]
    PowersetTooLarge { size: usize, max: usize },
    #[error("element belongs to no class of the quotient")]
    NoMatchingClass,
}

/// Largest universe `weak_powerset` will enumerate.
pub const POWERSET_GUARD: usize = 24;

/// First pair of positions holding equivalent values: scans `i` ascending,
/// then `j > i` ascending. `None` means the list is duplicate-free under
/// `eq`.
pub fn find_duplicate<T, F>(l: &[T], eq: F) -> Option<(usize, usize)>
where
    F: Fn(&T, &T) -> bool,
{
    for i in 0..l.len() {
        for j in i + 1..l.len() {
            if eq(&l[i], &l[j]) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Quotient of a finite list by a decidable equivalence: class indices are
/// assigned in first-occurrence order of their representatives.
pub struct Quotient<T, F> {
    reprs: Vec<T>,
    equiv: F,
}

impl<T, F> Quotient<T, F>
where
    F: Fn(&T, &T) -> bool,
{
    pub fn class_count(&self) -> usize {
        self.reprs.len()
    }

    /// Index of the first representative equivalent to `x`.
    pub fn class_of(&self, x: &T) -> Result<usize, ToolkitError> {
        self.reprs
            .iter()
            .position(|r| (self.equiv)(r, x))
            .ok_or(ToolkitError::NoMatchingClass)
    }

    pub fn repr(&self, class: usize) -> &T {
        &self.reprs[class]
    }

    pub fn reprs(&self) -> &[T] {
        &self.reprs
    }
}

/// Builds the quotient of `items` by `equiv`, keeping one representative
/// per class.
pub fn finite_quotient<T, F>(items: &[T], equiv: F) -> Quotient<T, F>
where
    T: Clone,
    F: Fn(&T, &T) -> bool,
{
    let mut reprs: Vec<T> = Vec::new();
    for item in items {
        if !reprs.iter().any(|r| equiv(r, item)) {
            reprs.push(item.clone());
        }
    }
    Quotient { reprs, equiv }
}

/// All subsets of a universe of the given size, as bit vectors. Yields
/// exactly `2^universe_size` vectors; bit `i` of the counter drives
/// position `i`.
pub fn weak_powerset(
    universe_size: usize,
) -> Result<impl Iterator<Item = Vec<bool>>, ToolkitError> {
    if universe_size > POWERSET_GUARD {
        return Err(ToolkitError::PowersetTooLarge {
            size: universe_size,
            max: POWERSET_GUARD,
        });
    }
    let count: u64 = 1 << universe_size;
    Ok((0..count).map(move |mask| (0..universe_size).map(|i| mask >> i & 1 == 1).collect()))
}

/// Cantor pairing polynomial `(x+y)(x+y+1)/2 + y`.
pub fn cantor_pair(x: usize, y: usize) -> usize {
    let s = x + y;
    s * (s + 1) / 2 + y
}

/// Inverse of [`cantor_pair`].
pub fn cantor_unpair(z: usize) -> (usize, usize) {
    let mut w = 0;
    while (w + 1) * (w + 2) / 2 <= z {
        w += 1;
    }
    let y = z - w * (w + 1) / 2;
    (w - y, y)
}
