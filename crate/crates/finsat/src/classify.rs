//! Decidability verdicts for finite satisfiability, read off the signature.
//!
//! The shape of the signature settles everything: a relation of arity two or
//! more, or a function of arity two or more next to a unary relation, makes
//! finite satisfiability undecidable; otherwise the signature is monadic or
//! propositional and the problem is decidable. Finite satisfiability stays
//! semi-decidable in every case, so `enumerable` is always true. Side
//! conditions about telling symbols apart vanish for concrete string names,
//! which the verdict records as a note instead of computing.

use crate::logic::Signature;

/// Why no discernability side condition is checked.
pub const DISCERNABILITY_NOTE: &str =
    "symbol discernability is trivial for string-named signatures";

/// The undecidable shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UndecidableCase {
    /// Some relation has arity at least two.
    WideRelation,
    /// Some function has arity at least two beside a unary relation.
    WideFunction,
}

/// The decidable fragments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecidableCase {
    /// Every symbol has arity at most one.
    Monadic,
    /// Every relation is nullary, functions unrestricted.
    Propositional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Undecidable(UndecidableCase),
    Decidable(DecidableCase),
}

impl Verdict {
    pub fn is_decidable(&self) -> bool {
        matches!(self, Verdict::Decidable(_))
    }

    pub fn family(&self) -> &'static str {
        match self {
            Verdict::Undecidable(_) => "undecidable",
            Verdict::Decidable(_) => "decidable",
        }
    }

    /// Short case label: "a" and "b" for the undecidable shapes, the
    /// fragment name for the decidable ones.
    pub fn case(&self) -> &'static str {
        match self {
            Verdict::Undecidable(UndecidableCase::WideRelation) => "a",
            Verdict::Undecidable(UndecidableCase::WideFunction) => "b",
            Verdict::Decidable(DecidableCase::Monadic) => "monadic",
            Verdict::Decidable(DecidableCase::Propositional) => "propositional",
        }
    }
}

/// Full verdict record for one signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub verdict: Verdict,
    /// Finite satisfiability is semi-decidable for every finite signature.
    pub enumerable: bool,
    pub note: &'static str,
}

/// Classifies a signature. The cases are tried in order: wide relation,
/// wide function beside a unary relation, monadic, propositional; together
/// they cover every finite signature exactly once.
pub fn classify_signature(sig: &Signature) -> Classification {
    let wide_rel = sig.relations().iter().any(|(_, a)| *a >= 2);
    let unary_rel = sig.relations().iter().any(|(_, a)| *a == 1);
    let wide_fun = sig.functions().iter().any(|(_, a)| *a >= 2);
    let verdict = if wide_rel {
        Verdict::Undecidable(UndecidableCase::WideRelation)
    } else if unary_rel && wide_fun {
        Verdict::Undecidable(UndecidableCase::WideFunction)
    } else if !wide_fun {
        Verdict::Decidable(DecidableCase::Monadic)
    } else {
        Verdict::Decidable(DecidableCase::Propositional)
    };
    Classification {
        verdict,
        enumerable: true,
        note: DISCERNABILITY_NOTE,
    }
}
