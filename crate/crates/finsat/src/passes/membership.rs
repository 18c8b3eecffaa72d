//! The final compression: satisfiability of a single-relation formula
//! becomes satisfiability over one binary membership relation, with domain
//! and relation reified as set codes held in designated free variables.

use super::{env_entry_checked, relativize, PassError, ReductionStep};
use crate::hfs::{build_membership_model, tuple_mem, MEM_REL};
use crate::logic::{Formula, Signature, Term};
use crate::semantics::{tuples, Env, FinModel, ModelChecker, ModelError};

/// Encodes a formula over one relation of any arity into the pure
/// membership signature. Free variable `d` (the first reserved index) names
/// the set of element codes and `d + 1` the set of encoded true tuples;
/// quantifiers are relativized to members of `d`.
pub fn compress_to_membership(
    phi: &Formula,
    sig: &Signature,
) -> Result<ReductionStep, PassError> {
    sig.validate_formula(phi)?;
    if let Some((f, _)) = sig.functions().first() {
        return Err(PassError::UnexpectedFunction { name: f.clone() });
    }
    if sig.relations().len() != 1 {
        return Err(PassError::NotSingleRelation {
            found: sig.relations().len(),
        });
    }
    let (pname, arity) = sig.relations()[0].clone();

    let d = phi.fresh_free();
    let r = d + 1;
    let mem = |a: usize, b: usize| Formula::atom(MEM_REL, vec![Term::var(a), Term::var(b)]);

    let mut parts = vec![Formula::exists(mem(0, d + 1))];
    for v in phi.free_vars() {
        parts.push(mem(v, d));
    }
    let body = relativize(
        phi,
        &mut |_, args, depth| {
            let comps: Vec<usize> = args
                .iter()
                .map(|t| match t {
                    Term::Var(v) => *v,
                    Term::App(..) => unreachable!("signature has no functions"),
                })
                .collect();
            tuple_mem(r + depth, &comps, MEM_REL)
        },
        &|depth| mem(0, d + depth),
    );
    parts.push(body);
    let formula = Formula::conj(parts);

    let mut target = Signature::new();
    target.add_relation(MEM_REL, 2)?;

    let pname_f = pname.clone();
    let forward: super::Transport = Box::new(move |m: &FinModel, e: &Env| {
        let k = m.size();
        let (a, table) = m.relation(&pname_f).ok_or(ModelError::MissingSymbol {
            name: pname_f.clone(),
        })?;
        let mut trimmed = FinModel::new(k)?;
        trimmed.set_relation(&pname_f, a, table.to_vec())?;
        let mm = build_membership_model(&trimmed)?;
        let mut prefix = Vec::with_capacity(d + 2);
        for i in 0..d {
            prefix.push(mm.element_index[env_entry_checked(e, i, k)?]);
        }
        prefix.push(mm.d_index);
        prefix.push(mm.r_index);
        let dv = e.default_value();
        if dv >= k {
            return Err(PassError::EnvEntry { value: dv, size: k });
        }
        let default = mm.element_index[dv];
        Ok((mm.model, Env::new(prefix, default)))
    });

    let backward: super::Transport = Box::new(move |m: &FinModel, e: &Env| {
        let kk = m.size();
        let dv = env_entry_checked(e, d, kk)?;
        let rv = env_entry_checked(e, r, kk)?;
        let mut dom = Vec::new();
        for y in 0..kk {
            if m.relation_holds(MEM_REL, &[y, dv])? {
                dom.push(y);
            }
        }
        if dom.is_empty() {
            return Err(PassError::EmptyDecodedDomain);
        }
        let size = dom.len();
        let probe = tuple_mem(0, &(1..=arity).collect::<Vec<_>>(), MEM_REL);
        // One checker for all probe tuples; its caches carry across them.
        let mc = ModelChecker::new(m, &probe);
        let mut table = vec![false; size.pow(arity as u32)];
        for (i, t) in tuples(size, arity).enumerate() {
            let mut prefix = vec![rv];
            prefix.extend(t.iter().map(|&ci| dom[ci]));
            table[i] = mc.eval(&Env::new(prefix, 0))?;
        }
        let mut out = FinModel::new(size)?;
        out.set_relation(&pname, arity, table)?;
        let back = |v: usize| dom.binary_search(&v).unwrap_or(0);
        let prefix: Vec<usize> = (0..d).map(|i| back(e.lookup(i))).collect();
        Ok((out, Env::new(prefix, 0)))
    });

    Ok(ReductionStep {
        name: "compress_to_membership",
        source_sig: sig.clone(),
        target_sig: target,
        source_eq: None,
        target_eq: None,
        reserved_free: vec![d, r],
        formula,
        forward,
        backward,
    })
}
