//! Passes that trade a binary relation for function structure: encoding
//! pairs as fresh domain elements behind an n-ary function, and embedding
//! the result into an arbitrary richer signature.

use super::{env_entry_checked, fresh_name, map_atoms, relativize, sig_names, PassError, ReductionStep};
use crate::logic::{Formula, Signature, Term};
use crate::semantics::{tuples, Env, FinModel, ModelError};

fn check_rel2_source(sig: &Signature) -> Result<String, PassError> {
    if let Some((f, _)) = sig.functions().first() {
        return Err(PassError::UnexpectedFunction { name: f.clone() });
    }
    if sig.relations().len() != 1 {
        return Err(PassError::NotSingleRelation {
            found: sig.relations().len(),
        });
    }
    let (pname, arity) = sig.relations()[0].clone();
    if arity != 2 {
        return Err(PassError::UnexpectedRelation { name: pname, arity });
    }
    Ok(pname)
}

/// Encodes one binary relation through an `n`-ary pairing function and a
/// unary predicate: the atom `P(s, t)` becomes `Q(f(s, t, ..., t))`. The
/// reserved free variable holds a marker element from which the original
/// domain is recovered, so quantifiers are relativized to marked elements.
pub fn rel2_to_fun(phi: &Formula, sig: &Signature, n: usize) -> Result<ReductionStep, PassError> {
    sig.validate_formula(phi)?;
    let pname = check_rel2_source(sig)?;
    if n < 2 {
        return Err(PassError::PairingArity { n });
    }

    let mut taken = sig_names(sig);
    let f = fresh_name("f", &mut taken);
    let q = fresh_name("Q", &mut taken);
    let mut target = Signature::new();
    target.add_function(&f, n)?;
    target.add_relation(&q, 1)?;

    let d = phi.fresh_free();
    let guarded = |head: Term, rest: Term| {
        let mut args = vec![head];
        args.extend(std::iter::repeat(rest).take(n - 1));
        Formula::atom(q.clone(), vec![Term::app(f.clone(), args)])
    };
    let guard = |depth: usize| guarded(Term::var(d + depth), Term::var(0));

    let mut parts = vec![Formula::exists(guard(1))];
    for v in phi.free_vars() {
        parts.push(guarded(Term::var(d), Term::var(v)));
    }
    parts.push(relativize(
        phi,
        &mut |_, args, _| guarded(args[0].clone(), args[1].clone()),
        &guard,
    ));
    let formula = Formula::conj(parts);

    let f_f = f.clone();
    let q_f = q.clone();
    let pname_f = pname.clone();
    let forward: super::Transport = Box::new(move |m: &FinModel, e: &Env| {
        let k = m.size();
        let k2 = k + k * k + k + 1;
        let bot = k + k * k + k;
        let pair = |a: usize, b: usize| k + a * k + b;
        let mark = |x: usize| k + k * k + x;
        let mut out = FinModel::new(k2)?;
        let mut ftable = vec![0usize; k2.pow(n as u32)];
        for (i, args) in tuples(k2, n).enumerate() {
            ftable[i] = if args[0] == bot && args[1] < k {
                mark(args[1])
            } else if args[0] < k && args[1] < k {
                pair(args[0], args[1])
            } else {
                bot
            };
        }
        out.set_function(&f_f, n, ftable)?;
        let (_, ptable) = m.relation(&pname_f).ok_or(ModelError::MissingSymbol {
            name: pname_f.clone(),
        })?;
        let mut qtable = vec![false; k2];
        for x in 0..k {
            qtable[mark(x)] = true;
        }
        for a in 0..k {
            for b in 0..k {
                if ptable[a * k + b] {
                    qtable[pair(a, b)] = true;
                }
            }
        }
        out.set_relation(&q_f, 1, qtable)?;
        let mut prefix: Vec<usize> = (0..d)
            .map(|i| env_entry_checked(e, i, k))
            .collect::<Result<_, _>>()?;
        prefix.push(bot);
        let dv = e.default_value();
        if dv >= k {
            return Err(PassError::EnvEntry { value: dv, size: k });
        }
        Ok((out, Env::new(prefix, dv)))
    });

    let backward: super::Transport = Box::new(move |m: &FinModel, e: &Env| {
        let kk = m.size();
        let dv = env_entry_checked(e, d, kk)?;
        let probe = |m: &FinModel, head: usize, rest: usize| -> Result<bool, PassError> {
            let mut args = vec![head];
            args.extend(std::iter::repeat(rest).take(n - 1));
            let v = m.apply_function(&f, &args)?;
            Ok(m.relation_holds(&q, &[v])?)
        };
        let mut dom = Vec::new();
        for x in 0..kk {
            if probe(m, dv, x)? {
                dom.push(x);
            }
        }
        if dom.is_empty() {
            return Err(PassError::EmptyDecodedDomain);
        }
        let size = dom.len();
        let mut table = vec![false; size * size];
        for (i, t) in tuples(size, 2).enumerate() {
            table[i] = probe(m, dom[t[0]], dom[t[1]])?;
        }
        let mut out = FinModel::new(size)?;
        out.set_relation(&pname, 2, table)?;
        let back = |v: usize| dom.binary_search(&v).unwrap_or(0);
        let prefix: Vec<usize> = (0..d).map(|i| back(e.lookup(i))).collect();
        Ok((out, Env::new(prefix, 0)))
    });

    Ok(ReductionStep {
        name: "rel2_to_fun",
        source_sig: sig.clone(),
        target_sig: target,
        source_eq: None,
        target_eq: None,
        reserved_free: vec![d],
        formula,
        forward,
        backward,
    })
}

/// Embeds a single binary relation into an arbitrary signature that has
/// room for it: either a relation of arity at least 2 absorbs it by
/// argument padding, or a function of arity at least 2 plus a unary
/// relation carry it through the pairing encoding.
pub fn embed_padding(
    phi: &Formula,
    sig: &Signature,
    target_sig: &Signature,
) -> Result<ReductionStep, PassError> {
    sig.validate_formula(phi)?;
    let pname = check_rel2_source(sig)?;

    if let Some((rname, ra)) = target_sig
        .relations()
        .iter()
        .find(|(_, a)| *a >= 2)
        .cloned()
    {
        let rname_f = rname.clone();
        let formula = map_atoms(phi, &mut |_, args, _| {
            let mut new_args = vec![args[0].clone()];
            while new_args.len() < ra {
                new_args.push(args[1].clone());
            }
            Formula::atom(rname_f.clone(), new_args)
        });
        let tsig = target_sig.clone();
        let pname_f = pname.clone();
        let rname_fwd = rname.clone();
        let forward: super::Transport = Box::new(move |m: &FinModel, e: &Env| {
            let k = m.size();
            let mut out = FinModel::canonical(&tsig, k)?;
            let mut table = vec![false; k.pow(ra as u32)];
            for (i, w) in tuples(k, ra).enumerate() {
                table[i] = w[2..].iter().all(|&v| v == w[1])
                    && m.relation_holds(&pname_f, &[w[0], w[1]])?;
            }
            out.set_relation(&rname_fwd, ra, table)?;
            Ok((out, e.clone()))
        });
        let backward: super::Transport = Box::new(move |m: &FinModel, e: &Env| {
            let k = m.size();
            let mut table = vec![false; k * k];
            for (i, t) in tuples(k, 2).enumerate() {
                let mut args = vec![t[0]];
                while args.len() < ra {
                    args.push(t[1]);
                }
                table[i] = m.relation_holds(&rname, &args)?;
            }
            let mut out = FinModel::new(k)?;
            out.set_relation(&pname, 2, table)?;
            Ok((out, e.clone()))
        });
        return Ok(ReductionStep {
            name: "embed_padding",
            source_sig: sig.clone(),
            target_sig: target_sig.clone(),
            source_eq: None,
            target_eq: None,
            reserved_free: Vec::new(),
            formula,
            forward,
            backward,
        });
    }

    let fun = target_sig.functions().iter().find(|(_, a)| *a >= 2).cloned();
    let unary = target_sig
        .relations()
        .iter()
        .find(|(_, a)| *a == 1)
        .cloned();
    let (Some((gname, ga)), Some((uname, _))) = (fun, unary) else {
        return Err(PassError::MissingTarget {
            needed: "a relation of arity at least 2, or a function of arity at least 2 \
                     beside a unary relation"
                .to_string(),
        });
    };

    let inner = rel2_to_fun(phi, sig, ga)?;
    let fname = inner.target_sig.functions()[0].0.clone();
    let qname = inner.target_sig.relations()[0].0.clone();

    fn rename_term(t: &Term, from: &str, to: &str) -> Term {
        match t {
            Term::Var(v) => Term::var(*v),
            Term::App(f, args) => {
                let name = if f == from { to } else { f.as_str() };
                Term::app(
                    name,
                    args.iter().map(|a| rename_term(a, from, to)).collect(),
                )
            }
        }
    }
    let gname_m = gname.clone();
    let uname_m = uname.clone();
    let fname_m = fname.clone();
    let qname_m = qname.clone();
    let formula = map_atoms(&inner.formula, &mut |r, args, _| {
        let name = if r == qname_m { uname_m.clone() } else { r.to_string() };
        Formula::atom(
            name,
            args.iter()
                .map(|t| rename_term(t, &fname_m, &gname_m))
                .collect(),
        )
    });

    let reserved = inner.reserved_free.clone();
    let tsig = target_sig.clone();
    let gname_f = gname.clone();
    let uname_f = uname.clone();
    let fname_f = fname.clone();
    let qname_f = qname.clone();
    let inner_f = std::sync::Arc::new(inner);
    let inner_b = inner_f.clone();
    let forward: super::Transport = Box::new(move |m: &FinModel, e: &Env| {
        let (im, ie) = inner_f.forward(m, e)?;
        let (_, ftable) = im.function(&fname_f).expect("pairing function built");
        let (_, qtable) = im.relation(&qname_f).expect("marker relation built");
        let mut out = FinModel::canonical(&tsig, im.size())?;
        out.set_function(&gname_f, ga, ftable.to_vec())?;
        out.set_relation(&uname_f, 1, qtable.to_vec())?;
        Ok((out, ie))
    });
    let backward: super::Transport = Box::new(move |m: &FinModel, e: &Env| {
        let (_, gtable) = m.function(&gname).ok_or(ModelError::MissingSymbol {
            name: gname.clone(),
        })?;
        let (_, utable) = m.relation(&uname).ok_or(ModelError::MissingSymbol {
            name: uname.clone(),
        })?;
        let mut jm = FinModel::new(m.size())?;
        jm.set_function(&fname, ga, gtable.to_vec())?;
        jm.set_relation(&qname, 1, utable.to_vec())?;
        inner_b.backward(&jm, e)
    });

    Ok(ReductionStep {
        name: "embed_padding",
        source_sig: sig.clone(),
        target_sig: target_sig.clone(),
        source_eq: None,
        target_eq: None,
        reserved_free: reserved,
        formula,
        forward,
        backward,
    })
}
