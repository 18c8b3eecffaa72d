//! Command-line front end over the library, plus the JSON file formats.
//!
//! Every subcommand reads its inputs from files or inline strings, prints
//! exactly one JSON document on stdout, and reserves stderr for human
//! diagnostics. All emitted documents carry a `"format": 1` field. Exit
//! codes: 0 for sat or plain success, 1 for unsat or nothing found (the
//! `definitive` field says whether that verdict is final or bound-relative),
//! 2 for input errors, 3 for exceeded resource guards.
//!
//! Formats: signature `{"functions":{"f":2},"relations":{"P":2}}`; model
//! `{"size":k,"functions":{"f":[...]},"relations":{"P":[0,1,...]}}` with
//! tables in big-endian tuple order; env `{"prefix":[...],"default":0}`;
//! heap `[[addr,[v1,v2]],...]` with `null` for the empty value; stack
//! `{"prefix":[...],"default":null}`; card deck `[["1","11"],...]`.

use crate::bpcp::{
    bits_to_string, build_bn, encode_phi, extract_solution, sig_bpcp, solve_bpcp, BpcpError,
    BpcpInstance,
};
use crate::classify::classify_signature;
use crate::logic::{parse_formula, print_formula, Formula, LogicError, Signature};
use crate::monadic::{decide_monadic_full_with_guard, MonadicError, MonadicVerdict,
    DEFAULT_PREDICATE_GUARD};
use crate::passes::{
    add_congruence, close_formula, compact_symbols, compress_to_membership, embed_padding,
    lift_arity0_to1, merge_relations, pipeline_to_binary, propositional_collapse, rel2_to_fun,
    remove_constants, remove_functions, remove_monadic_functions, uniformize_arity, PassError,
    ReductionStep,
};
use crate::search::{enumerate_fsat, search_up_to, SearchConfig, SearchError, SearchOutcome};
use crate::semantics::{Env, FinModel, ModelChecker, ModelError};
use crate::seplog::{
    encode_fsat_to_msl, eval_sl, parse_sl, print_sl, Heap, SlError, SlValue, Stack,
};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const EXIT_SAT: i32 = 0;
pub const EXIT_UNSAT: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;
pub const EXIT_GUARD: i32 = 3;

/// Internal error carrying the exit code it maps to.
#[derive(Debug)]
struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> CliError {
        CliError {
            code: EXIT_INPUT_ERROR,
            message: message.into(),
        }
    }

    fn guard(message: impl Into<String>) -> CliError {
        CliError {
            code: EXIT_GUARD,
            message: message.into(),
        }
    }
}

impl From<LogicError> for CliError {
    fn from(e: LogicError) -> CliError {
        CliError::input(e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> CliError {
        CliError::input(e.to_string())
    }
}

impl From<SlError> for CliError {
    fn from(e: SlError) -> CliError {
        CliError::input(e.to_string())
    }
}

impl From<BpcpError> for CliError {
    fn from(e: BpcpError) -> CliError {
        CliError::input(e.to_string())
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> CliError {
        match e {
            SearchError::CandidateCeiling { .. } => CliError::guard(e.to_string()),
            other => CliError::input(other.to_string()),
        }
    }
}

impl From<MonadicError> for CliError {
    fn from(e: MonadicError) -> CliError {
        match e {
            MonadicError::GuardExceeded { .. } => CliError::guard(e.to_string()),
            other => CliError::input(other.to_string()),
        }
    }
}

impl From<PassError> for CliError {
    fn from(e: PassError) -> CliError {
        match e {
            PassError::WitnessScanTooLarge { .. } => CliError::guard(e.to_string()),
            other => CliError::input(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "finsat",
    version,
    about = "Finite-model workbench for first-order logic"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct SigFormula {
    /// Signature JSON file.
    #[arg(long)]
    sig: PathBuf,
    /// Formula in the s-expression grammar.
    #[arg(long)]
    formula: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluates a formula on an explicit model.
    Check {
        #[command(flatten)]
        common: SigFormula,
        /// Model JSON file.
        #[arg(long)]
        model: PathBuf,
        /// Environment JSON file; defaults to the constant-0 environment.
        #[arg(long)]
        env: Option<PathBuf>,
    },
    /// Searches for a model over domain sizes 1..=max-size.
    Solve {
        #[command(flatten)]
        common: SigFormula,
        #[arg(long, default_value_t = 4)]
        max_size: usize,
        /// Ceiling on candidate models times assignments per size.
        #[arg(long)]
        max_candidates: Option<u64>,
    },
    /// Semi-decides satisfiability with a fuel bound on the domain size.
    Enumerate {
        #[command(flatten)]
        common: SigFormula,
        #[arg(long)]
        fuel: usize,
        #[arg(long)]
        max_candidates: Option<u64>,
    },
    /// Complete decision for monadic and propositional signatures.
    DecideMonadic {
        #[command(flatten)]
        common: SigFormula,
        /// Maximum number of unary predicates after preprocessing.
        #[arg(long, default_value_t = DEFAULT_PREDICATE_GUARD)]
        guard: usize,
    },
    /// Quotients a model by indistinguishability over a formula's symbols.
    Minimize {
        #[command(flatten)]
        common: SigFormula,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        env: Option<PathBuf>,
    },
    /// Applies one named reduction pass and prints the result.
    Pass {
        /// Pass name, e.g. remove-functions or rel2-to-fun.
        name: String,
        #[command(flatten)]
        common: SigFormula,
        /// Arity parameter for uniformize-arity and rel2-to-fun.
        #[arg(long)]
        arity: Option<usize>,
        /// Equality relation name for add-congruence.
        #[arg(long)]
        eq: Option<String>,
        /// Target signature JSON file for embed-padding.
        #[arg(long)]
        target_sig: Option<PathBuf>,
    },
    /// Composed reduction chains.
    Pipeline {
        #[command(subcommand)]
        cmd: PipelineCmd,
    },
    /// Card deck solving, encoding, and solution extraction.
    Bpcp {
        #[command(subcommand)]
        cmd: BpcpCmd,
    },
    /// Separation logic encoding and heap checking.
    Seplog {
        #[command(subcommand)]
        cmd: SeplogCmd,
    },
    /// Decidability verdict for a signature.
    Classify {
        #[arg(long)]
        sig: PathBuf,
    },
}

#[derive(Subcommand)]
enum PipelineCmd {
    /// Reduces to a single binary membership relation.
    ToBinary {
        #[command(flatten)]
        common: SigFormula,
    },
}

#[derive(Subcommand)]
enum BpcpCmd {
    /// Searches for a solution by increasing length.
    Solve {
        /// Card deck JSON file: a list of pairs of 0/1 strings.
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
    },
    /// Prints the solvability encoding of the deck.
    Encode {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Builds the intended model over strings of length at most size.
    BuildModel {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        size: usize,
    },
    /// Extracts a solution from a model of the encoding.
    Extract {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        env: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SeplogCmd {
    /// Encodes one-binary-relation satisfiability into the minimal fragment.
    Encode {
        #[command(flatten)]
        common: SigFormula,
    },
    /// Evaluates a separation logic formula on a heap.
    Check {
        /// Formula in the separation logic grammar.
        #[arg(long)]
        formula: String,
        /// Heap JSON file.
        #[arg(long)]
        heap: PathBuf,
        /// Stack JSON file; defaults to the constant-null stack.
        #[arg(long)]
        stack: Option<PathBuf>,
        /// Cell bound for separating implication candidates.
        #[arg(long)]
        wand_bound: Option<usize>,
    },
}

/// Parses `args` and runs the selected subcommand, writing the JSON result
/// to `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = write!(out, "{e}");
            return EXIT_SAT;
        }
        Err(e) => {
            return fail(
                CliError::input(e.to_string().trim_end().to_string()),
                out,
                err,
            )
        }
    };
    match dispatch(cli.cmd) {
        Ok((doc, code)) => {
            let _ = writeln!(out, "{doc}");
            code
        }
        Err(e) => fail(e, out, err),
    }
}

fn fail(e: CliError, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let kind = if e.code == EXIT_GUARD { "guard" } else { "input" };
    let doc = json!({"format": 1, "error": {"code": e.code, "kind": kind, "message": e.message}});
    let _ = writeln!(out, "{doc}");
    let _ = writeln!(err, "error: {}", e.message);
    e.code
}

fn dispatch(cmd: Cmd) -> Result<(Value, i32), CliError> {
    match cmd {
        Cmd::Check { common, model, env } => check(common, &model, env.as_deref()),
        Cmd::Solve {
            common,
            max_size,
            max_candidates,
        } => solve(common, max_size, max_candidates, true),
        Cmd::Enumerate {
            common,
            fuel,
            max_candidates,
        } => solve(common, fuel, max_candidates, false),
        Cmd::DecideMonadic { common, guard } => decide_monadic(common, guard),
        Cmd::Minimize { common, model, env } => minimize(common, &model, env.as_deref()),
        Cmd::Pass {
            name,
            common,
            arity,
            eq,
            target_sig,
        } => pass(&name, common, arity, eq.as_deref(), target_sig.as_deref()),
        Cmd::Pipeline {
            cmd: PipelineCmd::ToBinary { common },
        } => pipeline(common),
        Cmd::Bpcp { cmd } => bpcp(cmd),
        Cmd::Seplog { cmd } => seplog(cmd),
        Cmd::Classify { sig } => classify(&sig),
    }
}

fn load_sig_formula(common: &SigFormula) -> Result<(Signature, Formula), CliError> {
    let sig = signature_from_json(&read_json(&common.sig)?)?;
    let phi = parse_formula(&common.formula, &sig)?;
    Ok((sig, phi))
}

fn check(common: SigFormula, model: &Path, env: Option<&Path>) -> Result<(Value, i32), CliError> {
    let (sig, phi) = load_sig_formula(&common)?;
    let m = model_from_json(&read_json(model)?, &sig)?;
    let e = match env {
        Some(path) => env_from_json(&read_json(path)?)?,
        None => Env::constant(0),
    };
    let sat = ModelChecker::new(&m, &phi).eval(&e)?;
    let doc = json!({"format": 1, "sat": sat, "definitive": true});
    Ok((doc, if sat { EXIT_SAT } else { EXIT_UNSAT }))
}

fn search_config(max_candidates: Option<u64>) -> SearchConfig {
    let mut cfg = SearchConfig::default();
    if let Some(n) = max_candidates {
        cfg.max_candidates = n as u128;
    }
    cfg
}

fn solve(
    common: SigFormula,
    bound: usize,
    max_candidates: Option<u64>,
    bounded_search: bool,
) -> Result<(Value, i32), CliError> {
    let (sig, phi) = load_sig_formula(&common)?;
    let cfg = search_config(max_candidates);
    let outcome = if bounded_search {
        search_up_to(&phi, &sig, bound, &cfg)?
    } else {
        enumerate_fsat(&phi, &sig, bound, &cfg)?
    };
    let bound_key = if bounded_search { "max_size" } else { "fuel" };
    match outcome {
        SearchOutcome::Sat { model, env } => {
            let doc = json!({
                "format": 1,
                "outcome": "sat",
                "definitive": true,
                "size": model.size(),
                "model": model_to_json(&model),
                "env": env_to_json(&env),
            });
            Ok((doc, EXIT_SAT))
        }
        _ => {
            let doc = json!({
                "format": 1,
                "outcome": "unsat",
                "definitive": false,
                bound_key: bound,
            });
            Ok((doc, EXIT_UNSAT))
        }
    }
}

fn decide_monadic(common: SigFormula, guard: usize) -> Result<(Value, i32), CliError> {
    let (sig, phi) = load_sig_formula(&common)?;
    match decide_monadic_full_with_guard(&phi, &sig, guard)? {
        MonadicVerdict::Sat { model, env } => {
            let doc = json!({
                "format": 1,
                "outcome": "sat",
                "definitive": true,
                "size": model.size(),
                "model": model_to_json(&model),
                "env": env_to_json(&env),
            });
            Ok((doc, EXIT_SAT))
        }
        MonadicVerdict::Unsat => {
            let doc = json!({"format": 1, "outcome": "unsat", "definitive": true});
            Ok((doc, EXIT_UNSAT))
        }
    }
}

fn minimize(common: SigFormula, model: &Path, env: Option<&Path>) -> Result<(Value, i32), CliError> {
    let (sig, phi) = load_sig_formula(&common)?;
    let m = model_from_json(&read_json(model)?, &sig)?;
    let e = match env {
        Some(path) => env_from_json(&read_json(path)?)?,
        None => Env::constant(0),
    };
    let (small, small_env) = crate::bisim::minimize_model(&m, &e, &phi)?;
    let doc = json!({
        "format": 1,
        "size": small.size(),
        "model": model_to_json(&small),
        "env": env_to_json(&small_env),
    });
    Ok((doc, EXIT_SAT))
}

const PASS_NAMES: &[&str] = &[
    "add-congruence",
    "close-formula",
    "compact-symbols",
    "compress-to-membership",
    "embed-padding",
    "lift-arity0-to1",
    "merge-relations",
    "propositional-collapse",
    "rel2-to-fun",
    "remove-constants",
    "remove-functions",
    "remove-monadic-functions",
    "uniformize-arity",
];

fn pass(
    name: &str,
    common: SigFormula,
    arity: Option<usize>,
    eq: Option<&str>,
    target_sig: Option<&Path>,
) -> Result<(Value, i32), CliError> {
    let (sig, phi) = load_sig_formula(&common)?;
    let need_arity =
        || arity.ok_or_else(|| CliError::input(format!("pass `{name}` needs --arity")));
    let step = match name {
        "add-congruence" => {
            let eq = eq.ok_or_else(|| CliError::input("pass `add-congruence` needs --eq"))?;
            add_congruence(&phi, &sig, eq)?
        }
        "close-formula" => close_formula(&phi, &sig)?,
        "compact-symbols" => compact_symbols(&phi, &sig)?,
        "compress-to-membership" => compress_to_membership(&phi, &sig)?,
        "embed-padding" => {
            let path = target_sig
                .ok_or_else(|| CliError::input("pass `embed-padding` needs --target-sig"))?;
            let target = signature_from_json(&read_json(path)?)?;
            embed_padding(&phi, &sig, &target)?
        }
        "lift-arity0-to1" => lift_arity0_to1(&phi, &sig)?,
        "merge-relations" => merge_relations(&phi, &sig)?,
        "propositional-collapse" => propositional_collapse(&phi, &sig)?,
        "rel2-to-fun" => rel2_to_fun(&phi, &sig, need_arity()?)?,
        "remove-constants" => remove_constants(&phi, &sig)?,
        "remove-functions" => remove_functions(&phi, &sig)?,
        "remove-monadic-functions" => remove_monadic_functions(&phi, &sig)?,
        "uniformize-arity" => uniformize_arity(&phi, &sig, need_arity()?)?,
        _ => {
            return Err(CliError::input(format!(
                "unknown pass `{name}`; known passes: {}",
                PASS_NAMES.join(", ")
            )))
        }
    };
    Ok((step_to_json(&step), EXIT_SAT))
}

fn step_to_json(step: &ReductionStep) -> Value {
    json!({
        "format": 1,
        "pass": step.name.replace('_', "-"),
        "formula": print_formula(&step.formula),
        "source_sig": signature_to_json(&step.source_sig),
        "target_sig": signature_to_json(&step.target_sig),
        "source_eq": step.source_eq,
        "target_eq": step.target_eq,
        "reserved_free": step.reserved_free,
    })
}

fn pipeline(common: SigFormula) -> Result<(Value, i32), CliError> {
    let (sig, phi) = load_sig_formula(&common)?;
    let steps = pipeline_to_binary(&phi, &sig)?;
    let (formula, target) = match steps.last() {
        Some(last) => (last.formula.clone(), last.target_sig.clone()),
        None => (phi, sig),
    };
    let names: Vec<String> = steps.iter().map(|s| s.name.replace('_', "-")).collect();
    let doc = json!({
        "format": 1,
        "passes": names,
        "formula": print_formula(&formula),
        "target_sig": signature_to_json(&target),
    });
    Ok((doc, EXIT_SAT))
}

fn bpcp(cmd: BpcpCmd) -> Result<(Value, i32), CliError> {
    match cmd {
        BpcpCmd::Solve { instance, max_len } => {
            let deck = instance_from_json(&read_json(&instance)?)?;
            match solve_bpcp(&deck, max_len) {
                Some(s) => {
                    let doc = json!({
                        "format": 1,
                        "solution": bits_to_string(&s),
                        "length": s.len(),
                        "definitive": true,
                    });
                    Ok((doc, EXIT_SAT))
                }
                None => {
                    let doc = json!({
                        "format": 1,
                        "solution": Value::Null,
                        "max_len": max_len,
                        "definitive": false,
                    });
                    Ok((doc, EXIT_UNSAT))
                }
            }
        }
        BpcpCmd::Encode { instance } => {
            let deck = instance_from_json(&read_json(&instance)?)?;
            let doc = json!({
                "format": 1,
                "formula": print_formula(&encode_phi(&deck)),
                "signature": signature_to_json(&sig_bpcp()),
            });
            Ok((doc, EXIT_SAT))
        }
        BpcpCmd::BuildModel { instance, size } => {
            let deck = instance_from_json(&read_json(&instance)?)?;
            let (m, e) = build_bn(&deck, size)?;
            let doc = json!({
                "format": 1,
                "size": m.size(),
                "model": model_to_json(&m),
                "env": env_to_json(&e),
            });
            Ok((doc, EXIT_SAT))
        }
        BpcpCmd::Extract {
            instance,
            model,
            env,
        } => {
            let deck = instance_from_json(&read_json(&instance)?)?;
            let m = model_from_json(&read_json(&model)?, &sig_bpcp())?;
            let e = match env {
                Some(path) => env_from_json(&read_json(&path)?)?,
                None => Env::constant(0),
            };
            let s = extract_solution(&deck, &m, &e)?;
            let doc = json!({
                "format": 1,
                "solution": bits_to_string(&s),
                "length": s.len(),
            });
            Ok((doc, EXIT_SAT))
        }
    }
}

fn seplog(cmd: SeplogCmd) -> Result<(Value, i32), CliError> {
    match cmd {
        SeplogCmd::Encode { common } => {
            let (sig, phi) = load_sig_formula(&common)?;
            let encoded = encode_fsat_to_msl(&phi, &sig)?;
            let doc = json!({"format": 1, "formula": print_sl(&encoded)});
            Ok((doc, EXIT_SAT))
        }
        SeplogCmd::Check {
            formula,
            heap,
            stack,
            wand_bound,
        } => {
            let phi = parse_sl(&formula)?;
            let h = heap_from_json(&read_json(&heap)?)?;
            let s = match stack {
                Some(path) => stack_from_json(&read_json(&path)?)?,
                None => Stack::constant(None),
            };
            let result = eval_sl(&h, &s, &phi, None, wand_bound)?;
            let doc = json!({
                "format": 1,
                "sat": result.value,
                "definitive": !result.wand_bounded,
                "wand_bounded": result.wand_bounded,
            });
            Ok((doc, if result.value { EXIT_SAT } else { EXIT_UNSAT }))
        }
    }
}

fn classify(sig_path: &Path) -> Result<(Value, i32), CliError> {
    let sig = signature_from_json(&read_json(sig_path)?)?;
    let c = classify_signature(&sig);
    let doc = json!({
        "format": 1,
        "verdict": c.verdict.family(),
        "case": c.verdict.case(),
        "enumerable": c.enumerable,
        "note": c.note,
    });
    Ok((doc, EXIT_SAT))
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("{}: invalid JSON: {e}", path.display())))
}

fn check_format(v: &Value) -> Result<(), CliError> {
    match v.get("format") {
        None => Ok(()),
        Some(f) if f == &json!(1) => Ok(()),
        Some(f) => Err(CliError::input(format!("unsupported format {f}"))),
    }
}

fn as_usize(v: &Value, what: &str) -> Result<usize, CliError> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| CliError::input(format!("{what} must be a nonnegative integer, got {v}")))
}

fn arity_map<'v>(v: &'v Value, key: &str) -> Result<Option<&'v Map<String, Value>>, CliError> {
    match v.get(key) {
        None => Ok(None),
        Some(section) => section
            .as_object()
            .map(Some)
            .ok_or_else(|| CliError::input(format!("`{key}` must be an object"))),
    }
}

/// Signature JSON: `{"functions":{"f":2},"relations":{"P":2}}`.
fn signature_from_json(v: &Value) -> Result<Signature, CliError> {
    check_format(v)?;
    let mut sig = Signature::new();
    if let Some(funs) = arity_map(v, "functions")? {
        for (name, arity) in funs {
            sig.add_function(name, as_usize(arity, "function arity")?)?;
        }
    }
    if let Some(rels) = arity_map(v, "relations")? {
        for (name, arity) in rels {
            sig.add_relation(name, as_usize(arity, "relation arity")?)?;
        }
    }
    Ok(sig)
}

fn signature_to_json(sig: &Signature) -> Value {
    let funs: Map<String, Value> = sig
        .functions()
        .iter()
        .map(|(n, a)| (n.clone(), json!(a)))
        .collect();
    let rels: Map<String, Value> = sig
        .relations()
        .iter()
        .map(|(n, a)| (n.clone(), json!(a)))
        .collect();
    json!({"functions": funs, "relations": rels})
}

/// Model JSON: `{"size":k,"functions":{"f":[...]},"relations":{"P":[0,1]}}`.
/// Arities come from the signature; tables use the big-endian tuple index.
fn model_from_json(v: &Value, sig: &Signature) -> Result<FinModel, CliError> {
    check_format(v)?;
    let size = as_usize(
        v.get("size")
            .ok_or_else(|| CliError::input("model JSON needs a `size` field"))?,
        "size",
    )?;
    let mut m = FinModel::new(size)?;
    if let Some(funs) = arity_map(v, "functions")? {
        for (name, table) in funs {
            let arity = sig
                .function_arity(name)
                .ok_or_else(|| CliError::input(format!("function `{name}` not in signature")))?;
            let entries = table
                .as_array()
                .ok_or_else(|| CliError::input(format!("table for `{name}` must be an array")))?;
            let mut t = Vec::with_capacity(entries.len());
            for e in entries {
                t.push(as_usize(e, "table entry")?);
            }
            m.set_function(name, arity, t)?;
        }
    }
    if let Some(rels) = arity_map(v, "relations")? {
        for (name, table) in rels {
            let arity = sig
                .relation_arity(name)
                .ok_or_else(|| CliError::input(format!("relation `{name}` not in signature")))?;
            let entries = table
                .as_array()
                .ok_or_else(|| CliError::input(format!("table for `{name}` must be an array")))?;
            let mut t = Vec::with_capacity(entries.len());
            for e in entries {
                let bit = match e {
                    Value::Bool(b) => *b,
                    Value::Number(_) => as_usize(e, "relation bit")? == 1,
                    _ => return Err(CliError::input(format!("bad relation bit {e}"))),
                };
                t.push(bit);
            }
            m.set_relation(name, arity, t)?;
        }
    }
    Ok(m)
}

fn model_to_json(m: &FinModel) -> Value {
    let mut funs = Map::new();
    let mut names: Vec<&str> = m.function_names().collect();
    names.sort_unstable();
    for name in names {
        let (_, table) = m.function(name).expect("listed function");
        funs.insert(name.to_string(), json!(table));
    }
    let mut rels = Map::new();
    let mut names: Vec<&str> = m.relation_names().collect();
    names.sort_unstable();
    for name in names {
        let (_, table) = m.relation(name).expect("listed relation");
        let bits: Vec<u8> = table.iter().map(|b| u8::from(*b)).collect();
        rels.insert(name.to_string(), json!(bits));
    }
    json!({"format": 1, "size": m.size(), "functions": funs, "relations": rels})
}

/// Env JSON: `{"prefix":[...],"default":0}`.
fn env_from_json(v: &Value) -> Result<Env, CliError> {
    check_format(v)?;
    let mut prefix = Vec::new();
    if let Some(p) = v.get("prefix") {
        let entries = p
            .as_array()
            .ok_or_else(|| CliError::input("`prefix` must be an array"))?;
        for e in entries {
            prefix.push(as_usize(e, "prefix entry")?);
        }
    }
    let default = match v.get("default") {
        Some(d) => as_usize(d, "default")?,
        None => 0,
    };
    Ok(Env::new(prefix, default))
}

fn env_to_json(e: &Env) -> Value {
    json!({"format": 1, "prefix": e.prefix(), "default": e.default_value()})
}

fn sl_value_from_json(v: &Value) -> Result<SlValue, CliError> {
    match v {
        Value::Null => Ok(None),
        _ => Ok(Some(as_usize(v, "address")?)),
    }
}

/// Heap JSON: `[[addr,[v1,v2]],...]` with `null` for the empty value.
fn heap_from_json(v: &Value) -> Result<Heap, CliError> {
    let entries = v
        .as_array()
        .ok_or_else(|| CliError::input("heap JSON must be an array of cells"))?;
    let mut cells = Vec::with_capacity(entries.len());
    for e in entries {
        let pair = e
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| CliError::input(format!("heap cell must be [addr,[v1,v2]], got {e}")))?;
        let addr = as_usize(&pair[0], "cell address")?;
        let vals = pair[1]
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| CliError::input(format!("cell contents must be [v1,v2], got {e}")))?;
        cells.push((
            addr,
            (sl_value_from_json(&vals[0])?, sl_value_from_json(&vals[1])?),
        ));
    }
    Ok(Heap::new(cells)?)
}

/// Stack JSON: `{"prefix":[...],"default":null}` with `null` for the empty
/// value.
fn stack_from_json(v: &Value) -> Result<Stack, CliError> {
    check_format(v)?;
    let mut prefix = Vec::new();
    if let Some(p) = v.get("prefix") {
        let entries = p
            .as_array()
            .ok_or_else(|| CliError::input("`prefix` must be an array"))?;
        for e in entries {
            prefix.push(sl_value_from_json(e)?);
        }
    }
    let default = match v.get("default") {
        Some(d) => sl_value_from_json(d)?,
        None => None,
    };
    Ok(Stack::new(prefix, default))
}

/// Card deck JSON: `[["1","11"],["10","0"]]`.
fn instance_from_json(v: &Value) -> Result<BpcpInstance, CliError> {
    let entries = v
        .as_array()
        .ok_or_else(|| CliError::input("card deck JSON must be an array of pairs"))?;
    let mut cards = Vec::with_capacity(entries.len());
    for e in entries {
        let pair = e
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| CliError::input(format!("card must be a pair of strings, got {e}")))?;
        let side = |v: &Value| -> Result<String, CliError> {
            v.as_str()
                .map(String::from)
                .ok_or_else(|| CliError::input(format!("card side must be a string, got {v}")))
        };
        cards.push((side(&pair[0])?, side(&pair[1])?));
    }
    let borrowed: Vec<(&str, &str)> = cards.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    Ok(BpcpInstance::from_strings(&borrowed)?)
}
