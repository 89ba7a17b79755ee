//! Command-line frontend: instance parsing, configuration resolution,
//! subcommand dispatch, and deterministic report emission.
//!
//! Configuration precedence is flags > instance-file `params` >
//! environment (`TRUMPKIT_MODE` supplies the default backend) >
//! built-in defaults. Instance files follow the schema
//! `{"x": [...], "y": [...], "z": [...]?, "params": {...}?}` with
//! unknown keys rejected; vector entries are JSON numbers or scalar
//! literal strings (`"2/5"`), and number literals are forwarded
//! verbatim so the exact backend parses `0.4` as exactly 4/10.
//!
//! Exit codes: 0 when the queried relation holds or a witness was
//! produced, 1 when it fails or no witness exists within the
//! configured caps, 2 for malformed input, cap overruns, or a
//! `--verify` disagreement.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalysis::{build_catalyst, build_catalyst_capped, verify_catalysis, verify_catalysis_capped};
use crate::closure;
use crate::criteria::{
    conjecture_report, conjecture_report_on, kyfan_dominates, kyfan_norm, ConditionRow,
    VerdictClass, COND2_DEFAULT_GRID, COND3_DEFAULT_GRID,
};
use crate::emit::{fmt_f64, Csv, Json};
use crate::error::{Error, Result};
use crate::ldp;
use crate::majorize::{majorizes, submajorizes, MajorizationVerdict, SchurReport};
use crate::multicopy::{find_min_copies, mlocc_check, mlocc_check_capped, CopySearchOutcome};
use crate::scalar::{le_within, parse_scalar, Scalar};
use crate::vecspace::{ProbVector, DEFAULT_N_MAX};

/// Exact re-verification gives up (and reports `"skipped"`) beyond
/// these sizes rather than stalling the primary run.
const VERIFY_SPECTRUM_CAP: u64 = 200_000;
const VERIFY_EXPANDED_CAP: u64 = 200_000;

/// Built catalysts larger than this are not inlined into the report.
const Z_INLINE_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// f64 arithmetic with tolerance-based comparisons.
    Float,
    /// BigRational arithmetic; verdicts are certificates.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EmitKind {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "trumpkit",
    version,
    about = "Majorization, multi-copy dominance, and catalysis toolkit",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Inline x: JSON array of numbers or scalar strings ("2/5").
    #[arg(long, global = true)]
    x: Option<String>,

    /// Inline y: same format as --x.
    #[arg(long, global = true)]
    y: Option<String>,

    /// Inline catalyst z (catalyst subcommand); may be unnormalized.
    #[arg(long, global = true)]
    z: Option<String>,

    /// Instance file {"x": [...], "y": [...], "z": [...]?, "params": {...}?}.
    #[arg(long, global = true)]
    file: Option<PathBuf>,

    /// Arithmetic backend; TRUMPKIT_MODE supplies the default.
    #[arg(long, value_enum, global = true)]
    mode: Option<Mode>,

    /// Comparison tolerance (float backend; exact is fixed at zero).
    #[arg(long, global = true)]
    tolerance: Option<f64>,

    /// Output format; defaults to json everywhere except ldp (csv).
    #[arg(long, value_enum, global = true)]
    emit: Option<EmitKind>,

    /// Re-run positive verdicts through the exact backend; disagreement
    /// aborts with exit code 2.
    #[arg(long, global = true)]
    verify: bool,

    /// Copy-count search bound (mlocc, approximate, catalyst --build).
    #[arg(long, global = true)]
    n_max: Option<u32>,

    /// Approximation budget ε as a scalar literal (approximate).
    #[arg(long, global = true)]
    eps: Option<String>,

    /// RNG seed (gen-corpus).
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide x ≺ y (prefix sums + equal mass), or x ≺_w y with --weak.
    Majorize {
        /// Weak submajorization: prefix sums only, mass unconstrained.
        #[arg(long)]
        weak: bool,
    },
    /// Find the smallest n ≤ n-max with x^{⊗n} ≺ y^{⊗n}.
    Mlocc,
    /// Verify a supplied catalyst z, or construct one with --build.
    Catalyst {
        /// Build the block-sum catalyst from a copy-count witness
        /// instead of verifying a supplied z.
        #[arg(long)]
        build: bool,
        /// Witness order for --build; defaults to the smallest passing n.
        #[arg(long)]
        n: Option<u32>,
        /// Write the built catalyst to this file instead of inlining it.
        #[arg(long)]
        z_out: Option<PathBuf>,
    },
    /// Construct x_ε with ‖x − x_ε‖₁ = ε and x_ε^{⊗n} ≺ y^{⊗n}.
    Approximate,
    /// Tabulate the limit tail profiles f and g (and exact finite-n
    /// columns for --n values). Float backend only.
    Ldp {
        /// Copy counts for exact fn@n columns (repeat or comma-separate).
        #[arg(long = "n", value_delimiter = ',')]
        n_values: Vec<u32>,
    },
    /// Three-family ℓp comparison report. Float backend only.
    Conjecture,
    /// Ky Fan cumulative-sum table and dominance verdict.
    Kyfan,
    /// Emit a deterministic random instance corpus (property-test
    /// harness input); seeded by --seed.
    GenCorpus {
        /// Number of instances.
        #[arg(long, default_value_t = 16)]
        count: u32,
        /// Maximum dimension per vector (2..=16).
        #[arg(long, default_value_t = 4)]
        dim: usize,
    },
}

/// Entry point used by the binary; parses `args`, runs, prints, and
/// maps the outcome to an exit code.
pub fn run<I, A>(args: I) -> ExitCode
where
    I: IntoIterator<Item = A>,
    A: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version go to stdout with code 0; usage errors to
            // stderr with clap's code 2 — both match our convention.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli, std::env::var("TRUMPKIT_MODE").ok()) {
        Ok((text, code)) => {
            print!("{text}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(cli: Cli, env_mode: Option<String>) -> Result<(String, u8)> {
    let resolved = resolve(&cli.common, env_mode)?;
    match (&cli.command, resolved.mode) {
        (Command::Ldp { .. } | Command::Conjecture, Mode::Exact) => Err(Error::InvalidInput(
            "this subcommand is analytic and runs on the float backend only".into(),
        )),
        (_, Mode::Float) => dispatch::<f64>(&cli.command, &resolved),
        (_, Mode::Exact) => dispatch::<BigRational>(&cli.command, &resolved),
    }
}

fn dispatch<T: Scalar>(command: &Command, r: &Resolved) -> Result<(String, u8)> {
    match command {
        Command::Majorize { weak } => cmd_majorize::<T>(r, *weak),
        Command::Mlocc => cmd_mlocc::<T>(r),
        Command::Catalyst { build, n, z_out } => cmd_catalyst::<T>(r, *build, *n, z_out),
        Command::Approximate => cmd_approximate::<T>(r),
        Command::Ldp { n_values } => cmd_ldp(r, n_values),
        Command::Conjecture => cmd_conjecture(r),
        Command::Kyfan => cmd_kyfan::<T>(r),
        Command::GenCorpus { count, dim } => cmd_gen_corpus::<T>(r, *count, *dim),
    }
}

// ---------------------------------------------------------------------
// Instance files and configuration resolution.

#[derive(Debug, Default, Clone)]
struct RawParams {
    eps: Option<String>,
    n: Option<u32>,
    n_max: Option<u32>,
    p_grid: Option<Vec<f64>>,
    t_grid: Option<Vec<f64>>,
    mode: Option<Mode>,
    tolerance: Option<f64>,
}

#[derive(Debug, Default, Clone)]
struct RawInstance {
    x: Option<Vec<String>>,
    y: Option<Vec<String>>,
    z: Option<Vec<String>>,
    params: RawParams,
}

/// Everything a subcommand needs, after precedence resolution. Vector
/// coordinates stay as literal texts so each backend parses them
/// natively (`"0.4"` becomes exactly 4/10 in exact mode).
#[derive(Debug, Clone)]
struct Resolved {
    mode: Mode,
    tolerance: Option<f64>,
    emit: Option<EmitKind>,
    verify: bool,
    n_max: u32,
    eps: Option<String>,
    n_param: Option<u32>,
    p_grid: Option<Vec<f64>>,
    t_grid: Option<Vec<f64>>,
    seed: u64,
    x: Option<Vec<String>>,
    y: Option<Vec<String>>,
    z: Option<Vec<String>>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn resolve(common: &Common, env_mode: Option<String>) -> Result<Resolved> {
    let mut inst = RawInstance::default();
    if let Some(path) = &common.file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        inst = parse_instance(&text)?;
    }
    if let Some(lit) = &common.x {
        inst.x = Some(parse_inline_vector(lit, "x")?);
    }
    if let Some(lit) = &common.y {
        inst.y = Some(parse_inline_vector(lit, "y")?);
    }
    if let Some(lit) = &common.z {
        inst.z = Some(parse_inline_vector(lit, "z")?);
    }

    let mode = match common.mode.or(inst.params.mode) {
        Some(m) => m,
        None => match env_mode.as_deref() {
            Some(s) => parse_mode(s)
                .ok_or_else(|| invalid(format!("TRUMPKIT_MODE must be 'float' or 'exact', got {s:?}")))?,
            None => Mode::Float,
        },
    };

    let tolerance = common.tolerance.or(inst.params.tolerance);
    if let Some(t) = tolerance {
        if !t.is_finite() || t < 0.0 {
            return Err(invalid(format!("tolerance must be a finite nonnegative float, got {t}")));
        }
        if mode == Mode::Exact && t != 0.0 {
            return Err(invalid(
                "the exact backend compares exactly; only --tolerance 0 is admissible there",
            ));
        }
    }

    let n_max = common.n_max.or(inst.params.n_max).unwrap_or(DEFAULT_N_MAX);
    if n_max == 0 {
        return Err(invalid("n-max must be positive"));
    }

    Ok(Resolved {
        mode,
        tolerance,
        emit: common.emit,
        verify: common.verify,
        n_max,
        eps: common.eps.clone().or(inst.params.eps),
        n_param: inst.params.n,
        p_grid: inst.params.p_grid,
        t_grid: inst.params.t_grid,
        seed: common.seed.unwrap_or(0),
        x: inst.x,
        y: inst.y,
        z: inst.z,
    })
}

fn parse_mode(s: &str) -> Option<Mode> {
    match s.to_ascii_lowercase().as_str() {
        "float" => Some(Mode::Float),
        "exact" => Some(Mode::Exact),
        _ => None,
    }
}

fn parse_instance(text: &str) -> Result<RawInstance> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| invalid(format!("instance JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| invalid("instance must be a JSON object"))?;
    let mut inst = RawInstance::default();
    for (key, val) in obj {
        match key.as_str() {
            "x" => inst.x = Some(vector_literals(val, "x")?),
            "y" => inst.y = Some(vector_literals(val, "y")?),
            "z" => inst.z = Some(vector_literals(val, "z")?),
            "params" => inst.params = parse_params(val)?,
            other => return Err(invalid(format!("unknown instance key {other:?}"))),
        }
    }
    Ok(inst)
}

fn parse_params(value: &serde_json::Value) -> Result<RawParams> {
    let obj = value
        .as_object()
        .ok_or_else(|| invalid("params must be a JSON object"))?;
    let mut p = RawParams::default();
    for (key, val) in obj {
        match key.as_str() {
            "eps" => p.eps = Some(scalar_literal(val, "params.eps")?),
            "n" => p.n = Some(small_uint(val, "params.n")?),
            "nMax" => p.n_max = Some(small_uint(val, "params.nMax")?),
            "pGrid" => p.p_grid = Some(float_array(val, "params.pGrid")?),
            "tGrid" => p.t_grid = Some(float_array(val, "params.tGrid")?),
            "mode" => {
                let s = val
                    .as_str()
                    .ok_or_else(|| invalid("params.mode must be a string"))?;
                p.mode = Some(
                    parse_mode(s)
                        .ok_or_else(|| invalid(format!("params.mode must be 'float' or 'exact', got {s:?}")))?,
                );
            }
            "tolerance" => p.tolerance = Some(float_value(val, "params.tolerance")?),
            other => return Err(invalid(format!("unknown params key {other:?}"))),
        }
    }
    Ok(p)
}

/// A vector is a JSON array whose entries are numbers (kept as their
/// literal text) or scalar strings.
fn vector_literals(value: &serde_json::Value, name: &str) -> Result<Vec<String>> {
    let arr = value
        .as_array()
        .ok_or_else(|| invalid(format!("{name} must be a JSON array")))?;
    arr.iter().map(|entry| scalar_literal(entry, name)).collect()
}

fn scalar_literal(value: &serde_json::Value, what: &str) -> Result<String> {
    match value {
        serde_json::Value::Number(n) => Ok(n.to_string()),
        serde_json::Value::String(s) => Ok(s.clone()),
        other => Err(invalid(format!("{what}: expected a number or scalar string, got {other}"))),
    }
}

fn small_uint(value: &serde_json::Value, what: &str) -> Result<u32> {
    value
        .as_u64()
        .and_then(|v| u32::try_from(v).ok())
        .filter(|&v| v > 0)
        .ok_or_else(|| invalid(format!("{what} must be a positive integer")))
}

fn float_value(value: &serde_json::Value, what: &str) -> Result<f64> {
    match value {
        serde_json::Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| invalid(format!("{what}: not a float"))),
        // Strings admit the non-finite literals JSON numbers cannot carry.
        serde_json::Value::String(s) => s
            .parse::<f64>()
            .map_err(|_| invalid(format!("{what}: unparseable float {s:?}"))),
        other => Err(invalid(format!("{what}: expected a float, got {other}"))),
    }
}

fn float_array(value: &serde_json::Value, what: &str) -> Result<Vec<f64>> {
    let arr = value
        .as_array()
        .ok_or_else(|| invalid(format!("{what} must be a JSON array")))?;
    if arr.is_empty() {
        return Err(invalid(format!("{what} must not be empty")));
    }
    arr.iter().map(|entry| float_value(entry, what)).collect()
}

fn parse_inline_vector(lit: &str, name: &str) -> Result<Vec<String>> {
    let value: serde_json::Value =
        serde_json::from_str(lit).map_err(|e| invalid(format!("--{name}: {e}")))?;
    vector_literals(&value, name)
}

fn build_vector<T: Scalar>(lits: &[String], name: &str) -> Result<Vec<T>> {
    lits.iter()
        .map(|s| {
            parse_scalar::<T>(s)
                .ok_or_else(|| invalid(format!("{name}: unparseable coordinate {s:?}")))
        })
        .collect()
}

/// A probability vector input (mass at most 1).
fn need_probability<T: Scalar>(lits: &Option<Vec<String>>, name: &str) -> Result<ProbVector<T>> {
    let lits = lits
        .as_ref()
        .ok_or_else(|| invalid(format!("missing vector {name}: pass --{name} or --file")))?;
    ProbVector::new(build_vector(lits, name)?)
}

/// A weight vector input (catalysts, Ky Fan s-vectors): mass free.
fn need_weights<T: Scalar>(lits: &Option<Vec<String>>, name: &str) -> Result<ProbVector<T>> {
    let lits = lits
        .as_ref()
        .ok_or_else(|| invalid(format!("missing vector {name}: pass --{name} or --file")))?;
    ProbVector::weights(build_vector(lits, name)?)
}

fn tol_for<T: Scalar>(r: &Resolved) -> T {
    match r.tolerance {
        Some(t) => T::from_f64_lossy(t).expect("validated finite"),
        None => T::default_tolerance(),
    }
}

// ---------------------------------------------------------------------
// Shared JSON builders.

fn biguint_json(k: &BigUint) -> Json {
    match k.to_u128() {
        Some(v) if v <= i128::MAX as u128 => Json::Int(v as i128),
        _ => Json::big(k),
    }
}

fn verdict_json(v: &MajorizationVerdict) -> Json {
    Json::obj()
        .push("holds", Json::Bool(v.holds))
        .push(
            "firstViolation",
            match &v.first_violation {
                Some(k) => biguint_json(k),
                None => Json::Null,
            },
        )
        .push("gap", Json::float(v.gap))
        .push("massEqual", Json::Bool(v.mass_equal))
}

fn norm_row_json(p: f64, x_norm: f64, y_norm: f64, ok: bool) -> Json {
    Json::obj()
        .push("p", Json::float(p))
        .push("xNorm", Json::float(x_norm))
        .push("yNorm", Json::float(y_norm))
        .push("ok", Json::Bool(ok))
}

fn schur_rows_json(report: &SchurReport) -> Json {
    Json::Arr(
        report
            .rows
            .iter()
            .map(|row| norm_row_json(row.p, row.x_norm, row.y_norm, row.ok))
            .collect(),
    )
}

fn condition_rows_json(rows: &[ConditionRow]) -> Json {
    Json::Arr(
        rows.iter()
            .map(|row| norm_row_json(row.p, row.x_norm, row.y_norm, row.ok))
            .collect(),
    )
}

fn verdict_cells(v: &MajorizationVerdict) -> Vec<String> {
    vec![
        v.holds.to_string(),
        v.first_violation
            .as_ref()
            .map(|k| k.to_string())
            .unwrap_or_default(),
        fmt_f64(v.gap),
        v.mass_equal.to_string(),
    ]
}

fn cell_scalar<T: Scalar>(v: &T) -> String {
    if T::EXACT {
        v.to_string()
    } else {
        fmt_f64(v.to_f64_lossy())
    }
}

fn render_json(doc: Json) -> String {
    doc.render() + "\n"
}

fn finish(r: &Resolved, default_emit: EmitKind, doc: Json, csv: Option<Csv>, code: u8) -> Result<(String, u8)> {
    match r.emit.unwrap_or(default_emit) {
        EmitKind::Json => Ok((render_json(doc), code)),
        EmitKind::Csv => match csv {
            Some(table) => Ok((table.render(), code)),
            None => Err(invalid("this report has no CSV form; use --emit json")),
        },
    }
}

// ---------------------------------------------------------------------
// Exact re-verification of positive verdicts.

fn exact_probability(r: &Resolved, axis: &str) -> Result<ProbVector<BigRational>> {
    let lits = match axis {
        "x" => &r.x,
        "y" => &r.y,
        _ => &r.z,
    };
    need_probability::<BigRational>(lits, axis)
}

fn agree(what: &str, primary: bool, exact: bool) -> Result<Json> {
    if primary == exact {
        Ok(Json::Bool(true))
    } else {
        Err(Error::VerificationFailed(format!(
            "{what}: primary verdict {primary}, exact oracle says {exact}"
        )))
    }
}

fn skip_on_caps(e: Error) -> Result<Option<Json>> {
    match e {
        Error::SpectrumCap { .. } | Error::DimensionCap { .. } => Ok(Some(Json::str("skipped"))),
        other => Err(other),
    }
}

fn verify_majorize(r: &Resolved, weak: bool, primary_holds: bool) -> Result<Json> {
    let x = exact_probability(r, "x")?;
    let y = exact_probability(r, "y")?;
    let zero = BigRational::zero();
    let v = if weak {
        submajorizes(&x, &y, &zero)
    } else {
        majorizes(&x, &y, &zero)
    };
    agree("majorize", primary_holds, v.holds)
}

fn verify_mlocc(r: &Resolved, primary_found: u32) -> Result<Json> {
    let x = exact_probability(r, "x")?;
    let y = exact_probability(r, "y")?;
    let zero = BigRational::zero();
    for n in 1..=r.n_max {
        match mlocc_check_capped(&x, &y, n, &zero, VERIFY_SPECTRUM_CAP) {
            Ok(v) if v.holds => {
                return if n == primary_found {
                    Ok(Json::Bool(true))
                } else {
                    Err(Error::VerificationFailed(format!(
                        "mlocc: primary found n = {primary_found}, exact oracle found n = {n}"
                    )))
                };
            }
            Ok(_) => {}
            Err(e) => {
                if let Some(skip) = skip_on_caps(e)? {
                    return Ok(skip);
                }
            }
        }
    }
    Err(Error::VerificationFailed(format!(
        "mlocc: primary found n = {primary_found}, exact oracle found none up to {}",
        r.n_max
    )))
}

fn verify_catalyst_supplied(r: &Resolved, primary_holds: bool) -> Result<Json> {
    let x = exact_probability(r, "x")?;
    let y = exact_probability(r, "y")?;
    let z = need_weights::<BigRational>(&r.z, "z")?;
    let zero = BigRational::zero();
    match verify_catalysis_capped(&x, &y, &z, &zero, VERIFY_EXPANDED_CAP) {
        Ok(v) => agree("catalyst", primary_holds, v.holds),
        Err(e) => Ok(skip_on_caps(e)?.expect("caps map to skip")),
    }
}

fn verify_catalyst_built(r: &Resolved, n: u32) -> Result<Json> {
    let x = exact_probability(r, "x")?;
    let y = exact_probability(r, "y")?;
    let zero = BigRational::zero();
    match build_catalyst_capped(&x, &y, n, &zero, VERIFY_EXPANDED_CAP) {
        Ok(w) => agree("catalyst build", true, w.verdict.holds),
        Err(Error::Precondition(msg)) => Err(Error::VerificationFailed(format!(
            "catalyst build at n = {n}: exact oracle rejects the order ({msg})"
        ))),
        Err(e) => Ok(skip_on_caps(e)?.expect("caps map to skip")),
    }
}

fn verify_approximate(r: &Resolved, eps_lit: &str) -> Result<Json> {
    let x = exact_probability(r, "x")?;
    let y = exact_probability(r, "y")?;
    let eps = parse_scalar::<BigRational>(eps_lit)
        .ok_or_else(|| invalid(format!("unparseable eps {eps_lit:?}")))?;
    let zero = BigRational::zero();
    match closure::approximate_capped(&x, &y, &eps, r.n_max, &zero, VERIFY_SPECTRUM_CAP) {
        Ok(res) => agree("approximate", true, res.verdict.holds),
        Err(Error::NormObstruction { .. }) | Err(Error::CopySearchExhausted { .. }) => {
            Err(Error::VerificationFailed(
                "approximate: primary produced a witness, exact oracle found none".into(),
            ))
        }
        Err(e) => Ok(skip_on_caps(e)?.expect("caps map to skip")),
    }
}

fn verify_kyfan(r: &Resolved, primary_holds: bool) -> Result<Json> {
    let x = need_weights::<BigRational>(&r.x, "x")?;
    let y = need_weights::<BigRational>(&r.y, "y")?;
    let zero = BigRational::zero();
    agree("kyfan", primary_holds, kyfan_dominates(&x, &y, &zero).holds)
}

// ---------------------------------------------------------------------
// Subcommands.

fn cmd_majorize<T: Scalar>(r: &Resolved, weak: bool) -> Result<(String, u8)> {
    let x = need_probability::<T>(&r.x, "x")?;
    let y = need_probability::<T>(&r.y, "y")?;
    let tol = tol_for::<T>(r);
    let verdict = if weak {
        submajorizes(&x, &y, &tol)
    } else {
        majorizes(&x, &y, &tol)
    };
    let mut doc = verdict_json(&verdict);
    if r.verify && verdict.holds {
        let note = if T::EXACT {
            Json::Bool(true)
        } else {
            verify_majorize(r, weak, verdict.holds)?
        };
        doc = doc.push("verified", note);
    }
    let mut table = Csv::new(
        ["holds", "firstViolation", "gap", "massEqual"]
            .map(String::from)
            .to_vec(),
    );
    table.row(verdict_cells(&verdict));
    finish(r, EmitKind::Json, doc, Some(table), u8::from(!verdict.holds))
}

fn cmd_mlocc<T: Scalar>(r: &Resolved) -> Result<(String, u8)> {
    let x = need_probability::<T>(&r.x, "x")?;
    let y = need_probability::<T>(&r.y, "y")?;
    let tol = tol_for::<T>(r);
    let outcome = find_min_copies(&x, &y, r.n_max, &tol)?;
    let mut table = Csv::new(
        ["outcome", "n", "holds", "firstViolation", "gap", "massEqual"]
            .map(String::from)
            .to_vec(),
    );
    match outcome {
        CopySearchOutcome::Found { n, verdict } => {
            let mut doc = Json::obj()
                .push("outcome", Json::str("found"))
                .push("n", Json::Int(n as i128))
                .push("nMax", Json::Int(r.n_max as i128))
                .push("verdict", verdict_json(&verdict));
            if r.verify {
                let note = if T::EXACT {
                    Json::Bool(true)
                } else {
                    verify_mlocc(r, n)?
                };
                doc = doc.push("verified", note);
            }
            let mut cells = vec!["found".to_string(), n.to_string()];
            cells.extend(verdict_cells(&verdict));
            table.row(cells);
            finish(r, EmitKind::Json, doc, Some(table), 0)
        }
        CopySearchOutcome::NormObstruction { report } => {
            let first = report.first_failure().expect("obstructed report has a failing row");
            let doc = Json::obj()
                .push("outcome", Json::str("normObstruction"))
                .push("nMax", Json::Int(r.n_max as i128))
                .push(
                    "firstFailure",
                    norm_row_json(first.p, first.x_norm, first.y_norm, first.ok),
                )
                .push("rows", schur_rows_json(&report));
            table.row(vec![
                "normObstruction".into(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ]);
            finish(r, EmitKind::Json, doc, Some(table), 1)
        }
        CopySearchOutcome::Exhausted {
            n_max,
            last_verdict,
            ..
        } => {
            let hint = closure::copy_count_hint(&x.to_f64(), &y.to_f64(), n_max);
            let doc = Json::obj()
                .push("outcome", Json::str("exhausted"))
                .push("nMax", Json::Int(n_max as i128))
                .push(
                    "hint",
                    hint.map(|h| Json::Int(h as i128)).unwrap_or(Json::Null),
                )
                .push(
                    "lastVerdict",
                    last_verdict
                        .as_ref()
                        .map(verdict_json)
                        .unwrap_or(Json::Null),
                );
            let mut cells = vec!["exhausted".to_string(), String::new()];
            match &last_verdict {
                Some(v) => cells.extend(verdict_cells(v)),
                None => cells.extend([String::new(), String::new(), String::new(), String::new()]),
            }
            table.row(cells);
            finish(r, EmitKind::Json, doc, Some(table), 1)
        }
    }
}

fn cmd_catalyst<T: Scalar>(
    r: &Resolved,
    build: bool,
    n_flag: Option<u32>,
    z_out: &Option<PathBuf>,
) -> Result<(String, u8)> {
    let x = need_probability::<T>(&r.x, "x")?;
    let y = need_probability::<T>(&r.y, "y")?;
    let tol = tol_for::<T>(r);

    if !build {
        let z = need_weights::<T>(&r.z, "z")?;
        let verdict = verify_catalysis(&x, &y, &z, &tol)?;
        let mut doc = Json::obj()
            .push("mode", Json::str("verify"))
            .push("zLen", Json::Int(z.len() as i128))
            .push("zMass", Json::scalar(&z.mass()))
            .push("verdict", verdict_json(&verdict));
        if r.verify && verdict.holds {
            let note = if T::EXACT {
                Json::Bool(true)
            } else {
                verify_catalyst_supplied(r, verdict.holds)?
            };
            doc = doc.push("verified", note);
        }
        let mut table = Csv::new(
            ["mode", "n", "zLen", "zMass", "holds", "firstViolation", "gap", "massEqual"]
                .map(String::from)
                .to_vec(),
        );
        let mut cells = vec![
            "verify".to_string(),
            String::new(),
            z.len().to_string(),
            cell_scalar(&z.mass()),
        ];
        cells.extend(verdict_cells(&verdict));
        table.row(cells);
        return finish(r, EmitKind::Json, doc, Some(table), u8::from(!verdict.holds));
    }

    if r.z.is_some() {
        return Err(invalid("--build conflicts with a supplied z; drop one of them"));
    }
    let n = match n_flag.or(r.n_param) {
        Some(n) => {
            let check = mlocc_check(&x, &y, n, &tol)?;
            if !check.holds {
                let doc = Json::obj()
                    .push("mode", Json::str("build"))
                    .push("error", Json::str("powerCheckFails"))
                    .push("n", Json::Int(n as i128))
                    .push("verdict", verdict_json(&check));
                return Ok((render_json(doc), 1));
            }
            n
        }
        None => match find_min_copies(&x, &y, r.n_max, &tol)? {
            CopySearchOutcome::Found { n, .. } => n,
            CopySearchOutcome::NormObstruction { report } => {
                let first = report.first_failure().expect("obstructed report has a failing row");
                let doc = Json::obj()
                    .push("mode", Json::str("build"))
                    .push("error", Json::str("normObstruction"))
                    .push(
                        "firstFailure",
                        norm_row_json(first.p, first.x_norm, first.y_norm, first.ok),
                    );
                return Ok((render_json(doc), 1));
            }
            CopySearchOutcome::Exhausted { n_max, .. } => {
                let hint = closure::copy_count_hint(&x.to_f64(), &y.to_f64(), n_max);
                let doc = Json::obj()
                    .push("mode", Json::str("build"))
                    .push("error", Json::str("copySearchExhausted"))
                    .push("nMax", Json::Int(n_max as i128))
                    .push(
                        "hint",
                        hint.map(|h| Json::Int(h as i128)).unwrap_or(Json::Null),
                    );
                return Ok((render_json(doc), 1));
            }
        },
    };

    let witness = build_catalyst(&x, &y, n, &tol)?;
    let (z_json, z_file) = match z_out {
        Some(path) => {
            let text = render_json(Json::scalars(witness.z.coords()));
            std::fs::write(path, text)
                .map_err(|e| invalid(format!("cannot write {}: {e}", path.display())))?;
            (Json::Null, Json::str(path.display().to_string()))
        }
        None if witness.z.len() <= Z_INLINE_CAP => (Json::scalars(witness.z.coords()), Json::Null),
        None => (Json::Null, Json::Null),
    };
    let mut doc = Json::obj()
        .push("mode", Json::str("build"))
        .push("n", Json::Int(witness.n as i128))
        .push("zLen", Json::Int(witness.z.len() as i128))
        .push("zMass", Json::scalar(&witness.z.mass()))
        .push("normalized", Json::Bool(witness.normalized))
        .push("z", z_json)
        .push("zFile", z_file)
        .push("verdict", verdict_json(&witness.verdict));
    if r.verify && witness.verdict.holds {
        let note = if T::EXACT {
            Json::Bool(true)
        } else {
            verify_catalyst_built(r, witness.n)?
        };
        doc = doc.push("verified", note);
    }
    let mut table = Csv::new(
        ["mode", "n", "zLen", "zMass", "holds", "firstViolation", "gap", "massEqual"]
            .map(String::from)
            .to_vec(),
    );
    let mut cells = vec![
        "build".to_string(),
        witness.n.to_string(),
        witness.z.len().to_string(),
        cell_scalar(&witness.z.mass()),
    ];
    cells.extend(verdict_cells(&witness.verdict));
    table.row(cells);
    finish(
        r,
        EmitKind::Json,
        doc,
        Some(table),
        u8::from(!witness.verdict.holds),
    )
}

fn cmd_approximate<T: Scalar>(r: &Resolved) -> Result<(String, u8)> {
    let x = need_probability::<T>(&r.x, "x")?;
    let y = need_probability::<T>(&r.y, "y")?;
    let tol = tol_for::<T>(r);
    let eps_lit = r
        .eps
        .clone()
        .ok_or_else(|| invalid("approximate needs --eps (or params.eps)"))?;
    let eps = parse_scalar::<T>(&eps_lit)
        .ok_or_else(|| invalid(format!("unparseable eps {eps_lit:?}")))?;

    match closure::approximate(&x, &y, &eps, r.n_max, &tol) {
        Ok(res) => {
            let attempts = Json::Arr(
                res.attempts
                    .iter()
                    .map(|(n, v)| {
                        Json::obj()
                            .push("n", Json::Int(*n as i128))
                            .push("verdict", verdict_json(v))
                    })
                    .collect(),
            );
            let mut doc = Json::obj()
                .push("n", Json::Int(res.n as i128))
                .push("delta", Json::scalar(&res.delta))
                .push("D", Json::big(&res.dust_count))
                .push("l1Error", Json::scalar(&res.l1_error))
                .push("epsilon", Json::scalar(&eps))
                .push("massXEps", Json::scalar(&res.x_eps.mass()))
                .push("xPrime", Json::scalars(res.x_prime.coords()))
                .push("attempts", attempts)
                .push("verdict", verdict_json(&res.verdict));
            if r.verify {
                let note = if T::EXACT {
                    Json::Bool(true)
                } else {
                    verify_approximate(r, &eps_lit)?
                };
                doc = doc.push("verified", note);
            }
            let mut table = Csv::new(
                ["n", "delta", "D", "l1Error", "holds"]
                    .map(String::from)
                    .to_vec(),
            );
            table.row(vec![
                res.n.to_string(),
                cell_scalar(&res.delta),
                res.dust_count.to_string(),
                cell_scalar(&res.l1_error),
                res.verdict.holds.to_string(),
            ]);
            finish(r, EmitKind::Json, doc, Some(table), 0)
        }
        Err(Error::NormObstruction { p, x_norm, y_norm }) => {
            let doc = Json::obj()
                .push("error", Json::str("normObstruction"))
                .push("p", Json::float(p))
                .push("xNorm", Json::float(x_norm))
                .push("yNorm", Json::float(y_norm));
            Ok((render_json(doc), 1))
        }
        Err(Error::CopySearchExhausted { n_max, hint }) => {
            let doc = Json::obj()
                .push("error", Json::str("copySearchExhausted"))
                .push("nMax", Json::Int(n_max as i128))
                .push(
                    "hint",
                    hint.map(|h| Json::Int(h as i128)).unwrap_or(Json::Null),
                );
            Ok((render_json(doc), 1))
        }
        Err(e) => Err(e),
    }
}

fn cmd_ldp(r: &Resolved, n_values: &[u32]) -> Result<(String, u8)> {
    let x = need_probability::<f64>(&r.x, "x")?;
    let y = need_probability::<f64>(&r.y, "y")?;
    let t_grid = match &r.t_grid {
        Some(grid) => {
            if grid.iter().any(|t| !t.is_finite()) {
                return Err(invalid("tGrid must hold finite floats"));
            }
            grid.clone()
        }
        None => ldp::default_t_grid(&x, &y),
    };
    let profile = ldp::limit_profiles(&x, &y, &t_grid)?;
    let mut fn_columns: Vec<(u32, Vec<f64>)> = Vec::new();
    for &n in n_values {
        if n == 0 {
            return Err(invalid("--n values must be positive"));
        }
        let values = t_grid
            .iter()
            .map(|&t| ldp::finite_tail(&x, n, t))
            .collect::<Result<Vec<_>>>()?;
        fn_columns.push((n, values));
    }

    let mut header: Vec<String> = ["t", "f", "g"].map(String::from).to_vec();
    header.extend(fn_columns.iter().map(|(n, _)| format!("fn@{n}")));
    let mut table = Csv::new(header);
    for (i, &t) in t_grid.iter().enumerate() {
        let mut cells = vec![
            fmt_f64(t),
            fmt_f64(profile.f_values[i]),
            fmt_f64(profile.g_values[i]),
        ];
        cells.extend(fn_columns.iter().map(|(_, vals)| fmt_f64(vals[i])));
        table.row(cells);
    }

    let doc = Json::obj()
        .push("tGrid", Json::floats(&t_grid))
        .push("f", Json::floats(&profile.f_values))
        .push("g", Json::floats(&profile.g_values))
        .push(
            "fn",
            Json::Arr(
                fn_columns
                    .iter()
                    .map(|(n, vals)| {
                        Json::obj()
                            .push("n", Json::Int(*n as i128))
                            .push("values", Json::floats(vals))
                    })
                    .collect(),
            ),
        )
        .push("meanX", Json::float(profile.mean_x))
        .push("meanY", Json::float(profile.mean_y))
        .push("supX", Json::float(profile.sup_x))
        .push("supY", Json::float(profile.sup_y))
        .push("lambdaDominates", Json::Bool(profile.lambda_dominates));
    finish(r, EmitKind::Csv, doc, Some(table), 0)
}

fn class_name(class: VerdictClass) -> &'static str {
    match class {
        VerdictClass::PassesAll => "passesAll",
        VerdictClass::Fails1 => "fails1",
        VerdictClass::Fails2Or3 => "fails2or3",
        VerdictClass::DegenerateSupport => "degenerateSupport",
    }
}

fn cmd_conjecture(r: &Resolved) -> Result<(String, u8)> {
    let x = need_probability::<f64>(&r.x, "x")?;
    let y = need_probability::<f64>(&r.y, "y")?;
    let report = match &r.p_grid {
        Some(grid) => {
            if grid.iter().any(|&p| p.is_nan() || p < 1.0) {
                return Err(invalid("pGrid exponents must satisfy p >= 1 (inf allowed)"));
            }
            conjecture_report_on(&x, &y, grid, &COND2_DEFAULT_GRID, &COND3_DEFAULT_GRID)
        }
        None => conjecture_report(&x, &y),
    };
    let mut doc = Json::obj()
        .push("class", Json::str(class_name(report.class)))
        .push("cond1", Json::Bool(report.cond1))
        .push("cond2", Json::Bool(report.cond2))
        .push("cond3", Json::Bool(report.cond3))
        .push("supportX", Json::Int(report.support_x as i128))
        .push("supportY", Json::Int(report.support_y as i128))
        .push("supportSensitive", Json::Bool(report.support_sensitive))
        .push("rows1", condition_rows_json(&report.rows1))
        .push("rows2", condition_rows_json(&report.rows2))
        .push("rows3", condition_rows_json(&report.rows3));
    if r.verify {
        // Real-exponent norms have no exact oracle; disclose rather
        // than silently accept the flag.
        doc = doc.push("verified", Json::str("skipped"));
    }
    let mut table = Csv::new(["family", "p", "xNorm", "yNorm", "ok"].map(String::from).to_vec());
    for (family, rows) in [(1, &report.rows1), (2, &report.rows2), (3, &report.rows3)] {
        for row in rows.iter() {
            table.row(vec![
                family.to_string(),
                fmt_f64(row.p),
                fmt_f64(row.x_norm),
                fmt_f64(row.y_norm),
                row.ok.to_string(),
            ]);
        }
    }
    let code = u8::from(report.class != VerdictClass::PassesAll);
    finish(r, EmitKind::Json, doc, Some(table), code)
}

fn cmd_kyfan<T: Scalar>(r: &Resolved) -> Result<(String, u8)> {
    let x = need_weights::<T>(&r.x, "x")?;
    let y = need_weights::<T>(&r.y, "y")?;
    let tol = tol_for::<T>(r);
    let verdict = kyfan_dominates(&x, &y, &tol);
    let k_max = x.trimmed_len().max(y.trimmed_len()).max(1);
    let mut rows = Vec::with_capacity(k_max);
    let mut table = Csv::new(["k", "x", "y", "ok"].map(String::from).to_vec());
    for k in 1..=k_max {
        let xk = kyfan_norm(&x, k);
        let yk = kyfan_norm(&y, k);
        let ok = le_within(&xk, &yk, &tol);
        rows.push(
            Json::obj()
                .push("k", Json::Int(k as i128))
                .push("x", Json::scalar(&xk))
                .push("y", Json::scalar(&yk))
                .push("ok", Json::Bool(ok)),
        );
        table.row(vec![
            k.to_string(),
            cell_scalar(&xk),
            cell_scalar(&yk),
            ok.to_string(),
        ]);
    }
    let mut doc = Json::obj()
        .push("dominates", Json::Bool(verdict.holds))
        .push("rows", Json::Arr(rows))
        .push("verdict", verdict_json(&verdict));
    if r.verify && verdict.holds {
        let note = if T::EXACT {
            Json::Bool(true)
        } else {
            verify_kyfan(r, verdict.holds)?
        };
        doc = doc.push("verified", note);
    }
    finish(r, EmitKind::Json, doc, Some(table), u8::from(!verdict.holds))
}

fn cmd_gen_corpus<T: Scalar>(r: &Resolved, count: u32, dim: usize) -> Result<(String, u8)> {
    if !(2..=16).contains(&dim) {
        return Err(invalid("gen-corpus --dim must lie in 2..=16"));
    }
    if count == 0 || count > 10_000 {
        return Err(invalid("gen-corpus --count must lie in 1..=10000"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(r.seed);
    let mut items = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let x = random_vector_json::<T>(&mut rng, dim);
        let y = random_vector_json::<T>(&mut rng, dim);
        items.push(Json::obj().push("x", x).push("y", y));
    }
    Ok((render_json(Json::Arr(items)), 0))
}

/// A random point of the simplex: normalized exponentials for the
/// float backend, an integer composition (`"w/q"` literals) for the
/// exact backend, so every emitted instance re-parses losslessly.
fn random_vector_json<T: Scalar>(rng: &mut ChaCha8Rng, dim_max: usize) -> Json {
    let d = rng.gen_range(2..=dim_max);
    if T::EXACT {
        let weights: Vec<u64> = (0..d).map(|_| rng.gen_range(1..=16)).collect();
        let q: u64 = weights.iter().sum();
        Json::Arr(
            weights
                .iter()
                .map(|w| Json::str(format!("{w}/{q}")))
                .collect(),
        )
    } else {
        let weights: Vec<f64> = (0..d).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
        let total: f64 = weights.iter().sum();
        Json::Arr(weights.iter().map(|w| Json::float(w / total)).collect())
    }
}
