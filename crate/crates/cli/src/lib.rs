//! Command implementations for the `kobdd` binary.
//!
//! Every command returns a [`Report`]: a human-readable text plus one JSON
//! record. Records carry `schema` and `command` keys and are printed on a
//! single line in `--json` mode. Keys are sorted, and nothing
//! time-dependent goes into a record, so a seeded run is byte-reproducible.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use kobdd_core::analysis::{
    block_split_partition, census_global_with, census_pi, census_theta_with, check_ak13, designed_pair, distinguish,
    hierarchy_gap, Ak13Verdict, BoolFunction, CutRange, DistinguishConfig, DistinguishOutcome, Partition, Phase,
    GLOBAL_LIMIT,
};
use kobdd_core::builder::{build, decode_layers, explain};
use kobdd_core::program::{export_dot, from_json, random_kobdd, to_json, validate_kobdd, TruthTable, VariableOrder};
use kobdd_core::saf::{ceil_log2, full_chain_input, min_valid_n, size_bound, BlockLayout, WitnessBuilder};
use kobdd_core::{AnalysisError, Assignment, ExtValue, LeveledProgram, ParamError, ProgramError, SafParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

/// Version of the machine-readable record layout.
pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "kobdd", version, about = "Build, evaluate and analyse k-OBDDs for the shuffled address function")]
pub struct Cli {
    /// Emit one JSON record per run instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check parameters, or print the smallest valid n.
    Params(ParamArgs),
    /// Build the 2k-layer program and report its metrics.
    Build(BuildArgs),
    /// Evaluate the function, or a serialized program, on one input.
    Eval(EvalArgs),
    /// Differential test of the built program against the reference evaluator.
    Check(CheckArgs),
    /// Validate a serialized program as a k-OBDD.
    Validate(ProgramFile),
    /// Count subfunctions of a truth table or a small program.
    Census(CensusArgs),
    /// Sweep random k-OBDDs against the subfunction ceiling.
    Bounds(BoundsArgs),
    /// Exact hierarchy comparison over a grid of (k, w).
    Gap(GapArgs),
    /// Export a program in Graphviz DOT.
    Dot(DotArgs),
    /// Search for inputs separating designed pairs of fixings.
    Distinguish(DistinguishArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(short)]
    pub k: usize,
    #[arg(short)]
    pub w: usize,
    #[arg(short)]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SafArgs {
    #[arg(short)]
    pub k: usize,
    #[arg(short)]
    pub w: usize,
    /// Defaults to the smallest valid n.
    #[arg(short)]
    pub n: Option<usize>,
    /// Waive the size inequality (block layout must still have value bits).
    #[arg(long)]
    pub relaxed: bool,
}

impl SafArgs {
    pub fn new(k: usize, w: usize, n: usize) -> Self {
        SafArgs { k, w, n: Some(n), relaxed: false }
    }

    fn params(&self) -> Result<SafParams, CliError> {
        let n = self.n.unwrap_or_else(|| min_valid_n(self.k.max(2), self.w.max(2)));
        let p = if self.relaxed { SafParams::relaxed(self.k, self.w, n) } else { SafParams::new(self.k, self.w, n) };
        Ok(p?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub saf: SafArgs,
    /// Write the serialized program here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub saf: SafArgs,
    /// Bit string with character j giving x_j, or `zeros` / `ones`.
    #[arg(long)]
    pub input: String,
    #[arg(long)]
    pub trace: bool,
    /// Evaluate this serialized program as well.
    #[arg(long)]
    pub program: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub saf: SafArgs,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Samples whose per-layer values are also decoded from the path.
    #[arg(long, default_value_t = 1_000)]
    pub decode: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ProgramFile {
    #[arg(long)]
    pub program: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct CensusArgs {
    /// Truth table, entry i is f at the input whose bit j is x_j.
    #[arg(long, conflicts_with = "program", required_unless_present = "program")]
    pub table: Option<String>,
    #[arg(long)]
    pub program: Option<PathBuf>,
    /// Order for the per-order count, comma separated (default identity).
    #[arg(long, value_delimiter = ',')]
    pub order: Option<Vec<usize>>,
    /// Prefix length for a single-partition count under `--order`.
    #[arg(long)]
    pub cut: Option<usize>,
    /// Exclude single-variable prefixes.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    #[arg(long, default_value_t = 1_000)]
    pub count: usize,
    #[arg(long, default_value_t = 3)]
    pub max_k: usize,
    #[arg(long, default_value_t = 2)]
    pub min_w: usize,
    #[arg(long, default_value_t = 3)]
    pub max_w: usize,
    #[arg(long, default_value_t = 6)]
    pub max_n: usize,
    #[arg(long, default_value_t = 2)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct GapArgs {
    /// Layer counts, comma separated.
    #[arg(short, value_delimiter = ',')]
    pub k: Vec<usize>,
    /// Widths, comma separated.
    #[arg(short, value_delimiter = ',')]
    pub w: Vec<usize>,
    /// Use k = 2..=64 and w in {64, 128, 256, 1024}.
    #[arg(long, conflicts_with_all = ["k", "w"])]
    pub grid: bool,
}

#[derive(Debug, Clone, Args)]
pub struct DotArgs {
    #[arg(long, conflicts_with_all = ["k", "w", "n"])]
    pub program: Option<PathBuf>,
    #[arg(short, required_unless_present = "program")]
    pub k: Option<usize>,
    #[arg(short, required_unless_present = "program")]
    pub w: Option<usize>,
    #[arg(short)]
    pub n: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DistinguishArgs {
    #[arg(short)]
    pub k: usize,
    #[arg(short)]
    pub w: usize,
    #[arg(long, default_value_t = 10)]
    pub pairs: usize,
    #[arg(long, default_value_t = 100_000)]
    pub budget: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Program(#[from] ProgramError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => EXIT_INTERNAL,
            CliError::Analysis(AnalysisError::NotKobdd(_)) => EXIT_VIOLATION,
            _ => EXIT_USAGE,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Params(_) => "params",
            CliError::Usage(_) => "usage",
            CliError::Program(_) => "program",
            CliError::Analysis(_) => "analysis",
            CliError::Io(_) => "io",
        }
    }

    pub fn to_record(&self, command: &str) -> Value {
        let mut r = json!({
            "schema": SCHEMA_VERSION,
            "command": command,
            "error": { "kind": self.kind(), "message": self.to_string() },
        });
        if let CliError::Params(ParamError::Inequality { suggest, .. } | ParamError::Divisibility { suggest, .. }) =
            self
        {
            r["error"]["suggest"] = json!(suggest);
        }
        r
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub text: String,
    pub record: Value,
    /// A checked property failed.
    pub violation: bool,
}

impl Report {
    fn new(command: &str, text: String, mut body: Value, violation: bool) -> Self {
        body["schema"] = json!(SCHEMA_VERSION);
        body["command"] = json!(command);
        body["ok"] = json!(!violation);
        Report { text, record: body, violation }
    }

    pub fn exit_code(&self) -> i32 {
        if self.violation {
            EXIT_VIOLATION
        } else {
            EXIT_OK
        }
    }

    pub fn json_line(&self) -> String {
        serde_json::to_string(&self.record).expect("records are plain JSON")
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Params(_) => "params",
            Command::Build(_) => "build",
            Command::Eval(_) => "eval",
            Command::Check(_) => "check",
            Command::Validate(_) => "validate",
            Command::Census(_) => "census",
            Command::Bounds(_) => "bounds",
            Command::Gap(_) => "gap",
            Command::Dot(_) => "dot",
            Command::Distinguish(_) => "distinguish",
        }
    }
}

pub fn run(command: &Command) -> Result<Report, CliError> {
    match command {
        Command::Params(a) => cmd_params(a),
        Command::Build(a) => cmd_build(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Check(a) => cmd_check(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Census(a) => cmd_census(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Gap(a) => cmd_gap(a),
        Command::Dot(a) => cmd_dot(a),
        Command::Distinguish(a) => cmd_distinguish(a),
    }
}

fn read_program(path: &Path) -> Result<LeveledProgram, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(from_json(&text)?)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn layout_json(l: &BlockLayout) -> Value {
    json!({
        "blocks": l.block_count,
        "a": l.a,
        "addr_bits": l.addr_bits,
        "k_bits": l.k_bits,
        "w_bits": l.w_bits,
        "b": l.b,
    })
}

fn ext_json(v: ExtValue) -> Value {
    match v {
        ExtValue::Fail => json!("FAIL"),
        ExtValue::Value(x) => json!(x),
    }
}

pub fn cmd_params(a: &ParamArgs) -> Result<Report, CliError> {
    let n = a.n.unwrap_or_else(|| min_valid_n(a.k.max(2), a.w.max(2)));
    let params = SafParams::new(a.k, a.w, n)?;
    let l = params.layout();
    let text = format!(
        "k = {}, w = {}, n = {} is valid\nbound 2kw(2w + ceil(log k) + ceil(log 2w)) = {} < n\nblocks {}, a = {}, address bits {} ({} + {}), value bits b = {}\n",
        a.k,
        a.w,
        n,
        size_bound(a.k, a.w),
        l.block_count,
        l.a,
        l.addr_bits,
        l.k_bits,
        l.w_bits,
        l.b
    );
    let body = json!({
        "k": a.k, "w": a.w, "n": n,
        "minimal": a.n.is_none(),
        "bound": size_bound(a.k, a.w),
        "layout": layout_json(&l),
    });
    Ok(Report::new("params", text, body, false))
}

/// Metrics of a built program plus the width and size checks.
pub fn build_summary(params: &SafParams, program: &LeveledProgram) -> Value {
    let m = program.metrics();
    let diag = validate_kobdd(program);
    let width_bound = 3 * params.w + 1;
    let roles = explain(program).max;
    json!({
        "k": params.k, "w": params.w, "n": params.n, "relaxed": params.relaxed,
        "layers": m.layer_count,
        "levels": program.level_count(),
        "width": m.width,
        "width_bound": width_bound,
        "width_ok": m.width <= width_bound,
        "size": m.size,
        "size_ceiling": m.size_ceiling,
        "size_bound_holds": m.size_bound_holds,
        "valid": diag.is_ok(),
        "violations": diag.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "max_roles": { "check": roles.check, "accum": roles.accum, "carry": roles.carry, "result": roles.result },
    })
}

pub fn cmd_build(a: &BuildArgs) -> Result<Report, CliError> {
    let params = a.saf.params()?;
    let program = build(&params)?;
    let mut body = build_summary(&params, &program);
    if let Some(out) = &a.out {
        write_file(out, &to_json(&program))?;
        body["out"] = json!(out.display().to_string());
    }
    let violation = !(body["valid"] == true && body["width_ok"] == true && body["layers"] == 2 * params.k);
    let text = format!(
        "built {} layers, {} levels\nwidth {} (bound 3w+1 = {})\nsize {} (ceiling w*n*layers = {}, strict: {})\nvalid k-OBDD: {}\n",
        body["layers"], body["levels"], body["width"], body["width_bound"], body["size"], body["size_ceiling"],
        body["size_bound_holds"], body["valid"]
    );
    Ok(Report::new("build", text, body, violation))
}

fn parse_input(s: &str, n: usize) -> Result<Assignment, CliError> {
    let x = match s {
        "zeros" => Assignment::zeros(n),
        "ones" => Assignment::ones(n),
        _ => s.parse::<Assignment>()?,
    };
    if x.len() != n {
        return Err(ProgramError::Arity { expected: n, got: x.len() }.into());
    }
    Ok(x)
}

pub fn cmd_eval(a: &EvalArgs) -> Result<Report, CliError> {
    let mut saf = a.saf.clone();
    if saf.n.is_none() && !matches!(a.input.as_str(), "zeros" | "ones") {
        saf.n = Some(a.input.len());
    }
    let params = saf.params()?;
    let layout = params.layout();
    let x = parse_input(&a.input, params.n)?;
    let tr = layout.trace(&x);
    let mut text = format!("output {}\n", tr.output as u8);
    let mut body = json!({ "k": params.k, "w": params.w, "n": params.n, "output": tr.output as u8 });
    let mut violation = false;
    if let Some(path) = &a.program {
        let program = read_program(path)?;
        let got = program.evaluate(&x)?;
        violation = got != tr.output;
        let _ = writeln!(text, "program output {} ({})", got as u8, if violation { "MISMATCH" } else { "agrees" });
        body["program_output"] = json!(got as u8);
    }
    if a.trace {
        let mut steps = Vec::new();
        for (t, s) in tr.steps.iter().enumerate() {
            let _ = writeln!(
                text,
                "step1({t}) = {:<5} block {}\nstep2({t}) = {:<5} block {}",
                s.step1.to_string(),
                s.block1.map_or("-".into(), |b| b.to_string()),
                s.step2.to_string(),
                s.block2.map_or("-".into(), |b| b.to_string()),
            );
            steps.push(json!({
                "t": t,
                "step1": ext_json(s.step1), "block1": s.block1,
                "step2": ext_json(s.step2), "block2": s.block2,
            }));
        }
        body["trace"] = json!(steps);
    }
    Ok(Report::new("eval", text, body, violation))
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Mismatch {
    input: String,
    source: String,
    expected: u8,
    got: u8,
}

/// Sample `i` of a check run: even indices are uniform bit strings, odd
/// indices are random inputs in which every step finds its block.
pub fn check_sample(layout: &BlockLayout, seed: u64, i: usize) -> Assignment {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    if i.is_multiple_of(2) {
        Assignment::new((0..layout.n).map(|_| rng.gen()).collect())
    } else {
        full_chain_input(layout, &mut rng)
    }
}

/// All-zeros, all-ones, and for every block `p` and address `(t, i)` an
/// input where only block `p` is set up, holding `(t, i)`.
pub fn structured_suite(layout: &BlockLayout) -> Vec<(String, Assignment)> {
    let mut out =
        vec![("zeros".to_string(), Assignment::zeros(layout.n)), ("ones".to_string(), Assignment::ones(layout.n))];
    for p in 0..layout.block_count {
        for t in 0..layout.k {
            for i in 0..2 * layout.w {
                let value = (p + t + i) % layout.w;
                let x = WitnessBuilder::new(layout).block(p, t, i, value).finish();
                out.push((format!("block {p} at ({t}, {i})"), x));
            }
        }
    }
    out
}

pub fn cmd_check(a: &CheckArgs) -> Result<Report, CliError> {
    let params = a.saf.params()?;
    let layout = params.layout();
    let program = build(&params)?;
    let suite = structured_suite(&layout);

    let compare = |source: String, x: &Assignment| -> Result<Option<Mismatch>, ProgramError> {
        let expected = layout.trace(x).output;
        let got = program.evaluate(x)?;
        Ok((expected != got).then(|| Mismatch {
            input: x.to_string(),
            source,
            expected: expected as u8,
            got: got as u8,
        }))
    };

    let mut mismatches: Vec<Mismatch> = (0..a.samples)
        .into_par_iter()
        .map(|i| compare(format!("sample {i}"), &check_sample(&layout, a.seed, i)))
        .filter_map(Result::transpose)
        .collect::<Result<_, _>>()?;
    for (name, x) in &suite {
        if let Some(m) = compare(name.clone(), x)? {
            mismatches.push(m);
        }
    }
    mismatches.sort();

    let decode_count = a.decode.min(a.samples);
    let layer_disagreements: Vec<usize> = (0..decode_count)
        .into_par_iter()
        .map(|i| {
            let x = check_sample(&layout, a.seed, i);
            let decoded = decode_layers(&program, &params, &x)?;
            Ok((decoded != layout.trace(&x).layer_values()).then_some(i))
        })
        .filter_map(Result::transpose)
        .collect::<Result<_, ProgramError>>()?;

    let violation = !mismatches.is_empty() || !layer_disagreements.is_empty();
    let mut text = format!(
        "{} random samples (seed {}) and {} structured inputs: {} mismatches\nper-layer decoding on {} samples: {} disagreements\n",
        a.samples,
        a.seed,
        suite.len(),
        mismatches.len(),
        decode_count,
        layer_disagreements.len()
    );
    for m in &mismatches {
        let _ = writeln!(text, "MISMATCH [{}] expected {} got {}: {}", m.source, m.expected, m.got, m.input);
    }
    let body = json!({
        "k": params.k, "w": params.w, "n": params.n, "seed": a.seed,
        "samples": a.samples,
        "structured": suite.len(),
        "mismatches": mismatches.iter().map(|m| json!({
            "input": m.input, "source": m.source, "expected": m.expected, "got": m.got,
        })).collect::<Vec<_>>(),
        "decoded": decode_count,
        "layer_disagreements": layer_disagreements,
    });
    Ok(Report::new("check", text, body, violation))
}

pub fn cmd_validate(a: &ProgramFile) -> Result<Report, CliError> {
    let program = read_program(&a.program)?;
    let diag = validate_kobdd(&program);
    let m = program.metrics();
    let mut text = format!(
        "{} layers, width {}, size {}\n{}\n",
        m.layer_count,
        m.width,
        m.size,
        if diag.is_ok() { "valid k-OBDD" } else { "not a k-OBDD" }
    );
    for v in &diag.violations {
        let _ = writeln!(text, "  {v}");
    }
    let body = json!({
        "n": program.n(),
        "layers": m.layer_count, "width": m.width, "size": m.size,
        "size_bound_holds": m.size_bound_holds,
        "valid": diag.is_ok(),
        "violations": diag.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
    });
    Ok(Report::new("validate", text, body, !diag.is_ok()))
}

pub fn cmd_census(a: &CensusArgs) -> Result<Report, CliError> {
    let f = match (&a.table, &a.program) {
        (Some(t), _) => BoolFunction::from_table(t.parse::<TruthTable>()?),
        (None, Some(p)) => BoolFunction::from_program(&read_program(p)?)?,
        (None, None) => return Err(CliError::Usage("give --table or --program".into())),
    };
    let n = f.arity();
    let range = if a.strict { CutRange::Strict } else { CutRange::Inclusive };
    let order = match &a.order {
        Some(o) => VariableOrder::new(o.clone())?,
        None => VariableOrder::identity(n),
    };
    if order.len() != n {
        return Err(CliError::Usage(format!("order has {} entries but the function has {n} variables", order.len())));
    }
    let n_theta = census_theta_with(&f, &order, range)?;
    let mut body = json!({
        "n": n,
        "cuts": if a.strict { "strict" } else { "inclusive" },
        "order": order.as_slice(),
        "n_theta": n_theta,
    });
    let mut text = format!("n = {n}\nN^theta for order {:?}: {n_theta}\n", order.as_slice());
    if let Some(cut) = a.cut {
        let pi = Partition::new(order.clone(), cut)?;
        let v = census_pi(&f, &pi)?;
        body["cut"] = json!(cut);
        body["n_pi"] = json!(v);
        let _ = writeln!(text, "N^pi at cut {cut}: {v}");
    }
    if n <= GLOBAL_LIMIT {
        let c = census_global_with(&f, range)?;
        body["n_global"] = json!(c.n_global);
        body["best_order"] = json!(c.order.as_slice());
        body["worst_cut"] = json!(c.worst_cut);
        let _ = writeln!(text, "N = {} (attained by order {:?})", c.n_global, c.order.as_slice());
    } else {
        body["n_global"] = Value::Null;
        let _ = writeln!(text, "N over all orders skipped: arity {n} exceeds the limit of {GLOBAL_LIMIT}");
    }
    Ok(Report::new("census", text, body, false))
}

/// Parameters of random program `i` in a bounds sweep.
pub fn sweep_shape(a: &BoundsArgs, i: usize) -> (usize, usize, usize, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    rng.set_stream(i as u64);
    let k = rng.gen_range(1..=a.max_k);
    let w = rng.gen_range(a.min_w..=a.max_w);
    let n = rng.gen_range(2.min(a.max_n)..=a.max_n);
    (k, w, n, rng.gen())
}

/// Index, shape, verdict and whether the strict size inequality held.
type SweepRow = (usize, (usize, usize, usize, u64), Ak13Verdict, bool);

pub fn cmd_bounds(a: &BoundsArgs) -> Result<Report, CliError> {
    if a.max_k == 0 || a.min_w == 0 || a.min_w > a.max_w || a.max_n == 0 {
        return Err(CliError::Usage("need max-k >= 1, 1 <= min-w <= max-w and max-n >= 1".into()));
    }
    if a.max_n > GLOBAL_LIMIT {
        return Err(AnalysisError::Arity { what: "global census", n: a.max_n, limit: GLOBAL_LIMIT }.into());
    }
    let results: Vec<SweepRow> = (0..a.count)
        .into_par_iter()
        .map(|i| {
            let shape = sweep_shape(a, i);
            let (k, w, n, seed) = shape;
            let p = random_kobdd(k, w, n, seed);
            let size_ok = p.metrics().size_bound_holds;
            check_ak13(&p).map(|v| (i, shape, v, size_ok))
        })
        .collect::<Result<_, _>>()?;
    let violations: Vec<Value> = results
        .iter()
        .filter(|r| !r.2.holds)
        .map(|(i, (k, w, n, seed), v, _)| {
            json!({
                "index": i, "k": k, "w": w, "n": n, "seed": seed,
                "census": v.census, "bound": v.bound.to_string(),
            })
        })
        .collect();
    let size_failures = results.iter().filter(|r| !r.3).count();
    let max_census = results.iter().map(|r| r.2.census).max().unwrap_or(0);
    let text = format!(
        "{} random k-OBDDs (k <= {}, w in {}..={}, n <= {}, seed {}): {} ceiling violations, {} strict size failures, largest N = {}\n",
        a.count, a.max_k, a.min_w, a.max_w, a.max_n, a.seed, violations.len(), size_failures, max_census
    );
    let violation = !violations.is_empty();
    let body = json!({
        "count": a.count, "seed": a.seed,
        "max_k": a.max_k, "min_w": a.min_w, "max_w": a.max_w, "max_n": a.max_n,
        "violations": violations,
        "size_failures": size_failures,
        "max_census": max_census,
    });
    Ok(Report::new("bounds", text, body, violation))
}

/// Prints a power exactly when it is short, otherwise as `base^exp`.
fn big_json(value: &num_bigint::BigUint, base: usize, exp: usize) -> Value {
    let bits = value.bits();
    json!({
        "power": format!("{base}^{exp}"),
        "bits": bits,
        "decimal": (bits <= 256).then(|| value.to_string()),
    })
}

pub fn cmd_gap(a: &GapArgs) -> Result<Report, CliError> {
    let (ks, ws): (Vec<usize>, Vec<usize>) =
        if a.grid { ((2..=64).collect(), vec![64, 128, 256, 1024]) } else { (a.k.clone(), a.w.clone()) };
    if ks.is_empty() || ws.is_empty() {
        return Err(CliError::Usage("give -k and -w, or --grid".into()));
    }
    let mut rows = Vec::new();
    let mut text = String::new();
    let mut first_separated = Vec::new();
    let mut violation = false;
    for &w in &ws {
        let mut first = None;
        for &k in &ks {
            let g = hierarchy_gap(k, w)?;
            if g.separated && first.is_none() {
                first = Some(k);
            }
            // Inside the stated range the comparison is expected to separate
            // from k = 6 on; smaller k is reported, not enforced.
            if k >= 6 && !g.separated {
                violation = true;
            }
            let _ = writeln!(
                text,
                "k = {k:>3}, w = {w:>5}: {}^{} vs {}^{} -> {}",
                g.witness.1,
                g.lhs_exponent(),
                g.small_width,
                g.rhs_exponent(),
                if g.separated { "separated" } else { "not separated" }
            );
            rows.push(json!({
                "k": k, "w": w,
                "witness": [g.witness.0, g.witness.1],
                "small_width": g.small_width,
                "lhs": big_json(&g.lhs, g.witness.1, g.lhs_exponent()),
                "rhs": big_json(&g.rhs, g.small_width, g.rhs_exponent()),
                "separated": g.separated,
                "in_stated_range": g.in_stated_range,
            }));
        }
        first_separated.push(json!({ "w": w, "k": first }));
    }
    let body = json!({ "rows": rows, "first_separated": first_separated });
    Ok(Report::new("gap", text, body, violation))
}

pub fn cmd_dot(a: &DotArgs) -> Result<Report, CliError> {
    let program = match (&a.program, a.k, a.w) {
        (Some(p), _, _) => read_program(p)?,
        (None, Some(k), Some(w)) => build(&SafArgs { k, w, n: a.n, relaxed: false }.params()?)?,
        _ => return Err(CliError::Usage("give --program, or -k and -w".into())),
    };
    let dot = export_dot(&program);
    let mut body = json!({ "nodes": program.metrics().size });
    let text = match &a.out {
        Some(out) => {
            write_file(out, &dot)?;
            body["out"] = json!(out.display().to_string());
            format!("wrote {}\n", out.display())
        }
        None => {
            body["dot"] = json!(dot);
            dot
        }
    };
    Ok(Report::new("dot", text, body, false))
}

/// Smallest relaxed input length with `w + 1` value bits per block.
pub fn tiny_n(k: usize, w: usize) -> usize {
    2 * k * w * (ceil_log2(k) + ceil_log2(2 * w) + w + 1)
}

/// Step/slot pairs that some input actually queries. Step 0 starts from
/// slot 0, so its other low slots are never read.
pub fn reachable_slots(k: usize, w: usize) -> Vec<(usize, usize)> {
    std::iter::once((0, 0)).chain((1..k).flat_map(|r| (0..w).map(move |z| (r, z)))).collect()
}

pub fn cmd_distinguish(a: &DistinguishArgs) -> Result<Report, CliError> {
    let params = SafParams::relaxed(a.k, a.w, tiny_n(a.k, a.w))?;
    let layout = params.layout();
    let pi = block_split_partition(&layout);
    let mut rows = Vec::new();
    let mut text = format!("k = {}, w = {}, n = {} (relaxed: {})\n", a.k, a.w, params.n, params.relaxed);
    let mut violation = false;
    let targets = reachable_slots(a.k, a.w);
    for j in 0..a.pairs {
        let (r, z) = targets[j % targets.len()];
        let seed = a.seed.wrapping_add(j as u64);
        let (s, sp) = designed_pair(&layout, r, z, seed);
        let out = distinguish(&params, &s, &sp, &pi, DistinguishConfig { budget: a.budget, seed })?;
        let (found, verified, phase, tried) = match &out {
            DistinguishOutcome::Found { gamma, phase, tried, .. } => {
                let mut x = Assignment::zeros(params.n);
                let mut y = Assignment::zeros(params.n);
                s.apply(&mut x);
                sp.apply(&mut y);
                gamma.apply(&mut x);
                gamma.apply(&mut y);
                let ok = layout.trace(&x).output != layout.trace(&y).output;
                (true, ok, Some(*phase), *tried)
            }
            DistinguishOutcome::NotFound { tried, .. } => (false, false, None, *tried),
        };
        violation |= !verified;
        let phase_name = phase.map(|p| match p {
            Phase::Structured => "structured",
            Phase::Random => "random",
        });
        let _ = writeln!(
            text,
            "pair {j} (step {r}, slot {z}): {} after {tried} candidates{}",
            if verified { "separated" } else { "NOT separated" },
            phase_name.map_or(String::new(), |p| format!(" ({p})"))
        );
        rows.push(json!({
            "r": r, "z": z, "seed": seed,
            "found": found, "verified": verified, "phase": phase_name, "tried": tried,
            "gamma": out.gamma().map(|g| g.bits().iter().map(|&b| if b { '1' } else { '0' }).collect::<String>()),
        }));
    }
    let body = json!({
        "k": a.k, "w": a.w, "n": params.n, "relaxed": params.relaxed,
        "budget": a.budget, "seed": a.seed,
        "pairs": rows,
    });
    Ok(Report::new("distinguish", text, body, violation))
}
