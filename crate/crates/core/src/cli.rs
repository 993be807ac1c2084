//! `simonls` command-line front end.
//!
//! Exit status: 0 success, 1 a verification step failed, 2 usage or input error.

use std::collections::HashSet;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::anf_props::{classify_top, g_anf, system_solutions, theorem2_system, Forced, PropertyCase};
use crate::boolfn::{plant_periods, plant_r_type, plant_structure, random_subspace, Anf, MultiTruthTable, PlantSpec, TruthTable};
use crate::error::Error;
use crate::gf2::{BitMatrix, BitVector, Subspace, DEFAULT_N_CAP};
use crate::linstruct::{self, RunConfig, StructureReport};
use crate::oracle;
use crate::probmodel;
use crate::sat3::{self, Cnf3, PatternCase};
use crate::seed::{self, derive_seed};
use crate::sim;

const SCHEMA: &str = "1";

#[derive(Parser, Debug)]
#[command(
    name = "simonls",
    version,
    about = "Simulated Simon-style sampling for linear structures of Boolean functions",
    after_help = "Exit status: 0 success, 1 verification failure, 2 usage or input error.\n\
                  The default seed 0x53494D4F4E spells \"SIMON\" in ASCII."
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalOpts {
    /// Master seed, decimal or 0x-prefixed hex
    #[arg(long, global = true, default_value = "0x53494D4F4E", value_parser = parse_seed)]
    seed: u64,
    /// Refuse inputs with more variables than this (at most 24)
    #[arg(long, global = true, default_value_t = DEFAULT_N_CAP)]
    n_cap: usize,
    /// Write the main output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format where a command supports both
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Recover the zero-class linear structures (or periods) of a function
    Find(FindArgs),
    /// Run collapse-and-measure rounds and print the sampled y vectors
    Sample(SampleArgs),
    /// Exhaustive autocorrelation spectrum and structure sets
    Oracle(OracleArgs),
    /// Full-rank probability table and its self-checks
    Prob(ProbArgs),
    /// Structure conditions read off an algebraic normal form
    Anf(AnfArgs),
    /// 3-CNF reduction, brute-force solving and coefficient-pattern checks
    Sat3(Sat3Args),
    /// Generate a function with known structures or periods
    Plant(PlantArgs),
    /// Time the spectrum transform and one structure search per n
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Simple,
    Iterative,
    Periods,
}

#[derive(Args, Debug)]
struct FindArgs {
    /// Function file, or - for stdin
    #[arg(long = "f")]
    file: String,
    #[arg(long, value_enum, default_value = "simple")]
    mode: Mode,
    /// Sampling round cap [default: 8n]
    #[arg(long)]
    rounds_cap: Option<usize>,
    /// Random checks per candidate basis vector [default: max(64, 4n)]
    #[arg(long)]
    verify_p: Option<u64>,
    /// Compare the result with the exhaustive oracle
    #[arg(long)]
    oracle_check: bool,
}

#[derive(Args, Debug)]
struct SampleArgs {
    /// Function file, or - for stdin
    #[arg(long = "f")]
    file: String,
    /// Anchor file (one bitstring per line) or random:K [default: random:n]
    #[arg(long)]
    anchors: Option<String>,
    /// Number of rounds [default: n]
    #[arg(long)]
    rounds: Option<usize>,
    /// JSON-lines trace destination [default: stderr]
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    /// Function file, or - for stdin
    #[arg(long = "f")]
    file: String,
    /// List directions failing constancy on at most R inputs instead
    #[arg(long = "r-type", value_name = "R")]
    r_type: Option<u64>,
}

#[derive(Args, Debug)]
struct ProbArgs {
    #[arg(long, required_unless_present = "verify")]
    n: Option<usize>,
    /// Last k in the table [default: n + 20]
    #[arg(long)]
    kmax: Option<usize>,
    /// Also write the CSV table to this path
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Check the recurrence against direct summation and a rank experiment
    #[arg(long)]
    verify: bool,
    /// Trials per (n, k) in the rank experiment
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
}

#[derive(Args, Debug)]
struct AnfArgs {
    /// Polynomial such as "x1*x2 + x3 + 1"
    #[arg(long)]
    anf: String,
    /// Variable count [default: highest index used]
    #[arg(long)]
    n: Option<usize>,
    /// Report the top-degree verdict
    #[arg(long)]
    classify: bool,
    /// List every coefficient condition and the solution set
    #[arg(long)]
    system: bool,
    /// Test one shift, written x_1 first
    #[arg(long, value_name = "BITS")]
    check_s: Option<String>,
}

#[derive(Args, Debug)]
struct Sat3Args {
    /// DIMACS file, or - for stdin
    #[arg(long)]
    cnf: Option<String>,
    /// Print the product-equation system
    #[arg(long)]
    reduce: bool,
    /// Solve the system by enumeration and cross-check the formula
    #[arg(long)]
    solve: bool,
    /// Check a coefficient pattern: 1, 2a, 2b, 2c or all
    #[arg(long, value_name = "CASE")]
    verify_theorem4: Option<String>,
    /// Pattern size [default: every k from the case minimum to 8]
    #[arg(long)]
    k: Option<usize>,
    /// Ambient variable count for pattern checks
    #[arg(long, default_value_t = 12)]
    n: usize,
    /// Random index draws per (case, k)
    #[arg(long, default_value_t = 100)]
    trials: u64,
}

#[derive(Args, Debug)]
struct PlantArgs {
    #[arg(long)]
    n: usize,
    /// Dimension of the planted structure or period space
    #[arg(long)]
    dim: usize,
    /// Flip R extra points after planting to make pseudo structures
    #[arg(long)]
    r: Option<u64>,
    /// Emit a multi-output function with the span as its periods
    #[arg(long)]
    periods: bool,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, default_value_t = 1)]
    n_min: usize,
    #[arg(long, default_value_t = 17)]
    n_max: usize,
    /// Repetitions per n; the minimum time is reported
    #[arg(long, default_value_t = 5)]
    reps: usize,
    /// Smallest n whose ratio to n-1 is checked
    #[arg(long, default_value_t = 14)]
    trend_from: usize,
    /// Report timings without enforcing the scaling band
    #[arg(long)]
    no_trend_check: bool,
}

/// Failure classes that map onto exit codes.
#[derive(Debug)]
enum CliError {
    Usage(String),
    Verification(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("i/o error: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn parse_seed(s: &str) -> std::result::Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

/// Entry point used by the binary: real stdio, returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    2
                }
            };
        }
    };
    match dispatch(&cli, out, err) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(CliError::Verification(msg)) => {
            let _ = writeln!(err, "verification failed: {msg}");
            1
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    let g = &cli.global;
    if g.n_cap > DEFAULT_N_CAP {
        return Err(CliError::Usage(format!("--n-cap may not exceed {DEFAULT_N_CAP}")));
    }
    let mut body = String::new();
    let outcome = match &cli.command {
        Command::Find(a) => cmd_find(g, a, &mut body),
        Command::Sample(a) => cmd_sample(g, a, &mut body, err),
        Command::Oracle(a) => cmd_oracle(g, a, &mut body),
        Command::Prob(a) => cmd_prob(g, a, &mut body),
        Command::Anf(a) => cmd_anf(g, a, &mut body),
        Command::Sat3(a) => cmd_sat3(g, a, &mut body),
        Command::Plant(a) => cmd_plant(g, a, &mut body, err),
        Command::Bench(a) => cmd_bench(g, a, &mut body),
    };
    // reports are emitted even when a verification step failed
    if !body.is_empty() {
        match &g.out {
            Some(path) => std::fs::write(path, &body)?,
            None => out.write_all(body.as_bytes())?,
        }
    }
    outcome
}

fn read_input(path: &str) -> CliResult<String> {
    let text = if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(Path::new(path)).map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?
    };
    if text.trim().is_empty() {
        return Err(CliError::Usage(format!("input {path} is empty")));
    }
    Ok(text)
}

fn check_cap(n: usize, cap: usize) -> CliResult<()> {
    if n > cap {
        return Err(CliError::Usage(format!("n = {n} exceeds --n-cap {cap}")));
    }
    Ok(())
}

fn load_table(path: &str, cap: usize) -> CliResult<TruthTable> {
    let f = TruthTable::parse_file(&read_input(path)?)?;
    check_cap(f.vars(), cap)?;
    Ok(f)
}

fn json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn basis_strings(v: &Subspace) -> Vec<String> {
    v.basis_vectors().map(|b| b.to_string()).collect()
}

fn matrix_strings(m: &BitMatrix) -> Vec<String> {
    m.rows().map(|r| r.to_string()).collect()
}

#[derive(Serialize)]
struct Witness {
    x: String,
    b: String,
}

#[derive(Serialize)]
struct StructureJson<'a> {
    schema: &'a str,
    mode: &'a str,
    n: usize,
    seed: u64,
    candidate: Vec<String>,
    candidate_dim: usize,
    verified: bool,
    witness: Option<Witness>,
    rounds_used: usize,
    passes: usize,
    stabilized: bool,
    ys_collected: Vec<String>,
    oracle_u0: Option<Vec<String>>,
    oracle_agrees: Option<bool>,
    pseudo_flag: bool,
}

#[derive(Serialize)]
struct PeriodJson<'a> {
    schema: &'a str,
    mode: &'a str,
    n: usize,
    seed: u64,
    periods: Vec<String>,
    periods_dim: usize,
    rounds_used: usize,
    stabilized: bool,
    ys_collected: Vec<String>,
    oracle_periods: Option<Vec<String>>,
    oracle_agrees: Option<bool>,
}

fn run_config(n: usize, g: &GlobalOpts, a: &FindArgs) -> CliResult<RunConfig> {
    let mut cfg = RunConfig::for_n(n).with_seed(g.seed);
    if let Some(r) = a.rounds_cap {
        cfg.rounds_cap = r;
    }
    if let Some(p) = a.verify_p {
        cfg.verify_p = p;
    }
    cfg.oracle_check = a.oracle_check;
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_find(g: &GlobalOpts, a: &FindArgs, body: &mut String) -> CliResult<()> {
    if g.format == Some(Format::Csv) {
        return Err(CliError::Usage("find reports are JSON only".into()));
    }
    if a.mode == Mode::Periods {
        let f = MultiTruthTable::parse_file(&read_input(&a.file)?)?;
        check_cap(f.vars(), g.n_cap)?;
        let cfg = run_config(f.vars(), g, a)?;
        let r = linstruct::find_periods(&f, &cfg)?;
        let oracle = if a.oracle_check { Some(oracle::brute_periods(&f)?) } else { None };
        let agrees = oracle.as_ref().map(|o| *o == r.periods);
        body.push_str(&json(&PeriodJson {
            schema: SCHEMA,
            mode: "periods",
            n: f.vars(),
            seed: g.seed,
            periods: basis_strings(&r.periods),
            periods_dim: r.periods.dim(),
            rounds_used: r.rounds_used,
            stabilized: r.stabilized,
            ys_collected: matrix_strings(&r.ys_collected),
            oracle_periods: oracle.as_ref().map(basis_strings),
            oracle_agrees: agrees,
        }));
        return match agrees {
            Some(false) => Err(CliError::Verification("recovered periods differ from the exhaustive answer".into())),
            _ => Ok(()),
        };
    }
    let f = load_table(&a.file, g.n_cap)?;
    let cfg = run_config(f.vars(), g, a)?;
    let (mode, r): (&str, StructureReport) = match a.mode {
        Mode::Simple => ("simple", linstruct::find_structure_simple(&f, &cfg)?),
        _ => ("iterative", linstruct::find_structure_iterative(&f, &cfg)?),
    };
    body.push_str(&json(&StructureJson {
        schema: SCHEMA,
        mode,
        n: f.vars(),
        seed: g.seed,
        candidate: basis_strings(&r.candidate),
        candidate_dim: r.candidate.dim(),
        verified: r.verified,
        witness: r.witness.map(|(x, b)| Witness { x: x.to_string(), b: b.to_string() }),
        rounds_used: r.rounds_used,
        passes: r.passes,
        stabilized: r.stabilized,
        ys_collected: matrix_strings(&r.ys_collected),
        oracle_u0: r.oracle_u0.as_ref().map(basis_strings),
        oracle_agrees: r.oracle_agrees(),
        pseudo_flag: r.pseudo_flag,
    }));
    if !r.verified {
        Err(CliError::Verification("a candidate basis vector failed the sampled check".into()))
    } else if r.pseudo_flag || r.oracle_agrees() == Some(false) {
        Err(CliError::Verification("candidate passed sampling but differs from the exhaustive answer".into()))
    } else if !r.stabilized {
        Err(CliError::Verification("sampling budget ran out before convergence".into()))
    } else {
        Ok(())
    }
}

#[derive(Serialize)]
struct TraceLine {
    round: usize,
    m: String,
    observed: String,
    size: u64,
    y: String,
}

fn cmd_sample(g: &GlobalOpts, a: &SampleArgs, body: &mut String, err: &mut dyn Write) -> CliResult<()> {
    let f = load_table(&a.file, g.n_cap)?;
    let n = f.vars();
    let spec = a.anchors.clone().unwrap_or_else(|| format!("random:{n}"));
    let anchors: Vec<BitVector> = match spec.strip_prefix("random:") {
        Some(k) => {
            let k: usize = k.parse().map_err(|e| CliError::Usage(format!("bad anchor count {k:?}: {e}")))?;
            let mut rng = seed::rng(derive_seed(g.seed, 0));
            (0..k).map(|_| BitVector::from_bits_truncate(n, rand::Rng::gen(&mut rng))).collect()
        }
        None => {
            let m = BitMatrix::parse(&read_input(&spec)?)?;
            if m.dim() != n {
                return Err(CliError::Usage(format!("anchors have dimension {}, function has {n}", m.dim())));
            }
            m.rows().collect()
        }
    };
    let rounds = a.rounds.unwrap_or(n);
    let mut trace = String::new();
    for round in 0..rounds {
        let (c, y) = sim::collapse_and_sample(&f, &anchors, derive_seed(derive_seed(g.seed, 1), round as u64))?;
        let _ = writeln!(body, "{y}");
        let line = TraceLine { round, m: c.m.to_string(), observed: c.observed_string(), size: c.size, y: y.to_string() };
        trace.push_str(&serde_json::to_string(&line).expect("plain data serializes"));
        trace.push('\n');
    }
    match &a.trace {
        Some(path) => std::fs::write(path, trace)?,
        None => err.write_all(trace.as_bytes())?,
    }
    Ok(())
}

#[derive(Serialize)]
struct OracleJson<'a> {
    schema: &'a str,
    n: usize,
    u0: Vec<String>,
    u0_dim: usize,
    u1: Vec<String>,
    autocorrelation: Vec<i64>,
}

#[derive(Serialize)]
struct RTypeJson<'a> {
    schema: &'a str,
    n: usize,
    r: u64,
    entries: Vec<RTypeRow>,
    uniform_violations: bool,
}

#[derive(Serialize)]
struct RTypeRow {
    alpha: String,
    c: u8,
    violations: u64,
}

fn cmd_oracle(g: &GlobalOpts, a: &OracleArgs, body: &mut String) -> CliResult<()> {
    let f = load_table(&a.file, g.n_cap)?;
    let n = f.vars();
    let as_json = g.format == Some(Format::Json);
    if let Some(r) = a.r_type {
        let entries = oracle::r_type_scan(&f, r)?;
        let uniform = oracle::violation_sets_coincide(&f, &entries)?;
        if as_json {
            let rows = entries
                .iter()
                .map(|e| RTypeRow { alpha: e.alpha.to_string(), c: u8::from(e.c), violations: e.violations })
                .collect();
            body.push_str(&json(&RTypeJson { schema: SCHEMA, n, r, entries: rows, uniform_violations: uniform }));
        } else {
            body.push_str("# schema=1\nalpha,c,violations\n");
            for e in &entries {
                let _ = writeln!(body, "{},{},{}", e.alpha, u8::from(e.c), e.violations);
            }
            let _ = writeln!(body, "# uniform_violations={uniform}");
        }
        return Ok(());
    }
    let spectrum = oracle::autocorrelation(&f);
    let sets = oracle::brute_structures(&f)?;
    if as_json {
        body.push_str(&json(&OracleJson {
            schema: SCHEMA,
            n,
            u0: basis_strings(&sets.u0),
            u0_dim: sets.u0.dim(),
            u1: sets.u1.iter().map(ToString::to_string).collect(),
            autocorrelation: spectrum.values.clone(),
        }));
    } else {
        let u1: HashSet<u64> = sets.u1.iter().map(BitVector::bits).collect();
        body.push_str("# schema=1\nalpha,autocorr,in_u0,in_u1\n");
        for alpha in 0..f.len() {
            let v = BitVector::from_bits_truncate(n, alpha);
            let in_u0 = sets.u0.contains(&v)?;
            let _ = writeln!(body, "{v},{},{},{}", spectrum.get(alpha), u8::from(in_u0), u8::from(u1.contains(&alpha)));
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ProbJson<'a> {
    schema: &'a str,
    n: usize,
    rows: Vec<ProbRowJson>,
}

#[derive(Serialize)]
struct ProbRowJson {
    k: usize,
    s: f64,
    h: f64,
}

fn cmd_prob(g: &GlobalOpts, a: &ProbArgs, body: &mut String) -> CliResult<()> {
    if a.verify {
        let lines = probmodel::self_check(g.seed, a.trials);
        for l in &lines {
            let _ = writeln!(body, "{} {} {}", if l.passed { "PASS" } else { "FAIL" }, l.name, l.detail);
        }
        if lines.iter().any(|l| !l.passed) {
            return Err(CliError::Verification("probability self-check".into()));
        }
        if a.n.is_none() {
            return Ok(());
        }
    }
    let n = a.n.ok_or_else(|| CliError::Usage("--n is required".into()))?;
    let table = probmodel::prob_table(n, a.kmax.unwrap_or(n + 20))?;
    let csv = table.to_csv();
    if let Some(path) = &a.csv {
        std::fs::write(path, &csv)?;
    }
    if g.format == Some(Format::Json) {
        let rows = table.rows.iter().map(|r| ProbRowJson { k: r.k, s: r.s, h: r.h }).collect();
        body.push_str(&json(&ProbJson { schema: SCHEMA, n, rows }));
    } else {
        body.push_str(&csv);
    }
    Ok(())
}

#[derive(Serialize, Default)]
struct AnfJson {
    schema: &'static str,
    n: usize,
    anf: String,
    degree: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    classify: Option<ClassifyJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    system: Option<SystemJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    check_s: Option<CheckJson>,
}

#[derive(Serialize)]
struct ClassifyJson {
    case: String,
    forced: String,
}

#[derive(Serialize)]
struct SystemJson {
    conditions: Vec<String>,
    solutions: Vec<String>,
}

#[derive(Serialize)]
struct CheckJson {
    s: String,
    derivative: String,
    class: &'static str,
    admitted_by_classifier: bool,
}

fn case_name(c: PropertyCase) -> String {
    match c {
        PropertyCase::One => "1".into(),
        PropertyCase::Two => "2".into(),
        PropertyCase::Three => "3".into(),
        PropertyCase::Four { m } => format!("4(m={m})"),
        PropertyCase::Five { m } => format!("5(m={m})"),
        PropertyCase::None => "none".into(),
    }
}

fn forced_name(f: Forced) -> String {
    match f {
        Forced::Zero => "zero".into(),
        Forced::Vector(v) => v.to_string(),
        Forced::AllOnes => "all-ones".into(),
        Forced::Undetermined => "undetermined".into(),
    }
}

fn cmd_anf(g: &GlobalOpts, a: &AnfArgs, body: &mut String) -> CliResult<()> {
    let f = Anf::parse(&a.anf, a.n)?;
    let n = f.vars();
    check_cap(n, g.n_cap)?;
    let mut rep = AnfJson { schema: SCHEMA, n, anf: f.to_string(), degree: f.degree(), ..Default::default() };
    let verdict = classify_top(&f);
    if a.classify {
        rep.classify = Some(ClassifyJson { case: case_name(verdict.case), forced: forced_name(verdict.forced) });
    }
    if a.system {
        let conds = theorem2_system(&f);
        let sols = system_solutions(&conds, n)?;
        rep.system = Some(SystemJson {
            conditions: conds.iter().map(ToString::to_string).collect(),
            solutions: sols.ones().map(|s| BitVector::from_bits_truncate(n, s).to_string()).collect(),
        });
    }
    if let Some(bits) = &a.check_s {
        let s: BitVector = bits.parse()?;
        let d = g_anf(&f, &s)?;
        let class = if d.is_zero() {
            "u0"
        } else if d == Anf::new(n, [0])? {
            "u1"
        } else {
            "none"
        };
        rep.check_s = Some(CheckJson { s: s.to_string(), derivative: d.to_string(), class, admitted_by_classifier: verdict.admits(&s) });
    }
    if g.format == Some(Format::Json) {
        body.push_str(&json(&rep));
        return Ok(());
    }
    let _ = writeln!(body, "n={n}\nanf: {}", rep.anf);
    if let Some(c) = &rep.classify {
        let _ = writeln!(body, "case: {}\nforced: {}", c.case, c.forced);
    }
    if let Some(s) = &rep.system {
        for c in &s.conditions {
            let _ = writeln!(body, "{c}");
        }
        let _ = writeln!(body, "solutions: {}", s.solutions.join(" "));
    }
    if let Some(c) = &rep.check_s {
        let _ = writeln!(body, "s={} g={} class={} admitted={}", c.s, c.derivative, c.class, c.admitted_by_classifier);
    }
    Ok(())
}

fn cmd_sat3(g: &GlobalOpts, a: &Sat3Args, body: &mut String) -> CliResult<()> {
    if a.cnf.is_none() && a.verify_theorem4.is_none() {
        return Err(CliError::Usage("sat3 needs --cnf or --verify-theorem4".into()));
    }
    let mut failed = Vec::new();
    if let Some(path) = &a.cnf {
        let c = Cnf3::parse_dimacs(&read_input(path)?)?;
        check_cap(c.vars(), g.n_cap)?;
        let sys = sat3::reduce(&c);
        if a.reduce || !a.solve {
            body.push_str(&sys.to_string());
        }
        if a.solve {
            match sat3::solve_brute(&sys)? {
                Some(s) => {
                    let _ = writeln!(body, "SAT {s}");
                }
                None => body.push_str("UNSAT\n"),
            }
            let formula = sat3::sat_brute(&c)?.is_some();
            if formula != sat3::solve_brute(&sys)?.is_some() {
                failed.push("formula and product system disagree".to_string());
            }
        }
    }
    if let Some(spec) = &a.verify_theorem4 {
        let cases: Vec<PatternCase> = if spec == "all" { PatternCase::ALL.to_vec() } else { vec![spec.parse()?] };
        body.push_str("# schema=1\ncase,k,n,trials,passed\n");
        for case in cases {
            let ks: Vec<usize> = match a.k {
                Some(k) => vec![k],
                None => (case.min_k()..=8).collect(),
            };
            for k in ks {
                let mut passed = 0;
                for t in 0..a.trials {
                    let sub = derive_seed(g.seed, (k as u64) << 32 | t);
                    if sat3::theorem4_random_trial(case, k, a.n, sub)? {
                        passed += 1;
                    }
                }
                let _ = writeln!(body, "{case},{k},{},{},{passed}", a.n, a.trials);
                if passed != a.trials {
                    failed.push(format!("case {case} k={k}"));
                }
            }
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failed.join("; ")))
    }
}

fn cmd_plant(g: &GlobalOpts, a: &PlantArgs, body: &mut String, err: &mut dyn Write) -> CliResult<()> {
    check_cap(a.n, g.n_cap)?;
    let basis = random_subspace(a.n, a.dim, derive_seed(g.seed, 0))?;
    let text = if a.periods {
        plant_periods(a.n, &basis, derive_seed(g.seed, 1))?.to_file_string()
    } else {
        let spec = PlantSpec { n: a.n, structure_basis: basis.clone(), seed: derive_seed(g.seed, 1) };
        let mut f = plant_structure(&spec)?;
        if let Some(r) = a.r {
            f = plant_r_type(&f, r, derive_seed(g.seed, 2))?;
        }
        f.to_file_string()
    };
    body.push_str(&text);
    writeln!(err, "planted span: {}", basis_strings(&basis).join(" "))?;
    Ok(())
}

fn cmd_bench(g: &GlobalOpts, a: &BenchArgs, body: &mut String) -> CliResult<()> {
    if a.n_min == 0 || a.n_min > a.n_max {
        return Err(CliError::Usage("need 1 <= --n-min <= --n-max".into()));
    }
    check_cap(a.n_max, g.n_cap)?;
    let reps = a.reps.max(1);
    let mut rows: Vec<(usize, u128, u128)> = Vec::new();
    for n in a.n_min..=a.n_max {
        let basis = random_subspace(n, 0, derive_seed(g.seed, n as u64))?;
        let f = plant_structure(&PlantSpec { n, structure_basis: basis, seed: derive_seed(g.seed, n as u64) })?;
        let mut spectrum_ns = u128::MAX;
        let mut find_ns = u128::MAX;
        for _ in 0..reps {
            let t = Instant::now();
            std::hint::black_box(oracle::autocorrelation(std::hint::black_box(&f)));
            spectrum_ns = spectrum_ns.min(t.elapsed().as_nanos().max(1));
            let t = Instant::now();
            std::hint::black_box(linstruct::find_structure_simple(&f, &RunConfig::for_n(n).with_seed(g.seed))?);
            find_ns = find_ns.min(t.elapsed().as_nanos().max(1));
        }
        rows.push((n, spectrum_ns, find_ns));
    }
    body.push_str("# schema=1\nn,spectrum_ns,find_ns,spectrum_ratio\n");
    let mut off_trend = Vec::new();
    for (i, &(n, s, fnd)) in rows.iter().enumerate() {
        let ratio = i.checked_sub(1).map(|j| s as f64 / rows[j].1 as f64);
        let _ = writeln!(body, "{n},{s},{fnd},{}", ratio.map(|r| format!("{r:.3}")).unwrap_or_default());
        if let Some(r) = ratio {
            if n >= a.trend_from && !(1.8..=2.6).contains(&r) {
                off_trend.push(format!("n={n} ratio={r:.3}"));
            }
        }
    }
    if !off_trend.is_empty() && !a.no_trend_check {
        return Err(CliError::Verification(format!("spectrum time outside [1.8, 2.6] per step: {}", off_trend.join(", "))));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::DEFAULT_SEED;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("simonls").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn temp_path(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("simonls-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn seeds_parse_in_both_bases() {
        assert_eq!(parse_seed("0x53494D4F4E").unwrap(), DEFAULT_SEED);
        assert_eq!(parse_seed("42").unwrap(), 42);
        assert!(parse_seed("x").is_err());
    }

    #[test]
    fn plant_then_find() {
        let path = temp_path("plant8.tt");
        let p = path.to_str().unwrap();
        let (code, _, _) = run_capture(&["plant", "--n", "8", "--dim", "2", "--seed", "1", "--out", p]);
        assert_eq!(code, 0);
        let (code, out, _) = run_capture(&["find", "--f", p, "--oracle-check"]);
        assert_eq!(code, 0, "{out}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["candidate_dim"], 2);
        assert_eq!(v["oracle_agrees"], true);
        assert_eq!(v["schema"], "1");
        let (code, out, _) = run_capture(&["find", "--f", p, "--mode", "iterative"]);
        assert_eq!(code, 0, "{out}");
    }

    #[test]
    fn periods_mode() {
        let path = temp_path("periods.mtt");
        let p = path.to_str().unwrap();
        assert_eq!(run_capture(&["plant", "--n", "6", "--dim", "2", "--periods", "--out", p]).0, 0);
        let (code, out, _) = run_capture(&["find", "--f", p, "--mode", "periods", "--oracle-check"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("\"periods_dim\": 2"));
    }

    #[test]
    fn pseudo_structure_exits_one() {
        let path = temp_path("pseudo.tt");
        let p = path.to_str().unwrap();
        assert_eq!(run_capture(&["plant", "--n", "10", "--dim", "1", "--r", "1", "--out", p]).0, 0);
        let mut saw_flag = false;
        for seed in 0..30 {
            let s = seed.to_string();
            let (code, out, _) = run_capture(&["find", "--f", p, "--oracle-check", "--verify-p", "1", "--seed", &s]);
            let v: serde_json::Value = serde_json::from_str(&out).unwrap();
            if v["pseudo_flag"] == true {
                assert_eq!(code, 1);
                saw_flag = true;
            }
        }
        assert!(saw_flag);
    }

    #[test]
    fn prob_table_output() {
        let (code, out, _) = run_capture(&["prob", "--n", "2", "--kmax", "3"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("# schema=1\nn,k,s,h\n"));
        assert!(out.contains("2,2,0.375,"));
        assert!(out.contains("2,3,0.65625,"));
        let (code, out, _) = run_capture(&["prob", "--n", "2", "--kmax", "3", "--format", "json"]);
        assert_eq!(code, 0);
        assert!(out.contains("\"s\": 0.65625"));
        assert_eq!(run_capture(&["prob", "--n", "4", "--kmax", "2"]).0, 2);
        let (code, out, _) = run_capture(&["prob", "--verify", "--trials", "2000"]);
        assert_eq!(code, 0, "{out}");
        assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 3);
    }

    #[test]
    fn anf_reports() {
        let (code, out, _) = run_capture(&["anf", "--anf", "x1*x2 + x2*x3 + x1*x3", "--classify", "--check-s", "111"]);
        assert_eq!(code, 0);
        assert!(out.contains("case: 2"));
        assert!(out.contains("forced: 111"));
        assert!(out.contains("class=u1"));
        let (code, out, _) = run_capture(&["anf", "--anf", "x1*x2", "--system", "--format", "json"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["system"]["solutions"], serde_json::json!(["00"]));
        assert_eq!(run_capture(&["anf", "--anf", "x1 ** x2"]).0, 2);
    }

    #[test]
    fn sat3_commands() {
        let path = temp_path("one.cnf");
        std::fs::write(&path, "p cnf 3 1\n1 2 -3 0\n").unwrap();
        let p = path.to_str().unwrap();
        let (code, out, _) = run_capture(&["sat3", "--cnf", p, "--reduce", "--solve"]);
        assert_eq!(code, 0);
        assert!(out.contains("(s1+1)(s2+1)(s3+0)=0"));
        assert!(out.contains("SAT 000"));
        let (code, out, _) = run_capture(&["sat3", "--verify-theorem4", "2b", "--k", "3", "--n", "4", "--trials", "10"]);
        assert_eq!(code, 0);
        assert!(out.contains("2b,3,4,10,10"));
        assert_eq!(run_capture(&["sat3", "--verify-theorem4", "7"]).0, 2);
        assert_eq!(run_capture(&["sat3"]).0, 2);
    }

    #[test]
    fn oracle_outputs() {
        let path = temp_path("xor.tt");
        std::fs::write(&path, "n=2\n0110\n").unwrap();
        let p = path.to_str().unwrap();
        let (code, out, _) = run_capture(&["oracle", "--f", p]);
        assert_eq!(code, 0);
        assert_eq!(out, "# schema=1\nalpha,autocorr,in_u0,in_u1\n00,4,1,0\n10,-4,0,1\n01,-4,0,1\n11,4,1,0\n");
        let (code, out, _) = run_capture(&["oracle", "--f", p, "--format", "json"]);
        assert_eq!(code, 0);
        assert!(out.contains("\"u0_dim\": 1"));
        let (code, out, _) = run_capture(&["oracle", "--f", p, "--r-type", "0"]);
        assert_eq!(code, 0);
        assert!(out.contains("11,0,0"));
    }

    #[test]
    fn sample_is_orthogonal_and_reproducible() {
        let path = temp_path("and.tt");
        std::fs::write(&path, "n=3\n00010001\n").unwrap();
        let p = path.to_str().unwrap();
        let trace = temp_path("trace.jsonl");
        let t = trace.to_str().unwrap();
        let first = run_capture(&["sample", "--f", p, "--rounds", "12", "--trace", t]);
        assert_eq!(first.0, 0);
        assert_eq!(first, run_capture(&["sample", "--f", p, "--rounds", "12", "--trace", t]));
        assert_eq!(first.1.lines().count(), 12);
        assert_eq!(std::fs::read_to_string(&trace).unwrap().lines().count(), 12);
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_capture(&["find"]).0, 2);
        assert_eq!(run_capture(&["nonsense"]).0, 2);
        assert_eq!(run_capture(&["find", "--f", "/nonexistent/file"]).0, 2);
        assert_eq!(run_capture(&["plant", "--n", "30", "--dim", "1"]).0, 2);
        assert_eq!(run_capture(&["plant", "--n", "8", "--dim", "1", "--n-cap", "25"]).0, 2);
        assert_eq!(run_capture(&["bench", "--n-min", "1", "--n-max", "25"]).0, 2);
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("0x53494D4F4E"));
        for sub in ["find", "sample", "oracle", "prob", "anf", "sat3", "plant", "bench"] {
            let (code, out, _) = run_capture(&[sub, "--help"]);
            assert_eq!(code, 0);
            assert!(out.contains("--seed"), "{sub}");
        }
    }

    #[test]
    fn bench_small() {
        let (code, out, _) = run_capture(&["bench", "--n-min", "1", "--n-max", "3", "--reps", "1"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 5);
        for line in out.lines().skip(2) {
            let cols: Vec<&str> = line.split(',').collect();
            assert!(cols[1].parse::<u128>().unwrap() > 0);
        }
    }
}
