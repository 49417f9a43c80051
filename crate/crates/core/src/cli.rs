//! The `matchspeed` command line tool.
//!
//! Subcommands: `speed` (exact asymptotic speed of an algorithm or
//! machine file), `fastest` (brute-force optimal strategy), `heuristic`
//! (K-heuristic strategy), `lattice` (position lattice stats and DOT
//! export), `simulate` (Monte-Carlo speed estimate) and `bench`
//! (instrumented average speeds over a real text, TSV output).
//!
//! Every command is a pure function of its flags, input files and seed:
//! identical invocations produce byte-identical output. Exit codes:
//! 0 success, 2 model/pattern/input parse errors, 3 expansion state
//! explosion, 4 pattern too long for brute force, 5 alphabet mismatch,
//! 6 lattice capacity exceeded, 1 anything else.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand};

use crate::classics::{build_machine, instrumented_search, AlgorithmId, ClassicsError};
use crate::executor::{generic_run, monte_carlo_speed, RunError};
use crate::expansion::ExpandError;
use crate::format;
use crate::lattice::{build_lattice, n_sets_sublattice, to_dot, LatticeError, LatticeView};
use crate::machine::{Alphabet, DomainError, IidModel, MatchingMachine, Pattern, Symbol};
use crate::markov::{asymptotic_speed, SpeedError};
use crate::rng::SplitMix64;
use crate::strategy::{fastest_strategy, k_heuristic, FastestOptions, StrategyError};

pub const THREADS_ENV: &str = "MATCHSPEED_THREADS";

#[derive(Parser)]
#[command(
    name = "matchspeed",
    version,
    about = "Matching machines: exact speed analysis, optimal and heuristic strategies, benchmarks"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact asymptotic speed of an algorithm or machine file under an iid model.
    Speed(SpeedArgs),
    /// Brute-force search for the fastest strategy of a pattern.
    Fastest(FastestArgs),
    /// Polynomial K-heuristic strategy for a pattern.
    Heuristic(HeuristicArgs),
    /// Position lattice statistics, sublattices and DOT export.
    Lattice(LatticeArgs),
    /// Monte-Carlo estimate of the asymptotic speed.
    Simulate(SimulateArgs),
    /// Instrumented average speeds over a text corpus, as TSV.
    Bench(BenchArgs),
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Symbol frequencies, e.g. `a=0.1,b=0.9`. Alphabet symbols without
    /// an entry get probability 0 (with a warning).
    #[arg(long, conflicts_with = "uniform")]
    freq: Option<String>,
    /// Uniform distribution over the alphabet.
    #[arg(long)]
    uniform: bool,
    /// Extra alphabet symbols beyond those inferred from the inputs.
    #[arg(long)]
    alphabet: Option<String>,
}

#[derive(Args)]
struct SpeedArgs {
    /// Pattern (required with --algo).
    #[arg(long)]
    pattern: Option<String>,
    /// Algorithm name (naive, morris_pratt, kmp, quicksearch, horspool,
    /// tvsbs, fjs, sma).
    #[arg(long, conflicts_with = "machine_file")]
    algo: Option<String>,
    /// Machine file in the canonical JSON format.
    #[arg(long)]
    machine_file: Option<PathBuf>,
    /// Also write the full speed report (state frequencies, expected
    /// shifts) as JSON here.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args)]
struct FastestArgs {
    #[arg(long)]
    pattern: String,
    #[command(flatten)]
    model: ModelArgs,
    /// Lift the |w| <= 4 guard (the search is super-exponential).
    #[arg(long)]
    force: bool,
    /// Prune with one-step shift bounds (same speed, possibly a
    /// different equal-speed strategy).
    #[arg(long)]
    bound: bool,
    /// Output machine file (default: fastest_<pattern>.mm).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HeuristicArgs {
    #[arg(long)]
    pattern: String,
    /// Heuristic order K (the sublattice keeps rests of at most K
    /// positions).
    #[arg(long, default_value_t = 3)]
    order: usize,
    /// Shift-expectation horizon (default K+1).
    #[arg(long)]
    horizon: Option<usize>,
    #[command(flatten)]
    model: ModelArgs,
    /// Output machine file (default: heuristic<K>_<pattern>.mm).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LatticeArgs {
    #[arg(long)]
    pattern: String,
    /// Extra alphabet symbols beyond the pattern's.
    #[arg(long)]
    alphabet: Option<String>,
    /// Write a DOT rendering here (of the sublattice when --nsets is
    /// given).
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Restrict to the n-sets sublattice of this order.
    #[arg(long)]
    nsets: Option<usize>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    pattern: Option<String>,
    #[arg(long, conflicts_with = "machine_file")]
    algo: Option<String>,
    #[arg(long)]
    machine_file: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
    /// Length of each sampled text.
    #[arg(long, default_value_t = 1_000_000)]
    length: usize,
    /// Number of replicate texts.
    #[arg(long, default_value_t = 8)]
    reps: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    /// Text corpus (raw bytes).
    #[arg(long)]
    text: PathBuf,
    /// Pattern list file, one pattern per line.
    #[arg(long, conflicts_with = "random")]
    patterns: Option<PathBuf>,
    /// Pick <COUNT> random substrings of length <LEN> as patterns.
    #[arg(long, num_args = 2, value_names = ["COUNT", "LEN"])]
    random: Option<Vec<usize>>,
    /// Comma-separated algorithm names, or `all`.
    #[arg(long, default_value = "all")]
    algos: String,
    /// Comma-separated K-heuristic orders to benchmark.
    #[arg(long)]
    heuristics: Option<String>,
    /// Also benchmark the brute-force fastest strategy (|w| <= 4).
    #[arg(long)]
    fastest: bool,
    /// Build strategies from the uniform model instead of the text's
    /// empirical symbol frequencies.
    #[arg(long)]
    uniform_strategies: bool,
    /// Declared alphabet (default: the distinct bytes of the text).
    #[arg(long)]
    alphabet: Option<String>,
    /// Drop text bytes outside the declared alphabet instead of failing.
    #[arg(long)]
    filter: bool,
    /// Print speeds as exact rationals `length/accesses`.
    #[arg(long)]
    exact: bool,
    /// Worker threads (default: MATCHSPEED_THREADS or the CPU count).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }
}

impl From<DomainError> for CliError {
    fn from(e: DomainError) -> Self {
        CliError::new(2, e.to_string())
    }
}

impl From<format::FormatError> for CliError {
    fn from(e: format::FormatError) -> Self {
        CliError::new(2, e.to_string())
    }
}

impl From<ExpandError> for CliError {
    fn from(e: ExpandError) -> Self {
        CliError::new(3, e.to_string())
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        CliError::new(6, e.to_string())
    }
}

impl From<SpeedError> for CliError {
    fn from(e: SpeedError) -> Self {
        match e {
            SpeedError::Expand(inner) => inner.into(),
            other => CliError::new(1, other.to_string()),
        }
    }
}

impl From<StrategyError> for CliError {
    fn from(e: StrategyError) -> Self {
        match e {
            StrategyError::PatternTooLong { .. } => CliError::new(4, e.to_string()),
            StrategyError::Lattice(inner) => inner.into(),
            StrategyError::Speed(inner) => inner.into(),
            other => CliError::new(1, other.to_string()),
        }
    }
}

impl From<ClassicsError> for CliError {
    fn from(e: ClassicsError) -> Self {
        CliError::new(2, e.to_string())
    }
}

impl From<RunError> for CliError {
    fn from(e: RunError) -> Self {
        match e {
            RunError::BadParameters => CliError::new(2, e.to_string()),
            other => CliError::new(1, other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new(1, e.to_string())
    }
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Speed(args) => cmd_speed(args),
        Command::Fastest(args) => cmd_fastest(args),
        Command::Heuristic(args) => cmd_heuristic(args),
        Command::Lattice(args) => cmd_lattice(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

// ---------------------------------------------------------------------
// Model and alphabet plumbing
// ---------------------------------------------------------------------

fn parse_freq_spec(spec: &str) -> Result<Vec<(u8, f64)>, CliError> {
    let mut out = Vec::new();
    for item in spec.split(',') {
        let (sym, val) = item
            .split_once('=')
            .ok_or_else(|| CliError::new(2, format!("bad frequency entry {item:?}")))?;
        let mut chars = sym.chars();
        let byte = match (chars.next(), chars.next()) {
            (Some(c), None) if (c as u32) <= 0xFF => c as u32 as u8,
            _ => {
                return Err(CliError::new(
                    2,
                    format!("frequency symbol {sym:?} is not a single byte character"),
                ))
            }
        };
        let p: f64 = val
            .parse()
            .map_err(|_| CliError::new(2, format!("bad probability {val:?}")))?;
        out.push((byte, p));
    }
    Ok(out)
}

/// Alphabet for pattern-based commands: distinct bytes of the pattern,
/// the frequency keys and any explicit extras, sorted.
fn infer_alphabet(pattern: &[u8], model: &ModelArgs) -> Result<Alphabet, CliError> {
    let mut bytes: Vec<u8> = pattern.to_vec();
    if let Some(spec) = &model.freq {
        for (b, _) in parse_freq_spec(spec)? {
            bytes.push(b);
        }
    }
    if let Some(extra) = &model.alphabet {
        for c in extra.chars() {
            if (c as u32) > 0xFF {
                return Err(CliError::new(
                    2,
                    format!("alphabet symbol {c:?} outside latin-1"),
                ));
            }
            bytes.push(c as u32 as u8);
        }
    }
    Ok(Alphabet::from_text(&bytes)?)
}

/// Resolve the model flags against an alphabet. Alphabet symbols not
/// listed in `--freq` get probability 0 with a warning; frequency keys
/// outside the alphabet are an error.
fn resolve_model(alphabet: &Alphabet, model: &ModelArgs) -> Result<(IidModel, String), CliError> {
    if let Some(spec) = &model.freq {
        let entries = parse_freq_spec(spec)?;
        let mut probs = vec![0.0; alphabet.len()];
        let mut listed = vec![false; alphabet.len()];
        for (b, p) in &entries {
            match alphabet.index_of(*b) {
                Some(i) => {
                    probs[i as usize] = *p;
                    listed[i as usize] = true;
                }
                None => {
                    return Err(CliError::new(
                        2,
                        format!("frequency symbol {:?} not in the alphabet", *b as char),
                    ))
                }
            }
        }
        for (i, seen) in listed.iter().enumerate() {
            if !seen {
                eprintln!(
                    "warning: symbol {:?} not listed in --freq, assuming probability 0",
                    alphabet.byte(i as u8) as char
                );
            }
        }
        let mut desc = String::new();
        for (i, p) in probs.iter().enumerate() {
            if i > 0 {
                desc.push(',');
            }
            let _ = write!(desc, "{}={:.6}", alphabet.byte(i as u8) as char, p);
        }
        Ok((IidModel::new(probs)?, desc))
    } else {
        // --uniform is also the default when no flag is given.
        Ok((IidModel::uniform(alphabet.len()), "uniform".into()))
    }
}

fn parse_pattern(alphabet: &Alphabet, pattern: &str) -> Result<Pattern, CliError> {
    Ok(Pattern::from_bytes(alphabet, pattern.as_bytes())?)
}

fn parse_algo(name: &str) -> Result<AlgorithmId, CliError> {
    AlgorithmId::from_name(name)
        .ok_or_else(|| CliError::new(2, format!("unknown algorithm {name:?}")))
}

/// A machine with its provenance, from `--algo`+`--pattern` or a file.
struct MachineSource {
    name: String,
    alphabet: Alphabet,
    pattern: Pattern,
    machine: MatchingMachine,
}

fn load_machine(
    pattern: &Option<String>,
    algo: &Option<String>,
    machine_file: &Option<PathBuf>,
    model: &ModelArgs,
) -> Result<MachineSource, CliError> {
    match (algo, machine_file) {
        (Some(name), None) => {
            let algo = parse_algo(name)?;
            let pattern = pattern
                .as_ref()
                .ok_or_else(|| CliError::new(2, "--algo requires --pattern"))?;
            let alphabet = infer_alphabet(pattern.as_bytes(), model)?;
            let pat = parse_pattern(&alphabet, pattern)?;
            let machine = build_machine(algo, &alphabet, &pat)?;
            Ok(MachineSource {
                name: algo.name().to_string(),
                alphabet,
                pattern: pat,
                machine,
            })
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            let doc = format::from_json(&text)?;
            let (alphabet, pat, machine) = format::from_document(&doc)?;
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "machine".into());
            Ok(MachineSource {
                name,
                alphabet,
                pattern: pat,
                machine,
            })
        }
        _ => Err(CliError::new(
            2,
            "give exactly one of --algo or --machine-file",
        )),
    }
}

fn pattern_display(alphabet: &Alphabet, pattern: &Pattern) -> String {
    String::from_utf8_lossy(&alphabet.decode(pattern.symbols())).into_owned()
}

fn sanitize(s: &str) -> String {
    let cleaned: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect();
    if cleaned.is_empty() {
        "pattern".into()
    } else {
        cleaned
    }
}

// ---------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------

fn cmd_speed(args: SpeedArgs) -> Result<(), CliError> {
    let source = load_machine(&args.pattern, &args.algo, &args.machine_file, &args.model)?;
    let (model, model_desc) = resolve_model(&source.alphabet, &args.model)?;
    let report = asymptotic_speed(&source.machine, &model)?;
    if let Some(path) = &args.report {
        let mut json =
            serde_json::to_string_pretty(&report).map_err(|e| CliError::new(1, e.to_string()))?;
        json.push('\n');
        std::fs::write(path, json)?;
    }
    println!(
        "{}\t{}\t{}\t{:.6}\t{}\t{}",
        source.name,
        pattern_display(&source.alphabet, &source.pattern),
        model_desc,
        report.speed,
        report.base_states,
        report.analyzed_states
    );
    Ok(())
}

fn cmd_fastest(args: FastestArgs) -> Result<(), CliError> {
    let alphabet = infer_alphabet(args.pattern.as_bytes(), &args.model)?;
    let pattern = parse_pattern(&alphabet, &args.pattern)?;
    let (model, model_desc) = resolve_model(&alphabet, &args.model)?;
    let (strategy, report) = fastest_strategy(
        &pattern,
        alphabet.len(),
        &model,
        FastestOptions {
            force: args.force,
            use_bound: args.bound,
        },
    )?;
    let out = args
        .out
        .unwrap_or_else(|| PathBuf::from(format!("fastest_{}.mm", sanitize(&args.pattern))));
    let doc = format::to_document(&alphabet, &pattern, &strategy.machine);
    std::fs::write(&out, format::to_json(&doc))?;
    println!(
        "fastest\t{}\t{}\t{:.6}\t{}\t{}",
        args.pattern,
        model_desc,
        report.speed,
        strategy.machine.num_states(),
        out.display()
    );
    Ok(())
}

fn cmd_heuristic(args: HeuristicArgs) -> Result<(), CliError> {
    if args.order == 0 {
        return Err(CliError::new(2, "--order must be at least 1"));
    }
    let alphabet = infer_alphabet(args.pattern.as_bytes(), &args.model)?;
    let pattern = parse_pattern(&alphabet, &args.pattern)?;
    let (model, model_desc) = resolve_model(&alphabet, &args.model)?;
    let (strategy, report) =
        k_heuristic(&pattern, alphabet.len(), &model, args.order, args.horizon)?;
    let out = args.out.unwrap_or_else(|| {
        PathBuf::from(format!(
            "heuristic{}_{}.mm",
            args.order,
            sanitize(&args.pattern)
        ))
    });
    let doc = format::to_document(&alphabet, &pattern, &strategy.machine);
    std::fs::write(&out, format::to_json(&doc))?;
    println!(
        "heuristic-{}\t{}\t{}\t{:.6}\t{}\t{}",
        args.order,
        args.pattern,
        model_desc,
        report.speed,
        strategy.machine.num_states(),
        out.display()
    );
    Ok(())
}

fn cmd_lattice(args: LatticeArgs) -> Result<(), CliError> {
    let mut bytes = args.pattern.as_bytes().to_vec();
    if let Some(extra) = &args.alphabet {
        bytes.extend(extra.as_bytes());
    }
    let alphabet = Alphabet::from_text(&bytes)?;
    let pattern = parse_pattern(&alphabet, &args.pattern)?;
    let lattice = build_lattice(&pattern, alphabet.len())?;
    println!(
        "{} states, {} edges",
        lattice.num_states(),
        lattice.num_edges()
    );
    match args.nsets {
        Some(n) => {
            if n == 0 {
                return Err(CliError::new(2, "--nsets must be at least 1"));
            }
            let sub = n_sets_sublattice(&lattice, n);
            println!(
                "{}-sets sublattice: {} states, {} edges, complete={}",
                n,
                sub.num_states(),
                sub.num_edges(),
                sub.is_complete()
            );
            if let Some(path) = &args.dot {
                std::fs::write(path, to_dot(&sub, &alphabet, &args.pattern))?;
            }
        }
        None => {
            if let Some(path) = &args.dot {
                std::fs::write(path, to_dot(&lattice, &alphabet, &args.pattern))?;
            }
        }
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let source = load_machine(&args.pattern, &args.algo, &args.machine_file, &args.model)?;
    let (model, _) = resolve_model(&source.alphabet, &args.model)?;
    let estimate = monte_carlo_speed(
        &source.machine,
        &source.pattern,
        &model,
        args.length,
        args.reps,
        args.seed,
    )?;
    println!("{:.6} +/- {:.6}", estimate.mean, estimate.stderr);
    Ok(())
}

#[derive(Clone)]
enum Method {
    Classic(AlgorithmId),
    Heuristic(usize),
    Fastest,
}

impl Method {
    fn name(&self) -> String {
        match self {
            Method::Classic(a) => a.name().to_string(),
            Method::Heuristic(k) => format!("heuristic-{k}"),
            Method::Fastest => "fastest".to_string(),
        }
    }
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    let raw = std::fs::read(&args.text)?;
    let alphabet = match &args.alphabet {
        Some(s) => Alphabet::new(s.as_bytes())?,
        None => Alphabet::from_text(&raw)?,
    };
    let text = if args.filter {
        alphabet.encode_lossy(&raw)
    } else {
        alphabet
            .encode(&raw)
            .map_err(|e| CliError::new(5, format!("text: {e}")))?
    };
    if text.is_empty() {
        return Err(CliError::new(2, "text is empty after filtering"));
    }
    let text_name = args
        .text
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "text".into());

    // Patterns: a list file, or random substrings of the text.
    let mut patterns: Vec<Pattern> = Vec::new();
    match (&args.patterns, &args.random) {
        (Some(path), None) => {
            let listing = std::fs::read(path)?;
            for line in listing.split(|&b| b == b'\n') {
                let line = match line.strip_suffix(b"\r") {
                    Some(l) => l,
                    None => line,
                };
                if line.is_empty() {
                    continue;
                }
                let pat = Pattern::from_bytes(&alphabet, line).map_err(|e| match e {
                    DomainError::SymbolNotInAlphabet(_) => CliError::new(
                        5,
                        format!("pattern {:?}: {e}", String::from_utf8_lossy(line)),
                    ),
                    other => other.into(),
                })?;
                patterns.push(pat);
            }
            if patterns.is_empty() {
                return Err(CliError::new(2, "pattern file is empty"));
            }
        }
        (None, Some(spec)) => {
            let (count, len) = (spec[0], spec[1]);
            if len == 0 || len > text.len() {
                return Err(CliError::new(2, "random pattern length out of range"));
            }
            let mut rng = SplitMix64::new(args.seed);
            for _ in 0..count {
                let start = rng.next_below(text.len() - len + 1);
                patterns.push(Pattern::from_symbols(text[start..start + len].to_vec()).unwrap());
            }
        }
        _ => {
            return Err(CliError::new(
                2,
                "give exactly one of --patterns or --random",
            ))
        }
    }

    let mut methods: Vec<Method> = Vec::new();
    if args.algos == "all" {
        methods.extend(AlgorithmId::ALL.into_iter().map(Method::Classic));
    } else {
        for name in args.algos.split(',').filter(|s| !s.is_empty()) {
            methods.push(Method::Classic(parse_algo(name)?));
        }
    }
    if let Some(hs) = &args.heuristics {
        for k in hs.split(',').filter(|s| !s.is_empty()) {
            let k: usize = k
                .parse()
                .map_err(|_| CliError::new(2, format!("bad heuristic order {k:?}")))?;
            if k == 0 {
                return Err(CliError::new(2, "heuristic order must be at least 1"));
            }
            methods.push(Method::Heuristic(k));
        }
    }
    if args.fastest {
        // Fail before any TSV is emitted rather than mid-table.
        if let Some(p) = patterns
            .iter()
            .find(|p| p.len() > crate::strategy::FASTEST_LENGTH_LIMIT)
        {
            return Err(StrategyError::PatternTooLong {
                len: p.len(),
                limit: crate::strategy::FASTEST_LENGTH_LIMIT,
            }
            .into());
        }
        methods.push(Method::Fastest);
    }

    // Strategies adapt to the text's symbol distribution unless told to
    // stay uniform.
    let strategy_model = if args.uniform_strategies {
        IidModel::uniform(alphabet.len())
    } else {
        let mut counts = vec![0u64; alphabet.len()];
        for &s in &text {
            counts[s as usize] += 1;
        }
        let total: u64 = counts.iter().sum();
        let mut probs: Vec<f64> = counts.iter().map(|&c| c as f64 / total as f64).collect();
        let sum: f64 = probs.iter().sum();
        for p in probs.iter_mut() {
            *p /= sum;
        }
        IidModel::new(probs).expect("normalized")
    };

    struct Job {
        pattern_idx: usize,
        method: Method,
    }
    let jobs: Vec<Job> = patterns
        .iter()
        .enumerate()
        .flat_map(|(pi, _)| {
            methods.iter().map(move |m| Job {
                pattern_idx: pi,
                method: m.clone(),
            })
        })
        .collect();

    let threads = args
        .threads
        .or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.parse().ok()))
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
        .max(1);

    type BenchOutcome = Result<(u64, usize), CliError>;
    let results: Mutex<Vec<Option<BenchOutcome>>> = Mutex::new(jobs.iter().map(|_| None).collect());
    let cursor = AtomicUsize::new(0);
    let alphabet_ref = &alphabet;
    let text_ref = &text;
    let patterns_ref = &patterns;
    let model_ref = &strategy_model;
    std::thread::scope(|scope| {
        for _ in 0..threads.min(jobs.len()) {
            scope.spawn(|| loop {
                let i = cursor.fetch_add(1, Ordering::Relaxed);
                if i >= jobs.len() {
                    break;
                }
                let job = &jobs[i];
                let pattern = &patterns_ref[job.pattern_idx];
                let outcome = bench_one(&job.method, alphabet_ref, pattern, text_ref, model_ref);
                results.lock().unwrap()[i] = Some(outcome);
            });
        }
    });

    println!("# matchspeed bench v1");
    println!("pattern\tmethod\ttext\taccesses\tspeed");
    let results = results.into_inner().unwrap();
    for (job, outcome) in jobs.iter().zip(results) {
        let (accesses, _) = outcome.expect("job ran")?;
        let pattern = pattern_display(&alphabet, &patterns[job.pattern_idx]);
        let speed = if args.exact {
            format!("{}/{}", text.len(), accesses)
        } else {
            format!("{:.4}", text.len() as f64 / accesses as f64)
        };
        println!(
            "{}\t{}\t{}\t{}\t{}",
            pattern,
            job.method.name(),
            text_name,
            accesses,
            speed
        );
    }
    Ok(())
}

/// Run one (pattern, method) cell; returns (accesses, occurrences).
fn bench_one(
    method: &Method,
    alphabet: &Alphabet,
    pattern: &Pattern,
    text: &[Symbol],
    strategy_model: &IidModel,
) -> Result<(u64, usize), CliError> {
    let report = match method {
        Method::Classic(algo) => instrumented_search(*algo, pattern, text, alphabet.len()),
        Method::Heuristic(k) => {
            let (strategy, _) = k_heuristic(pattern, alphabet.len(), strategy_model, *k, None)?;
            generic_run(&strategy.machine, pattern, text)?
        }
        Method::Fastest => {
            let (strategy, _) = fastest_strategy(
                pattern,
                alphabet.len(),
                strategy_model,
                FastestOptions::default(),
            )?;
            generic_run(&strategy.machine, pattern, text)?
        }
    };
    Ok((report.accesses, report.occurrences.len()))
}
