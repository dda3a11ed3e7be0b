//! Command-line front end for the autoseq library.
//!
//! Exit codes: 0 = a verdict (or module fragment) was produced, 2 = input
//! or usage error, 3 = an internal limit stopped the engine (the limit is
//! also reported inside the emitted diagnostics where possible).

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use autoseq::algebra::dominant_eigenvalue;
use autoseq::dynamical::{eigenvalue_obstruction, host_profile, ObstructionReason, QObstruction};
use autoseq::gaps_runs::{
    cobham_gap_test, minsky_papert_test, occurrence_profile, run_first_occurrence,
};
use autoseq::kernel::{kernel_lower_bound, targeted_kernel_family, KernelFamily};
use autoseq::matrix::transition_matrix;
use autoseq::report::{self, build_report, fragment_report, InputEcho, KernelFamilyDto, Report};
use autoseq::seqlib::{generate, GeneratorSpec};
use autoseq::stats::block_complexity;
use autoseq::strategy::{analyze, analyze_sequence, Analysis, Conclusion, Config, Verdict};
use autoseq::words::{expand, expand_letters, return_words, Alphabet, Morphism, PrefixView};
use autoseq::Error;

#[derive(Parser)]
#[command(
    name = "autoseq",
    version,
    about = "Decide or gather evidence on the automaticity of a sequence"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the full decision pipeline and print a verdict with evidence.
    Analyze(AnalyzeArgs),
    /// Print a prefix of the (coded) morphic fixed point.
    Expand(ExpandArgs),
    /// Estimate the q-kernel, optionally along a targeted residue family.
    Kernel(KernelArgs),
    /// Tabulate block complexity and classify its growth.
    Complexity(ComplexityArgs),
    /// Occurrence counts, gap dichotomy, ratio test, and run statistics.
    Gaps(GapsArgs),
    /// Eigenvalue obstructions and return-word divisibility of a morphism.
    Dynamics(DynamicsArgs),
}

/// Exactly one input source per invocation.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct InputArgs {
    /// Morphism description file.
    #[arg(long, value_name = "FILE")]
    morphism: Option<PathBuf>,
    /// Built-in generator (e.g. `liouville`, `poly:1,0,0`, `set:2n2n-1`).
    #[arg(long, value_name = "NAME")]
    seq: Option<String>,
    /// File holding an explicit prefix: whitespace-separated symbols, or
    /// one unbroken string of single-character symbols.
    #[arg(long, value_name = "FILE")]
    prefix: Option<PathBuf>,
}

#[derive(Args)]
struct OutputArgs {
    /// Emit the JSON report instead of the text summary; write to FILE,
    /// or to standard output when FILE is omitted or `-`.
    #[arg(long, value_name = "FILE", num_args = 0..=1, default_missing_value = "-")]
    json: Option<String>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    out: OutputArgs,
    /// Symbols of the sequence to materialize [default: 1048576].
    #[arg(long, value_name = "N")]
    prefix_len: Option<u64>,
    /// Comma-separated bases for the per-base battery [default: 2..16].
    #[arg(long, value_delimiter = ',', value_name = "Q,..")]
    bases: Option<Vec<u64>>,
    /// Kernel probe depth [default: 8].
    #[arg(long, value_name = "K")]
    kmax: Option<u32>,
    /// Kernel sampling horizon [default: 65536].
    #[arg(long, value_name = "N")]
    kernel_horizon: Option<u64>,
    /// Longest block length for the complexity table [default: 64].
    #[arg(long, value_name = "N")]
    nmax: Option<usize>,
    /// Worker thread cap [default: AUTOSEQ_THREADS or machine parallelism].
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Args)]
struct ExpandArgs {
    /// Morphism description file.
    #[arg(long, value_name = "FILE")]
    morphism: PathBuf,
    /// Number of symbols to print.
    #[arg(long, value_name = "N")]
    length: u64,
}

#[derive(Args)]
struct KernelArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    out: OutputArgs,
    /// Base of the kernel.
    #[arg(long, default_value_t = 2, value_name = "Q")]
    q: u64,
    /// Probe depth.
    #[arg(long, default_value_t = 8, value_name = "K")]
    kmax: u32,
    /// Sampling horizon.
    #[arg(long, default_value_t = 1 << 16, value_name = "N")]
    horizon: u64,
    /// Targeted residue family instead of the general lower bound.
    #[arg(long, value_enum, value_name = "FAMILY")]
    family: Option<FamilyArg>,
    /// Residue for the fixed-residue family.
    #[arg(long, default_value_t = 0, value_name = "R")]
    r: u64,
    /// Worker thread cap.
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    /// The same residue r at every level k.
    #[value(name = "const")]
    Const,
    /// r = q^k - k.
    #[value(name = "qk-k")]
    QkK,
    /// r = q^k - 1.
    #[value(name = "qk-1")]
    Qk1,
}

#[derive(Args)]
struct ComplexityArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    out: OutputArgs,
    /// Longest block length tabulated.
    #[arg(long, default_value_t = 64, value_name = "N")]
    nmax: usize,
    /// Prefix horizon.
    #[arg(long, default_value_t = 1 << 18, value_name = "N")]
    horizon: u64,
}

#[derive(Args)]
struct GapsArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    out: OutputArgs,
    /// Restrict the tests to one symbol [default: every symbol].
    #[arg(long, value_name = "SYMBOL")]
    symbol: Option<String>,
    /// Prefix horizon.
    #[arg(long, default_value_t = 1 << 20, value_name = "N")]
    horizon: u64,
    /// Run-length table size.
    #[arg(long, default_value_t = 20, value_name = "N")]
    nmax: usize,
}

#[derive(Args)]
struct DynamicsArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    out: OutputArgs,
    /// Largest base probed for eigenvalue obstructions.
    #[arg(long, default_value_t = 64, value_name = "Q")]
    qmax: u64,
    /// Denominator-exponent probe depth.
    #[arg(long, default_value_t = 6, value_name = "J")]
    jmax: u32,
    /// Return-word divisibility depth.
    #[arg(long, default_value_t = 16, value_name = "N")]
    depth: usize,
    /// Divisibility modulus [default: the dominant integer eigenvalue].
    #[arg(long, value_name = "Q")]
    q: Option<u64>,
}

/// Failures after argument parsing, mapped onto the exit-code contract.
enum CliError {
    /// Unreadable/unparsable input or invalid parameter combination.
    Input(String),
    /// The engine hit an internal bound and could not produce its output.
    Limit(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Analyze(a) => run_analyze(a),
        Cmd::Expand(a) => run_expand(a),
        Cmd::Kernel(a) => run_kernel(a),
        Cmd::Complexity(a) => run_complexity(a),
        Cmd::Gaps(a) => run_gaps(a),
        Cmd::Dynamics(a) => run_dynamics(a),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Limit(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

// ---------------------------------------------------------------------------
// Input loading.
// ---------------------------------------------------------------------------

enum Input {
    Morphism { m: Morphism, source: String },
    Generator { spec: GeneratorSpec, source: String },
    Fixed { view: PrefixView, source: String },
}

fn load_input(args: &InputArgs) -> Result<Input, CliError> {
    if let Some(path) = &args.morphism {
        let text = read_file(path)?;
        let m = Morphism::parse(&text)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Ok(Input::Morphism {
            m,
            source: path.display().to_string(),
        })
    } else if let Some(name) = &args.seq {
        let spec = GeneratorSpec::parse(name).map_err(|e| CliError::Input(e.to_string()))?;
        Ok(Input::Generator {
            spec,
            source: name.clone(),
        })
    } else {
        let path = args.prefix.as_ref().expect("clap guarantees one input");
        let text = read_file(path)?;
        let view = parse_prefix_file(&text)
            .map_err(|msg| CliError::Input(format!("{}: {msg}", path.display())))?;
        Ok(Input::Fixed {
            view,
            source: path.display().to_string(),
        })
    }
}

fn read_file(path: &PathBuf) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

/// Whitespace-separated symbols; a single unbroken token is split into
/// one-character symbols.  The alphabet is taken in order of first
/// appearance.
fn parse_prefix_file(text: &str) -> Result<PrefixView, String> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let symbols: Vec<String> = if tokens.len() == 1 && tokens[0].chars().count() > 1 {
        tokens[0].chars().map(String::from).collect()
    } else {
        tokens.iter().map(|t| t.to_string()).collect()
    };
    if symbols.is_empty() {
        return Err("no symbols found".into());
    }
    let mut names: Vec<String> = Vec::new();
    for s in &symbols {
        if !names.contains(s) {
            names.push(s.clone());
        }
    }
    let alphabet = Alphabet::new(&names).map_err(|e| e.to_string())?;
    let ids: Vec<u8> = symbols
        .iter()
        .map(|s| alphabet.id(s).expect("symbol was added to the alphabet"))
        .collect();
    Ok(PrefixView::fixed(alphabet, ids))
}

/// Distinct coded output names, in letter order.
fn morphism_alphabet_echo(m: &Morphism) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for a in 0..m.alphabet().len() as u8 {
        let name = m.code(a).to_string();
        if !out.contains(&name) {
            out.push(name);
        }
    }
    out
}

/// Materializes a view for the single-module commands: morphisms are
/// expanded, generators generated, fixed prefixes used as-is (modules
/// clamp the horizon to the available length).
fn module_view(args: &InputArgs, horizon: u64) -> Result<(PrefixView, InputEcho), CliError> {
    match load_input(args)? {
        Input::Morphism { m, source } => {
            let view = expand(&m, horizon).map_err(|e| CliError::Input(e.to_string()))?;
            let echo = InputEcho {
                kind: "morphism".into(),
                source,
                alphabet: view.alphabet().names().to_vec(),
                prefix_analyzed: horizon,
            };
            Ok((view, echo))
        }
        Input::Generator { spec, source } => {
            let view = generate(&spec, horizon).map_err(|e| CliError::Input(e.to_string()))?;
            let echo = InputEcho {
                kind: "generator".into(),
                source,
                alphabet: view.alphabet().names().to_vec(),
                prefix_analyzed: horizon,
            };
            Ok((view, echo))
        }
        Input::Fixed { view, source } => {
            let len = view.fixed_len().unwrap_or(0);
            let echo = InputEcho {
                kind: "prefix".into(),
                source,
                alphabet: view.alphabet().names().to_vec(),
                prefix_analyzed: horizon.min(len),
            };
            Ok((view, echo))
        }
    }
}

// ---------------------------------------------------------------------------
// Report emission.
// ---------------------------------------------------------------------------

fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Self-validates, then writes JSON (to stdout or a file) or the text
/// summary.  Returns extra text lines to print after the summary.
fn emit(report: &Report, json: &Option<String>, extra_text: &[String]) -> Result<(), CliError> {
    report::validate_report(report)
        .map_err(|e| CliError::Limit(format!("report failed self-validation: {e}")))?;
    match json {
        Some(dest) => {
            let text = report::to_json_string(report);
            if dest == "-" {
                print!("{text}");
            } else {
                fs::write(dest, &text)
                    .map_err(|e| CliError::Input(format!("cannot write {dest}: {e}")))?;
            }
        }
        None => {
            print!("{}", report::render_text(report));
            for line in extra_text {
                println!("{line}");
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

fn analyze_config(args: &AnalyzeArgs) -> Result<Config, CliError> {
    let mut config = Config::default();
    if let Some(n) = args.prefix_len {
        config.prefix_len = n;
    }
    if let Some(bases) = &args.bases {
        for &q in bases {
            if q < 2 {
                return Err(CliError::Input(format!("base {q} is not >= 2")));
            }
        }
        config.bases = bases.clone();
    }
    if let Some(k) = args.kmax {
        config.kernel.k_max = k;
    }
    if let Some(h) = args.kernel_horizon {
        config.kernel.horizon = h;
    }
    if let Some(n) = args.nmax {
        config.complexity_nmax = n;
    }
    if args.threads.is_some() {
        config.kernel.threads = args.threads;
    }
    Ok(config)
}

fn run_analyze(args: AnalyzeArgs) -> Result<ExitCode, CliError> {
    let config = analyze_config(&args)?;
    let t_load = Instant::now();
    let input = load_input(&args.input)?;
    let load_ms = ms_since(t_load);

    let t_run = Instant::now();
    let (echo, outcome) = match input {
        Input::Morphism { m, source } => {
            let echo = InputEcho {
                kind: "morphism".into(),
                source,
                alphabet: morphism_alphabet_echo(&m),
                prefix_analyzed: config.prefix_len,
            };
            (echo, Ok(analyze(&m, &config)))
        }
        Input::Generator { spec, source } => {
            let result = generate(&spec, config.prefix_len).and_then(|mut view| {
                let analysis = analyze_sequence(&mut view, Some(&spec), &config)?;
                Ok((analysis, view.alphabet().names().to_vec()))
            });
            match result {
                Ok((analysis, alphabet)) => {
                    let echo = InputEcho {
                        kind: "generator".into(),
                        source,
                        alphabet,
                        prefix_analyzed: config.prefix_len,
                    };
                    (echo, Ok(analysis))
                }
                Err(e) => {
                    let echo = InputEcho {
                        kind: "generator".into(),
                        source,
                        alphabet: Vec::new(),
                        prefix_analyzed: 0,
                    };
                    (echo, Err(e))
                }
            }
        }
        Input::Fixed { mut view, source } => {
            let len = view.fixed_len().unwrap_or(0);
            let echo = InputEcho {
                kind: "prefix".into(),
                source,
                alphabet: view.alphabet().names().to_vec(),
                prefix_analyzed: config.prefix_len.min(len),
            };
            let outcome = analyze_sequence(&mut view, None, &config);
            (echo, outcome)
        }
    };
    let run_ms = ms_since(t_run);

    let mut timings = BTreeMap::new();
    timings.insert("load".to_string(), load_ms);
    timings.insert("analyze".to_string(), run_ms);

    match outcome {
        Ok(analysis) => {
            let report = build_report(echo, &config, &analysis, timings);
            emit(&report, &args.out.json, &[])?;
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => {
            // The engine could not run to completion; say so inside a
            // well-formed report and signal the limit in the exit code.
            let analysis = Analysis {
                verdict: Verdict {
                    conclusion: Conclusion::Inconclusive,
                    certified: false,
                    evidence: Vec::new(),
                    remarks: Vec::new(),
                    diagnostics: vec![format!("internal limit: {e}")],
                },
                payloads: Default::default(),
            };
            let report = build_report(echo, &config, &analysis, timings);
            emit(&report, &args.out.json, &[])?;
            Ok(ExitCode::from(3))
        }
    }
}

// ---------------------------------------------------------------------------
// expand
// ---------------------------------------------------------------------------

fn run_expand(args: ExpandArgs) -> Result<ExitCode, CliError> {
    let text = read_file(&args.morphism)?;
    let m = Morphism::parse(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.morphism.display())))?;
    let view = expand(&m, args.length).map_err(|e| CliError::Input(e.to_string()))?;
    let rendered = view.render(args.length as usize);
    if !rendered.is_empty() {
        println!("{rendered}");
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// kernel
// ---------------------------------------------------------------------------

fn run_kernel(args: KernelArgs) -> Result<ExitCode, CliError> {
    if args.q < 2 {
        return Err(CliError::Input(format!("base {} is not >= 2", args.q)));
    }
    let mut config = Config::default();
    config.bases = vec![args.q];
    config.kernel.k_max = args.kmax;
    config.kernel.horizon = args.horizon;
    config.kernel.threads = args.threads;

    let (mut view, echo) = module_view(&args.input, args.horizon)?;
    let mut report = fragment_report(echo, &config);
    let mut extra = Vec::new();
    let t0 = Instant::now();
    match args.family {
        Some(f) => {
            let (label, family) = match f {
                FamilyArg::Const => (format!("r={}", args.r), KernelFamily::Constant(args.r)),
                FamilyArg::QkK => ("q^k-k".to_string(), KernelFamily::QkMinusK),
                FamilyArg::Qk1 => ("q^k-1".to_string(), KernelFamily::QkMinus1),
            };
            let est = targeted_kernel_family(
                &mut view,
                args.q,
                &family,
                args.kmax,
                args.horizon,
                args.threads,
            )
            .map_err(|e| CliError::Limit(e.to_string()))?;
            report.payloads.kernel_families.push(KernelFamilyDto {
                family: label,
                estimate: report::kernel_dto(&est),
            });
        }
        None => {
            let est = kernel_lower_bound(&mut view, args.q, &config.kernel)
                .map_err(|e| CliError::Limit(e.to_string()))?;
            let reps: Vec<String> = est
                .representatives
                .iter()
                .map(|rep| format!("(k={}, r={})", rep.k, rep.r))
                .collect();
            extra.push(format!("representatives: {}", reps.join(" ")));
            report.payloads.kernel.push(report::kernel_dto(&est));
        }
    }
    report.timings.insert("kernel".into(), ms_since(t0));
    emit(&report, &args.out.json, &extra)?;
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// complexity
// ---------------------------------------------------------------------------

fn run_complexity(args: ComplexityArgs) -> Result<ExitCode, CliError> {
    let mut config = Config::default();
    config.complexity_nmax = args.nmax;
    config.complexity_horizon = args.horizon;

    let (mut view, echo) = module_view(&args.input, args.horizon)?;
    let mut report = fragment_report(echo, &config);
    let t0 = Instant::now();
    let profile = block_complexity(&mut view, args.nmax, args.horizon)
        .map_err(|e| CliError::Limit(e.to_string()))?;
    report.timings.insert("complexity".into(), ms_since(t0));

    let mut extra = vec![format!("{:>5} {:>12} {:>12}", "n", "p(n)", "appearance")];
    for n in 1..profile.p.len().min(profile.appearance.len()) {
        extra.push(format!(
            "{:>5} {:>12} {:>12}",
            n, profile.p[n], profile.appearance[n]
        ));
    }
    report.payloads.complexity = Some(report::complexity_dto(&profile));
    emit(&report, &args.out.json, &extra)?;
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// gaps
// ---------------------------------------------------------------------------

fn run_gaps(args: GapsArgs) -> Result<ExitCode, CliError> {
    let mut config = Config::default();
    config.gaps_horizon = args.horizon;
    config.runs_horizon = args.horizon;
    config.runs_nmax = args.nmax;

    let (mut view, echo) = module_view(&args.input, args.horizon)?;
    let symbols: Vec<u8> = match &args.symbol {
        Some(name) => {
            let id = view.alphabet().id(name).ok_or_else(|| {
                CliError::Input(format!(
                    "unknown symbol `{name}` (alphabet: {})",
                    view.alphabet().names().join(" ")
                ))
            })?;
            vec![id]
        }
        None => (0..view.alphabet().len() as u8).collect(),
    };

    let mut report = fragment_report(echo, &config);
    let mut extra = Vec::new();
    let t0 = Instant::now();
    for &d in &symbols {
        let name = view.alphabet().name(d).to_string();
        let profile = occurrence_profile(&mut view, d, args.horizon)
            .map_err(|e| CliError::Limit(e.to_string()))?;
        extra.push(format!(
            "symbol {name}: {} occurrences in {} (min tail gap {}, max tail ratio {})",
            profile.count(),
            profile.horizon,
            profile
                .min_tail_gap
                .map_or("-".to_string(), |g| g.to_string()),
            profile
                .max_tail_ratio
                .map_or("-".to_string(), |r| format!("{r:.4}")),
        ));
        report.payloads.occurrences.push(report::occurrence_dto(&profile));

        match cobham_gap_test(&mut view, d, args.horizon, &config.occurrence) {
            Ok(v) => report.payloads.gap_verdicts.push(report::gap_dto(&v)),
            Err(e @ Error::TooFewOccurrences { .. }) => {
                eprintln!("note: gap test skipped for {name}: {e}");
            }
            Err(e) => return Err(CliError::Limit(e.to_string())),
        }
        match minsky_papert_test(&mut view, d, args.horizon, &config.occurrence) {
            Ok(v) => report.payloads.ratio_verdicts.push(report::ratio_dto(&name, &v)),
            Err(e @ (Error::TooFewOccurrences { .. } | Error::FrequencyNotSmall { .. })) => {
                eprintln!("note: ratio test skipped for {name}: {e}");
            }
            Err(e) => return Err(CliError::Limit(e.to_string())),
        }
    }
    match run_first_occurrence(&mut view, args.nmax, args.horizon) {
        Ok(profile) => {
            extra.push(format!(
                "runs: max first-occurrence/n = {:.2} over n <= {}",
                profile.max_f_over_n, profile.n_max
            ));
            report.payloads.runs = Some(report::runs_dto(&profile));
        }
        Err(e) => eprintln!("note: run statistics skipped: {e}"),
    }
    report.timings.insert("gaps".into(), ms_since(t0));
    emit(&report, &args.out.json, &extra)?;
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// dynamics
// ---------------------------------------------------------------------------

/// Horizon for the return-word sample feeding the divisibility profile.
const HOST_SAMPLE_HORIZON: u64 = 4096;

fn run_dynamics(args: DynamicsArgs) -> Result<ExitCode, CliError> {
    match load_input(&args.input)? {
        Input::Morphism { m, source } => dynamics_on_morphism(args, m, source),
        _ => Err(CliError::Input(
            "dynamics operates on the transition matrix; pass --morphism".into(),
        )),
    }
}

fn dynamics_on_morphism(
    args: DynamicsArgs,
    m: Morphism,
    source: String,
) -> Result<ExitCode, CliError> {
    let mut config = Config::default();
    config.obstruction.q_max = args.qmax;
    config.obstruction.j_max = args.jmax;
    config.host_depth = args.depth;

    let echo = InputEcho {
        kind: "morphism".into(),
        source,
        alphabet: morphism_alphabet_echo(&m),
        prefix_analyzed: HOST_SAMPLE_HORIZON,
    };
    let mut report = fragment_report(echo, &config);
    let mut extra = Vec::new();
    let t0 = Instant::now();

    let obstruction = eigenvalue_obstruction(&m, &config.obstruction)
        .map_err(|e| CliError::Limit(e.to_string()))?;
    for (q, outcome) in &obstruction.per_q {
        let desc = match outcome {
            QObstruction::Obstructed(ObstructionReason::PrimeNotInDeterminant { p }) => {
                format!("obstructed (prime {p} does not divide the determinant)")
            }
            QObstruction::Obstructed(ObstructionReason::ResidueStall { p, j, .. }) => {
                format!("obstructed (residue stall at prime {p}, largest admissible j = {j})")
            }
            QObstruction::NotObstructed => "open".to_string(),
        };
        extra.push(format!("q={q}: {desc}"));
    }
    report.payloads.obstruction = Some(report::obstruction_dto(&obstruction));

    // Return-word divisibility, when a meaningful modulus exists: the flag
    // wins, otherwise the dominant eigenvalue if it is an integer >= 2.
    let qs: Vec<u64> = match args.q {
        Some(q) if q >= 2 => vec![q],
        Some(q) => return Err(CliError::Input(format!("base {q} is not >= 2"))),
        None => match dominant_eigenvalue(&transition_matrix(&m)) {
            Ok(rho) => match rho.as_integer().and_then(|d| u64::try_from(d).ok()) {
                Some(d) if d >= 2 => vec![d],
                _ => {
                    eprintln!(
                        "note: divisibility profile skipped: dominant eigenvalue is not an integer >= 2"
                    );
                    Vec::new()
                }
            },
            Err(e) => {
                eprintln!("note: divisibility profile skipped: {e}");
                Vec::new()
            }
        },
    };
    if !qs.is_empty() {
        let depth = args.depth.max(m.alphabet().len() + 2);
        let host = expand_letters(&m, HOST_SAMPLE_HORIZON)
            .and_then(|mut letters| {
                let sample = return_words(&mut letters, m.start(), HOST_SAMPLE_HORIZON)?;
                host_profile(&m, depth, &sample, &qs)
            });
        match host {
            Ok(h) => report.payloads.host = Some(report::host_dto(&h)),
            Err(e) => eprintln!("note: divisibility profile skipped: {e}"),
        }
    }
    report.timings.insert("dynamics".into(), ms_since(t0));
    emit(&report, &args.out.json, &extra)?;
    Ok(ExitCode::SUCCESS)
}
