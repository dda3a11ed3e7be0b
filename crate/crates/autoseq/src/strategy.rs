//! The decision pipeline: orchestrates every criterion into a single
//! [`Verdict`] with an ordered, graded evidence chain.
//!
//! The pipeline follows the natural decision order for a morphic input:
//!
//! 1. **Periodicity screen** — an ultimately periodic word is automatic in
//!    every base, so nothing further applies.
//! 2. **Dominant-eigenvalue classification** — a primitive morphism with
//!    irrational spectral radius is not automatic in any base
//!    (irrational-eigenvalue theorem); a spectral radius no power of which
//!    is an integer rules out every base by Durand's theorem; and
//!    `rho^k = d` reduces the whole problem to `d`-automaticity.
//! 3. **Base-`d` battery** — kernel growth, targeted kernel families, block
//!    complexity, gap/ratio/run statistics, and the dynamical obstructions.
//! 4. **Aggregation** — certified algebraic conclusions outrank advisory
//!    prefix-based ones; the verdict records which grade it reached.
//!
//! Evidence grading is deliberately conservative: only exact algebra and
//! automaton constructions are `Certified`; every finite-prefix asymptotic
//! observation is `Advisory`, and a negative verdict built solely from such
//! observations is itself labeled advisory.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;

use crate::algebra::{dominant_eigenvalue, AlgebraicNumber, NumberClass, NumberField};
use crate::dynamical::{
    eigenvalue_obstruction, host_profile, HostProfile, ObstructionOptions, ObstructionReport,
    QObstruction,
};
use crate::gaps_runs::{
    cobham_gap_test, minsky_papert_test, occurrence_profile, run_first_occurrence, GapVerdict,
    OccurrenceOptions, RatioVerdict, RunProfile,
};
use crate::kernel::{
    dfao_from_uniform, kernel_lower_bound, minimize, targeted_kernel_family, KernelEstimate,
    KernelFamily, KernelOptions,
};
use crate::matrix::{is_primitive, transition_matrix};
use crate::poly::Rat;
use crate::seqlib::{generate, GeneratorSpec};
use crate::stats::{
    block_complexity, empirical_frequencies, frequencies, ComplexityProfile,
    EmpiricalFrequencies, FrequencyReport, GrowthClass,
};
use crate::words::{expand, expand_letters, return_words, Morphism, PrefixView};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Verdict vocabulary.
// ---------------------------------------------------------------------------

/// Closed enumeration of the theorems evidence items may cite.  Report
/// rendering fails closed on anything outside this list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TheoremTag {
    /// Finite kernel characterization of automatic sequences.
    Kernel,
    /// Yazdani's non-automaticity results for arithmetic functions.
    Yazdani,
    /// Irrational letter/block frequency rules out automaticity.
    Irrational1,
    /// Primitive morphism with irrational dominant eigenvalue.
    Irrational2,
    /// Synchronized functions (run-length first occurrences) are O(n).
    Synch1,
    /// Block complexity of an automatic sequence is O(n).
    Complexity,
    /// Cobham's gap dichotomy: log-bounded counting or recurrent gaps.
    Gaps,
    /// Characteristic sequences of degree >= 2 polynomials are not automatic.
    PolynomialGap,
    /// Minsky–Papert ratio criterion for zero-density symbols.
    MinskyPapert,
    /// Orbit-closure / sub-alphabet transfer of non-automaticity.
    Subalphabet,
    /// Durand: automaticity forces multiplicative dependence on rho.
    Durand,
    /// Cobham's base-dependence theorem.
    Cobham,
    /// Dekking / Müllner–Yassawi: dynamical eigenvalues of automatic systems.
    Dekking,
    /// Host's return-word criterion for dynamical eigenvalues.
    Host,
    /// Trivial-coboundary lemma bounding eigenvalue denominators by det M.
    Coboundary,
    /// Automaticity by construction (uniform morphism / DFAO / periodicity).
    Automaticity,
    /// Christol's transcendence connection over prime-power alphabets.
    Christol,
}

impl TheoremTag {
    pub const ALL: [TheoremTag; 17] = [
        TheoremTag::Kernel,
        TheoremTag::Yazdani,
        TheoremTag::Irrational1,
        TheoremTag::Irrational2,
        TheoremTag::Synch1,
        TheoremTag::Complexity,
        TheoremTag::Gaps,
        TheoremTag::PolynomialGap,
        TheoremTag::MinskyPapert,
        TheoremTag::Subalphabet,
        TheoremTag::Durand,
        TheoremTag::Cobham,
        TheoremTag::Dekking,
        TheoremTag::Host,
        TheoremTag::Coboundary,
        TheoremTag::Automaticity,
        TheoremTag::Christol,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremTag::Kernel => "kernel",
            TheoremTag::Yazdani => "yazdani",
            TheoremTag::Irrational1 => "irrational-frequency",
            TheoremTag::Irrational2 => "irrational-eigenvalue",
            TheoremTag::Synch1 => "synchronization",
            TheoremTag::Complexity => "complexity",
            TheoremTag::Gaps => "gap-dichotomy",
            TheoremTag::PolynomialGap => "polynomial-gap",
            TheoremTag::MinskyPapert => "minsky-papert",
            TheoremTag::Subalphabet => "subalphabet",
            TheoremTag::Durand => "durand",
            TheoremTag::Cobham => "cobham",
            TheoremTag::Dekking => "dekking",
            TheoremTag::Host => "host",
            TheoremTag::Coboundary => "matrix-coboundary",
            TheoremTag::Automaticity => "automaticity",
            TheoremTag::Christol => "christol",
        }
    }

    /// Inverse of [`TheoremTag::as_str`]; `None` for unknown names.
    pub fn parse(s: &str) -> Option<TheoremTag> {
        TheoremTag::ALL.iter().copied().find(|t| t.as_str() == s)
    }
}

/// How much weight an evidence item carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grade {
    /// Exact algebra or an explicit automaton construction.
    Certified,
    /// Finite-prefix observation consistent with (but not proving) the claim.
    Advisory,
}

impl Grade {
    pub fn as_str(self) -> &'static str {
        match self {
            Grade::Certified => "certified",
            Grade::Advisory => "advisory",
        }
    }
}

/// One entry of the ordered evidence chain.
#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceItem {
    /// Which check produced this item (stable, kebab-case).
    pub criterion: String,
    pub tag: TheoremTag,
    pub grade: Grade,
    /// Key → value payload; keys stable, values deterministic.
    pub details: BTreeMap<String, String>,
}

impl EvidenceItem {
    fn new(criterion: &str, tag: TheoremTag, grade: Grade) -> EvidenceItem {
        EvidenceItem {
            criterion: criterion.to_string(),
            tag,
            grade,
            details: BTreeMap::new(),
        }
    }

    fn with(mut self, key: &str, value: impl ToString) -> EvidenceItem {
        self.details.insert(key.to_string(), value.to_string());
        self
    }
}

/// Final classification of the input.
#[derive(Debug, Clone, PartialEq)]
pub enum Conclusion {
    /// Not q-automatic for any q >= 2.
    NotAutomaticAny,
    /// Not q-automatic for the listed bases (sorted ascending).
    NotQAutomatic(Vec<u64>),
    /// Consistent with d-automaticity; `certified` only for d-uniform input.
    CandidateAutomatic { d: u64, certified: bool },
    /// The analyzed prefix is eventually periodic.
    UltimatelyPeriodic { preperiod: u64, period: u64 },
    Inconclusive,
}

/// The pipeline's result: conclusion, graded evidence, commentary.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub conclusion: Conclusion,
    /// True when the conclusion rests on at least one certified item (for
    /// negative conclusions) or on an automaton construction.
    pub certified: bool,
    pub evidence: Vec<EvidenceItem>,
    pub remarks: Vec<String>,
    /// Non-fatal trouble encountered along the way.
    pub diagnostics: Vec<String>,
}

/// Eventually periodic structure found by the screen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicityScreen {
    pub preperiod: u64,
    pub period: u64,
}

/// Compact occurrence summary kept in the payloads (the full position list
/// is too large to echo into reports).
#[derive(Debug, Clone, PartialEq)]
pub struct OccurrenceSummary {
    pub symbol: String,
    pub count: u64,
    pub horizon: u64,
    /// (horizon sample, occurrences so far) at powers of two.
    pub counting_samples: Vec<(u64, u64)>,
    pub min_tail_gap: Option<u64>,
    pub max_tail_ratio: Option<f64>,
}

/// Raw per-module results gathered during analysis, for report embedding.
#[derive(Debug, Clone, Default)]
pub struct ModulePayloads {
    pub eigenvalue: Option<AlgebraicNumber>,
    pub periodicity: Option<PeriodicityScreen>,
    pub dfao_states: Option<usize>,
    /// Grid kernel scans, one per base examined.
    pub kernel: Vec<KernelEstimate>,
    /// Targeted family scans, labeled by family.
    pub kernel_families: Vec<(String, KernelEstimate)>,
    pub complexity: Option<ComplexityProfile>,
    /// Exact + empirical frequencies (morphism inputs).
    pub frequencies: Option<FrequencyReport>,
    /// Empirical frequencies only (sequence inputs).
    pub empirical: Option<EmpiricalFrequencies>,
    pub occurrences: Vec<OccurrenceSummary>,
    pub gap_verdicts: Vec<(String, GapVerdict)>,
    pub ratio_verdicts: Vec<(String, RatioVerdict)>,
    pub runs: Option<RunProfile>,
    pub host: Option<HostProfile>,
    pub obstruction: Option<ObstructionReport>,
}

/// A verdict together with everything measured along the way.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub verdict: Verdict,
    pub payloads: ModulePayloads,
}

// ---------------------------------------------------------------------------
// Configuration.
// ---------------------------------------------------------------------------

/// Tuning for the whole pipeline.  Every bound is surfaced so reports are
/// self-describing.
#[derive(Debug, Clone)]
pub struct Config {
    /// Bases swept by prefix-only analysis (morphism analysis derives its
    /// base from the dominant eigenvalue instead).
    pub bases: Vec<u64>,
    /// Prefix length to materialize.
    pub prefix_len: u64,
    pub kernel: KernelOptions,
    pub complexity_nmax: usize,
    pub complexity_horizon: u64,
    pub occurrence: OccurrenceOptions,
    pub gaps_horizon: u64,
    pub runs_horizon: u64,
    /// Longest run length probed by the run table.
    pub runs_nmax: usize,
    /// f(n)/n beyond this is treated as super-linear run growth.
    pub run_linearity_threshold: f64,
    pub obstruction: ObstructionOptions,
    pub host_depth: usize,
    /// Floor for the rho^k integer search; raised to 16 * deg(rho)
    /// automatically.
    pub mult_k_bound: u32,
    /// Periodicity screen bounds.
    pub period_max: u64,
    pub preperiod_max: u64,
}

impl Default for Config {
    fn default() -> Config {
        Config {
            bases: (2..=16).collect(),
            prefix_len: 1 << 20,
            kernel: KernelOptions::default(),
            complexity_nmax: 64,
            complexity_horizon: 1 << 18,
            occurrence: OccurrenceOptions::default(),
            gaps_horizon: 1 << 20,
            runs_horizon: 1 << 20,
            runs_nmax: 20,
            run_linearity_threshold: 64.0,
            obstruction: ObstructionOptions::default(),
            host_depth: 16,
            mult_k_bound: 64,
            period_max: 512,
            preperiod_max: 4096,
        }
    }
}

// ---------------------------------------------------------------------------
// Periodicity screen.
// ---------------------------------------------------------------------------

/// Looks for an eventual period on the prefix: the minimal weak period of
/// the suffix past the allowed preperiod, via the KMP failure function,
/// extended leftward as far as it holds.  Requires at least four full
/// periods of slack so short accidental repetitions do not fire.
pub fn detect_eventual_period(
    view: &mut PrefixView,
    period_max: u64,
    preperiod_max: u64,
    horizon: u64,
) -> Result<Option<PeriodicityScreen>> {
    let h = view.ensure_up_to(horizon)?;
    let data = &view.symbols()[..h as usize];
    if data.len() < 8 {
        return Ok(None);
    }
    let cut = (preperiod_max as usize).min(data.len() / 2);
    let s = &data[cut..];
    let n = s.len();
    let mut fail = vec![0usize; n];
    for i in 1..n {
        let mut j = fail[i - 1];
        while j > 0 && s[i] != s[j] {
            j = fail[j - 1];
        }
        if s[i] == s[j] {
            j += 1;
        }
        fail[i] = j;
    }
    let p = n - fail[n - 1];
    if p as u64 > period_max || n < 4 * p {
        return Ok(None);
    }
    let mut start = cut;
    while start > 0 && data[start - 1] == data[start - 1 + p] {
        start -= 1;
    }
    Ok(Some(PeriodicityScreen {
        preperiod: start as u64,
        period: p as u64,
    }))
}

// ---------------------------------------------------------------------------
// rho power classification.
// ---------------------------------------------------------------------------

enum IntegerPower {
    /// rho^k = d exactly, with the smallest such k.
    Found { k: u32, d: BigInt },
    /// No power of rho is ever an integer (exact argument).
    NeverCertified { reason: String },
    /// No integer power with exponent <= bound; larger ones unsearched.
    ExhaustedAt { bound: u32 },
}

fn integer_power(rho: &AlgebraicNumber, k_bound: u32, strictly_dominant: bool) -> IntegerPower {
    match rho.class() {
        NumberClass::Integer(n) => IntegerPower::Found {
            k: 1,
            d: n.clone(),
        },
        NumberClass::NonIntegerRational(r) => IntegerPower::NeverCertified {
            reason: format!(
                "rho = {r} is rational with denominator {} > 1, so every power of rho \
                 keeps that denominator and is never an integer",
                r.denom()
            ),
        },
        NumberClass::Irrational => {
            if strictly_dominant {
                return IntegerPower::NeverCertified {
                    reason: format!(
                        "rho is an irrational Perron number of degree {}: rho^k = d would \
                         force every algebraic conjugate to share the modulus of rho, \
                         contradicting strict dominance",
                        rho.degree()
                    ),
                };
            }
            let field = NumberField::new(rho.min_poly());
            let gen = field.generator();
            let mut power = field.from_rat(Rat::one());
            for k in 1..=k_bound {
                power = field.mul(&power, &gen);
                if let Some(r) = field.as_rational(&power) {
                    // rho is an algebraic integer (monic char poly), so a
                    // rational power is an integer.
                    if r.denom().is_one() && r.numer() > &BigInt::one() {
                        return IntegerPower::Found {
                            k,
                            d: r.numer().clone(),
                        };
                    }
                }
            }
            IntegerPower::ExhaustedAt { bound: k_bound }
        }
    }
}

// ---------------------------------------------------------------------------
// Battery state.
// ---------------------------------------------------------------------------

#[derive(Default)]
struct State {
    evidence: Vec<EvidenceItem>,
    remarks: Vec<String>,
    diagnostics: Vec<String>,
    payloads: ModulePayloads,
    /// Certified evidence ruling out every base.
    certified_all_q: bool,
    /// Certified evidence against specific bases.
    certified_bases: Vec<u64>,
    /// Advisory evidence that applies to every base at once.
    advisory_all_q: bool,
    /// Advisory evidence against specific bases.
    advisory_bases: Vec<u64>,
}

impl State {
    fn push(&mut self, item: EvidenceItem) {
        self.evidence.push(item);
    }

    fn note(&mut self, msg: impl ToString) {
        self.diagnostics.push(msg.to_string());
    }
}

fn is_prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut m = n;
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            return if m == 1 { Some((p, e)) } else { None };
        }
        p += 1;
    }
    Some((n, 1))
}

/// Attaches the Christol transcendence remark when it applies: a negative
/// verdict over an alphabet whose size is a prime power.
fn christol_remark(st: &mut State, alphabet_size: usize, conclusion: &Conclusion) {
    let Some((p, e)) = is_prime_power(alphabet_size as u64) else {
        return;
    };
    let size = alphabet_size as u64;
    let applies = match conclusion {
        Conclusion::NotAutomaticAny => true,
        Conclusion::NotQAutomatic(qs) => qs.iter().any(|q| {
            let mut m = *q;
            while m % p == 0 {
                m /= p;
            }
            m == 1
        }),
        _ => false,
    };
    if applies {
        st.remarks.push(format!(
            "Christol: the output alphabet has prime-power size {size} = {p}^{e}, so \
             non-{size}-automaticity means the associated formal power series over \
             F_{size} is transcendental over F_{size}(x)"
        ));
    }
}

// ---------------------------------------------------------------------------
// The base-d battery (shared by morphism and sequence analysis).
// ---------------------------------------------------------------------------

struct BatteryInput<'a> {
    /// Bases for grid kernel scans.
    bases: &'a [u64],
    /// Morphism context, when available, with the reduced base.
    morphism: Option<&'a Morphism>,
    reduction_base: Option<u64>,
    primitive: bool,
}

fn run_battery(
    st: &mut State,
    view: &mut PrefixView,
    input: &BatteryInput<'_>,
    config: &Config,
) {
    let prefix = config.prefix_len;

    // Kernel grid scans per base.
    for &q in input.bases {
        let mut opts = config.kernel.clone();
        opts.horizon = opts.horizon.min(prefix);
        match kernel_lower_bound(view, q, &opts) {
            Ok(est) => {
                if est.capped {
                    st.push(
                        EvidenceItem::new("kernel-growth", TheoremTag::Kernel, Grade::Advisory)
                            .with("base", q)
                            .with("distinct_classes", est.distinct_classes)
                            .with("k_max_used", est.k_max_used)
                            .with("capped", "true"),
                    );
                    st.advisory_bases.push(q);
                }
                st.payloads.kernel.push(est);
            }
            Err(e) => st.note(format!("kernel scan at base {q} failed: {e}")),
        }
    }

    // Targeted kernel families on the reduced base.
    if let Some(d) = input.reduction_base {
        for (label, family) in [
            ("q^k-k", KernelFamily::QkMinusK),
            ("q^k-1", KernelFamily::QkMinus1),
        ] {
            match targeted_kernel_family(
                view,
                d,
                &family,
                config.kernel.k_max,
                config.kernel.horizon.min(prefix),
                config.kernel.threads,
            ) {
                Ok(est) => {
                    if est.distinct_classes >= config.kernel.k_max as usize {
                        st.push(
                            EvidenceItem::new(
                                "kernel-family",
                                TheoremTag::Kernel,
                                Grade::Advisory,
                            )
                            .with("base", d)
                            .with("family", label)
                            .with("distinct_classes", est.distinct_classes)
                            .with("k_max", config.kernel.k_max),
                        );
                        st.advisory_bases.push(d);
                    }
                    st.payloads.kernel_families.push((label.to_string(), est));
                }
                Err(e) => st.note(format!("kernel family {label} at base {d} failed: {e}")),
            }
        }
    }

    // Block complexity.
    match block_complexity(
        view,
        config.complexity_nmax,
        config.complexity_horizon.min(prefix),
    ) {
        Ok(profile) => {
            if matches!(
                profile.growth,
                GrowthClass::QuadraticOrMore | GrowthClass::ExponentialSuspected
            ) {
                st.push(
                    EvidenceItem::new("block-complexity", TheoremTag::Complexity, Grade::Advisory)
                        .with("growth", format!("{:?}", profile.growth))
                        .with("loglog_slope", format!("{:.4}", profile.loglog_slope))
                        .with("gray_zone", profile.gray_zone)
                        .with("stable_n_max", profile.stable_n_max),
                );
                st.advisory_all_q = true;
            }
            st.payloads.complexity = Some(profile);
        }
        Err(e) => st.note(format!("complexity profile failed: {e}")),
    }

    // Occurrence statistics per symbol: gap dichotomy and ratio test.
    let n_syms = view.alphabet().len();
    for s in 0..n_syms as u8 {
        let symbol = view.alphabet().name(s).to_string();
        match occurrence_profile(view, s, config.gaps_horizon.min(prefix)) {
            Ok(profile) => {
                st.payloads.occurrences.push(OccurrenceSummary {
                    symbol: profile.symbol.clone(),
                    count: profile.count(),
                    horizon: profile.horizon,
                    counting_samples: profile.counting_samples.clone(),
                    min_tail_gap: profile.min_tail_gap,
                    max_tail_ratio: profile.max_tail_ratio,
                });
            }
            Err(_) => continue,
        }
        match cobham_gap_test(view, s, config.gaps_horizon.min(prefix), &config.occurrence) {
            Ok(verdict) => {
                if let GapVerdict::FailsBoth(ev) = &verdict {
                    st.push(
                        EvidenceItem::new("gap-dichotomy", TheoremTag::Gaps, Grade::Advisory)
                            .with("symbol", &ev.symbol)
                            .with("count", ev.count)
                            .with("count_log_ratio", format!("{:.4}", ev.count_log_ratio))
                            .with(
                                "min_tail_gap",
                                ev.min_tail_gap
                                    .map(|g| g.to_string())
                                    .unwrap_or_else(|| "none".into()),
                            ),
                    );
                    st.advisory_all_q = true;
                }
                st.payloads.gap_verdicts.push((symbol.clone(), verdict));
            }
            Err(Error::TooFewOccurrences { .. }) => {}
            Err(e) => st.note(format!("gap test on {symbol} failed: {e}")),
        }
        match minsky_papert_test(view, s, config.gaps_horizon.min(prefix), &config.occurrence) {
            Ok(verdict) => {
                if let RatioVerdict::RatioTendsToOne { max_tail_ratio, .. } = &verdict {
                    st.push(
                        EvidenceItem::new(
                            "occurrence-ratio",
                            TheoremTag::MinskyPapert,
                            Grade::Advisory,
                        )
                        .with("symbol", &symbol)
                        .with("max_tail_ratio", format!("{:.6}", max_tail_ratio)),
                    );
                    st.advisory_all_q = true;
                }
                st.payloads.ratio_verdicts.push((symbol, verdict));
            }
            Err(Error::FrequencyNotSmall { .. }) | Err(Error::TooFewOccurrences { .. }) => {}
            Err(e) => st.note(format!("ratio test failed: {e}")),
        }
    }

    // Run-length first occurrences.
    match run_first_occurrence(view, config.runs_nmax, config.runs_horizon.min(prefix)) {
        Ok(profile) => {
            if profile.max_f_over_n > config.run_linearity_threshold {
                st.push(
                    EvidenceItem::new("run-growth", TheoremTag::Synch1, Grade::Advisory)
                        .with("max_f_over_n", format!("{:.2}", profile.max_f_over_n))
                        .with("threshold", format!("{:.2}", config.run_linearity_threshold)),
                );
                st.advisory_all_q = true;
            }
            st.payloads.runs = Some(profile);
        }
        Err(e) => st.note(format!("run table failed: {e}")),
    }

    // Dynamical criteria need the morphism and primitivity.
    if let Some(m) = input.morphism {
        if input.primitive {
            run_dynamical(st, m, input.reduction_base, config);
            match frequencies(m, config.complexity_horizon.min(prefix)) {
                Ok(report) => st.payloads.frequencies = Some(report),
                Err(e) => st.note(format!("frequency computation failed: {e}")),
            }
        } else {
            st.note("transition matrix not primitive; dynamical criteria skipped");
            if let Ok(report) = empirical_frequencies(view, config.complexity_horizon.min(prefix))
            {
                st.payloads.empirical = Some(report);
            }
        }
    } else if let Ok(report) = empirical_frequencies(view, config.complexity_horizon.min(prefix))
    {
        st.payloads.empirical = Some(report);
    }
}

fn run_dynamical(st: &mut State, m: &Morphism, reduction_base: Option<u64>, config: &Config) {
    let mut opts = config.obstruction.clone();
    if let Some(d) = reduction_base {
        if d <= 256 {
            opts.q_max = opts.q_max.max(d);
        }
    }
    match eigenvalue_obstruction(m, &opts) {
        Ok(report) => {
            if report.extends_to_all_q {
                st.push(
                    EvidenceItem::new(
                        "eigenvalue-obstruction",
                        TheoremTag::Dekking,
                        Grade::Certified,
                    )
                    .with("det", &report.constraint.det)
                    .with("scope", "all bases")
                    .with("q_max_scanned", report.q_max),
                );
                st.certified_all_q = true;
            } else if report.all_q_obstructed {
                st.push(
                    EvidenceItem::new(
                        "eigenvalue-obstruction",
                        TheoremTag::Dekking,
                        Grade::Certified,
                    )
                    .with("det", &report.constraint.det)
                    .with("scope", format!("2..={}", report.q_max)),
                );
                st.certified_bases.extend(2..=report.q_max);
            } else if let Some(d) = reduction_base {
                if let Some(QObstruction::Obstructed(reason)) = report.outcome(d) {
                    st.push(
                        EvidenceItem::new(
                            "eigenvalue-obstruction",
                            TheoremTag::Dekking,
                            Grade::Certified,
                        )
                        .with("base", d)
                        .with("reason", format!("{reason:?}")),
                    );
                    st.certified_bases.push(d);
                }
            }
            st.payloads.obstruction = Some(report);
        }
        Err(Error::SingularMatrix) => {
            st.note("transition matrix is singular; eigenvalue obstruction inapplicable")
        }
        Err(Error::HeightNotOne(h)) => {
            st.note(format!("height {h} > 1; eigenvalue obstruction skipped"))
        }
        Err(e) => st.note(format!("eigenvalue obstruction failed: {e}")),
    }

    if let Some(d) = reduction_base {
        let depth = config.host_depth.max(m.alphabet().len() + 2);
        let sample = expand_letters(m, config.obstruction.return_horizon).and_then(|mut v| {
            let first = v.symbols()[0];
            return_words(&mut v, first, config.obstruction.return_horizon)
        });
        match sample.and_then(|s| host_profile(m, depth, &s, &[d])) {
            Ok(profile) => {
                let div = &profile.divisibility[0];
                if !div.grows {
                    st.push(
                        EvidenceItem::new("host-divisibility", TheoremTag::Host, Grade::Advisory)
                            .with("base", d)
                            .with(
                                "min_valuation_at_depth",
                                div.min_valuations.last().copied().unwrap_or(0),
                            )
                            .with("depth", profile.depth),
                    );
                    st.advisory_bases.push(d);
                }
                st.payloads.host = Some(profile);
            }
            Err(e) => st.note(format!("host profile failed: {e}")),
        }
    }
}

// ---------------------------------------------------------------------------
// Aggregation.
// ---------------------------------------------------------------------------

fn finish(
    mut st: State,
    alphabet_size: usize,
    reduction: Option<(u64, Grade)>,
) -> Analysis {
    st.certified_bases.sort_unstable();
    st.certified_bases.dedup();
    st.advisory_bases.sort_unstable();
    st.advisory_bases.dedup();

    let reduction_lifts = matches!(reduction, Some((_, Grade::Certified)));
    let (conclusion, certified) = if st.certified_all_q {
        (Conclusion::NotAutomaticAny, true)
    } else if reduction_lifts
        && reduction
            .map(|(d, _)| st.certified_bases.contains(&d))
            .unwrap_or(false)
    {
        // Not d-automatic (certified) plus the exact reduction: Durand lifts
        // the negative to every base.
        (Conclusion::NotAutomaticAny, true)
    } else if !st.certified_bases.is_empty() {
        (Conclusion::NotQAutomatic(st.certified_bases.clone()), true)
    } else if reduction.is_some() && (st.advisory_all_q || !st.advisory_bases.is_empty()) {
        let d = reduction.map(|(d, _)| d).unwrap_or(0);
        st.remarks.push(format!(
            "advisory stack on base {d} combined with the eigenvalue reduction: every \
             obstruction found is prefix-based, so the conclusion is advisory"
        ));
        (Conclusion::NotAutomaticAny, false)
    } else if st.advisory_all_q {
        (Conclusion::NotAutomaticAny, false)
    } else if !st.advisory_bases.is_empty() {
        (Conclusion::NotQAutomatic(st.advisory_bases.clone()), false)
    } else if let Some((d, _)) = reduction {
        st.remarks.push(format!(
            "no obstruction found within the configured bounds; the input is morphic with \
             dominant-eigenvalue base {d} but not {d}-uniform, so automaticity is not certified"
        ));
        (
            Conclusion::CandidateAutomatic {
                d,
                certified: false,
            },
            false,
        )
    } else {
        (Conclusion::Inconclusive, false)
    };

    christol_remark(&mut st, alphabet_size, &conclusion);
    let verdict = Verdict {
        conclusion,
        certified,
        evidence: st.evidence,
        remarks: st.remarks,
        diagnostics: st.diagnostics,
    };
    debug_assert!(verdict_invariants_hold(&verdict));
    Analysis {
        verdict,
        payloads: st.payloads,
    }
}

/// Structural sanity of a verdict: certified negatives require certified
/// evidence, and a candidate conclusion never coexists with a certified
/// negative for the same base.
pub fn verdict_invariants_hold(v: &Verdict) -> bool {
    let has_certified = v.evidence.iter().any(|e| e.grade == Grade::Certified);
    match &v.conclusion {
        Conclusion::NotAutomaticAny | Conclusion::NotQAutomatic(_) if v.certified => has_certified,
        Conclusion::CandidateAutomatic { d, .. } => !v.evidence.iter().any(|e| {
            e.grade == Grade::Certified
                && e.criterion == "eigenvalue-obstruction"
                && e.details.get("base").is_some_and(|b| b == &d.to_string())
        }),
        _ => true,
    }
}

// ---------------------------------------------------------------------------
// Morphism analysis.
// ---------------------------------------------------------------------------

/// Runs the full §-style pipeline on a morphism.  Internal errors surface
/// as an `Inconclusive` verdict with diagnostics, never as a panic.
pub fn analyze(m: &Morphism, config: &Config) -> Analysis {
    match analyze_morphism(m, config) {
        Ok(a) => a,
        Err(e) => Analysis {
            verdict: Verdict {
                conclusion: Conclusion::Inconclusive,
                certified: false,
                evidence: Vec::new(),
                remarks: Vec::new(),
                diagnostics: vec![format!("analysis aborted: {e}")],
            },
            payloads: ModulePayloads::default(),
        },
    }
}

fn analyze_morphism(m: &Morphism, config: &Config) -> Result<Analysis> {
    let mut st = State::default();
    let alphabet_size = output_alphabet_size(m);
    let mut view = expand(m, config.prefix_len.min(1 << 16))?;

    // Step 1: periodicity screen.
    let screen_horizon = config.prefix_len.min(1 << 16);
    if let Some(p) = detect_eventual_period(
        &mut view,
        config.period_max,
        config.preperiod_max,
        screen_horizon,
    )? {
        return Ok(finish_periodic(st, p));
    }

    // Step 1b: uniform morphisms are automatic by construction.
    if let Some(q) = m.uniform_length() {
        if q >= 2 {
            return uniform_analysis(st, m, &mut view, q as u64, config);
        }
    }

    // Step 2: classify the dominant eigenvalue.
    let mat = transition_matrix(m);
    let primitive = is_primitive(&mat);
    let rho = dominant_eigenvalue(&mat)?;
    st.payloads.eigenvalue = Some(rho.clone());
    let all_letters_occur = m.reachable_letters().len() == m.alphabet().len();
    if !all_letters_occur {
        st.note(
            "some letters never occur in the fixed point; eigenvalue-based arguments \
             are downgraded to advisory",
        );
    }

    if primitive && matches!(rho.class(), NumberClass::Irrational) {
        st.push(
            EvidenceItem::new(
                "dominant-eigenvalue",
                TheoremTag::Irrational2,
                Grade::Certified,
            )
            .with("min_poly", rho.min_poly())
            .with("approx", format!("{:.6}", rho.approx_f64()))
            .with("class", "irrational"),
        );
        st.certified_all_q = true;
        // Corroborate with the dynamical obstruction and exact frequencies.
        run_dynamical(&mut st, m, None, config);
        match frequencies(m, config.complexity_horizon.min(config.prefix_len)) {
            Ok(report) => st.payloads.frequencies = Some(report),
            Err(e) => st.note(format!("frequency computation failed: {e}")),
        }
        return Ok(finish(st, alphabet_size, None));
    }

    let k_bound = config.mult_k_bound.max(rho.degree() as u32 * 16);
    match integer_power(&rho, k_bound, primitive) {
        IntegerPower::NeverCertified { reason } => {
            let grade = if all_letters_occur {
                Grade::Certified
            } else {
                Grade::Advisory
            };
            st.push(
                EvidenceItem::new("power-independence", TheoremTag::Durand, grade)
                    .with("min_poly", rho.min_poly())
                    .with("reason", reason),
            );
            if grade == Grade::Certified {
                st.certified_all_q = true;
            } else {
                st.advisory_all_q = true;
            }
            st.remarks.push(
                "aperiodicity rests on the negative periodicity screen for this argument"
                    .to_string(),
            );
            Ok(finish(st, alphabet_size, None))
        }
        IntegerPower::ExhaustedAt { bound } => {
            st.push(
                EvidenceItem::new("power-independence", TheoremTag::Durand, Grade::Advisory)
                    .with("min_poly", rho.min_poly())
                    .with("searched_exponents", bound),
            );
            st.advisory_all_q = true;
            let input = BatteryInput {
                bases: &[],
                morphism: Some(m),
                reduction_base: None,
                primitive,
            };
            run_battery(&mut st, &mut view, &input, config);
            Ok(finish(st, alphabet_size, None))
        }
        IntegerPower::Found { k, d } => {
            if d <= BigInt::one() {
                st.push(
                    EvidenceItem::new("power-independence", TheoremTag::Durand, Grade::Certified)
                        .with("rho", &d)
                        .with(
                            "reason",
                            "rho = 1: no base q >= 2 is multiplicatively dependent on 1",
                        ),
                );
                st.certified_all_q = true;
                st.remarks.push(
                    "aperiodicity rests on the negative periodicity screen for this argument"
                        .to_string(),
                );
                return Ok(finish(st, alphabet_size, None));
            }
            let d: u64 = d.to_string().parse().map_err(|_| {
                Error::ParameterInvalid(format!("eigenvalue power {d} out of range"))
            })?;
            let grade = if all_letters_occur {
                Grade::Certified
            } else {
                Grade::Advisory
            };
            st.push(
                EvidenceItem::new("eigenvalue-reduction", TheoremTag::Durand, grade)
                    .with("rho_power", k)
                    .with("base", d)
                    .with(
                        "statement",
                        format!(
                            "rho^{k} = {d}: automaticity in any base is equivalent to \
                             {d}-automaticity"
                        ),
                    ),
            );
            let input = BatteryInput {
                bases: &[d],
                morphism: Some(m),
                reduction_base: Some(d),
                primitive,
            };
            run_battery(&mut st, &mut view, &input, config);
            Ok(finish(st, alphabet_size, Some((d, grade))))
        }
    }
}

fn output_alphabet_size(m: &Morphism) -> usize {
    let mut names: Vec<&str> = (0..m.alphabet().len() as u8).map(|a| m.code(a)).collect();
    names.sort_unstable();
    names.dedup();
    names.len()
}

fn finish_periodic(mut st: State, p: PeriodicityScreen) -> Analysis {
    st.push(
        EvidenceItem::new("periodicity-screen", TheoremTag::Automaticity, Grade::Advisory)
            .with("preperiod", p.preperiod)
            .with("period", p.period),
    );
    st.remarks.push(
        "ultimately periodic sequences are q-automatic for every q; the periodicity was \
         observed on a finite prefix"
            .to_string(),
    );
    st.payloads.periodicity = Some(p.clone());
    Analysis {
        verdict: Verdict {
            conclusion: Conclusion::UltimatelyPeriodic {
                preperiod: p.preperiod,
                period: p.period,
            },
            certified: false,
            evidence: st.evidence,
            remarks: st.remarks,
            diagnostics: st.diagnostics,
        },
        payloads: st.payloads,
    }
}

fn uniform_analysis(
    mut st: State,
    m: &Morphism,
    view: &mut PrefixView,
    q: u64,
    config: &Config,
) -> Result<Analysis> {
    let dfao = dfao_from_uniform(m)?;
    let minimal = minimize(&dfao);
    st.payloads.dfao_states = Some(minimal.states());
    st.push(
        EvidenceItem::new("uniform-construction", TheoremTag::Automaticity, Grade::Certified)
            .with("base", q)
            .with("dfao_states", minimal.states()),
    );
    let mut opts = config.kernel.clone();
    opts.horizon = opts.horizon.min(config.prefix_len);
    match kernel_lower_bound(view, q, &opts) {
        Ok(est) => {
            st.push(
                EvidenceItem::new("kernel-size", TheoremTag::Kernel, Grade::Advisory)
                    .with("base", q)
                    .with("distinct_classes", est.distinct_classes)
                    .with("capped", est.capped),
            );
            st.payloads.kernel.push(est);
        }
        Err(e) => st.note(format!("kernel scan failed: {e}")),
    }
    let alphabet_size = output_alphabet_size(m);
    let verdict = Verdict {
        conclusion: Conclusion::CandidateAutomatic { d: q, certified: true },
        certified: true,
        evidence: st.evidence,
        remarks: st.remarks,
        diagnostics: st.diagnostics,
    };
    debug_assert!(verdict_invariants_hold(&verdict));
    let _ = alphabet_size;
    Ok(Analysis {
        verdict,
        payloads: st.payloads,
    })
}

// ---------------------------------------------------------------------------
// Sequence analysis (no morphism structure).
// ---------------------------------------------------------------------------

/// Prefix-only pipeline: runs the base sweep and the base-independent
/// criteria.  Never emits a certified negative — prefix evidence is
/// inherently advisory.
pub fn analyze_sequence(
    view: &mut PrefixView,
    generator: Option<&GeneratorSpec>,
    config: &Config,
) -> Result<Analysis> {
    let available = view.ensure_up_to(config.prefix_len)?;
    if available < 1 << 14 {
        return Err(Error::PrefixTooShort {
            needed: 1 << 14,
            got: available,
        });
    }
    let mut st = State::default();
    let alphabet_size = view.alphabet().len();

    if let Some(p) = detect_eventual_period(
        view,
        config.period_max,
        config.preperiod_max,
        available.min(1 << 16),
    )? {
        return Ok(finish_periodic(st, p));
    }

    if let Some(GeneratorSpec::PolyChar { coeffs }) = generator {
        let degree = coeffs.len().saturating_sub(1);
        if degree >= 2 {
            st.push(
                EvidenceItem::new(
                    "polynomial-degree",
                    TheoremTag::PolynomialGap,
                    Grade::Advisory,
                )
                .with("degree", degree)
                .with(
                    "statement",
                    "characteristic sequences of polynomials of degree >= 2 are not \
                     automatic in any base",
                ),
            );
            st.advisory_all_q = true;
        }
    }

    let bases: Vec<u64> = config.bases.iter().copied().filter(|q| *q >= 2).collect();
    let input = BatteryInput {
        bases: &bases,
        morphism: None,
        reduction_base: None,
        primitive: false,
    };
    run_battery(&mut st, view, &input, config);
    let mut analysis = finish(st, alphabet_size, None);
    // Prefix-only analysis cannot certify a negative.
    if matches!(
        analysis.verdict.conclusion,
        Conclusion::NotAutomaticAny | Conclusion::NotQAutomatic(_)
    ) {
        analysis.verdict.certified = false;
    }
    Ok(analysis)
}

/// Generates a built-in sequence and analyzes its prefix.
pub fn analyze_generator(spec: &GeneratorSpec, config: &Config) -> Result<Analysis> {
    let mut view = generate(spec, config.prefix_len)?;
    analyze_sequence(&mut view, Some(spec), config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalogue;
    use crate::words::Alphabet;

    fn quick_config() -> Config {
        Config {
            prefix_len: 1 << 18,
            bases: vec![2, 3],
            complexity_horizon: 1 << 16,
            gaps_horizon: 1 << 18,
            runs_horizon: 1 << 18,
            ..Config::default()
        }
    }

    fn tags(a: &Analysis) -> Vec<TheoremTag> {
        a.verdict.evidence.iter().map(|e| e.tag).collect()
    }

    #[test]
    fn fibonacci_is_certified_not_automatic() {
        let a = analyze(&catalogue::fibonacci_word(), &quick_config());
        assert_eq!(a.verdict.conclusion, Conclusion::NotAutomaticAny);
        assert!(a.verdict.certified);
        let ts = tags(&a);
        assert!(ts.contains(&TheoremTag::Irrational2));
        assert!(ts.contains(&TheoremTag::Dekking), "det -1 corroboration");
        let obstruction = a.payloads.obstruction.expect("obstruction payload");
        assert!(obstruction.extends_to_all_q);
        assert!(verdict_invariants_hold(&a.verdict));
    }

    #[test]
    fn thue_morse_is_candidate_automatic_2() {
        let a = analyze(&catalogue::thue_morse(), &quick_config());
        assert_eq!(
            a.verdict.conclusion,
            Conclusion::CandidateAutomatic { d: 2, certified: true }
        );
        assert!(a.verdict.certified);
        assert_eq!(a.payloads.dfao_states, Some(2));
        assert!(a
            .verdict
            .evidence
            .iter()
            .any(|e| e.tag == TheoremTag::Automaticity && e.grade == Grade::Certified));
        // Kernel size 2 is attached as advisory data.
        assert!(a
            .verdict
            .evidence
            .iter()
            .any(|e| e.criterion == "kernel-size"
                && e.details.get("distinct_classes") == Some(&"2".to_string())));
    }

    #[test]
    fn aab_yields_an_advisory_stack_on_base_2() {
        let a = analyze(&catalogue::aab(), &quick_config());
        assert_eq!(a.verdict.conclusion, Conclusion::NotAutomaticAny);
        assert!(!a.verdict.certified, "all evidence here is prefix-based");
        let ts = tags(&a);
        assert!(ts.contains(&TheoremTag::Durand), "reduction to base 2");
        assert!(ts.contains(&TheoremTag::Kernel), "kernel family fired");
        assert!(ts.contains(&TheoremTag::Complexity));
        assert!(ts.contains(&TheoremTag::Synch1), "superlinear run growth");
        assert!(a
            .verdict
            .evidence
            .iter()
            .any(|e| e.criterion == "kernel-family"
                && e.details.get("family") == Some(&"q^k-k".to_string())
                && e.details.get("distinct_classes") == Some(&"8".to_string())));
        assert!(a.verdict.remarks.iter().any(|r| r.contains("advisory")));
        assert!(verdict_invariants_hold(&a.verdict));
    }

    #[test]
    fn m_2_211_is_certified_by_the_obstruction() {
        let a = analyze(&catalogue::m_2_211(), &quick_config());
        assert_eq!(a.verdict.conclusion, Conclusion::NotAutomaticAny);
        assert!(a.verdict.certified);
        assert!(a
            .verdict
            .evidence
            .iter()
            .any(|e| e.tag == TheoremTag::Dekking && e.grade == Grade::Certified));
        // The Host profile corroborates: 2-divisibility never climbs.
        assert!(a
            .verdict
            .evidence
            .iter()
            .any(|e| e.tag == TheoremTag::Host && e.criterion == "host-divisibility"));
        match &a.payloads.frequencies.as_ref().expect("frequencies").exact {
            crate::stats::ExactFrequencies::Rational { letters, .. } => {
                for (_, f) in letters {
                    assert_eq!(*f, Rat::new(BigInt::from(1), BigInt::from(2)));
                }
            }
            other => panic!("expected exact rational frequencies, got {other:?}"),
        }
    }

    #[test]
    fn aaab_fixed_point_is_detected_periodic() {
        // phi(a) = aaab, phi(b) = phi(a)^2, so the fixed point is (aaab)^inf.
        let a = analyze(&catalogue::m_aaab_aaabaaab(), &quick_config());
        match a.verdict.conclusion {
            Conclusion::UltimatelyPeriodic { preperiod, period } => {
                assert_eq!(preperiod, 0);
                assert_eq!(period, 4);
            }
            other => panic!("expected a periodic verdict, got {other:?}"),
        }
    }

    #[test]
    fn squares_sequence_fails_the_gap_dichotomy() {
        let spec = GeneratorSpec::parse("poly:1,0,0").expect("squares generator");
        let mut config = quick_config();
        config.prefix_len = 1 << 20;
        config.gaps_horizon = 1 << 20;
        let a = analyze_generator(&spec, &config).expect("analysis");
        assert_eq!(a.verdict.conclusion, Conclusion::NotAutomaticAny);
        assert!(!a.verdict.certified, "prefix-only analysis stays advisory");
        let ts = tags(&a);
        assert!(ts.contains(&TheoremTag::Gaps));
        assert!(ts.contains(&TheoremTag::PolynomialGap));
        assert!(ts.contains(&TheoremTag::MinskyPapert));
    }

    #[test]
    fn eventually_periodic_input_is_reported_as_such() {
        let alphabet = Alphabet::new(&["0", "1"]).expect("alphabet");
        let mut syms = vec![0, 0, 0, 1];
        for _ in 0..(1 << 13) {
            syms.push(1);
            syms.push(0);
        }
        let mut view = PrefixView::fixed(alphabet, syms);
        let a = analyze_sequence(&mut view, None, &quick_config()).expect("analysis");
        match a.verdict.conclusion {
            Conclusion::UltimatelyPeriodic { preperiod, period } => {
                assert_eq!(period, 2);
                assert_eq!(preperiod, 4);
            }
            other => panic!("expected a periodic verdict, got {other:?}"),
        }
    }

    #[test]
    fn short_prefixes_are_rejected() {
        let alphabet = Alphabet::new(&["0", "1"]).expect("alphabet");
        let mut view = PrefixView::fixed(alphabet, vec![0, 1, 0, 1]);
        assert!(matches!(
            analyze_sequence(&mut view, None, &quick_config()),
            Err(Error::PrefixTooShort { .. })
        ));
    }

    #[test]
    fn liouville_shows_kernel_growth_and_stays_advisory() {
        let spec = GeneratorSpec::parse("liouville").expect("liouville");
        let a = analyze_generator(&spec, &quick_config()).expect("analysis");
        assert!(!a.verdict.certified);
        assert!(matches!(
            a.verdict.conclusion,
            Conclusion::NotAutomaticAny | Conclusion::NotQAutomatic(_)
        ));
        let growth: Vec<&EvidenceItem> = a
            .verdict
            .evidence
            .iter()
            .filter(|e| e.criterion == "kernel-growth")
            .collect();
        assert!(
            growth
                .iter()
                .any(|e| e.details.get("base") == Some(&"2".to_string())),
            "base-2 kernel keeps growing"
        );
        assert!(
            growth
                .iter()
                .any(|e| e.details.get("base") == Some(&"3".to_string())),
            "base-3 kernel keeps growing"
        );
        // Alphabet {-1, 1} has prime-power size 2.
        assert!(a.verdict.remarks.iter().any(|r| r.contains("Christol")));
    }

    #[test]
    fn soundness_regression_on_uniform_builtins() {
        for m in catalogue::uniform_aperiodic() {
            let q = m.image(0).len() as u64;
            let a = analyze(&m, &quick_config());
            assert_eq!(
                a.verdict.conclusion,
                Conclusion::CandidateAutomatic { d: q, certified: true },
                "uniform built-in must be recognized as automatic"
            );
            for e in &a.verdict.evidence {
                if e.grade == Grade::Certified {
                    assert_eq!(
                        e.tag,
                        TheoremTag::Automaticity,
                        "no certified negative may fire on an automatic input"
                    );
                }
            }
        }
    }

    #[test]
    fn analysis_is_deterministic() {
        let config = quick_config();
        let a = analyze(&catalogue::aab(), &config);
        let b = analyze(&catalogue::aab(), &config);
        assert_eq!(format!("{:?}", a.verdict), format!("{:?}", b.verdict));
        assert_eq!(format!("{:?}", a.payloads), format!("{:?}", b.payloads));
    }

    #[test]
    fn theorem_tags_round_trip_and_fail_closed() {
        for tag in TheoremTag::ALL {
            assert_eq!(TheoremTag::parse(tag.as_str()), Some(tag));
        }
        assert_eq!(TheoremTag::parse("made-up-theorem"), None);
    }
}
