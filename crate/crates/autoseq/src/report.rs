//! The JSON report format: schema-versioned serializable mirrors of the
//! analysis results, a validator against the shipped schema, and a plain
//! text renderer.
//!
//! Design rules for the wire format:
//!
//! * every big integer and every exact rational is a **string** (JSON
//!   numbers are lossy beyond 2^53);
//! * maps are `BTreeMap`s and every collection is emitted in a fixed
//!   order, so the same analysis serializes to the same bytes;
//! * the only volatile section is `timings`; [`strip_volatile`] zeroes it
//!   for byte-comparison purposes;
//! * validation fails closed: a report citing a theorem tag outside the
//!   shipped closed list is rejected.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::{AlgebraicNumber, NumberClass};
use crate::dynamical::{HostProfile, ObstructionReason, ObstructionReport, QObstruction};
use crate::gaps_runs::{
    GapBranch, GapVerdict, OccurrenceProfile, RatioVerdict, RunProfile,
};
use crate::kernel::{KernelEstimate, KernelRep};
use crate::stats::{
    ComplexityProfile, EmpiricalFrequencies, ExactFrequencies, FrequencyReport, GrowthClass,
};
use crate::strategy::{
    Analysis, Conclusion, Config, EvidenceItem, ModulePayloads, OccurrenceSummary, TheoremTag,
    Verdict,
};

/// Name stamped into every report and checked by the validator.
pub const SCHEMA_NAME: &str = "autoseq-report-v1";

/// The schema document shipped with the crate.
pub const SCHEMA_TEXT: &str = include_str!("../schema/report-v1.json");

/// How many occurrence positions are echoed verbatim from each end before
/// the list is truncated.
const POSITIONS_ECHO: usize = 64;

// ---------------------------------------------------------------------------
// Wire types.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl Default for ToolInfo {
    fn default() -> ToolInfo {
        ToolInfo {
            name: "autoseq".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// Echo of what was analyzed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputEcho {
    /// "morphism", "generator", or "prefix".
    pub kind: String,
    /// File path, generator spec, or builtin name.
    pub source: String,
    pub alphabet: Vec<String>,
    /// Symbols actually materialized.
    pub prefix_analyzed: u64,
}

/// Flat echo of [`Config`], making every report self-describing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub bases: Vec<u64>,
    pub prefix_len: u64,
    pub kernel_k_max: u32,
    pub kernel_horizon: u64,
    pub kernel_rep_cap: u64,
    pub kernel_r_cap: u64,
    pub kernel_min_points: u64,
    pub kernel_max_points: u64,
    pub threads: Option<u64>,
    pub complexity_nmax: u64,
    pub complexity_horizon: u64,
    pub min_occurrences: u64,
    pub count_ratio_threshold: f64,
    pub gap_recur_threshold: u64,
    pub ratio_epsilon: f64,
    pub freq_threshold: f64,
    pub freq_decay_ratio: f64,
    pub gaps_horizon: u64,
    pub runs_horizon: u64,
    pub runs_nmax: u64,
    pub run_linearity_threshold: f64,
    pub obstruction_q_max: u64,
    pub obstruction_j_max: u32,
    pub obstruction_step_cap: u64,
    pub obstruction_return_horizon: u64,
    pub host_depth: u64,
    pub mult_k_bound: u32,
    pub period_max: u64,
    pub preperiod_max: u64,
}

impl From<&Config> for ConfigEcho {
    fn from(c: &Config) -> ConfigEcho {
        ConfigEcho {
            bases: c.bases.clone(),
            prefix_len: c.prefix_len,
            kernel_k_max: c.kernel.k_max,
            kernel_horizon: c.kernel.horizon,
            kernel_rep_cap: c.kernel.rep_cap as u64,
            kernel_r_cap: c.kernel.r_cap,
            kernel_min_points: c.kernel.min_points,
            kernel_max_points: c.kernel.max_points,
            threads: c.kernel.threads.map(|t| t as u64),
            complexity_nmax: c.complexity_nmax as u64,
            complexity_horizon: c.complexity_horizon,
            min_occurrences: c.occurrence.min_occurrences,
            count_ratio_threshold: c.occurrence.count_ratio_threshold,
            gap_recur_threshold: c.occurrence.gap_recur_threshold,
            ratio_epsilon: c.occurrence.ratio_epsilon,
            freq_threshold: c.occurrence.freq_threshold,
            freq_decay_ratio: c.occurrence.freq_decay_ratio,
            gaps_horizon: c.gaps_horizon,
            runs_horizon: c.runs_horizon,
            runs_nmax: c.runs_nmax as u64,
            run_linearity_threshold: c.run_linearity_threshold,
            obstruction_q_max: c.obstruction.q_max,
            obstruction_j_max: c.obstruction.j_max,
            obstruction_step_cap: c.obstruction.step_cap as u64,
            obstruction_return_horizon: c.obstruction.return_horizon,
            host_depth: c.host_depth as u64,
            mult_k_bound: c.mult_k_bound,
            period_max: c.period_max,
            preperiod_max: c.preperiod_max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConclusionDto {
    pub kind: String,
    /// Bases ruled out (non-empty only for "not-q-automatic").
    pub bases: Vec<u64>,
    /// Candidate base (only for "candidate-automatic").
    pub base: Option<u64>,
    /// Whether the candidate is certified by construction.
    pub construction_certified: Option<bool>,
    pub preperiod: Option<u64>,
    pub period: Option<u64>,
}

impl From<&Conclusion> for ConclusionDto {
    fn from(c: &Conclusion) -> ConclusionDto {
        let mut dto = ConclusionDto {
            kind: String::new(),
            bases: Vec::new(),
            base: None,
            construction_certified: None,
            preperiod: None,
            period: None,
        };
        match c {
            Conclusion::NotAutomaticAny => dto.kind = "not-automatic-any".into(),
            Conclusion::NotQAutomatic(bases) => {
                dto.kind = "not-q-automatic".into();
                dto.bases = bases.clone();
            }
            Conclusion::CandidateAutomatic { d, certified } => {
                dto.kind = "candidate-automatic".into();
                dto.base = Some(*d);
                dto.construction_certified = Some(*certified);
            }
            Conclusion::UltimatelyPeriodic { preperiod, period } => {
                dto.kind = "ultimately-periodic".into();
                dto.preperiod = Some(*preperiod);
                dto.period = Some(*period);
            }
            Conclusion::Inconclusive => dto.kind = "inconclusive".into(),
        }
        dto
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceDto {
    pub criterion: String,
    pub tag: String,
    pub grade: String,
    pub details: BTreeMap<String, String>,
}

impl From<&EvidenceItem> for EvidenceDto {
    fn from(e: &EvidenceItem) -> EvidenceDto {
        EvidenceDto {
            criterion: e.criterion.clone(),
            tag: e.tag.as_str().to_string(),
            grade: e.grade.as_str().to_string(),
            details: e.details.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictDto {
    pub conclusion: ConclusionDto,
    pub certified: bool,
    pub evidence: Vec<EvidenceDto>,
    pub remarks: Vec<String>,
    pub diagnostics: Vec<String>,
}

impl From<&Verdict> for VerdictDto {
    fn from(v: &Verdict) -> VerdictDto {
        VerdictDto {
            conclusion: (&v.conclusion).into(),
            certified: v.certified,
            evidence: v.evidence.iter().map(EvidenceDto::from).collect(),
            remarks: v.remarks.clone(),
            diagnostics: v.diagnostics.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueDto {
    pub min_poly: String,
    pub degree: u32,
    /// "integer" | "rational" | "irrational".
    pub class: String,
    /// Exact value for the first two classes, as a string.
    pub value: Option<String>,
    pub approx: f64,
}

pub fn eigenvalue_dto(rho: &AlgebraicNumber) -> EigenvalueDto {
    let (class, value) = match rho.class() {
        NumberClass::Integer(n) => ("integer", Some(n.to_string())),
        NumberClass::NonIntegerRational(r) => ("rational", Some(r.to_string())),
        NumberClass::Irrational => ("irrational", None),
    };
    EigenvalueDto {
        min_poly: rho.min_poly().to_string(),
        degree: rho.degree() as u32,
        class: class.to_string(),
        value,
        approx: finite(rho.approx_f64()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicityDto {
    pub preperiod: u64,
    pub period: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelRepDto {
    pub k: u32,
    pub r: u64,
}

impl From<&KernelRep> for KernelRepDto {
    fn from(rep: &KernelRep) -> KernelRepDto {
        KernelRepDto { k: rep.k, r: rep.r }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessDto {
    pub left: KernelRepDto,
    pub right: KernelRepDto,
    pub at: u64,
    pub left_value: u64,
    pub right_value: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelDto {
    pub q: u64,
    pub distinct_classes: u64,
    pub representatives: Vec<KernelRepDto>,
    pub witnesses: Vec<WitnessDto>,
    pub insufficient_pairs: u64,
    pub ambiguous_candidates: u64,
    pub candidates_examined: u64,
    pub k_max_used: u32,
    pub capped: bool,
    pub horizon: u64,
    pub diagonal: Vec<u64>,
}

pub fn kernel_dto(est: &KernelEstimate) -> KernelDto {
    KernelDto {
        q: est.q,
        distinct_classes: est.distinct_classes as u64,
        representatives: est.representatives.iter().map(KernelRepDto::from).collect(),
        witnesses: est
            .witnesses
            .iter()
            .map(|w| WitnessDto {
                left: (&w.left).into(),
                right: (&w.right).into(),
                at: w.at,
                left_value: w.left_value as u64,
                right_value: w.right_value as u64,
            })
            .collect(),
        insufficient_pairs: est.insufficient_pairs as u64,
        ambiguous_candidates: est.ambiguous_candidates as u64,
        candidates_examined: est.candidates_examined as u64,
        k_max_used: est.k_max_used,
        capped: est.capped,
        horizon: est.horizon,
        diagonal: est.diagonal.iter().map(|&v| v as u64).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelFamilyDto {
    pub family: String,
    pub estimate: KernelDto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityDto {
    pub n_max: u64,
    pub horizon: u64,
    pub p: Vec<u64>,
    pub appearance: Vec<u64>,
    pub lower_bound_ok: Vec<bool>,
    pub growth: String,
    pub stable_n_max: u64,
    pub fit_lo: u64,
    pub fit_hi: u64,
    pub loglog_slope: f64,
    pub gray_zone: bool,
}

fn growth_str(g: GrowthClass) -> &'static str {
    match g {
        GrowthClass::Bounded => "bounded",
        GrowthClass::ExponentialSuspected => "exponential-suspected",
        GrowthClass::Linear => "linear",
        GrowthClass::QuadraticOrMore => "quadratic-or-more",
    }
}

pub fn complexity_dto(c: &ComplexityProfile) -> ComplexityDto {
    ComplexityDto {
        n_max: c.n_max as u64,
        horizon: c.horizon,
        p: c.p.clone(),
        appearance: c.appearance.clone(),
        lower_bound_ok: c.lower_bound_ok.clone(),
        growth: growth_str(c.growth).to_string(),
        stable_n_max: c.stable_n_max as u64,
        fit_lo: c.fit_range.0 as u64,
        fit_hi: c.fit_range.1 as u64,
        loglog_slope: finite(c.loglog_slope),
        gray_zone: c.gray_zone,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDto {
    pub horizon: u64,
    pub counts: Vec<(String, u64)>,
    pub overall: Vec<(String, f64)>,
    pub window_low: Vec<(String, f64)>,
    pub window_high: Vec<(String, f64)>,
}

pub fn empirical_dto(e: &EmpiricalFrequencies) -> EmpiricalDto {
    let f = |v: &[(String, f64)]| {
        v.iter()
            .map(|(s, x)| (s.clone(), finite(*x)))
            .collect::<Vec<_>>()
    };
    EmpiricalDto {
        horizon: e.horizon,
        counts: e.counts.clone(),
        overall: f(&e.overall),
        window_low: f(&e.window_low),
        window_high: f(&e.window_high),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactDto {
    /// "rational" | "irrational-eigenvalue" | "not-available".
    pub kind: String,
    pub eigenvalue: Option<String>,
    /// Exact rationals as strings ("1/2").
    pub letters: Vec<(String, String)>,
    pub outputs: Vec<(String, String)>,
    pub min_poly: Option<String>,
    pub approx: Option<f64>,
    /// Certificate or unavailability reason.
    pub note: Option<String>,
}

pub fn exact_dto(e: &ExactFrequencies) -> ExactDto {
    match e {
        ExactFrequencies::Rational {
            eigenvalue,
            letters,
            outputs,
        } => ExactDto {
            kind: "rational".into(),
            eigenvalue: Some(eigenvalue.to_string()),
            letters: letters
                .iter()
                .map(|(s, r)| (s.clone(), r.to_string()))
                .collect(),
            outputs: outputs
                .iter()
                .map(|(s, r)| (s.clone(), r.to_string()))
                .collect(),
            min_poly: None,
            approx: None,
            note: None,
        },
        ExactFrequencies::IrrationalEigenvalue {
            min_poly,
            approx,
            certificate,
        } => ExactDto {
            kind: "irrational-eigenvalue".into(),
            eigenvalue: None,
            letters: Vec::new(),
            outputs: Vec::new(),
            min_poly: Some(min_poly.clone()),
            approx: Some(finite(*approx)),
            note: Some(certificate.clone()),
        },
        ExactFrequencies::NotAvailable { reason } => ExactDto {
            kind: "not-available".into(),
            eigenvalue: None,
            letters: Vec::new(),
            outputs: Vec::new(),
            min_poly: None,
            approx: None,
            note: Some(reason.clone()),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyDto {
    pub empirical: EmpiricalDto,
    pub exact: ExactDto,
}

pub fn frequency_dto(f: &FrequencyReport) -> FrequencyDto {
    FrequencyDto {
        empirical: empirical_dto(&f.empirical),
        exact: exact_dto(&f.exact),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccurrenceDto {
    pub symbol: String,
    pub count: u64,
    pub horizon: u64,
    pub counting_samples: Vec<(u64, u64)>,
    pub min_tail_gap: Option<u64>,
    pub max_tail_ratio: Option<f64>,
    /// First and last positions; the middle is elided when truncated.
    pub positions_head: Vec<u64>,
    pub positions_tail: Vec<u64>,
    pub positions_truncated: bool,
}

/// Full-profile conversion (single-module commands): echoes up to
/// 2 × [`POSITIONS_ECHO`] positions verbatim.
pub fn occurrence_dto(p: &OccurrenceProfile) -> OccurrenceDto {
    let n = p.positions.len();
    let (head, tail, truncated) = if n <= 2 * POSITIONS_ECHO {
        (p.positions.clone(), Vec::new(), false)
    } else {
        (
            p.positions[..POSITIONS_ECHO].to_vec(),
            p.positions[n - POSITIONS_ECHO..].to_vec(),
            true,
        )
    };
    OccurrenceDto {
        symbol: p.symbol.clone(),
        count: p.count(),
        horizon: p.horizon,
        counting_samples: p.counting_samples.clone(),
        min_tail_gap: p.min_tail_gap,
        max_tail_ratio: p.max_tail_ratio.map(finite),
        positions_head: head,
        positions_tail: tail,
        positions_truncated: truncated,
    }
}

fn occurrence_dto_from_summary(s: &OccurrenceSummary) -> OccurrenceDto {
    OccurrenceDto {
        symbol: s.symbol.clone(),
        count: s.count,
        horizon: s.horizon,
        counting_samples: s.counting_samples.clone(),
        min_tail_gap: s.min_tail_gap,
        max_tail_ratio: s.max_tail_ratio.map(finite),
        positions_head: Vec::new(),
        positions_tail: Vec::new(),
        positions_truncated: s.count > 0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapDto {
    pub symbol: String,
    /// "fails-both" | "count-only" | "gap-only" | "count-and-gap".
    pub outcome: String,
    pub count: u64,
    pub count_log_ratio: f64,
    pub count_threshold: f64,
    pub min_tail_gap: Option<u64>,
    pub gap_threshold: u64,
    pub horizon: u64,
}

pub fn gap_dto(v: &GapVerdict) -> GapDto {
    let (outcome, ev) = match v {
        GapVerdict::FailsBoth(ev) => ("fails-both", ev),
        GapVerdict::SatisfiesOne(GapBranch::Count, ev) => ("count-only", ev),
        GapVerdict::SatisfiesOne(GapBranch::Gap, ev) => ("gap-only", ev),
        GapVerdict::SatisfiesBoth(ev) => ("count-and-gap", ev),
    };
    GapDto {
        symbol: ev.symbol.clone(),
        outcome: outcome.to_string(),
        count: ev.count,
        count_log_ratio: finite(ev.count_log_ratio),
        count_threshold: finite(ev.count_threshold),
        min_tail_gap: ev.min_tail_gap,
        gap_threshold: ev.gap_threshold,
        horizon: ev.horizon,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioDto {
    pub symbol: String,
    /// "tends-to-one" | "bounded-away".
    pub outcome: String,
    /// Max tail ratio (or limsup estimate for the bounded-away branch).
    pub value: f64,
    pub epsilon: f64,
}

pub fn ratio_dto(symbol: &str, v: &RatioVerdict) -> RatioDto {
    match v {
        RatioVerdict::RatioTendsToOne {
            max_tail_ratio,
            epsilon,
        } => RatioDto {
            symbol: symbol.to_string(),
            outcome: "tends-to-one".into(),
            value: finite(*max_tail_ratio),
            epsilon: *epsilon,
        },
        RatioVerdict::RatioBoundedAway {
            limsup_estimate,
            epsilon,
        } => RatioDto {
            symbol: symbol.to_string(),
            outcome: "bounded-away".into(),
            value: finite(*limsup_estimate),
            epsilon: *epsilon,
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunsDto {
    pub n_max: u64,
    pub horizon: u64,
    pub overall: Vec<Option<u64>>,
    pub per_symbol: Vec<(String, Vec<Option<u64>>)>,
    pub max_f_over_n: f64,
}

pub fn runs_dto(r: &RunProfile) -> RunsDto {
    RunsDto {
        n_max: r.n_max as u64,
        horizon: r.horizon,
        overall: r.overall.clone(),
        per_symbol: r.per_symbol.clone(),
        max_f_over_n: finite(r.max_f_over_n),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QDivisibilityDto {
    pub q: u64,
    pub word_valuations: Vec<Vec<u32>>,
    pub min_valuations: Vec<u32>,
    pub grows: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HostDto {
    pub depth: u64,
    /// `letter_lengths[l][a]` = |phi^l(a)| as a decimal string.
    pub letter_lengths: Vec<Vec<String>>,
    pub return_words: Vec<String>,
    pub return_lengths: Vec<Vec<String>>,
    pub divisibility: Vec<QDivisibilityDto>,
}

pub fn host_dto(h: &HostProfile) -> HostDto {
    let big = |vv: &Vec<Vec<num_bigint::BigInt>>| {
        vv.iter()
            .map(|row| row.iter().map(|x| x.to_string()).collect())
            .collect()
    };
    HostDto {
        depth: h.depth as u64,
        letter_lengths: big(&h.letter_lengths),
        return_words: h.return_words.clone(),
        return_lengths: big(&h.return_lengths),
        divisibility: h
            .divisibility
            .iter()
            .map(|d| QDivisibilityDto {
                q: d.q,
                word_valuations: d.word_valuations.clone(),
                min_valuations: d.min_valuations.clone(),
                grows: d.grows,
            })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvectorDto {
    pub eigenvalue: String,
    /// Basis vectors of the rational eigenspace, entries as strings.
    pub basis: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerQDto {
    pub q: u64,
    pub obstructed: bool,
    /// "prime-not-in-determinant" | "residue-stall" when obstructed.
    pub reason: Option<String>,
    pub prime: Option<u64>,
    pub j: Option<u32>,
    pub witness: Option<String>,
    pub cycle_len: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstructionDto {
    pub det: String,
    pub invertible: bool,
    pub allowed_primes: Vec<u64>,
    pub height: Option<u64>,
    pub primitive: bool,
    pub integer_eigenvalues: Vec<String>,
    pub eigenvectors: Vec<EigenvectorDto>,
    pub q_max: u64,
    pub j_max: u32,
    pub return_words: Vec<String>,
    pub per_q: Vec<PerQDto>,
    pub all_q_obstructed: bool,
    pub extends_to_all_q: bool,
}

pub fn obstruction_dto(r: &ObstructionReport) -> ObstructionDto {
    ObstructionDto {
        det: r.constraint.det.to_string(),
        invertible: r.constraint.invertible,
        allowed_primes: r.constraint.allowed_primes.clone(),
        height: r.constraint.height,
        primitive: r.constraint.primitive,
        integer_eigenvalues: r
            .constraint
            .integer_eigenvalues
            .iter()
            .map(|x| x.to_string())
            .collect(),
        eigenvectors: r
            .constraint
            .eigenvectors
            .iter()
            .map(|(lambda, basis)| EigenvectorDto {
                eigenvalue: lambda.to_string(),
                basis: basis
                    .iter()
                    .map(|v| v.iter().map(|x| x.to_string()).collect())
                    .collect(),
            })
            .collect(),
        q_max: r.q_max,
        j_max: r.j_max,
        return_words: r.return_words.clone(),
        per_q: r
            .per_q
            .iter()
            .map(|(q, outcome)| match outcome {
                QObstruction::NotObstructed => PerQDto {
                    q: *q,
                    obstructed: false,
                    reason: None,
                    prime: None,
                    j: None,
                    witness: None,
                    cycle_len: None,
                },
                QObstruction::Obstructed(ObstructionReason::PrimeNotInDeterminant { p }) => {
                    PerQDto {
                        q: *q,
                        obstructed: true,
                        reason: Some("prime-not-in-determinant".into()),
                        prime: Some(*p),
                        j: None,
                        witness: None,
                        cycle_len: None,
                    }
                }
                QObstruction::Obstructed(ObstructionReason::ResidueStall {
                    p,
                    j,
                    witness,
                    cycle_len,
                }) => PerQDto {
                    q: *q,
                    obstructed: true,
                    reason: Some("residue-stall".into()),
                    prime: Some(*p),
                    j: Some(*j),
                    witness: Some(witness.clone()),
                    cycle_len: Some(*cycle_len as u64),
                },
            })
            .collect(),
        all_q_obstructed: r.all_q_obstructed,
        extends_to_all_q: r.extends_to_all_q,
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PayloadsDto {
    pub eigenvalue: Option<EigenvalueDto>,
    pub periodicity: Option<PeriodicityDto>,
    pub dfao_states: Option<u64>,
    pub kernel: Vec<KernelDto>,
    pub kernel_families: Vec<KernelFamilyDto>,
    pub complexity: Option<ComplexityDto>,
    pub frequencies: Option<FrequencyDto>,
    pub empirical: Option<EmpiricalDto>,
    pub occurrences: Vec<OccurrenceDto>,
    pub gap_verdicts: Vec<GapDto>,
    pub ratio_verdicts: Vec<RatioDto>,
    pub runs: Option<RunsDto>,
    pub host: Option<HostDto>,
    pub obstruction: Option<ObstructionDto>,
}

pub fn payloads_dto(p: &ModulePayloads) -> PayloadsDto {
    PayloadsDto {
        eigenvalue: p.eigenvalue.as_ref().map(eigenvalue_dto),
        periodicity: p.periodicity.as_ref().map(|s| PeriodicityDto {
            preperiod: s.preperiod,
            period: s.period,
        }),
        dfao_states: p.dfao_states.map(|n| n as u64),
        kernel: p.kernel.iter().map(kernel_dto).collect(),
        kernel_families: p
            .kernel_families
            .iter()
            .map(|(family, est)| KernelFamilyDto {
                family: family.clone(),
                estimate: kernel_dto(est),
            })
            .collect(),
        complexity: p.complexity.as_ref().map(complexity_dto),
        frequencies: p.frequencies.as_ref().map(frequency_dto),
        empirical: p.empirical.as_ref().map(empirical_dto),
        occurrences: p
            .occurrences
            .iter()
            .map(occurrence_dto_from_summary)
            .collect(),
        gap_verdicts: p.gap_verdicts.iter().map(|(_, v)| gap_dto(v)).collect(),
        ratio_verdicts: p
            .ratio_verdicts
            .iter()
            .map(|(s, v)| ratio_dto(s, v))
            .collect(),
        runs: p.runs.as_ref().map(runs_dto),
        host: p.host.as_ref().map(host_dto),
        obstruction: p.obstruction.as_ref().map(obstruction_dto),
    }
}

/// The complete schema-versioned report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub tool: ToolInfo,
    pub input: InputEcho,
    pub config: ConfigEcho,
    /// Absent for single-module fragment reports.
    pub verdict: Option<VerdictDto>,
    pub payloads: PayloadsDto,
    /// Stage name → wall-clock milliseconds.  The only volatile section.
    pub timings: BTreeMap<String, f64>,
}

/// Assembles a full analysis report.
pub fn build_report(
    input: InputEcho,
    config: &Config,
    analysis: &Analysis,
    timings: BTreeMap<String, f64>,
) -> Report {
    Report {
        schema: SCHEMA_NAME.to_string(),
        tool: ToolInfo::default(),
        input,
        config: config.into(),
        verdict: Some((&analysis.verdict).into()),
        payloads: payloads_dto(&analysis.payloads),
        timings,
    }
}

/// A fragment shell for single-module commands: no verdict, empty
/// payloads to be filled by the caller.
pub fn fragment_report(input: InputEcho, config: &Config) -> Report {
    Report {
        schema: SCHEMA_NAME.to_string(),
        tool: ToolInfo::default(),
        input,
        config: config.into(),
        verdict: None,
        payloads: PayloadsDto::default(),
        timings: BTreeMap::new(),
    }
}

/// Zeroes the wall-clock fields so two reports of the same analysis can be
/// compared byte for byte.
pub fn strip_volatile(report: &mut Report) {
    for v in report.timings.values_mut() {
        *v = 0.0;
    }
}

/// Canonical serialization: pretty JSON with a trailing newline.
pub fn to_json_string(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn from_json_str(s: &str) -> std::result::Result<Report, String> {
    serde_json::from_str(s).map_err(|e| e.to_string())
}

/// JSON cannot carry NaN or infinities; collapse them deterministically.
fn finite(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else if x.is_nan() {
        0.0
    } else if x > 0.0 {
        f64::MAX
    } else {
        f64::MIN
    }
}

// ---------------------------------------------------------------------------
// Validation against the shipped schema.
// ---------------------------------------------------------------------------

/// Validates a JSON value against the shipped schema document.  Returns
/// every violation found (empty = valid).
pub fn validate_json(root: &Value) -> Vec<String> {
    let schema: Value = serde_json::from_str(SCHEMA_TEXT).expect("shipped schema parses");
    let mut errors = Vec::new();

    let expected_name = schema["name"].as_str().unwrap_or_default();
    if root.get("schema").and_then(Value::as_str) != Some(expected_name) {
        errors.push(format!(
            "schema field must be \"{expected_name}\", got {:?}",
            root.get("schema")
        ));
    }

    if let Some(required) = schema["required"].as_object() {
        for (path, ty) in required {
            let ty = ty.as_str().unwrap_or("object");
            let segments: Vec<&str> = path.split('.').collect();
            walk(root, &segments, path, &mut |v, at| {
                if !type_matches(v, ty) {
                    errors.push(format!("{at}: expected {ty}, got {}", type_name(v)));
                }
            });
        }
    }

    if let Some(enums) = schema["enums"].as_object() {
        for (path, allowed) in enums {
            let allowed: Vec<&str> = allowed
                .as_array()
                .map(|a| a.iter().filter_map(Value::as_str).collect())
                .unwrap_or_default();
            let segments: Vec<&str> = path.split('.').collect();
            walk(root, &segments, path, &mut |v, at| {
                if let Some(s) = v.as_str() {
                    if !allowed.contains(&s) {
                        errors.push(format!("{at}: value \"{s}\" is not in the closed list"));
                    }
                }
            });
        }
    }

    errors
}

/// Visits every value reached by `segments` from `value`.  A `null`
/// encountered mid-path is vacuous (nullability is checked by the entry
/// for the null node itself); a missing field is an error the visitor
/// reports via a synthetic `Null`… no: missing fields are reported here.
fn walk(value: &Value, segments: &[&str], full_path: &str, visit: &mut dyn FnMut(&Value, &str)) {
    let Some(seg) = segments.first() else {
        visit(value, full_path);
        return;
    };
    if value.is_null() {
        // Nullable ancestor: nothing below it to check.
        return;
    }
    if *seg == "*" {
        if let Some(map) = value.as_object() {
            for v in map.values() {
                walk(v, &segments[1..], full_path, visit);
            }
        } else {
            visit(value, full_path);
        }
        return;
    }
    if let Some(field) = seg.strip_suffix("[]") {
        match value.get(field) {
            Some(Value::Array(items)) => {
                for item in items {
                    walk(item, &segments[1..], full_path, visit);
                }
            }
            Some(Value::Null) | None => visit(&Value::Null, full_path),
            Some(other) => visit(other, full_path),
        }
        return;
    }
    match value.get(*seg) {
        Some(v) => walk(v, &segments[1..], full_path, visit),
        None => visit(&Value::Null, full_path),
    }
}

fn type_matches(v: &Value, ty: &str) -> bool {
    let (base, nullable) = match ty.strip_suffix('?') {
        Some(b) => (b, true),
        None => (ty, false),
    };
    if v.is_null() {
        return nullable;
    }
    match base {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "boolean" => v.is_boolean(),
        "number" => v.is_number(),
        "integer" => v.is_i64() || v.is_u64(),
        _ => false,
    }
}

fn type_name(v: &Value) -> &'static str {
    match v {
        Value::Null => "null (or missing)",
        Value::Bool(_) => "boolean",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}

/// Serializes and validates a report; also re-checks every theorem tag
/// against the closed enum (fail-closed, independent of the schema file).
pub fn validate_report(report: &Report) -> std::result::Result<(), String> {
    let value = serde_json::to_value(report).map_err(|e| e.to_string())?;
    let mut errors = validate_json(&value);
    if let Some(verdict) = &report.verdict {
        for e in &verdict.evidence {
            if TheoremTag::parse(&e.tag).is_none() {
                errors.push(format!(
                    "evidence item `{}` cites unknown theorem tag `{}`",
                    e.criterion, e.tag
                ));
            }
            if e.grade != "certified" && e.grade != "advisory" {
                errors.push(format!(
                    "evidence item `{}` has unknown grade `{}`",
                    e.criterion, e.grade
                ));
            }
        }
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors.join("; "))
    }
}

// ---------------------------------------------------------------------------
// Plain-text rendering.
// ---------------------------------------------------------------------------

fn conclusion_text(c: &ConclusionDto) -> String {
    match c.kind.as_str() {
        "not-automatic-any" => "not q-automatic for any base q >= 2".to_string(),
        "not-q-automatic" => {
            let bases: Vec<String> = c.bases.iter().map(|b| b.to_string()).collect();
            format!("not q-automatic for q in {{{}}}", bases.join(", "))
        }
        "candidate-automatic" => {
            let d = c.base.unwrap_or(0);
            if c.construction_certified == Some(true) {
                format!("{d}-automatic (certified by construction)")
            } else {
                format!("consistent with {d}-automaticity (no obstruction found)")
            }
        }
        "ultimately-periodic" => format!(
            "ultimately periodic (preperiod {}, period {}): automatic in every base",
            c.preperiod.unwrap_or(0),
            c.period.unwrap_or(0)
        ),
        _ => "inconclusive".to_string(),
    }
}

/// Human-readable summary of a report.
pub fn render_text(report: &Report) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", report.tool.name, report.tool.version);
    let _ = writeln!(
        out,
        "input: {} {} (alphabet: {}; prefix analyzed: {})",
        report.input.kind,
        report.input.source,
        report.input.alphabet.join(" "),
        report.input.prefix_analyzed
    );
    if let Some(v) = &report.verdict {
        let badge = if v.certified { "certified" } else { "advisory" };
        let _ = writeln!(out, "conclusion: {} [{badge}]", conclusion_text(&v.conclusion));
        if !v.evidence.is_empty() {
            let _ = writeln!(out, "evidence:");
            for (i, e) in v.evidence.iter().enumerate() {
                let details: Vec<String> =
                    e.details.iter().map(|(k, val)| format!("{k}={val}")).collect();
                let _ = writeln!(
                    out,
                    "  {}. [{}] {} ({}): {}",
                    i + 1,
                    e.grade,
                    e.criterion,
                    e.tag,
                    details.join(", ")
                );
            }
        }
        for r in &v.remarks {
            let _ = writeln!(out, "remark: {r}");
        }
        for d in &v.diagnostics {
            let _ = writeln!(out, "diagnostic: {d}");
        }
    }
    let p = &report.payloads;
    if let Some(e) = &p.eigenvalue {
        let _ = writeln!(
            out,
            "dominant eigenvalue: {} (degree {}, min poly {}, approx {:.6})",
            e.class, e.degree, e.min_poly, e.approx
        );
    }
    if let Some(n) = p.dfao_states {
        let _ = writeln!(out, "minimal DFAO: {n} states");
    }
    for k in &p.kernel {
        let _ = writeln!(
            out,
            "kernel (base {}): >= {} classes{} (k <= {}, horizon {})",
            k.q,
            k.distinct_classes,
            if k.capped { ", capped" } else { "" },
            k.k_max_used,
            k.horizon
        );
    }
    for f in &p.kernel_families {
        let _ = writeln!(
            out,
            "kernel family {} (base {}): {} pairwise-distinct members",
            f.family, f.estimate.q, f.estimate.distinct_classes
        );
    }
    if let Some(c) = &p.complexity {
        let _ = writeln!(
            out,
            "block complexity: {} (slope {:.3}, stable n <= {})",
            c.growth, c.loglog_slope, c.stable_n_max
        );
    }
    if let Some(o) = &p.obstruction {
        let scope = if o.extends_to_all_q {
            "every base q >= 2".to_string()
        } else if o.all_q_obstructed {
            format!("all bases 2..={}", o.q_max)
        } else {
            let hit: Vec<String> = o
                .per_q
                .iter()
                .filter(|pq| pq.obstructed)
                .map(|pq| pq.q.to_string())
                .collect();
            if hit.is_empty() {
                "no base".to_string()
            } else {
                format!("bases {{{}}}", hit.join(", "))
            }
        };
        let _ = writeln!(
            out,
            "eigenvalue obstruction (det {}): obstructs {scope}",
            o.det
        );
    }
    if let Some(h) = &p.host {
        for d in &h.divisibility {
            let _ = writeln!(
                out,
                "return-word {}-divisibility: {}",
                d.q,
                if d.grows { "grows with depth" } else { "stalls" }
            );
        }
    }
    if !report.timings.is_empty() {
        let total: f64 = report.timings.values().sum();
        let _ = writeln!(out, "wall clock: {total:.1} ms total");
    }
    out
}
