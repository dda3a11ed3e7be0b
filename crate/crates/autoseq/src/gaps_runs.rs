//! Occurrence-position analysis: Cobham's gap dichotomy, the
//! Minsky–Papert ratio test, and run-length first occurrences.
//!
//! All verdicts here are advisory evidence: the underlying theorems are
//! asymptotic, and a prefix can only estimate the limits involved.  The
//! dichotomy for an automatic sequence is: either the counting function of
//! a symbol is O(log n), or some bounded gap between consecutive
//! occurrences recurs forever.  A prefix on which both alternatives fail
//! decisively is a witness candidate against automaticity in every base.

use crate::words::PrefixView;
use crate::{Error, Result};

/// Thresholds shared by the occurrence tests.
#[derive(Debug, Clone)]
pub struct OccurrenceOptions {
    /// Minimum number of occurrences for any verdict.
    pub min_occurrences: u64,
    /// The counting alternative fails when count(h)/ln(h) exceeds this.
    pub count_ratio_threshold: f64,
    /// The gap alternative holds when some tail gap is at most this.
    pub gap_recur_threshold: u64,
    /// Ratios below 1 + epsilon count as "tending to one".
    pub ratio_epsilon: f64,
    /// Zero-frequency proxy: accept when overall frequency is below this…
    pub freq_threshold: f64,
    /// …or when dyadic-window frequencies decay by at least this factor
    /// per window over the last few windows.
    pub freq_decay_ratio: f64,
}

impl Default for OccurrenceOptions {
    fn default() -> Self {
        OccurrenceOptions {
            min_occurrences: 16,
            count_ratio_threshold: 50.0,
            gap_recur_threshold: 64,
            ratio_epsilon: 0.01,
            freq_threshold: 0.01,
            freq_decay_ratio: 0.97,
        }
    }
}

/// Where the j-th occurrence of a symbol falls, and derived statistics.
/// The tail (last half of the occurrences) feeds the liminf/limsup
/// estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct OccurrenceProfile {
    pub symbol: String,
    pub symbol_id: u8,
    pub horizon: u64,
    /// All positions alpha_1 < alpha_2 < … of the symbol within the
    /// horizon.
    pub positions: Vec<u64>,
    /// Counting-function samples (n, |x[0..n-1]|_d) at n = 2^i and at the
    /// horizon.
    pub counting_samples: Vec<(u64, u64)>,
    /// Minimum of alpha_{j+1} - alpha_j over the tail.
    pub min_tail_gap: Option<u64>,
    /// Maximum of alpha_{j+1} / alpha_j over the tail.
    pub max_tail_ratio: Option<f64>,
}

impl OccurrenceProfile {
    pub fn count(&self) -> u64 {
        self.positions.len() as u64
    }
}

/// Scans the prefix for every occurrence of symbol `d`.
pub fn occurrence_profile(
    view: &mut PrefixView,
    d: u8,
    horizon: u64,
) -> Result<OccurrenceProfile> {
    if (d as usize) >= view.alphabet().len() {
        return Err(Error::ParameterInvalid(format!(
            "symbol id {d} out of range for alphabet of {}",
            view.alphabet().len()
        )));
    }
    let horizon = view.ensure_up_to(horizon)?;
    let seq = &view.symbols()[..horizon as usize];

    let mut positions = Vec::new();
    let mut counting_samples = Vec::new();
    let mut next_sample = 1u64;
    for (i, &s) in seq.iter().enumerate() {
        if i as u64 == next_sample {
            counting_samples.push((next_sample, positions.len() as u64));
            next_sample *= 2;
        }
        if s == d {
            positions.push(i as u64);
        }
    }
    while next_sample <= horizon {
        counting_samples.push((next_sample, positions.len() as u64));
        next_sample *= 2;
    }
    if counting_samples.last().map(|&(n, _)| n) != Some(horizon) {
        counting_samples.push((horizon, positions.len() as u64));
    }

    // Gaps and ratios between consecutive members of the tail itself.
    let tail_from = positions.len() / 2;
    let mut min_tail_gap = None;
    let mut max_tail_ratio: Option<f64> = None;
    for j in (tail_from + 1).max(1)..positions.len() {
        let gap = positions[j] - positions[j - 1];
        min_tail_gap = Some(min_tail_gap.map_or(gap, |g: u64| g.min(gap)));
        if positions[j - 1] > 0 {
            let ratio = positions[j] as f64 / positions[j - 1] as f64;
            max_tail_ratio =
                Some(max_tail_ratio.map_or(ratio, |r: f64| r.max(ratio)));
        }
    }

    Ok(OccurrenceProfile {
        symbol: view.alphabet().name(d).to_string(),
        symbol_id: d,
        horizon,
        positions,
        counting_samples,
        min_tail_gap,
        max_tail_ratio,
    })
}

// ---------------------------------------------------------------------------
// Cobham's gap dichotomy.
// ---------------------------------------------------------------------------

/// The two alternatives of the gap dichotomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapBranch {
    /// Counting function is logarithmically bounded on this prefix.
    Count,
    /// A bounded gap recurs in the tail.
    Gap,
}

/// Numbers behind a gap verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct GapEvidence {
    pub symbol: String,
    pub horizon: u64,
    pub count: u64,
    /// count(horizon) / ln(horizon).
    pub count_log_ratio: f64,
    pub count_threshold: f64,
    pub min_tail_gap: Option<u64>,
    pub gap_threshold: u64,
}

/// Outcome of the gap dichotomy on a prefix.
#[derive(Debug, Clone, PartialEq)]
pub enum GapVerdict {
    /// Both alternatives fail: evidence against q-automaticity for every
    /// q (advisory — finite horizon).
    FailsBoth(GapEvidence),
    /// Exactly one alternative holds.
    SatisfiesOne(GapBranch, GapEvidence),
    /// Both hold (possible: e.g. {2^n} ∪ {2^n - 1}).
    SatisfiesBoth(GapEvidence),
}

/// Evaluates both alternatives of the dichotomy for symbol `d` over the
/// prefix: (i) count(h)/ln(h) within bound, (ii) a small gap recurring
/// among the last half of the occurrences.
pub fn cobham_gap_test(
    view: &mut PrefixView,
    d: u8,
    horizon: u64,
    opts: &OccurrenceOptions,
) -> Result<GapVerdict> {
    let profile = occurrence_profile(view, d, horizon)?;
    if profile.count() < opts.min_occurrences {
        return Err(Error::TooFewOccurrences {
            found: profile.count(),
            symbol: profile.symbol,
            needed: opts.min_occurrences,
        });
    }
    let count_log_ratio =
        profile.count() as f64 / (profile.horizon as f64).ln();
    let evidence = GapEvidence {
        symbol: profile.symbol.clone(),
        horizon: profile.horizon,
        count: profile.count(),
        count_log_ratio,
        count_threshold: opts.count_ratio_threshold,
        min_tail_gap: profile.min_tail_gap,
        gap_threshold: opts.gap_recur_threshold,
    };
    let count_ok = count_log_ratio <= opts.count_ratio_threshold;
    let gap_ok = profile
        .min_tail_gap
        .is_some_and(|g| g <= opts.gap_recur_threshold);
    Ok(match (count_ok, gap_ok) {
        (true, true) => GapVerdict::SatisfiesBoth(evidence),
        (true, false) => GapVerdict::SatisfiesOne(GapBranch::Count, evidence),
        (false, true) => GapVerdict::SatisfiesOne(GapBranch::Gap, evidence),
        (false, false) => GapVerdict::FailsBoth(evidence),
    })
}

// ---------------------------------------------------------------------------
// Minsky–Papert ratio test.
// ---------------------------------------------------------------------------

/// Outcome of the occurrence-ratio test for a zero-frequency symbol.  For
/// an automatic sequence the limsup of alpha_{j+1}/alpha_j must exceed 1,
/// so ratios uniformly near 1 are evidence against automaticity.
#[derive(Debug, Clone, PartialEq)]
pub enum RatioVerdict {
    /// All tail ratios below 1 + epsilon: witness candidate against
    /// q-automaticity for every q (advisory).
    RatioTendsToOne { max_tail_ratio: f64, epsilon: f64 },
    /// Some tail ratio stays away from 1 (consistent with automaticity).
    RatioBoundedAway { limsup_estimate: f64, epsilon: f64 },
}

/// Estimates limsup alpha_{j+1}/alpha_j over the tail occurrences of `d`.
///
/// The zero-frequency hypothesis is checked by proxy: either the overall
/// frequency is below `freq_threshold`, or the dyadic-window frequencies
/// visibly decay (each of the last four window-to-window ratios at most
/// `freq_decay_ratio`) — the latter admits slowly thinning sets like the
/// primes, whose density 1/ln(h) never drops below an absolute cutoff at
/// any feasible horizon.
pub fn minsky_papert_test(
    view: &mut PrefixView,
    d: u8,
    horizon: u64,
    opts: &OccurrenceOptions,
) -> Result<RatioVerdict> {
    let profile = occurrence_profile(view, d, horizon)?;
    if profile.count() < opts.min_occurrences {
        return Err(Error::TooFewOccurrences {
            found: profile.count(),
            symbol: profile.symbol,
            needed: opts.min_occurrences,
        });
    }
    let freq = profile.count() as f64 / profile.horizon as f64;
    if freq >= opts.freq_threshold && !window_frequencies_decay(&profile, opts) {
        return Err(Error::FrequencyNotSmall {
            symbol: profile.symbol,
            freq,
            threshold: opts.freq_threshold,
        });
    }
    let max_tail_ratio = profile.max_tail_ratio.unwrap_or(f64::INFINITY);
    Ok(if max_tail_ratio < 1.0 + opts.ratio_epsilon {
        RatioVerdict::RatioTendsToOne {
            max_tail_ratio,
            epsilon: opts.ratio_epsilon,
        }
    } else {
        RatioVerdict::RatioBoundedAway {
            limsup_estimate: max_tail_ratio,
            epsilon: opts.ratio_epsilon,
        }
    })
}

/// Density over windows [2^i, 2^{i+1}) strictly decaying across the last
/// four complete windows.
fn window_frequencies_decay(
    profile: &OccurrenceProfile,
    opts: &OccurrenceOptions,
) -> bool {
    // counting_samples hold (2^i, count(2^i)); window density is the
    // difference quotient between consecutive samples.
    let dyadic: Vec<(u64, u64)> = profile
        .counting_samples
        .iter()
        .copied()
        .filter(|&(n, _)| n.is_power_of_two())
        .collect();
    if dyadic.len() < 6 {
        return false;
    }
    let densities: Vec<f64> = dyadic
        .windows(2)
        .map(|w| (w[1].1 - w[0].1) as f64 / (w[1].0 - w[0].0) as f64)
        .collect();
    let tail = &densities[densities.len() - 5..];
    tail.windows(2)
        .all(|w| w[1] <= w[0] * opts.freq_decay_ratio && w[0] > 0.0)
}

// ---------------------------------------------------------------------------
// Run first occurrences.
// ---------------------------------------------------------------------------

/// First starting positions of runs: `overall[n]` is the first position
/// where a block of >= n identical symbols begins (any symbol), and
/// `per_symbol` restricts to runs of one symbol.  Entries are absent when
/// no such run occurs within the horizon.  For an automatic sequence this
/// function is synchronized and hence O(n), so superlinear growth is a
/// witness candidate against automaticity in every base.
#[derive(Debug, Clone, PartialEq)]
pub struct RunProfile {
    pub n_max: usize,
    pub horizon: u64,
    /// Index n in 1..=n_max; index 0 unused.
    pub overall: Vec<Option<u64>>,
    pub per_symbol: Vec<(String, Vec<Option<u64>>)>,
    /// max f(n)/n over defined overall entries — the linearity diagnostic.
    pub max_f_over_n: f64,
}

/// Computes run first-occurrence tables by one run-length-encoding pass.
pub fn run_first_occurrence(
    view: &mut PrefixView,
    n_max: usize,
    horizon: u64,
) -> Result<RunProfile> {
    if n_max == 0 {
        return Err(Error::ParameterInvalid("n_max must be positive".into()));
    }
    let horizon = view.ensure_up_to(horizon)?;
    if horizon == 0 {
        return Err(Error::PrefixTooShort { needed: 1, got: 0 });
    }
    let seq = &view.symbols()[..horizon as usize];
    let n_syms = view.alphabet().len();

    let mut overall: Vec<Option<u64>> = vec![None; n_max + 1];
    let mut per: Vec<Vec<Option<u64>>> = vec![vec![None; n_max + 1]; n_syms];
    // First occurrences fill in prefix-closed fashion: a run covering
    // length n covers every shorter length, so track how far each table is
    // already filled.
    let mut overall_filled = 0usize;
    let mut per_filled = vec![0usize; n_syms];

    let mut start = 0usize;
    while start < seq.len() {
        let s = seq[start];
        let mut end = start + 1;
        while end < seq.len() && seq[end] == s {
            end += 1;
        }
        let len = (end - start).min(n_max);
        for n in overall_filled + 1..=len {
            overall[n] = Some(start as u64);
        }
        overall_filled = overall_filled.max(len);
        let filled = &mut per_filled[s as usize];
        for n in *filled + 1..=len {
            per[s as usize][n] = Some(start as u64);
        }
        *filled = (*filled).max(len);
        start = end;
    }

    let max_f_over_n = (1..=n_max)
        .filter_map(|n| overall[n].map(|f| f as f64 / n as f64))
        .fold(0.0f64, f64::max);

    Ok(RunProfile {
        n_max,
        horizon,
        overall,
        per_symbol: (0..n_syms)
            .map(|s| {
                (
                    view.alphabet().name(s as u8).to_string(),
                    std::mem::take(&mut per[s]),
                )
            })
            .collect(),
        max_f_over_n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalogue;
    use crate::seqlib::{generate, GeneratorSpec};
    use crate::words::expand;

    fn opts() -> OccurrenceOptions {
        OccurrenceOptions::default()
    }

    #[test]
    fn occurrence_profile_matches_naive_rescan() {
        let mut view = generate(&GeneratorSpec::parse("poly:1,0,0").unwrap(), 1 << 14).unwrap();
        let profile = occurrence_profile(&mut view, 1, 1 << 14).unwrap();
        // Determinism oracle: an independent naive scan.
        let naive: Vec<u64> = view.symbols()[..1 << 14]
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == 1)
            .map(|(i, _)| i as u64)
            .collect();
        assert_eq!(profile.positions, naive);
        for &(n, c) in &profile.counting_samples {
            let direct = naive.iter().filter(|&&p| p < n).count() as u64;
            assert_eq!(c, direct, "counting sample at {n}");
        }
        // Squares below 2^14: exactly 128 (0..=127 squared).
        assert_eq!(profile.count(), 128);
    }

    #[test]
    fn squares_fail_both_gap_alternatives() {
        let spec = GeneratorSpec::parse("poly:1,0,0").unwrap();
        let mut view = generate(&spec, 1 << 20).unwrap();
        match cobham_gap_test(&mut view, 1, 1 << 20, &opts()).unwrap() {
            GapVerdict::FailsBoth(e) => {
                assert_eq!(e.count, 1024);
                assert!(e.count_log_ratio > 50.0, "ratio {}", e.count_log_ratio);
                // Tail gaps are 2j + 1 for j >= 512.
                assert_eq!(e.min_tail_gap, Some(1025));
            }
            v => panic!("expected FailsBoth, got {v:?}"),
        }
    }

    #[test]
    fn powers_and_predecessors_satisfy_both() {
        let spec = GeneratorSpec::parse("set:2n-and-2n-1").unwrap();
        let mut view = generate(&spec, 1 << 20).unwrap();
        match cobham_gap_test(&mut view, 1, 1 << 20, &opts()).unwrap() {
            GapVerdict::SatisfiesBoth(e) => {
                // count ≈ 2 log2(h); gap 1 recurs between 2^n - 1 and 2^n.
                assert!(e.count_log_ratio < 50.0);
                assert_eq!(e.min_tail_gap, Some(1));
            }
            v => panic!("expected SatisfiesBoth, got {v:?}"),
        }
    }

    #[test]
    fn periodic_word_satisfies_gap_only() {
        // (10)^∞ has abundant ones (count branch fails) with constant
        // gap 2 (gap branch holds); eventually periodic inputs must never
        // reach FailsBoth.
        let m = catalogue::periodic_square();
        let mut view = expand(&m, 1 << 16).unwrap();
        let d = if view.alphabet().name(0) == "1" { 0 } else { 1 };
        match cobham_gap_test(&mut view, d, 1 << 16, &opts()).unwrap() {
            GapVerdict::SatisfiesOne(GapBranch::Gap, e) => {
                assert_eq!(e.min_tail_gap, Some(2));
            }
            v => panic!("expected SatisfiesOne(Gap), got {v:?}"),
        }
    }

    #[test]
    fn too_few_occurrences_is_reported() {
        let spec = GeneratorSpec::parse("set:2n").unwrap();
        let mut view = generate(&spec, 1 << 10).unwrap();
        // Only 9 powers of two below 1024.
        assert!(matches!(
            cobham_gap_test(&mut view, 1, 1 << 10, &opts()),
            Err(Error::TooFewOccurrences { found: 9, .. })
        ));
    }

    #[test]
    fn squares_ratio_tends_to_one() {
        let spec = GeneratorSpec::parse("poly:1,0,0").unwrap();
        let mut view = generate(&spec, 1 << 20).unwrap();
        match minsky_papert_test(&mut view, 1, 1 << 20, &opts()).unwrap() {
            RatioVerdict::RatioTendsToOne { max_tail_ratio, .. } => {
                // ((j+1)/j)^2 at j = 512 is about 1.0039.
                assert!(max_tail_ratio < 1.01, "ratio {max_tail_ratio}");
            }
            v => panic!("expected RatioTendsToOne, got {v:?}"),
        }
    }

    #[test]
    fn powers_of_two_ratio_bounded_away() {
        let spec = GeneratorSpec::parse("set:2n").unwrap();
        let mut view = generate(&spec, 1 << 20).unwrap();
        match minsky_papert_test(&mut view, 1, 1 << 20, &opts()).unwrap() {
            RatioVerdict::RatioBoundedAway { limsup_estimate, .. } => {
                assert!((limsup_estimate - 2.0).abs() < 1e-9);
            }
            v => panic!("expected RatioBoundedAway, got {v:?}"),
        }
    }

    #[test]
    fn primes_pass_the_decay_proxy_and_tend_to_one() {
        let mut view = generate(&GeneratorSpec::Primes, 1 << 20).unwrap();
        // Density ~ 0.078 exceeds the absolute threshold, so only the
        // window-decay proxy admits the primes.
        match minsky_papert_test(&mut view, 1, 1 << 20, &opts()).unwrap() {
            RatioVerdict::RatioTendsToOne { max_tail_ratio, .. } => {
                assert!(max_tail_ratio < 1.01, "ratio {max_tail_ratio}");
            }
            v => panic!("expected RatioTendsToOne, got {v:?}"),
        }
    }

    #[test]
    fn dense_symbol_rejected_by_frequency_proxy() {
        let m = catalogue::thue_morse();
        let mut view = expand(&m, 1 << 16).unwrap();
        assert!(matches!(
            minsky_papert_test(&mut view, 0, 1 << 16, &opts()),
            Err(Error::FrequencyNotSmall { .. })
        ));
    }

    #[test]
    fn aab_run_tables_match_closed_form() {
        let m = catalogue::aab();
        let mut view = expand(&m, 1 << 20).unwrap();
        let profile = run_first_occurrence(&mut view, 18, 1 << 20).unwrap();
        let (_, b_table) = profile
            .per_symbol
            .iter()
            .find(|(name, _)| name == "b")
            .expect("symbol b")
            .clone();
        for n in 1..=18usize {
            let expect = (1u64 << (n + 1)) - n as u64 - 1;
            assert_eq!(b_table[n], Some(expect), "f_b({n})");
        }
        // Overall: runs of `a` never exceed 2, so the any-symbol table
        // starts at position 0 for n <= 2 and follows the b-runs after.
        assert_eq!(profile.overall[1], Some(0));
        assert_eq!(profile.overall[2], Some(0));
        for n in 3..=18usize {
            let expect = (1u64 << (n + 1)) - n as u64 - 1;
            assert_eq!(profile.overall[n], Some(expect), "f({n})");
        }
        // Superlinear diagnostic fires.
        assert!(profile.max_f_over_n > 64.0);
    }

    #[test]
    fn thue_morse_is_overlap_free_and_linear() {
        let m = catalogue::thue_morse();
        let mut view = expand(&m, 1 << 16).unwrap();
        let profile = run_first_occurrence(&mut view, 8, 1 << 16).unwrap();
        assert_eq!(profile.overall[1], Some(0));
        assert_eq!(profile.overall[2], Some(1));
        for n in 3..=8 {
            assert_eq!(profile.overall[n], None, "no runs of length {n}");
        }
        assert!(profile.max_f_over_n <= 64.0);
    }

    #[test]
    fn constant_word_runs_all_zero() {
        // p(x) = x hits every position, so the indicator is constantly 1.
        let mut view = generate(&GeneratorSpec::parse("poly:1,0").unwrap(), 64).unwrap();
        assert!(view.symbols().iter().all(|&s| s == 1));
        let profile = run_first_occurrence(&mut view, 8, 64).unwrap();
        for n in 1..=8 {
            assert_eq!(profile.overall[n], Some(0));
        }
        assert_eq!(profile.max_f_over_n, 0.0);
    }

    #[test]
    fn run_tables_are_monotone_where_defined() {
        for m in [
            catalogue::aab(),
            catalogue::fibonacci_word(),
            catalogue::period_doubling(),
        ] {
            let mut view = expand(&m, 1 << 16).unwrap();
            let profile = run_first_occurrence(&mut view, 16, 1 << 16).unwrap();
            for table in std::iter::once(&profile.overall)
                .chain(profile.per_symbol.iter().map(|(_, t)| t))
            {
                let defined: Vec<u64> = table.iter().flatten().copied().collect();
                for w in defined.windows(2) {
                    assert!(w[0] <= w[1], "f non-decreasing");
                }
            }
        }
    }

    #[test]
    fn automatic_inputs_have_linear_runs() {
        // Sanity instance of the synchronization bound with C = 64.
        for m in catalogue::uniform_aperiodic() {
            let mut view = expand(&m, 1 << 16).unwrap();
            let profile = run_first_occurrence(&mut view, 24, 1 << 16).unwrap();
            assert!(
                profile.max_f_over_n <= 64.0,
                "{m}: max f(n)/n = {}",
                profile.max_f_over_n
            );
        }
    }
}
