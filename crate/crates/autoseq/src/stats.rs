//! Prefix statistics: block complexity with growth classification, the
//! induced morphism on length-l blocks, and letter/output frequencies
//! (empirical plus the exact Perron route when available).
//!
//! Everything computed from a prefix alone is advisory: complexity values
//! are lower bounds for the infinite word (a factor seen in the prefix is a
//! factor of the word, but late factors may be missing).  The only certified
//! items here flow through exact algebra: block-morphism matrices and
//! rational Perron frequencies.

use std::collections::HashMap;

use num_bigint::BigInt;

use crate::algebra::{perron_vector, PerronOutcome};
use crate::matrix::transition_matrix;
use crate::poly::Rat;
use crate::words::{Alphabet, Morphism, PrefixView, MAX_ALPHABET};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Block complexity.
// ---------------------------------------------------------------------------

/// Coarse growth classification of the complexity function p(n).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthClass {
    /// p stops increasing: the word is eventually periodic (if the prefix
    /// is representative).
    Bounded,
    /// Every successive ratio p(n)/p(n-1) over the top quarter of the fit
    /// range is at least 1.05.
    ExponentialSuspected,
    /// Least-squares slope of log p against log n below 1.2 over the fit
    /// range.
    Linear,
    /// Slope at least 1.2; values outside the confident band [1.6, 2.6]
    /// are flagged via `gray_zone`.
    QuadraticOrMore,
}

/// Factor-counting profile of a prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityProfile {
    pub n_max: usize,
    pub horizon: u64,
    /// p[n] = number of distinct length-n factors of the prefix, p[0] = 1.
    pub p: Vec<u64>,
    /// appearance[n] = least L such that every length-n factor of the
    /// prefix occurs in the first L symbols; appearance[0] = 0.
    pub appearance: Vec<u64>,
    /// For n >= 1: whether p(n) >= n + 1 (the Morse–Hedlund threshold).
    pub lower_bound_ok: Vec<bool>,
    pub growth: GrowthClass,
    /// Largest n such that, for every m <= n, no new length-m factor
    /// appears in the second half of the prefix.  Counts beyond this point
    /// are still growing at the prefix boundary, so they say nothing about
    /// the asymptotic class; the growth fit is restricted accordingly.
    pub stable_n_max: usize,
    /// The [lo, hi] window of n actually used for the growth fit: the top
    /// half of the stable range (the top half of the full range whenever
    /// the prefix has converged for all tested n).
    pub fit_range: (usize, usize),
    /// Least-squares slope of log p(n) against log n over `fit_range`.
    pub loglog_slope: f64,
    /// Slope landed outside the confident quadratic band [1.6, 2.6] while
    /// still being classified QuadraticOrMore.
    pub gray_zone: bool,
}

impl ComplexityProfile {
    /// Advisory aperiodicity evidence: the Morse–Hedlund threshold
    /// p(n) >= n + 1 held for every tested n.  (A single n with
    /// p(n) <= n proves eventual periodicity of the *word* only if the
    /// prefix contains all its factors, so the negative direction is not
    /// certified from a prefix.)
    pub fn aperiodicity_evidence(&self) -> bool {
        self.lower_bound_ok.iter().skip(1).all(|&b| b)
    }
}

/// Counts distinct factors of each length 1..=n_max in the first `horizon`
/// symbols.  Requires horizon >= 4 * n_max so the counts are not dominated
/// by boundary effects.
pub fn block_complexity(
    view: &mut PrefixView,
    n_max: usize,
    horizon: u64,
) -> Result<ComplexityProfile> {
    if n_max < 4 {
        return Err(Error::ParameterInvalid(format!(
            "n_max must be at least 4, got {n_max}"
        )));
    }
    let horizon = view.ensure_up_to(horizon)?;
    if horizon < 4 * n_max as u64 {
        return Err(Error::HorizonTooSmall {
            needed: 4 * n_max as u64,
            got: horizon,
        });
    }
    let seq = &view.symbols()[..horizon as usize];

    let mut p = vec![1u64];
    let mut appearance = vec![0u64];
    let mut lower_bound_ok = vec![true];
    for n in 1..=n_max {
        let mut seen: HashMap<&[u8], u64> = HashMap::new();
        let mut last_new = 0u64;
        for i in 0..=(seq.len() - n) {
            let w = &seq[i..i + n];
            if !seen.contains_key(w) {
                seen.insert(w, i as u64);
                last_new = i as u64;
            }
        }
        p.push(seen.len() as u64);
        appearance.push(last_new + n as u64);
        lower_bound_ok.push(seen.len() as u64 >= n as u64 + 1);
    }

    // The fit must only use lengths whose factor set has converged within
    // the prefix: if new length-n factors still appear in the second half,
    // p(n) is being truncated by the horizon and its tail flattens towards
    // a line regardless of the true class.
    let mut stable_n_max = 0usize;
    for n in 1..=n_max {
        if appearance[n] <= horizon / 2 {
            stable_n_max = n;
        } else {
            break;
        }
    }
    let hi = stable_n_max.clamp(4, n_max);
    let lo = hi / 2;

    // Successive ratios staying above 1.05 is necessary but not sufficient
    // for exponential growth: a quadratic's ratios (1 + 1/n)^2 only fall
    // under 1.05 past n = 40.  Exponential growth additionally forces the
    // log-log slope far above the polynomial bands, so both are required.
    let growth;
    let slope = loglog_fit(&p, lo, hi);
    let ratios_bounded_away =
        (3 * hi / 4..hi).all(|n| p[n + 1] as f64 >= 1.05 * p[n] as f64);
    let mut gray_zone = false;
    if p[hi] == p[lo] {
        growth = GrowthClass::Bounded;
    } else if ratios_bounded_away && slope > 2.6 {
        growth = GrowthClass::ExponentialSuspected;
    } else if slope < 1.2 {
        growth = GrowthClass::Linear;
    } else {
        growth = GrowthClass::QuadraticOrMore;
        gray_zone = !(1.6..=2.6).contains(&slope);
    }

    Ok(ComplexityProfile {
        n_max,
        horizon,
        p,
        appearance,
        lower_bound_ok,
        growth,
        stable_n_max,
        fit_range: (lo, hi),
        loglog_slope: slope,
        gray_zone,
    })
}

/// Least-squares slope of log p(n) against log n for n in [lo, hi].
fn loglog_fit(p: &[u64], lo: usize, hi: usize) -> f64 {
    let pts: Vec<(f64, f64)> = (lo.max(1)..=hi)
        .map(|n| ((n as f64).ln(), (p[n] as f64).ln()))
        .collect();
    let k = pts.len() as f64;
    let sx: f64 = pts.iter().map(|q| q.0).sum();
    let sy: f64 = pts.iter().map(|q| q.1).sum();
    let sxx: f64 = pts.iter().map(|q| q.0 * q.0).sum();
    let sxy: f64 = pts.iter().map(|q| q.0 * q.1).sum();
    let denom = k * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return 0.0;
    }
    (k * sxy - sx * sy) / denom
}

// ---------------------------------------------------------------------------
// Block morphisms.
// ---------------------------------------------------------------------------

/// The morphism induced on length-`ell` blocks of the fixed point: block
/// letters are the distinct length-`ell` factors in first-occurrence order,
/// and the image of the block at position i consists of the |phi(w_i)|
/// consecutive blocks starting where the image of w_i starts.  The block
/// word is then the fixed point of the returned morphism, and its coding
/// sends a block to the coded value of its first letter — so output
/// frequencies agree with the original's.
///
/// The dominant eigenvalue is preserved: column sums of the block matrix
/// grow like |phi^n| of the original.
pub fn block_morphism(m: &Morphism, ell: usize) -> Result<Morphism> {
    if ell == 0 || ell > 64 {
        return Err(Error::ParameterInvalid(format!(
            "block length must be in 1..=64, got {ell}"
        )));
    }
    let n_letters = m.alphabet().len();
    let max_img = (0..n_letters as u8)
        .map(|a| m.image(a).len())
        .max()
        .unwrap_or(0);
    if max_img == 0 {
        return Err(Error::NotProlongable("morphism erases every letter".into()));
    }

    // Scan window for collecting blocks, then enough extra symbols to read
    // every image off the same expansion.
    let scan = (64 * ell * n_letters * n_letters).max(512) as u64;
    let needed = scan * max_img as u64 + ell as u64 + 2;
    let view = crate::words::expand_letters(m, needed)?;
    let w = view.symbols();

    // Blocks in first-occurrence order over the scan window.
    let mut block_id: HashMap<&[u8], u8> = HashMap::new();
    let mut first_pos: Vec<usize> = Vec::new();
    let mut unstable = false;
    for i in 0..scan as usize {
        let b = &w[i..i + ell];
        if !block_id.contains_key(b) {
            if block_id.len() >= MAX_ALPHABET {
                return Err(Error::AlphabetTooLarge(block_id.len() + 1));
            }
            if i > 3 * (scan as usize) / 4 {
                unstable = true;
            }
            block_id.insert(b, block_id.len() as u8);
            first_pos.push(i);
        }
    }
    if unstable {
        return Err(Error::BlockAlphabetUnstable { ell });
    }
    let n_blocks = first_pos.len();

    // Cumulative image positions over the scanned prefix.
    let mut pos_img = Vec::with_capacity(scan as usize + 1);
    pos_img.push(0u64);
    for i in 0..scan as usize {
        let prev = pos_img[i];
        pos_img.push(prev + m.image(w[i]).len() as u64);
    }

    // Images of each block, read off the expansion.
    let mut rules: Vec<Vec<u8>> = Vec::with_capacity(n_blocks);
    for &i in &first_pos {
        let p = pos_img[i];
        let l0 = m.image(w[i]).len() as u64;
        let mut img = Vec::with_capacity(l0 as usize);
        for j in 0..l0 {
            let at = (p + j) as usize;
            let b = &w[at..at + ell];
            let id = block_id.get(b).copied().ok_or(Error::BlockAlphabetUnstable { ell })?;
            img.push(id);
        }
        rules.push(img);
    }

    // Name blocks by their letters; codings map to the original coded value
    // of the first letter.
    let plain = m.alphabet().names().iter().all(|s| s.chars().count() == 1);
    let names: Vec<String> = first_pos
        .iter()
        .map(|&i| {
            let parts: Vec<&str> = w[i..i + ell]
                .iter()
                .map(|&a| m.alphabet().name(a))
                .collect();
            parts.join(if plain { "" } else { "." })
        })
        .collect();
    let coding: Vec<String> = first_pos
        .iter()
        .map(|&i| m.code(w[i]).to_string())
        .collect();

    let alphabet = Alphabet::new(&names)?;
    Morphism::new(alphabet, rules, 0, Some(coding), false)
}

// ---------------------------------------------------------------------------
// Frequencies.
// ---------------------------------------------------------------------------

/// Frequency observations over a prefix, per output symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalFrequencies {
    pub horizon: u64,
    /// (symbol, count) at the full horizon.
    pub counts: Vec<(String, u64)>,
    /// (symbol, count / horizon).
    pub overall: Vec<(String, f64)>,
    /// Per symbol: minimum frequency over the tail dyadic windows
    /// [0, 2^j) — a liminf proxy.
    pub window_low: Vec<(String, f64)>,
    /// Maximum over the same windows — a limsup proxy.
    pub window_high: Vec<(String, f64)>,
}

/// Exact frequency information derived from the transition matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum ExactFrequencies {
    /// Integer dominant eigenvalue: exact rational frequencies per letter,
    /// and per output symbol after applying the coding.
    Rational {
        eigenvalue: BigInt,
        letters: Vec<(String, Rat)>,
        outputs: Vec<(String, Rat)>,
    },
    /// Irrational dominant eigenvalue: exact frequencies exist but are not
    /// rational; the certificate explains why no rational eigenvector can
    /// exist.
    IrrationalEigenvalue {
        min_poly: String,
        approx: f64,
        certificate: String,
    },
    /// The Perron route does not apply (for example, the matrix is not
    /// primitive).
    NotAvailable { reason: String },
}

/// Combined frequency report for the coded fixed point of a morphism.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyReport {
    pub empirical: EmpiricalFrequencies,
    pub exact: ExactFrequencies,
}

/// Empirical symbol frequencies of a prefix: exact counts, plus min/max
/// over tail dyadic windows as liminf/limsup proxies.
pub fn empirical_frequencies(
    view: &mut PrefixView,
    horizon: u64,
) -> Result<EmpiricalFrequencies> {
    let horizon = view.ensure_up_to(horizon)?;
    if horizon == 0 {
        return Err(Error::PrefixTooShort { needed: 1, got: 0 });
    }
    let seq = &view.symbols()[..horizon as usize];
    let n_syms = view.alphabet().len();

    // Cumulative counts at dyadic checkpoints and the horizon.
    let mut checkpoints: Vec<u64> = (10..63)
        .map(|j| 1u64 << j)
        .filter(|&w| w < horizon)
        .collect();
    checkpoints.push(horizon);
    let mut counts = vec![0u64; n_syms];
    let mut at_checkpoint: Vec<Vec<u64>> = Vec::with_capacity(checkpoints.len());
    let mut next = 0;
    for (i, &s) in seq.iter().enumerate() {
        counts[s as usize] += 1;
        while next < checkpoints.len() && (i as u64 + 1) == checkpoints[next] {
            at_checkpoint.push(counts.clone());
            next += 1;
        }
    }
    debug_assert_eq!(at_checkpoint.len(), checkpoints.len());

    // Tail windows: the last half of the checkpoint list.
    let tail_from = checkpoints.len() / 2;
    let names = view.alphabet().names();
    let mut window_low = Vec::with_capacity(n_syms);
    let mut window_high = Vec::with_capacity(n_syms);
    for s in 0..n_syms {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (ci, c) in at_checkpoint.iter().enumerate().skip(tail_from) {
            let f = c[s] as f64 / checkpoints[ci] as f64;
            lo = lo.min(f);
            hi = hi.max(f);
        }
        window_low.push((names[s].clone(), lo));
        window_high.push((names[s].clone(), hi));
    }

    Ok(EmpiricalFrequencies {
        horizon,
        counts: (0..n_syms).map(|s| (names[s].clone(), counts[s])).collect(),
        overall: (0..n_syms)
            .map(|s| (names[s].clone(), counts[s] as f64 / horizon as f64))
            .collect(),
        window_low,
        window_high,
    })
}

/// Frequency report for the coded fixed point of `m`: empirical statistics
/// over `horizon` symbols plus the exact Perron computation when the
/// transition matrix is primitive.
pub fn frequencies(m: &Morphism, horizon: u64) -> Result<FrequencyReport> {
    let mut view = crate::words::expand(m, horizon)?;
    let empirical = empirical_frequencies(&mut view, horizon)?;

    let mat = transition_matrix(m);
    let exact = match perron_vector(&mat) {
        Ok(PerronOutcome::Rational {
            eigenvalue,
            frequencies,
        }) => {
            let letters: Vec<(String, Rat)> = (0..m.alphabet().len())
                .map(|a| (m.alphabet().name(a as u8).to_string(), frequencies[a].clone()))
                .collect();
            // Aggregate letters by coded value, in the output alphabet's
            // order (mirrors `expand`).
            let out_names: Vec<&str> = view.alphabet().names().iter().map(|s| s.as_str()).collect();
            let mut outputs: Vec<(String, Rat)> = out_names
                .iter()
                .map(|n| (n.to_string(), Rat::new(BigInt::from(0), BigInt::from(1))))
                .collect();
            for a in 0..m.alphabet().len() {
                let code = m.code(a as u8);
                if let Some(slot) = outputs.iter_mut().find(|(n, _)| n == code) {
                    slot.1 = &slot.1 + &frequencies[a];
                }
            }
            ExactFrequencies::Rational {
                eigenvalue,
                letters,
                outputs,
            }
        }
        Ok(PerronOutcome::IrrationalEigenvalue {
            eigenvalue,
            certificate,
        }) => ExactFrequencies::IrrationalEigenvalue {
            min_poly: eigenvalue.min_poly().to_string(),
            approx: eigenvalue.approx_f64(),
            certificate,
        },
        Err(Error::NotPrimitive) => ExactFrequencies::NotAvailable {
            reason: "transition matrix is not primitive".into(),
        },
        Err(e) => return Err(e),
    };

    Ok(FrequencyReport { empirical, exact })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalogue;
    use crate::matrix::char_poly;
    use crate::poly::IntPolynomial;
    use crate::words::expand;

    fn profile(m: &Morphism, n_max: usize, horizon: u64) -> ComplexityProfile {
        let mut view = expand(m, horizon).unwrap();
        block_complexity(&mut view, n_max, horizon).unwrap()
    }

    #[test]
    fn thue_morse_complexity_values() {
        let prof = profile(&catalogue::thue_morse(), 32, 1 << 16);
        // Classic initial values.
        assert_eq!(&prof.p[..5], &[1, 2, 4, 6, 10]);
        assert_eq!(prof.growth, GrowthClass::Linear);
        assert!(prof.aperiodicity_evidence());
        // Appearance is finite and grows with n.
        assert!(prof.appearance[4] >= 4);
        assert!(prof.appearance[32] >= prof.appearance[4]);
    }

    #[test]
    fn fibonacci_complexity_is_n_plus_one() {
        let prof = profile(&catalogue::fibonacci_word(), 24, 1 << 16);
        for n in 1..=24usize {
            assert_eq!(prof.p[n], n as u64 + 1, "Sturmian p({n})");
        }
        assert_eq!(prof.growth, GrowthClass::Linear);
        assert!(prof.aperiodicity_evidence());
    }

    #[test]
    fn periodic_word_is_bounded() {
        let prof = profile(&catalogue::periodic_square(), 16, 1 << 12);
        assert_eq!(prof.p[1], 2);
        assert_eq!(prof.p[8], 2);
        assert_eq!(prof.growth, GrowthClass::Bounded);
        assert!(!prof.aperiodicity_evidence());
    }

    #[test]
    fn aab_complexity_is_superlinear() {
        let prof = profile(&catalogue::aab(), 48, 1 << 17);
        assert_eq!(prof.growth, GrowthClass::QuadraticOrMore);
        assert!(!prof.gray_zone, "slope {}", prof.loglog_slope);
        assert!(prof.aperiodicity_evidence());
        // The pure-b window of length n first completes at 2^{n+1} - 1, so
        // the stable range ends where that outgrows half the horizon.
        assert_eq!(prof.stable_n_max, 15);
        assert!(prof.fit_range.0 >= 7 && prof.fit_range.1 == 15);
    }

    #[test]
    fn complexity_horizon_guard() {
        let m = catalogue::thue_morse();
        let view = expand(&m, 100).unwrap();
        let mut fixed = crate::words::PrefixView::fixed(
            view.alphabet().clone(),
            view.symbols()[..100].to_vec(),
        );
        assert!(matches!(
            block_complexity(&mut fixed, 64, 1 << 10),
            Err(Error::HorizonTooSmall { .. })
        ));
    }

    #[test]
    fn fibonacci_two_block_morphism() {
        let m = catalogue::fibonacci_word();
        let bm = block_morphism(&m, 2).unwrap();
        // Exactly the three 2-blocks, in first-occurrence order.
        assert_eq!(bm.alphabet().names(), &["01", "10", "00"]);
        // Characteristic polynomial x^3 - x^2 - x = x (x^2 - x - 1).
        let cp = char_poly(&transition_matrix(&bm));
        assert_eq!(cp, IntPolynomial::from_i64(&[0, -1, -1, 1]));
        // Same dominant eigenvalue as the original (the golden ratio).
        let rho_orig = crate::algebra::dominant_eigenvalue(&transition_matrix(&m)).unwrap();
        let rho_block = crate::algebra::dominant_eigenvalue(&transition_matrix(&bm)).unwrap();
        assert_eq!(rho_orig.min_poly(), rho_block.min_poly());
    }

    #[test]
    fn one_block_morphism_preserves_char_poly() {
        for m in [
            catalogue::thue_morse(),
            catalogue::fibonacci_word(),
            catalogue::period_doubling(),
        ] {
            let bm = block_morphism(&m, 1).unwrap();
            // Same matrix up to permutation: identical characteristic
            // polynomial.
            assert_eq!(
                char_poly(&transition_matrix(&m)),
                char_poly(&transition_matrix(&bm)),
                "{m}"
            );
        }
    }

    #[test]
    fn block_morphism_eigenvalue_preservation() {
        for m in [
            catalogue::thue_morse(),
            catalogue::fibonacci_word(),
            catalogue::period_doubling(),
            catalogue::rudin_shapiro(),
        ] {
            let rho = crate::algebra::dominant_eigenvalue(&transition_matrix(&m)).unwrap();
            for ell in 1..=3usize {
                let bm = block_morphism(&m, ell).unwrap();
                let rho_b =
                    crate::algebra::dominant_eigenvalue(&transition_matrix(&bm)).unwrap();
                assert_eq!(
                    rho.min_poly(),
                    rho_b.min_poly(),
                    "{m} at block length {ell}"
                );
            }
        }
    }

    #[test]
    fn block_word_is_fixed_point_of_block_morphism() {
        // The block morphism's coded expansion must reproduce the original
        // coded sequence (coding = coded value of the block's first letter).
        for m in [catalogue::thue_morse(), catalogue::fibonacci_word()] {
            for ell in 1..=3usize {
                let bm = block_morphism(&m, ell).unwrap();
                let orig = expand(&m, 2048).unwrap();
                let blocks = expand(&bm, 2048).unwrap();
                for i in 0..2048usize {
                    assert_eq!(
                        orig.alphabet().name(orig.symbols()[i]),
                        blocks.alphabet().name(blocks.symbols()[i]),
                        "{m} ell={ell} at {i}"
                    );
                }
            }
        }
    }

    #[test]
    fn frequencies_exact_rational_cases() {
        // 1 -> 2, 2 -> 211: letters each have frequency exactly 1/2.
        let rep = frequencies(&catalogue::m_2_211(), 1 << 14).unwrap();
        match &rep.exact {
            ExactFrequencies::Rational {
                eigenvalue,
                letters,
                ..
            } => {
                assert_eq!(eigenvalue, &BigInt::from(2));
                let half = Rat::new(BigInt::from(1), BigInt::from(2));
                assert_eq!(letters[0].1, half);
                assert_eq!(letters[1].1, half);
            }
            other => panic!("expected rational frequencies, got {other:?}"),
        }
        // Empirical agrees loosely.
        for (_, f) in &rep.empirical.overall {
            assert!((f - 0.5).abs() < 0.05);
        }

        // Rudin–Shapiro: letters 1/4 each, outputs 1/2 each after coding.
        let rep = frequencies(&catalogue::rudin_shapiro(), 1 << 14).unwrap();
        match &rep.exact {
            ExactFrequencies::Rational { letters, outputs, .. } => {
                let quarter = Rat::new(BigInt::from(1), BigInt::from(4));
                let half = Rat::new(BigInt::from(1), BigInt::from(2));
                for (_, f) in letters {
                    assert_eq!(f, &quarter);
                }
                assert_eq!(outputs.len(), 2);
                for (_, f) in outputs {
                    assert_eq!(f, &half);
                }
            }
            other => panic!("expected rational frequencies, got {other:?}"),
        }
    }

    #[test]
    fn frequencies_irrational_and_unavailable_cases() {
        let rep = frequencies(&catalogue::fibonacci_word(), 1 << 14).unwrap();
        assert!(matches!(
            rep.exact,
            ExactFrequencies::IrrationalEigenvalue { .. }
        ));

        let rep = frequencies(&catalogue::aab(), 1 << 14).unwrap();
        assert!(matches!(rep.exact, ExactFrequencies::NotAvailable { .. }));
    }

    #[test]
    fn empirical_windows_bracket_overall() {
        let m = catalogue::thue_morse();
        let mut view = expand(&m, 1 << 14).unwrap();
        let emp = empirical_frequencies(&mut view, 1 << 14).unwrap();
        for s in 0..2 {
            assert!(emp.window_low[s].1 <= emp.overall[s].1 + 1e-9);
            assert!(emp.window_high[s].1 >= emp.overall[s].1 - 1e-9);
        }
        assert_eq!(emp.counts[0].1 + emp.counts[1].1, 1 << 14);
    }
}
