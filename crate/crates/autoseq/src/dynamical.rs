//! Dynamical obstructions to automaticity.
//!
//! Two machine-checkable certificates live here, both phrased in terms of the
//! transition matrix `M` of a morphism and the return words of its fixed
//! point.
//!
//! * [`host_profile`] tabulates the exact lengths `|phi^l(a)|` (column sums
//!   of `M^l`) and `|phi^l(w)|` for sampled return words `w`, together with
//!   the `q`-adic valuations of the latter.  For a primitive aperiodic fixed
//!   point that is `q`-automatic, Host's eigenvalue description forces the
//!   `q`-divisibility of return-word expansion lengths to grow with `l`.
//!
//! * [`eigenvalue_obstruction`] checks, for each `q` up to a bound, whether
//!   the additive eigenvalues `a/q^j` required of a `q`-automatic system
//!   (Dekking) can exist at all.  Rational eigenvalues of the system have
//!   denominators supported on the primes of `det M`; for primes that do
//!   divide the determinant the residue orbit `u M^n mod p^j` is iterated
//!   exactly, and a cycle on which some return word keeps a non-zero residue
//!   certifies that `q`-divisibility can never be attained.
//!
//! Both certificates assume the fixed point is aperiodic; callers must
//! establish that separately (an ultimately periodic word is automatic in
//! every base, and these obstructions do not apply to it).

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::{eigenvector_basis, integer_eigenvalues};
use crate::poly::Rat;
use crate::matrix::{is_primitive, transition_matrix, IntMatrix};
use crate::words::{height, return_words, Morphism, ReturnWordStats};
use crate::{Error, Result};

/// Applicability data shared by the dynamical certificates: determinant,
/// allowed denominator primes, and the integer eigenvalue lattice of `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueConstraint {
    /// Determinant of the transition matrix.
    pub det: BigInt,
    /// True when `det != 0`; the denominator lemma needs an invertible `M`.
    pub invertible: bool,
    /// Primes `p <= q_max` dividing `det`.  Rational additive eigenvalues
    /// have denominators supported on these primes.
    pub allowed_primes: Vec<u64>,
    /// Height of the fixed point (gcd of return-word lengths to the first
    /// letter), when it could be sampled.
    pub height: Option<u64>,
    /// Whether the transition matrix is primitive.
    pub primitive: bool,
    /// Integer eigenvalues of `M`.
    pub integer_eigenvalues: Vec<BigInt>,
    /// Rational eigenvector bases per integer eigenvalue, normalized so the
    /// last coordinate is `1` whenever it is non-zero.
    pub eigenvectors: Vec<(BigInt, Vec<Vec<Rat>>)>,
}

/// Why a base `q` is impossible for the underlying dynamical system.
#[derive(Debug, Clone, PartialEq)]
pub enum ObstructionReason {
    /// Some prime of `q` does not divide `det M`, so no additive eigenvalue
    /// can have a denominator divisible by `p`.
    PrimeNotInDeterminant { p: u64 },
    /// The residue orbit `u M^n mod p^(j+1)` enters a cycle on which the
    /// named return word keeps a non-zero residue, so `p^(j+1)` never
    /// divides all return-word expansion lengths.  Since an admissible
    /// eigenvalue level survives squaring, `j` here is the **largest**
    /// exponent such that `a / p^j` could still be an additive eigenvalue:
    /// every level above it is ruled out, while a `q`-automatic system
    /// would need all of them.
    ResidueStall {
        p: u64,
        j: u32,
        witness: String,
        cycle_len: usize,
    },
}

/// Per-base outcome of the eigenvalue obstruction.
#[derive(Debug, Clone, PartialEq)]
pub enum QObstruction {
    Obstructed(ObstructionReason),
    /// Every prime of `q` divides `det M` and all residue orbits up to
    /// `j_max` collapse to zero, so nothing here rules `q` out.
    NotObstructed,
}

impl QObstruction {
    pub fn is_obstructed(&self) -> bool {
        matches!(self, QObstruction::Obstructed(_))
    }
}

/// Result of [`eigenvalue_obstruction`]: one verdict per base `2..=q_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObstructionReport {
    pub constraint: EigenvalueConstraint,
    pub q_max: u64,
    /// Largest prime power `p^j` probed per prime.
    pub j_max: u32,
    /// Return words used as residue witnesses (possibly empty when the
    /// first letter occurs too rarely to sample).
    pub return_words: Vec<String>,
    pub per_q: Vec<(u64, QObstruction)>,
    /// True when every base in `2..=q_max` is obstructed; together with
    /// primitivity and aperiodicity this certifies non-automaticity in
    /// every base up to `q_max`.
    pub all_q_obstructed: bool,
    /// Strengthens `all_q_obstructed` to every base `q >= 2` whatsoever:
    /// requires every prime factor of `det` to be `<= q_max` and stalled,
    /// so an arbitrary base either contains a prime outside the determinant
    /// or a prime whose residue orbit stalls.
    pub extends_to_all_q: bool,
}

impl ObstructionReport {
    /// Looks up the outcome for a particular base.
    pub fn outcome(&self, q: u64) -> Option<&QObstruction> {
        self.per_q.iter().find(|(b, _)| *b == q).map(|(_, o)| o)
    }
}

/// Tuning knobs for [`eigenvalue_obstruction`].
#[derive(Debug, Clone)]
pub struct ObstructionOptions {
    /// Bases `2..=q_max` are examined.
    pub q_max: u64,
    /// Residue orbits are probed modulo `p^j` for `j <= j_max`.
    pub j_max: u32,
    /// Cap on residue-orbit steps before giving up on a cycle; running out
    /// is treated as "no obstruction found", never as a certificate.
    pub step_cap: usize,
    /// Horizon used to sample return words for residue witnesses.
    pub return_horizon: u64,
}

impl Default for ObstructionOptions {
    fn default() -> Self {
        ObstructionOptions {
            q_max: 64,
            j_max: 6,
            step_cap: 1 << 16,
            return_horizon: 1 << 12,
        }
    }
}

/// Host-style divisibility profile for one candidate base.
#[derive(Debug, Clone, PartialEq)]
pub struct QDivisibility {
    pub q: u64,
    /// `word_valuations[w][l-1]` is the largest `n` with
    /// `q^n | |phi^l(return_word_w)|`, for `l` in `1..=depth`.
    pub word_valuations: Vec<Vec<u32>>,
    /// Pointwise minimum over the sampled words: the binding constraint.
    pub min_valuations: Vec<u32>,
    /// True when the minimum valuation at depth `L` exceeds the one at
    /// `ceil(L/2)` — the divisibility is still climbing, as `q`-automaticity
    /// would demand.
    pub grows: bool,
}

/// Exact expansion-length tables for letters and sampled return words.
#[derive(Debug, Clone, PartialEq)]
pub struct HostProfile {
    pub depth: usize,
    /// `letter_lengths[l][a] = |phi^l(a)|` for `l` in `0..=depth`.
    pub letter_lengths: Vec<Vec<BigInt>>,
    /// Rendered names of the sampled return words, shortest first.
    pub return_words: Vec<String>,
    /// `return_lengths[w][l-1] = |phi^l(w)|` for `l` in `1..=depth`.
    pub return_lengths: Vec<Vec<BigInt>>,
    pub divisibility: Vec<QDivisibility>,
}

/// Renders a symbol-id word using the alphabet's names, separating with a
/// dot when any name is longer than a single character.
fn name_word(m: &Morphism, word: &[u8]) -> String {
    let names: Vec<&str> = word.iter().map(|&a| m.alphabet().name(a)).collect();
    if names.iter().all(|n| n.chars().count() == 1) {
        names.concat()
    } else {
        names.join(".")
    }
}

/// Abelianization of a word: occurrence counts per letter.
fn parikh(word: &[u8], dim: usize) -> Vec<u64> {
    let mut counts = vec![0u64; dim];
    for &a in word {
        counts[a as usize] += 1;
    }
    counts
}

/// Largest `n` with `q^n | x`, for positive `x`.
fn valuation(x: &BigInt, q: u64) -> u32 {
    debug_assert!(x.is_positive());
    let q = BigInt::from(q);
    let mut x = x.clone();
    let mut n = 0;
    while (&x % &q).is_zero() {
        x /= &q;
        n += 1;
    }
    n
}

fn primes_of(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Computes the exact expansion-length tables of `m` up to `depth` and the
/// `q`-adic valuation profile of the sampled return words for each `q` in
/// `qs`.
///
/// Requires a primitive morphism and `depth >= alphabet size + 2` so the
/// valuation comparison spans a non-trivial range.  Aperiodicity of the
/// fixed point is the caller's hypothesis: for a periodic word the profile
/// is meaningless as an automaticity obstruction.
pub fn host_profile(
    m: &Morphism,
    depth: usize,
    sample: &ReturnWordStats,
    qs: &[u64],
) -> Result<HostProfile> {
    let dim = m.alphabet().len();
    if depth < dim + 2 {
        return Err(Error::ParameterInvalid(format!(
            "host profile depth {depth} below alphabet size {dim} + 2"
        )));
    }
    let mat = transition_matrix(m);
    if !is_primitive(&mat) {
        return Err(Error::HypothesisViolated(
            "host profile requires a primitive transition matrix".into(),
        ));
    }
    for q in qs {
        if *q < 2 {
            return Err(Error::ParameterInvalid(format!("base {q} below 2")));
        }
    }

    // letter_lengths[l] = column sums of M^l; powers built incrementally.
    let mut letter_lengths = Vec::with_capacity(depth + 1);
    letter_lengths.push(vec![BigInt::one(); dim]);
    let mut power = IntMatrix::identity(dim);
    for _ in 1..=depth {
        power = power.mul(&mat);
        letter_lengths.push(power.column_sums());
    }

    let words: Vec<&Vec<u8>> = sample.words.iter().collect();
    let mut return_lengths = Vec::with_capacity(words.len());
    for w in &words {
        let counts = parikh(w, dim);
        let mut lens = Vec::with_capacity(depth);
        for table in letter_lengths.iter().skip(1) {
            let mut total = BigInt::zero();
            for (a, c) in counts.iter().enumerate() {
                if *c > 0 {
                    total += table[a].clone() * BigInt::from(*c);
                }
            }
            lens.push(total);
        }
        return_lengths.push(lens);
    }

    let mut divisibility = Vec::with_capacity(qs.len());
    for &q in qs {
        let word_valuations: Vec<Vec<u32>> = return_lengths
            .iter()
            .map(|lens| lens.iter().map(|x| valuation(x, q)).collect())
            .collect();
        let min_valuations: Vec<u32> = (0..depth)
            .map(|l| {
                word_valuations
                    .iter()
                    .map(|vs| vs[l])
                    .min()
                    .unwrap_or(0)
            })
            .collect();
        let mid = depth.div_ceil(2);
        let grows = !min_valuations.is_empty()
            && min_valuations[depth - 1] > min_valuations[mid - 1];
        divisibility.push(QDivisibility {
            q,
            word_valuations,
            min_valuations,
            grows,
        });
    }

    Ok(HostProfile {
        depth,
        letter_lengths,
        return_words: words.iter().map(|w| name_word(m, w)).collect(),
        return_lengths,
        divisibility,
    })
}

/// Reduces the transition matrix modulo `modulus` into flat `u64` entries.
fn reduce_matrix(mat: &IntMatrix, modulus: u64) -> Vec<u64> {
    let dim = mat.dim();
    let m = BigInt::from(modulus);
    let mut out = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            let mut r = mat.get(i, j) % &m;
            if r.is_negative() {
                r += &m;
            }
            out.push(r.to_u64().expect("residue below a u64 modulus"));
        }
    }
    out
}

/// Iterates the row vector `u M^n mod p^j` (`u` all ones) until the orbit
/// cycles, then reports the first sampled return word whose residue stays
/// non-zero somewhere on the cycle, together with that residue, if any.
///
/// `None` means every sampled word's residue dies on the cycle (or no cycle
/// was found within the step cap) — no obstruction can be claimed.
fn residue_stall(
    mat: &IntMatrix,
    modulus: u64,
    parikhs: &[Vec<u64>],
    step_cap: usize,
) -> Option<(usize, usize, u64)> {
    let dim = mat.dim();
    let mm = reduce_matrix(mat, modulus);
    let mut trajectory: Vec<Vec<u64>> = vec![vec![1 % modulus; dim]];
    let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
    seen.insert(trajectory[0].clone(), 0);
    let cycle_start = loop {
        if trajectory.len() > step_cap {
            return None;
        }
        let r = trajectory.last().expect("non-empty trajectory");
        let mut next = vec![0u64; dim];
        for (j, slot) in next.iter_mut().enumerate() {
            let mut acc = 0u128;
            for i in 0..dim {
                acc += r[i] as u128 * mm[i * dim + j] as u128;
            }
            *slot = (acc % modulus as u128) as u64;
        }
        if let Some(&s) = seen.get(&next) {
            break s;
        }
        seen.insert(next.clone(), trajectory.len());
        trajectory.push(next);
    };
    let cycle = &trajectory[cycle_start..];
    for (w, counts) in parikhs.iter().enumerate() {
        for state in cycle {
            let mut acc = 0u128;
            for (r, c) in state.iter().zip(counts) {
                acc += *r as u128 * (*c % modulus) as u128;
            }
            let residue = (acc % modulus as u128) as u64;
            if residue != 0 {
                return Some((w, cycle.len(), residue));
            }
        }
    }
    None
}

/// Decides, for every base `q` in `2..=q_max`, whether the additive
/// eigenvalues a `q`-automatic system must carry are impossible for the
/// fixed point of `m`.
///
/// Errors with [`Error::SingularMatrix`] when `det M = 0` (the denominator
/// lemma needs an invertible matrix) and with [`Error::HeightNotOne`] when
/// the sampled height exceeds one.  Primitivity and aperiodicity are
/// recorded/assumed, not enforced: the report's applicability flags say
/// whether the certificate's hypotheses were met.
pub fn eigenvalue_obstruction(
    m: &Morphism,
    opts: &ObstructionOptions,
) -> Result<ObstructionReport> {
    let mat = transition_matrix(m);
    let dim = mat.dim();
    let det = mat.det();
    if det.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let primitive = is_primitive(&mat);

    // Height and return-word sampling need at least two occurrences of the
    // first letter; a degenerate fixed point simply yields no witnesses.
    let mut sampled_height = None;
    let mut sample_words: Vec<Vec<u8>> = Vec::new();
    if let Ok(est) = height(m, opts.return_horizon) {
        sampled_height = Some(est.gcd);
        if est.gcd != 1 {
            return Err(Error::HeightNotOne(est.gcd));
        }
        let mut view = crate::words::expand_letters(m, opts.return_horizon)?;
        let first = view.symbols()[0];
        if let Ok(stats) = return_words(&mut view, first, opts.return_horizon) {
            sample_words = stats.words;
        }
    }
    let parikhs: Vec<Vec<u64>> = sample_words.iter().map(|w| parikh(w, dim)).collect();

    let allowed_primes: Vec<u64> = (2..=opts.q_max)
        .filter(|p| primes_of(*p) == vec![*p])
        .filter(|p| (&det % BigInt::from(*p)).is_zero())
        .collect();

    let eigenvalues = integer_eigenvalues(&mat)?;
    let mut eigenvectors = Vec::with_capacity(eigenvalues.len());
    for lambda in &eigenvalues {
        let basis: Vec<Vec<Rat>> = eigenvector_basis(&mat, lambda)
            .into_iter()
            .map(|mut v| {
                let last = v.last().cloned().unwrap_or_else(Rat::zero);
                if !last.is_zero() {
                    for e in &mut v {
                        *e /= last.clone();
                    }
                }
                v
            })
            .collect();
        eigenvectors.push((lambda.clone(), basis));
    }

    // One verdict per prime <= q_max, memoized: a base is obstructed as
    // soon as one of its primes is.
    let mut prime_verdicts: HashMap<u64, Option<ObstructionReason>> = HashMap::new();
    let mut verdict_for_prime = |p: u64| -> Option<ObstructionReason> {
        if let Some(v) = prime_verdicts.get(&p) {
            return v.clone();
        }
        let verdict = if !(&det % BigInt::from(p)).is_zero() {
            Some(ObstructionReason::PrimeNotInDeterminant { p })
        } else {
            let mut found = None;
            for level in 1..=opts.j_max {
                let modulus = p.pow(level);
                if let Some((w, cycle_len, residue)) =
                    residue_stall(&mat, modulus, &parikhs, opts.step_cap)
                {
                    // The stall at p^level rules out denominator exponents
                    // >= level, leaving level - 1 as the largest admissible.
                    found = Some(ObstructionReason::ResidueStall {
                        p,
                        j: level - 1,
                        witness: format!(
                            "return word `{}` keeps expansion-length residue \
                             {residue} (mod {modulus}) on the orbit cycle",
                            name_word(m, &sample_words[w])
                        ),
                        cycle_len,
                    });
                    break;
                }
            }
            found
        };
        prime_verdicts.insert(p, verdict.clone());
        verdict
    };

    let mut per_q = Vec::with_capacity(opts.q_max as usize - 1);
    for q in 2..=opts.q_max {
        let mut outcome = QObstruction::NotObstructed;
        for p in primes_of(q) {
            if let Some(reason) = verdict_for_prime(p) {
                outcome = QObstruction::Obstructed(reason);
                break;
            }
        }
        per_q.push((q, outcome));
    }
    let all_q_obstructed = per_q.iter().all(|(_, o)| o.is_obstructed());

    // An arbitrary base q >= 2 is obstructed whenever each of its primes is
    // either outside det or stalled; that covers every base exactly when
    // det has no prime factor beyond q_max and all of its primes stall.
    let mut extends_to_all_q = all_q_obstructed;
    if extends_to_all_q {
        let mut cofactor = det.abs();
        for p in &allowed_primes {
            let big = BigInt::from(*p);
            while (&cofactor % &big).is_zero() {
                cofactor /= &big;
            }
        }
        if !cofactor.is_one() {
            extends_to_all_q = false;
        }
    }

    Ok(ObstructionReport {
        constraint: EigenvalueConstraint {
            det,
            invertible: true,
            allowed_primes,
            height: sampled_height,
            primitive,
            integer_eigenvalues: eigenvalues,
            eigenvectors,
        },
        q_max: opts.q_max,
        j_max: opts.j_max,
        return_words: sample_words.iter().map(|w| name_word(m, w)).collect(),
        per_q,
        all_q_obstructed,
        extends_to_all_q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalogue;
    use crate::words::expand_letters;

    fn sample(m: &Morphism, horizon: u64) -> ReturnWordStats {
        let mut view = expand_letters(m, horizon).expect("expandable");
        let first = view.symbols()[0];
        return_words(&mut view, first, horizon).expect("sampleable")
    }

    /// Applies the raw rewriting rules `l` times to a single letter and
    /// returns the length, as an oracle for the matrix-power tables.
    fn literal_length(m: &Morphism, letter: u8, l: usize) -> u64 {
        let mut word = vec![letter];
        for _ in 0..l {
            let mut next = Vec::new();
            for &a in &word {
                next.extend_from_slice(m.image(a));
            }
            word = next;
        }
        word.len() as u64
    }

    #[test]
    fn letter_lengths_match_literal_expansion() {
        for (name, m) in [
            ("thue_morse", catalogue::thue_morse()),
            ("fibonacci", catalogue::fibonacci_word()),
            ("m_2_211", catalogue::m_2_211()),
            ("m_aaab", catalogue::m_aaab_aaabaaab()),
        ] {
            let profile =
                host_profile(&m, 6, &sample(&m, 1 << 10), &[2]).expect("profile");
            for l in 0..=4usize {
                for a in 0..m.alphabet().len() {
                    assert_eq!(
                        profile.letter_lengths[l][a],
                        BigInt::from(literal_length(&m, a as u8, l)),
                        "{name}: |phi^{l}({a})|"
                    );
                }
            }
        }
    }

    #[test]
    fn aaab_length_formulas_and_five_divisibility() {
        let m = catalogue::m_aaab_aaabaaab();
        let depth = 12;
        let profile =
            host_profile(&m, depth, &sample(&m, 1 << 10), &[5, 2]).expect("profile");
        for n in 1..=depth {
            let five = BigInt::from(5).pow(n as u32 - 1);
            assert_eq!(profile.letter_lengths[n][0], BigInt::from(4) * &five);
            assert_eq!(profile.letter_lengths[n][1], BigInt::from(8) * &five);
        }
        let d5 = &profile.divisibility[0];
        assert!(d5.grows, "5-divisibility should climb with depth");
        for l in 1..depth {
            assert!(
                d5.min_valuations[l] >= d5.min_valuations[l - 1],
                "monotone after stabilization"
            );
        }
        assert_eq!(d5.min_valuations[depth - 1], depth as u32 - 1);
    }

    #[test]
    fn thue_morse_two_divisibility_grows() {
        let m = catalogue::thue_morse();
        let profile = host_profile(&m, 10, &sample(&m, 1 << 10), &[2]).expect("profile");
        let d2 = &profile.divisibility[0];
        assert!(d2.grows);
        // |phi^l(w)| = |w| * 2^l, so the minimum valuation is exactly l once
        // a return word of odd length is in the sample ("0" always is).
        assert!(profile.return_words.contains(&"0".to_string()));
        for l in 1..=10usize {
            assert_eq!(d2.min_valuations[l - 1], l as u32);
        }
    }

    #[test]
    fn m_2_211_two_divisibility_stalls() {
        let m = catalogue::m_2_211();
        let profile = host_profile(&m, 10, &sample(&m, 1 << 10), &[2]).expect("profile");
        let d2 = &profile.divisibility[0];
        assert!(!d2.grows, "odd return words pin the 2-valuation at zero");
        assert!(d2.min_valuations.iter().all(|&v| v == 0));
    }

    #[test]
    fn host_profile_rejects_shallow_depth_and_imprimitive_inputs() {
        let m = catalogue::thue_morse();
        let s = sample(&m, 1 << 10);
        assert!(matches!(
            host_profile(&m, 3, &s, &[2]),
            Err(Error::ParameterInvalid(_))
        ));
        let v = catalogue::tm_variant_01_11();
        let sv = ReturnWordStats {
            target: 0,
            target_symbol: "0".into(),
            lengths: Default::default(),
            gcd: 0,
            occurrences: 1,
            horizon: 0,
            words: Vec::new(),
        };
        assert!(matches!(
            host_profile(&v, 8, &sv, &[2]),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn fibonacci_unit_determinant_obstructs_every_base() {
        let m = catalogue::fibonacci_word();
        let report = eigenvalue_obstruction(&m, &ObstructionOptions::default())
            .expect("report");
        assert_eq!(report.constraint.det, BigInt::from(-1));
        assert!(report.constraint.allowed_primes.is_empty());
        assert!(report.all_q_obstructed);
        assert!(report.extends_to_all_q, "unit determinant rules out every base");
        for (q, o) in &report.per_q {
            match o {
                QObstruction::Obstructed(ObstructionReason::PrimeNotInDeterminant {
                    p,
                }) => {
                    assert_eq!(q % p, 0, "witness prime divides the base")
                }
                other => panic!("base {q}: expected determinant obstruction, got {other:?}"),
            }
        }
    }

    #[test]
    fn m_2_211_residue_stall_obstructs_every_base() {
        let m = catalogue::m_2_211();
        let report = eigenvalue_obstruction(&m, &ObstructionOptions::default())
            .expect("report");
        assert_eq!(report.constraint.det, BigInt::from(-2));
        assert_eq!(report.constraint.allowed_primes, vec![2]);
        assert_eq!(report.constraint.height, Some(1));
        assert!(report.constraint.primitive);
        match report.outcome(2).expect("q = 2 present") {
            QObstruction::Obstructed(ObstructionReason::ResidueStall {
                p, j, witness, ..
            }) => {
                // The stall already fires modulo 2^1, so no denominator
                // exponent beyond 0 survives: the largest admissible j is 0.
                assert_eq!((*p, *j), (2, 0));
                assert!(
                    witness.contains("residue 1 (mod 2)"),
                    "witness must exhibit the odd numerator: {witness}"
                );
            }
            other => panic!("expected residue stall at 2, got {other:?}"),
        }
        match report.outcome(3).expect("q = 3 present") {
            QObstruction::Obstructed(ObstructionReason::PrimeNotInDeterminant { p }) => {
                assert_eq!(*p, 3)
            }
            other => panic!("expected determinant obstruction at 3, got {other:?}"),
        }
        assert!(report.all_q_obstructed);
        assert!(
            report.extends_to_all_q,
            "det -2 has only the stalled prime 2, so every base is out"
        );
    }

    #[test]
    fn tm_variant_passes_at_two_despite_being_checkable() {
        let m = catalogue::tm_variant_01_11();
        let report = eigenvalue_obstruction(&m, &ObstructionOptions::default())
            .expect("report");
        assert_eq!(report.constraint.det, BigInt::from(2));
        assert!(!report.constraint.primitive, "hypothesis flag must be visible");
        assert_eq!(report.outcome(2), Some(&QObstruction::NotObstructed));
        assert_eq!(report.outcome(4), Some(&QObstruction::NotObstructed));
        assert!(!report.all_q_obstructed);
    }

    #[test]
    fn uniform_builtins_are_never_obstructed_in_their_own_base() {
        for (i, m) in catalogue::uniform_aperiodic().into_iter().enumerate() {
            let q = m.image(0).len() as u64;
            match eigenvalue_obstruction(&m, &ObstructionOptions::default()) {
                Err(Error::SingularMatrix) => {} // constraint does not apply
                Err(e) => panic!("entry {i}: unexpected error {e}"),
                Ok(report) => {
                    assert_eq!(
                        report.outcome(q),
                        Some(&QObstruction::NotObstructed),
                        "entry {i} is {q}-automatic and must not be obstructed at {q}"
                    );
                }
            }
        }
    }

    #[test]
    fn thue_morse_matrix_is_singular_for_the_obstruction() {
        let m = catalogue::thue_morse();
        assert!(matches!(
            eigenvalue_obstruction(&m, &ObstructionOptions::default()),
            Err(Error::SingularMatrix)
        ));
    }

    #[test]
    fn eigenvector_lattice_is_normalized() {
        let m = catalogue::m_2_211();
        let report = eigenvalue_obstruction(&m, &ObstructionOptions::default())
            .expect("report");
        let mut eigs = report.constraint.integer_eigenvalues.clone();
        eigs.sort();
        assert_eq!(eigs, vec![BigInt::from(-1), BigInt::from(2)]);
        for (_, basis) in &report.constraint.eigenvectors {
            for v in basis {
                let last = v.last().expect("non-empty vector");
                assert!(last.is_zero() || last.is_one());
            }
        }
    }
}
