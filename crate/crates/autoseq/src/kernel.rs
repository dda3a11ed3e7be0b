//! q-kernel machinery: certified lower bounds on the number of distinct
//! kernel sequences of a prefix, targeted kernel families, and DFAO
//! construction/minimization for uniform morphisms.
//!
//! The q-kernel of a sequence a is the set of subsequences
//! n -> a(q^k n + r) with k >= 0 and 0 <= r < q^k.  The sequence is
//! q-automatic exactly when this set is finite, so:
//!
//! * two kernel elements that disagree at a witnessed index are *certified*
//!   distinct — the witness can be re-checked by anyone with the prefix;
//! * two kernel elements that agree on every inspected point are only
//!   *plausibly* equal, and this module never claims more.
//!
//! [`kernel_lower_bound`] therefore reports a certified lower bound (the
//! number of pairwise-witnessed classes), never an upper bound.

use std::collections::BTreeMap;

use crate::words::{Morphism, PrefixView};
use crate::{Error, Result};

/// Number of worker threads: `AUTOSEQ_THREADS` when set to a positive
/// integer, otherwise the machine's available parallelism.
pub(crate) fn thread_count() -> usize {
    std::env::var("AUTOSEQ_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
        .min(64)
}

// ---------------------------------------------------------------------------
// Kernel class separation.
// ---------------------------------------------------------------------------

/// Tuning knobs for [`kernel_lower_bound`].
#[derive(Debug, Clone)]
pub struct KernelOptions {
    /// Largest k to scan (clamped down when the horizon cannot index
    /// q^k at all).
    pub k_max: u32,
    /// Prefix length to inspect.
    pub horizon: u64,
    /// Stop after this many distinct classes have been separated.
    pub rep_cap: usize,
    /// At each level k, scan residues r = 0 .. min(q^k, r_cap).
    pub r_cap: u64,
    /// Comparisons with fewer shared points than this are recorded as
    /// insufficient instead of deciding equality.
    pub min_points: u64,
    /// Cap on comparison points per kernel element.
    pub max_points: u64,
    /// Worker threads; `None` reads `AUTOSEQ_THREADS` / machine default.
    pub threads: Option<usize>,
}

impl Default for KernelOptions {
    fn default() -> KernelOptions {
        KernelOptions {
            k_max: 8,
            horizon: 1 << 16,
            rep_cap: 64,
            r_cap: 256,
            min_points: 8,
            max_points: 1 << 16,
            threads: None,
        }
    }
}

/// A kernel element: the subsequence n -> a(q^k n + r).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct KernelRep {
    pub k: u32,
    pub r: u64,
}

/// A verified disagreement between two kernel elements: the sequences
/// a(q^{k_left} n + r_left) and a(q^{k_right} n + r_right) differ at n = at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistinctWitness {
    pub left: KernelRep,
    pub right: KernelRep,
    pub at: u64,
    pub left_value: u8,
    pub right_value: u8,
}

/// Result of a kernel separation run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelEstimate {
    pub q: u64,
    /// Certified lower bound: number of pairwise-witnessed classes.
    pub distinct_classes: usize,
    /// One representative per class, in discovery order; element 0 is the
    /// sequence itself for grid scans.
    pub representatives: Vec<KernelRep>,
    /// A witness for every unordered pair of representatives.
    pub witnesses: Vec<DistinctWitness>,
    /// Comparisons skipped because fewer than `min_points` shared points
    /// were available.
    pub insufficient_pairs: usize,
    /// Candidates whose class could not be decided because some comparison
    /// was insufficient; they are *not* counted as distinct.
    pub ambiguous_candidates: usize,
    pub candidates_examined: usize,
    /// Largest k actually scanned.
    pub k_max_used: u32,
    /// Whether the scan stopped early at `rep_cap`.
    pub capped: bool,
    /// Horizon actually available.
    pub horizon: u64,
    /// The diagonal sequence a(q^k - 1) for k = 0, 1, ... while inside the
    /// horizon.
    pub diagonal: Vec<u8>,
}

struct RepData {
    rep: KernelRep,
    samples: Vec<u8>,
}

fn sample(seq: &[u8], q_pow: u64, r: u64, cap: u64) -> Vec<u8> {
    let h = seq.len() as u64;
    if r >= h {
        return Vec::new();
    }
    let count = ((h - 1 - r) / q_pow + 1).min(cap);
    (0..count)
        .map(|n| seq[(q_pow * n + r) as usize])
        .collect()
}

enum CmpOutcome {
    Equal,
    Distinct { at: u64, left: u8, right: u8 },
    Insufficient,
}

fn compare(a: &RepData, b: &RepData, min_points: u64) -> CmpOutcome {
    let n = a.samples.len().min(b.samples.len());
    if (n as u64) < min_points {
        return CmpOutcome::Insufficient;
    }
    for i in 0..n {
        if a.samples[i] != b.samples[i] {
            return CmpOutcome::Distinct {
                at: i as u64,
                left: a.samples[i],
                right: b.samples[i],
            };
        }
    }
    CmpOutcome::Equal
}

/// Compares a candidate against every representative; deterministic
/// regardless of thread count.
fn compare_against_all(
    cand: &RepData,
    reps: &[RepData],
    min_points: u64,
    threads: usize,
) -> Vec<CmpOutcome> {
    let work = reps.len() * cand.samples.len();
    let t = threads.min(reps.len());
    if t <= 1 || work < (1 << 18) {
        return reps.iter().map(|r| compare(cand, r, min_points)).collect();
    }
    let mut out: Vec<Option<CmpOutcome>> = Vec::new();
    out.resize_with(reps.len(), || None);
    let chunk = reps.len().div_ceil(t);
    std::thread::scope(|s| {
        for (slots, rep_chunk) in out.chunks_mut(chunk).zip(reps.chunks(chunk)) {
            s.spawn(move || {
                for (slot, r) in slots.iter_mut().zip(rep_chunk) {
                    *slot = Some(compare(cand, r, min_points));
                }
            });
        }
    });
    out.into_iter().map(|o| o.expect("chunk covered")).collect()
}

/// Shared classification engine: folds candidate kernel elements into
/// witnessed classes.
struct ClassEngine<'a> {
    seq: &'a [u8],
    q: u64,
    min_points: u64,
    max_points: u64,
    threads: usize,
    reps: Vec<RepData>,
    witnesses: Vec<DistinctWitness>,
    insufficient_pairs: usize,
    ambiguous_candidates: usize,
    candidates_examined: usize,
}

enum Placement {
    #[allow(dead_code)] // which class a candidate merged into aids debugging
    MergedInto(usize),
    NewClass,
    Ambiguous,
    TooFewPoints,
}

impl<'a> ClassEngine<'a> {
    fn new(seq: &'a [u8], q: u64, min_points: u64, max_points: u64, threads: usize) -> Self {
        ClassEngine {
            seq,
            q,
            min_points,
            max_points,
            threads,
            reps: Vec::new(),
            witnesses: Vec::new(),
            insufficient_pairs: 0,
            ambiguous_candidates: 0,
            candidates_examined: 0,
        }
    }

    fn offer(&mut self, k: u32, r: u64) -> Placement {
        self.candidates_examined += 1;
        let q_pow = match self.q.checked_pow(k) {
            Some(p) => p,
            None => return Placement::TooFewPoints,
        };
        let cand = RepData {
            rep: KernelRep { k, r },
            samples: sample(self.seq, q_pow, r, self.max_points),
        };
        if (cand.samples.len() as u64) < self.min_points {
            self.ambiguous_candidates += 1;
            return Placement::TooFewPoints;
        }
        let outcomes = compare_against_all(&cand, &self.reps, self.min_points, self.threads);
        if let Some(i) = outcomes
            .iter()
            .position(|o| matches!(o, CmpOutcome::Equal))
        {
            return Placement::MergedInto(i);
        }
        let insufficient = outcomes
            .iter()
            .filter(|o| matches!(o, CmpOutcome::Insufficient))
            .count();
        if insufficient > 0 {
            self.insufficient_pairs += insufficient;
            self.ambiguous_candidates += 1;
            return Placement::Ambiguous;
        }
        for (i, o) in outcomes.iter().enumerate() {
            // `compare(cand, rep)` labels the candidate `left`; the stored
            // witness is oriented the other way (left = established rep).
            if let CmpOutcome::Distinct { at, left, right } = o {
                self.witnesses.push(DistinctWitness {
                    left: self.reps[i].rep,
                    right: cand.rep,
                    at: *at,
                    left_value: *right,
                    right_value: *left,
                });
            }
        }
        self.reps.push(cand);
        Placement::NewClass
    }

    fn finish(self, q: u64, k_max_used: u32, capped: bool, horizon: u64) -> KernelEstimate {
        let diagonal = diagonal_sequence(self.seq, q);
        KernelEstimate {
            q,
            distinct_classes: self.reps.len(),
            representatives: self.reps.iter().map(|r| r.rep).collect(),
            witnesses: self.witnesses,
            insufficient_pairs: self.insufficient_pairs,
            ambiguous_candidates: self.ambiguous_candidates,
            candidates_examined: self.candidates_examined,
            k_max_used,
            capped,
            horizon,
            diagonal,
        }
    }
}

/// The diagonal sequence a(q^k - 1), k = 0, 1, ..., while q^k - 1 stays
/// inside the prefix.
fn diagonal_sequence(seq: &[u8], q: u64) -> Vec<u8> {
    let mut out = Vec::new();
    let mut q_pow: u64 = 1;
    loop {
        let idx = q_pow - 1;
        if idx >= seq.len() as u64 {
            break;
        }
        out.push(seq[idx as usize]);
        q_pow = match q_pow.checked_mul(q) {
            Some(p) => p,
            None => break,
        };
    }
    out
}

/// Greedy breadth-first kernel separation: scans kernel elements (k, r)
/// with k ascending and r ascending within each level, folding them into
/// pairwise-witnessed classes.  The result's `distinct_classes` is a
/// certified lower bound on the size of the q-kernel of the sequence.
pub fn kernel_lower_bound(
    view: &mut PrefixView,
    q: u64,
    opts: &KernelOptions,
) -> Result<KernelEstimate> {
    if q < 2 {
        return Err(Error::ParameterInvalid(format!(
            "kernel base must be at least 2, got {q}"
        )));
    }
    let horizon = view.ensure_up_to(opts.horizon)?;
    if horizon < 2 * q {
        return Err(Error::HorizonTooSmall {
            needed: 2 * q,
            got: horizon,
        });
    }
    // Clamp k so that q^k can be indexed at least twice.
    let mut k_max_used = 0;
    while k_max_used < opts.k_max {
        match q.checked_pow(k_max_used + 1) {
            Some(p) if 2 * p <= horizon => k_max_used += 1,
            _ => break,
        }
    }

    let threads = opts.threads.unwrap_or_else(thread_count);
    let seq = view.symbols();
    let mut engine = ClassEngine::new(seq, q, opts.min_points, opts.max_points, threads);
    let mut capped = false;
    'scan: for k in 0..=k_max_used {
        let q_pow = q.pow(k);
        let r_hi = q_pow.min(opts.r_cap);
        for r in 0..r_hi {
            engine.offer(k, r);
            if engine.reps.len() >= opts.rep_cap {
                capped = true;
                break 'scan;
            }
        }
    }
    Ok(engine.finish(q, k_max_used, capped, horizon))
}

/// A parameterized family of kernel elements to compare directly, used to
/// exhibit many distinct kernel classes without scanning the full grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KernelFamily {
    /// (k, r) for every k in 1..=k_max with the same residue r (skipping
    /// levels with r >= q^k).
    Constant(u64),
    /// r = q^k - k at each level k in 1..=k_max.
    QkMinusK,
    /// r = q^k - 1 at each level.
    QkMinus1,
    /// Explicit list of (k, r) pairs.
    Custom(Vec<(u32, u64)>),
}

impl KernelFamily {
    fn members(&self, q: u64, k_max: u32) -> Result<Vec<(u32, u64)>> {
        let mut out = Vec::new();
        match self {
            KernelFamily::Constant(r) => {
                for k in 1..=k_max {
                    if let Some(p) = q.checked_pow(k) {
                        if *r < p {
                            out.push((k, *r));
                        }
                    }
                }
            }
            KernelFamily::QkMinusK => {
                for k in 1..=k_max {
                    if let Some(p) = q.checked_pow(k) {
                        if u64::from(k) <= p {
                            out.push((k, p - u64::from(k)));
                        }
                    }
                }
            }
            KernelFamily::QkMinus1 => {
                for k in 1..=k_max {
                    if let Some(p) = q.checked_pow(k) {
                        out.push((k, p - 1));
                    }
                }
            }
            KernelFamily::Custom(pairs) => {
                for &(k, r) in pairs {
                    let p = q.checked_pow(k).ok_or_else(|| {
                        Error::ParameterInvalid(format!("q^{k} overflows for q = {q}"))
                    })?;
                    if r >= p {
                        return Err(Error::ParameterInvalid(format!(
                            "residue {r} is not below q^{k} = {p}"
                        )));
                    }
                    out.push((k, r));
                }
            }
        }
        Ok(out)
    }
}

/// Separates the kernel elements of an explicit family into witnessed
/// classes.  `distinct_classes` again counts only pairwise-witnessed
/// classes, so it is a certified lower bound on the q-kernel size.
pub fn targeted_kernel_family(
    view: &mut PrefixView,
    q: u64,
    family: &KernelFamily,
    k_max: u32,
    horizon: u64,
    threads: Option<usize>,
) -> Result<KernelEstimate> {
    if q < 2 {
        return Err(Error::ParameterInvalid(format!(
            "kernel base must be at least 2, got {q}"
        )));
    }
    let horizon = view.ensure_up_to(horizon)?;
    if horizon < 2 * q {
        return Err(Error::HorizonTooSmall {
            needed: 2 * q,
            got: horizon,
        });
    }
    let members = family.members(q, k_max)?;
    let opts = KernelOptions::default();
    let threads = threads.unwrap_or_else(thread_count);
    let seq = view.symbols();
    let mut engine = ClassEngine::new(seq, q, opts.min_points, opts.max_points, threads);
    for (k, r) in members {
        engine.offer(k, r);
    }
    Ok(engine.finish(q, k_max, false, horizon))
}

// ---------------------------------------------------------------------------
// DFAOs for uniform morphisms.
// ---------------------------------------------------------------------------

/// Deterministic finite automaton with output, reading base-q digits most
/// significant first.  Since delta(start, 0) = start for automata built
/// from prolongable uniform morphisms, leading zeros are harmless.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfao {
    pub q: u64,
    pub start: usize,
    /// delta[state][digit].
    pub delta: Vec<Vec<usize>>,
    /// Output id per state (indexes `output_names`).
    pub outputs: Vec<u8>,
    pub output_names: Vec<String>,
}

impl Dfao {
    pub fn states(&self) -> usize {
        self.delta.len()
    }

    /// Output id at index n.
    pub fn eval(&self, n: u64) -> u8 {
        let mut digits = Vec::new();
        let mut m = n;
        loop {
            digits.push((m % self.q) as usize);
            m /= self.q;
            if m == 0 {
                break;
            }
        }
        let mut state = self.start;
        for &d in digits.iter().rev() {
            state = self.delta[state][d];
        }
        self.outputs[state]
    }

    pub fn eval_name(&self, n: u64) -> &str {
        &self.output_names[self.eval(n) as usize]
    }
}

/// Builds the canonical DFAO of a q-uniform prolongable morphism: states
/// are letters, delta(s, d) is the d-th letter of the image of s, and the
/// output of a state is its coding value.  The automaton computes the coded
/// fixed point: state after reading the base-q digits of n (MSD first) from
/// the start letter is the n-th letter of the fixed point.
pub fn dfao_from_uniform(m: &Morphism) -> Result<Dfao> {
    let q = m
        .uniform_length()
        .ok_or_else(|| Error::NotUniform("images have unequal lengths".into()))? as u64;
    if q < 2 {
        return Err(Error::NotUniform(
            "uniform length must be at least 2 for a digit automaton".into(),
        ));
    }
    let start_img = m.image(m.start());
    if start_img.first() != Some(&m.start()) {
        return Err(Error::NotProlongable(format!(
            "image of `{}` does not begin with it",
            m.alphabet().name(m.start())
        )));
    }
    // Mirror the output-alphabet construction of `words::expand`: distinct
    // coding values in letter-index order.
    let n_letters = m.alphabet().len();
    let mut output_names: Vec<String> = Vec::new();
    let mut outputs = vec![0u8; n_letters];
    for a in 0..n_letters {
        let name = m.code(a as u8);
        match output_names.iter().position(|s| s == name) {
            Some(i) => outputs[a] = i as u8,
            None => {
                outputs[a] = output_names.len() as u8;
                output_names.push(name.to_string());
            }
        }
    }
    let delta = (0..n_letters)
        .map(|a| m.image(a as u8).iter().map(|&b| b as usize).collect())
        .collect();
    Ok(Dfao {
        q,
        start: m.start() as usize,
        delta,
        outputs,
        output_names,
    })
}

/// Moore minimization: drops unreachable states, merges output-and-
/// transition-equivalent ones, and renumbers states canonically (breadth
/// first from the start, digits in ascending order).  Idempotent, and a
/// deterministic function of the automaton's language.
pub fn minimize(d: &Dfao) -> Dfao {
    // Reachable states in BFS digit order.
    let mut order = vec![d.start];
    let mut seen = vec![false; d.states()];
    seen[d.start] = true;
    let mut i = 0;
    while i < order.len() {
        let s = order[i];
        i += 1;
        for &t in &d.delta[s] {
            if !seen[t] {
                seen[t] = true;
                order.push(t);
            }
        }
    }

    // Initial partition by output, refined by transition signatures.
    let mut class = vec![usize::MAX; d.states()];
    let mut next_class = 0;
    let mut by_output: BTreeMap<u8, usize> = BTreeMap::new();
    for &s in &order {
        let c = *by_output.entry(d.outputs[s]).or_insert_with(|| {
            let c = next_class;
            next_class += 1;
            c
        });
        class[s] = c;
    }
    loop {
        let mut sig_to_class: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
        let mut new_class = vec![usize::MAX; d.states()];
        let mut count = 0;
        for &s in &order {
            let sig = (
                class[s],
                d.delta[s].iter().map(|&t| class[t]).collect::<Vec<_>>(),
            );
            let c = *sig_to_class.entry(sig).or_insert_with(|| {
                let c = count;
                count += 1;
                c
            });
            new_class[s] = c;
        }
        let stable = count == next_class;
        class = new_class;
        next_class = count;
        if stable {
            break;
        }
    }

    // Canonical renumbering: BFS over classes from the start class.
    let repr_of_class = {
        let mut repr = vec![usize::MAX; next_class];
        for &s in order.iter().rev() {
            repr[class[s]] = s;
        }
        repr
    };
    let mut renum = vec![usize::MAX; next_class];
    let mut new_order = vec![class[d.start]];
    renum[class[d.start]] = 0;
    let mut i = 0;
    while i < new_order.len() {
        let c = new_order[i];
        i += 1;
        let s = repr_of_class[c];
        for &t in &d.delta[s] {
            let tc = class[t];
            if renum[tc] == usize::MAX {
                renum[tc] = new_order.len();
                new_order.push(tc);
            }
        }
    }

    let n = new_order.len();
    let mut delta = vec![Vec::new(); n];
    let mut outputs = vec![0u8; n];
    for (new_id, &c) in new_order.iter().enumerate() {
        let s = repr_of_class[c];
        delta[new_id] = d.delta[s].iter().map(|&t| renum[class[t]]).collect();
        outputs[new_id] = d.outputs[s];
    }
    Dfao {
        q: d.q,
        start: 0,
        delta,
        outputs,
        output_names: d.output_names.clone(),
    }
}
