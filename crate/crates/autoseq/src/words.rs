//! Alphabets, morphisms, and lazy fixed-point expansion.
//!
//! A [`Morphism`] maps every letter of a finite alphabet to a word over the
//! same alphabet.  When the image of the start letter begins with that letter
//! and keeps growing, iterating the morphism converges to an infinite fixed
//! point; [`expand`] materializes any prefix of it (optionally pushed through
//! a letter-to-letter coding) as a [`PrefixView`].
//!
//! Letters are stored as `u8` indices into an [`Alphabet`]; alphabets are
//! capped at 255 symbols, which is far beyond anything the analyses need.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::{Error, Result};

/// Maximum number of symbols in any alphabet (letter ids are `u8`).
pub const MAX_ALPHABET: usize = 255;

/// An ordered set of distinct symbols with O(1) lookup in both directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, u8>,
}

impl Alphabet {
    /// Builds an alphabet from symbol names, which must be distinct and
    /// non-empty.
    pub fn new<S: AsRef<str>>(symbols: &[S]) -> Result<Alphabet> {
        if symbols.len() > MAX_ALPHABET {
            return Err(Error::AlphabetTooLarge(symbols.len()));
        }
        if symbols.is_empty() {
            return Err(Error::ParameterInvalid("alphabet is empty".into()));
        }
        let mut index = HashMap::new();
        let mut list = Vec::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            let s = s.as_ref();
            if s.is_empty() {
                return Err(Error::ParameterInvalid("empty symbol".into()));
            }
            if index.insert(s.to_string(), i as u8).is_some() {
                return Err(Error::ParameterInvalid(format!("duplicate symbol `{s}`")));
            }
            list.push(s.to_string());
        }
        Ok(Alphabet {
            symbols: list,
            index,
        })
    }

    /// Number of symbols.
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// The name of symbol `id`.
    pub fn name(&self, id: u8) -> &str {
        &self.symbols[id as usize]
    }

    /// All symbol names in order.
    pub fn names(&self) -> &[String] {
        &self.symbols
    }

    /// Looks a symbol up by name.
    pub fn id(&self, name: &str) -> Option<u8> {
        self.index.get(name).copied()
    }
}

/// A morphism over an [`Alphabet`], with an optional output coding.
///
/// `rules[a]` is the image of letter `a` as a sequence of letter ids; images
/// may be empty (erasing morphisms are accepted for matrix-level analysis).
/// `coding[a]` is the output symbol emitted for letter `a`; it defaults to
/// the letter's own name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    alphabet: Alphabet,
    rules: Vec<Vec<u8>>,
    start: u8,
    coding: Vec<String>,
    matrix_only: bool,
}

impl Morphism {
    /// Builds a morphism and validates it.
    ///
    /// Unless `matrix_only` is set, the image of `start` must begin with
    /// `start` and have length at least 2, so that iteration is prolongable.
    pub fn new(
        alphabet: Alphabet,
        rules: Vec<Vec<u8>>,
        start: u8,
        coding: Option<Vec<String>>,
        matrix_only: bool,
    ) -> Result<Morphism> {
        let n = alphabet.len();
        if rules.len() != n {
            return Err(Error::ParameterInvalid(format!(
                "{} rules for {} letters",
                rules.len(),
                n
            )));
        }
        for image in &rules {
            for &l in image {
                if (l as usize) >= n {
                    return Err(Error::ParameterInvalid(format!(
                        "image letter id {l} out of range"
                    )));
                }
            }
        }
        if (start as usize) >= n {
            return Err(Error::ParameterInvalid("start letter out of range".into()));
        }
        if !matrix_only {
            let img = &rules[start as usize];
            if img.first() != Some(&start) || img.len() < 2 {
                return Err(Error::NotProlongable(format!(
                    "image of `{}` must start with `{0}` and have length >= 2",
                    alphabet.name(start)
                )));
            }
        }
        let coding = match coding {
            Some(c) => {
                if c.len() != n {
                    return Err(Error::ParameterInvalid(format!(
                        "{} coding entries for {} letters",
                        c.len(),
                        n
                    )));
                }
                c
            }
            None => alphabet.names().to_vec(),
        };
        Ok(Morphism {
            alphabet,
            rules,
            start,
            coding,
            matrix_only,
        })
    }

    /// Convenience constructor from string images: `[("a", "a a b"), ...]`.
    /// Image words are whitespace-separated symbol names.
    pub fn from_rules<S: AsRef<str>>(
        symbols: &[S],
        rules: &[(&str, &str)],
        start: &str,
        coding: &[(&str, &str)],
    ) -> Result<Morphism> {
        let alphabet = Alphabet::new(symbols)?;
        let mut images: Vec<Option<Vec<u8>>> = vec![None; alphabet.len()];
        for (lhs, rhs) in rules {
            let id = alphabet
                .id(lhs)
                .ok_or_else(|| Error::ParameterInvalid(format!("unknown letter `{lhs}`")))?;
            let mut image = Vec::new();
            for tok in rhs.split_whitespace() {
                let t = alphabet
                    .id(tok)
                    .ok_or_else(|| Error::ParameterInvalid(format!("unknown letter `{tok}`")))?;
                image.push(t);
            }
            if images[id as usize].replace(image).is_some() {
                return Err(Error::ParameterInvalid(format!("duplicate rule for `{lhs}`")));
            }
        }
        let rules: Vec<Vec<u8>> = images
            .into_iter()
            .enumerate()
            .map(|(i, img)| {
                img.ok_or_else(|| {
                    Error::ParameterInvalid(format!(
                        "missing rule for `{}`",
                        alphabet.name(i as u8)
                    ))
                })
            })
            .collect::<Result<_>>()?;
        let start = alphabet
            .id(start)
            .ok_or_else(|| Error::ParameterInvalid(format!("unknown start letter `{start}`")))?;
        let coding_vec = if coding.is_empty() {
            None
        } else {
            let mut c = alphabet.names().to_vec();
            for (lhs, out) in coding {
                let id = alphabet
                    .id(lhs)
                    .ok_or_else(|| Error::ParameterInvalid(format!("unknown letter `{lhs}`")))?;
                c[id as usize] = out.to_string();
            }
            Some(c)
        };
        Morphism::new(alphabet, rules, start, coding_vec, false)
    }

    /// Parses the plain-text morphism format:
    ///
    /// ```text
    /// # fixed point of a -> aab
    /// alphabet: a b
    /// start: a
    /// rule: a -> a a b
    /// rule: b -> b
    /// coding: a -> 1
    /// coding: b -> 0
    /// ```
    ///
    /// `#` starts a comment, blank lines are ignored, and image words are
    /// whitespace-separated symbol names.  Every letter needs a rule; codings
    /// are optional and default to the letter itself.
    pub fn parse(text: &str) -> Result<Morphism> {
        let mut alphabet: Option<Alphabet> = None;
        let mut start: Option<String> = None;
        let mut rule_lines: Vec<(usize, String, String)> = Vec::new();
        let mut coding_lines: Vec<(usize, String, String)> = Vec::new();

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = lineno + 1;
            let (key, rest) = line.split_once(':').ok_or_else(|| Error::SpecParse {
                line: lineno,
                msg: "expected `keyword: ...`".into(),
            })?;
            let rest = rest.trim();
            match key.trim() {
                "alphabet" => {
                    let syms: Vec<&str> = rest.split_whitespace().collect();
                    let a = Alphabet::new(&syms).map_err(|e| Error::SpecParse {
                        line: lineno,
                        msg: e.to_string(),
                    })?;
                    if alphabet.replace(a).is_some() {
                        return Err(Error::SpecParse {
                            line: lineno,
                            msg: "alphabet declared twice".into(),
                        });
                    }
                }
                "start" => {
                    if start.replace(rest.to_string()).is_some() {
                        return Err(Error::SpecParse {
                            line: lineno,
                            msg: "start declared twice".into(),
                        });
                    }
                }
                "rule" | "coding" => {
                    let (lhs, rhs) = rest.split_once("->").ok_or_else(|| Error::SpecParse {
                        line: lineno,
                        msg: format!("{key} needs `letter -> image`"),
                    })?;
                    let entry = (lineno, lhs.trim().to_string(), rhs.trim().to_string());
                    if key.trim() == "rule" {
                        rule_lines.push(entry);
                    } else {
                        coding_lines.push(entry);
                    }
                }
                other => {
                    return Err(Error::SpecParse {
                        line: lineno,
                        msg: format!("unknown keyword `{other}`"),
                    });
                }
            }
        }

        let alphabet = alphabet.ok_or_else(|| Error::SpecParse {
            line: 0,
            msg: "missing `alphabet:` declaration".into(),
        })?;
        let start_name = start.ok_or_else(|| Error::SpecParse {
            line: 0,
            msg: "missing `start:` declaration".into(),
        })?;
        let start = alphabet.id(&start_name).ok_or_else(|| Error::SpecParse {
            line: 0,
            msg: format!("start letter `{start_name}` not in alphabet"),
        })?;

        let mut images: Vec<Option<Vec<u8>>> = vec![None; alphabet.len()];
        for (lineno, lhs, rhs) in rule_lines {
            let id = alphabet.id(&lhs).ok_or_else(|| Error::SpecParse {
                line: lineno,
                msg: format!("unknown letter `{lhs}`"),
            })?;
            let mut image = Vec::new();
            for tok in rhs.split_whitespace() {
                let t = alphabet.id(tok).ok_or_else(|| Error::SpecParse {
                    line: lineno,
                    msg: format!("unknown letter `{tok}` in image"),
                })?;
                image.push(t);
            }
            if images[id as usize].replace(image).is_some() {
                return Err(Error::SpecParse {
                    line: lineno,
                    msg: format!("duplicate rule for `{lhs}`"),
                });
            }
        }
        let rules: Vec<Vec<u8>> = images
            .into_iter()
            .enumerate()
            .map(|(i, img)| {
                img.ok_or_else(|| Error::SpecParse {
                    line: 0,
                    msg: format!("missing rule for `{}`", alphabet.name(i as u8)),
                })
            })
            .collect::<Result<_>>()?;

        let mut coding = alphabet.names().to_vec();
        for (lineno, lhs, rhs) in coding_lines {
            let id = alphabet.id(&lhs).ok_or_else(|| Error::SpecParse {
                line: lineno,
                msg: format!("unknown letter `{lhs}`"),
            })?;
            if rhs.split_whitespace().count() != 1 {
                return Err(Error::SpecParse {
                    line: lineno,
                    msg: "coding image must be a single symbol".into(),
                });
            }
            coding[id as usize] = rhs.split_whitespace().next().unwrap().to_string();
        }

        Morphism::new(alphabet, rules, start, Some(coding), false)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Image of letter `a`.
    pub fn image(&self, a: u8) -> &[u8] {
        &self.rules[a as usize]
    }

    pub fn start(&self) -> u8 {
        self.start
    }

    /// Output symbol for letter `a` under the coding.
    pub fn code(&self, a: u8) -> &str {
        &self.coding[a as usize]
    }

    /// True when the coding maps every letter to its own name.
    pub fn coding_is_identity(&self) -> bool {
        (0..self.alphabet.len()).all(|i| self.coding[i] == self.alphabet.name(i as u8))
    }

    pub fn matrix_only(&self) -> bool {
        self.matrix_only
    }

    /// `Some(q)` when every image has the same length `q >= 1`.
    pub fn uniform_length(&self) -> Option<usize> {
        let q = self.rules.first()?.len();
        if q >= 1 && self.rules.iter().all(|r| r.len() == q) {
            Some(q)
        } else {
            None
        }
    }

    /// Same morphism with the coding replaced by the identity.  Analyses of
    /// the underlying fixed point (return words, block structure) use this.
    pub fn without_coding(&self) -> Morphism {
        Morphism {
            coding: self.alphabet.names().to_vec(),
            ..self.clone()
        }
    }

    /// Composition `self ∘ other` (apply `other` first), over one alphabet.
    pub fn compose(&self, other: &Morphism) -> Result<Morphism> {
        if self.alphabet != other.alphabet {
            return Err(Error::ParameterInvalid(
                "composition needs a common alphabet".into(),
            ));
        }
        let rules = other
            .rules
            .iter()
            .map(|img| {
                img.iter()
                    .flat_map(|&l| self.rules[l as usize].iter().copied())
                    .collect()
            })
            .collect();
        Morphism::new(
            self.alphabet.clone(),
            rules,
            self.start,
            Some(self.coding.clone()),
            self.matrix_only || other.matrix_only,
        )
    }

    /// `self` composed with itself `k` times (`k >= 1`).
    pub fn power(&self, k: u32) -> Result<Morphism> {
        if k == 0 {
            return Err(Error::ParameterInvalid("power must be >= 1".into()));
        }
        let mut acc = self.clone();
        for _ in 1..k {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    /// Letters that occur in the fixed point, i.e. are reachable from the
    /// start letter along `b ∈ image(a)` edges.  Exact: every letter of any
    /// iterate `phi^k(start)` lies in this set and conversely.
    pub fn reachable_letters(&self) -> Vec<u8> {
        let mut seen = vec![false; self.alphabet.len()];
        let mut stack = vec![self.start];
        seen[self.start as usize] = true;
        while let Some(a) = stack.pop() {
            for &b in &self.rules[a as usize] {
                if !seen[b as usize] {
                    seen[b as usize] = true;
                    stack.push(b);
                }
            }
        }
        (0..self.alphabet.len() as u8)
            .filter(|&a| seen[a as usize])
            .collect()
    }

    /// Restriction to the letters reachable from the start letter.  The
    /// fixed point is unchanged; unreachable letters are dropped from the
    /// alphabet (and the transition matrix).
    pub fn restrict_to_reachable(&self) -> Result<Morphism> {
        let reach = self.reachable_letters();
        if reach.len() == self.alphabet.len() {
            return Ok(self.clone());
        }
        let names: Vec<&str> = reach.iter().map(|&a| self.alphabet.name(a)).collect();
        let alphabet = Alphabet::new(&names)?;
        let mut remap = vec![0u8; self.alphabet.len()];
        for (new, &old) in reach.iter().enumerate() {
            remap[old as usize] = new as u8;
        }
        let rules = reach
            .iter()
            .map(|&a| {
                self.rules[a as usize]
                    .iter()
                    .map(|&b| remap[b as usize])
                    .collect()
            })
            .collect();
        let coding = reach
            .iter()
            .map(|&a| self.coding[a as usize].clone())
            .collect();
        Morphism::new(
            alphabet,
            rules,
            remap[self.start as usize],
            Some(coding),
            self.matrix_only,
        )
    }

    /// Letters whose iterated image is eventually empty.
    fn mortal_letters(&self) -> Vec<bool> {
        let n = self.alphabet.len();
        let mut mortal = vec![false; n];
        loop {
            let mut changed = false;
            for a in 0..n {
                if !mortal[a] && self.rules[a].iter().all(|&b| mortal[b as usize]) {
                    mortal[a] = true;
                    changed = true;
                }
            }
            if !changed {
                return mortal;
            }
        }
    }
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in 0..self.alphabet.len() as u8 {
            if a > 0 {
                write!(f, ", ")?;
            }
            let img: Vec<&str> = self.image(a).iter().map(|&b| self.alphabet.name(b)).collect();
            write!(f, "{} -> {}", self.alphabet.name(a), img.join(""))?;
        }
        Ok(())
    }
}

/// Lazily expanded prefix of an infinite (or long finite) sequence.
///
/// Morphism-backed views extend on demand with O(n) work and memory via a
/// work-queue rewrite of the fixed point; fixed views (files, generators)
/// have a hard length.  Symbols are ids into [`PrefixView::alphabet`].
#[derive(Debug, Clone)]
pub struct PrefixView {
    alphabet: Alphabet,
    syms: Vec<u8>,
    source: Source,
    /// How many positions the original indexing is shifted by (1 for
    /// arithmetic sequences defined on n >= 1, else 0): entry `i` of this
    /// view is term `i + index_shift` of the underlying sequence.
    pub index_shift: u64,
}

#[derive(Debug, Clone)]
enum Source {
    Fixed,
    Expander {
        rules: Vec<Vec<u8>>,
        code: Vec<u8>,
        letters: Vec<u8>,
        /// Next fixed-point position whose image has not yet been appended.
        pos: usize,
    },
}

impl PrefixView {
    /// Wraps an explicit symbol buffer (already resolved against `alphabet`).
    pub fn fixed(alphabet: Alphabet, syms: Vec<u8>) -> PrefixView {
        PrefixView {
            alphabet,
            syms,
            source: Source::Fixed,
            index_shift: 0,
        }
    }

    /// Output alphabet of this view.
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Symbols materialized so far.
    pub fn symbols(&self) -> &[u8] {
        &self.syms
    }

    /// Total length for fixed sources, `None` for unbounded ones.
    pub fn fixed_len(&self) -> Option<u64> {
        match self.source {
            Source::Fixed => Some(self.syms.len() as u64),
            Source::Expander { .. } => None,
        }
    }

    /// Materializes at least `n` symbols or reports why it cannot.
    pub fn ensure(&mut self, n: u64) -> Result<()> {
        if n <= self.syms.len() as u64 {
            return Ok(());
        }
        let n = usize::try_from(n)
            .map_err(|_| Error::ParameterInvalid(format!("horizon {n} too large")))?;
        match &mut self.source {
            Source::Fixed => Err(Error::PrefixTooShort {
                needed: n as u64,
                got: self.syms.len() as u64,
            }),
            Source::Expander {
                rules,
                code,
                letters,
                pos,
            } => {
                while letters.len() < n {
                    if *pos >= letters.len() {
                        // The fixed point is finite: every pending image was
                        // empty and rewriting caught up with the buffer.
                        return Err(Error::NotProlongable(
                            "expansion stalls; the fixed point is finite".into(),
                        ));
                    }
                    let a = letters[*pos] as usize;
                    *pos += 1;
                    letters.extend_from_slice(&rules[a]);
                }
                for i in self.syms.len()..n {
                    self.syms.push(code[letters[i] as usize]);
                }
                Ok(())
            }
        }
    }

    /// Like [`PrefixView::ensure`] but clamps to what a fixed source holds;
    /// returns the horizon actually available.
    pub fn ensure_up_to(&mut self, n: u64) -> Result<u64> {
        let n = match self.fixed_len() {
            Some(len) => n.min(len),
            None => n,
        };
        self.ensure(n)?;
        Ok(n)
    }

    /// Renders symbols `[0, upto)` as a string.  Single-character symbol
    /// names are concatenated; longer names are space-separated.
    pub fn render(&self, upto: usize) -> String {
        let upto = upto.min(self.syms.len());
        let plain = self.alphabet.names().iter().all(|s| s.chars().count() == 1);
        let parts: Vec<&str> = self.syms[..upto]
            .iter()
            .map(|&s| self.alphabet.name(s))
            .collect();
        parts.join(if plain { "" } else { " " })
    }
}

/// Expands the coded fixed point of `m` to at least `n` symbols.
///
/// The fixed point exists when the image of the start letter `a` is `a·v`
/// with `v` non-empty and some letter of `v` is immortal (no iterate of it
/// erases); otherwise this reports [`Error::NotProlongable`].
pub fn expand(m: &Morphism, n: u64) -> Result<PrefixView> {
    if m.matrix_only() {
        return Err(Error::NotProlongable(
            "morphism is flagged matrix-only".into(),
        ));
    }
    let start_img = m.image(m.start());
    if start_img.first() != Some(&m.start()) || start_img.len() < 2 {
        return Err(Error::NotProlongable(format!(
            "image of `{}` does not begin with it or is too short",
            m.alphabet().name(m.start())
        )));
    }
    let mortal = m.mortal_letters();
    if start_img[1..].iter().all(|&b| mortal[b as usize]) {
        return Err(Error::NotProlongable(
            "every letter after the start erases eventually; the fixed point is finite".into(),
        ));
    }

    // Output alphabet: distinct coding values in first-use order.
    let n_letters = m.alphabet().len();
    let mut out_syms: Vec<String> = Vec::new();
    let mut code = vec![0u8; n_letters];
    for a in 0..n_letters {
        let name = m.code(a as u8);
        match out_syms.iter().position(|s| s == name) {
            Some(i) => code[a] = i as u8,
            None => {
                code[a] = out_syms.len() as u8;
                out_syms.push(name.to_string());
            }
        }
    }
    let alphabet = Alphabet::new(&out_syms)?;

    let mut view = PrefixView {
        alphabet,
        syms: Vec::new(),
        source: Source::Expander {
            rules: (0..n_letters as u8).map(|a| m.image(a).to_vec()).collect(),
            code,
            letters: start_img.to_vec(),
            pos: 1,
        },
        index_shift: 0,
    };
    view.ensure(n)?;
    Ok(view)
}

/// Expands the *uncoded* fixed point (letters themselves as output symbols).
pub fn expand_letters(m: &Morphism, n: u64) -> Result<PrefixView> {
    expand(&m.without_coding(), n)
}

/// Return words to a target symbol observed in a prefix.
///
/// A return word is the factor between consecutive occurrences of the
/// target (starting at one occurrence, ending just before the next).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReturnWordStats {
    /// Target symbol id in the view's alphabet.
    pub target: u8,
    /// Target symbol name.
    pub target_symbol: String,
    /// Distinct return-word lengths observed.
    pub lengths: BTreeSet<u64>,
    /// gcd of all observed return-word lengths.
    pub gcd: u64,
    /// Number of occurrences of the target within the horizon.
    pub occurrences: usize,
    /// Horizon actually scanned.
    pub horizon: u64,
    /// The shortest distinct return words (at most 16), shortest first;
    /// ties broken by symbol order.  Stored as symbol-id sequences.
    pub words: Vec<Vec<u8>>,
}

/// Maximum number of distinct return words retained for later use (Host
/// sampling pushes each of them through matrix powers).
pub const RETURN_WORD_SAMPLE: usize = 16;

/// Collects return words to `target` within `p[0, horizon)`.
///
/// Needs at least two occurrences of the target; the last (unterminated)
/// return word is not counted.
pub fn return_words(p: &mut PrefixView, target: u8, horizon: u64) -> Result<ReturnWordStats> {
    let horizon = p.ensure_up_to(horizon)?;
    let data = &p.symbols()[..horizon as usize];
    let positions: Vec<usize> = data
        .iter()
        .enumerate()
        .filter_map(|(i, &s)| (s == target).then_some(i))
        .collect();
    if positions.len() < 2 {
        return Err(Error::InsufficientOccurrences {
            target: p.alphabet().name(target).to_string(),
            found: positions.len(),
            needed: 2,
        });
    }
    let mut lengths = BTreeSet::new();
    let mut gcd: u64 = 0;
    let mut distinct: BTreeSet<Vec<u8>> = BTreeSet::new();
    for w in positions.windows(2) {
        let (i, j) = (w[0], w[1]);
        let len = (j - i) as u64;
        lengths.insert(len);
        gcd = num_integer::gcd(gcd, len);
        distinct.insert(data[i..j].to_vec());
    }
    let mut words: Vec<Vec<u8>> = distinct.into_iter().collect();
    words.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    words.truncate(RETURN_WORD_SAMPLE);
    Ok(ReturnWordStats {
        target,
        target_symbol: p.alphabet().name(target).to_string(),
        lengths,
        gcd,
        occurrences: positions.len(),
        horizon,
        words,
    })
}

/// Height estimate: gcd of return-word lengths to the first letter of the
/// (uncoded) fixed point, with a stabilization flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeightEstimate {
    /// gcd of return-word lengths observed at `2 * horizon`.
    pub gcd: u64,
    /// True when doubling the horizon once did not change the gcd.
    pub stabilized: bool,
    /// Occurrences of the first letter within the doubled horizon.
    pub occurrences: usize,
    /// The base horizon that was requested.
    pub horizon: u64,
}

/// Estimates the height of `m`: the gcd of return-word lengths to the fixed
/// point's first letter, observed within `horizon` and re-checked at twice
/// the horizon.
pub fn height(m: &Morphism, horizon: u64) -> Result<HeightEstimate> {
    let mut p = expand_letters(m, horizon.saturating_mul(2))?;
    let first = p.symbols()[0];
    let at_h = return_words(&mut p, first, horizon)?;
    let at_2h = return_words(&mut p, first, horizon.saturating_mul(2))?;
    Ok(HeightEstimate {
        gcd: at_2h.gcd,
        stabilized: at_h.gcd == at_2h.gcd,
        occurrences: at_2h.occurrences,
        horizon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalogue;

    /// Oracle: expand the fixed point by literally iterating the morphism on
    /// the start letter until the prefix is long enough.
    fn expand_oracle(m: &Morphism, n: usize) -> String {
        let mut word = vec![m.start()];
        loop {
            let next: Vec<u8> = word
                .iter()
                .flat_map(|&a| m.image(a).iter().copied())
                .collect();
            let stable = next.len() >= n && next[..n] == word[..n.min(word.len())];
            let grew = next.len() > word.len();
            word = next;
            if stable || !grew {
                break;
            }
        }
        word.truncate(n);
        word.iter().map(|&a| m.code(a).to_string()).collect()
    }

    #[test]
    fn expand_matches_frozen_prefixes() {
        // Frozen via the iteration oracle above.
        let m = catalogue::aab();
        let p = expand(&m, 10).unwrap();
        assert_eq!(p.render(10), "aabaabbaab");
        assert_eq!(expand_oracle(&m, 10), "aabaabbaab");

        let tm = catalogue::thue_morse();
        let p = expand(&tm, 16).unwrap();
        assert_eq!(p.render(16), "0110100110010110");
        assert_eq!(expand_oracle(&tm, 16), "0110100110010110");

        let fib = catalogue::fibonacci_word();
        let p = expand(&fib, 8).unwrap();
        assert_eq!(p.render(8), "01001010");
        assert_eq!(expand_oracle(&fib, 8), "01001010");
    }

    #[test]
    fn expand_agrees_with_oracle_on_catalogue() {
        for m in catalogue::all() {
            if m.uniform_length() == Some(1) {
                continue;
            }
            let p = expand(&m, 400).unwrap();
            assert_eq!(p.render(400), expand_oracle(&m, 400), "morphism {m}");
        }
    }

    #[test]
    fn expand_is_prefix_stable() {
        for m in catalogue::all() {
            let a = expand(&m, 100).unwrap();
            let b = expand(&m, 700).unwrap();
            assert_eq!(a.symbols()[..100], b.symbols()[..100], "morphism {m}");
        }
    }

    #[test]
    fn expansion_extends_in_place() {
        let m = catalogue::thue_morse();
        let mut p = expand(&m, 4).unwrap();
        p.ensure(1 << 12).unwrap();
        let q = expand(&m, 1 << 12).unwrap();
        assert_eq!(p.symbols(), q.symbols());
    }

    #[test]
    fn not_prolongable_is_reported() {
        // Image of the start letter does not begin with it.
        let m = Morphism::from_rules(&["a", "b"], &[("a", "b a"), ("b", "b")], "a", &[]);
        assert!(matches!(m, Err(Error::NotProlongable(_))));

        // Prolongable shape, but the tail of the start image erases: the
        // fixed point is the finite word "ab".
        let alphabet = Alphabet::new(&["a", "b"]).unwrap();
        let m = Morphism::new(alphabet, vec![vec![0, 1], vec![]], 0, None, false).unwrap();
        assert!(matches!(expand(&m, 10), Err(Error::NotProlongable(_))));
    }

    #[test]
    fn erasing_morphism_allowed_for_matrix_analysis() {
        let alphabet = Alphabet::new(&["a", "b"]).unwrap();
        let m = Morphism::new(alphabet, vec![vec![1], vec![]], 0, None, true).unwrap();
        assert!(m.matrix_only());
        assert!(matches!(expand(&m, 4), Err(Error::NotProlongable(_))));
    }

    #[test]
    fn parser_round_trip() {
        let text = "
            # Thue-Morse with a coding
            alphabet: a b
            start: a
            rule: a -> a b
            rule: b -> b a
            coding: a -> 0
            coding: b -> 1
        ";
        let m = Morphism::parse(text).unwrap();
        assert_eq!(m.uniform_length(), Some(2));
        let p = expand(&m, 8).unwrap();
        assert_eq!(p.render(8), "01101001");
    }

    #[test]
    fn parser_rejects_bad_input() {
        assert!(matches!(
            Morphism::parse("alphabet: a\nstart: a\nrule: a -> a c"),
            Err(Error::SpecParse { .. })
        ));
        assert!(matches!(
            Morphism::parse("alphabet: a b\nstart: a\nrule: a -> a b"),
            Err(Error::SpecParse { .. }) // missing rule for b
        ));
        assert!(matches!(
            Morphism::parse("start: a\nrule: a -> a a"),
            Err(Error::SpecParse { .. }) // no alphabet
        ));
        assert!(matches!(
            Morphism::parse("alphabet: a\nstart: a\nrule: a -> a a\nrule: a -> a"),
            Err(Error::SpecParse { .. }) // duplicate rule
        ));
    }

    #[test]
    fn uniform_length_detection() {
        assert_eq!(catalogue::thue_morse().uniform_length(), Some(2));
        assert_eq!(catalogue::aab().uniform_length(), None);
        assert_eq!(catalogue::digit_sum_base3().uniform_length(), Some(3));
    }

    #[test]
    fn composition_squares_the_expansion() {
        let m = catalogue::thue_morse();
        let m2 = m.compose(&m).unwrap();
        let a = expand(&m2, 64).unwrap();
        let b = expand(&m, 64).unwrap();
        assert_eq!(a.symbols(), b.symbols());
        assert_eq!(m2.uniform_length(), Some(4));
    }

    #[test]
    fn reachable_letters_are_exact() {
        // `c` is never produced from `a`.
        let m = Morphism::from_rules(
            &["a", "b", "c"],
            &[("a", "a b"), ("b", "a"), ("c", "c b")],
            "a",
            &[],
        )
        .unwrap();
        assert_eq!(m.reachable_letters(), vec![0, 1]);
        let r = m.restrict_to_reachable().unwrap();
        assert_eq!(r.alphabet().len(), 2);
        let full = expand(&m, 50).unwrap();
        let restr = expand(&r, 50).unwrap();
        assert_eq!(full.render(50), restr.render(50));
    }

    #[test]
    fn return_words_on_thue_morse() {
        let m = catalogue::thue_morse();
        let mut p = expand(&m, 1 << 10).unwrap();
        let zero = p.alphabet().id("0").unwrap();
        let rw = return_words(&mut p, zero, 1 << 10).unwrap();
        // 0 recurs with gaps 1, 2, and 3 in Thue-Morse.
        assert_eq!(rw.gcd, 1);
        assert!(rw.lengths.contains(&1) && rw.lengths.contains(&2) && rw.lengths.contains(&3));
        assert!(rw.words.len() <= RETURN_WORD_SAMPLE);
        // Every sampled word starts with the target.
        assert!(rw.words.iter().all(|w| w[0] == zero));
    }

    #[test]
    fn return_words_need_two_occurrences() {
        // 0 1 1 1 1 ... : the target only occurs once.
        let m = Morphism::from_rules(&["0", "1"], &[("0", "0 1"), ("1", "1 1")], "0", &[]).unwrap();
        let mut p = expand(&m, 256).unwrap();
        let zero = p.alphabet().id("0").unwrap();
        assert!(matches!(
            return_words(&mut p, zero, 256),
            Err(Error::InsufficientOccurrences { .. })
        ));
    }

    #[test]
    fn height_examples() {
        // Fibonacci: 0 recurs with gaps 1 and 2, so the height is 1.
        let h = height(&catalogue::fibonacci_word(), 10_000).unwrap();
        assert_eq!(h.gcd, 1);
        assert!(h.stabilized);

        // Degenerate periodic fixed point (01)^inf: gaps to `0` are all 2.
        let h = height(&catalogue::periodic_square(), 4096).unwrap();
        assert_eq!(h.gcd, 2);
        assert!(h.stabilized);

        let h = height(&catalogue::thue_morse(), 4096).unwrap();
        assert_eq!(h.gcd, 1);
    }

    #[test]
    fn fixed_views_report_their_limits() {
        let alphabet = Alphabet::new(&["x", "y"]).unwrap();
        let mut p = PrefixView::fixed(alphabet, vec![0, 1, 0, 1]);
        assert_eq!(p.fixed_len(), Some(4));
        assert!(p.ensure(4).is_ok());
        assert!(matches!(p.ensure(5), Err(Error::PrefixTooShort { .. })));
        assert_eq!(p.ensure_up_to(100).unwrap(), 4);
    }
}
