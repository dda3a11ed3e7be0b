//! Built-in sequence generators: classical arithmetic sequences reduced to
//! finite alphabets, and characteristic sequences of integer sets.
//!
//! Arithmetic sequences are 1-indexed as usual in number theory; the
//! returned prefix stores a(1) at position 0 and records `index_shift = 1`.
//! Characteristic sequences are genuine 0-indexed indicators.  Automaticity
//! is invariant under shifting, so the analyzer treats both uniformly.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::poly::Rat;
use crate::words::{Alphabet, PrefixView};
use crate::{Error, Result};

/// Sieve memory bound: generators refuse lengths beyond this.
pub const MAX_GENERATED: u64 = 1 << 24;

// ---------------------------------------------------------------------------
// Generator specifications.
// ---------------------------------------------------------------------------

/// A built-in sequence generator, parsed from a `name[:params]` string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorSpec {
    /// Liouville lambda(n) = (-1)^Omega(n), values in {-1, 1}.
    Liouville,
    /// Moebius mu(n), values in {-1, 0, 1}.
    Mobius,
    /// mu(n)^2: the squarefree indicator.
    MobiusSquared,
    /// Euler totient phi(n) mod v.
    TotientMod { v: u64 },
    /// sigma_m(n) = sum of d^m over divisors d of n, reduced mod v.
    SigmaMod { m: u32, v: u64 },
    /// Omega(n) = number of prime factors with multiplicity, mod v.
    BigOmegaMod { v: u64 },
    /// q_m(n) = 0 if p^m divides n for some prime p, else 1 (m >= 2).
    QmFree { m: u32 },
    /// Characteristic sequence of {p(i) : i >= 0} for an integer-valued
    /// polynomial with rational coefficients (stored constant-first).
    PolyChar { coeffs: Vec<Rat> },
    /// Characteristic sequence of the primes.
    Primes,
    /// Characteristic sequence of the prime powers p^k, k >= 1.
    PrimePowers,
    /// Characteristic sequence of {2^n : n >= 1}.
    PowersOfTwo,
    /// Characteristic sequence of {2^n : n >= 1} ∪ {2^n - 1 : n >= 1}.
    TwoPowersAndPred,
    /// Characteristic sequence of {2^n (2^n - 1) : n >= 0}.
    TwoN2NMinus1,
    /// Characteristic sequence of sums of distinct terms q^j - 1, j >= 1.
    QJSums { q: u64 },
}

impl GeneratorSpec {
    /// Parses a CLI-style generator string such as `liouville`,
    /// `totient:5`, `sigma:1,5`, `poly:1,0,0` (coefficients leading-first),
    /// or `set:2n-and-2n-1`.
    pub fn parse(s: &str) -> Result<GeneratorSpec> {
        let (name, params) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s, None),
        };
        let no_params = |spec: GeneratorSpec| match params {
            Some(_) => Err(Error::ParameterInvalid(format!(
                "generator `{name}` takes no parameters"
            ))),
            None => Ok(spec),
        };
        match name {
            "liouville" => no_params(GeneratorSpec::Liouville),
            "mobius" => no_params(GeneratorSpec::Mobius),
            "mobius-sq" => no_params(GeneratorSpec::MobiusSquared),
            "primes" => no_params(GeneratorSpec::Primes),
            "prime-powers" => no_params(GeneratorSpec::PrimePowers),
            "totient" => {
                let v = parse_u64(name, params)?;
                check_modulus(v)?;
                Ok(GeneratorSpec::TotientMod { v })
            }
            "omega" => {
                let v = parse_u64(name, params)?;
                check_modulus(v)?;
                Ok(GeneratorSpec::BigOmegaMod { v })
            }
            "sigma" => {
                let p = params.ok_or_else(|| missing_params(name))?;
                let (m, v) = p.split_once(',').ok_or_else(|| {
                    Error::ParameterInvalid("sigma needs `m,v`".into())
                })?;
                let m: u32 = m
                    .trim()
                    .parse()
                    .map_err(|_| Error::ParameterInvalid(format!("bad exponent `{m}`")))?;
                let v: u64 = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::ParameterInvalid(format!("bad modulus `{v}`")))?;
                if m == 0 {
                    return Err(Error::ParameterInvalid("sigma exponent must be >= 1".into()));
                }
                check_modulus(v)?;
                Ok(GeneratorSpec::SigmaMod { m, v })
            }
            "qm" => {
                let m = parse_u64(name, params)? as u32;
                if m < 2 {
                    return Err(Error::ParameterInvalid(
                        "qm exponent must be >= 2 (q_1 is trivial)".into(),
                    ));
                }
                Ok(GeneratorSpec::QmFree { m })
            }
            "qj1-sums" => {
                let q = parse_u64(name, params)?;
                if q < 2 {
                    return Err(Error::ParameterInvalid("qj1-sums base must be >= 2".into()));
                }
                Ok(GeneratorSpec::QJSums { q })
            }
            "poly" => {
                let p = params.ok_or_else(|| missing_params(name))?;
                let mut coeffs: Vec<Rat> = Vec::new();
                for c in p.split(',') {
                    coeffs.push(parse_rat(c.trim())?);
                }
                // CLI order is leading-first; store constant-first.
                coeffs.reverse();
                while coeffs.last().map_or(false, |c| c.is_zero()) {
                    coeffs.pop();
                }
                if coeffs.is_empty() {
                    return Err(Error::ParameterInvalid(
                        "polynomial must not be identically zero".into(),
                    ));
                }
                Ok(GeneratorSpec::PolyChar { coeffs })
            }
            "set" => match params {
                Some("2n") => Ok(GeneratorSpec::PowersOfTwo),
                Some("2n-and-2n-1") => Ok(GeneratorSpec::TwoPowersAndPred),
                Some("2n2n-1") => Ok(GeneratorSpec::TwoN2NMinus1),
                _ => Err(Error::UnknownGenerator(format!(
                    "set:{} (known: 2n, 2n-and-2n-1, 2n2n-1)",
                    params.unwrap_or("")
                ))),
            },
            _ => Err(Error::UnknownGenerator(name.to_string())),
        }
    }

    /// Whether positions are shifted: arithmetic sequences are 1-indexed.
    pub fn index_shift(&self) -> u64 {
        match self {
            GeneratorSpec::Liouville
            | GeneratorSpec::Mobius
            | GeneratorSpec::MobiusSquared
            | GeneratorSpec::TotientMod { .. }
            | GeneratorSpec::SigmaMod { .. }
            | GeneratorSpec::BigOmegaMod { .. }
            | GeneratorSpec::QmFree { .. } => 1,
            _ => 0,
        }
    }
}

impl std::fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GeneratorSpec::Liouville => write!(f, "liouville"),
            GeneratorSpec::Mobius => write!(f, "mobius"),
            GeneratorSpec::MobiusSquared => write!(f, "mobius-sq"),
            GeneratorSpec::TotientMod { v } => write!(f, "totient:{v}"),
            GeneratorSpec::SigmaMod { m, v } => write!(f, "sigma:{m},{v}"),
            GeneratorSpec::BigOmegaMod { v } => write!(f, "omega:{v}"),
            GeneratorSpec::QmFree { m } => write!(f, "qm:{m}"),
            GeneratorSpec::PolyChar { coeffs } => {
                let parts: Vec<String> =
                    coeffs.iter().rev().map(|c| c.to_string()).collect();
                write!(f, "poly:{}", parts.join(","))
            }
            GeneratorSpec::Primes => write!(f, "primes"),
            GeneratorSpec::PrimePowers => write!(f, "prime-powers"),
            GeneratorSpec::PowersOfTwo => write!(f, "set:2n"),
            GeneratorSpec::TwoPowersAndPred => write!(f, "set:2n-and-2n-1"),
            GeneratorSpec::TwoN2NMinus1 => write!(f, "set:2n2n-1"),
            GeneratorSpec::QJSums { q } => write!(f, "qj1-sums:{q}"),
        }
    }
}

fn parse_u64(name: &str, params: Option<&str>) -> Result<u64> {
    let p = params.ok_or_else(|| missing_params(name))?;
    p.trim()
        .parse()
        .map_err(|_| Error::ParameterInvalid(format!("bad parameter `{p}` for `{name}`")))
}

fn missing_params(name: &str) -> Error {
    Error::ParameterInvalid(format!("generator `{name}` needs parameters"))
}

fn check_modulus(v: u64) -> Result<()> {
    if v < 2 {
        return Err(Error::ParameterInvalid("modulus must be >= 2".into()));
    }
    if v > 255 {
        return Err(Error::AlphabetTooLarge(v as usize));
    }
    Ok(())
}

fn parse_rat(s: &str) -> Result<Rat> {
    let bad = || Error::ParameterInvalid(format!("bad rational coefficient `{s}`"));
    match s.split_once('/') {
        Some((num, den)) => {
            let n: BigInt = num.trim().parse().map_err(|_| bad())?;
            let d: BigInt = den.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(n, d))
        }
        None => {
            let n: BigInt = s.trim().parse().map_err(|_| bad())?;
            Ok(Rat::from_integer(n))
        }
    }
}

// ---------------------------------------------------------------------------
// Sieve.
// ---------------------------------------------------------------------------

/// Linear sieve storing the smallest prime factor of every integer up to
/// the bound.
struct Sieve {
    spf: Vec<u32>,
}

impl Sieve {
    fn new(bound: usize) -> Sieve {
        let mut spf = vec![0u32; bound + 1];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..=bound {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            for &p in &primes {
                if p > spf[i] || (i as u64) * (p as u64) > bound as u64 {
                    break;
                }
                spf[i * p as usize] = p;
            }
        }
        Sieve { spf }
    }

    fn is_prime(&self, n: u64) -> bool {
        n >= 2 && self.spf[n as usize] as u64 == n
    }

    /// Calls f(p, e) for each prime power p^e exactly dividing n.
    fn for_each_prime_power(&self, mut n: u64, mut f: impl FnMut(u64, u32)) {
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            let mut e = 0u32;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            f(p, e);
        }
    }
}

// ---------------------------------------------------------------------------
// Generation.
// ---------------------------------------------------------------------------

/// Generates the first `n` values of the sequence described by `spec`.
pub fn generate(spec: &GeneratorSpec, n: u64) -> Result<PrefixView> {
    if n == 0 {
        return Err(Error::ParameterInvalid("length must be positive".into()));
    }
    if n > MAX_GENERATED {
        return Err(Error::ParameterInvalid(format!(
            "length {n} exceeds the generator bound {MAX_GENERATED}"
        )));
    }
    let mut view = match spec {
        GeneratorSpec::Liouville => {
            arithmetic(n, &["-1", "1"], |sieve, k| {
                let mut omega = 0u32;
                sieve.for_each_prime_power(k, |_, e| omega += e);
                (omega % 2 == 0) as u8
            })?
        }
        GeneratorSpec::Mobius => {
            arithmetic(n, &["-1", "0", "1"], |sieve, k| {
                let mut distinct = 0u32;
                let mut squarefree = true;
                sieve.for_each_prime_power(k, |_, e| {
                    distinct += 1;
                    squarefree &= e == 1;
                });
                if !squarefree {
                    1
                } else if distinct % 2 == 0 {
                    2
                } else {
                    0
                }
            })?
        }
        GeneratorSpec::MobiusSquared => {
            arithmetic(n, &["0", "1"], |sieve, k| {
                let mut squarefree = true;
                sieve.for_each_prime_power(k, |_, e| squarefree &= e == 1);
                squarefree as u8
            })?
        }
        GeneratorSpec::TotientMod { v } => {
            let names = residue_names(*v);
            arithmetic_named(n, &names, |sieve, k| {
                let mut phi = 1u64;
                sieve.for_each_prime_power(k, |p, e| {
                    phi *= (p - 1) * p.pow(e - 1);
                });
                (phi % v) as u8
            })?
        }
        GeneratorSpec::SigmaMod { m, v } => {
            let names = residue_names(*v);
            arithmetic_named(n, &names, |sieve, k| {
                // sigma_m is multiplicative with
                // sigma_m(p^e) = 1 + p^m + ... + p^{em}; accumulate mod v.
                let mut s = 1u64;
                sieve.for_each_prime_power(k, |p, e| {
                    let pm = mod_pow(p % v, *m as u64, *v);
                    let mut term = 1u64 % v;
                    let mut acc = 1u64 % v;
                    for _ in 0..e {
                        term = term * pm % v;
                        acc = (acc + term) % v;
                    }
                    s = s * acc % v;
                });
                (s % v) as u8
            })?
        }
        GeneratorSpec::BigOmegaMod { v } => {
            let names = residue_names(*v);
            arithmetic_named(n, &names, |sieve, k| {
                let mut omega = 0u64;
                sieve.for_each_prime_power(k, |_, e| omega += e as u64);
                (omega % v) as u8
            })?
        }
        GeneratorSpec::QmFree { m } => {
            arithmetic(n, &["0", "1"], |sieve, k| {
                let mut free = true;
                sieve.for_each_prime_power(k, |_, e| free &= e < *m);
                free as u8
            })?
        }
        GeneratorSpec::Primes => {
            let sieve = Sieve::new((n - 1) as usize);
            indicator(n, |k| sieve.is_prime(k))
        }
        GeneratorSpec::PrimePowers => {
            let sieve = Sieve::new((n - 1) as usize);
            indicator(n, |k| {
                if k < 2 {
                    return false;
                }
                let mut distinct = 0;
                sieve.for_each_prime_power(k, |_, _| distinct += 1);
                distinct == 1
            })
        }
        GeneratorSpec::PolyChar { coeffs } => return poly_char_sequence(coeffs, n),
        GeneratorSpec::PowersOfTwo => set_indicator(n, powers_of_two(n)),
        GeneratorSpec::TwoPowersAndPred => {
            let mut members = powers_of_two(n);
            members.extend(powers_of_two(n + 1).iter().map(|p| p - 1));
            set_indicator(n, members)
        }
        GeneratorSpec::TwoN2NMinus1 => {
            let mut members = Vec::new();
            let mut e = 0u32;
            loop {
                let p = 1u64 << e;
                match p.checked_mul(p - 1) {
                    Some(m) if m < n => members.push(m),
                    _ => break,
                }
                e += 1;
            }
            set_indicator(n, members)
        }
        GeneratorSpec::QJSums { q } => {
            // Subset-sum closure of the terms q^j - 1 (j >= 1, distinct).
            let mut reachable = vec![false; n as usize];
            reachable[0] = true;
            let mut term = *q - 1;
            loop {
                for i in (term..n).rev() {
                    if reachable[(i - term) as usize] {
                        reachable[i as usize] = true;
                    }
                }
                match term.checked_mul(*q) {
                    Some(t) if t + (*q - 1) < n => term = t + (*q - 1),
                    _ => break,
                }
            }
            let members: Vec<u64> = (0..n).filter(|&i| reachable[i as usize]).collect();
            set_indicator(n, members)
        }
    };
    view.index_shift = spec.index_shift();
    Ok(view)
}

/// Characteristic sequence of {p(i) : i >= 0} on [0, n) for an
/// integer-valued polynomial with rational coefficients (constant-first).
pub fn poly_char_sequence(coeffs: &[Rat], n: u64) -> Result<PrefixView> {
    if coeffs.is_empty() || coeffs.iter().all(|c| c.is_zero()) {
        return Err(Error::ParameterInvalid(
            "polynomial must not be identically zero".into(),
        ));
    }
    let eval = |i: u64| -> Rat {
        let x = Rat::from_integer(BigInt::from(i));
        let mut acc = Rat::from_integer(BigInt::zero());
        for c in coeffs.iter().rev() {
            acc = acc * &x + c;
        }
        acc
    };
    let mut members = Vec::new();
    let bound = BigInt::from(n);
    // For an eventually increasing integer-valued polynomial, all members
    // below n are hit by i <= 4n + 64 (linear polynomials grow at least
    // 1/deg! per step once increasing).
    let mut i = 0u64;
    let mut last: Option<BigInt> = None;
    while i <= 4 * n + 64 {
        let value = eval(i);
        if !value.denom().is_one() || value.numer().is_negative() {
            return Err(Error::NotIntegerValued { at: i as i64 });
        }
        let value = value.numer().clone();
        if value < bound {
            members.push(value.to_u64().expect("checked against bound"));
        } else if let Some(prev) = &last {
            if &value > prev {
                // Increasing and past the window: no further members.
                break;
            }
        }
        last = Some(value);
        i += 1;
    }
    members.sort_unstable();
    members.dedup();
    Ok(set_indicator(n, members))
}

fn residue_names(v: u64) -> Vec<String> {
    (0..v).map(|r| r.to_string()).collect()
}

fn mod_pow(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1u64 % modulus;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % modulus;
        }
        base = base * base % modulus;
        exp >>= 1;
    }
    acc
}

fn powers_of_two(n: u64) -> Vec<u64> {
    let mut v = Vec::new();
    let mut p = 2u64;
    while p < n {
        v.push(p);
        match p.checked_mul(2) {
            Some(next) => p = next,
            None => break,
        }
    }
    v
}

/// 1-indexed arithmetic sequence: position k holds f(k + 1) as an id into
/// the fixed name list.
fn arithmetic(
    n: u64,
    names: &[&str],
    f: impl Fn(&Sieve, u64) -> u8,
) -> Result<PrefixView> {
    let owned: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    arithmetic_named(n, &owned, f)
}

fn arithmetic_named(
    n: u64,
    names: &[String],
    f: impl Fn(&Sieve, u64) -> u8,
) -> Result<PrefixView> {
    let sieve = Sieve::new(n as usize);
    let syms: Vec<u8> = (1..=n).map(|k| f(&sieve, k)).collect();
    let alphabet = Alphabet::new(names)?;
    Ok(PrefixView::fixed(alphabet, syms))
}

fn indicator(n: u64, f: impl Fn(u64) -> bool) -> PrefixView {
    let alphabet = Alphabet::new(&["0", "1"]).expect("two symbols");
    let syms: Vec<u8> = (0..n).map(|k| f(k) as u8).collect();
    PrefixView::fixed(alphabet, syms)
}

fn set_indicator(n: u64, members: Vec<u64>) -> PrefixView {
    let alphabet = Alphabet::new(&["0", "1"]).expect("two symbols");
    let mut syms = vec![0u8; n as usize];
    for m in members {
        if m < n {
            syms[m as usize] = 1;
        }
    }
    PrefixView::fixed(alphabet, syms)
}
