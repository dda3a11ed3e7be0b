//! Exact univariate polynomial arithmetic over the integers and rationals:
//! Sturm chains for real-root counting, squarefree parts, rational-root
//! extraction, and Kronecker-style factorization into irreducibles.
//!
//! Everything here is exact; the only approximations in the crate live in
//! test oracles and advisory statistics.  Degrees stay tiny (characteristic
//! polynomials of desk-scale matrices), so the Kronecker search is bounded
//! by an explicit combinatorial budget instead of cleverness.

use std::fmt;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Arbitrary-precision rational number.
pub type Rat = Ratio<BigInt>;

/// Degree ceiling for exact factorization.  The Kronecker search is
/// exhaustive (hence a genuine irreducibility proof) but exponential in the
/// degree; ceilings beyond 8 are not desk-scale.
pub const FACTOR_DEGREE_CEILING: usize = 8;

/// Combinatorial budget for the Kronecker divisor search.
const KRONECKER_BUDGET: u128 = 4_000_000;

/// A polynomial with integer coefficients, constant term first.
/// The zero polynomial has an empty coefficient vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    /// Builds a polynomial, trimming trailing zero coefficients.
    pub fn new(mut coeffs: Vec<BigInt>) -> IntPolynomial {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> IntPolynomial {
        IntPolynomial::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> IntPolynomial {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Coefficient of x^i (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> &BigInt {
        self.coeffs.get(i).unwrap_or_else(|| zero_bigint())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn leading(&self) -> &BigInt {
        self.coeffs.last().unwrap_or_else(|| zero_bigint())
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_rat(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + Rat::from_integer(c.clone());
        }
        acc
    }

    pub fn derivative(&self) -> IntPolynomial {
        if self.coeffs.len() <= 1 {
            return IntPolynomial::zero();
        }
        IntPolynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i as i64))
                .collect(),
        )
    }

    pub fn neg(&self) -> IntPolynomial {
        IntPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, other: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || other.is_zero() {
            return IntPolynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }

    /// Content: gcd of the coefficients (non-negative).
    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |g, c| num_integer::gcd(g, c.clone()))
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive(&self) -> IntPolynomial {
        if self.is_zero() {
            return IntPolynomial::zero();
        }
        let mut c = self.content();
        if self.leading().is_negative() {
            c = -c;
        }
        IntPolynomial::new(self.coeffs.iter().map(|x| x / &c).collect())
    }

    /// Exact division: `Some(q)` with `self = q * div` over the integers,
    /// `None` when `div` does not divide `self`.
    pub fn div_exact(&self, div: &IntPolynomial) -> Option<IntPolynomial> {
        if div.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(IntPolynomial::zero());
        }
        let (q, r) = RatPoly::from_int(self).div_rem(&RatPoly::from_int(div));
        if !r.is_zero() {
            return None;
        }
        q.to_int()
    }

    /// Number of trailing zero roots: largest k with x^k dividing self.
    pub fn trailing_zero_roots(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    /// Divides by x^k (caller guarantees divisibility).
    pub fn shift_down(&self, k: usize) -> IntPolynomial {
        IntPolynomial::new(self.coeffs[k.min(self.coeffs.len())..].to_vec())
    }

    /// Squarefree part: self / gcd(self, self'), primitive with positive
    /// leading coefficient.  Root set is preserved, multiplicities dropped.
    pub fn squarefree_part(&self) -> IntPolynomial {
        if self.degree() <= 1 {
            return self.primitive();
        }
        let g = rat_gcd(&RatPoly::from_int(self), &RatPoly::from_int(&self.derivative()));
        if g.degree() == 0 {
            return self.primitive();
        }
        let (q, r) = RatPoly::from_int(self).div_rem(&g);
        debug_assert!(r.is_zero());
        q.to_int_primitive()
    }

    /// All rational roots, each listed once.  Uses the rational root
    /// theorem: p/q with p | constant term and q | leading coefficient.
    /// Errors when the constant or leading coefficient is too large for the
    /// divisor search (beyond u128).
    pub fn rational_roots(&self) -> Result<Vec<Rat>> {
        if self.is_zero() {
            return Ok(Vec::new());
        }
        let k = self.trailing_zero_roots();
        let p = self.shift_down(k);
        let mut roots = Vec::new();
        if k > 0 {
            roots.push(Rat::zero());
        }
        if p.degree() == 0 {
            roots.sort();
            return Ok(roots);
        }
        let limit = || Error::FactorizationLimit { degree: p.degree() };
        let nums = divisors_u128(&p.coeff(0).abs()).ok_or_else(limit)?;
        let dens = divisors_u128(&p.leading().abs()).ok_or_else(limit)?;
        for num in &nums {
            for den in &dens {
                for sign in [1i64, -1] {
                    let cand =
                        Rat::new(BigInt::from(sign) * BigInt::from(*num), BigInt::from(*den));
                    if p.eval_rat(&cand).is_zero() && !roots.contains(&cand) {
                        roots.push(cand);
                    }
                }
            }
        }
        roots.sort();
        Ok(roots)
    }

    /// Factors a *squarefree* polynomial into irreducible primitive factors
    /// over the integers, sorted by (degree, coefficients).
    ///
    /// Rational roots are stripped first; remaining factors of degree >= 2
    /// are found by exhaustive Kronecker interpolation, so an un-split
    /// result is a proof of irreducibility.  Degrees beyond
    /// [`FACTOR_DEGREE_CEILING`] or an oversized divisor search report
    /// [`Error::FactorizationLimit`].
    pub fn factor_squarefree(&self) -> Result<Vec<IntPolynomial>> {
        if self.degree() > FACTOR_DEGREE_CEILING {
            return Err(Error::FactorizationLimit {
                degree: self.degree(),
            });
        }
        let mut factors = Vec::new();
        let mut rest = self.primitive();
        if rest.is_zero() || rest.degree() == 0 {
            return Ok(factors);
        }
        // Strip zero roots and rational roots as linear factors.
        let k = rest.trailing_zero_roots();
        for _ in 0..k {
            factors.push(IntPolynomial::from_i64(&[0, 1]));
            rest = rest.shift_down(1);
        }
        for root in rest.rational_roots()? {
            // (q x - p) for root p/q in lowest terms.
            let lin = IntPolynomial::new(vec![-root.numer().clone(), root.denom().clone()]);
            rest = rest
                .div_exact(&lin)
                .expect("verified rational root divides");
            factors.push(lin);
        }
        kronecker_split(&rest.primitive(), &mut factors)?;
        factors.sort_by(|a, b| {
            a.degree()
                .cmp(&b.degree())
                .then_with(|| a.coeffs.cmp(&b.coeffs))
        });
        Ok(factors)
    }
}

/// Shared zero constant for out-of-range coefficient access.
fn zero_bigint() -> &'static BigInt {
    static ZERO: std::sync::OnceLock<BigInt> = std::sync::OnceLock::new();
    ZERO.get_or_init(BigInt::zero)
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let show_coeff = !mag.is_one() || i == 0;
            if show_coeff {
                write!(f, "{mag}")?;
            }
            if i > 0 {
                if show_coeff {
                    write!(f, "*")?;
                }
                write!(f, "x")?;
                if i > 1 {
                    write!(f, "^{i}")?;
                }
            }
        }
        Ok(())
    }
}

/// Recursively splits `p` (squarefree, primitive, no rational roots) into
/// irreducible factors appended to `out`.
fn kronecker_split(p: &IntPolynomial, out: &mut Vec<IntPolynomial>) -> Result<()> {
    let n = p.degree();
    if n == 0 {
        return Ok(());
    }
    if n <= 2 {
        // No rational roots and degree <= 2: irreducible.
        out.push(p.clone());
        return Ok(());
    }
    for k in 2..=n / 2 {
        if let Some(g) = kronecker_find_factor(p, k)? {
            let q = p.div_exact(&g).expect("Kronecker factor divides");
            kronecker_split(&g.primitive(), out)?;
            kronecker_split(&q.primitive(), out)?;
            return Ok(());
        }
    }
    out.push(p.clone());
    Ok(())
}

/// Searches for a degree-`k` integer factor of `p` by interpolating through
/// divisor tuples of `p` at k+1 small integer points.  Exhaustive up to the
/// sign normalization (the value at the first point is kept positive, since
/// factors come in ± pairs).
fn kronecker_find_factor(p: &IntPolynomial, k: usize) -> Result<Option<IntPolynomial>> {
    // Evaluation points 0, 1, -1, 2, -2, ...
    let points: Vec<BigInt> = (0..)
        .map(|i: i64| {
            if i == 0 {
                BigInt::zero()
            } else if i % 2 == 1 {
                BigInt::from((i + 1) / 2)
            } else {
                BigInt::from(-(i / 2))
            }
        })
        .take(k + 1)
        .collect();
    let values: Vec<BigInt> = points.iter().map(|x| p.eval_int(x)).collect();
    debug_assert!(values.iter().all(|v| !v.is_zero()), "no rational roots left");

    let divs: Vec<Vec<BigInt>> = values
        .iter()
        .map(|v| {
            divisors_u128(&v.abs()).map(|ds| {
                let mut all: Vec<BigInt> = Vec::with_capacity(ds.len() * 2);
                for d in ds {
                    all.push(BigInt::from(d));
                    all.push(-BigInt::from(d));
                }
                all
            })
        })
        .collect::<Option<_>>()
        .ok_or(Error::FactorizationLimit { degree: p.degree() })?;

    let mut combos: u128 = divs[0].len() as u128 / 2; // first point: positive only
    for d in &divs[1..] {
        combos = combos.saturating_mul(d.len() as u128);
        if combos > KRONECKER_BUDGET {
            return Err(Error::FactorizationLimit { degree: p.degree() });
        }
    }

    let mut choice = vec![0usize; k + 1];
    loop {
        // Skip negative first-point divisors (sign normalization).
        if !divs[0][choice[0]].is_negative() {
            let samples: Vec<(Rat, Rat)> = (0..=k)
                .map(|i| {
                    (
                        Rat::from_integer(points[i].clone()),
                        Rat::from_integer(divs[i][choice[i]].clone()),
                    )
                })
                .collect();
            if let Some(g) = lagrange_int(&samples) {
                if g.degree() == k && p.div_exact(&g).is_some() {
                    return Ok(Some(g.primitive()));
                }
            }
        }
        // Odometer increment.
        let mut i = 0;
        loop {
            if i > k {
                return Ok(None);
            }
            choice[i] += 1;
            if choice[i] < divs[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Lagrange interpolation; `Some` only when all coefficients are integers.
fn lagrange_int(samples: &[(Rat, Rat)]) -> Option<IntPolynomial> {
    let mut acc = RatPoly::zero();
    for (i, (xi, yi)) in samples.iter().enumerate() {
        let mut term = RatPoly::constant(yi.clone());
        for (j, (xj, _)) in samples.iter().enumerate() {
            if i == j {
                continue;
            }
            let denom = xi - xj;
            // term *= (x - xj) / (xi - xj)
            term = term.mul(&RatPoly::new(vec![-xj / &denom, Rat::one() / denom]));
        }
        acc = acc.add(&term);
    }
    acc.to_int()
}

/// Positive divisors of |n|, provided |n| fits in u128; sorted ascending.
fn divisors_u128(n: &BigInt) -> Option<Vec<u128>> {
    let n: u128 = n.abs().try_into().ok()?;
    if n == 0 {
        return None;
    }
    let mut divs = vec![1u128];
    let mut rest = n;
    let mut factor_exp = Vec::new();
    let mut p: u128 = 2;
    while p * p <= rest {
        if rest % p == 0 {
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            factor_exp.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        factor_exp.push((rest, 1));
    }
    for (p, e) in factor_exp {
        let base = divs.clone();
        let mut pk: u128 = 1;
        for _ in 0..e {
            pk = pk.checked_mul(p)?;
            for d in &base {
                divs.push(d.checked_mul(pk)?);
            }
        }
    }
    divs.sort_unstable();
    Some(divs)
}

// ---------------------------------------------------------------------------
// Rational polynomials (internal helper, also used for number fields).
// ---------------------------------------------------------------------------

/// Polynomial over the rationals, constant-first, trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RatPoly {
    pub coeffs: Vec<Rat>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> RatPoly {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn zero() -> RatPoly {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rat) -> RatPoly {
        RatPoly::new(vec![c])
    }

    pub fn from_int(p: &IntPolynomial) -> RatPoly {
        RatPoly::new(
            p.coeffs()
                .iter()
                .map(|c| Rat::from_integer(c.clone()))
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn scale(&self, s: &Rat) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn neg(&self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn add(&self, other: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![Rat::zero(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i] += c;
        }
        RatPoly::new(out)
    }

    pub fn sub(&self, other: &RatPoly) -> RatPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatPoly) -> RatPoly {
        if self.is_zero() || other.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }

    /// Euclidean division: (quotient, remainder), remainder degree below
    /// the divisor's.
    pub fn div_rem(&self, div: &RatPoly) -> (RatPoly, RatPoly) {
        assert!(!div.is_zero(), "division by zero polynomial");
        let d = div.coeffs.len();
        let mut rem = self.coeffs.clone();
        if rem.len() < d {
            return (RatPoly::zero(), self.clone());
        }
        let mut quot = vec![Rat::zero(); rem.len() - d + 1];
        let dlead = div.leading();
        for i in (0..quot.len()).rev() {
            let c = rem[i + d - 1].clone();
            if c.is_zero() {
                continue;
            }
            let f = c / &dlead;
            for (j, dc) in div.coeffs.iter().enumerate() {
                rem[i + j] = rem[i + j].clone() - &f * dc;
            }
            quot[i] = f;
        }
        (RatPoly::new(quot), RatPoly::new(rem))
    }

    /// Converts to an integer polynomial if every coefficient is integral.
    pub fn to_int(&self) -> Option<IntPolynomial> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            if !c.denom().is_one() {
                return None;
            }
            out.push(c.numer().clone());
        }
        Some(IntPolynomial::new(out))
    }

    /// Clears denominators and returns the primitive integer polynomial with
    /// positive leading coefficient (same roots).
    pub fn to_int_primitive(&self) -> IntPolynomial {
        if self.is_zero() {
            return IntPolynomial::zero();
        }
        let mut lcm = BigInt::one();
        for c in &self.coeffs {
            lcm = num_integer::lcm(lcm, c.denom().clone());
        }
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect();
        IntPolynomial::new(ints).primitive()
    }
}

/// Monic gcd over the rationals.
pub(crate) fn rat_gcd(a: &RatPoly, b: &RatPoly) -> RatPoly {
    let mut a = a.clone();
    let mut b = b.clone();
    while !b.is_zero() {
        let (_, r) = a.div_rem(&b);
        a = b;
        b = r;
    }
    if a.is_zero() {
        return a;
    }
    let lead = a.leading();
    a.scale(&(Rat::one() / lead))
}

// ---------------------------------------------------------------------------
// Sturm chains and real-root isolation.
// ---------------------------------------------------------------------------

/// Sturm chain of a squarefree polynomial.
pub struct SturmChain {
    chain: Vec<RatPoly>,
}

impl SturmChain {
    /// Builds the chain p, p', -rem(p, p'), ...  The input must be
    /// squarefree for exact counting.
    pub fn new(p: &IntPolynomial) -> SturmChain {
        let mut chain = vec![RatPoly::from_int(p), RatPoly::from_int(&p.derivative())];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            if chain[n - 1].degree() == 0 {
                break;
            }
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(r.neg());
        }
        SturmChain { chain }
    }

    /// Sign variations of the chain at `x` (zeros skipped).
    fn variations_at(&self, x: &Rat) -> usize {
        let mut count = 0;
        let mut last: Option<bool> = None;
        for p in &self.chain {
            let v = p.eval(x);
            if v.is_zero() {
                continue;
            }
            let sign = v.is_positive();
            if let Some(prev) = last {
                if prev != sign {
                    count += 1;
                }
            }
            last = Some(sign);
        }
        count
    }

    /// Number of distinct real roots in the half-open interval (lo, hi].
    pub fn count_roots(&self, lo: &Rat, hi: &Rat) -> usize {
        assert!(lo <= hi);
        self.variations_at(lo).saturating_sub(self.variations_at(hi))
    }
}

/// A bound B with every real root of `p` inside (-B, B): Cauchy's bound
/// 1 + max |c_i| / |c_lead|, rounded up to an integer.
pub fn cauchy_bound(p: &IntPolynomial) -> Rat {
    let lead = p.leading().abs();
    let mut max = BigInt::zero();
    for c in &p.coeffs()[..p.coeffs().len().saturating_sub(1)] {
        if c.abs() > max {
            max = c.abs();
        }
    }
    // ceil(max / lead) + 1
    let q = num_integer::Integer::div_ceil(&max, &lead);
    Rat::from_integer(q + BigInt::one())
}

/// Isolates all real roots of a squarefree polynomial: returns half-open
/// intervals (lo, hi], sorted ascending, each containing exactly one root,
/// each of width < 1/2.
pub fn isolate_real_roots(p: &IntPolynomial) -> Vec<(Rat, Rat)> {
    if p.degree() == 0 || p.is_zero() {
        return Vec::new();
    }
    let chain = SturmChain::new(p);
    let b = cauchy_bound(p);
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    let half = Rat::new(BigInt::one(), BigInt::from(2));
    while let Some((lo, hi)) = stack.pop() {
        let n = chain.count_roots(&lo, &hi);
        if n == 0 {
            continue;
        }
        let width = &hi - &lo;
        if n == 1 && width < half {
            out.push((lo, hi));
            continue;
        }
        let mid = (&lo + &hi) / Rat::from_integer(BigInt::from(2));
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Halves an isolating interval of `p` (which must contain exactly one
/// root) until its width is below `target_width`.
pub fn refine_interval(
    chain: &SturmChain,
    interval: (Rat, Rat),
    target_width: &Rat,
) -> (Rat, Rat) {
    let (mut lo, mut hi) = interval;
    let two = Rat::from_integer(BigInt::from(2));
    loop {
        let width = &hi - &lo;
        if &width < target_width {
            return (lo, hi);
        }
        let mid = (&lo + &hi) / &two;
        if chain.count_roots(&lo, &mid) == 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}
