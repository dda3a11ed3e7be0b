//! Exact integer matrices: transition matrices of morphisms, primitivity,
//! and characteristic polynomials.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::poly::IntPolynomial;
use crate::words::Morphism;
use crate::{Error, Result};

/// A square matrix over arbitrary-precision integers, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    dim: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    /// Builds a `dim x dim` matrix from row-major entries.
    pub fn new(dim: usize, entries: Vec<BigInt>) -> Result<IntMatrix> {
        if entries.len() != dim * dim {
            return Err(Error::ParameterInvalid(format!(
                "{} entries for a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        Ok(IntMatrix { dim, entries })
    }

    /// Builds a matrix from machine integers, row-major.
    pub fn from_i64(dim: usize, entries: &[i64]) -> Result<IntMatrix> {
        IntMatrix::new(dim, entries.iter().map(|&e| BigInt::from(e)).collect())
    }

    pub fn zero(dim: usize) -> IntMatrix {
        IntMatrix {
            dim,
            entries: vec![BigInt::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> IntMatrix {
        let mut m = IntMatrix::zero(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = BigInt::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &BigInt {
        &self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: BigInt) {
        self.entries[row * self.dim + col] = v;
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.dim, other.dim);
        IntMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = IntMatrix::zero(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * d + j] += a * b;
                    }
                }
            }
        }
        out
    }

    /// `self` raised to the `k`-th power by repeated squaring.
    pub fn pow(&self, k: u32) -> IntMatrix {
        let mut result = IntMatrix::identity(self.dim);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Column sums.  For a transition matrix of `phi`, the `j`-th column sum
    /// of the `k`-th power is `|phi^k(a_j)|`.
    pub fn column_sums(&self) -> Vec<BigInt> {
        let d = self.dim;
        (0..d)
            .map(|j| (0..d).map(|i| self.get(i, j).clone()).sum())
            .collect()
    }

    pub fn trace(&self) -> BigInt {
        (0..self.dim).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn is_entrywise_positive(&self) -> bool {
        self.entries.iter().all(|e| e.is_positive())
    }

    /// Determinant, via the constant term of the characteristic polynomial.
    pub fn det(&self) -> BigInt {
        let p = char_poly(self);
        let c0 = p.coeff(0);
        if self.dim % 2 == 0 {
            c0.clone()
        } else {
            -c0.clone()
        }
    }

    /// Applies a simultaneous row/column permutation (conjugation by the
    /// permutation matrix): entry (i, j) moves to (perm[i], perm[j]).
    pub fn permuted(&self, perm: &[usize]) -> IntMatrix {
        assert_eq!(perm.len(), self.dim);
        let mut out = IntMatrix::zero(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.set(perm[i], perm[j], self.get(i, j).clone());
            }
        }
        out
    }
}

/// Transition matrix of a morphism: entry (i, j) counts occurrences of
/// letter `a_i` in the image of letter `a_j`, so column `j` sums to
/// `|phi(a_j)|`.
pub fn transition_matrix(m: &Morphism) -> IntMatrix {
    let d = m.alphabet().len();
    let mut out = IntMatrix::zero(d);
    for j in 0..d {
        for &l in m.image(j as u8) {
            let cur = out.get(l as usize, j).clone();
            out.set(l as usize, j, cur + 1);
        }
    }
    out
}

/// Primitivity test for a non-negative matrix.
///
/// Uses the standard criterion: `(I + M)^(d-1)` entrywise positive.  For
/// matrices of prolongable morphisms (which have a positive diagonal entry)
/// this coincides with the combinatorial definition that some `phi^d`
/// maps every letter to a word containing every letter.
pub fn is_primitive(m: &IntMatrix) -> bool {
    let d = m.dim();
    if d == 1 {
        return m.get(0, 0).is_positive();
    }
    m.add(&IntMatrix::identity(d))
        .pow(d as u32 - 1)
        .is_entrywise_positive()
}

/// Characteristic polynomial `det(xI - M)` by the Faddeev–LeVerrier
/// recurrence, which stays in exact integers (every division is exact).
/// Coefficients are returned constant-first; the polynomial is monic.
pub fn char_poly(m: &IntMatrix) -> IntPolynomial {
    let d = m.dim();
    let mut coeffs = vec![BigInt::zero(); d + 1];
    coeffs[d] = BigInt::one();
    let mut a = m.clone();
    let mut c = BigInt::zero();
    for k in 1..=d {
        if k > 1 {
            let mut shifted = a.clone();
            for i in 0..d {
                let v = shifted.get(i, i).clone();
                shifted.set(i, i, v + &c);
            }
            a = m.mul(&shifted);
        }
        let tr = a.trace();
        let kk = BigInt::from(k as i64);
        debug_assert!((&tr % &kk).is_zero(), "Faddeev-LeVerrier division is exact");
        c = -(tr / kk);
        coeffs[d - k] = c.clone();
    }
    IntPolynomial::new(coeffs)
}
