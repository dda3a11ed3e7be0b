//! Built-in morphisms used throughout the tests and as known-answer inputs.

use crate::words::Morphism;

/// Thue–Morse: 0 -> 01, 1 -> 10.  2-uniform, primitive, aperiodic.
pub fn thue_morse() -> Morphism {
    Morphism::from_rules(&["0", "1"], &[("0", "0 1"), ("1", "1 0")], "0", &[]).unwrap()
}

/// Period doubling: 0 -> 01, 1 -> 00.  2-uniform, primitive, aperiodic.
pub fn period_doubling() -> Morphism {
    Morphism::from_rules(&["0", "1"], &[("0", "0 1"), ("1", "0 0")], "0", &[]).unwrap()
}

/// Rudin–Shapiro presentation: 2-uniform on four letters with the usual
/// two-letter coding.
pub fn rudin_shapiro() -> Morphism {
    Morphism::from_rules(
        &["a", "b", "c", "d"],
        &[("a", "a b"), ("b", "a c"), ("c", "d b"), ("d", "d c")],
        "a",
        &[("a", "0"), ("b", "0"), ("c", "1"), ("d", "1")],
    )
    .unwrap()
}

/// Base-3 digit sum mod 3: 0 -> 012, 1 -> 120, 2 -> 201.  3-uniform,
/// primitive, aperiodic.
pub fn digit_sum_base3() -> Morphism {
    Morphism::from_rules(
        &["0", "1", "2"],
        &[("0", "0 1 2"), ("1", "1 2 0"), ("2", "2 0 1")],
        "0",
        &[],
    )
    .unwrap()
}

/// Fibonacci word: 0 -> 01, 1 -> 0.  Non-uniform, primitive; the dominant
/// eigenvalue is the golden ratio.
pub fn fibonacci_word() -> Morphism {
    Morphism::from_rules(&["0", "1"], &[("0", "0 1"), ("1", "0")], "0", &[]).unwrap()
}

/// a -> aab, b -> b.  Non-primitive; the fixed point has quadratic block
/// complexity and runs of b's of every length.
pub fn aab() -> Morphism {
    Morphism::from_rules(&["a", "b"], &[("a", "a a b"), ("b", "b")], "a", &[]).unwrap()
}

/// 1 -> 121, 2 -> 12221.  Non-uniform with dominant eigenvalue 4; the
/// subsequences at indices 4^k · n are pairwise distinct.
pub fn m_121_12221() -> Morphism {
    Morphism::from_rules(&["1", "2"], &[("1", "1 2 1"), ("2", "1 2 2 2 1")], "1", &[]).unwrap()
}

/// 1 -> 2, 2 -> 211 (fixed point from 2).  Primitive, determinant -2; its
/// transition matrix is [[0,2],[1,1]] in alphabet order (1, 2).
pub fn m_2_211() -> Morphism {
    Morphism::from_rules(&["1", "2"], &[("1", "2"), ("2", "2 1 1")], "2", &[]).unwrap()
}

/// The Grigorchuk-group morphism a -> aca, b -> d, c -> aba, d -> c.
pub fn grigorchuk() -> Morphism {
    Morphism::from_rules(
        &["a", "b", "c", "d"],
        &[("a", "a c a"), ("b", "d"), ("c", "a b a"), ("d", "c")],
        "a",
        &[],
    )
    .unwrap()
}

/// a -> aaab, b -> aaabaaab.  Non-uniform with integer dominant eigenvalue 5
/// and singular transition matrix [[3,6],[1,2]].
pub fn m_aaab_aaabaaab() -> Morphism {
    Morphism::from_rules(
        &["a", "b"],
        &[("a", "a a a b"), ("b", "a a a b a a a b")],
        "a",
        &[],
    )
    .unwrap()
}

/// 0 -> 0101, 1 -> 01: degenerate periodic fixed point (01)^inf.
pub fn periodic_square() -> Morphism {
    Morphism::from_rules(&["0", "1"], &[("0", "0 1 0 1"), ("1", "0 1")], "0", &[]).unwrap()
}

/// A Thue–Morse variant 0 -> 01, 1 -> 11 whose fixed point is eventually
/// constant; its transition matrix is invertible with determinant 2.
pub fn tm_variant_01_11() -> Morphism {
    Morphism::from_rules(&["0", "1"], &[("0", "0 1"), ("1", "1 1")], "0", &[]).unwrap()
}

/// Every catalogue morphism, for sweep-style property tests.
pub fn all() -> Vec<Morphism> {
    vec![
        thue_morse(),
        period_doubling(),
        rudin_shapiro(),
        digit_sum_base3(),
        fibonacci_word(),
        aab(),
        m_121_12221(),
        m_2_211(),
        grigorchuk(),
        m_aaab_aaabaaab(),
        periodic_square(),
        tm_variant_01_11(),
    ]
}

/// The uniform, aperiodic catalogue entries (known q-automatic inputs used
/// by soundness regressions).
pub fn uniform_aperiodic() -> Vec<Morphism> {
    vec![
        thue_morse(),
        period_doubling(),
        rudin_shapiro(),
        digit_sum_base3(),
    ]
}
