//! The sequence and index facts the algorithms' correctness arguments lean on,
//! stated as executable implications.
//!
//! Each function returns `true` when the implication holds for its arguments
//! (vacuously so when the premise is false). Out-of-range indices make the
//! premise false rather than panicking.

use crate::order::{is_perm, is_sorted, uniformly_leq};

/// `u = v` implies `u[p..q) = v[p..q)`.
pub fn sub_eq<T: PartialEq>(u: &[T], v: &[T], p: usize, q: usize) -> bool {
    if u != v || p > q || q > u.len() {
        return true;
    }
    u[p..q] == v[p..q]
}

/// Permutation is preserved by concatenation.
pub fn perm_sum<T: Ord + Clone>(a: &[T], b: &[T], c: &[T], d: &[T]) -> bool {
    if !(is_perm(a, b) && is_perm(c, d)) {
        return true;
    }
    is_perm(&[a, c].concat(), &[b, d].concat())
}

/// Every window of a sorted sequence is sorted.
pub fn sub_sorted<T: Ord>(s: &[T], p: usize, q: usize) -> bool {
    if !is_sorted(s) || p > q || q > s.len() {
        return true;
    }
    is_sorted(&s[p..q])
}

/// Uniform bounds survive permuting either side.
pub fn perm_leqs<T: Ord>(s: &[T], t: &[T], s2: &[T], t2: &[T]) -> bool {
    if !(uniformly_leq(s, t) && is_perm(s, s2) && is_perm(t, t2)) {
        return true;
    }
    uniformly_leq(s2, t2)
}

/// A multiple of `2s` is a multiple of `s`.
pub fn double_multiple_is_multiple(j: usize, s: usize) -> bool {
    if s == 0 || !j.is_multiple_of(2 * s) {
        return true;
    }
    j.is_multiple_of(s)
}

/// Distinct multiples of `step` are at least `step` apart: `l < j` with both
/// multiples of `step` gives `l + step <= j`.
pub fn multiples_are_spaced(j: usize, l: usize, step: usize) -> bool {
    if step == 0 || !j.is_multiple_of(step) || !l.is_multiple_of(step) || l >= j {
        return true;
    }
    l + step <= j
}

/// Stepping a multiple of `step` by `step` keeps it a multiple.
pub fn step_keeps_multiple(j: usize, step: usize) -> bool {
    if step == 0 || !j.is_multiple_of(step) {
        return true;
    }
    (j + step).is_multiple_of(step)
}
