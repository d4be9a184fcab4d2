//! Bottom-up merge sort.
//!
//! Runs of length `s` are merged pairwise into runs of length `2s`, one pass
//! per level, starting from `s = 1` until a single run covers the array. No
//! recursion and no explicit stack: each pass walks the array with a cursor
//! `j` that moves in steps of `2s`.
//!
//! In `Full` mode every loop checks its invariant before the first
//! iteration, after each iteration and at exit, and checks that its variant
//! strictly decreases.

use crate::contracts::{check_variant, ensure, Breach, Checker, Location, Proviso, Violation};
use crate::order::{is_perm, is_sorted, outside_unchanged, uniformly_leq, SliceBounds, Snapshot};
use crate::trace::Phase;
use crate::Fault;

pub const ALGO: &str = "iter";

/// Position of the sort loop: current run length `s` and pass cursor `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelState {
    pub s: usize,
    pub j: usize,
}

/// Every window `a[l..min(l + width, n))` with `l` a multiple of `width` in
/// `[from, to)` is sorted.
pub fn runs_sorted<T: Ord>(a: &[T], width: usize, from: usize, to: usize) -> bool {
    let n = a.len();
    let first = from.div_ceil(width) * width;
    (first..to.min(n))
        .step_by(width)
        .all(|l| is_sorted(&a[l..(l + width).min(n)]))
}

fn variant_breach(what: &'static str) -> impl FnOnce(crate::contracts::VariantFailure) -> Breach {
    move |v| Breach {
        proviso: Proviso::LoopVariant,
        detail: format!("{what}: {v}"),
    }
}

/// Sorts `a` in place. Empty input returns immediately.
pub fn merge_sort_iter<T: Ord + Clone>(a: &mut [T], ctx: &Checker) -> Result<(), Violation<T>> {
    if a.is_empty() {
        return Ok(());
    }
    merge_sort_nonempty(a, ctx)
}

/// The sort loop proper; requires `a.len() >= 1`.
pub fn merge_sort_nonempty<T: Ord + Clone>(a: &mut [T], ctx: &Checker) -> Result<(), Violation<T>> {
    let n = a.len();
    let loc = || Location::new(ALGO, "merge_sort", 0, n, n);
    if n == 0 {
        let snap = Snapshot::capture(a);
        return Err(Violation::new(Proviso::Pre, loc(), "array must be non-empty", &snap, a));
    }
    let check = ctx.contracts();
    let full = ctx.full();
    let old = check.then(|| Snapshot::capture(a));

    let invariant = |a: &[T], state: LevelState, old: &[T]| {
        ensure(state.s >= 1, Proviso::LoopInvariant, || "s >= 1".into())
            .and_then(|()| {
                ensure(runs_sorted(a, state.s, 0, n), Proviso::LoopInvariant, || {
                    format!("some run of length {} is unsorted", state.s)
                })
            })
            .and_then(|()| ensure(is_perm(a, old), Proviso::LoopInvariant, || "a is not a permutation of old(a)".into()))
    };

    let mut state = LevelState { s: 1, j: 0 };
    let mut pass = 0u32;
    if full {
        let old = old.as_ref().expect("full mode snapshots");
        invariant(a, state, old).map_err(|e| e.at(loc(), old, a))?;
    }
    while state.s < n {
        ctx.emit(ALGO, Phase::LevelPass, 0, None, n, pass, Some(state.s));
        ctx.note_pass();
        ctx.nested(|| merges(a, state.s, ctx))?;
        let prev = n - state.s;
        state.s *= 2;
        pass += 1;
        if full {
            let old = old.as_ref().expect("full mode snapshots");
            invariant(a, state, old)
                .and_then(|()| {
                    check_variant(prev as i64, n.saturating_sub(state.s) as i64)
                        .map_err(variant_breach("n - s"))
                })
                .map_err(|e| e.at(loc(), old, a))?;
        }
    }
    if let Some(old) = &old {
        // 0 is a multiple of s and s >= n, so the first run is the whole array
        ensure(state.s >= n && state.s >= 1, Proviso::LoopInvariant, || "loop exited with s < n".into())
            .and_then(|()| ensure(is_sorted(a), Proviso::Post, || "a is not sorted".into()))
            .and_then(|()| ensure(is_perm(a, old), Proviso::Post, || "a is not a permutation of old(a)".into()))
            .map_err(|e| e.at(loc(), old, a))?;
    }
    Ok(())
}

/// One pass: merges every pair of adjacent length-`s` runs.
pub fn merges<T: Ord + Clone>(a: &mut [T], s: usize, ctx: &Checker) -> Result<(), Violation<T>> {
    let n = a.len();
    let loc = || Location::new(ALGO, "merges", 0, n, n);
    if n == 0 || s == 0 {
        let snap = Snapshot::capture(a);
        return Err(Violation::new(Proviso::Pre, loc(), "need a.len() >= 1 and s >= 1", &snap, a));
    }
    let check = ctx.contracts();
    let full = ctx.full();
    let old = check.then(|| Snapshot::capture(a));
    if let Some(old) = &old {
        ensure(runs_sorted(a, s, 0, n), Proviso::Pre, || format!("runs of length {s} must be sorted"))
            .map_err(|e| e.at(loc(), old, a))?;
    }

    let invariant = |a: &[T], j: usize, old: &[T]| {
        ensure(j <= n, Proviso::LoopInvariant, || format!("j={j} > n"))
            .and_then(|()| {
                ensure(j == n || j.is_multiple_of(2 * s), Proviso::LoopInvariant, || {
                    format!("j={j} is not a multiple of 2s={}", 2 * s)
                })
            })
            .and_then(|()| {
                ensure(runs_sorted(a, 2 * s, 0, j), Proviso::LoopInvariant, || {
                    format!("a run of length {} before j={j} is unsorted", 2 * s)
                })
            })
            .and_then(|()| {
                ensure(runs_sorted(a, s, j, n), Proviso::LoopInvariant, || {
                    format!("a run of length {s} from j={j} on is unsorted")
                })
            })
            .and_then(|()| ensure(is_perm(a, old), Proviso::LoopInvariant, || "a is not a permutation of old(a)".into()))
    };

    let mut j = 0;
    if full {
        let old = old.as_ref().expect("full mode snapshots");
        invariant(a, j, old).map_err(|e| e.at(loc(), old, a))?;
    }
    while j != n {
        ctx.nested(|| merge_pair(a, j, s, ctx))?;
        let prev = n - j;
        j = (j + 2 * s).min(n);
        if full {
            let old = old.as_ref().expect("full mode snapshots");
            invariant(a, j, old)
                .and_then(|()| {
                    check_variant(prev as i64, (n - j) as i64)
                        .map_err(variant_breach("n - j"))
                })
                .map_err(|e| e.at(loc(), old, a))?;
        }
    }
    if let Some(old) = &old {
        ensure(runs_sorted(a, 2 * s, 0, n), Proviso::Post, || format!("some run of length {} is unsorted", 2 * s))
            .and_then(|()| ensure(is_perm(a, old), Proviso::Post, || "a is not a permutation of old(a)".into()))
            .map_err(|e| e.at(loc(), old, a))?;
    }
    Ok(())
}

/// Merges the sorted runs `a[l..l+s)` and `a[l+s..l+2s)` (clipped to the
/// array). A no-op when the second run is empty.
pub fn merge_pair<T: Ord + Clone>(a: &mut [T], l: usize, s: usize, ctx: &Checker) -> Result<(), Violation<T>> {
    let n = a.len();
    let mid = (l + s).min(n);
    let end = (l + 2 * s).min(n);
    let loc = || Location::new(ALGO, "merge_pair", l, end, n);
    if !(l < n && s >= 1) {
        let snap = Snapshot::capture(a);
        return Err(Violation::new(Proviso::Pre, loc(), format!("need l < {n} and s >= 1"), &snap, a));
    }
    let check = ctx.contracts();
    let old = check.then(|| Snapshot::capture(a));
    if let Some(old) = &old {
        ensure(is_sorted(&a[l..mid]) && is_sorted(&a[mid..end]), Proviso::Pre, || {
            "both runs must be sorted".into()
        })
        .map_err(|e| e.at(loc(), old, a))?;
    }

    if l + s < n {
        let s2 = s.min(n - (l + s));
        let fill = a[l].clone();
        let mut left = vec![fill.clone(); s];
        let mut right = vec![fill.clone(); s2];
        let mut merged = vec![fill; s + s2];
        // Helper violations describe the scratch buffers; report them here.
        let lift = |v: Violation<T>, a: &[T]| {
            let snap = old.clone().unwrap_or_else(|| Snapshot::capture(a));
            let mut out = Breach {
                proviso: v.proviso,
                detail: format!("in {}: {}", v.location, v.detail),
            }
            .at(loc(), &snap, a);
            out.operands.push(v.after);
            out.operands.extend(v.operands);
            out
        };
        ctx.nested(|| copy(a, l, &mut left, 0, s, ctx)).map_err(|v| lift(v, a))?;
        ctx.nested(|| copy(a, l + s, &mut right, 0, s2, ctx)).map_err(|v| lift(v, a))?;
        ctx.nested(|| merge_iter(&left, &right, &mut merged, ctx)).map_err(|v| lift(v, a))?;
        if !ctx.has_fault(Fault::MergePairNoCopyBack) {
            ctx.nested(|| copy(&merged, 0, a, l, s + s2, ctx)).map_err(|v| lift(v, a))?;
        }
    }

    if let Some(old) = &old {
        ensure(is_sorted(&a[l..end]), Proviso::Post, || format!("a[{l}..{end}) is not sorted"))
            .and_then(|()| ensure(is_perm(a, old), Proviso::Post, || "a is not a permutation of old(a)".into()))
            .and_then(|()| {
                let w = SliceBounds::new(l, end, n).expect("l < n");
                ensure(outside_unchanged(old, a, w).unwrap_or(false), Proviso::NonInterference, || {
                    format!("a modified outside [{l}..{end})")
                })
            })
            .map_err(|e| e.at(loc(), old, a))?;
    }
    Ok(())
}

/// Merges sorted `a` and sorted `b` into `c`, which must have length
/// `a.len() + b.len()`.
pub fn merge_iter<T: Ord + Clone>(a: &[T], b: &[T], c: &mut [T], ctx: &Checker) -> Result<(), Violation<T>> {
    let loc = || Location::new(ALGO, "merge_iter", 0, c.len(), c.len());
    let fail = |e: Breach, before: &Snapshot<T>, c: &[T]| {
        e.at(Location::new(ALGO, "merge_iter", 0, c.len(), c.len()), before, c)
            .with_operand(a)
            .with_operand(b)
    };
    if c.len() != a.len() + b.len() {
        let snap = Snapshot::capture(c);
        return Err(Violation::new(
            Proviso::Pre,
            loc(),
            format!("output has length {}, inputs total {}", c.len(), a.len() + b.len()),
            &snap,
            c,
        )
        .with_operand(a)
        .with_operand(b));
    }
    let check = ctx.contracts();
    let full = ctx.full();
    let old = check.then(|| Snapshot::capture(c));
    if let Some(old) = &old {
        ensure(is_sorted(a) && is_sorted(b), Proviso::Pre, || "inputs must be sorted".into())
            .map_err(|e| fail(e, old, c))?;
    }

    // Which unconsumed suffixes the written prefix must be bounded by.
    #[derive(Clone, Copy)]
    enum Stage {
        Main,
        DrainA,
        DrainB,
    }
    let invariant = |c: &[T], i: usize, j: usize, k: usize, stage: Stage| {
        let written = &c[..k];
        ensure(i <= a.len() && j <= b.len() && k == i + j, Proviso::LoopInvariant, || {
            format!("k={k} != i={i} + j={j}")
        })
        .and_then(|()| ensure(is_sorted(written), Proviso::LoopInvariant, || "c[..k) is not sorted".into()))
        .and_then(|()| {
            let bound_a = !matches!(stage, Stage::DrainB);
            let bound_b = !matches!(stage, Stage::DrainA);
            ensure(
                (!bound_a || uniformly_leq(written, &a[i..])) && (!bound_b || uniformly_leq(written, &b[j..])),
                Proviso::LoopInvariant,
                || "a written element exceeds an unconsumed input".into(),
            )
        })
        .and_then(|()| {
            ensure(is_perm(written, &[&a[..i], &b[..j]].concat()), Proviso::LoopInvariant, || {
                "c[..k) is not a permutation of a[..i) ++ b[..j)".into()
            })
        })
    };
    let variant = |prev: usize, i: usize, j: usize| {
        let cur = (a.len() - i) + (b.len() - j);
        check_variant(prev as i64, cur as i64).map_err(|v| Breach {
            proviso: Proviso::LoopVariant,
            detail: format!("remaining input: {v}"),
        })
    };
    let remaining = |i: usize, j: usize| (a.len() - i) + (b.len() - j);

    let (mut i, mut j, mut k) = (0, 0, 0);
    if let Some(old) = &old.as_ref().filter(|_| full) {
        invariant(c, i, j, k, Stage::Main).map_err(|e| fail(e, old, c))?;
    }
    while i < a.len() && j < b.len() {
        let prev = remaining(i, j);
        if ctx.le(&a[i], &b[j]) {
            c[k] = a[i].clone();
            i += 1;
        } else {
            c[k] = b[j].clone();
            j += 1;
        }
        k += 1;
        if let Some(old) = &old.as_ref().filter(|_| full) {
            invariant(c, i, j, k, Stage::Main)
                .and_then(|()| variant(prev, i, j))
                .map_err(|e| fail(e, old, c))?;
        }
    }

    if !ctx.has_fault(Fault::MergeIterNoDrain) {
        while i < a.len() {
            let prev = remaining(i, j);
            c[k] = a[i].clone();
            i += 1;
            k += 1;
            if let Some(old) = &old.as_ref().filter(|_| full) {
                invariant(c, i, j, k, Stage::DrainA)
                    .and_then(|()| variant(prev, i, j))
                    .map_err(|e| fail(e, old, c))?;
            }
        }
        while j < b.len() {
            let prev = remaining(i, j);
            c[k] = b[j].clone();
            j += 1;
            k += 1;
            if let Some(old) = &old.as_ref().filter(|_| full) {
                invariant(c, i, j, k, Stage::DrainB)
                    .and_then(|()| variant(prev, i, j))
                    .map_err(|e| fail(e, old, c))?;
            }
        }
    }

    if let Some(old) = &old {
        ensure(is_sorted(c), Proviso::Post, || "c is not sorted".into())
            .and_then(|()| {
                ensure(is_perm(c, &[a, b].concat()), Proviso::Post, || {
                    "c is not a permutation of a ++ b".into()
                })
            })
            .map_err(|e| fail(e, old, c))?;
    }
    Ok(())
}

/// Copies `src[i..i+len)` over `dest[j..j+len)`.
///
/// The source and destination must be distinct arrays. That is enforced by
/// the borrow checker rather than at runtime:
///
/// ```compile_fail
/// use dcsort::{copy, Checker, CheckMode};
/// let mut a = vec![1];
/// let ctx = Checker::new(CheckMode::Full);
/// copy(&a, 0, &mut a, 0, 1, &ctx).unwrap();
/// ```
pub fn copy<T: Ord + Clone>(
    src: &[T],
    i: usize,
    dest: &mut [T],
    j: usize,
    len: usize,
    ctx: &Checker,
) -> Result<(), Violation<T>> {
    let dn = dest.len();
    let loc = || Location::new(ALGO, "copy", j, j + len, dn);
    let in_bounds = i < src.len() && j < dest.len() && i + len <= src.len() && j + len <= dest.len();
    if !in_bounds {
        let snap = Snapshot::capture(dest);
        return Err(Violation::new(
            Proviso::Pre,
            loc(),
            format!(
                "need i < {} and j < {} with i+len <= {} and j+len <= {}; got i={i} j={j} len={len}",
                src.len(),
                dest.len(),
                src.len(),
                dest.len()
            ),
            &snap,
            dest,
        )
        .with_operand(src));
    }
    let old = ctx.contracts().then(|| Snapshot::capture(dest));
    dest[j..j + len].clone_from_slice(&src[i..i + len]);
    if let Some(old) = &old {
        ensure(dest[j..j + len] == src[i..i + len], Proviso::Post, || "copied window differs from source".into())
            .and_then(|()| {
                let w = SliceBounds::new(j, j + len, dest.len()).expect("checked above");
                ensure(outside_unchanged(old, dest, w).unwrap_or(false), Proviso::NonInterference, || {
                    "dest modified outside the copied window".into()
                })
            })
            .map_err(|e| e.at(loc(), old, dest).with_operand(src))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contracts::CheckMode;
    use crate::merge_rec::ceil_log2;
    use crate::test_oracle::{all_arrays, insertion_sort};

    fn full() -> Checker {
        Checker::new(CheckMode::Full)
    }

    #[test]
    fn sort_examples() {
        for input in [vec![5], vec![3, 1], vec![2, 1, 4, 3], vec![]] {
            let mut a = input.clone();
            merge_sort_iter(&mut a, &full()).unwrap();
            assert_eq!(a, insertion_sort(&input));
        }
    }

    #[test]
    fn core_loop_rejects_empty() {
        let mut a: Vec<i64> = vec![];
        let v = merge_sort_nonempty(&mut a, &Checker::new(CheckMode::Unchecked)).unwrap_err();
        assert_eq!(v.proviso, Proviso::Pre);
    }

    #[test]
    fn merges_examples() {
        let ctx = full();
        let mut a = vec![2, 1, 4, 3];
        merges(&mut a, 1, &ctx).unwrap();
        assert_eq!(a, vec![1, 2, 3, 4]);
        let mut a = vec![1, 2, 3];
        merges(&mut a, 4, &ctx).unwrap();
        assert_eq!(a, vec![1, 2, 3]);
        let mut a = vec![3, 1, 2];
        merges(&mut a, 1, &ctx).unwrap();
        assert_eq!(a, vec![1, 3, 2]);
        assert!(runs_sorted(&a, 2, 0, 3));
    }

    #[test]
    fn merges_requires_sorted_runs() {
        let mut a = vec![2, 1, 4, 3];
        let v = merges(&mut a, 2, &full()).unwrap_err();
        assert_eq!(v.proviso, Proviso::Pre);
        assert_eq!(merges(&mut a, 0, &full()).unwrap_err().proviso, Proviso::Pre);
    }

    #[test]
    fn merge_pair_examples() {
        let ctx = full();
        let mut a = vec![2, 1, 4, 3];
        merge_pair(&mut a, 0, 1, &ctx).unwrap();
        assert_eq!(a, vec![1, 2, 4, 3]);
        let mut a = vec![1, 2, 9];
        merge_pair(&mut a, 2, 1, &ctx).unwrap();
        assert_eq!(a, vec![1, 2, 9]);
        let mut a = vec![1, 4, 2, 3];
        merge_pair(&mut a, 0, 2, &ctx).unwrap();
        assert_eq!(a, vec![1, 2, 3, 4]);
    }

    #[test]
    fn merge_pair_without_copy_back_is_caught() {
        let ctx = full().with_fault(Fault::MergePairNoCopyBack);
        let mut a = vec![2, 1];
        let v = merge_pair(&mut a, 0, 1, &ctx).unwrap_err();
        assert_eq!(v.proviso, Proviso::Post);
        assert_eq!(v.location.op, "merge_pair");
    }

    #[test]
    fn merge_iter_examples() {
        let ctx = full();
        let mut c: [i64; 0] = [];
        merge_iter(&[], &[], &mut c, &ctx).unwrap();
        let mut c = [0; 3];
        merge_iter(&[1, 3], &[2], &mut c, &ctx).unwrap();
        assert_eq!(c, insertion_sort(&[1, 3, 2]).as_slice());
        merge_iter(&[1, 1], &[1], &mut c, &ctx).unwrap();
        assert_eq!(c, [1, 1, 1]);
    }

    #[test]
    fn merge_iter_length_mismatch() {
        let mut c = [0; 2];
        let v = merge_iter(&[1, 3], &[2], &mut c, &Checker::new(CheckMode::Unchecked)).unwrap_err();
        assert_eq!(v.proviso, Proviso::Pre);
        assert_eq!(v.operands.len(), 2);
    }

    #[test]
    fn merge_iter_without_drain_is_caught() {
        let ctx = full().with_fault(Fault::MergeIterNoDrain);
        let mut c = [0; 3];
        let v = merge_iter(&[1, 3], &[2], &mut c, &ctx).unwrap_err();
        assert_eq!(v.proviso, Proviso::Post);
    }

    #[test]
    fn copy_examples() {
        let ctx = full();
        let mut dest = [0, 0, 0];
        copy(&[1, 2, 3], 0, &mut dest, 0, 3, &ctx).unwrap();
        assert_eq!(dest, [1, 2, 3]);
        let mut dest = [9, 9, 9];
        copy(&[1, 2, 3], 1, &mut dest, 0, 2, &ctx).unwrap();
        assert_eq!(dest, [2, 3, 9]);
    }

    #[test]
    fn copy_bounds() {
        let ctx = Checker::new(CheckMode::Unchecked);
        let mut dest = [0, 0];
        assert_eq!(copy(&[1, 2], 1, &mut dest, 0, 2, &ctx).unwrap_err().proviso, Proviso::Pre);
        assert_eq!(copy(&[1, 2], 0, &mut dest, 1, 2, &ctx).unwrap_err().proviso, Proviso::Pre);
        // i must index into src even for an empty copy
        assert_eq!(copy(&[1, 2], 2, &mut dest, 0, 0, &ctx).unwrap_err().proviso, Proviso::Pre);
        assert_eq!(dest, [0, 0]);
    }

    #[test]
    fn runs_sorted_windows() {
        assert!(runs_sorted(&[2, 3, 1], 2, 0, 3));
        assert!(!runs_sorted(&[3, 2, 1], 2, 0, 3));
        assert!(runs_sorted(&[3, 2, 1, 5], 2, 1, 4));
        assert!(runs_sorted::<i64>(&[], 1, 0, 0));
    }

    #[test]
    fn pass_count_is_ceil_log2() {
        for n in 1..=300usize {
            let ctx = Checker::new(CheckMode::Unchecked);
            let mut a: Vec<i64> = (0..n as i64).rev().collect();
            merge_sort_iter(&mut a, &ctx).unwrap();
            assert_eq!(ctx.passes(), ceil_log2(n), "n={n}");
        }
    }

    #[test]
    fn exhaustive_small_arrays() {
        for len in 0..=8 {
            for input in all_arrays(len, 3) {
                let mut a = input.clone();
                merge_sort_iter(&mut a, &full()).unwrap();
                assert_eq!(a, insertion_sort(&input));
            }
        }
    }
}
