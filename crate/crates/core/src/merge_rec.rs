//! Recursive merge of two sorted windows into a fresh sequence.
//!
//! The principal window is split around its middle element `a[m]`; a binary
//! search ([`fp`]) cuts the secondary window at the point where `a[m]`
//! belongs, and the two halves are merged independently. The result is
//! `merge(left) ++ [a[m]] ++ merge(right)`.

use crate::contracts::{ensure, Checker, Location, Proviso, Violation};
use crate::order::{is_perm, is_sorted, uniformly_leq, SliceBounds, Snapshot};
use crate::schema::{run_two_array, TwoArrayPartition, TwoArraySchemaParts};
use crate::Fault;

pub const ALGO: &str = "merge";

/// Partition point of `x` in the sorted window `b[l..r)`: an index `m` with
/// `b[l..m) <= x <= b[m..r)`.
pub fn fp<T: Ord + Clone>(x: &T, b: &[T], l: usize, r: usize, ctx: &Checker) -> Result<usize, Violation<T>> {
    fp_with_depth(x, b, l, r, ctx).map(|(m, _)| m)
}

/// As [`fp`], also returning how many recursive calls the search made.
pub fn fp_with_depth<T: Ord + Clone>(
    x: &T,
    b: &[T],
    l: usize,
    r: usize,
    ctx: &Checker,
) -> Result<(usize, u32), Violation<T>> {
    let loc = || Location::new(ALGO, "fp", l, r, b.len());
    let fail = |e: crate::contracts::Breach| {
        let snap = Snapshot::capture(b);
        e.at(loc(), &snap, b).with_operand(std::slice::from_ref(x))
    };
    if !(l <= r && r <= b.len()) {
        return Err(fail(crate::contracts::Breach {
            proviso: Proviso::Pre,
            detail: format!("need 0 <= l <= r <= {}", b.len()),
        }));
    }
    let check = ctx.contracts();
    if check {
        ensure(is_sorted(&b[l..r]), Proviso::Pre, || "b[l..r) is not sorted".into()).map_err(fail)?;
    }

    let (m, depth) = if ctx.has_fault(Fault::FpReturnsLeft) {
        (l, 0)
    } else {
        search(x, b, l, r, ctx)
    };

    if check {
        ensure(l <= m && m <= r, Proviso::Post, || format!("m={m} outside [{l}..{r}]"))
            .and_then(|()| {
                ensure(b[l..m].iter().all(|y| y <= x), Proviso::Post, || {
                    format!("some b[i] > x left of m={m}")
                })
            })
            .and_then(|()| {
                ensure(b[m..r].iter().all(|y| x <= y), Proviso::Post, || {
                    format!("some b[i] < x right of m={m}")
                })
            })
            .and_then(|()| {
                let bound = ceil_log2((r - l).max(1)) + 1;
                ensure(depth <= bound, Proviso::Post, || {
                    format!("search depth {depth} exceeds {bound}")
                })
            })
            .map_err(fail)?;
    }
    Ok((m, depth))
}

fn search<T: Ord>(x: &T, b: &[T], l: usize, r: usize, ctx: &Checker) -> (usize, u32) {
    if l == r {
        return (l, 0);
    }
    let p = l + (r - l) / 2;
    let (m, depth) = match ctx.cmp(x, &b[p]) {
        std::cmp::Ordering::Equal => return (p, 0),
        std::cmp::Ordering::Less => search(x, b, l, p, ctx),
        std::cmp::Ordering::Greater => search(x, b, p + 1, r, ctx),
    };
    (m, depth + 1)
}

pub(crate) fn ceil_log2(n: usize) -> u32 {
    n.next_power_of_two().trailing_zeros()
}

/// Merges sorted `a[l..r)` and sorted `b[l2..r2)` into a fresh vector.
pub fn merge_two<T: Ord + Clone>(
    a: &[T],
    l: usize,
    r: usize,
    b: &[T],
    l2: usize,
    r2: usize,
    ctx: &Checker,
) -> Result<Vec<T>, Violation<T>> {
    let windows = SliceBounds::new(l, r, a.len()).and_then(|wa| Ok((wa, SliceBounds::new(l2, r2, b.len())?)));
    match windows {
        Ok((wa, wb)) => run_two_array(&MergeParts, a, b, wa, wb, ctx),
        Err(e) => {
            let snap = Snapshot::capture(a);
            Err(Violation::new(Proviso::Pre, Location::new(ALGO, "merge_two", l, r, a.len()), e.to_string(), &snap, a)
                .with_operand(b))
        }
    }
}

/// The merge as a two-array schema instance.
#[derive(Debug, Clone, Copy, Default)]
pub struct MergeParts;

impl<T: Ord + Clone> TwoArraySchemaParts<T> for MergeParts {
    fn algo(&self) -> &'static str {
        ALGO
    }

    fn q(&self, a: &[T], wa: SliceBounds, b: &[T], wb: SliceBounds) -> bool {
        is_sorted(&a[wa.range()]) && is_sorted(&b[wb.range()])
    }

    fn is_base(&self, wa: SliceBounds) -> bool {
        wa.is_empty()
    }

    fn is_base2(&self, wb: SliceBounds) -> bool {
        wb.is_empty()
    }

    fn solve_base(&self, _: &[T], _: SliceBounds, b: &[T], wb: SliceBounds, _: &Checker) -> Result<Vec<T>, Violation<T>> {
        Ok(b[wb.range()].to_vec())
    }

    fn solve_base2(&self, a: &[T], wa: SliceBounds, _: &[T], _: SliceBounds, _: &Checker) -> Result<Vec<T>, Violation<T>> {
        Ok(a[wa.range()].to_vec())
    }

    fn divide(
        &self,
        a: &[T],
        wa: SliceBounds,
        b: &[T],
        wb: SliceBounds,
        ctx: &Checker,
    ) -> Result<TwoArrayPartition, Violation<T>> {
        let m = wa.l() + wa.len() / 2;
        let m2 = ctx.nested(|| fp(&a[m], b, wb.l(), wb.r(), ctx))?;
        Ok(TwoArrayPartition {
            m,
            l1: wb.l(),
            r1: m2,
            l2: m2,
            r2: wb.r(),
        })
    }

    fn combine(
        &self,
        a: &[T],
        _: SliceBounds,
        _: &[T],
        _: SliceBounds,
        part: TwoArrayPartition,
        mut left: Vec<T>,
        right: Vec<T>,
        _: &Checker,
    ) -> Result<Vec<T>, Violation<T>> {
        left.reserve(right.len() + 1);
        left.push(a[part.m].clone());
        left.extend(right);
        Ok(left)
    }

    fn r_post(&self, a: &[T], wa: SliceBounds, b: &[T], wb: SliceBounds, c: &[T]) -> bool {
        c.len() == wa.len() + wb.len()
            && is_sorted(c)
            && is_perm(&[&a[wa.range()], &b[wb.range()]].concat(), c)
    }

    fn p(&self, a: &[T], wa: SliceBounds, b: &[T], wb: SliceBounds, part: TwoArrayPartition) -> bool {
        let TwoArrayPartition { m, l1, r1, l2, r2 } = part;
        let pivot = std::slice::from_ref(&a[m]);
        wa.l() <= m
            && m < wa.r()
            && l1 == wb.l()
            && r1 == l2
            && r2 == wb.r()
            && uniformly_leq(&a[wa.l()..m], pivot)
            && uniformly_leq(pivot, &a[m + 1..wa.r()])
            && uniformly_leq(&b[l1..r1], pivot)
            && uniformly_leq(pivot, &b[l2..r2])
    }

    fn children_consistent(
        &self,
        a: &[T],
        wa: SliceBounds,
        _: &[T],
        _: SliceBounds,
        part: TwoArrayPartition,
        left: &[T],
        right: &[T],
    ) -> bool {
        let pivot = std::slice::from_ref(&a[part.m]);
        left.len() == (part.m - wa.l()) + (part.r1 - part.l1)
            && right.len() == (wa.r() - (part.m + 1)) + (part.r2 - part.l2)
            && uniformly_leq(left, pivot)
            && uniformly_leq(pivot, right)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contracts::CheckMode;
    use crate::test_oracle::insertion_sort;

    fn full() -> Checker {
        Checker::new(CheckMode::Full)
    }

    /// Every m in [l, r] satisfying the postcondition, by linear scan.
    fn valid_points(x: i64, b: &[i64], l: usize, r: usize) -> Vec<usize> {
        (l..=r)
            .filter(|&m| b[l..m].iter().all(|y| *y <= x) && b[m..r].iter().all(|y| x <= *y))
            .collect()
    }

    #[test]
    fn fp_examples() {
        let b = [1, 3, 5, 7];
        assert_eq!(valid_points(5, &b, 0, 4), vec![2, 3]);
        assert_eq!(fp(&5, &b, 0, 4, &full()), Ok(2));
        assert_eq!(fp(&42, &b, 2, 2, &full()), Ok(2));
        assert_eq!(valid_points(0, &[1, 2, 3], 0, 3), vec![0]);
        assert_eq!(fp(&0, &[1, 2, 3], 0, 3, &full()), Ok(0));
    }

    #[test]
    fn fp_rejects_unsorted_and_bad_bounds() {
        let v = fp(&1, &[3, 1], 0, 2, &full()).unwrap_err();
        assert_eq!(v.proviso, Proviso::Pre);
        let v = fp(&1, &[1, 2], 1, 3, &Checker::new(CheckMode::Unchecked)).unwrap_err();
        assert_eq!(v.proviso, Proviso::Pre);
    }

    #[test]
    fn fp_fault_is_caught() {
        let ctx = full().with_fault(Fault::FpReturnsLeft);
        let v = fp(&5, &[1, 3, 5, 7], 0, 4, &ctx).unwrap_err();
        assert_eq!(v.proviso, Proviso::Post);
        assert_eq!(v.location.op, "fp");
    }

    #[test]
    fn merge_examples() {
        let ctx = full();
        assert_eq!(merge_two(&[], 0, 0, &[1, 2], 0, 2, &ctx), Ok(vec![1, 2]));
        assert_eq!(insertion_sort(&[1, 3, 2, 4]), vec![1, 2, 3, 4]);
        assert_eq!(merge_two(&[1, 3], 0, 2, &[2, 4], 0, 2, &ctx), Ok(vec![1, 2, 3, 4]));
        assert_eq!(insertion_sort(&[5, 1, 9]), vec![1, 5, 9]);
        assert_eq!(merge_two(&[5], 0, 1, &[1, 9], 0, 2, &ctx), Ok(vec![1, 5, 9]));
        assert_eq!(merge_two(&[0, 7, 9, 0], 1, 3, &[], 0, 0, &ctx), Ok(vec![7, 9]));
    }

    #[test]
    fn merge_rejects_unsorted_input() {
        let v = merge_two(&[3, 1], 0, 2, &[2], 0, 1, &full()).unwrap_err();
        assert_eq!(v.proviso, Proviso::Pre);
        let v = merge_two(&[1], 0, 2, &[2], 0, 1, &full()).unwrap_err();
        assert_eq!(v.proviso, Proviso::Pre);
    }

    #[test]
    fn dropping_the_right_half_breaks_the_post() {
        struct LeftOnly;
        impl TwoArraySchemaParts<i64> for LeftOnly {
            fn algo(&self) -> &'static str {
                ALGO
            }
            fn q(&self, a: &[i64], wa: SliceBounds, b: &[i64], wb: SliceBounds) -> bool {
                <MergeParts as TwoArraySchemaParts<i64>>::q(&MergeParts, a, wa, b, wb)
            }
            fn is_base(&self, wa: SliceBounds) -> bool {
                wa.is_empty()
            }
            fn is_base2(&self, wb: SliceBounds) -> bool {
                wb.is_empty()
            }
            fn solve_base(&self, a: &[i64], wa: SliceBounds, b: &[i64], wb: SliceBounds, c: &Checker) -> Result<Vec<i64>, Violation<i64>> {
                MergeParts.solve_base(a, wa, b, wb, c)
            }
            fn solve_base2(&self, a: &[i64], wa: SliceBounds, b: &[i64], wb: SliceBounds, c: &Checker) -> Result<Vec<i64>, Violation<i64>> {
                MergeParts.solve_base2(a, wa, b, wb, c)
            }
            fn divide(&self, a: &[i64], wa: SliceBounds, b: &[i64], wb: SliceBounds, c: &Checker) -> Result<TwoArrayPartition, Violation<i64>> {
                MergeParts.divide(a, wa, b, wb, c)
            }
            fn combine(
                &self,
                _: &[i64],
                _: SliceBounds,
                _: &[i64],
                _: SliceBounds,
                _: TwoArrayPartition,
                left: Vec<i64>,
                _: Vec<i64>,
                _: &Checker,
            ) -> Result<Vec<i64>, Violation<i64>> {
                Ok(left)
            }
            fn r_post(&self, a: &[i64], wa: SliceBounds, b: &[i64], wb: SliceBounds, c: &[i64]) -> bool {
                MergeParts.r_post(a, wa, b, wb, c)
            }
            fn p(&self, a: &[i64], wa: SliceBounds, b: &[i64], wb: SliceBounds, part: TwoArrayPartition) -> bool {
                MergeParts.p(a, wa, b, wb, part)
            }
        }
        let (a, b) = ([1, 3], [2, 4]);
        let v = run_two_array(&LeftOnly, &a, &b, SliceBounds::full(2), SliceBounds::full(2), &full()).unwrap_err();
        assert_eq!(v.proviso, Proviso::Post);
        assert!(!v.operands.is_empty());
    }

    #[test]
    fn exhaustive_small_sorted_pairs() {
        // all sorted pairs over {0,1,2} with total length <= 8
        let sorted_seqs: Vec<Vec<i64>> = (0..=8)
            .flat_map(|len| {
                let mut out = Vec::new();
                let mut cur = Vec::new();
                nondecreasing(len, 0, &mut cur, &mut out);
                out
            })
            .collect();
        let ctx = full();
        let mut pairs = 0;
        for x in &sorted_seqs {
            for y in sorted_seqs.iter().filter(|y| x.len() + y.len() <= 8) {
                let got = merge_two(x, 0, x.len(), y, 0, y.len(), &ctx).unwrap();
                assert_eq!(got, insertion_sort(&[x.as_slice(), y.as_slice()].concat()));
                pairs += 1;
            }
        }
        assert!(pairs > 1000);
    }

    fn nondecreasing(len: usize, lo: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for v in lo..=2 {
            cur.push(v);
            nondecreasing(len, v, cur, out);
            cur.pop();
        }
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(1000), 10);
        assert_eq!(ceil_log2(1024), 10);
    }
}
