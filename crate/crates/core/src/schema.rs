//! Generic binary divide-and-conquer drivers.
//!
//! An instance supplies its base test, base solver, divide and combine steps
//! along with the predicates that specify them: `q` (precondition on a
//! window), `r_post` (postcondition against the entry snapshot) and `p`
//! (what divide establishes). The drivers own the recursion and, in
//! [`CheckMode::Full`](crate::CheckMode::Full), assert every obligation that
//! makes the recursion sound at every node:
//!
//! * a non-base window is long enough to split,
//! * divide establishes `p`, which places `m` inside the window and
//!   re-establishes `q` on both children,
//! * the window length strictly decreases into each child,
//! * `p` still holds after each child call,
//! * `r_post` and non-interference hold when the node returns.
//!
//! In `Contracts` mode only the root's `q`, `r_post` and non-interference
//! are checked. Index sanity (`m` inside the window, children inside the
//! parent) is checked in every mode since slicing depends on it.

use crate::contracts::{check_variant, ensure, Breach, Checker, Location, Proviso, Violation};
use crate::order::{outside_unchanged, SliceBounds, Snapshot};
use crate::trace::{Phase, Split};

/// One single-array divide-and-conquer instance. Used by both
/// [`run_simple`] (children `[l, m)`, `[m, r)`) and [`run_pivot`]
/// (children `[l, m)`, `[m + 1, r)`).
pub trait SchemaParts<T> {
    /// Identifies the instance in traces and violation reports.
    fn algo(&self) -> &'static str;

    /// Precondition `Q(l, r)`. Must imply `l <= r <= a.len()`.
    fn q(&self, a: &[T], l: usize, r: usize) -> bool;

    /// Base-case test `B(l, r)`.
    fn is_base(&self, l: usize, r: usize) -> bool;

    /// `E`: solves a base window.
    fn solve_base(&self, a: &mut [T], l: usize, r: usize, ctx: &Checker)
        -> Result<(), Violation<T>>;

    /// `D`: picks the split point, possibly rearranging `a[l..r)`.
    fn divide(&self, a: &mut [T], l: usize, r: usize, ctx: &Checker) -> Result<usize, Violation<T>>;

    /// `C`: combines the solved children.
    fn combine(
        &self,
        a: &mut [T],
        l: usize,
        m: usize,
        r: usize,
        ctx: &Checker,
    ) -> Result<(), Violation<T>>;

    /// Postcondition `R(l, r)` given the whole array at entry.
    fn r_post(&self, old: &[T], a: &[T], l: usize, r: usize) -> bool;

    /// Partition predicate `P(l, m, r)`.
    fn p(&self, a: &[T], l: usize, m: usize, r: usize) -> bool;

    /// Extra fact to assert on `[l, r)` after each child call, given the
    /// array as it was just before that call. Defaults to nothing.
    fn preserved_across_child(&self, _before: &[T], _a: &[T], _l: usize, _r: usize) -> bool {
        true
    }
}

/// Runs `parts` on window `b` with children `[l, m)` and `[m, r)`.
pub fn run_simple<T, P>(parts: &P, a: &mut [T], b: SliceBounds, ctx: &Checker) -> Result<(), Violation<T>>
where
    T: Ord + Clone,
    P: SchemaParts<T> + ?Sized,
{
    check_root(parts.algo(), a, b)?;
    node(parts, a, b.l(), b.r(), 0, Split::AtIndex, ctx)
}

/// Runs `parts` on window `b` with the pivot `a[m]` excluded from both
/// children `[l, m)` and `[m + 1, r)`.
pub fn run_pivot<T, P>(parts: &P, a: &mut [T], b: SliceBounds, ctx: &Checker) -> Result<(), Violation<T>>
where
    T: Ord + Clone,
    P: SchemaParts<T> + ?Sized,
{
    check_root(parts.algo(), a, b)?;
    node(parts, a, b.l(), b.r(), 0, Split::AroundPivot, ctx)
}

fn check_root<T: Clone>(algo: &'static str, a: &[T], b: SliceBounds) -> Result<(), Violation<T>> {
    if b.n() == a.len() {
        return Ok(());
    }
    let snap = Snapshot::capture(a);
    Err(Violation::new(
        Proviso::Pre,
        Location::new(algo, "schema", b.l(), b.r(), a.len()),
        format!("window is over an array of length {}, got {}", b.n(), a.len()),
        &snap,
        a,
    ))
}

fn node<T, P>(
    parts: &P,
    a: &mut [T],
    l: usize,
    r: usize,
    depth: u32,
    split: Split,
    ctx: &Checker,
) -> Result<(), Violation<T>>
where
    T: Ord + Clone,
    P: SchemaParts<T> + ?Sized,
{
    let n = a.len();
    let algo = parts.algo();
    let loc = |op| Location::new(algo, op, l, r, n).at_depth(depth);
    let full = ctx.full();
    let check = full || (depth == 0 && ctx.contracts());
    ctx.note_depth(depth);

    let old = check.then(|| Snapshot::capture(a));
    if let Some(old) = &old {
        ensure(parts.q(a, l, r), Proviso::Pre, || "Q(l, r) does not hold".into())
            .and_then(|()| {
                ensure(l <= r && r <= n, Proviso::Pre, || {
                    "Q(l, r) holds but 0 <= l <= r <= N does not".into()
                })
            })
            .map_err(|e| e.at(loc("node"), old, a))?;
    }

    if parts.is_base(l, r) {
        ctx.emit(algo, Phase::Base, l, None, r, depth, None);
        parts.solve_base(a, l, r, ctx)?;
    } else {
        let shortest = match split {
            Split::AtIndex => 2,
            Split::AroundPivot => 1,
        };
        if full {
            let entry = old.as_ref().expect("snapshot taken in full mode");
            ensure(r - l >= shortest, Proviso::BaseImpliesShort, || {
                format!("non-base window of length {} cannot be split", r - l)
            })
            .map_err(|e| e.at(loc("node"), entry, a))?;
        }

        let before_divide = full.then(|| Snapshot::capture(a));
        let m = parts.divide(a, l, r, ctx)?;
        let (left, right) = match split {
            Split::AtIndex => ((l, m), (m, r)),
            Split::AroundPivot => ((l, m), (m + 1, r)),
        };
        let in_range = match split {
            Split::AtIndex => l < m && m < r,
            Split::AroundPivot => l <= m && m < r,
        };
        if !in_range {
            let snap = before_divide.unwrap_or_else(|| Snapshot::capture(a));
            return Err(Violation::new(
                Proviso::PartitionPredicate,
                loc("divide"),
                format!("divide returned m={m} outside the window [{l}..{r})"),
                &snap,
                a,
            ));
        }
        ctx.emit(algo, Phase::Divide, l, Some(m), r, depth, None);

        if let Some(entry) = &before_divide {
            partition_provisos(parts, a, l, m, r, left, right)
                .map_err(|e| e.at(loc("divide"), entry, a))?;
        }

        let frozen = (l, m, r);
        let before_left = full.then(|| Snapshot::capture(a));
        node(parts, a, left.0, left.1, depth + 1, split, ctx)?;
        if let Some(before) = &before_left {
            after_child(parts, before, a, l, m, r, "left").map_err(|e| e.at(loc("node"), before, a))?;
        }

        let before_right = full.then(|| Snapshot::capture(a));
        node(parts, a, right.0, right.1, depth + 1, split, ctx)?;
        if let Some(before) = &before_right {
            after_child(parts, before, a, l, m, r, "right")
                .and_then(|()| {
                    ensure((l, m, r) == frozen, Proviso::PartitionPredicate, || {
                        "l, m, r changed across the recursive calls".into()
                    })
                })
                .map_err(|e| e.at(loc("node"), before, a))?;
        }

        parts.combine(a, l, m, r, ctx)?;
        ctx.emit(algo, Phase::Combine, l, Some(m), r, depth, None);
    }

    if let Some(old) = &old {
        ensure(parts.r_post(old, a, l, r), Proviso::Post, || "R(l, r) does not hold on return".into())
            .and_then(|()| {
                let window = SliceBounds::new(l, r, n).expect("bounds checked on entry");
                let untouched = outside_unchanged(old, a, window).unwrap_or(false);
                ensure(untouched, Proviso::NonInterference, || {
                    format!("array modified outside [{l}..{r})")
                })
            })
            .map_err(|e| e.at(loc("node"), old, a))?;
    }
    Ok(())
}

fn partition_provisos<T, P>(
    parts: &P,
    a: &[T],
    l: usize,
    m: usize,
    r: usize,
    left: (usize, usize),
    right: (usize, usize),
) -> Result<(), Breach>
where
    P: SchemaParts<T> + ?Sized,
{
    ensure(parts.p(a, l, m, r), Proviso::PartitionPredicate, || {
        format!("divide did not establish P(l={l}, m={m}, r={r})")
    })?;
    ensure(
        parts.q(a, left.0, left.1) && parts.q(a, right.0, right.1),
        Proviso::PartitionPredicate,
        || "P does not establish Q on both children".into(),
    )?;
    for (cl, cr) in [left, right] {
        check_variant((r - l) as i64, (cr - cl) as i64).map_err(|v| Breach {
            proviso: Proviso::VariantDecrease,
            detail: format!("child [{cl}..{cr}): {v}"),
        })?;
    }
    Ok(())
}

fn after_child<T, P>(
    parts: &P,
    before: &[T],
    a: &[T],
    l: usize,
    m: usize,
    r: usize,
    which: &str,
) -> Result<(), Breach>
where
    P: SchemaParts<T> + ?Sized,
{
    ensure(parts.p(a, l, m, r), Proviso::PartitionPredicate, || {
        format!("P(l={l}, m={m}, r={r}) not preserved by the {which} call")
    })?;
    ensure(parts.preserved_across_child(before, a, l, r), Proviso::Post, || {
        format!("[{l}..{r}) not preserved across the {which} call")
    })
}

/// The split produced by a two-array divide: pivot `m` in the principal
/// window, and the secondary window cut into `[l1, r1)` and `[l2, r2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoArrayPartition {
    pub m: usize,
    pub l1: usize,
    pub r1: usize,
    pub l2: usize,
    pub r2: usize,
}

/// A divide-and-conquer instance over a principal window of `a` and a
/// secondary window of `b`, producing a fresh result. Recursion follows the
/// principal window around a pivot; both inputs are read-only.
pub trait TwoArraySchemaParts<T> {
    fn algo(&self) -> &'static str;

    fn q(&self, a: &[T], wa: SliceBounds, b: &[T], wb: SliceBounds) -> bool;

    /// `B` on the principal window.
    fn is_base(&self, wa: SliceBounds) -> bool;

    /// `B'` on the secondary window.
    fn is_base2(&self, wb: SliceBounds) -> bool;

    fn solve_base(&self, a: &[T], wa: SliceBounds, b: &[T], wb: SliceBounds, ctx: &Checker)
        -> Result<Vec<T>, Violation<T>>;

    fn solve_base2(&self, a: &[T], wa: SliceBounds, b: &[T], wb: SliceBounds, ctx: &Checker)
        -> Result<Vec<T>, Violation<T>>;

    fn divide(&self, a: &[T], wa: SliceBounds, b: &[T], wb: SliceBounds, ctx: &Checker)
        -> Result<TwoArrayPartition, Violation<T>>;

    #[allow(clippy::too_many_arguments)]
    fn combine(
        &self,
        a: &[T],
        wa: SliceBounds,
        b: &[T],
        wb: SliceBounds,
        part: TwoArrayPartition,
        left: Vec<T>,
        right: Vec<T>,
        ctx: &Checker,
    ) -> Result<Vec<T>, Violation<T>>;

    fn r_post(&self, a: &[T], wa: SliceBounds, b: &[T], wb: SliceBounds, c: &[T]) -> bool;

    fn p(&self, a: &[T], wa: SliceBounds, b: &[T], wb: SliceBounds, part: TwoArrayPartition) -> bool;

    /// What the combine step may rely on about the two child results.
    /// Defaults to nothing.
    #[allow(clippy::too_many_arguments)]
    fn children_consistent(
        &self,
        _a: &[T],
        _wa: SliceBounds,
        _b: &[T],
        _wb: SliceBounds,
        _part: TwoArrayPartition,
        _left: &[T],
        _right: &[T],
    ) -> bool {
        true
    }
}

/// Runs a two-array instance. `a` and `b` are borrowed immutably, so the
/// extended non-interference condition on both inputs holds by construction.
pub fn run_two_array<T, P>(
    parts: &P,
    a: &[T],
    b: &[T],
    wa: SliceBounds,
    wb: SliceBounds,
    ctx: &Checker,
) -> Result<Vec<T>, Violation<T>>
where
    T: Ord + Clone,
    P: TwoArraySchemaParts<T> + ?Sized,
{
    if wa.n() != a.len() || wb.n() != b.len() {
        let snap = Snapshot::capture(a);
        return Err(Violation::new(
            Proviso::Pre,
            Location::new(parts.algo(), "schema", wa.l(), wa.r(), a.len()),
            "window lengths do not match the arrays",
            &snap,
            a,
        )
        .with_operand(b));
    }
    node2(parts, a, b, wa, wb, 0, ctx)
}

fn node2<T, P>(
    parts: &P,
    a: &[T],
    b: &[T],
    wa: SliceBounds,
    wb: SliceBounds,
    depth: u32,
    ctx: &Checker,
) -> Result<Vec<T>, Violation<T>>
where
    T: Ord + Clone,
    P: TwoArraySchemaParts<T> + ?Sized,
{
    let algo = parts.algo();
    let full = ctx.full();
    let check = full || (depth == 0 && ctx.contracts());
    ctx.note_depth(depth);
    // a is never mutated, so one snapshot serves as both before and after.
    let fail = |e: Breach, op: &'static str, c: Option<&[T]>| {
        let snap = Snapshot::capture(a);
        let v = e
            .at(Location::new(algo, op, wa.l(), wa.r(), a.len()).at_depth(depth), &snap, a)
            .with_operand(&b[wb.range()]);
        match c {
            Some(c) => v.with_operand(c),
            None => v,
        }
    };

    if check {
        ensure(parts.q(a, wa, b, wb), Proviso::Pre, || "Q does not hold".into())
            .map_err(|e| fail(e, "node", None))?;
    }

    let c = if parts.is_base(wa) {
        ctx.emit(algo, Phase::Base, wa.l(), None, wa.r(), depth, None);
        parts.solve_base(a, wa, b, wb, ctx)?
    } else if parts.is_base2(wb) {
        ctx.emit(algo, Phase::Base, wa.l(), None, wa.r(), depth, None);
        parts.solve_base2(a, wa, b, wb, ctx)?
    } else {
        if full {
            ensure(!wa.is_empty(), Proviso::BaseImpliesShort, || {
                "non-base principal window is empty".into()
            })
            .map_err(|e| fail(e, "node", None))?;
        }
        let part = parts.divide(a, wa, b, wb, ctx)?;
        let children = (|| {
            let pivot_ok = wa.l() <= part.m && part.m < wa.r();
            let left = wa.sub(wa.l(), part.m).ok().filter(|_| pivot_ok)?;
            let right = wa.sub(part.m + 1, wa.r()).ok()?;
            let left2 = wb.sub(part.l1, part.r1).ok()?;
            let right2 = wb.sub(part.l2, part.r2).ok()?;
            Some((left, left2, right, right2))
        })();
        let Some((left, left2, right, right2)) = children else {
            return Err(fail(
                Breach {
                    proviso: Proviso::PartitionPredicate,
                    detail: format!("divide produced windows outside the parent: {part:?}"),
                },
                "divide",
                None,
            ));
        };
        ctx.emit(algo, Phase::Divide, wa.l(), Some(part.m), wa.r(), depth, None);

        if full {
            ensure(parts.p(a, wa, b, wb, part), Proviso::PartitionPredicate, || {
                format!("divide did not establish P: {part:?}")
            })
            .and_then(|()| {
                ensure(
                    parts.q(a, left, b, left2) && parts.q(a, right, b, right2),
                    Proviso::PartitionPredicate,
                    || "P does not establish Q on both children".into(),
                )
            })
            .and_then(|()| {
                for w in [left, right] {
                    check_variant(wa.len() as i64, w.len() as i64).map_err(|v| Breach {
                        proviso: Proviso::VariantDecrease,
                        detail: format!("child [{}..{}): {v}", w.l(), w.r()),
                    })?;
                }
                Ok(())
            })
            .map_err(|e| fail(e, "divide", None))?;
        }

        let d = node2(parts, a, b, left, left2, depth + 1, ctx)?;
        let d2 = node2(parts, a, b, right, right2, depth + 1, ctx)?;
        if full {
            ensure(parts.p(a, wa, b, wb, part), Proviso::PartitionPredicate, || {
                "P not preserved by the recursive calls".into()
            })
            .and_then(|()| {
                ensure(
                    parts.children_consistent(a, wa, b, wb, part, &d, &d2),
                    Proviso::PartitionPredicate,
                    || "child results do not meet what combine relies on".into(),
                )
            })
            .map_err(|e| fail(e, "combine", Some(&[d.as_slice(), d2.as_slice()].concat())))?;
        }
        let c = parts.combine(a, wa, b, wb, part, d, d2, ctx)?;
        ctx.emit(algo, Phase::Combine, wa.l(), Some(part.m), wa.r(), depth, None);
        c
    };

    if check {
        ensure(parts.r_post(a, wa, b, wb, &c), Proviso::Post, || {
            "R does not hold for the result".into()
        })
        .map_err(|e| fail(e, "node", Some(&c)))?;
    }
    Ok(c)
}
