//! Canonical finite unions of half-open intervals `[a, b)` inside `[0, 1]`.

use std::fmt;

use serde::Serialize;

use super::{NumericsError, Rational, Side, SignedPoint};

/// A half-open interval `[left, right)` with `left < right`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Interval {
    pub left: Rational,
    pub right: Rational,
}

impl Interval {
    /// Returns `None` for an empty interval (`left >= right`).
    pub fn new(left: Rational, right: Rational) -> Option<Self> {
        (left < right).then_some(Interval { left, right })
    }

    pub fn length(&self) -> Rational {
        &self.right - &self.left
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.left <= x && x < &self.right
    }

    /// Membership of a one-sided point: `x⁺ ∈ [l,r)` iff `l ≤ x < r`,
    /// `x⁻ ∈ [l,r)` iff `l < x ≤ r`.
    pub fn contains_signed(&self, p: &SignedPoint) -> bool {
        match p.side {
            Side::Plus => self.left <= p.value && p.value < self.right,
            Side::Minus => self.left < p.value && p.value <= self.right,
        }
    }

    pub fn closure_contains(&self, x: &Rational) -> bool {
        &self.left <= x && x <= &self.right
    }

    /// `other ⊆ self`.
    pub fn covers(&self, other: &Interval) -> bool {
        self.left <= other.left && other.right <= self.right
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.left < other.right && other.left < self.right
    }

    pub fn translate(&self, offset: &Rational) -> Interval {
        Interval {
            left: &self.left + offset,
            right: &self.right + offset,
        }
    }

    /// Distance from `x` to the closed interval `[left, right]`.
    pub fn closure_distance(&self, x: &Rational) -> Rational {
        if x < &self.left {
            &self.left - x
        } else if x > &self.right {
            x - &self.right
        } else {
            Rational::zero()
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{})", self.left, self.right)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetOp {
    Union,
    Intersection,
    Difference,
}

/// Sorted, pairwise separated (`prev.right < next.left`) half-open intervals
/// with endpoints in `[0, 1]`.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet::default()
    }

    /// `[0, 1)`.
    pub fn unit() -> Self {
        IntervalSet {
            intervals: vec![Interval {
                left: Rational::zero(),
                right: Rational::one(),
            }],
        }
    }

    pub fn single(interval: Interval) -> Self {
        Self::canonicalize([(interval.left, interval.right)])
    }

    /// Build the canonical form of an arbitrary list of `[l, r)` pairs.
    /// Empty pairs are dropped, endpoints are clipped to `[0, 1]`, and
    /// overlapping or abutting pairs are merged.
    pub fn canonicalize(raw: impl IntoIterator<Item = (Rational, Rational)>) -> Self {
        let zero = Rational::zero();
        let one = Rational::one();
        let mut pieces: Vec<Interval> = raw
            .into_iter()
            .filter_map(|(l, r)| Interval::new(l.max(zero.clone()), r.min(one.clone())))
            .collect();
        pieces.sort_by(|a, b| a.left.cmp(&b.left));
        let mut out: Vec<Interval> = Vec::with_capacity(pieces.len());
        for piece in pieces {
            match out.last_mut() {
                Some(last) if piece.left <= last.right => {
                    if piece.right > last.right {
                        last.right = piece.right;
                    }
                }
                _ => out.push(piece),
            }
        }
        IntervalSet { intervals: out }
    }

    pub fn from_intervals(intervals: impl IntoIterator<Item = Interval>) -> Self {
        Self::canonicalize(intervals.into_iter().map(|i| (i.left, i.right)))
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    /// Connected components, left to right.
    pub fn components(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.intervals.iter()
    }

    pub fn measure(&self) -> Rational {
        self.intervals.iter().map(Interval::length).sum()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.component_of(x).is_some()
    }

    /// Index of the component containing `x`.
    pub fn component_of(&self, x: &Rational) -> Option<usize> {
        // first interval with right > x
        let idx = self.intervals.partition_point(|i| &i.right <= x);
        (idx < self.intervals.len() && &self.intervals[idx].left <= x).then_some(idx)
    }

    pub fn contains_signed(&self, p: &SignedPoint) -> bool {
        self.intervals.iter().any(|i| i.contains_signed(p))
    }

    pub fn closure_contains(&self, x: &Rational) -> bool {
        self.intervals.iter().any(|i| i.closure_contains(x))
    }

    /// Distance from `x` to the closure of the set; `None` when empty.
    pub fn closure_distance(&self, x: &Rational) -> Option<Rational> {
        self.intervals
            .iter()
            .map(|i| i.closure_distance(x))
            .min()
    }

    pub fn is_subset_of(&self, other: &IntervalSet) -> bool {
        self.difference(other).is_empty()
    }

    /// Complement inside `[0, 1)`.
    pub fn complement(&self) -> IntervalSet {
        let mut raw = Vec::with_capacity(self.intervals.len() + 1);
        let mut cursor = Rational::zero();
        for i in &self.intervals {
            raw.push((cursor, i.left.clone()));
            cursor = i.right.clone();
        }
        raw.push((cursor, Rational::one()));
        Self::canonicalize(raw)
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        Self::canonicalize(
            self.intervals
                .iter()
                .chain(other.intervals.iter())
                .map(|i| (i.left.clone(), i.right.clone())),
        )
    }

    pub fn intersection(&self, other: &IntervalSet) -> IntervalSet {
        let (a, b) = (&self.intervals, &other.intervals);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            let left = (&a[i].left).max(&b[j].left).clone();
            let right = (&a[i].right).min(&b[j].right).clone();
            if left < right {
                out.push((left, right));
            }
            if a[i].right < b[j].right {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::canonicalize(out)
    }

    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        self.intersection(&other.complement())
    }

    pub fn apply(&self, other: &IntervalSet, op: SetOp) -> IntervalSet {
        match op {
            SetOp::Union => self.union(other),
            SetOp::Intersection => self.intersection(other),
            SetOp::Difference => self.difference(other),
        }
    }

    /// Every endpoint of the set, left to right.
    pub fn endpoints(&self) -> impl Iterator<Item = &Rational> {
        self.intervals.iter().flat_map(|i| [&i.left, &i.right])
    }
}

/// Largest distance from a point of `closure(a)` to `closure(b)`.
fn directed_closure_distance(a: &IntervalSet, b: &IntervalSet) -> Rational {
    let gaps: Vec<Rational> = b
        .intervals
        .windows(2)
        .map(|w| (&w[0].right + &w[1].left) / Rational::from_integer(2))
        .collect();
    let dist = |x: &Rational| b.closure_distance(x).expect("non-empty");
    let mut best = Rational::zero();
    for iv in &a.intervals {
        let candidates = [&iv.left, &iv.right]
            .into_iter()
            .chain(gaps.iter().filter(|m| iv.left < **m && **m < iv.right));
        for c in candidates {
            let d = dist(c);
            if d > best {
                best = d;
            }
        }
    }
    best
}

/// Hausdorff distance between the closures of two non-empty sets, each
/// `[l, r)` closed up to `[l, r]`.
pub fn hausdorff_closure_distance(a: &IntervalSet, b: &IntervalSet) -> Result<Rational, NumericsError> {
    if a.is_empty() || b.is_empty() {
        return Err(NumericsError::EmptySet);
    }
    Ok(directed_closure_distance(a, b).max(directed_closure_distance(b, a)))
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self.intervals.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join(" ∪ "))
    }
}

impl fmt::Debug for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
