//! Closed intervals and finite unions of them.
//!
//! An [`IntervalSet`] is always kept normalized: parts sorted, pairwise
//! disjoint and non-touching (`parts[m].hi < parts[m + 1].lo`). Gaps between
//! parts are open intervals and are carried by [`Gap`], whose endpoints are
//! *not* members of the gap.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawInterval")]
pub struct Interval {
    pub(crate) lo: Scalar,
    pub(crate) hi: Scalar,
}

#[derive(Deserialize)]
struct RawInterval {
    lo: Scalar,
    hi: Scalar,
}

impl TryFrom<RawInterval> for Interval {
    type Error = Error;
    fn try_from(raw: RawInterval) -> Result<Self> {
        Interval::new(raw.lo, raw.hi)
    }
}

impl Interval {
    pub fn new(lo: Scalar, hi: Scalar) -> Result<Self> {
        if lo > hi {
            return Err(Error::MalformedInterval {
                lo: Box::new(lo),
                hi: Box::new(hi),
            });
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(x: Scalar) -> Self {
        Interval {
            lo: x.clone(),
            hi: x,
        }
    }

    /// Constructor for endpoints already known to be ordered.
    pub(crate) fn ordered(lo: Scalar, hi: Scalar) -> Self {
        debug_assert!(lo <= hi, "unordered interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn lo(&self) -> &Scalar {
        &self.lo
    }

    pub fn hi(&self) -> &Scalar {
        &self.hi
    }

    pub fn length(&self) -> Scalar {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// True when the closed intervals share at least one point.
    pub fn meets(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = std::cmp::max(&self.lo, &other.lo);
        let hi = std::cmp::min(&self.hi, &other.hi);
        (lo <= hi).then(|| Interval::ordered(lo.clone(), hi.clone()))
    }

    /// Image under `x -> c * x` for `c > 0`.
    pub fn scale(&self, c: &Scalar) -> Interval {
        Interval::ordered(&self.lo * c, &self.hi * c)
    }

    /// Image under `x -> c * x + t` for `c > 0`.
    pub fn affine(&self, c: &Scalar, t: &Scalar) -> Interval {
        Interval::ordered(&self.lo * c + t, &self.hi * c + t)
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// An open interval `(lo, hi)`, stored by its closure endpoints.
///
/// Endpoints do not belong to the gap; membership uses strict inequalities.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gap {
    pub lo: Scalar,
    pub hi: Scalar,
}

impl Gap {
    pub fn contains(&self, x: &Scalar) -> bool {
        &self.lo < x && x < &self.hi
    }

    pub fn length(&self) -> Scalar {
        &self.hi - &self.lo
    }

    pub fn closure(&self) -> Interval {
        Interval::ordered(self.lo.clone(), self.hi.clone())
    }
}

impl std::fmt::Display for Gap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

/// Image of `[lo, hi]` under `x -> x^2`, for `lo >= 0`.
pub fn square_image(i: &Interval) -> Result<Interval> {
    if i.lo.is_negative() {
        return Err(Error::NegativeDomain("square_image"));
    }
    Ok(Interval::ordered(i.lo.square(), i.hi.square()))
}

/// Exact image `{x^2 / y : x in ix, y in iy}`.
///
/// `x^2 / y` is increasing in `x` and decreasing in `y` on `[0, inf) x (0, inf)`,
/// so the image is `[ix.lo^2 / iy.hi, ix.hi^2 / iy.lo]`.
pub fn ratio_image(ix: &Interval, iy: &Interval) -> Result<Interval> {
    if ix.lo.is_negative() {
        return Err(Error::NegativeDomain("ratio_image"));
    }
    if !iy.lo.is_positive() {
        return Err(Error::TouchesZero("ratio_image"));
    }
    Ok(ratio_image_unchecked(ix, iy))
}

#[inline]
pub(crate) fn ratio_image_unchecked(ix: &Interval, iy: &Interval) -> Interval {
    Interval::ordered(ix.lo.square() / &iy.hi, ix.hi.square() / &iy.lo)
}

/// A normalized finite union of closed intervals.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Interval>", into = "Vec<Interval>")]
pub struct IntervalSet {
    parts: Vec<Interval>,
}

impl TryFrom<Vec<Interval>> for IntervalSet {
    type Error = Error;
    fn try_from(parts: Vec<Interval>) -> Result<Self> {
        IntervalSet::normalize(parts)
    }
}

impl From<IntervalSet> for Vec<Interval> {
    fn from(s: IntervalSet) -> Self {
        s.parts
    }
}

impl From<Interval> for IntervalSet {
    fn from(i: Interval) -> Self {
        IntervalSet { parts: vec![i] }
    }
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { parts: Vec::new() }
    }

    /// Canonical disjoint sorted cover of the union of `raw`.
    ///
    /// Overlapping and endpoint-touching intervals merge. Sort then a single
    /// sweep, `O(m log m)`.
    pub fn normalize(raw: Vec<Interval>) -> Result<Self> {
        if let Some(bad) = raw.iter().find(|i| i.lo > i.hi) {
            return Err(Error::MalformedInterval {
                lo: Box::new(bad.lo.clone()),
                hi: Box::new(bad.hi.clone()),
            });
        }
        Ok(Self::normalize_valid(raw))
    }

    pub(crate) fn normalize_valid(mut raw: Vec<Interval>) -> Self {
        raw.sort_unstable_by(|a, b| a.lo.cmp(&b.lo));
        let mut parts: Vec<Interval> = Vec::with_capacity(raw.len());
        for next in raw {
            match parts.last_mut() {
                Some(cur) if next.lo <= cur.hi => {
                    if next.hi > cur.hi {
                        cur.hi = next.hi;
                    }
                }
                _ => parts.push(next),
            }
        }
        IntervalSet { parts }
    }

    /// Wraps parts that are already sorted and non-touching.
    pub(crate) fn from_sorted(parts: Vec<Interval>) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0].hi < w[1].lo));
        IntervalSet { parts }
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// The single interval, when the set is exactly one closed interval.
    pub fn as_single(&self) -> Option<&Interval> {
        match self.parts.as_slice() {
            [one] => Some(one),
            _ => None,
        }
    }

    /// Smallest interval containing the set.
    pub fn hull(&self) -> Option<Interval> {
        let first = self.parts.first()?;
        let last = self.parts.last()?;
        Some(Interval::ordered(first.lo.clone(), last.hi.clone()))
    }

    pub fn total_length(&self) -> Scalar {
        self.parts
            .iter()
            .fold(Scalar::zero(), |acc, p| acc + p.length())
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        if self.is_empty() {
            return other.clone();
        }
        if other.is_empty() {
            return self.clone();
        }
        self.clone().merge(other.clone())
    }

    /// Union by a linear merge of the two sorted part lists.
    pub fn merge(self, other: IntervalSet) -> IntervalSet {
        let mut parts: Vec<Interval> = Vec::with_capacity(self.parts.len() + other.parts.len());
        let mut a = self.parts.into_iter().peekable();
        let mut b = other.parts.into_iter().peekable();
        loop {
            let next = match (a.peek(), b.peek()) {
                (Some(x), Some(y)) => {
                    if x.lo <= y.lo {
                        a.next()
                    } else {
                        b.next()
                    }
                }
                (Some(_), None) => a.next(),
                (None, Some(_)) => b.next(),
                (None, None) => break,
            };
            let next = next.expect("peeked");
            match parts.last_mut() {
                Some(cur) if next.lo <= cur.hi => {
                    if next.hi > cur.hi {
                        cur.hi = next.hi;
                    }
                }
                _ => parts.push(next),
            }
        }
        IntervalSet { parts }
    }

    pub fn contains_point(&self, x: &Scalar) -> bool {
        self.part_containing(x).is_some()
    }

    /// Index of the part containing `x`, by binary search.
    pub fn part_containing(&self, x: &Scalar) -> Option<usize> {
        let idx = self.parts.partition_point(|p| &p.hi < x);
        (idx < self.parts.len() && &self.parts[idx].lo <= x).then_some(idx)
    }

    /// True when every point of `self` lies in `other`.
    pub fn is_subset_of(&self, other: &IntervalSet) -> bool {
        self.parts.iter().all(|p| {
            other
                .part_containing(&p.lo)
                .is_some_and(|idx| other.parts[idx].hi >= p.hi)
        })
    }

    /// Maximal open gaps of `self` inside `hull`, left to right.
    ///
    /// Parts and gaps alternate and tile `hull`.
    pub fn gaps(&self, hull: &Interval) -> Result<Vec<Gap>> {
        if let (Some(first), Some(last)) = (self.parts.first(), self.parts.last()) {
            if first.lo < hull.lo || last.hi > hull.hi {
                return Err(Error::NotInHull {
                    lo: Box::new(hull.lo.clone()),
                    hi: Box::new(hull.hi.clone()),
                });
            }
        } else {
            return Ok(if hull.lo < hull.hi {
                vec![Gap {
                    lo: hull.lo.clone(),
                    hi: hull.hi.clone(),
                }]
            } else {
                Vec::new()
            });
        }
        let mut out = Vec::with_capacity(self.parts.len() + 1);
        let mut cursor = &hull.lo;
        for p in &self.parts {
            if cursor < &p.lo {
                out.push(Gap {
                    lo: cursor.clone(),
                    hi: p.lo.clone(),
                });
            }
            cursor = &p.hi;
        }
        if cursor < &hull.hi {
            out.push(Gap {
                lo: cursor.clone(),
                hi: hull.hi.clone(),
            });
        }
        Ok(out)
    }

    /// Image under `x -> c * x`, `c > 0`.
    pub fn scale(&self, c: &Scalar) -> Result<IntervalSet> {
        if !c.is_positive() {
            return Err(Error::NonPositiveScale(c.clone()));
        }
        Ok(IntervalSet::from_sorted(
            self.parts.iter().map(|p| p.scale(c)).collect(),
        ))
    }

    /// Intersection with a single closed interval.
    pub fn clip(&self, window: &Interval) -> IntervalSet {
        IntervalSet::from_sorted(
            self.parts
                .iter()
                .filter_map(|p| p.intersect(window))
                .collect(),
        )
    }

    /// `hull` with every open gap in `removed` taken out.
    pub fn hull_minus_open(hull: &Interval, removed: &[Gap]) -> IntervalSet {
        let mut gaps: Vec<&Gap> = removed.iter().filter(|g| g.lo < g.hi).collect();
        gaps.sort_unstable_by(|a, b| a.lo.cmp(&b.lo));
        let mut parts = Vec::new();
        let mut lo = hull.lo.clone();
        let mut done = false;
        for g in gaps {
            if g.hi <= lo {
                continue;
            }
            if g.lo >= hull.hi {
                break;
            }
            if g.lo >= lo {
                parts.push(Interval::ordered(lo.clone(), g.lo.clone()));
            }
            if g.hi >= hull.hi {
                done = true;
                break;
            }
            lo = g.hi.clone();
        }
        if !done {
            parts.push(Interval::ordered(lo, hull.hi.clone()));
        }
        // closed pieces may touch where gaps abut; normalization merges them
        IntervalSet::normalize_valid(parts)
    }
}

impl std::fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "{{}}");
        }
        write!(f, "{{")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}
