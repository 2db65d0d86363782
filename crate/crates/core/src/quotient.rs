//! Covers of the quotient set `D = {x1^2 / x2 : x1, x2 in F, x2 != 0}` and
//! visibility certificates for slopes `k`.
//!
//! Every nonzero point of `F` is `lambda^n c` with `c` in `F' = f1(F)`, so
//! `D \ {0}` is the union over all integers `i` of `lambda^i * Q` where
//! `Q = {x^2 / y : x, y in F'}`. A rank-`n` cover of `Q` is the union of the
//! images of all pairs of rank-`n` basic intervals of `F'`; it contains `Q`,
//! so any gap in its scaled copies is a gap of `D`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cantor::{level_set, prime_level_set, CantorParams, LevelSet};
use crate::error::{Error, Result};
use crate::interval::{ratio_image_unchecked, Gap, Interval, IntervalSet};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainTag {
    /// Image of `F'_n x F'_n`, a cover of `Q`.
    PrimeByPrime,
    /// Image of a pair of level sets that are not both `F'` approximations.
    Pairwise,
    /// Union of scaled `Q` covers, clipped to a window.
    Window,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientCover {
    pub params: CantorParams,
    pub rank: u32,
    pub set: IntervalSet,
    pub domain_tag: DomainTag,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub window: Option<Interval>,
}

/// `[(1 - lambda)^2, 1 / (1 - lambda)]`, the hull of every `Q` cover.
pub fn base_hull(p: &CantorParams) -> Interval {
    let h = p.prime_hull();
    ratio_image_unchecked(&h, &h)
}

fn check_pair(a: &LevelSet, b: &LevelSet) -> Result<()> {
    if a.params != b.params {
        return Err(Error::InvalidArgument(
            "level sets have different lambda".into(),
        ));
    }
    if !b.hull().lo().is_positive() {
        return Err(Error::TouchesZero("pairwise_ratio_cover denominator set"));
    }
    Ok(())
}

fn cover_of(a: &LevelSet, b: &LevelSet, set: IntervalSet) -> QuotientCover {
    let both_prime =
        a.variant == crate::cantor::Variant::Prime && b.variant == crate::cantor::Variant::Prime;
    QuotientCover {
        params: a.params.clone(),
        rank: a.rank.min(b.rank),
        set,
        domain_tag: if both_prime {
            DomainTag::PrimeByPrime
        } else {
            DomainTag::Pairwise
        },
        window: None,
    }
}

/// Normalized union of `x^2 / y` images over all part pairs of `a x b`.
///
/// Rows (fixed `x` part) are produced already sorted, merged in one sweep,
/// and combined across rows by linear merges in parallel. The result does not
/// depend on scheduling.
pub fn pairwise_ratio_cover(a: &LevelSet, b: &LevelSet) -> Result<QuotientCover> {
    check_pair(a, b)?;
    let ys = b.parts();
    let set = a
        .parts()
        .par_iter()
        .map(|x| {
            // x^2/y decreases in y, so walking y right-to-left sorts by lo
            let row: Vec<Interval> = ys
                .iter()
                .rev()
                .map(|y| ratio_image_unchecked(x, y))
                .collect();
            sweep_sorted(row)
        })
        .reduce(IntervalSet::empty, IntervalSet::merge);
    Ok(cover_of(a, b, set))
}

/// Same cover, built by materializing every pair image and sort-merging.
pub fn pairwise_ratio_cover_materialized(a: &LevelSet, b: &LevelSet) -> Result<QuotientCover> {
    check_pair(a, b)?;
    let raw: Vec<Interval> = a
        .parts()
        .iter()
        .flat_map(|x| b.parts().iter().map(move |y| ratio_image_unchecked(x, y)))
        .collect();
    Ok(cover_of(a, b, IntervalSet::normalize_valid(raw)))
}

fn sweep_sorted(row: Vec<Interval>) -> IntervalSet {
    IntervalSet::empty().merge(IntervalSet::normalize_valid(row))
}

/// Rank-`n` cover of `Q`.
pub fn prime_quotient_cover(p: &CantorParams, rank: u32) -> QuotientCover {
    let f = prime_level_set(p, rank);
    pairwise_ratio_cover(&f, &f).expect("prime level sets avoid zero")
}

/// `[(1 - lambda)^2, 1 / (1 - lambda)]`, which is exactly `Q` once the merge
/// lemma applies (`lambda >= 1/3`).
pub fn merged_base_interval(p: &CantorParams) -> Result<Interval> {
    if p.lambda() < &Scalar::new(1, 3) {
        return Err(Error::MergeHypothesisUnmet(p.lambda().clone()));
    }
    Ok(base_hull(p))
}

/// `x^3 - 3x^2 + 4x - 1`. Its unique real root `alpha` is where consecutive
/// `lambda`-scaled copies of the base interval start to overlap.
pub fn alpha_poly(x: &Scalar) -> Scalar {
    let x2 = x.square();
    &x2 * x - Scalar::from_integer(3) * &x2 + Scalar::from_integer(4) * x - Scalar::one()
}

/// Rational bracket of width at most `precision` around the real root of
/// [`alpha_poly`], by bisection on `[0, 1/2]` with exact signs.
pub fn alpha_root(precision: &Scalar) -> Result<Interval> {
    if !precision.is_positive() {
        return Err(Error::InvalidArgument("precision must be positive".into()));
    }
    let mut lo = Scalar::zero();
    let mut hi = Scalar::new(1, 2);
    debug_assert!(alpha_poly(&lo).is_negative() && alpha_poly(&hi).is_positive());
    while &(&hi - &lo) > precision {
        let mid = lo.midpoint(&hi);
        match alpha_poly(&mid).signum() {
            -1 => lo = mid,
            1 => hi = mid,
            _ => return Ok(Interval::point(mid)),
        }
    }
    Ok(Interval::ordered(lo, hi))
}

/// `⋃_{i = index_lo}^{index_hi} lambda^i * base`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleDecomposition {
    pub params: CantorParams,
    pub base: Interval,
    pub index_lo: i32,
    pub index_hi: i32,
}

impl ScaleDecomposition {
    pub fn copy(&self, i: i32) -> Interval {
        self.base.scale(&self.params.lambda_pow(i))
    }

    pub fn to_set(&self) -> IntervalSet {
        scaled_copies(
            &self.params,
            &IntervalSet::from(self.base.clone()),
            self.index_lo,
            self.index_hi,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum WindowCoverage {
    Covered(ScaleDecomposition),
    /// The first gap between consecutive scaled copies that meets the window.
    Uncovered {
        gap: Gap,
        index_lo: i32,
        index_hi: i32,
    },
}

impl WindowCoverage {
    pub fn is_covered(&self) -> bool {
        matches!(self, WindowCoverage::Covered(_))
    }
}

/// Do consecutive scaled copies of the base overlap? `lambda * hi >= lo`,
/// equivalently `lambda >= (1 - lambda)^3`, equivalently `alpha_poly(lambda) >= 0`.
pub fn scaled_copies_overlap(p: &CantorParams) -> bool {
    let base = base_hull(p);
    p.lambda() * base.hi() >= *base.lo()
}

/// Scale indices `i` whose copy `lambda^i * hull` meets `window`, as
/// `(first, last)`; empty when `first > last`. Exact repeated multiplication.
pub fn relevant_scales(p: &CantorParams, hull: &Interval, window: &Interval) -> (i32, i32) {
    assert!(hull.lo().is_positive() && window.lo().is_positive());
    let lam = p.lambda();
    let inv = lam.recip();

    // first: smallest i with lambda^i * hull.lo <= window.hi
    let mut i = 0;
    let mut x = hull.lo().clone();
    if &x <= window.hi() {
        loop {
            let up = &x * &inv;
            if &up > window.hi() {
                break;
            }
            x = up;
            i -= 1;
        }
    } else {
        while &x > window.hi() {
            x = &x * lam;
            i += 1;
        }
    }
    let first = i;

    // last: largest i with lambda^i * hull.hi >= window.lo
    let mut i = 0;
    let mut y = hull.hi().clone();
    if &y >= window.lo() {
        loop {
            let down = &y * lam;
            if &down < window.lo() {
                break;
            }
            y = down;
            i += 1;
        }
    } else {
        while &y < window.lo() {
            y = &y * &inv;
            i -= 1;
        }
    }
    (first, i)
}

fn scaled_copies(p: &CantorParams, set: &IntervalSet, first: i32, last: i32) -> IntervalSet {
    (first..=last)
        .map(|i| set.scale(&p.lambda_pow(i)).expect("lambda^i > 0"))
        .fold(IntervalSet::empty(), IntervalSet::merge)
}

fn check_window(window: &Interval, what: &'static str) -> Result<()> {
    if !window.lo().is_positive() {
        return Err(Error::TouchesZero(what));
    }
    Ok(())
}

/// Coverage of `window` by scaled copies of the base hull, for any `lambda`.
///
/// The base hull equals `Q` only under the merge lemma; below `1/3` this is
/// the hull-level picture and says nothing about `D` itself.
pub fn scaled_hull_coverage(p: &CantorParams, window: &Interval) -> Result<WindowCoverage> {
    check_window(window, "scales_cover_window")?;
    let base = base_hull(p);
    let (first, last) = relevant_scales(p, &base, window);
    let union = scaled_copies(p, &IntervalSet::from(base.clone()), first - 1, last + 1);
    let hull = union.hull().expect("at least one copy");
    let first_gap = union
        .gaps(&hull)
        .expect("hull of itself")
        .into_iter()
        .find(|g| &g.lo < window.hi() && &g.hi > window.lo());
    Ok(match first_gap {
        None => WindowCoverage::Covered(ScaleDecomposition {
            params: p.clone(),
            base,
            index_lo: first,
            index_hi: last,
        }),
        Some(gap) => WindowCoverage::Uncovered {
            gap,
            index_lo: first,
            index_hi: last,
        },
    })
}

/// Decomposition of `window` into scaled copies of the merged base interval.
/// Requires `lambda >= 1/3`.
pub fn scales_cover_window(p: &CantorParams, window: &Interval) -> Result<WindowCoverage> {
    merged_base_interval(p)?;
    scaled_hull_coverage(p, window)
}

/// Rank-`rank` outer cover of `D ∩ window`: the scaled copies of the rank-`rank`
/// `Q` cover that meet `window`, clipped to it.
pub fn d_outer_cover(p: &CantorParams, rank: u32, window: &Interval) -> Result<QuotientCover> {
    check_window(window, "d_outer_cover")?;
    let q = prime_quotient_cover(p, rank);
    let (first, last) = relevant_scales(p, &base_hull(p), window);
    let set = scaled_copies(p, &q.set, first, last).clip(window);
    Ok(QuotientCover {
        params: p.clone(),
        rank,
        set,
        domain_tag: DomainTag::Window,
        window: Some(window.clone()),
    })
}

/// The gap of the rank-`rank` `D` cover that contains `k`, if `k` is outside it.
pub fn excluding_gap(p: &CantorParams, rank: u32, k: &Scalar) -> Option<(Gap, i32, i32)> {
    let q = prime_quotient_cover(p, rank);
    let point = Interval::point(k.clone());
    let (first, last) = relevant_scales(p, &base_hull(p), &point);
    // copies beyond first-1 / last+1 lie further from k than these neighbours
    let near = scaled_copies(p, &q.set, first - 1, last + 1);
    if near.contains_point(k) {
        return None;
    }
    let idx = near.parts().partition_point(|part| part.hi() < k);
    let lo = near.parts()[idx - 1].hi().clone();
    let hi = near.parts()[idx].lo().clone();
    Some((Gap { lo, hi }, first - 1, last + 1))
}

/// Is `target` in the rank-`rank` `Q` cover? Refines only the pairs of
/// `F'` basic intervals whose image still contains `target`.
pub fn q_cover_contains(p: &CantorParams, rank: u32, target: &Scalar) -> bool {
    let hull = p.prime_hull();
    let mut frontier = vec![(hull.clone(), hull)];
    for r in 0..=rank {
        frontier.retain(|(x, y)| ratio_image_unchecked(x, y).contains(target));
        if frontier.is_empty() || r == rank {
            break;
        }
        let lam = p.lambda();
        let split = |i: &Interval| {
            let child = i.length() * lam;
            [
                Interval::ordered(i.lo().clone(), i.lo() + &child),
                Interval::ordered(i.hi() - &child, i.hi().clone()),
            ]
        };
        frontier = frontier
            .iter()
            .flat_map(|(x, y)| {
                let (xs, ys) = (split(x), split(y));
                xs.into_iter()
                    .flat_map(move |cx| ys.clone().into_iter().map(move |cy| (cx.clone(), cy)))
            })
            .collect();
    }
    !frontier.is_empty()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    InD,
    Visible,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    /// `k = 0 = 0^2 / x2`.
    Zero { x2: Scalar },
    /// `k` lies in `lambda^index * [(1 - lambda)^2, 1 / (1 - lambda)]`, which is
    /// contained in `D` when `lambda >= 1/3`.
    Scale { index: i32, interval: Interval },
    /// `k = x1^2 / x2` with both points endpoints of the rank-`rank` level set.
    Pair { x1: Scalar, x2: Scalar, rank: u32 },
    /// `k` lies in an open gap of the rank-`rank` outer cover of `D`.
    Excluded {
        rank: u32,
        gap: Gap,
        index_lo: i32,
        index_hi: i32,
    },
    /// Nothing decided up to `max_rank`.
    Undecided { max_rank: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub lambda: Scalar,
    pub k: Scalar,
    pub witness: Witness,
    /// All values above are exact rationals.
    pub exact: bool,
}

impl Certificate {
    fn new(p: &CantorParams, k: &Scalar, witness: Witness) -> Self {
        let kind = match witness {
            Witness::Zero { .. } | Witness::Scale { .. } | Witness::Pair { .. } => {
                CertificateKind::InD
            }
            Witness::Excluded { .. } => CertificateKind::Visible,
            Witness::Undecided { .. } => CertificateKind::Unknown,
        };
        Certificate {
            kind,
            lambda: p.lambda().clone(),
            k: k.clone(),
            witness,
            exact: true,
        }
    }

    /// Re-derive the witness from scratch. `Unknown` certificates claim
    /// nothing and always check.
    pub fn check(&self) -> Result<bool> {
        let p = CantorParams::new(self.lambda.clone())?;
        let k = &self.k;
        Ok(match &self.witness {
            Witness::Zero { x2 } => {
                k.is_zero() && !x2.is_zero() && level_set(&p, 0).endpoints().contains(x2)
            }
            Witness::Scale { index, interval } => {
                merged_base_interval(&p).is_ok()
                    && *interval == base_hull(&p).scale(&p.lambda_pow(*index))
                    && interval.contains(k)
            }
            Witness::Pair { x1, x2, rank } => {
                let ends = level_set(&p, *rank).endpoints();
                !x2.is_zero()
                    && &(x1.square() / x2) == k
                    && ends.binary_search(x1).is_ok()
                    && ends.binary_search(x2).is_ok()
            }
            Witness::Excluded { rank, gap, .. } => {
                gap.contains(k)
                    && d_outer_cover(&p, *rank, &gap.closure())?
                        .set
                        .parts()
                        .iter()
                        .all(|part| part.hi() <= &gap.lo || part.lo() >= &gap.hi)
            }
            Witness::Undecided { .. } => true,
        })
    }
}

/// Scale index `i` with `k` in `lambda^i * base`, the one nearest zero.
fn scale_witness(p: &CantorParams, base: &Interval, k: &Scalar) -> Option<(i32, Interval)> {
    let (first, last) = relevant_scales(p, base, &Interval::point(k.clone()));
    if first > last {
        return None;
    }
    let index = 0.clamp(first, last);
    Some((index, base.scale(&p.lambda_pow(index))))
}

/// `(x1, x2)` among rank-`rank` endpoints with `x1^2 / x2 = k`.
fn pair_witness(p: &CantorParams, k: &Scalar, rank: u32) -> Option<(Scalar, Scalar)> {
    let ends = level_set(p, rank).endpoints();
    ends.iter().filter(|x2| x2.is_positive()).find_map(|x2| {
        let x1 = (k * x2).sqrt_exact()?;
        ends.binary_search(&x1).is_ok().then(|| (x1, x2.clone()))
    })
}

/// Decide whether the line `y = k x` meets `F x F^2`, i.e. whether `k` is in `D`.
///
/// Checks run in a fixed order: `k = 0`; scale witness (only for
/// `lambda >= 1/3`); exact endpoint pair; exclusion by a gap of the rank-`r`
/// cover for `r = 0..=max_rank`; otherwise `Unknown`.
pub fn classify_k(p: &CantorParams, k: &Scalar, max_rank: u32) -> Result<Certificate> {
    if k.is_negative() {
        return Err(Error::NegativeK(k.clone()));
    }
    if k.is_zero() {
        return Ok(Certificate::new(p, k, Witness::Zero { x2: Scalar::one() }));
    }
    if let Ok(base) = merged_base_interval(p) {
        if let Some((index, interval)) = scale_witness(p, &base, k) {
            return Ok(Certificate::new(p, k, Witness::Scale { index, interval }));
        }
    }
    if let Some((x1, x2)) = pair_witness(p, k, max_rank) {
        return Ok(Certificate::new(
            p,
            k,
            Witness::Pair {
                x1,
                x2,
                rank: max_rank,
            },
        ));
    }
    let (first, last) = relevant_scales(p, &base_hull(p), &Interval::point(k.clone()));
    for rank in 0..=max_rank {
        let inside = (first..=last).any(|i| q_cover_contains(p, rank, &(k / p.lambda_pow(i))));
        if !inside {
            let (gap, index_lo, index_hi) =
                excluding_gap(p, rank, k).expect("k outside the cover at this rank");
            return Ok(Certificate::new(
                p,
                k,
                Witness::Excluded {
                    rank,
                    gap,
                    index_lo,
                    index_hi,
                },
            ));
        }
    }
    Ok(Certificate::new(p, k, Witness::Undecided { max_rank }))
}
