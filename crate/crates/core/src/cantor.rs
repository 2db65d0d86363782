//! Finite-rank approximations of the middle Cantor set `F` generated by
//! `f0(x) = lambda x`, `f1(x) = lambda x + 1 - lambda`, of the sub-attractor
//! `F' = f1(F)`, and of the squared image `{x^2 : x in F}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{square_image, Gap, Interval, IntervalSet};
use crate::scalar::Scalar;

/// Soft rank ceiling for full level sets (`2^16` parts). Callers pick their
/// own limits; the CLI enforces this one unless forced.
pub const DEFAULT_RANK_CEILING: u32 = 16;

/// The contraction ratio, `0 < lambda < 1/2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct CantorParams {
    lambda: Scalar,
}

#[derive(Deserialize)]
struct RawParams {
    lambda: Scalar,
}

impl TryFrom<RawParams> for CantorParams {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        CantorParams::new(raw.lambda)
    }
}

impl CantorParams {
    pub fn new(lambda: Scalar) -> Result<Self> {
        if !lambda.is_positive() || lambda >= Scalar::new(1, 2) {
            return Err(Error::LambdaOutOfRange(lambda));
        }
        Ok(CantorParams { lambda })
    }

    pub fn lambda(&self) -> &Scalar {
        &self.lambda
    }

    /// `1 - lambda`.
    pub fn one_minus(&self) -> Scalar {
        Scalar::one() - &self.lambda
    }

    /// `lambda^n`, `n` may be negative.
    pub fn lambda_pow(&self, n: i32) -> Scalar {
        self.lambda.pow(n)
    }

    /// Convex hull of `F'`: `[1 - lambda, 1]`.
    pub fn prime_hull(&self) -> Interval {
        Interval::ordered(self.one_minus(), Scalar::one())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Approximation of `F`, hull `[0, 1]`.
    Full,
    /// Approximation of `F' = f1(F)`, hull `[1 - lambda, 1]`.
    Prime,
}

/// The union of the `2^rank` basic intervals of a given rank.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSet {
    pub params: CantorParams,
    pub rank: u32,
    pub set: IntervalSet,
    pub variant: Variant,
}

impl LevelSet {
    pub fn hull(&self) -> Interval {
        match self.variant {
            Variant::Full => Interval::ordered(Scalar::zero(), Scalar::one()),
            Variant::Prime => self.params.prime_hull(),
        }
    }

    /// Common length of every part.
    pub fn part_length(&self) -> Scalar {
        match self.variant {
            Variant::Full => self.params.lambda_pow(self.rank as i32),
            Variant::Prime => self.params.lambda_pow(self.rank as i32 + 1),
        }
    }

    pub fn parts(&self) -> &[Interval] {
        self.set.parts()
    }

    /// All part endpoints, ascending. These are points of the limit set.
    pub fn endpoints(&self) -> Vec<Scalar> {
        self.parts()
            .iter()
            .flat_map(|p| [p.lo().clone(), p.hi().clone()])
            .collect()
    }
}

/// Replace every part by its left and right `lambda`-fraction children.
fn refine(parts: &[Interval], lambda: &Scalar) -> Vec<Interval> {
    let mut out = Vec::with_capacity(parts.len() * 2);
    for p in parts {
        let child = p.length() * lambda;
        out.push(Interval::ordered(p.lo().clone(), p.lo() + &child));
        out.push(Interval::ordered(p.hi() - &child, p.hi().clone()));
    }
    out
}

/// Rank-`n` basic intervals `f_sigma([0, 1])`, `sigma in {0,1}^n`.
pub fn level_set(p: &CantorParams, n: u32) -> LevelSet {
    let mut parts = vec![Interval::ordered(Scalar::zero(), Scalar::one())];
    for _ in 0..n {
        parts = refine(&parts, p.lambda());
    }
    LevelSet {
        params: p.clone(),
        rank: n,
        set: IntervalSet::from_sorted(parts),
        variant: Variant::Full,
    }
}

/// Rank-`n` approximation of `F'` from its own maps
/// `h0(x) = lambda x + (1 - lambda)^2`, `h1(x) = lambda x + 1 - lambda`.
pub fn prime_level_set(p: &CantorParams, n: u32) -> LevelSet {
    let lambda = p.lambda();
    let shift0 = p.one_minus().square();
    let shift1 = p.one_minus();
    let mut parts = vec![p.prime_hull()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(parts.len() * 2);
        next.extend(parts.iter().map(|i| i.affine(lambda, &shift0)));
        next.extend(parts.iter().map(|i| i.affine(lambda, &shift1)));
        parts = next;
    }
    LevelSet {
        params: p.clone(),
        rank: n,
        set: IntervalSet::from_sorted(parts),
        variant: Variant::Prime,
    }
}

/// A gap `(a, b)` removed at construction step `step`, `index` counted from
/// 1 left to right within the step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapRecord {
    pub step: u32,
    pub index: u64,
    pub a: Scalar,
    pub b: Scalar,
}

impl GapRecord {
    pub fn gap(&self) -> Gap {
        Gap {
            lo: self.a.clone(),
            hi: self.b.clone(),
        }
    }

    pub fn squared(&self) -> Gap {
        Gap {
            lo: self.a.square(),
            hi: self.b.square(),
        }
    }
}

/// The `2^(k-1)` gaps `f_sigma((lambda, 1 - lambda))` removed at step `k`.
pub fn gap_list(p: &CantorParams, k: u32) -> Result<Vec<GapRecord>> {
    if k == 0 {
        return Err(Error::InvalidArgument("gap step must be >= 1".into()));
    }
    let lam_k = p.lambda_pow(k as i32);
    let parent = level_set(p, k - 1);
    Ok(parent
        .parts()
        .iter()
        .enumerate()
        .map(|(i, part)| GapRecord {
            step: k,
            index: i as u64 + 1,
            a: part.lo() + &lam_k,
            b: part.hi() - &lam_k,
        })
        .collect())
}

/// Rank-tagged outer cover of the squared Cantor set: the squares of the
/// rank-`n` basic intervals. Decreases in `rank`; never the limit set itself.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquaredCover {
    pub params: CantorParams,
    pub rank: u32,
    pub set: IntervalSet,
}

pub fn squared_level_set(p: &CantorParams, n: u32) -> SquaredCover {
    let parts = level_set(p, n)
        .parts()
        .iter()
        .map(|i| square_image(i).expect("level set parts are non-negative"))
        .collect();
    SquaredCover {
        params: p.clone(),
        rank: n,
        set: IntervalSet::normalize_valid(parts),
    }
}

/// `c_n = (1 - 2 lambda) lambda^(n-1) (2 - lambda^(n-1))`, the length of the
/// rightmost squared gap of step `n`.
pub fn c_n(p: &CantorParams, n: u32) -> Result<Scalar> {
    if n == 0 {
        return Err(Error::InvalidArgument("c_n needs n >= 1".into()));
    }
    let two = Scalar::from_integer(2);
    let one_minus_2l = Scalar::one() - &two * p.lambda();
    let l = p.lambda_pow(n as i32 - 1);
    Ok(one_minus_2l * &l * (two - &l))
}

/// Longest squared gap created in steps `1..=up_to_rank`, by exhaustive
/// comparison. Ties go to the earliest step, then the leftmost gap.
pub fn largest_squared_gap(p: &CantorParams, up_to_rank: u32) -> Result<Gap> {
    if up_to_rank == 0 {
        return Err(Error::InvalidArgument("up_to_rank must be >= 1".into()));
    }
    let mut best: Option<(Scalar, Gap)> = None;
    for k in 1..=up_to_rank {
        for rec in gap_list(p, k)? {
            let g = rec.squared();
            let len = g.length();
            if best.as_ref().is_none_or(|(b, _)| &len > b) {
                best = Some((len, g));
            }
        }
    }
    Ok(best.expect("step 1 has a gap").1)
}
