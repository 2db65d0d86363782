//! Exact checks of the inequality chains, identities and thresholds used in
//! the structure results for `F^2` and `D`.
//!
//! Every check produces a [`VerificationReport`] whose rows carry both sides
//! of each condition as exact rationals, so a failure is auditable as is.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cantor::{c_n, largest_squared_gap, prime_level_set, CantorParams};
use crate::error::{Error, Result};
use crate::interval::{ratio_image_unchecked, Gap, Interval, IntervalSet};
use crate::quotient::alpha_poly;
use crate::scalar::Scalar;

/// Ranks above this are not used for the largest-squared-gap family in
/// [`nss_evidence`]; step `k` alone has `2^(k-1)` gaps.
pub const NSS_GAP_RANK_CAP: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
}

impl Relation {
    fn holds(self, left: &Scalar, right: &Scalar) -> bool {
        match self {
            Relation::Ge => left >= right,
            Relation::Gt => left > right,
            Relation::Eq => left == right,
            Relation::Le => left <= right,
            Relation::Lt => left < right,
        }
    }

    /// Signed slack; non-negative (positive for strict) when the relation holds.
    fn margin(self, left: &Scalar, right: &Scalar) -> Scalar {
        match self {
            Relation::Ge | Relation::Gt => left - right,
            Relation::Le | Relation::Lt => right - left,
            Relation::Eq => -(left - right).abs(),
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Ge => ">=",
            Relation::Gt => ">",
            Relation::Eq => "=",
            Relation::Le => "<=",
            Relation::Lt => "<",
        })
    }
}

/// One checked condition `left <relation> right`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub label: String,
    pub relation: Relation,
    pub left: Scalar,
    pub right: Scalar,
    pub holds: bool,
    /// Where the condition was evaluated, when it ranges over cases.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub at: Option<String>,
}

impl Condition {
    pub fn new(label: impl Into<String>, left: Scalar, relation: Relation, right: Scalar) -> Self {
        let holds = relation.holds(&left, &right);
        Condition {
            label: label.into(),
            relation,
            left,
            right,
            holds,
            at: None,
        }
    }

    fn at(mut self, at: impl Into<String>) -> Self {
        self.at = Some(at.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_name: String,
    pub inputs: BTreeMap<String, String>,
    pub pass: bool,
    /// Number of cases (pairs, lattice points, indices) evaluated.
    pub cases: u64,
    pub details: Vec<Condition>,
}

impl VerificationReport {
    fn from_rows(
        check_name: &str,
        inputs: BTreeMap<String, String>,
        cases: u64,
        details: Vec<Condition>,
    ) -> Self {
        VerificationReport {
            check_name: check_name.to_string(),
            inputs,
            pass: details.iter().all(|c| c.holds),
            cases,
            details,
        }
    }

    pub fn condition(&self, label: &str) -> Option<&Condition> {
        self.details.iter().find(|c| c.label == label)
    }
}

/// Keeps one row per label across many cases: the first failure if any,
/// otherwise the tightest instance.
#[derive(Default)]
struct Tightest {
    order: Vec<String>,
    rows: BTreeMap<String, (Scalar, Condition)>,
}

impl Tightest {
    fn push(&mut self, row: Condition) {
        let margin = row.relation.margin(&row.left, &row.right);
        match self.rows.get_mut(&row.label) {
            None => {
                self.order.push(row.label.clone());
                self.rows.insert(row.label.clone(), (margin, row));
            }
            Some((best, kept)) => {
                if kept.holds && (!row.holds || margin < *best) {
                    *best = margin;
                    *kept = row;
                }
            }
        }
    }

    fn into_rows(mut self) -> Vec<Condition> {
        self.order
            .iter()
            .map(|l| self.rows.remove(l).expect("label recorded").1)
            .collect()
    }
}

fn inputs(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

fn two() -> Scalar {
    Scalar::from_integer(2)
}

/// Two rank-`j` basic intervals `J1 = [u1, u1 + lambda^j]`,
/// `J2 = [u2, u2 + lambda^j]` inside `[1 - lambda, 1]` with `u1 <= u2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeCheckInput {
    pub params: CantorParams,
    pub u1: Scalar,
    pub u2: Scalar,
    pub j: u32,
}

impl MergeCheckInput {
    pub fn new(params: CantorParams, u1: Scalar, u2: Scalar, j: u32) -> Result<Self> {
        if j == 0 {
            return Err(Error::InvalidArgument("merge check needs j >= 1".into()));
        }
        let floor = params.one_minus();
        if u1 < floor || u2 < u1 {
            return Err(Error::InvalidArgument(format!(
                "merge check needs u2 >= u1 >= 1 - lambda, got u1 = {u1}, u2 = {u2}"
            )));
        }
        if &u2 + params.lambda_pow(j as i32) > Scalar::one() {
            return Err(Error::InvalidArgument(format!(
                "J2 = [{u2}, {u2} + lambda^{j}] leaves [1 - lambda, 1]"
            )));
        }
        Ok(MergeCheckInput { params, u1, u2, j })
    }

    pub fn j1(&self) -> Interval {
        let len = self.params.lambda_pow(self.j as i32);
        Interval::ordered(self.u1.clone(), &self.u1 + len)
    }

    pub fn j2(&self) -> Interval {
        let len = self.params.lambda_pow(self.j as i32);
        Interval::ordered(self.u2.clone(), &self.u2 + len)
    }

    fn describe(&self) -> String {
        format!("u1={}, u2={}, j={}", self.u1, self.u2, self.j)
    }
}

/// Left and right rank-`j+1` children of `[u, u + lambda^j]`.
fn children(u: &Scalar, p: &CantorParams, j: u32) -> (Interval, Interval) {
    let big = p.lambda_pow(j as i32);
    let small = p.lambda_pow(j as i32 + 1);
    let end = u + &big;
    (
        Interval::ordered(u.clone(), u + &small),
        Interval::ordered(&end - &small, end),
    )
}

/// The four images `[l1, r1] .. [l4, r4]` of child pairs of `J1 x J2`:
/// (left, right), (left, left), (right, right), (right, left).
pub fn merge_subintervals(input: &MergeCheckInput) -> [Interval; 4] {
    let (a, b) = children(&input.u1, &input.params, input.j);
    let (c, d) = children(&input.u2, &input.params, input.j);
    [
        ratio_image_unchecked(&a, &d),
        ratio_image_unchecked(&a, &c),
        ratio_image_unchecked(&b, &d),
        ratio_image_unchecked(&b, &c),
    ]
}

fn merge_rows(input: &MergeCheckInput) -> Vec<Condition> {
    let [i1, i2, i3, i4] = merge_subintervals(input);
    let (l1, r1, l2, r2) = (i1.lo(), i1.hi(), i2.lo(), i2.hi());
    let (l3, r3, l4, r4) = (i3.lo(), i3.hi(), i4.lo(), i4.hi());
    let lam = input.params.lambda();
    let (u1, u2) = (&input.u1, &input.u2);
    let t = input.params.lambda_pow(input.j as i32);
    let two_l_minus_1 = two() * lam - Scalar::one();

    // r2 - l3 in factored form
    let bracket = u1.square()
        + two() * u1 * u2 * &two_l_minus_1
        + (two() * u1 * lam + u2 * &two_l_minus_1) * &t
        + input.params.lambda_pow(2 * input.j as i32 + 2);
    let r2_minus_l3 = &t * bracket / (u2 * (u2 + &t));

    let union = IntervalSet::normalize_valid(vec![i1.clone(), i2.clone(), i3.clone(), i4.clone()]);
    let parent = ratio_image_unchecked(&input.j1(), &input.j2());
    let union_hull = union.hull().expect("four intervals");

    use Relation::*;
    vec![
        Condition::new("l1 < l2", l1.clone(), Lt, l2.clone()),
        Condition::new("r1 < r2", r1.clone(), Lt, r2.clone()),
        Condition::new("l3 < l4", l3.clone(), Lt, l4.clone()),
        Condition::new("r3 < r4", r3.clone(), Lt, r4.clone()),
        Condition::new("r1 >= l2", r1.clone(), Ge, l2.clone()),
        Condition::new("l3 >= l2", l3.clone(), Ge, l2.clone()),
        Condition::new("r3 >= l4", r3.clone(), Ge, l4.clone()),
        Condition::new("r2 > l3", r2.clone(), Gt, l3.clone()),
        Condition::new("r2 - l3 = factored form", r2 - l3, Eq, r2_minus_l3),
        Condition::new(
            "u1 + 2 u2 (2 lambda - 1) >= 0",
            u1 + two() * u2 * &two_l_minus_1,
            Ge,
            Scalar::zero(),
        ),
        Condition::new(
            "2 u1 lambda + u2 (2 lambda - 1) >= 0",
            two() * u1 * lam + u2 * &two_l_minus_1,
            Ge,
            Scalar::zero(),
        ),
        Condition::new(
            "children image parts = 1",
            Scalar::from_integer(union.len() as i64),
            Eq,
            Scalar::one(),
        ),
        Condition::new(
            "children image lo = parent lo",
            union_hull.lo().clone(),
            Eq,
            parent.lo().clone(),
        ),
        Condition::new(
            "children image hi = parent hi",
            union_hull.hi().clone(),
            Eq,
            parent.hi().clone(),
        ),
    ]
}

/// Checks that the four child-pair images of `J1 x J2` chain-overlap into the
/// parent image `[l1, r4]`, together with the orderings and sign conditions
/// that imply it.
pub fn verify_merge(input: &MergeCheckInput) -> VerificationReport {
    VerificationReport::from_rows(
        "merge",
        inputs(&[
            ("lambda", input.params.lambda().to_string()),
            ("u1", input.u1.to_string()),
            ("u2", input.u2.to_string()),
            ("j", input.j.to_string()),
        ]),
        1,
        merge_rows(input),
    )
}

/// Runs [`verify_merge`] over every pair `u1 <= u2` of left endpoints of
/// rank-`j` basic intervals inside `[1 - lambda, 1]`, `j = 1..=j_max`.
/// Stops at the first failing pair and reports all of its rows; on a full pass
/// reports the tightest instance of each condition.
pub fn sweep_merge(p: &CantorParams, j_max: u32) -> Result<VerificationReport> {
    if j_max == 0 {
        return Err(Error::InvalidArgument("j_max must be >= 1".into()));
    }
    let mut agg = Tightest::default();
    let mut cases = 0u64;
    let mut failure: Option<(MergeCheckInput, Vec<Condition>)> = None;
    'sweep: for j in 1..=j_max {
        // rank-j basic intervals of F inside [1 - lambda, 1]
        let lefts: Vec<Scalar> = prime_level_set(p, j - 1)
            .parts()
            .iter()
            .map(|i| i.lo().clone())
            .collect();
        for (a, u1) in lefts.iter().enumerate() {
            for u2 in &lefts[a..] {
                let input = MergeCheckInput::new(p.clone(), u1.clone(), u2.clone(), j)?;
                let rows = merge_rows(&input);
                cases += 1;
                if rows.iter().any(|r| !r.holds) {
                    failure = Some((input, rows));
                    break 'sweep;
                }
                let at = input.describe();
                rows.into_iter().for_each(|r| agg.push(r.at(at.clone())));
            }
        }
    }
    let mut ins = inputs(&[
        ("lambda", p.lambda().to_string()),
        ("j_max", j_max.to_string()),
    ]);
    let details = match failure {
        Some((input, rows)) => {
            ins.insert("witness".into(), input.describe());
            let at = input.describe();
            rows.into_iter().map(|r| r.at(at.clone())).collect()
        }
        None => agg.into_rows(),
    };
    Ok(VerificationReport::from_rows(
        "sweep_merge",
        ins,
        cases,
        details,
    ))
}

/// Exact evidence for the facts used to show `F^2` is not self-similar:
/// (a) `c_n / c_(n+1) > 1`, (b) its rearranged form
/// `lambda (lambda^n - lambda^(n-2) - 2) + 2 > 0`, (c) the case-2 residual
/// `(lambda + 1) lambda^(n-1) (2 - lambda^(n-1)) - lambda^(n-1) (2 + lambda^n - lambda^(n-1)) > 0`
/// for `n >= 2`, and (d) the largest squared gap is `(lambda^2, (1 - lambda)^2)`.
pub fn nss_evidence(p: &CantorParams, n_max: u32) -> Result<VerificationReport> {
    if n_max < 2 {
        return Err(Error::InvalidArgument("n_max must be >= 2".into()));
    }
    use Relation::*;
    let lam = p.lambda();
    let one = Scalar::one();
    let mut rows = Vec::new();
    rows.push(Condition::new(
        "c_1 = 1 - 2 lambda",
        c_n(p, 1)?,
        Eq,
        &one - two() * lam,
    ));
    for n in 1..=n_max as i32 {
        let at = format!("n={n}");
        let cn = c_n(p, n as u32)?;
        let cn1 = c_n(p, n as u32 + 1)?;
        let diff = (&one - lam.pow(n)).square() - (&one - p.one_minus() * lam.pow(n - 1)).square();
        rows.push(Condition::new("c_n = difference of squares", cn.clone(), Eq, diff).at(&at));

        let ratio = &cn / &cn1;
        let closed = (two() - lam.pow(n - 1)) / (lam * (two() - lam.pow(n)));
        rows.push(Condition::new("c_n / c_(n+1) = closed form", ratio.clone(), Eq, closed).at(&at));
        let a = Condition::new("(a) c_n / c_(n+1) > 1", ratio, Gt, one.clone()).at(&at);

        let b_val = lam * (lam.pow(n) - lam.pow(n - 2) - two()) + two();
        let b = Condition::new(
            "(b) lambda (lambda^n - lambda^(n-2) - 2) + 2 > 0",
            b_val,
            Gt,
            Scalar::zero(),
        )
        .at(&at);
        let indicator = |c: &Condition| Scalar::from_integer(c.holds as i64);
        rows.push(Condition::new("(a) agrees with (b)", indicator(&a), Eq, indicator(&b)).at(&at));
        rows.push(a);
        rows.push(b);

        if n >= 2 {
            let ln1 = lam.pow(n - 1);
            let residual =
                (lam + &one) * &ln1 * (two() - &ln1) - &ln1 * (two() + lam.pow(n) - &ln1);
            rows.push(
                Condition::new("(c) case-2 residual > 0", residual, Gt, Scalar::zero()).at(&at),
            );
        }
    }
    let rank = n_max.min(NSS_GAP_RANK_CAP);
    let gap = largest_squared_gap(p, rank)?;
    let want = Gap {
        lo: lam.square(),
        hi: p.one_minus().square(),
    };
    let at = format!("ranks<={rank}");
    rows.push(Condition::new("(d) largest squared gap lo = lambda^2", gap.lo, Eq, want.lo).at(&at));
    rows.push(
        Condition::new(
            "(d) largest squared gap hi = (1 - lambda)^2",
            gap.hi,
            Eq,
            want.hi,
        )
        .at(&at),
    );
    Ok(VerificationReport::from_rows(
        "nss_evidence",
        inputs(&[
            ("lambda", lam.to_string()),
            ("n_max", n_max.to_string()),
            ("gap_rank", rank.to_string()),
        ]),
        n_max as u64,
        rows,
    ))
}

/// Second derivatives of `g(x, y) = x^2 / y`.
struct Hessian {
    gx: Scalar,
    gy: Scalar,
    gxx: Scalar,
    gxy: Scalar,
    gyy: Scalar,
}

impl Hessian {
    fn at(x: &Scalar, y: &Scalar) -> Self {
        let y2 = y.square();
        Hessian {
            gx: two() * x / y,
            gy: -(x.square() / &y2),
            gxx: two() / y,
            gxy: -(two() * x / &y2),
            gyy: two() * x.square() / (&y2 * y),
        }
    }

    /// `(a d/dx + b d/dy)^2 g`.
    fn directional(&self, a: &Scalar, b: &Scalar) -> Scalar {
        a.square() * &self.gxx + two() * a * b * &self.gxy + b.square() * &self.gyy
    }
}

/// Conditions for `{x^2 / y : x, y in F'}` to be a closed interval, on a
/// `grid x grid` rational lattice over `[1 - lambda, 1]^2`:
/// the two directional second derivatives equal their perfect-square forms
/// (hence are non-negative), the slope ratio `-g_y / g_x = x / (2y)` lies in
/// the band `[lambda - 2 lambda^2, 1 / (1 - 2 lambda)]`, and the gate
/// `2 lambda^2 - 4 lambda + 1 <= 0`.
pub fn verify_closed_interval_conditions(
    p: &CantorParams,
    grid: u32,
) -> Result<VerificationReport> {
    if grid < 2 {
        return Err(Error::InvalidArgument("grid must be >= 2".into()));
    }
    use Relation::*;
    let lam = p.lambda();
    let one = Scalar::one();
    let gap = lam - two() * lam.square(); // lambda - 2 lambda^2
    let one_minus = p.one_minus();
    let band_hi = (&one - two() * lam).recip();
    let slope_lo = &one_minus / two();
    let slope_hi = (two() * &one_minus).recip();
    let dir1 = (-lam.clone(), -gap.clone());
    let dir2 = (gap.clone(), one.clone());

    let steps = Scalar::from_integer(grid as i64 - 1);
    let lattice: Vec<Scalar> = (0..grid)
        .map(|a| &one_minus + lam * Scalar::from_integer(a as i64) / &steps)
        .collect();

    let mut agg = Tightest::default();
    for (ai, x) in lattice.iter().enumerate() {
        for (bi, y) in lattice.iter().enumerate() {
            let at = format!("x={x}, y={y} (lattice {ai},{bi})");
            let h = Hessian::at(x, y);
            let r = x / y;
            let form1 = h.directional(&dir1.0, &dir1.1);
            let square1 = two() / y * (lam - &gap * &r).square();
            let form2 = h.directional(&dir2.0, &dir2.1);
            let square2 = two() / y * (&gap - &r).square();
            let slope = -(&h.gy / &h.gx);
            let half_r = &r / two();
            for row in [
                Condition::new(
                    "(a) first form = (2/y)[lambda - (lambda - 2 lambda^2) x/y]^2",
                    form1.clone(),
                    Eq,
                    square1,
                ),
                Condition::new("(a) first form >= 0", form1, Ge, Scalar::zero()),
                Condition::new(
                    "(a) second form = (2/y)(lambda - 2 lambda^2 - x/y)^2",
                    form2.clone(),
                    Eq,
                    square2,
                ),
                Condition::new("(a) second form >= 0", form2, Ge, Scalar::zero()),
                Condition::new("(b) -g_y/g_x = x/(2y)", slope.clone(), Eq, half_r),
                Condition::new(
                    "(b) x/(2y) >= (1 - lambda)/2",
                    slope.clone(),
                    Ge,
                    slope_lo.clone(),
                ),
                Condition::new(
                    "(b) x/(2y) <= 1/(2(1 - lambda))",
                    slope.clone(),
                    Le,
                    slope_hi.clone(),
                ),
                Condition::new(
                    "(b) x/(2y) >= lambda - 2 lambda^2",
                    slope.clone(),
                    Ge,
                    gap.clone(),
                ),
                Condition::new("(b) x/(2y) <= 1/(1 - 2 lambda)", slope, Le, band_hi.clone()),
            ] {
                agg.push(row.at(at.clone()));
            }
        }
    }
    let mut rows = agg.into_rows();
    rows.push(Condition::new(
        "(b) band: 1/(2(1 - lambda)) <= 1/(1 - 2 lambda)",
        slope_hi,
        Le,
        band_hi,
    ));
    rows.push(Condition::new(
        "(b) band: (1 - lambda)/2 >= lambda - 2 lambda^2",
        slope_lo,
        Ge,
        gap,
    ));
    rows.push(Condition::new(
        "(c) 2 lambda^2 - 4 lambda + 1 <= 0",
        sqrt2_gate_poly(lam),
        Le,
        Scalar::zero(),
    ));
    Ok(VerificationReport::from_rows(
        "closed_interval_conditions",
        inputs(&[("lambda", lam.to_string()), ("grid", grid.to_string())]),
        (grid as u64) * (grid as u64),
        rows,
    ))
}

/// `2x^2 - 4x + 1`; on `(0, 1/2)` it is `<= 0` exactly when `x >= (2 - sqrt 2)/2`.
pub fn sqrt2_gate_poly(x: &Scalar) -> Scalar {
    two() * x.square() - Scalar::from_integer(4) * x + Scalar::one()
}

/// Where `lambda` sits relative to `1/3`, `alpha` and `(2 - sqrt 2)/2`, by
/// exact sign tests. `pass` means all three hypotheses hold.
pub fn threshold_tests(p: &CantorParams) -> VerificationReport {
    use Relation::*;
    let lam = p.lambda();
    let rows = vec![
        Condition::new("lambda >= 1/3", lam.clone(), Ge, Scalar::new(1, 3)),
        Condition::new(
            "lambda >= alpha: lambda^3 - 3 lambda^2 + 4 lambda - 1 >= 0",
            alpha_poly(lam),
            Ge,
            Scalar::zero(),
        ),
        Condition::new(
            "lambda >= (2 - sqrt 2)/2: 2 lambda^2 - 4 lambda + 1 <= 0",
            sqrt2_gate_poly(lam),
            Le,
            Scalar::zero(),
        ),
    ];
    VerificationReport::from_rows(
        "thresholds",
        inputs(&[("lambda", lam.to_string())]),
        1,
        rows,
    )
}
