//! Acceptance suite. Prints one `PASS`/`FAIL` line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Reference values are recomputed here from closed forms or brute force,
//! independently of the library routine under test.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use cantorvis_core::{
    alpha_root, c_n, classify_k, d_outer_cover, largest_squared_gap, level_set,
    pairwise_ratio_cover, prime_level_set,
    quotient::{alpha_poly, base_hull},
    squared_level_set, sweep_merge,
    verify::sqrt2_gate_poly,
    verify_closed_interval_conditions, CantorParams, CertificateKind, Gap, Interval, IntervalSet,
    Scalar, Witness,
};
use rand::{rngs::StdRng, Rng, SeedableRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

fn q(p: i64, d: i64) -> Scalar {
    Scalar::new(p, d)
}

fn s(n: i64) -> Scalar {
    Scalar::from_integer(n)
}

fn params(p: i64, d: i64) -> CantorParams {
    CantorParams::new(q(p, d)).expect("lambda in range")
}

fn iv(lo: Scalar, hi: Scalar) -> Interval {
    Interval::new(lo, hi).expect("ordered")
}

fn within(elapsed: Duration, limit_s: u64, what: &str) -> Result<(), String> {
    ensure!(
        elapsed <= Duration::from_secs(limit_s),
        "{what} took {:.2?}, limit {limit_s} s",
        elapsed
    );
    Ok(())
}

/// Exact bisection of a sign change of `f` on `[lo, hi]` down to `width`.
fn bisect(
    f: impl Fn(&Scalar) -> Scalar,
    mut lo: Scalar,
    mut hi: Scalar,
    width: &Scalar,
) -> (Scalar, Scalar) {
    let s_lo = f(&lo).signum();
    while &(&hi - &lo) > width {
        let mid = lo.midpoint(&hi);
        if f(&mid).signum() == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let bracket = alpha_root(&q(1, 1_000_000_000)).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    let poly = |x: &Scalar| x * x * x - s(3) * (x * x) + s(4) * x - s(1);
    ensure!(
        bracket.length() <= q(1, 1_000_000_000),
        "bracket width {} exceeds 1e-9",
        bracket.length()
    );
    ensure!(
        poly(bracket.lo()).signum() <= 0 && poly(bracket.hi()).signum() >= 0,
        "bracket {:?} does not straddle a root",
        bracket
    );
    ensure!(
        poly(&q(1, 4)).is_negative() && poly(&q(1, 3)).is_positive(),
        "sign test at 1/4 and 1/3 failed"
    );
    ensure!(
        alpha_poly(&q(1, 4)) == poly(&q(1, 4)) && alpha_poly(&q(1, 3)) == poly(&q(1, 3)),
        "library polynomial disagrees with the cubic"
    );
    ensure!(
        bracket.lo() > &q(1, 4) && bracket.hi() < &q(1, 3),
        "bracket not inside (1/4, 1/3)"
    );
    let mid = bracket.lo().midpoint(bracket.hi());
    ensure!(
        (&mid - q(318, 1000)).abs() <= q(5, 10_000),
        "alpha ~ {} is not within 5e-4 of 0.318",
        mid.to_f64()
    );
    within(elapsed, 1, "alpha_root")?;
    Ok(format!(
        "alpha in [{:.9}, {:.9}], {:.2?}",
        bracket.lo().to_f64(),
        bracket.hi().to_f64(),
        elapsed
    ))
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let gate = |x: &Scalar| s(2) * (x * x) - s(4) * x + s(1);
    let (a, b) = (q(29, 100), q(3, 10));
    ensure!(gate(&a).is_positive(), "gate at 29/100 is {}", gate(&a));
    ensure!(gate(&b).is_negative(), "gate at 3/10 is {}", gate(&b));
    ensure!(
        sqrt2_gate_poly(&a) == gate(&a) && sqrt2_gate_poly(&b) == gate(&b),
        "library gate polynomial disagrees"
    );
    let (lo, hi) = bisect(gate, a, b, &q(1, 1_000_000_000));
    let root_q = lo.midpoint(&hi);
    let root = root_q.to_f64();
    ensure!(
        (root - (2.0 - 2f64.sqrt()) / 2.0).abs() < 1e-8,
        "bisected root {root} is not (2 - sqrt 2)/2"
    );
    ensure!(
        (&root_q - q(293, 1000)).abs() <= q(5, 10_000),
        "root {root} not within 5e-4 of 0.293"
    );
    let elapsed = t.elapsed();
    within(elapsed, 1, "gate bisection")?;
    Ok(format!(
        "sign change in (29/100, 3/10), root ~ {root:.9}, {elapsed:.2?}"
    ))
}

fn criterion_3() -> Outcome {
    let mut notes = Vec::new();
    // Prime rank j-1 parts number 2^(j-1); pairs u1 <= u2.
    let expected_pairs: u64 = (1..=6u32)
        .map(|j| {
            let m = 1u64 << (j - 1);
            m * (m + 1) / 2
        })
        .sum();
    for (p, d) in [(1, 3), (2, 5), (9, 20)] {
        let t = Instant::now();
        let report = sweep_merge(&params(p, d), 6).map_err(|e| e.to_string())?;
        let elapsed = t.elapsed();
        ensure!(
            report.pass,
            "lambda={p}/{d}: sweep failed at {:?}",
            report.inputs.get("witness")
        );
        ensure!(
            report.cases == expected_pairs,
            "lambda={p}/{d}: {} pairs checked, expected {expected_pairs}",
            report.cases
        );
        within(elapsed, 60, &format!("sweep at lambda={p}/{d}"))?;
        notes.push(format!("{p}/{d}: {elapsed:.2?}"));
    }
    Ok(format!(
        "{expected_pairs} pairs per lambda; {}",
        notes.join(", ")
    ))
}

fn criterion_4() -> Outcome {
    let mut notes = Vec::new();
    for (p, d) in [(1, 3), (2, 5), (9, 20)] {
        let cp = params(p, d);
        let one_minus = s(1) - q(p, d);
        let want = IntervalSet::normalize(vec![iv(one_minus.square(), one_minus.recip())])
            .map_err(|e| e.to_string())?;
        for n in 0..=8 {
            let t = Instant::now();
            let prime = prime_level_set(&cp, n);
            let cover = pairwise_ratio_cover(&prime, &prime).map_err(|e| e.to_string())?;
            let elapsed = t.elapsed();
            ensure!(
                cover.set == want,
                "lambda={p}/{d}, n={n}: cover has {} parts, hull {:?}",
                cover.set.len(),
                cover.set.hull()
            );
            if n == 8 {
                within(elapsed, 120, &format!("rank 8 cover at lambda={p}/{d}"))?;
                notes.push(format!("{p}/{d}: {elapsed:.2?}"));
            }
        }
    }
    Ok(format!(
        "single interval for n <= 8; rank 8 {}",
        notes.join(", ")
    ))
}

/// Random rational in `[1/1000, 1000]`, log-uniform in magnitude.
fn random_k(rng: &mut StdRng) -> Scalar {
    let e: f64 = rng.gen_range(-3.0..=3.0);
    let den: i64 = rng.gen_range(1..=1_000_000);
    let num = ((10f64.powf(e) * den as f64).round() as i64).clamp((den + 999) / 1000, 1000 * den);
    q(num, den)
}

fn criterion_5() -> Outcome {
    let t = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed_cafe);
    let mut total = 0;
    for (p, d) in [(1, 3), (2, 5)] {
        let cp = params(p, d);
        let lam = q(p, d);
        let one_minus = s(1) - &lam;
        let base = iv(one_minus.square(), one_minus.recip());
        for _ in 0..1000 {
            let k = random_k(&mut rng);
            ensure!(
                k >= q(1, 1000) && k <= Scalar::from_integer(1000),
                "k={k} out of range"
            );
            let cert = classify_k(&cp, &k, 10).map_err(|e| e.to_string())?;
            ensure!(
                cert.kind == CertificateKind::InD,
                "lambda={p}/{d}, k={k}: {:?}",
                cert.kind
            );
            let Witness::Scale { index, interval } = &cert.witness else {
                return Err(format!("lambda={p}/{d}, k={k}: not a scale witness"));
            };
            let copy = base.scale(&lam.pow(*index));
            ensure!(
                &copy == interval && copy.contains(&k),
                "lambda={p}/{d}, k={k}: lambda^{index} * base does not hold k"
            );
            ensure!(
                cert.check() == Ok(true),
                "lambda={p}/{d}, k={k}: witness fails re-check"
            );
            total += 1;
        }
    }
    let elapsed = t.elapsed();
    within(elapsed, 30, "classification")?;
    Ok(format!(
        "{total} draws, all in D with scale witnesses, {elapsed:.2?}"
    ))
}

/// Does any rank-`rank` prime pair image `[a^2/d, b^2/c]` contain `k`?
fn brute_force_hit(cp: &CantorParams, rank: u32, k: &Scalar) -> bool {
    let parts = prime_level_set(cp, rank);
    parts.parts().iter().any(|x| {
        parts
            .parts()
            .iter()
            .any(|y| &(x.lo().square() / y.hi()) <= k && k <= &(x.hi().square() / y.lo()))
    })
}

fn criterion_6() -> Outcome {
    let cp = params(1, 4);
    let lam = q(1, 4);
    let window = base_hull(&cp);
    let mut found = None;
    for rank in 0..=10 {
        let cover = d_outer_cover(&cp, rank, &window).map_err(|e| e.to_string())?;
        if let Some(gap) = cover
            .set
            .gaps(&window)
            .map_err(|e| e.to_string())?
            .into_iter()
            .next()
        {
            found = Some((rank, gap));
            break;
        }
    }
    let Some((rank, gap)) = found else {
        return Err("no gap in the base window up to rank 10".into());
    };
    let frozen = Gap {
        lo: q(16, 15),
        hi: q(225, 208),
    };
    ensure!(
        rank == 1 && gap == frozen,
        "first gap at rank {rank} is {gap:?}, expected rank 1 {frozen:?}"
    );
    let k = gap.lo.midpoint(&gap.hi);
    ensure!(k == q(6703, 6240), "midpoint {k} changed");
    let cert = classify_k(&cp, &k, 10).map_err(|e| e.to_string())?;
    ensure!(
        cert.kind == CertificateKind::Visible,
        "k={k} classified {:?}",
        cert.kind
    );
    let Witness::Excluded {
        rank: r, gap: g, ..
    } = &cert.witness
    else {
        return Err(format!("k={k}: not an exclusion witness"));
    };
    ensure!(
        *r == 1 && g == &frozen,
        "k={k}: excluded at rank {r} by {g:?}"
    );
    ensure!(cert.check() == Ok(true), "k={k}: witness fails re-check");
    // Only the unscaled copy can reach k: lambda * (1/(1-lambda)) < k < (1-lambda)^2 / lambda.
    let one_minus = s(1) - &lam;
    ensure!(
        &lam * one_minus.recip() < k && k < one_minus.square() / &lam,
        "another scale reaches k"
    );
    for r in 0..=6 {
        let hit = brute_force_hit(&cp, r, &k);
        ensure!(hit == (r == 0), "brute force at rank {r} says {hit}");
    }
    Ok(format!(
        "k = {k} visible, gap ({}, {}) at rank {rank}",
        gap.lo, gap.hi
    ))
}

fn criterion_7() -> Outcome {
    let t = Instant::now();
    for (p, d) in [(1, 3), (2, 5), (49, 100)] {
        let cp = params(p, d);
        let lam = q(p, d);
        let c = |n: u32| c_n(&cp, n).map_err(|e| e.to_string());
        ensure!(
            c(1)? == s(1) - s(2) * &lam,
            "lambda={p}/{d}: c_1 = {}",
            c(1)?
        );
        let mut prev: Option<Scalar> = None;
        for n in 1..=31i32 {
            let cn = c(n as u32)?;
            // Rightmost step-n gap (1 - lambda^(n-1) + lambda^n, 1 - lambda^n), squared.
            let lo = s(1) - lam.pow(n - 1) + lam.pow(n);
            let hi = s(1) - lam.pow(n);
            ensure!(
                cn == hi.square() - lo.square(),
                "lambda={p}/{d}: c_{n} mismatch"
            );
            if let Some(prev) = prev {
                ensure!(cn < prev, "lambda={p}/{d}: c_{n} >= c_{}", n - 1);
            }
            prev = Some(cn);
            if (2..=30).contains(&n) {
                let l1 = lam.pow(n - 1);
                let residual = (&lam + s(1)) * &l1 * (s(2) - &l1) - &l1 * (s(2) + lam.pow(n) - &l1);
                ensure!(
                    residual.is_positive(),
                    "lambda={p}/{d}: residual at n={n} is {residual}"
                );
            }
        }
        let want = Gap {
            lo: lam.square(),
            hi: (s(1) - &lam).square(),
        };
        let got = largest_squared_gap(&cp, 12).map_err(|e| e.to_string())?;
        ensure!(got == want, "lambda={p}/{d}: largest gap {got:?}");
        // Brute force: widest hole in the rank-12 squared cover.
        let cover = squared_level_set(&cp, 12).set;
        let widest = cover
            .parts()
            .windows(2)
            .map(|w| Gap {
                lo: w[0].hi().clone(),
                hi: w[1].lo().clone(),
            })
            .max_by(|a, b| a.length().cmp(&b.length()))
            .ok_or("rank 12 cover has one part")?;
        ensure!(
            widest == want,
            "lambda={p}/{d}: brute-force widest hole {widest:?}"
        );
    }
    let elapsed = t.elapsed();
    within(elapsed, 10, "squared-gap facts")?;
    Ok(format!(
        "three lambdas, n <= 30, ranks <= 12, {elapsed:.2?}"
    ))
}

fn criterion_8() -> Outcome {
    let t = Instant::now();
    let mut checked = 0;
    for (p, d) in [(1, 3), (2, 5)] {
        let cp = params(p, d);
        for n in 0..=10 {
            // Gaps of steps <= n are the holes of the rank-n level set.
            let parts = level_set(&cp, n);
            let mut squared_gaps: Vec<(Scalar, Scalar)> = parts
                .parts()
                .windows(2)
                .map(|w| (w[0].hi().square(), w[1].lo().square()))
                .collect();
            squared_gaps.sort();
            let mut keep = Vec::new();
            let mut cursor = Scalar::zero();
            for (a, b) in squared_gaps {
                keep.push(iv(cursor, a));
                cursor = b;
            }
            keep.push(iv(cursor, Scalar::one()));
            let want = IntervalSet::normalize(keep).map_err(|e| e.to_string())?;
            let got = squared_level_set(&cp, n).set;
            ensure!(got == want, "lambda={p}/{d}, n={n}: sets differ");
            ensure!(
                got.len() == 1 << n,
                "lambda={p}/{d}, n={n}: {} parts",
                got.len()
            );
            checked += 1;
        }
    }
    let elapsed = t.elapsed();
    within(elapsed, 10, "squared cover identity")?;
    Ok(format!("{checked} exact set equalities, {elapsed:.2?}"))
}

fn criterion_9() -> Outcome {
    let t = Instant::now();
    for (p, d) in [(3, 10), (1, 3), (2, 5)] {
        let report =
            verify_closed_interval_conditions(&params(p, d), 50).map_err(|e| e.to_string())?;
        let failed: Vec<_> = report
            .details
            .iter()
            .filter(|c| !c.holds)
            .map(|c| c.label.clone())
            .collect();
        ensure!(
            report.pass && failed.is_empty(),
            "lambda={p}/{d}: failed {failed:?}"
        );
        ensure!(
            report.cases == 2500,
            "lambda={p}/{d}: {} lattice points",
            report.cases
        );
        ensure!(
            report
                .details
                .iter()
                .filter(|c| c.label.contains('=')
                    && !c.label.contains(">=")
                    && !c.label.contains("<="))
                .all(|c| c.left == c.right),
            "lambda={p}/{d}: an identity row is not exact"
        );
    }
    let elapsed = t.elapsed();
    within(elapsed, 10, "closed-interval conditions")?;
    Ok(format!("grid 50 for three lambdas, {elapsed:.2?}"))
}

fn run_cli(args: &[&str], out_dir: Option<&Path>) -> Result<(i32, Vec<u8>), String> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cantorvis"));
    cmd.args(args).env_remove("CANTORVIS_OUT_DIR");
    if let Some(dir) = out_dir {
        cmd.env("CANTORVIS_OUT_DIR", dir);
    }
    let out = cmd.output().map_err(|e| e.to_string())?;
    Ok((out.status.code().unwrap_or(-1), out.stdout))
}

fn criterion_10() -> Outcome {
    let commands: &[&[&str]] = &[
        &["level", "--lambda", "1/3", "--rank", "4"],
        &[
            "level", "--lambda", "2/5", "--rank", "3", "--prime", "--output", "csv",
        ],
        &["level", "--lambda", "1/3", "--rank", "3", "--output", "svg"],
        &["gaps", "--lambda", "0.4", "--rank", "3", "--output", "csv"],
        &["square", "--lambda", "1/3", "--rank", "3"],
        &["quotient", "--lambda", "1/4", "--rank", "3"],
        &[
            "quotient", "--lambda", "2/5", "--rank", "2", "--window", "1/100", "10", "--output",
            "csv",
        ],
        &["visible", "--lambda", "1/4", "--k", "6703/6240"],
        &["visible", "--lambda", "2/5", "--k", "1", "--output", "csv"],
        &["verify", "merge", "--lambda", "1/3", "--j-max", "4"],
        &["verify", "merge", "--lambda", "1/4", "--j-max", "3"],
        &[
            "verify", "nss", "--lambda", "2/5", "--n-max", "10", "--output", "csv",
        ],
        &[
            "verify",
            "closed-interval",
            "--lambda",
            "1/3",
            "--grid",
            "10",
        ],
        &["thresholds", "--lambda", "3/10"],
        &[
            "plot", "--lambda", "1/3", "--what", "quotient", "--rank", "3", "--output", "svg",
        ],
    ];
    for args in commands {
        let (code_a, a) = run_cli(args, None)?;
        let (code_b, b) = run_cli(args, None)?;
        ensure!(
            code_a == code_b && code_a != 2,
            "{args:?}: exit codes {code_a}, {code_b}"
        );
        ensure!(
            !a.is_empty() && a == b,
            "{args:?}: stdout differs between runs"
        );
    }
    let dir_a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir_b = tempfile::tempdir().map_err(|e| e.to_string())?;
    for args in commands {
        run_cli(args, Some(dir_a.path()))?;
        run_cli(args, Some(dir_b.path()))?;
    }
    let mut names: Vec<_> = std::fs::read_dir(dir_a.path())
        .map_err(|e| e.to_string())?
        .map(|e| e.map(|e| e.file_name()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    names.sort();
    ensure!(
        !names.is_empty(),
        "no files written to the output directory"
    );
    for name in &names {
        let a = std::fs::read(dir_a.path().join(name)).map_err(|e| e.to_string())?;
        let b = std::fs::read(dir_b.path().join(name)).map_err(|e| e.to_string())?;
        ensure!(a == b, "{name:?} differs between runs");
    }
    Ok(format!(
        "{} commands on stdout, {} report files, byte-identical",
        commands.len(),
        names.len()
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("threshold alpha", criterion_1),
        ("threshold (2 - sqrt 2)/2", criterion_2),
        ("merge sweep, j_max 6", criterion_3),
        ("closed-interval image, n <= 8", criterion_4),
        ("random k all in D", criterion_5),
        ("visible k below threshold", criterion_6),
        ("squared-gap facts", criterion_7),
        ("squared cover identity", criterion_8),
        ("perfect-square identities", criterion_9),
        ("CLI determinism", criterion_10),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".to_string()));
        match result {
            Ok(note) => println!("criterion {:>2} PASS  {name}: {note}", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
