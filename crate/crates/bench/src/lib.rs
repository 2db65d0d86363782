//! Shared inputs for the benchmarks in `benches/`.

use cantorvis_core::{CantorParams, Interval, Scalar};

/// The parameter values the benchmarks sweep over.
pub fn lambdas() -> Vec<CantorParams> {
    [(1, 3), (2, 5), (9, 20)]
        .into_iter()
        .map(|(p, q)| CantorParams::new(Scalar::new(p, q)).expect("lambda in range"))
        .collect()
}

/// `count` unit-length intervals with deterministic overlaps, unsorted.
pub fn scattered_intervals(count: u32) -> Vec<Interval> {
    (0..count)
        .map(|i| {
            let lo = Scalar::new(i64::from((i * 7919) % count), 2);
            Interval::new(lo.clone(), lo + Scalar::one()).expect("ordered")
        })
        .collect()
}
