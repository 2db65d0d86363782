//! Exact-rational tools for the middle Cantor set `F` with ratio `lambda`,
//! its squared image, and the quotient set `D = {x1^2 / x2}`.
//!
//! * [`interval`]: closed intervals and normalized interval sets.
//! * [`cantor`]: level sets, removed gaps and squared covers.
//! * [`quotient`]: covers of `D`, scale decompositions, visibility certificates.
//! * [`verify`]: exact checks of the inequality chains and identities behind
//!   the structure results.

pub mod cantor;
pub mod error;
pub mod interval;
pub mod quotient;
pub mod scalar;
pub mod verify;

pub use cantor::{
    c_n, gap_list, largest_squared_gap, level_set, prime_level_set, squared_level_set,
    CantorParams, GapRecord, LevelSet, SquaredCover, Variant, DEFAULT_RANK_CEILING,
};
pub use error::{Error, Result};
pub use interval::{ratio_image, square_image, Gap, Interval, IntervalSet};
pub use quotient::{
    alpha_root, classify_k, d_outer_cover, merged_base_interval, pairwise_ratio_cover,
    scales_cover_window, Certificate, CertificateKind, QuotientCover, ScaleDecomposition,
    WindowCoverage, Witness,
};
pub use scalar::Scalar;
pub use verify::{
    merge_subintervals, nss_evidence, sweep_merge, threshold_tests,
    verify_closed_interval_conditions, verify_merge, MergeCheckInput, VerificationReport,
};
