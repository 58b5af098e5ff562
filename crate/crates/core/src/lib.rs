//! Analysis of finite quasihypermetric (negative type) metric spaces.
//!
//! A finite metric space is quasihypermetric when the energy
//! `I(mu) = sum d(x, y) mu(x) mu(y)` is nonpositive for every signed weight
//! vector of total mass zero, and strictly so when zero energy forces the
//! zero vector. This crate computes the geometric constant
//! `M(X) = sup I(mu)` over mass-1 weights with its finite/infinite
//! dichotomy, classifies spaces spectrally with machine-checkable
//! certificates, builds the isometric embedding of `(X, sqrt(d))` into
//! Euclidean space and inverts it, extracts maximal strictly
//! quasihypermetric subspaces, evaluates the upper bounds on M available for
//! L1-embedded sets, and searches for extremal configurations of a given
//! cardinality and strict-subspace size.
//!
//! Inner loops that are data parallel (search restarts, subset and integer
//! vector enumeration) run on rayon under the default `parallel` feature and
//! fall back to sequential iteration without it; results are identical
//! either way.

mod classify;
mod embed;
mod error;
mod generators;
mod io;
mod knr;
mod l1geom;
mod matrix;
mod measures;
mod metric;
mod par;
mod subspace;

pub use classify::{
    classify, hypermetric_check_bounded, is_quasihypermetric, is_strictly_quasihypermetric,
    Classification, HypermetricVerdict, MFiniteness, DEFAULT_ENUM_CAP,
};
pub use embed::{
    affine_rank, angle_classification, antipodal_pair, circumsphere, config_to_metric,
    schoenberg_embed, AngleClassification, PointConfig, SphereFit,
};
pub use error::{Error, Result};
pub use generators::{
    canonical_box_subset, gen_box_corners, gen_circle, gen_discrete, gen_join,
    gen_join_discrete_cycle, gen_join_discrete_pair, gen_random_nonobtuse,
    gen_random_nonobtuse_on_sphere, gen_star, JoinSpec,
};
pub use io::{read_points, read_space, write_points, write_space, LabeledPoints};
pub use knr::{
    feasible_cell, knr_lower_bound_search, knr_monotonicity_probe, KnrResult,
    MonotonicityEntry, MonotonicityReport,
};
pub use l1geom::{
    coordinate_diameters, fold_negative_weight, l1_metric, l1_necessary_condition,
    l1_upper_bounds, one_dim_energy, one_dim_energy_bound, BoundsReport, FoldSide, L1Config,
};
pub use measures::{
    energy, energy_pair, invariant_measure, m_value, m_value_oracle, potential, MValue,
    WeightVector,
};
pub use metric::{
    diameter, normalize_diameter, validate_metric, DistanceMatrix, ValidationReport, Violation,
    ViolationKind, DEFAULT_TOL, EIG_REL_TOL,
};
pub use par::{configure_threads, indexed_map, indexed_map_seq, parallel_enabled};
pub use subspace::{
    enumerate_maximal_strict_subspaces, extension_measure, maximal_strict_subspace,
    rank_distance_matrix, verify_m_preservation, MPreservationReport, SubspaceResult,
    DEFAULT_SUBSET_CAP,
};
