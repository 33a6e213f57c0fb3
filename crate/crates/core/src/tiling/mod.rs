//! Budgeted cut sets and the tilings `Π_T(i|k)` built from them.

mod build;
mod canonical;
mod checks;
mod coverage;
mod cutset;
mod export;
mod shape;

pub use build::{tiling_prefix, tiling_prefix_with_cap, tiling_sequence, Tile, Tiling, TilingMeta, TRANSFORM_TOLERANCE};
pub use canonical::{canonical_relation_check, canonical_tiling, exponent_costs};
pub use checks::{
    commensurability, reversibility_witness, rigidity_check, scale_census, shift_equivalence_check, Commensurability, RigidityReport,
    LOG_SCALE_TOLERANCE, MAX_STEP_DENOMINATOR,
};
pub use coverage::{coverage_fraction, overlap_report, patch, OverlapReport, PairClass, TilePair, OVERLAP_BAND, TOUCH_BAND};
pub use cutset::{budget_tolerance, cut_set, cut_set_with_cap, CutSet, DEFAULT_CUT_SET_CAP};
pub use export::{tiling_to_json, write_tiling_csv, write_tiling_json};
pub use shape::{attractor_shape, TileShape};
