//! Raster estimates of the central open set `{x : d(x,A) < d(x,H)}`, its
//! boundary, and feasibility evidence.

mod boundary;
mod estimate;
mod feasibility;
mod stencil;

pub use boundary::{contour, extract_boundary, touching_circles, BoundaryCurve, TouchingCircle};
pub use estimate::{default_window, estimate_central_set, CentralSetEstimate, CentralSetParams, MARGIN_EPSILON, NEAR_EMPTY_FRACTION};
pub use feasibility::{feasibility_check, FeasibilityReport, PairOverlap, BOUNDARY_BAND};
pub use stencil::{tile_shape_from_mask, Stencil};

pub(crate) use feasibility::mask_distances;
