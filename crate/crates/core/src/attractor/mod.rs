//! Attractor approximation: chaos-game clouds, raster masks, distance
//! fields and the similarity dimension.

mod chaos;
mod distance;
mod hull;
mod mask;
mod moran;
mod raster;

pub use chaos::{chaos_game, PointCloud, Provenance, DEFAULT_BURN_IN, DEFAULT_POINTS};
pub use distance::{distance_field, distance_field_from_tree, nearest_distances, KdTree};
pub use hull::{attractor_hull, convex_hull, invariant_radius, Hull};
pub use mask::{attractor_mask, polygon_distance};
pub use moran::moran_dimension;
pub use raster::{euclidean_distance_transform, RasterField, RasterHeader, Window};
