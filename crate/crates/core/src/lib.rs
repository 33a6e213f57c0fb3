//! Self-similar tilings from iterated function systems.
pub mod attractor;
pub mod centralset;
pub mod error;
pub mod geometry;
pub mod neighbors;
pub mod render;
pub mod specfile;
pub mod tiling;

pub use error::{Error, Result};
pub use geometry::{Address, CostFunction, IfsSpec, Similitude, Word};
pub use specfile::{SpecFile, TileSpec};
pub use tiling::{TileShape, Tiling};
