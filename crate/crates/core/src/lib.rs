//! Julia sets of finitely generated polynomial semigroups with bounded
//! postcritical set, computed on pixel rasters.

pub mod constructions;
pub mod distance;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod poly;
pub mod semigroup;
pub mod topology;
pub mod verify;

pub use error::{Error, Result};
pub use grid::{GridSpec, RasterSet};
pub use poly::Polynomial;
pub use semigroup::{Generator, GeneratorSet, Word};
