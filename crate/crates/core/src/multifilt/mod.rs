//! Multifiltered vector spaces, their splittings and filtered maps.

mod filtration;
mod map;
mod space;

pub use filtration::Filtration;
pub use map::FilteredMap;
pub use space::{GradedPiece, MultiFilteredSpace, Splitting};
