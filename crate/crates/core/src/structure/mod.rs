//! Height reduction of the component tree, the value sets `Q_c`, `Y_c`, `Y`,
//! and the adaptive rounding kernel.

mod height;
mod rounding;
mod values;

pub use height::{height_reduce, height_reduce_with, map_back, ReducedTree, StructureError};
pub use rounding::{adaptive_round, Rounded};
pub use values::{build_value_sets, subset_sums, Part, ValueSets, DEFAULT_Y_CAP};
