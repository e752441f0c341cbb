//! Linear algebra and coding theory over GF(2).
//!
//! Positions are 0-based everywhere, including serialized artifacts.

mod bitvec;
mod code;
mod entropy;
mod matrix;
mod positions;

pub use bitvec::{hamming_distance_on, index_dot, BitVec};
pub use code::{min_distance_of_rows, LinearCodeSpec, MIN_DISTANCE_ROW_CAP};
pub use entropy::{binary_entropy, binary_entropy_inverse};
pub use matrix::{span_elements, AffineSolution, BitMatrix, Echelon};
pub use positions::PositionSet;
