//! Combinatorics and numerics for limbs of the cubic lemon family
//! `P_a(z) = z^3 + 3 a z^2`.

pub mod angle;
pub mod cubic;
pub mod error;
pub mod lamination;
pub mod lemon;
pub mod perm;
pub mod render;
pub mod renorm;
pub mod simulating;
pub mod verify;

pub use angle::{Angle, Orbit};
pub use error::{Error, Result};
