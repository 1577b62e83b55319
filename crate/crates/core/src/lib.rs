//! Finite W-superalgebras of type A from pyramids: generators, relations and
//! the checks that tie them together.

pub mod algebra;
pub mod dump;
pub mod exec;
pub mod invariants;
pub mod linalg;
pub mod pyramid;
pub mod rational;
pub mod verify;

pub use algebra::{SuperAlgebra, SuperElement, TensorAlgebra, TensorElement};
pub use pyramid::{CompositionShape, Pyramid, ShiftMatrix, ZeroOneSequence};
pub use rational::Rational;
