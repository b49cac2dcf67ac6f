//! Sparse direct linear solves and Newton's method.

mod newton;
mod sparse;

pub use newton::{l1, newton_step_solve, NewtonConfig, NewtonStats};
pub use sparse::{linear_solve, CscMatrix, LinearSolver, TripletMatrix};
