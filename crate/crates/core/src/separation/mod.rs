//! Multiplicative separation: the separated ODEs, their numerical solution,
//! the product `Ψ = Π ψ_α(x_α)` and a check that `Ψ` is a joint eigenfunction.

mod ode;
mod product;
mod verify;

pub use ode::{separated_rhs, solve_separated_ode, AxisSolution, EnergyVector, MIN_STEPS};
pub use product::{assemble_product, ProductEigenfunction};
pub use verify::{
    separate, verify_eigen, verify_eigen_with, EigenOptions, SeparatedSolution, MAX_TUPLES,
};
