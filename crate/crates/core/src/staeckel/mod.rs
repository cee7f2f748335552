//! Stäckel matrices and the classical integrable system they define.

mod checks;
mod hamiltonian;
mod matrix;

pub use checks::{
    check_benenti, check_identity_eq6, check_involution, check_involution_of,
    check_involution_with_potentials, cofactor_pair_quotient, eq6_expression, Tolerances,
};
pub use hamiltonian::{
    check_axis_functions, hamiltonians, poisson_bracket, potentials, Hamiltonian, MomentumIndex,
    PhasePoly,
};
pub use matrix::{Adjugate, StaeckelMatrix, DEFAULT_DET_EPS, MAX_DIM};
