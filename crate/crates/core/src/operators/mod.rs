//! Differential operators: quantization of the Stäckel Hamiltonians, potential
//! extension, commutators and symmetry checks.

mod checks;
mod diffop;
mod quadrature;
mod quantize;
pub mod testfns;

pub use checks::{
    check_commutation, check_self_adjoint, symmetry_defect, QuadratureSpec, MAX_QUADRATURE_DIM,
};
pub use diffop::{DiffOp, MultiIndex, MAX_ORDER};
pub use quadrature::{gauss_legendre, pairwise_sum};
pub use quantize::{
    add_potential, check_divergence_form, check_potential_grouping, divergence_form_apply,
    grouped_potential_apply, quantize, quantize_hamiltonian, quantize_with_potentials,
};
