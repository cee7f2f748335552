//! Stäckel integrable systems, their quantization and separation of variables.
//!
//! Starting from a Stäckel matrix `S` (row `i` depends on `x_i` only) the crate
//! builds
//!
//! * the quadratic Hamiltonians `H_α` defined by `S·H = (p_1², …, p_n²)`,
//! * potentials `U_α` defined by `S·U = (V_1(x_1), …, V_n(x_n))`,
//! * the operators `Ĥ_α = Σ_i (Δ_αi/φ) ∂_i²` with `φ = det S`, and `Ȟ_α = Ĥ_α + U_α`,
//! * product eigenfunctions `Ψ = Π ψ_α(x_α)` from the separated ODEs,
//!
//! and checks, numerically, that the Hamiltonians Poisson-commute, that the
//! operators commute and are symmetric for the weight `φ`, and that `Ψ`
//! solves the joint eigenvalue problem.
//!
//! Symbolic identities are decided by evaluation at random points rather than
//! by algebraic normalization; see [`sampling`].

pub mod error;
pub mod expr;
pub mod gallery;
pub mod operators;
pub mod report;
pub mod sampling;
pub mod separation;
pub mod staeckel;

pub use error::{Error, EvalError, Result};
pub use expr::{parse_expr, Expr, Func, Node, Parser, Tape};
pub use gallery::GalleryCase;
pub use operators::DiffOp;
pub use report::{Report, Status};
pub use sampling::{is_zero_sampled, Domain, ZeroTest};
pub use staeckel::{Hamiltonian, PhasePoly, StaeckelMatrix};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/expressions.md")]
    mod expressions {}
    #[doc = include_str!("../../../book/src/staeckel-systems.md")]
    mod staeckel_systems {}
    #[doc = include_str!("../../../book/src/quantization.md")]
    mod quantization {}
    #[doc = include_str!("../../../book/src/potentials.md")]
    mod potentials {}
    #[doc = include_str!("../../../book/src/separation.md")]
    mod separation {}
    #[doc = include_str!("../../../book/src/gallery.md")]
    mod gallery {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
