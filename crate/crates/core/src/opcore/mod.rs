//! Operator algebra: dense operators, density matrices, ladder operators and
//! superoperators on column-stacked operators.

mod density;
mod fock;
mod operator;
mod superop;

pub use density::DensityMatrix;
pub(crate) use density::{check_state, check_trace_and_hermiticity, restricted_trace};
pub use fock::{
    coherent_state, fermion_modes, fock_annihilation, mode_occupations, number_operator,
    MAX_FERMION_MODES,
};
pub use operator::{Operator, C64};
pub(crate) use operator::ZERO;
pub use superop::{SandwichSum, SuperOperator, MAX_DENSE_DIM};
