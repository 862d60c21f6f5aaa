//! GKLS generators in both pictures, stationary states, time evolution and
//! detailed-balance diagnostics.

mod balance;
mod family;
mod generator;
mod propagate;
mod stationary;

pub use balance::{detailed_balance_report, weighted_inner_product, BalanceReport, MIN_WEIGHT_EIGENVALUE};
pub use family::{DissipatorMap, GeneratorFamily};
pub use generator::{eigenoperator_residual, thermal_pair, GklsGenerator, LindbladTerm};
pub use propagate::{
    evolve, evolve_banded, evolve_banded_with, evolve_driven, quasi_static_step_limit,
    uniform_grid, validate_grid, BandedOptions, Trajectory,
};
pub use stationary::{
    stationarity_residual, stationary_from_super, stationary_state, stationary_state_in_sectors,
};
