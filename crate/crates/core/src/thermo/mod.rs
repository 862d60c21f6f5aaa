//! Thermodynamic functionals: energy, power, heat currents, entropies,
//! entropy production, law residuals and ergotropy.

mod entropy;
mod ergotropy;
mod functionals;
mod laws;

pub use entropy::{entropy_production, relative_entropy, von_neumann_entropy, SPOHN_SLACK};
pub use ergotropy::{ergotropy, passive_state};
pub use functionals::{
    heat_currents, instantaneous_power, internal_energy, validate_assignment, BathAssignment,
    HeatCurrents,
};
pub use laws::{law_residuals, ThermoSample};
