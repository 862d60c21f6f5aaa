//! Model builders: multi-level thermal models, the photovoltaic cell, the
//! chemically pumped oscillator and its classical birth-death limit.

pub mod birth_death;
pub mod chem;
pub mod gillespie;
pub mod levels;
pub mod pv;

pub use birth_death::{birth_death_evolve, BirthDeathState};
pub use chem::{
    analytic_amplitude, analytic_energy, build_chem_generator, storage_efficiency, ChemSpec,
    Chemistry,
};
pub use gillespie::{gillespie_ensemble, EnsembleStats};
pub use levels::{LevelBath, LevelsSpec, Transition};
pub use pv::{
    effective_inverse_temperature, open_circuit_voltage, pv_analytic_power, pv_ansatz_power,
    pv_grand_canonical, pv_stationary_state, PvSpec,
};
