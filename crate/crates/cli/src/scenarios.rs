//! Scenario runners. Each returns its tables and a few scalar extras for
//! the manifest; nothing here touches the filesystem.

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use qthermo::engine::{default_delta, power_report};
use qthermo::gkls::{
    evolve, evolve_banded_with, evolve_driven, uniform_grid, BandedOptions, GklsGenerator,
};
use qthermo::models::birth_death::TOP_LEVEL_GUARD;
use qthermo::models::chem::oscillator_energy;
use qthermo::models::{
    analytic_amplitude, analytic_energy, birth_death_evolve, build_chem_generator,
    gillespie_ensemble, open_circuit_voltage, pv_analytic_power, pv_ansatz_power, BirthDeathState,
};
use qthermo::opcore::{coherent_state, fock_annihilation, DensityMatrix, Operator, MAX_DENSE_DIM};
use qthermo::thermo::{ergotropy, law_residuals};
use qthermo::Tolerances;

use crate::config::{
    ChemEngineConfig, EnginePowerConfig, EvolveConfig, PvSweepConfig, ReplicatorConfig, Scenario,
    ScenarioConfig,
};
use crate::error::CliError;
use crate::output::Table;

pub struct ScenarioOutput {
    pub tables: Vec<(String, Table)>,
    pub extras: Map<String, Value>,
}

fn invalid(section: &str, err: qthermo::Error) -> CliError {
    CliError::Config(format!("{section}: {err}"))
}

fn check_grid(section: &str, t_max: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(CliError::Config(format!("{section}.t_max: must be positive, got {t_max}")));
    }
    if steps == 0 {
        return Err(CliError::Config(format!("{section}.steps: must be positive")));
    }
    Ok(uniform_grid(t_max, steps))
}

pub fn run(config: &ScenarioConfig) -> Result<ScenarioOutput, CliError> {
    let tol = &config.tolerances;
    let missing = || CliError::Config(format!("{}: missing section", config.scenario.section()));
    match config.scenario {
        Scenario::Evolve => run_evolve(config.evolve.as_ref().ok_or_else(missing)?, tol),
        Scenario::PvSweep => run_pv_sweep(config.pv_sweep.as_ref().ok_or_else(missing)?),
        Scenario::ChemEngine => run_chem(config.chem_engine.as_ref().ok_or_else(missing)?, tol),
        Scenario::Replicator => {
            run_replicator(config.replicator.as_ref().ok_or_else(missing)?, config.seed)
        }
        Scenario::EnginePower => {
            run_engine_power(config.engine_power.as_ref().ok_or_else(missing)?, tol)
        }
    }
}

fn run_evolve(cfg: &EvolveConfig, tol: &Tolerances) -> Result<ScenarioOutput, CliError> {
    const S: &str = "evolve";
    let numerical = |source| CliError::Numerical { scenario: S, source };
    cfg.model.validate().map_err(|e| invalid("evolve.model", e))?;
    let times = check_grid(S, cfg.t_max, cfg.steps)?;
    let rho0 = match &cfg.initial_populations {
        Some(p) => DensityMatrix::diagonal(p).map_err(|e| invalid("evolve.initial_populations", e))?,
        None => DensityMatrix::maximally_mixed(cfg.model.dim()).map_err(numerical)?,
    };
    if rho0.dim() != cfg.model.dim() {
        return Err(CliError::Config(format!(
            "evolve.initial_populations: expected {} entries, got {}",
            cfg.model.dim(),
            rho0.dim()
        )));
    }
    let family = cfg.model.family().map_err(numerical)?;
    let baths = cfg.model.bath_assignments().map_err(numerical)?;
    let traj = evolve_driven(&family, &rho0, &times, tol).map_err(numerical)?;
    let samples = law_residuals(&traj, &family, &baths, tol).map_err(numerical)?;

    let mut header = vec!["t".to_string(), "U".into(), "P".into()];
    header.extend(baths.iter().map(|b| format!("J_{}", b.label)));
    header.extend(["S", "sigma", "first_law_residual", "second_law_residual"].map(String::from));
    let mut table = Table::new(header);
    let mut worst_first: f64 = 0.0;
    let mut worst_second = f64::INFINITY;
    for s in &samples {
        let mut row = vec![s.t, s.energy, s.power];
        row.extend(&s.heat_currents);
        row.extend([s.entropy, s.entropy_production, s.first_law_residual, s.second_law_residual]);
        table.push(row);
        worst_first = worst_first.max(s.first_law_residual.abs());
        worst_second = worst_second.min(s.second_law_residual);
    }
    let mut extras = Map::new();
    extras.insert("max_abs_first_law_residual".into(), json!(worst_first));
    extras.insert("min_second_law_residual".into(), json!(worst_second));
    Ok(ScenarioOutput {
        tables: vec![("thermo_trace.csv".into(), table)],
        extras,
    })
}

fn run_pv_sweep(cfg: &PvSweepConfig) -> Result<ScenarioOutput, CliError> {
    const S: &str = "pv-sweep";
    cfg.cell.validate().map_err(|e| invalid("pv_sweep.cell", e))?;
    let v_oc = open_circuit_voltage(&cfg.cell);
    let v_max = match cfg.v_max {
        Some(v) => v,
        None if v_oc > 0.0 => 1.2 * v_oc,
        None => {
            return Err(CliError::Config(format!(
                "pv_sweep.v_max: required when the open-circuit voltage ({v_oc}) is not positive"
            )))
        }
    };
    if cfg.points < 2 || !(v_max > cfg.v_min) {
        return Err(CliError::Config(
            "pv_sweep: need at least 2 points and v_max > v_min".into(),
        ));
    }
    let mut table = Table::new(["V", "p_analytic", "p_numeric"]);
    let step = (v_max - cfg.v_min) / (cfg.points - 1) as f64;
    for k in 0..cfg.points {
        let v = cfg.v_min + step * k as f64;
        let numeric = pv_ansatz_power(&cfg.cell, v)
            .map_err(|source| CliError::Numerical { scenario: S, source })?;
        table.push(vec![v, pv_analytic_power(&cfg.cell, v), numeric]);
    }
    let mut extras = Map::new();
    extras.insert("v_oc".into(), json!(v_oc));
    extras.insert("band_gap".into(), json!(cfg.cell.band_gap()));
    Ok(ScenarioOutput {
        tables: vec![("pv_curve.csv".into(), table)],
        extras,
    })
}

/// States of the oscillator on `times`, handed to `observe` until it
/// returns `false`. Small truncations use dense block exponentials, larger
/// ones the banded propagator.
fn propagate_oscillator(
    gen: &GklsGenerator,
    rho0: &DensityMatrix,
    times: &[f64],
    tol: &Tolerances,
    mut observe: impl FnMut(usize, f64, &DensityMatrix) -> qthermo::Result<bool>,
) -> qthermo::Result<()> {
    if gen.dim() <= MAX_DENSE_DIM {
        let traj = evolve(gen, rho0, times, tol)?;
        for (k, (t, rho)) in times.iter().zip(traj.states()).enumerate() {
            if !observe(k, *t, rho)? {
                break;
            }
        }
        Ok(())
    } else {
        let opts = BandedOptions {
            check_positivity: false,
            ..BandedOptions::default()
        };
        evolve_banded_with(gen, rho0, times, &opts, tol, observe)
    }
}

fn run_chem(cfg: &ChemEngineConfig, tol: &Tolerances) -> Result<ScenarioOutput, CliError> {
    const S: &str = "chem-engine";
    let numerical = |source| CliError::Numerical { scenario: S, source };
    let spec = &cfg.oscillator;
    spec.validate().map_err(|e| invalid("chem_engine.oscillator", e))?;
    let times = check_grid("chem_engine", cfg.t_max, cfg.steps)?;
    let alpha0 = Complex64::new(cfg.alpha0[0], cfg.alpha0[1]);
    let gen = build_chem_generator(spec).map_err(numerical)?;
    let rho0 = coherent_state(spec.dim, alpha0).map_err(numerical)?;
    let a = fock_annihilation(spec.dim).map_err(numerical)?;
    let h: Operator = gen.hamiltonian().clone();
    let e0 = oscillator_energy(spec, &rho0).map_err(numerical)?;

    let mut table = Table::new([
        "t",
        "E_numeric",
        "E_analytic",
        "abs_alpha_numeric",
        "abs_alpha_analytic",
        "ergotropy",
        "eta",
    ]);
    let mut valid_until = None;
    propagate_oscillator(&gen, &rho0, &times, tol, |_, t, rho| {
        let top = rho.matrix()[(spec.dim - 1, spec.dim - 1)].re;
        if top > TOP_LEVEL_GUARD {
            return Ok(false);
        }
        valid_until = Some(t);
        let energy = oscillator_energy(spec, rho)?;
        let work = ergotropy(rho, &h)?;
        let eta = if energy > 0.0 { work / energy } else { 0.0 };
        table.push(vec![
            t,
            energy,
            analytic_energy(spec, e0, t),
            rho.expectation(&a).norm(),
            analytic_amplitude(spec, alpha0, t).norm(),
            work,
            eta,
        ]);
        Ok(true)
    })
    .map_err(numerical)?;
    let mut extras = Map::new();
    extras.insert("initial_energy".into(), json!(e0));
    extras.insert("truncation_valid_until".into(), json!(valid_until));
    Ok(ScenarioOutput {
        tables: vec![("chem_trace.csv".into(), table)],
        extras,
    })
}

fn run_replicator(cfg: &ReplicatorConfig, seed: u64) -> Result<ScenarioOutput, CliError> {
    const S: &str = "replicator";
    let numerical = |source| CliError::Numerical { scenario: S, source };
    let times = check_grid(S, cfg.t_max, cfg.steps)?;
    if cfg.trajectories == 0 {
        return Err(CliError::Config("replicator.trajectories: must be positive".into()));
    }
    let p0 = BirthDeathState::point(cfg.levels, cfg.n0 as usize, 0.0)
        .map_err(|e| invalid("replicator.levels", e))?;
    let ode = birth_death_evolve(&p0, cfg.gamma_up, cfg.gamma_down, &times).map_err(numerical)?;
    let mc = gillespie_ensemble(cfg.n0, cfg.gamma_up, cfg.gamma_down, &times, cfg.trajectories, seed)
        .map_err(numerical)?;
    let mut table = Table::new([
        "t",
        "mean_ode",
        "var_ode",
        "mean_mc",
        "stderr_mc",
        "extinction_fraction",
    ]);
    for (k, s) in ode.iter().enumerate() {
        table.push(vec![
            s.t,
            s.mean(),
            s.variance(),
            mc.mean[k],
            mc.stderr[k],
            mc.extinction_fraction[k],
        ]);
    }
    let mut extras = Map::new();
    extras.insert("trajectories".into(), json!(cfg.trajectories));
    Ok(ScenarioOutput {
        tables: vec![("repl_stats.csv".into(), table)],
        extras,
    })
}

fn run_engine_power(cfg: &EnginePowerConfig, tol: &Tolerances) -> Result<ScenarioOutput, CliError> {
    const S: &str = "engine-power";
    let numerical = |source| CliError::Numerical { scenario: S, source };
    cfg.model.validate().map_err(|e| invalid("engine_power.model", e))?;
    let family = cfg.model.family().map_err(numerical)?;
    let delta = cfg.delta.unwrap_or_else(|| default_delta(&family));
    let single_bath = match cfg.model.baths.as_slice() {
        [only] => Some(only.beta),
        _ => None,
    };
    let report = power_report(&family, delta, single_bath, tol).map_err(numerical)?;
    let mut table = Table::new(["p_bar_resolvent", "p_bar_fast", "identity_residual"]);
    table.push(vec![report.p_bar_resolvent, report.p_bar_fast, report.identity_residual]);
    let mut extras = Map::new();
    extras.insert("delta".into(), json!(delta));
    extras.insert("single_bath".into(), json!(report.single_bath));
    Ok(ScenarioOutput {
        tables: vec![("power_report.csv".into(), table)],
        extras,
    })
}
