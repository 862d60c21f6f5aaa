use num_complex::Complex64;

use qthermo::engine::{
    average_power_fast, average_power_resolvent, power_report, stationary_derivative,
    stationary_derivative_with,
};
use qthermo::gkls::{evolve, stationary_state, uniform_grid, GklsGenerator};
use qthermo::models::chem::oscillator_energy;
use qthermo::models::{
    analytic_amplitude, analytic_energy, birth_death_evolve, build_chem_generator,
    gillespie_ensemble, pv_ansatz_power, pv_grand_canonical, pv_stationary_state,
    BirthDeathState, ChemSpec, LevelBath, LevelsSpec, PvSpec, Transition,
};
use qthermo::opcore::{coherent_state, fock_annihilation, DensityMatrix, Operator};
use qthermo::thermo::ergotropy;
use qthermo::Tolerances;

fn two_bath_qubit(frequency: f64, amplitude: f64) -> LevelsSpec {
    LevelsSpec {
        energies: vec![0.0, 1.0],
        drive: vec![0.0, 1.0],
        baths: vec![
            LevelBath {
                label: "hot".into(),
                beta: 0.2,
                transitions: vec![Transition { lower: 0, upper: 1, rate: 0.6 }],
            },
            LevelBath {
                label: "cold".into(),
                beta: 2.0,
                transitions: vec![Transition { lower: 0, upper: 1, rate: 1.0 }],
            },
        ],
        amplitude,
        frequency,
    }
}

#[test]
fn resolvent_approaches_fast_formula() {
    let tol = Tolerances::default();
    let base = two_bath_qubit(1.0, 0.1).family().unwrap();
    let d = stationary_derivative(&base, 1e-4, &tol).unwrap();
    let fast = average_power_fast(&base, &d).unwrap();
    let mut previous = f64::INFINITY;
    for factor in [10.0, 1e2, 1e3] {
        let fam = base.with_frequency(factor * 1.6).unwrap();
        let slow = average_power_resolvent(&fam, &d).unwrap();
        let rel = ((slow - fast) / fast).abs();
        assert!(rel < previous);
        previous = rel;
    }
    assert!(previous < 0.01);
}

#[test]
fn power_scales_with_amplitude_squared() {
    let tol = Tolerances::default();
    let a = power_report(&two_bath_qubit(0.7, 0.1).family().unwrap(), 1e-4, None, &tol).unwrap();
    let b = power_report(&two_bath_qubit(0.7, 0.2).family().unwrap(), 1e-4, None, &tol).unwrap();
    assert!((b.p_bar_fast / a.p_bar_fast - 4.0).abs() < 1e-10);
    assert!((b.p_bar_resolvent / a.p_bar_resolvent - 4.0).abs() < 1e-10);
    assert!(a.identity_residual < 1e-6);
}

#[test]
fn derivative_error_is_second_order() {
    let tol = Tolerances::default();
    let spec = LevelsSpec {
        baths: vec![two_bath_qubit(1.0, 0.1).baths[1].clone()],
        ..two_bath_qubit(1.0, 0.1)
    };
    let fam = spec.family().unwrap();
    let beta = 2.0;
    let rho = DensityMatrix::gibbs(fam.h0(), beta).unwrap();
    let mean = rho.expectation(fam.drive()).re;
    let id = Operator::identity(2).unwrap();
    let exact = (&(fam.drive() - &(&id * mean)) * rho.op()) * (-beta);
    let err = |delta: f64| {
        let d = stationary_derivative(&fam, delta, &tol).unwrap();
        (&d.derivative - &exact).norm()
    };
    let ratio = err(0.01) / err(0.005);
    assert!((ratio - 4.0).abs() < 0.2, "{ratio}");
}

#[test]
fn pv_single_temperature_is_grand_canonical() {
    let tol = Tolerances::default();
    let mut spec = PvSpec::degenerate(1, 1, 1.0);
    spec.conduction_energies = vec![0.6];
    spec.valence_energies = vec![-0.4];
    spec.beta_photon = spec.beta;
    let rho = pv_stationary_state(&spec, 0.0, &tol).unwrap();
    let gc = pv_grand_canonical(&spec, 0.0).unwrap();
    assert!(rho.trace_distance(&gc).unwrap() < 1e-9);
    let fam = spec.family().unwrap();
    let solver = |gen: &GklsGenerator, xi: f64| {
        qthermo::gkls::stationary_state_in_sectors(gen, &pv_grand_canonical(&spec, xi)?, &tol)
    };
    let d = stationary_derivative_with(&fam, 1e-4, &solver).unwrap();
    assert!(average_power_fast(&fam, &d).unwrap() <= 1e-12);
}

#[test]
fn pv_ansatz_matches_fast_intraband_limit() {
    let tol = Tolerances::default();
    let mut spec = PvSpec::degenerate(2, 1, 1.0);
    spec.conduction_energies = vec![0.5, 0.7];
    spec.intra_conduction = vec![vec![0.0, 10.0], vec![10.0, 0.0]];
    spec.inter = vec![vec![0.01], vec![0.01]];
    spec.beta_photon = spec.beta;
    let rho = pv_stationary_state(&spec, 0.0, &tol).unwrap();
    let gc = pv_grand_canonical(&spec, 0.0).unwrap();
    assert!(rho.trace_distance(&gc).unwrap() < 1e-3);
}

#[test]
fn pv_ansatz_power_vanishes_at_equal_temperatures() {
    let mut spec = PvSpec::degenerate(1, 1, 1.0);
    spec.beta_photon = spec.beta;
    for v in [0.0, 0.3, 0.6] {
        let p = pv_ansatz_power(&spec, v).unwrap();
        assert!(p <= 1e-12, "{p}");
    }
}

#[test]
fn dephasing_keeps_energy_and_gibbs_stays_diagonal() {
    let tol = Tolerances::default();
    let mut spec = ChemSpec::new(1.0, 0.0, 0.0);
    spec.decoherence = 0.5;
    spec.dim = 20;
    let gen = build_chem_generator(&spec).unwrap();
    let rho0 = coherent_state(20, Complex64::new(1.0, 0.5)).unwrap();
    let traj = evolve(&gen, &rho0, &uniform_grid(2.0, 8), &tol).unwrap();
    let e0 = oscillator_energy(&spec, &rho0).unwrap();
    for rho in traj.states() {
        assert!((oscillator_energy(&spec, rho).unwrap() - e0).abs() < 1e-10);
    }

    let mut spec = ChemSpec::new(1.0, 0.2, 0.6);
    spec.dim = 40;
    spec.decoherence = 0.1;
    let gen = build_chem_generator(&spec).unwrap();
    let gibbs = DensityMatrix::gibbs(gen.hamiltonian(), 0.8).unwrap();
    let traj = evolve(&gen, &gibbs, &uniform_grid(3.0, 6), &tol).unwrap();
    for rho in traj.states() {
        let mut off = rho.matrix().clone();
        off.fill_diagonal(Complex64::new(0.0, 0.0));
        assert!(off.norm() < 1e-12);
    }
}

#[test]
fn oscillator_matches_growth_laws() {
    let tol = Tolerances::default();
    let spec = ChemSpec::new(1.0, 0.3, 0.1);
    let gen = build_chem_generator(&spec).unwrap();
    let alpha0 = Complex64::new(2.0, 0.0);
    let rho0 = coherent_state(spec.dim, alpha0).unwrap();
    let e0 = oscillator_energy(&spec, &rho0).unwrap();
    let a = fock_annihilation(spec.dim).unwrap();
    let times = uniform_grid(1.0, 4);
    let traj = evolve(&gen, &rho0, &times, &tol).unwrap();
    for (t, rho) in times.iter().zip(traj.states()) {
        let e = oscillator_energy(&spec, rho).unwrap();
        assert!((e - analytic_energy(&spec, e0, *t)).abs() < 1e-6 * (1.0 + e));
        let amp = rho.expectation(&a);
        assert!((amp - analytic_amplitude(&spec, alpha0, *t)).norm() < 1e-6);
    }
}

#[test]
fn dephasing_amplitude_factor() {
    let tol = Tolerances::default();
    let mut spec = ChemSpec::new(1.0, 0.3, 0.1);
    spec.decoherence = 1.0;
    let gen = build_chem_generator(&spec).unwrap();
    let alpha0 = Complex64::new(1.5, 0.0);
    let rho0 = coherent_state(spec.dim, alpha0).unwrap();
    let a = fock_annihilation(spec.dim).unwrap();
    let times = uniform_grid(2.0, 4);
    let traj = evolve(&gen, &rho0, &times, &tol).unwrap();
    let mut previous = f64::INFINITY;
    for (t, rho) in times.iter().zip(traj.states()) {
        let amp = rho.expectation(&a);
        assert!((amp - analytic_amplitude(&spec, alpha0, *t)).norm() < 1e-8);
        assert!(amp.norm() < previous);
        previous = amp.norm();
    }
}

#[test]
fn coherent_ergotropy_tracks_amplitude() {
    let tol = Tolerances::default();
    let spec = ChemSpec::new(1.0, 0.2, 0.1);
    let gen = build_chem_generator(&spec).unwrap();
    let alpha0 = Complex64::new(1.0, 1.0);
    let rho0 = coherent_state(spec.dim, alpha0).unwrap();
    let h = gen.hamiltonian().clone();
    assert!((ergotropy(&rho0, &h).unwrap() - 2.0).abs() < 1e-6);
    // Gain and loss keep the state a displaced thermal state, whose
    // ergotropy is the coherent part alone.
    let times = uniform_grid(2.0, 4);
    let traj = evolve(&gen, &rho0, &times, &tol).unwrap();
    for (t, rho) in times.iter().zip(traj.states()) {
        let coherent = analytic_amplitude(&spec, alpha0, *t).norm_sqr();
        assert!((ergotropy(rho, &h).unwrap() - coherent).abs() < 1e-4);
    }
}

#[test]
fn quantum_populations_follow_birth_death() {
    let tol = Tolerances::default();
    for gamma in [0.0, 0.1, 1.0] {
        let mut spec = ChemSpec::new(1.0, 0.2, 0.5);
        spec.decoherence = gamma;
        spec.dim = 40;
        let gen = build_chem_generator(&spec).unwrap();
        let rho0 = coherent_state(spec.dim, Complex64::new(1.2, 0.3)).unwrap();
        let times = uniform_grid(2.0, 5);
        let traj = evolve(&gen, &rho0, &times, &tol).unwrap();
        let p0 = BirthDeathState::new(rho0.populations(), 0.0).unwrap();
        let classical = birth_death_evolve(&p0, 0.2, 0.5, &times).unwrap();
        for (rho, s) in traj.states().iter().zip(&classical) {
            for (q, c) in rho.populations().iter().zip(&s.probs) {
                assert!((q - c).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn gillespie_mean_matches_ode() {
    let times = uniform_grid(2.0, 4);
    let stats = gillespie_ensemble(3, 0.3, 0.6, &times, 10_000, 21).unwrap();
    let p0 = BirthDeathState::point(80, 3, 0.0).unwrap();
    let ode = birth_death_evolve(&p0, 0.3, 0.6, &times).unwrap();
    for (k, s) in ode.iter().enumerate() {
        let err = (stats.mean[k] - s.mean()).abs();
        assert!(err <= 3.0 * stats.stderr[k].max(1e-12), "t = {}: {err}", s.t);
    }
}

#[test]
fn thermal_oscillator_stationary_state() {
    let mut spec = ChemSpec::new(1.0, 0.25, 1.0);
    spec.dim = 40;
    let gen = build_chem_generator(&spec).unwrap();
    let rho = stationary_state(&gen, &Tolerances::default()).unwrap();
    let expected = DensityMatrix::gibbs(gen.hamiltonian(), 4f64.ln()).unwrap();
    assert!(rho.trace_distance(&expected).unwrap() < 1e-9);
}
