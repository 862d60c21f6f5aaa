use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qthermo::engine::{
    average_power_fast, average_power_resolvent, equilibrium_power_bound, stationary_derivative,
};
use qthermo::gkls::{detailed_balance_report, evolve, stationary_state, uniform_grid};
use qthermo::models::{birth_death_evolve, BirthDeathState, LevelsSpec};
use qthermo::opcore::{DensityMatrix, Operator, C64};
use qthermo::thermo::{
    entropy_production, ergotropy, internal_energy, passive_state, relative_entropy,
    von_neumann_entropy,
};
use qthermo::Tolerances;

fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> DensityMatrix {
    let a = nalgebra::DMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let full_rank = &a * a.adjoint() + nalgebra::DMatrix::identity(dim, dim) * C64::new(0.05, 0.0);
    DensityMatrix::from_unnormalized(full_rank, &Tolerances::default()).unwrap()
}

fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> Operator {
    let a = nalgebra::DMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    Operator::new((&a + a.adjoint()) * C64::new(0.5, 0.0)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generator_preserves_trace_and_pairs_with_dual(seed in any::<u64>(), dim in 2usize..6, baths in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gen = LevelsSpec::random(&mut rng, dim, baths).unwrap().generator().unwrap();
        let rho = random_state(&mut rng, dim);
        let x = random_hermitian(&mut rng, dim);
        let flow = gen.apply(rho.op()).unwrap();
        prop_assert!(flow.trace().norm() < 1e-12);
        let id = Operator::identity(dim).unwrap();
        prop_assert!(gen.apply_heisenberg(&id).unwrap().max_abs() < 1e-12);
        let lhs = flow.adjoint().trace_product(&x);
        let rhs = rho.op().adjoint().trace_product(&gen.apply_heisenberg(&x).unwrap());
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn spohn_and_monotone_relative_entropy(seed in any::<u64>(), dim in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gen = LevelsSpec::random(&mut rng, dim, 2).unwrap().generator().unwrap();
        let tol = Tolerances::default();
        let rho_bar = stationary_state(&gen, &tol).unwrap();
        let rho0 = random_state(&mut rng, dim);
        let times = uniform_grid(3.0, 10);
        let traj = evolve(&gen, &rho0, &times, &tol).unwrap();
        let mut previous = f64::INFINITY;
        for rho in traj.states() {
            prop_assert!(entropy_production(&gen, rho, &rho_bar, &tol).unwrap() >= -1e-10);
            let d = relative_entropy(rho, &rho_bar, &tol).unwrap();
            prop_assert!(d <= previous + 1e-9);
            previous = d;
        }
    }

    #[test]
    fn ergotropy_bounds_and_passivity(seed in any::<u64>(), dim in 2usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_state(&mut rng, dim);
        let h = random_hermitian(&mut rng, dim);
        let w = ergotropy(&rho, &h).unwrap();
        prop_assert!(w >= 0.0);
        let p = passive_state(&rho, &h).unwrap();
        prop_assert!(ergotropy(&p, &h).unwrap() < 1e-10);
        let pp = passive_state(&p, &h).unwrap();
        prop_assert!((pp.op() - p.op()).max_abs() < 1e-10);
        prop_assert!((von_neumann_entropy(&p) - von_neumann_entropy(&rho)).abs() < 1e-10);
        let gap = internal_energy(&rho, &h).unwrap() - internal_energy(&p, &h).unwrap();
        prop_assert!((gap - w).abs() < 1e-10);
    }

    #[test]
    fn single_bath_engine_does_no_work(seed in any::<u64>(), dim in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut spec = LevelsSpec::random(&mut rng, dim, 1).unwrap();
        spec.frequency = rng.gen_range(0.2..5.0);
        let family = spec.family().unwrap();
        let tol = Tolerances::default();
        let d = stationary_derivative(&family, 1e-4, &tol).unwrap();
        prop_assert!(average_power_fast(&family, &d).unwrap() <= 1e-12);
        prop_assert!(average_power_resolvent(&family, &d).unwrap() <= 1e-12);
        let beta = spec.baths[0].beta;
        let gen = spec.generator().unwrap();
        let m = family.drive();
        let bound = equilibrium_power_bound(&gen, m, beta, spec.amplitude, &tol).unwrap();
        let shifted = m + &(Operator::identity(dim).unwrap() * 0.7);
        let moved = equilibrium_power_bound(&gen, &shifted, beta, spec.amplitude, &tol).unwrap();
        prop_assert!((bound - moved).abs() < 1e-12);
        let fast = average_power_fast(&family, &d).unwrap();
        prop_assert!((fast - bound).abs() < 1e-8 * (1.0 + bound.abs()), "{fast} vs {bound}");
    }

    #[test]
    fn detailed_balance_spectrum_is_real(seed in any::<u64>(), dim in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = LevelsSpec::random(&mut rng, dim, 1).unwrap();
        let gen = spec.generator().unwrap();
        let tol = Tolerances::default();
        let gibbs = DensityMatrix::gibbs(gen.hamiltonian(), spec.baths[0].beta).unwrap();
        let report = detailed_balance_report(&gen, &gibbs, 1e-10, &tol).unwrap();
        prop_assert!(report.passed);
        // Level models have real jump operators, so the dissipator is real.
        let dissipator = gen.heisenberg_dissipator_super().to_dense().unwrap();
        prop_assert!(dissipator.iter().all(|z| z.im == 0.0));
        let real = dissipator.map(|z| z.re);
        for z in real.complex_eigenvalues().iter() {
            prop_assert!(z.im.abs() < 1e-8 && z.re < 1e-10);
        }
    }

    #[test]
    fn birth_death_conserves_probability(up in 0.0f64..0.5, down in 0.5f64..2.0, n0 in 0usize..5) {
        let p0 = BirthDeathState::point(60, n0, 0.0).unwrap();
        let out = birth_death_evolve(&p0, up, down, &uniform_grid(2.0, 8)).unwrap();
        for s in out {
            prop_assert!((s.probs.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            prop_assert!(s.probs.iter().all(|&p| p >= -1e-12));
        }
    }
}
