use gatearray::design::{g_first_relaxation, g_second_relaxation, lemma_hypothesis_holds, linear_independence_check, overlap_bound_g, relaxation_ratio};
use gatearray::linalg::{eigh, exp_i_hermitian};
use gatearray::operator::{is_unitary, partial_trace, tensor, trace_distance, unitarity_residual, Keep};
use gatearray::probabilistic::{run_conditional, run_unconditional, MeasurementBasis};
use gatearray::random::{complex_gaussian, random_density_with, random_hermitian, random_state_with, random_unitary_with, rng_from_seed};
use gatearray::{induced_channel, Operator, Processor, ProgramState, StateVector, C64};
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 64, ..ProptestConfig::default() }
}

fn random_op(rows: usize, cols: usize, seed: u64) -> Operator {
    let mut rng = rng_from_seed(seed);
    Operator::from_fn(rows, cols, |_, _| complex_gaussian(&mut rng))
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn tensor_is_associative(a in 1usize..4, b in 1usize..4, c in 1usize..3, seed: u64) {
        let (x, y, z) = (random_op(a, a, seed), random_op(b, b + 1, seed ^ 1), random_op(c, c, seed ^ 2));
        let left = tensor(&tensor(&x, &y), &z);
        let right = tensor(&x, &tensor(&y, &z));
        prop_assert!(left.approx_eq(&right, 1e-12));
    }

    #[test]
    fn partial_trace_of_product(a in 1usize..5, b in 1usize..5, seed: u64) {
        let mut rng = rng_from_seed(seed);
        let (x, y) = (random_density_with(a, &mut rng), random_density_with(b, &mut rng));
        let joint = tensor(&x, &y);
        prop_assert!(partial_trace(&joint, a, b, Keep::A).unwrap().approx_eq(&x, 1e-12));
        prop_assert!(partial_trace(&joint, a, b, Keep::B).unwrap().approx_eq(&y, 1e-12));
    }

    #[test]
    fn trace_distance_is_a_metric(dim in 1usize..6, seed: u64) {
        let mut rng = rng_from_seed(seed);
        let (r, s, t) = (random_density_with(dim, &mut rng), random_density_with(dim, &mut rng), random_density_with(dim, &mut rng));
        let rs = trace_distance(&r, &s).unwrap();
        prop_assert!((rs - trace_distance(&s, &r).unwrap()).abs() < 1e-12);
        prop_assert!(trace_distance(&r, &r).unwrap() < 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&rs));
        prop_assert!(trace_distance(&r, &t).unwrap() <= rs + trace_distance(&s, &t).unwrap() + 1e-12);
    }

    #[test]
    fn eigh_reconstructs(dim in 1usize..8, seed: u64) {
        let h = random_hermitian(dim, &mut rng_from_seed(seed));
        let (vals, vecs) = eigh(&h);
        let rebuilt = &(&vecs * &Operator::diag_real(&vals)) * &vecs.dagger();
        prop_assert!(rebuilt.approx_eq(&h, 1e-10));
        prop_assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(unitarity_residual(&vecs).unwrap() < 1e-12);
    }

    #[test]
    fn exponential_of_hermitian_is_unitary(dim in 1usize..8, seed: u64) {
        let h = random_hermitian(dim, &mut rng_from_seed(seed));
        prop_assert!(is_unitary(&exp_i_hermitian(&h), 1e-10).unwrap());
    }

    #[test]
    fn haar_samples_are_unitary(dim in 1usize..10, seed: u64) {
        prop_assert!(unitarity_residual(&random_unitary_with(dim, &mut rng_from_seed(seed))).unwrap() < 1e-12);
    }

    #[test]
    fn induced_channels_preserve_trace(m in 1usize..5, n in 1usize..5, seed: u64, mixed: bool) {
        let proc = Processor::random(m, n, seed).unwrap();
        let mut rng = rng_from_seed(seed.wrapping_add(1));
        let program = if mixed {
            ProgramState::mixed(random_density_with(n, &mut rng)).unwrap()
        } else {
            ProgramState::pure(random_state_with(n, &mut rng))
        };
        let ch = induced_channel(&proc, &program).unwrap();
        prop_assert!(ch.is_trace_preserving());
        let rho = random_density_with(m, &mut rng);
        let out = ch.apply(&rho).unwrap();
        prop_assert!((out.trace().re - 1.0).abs() < 1e-10);
        prop_assert!(out.approx_eq(&run_unconditional(&proc, &program, &rho).unwrap(), 1e-10));
    }

    #[test]
    fn basis_round_trip(m in 1usize..5, n in 1usize..5, seed: u64) {
        let proc = Processor::random(m, n, seed).unwrap();
        let basis = proc.basis();
        prop_assert!(basis.orthogonality_residual() < 1e-10);
        prop_assert!(basis.dual_residual() < 1e-10);
        prop_assert!(basis.assemble().unwrap().g().approx_eq(proc.g(), 1e-12));
    }

    #[test]
    fn measurement_averages_to_trace_out(n in 2usize..5, seed: u64) {
        let proc = Processor::random(2, n, seed).unwrap();
        let mut rng = rng_from_seed(seed ^ 0xABCD);
        let program = ProgramState::pure(random_state_with(n, &mut rng));
        let rho = random_density_with(2, &mut rng);
        let u = random_unitary_with(n, &mut rng);
        let vectors: Vec<StateVector> = (0..n).map(|k| StateVector::new((0..n).map(|r| u[(r, k)]).collect()).unwrap()).collect();
        let basis = MeasurementBasis::from_vectors(&vectors).unwrap();
        let outcomes = run_conditional(&proc, &program, &rho, &basis).unwrap();
        let total: f64 = outcomes.iter().map(|o| o.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
        let mut mix = Operator::zeros(2, 2);
        for o in &outcomes {
            if let Some(state) = &o.post_state {
                prop_assert!((state.trace().re - 1.0).abs() < 1e-10);
                mix = &mix + &(state * o.probability);
            }
        }
        prop_assert!(mix.approx_eq(&run_unconditional(&proc, &program, &rho).unwrap(), 1e-10));
    }

    #[test]
    fn g_chain(t1 in 1e-9f64..=1.0, t2 in 1e-9f64..=1.0) {
        let g = overlap_bound_g(t1, t2).unwrap();
        prop_assert!(g <= g_first_relaxation(t1, t2) * (1.0 + 1e-12));
        prop_assert!(g_first_relaxation(t1, t2) <= g_second_relaxation(t1, t2) * (1.0 + 1e-12));
        prop_assert!(relaxation_ratio(t1, t2) <= 4.0 / 3.0 + 1e-12);
        prop_assert!(g <= 1.0 + 1e-12);
    }

    #[test]
    fn small_overlaps_imply_independence(count in 3usize..9, spread in 0.0f64..0.3, seed: u64) {
        let mut rng = rng_from_seed(seed);
        let dim = 8;
        let vectors: Vec<StateVector> = (0..count)
            .map(|k| {
                let amps: Vec<C64> = (0..dim)
                    .map(|i| complex_gaussian(&mut rng) * spread + if i == k { 1.0 } else { 0.0 })
                    .collect();
                StateVector::normalized(amps).unwrap()
            })
            .collect();
        if lemma_hypothesis_holds(&vectors) {
            prop_assert!(linear_independence_check(&vectors).unwrap());
        }
    }

    #[test]
    fn processor_json_round_trip(m in 1usize..4, n in 1usize..4, seed: u64) {
        let proc = Processor::random(m, n, seed).unwrap();
        let text = serde_json::to_string(&proc).unwrap();
        let back: Processor = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &proc);
        let canonical = gatearray::json::to_canonical_string(&proc, false).unwrap();
        let back: Processor = serde_json::from_str(&canonical).unwrap();
        prop_assert_eq!(back, proc);
    }
}
