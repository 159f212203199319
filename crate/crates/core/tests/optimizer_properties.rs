use opdiscord::entanglement::{
    entanglement_of_purification, entanglement_of_purification_sweep, eof_ensemble, eof_two_qubit,
};
use opdiscord::entropy::{conditional_entropy_of, entropy_of, mutual_information_of};
use opdiscord::harness::{self, Identity, RunConfig};
use opdiscord::measure::{decode_params, discord, measured_conditional_entropy, minimize_measured_entropy, MeasurementParams};
use opdiscord::state::{haar_random_pure, haar_random_unitary, DensityOperator, SystemLayout};
use opdiscord::tasks::Variational;
use opdiscord::{Execution, OptimizerConfig, RandomSource};
use proptest::prelude::*;

fn mixed(dims: &[usize], env: usize, seed: u64) -> DensityOperator {
    let mut all = dims.to_vec();
    all.push(env);
    let psi = haar_random_pure(SystemLayout::lettered(&all).unwrap(), &mut RandomSource::new(seed));
    let labels = ["A", "B", "C", "D"];
    psi.reduced(&labels[..dims.len()]).unwrap()
}

fn cfg(seed: u64) -> OptimizerConfig {
    OptimizerConfig::default().with_restarts(6).with_seed(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn measured_entropy_never_below_conditional(
        seed in any::<u64>(),
        dm in 2usize..4,
        extra in 0usize..6,
        params in proptest::collection::vec(-3.0f64..3.0, 81),
    ) {
        let rho = mixed(&[2, dm], 3, seed);
        let k = (dm + extra).min(dm * dm);
        let p = MeasurementParams { outcomes: k, hermitian_params: params[..k * k].to_vec() };
        let povm = decode_params(&p, dm).unwrap();
        let measured = measured_conditional_entropy(&rho, "B", &["A"], &povm).unwrap();
        let cond = conditional_entropy_of(&rho, &["A"], &["B"]).unwrap();
        prop_assert!(measured >= cond - 1e-9, "{measured} < {cond}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn discord_is_locally_invariant(seed in any::<u64>()) {
        let rho = mixed(&[2, 2], 2, seed);
        let mut rng = RandomSource::new(seed.wrapping_add(1));
        let turned = rho
            .apply_local("A", &haar_random_unitary(2, &mut rng))
            .unwrap()
            .apply_local("B", &haar_random_unitary(2, &mut rng))
            .unwrap();
        let a = discord(&rho, "B", &["A"], 2, &cfg(seed)).unwrap().value;
        let b = discord(&turned, "B", &["A"], 2, &cfg(seed)).unwrap().value;
        prop_assert!((a - b).abs() <= 2e-3, "{a} vs {b}");
        prop_assert!(a >= -1e-9);
    }

    #[test]
    fn more_outcomes_never_hurt(seed in any::<u64>()) {
        let rho = mixed(&[2, 2], 3, seed);
        let small = minimize_measured_entropy(&rho, "B", &["A"], 2, &cfg(seed)).unwrap().value;
        let large = minimize_measured_entropy(&rho, "B", &["A"], 4, &cfg(seed)).unwrap().value;
        prop_assert!(large <= small + 1e-6, "{large} > {small}");
    }

    #[test]
    fn ensemble_eof_bounds_wootters_from_above(seed in any::<u64>(), env in 1usize..4) {
        let rho = mixed(&[2, 2], env, seed);
        let exact = eof_two_qubit(&rho).unwrap();
        let ens = eof_ensemble(&rho, None, &cfg(seed)).unwrap().result.value;
        prop_assert!(ens >= exact - 1e-6, "{ens} < {exact}");
        if env == 1 {
            let s = entropy_of(&rho, &["A"]).unwrap();
            prop_assert!((exact - s).abs() <= 1e-9 && (ens - s).abs() <= 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn purification_entanglement_bounds(seed in any::<u64>()) {
        let rho = mixed(&[2, 2], 2, seed);
        let eop = entanglement_of_purification(&rho, (2, 2), &cfg(seed)).unwrap().value;
        let half_i = mutual_information_of(&rho, &["A"], &["B"]).unwrap() / 2.0;
        let eof = eof_ensemble(&rho, None, &cfg(seed)).unwrap().result.value;
        prop_assert!(eop >= half_i - 5e-3, "{eop} < {half_i}");
        prop_assert!(eop >= eof - 5e-3, "{eop} < {eof}");
    }

    #[test]
    fn larger_splits_never_hurt(seed in any::<u64>()) {
        let rho = mixed(&[2, 2], 2, seed);
        let sweep = entanglement_of_purification_sweep(&rho, &[(2, 2), (2, 4), (4, 4)], &cfg(seed)).unwrap();
        for w in sweep.windows(2) {
            prop_assert!(w[1].value <= w[0].value + 1e-6);
        }
    }
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn multistart_result_is_schedule_independent() {
    let rho = mixed(&[2, 2], 2, 77);
    let par = cfg(5).with_execution(Execution::Parallel);
    let seq = cfg(5).with_execution(Execution::Sequential);
    let a = in_pool(4, || discord(&rho, "B", &["A"], 4, &par).unwrap());
    let b = in_pool(1, || discord(&rho, "B", &["A"], 4, &seq).unwrap());
    let c = in_pool(3, || discord(&rho, "B", &["A"], 4, &par).unwrap());
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn reports_are_bit_identical_across_thread_counts() {
    let run = |execution: Execution| RunConfig {
        identity: Identity::Eq4,
        samples: 4,
        seed: 21,
        settings: Variational::with_optimizer(OptimizerConfig::default().with_restarts(3).with_execution(execution)),
        ..RunConfig::default()
    };
    let text = |reports: Vec<harness::IdentityReport>| {
        let stripped: Vec<_> = reports.iter().map(|r| r.without_timing()).collect();
        serde_json::to_string(&stripped).unwrap()
    };
    let one = in_pool(1, || text(harness::verify(&run(Execution::Sequential)).unwrap()));
    let many = in_pool(4, || text(harness::verify(&run(Execution::Parallel)).unwrap()));
    assert_eq!(one, many);
}
