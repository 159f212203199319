//! Acceptance run: one PASS/FAIL line per criterion. Exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use opdiscord::entanglement::eof_two_qubit;
use opdiscord::entropy::{binary_entropy, conditional_entropy_of, entropy_of};
use opdiscord::harness::{self, Check, Identity, IdentityReport, RunConfig};
use opdiscord::linalg::c;
use opdiscord::measure::{decode_params, discord, measured_conditional_entropy, MeasurementParams};
use opdiscord::state::{haar_random_pure, haar_random_unitary, DensityOperator, PureState, SystemLayout};
use opdiscord::tasks::{self, Role, TripartiteRoles, Variational};
use opdiscord::{Execution, OptimizerConfig, RandomSource};

const SEED: u64 = 7;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn run(identity: Identity, samples: usize, restarts: usize, d_outs: &[usize]) -> Vec<IdentityReport> {
    let cfg = RunConfig {
        identity,
        samples,
        seed: SEED,
        settings: Variational {
            outcomes: vec![2, 4],
            ..Variational::with_optimizer(OptimizerConfig::default().with_restarts(restarts))
        },
        d_outs: d_outs.to_vec(),
        ..RunConfig::default()
    };
    harness::verify(&cfg).expect("verification runs")
}

fn report(reports: &[IdentityReport], check: Check) -> &IdentityReport {
    reports.iter().find(|r| r.check == check).expect("check present")
}

fn summary(r: &IdentityReport) -> String {
    let a = &r.aggregate;
    format!("{} {}/{} within {:e} (max |r| {:.2e})", r.identity, a.pass_count, a.samples, a.tolerance, a.max_abs_residual)
}

fn discord_equals_merging_cost() -> Outcome {
    let reports = run(Identity::Eq4, 100, 20, &[]);
    let r = &reports[0];
    let one_sided = r.records.iter().all(|s| s.residual >= -1e-6);
    let passed = one_sided && r.aggregate.max_abs_residual <= 5e-3 && r.all_passed();
    Outcome { passed, detail: format!("{}; variational above closed form: {one_sided}", summary(r)) }
}

fn koashi_winter() -> Outcome {
    let reports = run(Identity::Kw, 100, 20, &[]);
    let r = &reports[0];
    Outcome { passed: r.aggregate.pass_count >= 99, detail: summary(r) }
}

fn discord_asymmetry() -> Outcome {
    let reports = run(Identity::Eq5, 100, 20, &[]);
    let closed = report(&reports, Check::Eq5ClosedForm);
    let var = report(&reports, Check::Eq5Variational);
    Outcome {
        passed: closed.all_passed() && var.aggregate.pass_count >= 95,
        detail: format!("{}; {}", summary(closed), summary(var)),
    }
}

fn dense_coding_difference() -> Outcome {
    let reports = run(Identity::Eq7, 100, 8, &[2, 4]);
    let shortcut = report(&reports, Check::Eq7Shortcut);
    let dc = report(&reports, Check::Eq7DenseCoding);
    Outcome {
        passed: shortcut.all_passed() && dc.aggregate.pass_count >= 90,
        detail: format!("{}; {}", summary(shortcut), summary(dc)),
    }
}

fn horodecki_piani() -> Outcome {
    let reports = run(Identity::Hp, 30, 8, &[2, 4]);
    let r = &reports[0];
    Outcome { passed: r.aggregate.pass_count >= 27, detail: summary(r) }
}

fn gamma_positivity() -> Outcome {
    let reports = run(Identity::GammaPositivity, 1000, 20, &[]);
    let r = &reports[0];
    let min = r.records.iter().map(|s| s.lhs).fold(f64::INFINITY, f64::min);
    Outcome { passed: r.all_passed(), detail: format!("{}; smallest Gamma {min:.3e}", summary(r)) }
}

fn layout(dims: &[usize]) -> SystemLayout {
    SystemLayout::lettered(dims).unwrap()
}

fn unit_fixtures() -> Outcome {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let cfg = OptimizerConfig::default().with_seed(SEED);
    let bell = PureState::superposition(layout(&[2, 2]), &[(c(h, 0.0), &[0, 0]), (c(h, 0.0), &[1, 1])]).unwrap().density();
    let cond = conditional_entropy_of(&bell, &["A"], &["B"]).unwrap();
    let bell_discord = discord(&bell, "B", &["A"], 2, &cfg).unwrap().value;

    let ghz = PureState::superposition(layout(&[2, 2, 2]), &[(c(h, 0.0), &[0, 0, 0]), (c(h, 0.0), &[1, 1, 1])]).unwrap();
    let t = TripartiteRoles::in_order(ghz).unwrap();
    let ghz_closed = tasks::discord_closed_form_2qubit_env(&t, Role::C, Role::A).unwrap();
    let ghz_var = discord(&t.pair(Role::A, Role::C).unwrap(), "C", &["A"], 2, &cfg).unwrap().value;

    // Singlet fidelity 3/4: two thirds singlet plus one third white noise.
    let singlet = PureState::superposition(layout(&[2, 2]), &[(c(h, 0.0), &[0, 1]), (c(-h, 0.0), &[1, 0])]).unwrap().density();
    let white = DensityOperator::maximally_mixed(layout(&[2, 2]));
    let werner = DensityOperator::mixture(&[(2.0 / 3.0, &singlet), (1.0 / 3.0, &white)]).unwrap();
    let werner_eof = eof_two_qubit(&werner).unwrap();
    let composed = binary_entropy((1.0 + 3f64.sqrt() / 2.0) / 2.0).unwrap();

    let product = PureState::basis(layout(&[2, 2]), &[0, 1]).unwrap().density();
    let dc = tasks::dense_coding_advantage(&product, "A", "B", 2, &cfg).unwrap().value;

    let checks = [
        ("bell S(A|B)", (cond + 1.0).abs() <= 1e-9),
        ("bell discord", (bell_discord - 1.0).abs() <= 1e-6),
        ("ghz D(A|C) closed", ghz_closed.abs() <= 1e-6),
        ("ghz D(A|C) variational", ghz_var.abs() <= 1e-6),
        ("werner E_F", (werner_eof - composed).abs() <= 1e-4),
        ("product advantage", dc.abs() <= 1e-6),
    ];
    let failed: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    Outcome {
        passed: failed.is_empty(),
        detail: format!(
            "S(A|B)={cond:.3e} D_bell={bell_discord:.9} D_ghz={ghz_closed:.1e}/{ghz_var:.1e} E_F(werner)={werner_eof:.9} vs {composed:.9} Delta(product)={dc:.1e}; failed: {failed:?}"
        ),
    }
}

fn mixed(dims: &[usize], env: usize, rng: &mut RandomSource) -> DensityOperator {
    let mut all = dims.to_vec();
    all.push(env);
    let labels = ["A", "B", "C"];
    haar_random_pure(layout(&all), rng).reduced(&labels[..dims.len()]).unwrap()
}

fn property_suites() -> Outcome {
    let mut rng = RandomSource::new(SEED).substream("properties");
    let mut entropy_ok = true;
    for i in 0..1000 {
        let rho = mixed(&[2 + i % 2, 2 + (i / 2) % 2], 1 + i % 4, &mut rng);
        let (sa, sb, sab) = (
            entropy_of(&rho, &["A"]).unwrap(),
            entropy_of(&rho, &["B"]).unwrap(),
            entropy_of(&rho, &["A", "B"]).unwrap(),
        );
        entropy_ok &= sab <= sa + sb + 1e-9 && (sa - sb).abs() - 1e-9 <= sab;
        let psi = haar_random_pure(layout(&[2, 2, 3]), &mut rng).density();
        let s = |l: &[&str]| entropy_of(&psi, l).unwrap();
        entropy_ok &= (s(&["A"]) - s(&["B", "C"])).abs() <= 1e-9 && (s(&["A", "C"]) - s(&["B"])).abs() <= 1e-9;
    }

    let mut povm_ok = true;
    for _ in 0..300 {
        let rho = mixed(&[2, 2], 3, &mut rng);
        let k = 2 + (rng.next_u64() % 3) as usize;
        let params: Vec<f64> = (0..k * k).map(|_| 3.0 * rng.normal()).collect();
        let povm = decode_params(&MeasurementParams { outcomes: k, hermitian_params: params }, 2).unwrap();
        let measured = measured_conditional_entropy(&rho, "B", &["A"], &povm).unwrap();
        povm_ok &= measured >= conditional_entropy_of(&rho, &["A"], &["B"]).unwrap() - 1e-9;
    }

    let cfg = OptimizerConfig::default().with_restarts(8).with_seed(SEED);
    let mut worst_lu: f64 = 0.0;
    for _ in 0..10 {
        let rho = mixed(&[2, 2], 2, &mut rng);
        let turned = rho
            .apply_local("A", &haar_random_unitary(2, &mut rng))
            .unwrap()
            .apply_local("B", &haar_random_unitary(2, &mut rng))
            .unwrap();
        let a = discord(&rho, "B", &["A"], 4, &cfg).unwrap().value;
        let b = discord(&turned, "B", &["A"], 4, &cfg).unwrap().value;
        worst_lu = worst_lu.max((a - b).abs());
    }

    let det_cfg = |execution| RunConfig {
        identity: Identity::Eq4,
        samples: 6,
        seed: SEED,
        settings: Variational::with_optimizer(OptimizerConfig::default().with_restarts(4).with_execution(execution)),
        ..RunConfig::default()
    };
    let text = |threads: usize, execution| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let reports = pool.install(|| harness::verify(&det_cfg(execution)).unwrap());
        let stripped: Vec<_> = reports.iter().map(IdentityReport::without_timing).collect();
        serde_json::to_string(&stripped).unwrap()
    };
    let deterministic = text(1, Execution::Sequential) == text(4, Execution::Parallel);

    Outcome {
        passed: entropy_ok && povm_ok && worst_lu <= 2e-3 && deterministic,
        detail: format!(
            "entropy inequalities {entropy_ok}; POVM-level nonnegativity {povm_ok}; local-unitary drift {worst_lu:.2e}; 1 vs 4 threads identical {deterministic}"
        ),
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("discord equals merging cost", discord_equals_merging_cost),
        ("Koashi-Winter balance", koashi_winter),
        ("discord asymmetry", discord_asymmetry),
        ("discord and dense coding differences", dense_coding_difference),
        ("Horodecki-Piani balance", horodecki_piani),
        ("merging cost positivity", gamma_positivity),
        ("unit fixtures", unit_fixtures),
        ("property suites", property_suites),
    ];
    let mut all = true;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = f();
        all &= out.passed;
        println!(
            "criterion {} {name}: {} ({:.1}s) {}",
            i + 1,
            if out.passed { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            out.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
