use opdiscord::linalg::{self, c, CMat};
use opdiscord::state::{
    apply_channel, haar_random_pure, haar_random_unitary, random_isometry, DensityOperator, PureState, QuantumChannel,
    SystemLayout,
};
use opdiscord::RandomSource;

fn lay(dims: &[usize]) -> SystemLayout {
    SystemLayout::lettered(dims).unwrap()
}

fn random_mixed(dims: &[usize], env: usize, seed: u64) -> DensityOperator {
    let mut all = dims.to_vec();
    all.push(env);
    let psi = haar_random_pure(lay(&all), &mut RandomSource::new(seed));
    let labels: Vec<String> = lay(dims).labels().iter().map(|s| s.to_string()).collect();
    let keep: Vec<&str> = labels.iter().map(String::as_str).collect();
    psi.reduced(&keep).unwrap()
}

fn assert_valid(rho: &DensityOperator) {
    let m = rho.matrix();
    assert!(linalg::hermitian_deviation(m) <= 1e-9);
    assert!((linalg::trace(m).re - 1.0).abs() <= 1e-9);
    assert!(rho.spectrum().iter().all(|&l| l >= -1e-9));
}

#[test]
fn basis_tensor_product() {
    let one = lay(&[2]);
    let a = PureState::basis(one.clone(), &[0]).unwrap();
    let b = PureState::basis(SystemLayout::new([("B", 2)]).unwrap(), &[1]).unwrap();
    let ab = a.tensor(&b).unwrap();
    let amps: Vec<f64> = ab.amplitudes().iter().map(|z| z.re).collect();
    assert_eq!(amps, vec![0.0, 1.0, 0.0, 0.0]);
}

#[test]
fn maximally_mixed_tensor() {
    let a = DensityOperator::maximally_mixed(lay(&[2]));
    let b = DensityOperator::maximally_mixed(SystemLayout::new([("B", 2)]).unwrap());
    let ab = a.tensor(&b).unwrap();
    assert!(linalg::max_abs_diff(ab.matrix(), &(linalg::identity(4) * c(0.25, 0.0))) < 1e-15);
}

#[test]
fn kronecker_matches_loop_oracle() {
    let ra = random_mixed(&[2], 2, 1).matrix().clone();
    let rb = random_mixed(&[2], 3, 2).matrix().clone();
    let k = linalg::kron(&ra, &rb);
    for i in 0..2 {
        for j in 0..2 {
            for p in 0..2 {
                for q in 0..2 {
                    assert_eq!(k[(2 * i + p, 2 * j + q)], ra[(i, j)] * rb[(p, q)]);
                }
            }
        }
    }
}

#[test]
fn partial_trace_fixtures() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let bell = PureState::superposition(lay(&[2, 2]), &[(c(h, 0.0), &[0, 0]), (c(h, 0.0), &[1, 1])]).unwrap().density();
    let a = bell.partial_trace(&["A"]).unwrap();
    assert!(linalg::max_abs_diff(a.matrix(), &(linalg::identity(2) * c(0.5, 0.0))) < 1e-12);

    let ra = random_mixed(&[2], 2, 3);
    let rb = random_mixed(&[3], 2, 4).relabel(&["B"]).unwrap();
    let back = ra.tensor(&rb).unwrap().partial_trace(&["A"]).unwrap();
    assert!(linalg::max_abs_diff(back.matrix(), ra.matrix()) < 1e-12);
}

#[test]
fn partial_trace_matches_index_loop_oracle() {
    let psi = haar_random_pure(lay(&[2, 2, 2]), &mut RandomSource::new(5));
    let rho = psi.density();
    let m = rho.matrix();
    let got = rho.partial_trace(&["A", "B"]).unwrap();
    let mut oracle = CMat::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..2 {
                oracle[(i, j)] += m[(2 * i + k, 2 * j + k)];
            }
        }
    }
    assert!(linalg::max_abs_diff(got.matrix(), &oracle) <= 1e-12);

    let got = rho.partial_trace(&["A", "C"]).unwrap();
    let mut oracle = CMat::zeros(4, 4);
    for (a, c_, a2, c2) in index_quads(2) {
        for b in 0..2 {
            oracle[(2 * a + c_, 2 * a2 + c2)] += m[(4 * a + 2 * b + c_, 4 * a2 + 2 * b + c2)];
        }
    }
    assert!(linalg::max_abs_diff(got.matrix(), &oracle) <= 1e-12);
}

fn index_quads(d: usize) -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..d * d * d * d).map(move |n| (n / (d * d * d), (n / (d * d)) % d, (n / d) % d, n % d))
}

#[test]
fn partial_trace_composes() {
    let rho = random_mixed(&[2, 3, 2], 2, 6);
    let once = rho.partial_trace(&["A"]).unwrap();
    let twice = rho.partial_trace(&["A", "C"]).unwrap().partial_trace(&["A"]).unwrap();
    assert!(linalg::max_abs_diff(once.matrix(), twice.matrix()) <= 1e-12);
    assert_valid(&once);
}

#[test]
fn purification_fixtures() {
    let zero = DensityOperator::diagonal(lay(&[2]), &[1.0, 0.0]).unwrap();
    let p = zero.purify();
    assert_eq!(p.layout().dims(), vec![2, 1]);
    assert!((p.amplitudes()[0].re - 1.0).abs() < 1e-12);

    let mixed = DensityOperator::maximally_mixed(lay(&[2]));
    let p = mixed.purify();
    assert_eq!(p.layout().dims(), vec![2, 2]);
    let a = p.reduced(&["A"]).unwrap();
    assert!(linalg::max_abs_diff(a.matrix(), mixed.matrix()) < 1e-12);
    let s = opdiscord::entropy::entropy_of(&p.density(), &["A"]).unwrap();
    assert!((s - 1.0).abs() < 1e-12);
}

#[test]
fn purify_round_trip_rank_three() {
    let rho = random_mixed(&[4], 3, 7);
    assert_eq!(rho.rank(), 3);
    let p = rho.purify();
    assert_eq!(p.layout().dims(), vec![4, 3]);
    let back = p.reduced(&["A"]).unwrap();
    assert!(linalg::max_abs_diff(back.matrix(), rho.matrix()) <= 1e-9);
}

#[test]
fn haar_pure_fixtures() {
    let one = haar_random_pure(lay(&[1]), &mut RandomSource::new(0));
    assert!((one.amplitudes()[0].norm() - 1.0).abs() < 1e-12);
    let a = haar_random_pure(lay(&[2, 2, 2]), &mut RandomSource::new(42));
    let b = haar_random_pure(lay(&[2, 2, 2]), &mut RandomSource::new(42));
    assert_eq!(a, b);
    assert!((a.amplitudes().norm() - 1.0).abs() < 1e-9);
}

#[test]
fn haar_qubits_have_no_preferred_direction() {
    let mut rng = RandomSource::new(9);
    let n = 10_000;
    let mut mean = [0.0; 3];
    for _ in 0..n {
        let psi = haar_random_pure(lay(&[2]), &mut rng);
        let (a, b) = (psi.amplitudes()[0], psi.amplitudes()[1]);
        let ab = a.conj() * b;
        mean[0] += 2.0 * ab.re;
        mean[1] += 2.0 * ab.im;
        mean[2] += a.norm_sqr() - b.norm_sqr();
    }
    let norm = mean.iter().map(|m| (m / n as f64).powi(2)).sum::<f64>().sqrt();
    assert!(norm <= 0.05, "{norm}");
}

#[test]
fn haar_unitary_fixtures() {
    let u1 = haar_random_unitary(1, &mut RandomSource::new(1));
    assert!((u1[(0, 0)].norm() - 1.0).abs() < 1e-12);
    let a = haar_random_unitary(4, &mut RandomSource::new(3));
    assert_eq!(a, haar_random_unitary(4, &mut RandomSource::new(3)));
    assert!(linalg::max_abs_diff(&(a.adjoint() * &a), &linalg::identity(4)) < 1e-12);

    let mut rng = RandomSource::new(4);
    let n = 10_000;
    let mean = (0..n).map(|_| haar_random_unitary(2, &mut rng)[(0, 0)].norm_sqr()).sum::<f64>() / n as f64;
    assert!((mean - 0.5).abs() < 0.03, "{mean}");
}

#[test]
fn random_isometry_fixtures() {
    let mut rng = RandomSource::new(12);
    let u = random_isometry(2, 2, &mut rng).unwrap();
    assert!(linalg::max_abs_diff(&(&u * u.adjoint()), &linalg::identity(2)) < 1e-12);
    let v = random_isometry(2, 4, &mut rng).unwrap();
    assert!(linalg::max_abs_diff(&(v.adjoint() * &v), &linalg::identity(2)) < 1e-12);
    assert!(random_isometry(3, 2, &mut rng).is_err());

    let rho = random_mixed(&[2], 2, 13);
    let out = &v * rho.matrix() * v.adjoint();
    let mut got = linalg::eigvalsh(&out);
    got.truncate(2);
    let want = rho.spectrum();
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() < 1e-12);
    }
}

#[test]
fn channel_fixtures() {
    let rho = random_mixed(&[2, 2], 4, 14);
    let same = apply_channel(&rho, &QuantumChannel::identity(2), "A").unwrap();
    assert!(linalg::max_abs_diff(same.matrix(), rho.matrix()) < 1e-14);

    let replaced = apply_channel(&rho, &QuantumChannel::replace_with_zero(2, 2), "A").unwrap();
    let zero = DensityOperator::diagonal(lay(&[2]), &[1.0, 0.0]).unwrap();
    let want = zero.tensor(&rho.partial_trace(&["B"]).unwrap()).unwrap();
    assert!(linalg::max_abs_diff(replaced.matrix(), want.matrix()) < 1e-14);
}

#[test]
fn kraus_route_matches_stinespring_route() {
    let mut rng = RandomSource::new(15);
    let (d_out, d_env) = (3, 2);
    let v = random_isometry(2, d_out * d_env, &mut rng).unwrap();
    let ch = QuantumChannel::from_stinespring(&v, d_out).unwrap();
    let rho = random_mixed(&[2, 2], 4, 16);

    let by_kraus = apply_channel(&rho, &ch, "A").unwrap();
    assert_valid(&by_kraus);
    assert_eq!(by_kraus.layout().dims(), vec![3, 2]);

    let vb = linalg::kron(&v, &linalg::identity(2));
    let big = &vb * rho.matrix() * vb.adjoint();
    let full = DensityOperator::new(SystemLayout::new([("A", d_out), ("E", d_env), ("B", 2)]).unwrap(), big).unwrap();
    let by_dilation = full.partial_trace(&["A", "B"]).unwrap();
    assert!(linalg::max_abs_diff(by_kraus.matrix(), by_dilation.matrix()) <= 1e-10);
    assert!(linalg::max_abs_diff(&ch.stinespring(), &v) < 1e-15);
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(SystemLayout::new([("A", 2), ("A", 2)]).is_err());
    assert!(SystemLayout::new([("A", 0)]).is_err());
    let bad = CMat::from_row_slice(2, 2, &[c(0.7, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.7, 0.0)]);
    assert!(DensityOperator::new(lay(&[2]), bad).is_err());
    let not_trace_preserving = vec![CMat::identity(2, 2) * c(0.5, 0.0)];
    assert!(QuantumChannel::new(2, 2, not_trace_preserving).is_err());
}
