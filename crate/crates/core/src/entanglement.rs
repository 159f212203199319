//! Entanglement of formation (two-qubit closed form and ensemble search) and
//! entanglement of purification.

use serde::{Deserialize, Serialize};

use crate::entropy::{binary_entropy, entropy_bits, ProbDist};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat, CVec};
use crate::measure::MeasurementParams;
use crate::optimize::{multistart, OptResult, OptimizerConfig, Problem};
use crate::param;
use crate::rng::RandomSource;
use crate::state::{haar_random_unitary, random_isometry, DensityOperator, PureState, SystemLayout};

const PARAM_SCALE: f64 = 0.4;

/// Initial step for the isometry chart: entries of a random isometry into
/// `d` dimensions have magnitude about `1/sqrt(d)`.
pub(crate) fn isometry_scale(d: usize) -> f64 {
    0.5 / (d as f64).sqrt()
}

fn two_parts(rho: &DensityOperator) -> Result<(usize, usize)> {
    match rho.layout().dims().as_slice() {
        [a, b] => Ok((*a, *b)),
        dims => Err(Error::Dimension(format!("bipartite state expected, layout has dims {dims:?}"))),
    }
}

fn require_two_qubit(rho: &DensityOperator) -> Result<()> {
    match two_parts(rho)? {
        (2, 2) => Ok(()),
        dims => Err(Error::Dimension(format!("two-qubit state expected, got dims {dims:?}"))),
    }
}

/// Wootters concurrence `max(0, l1 - l2 - l3 - l4)`. With `rho = X X^dag`,
/// the `l_i` are the singular values of `X^T (Y x Y) X`, which avoids square
/// roots of near-zero eigenvalues.
pub fn concurrence(rho: &DensityOperator) -> Result<f64> {
    require_two_qubit(rho)?;
    let y = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
    let yy = linalg::kron(&y, &y);
    let (vals, vecs) = linalg::eigh(rho.matrix());
    let x = CMat::from_fn(4, 4, |i, j| vecs[(i, j)] * vals[j].max(0.0).sqrt());
    let tau = x.transpose() * yy * &x;
    let mut l: Vec<f64> = tau.singular_values().iter().copied().collect();
    l.sort_by(|a, b| b.total_cmp(a));
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
}

/// `h((1 + sqrt(1 - C^2)) / 2)` with `C` the concurrence.
pub fn eof_two_qubit(rho: &DensityOperator) -> Result<f64> {
    let conc = concurrence(rho)?;
    binary_entropy((1.0 + (1.0 - conc * conc).max(0.0).sqrt()) / 2.0)
}

/// Pure-state ensemble `{p_i, psi_i}` for a bipartite state.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleDecomposition {
    pub probs: ProbDist,
    pub states: Vec<PureState>,
}

impl EnsembleDecomposition {
    pub fn mixture(&self) -> CMat {
        let d = self.states[0].layout().total_dim();
        let mut m = CMat::zeros(d, d);
        for (p, s) in self.probs.probs().iter().zip(&self.states) {
            m += s.amplitudes() * s.amplitudes().adjoint() * c(*p, 0.0);
        }
        m
    }

    /// `sum_i p_i S(Tr_A psi_i)`.
    pub fn average_entanglement(&self) -> f64 {
        self.probs
            .probs()
            .iter()
            .zip(&self.states)
            .map(|(p, s)| {
                let first = s.layout().labels()[0].to_string();
                p * crate::entropy::von_neumann_entropy(&s.reduced(&[&first]).expect("bipartite"))
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EofEnsemble {
    pub result: OptResult<MeasurementParams>,
    pub decomposition: EnsembleDecomposition,
}

/// Spectral data of a canonical purification: `factors[k] = sqrt(l_k) e_k`
/// reshaped to a `d_first x d_second` matrix.
struct PurificationFactors {
    factors: Vec<CMat>,
}

impl PurificationFactors {
    fn new(rho: &DensityOperator) -> Result<Self> {
        let (da, db) = two_parts(rho)?;
        let psi = rho.purify();
        let r = psi.layout().dims()[2];
        let amps = psi.amplitudes();
        let factors = (0..r)
            .map(|k| CMat::from_fn(da, db, |a, b| amps[(a * db + b) * r + k]))
            .collect();
        Ok(Self { factors })
    }

    fn rank(&self) -> usize {
        self.factors.len()
    }
}

/// Entropy of `m m^dag / tr` computed on the smaller Gram matrix.
fn gram_entropy(m: &CMat) -> (f64, f64) {
    let g = if m.nrows() <= m.ncols() { m * m.adjoint() } else { m.adjoint() * m };
    let mut vals = linalg::eigvalsh(&g);
    let norm: f64 = vals.iter().map(|v| v.max(0.0)).sum();
    linalg::normalize_spectrum(&mut vals);
    (norm, entropy_bits(&vals))
}

fn ensemble_average(pf: &PurificationFactors, w: &CMat) -> f64 {
    let (da, db) = pf.factors[0].shape();
    let mut total = 0.0;
    for i in 0..w.nrows() {
        let mut m = CMat::zeros(da, db);
        for (k, f) in pf.factors.iter().enumerate() {
            m += f * w[(i, k)];
        }
        let (p, s) = gram_entropy(&m);
        if p >= crate::measure::OUTCOME_CUTOFF {
            total += p * s;
        }
    }
    total
}

/// Variational entanglement of formation over ensembles of size `m`
/// (default `rank^2`). Ensembles come from an `m`-outcome rank-one
/// measurement on the purifying system of the canonical purification; the
/// value is an upper bound on `E_F`.
pub fn eof_ensemble(rho: &DensityOperator, ensemble_size: Option<usize>, cfg: &OptimizerConfig) -> Result<EofEnsemble> {
    let pf = PurificationFactors::new(rho)?;
    let r = pf.rank();
    let m = ensemble_size.unwrap_or(r * r);
    if m < r || m > r * r {
        return Err(Error::EnsembleBudget { size: m, min: r, max: r * r });
    }
    let result = ensemble_search(&pf, m, cfg)?;
    let decomposition = decompose(rho, &pf, &result.params);
    Ok(EofEnsemble { result, decomposition })
}

fn ensemble_search(pf: &PurificationFactors, m: usize, cfg: &OptimizerConfig) -> Result<OptResult<MeasurementParams>> {
    let r = pf.rank();
    let mut warm = Vec::new();
    if m > r {
        warm.push(ensemble_search(pf, r, cfg)?.params.embed(m).hermitian_params);
    }
    let objective = |x: &[f64]| {
        let u = param::unitary_from_params(m, x);
        ensemble_average(pf, &u.columns(0, r).into_owned())
    };
    let start = |rng: &mut RandomSource| param::params_from_unitary(&haar_random_unitary(m, rng));
    let problem = Problem { objective: &objective, random_start: &start, scale: PARAM_SCALE };
    Ok(multistart(&problem, &warm, cfg)?.into_result(|x| MeasurementParams { outcomes: m, hermitian_params: x }))
}

fn decompose(rho: &DensityOperator, pf: &PurificationFactors, params: &MeasurementParams) -> EnsembleDecomposition {
    let r = pf.rank();
    let u = params.unitary();
    let (da, db) = pf.factors[0].shape();
    let mut probs = Vec::new();
    let mut states = Vec::new();
    for i in 0..params.outcomes {
        let mut m = CMat::zeros(da, db);
        for k in 0..r {
            m += &pf.factors[k] * u[(i, k)];
        }
        let p = m.norm_squared();
        if p < 1e-14 {
            continue;
        }
        let v = CVec::from_iterator(da * db, (0..da).flat_map(|a| (0..db).map(move |b| (a, b))).map(|(a, b)| m[(a, b)]));
        probs.push(p);
        states.push(PureState::normalized(rho.layout().clone(), v).expect("nonzero member"));
    }
    let total: f64 = probs.iter().sum();
    let probs = ProbDist::new(probs.iter().map(|p| p / total).collect()).expect("ensemble weights");
    EnsembleDecomposition { probs, states }
}

/// Ancilla dimensions `(d_A', d_C')` and the isometry chart from the
/// purifying system of `rho_AC` into `A' (x) C'`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PurificationSplit {
    pub split: (usize, usize),
    pub rank: usize,
    pub isometry_params: Vec<f64>,
}

impl PurificationSplit {
    /// Isometry with rows indexed `a' * d_C' + c'`.
    pub fn isometry(&self) -> CMat {
        param::isometry_from_params(self.split.0 * self.split.1, self.rank, &self.isometry_params)
    }

    /// Re-expresses the isometry for a componentwise larger split.
    pub fn embed(&self, split: (usize, usize)) -> PurificationSplit {
        assert!(split.0 >= self.split.0 && split.1 >= self.split.1);
        let v = self.isometry();
        let mut big = CMat::zeros(split.0 * split.1, self.rank);
        for a in 0..self.split.0 {
            for cc in 0..self.split.1 {
                for e in 0..self.rank {
                    big[(a * split.1 + cc, e)] = v[(a * self.split.1 + cc, e)];
                }
            }
        }
        PurificationSplit { split, rank: self.rank, isometry_params: param::params_from_matrix(&big) }
    }
}

struct EopKernel {
    /// `t[e]` is the `d_A x d_C` slice of the canonical purification.
    t: Vec<CMat>,
    split: (usize, usize),
}

impl EopKernel {
    fn new(rho: &DensityOperator, split: (usize, usize)) -> Result<Self> {
        let pf = PurificationFactors::new(rho)?;
        if split.0 == 0 || split.1 == 0 || split.0 * split.1 < pf.rank() {
            return Err(Error::SplitBudget { split, rank: pf.rank() });
        }
        Ok(Self { t: pf.factors, split })
    }

    fn rank(&self) -> usize {
        self.t.len()
    }

    /// `S(A A')` for the purification produced by isometry `v`.
    fn entropy(&self, v: &CMat) -> f64 {
        let (da, dc) = self.t[0].shape();
        let (dap, dcp) = self.split;
        let mut m = CMat::zeros(da * dap, dc * dcp);
        for (e, t) in self.t.iter().enumerate() {
            let ve = CMat::from_fn(dap, dcp, |a, b| v[(a * dcp + b, e)]);
            m += linalg::kron(t, &ve);
        }
        gram_entropy(&m).1
    }

    fn trivial_starts(&self) -> Vec<Vec<f64>> {
        let r = self.rank();
        let (dap, dcp) = self.split;
        let mut out = Vec::new();
        if dcp >= r {
            let v = CMat::from_fn(dap * dcp, r, |row, e| if row == e { linalg::ONE } else { linalg::ZERO });
            out.push(param::params_from_matrix(&v));
        }
        if dap >= r {
            let v = CMat::from_fn(dap * dcp, r, |row, e| if row == e * dcp { linalg::ONE } else { linalg::ZERO });
            out.push(param::params_from_matrix(&v));
        }
        out
    }
}

/// Variational entanglement of purification `min S(A A')` over purifications
/// `psi_{A A' C C'}` with the given ancilla split. An upper bound on `E_P`;
/// never above `min(S(A), S(C))` when the split can hold either trivial
/// purification.
pub fn entanglement_of_purification(
    rho_ac: &DensityOperator,
    split: (usize, usize),
    cfg: &OptimizerConfig,
) -> Result<OptResult<PurificationSplit>> {
    eop_with_warm(rho_ac, split, &[], cfg)
}

fn eop_with_warm(
    rho_ac: &DensityOperator,
    split: (usize, usize),
    nested: &[PurificationSplit],
    cfg: &OptimizerConfig,
) -> Result<OptResult<PurificationSplit>> {
    let kernel = EopKernel::new(rho_ac, split)?;
    let r = kernel.rank();
    let d = split.0 * split.1;
    let mut warm = kernel.trivial_starts();
    warm.extend(
        nested
            .iter()
            .filter(|p| p.rank == r && p.split.0 <= split.0 && p.split.1 <= split.1)
            .map(|p| p.embed(split).isometry_params),
    );
    let objective = |x: &[f64]| kernel.entropy(&param::isometry_from_params(d, r, x));
    let start = |rng: &mut RandomSource| {
        param::params_from_matrix(&random_isometry(r, d, rng).expect("split holds the rank"))
    };
    let problem = Problem { objective: &objective, random_start: &start, scale: isometry_scale(d) };
    Ok(multistart(&problem, &warm, cfg)?.into_result(|x| PurificationSplit { split, rank: r, isometry_params: x }))
}

/// Runs the splits in order, seeding each search with every earlier result
/// whose split nests inside it, so larger splits never do worse.
pub fn entanglement_of_purification_sweep(
    rho_ac: &DensityOperator,
    splits: &[(usize, usize)],
    cfg: &OptimizerConfig,
) -> Result<Vec<OptResult<PurificationSplit>>> {
    let mut out: Vec<OptResult<PurificationSplit>> = Vec::with_capacity(splits.len());
    for &split in splits {
        let nested: Vec<PurificationSplit> = out.iter().map(|r| r.params.clone()).collect();
        out.push(eop_with_warm(rho_ac, split, &nested, cfg)?);
    }
    Ok(out)
}

/// Default split `(rank, rank)`.
pub fn default_split(rho_ac: &DensityOperator) -> (usize, usize) {
    let r = rho_ac.rank().max(1);
    (r, r)
}

/// The purification `psi_{A A' C C'}` described by `p`, with ancillas
/// labelled by priming the two labels of `rho_ac`.
pub fn purification_state(rho_ac: &DensityOperator, p: &PurificationSplit) -> Result<PureState> {
    let kernel = EopKernel::new(rho_ac, p.split)?;
    let labels = rho_ac.layout().labels();
    let (da, dc) = kernel.t[0].shape();
    let (dap, dcp) = p.split;
    let v = p.isometry();
    let layout = SystemLayout::new([
        (labels[0].to_string(), da),
        (format!("{}'", labels[0]), dap),
        (labels[1].to_string(), dc),
        (format!("{}'", labels[1]), dcp),
    ])?;
    let mut amps = CVec::zeros(layout.total_dim());
    for a in 0..da {
        for ap in 0..dap {
            for cc in 0..dc {
                for cp in 0..dcp {
                    let idx = ((a * dap + ap) * dc + cc) * dcp + cp;
                    amps[idx] = (0..kernel.rank()).map(|e| kernel.t[e][(a, cc)] * v[(ap * dcp + cp, e)]).sum();
                }
            }
        }
    }
    PureState::normalized(layout, amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::von_neumann_entropy;
    use crate::rng::RandomSource;
    use crate::state::{haar_random_pure, SystemLayout};

    fn ab() -> SystemLayout {
        SystemLayout::lettered(&[2, 2]).unwrap()
    }

    fn bell_phi() -> PureState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState::superposition(ab(), &[(c(s, 0.0), &[0, 0]), (c(s, 0.0), &[1, 1])]).unwrap()
    }

    /// Singlet fidelity 3/4: (2/3) singlet + (1/3) I/4.
    fn werner() -> DensityOperator {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let singlet = PureState::superposition(ab(), &[(c(s, 0.0), &[0, 1]), (c(-s, 0.0), &[1, 0])])
            .unwrap()
            .density();
        let mixed = DensityOperator::maximally_mixed(ab());
        DensityOperator::mixture(&[(2.0 / 3.0, &singlet), (1.0 / 3.0, &mixed)]).unwrap()
    }

    fn quick() -> OptimizerConfig {
        OptimizerConfig::default().with_restarts(4).with_seed(3)
    }

    #[test]
    fn concurrence_fixtures() {
        assert!((concurrence(&bell_phi().density()).unwrap() - 1.0).abs() < 1e-9);
        let prod = DensityOperator::diagonal(ab(), &[0.3, 0.2, 0.3, 0.2]).unwrap();
        assert!(concurrence(&prod).unwrap().abs() < 1e-9);
        assert!((concurrence(&werner()).unwrap() - 0.5).abs() < 1e-9);
        let qutrit = DensityOperator::maximally_mixed(SystemLayout::lettered(&[2, 3]).unwrap());
        assert!(matches!(concurrence(&qutrit), Err(Error::Dimension(_))));
    }

    #[test]
    fn eof_two_qubit_fixtures() {
        assert!((eof_two_qubit(&bell_phi().density()).unwrap() - 1.0).abs() < 1e-9);
        let sep = DensityOperator::diagonal(ab(), &[0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!(eof_two_qubit(&sep).unwrap().abs() < 1e-9);
        // h((1 + sqrt(3)/2) / 2), evaluated independently.
        assert!((eof_two_qubit(&werner()).unwrap() - 0.354_578_902_665_27).abs() < 1e-4);
    }

    #[test]
    fn eof_ensemble_pure_and_budget() {
        let mut rng = RandomSource::new(12);
        let psi = haar_random_pure(ab(), &mut rng);
        let e = eof_ensemble(&psi.density(), Some(1), &quick()).unwrap();
        let sa = von_neumann_entropy(&psi.reduced(&["A"]).unwrap());
        assert!((e.result.value - sa).abs() < 1e-9);
        assert!(matches!(
            eof_ensemble(&psi.density(), Some(2), &quick()),
            Err(Error::EnsembleBudget { .. })
        ));
    }

    #[test]
    fn eof_ensemble_matches_wootters_on_werner() {
        let w = werner();
        let e = eof_ensemble(&w, Some(4), &quick()).unwrap();
        let exact = eof_two_qubit(&w).unwrap();
        assert!(e.result.value >= exact - 1e-6);
        assert!(e.result.value - exact < 5e-3, "{} vs {exact}", e.result.value);
        assert!(linalg::max_abs_diff(&e.decomposition.mixture(), w.matrix()) < 1e-8);
        assert!((e.decomposition.average_entanglement() - e.result.value).abs() < 1e-9);
    }

    #[test]
    fn eof_ensemble_separable_mixture() {
        let l = ab();
        let p1 = PureState::basis(l.clone(), &[0, 0]).unwrap().density();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let p2 = PureState::superposition(l, &[(c(s, 0.0), &[1, 0]), (c(s, 0.0), &[1, 1])]).unwrap().density();
        let rho = DensityOperator::mixture(&[(0.4, &p1), (0.6, &p2)]).unwrap();
        let e = eof_ensemble(&rho, None, &quick()).unwrap();
        assert!(e.result.value.abs() < 1e-6, "{}", e.result.value);
    }

    #[test]
    fn eop_fixtures() {
        let cfg = quick();
        let psi = bell_phi();
        let r = entanglement_of_purification(&psi.density(), (1, 1), &cfg).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9);

        let ra = DensityOperator::diagonal(SystemLayout::new([("A", 2)]).unwrap(), &[0.7, 0.3]).unwrap();
        let rc = DensityOperator::diagonal(SystemLayout::new([("C", 2)]).unwrap(), &[0.6, 0.4]).unwrap();
        let prod = ra.tensor(&rc).unwrap();
        let r = entanglement_of_purification(&prod, (2, 2), &cfg).unwrap();
        assert!(r.value.abs() < 1e-6, "{}", r.value);

        let cl = DensityOperator::diagonal(ab(), &[0.5, 0.0, 0.0, 0.5]).unwrap();
        let r = entanglement_of_purification(&cl, (2, 2), &cfg).unwrap();
        assert!((r.value - 1.0).abs() < 5e-3);

        assert!(matches!(
            entanglement_of_purification(&cl, (1, 1), &cfg),
            Err(Error::SplitBudget { .. })
        ));
    }

    #[test]
    fn purification_state_reproduces_marginal() {
        let mut rng = RandomSource::new(44);
        let psi = haar_random_pure(SystemLayout::lettered(&[2, 2, 2]).unwrap(), &mut rng);
        let rho = psi.reduced(&["A", "C"]).unwrap();
        let r = entanglement_of_purification(&rho, (2, 2), &quick()).unwrap();
        let big = purification_state(&rho, &r.params).unwrap();
        let back = big.reduced(&["A", "C"]).unwrap();
        assert!(linalg::max_abs_diff(back.matrix(), rho.matrix()) < 1e-8);
        let s = von_neumann_entropy(&big.reduced(&["A", "A'"]).unwrap());
        assert!((s - r.value).abs() < 1e-10);
    }
}
