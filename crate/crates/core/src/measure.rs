//! Generalized measurements, measured conditional entropy, classical
//! correlation and quantum discord.
//!
//! Rank-one POVMs with `K` outcomes on a `d`-dimensional system are charted
//! through a `K x K` unitary `U = exp(iH)`: with `V` the first `d` columns of
//! `U`, the effects are `N_j = V^dag |j><j| V`. Every rank-one POVM with `K`
//! outcomes arises this way.

use serde::{Deserialize, Serialize};

use crate::entropy::{conditional_entropy_of, entropy_of, matrix_entropy};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::optimize::{multistart, OptResult, OptimizerConfig, Problem};
use crate::param;
use crate::state::{haar_random_unitary, DensityOperator};

/// Outcomes with smaller probability contribute nothing.
pub const OUTCOME_CUTOFF: f64 = 1e-12;
const PARAM_SCALE: f64 = 0.4;

#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    target_dim: usize,
    effects: Vec<CMat>,
}

impl Povm {
    pub fn new(target_dim: usize, effects: Vec<CMat>) -> Result<Self> {
        if effects.is_empty() {
            return Err(Error::InvalidState("POVM needs at least one effect".into()));
        }
        let mut sum = CMat::zeros(target_dim, target_dim);
        for e in &effects {
            if e.shape() != (target_dim, target_dim) {
                return Err(Error::Dimension(format!("effect is {:?}, expected {target_dim}x{target_dim}", e.shape())));
            }
            if linalg::hermitian_deviation(e) > 1e-9 {
                return Err(Error::InvalidState("effect is not Hermitian".into()));
            }
            if linalg::eigvalsh(e).last().copied().unwrap_or(0.0) < -1e-9 {
                return Err(Error::InvalidState("effect is not positive".into()));
            }
            sum += e;
        }
        let defect = linalg::max_abs_diff(&sum, &linalg::identity(target_dim));
        if defect > 1e-9 {
            return Err(Error::InvalidState(format!("effects sum to identity only within {defect:e}")));
        }
        Ok(Self { target_dim, effects })
    }

    /// Projective measurement onto the columns of the unitary `u`.
    pub fn projective(u: &CMat) -> Result<Self> {
        let effects = (0..u.ncols())
            .map(|j| {
                let col = u.column(j);
                col * col.adjoint()
            })
            .collect();
        Self::new(u.nrows(), effects)
    }

    pub fn computational(d: usize) -> Self {
        Self::projective(&linalg::identity(d)).expect("basis projectors")
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn effects(&self) -> &[CMat] {
        &self.effects
    }
}

/// Chart coordinates of a `K`-outcome rank-one POVM.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementParams {
    pub outcomes: usize,
    pub hermitian_params: Vec<f64>,
}

impl MeasurementParams {
    pub fn identity(outcomes: usize) -> Self {
        Self { outcomes, hermitian_params: vec![0.0; outcomes * outcomes] }
    }

    pub fn from_unitary(u: &CMat) -> Self {
        Self { outcomes: u.nrows(), hermitian_params: param::params_from_unitary(u) }
    }

    pub fn unitary(&self) -> CMat {
        param::unitary_from_params(self.outcomes, &self.hermitian_params)
    }

    /// The same POVM with `outcomes` outcomes, padded with zero effects.
    pub fn embed(&self, outcomes: usize) -> Self {
        assert!(outcomes >= self.outcomes);
        let h = param::hermitian_from_params(self.outcomes, &self.hermitian_params);
        let mut big = CMat::zeros(outcomes, outcomes);
        big.view_mut((0, 0), (self.outcomes, self.outcomes)).copy_from(&h);
        Self { outcomes, hermitian_params: param::params_from_hermitian(&big) }
    }
}

/// Rank-one effects `v_j v_j^dag` with `v_j^dag` the `j`-th row of the
/// leading `target_dim` columns of the chart unitary.
pub fn decode_params(p: &MeasurementParams, target_dim: usize) -> Result<Povm> {
    check_outcomes(p.outcomes, target_dim)?;
    if p.hermitian_params.len() != p.outcomes * p.outcomes {
        return Err(Error::Config(format!(
            "{} parameters for {} outcomes",
            p.hermitian_params.len(),
            p.outcomes
        )));
    }
    Povm::new(target_dim, rank_one_effects(&p.unitary(), target_dim))
}

fn rank_one_effects(u: &CMat, target_dim: usize) -> Vec<CMat> {
    (0..u.nrows())
        .map(|j| {
            CMat::from_fn(target_dim, target_dim, |a, b| u[(j, a)].conj() * u[(j, b)])
        })
        .collect()
}

fn check_outcomes(outcomes: usize, d: usize) -> Result<()> {
    if outcomes < d || outcomes > d * d {
        return Err(Error::OutcomeBudget { outcomes, min: d, max: d * d });
    }
    Ok(())
}

/// Blocks `rho[(o, m), (o', m')]` of a state ordered `(other, measured)`,
/// indexed by `(m, m')`.
struct ConditionalBlocks {
    measured_dim: usize,
    blocks: Vec<CMat>,
}

impl ConditionalBlocks {
    fn new(rho: &CMat, other_dim: usize, measured_dim: usize) -> Self {
        let mut blocks = Vec::with_capacity(measured_dim * measured_dim);
        for m in 0..measured_dim {
            for mp in 0..measured_dim {
                blocks.push(CMat::from_fn(other_dim, other_dim, |o, op| {
                    rho[(o * measured_dim + m, op * measured_dim + mp)]
                }));
            }
        }
        Self { measured_dim, blocks }
    }

    /// `sum_j p_j S(rho_other|j)` for the given effects.
    fn average_entropy(&self, effects: &[CMat]) -> f64 {
        let d = self.measured_dim;
        let od = self.blocks[0].nrows();
        let mut total = 0.0;
        for n in effects {
            let mut sigma = CMat::zeros(od, od);
            for m in 0..d {
                for mp in 0..d {
                    let w = n[(mp, m)];
                    if w.norm_sqr() > 0.0 {
                        sigma += self.blocks[m * d + mp].scale(1.0) * w;
                    }
                }
            }
            let p = linalg::trace(&sigma).re;
            if p >= OUTCOME_CUTOFF {
                total += p * matrix_entropy(&sigma);
            }
        }
        total
    }
}

fn ordered_marginal(rho: &DensityOperator, measured: &str, other: &[&str]) -> Result<(DensityOperator, usize, usize)> {
    if other.is_empty() {
        return Err(Error::Dimension("the unmeasured side must be nonempty".into()));
    }
    let mut order: Vec<&str> = other.to_vec();
    order.push(measured);
    let m = rho.marginal(&order)?;
    let dm = rho.layout().dim_of(measured)?;
    let od = m.dim() / dm;
    Ok((m, od, dm))
}

/// `sum_j p_j S(rho_other|j)` for measurement `povm` on `measured`. Labels
/// outside `measured` and `other` are traced out first.
pub fn measured_conditional_entropy(rho: &DensityOperator, measured: &str, other: &[&str], povm: &Povm) -> Result<f64> {
    let (m, od, dm) = ordered_marginal(rho, measured, other)?;
    if povm.target_dim() != dm {
        return Err(Error::Dimension(format!(
            "POVM acts on dimension {}, `{measured}` has {dm}",
            povm.target_dim()
        )));
    }
    Ok(ConditionalBlocks::new(m.matrix(), od, dm).average_entropy(povm.effects()))
}

/// Minimizes the measured conditional entropy over `outcomes`-outcome
/// rank-one POVMs. The value is an upper bound on `S(other | measured_c)`.
pub fn minimize_measured_entropy(
    rho: &DensityOperator,
    measured: &str,
    other: &[&str],
    outcomes: usize,
    cfg: &OptimizerConfig,
) -> Result<OptResult<MeasurementParams>> {
    let (m, od, dm) = ordered_marginal(rho, measured, other)?;
    check_outcomes(outcomes, dm)?;
    let blocks = ConditionalBlocks::new(m.matrix(), od, dm);
    search(&blocks, outcomes, cfg)
}

fn search(blocks: &ConditionalBlocks, outcomes: usize, cfg: &OptimizerConfig) -> Result<OptResult<MeasurementParams>> {
    let dm = blocks.measured_dim;
    let mut warm = Vec::new();
    if outcomes > dm {
        // Nesting: the best `dm`-outcome measurement is a feasible start.
        let small = search(blocks, dm, cfg)?;
        warm.push(small.params.embed(outcomes).hermitian_params);
    }
    let objective = |x: &[f64]| {
        let u = param::unitary_from_params(outcomes, x);
        blocks.average_entropy(&rank_one_effects(&u, dm))
    };
    let start = |rng: &mut crate::rng::RandomSource| {
        param::params_from_unitary(&haar_random_unitary(outcomes, rng))
    };
    let problem = Problem { objective: &objective, random_start: &start, scale: PARAM_SCALE };
    let best = multistart(&problem, &warm, cfg)?;
    Ok(best.into_result(|x| MeasurementParams { outcomes, hermitian_params: x }))
}

/// Quantum discord `D(other | measured)`: the minimized measured conditional
/// entropy minus `S(other | measured)`. An upper bound on the true discord.
pub fn discord(
    rho: &DensityOperator,
    measured: &str,
    other: &[&str],
    outcomes: usize,
    cfg: &OptimizerConfig,
) -> Result<OptResult<MeasurementParams>> {
    let best = minimize_measured_entropy(rho, measured, other, outcomes, cfg)?;
    let cond = conditional_entropy_of(rho, other, &[measured])?;
    Ok(OptResult { value: best.value - cond, ..best })
}

/// Classical correlation `I(other : measured_c) = S(other) - S(other | measured_c)`,
/// a lower bound on the true value.
pub fn classical_correlation(
    rho: &DensityOperator,
    measured: &str,
    other: &[&str],
    outcomes: usize,
    cfg: &OptimizerConfig,
) -> Result<OptResult<MeasurementParams>> {
    let best = minimize_measured_entropy(rho, measured, other, outcomes, cfg)?;
    let s_other = entropy_of(rho, other)?;
    Ok(OptResult { value: s_other - best.value, ..best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::rng::RandomSource;
    use crate::state::{random_isometry, PureState, SystemLayout};

    fn ab() -> SystemLayout {
        SystemLayout::lettered(&[2, 2]).unwrap()
    }

    fn bell() -> DensityOperator {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState::superposition(ab(), &[(c(s, 0.0), &[0, 0]), (c(s, 0.0), &[1, 1])])
            .unwrap()
            .density()
    }

    fn hadamard() -> CMat {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        CMat::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)])
    }

    fn quick() -> OptimizerConfig {
        OptimizerConfig::default().with_restarts(4).with_seed(11)
    }

    #[test]
    fn zero_params_decode_to_computational_basis() {
        let povm = decode_params(&MeasurementParams::identity(2), 2).unwrap();
        assert_eq!(povm, Povm::computational(2));
    }

    #[test]
    fn square_chart_gives_projective_measurement() {
        let mut rng = RandomSource::new(1);
        let p = MeasurementParams::from_unitary(&haar_random_unitary(3, &mut rng));
        let povm = decode_params(&p, 3).unwrap();
        for (i, a) in povm.effects().iter().enumerate() {
            for (j, b) in povm.effects().iter().enumerate() {
                let prod = a * b;
                let expect = if i == j { a.clone() } else { CMat::zeros(3, 3) };
                assert!(linalg::max_abs_diff(&prod, &expect) < 1e-10);
            }
        }
    }

    #[test]
    fn four_outcome_qubit_povm_sums_to_identity() {
        let mut rng = RandomSource::new(2);
        let p = MeasurementParams::from_unitary(&haar_random_unitary(4, &mut rng));
        let povm = decode_params(&p, 2).unwrap();
        let sum = povm.effects().iter().fold(CMat::zeros(2, 2), |acc, e| acc + e);
        assert!(linalg::max_abs_diff(&sum, &linalg::identity(2)) < 1e-10);
        for e in povm.effects() {
            assert!(linalg::eigvalsh(e)[1].abs() < 1e-10, "rank one");
        }
    }

    #[test]
    fn outcome_budget_enforced() {
        let rho = bell();
        let cfg = quick();
        assert!(matches!(discord(&rho, "B", &["A"], 5, &cfg), Err(Error::OutcomeBudget { .. })));
        assert!(matches!(discord(&rho, "B", &["A"], 1, &cfg), Err(Error::OutcomeBudget { .. })));
        assert!(decode_params(&MeasurementParams::identity(1), 2).is_err());
    }

    #[test]
    fn measured_entropy_fixtures() {
        let ra = DensityOperator::diagonal(SystemLayout::new([("A", 2)]).unwrap(), &[0.8, 0.2]).unwrap();
        let rb = DensityOperator::diagonal(SystemLayout::new([("B", 2)]).unwrap(), &[0.35, 0.65]).unwrap();
        let prod = ra.tensor(&rb).unwrap();
        let mut rng = RandomSource::new(8);
        let arbitrary = decode_params(&MeasurementParams::from_unitary(&haar_random_unitary(4, &mut rng)), 2).unwrap();
        let v = measured_conditional_entropy(&prod, "B", &["A"], &arbitrary).unwrap();
        assert!((v - crate::entropy::von_neumann_entropy(&ra)).abs() < 1e-9);

        let v = measured_conditional_entropy(&bell(), "B", &["A"], &Povm::computational(2)).unwrap();
        assert!(v.abs() < 1e-9);

        let cl = DensityOperator::diagonal(ab(), &[0.5, 0.0, 0.0, 0.5]).unwrap();
        let x_basis = Povm::projective(&hadamard()).unwrap();
        let v = measured_conditional_entropy(&cl, "B", &["A"], &x_basis).unwrap();
        assert!((v - 1.0).abs() < 1e-9);

        let wrong = Povm::computational(3);
        assert!(matches!(
            measured_conditional_entropy(&cl, "B", &["A"], &wrong),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn discord_fixtures() {
        let cfg = quick();
        let cc = DensityOperator::diagonal(ab(), &[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert!(discord(&cc, "B", &["A"], 2, &cfg).unwrap().value.abs() < 1e-6);
        let r = discord(&bell(), "B", &["A"], 2, &cfg).unwrap();
        assert!((r.value - 1.0).abs() < 1e-6);
        assert!((classical_correlation(&bell(), "B", &["A"], 2, &cfg).unwrap().value - 1.0).abs() < 1e-6);
        let cl = DensityOperator::diagonal(ab(), &[0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!((classical_correlation(&cl, "B", &["A"], 2, &cfg).unwrap().value - 1.0).abs() < 1e-6);
        let ra = DensityOperator::diagonal(SystemLayout::new([("A", 2)]).unwrap(), &[0.8, 0.2]).unwrap();
        let rb = DensityOperator::diagonal(SystemLayout::new([("B", 2)]).unwrap(), &[0.35, 0.65]).unwrap();
        let prod = ra.tensor(&rb).unwrap();
        assert!(classical_correlation(&prod, "B", &["A"], 2, &cfg).unwrap().value.abs() < 1e-6);
    }

    #[test]
    fn value_matches_objective_at_params() {
        let mut rng = RandomSource::new(21);
        let psi = crate::state::haar_random_pure(SystemLayout::lettered(&[2, 2, 2]).unwrap(), &mut rng);
        let rho = psi.reduced(&["A", "C"]).unwrap();
        let r = discord(&rho, "C", &["A"], 4, &quick()).unwrap();
        let povm = decode_params(&r.params, 2).unwrap();
        let direct = measured_conditional_entropy(&rho, "C", &["A"], &povm).unwrap()
            - conditional_entropy_of(&rho, &["A"], &["C"]).unwrap();
        assert!((direct - r.value).abs() < 1e-10);
    }

    #[test]
    fn embedded_params_give_same_povm() {
        let mut rng = RandomSource::new(5);
        let p = MeasurementParams::from_unitary(&random_isometry(2, 2, &mut rng).unwrap());
        let small = decode_params(&p, 2).unwrap();
        let big = decode_params(&p.embed(4), 2).unwrap();
        for j in 0..2 {
            assert!(linalg::max_abs_diff(&small.effects()[j], &big.effects()[j]) < 1e-12);
        }
        assert!(big.effects()[2].norm() < 1e-12 && big.effects()[3].norm() < 1e-12);
    }
}
