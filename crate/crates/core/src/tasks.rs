//! Operational quantities on pure tripartite states: extended state merging
//! cost, the two discord routes, dense coding advantage and capacity, and
//! the residuals of the monogamy relations that connect them.

use serde::{Deserialize, Serialize};

use crate::entanglement::{self, entanglement_of_purification_sweep, eof_ensemble, eof_two_qubit, isometry_scale};
use crate::entropy::{conditional_entropy_of, entropy_bits, entropy_of};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::measure::{classical_correlation, discord, minimize_measured_entropy};
use crate::optimize::{multistart, OptResult, OptimizerConfig, Problem};
use crate::param;
use crate::rng::RandomSource;
use crate::state::{random_isometry, DensityOperator, PureState, QuantumChannel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    A,
    B,
    C,
}

impl Role {
    pub const ALL: [Role; 3] = [Role::A, Role::B, Role::C];

    fn index(self) -> usize {
        match self {
            Role::A => 0,
            Role::B => 1,
            Role::C => 2,
        }
    }

    /// The role that is neither `self` nor `other`.
    pub fn third(self, other: Role) -> Result<Role> {
        if self == other {
            return Err(Error::Config(format!("roles must differ, got {self:?} twice")));
        }
        Ok(Role::ALL.into_iter().find(|r| *r != self && *r != other).expect("three roles"))
    }
}

impl std::str::FromStr for Role {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" => Ok(Role::A),
            "B" => Ok(Role::B),
            "C" => Ok(Role::C),
            other => Err(Error::Config(format!("unknown role `{other}`"))),
        }
    }
}

/// A pure state on three parts with the roles `A`, `B`, `C` assigned to
/// its labels.
#[derive(Debug, Clone)]
pub struct TripartiteRoles {
    state: PureState,
    rho: DensityOperator,
    labels: [String; 3],
}

impl TripartiteRoles {
    /// `labels[0]` plays `A`, `labels[1]` plays `B`, `labels[2]` plays `C`.
    pub fn new(state: PureState, labels: [&str; 3]) -> Result<Self> {
        if state.layout().len() != 3 {
            return Err(Error::Dimension(format!(
                "tripartite state expected, layout has {} parts",
                state.layout().len()
            )));
        }
        for (i, l) in labels.iter().enumerate() {
            state.layout().position(l)?;
            if labels[..i].contains(l) {
                return Err(Error::LabelCollision(l.to_string()));
            }
        }
        let rho = state.density();
        Ok(Self { state, rho, labels: labels.map(str::to_string) })
    }

    /// Roles in layout order.
    pub fn in_order(state: PureState) -> Result<Self> {
        let labels: Vec<String> = state.layout().labels().iter().map(|s| s.to_string()).collect();
        if labels.len() != 3 {
            return Err(Error::Dimension("tripartite state expected".into()));
        }
        Self::new(state, [&labels[0], &labels[1], &labels[2]])
    }

    pub fn state(&self) -> &PureState {
        &self.state
    }

    pub fn label(&self, role: Role) -> &str {
        &self.labels[role.index()]
    }

    pub fn dim(&self, role: Role) -> usize {
        self.state.layout().dim_of(self.label(role)).expect("validated label")
    }

    /// Marginal on two roles, ordered as given.
    pub fn pair(&self, first: Role, second: Role) -> Result<DensityOperator> {
        self.state.reduced(&[self.label(first), self.label(second)])?.reorder(&[self.label(first), self.label(second)])
    }

    pub fn entropy(&self, role: Role) -> f64 {
        entropy_of(&self.rho, &[self.label(role)]).expect("validated label")
    }

    /// `S(x | y)`.
    pub fn conditional(&self, x: Role, y: Role) -> Result<f64> {
        conditional_entropy_of(&self.rho, &[self.label(x)], &[self.label(y)])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EofRoute {
    Wootters,
    Ensemble,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscordRoute {
    /// Entanglement of formation of the complementary pair plus a
    /// conditional entropy; exact when that pair is two-qubit.
    ClosedForm,
    /// Direct minimization over rank-one POVMs.
    Variational,
}

impl DiscordRoute {
    pub fn name(self) -> &'static str {
        match self {
            DiscordRoute::ClosedForm => "closed-form",
            DiscordRoute::Variational => "variational",
        }
    }
}

impl EofRoute {
    pub fn name(self) -> &'static str {
        match self {
            EofRoute::Wootters => "wootters",
            EofRoute::Ensemble => "ensemble",
        }
    }
}

/// Search settings shared by the variational routes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Variational {
    pub optimizer: OptimizerConfig,
    /// POVM outcome counts to try; empty means `d` and `d^2`.
    pub outcomes: Vec<usize>,
    /// Ensemble size for the ensemble E_F route; `None` means `rank^2`.
    pub ensemble_size: Option<usize>,
}

impl Variational {
    pub fn with_optimizer(optimizer: OptimizerConfig) -> Self {
        Self { optimizer, ..Self::default() }
    }

    pub(crate) fn outcomes_for(&self, d: usize) -> Vec<usize> {
        if self.outcomes.is_empty() {
            if d * d > d {
                vec![d, d * d]
            } else {
                vec![d]
            }
        } else {
            self.outcomes.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EofValue {
    pub value: f64,
    pub route: EofRoute,
    pub converged: bool,
}

/// E_F of a bipartite state: Wootters when two-qubit, ensemble search otherwise.
pub fn entanglement_of_formation(rho: &DensityOperator, settings: &Variational) -> Result<EofValue> {
    if rho.layout().dims() == [2, 2] {
        return Ok(EofValue { value: eof_two_qubit(rho)?, route: EofRoute::Wootters, converged: true });
    }
    let e = eof_ensemble(rho, settings.ensemble_size, &settings.optimizer)?;
    Ok(EofValue { value: e.result.value, route: EofRoute::Ensemble, converged: e.result.converged })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EsmCost {
    pub value: f64,
    pub eof: f64,
    pub conditional_entropy: f64,
    pub route: EofRoute,
    pub converged: bool,
}

/// Total entanglement consumption `Gamma(sender > receiver) = E_F + S(sender | receiver)`.
pub fn esm_total_cost(t: &TripartiteRoles, sender: Role, receiver: Role, settings: &Variational) -> Result<EsmCost> {
    sender.third(receiver)?;
    let pair = t.pair(sender, receiver)?;
    let eof = entanglement_of_formation(&pair, settings)?;
    let cond = t.conditional(sender, receiver)?;
    Ok(EsmCost {
        value: eof.value + cond,
        eof: eof.value,
        conditional_entropy: cond,
        route: eof.route,
        converged: eof.converged,
    })
}

/// Exact discord `D(kept | measured)` on a pure tripartite state through the
/// complementary pair `(kept, third)`: `E_F(kept : third) + S(kept | third)`.
pub fn discord_closed_form_2qubit_env(t: &TripartiteRoles, measured: Role, kept: Role) -> Result<f64> {
    let third = measured.third(kept)?;
    let pair = t.pair(kept, third)?;
    if pair.layout().dims() != [2, 2] {
        return Err(Error::RouteUnavailable(format!(
            "the ({kept:?}, {third:?}) marginal is not two-qubit"
        )));
    }
    Ok(eof_two_qubit(&pair)? + t.conditional(kept, third)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscordValue {
    pub value: f64,
    pub route: DiscordRoute,
    /// Value per outcome count for the variational route.
    pub by_outcomes: Vec<(usize, f64)>,
    pub converged: bool,
}

/// `D(kept | measured)` by minimization, minimum over the configured outcome counts.
pub fn discord_variational(t: &TripartiteRoles, measured: Role, kept: Role, settings: &Variational) -> Result<DiscordValue> {
    measured.third(kept)?;
    let rho = t.pair(kept, measured)?;
    let mut by_outcomes = Vec::new();
    let mut best = f64::INFINITY;
    let mut converged = false;
    for k in settings.outcomes_for(t.dim(measured)) {
        let r = discord(&rho, t.label(measured), &[t.label(kept)], k, &settings.optimizer)?;
        by_outcomes.push((k, r.value));
        if r.value < best {
            best = r.value;
            converged = r.converged;
        }
    }
    Ok(DiscordValue { value: best, route: DiscordRoute::Variational, by_outcomes, converged })
}

pub fn discord_by_route(t: &TripartiteRoles, measured: Role, kept: Role, route: DiscordRoute, settings: &Variational) -> Result<DiscordValue> {
    match route {
        DiscordRoute::ClosedForm => Ok(DiscordValue {
            value: discord_closed_form_2qubit_env(t, measured, kept)?,
            route,
            by_outcomes: Vec::new(),
            converged: true,
        }),
        DiscordRoute::Variational => discord_variational(t, measured, kept, settings),
    }
}

/// Two sides of an identity computed by independent routes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentitySides {
    pub lhs: f64,
    pub rhs: f64,
    pub route_lhs: String,
    pub route_rhs: String,
    pub converged: bool,
}

impl IdentitySides {
    pub fn residual(&self) -> f64 {
        self.lhs - self.rhs
    }
}

/// `D(A|C) - D(C|A)` against `Gamma(A > B) - Gamma(C > B)`.
pub fn discord_asymmetry(t: &TripartiteRoles, route: DiscordRoute, settings: &Variational) -> Result<IdentitySides> {
    let d_ac = discord_by_route(t, Role::C, Role::A, route, settings)?;
    let d_ca = discord_by_route(t, Role::A, Role::C, route, settings)?;
    let g_ab = esm_total_cost(t, Role::A, Role::B, settings)?;
    let g_cb = esm_total_cost(t, Role::C, Role::B, settings)?;
    Ok(IdentitySides {
        lhs: d_ac.value - d_ca.value,
        rhs: g_ab.value - g_cb.value,
        route_lhs: route.name().into(),
        route_rhs: format!("gamma-{}", g_ab.route.name()),
        converged: d_ac.converged && d_ca.converged && g_ab.converged && g_cb.converged,
    })
}

/// Stinespring chart of a channel `d_in -> d_out` with environment `d_env`;
/// isometry rows are indexed `out * d_env + env`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub d_in: usize,
    pub d_out: usize,
    pub d_env: usize,
    pub isometry_params: Vec<f64>,
}

impl ChannelParams {
    pub fn isometry(&self) -> CMat {
        param::isometry_from_params(self.d_out * self.d_env, self.d_in, &self.isometry_params)
    }

    pub fn channel(&self) -> QuantumChannel {
        QuantumChannel::from_stinespring(&self.isometry(), self.d_out).expect("chart yields an isometry")
    }

    /// The same channel with output and environment embedded into larger spaces.
    pub fn embed(&self, d_out: usize, d_env: usize) -> ChannelParams {
        assert!(d_out >= self.d_out && d_env >= self.d_env);
        let v = self.isometry();
        let mut big = CMat::zeros(d_out * d_env, self.d_in);
        for o in 0..self.d_out {
            for e in 0..self.d_env {
                for s in 0..self.d_in {
                    big[(o * d_env + e, s)] = v[(o * self.d_env + e, s)];
                }
            }
        }
        ChannelParams { d_in: self.d_in, d_out, d_env, isometry_params: param::params_from_matrix(&big) }
    }
}

/// Coherent information `I(O > R)` of `(channel (x) id) rho` evaluated on the
/// canonical purification of `rho_{SR}`.
struct DenseCodingKernel {
    /// `slices[s]` is the `d_R x rank` block of the purification.
    slices: Vec<CMat>,
    s_receiver: f64,
}

impl DenseCodingKernel {
    fn new(rho: &DensityOperator) -> Self {
        let psi = rho.purify();
        let dims = psi.layout().dims();
        let (ds, dr, q) = (dims[0], dims[1], dims[2]);
        let amps = psi.amplitudes();
        let slices = (0..ds)
            .map(|s| CMat::from_fn(dr, q, |r, x| amps[(s * dr + r) * q + x]))
            .collect();
        let receiver = rho.layout().labels()[1].to_string();
        let s_receiver = entropy_of(rho, &[&receiver]).expect("receiver label");
        Self { slices, s_receiver }
    }

    fn coherent_information(&self, v: &CMat, d_out: usize, d_env: usize) -> f64 {
        let (dr, q) = self.slices[0].shape();
        let mut m = CMat::zeros(d_out * dr, d_env * q);
        for (s, a) in self.slices.iter().enumerate() {
            let vs = CMat::from_fn(d_out, d_env, |o, e| v[(o * d_env + e, s)]);
            m += linalg::kron(&vs, a);
        }
        let g = if m.nrows() <= m.ncols() { &m * m.adjoint() } else { m.adjoint() * &m };
        let mut vals = linalg::eigvalsh(&g);
        linalg::normalize_spectrum(&mut vals);
        self.s_receiver - entropy_bits(&vals)
    }
}

fn dc_pair(rho: &DensityOperator, sender: &str, receiver: &str) -> Result<DensityOperator> {
    if sender == receiver {
        return Err(Error::LabelCollision(sender.to_string()));
    }
    rho.marginal(&[sender, receiver])
}

fn check_d_out(d_in: usize, d_out: usize) -> Result<()> {
    if d_out == 0 || d_out > d_in * d_in {
        return Err(Error::Dimension(format!("output dimension {d_out} outside [1, {}]", d_in * d_in)));
    }
    Ok(())
}

/// Dense coding advantage `max I(O > receiver)` over channels on `sender`
/// with output dimension `d_out` and environment `d_sender * d_out`. A lower
/// bound on the true advantage; never below 0, nor below `I(sender > receiver)`
/// when `d_out >= d_sender`.
pub fn dense_coding_advantage(
    rho: &DensityOperator,
    sender: &str,
    receiver: &str,
    d_out: usize,
    cfg: &OptimizerConfig,
) -> Result<OptResult<ChannelParams>> {
    let pair = dc_pair(rho, sender, receiver)?;
    dc_search(&DenseCodingKernel::new(&pair), pair.layout().dims()[0], d_out, &[], cfg)
}

/// Advantage for each `d_out` in order, each search seeded with every earlier
/// channel that embeds into it.
pub fn dense_coding_advantage_sweep(
    rho: &DensityOperator,
    sender: &str,
    receiver: &str,
    d_outs: &[usize],
    cfg: &OptimizerConfig,
) -> Result<Vec<OptResult<ChannelParams>>> {
    let pair = dc_pair(rho, sender, receiver)?;
    let kernel = DenseCodingKernel::new(&pair);
    let d_in = pair.layout().dims()[0];
    let mut out: Vec<OptResult<ChannelParams>> = Vec::new();
    for &d_out in d_outs {
        let nested: Vec<ChannelParams> = out.iter().map(|r| r.params.clone()).collect();
        out.push(dc_search(&kernel, d_in, d_out, &nested, cfg)?);
    }
    Ok(out)
}

fn dc_search(
    kernel: &DenseCodingKernel,
    d_in: usize,
    d_out: usize,
    nested: &[ChannelParams],
    cfg: &OptimizerConfig,
) -> Result<OptResult<ChannelParams>> {
    check_d_out(d_in, d_out)?;
    let d_env = d_in * d_out;
    let rows = d_out * d_env;
    let basis = |f: &dyn Fn(usize) -> usize| {
        let v = CMat::from_fn(rows, d_in, |row, s| if row == f(s) { linalg::ONE } else { linalg::ZERO });
        param::params_from_matrix(&v)
    };
    let mut warm = Vec::new();
    if d_out >= d_in {
        warm.push(basis(&|s| s * d_env));
    }
    warm.push(basis(&|s| s));
    warm.extend(
        nested
            .iter()
            .filter(|p| p.d_in == d_in && p.d_out <= d_out && p.d_env <= d_env)
            .map(|p| p.embed(d_out, d_env).isometry_params),
    );
    let objective = |x: &[f64]| -kernel.coherent_information(&param::isometry_from_params(rows, d_in, x), d_out, d_env);
    let start = |rng: &mut RandomSource| {
        param::params_from_matrix(&random_isometry(d_in, rows, rng).expect("rows >= d_in"))
    };
    let problem = Problem { objective: &objective, random_start: &start, scale: isometry_scale(rows) };
    let best = multistart(&problem, &warm, cfg)?;
    Ok(OptResult {
        value: -best.value,
        converged: best.converged,
        restarts_run: best.restarts_run,
        best_restart_index: best.best_restart_index,
        params: ChannelParams { d_in, d_out, d_env, isometry_params: best.x },
    })
}

/// Dense coding capacity `log2 d_out + advantage` at fixed `d_out`.
pub fn dc_capacity(rho: &DensityOperator, sender: &str, receiver: &str, d_out: usize, cfg: &OptimizerConfig) -> Result<f64> {
    let adv = dense_coding_advantage(rho, sender, receiver, d_out, cfg)?;
    Ok((d_out as f64).log2() + adv.value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DcDiscordDifference {
    /// `D(A|C) - D(B|C)`.
    pub discord_difference: f64,
    /// `Delta(C > A) - Delta(C > B)` at the largest swept `d_out`, equal on both sides.
    pub dc_difference: f64,
    /// `S(A) - S(B)`.
    pub coherent_shortcut: f64,
    pub discord_route: DiscordRoute,
    pub dc_by_d_out: Vec<(usize, f64, f64)>,
    pub converged: bool,
}

/// Dense coding advantages `Delta(sender > receiver)` over a `d_out` sweep.
fn dc_sweep(t: &TripartiteRoles, sender: Role, receiver: Role, d_outs: &[usize], cfg: &OptimizerConfig) -> Result<(Vec<f64>, bool)> {
    let pair = t.pair(sender, receiver)?;
    let rs = dense_coding_advantage_sweep(&pair, t.label(sender), t.label(receiver), d_outs, cfg)?;
    let converged = rs.iter().all(|r| r.converged);
    Ok((rs.into_iter().map(|r| r.value).collect(), converged))
}

pub fn dc_discord_difference(t: &TripartiteRoles, route: DiscordRoute, d_outs: &[usize], settings: &Variational) -> Result<DcDiscordDifference> {
    if d_outs.is_empty() {
        return Err(Error::Config("at least one output dimension is required".into()));
    }
    let d_ac = discord_by_route(t, Role::C, Role::A, route, settings)?;
    let d_bc = discord_by_route(t, Role::C, Role::B, route, settings)?;
    let (per_a, conv_a) = dc_sweep(t, Role::C, Role::A, d_outs, &settings.optimizer)?;
    let (per_b, conv_b) = dc_sweep(t, Role::C, Role::B, d_outs, &settings.optimizer)?;
    let last = d_outs.len() - 1;
    Ok(DcDiscordDifference {
        discord_difference: d_ac.value - d_bc.value,
        dc_difference: per_a[last] - per_b[last],
        coherent_shortcut: t.entropy(Role::A) - t.entropy(Role::B),
        discord_route: route,
        dc_by_d_out: d_outs.iter().zip(per_a.iter().zip(&per_b)).map(|(&d, (&a, &b))| (d, a, b)).collect(),
        converged: d_ac.converged && d_bc.converged && conv_a && conv_b,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KwResidual {
    pub s_b: f64,
    pub eof_ab: f64,
    pub classical_bc: f64,
    /// `S(B) - E_F(A:B) - I(B : C_c)`.
    pub residual: f64,
    pub route: EofRoute,
    pub converged: bool,
}

/// Koashi-Winter balance `S(B) = E_F(A:B) + I(B : C_c)`.
pub fn koashi_winter_residual(t: &TripartiteRoles, settings: &Variational) -> Result<KwResidual> {
    let eof = entanglement_of_formation(&t.pair(Role::A, Role::B)?, settings)?;
    let rho_bc = t.pair(Role::B, Role::C)?;
    let mut classical = f64::NEG_INFINITY;
    let mut converged = eof.converged;
    for k in settings.outcomes_for(t.dim(Role::C)) {
        let r = classical_correlation(&rho_bc, t.label(Role::C), &[t.label(Role::B)], k, &settings.optimizer)?;
        if r.value > classical {
            classical = r.value;
            converged = eof.converged && r.converged;
        }
    }
    let s_b = t.entropy(Role::B);
    Ok(KwResidual {
        s_b,
        eof_ab: eof.value,
        classical_bc: classical,
        residual: s_b - eof.value - classical,
        route: eof.route,
        converged,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HpResidual {
    pub s_a: f64,
    pub eop_ac: f64,
    pub dc_ba: f64,
    /// `S(A) - E_P(A:C) - Delta(B > A)`; either sign is possible because
    /// `E_P` is an upper and `Delta` a lower estimate.
    pub residual: f64,
    pub best_split: (usize, usize),
    pub best_d_out: usize,
    pub converged: bool,
}

/// Default ancilla splits for `E_P(A:C)`: `(r, r)` with `r = rank(rho_AC)`,
/// then `(d, d_B * d)` for each dense coding output dimension `d`, the split
/// matching the Stinespring dilation used on the dense coding side.
pub fn default_hp_splits(t: &TripartiteRoles, d_outs: &[usize]) -> Result<Vec<(usize, usize)>> {
    let rho_ac = t.pair(Role::A, Role::C)?;
    let r = rho_ac.rank().max(1);
    let db = t.dim(Role::B);
    let mut splits = vec![(r, r)];
    for &d in d_outs {
        let s = (d, db * d);
        if s.0 * s.1 >= r && !splits.contains(&s) {
            splits.push(s);
        }
    }
    Ok(splits)
}

/// Horodecki-Piani balance `S(A) = E_P(A:C) + Delta(B > A)`.
pub fn horodecki_piani_residual(
    t: &TripartiteRoles,
    d_outs: &[usize],
    splits: &[(usize, usize)],
    settings: &Variational,
) -> Result<HpResidual> {
    if d_outs.is_empty() || splits.is_empty() {
        return Err(Error::Config("output dimensions and ancilla splits must be nonempty".into()));
    }
    let rho_ac = t.pair(Role::A, Role::C)?;
    let eops = entanglement_of_purification_sweep(&rho_ac, splits, &settings.optimizer)?;
    let (eop_idx, eop) = eops
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.value.total_cmp(&b.1.value).then(a.0.cmp(&b.0)))
        .expect("nonempty sweep");
    let rho_ba = t.pair(Role::B, Role::A)?;
    let dcs = dense_coding_advantage_sweep(&rho_ba, t.label(Role::B), t.label(Role::A), d_outs, &settings.optimizer)?;
    let (dc_idx, dc) = dcs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.value.total_cmp(&b.1.value).then(b.0.cmp(&a.0)))
        .expect("nonempty sweep");
    let s_a = t.entropy(Role::A);
    Ok(HpResidual {
        s_a,
        eop_ac: eop.value,
        dc_ba: dc.value,
        residual: s_a - eop.value - dc.value,
        best_split: splits[eop_idx],
        best_d_out: d_outs[dc_idx],
        converged: eops.iter().all(|r| r.converged) && dcs.iter().all(|r| r.converged),
    })
}

/// Minimized `S(kept | measured_c)` for the pair `(kept, measured)`.
pub fn measured_conditional(t: &TripartiteRoles, measured: Role, kept: Role, outcomes: usize, cfg: &OptimizerConfig) -> Result<f64> {
    let rho = t.pair(kept, measured)?;
    Ok(minimize_measured_entropy(&rho, t.label(measured), &[t.label(kept)], outcomes, cfg)?.value)
}

pub use entanglement::default_split;
