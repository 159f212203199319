use std::str::FromStr;

use serde::Serialize;
use serde_json::json;

use crate::entanglement::{self, concurrence, entanglement_of_purification_sweep};
use crate::entropy::{conditional_entropy_of, entropy_of, mutual_information_of};
use crate::error::{Error, Result};
use crate::measure;
use crate::state::{DensityOperator, StateInput};
use crate::tasks::{self, DiscordRoute, Role, TripartiteRoles, Variational};

use super::{evaluate, Check, RunConfig};

/// A quantity named on the command line, e.g. `conditional-entropy A|B`,
/// `discord A|C` (measurement on `C`) or `dc-advantage A>B`.
#[derive(Debug, Clone, PartialEq)]
pub enum Quantity {
    Entropy(Vec<String>),
    ConditionalEntropy(Vec<String>, Vec<String>),
    MutualInformation(Vec<String>, Vec<String>),
    CoherentInformation(Vec<String>, Vec<String>),
    Discord { kept: String, measured: String, route: Option<DiscordRoute> },
    ClassicalCorrelation { kept: String, measured: String },
    Concurrence(String, String),
    Eof(String, String),
    Eop(String, String),
    Gamma { sender: String, receiver: String },
    DcAdvantage { sender: String, receiver: String },
    DcCapacity { sender: String, receiver: String },
    Identity(Check),
}

fn labels(s: &str) -> Result<Vec<String>> {
    let out: Vec<String> = s.split(',').map(|l| l.trim().to_string()).collect();
    if out.iter().any(String::is_empty) {
        return Err(Error::Parse(format!("empty label in `{s}`")));
    }
    Ok(out)
}

fn pair(arg: &str, sep: char) -> Result<(Vec<String>, Vec<String>)> {
    let (a, b) = arg
        .split_once(sep)
        .ok_or_else(|| Error::Parse(format!("expected `X{sep}Y`, found `{arg}`")))?;
    Ok((labels(a)?, labels(b)?))
}

fn single_pair(arg: &str, sep: char) -> Result<(String, String)> {
    let (a, b) = pair(arg, sep)?;
    match (a.as_slice(), b.as_slice()) {
        ([a], [b]) => Ok((a.clone(), b.clone())),
        _ => Err(Error::Parse(format!("expected single labels in `{arg}`"))),
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = match s.split_once(char::is_whitespace) {
            Some((n, a)) => (n, a.trim()),
            None => (s, ""),
        };
        let need_arg = || if arg.is_empty() { Err(Error::Parse(format!("`{name}` needs labels"))) } else { Ok(arg) };
        Ok(match name {
            "entropy" => Quantity::Entropy(labels(need_arg()?)?),
            "conditional-entropy" => {
                let (a, b) = pair(need_arg()?, '|')?;
                Quantity::ConditionalEntropy(a, b)
            }
            "mutual-information" => {
                let (a, b) = pair(need_arg()?, ':')?;
                Quantity::MutualInformation(a, b)
            }
            "coherent-information" => {
                let (a, b) = pair(need_arg()?, '>')?;
                Quantity::CoherentInformation(a, b)
            }
            "discord" | "discord-closed-form" | "discord-variational" => {
                let (kept, measured) = single_pair(need_arg()?, '|')?;
                let route = match name {
                    "discord-closed-form" => Some(DiscordRoute::ClosedForm),
                    "discord-variational" => Some(DiscordRoute::Variational),
                    _ => None,
                };
                Quantity::Discord { kept, measured, route }
            }
            "classical-correlation" => {
                let (kept, measured) = single_pair(need_arg()?, '|')?;
                Quantity::ClassicalCorrelation { kept, measured }
            }
            "concurrence" | "eof" | "eop" => {
                let (a, b) = single_pair(need_arg()?, ':')?;
                match name {
                    "concurrence" => Quantity::Concurrence(a, b),
                    "eof" => Quantity::Eof(a, b),
                    _ => Quantity::Eop(a, b),
                }
            }
            "gamma" | "dc-advantage" | "dc-capacity" => {
                let (sender, receiver) = single_pair(need_arg()?, '>')?;
                match name {
                    "gamma" => Quantity::Gamma { sender, receiver },
                    "dc-advantage" => Quantity::DcAdvantage { sender, receiver },
                    _ => Quantity::DcCapacity { sender, receiver },
                }
            }
            other => match other.parse::<Check>() {
                Ok(check) if arg.is_empty() => Quantity::Identity(check),
                _ => return Err(Error::Parse(format!("unknown quantity `{s}`"))),
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComputeRecord {
    pub quantity: String,
    pub value: f64,
    pub route: String,
    pub converged: bool,
    pub details: serde_json::Value,
}

impl ComputeRecord {
    fn exact(quantity: &str, value: f64, route: &str) -> Self {
        Self { quantity: quantity.into(), value, route: route.into(), converged: true, details: json!({}) }
    }
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn pure_roles(state: &StateInput, a: &str, b: &str, c: Option<&str>) -> Result<TripartiteRoles> {
    let psi = state
        .as_pure()
        .ok_or_else(|| Error::RouteUnavailable("this quantity needs a pure tripartite state".into()))?;
    let third = match c {
        Some(c) => c.to_string(),
        None => {
            let rest: Vec<&str> = psi.layout().labels().into_iter().filter(|l| *l != a && *l != b).collect();
            match rest.as_slice() {
                [one] => one.to_string(),
                _ => return Err(Error::Dimension("a pure tripartite state is required".into())),
            }
        }
    };
    TripartiteRoles::new(psi.clone(), [a, b, &third])
}

fn bipartite(state: &StateInput, a: &str, b: &str) -> Result<DensityOperator> {
    state.density().marginal(&[a, b])
}

/// Evaluates `quantity` on `state`. `roles` assigns labels to `A`, `B`, `C`
/// for the identity checks (layout order when absent); `d_out` fixes
/// the dense coding output dimension (sender dimension when absent).
pub fn compute(
    state: &StateInput,
    quantity: &Quantity,
    text: &str,
    roles: Option<[&str; 3]>,
    settings: &Variational,
    d_out: Option<usize>,
) -> Result<ComputeRecord> {
    let rho = state.density();
    let cfg = &settings.optimizer;
    Ok(match quantity {
        Quantity::Entropy(l) => ComputeRecord::exact(text, entropy_of(&rho, &refs(l))?, "spectrum"),
        Quantity::ConditionalEntropy(a, b) => {
            ComputeRecord::exact(text, conditional_entropy_of(&rho, &refs(a), &refs(b))?, "spectrum")
        }
        Quantity::MutualInformation(a, b) => {
            ComputeRecord::exact(text, mutual_information_of(&rho, &refs(a), &refs(b))?, "spectrum")
        }
        Quantity::CoherentInformation(a, b) => {
            ComputeRecord::exact(text, -conditional_entropy_of(&rho, &refs(a), &refs(b))?, "spectrum")
        }
        Quantity::Discord { kept, measured, route } => {
            let closed = || -> Result<f64> {
                let third = third_label(state, kept, measured)?;
                let t = pure_roles(state, kept, &third, Some(measured))?;
                tasks::discord_closed_form_2qubit_env(&t, Role::C, Role::A)
            };
            match route {
                Some(DiscordRoute::ClosedForm) => ComputeRecord::exact(text, closed()?, "closed-form"),
                Some(DiscordRoute::Variational) => variational_discord(text, &rho, kept, measured, settings)?,
                None => match closed() {
                    Ok(v) => ComputeRecord::exact(text, v, "closed-form"),
                    Err(Error::RouteUnavailable(_)) => variational_discord(text, &rho, kept, measured, settings)?,
                    Err(e) => return Err(e),
                },
            }
        }
        Quantity::ClassicalCorrelation { kept, measured } => {
            let m = bipartite(state, kept, measured)?;
            let d = m.layout().dim_of(measured)?;
            let mut best: Option<(usize, crate::optimize::OptResult<measure::MeasurementParams>)> = None;
            for k in settings.outcomes_for(d) {
                let r = measure::classical_correlation(&m, measured, &[kept], k, cfg)?;
                if best.as_ref().is_none_or(|(_, b)| r.value > b.value) {
                    best = Some((k, r));
                }
            }
            let (k, r) = best.expect("at least one outcome count");
            ComputeRecord {
                quantity: text.into(),
                value: r.value,
                route: format!("variational-k{k}"),
                converged: r.converged,
                details: json!({ "outcomes": k }),
            }
        }
        Quantity::Concurrence(a, b) => ComputeRecord::exact(text, concurrence(&bipartite(state, a, b)?)?, "wootters"),
        Quantity::Eof(a, b) => {
            let e = tasks::entanglement_of_formation(&bipartite(state, a, b)?, settings)?;
            ComputeRecord { quantity: text.into(), value: e.value, route: e.route.name().into(), converged: e.converged, details: json!({}) }
        }
        Quantity::Eop(a, b) => {
            let m = bipartite(state, a, b)?;
            let split = entanglement::default_split(&m);
            let r = entanglement_of_purification_sweep(&m, &[split], cfg)?.remove(0);
            ComputeRecord {
                quantity: text.into(),
                value: r.value,
                route: format!("purification-split{}x{}", split.0, split.1),
                converged: r.converged,
                details: json!({ "split": [split.0, split.1] }),
            }
        }
        Quantity::Gamma { sender, receiver } => {
            let t = pure_roles(state, sender, receiver, None)?;
            let g = tasks::esm_total_cost(&t, Role::A, Role::B, settings)?;
            ComputeRecord {
                quantity: text.into(),
                value: g.value,
                route: g.route.name().into(),
                converged: g.converged,
                details: json!({ "eof": g.eof, "conditional_entropy": g.conditional_entropy }),
            }
        }
        Quantity::DcAdvantage { sender, receiver } | Quantity::DcCapacity { sender, receiver } => {
            let m = bipartite(state, sender, receiver)?;
            let d = d_out.unwrap_or(m.layout().dim_of(sender)?);
            let r = tasks::dense_coding_advantage(&m, sender, receiver, d, cfg)?;
            let capacity = matches!(quantity, Quantity::DcCapacity { .. });
            let value = if capacity { (d as f64).log2() + r.value } else { r.value };
            ComputeRecord {
                quantity: text.into(),
                value,
                route: format!("stinespring-dout{d}-denv{}", r.params.d_env),
                converged: r.converged,
                details: json!({ "d_out": d, "advantage": r.value }),
            }
        }
        Quantity::Identity(check) => {
            let labels: Vec<String> = state.layout().labels().iter().map(|s| s.to_string()).collect();
            let roles = match roles {
                Some(r) => r,
                None if labels.len() == 3 => [labels[0].as_str(), labels[1].as_str(), labels[2].as_str()],
                None => return Err(Error::Dimension("identity checks need a tripartite state".into())),
            };
            let t = pure_roles(state, roles[0], roles[1], Some(roles[2]))?;
            let run = RunConfig { settings: settings.clone(), d_outs: d_out.into_iter().collect(), ..RunConfig::default() };
            let s = evaluate(*check, &t, &run, settings)?;
            ComputeRecord {
                quantity: text.into(),
                value: s.lhs - s.rhs,
                route: format!("{}|{}", s.route_lhs, s.route_rhs),
                converged: s.converged,
                details: json!({ "lhs": s.lhs, "rhs": s.rhs, "route_lhs": s.route_lhs, "route_rhs": s.route_rhs }),
            }
        }
    })
}

fn third_label(state: &StateInput, a: &str, b: &str) -> Result<String> {
    let layout = state.layout();
    layout.position(a)?;
    layout.position(b)?;
    let rest: Vec<&str> = layout.labels().into_iter().filter(|l| *l != a && *l != b).collect();
    match rest.as_slice() {
        [one] if state.as_pure().is_some() => Ok(one.to_string()),
        _ => Err(Error::RouteUnavailable("closed-form discord needs a pure tripartite state".into())),
    }
}

fn variational_discord(text: &str, rho: &DensityOperator, kept: &str, measured: &str, settings: &Variational) -> Result<ComputeRecord> {
    let m = rho.marginal(&[kept, measured])?;
    let d = m.layout().dim_of(measured)?;
    let mut best: Option<(usize, f64, bool)> = None;
    let mut by_outcomes = Vec::new();
    for k in settings.outcomes_for(d) {
        let r = measure::discord(&m, measured, &[kept], k, &settings.optimizer)?;
        by_outcomes.push(json!({ "outcomes": k, "value": r.value }));
        if best.is_none_or(|(_, v, _)| r.value < v) {
            best = Some((k, r.value, r.converged));
        }
    }
    let (k, value, converged) = best.expect("at least one outcome count");
    Ok(ComputeRecord {
        quantity: text.into(),
        value,
        route: format!("variational-k{k}"),
        converged,
        details: json!({ "by_outcomes": by_outcomes }),
    })
}
