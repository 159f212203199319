//! Derivative-free multi-start minimization.
//!
//! Each restart runs a local search from its own starting point; restart `k`
//! draws that point from the substream `restart/k` of the configured seed.
//! The reduction keeps the lowest value and, among equal values, the lowest
//! restart index, so results do not depend on the execution mode.

mod nelder_mead;
mod powell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::rng::RandomSource;

pub use nelder_mead::nelder_mead;
pub use powell::powell;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Nelder-Mead with dimension-adaptive coefficients, rebuilt around the
    /// incumbent after each collapse.
    #[default]
    Simplex,
    /// Powell's conjugate-direction search with Brent line minimization and
    /// adaptively grown brackets.
    AdaptiveDirectSearch,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simplex" => Ok(Method::Simplex),
            "adaptive-direct-search" => Ok(Method::AdaptiveDirectSearch),
            other => Err(Error::Config(format!("unknown optimizer method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub value_tol: f64,
    pub step_tol: f64,
    pub seed: u64,
    pub method: Method,
    #[serde(default)]
    pub execution: Execution,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 20,
            max_iters: 2000,
            value_tol: 1e-8,
            step_tol: 1e-10,
            seed: 0,
            method: Method::Simplex,
            execution: Execution::Parallel,
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Config("at least one restart is required".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be positive".into()));
        }
        if !(self.value_tol > 0.0 && self.step_tol > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Best point found by a search, with the parameters decoded into `P`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResult<P> {
    pub value: f64,
    pub converged: bool,
    pub restarts_run: usize,
    pub best_restart_index: usize,
    pub params: P,
}

impl<P> OptResult<P> {
    pub fn map<Q>(self, f: impl FnOnce(P) -> Q) -> OptResult<Q> {
        OptResult {
            value: self.value,
            converged: self.converged,
            restarts_run: self.restarts_run,
            best_restart_index: self.best_restart_index,
            params: f(self.params),
        }
    }
}

/// Outcome of one local search.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Outcome of a multi-start search over raw parameter vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiStart {
    pub x: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    pub restarts_run: usize,
    pub best_restart_index: usize,
}

impl MultiStart {
    pub fn into_result<P>(self, decode: impl FnOnce(Vec<f64>) -> P) -> OptResult<P> {
        OptResult {
            value: self.value,
            converged: self.converged,
            restarts_run: self.restarts_run,
            best_restart_index: self.best_restart_index,
            params: decode(self.x),
        }
    }
}

/// A minimization problem: objective, random start generator and the
/// characteristic step length of its parameters.
pub struct Problem<'a> {
    pub objective: &'a (dyn Fn(&[f64]) -> f64 + Sync),
    pub random_start: &'a (dyn Fn(&mut RandomSource) -> Vec<f64> + Sync),
    pub scale: f64,
}

pub(crate) fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Runs `warm.len() + cfg.restarts` local searches: first from each warm
/// start in order, then from random starts. Warm starts guarantee the result
/// is no worse than the objective at any of them.
pub fn multistart(problem: &Problem, warm: &[Vec<f64>], cfg: &OptimizerConfig) -> Result<MultiStart> {
    cfg.validate()?;
    let total = warm.len() + cfg.restarts;
    let root = RandomSource::new(cfg.seed);
    let runs = map_indexed(cfg.execution, total, |i| {
        let x0 = if i < warm.len() {
            warm[i].clone()
        } else {
            let mut rng = root.substream(&format!("restart/{}", i - warm.len()));
            (problem.random_start)(&mut rng)
        };
        local_search(problem, x0, cfg)
    });
    let (best_index, best) = runs
        .into_iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.value.total_cmp(&b.value).then(i.cmp(j)))
        .expect("at least one restart");
    Ok(MultiStart {
        x: best.x,
        value: best.value,
        converged: best.converged,
        restarts_run: total,
        best_restart_index: best_index,
    })
}

pub fn local_search(problem: &Problem, x0: Vec<f64>, cfg: &OptimizerConfig) -> LocalResult {
    let f = |x: &[f64]| sanitize((problem.objective)(x));
    match cfg.method {
        Method::Simplex => nelder_mead(&f, x0, problem.scale, cfg),
        Method::AdaptiveDirectSearch => powell(&f, x0, problem.scale, cfg),
    }
}
