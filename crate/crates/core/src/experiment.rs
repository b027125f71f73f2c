//! Batches of seeded trials, their trace and summary documents, the
//! Laplacian benchmark and the end-to-end verification driver.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{is_solution, rraggu, Parallelism, RunConfig, RunOutcome, RunStatus, Sweeper, Trace};
use crate::error::{Error, Result};
use crate::generate::{derive_seed, random_instance, random_state, InstanceParams, Interval};
use crate::network::{GlobalState, TradeNetwork};
use crate::oracle::{self, PropertyReport};
use crate::tropical::ExtendedReal;

/// Tolerance of the monotone-α check applied to every trace.
pub const ALPHA_MONOTONE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct TrialsSpec {
    pub n_trials: usize,
    /// Trial `k` draws `X(0)` from `derive_seed(seed, k)`.
    pub seed: u64,
    pub state_range: Interval,
    pub run: RunConfig<f64>,
    pub workers: Parallelism,
}

impl Default for TrialsSpec {
    /// 20 trials of 10 fixed steps from `X(0)` uniform in [−1, 1].
    fn default() -> Self {
        TrialsSpec {
            n_trials: 20,
            seed: 0,
            state_range: Interval { lo: -1.0, hi: 1.0 },
            run: RunConfig::fixed_steps(10),
            workers: Parallelism::Sequential,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trial {
    pub index: usize,
    pub seed: u64,
    pub initial: GlobalState<f64>,
    pub outcome: RunOutcome<f64>,
}

/// Runs every trial of `spec` on `net`. Several trials are spread over the
/// worker pool; a single trial uses the workers inside each sweep instead.
/// Either way the result does not depend on the worker count. Fails if any
/// trace shows α(t) increasing.
pub fn run_trials(net: &TradeNetwork<f64>, spec: &TrialsSpec) -> Result<Vec<Trial>> {
    if spec.n_trials == 0 {
        return Err(Error::InvalidConfig("n_trials must be at least 1".into()));
    }
    spec.run.validate()?;
    let (n, d) = (net.n_agents(), net.n_alternatives());
    let single = spec.n_trials == 1;
    let run_one = |k: usize| -> Result<Trial> {
        let seed = derive_seed(spec.seed, k as u64);
        let initial = random_state(n, d, spec.state_range, seed)?;
        let cfg = RunConfig {
            parallelism: if single { spec.workers } else { Parallelism::Sequential },
            ..spec.run.clone()
        };
        let outcome = rraggu(net, &initial, &cfg)?;
        Ok(Trial {
            index: k,
            seed,
            initial,
            outcome,
        })
    };
    let trials = match (single, spec.workers.pool()?) {
        (false, Some(pool)) => pool.install(|| (0..spec.n_trials).into_par_iter().map(run_one).collect()),
        _ => (0..spec.n_trials).map(run_one).collect::<Result<Vec<_>>>(),
    }?;
    for t in &trials {
        t.outcome
            .trace
            .check_alpha_monotone(ALPHA_MONOTONE_TOL)
            .map_err(|at| Error::NonMonotoneAlpha { trial: t.index, t: at })?;
    }
    Ok(trials)
}

/// `t,alpha,loss,step_seconds`, one row per sweep, infinities as `inf`/`-inf`.
pub fn trace_csv(trace: &Trace<f64>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "alpha", "loss", "step_seconds"])?;
    for r in &trace.records {
        w.write_record([
            r.t.to_string(),
            r.alpha.to_string(),
            r.loss.to_string(),
            r.step_seconds.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub trial: usize,
    pub seed: u64,
    pub status: RunStatus,
    pub iterations: usize,
    pub final_alpha: Option<ExtendedReal<f64>>,
    pub final_loss: ExtendedReal<f64>,
    /// Final α at most `alpha_zero_tol`.
    pub alpha_to_zero: bool,
    pub loss_within_epsilon: bool,
    pub is_solution: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n_trials: usize,
    pub epsilon: ExtendedReal<f64>,
    pub alpha_zero_tol: f64,
    pub solution_tol: f64,
    /// Trials whose α(t) went to zero.
    pub converged: usize,
    /// Trials still moving at the end (α > `alpha_zero_tol`).
    pub not_converged: usize,
    pub converged_fraction: f64,
    pub status_counts: BTreeMap<RunStatus, usize>,
    pub trials: Vec<TrialSummary>,
}

pub fn summarize(net: &TradeNetwork<f64>, trials: &[Trial], alpha_zero_tol: f64, solution_tol: f64) -> Result<Summary> {
    let mut rows = Vec::with_capacity(trials.len());
    let mut status_counts = BTreeMap::new();
    let mut epsilon = ExtendedReal::zero();
    for t in trials {
        let trace = &t.outcome.trace;
        epsilon = trace.epsilon;
        let final_alpha = trace.final_alpha();
        let final_loss = trace.final_loss();
        *status_counts.entry(trace.status).or_insert(0) += 1;
        rows.push(TrialSummary {
            trial: t.index,
            seed: t.seed,
            status: trace.status,
            iterations: trace.records.len(),
            final_alpha,
            final_loss,
            alpha_to_zero: final_alpha.is_none_or(|a| a <= ExtendedReal::Finite(alpha_zero_tol)),
            loss_within_epsilon: final_loss <= trace.epsilon,
            is_solution: is_solution(net, &t.outcome.state, solution_tol)?,
        });
    }
    let converged = rows.iter().filter(|r| r.alpha_to_zero).count();
    Ok(Summary {
        n_trials: rows.len(),
        epsilon,
        alpha_zero_tol,
        solution_tol,
        converged,
        not_converged: rows.len() - converged,
        converged_fraction: if rows.is_empty() {
            0.0
        } else {
            converged as f64 / rows.len() as f64
        },
        status_counts,
        trials: rows,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchSpec {
    pub agent_counts: Vec<usize>,
    pub n_alternatives: usize,
    pub edge_prob: f64,
    pub repetitions: usize,
    pub seed: u64,
    pub workers: Parallelism,
}

impl Default for BenchSpec {
    fn default() -> Self {
        BenchSpec {
            agent_counts: vec![100, 200, 400, 800],
            n_alternatives: 20,
            edge_prob: 0.2,
            repetitions: 3,
            seed: 0,
            workers: Parallelism::Sequential,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n_agents: usize,
    pub n_alternatives: usize,
    pub edges: usize,
    pub mean_seconds: f64,
    /// Population standard deviation over the repetitions.
    pub std_seconds: f64,
}

/// Times single applications of the Tarski Laplacian (not the loss) on
/// freshly drawn instances of each size.
pub fn bench(spec: &BenchSpec) -> Result<Vec<BenchRow>> {
    if spec.repetitions == 0 {
        return Err(Error::InvalidConfig("repetitions must be at least 1".into()));
    }
    let sweeper = Sweeper::new(spec.workers)?;
    let mut rows = Vec::new();
    for &n in &spec.agent_counts {
        let params = InstanceParams {
            n_agents: n,
            n_alternatives: spec.n_alternatives,
            edge_prob: spec.edge_prob,
            seed: spec.seed,
            ..InstanceParams::default()
        };
        let net = random_instance::<f64>(&params)?;
        let x = random_state(n, spec.n_alternatives, Interval { lo: -1.0, hi: 1.0 }, spec.seed)?;
        let times = (0..spec.repetitions)
            .map(|_| {
                let start = Instant::now();
                let l = sweeper.laplacian(&net, &x)?;
                let secs = start.elapsed().as_secs_f64();
                drop(l);
                Ok(secs)
            })
            .collect::<Result<Vec<f64>>>()?;
        let mean = times.iter().sum::<f64>() / times.len() as f64;
        let var = times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / times.len() as f64;
        rows.push(BenchRow {
            n_agents: n,
            n_alternatives: spec.n_alternatives,
            edges: net.edges().len(),
            mean_seconds: mean,
            std_seconds: var.sqrt(),
        });
    }
    Ok(rows)
}

/// `N,d,mean_seconds,std_seconds`.
pub fn bench_csv(rows: &[BenchRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["N", "d", "mean_seconds", "std_seconds"])?;
    for r in rows {
        w.write_record([
            r.n_agents.to_string(),
            r.n_alternatives.to_string(),
            r.mean_seconds.to_string(),
            r.std_seconds.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifySpec {
    pub trials: usize,
    pub grid_trials: usize,
    pub grid_step: f64,
    pub seed: u64,
    /// Tolerance of the algebraic checks.
    pub tol: f64,
    /// Tolerance for checks on (approximate) solutions.
    pub solution_tol: f64,
}

impl Default for VerifySpec {
    fn default() -> Self {
        VerifySpec {
            trials: 1000,
            grid_trials: 100,
            grid_step: 0.25,
            seed: 0,
            tol: 1e-9,
            solution_tol: 1e-6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub reports: Vec<PropertyReport>,
}

/// Runs every oracle against `net`. Stateless checks always run; the
/// claimed `solutions` are checked for membership and the per-edge bound,
/// and those that really are solutions feed the closure check.
pub fn verify(net: &TradeNetwork<f64>, solutions: &[GlobalState<f64>], spec: &VerifySpec) -> Result<VerifyReport> {
    let mut reports = vec![
        oracle::check_principal_solution(spec.grid_trials, spec.seed, spec.grid_step)?,
        oracle::check_product_laws(spec.trials, spec.seed, spec.tol)?,
        oracle::check_residuation(spec.trials, spec.seed, spec.tol)?,
        oracle::check_nonexpansive(net, spec.trials, spec.seed, spec.tol)?,
    ];
    if !solutions.is_empty() {
        reports.push(oracle::check_solution_membership(net, solutions, spec.solution_tol)?);
        for x in solutions {
            reports.push(oracle::check_equilibrium_bound(net, x, spec.solution_tol)?);
        }
        let genuine: Vec<GlobalState<f64>> = solutions
            .iter()
            .filter(|x| is_solution(net, x, spec.solution_tol).unwrap_or(false))
            .cloned()
            .collect();
        if !genuine.is_empty() {
            reports.push(oracle::check_semimodule_closure(
                net,
                &genuine,
                spec.trials.min(100),
                spec.seed,
                spec.solution_tol,
            )?);
        }
    }
    Ok(VerifyReport {
        passed: reports.iter().all(PropertyReport::passed),
        reports,
    })
}
