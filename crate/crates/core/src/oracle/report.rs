use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generate::derive_seed;
use crate::network::TradeNetwork;
use crate::oracle::properties;

/// One failed check, with everything needed to re-run it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub trial: usize,
    /// Which sub-check failed (a property may assert several).
    pub check: String,
    pub detail: String,
    /// The exact inputs of the trial.
    pub witness: serde_json::Value,
}

/// Outcome of a randomized (or exhaustive) property check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub property: String,
    pub trials: usize,
    pub tolerance: f64,
    /// Master seed; trial `k` draws from `derive_seed(seed, k)`.
    pub seed: Option<u64>,
    pub failures: Vec<Failure>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {}/{} trials passed (tol {:e})",
            self.property,
            self.trials - self.failed_trials(),
            self.trials,
            self.tolerance
        )
    }

    fn failed_trials(&self) -> usize {
        let mut t: Vec<usize> = self.failures.iter().map(|f| f.trial).collect();
        t.dedup();
        t.len()
    }
}

/// A check returns one `(check, detail)` pair per violated assertion.
pub(crate) type Violations = Vec<(String, String)>;

/// Runs `n_trials` independent trials, possibly in parallel; failures come
/// back ordered by trial index whatever the scheduling.
pub(crate) fn run_trials<G, E>(
    property: &str,
    n_trials: usize,
    seed: u64,
    tolerance: f64,
    generate: G,
    evaluate: E,
) -> Result<PropertyReport>
where
    G: Fn(usize, u64) -> Result<serde_json::Value> + Sync,
    E: Fn(&serde_json::Value) -> Result<Violations> + Sync,
{
    let per_trial = (0..n_trials)
        .into_par_iter()
        .map(|k| {
            let witness = generate(k, derive_seed(seed, k as u64))?;
            let failed = evaluate(&witness)?;
            Ok(failed
                .into_iter()
                .map(|(check, detail)| Failure {
                    trial: k,
                    check,
                    detail,
                    witness: witness.clone(),
                })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PropertyReport {
        property: property.to_owned(),
        trials: n_trials,
        tolerance,
        seed: Some(seed),
        failures: per_trial.into_iter().flatten().collect(),
    })
}

/// Re-evaluates a recorded failure from its witness alone and returns the
/// violated checks (empty if the failure no longer reproduces).
pub fn replay(
    property: &str,
    net: Option<&TradeNetwork<f64>>,
    failure: &Failure,
    tolerance: f64,
) -> Result<Vec<(String, String)>> {
    let need_net = || net.ok_or_else(|| Error::Oracle(format!("replaying `{property}` needs the instance")));
    match property {
        properties::PRINCIPAL => properties::eval_principal(&failure.witness, tolerance),
        properties::MEMBERSHIP => properties::eval_membership(need_net()?, &failure.witness, tolerance),
        properties::PRODUCT_LAWS => properties::eval_product_laws(&failure.witness, tolerance),
        properties::RESIDUATION => properties::eval_residuation(&failure.witness, tolerance),
        properties::NONEXPANSIVE => properties::eval_nonexpansive(need_net()?, &failure.witness, tolerance),
        properties::CLOSURE => properties::eval_closure(need_net()?, &failure.witness, tolerance),
        properties::EQUILIBRIUM => properties::eval_equilibrium(need_net()?, &failure.witness, tolerance),
        other => Err(Error::Oracle(format!("unknown property `{other}`"))),
    }
}
