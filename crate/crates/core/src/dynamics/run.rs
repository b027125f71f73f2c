use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dynamics::{Parallelism, Sweeper};
use crate::error::{Error, Result};
use crate::network::{GlobalState, TradeNetwork};
use crate::scalar::Scalar;
use crate::tropical::ExtendedReal;

/// Stopping threshold on the loss.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Epsilon<T> {
    /// `ε = max_{uv ∈ E} [W]_{u,v}` (0 on an edgeless network).
    Auto,
    Value(T),
}

impl<T: Scalar> Epsilon<T> {
    pub fn resolve(self, net: &TradeNetwork<T>) -> ExtendedReal<T> {
        match self {
            Epsilon::Auto => net.max_edge_weight().unwrap_or_else(ExtendedReal::zero),
            Epsilon::Value(x) => ExtendedReal::Finite(x),
        }
    }
}

impl<T: Scalar> std::str::FromStr for Epsilon<T> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Epsilon::Auto);
        }
        let x: f64 = s
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("eps must be `auto` or a number, got `{s}`")))?;
        if !(x.is_finite() && x >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "eps must be finite and nonnegative, got {x}"
            )));
        }
        Ok(Epsilon::Value(T::from_f64_lossy(x)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Schedule {
    /// Stop on `loss ≤ ε`, an α plateau, a fixed point, or after `max_iters` sweeps.
    UntilConverged { max_iters: usize },
    /// Ignore every stopping rule and record sweeps `t = 0..=steps`.
    FixedSteps(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig<T> {
    pub epsilon: Epsilon<T>,
    pub schedule: Schedule,
    /// Two consecutive α values closer than this count as a plateau.
    pub alpha_plateau_tol: T,
    /// Number of consecutive plateau steps required.
    pub plateau_window: usize,
    /// Entries below this value that are still decreasing count as diverging.
    pub divergence_floor: T,
    pub parallelism: Parallelism,
    /// How many of the most recent states to keep (at least the final one).
    pub keep_tail: usize,
}

impl<T: Scalar> Default for RunConfig<T> {
    fn default() -> Self {
        RunConfig {
            epsilon: Epsilon::Auto,
            schedule: Schedule::UntilConverged { max_iters: 1000 },
            alpha_plateau_tol: T::from_f64_lossy(1e-9),
            plateau_window: 5,
            divergence_floor: T::from_f64_lossy(-10.0),
            parallelism: Parallelism::Sequential,
            keep_tail: 3,
        }
    }
}

impl<T: Scalar> RunConfig<T> {
    pub fn fixed_steps(steps: usize) -> Self {
        RunConfig {
            schedule: Schedule::FixedSteps(steps),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Epsilon::Value(e) = self.epsilon {
            if e < T::zero() {
                return Err(Error::InvalidConfig("epsilon must be nonnegative".into()));
            }
        }
        if self.alpha_plateau_tol < T::zero() {
            return Err(Error::InvalidConfig("alpha_plateau_tol must be nonnegative".into()));
        }
        if self.plateau_window == 0 {
            return Err(Error::InvalidConfig("plateau_window must be positive".into()));
        }
        if let Schedule::UntilConverged { max_iters: 0 } = self.schedule {
            return Err(Error::InvalidConfig("max_iters must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    /// `loss ≤ ε`.
    ConvergedLoss,
    /// α(t) settled at a positive value: the negotiation does not stop.
    PlateauAlpha,
    /// α(t) = 0 but the loss stays above ε.
    FixedPoint,
    /// A finite entry collapsed to `-inf` (α = +inf).
    Diverged,
    MaxIters,
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RunStatus::ConvergedLoss => "converged_loss",
            RunStatus::PlateauAlpha => "plateau_alpha",
            RunStatus::FixedPoint => "fixed_point",
            RunStatus::Diverged => "diverged",
            RunStatus::MaxIters => "max_iters",
        })
    }
}

/// One synchronous sweep `X(t) → X(t+1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRecord<T> {
    pub t: usize,
    /// `‖X(t+1) − X(t)‖∞`.
    pub alpha: ExtendedReal<T>,
    /// Loss of `X(t+1)`.
    pub loss: ExtendedReal<T>,
    pub step_seconds: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trace<T> {
    pub records: Vec<TraceRecord<T>>,
    pub status: RunStatus,
    pub epsilon: ExtendedReal<T>,
    pub initial_loss: ExtendedReal<T>,
}

impl<T: Scalar> Trace<T> {
    pub fn final_alpha(&self) -> Option<ExtendedReal<T>> {
        self.records.last().map(|r| r.alpha)
    }

    pub fn final_loss(&self) -> ExtendedReal<T> {
        self.records.last().map_or(self.initial_loss, |r| r.loss)
    }

    pub fn alphas(&self) -> impl Iterator<Item = ExtendedReal<T>> + '_ {
        self.records.iter().map(|r| r.alpha)
    }

    /// Checks that α(t) never increases by more than `tol`; on failure
    /// returns the offending `t` (whose α exceeds α(t − 1)).
    pub fn check_alpha_monotone(&self, tol: T) -> std::result::Result<(), usize> {
        for w in self.records.windows(2) {
            if !w[1].alpha.le_tol(w[0].alpha, tol) {
                return Err(w[1].t);
            }
        }
        Ok(())
    }
}

/// Result of [`rraggu`].
#[derive(Clone, Debug)]
pub struct RunOutcome<T> {
    pub state: GlobalState<T>,
    pub trace: Trace<T>,
    /// The last `keep_tail` states, oldest first, ending with `state`.
    pub tail: Vec<GlobalState<T>>,
}

/// Stacked ℓ∞ distance `‖X(t+1) − X(t)‖∞`.
pub fn alpha_gradient<T: Scalar>(prev: &GlobalState<T>, next: &GlobalState<T>) -> Result<ExtendedReal<T>> {
    prev.linf_distance(next)
}

/// `ℓ(X) = max_{uv ∈ E} ‖A_{u,v} ⊞ X_u − A_{v,u} ⊞ X_v‖∞`, 0 without edges.
pub fn loss<T: Scalar>(net: &TradeNetwork<T>, x: &GlobalState<T>) -> Result<ExtendedReal<T>> {
    net.check_state(x)?;
    let mut acc = ExtendedReal::zero();
    for &(u, v) in net.edges() {
        acc = acc.join(net.value_residual(u, v, x.block(u), x.block(v))?);
    }
    Ok(acc)
}

fn plateau<T: Scalar>(records: &[TraceRecord<T>], window: usize, tol: T) -> bool {
    if records.len() < window + 1 {
        return false;
    }
    let recent = &records[records.len() - window - 1..];
    let zero = ExtendedReal::Finite(tol);
    recent.iter().all(|r| r.alpha.is_finite() && r.alpha > zero)
        && recent.windows(2).all(|w| w[0].alpha.approx_eq(w[1].alpha, tol))
}

fn classify<T: Scalar>(records: &[TraceRecord<T>], epsilon: ExtendedReal<T>, cfg: &RunConfig<T>) -> Option<RunStatus> {
    let last = records.last()?;
    if last.loss <= epsilon {
        Some(RunStatus::ConvergedLoss)
    } else if last.alpha.is_pos_inf() {
        Some(RunStatus::Diverged)
    } else if last.alpha <= ExtendedReal::Finite(cfg.alpha_plateau_tol) {
        Some(RunStatus::FixedPoint)
    } else if plateau(records, cfg.plateau_window, cfg.alpha_plateau_tol) {
        Some(RunStatus::PlateauAlpha)
    } else {
        None
    }
}

/// Residuate–Rescale–Aggregate–Update: iterates synchronous heat-equation
/// sweeps from `x0`, recording α(t) and the loss after every sweep.
pub fn rraggu<T: Scalar>(net: &TradeNetwork<T>, x0: &GlobalState<T>, cfg: &RunConfig<T>) -> Result<RunOutcome<T>> {
    cfg.validate()?;
    net.check_state(x0)?;
    let sweeper = Sweeper::new(cfg.parallelism)?;
    let epsilon = cfg.epsilon.resolve(net);
    let initial_loss = loss(net, x0)?;
    let keep = cfg.keep_tail.max(1);

    let mut x = x0.clone();
    let mut tail = vec![x.clone()];
    let mut records = Vec::new();

    let (sweeps, stopping) = match cfg.schedule {
        Schedule::UntilConverged { max_iters } => {
            if initial_loss <= epsilon {
                let trace = Trace {
                    records,
                    status: RunStatus::ConvergedLoss,
                    epsilon,
                    initial_loss,
                };
                return Ok(RunOutcome { state: x, trace, tail });
            }
            (max_iters, true)
        }
        Schedule::FixedSteps(steps) => (steps + 1, false),
    };

    let mut status = None;
    for t in 0..sweeps {
        let start = Instant::now();
        let next = sweeper.heat_step(net, &x)?;
        let step_seconds = start.elapsed().as_secs_f64();
        let alpha = alpha_gradient(&x, &next)?;
        let loss = loss(net, &next)?;
        records.push(TraceRecord {
            t,
            alpha,
            loss,
            step_seconds,
        });
        x = next;
        tail.push(x.clone());
        if tail.len() > keep {
            tail.remove(0);
        }
        if stopping {
            status = classify(&records, epsilon, cfg);
            if status.is_some() {
                break;
            }
        }
    }
    let status = status
        .or_else(|| {
            if stopping {
                None
            } else {
                classify(&records, epsilon, cfg)
            }
        })
        .unwrap_or(RunStatus::MaxIters);
    Ok(RunOutcome {
        state: x,
        trace: Trace {
            records,
            status,
            epsilon,
            initial_loss,
        },
        tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::NetworkBuilder;
    use crate::tropical::{Semiring, TropicalMatrix};

    fn id(d: usize) -> TropicalMatrix<f64> {
        TropicalMatrix::identity(d, Semiring::MaxPlus)
    }

    fn identity_pair(w: f64) -> TradeNetwork<f64> {
        NetworkBuilder::new(2, 1).edge(0, 1, id(1), id(1), w).build().unwrap()
    }

    fn state(rows: &[&[f64]]) -> GlobalState<f64> {
        GlobalState::from_f64_rows(rows).unwrap()
    }

    #[test]
    fn loss_examples() {
        let net = NetworkBuilder::new(3, 2)
            .edge(0, 1, id(2), id(2), 0.0)
            .edge(1, 2, id(2), id(2), 0.0)
            .build()
            .unwrap();
        let x = state(&[&[1.0, 2.0], &[1.0, 2.0], &[1.0, 2.0]]);
        assert_eq!(loss(&net, &x).unwrap(), ExtendedReal::zero());
        assert_eq!(
            loss(&identity_pair(0.0), &state(&[&[0.0], &[2.0]])).unwrap(),
            ExtendedReal::Finite(2.0)
        );
        let edgeless = NetworkBuilder::<f64>::new(3, 1).build().unwrap();
        assert_eq!(
            loss(&edgeless, &state(&[&[0.0], &[5.0], &[9.0]])).unwrap(),
            ExtendedReal::zero()
        );
        let mixed = state(&[&[f64::NEG_INFINITY], &[2.0]]);
        assert!(loss(&identity_pair(0.0), &mixed).unwrap().is_pos_inf());
    }

    #[test]
    fn already_converged_returns_immediately() {
        let out = rraggu(&identity_pair(0.0), &state(&[&[1.0], &[1.0]]), &RunConfig::default()).unwrap();
        assert!(out.trace.records.is_empty());
        assert_eq!(out.trace.status, RunStatus::ConvergedLoss);
        assert_eq!(out.state, state(&[&[1.0], &[1.0]]));
    }

    #[test]
    fn identity_pair_converges_in_one_sweep() {
        let cfg = RunConfig {
            epsilon: Epsilon::Value(0.0),
            ..RunConfig::default()
        };
        let out = rraggu(&identity_pair(0.0), &state(&[&[3.0], &[5.0]]), &cfg).unwrap();
        assert_eq!(out.trace.records.len(), 1);
        assert_eq!(out.trace.records[0].alpha, ExtendedReal::Finite(2.0));
        assert_eq!(out.trace.records[0].loss, ExtendedReal::zero());
        assert_eq!(out.trace.status, RunStatus::ConvergedLoss);
        assert_eq!(out.state, state(&[&[3.0], &[3.0]]));
    }

    #[test]
    fn fixed_steps_ignore_stopping_rules() {
        let out = rraggu(
            &identity_pair(0.0),
            &state(&[&[3.0], &[5.0]]),
            &RunConfig::fixed_steps(4),
        )
        .unwrap();
        let ts: Vec<usize> = out.trace.records.iter().map(|r| r.t).collect();
        assert_eq!(ts, vec![0, 1, 2, 3, 4]);
        assert_eq!(out.trace.records[1].alpha, ExtendedReal::zero());
        assert_eq!(out.trace.status, RunStatus::ConvergedLoss);
        assert!(out.trace.check_alpha_monotone(0.0).is_ok());
    }

    #[test]
    fn negative_weight_keeps_sliding() {
        // Both agents lose one unit per sweep forever: α plateaus at 1.
        let cfg = RunConfig {
            schedule: Schedule::UntilConverged { max_iters: 100 },
            ..RunConfig::default()
        };
        let out = rraggu(&identity_pair(-1.0), &state(&[&[0.0], &[0.0]]), &cfg).unwrap();
        assert_eq!(out.trace.status, RunStatus::PlateauAlpha);
        assert_eq!(out.trace.records.len(), cfg.plateau_window + 1);
        assert!(out.trace.alphas().all(|a| a == ExtendedReal::Finite(1.0)));
        assert_eq!(out.tail.len(), 3);
        assert_eq!(out.tail.last(), Some(&out.state));
    }

    #[test]
    fn fixed_point_above_epsilon() {
        let cfg = RunConfig {
            epsilon: Epsilon::Value(0.1),
            ..RunConfig::default()
        };
        // W = 1 permits a gap of 1 at the fixed point, above ε = 0.1.
        let out = rraggu(&identity_pair(1.0), &state(&[&[0.0], &[1.0]]), &cfg).unwrap();
        assert_eq!(out.trace.status, RunStatus::FixedPoint);
        assert_eq!(out.trace.records.len(), 1);
    }

    #[test]
    fn max_iters_reached() {
        let cfg = RunConfig {
            schedule: Schedule::UntilConverged { max_iters: 3 },
            plateau_window: 10,
            ..RunConfig::default()
        };
        let out = rraggu(&identity_pair(-1.0), &state(&[&[0.0], &[0.0]]), &cfg).unwrap();
        assert_eq!(out.trace.status, RunStatus::MaxIters);
        assert_eq!(out.trace.records.len(), 3);
    }

    #[test]
    fn collapse_to_bottom_is_divergence() {
        // Row 1 of A_{v,u} is empty, so v never offers anything on it and
        // u's residuation drops to -inf (outside the modelling assumptions).
        let ninf = f64::NEG_INFINITY;
        let a_uv = TropicalMatrix::from_f64_rows(Semiring::MaxPlus, &[&[0.0, ninf], &[0.0, 0.0]]).unwrap();
        let a_vu = TropicalMatrix::from_f64_rows(Semiring::MaxPlus, &[&[0.0, 0.0], &[ninf, ninf]]).unwrap();
        let net = NetworkBuilder::new(2, 2).edge(0, 1, a_uv, a_vu, 0.0).build().unwrap();
        assert!(!net.validate().is_empty());
        let out = rraggu(&net, &state(&[&[0.0, 0.0], &[5.0, 5.0]]), &RunConfig::default()).unwrap();
        assert_eq!(out.trace.status, RunStatus::Diverged);
        assert!(out.trace.records[0].alpha.is_pos_inf());
        assert!(!out.state.is_finite());
    }

    #[test]
    fn invalid_configs() {
        let net = identity_pair(0.0);
        let x = state(&[&[0.0], &[1.0]]);
        let bad = [
            RunConfig {
                epsilon: Epsilon::Value(-1.0),
                ..RunConfig::default()
            },
            RunConfig {
                plateau_window: 0,
                ..RunConfig::default()
            },
            RunConfig {
                alpha_plateau_tol: -1.0,
                ..RunConfig::default()
            },
            RunConfig {
                schedule: Schedule::UntilConverged { max_iters: 0 },
                ..RunConfig::default()
            },
        ];
        for cfg in bad {
            assert!(matches!(rraggu(&net, &x, &cfg), Err(Error::InvalidConfig(_))));
        }
    }

    #[test]
    fn epsilon_resolution() {
        assert_eq!(Epsilon::Auto.resolve(&identity_pair(0.75)), ExtendedReal::Finite(0.75));
        let edgeless = NetworkBuilder::<f64>::new(2, 1).build().unwrap();
        assert_eq!(Epsilon::Auto.resolve(&edgeless), ExtendedReal::zero());
        assert_eq!("auto".parse::<Epsilon<f64>>().unwrap(), Epsilon::Auto);
        assert_eq!("0.5".parse::<Epsilon<f64>>().unwrap(), Epsilon::Value(0.5));
        assert!("-1".parse::<Epsilon<f64>>().is_err());
    }
}
