use serde::{Deserialize, Serialize};

use crate::dynamics::heat_step;
use crate::error::{Error, Result};
use crate::network::{GlobalState, TradeNetwork};
use crate::scalar::Scalar;
use crate::tropical::ExtendedReal;

/// `X ∈ S` up to `tol`: `‖F(X) − X‖∞ ≤ tol`.
pub fn is_solution<T: Scalar>(net: &TradeNetwork<T>, x: &GlobalState<T>, tol: T) -> Result<bool> {
    in_stable_manifold(net, x, ExtendedReal::Finite(tol))
}

/// `‖F(X) − X‖∞ ≤ α`.
pub fn in_stable_manifold<T: Scalar>(
    net: &TradeNetwork<T>,
    x: &GlobalState<T>,
    alpha: ExtendedReal<T>,
) -> Result<bool> {
    let fx = heat_step(net, x)?;
    Ok(fx.linf_distance(x)? <= alpha)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquilibriumCheck<T> {
    pub holds: bool,
    /// Edge with the largest value residual, `None` without edges.
    pub worst_edge: Option<(usize, usize)>,
    pub worst_residual: ExtendedReal<T>,
}

/// Global approximate value equation: every edge residual is at most `eps`.
pub fn check_global_equilibrium<T: Scalar>(
    net: &TradeNetwork<T>,
    x: &GlobalState<T>,
    eps: ExtendedReal<T>,
) -> Result<EquilibriumCheck<T>> {
    net.check_state(x)?;
    let mut worst_edge = None;
    let mut worst_residual = ExtendedReal::zero();
    for &(u, v) in net.edges() {
        let r = net.value_residual(u, v, x.block(u), x.block(v))?;
        if worst_edge.is_none() || r > worst_residual {
            worst_edge = Some((u, v));
            worst_residual = r;
        }
    }
    Ok(EquilibriumCheck {
        holds: worst_residual <= eps,
        worst_edge,
        worst_residual,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivergenceReport {
    /// Flagged `(agent, alternative)` pairs in lexicographic order.
    pub entries: Vec<(usize, usize)>,
    /// Distinct agents owning a flagged entry, ascending.
    pub agents: Vec<usize>,
    /// Whether `agents` induce a connected subgraph (vacuously true if empty).
    pub connected: bool,
}

impl DivergenceReport {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Flags entries that sit below `floor` at the last state of `window` and are
/// strictly below their value at the start of the window, i.e. are still
/// sinking. Comparing across the window rather than a single step keeps
/// entries that decrease every other sweep.
pub fn divergence_report<T: Scalar>(
    net: &TradeNetwork<T>,
    window: &[GlobalState<T>],
    floor: T,
) -> Result<DivergenceReport> {
    let (Some(first), Some(last)) = (window.first(), window.last()) else {
        return Err(Error::InvalidConfig(
            "divergence report needs at least one state".into(),
        ));
    };
    for x in window {
        net.check_state(x)?;
    }
    let floor = ExtendedReal::Finite(floor);
    let mut entries = Vec::new();
    for u in 0..last.n_agents() {
        for i in 0..last.dim() {
            let now = last.get(u, i);
            if now < floor && now < first.get(u, i) {
                entries.push((u, i));
            }
        }
    }
    let mut agents: Vec<usize> = entries.iter().map(|&(u, _)| u).collect();
    agents.dedup();
    let connected = net.is_connected_subset(&agents);
    Ok(DivergenceReport {
        entries,
        agents,
        connected,
    })
}
