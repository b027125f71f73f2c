use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{GlobalState, TradeNetwork};
use crate::scalar::Scalar;
use crate::tropical::{mp_dot, residuate_into, ExtendedReal, Vector};

/// Worker count for a heat-equation sweep (or for a batch of trials).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parallelism {
    /// One worker per available core.
    Auto,
    /// Exactly this many workers; `1` runs on the calling thread.
    Workers(usize),
    #[default]
    Sequential,
}

impl Parallelism {
    pub fn workers(self) -> usize {
        match self {
            Parallelism::Auto => std::thread::available_parallelism().map_or(1, |n| n.get()),
            Parallelism::Workers(n) => n.max(1),
            Parallelism::Sequential => 1,
        }
    }

    /// A dedicated pool, or `None` when the work should stay on the caller.
    pub fn pool(self) -> Result<Option<ThreadPool>> {
        match self.workers() {
            1 => Ok(None),
            n => ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map(Some)
                .map_err(|e| Error::InvalidConfig(format!("cannot start {n} workers: {e}"))),
        }
    }
}

impl std::str::FromStr for Parallelism {
    type Err = Error;

    /// `"auto"` or a positive integer.
    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Parallelism::Auto);
        }
        match s.parse::<usize>() {
            Ok(0) | Err(_) => Err(Error::InvalidConfig(format!(
                "workers must be `auto` or a positive integer, got `{s}`"
            ))),
            Ok(1) => Ok(Parallelism::Sequential),
            Ok(n) => Ok(Parallelism::Workers(n)),
        }
    }
}

/// Residuate step for agent `u` against neighbour `v`:
/// `A⁻_{u,v} ⊞' (A_{v,u} ⊞ X_v)`, the greatest `Y` with
/// `A_{u,v} ⊞ Y ⪯ A_{v,u} ⊞ X_v`.
pub fn residuate<T: Scalar>(net: &TradeNetwork<T>, u: usize, v: usize, x_v: &Vector<T>) -> Result<Vector<T>> {
    let a_uv = net.coupling(u, v).ok_or(Error::NotAnEdge { u, v })?;
    let offer = net.effective_value(v, u, x_v)?;
    let mut out = vec![ExtendedReal::PosInf; net.n_alternatives()];
    residuate_into(a_uv, offer.entries(), &mut out);
    Ok(Vector::new(out))
}

/// Block `u` of the Laplacian: meet over neighbours of the rescaled
/// residuations. An agent without neighbours gets the top vector.
fn laplacian_block<T: Scalar>(net: &TradeNetwork<T>, x: &GlobalState<T>, u: usize) -> Vector<T> {
    let d = net.n_alternatives();
    let mut acc = vec![ExtendedReal::PosInf; d];
    let mut offer = vec![ExtendedReal::NegInf; d];
    let mut resid = vec![ExtendedReal::PosInf; d];
    for nb in net.neighbors(u) {
        let v = nb.agent;
        let a_vu = net.coupling_on_edge(nb.edge, v);
        let a_uv = net.coupling_on_edge(nb.edge, u);
        let x_v = x.block(v).entries();
        for (i, o) in offer.iter_mut().enumerate() {
            *o = mp_dot(a_vu.row(i), x_v);
        }
        residuate_into(a_uv, &offer, &mut resid);
        let w = net.weight(u, v);
        for (z, &r) in acc.iter_mut().zip(&resid) {
            *z = z.meet(w.min_plus(r));
        }
    }
    Vector::new(acc)
}

/// Evaluates the tropical Tarski Laplacian and the heat equation, optionally
/// spreading the per-agent blocks over a thread pool. Every block reads the
/// same immutable snapshot, so the result does not depend on the pool size.
pub struct Sweeper {
    pool: Option<ThreadPool>,
}

impl Sweeper {
    pub fn new(parallelism: Parallelism) -> Result<Self> {
        Ok(Sweeper {
            pool: parallelism.pool()?,
        })
    }

    pub fn sequential() -> Self {
        Sweeper { pool: None }
    }

    fn map_blocks<R: Send>(&self, n: usize, f: impl Fn(usize) -> R + Sync + Send) -> Vec<R> {
        match &self.pool {
            None => (0..n).map(f).collect(),
            Some(pool) => pool.install(|| (0..n).into_par_iter().map(f).collect()),
        }
    }

    /// `L(X)`; blocks may contain `+inf` (isolated agents, or `-inf` columns).
    pub fn laplacian<T: Scalar>(&self, net: &TradeNetwork<T>, x: &GlobalState<T>) -> Result<Vec<Vector<T>>> {
        net.check_state(x)?;
        Ok(self.map_blocks(net.n_agents(), |u| laplacian_block(net, x, u)))
    }

    /// `F(X) = L(X) ∧ X`.
    pub fn heat_step<T: Scalar>(&self, net: &TradeNetwork<T>, x: &GlobalState<T>) -> Result<GlobalState<T>> {
        net.check_state(x)?;
        let blocks = self.map_blocks(net.n_agents(), |u| {
            laplacian_block(net, x, u)
                .meet(x.block(u))
                .expect("blocks share the state dimension")
        });
        let next = GlobalState::new(blocks)?;
        debug_assert!(next.blocks().iter().all(|b| !b.has_pos_inf()));
        Ok(next)
    }
}

/// `L(X)` evaluated on the calling thread.
pub fn tarski_laplacian<T: Scalar>(net: &TradeNetwork<T>, x: &GlobalState<T>) -> Result<Vec<Vector<T>>> {
    Sweeper::sequential().laplacian(net, x)
}

/// One synchronous heat-equation sweep `X ↦ L(X) ∧ X`.
pub fn heat_step<T: Scalar>(net: &TradeNetwork<T>, x: &GlobalState<T>) -> Result<GlobalState<T>> {
    Sweeper::sequential().heat_step(net, x)
}
