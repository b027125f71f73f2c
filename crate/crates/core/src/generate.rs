//! Seeded random instances and initial states.
//!
//! Every random draw comes from a ChaCha8 generator seeded with
//! `seed_from_u64(seed)` and positioned on a dedicated stream:
//!
//! * stream 0 decides the graph topology (one draw per unordered pair
//!   `u < v`, in lexicographic order);
//! * stream `1 + u * N + v` draws, for edge `{u, v}` with `u < v`, the `d*d`
//!   entries of `A_{u,v}`, then those of `A_{v,u}` (row-major), then `[W]_{u,v}`;
//! * for states, stream `u` draws the `d` entries of agent `u`'s block.
//!
//! Results are therefore independent of platform, of the order in which
//! edges are materialised and of the number of worker threads.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{GlobalState, TradeNetwork};
use crate::scalar::Scalar;
use crate::tropical::{ExtendedReal, Semiring, TropicalMatrix, Vector};

/// Closed interval `[lo, hi]` with finite bounds, `lo <= hi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidRange { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        rng.gen_range(self.lo..=self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.lo, self.hi)
    }
}

impl FromStr for Interval {
    type Err = Error;

    /// Parses `"lo,hi"`.
    fn from_str(s: &str) -> Result<Self> {
        let (lo, hi) = s
            .split_once(',')
            .ok_or_else(|| Error::Format(format!("expected `lo,hi`, got `{s}`")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Error::Format(format!("bad interval bound `{t}`: {e}")))
        };
        Interval::new(parse(lo)?, parse(hi)?)
    }
}

/// Parameters of an Erdős–Rényi trade network with uniform random costs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceParams {
    pub n_agents: usize,
    pub n_alternatives: usize,
    pub edge_prob: f64,
    pub cost_range: Interval,
    pub weight_range: Interval,
    pub seed: u64,
}

impl Default for InstanceParams {
    /// N = 20 agents, p = 0.2, d = 10 alternatives, costs in [−1, 1],
    /// weights in [0, 1].
    fn default() -> Self {
        InstanceParams {
            n_agents: 20,
            n_alternatives: 10,
            edge_prob: 0.2,
            cost_range: Interval { lo: -1.0, hi: 1.0 },
            weight_range: Interval { lo: 0.0, hi: 1.0 },
            seed: 0,
        }
    }
}

fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// SplitMix64 finaliser; derives independent seeds (e.g. one per trial).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn random_matrix<T: Scalar>(rng: &mut ChaCha8Rng, d: usize, range: Interval) -> TropicalMatrix<T> {
    let data = (0..d * d)
        .map(|_| ExtendedReal::Finite(T::from_f64_lossy(range.sample(rng))))
        .collect();
    TropicalMatrix::new(d, d, Semiring::MaxPlus, data).expect("finite d x d matrix")
}

/// Draws an Erdős–Rényi trade network. All coupling entries are finite, so
/// the result always satisfies both modelling assumptions.
pub fn random_instance<T: Scalar>(params: &InstanceParams) -> Result<TradeNetwork<T>> {
    let &InstanceParams {
        n_agents: n,
        n_alternatives: d,
        edge_prob,
        cost_range,
        weight_range,
        seed,
    } = params;
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::InvalidProbability(edge_prob));
    }
    let cost_range = Interval::new(cost_range.lo, cost_range.hi)?;
    let weight_range = Interval::new(weight_range.lo, weight_range.hi)?;
    if n == 0 || d == 0 {
        return Err(Error::EmptyShape);
    }

    let mut topo = stream(seed, 0);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if topo.gen::<f64>() < edge_prob {
                edges.push((u, v));
            }
        }
    }

    let mut couplings = BTreeMap::new();
    let mut w = vec![ExtendedReal::PosInf; n * n];
    for &(u, v) in &edges {
        let mut rng = stream(seed, 1 + (u * n + v) as u64);
        couplings.insert((u, v), random_matrix(&mut rng, d, cost_range));
        couplings.insert((v, u), random_matrix(&mut rng, d, cost_range));
        let weight = ExtendedReal::Finite(T::from_f64_lossy(weight_range.sample(&mut rng)));
        w[u * n + v] = weight;
        w[v * n + u] = weight;
    }
    let weights = TropicalMatrix::new(n, n, Semiring::MinPlus, w)?;
    TradeNetwork::new(n, d, edges, couplings, weights)
}

/// A two-agent, two-alternative network with `W = 0` and no finite
/// equilibrium: `A_{0,1}` is all zeros, so `A_{0,1} ⊞ x` is constant, while
/// `A_{1,0} = [[0, −g], [−g, −2g]]` gives `A_{1,0} ⊞ y = (m, m − g)`, which
/// never is. Both couplings are doubly G-astic and every sweep pushes the
/// values further down, so α(t) settles at `g > 0`.
pub fn sinking_pair<T: Scalar>(gap: f64) -> Result<TradeNetwork<T>> {
    if !(gap.is_finite() && gap > 0.0) {
        return Err(Error::InvalidConfig(format!("gap must be positive, got {gap}")));
    }
    let flat = TropicalMatrix::filled(2, 2, Semiring::MaxPlus, ExtendedReal::zero())?;
    let tilted = TropicalMatrix::from_f64_rows(Semiring::MaxPlus, &[&[0.0, -gap], &[-gap, -2.0 * gap]])?;
    crate::network::NetworkBuilder::new(2, 2)
        .edge(0, 1, flat, tilted, T::zero())
        .build()
}

/// Draws a finite initial state with i.i.d. uniform entries.
pub fn random_state<T: Scalar>(
    n_agents: usize,
    n_alternatives: usize,
    range: Interval,
    seed: u64,
) -> Result<GlobalState<T>> {
    let range = Interval::new(range.lo, range.hi)?;
    let blocks = (0..n_agents)
        .map(|u| {
            let mut rng = stream(seed, u as u64);
            (0..n_alternatives)
                .map(|_| ExtendedReal::Finite(T::from_f64_lossy(range.sample(&mut rng))))
                .collect::<Vector<T>>()
        })
        .collect();
    GlobalState::new(blocks)
}
