//! Shared proptest strategies. Every finite number is a multiple of 1/4 in a
//! small range, so `f64` arithmetic on them is exact and can be compared
//! bit-for-bit with `Ratio<i64>`.

#![allow(dead_code)]

use maxplus_sync::{ExtendedReal, GlobalState, NetworkBuilder, Scalar, Semiring, TradeNetwork, TropicalMatrix, Vector};
use proptest::prelude::*;

/// Quarter units; `None` is `-inf`.
pub type Q = Option<i32>;

pub fn ext<T: Scalar>(q: Q) -> ExtendedReal<T> {
    match q {
        Some(k) => ExtendedReal::Finite(T::from_f64_lossy(f64::from(k) / 4.0)),
        None => ExtendedReal::NegInf,
    }
}

pub fn quarter(lo: i32, hi: i32) -> impl Strategy<Value = Q> {
    (lo..=hi).prop_map(Some)
}

/// Mostly finite, occasionally `-inf`.
pub fn quarter_or_bottom(lo: i32, hi: i32) -> impl Strategy<Value = Q> {
    prop_oneof![6 => quarter(lo, hi), 1 => Just(None)]
}

pub fn matrix<T: Scalar>(rows: usize, cols: usize, data: &[Q]) -> TropicalMatrix<T> {
    TropicalMatrix::new(rows, cols, Semiring::MaxPlus, data.iter().map(|&q| ext(q)).collect()).unwrap()
}

pub fn vector<T: Scalar>(data: &[Q]) -> Vector<T> {
    data.iter().map(|&q| ext(q)).collect()
}

pub fn matrix_data(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec(quarter_or_bottom(-12, 12), rows * cols)
}

pub fn vector_data(len: usize) -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec(quarter_or_bottom(-16, 16), len)
}

pub fn finite_vector_data(len: usize) -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec(quarter(-16, 16), len)
}

/// `(m, n, A, x, y)` with `A` m×n and `x`, `y` of length n.
pub fn matrix_and_two_vectors() -> impl Strategy<Value = (usize, usize, Vec<Q>, Vec<Q>, Vec<Q>)> {
    (1usize..=4, 1usize..=4)
        .prop_flat_map(|(m, n)| (Just(m), Just(n), matrix_data(m, n), vector_data(n), vector_data(n)))
}

/// `(u, v, A_uv, A_vu, W_uv)`.
pub type EdgeSpec = (usize, usize, Vec<Q>, Vec<Q>, i32);

/// A network description independent of the scalar type.
#[derive(Clone, Debug)]
pub struct NetSpec {
    pub n: usize,
    pub d: usize,
    pub edges: Vec<EdgeSpec>,
}

impl NetSpec {
    pub fn build<T: Scalar>(&self) -> TradeNetwork<T> {
        let mut b = NetworkBuilder::new(self.n, self.d);
        for (u, v, a_uv, a_vu, w) in &self.edges {
            let w = T::from_f64_lossy(f64::from(*w) / 4.0);
            b = b.edge(*u, *v, matrix(self.d, self.d, a_uv), matrix(self.d, self.d, a_vu), w);
        }
        b.build().unwrap()
    }
}

/// 2..=5 agents, 1..=3 alternatives, each pair an edge with probability
/// one half; couplings may contain `-inf`, weights lie in [0, 2].
pub fn network() -> impl Strategy<Value = NetSpec> {
    (2usize..=5, 1usize..=3).prop_flat_map(|(n, d)| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let k = pairs.len();
        (
            prop::collection::vec(any::<bool>(), k),
            prop::collection::vec((matrix_data(d, d), matrix_data(d, d), 0i32..=8), k),
        )
            .prop_map(move |(keep, data)| NetSpec {
                n,
                d,
                edges: pairs
                    .iter()
                    .zip(keep)
                    .zip(data)
                    .filter(|((_, keep), _)| *keep)
                    .map(|((&(u, v), _), (a, b, w))| (u, v, a, b, w))
                    .collect(),
            })
    })
}

pub fn state<T: Scalar>(d: usize, data: &[Q]) -> GlobalState<T> {
    GlobalState::new(data.chunks(d).map(vector).collect()).unwrap()
}

/// A network with two states on it.
pub fn network_and_states(finite: bool) -> impl Strategy<Value = (NetSpec, Vec<Q>, Vec<Q>)> {
    network().prop_flat_map(move |spec| {
        let len = spec.n * spec.d;
        let s = if finite {
            finite_vector_data(len).boxed()
        } else {
            vector_data(len).boxed()
        };
        let t = if finite {
            finite_vector_data(len).boxed()
        } else {
            vector_data(len).boxed()
        };
        (Just(spec), s, t)
    })
}
