//! JSON documents for instances and states.
//!
//! Infinities are the strings `"inf"` / `"-inf"`, finite entries plain
//! numbers. Agent indices are 0-based on disk.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{GlobalState, TradeNetwork, Violation, Warning};
use crate::scalar::Scalar;
use crate::tropical::{ExtendedReal, MatrixDoc, Semiring, TropicalMatrix, Vector};

#[derive(Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
struct InstanceDoc<T> {
    n_agents: usize,
    n_alternatives: usize,
    edges: Vec<[usize; 2]>,
    #[serde(rename = "A")]
    couplings: BTreeMap<String, MatrixDoc<T>>,
    #[serde(rename = "W")]
    weights: Vec<Vec<ExtendedReal<T>>>,
}

/// A network read from disk together with its diagnostics.
#[derive(Debug)]
pub struct LoadedNetwork<T> {
    pub network: TradeNetwork<T>,
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
}

fn parse_key(key: &str) -> Result<(usize, usize)> {
    let bad = || Error::Format(format!("coupling key `{key}` is not of the form \"u,v\""));
    let (u, v) = key.split_once(',').ok_or_else(bad)?;
    Ok((
        u.trim().parse().map_err(|_| bad())?,
        v.trim().parse().map_err(|_| bad())?,
    ))
}

/// Parses an instance document. Assumption violations are returned as
/// diagnostics, or rejected outright when `strict` is set.
pub fn load_network<T: Scalar>(bytes: &[u8], strict: bool) -> Result<LoadedNetwork<T>> {
    let doc: InstanceDoc<T> = serde_json::from_slice(bytes)?;
    let n = doc.n_agents;
    if doc.weights.len() != n || doc.weights.iter().any(|r| r.len() != n) {
        return Err(Error::Format(format!("W must be a {n}x{n} array")));
    }
    let weights = TropicalMatrix::from_rows(Semiring::MinPlus, doc.weights)?;
    let couplings = doc
        .couplings
        .into_iter()
        .map(|(k, m)| Ok((parse_key(&k)?, TropicalMatrix::from_doc(m, Semiring::MaxPlus)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let edges = doc.edges.into_iter().map(|[u, v]| (u, v));
    let network = TradeNetwork::new(n, doc.n_alternatives, edges, couplings, weights)?;
    let violations = network.validate();
    if strict && !violations.is_empty() {
        return Err(Error::AssumptionViolations(violations));
    }
    let warnings = network.warnings();
    Ok(LoadedNetwork {
        network,
        violations,
        warnings,
    })
}

pub fn save_network<T: Scalar>(net: &TradeNetwork<T>) -> Result<Vec<u8>> {
    let n = net.n_agents();
    let mut couplings = BTreeMap::new();
    for &(u, v) in net.edges() {
        for (a, b) in [(u, v), (v, u)] {
            let m = net.coupling(a, b).expect("edge has both couplings");
            couplings.insert(format!("{a},{b}"), m.to_doc());
        }
    }
    let doc = InstanceDoc {
        n_agents: n,
        n_alternatives: net.n_alternatives(),
        edges: net.edges().iter().map(|&(u, v)| [u, v]).collect(),
        couplings,
        weights: (0..n).map(|u| net.weights().row(u).to_vec()).collect(),
    };
    Ok(serde_json::to_vec_pretty(&doc)?)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct StateDoc<T> {
    n_agents: usize,
    n_alternatives: usize,
    blocks: Vec<Vector<T>>,
}

/// `{"n_agents", "n_alternatives", "blocks": [[...], ...]}`.
pub fn state_to_json<T: Scalar>(x: &GlobalState<T>) -> Result<serde_json::Value> {
    Ok(serde_json::to_value(StateDoc {
        n_agents: x.n_agents(),
        n_alternatives: x.dim(),
        blocks: x.blocks().to_vec(),
    })?)
}

pub fn state_from_json<T: Scalar>(value: serde_json::Value) -> Result<GlobalState<T>> {
    let doc: StateDoc<T> = serde_json::from_value(value)?;
    if doc.blocks.len() != doc.n_agents || doc.blocks.iter().any(|b| b.len() != doc.n_alternatives) {
        return Err(Error::Format(format!(
            "state blocks do not match the declared {}x{} shape",
            doc.n_agents, doc.n_alternatives
        )));
    }
    GlobalState::new(doc.blocks)
}

pub fn save_state<T: Scalar>(x: &GlobalState<T>) -> Result<Vec<u8>> {
    Ok(serde_json::to_vec_pretty(&state_to_json(x)?)?)
}

pub fn load_state<T: Scalar>(bytes: &[u8]) -> Result<GlobalState<T>> {
    state_from_json(serde_json::from_slice(bytes)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{random_instance, random_state, InstanceParams, Interval};

    #[test]
    fn generated_instance_round_trips() {
        let params = InstanceParams {
            n_agents: 7,
            n_alternatives: 3,
            edge_prob: 0.5,
            seed: 3,
            ..InstanceParams::default()
        };
        let net = random_instance::<f64>(&params).unwrap();
        let bytes = save_network(&net).unwrap();
        let loaded = load_network::<f64>(&bytes, true).unwrap();
        assert_eq!(loaded.network, net);
        assert!(loaded.violations.is_empty());
        assert_eq!(save_network(&loaded.network).unwrap(), bytes);
    }

    const TWO_AGENTS: &str = r#"{
        "n_agents": 2, "n_alternatives": 2, "edges": [[0, 1]],
        "A": {"0,1": {"rows": 2, "cols": 2, "data": [0, "-inf", "-inf", 0]},
              "1,0": {"rows": 2, "cols": 2, "data": [-0.5, 1, "-inf", 0]}},
        "W": [["inf", 0.25], [0.25, "inf"]]
    }"#;

    #[test]
    fn parses_sentinels() {
        let loaded = load_network::<f64>(TWO_AGENTS.as_bytes(), true).unwrap();
        let net = loaded.network;
        assert!(net.coupling(0, 1).unwrap().get(0, 1).is_neg_inf());
        assert_eq!(net.coupling(1, 0).unwrap().get(0, 0), ExtendedReal::Finite(-0.5));
        assert!(net.weight(0, 0).is_pos_inf());
        assert_eq!(net.weight(1, 0), ExtendedReal::Finite(0.25));
    }

    #[test]
    fn rejects_wrong_matrix_length() {
        let bad = TWO_AGENTS.replace(r#"[-0.5, 1, "-inf", 0]"#, r#"[-0.5, 1, 0]"#);
        assert!(matches!(
            load_network::<f64>(bad.as_bytes(), false),
            Err(Error::ShapeData { .. })
        ));
    }

    #[test]
    fn rejects_malformed_documents() {
        assert!(load_network::<f64>(b"{", false).is_err());
        let bad_key = TWO_AGENTS.replace("\"1,0\"", "\"1-0\"");
        assert!(matches!(
            load_network::<f64>(bad_key.as_bytes(), false),
            Err(Error::Format(_))
        ));
        let ragged_w = TWO_AGENTS.replace(r#"[0.25, "inf"]]"#, r#"[0.25]]"#);
        assert!(load_network::<f64>(ragged_w.as_bytes(), false).is_err());
    }

    #[test]
    fn strict_mode_rejects_assumption_violations() {
        let bad = TWO_AGENTS.replace(r#"[0, "-inf", "-inf", 0]"#, r#"["-inf", 0, "-inf", 0]"#);
        let lenient = load_network::<f64>(bad.as_bytes(), false).unwrap();
        assert_eq!(
            lenient.violations,
            vec![Violation::EmptyColumn { from: 0, to: 1, col: 0 }]
        );
        assert!(matches!(
            load_network::<f64>(bad.as_bytes(), true),
            Err(Error::AssumptionViolations(_))
        ));
    }

    #[test]
    fn state_round_trip() {
        let x = random_state::<f64>(3, 2, Interval::new(-1.0, 1.0).unwrap(), 8).unwrap();
        let x = x.with_entry(1, 0, ExtendedReal::NegInf).unwrap();
        let bytes = save_state(&x).unwrap();
        assert!(std::str::from_utf8(&bytes).unwrap().contains("\"-inf\""));
        assert_eq!(load_state::<f64>(&bytes).unwrap(), x);
        let top = br#"{"n_agents":1,"n_alternatives":1,"blocks":[["inf"]]}"#;
        assert!(load_state::<f64>(top).is_err());
    }
}
