//! Max-plus synchronization of decentralized trading networks.

pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod generate;
pub mod io;
pub mod network;
pub mod oracle;
pub mod scalar;
pub mod tropical;

pub use error::{Error, Result};
pub use network::{GlobalState, NetworkBuilder, TradeNetwork, Violation, Warning};
pub use scalar::Scalar;
pub use tropical::{principal_solution, ExtendedReal, Semiring, TropicalMatrix, Vector};

/// The exact rational scalar.
pub type Rational = num_rational::Ratio<i64>;

pub type Ext = ExtendedReal<f64>;
pub type Matrix = TropicalMatrix<f64>;
pub type Values = Vector<f64>;
pub type State = GlobalState<f64>;
pub type Network = TradeNetwork<f64>;
pub type ExactNetwork = TradeNetwork<Rational>;
pub type ExactState = GlobalState<Rational>;
