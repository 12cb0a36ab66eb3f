//! Transversal XOR games and the share-splitting two-prover protocol.
//!
//! - [`gf2`]: bit vectors over GF(2) and the Walsh-Hadamard transform.
//! - [`games`]: the game model, its offset weights and spectral value.
//! - [`strategies`]: deterministic, linear and entangled provers with exact
//!   evaluators and a brute-force classical oracle.
//! - [`pcp`]: weighted 3-LIN instances and their reduction to games.
//! - [`protocol`]: seeded round-by-round simulation.
//! - [`check`]: the property suites run by `xorproof check`.

pub mod check;
pub mod cli;
pub mod error;
pub mod games;
pub mod gf2;
pub mod pcp;
pub mod protocol;
pub mod rng;
pub mod strategies;

pub use error::{Error, Result};
pub use games::{analyze, GameAnalysis, GameClause, TransversalGame};
pub use gf2::BitVector;
pub use pcp::{Equation, ThreeLinInstance, Witness};
pub use protocol::{Prover, ProtocolTranscript};
pub use rng::RngState;
pub use strategies::{DeterministicStrategy, LinearStrategy, QuantumStrategy};
