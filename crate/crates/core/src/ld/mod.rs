//! The linear-deterministic (LD) interference relay channel.
//!
//! Signals are binary columns of `q` levels (level 1 on top), channels are
//! down-shifts and superposition is XOR. On top of the channel algebra this
//! module runs the block-Markov scheme that combines cooperative
//! interference neutralization (CN), compute-forward (CF) and
//! decode-forward (DF), with a causal relay and backward decoding.

mod allocation;
mod channel;
mod engine;
mod gf2;
mod search;
mod sim;

pub use allocation::{
    construct_allocation, toy_allocation, validate_allocation, Allocation, Node, RelayLayout,
    TxLayout, ValidationFailure, ValidationReport,
};
pub use channel::{
    relay_rx, render_column, rx_signal, shift_apply, BitVector, Gf2, LdParams, LevelVector,
};
pub use gf2::{Gf2System, LinearForm};
pub use search::{search_allocation, SearchOutcome};
pub use sim::{
    simulate, simulate_traced, simulate_unchecked, BlockTrace, CategoryCounts, RelayNode,
    SimReport, SimTrace,
};
