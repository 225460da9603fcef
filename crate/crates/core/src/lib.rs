//! Reduction of nondeterministic top-down tree automata.
//!
//! The crate computes downward and upward lookahead simulations, uses them to
//! prune transitions and quotient states ([`reduce::heavy`]), adds
//! language-neutral transitions by saturation ([`saturate::sat1`],
//! [`saturate::sat2`]), and complements small automata by determinization.
//! A brute-force [`oracle`] certifies language preservation on small inputs.
//!
//! ```
//! use tareduce::{io, reduce};
//!
//! let a = io::parse_timbuk(
//!     "Ops a:2 b:0
//!      Automaton A
//!      States q0 q1 q2
//!      Final States q0
//!      Transitions
//!      b -> q1  b -> q2
//!      a(q1,q2) -> q0  a(q2,q1) -> q0",
//! )
//! .unwrap();
//! let r = reduce::heavy(&a, 1, 1);
//! assert_eq!(r.state_count(), 2);
//! assert!(tareduce::oracle::bounded_equiv(&a, &r, 4));
//! ```

pub mod automaton;
pub mod complement;
pub mod error;
pub mod experiment;
pub mod generator;
pub mod io;
pub mod oracle;
pub mod reduce;
pub mod relation;
pub mod saturate;
pub mod simulation;
pub mod tree;
mod util;

pub use automaton::{
    remove_useless, stats, AutomatonBuilder, RankedAlphabet, StateId, Stats, Symbol, SymbolId,
    Transition, TreeAutomaton, Violation,
};
pub use error::{ComplementError, Error, ModelError, RelationError, SaturationError};
pub use relation::Relation;
pub use tree::Tree;
