//! Timbuk text format and CSV reports.
//!
//! Accepted Timbuk grammar (whitespace and line breaks are free, `#` starts a
//! comment running to the end of the line):
//!
//! ```text
//! Ops <symbol>:<rank> ...
//! Automaton <name>
//! States <state>[:<n>] ...
//! Final States <state> ...
//! Transitions
//! <symbol> -> <state>                       # leaf rule, also `<symbol>() -> <state>`
//! <symbol>(<state>,...,<state>) -> <state>
//! ```

mod report;
mod timbuk;

pub use report::{write_report_csv, REPORT_HEADER};
pub use timbuk::{
    parse_timbuk, parse_timbuk_document, serialize_timbuk, ParseError, TimbukDocument,
};
