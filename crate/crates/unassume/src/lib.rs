//! Witness-guided abstract interpreter for MiniC.
//!
//! The library analyzes small C-like programs with interval or octagon
//! domains, consumes YAML correctness witnesses, injects their invariants
//! through unassume operators, and validates the witnesses abstractly.

pub mod ast;
pub mod cfg;
pub mod cli;
pub mod env;
pub mod hc4;
pub mod octagon;
pub mod oracle;
pub mod parser;
pub mod solver;
pub mod validator;
pub mod value;
pub mod witness;
