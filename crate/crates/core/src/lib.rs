//! Exact modular data, modular invariants, and the integral identities that
//! constrain them.

pub mod center_fusion;
pub mod characters;
pub mod exact_algebra;
pub mod interface;
pub mod invariant_search;
pub mod modular_data;
pub mod morita_context;
pub mod obstruction;
