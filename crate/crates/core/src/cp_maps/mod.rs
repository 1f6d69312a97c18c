//! Representations of linear maps between truncated operator spaces:
//! Kraus lists, Choi block matrices and evaluable oracles, with conversions
//! among them.

mod choi;
mod kraus;
mod oracle;

pub use choi::{kraus_from_choi, ChoiBlockMatrix, DEFAULT_RANK_TOL};
pub use kraus::{choi_from_kraus, KrausMap};
pub use oracle::{choi_from_oracle, BuiltinFamily, BuiltinMap, MapOracle};
