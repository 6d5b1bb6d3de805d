//! Entanglement production of prospect operators.
//!
//! A prospect state is a complex coefficient tensor over the tensor product of
//! per-action mode spaces. Its prospect operator `|π⟩⟨π|` is compared against
//! the product of its partial traces, and the log-ratio of their restricted
//! norms over product states measures how much entanglement the operator
//! produces. The restricted norm is computed both by a closed form and by an
//! alternating ascent over product states, with an independent sampling
//! oracle for cross-checking.

pub mod cli;
pub mod error;
pub mod file;
pub mod linalg;
pub mod measure;
pub mod oracle;
pub mod prospect;
pub mod reduction;
pub mod state;
pub mod subnorm;

pub use error::{QdtError, Result};
pub use measure::{
    entanglement_production, maximal_entanglement, multimode_entanglement, EntanglementReport,
    LogBase, Method,
};
pub use oracle::{compare_methods, oracle_subnorm, DiscrepancyReport, OracleOptions, OracleResult};
pub use prospect::{
    enumerate_elementary, validate_lattice, Action, ActionMode, ActionRing, LatticeReport,
    MultiIndex, ProspectLattice, Relation,
};
pub use reduction::{
    nonentangling_operator, partial_trace, trace_full, verify_trace_identities,
    NonentanglingOperator, ReducedOperator, TraceIdentityReport,
};
pub use state::{
    apply_operator, make_bell_state, make_factor_state, make_multicat_state, make_multimode_state,
    overlap, strategic_normalization_check, Amplitude, Applied, CoefficientTensor,
    NormalizationCheck, ProspectOperator, ProspectState, StrategicState,
};
pub use subnorm::{
    mode_operator_norm, subnorm_formula, subnorm_nonentangling, subnorm_variational, FactorPoint,
    OptimizerOptions, SubnormResult,
};
