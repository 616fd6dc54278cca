//! XOR protocols over nonlocal boxes: box models, protocol trees, the
//! standard constructions, exact bias evaluation and Monte Carlo sampling.

pub mod anf;
pub mod boxes;
pub mod builders;
pub mod exact;
pub mod expr;
pub mod montecarlo;
pub mod tree;

pub use boxes::{GeneralBox, IsotropicBox};
pub use builders::{
    adaptive_protocol, addr_protocol, base_protocol, brassard_maj3, builtin, nonadaptive_from_decomposition,
    nonadaptive_protocol, AdaptivePlan,
};
pub use exact::{exact_bias, is_pr_correct, residual, residual_symbolic_alice, InputDist};
pub use expr::Expr;
pub use montecarlo::{monte_carlo_bias, McEstimate};
pub use tree::{BoxInputs, ProtocolFile, ProtocolTree};
