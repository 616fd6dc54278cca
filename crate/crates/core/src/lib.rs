//! Nonlocal boxes, XOR protocols and bias amplification for boolean functions.
//!
//! Modules follow the data flow: [`boolfn`] holds truth tables and Fourier
//! spectra, [`f2linalg`] provides rank and factorization over F₂, [`nlbc`]
//! turns a two-party function into its nonlocal box complexity, [`commcx`]
//! computes one-way communication complexities, [`protocol`] builds and
//! evaluates XOR protocols over isotropic boxes, [`amplify`] analyses bias
//! amplification and [`search`] runs the exhaustive small-`n` census.
//!
//! Data-parallel loops run on rayon when the `parallel` feature is enabled
//! (the default) and sequentially otherwise; results are identical either way.

pub mod amplify;
pub mod boolfn;
pub mod commcx;
pub mod error;
pub mod f2linalg;
pub mod nlbc;
pub mod par;
pub mod protocol;
pub mod rational;
pub mod search;
pub mod twoparty;

pub use boolfn::{FourierSpectrum, TruthTable};
pub use error::{Error, Result};
pub use f2linalg::F2Matrix;
pub use twoparty::TwoPartyFunction;

/// Schema tag carried by every serialized report.
pub const SCHEMA: &str = "nlbox-lab/1";
