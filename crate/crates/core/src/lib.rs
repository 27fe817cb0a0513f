//! Secure linear network coding on acyclic single-source multicast networks.
//!
//! The pipeline: parse a [`Network`], build an `n`-dimensional
//! [`GlobalCode`] with `n = C_min`, mix it with an invertible matrix whose
//! leading columns avoid every wiretap span ([`SecureCodeBundle`]), then
//! encode `[message | constant | key]` inputs onto channels. The [`oracle`]
//! module checks the resulting security and decodability claims by
//! exhaustive enumeration.

pub mod cli;
pub mod field;
pub mod lnc;
pub mod network;
pub mod oracle;
pub mod secure;

pub use field::{FieldSpec, Matrix, Symbol};
pub use lnc::GlobalCode;
pub use network::{Network, WiretapCollection};
pub use secure::SecureCodeBundle;
