//! Small-cancellation toolkit: relator words and 2-complexes, piece
//! enumeration and the C'(λ) test, the layered complex built from
//! two-generator C'(1/6) pieces, Dehn's algorithm, and Sageev duals of
//! finite wallspaces.

pub mod complex;
pub mod cubulate;
pub mod dehn;
pub mod error;
pub mod smallcancel;
pub mod words;
pub mod ycomplex;

pub use error::{Error, Result};
