//! Type checker for CaTT extended with coinductive invertibility structures.

pub mod builders;
pub mod elaborate;
pub mod equiv_analysis;
pub mod error;
pub mod frontend;
pub mod inverse;
pub mod kernel;
pub mod meta;
pub mod normalize;
pub mod ps;
pub mod syntax;

pub use error::{Error, ErrorKind, Result};
