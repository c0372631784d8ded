//! Exact combinatorics for bordifications of affine loop groups.

pub mod error;
pub mod expq;
pub mod q;
pub mod rootdata;
pub mod weyl;
pub mod parabolic;
pub mod corners;
pub mod orthofam;
pub mod halfplane;
pub mod loopu;
pub mod stability;
pub mod sweep;

pub use error::{Error, Result};
pub use q::Q;
pub use rootdata::{CartanVector, Functional, NodeSet, RootDatum};
