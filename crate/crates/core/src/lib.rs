//! Exact vertex-operator construction of Jack symmetric functions.
//!
//! Layers, bottom up: [`exactscalar`] (rationals and `Q(α)`), [`partitions`],
//! [`symfunc`] (the α-deformed ring and Jack functions), [`fock`] (the
//! bosonic Fock space), [`vertexops`] (modes and their products),
//! [`contraction`] (normal-ordering series) and [`verify`] (suites behind
//! the command line).

pub mod cache;
pub mod contraction;
pub mod exactscalar;
pub mod fock;
pub mod linalg;
pub mod partitions;
pub mod symfunc;
pub mod verify;
pub mod vertexops;

pub use exactscalar::{BigRational, Coeff, ExactError, RatFn};
pub use fock::FockVector;
pub use partitions::Partition;
pub use symfunc::{Basis, SymFunc, SymRing};
pub use vertexops::ProductMethod;

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/scalars.md")]
    pub mod scalars {}
    #[doc = include_str!("../../../book/src/partitions.md")]
    pub mod partitions {}
    #[doc = include_str!("../../../book/src/symmetric-functions.md")]
    pub mod symmetric_functions {}
    #[doc = include_str!("../../../book/src/fock-space.md")]
    pub mod fock_space {}
    #[doc = include_str!("../../../book/src/vertex-operators.md")]
    pub mod vertex_operators {}
    #[doc = include_str!("../../../book/src/basis.md")]
    pub mod basis {}
    #[doc = include_str!("../../../book/src/rectangular.md")]
    pub mod rectangular {}
    #[doc = include_str!("../../../book/src/contraction.md")]
    pub mod contraction {}
    #[doc = include_str!("../../../book/src/verification.md")]
    pub mod verification {}
}
