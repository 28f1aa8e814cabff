//! Exact chain-complex algebra over group algebras `F_p[G]` of finite groups.

pub mod complex;
pub mod error;
pub mod group;
pub mod hom;
pub mod idempotent;
pub mod json;
pub mod homotopy;
pub mod lattice;
pub mod linalg;
pub mod postnikov;
pub mod report;
pub mod verify;

pub use error::{Error, Result};

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/complexes.md")]
    mod complexes {}
    #[doc = include_str!("../../../book/src/resolutions.md")]
    mod resolutions {}
    #[doc = include_str!("../../../book/src/hom.md")]
    mod hom {}
    #[doc = include_str!("../../../book/src/idempotents.md")]
    mod idempotents {}
    #[doc = include_str!("../../../book/src/tate.md")]
    mod tate {}
    #[doc = include_str!("../../../book/src/decompositions.md")]
    mod decompositions {}
    #[doc = include_str!("../../../book/src/verdicts.md")]
    mod verdicts {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
