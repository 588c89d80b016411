//! Symmetric informationally complete POVMs of arbitrary rank.
//!
//! The displacement-operator algebra lives in [`wh_group`], Bloch-body
//! geometry in [`bloch`], general SI-POVM construction and certification in
//! [`povm`], Weyl-Heisenberg covariant constructions in [`wh_covariant`],
//! numerical SIC search in [`sic_search`] and the odd-dimensional Wigner
//! function in [`wigner`]. [`codec`] and [`cli`] back the `sicpovm` binary.

pub mod bloch;
pub mod cli;
pub mod codec;
mod error;
pub mod gell_mann;
pub mod linalg;
pub mod optimize;
pub mod povm;
pub mod sic_search;
pub mod wh_covariant;
pub mod wh_group;
pub mod wigner;

pub use error::{Error, Result};
pub use wh_group::{CoefficientTable, GroupContext, GroupIndex};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/weyl-heisenberg.md")]
    mod weyl_heisenberg {}
    #[doc = include_str!("../../../book/src/bloch-body.md")]
    mod bloch_body {}
    #[doc = include_str!("../../../book/src/si-povms.md")]
    mod si_povms {}
    #[doc = include_str!("../../../book/src/covariant.md")]
    mod covariant {}
    #[doc = include_str!("../../../book/src/sic-search.md")]
    mod sic_search {}
    #[doc = include_str!("../../../book/src/wigner.md")]
    mod wigner {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
