#![allow(clippy::result_large_err, clippy::large_enum_variant, clippy::needless_range_loop)]

pub mod algebra;
pub mod bundle;
pub mod correction;
pub mod expr;
pub mod fixtures;
pub mod iso;
pub mod linalg;
pub mod report;
pub mod scalars;
pub mod sector;
pub mod snf;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/scalars.md")]
    mod scalars {}
    #[doc = include_str!("../../../book/src/algebras.md")]
    mod algebras {}
    #[doc = include_str!("../../../book/src/correction.md")]
    mod correction {}
    #[doc = include_str!("../../../book/src/sectors.md")]
    mod sectors {}
    #[doc = include_str!("../../../book/src/iso.md")]
    mod iso {}
    #[doc = include_str!("../../../book/src/bundle-format.md")]
    mod bundle_format {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
