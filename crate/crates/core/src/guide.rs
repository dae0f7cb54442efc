//! The project guide, compiled from `book/src/` so that every code snippet
//! in the book runs under `cargo test --doc` and cannot drift from the API.
//! Render the same chapters to HTML with `mdbook build book`.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/networks.md")]
pub mod networks {}

#[doc = include_str!("../../../book/src/mass-action.md")]
pub mod mass_action {}

#[doc = include_str!("../../../book/src/tree-constants.md")]
pub mod tree_constants {}

#[doc = include_str!("../../../book/src/toric-locus.md")]
pub mod toric_locus {}

#[doc = include_str!("../../../book/src/product-structure.md")]
pub mod product_structure {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
