//! Guide chapters as doc-tests. `mdbook test` cannot link against workspace
//! crates, so each chapter is included here and `cargo test --doc` runs it.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/conventions.md")]
pub mod conventions {}

#[doc = include_str!("../../../book/src/potential.md")]
pub mod potential {}

#[doc = include_str!("../../../book/src/matrices.md")]
pub mod matrices {}

#[doc = include_str!("../../../book/src/polynomials.md")]
pub mod polynomials {}

#[doc = include_str!("../../../book/src/microstates.md")]
pub mod microstates {}

#[doc = include_str!("../../../book/src/entropy.md")]
pub mod entropy {}

#[doc = include_str!("../../../book/src/covering.md")]
pub mod covering {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
