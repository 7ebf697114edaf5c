//! Runs the Rust blocks of the guide under `book/src` and of the README as
//! doc-tests, one module per chapter so a failure points at its chapter.

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
mod introduction {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/basis.md")]
mod basis {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/state.md")]
mod state {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/derivatives.md")]
mod derivatives {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/control.md")]
mod control {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/verification.md")]
mod verification {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/files.md")]
mod files {}
