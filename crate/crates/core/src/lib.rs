//! Endomorphisms of finite groups viewed as finite dynamical systems.
//!
//! The guide in `book/` walks through the modules; its examples run as
//! doctests of this crate.

pub mod arith;
pub mod census;
pub mod dynamics;
pub mod error;
pub mod group;
pub mod realization;
pub mod spec_file;
pub mod state_graph;
pub mod verify;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/groups.md")]
    mod groups {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    mod dynamics {}
    #[doc = include_str!("../../../book/src/state-spaces.md")]
    mod state_spaces {}
    #[doc = include_str!("../../../book/src/realization.md")]
    mod realization {}
    #[doc = include_str!("../../../book/src/census.md")]
    mod census {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
