pub mod analysis;
pub mod catalog;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod network;
pub mod stability;

pub use error::{Error, Result};

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
mod book_introduction {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/networks.md")]
mod book_networks {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/dynamics.md")]
mod book_dynamics {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/stability.md")]
mod book_stability {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cycles.md")]
mod book_cycles {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/uniqueness.md")]
mod book_uniqueness {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
