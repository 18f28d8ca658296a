//! Mapper and multiscale mapper for functions on finite simplicial
//! complexes, persistence diagrams of the resulting simplicial-map towers,
//! and the pullback-pseudometric view with its Čech filtration.

pub mod complex;
pub mod cover;
pub mod error;
pub mod experiments;
pub mod io;
pub mod mapper;
pub mod metric;
pub mod par;
pub mod persistence;
pub mod random;
mod serde_inf;
mod union_find;

pub use error::{Error, Result};
