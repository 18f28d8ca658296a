//! Homology over Z/p, persistence diagrams of simplicial-map towers and the
//! bottleneck distance.

mod bottleneck;
mod diagram;
mod field;
mod homology;
mod oracle;
mod telescope;

pub use bottleneck::{bottleneck, bottleneck_dims, DimDistance};
pub use diagram::{Bar, PersistenceDiagram};
pub use field::Field;
pub use homology::{homology_basis, induced_map, HomologyBasis};
pub use oracle::{oracle_diagram, persistence_module, PersistenceModule};
pub use telescope::{telescope, tower_diagram, tower_diagrams, Telescope};

/// Default coefficient field.
pub const DEFAULT_PRIME: u32 = 2;
