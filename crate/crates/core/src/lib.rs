pub mod centralizer;
pub mod descriptor;
pub mod error;
pub mod exact;
pub mod fixtures;
pub mod forge;
pub mod json;
pub mod nilpotent;
pub mod spectral;
pub mod structure;
pub mod toral;
pub mod verify;

pub use error::{Error, Result};

pub use descriptor::SystemDescriptor;
pub use exact::{Int, IntMatrix, IntPoly, Rat, RatMatrix};
pub use spectral::{classify, ClassificationVerdict, HierarchyTag};
pub use toral::{AffineToralMap, SymReal, SymbolContext};
