//! Finite categories, sieves, Grothendieck topologies and sheaves, decided by
//! exhaustive search.
//!
//! Everything is finite and explicit: a category is a composition table, a
//! presheaf is a family of restriction tables between integer ranges, and a
//! sieve is a bitset over the global morphism id space.

pub mod bitset;
pub mod category;
pub mod epi;
pub mod error;
pub mod functor;
pub mod limits;
pub mod presheaf;
pub mod report;
pub mod sheaf;
pub mod sieve;
pub mod topology;
pub mod transport;
pub mod workbench;

pub use category::{validate_category, Caps, FinCat, FinCatBuilder, MorId, ObjId};
pub use error::{Error, Result};
pub use functor::FinFunctor;
pub use presheaf::Presheaf;
pub use report::ValidationReport;
pub use sheaf::Budget;
pub use sieve::{Presieve, Sieve};
pub use topology::{Coverage, GrothTopology};
