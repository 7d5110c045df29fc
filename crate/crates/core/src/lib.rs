//! Insertion systems: polymers grown by inserting monomers between
//! complementary ends.

pub mod analyzer;
pub mod constructions;
pub mod enumerator;
pub mod format;
pub mod grammar;
pub mod kinetics;
pub mod model;

pub use model::{
    complement, insertable, Initiator, InsertionSite, InsertionSystem, ModelError, MonomerId,
    MonomerSpec, MonomerType, Polymer, Sign, Symbol,
};
