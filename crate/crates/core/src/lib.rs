//! Exact computations on finite association schemes: construction and
//! validation, wreath and direct products, Bose–Mesner spectra, automorphism
//! groups and the Schurian property, S-rings over finite groups, and finite
//! truncations of iterated wreath towers.

pub mod autgroup;
pub mod catalog;
pub mod cayley;
pub mod error;
pub mod field;
pub mod io;
pub mod products;
pub mod scheme;
pub mod spectral;
pub mod tower;

pub use error::{Error, Result};
pub use scheme::{check_morphism, validate, Morphism, RelationMatrix, Scheme, ValidationReport};
