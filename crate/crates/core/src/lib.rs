//! Exact constructions in finite classical polar spaces.
//!
//! The crate builds the quadrics Q+(n,q), Q(n,q), Q−(n,q) and the symplectic
//! spaces W(n,q) over GF(q), q odd, enumerates their generators, and verifies
//! m-ovoids exhaustively. On top of that it implements the Klein
//! correspondence with the tangent-free line spreads of PG(3,q), the glued
//! (q+1)-ovoids of Q+(7,q), and the family of five pairwise disjoint
//! 2-ovoids of Q+(7,3).
//!
//! Every construction ends in a certificate: the histogram of
//! `|generator ∩ set|` over all generators of the ambient space.

pub mod error;
pub mod forms;
pub mod gf;
pub mod io;
pub mod isometry;
pub mod klein;
pub mod linalg;
pub mod ovoids;
pub mod pipelines;
pub mod pointset;
pub mod polarspace;
pub mod projgeom;

pub use error::{Error, Result};
pub use gf::{Elem, FieldCtx};
pub use pointset::PointSet;
pub use polarspace::PolarSpace;
