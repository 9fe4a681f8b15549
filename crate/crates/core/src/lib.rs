//! Arrangements of pseudocircles represented by signed intersection codes.
//!
//! The crate provides the code data model and its algebra ([`codes`]), code
//! matching and canonical forms ([`isomorphism`]), the canonical families
//! and classifying predicates ([`families`]), wiring diagrams of pseudoline
//! arrangements with the doubling construction ([`pseudolines`]), geometric
//! ingestion of plane circles ([`geometry`]), monochromatic-subset search
//! ([`ramsey`]), and the certified extraction pipeline that finds an
//! unavoidable subarrangement in any valid input ([`extraction`]).

pub mod codes;
pub mod extraction;
pub mod families;
pub mod format;
pub mod geometry;
pub mod isomorphism;
pub mod pseudolines;
pub mod ramsey;

pub use codes::{Arrangement, ArcView, Label, Sign, SignedCode, ValidationReport};
pub use families::{Family, FamilyId, TripleClass};
pub use isomorphism::{Certificate, Transform};
pub use pseudolines::WiringDiagram;
