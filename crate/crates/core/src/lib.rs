//! Quadratic-form invariants over recursively described field towers.
//!
//! The crate has two halves that check each other. The symbolic half
//! ([`descriptor`], [`calculus`], [`graphs`]) computes the m- and
//! u-invariants and the full set of dimensions of anisotropic universal
//! forms for fields described by a small recursive algebra (bases, complete
//! discretely valued layers, rational function fields, semi-global fields
//! with regular-model data). The concrete half ([`forms`], [`oracle`])
//! decides isotropy and universality exactly over F_p((t_1))...((t_r)) by
//! square-class arithmetic and uniformizer descent, and re-derives every
//! claim by brute-force vector search and Hensel-certified witnesses.
//!
//! All values are immutable and all operations are pure functions, so
//! everything here is `Send + Sync` without further coordination.

pub mod calculus;
pub mod descriptor;
pub mod dsl;
pub mod error;
pub mod forms;
pub mod graphs;
pub mod laurent;
pub mod oracle;

pub use calculus::{au_set, m_invariant, possible_m, u_invariant};
pub use descriptor::{AuSet, BaseClass, FieldDescriptor, InvariantValue, ValidityReport};
pub use dsl::{parse_field, parse_field_unchecked};
pub use error::Error;
pub use forms::{ClassForm, SquareClass, Tower};
pub use graphs::{
    attainable_au, build_component_tree, layer, m_from_layer, make_layer_example,
    ComponentField, Model, ReductionGraph, RootedComponentTree,
};
pub use laurent::{LaurentElement, Val};
pub use oracle::{
    cross_validate, fp_isotropy_witness, verify_certificate, witness_search, HenselCertificate,
    SampleMode, SearchResult, ValidationReport,
};
