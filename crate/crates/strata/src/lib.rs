//! Classification of strata of extended affine Weyl group arrangements.
//!
//! The quotient of complexified Euclidean space by an extended affine Weyl
//! group `K ⋉ W_aff` is stratified by the images of flats of the reflection
//! arrangement. This crate computes, for each stratum:
//!
//! * its Coxeter class Σ (the set of alcove faces lying over the stratum),
//! * unibranchedness at the minimal (vertex) strata,
//! * normality in codimension one,
//! * normality, both through a generic local pipeline and through closed-form
//!   per-isogeny classifiers,
//! * smoothness where it is determined by normality.
//!
//! Two independent oracles back the combinatorics: an exact-rational geometric
//! model of the alcove and group ball ([`geom`]), and an invariant-theoretic
//! falsifier based on Molien series and restriction maps ([`invariants`]).
//!
//! All arithmetic is exact. Group elements are integer affine maps in
//! fundamental-coweight coordinates, flats and invariants use arbitrary
//! precision rationals. There are no tolerances anywhere.

pub mod classify;
pub mod coxclass;
pub mod diagram;
pub mod geom;
pub mod invariants;
pub mod linalg;
pub mod rootsys;
pub mod tables;

use thiserror::Error;

/// Exact scalar used for flats, stabilizers and invariant theory.
pub type Rat = num_rational::BigRational;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid rank {rank} for family {family}")]
    InvalidRank { family: char, rank: usize },
    #[error("subset is not of finite type: {0}")]
    NotFiniteType(String),
    #[error("isogeny selector {selector} is not valid for type {cartan}")]
    UnsupportedIsogeny { selector: String, cartan: String },
    #[error("(type, isogeny) pair not covered by the closed-form classifier: {0}")]
    UnsupportedCase(String),
    #[error("node {node} lies in every member of the class: vertex condition is vacuous")]
    VacuousVertex { node: usize },
    #[error("malformed subset: {0}")]
    MalformedSubset(String),
    #[error("resource budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

// Everything is immutable value data after construction; classification is
// pure functions over it, so all core types are freely shared across workers.
#[cfg(test)]
mod concurrency_contract {
    fn assert_shareable<T: Send + Sync>() {}

    #[test]
    fn core_types_are_send_and_sync() {
        assert_shareable::<crate::rootsys::RootSystem>();
        assert_shareable::<crate::diagram::ExtendedDiagram>();
        assert_shareable::<crate::diagram::IsogenyAction>();
        assert_shareable::<crate::diagram::Subdiagram>();
        assert_shareable::<crate::coxclass::CoxeterClass>();
        assert_shareable::<crate::classify::Stratum>();
        assert_shareable::<crate::classify::StratumReport>();
        assert_shareable::<crate::geom::EuclideanModel>();
        assert_shareable::<crate::geom::Flat>();
        assert_shareable::<crate::invariants::MatrixGroup>();
    }
}
