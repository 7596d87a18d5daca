//! Allen's interval algebra with Horn-DLR metric constraints on starting
//! or ending points: the eight maximal tractable subalgebras, a polynomial
//! decision procedure producing exact rational models, and brute-force
//! oracles to check it against.

pub mod catalog;
pub mod closure;
pub mod composition;
pub mod dlr;
pub mod instance;
pub mod oracle;
pub mod point_algebra;
pub mod relation;
pub mod relation_set;
pub mod solver;
pub mod text;

/// Exact rational numbers used throughout.
pub type Rational = num_rational::BigRational;

/// The guide's chapters, compiled so their snippets run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/relations.md")]
    mod relations {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/catalog.md")]
    mod catalog {}
    #[doc = include_str!("../../../book/src/closure.md")]
    mod closure {}
    #[doc = include_str!("../../../book/src/horn-dlr.md")]
    mod horn_dlr {}
    #[doc = include_str!("../../../book/src/point-algebra.md")]
    mod point_algebra {}
    #[doc = include_str!("../../../book/src/solver.md")]
    mod solver {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
