//! Horn disjunctive linear relations over exact rationals.

mod linear;
mod sat;
mod simplex;

pub use linear::{Dlr, DlrError, HornDlr, LinearOp, LinearPolynomial, LinearRelation, PointForm, Var};
pub use sat::{entails_equality, horn_dlr_sat, lp_feasible, value_of, Assignment, HornOutcome, LpFeasibility, SatError};
