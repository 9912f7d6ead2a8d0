//! A desk-scale workbench for Weihrauch reducibility.
//!
//! Points of Baire space are finitely presented ([`baire::Point`]), machines
//! are monotone word functions ([`machine::Machine`]), problems are semantic
//! multi-valued maps with decidable domains ([`problems::Problem`]) and
//! reductions are checkable witness records ([`witnesses::Witness`]).

pub mod baire;
pub mod machine;
pub mod spaces;
pub mod problems;
pub mod witnesses;
pub mod ternary;
pub mod wkl;
pub mod weakcomp;
pub mod limitmachine;
pub mod medvedev;
pub mod suite;
