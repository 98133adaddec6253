//! Noncrossing partitions, chain systems and Garside checks for finite and affine Coxeter data.

pub mod chain_system;
pub mod group;
pub mod labeled_poset;
pub mod linalg;
pub mod report;
pub mod root_datum;
pub mod finite_nc;
pub mod affine_mcsul;
pub mod tube_combinatorics;
pub mod annulus_model;
