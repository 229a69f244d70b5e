//! Holonomy representations of the Euclidean turnover groups in SL(4,R):
//! families, twisted cohomology, trace coordinates and cusp classification.

pub mod atlas;
pub mod character;
pub mod cohomology;
pub mod cusp;
pub mod group;
pub mod linalg;
pub mod report;
