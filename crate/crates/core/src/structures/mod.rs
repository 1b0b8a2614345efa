//! Structural correspondences: shearfree decompositions, geodesic factors,
//! contact and CR data.

pub mod contact;
pub mod cr;
pub mod shearfree;

pub use contact::{reeb_field, reeb_field_at, twisting_degree, twisting_degree_at};
pub use cr::{cr_from_subriemannian, nijenhuis_tensor, CrData};
pub use shearfree::{
    geodesic_factor, shearfree_decompose, standardize_pair, GeodesicFactor, ShearfreeDecomposition, Standardization,
};
