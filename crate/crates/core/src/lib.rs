//! Root structure of real polynomials with sparse exponents.
//!
//! A polynomial `x + y_1 t^{k_1} + ... + y_L t^{k_L}` has its roots arranged in
//! tiers of comparable magnitude, read off from coefficient ratios. This crate
//! computes those height estimates and tiers, cluster bounds, a covering of the
//! roots by cells, and a rough factorisation with one factor per tier, and it
//! checks each claim against an independent numerical root finder.

pub mod corpus;
pub mod covering;
pub mod error;
pub mod factorization;
pub mod heights;
pub mod io;
pub mod oracle;
pub mod oscillatory;
pub mod poly;
pub mod selftest;
pub mod series;
pub mod tiers;

pub use error::{Error, Result};
pub use heights::{estimate_heights, newton_polygon_heights, HeightProfile};
pub use oracle::{find_roots, polish_root, RootFindConfig};
pub use poly::{
    deflate_zero_roots, elementary_symmetric, evaluate, index_table, vieta_check, IndexTable, RootMultiset,
    SparsePolynomial,
};
