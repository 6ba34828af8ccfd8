//! Weighted spherical designs built from generalized corner-vector orbits of
//! the hyperoctahedral group `B_n`: exact construction, verification,
//! classification and parameter search, with cross-checks through Hilbert
//! identities, simplicial cubature and integral-lattice shells.

pub mod scalars;
pub mod qpoly;
pub mod orbits;
pub mod moments;
pub mod harmonics;
pub mod design;
pub mod search;
pub mod hilbert;
pub mod simplex;
pub mod lattice;
pub mod corpus;
