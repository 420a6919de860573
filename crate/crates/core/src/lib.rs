//! Exact-arithmetic toolkit for limit mixed Hodge structures on products of
//! punctured disks: nilpotent orbits, monodromy weight filtrations, the
//! intersection and Koszul complexes of a commuting nilpotent family, the
//! cohomology-class map for normal-function extensions, and the one-parameter
//! deformation family with its symbolic certificates.
//!
//! All linear algebra is exact (rationals and Gaussian rationals); numerics
//! appear only in the positivity sampler, which evaluates symbolic frames at
//! explicit points of the punctured disk.

pub mod cohomology;
pub mod deformation;
pub mod linalg;
pub mod mhs;
pub mod orbits;
pub mod params;
pub mod random;
pub mod scalars;
pub mod scenario;

pub use scalars::{Field, Gauss, Rational};
