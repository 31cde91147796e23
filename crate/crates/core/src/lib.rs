//! Choosing few obstacles (unit disks or line segments) so that every point
//! of a given set lies in a bounded component of the plane minus them.
//!
//! Geometry is exact: everything is generic over [`Scalar`], a rational
//! number type. The aliases below fix it to arbitrary-precision rationals,
//! which is what the solvers and the command-line tool use.

pub mod arrangement;
pub mod enclosure;
pub mod error;
pub mod exact;
pub mod gen;
pub mod geom;
pub mod instance;
pub mod io;
pub mod lp;
pub mod mincut;
pub mod rounding;
pub mod scalar;
pub mod simplex;
pub mod solution;
pub mod sparsify;
pub mod svg;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Rational = num_rational::BigRational;
pub type Point = geom::Point<Rational>;
pub type Segment = geom::Segment<Rational>;
pub type UnitDisk = geom::UnitDisk<Rational>;
pub type ObstacleSet = enclosure::ObstacleSet<Rational>;
pub type Instance = instance::Instance<Rational>;
