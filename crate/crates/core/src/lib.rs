pub mod cocycle;
pub mod dedekind;
pub mod eisenstein;
pub mod error;
pub mod hecke;
pub mod hyperbolic;
pub mod lseries;
pub mod mp;
pub mod quadfield;
pub mod relation;
pub mod special;
pub mod suites;

pub use eisenstein::{ConstantsSnapshot, Evaluator, Lattice, LatticeConstants, SeriesParams};
pub use error::{Error, Result};
pub use hyperbolic::Point3;
pub use quadfield::{Level, Mat2, OrderSpec, QuadInt};
