//! Shared fixtures for the criterion benches.

use drb_core::{Lattice, LatticeConstants, OrderSpec};

pub fn z_sqrt_m2() -> OrderSpec {
    OrderSpec::maximal(-8).expect("disc -8 is supported")
}

/// Constants for the standard lattice of `Z[√−2]`.
pub fn constants(prec: u32) -> LatticeConstants {
    LatticeConstants::new(&Lattice::standard(z_sqrt_m2(), prec)).expect("constants")
}
