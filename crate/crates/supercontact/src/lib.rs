//! Exact computer algebra for the contact geometry of the supercircle
//! S^{1|N}: Grassmann numbers, super-jets, contactomorphism germs, the
//! orthosymplectic group, invariants, cocycles and Cartan expansions.

pub mod error;
pub mod scalar;
pub mod series;
pub mod grassmann;
pub mod superjet;
pub mod random;
pub mod contactmap;
pub mod ospgroup;
pub mod invariants;
pub mod cocycles;
pub mod cartan;
pub mod literal;
pub mod verify;

pub use error::{Error, Result};
pub use grassmann::{GeneratorPool, Grassmann, Parity};
pub use scalar::{Backend, Rational, Scalar, ScalarError};
pub use superjet::SuperJet;
pub use contactmap::{MapGerm, SuperPoint};
pub use ospgroup::OspMatrix;
