//! Numerical simulator for Josephson-junction-array quantum physics.
//!
//! * [`units`]: SI device formulas (plasma frequency, qubit coupling, shunted SQUIDs).
//! * [`modes`]: normal modes of chain and complete junction networks.
//! * [`operator`], [`models`]: tensor-product operators, Jordan–Wigner fermions,
//!   XXZ and free-fermion chains, single oscillators.
//! * [`qed`], [`dynamics`]: Jaynes–Cummings qubit/cavity model and unitary evolution.
//! * [`holstein`]: the spinless Holstein chain realized by a qubit array with
//!   local oscillators.

pub mod eigen;
pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod holstein;
pub mod models;
pub mod modes;
pub mod operator;
pub mod qed;

pub mod sparse;
pub mod units;

pub use error::{Error, Result};
pub use hilbert::{HilbertSpec, SiteKind, StateVector};
pub use operator::{ConservedQuantity, Operator, SectorProjector, SiteOp};
