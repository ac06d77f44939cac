//! Variational groundstate preparation for the multimode Dicke model on a
//! simulated qubit register.
//!
//! Everything numeric is generic over the scalar ([`Real`], `f32` or `f64`);
//! the aliases below fix it to `f64`.

pub mod ansatz;
pub mod error;
pub mod linalg;
pub mod model;
pub mod pauli;
pub mod scalar;
pub mod ses;
pub mod sim;
pub mod vqe;
pub mod wigner;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Complex = scalar::C<f64>;
pub type DickeModel = model::DickeModel<f64>;
pub type FockOperator = model::FockOperator<f64>;
pub type PauliSum = pauli::PauliSum<f64>;
pub type StateVector = sim::StateVector<f64>;
pub type DensityMatrix = sim::DensityMatrix<f64>;
pub type GateOp = sim::GateOp<f64>;
pub type AnsatzCircuit = ansatz::AnsatzCircuit<f64>;
pub type EnergyObjective = vqe::EnergyObjective<f64>;
pub type DisplacementCircuit = wigner::DisplacementCircuit<f64>;
