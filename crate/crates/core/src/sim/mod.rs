//! State-vector and density-matrix circuit simulation.

mod density;
mod gate;
mod noise;
mod observable;
mod readout;
mod sampling;
mod state;

pub use density::{run_noisy, run_noisy_capped, run_trajectory, DensityMatrix, DEFAULT_DENSITY_CAP};
pub use gate::{GateOp, Quadrature};
pub use noise::{NoiseModel, ReadoutError, ScaledNoise};
pub use observable::Observable;
pub use readout::{apply_readout_error, corrupt_counts, mitigate_readout, project_simplex};
pub use sampling::{sample_distribution, Counts, Distribution};
pub use state::{StateVector, MAX_STATE_QUBITS};

/// Applies `gate` to the state in place.
pub fn apply_gate<T: crate::Real>(state: &mut StateVector<T>, gate: &GateOp<T>) -> crate::Result<()> {
    state.apply(gate)
}
