//! Dense linear algebra for small Hilbert spaces.
//!
//! Register 0 is always the least significant register; see [`RegisterLayout`].

mod distance;
mod layout;
mod matrix;
mod measurement;
pub mod random;
mod state;

pub use distance::{
    helstrom_measurement, helstrom_split, l1_distance, pure_state_trace_distance, trace_norm,
};
pub use layout::RegisterLayout;
pub use matrix::{ComplexMatrix, HermitianEigen, MatrixDump, C64};
pub(crate) use measurement::pick_weighted;
pub use measurement::{
    measure, outcome_distribution, Measurable, Measurement, MeasurementKind, MeasurementOutcome,
    ProbDist,
};
pub use state::{DensityMatrix, StateVector};

use crate::error::{invalid, Result};

/// Largest total Hilbert-space dimension (ten qubits).
pub const DIMENSION_CAP: usize = 1 << 10;
/// Tolerance for algebraic identities and state invariants.
pub const ALGEBRA_TOL: f64 = 1e-9;
/// Tolerance for constructed unitaries.
pub const UNITARY_TOL: f64 = 1e-12;
/// Eigenvalues within this distance of zero are treated as zero.
pub const EIGEN_CLIP: f64 = 1e-12;

/// Rotation by `alpha · π/2`:
/// `[[cos, sin], [−sin, cos]]`.
pub fn rotation(alpha: f64) -> Result<ComplexMatrix> {
    if !alpha.is_finite() {
        return Err(invalid(format!(
            "rotation parameter must be finite, got {alpha}"
        )));
    }
    let (s, c) = (alpha * std::f64::consts::FRAC_PI_2).sin_cos();
    ComplexMatrix::from_real(2, 2, &[c, s, -s, c])
}

/// Kronecker product for the three composite kinds.
pub trait Tensor: Sized {
    /// `self ⊗ low`, `self` in the more significant registers.
    fn tensor(&self, low: &Self) -> Result<Self>;
}

impl Tensor for ComplexMatrix {
    fn tensor(&self, low: &Self) -> Result<Self> {
        self.kron(low)
    }
}

impl Tensor for StateVector {
    fn tensor(&self, low: &Self) -> Result<Self> {
        StateVector::tensor(self, low)
    }
}

impl Tensor for DensityMatrix {
    fn tensor(&self, low: &Self) -> Result<Self> {
        DensityMatrix::tensor(self, low)
    }
}

pub fn tensor<T: Tensor>(a: &T, b: &T) -> Result<T> {
    a.tensor(b)
}
