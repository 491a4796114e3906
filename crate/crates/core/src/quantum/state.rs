use serde::{Deserialize, Serialize};

use super::layout::RegisterLayout;
use super::matrix::{ComplexMatrix, C64};
use super::{ALGEBRA_TOL, EIGEN_CLIP};
use crate::bit::Bit;
use crate::error::{invalid, Error, Result};

/// Normalised pure state on a composite register layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateDump", into = "StateDump")]
pub struct StateVector {
    amplitudes: Vec<C64>,
    layout: RegisterLayout,
}

#[derive(Serialize, Deserialize)]
struct StateDump {
    layout: RegisterLayout,
    amplitudes: Vec<[f64; 2]>,
}

impl TryFrom<StateDump> for StateVector {
    type Error = Error;

    fn try_from(d: StateDump) -> Result<Self> {
        let amps = d
            .amplitudes
            .into_iter()
            .map(|[re, im]| C64::new(re, im))
            .collect();
        StateVector::new(amps, d.layout)
    }
}

impl From<StateVector> for StateDump {
    fn from(s: StateVector) -> Self {
        StateDump {
            layout: s.layout,
            amplitudes: s.amplitudes.into_iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>, layout: RegisterLayout) -> Result<Self> {
        if amplitudes.len() != layout.dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.dim(),
                actual: amplitudes.len(),
            });
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(invalid("amplitudes must be finite"));
        }
        let n = norm_sqr(&amplitudes);
        if (n - 1.0).abs() > ALGEBRA_TOL {
            return Err(Error::Invariant(format!("state norm² is {n}, expected 1")));
        }
        Ok(Self { amplitudes, layout })
    }

    /// Rescales an arbitrary non-zero vector to unit norm.
    pub fn normalized(amplitudes: Vec<C64>, layout: RegisterLayout) -> Result<Self> {
        let n = norm_sqr(&amplitudes).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(invalid("cannot normalise a zero or non-finite vector"));
        }
        Self::new(amplitudes.into_iter().map(|z| z / n).collect(), layout)
    }

    pub fn basis(layout: RegisterLayout, index: usize) -> Result<Self> {
        if index >= layout.dim() {
            return Err(invalid(format!("basis index {index} out of range")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); layout.dim()];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self {
            amplitudes: amps,
            layout,
        })
    }

    /// `|0⟩` or `|1⟩` on a single qubit.
    pub fn qubit(bit: Bit) -> Self {
        Self::basis(RegisterLayout(vec![2]), bit.index()).expect("qubit layout")
    }

    /// Diagonal-basis encoding: `|0_×⟩ = (|0⟩−|1⟩)/√2`, `|1_×⟩ = (|0⟩+|1⟩)/√2`.
    pub fn diagonal(bit: Bit) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let sign = if bit.is_one() { 1.0 } else { -1.0 };
        Self {
            amplitudes: vec![C64::new(h, 0.0), C64::new(sign * h, 0.0)],
            layout: RegisterLayout(vec![2]),
        }
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn equals_up_to_phase(&self, other: &Self, tol: f64) -> bool {
        self.layout == other.layout
            && self
                .inner(other)
                .map(|z| (z.norm() - 1.0).abs() <= tol)
                .unwrap_or(false)
    }

    /// `self ⊗ low`, with `self` in the more significant registers.
    pub fn tensor(&self, low: &Self) -> Result<Self> {
        let layout = self.layout.above(&low.layout)?;
        let mut amps = Vec::with_capacity(layout.dim());
        for a in &self.amplitudes {
            for b in &low.amplitudes {
                amps.push(a * b);
            }
        }
        Ok(Self {
            amplitudes: amps,
            layout,
        })
    }

    /// Applies a unitary acting on the whole space.
    pub fn evolve(&self, unitary: &ComplexMatrix) -> Result<Self> {
        if unitary.rows() != self.dim() || !unitary.is_unitary(ALGEBRA_TOL) {
            return Err(invalid("evolution needs a unitary of matching dimension"));
        }
        Self::new(unitary.apply(&self.amplitudes), self.layout.clone())
    }

    /// Applies `op` to `registers` (identity elsewhere) without renormalising.
    pub(crate) fn apply_local_raw(
        &self,
        op: &ComplexMatrix,
        registers: &[usize],
    ) -> Result<Vec<C64>> {
        let map = self.layout.local_map(registers)?;
        let d = map.offsets.len();
        if op.rows() != d || op.cols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: op.rows(),
            });
        }
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        let mut local = vec![C64::new(0.0, 0.0); d];
        for &b in &map.bases {
            for (l, &o) in map.offsets.iter().enumerate() {
                local[l] = self.amplitudes[b + o];
            }
            for (r, &o) in map.offsets.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (c, v) in local.iter().enumerate() {
                    acc += op.get(r, c) * v;
                }
                out[b + o] = acc;
            }
        }
        Ok(out)
    }

    /// Applies a unitary to a subset of registers.
    pub fn apply_local(&mut self, unitary: &ComplexMatrix, registers: &[usize]) -> Result<()> {
        if !unitary.is_unitary(ALGEBRA_TOL) {
            return Err(invalid("local evolution needs a unitary"));
        }
        let amps = self.apply_local_raw(unitary, registers)?;
        *self = Self::new(amps, self.layout.clone())?;
        Ok(())
    }

    /// `⟨ψ|E|ψ⟩` for an operator `E` on `registers`.
    pub fn local_expectation(&self, op: &ComplexMatrix, registers: &[usize]) -> Result<f64> {
        let image = self.apply_local_raw(op, registers)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&image)
            .map(|(a, b)| (a.conj() * b).re)
            .sum())
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            matrix: ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
            layout: self.layout.clone(),
        }
    }

    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        self.to_density().partial_trace(keep)
    }
}

/// Mixed state: Hermitian, unit trace, positive semidefinite within tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DensityDump", into = "DensityDump")]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    layout: RegisterLayout,
}

#[derive(Serialize, Deserialize)]
struct DensityDump {
    layout: RegisterLayout,
    matrix: ComplexMatrix,
}

impl TryFrom<DensityDump> for DensityMatrix {
    type Error = Error;

    fn try_from(d: DensityDump) -> Result<Self> {
        DensityMatrix::new(d.matrix, d.layout)
    }
}

impl From<DensityMatrix> for DensityDump {
    fn from(d: DensityMatrix) -> Self {
        DensityDump {
            layout: d.layout,
            matrix: d.matrix,
        }
    }
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, layout: RegisterLayout) -> Result<Self> {
        if matrix.rows() != layout.dim() || !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: layout.dim(),
                actual: matrix.rows(),
            });
        }
        if !matrix.is_hermitian(ALGEBRA_TOL) {
            return Err(Error::Invariant("density matrix is not Hermitian".into()));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > ALGEBRA_TOL || tr.im.abs() > ALGEBRA_TOL {
            return Err(Error::Invariant(format!("density matrix trace is {tr}")));
        }
        let min = matrix.eigh()?.values[0];
        if min < -ALGEBRA_TOL {
            return Err(Error::Invariant(format!(
                "density matrix has negative eigenvalue {min}"
            )));
        }
        Ok(Self { matrix, layout })
    }

    pub fn from_pure(state: &StateVector) -> Self {
        state.to_density()
    }

    pub fn maximally_mixed(layout: RegisterLayout) -> Self {
        let d = layout.dim();
        Self {
            matrix: ComplexMatrix::identity(d).scale(1.0 / d as f64),
            layout,
        }
    }

    /// Convex combination; weights must be non-negative and sum to 1.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<Self> {
        let (_, first) = parts
            .first()
            .ok_or_else(|| invalid("mixture needs at least one component"))?;
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > ALGEBRA_TOL {
            return Err(invalid("mixture weights must be non-negative and sum to 1"));
        }
        let mut acc = ComplexMatrix::zeros(first.dim(), first.dim());
        for (w, rho) in parts {
            if rho.layout != first.layout {
                return Err(invalid("mixture components must share a layout"));
            }
            acc = &acc + &rho.matrix.scale(*w);
        }
        Self::new(acc, first.layout.clone())
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.matrix.eigh()?.values)
    }

    /// `self ⊗ low`.
    pub fn tensor(&self, low: &Self) -> Result<Self> {
        Ok(Self {
            matrix: self.matrix.kron(&low.matrix)?,
            layout: self.layout.above(&low.layout)?,
        })
    }

    /// `U ρ U†` with `U` acting on `registers`.
    pub fn apply_local(&self, unitary: &ComplexMatrix, registers: &[usize]) -> Result<Self> {
        if !unitary.is_unitary(ALGEBRA_TOL) {
            return Err(invalid("local evolution needs a unitary"));
        }
        let full = self.layout.lift(unitary, registers)?;
        Self::new(
            &(&full * &self.matrix) * &full.adjoint(),
            self.layout.clone(),
        )
    }

    /// Traces out every register not in `keep`.
    ///
    /// The result lists the kept registers in ascending order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(invalid("partial trace needs a non-empty keep set"));
        }
        let mut keep = keep.to_vec();
        keep.sort_unstable();
        self.layout.check_registers(&keep)?;
        let traced: Vec<usize> = (0..self.layout.len())
            .filter(|r| !keep.contains(r))
            .collect();
        if traced.is_empty() {
            return Ok(self.clone());
        }
        let kept_map = self.layout.local_map(&keep)?;
        let traced_map = self.layout.local_map(&traced)?;
        let dk = kept_map.offsets.len();
        let mut entries = vec![C64::new(0.0, 0.0); dk * dk];
        for (i, &oi) in kept_map.offsets.iter().enumerate() {
            for (j, &oj) in kept_map.offsets.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for &ot in &traced_map.offsets {
                    acc += self.matrix.get(oi + ot, oj + ot);
                }
                entries[i * dk + j] = acc;
            }
        }
        let matrix = ComplexMatrix::from_row_major(dk, dk, entries)?;
        Self::new(matrix, self.layout.sub_layout(&keep)?)
    }

    /// Entry-wise distance, used for equality checks.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }

    /// Smallest eigenvalue clipped at zero noise level; helper for invariants.
    pub fn is_valid(&self) -> bool {
        self.eigenvalues()
            .map(|v| v[0] >= -EIGEN_CLIP - ALGEBRA_TOL)
            .unwrap_or(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::rotation;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn rejects_unnormalised_states() {
        let l = RegisterLayout::qubits(1).unwrap();
        assert!(StateVector::new(vec![c(1.0), c(1.0)], l.clone()).is_err());
        assert!(StateVector::new(vec![c(1.0)], l).is_err());
    }

    #[test]
    fn tensor_zero_one_is_index_one() {
        let s = StateVector::qubit(Bit::ZERO)
            .tensor(&StateVector::qubit(Bit::ONE))
            .unwrap();
        let expected = StateVector::basis(RegisterLayout::qubits(2).unwrap(), 1).unwrap();
        assert_eq!(s, expected);
    }

    #[test]
    fn tensor_of_diagonal_zeros() {
        // Hand expansion: ½(|00⟩ − |01⟩ − |10⟩ + |11⟩).
        let z = StateVector::diagonal(Bit::ZERO);
        let s = z.tensor(&z).unwrap();
        let expected = [0.5, -0.5, -0.5, 0.5];
        for (a, e) in s.amplitudes().iter().zip(expected) {
            assert!((a - c(e)).norm() < 1e-12);
        }
    }

    #[test]
    fn partial_trace_of_product_and_bell() {
        let zz = StateVector::basis(RegisterLayout::qubits(2).unwrap(), 0).unwrap();
        let r = zz.reduced(&[0]).unwrap();
        assert!(r.max_abs_diff(&StateVector::qubit(Bit::ZERO).to_density()) < 1e-12);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = StateVector::new(
            vec![c(h), c(0.0), c(0.0), c(h)],
            RegisterLayout::qubits(2).unwrap(),
        )
        .unwrap();
        let r = bell.reduced(&[0]).unwrap();
        let half = DensityMatrix::maximally_mixed(RegisterLayout::qubits(1).unwrap());
        assert!(r.max_abs_diff(&half) < 1e-12);
        assert!(bell.to_density().partial_trace(&[]).is_err());
    }

    #[test]
    fn honest_message_averaged_over_h_is_maximally_mixed() {
        // R_α|a1⊕h⟩ ⊗ R_α|a0⊕h⟩ averaged over h, then trace out the a1 register.
        for alpha in [0.0, 0.5] {
            for a0 in Bit::BOTH {
                for a1 in Bit::BOTH {
                    let r = rotation(alpha).unwrap();
                    let parts: Vec<(f64, DensityMatrix)> = Bit::BOTH
                        .iter()
                        .map(|&h| {
                            let q1 = StateVector::new(
                                r.apply(StateVector::qubit(a1 ^ h).amplitudes()),
                                RegisterLayout::qubits(1).unwrap(),
                            )
                            .unwrap();
                            let q0 = StateVector::new(
                                r.apply(StateVector::qubit(a0 ^ h).amplitudes()),
                                RegisterLayout::qubits(1).unwrap(),
                            )
                            .unwrap();
                            (0.5, q1.tensor(&q0).unwrap().to_density())
                        })
                        .collect();
                    let avg = DensityMatrix::mixture(&parts).unwrap();
                    let reduced = avg.partial_trace(&[0]).unwrap();
                    let half = DensityMatrix::maximally_mixed(RegisterLayout::qubits(1).unwrap());
                    assert!(reduced.max_abs_diff(&half) < 1e-9);
                }
            }
        }
    }

    #[test]
    fn local_application_matches_lift() {
        let l = RegisterLayout::new(vec![2, 3]).unwrap();
        let s = StateVector::normalized(
            (0..6).map(|k| C64::new(k as f64, 1.0 - k as f64)).collect(),
            l.clone(),
        )
        .unwrap();
        let r = rotation(0.3).unwrap();
        let mut local = s.clone();
        local.apply_local(&r, &[0]).unwrap();
        let full = l.lift(&r, &[0]).unwrap();
        let global = s.evolve(&full).unwrap();
        for (a, b) in local.amplitudes().iter().zip(global.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn density_validation() {
        let l = RegisterLayout::qubits(1).unwrap();
        let bad = ComplexMatrix::from_real(2, 2, &[1.5, 0.0, 0.0, -0.5]).unwrap();
        assert!(DensityMatrix::new(bad, l.clone()).is_err());
        let not_herm = ComplexMatrix::from_real(2, 2, &[0.5, 0.1, 0.0, 0.5]).unwrap();
        assert!(DensityMatrix::new(not_herm, l).is_err());
    }

    #[test]
    fn serde_roundtrip_state() {
        let s = StateVector::diagonal(Bit::ONE);
        let text = serde_json::to_string(&s).unwrap();
        let back: StateVector = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }
}
