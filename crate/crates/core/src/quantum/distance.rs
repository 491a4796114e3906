use super::matrix::ComplexMatrix;
use super::measurement::{Measurement, ProbDist};
use super::state::{DensityMatrix, StateVector};
use super::{ALGEBRA_TOL, EIGEN_CLIP};
use crate::error::{invalid, Error, Result};

/// Trace norm `tr √(A†A)`, the sum of singular values.
///
/// Hermitian input uses the absolute eigenvalues directly; otherwise the
/// eigenvalues of `A†A` are clipped at `-EIGEN_CLIP` and square-rooted.
pub fn trace_norm(a: &ComplexMatrix) -> Result<f64> {
    if !a.is_square() {
        return Err(invalid(format!(
            "trace norm needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if a.is_hermitian(ALGEBRA_TOL) {
        return Ok(a.eigh()?.values.iter().map(|v| v.abs()).sum());
    }
    let gram = &a.adjoint() * a;
    Ok(gram
        .eigh()?
        .values
        .iter()
        .map(|&v| {
            if v < -EIGEN_CLIP {
                f64::NAN
            } else {
                v.max(0.0).sqrt()
            }
        })
        .sum())
}

/// `||ψ⟩⟨ψ| − |φ⟩⟨φ||_t = 2√(1 − |⟨ψ|φ⟩|²)`.
pub fn pure_state_trace_distance(psi: &StateVector, phi: &StateVector) -> Result<f64> {
    let overlap = psi.inner(phi)?.norm_sqr().min(1.0);
    Ok(2.0 * (1.0 - overlap).sqrt())
}

/// `½ Σ_k |p_k − q_k|` over identically labelled distributions.
pub fn l1_distance(p: &ProbDist, q: &ProbDist) -> Result<f64> {
    if p.labels() != q.labels() {
        return Err(invalid("distributions have different outcome labels"));
    }
    Ok(0.5
        * p.probabilities()
            .iter()
            .zip(q.probabilities())
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>())
}

/// Optimal two-outcome measurement for telling `rho0` from `rho1`.
///
/// Outcome `"0"` projects onto the eigenvectors of `rho0 − rho1` with
/// positive eigenvalue; eigenvalues within `EIGEN_CLIP` of zero go to `"1"`.
pub fn helstrom_measurement(rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<Measurement> {
    if rho0.dim() != rho1.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho0.dim(),
            actual: rho1.dim(),
        });
    }
    let (p0, p1) = helstrom_split(
        rho0.matrix(),
        rho1.matrix(),
        &ComplexMatrix::identity(rho0.dim()),
    )?;
    Measurement::projective(vec![("0".into(), p0), ("1".into(), p1)])
}

/// Helstrom split restricted to the range of the projector `subspace`.
///
/// Returns `(P0, P1)` with `P0 + P1 = subspace`, `P0` spanning the positive
/// eigenvectors of `subspace·(a − b)·subspace`.
pub fn helstrom_split(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    subspace: &ComplexMatrix,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if a.rows() != b.rows() || a.rows() != subspace.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            actual: b.rows().max(subspace.rows()),
        });
    }
    let diff = &a.clone() - b;
    let restricted = &(subspace * &diff) * subspace;
    let eig = restricted.eigh()?;
    let positive = eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > EIGEN_CLIP)
        .map(|(k, _)| k);
    let p0 = ComplexMatrix::column_projector(&eig.vectors, positive);
    let p1 = subspace - &p0;
    Ok((p0, p1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bit::Bit;
    use crate::quantum::{outcome_distribution, RegisterLayout};

    fn dist(ps: &[f64]) -> ProbDist {
        ProbDist::new((0..ps.len()).map(|k| k.to_string()).collect(), ps.to_vec()).unwrap()
    }

    #[test]
    fn trace_norm_examples() {
        assert!((trace_norm(&ComplexMatrix::identity(2)).unwrap() - 2.0).abs() < 1e-12);
        let z = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap();
        assert!((trace_norm(&z).unwrap() - 2.0).abs() < 1e-12);
        let nonsquare = ComplexMatrix::from_real(1, 2, &[1.0, 0.0]).unwrap();
        assert!(trace_norm(&nonsquare).is_err());
    }

    #[test]
    fn trace_norm_of_non_hermitian() {
        // Nilpotent |0⟩⟨1| has a single singular value 1.
        let n = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!((trace_norm(&n).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_vs_diagonal_zero_is_sqrt_two() {
        let a = StateVector::qubit(Bit::ZERO);
        let b = StateVector::diagonal(Bit::ZERO);
        let d = &a.to_density().matrix().clone() - b.to_density().matrix();
        // Eigenvalues of the difference are ±1/√2.
        assert!((trace_norm(&d).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert!((pure_state_trace_distance(&a, &b).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn l1_examples() {
        let p = dist(&[0.75, 0.25]);
        assert_eq!(l1_distance(&p, &p).unwrap(), 0.0);
        assert_eq!(
            l1_distance(&dist(&[1.0, 0.0]), &dist(&[0.0, 1.0])).unwrap(),
            1.0
        );
        assert!((l1_distance(&p, &dist(&[0.25, 0.75])).unwrap() - 0.5).abs() < 1e-15);
        let other = ProbDist::new(vec!["a".into(), "b".into()], vec![0.5, 0.5]).unwrap();
        assert!(l1_distance(&p, &other).is_err());
    }

    #[test]
    fn helstrom_examples() {
        let zero = StateVector::qubit(Bit::ZERO).to_density();
        let one = StateVector::qubit(Bit::ONE).to_density();
        let m = helstrom_measurement(&zero, &one).unwrap();
        let comp = crate::quantum::Measurement::computational(2).unwrap();
        assert!(m.element(0).max_abs_diff(comp.element(0)) < 1e-12);
        let gap = l1_distance(
            &outcome_distribution(&zero, &m).unwrap(),
            &outcome_distribution(&one, &m).unwrap(),
        )
        .unwrap();
        assert!((gap - 1.0).abs() < 1e-12);

        let same = helstrom_measurement(&zero, &zero).unwrap();
        let gap = l1_distance(
            &outcome_distribution(&zero, &same).unwrap(),
            &outcome_distribution(&zero, &same).unwrap(),
        )
        .unwrap();
        assert_eq!(gap, 0.0);
        // Degenerate difference: everything goes to outcome "1".
        assert!(same.element(1).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);

        let diag = StateVector::diagonal(Bit::ZERO).to_density();
        let m = helstrom_measurement(&zero, &diag).unwrap();
        let gap = l1_distance(
            &outcome_distribution(&zero, &m).unwrap(),
            &outcome_distribution(&diag, &m).unwrap(),
        )
        .unwrap();
        assert!((gap - 2f64.sqrt() / 2.0).abs() < 1e-9);
    }

    #[test]
    fn helstrom_dimension_mismatch() {
        let a = DensityMatrix::maximally_mixed(RegisterLayout::qubits(1).unwrap());
        let b = DensityMatrix::maximally_mixed(RegisterLayout::qubits(2).unwrap());
        assert!(helstrom_measurement(&a, &b).is_err());
    }
}
