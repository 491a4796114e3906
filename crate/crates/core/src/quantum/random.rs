//! Random states, unitaries and measurements for strategy families and tests.

use rand::Rng;
use rand_distr::StandardNormal;

use super::layout::RegisterLayout;
use super::matrix::{ComplexMatrix, C64};
use super::measurement::Measurement;
use super::state::{DensityMatrix, StateVector};
use crate::error::{invalid, Result};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Result<ComplexMatrix> {
    ComplexMatrix::from_row_major(
        rows,
        cols,
        (0..rows * cols).map(|_| gaussian(rng)).collect(),
    )
}

/// Uniformly random pure state.
pub fn random_state<R: Rng + ?Sized>(layout: RegisterLayout, rng: &mut R) -> Result<StateVector> {
    let amps = (0..layout.dim()).map(|_| gaussian(rng)).collect();
    StateVector::normalized(amps, layout)
}

/// Random density matrix `G G† / tr(G G†)` with `G` a `dim × rank` Ginibre matrix.
pub fn random_density<R: Rng + ?Sized>(
    layout: RegisterLayout,
    rank: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    let dim = layout.dim();
    if rank == 0 || rank > dim {
        return Err(invalid(format!("rank must lie in 1..={dim}")));
    }
    let g = ginibre(dim, rank, rng)?;
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.scale(1.0 / tr), layout)
}

/// Haar-random unitary via QR of a Ginibre matrix with phase correction.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<ComplexMatrix> {
    let g = ginibre(dim, dim, rng)?;
    let qr = g.inner().clone().qr();
    let q = qr.q();
    let r = qr.r();
    let mut out = q.clone();
    for c in 0..dim {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for row in 0..dim {
            out[(row, c)] = q[(row, c)] * phase;
        }
    }
    Ok(ComplexMatrix::from_inner(out))
}

/// `exp(-i·strength·H)` for a random Hermitian `H` of unit spectral scale.
pub fn near_identity_unitary<R: Rng + ?Sized>(
    dim: usize,
    strength: f64,
    rng: &mut R,
) -> Result<ComplexMatrix> {
    let g = ginibre(dim, dim, rng)?;
    let h = (&g + &g.adjoint()).scale(0.5 / (dim as f64).sqrt());
    let eig = h.eigh()?;
    let v = eig.vectors.inner();
    let d = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        dim,
        eig.values
            .iter()
            .map(|&x| C64::from_polar(1.0, -strength * x)),
    ));
    Ok(ComplexMatrix::from_inner(v * d * v.adjoint()))
}

/// Random rank-one projective measurement grouped into `outcomes` labels.
///
/// Each basis vector of a Haar-random basis is assigned to a uniformly
/// random outcome; outcomes that receive nothing are zero projectors.
pub fn random_projective<R: Rng + ?Sized>(
    dim: usize,
    outcomes: usize,
    rng: &mut R,
) -> Result<Measurement> {
    let basis = random_unitary(dim, rng)?;
    let assignment: Vec<usize> = (0..dim).map(|_| rng.random_range(0..outcomes)).collect();
    grouped_projective(&basis, &assignment, outcomes)
}

/// Projective measurement whose outcome `k` projects onto the columns of
/// `basis` that `assignment` maps to `k`.
pub fn grouped_projective(
    basis: &ComplexMatrix,
    assignment: &[usize],
    outcomes: usize,
) -> Result<Measurement> {
    if assignment.len() != basis.cols() || assignment.iter().any(|&k| k >= outcomes) {
        return Err(invalid(
            "assignment must map every basis column to an outcome",
        ));
    }
    Measurement::projective(
        (0..outcomes)
            .map(|k| {
                let cols = assignment
                    .iter()
                    .enumerate()
                    .filter(move |(_, &a)| a == k)
                    .map(|(c, _)| c);
                (k.to_string(), ComplexMatrix::column_projector(basis, cols))
            })
            .collect(),
    )
}

/// Random POVM: `E_k = S^{-1/2} A_k S^{-1/2}` with `A_k` random positive and `S = Σ A_k`.
pub fn random_povm<R: Rng + ?Sized>(
    dim: usize,
    outcomes: usize,
    rng: &mut R,
) -> Result<Measurement> {
    if outcomes == 0 {
        return Err(invalid("a POVM needs at least one outcome"));
    }
    let mut ranks: Vec<usize> = (0..outcomes).map(|_| rng.random_range(1..=dim)).collect();
    // S must be invertible, which needs the ranks to cover the space.
    if ranks.iter().sum::<usize>() < dim {
        ranks[outcomes - 1] = dim;
    }
    let parts: Vec<ComplexMatrix> = ranks
        .into_iter()
        .map(|rank| {
            let g = ginibre(dim, rank, rng)?;
            Ok(&g * &g.adjoint())
        })
        .collect::<Result<_>>()?;
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for p in &parts {
        sum = &sum + p;
    }
    let inv_sqrt = sum.hermitian_map(|x| 1.0 / x.sqrt())?;
    let elements = parts
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let e = &(&inv_sqrt * a) * &inv_sqrt;
            // Remove round-off asymmetry.
            (k.to_string(), (&e + &e.adjoint()).scale(0.5))
        })
        .collect();
    Measurement::povm(elements)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitaries_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for dim in [2, 4, 8] {
            assert!(random_unitary(dim, &mut rng).unwrap().is_unitary(1e-12));
            assert!(near_identity_unitary(dim, 0.3, &mut rng)
                .unwrap()
                .is_unitary(1e-12));
        }
    }

    #[test]
    fn povms_and_projectives_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for dim in [2, 3, 8] {
            random_povm(dim, 3, &mut rng).unwrap();
            random_projective(dim, 4, &mut rng).unwrap();
            random_density(RegisterLayout::new(vec![dim]).unwrap(), 1, &mut rng).unwrap();
        }
    }
}
