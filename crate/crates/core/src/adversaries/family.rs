use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    alice_attack, bob_attack, default_alice_decoder, AliceDecision, AttackParams, GuessRule,
    MaliciousAliceSpec, MaliciousBobSpec,
};
use crate::bit::Bit;
use crate::error::Result;
use crate::quantum::random::{
    grouped_projective, near_identity_unitary, random_projective, random_state, random_unitary,
};
use crate::quantum::{RegisterLayout, StateVector};

/// Attack strengths always included in the sampled families.
pub const ATTACK_GRID: [f64; 3] = [0.01, 0.04, 0.09];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyMember<S> {
    pub name: String,
    /// Set for the explicit attacks.
    pub epsilon: Option<f64>,
    pub spec: Arc<S>,
}

fn random_bit(rng: &mut ChaCha8Rng) -> Bit {
    Bit::from(rng.random::<bool>())
}

/// The explicit Alice attacks on [`ATTACK_GRID`] followed by `count` sampled
/// strategies. Even-numbered samples are Haar-random; odd-numbered ones are
/// small perturbations of an honest-looking strategy.
pub fn random_alice_family(
    seed: u64,
    count: usize,
) -> Result<Vec<FamilyMember<MaliciousAliceSpec>>> {
    alice_family_on_grid(&ATTACK_GRID, seed, count)
}

/// [`random_alice_family`] with the explicit attacks taken at `grid`.
pub fn alice_family_on_grid(
    grid: &[f64],
    seed: u64,
    count: usize,
) -> Result<Vec<FamilyMember<MaliciousAliceSpec>>> {
    let mut out = Vec::with_capacity(grid.len() + count);
    for &eps in grid {
        out.push(FamilyMember {
            name: format!("alice_attack(eps={eps})"),
            epsilon: Some(eps),
            spec: Arc::new(alice_attack(AttackParams::new(eps)?)?),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..count {
        let ancillas = rng.random_range(0..=2usize);
        let layout = RegisterLayout::qubits(2 + ancillas)?;
        let local = 2usize << ancillas;
        let (name, spec) = if k % 2 == 0 {
            let state = random_state(layout, &mut rng)?;
            let measurement = random_projective(local, 4, &mut rng)?;
            let decoder: [AliceDecision; 4] = std::array::from_fn(|_| AliceDecision {
                m: random_bit(&mut rng),
                guess: if rng.random_range(0..4) == 0 {
                    GuessRule::Uniform
                } else {
                    GuessRule::Fixed(random_bit(&mut rng))
                },
            });
            (
                "haar",
                MaliciousAliceSpec::new(state, measurement, decoder)?,
            )
        } else {
            let strength = rng.random_range(0.01..0.5);
            let dim = layout.dim();
            let state = StateVector::basis(layout, 0)?
                .evolve(&near_identity_unitary(dim, strength, &mut rng)?)?;
            let basis = near_identity_unitary(local, strength, &mut rng)?;
            // Column x reads the returned qubit as x & 1, then guesses at random.
            let assignment: Vec<usize> = (0..local)
                .map(|x| 2 * (x & 1) + rng.random_range(0..2usize))
                .collect();
            let measurement = grouped_projective(&basis, &assignment, 4)?;
            (
                "near-honest",
                MaliciousAliceSpec::new(state, measurement, default_alice_decoder())?,
            )
        };
        out.push(FamilyMember {
            name: format!("random-{k:04}-{name}-anc{ancillas}"),
            epsilon: None,
            spec: Arc::new(spec),
        });
    }
    Ok(out)
}

/// The explicit Bob attacks on [`ATTACK_GRID`] followed by `count` sampled
/// strategies with one or two ancilla qubits, alternating Haar-random and
/// near-honest as for [`random_alice_family`].
pub fn random_bob_family(seed: u64, count: usize) -> Result<Vec<FamilyMember<MaliciousBobSpec>>> {
    bob_family_on_grid(&ATTACK_GRID, seed, count)
}

/// [`random_bob_family`] with the explicit attacks taken at `grid`.
pub fn bob_family_on_grid(
    grid: &[f64],
    seed: u64,
    count: usize,
) -> Result<Vec<FamilyMember<MaliciousBobSpec>>> {
    let mut out = Vec::with_capacity(grid.len() + count);
    for &eps in grid {
        out.push(FamilyMember {
            name: format!("bob_attack(eps={eps})"),
            epsilon: Some(eps),
            spec: Arc::new(bob_attack(AttackParams::new(eps)?)?),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..count {
        let ancillas = rng.random_range(1..=2usize);
        let dim = 4usize << ancillas;
        let kept = dim / 2;
        let returned = rng.random_range(0..2usize);
        let (name, unitary, measurements) = if k % 2 == 0 {
            let u = random_unitary(dim, &mut rng)?;
            let m0 = random_projective(kept, 4, &mut rng)?;
            let m1 = random_projective(kept, 4, &mut rng)?;
            ("haar", u, [m0, m1])
        } else {
            let strength = rng.random_range(0.01..0.5);
            let u = near_identity_unitary(dim, strength, &mut rng)?;
            // The returned bit is taken to be m; the other is read off a
            // slightly rotated basis of what Bob kept.
            let mut per_m = Vec::with_capacity(2);
            for m in 0..2usize {
                let basis = near_identity_unitary(kept, strength, &mut rng)?;
                let assignment: Vec<usize> = (0..kept)
                    .map(|_| {
                        let other = rng.random_range(0..2usize);
                        if returned == 0 {
                            2 * m + other
                        } else {
                            2 * other + m
                        }
                    })
                    .collect();
                per_m.push(grouped_projective(&basis, &assignment, 4)?);
            }
            let m1 = per_m.pop().expect("two measurements");
            let m0 = per_m.pop().expect("two measurements");
            ("near-honest", u, [m0, m1])
        };
        out.push(FamilyMember {
            name: format!("random-{k:04}-{name}-anc{ancillas}-ret{returned}"),
            epsilon: None,
            spec: Arc::new(MaliciousBobSpec::new(
                vec![2; ancillas],
                unitary,
                returned,
                measurements,
            )?),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_are_reproducible() {
        let a = random_alice_family(5, 6).unwrap();
        let b = random_alice_family(5, 6).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 9);
        let c = random_bob_family(5, 6).unwrap();
        assert_eq!(c, random_bob_family(5, 6).unwrap());
        assert_ne!(random_bob_family(6, 6).unwrap()[3], c[3]);
    }

    #[test]
    fn families_contain_the_grid() {
        let fam = random_alice_family(1, 0).unwrap();
        let eps: Vec<_> = fam.iter().filter_map(|m| m.epsilon).collect();
        assert_eq!(eps, ATTACK_GRID);
    }
}
