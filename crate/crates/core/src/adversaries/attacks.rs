use serde::{Deserialize, Serialize};

use super::{AliceDecision, GuessRule, MaliciousAliceSpec, MaliciousBobSpec};
use crate::bit::Bit;
use crate::error::{invalid, Result};
use crate::quantum::{
    helstrom_split, rotation, ComplexMatrix, DensityMatrix, Measurement, RegisterLayout,
    StateVector, C64,
};

/// Attack strength, `0 < epsilon < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct AttackParams {
    epsilon: f64,
}

impl AttackParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(invalid(format!(
                "epsilon must lie in (0, 1), got {epsilon}"
            )));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

impl TryFrom<f64> for AttackParams {
    type Error = crate::error::Error;

    fn try_from(epsilon: f64) -> Result<Self> {
        AttackParams::new(epsilon)
    }
}

impl From<AttackParams> for f64 {
    fn from(p: AttackParams) -> f64 {
        p.epsilon
    }
}

fn projector(dim: usize, index: usize) -> ComplexMatrix {
    let mut v = vec![C64::new(0.0, 0.0); dim];
    v[index] = C64::new(1.0, 0.0);
    ComplexMatrix::outer(&v, &v)
}

/// `√(1−ε)|000⟩ + √ε|110⟩` over `(ancilla, msg1, msg0)`, ancilla leftmost.
pub(crate) fn alice_attack_state(epsilon: f64) -> Result<StateVector> {
    let mut amps = vec![C64::new(0.0, 0.0); 8];
    amps[0] = C64::new((1.0 - epsilon).sqrt(), 0.0);
    amps[0b110] = C64::new(epsilon.sqrt(), 0.0);
    StateVector::new(amps, RegisterLayout::qubits(3)?)
}

/// Alice's view `[returned, ancilla]` after Bob selects `i` with pad `beta`.
pub(crate) fn alice_view(state: &StateVector, i: Bit, beta: Bit) -> Result<DensityMatrix> {
    let mut s = state.clone();
    s.apply_local(&rotation(beta.as_u8() as f64)?, &[i.index()])?;
    s.reduced(&[i.index(), 2])
}

pub(crate) fn alice_attack_unchecked(epsilon: f64) -> Result<MaliciousAliceSpec> {
    let state = alice_attack_state(epsilon)?;
    let rho00 = alice_view(&state, Bit::ZERO, Bit::ZERO)?;
    let rho10 = alice_view(&state, Bit::ONE, Bit::ZERO)?;
    // Index 1 of (ancilla ⊗ returned) is |01⟩: ancilla 0, returned qubit 1.
    let h2 = projector(4, 1);
    let rest = &ComplexMatrix::identity(4) - &h2;
    let (h0, h1) = helstrom_split(rho00.matrix(), rho10.matrix(), &rest)?;
    let measurement = Measurement::projective(vec![
        ("H0".into(), h0),
        ("H1".into(), h1),
        ("H2".into(), h2),
        ("H3".into(), ComplexMatrix::zeros(4, 4)),
    ])?;
    let decoder = [
        AliceDecision {
            m: Bit::ZERO,
            guess: GuessRule::Fixed(Bit::ZERO),
        },
        AliceDecision {
            m: Bit::ZERO,
            guess: GuessRule::Fixed(Bit::ONE),
        },
        AliceDecision {
            m: Bit::ONE,
            guess: GuessRule::Uniform,
        },
        AliceDecision {
            m: Bit::ZERO,
            guess: GuessRule::Uniform,
        },
    ];
    MaliciousAliceSpec::new(state, measurement, decoder)
}

/// The explicit entangled attack of Alice for inputs `a0 = a1`.
///
/// Outcome `H2` reveals `beta = 1`; on the rest, a Helstrom split of the
/// views for `i = 0` and `i = 1` (both with `beta = 0`) gives the guess.
pub fn alice_attack(params: AttackParams) -> Result<MaliciousAliceSpec> {
    alice_attack_unchecked(params.epsilon())
}

impl MaliciousAliceSpec {
    /// The attack at `epsilon = 0`: sends `|00⟩` and learns nothing.
    pub fn honest_equivalent() -> Result<Self> {
        alice_attack_unchecked(0.0)
    }
}

/// `|v_0⟩, |v_1⟩ = cos(θ/2)|0⟩ ± sin(θ/2)|1⟩` with `cos θ = √(1−ε)`.
pub(crate) fn bob_ancilla_vectors(epsilon: f64) -> [[f64; 2]; 2] {
    let theta = (1.0 - epsilon).sqrt().acos();
    let (s, c) = (theta / 2.0).sin_cos();
    [[c, s], [c, -s]]
}

pub(crate) fn bob_attack_unchecked(epsilon: f64) -> Result<MaliciousBobSpec> {
    let v = bob_ancilla_vectors(epsilon);
    let i2 = ComplexMatrix::identity(2);
    let mut unitary = ComplexMatrix::zeros(8, 8);
    for j in 0..2 {
        let [c, s] = v[j];
        let prep = ComplexMatrix::from_real(2, 2, &[c, -s, s, c])?;
        let control = projector(2, j);
        unitary = &unitary + &prep.kron(&i2)?.kron(&control)?;
    }

    let as_density = |x: [f64; 2]| {
        let amps = [C64::new(x[0], 0.0), C64::new(x[1], 0.0)];
        ComplexMatrix::outer(&amps, &amps)
    };
    let (p0, p1) = helstrom_split(&as_density(v[0]), &as_density(v[1]), &i2)?;
    let ancilla = [p0, p1];

    // The kept qubit carries R_α|a1⊕h⟩ with α unknown to Bob.
    let half = rotation(0.5)?;
    let sigma = |y: usize| -> Result<ComplexMatrix> {
        let p = projector(2, y);
        let rotated = &(&half * &p) * &half.adjoint();
        Ok((&p + &rotated).scale(0.5))
    };
    let (q0, q1) = helstrom_split(&sigma(0)?, &sigma(1)?, &i2)?;
    let message = [q0, q1];

    let measurements = Bit::BOTH.map(|m| -> Result<Measurement> {
        let mut elements = vec![ComplexMatrix::zeros(4, 4); 4];
        for k in 0..2 {
            let mut e = ComplexMatrix::zeros(4, 4);
            for (j, p) in ancilla.iter().enumerate() {
                let y = k ^ m.index() ^ j;
                e = &e + &p.kron(&message[y])?;
            }
            elements[2 * m.index() + k] = e;
        }
        Measurement::projective(
            elements
                .into_iter()
                .enumerate()
                .map(|(o, e)| (format!("{}{}", o >> 1, o & 1), e))
                .collect(),
        )
    });
    let [m0, m1] = measurements;
    MaliciousBobSpec::new(vec![2], unitary, 0, [m0?, m1?])
}

/// The explicit attack of Bob: a controlled ancilla preparation keyed on the
/// `a0` qubit, which is then returned. After `m` he sets `a0' = m`, reads the
/// pad from the ancilla and guesses `a1` from the qubit he kept.
pub fn bob_attack(params: AttackParams) -> Result<MaliciousBobSpec> {
    bob_attack_unchecked(params.epsilon())
}

impl MaliciousBobSpec {
    /// The attack at `epsilon = 0`: an identity operation returning `msg0`.
    pub fn honest_equivalent() -> Result<Self> {
        bob_attack_unchecked(0.0)
    }
}
