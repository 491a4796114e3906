//! Cheating strategies for the OT protocol.
//!
//! A malicious party is described by data (a state or unitary plus final
//! measurements), so strategies can be serialised, sampled and swept.

mod attacks;
mod family;

use serde::{Deserialize, Serialize};

use crate::bit::Bit;
use crate::branching::Chooser;
use crate::error::{invalid, Error, Result};
use crate::ot::{
    AliceReply, AliceStrategy, BobOutput, BobStrategy, PartyContext, ANCILLA_CAP, MSG0, MSG1,
};
use crate::quantum::{ComplexMatrix, Measurement, StateVector, UNITARY_TOL};

pub use attacks::{alice_attack, bob_attack, AttackParams};
pub use family::{
    alice_family_on_grid, bob_family_on_grid, random_alice_family, random_bob_family, FamilyMember,
    ATTACK_GRID,
};

/// How a malicious Alice sets her guess `i'` for one outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GuessRule {
    Fixed(Bit),
    /// A fresh fair coin.
    Uniform,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AliceDecision {
    pub m: Bit,
    pub guess: GuessRule,
}

/// Outcome `2k + l` decodes to message `k` and guess `l`.
pub fn default_alice_decoder() -> [AliceDecision; 4] {
    std::array::from_fn(|o| AliceDecision {
        m: Bit::from_index(o >> 1),
        guess: GuessRule::Fixed(Bit::from_index(o)),
    })
}

fn ancilla_total(dims: &[usize]) -> Result<usize> {
    let total: usize = dims.iter().product();
    if dims.iter().any(|&d| d < 2) || total > ANCILLA_CAP {
        return Err(invalid(format!(
            "ancilla dimensions {dims:?} exceed the budget of {ANCILLA_CAP}"
        )));
    }
    Ok(total)
}

/// A cheating Alice: an arbitrary initial state on `[msg0, msg1, ancillas..]`
/// and a four-outcome measurement on `[returned, ancillas..]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AliceSpecDump", into = "AliceSpecDump")]
pub struct MaliciousAliceSpec {
    initial_state: StateVector,
    final_measurement: Measurement,
    decoder: [AliceDecision; 4],
}

#[derive(Clone, Serialize, Deserialize)]
struct AliceSpecDump {
    initial_state: StateVector,
    final_measurement: Measurement,
    decoder: [AliceDecision; 4],
}

impl TryFrom<AliceSpecDump> for MaliciousAliceSpec {
    type Error = Error;

    fn try_from(d: AliceSpecDump) -> Result<Self> {
        MaliciousAliceSpec::new(d.initial_state, d.final_measurement, d.decoder)
    }
}

impl From<MaliciousAliceSpec> for AliceSpecDump {
    fn from(s: MaliciousAliceSpec) -> Self {
        AliceSpecDump {
            initial_state: s.initial_state,
            final_measurement: s.final_measurement,
            decoder: s.decoder,
        }
    }
}

impl MaliciousAliceSpec {
    pub fn new(
        initial_state: StateVector,
        final_measurement: Measurement,
        decoder: [AliceDecision; 4],
    ) -> Result<Self> {
        let dims = initial_state.layout().dims();
        if dims.len() < 2 || dims[0] != 2 || dims[1] != 2 {
            return Err(invalid("initial state must start with two message qubits"));
        }
        let anc = ancilla_total(&dims[2..])?;
        if final_measurement.len() != 4 {
            return Err(invalid(
                "alice's final measurement needs exactly 4 outcomes",
            ));
        }
        if final_measurement.dim() != 2 * anc {
            return Err(Error::DimensionMismatch {
                expected: 2 * anc,
                actual: final_measurement.dim(),
            });
        }
        Ok(Self {
            initial_state,
            final_measurement,
            decoder,
        })
    }

    pub fn initial_state(&self) -> &StateVector {
        &self.initial_state
    }

    pub fn final_measurement(&self) -> &Measurement {
        &self.final_measurement
    }

    pub fn decoder(&self) -> &[AliceDecision; 4] {
        &self.decoder
    }

    pub fn ancilla_dims(&self) -> Vec<usize> {
        self.initial_state.layout().dims()[2..].to_vec()
    }
}

/// A running malicious Alice.
pub struct MaliciousAlice<'a> {
    spec: &'a MaliciousAliceSpec,
    shift: Bit,
}

impl<'a> MaliciousAlice<'a> {
    /// `shift` is xored into every decoded message.
    pub fn new(spec: &'a MaliciousAliceSpec, shift: Bit) -> Self {
        Self { spec, shift }
    }
}

impl AliceStrategy for MaliciousAlice<'_> {
    fn ancilla_dims(&self) -> Vec<usize> {
        self.spec.ancilla_dims()
    }

    fn prepare(&mut self, _coins: &mut dyn Chooser) -> Result<StateVector> {
        Ok(self.spec.initial_state.clone())
    }

    fn respond(&mut self, ctx: &mut PartyContext<'_>, returned: usize) -> Result<AliceReply> {
        let mut registers = vec![returned];
        registers.extend_from_slice(ctx.ancillas());
        let k = ctx.measure(&self.spec.final_measurement, &registers)?;
        let decision = self.spec.decoder[k];
        let guess = match decision.guess {
            GuessRule::Fixed(b) => b,
            GuessRule::Uniform => ctx.coin()?,
        };
        Ok(AliceReply {
            m: decision.m ^ self.shift,
            n: None,
            guess: Some(guess),
        })
    }
}

/// A cheating Bob: a unitary on `[msg0, msg1, ancillas..]` (ancillas start
/// in `|0⟩`), the local index of the register he returns, and for each
/// value of `m` a four-outcome measurement on the registers he keeps.
/// Outcome `2l + k` decodes to `a0' = l`, `a1' = k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BobSpecDump", into = "BobSpecDump")]
pub struct MaliciousBobSpec {
    ancilla_dims: Vec<usize>,
    unitary: ComplexMatrix,
    returned_register: usize,
    final_measurements: [Measurement; 2],
}

#[derive(Clone, Serialize, Deserialize)]
struct BobSpecDump {
    ancilla_dims: Vec<usize>,
    unitary: ComplexMatrix,
    returned_register: usize,
    final_measurements: [Measurement; 2],
}

impl TryFrom<BobSpecDump> for MaliciousBobSpec {
    type Error = Error;

    fn try_from(d: BobSpecDump) -> Result<Self> {
        MaliciousBobSpec::new(
            d.ancilla_dims,
            d.unitary,
            d.returned_register,
            d.final_measurements,
        )
    }
}

impl From<MaliciousBobSpec> for BobSpecDump {
    fn from(s: MaliciousBobSpec) -> Self {
        BobSpecDump {
            ancilla_dims: s.ancilla_dims,
            unitary: s.unitary,
            returned_register: s.returned_register,
            final_measurements: s.final_measurements,
        }
    }
}

impl MaliciousBobSpec {
    pub fn new(
        ancilla_dims: Vec<usize>,
        unitary: ComplexMatrix,
        returned_register: usize,
        final_measurements: [Measurement; 2],
    ) -> Result<Self> {
        let anc = ancilla_total(&ancilla_dims)?;
        let dim = 4 * anc;
        if unitary.rows() != dim || !unitary.is_square() {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: unitary.rows(),
            });
        }
        if !unitary.is_unitary(UNITARY_TOL) {
            return Err(invalid("bob's operator is not unitary"));
        }
        let local: Vec<usize> = [2, 2]
            .into_iter()
            .chain(ancilla_dims.iter().copied())
            .collect();
        if local.get(returned_register) != Some(&2) {
            return Err(invalid(format!(
                "returned register {returned_register} is not one of bob's qubits"
            )));
        }
        for m in &final_measurements {
            if m.len() != 4 {
                return Err(invalid("bob's final measurements need exactly 4 outcomes"));
            }
            if m.dim() != dim / 2 {
                return Err(Error::DimensionMismatch {
                    expected: dim / 2,
                    actual: m.dim(),
                });
            }
        }
        Ok(Self {
            ancilla_dims,
            unitary,
            returned_register,
            final_measurements,
        })
    }

    pub fn ancilla_dims(&self) -> &[usize] {
        &self.ancilla_dims
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn returned_register(&self) -> usize {
        self.returned_register
    }

    pub fn final_measurement(&self, m: Bit) -> &Measurement {
        &self.final_measurements[m.index()]
    }
}

/// A running malicious Bob.
pub struct MaliciousBob<'a> {
    spec: &'a MaliciousBobSpec,
}

impl<'a> MaliciousBob<'a> {
    pub fn new(spec: &'a MaliciousBobSpec) -> Self {
        Self { spec }
    }
}

impl BobStrategy for MaliciousBob<'_> {
    fn ancilla_dims(&self) -> Vec<usize> {
        self.spec.ancilla_dims.clone()
    }

    fn respond(&mut self, ctx: &mut PartyContext<'_>) -> Result<usize> {
        let mut registers = vec![MSG0, MSG1];
        registers.extend_from_slice(ctx.ancillas());
        ctx.apply(&self.spec.unitary, &registers)?;
        Ok(registers[self.spec.returned_register])
    }

    fn finalize(&mut self, ctx: &mut PartyContext<'_>, m: Bit) -> Result<BobOutput> {
        let kept = ctx.owned_registers();
        let k = ctx.measure(self.spec.final_measurement(m), &kept)?;
        let a0 = Bit::from_index(k >> 1);
        let a1 = Bit::from_index(k);
        Ok(BobOutput {
            output: a0,
            guesses: [Some(a0), Some(a1)],
        })
    }
}
