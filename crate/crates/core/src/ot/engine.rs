use super::{
    AliceStrategy, BobStrategy, OtTranscript, QuantumMessage, Role, ANCILLA_CAP,
    OT_TRANSCRIPT_SCHEMA,
};
use crate::bit::Bit;
use crate::branching::Chooser;
use crate::error::{Error, Result};
use crate::quantum::{
    ComplexMatrix, DensityMatrix, Measurable, Measurement, RegisterLayout, StateVector, ALGEBRA_TOL,
};

/// Global register of the qubit encoding `a0`.
pub const MSG0: usize = 0;
/// Global register of the qubit encoding `a1`.
pub const MSG1: usize = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OtConfig {
    /// Keep the final global state in the transcript.
    pub retain_final_state: bool,
}

/// A party's handle on the shared state during one callback.
pub struct PartyContext<'a> {
    role: Role,
    state: &'a mut StateVector,
    owners: &'a [Role],
    ancillas: &'a [usize],
    chooser: &'a mut dyn Chooser,
}

impl<'a> PartyContext<'a> {
    pub fn role(&self) -> Role {
        self.role
    }

    /// Registers this party currently owns, ascending.
    pub fn owned_registers(&self) -> Vec<usize> {
        (0..self.owners.len())
            .filter(|&r| self.owners[r] == self.role)
            .collect()
    }

    /// Global indices of this party's ancillas.
    pub fn ancillas(&self) -> &[usize] {
        self.ancillas
    }

    pub fn register_dim(&self, register: usize) -> Option<usize> {
        self.state.layout().dims().get(register).copied()
    }

    fn check_access(&self, registers: &[usize]) -> Result<()> {
        for &r in registers {
            if self.owners.get(r) != Some(&self.role) {
                return Err(Error::AccessViolation {
                    role: self.role.to_string(),
                    register: r,
                });
            }
        }
        Ok(())
    }

    /// Applies `unitary` to `registers`, `registers[0]` least significant.
    pub fn apply(&mut self, unitary: &ComplexMatrix, registers: &[usize]) -> Result<()> {
        self.check_access(registers)?;
        if !unitary.is_unitary(ALGEBRA_TOL) {
            return Err(Error::ProtocolViolation(format!(
                "{} applied a non-unitary operator",
                self.role
            )));
        }
        self.state.apply_local(unitary, registers)
    }

    /// Measures `registers` and returns the outcome index.
    pub fn measure(&mut self, measurement: &Measurement, registers: &[usize]) -> Result<usize> {
        self.check_access(registers)?;
        let probs = self.state.outcome_probabilities(measurement, registers)?;
        let k = self.chooser.choose(&probs)?;
        *self.state = self.state.collapse(measurement, k, registers)?;
        Ok(k)
    }

    /// A fair private coin.
    pub fn coin(&mut self) -> Result<Bit> {
        coin(self.chooser)
    }
}

pub(crate) fn coin(chooser: &mut dyn Chooser) -> Result<Bit> {
    Ok(Bit::from_index(chooser.choose(&[0.5, 0.5])?))
}

fn check_ancillas(role: Role, dims: &[usize]) -> Result<()> {
    let total: usize = dims.iter().product();
    if dims.iter().any(|&d| d < 2) || total > ANCILLA_CAP {
        return Err(Error::ProtocolViolation(format!(
            "{role} declared ancillas {dims:?}; each must have dimension at least 2 and their total at most {ANCILLA_CAP}"
        )));
    }
    Ok(())
}

/// Runs the four protocol steps. All randomness is drawn from `chooser`
/// in the order Alice's prepare, Bob's respond, Alice's respond, Bob's finalize.
pub fn run_ot(
    alice: &mut dyn AliceStrategy,
    bob: &mut dyn BobStrategy,
    chooser: &mut dyn Chooser,
    config: &OtConfig,
) -> Result<OtTranscript> {
    let alice_anc = alice.ancilla_dims();
    let bob_anc = bob.ancilla_dims();
    check_ancillas(Role::Alice, &alice_anc)?;
    check_ancillas(Role::Bob, &bob_anc)?;

    // Step 1.
    let expected: Vec<usize> = [2, 2]
        .into_iter()
        .chain(alice_anc.iter().copied())
        .collect();
    let prepared = alice.prepare(chooser)?;
    if prepared.layout().dims() != expected.as_slice() {
        return Err(Error::ProtocolViolation(format!(
            "alice prepared registers {:?}, expected {expected:?}",
            prepared.layout().dims()
        )));
    }
    let mut state = if bob_anc.is_empty() {
        prepared
    } else {
        let vacuum = StateVector::basis(RegisterLayout::new(bob_anc.clone())?, 0)?;
        vacuum.tensor(&prepared)?
    };

    let alice_anc_regs: Vec<usize> = (2..2 + alice_anc.len()).collect();
    let bob_anc_regs: Vec<usize> =
        (2 + alice_anc.len()..2 + alice_anc.len() + bob_anc.len()).collect();
    let mut owners: Vec<Role> = std::iter::repeat(Role::Alice)
        .take(2 + alice_anc.len())
        .chain(std::iter::repeat(Role::Bob).take(bob_anc.len()))
        .collect();
    let mut log = Vec::with_capacity(2);

    owners[MSG0] = Role::Bob;
    owners[MSG1] = Role::Bob;
    log.push(QuantumMessage {
        step: 1,
        from: Role::Alice,
        to: Role::Bob,
        registers: vec![MSG0, MSG1],
    });

    // Step 2.
    let returned = bob.respond(&mut PartyContext {
        role: Role::Bob,
        state: &mut state,
        owners: &owners,
        ancillas: &bob_anc_regs,
        chooser: &mut *chooser,
    })?;
    if owners.get(returned) != Some(&Role::Bob) || state.layout().dims()[returned] != 2 {
        return Err(Error::ProtocolViolation(format!(
            "bob must return exactly one qubit he owns, named register {returned}"
        )));
    }
    owners[returned] = Role::Alice;
    log.push(QuantumMessage {
        step: 2,
        from: Role::Bob,
        to: Role::Alice,
        registers: vec![returned],
    });

    // Step 3.
    let reply = alice.respond(
        &mut PartyContext {
            role: Role::Alice,
            state: &mut state,
            owners: &owners,
            ancillas: &alice_anc_regs,
            chooser: &mut *chooser,
        },
        returned,
    )?;

    // Step 4.
    let output = bob.finalize(
        &mut PartyContext {
            role: Role::Bob,
            state: &mut state,
            owners: &owners,
            ancillas: &bob_anc_regs,
            chooser: &mut *chooser,
        },
        reply.m,
    )?;

    let alice_secrets = alice.secrets();
    let bob_secrets = bob.secrets();
    if let (Some(s), Some(n)) = (alice_secrets, reply.n) {
        if reply.m != n ^ s.h() {
            return Err(Error::Invariant("honest alice sent m != n xor h".into()));
        }
    }
    if let Some(s) = bob_secrets {
        if output.output != reply.m ^ s.beta {
            return Err(Error::Invariant("honest bob output != m xor beta".into()));
        }
    }

    Ok(OtTranscript {
        schema: OT_TRANSCRIPT_SCHEMA.to_string(),
        alice_secrets,
        bob_secrets,
        quantum_message_log: log,
        n: reply.n,
        m: reply.m,
        bob_output: output.output,
        bob_guesses: output.guesses,
        alice_guess: reply.guess,
        final_global_state: config
            .retain_final_state
            .then(|| DensityMatrix::from_pure(&state)),
    })
}
