//! The weak one-out-of-two oblivious transfer protocol.
//!
//! A run holds a single global [`StateVector`]. Registers are laid out as
//! `[msg0, msg1, alice ancillas.., bob ancillas..]`; sending a qubit only
//! changes which party owns its register. Every party callback receives a
//! [`PartyContext`] that refuses operations on registers the party does not
//! currently own.

mod engine;
mod honest;
mod party;

use serde::{Deserialize, Serialize};

use crate::bit::Bit;
use crate::error::{invalid, Result};
use crate::quantum::DensityMatrix;

pub use engine::{run_ot, OtConfig, PartyContext, MSG0, MSG1};
pub use honest::{honest_alice, honest_bob, HonestAlice, HonestBob};
pub use party::{AliceParty, BobParty};

/// JSON schema tag written into every serialised transcript.
pub const OT_TRANSCRIPT_SCHEMA: &str = "qot.ot-transcript/1";

/// Largest total ancilla dimension a party may declare (two qubits).
pub const ANCILLA_CAP: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Alice,
    Bob,
}

impl std::fmt::Display for Role {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Role::Alice => "alice",
            Role::Bob => "bob",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OtInputs {
    pub a0: Bit,
    pub a1: Bit,
    pub i: Bit,
}

impl OtInputs {
    pub fn new(a0: Bit, a1: Bit, i: Bit) -> Self {
        Self { a0, a1, i }
    }

    /// All eight input combinations, `i` varying fastest.
    pub fn all() -> Vec<OtInputs> {
        let mut out = Vec::with_capacity(8);
        for a0 in Bit::BOTH {
            for a1 in Bit::BOTH {
                for i in Bit::BOTH {
                    out.push(OtInputs { a0, a1, i });
                }
            }
        }
        out
    }

    /// The bit Bob is supposed to learn.
    pub fn selected(&self) -> Bit {
        self.pair()[self.i.index()]
    }

    pub fn pair(&self) -> [Bit; 2] {
        [self.a0, self.a1]
    }
}

/// Alice's private randomness: `alpha ∈ {0, ½}` and the pad `h`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AliceSecretsDump")]
pub struct AliceSecrets {
    alpha: f64,
    h: Bit,
}

#[derive(Deserialize)]
struct AliceSecretsDump {
    alpha: f64,
    h: Bit,
}

impl TryFrom<AliceSecretsDump> for AliceSecrets {
    type Error = crate::error::Error;

    fn try_from(d: AliceSecretsDump) -> Result<Self> {
        AliceSecrets::new(d.alpha, d.h)
    }
}

impl AliceSecrets {
    pub fn new(alpha: f64, h: Bit) -> Result<Self> {
        if alpha != 0.0 && alpha != 0.5 {
            return Err(invalid(format!("alpha must be 0 or 1/2, got {alpha}")));
        }
        Ok(Self { alpha, h })
    }

    /// Maps a coin to `alpha`: 0 gives 0, 1 gives ½.
    pub fn from_coins(alpha_coin: Bit, h: Bit) -> Self {
        Self {
            alpha: if alpha_coin.is_one() { 0.5 } else { 0.0 },
            h,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn h(&self) -> Bit {
        self.h
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BobSecrets {
    pub beta: Bit,
}

/// One transfer of register ownership.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantumMessage {
    pub step: u8,
    pub from: Role,
    pub to: Role,
    pub registers: Vec<usize>,
}

/// What Alice sends in step 3, plus what she keeps for herself.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AliceReply {
    /// The classical message.
    pub m: Bit,
    /// Her measurement result, when her strategy has one.
    pub n: Option<Bit>,
    /// Her guess `i'` of Bob's selection.
    pub guess: Option<Bit>,
}

/// Bob's end-of-protocol output.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BobOutput {
    pub output: Bit,
    /// Bob's claimed knowledge of `(a0, a1)`; `None` means no information.
    pub guesses: [Option<Bit>; 2],
}

/// Alice's side of the protocol.
///
/// `prepare` starts a new run, so one value may be reused across runs.
pub trait AliceStrategy {
    /// Dimensions of the ancilla registers Alice holds from the start.
    fn ancilla_dims(&self) -> Vec<usize>;

    /// Step 1: the joint state of `[msg0, msg1, ancillas..]`, `msg0` least significant.
    fn prepare(
        &mut self,
        coins: &mut dyn crate::branching::Chooser,
    ) -> Result<crate::quantum::StateVector>;

    /// Step 3: processes the returned register and produces `m`.
    fn respond(&mut self, ctx: &mut PartyContext<'_>, returned: usize) -> Result<AliceReply>;

    /// Private randomness of the current run, if the strategy has any.
    fn secrets(&self) -> Option<AliceSecrets> {
        None
    }
}

/// Bob's side of the protocol.
///
/// `respond` starts a new run, so one value may be reused across runs.
pub trait BobStrategy {
    fn ancilla_dims(&self) -> Vec<usize>;

    /// Step 2: acts on Bob's registers and names the one sent back.
    fn respond(&mut self, ctx: &mut PartyContext<'_>) -> Result<usize>;

    /// Step 4: consumes `m`.
    fn finalize(&mut self, ctx: &mut PartyContext<'_>, m: Bit) -> Result<BobOutput>;

    fn secrets(&self) -> Option<BobSecrets> {
        None
    }
}

/// Full record of one protocol run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OtTranscript {
    pub schema: String,
    pub alice_secrets: Option<AliceSecrets>,
    pub bob_secrets: Option<BobSecrets>,
    pub quantum_message_log: Vec<QuantumMessage>,
    pub n: Option<Bit>,
    pub m: Bit,
    pub bob_output: Bit,
    pub bob_guesses: [Option<Bit>; 2],
    pub alice_guess: Option<Bit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_global_state: Option<DensityMatrix>,
}

impl OtTranscript {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
