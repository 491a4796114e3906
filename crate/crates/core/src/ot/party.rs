use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{honest_alice, honest_bob, AliceStrategy, BobStrategy};
use crate::adversaries::{MaliciousAlice, MaliciousAliceSpec, MaliciousBob, MaliciousBobSpec};
use crate::bit::Bit;

/// Alice's behaviour, independent of her inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "spec")]
pub enum AliceParty {
    Honest,
    Malicious(Arc<MaliciousAliceSpec>),
}

impl AliceParty {
    /// The strategy Alice runs holding `(a0, a1)`.
    ///
    /// A malicious Alice playing for `(a0, a1)` flips every decoded message
    /// by `a0`, so a spec built for `(0, 0)` serves `(1, 1)` as well.
    pub fn strategy(&self, a0: Bit, a1: Bit) -> Box<dyn AliceStrategy + '_> {
        match self {
            AliceParty::Honest => Box::new(honest_alice(a0, a1)),
            AliceParty::Malicious(spec) => Box::new(MaliciousAlice::new(spec, a0)),
        }
    }

    pub fn is_honest(&self) -> bool {
        matches!(self, AliceParty::Honest)
    }
}

/// Bob's behaviour, independent of his selection bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "spec")]
pub enum BobParty {
    Honest,
    Malicious(Arc<MaliciousBobSpec>),
}

impl BobParty {
    /// The strategy Bob runs with selection `i`; malicious Bob ignores `i`.
    pub fn strategy(&self, i: Bit) -> Box<dyn BobStrategy + '_> {
        match self {
            BobParty::Honest => Box::new(honest_bob(i)),
            BobParty::Malicious(spec) => Box::new(MaliciousBob::new(spec)),
        }
    }

    pub fn is_honest(&self) -> bool {
        matches!(self, BobParty::Honest)
    }
}
