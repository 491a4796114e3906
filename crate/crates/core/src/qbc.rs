//! Cheat-sensitive bit commitment built from two OT executions.
//!
//! Depositing: Alice draws `a0..a3`, Bob draws `b'` and `c`. The OT at index
//! `c` transfers `(a_{2c}, a_{2c+1})` with selection `b'`; the other one uses
//! the committed bit `b`. Both run to completion (index 0 first) before Bob
//! reveals `c`. Revealing: Bob announces `b` and `v_{1-c}`. Alice announces the
//! pair behind index `c` so Bob can run the sealing test, and she herself
//! runs the binding test on `v_{1-c}`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::adversaries::{MaliciousAliceSpec, MaliciousBobSpec};
use crate::bit::Bit;
use crate::branching::Chooser;
use crate::error::{invalid, Error, Result};
use crate::ot::{run_ot, AliceParty, BobParty, OtConfig, OtInputs, OtTranscript};

pub const QBC_TRANSCRIPT_SCHEMA: &str = "qot.qbc-transcript/1";

/// Fork labels of the two OT executions. A sampled run seeds OT `k` with
/// `master_seed ^ OT_STREAM_LABELS[k]`.
pub const OT_STREAM_LABELS: [u64; 2] = [0x4f54_0000_0000_0000, 0x4f54_0000_0000_0001];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QbcInputs {
    pub b: Bit,
    pub a: [Bit; 4],
    pub b_prime: Bit,
    pub c: Bit,
}

impl QbcInputs {
    /// `(a_{2k}, a_{2k+1})`.
    pub fn pair(&self, k: Bit) -> (Bit, Bit) {
        (self.a[2 * k.index()], self.a[2 * k.index() + 1])
    }

    /// Selection bit of OT `k`.
    pub fn selection(&self, k: Bit) -> Bit {
        if k == self.c {
            self.b_prime
        } else {
            self.b
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestResult {
    Pass,
    Fail,
}

impl TestResult {
    fn from_pass(pass: bool) -> Self {
        if pass {
            TestResult::Pass
        } else {
            TestResult::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == TestResult::Pass
    }
}

/// Alice's decision about the committed value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AliceVerdict {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "err")]
    Err,
}

impl AliceVerdict {
    pub fn opened(self) -> Option<Bit> {
        match self {
            AliceVerdict::Zero => Some(Bit::ZERO),
            AliceVerdict::One => Some(Bit::ONE),
            AliceVerdict::Err => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BobVerdict {
    Ok,
    Err,
}

/// Bob rejects unless `vc` is the ideal OT value of `pair` at `b_prime`.
pub fn sealing_test(vc: Bit, pair: (Bit, Bit), b_prime: Bit) -> TestResult {
    TestResult::from_pass(vc == if b_prime.is_one() { pair.1 } else { pair.0 })
}

/// Alice rejects unless `v_other` is the ideal OT value of `pair` at `b`.
pub fn binding_test(v_other: Bit, pair: (Bit, Bit), b: Bit) -> TestResult {
    TestResult::from_pass(v_other == if b.is_one() { pair.1 } else { pair.0 })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum QbcAlice {
    Honest,
    /// Runs `spec` in OT `index` with both transferred bits equal, and
    /// reads `b` off the guess when that OT turns out to carry it.
    AttackOt {
        index: Bit,
        spec: Arc<MaliciousAliceSpec>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum QbcBob {
    Honest,
    /// Deposits honestly, then opens the complement of the committed bit.
    FlipOpen,
    /// Runs `spec` in OT `1 - c` and opens bit `x` with its guess of the
    /// `x`-th transferred bit.
    CheatOt {
        spec: Arc<MaliciousBobSpec>,
    },
}

/// Alice's classical record at the end of the depositing phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AliceDepositView {
    pub a: [Bit; 4],
    pub alpha_half: [Option<bool>; 2],
    pub h: [Option<Bit>; 2],
    pub n: [Option<Bit>; 2],
    pub m: [Bit; 2],
    pub c: Bit,
}

/// State after the depositing phase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QbcDeposit {
    pub inputs: QbcInputs,
    pub ot_transcripts: [OtTranscript; 2],
    pub c_revealed: Bit,
    /// Bob's OT outputs `v_0, v_1`.
    pub values: [Bit; 2],
    /// The `v_{1-c}` Bob announces when opening 0 and when opening 1.
    pub openings: [Bit; 2],
    pub alice_guess: Option<Bit>,
}

impl QbcDeposit {
    pub fn alice_view(&self) -> AliceDepositView {
        let t = &self.ot_transcripts;
        AliceDepositView {
            a: self.inputs.a,
            alpha_half: [0, 1].map(|k| t[k].alice_secrets.map(|s| s.alpha() != 0.0)),
            h: [0, 1].map(|k| t[k].alice_secrets.map(|s| s.h())),
            n: [t[0].n, t[1].n],
            m: [t[0].m, t[1].m],
            c: self.c_revealed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QbcTranscript {
    pub schema: String,
    pub inputs: QbcInputs,
    pub ot_transcripts: [OtTranscript; 2],
    pub c_revealed: Bit,
    pub revealed_b: Bit,
    pub sealing_test: TestResult,
    pub binding_test: TestResult,
    pub alice_verdict: AliceVerdict,
    pub bob_verdict: BobVerdict,
    pub alice_guess: Option<Bit>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QbcOutcome {
    pub committed_value_opened: Bit,
    pub alice_detected_cheat: bool,
    pub bob_detected_cheat: bool,
}

impl QbcTranscript {
    pub fn outcome(&self) -> QbcOutcome {
        QbcOutcome {
            committed_value_opened: self.revealed_b,
            alice_detected_cheat: self.alice_verdict == AliceVerdict::Err,
            bob_detected_cheat: self.bob_verdict == BobVerdict::Err,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn coin(chooser: &mut dyn Chooser) -> Result<Bit> {
    Ok(Bit::from_index(chooser.choose(&[0.5, 0.5])?))
}

/// Alice's and Bob's classical draws, in order `a0..a3`, `b'`, `c`.
/// An attacking Alice then copies `a_{2k}` over `a_{2k+1}` for her OT `k`.
pub fn draw_inputs(b: Bit, alice: &QbcAlice, chooser: &mut dyn Chooser) -> Result<QbcInputs> {
    let mut a = [Bit::ZERO; 4];
    for x in &mut a {
        *x = coin(chooser)?;
    }
    let b_prime = coin(chooser)?;
    let c = coin(chooser)?;
    if let QbcAlice::AttackOt { index, .. } = alice {
        a[2 * index.index() + 1] = a[2 * index.index()];
    }
    Ok(QbcInputs { b, a, b_prime, c })
}

impl QbcAlice {
    /// Alice's behaviour inside OT `k`.
    pub fn ot_party(&self, k: Bit) -> AliceParty {
        match self {
            QbcAlice::AttackOt { index, spec } if *index == k => {
                AliceParty::Malicious(spec.clone())
            }
            _ => AliceParty::Honest,
        }
    }

    /// Whether Alice still flips a coin for her guess after the OTs.
    pub fn needs_guess_coin(&self, inputs: &QbcInputs) -> bool {
        matches!(self, QbcAlice::AttackOt { index, .. } if *index == inputs.c)
    }
}

impl QbcBob {
    /// Bob's behaviour inside OT `k` given his choice of `c`.
    pub fn ot_party(&self, k: Bit, c: Bit) -> BobParty {
        match self {
            QbcBob::CheatOt { spec } if k != c => BobParty::Malicious(spec.clone()),
            _ => BobParty::Honest,
        }
    }
}

/// The OT inputs of execution `k`: Alice's pair and Bob's selection.
pub fn ot_inputs(inputs: &QbcInputs, k: Bit) -> OtInputs {
    let (a0, a1) = inputs.pair(k);
    OtInputs::new(a0, a1, inputs.selection(k))
}

/// Completes a deposit from the two OT transcripts. `guess_coin` must be
/// given exactly when [`QbcAlice::needs_guess_coin`] holds.
pub fn assemble_deposit(
    inputs: QbcInputs,
    alice: &QbcAlice,
    bob: &QbcBob,
    ot_transcripts: [OtTranscript; 2],
    guess_coin: Option<Bit>,
) -> Result<QbcDeposit> {
    let c = inputs.c;
    let other = !c;
    let values = [ot_transcripts[0].bob_output, ot_transcripts[1].bob_output];
    let openings = match bob {
        QbcBob::CheatOt { .. } => match ot_transcripts[other.index()].bob_guesses {
            [Some(g0), Some(g1)] => [g0, g1],
            _ => {
                return Err(Error::ProtocolViolation(
                    "cheating bob has no guess to open with".into(),
                ))
            }
        },
        _ => [values[other.index()]; 2],
    };
    let alice_guess =
        match alice {
            QbcAlice::Honest => None,
            QbcAlice::AttackOt { index, .. } if *index == other => {
                ot_transcripts[index.index()].alice_guess
            }
            QbcAlice::AttackOt { .. } => Some(guess_coin.ok_or_else(|| {
                Error::Internal("attacking alice needs a coin for her guess".into())
            })?),
        };
    Ok(QbcDeposit {
        inputs,
        ot_transcripts,
        c_revealed: c,
        values,
        openings,
        alice_guess,
    })
}

/// Runs the depositing phase for committed bit `b`.
///
/// Randomness order: [`draw_inputs`], OT 0 on a fork labelled
/// `OT_STREAM_LABELS[0]`, OT 1 likewise, then Alice's guess coin if needed.
pub fn deposit(
    b: Bit,
    alice: &QbcAlice,
    bob: &QbcBob,
    chooser: &mut dyn Chooser,
) -> Result<QbcDeposit> {
    let inputs = draw_inputs(b, alice, chooser)?;
    let mut transcripts = Vec::with_capacity(2);
    for k in Bit::BOTH {
        let x = ot_inputs(&inputs, k);
        let a_party = alice.ot_party(k);
        let b_party = bob.ot_party(k, inputs.c);
        let mut a = a_party.strategy(x.a0, x.a1);
        let mut bb = b_party.strategy(x.i);
        let mut stream = chooser.fork(OT_STREAM_LABELS[k.index()]);
        transcripts.push(run_ot(
            &mut *a,
            &mut *bb,
            &mut *stream,
            &OtConfig::default(),
        )?);
    }
    let t1 = transcripts.pop().expect("two transcripts");
    let t0 = transcripts.pop().expect("two transcripts");
    let guess_coin = if alice.needs_guess_coin(&inputs) {
        Some(coin(chooser)?)
    } else {
        None
    };
    assemble_deposit(inputs, alice, bob, [t0, t1], guess_coin)
}

/// Revealing phase with Bob announcing `open`.
pub fn reveal(dep: &QbcDeposit, open: Bit) -> QbcTranscript {
    let c = dep.c_revealed;
    let sealing = sealing_test(
        dep.values[c.index()],
        dep.inputs.pair(c),
        dep.inputs.b_prime,
    );
    let binding = binding_test(dep.openings[open.index()], dep.inputs.pair(!c), open);
    let alice_verdict = match (binding, open.is_one()) {
        (TestResult::Fail, _) => AliceVerdict::Err,
        (TestResult::Pass, false) => AliceVerdict::Zero,
        (TestResult::Pass, true) => AliceVerdict::One,
    };
    QbcTranscript {
        schema: QBC_TRANSCRIPT_SCHEMA.to_string(),
        inputs: dep.inputs,
        ot_transcripts: dep.ot_transcripts.clone(),
        c_revealed: c,
        revealed_b: open,
        sealing_test: sealing,
        binding_test: binding,
        alice_verdict,
        bob_verdict: if sealing.passed() {
            BobVerdict::Ok
        } else {
            BobVerdict::Err
        },
        alice_guess: dep.alice_guess,
    }
}

/// Deposit followed by reveal. `FlipOpen` opens `!b`; everyone else opens `b`.
pub fn run_qbc(
    b: Bit,
    alice: &QbcAlice,
    bob: &QbcBob,
    chooser: &mut dyn Chooser,
) -> Result<QbcTranscript> {
    let dep = deposit(b, alice, bob, chooser)?;
    let open = match bob {
        QbcBob::FlipOpen => !b,
        _ => b,
    };
    Ok(reveal(&dep, open))
}

/// Parses `"0"`, `"1"` or `"err"`.
impl std::str::FromStr for AliceVerdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "0" => Ok(AliceVerdict::Zero),
            "1" => Ok(AliceVerdict::One),
            "err" => Ok(AliceVerdict::Err),
            other => Err(invalid(format!("unknown verdict {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const O: Bit = Bit::ZERO;
    const I: Bit = Bit::ONE;

    #[test]
    fn sealing_examples() {
        assert_eq!(sealing_test(O, (O, I), O), TestResult::Pass);
        assert_eq!(sealing_test(O, (O, I), I), TestResult::Fail);
        for bp in Bit::BOTH {
            assert_eq!(sealing_test(I, (I, I), bp), TestResult::Pass);
        }
    }

    #[test]
    fn binding_examples() {
        assert_eq!(binding_test(I, (O, I), I), TestResult::Pass);
        assert_eq!(binding_test(I, (O, I), O), TestResult::Fail);
        for b in Bit::BOTH {
            assert_eq!(binding_test(O, (O, O), b), TestResult::Pass);
        }
    }

    #[test]
    fn verdict_serde() {
        assert_eq!(
            serde_json::to_string(&AliceVerdict::Err).unwrap(),
            "\"err\""
        );
        assert_eq!(serde_json::to_string(&AliceVerdict::One).unwrap(), "\"1\"");
        assert_eq!("0".parse::<AliceVerdict>().unwrap(), AliceVerdict::Zero);
    }
}
