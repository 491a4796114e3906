use super::engine::{coin, PartyContext};
use super::{AliceReply, AliceSecrets, AliceStrategy, BobOutput, BobSecrets, BobStrategy};
use crate::bit::Bit;
use crate::branching::Chooser;
use crate::error::{Error, Result};
use crate::quantum::{rotation, Measurement, StateVector};

#[derive(Clone, Debug)]
pub struct HonestAlice {
    a0: Bit,
    a1: Bit,
    secrets: Option<AliceSecrets>,
}

pub fn honest_alice(a0: Bit, a1: Bit) -> HonestAlice {
    HonestAlice {
        a0,
        a1,
        secrets: None,
    }
}

impl HonestAlice {
    /// Step 1 message for fixed secrets: `R_α|a1⊕h⟩ ⊗ R_α|a0⊕h⟩`.
    pub fn message(a0: Bit, a1: Bit, secrets: AliceSecrets) -> Result<StateVector> {
        let r = rotation(secrets.alpha())?;
        let high = StateVector::qubit(a1 ^ secrets.h()).evolve(&r)?;
        let low = StateVector::qubit(a0 ^ secrets.h()).evolve(&r)?;
        high.tensor(&low)
    }
}

impl AliceStrategy for HonestAlice {
    fn ancilla_dims(&self) -> Vec<usize> {
        Vec::new()
    }

    fn prepare(&mut self, coins: &mut dyn Chooser) -> Result<StateVector> {
        let alpha = coin(coins)?;
        let h = coin(coins)?;
        let secrets = AliceSecrets::from_coins(alpha, h);
        self.secrets = Some(secrets);
        Self::message(self.a0, self.a1, secrets)
    }

    fn respond(&mut self, ctx: &mut PartyContext<'_>, returned: usize) -> Result<AliceReply> {
        let s = self
            .secrets
            .ok_or_else(|| Error::Internal("alice responded before preparing".into()))?;
        ctx.apply(&rotation(-s.alpha())?, &[returned])?;
        let n = Bit::from_index(ctx.measure(&Measurement::computational(2)?, &[returned])?);
        Ok(AliceReply {
            m: n ^ s.h(),
            n: Some(n),
            guess: None,
        })
    }

    fn secrets(&self) -> Option<AliceSecrets> {
        self.secrets
    }
}

#[derive(Clone, Debug)]
pub struct HonestBob {
    i: Bit,
    beta: Option<Bit>,
}

pub fn honest_bob(i: Bit) -> HonestBob {
    HonestBob { i, beta: None }
}

impl BobStrategy for HonestBob {
    fn ancilla_dims(&self) -> Vec<usize> {
        Vec::new()
    }

    fn respond(&mut self, ctx: &mut PartyContext<'_>) -> Result<usize> {
        let beta = ctx.coin()?;
        self.beta = Some(beta);
        let register = self.i.index();
        ctx.apply(&rotation(beta.as_u8() as f64)?, &[register])?;
        Ok(register)
    }

    fn finalize(&mut self, _ctx: &mut PartyContext<'_>, m: Bit) -> Result<BobOutput> {
        let beta = self
            .beta
            .ok_or_else(|| Error::Internal("bob finalized before responding".into()))?;
        let output = m ^ beta;
        let mut guesses = [None, None];
        guesses[self.i.index()] = Some(output);
        Ok(BobOutput { output, guesses })
    }

    fn secrets(&self) -> Option<BobSecrets> {
        self.beta.map(|beta| BobSecrets { beta })
    }
}
