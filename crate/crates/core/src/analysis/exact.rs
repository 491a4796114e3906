use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bit::Bit;
use crate::branching::{enumerate, Branch};
use crate::error::{invalid, Result};
use crate::ot::{
    run_ot, AliceParty, AliceSecrets, BobParty, BobSecrets, OtConfig, OtInputs, OtTranscript,
};
use crate::quantum::ALGEBRA_TOL;

/// Weighted OT inputs.
pub type InputDistribution = Vec<(OtInputs, f64)>;

/// All eight inputs, uniformly.
pub fn uniform_inputs() -> InputDistribution {
    OtInputs::all().into_iter().map(|x| (x, 0.125)).collect()
}

/// Fixed `(a0, a1)` with uniform `i`.
pub fn uniform_selection(a0: Bit, a1: Bit) -> InputDistribution {
    Bit::BOTH
        .into_iter()
        .map(|i| (OtInputs::new(a0, a1, i), 0.5))
        .collect()
}

fn check_distribution(dist: &[(OtInputs, f64)]) -> Result<()> {
    if dist.is_empty() {
        return Err(invalid("input distribution is empty"));
    }
    if dist.iter().any(|(_, w)| !(w.is_finite() && *w >= 0.0)) {
        return Err(invalid("input weights must be finite and non-negative"));
    }
    let total: f64 = dist.iter().map(|(_, w)| w).sum();
    if (total - 1.0).abs() > ALGEBRA_TOL {
        return Err(invalid(format!("input weights sum to {total}, not 1")));
    }
    Ok(())
}

/// Every branch of one OT run on fixed inputs, with exact probabilities.
pub fn ot_branches(
    alice: &AliceParty,
    bob: &BobParty,
    inputs: OtInputs,
) -> Result<Vec<Branch<OtTranscript>>> {
    enumerate(|chooser| {
        let mut a = alice.strategy(inputs.a0, inputs.a1);
        let mut b = bob.strategy(inputs.i);
        run_ot(&mut *a, &mut *b, chooser, &OtConfig::default())
    })
}

/// One branch of the exact computation. `probability` is conditional on `inputs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchRecord {
    pub inputs: OtInputs,
    pub probability: f64,
    pub alice_secrets: Option<AliceSecrets>,
    pub bob_secrets: Option<BobSecrets>,
    pub n: Option<Bit>,
    pub m: Bit,
    pub bob_output: Bit,
    pub bob_guesses: [Option<Bit>; 2],
    pub alice_guess: Option<Bit>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactOtStats {
    /// `Prob[bob_output != a_i]`.
    pub bob_error_prob: f64,
    /// `Prob[i' = i] - ½`. With no explicit guess, the best guess from
    /// Alice's classical record is used.
    pub alice_advantage: f64,
    /// `Prob[i' = i]` when every branch carries an explicit guess.
    pub alice_guess_correct: Option<f64>,
    /// L1 distance between Alice's classical records for `i = 0` and `i = 1`.
    pub alice_view_l1: Option<f64>,
    /// `Prob[a_j' = a_j]`, counting a missing guess as a coin flip.
    pub bob_pair_stats: [f64; 2],
    /// `Prob[a_j' = a_j]` when every branch carries a guess of `a_j`.
    pub bob_guess_correct: [Option<f64>; 2],
    pub branch_table: Vec<BranchRecord>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct AliceRecord {
    a0: Bit,
    a1: Bit,
    alpha_half: Option<bool>,
    h: Option<Bit>,
    n: Option<Bit>,
    m: Bit,
    guess: Option<Bit>,
}

/// Exact statistics of the OT protocol, summing over every branch of every
/// input in `dist`.
pub fn exact_ot_stats(
    alice: &AliceParty,
    bob: &BobParty,
    dist: &[(OtInputs, f64)],
) -> Result<ExactOtStats> {
    check_distribution(dist)?;
    let per_input: Vec<Vec<Branch<OtTranscript>>> = dist
        .par_iter()
        .map(|(inputs, _)| ot_branches(alice, bob, *inputs))
        .collect::<Result<_>>()?;

    let mut bob_error = 0.0;
    let mut guess_correct = 0.0;
    let mut all_guess = true;
    let mut pair = [0.0; 2];
    let mut pair_known = [0.0; 2];
    let mut all_pair = [true; 2];
    let mut views: BTreeMap<AliceRecord, [f64; 2]> = BTreeMap::new();
    let mut selection_mass = [0.0; 2];
    let mut table = Vec::new();

    for ((inputs, w), branches) in dist.iter().zip(&per_input) {
        let truth = inputs.pair();
        selection_mass[inputs.i.index()] += w;
        for br in branches {
            let t = &br.value;
            let p = w * br.probability;
            if t.bob_output != inputs.selected() {
                bob_error += p;
            }
            match t.alice_guess {
                Some(g) if g == inputs.i => guess_correct += p,
                Some(_) => {}
                None => all_guess = false,
            }
            for j in 0..2 {
                match t.bob_guesses[j] {
                    Some(g) => {
                        let hit = if g == truth[j] { p } else { 0.0 };
                        pair[j] += hit;
                        pair_known[j] += hit;
                    }
                    None => {
                        pair[j] += 0.5 * p;
                        all_pair[j] = false;
                    }
                }
            }
            let key = AliceRecord {
                a0: inputs.a0,
                a1: inputs.a1,
                alpha_half: t.alice_secrets.map(|s| s.alpha() != 0.0),
                h: t.alice_secrets.map(|s| s.h()),
                n: t.n,
                m: t.m,
                guess: t.alice_guess,
            };
            views.entry(key).or_insert([0.0; 2])[inputs.i.index()] += p;
            table.push(BranchRecord {
                inputs: *inputs,
                probability: br.probability,
                alice_secrets: t.alice_secrets,
                bob_secrets: t.bob_secrets,
                n: t.n,
                m: t.m,
                bob_output: t.bob_output,
                bob_guesses: t.bob_guesses,
                alice_guess: t.alice_guess,
            });
        }
    }

    let alice_guess_correct = all_guess.then_some(guess_correct);
    let alice_advantage = match alice_guess_correct {
        Some(c) => c - 0.5,
        None => views.values().map(|m| m[0].max(m[1])).sum::<f64>() - 0.5,
    };
    let alice_view_l1 = (selection_mass[0] > 0.0 && selection_mass[1] > 0.0).then(|| {
        0.5 * views
            .values()
            .map(|m| (m[0] / selection_mass[0] - m[1] / selection_mass[1]).abs())
            .sum::<f64>()
    });

    Ok(ExactOtStats {
        bob_error_prob: bob_error,
        alice_advantage,
        alice_guess_correct,
        alice_view_l1,
        bob_pair_stats: pair,
        bob_guess_correct: [0, 1].map(|j| all_pair[j].then_some(pair_known[j])),
        branch_table: table,
    })
}
