use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::exact::{exact_ot_stats, ExactOtStats};
use crate::branching::{Chooser, SampledChooser};
use crate::error::{invalid, Result};
use crate::ot::{run_ot, AliceParty, BobParty, OtConfig, OtInputs};

/// Trials are split into this many independently seeded chunks.
pub const MC_CHUNKS: u64 = 64;
/// Xored into the seed for the single automatic re-run of a failed check.
pub const RESEED_LABEL: u64 = 0x7265_7365_6564_0001;

/// Seed of chunk `k` of a run seeded with `seed`.
pub fn chunk_seed(seed: u64, k: u64) -> u64 {
    seed.wrapping_add(k.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Event counts from sampled runs. `totals[e]` is the number of trials on
/// which event `e` was defined.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frequencies {
    pub trials: u64,
    pub seed: u64,
    pub counts: BTreeMap<String, u64>,
    pub totals: BTreeMap<String, u64>,
}

impl Frequencies {
    fn empty(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            counts: BTreeMap::new(),
            totals: BTreeMap::new(),
        }
    }

    pub fn record(&mut self, event: &str, hit: bool) {
        *self.totals.entry(event.to_string()).or_default() += 1;
        *self.counts.entry(event.to_string()).or_default() += hit as u64;
    }

    fn merge(mut self, other: Frequencies) -> Self {
        for (k, v) in other.counts {
            *self.counts.entry(k).or_default() += v;
        }
        for (k, v) in other.totals {
            *self.totals.entry(k).or_default() += v;
        }
        self
    }

    pub fn frequency(&self, event: &str) -> Option<f64> {
        let total = *self.totals.get(event)?;
        (total > 0).then(|| self.counts.get(event).copied().unwrap_or(0) as f64 / total as f64)
    }
}

/// Runs `trial` `trials` times over [`MC_CHUNKS`] seeded chunks in parallel.
/// Each trial gets its own master seed drawn from its chunk's stream, so
/// forked sub-streams differ between trials. The result does not depend on
/// the thread count.
pub fn sample<F>(trials: u64, seed: u64, trial: F) -> Result<Frequencies>
where
    F: Fn(&mut dyn Chooser, &mut Frequencies) -> Result<()> + Sync,
{
    if trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    let chunks: Vec<Frequencies> = (0..MC_CHUNKS)
        .into_par_iter()
        .map(|k| {
            let n = trials / MC_CHUNKS + u64::from(k < trials % MC_CHUNKS);
            let mut seeds = ChaCha8Rng::seed_from_u64(chunk_seed(seed, k));
            let mut f = Frequencies::empty(0, seed);
            for _ in 0..n {
                trial(&mut SampledChooser::new(seeds.random()), &mut f)?;
            }
            Ok(f)
        })
        .collect::<Result<_>>()?;
    Ok(chunks
        .into_iter()
        .fold(Frequencies::empty(trials, seed), Frequencies::merge))
}

/// Samples OT runs with inputs drawn from `dist`.
///
/// Events: `bob_correct`, plus `alice_guess_correct`, `a0_guess_correct` and
/// `a1_guess_correct` on trials where the corresponding guess exists.
pub fn monte_carlo_ot(
    alice: &AliceParty,
    bob: &BobParty,
    dist: &[(OtInputs, f64)],
    trials: u64,
    seed: u64,
) -> Result<Frequencies> {
    let weights: Vec<f64> = dist.iter().map(|(_, w)| *w).collect();
    sample(trials, seed, |chooser, f| {
        let inputs = dist[chooser.choose(&weights)?].0;
        let mut a = alice.strategy(inputs.a0, inputs.a1);
        let mut b = bob.strategy(inputs.i);
        let t = run_ot(&mut *a, &mut *b, chooser, &OtConfig::default())?;
        f.record("bob_correct", t.bob_output == inputs.selected());
        if let Some(g) = t.alice_guess {
            f.record("alice_guess_correct", g == inputs.i);
        }
        for (j, name) in ["a0_guess_correct", "a1_guess_correct"]
            .into_iter()
            .enumerate()
        {
            if let Some(g) = t.bob_guesses[j] {
                f.record(name, g == inputs.pair()[j]);
            }
        }
        Ok(())
    })
}

/// Exact probabilities of the events sampled by [`monte_carlo_ot`].
pub fn ot_event_probabilities(stats: &ExactOtStats) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    out.insert("bob_correct".to_string(), 1.0 - stats.bob_error_prob);
    if let Some(p) = stats.alice_guess_correct {
        out.insert("alice_guess_correct".to_string(), p);
    }
    for (j, name) in ["a0_guess_correct", "a1_guess_correct"]
        .into_iter()
        .enumerate()
    {
        if let Some(p) = stats.bob_guess_correct[j] {
            out.insert(name.to_string(), p);
        }
    }
    out
}

/// Comparison of one sampled frequency with its exact value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McCheck {
    pub event: String,
    pub exact: f64,
    pub frequency: f64,
    pub trials: u64,
    /// `√(p(1-p)/N)`.
    pub sigma: f64,
    pub within: bool,
    pub reseeded: bool,
}

fn four_sigma(event: &str, exact: f64, f: &Frequencies) -> Option<McCheck> {
    let trials = *f.totals.get(event)?;
    let frequency = f.frequency(event)?;
    let p = exact.clamp(0.0, 1.0);
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    Some(McCheck {
        event: event.to_string(),
        exact,
        frequency,
        trials,
        sigma,
        within: (frequency - exact).abs() <= 4.0 * sigma + 1e-12,
        reseeded: false,
    })
}

/// Compares `exact` against frequencies from `run(seed)`. Any failed check
/// is re-run once with `seed ^ RESEED_LABEL` and replaced by that result.
/// Events missing from the samples are skipped.
pub fn checked_against_exact(
    exact: &BTreeMap<String, f64>,
    seed: u64,
    run: impl Fn(u64) -> Result<Frequencies>,
) -> Result<Vec<McCheck>> {
    let first = run(seed)?;
    let mut checks: Vec<McCheck> = exact
        .iter()
        .filter_map(|(e, &p)| four_sigma(e, p, &first))
        .collect();
    if checks.iter().any(|c| !c.within) {
        let second = run(seed ^ RESEED_LABEL)?;
        for c in checks.iter_mut().filter(|c| !c.within) {
            if let Some(mut again) = four_sigma(&c.event, c.exact, &second) {
                again.reseeded = true;
                *c = again;
            }
        }
    }
    Ok(checks)
}

/// Exact statistics and 4σ checks of sampled OT runs against them.
pub fn monte_carlo_check(
    alice: &AliceParty,
    bob: &BobParty,
    dist: &[(OtInputs, f64)],
    trials: u64,
    seed: u64,
) -> Result<(ExactOtStats, Vec<McCheck>)> {
    let stats = exact_ot_stats(alice, bob, dist)?;
    let exact = ot_event_probabilities(&stats);
    let checks = checked_against_exact(&exact, seed, |s| {
        monte_carlo_ot(alice, bob, dist, trials, s)
    })?;
    Ok((stats, checks))
}
