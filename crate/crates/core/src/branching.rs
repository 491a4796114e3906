//! Randomness for protocol runs.
//!
//! Every random decision in a run (a party's coin or a measurement outcome)
//! goes through a [`Chooser`]. A [`SampledChooser`] draws from a seeded
//! generator; [`enumerate`] replays the run once per branch of the decision
//! tree and returns every branch with its exact probability.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::quantum::pick_weighted;

/// Branches whose weight falls below this are pruned during enumeration.
pub const PRUNE_WEIGHT: f64 = 1e-14;

pub trait Chooser {
    /// Picks an index with probability proportional to `weights`.
    fn choose(&mut self, weights: &[f64]) -> Result<usize>;

    /// Independent stream for a sub-protocol, keyed by `label`.
    fn fork(&mut self, label: u64) -> Box<dyn Chooser + '_>;
}

/// Seeded sampler for one run. Forks derive their seed as `seed ^ label`,
/// so repeated runs need a fresh sampler each.
#[derive(Clone, Debug)]
pub struct SampledChooser {
    seed: u64,
    rng: ChaCha8Rng,
}

impl SampledChooser {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl Chooser for SampledChooser {
    fn choose(&mut self, weights: &[f64]) -> Result<usize> {
        pick_weighted(weights, self.rng.random::<f64>())
    }

    fn fork(&mut self, label: u64) -> Box<dyn Chooser + '_> {
        Box::new(SampledChooser::new(self.seed ^ label))
    }
}

/// One leaf of the decision tree.
#[derive(Clone, Debug)]
pub struct Branch<T> {
    pub probability: f64,
    pub value: T,
}

struct Step {
    choice: usize,
    weights: Vec<f64>,
}

struct PathChooser<'p> {
    prefix: &'p [usize],
    steps: Vec<Step>,
    probability: f64,
}

impl Chooser for PathChooser<'_> {
    fn choose(&mut self, weights: &[f64]) -> Result<usize> {
        let total: f64 = weights.iter().map(|w| w.max(0.0)).sum();
        if !(total > 0.0) {
            return Err(Error::Internal(format!(
                "no positive weight among {weights:?}"
            )));
        }
        let depth = self.steps.len();
        let choice = match self.prefix.get(depth) {
            Some(&c) => c,
            None => weights
                .iter()
                .position(|&w| w / total > PRUNE_WEIGHT)
                .ok_or_else(|| Error::Internal("every branch below pruning weight".into()))?,
        };
        if choice >= weights.len() {
            return Err(Error::Internal(
                "replayed run diverged from its recorded decision tree".into(),
            ));
        }
        self.probability *= weights[choice] / total;
        self.steps.push(Step {
            choice,
            weights: weights.iter().map(|w| w.max(0.0) / total).collect(),
        });
        Ok(choice)
    }

    fn fork(&mut self, _label: u64) -> Box<dyn Chooser + '_> {
        Box::new(Reborrow(self))
    }
}

struct Reborrow<'a, C: Chooser + ?Sized>(&'a mut C);

impl<C: Chooser + ?Sized> Chooser for Reborrow<'_, C> {
    fn choose(&mut self, weights: &[f64]) -> Result<usize> {
        self.0.choose(weights)
    }

    fn fork(&mut self, label: u64) -> Box<dyn Chooser + '_> {
        self.0.fork(label)
    }
}

/// Runs `run` once for every branch of its decision tree.
///
/// `run` must be deterministic given the choices it receives. Branches with
/// relative weight at or below [`PRUNE_WEIGHT`] are skipped.
pub fn enumerate<T>(mut run: impl FnMut(&mut dyn Chooser) -> Result<T>) -> Result<Vec<Branch<T>>> {
    let mut out = Vec::new();
    let mut prefix: Vec<usize> = Vec::new();
    loop {
        let mut chooser = PathChooser {
            prefix: &prefix,
            steps: Vec::new(),
            probability: 1.0,
        };
        let value = run(&mut chooser)?;
        let PathChooser {
            steps, probability, ..
        } = chooser;
        if steps.len() < prefix.len() {
            return Err(Error::Internal(
                "replayed run made fewer decisions than its prefix".into(),
            ));
        }
        out.push(Branch { probability, value });

        // Advance to the next unexplored sibling, deepest first.
        let mut next = None;
        for depth in (0..steps.len()).rev() {
            let step = &steps[depth];
            if let Some(sib) =
                (step.choice + 1..step.weights.len()).find(|&k| step.weights[k] > PRUNE_WEIGHT)
            {
                next = Some((depth, sib));
                break;
            }
        }
        match next {
            Some((depth, sib)) => {
                prefix = steps[..depth].iter().map(|s| s.choice).collect();
                prefix.push(sib);
            }
            None => return Ok(out),
        }
    }
}
