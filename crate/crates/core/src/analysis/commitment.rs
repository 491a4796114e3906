use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::exact::ot_branches;
use super::montecarlo::{checked_against_exact, sample, McCheck};
use super::report::{SweepReport, SweepRow};
use crate::adversaries::{alice_attack, bob_family_on_grid, AttackParams, ATTACK_GRID};
use crate::bit::Bit;
use crate::branching::{enumerate, Branch, Chooser};
use crate::error::{invalid, Result};
use crate::ot::{AliceParty, BobParty, OtInputs, OtTranscript};
use crate::qbc::{
    assemble_deposit, draw_inputs, ot_inputs, reveal, run_qbc, AliceVerdict, BobVerdict, QbcAlice,
    QbcBob, QbcDeposit, QbcInputs,
};
use crate::quantum::ALGEBRA_TOL;

/// Frontier rows with `|p0 - q0|` at or below this are not binding-relevant.
pub const RELEVANCE_THRESHOLD: f64 = 0.1;

/// Exact outcome probabilities of one deposit followed by either opening.
///
/// `p*` are Alice's verdict probabilities when Bob opens 0, `q*` when he
/// opens 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QbcStats {
    pub p0: f64,
    pub p1: f64,
    pub p_err: f64,
    pub q0: f64,
    pub q1: f64,
    pub q_err: f64,
    /// `Prob[Alice's guess = b] - ½`, a missing guess counting as a coin.
    pub alice_guess_advantage: f64,
    /// Probability that Bob's sealing test rejects.
    pub bob_detection_prob: f64,
}

fn verdict_slot(v: AliceVerdict) -> usize {
    match v {
        AliceVerdict::Zero => 0,
        AliceVerdict::One => 1,
        AliceVerdict::Err => 2,
    }
}

type OtKey = (OtInputs, bool, bool);

fn ot_job(
    alice: &QbcAlice,
    bob: &QbcBob,
    inputs: &QbcInputs,
    k: Bit,
) -> (OtKey, AliceParty, BobParty) {
    let x = ot_inputs(inputs, k);
    let a = alice.ot_party(k);
    let b = bob.ot_party(k, inputs.c);
    ((x, !a.is_honest(), !b.is_honest()), a, b)
}

/// Every branch of the depositing phase with exact probabilities.
///
/// Equivalent to enumerating [`crate::qbc::deposit`] but composes the two OT
/// executions from cached per-OT branch lists, since they share neither
/// registers nor randomness.
pub fn deposit_branches(b: Bit, alice: &QbcAlice, bob: &QbcBob) -> Result<Vec<Branch<QbcDeposit>>> {
    let outer = enumerate(|chooser| draw_inputs(b, alice, chooser))?;
    let mut jobs: BTreeMap<OtKey, (AliceParty, BobParty)> = BTreeMap::new();
    for br in &outer {
        for k in Bit::BOTH {
            let (key, a, bp) = ot_job(alice, bob, &br.value, k);
            jobs.entry(key).or_insert((a, bp));
        }
    }
    let cache: BTreeMap<OtKey, Vec<Branch<OtTranscript>>> = jobs
        .into_par_iter()
        .map(|(key, (a, bp))| Ok((key, ot_branches(&a, &bp, key.0)?)))
        .collect::<Result<_>>()?;

    let mut out = Vec::new();
    for br in &outer {
        let inputs = br.value;
        let [l0, l1] = Bit::BOTH.map(|k| &cache[&ot_job(alice, bob, &inputs, k).0]);
        let coins: &[(Option<Bit>, f64)] = if alice.needs_guess_coin(&inputs) {
            &[(Some(Bit::ZERO), 0.5), (Some(Bit::ONE), 0.5)]
        } else {
            &[(None, 1.0)]
        };
        for t0 in l0 {
            for t1 in l1 {
                for &(coin, wc) in coins {
                    let value = assemble_deposit(
                        inputs,
                        alice,
                        bob,
                        [t0.value.clone(), t1.value.clone()],
                        coin,
                    )?;
                    out.push(Branch {
                        probability: br.probability * t0.probability * t1.probability * wc,
                        value,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Exact [`QbcStats`] for committed bit `b`.
pub fn qbc_stats(alice: &QbcAlice, bob: &QbcBob, b: Bit) -> Result<QbcStats> {
    let branches = deposit_branches(b, alice, bob)?;
    let mut p = [0.0; 3];
    let mut q = [0.0; 3];
    let mut guess = 0.0;
    let mut detect = 0.0;
    for br in &branches {
        let w = br.probability;
        let open0 = reveal(&br.value, Bit::ZERO);
        let open1 = reveal(&br.value, Bit::ONE);
        p[verdict_slot(open0.alice_verdict)] += w;
        q[verdict_slot(open1.alice_verdict)] += w;
        if open0.bob_verdict == BobVerdict::Err {
            detect += w;
        }
        guess += match br.value.alice_guess {
            Some(g) if g == b => w,
            Some(_) => 0.0,
            None => 0.5 * w,
        };
    }
    Ok(QbcStats {
        p0: p[0],
        p1: p[1],
        p_err: p[2],
        q0: q[0],
        q1: q[1],
        q_err: q[2],
        alice_guess_advantage: guess - 0.5,
        bob_detection_prob: detect,
    })
}

/// Alice's advantage on a uniform `b` against honest Bob, and the probability
/// that Bob's sealing test catches her.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SealingStats {
    pub advantage: f64,
    pub detection: f64,
}

impl SealingStats {
    /// `detection - advantage²/32`.
    pub fn quadratic_margin(&self) -> f64 {
        self.detection - self.advantage.powi(2) / 32.0
    }

    /// `4√detection - advantage`; negative means the advantage exceeds `4√ε` at `ε = detection`.
    pub fn margin_4_sqrt_eps(&self) -> f64 {
        4.0 * self.detection.sqrt() - self.advantage
    }

    /// `4√(2·detection) - advantage`.
    pub fn margin_4_sqrt_2eps(&self) -> f64 {
        4.0 * (2.0 * self.detection).sqrt() - self.advantage
    }
}

/// Exact [`SealingStats`] for a uniform committed bit.
pub fn qbc_sealing_stats(alice: &QbcAlice) -> Result<SealingStats> {
    let mut advantage = 0.0;
    let mut detection = 0.0;
    for b in Bit::BOTH {
        let s = qbc_stats(alice, &QbcBob::Honest, b)?;
        advantage += 0.5 * s.alice_guess_advantage;
        detection += 0.5 * s.bob_detection_prob;
    }
    Ok(SealingStats {
        advantage,
        detection,
    })
}

/// The explicit Alice attack run inside OT 0 of the commitment.
pub fn lifted_alice_attack(epsilon: f64) -> Result<QbcAlice> {
    Ok(QbcAlice::AttackOt {
        index: Bit::ZERO,
        spec: Arc::new(alice_attack(AttackParams::new(epsilon)?)?),
    })
}

/// Checks `detection ≥ advantage²/32` for the lifted Alice attack at each
/// `ε`, with margins against `4√ε` and `4√(2ε)` at `ε = detection`.
pub fn verify_sealing(epsilon_grid: &[f64]) -> Result<SweepReport> {
    if epsilon_grid.is_empty() {
        return Err(invalid("sealing needs at least one epsilon"));
    }
    let rows: Vec<SweepRow> = epsilon_grid
        .par_iter()
        .map(|&eps| {
            let s = qbc_sealing_stats(&lifted_alice_attack(eps)?)?;
            let mut row = SweepRow::new("lifted_alice_attack", "uniform b", Some(eps))
                .with("advantage", s.advantage)
                .with("detection", s.detection)
                .with("quadratic_bound", s.advantage.powi(2) / 32.0)
                .with("quadratic_margin", s.quadratic_margin())
                .with("margin_4sqrt_eps", s.margin_4_sqrt_eps())
                .with("margin_4sqrt_2eps", s.margin_4_sqrt_2eps());
            if s.quadratic_margin() < -ALGEBRA_TOL {
                row.violation = Some(format!(
                    "detection {:.6} below advantage^2/32 = {:.6}",
                    s.detection,
                    s.advantage.powi(2) / 32.0
                ));
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let mut report = SweepReport::new("sealing")
        .meta("epsilon_grid", epsilon_grid)
        .meta("tolerance", ALGEBRA_TOL);
    for row in rows {
        report.push(row);
    }
    report
        .summary
        .insert("violations".into(), report.violations.len() as f64);
    Ok(report)
}

/// A cheating committer: deposit behaviour plus the committed bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BindingCandidate {
    pub name: String,
    pub epsilon: Option<f64>,
    pub bob: QbcBob,
    pub b: Bit,
}

/// Flip-open commits to 0 and 1, then every member of
/// `random_bob_family(seed, count)` cheating in the unchecked OT.
pub fn default_binding_family(seed: u64, count: usize) -> Result<Vec<BindingCandidate>> {
    binding_family_on_grid(&ATTACK_GRID, seed, count)
}

/// [`default_binding_family`] with the explicit Bob attacks taken at `grid`.
pub fn binding_family_on_grid(
    grid: &[f64],
    seed: u64,
    count: usize,
) -> Result<Vec<BindingCandidate>> {
    let mut out: Vec<BindingCandidate> = Bit::BOTH
        .into_iter()
        .map(|b| BindingCandidate {
            name: format!("flip_open(b={b})"),
            epsilon: None,
            bob: QbcBob::FlipOpen,
            b,
        })
        .collect();
    for member in bob_family_on_grid(grid, seed, count)? {
        out.push(BindingCandidate {
            name: format!("cheat_ot:{}", member.name),
            epsilon: member.epsilon,
            bob: QbcBob::CheatOt { spec: member.spec },
            b: Bit::ZERO,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontierRow {
    pub name: String,
    pub epsilon: Option<f64>,
    pub stats: QbcStats,
    pub max_err: f64,
    pub relevant: bool,
}

/// Empirical lower estimate of the binding constant over a finite family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaEstimate {
    /// Minimum of `max{p_err, q_err}` over relevant rows; `None` if none are relevant.
    pub lambda_est: Option<f64>,
    pub argmin: Option<String>,
    pub relevance_threshold: f64,
    pub frontier: Vec<FrontierRow>,
}

pub fn estimate_lambda(family: &[BindingCandidate]) -> Result<LambdaEstimate> {
    let frontier: Vec<FrontierRow> = family
        .par_iter()
        .map(|cand| {
            let stats = qbc_stats(&QbcAlice::Honest, &cand.bob, cand.b)?;
            Ok(FrontierRow {
                name: cand.name.clone(),
                epsilon: cand.epsilon,
                max_err: stats.p_err.max(stats.q_err),
                relevant: (stats.p0 - stats.q0).abs() > RELEVANCE_THRESHOLD,
                stats,
            })
        })
        .collect::<Result<_>>()?;
    let best = frontier
        .iter()
        .filter(|r| r.relevant)
        .min_by(|a, b| a.max_err.total_cmp(&b.max_err));
    Ok(LambdaEstimate {
        lambda_est: best.map(|r| r.max_err),
        argmin: best.map(|r| r.name.clone()),
        relevance_threshold: RELEVANCE_THRESHOLD,
        frontier,
    })
}

impl LambdaEstimate {
    pub fn to_report(&self) -> SweepReport {
        let mut report = SweepReport::new("lambda")
            .meta("relevance_threshold", self.relevance_threshold)
            .meta(
                "note",
                "lambda_est is an empirical estimate over a finite family, not a proven constant",
            )
            .meta("argmin", &self.argmin);
        for r in &self.frontier {
            let s = &r.stats;
            report.push(
                SweepRow::new(
                    r.name.clone(),
                    if r.relevant { "relevant" } else { "ignored" },
                    r.epsilon,
                )
                .with("p0", s.p0)
                .with("p1", s.p1)
                .with("p_err", s.p_err)
                .with("q0", s.q0)
                .with("q1", s.q1)
                .with("q_err", s.q_err)
                .with("max_err", r.max_err),
            );
        }
        match self.lambda_est {
            Some(l) if l > 0.0 => {
                report.summary.insert("lambda_est".into(), l);
            }
            other => report
                .violations
                .push(format!("no positive lambda estimate (got {other:?})")),
        }
        report
    }
}

/// Samples full commitment runs. Events: `alice_err`, `bob_err`, and
/// `alice_guess_correct` when Alice guesses.
pub fn monte_carlo_qbc(
    b: Bit,
    alice: &QbcAlice,
    bob: &QbcBob,
    trials: u64,
    seed: u64,
) -> Result<super::montecarlo::Frequencies> {
    sample(trials, seed, |chooser: &mut dyn Chooser, f| {
        let t = run_qbc(b, alice, bob, chooser)?;
        f.record("alice_err", t.alice_verdict == AliceVerdict::Err);
        f.record("bob_err", t.bob_verdict == BobVerdict::Err);
        if let Some(g) = t.alice_guess {
            f.record("alice_guess_correct", g == b);
        }
        Ok(())
    })
}

/// 4σ checks of [`monte_carlo_qbc`] against [`qbc_stats`].
pub fn monte_carlo_qbc_check(
    b: Bit,
    alice: &QbcAlice,
    bob: &QbcBob,
    trials: u64,
    seed: u64,
) -> Result<Vec<McCheck>> {
    let s = qbc_stats(alice, bob, b)?;
    let opens_one = match bob {
        QbcBob::FlipOpen => !b,
        _ => b,
    };
    let mut exact = BTreeMap::new();
    exact.insert(
        "alice_err".to_string(),
        if opens_one.is_one() { s.q_err } else { s.p_err },
    );
    exact.insert("bob_err".to_string(), s.bob_detection_prob);
    if matches!(alice, QbcAlice::AttackOt { .. }) {
        exact.insert(
            "alice_guess_correct".to_string(),
            s.alice_guess_advantage + 0.5,
        );
    }
    checked_against_exact(&exact, seed, |sd| {
        monte_carlo_qbc(b, alice, bob, trials, sd)
    })
}
