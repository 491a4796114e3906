use std::sync::Arc;

use rayon::prelude::*;

use super::exact::{exact_ot_stats, uniform_inputs, uniform_selection};
use super::report::{SweepReport, SweepRow};
use crate::adversaries::{FamilyMember, MaliciousAliceSpec, MaliciousBobSpec};
use crate::bit::Bit;
use crate::error::{invalid, Result};
use crate::ot::{AliceParty, BobParty};
use crate::quantum::ALGEBRA_TOL;

/// `δ ≤ LEMMA1_CONSTANT · √ε_fail` for any cheating Alice.
pub const LEMMA1_CONSTANT: f64 = 16.0;
/// `Prob[a_other' = a_other] ≤ ½ + LEMMA2_CONSTANT · √ε_fail` for any cheating Bob.
pub const LEMMA2_CONSTANT: f64 = 16.0 * std::f64::consts::SQRT_2;
/// Constant of the claimed `a1` advantage of the explicit Bob attack, `c'·√ε`.
pub const BOB_WITNESS_CONSTANT: f64 = 0.4;

/// Advantage the explicit Alice attack is claimed to reach.
pub fn alice_witness_bound(epsilon: f64) -> f64 {
    0.5 * epsilon.sqrt() - 1.5 * epsilon
}

/// The honest-equivalent Alice followed by `family`.
pub fn with_honest_alice(
    family: Vec<FamilyMember<MaliciousAliceSpec>>,
) -> Result<Vec<FamilyMember<MaliciousAliceSpec>>> {
    let mut out = vec![FamilyMember {
        name: "honest_equivalent".into(),
        epsilon: Some(0.0),
        spec: Arc::new(MaliciousAliceSpec::honest_equivalent()?),
    }];
    out.extend(family);
    Ok(out)
}

/// The honest-equivalent Bob followed by `family`.
pub fn with_honest_bob(
    family: Vec<FamilyMember<MaliciousBobSpec>>,
) -> Result<Vec<FamilyMember<MaliciousBobSpec>>> {
    let mut out = vec![FamilyMember {
        name: "honest_equivalent".into(),
        epsilon: Some(0.0),
        spec: Arc::new(MaliciousBobSpec::honest_equivalent()?),
    }];
    out.extend(family);
    Ok(out)
}

/// Checks `δ ≤ 16√ε_fail` for every member against honest Bob, for each of
/// the four pairs `(a0, a1)` with `i` uniform.
///
/// Rows also carry the equivalent form `ε_fail ≥ (δ/16)²`, the generic bound
/// `δ ≤ ½·L1` of Alice's records and, for members with a known `ε`, the
/// advantage the explicit attack is claimed to reach. Only the lemma and the
/// generic bound count as violations.
pub fn verify_lemma1(family: &[FamilyMember<MaliciousAliceSpec>]) -> Result<SweepReport> {
    if family.is_empty() {
        return Err(invalid("lemma 1 needs a non-empty family"));
    }
    let targets: Vec<(Bit, Bit)> = Bit::BOTH
        .into_iter()
        .flat_map(|a0| Bit::BOTH.into_iter().map(move |a1| (a0, a1)))
        .collect();
    let rows: Vec<Vec<SweepRow>> = family
        .par_iter()
        .map(|member| {
            let alice = AliceParty::Malicious(member.spec.clone());
            targets
                .iter()
                .map(|&(a0, a1)| {
                    let s = exact_ot_stats(&alice, &BobParty::Honest, &uniform_selection(a0, a1))?;
                    let fail = s.bob_error_prob;
                    let delta = s.alice_advantage;
                    let bound = LEMMA1_CONSTANT * fail.sqrt();
                    let reverse = (delta.max(0.0) / LEMMA1_CONSTANT).powi(2);
                    let half_l1 = 0.5 * s.alice_view_l1.unwrap_or(f64::NAN);
                    let mut row = SweepRow::new(
                        member.name.clone(),
                        format!("a0={a0},a1={a1}"),
                        member.epsilon,
                    )
                    .with("bob_error", fail)
                    .with("alice_advantage", delta)
                    .with("lemma_bound", bound)
                    .with("lemma_margin", bound - delta)
                    .with("reverse_min_error", reverse)
                    .with("generic_bound", half_l1);
                    if let Some(eps) = member.epsilon.filter(|&e| e > 0.0) {
                        let w = alice_witness_bound(eps);
                        row = row
                            .with("witness_bound", w)
                            .with("witness_margin", delta - w);
                    }
                    let mut problems = Vec::new();
                    if delta > bound + ALGEBRA_TOL {
                        problems.push(format!(
                            "advantage {delta:.6} exceeds 16*sqrt({fail:.3e}) = {bound:.6}"
                        ));
                    }
                    if fail < reverse - ALGEBRA_TOL {
                        problems.push(format!(
                            "error {fail:.3e} below (delta/16)^2 = {reverse:.3e}"
                        ));
                    }
                    if delta > half_l1 + ALGEBRA_TOL {
                        problems.push(format!(
                            "advantage {delta:.6} exceeds half the record L1 {half_l1:.6}"
                        ));
                    }
                    if !problems.is_empty() {
                        row.violation = Some(problems.join("; "));
                    }
                    Ok(row)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut report = SweepReport::new("lemma1")
        .meta("family_size", family.len())
        .meta("constant", LEMMA1_CONSTANT)
        .meta("tolerance", ALGEBRA_TOL);
    for row in rows.into_iter().flatten() {
        report.push(row);
    }
    let max_ratio = report
        .rows
        .iter()
        .filter_map(|r| {
            let (d, e) = (r.value("alice_advantage")?, r.value("bob_error")?);
            (e > 0.0).then(|| d / e.sqrt())
        })
        .fold(0.0, f64::max);
    let shortfalls = report
        .rows
        .iter()
        .filter(|r| {
            r.label == "a0=0,a1=0" && r.value("witness_margin").is_some_and(|m| m < -ALGEBRA_TOL)
        })
        .count();
    report
        .summary
        .insert("max_advantage_over_sqrt_error".into(), max_ratio);
    report
        .summary
        .insert("witness_shortfalls".into(), shortfalls as f64);
    report
        .summary
        .insert("violations".into(), report.violations.len() as f64);
    Ok(report)
}

/// Checks, for every member against honest Alice with uniform inputs, that
/// the worse-known bit satisfies `Prob ≤ ½ + 16√2·√ε_fail` where `ε_fail` is
/// the error on the better-known bit.
///
/// Members with a known `ε` also report the `a1` advantage against the
/// claimed `0.4·√ε`; that comparison is informational.
pub fn verify_lemma2(family: &[FamilyMember<MaliciousBobSpec>]) -> Result<SweepReport> {
    if family.is_empty() {
        return Err(invalid("lemma 2 needs a non-empty family"));
    }
    let rows: Vec<SweepRow> = family
        .par_iter()
        .map(|member| {
            let s = exact_ot_stats(
                &AliceParty::Honest,
                &BobParty::Malicious(member.spec.clone()),
                &uniform_inputs(),
            )?;
            let p = s.bob_pair_stats;
            let better = if p[0] >= p[1] { 0 } else { 1 };
            let fail = 1.0 - p[better];
            let other = p[1 - better];
            let bound = 0.5 + LEMMA2_CONSTANT * fail.sqrt();
            let mut row = SweepRow::new(
                member.name.clone(),
                format!("better=a{better}"),
                member.epsilon,
            )
            .with("a0_correct", p[0])
            .with("a1_correct", p[1])
            .with("better_error", fail)
            .with("other_correct", other)
            .with("lemma_bound", bound)
            .with("lemma_margin", bound - other);
            if let Some(eps) = member.epsilon.filter(|&e| e > 0.0) {
                let claimed = BOB_WITNESS_CONSTANT * eps.sqrt();
                let adv = p[1] - 0.5;
                row = row
                    .with("a1_advantage", adv)
                    .with("a1_advantage_over_sqrt_eps", adv / eps.sqrt())
                    .with("witness_bound", claimed)
                    .with("witness_margin", adv - claimed)
                    .with("ancilla_advantage", 0.5 * eps.sqrt());
            }
            if other > bound + ALGEBRA_TOL {
                row.violation = Some(format!("other bit correct with {other:.6} > {bound:.6}"));
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let mut report = SweepReport::new("lemma2")
        .meta("family_size", family.len())
        .meta("constant", LEMMA2_CONSTANT)
        .meta("tolerance", ALGEBRA_TOL);
    for row in rows {
        report.push(row);
    }
    let shortfalls = report
        .rows
        .iter()
        .filter(|r| r.value("witness_margin").is_some_and(|m| m < -ALGEBRA_TOL))
        .count();
    report
        .summary
        .insert("witness_shortfalls".into(), shortfalls as f64);
    report
        .summary
        .insert("violations".into(), report.violations.len() as f64);
    Ok(report)
}
