use std::sync::Arc;

use qot_core::adversaries::{
    alice_attack, bob_attack, random_alice_family, random_bob_family, AttackParams, ATTACK_GRID,
};
use qot_core::analysis::{exact_ot_stats, uniform_inputs, uniform_selection};
use qot_core::ot::{AliceParty, BobParty};
use qot_core::Bit;

// Reference values from an independent dense-matrix computation of the two
// explicit attacks on the grid 0.01, 0.04, 0.09.
const ALICE_ADVANTAGE: [f64; 3] = [0.024843337854810632, 0.04873661592641376, 0.070677020925215];
// Quarter of the trace distance between Alice's two averaged reduced states:
// no measurement on the attack state does better.
const ALICE_OPTIMUM: [f64; 3] = [0.024874685927665507, 0.04898979485566357, 0.07154544010627095];
const BOB_A0_ERROR: [f64; 3] = [0.0012531407233450085, 0.005051025721682201, 0.011515199645763583];
const BOB_A1_ADVANTAGE: [f64; 3] = [0.017677669529663764, 0.03535533905932742, 0.05303300858899107];

fn alice(eps: f64) -> AliceParty {
    AliceParty::Malicious(Arc::new(alice_attack(AttackParams::new(eps).unwrap()).unwrap()))
}

fn bob(eps: f64) -> BobParty {
    BobParty::Malicious(Arc::new(bob_attack(AttackParams::new(eps).unwrap()).unwrap()))
}

#[test]
fn alice_attack_matches_reference() {
    for (k, eps) in ATTACK_GRID.into_iter().enumerate() {
        let s = exact_ot_stats(&alice(eps), &BobParty::Honest, &uniform_selection(Bit::ZERO, Bit::ZERO)).unwrap();
        assert!((s.bob_error_prob - eps / 2.0).abs() < 1e-9, "eps={eps}");
        assert!((s.alice_advantage - ALICE_ADVANTAGE[k]).abs() < 1e-9, "eps={eps}");
        assert!(s.alice_advantage <= ALICE_OPTIMUM[k] + 1e-12);
        assert!(s.bob_error_prob <= 2.0 * eps);
        // The explicit guess is the best possible use of the classical record.
        assert!((s.alice_advantage - 0.5 * s.alice_view_l1.unwrap()).abs() < 1e-9);
    }
}

#[test]
fn alice_attack_targets_every_pair_equally() {
    let eps = 0.04;
    let reference = exact_ot_stats(&alice(eps), &BobParty::Honest, &uniform_selection(Bit::ZERO, Bit::ZERO)).unwrap();
    let s = exact_ot_stats(&alice(eps), &BobParty::Honest, &uniform_selection(Bit::ONE, Bit::ONE)).unwrap();
    assert!((s.bob_error_prob - reference.bob_error_prob).abs() < 1e-12);
    assert!((s.alice_advantage - reference.alice_advantage).abs() < 1e-12);
}

#[test]
fn bob_attack_matches_reference() {
    for (k, eps) in ATTACK_GRID.into_iter().enumerate() {
        let s = exact_ot_stats(&AliceParty::Honest, &bob(eps), &uniform_inputs()).unwrap();
        let [p0, p1] = s.bob_pair_stats;
        assert!((1.0 - p0 - BOB_A0_ERROR[k]).abs() < 1e-9, "eps={eps}");
        assert!((p1 - 0.5 - BOB_A1_ADVANTAGE[k]).abs() < 1e-9, "eps={eps}");
        assert!(1.0 - p0 <= 2.0 * eps);
        // Closed form of the a1 advantage: √ε / (4√2).
        assert!((p1 - 0.5 - eps.sqrt() / (4.0 * std::f64::consts::SQRT_2)).abs() < 1e-12);
        // No measurement on the attack state beats √ε / 4.
        assert!(p1 - 0.5 <= 0.25 * eps.sqrt() + 1e-12);
        assert!(s.bob_guess_correct[0].is_some() && s.bob_guess_correct[1].is_some());
    }
}

#[test]
fn out_of_range_epsilon_is_rejected() {
    for bad in [0.0, 1.0, 1.5, -0.2, f64::NAN, f64::INFINITY] {
        assert!(AttackParams::new(bad).is_err(), "{bad}");
    }
}

#[test]
fn families_are_seeded_and_well_formed() {
    let a = random_alice_family(5, 6).unwrap();
    let b = random_alice_family(5, 6).unwrap();
    assert_eq!(a.len(), ATTACK_GRID.len() + 6);
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
    assert_ne!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&random_alice_family(6, 6).unwrap()).unwrap()
    );
    let bobs = random_bob_family(5, 6).unwrap();
    assert_eq!(bobs.len(), ATTACK_GRID.len() + 6);
    for m in &bobs {
        let s = exact_ot_stats(&AliceParty::Honest, &BobParty::Malicious(m.spec.clone()), &uniform_inputs()).unwrap();
        let total: f64 = s.branch_table.iter().map(|r| r.probability).sum();
        assert!((total - 8.0).abs() < 1e-9, "{}", m.name);
    }
}

#[test]
fn specs_round_trip_through_json() {
    let spec = alice_attack(AttackParams::new(0.04).unwrap()).unwrap();
    let back = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
    assert_eq!(spec, back);
    let spec = bob_attack(AttackParams::new(0.09).unwrap()).unwrap();
    let back = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
    assert_eq!(spec, back);
}
