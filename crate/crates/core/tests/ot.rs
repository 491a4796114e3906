use std::sync::Arc;

use qot_core::adversaries::{MaliciousAliceSpec, MaliciousBobSpec};
use qot_core::analysis::{exact_ot_stats, ot_branches, uniform_inputs, uniform_selection};
use qot_core::branching::SampledChooser;
use qot_core::ot::{
    honest_alice, honest_bob, run_ot, AliceParty, AliceSecrets, BobParty, HonestAlice, OtConfig,
    OtInputs, OtTranscript, OT_TRANSCRIPT_SCHEMA,
};
use qot_core::quantum::{DensityMatrix, RegisterLayout};
use qot_core::Bit;

const O: Bit = Bit::ZERO;
const I: Bit = Bit::ONE;

#[test]
fn honest_ot_is_correct_on_every_branch() {
    for inputs in OtInputs::all() {
        let branches = ot_branches(&AliceParty::Honest, &BobParty::Honest, inputs).unwrap();
        assert_eq!(branches.len(), 8, "{inputs:?}");
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
        for b in &branches {
            assert!((b.probability - 0.125).abs() < 1e-12);
            assert_eq!(b.value.bob_output, inputs.selected());
            assert_eq!(Some(b.value.m), b.value.n.zip(b.value.alice_secrets).map(|(n, s)| n ^ s.h()));
        }
    }
}

#[test]
fn honest_alice_view_does_not_depend_on_selection() {
    let s = exact_ot_stats(&AliceParty::Honest, &BobParty::Honest, &uniform_inputs()).unwrap();
    assert_eq!(s.bob_error_prob, 0.0);
    assert!(s.alice_view_l1.unwrap() < 1e-12);
    assert!(s.alice_advantage.abs() < 1e-12);
    assert_eq!(s.branch_table.len(), 64);
}

#[test]
fn each_message_qubit_is_maximally_mixed_over_h() {
    let half = DensityMatrix::maximally_mixed(RegisterLayout::qubits(1).unwrap());
    for (a0, a1) in [(O, O), (O, I), (I, O), (I, I)] {
        for alpha in Bit::BOTH {
            for reg in [0, 1] {
                let parts: Vec<(f64, DensityMatrix)> = Bit::BOTH
                    .into_iter()
                    .map(|h| {
                        let msg = HonestAlice::message(a0, a1, AliceSecrets::from_coins(alpha, h)).unwrap();
                        (0.5, msg.reduced(&[reg]).unwrap())
                    })
                    .collect();
                let avg = DensityMatrix::mixture(&parts).unwrap();
                assert!(avg.max_abs_diff(&half) < 1e-9, "a0={a0} a1={a1} alpha={alpha} reg={reg}");
            }
        }
    }
}

#[test]
fn sampled_runs_match_examples() {
    let run = |a0, a1, i, seed| {
        let mut alice = honest_alice(a0, a1);
        let mut bob = honest_bob(i);
        run_ot(&mut alice, &mut bob, &mut SampledChooser::new(seed), &OtConfig::default()).unwrap()
    };
    assert_eq!(run(I, O, I, 7).bob_output, O);
    assert_eq!(run(I, I, O, 0).bob_output, I);
    for seed in 0..50 {
        assert_eq!(run(O, I, I, seed).bob_output, I);
    }
}

#[test]
fn sampled_runs_are_reproducible() {
    let run = |seed| {
        let mut alice = honest_alice(I, O);
        let mut bob = honest_bob(O);
        run_ot(&mut alice, &mut bob, &mut SampledChooser::new(seed), &OtConfig::default())
            .unwrap()
            .to_json()
            .unwrap()
    };
    assert_eq!(run(11), run(11));
}

#[test]
fn transcript_round_trips_through_json() {
    let mut alice = honest_alice(O, I);
    let mut bob = honest_bob(I);
    let config = OtConfig {
        retain_final_state: true,
    };
    let t = run_ot(&mut alice, &mut bob, &mut SampledChooser::new(3), &config).unwrap();
    assert!(t.final_global_state.is_some());
    let json = t.to_json().unwrap();
    assert!(json.contains(OT_TRANSCRIPT_SCHEMA));
    let back = OtTranscript::from_json(&json).unwrap();
    assert_eq!(back, t);
}

#[test]
fn transcript_rejects_tampered_secrets() {
    let mut alice = honest_alice(O, I);
    let mut bob = honest_bob(I);
    let t = run_ot(&mut alice, &mut bob, &mut SampledChooser::new(3), &OtConfig::default()).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&t.to_json().unwrap()).unwrap();
    v["alice_secrets"]["alpha"] = serde_json::json!(0.25);
    assert!(OtTranscript::from_json(&v.to_string()).is_err());
}

#[test]
fn honest_equivalent_adversaries_behave_honestly() {
    let alice = AliceParty::Malicious(Arc::new(MaliciousAliceSpec::honest_equivalent().unwrap()));
    let bob = BobParty::Malicious(Arc::new(MaliciousBobSpec::honest_equivalent().unwrap()));
    for a in Bit::BOTH {
        let sa = exact_ot_stats(&alice, &BobParty::Honest, &uniform_selection(a, a)).unwrap();
        assert!(sa.bob_error_prob < 1e-12);
        assert!(sa.alice_advantage.abs() < 1e-12);
    }
    let sb = exact_ot_stats(&AliceParty::Honest, &bob, &uniform_inputs()).unwrap();
    assert!((sb.bob_pair_stats[0] - 1.0).abs() < 1e-12);
    assert!((sb.bob_pair_stats[1] - 0.5).abs() < 1e-12);
}
