//! Exact branch enumeration, sampled cross-checks and bound verification.

mod commitment;
mod exact;
mod lemmas;
mod montecarlo;
mod report;

pub use commitment::{
    binding_family_on_grid, default_binding_family, deposit_branches, estimate_lambda,
    lifted_alice_attack, monte_carlo_qbc, monte_carlo_qbc_check, qbc_sealing_stats, qbc_stats,
    verify_sealing, BindingCandidate, FrontierRow, LambdaEstimate, QbcStats, SealingStats,
    RELEVANCE_THRESHOLD,
};
pub use exact::{
    exact_ot_stats, ot_branches, uniform_inputs, uniform_selection, BranchRecord, ExactOtStats,
    InputDistribution,
};
pub use lemmas::{
    alice_witness_bound, verify_lemma1, verify_lemma2, with_honest_alice, with_honest_bob,
    BOB_WITNESS_CONSTANT, LEMMA1_CONSTANT, LEMMA2_CONSTANT,
};
pub use montecarlo::{
    checked_against_exact, chunk_seed, monte_carlo_check, monte_carlo_ot, ot_event_probabilities,
    sample, Frequencies, McCheck, MC_CHUNKS, RESEED_LABEL,
};
pub use report::{SweepReport, SweepRow};
