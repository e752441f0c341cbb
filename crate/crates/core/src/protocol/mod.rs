//! The String-QOT and QKD state machines over a simulated channel.

pub(crate) mod channel;
mod commitment;
mod enumerate;
mod params;
mod runner;
pub mod steps;
mod transcript;

pub use channel::{noisy_outcome_probability, photon_outcome_probability, transmit, ChannelModel, Reception};
pub use commitment::{CommitId, CommitmentOracle};
pub use enumerate::{honest_joint_distribution, law_distance, HonestOutcome, ENUMERATION_MAX_PHOTONS};
pub use params::{CodeChoice, Mode, ProtocolParams};
pub use runner::{random_secret, run_qkd, run_string_qot, Step};
pub use steps::{
    alice_announce_correction, alice_setup, alice_test, bob_decode, choose_test_set, partition_and_choose_sets,
    ChosenSets, Commitments, Decoded, Partition, TestOutcome, DECODE_COSET_CAP,
};
pub use transcript::{AbortReason, ProtocolKind, SummaryRow, Transcript};
