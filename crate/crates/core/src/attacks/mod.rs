//! Dishonest receivers and eavesdroppers, small-distance diagnostics and
//! information accounting.

mod defect;
mod info;
mod model;
mod stats;
mod strategy;

pub use defect::{view_small_distance_defect, view_vector, VIEW_QUBIT_CAP};
pub use info::{
    information_account, DefectStats, InfoMethod, InfoOptions, InfoReport, EXACT_MAX_PHOTONS, EXACT_MAX_SECRET,
    EXACT_MAX_SET,
};
pub use stats::{
    j_indicator_table, random_ok_decomposition, store_attack_test_statistics, JTable, RandomOkReport, StoreTestStats,
};
pub use strategy::{apply_strategy, fixed_basis_commitment, intercept_resend, AttackStrategy, BobState, StoreSpec};
