//! Density operators of uniformly random coset members, their closed form,
//! the inductive construction through sign unitaries, and the
//! indistinguishability certificate for low-distance measurements.

mod ensemble;
mod gv;
mod induction;
mod lemma;

pub use ensemble::{closed_form_pattern, rho_brute, rho_closed_form, rho_closed_form_with, CosetEnsemble, COSET_DIM_CAP};
pub use gv::{gv_bound_trial, gv_threshold, GvReport, GvTrial};
pub use induction::{rho_zero_induction, rho_zero_induction_with_basis, InductionTrace};
pub use lemma::{certify_delta, lemma1_certificate, restricted_min_distance, Lemma1Certificate, Witness};
