use serde::{Deserialize, Serialize};

use crate::attacks::AttackStrategy;
use crate::error::{Error, Result};
use crate::gf2::{BitVec, LinearCodeSpec, PositionSet};
use crate::protocol::steps::{alice_announce_correction, ChosenSets, TestOutcome};
use crate::protocol::{ChannelModel, CommitId, Mode};
use crate::quantum::{BasisString, PhotonFrame};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    Qot,
    Qkd,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "reason", content = "detail")]
pub enum AbortReason {
    TestFailed,
    SetShortage,
    ProtocolViolation(String),
}

impl AbortReason {
    pub fn label(&self) -> &'static str {
        match self {
            AbortReason::TestFailed => "test_failed",
            AbortReason::SetShortage => "set_shortage",
            AbortReason::ProtocolViolation(_) => "protocol_violation",
        }
    }
}

/// Everything one run produced, step by step. Fields after an abort stay empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub protocol: ProtocolKind,
    pub seed: u64,
    pub run: u64,
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub max_test_errors: usize,
    pub mode: Mode,
    pub channel: ChannelModel,
    pub strategy: AttackStrategy,
    /// Eavesdropper on the channel (QKD only).
    pub eve: Option<AttackStrategy>,
    pub code: LinearCodeSpec,
    pub b: BitVec,
    pub w: BitVec,
    pub theta: BasisString,
    /// What actually entered the receiver's channel after any eavesdropper.
    pub dispatched_w: BitVec,
    pub dispatched_theta: BasisString,
    pub theta_hat_commits: Vec<CommitId>,
    pub w_hat_commits: Vec<CommitId>,
    /// Committed values, kept for diagnostics; Alice only sees the opened ones.
    pub theta_hat: BasisString,
    pub w_hat: BitVec,
    pub bob_frames: Vec<Option<PhotonFrame>>,
    pub stored: PositionSet,
    pub ok: Option<bool>,
    pub r_set: PositionSet,
    pub test: TestOutcome,
    pub test_errors: usize,
    pub pass: bool,
    /// Receiver's outcomes once stored photons are measured.
    pub bob_final: Option<BitVec>,
    pub t0: Option<PositionSet>,
    pub t1: Option<PositionSet>,
    pub sets: Option<ChosenSets>,
    pub announced: Vec<PositionSet>,
    pub c: Option<u8>,
    pub e_c: Option<PositionSet>,
    pub s: Option<BitVec>,
    pub a: Option<BitVec>,
    /// `w` outside `E_c`, when the generous final announcement is on.
    pub w_outside: Option<BitVec>,
    pub decoded: Option<BitVec>,
    pub b_hat: Option<BitVec>,
    pub abort: Option<AbortReason>,
}

/// One CSV line per run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub seed: u64,
    pub run: u64,
    pub protocol: ProtocolKind,
    pub pass: bool,
    pub test_errors: usize,
    pub abort_reason: String,
    pub c: String,
    pub b_hat_equals_b: String,
}

impl Transcript {
    /// `Some(b_hat == b)` when the receiver produced an output.
    pub fn decoded_ok(&self) -> Option<bool> {
        self.b_hat.as_ref().map(|bh| *bh == self.b)
    }

    /// Recomputes the test, the announcement and the set constraints from
    /// the primitive fields.
    pub fn check_consistency(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::ProtocolViolation(format!("transcript {what} does not recompute")));
        let errors = self
            .r_set
            .iter()
            .filter(|&i| self.theta.get(i) == self.theta_hat.get(i) && self.w.get(i) != self.w_hat.get(i))
            .count();
        if errors != self.test_errors || errors != self.test.test_errors {
            return bad("test_errors");
        }
        if (errors <= self.max_test_errors) != self.pass || self.pass != self.test.pass {
            return bad("pass");
        }
        if self.test.opened_theta_hat != self.theta_hat.restrict(&self.r_set)?
            || self.test.opened_w_hat != self.w_hat.restrict(&self.r_set)?
        {
            return bad("opened values");
        }
        if !self.pass && self.abort != Some(AbortReason::TestFailed) {
            return bad("abort reason");
        }
        if let Some(sets) = &self.sets {
            let t0 = self.theta.matching(&self.theta_hat)?;
            if self.t0.as_ref() != Some(&t0) {
                return bad("T0");
            }
            if sets.e0.len() != self.big_n || !sets.e0.iter().all(|i| t0.contains(i) && !self.r_set.contains(i)) {
                return bad("E0");
            }
            if let Some(e1) = &sets.e1 {
                if e1.len() != self.big_n || !e1.iter().all(|i| !t0.contains(i) && !self.r_set.contains(i)) {
                    return bad("E1");
                }
            }
            if sets.announced() != self.announced {
                return bad("announced order");
            }
            if self.protocol == ProtocolKind::Qkd && sets.e1.is_some() {
                return bad("QKD sets");
            }
        }
        if let (Some(c), Some(e_c)) = (self.c, &self.e_c) {
            let sets = self.sets.as_ref().ok_or_else(|| Error::ProtocolViolation("E_c without sets".into()))?;
            if sets.get(c) != Some(e_c) {
                return bad("E_c");
            }
            let (s, a) = alice_announce_correction(&self.b, &self.w, e_c, &self.code.g(), &self.code.h())?;
            if self.s.as_ref() != Some(&s) || self.a.as_ref() != Some(&a) {
                return bad("s, a");
            }
            if c == 1 && self.b_hat.is_some() {
                return bad("b_hat on c = 1");
            }
        }
        Ok(())
    }

    pub fn summary(&self) -> SummaryRow {
        SummaryRow {
            seed: self.seed,
            run: self.run,
            protocol: self.protocol,
            pass: self.pass,
            test_errors: self.test_errors,
            abort_reason: self.abort.as_ref().map_or_else(String::new, |a| a.label().to_string()),
            c: self.c.map_or_else(String::new, |c| c.to_string()),
            b_hat_equals_b: self.decoded_ok().map_or_else(String::new, |ok| ok.to_string()),
        }
    }
}
