use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::LinearCodeSpec;
use crate::protocol::ChannelModel;
use crate::quantum::STATE_QUBIT_CAP;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Dense state vectors; every measurement follows the Born rule.
    ExactQuantum,
    /// Per-photon classical sampling of the same statistics.
    #[default]
    ClassicalFast,
}

/// How Alice draws `f` in step 1.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeChoice {
    /// Uniform `(r+m) x N` matrix.
    #[default]
    Random,
    /// Uniform over full-rank matrices.
    RandomFullRank,
    /// The single all-ones row (`r = 0`, `m = 1`).
    Yao,
    Fixed(LinearCodeSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    pub n: usize,
    pub m: usize,
    pub r: usize,
    pub delta: f64,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(rename = "N", default)]
    pub big_n: Option<usize>,
    #[serde(default)]
    pub noise_p: f64,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub seed: u64,
    /// Alice reveals `w` outside `E_c` after step 7.
    #[serde(default)]
    pub announce_complement: bool,
    /// Pins `c` instead of letting Alice pick uniformly.
    #[serde(default)]
    pub force_c: Option<u8>,
    #[serde(default)]
    pub code: CodeChoice,
}

impl ProtocolParams {
    pub fn new(n: usize, big_n: usize, r: usize, m: usize) -> Self {
        ProtocolParams {
            n,
            m,
            r,
            delta: 0.0,
            epsilon: None,
            big_n: Some(big_n),
            noise_p: 0.0,
            mode: Mode::ClassicalFast,
            seed: 0,
            announce_complement: false,
            force_c: None,
            code: CodeChoice::Random,
        }
    }

    /// `N`, defaulting to `floor(0.24 n)`.
    pub fn big_n(&self) -> usize {
        self.big_n.unwrap_or((self.n as f64 * 0.24).floor() as usize)
    }

    /// `epsilon`, defaulting to `8 delta`.
    pub fn epsilon(&self) -> f64 {
        self.epsilon.unwrap_or(8.0 * self.delta)
    }

    /// Largest accepted error count: `floor(delta n)` (a small slack absorbs
    /// rounding in products like `0.1 * 30`).
    pub fn max_test_errors(&self) -> usize {
        (self.delta * self.n as f64 + 1e-9).floor() as usize
    }

    /// `floor(epsilon n)`, the small-distance radius.
    pub fn small_distance_radius(&self) -> usize {
        (self.epsilon() * self.n as f64 + 1e-9).floor() as usize
    }

    pub fn channel(&self) -> ChannelModel {
        if self.noise_p == 0.0 {
            ChannelModel::Noiseless
        } else {
            ChannelModel::BitFlip(self.noise_p)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let big_n = self.big_n();
        if self.n == 0 {
            return Err(Error::domain("n must be positive"));
        }
        if big_n == 0 {
            return Err(Error::domain("N must be at least 1"));
        }
        if self.m == 0 {
            return Err(Error::domain("m must be at least 1"));
        }
        if self.r + self.m > big_n {
            return Err(Error::domain(format!("r + m = {} exceeds N = {big_n}", self.r + self.m)));
        }
        if self.delta.is_nan() || self.delta < 0.0 {
            return Err(Error::domain("delta must be non-negative"));
        }
        if let Some(e) = self.epsilon {
            if e.is_nan() || e < 0.0 {
                return Err(Error::domain("epsilon must be non-negative"));
            }
        }
        self.channel().validate()?;
        if let Some(c) = self.force_c {
            if c > 1 {
                return Err(Error::domain("forced c must be 0 or 1"));
            }
        }
        match &self.code {
            CodeChoice::Yao if self.r != 0 || self.m != 1 => {
                return Err(Error::domain("the parity code needs r = 0 and m = 1"));
            }
            CodeChoice::Fixed(c) if c.r() != self.r || c.m() != self.m || c.big_n() != big_n => {
                return Err(Error::domain("fixed code shape disagrees with r, m, N"));
            }
            _ => {}
        }
        if self.mode == Mode::ExactQuantum && self.n > STATE_QUBIT_CAP {
            return Err(Error::Resource {
                what: "exact-mode photons",
                requested: self.n,
                limit: STATE_QUBIT_CAP,
            });
        }
        Ok(())
    }
}
