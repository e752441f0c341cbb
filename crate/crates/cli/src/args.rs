//! Flags shared by several subcommands. Each group doubles as the matching
//! section of the JSON config file; a flag given on the command line wins.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use qot_core::attacks::{AttackStrategy, StoreSpec};
use qot_core::protocol::{CodeChoice, Mode, ProtocolParams};

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// JSON config file; command-line flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, env = "QOT_OUT_DIR", default_value = "qot-out")]
    pub out_dir: PathBuf,
}

pub fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Field by field: `self` where set, otherwise `under`.
pub trait Overlay {
    fn overlay(self, under: Self) -> Self;
}

macro_rules! overlay_fields {
    ($t:ty { $($f:ident),* }) => {
        impl Overlay for $t {
            fn overlay(self, under: Self) -> Self {
                Self { $($f: self.$f.or(under.$f)),* }
            }
        }
    };
}

pub fn parse_mode(s: &str) -> Result<Mode, String> {
    match s {
        "exact" | "exact-quantum" | "exact_quantum" => Ok(Mode::ExactQuantum),
        "classical" | "classical-fast" | "classical_fast" => Ok(Mode::ClassicalFast),
        other => Err(format!("unknown mode {other:?} (exact, classical)")),
    }
}

pub fn parse_code(s: &str) -> Result<CodeChoice, String> {
    match s {
        "random" => Ok(CodeChoice::Random),
        "full-rank" | "random-full-rank" | "random_full_rank" => Ok(CodeChoice::RandomFullRank),
        "yao" | "parity" => Ok(CodeChoice::Yao),
        other => Err(format!("unknown code {other:?} (random, full-rank, yao)")),
    }
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ParamArgs {
    /// Photons sent.
    #[arg(long)]
    pub n: Option<usize>,
    /// Positions per set (default floor(0.24 n)).
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub big_n: Option<usize>,
    /// Syndrome length.
    #[arg(long)]
    pub r: Option<usize>,
    /// Secret length.
    #[arg(long)]
    pub m: Option<usize>,
    /// Test tolerance as a fraction of n.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Small-distance radius fraction (default 8 delta).
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Channel flip probability.
    #[arg(long = "noise", alias = "noise-p")]
    #[serde(alias = "noise")]
    pub noise_p: Option<f64>,
    /// exact or classical.
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// random, full-rank or yao (a fixed code is given in the config file).
    #[arg(long, value_parser = parse_code)]
    pub code: Option<CodeChoice>,
    /// Pin Alice's choice of c.
    #[arg(long)]
    pub force_c: Option<u8>,
    /// Reveal w outside E_c after the correction step.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub announce_complement: Option<bool>,
}

overlay_fields!(ParamArgs { n, big_n, r, m, delta, epsilon, noise_p, mode, seed, code, force_c, announce_complement });

impl ParamArgs {
    pub fn build(&self) -> Result<ProtocolParams> {
        let n = self.n.ok_or_else(|| anyhow!("--n is required"))?;
        let m = self.m.ok_or_else(|| anyhow!("--m is required"))?;
        let mut p = ProtocolParams::new(n, 0, self.r.unwrap_or(0), m);
        p.big_n = self.big_n;
        p.delta = self.delta.unwrap_or(0.0);
        p.epsilon = self.epsilon;
        p.noise_p = self.noise_p.unwrap_or(0.0);
        p.mode = self.mode.unwrap_or_default();
        p.seed = self.seed.unwrap_or(0);
        p.code = self.code.clone().unwrap_or_default();
        p.force_c = self.force_c;
        p.announce_complement = self.announce_complement.unwrap_or(false);
        p.validate()?;
        Ok(p)
    }
}

#[derive(Args, Debug, Clone, Default)]
pub struct StrategyArgs {
    /// honest, store, fixed-basis, random-ok (intercept-resend is given with --eve).
    #[arg(long)]
    pub strategy: Option<String>,
    /// Stored positions, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub store: Option<Vec<usize>>,
    /// Store this many random positions instead.
    #[arg(long)]
    pub store_count: Option<usize>,
    /// Keep stored positions out of E_0 and E_1.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub avoid_in_sets: Option<bool>,
    /// Frame angle in radians for fixed-basis.
    #[arg(long, allow_hyphen_values = true)]
    pub angle: Option<f64>,
}

impl StrategyArgs {
    /// The flags when `--strategy` is given, otherwise the config file's
    /// strategy, otherwise honest.
    pub fn resolve(&self, file: Option<AttackStrategy>) -> Result<AttackStrategy> {
        match (&self.strategy, file) {
            (Some(kind), _) => self.build(kind),
            (None, _) if self.store.is_some() || self.store_count.is_some() || self.angle.is_some() => {
                bail!("strategy options need --strategy")
            }
            (None, Some(s)) => Ok(s),
            (None, None) => Ok(AttackStrategy::Honest),
        }
    }

    fn build(&self, kind: &str) -> Result<AttackStrategy> {
        Ok(match kind {
            "honest" => AttackStrategy::Honest,
            "store" | "store-subset" => {
                let store = match (&self.store, self.store_count) {
                    (Some(p), None) => StoreSpec::Positions(p.clone()),
                    (None, Some(k)) => StoreSpec::Count(k),
                    _ => bail!("store needs exactly one of --store or --store-count"),
                };
                AttackStrategy::StoreSubset {
                    store,
                    avoid_in_sets: self.avoid_in_sets.unwrap_or(false),
                }
            }
            "fixed" | "fixed-basis" => AttackStrategy::FixedBasis {
                angle: self.angle.ok_or_else(|| anyhow!("fixed-basis needs --angle"))?,
            },
            "random-ok" => AttackStrategy::RandomOk,
            "intercept-resend" => AttackStrategy::InterceptResend,
            other => bail!("unknown strategy {other:?}"),
        })
    }
}
