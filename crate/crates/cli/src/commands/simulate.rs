use std::collections::BTreeMap;

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qot_core::attacks::AttackStrategy;
use qot_core::protocol::{random_secret, run_qkd, run_string_qot, ProtocolParams, Transcript};
use qot_core::BitVec;

use crate::args::{load_config, CommonArgs, Overlay, ParamArgs, StrategyArgs};
use crate::output::Artifacts;
use crate::Outcome;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    #[default]
    Qot,
    Qkd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Eve {
    InterceptResend,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    strategy: StrategyArgs,
    #[arg(long, value_enum)]
    protocol: Option<Protocol>,
    #[arg(long)]
    trials: Option<usize>,
    /// Fixed secret (bit string); random per run otherwise.
    #[arg(long)]
    b: Option<BitVec>,
    /// Eavesdropper on the QKD channel.
    #[arg(long, value_enum)]
    eve: Option<Eve>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(default)]
struct FileConfig {
    #[serde(flatten)]
    params: ParamArgs,
    strategy: Option<AttackStrategy>,
    protocol: Option<Protocol>,
    trials: Option<usize>,
    b: Option<BitVec>,
    eve: Option<Eve>,
}

/// Effective configuration, written next to the artifacts.
#[derive(Serialize)]
struct Effective<'a> {
    protocol: Protocol,
    trials: usize,
    params: &'a ProtocolParams,
    strategy: &'a AttackStrategy,
    eve: Option<Eve>,
    b: Option<&'a BitVec>,
}

#[derive(Serialize)]
struct Totals {
    trials: usize,
    pass_rate: f64,
    /// Among runs where the receiver produced an output.
    decode_success_rate: Option<f64>,
    decoded_runs: usize,
    aborts: BTreeMap<String, usize>,
}

pub fn run(a: SimulateArgs) -> Result<Outcome> {
    let file: FileConfig = load_config(a.common.config.as_deref())?;
    let params = a.params.overlay(file.params).build()?;
    let strategy = a.strategy.resolve(file.strategy)?;
    let protocol = a.protocol.or(file.protocol).unwrap_or_default();
    let trials = a.trials.or(file.trials).unwrap_or(1);
    let b = a.b.or(file.b);
    let eve = a.eve.or(file.eve);

    if let Some(b) = &b {
        if b.len() != params.m {
            bail!("--b has {} bits but m = {}", b.len(), params.m);
        }
    }
    if protocol == Protocol::Qkd && b.is_some() {
        bail!("--b applies to the oblivious transfer only");
    }
    if protocol == Protocol::Qot && eve.is_some() {
        bail!("--eve applies to --protocol qkd only");
    }
    if protocol == Protocol::Qkd && strategy != AttackStrategy::Honest {
        bail!("QKD runs take an honest receiver; use --eve for an eavesdropper");
    }
    strategy.check_mode(params.mode)?;

    let eve_strategy = eve.map(|_| AttackStrategy::InterceptResend);
    let transcripts: Vec<Transcript> = (0..trials as u64)
        .into_par_iter()
        .map(|run| match protocol {
            Protocol::Qot => {
                let secret = b.clone().unwrap_or_else(|| random_secret(&params, run));
                run_string_qot(&params, &secret, &strategy, run)
            }
            Protocol::Qkd => run_qkd(&params, eve_strategy.as_ref(), run),
        })
        .collect::<qot_core::Result<_>>()?;

    let out = Artifacts::create(&a.common.out_dir)?;
    out.json(
        "config.json",
        &Effective {
            protocol,
            trials,
            params: &params,
            strategy: &strategy,
            eve,
            b: b.as_ref(),
        },
    )?;
    out.json_lines("transcripts.jsonl", &transcripts)?;
    let rows: Vec<_> = transcripts.iter().map(Transcript::summary).collect();
    out.csv("summary.csv", &rows)?;

    let totals = totals(&transcripts);
    out.json("summary.json", &totals)?;
    println!("runs: {}", totals.trials);
    println!("pass rate: {:.4}", totals.pass_rate);
    match totals.decode_success_rate {
        Some(r) => println!("decode success: {r:.4} over {} decoded runs", totals.decoded_runs),
        None => println!("decode success: n/a (no run reached decoding)"),
    }
    for (reason, count) in &totals.aborts {
        println!("abort {reason}: {count}");
    }
    Ok(Outcome::Done)
}

fn totals(ts: &[Transcript]) -> Totals {
    let passed = ts.iter().filter(|t| t.pass).count();
    let decoded: Vec<bool> = ts.iter().filter_map(Transcript::decoded_ok).collect();
    let mut aborts = BTreeMap::new();
    for t in ts {
        if let Some(r) = &t.abort {
            *aborts.entry(r.label().to_string()).or_insert(0) += 1;
        }
    }
    Totals {
        trials: ts.len(),
        pass_rate: passed as f64 / ts.len().max(1) as f64,
        decode_success_rate: (!decoded.is_empty())
            .then(|| decoded.iter().filter(|&&ok| ok).count() as f64 / decoded.len() as f64),
        decoded_runs: decoded.len(),
        aborts,
    }
}
