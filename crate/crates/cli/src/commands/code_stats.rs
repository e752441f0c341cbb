use anyhow::{anyhow, Result};
use clap::Args;
use serde::{Deserialize, Serialize};

use qot_core::cosetrho::gv_bound_trial;

use crate::args::{load_config, CommonArgs};
use crate::output::Artifacts;
use crate::Outcome;

#[derive(Args, Debug)]
pub struct CodeStatsArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long = "N")]
    big_n: Option<usize>,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    #[serde(rename = "N")]
    big_n: Option<usize>,
    rows: Option<usize>,
    eta: Option<f64>,
    trials: Option<usize>,
    seed: Option<u64>,
}

#[derive(Serialize)]
struct Row {
    trial: usize,
    #[serde(rename = "dN")]
    d_n: Option<usize>,
    ratio: Option<f64>,
    bound_satisfied: bool,
}

#[derive(Serialize)]
struct Aggregate {
    #[serde(rename = "N")]
    big_n: usize,
    rows: usize,
    eta: f64,
    seed: u64,
    trials: usize,
    threshold: f64,
    satisfied: usize,
    fraction: f64,
}

pub fn run(a: CodeStatsArgs) -> Result<Outcome> {
    let file: FileConfig = load_config(a.common.config.as_deref())?;
    let big_n = a.big_n.or(file.big_n).ok_or_else(|| anyhow!("--N is required"))?;
    let rows = a.rows.or(file.rows).ok_or_else(|| anyhow!("--rows is required"))?;
    let eta = a.eta.or(file.eta).unwrap_or(0.1);
    let trials = a.trials.or(file.trials).unwrap_or(200);
    let seed = a.seed.or(file.seed).unwrap_or(0);

    let report = gv_bound_trial(big_n, rows, eta, trials, seed)?;
    let table: Vec<Row> = report
        .trials
        .iter()
        .map(|t| Row {
            trial: t.trial,
            d_n: t.d_n,
            ratio: t.ratio,
            bound_satisfied: t.satisfied,
        })
        .collect();
    let agg = Aggregate {
        big_n,
        rows,
        eta,
        seed,
        trials,
        threshold: report.threshold,
        satisfied: report.trials.iter().filter(|t| t.satisfied).count(),
        fraction: report.fraction(),
    };
    let out = Artifacts::create(&a.common.out_dir)?;
    out.csv("code_stats.csv", &table)?;
    out.json("code_stats.json", &agg)?;
    println!("threshold {:.6}; {}/{} codes satisfy it ({:.3})", agg.threshold, agg.satisfied, trials, agg.fraction);
    Ok(Outcome::Done)
}
