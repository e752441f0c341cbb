use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qot_core::attacks::{
    information_account, j_indicator_table, random_ok_decomposition, store_attack_test_statistics,
    view_small_distance_defect, AttackStrategy, InfoMethod, InfoOptions, InfoReport,
};
use qot_core::protocol::{random_secret, run_string_qot, ProtocolParams};

use crate::args::{load_config, CommonArgs, Overlay, ParamArgs, StrategyArgs};
use crate::output::Artifacts;
use crate::Outcome;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Analysis {
    /// Mutual information between the secret and the receiver's view.
    #[default]
    Info,
    /// Test errors against the stored fraction.
    StoreSweep,
    /// Pass rate of the random-OK receiver split into its branches.
    RandomOk,
    /// Joint table of the two distance indicators.
    JTable,
    /// Small-distance defect of each run's view, per radius.
    Defect,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    MonteCarlo,
}

#[derive(Args, Debug)]
pub struct AttackArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    strategy: StrategyArgs,
    #[arg(long, value_enum)]
    analysis: Option<Analysis>,
    #[arg(long, value_enum)]
    method: Option<Method>,
    /// Enumerated states or sampled runs before giving up.
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    /// Prior of the secret, indexed by its value.
    #[arg(long, value_delimiter = ',')]
    prior: Option<Vec<f64>>,
    /// Stored fractions for the sweep.
    #[arg(long, value_delimiter = ',')]
    fractions: Option<Vec<f64>>,
    /// Radii for the defect table; 0..=N when absent.
    #[arg(long, value_delimiter = ',')]
    t: Option<Vec<usize>>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(default)]
struct FileConfig {
    #[serde(flatten)]
    params: ParamArgs,
    strategy: Option<AttackStrategy>,
    analysis: Option<Analysis>,
    method: Option<Method>,
    budget: Option<usize>,
    trials: Option<usize>,
    prior: Option<Vec<f64>>,
    fractions: Option<Vec<f64>>,
    t: Option<Vec<usize>>,
}

#[derive(Serialize)]
struct DefectRow<'a> {
    strategy: &'a str,
    method: InfoMethod,
    radius: Option<usize>,
    max_defect: Option<f64>,
    mean_defect: Option<f64>,
    views: Option<usize>,
}

#[derive(Serialize)]
struct StoreRow {
    n: usize,
    fraction: f64,
    stored: usize,
    noise_p: f64,
    expected: f64,
    mean: f64,
    std_error: f64,
    z: f64,
    trials: usize,
}

#[derive(Serialize)]
struct JRow {
    j_ec: u8,
    j_test: u8,
    count: usize,
    fraction: f64,
}

#[derive(Serialize)]
struct RunDefectRow {
    run: u64,
    c: u8,
    t: usize,
    defect: f64,
}

pub fn run(a: AttackArgs) -> Result<Outcome> {
    let file: FileConfig = load_config(a.common.config.as_deref())?;
    let params = a.params.overlay(file.params).build()?;
    let strategy = a.strategy.resolve(file.strategy)?;
    if strategy == AttackStrategy::InterceptResend {
        bail!("intercept-resend attacks the QKD channel; use simulate --protocol qkd --eve");
    }
    let analysis = a.analysis.or(file.analysis).unwrap_or_default();
    let trials = a.trials.or(file.trials);
    let seed = params.seed;
    let out = Artifacts::create(&a.common.out_dir)?;

    match analysis {
        Analysis::Info => {
            let defaults = InfoOptions::default();
            let opts = InfoOptions {
                method: match a.method.or(file.method) {
                    Some(Method::MonteCarlo) => InfoMethod::MonteCarlo,
                    _ => InfoMethod::ExactEnumeration,
                },
                budget: a.budget.or(file.budget).unwrap_or(defaults.budget),
                prior: a.prior.or(file.prior),
                trials: trials.unwrap_or(defaults.trials),
            };
            let report = match information_account(&params, &strategy, &opts) {
                Ok(r) => r,
                Err(qot_core::Error::BudgetExceeded { budget, partial }) => {
                    out.json("info_report.json", &*partial)?;
                    write_defect_csv(&out, &partial)?;
                    return Err(qot_core::Error::BudgetExceeded { budget, partial }.into());
                }
                Err(e) => return Err(e.into()),
            };
            out.json("info_report.json", &report)?;
            write_defect_csv(&out, &report)?;
            println!("Pr[pass] = {:.6}", report.pr_pass);
            println!("Pr[pass, c = 1] = {:.6}", report.pr_condition);
            println!("I(B; V | pass, c = 1) = {:.3e} bits", report.mutual_information);
            println!("I * Pr[pass] = {:.3e}", report.product);
            if strategy == AttackStrategy::RandomOk {
                random_ok(&out, &params, trials.unwrap_or(10_000), seed)?;
            }
        }
        Analysis::StoreSweep => {
            let fractions = a.fractions.or(file.fractions).unwrap_or_else(|| vec![0.125, 0.25, 0.5]);
            let trials = trials.unwrap_or(10_000);
            let rows = fractions
                .iter()
                .map(|&f| {
                    let s = store_attack_test_statistics(&params, f, trials, seed)?;
                    Ok(StoreRow {
                        z: s.z_score(),
                        n: s.n,
                        fraction: s.fraction,
                        stored: s.stored,
                        noise_p: s.noise_p,
                        expected: s.expected,
                        mean: s.mean,
                        std_error: s.std_error,
                        trials: s.trials,
                    })
                })
                .collect::<qot_core::Result<Vec<_>>>()?;
            out.csv("store_stats.csv", &rows)?;
            for r in &rows {
                println!(
                    "f = {:.4}: mean {:.3} expected {:.3} (z = {:.2})",
                    r.fraction, r.mean, r.expected, r.z
                );
            }
        }
        Analysis::RandomOk => random_ok(&out, &params, trials.unwrap_or(10_000), seed)?,
        Analysis::JTable => {
            let table = j_indicator_table(&params, &strategy, trials.unwrap_or(10_000), seed)?;
            out.json("j_table.json", &table)?;
            let used = (table.trials - table.shortage).max(1) as f64;
            let rows: Vec<JRow> = (0..2)
                .flat_map(|i| (0..2).map(move |j| (i, j)))
                .map(|(i, j)| JRow {
                    j_ec: i as u8,
                    j_test: j as u8,
                    count: table.counts[i][j],
                    fraction: table.counts[i][j] as f64 / used,
                })
                .collect();
            out.csv("j_table.csv", &rows)?;
            println!("small on E_c and passing: {:.4}", table.small_and_pass());
        }
        Analysis::Defect => {
            let radii = a.t.or(file.t).unwrap_or_else(|| (0..=params.big_n()).collect());
            let rows = defect_table(&params, &strategy, trials.unwrap_or(100), &radii)?;
            out.csv("defect_runs.csv", &rows)?;
            let max = rows.iter().map(|r| r.defect).fold(0.0f64, f64::max);
            println!("rows: {}  largest defect: {max:.3e}", rows.len());
        }
    }
    Ok(Outcome::Done)
}

fn write_defect_csv(out: &Artifacts, report: &InfoReport) -> Result<()> {
    let d = report.defect.as_ref();
    out.csv(
        "defect.csv",
        &[DefectRow {
            strategy: report.strategy.label(),
            method: report.method,
            radius: d.map(|d| d.radius),
            max_defect: d.map(|d| d.max),
            mean_defect: d.map(|d| d.mean),
            views: d.map(|d| d.views),
        }],
    )
}

fn random_ok(out: &Artifacts, params: &ProtocolParams, trials: usize, seed: u64) -> Result<()> {
    let r = random_ok_decomposition(params, trials, seed)?;
    out.csv("random_ok.csv", [&r])?;
    println!(
        "random-OK pass {:.4}; honest branch {:.4}, store-all branch {:.4}, mixture {:.4} (se {:.4})",
        r.pr_pass, r.pr_pass_honest, r.pr_pass_store_all, r.mixture, r.std_error
    );
    Ok(())
}

/// Runs that reach the announcement, each measured against every radius on `E_c`.
fn defect_table(params: &ProtocolParams, strategy: &AttackStrategy, trials: usize, radii: &[usize]) -> Result<Vec<RunDefectRow>> {
    let per_run: Vec<Vec<RunDefectRow>> = (0..trials as u64)
        .into_par_iter()
        .map(|run| {
            let t = run_string_qot(params, &random_secret(params, run), strategy, run)?;
            let (Some(e), Some(c)) = (&t.e_c, t.c) else {
                return Ok(Vec::new());
            };
            radii
                .iter()
                .map(|&radius| {
                    Ok(RunDefectRow {
                        run,
                        c,
                        t: radius,
                        defect: view_small_distance_defect(&t, e, radius)?,
                    })
                })
                .collect()
        })
        .collect::<qot_core::Result<_>>()?;
    Ok(per_run.into_iter().flatten().collect())
}
