use anyhow::{anyhow, bail, Result};
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qot_core::cosetrho::{certify_delta, rho_closed_form, CosetEnsemble};
use qot_core::gf2::span_elements;
use qot_core::{BasisString, BitMatrix, BitVec, LinearCodeSpec, PositionSet};

use crate::args::{load_config, CommonArgs};
use crate::output::Artifacts;
use crate::Outcome;

/// A certificate whose hypothesis holds fails above this defect.
const DEFECT_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeKind {
    Yao,
    Random,
    Fixed,
}

#[derive(Args, Debug)]
pub struct DensityArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_enum)]
    code: Option<CodeKind>,
    #[arg(long = "N")]
    big_n: Option<usize>,
    /// Rows of a random code.
    #[arg(long)]
    rows: Option<usize>,
    /// Rows of a fixed code, comma separated bit strings.
    #[arg(long, value_delimiter = ',')]
    f: Option<Vec<String>>,
    /// Number of random codes.
    #[arg(long)]
    codes: Option<usize>,
    /// Radii to certify; 0..=ceil(N/2) when absent (larger radii never meet the hypothesis).
    #[arg(long, value_delimiter = ',')]
    t: Option<Vec<usize>>,
    /// Positions the distance is measured on; all of them when absent.
    #[arg(long, value_delimiter = ',')]
    e: Option<Vec<usize>>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    code: Option<CodeKind>,
    #[serde(rename = "N")]
    big_n: Option<usize>,
    rows: Option<usize>,
    f: Option<Vec<String>>,
    codes: Option<usize>,
    t: Option<Vec<usize>>,
    e: Option<Vec<usize>>,
    seed: Option<u64>,
}

#[derive(Serialize)]
struct Record {
    code: usize,
    f: Vec<BitVec>,
    theta: BasisString,
    w_hat: BitVec,
    x: BitVec,
    #[serde(rename = "x'")]
    x2: BitVec,
    #[serde(rename = "dN")]
    d_n: Option<usize>,
    #[serde(rename = "dE")]
    d_e: Option<usize>,
    t: usize,
    condition_met: bool,
    operator_norm: f64,
    basis_defect: f64,
    max_defect: f64,
    witness_value: Option<f64>,
}

pub fn run(a: DensityArgs) -> Result<Outcome> {
    let file: FileConfig = load_config(a.common.config.as_deref())?;
    let kind = a.code.or(file.code).unwrap_or(CodeKind::Random);
    let seed = a.seed.or(file.seed).unwrap_or(0);
    let f_rows = a.f.or(file.f);
    let big_n = match (a.big_n.or(file.big_n), &f_rows) {
        (Some(n), _) => n,
        (None, Some(rows)) if !rows.is_empty() => rows[0].len(),
        _ => bail!("--N is required"),
    };
    let codes: Vec<LinearCodeSpec> = match kind {
        CodeKind::Yao => vec![LinearCodeSpec::yao(big_n)],
        CodeKind::Fixed => {
            let rows = f_rows.ok_or_else(|| anyhow!("--code fixed needs --f"))?;
            let refs: Vec<&str> = rows.iter().map(String::as_str).collect();
            vec![LinearCodeSpec::new(BitMatrix::parse_rows(big_n, &refs)?, 0, rows.len())?]
        }
        CodeKind::Random => {
            let rows = a.rows.or(file.rows).ok_or_else(|| anyhow!("--code random needs --rows"))?;
            let count = a.codes.or(file.codes).unwrap_or(1);
            (0..count)
                .map(|i| {
                    let mut r = qot_core::rng::stream(seed, i as u64);
                    LinearCodeSpec::new(BitMatrix::random(rows, big_n, &mut r), 0, rows)
                })
                .collect::<qot_core::Result<_>>()?
        }
    };
    let radii = a.t.or(file.t).unwrap_or_else(|| (0..=big_n.div_ceil(2)).collect());
    let e = match a.e.or(file.e) {
        Some(p) => PositionSet::new(big_n, p)?,
        None => PositionSet::full(big_n),
    };

    let per_code: Vec<Vec<Record>> = codes
        .par_iter()
        .enumerate()
        .map(|(i, code)| certify_code(i, code, &radii, &e, seed))
        .collect::<Result<_>>()?;
    let records: Vec<Record> = per_code.into_iter().flatten().collect();

    let out = Artifacts::create(&a.common.out_dir)?;
    out.json_lines("certificates.jsonl", &records)?;

    let in_hyp = records.iter().filter(|r| r.condition_met).count();
    let failed = records
        .iter()
        .filter(|r| r.condition_met && r.max_defect > DEFECT_TOLERANCE)
        .count();
    let worst = records
        .iter()
        .filter(|r| r.condition_met)
        .map(|r| r.max_defect)
        .fold(0.0f64, f64::max);
    println!("codes: {}  certificates: {}  in hypothesis: {in_hyp}", codes.len(), records.len());
    println!("largest in-hypothesis defect: {worst:.3e}");
    if failed > 0 {
        println!("FAILED: {failed} in-hypothesis certificates exceed {DEFECT_TOLERANCE:e}");
        return Ok(Outcome::CertificateFailure);
    }
    Ok(Outcome::Done)
}

/// Image of `f` in increasing order: the span of its columns.
fn image(f: &BitMatrix) -> Vec<BitVec> {
    let rows = f.nrows();
    let cols: Vec<BitVec> = (0..f.ncols())
        .map(|j| BitVec::from_bools(&(0..rows).map(|i| f.get(i, j)).collect::<Vec<_>>()))
        .collect();
    let basis = BitMatrix::from_rows(rows, cols).expect("columns have one entry per row").echelon().rows;
    let mut xs = span_elements(&BitVec::zeros(rows), &basis);
    xs.sort();
    xs
}

/// Every unordered pair of distinct image points, every radius. The basis
/// string and ball center are drawn per code from `seed`.
fn certify_code(index: usize, code: &LinearCodeSpec, radii: &[usize], e: &PositionSet, seed: u64) -> Result<Vec<Record>> {
    let big_n = code.big_n();
    let mut rng = qot_core::rng::stream(seed, (1 << 32) | index as u64);
    let theta = BasisString::random(big_n, &mut rng);
    let w_hat = BitVec::random(big_n, &mut rng);
    let xs = image(code.f());
    let rhos = xs
        .iter()
        .map(|x| rho_closed_form::<f64>(&CosetEnsemble::new(code.clone(), x.clone(), theta.clone())?))
        .collect::<qot_core::Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            let delta = rhos[i].sub(&rhos[j])?;
            for &t in radii {
                let cert = certify_delta(code, &delta, e, t, &w_hat)?;
                out.push(Record {
                    code: index,
                    f: code.f().rows().to_vec(),
                    theta: theta.clone(),
                    w_hat: w_hat.clone(),
                    x: xs[i].clone(),
                    x2: xs[j].clone(),
                    d_n: cert.d_n,
                    d_e: cert.d_e,
                    t,
                    condition_met: cert.condition_met,
                    operator_norm: cert.operator_norm,
                    basis_defect: cert.basis_defect,
                    max_defect: cert.max_defect,
                    witness_value: cert.witness.map(|w| w.value),
                });
            }
        }
    }
    Ok(out)
}
