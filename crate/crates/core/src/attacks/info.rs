use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::attacks::defect::{view_small_distance_defect, VIEW_QUBIT_CAP};
use crate::attacks::model::{branches, poisson_binomial_cdf, PhotonClass, PhotonModel};
use crate::attacks::AttackStrategy;
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec, LinearCodeSpec};
use crate::protocol::{run_string_qot, CodeChoice, Mode, ProtocolParams, Step};
use crate::rng::run_stream;

/// Caps for exact enumeration.
pub const EXACT_MAX_PHOTONS: usize = 10;
pub const EXACT_MAX_SET: usize = 3;
pub const EXACT_MAX_SECRET: usize = 2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfoMethod {
    #[default]
    ExactEnumeration,
    MonteCarlo,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfoOptions {
    pub method: InfoMethod,
    /// Enumerated states (exact) or runs (Monte Carlo) before giving up.
    pub budget: usize,
    /// Distribution of `B` indexed by the big-endian value of `b`; uniform when absent.
    pub prior: Option<Vec<f64>>,
    /// Runs for the Monte Carlo method.
    pub trials: usize,
}

impl Default for InfoOptions {
    fn default() -> Self {
        InfoOptions {
            method: InfoMethod::ExactEnumeration,
            budget: 1 << 26,
            prior: None,
            trials: 10_000,
        }
    }
}

/// `||P_0 phi_v||^2 / ||phi_v||^2` over the receiver's views on `E_c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectStats {
    pub radius: usize,
    pub max: f64,
    pub mean: f64,
    pub views: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfoReport {
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub r: usize,
    pub m: usize,
    pub delta: f64,
    pub epsilon: f64,
    pub noise_p: f64,
    pub strategy: AttackStrategy,
    pub method: InfoMethod,
    pub pr_pass: f64,
    /// Pass and no set shortage.
    pub pr_proceed: f64,
    /// Pass, no shortage and `c = 1`.
    pub pr_condition: f64,
    /// `I(B; V | Pass = 1, C = 1)` in bits.
    pub mutual_information: f64,
    /// `mutual_information * pr_pass`.
    pub product: f64,
    pub prior_entropy: f64,
    pub samples_or_statespace: usize,
    pub codes: usize,
    pub defect: Option<DefectStats>,
    pub valid: bool,
}

pub fn information_account(
    params: &ProtocolParams,
    strategy: &AttackStrategy,
    opts: &InfoOptions,
) -> Result<InfoReport> {
    params.validate()?;
    let prior = prior_of(params.m, opts.prior.as_deref())?;
    match opts.method {
        InfoMethod::ExactEnumeration => exact(params, strategy, &prior, opts.budget),
        InfoMethod::MonteCarlo => monte_carlo(params, strategy, &prior, opts),
    }
}

fn prior_of(m: usize, prior: Option<&[f64]>) -> Result<Vec<f64>> {
    let size = 1usize << m;
    match prior {
        None => Ok(vec![1.0 / size as f64; size]),
        Some(p) => {
            if p.len() != size {
                return Err(Error::dim("prior size", size, p.len()));
            }
            if p.iter().any(|&x| x.is_nan() || x < 0.0) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return Err(Error::domain("prior must be a probability vector"));
            }
            Ok(p.to_vec())
        }
    }
}

fn entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.log2()).sum::<f64>()
}

/// `I(B; K)` from a joint table `joint[b][k]`.
fn mutual_information(joint: &[Vec<f64>]) -> f64 {
    let total: f64 = joint.iter().flatten().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let pb: Vec<f64> = joint.iter().map(|row| row.iter().sum::<f64>() / total).collect();
    let keys = joint.first().map_or(0, Vec::len);
    let pk: Vec<f64> = (0..keys).map(|k| joint.iter().map(|row| row[k]).sum::<f64>() / total).collect();
    let mut info = 0.0;
    for (b, row) in joint.iter().enumerate() {
        for (k, &x) in row.iter().enumerate() {
            if x > 0.0 {
                let pj = x / total;
                info += pj * (pj / (pb[b] * pk[k])).log2();
            }
        }
    }
    info.max(0.0)
}

/// Codes averaged over: the configured one, or every full-rank matrix for the random choices.
fn code_ensemble(params: &ProtocolParams) -> Result<Vec<LinearCodeSpec>> {
    let big_n = params.big_n();
    let rows = params.r + params.m;
    Ok(match &params.code {
        CodeChoice::Fixed(c) => vec![c.clone()],
        CodeChoice::Yao => vec![LinearCodeSpec::yao(big_n)],
        CodeChoice::Random | CodeChoice::RandomFullRank => {
            let mut out = Vec::new();
            for bits in 0..1usize << (rows * big_n) {
                let f = BitMatrix::from_rows(
                    big_n,
                    (0..rows)
                        .map(|i| BitVec::from_index(big_n, (bits >> (i * big_n)) & ((1 << big_n) - 1)))
                        .collect(),
                )?;
                if f.rank() == rows {
                    out.push(LinearCodeSpec::new(f, params.r, params.m)?);
                }
            }
            out
        }
    })
}

/// `I(B; v, s, a)` for one code when the receiver's outcome on each position
/// of `E_c` follows `channels[j][w][v]`.
fn key_information(code: &LinearCodeSpec, channels: &[[[f64; 2]; 2]], prior: &[f64]) -> Result<f64> {
    let big_n = code.big_n();
    let (r, m) = (code.r(), code.m());
    let (g, h) = (code.g(), code.h());
    let keys = 1usize << (big_n + r + m);
    let mut joint = vec![vec![0.0; keys]; prior.len()];
    let scale = 1.0 / (1usize << big_n) as f64;
    for w in 0..1usize << big_n {
        let wv = BitVec::from_index(big_n, w);
        let s = g.matvec(&wv)?.to_index();
        let t = h.matvec(&wv)?.to_index();
        for v in 0..1usize << big_n {
            let pv: f64 = (0..big_n)
                .map(|j| {
                    let bit = |x: usize| (x >> (big_n - 1 - j)) & 1;
                    channels[j][bit(w)][bit(v)]
                })
                .product();
            if pv == 0.0 {
                continue;
            }
            for (b, &pb) in prior.iter().enumerate() {
                let key = (v << (r + m)) | (s << m) | (b ^ t);
                joint[b][key] += pb * scale * pv;
            }
        }
    }
    Ok(mutual_information(&joint))
}

fn combinations(items: &[usize], k: usize, out: &mut Vec<Vec<usize>>) {
    fn go(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    go(items, k, 0, &mut Vec::with_capacity(k), out);
}

fn base_report(params: &ProtocolParams, strategy: &AttackStrategy, method: InfoMethod, prior: &[f64]) -> InfoReport {
    InfoReport {
        n: params.n,
        big_n: params.big_n(),
        r: params.r,
        m: params.m,
        delta: params.delta,
        epsilon: params.epsilon(),
        noise_p: params.noise_p,
        strategy: strategy.clone(),
        method,
        pr_pass: 0.0,
        pr_proceed: 0.0,
        pr_condition: 0.0,
        mutual_information: 0.0,
        product: 0.0,
        prior_entropy: entropy(prior),
        samples_or_statespace: 0,
        codes: 0,
        defect: None,
        valid: true,
    }
}

fn exact(params: &ProtocolParams, strategy: &AttackStrategy, prior: &[f64], budget: usize) -> Result<InfoReport> {
    let n = params.n;
    let big_n = params.big_n();
    for (what, requested, limit) in [
        ("exact accounting photons", n, EXACT_MAX_PHOTONS),
        ("exact accounting set size", big_n, EXACT_MAX_SET),
        ("exact accounting secret length", params.m, EXACT_MAX_SECRET),
    ] {
        if requested > limit {
            return Err(Error::Resource { what, requested, limit });
        }
    }
    let model = PhotonModel::new(params.noise_p, strategy);
    let limit = params.max_test_errors();
    let mut report = base_report(params, strategy, InfoMethod::ExactEnumeration, prior);
    // E_c profile (classes in position order) -> probability of (Pass, no shortage, that profile)
    let mut profiles: BTreeMap<Vec<PhotonClass>, f64> = BTreeMap::new();
    let configs = 1usize << (2 * n);
    let cfg_weight = 1.0 / configs as f64;
    let mut states = 0usize;
    let mut pool1 = Vec::with_capacity(n);
    let mut subsets = Vec::new();
    for br in branches(strategy, n)? {
        for cfg in 0..configs {
            states += 1;
            if states > budget {
                report.valid = false;
                report.samples_or_statespace = states - 1;
                return Err(Error::BudgetExceeded {
                    budget,
                    partial: Box::new(report),
                });
            }
            let matching = |i: usize| (cfg >> (2 * i)) & 1 == 1;
            let tested = |i: usize| (cfg >> (2 * i + 1)) & 1 == 1;
            let pp = poisson_binomial_cdf(
                (0..n).filter(|&i| matching(i) && tested(i)).map(|i| model.test_error(br.classes[i])),
                limit,
            );
            let w = br.weight * cfg_weight * pp;
            report.pr_pass += w;
            let pool0 = (0..n).filter(|&i| matching(i) && !tested(i) && !br.exclude[i]).count();
            pool1.clear();
            pool1.extend((0..n).filter(|&i| !matching(i) && !tested(i) && !br.exclude[i]));
            if pool0 < big_n || pool1.len() < big_n || w == 0.0 {
                continue;
            }
            report.pr_proceed += w;
            subsets.clear();
            combinations(&pool1, big_n, &mut subsets);
            let each = w / subsets.len() as f64;
            for s in &subsets {
                *profiles.entry(s.iter().map(|&i| br.classes[i]).collect()).or_insert(0.0) += each;
            }
        }
    }
    report.samples_or_statespace = states;
    report.pr_condition = 0.5 * report.pr_proceed;

    let codes = code_ensemble(params)?;
    report.codes = codes.len();
    let radius = params.small_distance_radius();
    let mut defect = DefectStats {
        radius,
        max: 0.0,
        mean: 0.0,
        views: profiles.len(),
    };
    let mut info = 0.0;
    if report.pr_proceed > 0.0 {
        for (profile, &w) in &profiles {
            let channels: Vec<_> = profile.iter().map(|&c| model.mismatched_channel(c)).collect();
            let mut i_key = 0.0;
            for code in &codes {
                i_key += key_information(code, &channels, prior)?;
            }
            i_key /= codes.len() as f64;
            let share = w / report.pr_proceed;
            info += share * i_key;
            let d = 1.0 - poisson_binomial_cdf(profile.iter().map(|&c| model.mismatched_defect_rate(c)), radius);
            let d = d.max(0.0);
            defect.max = defect.max.max(d);
            defect.mean += share * d;
        }
    }
    report.mutual_information = info;
    report.product = info * report.pr_pass;
    report.defect = Some(defect);
    Ok(report)
}

fn sample_prior<R: Rng + ?Sized>(prior: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (b, &p) in prior.iter().enumerate() {
        acc += p;
        if u < acc {
            return b;
        }
    }
    prior.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Plug-in estimate over the view `(f, stored part of E_c, v[E_c], s, a)` from protocol runs,
/// with the final announcement of `w` outside `E_c` switched on.
fn monte_carlo(
    params: &ProtocolParams,
    strategy: &AttackStrategy,
    prior: &[f64],
    opts: &InfoOptions,
) -> Result<InfoReport> {
    let mut p = params.clone();
    p.announce_complement = true;
    p.force_c = None;
    let radius = p.small_distance_radius();
    let with_defect = p.mode == Mode::ExactQuantum && p.n <= VIEW_QUBIT_CAP;
    let mut report = base_report(params, strategy, InfoMethod::MonteCarlo, prior);
    let mut table: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    let (mut passed, mut proceeded, mut conditioned) = (0usize, 0usize, 0usize);
    let mut defects = Vec::new();
    let runs = opts.trials.min(opts.budget);
    for run in 0..runs as u64 {
        let b = sample_prior(prior, &mut run_stream(p.seed, run, Step::Secret as u8));
        let t = run_string_qot(&p, &BitVec::from_index(p.m, b), strategy, run)?;
        passed += usize::from(t.pass);
        if t.sets.is_none() {
            continue;
        }
        proceeded += 1;
        if t.c != Some(1) {
            continue;
        }
        conditioned += 1;
        let e_c = t.e_c.as_ref().expect("c is set together with E_c");
        let v = t.bob_final.as_ref().expect("completed runs carry final outcomes").restrict(e_c)?;
        let f: Vec<String> = t.code.f().rows().iter().map(ToString::to_string).collect();
        // the receiver knows which photons of E_c he kept
        let kept: String = e_c.iter().map(|i| if t.stored.contains(i) { 's' } else { 'm' }).collect();
        let key = format!(
            "{}|{}|{}|{}|{}",
            f.join(","),
            kept,
            v,
            t.s.as_ref().expect("announced"),
            t.a.as_ref().expect("announced")
        );
        table.entry(key).or_insert_with(|| vec![0.0; prior.len()])[b] += 1.0;
        if with_defect {
            defects.push(view_small_distance_defect(&t, e_c, radius)?);
        }
    }
    let r = runs.max(1) as f64;
    report.pr_pass = passed as f64 / r;
    report.pr_proceed = proceeded as f64 / r;
    report.pr_condition = conditioned as f64 / r;
    report.samples_or_statespace = runs;
    let mut joint = vec![Vec::with_capacity(table.len()); prior.len()];
    for counts in table.values() {
        for (b, &c) in counts.iter().enumerate() {
            joint[b].push(c);
        }
    }
    report.mutual_information = mutual_information(&joint);
    report.product = report.mutual_information * report.pr_pass;
    report.codes = table.keys().map(|k| k.split('|').next().unwrap_or_default()).collect::<std::collections::BTreeSet<_>>().len();
    if with_defect {
        report.defect = Some(DefectStats {
            radius,
            max: defects.iter().copied().fold(0.0, f64::max),
            mean: if defects.is_empty() { 0.0 } else { defects.iter().sum::<f64>() / defects.len() as f64 },
            views: defects.len(),
        });
    }
    if opts.trials > opts.budget {
        report.valid = false;
        return Err(Error::BudgetExceeded {
            budget: opts.budget,
            partial: Box::new(report),
        });
    }
    Ok(report)
}
