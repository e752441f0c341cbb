//! End-to-end acceptance checks. Each test prints one PASS/FAIL line.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;

use rand::Rng;

use qot_core::attacks::{
    apply_strategy, information_account, store_attack_test_statistics, AttackStrategy, InfoOptions, StoreSpec,
};
use qot_core::cosetrho::{certify_delta, gv_bound_trial, rho_brute, rho_closed_form, rho_zero_induction, CosetEnsemble};
use qot_core::protocol::{
    honest_joint_distribution, law_distance, run_string_qot, transmit, CodeChoice, Mode, ProtocolParams, Transcript,
};
use qot_core::rng::stream;
use qot_core::{BasisString, BitMatrix, BitVec, LinearCodeSpec, PositionSet};

fn report(id: u8, ok: bool, detail: &str) {
    println!("criterion {id}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
}

/// Number of `k`-dimensional subspaces of GF(2)^n.
fn gaussian_binomial(n: usize, k: usize) -> usize {
    let mut num = 1usize;
    let mut den = 1usize;
    for i in 0..k {
        num *= (1 << (n - i)) - 1;
        den *= (1 << (i + 1)) - 1;
    }
    num / den
}

/// One full-rank matrix per row space: those already in reduced echelon form.
fn row_spaces(big_n: usize, rank: usize) -> Vec<LinearCodeSpec> {
    let mut out = Vec::new();
    for bits in 0usize..1 << (rank * big_n) {
        let rows: Vec<BitVec> = (0..rank)
            .map(|i| BitVec::from_index(big_n, (bits >> (i * big_n)) & ((1 << big_n) - 1)))
            .collect();
        let f = BitMatrix::from_rows(big_n, rows.clone()).unwrap();
        let ech = f.echelon();
        if ech.rank() == rank && ech.rows == rows {
            out.push(LinearCodeSpec::new(f, 0, rank).unwrap());
        }
    }
    out
}

/// Codes of the sweep: `N` in 2..=6, `rank(f)` in 1..=3, kernel dimension at most 4.
fn sweep_codes() -> Vec<LinearCodeSpec> {
    let mut codes = Vec::new();
    for big_n in 2..=6usize {
        for rank in 1..=3usize.min(big_n) {
            if big_n - rank <= 4 {
                codes.extend(row_spaces(big_n, rank));
            }
        }
    }
    codes
}

fn brute_matches_closed(code: &LinearCodeSpec, theta: &BasisString) -> f64 {
    let rows = code.r() + code.m();
    let mut worst = 0.0f64;
    for xi in 0..1usize << rows {
        let x = BitVec::from_index(rows, xi);
        let Ok(ens) = CosetEnsemble::new(code.clone(), x, theta.clone()) else {
            continue;
        };
        let brute = rho_brute::<f64>(&ens).unwrap().represent(&ens.theta_hat()).unwrap();
        let closed = rho_closed_form::<f64>(&ens).unwrap();
        worst = worst.max(brute.matrix.max_abs_diff(&closed.matrix).unwrap());
    }
    worst
}

#[test]
fn criterion_1_closed_form_matches_brute_force() {
    let mut count_ok = true;
    for big_n in 2..=6usize {
        for rank in 1..=3usize.min(big_n) {
            count_ok &= row_spaces(big_n, rank).len() == gaussian_binomial(big_n, rank);
        }
    }
    let codes = sweep_codes();
    let mut worst = 0.0f64;
    for (i, code) in codes.iter().enumerate() {
        let theta = BasisString::random(code.big_n(), &mut stream(101, i as u64));
        worst = worst.max(brute_matches_closed(code, &theta));
    }
    let mut random_worst = 0.0f64;
    for big_n in [7usize, 8] {
        for i in 0..100u64 {
            let mut rng = stream(102 + big_n as u64, i);
            let rows = rng.random_range(1..=3usize);
            let r = rng.random_range(0..rows);
            let code = LinearCodeSpec::random(big_n, r, rows - r, &mut rng).unwrap();
            let theta = BasisString::random(big_n, &mut rng);
            random_worst = random_worst.max(brute_matches_closed(&code, &theta));
        }
    }
    let ok = count_ok && worst <= 1e-10 && random_worst <= 1e-10;
    report(
        1,
        ok,
        &format!(
            "{} exhaustive codes, max gap {worst:.1e}; 200 random codes at N = 7, 8, max gap {random_worst:.1e}",
            codes.len()
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_2_induction_reaches_the_coset_state() {
    let mut worst_claim = 0.0f64;
    let mut worst_final = 0.0f64;
    for i in 0..50u64 {
        let mut rng = stream(201, i);
        let big_n = rng.random_range(2..=6usize);
        let rows = rng.random_range(1..big_n.min(4));
        let code = LinearCodeSpec::random(big_n, 0, rows, &mut rng).unwrap();
        let theta = BasisString::random(big_n, &mut rng);
        let trace = rho_zero_induction::<f64>(&code, &theta).unwrap();
        let d = 1usize << big_n;
        let hat = theta.opposite();
        for j in 0..trace.len() {
            // 2^-N where gamma = a ^ b is orthogonal to beta_1..beta_j, zero elsewhere.
            let rep = trace.steps[j].represent(&hat).unwrap();
            for a in 0..d {
                for b in 0..d {
                    let gamma = a ^ b;
                    let orth = trace.kernel_basis[..j]
                        .iter()
                        .all(|k| (k.to_index() & gamma).count_ones() % 2 == 0);
                    let want = if orth { 1.0 / d as f64 } else { 0.0 };
                    worst_claim = worst_claim.max((rep.matrix.get(a, b) - want).norm());
                }
            }
        }
        let ens = CosetEnsemble::new(code.clone(), BitVec::zeros(rows), theta.clone()).unwrap();
        let brute = rho_brute::<f64>(&ens).unwrap();
        let last = trace.steps.last().unwrap();
        worst_final = worst_final.max(last.matrix().max_abs_diff(brute.matrix()).unwrap());
    }
    let ok = worst_claim <= 1e-12 && worst_final <= 1e-12;
    report(
        2,
        ok,
        &format!("50 codes; claimed form gap {worst_claim:.1e}, final vs brute force {worst_final:.1e}"),
    );
    assert!(ok);
}

#[test]
fn criterion_3_low_distance_blocks_vanish() {
    let codes = sweep_codes();
    let mut in_hyp = 0usize;
    let mut worst = 0.0f64;
    let mut witnesses = 0usize;
    let mut tried_out = 0usize;
    for (i, code) in codes.iter().enumerate() {
        let big_n = code.big_n();
        let rows = code.m();
        let mut rng = stream(301, i as u64);
        let theta = BasisString::random(big_n, &mut rng);
        let w_hat = BitVec::random(big_n, &mut rng);
        let e = PositionSet::full(big_n);
        let d = code.min_distance().unwrap().unwrap();
        let rhos: Vec<_> = (0..1usize << rows)
            .map(|x| {
                let ens = CosetEnsemble::new(code.clone(), BitVec::from_index(rows, x), theta.clone()).unwrap();
                rho_closed_form::<f64>(&ens).unwrap()
            })
            .collect();
        for a in 0..rhos.len() {
            for b in a + 1..rhos.len() {
                let delta = rhos[a].sub(&rhos[b]).unwrap();
                for t in 0..=(d - 1) / 2 {
                    let cert = certify_delta(code, &delta, &e, t, &w_hat).unwrap();
                    assert!(cert.condition_met);
                    in_hyp += 1;
                    worst = worst.max(cert.operator_norm).max(cert.max_defect);
                }
                if witnesses < 10 && tried_out < 400 && big_n <= 5 {
                    tried_out += 1;
                    let cert = certify_delta(code, &delta, &e, d.div_ceil(2), &w_hat).unwrap();
                    assert!(!cert.condition_met);
                    if cert.witness.is_some_and(|w| w.value.abs() > 1e-3) {
                        witnesses += 1;
                    }
                }
            }
        }
    }
    let ok = worst <= 1e-10 && witnesses >= 10;
    report(
        3,
        ok,
        &format!(
            "{in_hyp} in-hypothesis certificates, max norm {worst:.1e}; {witnesses} witnesses out of {tried_out} out-of-hypothesis tries"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_4_no_information_without_storage_on_the_chosen_set() {
    let mut worst = 0.0f64;
    let mut lines = Vec::new();
    for (r, code) in [(0usize, CodeChoice::Yao), (1, CodeChoice::RandomFullRank)] {
        let mut p = ProtocolParams::new(8, 2, r, 1);
        p.code = code;
        p.delta = 0.125;
        for strategy in [
            AttackStrategy::Honest,
            AttackStrategy::StoreSubset {
                store: StoreSpec::Count(2),
                avoid_in_sets: true,
            },
        ] {
            let rep = information_account(&p, &strategy, &InfoOptions::default()).unwrap();
            assert!(rep.valid && rep.pr_condition > 0.0);
            worst = worst.max(rep.mutual_information.abs());
            lines.push(format!("r={r} {}: {:.1e}", strategy.label(), rep.mutual_information));
        }
    }
    let ok = worst <= 1e-9;
    report(4, ok, &lines.join(", "));
    assert!(ok);
}

#[test]
fn criterion_5_stored_photons_cost_one_error_in_eight() {
    let p = ProtocolParams::new(128, 30, 0, 1);
    let mut lines = Vec::new();
    let mut ok = true;
    for f in [0.125, 0.25, 0.5] {
        let s = store_attack_test_statistics(&p, f, 10_000, 501).unwrap();
        let expected = 128.0 * f / 8.0;
        let z = (s.mean - expected).abs() / s.std_error;
        ok &= z <= 3.0;
        lines.push(format!("f={f}: mean {:.3} vs {expected} (z {z:.2})", s.mean));
    }
    // f = eps = 8 delta: the mean sits at delta n.
    let delta = 0.125 / 8.0;
    let s = store_attack_test_statistics(&p, 8.0 * delta, 10_000, 502).unwrap();
    let z = (s.mean - delta * 128.0).abs() / s.std_error;
    ok &= z <= 3.0;
    lines.push(format!("f=8delta: z {z:.2} against delta n"));
    report(5, ok, &lines.join(", "));
    assert!(ok);
}

/// Agreement rates on matching and mismatched bases, with their counts.
fn agreement(mode: Mode, p: f64, trials: usize, seed: u64) -> (f64, usize, f64, usize) {
    let mut rng = stream(seed, 0);
    let mut meas = stream(seed, 1);
    let channel = ProtocolParams {
        noise_p: p,
        ..ProtocolParams::new(1, 1, 0, 1)
    }
    .channel();
    let mut tally = [[0usize; 2]; 2];
    let mut run = |w: &BitVec, theta: &BasisString, rng: &mut qot_core::rng::Rng, meas: &mut qot_core::rng::Rng| {
        let rx = transmit(w, theta, channel, mode, rng).unwrap();
        let bob = apply_strategy(&AttackStrategy::Honest, &rx, rng, meas).unwrap();
        for i in 0..w.len() {
            let matched = usize::from(bob.theta_hat.get(i) == theta.get(i));
            tally[matched][0] += 1;
            tally[matched][1] += usize::from(bob.outcomes.get(i) == w.get(i));
        }
    };
    match mode {
        Mode::ClassicalFast => {
            let w = BitVec::random(trials, &mut rng);
            let theta = BasisString::random(trials, &mut rng);
            run(&w, &theta, &mut rng, &mut meas);
        }
        Mode::ExactQuantum => {
            for _ in 0..trials {
                let w = BitVec::random(1, &mut rng);
                let theta = BasisString::random(1, &mut rng);
                run(&w, &theta, &mut rng, &mut meas);
            }
        }
    }
    let rate = |k: usize| tally[k][1] as f64 / tally[k][0] as f64;
    (rate(1), tally[1][0], rate(0), tally[0][0])
}

fn within_3_sigma(rate: f64, expected: f64, count: usize) -> bool {
    let se = (expected * (1.0 - expected) / count as f64).sqrt();
    if se == 0.0 {
        rate == expected
    } else {
        (rate - expected).abs() <= 3.0 * se
    }
}

#[test]
fn criterion_6_basis_statistics() {
    let mut ok = true;
    let mut lines = Vec::new();
    for (k, p) in [0.0, 0.02, 0.1].into_iter().enumerate() {
        for mode in [Mode::ClassicalFast, Mode::ExactQuantum] {
            let (m, mc, x, xc) = agreement(mode, p, 100_000, 600 + k as u64);
            ok &= within_3_sigma(m, 1.0 - p, mc) && within_3_sigma(x, 0.5, xc);
            lines.push(format!("{mode:?} p={p}: matching {m:.4}, mismatched {x:.4}"));
        }
    }
    report(6, ok, &lines.join("; "));
    assert!(ok);
}

/// (correct, decoded) over 40000 fixture runs with `c = 0`, measured once and pinned.
const FIXTURE_DECODES: (usize, usize) = (413, 426);

#[test]
fn criterion_7_round_trip() {
    let mut all_ok = true;
    let mut runs = 0usize;
    for cfg in 0..20u64 {
        let mut rng = stream(701, cfg);
        let n = rng.random_range(96..=160usize);
        let big_n = rng.random_range(3..=8usize);
        let m = rng.random_range(1..=big_n.min(3));
        let r = rng.random_range(0..=(big_n - m).min(3));
        let mut p = ProtocolParams::new(n, big_n, r, m);
        p.seed = 7000 + cfg;
        p.force_c = Some(0);
        for run in 0..1000u64 {
            let b = BitVec::random(m, &mut rng);
            let t = run_string_qot(&p, &b, &AttackStrategy::Honest, run).unwrap();
            all_ok &= t.b_hat.as_ref() == Some(&b);
            runs += 1;
        }
    }

    let mut p = ProtocolParams::new(16, 6, 3, 2);
    p.noise_p = 0.02;
    p.seed = 7;
    p.force_c = Some(0);
    let outcomes: Vec<bool> = (0..40_000u64)
        .filter_map(|run| {
            let b = qot_core::protocol::random_secret(&p, run);
            run_string_qot(&p, &b, &AttackStrategy::Honest, run).unwrap().decoded_ok()
        })
        .collect();
    let correct = outcomes.iter().filter(|&&x| x).count();
    let rate = correct as f64 / outcomes.len() as f64;
    let ok = all_ok && rate >= 0.95 && (correct, outcomes.len()) == FIXTURE_DECODES;
    report(
        7,
        ok,
        &format!(
            "noiseless: {runs} runs all correct = {all_ok}; fixture decode success {rate:.6} over {} decoded runs",
            outcomes.len()
        ),
    );
    assert!(ok);
}

/// Fraction of the 200 codes drawn from seed 8 meeting the bound.
const FIXTURE_GV_FRACTION: f64 = 1.0;

#[test]
fn criterion_8_random_codes_meet_the_entropy_bound() {
    let rep = gv_bound_trial(16, 8, 0.1, 200, 8).unwrap();
    // Threshold recomputed here by bisection on H.
    let h = |x: f64| -x * x.log2() - (1.0 - x) * (1.0 - x).log2();
    let (mut lo, mut hi) = (1e-15, 0.5);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let threshold = lo - 0.1;
    let satisfied = rep
        .trials
        .iter()
        .filter(|t| t.d_n.is_none_or(|d| d as f64 / 16.0 > threshold))
        .count();
    let fraction = satisfied as f64 / 200.0;
    let ok = (rep.threshold - threshold).abs() < 1e-9
        && fraction == rep.fraction()
        && fraction >= 0.9
        && fraction == FIXTURE_GV_FRACTION;
    report(8, ok, &format!("threshold {threshold:.6}, fraction {fraction}"));
    assert!(ok);
}

fn outcome_histogram(ts: &[Transcript]) -> BTreeMap<String, usize> {
    let mut h = BTreeMap::new();
    for t in ts {
        let abort = t.abort.as_ref().map_or("none", |a| a.label());
        let decoded = match t.decoded_ok() {
            Some(true) => "ok",
            Some(false) => "wrong",
            None => "-",
        };
        *h.entry(format!("errors={} abort={abort} c={:?} b_hat={decoded}", t.test_errors, t.c))
            .or_insert(0) += 1;
    }
    h
}

#[test]
fn criterion_9_modes_agree() {
    let mut exact_gap = 0.0f64;
    for n in 1..=3usize {
        for (big_n, r) in [(1usize, 0usize), (2, 0), (2, 1)] {
            if big_n > n {
                continue;
            }
            let mut p = ProtocolParams::new(n, big_n, r, 1);
            p.noise_p = 0.1;
            p.delta = 0.34;
            let b: BitVec = "1".parse().unwrap();
            let q = honest_joint_distribution(&p, &b).unwrap();
            p.mode = Mode::ExactQuantum;
            let e = honest_joint_distribution(&p, &b).unwrap();
            exact_gap = exact_gap.max(law_distance(&q, &e));
        }
    }

    let trials = 10_000u64;
    let sample = |mode: Mode, seed: u64| {
        let mut p = ProtocolParams::new(8, 2, 1, 1);
        p.noise_p = 0.1;
        p.delta = 0.125;
        p.mode = mode;
        p.seed = seed;
        let ts: Vec<Transcript> = (0..trials)
            .map(|run| {
                let b = qot_core::protocol::random_secret(&p, run);
                run_string_qot(&p, &b, &AttackStrategy::Honest, run).unwrap()
            })
            .collect();
        outcome_histogram(&ts)
    };
    let a = sample(Mode::ClassicalFast, 901);
    let b = sample(Mode::ExactQuantum, 902);
    let mut worst_z = 0.0f64;
    let keys: std::collections::BTreeSet<_> = a.keys().chain(b.keys()).collect();
    for k in &keys {
        let x = *a.get(*k).unwrap_or(&0) as f64 / trials as f64;
        let y = *b.get(*k).unwrap_or(&0) as f64 / trials as f64;
        let pooled = 0.5 * (x + y);
        let se = (pooled * (1.0 - pooled) * 2.0 / trials as f64).sqrt();
        worst_z = worst_z.max((x - y).abs() / se);
    }
    let ok = exact_gap <= 1e-12 && worst_z <= 3.0;
    report(
        9,
        ok,
        &format!(
            "enumeration gap {exact_gap:.1e} at n <= 3; largest two-sample z {worst_z:.2} over {} outcome classes at n = 8",
            keys.len()
        ),
    );
    assert!(ok);
}

fn run_cli(args: &[&str], out: &Path) {
    let status = Command::new(env!("CARGO_BIN_EXE_qot"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .output()
        .unwrap();
    assert!(status.status.success(), "{args:?}: {}", String::from_utf8_lossy(&status.stderr));
}

fn dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

#[test]
fn criterion_10_artifacts_are_reproducible() {
    let invocations: [&[&str]; 6] = [
        &["simulate", "--protocol", "qot", "--n", "16", "--N", "6", "--r", "3", "--m", "2", "--noise", "0.02", "--trials", "300", "--seed", "7"],
        &["simulate", "--protocol", "qkd", "--n", "24", "--N", "4", "--m", "2", "--trials", "50", "--seed", "3", "--eve", "intercept-resend"],
        &["density-check", "--code", "random", "--N", "5", "--rows", "2", "--codes", "4", "--seed", "5"],
        &["attack", "--n", "8", "--N", "2", "--m", "1", "--code", "yao", "--delta", "0.125", "--strategy", "random-ok", "--trials", "2000"],
        &["attack", "--analysis", "store-sweep", "--n", "64", "--m", "1", "--trials", "500", "--seed", "9"],
        &["code-stats", "--N", "12", "--rows", "5", "--trials", "50", "--seed", "4"],
    ];
    let tmp = tempfile::tempdir().unwrap();
    let mut ok = true;
    let mut files = 0usize;
    for (i, args) in invocations.iter().enumerate() {
        let a = tmp.path().join(format!("{i}a"));
        let b = tmp.path().join(format!("{i}b"));
        run_cli(args, &a);
        run_cli(args, &b);
        let (x, y) = (dir_bytes(&a), dir_bytes(&b));
        files += x.len();
        ok &= !x.is_empty() && x == y;
    }
    report(10, ok, &format!("{} invocations, {files} artifacts compared byte for byte", invocations.len()));
    assert!(ok);
}
