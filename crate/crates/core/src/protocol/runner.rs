use rand::Rng;

use crate::attacks::{apply_strategy, intercept_resend, AttackStrategy};
use crate::error::{ensure_len, Error, Result};
use crate::gf2::{BitVec, PositionSet};
use crate::protocol::steps::{
    alice_announce_correction, alice_setup, alice_test, bob_decode, choose_test_set, partition_and_choose_sets,
    Commitments,
};
use crate::protocol::transcript::{AbortReason, ProtocolKind, Transcript};
use crate::protocol::{transmit, ProtocolParams};
use crate::rng::run_stream;

/// Named RNG streams, one per protocol step, so that two protocol variants
/// driven by the same seed share every draw they have in common.
#[derive(Clone, Copy, Debug)]
#[repr(u8)]
pub enum Step {
    Setup = 0,
    Channel = 1,
    Receiver = 2,
    Measure = 3,
    TestSet = 4,
    Sets = 5,
    Choice = 6,
    Secret = 7,
    Eve = 8,
    Deferred = 9,
}

fn stream(params: &ProtocolParams, run: u64, step: Step) -> crate::rng::Rng {
    run_stream(params.seed, run, step as u8)
}

/// Secret drawn for run `run` when the caller does not fix one.
pub fn random_secret(params: &ProtocolParams, run: u64) -> BitVec {
    BitVec::random(params.m, &mut stream(params, run, Step::Secret))
}

/// One String-QOT execution for input `b`. Invalid parameters and
/// strategy/mode mismatches are errors; everything else ends in the transcript.
pub fn run_string_qot(params: &ProtocolParams, b: &BitVec, bob: &AttackStrategy, run: u64) -> Result<Transcript> {
    execute(params, b, bob, None, ProtocolKind::Qot, run)
}

/// One QKD execution: Alice's secret is drawn from the run's stream, the
/// receiver is honest and `eve` (if any) sits on the channel.
pub fn run_qkd(params: &ProtocolParams, eve: Option<&AttackStrategy>, run: u64) -> Result<Transcript> {
    let b = random_secret(params, run);
    execute(params, &b, &AttackStrategy::Honest, eve, ProtocolKind::Qkd, run)
}

fn execute(
    params: &ProtocolParams,
    b: &BitVec,
    bob: &AttackStrategy,
    eve: Option<&AttackStrategy>,
    kind: ProtocolKind,
    run: u64,
) -> Result<Transcript> {
    params.validate()?;
    ensure_len("secret", params.m, b.len())?;
    bob.check_mode(params.mode)?;
    let n = params.n;
    let big_n = params.big_n();

    let (code, w, theta) = alice_setup(params, &mut stream(params, run, Step::Setup))?;

    let (dispatched_w, dispatched_theta) = match eve {
        None | Some(AttackStrategy::Honest) => (w.clone(), theta.clone()),
        Some(AttackStrategy::InterceptResend) => intercept_resend(&w, &theta, params.mode, &mut stream(params, run, Step::Eve))?,
        Some(other) => {
            return Err(Error::domain(format!("{} cannot act as an eavesdropper", other.label())));
        }
    };
    let reception = transmit(
        &dispatched_w,
        &dispatched_theta,
        params.channel(),
        params.mode,
        &mut stream(params, run, Step::Channel),
    )?;
    let mut state = apply_strategy(
        bob,
        &reception,
        &mut stream(params, run, Step::Receiver),
        &mut stream(params, run, Step::Measure),
    )?;
    let mut commits = Commitments::commit(&state.theta_hat, &state.w_hat);

    let r_set = choose_test_set(n, &mut stream(params, run, Step::TestSet));
    let test = alice_test(&w, &theta, &mut commits, &r_set, params.max_test_errors())?;

    let mut t = Transcript {
        protocol: kind,
        seed: params.seed,
        run,
        n,
        big_n,
        max_test_errors: params.max_test_errors(),
        mode: params.mode,
        channel: params.channel(),
        strategy: bob.clone(),
        eve: eve.cloned(),
        code,
        b: b.clone(),
        w,
        theta,
        dispatched_w,
        dispatched_theta,
        theta_hat_commits: commits.theta_hat_ids.clone(),
        w_hat_commits: commits.w_hat_ids.clone(),
        theta_hat: state.theta_hat.clone(),
        w_hat: state.w_hat.clone(),
        bob_frames: state.frames.clone(),
        stored: state.stored.clone(),
        ok: state.ok,
        r_set,
        test_errors: test.test_errors,
        pass: test.pass,
        test,
        bob_final: None,
        t0: None,
        t1: None,
        sets: None,
        announced: Vec::new(),
        c: None,
        e_c: None,
        s: None,
        a: None,
        w_outside: None,
        decoded: None,
        b_hat: None,
        abort: None,
    };
    if !t.pass {
        t.abort = Some(AbortReason::TestFailed);
        return Ok(t);
    }

    // Alice announces theta; stored photons are measured now.
    state.finish(&t.theta, &mut stream(params, run, Step::Deferred))?;
    t.bob_final = Some(state.outcomes.clone());

    let exclude = if bob.avoids_stored_in_sets() {
        state.stored.clone()
    } else {
        PositionSet::empty(n)
    };
    let both = kind == ProtocolKind::Qot;
    let part = partition_and_choose_sets(
        &t.theta,
        &state.theta_hat,
        &t.r_set,
        big_n,
        &exclude,
        both,
        &mut stream(params, run, Step::Sets),
    )?;
    t.t0 = Some(part.t0);
    t.t1 = Some(part.t1);
    let Some(sets) = part.sets else {
        t.abort = Some(AbortReason::SetShortage);
        return Ok(t);
    };
    t.announced = sets.announced();

    let c = match kind {
        ProtocolKind::Qkd => 0,
        ProtocolKind::Qot => match params.force_c {
            Some(c) => c,
            None => {
                // Alice picks an announced slot; c is whichever set sits there.
                let slot: bool = stream(params, run, Step::Choice).random();
                u8::from(slot ^ sets.swapped)
            }
        },
    };
    let e_c = sets.get(c).expect("both sets exist in QOT").clone();
    t.sets = Some(sets);
    let (s, a) = alice_announce_correction(b, &t.w, &e_c, &t.code.g(), &t.code.h())?;
    if params.announce_complement {
        t.w_outside = Some(t.w.restrict(&e_c.complement())?);
    }
    if c == 0 {
        let w_hat_ec = state.outcomes.restrict(&e_c)?;
        if let Some(d) = bob_decode(&w_hat_ec, &s, &t.code.g(), &a, &t.code.h())? {
            t.decoded = Some(d.corrected);
            t.b_hat = Some(d.b_hat);
        }
    }
    t.c = Some(c);
    t.e_c = Some(e_c);
    t.s = Some(s);
    t.a = Some(a);
    Ok(t)
}
