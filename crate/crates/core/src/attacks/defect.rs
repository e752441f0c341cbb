use crate::error::{ensure_len, Error, Result};
use crate::gf2::PositionSet;
use crate::protocol::{Mode, Transcript};
use crate::quantum::{ball_projector, small_distance_defect, PhotonFrame, Side, StateVector};

/// Photon count above which view vectors are not built.
pub const VIEW_QUBIT_CAP: usize = 12;

/// The receiver's photon-part vector after the run: every photon collapsed
/// to its final outcome in the frame it was actually measured in.
pub fn view_vector(t: &Transcript) -> Result<StateVector<f64>> {
    if t.mode != Mode::ExactQuantum {
        return Err(Error::Mode("view vectors need an exact_quantum run".into()));
    }
    if t.n > VIEW_QUBIT_CAP {
        return Err(Error::Resource {
            what: "view vector photons",
            requested: t.n,
            limit: VIEW_QUBIT_CAP,
        });
    }
    let outcomes = t
        .bob_final
        .as_ref()
        .ok_or_else(|| Error::domain("run aborted before the receiver's view was complete"))?;
    let frames: Vec<PhotonFrame> = (0..t.n)
        .map(|i| t.bob_frames[i].unwrap_or(PhotonFrame::Basis(t.theta.get(i))))
        .collect();
    StateVector::in_frames(outcomes, &frames)
}

/// `||P_0[E, t] phi_v||^2 / ||phi_v||^2`, with the ball centred at the
/// committed bits in the committed bases.
pub fn view_small_distance_defect(t: &Transcript, e: &PositionSet, radius: usize) -> Result<f64> {
    ensure_len("defect positions", t.n, e.universe())?;
    let phi = view_vector(t)?;
    let p0 = ball_projector(e, &t.w_hat, radius, &t.theta_hat, Side::High)?;
    Ok(small_distance_defect(&phi, &p0)? / phi.norm_sqr())
}
