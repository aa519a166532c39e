//! Mutual information, quantum discord on Bob's side, and the
//! distinguishability-based upper bound on the discord.
//!
//! Discord is `Q = S(rho^B) - S(rho^AB) + min_n CE(n)` with the minimum over
//! rank-1 projective measurement directions on Bob. The bound replaces the
//! minimizing direction by the direction `n*` that maximizes the steered
//! trace distance:
//! `Q* = [h2(q) - h4(lambda)] + [h4(w) - h2(p)]`, where `lambda`, `q` are
//! spectra of `rho` and `rho^B`, and `w`, `p` are the outcome distributions
//! at `n*`. The second bracket equals the conditional entropy at `n*`.

use crate::optimize::{minimize_on_sphere, GRID_POINTS};
use crate::state::{
    binary_entropy, shannon_entropy, BlochState, CMat4, Mat3, StateError, Vec3, C64,
    SINGULAR_FILTER_TOL,
};
use crate::steering::{max_distance, Branch, MeasurementDirection, SteerError};
use nalgebra::Vector3;
use thiserror::Error;

/// Structural tolerance of the zero-discord detector.
pub const ZERO_DISCORD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CorrelationError {
    #[error("Bob marginal is pure or nearly pure (|y| = {y_norm}); measurement optimization undefined")]
    PureBobMarginal { y_norm: f64 },
    #[error("measurement outcome has probability {probability:.3e}")]
    DegenerateOutcome { probability: f64 },
    #[error("parameters (a, b) = ({a}, {b}) outside the state family domain")]
    OutOfDomain { a: f64, b: f64 },
    #[error("closed form is indeterminate at these parameters")]
    Indeterminate,
    #[error(transparent)]
    State(#[from] StateError),
}

impl From<SteerError> for CorrelationError {
    fn from(e: SteerError) -> Self {
        match e {
            SteerError::PureBobMarginal { y_norm } => CorrelationError::PureBobMarginal { y_norm },
            SteerError::DegenerateOutcome { probability } => {
                CorrelationError::DegenerateOutcome { probability }
            }
            // Remaining steering errors cannot surface through this module.
            _ => CorrelationError::Indeterminate,
        }
    }
}

fn marginal_entropy(bloch: &Vec3) -> f64 {
    let r = bloch.norm().min(1.0);
    binary_entropy((1.0 + r) / 2.0)
}

/// Eigenvalues of the assembled state, clamped into `[0, 1]`. Callers must
/// hand in physical states; near-boundary rounding is absorbed here.
fn spectrum(s: &BlochState) -> [f64; 4] {
    let ev = s.assemble().symmetric_eigen().eigenvalues;
    let mut out = [0.0; 4];
    for (k, v) in ev.iter().enumerate() {
        out[k] = v.clamp(0.0, 1.0);
    }
    out
}

/// Total correlations `I = S(rho^A) + S(rho^B) - S(rho^AB)` in bits.
pub fn mutual_information(s: &BlochState) -> f64 {
    marginal_entropy(&s.x) + marginal_entropy(&s.y) - shannon_entropy(&spectrum(s))
}

fn conditional_entropy_raw(s: &BlochState, n: &Vec3) -> f64 {
    let mut ce = 0.0;
    for nk in [*n, -*n] {
        let p = 0.5 * (1.0 + s.y.dot(&nk));
        if p <= 0.0 {
            continue;
        }
        let r = ((s.x + s.t * nk) / (2.0 * p)).norm().min(1.0);
        ce += p * binary_entropy((1.0 + r) / 2.0);
    }
    ce
}

/// Average entropy of Alice's steered states for a measurement along `n`:
/// `sum_k p_k h2((1 + |x_tilde_k|)/2)`.
pub fn conditional_entropy(
    s: &BlochState,
    n: &MeasurementDirection,
) -> Result<f64, CorrelationError> {
    let nv = n.unit();
    for nk in [nv, -nv] {
        let p = 0.5 * (1.0 + s.y.dot(&nk));
        if p < 1e-12 {
            return Err(CorrelationError::DegenerateOutcome { probability: p });
        }
    }
    Ok(conditional_entropy_raw(s, &nv))
}

fn check_bob_marginal(s: &BlochState) -> Result<f64, CorrelationError> {
    let y_norm = s.y.norm();
    if y_norm >= 1.0 - SINGULAR_FILTER_TOL {
        return Err(CorrelationError::PureBobMarginal { y_norm });
    }
    Ok(y_norm)
}

fn discord_inner(s: &BlochState, extra_seed: Option<Vec3>) -> (f64, MeasurementDirection) {
    let base = marginal_entropy(&s.y) - shannon_entropy(&spectrum(s));
    let f = |n: &Vec3| conditional_entropy_raw(s, n);
    let mut seeds = vec![Vec3::x(), Vec3::y(), Vec3::z()];
    if let Some(n) = extra_seed {
        seeds.push(n);
    }
    let (n_opt, ce_min) = minimize_on_sphere(&f, GRID_POINTS, &seeds);
    (
        base + ce_min,
        MeasurementDirection::from_unit(n_opt).canonical(),
    )
}

/// Quantum discord at Bob's side and the minimizing measurement direction.
///
/// The optimization runs the same grid-plus-refine protocol as the distance
/// maximization and additionally refines from the maximum-distance
/// direction, so the returned value never exceeds [`q_star`].
pub fn discord(s: &BlochState) -> Result<(f64, MeasurementDirection), CorrelationError> {
    check_bob_marginal(s)?;
    let seed = max_distance(s)?.n_star.unit();
    Ok(discord_inner(s, Some(seed)))
}

fn q_star_at(s: &BlochState, n_star: &Vec3) -> f64 {
    let y_norm = s.y.norm().min(1.0);
    let q = [(1.0 + y_norm) / 2.0, (1.0 - y_norm) / 2.0];
    let lambda = spectrum(s);
    let yn = s.y.dot(n_star);
    let p = [(1.0 + yn) / 2.0, (1.0 - yn) / 2.0];
    let mut w = [0.0; 4];
    for k in 0..2 {
        let sign_k = if k == 0 { 1.0 } else { -1.0 };
        let reach = (s.x + s.t * (*n_star * sign_k)).norm();
        for l in 0..2 {
            let sign_l = if l == 0 { 1.0 } else { -1.0 };
            w[2 * k + l] = (0.25 * (1.0 + sign_k * yn + sign_l * reach)).clamp(0.0, 1.0);
        }
    }
    (shannon_entropy(&q) - shannon_entropy(&lambda))
        + (shannon_entropy(&w) - shannon_entropy(&p))
}

/// Upper bound on the discord evaluated at the maximum-distinguishability
/// direction, together with that direction.
pub fn q_star(s: &BlochState) -> Result<(f64, MeasurementDirection), CorrelationError> {
    check_bob_marginal(s)?;
    let opt = max_distance(s)?;
    Ok((q_star_at(s, &opt.n_star.unit()), opt.n_star))
}

/// Zero-discord test on Bob's side: `T = 0`, or `rank(T) = 1` with `y` in
/// the range of `T`.
pub fn is_zero_discord(s: &BlochState) -> bool {
    let svd = s.t.svd(true, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().cloned().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    if sv[0] <= ZERO_DISCORD_TOL {
        return true;
    }
    if sv[1] > ZERO_DISCORD_TOL {
        return false;
    }
    let u = svd.u.expect("3x3 svd with u requested");
    let mut top = 0;
    for i in 1..3 {
        if svd.singular_values[i] > svd.singular_values[top] {
            top = i;
        }
    }
    let u1 = u.column(top).into_owned();
    (s.y - u1 * u1.dot(&s.y)).norm() <= ZERO_DISCORD_TOL
}

/// Everything the comparison experiments need for one state.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub mutual_info: f64,
    pub classical_corr: f64,
    pub discord: f64,
    pub q_star: f64,
    pub n_discord: MeasurementDirection,
    pub n_star: MeasurementDirection,
    pub branch: Branch,
}

/// Compute mutual information, discord, and the upper bound in one pass,
/// sharing a single distance maximization.
pub fn correlation_report(s: &BlochState) -> Result<CorrelationReport, CorrelationError> {
    check_bob_marginal(s)?;
    let opt = max_distance(s)?;
    let n_star_vec = opt.n_star.unit();
    let (q, n_discord) = discord_inner(s, Some(n_star_vec));
    let qs = q_star_at(s, &n_star_vec);
    let mi = mutual_information(s);
    Ok(CorrelationReport {
        mutual_info: mi,
        classical_corr: mi - q,
        discord: q,
        q_star: qs,
        n_discord,
        n_star: opt.n_star.canonical(),
        branch: opt.branch,
    })
}

/// The two-parameter X-state family
/// `rho = 1/2 diag-blocks [[a, a], [1-a-b], [1-a+b], [a, a]]` with
/// `0 <= a <= 1`, `a - 1 <= b <= 1 - a`. Its Bloch data is
/// `x = -y = (0, 0, -b)`, `T = diag(a, -a, 2a - 1)`.
pub fn two_param_state(a: f64, b: f64) -> Result<BlochState, CorrelationError> {
    if !(0.0..=1.0).contains(&a) || b < a - 1.0 || b > 1.0 - a {
        return Err(CorrelationError::OutOfDomain { a, b });
    }
    let z = C64::new(0.0, 0.0);
    let c = |v: f64| C64::new(0.5 * v, 0.0);
    #[rustfmt::skip]
    let m = CMat4::new(
        c(a), z, z, c(a),
        z, c(1.0 - a - b), z, z,
        z, z, c(1.0 - a + b), z,
        c(a), z, z, c(a),
    );
    let dm = crate::state::DensityMatrix4::new(m)?;
    Ok(crate::state::from_density_matrix(&dm))
}

fn xlg(v: f64) -> f64 {
    if v > 0.0 {
        v * v.log2()
    } else {
        // Each log below carries its own vanishing prefactor; the 0.log(0)
        // limits are zero.
        0.0
    }
}

/// Closed-form discord `min{a, q}` of [`two_param_state`]. The `a` branch is
/// reached by measuring along `x`, the `q` branch along `z`. Evaluated in a
/// per-factor `x log x` regrouping so the boundary limits are finite.
pub fn two_param_discord_closed_form(a: f64, b: f64) -> Result<f64, CorrelationError> {
    if !(0.0..=1.0).contains(&a) || b < a - 1.0 || b > 1.0 - a {
        return Err(CorrelationError::OutOfDomain { a, b });
    }
    let u = 1.0 - a - b;
    let v = 1.0 - a + b;
    let s = (a * a + b * b).sqrt();
    let q = 1.0 + a + xlg(a) + 0.5 * (xlg(u) + xlg(v))
        - 0.5 * (xlg(1.0 - b) + xlg(1.0 + b))
        - 0.5 * (xlg(1.0 - s) + xlg(1.0 + s));
    if !q.is_finite() {
        return Err(CorrelationError::Indeterminate);
    }
    Ok(a.min(q))
}

/// Bloch state of a Bell-diagonal correlation triple; used by experiments
/// and tests.
pub fn bell_diagonal(t1: f64, t2: f64, t3: f64) -> BlochState {
    BlochState::new(
        Vec3::zeros(),
        Vec3::zeros(),
        Mat3::from_diagonal(&Vector3::new(t1, t2, t3)),
    )
}
