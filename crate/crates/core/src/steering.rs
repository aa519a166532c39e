//! Steered states, the steering ellipsoid, and maximization of the squared
//! trace distance between the two post-measurement states.
//!
//! For a projective measurement along the unit vector `n` on Bob's qubit the
//! two steered Alice states are separated by
//! `D^2 = 4 n^t M n / (1 - n^t Y n)^2` with `Y = y y^t` and `M = m^t m`,
//! `m = T - x y^t`. The maximum over `n` is found analytically for canonical
//! states, for states whose `y` is a top eigenvector of `M`, and for X
//! states; everything else goes through a numeric search. Analytic results
//! from the non-exact families are cross-checked against the numeric
//! optimizer and demoted to it on disagreement.

use crate::optimize::{
    canonical_sign, compass_refine, maximize_on_sphere, tangent_frame, GRID_POINTS,
};
use crate::state::{BlochState, Mat3, Vec3, SINGULAR_FILTER_TOL};
use thiserror::Error;

/// States with `|y|` below this are canonical.
pub const CANONICAL_TOL: f64 = 1e-10;
/// Structural tolerance for X-state detection (components off the z-axis,
/// off-diagonal correlation entries).
pub const STRUCTURAL_TOL: f64 = 1e-10;
/// Angular tolerance for the `y`-top-eigenvector test.
pub const ANGULAR_TOL: f64 = 1e-9;
/// Analytic branch values may not fall below the numeric optimum by more
/// than this before the branch is demoted to `Numeric`.
pub const GUARD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SteerError {
    #[error("measurement outcome has probability {probability:.3e}; steering undefined")]
    DegenerateOutcome { probability: f64 },
    #[error("Bob marginal is pure or nearly pure (|y| = {y_norm}); distance diverges")]
    PureBobMarginal { y_norm: f64 },
    #[error("state is not canonical (|y| = {y_norm}); apply the filtering transformation first")]
    NotCanonical { y_norm: f64 },
    #[error("direction vector has vanishing norm")]
    InvalidDirection,
}

/// Unit vector on the Bloch sphere along which Bob measures,
/// `n(theta, phi) = (sin t cos p, sin t sin p, cos t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementDirection(Vec3);

impl MeasurementDirection {
    pub fn new(v: Vec3) -> Result<Self, SteerError> {
        let n = v.norm();
        if n < 1e-14 {
            return Err(SteerError::InvalidDirection);
        }
        Ok(Self(v / n))
    }

    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self(Vec3::new(
            theta.sin() * phi.cos(),
            theta.sin() * phi.sin(),
            theta.cos(),
        ))
    }

    pub(crate) fn from_unit(v: Vec3) -> Self {
        debug_assert!((v.norm() - 1.0).abs() < 1e-9);
        Self(v)
    }

    pub fn unit(&self) -> Vec3 {
        self.0
    }

    pub fn theta(&self) -> f64 {
        self.0.z.clamp(-1.0, 1.0).acos()
    }

    pub fn phi(&self) -> f64 {
        let p = self.0.y.atan2(self.0.x);
        if p < 0.0 {
            p + 2.0 * std::f64::consts::PI
        } else {
            p
        }
    }

    /// `n` and `-n` give the same measurement; this returns the
    /// representative with `n_3 >= 0` (ties broken by `n_1 >= 0`).
    pub fn canonical(&self) -> Self {
        Self(canonical_sign(self.0))
    }

    /// Angle to another direction under the `n ~ -n` identification.
    pub fn axis_angle_to(&self, other: &Self) -> f64 {
        self.0.dot(&other.0).abs().clamp(0.0, 1.0).acos()
    }
}

/// The two steered Alice states for one projective measurement on Bob:
/// outcome `k` has Bloch vector `x_tilde[k]` and probability `p[k]`,
/// with `x_tilde_k = (x + T n_k)/(1 + y.n_k)`, `p_k = (1 + y.n_k)/2`,
/// `n_0 = n`, `n_1 = -n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeredPair {
    pub x_tilde: [Vec3; 2],
    pub p: [f64; 2],
}

impl SteeredPair {
    /// Squared Euclidean distance between the two steered Bloch vectors.
    pub fn distance_squared(&self) -> f64 {
        (self.x_tilde[0] - self.x_tilde[1]).norm_squared()
    }
}

/// Post-measurement steering of Alice's qubit by a measurement along `n`.
pub fn steer(s: &BlochState, n: &MeasurementDirection) -> Result<SteeredPair, SteerError> {
    let nv = n.unit();
    let mut x_tilde = [Vec3::zeros(); 2];
    let mut p = [0.0; 2];
    for (k, nk) in [nv, -nv].into_iter().enumerate() {
        let pk = 0.5 * (1.0 + s.y.dot(&nk));
        if pk < 1e-12 {
            return Err(SteerError::DegenerateOutcome { probability: pk });
        }
        x_tilde[k] = (s.x + s.t * nk) / (2.0 * pk);
        p[k] = pk;
    }
    Ok(SteeredPair { x_tilde, p })
}

/// The pair `(M, Y)` entering the squared-distance form.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceKernel {
    /// `M = m^t m` with `m = T - x y^t`; symmetric positive semidefinite.
    pub m: Mat3,
    /// `Y = y y^t`; rank at most one, trace `|y|^2`.
    pub y: Mat3,
    y_vec: Vec3,
}

impl DistanceKernel {
    pub fn from_state(s: &BlochState) -> Self {
        let small_m = s.t - s.x * s.y.transpose();
        Self {
            m: small_m.transpose() * small_m,
            y: s.y * s.y.transpose(),
            y_vec: s.y,
        }
    }

    pub fn y_vector(&self) -> Vec3 {
        self.y_vec
    }
}

fn quad(m: &Mat3, n: &Vec3) -> f64 {
    n.dot(&(m * n))
}

pub(crate) fn d_squared_raw(k: &DistanceKernel, n: &Vec3) -> f64 {
    let den = 1.0 - quad(&k.y, n);
    4.0 * quad(&k.m, n) / (den * den)
}

/// Squared distance of the steered pair for a measurement along `n`:
/// `4 n^t M n / (1 - n^t Y n)^2`.
pub fn d_squared(k: &DistanceKernel, n: &MeasurementDirection) -> Result<f64, SteerError> {
    let nv = n.unit();
    let den = 1.0 - quad(&k.y, &nv);
    if den <= 1e-12 {
        return Err(SteerError::PureBobMarginal {
            y_norm: k.y_vec.norm(),
        });
    }
    Ok(4.0 * quad(&k.m, &nv) / (den * den))
}

/// The direction-dependent symmetric matrix of the stationary condition,
/// `M + [2 n^t M n / (1 - n^t Y n)] Y`.
pub fn stationary_matrix(k: &DistanceKernel, n: &Vec3) -> Mat3 {
    let den = 1.0 - quad(&k.y, n);
    k.m + k.y * (2.0 * quad(&k.m, n) / den)
}

pub(crate) fn stationary_residual_raw(k: &DistanceKernel, n: &Vec3) -> f64 {
    let sm = stationary_matrix(k, n);
    let w = sm * n;
    (w - n * n.dot(&w)).norm()
}

/// Norm of the component of `script-M(n) n` orthogonal to `n`; zero exactly
/// at the stationary points of the squared distance.
pub fn stationary_residual(k: &DistanceKernel, n: &MeasurementDirection) -> f64 {
    stationary_residual_raw(k, &n.unit())
}

/// Alice's steering ellipsoid of a canonical state: center `x`, semiaxes the
/// singular values of `T`, axes the left singular vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Ellipsoid {
    pub center: Vec3,
    /// Descending.
    pub semiaxes: Vec3,
    /// Columns are the unit axis directions, ordered like `semiaxes`.
    pub axes: Mat3,
}

pub fn canonical_ellipsoid(s: &BlochState) -> Result<Ellipsoid, SteerError> {
    let y_norm = s.y.norm();
    if y_norm > CANONICAL_TOL {
        return Err(SteerError::NotCanonical { y_norm });
    }
    let svd = s.t.svd(true, true);
    let u = svd.u.expect("3x3 svd with u requested");
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].partial_cmp(&svd.singular_values[a]).unwrap());
    let mut semiaxes = Vec3::zeros();
    let mut axes = Mat3::zeros();
    for (slot, &idx) in order.iter().enumerate() {
        semiaxes[slot] = svd.singular_values[idx];
        let mut col = u.column(idx).into_owned();
        // Deterministic sign: largest-magnitude component nonnegative.
        let lead = (0..3).max_by(|&a, &b| col[a].abs().partial_cmp(&col[b].abs()).unwrap());
        if let Some(l) = lead {
            if col[l] < 0.0 {
                col = -col;
            }
        }
        axes.set_column(slot, &col);
    }
    Ok(Ellipsoid {
        center: s.x,
        semiaxes,
        axes,
    })
}

/// Which route produced a maximum-distance result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Canonical,
    YEigvec,
    XStateSigmaZ,
    XStateSigmaX,
    XStateInterior,
    Numeric,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Branch::Canonical => "Canonical",
            Branch::YEigvec => "YEigvec",
            Branch::XStateSigmaZ => "XStateSigmaZ",
            Branch::XStateSigmaX => "XStateSigmaX",
            Branch::XStateInterior => "XStateInterior",
            Branch::Numeric => "Numeric",
        };
        f.write_str(name)
    }
}

/// Maximum of the squared steered-state distance with the direction that
/// attains it and the branch that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub n_star: MeasurementDirection,
    pub value: f64,
    pub branch: Branch,
}

fn is_y_top_eigvec(k: &DistanceKernel, y: &Vec3) -> bool {
    let y_norm = y.norm();
    if y_norm <= CANONICAL_TOL {
        return false;
    }
    let yhat = y / y_norm;
    let eig = k.m.symmetric_eigen();
    let lam_max = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lam_y = quad(&k.m, &yhat);
    let resid = (k.m * yhat - yhat * lam_y).norm();
    let scale = lam_max.max(1e-30);
    resid <= ANGULAR_TOL * scale && (lam_max - lam_y) <= ANGULAR_TOL * scale
}

fn is_x_state(s: &BlochState) -> bool {
    let off_axis = s.x.x.abs().max(s.x.y.abs()).max(s.y.x.abs()).max(s.y.y.abs());
    if off_axis > STRUCTURAL_TOL {
        return false;
    }
    for i in 0..3 {
        for j in 0..3 {
            if i != j && s.t[(i, j)].abs() > STRUCTURAL_TOL {
                return false;
            }
        }
    }
    true
}

/// Regime split for X states with `M1 >= M2` already enforced by an axis
/// swap. `y2` is the squared Bob coherence.
fn x_state_regime(m1: f64, m3: f64, y2: f64) -> Branch {
    if m1 <= m3 {
        return Branch::XStateSigmaZ;
    }
    let lower = (m1 - m3) / (2.0 * m1);
    let upper = (m1 - m3) / (m1 + m3);
    let branch = if y2 < lower {
        Branch::XStateSigmaX
    } else if y2 <= upper {
        Branch::XStateInterior
    } else {
        Branch::XStateSigmaZ
    };
    // Cross-check: the equivalent squared form of the interior window must
    // agree away from the regime boundaries.
    if cfg!(debug_assertions) {
        let margin = 1e-12;
        if (y2 - lower).abs() > margin && (y2 - upper).abs() > margin {
            let one_my2 = (1.0 - y2) * (1.0 - y2);
            let lo2 = (2.0 * m3 / (m1 + m3)).powi(2);
            let hi2 = ((m1 + m3) / (2.0 * m1)).powi(2);
            let first = (lower..=upper).contains(&y2);
            let second = one_my2 >= lo2 - 1e-15 && one_my2 <= hi2 + 1e-15;
            debug_assert_eq!(first, second, "interior-window forms disagree");
        }
    }
    branch
}

struct XStateSolution {
    branch: Branch,
    direction: Vec3,
}

fn x_state_solution(s: &BlochState) -> XStateSolution {
    let (t1, t2, t3) = (s.t[(0, 0)], s.t[(1, 1)], s.t[(2, 2)]);
    let (x3, y3) = (s.x.z, s.y.z);
    // Convention |t1| >= |t2|: otherwise relabel the transverse axes.
    let swap = t1.abs() < t2.abs();
    let m1 = if swap { t2 * t2 } else { t1 * t1 };
    let m3 = (t3 - x3 * y3) * (t3 - x3 * y3);
    let y2 = y3 * y3;
    let branch = x_state_regime(m1, m3, y2);
    let local = match branch {
        Branch::XStateSigmaZ => Vec3::z(),
        Branch::XStateSigmaX => Vec3::x(),
        Branch::XStateInterior => {
            let w = ((2.0 * m1 * y2 - (m1 - m3)) / ((m1 - m3) * y2)).clamp(0.0, 1.0);
            Vec3::new((1.0 - w).sqrt(), 0.0, w.sqrt())
        }
        _ => unreachable!(),
    };
    let direction = if swap {
        Vec3::new(local.y, local.x, local.z)
    } else {
        local
    };
    XStateSolution { branch, direction }
}

/// Decide which route [`max_distance`] will take. Precedence:
/// Canonical > YEigvec > X state > Numeric.
pub fn classify_branch(s: &BlochState) -> Branch {
    if s.y.norm() <= CANONICAL_TOL {
        return Branch::Canonical;
    }
    let k = DistanceKernel::from_state(s);
    if is_y_top_eigvec(&k, &s.y) {
        return Branch::YEigvec;
    }
    if is_x_state(s) {
        return x_state_solution(s).branch;
    }
    Branch::Numeric
}

/// Right singular direction of `T` for its largest singular value, with a
/// deterministic pick among degenerate directions.
fn top_right_singular_direction(t: &Mat3) -> Vec3 {
    let svd = t.svd(true, true);
    let vt = svd.v_t.expect("3x3 svd with v_t requested");
    let smax = svd
        .singular_values
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let mut best: Option<Vec3> = None;
    for i in 0..3 {
        if svd.singular_values[i] >= smax - 1e-12 * smax.max(1.0) {
            let cand = vt.row(i).transpose();
            let key = |v: &Vec3| (v.z.abs(), v.y.abs(), v.x.abs());
            if best.as_ref().is_none_or(|b| key(&cand) < key(b)) {
                best = Some(cand);
            }
        }
    }
    best.unwrap().normalize()
}

/// Best of an inclusive `(theta, phi)` product grid; returns the grid point
/// and its value.
fn theta_phi_grid_max<F: Fn(&Vec3) -> f64>(f: &F, n_theta: usize, n_phi: usize) -> (Vec3, f64) {
    let mut best = (Vec3::z(), f(&Vec3::z()));
    for i in 0..n_theta {
        let theta = std::f64::consts::PI * i as f64 / n_theta as f64;
        let (st, ct) = theta.sin_cos();
        for j in 0..n_phi {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / n_phi as f64;
            let n = Vec3::new(st * phi.cos(), st * phi.sin(), ct);
            let v = f(&n);
            if v > best.1 {
                best = (n, v);
            }
        }
    }
    best
}

/// Drive a near-optimal direction onto the stationary manifold. First a
/// guarded eigenvector fixed point of the stationary matrix, then a damped
/// 2-d Newton solve of the tangential residual in a local chart.
fn polish_stationary(k: &DistanceKernel, n0: Vec3) -> Vec3 {
    let f = |n: &Vec3| d_squared_raw(k, n);
    let mut best_n = n0.normalize();
    let mut best_f = f(&best_n);
    let mut best_r = stationary_residual_raw(k, &best_n);

    for _ in 0..60 {
        if best_r < 1e-13 {
            return best_n;
        }
        let eig = stationary_matrix(k, &best_n).symmetric_eigen();
        let mut cand = best_n;
        let mut overlap = f64::NEG_INFINITY;
        for i in 0..3 {
            let v = eig.eigenvectors.column(i).into_owned().normalize();
            let d = v.dot(&best_n);
            if d.abs() > overlap {
                overlap = d.abs();
                cand = if d < 0.0 { -v } else { v };
            }
        }
        let fc = f(&cand);
        let rc = stationary_residual_raw(k, &cand);
        if rc < best_r && fc >= best_f - 1e-12 * best_f.abs().max(1.0) {
            best_n = cand;
            best_f = fc;
            best_r = rc;
        } else {
            break;
        }
    }

    if best_r <= 1e-11 {
        return best_n;
    }

    // Newton on g(a, b) = (u.w, v.w), w the tangential residual vector.
    let center = best_n;
    let (u, v) = tangent_frame(&center);
    let chart = |a: f64, b: f64| (center + u * a + v * b).normalize();
    let g = |a: f64, b: f64| {
        let n = chart(a, b);
        let sm = stationary_matrix(k, &n);
        let w = sm * n - n * quad(&sm, &n);
        (u.dot(&w), v.dot(&w))
    };
    let mut p = (0.0_f64, 0.0_f64);
    let mut g0 = g(p.0, p.1);
    let mut g0n = (g0.0 * g0.0 + g0.1 * g0.1).sqrt();
    for _ in 0..30 {
        if g0n < 1e-14 {
            break;
        }
        let h = 1e-6;
        let ga = g(p.0 + h, p.1);
        let gb = g(p.0 - h, p.1);
        let gc = g(p.0, p.1 + h);
        let gd = g(p.0, p.1 - h);
        let j = [
            [(ga.0 - gb.0) / (2.0 * h), (gc.0 - gd.0) / (2.0 * h)],
            [(ga.1 - gb.1) / (2.0 * h), (gc.1 - gd.1) / (2.0 * h)],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-300 {
            break;
        }
        let mut da = -(j[1][1] * g0.0 - j[0][1] * g0.1) / det;
        let mut db = -(-j[1][0] * g0.0 + j[0][0] * g0.1) / det;
        let norm = (da * da + db * db).sqrt();
        if norm > 0.2 {
            da *= 0.2 / norm;
            db *= 0.2 / norm;
        }
        let mut accepted = false;
        let mut scale = 1.0;
        for _ in 0..5 {
            let cand = (p.0 + scale * da, p.1 + scale * db);
            let gc2 = g(cand.0, cand.1);
            let gc2n = (gc2.0 * gc2.0 + gc2.1 * gc2.1).sqrt();
            if gc2n < g0n {
                p = cand;
                g0 = gc2;
                g0n = gc2n;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let newton_n = chart(p.0, p.1);
    let newton_f = f(&newton_n);
    let newton_r = stationary_residual_raw(k, &newton_n);
    if newton_r < best_r && newton_f >= best_f - 1e-10 * best_f.abs().max(1.0) {
        newton_n
    } else {
        best_n
    }
}

/// Full numeric protocol: Fibonacci global stage with compass refinement,
/// an independent `(theta, phi)` audit grid whose best cell is also refined,
/// then a stationarity polish of the winner. The returned value is never
/// below the best audit-grid cell.
fn maximize_d2_numeric(k: &DistanceKernel) -> (Vec3, f64) {
    let f = |n: &Vec3| d_squared_raw(k, n);
    let (n_fib, v_fib) = maximize_on_sphere(&f, GRID_POINTS, &[]);
    let (n_grid, _) = theta_phi_grid_max(&f, 256, 512);
    let (n_ref, v_ref) = compass_refine(&f, n_grid, std::f64::consts::PI / 256.0);
    let (mut best_n, mut best_v) = if v_fib >= v_ref {
        (n_fib, v_fib)
    } else {
        (n_ref, v_ref)
    };
    let polished = polish_stationary(k, best_n);
    let v_pol = f(&polished);
    if v_pol >= best_v - 1e-12 * best_v.abs().max(1.0) {
        best_n = polished;
        best_v = v_pol;
    }
    (best_n, best_v)
}

/// Maximize the steered-state squared distance over all measurement
/// directions.
pub fn max_distance(s: &BlochState) -> Result<OptimizationResult, SteerError> {
    let y_norm = s.y.norm();
    if y_norm >= 1.0 - SINGULAR_FILTER_TOL {
        return Err(SteerError::PureBobMarginal { y_norm });
    }
    let k = DistanceKernel::from_state(s);
    let f = |n: &Vec3| d_squared_raw(&k, n);

    let finish = |n: Vec3, value: f64, branch: Branch| OptimizationResult {
        n_star: MeasurementDirection::from_unit(canonical_sign(n)),
        value,
        branch,
    };

    // Degenerate kernel (T = x y^t): the steered points coincide for every
    // measurement; skip all optimization.
    if k.m.norm() <= 1e-24 {
        let n = Vec3::z();
        return Ok(finish(n, f(&n), classify_branch(s)));
    }

    let branch = classify_branch(s);
    let analytic = match branch {
        Branch::Canonical => {
            let n = top_right_singular_direction(&s.t);
            return Ok(finish(n, f(&n), Branch::Canonical));
        }
        Branch::YEigvec => {
            let n = s.y / y_norm;
            Some((n, f(&n)))
        }
        Branch::XStateSigmaZ | Branch::XStateSigmaX | Branch::XStateInterior => {
            let sol = x_state_solution(s);
            let v = f(&sol.direction);
            Some((sol.direction, v))
        }
        Branch::Numeric => None,
    };

    match analytic {
        Some((n, v)) => {
            // Guard the non-exact analytic families with the numeric search.
            let (n_num, v_num) = maximize_d2_numeric(&k);
            if v < v_num - GUARD_TOL {
                Ok(finish(n_num, v_num, Branch::Numeric))
            } else {
                Ok(finish(n, v, branch))
            }
        }
        None => {
            let (n_num, v_num) = maximize_d2_numeric(&k);
            Ok(finish(n_num, v_num, Branch::Numeric))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{from_density_matrix, BlochState, DensityMatrix4, C64, CMat4};
    use approx::assert_abs_diff_eq;

    fn bell_diag(t1: f64, t2: f64, t3: f64) -> BlochState {
        BlochState::new(
            Vec3::zeros(),
            Vec3::zeros(),
            Mat3::from_diagonal(&Vec3::new(t1, t2, t3)),
        )
    }

    fn bell_phi_plus_state() -> BlochState {
        let mut m = CMat4::zeros();
        let half = C64::new(0.5, 0.0);
        m[(0, 0)] = half;
        m[(0, 3)] = half;
        m[(3, 0)] = half;
        m[(3, 3)] = half;
        from_density_matrix(&DensityMatrix4::new(m).unwrap())
    }

    #[test]
    fn steer_canonical_example() {
        let s = BlochState::new(
            Vec3::new(0.0, 0.0, 0.2),
            Vec3::zeros(),
            Mat3::from_diagonal(&Vec3::new(0.3, 0.3, 0.3)),
        );
        let pair = steer(&s, &MeasurementDirection::from_unit(Vec3::z())).unwrap();
        assert!((pair.x_tilde[0] - Vec3::new(0.0, 0.0, 0.5)).norm() < 1e-12);
        assert!((pair.x_tilde[1] - Vec3::new(0.0, 0.0, -0.1)).norm() < 1e-12);
        assert_abs_diff_eq!(pair.p[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(pair.p[1], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn steer_product_state_is_constant() {
        // T = x y^t makes both steered points equal to x.
        let x = Vec3::new(0.1, -0.2, 0.3);
        let y = Vec3::new(0.4, 0.0, -0.2);
        let s = BlochState::new(x, y, x * y.transpose());
        for n in [Vec3::x(), Vec3::y(), Vec3::new(1.0, 2.0, -1.0).normalize()] {
            let pair = steer(&s, &MeasurementDirection::from_unit(n)).unwrap();
            assert!((pair.x_tilde[0] - x).norm() < 1e-12);
            assert!((pair.x_tilde[1] - x).norm() < 1e-12);
        }
    }

    #[test]
    fn steer_bell_state_gives_antipodal_pure_points() {
        let s = bell_phi_plus_state();
        let pair = steer(&s, &MeasurementDirection::from_unit(Vec3::z())).unwrap();
        assert!((pair.x_tilde[0] - Vec3::new(0.0, 0.0, 1.0)).norm() < 1e-12);
        assert!((pair.x_tilde[1] - Vec3::new(0.0, 0.0, -1.0)).norm() < 1e-12);
        assert_abs_diff_eq!(pair.p[0], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn steer_rejects_degenerate_outcome() {
        let s = BlochState::new(Vec3::zeros(), Vec3::new(0.0, 0.0, 1.0), Mat3::zeros());
        assert!(matches!(
            steer(&s, &MeasurementDirection::from_unit(Vec3::z())),
            Err(SteerError::DegenerateOutcome { .. })
        ));
    }

    #[test]
    fn d_squared_matches_fig1_value_at_y_axis() {
        let k = DistanceKernel::from_state(&bell_diag(-0.5, 0.7, 0.5));
        let v = d_squared(&k, &MeasurementDirection::from_unit(Vec3::y())).unwrap();
        assert_abs_diff_eq!(v, 1.96, epsilon = 1e-12);
    }

    #[test]
    fn d_squared_t_zero_closed_form() {
        // T = 0: D^2(n) = 4 x^2 (y.n)^2 / (1 - (y.n)^2)^2 at n = z.
        let (x3, y3) = (0.4, 0.6);
        let s = BlochState::new(
            Vec3::new(0.0, 0.0, x3),
            Vec3::new(0.0, 0.0, y3),
            Mat3::zeros(),
        );
        let k = DistanceKernel::from_state(&s);
        let v = d_squared(&k, &MeasurementDirection::from_unit(Vec3::z())).unwrap();
        let expect = 4.0 * x3 * x3 * y3 * y3 / (1.0 - y3 * y3).powi(2);
        assert_abs_diff_eq!(v, expect, epsilon = 1e-12);
    }

    #[test]
    fn d_squared_product_state_vanishes() {
        let x = Vec3::new(0.1, -0.2, 0.3);
        let y = Vec3::new(0.4, 0.0, -0.2);
        let k = DistanceKernel::from_state(&BlochState::new(x, y, x * y.transpose()));
        for n in [Vec3::x(), Vec3::new(0.0, 0.6, 0.8)] {
            let v = d_squared(&k, &MeasurementDirection::from_unit(n)).unwrap();
            assert!(v.abs() < 1e-24);
        }
    }

    #[test]
    fn ellipsoid_of_bell_diagonal() {
        let e = canonical_ellipsoid(&bell_diag(-0.5, 0.7, 0.5)).unwrap();
        assert!(e.center.norm() < 1e-15);
        assert!((e.semiaxes - Vec3::new(0.7, 0.5, 0.5)).norm() < 1e-12);
    }

    #[test]
    fn ellipsoid_of_bell_state_is_the_sphere() {
        let e = canonical_ellipsoid(&bell_phi_plus_state()).unwrap();
        assert!((e.semiaxes - Vec3::new(1.0, 1.0, 1.0)).norm() < 1e-10);
    }

    #[test]
    fn ellipsoid_point_case() {
        let s = BlochState::new(Vec3::new(0.3, 0.0, 0.0), Vec3::zeros(), Mat3::zeros());
        let e = canonical_ellipsoid(&s).unwrap();
        assert!((e.center - Vec3::new(0.3, 0.0, 0.0)).norm() < 1e-15);
        assert!(e.semiaxes.norm() < 1e-15);
    }

    #[test]
    fn ellipsoid_requires_canonical_input() {
        let s = BlochState::new(Vec3::zeros(), Vec3::new(0.0, 0.0, 0.3), Mat3::zeros());
        assert!(matches!(
            canonical_ellipsoid(&s),
            Err(SteerError::NotCanonical { .. })
        ));
    }

    #[test]
    fn classify_bell_diagonal_is_canonical() {
        assert_eq!(classify_branch(&bell_diag(-0.5, 0.7, 0.5)), Branch::Canonical);
    }

    #[test]
    fn classify_y_top_eigvec_family() {
        // x = x3 z, y = y1 x, T = diag(t1, t2, 0) with t1^2 + x3^2 y1^2 >= t2^2.
        let s = BlochState::new(
            Vec3::new(0.0, 0.0, 0.2),
            Vec3::new(0.3, 0.0, 0.0),
            Mat3::from_diagonal(&Vec3::new(0.4, 0.2, 0.0)),
        );
        assert!(s.min_eigenvalue() > -1e-12);
        assert_eq!(classify_branch(&s), Branch::YEigvec);
    }

    fn x_state(x3: f64, y3: f64, t1: f64, t2: f64, t3: f64) -> BlochState {
        BlochState::new(
            Vec3::new(0.0, 0.0, x3),
            Vec3::new(0.0, 0.0, y3),
            Mat3::from_diagonal(&Vec3::new(t1, t2, t3)),
        )
    }

    #[test]
    fn classify_x_state_regimes() {
        // M1 <= M3 makes M3 the top eigenvalue of M, so y = z is a top
        // eigenvector and the YEigvec precedence takes it (same value as
        // the sigma_z formula).
        let s = x_state(0.1, 0.3, 0.2, 0.1, 0.5);
        assert!(s.min_eigenvalue() > -1e-12);
        assert_eq!(classify_branch(&s), Branch::YEigvec);
        let r = max_distance(&s).unwrap();
        let (m3, y2) = ((0.5 - 0.03_f64).powi(2), 0.09_f64);
        assert_abs_diff_eq!(r.value, 4.0 * m3 / (1.0 - y2).powi(2), epsilon = 1e-12);

        // M1 >= M3 with y2 past the interior window: sigma_z again.
        let s = x_state(0.233, -0.374, -0.322, 0.106, 0.198);
        assert!(s.min_eigenvalue() > -1e-12);
        let m1 = 0.322_f64.powi(2);
        let m3 = (0.198 - 0.233 * (-0.374_f64)).powi(2);
        assert!(0.374_f64.powi(2) > (m1 - m3) / (m1 + m3));
        assert_eq!(classify_branch(&s), Branch::XStateSigmaZ);

        // Small y2 below the window: sigma_x.
        let s = x_state(0.1, 0.2, 0.7, 0.1, 0.1);
        assert!(s.min_eigenvalue() > -1e-12);
        let m1 = 0.49;
        let m3 = (0.1 - 0.02_f64).powi(2);
        assert!(0.04 < (m1 - m3) / (2.0 * m1));
        assert_eq!(classify_branch(&s), Branch::XStateSigmaX);

        // y2 inside the window: interior solution.
        let s = x_state(-0.7, 0.7, 0.2, -0.2, -0.6);
        assert!(s.min_eigenvalue() > -1e-12);
        assert_eq!(classify_branch(&s), Branch::XStateInterior);
    }

    #[test]
    fn max_distance_fig1_bell_diagonal() {
        let r = max_distance(&bell_diag(-0.5, 0.7, 0.5)).unwrap();
        assert_eq!(r.branch, Branch::Canonical);
        assert_abs_diff_eq!(r.value, 1.96, epsilon = 1e-12);
        let n = r.n_star.unit();
        assert!(n.y.abs() > 1.0 - 1e-12, "expected +-y, got {n:?}");
    }

    #[test]
    fn max_distance_product_state_is_zero() {
        let x = Vec3::new(0.1, -0.2, 0.3);
        let y = Vec3::new(0.4, 0.0, -0.2);
        let s = BlochState::new(x, y, x * y.transpose());
        let r = max_distance(&s).unwrap();
        assert!(r.value.abs() < 1e-20);
        let k = DistanceKernel::from_state(&s);
        assert!(stationary_residual(&k, &r.n_star) < 1e-12);
    }

    fn two_param(a: f64, b: f64) -> BlochState {
        BlochState::new(
            Vec3::new(0.0, 0.0, -b),
            Vec3::new(0.0, 0.0, b),
            Mat3::from_diagonal(&Vec3::new(a, -a, 2.0 * a - 1.0)),
        )
    }

    #[test]
    fn max_distance_two_param_family_axis_values() {
        // x = -y = (0,0,-b), T = diag(a, -a, 2a-1): outside the interior
        // window the maximum sits on an axis,
        // D^2_max = 4 max{a^2, ((2a-1)+b^2)^2/(1-b^2)^2}.
        for (a, b) in [(0.4_f64, 0.2_f64), (0.9, 0.05), (0.5, 0.0)] {
            let expect = (a * a).max((2.0 * a - 1.0 + b * b).powi(2) / (1.0 - b * b).powi(2)) * 4.0;
            let r = max_distance(&two_param(a, b)).unwrap();
            assert_abs_diff_eq!(r.value, expect, epsilon = 1e-10);
        }
    }

    #[test]
    fn max_distance_two_param_family_interior_window() {
        // At (a, b) = (0.2, 0.7) the parameters fall inside the interior
        // window and the off-axis optimum beats both axis candidates.
        // Frozen from the independent one-dimensional reduction in
        // n3^2 = w: D^2 = 4 (M1 (1-w) + M3 w)/(1 - y^2 w)^2.
        let r = max_distance(&two_param(0.2, 0.7)).unwrap();
        assert_eq!(r.branch, Branch::XStateInterior);
        assert_abs_diff_eq!(r.value, 0.1913966068355053, epsilon = 1e-12);
        let axis_best =
            (0.04_f64).max((2.0 * 0.2 - 1.0 + 0.49_f64).powi(2) / (1.0 - 0.49_f64).powi(2)) * 4.0;
        assert!(r.value > axis_best + 1e-3);
        let k = DistanceKernel::from_state(&two_param(0.2, 0.7));
        assert!(stationary_residual(&k, &r.n_star) < 1e-12);
    }

    #[test]
    fn max_distance_rejects_pure_bob_marginal() {
        let s = BlochState::new(Vec3::zeros(), Vec3::new(0.0, 0.0, 1.0), Mat3::zeros());
        assert!(matches!(
            max_distance(&s),
            Err(SteerError::PureBobMarginal { .. })
        ));
    }

    #[test]
    fn y_eigvec_value_formula() {
        let s = BlochState::new(
            Vec3::new(0.0, 0.0, 0.2),
            Vec3::new(0.3, 0.0, 0.0),
            Mat3::from_diagonal(&Vec3::new(0.4, 0.2, 0.0)),
        );
        assert!(s.min_eigenvalue() > -1e-12);
        let r = max_distance(&s).unwrap();
        assert_eq!(r.branch, Branch::YEigvec);
        let k = DistanceKernel::from_state(&s);
        let y2 = 0.09;
        let yty = s.y.dot(&(k.m * s.y));
        assert_abs_diff_eq!(
            r.value,
            4.0 * yty / (y2 * (1.0 - y2) * (1.0 - y2)),
            epsilon = 1e-12
        );
        assert!(stationary_residual(&k, &r.n_star) < 1e-10);
    }

    #[test]
    fn stationary_residual_at_singular_directions_vanishes() {
        let k = DistanceKernel::from_state(&bell_diag(-0.5, 0.7, 0.5));
        for axis in [Vec3::x(), Vec3::y(), Vec3::z()] {
            assert!(stationary_residual(&k, &MeasurementDirection::from_unit(axis)) < 1e-15);
        }
    }

    #[test]
    fn stationary_residual_off_axis_oracle_value() {
        let k = DistanceKernel::from_state(&bell_diag(-0.5, 0.7, 0.5));
        let n = MeasurementDirection::from_unit(Vec3::new(1.0, 1.0, 1.0).normalize());
        // Direct evaluation: M = diag(0.25, 0.49, 0.25), residual 0.08*sqrt(2).
        assert_abs_diff_eq!(
            stationary_residual(&k, &n),
            0.08 * std::f64::consts::SQRT_2,
            epsilon = 1e-14
        );
    }

    #[test]
    fn numeric_branch_satisfies_stationarity() {
        // A generic state with no analytic structure.
        let s = BlochState::new(
            Vec3::new(0.1, 0.15, -0.2),
            Vec3::new(0.2, -0.1, 0.25),
            Mat3::new(0.3, 0.05, -0.1, 0.0, -0.25, 0.1, 0.05, 0.1, 0.2),
        );
        assert!(s.min_eigenvalue() > -1e-12);
        let r = max_distance(&s).unwrap();
        assert_eq!(r.branch, Branch::Numeric);
        let k = DistanceKernel::from_state(&s);
        assert!(stationary_residual(&k, &r.n_star) < 1e-8);
        assert_abs_diff_eq!(
            r.value,
            d_squared(&k, &r.n_star).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn direction_angles_round_trip() {
        let n = MeasurementDirection::from_angles(1.1, 2.3);
        assert_abs_diff_eq!(n.theta(), 1.1, epsilon = 1e-12);
        assert_abs_diff_eq!(n.phi(), 2.3, epsilon = 1e-12);
        assert!((n.unit().norm() - 1.0).abs() < 1e-12);
    }
}
