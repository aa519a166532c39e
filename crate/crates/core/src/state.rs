//! Two-qubit states in density-matrix and Bloch `(x, y, T)` form.
//!
//! The Bloch form of a two-qubit state is
//! `rho = 1/4 (1⊗1 + x·sigma⊗1 + 1⊗y·sigma + sum_ij t_ij sigma_i⊗sigma_j)`
//! with Alice on the left tensor factor, Bob on the right, and the Pauli
//! basis fixed as `(sigma_1, sigma_2, sigma_3) = (X, Y, Z)`. All entropies
//! are in bits (base-2 logarithms).

use nalgebra::{Complex, Matrix2, Matrix3, Matrix4, Vector3};
use thiserror::Error;

pub type C64 = Complex<f64>;
pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;
pub type CMat2 = Matrix2<C64>;
pub type CMat4 = Matrix4<C64>;

/// Tolerance for Hermiticity and unit-trace checks.
pub const MATRIX_TOL: f64 = 1e-12;
/// Most negative eigenvalue still accepted as physical. Sampling and the
/// local filtering transformation accumulate rounding at the 1e-13 level.
pub const PHYSICALITY_TOL: f64 = 1e-10;
/// Bob marginals with `|y| >= 1 - SINGULAR_FILTER_TOL` are treated as pure.
pub const SINGULAR_FILTER_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum StateError {
    #[error("matrix is not Hermitian: max |m_ij - conj(m_ji)| = {max_dev:.3e}")]
    NotHermitian { max_dev: f64 },
    #[error("matrix trace differs from one by {dev:.3e}")]
    NotUnitTrace { dev: f64 },
    #[error("matrix is not positive semidefinite: minimum eigenvalue {min_eigenvalue:.3e}")]
    NonPhysical { min_eigenvalue: f64 },
    #[error("Bob marginal is singular (|y| = {y_norm}); local filtering transformation undefined")]
    SingularFilter { y_norm: f64 },
}

/// Which subsystem to keep when tracing out the other.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Alice,
    Bob,
}

pub(crate) fn paulis() -> [CMat2; 3] {
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [
        CMat2::new(z, o, o, z),
        CMat2::new(z, -i, i, z),
        CMat2::new(o, z, z, -o),
    ]
}

/// A validated 4x4 density matrix: Hermitian, unit trace, positive
/// semidefinite within [`PHYSICALITY_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix4 {
    inner: CMat4,
}

impl DensityMatrix4 {
    pub fn new(m: CMat4) -> Result<Self, StateError> {
        let mut max_dev: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                max_dev = max_dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        if max_dev > MATRIX_TOL {
            return Err(StateError::NotHermitian { max_dev });
        }
        let tr = m.trace();
        let dev = (tr - C64::new(1.0, 0.0)).norm();
        if dev > MATRIX_TOL {
            return Err(StateError::NotUnitTrace { dev });
        }
        let min_eigenvalue = m
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eigenvalue < -PHYSICALITY_TOL {
            return Err(StateError::NonPhysical { min_eigenvalue });
        }
        Ok(Self { inner: m })
    }

    /// Wrap a matrix that is Hermitian and unit-trace by construction.
    /// The positivity check still runs.
    pub(crate) fn from_assembled(m: CMat4) -> Result<Self, StateError> {
        let min_eigenvalue = m
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eigenvalue < -PHYSICALITY_TOL {
            return Err(StateError::NonPhysical { min_eigenvalue });
        }
        Ok(Self { inner: m })
    }

    pub fn matrix(&self) -> &CMat4 {
        &self.inner
    }

    /// Eigenvalues in descending order, clamped into `[0, 1]` when within
    /// [`PHYSICALITY_TOL`] of the boundary.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let ev = self.inner.symmetric_eigen().eigenvalues;
        let mut out = [0.0; 4];
        for (k, v) in ev.iter().enumerate() {
            out[k] = clamp_probability(*v);
        }
        out.sort_by(|a, b| b.partial_cmp(a).unwrap());
        out
    }

    pub fn entropy(&self) -> f64 {
        von_neumann_entropy(&self.eigenvalues())
    }

    pub fn purity(&self) -> f64 {
        (self.inner * self.inner).trace().re
    }
}

fn clamp_probability(v: f64) -> f64 {
    if v < 0.0 && v >= -PHYSICALITY_TOL {
        0.0
    } else if v > 1.0 && v <= 1.0 + PHYSICALITY_TOL {
        1.0
    } else {
        v
    }
}

/// A single qubit given by its Bloch vector (`|r| <= 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct SingleQubitState {
    pub bloch: Vec3,
}

impl SingleQubitState {
    pub fn new(bloch: Vec3) -> Self {
        Self { bloch }
    }

    /// Eigenvalues `(1 + |r|)/2, (1 - |r|)/2`.
    pub fn probabilities(&self) -> [f64; 2] {
        let r = self.bloch.norm().min(1.0);
        [(1.0 + r) / 2.0, (1.0 - r) / 2.0]
    }

    pub fn entropy(&self) -> f64 {
        let [p, q] = self.probabilities();
        von_neumann_entropy(&[p, q])
    }
}

/// Two-qubit state in Bloch form: Alice coherence vector `x`, Bob coherence
/// vector `y`, and the 3x3 correlation matrix `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochState {
    pub x: Vec3,
    pub y: Vec3,
    pub t: Mat3,
}

impl BlochState {
    pub fn new(x: Vec3, y: Vec3, t: Mat3) -> Self {
        Self { x, y, t }
    }

    /// Assemble the 4x4 matrix without any physicality check.
    pub(crate) fn assemble(&self) -> CMat4 {
        let p = paulis();
        let id = CMat2::identity();
        let mut m = id.kronecker(&id);
        for i in 0..3 {
            m += p[i].kronecker(&id) * C64::new(self.x[i], 0.0);
            m += id.kronecker(&p[i]) * C64::new(self.y[i], 0.0);
            for j in 0..3 {
                m += p[i].kronecker(&p[j]) * C64::new(self.t[(i, j)], 0.0);
            }
        }
        m * C64::new(0.25, 0.0)
    }

    /// Assemble the density matrix, signalling `NonPhysical` when the
    /// minimum eigenvalue drops below `-1e-10`.
    pub fn to_density_matrix(&self) -> Result<DensityMatrix4, StateError> {
        DensityMatrix4::from_assembled(self.assemble())
    }

    /// Minimum eigenvalue of the assembled matrix; negative values mean the
    /// `(x, y, T)` triple is not a physical state.
    pub fn min_eigenvalue(&self) -> f64 {
        self.assemble()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn alice_marginal(&self) -> SingleQubitState {
        SingleQubitState::new(self.x)
    }

    pub fn bob_marginal(&self) -> SingleQubitState {
        SingleQubitState::new(self.y)
    }
}

/// Extract `(x, y, T)` from a density matrix via Pauli traces:
/// `x_i = Tr[m (sigma_i⊗1)]`, `y_j = Tr[m (1⊗sigma_j)]`,
/// `t_ij = Tr[m (sigma_i⊗sigma_j)]`.
pub fn from_density_matrix(m: &DensityMatrix4) -> BlochState {
    let p = paulis();
    let id = CMat2::identity();
    let rho = m.matrix();
    let mut x = Vec3::zeros();
    let mut y = Vec3::zeros();
    let mut t = Mat3::zeros();
    for i in 0..3 {
        x[i] = (rho * p[i].kronecker(&id)).trace().re;
        y[i] = (rho * id.kronecker(&p[i])).trace().re;
        for j in 0..3 {
            t[(i, j)] = (rho * p[i].kronecker(&p[j])).trace().re;
        }
    }
    BlochState::new(x, y, t)
}

/// Inverse of [`from_density_matrix`]; see [`BlochState::to_density_matrix`].
pub fn to_density_matrix(s: &BlochState) -> Result<DensityMatrix4, StateError> {
    s.to_density_matrix()
}

/// Reduced state of the kept side. The Bloch vector equals the `x` (Alice)
/// or `y` (Bob) of the parent state.
pub fn partial_trace(m: &DensityMatrix4, side: Side) -> SingleQubitState {
    let rho = m.matrix();
    let mut red = CMat2::zeros();
    for a in 0..2 {
        for b in 0..2 {
            for k in 0..2 {
                red[(a, b)] += match side {
                    Side::Alice => rho[(2 * a + k, 2 * b + k)],
                    Side::Bob => rho[(2 * k + a, 2 * k + b)],
                };
            }
        }
    }
    let p = paulis();
    let bloch = Vec3::new(
        (red * p[0]).trace().re,
        (red * p[1]).trace().re,
        (red * p[2]).trace().re,
    );
    SingleQubitState::new(bloch)
}

/// Four real eigenvalues in descending order, clamped into `[0, 1]` near the
/// boundary.
pub fn eigenvalues_hermitian(m: &DensityMatrix4) -> [f64; 4] {
    m.eigenvalues()
}

/// Shannon entropy `-sum p log2 p` in bits, with `0 log 0 := 0`.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    let mut h = 0.0;
    for &p in probs {
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    h
}

/// Von Neumann entropy of an eigenvalue vector, in bits.
pub fn von_neumann_entropy(eigs: &[f64]) -> f64 {
    debug_assert!(
        (eigs.iter().sum::<f64>() - 1.0).abs() <= 1e-9,
        "eigenvalues must sum to one"
    );
    shannon_entropy(eigs)
}

/// Binary entropy `h2(p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    shannon_entropy(&[p, 1.0 - p])
}

/// Canonical form of a state: the local filtering transformation
/// `(1 ⊗ (2 rho^B)^{-1/2}) rho (1 ⊗ (2 rho^B)^{-1/2})`, which sets the Bob
/// marginal to maximally mixed while preserving physicality and Alice's
/// steering ellipsoid.
pub fn to_canonical(s: &BlochState) -> Result<BlochState, StateError> {
    let y_norm = s.y.norm();
    if y_norm >= 1.0 - SINGULAR_FILTER_TOL {
        return Err(StateError::SingularFilter { y_norm });
    }
    let rho = s.to_density_matrix()?;
    if y_norm < 1e-15 {
        // 2 rho^B = 1; the filter is the identity.
        return Ok(s.clone());
    }
    // (1 + y.sigma)^{-1/2} = alpha 1 + beta yhat.sigma on the Bob factor.
    let alpha = 0.5 * ((1.0 + y_norm).powf(-0.5) + (1.0 - y_norm).powf(-0.5));
    let beta = 0.5 * ((1.0 + y_norm).powf(-0.5) - (1.0 - y_norm).powf(-0.5));
    let yhat = s.y / y_norm;
    let p = paulis();
    let mut f = CMat2::identity() * C64::new(alpha, 0.0);
    for i in 0..3 {
        f += p[i] * C64::new(beta * yhat[i], 0.0);
    }
    let filter = CMat2::identity().kronecker(&f);
    let canonical = filter * rho.matrix() * filter;
    Ok(from_density_matrix(&DensityMatrix4::new(canonical)?))
}
