//! Reproducible random two-qubit states: the Hilbert-Schmidt (Ginibre)
//! ensemble and rejection-sampled families for the comparison experiments.
//!
//! Randomness comes from ChaCha8. Each output index draws from its own
//! stream of the seeded generator, so a batch can be produced in any order
//! (or in parallel) and still match the sequential output element-wise.

use crate::state::{from_density_matrix, to_canonical, BlochState, CMat4, DensityMatrix4, Mat3, Vec3, C64};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

/// Attempt budget per output state before a category is declared
/// misconfigured (acceptance rate below 1e-4).
const MAX_ATTEMPTS: usize = 10_000;

/// Physicality acceptance for assembled Bloch triples.
const ACCEPT_MIN_EIG: f64 = -1e-10;

/// Keep sampled states clear of the pure-Bob-marginal boundary the
/// downstream optimizations exclude.
const MAX_Y_NORM: f64 = 1.0 - 1e-8;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SampleError {
    #[error("category {category} rejected {attempts} consecutive draws; sampler misconfigured")]
    ExhaustedRejection { category: Category, attempts: usize },
}

/// State families used by the scatter experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Generic,
    Canonical,
    BellDiagonal,
    YTopEigvec,
    XStateM1LeM3,
    XStateM1GeM3Interior,
    XStateM1GeM3Edge,
    ZeroDiscordT0,
    ZeroDiscordRank1,
}

impl Category {
    pub const ALL: [Category; 9] = [
        Category::Generic,
        Category::Canonical,
        Category::BellDiagonal,
        Category::YTopEigvec,
        Category::XStateM1LeM3,
        Category::XStateM1GeM3Interior,
        Category::XStateM1GeM3Edge,
        Category::ZeroDiscordT0,
        Category::ZeroDiscordRank1,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Category::Generic => "generic",
            Category::Canonical => "canonical",
            Category::BellDiagonal => "bell-diagonal",
            Category::YTopEigvec => "y-top-eigvec",
            Category::XStateM1LeM3 => "xstate-m1-le-m3",
            Category::XStateM1GeM3Interior => "xstate-m1-ge-m3-interior",
            Category::XStateM1GeM3Edge => "xstate-m1-ge-m3-edge",
            Category::ZeroDiscordT0 => "zero-discord-t0",
            Category::ZeroDiscordRank1 => "zero-discord-rank1",
        }
    }
}

impl std::fmt::Display for Category {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::ALL
            .iter()
            .find(|c| c.name() == s)
            .copied()
            .ok_or_else(|| {
                let names: Vec<&str> = Category::ALL.iter().map(|c| c.name()).collect();
                format!("unknown category '{s}'; expected one of {}", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerConfig {
    pub seed: u64,
    pub category: Category,
    pub count: usize,
}

fn stream_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn complex_normal(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// One draw from the Hilbert-Schmidt ensemble: `rho = G G^dag / Tr(G G^dag)`
/// with `G` a 4x4 matrix of independent standard complex Gaussians.
fn ginibre_density(rng: &mut ChaCha8Rng) -> DensityMatrix4 {
    loop {
        let g = CMat4::from_fn(|_, _| complex_normal(rng));
        let w = g * g.adjoint();
        let tr = w.trace().re;
        if tr > 0.0 {
            let rho = w / C64::new(tr, 0.0);
            if let Ok(dm) = DensityMatrix4::new(rho) {
                return dm;
            }
        }
    }
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

fn unit_vector(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
        );
        let n = v.norm();
        if n > 1e-6 {
            return v / n;
        }
    }
}

fn ball_vector(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(
            uniform(rng, -1.0, 1.0),
            uniform(rng, -1.0, 1.0),
            uniform(rng, -1.0, 1.0),
        );
        if v.norm() <= 1.0 {
            return v;
        }
    }
}

fn physical(s: &BlochState) -> bool {
    s.min_eigenvalue() >= ACCEPT_MIN_EIG && s.y.norm() <= MAX_Y_NORM
}

/// The interior window of the X-state regime split:
/// `(M1-M3)/(2M1) <= y^2 <= (M1-M3)/(M1+M3)` for `M1 > M3`.
fn x_regime(m1: f64, m3: f64, y2: f64) -> u8 {
    if m1 <= m3 {
        return 0; // sigma_z family
    }
    let lower = (m1 - m3) / (2.0 * m1);
    let upper = (m1 - m3) / (m1 + m3);
    if y2 < lower {
        2 // sigma_x edge
    } else if y2 <= upper {
        1 // interior
    } else {
        2 // sigma_z edge
    }
}

fn draw_x_state(rng: &mut ChaCha8Rng) -> (BlochState, u8, bool) {
    let x3 = uniform(rng, -1.0, 1.0);
    let y3 = uniform(rng, -1.0, 1.0);
    let mut t1 = uniform(rng, -1.0, 1.0);
    let mut t2 = uniform(rng, -1.0, 1.0);
    let t3 = uniform(rng, -1.0, 1.0);
    // Convention |t1| >= |t2|.
    if t1.abs() < t2.abs() {
        std::mem::swap(&mut t1, &mut t2);
    }
    let s = BlochState::new(
        Vec3::new(0.0, 0.0, x3),
        Vec3::new(0.0, 0.0, y3),
        Mat3::from_diagonal(&Vec3::new(t1, t2, t3)),
    );
    let m1 = t1 * t1;
    let m3 = (t3 - x3 * y3) * (t3 - x3 * y3);
    let regime = x_regime(m1, m3, y3 * y3);
    let m1_le_m3 = m1 <= m3;
    (s, regime, m1_le_m3)
}

fn draw_category(category: Category, rng: &mut ChaCha8Rng) -> Option<BlochState> {
    match category {
        Category::Generic => Some(from_density_matrix(&ginibre_density(rng))),
        Category::Canonical => {
            let s = from_density_matrix(&ginibre_density(rng));
            to_canonical(&s).ok()
        }
        Category::BellDiagonal => {
            let t = Vec3::new(
                uniform(rng, -1.0, 1.0),
                uniform(rng, -1.0, 1.0),
                uniform(rng, -1.0, 1.0),
            );
            let eigs = [
                1.0 - t.x - t.y - t.z,
                1.0 - t.x + t.y + t.z,
                1.0 + t.x - t.y + t.z,
                1.0 + t.x + t.y - t.z,
            ];
            if eigs.iter().all(|&e| e >= 0.0) {
                Some(BlochState::new(
                    Vec3::zeros(),
                    Vec3::zeros(),
                    Mat3::from_diagonal(&t),
                ))
            } else {
                None
            }
        }
        Category::YTopEigvec => {
            // x = x3 z, y = y1 x, T = diag(t1, t2, 0), t1^2 + x3^2 y1^2 >= t2^2.
            let x3 = uniform(rng, -1.0, 1.0);
            let y1 = uniform(rng, -1.0, 1.0);
            let t1 = uniform(rng, -1.0, 1.0);
            let t2 = uniform(rng, -1.0, 1.0);
            if t1 * t1 + x3 * x3 * y1 * y1 < t2 * t2 {
                return None;
            }
            let s = BlochState::new(
                Vec3::new(0.0, 0.0, x3),
                Vec3::new(y1, 0.0, 0.0),
                Mat3::from_diagonal(&Vec3::new(t1, t2, 0.0)),
            );
            physical(&s).then_some(s)
        }
        Category::XStateM1LeM3 => {
            let (s, _, m1_le_m3) = draw_x_state(rng);
            (m1_le_m3 && physical(&s)).then_some(s)
        }
        Category::XStateM1GeM3Interior => {
            let (s, regime, m1_le_m3) = draw_x_state(rng);
            (!m1_le_m3 && regime == 1 && physical(&s)).then_some(s)
        }
        Category::XStateM1GeM3Edge => {
            let (s, regime, m1_le_m3) = draw_x_state(rng);
            (!m1_le_m3 && regime == 2 && physical(&s)).then_some(s)
        }
        Category::ZeroDiscordT0 => {
            let x = ball_vector(rng);
            let y = ball_vector(rng);
            // Physical iff |x| + |y| <= 1.
            (x.norm() + y.norm() <= 1.0 && y.norm() <= MAX_Y_NORM)
                .then(|| BlochState::new(x, y, Mat3::zeros()))
        }
        Category::ZeroDiscordRank1 => {
            let k = unit_vector(rng);
            let t = uniform(rng, -1.0, 1.0);
            let yc = uniform(rng, -1.0, 1.0);
            let x = ball_vector(rng);
            let s = BlochState::new(x, k * yc, (k * k.transpose()) * t);
            physical(&s).then_some(s)
        }
    }
}

/// Draw `cfg.count` states of the requested category. Identical
/// configurations yield bit-identical output.
pub fn sample(cfg: &SamplerConfig) -> Result<Vec<BlochState>, SampleError> {
    let mut out = Vec::with_capacity(cfg.count);
    for index in 0..cfg.count {
        let mut rng = stream_rng(cfg.seed, index);
        let mut accepted = None;
        for _ in 0..MAX_ATTEMPTS {
            if let Some(s) = draw_category(cfg.category, &mut rng) {
                accepted = Some(s);
                break;
            }
        }
        match accepted {
            Some(s) => out.push(s),
            None => {
                return Err(SampleError::ExhaustedRejection {
                    category: cfg.category,
                    attempts: MAX_ATTEMPTS,
                })
            }
        }
    }
    Ok(out)
}

/// Hilbert-Schmidt states without category constraints.
pub fn sample_generic(seed: u64, count: usize) -> Vec<BlochState> {
    sample(&SamplerConfig {
        seed,
        category: Category::Generic,
        count,
    })
    .expect("generic sampling cannot exhaust")
}
