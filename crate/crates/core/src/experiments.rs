//! Desk-scale comparison experiments behind the CLI: single-state analysis,
//! the measurement-parameter surface of a Bell-diagonal state, bound-vs-
//! discord scatters over sampled families, and the two-parameter sweep.
//!
//! Every function here is deterministic given its arguments, and CSV output
//! uses 17-significant-digit round-trippable doubles.

use crate::correlations::{
    conditional_entropy, correlation_report, discord, q_star, two_param_discord_closed_form,
    two_param_state, CorrelationError,
};
use crate::io::fmt17;
use crate::sampling::{sample, Category, SampleError, SamplerConfig};
use crate::state::{BlochState, Mat3, StateError, Vec3};
use crate::steering::{
    canonical_ellipsoid, d_squared, max_distance, Branch, DistanceKernel, MeasurementDirection,
    SteerError,
};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Correlation(#[from] CorrelationError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Steer(#[from] SteerError),
    #[error("{0}")]
    BadInput(String),
}

#[derive(Debug, Serialize)]
pub struct DirectionJson {
    pub n: [f64; 3],
    pub theta: f64,
    pub phi: f64,
}

impl From<&MeasurementDirection> for DirectionJson {
    fn from(d: &MeasurementDirection) -> Self {
        let v = d.unit();
        DirectionJson {
            n: [v.x, v.y, v.z],
            theta: d.theta(),
            phi: d.phi(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct EllipsoidJson {
    pub center: [f64; 3],
    pub semiaxes: [f64; 3],
    pub axes: [[f64; 3]; 3],
}

/// Full single-state report: Bloch data, physicality diagnostics, canonical
/// ellipsoid, maximum distinguishability, discord and its upper bound.
#[derive(Debug, Serialize)]
pub struct AnalyzeReport {
    pub x: [f64; 3],
    pub y: [f64; 3],
    #[serde(rename = "T")]
    pub t: [[f64; 3]; 3],
    pub min_eigenvalue: f64,
    pub purity: f64,
    pub canonical_ellipsoid: Option<EllipsoidJson>,
    pub d2_max: f64,
    pub branch: String,
    pub n_star: DirectionJson,
    pub mutual_information: f64,
    pub classical_correlation: f64,
    pub discord: f64,
    pub q_star: f64,
    pub n_discord: DirectionJson,
}

pub fn analyze(s: &BlochState) -> Result<AnalyzeReport, ExperimentError> {
    let dm = s.to_density_matrix()?;
    let report = correlation_report(s)?;
    let opt = max_distance(s)?;
    let ellipsoid = crate::state::to_canonical(s)
        .ok()
        .and_then(|c| canonical_ellipsoid(&c).ok())
        .map(|e| EllipsoidJson {
            center: [e.center.x, e.center.y, e.center.z],
            semiaxes: [e.semiaxes.x, e.semiaxes.y, e.semiaxes.z],
            axes: [
                [e.axes[(0, 0)], e.axes[(0, 1)], e.axes[(0, 2)]],
                [e.axes[(1, 0)], e.axes[(1, 1)], e.axes[(1, 2)]],
                [e.axes[(2, 0)], e.axes[(2, 1)], e.axes[(2, 2)]],
            ],
        });
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = s.t[(i, j)];
        }
    }
    Ok(AnalyzeReport {
        x: [s.x.x, s.x.y, s.x.z],
        y: [s.y.x, s.y.y, s.y.z],
        t,
        min_eigenvalue: s.min_eigenvalue(),
        purity: dm.purity(),
        canonical_ellipsoid: ellipsoid,
        d2_max: opt.value,
        branch: opt.branch.to_string(),
        n_star: DirectionJson::from(&opt.n_star),
        mutual_information: report.mutual_info,
        classical_correlation: report.classical_corr,
        discord: report.discord,
        q_star: report.q_star,
        n_discord: DirectionJson::from(&report.n_discord),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceRow {
    pub theta: f64,
    pub phi: f64,
    pub conditional_entropy: f64,
    pub d_squared: f64,
}

/// Conditional entropy and squared distance on a `grid_n x 2 grid_n`
/// measurement grid over `[0, pi] x [0, 2 pi)` for a Bell-diagonal state.
pub fn surface(t: (f64, f64, f64), grid_n: usize) -> Result<Vec<SurfaceRow>, ExperimentError> {
    if grid_n == 0 {
        return Err(ExperimentError::BadInput("grid must be positive".into()));
    }
    let s = BlochState::new(
        Vec3::zeros(),
        Vec3::zeros(),
        Mat3::from_diagonal(&Vec3::new(t.0, t.1, t.2)),
    );
    s.to_density_matrix()?;
    let kernel = DistanceKernel::from_state(&s);
    let mut rows = Vec::with_capacity(grid_n * 2 * grid_n);
    for i in 0..grid_n {
        let theta = std::f64::consts::PI * i as f64 / grid_n as f64;
        for j in 0..2 * grid_n {
            let phi = std::f64::consts::PI * j as f64 / grid_n as f64;
            let n = MeasurementDirection::from_angles(theta, phi);
            rows.push(SurfaceRow {
                theta,
                phi,
                conditional_entropy: conditional_entropy(&s, &n)?,
                d_squared: d_squared(&kernel, &n)?,
            });
        }
    }
    Ok(rows)
}

pub fn surface_csv(rows: &[SurfaceRow]) -> String {
    let mut out = String::from("theta,phi,conditional_entropy,d_squared\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt17(r.theta),
            fmt17(r.phi),
            fmt17(r.conditional_entropy),
            fmt17(r.d_squared)
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterRow {
    pub q: f64,
    pub q_star: f64,
    pub branch: Branch,
    pub abs_err: f64,
    pub rel_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterSummary {
    pub max_abs_err: f64,
    pub max_rel_err: f64,
    /// Fraction of rows with `Q <= Q* + 1e-9`; the bound demands 1.0.
    pub bound_fraction: f64,
}

/// Discord vs upper bound over a sampled family. Rows are ordered by sample
/// index; states are distributed over worker threads.
pub fn scatter(
    category: Category,
    count: usize,
    seed: u64,
) -> Result<(Vec<ScatterRow>, ScatterSummary), ExperimentError> {
    let states = sample(&SamplerConfig {
        seed,
        category,
        count,
    })?;
    let rows: Result<Vec<ScatterRow>, CorrelationError> = states
        .par_iter()
        .map(|s| {
            let r = correlation_report(s)?;
            let abs_err = (r.q_star - r.discord).abs();
            Ok(ScatterRow {
                q: r.discord,
                q_star: r.q_star,
                branch: r.branch,
                abs_err,
                rel_err: abs_err / r.discord.max(1e-12),
            })
        })
        .collect();
    let rows = rows?;
    let max_abs_err = rows.iter().map(|r| r.abs_err).fold(0.0, f64::max);
    let max_rel_err = rows.iter().map(|r| r.rel_err).fold(0.0, f64::max);
    let ok = rows.iter().filter(|r| r.q <= r.q_star + 1e-9).count();
    let summary = ScatterSummary {
        max_abs_err,
        max_rel_err,
        bound_fraction: ok as f64 / rows.len().max(1) as f64,
    };
    Ok((rows, summary))
}

pub fn scatter_csv(rows: &[ScatterRow], summary: &ScatterSummary) -> String {
    let mut out = String::from("q,q_star,branch,abs_err,rel_err\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt17(r.q),
            fmt17(r.q_star),
            r.branch,
            fmt17(r.abs_err),
            fmt17(r.rel_err)
        ));
    }
    out.push_str(&format!(
        "# summary,max_abs_err={},max_rel_err={},bound_fraction={}\n",
        fmt17(summary.max_abs_err),
        fmt17(summary.max_rel_err),
        fmt17(summary.bound_fraction)
    ));
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoParamRow {
    pub a: f64,
    pub q_closed: f64,
    pub q_numeric: f64,
    pub q_star: f64,
}

/// Longest contiguous run of samples with `|Q - Q*| > 1e-6`.
#[derive(Debug, Clone, PartialEq)]
pub struct MismatchInterval {
    pub start_a: f64,
    pub end_a: f64,
    pub samples: usize,
}

const MISMATCH_TOL: f64 = 1e-6;

/// Sweep the two-parameter family at fixed `b` over `steps` values of `a`
/// covering the physical range `[0, 1 - |b|]`.
pub fn two_param_sweep(
    b: f64,
    steps: usize,
) -> Result<(Vec<TwoParamRow>, Option<MismatchInterval>), ExperimentError> {
    if b.abs() >= 1.0 - 1e-10 {
        return Err(ExperimentError::Correlation(CorrelationError::OutOfDomain {
            a: f64::NAN,
            b,
        }));
    }
    if steps == 0 {
        return Err(ExperimentError::BadInput("steps must be positive".into()));
    }
    let a_max = 1.0 - b.abs();
    let a_values: Vec<f64> = (0..steps)
        .map(|i| {
            if steps == 1 {
                0.0
            } else {
                a_max * i as f64 / (steps - 1) as f64
            }
        })
        .collect();
    let rows: Result<Vec<TwoParamRow>, ExperimentError> = a_values
        .par_iter()
        .map(|&a| {
            let s = two_param_state(a, b)?;
            let q_closed = two_param_discord_closed_form(a, b)?;
            let (q_numeric, _) = discord(&s)?;
            let (qs, _) = q_star(&s)?;
            Ok(TwoParamRow {
                a,
                q_closed,
                q_numeric,
                q_star: qs,
            })
        })
        .collect();
    let rows = rows?;

    let mut best: Option<(usize, usize)> = None;
    let mut run_start: Option<usize> = None;
    for (i, r) in rows.iter().enumerate() {
        if (r.q_closed - r.q_star).abs() > MISMATCH_TOL {
            run_start.get_or_insert(i);
        } else if let Some(s) = run_start.take() {
            if best.is_none_or(|(bs, be)| i - s > be - bs + 1) {
                best = Some((s, i - 1));
            }
        }
    }
    if let Some(s) = run_start {
        let end = rows.len() - 1;
        if best.is_none_or(|(bs, be)| end + 1 - s > be - bs + 1) {
            best = Some((s, end));
        }
    }
    let interval = best.map(|(s, e)| MismatchInterval {
        start_a: rows[s].a,
        end_a: rows[e].a,
        samples: e - s + 1,
    });
    Ok((rows, interval))
}

pub fn two_param_csv(rows: &[TwoParamRow], interval: &Option<MismatchInterval>) -> String {
    let mut out = String::from("a,q_closed,q_numeric,q_star\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt17(r.a),
            fmt17(r.q_closed),
            fmt17(r.q_numeric),
            fmt17(r.q_star)
        ));
    }
    match interval {
        Some(iv) => out.push_str(&format!(
            "# mismatch_interval,start={},end={},samples={}\n",
            fmt17(iv.start_a),
            fmt17(iv.end_a),
            iv.samples
        )),
        None => out.push_str("# mismatch_interval,none\n"),
    }
    out
}
