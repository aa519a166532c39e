//! State files, JSON-lines dumps, and CSV formatting.
//!
//! A state file is a JSON object in one of two shapes:
//! `{"rho": [[[re, im], ...] x4]}` (4x4 complex matrix) or
//! `{"x": [..3], "y": [..3], "T": [[..3] x3]}` (Bloch form). Both are
//! validated and normalized to a [`BlochState`].

use crate::correlations::CorrelationReport;
use crate::state::{from_density_matrix, BlochState, CMat4, DensityMatrix4, Mat3, StateError, Vec3, C64};
use crate::steering::Ellipsoid;
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot parse state file: {0}")]
    Parse(String),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Serialize, Deserialize)]
struct BlochJson {
    x: [f64; 3],
    y: [f64; 3],
    #[serde(rename = "T")]
    t: [[f64; 3]; 3],
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum StateJson {
    Rho { rho: Vec<Vec<[f64; 2]>> },
    Bloch(BlochJson),
}

impl From<&BlochState> for BlochJson {
    fn from(s: &BlochState) -> Self {
        let mut t = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                t[i][j] = s.t[(i, j)];
            }
        }
        BlochJson {
            x: [s.x.x, s.x.y, s.x.z],
            y: [s.y.x, s.y.y, s.y.z],
            t,
        }
    }
}

impl From<&BlochJson> for BlochState {
    fn from(j: &BlochJson) -> Self {
        BlochState::new(
            Vec3::new(j.x[0], j.x[1], j.x[2]),
            Vec3::new(j.y[0], j.y[1], j.y[2]),
            Mat3::from_fn(|i, k| j.t[i][k]),
        )
    }
}

/// Parse and validate a state file. Both accepted shapes come back as a
/// physical [`BlochState`].
pub fn parse_state_json(text: &str) -> Result<BlochState, IoError> {
    let parsed: StateJson =
        serde_json::from_str(text).map_err(|e| IoError::Parse(e.to_string()))?;
    match parsed {
        StateJson::Rho { rho } => {
            if rho.len() != 4 || rho.iter().any(|row| row.len() != 4) {
                return Err(IoError::Parse(format!(
                    "rho must be 4x4, got {} rows",
                    rho.len()
                )));
            }
            let m = CMat4::from_fn(|i, j| C64::new(rho[i][j][0], rho[i][j][1]));
            let dm = DensityMatrix4::new(m)?;
            Ok(from_density_matrix(&dm))
        }
        StateJson::Bloch(b) => {
            let s = BlochState::from(&b);
            s.to_density_matrix()?;
            Ok(s)
        }
    }
}

pub fn load_state(path: &Path) -> Result<BlochState, IoError> {
    let text = std::fs::read_to_string(path)?;
    parse_state_json(&text)
}

/// One JSON-lines record (Bloch shape) for a state.
pub fn state_json_line(s: &BlochState) -> String {
    serde_json::to_string(&BlochJson::from(s)).expect("bloch state serializes")
}

/// 17 significant digits: round-trippable doubles for CSV output.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn report_csv_header() -> &'static str {
    "mutual_info,classical_corr,discord,q_star,theta_discord,phi_discord,theta_star,phi_star,branch"
}

/// One CSV row per report: `(I, C, Q, Qstar, theta_Q, phi_Q, theta*, phi*, branch)`.
pub fn report_csv_row(r: &CorrelationReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        fmt17(r.mutual_info),
        fmt17(r.classical_corr),
        fmt17(r.discord),
        fmt17(r.q_star),
        fmt17(r.n_discord.theta()),
        fmt17(r.n_discord.phi()),
        fmt17(r.n_star.theta()),
        fmt17(r.n_star.phi()),
        r.branch
    )
}

pub fn ellipsoid_csv_header() -> &'static str {
    "center_1,center_2,center_3,s_1,s_2,s_3,axis_11,axis_12,axis_13,axis_21,axis_22,axis_23,axis_31,axis_32,axis_33"
}

/// Ellipsoid export row: center, semiaxes, axes flattened row-major.
pub fn ellipsoid_csv_row(e: &Ellipsoid) -> String {
    let mut fields = vec![
        fmt17(e.center.x),
        fmt17(e.center.y),
        fmt17(e.center.z),
        fmt17(e.semiaxes.x),
        fmt17(e.semiaxes.y),
        fmt17(e.semiaxes.z),
    ];
    for i in 0..3 {
        for j in 0..3 {
            fields.push(fmt17(e.axes[(i, j)]));
        }
    }
    fields.join(",")
}
