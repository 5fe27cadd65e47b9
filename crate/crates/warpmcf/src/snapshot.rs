//! Checkpoint files for graph states and profile curves.
//!
//! A snapshot is one header line of JSON (format tag, version, payload kind,
//! payload length and SHA-256) followed by the JSON payload. Numbers are
//! written with shortest round-trip decimals and read back with exact
//! parsing, so every `f64` survives bit for bit.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use warpmcf_core::counterflow::{CurveError, EndCondition, ProfileCurve};
use warpmcf_core::geometry::{BaseManifold, WarpFactor};
use warpmcf_core::graphflow::{BoundaryPolicy, FlowProblem, GraphState, Grid};
use warpmcf_core::SetupError;

pub const SNAPSHOT_FORMAT: &str = "warpmcf-snapshot";
pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PayloadKind {
    GraphState,
    ProfileCurve,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    kind: PayloadKind,
    length: usize,
    sha256: String,
}

#[derive(Debug, thiserror::Error)]
pub enum SnapshotError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("not a snapshot: {0}")]
    NotASnapshot(String),
    #[error("snapshot version {found} is not supported (this build reads version {expected})")]
    Version { found: u32, expected: u32 },
    #[error("snapshot holds a {found:?}, expected a {expected:?}")]
    Kind { found: PayloadKind, expected: PayloadKind },
    #[error("payload is {found} bytes, header announces {expected}")]
    Length { expected: usize, found: usize },
    #[error("payload checksum mismatch")]
    Checksum,
    #[error("corrupt payload: {0}")]
    Payload(#[from] serde_json::Error),
    #[error(transparent)]
    Setup(#[from] SetupError),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// Problem description that precedes the node values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct StateHeader {
    base: BaseManifold,
    warp: WarpFactor,
    grid: Grid,
    policy: BoundaryPolicy,
    t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct StatePayload {
    header: StateHeader,
    /// heights in row-major node order
    u: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CurvePayload {
    nodes: Vec<[f64; 2]>,
    multiplicity: usize,
    ends: [EndCondition; 2],
    t: f64,
}

fn checksum(payload: &[u8]) -> String {
    hex::encode(Sha256::digest(payload))
}

fn encode<T: Serialize>(kind: PayloadKind, payload: &T) -> Vec<u8> {
    let body = serde_json::to_vec(payload).expect("snapshot payloads serialize");
    let header = Header {
        format: SNAPSHOT_FORMAT.to_string(),
        version: SNAPSHOT_VERSION,
        kind,
        length: body.len(),
        sha256: checksum(&body),
    };
    let mut out = serde_json::to_vec(&header).expect("headers serialize");
    out.push(b'\n');
    out.extend_from_slice(&body);
    out
}

fn decode<T: for<'de> Deserialize<'de>>(bytes: &[u8], expected: PayloadKind) -> Result<T, SnapshotError> {
    let split = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| SnapshotError::NotASnapshot("missing header line".to_string()))?;
    let header: Header = serde_json::from_slice(&bytes[..split])
        .map_err(|e| SnapshotError::NotASnapshot(format!("unreadable header: {e}")))?;
    if header.format != SNAPSHOT_FORMAT {
        return Err(SnapshotError::NotASnapshot(format!("format tag `{}`", header.format)));
    }
    if header.version != SNAPSHOT_VERSION {
        return Err(SnapshotError::Version { found: header.version, expected: SNAPSHOT_VERSION });
    }
    if header.kind != expected {
        return Err(SnapshotError::Kind { found: header.kind, expected });
    }
    let body = &bytes[split + 1..];
    if body.len() != header.length {
        return Err(SnapshotError::Length { expected: header.length, found: body.len() });
    }
    if checksum(body) != header.sha256 {
        return Err(SnapshotError::Checksum);
    }
    Ok(serde_json::from_slice(body)?)
}

pub fn encode_state(state: &GraphState) -> Vec<u8> {
    let p = state.problem();
    let payload = StatePayload {
        header: StateHeader {
            base: p.base().clone(),
            warp: p.warp().clone(),
            grid: p.grid().clone(),
            policy: p.policy(),
            t: state.t(),
        },
        u: state.u().to_vec(),
    };
    encode(PayloadKind::GraphState, &payload)
}

/// Rebuilds the problem from the header and validates the heights against
/// it.
pub fn decode_state(bytes: &[u8]) -> Result<GraphState, SnapshotError> {
    let p: StatePayload = decode(bytes, PayloadKind::GraphState)?;
    let h = p.header;
    let problem = FlowProblem::new(h.base, h.warp, h.grid, h.policy)?;
    Ok(GraphState::new(Arc::new(problem), p.u, h.t)?)
}

pub fn encode_curve(curve: &ProfileCurve) -> Vec<u8> {
    let payload = CurvePayload {
        nodes: curve.nodes().to_vec(),
        multiplicity: curve.multiplicity(),
        ends: curve.ends(),
        t: curve.t(),
    };
    encode(PayloadKind::ProfileCurve, &payload)
}

pub fn decode_curve(bytes: &[u8]) -> Result<ProfileCurve, SnapshotError> {
    let p: CurvePayload = decode(bytes, PayloadKind::ProfileCurve)?;
    Ok(ProfileCurve::new(p.nodes, p.multiplicity, p.ends)?.with_time(p.t))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), SnapshotError> {
    fs::write(path, bytes).map_err(|source| SnapshotError::Io { path: path.to_path_buf(), source })
}

fn read(path: &Path) -> Result<Vec<u8>, SnapshotError> {
    fs::read(path).map_err(|source| SnapshotError::Io { path: path.to_path_buf(), source })
}

pub fn save_state(path: &Path, state: &GraphState) -> Result<(), SnapshotError> {
    write(path, &encode_state(state))
}

pub fn load_state(path: &Path) -> Result<GraphState, SnapshotError> {
    decode_state(&read(path)?)
}

pub fn save_curve(path: &Path, curve: &ProfileCurve) -> Result<(), SnapshotError> {
    write(path, &encode_curve(curve))
}

pub fn load_curve(path: &Path) -> Result<ProfileCurve, SnapshotError> {
    decode_curve(&read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use warpmcf_core::counterflow::Scenario;

    fn torus(n: usize) -> Arc<FlowProblem> {
        let l = std::f64::consts::TAU;
        let base = BaseManifold::FlatTorus { lengths: [l, l] };
        let warp = WarpFactor::TorusBump { offset: 1.5, amplitude: 0.5, mode: 1 };
        Arc::new(FlowProblem::with_default_policy(base, warp, Grid::Torus { n: [n, n], lengths: [l, l] }).unwrap())
    }

    fn bits(u: &[f64]) -> Vec<u64> {
        u.iter().map(|x| x.to_bits()).collect()
    }

    #[test]
    fn fresh_state_round_trips() {
        let s = GraphState::from_fn(torus(16), |x| 0.8 * x.0[0].sin() * x.0[1].sin()).unwrap();
        let back = decode_state(&encode_state(&s)).unwrap();
        assert_eq!(bits(back.u()), bits(s.u()));
        assert_eq!(back.t().to_bits(), s.t().to_bits());
        assert_eq!(back.problem().grid(), s.problem().grid());
        assert_eq!(back.problem().warp(), s.problem().warp());
    }

    #[test]
    fn curve_round_trips() {
        let c = Scenario::from_key("steep-equidistant-graph").unwrap().initial_curve(2, 64).unwrap().with_time(0.125);
        let back = decode_curve(&encode_curve(&c)).unwrap();
        assert_eq!(back, c);
        let flat: Vec<u64> = c.nodes().iter().flatten().map(|x| x.to_bits()).collect();
        let again: Vec<u64> = back.nodes().iter().flatten().map(|x| x.to_bits()).collect();
        assert_eq!(flat, again);
    }

    #[test]
    fn damaged_files_rejected() {
        let s = GraphState::from_fn(torus(16), |x| x.0[0].cos()).unwrap();
        let bytes = encode_state(&s);
        let cut = &bytes[..bytes.len() - 7];
        assert!(matches!(decode_state(cut), Err(SnapshotError::Length { .. })));
        let mut flipped = bytes.clone();
        let k = flipped.len() - 20;
        flipped[k] = if flipped[k] == b'1' { b'2' } else { b'1' };
        assert!(matches!(decode_state(&flipped), Err(SnapshotError::Checksum)));
        let text = String::from_utf8(bytes.clone()).unwrap().replacen("\"version\":1", "\"version\":2", 1);
        assert!(matches!(decode_state(text.as_bytes()), Err(SnapshotError::Version { found: 2, expected: 1 })));
        assert!(matches!(decode_curve(&bytes), Err(SnapshotError::Kind { .. })));
        assert!(matches!(decode_state(b"garbage"), Err(SnapshotError::NotASnapshot(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn arbitrary_heights_round_trip(raw in proptest::collection::vec(any::<u64>(), 256), t_bits in any::<u64>()) {
            // any finite double, subnormals and signed zeros included
            let u: Vec<f64> = raw.iter().map(|&b| f64::from_bits(b)).map(|x| if x.is_finite() { x } else { 0.0 }).collect();
            let t = f64::from_bits(t_bits);
            let t = if t.is_finite() { t.abs() } else { 1.0 };
            let s = GraphState::new(torus(16), u.clone(), t).unwrap();
            let back = decode_state(&encode_state(&s)).unwrap();
            prop_assert_eq!(bits(back.u()), bits(&u));
            prop_assert_eq!(back.t().to_bits(), t.to_bits());
        }
    }
}
