//! Artifact formats. Every CSV starts with `#` lines carrying the tool
//! version and the config hash; JSON reports wrap their payload in an
//! [`Envelope`] with the same fields.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use enclosure_core::{BoundaryData, BoundaryNode, FieldSnapshot, IndicatorSample, ProbeKind, VERSION};
use serde::{Deserialize, Serialize};

use crate::config::Scenario;
use crate::error::{LabError, LabResult};

pub const BOUNDARY_FILE: &str = "boundary.csv";
pub const SNAPSHOT_FILE: &str = "snapshot.csv";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const ESTIMATE_FILE: &str = "estimate.json";
pub const ORACLE_FILE: &str = "oracle.json";

fn create(path: &Path) -> LabResult<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| LabError::io(path, e))
}

fn header<W: Write>(w: &mut W, hash: &str) -> std::io::Result<()> {
    writeln!(w, "# enclosure-lab {VERSION}")?;
    writeln!(w, "# config_sha256 {hash}")
}

/// Config hash recorded in an artifact's header, if any.
pub fn read_hash(path: &Path) -> LabResult<Option<String>> {
    let f = File::open(path).map_err(|e| LabError::io(path, e))?;
    for line in BufReader::new(f).lines() {
        let line = line.map_err(|e| LabError::io(path, e))?;
        let Some(rest) = line.strip_prefix('#') else { break };
        if let Some(h) = rest.trim().strip_prefix("config_sha256 ") {
            return Ok(Some(h.trim().to_string()));
        }
    }
    Ok(None)
}

fn write_csv<T: Serialize>(path: &Path, hash: &str, rows: impl IntoIterator<Item = T>) -> LabResult<()> {
    let mut w = create(path)?;
    header(&mut w, hash).map_err(|e| LabError::io(path, e))?;
    let mut cw = csv::Writer::from_writer(w);
    for r in rows {
        cw.serialize(r).map_err(|e| LabError::format(&path.display().to_string(), e))?;
    }
    cw.flush().map_err(|e| LabError::io(path, e))
}

fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> LabResult<Vec<T>> {
    let f = File::open(path).map_err(|e| LabError::io(path, e))?;
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(BufReader::new(f));
    r.deserialize().collect::<Result<Vec<T>, _>>().map_err(|e| LabError::format(&path.display().to_string(), e))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRow {
    pub node: usize,
    pub x: f64,
    pub y: f64,
    pub nx: f64,
    pub ny: f64,
    pub weight: f64,
    pub k: usize,
    pub t: f64,
    pub u: f64,
    pub dudn: f64,
}

/// `(N_t + 1) × nodes` rows, node-major.
pub fn write_boundary(path: &Path, hash: &str, data: &BoundaryData) -> LabResult<()> {
    let times = data.times();
    let rows = data.nodes().iter().enumerate().flat_map(|(b, n)| {
        let (u, q) = (data.dirichlet(b), data.neumann(b));
        times.iter().enumerate().map(move |(k, &t)| BoundaryRow {
            node: b,
            x: n.x[0],
            y: n.x[1],
            nx: n.normal[0],
            ny: n.normal[1],
            weight: n.weight,
            k,
            t,
            u: u[k],
            dudn: q[k],
        })
    });
    write_csv(path, hash, rows)
}

pub fn read_boundary(path: &Path, scenario: &Scenario) -> LabResult<BoundaryData> {
    let rows: Vec<BoundaryRow> = read_csv(path)?;
    let what = path.display().to_string();
    let n_nodes = rows.iter().map(|r| r.node + 1).max().unwrap_or(0);
    if n_nodes == 0 || rows.len() % n_nodes != 0 {
        return Err(LabError::format(&what, "rows do not form whole node traces"));
    }
    let nt = rows.len() / n_nodes;
    let mut nodes = Vec::with_capacity(n_nodes);
    let mut times = Vec::with_capacity(nt);
    let mut dirichlet = Vec::with_capacity(rows.len());
    let mut neumann = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        let (b, k) = (i / nt, i % nt);
        if r.node != b || r.k != k {
            return Err(LabError::format(&what, format!("row {i} is out of node-major order")));
        }
        if k == 0 {
            nodes.push(BoundaryNode { x: [r.x, r.y], normal: [r.nx, r.ny], weight: r.weight });
        }
        if b == 0 {
            times.push(r.t);
        } else if times[k] != r.t {
            return Err(LabError::format(&what, format!("node {b} has a different time grid")));
        }
        dirichlet.push(r.u);
        neumann.push(r.dudn);
    }
    Ok(BoundaryData::new(scenario.dim(), nodes, times, dirichlet, neumann, scenario.config.domain.bc)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct SnapshotRow {
    x: f64,
    y: f64,
    weight: f64,
    u: f64,
}

/// Final-time field, one row per grid node (plot-ready).
pub fn write_snapshot(path: &Path, hash: &str, snap: &FieldSnapshot) -> LabResult<()> {
    write_csv(path, hash, snap.nodes().map(|(x, weight, u)| SnapshotRow { x: x[0], y: x[1], weight, u }))
}

/// One `(probe, τ, s)` evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub probe_id: String,
    pub kind: ProbeKind,
    pub omega_x: f64,
    pub omega_y: f64,
    pub c: f64,
    pub tau: f64,
    pub s: f64,
    pub log_abs: f64,
    pub phase: f64,
    pub floor_hit: bool,
    pub log_cancellation: f64,
}

impl SweepRow {
    pub fn sample(&self) -> IndicatorSample {
        IndicatorSample {
            tau: self.tau,
            s: self.s,
            log_abs: self.log_abs,
            phase: self.phase,
            floor_hit: self.floor_hit,
            log_cancellation: self.log_cancellation,
        }
    }
}

pub fn write_sweep(path: &Path, hash: &str, rows: &[SweepRow]) -> LabResult<()> {
    write_csv(path, hash, rows)
}

pub fn read_sweep(path: &Path) -> LabResult<Vec<SweepRow>> {
    read_csv(path)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub tool: String,
    pub version: String,
    pub config_sha256: String,
    pub report: T,
}

pub fn write_json<T: Serialize>(path: &Path, hash: &str, report: &T) -> LabResult<()> {
    let env = Envelope { tool: "enclosure-lab".into(), version: VERSION.into(), config_sha256: hash.into(), report };
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, &env).map_err(|e| LabError::format(&path.display().to_string(), e))?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| LabError::io(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> LabResult<Envelope<T>> {
    let f = File::open(path).map_err(|e| LabError::io(path, e))?;
    serde_json::from_reader(BufReader::new(f)).map_err(|e| LabError::format(&path.display().to_string(), e))
}
