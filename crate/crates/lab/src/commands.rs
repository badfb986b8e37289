use std::path::{Path, PathBuf};

use enclosure_core::geometry::{condition_margin, support_function, Point};
use enclosure_core::indicator::{
    classify_trend, dichotomy_report, enclosure_from_support, indicator, support_from_samples, support_record,
    t0_from_samples, DichotomyReport, EnclosureResult, SupportOptions, SupportRecord,
};
use enclosure_core::solver::solve_forward;
use enclosure_core::{BoundaryData, FieldSnapshot, IndicatorSample, SlopeFit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ProbeInstance, Scenario};
use crate::error::{LabError, LabResult};
use crate::io::{self, SweepRow};
use crate::oracle::{run_oracle, OracleReport};

/// Where artifacts go and how many sweep workers run.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out: PathBuf,
    /// Worker threads for the sweep; 0 lets rayon decide.
    pub jobs: usize,
}

impl RunOptions {
    pub fn new(out: impl Into<PathBuf>) -> Self {
        Self { out: out.into(), jobs: 0 }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

/// Forward solve, the optional noise hook, then `boundary.csv` (and
/// `snapshot.csv` when enabled).
pub fn simulate(sc: &Scenario, opts: &RunOptions) -> LabResult<(BoundaryData, FieldSnapshot)> {
    let (mut data, snap) = solve_forward(&sc.domain, &sc.spec, &sc.grid, sc.config.domain.bc)?;
    add_noise(&mut data, sc.config.noise.sigma, sc.config.seed)?;
    io::write_boundary(&opts.path(io::BOUNDARY_FILE), &sc.hash, &data)?;
    if sc.config.output.snapshot {
        io::write_snapshot(&opts.path(io::SNAPSHOT_FILE), &sc.hash, &snap)?;
    }
    Ok((data, snap))
}

/// Gaussian noise of standard deviation `σ · max|trace|` on every trace
/// value past `t = 0`, drawn from ChaCha8 seeded with `seed`.
pub fn add_noise(data: &mut BoundaryData, sigma: f64, seed: u64) -> LabResult<()> {
    if sigma == 0.0 {
        return Ok(());
    }
    let stride = data.n_t() + 1;
    let scale_u = sigma * data.max_abs_dirichlet();
    let (u, q) = data.traces_mut();
    let scale_q = sigma * q.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (trace, scale) in [(u, scale_u), (q, scale_q)] {
        if scale == 0.0 {
            continue;
        }
        let normal = Normal::new(0.0, scale).map_err(|e| LabError::Config(format!("noise: {e}")))?;
        for (i, v) in trace.iter_mut().enumerate() {
            if i % stride != 0 {
                *v += rng.sample(normal);
            }
        }
    }
    Ok(())
}

/// One row per `(instance, τ, s)` in configuration order; the `s` grid is
/// applied to a single `s = 0` evaluation through the exact shift.
pub fn sweep(sc: &Scenario, data: &BoundaryData, opts: &RunOptions) -> LabResult<Vec<SweepRow>> {
    let jobs: Vec<(&ProbeInstance, f64)> = sc.instances.iter().flat_map(|i| i.taus.iter().map(move |&t| (i, t))).collect();
    let eval = |&(inst, tau): &(&ProbeInstance, f64)| -> LabResult<Vec<SweepRow>> {
        let probe = inst.probe(&sc.domain, tau)?;
        let base = indicator(data, &probe, 0.0)?;
        Ok(inst.s.iter().map(|&s| row(inst, &base.shifted(s))).collect())
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| LabError::Config(format!("thread pool: {e}")))?;
    let chunks: Vec<Vec<SweepRow>> = pool.install(|| jobs.par_iter().map(eval).collect::<LabResult<_>>())?;
    let rows: Vec<SweepRow> = chunks.into_iter().flatten().collect();
    io::write_sweep(&opts.path(io::SWEEP_FILE), &sc.hash, &rows)?;
    Ok(rows)
}

fn row(inst: &ProbeInstance, s: &IndicatorSample) -> SweepRow {
    SweepRow {
        probe_id: inst.id.clone(),
        kind: inst.kind,
        omega_x: inst.omega[0],
        omega_y: inst.omega[1],
        c: inst.c,
        tau: s.tau,
        s: s.s,
        log_abs: s.log_abs,
        phase: s.phase,
        floor_hit: s.floor_hit,
        log_cancellation: s.log_cancellation,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnsetEntry {
    pub probe_id: String,
    pub omega: Point,
    pub t0: f64,
    pub fit: SlopeFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnsetReport {
    /// Estimate of the first instance.
    pub t0: f64,
    /// Largest disagreement between instances.
    pub spread: f64,
    pub entries: Vec<OnsetEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyEntryReport {
    pub probe_id: String,
    pub omega: Point,
    pub report: DichotomyReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub onset: Option<OnsetReport>,
    pub dichotomy: Vec<DichotomyEntryReport>,
    pub enclosure: Option<EnclosureResult>,
    /// Support values were injected from the configured source.
    pub exact_h: bool,
    /// Exact `h_D` per support record, for comparison.
    pub h_exact: Vec<f64>,
}

/// Samples of one instance at one `s`, sorted by `τ`, after checking that
/// every configured `τ` is present.
fn instance_samples(rows: &[SweepRow], inst: &ProbeInstance, s: f64) -> LabResult<Vec<IndicatorSample>> {
    let mine: Vec<&SweepRow> = rows.iter().filter(|r| r.probe_id == inst.id).collect();
    let mut out = Vec::with_capacity(inst.taus.len());
    for &tau in &inst.taus {
        let hit = mine.iter().find(|r| (r.tau - tau).abs() <= 1e-12 * tau);
        let Some(r) = hit else {
            return Err(LabError::Config(format!(
                "sweep has no rows for probe {} at τ = {tau}; rerun the sweep with this config",
                inst.id
            )));
        };
        out.push(r.sample().shifted(s));
    }
    Ok(out)
}

/// Onset, dichotomy and enclosure from sweep rows; writes `estimate.json`.
/// Gate failures are reported after the file is written.
pub fn estimate(sc: &Scenario, rows: &[SweepRow], opts: &RunOptions) -> LabResult<EstimateReport> {
    let est = &sc.config.estimators;
    let onset = match &est.t0 {
        Some(set) => {
            let mut entries = Vec::new();
            for inst in sc.set_instances(set) {
                let (t0, fit) = t0_from_samples(&instance_samples(rows, inst, 0.0)?, est.t0_model)?;
                entries.push(OnsetEntry { probe_id: inst.id.clone(), omega: inst.omega, t0, fit });
            }
            let lo = entries.iter().map(|e| e.t0).fold(f64::INFINITY, f64::min);
            let hi = entries.iter().map(|e| e.t0).fold(f64::NEG_INFINITY, f64::max);
            entries.first().map(|e| OnsetReport { t0: e.t0, spread: hi - lo, entries: entries.clone() })
        }
        None => None,
    };

    let mut dichotomy = Vec::new();
    if let Some(set) = &est.dichotomy {
        for inst in sc.set_instances(set) {
            let mut entries = Vec::new();
            for &s in &inst.s {
                entries.push(classify_trend(s, &instance_samples(rows, inst, s)?));
            }
            dichotomy.push(DichotomyEntryReport { probe_id: inst.id.clone(), omega: inst.omega, report: dichotomy_report(entries) });
        }
    }

    let mut h_exact = Vec::new();
    let mut enclosure = None;
    let mut gate_failure = None;
    if let Some(set) = &est.support {
        let sopts = SupportOptions {
            model: est.support_model,
            max_log_cancellation: est.max_log_cancellation,
            residual_gate: est.residual_gate,
        };
        let mut records = Vec::new();
        for inst in sc.set_instances(set) {
            let dir = sc.direction(inst)?;
            let exact = if sc.spec.is_empty() { f64::NAN } else { support_function(&sc.spec, &dir)? };
            h_exact.push(exact);
            let margin = condition_margin(&sc.domain, sc.config.domain.final_time, &sc.spec, &dir).ok();
            let rec = if est.exact_h {
                SupportRecord {
                    omega: inst.omega,
                    c: inst.c,
                    h_estimate: Some(exact),
                    fit: None,
                    condition_margin: margin,
                    rejected: !exact.is_finite(),
                    reason: None,
                }
            } else {
                let samples = instance_samples(rows, inst, 0.0)?;
                support_record(inst.omega, inst.c, support_from_samples(&samples, &dir, &sopts), est.residual_gate, margin)
            };
            records.push(rec);
        }
        if !records.is_empty() && records.iter().all(|r| r.rejected) {
            gate_failure = Some(format!("all {} support directions rejected (residual gate {})", records.len(), est.residual_gate));
        }
        let mut res = enclosure_from_support(sc.dim(), records, &sc.clip()?)?;
        if let Some(o) = &onset {
            res.t0_estimate = Some(o.t0);
            res.t0_fit = Some(o.entries[0].fit.clone());
        }
        enclosure = Some(res);
    }

    let report = EstimateReport { onset, dichotomy, enclosure, exact_h: est.exact_h, h_exact };
    io::write_json(&opts.path(io::ESTIMATE_FILE), &sc.hash, &report)?;
    match gate_failure {
        Some(msg) => Err(LabError::Gate(msg)),
        None => Ok(report),
    }
}

/// Oracle checks; writes `oracle.json` and fails with a tolerance breach
/// when any selected check fails.
pub fn oracle(sc: &Scenario, opts: &RunOptions) -> LabResult<OracleReport> {
    let report = run_oracle(sc)?;
    io::write_json(&opts.path(io::ORACLE_FILE), &sc.hash, &report)?;
    if report.all_passed {
        Ok(report)
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        Err(LabError::Tolerance(format!("oracle checks failed: {}", failed.join(", "))))
    }
}

/// simulate → sweep → estimate → oracle (the last only when checks are selected).
pub fn run_all(sc: &Scenario, opts: &RunOptions) -> LabResult<()> {
    let (data, _) = simulate(sc, opts)?;
    let rows = sweep(sc, &data, opts)?;
    estimate(sc, &rows, opts)?;
    if !sc.config.oracle.checks.is_empty() {
        oracle(sc, opts)?;
    }
    Ok(())
}

/// Reads an artifact, warning on stderr when it was produced by another config.
pub fn check_provenance(path: &Path, sc: &Scenario) -> LabResult<()> {
    if let Some(h) = io::read_hash(path)? {
        if h != sc.hash {
            eprintln!("warning: {} was produced with config {h}, current config is {}", path.display(), sc.hash);
        }
    }
    Ok(())
}
