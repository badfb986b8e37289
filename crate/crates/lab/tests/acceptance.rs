//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any
//! criterion fails. Tolerances are pinned here and nowhere else.

use std::process::ExitCode;
use std::time::Instant;

use enclosure_core::geometry::{omega_c, support_function};
use enclosure_core::indicator::{enclosure_from_support, indicator, SupportRecord, Trend};
use enclosure_core::oracle::volume_indicator;
use enclosure_core::solver::solve_forward;
use enclosure_core::{Dim, Grid, ProbeField, SpatialDomain};
use enclosure_lab::commands::{self, EstimateReport, RunOptions};
use enclosure_lab::io;
use enclosure_lab::oracle::{band_check, kd_check, limit_errors, moments_check, segments_check};
use enclosure_lab::Scenario;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const REFERENCE: &str = include_str!("../scenarios/reference_1d.toml");
const ENCLOSURE: &str = include_str!("../scenarios/enclosure_1d.toml");

const T0_TRUE: f64 = 0.25;
const T0_TOL: f64 = 0.03;
const T0_AGREE: f64 = 0.01;
const T0_SECONDS: f64 = 60.0;
const H_TOL: f64 = 0.05;
const ENCLOSURE_FRACTION: f64 = 0.95;
const VOLUME_GAP: f64 = 0.05;
const VOLUME_ORDER: f64 = 1.5;
const KD_REL: f64 = 1e-6;
const KD_SECONDS: f64 = 10.0;
const LIMIT_REL: f64 = 0.02;
const SEGMENT_REL: f64 = 1e-9;
const MOMENT_REL: f64 = 1e-8;
const PDE_REL: f64 = 1e-4;
const RADIAL_RATIO: (f64, f64) = (0.4, 0.6);
const SHIFT_TOL: f64 = 1e-9;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome, String> {
    Ok(Outcome { passed, detail })
}

type Check = Result<Outcome, String>;

fn list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.2e}")).collect();
    format!("[{}]", parts.join(", "))
}

/// Reference pipeline artifacts shared by criteria 1, 2, 11 and 12.
struct Reference {
    scenario: Scenario,
    report: EstimateReport,
    rows: Vec<io::SweepRow>,
    seconds: f64,
}

fn reference(dir: &std::path::Path) -> Result<Reference, String> {
    let start = Instant::now();
    let scenario = Scenario::from_toml(REFERENCE).map_err(|e| e.to_string())?;
    let opts = RunOptions::new(dir);
    let (data, _) = commands::simulate(&scenario, &opts).map_err(|e| e.to_string())?;
    commands::sweep(&scenario, &data, &opts).map_err(|e| e.to_string())?;
    // estimate from the artifact on disk, as the CLI does
    let rows = io::read_sweep(&opts.path(io::SWEEP_FILE)).map_err(|e| e.to_string())?;
    let report = commands::estimate(&scenario, &rows, &opts).map_err(|e| e.to_string())?;
    Ok(Reference { scenario, report, rows, seconds: start.elapsed().as_secs_f64() })
}

fn c1_onset(r: &Reference) -> Check {
    let onset = r.report.onset.as_ref().ok_or("no onset report")?;
    let plus = onset.entries.iter().find(|e| e.omega[0] > 0.0).ok_or("no ω = +1 entry")?.t0;
    let minus = onset.entries.iter().find(|e| e.omega[0] < 0.0).ok_or("no ω = −1 entry")?.t0;
    let ok = (plus - T0_TRUE).abs() <= T0_TOL && (plus - minus).abs() <= T0_AGREE && r.seconds <= T0_SECONDS;
    outcome(
        ok,
        format!("t0(+1) = {plus:.4}, t0(−1) = {minus:.4}, |Δ| = {:.1e}, pipeline {:.2} s", (plus - minus).abs(), r.seconds),
    )
}

fn c2_dichotomy(r: &Reference) -> Check {
    let d = r.report.dichotomy.iter().find(|d| d.omega[0] > 0.0).ok_or("no dichotomy report")?;
    let want = [(0.1, Trend::Decaying), (0.15, Trend::Decaying), (0.35, Trend::Growing), (0.4, Trend::Growing)];
    let mut ok = true;
    let mut seen = Vec::new();
    for (s, t) in want {
        let e = d.report.entries.iter().find(|e| e.s == s).ok_or(format!("no entry at s = {s}"))?;
        ok &= e.trend == t;
        seen.push(format!("{s}:{:?}", e.trend));
    }
    let bracket = d.report.bracket;
    ok &= bracket.is_some_and(|[lo, hi]| lo <= T0_TRUE && T0_TRUE <= hi);
    outcome(ok, format!("{}; bracket {bracket:?}", seen.join(" ")))
}

fn enclosure_report(dir: &std::path::Path) -> Result<(Scenario, EstimateReport), String> {
    let scenario = Scenario::from_toml(ENCLOSURE).map_err(|e| e.to_string())?;
    let opts = RunOptions::new(dir);
    let (data, _) = commands::simulate(&scenario, &opts).map_err(|e| e.to_string())?;
    let rows = commands::sweep(&scenario, &data, &opts).map_err(|e| e.to_string())?;
    let report = commands::estimate(&scenario, &rows, &opts).map_err(|e| e.to_string())?;
    Ok((scenario, report))
}

fn c3_support(sc: &Scenario, rep: &EstimateReport) -> Check {
    let enc = rep.enclosure.as_ref().ok_or("no enclosure")?;
    let mut ok = true;
    let mut parts = Vec::new();
    for r in enc.records.iter().filter(|r| r.c == 1.0) {
        let exact = support_function(&sc.spec, &omega_c(Dim::One, r.omega, r.c).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let h = r.h_estimate.ok_or("missing estimate")?;
        let margin = r.condition_margin.ok_or("missing margin")?;
        ok &= !r.rejected && (h - exact).abs() <= H_TOL && margin > 0.0;
        parts.push(format!("ω = {:+}: h = {h:.4} vs {exact:.4}, margin {margin:.3}", r.omega[0]));
    }
    ok &= parts.len() == 2;
    outcome(ok, parts.join("; "))
}

/// `D = [0.4, 0.6] × [0.25, 1]` rasterized on a 21 × 76 lattice.
fn raster() -> Vec<[f64; 2]> {
    let mut pts = Vec::new();
    for i in 0..=20 {
        for j in 0..=75 {
            pts.push([0.4 + 0.01 * i as f64, 0.25 + 0.01 * j as f64]);
        }
    }
    pts
}

fn c4_enclosure(sc: &Scenario, rep: &EstimateReport) -> Check {
    let enc = rep.enclosure.as_ref().ok_or("no enclosure")?;
    let pts = raster();
    let frac = |p: &enclosure_core::SpaceTimePolytope| pts.iter().filter(|x| p.contains(&x[..])).count() as f64 / pts.len() as f64;
    let est = frac(&enc.polytope);
    let exact_records: Vec<SupportRecord> = enc
        .records
        .iter()
        .map(|r| {
            let h = support_function(&sc.spec, &omega_c(Dim::One, r.omega, r.c).unwrap()).unwrap();
            SupportRecord { h_estimate: Some(h), fit: None, rejected: false, reason: None, ..r.clone() }
        })
        .collect();
    let exact = enclosure_from_support(Dim::One, exact_records, &sc.clip().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let ex = frac(&exact.polytope);
    let used = enc.records.iter().filter(|r| !r.rejected).count();
    outcome(
        est >= ENCLOSURE_FRACTION && ex == 1.0,
        format!("estimated polytope holds {:.1}% ({used}/{} directions kept), exact-h {:.1}%", 100.0 * est, enc.records.len(), 100.0 * ex),
    )
}

/// Relative boundary-vs-volume gaps at each `τ` on a `cells × n_t` grid.
fn volume_gaps(cells: usize, n_t: usize, taus: &[f64]) -> Result<Vec<f64>, String> {
    let sc = Scenario::from_toml(REFERENCE).map_err(|e| e.to_string())?;
    let dom = SpatialDomain::interval(0.0, 1.0).map_err(|e| e.to_string())?;
    let grid = Grid::new(&dom, [cells, 0], n_t, 1.0).map_err(|e| e.to_string())?;
    let (data, snap) = solve_forward(&dom, &sc.spec, &grid, sc.config.domain.bc).map_err(|e| e.to_string())?;
    taus.iter()
        .map(|&tau| {
            let probe = ProbeField::real(Dim::One, [1.0, 0.0], tau).map_err(|e| e.to_string())?;
            let b = indicator(&data, &probe, 0.0).map_err(|e| e.to_string())?;
            let v = volume_indicator(&sc.spec, &snap, &probe, 0.0).map_err(|e| e.to_string())?;
            Ok((b.value().div(v.value()).to_complex() - 1.0).norm())
        })
        .collect()
}

fn c5_volume() -> Check {
    let taus = [20.0, 40.0, 80.0];
    let coarse = volume_gaps(400, 4000, &taus)?;
    let fine = volume_gaps(800, 8000, &taus)?;
    let orders: Vec<f64> = coarse.iter().zip(&fine).map(|(c, f)| (c / f).log2()).collect();
    let ok = coarse.iter().all(|&g| g <= VOLUME_GAP) && orders.iter().all(|&p| p >= VOLUME_ORDER);
    outcome(ok, format!("gaps at 400×4000 {}, at 800×8000 {}, observed orders {orders:.2?}", list(&coarse), list(&fine)))
}

fn c6_kd() -> Check {
    let start = Instant::now();
    let rep = kd_check(50, 2024, KD_REL).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    outcome(rep.passed && secs <= KD_SECONDS, format!("{} cones, max rel {:.2e}, {}, {secs:.2} s", rep.cases, rep.max_error, rep.detail))
}

fn c7_limit() -> Check {
    let errs = limit_errors(&[50.0, 100.0, 200.0, 400.0]).map_err(|e| e.to_string())?;
    let monotone = errs.windows(2).all(|w| w[1] < w[0]);
    let last = errs[errs.len() - 1];
    outcome(monotone && last <= LIMIT_REL, format!("errors at τ = 50, 100, 200, 400: {}", list(&errs)))
}

fn c8_segments() -> Check {
    let rep = segments_check(100, 2024, SEGMENT_REL).map_err(|e| e.to_string())?;
    outcome(rep.passed, format!("{} segments, max rel {:.2e}", rep.cases, rep.max_error))
}

fn c9_moments() -> Check {
    let rep = moments_check(MOMENT_REL).map_err(|e| e.to_string())?;
    outcome(rep.passed, format!("{} cases, max rel {:.2e}", rep.cases, rep.max_error))
}

fn c10_pde() -> Check {
    let line = SpatialDomain::interval(0.0, 1.0).map_err(|e| e.to_string())?;
    let square = SpatialDomain::rectangle([0.0, 1.0], [0.0, 1.0]).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let pts: Vec<([f64; 2], f64)> =
        (0..1000).map(|_| ([rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)], rng.random_range(0.0..1.0))).collect();
    let e = |r: enclosure_core::Result<ProbeField>| r.map_err(|e| e.to_string());
    let mut worst: f64 = 0.0;
    let mut kinds = 0;
    for tau in [10.0, 100.0, 1000.0] {
        let probes = [
            e(ProbeField::real(Dim::One, [1.0, 0.0], tau))?,
            e(ProbeField::real(Dim::Two, [0.6, 0.8], tau))?,
            e(ProbeField::complex1d(1.0, tau))?,
            e(ProbeField::complex1d(-1.0, tau))?,
            e(ProbeField::complex2d([0.6, 0.8], None, 1.0, tau))?,
            e(ProbeField::radial(&line, [-0.5, 0.0], true, tau))?,
            e(ProbeField::radial(&line, [1.5, 0.0], false, tau))?,
        ];
        kinds = probes.len();
        for p in &probes {
            for &(x, t) in &pts {
                let x = if p.dim() == Dim::One { [x[0], 0.0] } else { x };
                worst = worst.max(p.pde_residual(x, t));
            }
        }
    }
    let mean = |tau: f64| -> Result<f64, String> {
        let p = e(ProbeField::radial(&square, [-0.5, 0.5], true, tau))?;
        Ok(pts.iter().map(|&(x, t)| p.pde_residual(x, t)).sum::<f64>() / pts.len() as f64)
    };
    let ratio = mean(400.0)? / mean(100.0)?;
    outcome(
        worst <= PDE_REL && (RADIAL_RATIO.0..=RADIAL_RATIO.1).contains(&ratio),
        format!("{kinds} exact probes × 3 τ × 1000 points: max rel residual {worst:.2e}; radial 2D ratio τ=400/τ=100 {ratio:.3}"),
    )
}

fn c11_shift(r: &Reference) -> Check {
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for row in &r.rows {
        let base = r
            .rows
            .iter()
            .find(|b| b.probe_id == row.probe_id && b.tau == row.tau && b.s == 0.0)
            .ok_or(format!("no s = 0 row for {} at τ = {}", row.probe_id, row.tau))?;
        worst = worst.max((row.log_abs - base.log_abs - row.tau * row.s).abs());
        n += 1;
    }
    outcome(worst <= SHIFT_TOL, format!("{n} rows, max |log|I(s)| − log|I(0)| − τs| = {worst:.1e}"))
}

fn c12_band(r: &Reference) -> Check {
    let rep = band_check(&r.scenario).map_err(|e| e.to_string())?;
    outcome(rep.passed && r.scenario.spec.measure_exponent() == 0.0, format!("{} τ values, {}", rep.cases, rep.detail))
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("temp dir");
    let reference = reference(&dir.path().join("reference"));
    let enclosure = enclosure_report(&dir.path().join("enclosure"));
    let with_ref = |f: fn(&Reference) -> Check| reference.as_ref().map_err(|e| e.clone()).and_then(f);
    let with_enc = |f: fn(&Scenario, &EstimateReport) -> Check| {
        enclosure.as_ref().map_err(|e| e.clone()).and_then(|(s, r)| f(s, r))
    };

    let results: Vec<(&str, Check)> = vec![
        ("onset recovery", with_ref(c1_onset)),
        ("dichotomy", with_ref(c2_dichotomy)),
        ("support recovery", with_enc(c3_support)),
        ("enclosure soundness", with_enc(c4_enclosure)),
        ("volume identity", c5_volume()),
        ("K_D cross-check", c6_kd()),
        ("cone limit", c7_limit()),
        ("segment formulas", c8_segments()),
        ("moment formula", c9_moments()),
        ("probe PDE residuals", c10_pde()),
        ("shift law", with_ref(c11_shift)),
        ("onset band", with_ref(c12_band)),
    ];

    let mut failed = 0;
    for (k, (name, res)) in results.iter().enumerate() {
        let (tag, detail) = match res {
            Ok(o) if o.passed => ("PASS", o.detail.clone()),
            Ok(o) => ("FAIL", o.detail.clone()),
            Err(e) => ("FAIL", format!("error: {e}")),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("[{tag}] {:>2} {name}: {detail}", k + 1);
    }
    println!("acceptance: {}/{} passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
