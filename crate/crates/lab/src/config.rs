//! Scenario configuration: one TOML file, validated in full before any compute.

use std::collections::HashSet;
use std::path::Path;

use enclosure_core::geometry::{omega_c, ClipBox, Point};
use enclosure_core::indicator::{complex_tau_grid, oscillation_gate_steps, FitModel};
use enclosure_core::{
    BoundaryCondition, Density, Dim, Grid, Monomial, ProbeField, ProbeKind, Region, SourceComponent, SourceSpec,
    SpatialDomain,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{LabError, LabResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    /// Seed for the noise hook and the randomized oracle cases.
    #[serde(default)]
    pub seed: u64,
    pub domain: DomainConfig,
    #[serde(default)]
    pub source: SourceConfig,
    #[serde(default)]
    pub probes: Vec<ProbeSet>,
    #[serde(default)]
    pub estimators: EstimatorConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub noise: NoiseConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub dim: usize,
    /// `[lo, hi]` per axis.
    pub bounds: Vec<[f64; 2]>,
    /// Cells per axis.
    pub cells: Vec<usize>,
    pub n_t: usize,
    pub final_time: f64,
    #[serde(default)]
    pub bc: BoundaryCondition,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    /// `p` in `|D(s)| ≥ C sᵖ` near the onset.
    #[serde(default)]
    pub measure_exponent: f64,
    #[serde(default)]
    pub components: Vec<ComponentConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentConfig {
    pub region: RegionConfig,
    pub onset: f64,
    #[serde(default = "unit_density")]
    pub density: Vec<MonomialConfig>,
    /// Hölder exponent θ of the density in time.
    #[serde(default)]
    pub holder: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum RegionConfig {
    Interval([f64; 2]),
    Polygon(Vec<[f64; 2]>),
}

/// `coef · x^a y^b t^k` with `powers = [a, b, k]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialConfig {
    pub coef: f64,
    #[serde(default)]
    pub powers: [u32; 3],
}

fn unit_density() -> Vec<MonomialConfig> {
    vec![MonomialConfig { coef: 1.0, powers: [0, 0, 0] }]
}

/// A family of probes swept over a `τ` grid and an `s` grid. Every `ω`
/// (times every `c` for complex kinds, every pole for radial) is one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSet {
    pub id: String,
    pub kind: ProbeKind,
    #[serde(default)]
    pub omega: Vec<Vec<f64>>,
    #[serde(default)]
    pub c: Vec<f64>,
    #[serde(default)]
    pub omega_perp: Option<[f64; 2]>,
    #[serde(default)]
    pub poles: Vec<Vec<f64>>,
    #[serde(default = "yes")]
    pub plus: bool,
    pub tau: TauSpec,
    #[serde(default = "zero_s")]
    pub s: Vec<f64>,
}

fn yes() -> bool {
    true
}

fn zero_s() -> Vec<f64> {
    vec![0.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum TauSpec {
    /// `count` log-spaced points in `[lo, hi]`.
    Log { lo: f64, hi: f64, count: usize },
    Values { values: Vec<f64> },
    /// Complex kinds only: the gate-aware grid of `complex_tau_grid`.
    Auto {
        #[serde(default = "twelve")]
        count: usize,
        #[serde(default = "twenty")]
        lo: f64,
        #[serde(default = "fifty")]
        ceiling: f64,
    },
}

fn twelve() -> usize {
    12
}

fn twenty() -> f64 {
    20.0
}

fn fifty() -> f64 {
    50.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorConfig {
    /// Real probe set whose `s = 0` rows feed the onset fit.
    #[serde(default)]
    pub t0: Option<String>,
    #[serde(default = "real_model")]
    pub t0_model: FitModel,
    /// Real probe set classified over its whole `s` grid.
    #[serde(default)]
    pub dichotomy: Option<String>,
    /// Complex probe set feeding the support estimates.
    #[serde(default)]
    pub support: Option<String>,
    #[serde(default = "complex_model")]
    pub support_model: FitModel,
    #[serde(default = "residual_gate")]
    pub residual_gate: f64,
    #[serde(default = "max_log_cancellation")]
    pub max_log_cancellation: f64,
    /// Replace every support estimate with the exact `h_D` of the configured source.
    #[serde(default)]
    pub exact_h: bool,
}

fn real_model() -> FitModel {
    FitModel::Real
}

fn complex_model() -> FitModel {
    FitModel::Complex
}

fn residual_gate() -> f64 {
    0.15
}

fn max_log_cancellation() -> f64 {
    1e12f64.ln()
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            t0: None,
            t0_model: real_model(),
            dichotomy: None,
            support: None,
            support_model: complex_model(),
            residual_gate: residual_gate(),
            max_log_cancellation: max_log_cancellation(),
            exact_h: false,
        }
    }
}

pub const ORACLE_CHECKS: [&str; 6] = ["moments", "kd", "limit", "segments", "volume", "band"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    #[serde(default = "all_checks")]
    pub checks: Vec<String>,
    #[serde(default = "fifty_cases")]
    pub kd_cases: usize,
    #[serde(default = "hundred_cases")]
    pub segment_cases: usize,
    #[serde(default = "volume_taus")]
    pub volume_taus: Vec<f64>,
    /// Onset slab width for the band check; defaults to `T − T₀`.
    #[serde(default)]
    pub band_delta: Option<f64>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn all_checks() -> Vec<String> {
    ORACLE_CHECKS.iter().map(|s| s.to_string()).collect()
}

fn fifty_cases() -> usize {
    50
}

fn hundred_cases() -> usize {
    100
}

fn volume_taus() -> Vec<f64> {
    vec![20.0, 40.0, 80.0]
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            checks: all_checks(),
            kd_cases: fifty_cases(),
            segment_cases: hundred_cases(),
            volume_taus: volume_taus(),
            band_delta: None,
            tolerances: Tolerances::default(),
        }
    }
}

/// Relative tolerances of the oracle checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub moments: f64,
    pub kd: f64,
    pub limit: f64,
    pub segments: f64,
    pub volume: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { moments: 1e-8, kd: 1e-6, limit: 0.02, segments: 1e-9, volume: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "out_dir")]
    pub dir: String,
    #[serde(default = "yes")]
    pub snapshot: bool,
}

fn out_dir() -> String {
    "out".into()
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: out_dir(), snapshot: true }
    }
}

/// Additive Gaussian noise on the traces, `σ` relative to the largest
/// absolute trace value. Zero disables the hook.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    #[serde(default)]
    pub sigma: f64,
}

/// One concrete probe family member: fixed `ω`, `c` or pole, swept over `taus`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeInstance {
    pub set: String,
    pub id: String,
    pub kind: ProbeKind,
    pub omega: Point,
    pub omega_perp: Option<Point>,
    pub c: f64,
    pub pole: Point,
    pub plus: bool,
    pub taus: Vec<f64>,
    pub s: Vec<f64>,
}

impl ProbeInstance {
    pub fn probe(&self, domain: &SpatialDomain, tau: f64) -> enclosure_core::Result<ProbeField> {
        match self.kind {
            ProbeKind::Real => ProbeField::real(domain.dim(), self.omega, tau),
            ProbeKind::Complex2d => ProbeField::complex2d(self.omega, self.omega_perp, self.c, tau),
            // the sign of ω picks the face
            ProbeKind::Complex1d => ProbeField::complex1d(self.c * self.omega[0], tau),
            ProbeKind::Radial => ProbeField::radial(domain, self.pole, self.plus, tau),
        }
    }
}

/// A validated scenario with its derived objects.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub hash: String,
    pub domain: SpatialDomain,
    pub grid: Grid,
    pub spec: SourceSpec,
    pub instances: Vec<ProbeInstance>,
}

fn bad(msg: impl Into<String>) -> LabError {
    LabError::Config(msg.into())
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> LabResult<Self> {
        toml::from_str(text).map_err(|e| bad(e.to_string()))
    }

    pub fn load(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Self::from_toml(&text)
    }

    /// SHA-256 of the canonical JSON form; the output block is excluded so
    /// that relocating the artifacts does not change the hash.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = OutputConfig::default();
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn validate(self) -> LabResult<Scenario> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(bad(format!("schema_version {} is not supported (expected {SCHEMA_VERSION})", self.schema_version)));
        }
        let d = &self.domain;
        let dim = Dim::from_n(d.dim).map_err(|_| bad(format!("domain.dim must be 1 or 2, got {}", d.dim)))?;
        if d.bounds.len() != d.dim || d.cells.len() != d.dim {
            return Err(bad(format!("domain.bounds and domain.cells need {} entries each", d.dim)));
        }
        let domain = match dim {
            Dim::One => SpatialDomain::interval(d.bounds[0][0], d.bounds[0][1]),
            Dim::Two => SpatialDomain::rectangle(d.bounds[0], d.bounds[1]),
        }
        .map_err(|e| bad(format!("domain: {e}")))?;
        let cells = [d.cells[0], d.cells.get(1).copied().unwrap_or(0)];
        let grid = Grid::new(&domain, cells, d.n_t, d.final_time).map_err(|e| bad(format!("domain grid: {e}")))?;

        let spec = self.source_spec(dim)?;
        grid.check_resolves(&domain, &spec).map_err(|e| {
            bad(format!("resolution gate: {e}; raise domain.cells or enlarge the source regions"))
        })?;

        let instances = self.instances(&domain)?;
        self.check_estimators(&instances)?;
        self.check_oracle()?;
        if !(self.noise.sigma >= 0.0) || !self.noise.sigma.is_finite() {
            return Err(bad(format!("noise.sigma must be finite and non-negative, got {}", self.noise.sigma)));
        }
        let hash = self.hash();
        Ok(Scenario { config: self, hash, domain, grid, spec, instances })
    }

    fn source_spec(&self, dim: Dim) -> LabResult<SourceSpec> {
        let mut comps = Vec::new();
        for (k, c) in self.source.components.iter().enumerate() {
            let region = match (&c.region, dim) {
                (RegionConfig::Interval([lo, hi]), Dim::One) => Region::interval(*lo, *hi),
                (RegionConfig::Polygon(v), Dim::Two) => Region::polygon(v.clone()),
                _ => return Err(bad(format!("source component {k}: region kind does not match domain.dim"))),
            };
            let density = Density::new(c.density.iter().map(|m| Monomial::new(m.coef, m.powers)).collect());
            let mut comp = SourceComponent::new(region, c.onset, density).map_err(|e| bad(format!("source component {k}: {e}")))?;
            if let Some(theta) = c.holder {
                comp = comp.with_holder_exponent(theta).map_err(|e| bad(format!("source component {k}: {e}")))?;
            }
            comps.push(comp);
        }
        SourceSpec::new(dim, comps, self.domain.final_time, self.source.measure_exponent).map_err(|e| bad(format!("source: {e}")))
    }

    fn instances(&self, domain: &SpatialDomain) -> LabResult<Vec<ProbeInstance>> {
        let dim = domain.dim();
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for set in &self.probes {
            let ctx = |msg: String| bad(format!("probe set '{}': {msg}", set.id));
            if set.id.is_empty() || set.id.contains([',', ':', '"']) || !seen.insert(set.id.clone()) {
                return Err(ctx("ids must be unique, nonempty and free of ',', ':' and '\"'".into()));
            }
            if set.s.is_empty() || set.s.iter().any(|s| !s.is_finite()) {
                return Err(ctx("s grid must be nonempty and finite".into()));
            }
            let complex = matches!(set.kind, ProbeKind::Complex1d | ProbeKind::Complex2d);
            let omegas: Vec<Point> = if set.kind == ProbeKind::Radial {
                vec![[0.0; 2]]
            } else {
                if set.omega.is_empty() {
                    return Err(ctx("needs at least one omega".into()));
                }
                set.omega.iter().map(|w| to_point(w, dim.n()).map_err(&ctx)).collect::<LabResult<_>>()?
            };
            let speeds: Vec<f64> = if complex {
                if set.c.is_empty() || set.c.iter().any(|&c| !(c > 0.0) || !c.is_finite()) {
                    return Err(ctx("complex probes need positive speeds c; the sign of omega picks the face".into()));
                }
                set.c.clone()
            } else {
                vec![0.0]
            };
            let poles: Vec<Point> = if set.kind == ProbeKind::Radial {
                if set.poles.is_empty() {
                    return Err(ctx("radial probes need at least one pole".into()));
                }
                set.poles.iter().map(|p| to_point(p, dim.n()).map_err(&ctx)).collect::<LabResult<_>>()?
            } else {
                vec![[0.0; 2]]
            };
            match (set.kind, dim) {
                (ProbeKind::Complex1d, Dim::Two) | (ProbeKind::Complex2d, Dim::One) => {
                    return Err(ctx(format!("kind {:?} does not match domain.dim", set.kind)));
                }
                _ => {}
            }
            for &omega in &omegas {
                for &c in &speeds {
                    for &pole in &poles {
                        let taus = self.tau_grid(set, dim, c).map_err(&ctx)?;
                        let inst = ProbeInstance {
                            set: set.id.clone(),
                            id: format!("{}:{}", set.id, out.iter().filter(|i: &&ProbeInstance| i.set == set.id).count()),
                            kind: set.kind,
                            omega,
                            omega_perp: set.omega_perp,
                            c,
                            pole,
                            plus: set.plus,
                            taus,
                            s: set.s.clone(),
                        };
                        for &tau in &inst.taus {
                            inst.probe(domain, tau).map_err(|e| ctx(format!("τ = {tau}: {e}")))?;
                            if set.kind == ProbeKind::Complex1d {
                                let required = oscillation_gate_steps(c, tau, self.domain.final_time);
                                if self.domain.n_t < required {
                                    return Err(ctx(format!(
                                        "oscillation gate: c = {c}, τ = {tau} needs N_t ≥ {required} (have {}); raise domain.n_t or lower τ",
                                        self.domain.n_t
                                    )));
                                }
                            }
                        }
                        out.push(inst);
                    }
                }
            }
        }
        Ok(out)
    }

    fn tau_grid(&self, set: &ProbeSet, dim: Dim, c: f64) -> Result<Vec<f64>, String> {
        let mut taus = match &set.tau {
            TauSpec::Log { lo, hi, count } => {
                if !(*lo > 0.0 && hi > lo) || *count < 2 {
                    return Err("log τ grid needs 0 < lo < hi and count ≥ 2".into());
                }
                (0..*count).map(|k| lo * (hi / lo).powf(k as f64 / (*count - 1) as f64)).collect()
            }
            TauSpec::Values { values } => {
                if values.is_empty() || values.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
                    return Err("τ values must be positive and finite".into());
                }
                values.clone()
            }
            TauSpec::Auto { count, lo, ceiling } => {
                if !matches!(set.kind, ProbeKind::Complex1d | ProbeKind::Complex2d) {
                    return Err("auto τ grids are for complex kinds".into());
                }
                complex_tau_grid(dim, c, self.domain.n_t, self.domain.final_time, *count, *lo, *ceiling).map_err(|e| e.to_string())?
            }
        };
        taus.sort_by(f64::total_cmp);
        if taus.windows(2).any(|w| w[0] == w[1]) {
            return Err("τ grid has duplicates".into());
        }
        Ok(taus)
    }

    fn check_estimators(&self, instances: &[ProbeInstance]) -> LabResult<()> {
        let e = &self.estimators;
        let kind_of = |name: &Option<String>, field: &str, ok: &[ProbeKind]| -> LabResult<()> {
            let Some(id) = name else { return Ok(()) };
            let inst = instances.iter().find(|i| &i.set == id).ok_or_else(|| bad(format!("estimators.{field} names unknown probe set '{id}'")))?;
            if !ok.contains(&inst.kind) {
                return Err(bad(format!("estimators.{field}: probe set '{id}' has kind {:?}", inst.kind)));
            }
            Ok(())
        };
        kind_of(&e.t0, "t0", &[ProbeKind::Real, ProbeKind::Radial])?;
        kind_of(&e.dichotomy, "dichotomy", &[ProbeKind::Real, ProbeKind::Radial])?;
        kind_of(&e.support, "support", &[ProbeKind::Complex1d, ProbeKind::Complex2d])?;
        if !(e.residual_gate > 0.0) {
            return Err(bad(format!("estimators.residual_gate must be positive, got {}", e.residual_gate)));
        }
        if !(e.max_log_cancellation > 0.0) {
            return Err(bad(format!("estimators.max_log_cancellation must be positive, got {}", e.max_log_cancellation)));
        }
        if let Some(id) = &e.t0 {
            for inst in instances.iter().filter(|i| &i.set == id) {
                if inst.taus.iter().any(|&t| t < 10.0) || inst.taus.len() < 6 {
                    return Err(bad(format!("estimators.t0: probe set '{id}' needs at least 6 τ values, all ≥ 10")));
                }
            }
        }
        Ok(())
    }

    fn check_oracle(&self) -> LabResult<()> {
        let o = &self.oracle;
        for c in &o.checks {
            if !ORACLE_CHECKS.contains(&c.as_str()) {
                return Err(bad(format!("oracle.checks: unknown check '{c}' (known: {})", ORACLE_CHECKS.join(", "))));
            }
        }
        let t = &o.tolerances;
        if [t.moments, t.kd, t.limit, t.segments, t.volume].iter().any(|&x| !(x > 0.0)) {
            return Err(bad("oracle tolerances must be positive"));
        }
        if o.volume_taus.iter().any(|&t| !(t > 0.0)) {
            return Err(bad("oracle.volume_taus must be positive"));
        }
        Ok(())
    }
}

fn to_point(v: &[f64], n: usize) -> Result<Point, String> {
    if v.len() != n {
        return Err(format!("expected {n} coordinates, got {}", v.len()));
    }
    Ok([v[0], if n == 2 { v[1] } else { 0.0 }])
}

impl Scenario {
    pub fn from_toml(text: &str) -> LabResult<Self> {
        ScenarioConfig::from_toml(text)?.validate()
    }

    pub fn load(path: &Path) -> LabResult<Self> {
        ScenarioConfig::load(path)?.validate()
    }

    /// Re-validates with a new seed (the hash changes with it).
    pub fn with_seed(self, seed: u64) -> LabResult<Self> {
        let mut c = self.config;
        c.seed = seed;
        c.validate()
    }

    pub fn dim(&self) -> Dim {
        self.domain.dim()
    }

    pub fn clip(&self) -> LabResult<ClipBox> {
        Ok(ClipBox::space_time(&self.domain, self.config.domain.final_time)?)
    }

    pub fn set_instances<'a>(&'a self, set: &'a str) -> impl Iterator<Item = &'a ProbeInstance> + 'a {
        self.instances.iter().filter(move |i| i.set == set)
    }

    /// Space-time direction of a complex instance.
    pub fn direction(&self, inst: &ProbeInstance) -> LabResult<enclosure_core::SpaceTimeDirection> {
        Ok(omega_c(self.dim(), inst.omega, inst.c)?)
    }
}
