//! Run configuration, claim registry, suite orchestration, and
//! machine-readable verification reports.
//!
//! A report is a flat list of claims. Each claim has a stable id, a prose
//! statement of the verified identity, a status, and a metrics block with
//! the observed numbers. Exact suites report `PASS`/`FAIL`; the spectral
//! suite reports `ESTIMATE-PASS`/`ESTIMATE-FAIL` because graph eigenvalue
//! estimates carry sampling bias; statements outside the reach of pointwise
//! checks report `NOT-VERIFIABLE`. Only `FAIL` gates the exit status.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::clifford_core::{delta, CliffordSystem, ProductDiscriminant, Variant};
use crate::curvature_spectra::{
    classify_harmonic_stability, isotropic_direction, principal_spectrum, sigma_certificate,
    verify_ricci,
};
use crate::focal_harmonic::{
    apply, eigenmap_check, fiber_check, kg_ratio, pushforward, tension_normality, FocalMap,
    FocalMapKind,
};
use crate::foliation_manifolds::{residual, sample, ManifoldId, SignTag};
use crate::intrinsic_calculus::{
    chain_function_identities, second_fundamental_chain, verify_hypersurface_laplacian_identities,
    verify_minimality,
};
use crate::munzner_forms::verify_munzner_pde;
use crate::spectral_estimation::{
    estimate_sphere_spectrum, first_cluster_size, verify_explicit_eigenfunctions,
    verify_spectral_inequalities, GraphSpec, InequalityVerdict,
};
use crate::{linalg, tol, Error, Result};

/// Verification suites in dependency order. Later suites assume the
/// invariants checked by earlier ones but each runs standalone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteId {
    Clifford,
    Forms,
    Manifolds,
    Calculus,
    Curvature,
    Focal,
    Spectral,
}

impl SuiteId {
    pub const ALL: [SuiteId; 7] = [
        SuiteId::Clifford,
        SuiteId::Forms,
        SuiteId::Manifolds,
        SuiteId::Calculus,
        SuiteId::Curvature,
        SuiteId::Focal,
        SuiteId::Spectral,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuiteId::Clifford => "clifford",
            SuiteId::Forms => "forms",
            SuiteId::Manifolds => "manifolds",
            SuiteId::Calculus => "calculus",
            SuiteId::Curvature => "curvature",
            SuiteId::Focal => "focal",
            SuiteId::Spectral => "spectral",
        }
    }

    /// Accepts suite names plus `sigma` as an alias for the curvature suite
    /// that owns the sigma certificates.
    pub fn parse(s: &str) -> Result<SuiteId> {
        match s.trim().to_ascii_lowercase().as_str() {
            "clifford" => Ok(SuiteId::Clifford),
            "forms" => Ok(SuiteId::Forms),
            "manifolds" => Ok(SuiteId::Manifolds),
            "calculus" => Ok(SuiteId::Calculus),
            "curvature" | "sigma" => Ok(SuiteId::Curvature),
            "focal" => Ok(SuiteId::Focal),
            "spectral" => Ok(SuiteId::Spectral),
            other => Err(Error::Config(format!("unknown suite '{other}'"))),
        }
    }
}

impl std::fmt::Display for SuiteId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClaimStatus {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "ESTIMATE-PASS")]
    EstimatePass,
    #[serde(rename = "ESTIMATE-FAIL")]
    EstimateFail,
    #[serde(rename = "NOT-APPLICABLE")]
    NotApplicable,
    #[serde(rename = "NOT-VERIFIABLE")]
    NotVerifiable,
}

impl ClaimStatus {
    pub fn label(self) -> &'static str {
        match self {
            ClaimStatus::Pass => "PASS",
            ClaimStatus::Fail => "FAIL",
            ClaimStatus::EstimatePass => "ESTIMATE-PASS",
            ClaimStatus::EstimateFail => "ESTIMATE-FAIL",
            ClaimStatus::NotApplicable => "NOT-APPLICABLE",
            ClaimStatus::NotVerifiable => "NOT-VERIFIABLE",
        }
    }

    /// Exit status is nonzero iff some claim with a gating status failed;
    /// estimate verdicts and unverifiable statements never gate.
    pub fn gates(self) -> bool {
        matches!(self, ClaimStatus::Fail)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Claim {
    pub id: String,
    pub suite: String,
    pub statement: String,
    pub status: ClaimStatus,
    pub metrics: Value,
}

/// Every claim the runner can emit: (id, suite, statement). Ids are stable
/// across versions; `report-audit` diffs a written report against this list.
pub const CLAIM_REGISTRY: [(&str, &str, &str); 29] = [
    (
        "clifford.exact_relations",
        "clifford",
        "every operator is a symmetric orthogonal sign matrix and all anticommutation relations hold in exact integer arithmetic",
    ),
    (
        "clifford.dimension_table",
        "clifford",
        "the ambient dimension follows the representation table l = k * delta(m), with delta scaling by 16 every eight steps",
    ),
    (
        "clifford.product_discriminant",
        "clifford",
        "the ordered operator product is scalar for the homogeneous quaternionic family and non-scalar for the inhomogeneous one",
    ),
    (
        "clifford.extension_discriminant",
        "clifford",
        "the quaternionic family extends by a further anticommuting operator exactly when the ordered product is non-scalar",
    ),
    (
        "forms.gradient_identity",
        "forms",
        "the squared gradient of the quartic invariant equals 16|x|^6 identically",
    ),
    (
        "forms.laplace_identity",
        "forms",
        "the ambient Laplacian of the quartic invariant equals 8(m2 - m1)|x|^2 identically",
    ),
    (
        "forms.degenerate_guard",
        "forms",
        "configurations with vanishing second multiplicity are rejected instead of being reported on",
    ),
    (
        "manifolds.membership",
        "manifolds",
        "sampled points satisfy the defining equations of every manifold in the foliation",
    ),
    (
        "manifolds.frame_dimensions",
        "manifolds",
        "tangent and normal frames are orthonormal with the predicted dimensions on every manifold",
    ),
    (
        "calculus.chain_identities",
        "calculus",
        "the restricted quadratic invariants satisfy their closed-form gradient norms and Laplacian eigenvalues on the chain manifolds",
    ),
    (
        "calculus.minimality",
        "calculus",
        "every chain manifold is minimal in the unit sphere",
    ),
    (
        "calculus.hypersurface_laplacians",
        "calculus",
        "coordinate Laplacians on a parallel hypersurface reduce to the mean curvature identity and the normal field satisfies its closed-form Laplacian",
    ),
    (
        "curvature.shape_spectra",
        "curvature",
        "shape operator spectra on the level sets match the closed-form principal values and multiplicities",
    ),
    (
        "curvature.sigma_plus",
        "curvature",
        "the normalized second fundamental form on the descending focal manifold attains maximum one with the predicted witness structure",
    ),
    (
        "curvature.sigma_minus",
        "curvature",
        "the normalized second fundamental form on the ascending focal manifold attains maximum one with the predicted witness structure",
    ),
    (
        "curvature.isotropic_witness",
        "curvature",
        "the closed-form composite direction annihilates the second fundamental form exactly",
    ),
    (
        "curvature.ricci_agreement",
        "curvature",
        "the Gauss-equation route and the sign-matrix formula for the Ricci form agree on the descending focal manifold",
    ),
    (
        "curvature.ricci_homogeneous_value",
        "curvature",
        "the homogeneous ten-dimensional focal manifold has constant Ricci curvature six",
    ),
    (
        "curvature.stability_classification",
        "curvature",
        "the harmonic instability verdict follows the Ricci bound together with the tabulated exceptional multiplicity pairs",
    ),
    (
        "focal.target_membership",
        "focal",
        "every normal exponential and section map lands on its stated target manifold",
    ),
    (
        "focal.pushforward_scaling",
        "focal",
        "pushforwards scale the curvature-adapted tangent splitting by the predicted trigonometric factors",
    ),
    (
        "focal.volume_ratio",
        "focal",
        "integrated volume factors reproduce the closed-form first-eigenvalue ratio along the descending chain",
    ),
    (
        "focal.fibers",
        "focal",
        "map fibers are round, totally geodesic spheres of the predicted dimension",
    ),
    (
        "focal.eigenmaps",
        "focal",
        "the linear focal maps are eigenmaps with eigenvalue equal to the source dimension",
    ),
    (
        "focal.tension_normality",
        "focal",
        "tension fields of the canonical maps are normal to their target manifolds",
    ),
    (
        "spectral.sphere_calibration",
        "spectral",
        "graph-Laplacian estimates on a round sphere recover the first nonzero eigenvalue and its multiplicity",
    ),
    (
        "spectral.chain_inequalities",
        "spectral",
        "the descending and ascending eigenvalue inequalities hold at graph-estimate precision",
    ),
    (
        "spectral.explicit_eigenfunctions",
        "spectral",
        "the coordinate and quadratic eigenfunctions on the quaternionic focal manifolds satisfy their eigenvalue equations pointwise",
    ),
    (
        "spectral.group_spectrum_bound",
        "spectral",
        "the seventeenth-eigenvalue statements for the ten-dimensional focal families are certified where pointwise checks exist",
    ),
];

fn registry_entry(id: &str) -> (&'static str, &'static str) {
    for (rid, suite, statement) in CLAIM_REGISTRY {
        if rid == id {
            return (suite, statement);
        }
    }
    panic!("claim id '{id}' missing from the registry");
}

/// Resolved run parameters after merging the config file and flag overrides.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub m: usize,
    pub k: usize,
    pub variant: Variant,
    pub seed: u64,
    /// Sample count for the exact suites.
    pub samples: usize,
    /// Graph size for the spectral suite.
    pub spectral_points: usize,
    /// Base points for the sigma certificates.
    pub sigma_points: usize,
    /// Optimizer restarts per sigma base point.
    pub sigma_restarts: usize,
    /// Multiplies every acceptance threshold; must be positive.
    pub tolerance_scale: f64,
    /// Suites to run, in dependency order; empty means all.
    pub suites: Vec<SuiteId>,
    pub out_dir: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            m: 1,
            k: 3,
            variant: Variant::Standard,
            seed: 7,
            samples: 200,
            spectral_points: 2500,
            sigma_points: 6,
            sigma_restarts: 3,
            tolerance_scale: 1.0,
            suites: Vec::new(),
            out_dir: None,
            threads: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Config("samples must be positive".into()));
        }
        if self.spectral_points < 100 {
            return Err(Error::Config(
                "spectral_points below 100 cannot support a connected graph".into(),
            ));
        }
        if self.sigma_points == 0 || self.sigma_restarts == 0 {
            return Err(Error::Config("sigma budgets must be positive".into()));
        }
        if !(self.tolerance_scale.is_finite() && self.tolerance_scale > 0.0) {
            return Err(Error::Config("tolerance_scale must be positive".into()));
        }
        Ok(())
    }

    /// Selected suites in dependency order (all when none were requested).
    pub fn selected_suites(&self) -> Vec<SuiteId> {
        if self.suites.is_empty() {
            return SuiteId::ALL.to_vec();
        }
        let mut picked: Vec<SuiteId> = self.suites.clone();
        picked.sort();
        picked.dedup();
        picked
    }
}

/// On-disk config file. Every field is optional; flags override file values.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub m: Option<usize>,
    pub k: Option<usize>,
    pub variant: Option<String>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub spectral_points: Option<usize>,
    pub sigma_points: Option<usize>,
    pub sigma_restarts: Option<usize>,
    pub tolerance_scale: Option<f64>,
    pub suites: Option<Vec<String>>,
    pub out: Option<String>,
    pub threads: Option<usize>,
}

pub fn load_config_file(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Command-line overrides; `None`/empty means "not given".
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub m: Option<usize>,
    pub k: Option<usize>,
    pub variant: Option<String>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub spectral_points: Option<usize>,
    pub sigma_points: Option<usize>,
    pub sigma_restarts: Option<usize>,
    pub tolerance_scale: Option<f64>,
    pub suites: Vec<String>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

pub fn parse_variant(s: &str) -> Result<Variant> {
    match s.trim().to_ascii_lowercase().as_str() {
        "standard" => Ok(Variant::Standard),
        "q-same" => Ok(Variant::QuaternionSame),
        "q-opposite" => Ok(Variant::QuaternionOpposite),
        other => Err(Error::Config(format!(
            "unknown variant '{other}' (expected standard, q-same, or q-opposite)"
        ))),
    }
}

/// Merges defaults, then the config file, then flags; flags win.
pub fn resolve_config(file: Option<&ConfigFile>, ov: &Overrides) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(f) = file {
        if let Some(m) = f.m {
            cfg.m = m;
        }
        if let Some(k) = f.k {
            cfg.k = k;
        }
        if let Some(v) = &f.variant {
            cfg.variant = parse_variant(v)?;
        }
        if let Some(s) = f.seed {
            cfg.seed = s;
        }
        if let Some(s) = f.samples {
            cfg.samples = s;
        }
        if let Some(s) = f.spectral_points {
            cfg.spectral_points = s;
        }
        if let Some(s) = f.sigma_points {
            cfg.sigma_points = s;
        }
        if let Some(s) = f.sigma_restarts {
            cfg.sigma_restarts = s;
        }
        if let Some(s) = f.tolerance_scale {
            cfg.tolerance_scale = s;
        }
        if let Some(suites) = &f.suites {
            cfg.suites = suites.iter().map(|s| SuiteId::parse(s)).collect::<Result<_>>()?;
        }
        if let Some(out) = &f.out {
            cfg.out_dir = Some(PathBuf::from(out));
        }
        if let Some(t) = f.threads {
            cfg.threads = Some(t);
        }
    }
    if let Some(m) = ov.m {
        cfg.m = m;
    }
    if let Some(k) = ov.k {
        cfg.k = k;
    }
    if let Some(v) = &ov.variant {
        cfg.variant = parse_variant(v)?;
    }
    if let Some(s) = ov.seed {
        cfg.seed = s;
    }
    if let Some(s) = ov.samples {
        cfg.samples = s;
    }
    if let Some(s) = ov.spectral_points {
        cfg.spectral_points = s;
    }
    if let Some(s) = ov.sigma_points {
        cfg.sigma_points = s;
    }
    if let Some(s) = ov.sigma_restarts {
        cfg.sigma_restarts = s;
    }
    if let Some(s) = ov.tolerance_scale {
        cfg.tolerance_scale = s;
    }
    if !ov.suites.is_empty() {
        cfg.suites = ov.suites.iter().map(|s| SuiteId::parse(s)).collect::<Result<_>>()?;
    }
    if let Some(out) = &ov.out {
        cfg.out_dir = Some(out.clone());
    }
    if let Some(t) = ov.threads {
        cfg.threads = Some(t);
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Config as echoed into the report (strings instead of enums so the report
/// deserializes without this crate).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub m: usize,
    pub k: usize,
    pub variant: String,
    pub seed: u64,
    pub samples: usize,
    pub spectral_points: usize,
    pub sigma_points: usize,
    pub sigma_restarts: usize,
    pub tolerance_scale: f64,
    pub suites: Vec<String>,
    pub out: Option<String>,
}

impl ConfigEcho {
    fn from_config(cfg: &RunConfig) -> ConfigEcho {
        ConfigEcho {
            m: cfg.m,
            k: cfg.k,
            variant: cfg.variant.to_string(),
            seed: cfg.seed,
            samples: cfg.samples,
            spectral_points: cfg.spectral_points,
            sigma_points: cfg.sigma_points,
            sigma_restarts: cfg.sigma_restarts,
            tolerance_scale: cfg.tolerance_scale,
            suites: cfg.selected_suites().iter().map(|s| s.name().to_string()).collect(),
            out: cfg.out_dir.as_ref().map(|p| p.display().to_string()),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub tool_version: String,
    pub config: ConfigEcho,
    pub claims: Vec<Claim>,
    /// Wall-clock seconds per suite. Excluded from determinism comparisons.
    pub timing: BTreeMap<String, f64>,
}

impl VerificationReport {
    pub fn gating_failures(&self) -> Vec<&Claim> {
        self.claims.iter().filter(|c| c.status.gates()).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One terminal line per claim plus a tally.
    pub fn summary_lines(&self) -> Vec<String> {
        let mut lines: Vec<String> = self
            .claims
            .iter()
            .map(|c| format!("{:>14}  {:<36} {}", c.status.label(), c.id, c.statement))
            .collect();
        let mut tally: BTreeMap<&str, usize> = BTreeMap::new();
        for c in &self.claims {
            *tally.entry(c.status.label()).or_default() += 1;
        }
        let total = self.claims.len();
        let counts = tally
            .iter()
            .map(|(k, v)| format!("{v} {k}"))
            .collect::<Vec<_>>()
            .join(", ");
        lines.push(format!("{total} claims: {counts}"));
        lines
    }
}

/// Lazily created artifact directory; all writers are no-ops without an
/// output directory.
struct Artifacts {
    root: Option<PathBuf>,
}

impl Artifacts {
    fn csv(&self, subdir: &str, name: &str, header: &str, rows: &[Vec<f64>]) -> Result<()> {
        let Some(root) = &self.root else {
            return Ok(());
        };
        let dir = root.join(subdir);
        std::fs::create_dir_all(&dir)?;
        let mut file = std::fs::File::create(dir.join(format!("{name}.csv")))?;
        writeln!(file, "{header}")?;
        for row in rows {
            let line = row.iter().map(|v| format!("{v:.17e}")).collect::<Vec<_>>().join(",");
            writeln!(file, "{line}")?;
        }
        Ok(())
    }
}

/// Claim accumulator for one suite. Statuses and statements come from the
/// registry; thresholds are scaled by the configured tolerance factor.
struct ClaimSink {
    claims: Vec<Claim>,
}

impl ClaimSink {
    fn new() -> ClaimSink {
        ClaimSink { claims: Vec::new() }
    }

    fn push(&mut self, id: &str, status: ClaimStatus, metrics: Value) {
        let (suite, statement) = registry_entry(id);
        self.claims.push(Claim {
            id: id.to_string(),
            suite: suite.to_string(),
            statement: statement.to_string(),
            status,
            metrics,
        });
    }

    /// Runs a check; an `Err` is recorded as a failing claim, not a crash.
    fn guarded(&mut self, id: &str, f: impl FnOnce() -> Result<(ClaimStatus, Value)>) {
        match f() {
            Ok((status, metrics)) => self.push(id, status, metrics),
            Err(e) => self.push(id, ClaimStatus::Fail, json!({ "error": e.to_string() })),
        }
    }

    fn not_applicable(&mut self, id: &str, note: &str) {
        self.push(id, ClaimStatus::NotApplicable, json!({ "note": note }));
    }
}

fn pass_if(ok: bool) -> ClaimStatus {
    if ok {
        ClaimStatus::Pass
    } else {
        ClaimStatus::Fail
    }
}

fn estimate_if(ok: bool) -> ClaimStatus {
    if ok {
        ClaimStatus::EstimatePass
    } else {
        ClaimStatus::EstimateFail
    }
}

fn degenerate(sys: &CliffordSystem) -> bool {
    sys.multiplicities().1 <= 0
}

const DEGENERATE_NOTE: &str =
    "second multiplicity vanishes, so the foliation degenerates and the check has no domain";

/// Executes the selected suites and assembles the report. Writes
/// `report.json` and CSV artifacts when an output directory is configured.
pub fn run(cfg: &RunConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    let sys = CliffordSystem::build(cfg.m, cfg.k, cfg.variant)?;
    let art = Artifacts { root: cfg.out_dir.clone() };
    let selected = cfg.selected_suites();
    let on = |s: SuiteId| selected.contains(&s);

    let mut claims = Vec::new();
    let mut timing = BTreeMap::new();
    let mut record = |name: &str, out: (Vec<Claim>, f64), claims: &mut Vec<Claim>| {
        claims.extend(out.0);
        timing.insert(name.to_string(), out.1);
    };

    let timed = |f: &dyn Fn() -> Vec<Claim>| {
        let start = Instant::now();
        let claims = f();
        (claims, start.elapsed().as_secs_f64())
    };

    if on(SuiteId::Clifford) {
        record("clifford", timed(&|| suite_clifford(&sys, cfg)), &mut claims);
    }
    if on(SuiteId::Forms) {
        record("forms", timed(&|| suite_forms(&sys, cfg)), &mut claims);
    }
    if on(SuiteId::Manifolds) {
        record("manifolds", timed(&|| suite_manifolds(&sys, cfg, &art)), &mut claims);
    }
    if on(SuiteId::Calculus) {
        record("calculus", timed(&|| suite_calculus(&sys, cfg)), &mut claims);
    }

    // The remaining suites are mutually independent; run them on parallel
    // workers but keep the claim order fixed.
    let run_curvature = on(SuiteId::Curvature);
    let run_focal = on(SuiteId::Focal);
    let run_spectral = on(SuiteId::Spectral);
    let ((curv, foc), spec) = rayon::join(
        || {
            rayon::join(
                || run_curvature.then(|| timed(&|| suite_curvature(&sys, cfg))),
                || run_focal.then(|| timed(&|| suite_focal(&sys, cfg))),
            )
        },
        || run_spectral.then(|| timed(&|| suite_spectral(&sys, cfg, &art))),
    );
    if let Some(out) = curv {
        record("curvature", out, &mut claims);
    }
    if let Some(out) = foc {
        record("focal", out, &mut claims);
    }
    if let Some(out) = spec {
        record("spectral", out, &mut claims);
    }

    let report = VerificationReport {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: ConfigEcho::from_config(cfg),
        claims,
        timing,
    };
    if let Some(root) = &cfg.out_dir {
        std::fs::create_dir_all(root)?;
        std::fs::write(root.join("report.json"), report.to_json()?)?;
    }
    Ok(report)
}

fn suite_clifford(sys: &CliffordSystem, _cfg: &RunConfig) -> Vec<Claim> {
    let mut sink = ClaimSink::new();

    sink.guarded("clifford.exact_relations", || {
        sys.validate()?;
        Ok((
            ClaimStatus::Pass,
            json!({
                "m": sys.m,
                "k": sys.k,
                "l": sys.l,
                "delta_m": sys.delta_m,
                "variant": sys.variant.to_string(),
                "operators": sys.m + 1,
                "ambient_dim": sys.dim_ambient(),
            }),
        ))
    });

    sink.guarded("clifford.dimension_table", || {
        let table: Vec<usize> = (1..=8).map(delta).collect();
        let ok = table == [1, 2, 4, 4, 8, 8, 8, 8]
            && (1..=8).all(|m| delta(m + 8) == 16 * delta(m))
            && sys.delta_m == delta(sys.m)
            && sys.l == sys.k * sys.delta_m;
        Ok((
            pass_if(ok),
            json!({ "delta_table": table, "l": sys.l, "k": sys.k, "delta_m": sys.delta_m }),
        ))
    });

    let quaternionic = sys.m == 4 && sys.k == 2 && sys.variant != Variant::Standard;
    let disc = format!("{:?}", sys.product_discriminant);
    if quaternionic {
        sink.guarded("clifford.product_discriminant", || {
            let ok = match sys.variant {
                Variant::QuaternionSame => matches!(
                    sys.product_discriminant,
                    ProductDiscriminant::PlusIdentity | ProductDiscriminant::MinusIdentity
                ),
                Variant::QuaternionOpposite => {
                    sys.product_discriminant == ProductDiscriminant::NotScalar
                }
                Variant::Standard => unreachable!(),
            };
            Ok((pass_if(ok), json!({ "discriminant": disc })))
        });
        sink.guarded("clifford.extension_discriminant", || {
            let scalar = sys.product_discriminant != ProductDiscriminant::NotScalar;
            let ext = sys.extension_op();
            let presence_ok = scalar == ext.is_none();
            let relations_ok = ext.map_or(true, |e| {
                e.is_symmetric()
                    && e.is_sign_matrix()
                    && e.is_orthogonal()
                    && e.mul(e).is_identity()
                    && sys.matrices().iter().all(|p| e.anticommutes(p))
            });
            Ok((
                pass_if(presence_ok && relations_ok),
                json!({
                    "discriminant": format!("{:?}", sys.product_discriminant),
                    "extends": ext.is_some(),
                }),
            ))
        });
    } else {
        sink.not_applicable(
            "clifford.product_discriminant",
            &format!("claims a quaternionic (4,2) family; this system has discriminant {disc}"),
        );
        sink.not_applicable(
            "clifford.extension_discriminant",
            "claims a quaternionic (4,2) family; elsewhere a non-scalar product does not imply an extension",
        );
    }
    sink.claims
}

fn suite_forms(sys: &CliffordSystem, cfg: &RunConfig) -> Vec<Claim> {
    let mut sink = ClaimSink::new();
    let scale = cfg.tolerance_scale;

    if degenerate(sys) {
        sink.not_applicable("forms.gradient_identity", DEGENERATE_NOTE);
        sink.not_applicable("forms.laplace_identity", DEGENERATE_NOTE);
    } else {
        match verify_munzner_pde(sys, cfg.samples.max(64), cfg.seed) {
            Ok(rep) => {
                let metrics = serde_json::to_value(&rep).unwrap_or(Value::Null);
                sink.push(
                    "forms.gradient_identity",
                    pass_if(rep.max_rel_gradient_identity <= tol::PDE_REL * scale),
                    metrics.clone(),
                );
                sink.push(
                    "forms.laplace_identity",
                    pass_if(rep.max_rel_laplace_identity <= tol::PDE_REL * scale),
                    metrics,
                );
            }
            Err(e) => {
                let metrics = json!({ "error": e.to_string() });
                sink.push("forms.gradient_identity", ClaimStatus::Fail, metrics.clone());
                sink.push("forms.laplace_identity", ClaimStatus::Fail, metrics);
            }
        }
    }

    sink.guarded("forms.degenerate_guard", || {
        let probe = CliffordSystem::build(3, 1, Variant::Standard)?;
        let (m1, m2) = probe.multiplicities();
        match verify_munzner_pde(&probe, 8, cfg.seed) {
            Err(Error::DegenerateFoliation { m1: e1, m2: e2 }) => Ok((
                pass_if(e1 == m1 && e2 == m2 && m2 == 0),
                json!({ "probe": "(3,1)", "m1": e1, "m2": e2 }),
            )),
            Err(other) => Ok((
                ClaimStatus::Fail,
                json!({ "error": format!("wrong rejection: {other}") }),
            )),
            Ok(_) => Ok((
                ClaimStatus::Fail,
                json!({ "error": "degenerate configuration was verified instead of rejected" }),
            )),
        }
    });
    sink.claims
}

/// Representative manifolds of every kind that this system supports.
fn manifold_inventory(sys: &CliffordSystem) -> Vec<ManifoldId> {
    let m = sys.m;
    let mut ids = vec![ManifoldId::Sphere];
    for i in 0..=m {
        ids.push(ManifoldId::M(i));
    }
    for i in 1..=m {
        ids.push(ManifoldId::N(i));
    }
    ids.push(ManifoldId::LevelU { i: 0, c: 0.4 });
    ids.push(ManifoldId::LevelU { i: m - 1, c: -0.35 });
    ids.push(ManifoldId::FocalU { i: 0, sign: SignTag::Plus });
    ids.push(ManifoldId::FocalU { i: m - 1, sign: SignTag::Minus });
    if m >= 2 {
        ids.push(ManifoldId::LevelV { i: 2, c: 0.4 });
        ids.push(ManifoldId::LevelV { i: m, c: -0.35 });
        ids.push(ManifoldId::FocalV { i: 2, sign: SignTag::Plus });
        ids.push(ManifoldId::FocalV { i: m, sign: SignTag::Minus });
    }
    ids.push(ManifoldId::Hypersurface { t: 0.3 });
    ids
}

fn suite_manifolds(sys: &CliffordSystem, cfg: &RunConfig, art: &Artifacts) -> Vec<Claim> {
    let mut sink = ClaimSink::new();
    let scale = cfg.tolerance_scale;
    if degenerate(sys) {
        sink.not_applicable("manifolds.membership", DEGENERATE_NOTE);
        sink.not_applicable("manifolds.frame_dimensions", DEGENERATE_NOTE);
        return sink.claims;
    }
    let count = cfg.samples.min(40).max(4);

    sink.guarded("manifolds.membership", || {
        let mut rows = Vec::new();
        let mut worst: f64 = 0.0;
        for id in manifold_inventory(sys) {
            let pts = sample(sys, id, count, cfg.seed)?;
            let max_res = pts.iter().map(|p| p.residual).fold(0.0, f64::max);
            worst = worst.max(max_res);
            rows.push(json!({
                "manifold": id.label(),
                "dim": id.dim(sys),
                "max_residual": max_res,
            }));
            if id == ManifoldId::M(sys.m) || id == ManifoldId::N(sys.m) {
                let coords: Vec<Vec<f64>> =
                    pts.iter().take(100).map(|p| p.coords.clone()).collect();
                let header = (0..sys.dim_ambient())
                    .map(|j| format!("x{j}"))
                    .collect::<Vec<_>>()
                    .join(",");
                art.csv("points", &id.label(), &header, &coords)?;
            }
        }
        Ok((
            pass_if(worst <= tol::SAMPLE_RESIDUAL * scale),
            json!({ "samples_per_manifold": count, "max_residual": worst, "manifolds": rows }),
        ))
    });

    sink.guarded("manifolds.frame_dimensions", || {
        let mut rows = Vec::new();
        let mut worst: f64 = 0.0;
        let mut dims_ok = true;
        let n = sys.dim_ambient();
        for id in manifold_inventory(sys) {
            let pts = sample(sys, id, count.min(6), cfg.seed ^ 0x0f0f)?;
            let want = id.dim(sys);
            let mut ortho: f64 = 0.0;
            for p in &pts {
                dims_ok &= p.tangent.len() == want && p.tangent.len() + p.normal.len() == n;
                let full: Vec<&Vec<f64>> = p.tangent.iter().chain(p.normal.iter()).collect();
                for (a, va) in full.iter().enumerate() {
                    for (b, vb) in full.iter().enumerate() {
                        let g = linalg::dot(va, vb) - if a == b { 1.0 } else { 0.0 };
                        ortho = ortho.max(g.abs());
                    }
                }
            }
            worst = worst.max(ortho);
            rows.push(json!({ "manifold": id.label(), "dim": want, "frame_residual": ortho }));
        }
        Ok((
            pass_if(dims_ok && worst <= tol::FRAME_ORTHO * scale),
            json!({ "max_frame_residual": worst, "dims_consistent": dims_ok, "manifolds": rows }),
        ))
    });
    sink.claims
}

fn suite_calculus(sys: &CliffordSystem, cfg: &RunConfig) -> Vec<Claim> {
    let mut sink = ClaimSink::new();
    let scale = cfg.tolerance_scale;
    if degenerate(sys) {
        sink.not_applicable("calculus.chain_identities", DEGENERATE_NOTE);
        sink.not_applicable("calculus.minimality", DEGENERATE_NOTE);
        sink.not_applicable("calculus.hypersurface_laplacians", DEGENERATE_NOTE);
        return sink.claims;
    }

    sink.guarded("calculus.chain_identities", || {
        let reports = chain_function_identities(sys, cfg.samples.min(120), cfg.seed)?;
        let worst = reports
            .iter()
            .map(|r| r.max_gradient_rel.max(r.max_laplace_rel))
            .fold(0.0, f64::max);
        Ok((
            pass_if(worst <= tol::RESTRICTED_IDENTITY * scale),
            json!({
                "max_rel": worst,
                "identities": serde_json::to_value(&reports).unwrap_or(Value::Null),
            }),
        ))
    });

    sink.guarded("calculus.minimality", || {
        let mut rows = Vec::new();
        let mut worst: f64 = 0.0;
        let count = cfg.samples.min(60);
        for i in 0..=sys.m {
            let rep = verify_minimality(sys, ManifoldId::M(i), count, cfg.seed)?;
            worst = worst.max(rep.max_defect);
            rows.push(serde_json::to_value(&rep)?);
        }
        for i in 1..=sys.m {
            let rep = verify_minimality(sys, ManifoldId::N(i), count, cfg.seed)?;
            worst = worst.max(rep.max_defect);
            rows.push(serde_json::to_value(&rep)?);
        }
        Ok((
            pass_if(worst <= tol::MINIMALITY * scale),
            json!({ "max_defect": worst, "manifolds": rows }),
        ))
    });

    sink.guarded("calculus.hypersurface_laplacians", || {
        let mut rows = Vec::new();
        let mut worst_coord: f64 = 0.0;
        let mut worst_normal: f64 = 0.0;
        for t in [0.2, 0.55] {
            let rep =
                verify_hypersurface_laplacian_identities(sys, t, cfg.samples.min(24), cfg.seed)?;
            worst_coord = worst_coord.max(rep.max_coordinate_residual);
            worst_normal = worst_normal.max(rep.max_normal_residual);
            rows.push(serde_json::to_value(&rep)?);
        }
        Ok((
            pass_if(
                worst_coord <= 1e-10 * scale && worst_normal <= tol::TENSION_NORMAL * scale,
            ),
            json!({
                "max_coordinate_residual": worst_coord,
                "max_normal_residual": worst_normal,
                "angles": rows,
            }),
        ))
    });
    sink.claims
}

fn suite_curvature(sys: &CliffordSystem, cfg: &RunConfig) -> Vec<Claim> {
    let mut sink = ClaimSink::new();
    let scale = cfg.tolerance_scale;
    if degenerate(sys) {
        for id in [
            "curvature.shape_spectra",
            "curvature.sigma_plus",
            "curvature.sigma_minus",
            "curvature.isotropic_witness",
            "curvature.ricci_agreement",
            "curvature.ricci_homogeneous_value",
            "curvature.stability_classification",
        ] {
            sink.not_applicable(id, DEGENERATE_NOTE);
        }
        return sink.claims;
    }

    sink.guarded("curvature.shape_spectra", || {
        let mut levels = Vec::new();
        for i in 0..sys.m {
            levels.push(ManifoldId::LevelU { i, c: 0.0 });
        }
        for i in 2..=sys.m {
            levels.push(ManifoldId::LevelV { i, c: 0.0 });
        }
        let mut worst: f64 = 0.0;
        let mut mismatches = 0usize;
        let mut rows = Vec::new();
        for base in levels {
            for c in [-0.9, -0.5, 0.0, 0.5, 0.9] {
                let id = match base {
                    ManifoldId::LevelU { i, .. } => ManifoldId::LevelU { i, c },
                    ManifoldId::LevelV { i, .. } => ManifoldId::LevelV { i, c },
                    _ => unreachable!(),
                };
                let pts = sample(sys, id, 2, cfg.seed ^ 0x5c)?;
                for p in &pts {
                    let rep = principal_spectrum(sys, id, &p.coords)?;
                    worst = worst.max(rep.max_value_residual);
                    mismatches += rep.multiplicity_mismatches;
                    rows.push(json!({
                        "manifold": rep.manifold,
                        "max_value_residual": rep.max_value_residual,
                        "multiplicity_mismatches": rep.multiplicity_mismatches,
                    }));
                }
            }
        }
        Ok((
            pass_if(worst <= tol::SPECTRUM_EIG * scale && mismatches == 0),
            json!({
                "max_value_residual": worst,
                "multiplicity_mismatches": mismatches,
                "levels": rows,
            }),
        ))
    });

    sink.guarded("curvature.sigma_plus", || {
        let cert =
            sigma_certificate(sys, SignTag::Plus, cfg.sigma_points, cfg.sigma_restarts, cfg.seed)?;
        let ok = cert.sigma_hat >= 1.0 - 1e-4 * scale
            && cert.sigma_hat <= 1.0 + 1e-6 * scale
            && cert.witness_dir_on_opposite <= 1e-6 * scale
            && cert.min_value <= 1e-6 * scale
            && cert.identity_max_residual <= 1e-8 * scale
            && cert.max_shape_trace <= 1e-8 * scale
            && cert.converged_runs >= 1;
        Ok((pass_if(ok), serde_json::to_value(&cert)?))
    });

    sink.guarded("curvature.sigma_minus", || {
        let cert = sigma_certificate(
            sys,
            SignTag::Minus,
            cfg.sigma_points,
            cfg.sigma_restarts,
            cfg.seed,
        )?;
        let ok = cert.sigma_hat >= 1.0 - 1e-2 * scale
            && cert.sigma_hat <= 1.0 + 1e-3 * scale
            && cert.witness_dir_on_opposite <= 1e-6 * scale
            && cert.identity_max_residual <= 1e-5 * scale
            && cert.converged_runs >= 1;
        Ok((pass_if(ok), serde_json::to_value(&cert)?))
    });

    sink.guarded("curvature.isotropic_witness", || {
        let pts = sample(sys, ManifoldId::M(sys.m), cfg.samples.min(10), cfg.seed ^ 0x15)?;
        let mut max_b_sq: f64 = 0.0;
        let mut max_res: f64 = 0.0;
        for p in &pts {
            let dir = isotropic_direction(sys, &p.coords, 0, 1)?;
            // Spherical second fundamental form: drop the -<X,X> x ambient
            // term from the chain formula, leaving sum_a <P_a X, X> P_a x.
            let mut b = second_fundamental_chain(sys, sys.m, &p.coords, &dir, &dir);
            linalg::axpy(&mut b, linalg::dot(&dir, &dir), &p.coords);
            max_b_sq = max_b_sq.max(linalg::dot(&b, &b));
            max_res = max_res.max(residual(sys, ManifoldId::M(sys.m), &dir));
        }
        Ok((
            pass_if(max_b_sq <= 1e-18 * scale && max_res <= 1e-10 * scale),
            json!({ "max_b_norm_sq": max_b_sq, "max_direction_residual": max_res }),
        ))
    });

    sink.guarded("curvature.ricci_agreement", || {
        let rep = verify_ricci(sys, cfg.samples.min(100), cfg.seed)?;
        Ok((
            pass_if(rep.max_route_disagreement <= tol::RICCI_AGREE * scale),
            serde_json::to_value(&rep)?,
        ))
    });

    if sys.m == 4 && sys.k == 2 && sys.variant == Variant::QuaternionSame {
        sink.guarded("curvature.ricci_homogeneous_value", || {
            let rep = verify_ricci(sys, cfg.samples.min(60), cfg.seed ^ 0x6)?;
            let ok = (rep.min_value - 6.0).abs() <= 1e-6 * scale
                && (rep.max_value - 6.0).abs() <= 1e-6 * scale;
            Ok((pass_if(ok), serde_json::to_value(&rep)?))
        });
    } else {
        sink.not_applicable(
            "curvature.ricci_homogeneous_value",
            "claims the homogeneous quaternionic (4,2) family",
        );
    }

    sink.guarded("curvature.stability_classification", || {
        let own = classify_harmonic_stability(sys)?;
        let mut table = Vec::new();
        for (m, k, variant) in [
            (1, 3, Variant::Standard),
            (1, 4, Variant::Standard),
            (2, 2, Variant::Standard),
            (2, 3, Variant::Standard),
            (3, 2, Variant::Standard),
            (4, 2, Variant::QuaternionSame),
            (4, 2, Variant::QuaternionOpposite),
            (5, 1, Variant::Standard),
            (6, 1, Variant::Standard),
            (9, 1, Variant::Standard),
        ] {
            let row_sys = CliffordSystem::build(m, k, variant)?;
            let row = classify_harmonic_stability(&row_sys)?;
            table.push(json!({
                "m": m,
                "k": k,
                "variant": variant.to_string(),
                "m1": row.m1,
                "m2": row.m2,
                "verdict": serde_json::to_value(&row.verdict)?,
                "reason": row.reason,
            }));
        }
        Ok((
            ClaimStatus::Pass,
            json!({ "system": serde_json::to_value(&own)?, "table": table }),
        ))
    });
    sink.claims
}

/// One representative of every supported map kind, mirroring validity and
/// extension gating.
fn focal_map_inventory(sys: &CliffordSystem) -> Result<Vec<FocalMap>> {
    let mut maps = Vec::new();
    for i in 0..sys.m {
        maps.push(FocalMap::new(sys, FocalMapKind::PhiT { i, t: 0.31 })?);
        maps.push(FocalMap::new(sys, FocalMapKind::PhiT { i, t: -0.22 })?);
        for sign in [SignTag::Plus, SignTag::Minus] {
            maps.push(FocalMap::new(sys, FocalMapKind::PhiQuarter { i, sign })?);
        }
    }
    for i in 2..=sys.m {
        maps.push(FocalMap::new(sys, FocalMapKind::PsiT { i, t: 0.27 })?);
        for sign in [SignTag::Plus, SignTag::Minus] {
            maps.push(FocalMap::new(sys, FocalMapKind::PsiQuarter { i, sign })?);
        }
    }
    let coeffs = basis_coeffs(sys);
    maps.push(FocalMap::new(sys, FocalMapKind::PlusToMinus { coeffs: coeffs.clone() })?);
    maps.push(FocalMap::new(sys, FocalMapKind::PlusToHypersurface { coeffs, t: 0.3 })?);
    if sys.extension_op().is_some() {
        maps.push(FocalMap::new(sys, FocalMapKind::MinusToPlus)?);
        maps.push(FocalMap::new(sys, FocalMapKind::MinusToHypersurface { s: 0.2 })?);
    }
    maps.push(FocalMap::new(sys, FocalMapKind::HypersurfaceToPlus { t: 0.3 })?);
    maps.push(FocalMap::new(sys, FocalMapKind::HypersurfaceToMinus { t: 0.3 })?);
    Ok(maps)
}

fn basis_coeffs(sys: &CliffordSystem) -> Vec<f64> {
    let mut c = vec![0.0; sys.m + 1];
    c[0] = 1.0;
    c
}

fn suite_focal(sys: &CliffordSystem, cfg: &RunConfig) -> Vec<Claim> {
    let mut sink = ClaimSink::new();
    let scale = cfg.tolerance_scale;
    if degenerate(sys) {
        for id in [
            "focal.target_membership",
            "focal.pushforward_scaling",
            "focal.volume_ratio",
            "focal.fibers",
            "focal.eigenmaps",
            "focal.tension_normality",
        ] {
            sink.not_applicable(id, DEGENERATE_NOTE);
        }
        return sink.claims;
    }

    sink.guarded("focal.target_membership", || {
        let count = cfg.samples.min(12).max(2);
        let mut worst: f64 = 0.0;
        let mut rows = Vec::new();
        for map in focal_map_inventory(sys)? {
            let pts = sample(sys, map.source, count, cfg.seed ^ 0x29)?;
            let mut max_res: f64 = 0.0;
            for p in &pts {
                let image = apply(sys, &map, &p.coords)?;
                max_res = max_res.max(residual(sys, map.target, &image));
            }
            worst = worst.max(max_res);
            rows.push(json!({ "map": map.label(), "max_target_residual": max_res }));
        }
        Ok((
            pass_if(worst <= tol::MAP_TARGET_RESIDUAL * scale),
            json!({ "max_target_residual": worst, "maps": rows }),
        ))
    });

    sink.guarded("focal.pushforward_scaling", || {
        let mut kinds = vec![
            FocalMapKind::PhiT { i: 0, t: 0.31 },
            FocalMapKind::PhiT { i: sys.m - 1, t: -0.17 },
        ];
        if sys.m >= 2 {
            kinds.push(FocalMapKind::PsiT { i: 2, t: 0.27 });
            kinds.push(FocalMapKind::PsiT { i: sys.m, t: -0.12 });
        }
        let mut worst_scaling: f64 = 0.0;
        let mut worst_decomp: f64 = 0.0;
        let mut worst_tangency: f64 = 0.0;
        let mut rows = Vec::new();
        for kind in kinds {
            let map = FocalMap::new(sys, kind)?;
            let pts = sample(sys, map.source, cfg.samples.min(8).max(2), cfg.seed ^ 0x31)?;
            let mut map_scaling: f64 = 0.0;
            for p in &pts {
                let dim = p.tangent.len();
                let mut probes = vec![p.tangent[0].clone()];
                let mut mix = vec![0.0; p.coords.len()];
                for v in &p.tangent {
                    linalg::axpy(&mut mix, 1.0 / (dim as f64).sqrt(), v);
                }
                probes.push(mix);
                for xv in probes {
                    let push = pushforward(sys, &map, &p.coords, &xv)?;
                    map_scaling = map_scaling.max(push.scaling_residual);
                    worst_decomp = worst_decomp.max(push.decomposition_residual);
                    worst_tangency = worst_tangency.max(push.target_tangency);
                }
            }
            worst_scaling = worst_scaling.max(map_scaling);
            rows.push(json!({ "map": map.label(), "max_scaling_residual": map_scaling }));
        }
        Ok((
            pass_if(
                worst_scaling <= tol::PUSHFORWARD * scale
                    && worst_decomp <= 1e-9 * scale
                    && worst_tangency <= 1e-9 * scale,
            ),
            json!({
                "max_scaling_residual": worst_scaling,
                "max_decomposition_residual": worst_decomp,
                "max_target_tangency": worst_tangency,
                "maps": rows,
            }),
        ))
    });

    sink.guarded("focal.volume_ratio", || {
        let l = sys.l;
        let mut rows = Vec::new();
        let mut worst: f64 = 0.0;
        let mut checked = 0usize;
        for i in 0..sys.m {
            if l as i64 - i as i64 - 3 <= 0 {
                rows.push(json!({ "i": i, "note": "ratio degenerates at this depth" }));
                continue;
            }
            let ratio = kg_ratio(sys, i)?;
            let closed = (l as f64 - i as f64 - 2.0) / (l as f64 - i as f64 - 3.0);
            let rel = (ratio - closed).abs() / closed;
            worst = worst.max(rel);
            checked += 1;
            rows.push(json!({ "i": i, "ratio": ratio, "closed_form": closed, "rel": rel }));
        }
        if checked == 0 {
            return Ok((
                ClaimStatus::NotApplicable,
                json!({ "note": "every chain depth degenerates the ratio", "rows": rows }),
            ));
        }
        Ok((
            pass_if(worst <= tol::RATIO_IDENTITY * scale),
            json!({ "max_rel": worst, "rows": rows }),
        ))
    });

    sink.guarded("focal.fibers", || {
        let mut kinds = vec![FocalMapKind::PhiQuarter { i: 0, sign: SignTag::Plus }];
        if sys.m >= 2 {
            kinds.push(FocalMapKind::PhiQuarter { i: sys.m - 1, sign: SignTag::Minus });
            kinds.push(FocalMapKind::PsiQuarter { i: 2, sign: SignTag::Plus });
            kinds.push(FocalMapKind::PsiQuarter { i: sys.m, sign: SignTag::Minus });
        }
        let mut rows = Vec::new();
        let mut worst: f64 = 0.0;
        for kind in kinds {
            let map = FocalMap::new(sys, kind)?;
            let base = sample(sys, map.target, 2, cfg.seed ^ 0x47)?;
            for p in &base {
                let rep = fiber_check(sys, &map, &p.coords, cfg.samples.min(10).max(2), cfg.seed)?;
                let rep_worst = rep
                    .max_map_defect
                    .max(rep.max_model_residual)
                    .max(rep.max_tangential_acceleration)
                    .max(rep.max_normal_identity_residual);
                worst = worst.max(rep_worst);
                rows.push(serde_json::to_value(&rep)?);
            }
        }
        Ok((
            pass_if(worst <= tol::FIBER_GEODESY * scale),
            json!({ "max_residual": worst, "fibers": rows }),
        ))
    });

    sink.guarded("focal.eigenmaps", || {
        // Only the kinds whose normal field is linear in the point; the
        // hypersurface-source maps carry a gradient field and are excluded
        // by the check itself.
        let mut kinds = vec![
            FocalMapKind::PhiQuarter { i: 0, sign: SignTag::Plus },
            FocalMapKind::PlusToMinus { coeffs: basis_coeffs(sys) },
            FocalMapKind::PlusToHypersurface { coeffs: basis_coeffs(sys), t: 0.3 },
        ];
        if sys.m >= 2 {
            kinds.push(FocalMapKind::PsiQuarter { i: sys.m, sign: SignTag::Minus });
        }
        if sys.extension_op().is_some() {
            kinds.push(FocalMapKind::MinusToPlus);
            kinds.push(FocalMapKind::MinusToHypersurface { s: 0.2 });
        }
        let mut rows = Vec::new();
        let mut worst: f64 = 0.0;
        let mut eigen_ok = true;
        for kind in kinds {
            let map = FocalMap::new(sys, kind)?;
            let rep = eigenmap_check(sys, &map, cfg.samples.min(8).max(2), cfg.seed ^ 0x53)?;
            eigen_ok &= rep.eigenvalue == map.source.dim(sys) as f64;
            worst = worst.max(rep.max_rel_residual).max(rep.max_image_norm_defect);
            rows.push(serde_json::to_value(&rep)?);
        }
        Ok((
            pass_if(eigen_ok && worst <= tol::EIGENMAP_REL * scale),
            json!({ "max_residual": worst, "eigenvalues_match_dims": eigen_ok, "maps": rows }),
        ))
    });

    sink.guarded("focal.tension_normality", || {
        let coeffs = basis_coeffs(sys);
        let mut kinds = vec![
            FocalMapKind::PhiQuarter { i: 0, sign: SignTag::Plus },
            FocalMapKind::PlusToMinus { coeffs: coeffs.clone() },
            FocalMapKind::PlusToHypersurface { coeffs, t: 0.3 },
            FocalMapKind::HypersurfaceToPlus { t: 0.3 },
            FocalMapKind::HypersurfaceToMinus { t: 0.3 },
        ];
        if sys.m >= 2 {
            kinds.push(FocalMapKind::PsiQuarter { i: sys.m, sign: SignTag::Plus });
        }
        if sys.extension_op().is_some() {
            kinds.push(FocalMapKind::MinusToPlus);
            kinds.push(FocalMapKind::MinusToHypersurface { s: 0.2 });
        }
        let mut rows = Vec::new();
        let mut worst_tangential: f64 = 0.0;
        let mut worst_target: f64 = 0.0;
        for kind in kinds {
            let map = FocalMap::new(sys, kind)?;
            let rep = tension_normality(sys, &map, cfg.samples.min(5).max(2), cfg.seed ^ 0x61)?;
            worst_tangential = worst_tangential.max(rep.max_tangential);
            worst_target = worst_target.max(rep.max_target_residual);
            rows.push(serde_json::to_value(&rep)?);
        }
        Ok((
            pass_if(
                worst_tangential <= tol::TENSION_NORMAL * scale
                    && worst_target <= tol::MAP_TARGET_RESIDUAL * scale,
            ),
            json!({
                "max_tangential": worst_tangential,
                "max_target_residual": worst_target,
                "maps": rows,
            }),
        ))
    });
    sink.claims
}

fn suite_spectral(sys: &CliffordSystem, cfg: &RunConfig, art: &Artifacts) -> Vec<Claim> {
    let mut sink = ClaimSink::new();
    let scale = cfg.tolerance_scale;

    sink.guarded("spectral.sphere_calibration", || {
        let spec = GraphSpec {
            n_points: cfg.spectral_points,
            k_neighbors: 24,
            bandwidth_scale: 1.0,
            seed: cfg.seed ^ 0x5ca1,
        };
        let est = estimate_sphere_spectrum(2, &spec, 5)?;
        let lambda1 = est.eigenvalues.first().copied().unwrap_or(f64::NAN);
        let rel = (lambda1 - 2.0).abs() / 2.0;
        let cluster = first_cluster_size(&est.eigenvalues, tol::ESTIMATE_CLUSTER_WINDOW);
        let rows: Vec<Vec<f64>> = est
            .eigenvalues
            .iter()
            .enumerate()
            .map(|(j, v)| vec![(j + 1) as f64, *v])
            .collect();
        art.csv("eigenvalues", &est.manifold, "index,eigenvalue", &rows)?;
        Ok((
            estimate_if(rel <= tol::CALIBRATION_REL * scale && cluster == 3),
            json!({
                "lambda1": lambda1,
                "rel_error": rel,
                "first_cluster": cluster,
                "calibration_residual": est.calibration_residual,
                "n_points": est.n_points,
            }),
        ))
    });

    if degenerate(sys) {
        sink.not_applicable("spectral.chain_inequalities", DEGENERATE_NOTE);
    } else {
        sink.guarded("spectral.chain_inequalities", || {
            let mut rows = Vec::new();
            let mut passes = 0usize;
            let mut failures = 0usize;
            for i in 0..sys.m {
                let spec = GraphSpec {
                    n_points: cfg.spectral_points,
                    k_neighbors: 24,
                    bandwidth_scale: 1.0,
                    seed: cfg.seed.wrapping_add(i as u64),
                };
                match verify_spectral_inequalities(sys, i, &spec) {
                    Ok(checks) => {
                        for c in &checks {
                            match c.verdict {
                                InequalityVerdict::EstimatePass => passes += 1,
                                InequalityVerdict::EstimateFail => failures += 1,
                                InequalityVerdict::NotApplicable => {}
                            }
                        }
                        rows.push(json!({ "i": i, "checks": serde_json::to_value(&checks)? }));
                    }
                    Err(Error::Infeasible { dim, cap }) => {
                        rows.push(json!({
                            "i": i,
                            "note": format!(
                                "dimension {dim} exceeds the desk budget cap {cap}"
                            ),
                        }));
                    }
                    Err(e) => return Err(e),
                }
            }
            let status = if failures > 0 {
                ClaimStatus::EstimateFail
            } else if passes > 0 {
                ClaimStatus::EstimatePass
            } else {
                ClaimStatus::NotApplicable
            };
            Ok((
                status,
                json!({ "estimate_passes": passes, "estimate_failures": failures, "depths": rows }),
            ))
        });
    }

    let quaternionic = sys.m == 4 && sys.k == 2 && sys.variant != Variant::Standard;
    if quaternionic {
        match verify_explicit_eigenfunctions(sys, cfg.samples.min(200), cfg.seed) {
            Ok(rep) => {
                let quad_ok = rep.quadratic_max_rel.map_or(true, |q| q <= tol::EIGENMAP_REL * scale);
                let ok = rep.chart_max_residual <= tol::CHART_RESIDUAL * scale
                    && rep.coordinate_max_rel <= tol::EIGENMAP_REL * scale
                    && quad_ok
                    && rep.independence_min_gram_eig > 1e-3;
                let metrics = serde_json::to_value(&rep).unwrap_or(Value::Null);
                sink.push("spectral.explicit_eigenfunctions", pass_if(ok), metrics.clone());
                if let Some(certified) = &rep.certified {
                    sink.push(
                        "spectral.group_spectrum_bound",
                        pass_if(ok),
                        json!({ "certified": certified }),
                    );
                } else {
                    let reason = rep
                        .not_verifiable
                        .clone()
                        .unwrap_or_else(|| "no pointwise certificate exists".into());
                    sink.push(
                        "spectral.group_spectrum_bound",
                        ClaimStatus::NotVerifiable,
                        json!({ "reason": reason }),
                    );
                }
            }
            Err(e) => {
                let metrics = json!({ "error": e.to_string() });
                sink.push("spectral.explicit_eigenfunctions", ClaimStatus::Fail, metrics.clone());
                sink.push("spectral.group_spectrum_bound", ClaimStatus::Fail, metrics);
            }
        }
    } else {
        sink.not_applicable(
            "spectral.explicit_eigenfunctions",
            "claims the quaternionic (4,2) families",
        );
        sink.not_applicable(
            "spectral.group_spectrum_bound",
            "claims the quaternionic (4,2) families",
        );
    }
    sink.claims
}

/// Outcome of diffing a written report against the claim registry.
#[derive(Clone, Debug, Serialize)]
pub struct AuditOutcome {
    pub registered: usize,
    pub reported: usize,
    /// Registry claims absent from the report (uncovered statements).
    pub missing: Vec<String>,
    /// Report claims absent from the registry (stale or foreign ids).
    pub unknown: Vec<String>,
    /// Ids that appear more than once in the report.
    pub duplicates: Vec<String>,
}

impl AuditOutcome {
    pub fn clean(&self) -> bool {
        self.missing.is_empty() && self.unknown.is_empty() && self.duplicates.is_empty()
    }
}

pub fn audit_report(path: &Path) -> Result<AuditOutcome> {
    let text = std::fs::read_to_string(path)?;
    let report: VerificationReport = serde_json::from_str(&text)?;
    Ok(audit_claims(&report.claims))
}

pub fn audit_claims(claims: &[Claim]) -> AuditOutcome {
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    for c in claims {
        *seen.entry(c.id.as_str()).or_default() += 1;
    }
    let missing = CLAIM_REGISTRY
        .iter()
        .filter(|(id, _, _)| !seen.contains_key(id))
        .map(|(id, _, _)| id.to_string())
        .collect();
    let registry_ids: Vec<&str> = CLAIM_REGISTRY.iter().map(|(id, _, _)| *id).collect();
    let unknown = seen
        .keys()
        .filter(|id| !registry_ids.contains(*id))
        .map(|id| id.to_string())
        .collect();
    let duplicates = seen
        .iter()
        .filter(|(_, n)| **n > 1)
        .map(|(id, _)| id.to_string())
        .collect();
    AuditOutcome {
        registered: CLAIM_REGISTRY.len(),
        reported: claims.len(),
        missing,
        unknown,
        duplicates,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_ids_are_unique_and_suite_prefixed() {
        let mut ids = Vec::new();
        for (id, suite, statement) in CLAIM_REGISTRY {
            assert!(id.starts_with(&format!("{suite}.")), "{id} not under {suite}");
            assert!(!statement.is_empty());
            assert!(SuiteId::parse(suite).is_ok());
            ids.push(id);
        }
        let n = ids.len();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), n, "duplicate claim ids");
    }

    #[test]
    fn config_resolution_prefers_flags_over_file() {
        let file = ConfigFile {
            m: Some(2),
            k: Some(2),
            variant: Some("standard".into()),
            seed: Some(11),
            samples: Some(50),
            suites: Some(vec!["clifford".into(), "sigma".into()]),
            ..ConfigFile::default()
        };
        let ov = Overrides {
            m: Some(4),
            variant: Some("q-opposite".into()),
            k: Some(2),
            ..Overrides::default()
        };
        let cfg = resolve_config(Some(&file), &ov).unwrap();
        assert_eq!((cfg.m, cfg.k), (4, 2));
        assert_eq!(cfg.variant, Variant::QuaternionOpposite);
        assert_eq!(cfg.seed, 11);
        assert_eq!(cfg.samples, 50);
        assert_eq!(cfg.suites, vec![SuiteId::Clifford, SuiteId::Curvature]);

        assert!(resolve_config(None, &Overrides { samples: Some(0), ..Overrides::default() })
            .is_err());
        assert!(resolve_config(
            None,
            &Overrides { tolerance_scale: Some(-1.0), ..Overrides::default() }
        )
        .is_err());
        assert!(resolve_config(
            None,
            &Overrides { variant: Some("diagonal".into()), ..Overrides::default() }
        )
        .is_err());
    }

    #[test]
    fn suite_selection_orders_and_dedups() {
        let cfg = RunConfig {
            suites: vec![SuiteId::Spectral, SuiteId::Clifford, SuiteId::Spectral],
            ..RunConfig::default()
        };
        assert_eq!(cfg.selected_suites(), vec![SuiteId::Clifford, SuiteId::Spectral]);
        assert_eq!(RunConfig::default().selected_suites().len(), 7);
        assert!(SuiteId::parse("warp").is_err());
    }

    #[test]
    fn claim_status_labels_roundtrip_through_json() {
        for status in [
            ClaimStatus::Pass,
            ClaimStatus::Fail,
            ClaimStatus::EstimatePass,
            ClaimStatus::EstimateFail,
            ClaimStatus::NotApplicable,
            ClaimStatus::NotVerifiable,
        ] {
            let text = serde_json::to_string(&status).unwrap();
            assert_eq!(text, format!("\"{}\"", status.label()));
            let back: ClaimStatus = serde_json::from_str(&text).unwrap();
            assert_eq!(back, status);
        }
        assert!(ClaimStatus::Fail.gates());
        assert!(!ClaimStatus::EstimateFail.gates());
        assert!(!ClaimStatus::NotVerifiable.gates());
    }

    #[test]
    fn exact_suites_pass_and_reports_are_deterministic() {
        let cfg = RunConfig {
            samples: 12,
            seed: 5,
            suites: vec![SuiteId::Clifford, SuiteId::Forms, SuiteId::Manifolds],
            ..RunConfig::default()
        };
        let report = run(&cfg).unwrap();
        assert_eq!(report.claims.len(), 9);
        for claim in &report.claims {
            if claim.suite == "clifford" && claim.id.contains("discriminant") {
                assert_eq!(claim.status, ClaimStatus::NotApplicable, "{claim:?}");
            } else {
                assert_eq!(claim.status, ClaimStatus::Pass, "{claim:?}");
            }
        }
        assert!(report.gating_failures().is_empty());

        let again = run(&cfg).unwrap();
        let mut a = serde_json::to_value(&report).unwrap();
        let mut b = serde_json::to_value(&again).unwrap();
        a.as_object_mut().unwrap().remove("timing");
        b.as_object_mut().unwrap().remove("timing");
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap(),
            "reports must be byte-identical apart from wall-clock timing"
        );
    }

    #[test]
    fn degenerate_systems_report_not_applicable_without_failing() {
        let cfg = RunConfig {
            m: 3,
            k: 1,
            samples: 8,
            suites: vec![SuiteId::Forms, SuiteId::Calculus],
            ..RunConfig::default()
        };
        let report = run(&cfg).unwrap();
        let by_id = |id: &str| report.claims.iter().find(|c| c.id == id).unwrap();
        assert_eq!(by_id("forms.gradient_identity").status, ClaimStatus::NotApplicable);
        assert_eq!(by_id("forms.laplace_identity").status, ClaimStatus::NotApplicable);
        assert_eq!(by_id("forms.degenerate_guard").status, ClaimStatus::Pass);
        assert_eq!(by_id("calculus.minimality").status, ClaimStatus::NotApplicable);
        assert!(report.gating_failures().is_empty());
    }

    #[test]
    fn audits_catch_missing_unknown_and_duplicate_claims() {
        let mk = |id: &str| Claim {
            id: id.into(),
            suite: "clifford".into(),
            statement: String::new(),
            status: ClaimStatus::Pass,
            metrics: Value::Null,
        };
        let claims =
            vec![mk("clifford.exact_relations"), mk("clifford.exact_relations"), mk("warp.core")];
        let outcome = audit_claims(&claims);
        assert!(!outcome.clean());
        assert!(outcome.unknown.contains(&"warp.core".to_string()));
        assert!(outcome.duplicates.contains(&"clifford.exact_relations".to_string()));
        assert!(outcome.missing.contains(&"spectral.sphere_calibration".to_string()));
        assert_eq!(outcome.registered, CLAIM_REGISTRY.len());

        let full: Vec<Claim> =
            CLAIM_REGISTRY.iter().map(|(id, _, _)| mk(id)).collect();
        assert!(audit_claims(&full).clean());
    }

    #[test]
    fn artifacts_and_report_land_in_the_output_directory() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig {
            samples: 6,
            suites: vec![SuiteId::Manifolds],
            out_dir: Some(dir.path().to_path_buf()),
            ..RunConfig::default()
        };
        let report = run(&cfg).unwrap();
        assert!(report.gating_failures().is_empty());
        let report_path = dir.path().join("report.json");
        let outcome = audit_report(&report_path).unwrap();
        assert_eq!(outcome.reported, 2);
        assert!(outcome.unknown.is_empty() && outcome.duplicates.is_empty());
        assert!(dir.path().join("points").join("m1.csv").exists());
        assert!(dir.path().join("points").join("n1.csv").exists());
        let text = std::fs::read_to_string(dir.path().join("points").join("m1.csv")).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "x0,x1,x2,x3,x4,x5");
        assert_eq!(lines.clone().count(), 6);
        assert!(lines.all(|l| l.split(',').count() == 6));
    }

    #[test]
    fn summary_lines_tally_every_claim() {
        let cfg = RunConfig {
            samples: 6,
            suites: vec![SuiteId::Clifford],
            ..RunConfig::default()
        };
        let report = run(&cfg).unwrap();
        let lines = report.summary_lines();
        assert_eq!(lines.len(), report.claims.len() + 1);
        assert!(lines[0].contains("clifford.exact_relations"));
        assert!(lines.last().unwrap().contains("4 claims"));
    }
}
