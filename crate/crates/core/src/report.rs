//! Verification pipelines over parameter points, JSON reports and the CSV
//! sweep summary.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coaction::{coaction_suite, CoactionSummary};
use crate::conditions::ConditionReport;
use crate::error::{Error, Result};
use crate::homology::{chern_suite, check_lambda_equivalence, ChainDigest, ChernConfig};
use crate::ncalg::{confluence_check, Algebra};
use crate::quatlin::check_standard_relations;
use crate::rmatrix::{build_r_quaternionic, check_all_conditions, DeformParams};
use crate::scalars::{FloatComplex, GaussRational, Scalar, DEFAULT_FLOAT_TOL};
use crate::spheres::{
    build_projection, check_normality, compute_y, diagonalize_lambda, three_sphere_context, verify_three_sphere,
    verify_y_relations, SphereAlgebra, SphereKind, SPHERE_DEGREE_CAP,
};

/// Version of the JSON layout produced by [`RunReport::to_json`].
pub const SCHEMA_VERSION: &str = "1.0";

/// Exact parameter points shipped with the tool.
pub const CATALOG: [&str; 6] = ["1,0,0", "3/5,4/5,0", "3/5,0,4/5", "1/3,2/3,2/3", "7/25,24/25,0", "4/5,3/5,0"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Conditions,
    Algebra,
    Sphere,
    Chern,
    Coaction,
}

impl Task {
    pub const ALL: [Task; 5] = [Task::Conditions, Task::Algebra, Task::Sphere, Task::Chern, Task::Coaction];

    pub fn name(self) -> &'static str {
        match self {
            Task::Conditions => "conditions",
            Task::Algebra => "algebra",
            Task::Sphere => "sphere",
            Task::Chern => "chern",
            Task::Coaction => "coaction",
        }
    }

    pub fn prerequisite(self) -> Option<Task> {
        match self {
            Task::Conditions => None,
            Task::Algebra => Some(Task::Conditions),
            Task::Sphere => Some(Task::Algebra),
            Task::Chern | Task::Coaction => Some(Task::Sphere),
        }
    }

    /// `self` together with everything it depends on.
    pub fn closure(tasks: &BTreeSet<Task>) -> BTreeSet<Task> {
        let mut out = BTreeSet::new();
        for &t in tasks {
            let mut cur = Some(t);
            while let Some(c) = cur {
                out.insert(c);
                cur = c.prerequisite();
            }
        }
        out
    }
}

impl FromStr for Task {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Task::ALL
            .into_iter()
            .find(|t| t.name() == s.trim())
            .ok_or_else(|| Error::InvalidSpec(format!("unknown task `{s}`")))
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Exact,
    Float,
}

impl FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "exact" => Ok(Backend::Exact),
            "float" => Ok(Backend::Float),
            other => Err(Error::InvalidSpec(format!("unknown backend `{other}`"))),
        }
    }
}

/// What to verify at one parameter point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    /// `"u0,u1,u2"`; fractions for the exact backend, decimals allowed for float.
    pub params: String,
    pub backend: Backend,
    pub tasks: BTreeSet<Task>,
    /// Highest degree the sphere reducer may reach.
    pub degree_cap: usize,
    /// Degrees `1..=pbw_degree` are checked for the Hilbert series and confluence.
    pub pbw_degree: usize,
    /// Random reduction-order comparisons.
    pub pbw_trials: usize,
    /// Coinvariants are computed in degrees `1..=coinvariant_degree`.
    pub coinvariant_degree: usize,
    /// Float comparison tolerance; ignored by the exact backend.
    pub tol: Option<f64>,
    pub seed: u64,
}

impl Default for RunSpec {
    fn default() -> Self {
        Self {
            params: "3/5,4/5,0".into(),
            backend: Backend::Exact,
            tasks: Task::ALL.into_iter().collect(),
            degree_cap: SPHERE_DEGREE_CAP,
            pbw_degree: 4,
            pbw_trials: 50,
            coinvariant_degree: 2,
            tol: None,
            seed: 7,
        }
    }
}

impl RunSpec {
    pub fn with_params(&self, params: &str) -> Self {
        Self { params: params.to_string(), ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tasks.is_empty() {
            return Err(Error::InvalidSpec("no tasks requested".into()));
        }
        if self.degree_cap < 4 {
            return Err(Error::InvalidSpec(format!("degree cap {} is below 4", self.degree_cap)));
        }
        if let Some(t) = self.tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::InvalidSpec(format!("tolerance {t} is not a positive number")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskStatus {
    Pass,
    Fail,
    /// A prerequisite failed.
    Skipped,
    /// The computation itself raised an error.
    Error,
}

impl TaskStatus {
    pub fn label(self) -> &'static str {
        match self {
            TaskStatus::Pass => "pass",
            TaskStatus::Fail => "fail",
            TaskStatus::Skipped => "skipped",
            TaskStatus::Error => "error",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskReport {
    pub status: TaskStatus,
    pub checks: ConditionReport,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
}

impl TaskReport {
    fn from_checks(checks: ConditionReport) -> Self {
        let status = if checks.all_pass() { TaskStatus::Pass } else { TaskStatus::Fail };
        Self { status, checks, detail: None }
    }

    fn skipped(why: String) -> Self {
        Self { status: TaskStatus::Skipped, checks: ConditionReport::new(), detail: Some(why) }
    }

    fn error(e: &Error) -> Self {
        Self { status: TaskStatus::Error, checks: ConditionReport::new(), detail: Some(e.to_string()) }
    }
}

/// The eigenphase of the `*`-structure matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaInfo {
    /// `e^{i theta}` as an exact `(re,im)` pair when the eigenvalues are rational.
    pub phase_exact: Option<String>,
    pub phase_re: f64,
    pub phase_im: f64,
    pub theta: f64,
}

/// Facts about the point that are reported rather than asserted.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Observations {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub hilbert_dims: Option<Vec<usize>>,
    /// `Y^mu` normal (`[Y^mu*, Y^mu] = 0` modulo `x^2 = 1`), by `mu`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub y_normal: Option<BTreeMap<String, bool>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub chains: Option<BTreeMap<String, ChainDigest>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub coaction: Option<CoactionSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl Default for ToolInfo {
    fn default() -> Self {
        Self { name: "ncsphere".into(), version: env!("CARGO_PKG_VERSION").into() }
    }
}

/// Outcome of [`run`]. Timings are kept for text output and left out of JSON
/// so exact reports are reproducible byte for byte.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: String,
    pub tool: ToolInfo,
    pub spec: RunSpec,
    pub commutative: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub theta: Option<ThetaInfo>,
    pub tasks: BTreeMap<Task, TaskReport>,
    pub observations: Observations,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    pub all_pass: bool,
    #[serde(skip)]
    pub timings: Vec<(Task, Duration)>,
}

impl RunReport {
    fn invalid(spec: &RunSpec, e: &Error) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            tool: ToolInfo::default(),
            spec: spec.clone(),
            commutative: false,
            theta: None,
            tasks: BTreeMap::new(),
            observations: Observations::default(),
            error: Some(e.to_string()),
            all_pass: false,
            timings: Vec::new(),
        }
    }

    pub fn status(&self, task: Task) -> Option<TaskStatus> {
        self.tasks.get(&task).map(|t| t.status)
    }

    /// Pretty JSON with keys sorted at every level.
    pub fn to_json(&self) -> Result<String> {
        to_sorted_json(self)
    }
}

/// Serializes through `serde_json::Value`, whose maps are ordered by key.
pub fn to_sorted_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "point {} ({:?} backend){}", self.spec.params, self.spec.backend, if self.commutative { ", commutative" } else { "" })?;
        if let Some(e) = &self.error {
            writeln!(f, "  invalid: {e}")?;
        }
        if let Some(t) = &self.theta {
            let exact = t.phase_exact.as_deref().map(|p| format!(" = {p}")).unwrap_or_default();
            writeln!(f, "  e^(i theta){exact}, theta = {:.12}", t.theta)?;
        }
        let timing: BTreeMap<Task, Duration> = self.timings.iter().copied().collect();
        for (task, rep) in &self.tasks {
            let ms = timing.get(task).map(|d| format!(" [{:.2?}]", d)).unwrap_or_default();
            let n = rep.checks.checks.len();
            let failed = rep.checks.failures();
            writeln!(f, "  {:<10} {:<7} {n} checks{ms}", task.name(), rep.status.label())?;
            for name in failed {
                let c = &rep.checks.checks[name];
                writeln!(f, "    FAIL {name}: residual {:e}, witness {}", c.max_residual, c.witness)?;
            }
            if let Some(d) = &rep.detail {
                writeln!(f, "    {d}")?;
            }
        }
        if let Some(normal) = &self.observations.y_normal {
            let list: Vec<String> = normal.iter().map(|(k, v)| format!("Y{k}:{}", if *v { "normal" } else { "non-normal" })).collect();
            writeln!(f, "  observed {}", list.join(" "))?;
        }
        write!(f, "  overall {}", if self.all_pass { "PASS" } else { "FAIL" })
    }
}

/// Runs the requested tasks and their prerequisites in dependency order.
pub fn run(spec: &RunSpec) -> Result<RunReport> {
    spec.validate()?;
    match spec.backend {
        Backend::Exact => {
            let params = DeformParams::<GaussRational>::parse(&spec.params)
                .map_err(|e| Error::InvalidSpec(format!("exact backend needs rational parameters on the unit sphere: {e}")))?;
            Ok(run_with(spec, params))
        }
        Backend::Float => {
            let tol = spec.tol.unwrap_or(DEFAULT_FLOAT_TOL);
            let params = DeformParams::<FloatComplex>::parse_float(&spec.params)
                .map_err(|e| Error::InvalidSpec(format!("parameters: {e}")))?;
            Ok(FloatComplex::with_tolerance(tol, || run_with(spec, params)))
        }
    }
}

fn theta_info<S: Scalar>(params: &DeformParams<S>) -> ThetaInfo {
    let [u0, u1, u2] = params.as_f64();
    let s = (u1 * u1 + u2 * u2).sqrt();
    let (re, im) = (u0 * u0 - s * s, 2.0 * u0 * s);
    let exact = if S::EXACT { diagonalize_lambda(params).ok().map(|d| d.phase.to_string()) } else { None };
    ThetaInfo { phase_exact: exact, phase_re: re, phase_im: im, theta: im.atan2(re) }
}

/// The generic pipeline behind [`run`].
pub fn run_with<S: Scalar>(spec: &RunSpec, params: DeformParams<S>) -> RunReport {
    let wanted = Task::closure(&spec.tasks);
    let mut report = RunReport {
        schema_version: SCHEMA_VERSION.into(),
        tool: ToolInfo::default(),
        spec: spec.clone(),
        commutative: params.is_classical(),
        theta: Some(theta_info(&params)),
        tasks: BTreeMap::new(),
        observations: Observations::default(),
        error: None,
        all_pass: false,
        timings: Vec::new(),
    };

    let mut alg: Option<Arc<Algebra<S>>> = None;
    let mut seven: Option<SphereAlgebra<S>> = None;
    for task in Task::ALL.into_iter().filter(|t| wanted.contains(t)) {
        if let Some(pre) = task.prerequisite() {
            if report.status(pre) != Some(TaskStatus::Pass) {
                report.tasks.insert(task, TaskReport::skipped(format!("prerequisite `{pre}` did not pass")));
                continue;
            }
        }
        let start = Instant::now();
        let outcome: Result<ConditionReport> = (|| {
            match task {
                Task::Conditions => {
                    let mut rep = ConditionReport::new();
                    rep.extend_prefixed("j_matrices", check_standard_relations::<S>());
                    rep.extend_prefixed("r", check_all_conditions(&build_r_quaternionic(&params)?));
                    Ok(rep)
                }
                Task::Algebra => {
                    let a = Arc::new(Algebra::quaternionic(&params)?);
                    let conf = confluence_check(&a, spec.pbw_degree, spec.pbw_trials, spec.seed);
                    report.observations.hilbert_dims = Some(conf.dims.clone());
                    let mut rep = ConditionReport::new();
                    rep.extend_prefixed("pbw", conf.report);
                    rep.insert("central_x1_squared", a.centrality(&a.x1_squared()));
                    rep.insert("central_x2_squared", a.centrality(&a.x2_squared()));
                    rep.insert("central_x_squared", a.centrality(&a.x_squared()));
                    alg = Some(a);
                    Ok(rep)
                }
                Task::Sphere => {
                    let a = alg.clone().expect("algebra task ran");
                    let s = SphereAlgebra::with_cap(a.clone(), SphereKind::SevenSphere, spec.degree_cap)?;
                    let ys = compute_y(&a, &params);
                    let mut rep = ConditionReport::new();
                    rep.extend_prefixed("projection", build_projection(&a).check(&s, &ys));
                    rep.extend_prefixed("y", verify_y_relations(&s, &ys));
                    let three = SphereAlgebra::with_cap(a.clone(), SphereKind::Equator, spec.degree_cap)?;
                    rep.extend_prefixed("three_sphere", verify_three_sphere(&three, &ys));
                    let normality = check_normality(&s, &ys);
                    rep.insert("y_commutator_sum", normality.get("sum_vanishes").cloned().expect("always reported"));
                    if let Some(c) = normality.get("classical_degeneracy") {
                        rep.insert("y_classical_normal", c.clone());
                    }
                    let normal = (0..4)
                        .map(|mu| {
                            let non_normal = normality.get(&format!("non_normal_{mu}")).map(|c| c.pass).unwrap_or(false);
                            (mu.to_string(), !non_normal)
                        })
                        .collect();
                    report.observations.y_normal = Some(normal);
                    seven = Some(s);
                    Ok(rep)
                }
                Task::Chern => {
                    let s = seven.as_ref().expect("sphere task ran");
                    let a = s.algebra().clone();
                    let three = three_sphere_context(a.clone())?;
                    let ys = compute_y(&a, &params);
                    let res = chern_suite(s, &three, &build_projection(&a), &ys, &ChernConfig::default())?;
                    report.observations.chains = Some(res.digests);
                    let mut rep = res.report;
                    rep.extend_prefixed("lambda_equivalence", check_lambda_equivalence(s, &ys)?);
                    Ok(rep)
                }
                Task::Coaction => {
                    let s = seven.as_ref().expect("sphere task ran");
                    let ys = compute_y(s.algebra(), &params);
                    let res = coaction_suite(s, &ys, spec.coinvariant_degree)?;
                    report.observations.coaction = Some(res.summary);
                    Ok(res.report)
                }
            }
        })();
        report.timings.push((task, start.elapsed()));
        let tr = match outcome {
            Ok(checks) => TaskReport::from_checks(checks),
            Err(e) => TaskReport::error(&e),
        };
        report.tasks.insert(task, tr);
    }
    report.all_pass = report.tasks.values().all(|t| t.status == TaskStatus::Pass);
    report
}

/// Reports for several points plus the CSV summary.
pub struct SweepOutput {
    pub reports: Vec<RunReport>,
    pub csv: String,
}

impl SweepOutput {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.all_pass)
    }

    /// The reports as one JSON array, keys sorted.
    pub fn to_json(&self) -> Result<String> {
        to_sorted_json(&self.reports)
    }
}

/// Runs `base` at every point, independently and in parallel, keeping input order.
pub fn sweep(points: &[String], base: &RunSpec) -> Result<SweepOutput> {
    if points.is_empty() {
        return Err(Error::InvalidSpec("empty parameter list".into()));
    }
    base.validate()?;
    let reports: Vec<RunReport> = points
        .par_iter()
        .map(|p| {
            let spec = base.with_params(p);
            run(&spec).unwrap_or_else(|e| RunReport::invalid(&spec, &e))
        })
        .collect();
    let csv = summary_csv(&reports)?;
    Ok(SweepOutput { reports, csv })
}

/// One row per report: point, commutativity, per-task status, overall verdict and theta.
pub fn summary_csv(reports: &[RunReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["point".to_string(), "commutative".to_string()];
    header.extend(Task::ALL.iter().map(|t| t.name().to_string()));
    header.extend(["all_pass", "theta", "phase"].map(String::from));
    w.write_record(&header).map_err(csv_err)?;
    for r in reports {
        let mut row = vec![r.spec.params.clone(), r.commutative.to_string()];
        row.extend(Task::ALL.iter().map(|t| r.status(*t).map(|s| s.label()).unwrap_or("-").to_string()));
        row.push(r.all_pass.to_string());
        row.push(r.theta.as_ref().map(|t| format!("{:.12}", t.theta)).unwrap_or_default());
        row.push(r.theta.as_ref().and_then(|t| t.phase_exact.clone()).unwrap_or_default());
        w.write_record(&row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(std::io::Error::other(e)))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.into())
}

/// The catalog as owned strings.
pub fn catalog() -> Vec<String> {
    CATALOG.iter().map(|s| s.to_string()).collect()
}
