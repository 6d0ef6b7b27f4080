//! Scenario configuration. Every struct rejects unknown keys; semantic
//! checks that serde cannot express live in [`crate::build`].

use std::path::PathBuf;

use nambu_core::grid::AxisKind;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default)]
    pub seed: u64,
    pub system: SystemConfig,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check_dynamics: Option<SampleCheckConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check_liouville: Option<SampleCheckConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check_symmetry: Option<SymmetryConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invariant: Option<InvariantConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub momentum: Option<MomentumConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<ActionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize, JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Nambu,
    Hamiltonian,
}

/// Either a built-in (`builtin` + `params`) or user expressions:
/// `hamiltonians` (n−1 of them) for Nambu systems, `hamiltonian` plus
/// `dof` for Hamiltonian ones.
#[derive(Debug, Clone, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub kind: SystemKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonians: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dof: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<RegionConfig>,
}

#[derive(Debug, Clone, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize, JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    Rk4Fixed,
    Rk45Adaptive,
}

#[derive(Debug, Clone, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub method: MethodName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rtol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<usize>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { method: MethodName::Rk4Fixed, h: Some(1e-3), rtol: None, atol: None, max_steps: None }
    }
}

/// One term `coeff · basis` of a differential form. `basis` is a wedge of
/// coordinate differentials such as `dx1^dx3`, `dq1^dp1` or `dx2^dt`, or `1`
/// for a function.
#[derive(Debug, Clone, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct FormTerm {
    pub basis: String,
    pub coeff: String,
}

/// Samples on a periodic grid at fixed time: `parametric` expressions in
/// `u` (and `v` for two-cycles), or a CSV file with columns
/// `index,t,x1..xn` in row-major order.
#[derive(Debug, Clone, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct CycleConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parametric: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    pub samples: Vec<usize>,
    #[serde(default)]
    pub t: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    #[schemars(with = "AxisKindSchema")]
    pub kind: AxisKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lo: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hi: Option<f64>,
    pub n: usize,
}

#[derive(Debug, Clone, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parametric: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    pub axes: Vec<AxisConfig>,
    #[serde(default)]
    pub t: f64,
}

/// `steps + 1` equispaced times from `start` to `end`.
#[derive(Debug, Clone, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize, JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum Expect {
    #[default]
    Pass,
    Fail,
}

#[derive(Debug, Clone, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct CandidateConfig {
    pub label: String,
    /// `n + 1` components, time last.
    pub xi: Vec<String>,
    #[serde(default)]
    pub chi: Vec<FormTerm>,
    #[serde(default)]
    pub expect: Expect,
}

#[derive(Debug, Clone, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub start: Vec<f64>,
    #[serde(default)]
    pub t0: f64,
    pub t1: f64,
    /// Record every `every`-th integrator step (the endpoint is always kept).
    #[serde(default = "one")]
    pub every: usize,
    /// When set, the relative drift of every time-independent Hamiltonian
    /// must stay below this.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conserve_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle: Option<CycleConfig>,
}

#[derive(Debug, Clone, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SampleCheckConfig {
    #[serde(default = "hundred")]
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<RegionConfig>,
}

#[derive(Debug, Clone, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SymmetryConfig {
    pub candidates: Vec<CandidateConfig>,
    #[serde(default = "two_hundred")]
    pub samples: usize,
    #[serde(default = "symmetry_tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize, JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum Conservation {
    #[default]
    Conserved,
    NotConserved,
}

/// Relative (`cycle`) and/or absolute (`chain`) sweeps for Nambu systems;
/// conserved functions along trajectories from `starts` for Hamiltonian ones.
#[derive(Debug, Clone, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct InvariantConfig {
    pub candidate: CandidateConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle: Option<CycleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<ChainConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<TimeGrid>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub starts: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default = "drift_tol")]
    pub drift_tol: f64,
    #[serde(default = "absolute_tol")]
    pub absolute_drift_tol: f64,
    #[serde(default = "absolute_tol")]
    pub stokes_tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_value: Option<f64>,
    #[serde(default = "drift_tol")]
    pub value_tol: f64,
    #[serde(default)]
    pub expect: Conservation,
    #[serde(default = "two_hundred")]
    pub precheck_samples: usize,
    #[serde(default = "symmetry_tol")]
    pub precheck_tol: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub label: String,
    pub xi: Vec<String>,
    /// `P`: a one-form (Nambu, n = 3), an (n−2)-form in general, or a
    /// function (Hamiltonian).
    pub p: Vec<FormTerm>,
    #[serde(default)]
    pub expect: Expect,
}

#[derive(Debug, Clone, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct CombinationTerm {
    pub generator: usize,
    pub coeff: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct CombinationConfig {
    pub label: String,
    pub terms: Vec<CombinationTerm>,
}

#[derive(Debug, Clone, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    pub generator: Vec<String>,
    pub p1: String,
    pub p2: String,
    pub lambdas: Vec<f64>,
    #[serde(default = "linearity_tol")]
    pub tol: f64,
}

/// Adds a closed form to generator `generator`'s candidate and checks that
/// the check still passes and cycle integrals are unchanged.
#[derive(Debug, Clone, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct GaugeConfig {
    pub generator: usize,
    pub shift: Vec<FormTerm>,
    pub cycles: Vec<CycleConfig>,
    #[serde(default = "gauge_tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct MomentumConfig {
    pub generators: Vec<GeneratorConfig>,
    #[serde(default)]
    pub combinations: Vec<CombinationConfig>,
    #[serde(default = "two_hundred")]
    pub samples: usize,
    #[serde(default = "symmetry_tol")]
    pub tol: f64,
    #[serde(default = "linearity_tol")]
    pub linearity_tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<ScalingConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge: Option<GaugeConfig>,
    /// Hamiltonian systems: trajectory starts for the `Ṗ = 0` check.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub starts: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default = "pdot_tol")]
    pub pdot_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize, JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum TimeAxisKind {
    #[default]
    Chebyshev,
    Uniform,
}

#[derive(Debug, Clone, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    pub cycle: CycleConfig,
    pub t2: f64,
    #[serde(default = "thirty_three")]
    pub time_samples: usize,
    #[serde(default)]
    pub time_axis: TimeAxisKind,
}

#[derive(Debug, Clone, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryConfig {
    pub start: Vec<f64>,
    #[serde(default)]
    pub t1: f64,
    pub t2: f64,
    #[serde(default = "thirty_three")]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize, JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum VariationExpect {
    /// `δS = O(ε²)`: fitted slope at least `min_slope`.
    Extremal,
    /// `δS/ε` at the smallest `ε` matches the boundary prediction.
    Boundary,
    /// `δS = 0` exactly.
    Zero,
}

#[derive(Debug, Clone, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct VariationConfig {
    pub label: String,
    /// Spatial components (the time component is zero).
    pub w: Vec<String>,
    #[serde(default)]
    pub clamp: Vec<bool>,
    pub expect: VariationExpect,
}

#[derive(Debug, Clone, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ActionConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<SurfaceConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<TrajectoryConfig>,
    pub variations: Vec<VariationConfig>,
    #[serde(default = "epsilon_ladder")]
    pub epsilons: Vec<f64>,
    #[serde(default = "min_slope")]
    pub min_slope: f64,
    #[serde(default = "boundary_rtol")]
    pub boundary_rtol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_action: Option<f64>,
    #[serde(default = "action_tol")]
    pub action_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize, JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum StudyKind {
    /// Endpoint error of the fixed-step integrator over an `h` ladder.
    IntegratorOrder,
    /// A cycle integral over a sample-count ladder.
    CycleQuadrature,
    /// The surface action over a ladder of uniform time columns.
    SurfaceAction,
}

#[derive(Debug, Clone, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub kind: StudyKind,
    pub label: String,
    /// Step sizes (integrator-order) or sample counts (others).
    pub ladder: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    /// Closed-form solution in `t` (integrator-order).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_solution: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<Vec<FormTerm>>,
    /// Loop in `u` (cycle-quadrature, surface-action).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle: Option<Vec<String>>,
    /// Loop samples for surface-action studies.
    #[serde(default = "sixty_four")]
    pub cycle_samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_value: Option<f64>,
    /// Resolution of the reference solution when no exact value is known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order_max: Option<f64>,
    /// Bound on the error at the finest resolution.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_error_max: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub studies: Vec<StudyConfig>,
}

fn one() -> usize {
    1
}
fn hundred() -> usize {
    100
}
fn two_hundred() -> usize {
    200
}
fn thirty_three() -> usize {
    33
}
fn sixty_four() -> usize {
    64
}
fn symmetry_tol() -> f64 {
    1e-8
}
fn drift_tol() -> f64 {
    1e-6
}
fn absolute_tol() -> f64 {
    1e-5
}
fn linearity_tol() -> f64 {
    1e-12
}
fn gauge_tol() -> f64 {
    1e-10
}
fn pdot_tol() -> f64 {
    1e-9
}
fn epsilon_ladder() -> Vec<f64> {
    vec![1e-2, 3e-3, 1e-3, 3e-4, 1e-4]
}
fn min_slope() -> f64 {
    1.9
}
fn boundary_rtol() -> f64 {
    0.05
}
fn action_tol() -> f64 {
    1e-9
}

/// Axis sampling: periodic `[0, 2π)`, Chebyshev or uniform on `[lo, hi]`.
#[derive(JsonSchema)]
#[schemars(rename = "AxisKind")]
#[serde(rename_all = "lowercase")]
#[allow(dead_code)]
enum AxisKindSchema {
    Periodic,
    Chebyshev,
    Uniform,
}

/// JSON schema of [`ScenarioConfig`].
pub fn schema() -> schemars::schema::RootSchema {
    schemars::schema_for!(ScenarioConfig)
}

/// Parses JSON, reporting the failing field path on error.
pub fn parse(text: &str) -> Result<ScenarioConfig, crate::error::ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        crate::error::ConfigError::new(if path == "." { String::new() } else { path }, e.into_inner().to_string())
    })
}
