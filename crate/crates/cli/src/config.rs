//! Experiment configuration files.

use std::path::{Path, PathBuf};

use flmc::diagnostics::Coupling;
use flmc::dynamics::{Algorithm, InitSpec, RunConfig};
use flmc::objectives::{make_benchmark, BenchmarkParams, Objective};
use flmc::theory_bounds::AssumptionConstants;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveSpec {
    pub name: String,
    pub dim: usize,
    #[serde(default)]
    pub params: BenchmarkParams,
}

impl ObjectiveSpec {
    pub fn build(&self) -> flmc::Result<Box<dyn Objective>> {
        make_benchmark(&self.name, self.dim, &self.params)
    }
}

/// Quadrature grid for the one-dimensional Gibbs reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GibbsGrid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Default for GibbsGrid {
    fn default() -> Self {
        Self {
            lo: -50.0,
            hi: 50.0,
            n: 1 << 16,
        }
    }
}

fn one() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

fn eight() -> usize {
    8
}

fn resamples() -> usize {
    flmc::diagnostics::BOOTSTRAP_RESAMPLES
}

fn sixty_four() -> usize {
    64
}

fn probes() -> usize {
    100_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Study {
    Optimize {
        /// Report the fraction of final states within this distance of the
        /// global minimizer.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<f64>,
    },
    Sample {
        /// Order of the distance to the Gibbs reference.
        #[serde(default = "one")]
        q: f64,
        #[serde(default)]
        grid: GibbsGrid,
    },
    WeakError {
        etas: Vec<f64>,
        #[serde(default = "eight")]
        refinement: usize,
        /// Defaults to `run.replicas`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        replicas: Option<usize>,
        /// Defaults to the planned `q` for the objective at `run.alpha`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        q: Option<f64>,
        #[serde(default)]
        coupling: Coupling,
        #[serde(default = "resamples")]
        bootstrap: usize,
        #[serde(default = "sixty_four")]
        projections: usize,
        /// Also compare against the reference at twice the refinement.
        #[serde(default)]
        doubling: bool,
    },
    Bounds {
        ks: Vec<u64>,
        etas: Vec<f64>,
        #[serde(default = "half")]
        margin: f64,
    },
    Plan {
        /// Defaults to the certificate exponent of the objective.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<f64>,
        #[serde(default = "half")]
        margin: f64,
    },
    Verify {
        #[serde(default = "probes")]
        probes: usize,
        /// Defaults to `[run.alpha]`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alphas: Option<Vec<f64>>,
    },
}

impl Study {
    pub fn kind(&self) -> &'static str {
        match self {
            Study::Optimize { .. } => "optimize",
            Study::Sample { .. } => "sample",
            Study::WeakError { .. } => "weak_error",
            Study::Bounds { .. } => "bounds",
            Study::Plan { .. } => "plan",
            Study::Verify { .. } => "verify",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub objective: ObjectiveSpec,
    pub run: RunConfig,
    pub study: Study,
    /// Not part of the echoed config: where results go does not affect them.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Overrides of the certificate-derived constants, by serialized name.
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub constants: Map<String, Value>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        // The parser's message ends with the line and column.
        serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(vec![format!("{}: {e}", path.display())]))
    }

    /// Every violated constraint, one message each.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.schema_version != SCHEMA_VERSION {
            out.push(format!(
                "schema_version must be {SCHEMA_VERSION}, got {}",
                self.schema_version
            ));
        }
        out.extend(self.run.violations());
        let obj = match self.objective.build() {
            Ok(o) => Some(o),
            Err(e) => {
                out.push(format!("objective: {e}"));
                None
            }
        };
        if let (InitSpec::Point { x }, Some(_)) = (&self.run.init, &obj) {
            if x.len() != self.objective.dim {
                out.push(format!(
                    "run.init has dimension {} but the objective has {}",
                    x.len(),
                    self.objective.dim
                ));
            }
        }
        if let Some(obj) = &obj {
            if self.run.algorithm == Algorithm::Sgfla {
                match (obj.finite_sum(), self.run.batch_size) {
                    (None, _) => out.push(format!(
                        "algorithm sgfla needs a finite-sum objective; `{}` is not one",
                        obj.name()
                    )),
                    (Some(fs), Some(b)) if b > fs.n_components() => out.push(format!(
                        "batch_size {b} exceeds the {} components",
                        fs.n_components()
                    )),
                    _ => {}
                }
            }
            if !self.constants.is_empty() {
                if let Err(e) = self.assumption_constants(obj.as_ref(), self.run.alpha) {
                    out.push(e);
                }
            }
        }
        match &self.study {
            Study::Optimize { radius } => {
                if let Some(r) = radius {
                    if !(*r > 0.0 && r.is_finite()) {
                        out.push(format!("study.radius must be positive, got {r}"));
                    }
                }
            }
            Study::Sample { q, grid } => {
                if self.run.beta != 1.0 {
                    out.push(format!("sample studies run at beta = 1, got {}", self.run.beta));
                }
                if !(*q >= 1.0 && q.is_finite()) {
                    out.push(format!("study.q must be at least 1, got {q}"));
                }
                if !(grid.lo < grid.hi && grid.n >= 3) {
                    out.push("study.grid needs lo < hi and n >= 3".into());
                }
            }
            Study::WeakError {
                etas,
                refinement,
                replicas,
                q,
                projections,
                ..
            } => {
                if etas.len() < 3 {
                    out.push(format!("study.etas needs at least 3 values, got {}", etas.len()));
                }
                if etas.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
                    out.push("study.etas must all be positive".into());
                }
                if *refinement == 0 {
                    out.push("study.refinement must be at least 1".into());
                }
                if *replicas == Some(0) {
                    out.push("study.replicas must be at least 1".into());
                }
                if let Some(q) = q {
                    if !(*q >= 1.0 && q.is_finite()) {
                        out.push(format!("study.q must be at least 1, got {q}"));
                    }
                }
                if *projections == 0 {
                    out.push("study.projections must be at least 1".into());
                }
            }
            Study::Bounds { ks, etas, margin } => {
                if ks.is_empty() || etas.is_empty() {
                    out.push("study.ks and study.etas must be non-empty".into());
                }
                if etas.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
                    out.push("study.etas must all be positive".into());
                }
                if !(*margin > 0.0 && *margin < 1.0) {
                    out.push(format!("study.margin must lie in (0, 1), got {margin}"));
                }
            }
            Study::Plan { gamma, margin } => {
                if let Some(g) = gamma {
                    if !(0.0..1.0).contains(g) {
                        out.push(format!("study.gamma must lie in [0, 1), got {g}"));
                    }
                }
                if !(*margin > 0.0 && *margin < 1.0) {
                    out.push(format!("study.margin must lie in (0, 1), got {margin}"));
                }
            }
            Study::Verify { probes, alphas } => {
                if *probes == 0 {
                    out.push("study.probes must be at least 1".into());
                }
                if let Some(a) = alphas {
                    if a.is_empty() || a.iter().any(|a| !(*a > 1.0 && *a <= 2.0)) {
                        out.push("study.alphas must be non-empty and lie in (1, 2]".into());
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(CliError::Validation(v))
        }
    }

    /// Certificate constants at `alpha` with the configured overrides applied.
    pub fn assumption_constants(
        &self,
        obj: &dyn Objective,
        alpha: f64,
    ) -> Result<AssumptionConstants, String> {
        let cert = obj
            .certificate()
            .ok_or_else(|| format!("objective `{}` has no certificate", obj.name()))?;
        let base = AssumptionConstants::from_certificate(&cert, alpha, self.run.beta, obj.dim())
            .map_err(|e| format!("constants: {e}"))?;
        if self.constants.is_empty() {
            return Ok(base);
        }
        let Value::Object(mut fields) = serde_json::to_value(&base).map_err(|e| e.to_string())?
        else {
            unreachable!("constants serialize to an object")
        };
        for (key, value) in &self.constants {
            if !fields.contains_key(key) {
                return Err(format!("constants: unknown name `{key}`"));
            }
            fields.insert(key.clone(), value.clone());
        }
        let merged: AssumptionConstants = serde_json::from_value(Value::Object(fields))
            .map_err(|e| format!("constants: {e}"))?;
        merged.validate().map_err(|e| format!("constants: {e}"))?;
        Ok(merged)
    }
}
