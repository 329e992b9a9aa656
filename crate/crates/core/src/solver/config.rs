use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::nonlinearity::GrowthParams;
use crate::weights::WeightProfile;

use super::fem::MeshSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMode {
    /// Path deformation from 0 to e0.
    MountainPass,
    /// Descent on the Nehari manifold t -> max_t I(t v).
    Nehari,
}

/// Backtracking parameters for descent steps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepRule {
    pub initial: f64,
    pub shrink: f64,
    pub armijo: f64,
    pub max_backtracks: usize,
}

impl Default for StepRule {
    fn default() -> Self {
        Self { initial: 1.0, shrink: 0.5, armijo: 1e-4, max_backtracks: 40 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySpec {
    pub test_directions: usize,
    pub weak_tolerance: f64,
    pub refinement_tolerance: f64,
    pub extended_radius: f64,
}

impl Default for VerifySpec {
    fn default() -> Self {
        Self { test_directions: 10, weak_tolerance: 1e-5, refinement_tolerance: 0.02, extended_radius: 40.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveConfig {
    pub growth: GrowthParams,
    pub weight: WeightProfile,
    pub mesh: MeshSpec,
    pub mode: SolveMode,
    pub path_points: usize,
    /// Stop when the beta-norm of the gradient drops below this.
    pub tolerance: f64,
    /// Hand the path maximizer to Newton once its gradient norm is below this.
    pub handoff: f64,
    /// Cap on descent plus Newton iterations.
    pub max_iterations: usize,
    pub step: StepRule,
    /// Width of the Gaussian direction used for e0.
    pub direction_width: f64,
    pub probe_directions: usize,
    pub seed: u64,
    pub verify: VerifySpec,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            growth: GrowthParams::default(),
            weight: WeightProfile::power(0.5, 3.0).expect("valid default weight"),
            mesh: MeshSpec::default(),
            mode: SolveMode::MountainPass,
            path_points: 64,
            tolerance: 1e-6,
            handoff: 5e-2,
            max_iterations: 2000,
            step: StepRule::default(),
            direction_width: 1.0,
            probe_directions: 32,
            seed: 0,
            verify: VerifySpec::default(),
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        self.growth.validate()?;
        self.mesh.validate()?;
        if (self.weight.beta() - self.growth.beta).abs() > 1e-15 {
            return invalid(format!("weight beta {} differs from nonlinearity beta {}", self.weight.beta(), self.growth.beta));
        }
        if self.path_points < 3 {
            return invalid("path needs at least three points");
        }
        for (name, v) in [("tolerance", self.tolerance), ("handoff", self.handoff), ("direction_width", self.direction_width)] {
            if !(v > 0.0 && v.is_finite()) {
                return invalid(format!("{name} must be positive, got {v}"));
            }
        }
        let s = &self.step;
        if !(s.initial > 0.0) || !(s.shrink > 0.0 && s.shrink < 1.0) || !(s.armijo > 0.0 && s.armijo < 1.0) {
            return invalid("step rule needs initial > 0, shrink and armijo in (0, 1)");
        }
        if self.max_iterations == 0 {
            return invalid("max_iterations must be positive");
        }
        let v = &self.verify;
        if v.test_directions == 0 || !(v.weak_tolerance > 0.0) || !(v.refinement_tolerance > 0.0) || !(v.extended_radius > self.mesh.radius) {
            return invalid("verification needs test directions, positive tolerances and an extended radius beyond R");
        }
        Ok(())
    }
}
