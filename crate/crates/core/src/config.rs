//! Flat tool configuration shared by every subcommand.

use serde::{Deserialize, Serialize};

use crate::components::Connectivity;
use crate::ellipse::FitPoints;
use crate::error::{Error, Result};
use crate::metric::{Averaging, MetricConfig, SingletonPolicy};
use crate::pipeline::{StitchOptions, WindowSpec};
use crate::postprocess::PostprocessParams;

/// Every tunable, one key each. Stored as a flat `key = value` document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToolConfig {
    pub n_subsets: u32,
    pub epsilon: f64,
    pub kernel_length: u32,
    pub kernel_thickness: u32,
    pub fit_points: FitPoints,
    pub window: u32,
    pub core: u32,
    pub threshold: f32,
    pub averaging: Averaging,
    pub singleton_policy: SingletonPolicy,
    pub connectivity: Connectivity,
    pub count_unassigned_in_ei: bool,
    pub seed: u64,
}

impl Default for ToolConfig {
    fn default() -> Self {
        let pp = PostprocessParams::default();
        let win = WindowSpec::default();
        let metric = MetricConfig::default();
        ToolConfig {
            n_subsets: pp.n_subsets,
            epsilon: pp.epsilon,
            kernel_length: pp.kernel_length,
            kernel_thickness: pp.kernel_thickness,
            fit_points: pp.fit_points,
            window: win.window,
            core: win.core,
            threshold: StitchOptions::default().threshold,
            averaging: metric.averaging,
            singleton_policy: metric.singleton_policy,
            connectivity: metric.connectivity,
            count_unassigned_in_ei: metric.count_unassigned_in_ei,
            seed: 0,
        }
    }
}

impl ToolConfig {
    pub fn postprocess_params(&self) -> PostprocessParams {
        PostprocessParams {
            n_subsets: self.n_subsets,
            epsilon: self.epsilon,
            kernel_length: self.kernel_length,
            kernel_thickness: self.kernel_thickness,
            connectivity: Connectivity::Eight,
            fit_points: self.fit_points,
        }
    }

    pub fn window_spec(&self) -> WindowSpec {
        WindowSpec {
            window: self.window,
            core: self.core,
        }
    }

    pub fn stitch_options(&self) -> StitchOptions {
        StitchOptions {
            threshold: self.threshold,
        }
    }

    pub fn metric_config(&self) -> MetricConfig {
        MetricConfig {
            averaging: self.averaging,
            singleton_policy: self.singleton_policy,
            connectivity: self.connectivity,
            count_unassigned_in_ei: self.count_unassigned_in_ei,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.postprocess_params().validate()?;
        self.window_spec().validate()?;
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::contract(format!("threshold must lie in [0, 1], got {}", self.threshold)));
        }
        Ok(())
    }
}
