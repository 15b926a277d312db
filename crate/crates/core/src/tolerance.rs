use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by every analysis step.
///
/// The rank and algebra thresholds are relative: the effective rank threshold
/// of a matrix is `rank_rel * sigma_max * n`, and the Jacobi threshold of an
/// algebra is `alg_rel * (max |c| + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rank_rel: f64,
    pub num: f64,
    pub alg_rel: f64,
    pub levi_rel: f64,
    pub flow: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank_rel: 1e-9,
            num: 1e-9,
            alg_rel: 1e-9,
            levi_rel: 1e-7,
            flow: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn rank_threshold(&self, sigma_max: f64, n: usize) -> f64 {
        self.rank_rel * sigma_max * n.max(1) as f64
    }

    pub fn jacobi_threshold(&self, max_abs_constant: f64) -> f64 {
        self.alg_rel * (max_abs_constant + 1.0)
    }

    pub fn levi_threshold(&self, max_abs_constant: f64) -> f64 {
        self.levi_rel * max_abs_constant.max(1.0)
    }
}
