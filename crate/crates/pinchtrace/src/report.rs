//! Per-trial inequality reports, the JSON-lines record every harness
//! command emits.

use crate::scalar::{violation_scale, Scalar};

/// One trial's values and violation flags. Every report carries enough
/// (seed, parameters) to regenerate the instance bit-exactly.
#[derive(Debug, Clone)]
pub struct InequalityReport<S: Scalar> {
    pub trial: u64,
    pub seed: u64,
    pub dim: usize,
    pub n: usize,
    pub m: usize,
    /// Word average A_{n,m}(A,B).
    pub average: S,
    /// Pinched common part A_{n,m}(A, E_A(B)).
    pub pinched: S,
    /// Clustered word Tr(A^n B^m).
    pub clustered: S,
    /// average - pinched: the noncommutative gap.
    pub gap: S,
    /// average - clustered: the remainder R_{n,m} of the old upper bound.
    pub clustered_margin: S,
    /// Tr exp(n log A + m log B), when computed (float trials only).
    pub log_exp_anchor: Option<f64>,
    pub pinching_violated: bool,
    pub clustered_violated: bool,
    pub wall_time_ms: f64,
}

impl<S: Scalar> InequalityReport<S> {
    /// Build from the three values; flags follow the run tolerance with
    /// scale = max(|average|, |clustered|, |pinched|, 1e-300).
    pub fn from_values(
        trial: u64,
        seed: u64,
        dim: usize,
        n: usize,
        m: usize,
        average: S,
        pinched: S,
        clustered: S,
        tol: f64,
    ) -> Self {
        let gap = average.clone() - pinched.clone();
        let clustered_margin = average.clone() - clustered.clone();
        let scale = violation_scale(&[
            average.magnitude(),
            clustered.magnitude(),
            pinched.magnitude(),
        ]);
        let pinching_violated = gap.real_part() < -tol * scale;
        let clustered_violated = clustered_margin.real_part() > tol * scale;
        InequalityReport {
            trial,
            seed,
            dim,
            n,
            m,
            average,
            pinched,
            clustered,
            gap,
            clustered_margin,
            log_exp_anchor: None,
            pinching_violated,
            clustered_violated,
            wall_time_ms: 0.0,
        }
    }

    /// Both sandwich inequalities hold (pinched <= average <= clustered
    /// within the run tolerance).
    pub fn sandwich_ok(&self) -> bool {
        !self.pinching_violated && !self.clustered_violated
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::json!({
            "trial": self.trial,
            "seed": self.seed,
            "dim": self.dim,
            "n": self.n,
            "m": self.m,
            "mode": S::MODE.as_str(),
            "average": self.average.json_value(),
            "pinched_average": self.pinched.json_value(),
            "clustered": self.clustered.json_value(),
            "gap": self.gap.json_value(),
            "clustered_margin": self.clustered_margin.json_value(),
            "flags": {
                "pinching_violated": self.pinching_violated,
                "clustered_violated": self.clustered_violated,
            },
            "wall_time_ms": self.wall_time_ms,
        });
        if let Some(anchor) = self.log_exp_anchor {
            v["log_exp_anchor"] = serde_json::json!(anchor);
        }
        v
    }
}
