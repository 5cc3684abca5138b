//! Thresholding a learned clearance estimate into a collision verdict.
//!
//! A single scalar threshold `d*` turns the regressor into a classifier: a
//! configuration is predicted free when its estimated clearance is at least
//! `d*`. Raising `d*` trades missed collisions for false alarms; the
//! planner exploits this by walking a decreasing threshold schedule as its
//! time budget burns down, starting conservative and growing permissive.

use crate::clearancenet::{ClearanceModel, DataBatch};
use crate::cspace::{Environment, ExtendedConfig};
use crate::dataset::ClearanceSample;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Predicted-free test: estimated clearance at or above the threshold.
///
/// Lowering `d_star` is monotonically more permissive: it can only turn
/// collision verdicts into free verdicts, never the reverse.
pub fn classify(model: &ClearanceModel, cfg: &ExtendedConfig, d_star: f64) -> Result<bool> {
    Ok(model.forward(cfg)? >= d_star)
}

/// A decreasing threshold ladder with the elapsed times at which the
/// planner steps down a rung.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSchedule {
    thresholds: Vec<f64>,
    switch_times: Vec<f64>,
    index: usize,
}

impl ThresholdSchedule {
    /// `thresholds` must be strictly decreasing, `switch_times` strictly
    /// increasing and positive, both the same nonempty length. The final
    /// switch time may be infinite to pin the last rung.
    pub fn new(thresholds: Vec<f64>, switch_times: Vec<f64>) -> Result<Self> {
        if thresholds.is_empty() || thresholds.len() != switch_times.len() {
            return Err(Error::InvalidConstruction(format!(
                "schedule needs equal nonempty lengths, got {} thresholds and {} switch times",
                thresholds.len(),
                switch_times.len()
            )));
        }
        for pair in thresholds.windows(2) {
            if !(pair[1] < pair[0]) {
                return Err(Error::InvalidConstruction(format!(
                    "thresholds must strictly decrease, got {} then {}",
                    pair[0], pair[1]
                )));
            }
        }
        for (i, &t) in switch_times.iter().enumerate() {
            if !(t > 0.0) {
                return Err(Error::InvalidConstruction(format!(
                    "switch time {i} is {t}, must be positive"
                )));
            }
        }
        for pair in switch_times.windows(2) {
            if !(pair[1] > pair[0]) {
                return Err(Error::InvalidConstruction(format!(
                    "switch times must strictly increase, got {} then {}",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(ThresholdSchedule {
            thresholds,
            switch_times,
            index: 0,
        })
    }

    /// Currently active threshold.
    pub fn current(&self) -> f64 {
        self.thresholds[self.index]
    }

    /// Zero-based index of the active rung.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Step down one rung when the elapsed time has passed the active
    /// rung's switch time. Called once per planner iteration; a long stall
    /// therefore descends one rung per call, and a second call within the
    /// same time bucket is a no-op.
    pub fn advance(&mut self, t_elapsed: f64) {
        if t_elapsed > self.switch_times[self.index] {
            self.index = (self.index + 1).min(self.thresholds.len() - 1);
        }
    }
}

/// File-format form of a schedule: thresholds plus switch points expressed
/// as fractions of the per-query time budget. The last rung never expires,
/// so there is one fraction fewer than thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub thresholds: Vec<f64>,
    pub switch_fractions: Vec<f64>,
}

impl Default for ScheduleSpec {
    /// Built-in schedule: start 5 cm conservative, relax to exact, then
    /// slightly permissive, switching at 25% and 50% of the budget.
    fn default() -> Self {
        ScheduleSpec {
            thresholds: vec![0.05, 0.0, -0.02],
            switch_fractions: vec![0.25, 0.5],
        }
    }
}

impl ScheduleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.thresholds.is_empty() {
            return Err(Error::InvalidConstruction(
                "schedule has no thresholds".into(),
            ));
        }
        if self.switch_fractions.len() + 1 != self.thresholds.len() {
            return Err(Error::InvalidConstruction(format!(
                "schedule needs one switch fraction per threshold step, got {} fractions for {} thresholds",
                self.switch_fractions.len(),
                self.thresholds.len()
            )));
        }
        for pair in self.thresholds.windows(2) {
            if !(pair[1] < pair[0]) {
                return Err(Error::InvalidConstruction(
                    "schedule thresholds must strictly decrease".into(),
                ));
            }
        }
        for (i, &f) in self.switch_fractions.iter().enumerate() {
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::InvalidConstruction(format!(
                    "switch fraction {i} is {f}, must lie in (0, 1)"
                )));
            }
        }
        for pair in self.switch_fractions.windows(2) {
            if !(pair[1] > pair[0]) {
                return Err(Error::InvalidConstruction(
                    "switch fractions must strictly increase".into(),
                ));
            }
        }
        Ok(())
    }

    /// Turn fractions into absolute switch times against a concrete budget.
    pub fn materialize(&self, t_max: f64) -> Result<ThresholdSchedule> {
        self.validate()?;
        if !(t_max > 0.0) {
            return Err(Error::InvalidConstruction(format!(
                "time budget {t_max} must be positive"
            )));
        }
        let mut switch_times: Vec<f64> =
            self.switch_fractions.iter().map(|f| f * t_max).collect();
        switch_times.push(f64::INFINITY);
        ThresholdSchedule::new(self.thresholds.clone(), switch_times)
    }
}

/// Confusion counts of the thresholded model against oracle labels.
///
/// Collision is the positive class: `tp` counts true collisions flagged as
/// collisions, `fp` counts free configurations falsely flagged, `fn`
/// counts collisions the classifier let through.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionReport {
    pub env: String,
    pub d_star: f64,
    pub n: usize,
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub accuracy: f64,
    pub fp_rate: f64,
    pub fn_rate: f64,
}

impl ConfusionReport {
    pub fn csv_header() -> &'static str {
        "env,d_star,n,tp,tn,fp,fn,accuracy"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.env, self.d_star, self.n, self.tp, self.tn, self.fp, self.fn_, self.accuracy
        )
    }
}

/// Evaluate the thresholded model over labeled samples.
///
/// The counts are order-invariant sums, so any permutation of
/// `eval_samples` produces the identical report.
pub fn confusion(
    model: &ClearanceModel,
    env: &Environment,
    eval_samples: &[ClearanceSample],
    d_star: f64,
) -> Result<ConfusionReport> {
    if eval_samples.is_empty() {
        return Err(Error::InvalidConstruction(
            "confusion needs at least one sample".into(),
        ));
    }
    let batch = DataBatch::from_configs(eval_samples.iter().map(|s| &s.cfg))?;
    let predictions = model.forward_batch(&batch)?;
    let (mut tp, mut tn, mut fp, mut fn_) = (0usize, 0usize, 0usize, 0usize);
    for (sample, &pred) in eval_samples.iter().zip(&predictions) {
        let actual_collision = sample.d <= 0.0;
        let predicted_collision = pred < d_star;
        match (actual_collision, predicted_collision) {
            (true, true) => tp += 1,
            (false, false) => tn += 1,
            (false, true) => fp += 1,
            (true, false) => fn_ += 1,
        }
    }
    let n = eval_samples.len();
    let rate = |num: usize, den: usize| {
        if den == 0 {
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    Ok(ConfusionReport {
        env: env.name().to_string(),
        d_star,
        n,
        tp,
        tn,
        fp,
        fn_,
        accuracy: (tp + tn) as f64 / n as f64,
        fp_rate: rate(fp, fp + tn),
        fn_rate: rate(fn_, fn_ + tp),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_rejects_nondecreasing_thresholds() {
        assert!(ThresholdSchedule::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(ThresholdSchedule::new(vec![0.0, 0.1], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn schedule_rejects_unsorted_switch_times() {
        assert!(ThresholdSchedule::new(vec![0.1, 0.0], vec![2.0, 1.0]).is_err());
        assert!(ThresholdSchedule::new(vec![0.1, 0.0], vec![-1.0, 1.0]).is_err());
    }

    #[test]
    fn schedule_advances_one_rung_per_call() {
        let mut s =
            ThresholdSchedule::new(vec![0.1, 0.0, -0.05], vec![1.0, 3.0, f64::INFINITY]).unwrap();
        assert_eq!(s.current(), 0.1);
        // Mid-bucket: advancing at t=1.5 from the first rung moves to the
        // second and stays there on a repeat call.
        s.advance(1.5);
        assert_eq!(s.current(), 0.0);
        s.advance(1.5);
        assert_eq!(s.current(), 0.0);
        // Past the second switch: down to the floor rung, which never
        // expires.
        s.advance(3.5);
        assert_eq!(s.current(), -0.05);
        s.advance(1e12);
        assert_eq!(s.current(), -0.05);
        assert_eq!(s.index(), 2);
    }

    #[test]
    fn advance_is_monotone_in_elapsed_time() {
        let spec = ScheduleSpec::default();
        let base = spec.materialize(10.0).unwrap();
        let mut last_index = 0;
        for k in 0..100 {
            let t = 0.12 * k as f64;
            let mut s = base.clone();
            // Feed the same elapsed time repeatedly until the schedule
            // settles; later times must never settle on an earlier rung.
            for _ in 0..s.len() {
                s.advance(t);
            }
            assert!(s.index() >= last_index, "rung regressed at t={t}");
            last_index = s.index();
        }
        assert_eq!(last_index, 2);
    }

    #[test]
    fn default_spec_materializes_against_budget() {
        let s = ScheduleSpec::default().materialize(8.0).unwrap();
        assert_eq!(s.current(), 0.05);
        let mut s2 = s.clone();
        s2.advance(2.0); // exactly the switch point: not yet past it
        assert_eq!(s2.current(), 0.05);
        s2.advance(2.001);
        assert_eq!(s2.current(), 0.0);
    }

    #[test]
    fn spec_validation_catches_shape_errors() {
        let bad = ScheduleSpec {
            thresholds: vec![0.05, 0.0],
            switch_fractions: vec![0.25, 0.5],
        };
        assert!(bad.validate().is_err());
        let bad = ScheduleSpec {
            thresholds: vec![0.05, 0.0],
            switch_fractions: vec![1.5],
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn lower_threshold_is_never_less_permissive() {
        // Pure threshold arithmetic: any prediction passed by d_star is
        // also passed by every lower threshold.
        let predictions = [-0.3, -0.01, 0.0, 0.004, 0.2];
        let mut thresholds = vec![0.1, 0.05, 0.0, -0.02, -0.4];
        thresholds.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for &p in &predictions {
            let mut was_free = false;
            for &t in &thresholds {
                let free = p >= t;
                assert!(!was_free || free, "prediction {p} flipped at threshold {t}");
                was_free = free;
            }
        }
    }
}
