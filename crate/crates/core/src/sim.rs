//! Seeded Monte Carlo runs of the separation, discrimination and cloning
//! pipelines, tallied against the closed-form rates.
//!
//! Every trial draws from its own ChaCha8 stream keyed by `(seed, trial)`, so
//! the counts do not depend on how trials are split across threads.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cloning::{as_separation_task, CloningTask, TaskMode};
use crate::discrimination::{build_helstrom_measurement, interpolated_rates, HelstromMeasurement};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::separation::{build_optimal_operation, diagnose, SeparationTask, TwoOutcomeOperation};
use crate::states::StatePair;

pub const SUCCESS: &str = "success";
pub const FAILURE: &str = "failure";
pub const CORRECT: &str = "correct";
pub const ERROR: &str = "error";
pub const INCONCLUSIVE: &str = "inconclusive";
pub const CLONED: &str = "cloned";
pub const FAILED: &str = "failed";

/// Branch probabilities this close to 0 or 1 are sampled as exactly 0 or 1.
const CERTAINTY_SNAP: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pipeline {
    Separation,
    SeparationThenHelstrom,
    Cloning,
}

impl Pipeline {
    pub fn as_str(&self) -> &'static str {
        match self {
            Pipeline::Separation => "separation",
            Pipeline::SeparationThenHelstrom => "discrimination",
            Pipeline::Cloning => "cloning",
        }
    }
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Pipeline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "separation" | "separation_only" => Ok(Pipeline::Separation),
            "discrimination" | "separation_then_helstrom" => Ok(Pipeline::SeparationThenHelstrom),
            "cloning" => Ok(Pipeline::Cloning),
            other => Err(Error::Domain(format!(
                "unknown pipeline '{other}' (expected separation, discrimination or cloning)"
            ))),
        }
    }
}

/// How branch probabilities are obtained for each trial.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Sampling {
    /// Precomputed `|μ±|²` and projector expectations.
    #[default]
    ClosedForm,
    /// Evolve the ambient state vector through the operators every trial.
    StateVector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    pub pipeline: Pipeline,
    pub execution: Execution,
    pub sampling: Sampling,
}

impl SimConfig {
    pub fn new(trials: u64, seed: u64, pipeline: Pipeline) -> Result<Self> {
        if trials < 1 {
            return Err(Error::Domain("trials must be >= 1".into()));
        }
        Ok(Self {
            trials,
            seed,
            pipeline,
            execution: Execution::default(),
            sampling: Sampling::default(),
        })
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn with_sampling(mut self, sampling: Sampling) -> Self {
        self.sampling = sampling;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationReport {
    pub trials: u64,
    pub counts: BTreeMap<String, u64>,
    pub frequencies: BTreeMap<String, f64>,
    /// Binomial standard error `√(f(1 - f)/trials)`.
    pub stderr: BTreeMap<String, f64>,
    pub expected: BTreeMap<String, f64>,
    /// `(f - expected) / max(stderr, 1/trials)`
    pub z_scores: BTreeMap<String, f64>,
}

impl SimulationReport {
    fn from_counts(trials: u64, outcomes: &[(&str, u64, f64)]) -> Self {
        let mut report = SimulationReport {
            trials,
            counts: BTreeMap::new(),
            frequencies: BTreeMap::new(),
            stderr: BTreeMap::new(),
            expected: BTreeMap::new(),
            z_scores: BTreeMap::new(),
        };
        let n = trials as f64;
        for &(label, count, expected) in outcomes {
            let f = count as f64 / n;
            let se = (f * (1.0 - f) / n).sqrt();
            let z = (f - expected) / se.max(1.0 / n);
            report.counts.insert(label.to_string(), count);
            report.frequencies.insert(label.to_string(), f);
            report.stderr.insert(label.to_string(), se);
            report.expected.insert(label.to_string(), expected);
            report.z_scores.insert(label.to_string(), z);
        }
        report
    }

    pub fn max_abs_z(&self) -> f64 {
        self.z_scores.values().fold(0.0, |m, z| m.max(z.abs()))
    }

    pub fn all_within(&self, z_limit: f64) -> bool {
        self.max_abs_z() <= z_limit
    }

    pub fn count(&self, label: &str) -> u64 {
        self.counts.get(label).copied().unwrap_or(0)
    }

    pub fn frequency(&self, label: &str) -> f64 {
        self.frequencies.get(label).copied().unwrap_or(0.0)
    }
}

fn snap(p: f64) -> f64 {
    if p >= 1.0 - CERTAINTY_SNAP {
        1.0
    } else if p <= CERTAINTY_SNAP {
        0.0
    } else {
        p
    }
}

/// What a single trial needs to know about the physics.
struct TrialModel<'a> {
    task: &'a SeparationTask,
    op: &'a TwoOutcomeOperation,
    helstrom: Option<HelstromMeasurement>,
    sampling: Sampling,
    /// Closed-form `P(success | ±)`.
    p_success: [f64; 2],
    /// Closed-form `P(correct | success, ±)`.
    p_correct: [f64; 2],
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Success,
    Failure,
    Correct,
    Wrong,
}

impl<'a> TrialModel<'a> {
    fn new(
        task: &'a SeparationTask,
        op: &'a TwoOutcomeOperation,
        helstrom: Option<HelstromMeasurement>,
        sampling: Sampling,
    ) -> Result<Self> {
        let (pp, pm) = op.success_probabilities();
        let mut p_correct = [1.0, 1.0];
        if let Some(m) = &helstrom {
            let [tp, tm] = task.target_coords();
            p_correct = [snap(m.prob_plus(tp)?), snap(1.0 - m.prob_plus(tm)?)];
        }
        Ok(Self {
            task,
            op,
            helstrom,
            sampling,
            p_success: [snap(pp), snap(pm)],
            p_correct,
        })
    }

    fn run(&self, rng: &mut ChaCha8Rng) -> Outcome {
        let branch = usize::from(rng.gen::<f64>() >= 0.5);
        match self.sampling {
            Sampling::ClosedForm => {
                if rng.gen::<f64>() >= self.p_success[branch] {
                    return Outcome::Failure;
                }
                match &self.helstrom {
                    None => Outcome::Success,
                    Some(_) if rng.gen::<f64>() < self.p_correct[branch] => Outcome::Correct,
                    Some(_) => Outcome::Wrong,
                }
            }
            Sampling::StateVector => self.run_state_vector(branch, rng),
        }
    }

    fn run_state_vector(&self, branch: usize, rng: &mut ChaCha8Rng) -> Outcome {
        let initial = self.task.initial();
        let psi = if branch == 0 {
            initial.plus()
        } else {
            initial.minus()
        };
        let image = self
            .op
            .apply_success(self.task, psi.vector())
            .expect("state lives in the task's input space");
        let p = snap(image.norm_sqr());
        if rng.gen::<f64>() >= p {
            return Outcome::Failure;
        }
        let Some(m) = &self.helstrom else {
            return Outcome::Success;
        };
        let coords = self
            .task
            .output_basis()
            .coords(&image.normalized().expect("nonzero after success"))
            .expect("output dimension");
        let p_plus = m.prob_plus(&coords).expect("2D coordinates");
        let p_right = snap(if branch == 0 { p_plus } else { 1.0 - p_plus });
        if rng.gen::<f64>() < p_right {
            Outcome::Correct
        } else {
            Outcome::Wrong
        }
    }
}

/// Tallies `[success, failure, correct, wrong]` over all trials.
fn tally(model: &TrialModel<'_>, config: &SimConfig) -> [u64; 4] {
    let base = ChaCha8Rng::seed_from_u64(config.seed);
    config.execution.fold_range(
        0..config.trials as usize,
        || [0u64; 4],
        |mut acc, t| {
            let mut rng = base.clone();
            rng.set_stream(t as u64);
            let idx = match model.run(&mut rng) {
                Outcome::Success => 0,
                Outcome::Failure => 1,
                Outcome::Correct => 2,
                Outcome::Wrong => 3,
            };
            acc[idx] += 1;
            acc
        },
        |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]],
    )
}

/// Prepares ± with probability ½ and records whether the operation succeeds.
pub fn run_separation(
    task: &SeparationTask,
    op: &TwoOutcomeOperation,
    config: &SimConfig,
) -> Result<SimulationReport> {
    let model = TrialModel::new(task, op, None, config.sampling)?;
    let [success, failure, ..] = tally(&model, config);
    let p_s = diagnose(op, task).p_s;
    Ok(SimulationReport::from_counts(
        config.trials,
        &[(SUCCESS, success, p_s), (FAILURE, failure, 1.0 - p_s)],
    ))
}

/// Optimal separation followed by minimum-error detection of the targets.
pub fn run_discrimination_pipeline(
    task: &SeparationTask,
    config: &SimConfig,
) -> Result<SimulationReport> {
    let op = build_optimal_operation(task)?;
    let helstrom = build_helstrom_measurement(task.target())?;
    let model = TrialModel::new(task, &op, Some(helstrom), config.sampling)?;
    let [_, inconclusive, correct, wrong] = tally(&model, config);
    let rates = interpolated_rates(task.alpha_mag(), task.beta_mag())?;
    Ok(SimulationReport::from_counts(
        config.trials,
        &[
            (CORRECT, correct, rates.p_d),
            (ERROR, wrong, rates.p_e),
            (INCONCLUSIVE, inconclusive, rates.p_i),
        ],
    ))
}

/// Runs the Gram-mode separation equivalent of an `N`-from-`M` cloning task.
pub fn run_cloning(task: &CloningTask, config: &SimConfig) -> Result<SimulationReport> {
    let sep = as_separation_task(task, TaskMode::Gram)?;
    let op = build_optimal_operation(&sep)?;
    let model = TrialModel::new(&sep, &op, None, config.sampling)?;
    let [cloned, failed, ..] = tally(&model, config);
    let bound = task.bound()?;
    Ok(SimulationReport::from_counts(
        config.trials,
        &[(CLONED, cloned, bound), (FAILED, failed, 1.0 - bound)],
    ))
}

/// Overlap magnitudes and copy numbers for [`simulate`].
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PipelineParams {
    pub alpha: f64,
    pub beta: Option<f64>,
    pub m: Option<usize>,
    pub n: Option<usize>,
}

/// Builds the optimal task for `config.pipeline` and runs it.
pub fn simulate(config: &SimConfig, params: &PipelineParams) -> Result<SimulationReport> {
    match config.pipeline {
        Pipeline::Separation | Pipeline::SeparationThenHelstrom => {
            let beta = params
                .beta
                .ok_or_else(|| Error::Domain(format!("pipeline {} needs beta", config.pipeline)))?;
            let task = SeparationTask::from_overlaps(params.alpha, beta)?;
            if config.pipeline == Pipeline::Separation {
                let op = build_optimal_operation(&task)?;
                run_separation(&task, &op, config)
            } else {
                run_discrimination_pipeline(&task, config)
            }
        }
        Pipeline::Cloning => {
            let (Some(m), Some(n)) = (params.m, params.n) else {
                return Err(Error::Domain("pipeline cloning needs m and n".into()));
            };
            let task = CloningTask::new(StatePair::with_overlap(params.alpha)?, m, n)?;
            run_cloning(&task, config)
        }
    }
}
