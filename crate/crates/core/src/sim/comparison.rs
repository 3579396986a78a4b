//! Monte Carlo comparison of standard and privileged ERM against their bounds.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{bound_erm, bound_pr, sufficient_condition, BoundInputs, LogBase, PREMISE_TOLERANCE};
use crate::constructions::{construct_theorem1, construct_theorem5_family};
use crate::domain::FiniteDomain;
use crate::erm::{erm_privileged_with, erm_standard, SolverOptions, DEFAULT_PAIR_BUDGET};
use crate::error::{Error, Result};
use crate::hypothesis::HypothesisClass;
use crate::io::ClassFile;
use crate::loss::exact_true_error;
use crate::sample::FiniteDistribution;
use crate::vc::{build_aux_class, exact_vc};

use super::sampler::{trial_seed, Sampler};
use super::with_threads;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ClassesSpec {
    /// Explicit member lists over `X` and `X*`.
    Explicit { h: ClassFile, phi: ClassFile },
    /// The paired construction with VC dimension `d` on both sides.
    Theorem1 { d: usize },
    /// Every labeling of `X` and of `X*`.
    Full { x_size: usize, xstar_size: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DistributionSpec {
    /// `{"kind": "table", "support": [{"x", "xstar", "y", "p"}, ...]}`.
    Table(FiniteDistribution),
    /// The paired family built on a shattered set of `Φ`.
    Theorem5 {
        eps: f64,
        delta: f64,
        #[serde(default)]
        heavy_side: Option<Vec<bool>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub distribution: DistributionSpec,
    pub classes: ClassesSpec,
    pub m: usize,
    pub trials: usize,
    pub delta: f64,
    pub seed: u64,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default)]
    pub log_base: LogBase,
    /// Pair count up to which the privileged solver scans exhaustively.
    #[serde(default = "default_pair_budget")]
    pub pair_budget: u64,
    /// Branch-and-bound node limit; trials exceeding it are recorded as failed.
    #[serde(default)]
    pub node_limit: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<std::path::PathBuf>,
}

fn default_c() -> f64 {
    1.0
}

fn default_pair_budget() -> u64 {
    DEFAULT_PAIR_BUDGET
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dimensions {
    pub d: usize,
    pub dstar: usize,
    pub d_a: usize,
}

/// Classes, distribution and exact VC dimensions resolved from a config.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub h: HypothesisClass,
    pub phi: HypothesisClass,
    pub distribution: FiniteDistribution,
    pub dims: Dimensions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub eps_erm: f64,
    pub eps_ig: f64,
    pub eps_u: f64,
    pub true_err_erm: f64,
    pub true_err_pr: f64,
    pub b_erm: f64,
    pub b_pr: f64,
    pub covered_erm: bool,
    pub covered_pr: bool,
    /// `None` when `ε_ERM ≠ ε_ig + ε_u`, where the sufficient condition does not apply.
    pub sufficient_holds: Option<bool>,
    pub pr_leq_erm: bool,
    /// `P[φ̂(X*) = 1]` and `P[ĥ errs ∧ φ̂(X*) = 0]`; their sum bounds `true_err_pr`.
    pub p_ignored: f64,
    pub p_unexplained: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub seed: u64,
    pub record: Option<TrialRecord>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub trials: usize,
    pub effective_trials: usize,
    pub failed_trials: usize,
    pub dims: Dimensions,
    pub delta: f64,
    pub coverage_erm: f64,
    pub coverage_pr: f64,
    pub coverage_erm_se: f64,
    pub coverage_pr_se: f64,
    pub mean_true_err_erm: f64,
    pub mean_true_err_pr: f64,
    pub mean_eps_erm: f64,
    pub mean_eps_ig: f64,
    pub mean_eps_u: f64,
    pub mean_b_erm: f64,
    pub mean_b_pr: f64,
    pub pr_leq_erm_rate: f64,
    pub sufficient_applicable: usize,
    pub sufficient_holds: usize,
    pub lemma4_violations: usize,
    pub decomposition_violations: usize,
}

#[derive(Debug, Clone)]
pub struct ComparisonRun {
    pub outcomes: Vec<TrialOutcome>,
    pub summary: Summary,
}

fn full_class(label: &str, n: usize) -> Result<HypothesisClass> {
    HypothesisClass::full(Arc::new(FiniteDomain::new(label, n)?))
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::param("trials must be at least 1"));
        }
        if self.m == 0 {
            return Err(Error::param("sample size m must be at least 1"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::param(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if self.c <= 0.0 || !self.c.is_finite() {
            return Err(Error::param(format!("C must be positive, got {}", self.c)));
        }
        Ok(())
    }

    /// Builds the classes and distribution and computes `d`, `d*` and `d_a` exactly.
    pub fn prepare(&self) -> Result<Experiment> {
        self.validate()?;
        let (h, phi) = match &self.classes {
            ClassesSpec::Explicit { h, phi } => (
                h.clone().into_class(crate::domain::INSTANCE)?,
                phi.clone().into_class(crate::domain::PRIVILEGED)?,
            ),
            ClassesSpec::Theorem1 { d } => {
                let t = construct_theorem1(*d)?;
                (t.h, t.phi)
            }
            ClassesSpec::Full { x_size, xstar_size } => (
                full_class(crate::domain::INSTANCE, *x_size)?,
                full_class(crate::domain::PRIVILEGED, *xstar_size)?,
            ),
        };
        h.require_nonempty()?;
        phi.require_nonempty()?;
        let distribution = match &self.distribution {
            DistributionSpec::Table(support) => support.clone(),
            DistributionSpec::Theorem5 { eps, delta, heavy_side } => {
                construct_theorem5_family(&phi, *eps, *delta, heavy_side.as_deref())?.1
            }
        };
        distribution.check(h.domain().size(), phi.domain().size())?;
        let dims = Dimensions {
            d: exact_vc(&h)?.vc,
            dstar: exact_vc(&phi)?.vc,
            d_a: exact_vc(&build_aux_class(&h, &phi)?)?.vc,
        };
        Ok(Experiment {
            h,
            phi,
            distribution,
            dims,
        })
    }
}

fn run_trial(cfg: &ExperimentConfig, exp: &Experiment, sampler: &Sampler, trial: usize) -> TrialOutcome {
    let seed = trial_seed(cfg.seed, trial as u64);
    let opts = SolverOptions {
        pair_budget: cfg.pair_budget,
        node_limit: cfg.node_limit,
    };
    let result = (|| -> Result<TrialRecord> {
        let s = sampler.draw_sample(cfg.m, &mut super::sampler::rng_for(seed));
        let erm = erm_standard(&exp.h, &s)?;
        let pr = erm_privileged_with(&exp.h, &exp.phi, &s, cfg.c, &opts)?;
        let inputs = BoundInputs {
            m: cfg.m as u64,
            delta: cfg.delta,
            d: exp.dims.d,
            dstar: exp.dims.dstar,
            d_a: exp.dims.d_a,
            eps_erm: erm.empirical_error,
            eps_ig: pr.ignored_weight,
            eps_u: pr.unexplained_error,
            log_base: cfg.log_base,
        };
        let b_erm = bound_erm(&inputs)?;
        let b_pr = bound_pr(&inputs)?;
        let sufficient_holds = if (inputs.eps_erm - inputs.eps_ig - inputs.eps_u).abs() <= PREMISE_TOLERANCE {
            Some(sufficient_condition(&inputs)?.holds)
        } else {
            None
        };
        let true_err_erm = exact_true_error(&erm.h, &exp.distribution)?;
        let true_err_pr = exact_true_error(&pr.h, &exp.distribution)?;
        let p_ignored = exp.distribution.probability(|t| pr.phi.at(t.xstar));
        let p_unexplained = exp.distribution.probability(|t| pr.h.at(t.x) != t.y && !pr.phi.at(t.xstar));
        Ok(TrialRecord {
            trial,
            seed,
            eps_erm: inputs.eps_erm,
            eps_ig: inputs.eps_ig,
            eps_u: inputs.eps_u,
            true_err_erm,
            true_err_pr,
            b_erm,
            b_pr,
            covered_erm: true_err_erm <= b_erm,
            covered_pr: true_err_pr <= b_pr,
            sufficient_holds,
            pr_leq_erm: b_pr <= b_erm,
            p_ignored,
            p_unexplained,
        })
    })();
    match result {
        Ok(record) => TrialOutcome {
            trial,
            seed,
            record: Some(record),
            failure: None,
        },
        Err(e) => TrialOutcome {
            trial,
            seed,
            record: None,
            failure: Some(e.to_string()),
        },
    }
}

fn mean(xs: impl Iterator<Item = f64>, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        xs.sum::<f64>() / n as f64
    }
}

fn binomial_se(p: f64, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        (p * (1.0 - p) / n as f64).sqrt()
    }
}

/// Aggregates outcomes in trial order; failed trials are counted but excluded
/// from rates and means.
pub fn summarize(outcomes: &[TrialOutcome], dims: Dimensions, delta: f64) -> Summary {
    let recs: Vec<&TrialRecord> = outcomes.iter().filter_map(|o| o.record.as_ref()).collect();
    let n = recs.len();
    let count = |f: &dyn Fn(&TrialRecord) -> bool| recs.iter().filter(|r| f(r)).count();
    let coverage_erm = mean(recs.iter().map(|r| f64::from(u8::from(r.covered_erm))), n);
    let coverage_pr = mean(recs.iter().map(|r| f64::from(u8::from(r.covered_pr))), n);
    Summary {
        trials: outcomes.len(),
        effective_trials: n,
        failed_trials: outcomes.len() - n,
        dims,
        delta,
        coverage_erm,
        coverage_pr,
        coverage_erm_se: binomial_se(coverage_erm, n),
        coverage_pr_se: binomial_se(coverage_pr, n),
        mean_true_err_erm: mean(recs.iter().map(|r| r.true_err_erm), n),
        mean_true_err_pr: mean(recs.iter().map(|r| r.true_err_pr), n),
        mean_eps_erm: mean(recs.iter().map(|r| r.eps_erm), n),
        mean_eps_ig: mean(recs.iter().map(|r| r.eps_ig), n),
        mean_eps_u: mean(recs.iter().map(|r| r.eps_u), n),
        mean_b_erm: mean(recs.iter().map(|r| r.b_erm), n),
        mean_b_pr: mean(recs.iter().map(|r| r.b_pr), n),
        pr_leq_erm_rate: mean(recs.iter().map(|r| f64::from(u8::from(r.pr_leq_erm))), n),
        sufficient_applicable: count(&|r| r.sufficient_holds.is_some()),
        sufficient_holds: count(&|r| r.sufficient_holds == Some(true)),
        lemma4_violations: count(&|r| r.eps_erm > r.eps_ig + r.eps_u + 1e-12),
        decomposition_violations: count(&|r| r.true_err_pr > r.p_ignored + r.p_unexplained + 1e-12),
    }
}

/// Runs every trial of `cfg`. Output is identical for any thread count.
pub fn run_comparison(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<ComparisonRun> {
    let exp = cfg.prepare()?;
    run_prepared(cfg, &exp, threads)
}

pub fn run_prepared(cfg: &ExperimentConfig, exp: &Experiment, threads: Option<usize>) -> Result<ComparisonRun> {
    cfg.validate()?;
    let sampler = Sampler::new(&exp.distribution);
    let outcomes: Vec<TrialOutcome> = with_threads(threads, || {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| run_trial(cfg, exp, &sampler, t))
            .collect()
    })?;
    let summary = summarize(&outcomes, exp.dims, cfg.delta);
    Ok(ComparisonRun { outcomes, summary })
}
