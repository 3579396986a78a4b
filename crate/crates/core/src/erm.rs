//! Standard ERM and the Privileged ERM solver.
//!
//! Both solvers work on per-sample masks: bit `i` of an error mask is
//! `h(x_i) ≠ y_i`, bit `i` of an ignore mask is `φ(x*_i) = 1`. With `I`
//! ignored and `U` unexplained (erring and not ignored) examples, the
//! privileged objective is `Σ ℓ'_C = I/C + U`.
//!
//! Minimizers are ranked by `(objective, I, h index, φ index)`, so among
//! equal objectives the pair ignoring the fewest examples wins.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::hypothesis::{Hypothesis, HypothesisClass};
use crate::loss::zero_one_loss;
use crate::sample::TripleSample;

/// Pair count up to which [`erm_privileged`] scans every pair.
pub const DEFAULT_PAIR_BUDGET: u64 = 1 << 20;

const PARALLEL_PAIRS: u64 = 1 << 16;

#[derive(Debug, Clone, Serialize)]
pub struct ErmResult {
    pub h: Hypothesis,
    pub h_index: usize,
    pub errors: usize,
    pub empirical_error: f64,
    pub minimizer_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Exhaustive,
    BranchAndBound,
}

#[derive(Debug, Clone, Serialize)]
pub struct PrivilegedErmResult {
    pub h: Hypothesis,
    pub phi: Hypothesis,
    pub h_index: usize,
    pub phi_index: usize,
    pub m: usize,
    pub c: f64,
    /// `Σ ℓ'_C` over the sample.
    pub objective_sum: f64,
    /// `objective_sum / m`; equals `ignored_weight + unexplained_error` at `C = 1`.
    pub objective: f64,
    pub ignored: usize,
    pub unexplained: usize,
    pub ignored_weight: f64,
    pub unexplained_error: f64,
    pub solver: SolverKind,
    pub pairs_examined: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalStats {
    pub ignored_weight: f64,
    pub unexplained_error: f64,
    pub raw_error: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Scan all pairs when `|H|·|Φ|` is at most this.
    pub pair_budget: u64,
    /// Abort branch-and-bound after evaluating this many pairs.
    pub node_limit: Option<u64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            pair_budget: DEFAULT_PAIR_BUDGET,
            node_limit: None,
        }
    }
}

/// The weight `C = num/den` held exactly, so objectives compare as integers
/// `den·I + num·U` (which is `C·den·Σℓ'_C`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct ExactWeight {
    num: u128,
    den: u128,
}

impl ExactWeight {
    fn from_f64(c: f64) -> Result<Self> {
        if c <= 0.0 || !c.is_finite() {
            return Err(Error::param(format!("C must be a positive finite real, got {c}")));
        }
        let bits = c.to_bits();
        let raw_exp = ((bits >> 52) & 0x7ff) as i32;
        let frac = bits & ((1u64 << 52) - 1);
        let (mut mant, mut exp) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        let tz = mant.trailing_zeros() as i32;
        mant >>= tz;
        exp += tz;
        let out_of_range = || Error::param(format!("C = {c} is outside the exactly supported range"));
        if exp >= 0 {
            if exp > 64 {
                return Err(out_of_range());
            }
            Ok(ExactWeight {
                num: u128::from(mant) << exp,
                den: 1,
            })
        } else {
            if -exp > 64 {
                return Err(out_of_range());
            }
            Ok(ExactWeight {
                num: u128::from(mant),
                den: 1u128 << -exp,
            })
        }
    }

    fn key(&self, ignored: usize, unexplained: usize) -> u128 {
        self.den * ignored as u128 + self.num * unexplained as u128
    }
}

fn error_masks(h: &HypothesisClass, s: &TripleSample) -> Vec<Bits> {
    h.members()
        .iter()
        .map(|h| Bits::from_fn(s.m(), |i| zero_one_loss(h.at(s.triples[i].x), s.triples[i].y)))
        .collect()
}

fn ignore_masks(phi: &HypothesisClass, s: &TripleSample) -> Vec<Bits> {
    phi.members()
        .iter()
        .map(|p| Bits::from_fn(s.m(), |i| p.at(s.triples[i].xstar)))
        .collect()
}

fn ratio(count: usize, m: usize) -> f64 {
    if m == 0 {
        0.0
    } else {
        count as f64 / m as f64
    }
}

/// Returns a member of minimal empirical zero-one error, first in class order.
pub fn erm_standard(h: &HypothesisClass, s: &TripleSample) -> Result<ErmResult> {
    h.require_nonempty()?;
    s.check(h.domain().size(), usize::MAX)?;
    let errors: Vec<usize> = error_masks(h, s).iter().map(Bits::count_ones).collect();
    let best = *errors.iter().min().expect("nonempty class");
    let h_index = errors.iter().position(|&e| e == best).expect("minimum exists");
    Ok(ErmResult {
        h: h.members()[h_index].clone(),
        h_index,
        errors: best,
        empirical_error: ratio(best, s.m()),
        minimizer_count: errors.iter().filter(|&&e| e == best).count(),
    })
}

/// Ranking key of a candidate pair; smaller is better.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Rank {
    key: u128,
    ignored: usize,
    h: usize,
    phi: usize,
    unexplained: usize,
}

fn better(a: Option<Rank>, b: Option<Rank>) -> Option<Rank> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn exhaustive(errors: &[Bits], ignores: &[Bits], w: ExactWeight) -> Rank {
    let best_for_phi = |j: usize| -> Rank {
        let ignored = ignores[j].count_ones();
        errors
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let unexplained = e.count_and_not(&ignores[j]);
                Rank {
                    key: w.key(ignored, unexplained),
                    ignored,
                    h: i,
                    phi: j,
                    unexplained,
                }
            })
            .min()
            .expect("nonempty class")
    };
    let pairs = errors.len() as u64 * ignores.len() as u64;
    let best = if pairs >= PARALLEL_PAIRS {
        (0..ignores.len()).into_par_iter().map(|j| Some(best_for_phi(j))).reduce(|| None, better)
    } else {
        (0..ignores.len()).map(best_for_phi).min()
    };
    best.expect("nonempty class")
}

/// First index of each distinct mask, in index order.
fn distinct_masks(masks: &[Bits]) -> Vec<(usize, &Bits)> {
    let mut seen: HashMap<&Bits, ()> = HashMap::with_capacity(masks.len());
    masks
        .iter()
        .enumerate()
        .filter(|(_, m)| seen.insert(m, ()).is_none())
        .collect()
}

fn branch_and_bound(errors: &[Bits], ignores: &[Bits], w: ExactWeight, node_limit: Option<u64>) -> Result<(Rank, u64)> {
    let hs = distinct_masks(errors);
    let mut phis: Vec<(usize, &Bits, usize)> = distinct_masks(ignores)
        .into_iter()
        .map(|(j, m)| (j, m, m.count_ones()))
        .collect();
    phis.sort_by_key(|&(j, _, ig)| (ig, j));
    // Ignoring I examples leaves at least (min_h errors − I) unexplained.
    let erm_errors = hs.iter().map(|(_, e)| e.count_ones()).min().expect("nonempty class");

    let mut best: Option<Rank> = None;
    let mut examined = 0u64;
    for (j, ign, ignored) in phis {
        if let Some(inc) = best {
            if (w.key(ignored, 0), ignored) > (inc.key, inc.ignored) {
                break;
            }
            let bound = w.key(ignored, erm_errors.saturating_sub(ignored));
            if (bound, ignored) > (inc.key, inc.ignored) {
                continue;
            }
        }
        examined += hs.len() as u64;
        if let Some(limit) = node_limit {
            if examined > limit {
                return Err(Error::BudgetExhausted { budget: limit });
            }
        }
        for &(i, e) in &hs {
            let unexplained = e.count_and_not(ign);
            let cand = Rank {
                key: w.key(ignored, unexplained),
                ignored,
                h: i,
                phi: j,
                unexplained,
            };
            best = better(best, Some(cand));
        }
    }
    Ok((best.expect("nonempty class"), examined))
}

/// Minimizes `Σ_i ℓ'_C((h, φ), (x_i, x*_i, y_i))` over `H × Φ`.
pub fn erm_privileged(
    h: &HypothesisClass,
    phi: &HypothesisClass,
    s: &TripleSample,
    c: f64,
) -> Result<PrivilegedErmResult> {
    erm_privileged_with(h, phi, s, c, &SolverOptions::default())
}

pub fn erm_privileged_with(
    h: &HypothesisClass,
    phi: &HypothesisClass,
    s: &TripleSample,
    c: f64,
    opts: &SolverOptions,
) -> Result<PrivilegedErmResult> {
    h.require_nonempty()?;
    phi.require_nonempty()?;
    let w = ExactWeight::from_f64(c)?;
    s.check(h.domain().size(), phi.domain().size())?;
    let errors = error_masks(h, s);
    let ignores = ignore_masks(phi, s);
    let pairs = h.len() as u64 * phi.len() as u64;
    let (best, solver, examined) = if pairs <= opts.pair_budget {
        (exhaustive(&errors, &ignores, w), SolverKind::Exhaustive, pairs)
    } else {
        let (best, examined) = branch_and_bound(&errors, &ignores, w, opts.node_limit)?;
        (best, SolverKind::BranchAndBound, examined)
    };
    let m = s.m();
    let objective_sum = best.ignored as f64 / c + best.unexplained as f64;
    Ok(PrivilegedErmResult {
        h: h.members()[best.h].clone(),
        phi: phi.members()[best.phi].clone(),
        h_index: best.h,
        phi_index: best.phi,
        m,
        c,
        objective_sum,
        objective: if m == 0 { 0.0 } else { objective_sum / m as f64 },
        ignored: best.ignored,
        unexplained: best.unexplained,
        ignored_weight: ratio(best.ignored, m),
        unexplained_error: ratio(best.unexplained, m),
        solver,
        pairs_examined: examined,
    })
}

/// Ignored weight, unexplained error and raw zero-one error of `(h, φ)` on `s`.
pub fn empirical_stats(h: &Hypothesis, phi: &Hypothesis, s: &TripleSample) -> Result<EmpiricalStats> {
    let (mut ignored, mut unexplained, mut raw) = (0usize, 0usize, 0usize);
    for t in s.iter() {
        let err = zero_one_loss(h.label(t.x)?, t.y);
        let ign = phi.label(t.xstar)?;
        ignored += usize::from(ign);
        unexplained += usize::from(err && !ign);
        raw += usize::from(err);
    }
    Ok(EmpiricalStats {
        ignored_weight: ratio(ignored, s.m()),
        unexplained_error: ratio(unexplained, s.m()),
        raw_error: ratio(raw, s.m()),
    })
}
