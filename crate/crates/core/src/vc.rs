//! Exact VC-dimension engine and the derived loss classes.
//!
//! Shattered sets are enumerated level by level. Every subset of a shattered
//! set is shattered, so level `k + 1` candidates are joins of level-`k` sets
//! sharing a `(k − 1)`-prefix whose remaining `k`-subsets are all on level `k`.
//! No class with `N` members shatters more than `floor(log2 N)` points, which
//! caps the depth.
//!
//! Shattering is tested on the column view of a class: starting from the set
//! of all members, each point of the candidate splits every cell into the
//! members labeling it 1 and those labeling it 0. The set is shattered iff no
//! cell ever becomes empty.

use std::collections::HashSet;
use std::sync::Arc;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::domain::{self, FiniteDomain, ProductLayout};
use crate::error::{Error, Result};
use crate::hypothesis::HypothesisClass;

/// Default cap on the number of shattering checks in exact mode.
pub const DEFAULT_BUDGET: u64 = 500_000_000;

/// Below this many candidates a level is checked on the calling thread.
const PARALLEL_THRESHOLD: usize = 2048;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionTable {
    pub subset: Vec<usize>,
    /// Distinct restrictions of the members to `subset`, sorted.
    pub patterns: Vec<Bits>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VcReport {
    pub vc: usize,
    /// `false` when `vc` is only a certified lower bound.
    pub exact: bool,
    /// A shattered set of size `vc` (lexicographically first in exact mode).
    pub witness: Vec<usize>,
    /// Number of shattered sets of each size, starting at size 0.
    pub levels: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum VcMode {
    #[default]
    Exact,
    /// Certify a supplied witness, or grow one greedily when none is given.
    LowerBoundOnly { witness: Option<Vec<usize>> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossSide {
    /// `ℓ01` loss class of `H` over `X × Y`.
    NonPrivileged,
    /// `ℓig` loss class of `Φ` over `X* × Y`.
    Privileged,
}

struct ShatterOracle<'a> {
    columns: &'a [Bits],
    members: usize,
    all: Bits,
}

impl<'a> ShatterOracle<'a> {
    fn new(cls: &'a HypothesisClass) -> Self {
        ShatterOracle {
            columns: cls.columns(),
            members: cls.len(),
            all: Bits::ones(cls.len()),
        }
    }

    fn scratch(&self, depth: usize) -> Vec<Vec<u64>> {
        vec![vec![0; self.all.words().len()]; 2 * depth]
    }

    fn shattered(&self, subset: &[usize], scratch: &mut Vec<Vec<u64>>) -> bool {
        let k = subset.len();
        if k >= 64 || (1u64 << k) > self.members as u64 {
            return false;
        }
        if scratch.len() < 2 * k {
            *scratch = self.scratch(k);
        }
        split(self.columns, self.all.words(), subset, &mut scratch[..2 * k])
    }
}

fn split(columns: &[Bits], cell: &[u64], subset: &[usize], scratch: &mut [Vec<u64>]) -> bool {
    let Some((&p, rest)) = subset.split_first() else {
        return true;
    };
    let (mine, deeper) = scratch.split_at_mut(2);
    let (ones, zeros) = mine.split_at_mut(1);
    let (ones, zeros) = (&mut ones[0], &mut zeros[0]);
    let col = columns[p].words();
    let (mut any_one, mut any_zero) = (false, false);
    for w in 0..cell.len() {
        ones[w] = cell[w] & col[w];
        zeros[w] = cell[w] & !col[w];
        any_one |= ones[w] != 0;
        any_zero |= zeros[w] != 0;
    }
    any_one && any_zero && split(columns, ones, rest, deeper) && split(columns, zeros, rest, deeper)
}

fn check_subset(cls: &HypothesisClass, subset: &[usize]) -> Result<()> {
    let mut seen = HashSet::with_capacity(subset.len());
    for &i in subset {
        cls.domain().check_index(i)?;
        if !seen.insert(i) {
            return Err(Error::DuplicateIndex(i));
        }
    }
    Ok(())
}

/// True iff the class realizes all `2^|subset|` labelings of `subset`.
pub fn is_shattered(cls: &HypothesisClass, subset: &[usize]) -> Result<bool> {
    check_subset(cls, subset)?;
    let oracle = ShatterOracle::new(cls);
    let mut scratch = oracle.scratch(subset.len().min(64));
    Ok(oracle.shattered(subset, &mut scratch))
}

/// Distinct restrictions of the class to `subset`.
pub fn project(cls: &HypothesisClass, subset: &[usize]) -> Result<ProjectionTable> {
    check_subset(cls, subset)?;
    let mut patterns: Vec<Bits> = cls
        .members()
        .iter()
        .map(|h| Bits::from_fn(subset.len(), |j| h.at(subset[j])))
        .collect();
    patterns.sort();
    patterns.dedup();
    Ok(ProjectionTable {
        subset: subset.to_vec(),
        patterns,
    })
}

fn log2_floor(n: usize) -> usize {
    (usize::BITS - 1 - n.leading_zeros()) as usize
}

/// Level-`k+1` candidates from the sorted level-`k` shattered sets.
fn join_level(level: &[Vec<usize>], n: usize) -> Vec<Vec<usize>> {
    let k = level[0].len();
    if k == 0 {
        return (0..n).map(|p| vec![p]).collect();
    }
    let index: HashSet<&[usize]> = level.iter().map(Vec::as_slice).collect();
    let mut out = Vec::new();
    let mut probe = Vec::with_capacity(k);
    let mut start = 0;
    while start < level.len() {
        let prefix = &level[start][..k - 1];
        let end = start + level[start..].iter().take_while(|s| &s[..k - 1] == prefix).count();
        for i in start..end {
            for j in i + 1..end {
                let mut cand = level[i].clone();
                cand.push(level[j][k - 1]);
                let closed = (0..k - 1).all(|drop| {
                    probe.clear();
                    probe.extend(cand.iter().enumerate().filter(|&(pos, _)| pos != drop).map(|(_, &p)| p));
                    index.contains(probe.as_slice())
                });
                if closed {
                    out.push(cand);
                }
            }
        }
        start = end;
    }
    out
}

fn keep_shattered(oracle: &ShatterOracle<'_>, cands: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    let depth = cands.first().map_or(0, Vec::len);
    let keep: Vec<bool> = if cands.len() < PARALLEL_THRESHOLD {
        let mut scratch = oracle.scratch(depth);
        cands.iter().map(|c| oracle.shattered(c, &mut scratch)).collect()
    } else {
        cands
            .par_iter()
            .map_init(|| oracle.scratch(depth), |s, c| oracle.shattered(c, s))
            .collect()
    };
    cands.into_iter().zip(keep).filter_map(|(c, k)| k.then_some(c)).collect()
}

fn exact_levelwise(cls: &HypothesisClass, budget: u64) -> VcReport {
    let oracle = ShatterOracle::new(cls);
    let cap = log2_floor(cls.len());
    let n = cls.domain().size();
    let mut level: Vec<Vec<usize>> = vec![Vec::new()];
    let mut levels = vec![1u64];
    let mut nodes = 0u64;
    let mut exact = true;
    while level[0].len() < cap {
        let cands = join_level(&level, n);
        if nodes + cands.len() as u64 > budget {
            exact = false;
            break;
        }
        nodes += cands.len() as u64;
        let next = keep_shattered(&oracle, cands);
        if next.is_empty() {
            break;
        }
        levels.push(next.len() as u64);
        level = next;
    }
    VcReport {
        vc: level[0].len(),
        exact,
        witness: level.swap_remove(0),
        levels,
    }
}

fn greedy_witness(cls: &HypothesisClass) -> Vec<usize> {
    let oracle = ShatterOracle::new(cls);
    let cap = log2_floor(cls.len());
    let mut scratch = oracle.scratch(cap + 1);
    let mut witness = Vec::new();
    for p in 0..cls.domain().size() {
        if witness.len() == cap {
            break;
        }
        witness.push(p);
        if !oracle.shattered(&witness, &mut scratch) {
            witness.pop();
        }
    }
    witness
}

/// VC dimension of a nonempty class.
///
/// In exact mode a budget overrun degrades to a lower-bound-only report
/// carrying the deepest level that was completed.
pub fn vc_dimension(cls: &HypothesisClass, mode: &VcMode, budget: u64) -> Result<VcReport> {
    cls.require_nonempty()?;
    match mode {
        VcMode::Exact => Ok(exact_levelwise(cls, budget)),
        VcMode::LowerBoundOnly { witness: Some(w) } => {
            if !is_shattered(cls, w)? {
                return Err(Error::param(format!("supplied witness {w:?} is not shattered")));
            }
            Ok(VcReport {
                vc: w.len(),
                exact: false,
                witness: w.clone(),
                levels: Vec::new(),
            })
        }
        VcMode::LowerBoundOnly { witness: None } => {
            let witness = greedy_witness(cls);
            Ok(VcReport {
                vc: witness.len(),
                exact: false,
                witness,
                levels: Vec::new(),
            })
        }
    }
}

/// Exact VC dimension under [`DEFAULT_BUDGET`]; a budget overrun is an error.
pub fn exact_vc(cls: &HypothesisClass) -> Result<VcReport> {
    let report = vc_dimension(cls, &VcMode::Exact, DEFAULT_BUDGET)?;
    if report.exact {
        Ok(report)
    } else {
        Err(Error::BudgetExhausted { budget: DEFAULT_BUDGET })
    }
}

/// `Π(m)`: the most distinct labelings the class induces on any `m` points.
pub fn growth_function(cls: &HypothesisClass, m: usize) -> Result<u64> {
    let n = cls.domain().size();
    if m > n {
        return Err(Error::param(format!("m = {m} exceeds domain size {n}")));
    }
    if cls.is_empty() {
        return Ok(0);
    }
    let ceiling = if m >= 64 { u64::MAX } else { 1u64 << m }.min(cls.len() as u64);
    let mut best = 0u64;
    let mut patterns = Vec::with_capacity(cls.len());
    for subset in (0..n).combinations(m) {
        patterns.clear();
        patterns.extend(cls.members().iter().map(|h| Bits::from_fn(m, |j| h.at(subset[j]))));
        patterns.sort_unstable();
        patterns.dedup();
        best = best.max(patterns.len() as u64);
        if best == ceiling {
            break;
        }
    }
    Ok(best)
}

/// Sauer's bound `Σ_{i ≤ d} C(m, i)`, saturating at `u128::MAX`.
pub fn sauer_bound(d: usize, m: usize) -> u128 {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for i in 0..=d.min(m) {
        if i > 0 {
            binom = match binom.checked_mul((m - i + 1) as u128) {
                Some(v) => v / i as u128,
                None => return u128::MAX,
            };
        }
        total = total.saturating_add(binom);
    }
    total
}

pub fn union_class(a: &HypothesisClass, b: &HypothesisClass) -> Result<HypothesisClass> {
    a.domain().ensure_same(b.domain())?;
    let members = a.members().iter().chain(b.members()).cloned().collect();
    HypothesisClass::new(a.domain().clone(), members)
}

/// Pointwise ORs of all `k`-element multisets of members.
pub fn k_fold_union(r: &HypothesisClass, k: usize) -> Result<HypothesisClass> {
    if k < 2 {
        return Err(Error::param(format!("k-fold union needs k >= 2, got {k}")));
    }
    let mut out = HashSet::new();
    for combo in r.members().iter().combinations_with_replacement(k) {
        let mut acc = combo[0].bits().clone();
        for h in &combo[1..] {
            acc = acc.or(h.bits());
        }
        out.insert(acc);
    }
    HypothesisClass::from_patterns(r.domain().clone(), out)
}

fn layout_of(h: &HypothesisClass, phi: &HypothesisClass) -> Result<ProductLayout> {
    h.require_nonempty()?;
    phi.require_nonempty()?;
    Ok(ProductLayout::new(h.domain().size(), phi.domain().size()))
}

/// `ℓ01` error sets of each `h`, lifted to the product domain.
pub fn lifted_error_sets(h: &HypothesisClass, layout: ProductLayout) -> Vec<Bits> {
    h.members()
        .iter()
        .map(|h| {
            Bits::from_fn(layout.size(), |i| {
                let t = layout.decode(i);
                h.at(t.x) != t.y
            })
        })
        .collect()
}

/// `ℓig` ignore sets of each `φ`, lifted to the product domain.
pub fn lifted_ignore_sets(phi: &HypothesisClass, layout: ProductLayout) -> Vec<Bits> {
    phi.members()
        .iter()
        .map(|p| Bits::from_fn(layout.size(), |i| p.at(layout.decode(i).xstar)))
        .collect()
}

fn pair_class(
    h: &HypothesisClass,
    phi: &HypothesisClass,
    combine: impl Fn(&Bits, &Bits) -> Bits + Sync,
) -> Result<HypothesisClass> {
    let layout = layout_of(h, phi)?;
    let errors = lifted_error_sets(h, layout);
    let ignored = lifted_ignore_sets(phi, layout);
    let patterns: HashSet<Bits> = errors
        .par_iter()
        .flat_map_iter(|e| ignored.iter().map(|g| combine(e, g)).collect::<Vec<_>>())
        .collect();
    HypothesisClass::from_patterns(
        Arc::new(FiniteDomain::product(layout.x_size, layout.xstar_size)?),
        patterns,
    )
}

/// The composite loss class `F`: `f(h,φ) = 1[h errs] ∨ 1[φ ignores]`.
pub fn build_f_class(h: &HypothesisClass, phi: &HypothesisClass) -> Result<HypothesisClass> {
    pair_class(h, phi, Bits::or)
}

/// The auxiliary loss class: `1[h errs] ∧ ¬1[φ ignores]`.
pub fn build_aux_class(h: &HypothesisClass, phi: &HypothesisClass) -> Result<HypothesisClass> {
    pair_class(h, phi, Bits::and_not)
}

/// Loss class of a single class over its domain paired with the label.
///
/// Point `(p, y)` sits at index `2p + y`.
pub fn build_loss_class(cls: &HypothesisClass, side: LossSide) -> Result<HypothesisClass> {
    cls.require_nonempty()?;
    let n = cls.domain().size();
    let (label, patterns): (&str, Vec<Bits>) = match side {
        LossSide::NonPrivileged => (
            domain::INSTANCE_LABEL,
            cls.members()
                .iter()
                .map(|h| Bits::from_fn(2 * n, |i| h.at(i / 2) != (i % 2 == 1)))
                .collect(),
        ),
        LossSide::Privileged => (
            domain::PRIVILEGED_LABEL,
            cls.members()
                .iter()
                .map(|p| Bits::from_fn(2 * n, |i| p.at(i / 2)))
                .collect(),
        ),
    };
    HypothesisClass::from_patterns(Arc::new(FiniteDomain::new(label, 2 * n)?), patterns)
}
