//! Finite-sample generalization bounds for standard and privileged ERM, and
//! the conditions under which the privileged bound is the smaller one.
//!
//! With `L = 8·log(m+1)/m` and `A = log(4/δ)/(2·log(m+1))` the fast rate is
//! `R_f(d) = L·(d + A)`, which is how the necessary condition is written.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Logarithm used inside the rates. Natural by default.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LogBase {
    #[default]
    Natural,
    Two,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Two => x.log2(),
        }
    }
}

/// Largest root of the cubic is the exact threshold on `d*/d`; rounded up it
/// is the asymptotic `2.25` usually quoted.
pub const ASYMPTOTIC_ALPHA: f64 = 2.25;

/// Tolerance on `ε_ERM = ε_ig + ε_u` for the sufficient condition.
pub const PREMISE_TOLERANCE: f64 = 1e-9;

fn check_rate_args(m: u64, delta: f64) -> Result<()> {
    if m == 0 {
        return Err(Error::param("sample size m must be at least 1"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param(format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::param(format!("{name} must lie in [0, 1], got {x}")));
    }
    Ok(())
}

pub fn r_fast_in(base: LogBase, d: usize, m: u64, delta: f64) -> Result<f64> {
    check_rate_args(m, delta)?;
    let m = m as f64;
    Ok((8.0 * d as f64 * base.log(m + 1.0) + 4.0 * base.log(4.0 / delta)) / m)
}

pub fn r_slow_in(base: LogBase, x: f64, d: usize, m: u64, delta: f64) -> Result<f64> {
    check_unit("x", x)?;
    Ok((x * r_fast_in(base, d, m, delta)?).sqrt())
}

/// `R_f(d) = (8·d·ln(m+1) + 4·ln(4/δ)) / m`.
pub fn r_fast(d: usize, m: u64, delta: f64) -> Result<f64> {
    r_fast_in(LogBase::Natural, d, m, delta)
}

/// `R_s(x, d) = sqrt(x·R_f(d))`.
pub fn r_slow(x: f64, d: usize, m: u64, delta: f64) -> Result<f64> {
    r_slow_in(LogBase::Natural, x, d, m, delta)
}

/// `A = log(4/δ) / (2·log(m+1))`.
pub fn a_constant_in(base: LogBase, m: u64, delta: f64) -> Result<f64> {
    check_rate_args(m, delta)?;
    Ok(base.log(4.0 / delta) / (2.0 * base.log(m as f64 + 1.0)))
}

/// Lower and upper bounds on the VC dimension of the auxiliary loss class.
/// The lower bound is only known when both dimensions exceed 1.
pub fn d_a_interval(d: usize, dstar: usize) -> (usize, f64) {
    let lower = if d > 1 && dstar > 1 { d + dstar - 2 } else { 0 };
    let upper = 4.0 * (4.0 * std::f64::consts::E).log2() * (d + dstar + 1) as f64;
    (lower, upper)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub m: u64,
    pub delta: f64,
    pub d: usize,
    pub dstar: usize,
    pub d_a: usize,
    pub eps_erm: f64,
    pub eps_ig: f64,
    pub eps_u: f64,
    #[serde(default)]
    pub log_base: LogBase,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErmBoundTerms {
    pub eps_erm: f64,
    pub slow: f64,
    pub fast: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrBoundTerms {
    pub eps_ig: f64,
    pub eps_u: f64,
    pub slow_ig: f64,
    pub slow_u: f64,
    pub fast_dstar: f64,
    pub fast_d_a: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SufficientReport {
    pub holds: bool,
    /// `sqrt(ε_u)`.
    pub lhs: f64,
    pub rhs: f64,
    pub slope_term: f64,
    pub offset_term: f64,
    pub b_erm: f64,
    pub b_pr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NecessaryReport {
    pub b_erm: f64,
    pub b_pr: f64,
    pub pr_leq_erm: bool,
    /// `ε_ERM ≤ ε_ig + ε_u`.
    pub lemma4_consistent: bool,
    /// `d_a ≥ d + d* − 2`.
    pub d_a_consistent: bool,
    pub a: f64,
    /// `sqrt(ε_u)·sqrt(d_a + A)`.
    pub lhs: f64,
    /// `sqrt(ε_ERM·(d + A)) − sqrt(ε_ig·(d* + A))`.
    pub rhs: f64,
    pub inequality_holds: bool,
    pub alpha: f64,
    pub alpha_threshold: f64,
    pub alpha_within_threshold: bool,
    pub asymptotic_threshold: f64,
}

impl BoundInputs {
    pub fn validate(&self) -> Result<()> {
        check_rate_args(self.m, self.delta)?;
        check_unit("eps_erm", self.eps_erm)?;
        check_unit("eps_ig", self.eps_ig)?;
        check_unit("eps_u", self.eps_u)?;
        let (lower, _) = d_a_interval(self.d, self.dstar);
        if self.d_a < lower {
            return Err(Error::param(format!(
                "d_a = {} is below the lower bound d + d* - 2 = {lower}",
                self.d_a
            )));
        }
        Ok(())
    }

    fn fast(&self, d: usize) -> f64 {
        r_fast_in(self.log_base, d, self.m, self.delta).expect("validated")
    }

    /// `R_s(1, d)`, so that `R_s(x, d) = sqrt(x)·R_s(1, d)`.
    fn unit_slow(&self, d: usize) -> f64 {
        self.fast(d).sqrt()
    }

    pub fn a_constant(&self) -> Result<f64> {
        a_constant_in(self.log_base, self.m, self.delta)
    }

    pub fn erm_terms(&self) -> Result<ErmBoundTerms> {
        self.validate()?;
        let slow = self.eps_erm.sqrt() * self.unit_slow(self.d);
        let fast = self.fast(self.d);
        Ok(ErmBoundTerms {
            eps_erm: self.eps_erm,
            slow,
            fast,
            total: self.eps_erm + slow + fast,
        })
    }

    pub fn pr_terms(&self) -> Result<PrBoundTerms> {
        self.validate()?;
        let slow_ig = self.eps_ig.sqrt() * self.unit_slow(self.dstar);
        let slow_u = self.eps_u.sqrt() * self.unit_slow(self.d_a);
        let fast_dstar = self.fast(self.dstar);
        let fast_d_a = self.fast(self.d_a);
        Ok(PrBoundTerms {
            eps_ig: self.eps_ig,
            eps_u: self.eps_u,
            slow_ig,
            slow_u,
            fast_dstar,
            fast_d_a,
            total: self.eps_ig + self.eps_u + slow_ig + slow_u + fast_dstar + fast_d_a,
        })
    }
}

/// `B_ERM = ε_ERM + R_s(ε_ERM, d) + R_f(d)`.
pub fn bound_erm(inputs: &BoundInputs) -> Result<f64> {
    Ok(inputs.erm_terms()?.total)
}

/// `B_PR = ε_ig + ε_u + R_s(ε_ig, d*) + R_s(ε_u, d_a) + R_f(d*) + R_f(d_a)`.
pub fn bound_pr(inputs: &BoundInputs) -> Result<f64> {
    Ok(inputs.pr_terms()?.total)
}

/// Exact sufficient condition for `B_PR ≤ B_ERM` when nothing misclassified
/// by standard ERM is left unignored (`ε_ERM = ε_ig + ε_u`):
///
/// `sqrt(ε_u) ≤ sqrt(ε_ERM)·(R_s(1,d) − R_s(1,d*))/R_s(1,d_a) + (R_f(d) − R_f(d*) − R_f(d_a))/R_s(1,d_a)`.
pub fn sufficient_condition(inputs: &BoundInputs) -> Result<SufficientReport> {
    inputs.validate()?;
    let gap = inputs.eps_erm - inputs.eps_ig - inputs.eps_u;
    if gap.abs() > PREMISE_TOLERANCE {
        return Err(Error::param(format!(
            "the sufficient condition requires eps_erm = eps_ig + eps_u (off by {gap:e})"
        )));
    }
    let denom = inputs.unit_slow(inputs.d_a);
    let slope_term = inputs.eps_erm.sqrt() * (inputs.unit_slow(inputs.d) - inputs.unit_slow(inputs.dstar)) / denom;
    let offset_term = (inputs.fast(inputs.d) - inputs.fast(inputs.dstar) - inputs.fast(inputs.d_a)) / denom;
    let lhs = inputs.eps_u.sqrt();
    let rhs = slope_term + offset_term;
    Ok(SufficientReport {
        holds: lhs <= rhs,
        lhs,
        rhs,
        slope_term,
        offset_term,
        b_erm: bound_erm(inputs)?,
        b_pr: bound_pr(inputs)?,
    })
}

/// Evaluates what `B_PR ≤ B_ERM` forces: the exact inequality
/// `sqrt(ε_u)·sqrt(d_a + A) ≤ sqrt(ε_ERM·(d + A)) − sqrt(ε_ig·(d* + A))`
/// and the ratio `d*/d` against the cubic threshold.
pub fn necessary_condition(inputs: &BoundInputs) -> Result<NecessaryReport> {
    inputs.validate()?;
    if inputs.d == 0 {
        return Err(Error::param("the necessary condition needs d ≥ 1 (alpha = d*/d)"));
    }
    let a = inputs.a_constant()?;
    let b_erm = bound_erm(inputs)?;
    let b_pr = bound_pr(inputs)?;
    let lhs = inputs.eps_u.sqrt() * (inputs.d_a as f64 + a).sqrt();
    let rhs = (inputs.eps_erm * (inputs.d as f64 + a)).sqrt() - (inputs.eps_ig * (inputs.dstar as f64 + a)).sqrt();
    let alpha = inputs.dstar as f64 / inputs.d as f64;
    let threshold = alpha_threshold();
    Ok(NecessaryReport {
        b_erm,
        b_pr,
        pr_leq_erm: b_pr <= b_erm,
        lemma4_consistent: inputs.eps_erm <= inputs.eps_ig + inputs.eps_u,
        d_a_consistent: inputs.d_a + 2 >= inputs.d + inputs.dstar,
        a,
        lhs,
        rhs,
        inequality_holds: lhs <= rhs,
        alpha,
        alpha_threshold: threshold,
        alpha_within_threshold: alpha <= threshold,
        asymptotic_threshold: ASYMPTOTIC_ALPHA,
    })
}

/// `α³ − 2α² − α + 1`, obtained by squaring `sqrt(1+α)·(1 − 1/α) = 1`.
pub fn alpha_cubic(alpha: f64) -> f64 {
    ((alpha - 2.0) * alpha - 1.0) * alpha + 1.0
}

/// The root of [`alpha_cubic`] in `(2, 2.25)`, by bisection.
pub fn alpha_threshold() -> f64 {
    let (mut lo, mut hi) = (2.0_f64, ASYMPTOTIC_ALPHA);
    debug_assert!(alpha_cubic(lo) < 0.0 && alpha_cubic(hi) > 0.0);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if alpha_cubic(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
