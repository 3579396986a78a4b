//! Zero-one, ignoring, composite and auxiliary losses.

use crate::error::{Error, Result};
use crate::hypothesis::Hypothesis;
use crate::sample::{FiniteDistribution, Triple};

/// `1[yhat != y]`.
#[inline]
pub fn zero_one_loss(yhat: bool, y: bool) -> bool {
    yhat != y
}

/// `1[z = 1]`: the example is ignored whatever its label.
#[inline]
pub fn ignoring_loss(z: bool, _y: bool) -> bool {
    z
}

/// `(1/C)·l* + max(l − l*, 0)` for binary `l`, `l*`.
pub fn composite_loss(l: bool, lstar: bool, c: f64) -> Result<f64> {
    if c <= 0.0 || !c.is_finite() {
        return Err(Error::param(format!("C must be a positive finite real, got {c}")));
    }
    let (l, lstar) = (f64::from(u8::from(l)), f64::from(u8::from(lstar)));
    Ok(lstar / c + (l - lstar).max(0.0))
}

fn labels(h: &Hypothesis, phi: &Hypothesis, t: &Triple) -> Result<(bool, bool)> {
    Ok((h.label(t.x)?, phi.label(t.xstar)?))
}

/// `max(ℓ01(h(x), y), ℓig(φ(x*), y))`: the example is misclassified or ignored.
pub fn f_loss(h: &Hypothesis, phi: &Hypothesis, t: &Triple) -> Result<bool> {
    let (hx, px) = labels(h, phi, t)?;
    Ok(zero_one_loss(hx, t.y) || ignoring_loss(px, t.y))
}

/// `1[h(x) != y ∧ φ(x*) = 0]`: misclassified and not ignored.
pub fn aux_loss(h: &Hypothesis, phi: &Hypothesis, t: &Triple) -> Result<bool> {
    let (hx, px) = labels(h, phi, t)?;
    Ok(zero_one_loss(hx, t.y) && !px)
}

/// `P[h(X) != Y]` computed from the probability table.
pub fn exact_true_error(h: &Hypothesis, dist: &FiniteDistribution) -> Result<f64> {
    let mut err = 0.0;
    for (t, p) in dist.support() {
        if zero_one_loss(h.label(t.x)?, t.y) {
            err += p;
        }
    }
    Ok(err)
}
