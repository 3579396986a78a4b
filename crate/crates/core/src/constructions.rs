//! Explicit classes and distributions: the triplet-product counterexample
//! classes, the tight union pair, the auxiliary-class shattered witness and the
//! paired lower-bound distribution family.

use std::sync::Arc;

use itertools::Itertools;
use serde::Serialize;

use crate::bits::Bits;
use crate::domain::{FiniteDomain, ProductLayout};
use crate::error::{Error, Result};
use crate::hypothesis::{Hypothesis, HypothesisClass};
use crate::sample::{FiniteDistribution, Triple};
use crate::vc;

/// Base non-privileged class on three points.
pub const H1: [&str; 4] = ["000", "001", "100", "110"];
/// Base privileged class on three points.
pub const PHI1: [&str; 4] = ["000", "001", "010", "101"];

/// Largest `d` for which the product classes are materialized (`4^5` members).
pub const THEOREM1_MAX_D: usize = 5;

pub fn instance_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

pub fn privileged_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x*{i}")).collect()
}

pub fn product_names(layout: ProductLayout) -> Vec<String> {
    (0..layout.size()).map(|i| layout.name(i)).collect()
}

#[derive(Debug, Clone)]
pub struct Theorem1Classes {
    pub d: usize,
    pub h: HypothesisClass,
    pub phi: HypothesisClass,
}

impl Theorem1Classes {
    pub fn layout(&self) -> ProductLayout {
        ProductLayout::new(3 * self.d, 3 * self.d)
    }

    /// The diagonal points `((x_i, x*_i), 0)`, `i < 3d`, of the product domain.
    pub fn diagonal_witness(&self) -> Vec<usize> {
        let layout = self.layout();
        (0..3 * self.d).map(|i| layout.index(i, i, false)).collect()
    }

    /// Value the additive VC claim would predict for `F`: `d + d* = 2d`.
    pub fn additive_prediction(&self) -> usize {
        2 * self.d
    }
}

fn triplet_product(base: &[&str; 4], d: usize) -> Vec<Bits> {
    let base: Vec<Bits> = base.iter().map(|s| Bits::parse(s).expect("static pattern")).collect();
    (0..d)
        .map(|_| base.iter())
        .multi_cartesian_product()
        .map(|parts| Bits::from_fn(3 * d, |i| parts[i / 3].get(i % 3)))
        .collect()
}

/// `H_d` and `Φ_d`: every `d`-tuple of base members applied blockwise to `d`
/// consecutive point triplets.
pub fn construct_theorem1(d: usize) -> Result<Theorem1Classes> {
    if d < 1 {
        return Err(Error::param("d must be at least 1"));
    }
    if d > THEOREM1_MAX_D {
        return Err(Error::param(format!("d = {d} exceeds the cap of {THEOREM1_MAX_D}")));
    }
    let x = Arc::new(FiniteDomain::instance(3 * d)?);
    let xs = Arc::new(FiniteDomain::privileged(3 * d)?);
    Ok(Theorem1Classes {
        d,
        h: HypothesisClass::from_patterns(x, triplet_product(&H1, d))?,
        phi: HypothesisClass::from_patterns(xs, triplet_product(&PHI1, d))?,
    })
}

#[derive(Debug, Clone)]
pub struct Lemma1Classes {
    pub d: usize,
    pub dstar: usize,
    /// Labelings with at most `d` ones.
    pub h: HypothesisClass,
    /// Labelings with at most `dstar` zeros.
    pub j: HypothesisClass,
}

/// The pair whose union attains `VC(H ∪ J) = d + dstar + 1` on `d + dstar + 1` points.
pub fn construct_lemma1_tight(d: usize, dstar: usize) -> Result<Lemma1Classes> {
    let n = d + dstar + 1;
    if n > 20 {
        return Err(Error::param(format!("domain of size {n} is too large to enumerate")));
    }
    let domain = Arc::new(FiniteDomain::instance(n)?);
    let all = || (0u32..1 << n).map(move |c| Bits::from_fn(n, |i| (c >> i) & 1 == 1));
    Ok(Lemma1Classes {
        d,
        dstar,
        h: HypothesisClass::from_patterns(domain.clone(), all().filter(|b| b.count_ones() <= d))?,
        j: HypothesisClass::from_patterns(domain, all().filter(|b| n - b.count_ones() <= dstar))?,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma2Witness {
    pub d: usize,
    pub dstar: usize,
    /// Lexicographically first shattered sets of `H` and `Φ`.
    pub h_shattered: Vec<usize>,
    pub phi_shattered: Vec<usize>,
    pub triples: Vec<Triple>,
    /// Positions of `triples` in the product domain.
    pub indices: Vec<usize>,
}

/// The `d + d* − 2` triples `{(x_i, x*_{d*}, 0)}_{i<d} ∪ {(x_d, x*_j, 0)}_{j<d*}`,
/// checked to be shattered by the auxiliary loss class.
pub fn construct_lemma2_witness(h: &HypothesisClass, phi: &HypothesisClass) -> Result<Lemma2Witness> {
    let hr = vc::exact_vc(h)?;
    let pr = vc::exact_vc(phi)?;
    let (d, dstar) = (hr.vc, pr.vc);
    if d <= 1 || dstar <= 1 {
        return Err(Error::param(format!(
            "witness needs VC(H) > 1 and VC(Φ) > 1, got {d} and {dstar}"
        )));
    }
    let (ch, cp) = (&hr.witness, &pr.witness);
    let mut triples: Vec<Triple> = ch[..d - 1].iter().map(|&x| Triple::new(x, cp[dstar - 1], false)).collect();
    triples.extend(cp[..dstar - 1].iter().map(|&xs| Triple::new(ch[d - 1], xs, false)));
    let layout = ProductLayout::new(h.domain().size(), phi.domain().size());
    let indices = triples.iter().map(|t| layout.index_of(t)).collect::<Result<Vec<_>>>()?;
    let aux = vc::build_aux_class(h, phi)?;
    if !vc::is_shattered(&aux, &indices)? {
        return Err(Error::param("witness set is not shattered by the auxiliary class"));
    }
    Ok(Lemma2Witness {
        d,
        dstar,
        h_shattered: hr.witness,
        phi_shattered: pr.witness,
        triples,
        indices,
    })
}

/// A member of the paired distribution family on a shattered set of `Φ`.
///
/// Pair `(a_i, b_i)` puts mass `(1 + α)/d*` on one element and `(1 − α)/d*`
/// on the other, where `d*` is the (even) number of points used.
#[derive(Debug, Clone)]
pub struct Theorem5Family {
    pub pairs: Vec<(usize, usize)>,
    pub alpha: f64,
    pub eps: f64,
    pub delta: f64,
    /// `false` puts the heavy mass on `a_i`, `true` on `b_i`.
    pub heavy_side: Vec<bool>,
    /// The member of `Φ` labeling exactly the light element of every pair 1.
    pub phi_star: Hypothesis,
    /// VC dimension of the class the family was built from.
    pub vc: usize,
}

/// `α = 8ε / (1 − 8δ)`.
pub fn theorem5_alpha(eps: f64, delta: f64) -> f64 {
    8.0 * eps / (1.0 - 8.0 * delta)
}

impl Theorem5Family {
    /// Number of points carrying mass (`VC(Φ)` rounded down to even).
    pub fn dstar(&self) -> usize {
        2 * self.pairs.len()
    }

    pub fn heavy_mass(&self) -> f64 {
        (1.0 + self.alpha) / self.dstar() as f64
    }

    pub fn light_mass(&self) -> f64 {
        (1.0 - self.alpha) / self.dstar() as f64
    }

    /// `(heavy, light)` points of pair `i`.
    pub fn split(&self, i: usize) -> (usize, usize) {
        let (a, b) = self.pairs[i];
        if self.heavy_side[i] {
            (b, a)
        } else {
            (a, b)
        }
    }

    pub fn mass(&self, xstar: usize) -> f64 {
        for i in 0..self.pairs.len() {
            let (heavy, light) = self.split(i);
            if xstar == heavy {
                return self.heavy_mass();
            }
            if xstar == light {
                return self.light_mass();
            }
        }
        0.0
    }

    /// True iff `φ` labels exactly one element of every pair 1.
    pub fn in_phi_prime(&self, phi: &Hypothesis) -> bool {
        self.pairs.iter().all(|&(a, b)| phi.at(a) != phi.at(b))
    }

    /// Number of pairs where `φ(a_i) ≠ φ*(a_i)`.
    pub fn mismatches(&self, phi: &Hypothesis) -> usize {
        self.pairs.iter().filter(|&&(a, _)| phi.at(a) != self.phi_star.at(a)).count()
    }

    /// `P[φ(X*) = 1]` summed over the family's support.
    pub fn prob_one(&self, phi: &Hypothesis) -> f64 {
        self.pairs
            .iter()
            .flat_map(|&(a, b)| [a, b])
            .filter(|&p| phi.at(p))
            .map(|p| self.mass(p))
            .sum()
    }

    /// The subclass of `Φ` splitting every pair.
    pub fn phi_prime(&self, phi: &HypothesisClass) -> Result<HypothesisClass> {
        let members = phi.members().iter().filter(|p| self.in_phi_prime(p)).cloned().collect();
        HypothesisClass::new(phi.domain().clone(), members)
    }
}

/// Builds the family on the lexicographically first shattered set of `Φ`.
///
/// The distribution's triples are `(0, c, 0)` for `c` in the shattered set, so
/// it lives on a one-point instance domain.
pub fn construct_theorem5_family(
    phi: &HypothesisClass,
    eps: f64,
    delta: f64,
    heavy_side: Option<&[bool]>,
) -> Result<(Theorem5Family, FiniteDistribution)> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param(format!("eps must lie in (0, 1), got {eps}")));
    }
    if !(delta > 0.0 && delta < 0.125) {
        return Err(Error::param(format!("delta must lie in (0, 1/8), got {delta}")));
    }
    let alpha = theorem5_alpha(eps, delta);
    if alpha >= 1.0 {
        return Err(Error::param(format!("alpha = {alpha} must be below 1")));
    }
    let report = vc::exact_vc(phi)?;
    if report.vc < 2 {
        return Err(Error::param(format!("Φ must shatter at least 2 points, VC is {}", report.vc)));
    }
    let pairs: Vec<(usize, usize)> = report.witness.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    let heavy_side = match heavy_side {
        Some(h) if h.len() != pairs.len() => {
            return Err(Error::param(format!(
                "heavy_side has {} entries, expected one per pair ({})",
                h.len(),
                pairs.len()
            )))
        }
        Some(h) => h.to_vec(),
        None => vec![false; pairs.len()],
    };
    let light_of = |i: usize| {
        let (a, b) = pairs[i];
        if heavy_side[i] {
            a
        } else {
            b
        }
    };
    let phi_star = phi
        .members()
        .iter()
        .find(|p| (0..pairs.len()).all(|i| p.at(pairs[i].0) == (light_of(i) == pairs[i].0) && p.at(pairs[i].1) == (light_of(i) == pairs[i].1)))
        .cloned()
        .ok_or_else(|| Error::param("no member of Φ realizes φ*; the chosen set is not shattered"))?;
    let family = Theorem5Family {
        pairs,
        alpha,
        eps,
        delta,
        heavy_side,
        phi_star,
        vc: report.vc,
    };
    let mut support = Vec::with_capacity(family.dstar());
    for i in 0..family.pairs.len() {
        let (heavy, light) = family.split(i);
        support.push((Triple::new(0, heavy, false), family.heavy_mass()));
        support.push((Triple::new(0, light, false), family.light_mass()));
    }
    support.sort_by_key(|(t, _)| *t);
    Ok((family, FiniteDistribution::new(support)?))
}
