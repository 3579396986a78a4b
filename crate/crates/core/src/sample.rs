//! Training triples, samples and finite-support distributions over `X × X* × Y`.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// One `(x, x*, y)` example. Indices refer to the instance and privileged domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triple {
    pub x: usize,
    pub xstar: usize,
    #[serde(with = "label01")]
    pub y: bool,
}

impl Triple {
    pub const fn new(x: usize, xstar: usize, y: bool) -> Self {
        Triple { x, xstar, y }
    }

    pub fn check(&self, x_size: usize, xstar_size: usize) -> Result<()> {
        if self.x >= x_size {
            return Err(Error::IndexOutOfRange {
                domain: crate::domain::INSTANCE.into(),
                index: self.x,
                size: x_size,
            });
        }
        if self.xstar >= xstar_size {
            return Err(Error::IndexOutOfRange {
                domain: crate::domain::PRIVILEGED.into(),
                index: self.xstar,
                size: xstar_size,
            });
        }
        Ok(())
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.xstar, u8::from(self.y))
    }
}

/// Labels travel as the integers 0 and 1 in JSON.
pub(crate) mod label01 {
    use super::*;

    pub fn serialize<S: Serializer>(y: &bool, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(u8::from(*y))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<bool, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(serde::de::Error::custom(format!("label must be 0 or 1, got {other}"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleSample {
    pub triples: Vec<Triple>,
}

impl TripleSample {
    pub fn new(triples: Vec<Triple>) -> Self {
        TripleSample { triples }
    }

    pub fn m(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Triple> {
        self.triples.iter()
    }

    pub fn check(&self, x_size: usize, xstar_size: usize) -> Result<()> {
        self.triples.iter().try_for_each(|t| t.check(x_size, xstar_size))
    }
}

impl FromIterator<Triple> for TripleSample {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        TripleSample::new(iter.into_iter().collect())
    }
}

pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Probability table over distinct triples. Probabilities sum to one within
/// [`NORMALIZATION_TOLERANCE`].
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDistribution {
    support: Vec<(Triple, f64)>,
}

impl FiniteDistribution {
    pub fn new(support: Vec<(Triple, f64)>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(support.len());
        let mut total = 0.0;
        for &(t, p) in &support {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidProbability(p));
            }
            if !seen.insert(t) {
                return Err(Error::DuplicateTriple(t));
            }
            total += p;
        }
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::NotNormalized(total));
        }
        Ok(FiniteDistribution { support })
    }

    pub fn point_mass(t: Triple) -> Self {
        FiniteDistribution {
            support: vec![(t, 1.0)],
        }
    }

    pub fn support(&self) -> &[(Triple, f64)] {
        &self.support
    }

    pub fn check(&self, x_size: usize, xstar_size: usize) -> Result<()> {
        self.support.iter().try_for_each(|(t, _)| t.check(x_size, xstar_size))
    }

    /// Probability of the event `pred` under the table.
    pub fn probability(&self, mut pred: impl FnMut(&Triple) -> bool) -> f64 {
        self.support.iter().filter(|(t, _)| pred(t)).map(|(_, p)| p).sum()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SupportEntry {
    x: usize,
    xstar: usize,
    #[serde(with = "label01")]
    y: bool,
    p: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistributionRepr {
    support: Vec<SupportEntry>,
}

impl Serialize for FiniteDistribution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DistributionRepr {
            support: self
                .support
                .iter()
                .map(|&(t, p)| SupportEntry {
                    x: t.x,
                    xstar: t.xstar,
                    y: t.y,
                    p,
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteDistribution {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = DistributionRepr::deserialize(d)?;
        FiniteDistribution::new(
            repr.support
                .into_iter()
                .map(|e| (Triple::new(e.x, e.xstar, e.y), e.p))
                .collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}
