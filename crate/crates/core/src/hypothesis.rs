//! Hypotheses as total labelings of a finite domain, and deduplicated classes of them.

use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::bits::Bits;
use crate::domain::FiniteDomain;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Hypothesis {
    domain: Arc<FiniteDomain>,
    bits: Bits,
}

impl Hypothesis {
    pub fn new(domain: Arc<FiniteDomain>, bits: Bits) -> Result<Self> {
        if bits.len() != domain.size() {
            return Err(Error::PatternLength {
                domain: domain.label().to_owned(),
                expected: domain.size(),
                got: bits.len(),
            });
        }
        Ok(Hypothesis { domain, bits })
    }

    pub fn parse(domain: Arc<FiniteDomain>, s: &str) -> Result<Self> {
        Self::new(domain, Bits::parse(s)?)
    }

    pub fn constant(domain: Arc<FiniteDomain>, value: bool) -> Self {
        let bits = if value {
            Bits::ones(domain.size())
        } else {
            Bits::zeros(domain.size())
        };
        Hypothesis { domain, bits }
    }

    pub fn domain(&self) -> &Arc<FiniteDomain> {
        &self.domain
    }

    pub fn bits(&self) -> &Bits {
        &self.bits
    }

    /// Label of point `i`; the caller guarantees `i` is in range.
    #[inline]
    pub fn at(&self, i: usize) -> bool {
        self.bits.get(i)
    }

    pub fn label(&self, i: usize) -> Result<bool> {
        self.domain.check_index(i)?;
        Ok(self.bits.get(i))
    }
}

impl fmt::Debug for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.domain.label(), self.bits)
    }
}

/// Serialized as its bit string.
impl serde::Serialize for Hypothesis {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(&self.bits)
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.bits, f)
    }
}

/// A finite class of distinct labelings over one domain.
///
/// Members are kept sorted by their bit string (point 0 most significant);
/// that order is the canonical member order used for tie-breaking.
#[derive(Clone)]
pub struct HypothesisClass {
    domain: Arc<FiniteDomain>,
    members: Vec<Hypothesis>,
    columns: OnceLock<Vec<Bits>>,
}

impl HypothesisClass {
    pub fn new(domain: Arc<FiniteDomain>, members: Vec<Hypothesis>) -> Result<Self> {
        for h in &members {
            domain.ensure_same(h.domain())?;
        }
        let mut members = members;
        members.sort_by(|a, b| a.bits.cmp(&b.bits));
        members.dedup_by(|a, b| a.bits == b.bits);
        Ok(HypothesisClass {
            domain,
            members,
            columns: OnceLock::new(),
        })
    }

    pub fn from_patterns(domain: Arc<FiniteDomain>, patterns: impl IntoIterator<Item = Bits>) -> Result<Self> {
        let members = patterns
            .into_iter()
            .map(|b| Hypothesis::new(domain.clone(), b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(domain, members)
    }

    pub fn parse(domain: Arc<FiniteDomain>, patterns: &[&str]) -> Result<Self> {
        let bits = patterns.iter().map(|s| Bits::parse(s)).collect::<Result<Vec<_>>>()?;
        Self::from_patterns(domain, bits)
    }

    /// Every labeling of the domain. Only sensible for small domains.
    pub fn full(domain: Arc<FiniteDomain>) -> Result<Self> {
        let n = domain.size();
        if n > 20 {
            return Err(Error::param(format!("refusing to materialize 2^{n} labelings")));
        }
        let patterns = (0u64..1 << n).map(|code| Bits::from_fn(n, |i| (code >> (n - 1 - i)) & 1 == 1));
        Self::from_patterns(domain, patterns)
    }

    pub fn domain(&self) -> &Arc<FiniteDomain> {
        &self.domain
    }

    pub fn members(&self) -> &[Hypothesis] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, bits: &Bits) -> bool {
        self.members.binary_search_by(|h| h.bits.cmp(bits)).is_ok()
    }

    pub fn position(&self, bits: &Bits) -> Option<usize> {
        self.members.binary_search_by(|h| h.bits.cmp(bits)).ok()
    }

    pub(crate) fn require_nonempty(&self) -> Result<()> {
        if self.members.is_empty() {
            Err(Error::EmptyClass)
        } else {
            Ok(())
        }
    }

    /// Column view: for each domain point, the set of members labeling it 1.
    pub fn columns(&self) -> &[Bits] {
        self.columns.get_or_init(|| {
            (0..self.domain.size())
                .map(|p| Bits::from_fn(self.members.len(), |j| self.members[j].at(p)))
                .collect()
        })
    }
}

impl PartialEq for HypothesisClass {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain && self.members == other.members
    }
}

impl Eq for HypothesisClass {}

impl fmt::Debug for HypothesisClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HypothesisClass")
            .field("domain", &self.domain)
            .field("members", &self.members.iter().map(|h| h.to_string()).collect::<Vec<_>>())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dom(n: usize) -> Arc<FiniteDomain> {
        Arc::new(FiniteDomain::instance(n).unwrap())
    }

    #[test]
    fn class_dedups_and_sorts() {
        let c = HypothesisClass::parse(dom(3), &["110", "000", "110", "001"]).unwrap();
        let s: Vec<String> = c.members().iter().map(|h| h.to_string()).collect();
        assert_eq!(s, ["000", "001", "110"]);
    }

    #[test]
    fn pattern_length_is_checked() {
        assert!(matches!(
            HypothesisClass::parse(dom(3), &["01"]),
            Err(Error::PatternLength { expected: 3, got: 2, .. })
        ));
    }

    #[test]
    fn members_must_share_domain() {
        let other = Arc::new(FiniteDomain::privileged(3).unwrap());
        let h = Hypothesis::parse(other, "010").unwrap();
        assert!(HypothesisClass::new(dom(3), vec![h]).is_err());
    }

    #[test]
    fn columns_transpose_members() {
        let c = HypothesisClass::parse(dom(3), &["100", "110"]).unwrap();
        let cols = c.columns();
        assert_eq!(cols[0].to_string(), "11");
        assert_eq!(cols[1].to_string(), "01");
        assert_eq!(cols[2].to_string(), "00");
    }

    #[test]
    fn full_class_has_all_labelings() {
        assert_eq!(HypothesisClass::full(dom(4)).unwrap().len(), 16);
    }
}
