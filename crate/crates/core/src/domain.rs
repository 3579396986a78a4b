//! Finite, densely indexed domains.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sample::Triple;

pub const INSTANCE: &str = "X";
pub const PRIVILEGED: &str = "X*";
pub const PRODUCT: &str = "X×X*×Y";
pub const INSTANCE_LABEL: &str = "X×Y";
pub const PRIVILEGED_LABEL: &str = "X*×Y";

/// A set of points `0..size` carrying a label that names its role.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteDomain {
    label: String,
    size: usize,
}

impl FiniteDomain {
    pub fn new(label: impl Into<String>, size: usize) -> Result<Self> {
        let label = label.into();
        if size == 0 {
            return Err(Error::EmptyDomain(label));
        }
        Ok(FiniteDomain { label, size })
    }

    pub fn instance(size: usize) -> Result<Self> {
        Self::new(INSTANCE, size)
    }

    pub fn privileged(size: usize) -> Result<Self> {
        Self::new(PRIVILEGED, size)
    }

    /// The triple domain `X × X* × {0,1}` laid out by [`ProductLayout`].
    pub fn product(x_size: usize, xstar_size: usize) -> Result<Self> {
        if x_size == 0 || xstar_size == 0 {
            return Err(Error::EmptyDomain(PRODUCT.into()));
        }
        Self::new(PRODUCT, x_size * xstar_size * 2)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index < self.size {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                domain: self.label.clone(),
                index,
                size: self.size,
            })
        }
    }

    pub fn ensure_same(&self, other: &FiniteDomain) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::DomainMismatch {
                left: self.label.clone(),
                left_size: self.size,
                right: other.label.clone(),
                right_size: other.size,
            })
        }
    }
}

/// Index arithmetic for the product domain: x-major, x*-minor, label last.
///
/// Point `(x, x*, y)` sits at `(x * |X*| + x*) * 2 + y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProductLayout {
    pub x_size: usize,
    pub xstar_size: usize,
}

impl ProductLayout {
    pub fn new(x_size: usize, xstar_size: usize) -> Self {
        ProductLayout { x_size, xstar_size }
    }

    pub fn size(&self) -> usize {
        self.x_size * self.xstar_size * 2
    }

    #[inline]
    pub fn index(&self, x: usize, xstar: usize, y: bool) -> usize {
        (x * self.xstar_size + xstar) * 2 + usize::from(y)
    }

    pub fn index_of(&self, t: &Triple) -> Result<usize> {
        if t.x >= self.x_size {
            return Err(Error::IndexOutOfRange {
                domain: INSTANCE.into(),
                index: t.x,
                size: self.x_size,
            });
        }
        if t.xstar >= self.xstar_size {
            return Err(Error::IndexOutOfRange {
                domain: PRIVILEGED.into(),
                index: t.xstar,
                size: self.xstar_size,
            });
        }
        Ok(self.index(t.x, t.xstar, t.y))
    }

    #[inline]
    pub fn decode(&self, index: usize) -> Triple {
        let y = index % 2 == 1;
        let pair = index / 2;
        Triple::new(pair / self.xstar_size, pair % self.xstar_size, y)
    }

    /// Human-readable name with 1-based point numbers, e.g. `(x1,x*3,0)`.
    pub fn name(&self, index: usize) -> String {
        let t = self.decode(index);
        format!("(x{},x*{},{})", t.x + 1, t.xstar + 1, u8::from(t.y))
    }
}
