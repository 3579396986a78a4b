//! JSON file formats for classes, samples and distributions.
//!
//! Class files look like `{"domain_size": 3, "hypotheses": ["000", "011"]}`,
//! one bit string per member with point 0 first.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::domain::FiniteDomain;
use crate::error::{Error, Result};
use crate::hypothesis::HypothesisClass;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassFile {
    pub domain_size: usize,
    pub hypotheses: Vec<String>,
}

impl ClassFile {
    pub fn from_class(cls: &HypothesisClass) -> Self {
        ClassFile {
            domain_size: cls.domain().size(),
            hypotheses: cls.members().iter().map(|h| h.to_string()).collect(),
        }
    }

    /// Builds the class over a domain with the given role label (`X`, `X*`, ...).
    pub fn into_class(self, label: &str) -> Result<HypothesisClass> {
        let domain = Arc::new(FiniteDomain::new(label, self.domain_size)?);
        let patterns: Vec<&str> = self.hypotheses.iter().map(String::as_str).collect();
        HypothesisClass::parse(domain, &patterns)
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&read_text(path)?)?)
}

pub fn read_class(path: &Path, label: &str) -> Result<HypothesisClass> {
    read_json::<ClassFile>(path)?.into_class(label)
}

pub fn class_to_json(cls: &HypothesisClass) -> String {
    serde_json::to_string_pretty(&ClassFile::from_class(cls)).expect("class file serializes")
}
