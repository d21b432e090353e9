use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordinal encoder: distinct strings sorted byte-wise, coded `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct LabelEncoder {
    classes: Vec<String>,
    code_of: HashMap<String, u32>,
}

impl LabelEncoder {
    pub fn fit<I, S>(values: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let distinct: BTreeSet<String> = values
            .into_iter()
            .map(|s| s.as_ref().to_owned())
            .collect();
        if distinct.is_empty() {
            return Err(Error::invalid("cannot fit a label encoder on no values"));
        }
        // BTreeSet<String> iterates in byte-wise order.
        Ok(Self::from_sorted(distinct.into_iter().collect()))
    }

    fn from_sorted(classes: Vec<String>) -> Self {
        let code_of = classes
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as u32))
            .collect();
        LabelEncoder { classes, code_of }
    }

    pub fn encode(&self, value: &str) -> Option<u32> {
        self.code_of.get(value).copied()
    }

    pub fn decode(&self, code: u32) -> Option<&str> {
        self.classes.get(code as usize).map(String::as_str)
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

impl TryFrom<Vec<String>> for LabelEncoder {
    type Error = Error;

    fn try_from(classes: Vec<String>) -> Result<Self> {
        if classes.is_empty() {
            return Err(Error::invalid("label encoder with no classes"));
        }
        if classes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(
                "label encoder classes must be strictly increasing",
            ));
        }
        Ok(Self::from_sorted(classes))
    }
}

impl From<LabelEncoder> for Vec<String> {
    fn from(e: LabelEncoder) -> Self {
        e.classes
    }
}
