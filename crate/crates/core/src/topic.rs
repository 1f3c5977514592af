use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Longest allowed normalized topic token.
pub const MAX_TOPIC_LEN: usize = 40;

/// A filter keyword from the bank vocabulary.
///
/// Stored hyphen-normalized and lowercase (`affordable-housing`). The display
/// form swaps hyphens back to spaces and is what gets serialized, so
/// `"Affordable Housing"`, `"affordable_housing"` and `"affordable-housing"`
/// all name the same topic.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Topic(String);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TopicError {
    #[error("topic is empty")]
    Empty,
    #[error("topic {0:?} is longer than {MAX_TOPIC_LEN} characters")]
    TooLong(String),
    #[error("topic {0:?} contains characters outside letters, digits, spaces and hyphens")]
    BadChar(String),
}

impl Topic {
    pub fn new(raw: &str) -> Result<Self, TopicError> {
        let mut out = String::with_capacity(raw.len());
        let mut pending_sep = false;
        for ch in raw.trim().chars() {
            match ch {
                ' ' | '\t' | '_' | '-' => pending_sep = true,
                c if c.is_ascii_alphanumeric() => {
                    if pending_sep && !out.is_empty() {
                        out.push('-');
                    }
                    pending_sep = false;
                    out.push(c.to_ascii_lowercase());
                }
                _ => return Err(TopicError::BadChar(raw.to_string())),
            }
        }
        if out.is_empty() {
            return Err(TopicError::Empty);
        }
        if out.len() > MAX_TOPIC_LEN {
            return Err(TopicError::TooLong(raw.to_string()));
        }
        Ok(Topic(out))
    }

    /// Normalized token, e.g. `social-conditions`.
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Human form, e.g. `social conditions`.
    pub fn display_name(&self) -> String {
        self.0.replace('-', " ")
    }
}

impl fmt::Display for Topic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_name())
    }
}

impl FromStr for Topic {
    type Err = TopicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Topic::new(s)
    }
}

impl Serialize for Topic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.display_name())
    }
}

impl<'de> Deserialize<'de> for Topic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        Topic::new(&raw).map_err(serde::de::Error::custom)
    }
}
