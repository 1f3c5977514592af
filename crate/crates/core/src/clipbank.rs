//! The clip bank: manifest loading, validation and aggregate statistics.
//!
//! A [`ClipBank`] is built once from a JSON manifest and never mutated
//! afterwards. Hard violations (duplicate ids, dangling references, unknown
//! keywords) are rejected at load time; soft findings such as clip lengths
//! outside the observed range are reported by [`validate_bank`].

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::topic::{Topic, TopicError};

/// Shortest clip length seen in the reference interview bank, in seconds.
pub const OBSERVED_MIN_DURATION_S: u32 = 18;
/// Longest clip length seen in the reference interview bank (1:14).
pub const OBSERVED_MAX_DURATION_S: u32 = 74;

macro_rules! id_newtype {
    ($name:ident) => {
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_string())
            }
        }
    };
}

id_newtype!(ClipId);
id_newtype!(IntervieweeId);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interviewee {
    pub id: IntervieweeId,
    pub display_name: String,
    #[serde(rename = "role")]
    pub role_description: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Clip {
    pub id: ClipId,
    pub interviewee_id: IntervieweeId,
    pub duration_s: u32,
    pub keywords: BTreeSet<Topic>,
    pub question_index: u32,
    pub media_uri: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub excerpt: Option<String>,
}

impl Clip {
    pub fn has_any(&self, topics: &BTreeSet<Topic>) -> bool {
        self.keywords.iter().any(|k| topics.contains(k))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest<'a> {
    topics: Vec<String>,
    interviewees: Vec<Interviewee>,
    #[serde(borrow)]
    clips: Vec<&'a RawValue>,
    #[serde(default)]
    source_notes: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed manifest: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid topic: {0}")]
    InvalidTopic(#[from] TopicError),
    #[error("manifest has no clips")]
    EmptyBank,
    #[error("duplicate {kind} id {id:?}")]
    DuplicateId { kind: &'static str, id: String },
    #[error("clip {clip:?} uses keyword {topic:?} outside the topic vocabulary")]
    UnknownTopicRef { clip: String, topic: String },
    #[error("clip {clip:?} references unknown interviewee {interviewee:?}")]
    DanglingSpeaker { clip: String, interviewee: String },
    #[error("clip {0:?} has zero duration")]
    ZeroDuration(String),
    #[error("clip {0:?} has no keywords")]
    NoKeywords(String),
}

/// Validated, immutable collection of clips plus vocabulary and roster.
#[derive(Debug, Clone)]
pub struct ClipBank {
    topics: Vec<Topic>,
    topic_set: BTreeSet<Topic>,
    interviewees: Vec<Interviewee>,
    speaker_index: HashMap<IntervieweeId, usize>,
    clips: Vec<Clip>,
    clip_index: HashMap<ClipId, usize>,
    raw_clips: Vec<Box<RawValue>>,
    source_notes: Option<String>,
}

impl PartialEq for ClipBank {
    fn eq(&self, other: &Self) -> bool {
        self.topics == other.topics
            && self.interviewees == other.interviewees
            && self.clips == other.clips
            && self.source_notes == other.source_notes
    }
}

/// Reads and validates a manifest file.
pub fn load_bank(path: impl AsRef<Path>) -> Result<ClipBank, LoadError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ClipBank::from_json(&text)
}

impl ClipBank {
    pub fn from_json(text: &str) -> Result<ClipBank, LoadError> {
        let manifest: Manifest<'_> = serde_json::from_str(text)?;

        let mut topics = Vec::with_capacity(manifest.topics.len());
        let mut topic_set = BTreeSet::new();
        for raw in &manifest.topics {
            let topic = Topic::new(raw)?;
            if !topic_set.insert(topic.clone()) {
                return Err(LoadError::DuplicateId {
                    kind: "topic",
                    id: topic.display_name(),
                });
            }
            topics.push(topic);
        }

        let mut speaker_index = HashMap::new();
        for (i, person) in manifest.interviewees.iter().enumerate() {
            if speaker_index.insert(person.id.clone(), i).is_some() {
                return Err(LoadError::DuplicateId {
                    kind: "interviewee",
                    id: person.id.0.clone(),
                });
            }
        }

        if manifest.clips.is_empty() {
            return Err(LoadError::EmptyBank);
        }

        let mut clips = Vec::with_capacity(manifest.clips.len());
        let mut clip_index = HashMap::new();
        let mut raw_clips = Vec::with_capacity(manifest.clips.len());
        for raw in manifest.clips {
            let clip: Clip = serde_json::from_str(raw.get())?;
            if clip_index.contains_key(&clip.id) {
                return Err(LoadError::DuplicateId {
                    kind: "clip",
                    id: clip.id.0.clone(),
                });
            }
            if clip.duration_s == 0 {
                return Err(LoadError::ZeroDuration(clip.id.0.clone()));
            }
            if clip.keywords.is_empty() {
                return Err(LoadError::NoKeywords(clip.id.0.clone()));
            }
            if let Some(bad) = clip.keywords.iter().find(|k| !topic_set.contains(*k)) {
                return Err(LoadError::UnknownTopicRef {
                    clip: clip.id.0.clone(),
                    topic: bad.display_name(),
                });
            }
            if !speaker_index.contains_key(&clip.interviewee_id) {
                return Err(LoadError::DanglingSpeaker {
                    clip: clip.id.0.clone(),
                    interviewee: clip.interviewee_id.0.clone(),
                });
            }
            clip_index.insert(clip.id.clone(), clips.len());
            clips.push(clip);
            raw_clips.push(raw.to_owned());
        }

        Ok(ClipBank {
            topics,
            topic_set,
            interviewees: manifest.interviewees,
            speaker_index,
            clips,
            clip_index,
            raw_clips,
            source_notes: manifest.source_notes,
        })
    }

    /// Vocabulary in declaration order.
    pub fn topics(&self) -> &[Topic] {
        &self.topics
    }

    pub fn has_topic(&self, topic: &Topic) -> bool {
        self.topic_set.contains(topic)
    }

    pub fn interviewees(&self) -> &[Interviewee] {
        &self.interviewees
    }

    pub fn interviewee(&self, id: &IntervieweeId) -> Option<&Interviewee> {
        self.speaker_index.get(id).map(|&i| &self.interviewees[i])
    }

    pub fn clips(&self) -> &[Clip] {
        &self.clips
    }

    pub fn clip(&self, id: &ClipId) -> Option<&Clip> {
        self.clip_index.get(id).map(|&i| &self.clips[i])
    }

    /// The clip's JSON record exactly as it appeared in the manifest.
    pub fn raw_clip(&self, id: &ClipId) -> Option<&RawValue> {
        self.clip_index.get(id).map(|&i| &*self.raw_clips[i])
    }

    pub fn source_notes(&self) -> Option<&str> {
        self.source_notes.as_deref()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FindingCode {
    DurationOutOfObservedRange,
    DeadFilter,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub severity: Severity,
    pub code: FindingCode,
    pub subject: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.findings.iter().any(|f| f.severity == Severity::Error)
    }

    pub fn count(&self, code: FindingCode) -> usize {
        self.findings.iter().filter(|f| f.code == code).count()
    }
}

/// Lists soft findings: clips outside the observed 18..=74 s range and
/// vocabulary topics that no clip carries.
pub fn validate_bank(bank: &ClipBank) -> ValidationReport {
    let mut findings = Vec::new();
    for clip in &bank.clips {
        if !(OBSERVED_MIN_DURATION_S..=OBSERVED_MAX_DURATION_S).contains(&clip.duration_s) {
            findings.push(Finding {
                severity: Severity::Warning,
                code: FindingCode::DurationOutOfObservedRange,
                subject: clip.id.0.clone(),
            });
        }
    }
    let used: HashSet<&Topic> = bank.clips.iter().flat_map(|c| c.keywords.iter()).collect();
    for topic in &bank.topics {
        if !used.contains(topic) {
            findings.push(Finding {
                severity: Severity::Warning,
                code: FindingCode::DeadFilter,
                subject: topic.display_name(),
            });
        }
    }
    ValidationReport { findings }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BankStats {
    pub clip_count: usize,
    pub interviewee_count: usize,
    pub topic_count: usize,
    pub total_clip_duration_s: u64,
    pub per_topic_clip_counts: BTreeMap<Topic, usize>,
    pub per_speaker_clip_counts: BTreeMap<IntervieweeId, usize>,
    pub min_duration_s: u32,
    pub max_duration_s: u32,
    pub mean_duration_s: f64,
}

pub fn bank_stats(bank: &ClipBank) -> BankStats {
    let mut per_topic: BTreeMap<Topic, usize> =
        bank.topics.iter().map(|t| (t.clone(), 0)).collect();
    let mut per_speaker: BTreeMap<IntervieweeId, usize> = bank
        .interviewees
        .iter()
        .map(|p| (p.id.clone(), 0))
        .collect();
    let mut total: u64 = 0;
    let mut min = u32::MAX;
    let mut max = 0;
    for clip in &bank.clips {
        for k in &clip.keywords {
            *per_topic.entry(k.clone()).or_default() += 1;
        }
        *per_speaker.entry(clip.interviewee_id.clone()).or_default() += 1;
        total += u64::from(clip.duration_s);
        min = min.min(clip.duration_s);
        max = max.max(clip.duration_s);
    }
    BankStats {
        clip_count: bank.clips.len(),
        interviewee_count: bank.interviewees.len(),
        topic_count: bank.topics.len(),
        total_clip_duration_s: total,
        per_topic_clip_counts: per_topic,
        per_speaker_clip_counts: per_speaker,
        min_duration_s: min,
        max_duration_s: max,
        // Banks are never empty, so the division is defined.
        mean_duration_s: total as f64 / bank.clips.len() as f64,
    }
}
