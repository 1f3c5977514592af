//! Session logs and exposure metrics.
//!
//! A session is the sequence of documentaries one viewer generated while
//! reconfiguring filters. [`coverage_report`] measures how much of the topic
//! vocabulary, the speaker roster and the clip bank those generations
//! actually put on screen, and how much consecutive cuts overlapped.

use std::collections::BTreeSet;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use chrono::{DateTime, TimeDelta, Utc};
use serde::{Deserialize, Serialize};

use crate::clipbank::{ClipBank, ClipId, IntervieweeId};
use crate::generator::{Documentary, FilterSelection, GenerationConstraints, generate};
use crate::rng::SplitMix64;
use crate::topic::Topic;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionEntry {
    pub timestamp: DateTime<Utc>,
    pub selection: FilterSelection,
    pub seed: u64,
    pub clip_ids: Vec<ClipId>,
    pub total_duration_s: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionLog {
    pub session_id: String,
    pub entries: Vec<SessionEntry>,
}

#[derive(Debug, thiserror::Error)]
pub enum AnalyticsError {
    #[error("documentary references clip {0:?} which is not in the bank")]
    ForeignClip(String),
    #[error("session log is empty")]
    EmptyLog,
    #[error("log entry {line} is not later than the entry before it")]
    OutOfOrder { line: usize },
    #[error("log line {line}: {source}")]
    BadLine {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("invalid simulation policy: {0}")]
    InvalidPolicy(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl SessionLog {
    pub fn new(session_id: impl Into<String>) -> Self {
        SessionLog {
            session_id: session_id.into(),
            entries: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Appends `doc`, stamped `at` or one microsecond after the previous
    /// entry, whichever is later. Returns the stored entry.
    pub fn record_generation(
        &mut self,
        bank: &ClipBank,
        doc: &Documentary,
        at: DateTime<Utc>,
    ) -> Result<&SessionEntry, AnalyticsError> {
        if let Some(foreign) = doc.clips.iter().find(|c| bank.clip(&c.id).is_none()) {
            return Err(AnalyticsError::ForeignClip(foreign.id.0.clone()));
        }
        let timestamp = match self.entries.last() {
            Some(prev) if at <= prev.timestamp => prev.timestamp + TimeDelta::microseconds(1),
            _ => at,
        };
        self.entries.push(SessionEntry {
            timestamp,
            selection: doc.selection.clone(),
            seed: doc.seed,
            clip_ids: doc.clip_ids(),
            total_duration_s: doc.total_duration_s,
        });
        Ok(self.entries.last().expect("just pushed"))
    }

    /// One JSON object per line, oldest first.
    pub fn to_ndjson(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&entry_line(e));
        }
        out
    }

    pub fn from_ndjson(session_id: impl Into<String>, text: &str) -> Result<Self, AnalyticsError> {
        let mut log = SessionLog::new(session_id);
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let entry: SessionEntry =
                serde_json::from_str(line).map_err(|source| AnalyticsError::BadLine {
                    line: n + 1,
                    source,
                })?;
            if log
                .entries
                .last()
                .is_some_and(|p| entry.timestamp <= p.timestamp)
            {
                return Err(AnalyticsError::OutOfOrder { line: n + 1 });
            }
            log.entries.push(entry);
        }
        Ok(log)
    }

    pub fn read(session_id: impl Into<String>, path: &Path) -> Result<Self, AnalyticsError> {
        let text = std::fs::read_to_string(path)?;
        SessionLog::from_ndjson(session_id, &text)
    }
}

fn entry_line(e: &SessionEntry) -> String {
    let mut line = serde_json::to_string(e).expect("entry serializes");
    line.push('\n');
    line
}

/// Appends one entry to an NDJSON log with a single write. Callers
/// serialize appends per session.
pub fn append_entry(path: &Path, entry: &SessionEntry) -> Result<(), AnalyticsError> {
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    file.write_all(entry_line(entry).as_bytes())?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub generations: usize,
    /// Generations a simulation attempted but could not produce.
    pub skipped: usize,
    pub vocabulary_size: usize,
    pub distinct_topics_viewed: usize,
    pub topic_coverage: f64,
    pub roster_size: usize,
    pub distinct_speakers_viewed: usize,
    pub speaker_coverage: f64,
    pub distinct_clips_viewed: usize,
    /// Mean Jaccard similarity of clip-id sets between consecutive
    /// generations; absent with fewer than two generations.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_consecutive_overlap: Option<f64>,
}

pub fn coverage_report(
    log: &SessionLog,
    bank: &ClipBank,
) -> Result<CoverageReport, AnalyticsError> {
    if log.is_empty() {
        return Err(AnalyticsError::EmptyLog);
    }
    summarize(log, bank, 0)
}

fn summarize(
    log: &SessionLog,
    bank: &ClipBank,
    skipped: usize,
) -> Result<CoverageReport, AnalyticsError> {
    let mut clips: BTreeSet<&ClipId> = BTreeSet::new();
    let mut topics: BTreeSet<&Topic> = BTreeSet::new();
    let mut speakers: BTreeSet<&IntervieweeId> = BTreeSet::new();
    for entry in &log.entries {
        for id in &entry.clip_ids {
            let clip = bank
                .clip(id)
                .ok_or_else(|| AnalyticsError::ForeignClip(id.0.clone()))?;
            clips.insert(&clip.id);
            topics.extend(clip.keywords.iter());
            speakers.insert(&clip.interviewee_id);
        }
    }

    let overlaps: Vec<f64> = log
        .entries
        .windows(2)
        .map(|w| jaccard(&w[0].clip_ids, &w[1].clip_ids))
        .collect();
    let mean_consecutive_overlap =
        (!overlaps.is_empty()).then(|| overlaps.iter().sum::<f64>() / overlaps.len() as f64);

    let ratio = |n: usize, d: usize| if d == 0 { 0.0 } else { n as f64 / d as f64 };
    Ok(CoverageReport {
        generations: log.len(),
        skipped,
        vocabulary_size: bank.topics().len(),
        distinct_topics_viewed: topics.len(),
        topic_coverage: ratio(topics.len(), bank.topics().len()),
        roster_size: bank.interviewees().len(),
        distinct_speakers_viewed: speakers.len(),
        speaker_coverage: ratio(speakers.len(), bank.interviewees().len()),
        distinct_clips_viewed: clips.len(),
        mean_consecutive_overlap,
    })
}

fn jaccard(a: &[ClipId], b: &[ClipId]) -> f64 {
    let a: BTreeSet<&ClipId> = a.iter().collect();
    let b: BTreeSet<&ClipId> = b.iter().collect();
    let union = a.union(&b).count();
    if union == 0 {
        return 1.0;
    }
    a.intersection(&b).count() as f64 / union as f64
}

/// A uniform random viewer: each generation picks a selection size uniformly
/// from `min_topics..=max_topics`, then that many distinct topics uniformly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationPolicy {
    pub min_topics: usize,
    pub max_topics: usize,
    pub generations: usize,
    pub constraints: GenerationConstraints,
}

impl SimulationPolicy {
    pub fn new(min_topics: usize, max_topics: usize, generations: usize) -> Self {
        SimulationPolicy {
            min_topics,
            max_topics,
            generations,
            constraints: GenerationConstraints::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Simulation {
    pub log: SessionLog,
    pub report: CoverageReport,
}

/// Epoch of simulated sessions; entry `i` is stamped `i` seconds later.
pub const SIMULATION_EPOCH: DateTime<Utc> = DateTime::UNIX_EPOCH;

pub fn simulate(
    bank: &ClipBank,
    policy: &SimulationPolicy,
    seed: u64,
) -> Result<Simulation, AnalyticsError> {
    if policy.generations == 0 {
        return Err(AnalyticsError::InvalidPolicy(
            "generations must be at least 1".into(),
        ));
    }
    if policy.min_topics == 0 || policy.min_topics > policy.max_topics {
        return Err(AnalyticsError::InvalidPolicy(format!(
            "topics per selection {}..{} is not a valid range",
            policy.min_topics, policy.max_topics
        )));
    }
    let vocab = bank.topics();
    let lo = policy.min_topics.min(vocab.len());
    let hi = policy.max_topics.min(vocab.len());

    let mut rng = SplitMix64::new(seed);
    let mut log = SessionLog::new(format!("sim-{seed:016x}"));
    let mut skipped = 0;
    for i in 0..policy.generations {
        let size = lo + rng.below(hi - lo + 1);
        let mut order: Vec<&Topic> = vocab.iter().collect();
        rng.shuffle(&mut order);
        let selection = FilterSelection::new(order.into_iter().take(size).cloned());
        let gen_seed = rng.next_u64();
        match generate(bank, &selection, &policy.constraints, gen_seed) {
            Ok(doc) => {
                let at = SIMULATION_EPOCH + TimeDelta::seconds(i as i64);
                log.record_generation(bank, &doc, at)?;
            }
            Err(_) => skipped += 1,
        }
    }
    let report = summarize(&log, bank, skipped)?;
    Ok(Simulation { log, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clipbank::Clip;

    fn bank() -> ClipBank {
        ClipBank::from_json(
            r#"{"topics":["tourism","rentals","government","families","developers",
                          "universities","transportation","gentrification","social conditions",
                          "affordable housing"],
                "interviewees":[{"id":"a","display_name":"A","role":"r"},
                                {"id":"b","display_name":"B","role":"r"},
                                {"id":"c","display_name":"C","role":"r"},
                                {"id":"d","display_name":"D","role":"r"},
                                {"id":"e","display_name":"E","role":"r"},
                                {"id":"f","display_name":"F","role":"r"},
                                {"id":"g","display_name":"G","role":"r"},
                                {"id":"h","display_name":"H","role":"r"},
                                {"id":"i","display_name":"I","role":"r"},
                                {"id":"j","display_name":"J","role":"r"},
                                {"id":"k","display_name":"K","role":"r"},
                                {"id":"l","display_name":"L","role":"r"},
                                {"id":"m","display_name":"M","role":"r"},
                                {"id":"n","display_name":"N","role":"r"}],
                "clips":[
                  {"id":"x1","interviewee_id":"a","duration_s":60,"keywords":["tourism"],"question_index":0,"media_uri":"1"},
                  {"id":"x2","interviewee_id":"b","duration_s":60,"keywords":["tourism","rentals"],"question_index":1,"media_uri":"2"},
                  {"id":"x3","interviewee_id":"c","duration_s":60,"keywords":["rentals"],"question_index":2,"media_uri":"3"},
                  {"id":"x4","interviewee_id":"d","duration_s":70,"keywords":["families"],"question_index":0,"media_uri":"4"},
                  {"id":"x5","interviewee_id":"e","duration_s":70,"keywords":["families"],"question_index":1,"media_uri":"5"}]}"#,
        )
        .unwrap()
    }

    fn doc(bank: &ClipBank, ids: &[&str]) -> Documentary {
        let clips: Vec<Clip> = ids
            .iter()
            .map(|id| bank.clip(&(*id).into()).unwrap().clone())
            .collect();
        Documentary {
            seed: 0,
            selection: FilterSelection::parse(&["tourism"]).unwrap(),
            constraints: GenerationConstraints::default(),
            total_duration_s: clips.iter().map(|c| c.duration_s).sum(),
            clips,
        }
    }

    #[test]
    fn record_extends_by_one() {
        let b = bank();
        let mut log = SessionLog::new("s");
        log.record_generation(&b, &doc(&b, &["x1", "x2"]), Utc::now())
            .unwrap();
        assert_eq!(log.len(), 1);
    }

    #[test]
    fn identical_generations_overlap_fully() {
        let b = bank();
        let mut log = SessionLog::new("s");
        let t = Utc::now();
        log.record_generation(&b, &doc(&b, &["x1", "x2"]), t)
            .unwrap();
        log.record_generation(&b, &doc(&b, &["x1", "x2"]), t)
            .unwrap();
        assert!(log.entries[1].timestamp > log.entries[0].timestamp);
        let r = coverage_report(&log, &b).unwrap();
        assert_eq!(r.mean_consecutive_overlap, Some(1.0));
    }

    #[test]
    fn disjoint_generations_do_not_overlap() {
        let b = bank();
        let mut log = SessionLog::new("s");
        log.record_generation(&b, &doc(&b, &["x1", "x2"]), Utc::now())
            .unwrap();
        log.record_generation(&b, &doc(&b, &["x4", "x5"]), Utc::now())
            .unwrap();
        assert_eq!(
            coverage_report(&log, &b).unwrap().mean_consecutive_overlap,
            Some(0.0)
        );
    }

    #[test]
    fn foreign_clip_rejected() {
        let b = bank();
        let mut d = doc(&b, &["x1"]);
        d.clips[0].id = "ghost".into();
        let mut log = SessionLog::new("s");
        assert!(matches!(
            log.record_generation(&b, &d, Utc::now()),
            Err(AnalyticsError::ForeignClip(id)) if id == "ghost"
        ));
        assert!(log.is_empty());
    }

    #[test]
    fn fractions_for_one_generation() {
        // x1, x2, x3: topics {tourism, rentals}, speakers {a, b, c}.
        let b = bank();
        let mut log = SessionLog::new("s");
        log.record_generation(&b, &doc(&b, &["x1", "x2", "x3"]), Utc::now())
            .unwrap();
        let r = coverage_report(&log, &b).unwrap();
        assert_eq!(r.topic_coverage, 0.2);
        assert_eq!(r.speaker_coverage, 3.0 / 14.0);
        assert_eq!(r.distinct_clips_viewed, 3);
        assert_eq!(r.mean_consecutive_overlap, None);
    }

    #[test]
    fn empty_log_has_no_report() {
        assert!(matches!(
            coverage_report(&SessionLog::new("s"), &bank()),
            Err(AnalyticsError::EmptyLog)
        ));
    }

    #[test]
    fn ndjson_round_trip_and_ordering() {
        let b = bank();
        let mut log = SessionLog::new("s");
        log.record_generation(&b, &doc(&b, &["x1", "x2"]), Utc::now())
            .unwrap();
        log.record_generation(&b, &doc(&b, &["x4", "x5"]), Utc::now())
            .unwrap();
        let text = log.to_ndjson();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(SessionLog::from_ndjson("s", &text).unwrap(), log);

        let swapped: Vec<&str> = text.lines().rev().collect();
        assert!(matches!(
            SessionLog::from_ndjson("s", &swapped.join("\n")),
            Err(AnalyticsError::OutOfOrder { line: 2 })
        ));
    }

    #[test]
    fn simulate_policy_checks() {
        let b = bank();
        assert!(simulate(&b, &SimulationPolicy::new(1, 3, 0), 1).is_err());
        assert!(simulate(&b, &SimulationPolicy::new(0, 3, 5), 1).is_err());
        assert!(simulate(&b, &SimulationPolicy::new(3, 2, 5), 1).is_err());
    }

    #[test]
    fn simulate_single_generation_omits_overlap() {
        let b = bank();
        let sim = simulate(&b, &SimulationPolicy::new(1, 1, 1), 9).unwrap();
        assert_eq!(sim.report.generations + sim.report.skipped, 1);
        assert_eq!(sim.report.mean_consecutive_overlap, None);
    }
}
