//! Seeded assembly of documentaries from a filter selection.
//!
//! One attempt runs three passes over the candidate pool (every clip that
//! carries at least one selected topic):
//!
//! 1. coverage: visit the selected topics in seeded order and, for each topic
//!    not yet on screen, add a uniformly drawn unused clip carrying it;
//! 2. fill: while the running total is under the window, add a uniformly
//!    drawn clip that still fits, restricted to the least-used speakers;
//! 3. ordering: seeded shuffle, then a stable sort on `question_index`.
//!
//! A dead end restarts with [`sub_seed`]. When the restart budget runs out,
//! pools small enough for exact search are settled by [`feasible`]: either
//! its witness becomes the output or its reason becomes the error.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::clipbank::{Clip, ClipBank, IntervieweeId};
use crate::feasibility::{DEFAULT_EXACT_SEARCH_CAP, InfeasibleReason, feasible_with_cap};
use crate::rng::{SplitMix64, sub_seed};
use crate::topic::Topic;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FilterSelection {
    pub topics: BTreeSet<Topic>,
}

impl FilterSelection {
    pub fn new(topics: impl IntoIterator<Item = Topic>) -> Self {
        FilterSelection {
            topics: topics.into_iter().collect(),
        }
    }

    /// Parses display or normalized topic names.
    pub fn parse<S: AsRef<str>>(names: &[S]) -> Result<Self, GenerateError> {
        let mut topics = BTreeSet::new();
        for name in names {
            let topic = Topic::new(name.as_ref())
                .map_err(|_| GenerateError::UnknownTopic(name.as_ref().to_string()))?;
            topics.insert(topic);
        }
        Ok(FilterSelection { topics })
    }

    pub fn len(&self) -> usize {
        self.topics.len()
    }

    pub fn is_empty(&self) -> bool {
        self.topics.is_empty()
    }

    /// Checks the selection is non-empty and inside the bank vocabulary.
    pub fn check(&self, bank: &ClipBank) -> Result<(), GenerateError> {
        if self.topics.is_empty() {
            return Err(GenerateError::EmptySelection);
        }
        match self.topics.iter().find(|t| !bank.has_topic(t)) {
            Some(t) => Err(GenerateError::UnknownTopic(t.display_name())),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerationConstraints {
    pub min_total_s: u32,
    pub max_total_s: u32,
    pub max_clips_per_speaker: u32,
    pub require_topic_coverage: bool,
    pub max_restarts: u32,
}

impl Default for GenerationConstraints {
    fn default() -> Self {
        // 2-4 minute documentaries.
        GenerationConstraints {
            min_total_s: 120,
            max_total_s: 240,
            max_clips_per_speaker: 2,
            require_topic_coverage: true,
            max_restarts: 64,
        }
    }
}

impl GenerationConstraints {
    pub fn check(&self) -> Result<(), GenerateError> {
        let bad = |msg: &str| Err(GenerateError::InvalidConstraints(msg.to_string()));
        if self.min_total_s == 0 {
            return bad("min_total_s must be positive");
        }
        if self.min_total_s > self.max_total_s {
            return bad("min_total_s exceeds max_total_s");
        }
        if self.max_clips_per_speaker == 0 {
            return bad("max_clips_per_speaker must be at least 1");
        }
        if self.max_restarts == 0 {
            return bad("max_restarts must be at least 1");
        }
        Ok(())
    }

    pub fn window_contains(&self, total: u64) -> bool {
        (u64::from(self.min_total_s)..=u64::from(self.max_total_s)).contains(&total)
    }
}

/// An ordered playlist plus everything needed to regenerate it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Documentary {
    pub seed: u64,
    pub selection: FilterSelection,
    pub constraints: GenerationConstraints,
    pub total_duration_s: u32,
    pub clips: Vec<Clip>,
}

impl Documentary {
    pub fn clip_ids(&self) -> Vec<crate::clipbank::ClipId> {
        self.clips.iter().map(|c| c.id.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenerateError {
    #[error("no topics selected")]
    EmptySelection,
    #[error("unknown topic {0:?}")]
    UnknownTopic(String),
    #[error("invalid constraints: {0}")]
    InvalidConstraints(String),
    #[error("no documentary satisfies the constraints: {reason}")]
    Infeasible { reason: InfeasibleReason },
    #[error("gave up after {attempts} attempts on a pool of {pool_size} clips")]
    RestartsExhausted { attempts: u32, pool_size: usize },
    #[error("candidate pool of {size} clips exceeds the exact-search cap of {cap}")]
    PoolTooLarge { size: usize, cap: usize },
}

/// Clips carrying at least one selected topic, in bank order.
pub fn filter_candidates<'b>(
    bank: &'b ClipBank,
    selection: &FilterSelection,
) -> Result<Vec<&'b Clip>, GenerateError> {
    selection.check(bank)?;
    Ok(bank
        .clips()
        .iter()
        .filter(|c| c.has_any(&selection.topics))
        .collect())
}

pub fn generate(
    bank: &ClipBank,
    selection: &FilterSelection,
    constraints: &GenerationConstraints,
    seed: u64,
) -> Result<Documentary, GenerateError> {
    generate_with_cap(bank, selection, constraints, seed, DEFAULT_EXACT_SEARCH_CAP)
}

/// [`generate`] with an explicit pool-size cap for the exact fallback.
pub fn generate_with_cap(
    bank: &ClipBank,
    selection: &FilterSelection,
    constraints: &GenerationConstraints,
    seed: u64,
    exact_cap: usize,
) -> Result<Documentary, GenerateError> {
    constraints.check()?;
    let pool = filter_candidates(bank, selection)?;
    if pool.is_empty() {
        return Err(GenerateError::Infeasible {
            reason: InfeasibleReason::NoCandidates,
        });
    }
    if crate::feasibility::capped_duration_sum(&pool, constraints.max_clips_per_speaker)
        < u64::from(constraints.min_total_s)
    {
        return Err(GenerateError::Infeasible {
            reason: InfeasibleReason::InsufficientDuration,
        });
    }

    for attempt in 0..constraints.max_restarts {
        let mut rng = SplitMix64::new(sub_seed(seed, attempt));
        if let Some(mut picked) = attempt_once(&pool, selection, constraints, &mut rng) {
            order_clips(&mut picked, &mut rng);
            return Ok(assemble(picked, selection, constraints, seed));
        }
    }

    if pool.len() > exact_cap {
        return Err(GenerateError::RestartsExhausted {
            attempts: constraints.max_restarts,
            pool_size: pool.len(),
        });
    }
    let report = feasible_with_cap(bank, selection, constraints, exact_cap)?;
    match report.witness {
        Some(ids) => {
            let mut picked: Vec<&Clip> = ids
                .iter()
                .map(|id| bank.clip(id).expect("witness ids come from the bank"))
                .collect();
            let mut rng = SplitMix64::new(sub_seed(seed, constraints.max_restarts));
            order_clips(&mut picked, &mut rng);
            Ok(assemble(picked, selection, constraints, seed))
        }
        None => Err(GenerateError::Infeasible {
            reason: report.reason.expect("infeasible reports carry a reason"),
        }),
    }
}

struct Tally<'a> {
    used: Vec<bool>,
    per_speaker: HashMap<&'a IntervieweeId, u32>,
    total: u32,
    picked: Vec<&'a Clip>,
}

impl<'a> Tally<'a> {
    fn fits(&self, i: usize, clip: &Clip, c: &GenerationConstraints) -> bool {
        !self.used[i]
            && self
                .per_speaker
                .get(&clip.interviewee_id)
                .copied()
                .unwrap_or(0)
                < c.max_clips_per_speaker
            && self.total + clip.duration_s <= c.max_total_s
    }

    fn take(&mut self, i: usize, clip: &'a Clip) {
        self.used[i] = true;
        *self.per_speaker.entry(&clip.interviewee_id).or_default() += 1;
        self.total += clip.duration_s;
        self.picked.push(clip);
    }
}

fn attempt_once<'a>(
    pool: &[&'a Clip],
    selection: &FilterSelection,
    c: &GenerationConstraints,
    rng: &mut SplitMix64,
) -> Option<Vec<&'a Clip>> {
    let mut tally = Tally {
        used: vec![false; pool.len()],
        per_speaker: HashMap::new(),
        total: 0,
        picked: Vec::new(),
    };

    if c.require_topic_coverage {
        let mut topics: Vec<&Topic> = selection.topics.iter().collect();
        rng.shuffle(&mut topics);
        for topic in topics {
            if tally.picked.iter().any(|p| p.keywords.contains(topic)) {
                continue;
            }
            let eligible: Vec<usize> = (0..pool.len())
                .filter(|&i| pool[i].keywords.contains(topic) && tally.fits(i, pool[i], c))
                .collect();
            let &i = rng.choose(&eligible)?;
            tally.take(i, pool[i]);
        }
    }

    while tally.total < c.min_total_s {
        let eligible: Vec<usize> = (0..pool.len())
            .filter(|&i| tally.fits(i, pool[i], c))
            .collect();
        let fewest = eligible
            .iter()
            .map(|&i| {
                tally
                    .per_speaker
                    .get(&pool[i].interviewee_id)
                    .copied()
                    .unwrap_or(0)
            })
            .min()?;
        let least_used: Vec<usize> = eligible
            .into_iter()
            .filter(|&i| {
                tally
                    .per_speaker
                    .get(&pool[i].interviewee_id)
                    .copied()
                    .unwrap_or(0)
                    == fewest
            })
            .collect();
        let &i = rng.choose(&least_used)?;
        tally.take(i, pool[i]);
    }

    Some(tally.picked)
}

fn order_clips(picked: &mut [&Clip], rng: &mut SplitMix64) {
    rng.shuffle(picked);
    picked.sort_by_key(|c| c.question_index);
}

fn assemble(
    picked: Vec<&Clip>,
    selection: &FilterSelection,
    constraints: &GenerationConstraints,
    seed: u64,
) -> Documentary {
    Documentary {
        seed,
        selection: selection.clone(),
        constraints: *constraints,
        total_duration_s: picked.iter().map(|c| c.duration_s).sum(),
        clips: picked.into_iter().cloned().collect(),
    }
}
