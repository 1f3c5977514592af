//! Exact feasibility decisions and the brute-force test oracle.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::clipbank::{Clip, ClipBank, ClipId};
use crate::generator::{FilterSelection, GenerateError, GenerationConstraints, filter_candidates};
use crate::topic::Topic;

/// Largest candidate pool [`feasible`] will search exhaustively.
pub const DEFAULT_EXACT_SEARCH_CAP: usize = 24;
/// Largest candidate pool [`oracle_enumerate`] accepts.
pub const ORACLE_POOL_CAP: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InfeasibleReason {
    NoCandidates,
    InsufficientDuration,
    CannotFitWindow,
    CoverageImpossible,
}

impl fmt::Display for InfeasibleReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            InfeasibleReason::NoCandidates => "NoCandidates",
            InfeasibleReason::InsufficientDuration => "InsufficientDuration",
            InfeasibleReason::CannotFitWindow => "CannotFitWindow",
            InfeasibleReason::CoverageImpossible => "CoverageImpossible",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<ClipId>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<InfeasibleReason>,
}

impl FeasibilityReport {
    fn no(reason: InfeasibleReason) -> Self {
        FeasibilityReport {
            feasible: false,
            witness: None,
            reason: Some(reason),
        }
    }
}

/// Most screen time reachable from `pool` when each speaker contributes at
/// most `cap` clips (their longest ones).
pub fn capped_duration_sum(pool: &[&Clip], cap: u32) -> u64 {
    let mut by_speaker: HashMap<_, Vec<u32>> = HashMap::new();
    for clip in pool {
        by_speaker
            .entry(&clip.interviewee_id)
            .or_default()
            .push(clip.duration_s);
    }
    by_speaker
        .into_values()
        .map(|mut ds| {
            ds.sort_unstable_by(|a, b| b.cmp(a));
            ds.into_iter()
                .take(cap as usize)
                .map(u64::from)
                .sum::<u64>()
        })
        .sum()
}

pub fn feasible(
    bank: &ClipBank,
    selection: &FilterSelection,
    constraints: &GenerationConstraints,
) -> Result<FeasibilityReport, GenerateError> {
    feasible_with_cap(bank, selection, constraints, DEFAULT_EXACT_SEARCH_CAP)
}

/// Decides whether any documentary exists. Reasons are checked in order:
/// empty pool, not enough capped screen time, no subset inside the window,
/// no window-fitting subset that also covers every selected topic.
pub fn feasible_with_cap(
    bank: &ClipBank,
    selection: &FilterSelection,
    constraints: &GenerationConstraints,
    cap: usize,
) -> Result<FeasibilityReport, GenerateError> {
    constraints.check()?;
    let pool = filter_candidates(bank, selection)?;
    if pool.is_empty() {
        return Ok(FeasibilityReport::no(InfeasibleReason::NoCandidates));
    }
    if capped_duration_sum(&pool, constraints.max_clips_per_speaker)
        < u64::from(constraints.min_total_s)
    {
        return Ok(FeasibilityReport::no(
            InfeasibleReason::InsufficientDuration,
        ));
    }
    if pool.len() > cap {
        return Err(GenerateError::PoolTooLarge {
            size: pool.len(),
            cap,
        });
    }

    let topics: Vec<&Topic> = if constraints.require_topic_coverage {
        selection.topics.iter().collect()
    } else {
        Vec::new()
    };
    let Some(found) = Search::new(&pool, constraints, &[]).run() else {
        return Ok(FeasibilityReport::no(InfeasibleReason::CannotFitWindow));
    };
    let found = if topics.is_empty() {
        found
    } else {
        match Search::new(&pool, constraints, &topics).run() {
            Some(f) => f,
            None => return Ok(FeasibilityReport::no(InfeasibleReason::CoverageImpossible)),
        }
    };

    let mut chosen: Vec<(u32, usize)> =
        found.iter().map(|&i| (pool[i].question_index, i)).collect();
    chosen.sort_unstable();
    Ok(FeasibilityReport {
        feasible: true,
        witness: Some(
            chosen
                .into_iter()
                .map(|(_, i)| pool[i].id.clone())
                .collect(),
        ),
        reason: None,
    })
}

/// Depth-first include/exclude search with duration, speaker-cap and
/// topic-reachability pruning.
struct Search<'a> {
    pool: &'a [&'a Clip],
    c: &'a GenerationConstraints,
    /// `suffix[i]`: total duration of `pool[i..]`.
    suffix: Vec<u64>,
    /// For each required topic, its last position in the pool.
    last_seen: Vec<Option<usize>>,
    topic_of: Vec<Vec<usize>>,
    covered: Vec<u32>,
    speaker_of: Vec<usize>,
    speaker_count: Vec<u32>,
    chosen: Vec<usize>,
}

impl<'a> Search<'a> {
    fn new(pool: &'a [&'a Clip], c: &'a GenerationConstraints, topics: &[&Topic]) -> Self {
        let mut suffix = vec![0u64; pool.len() + 1];
        for i in (0..pool.len()).rev() {
            suffix[i] = suffix[i + 1] + u64::from(pool[i].duration_s);
        }
        let topic_of: Vec<Vec<usize>> = pool
            .iter()
            .map(|clip| {
                topics
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| clip.keywords.contains(**t))
                    .map(|(k, _)| k)
                    .collect()
            })
            .collect();
        let mut last_seen = vec![None; topics.len()];
        for (i, ks) in topic_of.iter().enumerate() {
            for &k in ks {
                last_seen[k] = Some(i);
            }
        }
        let mut speakers = HashMap::new();
        let speaker_of = pool
            .iter()
            .map(|clip| {
                let next = speakers.len();
                *speakers.entry(&clip.interviewee_id).or_insert(next)
            })
            .collect();
        Search {
            pool,
            c,
            suffix,
            last_seen,
            topic_of,
            covered: vec![0; topics.len()],
            speaker_of,
            speaker_count: vec![0; speakers.len()],
            chosen: Vec::new(),
        }
    }

    fn run(mut self) -> Option<Vec<usize>> {
        if self.last_seen.iter().any(Option::is_none) {
            return None;
        }
        if self.dfs(0, 0) {
            Some(self.chosen)
        } else {
            None
        }
    }

    fn all_covered(&self) -> bool {
        self.covered.iter().all(|&n| n > 0)
    }

    fn dfs(&mut self, i: usize, total: u64) -> bool {
        if !self.chosen.is_empty() && self.c.window_contains(total) && self.all_covered() {
            return true;
        }
        if i == self.pool.len() || total + self.suffix[i] < u64::from(self.c.min_total_s) {
            return false;
        }
        let unreachable = self
            .covered
            .iter()
            .zip(&self.last_seen)
            .any(|(&n, last)| n == 0 && last.is_none_or(|l| l < i));
        if unreachable {
            return false;
        }

        let clip = self.pool[i];
        let speaker = self.speaker_of[i];
        let with = total + u64::from(clip.duration_s);
        if with <= u64::from(self.c.max_total_s)
            && self.speaker_count[speaker] < self.c.max_clips_per_speaker
        {
            self.speaker_count[speaker] += 1;
            for &k in &self.topic_of[i] {
                self.covered[k] += 1;
            }
            self.chosen.push(i);
            if self.dfs(i + 1, with) {
                return true;
            }
            self.chosen.pop();
            for &k in &self.topic_of[i] {
                self.covered[k] -= 1;
            }
            self.speaker_count[speaker] -= 1;
        }
        self.dfs(i + 1, total)
    }
}

/// Every valid clip sequence for the selection, by brute force over all
/// subsets of the pool and all tie orderings within equal question indices.
/// Exponential; pools above [`ORACLE_POOL_CAP`] are refused.
pub fn oracle_enumerate(
    bank: &ClipBank,
    selection: &FilterSelection,
    constraints: &GenerationConstraints,
) -> Result<BTreeSet<Vec<ClipId>>, GenerateError> {
    constraints.check()?;
    let pool = filter_candidates(bank, selection)?;
    if pool.len() > ORACLE_POOL_CAP {
        return Err(GenerateError::PoolTooLarge {
            size: pool.len(),
            cap: ORACLE_POOL_CAP,
        });
    }

    let mut out = BTreeSet::new();
    for mask in 1u32..(1u32 << pool.len()) {
        let subset: Vec<&Clip> = (0..pool.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| pool[i])
            .collect();
        if !subset_is_valid(&subset, selection, constraints) {
            continue;
        }
        let mut sorted = subset;
        sorted.sort_by_key(|c| c.question_index);
        let groups: Vec<Vec<&Clip>> = sorted
            .chunk_by(|a, b| a.question_index == b.question_index)
            .map(<[&Clip]>::to_vec)
            .collect();
        let mut prefix = Vec::new();
        expand_orderings(&groups, &mut prefix, &mut out);
    }
    Ok(out)
}

fn subset_is_valid(
    subset: &[&Clip],
    selection: &FilterSelection,
    c: &GenerationConstraints,
) -> bool {
    let total: u64 = subset.iter().map(|clip| u64::from(clip.duration_s)).sum();
    if total < u64::from(c.min_total_s) || total > u64::from(c.max_total_s) {
        return false;
    }
    let mut per_speaker: HashMap<&str, u32> = HashMap::new();
    for clip in subset {
        let n = per_speaker.entry(clip.interviewee_id.as_str()).or_default();
        *n += 1;
        if *n > c.max_clips_per_speaker {
            return false;
        }
    }
    if subset.iter().any(|clip| !clip.has_any(&selection.topics)) {
        return false;
    }
    if c.require_topic_coverage {
        return selection
            .topics
            .iter()
            .all(|t| subset.iter().any(|clip| clip.keywords.contains(t)));
    }
    true
}

fn expand_orderings(
    groups: &[Vec<&Clip>],
    prefix: &mut Vec<ClipId>,
    out: &mut BTreeSet<Vec<ClipId>>,
) {
    let Some((first, rest)) = groups.split_first() else {
        out.insert(prefix.clone());
        return;
    };
    let mut group = first.clone();
    permute(&mut group, 0, &mut |perm| {
        let len = prefix.len();
        prefix.extend(perm.iter().map(|c| c.id.clone()));
        expand_orderings(rest, prefix, out);
        prefix.truncate(len);
    });
}

fn permute<'c>(items: &mut Vec<&'c Clip>, k: usize, visit: &mut dyn FnMut(&[&'c Clip])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}
