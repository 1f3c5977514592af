#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;

use docgen_core::{ClipBank, Documentary};
use proptest::prelude::*;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn raw_fixture(name: &str) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

pub const SMALL_TOPICS: [&str; 3] = ["tourism", "rentals", "families"];

/// Parameters of a small random bank: (speaker, duration, topic mask, question).
pub type SmallClip = (u8, u32, u8, u32);

pub fn small_clip() -> impl Strategy<Value = SmallClip> {
    (0u8..4, 20u32..140, 1u8..8, 0u32..4)
}

pub fn small_bank_json(clips: &[SmallClip]) -> String {
    let clips: Vec<String> = clips
        .iter()
        .enumerate()
        .map(|(i, (speaker, dur, mask, q))| {
            let kws: Vec<String> = SMALL_TOPICS
                .iter()
                .enumerate()
                .filter(|(b, _)| mask & (1 << b) != 0)
                .map(|(_, t)| format!("\"{t}\""))
                .collect();
            format!(
                r#"{{"id":"k{i}","interviewee_id":"p{speaker}","duration_s":{dur},"keywords":[{}],"question_index":{q},"media_uri":"media/k{i}.mp4"}}"#,
                kws.join(",")
            )
        })
        .collect();
    format!(
        r#"{{"topics":["tourism","rentals","families"],
            "interviewees":[{{"id":"p0","display_name":"P0","role":"r"}},{{"id":"p1","display_name":"P1","role":"r"}},
                            {{"id":"p2","display_name":"P2","role":"r"}},{{"id":"p3","display_name":"P3","role":"r"}}],
            "clips":[{}]}}"#,
        clips.join(",")
    )
}

/// Checks every documentary invariant directly against the bank.
pub fn check_documentary(bank: &ClipBank, doc: &Documentary) -> Result<(), String> {
    let c = &doc.constraints;
    let total: u32 = doc.clips.iter().map(|c| c.duration_s).sum();
    if total != doc.total_duration_s {
        return Err(format!("total {} != sum {}", doc.total_duration_s, total));
    }
    if total < c.min_total_s || total > c.max_total_s {
        return Err(format!("total {total} outside window"));
    }
    let ids: BTreeSet<_> = doc.clips.iter().map(|c| &c.id).collect();
    if ids.len() != doc.clips.len() {
        return Err("repeated clip".into());
    }
    let mut per: HashMap<&str, u32> = HashMap::new();
    for clip in &doc.clips {
        if bank.clip(&clip.id) != Some(clip) {
            return Err(format!("clip {} not from bank", clip.id));
        }
        if !clip
            .keywords
            .iter()
            .any(|k| doc.selection.topics.contains(k))
        {
            return Err(format!("clip {} off-selection", clip.id));
        }
        *per.entry(clip.interviewee_id.as_str()).or_default() += 1;
    }
    if per.values().any(|&n| n > c.max_clips_per_speaker) {
        return Err("speaker cap exceeded".into());
    }
    if c.require_topic_coverage
        && !doc
            .selection
            .topics
            .iter()
            .all(|t| doc.clips.iter().any(|clip| clip.keywords.contains(t)))
    {
        return Err("selected topic not covered".into());
    }
    if doc
        .clips
        .windows(2)
        .any(|w| w[0].question_index > w[1].question_index)
    {
        return Err("question order violated".into());
    }
    Ok(())
}
