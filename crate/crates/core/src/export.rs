//! Playlist renderings of a [`Documentary`].

use std::fmt::Write as _;
use std::str::FromStr;

use crate::clipbank::ClipBank;
use crate::generator::Documentary;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    M3u,
    Edl,
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ExportFormat::Json),
            "m3u" | "m3u8" => Ok(ExportFormat::M3u),
            "edl" | "csv" => Ok(ExportFormat::Edl),
            other => Err(format!(
                "unknown format {other:?} (expected json, m3u or edl)"
            )),
        }
    }
}

pub fn render(doc: &Documentary, bank: &ClipBank, format: ExportFormat) -> String {
    match format {
        ExportFormat::Json => to_json_manifest(doc),
        ExportFormat::M3u => to_m3u(doc, bank),
        ExportFormat::Edl => to_edl_csv(doc),
    }
}

/// Pretty-printed JSON with a trailing newline. The CLI and the HTTP
/// service both emit exactly these bytes.
pub fn to_json_manifest(doc: &Documentary) -> String {
    let mut out = serde_json::to_string_pretty(doc).expect("documentary serializes");
    out.push('\n');
    out
}

/// Extended M3U: one `#EXTINF:<seconds>,<speaker> - <clip id>` line per clip
/// followed by its media URI.
pub fn to_m3u(doc: &Documentary, bank: &ClipBank) -> String {
    let mut out = String::from("#EXTM3U\n");
    for clip in &doc.clips {
        let speaker = bank
            .interviewee(&clip.interviewee_id)
            .map(|p| p.display_name.as_str())
            .unwrap_or(clip.interviewee_id.as_str());
        let _ = writeln!(out, "#EXTINF:{},{} - {}", clip.duration_s, speaker, clip.id);
        out.push_str(&clip.media_uri);
        out.push('\n');
    }
    out
}

/// CSV edit decision list: `clip_id,interviewee,start_order,duration_s`,
/// with `start_order` counting from 1.
pub fn to_edl_csv(doc: &Documentary) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["clip_id", "interviewee", "start_order", "duration_s"])
        .expect("in-memory write");
    for (pos, clip) in doc.clips.iter().enumerate() {
        w.write_record([
            clip.id.as_str(),
            clip.interviewee_id.as_str(),
            &(pos + 1).to_string(),
            &clip.duration_s.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}
