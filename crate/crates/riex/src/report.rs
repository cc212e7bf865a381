//! Conformance reports: a list of named checks against the source
//! displays, each carrying an anchor description, a status and enough
//! detail to reproduce a mismatch.

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// computed expression equals the displayed one
    Match,
    /// genuine disagreement; treated as failure
    Mismatch,
    /// disagreement traced to transcription damage in the source display;
    /// the pipeline derivation is shown and treated as authoritative
    Noted,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct Entry {
    pub id: String,
    pub anchor: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConformanceReport {
    pub schema: u32,
    pub fixture: String,
    pub entries: Vec<Entry>,
}

impl ConformanceReport {
    pub fn new(fixture: impl Into<String>) -> Self {
        ConformanceReport {
            schema: SCHEMA_VERSION,
            fixture: fixture.into(),
            entries: Vec::new(),
        }
    }

    pub fn push(
        &mut self,
        id: impl Into<String>,
        anchor: impl Into<String>,
        status: Status,
        detail: impl Into<String>,
    ) {
        self.entries.push(Entry {
            id: id.into(),
            anchor: anchor.into(),
            status,
            detail: detail.into(),
        });
    }

    pub fn check(
        &mut self,
        id: impl Into<String>,
        anchor: impl Into<String>,
        ok: bool,
        detail: impl Into<String>,
    ) {
        let status = if ok { Status::Match } else { Status::Mismatch };
        self.push(id, anchor, status, detail);
    }

    /// True when no entry is a genuine mismatch.
    pub fn is_success(&self) -> bool {
        self.entries.iter().all(|e| e.status != Status::Mismatch)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serialization")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("conformance: {}\n", self.fixture);
        for e in &self.entries {
            let tag = match e.status {
                Status::Match => "match",
                Status::Mismatch => "MISMATCH",
                Status::Noted => "noted",
                Status::Skipped => "skipped",
            };
            out.push_str(&format!("  [{tag}] {} ({})", e.id, e.anchor));
            if !e.detail.is_empty() {
                out.push_str(&format!(": {}", e.detail));
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn success_tracks_mismatches_only() {
        let mut r = ConformanceReport::new("circle");
        r.check("a", "anchor", true, "");
        r.push("b", "anchor", Status::Noted, "transcription");
        r.push("c", "anchor", Status::Skipped, "");
        assert!(r.is_success());
        r.check("d", "anchor", false, "boom");
        assert!(!r.is_success());
        let text = r.to_text();
        assert!(text.contains("MISMATCH"));
        assert!(text.contains("noted"));
        let json = r.to_json();
        assert_eq!(json["schema"], 1);
        assert_eq!(json["entries"][1]["status"], "noted");
    }
}
