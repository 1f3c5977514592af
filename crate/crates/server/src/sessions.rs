use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use chrono::Utc;
use docgen_core::{AnalyticsError, ClipBank, Documentary, SessionEntry, SessionLog, append_entry};

/// On-disk session logs, one `<id>.ndjson` file per session. Appends to the
/// same session are serialized; different sessions proceed independently.
pub struct SessionStore {
    dir: PathBuf,
    locks: Mutex<HashMap<String, Arc<tokio::sync::Mutex<()>>>>,
}

pub fn valid_session_id(id: &str) -> bool {
    (1..=64).contains(&id.len())
        && id
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_')
}

pub fn new_session_id() -> String {
    format!("{:032x}", rand::random::<u128>())
}

impl SessionStore {
    pub fn open(dir: &Path) -> std::io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(SessionStore {
            dir: dir.to_path_buf(),
            locks: Mutex::new(HashMap::new()),
        })
    }

    pub fn path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.ndjson"))
    }

    fn lock_for(&self, id: &str) -> Arc<tokio::sync::Mutex<()>> {
        let mut locks = self.locks.lock().expect("session lock table poisoned");
        locks.entry(id.to_string()).or_default().clone()
    }

    /// Current log of `id`, or `None` if the session has never been written.
    pub async fn read(&self, id: &str) -> Result<Option<SessionLog>, AnalyticsError> {
        let lock = self.lock_for(id);
        let _guard = lock.lock().await;
        self.read_unlocked(id)
    }

    fn read_unlocked(&self, id: &str) -> Result<Option<SessionLog>, AnalyticsError> {
        match std::fs::read_to_string(self.path(id)) {
            Ok(text) => Ok(Some(SessionLog::from_ndjson(id, &text)?)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e.into()),
        }
    }

    pub async fn record(
        &self,
        id: &str,
        bank: &ClipBank,
        doc: &Documentary,
    ) -> Result<SessionEntry, AnalyticsError> {
        let lock = self.lock_for(id);
        let _guard = lock.lock().await;
        let mut log = self
            .read_unlocked(id)?
            .unwrap_or_else(|| SessionLog::new(id));
        let entry = log.record_generation(bank, doc, Utc::now())?.clone();
        append_entry(&self.path(id), &entry)?;
        Ok(entry)
    }
}
