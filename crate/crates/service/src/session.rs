//! In-memory session store.
//!
//! Each session publishes an immutable [`Snapshot`]. Readers clone the
//! current `Arc` and never block writers for longer than the swap; writers
//! are serialized per session so edits apply in arrival order.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant, SystemTime};

use subscope_core::decisions::{set_status, DecisionError, EditEntry, SubscribedStatus};
use subscope_core::ingest::Package;
use subscope_core::metrics::{Analysis, MetricsError, UsageSource};

#[derive(Debug)]
pub struct Snapshot {
    pub analysis: Analysis,
    pub edits: Vec<EditEntry>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum EditError {
    #[error(transparent)]
    Decision(#[from] DecisionError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Debug)]
pub struct Session {
    pub id: String,
    pub created_at: SystemTime,
    last_access: Mutex<Instant>,
    snapshot: RwLock<Arc<Snapshot>>,
    writer: Mutex<()>,
}

impl Session {
    fn new(id: String, analysis: Analysis, now: Instant) -> Self {
        Session {
            id,
            created_at: SystemTime::now(),
            last_access: Mutex::new(now),
            snapshot: RwLock::new(Arc::new(Snapshot {
                analysis,
                edits: Vec::new(),
            })),
            writer: Mutex::new(()),
        }
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.snapshot.read().unwrap_or_else(|e| e.into_inner()).clone()
    }

    pub fn usage_source(&self) -> UsageSource {
        self.snapshot().analysis.source()
    }

    pub fn last_access(&self) -> Instant {
        *self.last_access.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn touch(&self, now: Instant) {
        *self.last_access.lock().unwrap_or_else(|e| e.into_inner()) = now;
    }

    /// Applies one status edit and publishes a freshly computed snapshot.
    pub fn set_status(&self, key: &str, status: SubscribedStatus) -> Result<(Arc<Snapshot>, EditEntry), EditError> {
        let _guard = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        let current = self.snapshot();
        let (package, entry) = set_status(current.analysis.package(), key, status)?;
        let analysis = Analysis::new(package, current.analysis.source())?;
        let mut edits = current.edits.clone();
        edits.push(entry.clone());
        let next = Arc::new(Snapshot { analysis, edits });
        *self.snapshot.write().unwrap_or_else(|e| e.into_inner()) = next.clone();
        Ok((next, entry))
    }
}

#[derive(Debug)]
pub struct SessionStore {
    ttl: Duration,
    sessions: RwLock<HashMap<String, Arc<Session>>>,
}

fn new_id() -> String {
    format!("{:032x}", rand::random::<u128>())
}

impl SessionStore {
    pub fn new(ttl: Duration) -> Self {
        SessionStore {
            ttl,
            sessions: RwLock::new(HashMap::new()),
        }
    }

    pub fn ttl(&self) -> Duration {
        self.ttl
    }

    pub fn create(&self, package: Package, source: UsageSource) -> Result<Arc<Session>, MetricsError> {
        self.create_at(package, source, Instant::now())
    }

    pub fn create_at(&self, package: Package, source: UsageSource, now: Instant) -> Result<Arc<Session>, MetricsError> {
        let analysis = Analysis::new(package, source)?;
        let mut sessions = self.sessions.write().unwrap_or_else(|e| e.into_inner());
        let mut id = new_id();
        while sessions.contains_key(&id) {
            id = new_id();
        }
        let session = Arc::new(Session::new(id.clone(), analysis, now));
        sessions.insert(id, session.clone());
        Ok(session)
    }

    /// Looks up a live session and marks it as accessed.
    pub fn get(&self, id: &str) -> Option<Arc<Session>> {
        let now = Instant::now();
        let session = self.sessions.read().unwrap_or_else(|e| e.into_inner()).get(id).cloned()?;
        if now.saturating_duration_since(session.last_access()) > self.ttl {
            return None;
        }
        session.touch(now);
        Some(session)
    }

    pub fn len(&self) -> usize {
        self.sessions.read().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Evicts sessions idle for longer than the TTL; returns how many.
    pub fn reap(&self, now: Instant) -> usize {
        let mut sessions = self.sessions.write().unwrap_or_else(|e| e.into_inner());
        let before = sessions.len();
        sessions.retain(|_, s| now.saturating_duration_since(s.last_access()) <= self.ttl);
        before - sessions.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use subscope_core::ingest::load_sample;

    const HOUR: Duration = Duration::from_secs(3600);

    #[test]
    fn reaping() {
        let store = SessionStore::new(2 * HOUR);
        let t0 = Instant::now();
        assert_eq!(store.reap(t0), 0);
        store.create_at(load_sample(), UsageSource::Exported, t0).unwrap();
        assert_eq!(store.reap(t0 + Duration::from_secs(1)), 0);
        assert_eq!(store.reap(t0 + 3 * HOUR), 1);
        assert!(store.is_empty());
    }

    #[test]
    fn ids_are_long_hex() {
        let store = SessionStore::new(HOUR);
        let a = store.create(load_sample(), UsageSource::Exported).unwrap();
        let b = store.create(load_sample(), UsageSource::Exported).unwrap();
        assert_ne!(a.id, b.id);
        assert_eq!(a.id.len(), 32);
        assert!(a.id.chars().all(|c| c.is_ascii_hexdigit()));
        assert!(store.get(&a.id).is_some());
        assert!(store.get("nope").is_none());
    }

    #[test]
    fn edits_publish_new_snapshots() {
        let store = SessionStore::new(HOUR);
        let s = store.create(load_sample(), UsageSource::Exported).unwrap();
        let before = s.snapshot();
        let key = before.analysis.package().records()[0].key.clone();
        let (after, entry) = s.set_status(&key, SubscribedStatus::Maybe).unwrap();
        assert_eq!(entry.new, SubscribedStatus::Maybe);
        assert_eq!(after.edits.len(), 1);
        assert!(before.edits.is_empty());
        assert_eq!(s.snapshot().analysis.package().get(&key).unwrap().subscribed, SubscribedStatus::Maybe);
        assert!(matches!(
            s.set_status("missing", SubscribedStatus::True),
            Err(EditError::Decision(DecisionError::UnknownKey(_)))
        ));
    }

    #[test]
    fn concurrent_edits_all_land() {
        let store = SessionStore::new(HOUR);
        let s = store.create(load_sample(), UsageSource::Exported).unwrap();
        let keys: Vec<String> = s.snapshot().analysis.package().records()[..16].iter().map(|r| r.key.clone()).collect();
        std::thread::scope(|scope| {
            for key in &keys {
                let s = &s;
                scope.spawn(move || s.set_status(key, SubscribedStatus::Maybe).unwrap());
            }
        });
        let snap = s.snapshot();
        assert_eq!(snap.edits.len(), 16);
        for key in &keys {
            assert_eq!(snap.analysis.package().get(key).unwrap().subscribed, SubscribedStatus::Maybe);
        }
    }
}
