//! In-memory sessions with TTL eviction and an optional JSON snapshot file.

use std::collections::{BTreeMap, HashMap};
use std::io;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, MutexGuard};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use mex_core::session::Session;
use rand::RngCore;
use serde_json::{json, Value};

use crate::api::new_session;
use crate::error::{ApiError, ApiResult};

pub const DEFAULT_TTL: Duration = Duration::from_secs(2 * 60 * 60);

struct Entry {
    session: Arc<Mutex<Session>>,
    created_at: u64,
    last_used: Instant,
}

/// All live sessions. Requests for one session are serialized by its own lock;
/// different sessions proceed independently.
pub struct Store {
    sessions: Mutex<HashMap<String, Entry>>,
    /// Last known state of each session, as written to the snapshot file.
    saved: Mutex<BTreeMap<String, Value>>,
    ttl: Duration,
    snapshot: Option<PathBuf>,
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|e| e.into_inner())
}

fn now_secs() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// 128 random bits, hex encoded.
pub fn new_id() -> String {
    let mut bytes = [0u8; 16];
    rand::rngs::OsRng.fill_bytes(&mut bytes);
    hex::encode(bytes)
}

fn bad_snapshot(msg: impl std::fmt::Display) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, format!("session snapshot: {msg}"))
}

impl Store {
    /// A store that keeps sessions for `ttl` after their last use. With a snapshot path,
    /// sessions saved there are loaded now and every change is written back.
    pub fn new(ttl: Duration, snapshot: Option<PathBuf>) -> io::Result<Store> {
        let store = Store {
            sessions: Mutex::new(HashMap::new()),
            saved: Mutex::new(BTreeMap::new()),
            ttl,
            snapshot,
        };
        if let Some(path) = &store.snapshot {
            if path.exists() {
                store.load(path)?;
            }
        }
        Ok(store)
    }

    pub fn in_memory() -> Store {
        Store::new(DEFAULT_TTL, None).expect("no snapshot to read")
    }

    fn load(&self, path: &Path) -> io::Result<()> {
        let text = std::fs::read_to_string(path)?;
        let v: Value = serde_json::from_str(&text).map_err(bad_snapshot)?;
        let sessions = v["sessions"]
            .as_object()
            .ok_or_else(|| bad_snapshot("missing `sessions`"))?;
        let mut map = lock(&self.sessions);
        let mut saved = lock(&self.saved);
        for (id, entry) in sessions {
            let session = Session::restore(&entry["session"]).map_err(bad_snapshot)?;
            map.insert(
                id.clone(),
                Entry {
                    session: Arc::new(Mutex::new(session)),
                    created_at: entry["createdAt"].as_u64().unwrap_or_else(now_secs),
                    last_used: Instant::now(),
                },
            );
            saved.insert(id.clone(), entry.clone());
        }
        Ok(())
    }

    /// Write every session to the snapshot file, if there is one.
    pub fn save(&self) -> io::Result<()> {
        let Some(path) = &self.snapshot else {
            return Ok(());
        };
        let body = json!({ "sessions": &*lock(&self.saved) });
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, serde_json::to_string_pretty(&body)? + "\n")?;
        std::fs::rename(tmp, path)
    }

    fn record(&self, id: &str, created_at: u64, session: &Session) {
        if self.snapshot.is_none() {
            return;
        }
        let entry = json!({ "createdAt": created_at, "session": session.snapshot() });
        let changed = lock(&self.saved).insert(id.to_string(), entry.clone()) != Some(entry);
        if changed {
            if let Err(e) = self.save() {
                tracing::warn!("could not write session snapshot: {e}");
            }
        }
    }

    /// Open a new session and return its id.
    pub fn create(&self) -> String {
        let id = new_id();
        let session = new_session();
        let created_at = now_secs();
        self.record(&id, created_at, &session);
        lock(&self.sessions).insert(
            id.clone(),
            Entry {
                session: Arc::new(Mutex::new(session)),
                created_at,
                last_used: Instant::now(),
            },
        );
        id
    }

    /// Run `f` on session `id` while holding that session's lock.
    pub fn with_session<T>(
        &self,
        id: &str,
        f: impl FnOnce(&mut Session) -> ApiResult<T>,
    ) -> ApiResult<T> {
        let (session, created_at) = {
            let mut map = lock(&self.sessions);
            let entry = map
                .get_mut(id)
                .filter(|e| e.last_used.elapsed() <= self.ttl)
                .ok_or_else(|| ApiError::not_found("session", id))?;
            entry.last_used = Instant::now();
            (Arc::clone(&entry.session), entry.created_at)
        };
        let mut guard = lock(&session);
        let out = f(&mut guard);
        self.record(id, created_at, &guard);
        out
    }

    /// Drop sessions idle for longer than the TTL; returns how many went.
    pub fn evict_expired(&self) -> usize {
        let mut map = lock(&self.sessions);
        let expired: Vec<String> = map
            .iter()
            .filter(|(_, e)| e.last_used.elapsed() > self.ttl)
            .map(|(k, _)| k.clone())
            .collect();
        for id in &expired {
            map.remove(id);
        }
        drop(map);
        if !expired.is_empty() && self.snapshot.is_some() {
            let mut saved = lock(&self.saved);
            for id in &expired {
                saved.remove(id);
            }
            drop(saved);
            if let Err(e) = self.save() {
                tracing::warn!("could not write session snapshot: {e}");
            }
        }
        expired.len()
    }

    pub fn len(&self) -> usize {
        lock(&self.sessions).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
