//! Session state and its file-backed store.

use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use pcdecomp_core::{PcError, PcMatrix};
use serde::{Deserialize, Serialize};

/// Where a history entry came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EditSource {
    Judgment,
    Approximation,
}

/// One recorded change of a single cell. Indices are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edit {
    pub revision: u64,
    pub timestamp_ms: u64,
    pub i: usize,
    pub j: usize,
    pub old: f64,
    pub new: f64,
    pub source: EditSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    pub labels: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
    pub revision: u64,
    pub history: Vec<Edit>,
}

/// Writes `value` at 1-based (i, j) and its reciprocal at (j, i), then
/// canonicalizes so the lower triangle is the reciprocal of the upper one.
pub fn set_judgment(m: &PcMatrix, i: usize, j: usize, value: f64) -> Result<PcMatrix, PcError> {
    let n = m.n();
    if i == 0 || j == 0 || i > n || j > n || i == j {
        return Err(PcError::InvalidArgument(format!(
            "cell ({i}, {j}) is not an off-diagonal cell of a {n}x{n} matrix"
        )));
    }
    let mut rows = m.to_rows();
    rows[i - 1][j - 1] = value;
    rows[j - 1][i - 1] = 1.0 / value;
    let recip_tol = m.recip_tol().max(1e-12);
    PcMatrix::new(&rows, recip_tol)
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

impl Session {
    pub fn new(labels: Vec<String>) -> Result<Self, PcError> {
        let n = labels.len();
        if n < 2 {
            return Err(PcError::DimensionTooSmall { n, min: 2 });
        }
        Ok(Self {
            id: uuid::Uuid::new_v4().to_string(),
            labels,
            matrix: PcMatrix::identity(n).to_rows(),
            revision: 0,
            history: Vec::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn pc_matrix(&self) -> Result<PcMatrix, PcError> {
        PcMatrix::new(&self.matrix, 1e-9)
    }

    /// Applies one judgment and records it. Nothing changes on error.
    pub fn apply_judgment(&mut self, i: usize, j: usize, value: f64) -> Result<(), PcError> {
        let current = self.pc_matrix()?;
        let next = set_judgment(&current, i, j, value)?;
        let revision = self.revision + 1;
        self.history.push(Edit {
            revision,
            timestamp_ms: now_ms(),
            i,
            j,
            old: current.get(i - 1, j - 1),
            new: value,
            source: EditSource::Judgment,
        });
        self.matrix = next.to_rows();
        self.revision = revision;
        Ok(())
    }

    /// Replaces the matrix with `next`, recording every changed upper cell.
    pub fn apply_approximation(&mut self, next: &PcMatrix) -> Result<(), PcError> {
        let current = self.pc_matrix()?;
        if next.n() != current.n() {
            return Err(PcError::DimensionMismatch { left: current.n(), right: next.n() });
        }
        let revision = self.revision + 1;
        let timestamp_ms = now_ms();
        let n = current.n();
        for i in 0..n {
            for j in (i + 1)..n {
                let (old, new) = (current.get(i, j), next.get(i, j));
                if old.to_bits() != new.to_bits() {
                    self.history.push(Edit {
                        revision,
                        timestamp_ms,
                        i: i + 1,
                        j: j + 1,
                        old,
                        new,
                        source: EditSource::Approximation,
                    });
                }
            }
        }
        self.matrix = PcMatrix::from_upper(n, &next.upper(), 1e-9)?.to_rows();
        self.revision = revision;
        Ok(())
    }

    /// Rebuilds the matrix from the identity by replaying the history.
    pub fn replay(&self) -> Result<PcMatrix, PcError> {
        let mut m = PcMatrix::identity(self.n());
        for e in &self.history {
            m = set_judgment(&m, e.i, e.j, e.new)?;
        }
        Ok(m)
    }

    /// Number of approximation steps applied so far.
    pub fn approximation_count(&self) -> usize {
        let mut revisions: Vec<u64> = self
            .history
            .iter()
            .filter(|e| e.source == EditSource::Approximation)
            .map(|e| e.revision)
            .collect();
        revisions.dedup();
        revisions.len()
    }

    /// Upper-triangle cells (1-based) that no judgment has touched yet.
    pub fn unjudged(&self) -> Vec<[usize; 2]> {
        let n = self.n();
        let mut seen = vec![false; n * n];
        for e in self.history.iter().filter(|e| e.source == EditSource::Judgment) {
            let (a, b) = (e.i.min(e.j) - 1, e.i.max(e.j) - 1);
            seen[a * n + b] = true;
        }
        let mut cells = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if !seen[i * n + j] {
                    cells.push([i + 1, j + 1]);
                }
            }
        }
        cells
    }
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("unknown session {0}")]
    NotFound(String),
    #[error("storage failure: {0}")]
    Io(#[from] io::Error),
    #[error("corrupt session file: {0}")]
    Corrupt(#[from] serde_json::Error),
}

/// One JSON file per session under a directory, with an in-memory cache and
/// a lock per session.
#[derive(Debug)]
pub struct SessionStore {
    dir: PathBuf,
    cache: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
}

fn valid_id(id: &str) -> bool {
    uuid::Uuid::parse_str(id).is_ok()
}

impl SessionStore {
    pub fn open(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir, cache: Mutex::new(HashMap::new()) })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.json"))
    }

    fn persist(&self, s: &Session) -> Result<(), StoreError> {
        let tmp = self.dir.join(format!("{}.json.tmp", s.id));
        fs::write(&tmp, serde_json::to_vec_pretty(s)?)?;
        fs::rename(&tmp, self.path(&s.id))?;
        Ok(())
    }

    pub fn insert(&self, s: Session) -> Result<Session, StoreError> {
        self.persist(&s)?;
        let copy = s.clone();
        self.cache.lock().unwrap().insert(s.id.clone(), Arc::new(Mutex::new(s)));
        Ok(copy)
    }

    fn handle(&self, id: &str) -> Result<Arc<Mutex<Session>>, StoreError> {
        if !valid_id(id) {
            return Err(StoreError::NotFound(id.to_string()));
        }
        let mut cache = self.cache.lock().unwrap();
        if let Some(h) = cache.get(id) {
            return Ok(h.clone());
        }
        let bytes = match fs::read(self.path(id)) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                return Err(StoreError::NotFound(id.to_string()))
            }
            Err(e) => return Err(e.into()),
        };
        let s: Session = serde_json::from_slice(&bytes)?;
        let h = Arc::new(Mutex::new(s));
        cache.insert(id.to_string(), h.clone());
        Ok(h)
    }

    pub fn get(&self, id: &str) -> Result<Session, StoreError> {
        Ok(self.handle(id)?.lock().unwrap().clone())
    }

    /// Runs `f` on a copy of the session under its lock; the copy is
    /// persisted and kept only when `f` succeeds.
    pub fn update<T, E>(&self, id: &str, f: impl FnOnce(&mut Session) -> Result<T, E>) -> Result<(T, Session), E>
    where
        E: From<StoreError>,
    {
        let h = self.handle(id)?;
        let mut guard = h.lock().unwrap();
        let mut draft = guard.clone();
        let out = f(&mut draft)?;
        self.persist(&draft)?;
        *guard = draft.clone();
        Ok((out, draft))
    }
}
