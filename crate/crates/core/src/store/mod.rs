//! File-backed store of networks, assessments and plans.
//!
//! Layout under the store root:
//!
//! ```text
//! manifest                      canonical JSON, {"format":"imt-store","schema":1}
//! networks/<id>/journal         length-prefixed records appended on every write
//! networks/<id>/snapshot        compacted records, replaced atomically
//! ```
//!
//! Each record is the canonical JSON of `{"entry": ..., "seq": n}`. Opening
//! a network replays the snapshot, then every journal record with a larger
//! sequence number. Writes to one network are serialized by that network's
//! lock; different networks are written independently.

mod journal;
mod series;

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock, RwLockReadGuard, RwLockWriteGuard};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use series::{
    delta_report, AssessmentSeries, DeltaReport, PeriodDelta, SeriesEntry, SeriesError,
    SeriesReport,
};

use crate::document::{to_canonical_json, DocumentError, NetworkSummary, SCHEMA_VERSION};
use crate::model::{
    Assessment, CollaborationNetwork, Granularity, InputsSnapshot, NetworkId, Period,
    ValidationReport,
};
use crate::planner::Plan;
use crate::scoring::ScoreBundle;
use journal::{read_records, write_records_atomically, Journal};

const MANIFEST_FORMAT: &str = "imt-store";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{resource} {id} not found")]
    NotFound { resource: &'static str, id: String },
    #[error("{resource} {id} already exists")]
    Conflict { resource: &'static str, id: String },
    #[error("invalid network: {0}")]
    InvalidNetwork(ValidationReport),
    #[error("period {period} does not match the {expected:?} granularity of network {network_id}")]
    Granularity {
        network_id: NetworkId,
        period: Period,
        expected: Granularity,
    },
    #[error("assessment for {0} is inconsistent: ratlop does not match its components")]
    Inconsistent(Period),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: corrupt record at index {index}: {message}")]
    Corrupt {
        path: PathBuf,
        index: usize,
        message: String,
    },
    #[error("{path}: unsupported store schema {found}")]
    Schema { path: PathBuf, found: String },
    #[error(transparent)]
    Document(#[from] DocumentError),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_owned(),
        source,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StoreOptions {
    /// Journal records accumulated before a network is compacted
    /// automatically. Zero disables automatic compaction.
    pub compact_after: usize,
    /// Flush every write to stable storage before returning.
    pub sync: bool,
}

impl Default for StoreOptions {
    fn default() -> Self {
        Self {
            compact_after: 256,
            sync: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
enum Entry {
    PutNetwork { network: CollaborationNetwork },
    Assessment { assessment: Assessment },
    Plan { plan: Box<Plan> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Record {
    seq: u64,
    entry: Entry,
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    format: String,
    schema: u64,
}

struct Shard {
    dir: PathBuf,
    journal: Journal,
    sync: bool,
    last_seq: u64,
    journal_len: usize,
    revisions: Vec<(u64, CollaborationNetwork)>,
    assessments: BTreeMap<Period, Vec<(u64, Assessment)>>,
    plans: Vec<(u64, Plan)>,
}

impl Shard {
    fn open(dir: PathBuf, sync: bool) -> Result<Self, StoreError> {
        let snapshot_path = dir.join("snapshot");
        let snapshot = read_records(&snapshot_path).map_err(io_err(&snapshot_path))?;
        let journal_path = dir.join("journal");
        let (journal, journal_records) =
            Journal::open(&journal_path, sync).map_err(io_err(&journal_path))?;
        let mut shard = Self {
            dir,
            journal,
            sync,
            last_seq: 0,
            journal_len: 0,
            revisions: Vec::new(),
            assessments: BTreeMap::new(),
            plans: Vec::new(),
        };
        for (index, bytes) in snapshot.iter().enumerate() {
            let record = decode(&snapshot_path, index, bytes)?;
            shard.apply(record);
        }
        let compacted = shard.last_seq;
        for (index, bytes) in journal_records.iter().enumerate() {
            let record = decode(&journal_path, index, bytes)?;
            if record.seq > compacted {
                shard.apply(record);
                shard.journal_len += 1;
            }
        }
        if shard.revisions.is_empty() {
            return Err(StoreError::Corrupt {
                path: shard.dir.clone(),
                index: 0,
                message: "network directory holds no network record".into(),
            });
        }
        Ok(shard)
    }

    fn apply(&mut self, record: Record) {
        self.last_seq = self.last_seq.max(record.seq);
        match record.entry {
            Entry::PutNetwork { network } => self.revisions.push((record.seq, network)),
            Entry::Assessment { assessment } => self
                .assessments
                .entry(assessment.period)
                .or_default()
                .push((record.seq, assessment)),
            Entry::Plan { plan } => self.plans.push((record.seq, *plan)),
        }
    }

    fn write(&mut self, entry: Entry) -> Result<(), StoreError> {
        let record = Record {
            seq: self.last_seq + 1,
            entry,
        };
        let bytes = to_canonical_json(&record)?;
        self.journal
            .append(bytes.as_bytes())
            .map_err(io_err(self.journal.path()))?;
        self.journal_len += 1;
        self.apply(record);
        Ok(())
    }

    fn network(&self) -> &CollaborationNetwork {
        &self.revisions.last().expect("shard holds a network").1
    }

    fn assessment_count(&self) -> usize {
        self.assessments.len()
    }

    fn compact(&mut self) -> Result<(), StoreError> {
        let mut records: Vec<Record> = Vec::new();
        records.extend(self.revisions.iter().map(|(seq, n)| Record {
            seq: *seq,
            entry: Entry::PutNetwork { network: n.clone() },
        }));
        records.extend(self.assessments.values().flatten().map(|(seq, a)| Record {
            seq: *seq,
            entry: Entry::Assessment { assessment: a.clone() },
        }));
        records.extend(self.plans.iter().map(|(seq, p)| Record {
            seq: *seq,
            entry: Entry::Plan {
                plan: Box::new(p.clone()),
            },
        }));
        records.sort_by_key(|r| r.seq);
        let encoded = records
            .iter()
            .map(|r| to_canonical_json(r).map(String::into_bytes))
            .collect::<Result<Vec<_>, _>>()?;
        let path = self.dir.join("snapshot");
        write_records_atomically(&path, &encoded, self.sync).map_err(io_err(&path))?;
        self.journal.clear().map_err(io_err(self.journal.path()))?;
        self.journal_len = 0;
        Ok(())
    }
}

fn decode(path: &Path, index: usize, bytes: &[u8]) -> Result<Record, StoreError> {
    serde_json::from_slice(bytes).map_err(|e| StoreError::Corrupt {
        path: path.to_owned(),
        index,
        message: e.to_string(),
    })
}

pub struct Store {
    root: PathBuf,
    options: StoreOptions,
    shards: RwLock<BTreeMap<NetworkId, Arc<RwLock<Shard>>>>,
}

impl std::fmt::Debug for Store {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Store")
            .field("root", &self.root)
            .field("options", &self.options)
            .finish_non_exhaustive()
    }
}

fn read<T>(lock: &RwLock<T>) -> RwLockReadGuard<'_, T> {
    lock.read().unwrap_or_else(|e| e.into_inner())
}

fn write<T>(lock: &RwLock<T>) -> RwLockWriteGuard<'_, T> {
    lock.write().unwrap_or_else(|e| e.into_inner())
}

impl Store {
    pub fn open(root: impl AsRef<Path>) -> Result<Self, StoreError> {
        Self::open_with(root, StoreOptions::default())
    }

    pub fn open_with(root: impl AsRef<Path>, options: StoreOptions) -> Result<Self, StoreError> {
        let root = root.as_ref().to_owned();
        let networks = root.join("networks");
        fs::create_dir_all(&networks).map_err(io_err(&networks))?;
        let manifest_path = root.join("manifest");
        match fs::read_to_string(&manifest_path) {
            Ok(text) => {
                let manifest: Option<Manifest> = serde_json::from_str(&text).ok();
                match manifest {
                    Some(m) if m.format == MANIFEST_FORMAT && m.schema == SCHEMA_VERSION => {}
                    _ => {
                        return Err(StoreError::Schema {
                            path: manifest_path,
                            found: text.trim().to_owned(),
                        })
                    }
                }
            }
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                let manifest = Manifest {
                    format: MANIFEST_FORMAT.into(),
                    schema: SCHEMA_VERSION,
                };
                let text = to_canonical_json(&manifest)? + "\n";
                fs::write(&manifest_path, text).map_err(io_err(&manifest_path))?;
            }
            Err(e) => return Err(io_err(&manifest_path)(e)),
        }

        let mut shards = BTreeMap::new();
        for dirent in fs::read_dir(&networks).map_err(io_err(&networks))? {
            let dirent = dirent.map_err(io_err(&networks))?;
            if !dirent.file_type().map_err(io_err(&dirent.path()))?.is_dir() {
                continue;
            }
            let Some(name) = dirent.file_name().to_str().map(NetworkId::new) else {
                continue;
            };
            if !name.is_path_safe() {
                continue;
            }
            let shard = Shard::open(dirent.path(), options.sync)?;
            shards.insert(name, Arc::new(RwLock::new(shard)));
        }
        Ok(Self {
            root,
            options,
            shards: RwLock::new(shards),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn shard(&self, id: &NetworkId) -> Result<Arc<RwLock<Shard>>, StoreError> {
        read(&self.shards)
            .get(id)
            .cloned()
            .ok_or_else(|| StoreError::NotFound {
                resource: "network",
                id: id.to_string(),
            })
    }

    fn maybe_compact(&self, shard: &mut Shard) -> Result<(), StoreError> {
        if self.options.compact_after > 0 && shard.journal_len >= self.options.compact_after {
            shard.compact()?;
        }
        Ok(())
    }

    /// Stores a new network. Returns its revision number, 1.
    pub fn create_network(&self, network: CollaborationNetwork) -> Result<usize, StoreError> {
        let report = network.validate();
        if !report.is_valid() {
            return Err(StoreError::InvalidNetwork(report));
        }
        let mut shards = write(&self.shards);
        if shards.contains_key(&network.id) {
            return Err(StoreError::Conflict {
                resource: "network",
                id: network.id.to_string(),
            });
        }
        let dir = self.root.join("networks").join(network.id.as_str());
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        // Leftovers of an earlier failed create would be replayed otherwise.
        for stale in ["journal", "snapshot"] {
            let p = dir.join(stale);
            if p.exists() {
                fs::remove_file(&p).map_err(io_err(&p))?;
            }
        }
        let journal_path = dir.join("journal");
        let (journal, _) =
            Journal::open(&journal_path, self.options.sync).map_err(io_err(&journal_path))?;
        let mut shard = Shard {
            dir,
            journal,
            sync: self.options.sync,
            last_seq: 0,
            journal_len: 0,
            revisions: Vec::new(),
            assessments: BTreeMap::new(),
            plans: Vec::new(),
        };
        let id = network.id.clone();
        shard.write(Entry::PutNetwork { network })?;
        shards.insert(id, Arc::new(RwLock::new(shard)));
        Ok(1)
    }

    /// Appends a new revision of an existing network. Returns the revision
    /// number. The granularity cannot change once assessments exist.
    pub fn update_network(&self, network: CollaborationNetwork) -> Result<usize, StoreError> {
        let report = network.validate();
        if !report.is_valid() {
            return Err(StoreError::InvalidNetwork(report));
        }
        let shard = self.shard(&network.id)?;
        let mut shard = write(&shard);
        if network.granularity != shard.network().granularity {
            if let Some(period) = shard.assessments.keys().next() {
                return Err(StoreError::Granularity {
                    network_id: network.id.clone(),
                    period: *period,
                    expected: network.granularity,
                });
            }
        }
        shard.write(Entry::PutNetwork { network })?;
        let revision = shard.revisions.len();
        self.maybe_compact(&mut shard)?;
        Ok(revision)
    }

    /// Creates or updates. Returns the revision and whether it was created.
    pub fn put_network(&self, network: CollaborationNetwork) -> Result<(usize, bool), StoreError> {
        match self.create_network(network.clone()) {
            Err(StoreError::Conflict { .. }) => Ok((self.update_network(network)?, false)),
            other => other.map(|r| (r, true)),
        }
    }

    pub fn get_network(&self, id: &NetworkId) -> Result<CollaborationNetwork, StoreError> {
        let shard = self.shard(id)?;
        let shard = read(&shard);
        Ok(shard.network().clone())
    }

    /// Every stored revision, oldest first.
    pub fn network_revisions(&self, id: &NetworkId) -> Result<Vec<CollaborationNetwork>, StoreError> {
        let shard = self.shard(id)?;
        let shard = read(&shard);
        Ok(shard.revisions.iter().map(|(_, n)| n.clone()).collect())
    }

    pub fn contains_network(&self, id: &NetworkId) -> bool {
        read(&self.shards).contains_key(id)
    }

    pub fn list_networks(&self) -> Vec<NetworkSummary> {
        let shards: Vec<_> = read(&self.shards).values().cloned().collect();
        shards
            .iter()
            .map(|s| {
                let s = read(s);
                let n = s.network();
                NetworkSummary {
                    id: n.id.clone(),
                    name: n.name.clone(),
                    revision: s.revisions.len(),
                    assessments: s.assessment_count(),
                }
            })
            .collect()
    }

    /// Stores an assessment of `period`. Without `overwrite`, an existing
    /// assessment of the same period is a conflict; with it, a new version
    /// is appended and the earlier ones stay readable.
    pub fn record_assessment(
        &self,
        network_id: &NetworkId,
        period: Period,
        scores: ScoreBundle,
        inputs: InputsSnapshot,
        overwrite: bool,
    ) -> Result<Assessment, StoreError> {
        let shard = self.shard(network_id)?;
        let mut shard = write(&shard);
        let expected = shard.network().granularity;
        if period.granularity() != expected {
            return Err(StoreError::Granularity {
                network_id: network_id.clone(),
                period,
                expected,
            });
        }
        let previous = shard
            .assessments
            .get(&period)
            .and_then(|v| v.last())
            .map(|(_, a)| a.version);
        if previous.is_some() && !overwrite {
            return Err(StoreError::Conflict {
                resource: "assessment",
                id: format!("{network_id}/{period}"),
            });
        }
        let assessment = Assessment {
            network_id: network_id.clone(),
            period,
            version: previous.map_or(1, |v| v + 1),
            scores,
            inputs,
        };
        if !assessment.is_consistent() {
            return Err(StoreError::Inconsistent(period));
        }
        shard.write(Entry::Assessment {
            assessment: assessment.clone(),
        })?;
        self.maybe_compact(&mut shard)?;
        Ok(assessment)
    }

    /// Latest version of the assessment of `period`.
    pub fn get_assessment(&self, network_id: &NetworkId, period: &Period) -> Result<Assessment, StoreError> {
        self.assessment_history(network_id, period)?
            .pop()
            .ok_or_else(|| StoreError::NotFound {
                resource: "assessment",
                id: format!("{network_id}/{period}"),
            })
    }

    /// All versions of the assessment of `period`, oldest first.
    pub fn assessment_history(
        &self,
        network_id: &NetworkId,
        period: &Period,
    ) -> Result<Vec<Assessment>, StoreError> {
        let shard = self.shard(network_id)?;
        let shard = read(&shard);
        Ok(shard
            .assessments
            .get(period)
            .map(|v| v.iter().map(|(_, a)| a.clone()).collect())
            .unwrap_or_default())
    }

    /// Latest assessment of every period within the inclusive bounds, in
    /// chronological order.
    pub fn get_series(
        &self,
        network_id: &NetworkId,
        from: Option<Period>,
        to: Option<Period>,
    ) -> Result<AssessmentSeries, StoreError> {
        let shard = self.shard(network_id)?;
        let shard = read(&shard);
        let entries = shard
            .assessments
            .iter()
            .filter(|(p, _)| from.map_or(true, |f| **p >= f) && to.map_or(true, |t| **p <= t))
            .filter_map(|(p, versions)| {
                versions.last().map(|(_, a)| SeriesEntry {
                    period: *p,
                    version: a.version,
                    scores: a.scores.clone(),
                })
            })
            .collect();
        Ok(AssessmentSeries {
            network_id: network_id.clone(),
            entries,
        })
    }

    /// Stores a plan. Returns its position in the network's plan list.
    pub fn record_plan(&self, plan: Plan) -> Result<usize, StoreError> {
        let shard = self.shard(&plan.network_id)?;
        let mut shard = write(&shard);
        shard.write(Entry::Plan {
            plan: Box::new(plan),
        })?;
        let n = shard.plans.len();
        self.maybe_compact(&mut shard)?;
        Ok(n)
    }

    pub fn plans(&self, network_id: &NetworkId) -> Result<Vec<Plan>, StoreError> {
        let shard = self.shard(network_id)?;
        let shard = read(&shard);
        Ok(shard.plans.iter().map(|(_, p)| p.clone()).collect())
    }

    /// Folds the network's journal into its snapshot.
    pub fn compact(&self, network_id: &NetworkId) -> Result<(), StoreError> {
        let shard = self.shard(network_id)?;
        let mut shard = write(&shard);
        shard.compact()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        CompatibilityMatrix, IndicatorSet, InteropLink, MaturityLevel, MaturityRating,
        Organization, ProcessKind, ProcessNode,
    };
    use crate::scoring::{assess, ScoringConfig};

    fn network(id: &str) -> CollaborationNetwork {
        let org = |id: &str, level: u8| Organization {
            id: id.into(),
            name: id.to_uppercase(),
            external: false,
            maturity: Some(MaturityRating {
                model_name: "LISI".into(),
                level: MaturityLevel::new(level).unwrap(),
            }),
        };
        let node = |id: &str, org: &str| ProcessNode {
            id: id.into(),
            name: id.into(),
            organization: org.into(),
            kind: ProcessKind::Elementary,
            children: vec![],
            exposed_services: vec![],
        };
        CollaborationNetwork {
            id: id.into(),
            name: "test".into(),
            granularity: Granularity::Quarterly,
            approach: None,
            organizations: vec![org("a", 3), org("b", 4)],
            processes: vec![node("p", "a"), node("q", "b")],
            links: vec![InteropLink {
                id: "l".into(),
                from_node: "p".into(),
                to_node: "q".into(),
                mechanism: "ETL".into(),
                compatibility: CompatibilityMatrix::from_bits(0b111),
            }],
        }
    }

    fn scored(net: &CollaborationNetwork, ds: f64) -> (ScoreBundle, InputsSnapshot) {
        let ind = IndicatorSet::new(ds, 0.8, 0.7).unwrap();
        let scores = assess(net, &ind, &ScoringConfig::default()).unwrap();
        (scores, InputsSnapshot::capture(net, ind))
    }

    fn fast() -> StoreOptions {
        StoreOptions {
            compact_after: 0,
            sync: false,
        }
    }

    #[test]
    fn assessment_versions_and_conflicts() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open_with(dir.path(), fast()).unwrap();
        let net = network("n1");
        store.create_network(net.clone()).unwrap();
        let q1 = Period::quarter(2010, 1).unwrap();
        let (s, i) = scored(&net, 0.9);
        let a = store.record_assessment(&net.id, q1, s.clone(), i.clone(), false).unwrap();
        assert_eq!(a.version, 1);
        assert!(matches!(
            store.record_assessment(&net.id, q1, s.clone(), i.clone(), false),
            Err(StoreError::Conflict { .. })
        ));
        let (s2, i2) = scored(&net, 0.5);
        let b = store.record_assessment(&net.id, q1, s2, i2, true).unwrap();
        assert_eq!(b.version, 2);
        assert_eq!(store.get_assessment(&net.id, &q1).unwrap(), b);
        assert_eq!(store.assessment_history(&net.id, &q1).unwrap(), vec![a, b]);
        assert!(matches!(
            store.record_assessment(&"ghost".into(), q1, s, i, false),
            Err(StoreError::NotFound { resource: "network", .. })
        ));
    }

    #[test]
    fn rejects_wrong_granularity_and_inconsistent_scores() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open_with(dir.path(), fast()).unwrap();
        let net = network("n1");
        store.create_network(net.clone()).unwrap();
        let (mut s, i) = scored(&net, 0.9);
        let m = Period::month(2010, 1).unwrap();
        assert!(matches!(
            store.record_assessment(&net.id, m, s.clone(), i.clone(), false),
            Err(StoreError::Granularity { .. })
        ));
        s.ratlop += 0.01;
        assert!(matches!(
            store.record_assessment(&net.id, Period::quarter(2010, 1).unwrap(), s, i, false),
            Err(StoreError::Inconsistent(_))
        ));
    }

    #[test]
    fn series_bounds_and_reopen() {
        let dir = tempfile::tempdir().unwrap();
        let net = network("n1");
        {
            let store = Store::open_with(dir.path(), fast()).unwrap();
            store.create_network(net.clone()).unwrap();
            assert!(store.get_series(&net.id, None, None).unwrap().entries.is_empty());
            for q in [3, 1, 2] {
                let (s, i) = scored(&net, 0.5 + 0.1 * q as f64);
                store
                    .record_assessment(&net.id, Period::quarter(2010, q).unwrap(), s, i, false)
                    .unwrap();
            }
        }
        let store = Store::open_with(dir.path(), fast()).unwrap();
        let all = store.get_series(&net.id, None, None).unwrap();
        let labels: Vec<_> = all.entries.iter().map(|e| e.period.to_string()).collect();
        assert_eq!(labels, ["2010-Q1", "2010-Q2", "2010-Q3"]);
        let some = store
            .get_series(
                &net.id,
                Some(Period::quarter(2010, 2).unwrap()),
                Some(Period::quarter(2010, 3).unwrap()),
            )
            .unwrap();
        assert_eq!(some.entries.len(), 2);
        assert!(matches!(
            store.get_series(&"ghost".into(), None, None),
            Err(StoreError::NotFound { .. })
        ));
    }

    #[test]
    fn compaction_preserves_contents() {
        let dir = tempfile::tempdir().unwrap();
        let net = network("n1");
        let options = StoreOptions {
            compact_after: 3,
            sync: false,
        };
        let before;
        {
            let store = Store::open_with(dir.path(), options).unwrap();
            store.create_network(net.clone()).unwrap();
            for q in 1..=4 {
                let (s, i) = scored(&net, 0.2 * q as f64);
                store
                    .record_assessment(&net.id, Period::quarter(2011, q).unwrap(), s, i, false)
                    .unwrap();
            }
            let mut renamed = net.clone();
            renamed.name = "renamed".into();
            assert_eq!(store.update_network(renamed).unwrap(), 2);
            before = store.get_series(&net.id, None, None).unwrap();
        }
        let ndir = dir.path().join("networks/n1");
        assert!(ndir.join("snapshot").exists());
        let store = Store::open_with(dir.path(), options).unwrap();
        assert_eq!(store.get_series(&net.id, None, None).unwrap(), before);
        assert_eq!(store.get_network(&net.id).unwrap().name, "renamed");
        assert_eq!(store.network_revisions(&net.id).unwrap().len(), 2);
        store.compact(&net.id).unwrap();
        assert_eq!(fs::metadata(ndir.join("journal")).unwrap().len(), 0);
        drop(store);
        let store = Store::open_with(dir.path(), options).unwrap();
        assert_eq!(store.get_series(&net.id, None, None).unwrap(), before);
    }

    #[test]
    fn network_lifecycle() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open_with(dir.path(), fast()).unwrap();
        let net = network("n1");
        assert_eq!(store.put_network(net.clone()).unwrap(), (1, true));
        assert_eq!(store.put_network(net.clone()).unwrap(), (2, false));
        assert!(matches!(store.create_network(net.clone()), Err(StoreError::Conflict { .. })));
        let mut bad = network("n2");
        bad.organizations.clear();
        assert!(matches!(store.create_network(bad), Err(StoreError::InvalidNetwork(_))));
        let listed = store.list_networks();
        assert_eq!(listed.len(), 1);
        assert_eq!(listed[0].revision, 2);
    }

    #[test]
    fn manifest_schema_is_checked() {
        let dir = tempfile::tempdir().unwrap();
        Store::open(dir.path()).unwrap();
        let text = fs::read_to_string(dir.path().join("manifest")).unwrap();
        assert_eq!(text, "{\"format\":\"imt-store\",\"schema\":1}\n");
        fs::write(dir.path().join("manifest"), "{\"format\":\"imt-store\",\"schema\":9}").unwrap();
        assert!(matches!(Store::open(dir.path()), Err(StoreError::Schema { .. })));
    }
}
