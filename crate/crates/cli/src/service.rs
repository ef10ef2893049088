//! Operations shared by the command line and the HTTP service.
//!
//! A project directory holds the store (`manifest`, `networks/`) and the
//! uploaded indicator files:
//!
//! ```text
//! indicators/<network>/<period>/probes.csv
//! indicators/<network>/<period>/survey.csv
//! ```

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::AtomicBool;

use imt_core::document::{AssessmentRequest, ErrorBody, IndicatorFiles, PlanRequest};
use imt_core::ingest::{build_indicator_set, IngestError, ProbeLog, SurveyBatch};
use imt_core::model::{Assessment, CollaborationNetwork, IndicatorSet, InputsSnapshot, NetworkId, Period};
use imt_core::planner::{plan_scenario_cancelable, AsIs, Plan, PlanError};
use imt_core::scoring::{assess, AssessError, ScoringConfig, Step};
use imt_core::store::{SeriesReport, Store, StoreError};
use imt_core::DocumentError;
use thiserror::Error;

pub const PROBES_FILE: &str = "probes.csv";
pub const SURVEY_FILE: &str = "survey.csv";

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error(transparent)]
    Store(#[from] StoreError),
    /// Indicator evidence is missing or malformed. `indicator` names the
    /// rates that cannot be computed.
    #[error("{}: {indicator}: {message}", Step::Performance)]
    Indicator { indicator: &'static str, message: String },
    #[error(transparent)]
    Assess(#[from] AssessError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Document(#[from] DocumentError),
    #[error("{0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCode {
    Invalid,
    NotFound,
    Conflict,
    Infeasible,
    Internal,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::Invalid => "invalid",
            ErrorCode::NotFound => "not_found",
            ErrorCode::Conflict => "conflict",
            ErrorCode::Infeasible => "infeasible",
            ErrorCode::Internal => "internal",
        }
    }

    pub fn http_status(self) -> u16 {
        match self {
            ErrorCode::Invalid => 400,
            ErrorCode::NotFound => 404,
            ErrorCode::Conflict => 409,
            ErrorCode::Infeasible => 422,
            ErrorCode::Internal => 500,
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            ErrorCode::Invalid | ErrorCode::NotFound => 2,
            ErrorCode::Conflict => 3,
            ErrorCode::Infeasible => 4,
            ErrorCode::Internal => 1,
        }
    }
}

impl ServiceError {
    pub fn code(&self) -> ErrorCode {
        match self {
            ServiceError::Store(e) => match e {
                StoreError::NotFound { .. } => ErrorCode::NotFound,
                StoreError::Conflict { .. } => ErrorCode::Conflict,
                StoreError::InvalidNetwork(_)
                | StoreError::Granularity { .. }
                | StoreError::Inconsistent(_)
                | StoreError::Document(_) => ErrorCode::Invalid,
                StoreError::Io { .. } | StoreError::Corrupt { .. } | StoreError::Schema { .. } => {
                    ErrorCode::Internal
                }
            },
            ServiceError::Plan(PlanError::Infeasible { .. }) => ErrorCode::Infeasible,
            ServiceError::Plan(PlanError::Cancelled) => ErrorCode::Internal,
            ServiceError::Io { .. } => ErrorCode::Internal,
            _ => ErrorCode::Invalid,
        }
    }

    /// The measurement step that failed, if the error comes from one.
    pub fn step(&self) -> Option<Step> {
        match self {
            ServiceError::Indicator { .. } => Some(Step::Performance),
            ServiceError::Assess(e) | ServiceError::Plan(PlanError::Assess(e)) => Some(e.step()),
            ServiceError::Store(StoreError::InvalidNetwork(_)) => Some(Step::Scope),
            _ => None,
        }
    }

    pub fn to_body(&self) -> ErrorBody {
        ErrorBody {
            code: self.code().as_str().into(),
            message: self.to_string(),
            step: self.step().map(Step::number),
            max_achievable: match self {
                ServiceError::Plan(PlanError::Infeasible { max_achievable, .. }) => {
                    Some((**max_achievable).clone())
                }
                _ => None,
            },
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> ServiceError + '_ {
    move |source| ServiceError::Io {
        path: path.to_owned(),
        source,
    }
}

fn probe_error(e: IngestError) -> ServiceError {
    ServiceError::Indicator {
        indicator: "ds/qos",
        message: format!("probe log: {e}"),
    }
}

fn survey_error(e: IngestError) -> ServiceError {
    ServiceError::Indicator {
        indicator: "ts",
        message: format!("survey: {e}"),
    }
}

pub struct Project {
    root: PathBuf,
    store: Store,
}

impl std::fmt::Debug for Project {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Project").field("root", &self.root).finish_non_exhaustive()
    }
}

impl Project {
    pub fn open(root: impl AsRef<Path>) -> Result<Self, ServiceError> {
        let root = root.as_ref().to_owned();
        let store = Store::open(&root)?;
        Ok(Self { root, store })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    /// The network to use when none is named: the only one in the project.
    pub fn default_network(&self) -> Result<NetworkId, ServiceError> {
        let mut all = self.store.list_networks();
        match all.len() {
            1 => Ok(all.remove(0).id),
            0 => Err(ServiceError::Invalid("the project holds no network; import one first".into())),
            n => Err(ServiceError::Invalid(format!(
                "the project holds {n} networks; name one with --network"
            ))),
        }
    }

    /// Stores a network. An existing network is only replaced with
    /// `overwrite`.
    pub fn put_network(&self, network: CollaborationNetwork, overwrite: bool) -> Result<(usize, bool), ServiceError> {
        if overwrite {
            Ok(self.store.put_network(network)?)
        } else {
            Ok((self.store.create_network(network)?, true))
        }
    }

    fn indicator_dir(&self, network_id: &NetworkId, period: &Period) -> PathBuf {
        self.root
            .join("indicators")
            .join(network_id.as_str())
            .join(period.to_string())
    }

    /// Validates and saves the probe log and survey of one period.
    pub fn put_indicator_files(&self, files: &IndicatorFiles) -> Result<(), ServiceError> {
        let network = self.store.get_network(&files.network_id)?;
        if files.period.granularity() != network.granularity {
            return Err(ServiceError::Invalid(format!(
                "period {} does not match the {:?} granularity of network {}",
                files.period, network.granularity, network.id
            )));
        }
        ProbeLog::parse_csv(&files.probes).map_err(probe_error)?;
        SurveyBatch::parse_csv(&files.survey).map_err(survey_error)?;
        let dir = self.indicator_dir(&files.network_id, &files.period);
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        for (name, text) in [(PROBES_FILE, &files.probes), (SURVEY_FILE, &files.survey)] {
            let path = dir.join(name);
            let tmp = path.with_extension("tmp");
            fs::write(&tmp, text).map_err(io_err(&tmp))?;
            fs::rename(&tmp, &path).map_err(io_err(&path))?;
        }
        Ok(())
    }

    pub fn indicator_files(&self, network_id: &NetworkId, period: &Period) -> Result<IndicatorFiles, ServiceError> {
        self.store.get_network(network_id)?;
        let dir = self.indicator_dir(network_id, period);
        let read = |name: &str, indicator: &'static str| {
            let path = dir.join(name);
            fs::read_to_string(&path).map_err(|e| match e.kind() {
                io::ErrorKind::NotFound => ServiceError::Indicator {
                    indicator,
                    message: format!("no {name} for {network_id} {period}"),
                },
                _ => io_err(&path)(e),
            })
        };
        Ok(IndicatorFiles {
            network_id: network_id.clone(),
            period: *period,
            probes: read(PROBES_FILE, "ds/qos")?,
            survey: read(SURVEY_FILE, "ts")?,
        })
    }

    pub fn indicators(&self, network_id: &NetworkId, period: &Period) -> Result<IndicatorSet, ServiceError> {
        let files = self.indicator_files(network_id, period)?;
        let log = ProbeLog::parse_csv(&files.probes).map_err(probe_error)?;
        let survey = SurveyBatch::parse_csv(&files.survey).map_err(survey_error)?;
        build_indicator_set(&log, &log, &survey).map_err(|e| ServiceError::Indicator {
            indicator: e.indicator.as_str(),
            message: e.source.to_string(),
        })
    }

    /// Ingests the period's files, scores the network and stores the
    /// result. A dry run returns the assessment with version 0 and stores
    /// nothing; it may score a draft network given in the request.
    pub fn assess(
        &self,
        network_id: &NetworkId,
        period: Period,
        request: &AssessmentRequest,
    ) -> Result<Assessment, ServiceError> {
        let network = match (&request.network, request.dry_run) {
            (Some(draft), true) => {
                if &draft.id != network_id {
                    return Err(ServiceError::Invalid(format!(
                        "draft network {} does not match {network_id}",
                        draft.id
                    )));
                }
                draft.clone()
            }
            (Some(_), false) => {
                return Err(ServiceError::Invalid(
                    "a draft network is only accepted for a dry run".into(),
                ))
            }
            (None, _) => self.store.get_network(network_id)?,
        };
        let indicators = self.indicators(network_id, &period)?;
        let scores = assess(&network, &indicators, &request.config())?;
        let inputs = InputsSnapshot::capture(&network, indicators);
        if request.dry_run {
            return Ok(Assessment {
                network_id: network_id.clone(),
                period,
                version: 0,
                scores,
                inputs,
            });
        }
        Ok(self
            .store
            .record_assessment(network_id, period, scores, inputs, request.overwrite)?)
    }

    pub fn series(
        &self,
        network_id: &NetworkId,
        from: Option<Period>,
        to: Option<Period>,
        epsilon: f64,
    ) -> Result<SeriesReport, ServiceError> {
        let series = self.store.get_series(network_id, from, to)?;
        SeriesReport::build(series, epsilon).map_err(|e| ServiceError::Invalid(e.to_string()))
    }

    /// Plans from the latest assessment of the network and stores the plan.
    pub fn plan(&self, network_id: &NetworkId, request: &PlanRequest, cancel: &AtomicBool) -> Result<Plan, ServiceError> {
        let series = self.store.get_series(network_id, None, None)?;
        let Some(latest) = series.entries.last() else {
            return Err(ServiceError::Invalid(format!(
                "network {network_id} has no assessment to plan from"
            )));
        };
        let assessment = self.store.get_assessment(network_id, &latest.period)?;
        let network = assessment.inputs.apply_to(&self.store.get_network(network_id)?);
        let as_is = AsIs::new(network, assessment.inputs.indicators);
        let config = request.config.unwrap_or(ScoringConfig::new(
            assessment.scores.weights,
            assessment.scores.dc_aggregation,
        ));
        let plan = plan_scenario_cancelable(&as_is, &request.catalog, request.target, &config, cancel)?;
        self.store.record_plan(plan.clone())?;
        Ok(plan)
    }
}
