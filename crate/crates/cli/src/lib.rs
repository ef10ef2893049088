//! Command line and HTTP front ends for `imt-core`.

pub mod cli;
pub mod http;
pub mod render;
pub mod service;

pub use service::{ErrorCode, Project, ServiceError};
