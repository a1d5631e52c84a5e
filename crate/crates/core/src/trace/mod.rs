//! GPS trace ingestion.
//!
//! Raw traces are one text file per vehicle with lines
//! `lat lon occupancy unix_ts`. They are cropped to a study region,
//! projected to local planar meters and turned into [`Vehicle`]s. A
//! canonical `vehicle_id,t,x_m,y_m` CSV allows a fast reload of an
//! already projected fleet.
//!
//! [`Vehicle`]: crate::env::Vehicle

mod fleet;
mod parse;
mod region;

use std::path::PathBuf;

use thiserror::Error;

pub use fleet::{
    build_vehicle, load_fleet, parse_manifest, read_canonical, segment_points, write_canonical,
    FleetOptions, ManifestEntry,
};
pub use parse::{format_trace, parse_trace_file, parse_trace_str, TracePoint};
pub use region::{crop_region, deploy_rsus, deploy_rsus_along_density, Projection, RegionSpec};

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: Box<TraceError>,
    },
    #[error("invalid region: {0}")]
    Region(String),
    #[error("RSU layout: {0}")]
    Layout(String),
    #[error("canonical trace: {0}")]
    Canonical(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Env(#[from] crate::env::EnvError),
}
