//! IIIF Image API 3.0 and Presentation API 3.0 toolkit.
//!
//! - [`request`]: the image request grammar, resolution and canonical URIs
//! - [`pipeline`]: pixel transforms, encoders and `info.json`
//! - [`presentation`]: typed resource model, JSON-LD (de)serialization, validation
//! - [`builder`]: manifest boilerplates for the supported cookbook recipes
//! - [`conformance`]: recipe detection and viewer support reporting
//! - [`ingest`]: repository + annotation store + image service to manifests
//! - [`discovery`]: the change discovery activity log

pub mod builder;
pub mod conformance;
pub mod discovery;
pub mod ingest;
pub mod limits;
pub mod pipeline;
pub mod presentation;
pub mod request;

pub use limits::{ComplianceLevel, ServerLimits, TileConfig};
