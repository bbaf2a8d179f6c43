//! sqlhive-core: a deterministic SQL-injection honeypot pipeline.
//!
//! The crate synthesizes labeled request/response traffic against an
//! isolated shadow database, curates it into a stratified dataset, and
//! ships a compact classifier stack for comparing payload-only input
//! against full request-response context, including a teacher/student
//! distillation trainer.

pub mod catalog;
pub mod codec;
pub mod detector;
pub mod dialect;
pub mod endpoint;
pub mod error;
pub mod evasion;
pub mod http;
pub mod model;
pub mod monitor;
pub mod payload;
pub mod rng;
pub mod shadow;

pub use error::{Error, Result};
