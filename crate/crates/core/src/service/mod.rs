//! Out-of-process refinement services.
//!
//! A service is a long-lived child process that loads the heavy refinement
//! artifacts once and then answers requests over a pair of byte streams
//! (its stdio, or two named pipes). Both directions carry [`frame`]s.

pub mod client;
pub mod frame;
pub mod server;

use serde::{Deserialize, Serialize};

use crate::lexicon::HomographSite;

pub use client::{spawn_service, ServiceError, ServiceHandle, ServiceState, SpawnOptions};
pub use frame::{decode_frame, encode_frame, Frame, FrameError};
pub use server::{serve, Handler, ServeOptions};

pub const OP_REFINE: &str = "refine";
pub const OP_HEALTH: &str = "health";
pub const OP_SHUTDOWN: &str = "shutdown";
pub const OP_READY: &str = "ready";
pub const OP_ERROR: &str = "error";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefineRequest {
    pub tokens: Vec<String>,
    /// Base phoneme sequence in its text form.
    pub phonemes: String,
    pub sites: Vec<HomographSite>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefineResponse {
    pub phonemes: String,
    /// `(token index, variant id)` per homograph site.
    pub choices: Vec<(usize, u32)>,
    pub ezafe_tags: Vec<bool>,
}
