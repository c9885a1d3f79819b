//! Remote access to the environments: length-prefixed JSON frames over TCP.
//!
//! A frame is a 4-byte big-endian body length followed by that many bytes
//! of UTF-8 JSON. Each body is one [`Message`], tagged by its `type` field.
//! Every request gets exactly one reply frame, in request order.

mod client;
mod frame;
mod message;
mod server;

use thiserror::Error;

pub use client::{Client, ClientError};
pub use frame::{
    decode, decode_body, encode, encode_frame, read_frame, read_message, split_frame, write_message, MAX_FRAME_LEN,
};
pub use message::{Action, ErrorCode, Message, Observation, RegionRef, StepInfo, TaskKind, PROTOCOL_VERSION};
pub use server::{
    build_region_set, handle_connection, serve, ClipSpec, ServeError, ServerConfig, ServerHandle, Session,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProtocolError {
    #[error("truncated frame: expected {expected} bytes, got {got}")]
    Truncated { expected: u64, got: u64 },
    #[error("frame of {0} bytes exceeds the 16 MiB limit")]
    Oversize(u64),
    #[error("malformed body: {0}")]
    Malformed(String),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("unknown message type `{0}`")]
    UnknownType(String),
    #[error("i/o: {0}")]
    Io(String),
}
