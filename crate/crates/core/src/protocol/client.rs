use std::net::{TcpStream, ToSocketAddrs};

use thiserror::Error;

use super::frame::{read_message, write_message};
use super::message::{Action, Message, RegionRef, TaskKind, PROTOCOL_VERSION};
use super::ProtocolError;
use crate::grid::NetId;

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("connect: {0}")]
    Connect(std::io::Error),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("server closed the connection")]
    Closed,
    #[error("unexpected reply {0}")]
    Unexpected(String),
}

/// Blocking client holding one session.
#[derive(Debug)]
pub struct Client {
    stream: TcpStream,
    session: u64,
}

impl Client {
    pub fn connect(addr: impl ToSocketAddrs) -> Result<Self, ClientError> {
        let stream = TcpStream::connect(addr).map_err(ClientError::Connect)?;
        let _ = stream.set_nodelay(true);
        let mut c = Self { stream, session: 0 };
        match c.request(&Message::Hello {
            v: PROTOCOL_VERSION,
            session: None,
        })? {
            Message::Hello { session: Some(id), .. } => c.session = id,
            other => return Err(ClientError::Unexpected(other.type_name().into())),
        }
        Ok(c)
    }

    pub fn session(&self) -> u64 {
        self.session
    }

    /// Sends one message and waits for its reply.
    pub fn request(&mut self, m: &Message) -> Result<Message, ClientError> {
        write_message(&mut self.stream, m)?;
        read_message(&mut self.stream)?.ok_or(ClientError::Closed)
    }

    pub fn reset(
        &mut self,
        task: TaskKind,
        region: Option<RegionRef>,
        net: Option<NetId>,
        seed: Option<u64>,
    ) -> Result<Message, ClientError> {
        self.request(&Message::Reset {
            session: self.session,
            task,
            region,
            net,
            seed,
        })
    }

    pub fn step(&mut self, action: Action) -> Result<Message, ClientError> {
        self.request(&Message::Step {
            session: self.session,
            action,
        })
    }

    pub fn metrics(&mut self) -> Result<Message, ClientError> {
        self.request(&Message::Metrics {
            session: self.session,
            snapshot: None,
            trend: Vec::new(),
        })
    }

    pub fn close(mut self) -> Result<Message, ClientError> {
        let s = self.session;
        self.request(&Message::Close { session: s })
    }
}
