use serde::{Deserialize, Serialize};

use crate::env::{OrderingObservation, RoutingAction, RoutingObservation, RoutingStatus};
use crate::grid::{Direction, MazeIndex, NetId};
use crate::metrics::{HalfUnits, MetricsSnapshot};

/// Wire format version carried in HELLO.
pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    #[default]
    Ordering,
    Routing,
}

/// A region named from the server catalog, or sent inline in region-file syntax.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionRef {
    Name(String),
    Inline(String),
}

/// An ordering action names a net; a routing action is a lattice move with
/// direction index `d` in `0..=5` and step count `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Net(NetId),
    Move {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        start: Option<MazeIndex>,
        d: u8,
        #[serde(default = "one")]
        s: u32,
    },
}

fn one() -> u32 {
    1
}

impl Action {
    pub fn step(d: Direction) -> Self {
        Action::Move {
            start: None,
            d: d.index() as u8,
            s: 1,
        }
    }

    /// The routing move, or `None` for a net action or an out-of-range direction.
    pub fn routing(&self) -> Option<RoutingAction> {
        match *self {
            Action::Move { start, d, s } => Direction::from_index(d).map(|direction| RoutingAction {
                start,
                direction,
                steps: s,
            }),
            Action::Net(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observation {
    Ordering(OrderingObservation),
    Routing(RoutingObservation),
}

/// Progress of a multi-net routing session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepInfo {
    pub net: NetId,
    pub attempt: u32,
    pub status: RoutingStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    /// Frame or body could not be decoded.
    Protocol,
    Version,
    /// Request names a session other than the connection's own.
    Session,
    NoEpisode,
    EpisodeDone,
    IllegalAction,
    UnknownRegion,
    InvalidRegion,
    BadRequest,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Message {
    /// Client greeting with its version; the reply carries the session id.
    Hello {
        v: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        session: Option<u64>,
    },
    /// Omitting `region` takes the next region of the server's set.
    Reset {
        session: u64,
        #[serde(default)]
        task: TaskKind,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        region: Option<RegionRef>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        net: Option<NetId>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    Observation {
        session: u64,
        region: String,
        observation: Observation,
        done: bool,
    },
    Step {
        session: u64,
        action: Action,
    },
    /// `reward` is in real units; `reward_half_units` is the exact value.
    Transition {
        session: u64,
        observation: Observation,
        reward: f64,
        reward_half_units: i64,
        done: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        info: Option<StepInfo>,
    },
    /// A request (empty fields) or the episode metrics in reply.
    Metrics {
        session: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        snapshot: Option<MetricsSnapshot>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        trend: Vec<MetricsSnapshot>,
    },
    Error {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        session: Option<u64>,
        code: ErrorCode,
        message: String,
    },
    Close {
        session: u64,
    },
}

impl Message {
    pub const TYPES: [&'static str; 8] = [
        "HELLO",
        "RESET",
        "OBSERVATION",
        "STEP",
        "TRANSITION",
        "METRICS",
        "ERROR",
        "CLOSE",
    ];

    /// Ordering reset on the next catalog region.
    pub fn reset(session: u64, seed: u64) -> Self {
        Message::Reset {
            session,
            task: TaskKind::Ordering,
            region: None,
            net: None,
            seed: Some(seed),
        }
    }

    pub fn transition(session: u64, observation: Observation, reward: HalfUnits, done: bool) -> Self {
        Message::Transition {
            session,
            observation,
            reward: reward.real(),
            reward_half_units: reward.0,
            done,
            info: None,
        }
    }

    pub fn error(session: Option<u64>, code: ErrorCode, message: impl Into<String>) -> Self {
        Message::Error {
            session,
            code,
            message: message.into(),
        }
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Message::Hello { .. } => "HELLO",
            Message::Reset { .. } => "RESET",
            Message::Observation { .. } => "OBSERVATION",
            Message::Step { .. } => "STEP",
            Message::Transition { .. } => "TRANSITION",
            Message::Metrics { .. } => "METRICS",
            Message::Error { .. } => "ERROR",
            Message::Close { .. } => "CLOSE",
        }
    }

    pub fn session(&self) -> Option<u64> {
        match self {
            Message::Hello { session, .. } | Message::Error { session, .. } => *session,
            Message::Reset { session, .. }
            | Message::Observation { session, .. }
            | Message::Step { session, .. }
            | Message::Transition { session, .. }
            | Message::Metrics { session, .. }
            | Message::Close { session } => Some(*session),
        }
    }
}
