//! The two routing MDPs and the rip-up-and-reroute driver.
//!
//! [`OrderingEpisode`] picks which net the built-in router handles next;
//! [`RoutingEpisode`] walks a single net across the lattice one direction
//! at a time. Both are deterministic in `(region, seed, actions)`.

mod observation;
mod ordering;
mod routing;
mod rrr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::design_io::DesignIoError;
use crate::drc::DrcRules;
use crate::grid::{GridError, NetId};
use crate::metrics::{CostWeights, HalfUnits};
use crate::router::RouteError;

pub use observation::{NetFeatures, OrderingObservation, RoutingObservation, Tensor3, BLOCKED_EDGE};
pub use ordering::{evaluate_order, OrderingEpisode};
pub use routing::{RoutingAction, RoutingEpisode, RoutingStatus};
pub use rrr::{rrr_iterate, RrrConfig, RrrOutcome, MAX_RRR_ITERATIONS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("invalid region: {0}")]
    InvalidRegion(#[from] DesignIoError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Route(#[from] RouteError),
    #[error("illegal action: net {0} is not among the remaining nets")]
    IllegalAction(NetId),
    #[error("unknown net {0}")]
    UnknownNet(NetId),
    #[error("episode already finished")]
    EpisodeDone,
    #[error("direction index {0} outside 0..=5")]
    BadDirection(u8),
    #[error("iteration count {0} outside 1..={max}", max = MAX_RRR_ITERATIONS)]
    InvalidIterations(u32),
}

/// Trainer mode serves regions for interaction; validator mode sweeps a
/// fixed region list once with fixed seeds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Trainer,
    Validator,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnvConfig {
    pub weights: CostWeights,
    pub rules: DrcRules,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transition<O> {
    pub observation: O,
    pub reward: HalfUnits,
    pub done: bool,
}
