use std::io;
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};

use thiserror::Error;

use super::frame::{decode_body, read_frame, write_message};
use super::message::{Action, ErrorCode, Message, Observation, RegionRef, StepInfo, TaskKind, PROTOCOL_VERSION};
use super::ProtocolError;
use crate::design_io::{
    clip_region, gcell_grid, parse_region, partition_design, DesignIoError, GcellBox, RegionDescriptor,
};
use crate::env::{rrr_iterate, EnvConfig, EnvError, Mode, OrderingEpisode, RoutingEpisode, RrrConfig};
use crate::grid::{GridGraph, NetId};
use crate::heuristics::OrderingPolicy;
use crate::metrics::{DrvCounts, MetricsSnapshot};

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("cannot bind: {0}")]
    Bind(io::Error),
    #[error("invalid server configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub mode: Mode,
    /// Regions served when RESET names none, in order.
    pub catalog: Vec<RegionDescriptor>,
    /// Trainer mode serves each catalog region this many times in a row.
    pub clip_loop: u32,
    /// Concurrent sessions; further connections wait in the accept backlog.
    pub thread_count: usize,
    /// Attempts per net in a routing session; the last one is kept.
    pub net_loop: u32,
    /// When set, METRICS after a finished ordering episode adds a
    /// rip-up-and-reroute trend of this many rounds over the agent's order.
    pub iteration_count: Option<u32>,
    pub env: EnvConfig,
}

impl Default for ServerConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Trainer,
            catalog: Vec::new(),
            clip_loop: 1,
            thread_count: 1,
            net_loop: 1,
            iteration_count: None,
            env: EnvConfig::default(),
        }
    }
}

/// Clip placement for [`build_region_set`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClipSpec {
    /// Clip side in GCells.
    pub size: u32,
    /// GCell side in tracks.
    pub gcell: u32,
    /// Keep only the clip whose lower-left GCell is here.
    pub location: Option<(u32, u32)>,
}

/// Expands designs into the served region list: optionally cut into clips,
/// then the whole list repeated `set_loop` times.
pub fn build_region_set(
    designs: &[RegionDescriptor],
    clip: Option<ClipSpec>,
    set_loop: u32,
) -> Result<Vec<RegionDescriptor>, DesignIoError> {
    let mut once = Vec::new();
    for d in designs {
        let Some(c) = clip else {
            once.push(d.clone());
            continue;
        };
        let boxes = partition_design(gcell_grid(d, c.gcell), c.size)?;
        let chosen: Vec<GcellBox> = match c.location {
            Some((x, y)) => {
                let b = boxes
                    .into_iter()
                    .find(|b| b.llx == x && b.lly == y)
                    .ok_or_else(|| DesignIoError::semantic(format!("no clip starts at GCell ({x}, {y}) of {}", d.name)))?;
                vec![b]
            }
            None => boxes,
        };
        for b in chosen {
            once.push(clip_region(d, c.gcell, b)?);
        }
    }
    Ok((0..set_loop.max(1)).flat_map(|_| once.iter().cloned()).collect())
}

fn sum_snapshots<'a>(items: impl IntoIterator<Item = &'a MetricsSnapshot>) -> MetricsSnapshot {
    let mut s = MetricsSnapshot::default();
    for i in items {
        s.wirelength += i.wirelength;
        s.via_count += i.via_count;
        s.drv = DrvCounts {
            open: s.drv.open + i.drv.open,
            short: s.drv.short + i.drv.short,
            spacing: s.drv.spacing + i.drv.spacing,
            min_area: s.drv.min_area + i.drv.min_area,
        };
        s.runtime_secs += i.runtime_secs;
    }
    s
}

/// Routes a region's nets one after another, each for `net_loop` attempts,
/// carrying the last attempt's wiring forward.
#[derive(Debug, Clone)]
struct RoutingRun {
    region: RegionDescriptor,
    nets: Vec<NetId>,
    pos: usize,
    attempt: u32,
    net_loop: u32,
    seed: u64,
    env: EnvConfig,
    base: GridGraph,
    finished: Vec<MetricsSnapshot>,
    ep: RoutingEpisode,
}

impl RoutingRun {
    fn start(region: RegionDescriptor, nets: Vec<NetId>, net_loop: u32, seed: u64, env: EnvConfig) -> Result<Self, EnvError> {
        region.validate()?;
        let base = GridGraph::from_region(&region)?;
        let (ep, _) = RoutingEpisode::on_grid(base.clone(), &region, nets[0], seed, env)?;
        let mut run = Self {
            region,
            nets,
            pos: 0,
            attempt: 0,
            net_loop: net_loop.max(1),
            seed,
            env,
            base,
            finished: Vec::new(),
            ep,
        };
        run.settle()?;
        Ok(run)
    }

    fn is_done(&self) -> bool {
        self.pos >= self.nets.len()
    }

    /// Moves past every attempt that has already ended.
    fn settle(&mut self) -> Result<(), EnvError> {
        while !self.is_done() && self.ep.is_done() {
            if self.attempt + 1 < self.net_loop {
                self.attempt += 1;
            } else {
                self.base = self.ep.grid().clone();
                self.finished.push(self.ep.snapshot());
                self.pos += 1;
                self.attempt = 0;
                if self.is_done() {
                    break;
                }
            }
            let net = self.nets[self.pos];
            self.ep = RoutingEpisode::on_grid(self.base.clone(), &self.region, net, self.seed, self.env)?.0;
        }
        Ok(())
    }

    fn snapshot(&self) -> MetricsSnapshot {
        let current = (!self.is_done()).then(|| self.ep.snapshot());
        sum_snapshots(self.finished.iter().chain(current.as_ref()))
    }
}

#[derive(Debug, Clone)]
enum Episode {
    Ordering(OrderingEpisode),
    Routing(RoutingRun),
}

/// Per-connection protocol state machine; one response per request.
#[derive(Debug)]
pub struct Session {
    id: u64,
    config: Arc<ServerConfig>,
    greeted: bool,
    served: usize,
    episode: Option<Episode>,
}

impl Session {
    pub fn new(id: u64, config: Arc<ServerConfig>) -> Self {
        Self {
            id,
            config,
            greeted: false,
            served: 0,
            episode: None,
        }
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    fn err(&self, code: ErrorCode, message: impl Into<String>) -> Message {
        Message::error(Some(self.id), code, message)
    }

    /// Returns the reply and whether the connection should close afterwards.
    pub fn handle(&mut self, m: Message) -> (Message, bool) {
        if let Message::Hello { v, .. } = m {
            if v != PROTOCOL_VERSION {
                return (self.err(ErrorCode::Version, format!("server speaks version {PROTOCOL_VERSION}")), false);
            }
            self.greeted = true;
            return (
                Message::Hello {
                    v: PROTOCOL_VERSION,
                    session: Some(self.id),
                },
                false,
            );
        }
        if !self.greeted {
            return (self.err(ErrorCode::Session, "send HELLO first"), false);
        }
        if m.session() != Some(self.id) {
            return (self.err(ErrorCode::Session, format!("this connection is session {}", self.id)), false);
        }
        match m {
            Message::Reset {
                task, region, net, seed, ..
            } => self.reset(task, region, net, seed),
            Message::Step { action, .. } => (self.step(action), false),
            Message::Metrics { .. } => (self.metrics(), false),
            Message::Close { .. } => {
                self.episode = None;
                (Message::Close { session: self.id }, true)
            }
            other => (
                self.err(ErrorCode::BadRequest, format!("{} is a server message", other.type_name())),
                false,
            ),
        }
    }

    fn pick_region(&mut self, region: Option<RegionRef>, seed: Option<u64>) -> Result<Option<(RegionDescriptor, u64)>, Message> {
        let catalog = &self.config.catalog;
        match region {
            Some(RegionRef::Inline(text)) => parse_region(text.as_bytes())
                .map(|r| Some((r, seed.unwrap_or(0))))
                .map_err(|e| self.err(ErrorCode::InvalidRegion, e.to_string())),
            Some(RegionRef::Name(name)) => catalog
                .iter()
                .find(|r| r.name == name)
                .map(|r| Some((r.clone(), seed.unwrap_or(0))))
                .ok_or_else(|| self.err(ErrorCode::UnknownRegion, format!("no region named `{name}`"))),
            None if catalog.is_empty() => Err(self.err(ErrorCode::UnknownRegion, "the server has no regions")),
            None => match self.config.mode {
                Mode::Trainer => {
                    let i = self.served / self.config.clip_loop.max(1) as usize % catalog.len();
                    self.served += 1;
                    Ok(Some((catalog[i].clone(), seed.unwrap_or(0))))
                }
                Mode::Validator => {
                    let i = self.served;
                    if i >= catalog.len() {
                        return Ok(None);
                    }
                    self.served += 1;
                    Ok(Some((catalog[i].clone(), i as u64)))
                }
            },
        }
    }

    fn reset(&mut self, task: TaskKind, region: Option<RegionRef>, net: Option<NetId>, seed: Option<u64>) -> (Message, bool) {
        let (region, seed) = match self.pick_region(region, seed) {
            Ok(Some(r)) => r,
            Ok(None) => {
                self.episode = None;
                return (Message::Close { session: self.id }, true);
            }
            Err(e) => return (e, false),
        };
        let name = region.name.clone();
        let env = self.config.env;
        let started = match task {
            TaskKind::Ordering => OrderingEpisode::reset(region, self.config.mode, seed, env)
                .map(|(ep, obs)| (Episode::Ordering(ep), Observation::Ordering(obs))),
            TaskKind::Routing => {
                let nets = match net {
                    Some(n) => vec![n],
                    None => region.net_ids(),
                };
                if nets.is_empty() {
                    return (self.err(ErrorCode::InvalidRegion, "region has no nets to route"), false);
                }
                RoutingRun::start(region, nets, self.config.net_loop, seed, env)
                    .map(|run| {
                        let obs = Observation::Routing(run.ep.observe());
                        (Episode::Routing(run), obs)
                    })
            }
        };
        match started {
            Ok((ep, observation)) => {
                let done = match &ep {
                    Episode::Ordering(o) => o.is_done(),
                    Episode::Routing(r) => r.is_done(),
                };
                self.episode = Some(ep);
                (
                    Message::Observation {
                        session: self.id,
                        region: name,
                        observation,
                        done,
                    },
                    false,
                )
            }
            Err(e) => {
                self.episode = None;
                (self.env_error(e), false)
            }
        }
    }

    fn env_error(&self, e: EnvError) -> Message {
        let code = match e {
            EnvError::IllegalAction(_) => ErrorCode::IllegalAction,
            EnvError::EpisodeDone => ErrorCode::EpisodeDone,
            EnvError::UnknownNet(_) | EnvError::BadDirection(_) | EnvError::InvalidIterations(_) => {
                ErrorCode::BadRequest
            }
            EnvError::InvalidRegion(_) => ErrorCode::InvalidRegion,
            EnvError::Grid(_) | EnvError::Route(_) => ErrorCode::Internal,
        };
        self.err(code, e.to_string())
    }

    fn step(&mut self, action: Action) -> Message {
        let id = self.id;
        let Some(ep) = self.episode.as_mut() else {
            return self.err(ErrorCode::NoEpisode, "no episode");
        };
        let result = match (ep, action) {
            (Episode::Ordering(o), Action::Net(n)) => o
                .step(n)
                .map(|t| Message::transition(id, Observation::Ordering(t.observation), t.reward, t.done)),
            (Episode::Routing(run), Action::Move { d, .. }) => {
                let Some(a) = action.routing() else {
                    return self.env_error(EnvError::BadDirection(d));
                };
                if run.is_done() {
                    Err(EnvError::EpisodeDone)
                } else {
                    let net = run.ep.net();
                    let attempt = run.attempt;
                    run.ep.step(a).and_then(|t| {
                        let status = run.ep.status();
                        run.settle()?;
                        let observation = Observation::Routing(run.ep.observe());
                        let mut m = Message::transition(id, observation, t.reward, run.is_done());
                        if let Message::Transition { info, .. } = &mut m {
                            *info = Some(StepInfo { net, attempt, status });
                        }
                        Ok(m)
                    })
                }
            }
            (Episode::Ordering(_), Action::Move { .. }) => {
                return self.err(ErrorCode::BadRequest, "ordering episodes take net actions");
            }
            (Episode::Routing(_), Action::Net(_)) => {
                return self.err(ErrorCode::BadRequest, "routing episodes take move actions");
            }
        };
        result.unwrap_or_else(|e| self.env_error(e))
    }

    fn metrics(&self) -> Message {
        let Some(ep) = &self.episode else {
            return self.err(ErrorCode::NoEpisode, "no episode");
        };
        let (snapshot, trend) = match ep {
            Episode::Ordering(o) => {
                let trend = match self.config.iteration_count {
                    Some(k) if o.is_done() => {
                        let cfg = RrrConfig {
                            env: self.config.env,
                            overlap_penalty: self.config.env.weights.drv,
                            ..RrrConfig::default()
                        };
                        match rrr_iterate(o.region(), &OrderingPolicy::Explicit(o.order().to_vec()), k, &cfg) {
                            Ok(out) => out.snapshots,
                            Err(e) => return self.env_error(e),
                        }
                    }
                    _ => Vec::new(),
                };
                (o.snapshot(), trend)
            }
            Episode::Routing(r) => (r.snapshot(), Vec::new()),
        };
        Message::Metrics {
            session: self.id,
            snapshot: Some(snapshot),
            trend,
        }
    }
}

/// Drives one connection until the peer leaves, asks to close, or breaks framing.
pub fn handle_connection(stream: &mut TcpStream, session: &mut Session) {
    loop {
        let reply = match read_frame(stream) {
            Ok(None) => return,
            Ok(Some(body)) => match decode_body(&body) {
                Ok(m) => session.handle(m),
                Err(e) => (Message::error(Some(session.id()), ErrorCode::Protocol, e.to_string()), false),
            },
            Err(e @ ProtocolError::Oversize(_)) => {
                (Message::error(Some(session.id()), ErrorCode::Protocol, e.to_string()), true)
            }
            Err(_) => return,
        };
        if write_message(stream, &reply.0).is_err() || reply.1 {
            return;
        }
    }
}

type Registry = Arc<Mutex<Vec<(u64, TcpStream)>>>;

/// A running server; dropping it without [`ServerHandle::shutdown`] leaves
/// the workers running.
#[derive(Debug)]
pub struct ServerHandle {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    active: Registry,
    workers: Vec<JoinHandle<()>>,
}

impl ServerHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    /// Closes live sessions, stops accepting and joins every worker.
    pub fn shutdown(self) {
        self.stop.store(true, Ordering::SeqCst);
        for (_, s) in self.active.lock().expect("registry").iter() {
            let _ = s.shutdown(Shutdown::Both);
        }
        for _ in &self.workers {
            let _ = TcpStream::connect(self.addr);
        }
        for w in self.workers {
            let _ = w.join();
        }
    }

    /// Blocks until every worker exits.
    pub fn join(self) {
        for w in self.workers {
            let _ = w.join();
        }
    }
}

/// Binds `addr` and serves sessions on `thread_count` workers.
pub fn serve(addr: impl ToSocketAddrs, config: ServerConfig) -> Result<ServerHandle, ServeError> {
    if config.thread_count == 0 {
        return Err(ServeError::Config("thread_count must be at least 1".into()));
    }
    let listener = TcpListener::bind(addr).map_err(ServeError::Bind)?;
    let local = listener.local_addr().map_err(ServeError::Bind)?;
    let config = Arc::new(config);
    let stop = Arc::new(AtomicBool::new(false));
    let active: Registry = Arc::default();
    let next_id = Arc::new(AtomicU64::new(1));
    let mut workers = Vec::with_capacity(config.thread_count);
    for _ in 0..config.thread_count {
        let listener = listener.try_clone().map_err(ServeError::Bind)?;
        let (config, stop, active, next_id) = (config.clone(), stop.clone(), active.clone(), next_id.clone());
        workers.push(thread::spawn(move || {
            for conn in listener.incoming() {
                if stop.load(Ordering::SeqCst) {
                    break;
                }
                let Ok(mut stream) = conn else { continue };
                let id = next_id.fetch_add(1, Ordering::SeqCst);
                if let Ok(c) = stream.try_clone() {
                    active.lock().expect("registry").push((id, c));
                }
                let _ = stream.set_nodelay(true);
                let mut session = Session::new(id, config.clone());
                handle_connection(&mut stream, &mut session);
                active.lock().expect("registry").retain(|(i, _)| *i != id);
                if stop.load(Ordering::SeqCst) {
                    break;
                }
            }
        }));
    }
    Ok(ServerHandle {
        addr: local,
        stop,
        active,
        workers,
    })
}
