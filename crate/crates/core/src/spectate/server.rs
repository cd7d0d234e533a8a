use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::{self, Receiver, Sender};
use std::sync::{Arc, Condvar, Mutex, MutexGuard};
use std::thread::JoinHandle;
use std::time::Duration;

use thiserror::Error;

use crate::engine::ButtonSet;
use crate::env::{episode_seed, EnvError, Environment, GameState};
use crate::recording::RecordingError;
use crate::render::quantize_depth;
use crate::scenario::Mode;

use super::connection::{ConnError, Connection};
use super::wire::{ConfigMsg, FrameMsg, WireMessage};

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("spectating needs a spectator mode, config has {0}")]
    NotSpectatorMode(Mode),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Recording(#[from] RecordingError),
}

#[derive(Debug, Clone)]
pub struct ServeOptions {
    /// Stop after this many episodes; `None` runs until shutdown.
    pub episodes: Option<usize>,
    /// Recording path of the first episode; episode k > 1 goes to
    /// `<stem>.<k>.<ext>`.
    pub record: Option<PathBuf>,
    /// Master seed for episode seeds; `None` uses the config's sequence.
    pub seed: Option<u64>,
    /// How long a new client has to send HELLO.
    pub handshake_timeout: Duration,
}

impl Default for ServeOptions {
    fn default() -> Self {
        ServeOptions { episodes: None, record: None, seed: None, handshake_timeout: Duration::from_secs(5) }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ServeSummary {
    pub episodes: usize,
    pub decisions: u64,
    pub frames_sent: u64,
    pub inputs_applied: u64,
    pub recordings: Vec<PathBuf>,
}

/// Recording path for the `k`-th episode (1-based).
pub fn recording_path(base: &Path, k: usize) -> PathBuf {
    if k <= 1 {
        return base.to_path_buf();
    }
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}.{k}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{k}"),
    };
    base.with_file_name(name)
}

#[derive(Default)]
struct HubState {
    out: Option<Sender<WireMessage>>,
    client: u64,
    /// FRAME awaiting its INPUT in synchronous mode.
    pending: Option<(u32, WireMessage)>,
    sync_input: Option<u16>,
    latched: u16,
    frames_sent: u64,
    inputs_applied: u64,
}

/// Single-slot mailbox between the network side and the simulation.
struct Hub {
    mode: Mode,
    buttons: usize,
    config: ConfigMsg,
    state: Mutex<HubState>,
    changed: Condvar,
    shutdown: AtomicBool,
}

impl Hub {
    fn lock(&self) -> MutexGuard<'_, HubState> {
        self.state.lock().expect("hub lock poisoned")
    }

    fn send(&self, st: &mut HubState, msg: WireMessage) {
        if let Some(out) = &st.out {
            if matches!(msg, WireMessage::Frame(_)) {
                st.frames_sent += 1;
            }
            let _ = out.send(msg);
        }
    }

    fn broadcast(&self, msg: WireMessage) {
        let mut st = self.lock();
        self.send(&mut st, msg);
    }

    fn wait_for_client(&self) -> bool {
        let st = self.lock();
        let st = self
            .changed
            .wait_while(st, |s| s.out.is_none() && !self.shutdown.load(Ordering::SeqCst))
            .expect("hub lock poisoned");
        st.out.is_some()
    }

    /// Validated INPUT from the current client.
    fn on_input(&self, buttons: u16, client_tick: u32) {
        let mut st = self.lock();
        if self.mode.is_async() {
            st.latched = buttons;
            st.inputs_applied += 1;
        } else if matches!(st.pending, Some((tick, _)) if tick == client_tick) && st.sync_input.is_none() {
            st.sync_input = Some(buttons);
            st.inputs_applied += 1;
            self.changed.notify_all();
        }
    }

    fn connect(&self, out: Sender<WireMessage>) -> Option<u64> {
        let mut st = self.lock();
        if st.out.is_some() {
            return None;
        }
        st.client += 1;
        let _ = out.send(WireMessage::Config(self.config.clone()));
        if let Some((_, frame)) = &st.pending {
            let _ = out.send(frame.clone());
            st.frames_sent += 1;
        }
        st.out = Some(out);
        self.changed.notify_all();
        Some(st.client)
    }

    fn disconnect(&self, client: u64) {
        let mut st = self.lock();
        if st.client == client {
            st.out = None;
            st.latched = 0;
        }
        self.changed.notify_all();
    }

    fn stop(&self) {
        self.shutdown.store(true, Ordering::SeqCst);
        self.changed.notify_all();
    }
}

fn frame_message(state: &GameState) -> WireMessage {
    WireMessage::Frame(FrameMsg {
        tick: state.tick,
        width: state.width as u16,
        height: state.height as u16,
        channels: state.channels.count() as u8,
        image: state.image_buffer.clone(),
        depth8: state.depth.as_ref().map(|d| d.iter().map(|&v| quantize_depth(v)).collect()),
        variables: state.game_variables.iter().map(|&(_, v)| v).collect(),
    })
}

/// Action provider fed by the connected client.
struct HubProvider(Arc<Hub>);

impl crate::env::ActionProvider for HubProvider {
    fn decide(&mut self, state: &GameState) -> Option<ButtonSet> {
        let hub = &self.0;
        let frame = frame_message(state);
        let mut st = hub.lock();
        if hub.mode.is_async() {
            hub.send(&mut st, frame);
            return ButtonSet::from_mask(st.latched, hub.buttons);
        }
        st.pending = Some((state.tick, frame.clone()));
        st.sync_input = None;
        hub.send(&mut st, frame);
        let mut st = hub
            .changed
            .wait_while(st, |s| s.sync_input.is_none() && !hub.shutdown.load(Ordering::SeqCst))
            .expect("hub lock poisoned");
        st.pending = None;
        let mask = st.sync_input.take()?;
        ButtonSet::from_mask(mask, hub.buttons)
    }
}

/// Asks a running server to stop.
#[derive(Clone)]
pub struct ShutdownHandle {
    hub: Arc<Hub>,
    addr: SocketAddr,
}

impl ShutdownHandle {
    pub fn shutdown(&self) {
        self.hub.stop();
        // Wakes the blocking accept.
        let _ = TcpStream::connect_timeout(&self.addr, Duration::from_millis(200));
    }
}

/// One-client spectator server. Frames go out once per decision point and
/// client INPUT drives the environment's action provider.
pub struct SpectateServer {
    env: Environment,
    listener: TcpListener,
    hub: Arc<Hub>,
    options: ServeOptions,
}

impl SpectateServer {
    pub fn bind(env: Environment, addr: impl ToSocketAddrs, options: ServeOptions) -> Result<Self, ServeError> {
        let mode = env.mode();
        if !mode.is_spectator() {
            return Err(ServeError::NotSpectatorMode(mode));
        }
        let cfg = env.config();
        let scenario = env.scenario();
        let config = ConfigMsg {
            width: cfg.resolution.0 as u16,
            height: cfg.resolution.1 as u16,
            channels: cfg.channels.count() as u8,
            mode,
            skipcount: cfg.default_skipcount as u16,
            buttons: scenario.buttons.iter().map(|b| b.to_string()).collect(),
            variables: scenario.variables.iter().map(|v| v.to_string()).collect(),
        };
        let hub = Arc::new(Hub {
            mode,
            buttons: scenario.buttons.len(),
            config,
            state: Mutex::new(HubState::default()),
            changed: Condvar::new(),
            shutdown: AtomicBool::new(false),
        });
        let listener = TcpListener::bind(addr)?;
        Ok(SpectateServer { env, listener, hub, options })
    }

    pub fn local_addr(&self) -> std::io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    pub fn shutdown_handle(&self) -> ShutdownHandle {
        ShutdownHandle { hub: Arc::clone(&self.hub), addr: self.listener.local_addr().expect("bound listener") }
    }

    /// Serves episodes until the episode budget is spent or shutdown.
    pub fn run(self) -> Result<ServeSummary, ServeError> {
        let SpectateServer { env, listener, hub, options } = self;
        let acceptor = spawn_acceptor(listener, Arc::clone(&hub), options.handshake_timeout);
        env.record_action_provider(Box::new(HubProvider(Arc::clone(&hub))))?;
        env.set_recording(options.record.is_some());
        let result = drive(&env, &hub, &options);
        let addr = acceptor.1;
        ShutdownHandle { hub: Arc::clone(&hub), addr }.shutdown();
        let _ = acceptor.0.join();
        result
    }
}

fn drive(env: &Environment, hub: &Hub, options: &ServeOptions) -> Result<ServeSummary, ServeError> {
    let mut summary = ServeSummary::default();
    if !hub.wait_for_client() {
        return Ok(summary);
    }
    let mut episode = 0usize;
    while options.episodes.map_or(true, |n| episode < n) && !hub.shutdown.load(Ordering::SeqCst) {
        let seed = options.seed.map(|s| episode_seed(s, episode as u64));
        env.new_episode(seed);
        episode += 1;
        loop {
            match env.spectate_step() {
                Ok(obs) => {
                    summary.decisions += 1;
                    let mut st = hub.lock();
                    for e in obs.events {
                        hub.send(&mut st, WireMessage::Event(e));
                    }
                }
                Err(EnvError::EpisodeFinished) => break,
                Err(EnvError::ProviderClosed) => return Ok(finish(hub, summary)),
                Err(e) => return Err(e.into()),
            }
            if env.is_episode_finished() {
                break;
            }
        }
        hub.broadcast(WireMessage::EpisodeEnd {
            total_reward: env.get_total_reward(),
            total_score: env.get_total_score(),
            cause: env.terminal_cause(),
            ticks: env.tick(),
        });
        summary.episodes += 1;
        if let (Some(base), Some(rec)) = (&options.record, env.take_recording()) {
            let path = recording_path(base, episode);
            rec.save(&path)?;
            summary.recordings.push(path);
        }
    }
    Ok(finish(hub, summary))
}

fn finish(hub: &Hub, mut summary: ServeSummary) -> ServeSummary {
    let st = hub.lock();
    summary.frames_sent = st.frames_sent;
    summary.inputs_applied = st.inputs_applied;
    summary
}

fn spawn_acceptor(listener: TcpListener, hub: Arc<Hub>, timeout: Duration) -> (JoinHandle<()>, SocketAddr) {
    let addr = listener.local_addr().expect("bound listener");
    let handle = std::thread::spawn(move || {
        let mut clients: Vec<JoinHandle<()>> = Vec::new();
        for stream in listener.incoming() {
            if hub.shutdown.load(Ordering::SeqCst) {
                break;
            }
            let Ok(stream) = stream else { continue };
            let hub = Arc::clone(&hub);
            clients.push(std::thread::spawn(move || serve_client(stream, hub, timeout)));
            clients.retain(|c| !c.is_finished());
        }
        for c in clients {
            let _ = c.join();
        }
    });
    (handle, addr)
}

/// Handshake then the client's I/O loop: outgoing messages are flushed
/// between short reads.
fn serve_client(stream: TcpStream, hub: Arc<Hub>, timeout: Duration) {
    let Ok(mut conn) = Connection::accept(stream, timeout) else { return };
    match conn.recv(timeout) {
        Ok(Some(WireMessage::Hello { .. })) => {}
        Ok(_) => {
            let _ = conn.send(&WireMessage::Error { message: "expected HELLO".into() });
            conn.close();
            return;
        }
        Err(e) => {
            let _ = conn.send(&WireMessage::Error { message: e.to_string() });
            conn.close();
            return;
        }
    }
    let (tx, rx): (Sender<WireMessage>, Receiver<WireMessage>) = mpsc::channel();
    let Some(client) = hub.connect(tx) else {
        let _ = conn.send(&WireMessage::Error { message: "another client is connected".into() });
        conn.close();
        return;
    };
    let outcome = client_loop(&mut conn, &hub, &rx);
    if let Err(ConnError::Protocol(message)) = outcome {
        let _ = conn.send(&WireMessage::Error { message });
    }
    hub.disconnect(client);
    conn.close();
}

fn client_loop(conn: &mut Connection, hub: &Hub, rx: &Receiver<WireMessage>) -> Result<(), ConnError> {
    let declared: u16 = ((1u32 << hub.buttons) - 1) as u16;
    loop {
        if hub.shutdown.load(Ordering::SeqCst) {
            while let Ok(msg) = rx.try_recv() {
                conn.send(&msg)?;
            }
            return Ok(());
        }
        while let Ok(msg) = rx.try_recv() {
            conn.send(&msg)?;
        }
        match conn.recv(Duration::from_millis(2))? {
            None => {}
            Some(WireMessage::Input { buttons, client_tick }) => {
                if buttons & !declared != 0 {
                    return Err(ConnError::Protocol(format!("INPUT bitmask {buttons:#06x} presses undeclared buttons")));
                }
                hub.on_input(buttons, client_tick);
            }
            Some(WireMessage::Hello { .. }) => {}
            Some(other) => return Err(ConnError::Protocol(format!("unexpected {:?} from client", other.tag()))),
        }
    }
}
