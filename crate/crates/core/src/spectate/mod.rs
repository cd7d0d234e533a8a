//! Spectator service: streams frames to one client over a socket and feeds
//! its button presses to the environment.

mod connection;
mod server;
pub mod wire;

pub use connection::{ConnError, Connection};
pub use server::{recording_path, ServeError, ServeOptions, ServeSummary, ShutdownHandle, SpectateServer};
pub use wire::{decode, encode, ConfigMsg, FrameMsg, Tag, WireError, WireMessage, PROTOCOL_VERSION};

use std::net::Ipv4Addr;

use crate::env::Environment;

/// Serves `env` on localhost `port` until its episode budget is spent.
pub fn serve(env: Environment, port: u16, options: ServeOptions) -> Result<ServeSummary, ServeError> {
    SpectateServer::bind(env, (Ipv4Addr::LOCALHOST, port), options)?.run()
}
