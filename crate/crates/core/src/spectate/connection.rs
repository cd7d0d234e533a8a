use std::io::{self, Read, Write};
use std::net::TcpStream;
use std::time::Duration;

use thiserror::Error;
use tungstenite::{Message, WebSocket};

use super::wire::{decode, encode, WireError, WireMessage};

#[derive(Debug, Error)]
pub enum ConnError {
    #[error("client disconnected")]
    Closed,
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl From<WireError> for ConnError {
    fn from(e: WireError) -> Self {
        ConnError::Protocol(e.to_string())
    }
}

fn timed_out(e: &io::Error) -> bool {
    matches!(e.kind(), io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut)
}

/// A client socket speaking either raw framing or the same frames inside
/// binary websocket messages.
pub enum Connection {
    Raw { stream: TcpStream, buf: Vec<u8> },
    WebSocket(Box<WebSocket<TcpStream>>),
}

impl Connection {
    /// Sniffs the first bytes: an HTTP `GET` starts the websocket upgrade,
    /// anything else is raw framing.
    pub fn accept(stream: TcpStream, timeout: Duration) -> Result<Connection, ConnError> {
        stream.set_nodelay(true)?;
        stream.set_read_timeout(Some(timeout))?;
        let mut head = [0u8; 4];
        let mut seen = 0;
        while seen < head.len() {
            let n = stream.peek(&mut head)?;
            if n == 0 {
                return Err(ConnError::Closed);
            }
            if n == seen {
                std::thread::sleep(Duration::from_millis(2));
            }
            seen = n;
            if &head[..n] != &b"GET "[..n] {
                break;
            }
        }
        if &head == b"GET " {
            let ws = tungstenite::accept(stream).map_err(|e| ConnError::Protocol(format!("websocket upgrade: {e}")))?;
            Ok(Connection::WebSocket(Box::new(ws)))
        } else {
            Ok(Connection::Raw { stream, buf: Vec::new() })
        }
    }

    fn stream(&self) -> &TcpStream {
        match self {
            Connection::Raw { stream, .. } => stream,
            Connection::WebSocket(ws) => ws.get_ref(),
        }
    }

    pub fn send(&mut self, msg: &WireMessage) -> Result<(), ConnError> {
        let bytes = encode(msg);
        match self {
            Connection::Raw { stream, .. } => stream.write_all(&bytes).map_err(ConnError::Io),
            Connection::WebSocket(ws) => ws.send(Message::Binary(bytes)).map_err(ws_error),
        }
    }

    /// Waits up to `timeout` for one message; `Ok(None)` when none arrived.
    pub fn recv(&mut self, timeout: Duration) -> Result<Option<WireMessage>, ConnError> {
        self.stream().set_read_timeout(Some(timeout))?;
        match self {
            Connection::Raw { stream, buf } => loop {
                match decode(buf) {
                    Ok((msg, used)) => {
                        buf.drain(..used);
                        return Ok(Some(msg));
                    }
                    Err(WireError::TruncatedMessage) => {}
                    Err(e) => return Err(e.into()),
                }
                let mut chunk = [0u8; 16 * 1024];
                match stream.read(&mut chunk) {
                    Ok(0) => return Err(ConnError::Closed),
                    Ok(n) => buf.extend_from_slice(&chunk[..n]),
                    Err(e) if timed_out(&e) => return Ok(None),
                    Err(e) => return Err(e.into()),
                }
            },
            Connection::WebSocket(ws) => loop {
                match ws.read() {
                    Ok(Message::Binary(data)) => {
                        let (msg, used) = decode(&data)?;
                        if used != data.len() {
                            return Err(ConnError::Protocol("one message per websocket frame".into()));
                        }
                        return Ok(Some(msg));
                    }
                    Ok(Message::Close(_)) => return Err(ConnError::Closed),
                    Ok(Message::Text(_)) => return Err(ConnError::Protocol("text websocket message".into())),
                    Ok(_) => continue,
                    Err(e) => {
                        return match e {
                            tungstenite::Error::Io(ref io) if timed_out(io) => Ok(None),
                            e => Err(ws_error(e)),
                        }
                    }
                }
            },
        }
    }

    pub fn close(&mut self) {
        match self {
            Connection::Raw { stream, .. } => {
                let _ = stream.shutdown(std::net::Shutdown::Both);
            }
            Connection::WebSocket(ws) => {
                let _ = ws.close(None);
                let _ = ws.flush();
                let _ = ws.get_ref().shutdown(std::net::Shutdown::Both);
            }
        }
    }
}

fn ws_error(e: tungstenite::Error) -> ConnError {
    match e {
        tungstenite::Error::ConnectionClosed | tungstenite::Error::AlreadyClosed => ConnError::Closed,
        tungstenite::Error::Io(io) => ConnError::Io(io),
        other => ConnError::Protocol(other.to_string()),
    }
}
