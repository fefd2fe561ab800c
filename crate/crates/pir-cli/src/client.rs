//! The networked PIR user: queries two servers concurrently and
//! reconstructs locally, exactly as the in-process protocol does.

use std::io::BufReader;
use std::net::{SocketAddr, TcpStream, ToSocketAddrs};
use std::time::Duration;

use pir_core::bits::BitString;
use pir_core::scheme::{SchemeKind, Transcript};

use crate::wire::{
    pack_bits, read_message, scheme_from_wire_id, unpack_bits, write_message, Hello, WireMessage,
    MSG_ANSWER, MSG_ERROR, MSG_HELLO, MSG_HELLO_ACK, MSG_QUERY,
};

/// Default per-operation network timeout; `PIR_TIMEOUT_MS` overrides it.
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(5);

/// Reads the timeout from `PIR_TIMEOUT_MS`, falling back to the default.
pub fn timeout_from_env() -> Duration {
    std::env::var("PIR_TIMEOUT_MS")
        .ok()
        .and_then(|v| v.parse::<u64>().ok())
        .map(Duration::from_millis)
        .unwrap_or(DEFAULT_TIMEOUT)
}

#[derive(Debug, thiserror::Error)]
pub enum NetError {
    #[error("timed out talking to {0}")]
    Timeout(String),
    #[error("parameter mismatch: {0}")]
    ParameterMismatch(String),
    #[error("transport failure: {0}")]
    Transport(std::io::Error),
    #[error("protocol violation: {0}")]
    Protocol(String),
    #[error("server reported error code {0:#04x}")]
    ServerError(u8),
}

fn classify_io(err: std::io::Error, peer: &str) -> NetError {
    match err.kind() {
        std::io::ErrorKind::WouldBlock | std::io::ErrorKind::TimedOut => {
            NetError::Timeout(peer.to_string())
        }
        _ => NetError::Transport(err),
    }
}

/// Scheme parameters a server announces in its HELLO_ACK.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ServerInfo {
    pub kind: SchemeKind,
    /// Message length, before padding.
    pub n: usize,
    pub t: usize,
    pub ell: usize,
}

impl ServerInfo {
    /// The arranged (padded) database length implied by the query size.
    pub fn arranged_len(&self) -> Result<usize, NetError> {
        match self.kind {
            SchemeKind::Square => Ok(self.t * self.t),
            SchemeKind::Cube => {
                if !self.t.is_multiple_of(3) {
                    return Err(NetError::Protocol(format!(
                        "cube scheme with t = {} not divisible by 3",
                        self.t
                    )));
                }
                let side = self.t / 3;
                Ok(side * side * side)
            }
        }
    }
}

/// One server connection after a successful HELLO exchange.
pub struct ServerConn {
    peer: String,
    reader: BufReader<TcpStream>,
    writer: TcpStream,
    pub info: ServerInfo,
}

impl ServerConn {
    pub fn connect(addr: &str, timeout: Duration) -> Result<Self, NetError> {
        let sockaddr: SocketAddr = addr
            .to_socket_addrs()
            .map_err(|e| classify_io(e, addr))?
            .next()
            .ok_or_else(|| NetError::Protocol(format!("cannot resolve {addr}")))?;
        let stream =
            TcpStream::connect_timeout(&sockaddr, timeout).map_err(|e| classify_io(e, addr))?;
        stream
            .set_read_timeout(Some(timeout))
            .map_err(NetError::Transport)?;
        stream
            .set_write_timeout(Some(timeout))
            .map_err(NetError::Transport)?;
        let writer = stream.try_clone().map_err(NetError::Transport)?;
        let mut conn = ServerConn {
            peer: addr.to_string(),
            reader: BufReader::new(stream),
            writer,
            info: ServerInfo {
                kind: SchemeKind::Square,
                n: 0,
                t: 0,
                ell: 0,
            },
        };
        conn.info = conn.hello()?;
        Ok(conn)
    }

    fn roundtrip(&mut self, msg: &WireMessage) -> Result<WireMessage, NetError> {
        write_message(&mut self.writer, msg).map_err(|e| self.classify_wire(e))?;
        read_message(&mut self.reader).map_err(|e| self.classify_wire(e))
    }

    fn classify_wire(&self, err: crate::wire::WireError) -> NetError {
        match err {
            crate::wire::WireError::Io(e) => classify_io(e, &self.peer),
            crate::wire::WireError::Malformed(m) => NetError::Protocol(m),
            crate::wire::WireError::TooLarge(n) => {
                NetError::Protocol(format!("oversized frame ({n} bytes)"))
            }
        }
    }

    fn hello(&mut self) -> Result<ServerInfo, NetError> {
        let reply = self.roundtrip(&WireMessage::new(MSG_HELLO, Hello::any().to_bytes()))?;
        match reply.msg_type {
            MSG_HELLO_ACK => {
                let ack = Hello::from_bytes(&reply.payload)
                    .map_err(|_| NetError::Protocol("bad HELLO_ACK payload".into()))?;
                let kind = scheme_from_wire_id(ack.scheme).ok_or_else(|| {
                    NetError::Protocol(format!("unknown scheme id {:#04x}", ack.scheme))
                })?;
                Ok(ServerInfo {
                    kind,
                    n: ack.n as usize,
                    t: ack.t as usize,
                    ell: ack.ell as usize,
                })
            }
            MSG_ERROR => Err(NetError::ServerError(*reply.payload.first().unwrap_or(&0))),
            other => Err(NetError::Protocol(format!(
                "unexpected reply type {other:#04x}"
            ))),
        }
    }

    /// Sends one query and returns the unpacked `ell`-bit answer.
    pub fn query(&mut self, query: &BitString) -> Result<BitString, NetError> {
        let reply = self.roundtrip(&WireMessage::new(MSG_QUERY, pack_bits(query)))?;
        match reply.msg_type {
            MSG_ANSWER => unpack_bits(&reply.payload, self.info.ell)
                .map_err(|_| NetError::Protocol("bad ANSWER payload".into())),
            MSG_ERROR => Err(NetError::ServerError(*reply.payload.first().unwrap_or(&0))),
            other => Err(NetError::Protocol(format!(
                "unexpected reply type {other:#04x}"
            ))),
        }
    }
}

/// Two validated server connections; reusable across queries.
pub struct RemoteSession {
    pub info: ServerInfo,
    arranged_n: usize,
    conn0: ServerConn,
    conn1: ServerConn,
}

impl RemoteSession {
    /// Connects to both servers and cross-checks their announced parameters.
    pub fn connect(addr0: &str, addr1: &str, timeout: Duration) -> Result<Self, NetError> {
        let conn0 = ServerConn::connect(addr0, timeout)?;
        let conn1 = ServerConn::connect(addr1, timeout)?;
        if conn0.info != conn1.info {
            return Err(NetError::ParameterMismatch(format!(
                "server 0 announced {:?}, server 1 announced {:?}",
                conn0.info, conn1.info
            )));
        }
        let info = conn0.info;
        let arranged_n = info.arranged_len()?;
        Ok(RemoteSession {
            info,
            arranged_n,
            conn0,
            conn1,
        })
    }

    pub fn randomness_len(&self) -> usize {
        // Both schemes consume exactly t random bits.
        self.info.t
    }

    /// Runs one retrieval: both queries are issued concurrently, and the
    /// reconstruction is exactly the local protocol's. No partial answers
    /// are accepted.
    pub fn query(&mut self, index: usize, randomness: &BitString) -> Result<Transcript, NetError> {
        if index >= self.info.n {
            return Err(NetError::Protocol(format!(
                "index {index} out of range for n = {}",
                self.info.n
            )));
        }
        let scheme = self.info.kind.scheme();
        let (q0, q1) = scheme
            .queries(self.arranged_n, index, randomness)
            .map_err(|e| NetError::Protocol(e.to_string()))?;

        let (r0, r1) = std::thread::scope(|scope| {
            let h0 = scope.spawn(|| self.conn0.query(&q0));
            let r1 = self.conn1.query(&q1);
            (h0.join().expect("query thread panicked"), r1)
        });
        let a0 = r0?;
        let a1 = r1?;

        let (s0, s1) = scheme
            .selections(self.arranged_n, index)
            .map_err(|e| NetError::Protocol(e.to_string()))?;
        let output = scheme
            .reconstruct(self.arranged_n, index, &a0, &a1)
            .map_err(|e| NetError::Protocol(e.to_string()))?;
        Ok(Transcript {
            index,
            randomness: randomness.clone(),
            q0,
            q1,
            a0,
            a1,
            s0,
            s1,
            output,
        })
    }
}

/// One-shot retrieval over fresh connections.
pub fn remote_query(
    index: usize,
    addr0: &str,
    addr1: &str,
    randomness: &BitString,
    timeout: Duration,
) -> Result<Transcript, NetError> {
    RemoteSession::connect(addr0, addr1, timeout)?.query(index, randomness)
}
