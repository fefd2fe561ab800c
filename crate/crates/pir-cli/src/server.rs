//! The networked PIR server: a stateless answer function behind the wire
//! protocol.

use std::io::BufReader;
use std::net::{TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use pir_core::bits::Database;
use pir_core::scheme::SchemeKind;

use crate::wire::{
    pack_bits, read_message, scheme_wire_id, unpack_bits, write_message, Hello, WireMessage,
    ERR_BAD_LENGTH, ERR_MALFORMED, ERR_SCHEME_MISMATCH, MSG_HELLO, MSG_HELLO_ACK, MSG_QUERY,
};

struct ServerCtx {
    kind: SchemeKind,
    db: Database,
    t: usize,
    ell: usize,
}

/// A bound listener plus the immutable database snapshot it serves.
pub struct PirServer {
    listener: TcpListener,
    ctx: Arc<ServerCtx>,
}

/// Handle for a server running on a background thread.
pub struct RunningServer {
    pub addr: std::net::SocketAddr,
    stop: Arc<AtomicBool>,
    handle: Option<thread::JoinHandle<()>>,
}

impl RunningServer {
    pub fn shutdown(mut self) {
        self.stop.store(true, Ordering::SeqCst);
        if let Some(handle) = self.handle.take() {
            let _ = handle.join();
        }
    }
}

impl Drop for RunningServer {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        if let Some(handle) = self.handle.take() {
            let _ = handle.join();
        }
    }
}

impl PirServer {
    /// Binds to `addr`; the database is arranged (and zero-padded) for the
    /// scheme here.
    pub fn bind<A: ToSocketAddrs>(
        addr: A,
        kind: SchemeKind,
        db: Database,
    ) -> std::io::Result<Self> {
        let params = kind
            .scheme()
            .params(db.arranged_len())
            .expect("arranged database always matches its scheme");
        let listener = TcpListener::bind(addr)?;
        Ok(PirServer {
            listener,
            ctx: Arc::new(ServerCtx {
                kind,
                db,
                t: params.t,
                ell: params.ell,
            }),
        })
    }

    pub fn local_addr(&self) -> std::io::Result<std::net::SocketAddr> {
        self.listener.local_addr()
    }

    /// Serves forever on the current thread.
    pub fn run(self) -> std::io::Result<()> {
        for stream in self.listener.incoming() {
            let stream = stream?;
            let ctx = Arc::clone(&self.ctx);
            thread::spawn(move || handle_connection(stream, &ctx));
        }
        Ok(())
    }

    /// Serves on a background thread; the returned handle stops the accept
    /// loop when dropped.
    pub fn spawn(self) -> std::io::Result<RunningServer> {
        let addr = self.local_addr()?;
        let stop = Arc::new(AtomicBool::new(false));
        let stop_flag = Arc::clone(&stop);
        self.listener.set_nonblocking(true)?;
        let listener = self.listener;
        let ctx = self.ctx;
        let handle = thread::spawn(move || {
            while !stop_flag.load(Ordering::SeqCst) {
                match listener.accept() {
                    Ok((stream, _)) => {
                        let _ = stream.set_nonblocking(false);
                        let ctx = Arc::clone(&ctx);
                        thread::spawn(move || handle_connection(stream, &ctx));
                    }
                    Err(e) if e.kind() == std::io::ErrorKind::WouldBlock => {
                        thread::sleep(Duration::from_millis(2));
                    }
                    Err(_) => break,
                }
            }
        });
        Ok(RunningServer {
            addr,
            stop,
            handle: Some(handle),
        })
    }
}

/// Answers messages until the peer hangs up. The server never learns the
/// queried index: the only index-dependent bytes it sees are the query bits.
fn handle_connection(stream: TcpStream, ctx: &ServerCtx) {
    let mut writer = match stream.try_clone() {
        Ok(w) => w,
        Err(_) => return,
    };
    let mut reader = BufReader::new(stream);
    loop {
        let msg = match read_message(&mut reader) {
            Ok(msg) => msg,
            Err(_) => return, // disconnect or unparseable stream
        };
        let reply = respond(&msg, ctx);
        if write_message(&mut writer, &reply).is_err() {
            return;
        }
    }
}

fn respond(msg: &WireMessage, ctx: &ServerCtx) -> WireMessage {
    match msg.msg_type {
        MSG_HELLO => {
            let hello = match Hello::from_bytes(&msg.payload) {
                Ok(h) => h,
                Err(_) => return WireMessage::error(ERR_MALFORMED),
            };
            let ours = scheme_wire_id(ctx.kind);
            let mismatch = (hello.scheme != 0 && hello.scheme != ours)
                || (hello.n != 0 && hello.n != ctx.db.message_len() as u64)
                || (hello.t != 0 && hello.t != ctx.t as u32)
                || (hello.ell != 0 && hello.ell != ctx.ell as u32);
            if mismatch {
                return WireMessage::error(ERR_SCHEME_MISMATCH);
            }
            let ack = Hello {
                scheme: ours,
                n: ctx.db.message_len() as u64,
                t: ctx.t as u32,
                ell: ctx.ell as u32,
            };
            WireMessage::new(MSG_HELLO_ACK, ack.to_bytes())
        }
        MSG_QUERY => {
            if msg.payload.len() != ctx.t.div_ceil(8) {
                return WireMessage::error(ERR_BAD_LENGTH);
            }
            let query = match unpack_bits(&msg.payload, ctx.t) {
                Ok(q) => q,
                Err(_) => return WireMessage::error(ERR_MALFORMED),
            };
            match ctx.kind.scheme().answer(&ctx.db, &query) {
                Ok(answer) => WireMessage::new(crate::wire::MSG_ANSWER, pack_bits(&answer)),
                Err(_) => WireMessage::error(ERR_MALFORMED),
            }
        }
        _ => WireMessage::error(ERR_MALFORMED),
    }
}
