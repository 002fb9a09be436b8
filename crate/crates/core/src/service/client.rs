//! Client side of a service: spawning, readiness, id-matched requests and
//! shutdown with kill escalation.

use std::collections::HashMap;
use std::fmt;
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Read, Write};
use std::os::unix::ffi::OsStrExt;
use std::os::unix::fs::{FileTypeExt, OpenOptionsExt};
use std::os::unix::io::AsRawFd;
use std::path::{Path, PathBuf};
use std::process::{Child, Command, ExitStatus, Stdio};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::mpsc::{self, RecvTimeoutError};
use std::sync::{Arc, Mutex, MutexGuard};
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use log::{debug, warn};
use serde_json::{json, Value};
use thiserror::Error;

use super::frame::{read_frame, write_frame, Frame, FrameError, ReadOutcome};
use super::{OP_ERROR, OP_READY, OP_SHUTDOWN};
use crate::config::{Config, Transport};

const POLL_SLICE: Duration = Duration::from_millis(20);
const STDERR_TAIL_BYTES: usize = 8 * 1024;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("service failed to start: {0}")]
    SpawnFailed(String),
    #[error("service not ready after {0:?}")]
    ReadyTimeout(Duration),
    #[error("request timed out after {0:?}")]
    Timeout(Duration),
    #[error("service connection is broken")]
    BrokenPipe,
    #[error("service error: {0}")]
    Remote(String),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ServiceState {
    Starting,
    Ready,
    Stopping,
    Dead,
}

impl fmt::Display for ServiceState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ServiceState::Starting => "starting",
            ServiceState::Ready => "ready",
            ServiceState::Stopping => "stopping",
            ServiceState::Dead => "dead",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SpawnOptions {
    pub exe: PathBuf,
    pub config: Config,
    pub ready_timeout: Duration,
    /// How long `shutdown` waits for a graceful exit before killing.
    pub shutdown_grace: Duration,
}

impl SpawnOptions {
    pub fn new(exe: impl Into<PathBuf>, config: Config) -> Self {
        let ready_timeout = config.ready_timeout();
        SpawnOptions {
            exe: exe.into(),
            config,
            ready_timeout,
            shutdown_grace: Duration::from_secs(5),
        }
    }
}

struct Shared {
    state: Mutex<ServiceState>,
    pending: Mutex<HashMap<u64, mpsc::Sender<Frame>>>,
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|e| e.into_inner())
}

impl Shared {
    fn state(&self) -> ServiceState {
        *lock(&self.state)
    }

    fn set_state(&self, s: ServiceState) {
        *lock(&self.state) = s;
    }

    fn mark_dead(&self) {
        let mut pending = lock(&self.pending);
        self.set_state(ServiceState::Dead);
        pending.clear();
    }
}

struct ChildSlot {
    child: Option<Child>,
    status: Option<ExitStatus>,
}

/// A running service process.
pub struct ServiceHandle {
    shared: Arc<Shared>,
    writer: Mutex<Option<Box<dyn Write + Send>>>,
    child: Mutex<ChildSlot>,
    reader: Mutex<Option<JoinHandle<()>>>,
    next_id: AtomicU64,
    pid: u32,
    load_time: Duration,
    fifos: Option<(PathBuf, PathBuf)>,
    created_fifos: Vec<PathBuf>,
    shutdown_grace: Duration,
    stderr_tail: Arc<Mutex<String>>,
    _workdir: tempfile::TempDir,
}

impl fmt::Debug for ServiceHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ServiceHandle")
            .field("pid", &self.pid)
            .field("state", &self.state())
            .field("load_time", &self.load_time)
            .field("fifos", &self.fifos)
            .finish()
    }
}

fn make_fifo(path: &Path) -> io::Result<bool> {
    if let Ok(meta) = fs::metadata(path) {
        if meta.file_type().is_fifo() {
            return Ok(false);
        }
        return Err(io::Error::new(
            io::ErrorKind::AlreadyExists,
            format!("{} exists and is not a fifo", path.display()),
        ));
    }
    let c = std::ffi::CString::new(path.as_os_str().as_bytes())
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e))?;
    // SAFETY: `c` is a valid NUL-terminated path.
    if unsafe { libc::mkfifo(c.as_ptr(), 0o600) } != 0 {
        return Err(io::Error::last_os_error());
    }
    Ok(true)
}

fn set_blocking(f: &File) -> io::Result<()> {
    let fd = f.as_raw_fd();
    // SAFETY: fcntl on an fd we own.
    unsafe {
        let flags = libc::fcntl(fd, libc::F_GETFL);
        if flags < 0 || libc::fcntl(fd, libc::F_SETFL, flags & !libc::O_NONBLOCK) < 0 {
            return Err(io::Error::last_os_error());
        }
    }
    Ok(())
}

fn poll_readable(f: &File, timeout: Duration) -> io::Result<bool> {
    let mut pfd = libc::pollfd {
        fd: f.as_raw_fd(),
        events: libc::POLLIN,
        revents: 0,
    };
    // SAFETY: one valid pollfd.
    let n = unsafe { libc::poll(&mut pfd, 1, timeout.as_millis() as libc::c_int) };
    if n < 0 {
        let e = io::Error::last_os_error();
        if e.kind() == io::ErrorKind::Interrupted {
            return Ok(false);
        }
        return Err(e);
    }
    Ok(n > 0 && pfd.revents & (libc::POLLIN | libc::POLLHUP) != 0)
}

fn spawn_failed(child: &mut Child, tail: &Mutex<String>, what: &str) -> ServiceError {
    let _ = child.kill();
    let status = child.wait().ok();
    // give the stderr drain a moment to catch the last lines
    thread::sleep(Duration::from_millis(50));
    let tail = lock(tail).trim().to_string();
    let status = status.map_or_else(|| "unknown".to_string(), |s| s.to_string());
    ServiceError::SpawnFailed(format!("{what} (exit: {status}) {tail}").trim().to_string())
}

/// Waits for the fifo pair to connect. The read end is opened
/// non-blocking first so the child's blocking open of its write end
/// succeeds; the write end is retried until the child opens its read end.
fn connect_fifos(
    child: &mut Child,
    tail: &Mutex<String>,
    fifo_in: &Path,
    fifo_out: &Path,
    deadline: Instant,
    ready_timeout: Duration,
) -> Result<(File, File), ServiceError> {
    let reader = OpenOptions::new()
        .read(true)
        .custom_flags(libc::O_NONBLOCK)
        .open(fifo_out)?;
    let writer = loop {
        match OpenOptions::new()
            .write(true)
            .custom_flags(libc::O_NONBLOCK)
            .open(fifo_in)
        {
            Ok(f) => break f,
            Err(e) if e.raw_os_error() == Some(libc::ENXIO) => {}
            Err(e) => return Err(e.into()),
        }
        if child.try_wait()?.is_some() {
            return Err(spawn_failed(child, tail, "service exited before opening its pipes"));
        }
        if Instant::now() >= deadline {
            let _ = child.kill();
            let _ = child.wait();
            return Err(ServiceError::ReadyTimeout(ready_timeout));
        }
        thread::sleep(POLL_SLICE);
    };
    // The ready sentinel is the first byte the child writes; until then a
    // blocking read on a writer-less fifo would report EOF.
    while !poll_readable(&reader, POLL_SLICE)? {
        if child.try_wait()?.is_some() {
            return Err(spawn_failed(child, tail, "service exited before becoming ready"));
        }
        if Instant::now() >= deadline {
            let _ = child.kill();
            let _ = child.wait();
            return Err(ServiceError::ReadyTimeout(ready_timeout));
        }
    }
    set_blocking(&reader)?;
    set_blocking(&writer)?;
    Ok((writer, reader))
}

fn reader_loop(
    mut input: Box<dyn Read + Send>,
    shared: Arc<Shared>,
    ready_tx: mpsc::Sender<Instant>,
) {
    let mut ready_tx = Some(ready_tx);
    loop {
        match read_frame(&mut input) {
            Ok(ReadOutcome::Frame(frame)) => {
                if frame.id == 0 && frame.op == OP_READY {
                    if let Some(tx) = ready_tx.take() {
                        let _ = tx.send(Instant::now());
                    }
                    continue;
                }
                if frame.id == 0 {
                    warn!("service reported: {}", frame.body);
                    continue;
                }
                let waiter = lock(&shared.pending).remove(&frame.id);
                match waiter {
                    Some(tx) => {
                        let _ = tx.send(frame);
                    }
                    None => debug!("dropping response for unknown id {}", frame.id),
                }
            }
            Ok(ReadOutcome::Malformed(e)) => warn!("malformed frame from service: {e}"),
            Ok(ReadOutcome::Eof) | Err(_) => break,
        }
    }
    shared.mark_dead();
}

/// Starts the service executable (`<exe> serve --config <file>`) and blocks
/// until it reports ready.
pub fn spawn_service(opts: &SpawnOptions) -> Result<ServiceHandle, ServiceError> {
    let workdir = tempfile::Builder::new().prefix("gtp-mesh-svc").tempdir()?;
    let config_path = workdir.path().join("service.conf");
    let mut config = opts.config.clone();
    config.absolutize()?;
    fs::write(&config_path, config.to_text())?;

    let mut created_fifos = Vec::new();
    let fifos = match config.transport {
        Transport::Fifo => {
            let fin = config.fifo_in.clone().expect("validated config");
            let fout = config.fifo_out.clone().expect("validated config");
            for p in [&fin, &fout] {
                if make_fifo(p)? {
                    created_fifos.push(p.clone());
                }
            }
            Some((fin, fout))
        }
        Transport::Stdio => None,
    };

    let mut cmd = Command::new(&opts.exe);
    cmd.arg("serve")
        .arg("--config")
        .arg(&config_path)
        .stderr(Stdio::piped());
    match fifos {
        Some(_) => cmd.stdin(Stdio::null()).stdout(Stdio::null()),
        None => cmd.stdin(Stdio::piped()).stdout(Stdio::piped()),
    };
    let started = Instant::now();
    let deadline = started + opts.ready_timeout;
    let mut child = cmd
        .spawn()
        .map_err(|e| ServiceError::SpawnFailed(format!("{}: {e}", opts.exe.display())))?;
    let pid = child.id();

    let stderr_tail = Arc::new(Mutex::new(String::new()));
    if let Some(stderr) = child.stderr.take() {
        let tail = Arc::clone(&stderr_tail);
        thread::spawn(move || {
            for line in BufReader::new(stderr).lines().map_while(Result::ok) {
                debug!("service[{pid}]: {line}");
                let mut t = lock(&tail);
                t.push_str(&line);
                t.push('\n');
                if t.len() > STDERR_TAIL_BYTES {
                    let mut cut = t.len() - STDERR_TAIL_BYTES;
                    while !t.is_char_boundary(cut) {
                        cut += 1;
                    }
                    t.drain(..cut);
                }
            }
        });
    }

    let (writer, reader): (Box<dyn Write + Send>, Box<dyn Read + Send>) = match &fifos {
        Some((fin, fout)) => {
            let (w, r) =
                connect_fifos(&mut child, &stderr_tail, fin, fout, deadline, opts.ready_timeout)?;
            (Box::new(w), Box::new(r))
        }
        None => (
            Box::new(child.stdin.take().expect("piped stdin")),
            Box::new(child.stdout.take().expect("piped stdout")),
        ),
    };

    let shared = Arc::new(Shared {
        state: Mutex::new(ServiceState::Starting),
        pending: Mutex::new(HashMap::new()),
    });
    let (ready_tx, ready_rx) = mpsc::channel();
    let reader_shared = Arc::clone(&shared);
    let reader_thread = thread::Builder::new()
        .name(format!("service-reader-{pid}"))
        .spawn(move || reader_loop(reader, reader_shared, ready_tx))?;

    let ready_at = loop {
        match ready_rx.recv_timeout(POLL_SLICE) {
            Ok(at) => break at,
            Err(RecvTimeoutError::Disconnected) => {
                return Err(spawn_failed(&mut child, &stderr_tail, "service closed its output"));
            }
            Err(RecvTimeoutError::Timeout) => {}
        }
        if child.try_wait()?.is_some() {
            return Err(spawn_failed(&mut child, &stderr_tail, "service exited before becoming ready"));
        }
        if Instant::now() >= deadline {
            let _ = child.kill();
            let _ = child.wait();
            return Err(ServiceError::ReadyTimeout(opts.ready_timeout));
        }
    };
    shared.set_state(ServiceState::Ready);

    Ok(ServiceHandle {
        shared,
        writer: Mutex::new(Some(writer)),
        child: Mutex::new(ChildSlot {
            child: Some(child),
            status: None,
        }),
        reader: Mutex::new(Some(reader_thread)),
        next_id: AtomicU64::new(1),
        pid,
        load_time: ready_at.saturating_duration_since(started),
        fifos,
        created_fifos,
        shutdown_grace: opts.shutdown_grace,
        stderr_tail,
        _workdir: workdir,
    })
}

impl ServiceHandle {
    pub fn pid(&self) -> u32 {
        self.pid
    }

    pub fn state(&self) -> ServiceState {
        self.shared.state()
    }

    /// Time from spawn until the ready sentinel arrived.
    pub fn load_time(&self) -> Duration {
        self.load_time
    }

    pub fn fifo_paths(&self) -> Option<(&Path, &Path)> {
        self.fifos.as_ref().map(|(a, b)| (a.as_path(), b.as_path()))
    }

    /// Last lines the service wrote to its error stream.
    pub fn stderr_tail(&self) -> String {
        lock(&self.stderr_tail).clone()
    }

    fn send(&self, op: &str, body: Value) -> Result<(u64, mpsc::Receiver<Frame>), ServiceError> {
        let id = self.next_id.fetch_add(1, Ordering::Relaxed);
        let (tx, rx) = mpsc::channel();
        {
            let mut pending = lock(&self.shared.pending);
            if self.shared.state() != ServiceState::Ready && op != OP_SHUTDOWN {
                return Err(ServiceError::BrokenPipe);
            }
            if self.shared.state() == ServiceState::Dead {
                return Err(ServiceError::BrokenPipe);
            }
            pending.insert(id, tx);
        }
        let written = {
            let mut writer = lock(&self.writer);
            match writer.as_mut() {
                Some(w) => write_frame(w.as_mut(), &Frame::new(id, op, body)).is_ok(),
                None => false,
            }
        };
        if !written {
            lock(&self.shared.pending).remove(&id);
            self.shared.mark_dead();
            return Err(ServiceError::BrokenPipe);
        }
        Ok((id, rx))
    }

    /// Sends `op` and waits for the response carrying the same id.
    pub fn request(&self, op: &str, body: Value, timeout: Duration) -> Result<Value, ServiceError> {
        let (id, rx) = self.send(op, body)?;
        match rx.recv_timeout(timeout) {
            Ok(frame) if frame.op == OP_ERROR => Err(ServiceError::Remote(
                frame.body["message"].as_str().unwrap_or("unknown error").to_string(),
            )),
            Ok(frame) => Ok(frame.body),
            Err(RecvTimeoutError::Timeout) => {
                lock(&self.shared.pending).remove(&id);
                Err(ServiceError::Timeout(timeout))
            }
            Err(RecvTimeoutError::Disconnected) => Err(ServiceError::BrokenPipe),
        }
    }

    /// Asks the service to exit, killing it if it does not within the
    /// grace period. Calling it again returns the recorded status.
    pub fn shutdown(&self) -> Result<Option<ExitStatus>, ServiceError> {
        let mut slot = lock(&self.child);
        let Some(mut child) = slot.child.take() else {
            return Ok(slot.status);
        };
        if self.shared.state() == ServiceState::Ready {
            self.shared.set_state(ServiceState::Stopping);
            match self.request(OP_SHUTDOWN, json!({}), self.shutdown_grace) {
                Ok(_) => {}
                Err(e) => debug!("graceful shutdown of service {} failed: {e}", self.pid),
            }
        }
        // closing our end lets a child blocked on input see EOF
        lock(&self.writer).take();
        let deadline = Instant::now() + self.shutdown_grace;
        let status = loop {
            if let Some(s) = child.try_wait()? {
                break s;
            }
            if Instant::now() >= deadline {
                warn!("service {} did not exit, killing it", self.pid);
                let _ = child.kill();
                break child.wait()?;
            }
            thread::sleep(POLL_SLICE);
        };
        self.shared.mark_dead();
        if let Some(h) = lock(&self.reader).take() {
            let _ = h.join();
        }
        for p in &self.created_fifos {
            let _ = fs::remove_file(p);
        }
        slot.status = Some(status);
        Ok(Some(status))
    }
}

impl Drop for ServiceHandle {
    fn drop(&mut self) {
        let slot = self.child.get_mut().unwrap_or_else(|e| e.into_inner());
        if let Some(mut child) = slot.child.take() {
            let _ = child.kill();
            let _ = child.wait();
        }
        for p in &self.created_fifos {
            let _ = fs::remove_file(p);
        }
    }
}
