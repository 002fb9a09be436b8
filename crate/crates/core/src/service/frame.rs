//! Length-prefixed frames: a 4-byte big-endian payload length followed by a
//! UTF-8 JSON object `{"id": u64, "op": string, "body": any}`.

use std::io::{self, Read, Write};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

pub const MAX_PAYLOAD: usize = 16 * 1024 * 1024;
pub const HEADER_LEN: usize = 4;

#[derive(Debug, Error)]
pub enum FrameError {
    #[error("payload of {0} bytes exceeds the 16 MiB limit")]
    Oversize(usize),
    #[error("truncated frame: expected {expected} bytes, got {got}")]
    Truncated { expected: usize, got: usize },
    #[error("malformed payload: {0}")]
    MalformedPayload(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub id: u64,
    pub op: String,
    pub body: Value,
}

impl Frame {
    pub fn new(id: u64, op: impl Into<String>, body: Value) -> Self {
        Frame {
            id,
            op: op.into(),
            body,
        }
    }
}

/// Prefixes `payload` with its length.
pub fn encode_payload(payload: &[u8]) -> Result<Vec<u8>, FrameError> {
    if payload.len() > MAX_PAYLOAD {
        return Err(FrameError::Oversize(payload.len()));
    }
    let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
    out.extend_from_slice(&(payload.len() as u32).to_be_bytes());
    out.extend_from_slice(payload);
    Ok(out)
}

/// Splits one length-prefixed payload off the front of `bytes`, returning it
/// with the number of bytes consumed.
pub fn decode_payload(bytes: &[u8]) -> Result<(&[u8], usize), FrameError> {
    if bytes.len() < HEADER_LEN {
        return Err(FrameError::Truncated {
            expected: HEADER_LEN,
            got: bytes.len(),
        });
    }
    let len = u32::from_be_bytes(bytes[..HEADER_LEN].try_into().expect("4 bytes")) as usize;
    if len > MAX_PAYLOAD {
        return Err(FrameError::Oversize(len));
    }
    let end = HEADER_LEN + len;
    if bytes.len() < end {
        return Err(FrameError::Truncated {
            expected: end,
            got: bytes.len(),
        });
    }
    Ok((&bytes[HEADER_LEN..end], end))
}

pub fn encode_frame(id: u64, op: &str, body: &Value) -> Result<Vec<u8>, FrameError> {
    #[derive(Serialize)]
    struct Out<'a> {
        id: u64,
        op: &'a str,
        body: &'a Value,
    }
    let payload = serde_json::to_vec(&Out { id, op, body })
        .map_err(|e| FrameError::MalformedPayload(e.to_string()))?;
    encode_payload(&payload)
}

fn parse_payload(payload: &[u8]) -> Result<Frame, FrameError> {
    let text = std::str::from_utf8(payload).map_err(|e| FrameError::MalformedPayload(e.to_string()))?;
    serde_json::from_str(text).map_err(|e| FrameError::MalformedPayload(e.to_string()))
}

/// Decodes one frame from the front of `bytes`; also returns bytes consumed.
pub fn decode_frame(bytes: &[u8]) -> Result<(Frame, usize), FrameError> {
    let (payload, used) = decode_payload(bytes)?;
    Ok((parse_payload(payload)?, used))
}

pub fn write_frame<W: Write + ?Sized>(w: &mut W, frame: &Frame) -> Result<(), FrameError> {
    let bytes = encode_frame(frame.id, &frame.op, &frame.body)?;
    w.write_all(&bytes)?;
    w.flush()?;
    Ok(())
}

/// What a stream reader produced.
#[derive(Debug)]
pub enum ReadOutcome {
    Frame(Frame),
    /// Stream closed cleanly on a frame boundary.
    Eof,
    /// A complete frame was read but its payload was not a valid frame
    /// object; the stream is still in sync.
    Malformed(FrameError),
}

fn read_full<R: Read + ?Sized>(r: &mut R, buf: &mut [u8]) -> io::Result<usize> {
    let mut got = 0;
    while got < buf.len() {
        match r.read(&mut buf[got..]) {
            Ok(0) => break,
            Ok(n) => got += n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e),
        }
    }
    Ok(got)
}

/// Reads one frame from a stream. Oversize frames are skipped so the reader
/// stays in sync; a stream that ends mid-frame yields `Truncated`.
pub fn read_frame<R: Read + ?Sized>(r: &mut R) -> Result<ReadOutcome, FrameError> {
    let mut header = [0u8; HEADER_LEN];
    let got = read_full(r, &mut header)?;
    if got == 0 {
        return Ok(ReadOutcome::Eof);
    }
    if got < HEADER_LEN {
        return Err(FrameError::Truncated {
            expected: HEADER_LEN,
            got,
        });
    }
    let len = u32::from_be_bytes(header) as usize;
    if len > MAX_PAYLOAD {
        let skipped = io::copy(&mut r.take(len as u64), &mut io::sink())? as usize;
        if skipped < len {
            return Err(FrameError::Truncated {
                expected: HEADER_LEN + len,
                got: HEADER_LEN + skipped,
            });
        }
        return Ok(ReadOutcome::Malformed(FrameError::Oversize(len)));
    }
    let mut payload = vec![0u8; len];
    let got = read_full(r, &mut payload)?;
    if got < len {
        return Err(FrameError::Truncated {
            expected: HEADER_LEN + len,
            got: HEADER_LEN + got,
        });
    }
    Ok(match parse_payload(&payload) {
        Ok(f) => ReadOutcome::Frame(f),
        Err(e) => ReadOutcome::Malformed(e),
    })
}
