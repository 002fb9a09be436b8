//! The service loop: sequential request processing over a byte stream pair.

use std::io::{Read, Write};
use std::thread;
use std::time::Duration;

use serde_json::{json, Value};

use super::frame::{read_frame, write_frame, Frame, FrameError, ReadOutcome};
use super::{RefineRequest, RefineResponse, OP_ERROR, OP_HEALTH, OP_READY, OP_REFINE, OP_SHUTDOWN};

/// Request handler hosted by [`serve`].
pub trait Handler {
    fn refine(&mut self, req: RefineRequest) -> Result<RefineResponse, String>;
}

impl<F> Handler for F
where
    F: FnMut(RefineRequest) -> Result<RefineResponse, String>,
{
    fn refine(&mut self, req: RefineRequest) -> Result<RefineResponse, String> {
        self(req)
    }
}

#[derive(Debug, Clone, Default)]
pub struct ServeOptions {
    /// Fault injection: never answer `shutdown` and stop reading.
    pub hang_on_shutdown: bool,
    /// Reported in the ready sentinel.
    pub load_time_s: f64,
}

/// Why the loop ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ServeExit {
    Shutdown,
    InputClosed,
}

fn error_frame(id: u64, message: impl Into<String>) -> Frame {
    Frame::new(id, OP_ERROR, json!({ "message": message.into() }))
}

fn dispatch<H: Handler + ?Sized>(handler: &mut H, frame: Frame) -> Frame {
    match frame.op.as_str() {
        OP_HEALTH => Frame::new(frame.id, OP_HEALTH, json!({ "status": "ready" })),
        OP_REFINE => {
            let req: RefineRequest = match serde_json::from_value(frame.body) {
                Ok(r) => r,
                Err(e) => return error_frame(frame.id, format!("bad refine body: {e}")),
            };
            match handler.refine(req) {
                Ok(resp) => Frame::new(
                    frame.id,
                    OP_REFINE,
                    serde_json::to_value(resp).unwrap_or(Value::Null),
                ),
                Err(e) => error_frame(frame.id, e),
            }
        }
        other => error_frame(frame.id, format!("unknown op {other:?}")),
    }
}

/// Writes the ready sentinel, then answers frames in arrival order until a
/// `shutdown` request or end of input.
pub fn serve<H, R, W>(
    handler: &mut H,
    mut input: R,
    mut output: W,
    opts: &ServeOptions,
) -> Result<ServeExit, FrameError>
where
    H: Handler + ?Sized,
    R: Read,
    W: Write,
{
    write_frame(
        &mut output,
        &Frame::new(
            0,
            OP_READY,
            json!({ "status": "ready", "load_time_s": opts.load_time_s }),
        ),
    )?;
    loop {
        let frame = match read_frame(&mut input) {
            Ok(ReadOutcome::Frame(f)) => f,
            Ok(ReadOutcome::Eof) => return Ok(ServeExit::InputClosed),
            Ok(ReadOutcome::Malformed(e)) => {
                write_frame(&mut output, &error_frame(0, e.to_string()))?;
                continue;
            }
            Err(FrameError::Truncated { .. }) => return Ok(ServeExit::InputClosed),
            Err(e) => return Err(e),
        };
        if frame.op == OP_SHUTDOWN {
            if opts.hang_on_shutdown {
                loop {
                    thread::sleep(Duration::from_secs(3600));
                }
            }
            write_frame(
                &mut output,
                &Frame::new(frame.id, OP_SHUTDOWN, json!({ "status": "stopping" })),
            )?;
            return Ok(ServeExit::Shutdown);
        }
        let reply = dispatch(handler, frame);
        write_frame(&mut output, &reply)?;
    }
}
