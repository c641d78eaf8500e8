//! External predictors speaking PNG over standard streams.
//!
//! In [`SubprocessMode::PerPatch`] the command is started once per window:
//! it reads one 8-bit grayscale PNG patch from stdin until EOF and writes one
//! mask PNG of the same size to stdout. In [`SubprocessMode::Streaming`] a
//! single process serves every window; each message in either direction is
//! a 4-byte big-endian length followed by that many bytes of PNG. Streaming
//! predictors are called serially.

use std::io::{Read, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::io::{decode_binary_png, encode_binary_png};

use super::predictor::{PatchMask, PatchRequest, Predictor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SubprocessMode {
    #[default]
    PerPatch,
    Streaming,
}

struct StreamChild {
    child: Child,
    stdin: ChildStdin,
    stdout: ChildStdout,
}

pub struct SubprocessPredictor {
    command: String,
    mode: SubprocessMode,
    stream: Mutex<Option<StreamChild>>,
}

impl std::fmt::Debug for SubprocessPredictor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SubprocessPredictor")
            .field("command", &self.command)
            .field("mode", &self.mode)
            .finish()
    }
}

fn protocol_err(msg: impl Into<String>) -> Error {
    Error::Subprocess(msg.into())
}

impl SubprocessPredictor {
    /// `command` runs through `sh -c`.
    pub fn new(command: impl Into<String>, mode: SubprocessMode) -> Self {
        SubprocessPredictor {
            command: command.into(),
            mode,
            stream: Mutex::new(None),
        }
    }

    /// Parses a `cmd:<command>` predictor specification.
    pub fn from_spec(spec: &str, mode: SubprocessMode) -> Result<Self> {
        let command = spec
            .strip_prefix("cmd:")
            .ok_or_else(|| Error::contract(format!("predictor must be given as cmd:<command>, got {spec:?}")))?;
        if command.trim().is_empty() {
            return Err(Error::contract("empty predictor command"));
        }
        Ok(Self::new(command, mode))
    }

    fn spawn(&self) -> Result<Child> {
        Command::new("sh")
            .arg("-c")
            .arg(&self.command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| protocol_err(format!("cannot start `{}`: {e}", self.command)))
    }

    fn run_once(&self, png: &[u8]) -> Result<Vec<u8>> {
        let mut child = self.spawn()?;
        let mut stdin = child.stdin.take().expect("piped stdin");
        let output = std::thread::scope(|s| {
            let writer = s.spawn(move || stdin.write_all(png));
            let out = child.wait_with_output();
            let wrote = writer.join().expect("writer thread");
            (out, wrote)
        });
        let (out, wrote) = output;
        let out = out.map_err(|e| protocol_err(format!("predictor I/O failed: {e}")))?;
        if !out.status.success() {
            return Err(protocol_err(format!("predictor exited with {}", out.status)));
        }
        wrote.map_err(|e| protocol_err(format!("cannot write patch: {e}")))?;
        Ok(out.stdout)
    }

    fn run_streaming(&self, png: &[u8]) -> Result<Vec<u8>> {
        let mut guard = self.stream.lock().unwrap_or_else(|p| p.into_inner());
        if guard.is_none() {
            let mut child = self.spawn()?;
            let stdin = child.stdin.take().expect("piped stdin");
            let stdout = child.stdout.take().expect("piped stdout");
            *guard = Some(StreamChild { child, stdin, stdout });
        }
        let stream = guard.as_mut().expect("started above");
        let len = u32::try_from(png.len()).map_err(|_| protocol_err("patch PNG exceeds 4 GiB"))?;
        let StreamChild { stdin, stdout, .. } = stream;
        let result = std::thread::scope(|s| {
            let writer = s.spawn(move || -> std::io::Result<()> {
                stdin.write_all(&len.to_be_bytes())?;
                stdin.write_all(png)?;
                stdin.flush()
            });
            let mut header = [0u8; 4];
            let read = stdout.read_exact(&mut header).and_then(|_| {
                let mut body = vec![0u8; u32::from_be_bytes(header) as usize];
                stdout.read_exact(&mut body).map(|_| body)
            });
            (writer.join().expect("writer thread"), read)
        });
        match result {
            (Ok(()), Ok(body)) => Ok(body),
            (Err(e), _) | (_, Err(e)) => {
                // The stream is out of sync; restart on the next call.
                if let Some(mut dead) = guard.take() {
                    let _ = dead.child.kill();
                    let _ = dead.child.wait();
                }
                Err(protocol_err(format!("streaming predictor I/O failed: {e}")))
            }
        }
    }
}

impl Predictor for SubprocessPredictor {
    fn predict(&self, request: &PatchRequest<'_>) -> Result<PatchMask> {
        let png = encode_binary_png(request.patch);
        let reply = match self.mode {
            SubprocessMode::PerPatch => self.run_once(&png)?,
            SubprocessMode::Streaming => self.run_streaming(&png)?,
        };
        decode_binary_png(&reply).map(PatchMask::Binary)
    }

    fn concurrent(&self) -> bool {
        self.mode == SubprocessMode::PerPatch
    }
}

impl Drop for SubprocessPredictor {
    fn drop(&mut self) {
        let slot = self.stream.get_mut().unwrap_or_else(|p| p.into_inner());
        if let Some(StreamChild { mut child, stdin, stdout }) = slot.take() {
            // Closing stdin signals end of stream.
            drop(stdin);
            drop(stdout);
            let _ = child.wait();
        }
    }
}
