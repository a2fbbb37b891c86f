//! Black-box objectives evaluated by a child process over a line protocol.
//!
//! For each evaluation one line of space-separated decimal coordinates is
//! written to the child's standard input and one line holding a single
//! decimal value is read back from its standard output. Requests are
//! strictly serial. Closing standard input signals the end of the run.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::eval::Objective;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_millis(10_000);

/// Renders a point as one protocol request line (without the newline).
pub fn format_request(x: &[f64]) -> String {
    x.iter()
        .map(|v| format!("{v:?}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses a request line back into coordinates.
pub fn parse_request(line: &str) -> Option<Vec<f64>> {
    line.split_whitespace().map(|t| t.parse().ok()).collect()
}

pub fn parse_response(line: &str) -> Option<f64> {
    line.trim().parse().ok()
}

pub struct ExternalEvaluator {
    child: Child,
    stdin: Option<BufWriter<ChildStdin>>,
    responses: Receiver<std::io::Result<String>>,
    timeout: Duration,
    evaluations: usize,
}

impl ExternalEvaluator {
    /// Spawns `command`, split on whitespace into program and arguments.
    pub fn spawn(command: &str, timeout: Duration) -> Result<Self> {
        let mut parts = command.split_whitespace();
        let program = parts
            .next()
            .ok_or_else(|| Error::InvalidConfig("empty evaluator command".into()))?;
        let args: Vec<&str> = parts.collect();
        Self::spawn_program(program, &args, timeout)
    }

    pub fn spawn_program(program: &str, args: &[&str], timeout: Duration) -> Result<Self> {
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| {
                Error::InvalidConfig(format!("cannot start evaluator `{program}`: {e}"))
            })?;
        let stdin = child.stdin.take().map(BufWriter::new);
        let stdout = child.stdout.take().expect("stdout is piped");
        let (tx, responses) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let stop = line.is_err();
                if tx.send(line).is_err() || stop {
                    break;
                }
            }
        });
        Ok(Self {
            child,
            stdin,
            responses,
            timeout,
            evaluations: 0,
        })
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    /// Closes the request stream and waits (up to the timeout) for the
    /// evaluator to exit.
    pub fn finish(mut self) -> Result<()> {
        self.stdin.take();
        let deadline = Instant::now() + self.timeout;
        loop {
            if self.child.try_wait()?.is_some() {
                return Ok(());
            }
            if Instant::now() >= deadline {
                let _ = self.child.kill();
                let _ = self.child.wait();
                return Ok(());
            }
            thread::sleep(Duration::from_millis(2));
        }
    }

    fn fail(&self, message: impl Into<String>) -> Error {
        Error::Evaluator {
            index: self.evaluations,
            message: message.into(),
        }
    }
}

impl Objective<f64> for ExternalEvaluator {
    fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        self.evaluations += 1;
        let request = format_request(x);
        let sent = match self.stdin.as_mut() {
            Some(stdin) => writeln!(stdin, "{request}").and_then(|_| stdin.flush()),
            None => return Err(self.fail("request stream already closed")),
        };
        if sent.is_err() {
            return Err(self.fail("evaluator exited early"));
        }
        match self.responses.recv_timeout(self.timeout) {
            Ok(Ok(line)) => parse_response(&line)
                .ok_or_else(|| self.fail(format!("non-numeric response {:?}", line.trim()))),
            Ok(Err(e)) => Err(self.fail(format!("cannot read response: {e}"))),
            Err(RecvTimeoutError::Timeout) => Err(self.fail(format!(
                "no response within {} ms",
                self.timeout.as_millis()
            ))),
            Err(RecvTimeoutError::Disconnected) => Err(self.fail("evaluator exited early")),
        }
    }
}

impl Drop for ExternalEvaluator {
    fn drop(&mut self) {
        self.stdin.take();
        if let Ok(None) = self.child.try_wait() {
            let _ = self.child.kill();
        }
        let _ = self.child.wait();
    }
}
