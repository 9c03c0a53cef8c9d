//! Filling a value table by querying an external process.
//!
//! Line protocol over the child's standard streams, one request in flight:
//! we write `EVAL <mask>\n`, the oracle answers `<float>\n`; after the last
//! mask we write `QUIT\n`.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::lattice::{check_n, LatticeVector};
use crate::table::ValueTable;

struct OracleProcess {
    child: Child,
    stdin: Option<ChildStdin>,
    replies: mpsc::Receiver<std::io::Result<String>>,
    timeout: Duration,
}

impl OracleProcess {
    fn spawn(command: &mut Command, timeout: Duration) -> Result<Self> {
        let mut child = command
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| Error::Oracle {
                mask: 0,
                reason: format!("failed to launch oracle: {e}"),
            })?;
        let stdin = child.stdin.take();
        let stdout = child.stdout.take().expect("stdout is piped");
        let (tx, replies) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(Self {
            child,
            stdin,
            replies,
            timeout,
        })
    }

    fn query(&mut self, mask: u64) -> Result<f64> {
        let fail = |reason: String| Error::Oracle { mask, reason };
        let stdin = self.stdin.as_mut().expect("stdin open while querying");
        writeln!(stdin, "EVAL {mask}")
            .and_then(|_| stdin.flush())
            .map_err(|e| fail(format!("oracle exited before answering ({e})")))?;
        let line = match self.replies.recv_timeout(self.timeout) {
            Ok(Ok(line)) => line,
            Ok(Err(e)) => return Err(fail(format!("read error: {e}"))),
            Err(RecvTimeoutError::Timeout) => {
                return Err(fail(format!("no reply within {:?}", self.timeout)))
            }
            Err(RecvTimeoutError::Disconnected) => {
                return Err(fail("oracle exited before answering".into()))
            }
        };
        let value: f64 = line
            .trim()
            .parse()
            .map_err(|_| fail(format!("non-numeric reply {:?}", line.trim())))?;
        if !value.is_finite() {
            return Err(fail(format!("non-finite reply {value}")));
        }
        Ok(value)
    }

    fn finish(mut self) {
        if let Some(mut stdin) = self.stdin.take() {
            let _ = writeln!(stdin, "QUIT").and_then(|_| stdin.flush());
        }
        let deadline = Instant::now() + self.timeout;
        loop {
            match self.child.try_wait() {
                Ok(Some(_)) => return,
                Ok(None) if Instant::now() < deadline => thread::sleep(Duration::from_millis(5)),
                _ => break,
            }
        }
        self.abort();
    }

    fn abort(&mut self) {
        self.stdin.take();
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// Queries all `2^n` masks in ascending order, exactly once each.
///
/// Any failure (launch error, timeout, unparsable reply, early exit) kills
/// the child and reports the first mask that did not get a valid answer.
pub fn subprocess_oracle_fill(n: usize, command: &mut Command, timeout: Duration) -> Result<ValueTable> {
    check_n(n)?;
    let mut oracle = OracleProcess::spawn(command, timeout)?;
    let mut values = Vec::with_capacity(1 << n);
    for mask in 0..(1u64 << n) {
        match oracle.query(mask) {
            Ok(v) => values.push(v),
            Err(e) => {
                oracle.abort();
                return Err(e);
            }
        }
    }
    oracle.finish();
    let note = format!("filled by subprocess oracle: {command:?}");
    Ok(ValueTable::from_values(LatticeVector::new(n, values)?).with_note(note))
}

/// Convenience wrapper running `script` through `sh -c`.
pub fn shell_oracle_fill(n: usize, script: &str, timeout: Duration) -> Result<ValueTable> {
    let mut cmd = Command::new("sh");
    cmd.arg("-c").arg(script);
    let vt = subprocess_oracle_fill(n, &mut cmd, timeout)?;
    Ok(vt.with_note(format!("filled by subprocess oracle: {script}")))
}
