//! Black-box execution of the command under study.
//!
//! Commands are either external processes (run through argv when the text is
//! a simple command, otherwise through `sh -c`) or in-process builtins. All
//! external executions share a global process limit.

pub mod builtin;
pub mod sortcmp;

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::{Condvar, Mutex, OnceLock};
use std::thread;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use wait_timeout::ChildExt;

pub use builtin::Builtin;

use crate::dsl::{MergeFlags, RunOps};
use crate::pipeline::lex::simple_argv;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(10);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExecError {
    #[error("command timed out after {0:?}")]
    Timeout(Duration),
    #[error("command exited with status {code}: {stderr}")]
    NonZeroExit { code: i32, stderr: String },
    #[error("command killed by a signal")]
    Signaled,
    #[error("failed to spawn command: {0}")]
    Spawn(String),
    #[error("command is not available in builtin-only mode: {0}")]
    NotBuiltin(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CommandKind {
    External {
        /// The command line exactly as written.
        text: String,
        /// Direct argv when the text needs no shell.
        argv: Option<Vec<String>>,
    },
    Builtin(Builtin),
}

/// A runnable command `f`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommandHandle {
    pub kind: CommandKind,
    pub timeout: Duration,
    pub env: BTreeMap<String, String>,
    pub cwd: Option<PathBuf>,
    /// Strip locale variables and set `LC_ALL=C` for the child.
    pub c_locale: bool,
}

impl CommandHandle {
    pub fn external(text: &str) -> Self {
        CommandHandle {
            kind: CommandKind::External {
                text: text.trim().to_string(),
                argv: simple_argv(text),
            },
            timeout: DEFAULT_TIMEOUT,
            env: BTreeMap::new(),
            cwd: None,
            c_locale: true,
        }
    }

    pub fn builtin(b: Builtin) -> Self {
        CommandHandle {
            kind: CommandKind::Builtin(b),
            ..CommandHandle::external("true")
        }
    }

    /// Resolves a command line. `builtin:NAME` always selects a builtin; with
    /// `builtin_only`, other text must map onto a builtin emulation.
    pub fn resolve(text: &str, builtin_only: bool) -> Result<Self, ExecError> {
        if let Some(name) = text.trim().strip_prefix("builtin:") {
            return name
                .parse::<Builtin>()
                .map(CommandHandle::builtin)
                .map_err(ExecError::NotBuiltin);
        }
        if builtin_only {
            return Builtin::for_command(text)
                .map(CommandHandle::builtin)
                .ok_or_else(|| ExecError::NotBuiltin(text.to_string()));
        }
        Ok(CommandHandle::external(text))
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn with_cwd(mut self, cwd: impl Into<PathBuf>) -> Self {
        self.cwd = Some(cwd.into());
        self
    }

    pub fn with_c_locale(mut self, on: bool) -> Self {
        self.c_locale = on;
        self
    }

    pub fn with_env(mut self, key: &str, value: &str) -> Self {
        self.env.insert(key.to_string(), value.to_string());
        self
    }

    /// The command text (for builtins, the coreutils command they emulate).
    pub fn text(&self) -> &str {
        match &self.kind {
            CommandKind::External { text, .. } => text,
            CommandKind::Builtin(b) => b.coreutils_equivalent(),
        }
    }

    pub fn is_builtin(&self) -> bool {
        matches!(self.kind, CommandKind::Builtin(_))
    }

    fn to_process(&self) -> Command {
        let mut cmd = match &self.kind {
            CommandKind::External {
                argv: Some(argv), ..
            } => {
                let mut c = Command::new(&argv[0]);
                c.args(&argv[1..]);
                c
            }
            CommandKind::External { text, argv: None } => {
                let mut c = Command::new("sh");
                c.arg("-c").arg(text);
                c
            }
            CommandKind::Builtin(_) => unreachable!("builtins do not spawn"),
        };
        if self.c_locale {
            for (k, _) in std::env::vars_os() {
                let k = k.to_string_lossy();
                if k.starts_with("LC_") || k == "LANG" || k == "LANGUAGE" {
                    cmd.env_remove(k.as_ref());
                }
            }
            cmd.env("LC_ALL", "C");
        }
        cmd.envs(&self.env);
        if let Some(dir) = &self.cwd {
            cmd.current_dir(dir);
        }
        cmd
    }
}

/// Raw output of one execution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub stdout: Vec<u8>,
}

impl RunOutput {
    /// Whether the output is a stream (nonempty and newline-terminated).
    pub fn is_stream(&self) -> bool {
        self.stdout.last() == Some(&b'\n')
    }
}

struct Limiter {
    slots: Mutex<usize>,
    freed: Condvar,
}

static LIMIT: OnceLock<Mutex<usize>> = OnceLock::new();
static LIMITER: OnceLock<Limiter> = OnceLock::new();

fn default_pool_size() -> usize {
    thread::available_parallelism().map_or(4, |n| n.get()).max(2)
}

/// Sets the maximum number of live subprocesses. Only effective before the
/// first external command runs.
pub fn set_process_limit(p: usize) {
    *LIMIT.get_or_init(|| Mutex::new(default_pool_size())).lock().unwrap() = p.max(1);
}

pub fn process_limit() -> usize {
    *LIMIT.get_or_init(|| Mutex::new(default_pool_size())).lock().unwrap()
}

fn limiter() -> &'static Limiter {
    LIMITER.get_or_init(|| Limiter {
        slots: Mutex::new(process_limit()),
        freed: Condvar::new(),
    })
}

struct Permit;

impl Permit {
    fn acquire() -> Permit {
        let l = limiter();
        let mut slots = l.slots.lock().unwrap();
        while *slots == 0 {
            slots = l.freed.wait(slots).unwrap();
        }
        *slots -= 1;
        Permit
    }
}

impl Drop for Permit {
    fn drop(&mut self) {
        let l = limiter();
        *l.slots.lock().unwrap() += 1;
        l.freed.notify_one();
    }
}

/// Runs `f` with `input` on standard input and captures standard output.
///
/// Exit status 0 is success. Status 1 with nothing on standard error is
/// also success: it is how `grep` and friends report "no match".
pub fn run_command(f: &CommandHandle, input: &[u8]) -> Result<RunOutput, ExecError> {
    if let CommandKind::Builtin(b) = f.kind {
        return Ok(RunOutput {
            stdout: b.run(input),
        });
    }
    let _permit = Permit::acquire();
    run_process(f.to_process(), input, f.timeout)
}

/// Runs `f` with standard input and output connected to files.
pub fn run_command_file(f: &CommandHandle, input: &Path, output: &Path) -> Result<(), ExecError> {
    let io = |e: std::io::Error| ExecError::Spawn(format!("{}: {e}", input.display()));
    if let CommandKind::Builtin(b) = f.kind {
        let data = std::fs::read(input).map_err(io)?;
        return std::fs::write(output, b.run(&data)).map_err(io);
    }
    let stdin = File::open(input).map_err(io)?;
    let stdout = File::create(output).map_err(io)?;
    let _permit = Permit::acquire();
    let mut child = f
        .to_process()
        .stdin(stdin)
        .stdout(stdout)
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| ExecError::Spawn(e.to_string()))?;
    let mut stderr = child.stderr.take().expect("piped stderr");
    let err_reader = thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stderr.read_to_end(&mut buf);
        buf
    });
    let status = match child.wait_timeout(f.timeout) {
        Ok(Some(status)) => status,
        Ok(None) => {
            let _ = child.kill();
            let _ = child.wait();
            let _ = err_reader.join();
            return Err(ExecError::Timeout(f.timeout));
        }
        Err(e) => return Err(ExecError::Spawn(e.to_string())),
    };
    let stderr = err_reader.join().unwrap_or_default();
    exit_result(status.code(), &stderr)
}

fn exit_result(code: Option<i32>, stderr: &[u8]) -> Result<(), ExecError> {
    match code {
        Some(0) => Ok(()),
        Some(1) if stderr.is_empty() => Ok(()),
        Some(code) => Err(ExecError::NonZeroExit {
            code,
            stderr: excerpt(stderr),
        }),
        None => Err(ExecError::Signaled),
    }
}

pub(crate) fn run_process(
    mut cmd: Command,
    input: &[u8],
    timeout: Duration,
) -> Result<RunOutput, ExecError> {
    let mut child = cmd
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| ExecError::Spawn(e.to_string()))?;

    let mut stdin = child.stdin.take().expect("piped stdin");
    let mut stdout = child.stdout.take().expect("piped stdout");
    let mut stderr = child.stderr.take().expect("piped stderr");
    let input = input.to_vec();
    let writer = thread::spawn(move || {
        // a command may exit without reading everything
        let _ = stdin.write_all(&input);
    });
    let out_reader = thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stdout.read_to_end(&mut buf);
        buf
    });
    let err_reader = thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stderr.read_to_end(&mut buf);
        buf
    });

    let status = match child.wait_timeout(timeout) {
        Ok(Some(status)) => status,
        Ok(None) => {
            let _ = child.kill();
            let _ = child.wait();
            let _ = writer.join();
            let _ = out_reader.join();
            let _ = err_reader.join();
            return Err(ExecError::Timeout(timeout));
        }
        Err(e) => return Err(ExecError::Spawn(e.to_string())),
    };
    let _ = writer.join();
    let stdout = out_reader.join().unwrap_or_default();
    let stderr = err_reader.join().unwrap_or_default();
    exit_result(status.code(), &stderr).map(|()| RunOutput { stdout })
}

fn excerpt(stderr: &[u8]) -> String {
    let s = String::from_utf8_lossy(stderr);
    let s = s.trim();
    match s.char_indices().nth(200) {
        Some((i, _)) => format!("{}...", &s[..i]),
        None => s.to_string(),
    }
}

/// `⟨f(x1), f(x2), f(x1 ++ x2)⟩` for one input pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Observation {
    pub y1: Vec<u8>,
    pub y2: Vec<u8>,
    pub y12: Vec<u8>,
    pub source: (Vec<u8>, Vec<u8>),
}

impl Observation {
    /// All three outputs are streams.
    pub fn is_stream(&self) -> bool {
        [&self.y1, &self.y2, &self.y12]
            .iter()
            .all(|y| y.last() == Some(&b'\n'))
    }
}

pub fn observe(f: &CommandHandle, pair: &(Vec<u8>, Vec<u8>)) -> Result<Observation, ExecError> {
    let (x1, x2) = pair;
    let mut x12 = Vec::with_capacity(x1.len() + x2.len());
    x12.extend_from_slice(x1);
    x12.extend_from_slice(x2);
    Ok(Observation {
        y1: run_command(f, x1)?.stdout,
        y2: run_command(f, x2)?.stdout,
        y12: run_command(f, &x12)?.stdout,
        source: pair.clone(),
    })
}

/// Observes every pair concurrently; results come back in input order.
pub fn observe_all(
    f: &CommandHandle,
    pairs: &[(Vec<u8>, Vec<u8>)],
) -> Vec<Result<Observation, ExecError>> {
    if f.is_builtin() {
        pairs.iter().map(|p| observe(f, p)).collect()
    } else {
        pairs.par_iter().map(|p| observe(f, p)).collect()
    }
}

/// Splits `s` into `k` parts at line boundaries, balanced by byte count.
///
/// Nonempty parts come first, in order; when there are not enough line
/// boundaries the trailing parts are absent (`None`).
pub fn split_stream(s: &[u8], k: usize) -> Vec<Option<&[u8]>> {
    assert!(k >= 1, "split width must be positive");
    let len = s.len();
    let mut parts = Vec::with_capacity(k);
    let mut prev = 0;
    for i in 1..k {
        let target = (i * len).div_ceil(k).max(prev);
        let cut = (target..len)
            .find(|&p| p > prev && s[p - 1] == b'\n')
            .unwrap_or(len);
        if cut > prev {
            parts.push(Some(&s[prev..cut]));
            prev = cut;
        }
    }
    if prev < len {
        parts.push(Some(&s[prev..]));
    }
    parts.resize(k, None);
    parts
}

/// How `merge` is executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MergeBackend {
    /// In-process when the flags are understood, otherwise `sort -m`.
    #[default]
    Auto,
    Builtin,
    External,
}

/// Runs `sort -m <flags>` over the parts, staged through temporary files.
pub fn external_merge(flags: &MergeFlags, parts: &[&[u8]], timeout: Duration) -> Result<Vec<u8>, ExecError> {
    let dir = tempfile::tempdir().map_err(|e| ExecError::Spawn(e.to_string()))?;
    let mut cmd = Command::new("sort");
    cmd.arg("-m").args(flags.as_slice());
    for (i, p) in parts.iter().enumerate() {
        let path = dir.path().join(format!("part{i}"));
        std::fs::write(&path, p).map_err(|e| ExecError::Spawn(e.to_string()))?;
        cmd.arg(path);
    }
    cmd.env("LC_ALL", "C");
    let _permit = Permit::acquire();
    run_process(cmd, b"", timeout)
        .map(|o| o.stdout)
}

fn external_is_sorted(flags: &MergeFlags, s: &[u8]) -> bool {
    if s.is_empty() {
        return true;
    }
    if s.last() != Some(&b'\n') {
        return false;
    }
    let mut cmd = Command::new("sort");
    cmd.arg("-c").args(flags.as_slice()).env("LC_ALL", "C");
    let _permit = Permit::acquire();
    run_process(cmd, s, DEFAULT_TIMEOUT).is_ok()
}

/// Run hooks bound to one command.
#[derive(Debug, Clone)]
pub struct CommandOps<'a> {
    pub command: &'a CommandHandle,
    pub merge: MergeBackend,
}

impl<'a> CommandOps<'a> {
    pub fn new(command: &'a CommandHandle) -> Self {
        CommandOps {
            command,
            merge: if command.is_builtin() {
                MergeBackend::Builtin
            } else {
                MergeBackend::Auto
            },
        }
    }

    pub fn with_merge(mut self, merge: MergeBackend) -> Self {
        self.merge = merge;
        self
    }

    fn use_builtin_merge(&self, flags: &MergeFlags) -> bool {
        match self.merge {
            MergeBackend::Builtin => true,
            MergeBackend::External => false,
            MergeBackend::Auto => sortcmp::SortOpts::from_flags(flags).is_ok(),
        }
    }
}

impl RunOps for CommandOps<'_> {
    fn rerun(&self, input: &[u8]) -> Result<Vec<u8>, String> {
        run_command(self.command, input)
            .map(|o| o.stdout)
            .map_err(|e| e.to_string())
    }

    fn rerun_accepts(&self, s: &[u8]) -> bool {
        run_command(self.command, s).is_ok()
    }

    fn merge(&self, flags: &MergeFlags, parts: &[&[u8]]) -> Result<Vec<u8>, String> {
        if self.use_builtin_merge(flags) {
            sortcmp::merge_parts(flags, parts).map_err(|e| e.to_string())
        } else {
            external_merge(flags, parts, self.command.timeout).map_err(|e| e.to_string())
        }
    }

    fn merge_accepts(&self, flags: &MergeFlags, s: &[u8]) -> bool {
        if self.use_builtin_merge(flags) {
            sortcmp::is_sorted(flags, s).unwrap_or(false)
        } else {
            external_is_sorted(flags, s)
        }
    }
}
