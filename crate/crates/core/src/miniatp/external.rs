use std::io::Read;
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use crate::folir::{parse_szs, to_tptp, AtpResult, AtpStatus, Problem};

use super::MiniAtpError;

/// Where the problem file of an external run ended up.
#[derive(Clone, Debug, Default)]
pub struct ExternalOptions {
    /// Keep the written TPTP file instead of deleting it after the run.
    pub keep_files: bool,
}

fn expand(template: &str, file: &str, timeout: Duration) -> Result<Vec<String>, MiniAtpError> {
    let words = shlex::split(template).ok_or_else(|| MiniAtpError::BadTemplate(template.to_string()))?;
    if words.is_empty() {
        return Err(MiniAtpError::BadTemplate(template.to_string()));
    }
    let secs = timeout.as_secs_f64().ceil().max(1.0) as u64;
    let mut saw_file = false;
    let mut out: Vec<String> = words
        .into_iter()
        .map(|w| {
            saw_file |= w.contains("{file}");
            w.replace("{file}", file).replace("{t}", &secs.to_string())
        })
        .collect();
    if !saw_file {
        out.push(file.to_string());
    }
    Ok(out)
}

#[cfg(unix)]
fn kill_group(child: &std::process::Child) {
    // SAFETY: plain syscall on the group the child leads
    unsafe {
        libc::kill(-(child.id() as libc::pid_t), libc::SIGKILL);
    }
}

#[cfg(not(unix))]
fn kill_group(_: &std::process::Child) {}

/// Writes `p` as TPTP to a temporary file, runs the command template on it
/// (`{file}` and `{t}`, the timeout in whole seconds, are substituted; a
/// template without `{file}` gets the path appended) and reads the SZS
/// answer from its output. A run still going at the deadline is killed and
/// reported as `Timeout`.
pub fn run_external(
    p: &Problem,
    prover_cmd: &str,
    timeout: Duration,
    opts: &ExternalOptions,
) -> Result<(AtpResult, Option<PathBuf>), MiniAtpError> {
    if timeout.is_zero() {
        return Ok((AtpResult::new(AtpStatus::Timeout), None));
    }
    let text = to_tptp(p).map_err(|e| MiniAtpError::Io(e.to_string()))?;
    let file = tempfile::Builder::new()
        .prefix("hammer-")
        .suffix(".p")
        .tempfile()
        .map_err(|e| MiniAtpError::Io(e.to_string()))?;
    std::fs::write(file.path(), text).map_err(|e| MiniAtpError::Io(e.to_string()))?;
    let path_str = file.path().to_string_lossy().to_string();
    let argv = expand(prover_cmd, &path_str, timeout)?;

    let start = Instant::now();
    let mut cmd = Command::new(&argv[0]);
    #[cfg(unix)]
    std::os::unix::process::CommandExt::process_group(&mut cmd, 0);
    let mut child = cmd
        .args(&argv[1..])
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| MiniAtpError::SpawnFailed(format!("{}: {e}", argv[0])))?;
    let mut stdout = child.stdout.take().expect("piped stdout");
    let mut stderr = child.stderr.take().expect("piped stderr");
    let out_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout.read_to_string(&mut s);
        s
    });
    let err_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = stderr.read_to_string(&mut s);
        s
    });
    let mut killed = false;
    loop {
        match child.try_wait() {
            Ok(Some(_)) => break,
            Ok(None) if start.elapsed() >= timeout => {
                kill_group(&child);
                let _ = child.kill();
                let _ = child.wait();
                killed = true;
                break;
            }
            Ok(None) => thread::sleep(Duration::from_millis(5)),
            Err(e) => return Err(MiniAtpError::Io(e.to_string())),
        }
    }
    let mut result = if killed {
        AtpResult::new(AtpStatus::Timeout)
    } else {
        let mut output = out_reader.join().unwrap_or_default();
        output.push_str(&err_reader.join().unwrap_or_default());
        parse_szs(&output)
    };
    result.wall_time = start.elapsed();
    let kept = if opts.keep_files {
        Some(
            file.into_temp_path()
                .keep()
                .map_err(|e| MiniAtpError::Io(e.to_string()))?,
        )
    } else {
        None
    };
    Ok((result, kept))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn template_expansion() {
        let a = expand(
            "eprover --auto --cpu-limit={t} {file}",
            "/tmp/x.p",
            Duration::from_millis(2500),
        )
        .unwrap();
        assert_eq!(a, vec!["eprover", "--auto", "--cpu-limit=3", "/tmp/x.p"]);
        let b = expand("'my prover' -q", "/tmp/x.p", Duration::from_secs(1)).unwrap();
        assert_eq!(b, vec!["my prover", "-q", "/tmp/x.p"]);
        assert!(expand("", "f", Duration::from_secs(1)).is_err());
    }
}
