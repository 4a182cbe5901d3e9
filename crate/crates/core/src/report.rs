//! CSV emission. Files are written to a temporary sibling and renamed into
//! place, so a crash never leaves a truncated file behind.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use tempfile::NamedTempFile;

use crate::error::Result;
use crate::problem::SolveResult;

pub const TRACE_HEADER: &str = "iter,objective,residual,step_norm,elapsed_ms";

/// Writes `contents` to `path` atomically.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Renders a solver trace with [`TRACE_HEADER`].
pub fn trace_csv(result: &SolveResult) -> String {
    let mut out = String::with_capacity(64 * (result.trace.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in &result.trace {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.3}",
            r.k, r.objective, r.residual, r.step_norm, r.elapsed_ms
        );
    }
    out
}

/// `status=<s> iters=<k> objective=<v>`
pub fn summary_line(result: &SolveResult) -> String {
    format!(
        "status={} iters={} objective={}",
        result.status,
        result.iterations(),
        result.final_objective()
    )
}
