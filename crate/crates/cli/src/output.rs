//! Report rendering and atomic file output.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use anyhow::Context;
use dtho_core::{Complex64, ResidualReport};

use crate::suite::Outcome;

/// Writes `contents` to `path` through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> anyhow::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = Path::new(&tmp);
    {
        let mut f = std::fs::File::create(tmp).with_context(|| format!("creating {}", tmp.display()))?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(tmp, path).with_context(|| format!("renaming onto {}", path.display()))
}

/// Writes to `path`, or to stdout when there is none.
pub fn emit(path: Option<&Path>, contents: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => write_atomic(p, contents),
        None => {
            std::io::stdout().write_all(contents.as_bytes())?;
            Ok(())
        }
    }
}

pub fn reports_json(reports: &[ResidualReport]) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(reports)? + "\n")
}

pub fn spectrum_csv(ev: &[Complex64]) -> String {
    let mut out = String::from("index,re,im\n");
    for (i, z) in ev.iter().enumerate() {
        let _ = writeln!(out, "{i},{},{}", z.re, z.im);
    }
    out
}

/// One human-readable line per outcome.
pub fn summary_line(outcome: &Outcome) -> String {
    match outcome {
        Outcome::Report(r) => {
            let status = if r.pass { "PASS" } else { "FAIL" };
            let failed: Vec<&str> = r.assertions.iter().filter(|a| !a.holds).map(|a| a.claim.as_str()).collect();
            let mut line = format!("{status} {} [{}] residual={:.3e} tol={:.3e}", r.tag, r.case, r.residual, r.tol);
            if !failed.is_empty() {
                let _ = write!(line, " failed: {}", failed.join("; "));
            }
            line
        }
        Outcome::Skipped { tag, case, reason } => format!("SKIP {tag} [{case}] {reason}"),
    }
}

pub fn summary_csv(reports: &[ResidualReport]) -> String {
    let mut out = String::from("tag,case,residual,tol,pass\n");
    for r in reports {
        let _ = writeln!(out, "{},\"{}\",{},{},{}", r.tag, r.case.replace('"', "'"), r.residual, r.tol, r.pass);
    }
    out
}
