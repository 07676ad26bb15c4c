use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::LabResult;
use crate::io::Report;

const REPORT_FILES: [&str; 3] = ["summary.json", "sweep.json", "verify.json"];

/// Every report under `dir`, at the top level and one directory down, sorted by path.
pub fn collect_reports(dir: &Path) -> LabResult<Vec<(PathBuf, Report)>> {
    let mut dirs = vec![dir.to_path_buf()];
    let mut subdirs: Vec<PathBuf> =
        std::fs::read_dir(dir)?.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.is_dir()).collect();
    subdirs.sort();
    dirs.extend(subdirs);
    let mut found = Vec::new();
    for d in dirs {
        for name in REPORT_FILES {
            let p = d.join(name);
            if p.is_file() {
                found.push((p.clone(), Report::read(&p)?));
            }
        }
    }
    Ok(found)
}

/// Plain-text table of every check in `reports`.
pub fn render(base: &Path, reports: &[(PathBuf, Report)]) -> String {
    let mut s = String::new();
    for (path, r) in reports {
        let rel = path.strip_prefix(base).unwrap_or(path);
        let partial = if r.partial == Some(true) { " (partial)" } else { "" };
        let _ = writeln!(s, "{}: {}{partial}", rel.display(), if r.pass { "PASS" } else { "FAIL" });
        for c in &r.results {
            let status = match c.pass {
                Some(true) => "ok",
                Some(false) => "FAIL",
                None => "--",
            };
            let value = c.value.map_or_else(|| "-".to_string(), |v| format!("{v:.6e}"));
            let bound = match (c.target, c.tolerance) {
                (Some(t), Some(tol)) => format!("{t} +/- {tol:e}"),
                (None, Some(tol)) => format!("<= {tol:e}"),
                _ => String::new(),
            };
            let _ = write!(s, "  {status:<4} {:<44} {value:>14} {bound}", c.name);
            if let Some(e) = &c.error {
                let _ = write!(s, " [{e}]");
            }
            s.push('\n');
        }
    }
    s
}

/// `report`: summarizes the reports in `dir`; passes iff every one passed.
pub fn cmd_report(dir: &Path) -> LabResult<(String, bool)> {
    let reports = collect_reports(dir)?;
    let pass = !reports.is_empty() && reports.iter().all(|(_, r)| r.pass);
    let mut text = render(dir, &reports);
    if reports.is_empty() {
        let _ = writeln!(text, "no reports found in {}", dir.display());
    }
    Ok((text, pass))
}
