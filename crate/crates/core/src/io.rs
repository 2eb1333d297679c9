//! File formats: JSON links with a marks sidecar, CSV traces, atomic writes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::curves::{ClosedCurve, ThickLink};
use crate::error::{GordianError, Result};
use crate::geom::Point3;
use crate::isotopy::IsotopyTrace;

pub const LINK_FORMAT: &str = "gordian-link/1";
pub const MARKS_FORMAT: &str = "gordian-marks/1";

#[derive(Serialize, Deserialize)]
struct ComponentFile {
    closed: bool,
    vertices: Vec<[f64; 3]>,
}

#[derive(Serialize, Deserialize)]
struct LinkFile {
    format: String,
    thickness: f64,
    components: Vec<ComponentFile>,
}

/// Arc-length marks on α, four per β copy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarksFile {
    pub format: String,
    pub marks: Vec<[f64; 4]>,
}

impl MarksFile {
    pub fn new(marks: Vec<[f64; 4]>) -> Self {
        MarksFile {
            format: MARKS_FORMAT.to_string(),
            marks,
        }
    }
}

pub fn link_to_json(link: &ThickLink) -> String {
    let file = LinkFile {
        format: LINK_FORMAT.to_string(),
        thickness: link.thickness,
        components: link
            .components
            .iter()
            .map(|c| ComponentFile {
                closed: true,
                vertices: c.vertices().iter().map(|p| [p.x, p.y, p.z]).collect(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("link serializes");
    s.push('\n');
    s
}

pub fn link_from_json(text: &str) -> Result<ThickLink> {
    let file: LinkFile = serde_json::from_str(text)?;
    if file.format != LINK_FORMAT {
        return Err(GordianError::Format(format!(
            "expected format {LINK_FORMAT:?}, found {:?}",
            file.format
        )));
    }
    let components = file
        .components
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            if !c.closed {
                return Err(GordianError::Format(format!("component {i} is not closed")));
            }
            ClosedCurve::new(c.vertices.into_iter().map(|[x, y, z]| Point3::new(x, y, z)).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    ThickLink::new(components, file.thickness)
}

pub fn read_link(path: &Path) -> Result<ThickLink> {
    link_from_json(&fs::read_to_string(path)?)
}

/// `FILE.json` becomes `FILE.marks.json`.
pub fn marks_path(link_path: &Path) -> PathBuf {
    let stem = link_path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    link_path.with_file_name(format!("{stem}.marks.json"))
}

pub fn read_marks(path: &Path) -> Result<MarksFile> {
    let file: MarksFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    if file.format != MARKS_FORMAT {
        return Err(GordianError::Format(format!(
            "expected format {MARKS_FORMAT:?}, found {:?}",
            file.format
        )));
    }
    Ok(file)
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| GordianError::InvalidArgument(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

fn opt_int(v: Option<i64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

/// One line per trace row.
pub fn trace_csv(trace: &IsotopyTrace) -> String {
    let mut out =
        String::from("step,reach,len_alpha,len_beta,theta,min_arc_len,lk13,lk24,cond1,cond2,cond3,cond4,cond5,objective_value,status\n");
    let (ia, ib) = (trace.config.roles.alpha, trace.config.roles.beta);
    for row in &trace.rows {
        let len = |i: usize| row.lengths.get(i).map_or_else(String::new, |l| l.to_string());
        let (theta, min_arc, lk13, lk24, conds) = match &row.report {
            Some(r) => (
                r.theta.to_string(),
                r.min_arc_length.to_string(),
                opt_int(r.lk13),
                opt_int(r.lk24),
                [r.cond1, r.cond2, r.cond3, r.cond4, r.cond5].map(flag).join(","),
            ),
            None => (String::new(), String::new(), String::new(), String::new(), ",,,,".to_string()),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            row.step,
            row.reach,
            len(ia),
            len(ib),
            theta,
            min_arc,
            lk13,
            lk24,
            conds,
            row.objective_value,
            row.status.as_str()
        ));
    }
    out
}
