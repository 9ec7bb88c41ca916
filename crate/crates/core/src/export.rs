//! CSV and JSON output. Floats are written with Rust's `{}` formatting,
//! the shortest decimal that parses back to the same `f64`.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::GroupId;
use crate::integrator::GeodesicPath;

/// Header of Heisenberg path CSVs; `Q` is `Q(ċ, ċ)`.
pub const HEIS_PATH_HEADER: [&str; 7] = ["t", "x", "y", "z", "xdot", "ydot", "Q"];

/// Header of quaternion path CSVs; `speed` is `Q(ċ, ċ)`.
pub const QUAT_PATH_HEADER: [&str; 9] = ["t", "x1", "x2", "x3", "x4", "z1", "z2", "z3", "speed"];

fn io(e: impl std::fmt::Display) -> Error {
    Error::Config(format!("write failed: {e}"))
}

/// Writes a header and numeric rows. Every row must match the header width.
pub fn write_rows<W, I, R>(w: W, header: &[&str], rows: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = R>,
    R: AsRef<[f64]>,
{
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header).map_err(io)?;
    for row in rows {
        let row = row.as_ref();
        if row.len() != header.len() {
            return Err(Error::Config(format!("row of {} values for {} columns", row.len(), header.len())));
        }
        // `+ 0.0` writes -0 as 0
        out.write_record(row.iter().map(|v| format!("{}", v + 0.0))).map_err(io)?;
    }
    out.flush().map_err(io)
}

/// One row per sample in the layout of [`HEIS_PATH_HEADER`] or
/// [`QUAT_PATH_HEADER`].
pub fn path_rows(path: &GeodesicPath) -> Vec<Vec<f64>> {
    path.samples()
        .iter()
        .map(|s| {
            let mut row = vec![s.t];
            row.extend_from_slice(s.point.x());
            row.extend_from_slice(s.point.z());
            if path.group() == GroupId::HeisenbergL {
                row.extend_from_slice(&s.velocity);
            }
            row.push(s.speed2());
            row
        })
        .collect()
}

pub fn path_header(group: GroupId) -> &'static [&'static str] {
    match group {
        GroupId::HeisenbergL => &HEIS_PATH_HEADER,
        GroupId::QuaternionH => &QUAT_PATH_HEADER,
    }
}

pub fn write_path_csv<W: Write>(w: W, path: &GeodesicPath) -> Result<()> {
    write_rows(w, path_header(path.group()), path_rows(path))
}

/// Pretty JSON followed by a newline.
pub fn write_json<W: Write, T: Serialize + ?Sized>(mut w: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value).map_err(io)?;
    writeln!(w).map_err(io)
}
