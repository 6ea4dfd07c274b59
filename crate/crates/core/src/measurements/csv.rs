//! CSV persistence for measurement sets.
//!
//! The data file has the fixed header `t,node_id,side,temp_c` with one row
//! per (step, node, side). Time base, ambient temperature, and node roles
//! live in a JSON sidecar next to the data file (`<stem>.meta.json`).
//! Temperatures are written with shortest round-trip formatting, so a
//! write/read cycle reproduces every finite value bit-exactly.

use super::{ChannelId, MeasurementError, MeasurementSet, NodeRoles, Side};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const CSV_HEADER: &str = "t,node_id,side,temp_c";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvMeta {
    pub dt_s: f64,
    pub tau_amb_c: f64,
    #[serde(default)]
    pub roles: NodeRoles,
}

fn meta_path(path: &Path) -> PathBuf {
    path.with_extension("meta.json")
}

fn io_err(path: &Path, source: std::io::Error) -> MeasurementError {
    MeasurementError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> MeasurementError {
    MeasurementError::ParseError {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

/// Writes the data CSV plus its metadata sidecar.
pub fn write_csv(
    set: &MeasurementSet,
    path: &Path,
    roles: &NodeRoles,
) -> Result<(), MeasurementError> {
    let mut out = String::with_capacity(set.len() * set.channel_ids().count() * 24);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for t in 0..set.len() {
        for (id, series) in set.iter() {
            out.push_str(&format!("{t},{},{},{}\n", id.node, id.side, series[t]));
        }
    }
    let mut file = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    file.write_all(out.as_bytes()).map_err(|e| io_err(path, e))?;

    let meta = CsvMeta {
        dt_s: set.dt_s(),
        tau_amb_c: set.tau_amb_c(),
        roles: roles.clone(),
    };
    let meta_file = meta_path(path);
    let json = serde_json::to_string_pretty(&meta).expect("meta serializes");
    std::fs::write(&meta_file, json).map_err(|e| io_err(&meta_file, e))?;
    Ok(())
}

/// Reads a data CSV using its metadata sidecar for dt/ambient/roles.
pub fn read_csv(path: &Path) -> Result<(MeasurementSet, NodeRoles), MeasurementError> {
    let meta_file = meta_path(path);
    let raw = std::fs::read_to_string(&meta_file).map_err(|e| io_err(&meta_file, e))?;
    let meta: CsvMeta = serde_json::from_str(&raw)
        .map_err(|e| parse_err(&meta_file, e.line(), e.to_string()))?;
    let set = read_csv_with_meta(path, meta.dt_s, meta.tau_amb_c)?;
    Ok((set, meta.roles))
}

/// Reads a data CSV with the time base and ambient supplied by the caller
/// (for files without a sidecar).
pub fn read_csv_with_meta(
    path: &Path,
    dt_s: f64,
    tau_amb_c: f64,
) -> Result<MeasurementSet, MeasurementError> {
    let raw = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = raw.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty file, expected header"))?;
    if header.trim_end() != CSV_HEADER {
        return Err(parse_err(
            path,
            1,
            format!("expected header `{CSV_HEADER}`, found `{header}`"),
        ));
    }

    // Collect (t, value) pairs per channel, then validate contiguity.
    let mut raw_channels: BTreeMap<ChannelId, Vec<(usize, f64)>> = BTreeMap::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let (t_str, node, side_str, temp_str) = match (
            parts.next(),
            parts.next(),
            parts.next(),
            parts.next(),
            parts.next(),
        ) {
            (Some(a), Some(b), Some(c), Some(d), None) => (a, b, c, d),
            _ => return Err(parse_err(path, line_no, "expected 4 comma-separated fields")),
        };
        let t: usize = t_str
            .parse()
            .map_err(|_| parse_err(path, line_no, format!("invalid step index `{t_str}`")))?;
        let side = match side_str {
            "supply" => Side::Supply,
            "return" => Side::Return,
            other => {
                return Err(parse_err(
                    path,
                    line_no,
                    format!("invalid side `{other}`, expected supply|return"),
                ))
            }
        };
        let temp: f64 = temp_str
            .parse()
            .map_err(|_| parse_err(path, line_no, format!("invalid temperature `{temp_str}`")))?;
        raw_channels
            .entry(ChannelId::new(node, side))
            .or_default()
            .push((t, temp));
    }

    let mut set = MeasurementSet::new(dt_s, tau_amb_c);
    for (id, mut rows) in raw_channels {
        rows.sort_by_key(|(t, _)| *t);
        let mut series = Vec::with_capacity(rows.len());
        for (expected, (t, v)) in rows.into_iter().enumerate() {
            if t != expected {
                return Err(parse_err(
                    path,
                    1,
                    format!("channel {id}: step {expected} missing or duplicated (saw {t})"),
                ));
            }
            series.push(v);
        }
        set.insert(id, series)?;
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (MeasurementSet, NodeRoles) {
        let mut set = MeasurementSet::new(3600.0, 10.0);
        set.insert(ChannelId::supply("S1"), vec![80.0, 80.5, 79.25])
            .unwrap();
        set.insert(ChannelId::ret("L1"), vec![45.0, 45.125, 44.0 + 1.0 / 3.0])
            .unwrap();
        let roles = NodeRoles {
            sources: vec!["S1".into()],
            loads: vec!["L1".into()],
        };
        (set, roles)
    }

    #[test]
    fn round_trip_is_lossless() {
        let dir = std::env::temp_dir().join("dhn_csv_round_trip");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("data.csv");
        let (set, roles) = sample();
        write_csv(&set, &path, &roles).unwrap();
        let (read, read_roles) = read_csv(&path).unwrap();
        assert_eq!(read, set);
        assert_eq!(read_roles, roles);
    }

    #[test]
    fn missing_header_is_line_one_error() {
        let dir = std::env::temp_dir().join("dhn_csv_bad_header");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("data.csv");
        std::fs::write(&path, "time,node,side,value\n0,S1,supply,80\n").unwrap();
        match read_csv_with_meta(&path, 60.0, 0.0) {
            Err(MeasurementError::ParseError { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn bad_temperature_reports_its_line() {
        let dir = std::env::temp_dir().join("dhn_csv_bad_value");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("data.csv");
        std::fs::write(
            &path,
            "t,node_id,side,temp_c\n0,S1,supply,80\n1,S1,supply,oops\n",
        )
        .unwrap();
        match read_csv_with_meta(&path, 60.0, 0.0) {
            Err(MeasurementError::ParseError { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn extra_column_rejected() {
        let dir = std::env::temp_dir().join("dhn_csv_extra_col");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("data.csv");
        std::fs::write(
            &path,
            "t,node_id,side,temp_c\n0,S1,supply,80,extra\n",
        )
        .unwrap();
        match read_csv_with_meta(&path, 60.0, 0.0) {
            Err(MeasurementError::ParseError { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
