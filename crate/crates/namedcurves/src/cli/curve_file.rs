//! The `NCV 1` curve file: a line-oriented text format holding one record
//! per (group, channel) with the curve's control-point outputs.
//!
//! Header `NCV 1 <M>`, then 18 lines `<group> <channel> <P_0> … <P_{M−1}>`.
//! Values serialize with Rust's shortest round-trip float formatting, so
//! `parse(serialize(x)) == x` bit-identically and canonical files survive a
//! parse/serialize cycle byte for byte.

use std::fmt::Write as _;

use thiserror::Error;

use crate::color_naming::ColorGroup;
use crate::tone_curves::{Channel, ControlPoints, CurveSet, CHANNEL_COUNT, CURVE_COUNT};

#[derive(Debug, Error)]
pub enum CurveFileError {
    #[error("line 1: expected header `NCV 1 <M>`, got {0:?}")]
    BadHeader(String),
    #[error("line {line}: {message}")]
    BadRecord { line: usize, message: String },
    #[error("incomplete curve file: {0}")]
    Incomplete(String),
}

/// Canonical serialization: groups in declaration order, channels r, g, b.
pub fn serialize_curveset(curves: &CurveSet) -> String {
    let mut out = String::new();
    writeln!(out, "NCV 1 {}", curves.point_count()).unwrap();
    for group in ColorGroup::ALL {
        for channel in Channel::ALL {
            let cp = curves.curve(group, channel);
            write!(out, "{} {}", group.name(), channel.name()).unwrap();
            for v in cp.values() {
                write!(out, " {v}").unwrap();
            }
            out.push('\n');
        }
    }
    out
}

/// Parse a curve file. Records may appear in any order but must cover each
/// (group, channel) exactly once and satisfy the control-point invariants;
/// errors carry the offending line number.
pub fn parse_curveset(text: &str) -> Result<CurveSet, CurveFileError> {
    let mut lines = text.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| CurveFileError::BadHeader(String::new()))?;
    let mut h = header.split_whitespace();
    let magic = h.next().unwrap_or_default();
    let version = h.next().unwrap_or_default();
    let m_str = h.next().unwrap_or_default();
    if magic != "NCV" || version != "1" || h.next().is_some() {
        return Err(CurveFileError::BadHeader(header.to_string()));
    }
    let point_count: usize = m_str
        .parse()
        .map_err(|_| CurveFileError::BadHeader(header.to_string()))?;
    if point_count < 2 {
        return Err(CurveFileError::BadHeader(header.to_string()));
    }

    let mut slots: Vec<Option<(usize, ControlPoints)>> = vec![None; CURVE_COUNT];
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let group_name = fields.next().unwrap_or_default();
        let group = ColorGroup::from_name(group_name).ok_or_else(|| CurveFileError::BadRecord {
            line: line_no,
            message: format!("unknown group {group_name:?}"),
        })?;
        let channel_name = fields.next().unwrap_or_default();
        let channel =
            Channel::from_name(channel_name).ok_or_else(|| CurveFileError::BadRecord {
                line: line_no,
                message: format!("unknown channel {channel_name:?}"),
            })?;
        let mut values = Vec::with_capacity(point_count);
        for f in fields {
            let v: f64 = f.parse().map_err(|_| CurveFileError::BadRecord {
                line: line_no,
                message: format!("bad number {f:?}"),
            })?;
            values.push(v);
        }
        if values.len() != point_count {
            return Err(CurveFileError::BadRecord {
                line: line_no,
                message: format!(
                    "expected {point_count} control points, got {}",
                    values.len()
                ),
            });
        }
        let cp = ControlPoints::from_values(group, channel, values).map_err(|e| {
            CurveFileError::BadRecord {
                line: line_no,
                message: e.to_string(),
            }
        })?;
        let slot = group.index() * CHANNEL_COUNT + channel.index();
        if let Some((first_line, _)) = slots[slot].as_ref() {
            return Err(CurveFileError::BadRecord {
                line: line_no,
                message: format!(
                    "duplicate record for {} {} (first on line {first_line})",
                    group.name(),
                    channel.name()
                ),
            });
        }
        slots[slot] = Some((line_no, cp));
    }

    let mut curves = Vec::with_capacity(CURVE_COUNT);
    let mut missing = Vec::new();
    for (slot, entry) in slots.into_iter().enumerate() {
        match entry {
            Some((_, cp)) => curves.push(cp),
            None => {
                let group = ColorGroup::ALL[slot / CHANNEL_COUNT];
                let channel = Channel::ALL[slot % CHANNEL_COUNT];
                missing.push(format!("{} {}", group.name(), channel.name()));
            }
        }
    }
    if !missing.is_empty() {
        return Err(CurveFileError::Incomplete(format!(
            "missing records: {}",
            missing.join(", ")
        )));
    }
    CurveSet::new(curves).map_err(|e| CurveFileError::Incomplete(e.to_string()))
}
