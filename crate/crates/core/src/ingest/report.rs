//! Routing report: JSON with a fixed key set and deterministic field order.

use super::ParseError;
use crate::power::PowerReport;
use serde::{Deserialize, Serialize};

#[derive(Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct ReportDoc {
    trunks: usize,
    channels: usize,
    avg_channels_per_trunk: f64,
    total_trunk_length_mm: f64,
    power: PowerDoc,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
struct PowerDoc {
    p_cross: f64,
    p_trunk_thm: f64,
    p_ring_thm: f64,
    p_path: f64,
    p_dynamic: f64,
    p_total: f64,
}

/// Serialize a report. Numbers use shortest round-trip formatting, so
/// `parse_report(write_report(r)) == r` bit for bit.
pub fn write_report(r: &PowerReport) -> String {
    let doc = ReportDoc {
        trunks: r.trunk_count,
        channels: r.channel_count,
        avg_channels_per_trunk: r.avg_channels_per_trunk,
        total_trunk_length_mm: r.total_trunk_length_mm,
        power: PowerDoc {
            p_cross: r.p_cross,
            p_trunk_thm: r.p_trunk_thm,
            p_ring_thm: r.p_ring_thm,
            p_path: r.p_path,
            p_dynamic: r.p_dynamic,
            p_total: r.p_total,
        },
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("report serialization cannot fail");
    out.push('\n');
    out
}

pub fn parse_report(text: &str) -> Result<PowerReport, ParseError> {
    let doc: ReportDoc = serde_json::from_str(text)
        .map_err(|e| ParseError::new(e.line().max(1), e.column().max(1), e.to_string()))?;
    Ok(PowerReport {
        trunk_count: doc.trunks,
        channel_count: doc.channels,
        avg_channels_per_trunk: doc.avg_channels_per_trunk,
        total_trunk_length_mm: doc.total_trunk_length_mm,
        p_cross: doc.power.p_cross,
        p_trunk_thm: doc.power.p_trunk_thm,
        p_ring_thm: doc.power.p_ring_thm,
        p_path: doc.power.p_path,
        p_dynamic: doc.power.p_dynamic,
        p_total: doc.power.p_total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> PowerReport {
        PowerReport {
            trunk_count: 2,
            channel_count: 5,
            avg_channels_per_trunk: 2.5,
            total_trunk_length_mm: 37.25,
            p_cross: 0.05,
            p_trunk_thm: 0.125,
            p_ring_thm: 0.2746529032258065,
            p_path: 0.17672981789796012,
            p_dynamic: 3.0,
            p_total: 3.6263827211237665,
        }
    }

    #[test]
    fn roundtrip_is_exact() {
        let r = sample();
        let text = write_report(&r);
        let back = parse_report(&text).unwrap();
        assert_eq!(back, r);
        // Serializing again yields identical bytes.
        assert_eq!(write_report(&back), text);
    }

    #[test]
    fn empty_assignment_report() {
        let r = PowerReport {
            trunk_count: 0,
            channel_count: 0,
            avg_channels_per_trunk: 0.0,
            total_trunk_length_mm: 0.0,
            p_cross: 0.0,
            p_trunk_thm: 0.0,
            p_ring_thm: 0.0,
            p_path: 0.0,
            p_dynamic: 0.0,
            p_total: 0.0,
        };
        let text = write_report(&r);
        assert!(text.contains("\"trunks\": 0"));
        assert_eq!(parse_report(&text).unwrap(), r);
    }

    #[test]
    fn field_order_is_deterministic() {
        let text = write_report(&sample());
        let trunks = text.find("\"trunks\"").unwrap();
        let channels = text.find("\"channels\"").unwrap();
        let power = text.find("\"power\"").unwrap();
        let p_cross = text.find("\"p_cross\"").unwrap();
        let p_total = text.find("\"p_total\"").unwrap();
        assert!(trunks < channels && channels < power && power < p_cross && p_cross < p_total);
    }

    #[test]
    fn rejects_malformed_and_unknown_fields() {
        let err = parse_report("{\"trunks\": 1").unwrap_err();
        assert!(err.line >= 1);
        assert!(parse_report("{\"trunks\": 1, \"bogus\": 2}").is_err());
        assert!(parse_report("").is_err());
    }
}
