//! Latency model for shipping frames to a remote detector instead of
//! processing on device. Pure arithmetic over link rates; transfer time
//! in milliseconds is 8000 * bytes / bits_per_second.

use crate::error::{Error, Result};
use serde::Serialize;

/// A transport link: payload rates in bits per second plus a fixed
/// round-trip cost.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkProfile {
    pub name: String,
    pub uplink_bps: f64,
    pub downlink_bps: f64,
    pub rtt_ms: f64,
}

impl LinkProfile {
    pub fn new(
        name: impl Into<String>,
        uplink_bps: f64,
        downlink_bps: f64,
        rtt_ms: f64,
    ) -> Result<Self> {
        let name = name.into();
        if !(uplink_bps.is_finite() && uplink_bps > 0.0) {
            return Err(Error::InvalidInput(format!(
                "link '{name}': uplink must be a positive rate, got {uplink_bps}"
            )));
        }
        if !(downlink_bps.is_finite() && downlink_bps > 0.0) {
            return Err(Error::InvalidInput(format!(
                "link '{name}': downlink must be a positive rate, got {downlink_bps}"
            )));
        }
        if !(rtt_ms.is_finite() && rtt_ms >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "link '{name}': round-trip time must be nonnegative, got {rtt_ms}"
            )));
        }
        Ok(LinkProfile {
            name,
            uplink_bps,
            downlink_bps,
            rtt_ms,
        })
    }
}

/// Measured-class transports. Rates use decimal kilo/mega.
pub fn builtin_profiles() -> Vec<LinkProfile> {
    vec![
        LinkProfile::new("bluetooth", 430_000.0, 950_000.0, 0.0).expect("static profile"),
        LinkProfile::new("3g", 150_000.0, 2_000_000.0, 0.0).expect("static profile"),
        LinkProfile::new("lte", 50_000_000.0, 100_000_000.0, 10.0).expect("static profile"),
    ]
}

/// Looks up a built-in profile by name (case-insensitive).
pub fn builtin_profile(name: &str) -> Result<LinkProfile> {
    let lower = name.to_ascii_lowercase();
    builtin_profiles()
        .into_iter()
        .find(|p| p.name == lower)
        .ok_or_else(|| {
            Error::InvalidInput(format!(
                "unknown link '{name}' (built-ins: bluetooth, 3g, lte)"
            ))
        })
}

/// Per-frame latency split for one round trip over a link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OffloadEstimate {
    pub upload_ms: f64,
    pub result_download_ms: f64,
    pub rtt_ms: f64,
    pub total_ms: f64,
    pub max_fps: f64,
}

/// Time to push `frame_bytes` up, pull `result_bytes` back, and pay the
/// link's round-trip cost once. `max_fps` assumes frames are processed
/// back to back with no pipelining.
pub fn estimate_frame_latency(
    frame_bytes: u64,
    result_bytes: u64,
    link: &LinkProfile,
) -> OffloadEstimate {
    let upload_ms = 8000.0 * frame_bytes as f64 / link.uplink_bps;
    let result_download_ms = 8000.0 * result_bytes as f64 / link.downlink_bps;
    let total_ms = upload_ms + result_download_ms + link.rtt_ms;
    let max_fps = if total_ms > 0.0 {
        1000.0 / total_ms
    } else {
        f64::INFINITY
    };
    OffloadEstimate {
        upload_ms,
        result_download_ms,
        rtt_ms: link.rtt_ms,
        total_ms,
        max_fps,
    }
}
