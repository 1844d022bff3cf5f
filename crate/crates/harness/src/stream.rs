//! Line-delimited JSON detection streams.
//!
//! Line 1 is a header object; every further line is one detection. Records
//! are ordered by `(frame_index, track_id)`, and every line, including the
//! last, ends with LF. Floats use the shortest representation that parses
//! back to the same bits.
//!
//! ```text
//! {"format_version":1,"feature_dim":256,"fps":30.0,"num_frames":5400,"prng_name":"...","seed":7,"config":{...}}
//! {"frame_index":0,"timestamp":0.0,"track_id":1,"feature":[...],"person_id":0,"bbox":null}
//! ```

use std::io::{BufRead, Write};

use carpe_core::sim::{Scenario, ScenarioConfig, PRNG_NAME};
use carpe_core::Detection;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StreamHeader {
    pub format_version: u32,
    pub feature_dim: usize,
    pub fps: f64,
    pub num_frames: u64,
    pub prng_name: String,
    pub seed: u64,
    pub config: ScenarioConfig,
}

impl StreamHeader {
    pub fn for_scenario(scenario: &Scenario) -> Self {
        let c = &scenario.config;
        Self {
            format_version: FORMAT_VERSION,
            feature_dim: c.feature_dim,
            fps: c.fps,
            num_frames: c.num_frames,
            prng_name: PRNG_NAME.to_string(),
            seed: c.seed,
            config: c.clone(),
        }
    }
}

/// Serializes `scenario` into `out`.
pub fn write_stream<W: Write>(scenario: &Scenario, mut out: W) -> std::io::Result<()> {
    let header = StreamHeader::for_scenario(scenario);
    serde_json::to_writer(&mut out, &header)?;
    out.write_all(b"\n")?;
    for dets in &scenario.frames {
        for det in dets {
            serde_json::to_writer(&mut out, det)?;
            out.write_all(b"\n")?;
        }
    }
    out.flush()
}

pub fn write_stream_to_vec(scenario: &Scenario) -> Vec<u8> {
    let mut buf = Vec::new();
    write_stream(scenario, &mut buf).expect("writing to a Vec cannot fail");
    buf
}

/// Parses a stream back into a scenario. Any malformed line is fatal and
/// reported with its 1-based line number.
pub fn read_stream<R: BufRead>(mut input: R) -> Result<Scenario> {
    let mut line = String::new();
    let mut line_no = 0usize;

    let mut next_line = |line: &mut String, line_no: &mut usize| -> Result<bool> {
        line.clear();
        let n = input
            .read_line(line)
            .map_err(|e| HarnessError::stream(*line_no + 1, format!("read failed: {e}")))?;
        if n == 0 {
            return Ok(false);
        }
        *line_no += 1;
        if !line.ends_with('\n') {
            return Err(HarnessError::stream(*line_no, "truncated line (missing newline)"));
        }
        line.pop();
        Ok(true)
    };

    if !next_line(&mut line, &mut line_no)? {
        return Err(HarnessError::stream(1, "empty stream, expected header"));
    }
    let header: StreamHeader = serde_json::from_str(&line)
        .map_err(|e| HarnessError::stream(line_no, format!("invalid header: {e}")))?;
    check_header(&header)?;

    let num_frames =
        usize::try_from(header.num_frames).map_err(|_| HarnessError::stream(1, "num_frames too large"))?;
    let mut frames: Vec<Vec<Detection>> = vec![Vec::new(); num_frames];
    let mut last: Option<(u64, u64)> = None;

    while next_line(&mut line, &mut line_no)? {
        let det: Detection = serde_json::from_str(&line)
            .map_err(|e| HarnessError::stream(line_no, format!("invalid record: {e}")))?;
        if det.feature.dim() != header.feature_dim {
            return Err(HarnessError::stream(
                line_no,
                format!(
                    "feature has {} values, header declares feature_dim {}",
                    det.feature.dim(),
                    header.feature_dim
                ),
            ));
        }
        if det.frame_index >= header.num_frames {
            return Err(HarnessError::stream(
                line_no,
                format!("frame_index {} beyond num_frames {}", det.frame_index, header.num_frames),
            ));
        }
        let key = (det.frame_index, det.track_id);
        if let Some(prev) = last {
            if key <= prev {
                return Err(HarnessError::stream(
                    line_no,
                    format!("record (frame {}, track {}) out of order", key.0, key.1),
                ));
            }
        }
        last = Some(key);
        frames[det.frame_index as usize].push(det);
    }

    Ok(Scenario::from_frames(header.config, frames)?)
}

fn check_header(h: &StreamHeader) -> Result<()> {
    if h.format_version != FORMAT_VERSION {
        return Err(HarnessError::stream(
            1,
            format!("unsupported format_version {} (expected {FORMAT_VERSION})", h.format_version),
        ));
    }
    let c = &h.config;
    let mut mismatched = Vec::new();
    if c.feature_dim != h.feature_dim {
        mismatched.push("feature_dim");
    }
    if c.fps.to_bits() != h.fps.to_bits() {
        mismatched.push("fps");
    }
    if c.num_frames != h.num_frames {
        mismatched.push("num_frames");
    }
    if c.seed != h.seed {
        mismatched.push("seed");
    }
    if !mismatched.is_empty() {
        return Err(HarnessError::stream(
            1,
            format!("header disagrees with its config echo on {}", mismatched.join(", ")),
        ));
    }
    c.validate().map_err(|e| HarnessError::stream(1, format!("config echo: {e}")))
}
