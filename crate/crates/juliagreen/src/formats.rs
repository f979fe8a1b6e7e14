//! Wire formats: JSON documents and the ray CSV dump.
//!
//! Floats are written with Rust's shortest round-trip formatting, so parsing
//! an emitted file and writing it again reproduces it byte for byte.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use juliagreen_core::goodset::{DyadicCoverLevel, DyadicInterval};
use juliagreen_core::radvar::RadVarReport;
use juliagreen_core::{
    ray_integrand, CombSlit, Complex64, DirectionAngle, PolyParams, RaySample, RealLandmarks,
};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsDoc {
    pub lambda: f64,
    pub xi: f64,
    pub eta: f64,
    pub rho: f64,
    pub nu: f64,
    pub a: f64,
    pub theorem_range: bool,
    pub escape_radius: f64,
    pub degenerate: bool,
}

impl From<&PolyParams> for ParamsDoc {
    fn from(p: &PolyParams) -> Self {
        ParamsDoc {
            lambda: p.lambda,
            xi: p.xi,
            eta: p.eta,
            rho: p.rho,
            nu: p.nu,
            a: p.a,
            theorem_range: p.theorem_range,
            escape_radius: p.escape_radius(),
            degenerate: p.is_degenerate(),
        }
    }
}

/// Header of the ray dump.
pub const RAY_CSV_HEADER: &str = "h,re_z,im_z,g,re_L,im_L,density";

/// One row of the ray dump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayRow {
    pub h: f64,
    pub re_z: f64,
    pub im_z: f64,
    pub g: f64,
    #[serde(rename = "re_L")]
    pub re_l: f64,
    #[serde(rename = "im_L")]
    pub im_l: f64,
    /// NaN where the density is singular.
    pub density: f64,
}

impl From<&RaySample> for RayRow {
    fn from(s: &RaySample) -> Self {
        RayRow {
            h: s.h,
            re_z: s.z.re,
            im_z: s.z.im,
            g: s.data.green,
            re_l: s.data.log_deriv.re,
            im_l: s.data.log_deriv.im,
            density: ray_integrand(s).unwrap_or(f64::NAN),
        }
    }
}

impl RayRow {
    fn fields(&self) -> [f64; 7] {
        [self.h, self.re_z, self.im_z, self.g, self.re_l, self.im_l, self.density]
    }
}

/// Shortest decimal text that parses back to the same double.
pub fn format_float(x: f64) -> String {
    format!("{x:?}")
}

pub fn ray_csv(rows: &[RayRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 120 + RAY_CSV_HEADER.len() + 1);
    out.push_str(RAY_CSV_HEADER);
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.fields().iter().map(|x| format_float(*x)).collect();
        // Writing into a String cannot fail.
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

pub fn parse_ray_csv(text: &str) -> Result<Vec<RayRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header.trim() == RAY_CSV_HEADER => {}
        other => {
            return Err(CliError::Parse(format!(
                "expected header `{RAY_CSV_HEADER}`, found `{}`",
                other.unwrap_or("")
            )))
        }
    }
    lines
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| {
            let values: Vec<f64> = line
                .split(',')
                .map(|cell| cell.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| CliError::Parse(format!("row {}: {e}", i + 2)))?;
            let [h, re_z, im_z, g, re_l, im_l, density] = values[..] else {
                return Err(CliError::Parse(format!(
                    "row {} has {} columns, expected 7",
                    i + 2,
                    values.len()
                )));
            };
            Ok(RayRow { h, re_z, im_z, g, re_l, im_l, density })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AngleDoc {
    pub num: u64,
    pub den: u64,
}

impl From<DirectionAngle> for AngleDoc {
    fn from(a: DirectionAngle) -> Self {
        AngleDoc {
            num: a.numerator(),
            den: a.denominator(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TipDoc {
    pub psi: AngleDoc,
    pub re_z: f64,
    pub im_z: f64,
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlitDoc {
    pub l: u64,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombDoc {
    pub base: String,
    pub slits: Vec<SlitDoc>,
}

impl CombDoc {
    pub fn new(slits: &[CombSlit]) -> Self {
        CombDoc {
            base: "pi_F".to_owned(),
            slits: slits
                .iter()
                .map(|s| SlitDoc {
                    l: s.position,
                    h: s.height,
                })
                .collect(),
        }
    }
}

/// A kept interval `[num/2^log2den, num/2^log2den + 2^{−len_log2den}]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalDoc {
    pub num: u128,
    pub log2den: u32,
    pub len_log2den: u32,
    pub index: String,
}

impl From<&DyadicInterval> for IntervalDoc {
    fn from(iv: &DyadicInterval) -> Self {
        // Left endpoint in lowest terms.
        let (num, log2den) = if iv.index == 0 {
            (0, 0)
        } else {
            let shift = iv.index.trailing_zeros().min(iv.len);
            (iv.index >> shift, iv.len - shift)
        };
        IntervalDoc {
            num,
            log2den,
            len_log2den: iv.len,
            index: iv.word_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverDoc {
    #[serde(rename = "N")]
    pub goodset_level: u32,
    pub k: u32,
    pub keep: Vec<IntervalDoc>,
}

impl From<&DyadicCoverLevel> for CoverDoc {
    fn from(c: &DyadicCoverLevel) -> Self {
        CoverDoc {
            goodset_level: c.goodset_level,
            k: c.level,
            keep: c.keep.iter().map(IntervalDoc::from).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleDoc {
    pub n: u32,
    pub s_n: f64,
    pub err: f64,
}

/// Radial-variation report. `tail_ratio` is `null` when too few scales exist.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadVarDoc {
    pub lambda: f64,
    pub psi: AngleDoc,
    pub a: f64,
    pub scales: Vec<ScaleDoc>,
    pub total: f64,
    pub tail_ratio: Option<f64>,
    pub converged: bool,
}

impl From<&RadVarReport> for RadVarDoc {
    fn from(r: &RadVarReport) -> Self {
        RadVarDoc {
            lambda: r.params.lambda,
            psi: r.angle.into(),
            a: r.params.a,
            scales: r
                .scales
                .iter()
                .map(|s| ScaleDoc {
                    n: s.n,
                    s_n: s.s_n,
                    err: s.quad_error_est,
                })
                .collect(),
            total: r.total,
            tail_ratio: r.tail_ratio.is_finite().then_some(r.tail_ratio),
            converged: r.converged,
        }
    }
}

/// One line of the radvar index file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexRow {
    pub psi: AngleDoc,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub total: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexDoc {
    pub lambda: f64,
    pub outside_theorem_range: bool,
    pub rows: Vec<IndexRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionRow {
    #[serde(rename = "N")]
    pub goodset_level: u32,
    pub transfer: f64,
    pub word_count: f64,
    pub lower_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexDoc {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexDoc {
    fn from(z: Complex64) -> Self {
        ComplexDoc { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandmarkDoc {
    pub n: usize,
    pub a: f64,
    pub c: f64,
    pub b: f64,
}

impl From<&RealLandmarks> for LandmarkDoc {
    fn from(m: &RealLandmarks) -> Self {
        LandmarkDoc {
            n: m.index,
            a: m.a,
            c: m.c,
            b: m.b,
        }
    }
}

/// `F`, `F′`, `F″` at one point, with optional real landmarks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoincareDoc {
    pub lambda: f64,
    pub w: ComplexDoc,
    pub value: ComplexDoc,
    pub d1: ComplexDoc,
    pub d2: ComplexDoc,
    pub depth: u32,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub landmarks: Vec<LandmarkDoc>,
}

/// Everything `radvar` prints when no output directory is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadVarBatch {
    pub index: IndexDoc,
    pub reports: Vec<RadVarDoc>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(h: f64) -> RayRow {
        RayRow {
            h,
            re_z: -0.1,
            im_z: 1.0 / 3.0,
            g: 1e-300,
            re_l: -2.5e17,
            im_l: 0.0,
            density: f64::NAN,
        }
    }

    #[test]
    fn csv_round_trip_is_bit_identical() {
        let rows = vec![row(0.5407847842564171), row(1e-7), row(std::f64::consts::PI)];
        let text = ray_csv(&rows);
        assert!(text.starts_with(RAY_CSV_HEADER));
        let parsed = parse_ray_csv(&text).unwrap();
        for (a, b) in rows.iter().zip(&parsed) {
            for (x, y) in a.fields().iter().zip(b.fields()) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
        assert_eq!(ray_csv(&parsed), text);
    }

    #[test]
    fn csv_rejects_malformed_input() {
        assert!(parse_ray_csv("x,y\n1,2").is_err());
        assert!(parse_ray_csv(&format!("{RAY_CSV_HEADER}\n1,2,3")).is_err());
        assert!(parse_ray_csv(&format!("{RAY_CSV_HEADER}\n1,2,3,4,5,6,oops")).is_err());
    }

    #[test]
    fn interval_endpoints_are_reduced() {
        let iv = DyadicInterval { index: 0b1010, len: 4 };
        let doc = IntervalDoc::from(&iv);
        assert_eq!((doc.num, doc.log2den, doc.len_log2den), (5, 3, 4));
        assert_eq!(doc.index, "1010");
        let zero = IntervalDoc::from(&DyadicInterval { index: 0, len: 3 });
        assert_eq!((zero.num, zero.log2den), (0, 0));
    }

    #[test]
    fn cover_json_uses_wire_names() {
        let cover = juliagreen_core::generate_cover(1, 1).unwrap();
        let json = serde_json::to_value(CoverDoc::from(&cover)).unwrap();
        assert_eq!(json["N"], 1);
        assert_eq!(json["k"], 1);
        assert!(json["keep"][0]["index"].is_string());
    }

    #[test]
    fn comb_json_shape() {
        let doc = CombDoc::new(&[CombSlit { position: 1, height: 0.25 }]);
        let text = serde_json::to_string(&doc).unwrap();
        assert_eq!(text, r#"{"base":"pi_F","slits":[{"l":1,"h":0.25}]}"#);
    }
}
