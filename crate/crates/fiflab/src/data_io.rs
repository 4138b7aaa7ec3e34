//! Ingestion of price-series CSVs, normalization to interpolation data, the
//! embedded case-study fixtures, and CSV/SVG/JSON emission.
//!
//! Input CSV header is exactly `label,min,max,avg`; labels are opaque text
//! (no quoting, so they must not contain commas). Output CSVs use the header
//! `y,z` with shortest round-trip float formatting, so export followed by
//! load reproduces every value bit-exactly.

use std::io::{BufRead, BufReader, Read, Write};

use serde::Serialize;
use thiserror::Error;

use crate::core::{CoreError, InterpolationData};
use crate::fif::FractalFunction;
use crate::ifs::PointCloud;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("bad CSV header: expected \"label,min,max,avg\", found {found:?}")]
    BadHeader { found: String },
    #[error("bad CSV row at line {line}: field {field} in {content:?}")]
    BadRow {
        line: usize,
        field: &'static str,
        content: String,
    },
    #[error("price ordering violated at line {line}: min {min}, avg {avg}, max {max}")]
    OrderViolation {
        line: usize,
        min: f64,
        max: f64,
        avg: f64,
    },
    #[error("a price series needs at least 3 rows, got {actual}")]
    TooFewRows { actual: usize },
    #[error("refusing to export empty data")]
    EmptyInput,
    #[error("sink write failure: {0}")]
    Sink(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] CoreError),
}

/// One month of price data (currency per kg; units are metadata only).
#[derive(Debug, Clone, PartialEq)]
pub struct PriceRow {
    pub label: String,
    pub min: f64,
    pub max: f64,
    pub avg: f64,
}

/// An ordered monthly price series with `min <= avg <= max` per row.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    rows: Vec<PriceRow>,
}

impl PriceSeries {
    pub fn new(rows: Vec<PriceRow>) -> Result<Self, DataError> {
        if rows.len() < 3 {
            return Err(DataError::TooFewRows { actual: rows.len() });
        }
        for (i, row) in rows.iter().enumerate() {
            if !(row.min <= row.avg && row.avg <= row.max) {
                return Err(DataError::OrderViolation {
                    line: i + 2, // header is line 1
                    min: row.min,
                    max: row.max,
                    avg: row.avg,
                });
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[PriceRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Parses a `label,min,max,avg` CSV stream into a [`PriceSeries`].
pub fn load_price_csv(source: impl Read) -> Result<PriceSeries, DataError> {
    let reader = BufReader::new(source);
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(line) => line?,
        None => {
            return Err(DataError::BadHeader {
                found: String::new(),
            })
        }
    };
    if header.trim_end_matches('\r') != "label,min,max,avg" {
        return Err(DataError::BadHeader { found: header });
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let lineno = i + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(DataError::BadRow {
                line: lineno,
                field: "count",
                content: line.to_string(),
            });
        }
        let parse = |idx: usize, name: &'static str| -> Result<f64, DataError> {
            fields[idx].trim().parse().map_err(|_| DataError::BadRow {
                line: lineno,
                field: name,
                content: line.to_string(),
            })
        };
        let row = PriceRow {
            label: fields[0].to_string(),
            min: parse(1, "min")?,
            max: parse(2, "max")?,
            avg: parse(3, "avg")?,
        };
        if !(row.min <= row.avg && row.avg <= row.max) {
            return Err(DataError::OrderViolation {
                line: lineno,
                min: row.min,
                max: row.max,
                avg: row.avg,
            });
        }
        rows.push(row);
    }
    PriceSeries::new(rows)
}

/// Maps row `i` of `n` to abscissa `i/(n-1)` on the unit interval, with the
/// average price as ordinate.
pub fn normalize_series(series: &PriceSeries) -> InterpolationData {
    let n = series.len();
    let points = series
        .rows()
        .iter()
        .enumerate()
        .map(|(i, row)| (i as f64 / (n - 1) as f64, row.avg))
        .collect();
    InterpolationData::new(points).expect("a valid price series normalizes cleanly")
}

/// The eleven-month spinach price series (September 2023 through July 2024,
/// Azadpur market, rupees per kg).
pub fn spinach_fixture() -> PriceSeries {
    let raw: [(&str, f64, f64, f64); 11] = [
        ("September 2023", 5.0, 11.0, 8.0),
        ("October 2023", 5.0, 10.0, 7.5),
        ("November 2023", 3.0, 9.0, 6.0),
        ("December 2023", 4.0, 10.0, 7.0),
        ("January 2024", 5.0, 15.0, 10.0),
        ("February 2024", 2.0, 8.0, 5.0),
        ("March 2024", 4.0, 10.0, 7.0),
        ("April 2024", 3.0, 8.0, 5.5),
        ("May 2024", 5.0, 10.0, 7.5),
        ("June 2024", 7.0, 10.0, 8.5),
        ("July 2024", 5.0, 15.0, 10.0),
    ];
    PriceSeries::new(
        raw.iter()
            .map(|&(label, min, max, avg)| PriceRow {
                label: label.to_string(),
                min,
                max,
                avg,
            })
            .collect(),
    )
    .expect("fixture rows are valid")
}

/// The seven-point demonstration dataset on `[4, 10]`.
pub fn figure1_fixture() -> InterpolationData {
    InterpolationData::new(vec![
        (4.0, 0.0),
        (5.0, 2.0),
        (7.0, 1.0),
        (7.5, 0.5),
        (8.0, 0.0),
        (9.0, 0.0),
        (10.0, 0.0),
    ])
    .expect("fixture points are valid")
}

fn write_xy_csv(points: impl Iterator<Item = (f64, f64)>, mut sink: impl Write) -> Result<(), DataError> {
    writeln!(sink, "y,z")?;
    for (y, z) in points {
        writeln!(sink, "{y},{z}")?;
    }
    Ok(())
}

/// Writes the converged samples of a fractal function as `y,z` CSV rows.
pub fn export_samples_csv(ff: &FractalFunction, sink: impl Write) -> Result<(), DataError> {
    let grid = ff.samples().grid();
    write_xy_csv(
        grid.nodes()
            .iter()
            .copied()
            .zip(ff.samples().values().iter().copied()),
        sink,
    )
}

/// Writes a point cloud as `y,z` CSV rows.
pub fn export_cloud_csv(cloud: &PointCloud, sink: impl Write) -> Result<(), DataError> {
    if cloud.is_empty() {
        return Err(DataError::EmptyInput);
    }
    write_xy_csv(cloud.points().iter().copied(), sink)
}

/// Reads a `y,z` CSV back into point pairs (the inverse of the exporters).
pub fn load_xy_csv(source: impl Read) -> Result<Vec<(f64, f64)>, DataError> {
    let reader = BufReader::new(source);
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(line) => line?,
        None => {
            return Err(DataError::BadHeader {
                found: String::new(),
            })
        }
    };
    if header.trim_end_matches('\r') != "y,z" {
        return Err(DataError::BadHeader { found: header });
    }
    let mut points = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let lineno = i + 2;
        let mut it = line.split(',');
        let mut parse = |name: &'static str| -> Result<f64, DataError> {
            it.next()
                .and_then(|f| f.trim().parse().ok())
                .ok_or(DataError::BadRow {
                    line: lineno,
                    field: name,
                    content: line.to_string(),
                })
        };
        let y = parse("y")?;
        let z = parse("z")?;
        points.push((y, z));
    }
    Ok(points)
}

/// Rendering options for [`export_svg`].
#[derive(Debug, Clone)]
pub struct SvgStyle {
    pub width: u32,
    pub height: u32,
    /// Point markers instead of a connected polyline (for clouds).
    pub markers: bool,
    pub stroke: String,
}

impl Default for SvgStyle {
    fn default() -> Self {
        Self {
            width: 800,
            height: 500,
            markers: false,
            stroke: "#1c4587".to_string(),
        }
    }
}

/// Cap on emitted markers; denser clouds are thinned by stride.
const SVG_MARKER_CAP: usize = 20_000;

/// Emits a static SVG with the series affinely mapped into the viewbox
/// (y axis inverted), axis lines, and eleven tick labels along the x axis.
/// Line series become a single polyline; marker mode emits circles.
pub fn export_svg(
    points: &[(f64, f64)],
    style: &SvgStyle,
    mut sink: impl Write,
) -> Result<(), DataError> {
    if points.is_empty() {
        return Err(DataError::EmptyInput);
    }
    let (w, h) = (style.width as f64, style.height as f64);
    let (mut xlo, mut xhi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut ylo, mut yhi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in points {
        xlo = xlo.min(x);
        xhi = xhi.max(x);
        ylo = ylo.min(y);
        yhi = yhi.max(y);
    }
    let xw = if xhi > xlo { xhi - xlo } else { 1.0 };
    let yw = if yhi > ylo { yhi - ylo } else { 1.0 };
    let to_view = |x: f64, y: f64| -> (f64, f64) { ((x - xlo) / xw * w, h - (y - ylo) / yw * h) };

    writeln!(sink, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(
        sink,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        style.width, style.height, style.width, style.height
    )?;
    writeln!(
        sink,
        r##"  <line x1="0" y1="{h}" x2="{w}" y2="{h}" stroke="#555" stroke-width="1"/>"##
    )?;
    writeln!(
        sink,
        r##"  <line x1="0" y1="0" x2="0" y2="{h}" stroke="#555" stroke-width="1"/>"##
    )?;
    for j in 0..=10u32 {
        let frac = j as f64 / 10.0;
        let vx = frac * w;
        let label = xlo + frac * xw;
        writeln!(
            sink,
            r#"  <text x="{vx}" y="{}" font-size="10" text-anchor="middle">{label:.2}</text>"#,
            h - 4.0
        )?;
    }
    if style.markers {
        let stride = points.len().div_ceil(SVG_MARKER_CAP).max(1);
        for &(x, y) in points.iter().step_by(stride) {
            let (vx, vy) = to_view(x, y);
            writeln!(
                sink,
                r#"  <circle cx="{vx}" cy="{vy}" r="0.8" fill="{}"/>"#,
                style.stroke
            )?;
        }
    } else {
        let coords: Vec<String> = points
            .iter()
            .map(|&(x, y)| {
                let (vx, vy) = to_view(x, y);
                format!("{vx},{vy}")
            })
            .collect();
        writeln!(
            sink,
            r#"  <polyline fill="none" stroke="{}" stroke-width="1.2" points="{}"/>"#,
            style.stroke,
            coords.join(" ")
        )?;
    }
    writeln!(sink, "</svg>")?;
    Ok(())
}

/// Serializes any report value as pretty UTF-8 JSON with stable key order.
pub fn export_report_json<T: Serialize>(value: &T, mut sink: impl Write) -> Result<(), DataError> {
    serde_json::to_writer_pretty(&mut sink, value).map_err(std::io::Error::from)?;
    writeln!(sink)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_matches_recorded_rows() {
        let s = spinach_fixture();
        assert_eq!(s.len(), 11);
        assert_eq!(
            s.rows()[0],
            PriceRow {
                label: "September 2023".into(),
                min: 5.0,
                max: 11.0,
                avg: 8.0
            }
        );
        assert_eq!(s.rows()[4].label, "January 2024");
        assert_eq!(s.rows()[4].avg, 10.0);
        assert_eq!(s.rows()[10].label, "July 2024");
        assert_eq!(s.rows()[10].avg, 10.0);
    }

    #[test]
    fn normalization_matches_table() {
        let data = normalize_series(&spinach_fixture());
        let expected_y = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
        let expected_z = [8.0, 7.5, 6.0, 7.0, 10.0, 5.0, 7.0, 5.5, 7.5, 8.5, 10.0];
        for i in 0..11 {
            assert_eq!(data.abscissa(i), expected_y[i]);
            assert_eq!(data.ordinate(i), expected_z[i]);
        }
    }

    #[test]
    fn three_row_series_normalizes_to_halves() {
        let rows = vec![
            PriceRow { label: "a".into(), min: 1.0, max: 3.0, avg: 2.0 },
            PriceRow { label: "b".into(), min: 1.0, max: 3.0, avg: 2.5 },
            PriceRow { label: "c".into(), min: 1.0, max: 3.0, avg: 1.5 },
        ];
        let data = normalize_series(&PriceSeries::new(rows).unwrap());
        assert_eq!(data.abscissa(0), 0.0);
        assert_eq!(data.abscissa(1), 0.5);
        assert_eq!(data.abscissa(2), 1.0);
    }

    #[test]
    fn constant_series_is_collinear() {
        let rows = (0..4)
            .map(|i| PriceRow {
                label: format!("m{i}"),
                min: 1.0,
                max: 3.0,
                avg: 2.0,
            })
            .collect();
        let data = normalize_series(&PriceSeries::new(rows).unwrap());
        assert!(data.is_collinear());
    }

    #[test]
    fn figure1_points() {
        let d = figure1_fixture();
        assert_eq!(d.len(), 7);
        assert_eq!(d.points()[1], (5.0, 2.0));
        assert!(d.points().windows(2).all(|w| w[1].0 > w[0].0));
    }

    #[test]
    fn csv_loads_fixture_shape() {
        let text = "label,min,max,avg\nSeptember 2023,5,11,8.0\nOctober 2023,5,10,7.5\nNovember 2023,3,9,6\n";
        let s = load_price_csv(text.as_bytes()).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.rows()[0].avg, 8.0);
    }

    #[test]
    fn csv_rejects_bad_header_and_rows() {
        assert!(matches!(
            load_price_csv("".as_bytes()),
            Err(DataError::BadHeader { .. })
        ));
        assert!(matches!(
            load_price_csv("month,low,high,mean\n".as_bytes()),
            Err(DataError::BadHeader { .. })
        ));
        let bad = "label,min,max,avg\nJan,5,x,8\n";
        assert!(matches!(
            load_price_csv(bad.as_bytes()),
            Err(DataError::BadRow { line: 2, field: "max", .. })
        ));
        let misordered = "label,min,max,avg\nJan,5,10,12\nFeb,5,10,7\nMar,5,10,7\n";
        assert!(matches!(
            load_price_csv(misordered.as_bytes()),
            Err(DataError::OrderViolation { line: 2, .. })
        ));
    }

    #[test]
    fn cloud_csv_round_trips_bit_exactly() {
        let cloud = PointCloud::new(vec![
            (0.1, -7.25),
            (std::f64::consts::PI, 1.0 / 3.0),
            (1e-17, 9.007199254740993e15),
        ]);
        let mut buf = Vec::new();
        export_cloud_csv(&cloud, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("y,z\n"));
        let back = load_xy_csv(buf.as_slice()).unwrap();
        assert_eq!(back, cloud.points());
    }

    #[test]
    fn svg_corner_mapping_and_single_polyline() {
        let mut buf = Vec::new();
        let style = SvgStyle {
            width: 100,
            height: 100,
            ..Default::default()
        };
        export_svg(&[(0.0, 0.0), (1.0, 1.0)], &style, &mut buf).unwrap();
        let svg = String::from_utf8(buf).unwrap();
        assert!(svg.contains(r#"points="0,100 100,0""#), "{svg}");
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert_eq!(svg.matches("<text").count(), 11);
        assert_eq!(svg.matches("<svg").count(), 1);
        assert!(svg.contains("</svg>"));
    }

    #[test]
    fn svg_marker_mode_has_no_polyline() {
        let mut buf = Vec::new();
        let style = SvgStyle {
            markers: true,
            ..Default::default()
        };
        export_svg(&[(0.0, 0.0), (0.5, 0.25), (1.0, 1.0)], &style, &mut buf).unwrap();
        let svg = String::from_utf8(buf).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 0);
        assert_eq!(svg.matches("<circle").count(), 3);
    }

    #[test]
    fn svg_rejects_empty_series() {
        let mut buf = Vec::new();
        assert!(matches!(
            export_svg(&[], &SvgStyle::default(), &mut buf),
            Err(DataError::EmptyInput)
        ));
        assert!(matches!(
            export_cloud_csv(&PointCloud::new(vec![]), &mut buf),
            Err(DataError::EmptyInput)
        ));
    }
}
