//! Sweep tables as CSV/JSON and line plots as SVG.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::volume::{Column, SweepParam, SweepRow, SweepTable};

/// Significant digits written to CSV cells.
pub const CSV_DIGITS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableFormat {
    Csv,
    Json,
}

impl std::str::FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(TableFormat::Csv),
            "json" => Ok(TableFormat::Json),
            other => Err(Error::domain(format!("unknown table format {other:?}"))),
        }
    }
}

/// One flat table row. Non-finite values are stored as `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableRecord {
    pub param: f64,
    pub gamma_quantum: f64,
    pub gamma_separable: f64,
    pub gamma_entangled: f64,
    pub ratio: Option<f64>,
    pub std_error_quantum: f64,
    pub std_error_separable: f64,
    pub std_error_entangled: f64,
    pub std_error_ratio: Option<f64>,
    pub evals: usize,
}

impl From<&SweepRow> for TableRecord {
    fn from(r: &SweepRow) -> Self {
        let finite = |x: f64| x.is_finite().then_some(x);
        TableRecord {
            param: r.param,
            gamma_quantum: r.quantum.value,
            gamma_separable: r.separable.value,
            gamma_entangled: r.entangled.value,
            ratio: finite(r.ratio),
            std_error_quantum: r.quantum.std_error,
            std_error_separable: r.separable.std_error,
            std_error_entangled: r.entangled.std_error,
            std_error_ratio: finite(r.ratio_std_error),
            evals: r.quantum.evals,
        }
    }
}

pub fn table_records(table: &SweepTable) -> Vec<TableRecord> {
    table.rows.iter().map(TableRecord::from).collect()
}

/// `x` with [`CSV_DIGITS`] significant digits, `NaN` for non-finite input.
pub fn format_sig(x: f64) -> String {
    if !x.is_finite() {
        return "NaN".to_string();
    }
    format!("{:.*e}", CSV_DIGITS - 1, x)
}

/// Column names shared by the CSV header and the JSON row keys.
pub const COLUMNS: [&str; 10] = [
    "param",
    "gamma_quantum",
    "gamma_separable",
    "gamma_entangled",
    "ratio",
    "std_error_quantum",
    "std_error_separable",
    "std_error_entangled",
    "std_error_ratio",
    "evals",
];

/// Serializes a table. CSV cells carry [`CSV_DIGITS`] significant digits;
/// JSON keeps full round-trip precision.
pub fn write_table<W: Write>(table: &SweepTable, format: TableFormat, out: W) -> Result<()> {
    let rows = table_records(table);
    match format {
        TableFormat::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(out);
            let io = |e: csv::Error| Error::Io(e.to_string());
            w.write_record(COLUMNS).map_err(io)?;
            for r in &rows {
                let opt = |x: Option<f64>| format_sig(x.unwrap_or(f64::NAN));
                w.write_record([
                    format_sig(r.param),
                    format_sig(r.gamma_quantum),
                    format_sig(r.gamma_separable),
                    format_sig(r.gamma_entangled),
                    opt(r.ratio),
                    format_sig(r.std_error_quantum),
                    format_sig(r.std_error_separable),
                    format_sig(r.std_error_entangled),
                    opt(r.std_error_ratio),
                    r.evals.to_string(),
                ])
                .map_err(io)?;
            }
            w.flush()?;
        }
        TableFormat::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, &rows).map_err(|e| Error::Io(e.to_string()))?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

pub fn table_to_string(table: &SweepTable, format: TableFormat) -> Result<String> {
    let mut buf = Vec::new();
    write_table(table, format, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}

pub fn emit_table(table: &SweepTable, format: TableFormat, path: &Path) -> Result<()> {
    fs::write(path, table_to_string(table, format)?)?;
    Ok(())
}

/// Parses rows written by [`write_table`] in JSON format.
pub fn read_table_json(text: &str) -> Result<Vec<TableRecord>> {
    serde_json::from_str(text).map_err(|e| Error::Io(e.to_string()))
}

/// Parses rows written by [`write_table`] in CSV format.
pub fn read_table_csv(text: &str) -> Result<Vec<TableRecord>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let io = |e: csv::Error| Error::Io(e.to_string());
    let header = r.headers().map_err(io)?;
    if header.iter().ne(COLUMNS) {
        return Err(Error::Io("unexpected csv header".into()));
    }
    let num = |s: &str| -> Result<f64> {
        s.parse::<f64>()
            .map_err(|e| Error::Io(format!("bad number {s:?}: {e}")))
    };
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(io)?;
        if rec.len() != 10 {
            return Err(Error::Io(format!("expected 10 fields, got {}", rec.len())));
        }
        let opt = |s: &str| num(s).map(|x| x.is_finite().then_some(x));
        rows.push(TableRecord {
            param: num(&rec[0])?,
            gamma_quantum: num(&rec[1])?,
            gamma_separable: num(&rec[2])?,
            gamma_entangled: num(&rec[3])?,
            ratio: opt(&rec[4])?,
            std_error_quantum: num(&rec[5])?,
            std_error_separable: num(&rec[6])?,
            std_error_entangled: num(&rec[7])?,
            std_error_ratio: opt(&rec[8])?,
            evals: rec[9]
                .parse()
                .map_err(|e| Error::Io(format!("bad count {:?}: {e}", &rec[9])))?,
        });
    }
    Ok(rows)
}

/// Columns plotted by default: volumes for a `κ` sweep, the
/// entangled/separable ratio for `θ` and `η` sweeps.
pub fn default_series(param: SweepParam) -> Vec<Column> {
    match param {
        SweepParam::Kappa => vec![Column::Quantum, Column::Separable, Column::Entangled],
        SweepParam::Theta | SweepParam::Eta => vec![Column::Ratio],
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Tick positions at 1, 2 or 5 times a power of ten.
fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|k| k * mag)
        .find(|s| span / s <= 6.0)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn tick_label(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let a = x.abs();
    if (1e-3..1e4).contains(&a) {
        let s = format!("{x:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{x:.0e}")
    }
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: &[f64], allow_log: bool) -> Axis {
        let (mut lo, mut hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                (a.min(v), b.max(v))
            });
        let log = allow_log && lo > 0.0 && hi / lo > 1e3;
        if log {
            lo = lo.log10().floor();
            hi = hi.log10().ceil();
        } else if hi - lo < 1e-300 {
            let pad = if hi == 0.0 { 1.0 } else { 0.1 * hi.abs() };
            lo -= pad;
            hi += pad;
        }
        Axis { lo, hi, log }
    }

    fn frac(&self, v: f64) -> f64 {
        let v = if self.log { v.log10() } else { v };
        (v - self.lo) / (self.hi - self.lo)
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            (self.lo as i64..=self.hi as i64)
                .map(|k| (self.frac(10f64.powi(k as i32)), format!("1e{k}")))
                .collect()
        } else {
            nice_ticks(self.lo, self.hi)
                .into_iter()
                .map(|t| (self.frac(t), tick_label(t)))
                .collect()
        }
    }
}

/// Renders the given columns against the swept parameter as an SVG line
/// plot with axes, numeric ticks and a legend. The y axis switches to a
/// logarithmic scale when all plotted values are positive and span more
/// than three decades.
pub fn render_plot(table: &SweepTable, series: &[Column]) -> Result<String> {
    if table.rows.len() < 2 {
        return Err(Error::domain("a plot needs at least two rows"));
    }
    if series.is_empty() {
        return Err(Error::domain("no series to plot"));
    }
    let xs: Vec<f64> = table.rows.iter().map(|r| r.param).collect();
    let lines: Vec<(Column, Vec<(f64, f64)>)> = series
        .iter()
        .map(|&c| {
            let pts = xs
                .iter()
                .zip(table.column(c))
                .filter(|(_, (y, _))| y.is_finite())
                .map(|(&x, (y, _))| (x, y))
                .collect();
            (c, pts)
        })
        .collect();
    let ys: Vec<f64> = lines
        .iter()
        .flat_map(|(_, p)| p.iter().map(|q| q.1))
        .collect();
    if ys.is_empty() {
        return Err(Error::domain("no finite values to plot"));
    }
    let xa = Axis::fit(&xs, false);
    let ya = Axis::fit(&ys, true);
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + pw * xa.frac(x);
    let py = |y: f64| TOP + ph * (1.0 - ya.frac(y));

    let mut s = String::new();
    let w = &mut s;
    // writing to a String cannot fail
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<g id="axes" stroke="black" fill="none"><line x1="{LEFT}" y1="{y0}" x2="{x1}" y2="{y0}"/><line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{y0}"/></g>"#,
        y0 = TOP + ph,
        x1 = LEFT + pw
    );
    let _ = writeln!(w, r#"<g id="x-ticks" text-anchor="middle">"#);
    for (f, label) in xa.ticks() {
        let x = LEFT + pw * f;
        let _ = writeln!(
            w,
            r#"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{y1}" stroke="black"/><text x="{x:.2}" y="{yt}">{label}</text>"#,
            y0 = TOP + ph,
            y1 = TOP + ph + 5.0,
            yt = TOP + ph + 20.0
        );
    }
    let _ = writeln!(w, "</g>");
    let _ = writeln!(w, r#"<g id="y-ticks" text-anchor="end">"#);
    for (f, label) in ya.ticks() {
        let y = TOP + ph * (1.0 - f);
        let _ = writeln!(
            w,
            r#"<line x1="{x0}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{xt}" y="{yl:.2}">{label}</text>"#,
            x0 = LEFT - 5.0,
            xt = LEFT - 8.0,
            yl = y + 4.0
        );
    }
    let _ = writeln!(w, "</g>");
    let _ = writeln!(
        w,
        r#"<text x="{x:.2}" y="{y}" text-anchor="middle">{name}</text>"#,
        x = LEFT + pw / 2.0,
        y = HEIGHT - 15.0,
        name = table.parameter.name()
    );
    for (k, (col, pts)) in lines.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let path: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            w,
            r#"<polyline class="series" data-series="{name}" fill="none" stroke="{color}" stroke-width="2" points="{pts}"/>"#,
            name = col.name(),
            pts = path.join(" ")
        );
    }
    let _ = writeln!(w, r#"<g id="legend">"#);
    for (k, (col, _)) in lines.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let y = TOP + 10.0 + 18.0 * k as f64;
        let x = LEFT + pw - 150.0;
        let _ = writeln!(
            w,
            r#"<line x1="{x}" y1="{y}" x2="{x2}" y2="{y}" stroke="{color}" stroke-width="2"/><text x="{xt}" y="{yt}">{name}</text>"#,
            x2 = x + 20.0,
            xt = x + 26.0,
            yt = y + 4.0,
            name = col.name()
        );
    }
    let _ = writeln!(w, "</g>\n</svg>");
    Ok(s)
}

pub fn emit_plot(table: &SweepTable, series: &[Column], path: &Path) -> Result<()> {
    fs::write(path, render_plot(table, series)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::volume::{IntegralEstimate, Method};

    fn est(value: f64) -> IntegralEstimate {
        IntegralEstimate {
            value,
            std_error: 1e-3,
            evals: 100,
            method: Method::GaussLegendrePolar,
            accepted: 10,
        }
    }

    fn table() -> SweepTable {
        let rows = (0..4)
            .map(|k| {
                let x = 0.1 + 0.3 * k as f64;
                SweepRow {
                    param: x,
                    quantum: est(2.0 - x),
                    separable: est(1.0 - 0.5 * x),
                    entangled: est(1.0 - 0.5 * x),
                    ratio: if k == 0 { f64::NAN } else { x * x },
                    ratio_std_error: 1e-4,
                }
            })
            .collect();
        SweepTable {
            parameter: SweepParam::Theta,
            rows,
        }
    }

    #[test]
    fn sig_digits() {
        assert_eq!(format_sig(1.0 / 3.0), "3.33333333e-1");
        assert_eq!(format_sig(f64::NAN), "NaN");
        assert_eq!(format_sig(-2.0), "-2.00000000e0");
    }

    #[test]
    fn csv_layout() {
        let s = table_to_string(&table(), TableFormat::Csv).unwrap();
        let first = s.lines().next().unwrap();
        assert!(first
            .starts_with("param,gamma_quantum,gamma_separable,gamma_entangled,ratio,std_error_"));
        assert_eq!(s.lines().count(), 5);
        assert!(!s.contains('\r'));
        let rows = read_table_csv(&s).unwrap();
        assert_eq!(rows[0].ratio, None);
        assert!((rows[2].ratio.unwrap() - 0.49).abs() < 1e-9);
    }

    #[test]
    fn json_round_trip() {
        let t = table();
        let s = table_to_string(&t, TableFormat::Json).unwrap();
        assert!(s.trim_start().starts_with('['));
        assert_eq!(read_table_json(&s).unwrap(), table_records(&t));
        assert!(s.contains("\"ratio\": null"));
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = SweepTable {
            parameter: SweepParam::Kappa,
            rows: vec![],
        };
        let s = table_to_string(&t, TableFormat::Csv).unwrap();
        assert_eq!(s, format!("{}\n", COLUMNS.join(",")));
        assert_eq!(table_to_string(&t, TableFormat::Json).unwrap().trim(), "[]");
    }

    #[test]
    fn svg_needs_two_rows() {
        let mut t = table();
        t.rows.truncate(1);
        assert!(render_plot(&t, &[Column::Ratio]).is_err());
    }

    #[test]
    fn svg_has_series_and_ticks() {
        let s = render_plot(&table(), &[Column::Quantum, Column::Separable]).unwrap();
        assert_eq!(s.matches("<polyline").count(), 2);
        assert!(s.contains("gamma_quantum"));
        assert!(s.contains("id=\"legend\""));
        assert!(s.matches("<text").count() > 6);
    }

    #[test]
    fn tick_spacing() {
        let t = nice_ticks(0.1, 1.0);
        assert!(t.len() >= 3 && t.len() <= 7, "{t:?}");
        assert!(t.iter().all(|&x| (0.1..=1.0 + 1e-12).contains(&x)));
    }
}
