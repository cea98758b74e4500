use std::io::{self, Write};

use serde::Serialize;
use substream_index::{ClosenessRanking, EdgeStream, Time, VertexId, INFINITY};

/// `%.{digits}g`-style rendering.
pub fn general(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i32;
    if exp < -5 || exp >= digits as i32 {
        let s = format!("{:.*e}", digits - 1, x);
        let (mantissa, e) = s.split_once('e').unwrap();
        return format!("{}e{e}", trim_zeros(mantissa));
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Quotes a CSV field when needed.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn finite(t: Time) -> Option<Time> {
    (t != INFINITY).then_some(t)
}

#[derive(Serialize)]
struct ValueRow<'a> {
    vertex: &'a str,
    value: Option<Time>,
}

/// Per-vertex query values; `column` names the value column.
pub fn write_values(
    mut w: impl Write,
    s: &EdgeStream,
    column: &str,
    values: &[Time],
    json: bool,
) -> io::Result<()> {
    if json {
        let rows: Vec<ValueRow> = values
            .iter()
            .enumerate()
            .map(|(v, &t)| ValueRow {
                vertex: s.label(VertexId(v as u32)),
                value: finite(t),
            })
            .collect();
        serde_json::to_writer_pretty(&mut w, &rows)?;
        return writeln!(w);
    }
    writeln!(w, "vertex,{column}")?;
    for (v, &t) in values.iter().enumerate() {
        let shown = finite(t).map_or_else(|| "inf".to_string(), |t| t.to_string());
        writeln!(w, "{},{shown}", csv_field(s.label(VertexId(v as u32))))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct RankRow<'a> {
    vertex: &'a str,
    closeness: f64,
    rank: usize,
}

pub fn write_ranking(mut w: impl Write, s: &EdgeStream, ranking: &ClosenessRanking, json: bool) -> io::Result<()> {
    if json {
        let rows: Vec<RankRow> = ranking
            .entries()
            .iter()
            .enumerate()
            .map(|(i, e)| RankRow {
                vertex: s.label(e.vertex),
                closeness: e.closeness,
                rank: i + 1,
            })
            .collect();
        serde_json::to_writer_pretty(&mut w, &rows)?;
        return writeln!(w);
    }
    writeln!(w, "vertex,closeness,rank")?;
    for (i, e) in ranking.entries().iter().enumerate() {
        writeln!(w, "{},{},{}", csv_field(s.label(e.vertex)), general(e.closeness, 12), i + 1)?;
    }
    Ok(())
}
