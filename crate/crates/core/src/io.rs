//! Text formats for complexes, signals and labels, plus number formatting
//! for CSV output.
//!
//! All formats are line based. Blank lines and anything after `#` are
//! ignored. Simplices are always addressed by their vertex labels:
//!
//! ```text
//! simplex 1 3 4          # complex file, closure added on load
//! value 1 3 0.25         # signal on edge (1,3)
//! value 1 3 0.25 -1.0    # two feature columns, order known from context
//! label 4 5 -2           # labeled edge (4,5)
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};

use crate::complex::{Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::interpolation::LabeledSignal;

/// Formats a number with 17 significant digits. Negative zero prints as
/// zero.
pub fn fmt_num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

/// CSV-safe simplex label, vertices joined by `-`.
pub fn simplex_label(s: &Simplex) -> String {
    s.vertices().iter().map(|v| v.to_string()).collect::<Vec<_>>().join("-")
}

fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let body = line.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

fn parse_err(line: usize, detail: impl Into<String>) -> Error {
    Error::Parse { line, detail: detail.into() }
}

fn parse_vertex(line: usize, tok: &str) -> Result<usize> {
    tok.parse().map_err(|_| parse_err(line, format!("bad vertex {tok:?}")))
}

fn parse_value(line: usize, tok: &str) -> Result<f64> {
    let v: f64 = tok.parse().map_err(|_| parse_err(line, format!("bad number {tok:?}")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("non-finite value {tok:?}")));
    }
    Ok(v)
}

fn parse_simplex(line: usize, toks: &[&str]) -> Result<Simplex> {
    let vs = toks.iter().map(|t| parse_vertex(line, t)).collect::<Result<Vec<_>>>()?;
    Simplex::new(vs).map_err(|e| parse_err(line, e.to_string()))
}

fn expect_keyword(line: usize, tokens: &[&str], keyword: &str) -> Result<()> {
    if tokens[0] != keyword {
        return Err(parse_err(line, format!("expected record {keyword:?}, found {:?}", tokens[0])));
    }
    Ok(())
}

/// Reads `simplex v1 ... vk` records and closes them under faces.
pub fn parse_complex(text: &str) -> Result<SimplicialComplex> {
    let mut maximal = Vec::new();
    for (line, tokens) in records(text) {
        expect_keyword(line, &tokens, "simplex")?;
        if tokens.len() < 2 {
            return Err(parse_err(line, "simplex without vertices"));
        }
        maximal.push(parse_simplex(line, &tokens[1..])?);
    }
    Ok(SimplicialComplex::from_maximal_simplices(&maximal))
}

/// Writes the maximal simplices of `x`, one record per line.
pub fn format_complex(x: &SimplicialComplex) -> String {
    let mut out = String::new();
    for s in x.maximal_simplices() {
        let vs: Vec<String> = s.vertices().iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "simplex {}", vs.join(" "));
    }
    out
}

type Rows = Vec<(usize, Vec<f64>)>;

/// Rows keyed by simplex index, in file order.
fn collect_rows(
    text: &str,
    keyword: &str,
    x: &SimplicialComplex,
    order: Option<usize>,
    values_per_row: Option<usize>,
) -> Result<(usize, Rows)> {
    let mut order = order;
    let mut width = values_per_row;
    let mut rows = Vec::new();
    let mut seen = BTreeMap::new();
    for (line, tokens) in records(text) {
        expect_keyword(line, &tokens, keyword)?;
        let body = &tokens[1..];
        let k = match order {
            Some(k) => k,
            None => {
                // one value per record: vertex count is what remains
                if body.len() < 2 || body.len() > 4 {
                    return Err(parse_err(line, "expected 1 to 3 vertices followed by a value"));
                }
                body.len() - 2
            }
        };
        if body.len() < k + 2 {
            return Err(parse_err(line, format!("expected {} vertices followed by values", k + 1)));
        }
        let (vs, vals) = body.split_at(k + 1);
        if order.is_none() {
            order = Some(k);
        } else if order != Some(k) {
            return Err(parse_err(line, "records mix simplex orders"));
        }
        let w = *width.get_or_insert(vals.len());
        if vals.len() != w {
            return Err(parse_err(line, format!("expected {w} values, found {}", vals.len())));
        }
        let s = parse_simplex(line, vs)?;
        let idx = x.index_of(&s).ok_or_else(|| parse_err(line, format!("simplex {s} is not in the complex")))?;
        if let Some(prev) = seen.insert(idx, line) {
            return Err(parse_err(line, format!("simplex {s} already given on line {prev}")));
        }
        let vals = vals.iter().map(|t| parse_value(line, t)).collect::<Result<Vec<_>>>()?;
        rows.push((idx, vals));
    }
    let order = order.ok_or_else(|| parse_err(0, format!("no {keyword} records")))?;
    Ok((order, rows))
}

fn require_all(x: &SimplicialComplex, order: usize, rows: &[(usize, Vec<f64>)]) -> Result<()> {
    if order > x.max_order().unwrap_or(0) || x.count(order) == 0 {
        return Err(Error::InvalidOrder { order, max_order: x.max_order() });
    }
    let mut have = vec![false; x.count(order)];
    for (i, _) in rows {
        have[*i] = true;
    }
    let missing: Vec<String> =
        have.iter().enumerate().filter(|(_, h)| !**h).map(|(i, _)| x.simplices(order)[i].to_string()).collect();
    if !missing.is_empty() {
        return Err(Error::MissingSimplices(missing.join(" ")));
    }
    Ok(())
}

/// Reads one `value` record per simplex. The order is inferred from the
/// vertex count and every simplex of that order must appear exactly once.
pub fn parse_signal(text: &str, x: &SimplicialComplex) -> Result<(usize, DVector<f64>)> {
    let (order, rows) = collect_rows(text, "value", x, None, Some(1))?;
    require_all(x, order, &rows)?;
    let mut v = DVector::zeros(x.count(order));
    for (i, vals) in rows {
        v[i] = vals[0];
    }
    Ok((order, v))
}

/// Reads a feature matrix for simplices of a known order: each record is
/// `value v1 ... v_{order+1} x_1 ... x_F`.
pub fn parse_features(text: &str, x: &SimplicialComplex, order: usize) -> Result<DMatrix<f64>> {
    let (_, rows) = collect_rows(text, "value", x, Some(order), None)?;
    require_all(x, order, &rows)?;
    let width = rows[0].1.len();
    let mut m = DMatrix::zeros(x.count(order), width);
    for (i, vals) in rows {
        for (j, v) in vals.into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    Ok(m)
}

/// Reads `label v1 [v2] value` records.
pub fn parse_labels(text: &str, x: &SimplicialComplex) -> Result<(usize, LabeledSignal)> {
    let (order, rows) = collect_rows(text, "label", x, None, Some(1))?;
    if order > 1 {
        return Err(Error::InvalidOrder { order, max_order: Some(1) });
    }
    let (indices, values) = rows.into_iter().map(|(i, v)| (i, v[0])).unzip();
    Ok((order, LabeledSignal::new(indices, values, x.count(order))?))
}

/// Writes a signal in the `value` format.
pub fn format_signal(x: &SimplicialComplex, order: usize, v: &DVector<f64>) -> String {
    let mut out = String::new();
    for (s, val) in x.simplices(order).iter().zip(v.iter()) {
        let vs: Vec<String> = s.vertices().iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "value {} {}", vs.join(" "), fmt_num(*val));
    }
    out
}
