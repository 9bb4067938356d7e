//! Input files.
//!
//! Samples file: comma-separated text with header `group,x1,...,xd` and one
//! observation per row, optionally with a support file whose header is
//! `x1,...,xd`. Measures file: a JSON document
//! `{"support": [[...], ...], "groups": [{"name", "weights", "n"}, ...]}`.

use crate::error::{Error, Result};
use crate::inference::GroupedSample;
use crate::support::{Measure, MeasureCollection, SupportSpace};
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::sync::Arc;

/// Weight sums in a measures file must be within this of one.
pub const FILE_WEIGHT_TOL: f64 = 1e-9;

/// A validated collection, with the raw observations when they were given.
#[derive(Debug, Clone)]
pub struct Ingested {
    pub collection: MeasureCollection,
    pub samples: Option<GroupedSample>,
    pub group_names: Vec<String>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_coord(field: &str, line: usize) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| parse_err(line, format!("{field:?} is not a number")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("{field:?} is not finite")));
    }
    Ok(v)
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn record_line(r: &csv::StringRecord) -> usize {
    r.position().map_or(0, |p| p.line() as usize)
}

/// Parses a support file (`x1,...,xd` header).
pub fn parse_support(text: &str) -> Result<SupportSpace> {
    let mut rdr = reader(text);
    let d = rdr
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .len();
    if d == 0 {
        return Err(parse_err(1, "support header has no columns"));
    }
    let mut points = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| parse_err(e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
        let line = record_line(&rec);
        if rec.len() != d {
            return Err(parse_err(line, format!("expected {d} fields, found {}", rec.len())));
        }
        points.push(rec.iter().map(|f| parse_coord(f, line)).collect::<Result<Vec<_>>>()?);
    }
    SupportSpace::new(points)
}

/// Parses a samples file. Groups keep their order of first appearance.
/// Without a declared support, the support is the set of distinct observed
/// rows in lexicographic order.
pub fn parse_samples(text: &str, support: Option<Arc<SupportSpace>>) -> Result<Ingested> {
    let mut rdr = reader(text);
    let header = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    if header.len() < 2 || header.get(0) != Some("group") {
        return Err(parse_err(1, "header must be group,x1,...,xd"));
    }
    let d = header.len() - 1;
    let mut names: Vec<String> = Vec::new();
    let mut rows: Vec<(usize, Vec<f64>, usize)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| parse_err(e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
        let line = record_line(&rec);
        if rec.len() != d + 1 {
            return Err(parse_err(line, format!("expected {} fields, found {}", d + 1, rec.len())));
        }
        let name = &rec[0];
        if name.is_empty() {
            return Err(parse_err(line, "empty group label"));
        }
        let g = match names.iter().position(|n| n == name) {
            Some(g) => g,
            None => {
                names.push(name.to_string());
                names.len() - 1
            }
        };
        let x = rec.iter().skip(1).map(|f| parse_coord(f, line)).collect::<Result<Vec<_>>>()?;
        rows.push((g, x, line));
    }
    if rows.is_empty() {
        return Err(Error::EmptySample);
    }
    let support = match support {
        Some(s) => {
            if s.dim() != d {
                return Err(Error::SupportMismatch);
            }
            s
        }
        None => {
            let mut pts: Vec<Vec<f64>> = rows.iter().map(|(_, x, _)| x.iter().map(|&v| v + 0.0).collect()).collect();
            pts.sort_by(|a, b| {
                a.iter()
                    .zip(b)
                    .map(|(p, q)| p.total_cmp(q))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            pts.dedup();
            Arc::new(SupportSpace::new(pts)?)
        }
    };
    let mut groups = vec![Vec::new(); names.len()];
    for (g, x, line) in &rows {
        let i = support
            .index_of(x)
            .ok_or_else(|| parse_err(*line, "observation is not a support point"))?;
        groups[*g].push(i);
    }
    let samples = GroupedSample::new(support, groups)?;
    Ok(Ingested {
        collection: samples.to_collection()?,
        samples: Some(samples),
        group_names: names,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasuresFile {
    pub support: Vec<Vec<f64>>,
    pub groups: Vec<GroupEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupEntry {
    pub name: String,
    pub weights: Vec<f64>,
    pub n: u64,
}

fn line_of(text: &str, needle: &str) -> usize {
    text.lines().position(|l| l.contains(needle)).map_or(1, |i| i + 1)
}

/// Parses a measures file.
pub fn parse_measures(text: &str) -> Result<Ingested> {
    let doc: MeasuresFile = serde_json::from_str(text).map_err(|e| parse_err(e.line(), e.to_string()))?;
    let support = Arc::new(SupportSpace::new(doc.support)?);
    let mut measures = Vec::with_capacity(doc.groups.len());
    let mut sizes = Vec::with_capacity(doc.groups.len());
    for g in &doc.groups {
        let line = line_of(text, &format!("\"{}\"", g.name));
        if g.weights.len() != support.len() {
            return Err(parse_err(
                line,
                format!("group {:?} has {} weights for {} support points", g.name, g.weights.len(), support.len()),
            ));
        }
        let sum: f64 = g.weights.iter().sum();
        if (sum - 1.0).abs() > FILE_WEIGHT_TOL {
            return Err(parse_err(line, format!("weights of group {:?} sum to {sum}", g.name)));
        }
        if g.weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(parse_err(line, format!("group {:?} has a negative weight", g.name)));
        }
        if g.n == 0 {
            return Err(parse_err(line, format!("group {:?} has n = 0", g.name)));
        }
        let m = Measure::with_tolerance(support.clone(), g.weights.clone(), FILE_WEIGHT_TOL)
            .map_err(|e| parse_err(line, e.to_string()))?
            .with_sample_size(g.n);
        measures.push(m);
        sizes.push(g.n);
    }
    let collection = MeasureCollection::new(measures, sizes)?;
    let samples = crate::inference::GroupedSample::from_collection(&collection).ok();
    Ok(Ingested {
        collection,
        samples,
        group_names: doc.groups.into_iter().map(|g| g.name).collect(),
    })
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn read_samples(path: &Path, support: Option<&Path>) -> Result<Ingested> {
    let support = match support {
        Some(p) => Some(Arc::new(parse_support(&read(p)?)?)),
        None => None,
    };
    parse_samples(&read(path)?, support)
}

pub fn read_measures(path: &Path) -> Result<Ingested> {
    parse_measures(&read(path)?)
}

/// Serializes a collection as a measures file.
pub fn to_measures_file(collection: &MeasureCollection, names: &[String]) -> MeasuresFile {
    MeasuresFile {
        support: collection.support().points().to_vec(),
        groups: collection
            .measures()
            .iter()
            .zip(collection.sizes())
            .enumerate()
            .map(|(i, (m, &n))| GroupEntry {
                name: names.get(i).cloned().unwrap_or_else(|| format!("group{}", i + 1)),
                weights: m.weights().to_vec(),
                n,
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_without_support() {
        let ing = parse_samples("group,x1\nA,5\nA,5\nA,10\nB,10\n", None).unwrap();
        assert_eq!(ing.collection.support().points(), &[vec![5.0], vec![10.0]]);
        let w = ing.collection.measure(0).weights();
        assert!((w[0] - 2.0 / 3.0).abs() < 1e-15 && (w[1] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(ing.collection.measure(1).weights(), &[0.0, 1.0]);
        assert_eq!(ing.collection.sizes(), &[3, 1]);
        assert_eq!(ing.group_names, vec!["A", "B"]);
    }

    #[test]
    fn samples_errors_carry_lines() {
        let e = parse_samples("group,x1\nA,5\nB,five\n", None).unwrap_err();
        assert_eq!(e.kind(), "ParseError");
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e:?}");
        let s = Arc::new(SupportSpace::from_scalars(&[5.0, 10.0]).unwrap());
        let e = parse_samples("group,x1\nA,5\nB,7\n", Some(s)).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e:?}");
        let e = parse_samples("grp,x1\nA,5\n", None).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn support_file() {
        let s = parse_support("x1,x2\n0,0\n1,0\n").unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(parse_support("x1\n1\n1\n").unwrap_err(), Error::DuplicateSupportPoint(1));
    }

    #[test]
    fn measures_weights_must_sum_to_one() {
        let good = r#"{"support": [[5], [10]], "groups": [
            {"name": "a", "weights": [0.5, 0.5], "n": 10},
            {"name": "b", "weights": [1.0, 0.0], "n": 20}]}"#;
        let ing = parse_measures(good).unwrap();
        assert_eq!(ing.collection.sizes(), &[10, 20]);
        let bad = r#"{"support": [[5], [10]], "groups": [
            {"name": "a", "weights": [0.5, 0.5], "n": 10},
            {"name": "b", "weights": [0.7, 0.2], "n": 20}]}"#;
        let e = parse_measures(bad).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e:?}");
        let broken = "{\"support\": [[5]],\n \"groups\": [}";
        assert!(matches!(parse_measures(broken).unwrap_err(), Error::Parse { line: 2, .. }));
    }
}
